//! Differential forms on `Δⁿ × Gᵐ`, evaluated pointwise.
//!
//! A form is an alternating multilinear evaluator: given a base point and `p`
//! tangent vectors it returns a scalar, a Lie-algebra matrix, or a sum of
//! tensor products of matrices. Simplex points are stored by the coordinates
//! `(t₁, …, tₙ)`; `t₀ = 1 − Σtᵢ` is implicit, and simplex velocities are the
//! components along `∂/∂t₁, …, ∂/∂tₙ`.

use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use itertools::Itertools;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::liegroup::{mat_exp, MatrixGroup, TANGENT_TOL};
use crate::matrix::{self, CMat};
use crate::sampling::SampleRng;
use crate::simplicial::{NerveKind, NerveLevel};

/// Step for the central differences in [`DifferentialForm::exterior_derivative`].
pub const FD_STEP: f64 = 1e-4;

/// Default polynomial degree integrated exactly by the fibre quadrature.
pub const DEFAULT_QUADRATURE_DEGREE: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error("forms live on different base spaces")]
    BaseMismatch,
    #[error("value types {0:?} and {1:?} cannot be combined here")]
    ValueType(ValueType, ValueType),
    #[error("degree mismatch: {0} vs {1}")]
    Degree(usize, usize),
    #[error("expected {expected} tangent arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("point or tangent does not match the base space: {0}")]
    Shape(String),
    #[error("slot {slot} velocity is not tangent (residual {residual:.3e})")]
    NotTangent { slot: usize, residual: f64 },
    #[error("map does not apply to this base space: {0}")]
    InvalidMap(String),
    #[error("no component at level {0}")]
    MissingComponent(usize),
}

/// `Δⁿ × Gᵐ`. A `simplex_dim` of zero means no simplex factor.
#[derive(Debug, Clone)]
pub struct BaseSpace {
    pub simplex_dim: usize,
    pub group_slots: usize,
    pub group: Arc<MatrixGroup>,
}

impl PartialEq for BaseSpace {
    fn eq(&self, other: &Self) -> bool {
        self.simplex_dim == other.simplex_dim
            && self.group_slots == other.group_slots
            && (Arc::ptr_eq(&self.group, &other.group) || self.group.name() == other.group.name())
    }
}

impl BaseSpace {
    pub fn new(simplex_dim: usize, group_slots: usize, group: Arc<MatrixGroup>) -> Self {
        Self {
            simplex_dim,
            group_slots,
            group,
        }
    }

    pub fn groups(group_slots: usize, group: Arc<MatrixGroup>) -> Self {
        Self::new(0, group_slots, group)
    }

    /// `Δⁿ × EGₙ`.
    pub fn simplex_eg(n: usize, group: Arc<MatrixGroup>) -> Self {
        Self::new(n, n + 1, group)
    }

    pub fn with_simplex(&self, simplex_dim: usize) -> Self {
        Self::new(simplex_dim, self.group_slots, self.group.clone())
    }

    pub fn with_slots(&self, group_slots: usize) -> Self {
        Self::new(self.simplex_dim, group_slots, self.group.clone())
    }

    fn matrix_size(&self) -> usize {
        self.group.n()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub t: Vec<f64>,
    pub g: Vec<CMat>,
}

impl Point {
    pub fn new(t: Vec<f64>, g: Vec<CMat>) -> Self {
        Self { t, g }
    }

    pub fn groups(g: Vec<CMat>) -> Self {
        Self { t: Vec::new(), g }
    }

    /// Barycentric coordinate `tⱼ`, `0 ≤ j ≤ n`.
    pub fn barycentric(&self, j: usize) -> f64 {
        if j == 0 {
            1.0 - self.t.iter().sum::<f64>()
        } else {
            self.t[j - 1]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub v: Vec<f64>,
    pub x: Vec<CMat>,
}

impl Tangent {
    pub fn new(v: Vec<f64>, x: Vec<CMat>) -> Self {
        Self { v, x }
    }

    /// Purely group-directional tangent (the lift `(0, u)`).
    pub fn slots(simplex_dim: usize, x: Vec<CMat>) -> Self {
        Self {
            v: vec![0.0; simplex_dim],
            x,
        }
    }

    /// `∂/∂tᵢ` for `1 ≤ i ≤ n`, with zero group components.
    pub fn coordinate(base: &BaseSpace, i: usize) -> Self {
        let mut v = vec![0.0; base.simplex_dim];
        v[i - 1] = 1.0;
        Self {
            v,
            x: vec![matrix::zeros(base.matrix_size()); base.group_slots],
        }
    }

    pub fn zero(base: &BaseSpace) -> Self {
        Self {
            v: vec![0.0; base.simplex_dim],
            x: vec![matrix::zeros(base.matrix_size()); base.group_slots],
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            v: self.v.iter().map(|a| a * c).collect(),
            x: self.x.iter().map(|m| m * Complex64::new(c, 0.0)).collect(),
        }
    }

    pub fn plus(&self, other: &Tangent) -> Self {
        Self {
            v: self.v.iter().zip(&other.v).map(|(a, b)| a + b).collect(),
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueType {
    Real,
    Complex,
    Algebra,
    AlgebraTensor(usize),
}

impl ValueType {
    fn tensor_rank(self) -> usize {
        match self {
            ValueType::Real | ValueType::Complex => 0,
            ValueType::Algebra => 1,
            ValueType::AlgebraTensor(k) => k,
        }
    }

    fn from_rank(rank: usize, complex: bool) -> Self {
        match rank {
            0 if complex => ValueType::Complex,
            0 => ValueType::Real,
            1 => ValueType::Algebra,
            k => ValueType::AlgebraTensor(k),
        }
    }

    fn is_scalar(self) -> bool {
        self.tensor_rank() == 0
    }

    fn product(self, other: ValueType) -> ValueType {
        let complex = self == ValueType::Complex || other == ValueType::Complex;
        ValueType::from_rank(self.tensor_rank() + other.tensor_rank(), complex)
    }
}

/// `coeff · X₁ ⊗ ⋯ ⊗ X_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorTerm {
    pub coeff: Complex64,
    pub factors: Vec<CMat>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormValue {
    Scalar(Complex64),
    Matrix(CMat),
    /// Sum of elementary tensors, all of the same rank.
    Tensor(Vec<TensorTerm>),
}

impl FormValue {
    pub fn zero(ty: ValueType, n: usize) -> Self {
        match ty {
            ValueType::Real | ValueType::Complex => FormValue::Scalar(Complex64::new(0.0, 0.0)),
            ValueType::Algebra => FormValue::Matrix(matrix::zeros(n)),
            ValueType::AlgebraTensor(_) => FormValue::Tensor(Vec::new()),
        }
    }

    pub fn scalar(&self) -> Option<Complex64> {
        match self {
            FormValue::Scalar(z) => Some(*z),
            _ => None,
        }
    }

    pub fn matrix(&self) -> Option<&CMat> {
        match self {
            FormValue::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn scale(self, c: Complex64) -> Self {
        match self {
            FormValue::Scalar(z) => FormValue::Scalar(z * c),
            FormValue::Matrix(m) => FormValue::Matrix(m * c),
            FormValue::Tensor(terms) => FormValue::Tensor(
                terms
                    .into_iter()
                    .map(|t| TensorTerm {
                        coeff: t.coeff * c,
                        factors: t.factors,
                    })
                    .collect(),
            ),
        }
    }

    /// Sum of values of the same kind. Mixed kinds only arise from a bug in
    /// the caller, so they panic.
    pub fn add(self, other: FormValue) -> Self {
        match (self, other) {
            (FormValue::Scalar(a), FormValue::Scalar(b)) => FormValue::Scalar(a + b),
            (FormValue::Matrix(a), FormValue::Matrix(b)) => FormValue::Matrix(a + b),
            (FormValue::Tensor(mut a), FormValue::Tensor(b)) => {
                a.extend(b);
                FormValue::Tensor(a)
            }
            (a, b) => panic!("cannot add {a:?} and {b:?}"),
        }
    }

    fn sub(self, other: FormValue) -> Self {
        self.add(other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Product used by the plain wedge: scalars scale, matrices tensor.
    fn tensor(&self, other: &FormValue) -> FormValue {
        use FormValue::*;
        match (self, other) {
            (Scalar(a), b) => b.clone().scale(*a),
            (a, Scalar(b)) => a.clone().scale(*b),
            (a, b) => {
                let (ta, tb) = (a.clone().into_terms(), b.clone().into_terms());
                let mut out = Vec::with_capacity(ta.len() * tb.len());
                for x in &ta {
                    for y in &tb {
                        let mut factors = x.factors.clone();
                        factors.extend(y.factors.iter().cloned());
                        out.push(TensorTerm {
                            coeff: x.coeff * y.coeff,
                            factors,
                        });
                    }
                }
                Tensor(out)
            }
        }
    }

    fn into_terms(self) -> Vec<TensorTerm> {
        match self {
            FormValue::Scalar(z) => vec![TensorTerm {
                coeff: z,
                factors: vec![],
            }],
            FormValue::Matrix(m) => vec![TensorTerm {
                coeff: Complex64::new(1.0, 0.0),
                factors: vec![m],
            }],
            FormValue::Tensor(t) => t,
        }
    }

    /// Entries of the value as a flat vector; tensors are expanded densely.
    pub fn dense(&self) -> Vec<Complex64> {
        match self {
            FormValue::Scalar(z) => vec![*z],
            FormValue::Matrix(m) => m.iter().copied().collect(),
            FormValue::Tensor(terms) => {
                let Some(first) = terms.first() else {
                    return Vec::new();
                };
                let sizes: Vec<usize> = first.factors.iter().map(|f| f.len()).collect();
                let total: usize = sizes.iter().product();
                let mut out = vec![Complex64::new(0.0, 0.0); total];
                for term in terms {
                    let mut acc = vec![term.coeff];
                    for f in &term.factors {
                        acc = acc
                            .iter()
                            .flat_map(|a| f.iter().map(move |b| a * b))
                            .collect();
                    }
                    for (o, a) in out.iter_mut().zip(acc) {
                        *o += a;
                    }
                }
                out
            }
        }
    }

    /// Largest absolute entry.
    pub fn norm(&self) -> f64 {
        self.dense().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute entry of the difference.
    pub fn max_abs_diff(&self, other: &FormValue) -> f64 {
        let (a, b) = (self.dense(), other.dense());
        match (a.is_empty(), b.is_empty()) {
            (true, true) => 0.0,
            (true, false) => b.iter().map(|z| z.norm()).fold(0.0, f64::max),
            (false, true) => a.iter().map(|z| z.norm()).fold(0.0, f64::max),
            (false, false) => a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max),
        }
    }
}

type Evaluator = dyn Fn(&Point, &[Tangent]) -> FormValue + Send + Sync;

/// Alternating multilinear map on the tangent spaces of a [`BaseSpace`].
#[derive(Clone)]
pub struct DifferentialForm {
    degree: usize,
    base: BaseSpace,
    value_type: ValueType,
    eval: Arc<Evaluator>,
}

impl std::fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DifferentialForm")
            .field("degree", &self.degree)
            .field("base", &self.base)
            .field("value_type", &self.value_type)
            .finish_non_exhaustive()
    }
}

/// `(j, k)`-shuffles as (positions of the first block, positions of the second block, sign).
fn shuffles(j: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
    (0..j + k)
        .combinations(j)
        .map(|first| {
            let inversions: usize = first.iter().enumerate().map(|(a, &p)| p - a).sum();
            let second = (0..j + k).filter(|p| !first.contains(p)).collect();
            let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
            (first, second, sign)
        })
        .collect()
}

fn pick(args: &[Tangent], idx: &[usize]) -> Vec<Tangent> {
    idx.iter().map(|&i| args[i].clone()).collect()
}

impl DifferentialForm {
    pub fn new<F>(base: BaseSpace, degree: usize, value_type: ValueType, f: F) -> Self
    where
        F: Fn(&Point, &[Tangent]) -> FormValue + Send + Sync + 'static,
    {
        Self {
            degree,
            base,
            value_type,
            eval: Arc::new(f),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &BaseSpace {
        &self.base
    }

    pub fn value_type(&self) -> ValueType {
        self.value_type
    }

    /// Evaluate after checking shapes and tangency of every argument.
    pub fn evaluate(&self, point: &Point, args: &[Tangent]) -> Result<FormValue, FormError> {
        if args.len() != self.degree {
            return Err(FormError::Arity {
                expected: self.degree,
                got: args.len(),
            });
        }
        let n = self.base.matrix_size();
        if point.t.len() != self.base.simplex_dim || point.g.len() != self.base.group_slots {
            return Err(FormError::Shape(format!(
                "point has {} simplex coordinates and {} slots",
                point.t.len(),
                point.g.len()
            )));
        }
        if point.g.iter().any(|g| g.shape() != (n, n)) {
            return Err(FormError::Shape("slot matrix has the wrong size".into()));
        }
        for tangent in args {
            if tangent.v.len() != self.base.simplex_dim || tangent.x.len() != self.base.group_slots
            {
                return Err(FormError::Shape("tangent does not match the base".into()));
            }
            for (slot, (g, x)) in point.g.iter().zip(&tangent.x).enumerate() {
                if x.shape() != (n, n) {
                    return Err(FormError::Shape("tangent matrix has the wrong size".into()));
                }
                let left = matrix::inverse_or_nan(g) * x;
                let residual = self.base.group.algebra_residual(&left);
                if !(residual <= TANGENT_TOL) {
                    return Err(FormError::NotTangent { slot, residual });
                }
            }
        }
        Ok((self.eval)(point, args))
    }

    /// Evaluate without validation.
    pub fn value(&self, point: &Point, args: &[Tangent]) -> FormValue {
        (self.eval)(point, args)
    }

    pub fn zero(base: BaseSpace, degree: usize, value_type: ValueType) -> Self {
        let n = base.matrix_size();
        Self::new(base, degree, value_type, move |_, _| FormValue::zero(value_type, n))
    }

    /// Scalar 0-form from a function of the point.
    pub fn function<F>(base: BaseSpace, f: F) -> Self
    where
        F: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        Self::new(base, 0, ValueType::Real, move |p, _| {
            FormValue::Scalar(Complex64::new(f(p), 0.0))
        })
    }

    /// Barycentric coordinate `tⱼ`, `0 ≤ j ≤ n`, as a 0-form.
    pub fn barycentric(base: BaseSpace, j: usize) -> Self {
        Self::function(base, move |p| p.barycentric(j))
    }

    /// `dtⱼ`, `0 ≤ j ≤ n`; `dt₀ = −Σ dtᵢ`.
    pub fn dt(base: BaseSpace, j: usize) -> Self {
        Self::new(base, 1, ValueType::Real, move |_, args| {
            let v = &args[0].v;
            let x = if j == 0 { -v.iter().sum::<f64>() } else { v[j - 1] };
            FormValue::Scalar(Complex64::new(x, 0.0))
        })
    }

    /// Left Maurer–Cartan form on slot `slot`: `Aₛ⁻¹Xₛ`.
    pub fn maurer_cartan_left(base: BaseSpace, slot: usize) -> Self {
        Self::new(base, 1, ValueType::Algebra, move |p, args| {
            FormValue::Matrix(matrix::inverse_or_nan(&p.g[slot]) * &args[0].x[slot])
        })
    }

    /// Right Maurer–Cartan form on slot `slot`: `XₛAₛ⁻¹`.
    pub fn maurer_cartan_right(base: BaseSpace, slot: usize) -> Self {
        Self::new(base, 1, ValueType::Algebra, move |p, args| {
            FormValue::Matrix(&args[0].x[slot] * matrix::inverse_or_nan(&p.g[slot]))
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        self.scale_complex(Complex64::new(c, 0.0))
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        let inner = self.eval.clone();
        let ty = if c.im != 0.0 && self.value_type == ValueType::Real {
            ValueType::Complex
        } else {
            self.value_type
        };
        Self::new(self.base.clone(), self.degree, ty, move |p, a| {
            inner(p, a).scale(c)
        })
    }

    fn check_same(&self, other: &DifferentialForm) -> Result<(), FormError> {
        if self.base != other.base {
            return Err(FormError::BaseMismatch);
        }
        if self.degree != other.degree {
            return Err(FormError::Degree(self.degree, other.degree));
        }
        let compatible = self.value_type == other.value_type
            || (self.value_type.is_scalar() && other.value_type.is_scalar());
        if !compatible {
            return Err(FormError::ValueType(self.value_type, other.value_type));
        }
        Ok(())
    }

    pub fn add(&self, other: &DifferentialForm) -> Result<Self, FormError> {
        self.check_same(other)?;
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let ty = if self.value_type.is_scalar() {
            self.value_type.product(other.value_type)
        } else {
            self.value_type
        };
        Ok(Self::new(self.base.clone(), self.degree, ty, move |p, args| {
            a(p, args).add(b(p, args))
        }))
    }

    pub fn sub(&self, other: &DifferentialForm) -> Result<Self, FormError> {
        self.add(&other.scale(-1.0))
    }

    /// Sum of forms of equal degree, type and base. `None` when empty.
    pub fn sum(forms: &[DifferentialForm]) -> Result<Option<Self>, FormError> {
        let mut iter = forms.iter();
        let Some(first) = iter.next() else {
            return Ok(None);
        };
        let mut acc = first.clone();
        for f in iter {
            acc = acc.add(f)?;
        }
        Ok(Some(acc))
    }

    /// Multiply pointwise by a real 0-form given as a function.
    pub fn times_function<F>(&self, f: F) -> Self
    where
        F: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        Self::new(self.base.clone(), self.degree, self.value_type, move |p, a| {
            inner(p, a).scale(Complex64::new(f(p), 0.0))
        })
    }

    /// Shuffle-sum wedge with a binary combiner on values.
    fn shuffle_wedge<C>(
        &self,
        other: &DifferentialForm,
        value_type: ValueType,
        combine: C,
    ) -> Result<Self, FormError>
    where
        C: Fn(&FormValue, &FormValue) -> FormValue + Send + Sync + 'static,
    {
        if self.base != other.base {
            return Err(FormError::BaseMismatch);
        }
        let (j, k) = (self.degree, other.degree);
        let table = shuffles(j, k);
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let n = self.base.matrix_size();
        Ok(Self::new(
            self.base.clone(),
            j + k,
            value_type,
            move |p, args| {
                let mut acc = FormValue::zero(value_type, n);
                for (first, second, sign) in &table {
                    let va = a(p, &pick(args, first));
                    let vb = b(p, &pick(args, second));
                    acc = acc.add(combine(&va, &vb).scale(Complex64::new(*sign, 0.0)));
                }
                acc
            },
        ))
    }

    /// `φ ∧ ψ`. Scalars multiply; algebra values tensor.
    pub fn wedge(&self, other: &DifferentialForm) -> Result<Self, FormError> {
        let ty = self.value_type.product(other.value_type);
        self.shuffle_wedge(other, ty, |a, b| a.tensor(b))
    }

    /// `[φ ∧ ψ]`, with the commutator as combiner.
    pub fn bracket_wedge(&self, other: &DifferentialForm) -> Result<Self, FormError> {
        if self.value_type != ValueType::Algebra || other.value_type != ValueType::Algebra {
            return Err(FormError::ValueType(self.value_type, other.value_type));
        }
        self.shuffle_wedge(other, ValueType::Algebra, |a, b| match (a, b) {
            (FormValue::Matrix(x), FormValue::Matrix(y)) => {
                FormValue::Matrix(matrix::commutator(x, y))
            }
            _ => unreachable!("algebra-valued forms return matrices"),
        })
    }

    /// Wedge combined by an arbitrary scalar-valued bilinear map of algebra
    /// values, such as a pairing.
    pub fn wedge_with<B>(&self, other: &DifferentialForm, bilinear: B) -> Result<Self, FormError>
    where
        B: Fn(&CMat, &CMat) -> Complex64 + Send + Sync + 'static,
    {
        if self.value_type != ValueType::Algebra || other.value_type != ValueType::Algebra {
            return Err(FormError::ValueType(self.value_type, other.value_type));
        }
        self.shuffle_wedge(other, ValueType::Complex, move |a, b| match (a, b) {
            (FormValue::Matrix(x), FormValue::Matrix(y)) => FormValue::Scalar(bilinear(x, y)),
            _ => unreachable!("algebra-valued forms return matrices"),
        })
    }

    /// Apply a `k`-linear scalar map to a rank-`k` tensor (or algebra) value.
    pub fn apply_multilinear<F>(&self, k: usize, f: F) -> Result<Self, FormError>
    where
        F: Fn(&[CMat]) -> Complex64 + Send + Sync + 'static,
    {
        if self.value_type.tensor_rank() != k || k == 0 {
            return Err(FormError::ValueType(
                self.value_type,
                ValueType::AlgebraTensor(k),
            ));
        }
        let inner = self.eval.clone();
        Ok(Self::new(
            self.base.clone(),
            self.degree,
            ValueType::Complex,
            move |p, args| {
                let total = inner(p, args)
                    .into_terms()
                    .iter()
                    .map(|t| t.coeff * f(&t.factors))
                    .sum();
                FormValue::Scalar(total)
            },
        ))
    }

    /// `tr ∘ Mult`: multiply tensor factors in order and take the trace.
    pub fn trace_of_product(&self) -> Result<Self, FormError> {
        let k = self.value_type.tensor_rank();
        let n = self.base.matrix_size();
        self.apply_multilinear(k, move |factors| {
            let prod = factors
                .iter()
                .fold(matrix::identity(n), |acc, f| acc * f);
            matrix::trace(&prod)
        })
    }

    /// Apply a linear map to algebra values, e.g. a trace.
    pub fn map_algebra<F>(&self, value_type: ValueType, f: F) -> Result<Self, FormError>
    where
        F: Fn(&CMat) -> FormValue + Send + Sync + 'static,
    {
        if self.value_type != ValueType::Algebra {
            return Err(FormError::ValueType(self.value_type, ValueType::Algebra));
        }
        let inner = self.eval.clone();
        Ok(Self::new(self.base.clone(), self.degree, value_type, move |p, a| {
            match inner(p, a) {
                FormValue::Matrix(m) => f(&m),
                _ => unreachable!("algebra-valued forms return matrices"),
            }
        }))
    }

    /// `f*φ` for `f: domain → self.base`.
    pub fn pullback(&self, map: &ProductMap, domain: &BaseSpace) -> Result<Self, FormError> {
        let codomain = map.codomain(domain)?;
        if codomain != self.base {
            return Err(FormError::InvalidMap(format!(
                "map lands in Δ^{} × G^{}, form lives on Δ^{} × G^{}",
                codomain.simplex_dim,
                codomain.group_slots,
                self.base.simplex_dim,
                self.base.group_slots
            )));
        }
        let inner = self.eval.clone();
        let map = map.clone();
        let n = domain.matrix_size();
        Ok(Self::new(
            domain.clone(),
            self.degree,
            self.value_type,
            move |p, args| {
                let q = map.apply(p, n);
                let pushed: Vec<Tangent> = args.iter().map(|v| map.push(p, v, n)).collect();
                inner(&q, &pushed)
            },
        ))
    }

    /// Numerical exterior derivative via the invariant formula, with
    /// left-invariant extensions on group slots and constant extensions on the
    /// simplex. Directional derivatives are central differences of step `h`.
    pub fn exterior_derivative_with_step(&self, h: f64) -> Self {
        let inner = self.eval.clone();
        let p_deg = self.degree;
        Self::new(
            self.base.clone(),
            p_deg + 1,
            self.value_type,
            move |point, args| {
                let xi: Vec<Vec<CMat>> = args
                    .iter()
                    .map(|a| {
                        point
                            .g
                            .iter()
                            .zip(&a.x)
                            .map(|(g, x)| matrix::inverse_or_nan(g) * x)
                            .collect()
                    })
                    .collect();
                let mut acc: Option<FormValue> = None;
                let mut push = |v: FormValue| {
                    acc = Some(match acc.take() {
                        None => v,
                        Some(a) => a.add(v),
                    });
                };
                for i in 0..=p_deg {
                    let others: Vec<usize> = (0..=p_deg).filter(|&j| j != i).collect();
                    let at = |s: f64| {
                        let moved_g: Vec<CMat> = point
                            .g
                            .iter()
                            .zip(&xi[i])
                            .map(|(g, x)| g * mat_exp(&(x * Complex64::new(s, 0.0))))
                            .collect();
                        let moved = Point {
                            t: point
                                .t
                                .iter()
                                .zip(&args[i].v)
                                .map(|(t, v)| t + s * v)
                                .collect(),
                            g: moved_g,
                        };
                        let fields: Vec<Tangent> = others
                            .iter()
                            .map(|&j| Tangent {
                                v: args[j].v.clone(),
                                x: moved.g.iter().zip(&xi[j]).map(|(g, x)| g * x).collect(),
                            })
                            .collect();
                        inner(&moved, &fields)
                    };
                    let deriv = at(h).sub(at(-h)).scale(Complex64::new(0.5 / h, 0.0));
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    push(deriv.scale(Complex64::new(sign, 0.0)));
                }
                for i in 0..=p_deg {
                    for j in i + 1..=p_deg {
                        let bracket = Tangent {
                            v: vec![0.0; point.t.len()],
                            x: point
                                .g
                                .iter()
                                .zip(xi[i].iter().zip(&xi[j]))
                                .map(|(g, (a, b))| g * matrix::commutator(a, b))
                                .collect(),
                        };
                        let mut list = vec![bracket];
                        list.extend(
                            (0..=p_deg)
                                .filter(|&k| k != i && k != j)
                                .map(|k| args[k].clone()),
                        );
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        push(inner(point, &list).scale(Complex64::new(sign, 0.0)));
                    }
                }
                acc.expect("at least one derivative term")
            },
        )
    }

    pub fn exterior_derivative(&self) -> Self {
        self.exterior_derivative_with_step(FD_STEP)
    }

    /// Integrate over the simplex factor with the default quadrature degree.
    pub fn integrate_fiber(&self) -> Self {
        self.integrate_fiber_with(DEFAULT_QUADRATURE_DEGREE)
    }

    /// `(∫φ)(u₁, …) = ∫_{Δⁿ} φ(t; e₁, …, eₙ, (0, u₁), …) dt`, exact for
    /// integrands of total degree `≤ q` in `t`. When the form degree is below
    /// `n` the result is the zero 0-form.
    pub fn integrate_fiber_with(&self, q: usize) -> Self {
        let n = self.base.simplex_dim;
        let target = self.base.with_simplex(0);
        if self.degree < n {
            return Self::zero(target, 0, self.value_type);
        }
        if n == 0 {
            let mut out = self.clone();
            out.base = target;
            return out;
        }
        let rule = Arc::new(SimplexQuadrature::new(n, q));
        let inner = self.eval.clone();
        let size = self.base.matrix_size();
        let slots = self.base.group_slots;
        let ty = self.value_type;
        Self::new(target, self.degree - n, ty, move |p, args| {
            let mut frame: Vec<Tangent> = (0..n)
                .map(|i| {
                    let mut v = vec![0.0; n];
                    v[i] = 1.0;
                    Tangent {
                        v,
                        x: vec![matrix::zeros(size); slots],
                    }
                })
                .collect();
            frame.extend(args.iter().map(|u| Tangent::slots(n, u.x.clone())));
            let mut acc = FormValue::zero(ty, size);
            for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                let q = Point {
                    t: t.clone(),
                    g: p.g.clone(),
                };
                acc = acc.add(inner(&q, &frame).scale(Complex64::new(*w, 0.0)));
            }
            acc
        })
    }
}

/// Random interior point of `base`: uniform on the simplex, sampled group elements.
pub fn random_point(base: &BaseSpace, rng: &mut SampleRng) -> Point {
    let n = base.simplex_dim;
    let t = if n == 0 {
        Vec::new()
    } else {
        let e: Vec<f64> = (0..=n)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let total: f64 = e.iter().sum();
        e[1..].iter().map(|x| x / total).collect()
    };
    let g = (0..base.group_slots)
        .map(|_| base.group.sample_group(rng))
        .collect();
    Point { t, g }
}

/// Random tangent at `p`: simplex components uniform in `[−1, 1]`, slot
/// components `Aₛ·Yₛ` with sampled algebra elements.
pub fn random_tangent(base: &BaseSpace, p: &Point, rng: &mut SampleRng) -> Tangent {
    Tangent {
        v: (0..base.simplex_dim)
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect(),
        x: p.g.iter().map(|a| base.group.sample_tangent(rng, a)).collect(),
    }
}

/// Collapsed-coordinate product Gauss–Legendre rule on the solid simplex.
#[derive(Debug, Clone)]
pub struct SimplexQuadrature {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SimplexQuadrature {
    /// Exact for polynomials of total degree `≤ q` on `Δⁿ`, `n ≥ 1`.
    pub fn new(n: usize, q: usize) -> Self {
        let m = (q + n).div_ceil(2).max(1);
        let rule = GaussLegendre::new(NonZeroUsize::new(m).expect("m >= 1"));
        // map [-1, 1] to [0, 1]
        let line: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for combo in (0..n).map(|_| line.iter()).multi_cartesian_product() {
            let mut t = Vec::with_capacity(n);
            let mut remaining = 1.0;
            let mut w = 1.0;
            for (k, &&(u, wu)) in combo.iter().enumerate() {
                t.push(remaining * u);
                w *= wu * (1.0 - u).powi((n - 1 - k) as i32);
                remaining *= 1.0 - u;
            }
            nodes.push(t);
            weights.push(w);
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * f(t)).sum()
    }
}

/// Action of a map on the simplex factor.
#[derive(Debug, Clone, PartialEq)]
pub enum SimplexMap {
    Identity,
    /// `τᵢ: Δ^{n−1} → Δⁿ`, inserting a zero barycentric coordinate at `i`.
    Face(usize),
    /// `ηᵢ: Δⁿ → Δ^{n−1}`, merging barycentric coordinates `i` and `i+1`.
    Degeneracy(usize),
    /// Projection `Δⁿ × M → M`.
    Drop,
}

impl SimplexMap {
    fn codomain_dim(&self, n: usize) -> Result<usize, FormError> {
        match *self {
            SimplexMap::Identity => Ok(n),
            SimplexMap::Face(i) if i <= n + 1 => Ok(n + 1),
            SimplexMap::Degeneracy(i) if n >= 1 && i < n => Ok(n - 1),
            SimplexMap::Drop => Ok(0),
            _ => Err(FormError::InvalidMap(format!("{self:?} on Δ^{n}"))),
        }
    }

    /// Acts on barycentric vectors; affine on points, linear on velocities.
    fn apply_bary(&self, b: &[f64]) -> Vec<f64> {
        match *self {
            SimplexMap::Identity => b.to_vec(),
            SimplexMap::Face(i) => {
                let mut out = b.to_vec();
                out.insert(i, 0.0);
                out
            }
            SimplexMap::Degeneracy(i) => {
                let mut out = b.to_vec();
                let merged = out.remove(i + 1);
                out[i] += merged;
                out
            }
            SimplexMap::Drop => vec![0.0],
        }
    }

    fn apply(&self, t: &[f64]) -> Vec<f64> {
        let mut b = Vec::with_capacity(t.len() + 1);
        b.push(1.0 - t.iter().sum::<f64>());
        b.extend_from_slice(t);
        self.apply_bary(&b)[1..].to_vec()
    }

    fn push(&self, v: &[f64]) -> Vec<f64> {
        let mut b = Vec::with_capacity(v.len() + 1);
        b.push(-v.iter().sum::<f64>());
        b.extend_from_slice(v);
        self.apply_bary(&b)[1..].to_vec()
    }
}

/// Action of a map on the group slots.
#[derive(Debug, Clone, PartialEq)]
pub enum SlotMap {
    Identity,
    /// `dᵢ` on `EG`: delete slot `i`.
    EgFace(usize),
    /// `sᵢ` on `EG`: duplicate slot `i`.
    EgDegeneracy(usize),
    /// `dᵢ` on `BGₘ`.
    BgFace(usize),
    /// `sᵢ` on `BGₘ`: insert the identity at position `i`.
    BgDegeneracy(usize),
    /// `γ: EGₘ → BGₘ`.
    Gamma,
    /// Keep the listed slots in order.
    Select(Vec<usize>),
    /// Every slot multiplied by `g` on the right.
    RightTranslate(CMat),
    /// Every slot inverted.
    Inversion,
}

impl SlotMap {
    fn codomain_slots(&self, m: usize) -> Result<usize, FormError> {
        let bad = || FormError::InvalidMap(format!("{self:?} on {m} slots"));
        match self {
            SlotMap::Identity | SlotMap::RightTranslate(_) | SlotMap::Inversion => Ok(m),
            SlotMap::EgFace(i) if m >= 2 && *i < m => Ok(m - 1),
            SlotMap::EgDegeneracy(i) if *i < m => Ok(m + 1),
            SlotMap::BgFace(i) if m >= 1 && *i <= m => Ok(m - 1),
            SlotMap::BgDegeneracy(i) if *i <= m => Ok(m + 1),
            SlotMap::Gamma if m >= 1 => Ok(m - 1),
            SlotMap::Select(idx) if idx.iter().all(|&i| i < m) => Ok(idx.len()),
            _ => Err(bad()),
        }
    }

    fn apply(&self, g: &[CMat], n: usize) -> Vec<CMat> {
        let m = g.len();
        match self {
            SlotMap::Identity => g.to_vec(),
            SlotMap::EgFace(i) => NerveLevel::total(m - 1, n)
                .face(*i, g)
                .expect("validated arity"),
            SlotMap::EgDegeneracy(i) => NerveLevel::total(m - 1, n)
                .degeneracy(*i, g)
                .expect("validated arity"),
            SlotMap::BgFace(i) => NerveLevel::base(m, n).face(*i, g).expect("validated arity"),
            SlotMap::BgDegeneracy(i) => NerveLevel::base(m, n)
                .degeneracy(*i, g)
                .expect("validated arity"),
            SlotMap::Gamma => g
                .windows(2)
                .map(|w| &w[1] * matrix::inverse_or_nan(&w[0]))
                .collect(),
            SlotMap::Select(idx) => idx.iter().map(|&i| g[i].clone()).collect(),
            SlotMap::RightTranslate(h) => g.iter().map(|a| a * h).collect(),
            SlotMap::Inversion => g.iter().map(matrix::inverse_or_nan).collect(),
        }
    }

    fn push(&self, g: &[CMat], x: &[CMat], n: usize) -> Vec<CMat> {
        let m = g.len();
        match self {
            SlotMap::Identity => x.to_vec(),
            SlotMap::EgFace(i) => {
                let mut out = x.to_vec();
                out.remove(*i);
                out
            }
            SlotMap::EgDegeneracy(i) => {
                let mut out = x.to_vec();
                out.insert(*i, x[*i].clone());
                out
            }
            SlotMap::BgFace(i) => {
                let i = *i;
                if i == 0 {
                    x[1..].to_vec()
                } else if i == m {
                    x[..m - 1].to_vec()
                } else {
                    let mut out = Vec::with_capacity(m - 1);
                    out.extend_from_slice(&x[..i - 1]);
                    out.push(&x[i] * &g[i - 1] + &g[i] * &x[i - 1]);
                    out.extend_from_slice(&x[i + 1..]);
                    out
                }
            }
            SlotMap::BgDegeneracy(i) => {
                let mut out = x.to_vec();
                out.insert(*i, matrix::zeros(n));
                out
            }
            SlotMap::Gamma => (1..m)
                .map(|k| {
                    let inv = matrix::inverse_or_nan(&g[k - 1]);
                    &x[k] * &inv - &g[k] * &inv * &x[k - 1] * &inv
                })
                .collect(),
            SlotMap::Select(idx) => idx.iter().map(|&i| x[i].clone()).collect(),
            SlotMap::RightTranslate(h) => x.iter().map(|a| a * h).collect(),
            SlotMap::Inversion => g
                .iter()
                .zip(x)
                .map(|(a, v)| {
                    let inv = matrix::inverse_or_nan(a);
                    -(&inv * v * &inv)
                })
                .collect(),
        }
    }
}

/// `f × g: Δ^k × G^m → Δⁿ × G^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMap {
    pub simplex: SimplexMap,
    pub slots: SlotMap,
}

impl ProductMap {
    pub fn new(simplex: SimplexMap, slots: SlotMap) -> Self {
        Self { simplex, slots }
    }

    pub fn identity() -> Self {
        Self::new(SimplexMap::Identity, SlotMap::Identity)
    }

    pub fn slots(slots: SlotMap) -> Self {
        Self::new(SimplexMap::Identity, slots)
    }

    pub fn simplex(simplex: SimplexMap) -> Self {
        Self::new(simplex, SlotMap::Identity)
    }

    pub fn codomain(&self, domain: &BaseSpace) -> Result<BaseSpace, FormError> {
        if let SlotMap::RightTranslate(h) = &self.slots {
            let n = domain.matrix_size();
            if h.shape() != (n, n) {
                return Err(FormError::InvalidMap("translation has the wrong size".into()));
            }
        }
        Ok(BaseSpace::new(
            self.simplex.codomain_dim(domain.simplex_dim)?,
            self.slots.codomain_slots(domain.group_slots)?,
            domain.group.clone(),
        ))
    }

    pub fn apply(&self, p: &Point, n: usize) -> Point {
        Point {
            t: self.simplex.apply(&p.t),
            g: self.slots.apply(&p.g, n),
        }
    }

    pub fn push(&self, p: &Point, v: &Tangent, n: usize) -> Tangent {
        Tangent {
            v: self.simplex.push(&v.v),
            x: self.slots.push(&p.g, &v.x, n),
        }
    }
}

/// Real polynomial in `n` variables, stored as (exponent vector, coefficient) pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(Vec<u32>, f64)>,
}

impl Polynomial {
    pub fn eval(&self, t: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(t).map(|(&k, &x)| x.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn partial(&self, i: usize) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[i] > 0)
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[i] -= 1;
                    (e2, c * f64::from(e[i]))
                })
                .collect(),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }
}

/// `Σᵢ pᵢ(t) dtᵢ` on `Δⁿ`, with an exact exterior derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialOneForm {
    pub components: Vec<Polynomial>,
}

impl PolynomialOneForm {
    pub fn simplex_dim(&self) -> usize {
        self.components.len()
    }

    fn base(&self, group: Arc<MatrixGroup>) -> BaseSpace {
        BaseSpace::new(self.simplex_dim(), 0, group)
    }

    pub fn to_form(&self, group: Arc<MatrixGroup>) -> DifferentialForm {
        let comps = self.components.clone();
        DifferentialForm::new(self.base(group), 1, ValueType::Real, move |p, a| {
            let s: f64 = comps
                .iter()
                .zip(&a[0].v)
                .map(|(c, v)| c.eval(&p.t) * v)
                .sum();
            FormValue::Scalar(Complex64::new(s, 0.0))
        })
    }

    /// `Σ_{i<j} (∂ᵢpⱼ − ∂ⱼpᵢ) dtᵢ∧dtⱼ`.
    pub fn exterior_derivative(&self, group: Arc<MatrixGroup>) -> DifferentialForm {
        let n = self.simplex_dim();
        let mut coeffs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut c = self.components[j].partial(i);
                let neg = self.components[i].partial(j);
                c.terms.extend(neg.terms.into_iter().map(|(e, k)| (e, -k)));
                coeffs.push((i, j, c));
            }
        }
        DifferentialForm::new(self.base(group), 2, ValueType::Real, move |p, a| {
            let (v, w) = (&a[0].v, &a[1].v);
            let s: f64 = coeffs
                .iter()
                .map(|(i, j, c)| c.eval(&p.t) * (v[*i] * w[*j] - v[*j] * w[*i]))
                .sum();
            FormValue::Scalar(Complex64::new(s, 0.0))
        })
    }
}

/// `|∫_{Δⁿ} dφ − Σᵢ (−1)ⁱ ∫_{Δⁿ⁻¹} τᵢ*φ|` for a scalar `(n−1)`-form on `Δⁿ`
/// with no group slots. Without an explicit `dφ` the numerical derivative is used.
pub fn boundary_stokes_check(
    phi: &DifferentialForm,
    d_phi: Option<&DifferentialForm>,
) -> Result<f64, FormError> {
    let base = phi.base();
    let n = base.simplex_dim;
    if base.group_slots != 0 || n == 0 || phi.degree() + 1 != n {
        return Err(FormError::Shape(
            "expects an (n-1)-form on a bare simplex".into(),
        ));
    }
    let derived;
    let d_phi = match d_phi {
        Some(d) => d,
        None => {
            derived = phi.exterior_derivative();
            &derived
        }
    };
    let origin = Point::groups(Vec::new());
    let lhs = d_phi.integrate_fiber().value(&origin, &[]);
    let face_base = base.with_simplex(n - 1);
    let mut rhs = FormValue::zero(phi.value_type(), base.matrix_size());
    for i in 0..=n {
        let face = phi.pullback(&ProductMap::simplex(SimplexMap::Face(i)), &face_base)?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        rhs = rhs.add(
            face.integrate_fiber()
                .value(&origin, &[])
                .scale(Complex64::new(sign, 0.0)),
        );
    }
    Ok(lhs.max_abs_diff(&rhs))
}

/// `(φ₀, …, φ_N)` with `φᵢ` a form of degree `N − i` on level `i` of a nerve.
/// `None` components are zero.
#[derive(Debug, Clone)]
pub struct TotElement {
    pub kind: NerveKind,
    pub group: Arc<MatrixGroup>,
    pub total_degree: usize,
    pub value_type: ValueType,
    components: Vec<Option<DifferentialForm>>,
}

impl TotElement {
    pub fn new(
        kind: NerveKind,
        group: Arc<MatrixGroup>,
        total_degree: usize,
        value_type: ValueType,
        components: Vec<Option<DifferentialForm>>,
    ) -> Result<Self, FormError> {
        if components.len() > total_degree + 1 {
            return Err(FormError::Shape("more components than total degree allows".into()));
        }
        let element = Self {
            kind,
            group,
            total_degree,
            value_type,
            components,
        };
        for (i, c) in element.components.iter().enumerate() {
            if let Some(form) = c {
                if form.degree() + i != total_degree {
                    return Err(FormError::Degree(form.degree(), total_degree - i));
                }
                if *form.base() != element.level_space(i) {
                    return Err(FormError::BaseMismatch);
                }
            }
        }
        Ok(element)
    }

    /// `EGᵢ` or `BGᵢ` as a base space.
    pub fn level_space(&self, level: usize) -> BaseSpace {
        let slots = match self.kind {
            NerveKind::Base => level,
            NerveKind::Total => level + 1,
        };
        BaseSpace::groups(slots, self.group.clone())
    }

    /// Component at `level`; levels past the stored ones are zero.
    pub fn component(&self, level: usize) -> Result<DifferentialForm, FormError> {
        if level > self.total_degree {
            return Err(FormError::MissingComponent(level));
        }
        Ok(self.components.get(level).cloned().flatten().unwrap_or_else(|| {
            DifferentialForm::zero(
                self.level_space(level),
                self.total_degree - level,
                self.value_type,
            )
        }))
    }

    fn face(&self, j: usize) -> SlotMap {
        match self.kind {
            NerveKind::Base => SlotMap::BgFace(j),
            NerveKind::Total => SlotMap::EgFace(j),
        }
    }

    fn degeneracy(&self, j: usize) -> SlotMap {
        match self.kind {
            NerveKind::Base => SlotMap::BgDegeneracy(j),
            NerveKind::Total => SlotMap::EgDegeneracy(j),
        }
    }

    /// `δφ = Σⱼ (−1)ʲ dⱼ*φ` for `φ` on level `level − 1`, as a form on `level`.
    pub fn horizontal(&self, phi: &DifferentialForm, level: usize) -> Result<DifferentialForm, FormError> {
        let domain = self.level_space(level);
        let mut terms = Vec::with_capacity(level + 1);
        for j in 0..=level {
            let pulled = phi.pullback(&ProductMap::slots(self.face(j)), &domain)?;
            terms.push(if j % 2 == 0 { pulled } else { pulled.scale(-1.0) });
        }
        Ok(DifferentialForm::sum(&terms)?.expect("level + 1 > 0 terms"))
    }

    /// `sⱼ*φ_level` as a form on `level − 1`.
    pub fn degeneracy_pullback(&self, level: usize, j: usize) -> Result<DifferentialForm, FormError> {
        if level == 0 || j >= level {
            return Err(FormError::InvalidMap(format!("s_{j} into level {level}")));
        }
        self.component(level)?
            .pullback(&ProductMap::slots(self.degeneracy(j)), &self.level_space(level - 1))
    }

    /// `Dφ` at `level`: `δφ_{level−1} + (−1)^{level} dφ_level`.
    pub fn tot_differential(&self, level: usize) -> Result<DifferentialForm, FormError> {
        let out_degree = (self.total_degree + 1)
            .checked_sub(level)
            .ok_or(FormError::MissingComponent(level))?;
        let space = self.level_space(level);
        let mut acc = DifferentialForm::zero(space, out_degree, self.value_type);
        if level >= 1 {
            let prev = self.component(level - 1)?;
            acc = acc.add(&self.horizontal(&prev, level)?)?;
        }
        if level <= self.total_degree {
            let here = self.component(level)?;
            if !self.is_zero_component(level) {
                let d = here.exterior_derivative();
                acc = acc.add(&if level.is_multiple_of(2) { d } else { d.scale(-1.0) })?;
            }
        }
        Ok(acc)
    }

    fn is_zero_component(&self, level: usize) -> bool {
        self.components.get(level).is_none_or(|c| c.is_none())
    }

    /// `F^i Tot`: every nonzero component has form degree at least `i`.
    pub fn in_filtration(&self, i: usize) -> bool {
        self.components
            .iter()
            .enumerate()
            .all(|(level, c)| c.is_none() || self.total_degree - level >= i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SeedStream;

    fn su2() -> Arc<MatrixGroup> {
        Arc::new(MatrixGroup::parse("su:2").unwrap())
    }

    fn scalar(v: FormValue) -> Complex64 {
        v.scalar().unwrap()
    }

    #[test]
    fn shuffle_signs() {
        let s = shuffles(1, 2);
        assert_eq!(s.len(), 3);
        let signs: Vec<f64> = s.iter().map(|x| x.2).collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn coordinate_coframe() {
        let base = BaseSpace::new(2, 0, su2());
        let w = DifferentialForm::dt(base.clone(), 1)
            .wedge(&DifferentialForm::dt(base.clone(), 2))
            .unwrap();
        let p = Point::new(vec![0.2, 0.3], vec![]);
        let e1 = Tangent::coordinate(&base, 1);
        let e2 = Tangent::coordinate(&base, 2);
        assert_eq!(scalar(w.evaluate(&p, &[e1.clone(), e2.clone()]).unwrap()).re, 1.0);
        assert_eq!(scalar(w.evaluate(&p, &[e2, e1]).unwrap()).re, -1.0);
    }

    #[test]
    fn zero_forms_multiply() {
        let base = BaseSpace::new(2, 0, su2());
        let f = DifferentialForm::barycentric(base.clone(), 1);
        let g = DifferentialForm::barycentric(base.clone(), 0);
        let p = Point::new(vec![0.25, 0.5], vec![]);
        let v = scalar(f.wedge(&g).unwrap().value(&p, &[])).re;
        assert!((v - 0.25 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn one_form_wedge_expansion() {
        let g = su2();
        let base = BaseSpace::groups(1, g.clone());
        let omega = DifferentialForm::maurer_cartan_left(base.clone(), 0);
        let mut rng = SeedStream::new(1, "wedge").rng(0);
        let a = g.sample_group(&mut rng);
        let p = Point::groups(vec![a.clone()]);
        let v = Tangent::slots(0, vec![g.sample_tangent(&mut rng, &a)]);
        let w = Tangent::slots(0, vec![g.sample_tangent(&mut rng, &a)]);
        let ov = omega.value(&p, std::slice::from_ref(&v)).matrix().unwrap().clone();
        let ow = omega.value(&p, std::slice::from_ref(&w)).matrix().unwrap().clone();

        let br = omega.bracket_wedge(&omega).unwrap().value(&p, &[v.clone(), w.clone()]);
        let expected = matrix::commutator(&ov, &ow) * Complex64::new(2.0, 0.0);
        assert!(matrix::max_abs_diff(br.matrix().unwrap(), &expected) < 1e-14);

        let tensor = omega.wedge(&omega).unwrap().trace_of_product().unwrap();
        let t = scalar(tensor.value(&p, &[v, w]));
        let direct = matrix::trace(&(&ov * &ow - &ow * &ov));
        assert!((t - direct).norm() < 1e-14);
    }

    #[test]
    fn graded_commutation_of_bracket_wedge() {
        let g = Arc::new(MatrixGroup::parse("su:3").unwrap());
        let base = BaseSpace::groups(2, g.clone());
        let a = DifferentialForm::maurer_cartan_left(base.clone(), 0);
        let b = DifferentialForm::maurer_cartan_right(base.clone(), 1);
        let a2 = a.bracket_wedge(&b).unwrap();
        let b2 = b.bracket_wedge(&a).unwrap();
        let mut rng = SeedStream::new(2, "graded").rng(0);
        let p = Point::groups(vec![g.sample_group(&mut rng), g.sample_group(&mut rng)]);
        let tangent = |rng: &mut crate::sampling::SampleRng| {
            Tangent::slots(
                0,
                p.g.iter().map(|x| g.sample_tangent(rng, x)).collect(),
            )
        };
        let args: Vec<Tangent> = (0..5).map(|_| tangent(&mut rng)).collect();
        for (phi, psi) in [(&a, &b), (&a2, &b), (&a, &b2), (&a2, &b2)] {
            let (j, k) = (phi.degree(), psi.degree());
            let lhs = phi.bracket_wedge(psi).unwrap().value(&p, &args[..j + k]);
            let rhs = psi.bracket_wedge(phi).unwrap().value(&p, &args[..j + k]);
            let sign = if (j * k) % 2 == 0 { 1.0 } else { -1.0 };
            let resid = lhs.add(rhs.scale(Complex64::new(sign, 0.0))).norm();
            assert!(resid < 1e-12, "j={j} k={k}: {resid}");
        }
    }

    #[test]
    fn evaluate_validates_arguments() {
        let g = su2();
        let base = BaseSpace::groups(1, g.clone());
        let omega = DifferentialForm::maurer_cartan_left(base, 0);
        let p = Point::groups(vec![g.identity()]);
        assert!(matches!(omega.evaluate(&p, &[]), Err(FormError::Arity { .. })));
        let bad = Tangent::slots(0, vec![matrix::identity(2)]);
        assert!(matches!(
            omega.evaluate(&p, &[bad]),
            Err(FormError::NotTangent { .. })
        ));
    }

    #[test]
    fn derivative_of_coordinate_is_dt() {
        let base = BaseSpace::new(2, 0, su2());
        let t1 = DifferentialForm::barycentric(base.clone(), 1);
        let d = t1.exterior_derivative();
        let p = Point::new(vec![0.2, 0.3], vec![]);
        let v = Tangent::new(vec![0.7, -1.3], vec![]);
        assert!((scalar(d.value(&p, &[v])).re - 0.7).abs() < 1e-10);
        let c = DifferentialForm::function(base.clone(), |_| 3.0).exterior_derivative();
        assert_eq!(scalar(c.value(&p, &[Tangent::coordinate(&base, 1)])).re, 0.0);
    }

    #[test]
    fn maurer_cartan_equation() {
        let g = Arc::new(MatrixGroup::parse("su:3").unwrap());
        let base = BaseSpace::groups(1, g.clone());
        let omega = DifferentialForm::maurer_cartan_left(base, 0);
        let mc = omega
            .exterior_derivative()
            .add(&omega.bracket_wedge(&omega).unwrap().scale(0.5))
            .unwrap();
        let mut rng = SeedStream::new(3, "mc").rng(0);
        let a = g.sample_group(&mut rng);
        let args = [
            Tangent::slots(0, vec![g.sample_tangent(&mut rng, &a)]),
            Tangent::slots(0, vec![g.sample_tangent(&mut rng, &a)]),
        ];
        assert!(mc.evaluate(&Point::groups(vec![a]), &args).unwrap().norm() < 1e-6);
    }

    #[test]
    fn quadrature_constants() {
        let r1 = SimplexQuadrature::new(1, 10);
        assert_eq!(r1.nodes.len(), 6);
        assert!((r1.integrate(|t| t[0] * t[0] - t[0]) + 1.0 / 6.0).abs() < 1e-15);
        let r2 = SimplexQuadrature::new(2, 10);
        assert!((r2.integrate(|_| 1.0) - 0.5).abs() < 1e-15);
        // ∫ t₁⁴ t₂³ over Δ² = 4!3!/9!
        let exact = 24.0 * 6.0 / 362_880.0;
        assert!((r2.integrate(|t| t[0].powi(4) * t[1].powi(3)) - exact).abs() < 1e-16);
        let r3 = SimplexQuadrature::new(3, 10);
        assert!((r3.integrate(|_| 1.0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn fiber_integral_of_area_form() {
        let base = BaseSpace::new(2, 0, su2());
        let w = DifferentialForm::dt(base.clone(), 1)
            .wedge(&DifferentialForm::dt(base, 2))
            .unwrap();
        let v = scalar(w.integrate_fiber().value(&Point::groups(vec![]), &[])).re;
        assert!((v - 0.5).abs() < 1e-14);
        let short = DifferentialForm::dt(BaseSpace::new(2, 0, su2()), 1).integrate_fiber();
        assert_eq!(short.degree(), 0);
        assert_eq!(short.value(&Point::groups(vec![]), &[]).norm(), 0.0);
    }

    #[test]
    fn stokes_on_hand_example() {
        // t₁ dt₂
        let phi = PolynomialOneForm {
            components: vec![
                Polynomial::default(),
                Polynomial {
                    terms: vec![(vec![1, 0], 1.0)],
                },
            ],
        };
        let g = su2();
        let form = phi.to_form(g.clone());
        let d = phi.exterior_derivative(g.clone());
        let lhs = scalar(d.integrate_fiber().value(&Point::groups(vec![]), &[])).re;
        assert!((lhs - 0.5).abs() < 1e-14);
        assert!(boundary_stokes_check(&form, Some(&d)).unwrap() < 1e-14);
        assert!(boundary_stokes_check(&form, None).unwrap() < 1e-8);
    }

    #[test]
    fn stokes_on_random_polynomials() {
        let g = su2();
        let seeds = SeedStream::new(4, "stokes");
        for k in 0..20 {
            let mut rng = seeds.rng(k);
            let mut comp = || Polynomial {
                terms: (0..4)
                    .flat_map(|a| (0..4 - a).map(move |b| vec![a, b]))
                    .map(|e| (e, rng.random_range(-1.0..1.0)))
                    .collect(),
            };
            let phi = PolynomialOneForm {
                components: vec![comp(), comp()],
            };
            let r = boundary_stokes_check(&phi.to_form(g.clone()), Some(&phi.exterior_derivative(g.clone())))
                .unwrap();
            assert!(r < 1e-10, "{r}");
        }
    }

    #[test]
    fn simplex_face_maps_match_barycentric_insertion() {
        let f = SimplexMap::Face(0);
        assert_eq!(f.apply(&[0.25]), vec![0.75, 0.25]);
        assert_eq!(SimplexMap::Face(1).apply(&[0.25]), vec![0.0, 0.25]);
        assert_eq!(SimplexMap::Face(2).apply(&[0.25]), vec![0.25, 0.0]);
        assert_eq!(SimplexMap::Degeneracy(0).apply(&[0.2, 0.3]), vec![0.3]);
        assert_eq!(SimplexMap::Degeneracy(1).apply(&[0.2, 0.3]), vec![0.5]);
        assert_eq!(f.push(&[1.0]), vec![-1.0, 1.0]);
    }

    #[test]
    fn gamma_pushforward_matches_finite_difference() {
        let g = Arc::new(MatrixGroup::parse("su:2").unwrap());
        let mut rng = SeedStream::new(5, "gamma").rng(0);
        let pts: Vec<CMat> = (0..2).map(|_| g.sample_group(&mut rng)).collect();
        let xi: Vec<CMat> = (0..2).map(|_| g.sample_algebra(&mut rng)).collect();
        let x: Vec<CMat> = pts.iter().zip(&xi).map(|(a, y)| a * y).collect();
        let pushed = SlotMap::Gamma.push(&pts, &x, 2);
        let h = 1e-5;
        let curve = |s: f64| {
            let moved: Vec<CMat> = pts
                .iter()
                .zip(&xi)
                .map(|(a, y)| a * mat_exp(&(y * Complex64::new(s, 0.0))))
                .collect();
            SlotMap::Gamma.apply(&moved, 2)[0].clone()
        };
        let fd = (curve(h) - curve(-h)) * Complex64::new(0.5 / h, 0.0);
        assert!(matrix::max_abs_diff(&fd, &pushed[0]) < 1e-9);
    }

    #[test]
    fn pullback_along_identity_and_bad_map() {
        let g = su2();
        let base = BaseSpace::groups(2, g.clone());
        let omega = DifferentialForm::maurer_cartan_left(base.clone(), 1);
        let same = omega.pullback(&ProductMap::identity(), &base).unwrap();
        let mut rng = SeedStream::new(6, "pull").rng(0);
        let p = Point::groups(vec![g.sample_group(&mut rng), g.sample_group(&mut rng)]);
        let v = Tangent::slots(0, p.g.iter().map(|a| g.sample_tangent(&mut rng, a)).collect());
        assert_eq!(omega.value(&p, std::slice::from_ref(&v)), same.value(&p, &[v]));
        assert!(omega
            .pullback(&ProductMap::slots(SlotMap::EgFace(0)), &base)
            .is_err());
    }
}
