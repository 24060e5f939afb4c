//! Matrix Lie groups, their algebras, and the Maurer–Cartan forms.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::matrix::{self, CMat, MatrixError};
use crate::sampling::SampleRng;

/// Tolerance for "this ambient matrix is tangent at that point".
pub const TANGENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("unknown group spec {0:?}; expected su:N, so:N, o:N, u:N or spin:N")]
    UnknownGroup(String),
    #[error("group {0} has a zero-dimensional Lie algebra")]
    Trivial(String),
    #[error("matrix is not tangent at the base point (residual {residual:.3e})")]
    NotTangent { residual: f64 },
    #[error("matrix is not in the Lie algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupFamily {
    SU,
    SO,
    /// Identity component of `O(n)`, which is `SO(n)`.
    O,
    U,
    /// Computed through `SO(n)`, which has the same Lie algebra.
    SpinViaSO,
}

impl GroupFamily {
    fn prefix(self) -> &'static str {
        match self {
            GroupFamily::SU => "su",
            GroupFamily::SO => "so",
            GroupFamily::O => "o",
            GroupFamily::U => "u",
            GroupFamily::SpinViaSO => "spin",
        }
    }

    /// Real skew-symmetric algebra.
    pub fn is_orthogonal(self) -> bool {
        matches!(self, GroupFamily::SO | GroupFamily::O | GroupFamily::SpinViaSO)
    }

    /// Every algebra element has zero trace.
    pub fn is_traceless(self) -> bool {
        self != GroupFamily::U
    }
}

/// A matrix Lie group with a fixed real basis of its Lie algebra.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    family: GroupFamily,
    n: usize,
    basis: Vec<CMat>,
    gram_inverse: DMatrix<f64>,
    name: String,
}

impl FromStr for MatrixGroup {
    type Err = LieError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        MatrixGroup::parse(spec)
    }
}

impl fmt::Display for MatrixGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl MatrixGroup {
    /// Parse `"su:3"`, `"so:4"`, `"o:3"`, `"u:2"` or `"spin:3"`.
    pub fn parse(spec: &str) -> Result<Self, LieError> {
        let unknown = || LieError::UnknownGroup(spec.to_string());
        let (family, size) = spec.trim().split_once(':').ok_or_else(unknown)?;
        let family = match family.to_ascii_lowercase().as_str() {
            "su" => GroupFamily::SU,
            "so" => GroupFamily::SO,
            "o" => GroupFamily::O,
            "u" => GroupFamily::U,
            "spin" => GroupFamily::SpinViaSO,
            _ => return Err(unknown()),
        };
        let n: usize = size.trim().parse().map_err(|_| unknown())?;
        if n == 0 {
            return Err(unknown());
        }
        Self::new(family, n)
    }

    pub fn new(family: GroupFamily, n: usize) -> Result<Self, LieError> {
        let name = format!("{}:{n}", family.prefix());
        let basis = match family {
            GroupFamily::SU => su_basis(n),
            GroupFamily::U => {
                let mut b = su_basis(n);
                let mut i_id = matrix::identity(n);
                i_id *= Complex64::i();
                b.push(i_id);
                b
            }
            _ => so_basis(n),
        };
        if basis.is_empty() {
            return Err(LieError::Trivial(name));
        }
        let d = basis.len();
        let gram = DMatrix::from_fn(d, d, |a, b| matrix::real_inner(&basis[a], &basis[b]));
        let gram_inverse = gram.try_inverse().ok_or(MatrixError::Singular)?;
        Ok(Self {
            family,
            n,
            basis,
            gram_inverse,
            name,
        })
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    /// Matrix size.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn identity(&self) -> CMat {
        matrix::identity(self.n)
    }

    /// Coefficient `k` with `𝒦(X, Y) = k·tr(XY)`, where the algebra is simple
    /// enough for one to exist.
    pub fn killing_trace_factor(&self) -> Option<f64> {
        match self.family {
            GroupFamily::SU => Some(2.0 * self.n as f64),
            GroupFamily::U => None,
            _ => Some(self.n as f64 - 2.0),
        }
    }

    /// Real coordinates of `x` in the basis, by solving against the Gram matrix.
    pub fn coordinates(&self, x: &CMat) -> Vec<f64> {
        let rhs = nalgebra::DVector::from_iterator(
            self.dim(),
            self.basis.iter().map(|b| matrix::real_inner(b, x)),
        );
        (&self.gram_inverse * rhs).iter().copied().collect()
    }

    pub fn from_coordinates(&self, coords: &[f64]) -> CMat {
        let mut out = matrix::zeros(self.n);
        for (c, b) in coords.iter().zip(&self.basis) {
            out += b * Complex64::new(*c, 0.0);
        }
        out
    }

    /// How far `x` is from satisfying the algebra condition.
    pub fn algebra_residual(&self, x: &CMat) -> f64 {
        if x.nrows() != self.n || x.ncols() != self.n {
            return f64::INFINITY;
        }
        let skew = matrix::max_abs(&(x + x.adjoint()));
        match self.family {
            GroupFamily::U => skew,
            GroupFamily::SU => skew.max(matrix::trace(x).norm()),
            _ => skew.max(x.iter().map(|z| z.im.abs()).fold(0.0, f64::max)),
        }
    }

    pub fn in_algebra(&self, x: &CMat, tol: f64) -> bool {
        self.algebra_residual(x) <= tol
    }

    /// How far `a` is from lying in the group (identity component).
    pub fn membership_residual(&self, a: &CMat) -> f64 {
        if a.nrows() != self.n || a.ncols() != self.n {
            return f64::INFINITY;
        }
        let unitary = matrix::max_abs_diff(&(a.adjoint() * a), &self.identity());
        let det = a.determinant();
        match self.family {
            GroupFamily::U => unitary,
            GroupFamily::SU => unitary.max((det - 1.0).norm()),
            _ => unitary
                .max((det - 1.0).norm())
                .max(a.iter().map(|z| z.im.abs()).fold(0.0, f64::max)),
        }
    }

    pub fn contains(&self, a: &CMat, tol: f64) -> bool {
        self.membership_residual(a) <= tol
    }

    /// `𝒦(X, Y) = tr(ad_X ∘ ad_Y)`, computed in basis coordinates.
    pub fn killing_form(&self, x: &CMat, y: &CMat) -> f64 {
        (0..self.dim())
            .map(|b| {
                let image = ad(x, &ad(y, &self.basis[b]));
                self.coordinates(&image)[b]
            })
            .sum()
    }

    /// Gram matrix of the Killing form on the basis.
    pub fn killing_gram(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |a, b| self.killing_form(&self.basis[a], &self.basis[b]))
    }

    fn check_tangent(&self, algebra_part: &CMat) -> Result<(), LieError> {
        let residual = self.algebra_residual(algebra_part);
        if residual > TANGENT_TOL {
            return Err(LieError::NotTangent { residual });
        }
        Ok(())
    }

    /// `ω^l_A(X) = A⁻¹X`.
    pub fn maurer_cartan_left(&self, a: &CMat, x: &CMat) -> Result<CMat, LieError> {
        let y = matrix::inverse(a)? * x;
        self.check_tangent(&y)?;
        Ok(y)
    }

    /// `ω^r_A(X) = XA⁻¹`.
    pub fn maurer_cartan_right(&self, a: &CMat, x: &CMat) -> Result<CMat, LieError> {
        let y = x * matrix::inverse(a)?;
        self.check_tangent(&y)?;
        Ok(y)
    }

    /// Differential of `g ↦ g⁻¹`: `(A, X) ↦ (A⁻¹, −A⁻¹XA⁻¹)`.
    pub fn inversion_pushforward(&self, a: &CMat, x: &CMat) -> Result<(CMat, CMat), LieError> {
        let inv = matrix::inverse(a)?;
        let v = -(&inv * x * &inv);
        Ok((inv, v))
    }

    /// `Σ cᵢ·basisᵢ` with `cᵢ` uniform in `[−1, 1]`.
    pub fn sample_algebra(&self, rng: &mut SampleRng) -> CMat {
        let coords: Vec<f64> = (0..self.dim()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        self.from_coordinates(&coords)
    }

    pub fn sample_group(&self, rng: &mut SampleRng) -> CMat {
        mat_exp(&self.sample_algebra(rng))
    }

    /// `A·Y` for a sampled algebra element `Y`.
    pub fn sample_tangent(&self, rng: &mut SampleRng, a: &CMat) -> CMat {
        a * self.sample_algebra(rng)
    }
}

/// su(n): symmetric and antisymmetric off-diagonal pairs, then traceless
/// diagonals, each made skew-hermitian.
fn su_basis(n: usize) -> Vec<CMat> {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut sym = matrix::zeros(n);
            sym[(j, k)] = i;
            sym[(k, j)] = i;
            out.push(sym);
            let mut anti = matrix::zeros(n);
            anti[(j, k)] = one;
            anti[(k, j)] = -one;
            out.push(anti);
        }
    }
    for l in 1..n {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = matrix::zeros(n);
        for m in 0..l {
            diag[(m, m)] = i * scale;
        }
        diag[(l, l)] = i * (-(l as f64) * scale);
        out.push(diag);
    }
    out
}

fn so_basis(n: usize) -> Vec<CMat> {
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for j in 0..n {
        for k in j + 1..n {
            let mut e = matrix::zeros(n);
            e[(j, k)] = one;
            e[(k, j)] = -one;
            out.push(e);
        }
    }
    out
}

/// Matrix exponential by scaling and squaring of the Taylor series.
pub fn mat_exp(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).sum::<f64>().max(0.0);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a * Complex64::new(scale, 0.0);
    let mut result = matrix::identity(n);
    let mut term = matrix::identity(n);
    for k in 1..=40 {
        term = &term * &x * Complex64::new(1.0 / k as f64, 0.0);
        result += &term;
        if matrix::max_abs(&term) < 1e-16 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `ad_X(Y) = XY − YX`.
pub fn ad(x: &CMat, y: &CMat) -> CMat {
    matrix::commutator(x, y)
}

/// `Ad_S(X) = SXS⁻¹`.
#[allow(non_snake_case)]
pub fn Ad(s: &CMat, x: &CMat) -> Result<CMat, MatrixError> {
    Ok(s * x * matrix::inverse(s)?)
}
