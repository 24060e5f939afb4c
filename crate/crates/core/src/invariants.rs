//! Invariant polynomials on matrix Lie algebras.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::{self, CMat};

/// Imaginary part tolerated in a value that should be real.
pub const REALITY_TOL: f64 = 1e-10;

const HOMOGENEITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("diagonal function is not homogeneous of the requested degree (residual {residual:.3e})")]
    NonHomogeneous { residual: f64 },
    #[error("value {value} has a non-negligible imaginary part")]
    Imaginary { value: Complex64 },
}

type Multilinear = dyn Fn(&[CMat]) -> Complex64 + Send + Sync;

/// Symmetric multilinear function of `degree` matrix arguments.
#[derive(Clone)]
pub struct InvariantPolynomial {
    degree: usize,
    label: String,
    eval: Arc<Multilinear>,
}

impl fmt::Debug for InvariantPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvariantPolynomial")
            .field("degree", &self.degree)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl InvariantPolynomial {
    pub fn new<F>(label: impl Into<String>, degree: usize, f: F) -> Self
    where
        F: Fn(&[CMat]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            degree,
            label: label.into(),
            eval: Arc::new(f),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn evaluate(&self, args: &[CMat]) -> Result<Complex64, InvariantError> {
        if args.len() != self.degree {
            return Err(InvariantError::Arity {
                expected: self.degree,
                got: args.len(),
            });
        }
        Ok((self.eval)(args))
    }

    /// `f(A, …, A)`.
    pub fn diagonal(&self, a: &CMat) -> Complex64 {
        (self.eval)(&vec![a.clone(); self.degree])
    }

    /// The multilinear evaluator, for use inside form combinators.
    pub fn multilinear(&self) -> Arc<Multilinear> {
        self.eval.clone()
    }

    /// `max |f(Ad_S v₁, …) − f(v₁, …)| / max(|f(v₁, …)|, 1)`.
    pub fn ad_invariance_residual(&self, s: &CMat, args: &[CMat]) -> Result<f64, InvariantError> {
        let before = self.evaluate(args)?;
        let s_inv = matrix::inverse_or_nan(s);
        let moved: Vec<CMat> = args.iter().map(|x| s * x * &s_inv).collect();
        let after = self.evaluate(&moved)?;
        Ok((after - before).norm() / before.norm().max(1.0))
    }
}

/// Coefficient of `t^{n−k}` in `det(t·I − scale·A)`, by Faddeev–LeVerrier.
pub fn charpoly_coefficient(a: &CMat, k: usize, scale: Complex64) -> Complex64 {
    let n = a.nrows();
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if k > n {
        return Complex64::new(0.0, 0.0);
    }
    let m = a * scale;
    let id = matrix::identity(n);
    let mut prev = matrix::zeros(n);
    let mut c = Complex64::new(1.0, 0.0);
    for j in 1..=k {
        prev = &m * &prev + &id * c;
        c = -matrix::trace(&(&m * &prev)) / j as f64;
    }
    c
}

/// Scale `1/(2π)` of the Pontryagin polynomials.
pub fn pontryagin_scale() -> Complex64 {
    Complex64::new(1.0 / (2.0 * PI), 0.0)
}

/// Scale `1/(2πi)` of the Chern polynomials.
pub fn chern_scale() -> Complex64 {
    Complex64::new(1.0, 0.0) / Complex64::new(0.0, 2.0 * PI)
}

/// Symmetric multilinear form with diagonal `diag`, by inclusion–exclusion:
/// `f(v₁, …, v_k) = (1/k!) Σ_{S ⊆ {1..k}} (−1)^{k−|S|} f̄(Σ_{i∈S} vᵢ)`.
/// Each probe matrix is used to reject non-homogeneous input.
pub fn polarize<F>(
    label: impl Into<String>,
    k: usize,
    diag: F,
    probes: &[CMat],
) -> Result<InvariantPolynomial, InvariantError>
where
    F: Fn(&CMat) -> Complex64 + Send + Sync + 'static,
{
    let diag = Arc::new(diag);
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let f = {
        let diag = diag.clone();
        move |args: &[CMat]| -> Complex64 {
            let n = args.first().map_or(0, |a| a.nrows());
            let mut total = Complex64::new(0.0, 0.0);
            for size in 0..=k {
                let sign = if (k - size).is_multiple_of(2) { 1.0 } else { -1.0 };
                for subset in (0..k).combinations(size) {
                    let mut sum = matrix::zeros(n);
                    for i in subset {
                        sum += &args[i];
                    }
                    total += diag(&sum) * sign;
                }
            }
            total / factorial
        }
    };
    for v in probes {
        let expected = diag(v);
        let got = f(&vec![v.clone(); k]);
        let doubled = diag(&(v * Complex64::new(2.0, 0.0)));
        let scale = expected.norm().max(1e-300);
        let residual = ((got - expected).norm() / scale)
            .max((doubled - expected * 2f64.powi(k as i32)).norm() / scale);
        if expected.norm() > 0.0 && residual > HOMOGENEITY_TOL {
            return Err(InvariantError::NonHomogeneous { residual });
        }
    }
    Ok(InvariantPolynomial::new(label, k, f))
}

fn charpoly_polynomial(label: String, k: usize, scale: Complex64) -> InvariantPolynomial {
    polarize(label, k, move |a| charpoly_coefficient(a, k, scale), &[])
        .expect("no probes, cannot fail")
}

/// Degree-`k` Pontryagin polynomial `p_{k/2}`.
pub fn pontryagin(k: usize) -> InvariantPolynomial {
    charpoly_polynomial(format!("p{k}/2"), k, pontryagin_scale())
}

/// `p₁`, the degree-2 Pontryagin polynomial.
pub fn p1() -> InvariantPolynomial {
    let mut p = pontryagin(2);
    p.label = "p1".into();
    p
}

/// Degree-`k` Chern polynomial `c_k`.
pub fn chern(k: usize) -> InvariantPolynomial {
    charpoly_polynomial(format!("c{k}"), k, chern_scale())
}

/// `p₁(A, B) = (TrA·TrB − Tr(AB)) / (8π²)` without a reality check.
pub fn p1_closed_complex(a: &CMat, b: &CMat) -> Complex64 {
    (matrix::trace(a) * matrix::trace(b) - matrix::trace(&(a * b))) / (8.0 * PI * PI)
}

/// `p₁(A, B)`, which is real on the algebras handled here.
pub fn p1_closed(a: &CMat, b: &CMat) -> Result<f64, InvariantError> {
    let value = p1_closed_complex(a, b);
    if value.im.abs() > REALITY_TOL {
        return Err(InvariantError::Imaginary { value });
    }
    Ok(value.re)
}

/// `p₁` built from the closed form.
pub fn p1_closed_polynomial() -> InvariantPolynomial {
    InvariantPolynomial::new("p1", 2, |args| p1_closed_complex(&args[0], &args[1]))
}

/// `|c_{2k}(A, …, A) − (−1)^k p_k(A, …, A)|`; for `k = 1` this is `|c₂ + p₁|`.
pub fn chern_vs_pontryagin_check(a: &CMat, k: usize) -> f64 {
    let c = charpoly_coefficient(a, 2 * k, chern_scale());
    let p = charpoly_coefficient(a, 2 * k, pontryagin_scale());
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    (c - p * sign).norm()
}
