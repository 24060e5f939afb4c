//! Dense complex matrices and the handful of helpers the rest of the crate needs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Square complex matrix; every group element, algebra element and tangent is one.
pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    Dimension {
        expected: usize,
        rows: usize,
        cols: usize,
    },
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Real matrix lifted to complex entries.
pub fn from_real(n: usize, entries: &[f64]) -> CMat {
    CMat::from_row_iterator(n, n, entries.iter().map(|&x| Complex64::new(x, 0.0)))
}

pub fn trace(m: &CMat) -> Complex64 {
    m.trace()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn inverse(m: &CMat) -> Result<CMat, MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::Dimension {
            expected: m.nrows(),
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let inv = m.clone().try_inverse().ok_or(MatrixError::Singular)?;
    if inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(inv)
    } else {
        Err(MatrixError::Singular)
    }
}

/// Inverse used inside form evaluators. A singular input yields a NaN-filled
/// matrix, so the failure surfaces as a non-finite residual instead of a panic.
pub(crate) fn inverse_or_nan(m: &CMat) -> CMat {
    inverse(m).unwrap_or_else(|_| {
        CMat::from_element(m.nrows(), m.ncols(), Complex64::new(f64::NAN, f64::NAN))
    })
}

/// Real inner product `Re tr(a* b)`.
pub fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn check_square(m: &CMat, n: usize) -> Result<(), MatrixError> {
    if m.nrows() == n && m.ncols() == n {
        Ok(())
    } else {
        Err(MatrixError::Dimension {
            expected: n,
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_is_cyclic() {
        let a = from_real(2, &[1.0, 2.0, 3.0, 4.0]);
        let b = from_real(2, &[0.5, -1.0, 2.0, 0.25]);
        assert!((trace(&(&a * &b)) - trace(&(&b * &a))).norm() < 1e-13);
    }

    #[test]
    fn singular_inverse_is_an_error() {
        let s = from_real(2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(inverse(&s), Err(MatrixError::Singular));
        assert!(inverse_or_nan(&s)[(0, 0)].re.is_nan());
    }
}
