//! Small dense complex linear algebra shared by the device modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let f = faer::Mat::<Complex64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    f.eigenvalues()
        .map_err(|e| Error::Numerical(format!("eigenvalue iteration failed: {e:?}")))
}

/// Largest real part among `eigs`, together with the eigenvalue carrying it.
pub fn max_real(eigs: &[Complex64]) -> Option<Complex64> {
    eigs.iter().copied().max_by(|a, b| a.re.total_cmp(&b.re))
}

pub fn norm_one(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn norm_inf(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Inverse with a reciprocal-condition guard (`rcond` in the 1-norm).
pub fn inverse(m: &CMatrix, min_rcond: f64) -> Option<CMatrix> {
    let inv = m.clone().lu().try_inverse()?;
    let rcond = 1.0 / (norm_one(m) * norm_one(&inv));
    if !rcond.is_finite() || rcond < min_rcond || inv.iter().any(|z| !z.is_finite()) {
        return None;
    }
    Some(inv)
}

/// Solves `m x = b`; `None` when `m` is numerically singular.
pub fn solve(m: &CMatrix, b: &CVector, min_rcond: f64) -> Option<CVector> {
    inverse(m, min_rcond).map(|inv| inv * b)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Solves the continuous Lyapunov equation `A V + V A† = D` by vectorization.
///
/// Sized for drift matrices of a handful of modes; the Kronecker system is
/// `n² × n²`.
pub fn lyapunov(a: &CMatrix, d: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if a.ncols() != n || d.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.nrows(),
        });
    }
    let id = CMatrix::identity(n, n);
    // vec(A V) = (I ⊗ A) vec V,  vec(V A†) = (conj(A) ⊗ I) vec V
    let sys = kron(&id, a) + kron(&a.map(|z| z.conj()), &id);
    let rhs = CVector::from_iterator(n * n, d.iter().copied());
    let v = solve(&sys, &rhs, 1e-15).ok_or_else(|| Error::Numerical("Lyapunov operator is singular".into()))?;
    Ok(CMatrix::from_column_slice(n, n, v.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eigenvalues_of_triangular_matrix_are_its_diagonal() {
        #[rustfmt::skip]
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 1.0), c(2.0, 0.0), c(0.0, 3.0),
                re(0.0), c(-2.0, 0.5), re(1.0),
                re(0.0), re(0.0), re(4.0),
            ],
        );
        let mut e = eigenvalues(&m).unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_relative_eq!(e[0].re, -2.0, epsilon = 1e-12);
        assert_relative_eq!(e[0].im, 0.5, epsilon = 1e-12);
        assert_relative_eq!(e[2].re, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn lyapunov_residual_is_small() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.3), c(0.0, 0.2), c(0.0, 0.2), c(0.5, -0.1)]);
        let d = CMatrix::from_row_slice(2, 2, &[re(2.0), re(0.0), re(0.0), re(1.0)]);
        let v = lyapunov(&a, &d).unwrap();
        let resid = &a * &v + &v * a.adjoint() - &d;
        assert!(max_abs(&resid) < 1e-13);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[re(1.0), re(2.0), re(2.0), re(4.0)]);
        assert!(inverse(&m, 1e-14).is_none());
    }
}
