//! Small dense Hermitian helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::{Error, C64};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Principal square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-1e-12 * trace, 0)` are clamped to zero; anything more
/// negative is reported as [`Error::NotPositiveSemidefinite`].
pub fn hermitian_sqrt(m: &CMatrix) -> Result<CMatrix, Error> {
    let n = m.nrows();
    let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    if trace == 0.0 && m.iter().all(|x| *x == C64::new(0.0, 0.0)) {
        return Ok(CMatrix::zeros(n, n));
    }
    let eig = SymmetricEigen::new(m.clone());
    let tol = 1e-12 * trace.abs();
    let mut scaled = eig.eigenvectors.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < -tol {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: lambda });
        }
        let s = lambda.max(0.0).sqrt();
        scaled.column_mut(j).scale_mut(s);
    }
    Ok(&scaled * eig.eigenvectors.adjoint())
}

/// Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky(m: CMatrix) -> Result<Cholesky<C64, nalgebra::Dyn>, Error> {
    Cholesky::new(m).ok_or(Error::SolveFailed)
}

/// Frobenius norm of `a - b` relative to the Frobenius norm of `b`.
pub fn relative_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares_back() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.5, 0.5),
                C64::new(0.5, -0.5),
                C64::new(1.0, 0.0),
            ],
        );
        let s = hermitian_sqrt(&m).unwrap();
        assert!((&s * &s - &m).norm() < 1e-12);
        assert!((&s - s.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
        ]));
        assert!(matches!(
            hermitian_sqrt(&m),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn sqrt_clamps_roundoff() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(-1e-14, 0.0),
        ]));
        let s = hermitian_sqrt(&m).unwrap();
        assert_eq!(s[(1, 1)], C64::new(0.0, 0.0));
    }
}
