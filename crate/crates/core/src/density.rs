//! Two-qubit density matrices in the basis `|00>, |01>, |10>, |11>`, where the
//! first label is qubit 0 (kept by the sender) and the second the chain qubit.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type DensityMatrix = Matrix4<Complex64>;

pub(crate) const PHYSICAL_TOL: f64 = 1e-10;

/// Checks Hermiticity, unit trace and positivity within `tol`.
pub fn validate(rho: &DensityMatrix, tol: f64) -> Result<()> {
    let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > tol {
        return Err(Error::InvalidState(format!("matrix is not Hermitian (defect {herm:e})")));
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
        return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
    }
    let min = eigenvalues(rho).into_iter().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// Eigenvalues of a Hermitian 4x4 matrix, ascending.
pub fn eigenvalues(rho: &DensityMatrix) -> Vec<f64> {
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Shannon entropy in bits of a probability vector; `0 log 0 = 0`.
pub fn shannon_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_bits(eigenvalues(rho))
}

/// Entropy of a 2x2 Hermitian matrix from its trace and determinant.
pub(crate) fn entropy_2x2(m: &Matrix2<Complex64>) -> f64 {
    let tr = (m[(0, 0)] + m[(1, 1)]).re;
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    shannon_bits([tr / 2.0 + disc, tr / 2.0 - disc])
}

/// Reduced state of qubit 0.
pub fn reduce_first(rho: &DensityMatrix) -> Matrix2<Complex64> {
    Matrix2::from_fn(|a, b| rho[(2 * a, 2 * b)] + rho[(2 * a + 1, 2 * b + 1)])
}

/// Reduced state of the second qubit.
pub fn reduce_second(rho: &DensityMatrix) -> Matrix2<Complex64> {
    Matrix2::from_fn(|a, b| rho[(a, b)] + rho[(2 + a, 2 + b)])
}

/// `|00><00|`-style product state from two single-qubit density matrices.
pub fn product(first: &Matrix2<Complex64>, second: &Matrix2<Complex64>) -> DensityMatrix {
    first.kronecker(second)
}

/// True when every entry outside the diagonal and anti-diagonal is below `tol`.
pub fn is_x_form(rho: &DensityMatrix, tol: f64) -> bool {
    (0..4).all(|i| (0..4).all(|j| i == j || i + j == 3 || rho[(i, j)].norm() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn maximally_mixed_has_two_bits() {
        let rho = DensityMatrix::identity() * c(0.25);
        assert!(validate(&rho, 1e-12).is_ok());
        assert!((von_neumann_entropy(&rho) - 2.0).abs() < 1e-14);
        assert!((entropy_2x2(&reduce_first(&rho)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_unphysical() {
        let mut rho = DensityMatrix::zeros();
        rho[(0, 0)] = c(1.2);
        rho[(3, 3)] = c(-0.2);
        assert!(validate(&rho, 1e-10).is_err());
        let mut rho = DensityMatrix::identity() * c(0.25);
        rho[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(validate(&rho, 1e-10).is_err());
    }

    #[test]
    fn partial_traces_of_product() {
        let a = Matrix2::new(c(0.7), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), c(0.3));
        let b = Matrix2::new(c(0.4), c(0.0), c(0.0), c(0.6));
        let rho = product(&a, &b);
        assert!((reduce_first(&rho) - a).norm() < 1e-15);
        assert!((reduce_second(&rho) - b).norm() < 1e-15);
    }
}
