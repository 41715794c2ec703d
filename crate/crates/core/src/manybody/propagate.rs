//! Real-time propagation `x -> exp(-i H t) x` for a real symmetric chain operator.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::operator::XyzChain;
use crate::error::{Error, Result};
use crate::tridiag::eigen_tracked;

/// Chains up to this many sites are propagated by dense diagonalization.
pub const DENSE_PROPAGATION_SITES: usize = 9;
const KRYLOV_DIM: usize = 30;

pub(crate) enum ChainPropagator {
    Dense { values: Vec<f64>, vectors: DMatrix<f64> },
    Krylov { op: XyzChain, tol: f64, norm: f64 },
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl ChainPropagator {
    pub fn new(op: XyzChain, tol: f64) -> Result<Self> {
        if op.sites() <= DENSE_PROPAGATION_SITES {
            let eig = SymmetricEigen::new(op.to_dense()?);
            Ok(ChainPropagator::Dense { values: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors })
        } else {
            let norm = op.norm_bound().max(1e-300);
            Ok(ChainPropagator::Krylov { op, tol, norm })
        }
    }

    /// Propagates `x` in place over time `t`.
    pub fn propagate(&self, x: &mut [Complex64], t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("time {t} is not finite")));
        }
        if t == 0.0 || x.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            return Ok(());
        }
        match self {
            ChainPropagator::Dense { values, vectors } => {
                let dim = values.len();
                let coeffs: Vec<Complex64> = (0..dim)
                    .map(|k| {
                        let col = vectors.column(k);
                        let c: Complex64 = col.iter().zip(x.iter()).map(|(v, z)| z * *v).sum();
                        c * Complex64::from_polar(1.0, -values[k] * t)
                    })
                    .collect();
                for (i, out) in x.iter_mut().enumerate() {
                    *out = coeffs.iter().enumerate().map(|(k, c)| c * vectors[(i, k)]).sum();
                }
                Ok(())
            }
            ChainPropagator::Krylov { op, tol, norm } => krylov_propagate(op, x, t, *tol, *norm),
        }
    }
}

/// One Lanczos step of length `tau`. Returns the propagated vector and an
/// estimate of the truncation error.
fn krylov_step(op: &XyzChain, x: &[Complex64], tau: f64) -> Result<(Vec<Complex64>, f64)> {
    let dim = x.len();
    let beta0 = norm(x);
    let mut basis: Vec<Vec<Complex64>> = vec![x.iter().map(|z| z / beta0).collect()];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut tail = 0.0;
    let m = KRYLOV_DIM.min(dim);
    for j in 0..m {
        op.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for (wi, qi) in w.iter_mut().zip(&basis[j]) {
            *wi -= qi * a;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= qi * b;
            }
        }
        for q in &basis {
            let c = dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= qi * c;
            }
        }
        let b = norm(&w);
        if b <= 1e-13 * (a.abs() + beta.last().copied().unwrap_or(0.0) + 1e-300) {
            break;
        }
        if j + 1 == m {
            tail = b;
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    let k = alpha.len();
    let all: Vec<usize> = (0..k).collect();
    let eig = eigen_tracked(&alpha, &beta[..k - 1], &all)?;
    // coefficients of exp(-i T tau) e_1 in the Lanczos basis
    let phases: Vec<Complex64> = eig.values.iter().map(|&l| Complex64::from_polar(1.0, -l * tau)).collect();
    let coeffs: Vec<Complex64> = (0..k)
        .map(|r| (0..k).map(|l| phases[l] * (eig.rows[0][l] * eig.rows[r][l])).sum::<Complex64>())
        .collect();
    let err = beta0 * tail * coeffs[k - 1].norm();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (c, q) in coeffs.iter().zip(&basis) {
        let c = c * beta0;
        for (o, qi) in out.iter_mut().zip(q) {
            *o += qi * c;
        }
    }
    Ok((out, err))
}

fn krylov_propagate(op: &XyzChain, x: &mut [Complex64], t: f64, tol: f64, norm_bound: f64) -> Result<()> {
    let total = t.abs();
    let sign = t.signum();
    let mut done = 0.0;
    let mut tau = total.min(0.4 * KRYLOV_DIM as f64 / norm_bound);
    let floor = 1e-10 * total.max(1.0);
    while done < total {
        let step = tau.min(total - done);
        let (next, err) = krylov_step(op, x, sign * step)?;
        if err <= (tol * step / total).max(1e-14) {
            x.copy_from_slice(&next);
            done += step;
            if err < 0.01 * tol * step / total {
                tau = step * 1.3;
            }
        } else {
            tau = step / 2.0;
            if tau < floor {
                return Err(Error::Propagation(format!("step-size underflow at t = {}", sign * done)));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_vector(dim: usize, seed: u64) -> Vec<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let n = norm(&v);
        v.into_iter().map(|z| z / n).collect()
    }

    #[test]
    fn krylov_matches_dense() {
        let sites = 8;
        let couplings: Vec<f64> = (0..sites - 1).map(|i| 0.7 + 0.1 * i as f64).collect();
        let fields: Vec<f64> = (0..sites).map(|i| 0.05 * i as f64).collect();
        let op = XyzChain::new(&couplings, &fields, 0.3, 0.6).unwrap();
        let dense = ChainPropagator::new(op.clone(), 1e-12).unwrap();
        let krylov = ChainPropagator::Krylov { norm: op.norm_bound(), op, tol: 1e-12 };
        let x0 = random_vector(1 << sites, 7);
        for &t in &[0.3, 5.0, -12.5] {
            let mut a = x0.clone();
            let mut b = x0.clone();
            dense.propagate(&mut a, t).unwrap();
            krylov.propagate(&mut b, t).unwrap();
            let diff = a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-10, "t = {t}: {diff}");
            assert!((norm(&b) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn forward_then_backward_is_identity() {
        let op = XyzChain::new(&[1.0; 10], &[0.0; 11], 0.0, 0.5).unwrap();
        let prop = ChainPropagator::new(op, 1e-12).unwrap();
        let x0 = random_vector(1 << 11, 3);
        let mut x = x0.clone();
        prop.propagate(&mut x, 7.0).unwrap();
        prop.propagate(&mut x, -7.0).unwrap();
        let diff = x.iter().zip(&x0).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }
}
