//! Lanczos ground state with full reorthogonalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operator::XyzChain;
use crate::error::{Error, Result};
use crate::tridiag::eigen_tracked;

const RESIDUAL_TOL: f64 = 1e-8;
const DEGENERACY_TOL: f64 = 1e-8;
const MAX_MANIFOLD: usize = 16;
const START_SEED: u64 = 0x5eed;

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// Dimension of the (numerically) degenerate ground manifold.
    pub multiplicity: usize,
    pub residual: f64,
}

impl GroundState {
    pub fn is_degenerate(&self) -> bool {
        self.multiplicity > 1
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_out(v: &mut [f64], against: &[Vec<f64>]) {
    for q in against {
        let c = dot(q, v);
        v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Lowest eigenpair of `op` in the orthogonal complement of `deflate`.
fn lowest(op: &XyzChain, deflate: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Result<Option<(f64, Vec<f64>, f64)>> {
    let dim = op.dim();
    if deflate.len() >= dim {
        return Ok(None);
    }
    let mut start: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    project_out(&mut start, deflate);
    normalize(&mut start);

    let max_steps = dim - deflate.len();
    let mut basis = vec![start];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut w = vec![0.0; dim];
    loop {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        project_out(&mut w, deflate);
        alpha.push(dot(&basis[j], &w));
        // two passes of Gram-Schmidt
        project_out(&mut w, &basis);
        project_out(&mut w, &basis);
        project_out(&mut w, deflate);
        let b = normalize(&mut w);
        let k = alpha.len();
        let check = k == max_steps || b < 1e-12 || k % 10 == 0;
        if check {
            let all: Vec<usize> = (0..k).collect();
            let eig = eigen_tracked(&alpha, &beta, &all)?;
            let estimate = b * eig.rows[k - 1][0].abs();
            if estimate < 0.1 * RESIDUAL_TOL || k == max_steps || b < 1e-12 {
                let mut v = vec![0.0; dim];
                for (r, q) in basis.iter().enumerate() {
                    let c = eig.rows[r][0];
                    v.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
                }
                project_out(&mut v, deflate);
                normalize(&mut v);
                op.apply(&v, &mut w);
                let energy = dot(&v, &w);
                let residual = w.iter().zip(&v).map(|(hx, x)| (hx - energy * x).powi(2)).sum::<f64>().sqrt();
                return Ok(Some((energy, v, residual)));
            }
        }
        beta.push(b);
        basis.push(w.clone());
    }
}

/// Ground state of `op`. A degenerate manifold is collected by deflation and
/// resolved to the normalized projection of the lowest-index basis vector
/// with non-negligible weight in it.
pub fn ground_state(op: &XyzChain) -> Result<GroundState> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let (energy, first, residual) = lowest(op, &[], &mut rng)?.expect("nonempty space");
    if residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence { index: 0, iterations: op.dim() });
    }
    let mut manifold = vec![first];
    let mut worst = residual;
    while manifold.len() < MAX_MANIFOLD {
        match lowest(op, &manifold, &mut rng)? {
            Some((e, v, r)) if e - energy < DEGENERACY_TOL * energy.abs().max(1.0) => {
                worst = worst.max(r);
                manifold.push(v);
            }
            _ => break,
        }
    }
    let multiplicity = manifold.len();
    let vector = if multiplicity == 1 {
        manifold.pop().unwrap()
    } else {
        let dim = op.dim();
        let weight = |s: usize| manifold.iter().map(|g| g[s] * g[s]).sum::<f64>();
        let s = (0..dim).find(|&s| weight(s) > 1e-8).unwrap_or(0);
        let mut v = vec![0.0; dim];
        for g in &manifold {
            let c = g[s];
            v.iter_mut().zip(g).for_each(|(x, y)| *x += c * y);
        }
        normalize(&mut v);
        v
    };
    let mut vector = vector;
    if let Some(first) = vector.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            vector.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let mut hv = vec![0.0; vector.len()];
    op.apply(&vector, &mut hv);
    let e = dot(&vector, &hv);
    let residual = hv.iter().zip(&vector).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
    if residual > RESIDUAL_TOL.max(worst) * 10.0 {
        return Err(Error::NoConvergence { index: 0, iterations: op.dim() });
    }
    Ok(GroundState { energy: e, vector, multiplicity, residual })
}
