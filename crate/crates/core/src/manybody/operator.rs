use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest chain handled by the matrix-free operator.
pub const MAX_MATRIX_FREE_QUBITS: usize = 22;
/// Largest chain for which a dense matrix is built.
pub const MAX_DENSE_QUBITS: usize = 16;

const PARALLEL_DIM: usize = 1 << 12;

/// Scalars the operator can act on.
pub trait Amplitude:
    Copy + Send + Sync + Default + std::ops::Add<Output = Self> + std::ops::Mul<f64, Output = Self>
{
}
impl Amplitude for f64 {}
impl Amplitude for Complex64 {}

/// Open XYZ chain on `L` sites with site `i` stored in bit `L - 1 - i`:
///
/// `H = sum_i J_i [(1+g) Sx Sx + (1-g) Sy Sy + D Sz Sz] - sum_i h_i Sz_i`
///
/// In the computational basis every matrix element is real. The flip-flop
/// term connects antiparallel neighbours with `J_i / 2`, the pair-creation
/// term parallel neighbours with `g J_i / 2`.
#[derive(Debug, Clone)]
pub struct XyzChain {
    sites: usize,
    couplings: Vec<f64>,
    gamma: f64,
    diag: Vec<f64>,
}

impl XyzChain {
    pub fn new(couplings: &[f64], fields: &[f64], gamma: f64, delta: f64) -> Result<Self> {
        let sites = fields.len();
        if sites > MAX_MATRIX_FREE_QUBITS {
            return Err(Error::SizeLimit { qubits: sites, limit: MAX_MATRIX_FREE_QUBITS });
        }
        if couplings.len() + 1 != sites.max(1) {
            return Err(Error::InvalidChain(format!("{} couplings for {sites} sites", couplings.len())));
        }
        let dim = 1usize << sites;
        let sz = |s: usize, i: usize| if (s >> (sites - 1 - i)) & 1 == 1 { 0.5 } else { -0.5 };
        let diag = (0..dim)
            .map(|s| {
                let zz: f64 = couplings.iter().enumerate().map(|(i, j)| j * delta * sz(s, i) * sz(s, i + 1)).sum();
                let zeeman: f64 = fields.iter().enumerate().map(|(i, h)| h * sz(s, i)).sum();
                zz - zeeman
            })
            .collect();
        Ok(XyzChain { sites, couplings: couplings.to_vec(), gamma, diag })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn row<T: Amplitude>(&self, s: usize, x: &[T]) -> T {
        let mut acc = x[s] * self.diag[s];
        for (i, &j) in self.couplings.iter().enumerate() {
            let shift = self.sites - 2 - i;
            let pair = (s >> shift) & 0b11;
            let coef = if pair == 0b01 || pair == 0b10 { 0.5 * j } else { 0.5 * j * self.gamma };
            if coef != 0.0 {
                acc = acc + x[s ^ (0b11 << shift)] * coef;
            }
        }
        acc
    }

    /// `y = H x`.
    pub fn apply<T: Amplitude>(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        if self.dim() >= PARALLEL_DIM {
            y.par_iter_mut().enumerate().for_each(|(s, out)| *out = self.row(s, x));
        } else {
            y.iter_mut().enumerate().for_each(|(s, out)| *out = self.row(s, x));
        }
    }

    pub fn to_dense(&self) -> Result<nalgebra::DMatrix<f64>> {
        if self.sites > MAX_DENSE_QUBITS {
            return Err(Error::SizeLimit { qubits: self.sites, limit: MAX_DENSE_QUBITS });
        }
        let dim = self.dim();
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        let mut col = vec![0.0; dim];
        for c in 0..dim {
            e[c] = 1.0;
            self.apply(&e, &mut col);
            m.column_mut(c).copy_from_slice(&col);
            e[c] = 0.0;
        }
        Ok(m)
    }

    /// Total magnetization `sum_i Sz_i` of a basis state.
    pub fn magnetization(&self, s: usize) -> f64 {
        s.count_ones() as f64 - self.sites as f64 / 2.0
    }

    /// Upper bound on the spectral radius from the row sums.
    pub fn norm_bound(&self) -> f64 {
        let off: f64 = self.couplings.iter().map(|j| 0.5 * j.abs() * self.gamma.abs().max(1.0)).sum();
        self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs())) + off
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_flip_flop_block() {
        let op = XyzChain::new(&[1.0], &[0.0, 0.0], 0.0, 0.0).unwrap();
        let m = op.to_dense().unwrap();
        // basis |00>,|01>,|10>,|11>
        assert_eq!(m[(1, 2)], 0.5);
        assert_eq!(m[(2, 1)], 0.5);
        assert_eq!(m[(0, 3)], 0.0);
        assert_eq!(m[(0, 0)], 0.0);
    }

    #[test]
    fn anisotropic_pair_terms() {
        let op = XyzChain::new(&[2.0], &[0.0, 0.0], 0.5, 1.0).unwrap();
        let m = op.to_dense().unwrap();
        assert_eq!(m[(0, 3)], 0.5);
        assert_eq!(m[(1, 2)], 1.0);
        assert_eq!(m[(0, 0)], 0.5);
        assert_eq!(m[(1, 1)], -0.5);
    }

    #[test]
    fn ising_limit_drops_sy_sy() {
        // (1+g) SxSx + (1-g) SySy at g = 1 equals 2 SxSx: flip-flop and pair terms agree
        let op = XyzChain::new(&[1.0], &[0.0, 0.0], 1.0, 0.0).unwrap();
        let m = op.to_dense().unwrap();
        assert_eq!(m[(0, 3)], m[(1, 2)]);
        let sx = nalgebra::Matrix2::new(0.0, 0.5, 0.5, 0.0);
        let sxsx = sx.kronecker(&sx) * 2.0;
        for i in 0..4 {
            for j in 0..4 {
                assert!((m[(i, j)] - sxsx[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn field_sign() {
        let op = XyzChain::new(&[0.0], &[1.0, 0.0], 0.0, 0.0).unwrap();
        // site 0 up (bit 1 of 2) lowers the energy by h/2
        assert_eq!(op.to_dense().unwrap()[(2, 2)], -0.5);
        assert_eq!(op.to_dense().unwrap()[(0, 0)], 0.5);
    }
}
