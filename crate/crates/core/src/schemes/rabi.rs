//! Rabi-like transfer through a quasi-degenerate pair of end-localized modes.
//!
//! For a mirror-symmetric chain the one-excitation matrix splits into a
//! symmetric and an antisymmetric block, so every mode has an exact parity
//! and `U_kN = +-U_k1` never has to be read off noisy eigenvectors. When the
//! doublet splitting falls below what the block eigenvalues resolve, it is
//! recomputed from the secular equation of the half chain.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{build_tridiagonal, ChainSpec, SpectralData, DEFAULT_COARSE_STEP, DEFAULT_REFINE_TOL};
use crate::error::{Error, Result};
use crate::optimize::golden_section_max;
use crate::tridiag::eigen_tracked;

/// Splittings below this are recomputed from the secular equation.
pub const SECULAR_THRESHOLD: f64 = 1e-6;
/// Rabi times beyond this switch to a local window around `pi / dw`.
pub const LOCAL_WINDOW_AFTER: f64 = 4000.0;
pub const LOCAL_HALF_WIDTH: f64 = 2000.0;
/// Doublets carrying less end weight than this are flagged.
pub const DOMINANCE: f64 = 0.9;
const MAX_SCAN_STEPS: usize = 50_000_000;
const RESEED: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiEstimate {
    pub time: f64,
    pub weight_sum: f64,
    pub flagged: bool,
}

/// `pi / |w_a - w_b|` for the two modes with the largest `U_k1^2`.
pub fn rabi_time_estimate(sd: &SpectralData) -> RabiEstimate {
    let weights: Vec<f64> = sd.eigenvectors.iter().map(|v| v[0] * v[0]).collect();
    let (a, b) = top_two(&weights);
    let gap = (sd.eigenvalues[a] - sd.eigenvalues[b]).abs();
    let weight_sum = weights[a] + weights.get(b).copied().unwrap_or(0.0);
    let time = if gap > 0.0 { std::f64::consts::PI / gap } else { f64::INFINITY };
    RabiEstimate { time, weight_sum, flagged: weight_sum < DOMINANCE || !time.is_finite() }
}

fn top_two(w: &[f64]) -> (usize, usize) {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&i, &j| w[j].total_cmp(&w[i]).then(i.cmp(&j)));
    (idx[0], *idx.get(1).unwrap_or(&idx[0]))
}

/// Modes of a mirror-symmetric chain with exact parities, expressed relative
/// to a reference frequency `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct RabiModes {
    pub center: f64,
    pub offsets: Vec<f64>,
    pub end_products: Vec<f64>,
    pub first_weights: Vec<f64>,
    /// Indices of the symmetric and antisymmetric doublet members.
    pub doublet: (usize, usize),
    /// `w_sym - w_anti`.
    pub splitting: f64,
    pub secular: bool,
}

struct Block {
    values: Vec<f64>,
    first: Vec<f64>,
}

fn block(diag: &[f64], off: &[f64]) -> Result<Block> {
    let raw = eigen_tracked(diag, off, &[0])?;
    Ok(Block { first: raw.rows[0].clone(), values: raw.values })
}

/// Eigenvector of the tridiagonal `(diag, off)` at eigenvalue `lambda`, built
/// from the last site backwards, which is the stable direction for a state
/// localized at the first site. Returns the last component after normalization.
fn last_component(diag: &[f64], off: &[f64], lambda: f64) -> f64 {
    let l = diag.len();
    if l == 1 {
        return 1.0;
    }
    let mut v = vec![0.0; l];
    v[l - 1] = 1.0;
    v[l - 2] = (lambda - diag[l - 1]) / off[l - 2];
    for i in (1..l - 1).rev() {
        v[i - 1] = ((lambda - diag[i]) * v[i] - off[i] * v[i + 1]) / off[i - 1];
        if v[i - 1].abs() > 1e150 {
            v.iter_mut().for_each(|x| *x *= 1e-150);
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v[l - 1] / norm
}

/// Reference energy of the end-localized half-chain mode and the shifts of
/// the symmetric and antisymmetric doublet members from it, to first order
/// in the (tiny) weight of that mode on the central site.
fn secular_shifts(d: &[f64], o: &[f64]) -> Result<(f64, (f64, f64))> {
    let n = d.len();
    let m = n / 2;
    let (hd, ho) = (&d[..m], &o[..m - 1]);
    let raw = eigen_tracked(hd, ho, &[0, m - 1])?;
    let j0 = (0..m).fold(0, |best, j| if raw.rows[0][j].powi(2) > raw.rows[0][best].powi(2) { j } else { best });
    let lam0 = raw.values[j0];
    let psi2 = last_component(hd, ho, lam0).powi(2);
    let r: f64 = (0..m).filter(|&j| j != j0).map(|j| raw.rows[1][j].powi(2) / (lam0 - raw.values[j])).sum();
    let c = o[m - 1];
    let shifts = if n % 2 == 0 {
        (c * psi2 / (1.0 - c * r), -c * psi2 / (1.0 + c * r))
    } else {
        (2.0 * c * c * psi2 / (lam0 - d[m] - 2.0 * c * c * r), 0.0)
    };
    Ok((lam0, shifts))
}

pub fn rabi_modes(spec: &ChainSpec) -> Result<RabiModes> {
    let t = build_tridiagonal(spec)?;
    let n = t.dim();
    let d = &t.diagonal;
    let o = &t.offdiagonal;
    let scale = d.iter().chain(o).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let mirrored = |v: &[f64]| v.iter().zip(v.iter().rev()).all(|(a, b)| (a - b).abs() <= 1e-12 * scale);
    if !mirrored(d) || !mirrored(o) {
        return Err(Error::InvalidChain("Rabi analysis needs a mirror-symmetric chain".into()));
    }
    let m = n / 2;
    // half chain without the central coupling
    let a0_diag = &d[..m];
    let a0_off = &o[..m.saturating_sub(1)];
    let (sym, anti) = if n % 2 == 0 {
        let oc = o[m - 1];
        let mut ds = a0_diag.to_vec();
        let mut da = a0_diag.to_vec();
        ds[m - 1] += oc;
        da[m - 1] -= oc;
        (block(&ds, a0_off)?, block(&da, a0_off)?)
    } else {
        let ds = &d[..=m];
        let mut os = o[..m].to_vec();
        os[m - 1] *= std::f64::consts::SQRT_2;
        (block(ds, &os)?, block(a0_diag, a0_off)?)
    };

    let mut freqs = Vec::with_capacity(n);
    let mut products = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (b, sign) in [(&sym, 1.0), (&anti, -1.0)] {
        for (lam, v0) in b.values.iter().zip(&b.first) {
            let w = 0.5 * v0 * v0;
            freqs.push(*lam);
            products.push(sign * w);
            weights.push(w);
        }
    }
    let ns = sym.values.len();
    let pick = |range: std::ops::Range<usize>| {
        range.clone().fold(range.start, |best, k| if weights[k] > weights[best] { k } else { best })
    };
    let is = pick(0..ns);
    let ia = pick(ns..n);
    let mut splitting = freqs[is] - freqs[ia];
    let mut center = 0.5 * (freqs[is] + freqs[ia]);
    let mut shifts = (0.5 * splitting, -0.5 * splitting);
    let secular = splitting.abs() < SECULAR_THRESHOLD;
    if secular {
        (center, shifts) = secular_shifts(d, o)?;
        splitting = shifts.0 - shifts.1;
    }
    let mut offsets: Vec<f64> = freqs.iter().map(|f| f - center).collect();
    offsets[is] = shifts.0;
    offsets[ia] = shifts.1;
    Ok(RabiModes { center, offsets, end_products: products, first_weights: weights, doublet: (is, ia), splitting, secular })
}

impl RabiModes {
    pub fn weight_sum(&self) -> f64 {
        self.first_weights[self.doublet.0] + self.first_weights[self.doublet.1]
    }

    /// `pi / |w_sym - w_anti|`.
    pub fn rabi_time(&self) -> f64 {
        std::f64::consts::PI / self.splitting.abs()
    }

    pub fn is_dominant(&self) -> bool {
        self.weight_sum() >= DOMINANCE
    }

    /// `u` at time `t0 + s` up to the global phase `exp(-i center t)`.
    fn framed(&self, t0: f64, s: f64) -> Complex64 {
        self.offsets
            .iter()
            .zip(&self.end_products)
            .map(|(&w, &p)| Complex64::from_polar(p, -w * t0) * Complex64::from_polar(1.0, -w * s))
            .sum()
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        self.framed(t, 0.0) * Complex64::from_polar(1.0, -self.center * t)
    }

    /// Best `|u|` for `s` in `[lo, hi]` around the origin `t0`.
    fn scan(&self, t0: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let count = ((hi - lo) / DEFAULT_COARSE_STEP).ceil() as usize + 1;
        if count > MAX_SCAN_STEPS {
            return Err(Error::InvalidGrid(format!("time window of length {} is too long to scan", hi - lo)));
        }
        let dt = (hi - lo) / (count - 1) as f64;
        let base: Vec<Complex64> =
            self.offsets.iter().zip(&self.end_products).map(|(&w, &p)| Complex64::from_polar(p, -w * t0)).collect();
        let steps: Vec<Complex64> = self.offsets.iter().map(|&w| Complex64::from_polar(1.0, -w * dt)).collect();
        let mut phasors = base.clone();
        let mut best = (lo, f64::NEG_INFINITY);
        for j in 0..count {
            let s = lo + dt * j as f64;
            if j % RESEED == 0 {
                for ((ph, b), &w) in phasors.iter_mut().zip(&base).zip(&self.offsets) {
                    *ph = b * Complex64::from_polar(1.0, -w * s);
                }
            } else {
                phasors.iter_mut().zip(&steps).for_each(|(ph, st)| *ph *= st);
            }
            let v = phasors.iter().sum::<Complex64>().norm();
            if v > best.1 {
                best = (s, v);
            }
        }
        let a = (best.0 - dt).max(lo);
        let b = (best.0 + dt).min(hi);
        let (s, v2) = golden_section_max(|s| self.framed(t0, s).norm_sqr(), a, b, DEFAULT_REFINE_TOL);
        Ok(if v2.sqrt() >= best.1 { (s, v2.sqrt()) } else { best })
    }

    /// Search window: `[0, 3 pi / dw]`, or `pi / dw +- 2000` once the Rabi
    /// time exceeds 4000.
    pub fn window(&self) -> (f64, f64) {
        let tr = self.rabi_time();
        if tr <= LOCAL_WINDOW_AFTER {
            (0.0, 3.0 * tr)
        } else {
            (tr - LOCAL_HALF_WIDTH, tr + LOCAL_HALF_WIDTH)
        }
    }

    /// Optimal transfer time and amplitude in [`RabiModes::window`].
    pub fn optimal_time(&self) -> Result<(f64, Complex64, (f64, f64))> {
        let tr = self.rabi_time();
        if !tr.is_finite() {
            return Err(Error::InvalidGrid("doublet is exactly degenerate".into()));
        }
        let window = self.window();
        let (t0, lo, hi) = if tr <= LOCAL_WINDOW_AFTER {
            (0.0, window.0, window.1)
        } else {
            (tr, -LOCAL_HALF_WIDTH, LOCAL_HALF_WIDTH)
        };
        let (s, _) = self.scan(t0, lo, hi)?;
        let t = t0 + s;
        let u = self.framed(t0, s) * Complex64::from_polar(1.0, -self.center * t);
        Ok((t, u, window))
    }

    /// Time of the first Rabi maximum: the best `|u|` in `[0, 2 pi / dw]`.
    pub fn first_maximum_time(&self) -> Result<f64> {
        let (s, _) = self.scan(0.0, 0.0, 2.0 * self.rabi_time())?;
        Ok(s)
    }
}
