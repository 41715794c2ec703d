//! Single-excitation model of an XX spin chain.
//!
//! In the one-excitation sector the chain Hamiltonian reduces to a real
//! symmetric tridiagonal matrix with hopping `J_n / 2` and on-site energy
//! `-h_n`. Everything about end-to-end transfer is then carried by the
//! transition amplitude `u(t) = <N| exp(-i T t) |1>`, expanded over the
//! eigenmodes of that matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::golden_section_max;
use crate::tridiag::eigen_tracked;

/// Parameters of an open spin-1/2 chain with nearest-neighbour exchange.
///
/// Couplings are in units of the reference exchange `J = 1`; fields act on
/// sites `1..=N` only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_sites: usize,
    pub couplings: Vec<f64>,
    pub fields: Vec<f64>,
    pub gamma: f64,
    pub delta: f64,
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>, fields: Vec<f64>, gamma: f64, delta: f64) -> Result<Self> {
        let spec = ChainSpec { n_sites: fields.len(), couplings, fields, gamma, delta };
        spec.validate()?;
        Ok(spec)
    }

    /// XX chain (`gamma = delta = 0`).
    pub fn xx(couplings: Vec<f64>, fields: Vec<f64>) -> Result<Self> {
        Self::new(couplings, fields, 0.0, 0.0)
    }

    /// Uniform couplings `J = 1` and zero fields.
    pub fn uniform(n_sites: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidChain(format!("need at least 2 sites, got {n_sites}")));
        }
        Self::xx(vec![1.0; n_sites - 1], vec![0.0; n_sites])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites;
        if n < 2 {
            return Err(Error::InvalidChain(format!("need at least 2 sites, got {n}")));
        }
        if self.couplings.len() != n - 1 {
            return Err(Error::InvalidChain(format!(
                "expected {} couplings for {n} sites, got {}",
                n - 1,
                self.couplings.len()
            )));
        }
        if self.fields.len() != n {
            return Err(Error::InvalidChain(format!("expected {n} fields, got {}", self.fields.len())));
        }
        if let Some(i) = self.couplings.iter().position(|j| !j.is_finite()) {
            return Err(Error::InvalidChain(format!("coupling {} is not finite", i + 1)));
        }
        if let Some(i) = self.fields.iter().position(|h| !h.is_finite()) {
            return Err(Error::InvalidChain(format!("field {} is not finite", i + 1)));
        }
        if !self.gamma.is_finite() || !self.delta.is_finite() {
            return Err(Error::InvalidChain("anisotropy parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn is_xx(&self) -> bool {
        self.gamma == 0.0 && self.delta == 0.0
    }

    pub(crate) fn require_xx(&self) -> Result<()> {
        if self.is_xx() {
            Ok(())
        } else {
            Err(Error::NotXxLimit { gamma: self.gamma, delta: self.delta })
        }
    }

    /// Same chain with `shift` added to every local field.
    pub fn with_field_offset(&self, shift: f64) -> Self {
        let mut out = self.clone();
        out.fields.iter_mut().for_each(|h| *h += shift);
        out
    }
}

/// The one-excitation Hamiltonian: `diagonal[n] = -h_n`, `offdiagonal[n] = J_n / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    pub diagonal: Vec<f64>,
    pub offdiagonal: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Dense copy, mainly for cross-checks.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diagonal[i];
        }
        for (i, &o) in self.offdiagonal.iter().enumerate() {
            m[(i, i + 1)] = o;
            m[(i + 1, i)] = o;
        }
        m
    }
}

pub fn build_tridiagonal(spec: &ChainSpec) -> Result<TridiagonalHamiltonian> {
    spec.validate()?;
    spec.require_xx()?;
    Ok(TridiagonalHamiltonian {
        diagonal: spec.fields.iter().map(|h| -h).collect(),
        offdiagonal: spec.couplings.iter().map(|j| j / 2.0).collect(),
    })
}

/// Full eigendecomposition of the one-excitation Hamiltonian.
///
/// `eigenvectors[k][i]` is component `i` of eigenvector `k`; eigenvalues are
/// ascending and each eigenvector's first non-negligible component is
/// positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

const SIGN_THRESHOLD: f64 = 1e-12;

pub fn eigendecompose(t: &TridiagonalHamiltonian) -> Result<SpectralData> {
    let n = t.dim();
    let all: Vec<usize> = (0..n).collect();
    let raw = eigen_tracked(&t.diagonal, &t.offdiagonal, &all)?;
    let mut eigenvectors: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|i| raw.rows[i][k]).collect()).collect();
    for v in eigenvectors.iter_mut() {
        if let Some(first) = v.iter().copied().find(|c| c.abs() > SIGN_THRESHOLD) {
            if first < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
        }
    }
    Ok(SpectralData { eigenvalues: raw.values, eigenvectors })
}

impl SpectralData {
    pub fn n_sites(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn transfer_modes(&self) -> TransferModes {
        let n = self.n_sites();
        TransferModes {
            frequencies: self.eigenvalues.clone(),
            end_products: self.eigenvectors.iter().map(|v| v[0] * v[n - 1]).collect(),
            first_weights: self.eigenvectors.iter().map(|v| v[0] * v[0]).collect(),
        }
    }
}

/// The parts of the spectrum that enter `u_N1(t)`: frequencies `w_k`, the
/// products `U_k1 U_kN` and the weights `U_k1^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferModes {
    pub frequencies: Vec<f64>,
    pub end_products: Vec<f64>,
    pub first_weights: Vec<f64>,
}

/// Eigenvalues and end components only, without the full eigenvector matrix.
pub fn endpoint_modes(t: &TridiagonalHamiltonian) -> Result<TransferModes> {
    let n = t.dim();
    let raw = eigen_tracked(&t.diagonal, &t.offdiagonal, &[0, n - 1])?;
    Ok(TransferModes {
        end_products: raw.rows[0].iter().zip(&raw.rows[1]).map(|(a, b)| a * b).collect(),
        first_weights: raw.rows[0].iter().map(|a| a * a).collect(),
        frequencies: raw.values,
    })
}

/// Builds the tridiagonal Hamiltonian of `spec` and returns its transfer modes.
pub fn chain_modes(spec: &ChainSpec) -> Result<TransferModes> {
    endpoint_modes(&build_tridiagonal(spec)?)
}

/// Samples `u` on `t0, t0 + dt, ...` by rotating per-mode phasors; the
/// phasors are recomputed from scratch every `RESEED` steps.
const RESEED: usize = 64;

impl TransferModes {
    pub fn amplitude(&self, t: f64) -> Complex64 {
        self.frequencies
            .iter()
            .zip(&self.end_products)
            .map(|(&w, &p)| Complex64::from_polar(p, -w * t))
            .sum()
    }

    /// `|u|` on an evenly spaced grid.
    pub fn abs_on_grid(&self, t0: f64, dt: f64, count: usize) -> Vec<f64> {
        let n = self.frequencies.len();
        let steps: Vec<Complex64> = self.frequencies.iter().map(|&w| Complex64::from_polar(1.0, -w * dt)).collect();
        let mut phasors = vec![Complex64::new(0.0, 0.0); n];
        let mut out = Vec::with_capacity(count);
        for j in 0..count {
            if j % RESEED == 0 {
                let t = t0 + dt * j as f64;
                for (k, ph) in phasors.iter_mut().enumerate() {
                    *ph = Complex64::from_polar(self.end_products[k], -self.frequencies[k] * t);
                }
            } else {
                for (ph, s) in phasors.iter_mut().zip(&steps) {
                    *ph *= s;
                }
            }
            out.push(phasors.iter().sum::<Complex64>().norm());
        }
        out
    }

    /// Coarse scan followed by golden-section refinement of `|u|^2` around
    /// the best sample. Ties on the grid keep the earliest time.
    pub fn optimal_time(&self, window: (f64, f64), coarse_step: f64, refine_tol: f64) -> Result<(f64, Complex64)> {
        let (lo, hi) = window;
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo >= hi {
            return Err(Error::InvalidGrid(format!("empty time window [{lo}, {hi}]")));
        }
        if !(coarse_step > 0.0) || !(refine_tol > 0.0) {
            return Err(Error::InvalidGrid("coarse step and refine tolerance must be positive".into()));
        }
        let step = coarse_step.min(0.05);
        let count = ((hi - lo) / step).ceil() as usize + 1;
        let dt = (hi - lo) / (count - 1) as f64;
        let samples = self.abs_on_grid(lo, dt, count);
        let mut best = 0;
        for (j, &v) in samples.iter().enumerate() {
            if v > samples[best] {
                best = j;
            }
        }
        let t_best = lo + dt * best as f64;
        let a = (t_best - dt).max(lo);
        let b = (t_best + dt).min(hi);
        let (t_ref, v_ref) = golden_section_max(|t| self.amplitude(t).norm_sqr(), a, b, refine_tol);
        let t_star = if v_ref >= self.amplitude(t_best).norm_sqr() { t_ref } else { t_best };
        Ok((t_star, self.amplitude(t_star)))
    }
}

pub fn transition_amplitude(sd: &SpectralData, t: f64) -> Complex64 {
    let n = sd.n_sites();
    sd.eigenvalues
        .iter()
        .zip(&sd.eigenvectors)
        .map(|(&w, v)| Complex64::from_polar(v[0] * v[n - 1], -w * t))
        .sum()
}

/// Mode-sum form `sum_k U_k1^2 exp(i (k pi - w_k t))`, valid for
/// mirror-symmetric chains. `None` when the parity condition fails.
pub fn mode_sum_amplitude(sd: &SpectralData, t: f64, tol: f64) -> Option<Complex64> {
    let offset = parity_offset(sd, tol)?;
    let sum: Complex64 = sd
        .eigenvalues
        .iter()
        .zip(&sd.eigenvectors)
        .enumerate()
        .map(|(k, (&w, v))| {
            let phase = (k + 1) as f64 * std::f64::consts::PI - w * t;
            Complex64::from_polar(v[0] * v[0], phase)
        })
        .sum();
    Some(if offset == 0 { sum } else { -sum })
}

/// Times (units 1/J) and samples of `u_N1(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

pub fn amplitude_series(sd: &SpectralData, t_start: f64, t_end: f64, n_samples: usize) -> Result<AmplitudeSeries> {
    if !(t_start.is_finite() && t_end.is_finite()) || t_start >= t_end {
        return Err(Error::InvalidGrid(format!("t_start = {t_start} must be below t_end = {t_end}")));
    }
    if n_samples < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n_samples}")));
    }
    let dt = (t_end - t_start) / (n_samples - 1) as f64;
    let times: Vec<f64> = (0..n_samples).map(|j| t_start + dt * j as f64).collect();
    let values = times.iter().map(|&t| transition_amplitude(sd, t)).collect();
    Ok(AmplitudeSeries { times, values })
}

/// Ballistic search window `[max(0, N - 10), 1.6 N + 20]`.
pub fn default_window(n_sites: usize) -> (f64, f64) {
    let n = n_sites as f64;
    ((n - 10.0).max(0.0), 1.6 * n + 20.0)
}

pub const DEFAULT_COARSE_STEP: f64 = 0.05;
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;

pub fn find_optimal_time(
    sd: &SpectralData,
    window: (f64, f64),
    coarse_step: f64,
    refine_tol: f64,
) -> Result<(f64, Complex64)> {
    sd.transfer_modes().optimal_time(window, coarse_step, refine_tol)
}

pub fn mirror_symmetry_check(spec: &ChainSpec, tol: f64) -> bool {
    let palindrome = |v: &[f64]| v.iter().zip(v.iter().rev()).all(|(a, b)| (a - b).abs() <= tol);
    palindrome(&spec.couplings) && palindrome(&spec.fields)
}

/// Alternation offset `s` with `U_k1 = (-1)^(k + s) U_kN` for all `k`, if any.
pub fn parity_offset(sd: &SpectralData, tol: f64) -> Option<u8> {
    let n = sd.n_sites();
    let holds = |offset: usize| {
        sd.eigenvectors.iter().enumerate().all(|(k, v)| {
            let sign = if (k + 1 + offset) % 2 == 0 { 1.0 } else { -1.0 };
            (v[0] - sign * v[n - 1]).abs() <= tol
        })
    };
    if holds(0) {
        Some(0)
    } else if holds(1) {
        Some(1)
    } else {
        None
    }
}

pub fn parity_check(sd: &SpectralData, tol: f64) -> bool {
    parity_offset(sd, tol).is_some()
}

/// Normalized density of excited modes `U_k1^2 / max_k U_k1^2`.
pub fn mode_density(sd: &SpectralData) -> Vec<f64> {
    let weights: Vec<f64> = sd.eigenvectors.iter().map(|v| v[0] * v[0]).collect();
    let max = weights.iter().copied().fold(0.0, f64::max);
    weights.iter().map(|w| w / max).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn spectral(spec: &ChainSpec) -> SpectralData {
        eigendecompose(&build_tridiagonal(spec).unwrap()).unwrap()
    }

    #[test]
    fn builds_entries_from_couplings_and_fields() {
        let t = build_tridiagonal(&ChainSpec::uniform(3).unwrap()).unwrap();
        assert_eq!(t.diagonal, vec![0.0, 0.0, 0.0]);
        assert_eq!(t.offdiagonal, vec![0.5, 0.5]);

        let t = build_tridiagonal(&ChainSpec::xx(vec![1.0], vec![2.0, 2.0]).unwrap()).unwrap();
        assert_eq!(t.diagonal, vec![-2.0, -2.0]);
        assert_eq!(t.offdiagonal, vec![0.5]);
    }

    #[test]
    fn rejects_anisotropy_and_bad_lengths() {
        let spec = ChainSpec::new(vec![1.0], vec![0.0, 0.0], 0.2, 0.0).unwrap();
        assert!(matches!(build_tridiagonal(&spec), Err(Error::NotXxLimit { .. })));
        let spec = ChainSpec::new(vec![1.0], vec![0.0, 0.0], 0.0, 1.0).unwrap();
        assert!(matches!(build_tridiagonal(&spec), Err(Error::NotXxLimit { .. })));
        assert!(ChainSpec::xx(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(ChainSpec::xx(vec![f64::NAN], vec![0.0, 0.0]).is_err());
        assert!(ChainSpec::uniform(1).is_err());
    }

    #[test]
    fn uniform_three_site_spectrum() {
        let sd = spectral(&ChainSpec::uniform(3).unwrap());
        let c = (PI / 4.0).cos();
        for (w, e) in sd.eigenvalues.iter().zip([-c, 0.0, c]) {
            assert!((w - e).abs() < 1e-14);
        }
        // U_ki = sqrt(2/4) sin(k pi i / 4) up to sign, k ordered by cos(k pi/4) descending
        for (idx, k) in [3usize, 2, 1].iter().enumerate() {
            let v = &sd.eigenvectors[idx];
            let expected: Vec<f64> = (1..=3).map(|i| (0.5f64).sqrt() * ((*k * i) as f64 * PI / 4.0).sin()).collect();
            let sign = if expected[0] < 0.0 { -1.0 } else { 1.0 };
            for i in 0..3 {
                assert!((v[i] - sign * expected[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_site_spectrum() {
        let sd = spectral(&ChainSpec::uniform(2).unwrap());
        assert!((sd.eigenvalues[0] + 0.5).abs() < 1e-15);
        assert!((sd.eigenvalues[1] - 0.5).abs() < 1e-15);
        assert!((sd.eigenvectors[0][0] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((sd.eigenvectors[0][1] + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((sd.eigenvectors[1][1] - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn decoupled_sites_sort_by_energy() {
        let sd = spectral(&ChainSpec::xx(vec![0.0, 0.0], vec![1.0, 2.0, 3.0]).unwrap());
        assert_eq!(sd.eigenvalues, vec![-3.0, -2.0, -1.0]);
        assert_eq!(sd.eigenvectors, vec![vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]);
        assert_eq!(mode_density(&sd), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn amplitude_two_site() {
        let sd = spectral(&ChainSpec::uniform(2).unwrap());
        assert_eq!(transition_amplitude(&sd, 0.0).norm(), 0.0);
        for t in [0.3, 1.0, PI, 5.5] {
            let u = transition_amplitude(&sd, t);
            assert!((u - Complex64::new(0.0, -(t / 2.0).sin())).norm() < 1e-15);
        }
        let series = amplitude_series(&sd, 0.0, 2.0 * PI, 5).unwrap();
        let expected = [0.0, FRAC_1_SQRT_2, 1.0, FRAC_1_SQRT_2, 0.0];
        for (u, e) in series.values.iter().zip(expected) {
            assert!((u.norm() - e).abs() < 1e-14);
        }
    }

    #[test]
    fn series_rejects_bad_grids() {
        let sd = spectral(&ChainSpec::uniform(2).unwrap());
        assert!(amplitude_series(&sd, 1.0, 1.0, 5).is_err());
        assert!(amplitude_series(&sd, 0.0, 1.0, 1).is_err());
        let s = amplitude_series(&sd, 0.0, 1e-9, 2).unwrap();
        assert_eq!(s.values[0].norm(), 0.0);
    }

    #[test]
    fn optimal_time_two_site() {
        let sd = spectral(&ChainSpec::uniform(2).unwrap());
        let (t, u) = find_optimal_time(&sd, (0.0, 2.0 * PI), 0.05, 1e-9).unwrap();
        assert!((t - PI).abs() < 1e-6);
        assert!((u.norm() - 1.0).abs() < 1e-12);
        assert!(find_optimal_time(&sd, (1.0, 1.0), 0.05, 1e-6).is_err());
        assert!(find_optimal_time(&sd, (-1.0, 1.0), 0.05, 1e-6).is_err());
    }

    #[test]
    fn grid_scan_matches_direct_sum() {
        let modes = spectral(&ChainSpec::xx(vec![0.4, 1.0, 0.9, 1.0, 0.4], vec![0.1; 6]).unwrap()).transfer_modes();
        let grid = modes.abs_on_grid(3.0, 0.05, 500);
        for (j, v) in grid.iter().enumerate() {
            assert!((v - modes.amplitude(3.0 + 0.05 * j as f64).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoint_modes_match_full_decomposition() {
        let spec = ChainSpec::xx(vec![0.4, 1.0, 0.7, 1.0, 0.4], vec![0.0, 0.3, 0.0, 0.0, 0.3, 0.0]).unwrap();
        let t = build_tridiagonal(&spec).unwrap();
        let full = eigendecompose(&t).unwrap().transfer_modes();
        let fast = endpoint_modes(&t).unwrap();
        for k in 0..6 {
            assert!((full.frequencies[k] - fast.frequencies[k]).abs() < 1e-15);
            assert!((full.end_products[k] - fast.end_products[k]).abs() < 1e-15);
            assert!((full.first_weights[k] - fast.first_weights[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn mirror_symmetry() {
        assert!(mirror_symmetry_check(&ChainSpec::uniform(7).unwrap(), 1e-12));
        let sym = ChainSpec::xx(vec![0.5, 1.0, 1.0, 0.5], vec![0.0; 5]).unwrap();
        assert!(mirror_symmetry_check(&sym, 1e-12));
        let asym = ChainSpec::xx(vec![0.5, 1.0, 1.0, 1.0], vec![0.0; 5]).unwrap();
        assert!(!mirror_symmetry_check(&asym, 1e-12));
        let asym_field = ChainSpec::xx(vec![1.0; 4], vec![0.1, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(!mirror_symmetry_check(&asym_field, 1e-12));
    }

    #[test]
    fn parity() {
        // ascending order: the alternation offset follows the parity of N
        assert_eq!(parity_offset(&spectral(&ChainSpec::uniform(4).unwrap()), 1e-10), Some(0));
        assert_eq!(parity_offset(&spectral(&ChainSpec::uniform(5).unwrap()), 1e-10), Some(1));
        assert!(parity_check(&spectral(&ChainSpec::uniform(2).unwrap()), 1e-10));
        let asym = ChainSpec::xx(vec![1.0, 0.3, 1.0, 1.0], vec![0.0; 5]).unwrap();
        assert!(!parity_check(&spectral(&asym), 1e-6));
        // negative couplings reverse the ordering convention
        let neg = ChainSpec::xx(vec![-1.0; 4], vec![0.0; 5]).unwrap();
        assert!(parity_check(&spectral(&neg), 1e-10));
    }

    #[test]
    fn mode_density_uniform_three() {
        let d = mode_density(&spectral(&ChainSpec::uniform(3).unwrap()));
        for (x, e) in d.iter().zip([0.5, 1.0, 0.5]) {
            assert!((x - e).abs() < 1e-14);
        }
    }

    #[test]
    fn mode_sum_agrees_with_direct_sum() {
        let spec = ChainSpec::xx(vec![0.6, 1.0, 1.0, 1.0, 0.6], vec![0.0; 6]).unwrap();
        let sd = spectral(&spec);
        for t in [0.0, 1.3, 7.7, 42.0] {
            let a = transition_amplitude(&sd, t);
            let b = mode_sum_amplitude(&sd, t, 1e-10).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
        let neg = spectral(&ChainSpec::xx(vec![-1.0; 4], vec![0.0; 5]).unwrap());
        assert!((transition_amplitude(&neg, 2.0) - mode_sum_amplitude(&neg, 2.0, 1e-10).unwrap()).norm() < 1e-12);
    }
}
