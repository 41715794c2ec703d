//! Closed-form spectrum of a uniform chain whose two end bonds are `J1`:
//! phase-shifted wave numbers and end weights of the modes.

use serde::{Deserialize, Serialize};

use crate::chain::TransferModes;
use crate::error::{Error, Result};

const DAMPING: f64 = 0.5;
const FIXED_POINT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 500;
const DERIVATIVE_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndBondPrediction {
    /// `k_n` for `n = 1..=N` (ascending in `k`, so descending in energy).
    pub wave_numbers: Vec<f64>,
    /// `cos k_n`.
    pub frequencies: Vec<f64>,
    /// Predicted `U_k1^2`.
    pub weights: Vec<f64>,
    pub delta: f64,
}

/// `arccot` with range `(0, pi)`, continuous through `x = 0`.
fn acot(x: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 - x.atan()
}

fn phase_shift(k: f64, delta: f64) -> f64 {
    k - acot(1.0 / (k.tan() * delta))
}

pub fn endbond_spectrum_prediction(n: usize, j1: f64) -> Result<EndBondPrediction> {
    if n < 2 {
        return Err(Error::InvalidChain(format!("need at least 2 sites, got {n}")));
    }
    if !(j1 > 0.0 && j1 <= 1.0) {
        return Err(Error::InvalidParameter(format!("end coupling {j1} outside (0, 1]")));
    }
    let delta = j1 * j1 / (2.0 - j1 * j1);
    let np1 = (n + 1) as f64;
    let mut ks = Vec::with_capacity(n);
    for i in 1..=n {
        let base = i as f64 * std::f64::consts::PI;
        let mut k = base / np1;
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let target = (base + 2.0 * phase_shift(k, delta)) / np1;
            let next = (1.0 - DAMPING) * k + DAMPING * target;
            let change = (next - k).abs();
            k = next;
            if change < FIXED_POINT_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ModeNoConvergence { index: i });
        }
        ks.push(k);
    }
    let weights = ks
        .iter()
        .map(|&k| {
            let dphi = (phase_shift(k + DERIVATIVE_STEP, delta) - phase_shift(k - DERIVATIVE_STEP, delta)) / (2.0 * DERIVATIVE_STEP);
            let cot = 1.0 / k.tan();
            delta * (1.0 + delta) / ((np1 - 2.0 * dphi) * (delta * delta + cot * cot))
        })
        .collect();
    Ok(EndBondPrediction { frequencies: ks.iter().map(|k| k.cos()).collect(), wave_numbers: ks, weights, delta })
}

impl EndBondPrediction {
    /// Largest deviations of frequencies and weights from a numerical
    /// spectrum, matching modes by energy order.
    pub fn max_deviation(&self, modes: &TransferModes) -> (f64, f64) {
        let mut pred: Vec<(f64, f64)> = self.frequencies.iter().copied().zip(self.weights.iter().copied()).collect();
        pred.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut num: Vec<(f64, f64)> =
            modes.frequencies.iter().copied().zip(modes.first_weights.iter().copied()).collect();
        num.sort_by(|a, b| a.0.total_cmp(&b.0));
        pred.iter().zip(&num).fold((0.0f64, 0.0f64), |(dw, dp), (p, q)| (dw.max((p.0 - q.0).abs()), dp.max((p.1 - q.1).abs())))
    }
}
