//! Static coupling disorder, one independent random stream per trial.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{chain_modes, ChainSpec, DEFAULT_COARSE_STEP, DEFAULT_REFINE_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderModel {
    /// `J_i (1 + R_i)` on every bond.
    Multiplicative,
    /// `J_i + dJ_i` on bonds `2..=N-2`.
    Additive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderStats {
    pub trials: usize,
    pub mean_c: f64,
    pub std_c: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub seed: u64,
    pub samples: Vec<f64>,
}

/// The disordered chain of one trial.
pub fn perturbed_chain(spec: &ChainSpec, model: DisorderModel, strength: f64, seed: u64, trial: u64) -> Result<ChainSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut out = spec.clone();
    let nb = out.couplings.len();
    match model {
        DisorderModel::Multiplicative => {
            for j in out.couplings.iter_mut() {
                *j *= 1.0 + rng.random_range(-strength..=strength);
            }
        }
        DisorderModel::Additive => {
            for i in 1..nb.saturating_sub(1) {
                out.couplings[i] += rng.random_range(-strength..=strength);
            }
        }
    }
    out.validate()?;
    Ok(out)
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Transferred concurrence of `trials` disordered copies of `spec`, each
/// optimized over `window`.
pub fn disorder_mc(
    spec: &ChainSpec,
    model: DisorderModel,
    strength: f64,
    trials: usize,
    seed: u64,
    window: (f64, f64),
) -> Result<DisorderStats> {
    if !(strength >= 0.0) || !strength.is_finite() {
        return Err(Error::InvalidParameter(format!("disorder strength {strength} must be finite and non-negative")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let samples = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let chain = perturbed_chain(spec, model, strength, seed, trial)?;
            let (_, u) = chain_modes(&chain)?.optimal_time(window, DEFAULT_COARSE_STEP, DEFAULT_REFINE_TOL)?;
            Ok(u.norm().min(1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 { samples.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(DisorderStats {
        trials,
        mean_c: mean,
        std_c: var.sqrt(),
        q05: quantile(&sorted, 0.05),
        q50: quantile(&sorted, 0.5),
        q95: quantile(&sorted, 0.95),
        seed,
        samples,
    })
}
