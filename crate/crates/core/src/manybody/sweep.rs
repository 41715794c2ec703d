//! Best attainable concurrence as a function of one anisotropy parameter.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{prepare_initial, reduced_density_mixture, ChannelInit, Evolver, ManyBodyState};
use crate::chain::ChainSpec;
use crate::correlations::concurrence_general;
use crate::error::{Error, Result};
use crate::kraus::XState;
use crate::optimize::golden_section_max;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnisotropyAxis {
    Gamma,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Time window; `None` means `[0, 4N]`.
    pub window: Option<(f64, f64)>,
    pub coarse_step: f64,
    pub refine_tol: f64,
    pub propagation_tol: f64,
    /// Value of the parameter that is not swept.
    pub other: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { window: None, coarse_step: 0.05, refine_tol: 1e-6, propagation_tol: 1e-10, other: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub init: ChannelInit,
    pub values: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub times: Vec<f64>,
    /// Ground-state initializations taken from a degenerate manifold.
    pub degenerate: Vec<bool>,
}

fn concurrence_at(ev: &Evolver, branches: &[(f64, ManyBodyState)], t: f64) -> Result<f64> {
    let evolved = branches.iter().map(|(w, s)| ev.evolve(s, t).map(|s| (*w, s))).collect::<Result<Vec<_>>>()?;
    concurrence_general(&reduced_density_mixture(&evolved))
}

/// Maximal concurrence of qubits `(0, N)` for a Bell pair over `window`, with
/// the time at which it is reached.
pub fn best_concurrence(spec: &ChainSpec, init: ChannelInit, opts: &SweepOptions) -> Result<(f64, f64, bool)> {
    let (lo, hi) = opts.window.unwrap_or((0.0, 4.0 * spec.n_sites as f64));
    if !(lo >= 0.0 && hi > lo) || !(opts.coarse_step > 0.0) {
        return Err(Error::InvalidGrid(format!("bad window [{lo}, {hi}] or step {}", opts.coarse_step)));
    }
    let prep = prepare_initial(spec, init, &XState::bell())?;
    let ev = Evolver::new(spec, opts.propagation_tol)?;
    let mut branches: Vec<(f64, ManyBodyState)> =
        prep.branches.iter().map(|(w, s)| ev.evolve(s, lo).map(|s| (*w, s))).collect::<Result<_>>()?;
    let steps = ((hi - lo) / opts.coarse_step).ceil() as usize;
    let dt = (hi - lo) / steps as f64;
    let mut best = (lo, concurrence_general(&reduced_density_mixture(&branches))?);
    for k in 1..=steps {
        for (_, s) in branches.iter_mut() {
            ev.evolve_in_place(s, dt)?;
        }
        let c = concurrence_general(&reduced_density_mixture(&branches))?;
        if c > best.1 {
            best = (lo + dt * k as f64, c);
        }
    }
    let a = (best.0 - dt).max(lo);
    let b = (best.0 + dt).min(hi);
    let start: Vec<(f64, ManyBodyState)> =
        prep.branches.iter().map(|(w, s)| ev.evolve(s, a).map(|s| (*w, s))).collect::<Result<_>>()?;
    let mut failure = None;
    let refined = golden_section_max(
        |t| match concurrence_at(&ev, &start, t - a) {
            Ok(c) => c,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        a,
        b,
        opts.refine_tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (t, c) = if refined.1 > best.1 { refined } else { best };
    Ok((c, t, prep.degenerate_ground))
}

/// One curve per initialization over `grid` values of `axis`, for a uniform
/// chain of `n_sites` with exchange 1 and field `h` on every site.
pub fn sweep_anisotropy(
    n_sites: usize,
    axis: AnisotropyAxis,
    grid: &[f64],
    h: f64,
    inits: &[ChannelInit],
    opts: &SweepOptions,
) -> Result<Vec<SweepCurve>> {
    if grid.is_empty() || inits.is_empty() {
        return Err(Error::InvalidGrid("empty anisotropy grid or initialization list".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..inits.len()).flat_map(|i| (0..grid.len()).map(move |g| (i, g))).collect();
    let results = jobs
        .par_iter()
        .map(|&(i, g)| {
            let (gamma, delta) = match axis {
                AnisotropyAxis::Gamma => (grid[g], opts.other),
                AnisotropyAxis::Delta => (opts.other, grid[g]),
            };
            let spec = ChainSpec::new(vec![1.0; n_sites.saturating_sub(1)], vec![h; n_sites], gamma, delta)?;
            best_concurrence(&spec, inits[i], opts)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(inits
        .iter()
        .enumerate()
        .map(|(i, &init)| {
            let rows = &results[i * grid.len()..(i + 1) * grid.len()];
            SweepCurve {
                init,
                values: grid.to_vec(),
                concurrence: rows.iter().map(|r| r.0).collect(),
                times: rows.iter().map(|r| r.1).collect(),
                degenerate: rows.iter().map(|r| r.2).collect(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sites_reach_full_concurrence() {
        let spec = ChainSpec::uniform(2).unwrap();
        let opts = SweepOptions { window: Some((0.0, 5.0)), ..SweepOptions::default() };
        let (c, t, _) = best_concurrence(&spec, ChannelInit::Ferromagnetic, &opts).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
        assert!((t - std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn curves_have_grid_shape() {
        let curves = sweep_anisotropy(
            4,
            AnisotropyAxis::Gamma,
            &[0.0, 0.5],
            0.0,
            &[ChannelInit::Ferromagnetic, ChannelInit::Neel],
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[1].init, ChannelInit::Neel);
        assert!(curves.iter().all(|c| c.concurrence.len() == 2));
    }
}
