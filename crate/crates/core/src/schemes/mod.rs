//! Channel-engineering schemes and their optimization.

pub mod disorder;
pub mod optimize;
pub mod rabi;
pub mod scaling;
pub mod spectrum;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{chain_modes, default_window, ChainSpec, DEFAULT_COARSE_STEP, DEFAULT_REFINE_TOL};
use crate::error::{Error, Result};

pub use disorder::{disorder_mc, DisorderModel, DisorderStats};
pub use optimize::{scheme_opt_one_bond, scheme_opt_two_bond, KnobBounds};
pub use rabi::{rabi_modes, rabi_time_estimate, RabiEstimate, RabiModes};
pub use scaling::{fit_power_law, scaling_study, ScalingFit, ScalingQuantity};
pub use spectrum::{endbond_spectrum_prediction, EndBondPrediction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Uniform,
    Pst,
    WeakEnds,
    BarrierFields,
    OptOneBond,
    OptTwoBond,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Uniform => "uniform",
            SchemeKind::Pst => "pst",
            SchemeKind::WeakEnds => "weak_ends",
            SchemeKind::BarrierFields => "barrier_fields",
            SchemeKind::OptOneBond => "opt_one_bond",
            SchemeKind::OptTwoBond => "opt_two_bond",
        }
    }
}

/// Outcome of evaluating or optimizing one scheme for a Bell-pair input, for
/// which the transferred concurrence equals `|u(t*)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub scheme: SchemeKind,
    pub n_sites: usize,
    pub knobs: BTreeMap<String, f64>,
    pub window: (f64, f64),
    pub t_star: f64,
    pub u_star: Complex64,
    pub concurrence: f64,
}

fn need_sites(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidChain(format!("need at least 2 sites, got {n}")));
    }
    Ok(())
}

pub fn scheme_uniform(n: usize) -> Result<ChainSpec> {
    ChainSpec::uniform(n)
}

/// Couplings `J_n = pi / (N + 1) sqrt(n (N - n))`.
pub fn scheme_pst(n: usize) -> Result<ChainSpec> {
    need_sites(n)?;
    let scale = std::f64::consts::PI / (n + 1) as f64;
    let couplings = (1..n).map(|i| scale * ((i * (n - i)) as f64).sqrt()).collect();
    ChainSpec::xx(couplings, vec![0.0; n])
}

/// First and last couplings set to `j1`, the rest 1.
pub fn scheme_weak_ends(n: usize, j1: f64) -> Result<ChainSpec> {
    need_sites(n)?;
    if !(j1 > 0.0 && j1 <= 1.0) {
        return Err(Error::InvalidParameter(format!("end coupling {j1} outside (0, 1]")));
    }
    end_bond_chain(n, &[j1])
}

/// Fields `dh` on the first and last site, uniform couplings.
pub fn scheme_barrier_fields(n: usize, dh: f64) -> Result<ChainSpec> {
    need_sites(n)?;
    if !(dh >= 0.0) || !dh.is_finite() {
        return Err(Error::InvalidParameter(format!("barrier field {dh} must be finite and non-negative")));
    }
    let mut fields = vec![0.0; n];
    fields[0] = dh;
    fields[n - 1] = dh;
    ChainSpec::xx(vec![1.0; n - 1], fields)
}

/// Uniform chain whose outermost couplings, from the ends inwards, are
/// `ends[0], ends[1], ...`, applied symmetrically.
pub fn end_bond_chain(n: usize, ends: &[f64]) -> Result<ChainSpec> {
    need_sites(n)?;
    let mut couplings = vec![1.0; n - 1];
    for (i, &j) in ends.iter().enumerate() {
        if i < n - 1 {
            couplings[i] = j;
            couplings[n - 2 - i] = j;
        }
    }
    ChainSpec::xx(couplings, vec![0.0; n])
}

/// Optimal transfer of a ballistic scheme in the default window.
pub fn evaluate_ballistic(spec: &ChainSpec, window: Option<(f64, f64)>) -> Result<(f64, Complex64, (f64, f64))> {
    let window = window.unwrap_or_else(|| default_window(spec.n_sites));
    let modes = chain_modes(spec)?;
    let (t, u) = modes.optimal_time(window, DEFAULT_COARSE_STEP, DEFAULT_REFINE_TOL)?;
    Ok((t, u, window))
}

pub(crate) fn scheme_result(scheme: SchemeKind, spec: &ChainSpec, knobs: &[(&str, f64)], t: f64, u: Complex64, window: (f64, f64)) -> SchemeResult {
    SchemeResult {
        scheme,
        n_sites: spec.n_sites,
        knobs: knobs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        window,
        t_star: t,
        u_star: u,
        concurrence: u.norm(),
    }
}

pub fn evaluate_uniform(n: usize) -> Result<SchemeResult> {
    let spec = scheme_uniform(n)?;
    let (t, u, w) = evaluate_ballistic(&spec, None)?;
    Ok(scheme_result(SchemeKind::Uniform, &spec, &[], t, u, w))
}

/// PST chain evaluated in a window around `N + 1`.
pub fn evaluate_pst(n: usize) -> Result<SchemeResult> {
    let spec = scheme_pst(n)?;
    let (t, u, w) = evaluate_ballistic(&spec, None)?;
    Ok(scheme_result(SchemeKind::Pst, &spec, &[], t, u, w))
}

pub fn evaluate_weak_ends(n: usize, j1: f64) -> Result<SchemeResult> {
    let spec = scheme_weak_ends(n, j1)?;
    let modes = rabi_modes(&spec)?;
    let (t, u, w) = modes.optimal_time()?;
    Ok(scheme_result(SchemeKind::WeakEnds, &spec, &[("J1", j1)], t, u, w))
}

pub fn evaluate_barrier_fields(n: usize, dh: f64) -> Result<SchemeResult> {
    let spec = scheme_barrier_fields(n, dh)?;
    let modes = rabi_modes(&spec)?;
    let (t, u, w) = modes.optimal_time()?;
    Ok(scheme_result(SchemeKind::BarrierFields, &spec, &[("dh", dh)], t, u, w))
}

/// Evaluates `kind` with its knobs (optimized for the `opt_*` schemes).
pub fn evaluate_scheme(kind: SchemeKind, n: usize, knob: Option<f64>) -> Result<SchemeResult> {
    let need = |name: &str| knob.ok_or_else(|| Error::InvalidParameter(format!("scheme needs a value for {name}")));
    match kind {
        SchemeKind::Uniform => evaluate_uniform(n),
        SchemeKind::Pst => evaluate_pst(n),
        SchemeKind::WeakEnds => evaluate_weak_ends(n, need("J1")?),
        SchemeKind::BarrierFields => evaluate_barrier_fields(n, need("dh")?),
        SchemeKind::OptOneBond => scheme_opt_one_bond(n, KnobBounds::default()),
        SchemeKind::OptTwoBond => scheme_opt_two_bond(n, KnobBounds::default()),
    }
}
