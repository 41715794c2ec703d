//! Dispatch from a validated scenario to the core pipelines.

use num_complex::Complex64;
use serde_json::{json, Value};
use spinlab::chain::{amplitude_series, build_tridiagonal, chain_modes, default_window, eigendecompose, ChainSpec};
use spinlab::correlations::{concurrence_x, discord, eof_from_concurrence, RESCALE_FLOOR};
use spinlab::kraus::{propagate_xstate, XState};
use spinlab::manybody::{sweep_anisotropy, SweepOptions};
use spinlab::schemes::{
    disorder_mc, endbond_spectrum_prediction, rabi_modes, scaling::quantity_of, scaling_study, scheme_opt_one_bond,
    scheme_opt_two_bond, KnobBounds, SchemeKind,
};

use crate::config::{build_scheme, knob_name, Command, DiscordConfig, ScenarioConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Results payload plus the rows destined for the CSV file.
pub struct Outcome {
    pub results: Value,
    pub table: Table,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Amplitude => amplitude(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Transfer => transfer(cfg),
        Command::Optimize => optimize(cfg),
        Command::Scaling => scaling(cfg),
        Command::Disorder => disorder(cfg),
        Command::Manybody => manybody(cfg),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize")
}

fn amplitude(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let spec = cfg.chain_spec()?;
    let (start, end, samples) = match cfg.time {
        Some(t) => (t.start, t.end, t.samples),
        None => (0.0, default_window(spec.n_sites).1, 1001),
    };
    let sd = eigendecompose(&build_tridiagonal(&spec)?)?;
    let series = amplitude_series(&sd, start, end, samples)?;
    let mut table = Table::new(&["t", "re_u", "im_u", "abs_u"]);
    let mut best = (start, 0.0);
    for (&t, u) in series.times.iter().zip(&series.values) {
        table.push(vec![t.into(), u.re.into(), u.im.into(), u.norm().into()]);
        if u.norm() > best.1 {
            best = (t, u.norm());
        }
    }
    let results = json!({ "n_sites": spec.n_sites, "samples": samples, "t_max_sample": best.0, "abs_u_max_sample": best.1 });
    Ok(Outcome { results, table })
}

fn spectrum(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let spec = cfg.chain_spec()?;
    let modes = chain_modes(&spec)?;
    let chain = cfg.chain_section()?;
    let end_bond = match chain.scheme {
        Some(SchemeKind::WeakEnds) | Some(SchemeKind::OptOneBond) => chain.knobs.get("J1").copied(),
        Some(SchemeKind::Uniform) => Some(1.0),
        _ => None,
    };
    let prediction = end_bond.map(|j1| endbond_spectrum_prediction(spec.n_sites, j1)).transpose()?;
    let mut columns = vec!["index", "omega", "weight", "end_product"];
    if prediction.is_some() {
        columns.extend(["predicted_omega", "predicted_weight"]);
    }
    let mut table = Table::new(&columns);
    // Predicted modes come ascending in k, i.e. descending in energy.
    let predicted: Option<Vec<(f64, f64)>> = prediction.as_ref().map(|p| {
        let mut v: Vec<(f64, f64)> = p.frequencies.iter().copied().zip(p.weights.iter().copied()).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    });
    for k in 0..modes.frequencies.len() {
        let mut row: Vec<Cell> =
            vec![k.into(), modes.frequencies[k].into(), modes.first_weights[k].into(), modes.end_products[k].into()];
        if let Some(p) = &predicted {
            row.push(p[k].0.into());
            row.push(p[k].1.into());
        }
        table.push(row);
    }
    let mut results = json!({ "n_sites": spec.n_sites });
    if let Some(p) = &prediction {
        let (dw, dp) = p.max_deviation(&modes);
        results["prediction"] = json!({ "delta": p.delta, "max_omega_deviation": dw, "max_weight_deviation": dp });
    }
    Ok(Outcome { results, table })
}

struct Correlations {
    c: f64,
    e: f64,
    d: f64,
    e_tilde: Option<f64>,
    d_tilde: Option<f64>,
}

fn correlations(input: &XState, u: Complex64, dc: &DiscordConfig) -> Result<Correlations, CliError> {
    let out = propagate_xstate(input, u)?;
    let d = discord(&out.to_matrix(), dc.side, dc.grid, dc.tol)?;
    let d_in = discord(&input.to_matrix(), dc.side, dc.grid, dc.tol)?;
    let c = concurrence_x(&out);
    let e = eof_from_concurrence(c);
    let e_in = eof_from_concurrence(concurrence_x(input));
    let ratio = |x: f64, base: f64| (base >= RESCALE_FLOOR).then(|| x / base);
    Ok(Correlations { c, e, d, e_tilde: ratio(e, e_in), d_tilde: ratio(d, d_in) })
}

/// Optimal arrival for a chain: the Rabi analysis for the weak-end and
/// barrier schemes, the ballistic window otherwise.
fn optimal_transfer(cfg: &ScenarioConfig, scheme: Option<SchemeKind>, spec: &ChainSpec) -> Result<(f64, Complex64), CliError> {
    if matches!(scheme, Some(SchemeKind::WeakEnds) | Some(SchemeKind::BarrierFields)) && cfg.time.is_none() {
        let (t, u, _) = rabi_modes(spec)?.optimal_time()?;
        return Ok((t, u));
    }
    let window = cfg.time.map_or_else(|| default_window(spec.n_sites), |t| (t.start, t.end));
    Ok(chain_modes(spec)?.optimal_time(window, 0.05, 1e-6)?)
}

fn correlation_cells(c: &Correlations) -> Vec<Cell> {
    vec![c.c.into(), c.e.into(), c.d.into(), c.e_tilde.into(), c.d_tilde.into()]
}

fn transfer(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let input = cfg.input_xstate()?;
    let dc = &cfg.discord;
    let corr_cols = ["C", "E", "D", "E_tilde", "D_tilde"];
    if let Some(us) = cfg.sweep.as_ref().and_then(|s| s.u_abs.as_ref()) {
        let mut table = Table::new(&[&["u_abs"][..], &corr_cols].concat());
        for &u in us {
            let c = correlations(&input, Complex64::new(u, 0.0), dc)?;
            table.push([vec![u.into()], correlation_cells(&c)].concat());
        }
        let results = json!({ "input_state": to_value(&input), "points": us.len() });
        return Ok(Outcome { results, table });
    }
    let chain = cfg.chain_section()?;
    if let Some(values) = cfg.sweep.as_ref().and_then(|s| s.knob_values.as_ref()) {
        let name = knob_name(chain.scheme).expect("checked by validation");
        let mut table = Table::new(&[&["knob", "t_star", "abs_u"][..], &corr_cols].concat());
        for &v in values {
            let mut knobs = chain.knobs.clone();
            knobs.insert(name.into(), v);
            let spec = build_scheme(chain, &knobs)?;
            let (t, u) = optimal_transfer(cfg, chain.scheme, &spec)?;
            let c = correlations(&input, u, dc)?;
            table.push([vec![v.into(), t.into(), u.norm().into()], correlation_cells(&c)].concat());
        }
        let results = json!({ "knob": name, "n_sites": chain.n, "points": values.len() });
        return Ok(Outcome { results, table });
    }
    let spec = cfg.chain_spec()?;
    let (t, u) = optimal_transfer(cfg, chain.scheme, &spec)?;
    let c = correlations(&input, u, dc)?;
    let mut table = Table::new(&[&["t_star", "abs_u"][..], &corr_cols].concat());
    table.push([vec![t.into(), u.norm().into()], correlation_cells(&c)].concat());
    let results = json!({
        "n_sites": spec.n_sites,
        "t_star": t,
        "u_star": [u.re, u.im],
        "concurrence": c.c,
        "entanglement_of_formation": c.e,
        "discord": c.d,
        "rescaled_eof": c.e_tilde,
        "rescaled_discord": c.d_tilde,
        "measured_side": to_value(&dc.side),
    });
    Ok(Outcome { results, table })
}

fn optimize(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let chain = cfg.chain_section()?;
    let n = chain.n.expect("checked by validation");
    let bounds = cfg.optimize.map_or_else(KnobBounds::default, |o| o.bounds);
    let r = match chain.scheme {
        Some(SchemeKind::OptOneBond) => scheme_opt_one_bond(n, bounds)?,
        _ => scheme_opt_two_bond(n, bounds)?,
    };
    let mut table = Table::new(&["n", "J1", "J2", "t_star", "C"]);
    table.push(vec![
        r.n_sites.into(),
        r.knobs.get("J1").copied().into(),
        r.knobs.get("J2").copied().into(),
        r.t_star.into(),
        r.concurrence.into(),
    ]);
    Ok(Outcome { results: json!({ "bounds": to_value(&bounds), "result": to_value(&r) }), table })
}

fn scaling(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let s = cfg.scaling.as_ref().expect("checked by validation");
    let (fit, results) = scaling_study(s.scheme, &s.sizes, s.quantity)?;
    let mut table = Table::new(&["n", "value", "t_star", "C"]);
    for r in &results {
        table.push(vec![r.n_sites.into(), quantity_of(r, s.quantity)?.into(), r.t_star.into(), r.concurrence.into()]);
    }
    let payload = json!({
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "r_squared": fit.r_squared,
        "quantity": to_value(&s.quantity),
        "scheme": s.scheme.name(),
        "results": to_value(&results),
    });
    Ok(Outcome { results: payload, table })
}

fn disorder(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let spec = cfg.chain_spec()?;
    let d = cfg.disorder.expect("checked by validation");
    let window = cfg.time.map_or_else(|| default_window(spec.n_sites), |t| (t.start, t.end));
    let stats = disorder_mc(&spec, d.model, d.strength, d.trials, cfg.seed, window)?;
    let mut table = Table::new(&["trial", "C"]);
    for (i, &c) in stats.samples.iter().enumerate() {
        table.push(vec![i.into(), c.into()]);
    }
    let payload = json!({
        "trials": stats.trials,
        "mean_c": stats.mean_c,
        "std_c": stats.std_c,
        "q05": stats.q05,
        "q50": stats.q50,
        "q95": stats.q95,
        "seed": stats.seed,
        "window": [window.0, window.1],
    });
    Ok(Outcome { results: payload, table })
}

fn manybody(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let m = cfg.manybody.as_ref().expect("checked by validation");
    let opts = SweepOptions {
        window: cfg.time.map(|t| (t.start, t.end)),
        coarse_step: m.coarse_step,
        propagation_tol: m.propagation_tol,
        other: m.other,
        ..SweepOptions::default()
    };
    let curves = sweep_anisotropy(m.n, m.axis, &m.values, m.h, &m.inits, &opts)?;
    let mut table = Table::new(&["init", "value", "C", "t_star", "degenerate"]);
    for curve in &curves {
        for i in 0..curve.values.len() {
            table.push(vec![
                curve.init.name().into(),
                curve.values[i].into(),
                curve.concurrence[i].into(),
                curve.times[i].into(),
                curve.degenerate[i].into(),
            ]);
        }
    }
    let window = opts.window.unwrap_or((0.0, 4.0 * m.n as f64));
    Ok(Outcome { results: json!({ "n_sites": m.n, "axis": to_value(&m.axis), "window": [window.0, window.1] }), table })
}
