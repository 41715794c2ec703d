//! Scenario documents. Every section rejects unknown keys.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spinlab::chain::ChainSpec;
use spinlab::correlations::{MeasuredSide, DEFAULT_DISCORD_GRID, DEFAULT_DISCORD_TOL};
use spinlab::kraus::XState;
use spinlab::manybody::{AnisotropyAxis, ChannelInit};
use spinlab::schemes::{
    end_bond_chain, scheme_barrier_fields, scheme_pst, scheme_uniform, scheme_weak_ends, DisorderModel, KnobBounds,
    ScalingQuantity, SchemeKind,
};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Amplitude,
    Spectrum,
    Transfer,
    Optimize,
    Scaling,
    Disorder,
    Manybody,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainConfig>,
    #[serde(default)]
    pub input_state: InputState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeConfig>,
    #[serde(default)]
    pub discord: DiscordConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manybody: Option<ManyBodyConfig>,
}

/// Either a named scheme with its size and knobs, or explicit couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub knobs: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputState {
    #[default]
    Bell,
    Werner(f64),
    X(XElements),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XElements {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    #[serde(default)]
    pub rho14_re: f64,
    #[serde(default)]
    pub rho14_im: f64,
    #[serde(default)]
    pub rho23_re: f64,
    #[serde(default)]
    pub rho23_im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub start: f64,
    pub end: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    1001
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscordConfig {
    pub grid: usize,
    pub tol: f64,
    pub side: MeasuredSide,
}

impl Default for DiscordConfig {
    fn default() -> Self {
        DiscordConfig { grid: DEFAULT_DISCORD_GRID, tol: DEFAULT_DISCORD_TOL, side: MeasuredSide::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into(), format: Format::Csv }
    }
}

/// Transfer sweeps: over the scheme's single knob, or over `|u|` directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knob_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_abs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default)]
    pub bounds: KnobBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub scheme: SchemeKind,
    pub sizes: Vec<usize>,
    pub quantity: ScalingQuantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderConfig {
    pub model: DisorderModel,
    pub strength: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManyBodyConfig {
    pub n: usize,
    pub axis: AnisotropyAxis,
    pub values: Vec<f64>,
    #[serde(default)]
    pub h: f64,
    #[serde(default = "all_inits")]
    pub inits: Vec<ChannelInit>,
    /// Value of the anisotropy parameter that is not swept.
    #[serde(default)]
    pub other: f64,
    #[serde(default = "default_coarse_step")]
    pub coarse_step: f64,
    #[serde(default = "default_propagation_tol")]
    pub propagation_tol: f64,
}

fn all_inits() -> Vec<ChannelInit> {
    ChannelInit::ALL.to_vec()
}

fn default_coarse_step() -> f64 {
    0.05
}

fn default_propagation_tol() -> f64 {
    1e-10
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| invalid(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked without running the pipeline.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != SCHEMA_VERSION {
            return Err(invalid(format!("unsupported config version {}, expected {SCHEMA_VERSION}", self.version)));
        }
        if self.output.dir.is_empty() {
            return Err(invalid("output directory is empty"));
        }
        if self.discord.grid < 2 || !(self.discord.tol > 0.0) {
            return Err(invalid("discord grid must be at least 2 and tol positive"));
        }
        self.input_xstate()?;
        if let Some(t) = &self.time {
            finite("time.start", t.start)?;
            finite("time.end", t.end)?;
            if t.start < 0.0 || t.start >= t.end {
                return Err(invalid(format!("time window [{}, {}] is empty or negative", t.start, t.end)));
            }
            if t.samples < 2 {
                return Err(invalid("time.samples must be at least 2"));
            }
        }
        match self.command {
            Command::Amplitude | Command::Spectrum => {
                self.chain_spec()?;
            }
            Command::Transfer => self.validate_transfer()?,
            Command::Optimize => {
                let c = self.chain_section()?;
                match c.scheme {
                    Some(SchemeKind::OptOneBond) | Some(SchemeKind::OptTwoBond) => {}
                    _ => return Err(invalid("optimize needs scheme opt_one_bond or opt_two_bond")),
                }
                let n = c.n.ok_or_else(|| invalid("optimize needs chain.n"))?;
                let min = if c.scheme == Some(SchemeKind::OptOneBond) { 4 } else { 6 };
                if n < min {
                    return Err(invalid(format!("chain.n = {n} is below {min}")));
                }
                if let Some(o) = &self.optimize {
                    let b = o.bounds;
                    if !(b.lo > 0.0 && b.lo < b.hi && b.hi <= 1.0) {
                        return Err(invalid(format!("knob bounds [{}, {}] must satisfy 0 < lo < hi <= 1", b.lo, b.hi)));
                    }
                }
            }
            Command::Scaling => {
                let s = self.scaling.as_ref().ok_or_else(|| invalid("scaling needs a scaling section"))?;
                if s.sizes.len() < 4 {
                    return Err(invalid("scaling needs at least 4 sizes"));
                }
                match s.scheme {
                    SchemeKind::WeakEnds | SchemeKind::BarrierFields => {
                        return Err(invalid("scaling supports uniform, pst, opt_one_bond and opt_two_bond"))
                    }
                    _ => {}
                }
                if s.sizes.iter().any(|&n| n < 6) {
                    return Err(invalid("scaling sizes must be at least 6"));
                }
            }
            Command::Disorder => {
                self.chain_spec()?;
                let d = self.disorder.as_ref().ok_or_else(|| invalid("disorder needs a disorder section"))?;
                finite("disorder.strength", d.strength)?;
                if d.strength < 0.0 || d.trials == 0 {
                    return Err(invalid("disorder needs strength >= 0 and at least one trial"));
                }
            }
            Command::Manybody => {
                let m = self.manybody.as_ref().ok_or_else(|| invalid("manybody needs a manybody section"))?;
                if m.n < 2 {
                    return Err(invalid(format!("manybody.n = {} is below 2", m.n)));
                }
                if m.values.is_empty() || m.inits.is_empty() {
                    return Err(invalid("manybody needs values and inits"));
                }
                for v in m.values.iter().chain([&m.h, &m.other]) {
                    finite("manybody parameter", *v)?;
                }
                if !(m.coarse_step > 0.0) || !(m.propagation_tol > 0.0) {
                    return Err(invalid("manybody coarse_step and propagation_tol must be positive"));
                }
            }
        }
        Ok(())
    }

    fn validate_transfer(&self) -> Result<(), CliError> {
        match self.sweep.as_ref() {
            Some(SweepConfig { u_abs: Some(us), knob_values: None }) => {
                if us.is_empty() || us.iter().any(|u| !(0.0..=1.0).contains(u)) {
                    return Err(invalid("sweep.u_abs must be a nonempty list in [0, 1]"));
                }
            }
            Some(SweepConfig { knob_values: Some(vs), u_abs: None }) => {
                let c = self.chain_section()?;
                let name = knob_name(c.scheme).ok_or_else(|| invalid("knob sweeps need scheme weak_ends or barrier_fields"))?;
                if vs.is_empty() {
                    return Err(invalid("sweep.knob_values is empty"));
                }
                for &v in vs {
                    let mut knobs = c.knobs.clone();
                    knobs.insert(name.into(), v);
                    build_scheme(c, &knobs)?;
                }
            }
            Some(_) => return Err(invalid("sweep needs exactly one of knob_values or u_abs")),
            None => {
                self.chain_spec()?;
            }
        }
        Ok(())
    }

    pub fn chain_section(&self) -> Result<&ChainConfig, CliError> {
        self.chain.as_ref().ok_or_else(|| invalid("config needs a chain section"))
    }

    pub fn chain_spec(&self) -> Result<ChainSpec, CliError> {
        let c = self.chain_section()?;
        build_scheme(c, &c.knobs)
    }

    pub fn input_xstate(&self) -> Result<XState, CliError> {
        let r = match self.input_state {
            InputState::Bell => Ok(XState::bell()),
            InputState::Werner(a) => XState::werner(a),
            InputState::X(x) => XState::new(
                x.rho11,
                x.rho22,
                x.rho33,
                x.rho44,
                num_complex::Complex64::new(x.rho14_re, x.rho14_im),
                num_complex::Complex64::new(x.rho23_re, x.rho23_im),
            ),
        };
        r.map_err(|e| invalid(format!("input state: {e}")))
    }
}

/// Knob swept by a transfer sweep for `scheme`.
pub fn knob_name(scheme: Option<SchemeKind>) -> Option<&'static str> {
    match scheme {
        Some(SchemeKind::WeakEnds) => Some("J1"),
        Some(SchemeKind::BarrierFields) => Some("dh"),
        _ => None,
    }
}

/// Chain of a config section; `knobs` overrides the section's own knobs.
pub fn build_scheme(c: &ChainConfig, knobs: &BTreeMap<String, f64>) -> Result<ChainSpec, CliError> {
    let knob = |name: &str| knobs.get(name).copied().ok_or_else(|| invalid(format!("scheme needs knob {name}")));
    let spec = match (c.scheme, &c.couplings, &c.fields) {
        (Some(kind), None, None) => {
            let n = c.n.ok_or_else(|| invalid("chain.n is required with a scheme"))?;
            if c.gamma != 0.0 || c.delta != 0.0 {
                return Err(invalid("named schemes are XX chains; gamma and delta must be 0"));
            }
            match kind {
                SchemeKind::Uniform => scheme_uniform(n),
                SchemeKind::Pst => scheme_pst(n),
                SchemeKind::WeakEnds => scheme_weak_ends(n, knob("J1")?),
                SchemeKind::BarrierFields => scheme_barrier_fields(n, knob("dh")?),
                SchemeKind::OptOneBond => end_bond_chain(n, &[knob("J1")?]),
                SchemeKind::OptTwoBond => end_bond_chain(n, &[knob("J1")?, knob("J2")?]),
            }
        }
        (None, Some(j), Some(h)) => {
            if c.n.is_some_and(|n| n != h.len()) {
                return Err(invalid("chain.n disagrees with the number of fields"));
            }
            ChainSpec::new(j.clone(), h.clone(), c.gamma, c.delta)
        }
        _ => return Err(invalid("chain needs either scheme and n, or couplings and fields")),
    };
    spec.map_err(|e| invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_transfer() {
        let cfg = ScenarioConfig::from_json(r#"{"version":1,"command":"transfer","chain":{"scheme":"uniform","n":20}}"#).unwrap();
        assert_eq!(cfg.input_state, InputState::Bell);
        assert_eq!(cfg.chain_spec().unwrap().n_sites, 20);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        for bad in [
            r#"{"version":1,"command":"transfer","chain":{"scheme":"uniform","n":20},"extra":1}"#,
            r#"{"version":1,"command":"transfer","chain":{"scheme":"uniform","n":-5}}"#,
            r#"{"version":2,"command":"transfer","chain":{"scheme":"uniform","n":20}}"#,
            r#"{"version":1,"command":"transfer","chain":{"scheme":"weak_ends","n":20}}"#,
            r#"{"version":1,"command":"transfer","input_state":{"werner":2.0},"sweep":{"u_abs":[0.5]}}"#,
            r#"{"version":1,"command":"optimize","chain":{"scheme":"uniform","n":20}}"#,
        ] {
            assert!(matches!(ScenarioConfig::from_json(bad), Err(CliError::Validation(_))), "{bad}");
        }
    }

    #[test]
    fn explicit_chain_and_x_input() {
        let cfg = ScenarioConfig::from_json(
            r#"{"version":1,"command":"amplitude","chain":{"couplings":[1,0.5],"fields":[0,0,0]},
                "input_state":{"x":{"rho11":0.5,"rho22":0,"rho33":0,"rho44":0.5,"rho14_re":0.5}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.chain_spec().unwrap().couplings, vec![1.0, 0.5]);
        assert_eq!(cfg.input_xstate().unwrap(), XState::bell());
    }

    #[test]
    fn echo_round_trips() {
        let cfg = ScenarioConfig::from_json(
            r#"{"version":1,"command":"disorder","chain":{"scheme":"pst","n":10},"disorder":{"model":"additive","strength":0.1,"trials":4}}"#,
        )
        .unwrap();
        let again = ScenarioConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
