//! End-bond optimization: the outer search runs over the couplings, the inner
//! one over the arrival time in the ballistic window.

use serde::{Deserialize, Serialize};

use super::{end_bond_chain, scheme_result, SchemeKind, SchemeResult};
use crate::chain::{chain_modes, default_window, DEFAULT_COARSE_STEP, DEFAULT_REFINE_TOL};
use crate::error::{Error, Result};
use crate::optimize::grid_then_golden_max;

/// Knob resolution of the outer search.
pub const KNOB_TOL: f64 = 1e-5;
/// Coordinate descent stops once neither knob moves by more than this.
pub const DESCENT_TOL: f64 = 1e-4;
const GRID_POINTS: usize = 20;
const MAX_ROUNDS: usize = 200;

/// Search interval for the end couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnobBounds {
    pub lo: f64,
    pub hi: f64,
}

impl Default for KnobBounds {
    fn default() -> Self {
        KnobBounds { lo: 0.02, hi: 1.0 }
    }
}

impl KnobBounds {
    fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi <= 1.0) {
            return Err(Error::InvalidParameter(format!("knob bounds [{}, {}] must satisfy 0 < lo < hi <= 1", self.lo, self.hi)));
        }
        Ok(())
    }
}

/// Best `|u|` over the default window for end couplings `ends`.
fn transfer(n: usize, ends: &[f64]) -> Result<(f64, num_complex::Complex64)> {
    let spec = end_bond_chain(n, ends)?;
    chain_modes(&spec)?.optimal_time(default_window(n), DEFAULT_COARSE_STEP, DEFAULT_REFINE_TOL)
}

/// Maximizes over one knob, surfacing the first evaluation error.
fn maximize<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let mut failure = None;
    let best = grid_then_golden_max(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        GRID_POINTS,
        KNOB_TOL,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

pub fn scheme_opt_one_bond(n: usize, bounds: KnobBounds) -> Result<SchemeResult> {
    bounds.validate()?;
    if n < 4 {
        return Err(Error::InvalidChain(format!("end-bond optimization needs at least 4 sites, got {n}")));
    }
    let (j1, _) = maximize(|j| transfer(n, &[j]).map(|(_, u)| u.norm()), bounds.lo, bounds.hi)?;
    let (t, u) = transfer(n, &[j1])?;
    let spec = end_bond_chain(n, &[j1])?;
    Ok(scheme_result(SchemeKind::OptOneBond, &spec, &[("J1", j1)], t, u, default_window(n)))
}

/// Coordinate descent over `(J1, J2)` with `J1 <= J2`, starting from the
/// one-bond optimum at `J2 = hi`.
pub fn scheme_opt_two_bond(n: usize, bounds: KnobBounds) -> Result<SchemeResult> {
    bounds.validate()?;
    if n < 6 {
        return Err(Error::InvalidChain(format!("two-bond optimization needs at least 6 sites, got {n}")));
    }
    let mut j2 = bounds.hi;
    let mut j1 = bounds.lo;
    for _ in 0..MAX_ROUNDS {
        let (n1, _) = maximize(|j| transfer(n, &[j, j2]).map(|(_, u)| u.norm()), bounds.lo, j2)?;
        let (n2, _) = maximize(|j| transfer(n, &[n1, j]).map(|(_, u)| u.norm()), n1, bounds.hi)?;
        let moved = (n1 - j1).abs().max((n2 - j2).abs());
        j1 = n1;
        j2 = n2;
        if moved < DESCENT_TOL {
            break;
        }
    }
    let (t, u) = transfer(n, &[j1, j2])?;
    let spec = end_bond_chain(n, &[j1, j2])?;
    Ok(scheme_result(SchemeKind::OptTwoBond, &spec, &[("J1", j1), ("J2", j2)], t, u, default_window(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_checked() {
        assert!(scheme_opt_one_bond(50, KnobBounds { lo: 0.5, hi: 0.4 }).is_err());
        assert!(scheme_opt_one_bond(50, KnobBounds { lo: 0.0, hi: 0.4 }).is_err());
        assert!(scheme_opt_two_bond(50, KnobBounds { lo: 0.1, hi: 1.2 }).is_err());
    }

    #[test]
    fn one_bond_beats_uniform_and_is_deterministic() {
        let a = scheme_opt_one_bond(60, KnobBounds::default()).unwrap();
        let b = scheme_opt_one_bond(60, KnobBounds::default()).unwrap();
        assert_eq!(a, b);
        let uniform = super::super::evaluate_uniform(60).unwrap();
        assert!(a.concurrence > uniform.concurrence + 0.1);
        assert!((a.u_star.norm() - a.concurrence).abs() < 1e-12);
    }

    #[test]
    fn two_bond_respects_ordering() {
        let r = scheme_opt_two_bond(60, KnobBounds::default()).unwrap();
        assert!(r.knobs["J1"] <= r.knobs["J2"]);
        let one = scheme_opt_one_bond(60, KnobBounds::default()).unwrap();
        assert!(r.concurrence >= one.concurrence - 1e-9);
    }
}
