//! Power-law fits `y = A N^b` by least squares on `ln y` against `ln N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate_scheme, SchemeKind, SchemeResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingQuantity {
    /// Transferred concurrence `C(t*)`.
    C,
    /// `t* - N`.
    TOffset,
    J1Opt,
    J2Opt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub n_values: Vec<usize>,
    pub values: Vec<f64>,
}

pub fn fit_power_law(ns: &[usize], values: &[f64]) -> Result<ScalingFit> {
    if ns.len() != values.len() {
        return Err(Error::InvalidParameter("sizes and values differ in length".into()));
    }
    if ns.len() < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 points for a scaling fit, got {}", ns.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidParameter(format!("cannot fit a power law through the value {v}")));
    }
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let len = x.len() as f64;
    let mx = x.iter().sum::<f64>() / len;
    let my = y.iter().sum::<f64>() / len;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("scaling fit needs distinct sizes".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(ScalingFit { exponent: slope, prefactor: intercept.exp(), r_squared, n_values: ns.to_vec(), values: values.to_vec() })
}

/// Reads `quantity` off a scheme result.
pub fn quantity_of(r: &SchemeResult, quantity: ScalingQuantity) -> Result<f64> {
    let knob = |name: &str| {
        r.knobs.get(name).copied().ok_or_else(|| Error::InvalidParameter(format!("scheme has no knob {name}")))
    };
    match quantity {
        ScalingQuantity::C => Ok(r.concurrence),
        ScalingQuantity::TOffset => Ok(r.t_star - r.n_sites as f64),
        ScalingQuantity::J1Opt => knob("J1"),
        ScalingQuantity::J2Opt => knob("J2"),
    }
}

/// Evaluates `scheme` at every size (in parallel) and fits `quantity`.
pub fn scaling_study(scheme: SchemeKind, ns: &[usize], quantity: ScalingQuantity) -> Result<(ScalingFit, Vec<SchemeResult>)> {
    if ns.len() < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 sizes, got {}", ns.len())));
    }
    let results = ns.par_iter().map(|&n| evaluate_scheme(scheme, n, None)).collect::<Result<Vec<_>>>()?;
    let values = results.iter().map(|r| quantity_of(r, quantity)).collect::<Result<Vec<_>>>()?;
    Ok((fit_power_law(ns, &values)?, results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let ns = [10, 20, 40, 80, 160];
        let ys: Vec<f64> = ns.iter().map(|&n| 1.35 * (n as f64).powf(-1.0 / 3.0)).collect();
        let fit = fit_power_law(&ns, &ys).unwrap();
        assert!((fit.exponent + 1.0 / 3.0).abs() < 1e-12);
        assert!((fit.prefactor - 1.35).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn needs_four_points() {
        assert!(fit_power_law(&[1, 2, 3], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_power_law(&[1, 2, 3, 4], &[1.0, 2.0, 0.0, 3.0]).is_err());
    }
}
