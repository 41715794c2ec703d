//! Entanglement and discord of two-qubit states. Entropies are in bits.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{self, entropy_2x2, DensityMatrix, PHYSICAL_TOL};
use crate::error::{Error, Result};
use crate::kraus::{propagate_xstate, XState};

pub const DEFAULT_DISCORD_GRID: usize = 24;
pub const DEFAULT_DISCORD_TOL: f64 = 1e-9;
/// Input correlations below this leave the rescaled figures undefined.
pub const RESCALE_FLOOR: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which qubit the discord measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasuredSide {
    Qubit0,
    #[default]
    QubitN,
}

/// `2 max(0, |rho23| - sqrt(rho11 rho44), |rho14| - sqrt(rho22 rho33))`.
pub fn concurrence_x(rho: &XState) -> f64 {
    let a = rho.rho23.norm() - (rho.rho11 * rho.rho44).max(0.0).sqrt();
    let b = rho.rho14.norm() - (rho.rho22 * rho.rho33).max(0.0).sqrt();
    (2.0 * a.max(b)).clamp(0.0, 1.0)
}

fn hermitian_sqrt(rho: &DensityMatrix) -> DensityMatrix {
    let eig = SymmetricEigen::new((rho + rho.adjoint()) * Complex64::new(0.5, 0.0));
    let v = &eig.eigenvectors;
    let d = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)));
    v * d * v.adjoint()
}

/// Spin-flip concurrence `max(0, l1 - l2 - l3 - l4)`, with `l_i^2` the
/// eigenvalues of `sqrt(rho) (sy x sy) rho* (sy x sy) sqrt(rho)`.
pub fn concurrence_general(rho: &DensityMatrix) -> Result<f64> {
    density::validate(rho, PHYSICAL_TOL)?;
    let mut flip = Matrix4::<Complex64>::zeros();
    // sy x sy has entries -1 on (0,3),(3,0) and +1 on (1,2),(2,1)
    flip[(0, 3)] = Complex64::new(-1.0, 0.0);
    flip[(3, 0)] = Complex64::new(-1.0, 0.0);
    flip[(1, 2)] = Complex64::new(1.0, 0.0);
    flip[(2, 1)] = Complex64::new(1.0, 0.0);
    let tilde = flip * rho.conjugate() * flip;
    let s = hermitian_sqrt(rho);
    let r = s * tilde * s;
    let herm = (r + r.adjoint()) * Complex64::new(0.5, 0.0);
    let mut l: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().map(|x| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

fn binary_entropy(p: f64) -> f64 {
    density::shannon_bits([p, 1.0 - p])
}

/// Entanglement of formation as a function of the concurrence.
pub fn eof_from_concurrence(c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    let c = c.min(1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

pub fn eof(rho: &DensityMatrix) -> Result<f64> {
    concurrence_general(rho).map(eof_from_concurrence)
}

/// Average entropy of the unmeasured qubit after a projective measurement
/// along the Bloch direction `(theta, phi)` on `side`.
fn conditional_entropy(rho: &DensityMatrix, side: MeasuredSide, theta: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let n = Complex64::from_polar(st, -phi);
    // projectors (1 +/- n.sigma) / 2
    let proj = |sign: f64| {
        Matrix2::new(
            Complex64::new(0.5 * (1.0 + sign * ct), 0.0),
            n * (0.5 * sign),
            n.conj() * (0.5 * sign),
            Complex64::new(0.5 * (1.0 - sign * ct), 0.0),
        )
    };
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let p = proj(sign);
        // unnormalized conditional state of the other qubit: Tr_meas[(P x 1 or 1 x P) rho]
        let cond = Matrix2::from_fn(|i, j| {
            let mut acc = ZERO;
            for a in 0..2 {
                for b in 0..2 {
                    acc += match side {
                        MeasuredSide::QubitN => p[(b, a)] * rho[(2 * i + a, 2 * j + b)],
                        MeasuredSide::Qubit0 => p[(b, a)] * rho[(2 * a + i, 2 * b + j)],
                    };
                }
            }
            acc
        });
        let prob = (cond[(0, 0)] + cond[(1, 1)]).re;
        if prob > 1e-300 {
            total += prob * entropy_2x2(&(cond / Complex64::new(prob, 0.0)));
        }
    }
    total
}

/// Quantum discord with rank-one projective measurements on `side`: a
/// `grid x 2 grid` scan of the Bloch sphere followed by compass search down
/// to step `refine_tol`.
pub fn discord(rho: &DensityMatrix, side: MeasuredSide, grid: usize, refine_tol: f64) -> Result<f64> {
    density::validate(rho, PHYSICAL_TOL)?;
    if grid < 2 {
        return Err(Error::InvalidGrid(format!("discord grid needs at least 2 points, got {grid}")));
    }
    if !(refine_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("refine tolerance {refine_tol} must be positive")));
    }
    let measured = match side {
        MeasuredSide::Qubit0 => density::reduce_first(rho),
        MeasuredSide::QubitN => density::reduce_second(rho),
    };
    let dtheta = std::f64::consts::PI / (grid - 1) as f64;
    let dphi = std::f64::consts::PI / grid as f64;
    let f = |theta: f64, phi: f64| conditional_entropy(rho, side, theta, phi);
    let (best_idx, best_val) = (0..grid * 2 * grid)
        .into_par_iter()
        .map(|k| (k, f(dtheta * (k / (2 * grid)) as f64, dphi * (k % (2 * grid)) as f64)))
        .reduce(|| (usize::MAX, f64::INFINITY), |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
    let mut theta = dtheta * (best_idx / (2 * grid)) as f64;
    let mut phi = dphi * (best_idx % (2 * grid)) as f64;
    let mut value = best_val;
    let mut step = dtheta;
    while step > refine_tol {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = f(theta + dt, phi + dp);
            if v < value {
                value = v;
                theta += dt;
                phi += dp;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    let d = entropy_2x2(&measured) - density::von_neumann_entropy(rho) + value;
    Ok(d.max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub concurrence: f64,
    pub entanglement_of_formation: f64,
    pub discord: f64,
    /// `E_out / E_in`; `None` when the input has no entanglement.
    pub rescaled_eof: Option<f64>,
    /// `D_out / D_in`; `None` when the input has no discord.
    pub rescaled_discord: Option<f64>,
    pub measured_side: MeasuredSide,
}

/// Werner-like input family parameter, `a` in `[-1/3, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WernerParams {
    a: f64,
}

impl WernerParams {
    pub fn new(a: f64) -> Result<Self> {
        XState::werner(a)?;
        Ok(WernerParams { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn state(&self) -> XState {
        XState::werner(self.a).expect("validated on construction")
    }
}

/// Correlations of the state received through a channel of amplitude `u`.
pub fn transfer_report(rho_in: &XState, u: Complex64, side: MeasuredSide) -> Result<CorrelationReport> {
    let out = propagate_xstate(rho_in, u)?;
    let m_in = rho_in.to_matrix();
    let m_out = out.to_matrix();
    let c = concurrence_x(&out);
    let e = eof_from_concurrence(c);
    let d = discord(&m_out, side, DEFAULT_DISCORD_GRID, DEFAULT_DISCORD_TOL)?;
    let e_in = eof_from_concurrence(concurrence_x(rho_in));
    let d_in = discord(&m_in, side, DEFAULT_DISCORD_GRID, DEFAULT_DISCORD_TOL)?;
    let ratio = |x: f64, base: f64| (base >= RESCALE_FLOOR).then(|| x / base);
    Ok(CorrelationReport {
        concurrence: c,
        entanglement_of_formation: e,
        discord: d,
        rescaled_eof: ratio(e, e_in),
        rescaled_discord: ratio(d, d_in),
        measured_side: side,
    })
}
