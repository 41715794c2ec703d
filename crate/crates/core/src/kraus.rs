//! The end-to-end chain acts on the transferred qubit as an amplitude-damping
//! channel whose only parameter is the transition amplitude `u`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::density::{self, DensityMatrix, PHYSICAL_TOL};
use crate::error::{Error, Result};
use crate::manybody::operator::XyzChain;
use crate::manybody::propagate::ChainPropagator;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const CLAMP_TOL: f64 = 1e-12;
const COHERENCE_TOL: f64 = 1e-10;
const AMPLITUDE_TOL: f64 = 1e-9;

/// Largest chain accepted by [`brute_force_channel`].
pub const BRUTE_FORCE_MAX_SITES: usize = 12;
/// Largest total qubit count evolved with a dense matrix exponential.
pub const DENSE_EXP_QUBITS: usize = 9;

/// Two-qubit state with nonzero entries only on the diagonal and
/// anti-diagonal, in the basis `|00>, |01>, |10>, |11>`.
///
/// `rho14` is `<11|rho|00>` and `rho23` is `<01|rho|10>`: with this choice
/// both coherences pick up a factor `u` in the channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XState {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho14: Complex64,
    pub rho23: Complex64,
}

impl XState {
    /// Validates the populations and coherences. Populations in
    /// `[-1e-12, 0)` are clamped to zero and the state renormalized.
    pub fn new(rho11: f64, rho22: f64, rho33: f64, rho44: f64, rho14: Complex64, rho23: Complex64) -> Result<Self> {
        let mut pops = [rho11, rho22, rho33, rho44];
        if pops.iter().any(|p| !p.is_finite()) || !rho14.is_finite() || !rho23.is_finite() {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        if let Some(p) = pops.iter().find(|&&p| p < -CLAMP_TOL) {
            return Err(Error::InvalidState(format!("negative population {p:e}")));
        }
        let clamped = pops.iter().any(|&p| p < 0.0);
        pops.iter_mut().for_each(|p| *p = p.max(0.0));
        let sum: f64 = pops.iter().sum();
        if clamped {
            pops.iter_mut().for_each(|p| *p /= sum);
        } else if (sum - 1.0).abs() > CLAMP_TOL {
            return Err(Error::InvalidState(format!("populations sum to {sum}")));
        }
        let [rho11, rho22, rho33, rho44] = pops;
        if rho14.norm() > (rho11 * rho44).sqrt() + COHERENCE_TOL {
            return Err(Error::InvalidState(format!("|rho14| = {} exceeds sqrt(rho11 rho44)", rho14.norm())));
        }
        if rho23.norm() > (rho22 * rho33).sqrt() + COHERENCE_TOL {
            return Err(Error::InvalidState(format!("|rho23| = {} exceeds sqrt(rho22 rho33)", rho23.norm())));
        }
        Ok(XState { rho11, rho22, rho33, rho44, rho14, rho23 })
    }

    /// `(|00> + |11>) / sqrt(2)`.
    pub fn bell() -> Self {
        XState { rho11: 0.5, rho22: 0.0, rho33: 0.0, rho44: 0.5, rho14: Complex64::new(0.5, 0.0), rho23: ZERO }
    }

    /// `|00>`.
    pub fn ground() -> Self {
        XState { rho11: 1.0, rho22: 0.0, rho33: 0.0, rho44: 0.0, rho14: ZERO, rho23: ZERO }
    }

    /// Werner-like mixture `a |Bell><Bell| + (1 - a) I / 4`, `a` in `[-1/3, 1]`.
    pub fn werner(a: f64) -> Result<Self> {
        if !(-1.0 / 3.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameter(format!("Werner parameter {a} outside [-1/3, 1]")));
        }
        let p = (1.0 + a) / 4.0;
        let q = (1.0 - a) / 4.0;
        Ok(XState { rho11: p, rho22: q, rho33: q, rho44: p, rho14: Complex64::new(a / 2.0, 0.0), rho23: ZERO })
    }

    pub fn populations(&self) -> [f64; 4] {
        [self.rho11, self.rho22, self.rho33, self.rho44]
    }

    pub fn to_matrix(&self) -> DensityMatrix {
        let mut m = DensityMatrix::zeros();
        for (i, p) in self.populations().into_iter().enumerate() {
            m[(i, i)] = Complex64::new(p, 0.0);
        }
        m[(3, 0)] = self.rho14;
        m[(0, 3)] = self.rho14.conj();
        m[(1, 2)] = self.rho23;
        m[(2, 1)] = self.rho23.conj();
        m
    }

    /// Reads an X-form matrix; entries off the X pattern must be below `1e-10`.
    pub fn from_matrix(m: &DensityMatrix) -> Result<Self> {
        if !density::is_x_form(m, PHYSICAL_TOL) {
            return Err(Error::InvalidState("matrix is not of X form".into()));
        }
        density::validate(m, PHYSICAL_TOL)?;
        let tr = m.trace().re;
        let p = |i: usize| m[(i, i)].re / tr;
        let avg = |a: Complex64, b: Complex64| (a + b.conj()) / (2.0 * tr);
        XState::new(p(0), p(1), p(2), p(3), avg(m[(3, 0)], m[(0, 3)]), avg(m[(1, 2)], m[(2, 1)]))
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_deviation(&self, other: &XState) -> f64 {
        let pops = self.populations().into_iter().zip(other.populations()).map(|(a, b)| (a - b).abs());
        pops.chain([(self.rho14 - other.rho14).norm(), (self.rho23 - other.rho23).norm()]).fold(0.0, f64::max)
    }
}

/// The two Kraus operators of the channel acting on the second qubit:
/// `M0 = diag(1, u)`, `M1 = sqrt(1 - |u|^2) |0><1|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausPair {
    u: Complex64,
}

impl KrausPair {
    pub fn new(u: Complex64) -> Result<Self> {
        let u = checked_amplitude(u)?;
        Ok(KrausPair { u })
    }

    pub fn amplitude(&self) -> Complex64 {
        self.u
    }

    pub fn damping(&self) -> f64 {
        (1.0 - self.u.norm_sqr()).max(0.0).sqrt()
    }

    pub fn operators(&self) -> [Matrix2<Complex64>; 2] {
        let one = Complex64::new(1.0, 0.0);
        let m0 = Matrix2::new(one, ZERO, ZERO, self.u);
        let m1 = Matrix2::new(ZERO, Complex64::new(self.damping(), 0.0), ZERO, ZERO);
        [m0, m1]
    }

    /// `M0^dag M0 + M1^dag M1`, the identity for a trace-preserving channel.
    pub fn completeness(&self) -> Matrix2<Complex64> {
        self.operators().iter().map(|m| m.adjoint() * m).sum()
    }
}

fn checked_amplitude(u: Complex64) -> Result<Complex64> {
    let r = u.norm();
    if !r.is_finite() || r > 1.0 + AMPLITUDE_TOL {
        return Err(Error::AmplitudeOutOfRange(r));
    }
    Ok(if r > 1.0 { u / r } else { u })
}

/// Closed-form action of the channel on an X state.
pub fn propagate_xstate(rho: &XState, u: Complex64) -> Result<XState> {
    let u = checked_amplitude(u)?;
    let w = u.norm_sqr();
    let out = XState {
        rho11: rho.rho11 + (1.0 - w) * rho.rho22,
        rho22: w * rho.rho22,
        rho33: rho.rho33 + (1.0 - w) * rho.rho44,
        rho44: w * rho.rho44,
        rho14: u * rho.rho14,
        rho23: u * rho.rho23,
    };
    Ok(out)
}

/// `sum_i (1 x M_i) rho (1 x M_i)^dag` for an arbitrary two-qubit state.
pub fn kraus_apply_general(rho: &DensityMatrix, u: Complex64) -> Result<DensityMatrix> {
    density::validate(rho, PHYSICAL_TOL)?;
    let pair = KrausPair::new(u)?;
    let id = Matrix2::<Complex64>::identity();
    Ok(pair
        .operators()
        .iter()
        .map(|m| {
            let k = id.kronecker(m);
            k * rho * k.adjoint()
        })
        .sum())
}

/// Evolves the four states `|ab> x |0...0>` (pair on qubits 0 and 1) and
/// returns them as full state vectors over qubits `0..=N`.
fn evolve_pair_basis(spec: &ChainSpec, t: f64) -> Result<[Vec<Complex64>; 4]> {
    let n = spec.n_sites;
    let op = XyzChain::new(&spec.couplings, &spec.fields, spec.gamma, spec.delta)?;
    let chain_dim = 1usize << n;
    // chain part |b, 0, ..., 0> for b = 0, 1: site 1 is the top bit
    let chain_states: Vec<Vec<Complex64>> = if n + 1 <= DENSE_EXP_QUBITS {
        let h = op.to_dense()?.map(|x| Complex64::new(0.0, -x * t));
        let u: DMatrix<Complex64> = h.exp();
        [0usize, 1 << (n - 1)].iter().map(|&c| u.column(c).iter().copied().collect()).collect()
    } else {
        let prop = ChainPropagator::new(op, 1e-12)?;
        [0usize, 1 << (n - 1)]
            .iter()
            .map(|&c| {
                let mut v = vec![ZERO; chain_dim];
                v[c] = Complex64::new(1.0, 0.0);
                prop.propagate(&mut v, t).map(|_| v)
            })
            .collect::<Result<_>>()?
    };
    Ok(std::array::from_fn(|ab| {
        let (a, b) = (ab >> 1, ab & 1);
        let mut full = vec![ZERO; 2 * chain_dim];
        full[a * chain_dim..(a + 1) * chain_dim].copy_from_slice(&chain_states[b]);
        full
    }))
}

/// `Tr_{1..N-1} |x><y|` on qubits `(0, N)`.
pub(crate) fn reduced_outer(x: &[Complex64], y: &[Complex64]) -> DensityMatrix {
    let half = x.len() / 2;
    let mut out = DensityMatrix::zeros();
    for a in 0..2 {
        for ap in 0..2 {
            let xs = &x[a * half..(a + 1) * half];
            let ys = &y[ap * half..(ap + 1) * half];
            for mid in 0..half / 2 {
                for b in 0..2 {
                    let xv = xs[2 * mid + b];
                    if xv == ZERO {
                        continue;
                    }
                    for bp in 0..2 {
                        out[(2 * a + b, 2 * ap + bp)] += xv * ys[2 * mid + bp].conj();
                    }
                }
            }
        }
    }
    out
}

/// Reduced state of qubits `(0, N)` after exact evolution of all `N + 1`
/// qubits, with the pair on qubits `(0, 1)` in `rho` and the channel sites
/// `2..=N` in `|0...0>`.
pub fn brute_force_channel_matrix(spec: &ChainSpec, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    spec.validate()?;
    if spec.n_sites > BRUTE_FORCE_MAX_SITES {
        return Err(Error::SizeLimit { qubits: spec.n_sites + 1, limit: BRUTE_FORCE_MAX_SITES + 1 });
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time {t} is not finite")));
    }
    density::validate(rho, PHYSICAL_TOL)?;
    let states = evolve_pair_basis(spec, t)?;
    let mut out = DensityMatrix::zeros();
    for i in 0..4 {
        for j in 0..4 {
            if rho[(i, j)] != ZERO {
                out += reduced_outer(&states[i], &states[j]) * rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// [`brute_force_channel_matrix`] for X-state inputs and outputs.
pub fn brute_force_channel(spec: &ChainSpec, rho: &XState, t: f64) -> Result<XState> {
    XState::from_matrix(&brute_force_channel_matrix(spec, &rho.to_matrix(), t)?)
}
