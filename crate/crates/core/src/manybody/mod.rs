//! Exact dynamics of the full `N + 1` qubit system for anisotropic chains.
//!
//! Qubit `q` is stored in bit `N - q` of the basis index, so qubit 0 is the
//! most significant bit and the last chain site the least significant one.
//! Qubit 0 never couples to the chain, so every evolution splits into two
//! independent chain-sized problems.

pub mod ground;
pub mod operator;
pub(crate) mod propagate;
pub mod sweep;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::kraus::{reduced_outer, XState};
pub use ground::{ground_state, GroundState};
pub use operator::{XyzChain, MAX_DENSE_QUBITS, MAX_MATRIX_FREE_QUBITS};
use propagate::ChainPropagator;
pub use sweep::{best_concurrence, sweep_anisotropy, AnisotropyAxis, SweepCurve, SweepOptions};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const NORM_TOL: f64 = 1e-10;

/// Full Hamiltonian on qubits `0..=N` as a matrix-vector product.
#[derive(Debug, Clone)]
pub struct ManyBodyHamiltonian {
    chain: XyzChain,
}

pub fn build_manybody_hamiltonian(spec: &ChainSpec) -> Result<ManyBodyHamiltonian> {
    spec.validate()?;
    if spec.n_sites + 1 > MAX_MATRIX_FREE_QUBITS {
        return Err(Error::SizeLimit { qubits: spec.n_sites + 1, limit: MAX_MATRIX_FREE_QUBITS });
    }
    Ok(ManyBodyHamiltonian { chain: XyzChain::new(&spec.couplings, &spec.fields, spec.gamma, spec.delta)? })
}

impl ManyBodyHamiltonian {
    pub fn n_qubits(&self) -> usize {
        self.chain.sites() + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.chain.dim()
    }

    pub fn chain(&self) -> &XyzChain {
        &self.chain
    }

    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let half = self.chain.dim();
        let (x0, x1) = x.split_at(half);
        let (y0, y1) = y.split_at_mut(half);
        self.chain.apply(x0, y0);
        self.chain.apply(x1, y1);
    }

    pub fn to_dense(&self) -> Result<nalgebra::DMatrix<f64>> {
        if self.n_qubits() > MAX_DENSE_QUBITS {
            return Err(Error::SizeLimit { qubits: self.n_qubits(), limit: MAX_DENSE_QUBITS });
        }
        let block = self.chain.to_dense()?;
        let half = block.nrows();
        let mut m = nalgebra::DMatrix::zeros(2 * half, 2 * half);
        m.view_mut((0, 0), (half, half)).copy_from(&block);
        m.view_mut((half, half), (half, half)).copy_from(&block);
        Ok(m)
    }

    /// Total `Sz` of qubits `1..=N` for a basis index.
    pub fn chain_magnetization(&self, s: usize) -> f64 {
        self.chain.magnetization(s % self.chain.dim())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    pub n_sites: usize,
    pub amplitudes: Vec<Complex64>,
}

impl ManyBodyState {
    pub fn new(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << (n_sites + 1) {
            return Err(Error::InvalidState(format!("{} amplitudes for {} qubits", amplitudes.len(), n_sites + 1)));
        }
        let state = ManyBodyState { n_sites, amplitudes };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm is {norm}")));
        }
        Ok(state)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &ManyBodyState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn expectation(&self, h: &ManyBodyHamiltonian) -> f64 {
        let mut y = vec![ZERO; self.amplitudes.len()];
        h.apply(&self.amplitudes, &mut y);
        self.amplitudes.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `<sum_{i>=1} Sz_i>`.
    pub fn chain_magnetization(&self) -> f64 {
        let half = self.amplitudes.len() / 2;
        let sites = self.n_sites as f64;
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(s, z)| z.norm_sqr() * (((s % half).count_ones()) as f64 - sites / 2.0))
            .sum()
    }
}

/// Configuration of channel sites `2..=N` before the transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelInit {
    Ferromagnetic,
    Neel,
    Ground,
}

impl ChannelInit {
    pub const ALL: [ChannelInit; 3] = [ChannelInit::Ferromagnetic, ChannelInit::Neel, ChannelInit::Ground];

    pub fn name(&self) -> &'static str {
        match self {
            ChannelInit::Ferromagnetic => "ferromagnetic",
            ChannelInit::Neel => "neel",
            ChannelInit::Ground => "ground",
        }
    }
}

/// Mixed initial state as weighted pure branches.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub branches: Vec<(f64, ManyBodyState)>,
    /// Set when the channel ground state was picked out of a degenerate manifold.
    pub degenerate_ground: bool,
}

/// Channel part on sites `2..=N` as a real vector over `2^(N-1)` states.
fn channel_vector(spec: &ChainSpec, init: ChannelInit) -> Result<(Vec<f64>, bool)> {
    let len = spec.n_sites - 1;
    let dim = 1usize << len;
    match init {
        ChannelInit::Ferromagnetic => {
            let mut v = vec![0.0; dim];
            v[0] = 1.0;
            Ok((v, false))
        }
        ChannelInit::Neel => {
            // |0101...>: site 2 down, site 3 up, ...
            let idx = (0..len).filter(|i| i % 2 == 1).fold(0usize, |acc, i| acc | (1 << (len - 1 - i)));
            let mut v = vec![0.0; dim];
            v[idx] = 1.0;
            Ok((v, false))
        }
        ChannelInit::Ground => {
            let sub = XyzChain::new(&spec.couplings[1..], &spec.fields[1..], spec.gamma, spec.delta)?;
            let g = ground_state(&sub)?;
            let degenerate = g.is_degenerate();
            Ok((g.vector, degenerate))
        }
    }
}

/// Pure-state decomposition of an X state into at most four branches: each
/// 2x2 block (`|00>,|11>` and `|01>,|10>`) is diagonalized separately.
pub fn xstate_branches(rho: &XState) -> Vec<(f64, [Complex64; 4])> {
    let mut out = Vec::new();
    let mut block = |pa: f64, pb: f64, c: Complex64, ia: usize, ib: usize| {
        // [[pa, c*], [c, pb]] in the (ia, ib) basis, c = <ib|rho|ia>
        let mean = 0.5 * (pa + pb);
        let half_gap = (0.25 * (pa - pb).powi(2) + c.norm_sqr()).sqrt();
        for sign in [1.0, -1.0] {
            let lambda = mean + sign * half_gap;
            if lambda <= 1e-15 {
                continue;
            }
            let mut psi = [ZERO; 4];
            if c.norm() <= 1e-300 {
                let pick_a = if sign > 0.0 { pa >= pb } else { pa < pb };
                psi[if pick_a { ia } else { ib }] = Complex64::new(1.0, 0.0);
            } else {
                // (pa - lambda) x + c* y = 0
                let x = c.conj();
                let y = Complex64::new(lambda - pa, 0.0);
                let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
                psi[ia] = x / n;
                psi[ib] = y / n;
            }
            out.push((lambda, psi));
        }
    };
    block(rho.rho11, rho.rho44, rho.rho14, 0, 3);
    block(rho.rho22, rho.rho33, rho.rho23.conj(), 1, 2);
    out
}

/// Pair state on qubits (0, 1) times the chosen channel configuration.
pub fn prepare_initial(spec: &ChainSpec, init: ChannelInit, pair: &XState) -> Result<PreparedState> {
    spec.validate()?;
    if spec.n_sites + 1 > MAX_MATRIX_FREE_QUBITS {
        return Err(Error::SizeLimit { qubits: spec.n_sites + 1, limit: MAX_MATRIX_FREE_QUBITS });
    }
    let (channel, degenerate_ground) = channel_vector(spec, init)?;
    let cdim = channel.len();
    let branches = xstate_branches(pair)
        .into_iter()
        .map(|(w, psi)| {
            let mut amps = vec![ZERO; 4 * cdim];
            for (ab, coef) in psi.iter().enumerate() {
                if *coef == ZERO {
                    continue;
                }
                for (s, v) in channel.iter().enumerate() {
                    amps[ab * cdim + s] = coef * *v;
                }
            }
            ManyBodyState::new(spec.n_sites, amps).map(|st| (w, st))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PreparedState { branches, degenerate_ground })
}

/// Reusable propagator for one chain.
pub struct Evolver {
    n_sites: usize,
    prop: ChainPropagator,
}

impl Evolver {
    pub fn new(spec: &ChainSpec, tol: f64) -> Result<Self> {
        let h = build_manybody_hamiltonian(spec)?;
        Ok(Evolver { n_sites: spec.n_sites, prop: ChainPropagator::new(h.chain, tol)? })
    }

    /// `exp(-i H t)` applied in place.
    pub fn evolve_in_place(&self, state: &mut ManyBodyState, t: f64) -> Result<()> {
        if state.n_sites != self.n_sites {
            return Err(Error::InvalidState(format!("state has {} sites, chain {}", state.n_sites, self.n_sites)));
        }
        let half = state.amplitudes.len() / 2;
        let (a, b) = state.amplitudes.split_at_mut(half);
        self.prop.propagate(a, t)?;
        self.prop.propagate(b, t)
    }

    pub fn evolve(&self, state: &ManyBodyState, t: f64) -> Result<ManyBodyState> {
        let mut out = state.clone();
        self.evolve_in_place(&mut out, t)?;
        Ok(out)
    }
}

pub fn evolve(state: &ManyBodyState, spec: &ChainSpec, t: f64, tol: f64) -> Result<ManyBodyState> {
    Evolver::new(spec, tol)?.evolve(state, t)
}

/// Reduced state of qubits `(0, N)`.
pub fn reduced_density_0n(state: &ManyBodyState) -> DensityMatrix {
    reduced_outer(&state.amplitudes, &state.amplitudes)
}

/// Weighted sum of the branch reduced states.
pub fn reduced_density_mixture(branches: &[(f64, ManyBodyState)]) -> DensityMatrix {
    branches.iter().map(|(w, s)| reduced_density_0n(s) * Complex64::new(*w, 0.0)).sum()
}
