//! Exact resonant Tavis-Cummings time evolution in the interaction picture.
//!
//! The interaction Hamiltonian conserves the total excitation number
//! `Lambda = a^dag a + N_e`, so the truncated space splits into small blocks
//! which are each eigendecomposed once. Evolution to an arbitrary time is then
//! a phase rotation in every block eigenbasis, with no time-step error.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{
    excited_count, CoherentField, DickeState, JointState, ModelConfig, QubitState, C64, I,
};

/// One conserved-excitation block of the restricted interaction Hamiltonian.
#[derive(Debug, Clone)]
pub struct ExcitationBlock {
    /// Conserved excitation number `Lambda = n + N_e`.
    pub excitation: usize,
    /// Basis of the block as `(qubit product index, Fock level)` pairs.
    pub basis: Vec<(usize, usize)>,
    /// Restricted interaction Hamiltonian on `basis`.
    pub hamiltonian: DMatrix<C64>,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<C64>,
}

impl ExcitationBlock {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigvals
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigvecs
    }
}

/// Exact evolution engine for a fixed [`ModelConfig`].
#[derive(Debug, Clone)]
pub struct Propagator {
    config: ModelConfig,
    blocks: Vec<ExcitationBlock>,
}

/// Assigns every truncated basis vector to its excitation block and
/// eigendecomposes each block once.
pub fn build_blocks(config: &ModelConfig) -> Result<Propagator> {
    config.validate()?;
    let nq = config.n_qubits;
    let qdim = config.qubit_dim();
    let n_max = config.fock_cutoff;
    let lambda = config.coupling;
    let max_excitation = n_max + nq;

    let blocks: Vec<ExcitationBlock> = (0..=max_excitation)
        .into_par_iter()
        .map(|exc| {
            let mut basis = Vec::new();
            let mut pos = vec![usize::MAX; qdim];
            for (q, slot) in pos.iter_mut().enumerate() {
                let ne = excited_count(q, nq);
                if exc >= ne && exc - ne <= n_max {
                    *slot = basis.len();
                    basis.push((q, exc - ne));
                }
            }
            let dim = basis.len();
            let mut h = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
            for (i, &(q, n)) in basis.iter().enumerate() {
                // lower each excited qubit: (e at site, n) <-> (g at site, n+1)
                for bit in 0..nq {
                    let mask = 1usize << (nq - 1 - bit);
                    if q & mask == 0 && n < n_max {
                        let j = pos[q | mask];
                        if j != usize::MAX {
                            let elem = C64::new(lambda * ((n + 1) as f64).sqrt(), 0.0);
                            h[(i, j)] += elem;
                            h[(j, i)] += elem;
                        }
                    }
                }
            }
            let eig = h.clone().symmetric_eigen();
            ExcitationBlock {
                excitation: exc,
                basis,
                hamiltonian: h,
                eigvals: eig.eigenvalues,
                eigvecs: eig.eigenvectors,
            }
        })
        .collect();

    Ok(Propagator {
        config: config.clone(),
        blocks,
    })
}

impl Propagator {
    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn blocks(&self) -> &[ExcitationBlock] {
        &self.blocks
    }

    /// `|Psi(t)> = sum_blocks V exp(-i E t) V^dag |Psi(0)>`, exact at any `t`.
    pub fn evolve(&self, state: &JointState, t: f64) -> Result<JointState> {
        if state.qubit_dim() != self.config.qubit_dim()
            || state.fock_cutoff() != self.config.fock_cutoff
        {
            return Err(Error::DimensionMismatch {
                expected: self.config.qubit_dim() * self.config.fock_dim(),
                got: state.qubit_dim() * (state.fock_cutoff() + 1),
            });
        }
        let mut out = DMatrix::from_element(
            state.qubit_dim(),
            state.fock_cutoff() + 1,
            C64::new(0.0, 0.0),
        );
        for block in &self.blocks {
            let dim = block.basis.len();
            if dim == 0 {
                continue;
            }
            let b = DVector::from_fn(dim, |i, _| {
                let (q, n) = block.basis[i];
                state.amplitude(q, n)
            });
            let mut w = block.eigvecs.adjoint() * b;
            for (k, wk) in w.iter_mut().enumerate() {
                *wk *= (-I * block.eigvals[k] * t).exp();
            }
            let v = &block.eigvecs * w;
            for (i, &(q, n)) in block.basis.iter().enumerate() {
                out[(q, n)] = v[i];
            }
        }
        JointState::from_matrix(state.n_qubits(), out)
    }
}

/// Closed-form one-qubit solution: the interaction-picture state of
/// `(C_e|e> + C_g|g>) |alpha>` at time `t`.
pub fn one_qubit_analytic(
    c_e: C64,
    c_g: C64,
    field: &CoherentField,
    coupling: f64,
    t: f64,
    n_max: usize,
) -> Result<JointState> {
    let norm = c_e.norm_sqr() + c_g.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "|C_e|^2 + |C_g|^2 = {norm}, expected 1"
        )));
    }
    let c = field.amplitudes(n_max)?;
    let mut amps = DMatrix::from_element(2, n_max + 1, C64::new(0.0, 0.0));
    // The lone |g,0> term evolves with zero frequency.
    amps[(1, 0)] = c_g * c[0];
    for n in 0..=n_max {
        let rabi = coupling * ((n + 1) as f64).sqrt() * t;
        let (cos, sin) = (rabi.cos(), rabi.sin());
        let c_n1 = if n < n_max { c[n + 1] } else { C64::new(0.0, 0.0) };
        amps[(0, n)] = c_e * c[n] * cos - I * c_g * c_n1 * sin;
        if n < n_max {
            amps[(1, n + 1)] = c_g * c_n1 * cos - I * c_e * c[n] * sin;
        }
    }
    // Truncation nibbles at the norm; bring it back to exactly 1.
    let norm = amps.norm();
    amps /= C64::new(norm, 0.0);
    JointState::from_matrix(1, amps)
}

/// Uniform time grid (raw time units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 1 || (points == 1 && end != start) || end < start {
            return Err(Error::InvalidParameter(format!(
                "invalid time grid [{start}, {end}] with {points} points"
            )));
        }
        Ok(Self { start, end, points })
    }

    pub fn times(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.start + step * i as f64)
            .collect()
    }

    pub fn step(&self) -> f64 {
        if self.points <= 1 {
            0.0
        } else {
            (self.end - self.start) / (self.points - 1) as f64
        }
    }
}

/// Evolves `initial` over the grid and maps each state through `extract`,
/// in parallel over time points with deterministic output ordering.
pub fn evolve_series<T, F>(
    prop: &Propagator,
    initial: &JointState,
    grid: &TimeGrid,
    extract: F,
) -> Result<Vec<(f64, T)>>
where
    T: Send,
    F: Fn(f64, &JointState) -> T + Sync,
{
    let times = grid.times();
    times
        .par_iter()
        .map(|&t| {
            let state = prop.evolve(initial, t)?;
            Ok((t, extract(t, &state)))
        })
        .collect()
}

/// Joint state restricted to the symmetric qubit subspace: rows are Dicke
/// indices `j` (with `m = N_q/2 - j`), columns are Fock levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricJointState {
    n_qubits: usize,
    amps: DMatrix<C64>,
}

impl SymmetricJointState {
    pub fn amplitudes(&self) -> &DMatrix<C64> {
        &self.amps
    }

    /// Expands to the full product-basis joint state.
    pub fn to_full(&self) -> Result<JointState> {
        let nq = self.n_qubits;
        let n_cols = self.amps.ncols();
        let mut full = DMatrix::from_element(1 << nq, n_cols, C64::new(0.0, 0.0));
        for q in 0..(1usize << nq) {
            let ne = excited_count(q, nq);
            let j = nq - ne;
            let w = crate::hilbert::binomial(nq, ne).sqrt();
            for n in 0..n_cols {
                full[(q, n)] = self.amps[(j, n)] / w;
            }
        }
        JointState::from_matrix(nq, full)
    }
}

pub fn embed_symmetric(
    qubits: &DickeState,
    field: &CoherentField,
    n_max: usize,
) -> Result<SymmetricJointState> {
    let c = field.amplitudes(n_max)?;
    let nq = qubits.n_qubits();
    let mut amps = DMatrix::from_element(nq + 1, n_max + 1, C64::new(0.0, 0.0));
    for j in 0..=nq {
        for (n, cn) in c.iter().enumerate() {
            amps[(j, n)] = qubits.amplitudes()[j] * cn;
        }
    }
    Ok(SymmetricJointState { n_qubits: nq, amps })
}

/// Fast path for initial states in the symmetric subspace: the collective
/// block dimension is `N_q + 1` instead of `2^N_q`.
#[derive(Debug, Clone)]
pub struct SymmetricPropagator {
    config: ModelConfig,
    blocks: Vec<SymBlock>,
}

#[derive(Debug, Clone)]
struct SymBlock {
    /// `(dicke index j, fock level n)` pairs.
    basis: Vec<(usize, usize)>,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<C64>,
}

pub fn build_symmetric_blocks(config: &ModelConfig) -> Result<SymmetricPropagator> {
    config.validate()?;
    let nq = config.n_qubits;
    let n_max = config.fock_cutoff;
    let lambda = config.coupling;
    let s = nq as f64 / 2.0;
    let blocks: Vec<SymBlock> = (0..=(n_max + nq))
        .into_par_iter()
        .map(|exc| {
            let mut basis = Vec::new();
            let mut pos = vec![usize::MAX; nq + 1];
            for (j, slot) in pos.iter_mut().enumerate() {
                let ne = nq - j;
                if exc >= ne && exc - ne <= n_max {
                    *slot = basis.len();
                    basis.push((j, exc - ne));
                }
            }
            let dim = basis.len();
            let mut h = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
            for (i, &(j, n)) in basis.iter().enumerate() {
                // collective lowering |j, n> -> |j+1, n+1>
                if j < nq && n < n_max {
                    let k = pos[j + 1];
                    if k != usize::MAX {
                        let m = s - j as f64;
                        let jm = (s * (s + 1.0) - m * (m - 1.0)).sqrt();
                        let elem = C64::new(lambda * ((n + 1) as f64).sqrt() * jm, 0.0);
                        h[(i, k)] += elem;
                        h[(k, i)] += elem;
                    }
                }
            }
            let eig = h.symmetric_eigen();
            SymBlock {
                basis,
                eigvals: eig.eigenvalues,
                eigvecs: eig.eigenvectors,
            }
        })
        .collect();
    Ok(SymmetricPropagator {
        config: config.clone(),
        blocks,
    })
}

impl SymmetricPropagator {
    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn evolve(&self, state: &SymmetricJointState, t: f64) -> Result<SymmetricJointState> {
        if state.n_qubits != self.config.n_qubits
            || state.amps.ncols() != self.config.fock_dim()
        {
            return Err(Error::DimensionMismatch {
                expected: (self.config.n_qubits + 1) * self.config.fock_dim(),
                got: state.amps.len(),
            });
        }
        let mut out = state.amps.clone();
        out.fill(C64::new(0.0, 0.0));
        for block in &self.blocks {
            let dim = block.basis.len();
            if dim == 0 {
                continue;
            }
            let b = DVector::from_fn(dim, |i, _| {
                let (j, n) = block.basis[i];
                state.amps[(j, n)]
            });
            let mut w = block.eigvecs.adjoint() * b;
            for (k, wk) in w.iter_mut().enumerate() {
                *wk *= (-I * block.eigvals[k] * t).exp();
            }
            let v = &block.eigvecs * w;
            for (i, &(j, n)) in block.basis.iter().enumerate() {
                out[(j, n)] = v[i];
            }
        }
        Ok(SymmetricJointState {
            n_qubits: state.n_qubits,
            amps: out,
        })
    }
}

/// Builds the usual product-state initial condition `|psi_q> |alpha>`.
pub fn initial_state(
    config: &ModelConfig,
    qubits: &QubitState,
) -> Result<JointState> {
    crate::hilbert::embed_product(qubits, &config.field(), config.fock_cutoff)
}
