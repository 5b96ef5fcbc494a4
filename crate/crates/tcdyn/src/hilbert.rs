//! State construction and manipulation: qubit product basis, Dicke basis,
//! coherent and spin coherent states, tensor embedding, partial traces.
//!
//! Basis conventions, fixed once for every matrix layout in the crate:
//! the single-qubit basis is ordered `|e>`, `|g>`; product states are ordered
//! lexicographically, so `|e...e>` has index 0 and qubit 0 occupies the most
//! significant bit (bit value 0 = excited, 1 = ground). The coherent state
//! parameter is `alpha = sqrt(nbar) * exp(-i*theta)`.

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// Tail weight beyond the Fock cutoff above which coherent amplitudes refuse
/// to renormalize.
pub const TRUNCATION_TOL: f64 = 1e-10;

const NORM_TOL: f64 = 1e-9;

/// Model parameters of the resonant Tavis-Cummings system, in units where the
/// coupling sets the time scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Number of two-level systems, `N_q >= 1`.
    pub n_qubits: usize,
    /// Qubit-field coupling (inverse time).
    pub coupling: f64,
    /// Mean photon number of the initial coherent field.
    pub nbar: f64,
    /// Initial phase of the field.
    pub theta: f64,
    /// Fock levels `0..=fock_cutoff` are retained.
    pub fock_cutoff: usize,
}

impl ModelConfig {
    pub fn new(n_qubits: usize, nbar: f64, theta: f64) -> Self {
        Self {
            n_qubits,
            coupling: 1.0,
            nbar,
            theta,
            fock_cutoff: default_fock_cutoff(nbar),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::InvalidParameter("n_qubits must be >= 1".into()));
        }
        if self.coupling.is_nan() || self.coupling <= 0.0 {
            return Err(Error::InvalidParameter("coupling must be positive".into()));
        }
        if self.nbar < 0.0 {
            return Err(Error::InvalidParameter("nbar must be non-negative".into()));
        }
        let needed = self.nbar + 10.0 * self.nbar.sqrt();
        if (self.fock_cutoff as f64) < needed {
            return Err(Error::InvalidParameter(format!(
                "fock_cutoff {} below nbar + 10*sqrt(nbar) = {:.1}",
                self.fock_cutoff, needed
            )));
        }
        Ok(())
    }

    /// Main revival time `t_r = 2 pi sqrt(nbar) / lambda`.
    pub fn t_r(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.nbar.sqrt() / self.coupling
    }

    /// Collapse time `t_c = 2 / lambda`.
    pub fn t_c(&self) -> f64 {
        2.0 / self.coupling
    }

    pub fn field(&self) -> CoherentField {
        CoherentField {
            nbar: self.nbar,
            theta: self.theta,
        }
    }

    pub fn qubit_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }
}

/// Default Fock cutoff: 200 at `nbar = 50`, otherwise
/// `ceil(nbar + 10 sqrt(nbar))` with a floor of 20 so that small-`nbar`
/// Poisson tails still fall below [`TRUNCATION_TOL`].
pub fn default_fock_cutoff(nbar: f64) -> usize {
    if (nbar - 50.0).abs() < 1e-12 {
        200
    } else {
        ((nbar + 10.0 * nbar.sqrt()).ceil() as usize).max(20)
    }
}

/// Number of excited qubits encoded by product-basis index `q`.
#[inline]
pub fn excited_count(q: usize, n_qubits: usize) -> usize {
    n_qubits - (q & ((1 << n_qubits) - 1)).count_ones() as usize
}

/// Product-basis index of a label such as `"eeg"`.
pub fn basis_index(label: &str) -> Result<usize> {
    let mut idx = 0usize;
    for c in label.chars() {
        idx <<= 1;
        match c {
            'e' => {}
            'g' => idx |= 1,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "basis label must consist of 'e'/'g', got '{label}'"
                )))
            }
        }
    }
    Ok(idx)
}

/// `(nbar, theta)` parametrization of the coherent state `|alpha>` with
/// `alpha = sqrt(nbar) exp(-i theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentField {
    pub nbar: f64,
    pub theta: f64,
}

impl CoherentField {
    pub fn new(nbar: f64, theta: f64) -> Self {
        Self { nbar, theta }
    }

    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.nbar.sqrt(), -self.theta)
    }

    /// Truncated Fock amplitudes `C_0..C_n_max`, renormalized when the
    /// Poisson tail beyond the cutoff is below [`TRUNCATION_TOL`].
    pub fn amplitudes(&self, n_max: usize) -> Result<Vec<C64>> {
        if self.nbar < 0.0 {
            return Err(Error::InvalidParameter("nbar must be non-negative".into()));
        }
        let mut amps = coherent_amplitudes_raw(self.alpha(), n_max);
        let kept: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        let lost = 1.0 - kept;
        if lost > TRUNCATION_TOL {
            return Err(Error::Truncation { lost, n_max });
        }
        let scale = 1.0 / kept.sqrt();
        for c in &mut amps {
            *c *= scale;
        }
        Ok(amps)
    }
}

/// Unnormalized truncated expansion of `|alpha>` over `|0>..|n_max>`,
/// computed in log space so that `n` up to several hundred stays finite.
pub fn coherent_amplitudes_raw(alpha: C64, n_max: usize) -> Vec<C64> {
    let r = alpha.norm();
    if r == 0.0 {
        let mut amps = vec![C64::new(0.0, 0.0); n_max + 1];
        amps[0] = C64::new(1.0, 0.0);
        return amps;
    }
    let phase = alpha.arg();
    let ln_r = r.ln();
    (0..=n_max)
        .map(|n| {
            let ln_mag = -0.5 * r * r + n as f64 * ln_r - 0.5 * ln_gamma(n as f64 + 1.0);
            C64::from_polar(ln_mag.exp(), n as f64 * phase)
        })
        .collect()
}

/// Convenience wrapper matching the spec'd operation shape.
pub fn coherent_amplitudes(field: &CoherentField, n_max: usize) -> Result<Vec<C64>> {
    field.amplitudes(n_max)
}

/// Pure state of `N_q` qubits over the `2^N_q` product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    n_qubits: usize,
    amps: DVector<C64>,
}

impl QubitState {
    /// Builds a normalized state; the input must already be normalized to
    /// within 1e-9 (residual rescaling is applied exactly).
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amps.len(),
            });
        }
        let mut v = DVector::from_vec(amps);
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "qubit amplitudes have norm {norm}, expected 1"
            )));
        }
        v /= C64::new(norm, 0.0);
        Ok(Self { n_qubits, amps: v })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amps.len(),
            });
        }
        let mut v = DVector::from_vec(amps);
        let norm = v.norm();
        if norm < 1e-300 {
            return Err(Error::InvalidState("zero state cannot be normalized".into()));
        }
        v /= C64::new(norm, 0.0);
        Ok(Self { n_qubits, amps: v })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = DVector::from_element(1 << n_qubits, C64::new(0.0, 0.0));
        amps[index] = C64::new(1.0, 0.0);
        Self {
            n_qubits,
            amps,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// `|<self|other>|^2`; compares states modulo global phase.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// Tensor product, `self` on the left (most significant bits).
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.n_qubits + other.n_qubits;
        let mut amps = DVector::from_element(1 << n, C64::new(0.0, 0.0));
        for (i, a) in self.amps.iter().enumerate() {
            for (j, b) in other.amps.iter().enumerate() {
                amps[(i << other.n_qubits) | j] = a * b;
            }
        }
        Self { n_qubits: n, amps }
    }

    /// Pure-state density matrix `|psi><psi|`.
    pub fn density(&self) -> DensityMatrix {
        let mat = &self.amps * self.amps.adjoint();
        DensityMatrix {
            mat,
            side: Side::Qubits {
                n_qubits: self.n_qubits,
            },
        }
    }
}

/// State in the symmetric (Dicke) basis `|N_q, m>`, `m = N_q/2 .. -N_q/2`;
/// index `j` corresponds to `m = N_q/2 - j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeState {
    n_qubits: usize,
    amps: DVector<C64>,
}

impl DickeState {
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != n_qubits + 1 {
            return Err(Error::DimensionMismatch {
                expected: n_qubits + 1,
                got: amps.len(),
            });
        }
        let mut v = DVector::from_vec(amps);
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "Dicke amplitudes have norm {norm}, expected 1"
            )));
        }
        v /= C64::new(norm, 0.0);
        Ok(Self { n_qubits, amps: v })
    }

    /// The basis element `|N_q, m>` with `twice_m = 2m`.
    pub fn basis(n_qubits: usize, twice_m: i32) -> Result<Self> {
        let j = index_of_twice_m(n_qubits, twice_m)?;
        let mut amps = DVector::from_element(n_qubits + 1, C64::new(0.0, 0.0));
        amps[j] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// Amplitude on `|N_q, m>` with `twice_m = 2m`.
    pub fn amplitude(&self, twice_m: i32) -> Result<C64> {
        Ok(self.amps[index_of_twice_m(self.n_qubits, twice_m)?])
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// Isometry into the product basis: each `|N_q, m>` spreads equally over
    /// all product states with `N_e = N_q/2 + m` excitations.
    pub fn to_product_basis(&self) -> QubitState {
        let nq = self.n_qubits;
        let dim = 1usize << nq;
        let mut amps = DVector::from_element(dim, C64::new(0.0, 0.0));
        for q in 0..dim {
            let ne = excited_count(q, nq);
            let j = nq - ne;
            let weight = (binomial(nq, ne)).sqrt();
            amps[q] = self.amps[j] / weight;
        }
        QubitState {
            n_qubits: nq,
            amps,
        }
    }

    /// Inverse projection; fails when the input is not in the symmetric
    /// subspace to within 1e-10 (in norm).
    pub fn from_product(psi: &QubitState) -> Result<Self> {
        let nq = psi.n_qubits;
        let mut amps = DVector::from_element(nq + 1, C64::new(0.0, 0.0));
        for q in 0..psi.dim() {
            let ne = excited_count(q, nq);
            let j = nq - ne;
            amps[j] += psi.amps[q] / binomial(nq, ne).sqrt();
        }
        let dicke = Self {
            n_qubits: nq,
            amps,
        };
        let back = dicke.to_product_basis();
        let residual = (&back.amps - &psi.amps).norm();
        if residual > 1e-10 {
            return Err(Error::NotSymmetric { residual });
        }
        Ok(dicke)
    }
}

fn index_of_twice_m(n_qubits: usize, twice_m: i32) -> Result<usize> {
    let nq = n_qubits as i32;
    if twice_m.abs() > nq || (nq - twice_m) % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "invalid m = {}/2 for N_q = {n_qubits}",
            twice_m
        )));
    }
    Ok(((nq - twice_m) / 2) as usize)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)).exp()
}

/// Symmetric state with `N_e = N_q/2 + m` excitations, expanded in the
/// product basis.
pub fn dicke_state(n_qubits: usize, twice_m: i32) -> Result<QubitState> {
    Ok(DickeState::basis(n_qubits, twice_m)?.to_product_basis())
}

/// Spin coherent state `((|e> + z|g>)/sqrt(1+|z|^2))^{tensor N_q}`.
pub fn spin_coherent(z: C64, n_qubits: usize) -> QubitState {
    let norm = (1.0 + z.norm_sqr()).sqrt();
    let e = C64::new(1.0 / norm, 0.0);
    let g = z / norm;
    let dim = 1usize << n_qubits;
    let mut amps = DVector::from_element(dim, C64::new(0.0, 0.0));
    for q in 0..dim {
        let mut a = C64::new(1.0, 0.0);
        for bit in 0..n_qubits {
            a *= if q >> (n_qubits - 1 - bit) & 1 == 0 { e } else { g };
        }
        amps[q] = a;
    }
    QubitState { n_qubits, amps }
}

/// The `z -> infinity` limit of [`spin_coherent`]: every qubit in `|g>`.
pub fn all_ground(n_qubits: usize) -> QubitState {
    QubitState::basis(n_qubits, (1 << n_qubits) - 1)
}

/// Spin coherent state in the Dicke basis; valid for large `N_q` where the
/// product expansion is out of reach.
pub fn spin_coherent_dicke(z: C64, n_qubits: usize) -> DickeState {
    let nq = n_qubits as f64;
    let mut amps = DVector::from_element(n_qubits + 1, C64::new(0.0, 0.0));
    if z.norm() == 0.0 {
        amps[0] = C64::new(1.0, 0.0);
        return DickeState { n_qubits, amps };
    }
    let ln_z = z.norm().ln();
    let arg_z = z.arg();
    let ln_norm = 0.5 * nq * (1.0 + z.norm_sqr()).ln();
    for j in 0..=n_qubits {
        let ln_mag = 0.5 * binomial_ln(n_qubits, j) + j as f64 * ln_z - ln_norm;
        amps[j] = C64::from_polar(ln_mag.exp(), j as f64 * arg_z);
    }
    DickeState { n_qubits, amps }
}

fn binomial_ln(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Pure state of the joint qubit-field system in the interaction picture.
/// Row index runs over the product qubit basis, column index over Fock levels.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    n_qubits: usize,
    amps: DMatrix<C64>,
}

impl JointState {
    pub fn from_matrix(n_qubits: usize, amps: DMatrix<C64>) -> Result<Self> {
        if amps.nrows() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: amps.nrows(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "joint amplitudes have norm {norm}, expected 1"
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn qubit_dim(&self) -> usize {
        self.amps.nrows()
    }

    pub fn fock_cutoff(&self) -> usize {
        self.amps.ncols() - 1
    }

    pub fn amplitudes(&self) -> &DMatrix<C64> {
        &self.amps
    }

    pub fn amplitude(&self, q: usize, n: usize) -> C64 {
        self.amps[(q, n)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Occupancy of the top retained Fock level; must stay below 1e-8 for
    /// the truncation to be trusted.
    pub fn top_level_occupancy(&self) -> f64 {
        let n = self.amps.ncols() - 1;
        (0..self.amps.nrows())
            .map(|q| self.amps[(q, n)].norm_sqr())
            .sum()
    }

    /// Expectation of the conserved excitation number
    /// `a^dag a + sum_i (sigma_i^z + 1)/2`.
    pub fn excitation_expectation(&self) -> f64 {
        let mut acc = 0.0;
        for q in 0..self.amps.nrows() {
            let ne = excited_count(q, self.n_qubits) as f64;
            for n in 0..self.amps.ncols() {
                acc += (n as f64 + ne) * self.amps[(q, n)].norm_sqr();
            }
        }
        acc
    }
}

/// Tensor product of a qubit state with a truncated coherent field state.
pub fn embed_product(
    qubits: &QubitState,
    field: &CoherentField,
    n_max: usize,
) -> Result<JointState> {
    let c = field.amplitudes(n_max)?;
    let mut amps = DMatrix::from_element(qubits.dim(), n_max + 1, C64::new(0.0, 0.0));
    for q in 0..qubits.dim() {
        for (n, cn) in c.iter().enumerate() {
            amps[(q, n)] = qubits.amps[q] * cn;
        }
    }
    Ok(JointState {
        n_qubits: qubits.n_qubits,
        amps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Qubits { n_qubits: usize },
    Field { n_max: usize },
}

/// Hermitian, unit-trace reduced density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
    side: Side,
}

impl DensityMatrix {
    pub fn new(mat: DMatrix<C64>, side: Side) -> Result<Self> {
        let dim = match side {
            Side::Qubits { n_qubits } => 1 << n_qubits,
            Side::Field { n_max } => n_max + 1,
        };
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: mat.nrows(),
            });
        }
        let herm_defect = (&mat - mat.adjoint()).camax();
        if herm_defect > 1e-12 {
            return Err(Error::NotDensity(format!(
                "Hermiticity defect {herm_defect:.3e}"
            )));
        }
        let trace: C64 = mat.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::NotDensity(format!("trace {trace}, expected 1")));
        }
        Ok(Self { mat, side })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }

    /// Trace distance `(1/2) ||rho - sigma||_1`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = &self.mat - &other.mat;
        let ev = diff.symmetric_eigen().eigenvalues;
        0.5 * ev.iter().map(|x| x.abs()).sum::<f64>()
    }
}

/// `rho_q = Tr_f |Psi><Psi|`.
pub fn partial_trace_field(state: &JointState) -> DensityMatrix {
    let a = &state.amps;
    DensityMatrix {
        mat: a * a.adjoint(),
        side: Side::Qubits {
            n_qubits: state.n_qubits,
        },
    }
}

/// `rho_f = Tr_q |Psi><Psi|`.
pub fn partial_trace_qubits(state: &JointState) -> DensityMatrix {
    let a = &state.amps;
    DensityMatrix {
        mat: (a.adjoint() * a).transpose(),
        side: Side::Field {
            n_max: state.amps.ncols() - 1,
        },
    }
}

/// Reduced density matrix of the listed qubits (in the given order) of a
/// pure multi-qubit state.
pub fn reduced_qubits(psi: &QubitState, keep: &[usize]) -> Result<DensityMatrix> {
    let nq = psi.n_qubits;
    for &k in keep {
        if k >= nq {
            return Err(Error::InvalidParameter(format!(
                "qubit index {k} out of range for N_q = {nq}"
            )));
        }
    }
    let traced: Vec<usize> = (0..nq).filter(|i| !keep.contains(i)).collect();
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    // Full product index from the kept-part and traced-part sub-indices.
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut q = 0usize;
        for (pos, &i) in keep.iter().enumerate() {
            if kept_bits >> (keep.len() - 1 - pos) & 1 == 1 {
                q |= 1 << (nq - 1 - i);
            }
        }
        for (pos, &i) in traced.iter().enumerate() {
            if traced_bits >> (traced.len() - 1 - pos) & 1 == 1 {
                q |= 1 << (nq - 1 - i);
            }
        }
        q
    };
    let mut mat = DMatrix::from_element(kd, kd, C64::new(0.0, 0.0));
    for r in 0..kd {
        for c in 0..kd {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..td {
                acc += psi.amps[compose(r, t)] * psi.amps[compose(c, t)].conj();
            }
            mat[(r, c)] = acc;
        }
    }
    DensityMatrix::new(
        mat,
        Side::Qubits {
            n_qubits: keep.len(),
        },
    )
}
