//! Entanglement and phase-space diagnostics: rescaled von Neumann entropy,
//! mixed-state two-qubit tangle, the residual three-qubit tangle, field and
//! spin Q functions, and envelope-based revival detection.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{
    coherent_amplitudes_raw, reduced_qubits, spin_coherent, spin_coherent_dicke, DensityMatrix,
    DickeState, JointState, QubitState, Side, C64,
};

/// Rescaled von Neumann entropy `-Tr(rho log2 rho) / n_qubits`, in `[0, 1]`
/// for the qubit side of a pure joint state.
pub fn entropy(rho: &DensityMatrix, n_qubits: usize) -> Result<f64> {
    if n_qubits == 0 {
        return Err(Error::InvalidParameter("n_qubits must be >= 1".into()));
    }
    let mut s = 0.0;
    for ev in rho.eigenvalues() {
        if ev > 1e-300 {
            s -= ev * ev.log2();
        } else if ev < -1e-9 {
            return Err(Error::NotDensity(format!("negative eigenvalue {ev:.3e}")));
        }
    }
    Ok(s / n_qubits as f64)
}

/// Intermediate quantities of the two-qubit mixed-state tangle computation.
#[derive(Debug, Clone, PartialEq)]
pub struct TangleBreakdown {
    /// Square roots of the eigenvalues of `rho rho_tilde`, descending.
    pub eigenvalues: [f64; 4],
    /// `lambda_1 - lambda_2 - lambda_3 - lambda_4` before clamping; negative
    /// values witness an unentangled state.
    pub raw: f64,
    /// Concurrence `zeta = max(raw, 0)`.
    pub concurrence: f64,
    /// Tangle `tau = zeta^2`.
    pub tangle: f64,
    /// Number of eigenvalues above 1e-9.
    pub rank: usize,
}

/// Two-qubit mixed-state tangle through the spin-flipped density matrix
/// `rho_tilde = (sigma_y x sigma_y) rho* (sigma_y x sigma_y)`.
///
/// The lambdas are computed as the singular values of
/// `sqrt(rho_tilde) sqrt(rho)`, whose squares are the eigenvalues of
/// `rho rho_tilde`. Unlike an eigendecomposition of the Hermitian product,
/// singular values of a rank-deficient matrix carry absolute (not square-root)
/// rounding error, so the trailing lambdas of low-rank states stay at machine
/// scale.
pub fn tangle(rho: &DensityMatrix) -> Result<TangleBreakdown> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    // sigma_y x sigma_y in the (e, g) ordering is real.
    let mut yy = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    yy[(0, 3)] = C64::new(-1.0, 0.0);
    yy[(1, 2)] = C64::new(1.0, 0.0);
    yy[(2, 1)] = C64::new(1.0, 0.0);
    yy[(3, 0)] = C64::new(-1.0, 0.0);

    let eig = rho.matrix().clone().symmetric_eigen();
    // Eigenvalue dust below 1e-13 is clipped so that the square roots of
    // rank-deficient states are exactly rank-deficient.
    let sqrt_vals = DVector::from_fn(4, |i, _| {
        let ev = eig.eigenvalues[i];
        C64::new(if ev > 1e-13 { ev.sqrt() } else { 0.0 }, 0.0)
    });
    let sqrt_rho = &eig.eigenvectors
        * DMatrix::from_diagonal(&sqrt_vals)
        * eig.eigenvectors.adjoint();
    let sqrt_rho_tilde = &yy * sqrt_rho.map(|c| c.conj()) * &yy;

    let k = sqrt_rho_tilde * &sqrt_rho;
    let mut lambdas: Vec<f64> = k.svd(false, false).singular_values.iter().cloned().collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let raw = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    let concurrence = raw.max(0.0);
    Ok(TangleBreakdown {
        eigenvalues: [lambdas[0], lambdas[1], lambdas[2], lambdas[3]],
        raw,
        concurrence,
        tangle: concurrence * concurrence,
        rank: lambdas.iter().filter(|&&l| l > 1e-9).count(),
    })
}

/// Partial trace of a multi-qubit density matrix down to the listed qubits.
pub fn reduce_density(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let nq = match rho.side() {
        Side::Qubits { n_qubits } => n_qubits,
        Side::Field { .. } => {
            return Err(Error::InvalidParameter(
                "reduce_density expects a qubit-side density matrix".into(),
            ))
        }
    };
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
                acc += rho.matrix()[(compose(r, t), compose(c, t))];
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

/// Residual three-qubit tangle of a pure three-qubit state,
/// `tau_ABC = 4 det(rho_A) - tau_AB - tau_AC`.
pub fn three_tangle(psi: &QubitState) -> Result<f64> {
    if psi.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            got: psi.dim(),
        });
    }
    let rho_a = reduced_qubits(psi, &[0])?;
    let det = (rho_a.matrix()[(0, 0)] * rho_a.matrix()[(1, 1)]
        - rho_a.matrix()[(0, 1)] * rho_a.matrix()[(1, 0)])
        .re;
    let tau_ab = tangle(&reduced_qubits(psi, &[0, 1])?)?.tangle;
    let tau_ac = tangle(&reduced_qubits(psi, &[0, 2])?)?.tangle;
    Ok(4.0 * det - tau_ab - tau_ac)
}

/// Probability of finding the qubits in product-basis state `q`,
/// regardless of the field.
pub fn basis_probability(state: &JointState, q: usize) -> f64 {
    (0..=state.fock_cutoff())
        .map(|n| state.amplitude(q, n).norm_sqr())
        .sum()
}

/// Probability of finding the qubits in the pure state `target`,
/// `sum_n |<target, n | Psi>|^2`.
pub fn state_probability(state: &JointState, target: &QubitState) -> Result<f64> {
    if target.dim() != state.qubit_dim() {
        return Err(Error::DimensionMismatch {
            expected: state.qubit_dim(),
            got: target.dim(),
        });
    }
    let mut total = 0.0;
    for n in 0..=state.fock_cutoff() {
        let mut amp = C64::new(0.0, 0.0);
        for q in 0..state.qubit_dim() {
            amp += target.amplitude(q).conj() * state.amplitude(q, n);
        }
        total += amp.norm_sqr();
    }
    Ok(total)
}

/// Husimi Q function of the field, `Q(alpha) = <alpha|rho_f|alpha> / pi`.
pub fn q_function(rho: &DensityMatrix, alpha: C64) -> Result<f64> {
    let n_max = match rho.side() {
        Side::Field { n_max } => n_max,
        Side::Qubits { .. } => {
            return Err(Error::InvalidParameter(
                "q_function expects a field-side density matrix".into(),
            ))
        }
    };
    let c = DVector::from_vec(coherent_amplitudes_raw(alpha, n_max));
    let val = c.adjoint() * rho.matrix() * &c;
    Ok(val[(0, 0)].re / std::f64::consts::PI)
}

/// Spin Q function of the qubits, `Q(z) = <z|rho_q|z> / (1 + |z|^2)^2`,
/// normalized so that `(N_q + 1)/pi * integral of Q over the z plane = 1`.
pub fn spin_q_function(rho: &DensityMatrix, z: C64) -> Result<f64> {
    let nq = match rho.side() {
        Side::Qubits { n_qubits } => n_qubits,
        Side::Field { .. } => {
            return Err(Error::InvalidParameter(
                "spin_q_function expects a qubit-side density matrix".into(),
            ))
        }
    };
    let v = spin_coherent(z, nq);
    let val = v.amplitudes().adjoint() * rho.matrix() * v.amplitudes();
    Ok(val[(0, 0)].re / (1.0 + z.norm_sqr()).powi(2))
}

/// Spin Q function of a pure symmetric state given in the Dicke basis;
/// usable for qubit numbers far beyond the product-basis range.
pub fn spin_q_pure_dicke(psi: &DickeState, z: C64) -> f64 {
    let overlap = spin_coherent_dicke(z, psi.n_qubits()).overlap(psi);
    overlap.norm_sqr() / (1.0 + z.norm_sqr()).powi(2)
}

/// Rectangular grid in a complex plane (field alpha or spin z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl PhaseGrid {
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
            nx: points,
            ny: points,
        }
    }

    /// Row-major grid points, y outer, x inner.
    pub fn points(&self) -> Vec<C64> {
        let step = |lo: f64, hi: f64, n: usize, i: usize| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for iy in 0..self.ny {
            let y = step(self.y_min, self.y_max, self.ny, iy);
            for ix in 0..self.nx {
                out.push(C64::new(step(self.x_min, self.x_max, self.nx, ix), y));
            }
        }
        out
    }
}

/// Revival times of an oscillating probability signal: local maxima of the
/// moving-window oscillation envelope (window width `t_c`) above `threshold`.
///
/// The grid must resolve the carrier: errors out when the step exceeds
/// `t_c / 10`.
pub fn detect_revivals(
    times: &[f64],
    values: &[f64],
    t_c: f64,
    threshold: f64,
) -> Result<Vec<f64>> {
    if times.len() != values.len() || times.len() < 3 {
        return Err(Error::InvalidParameter(
            "detect_revivals needs matched series of at least 3 points".into(),
        ));
    }
    let step = times[1] - times[0];
    if step > t_c / 10.0 {
        return Err(Error::GridTooCoarse {
            step,
            limit: t_c / 10.0,
        });
    }
    let half = ((t_c / 2.0) / step).round() as usize;
    let n = times.len();
    let envelope: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let window = &values[lo..=hi];
            let min = window.iter().cloned().fold(f64::MAX, f64::min);
            let max = window.iter().cloned().fold(f64::MIN, f64::max);
            max - min
        })
        .collect();

    // The raw max-min envelope has a flat top of width ~t_c around each
    // revival; a moving average of the same width rounds it into a single
    // centered maximum.
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            envelope[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();

    // Local maxima of the smoothed envelope above threshold; maxima closer
    // than t_c are merged into the strongest one.
    let mut candidates: Vec<usize> = (1..n - 1)
        .filter(|&i| {
            smooth[i] > threshold && smooth[i] >= smooth[i - 1] && smooth[i] >= smooth[i + 1]
        })
        .collect();
    candidates.sort_by(|&a, &b| smooth[b].partial_cmp(&smooth[a]).unwrap());
    let mut kept: Vec<f64> = Vec::new();
    for i in candidates {
        if kept.iter().all(|&t| (times[i] - t).abs() > t_c) {
            kept.push(times[i]);
        }
    }
    kept.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(kept)
}
