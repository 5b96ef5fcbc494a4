//! Large mean-photon-number machinery: wavepacket component decompositions,
//! attractor states, basins of attraction, revival and attractor time tables,
//! and wavepacket dipole moments.
//!
//! Throughout, `tau = t / t_r` is time in units of the main revival time.

use std::collections::BTreeSet;

use num_integer::Integer;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{
    binomial, coherent_amplitudes_raw, CoherentField, DickeState, JointState, QubitState, C64, I,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttractorSign {
    Plus,
    Minus,
}

impl AttractorSign {
    fn as_f64(self) -> f64 {
        match self {
            AttractorSign::Plus => 1.0,
            AttractorSign::Minus => -1.0,
        }
    }
}

/// The attractor state `((e^{-i theta}|e> +/- i|g>)/sqrt(2))^{x N_q}`, the
/// spin coherent state `|z = +/- i e^{i theta}>` up to a global phase.
pub fn attractor_state(n_qubits: usize, theta: f64, sign: AttractorSign) -> QubitState {
    let s = sign.as_f64();
    let e = C64::from_polar(1.0 / 2.0f64.sqrt(), -theta);
    let g = I * s / 2.0f64.sqrt();
    let one = QubitState::from_amplitudes(1, vec![e, g]).unwrap();
    let mut out = one.clone();
    for _ in 1..n_qubits {
        out = out.tensor(&one);
    }
    out
}

/// [`attractor_state`] in the Dicke basis, usable for large `N_q`.
pub fn attractor_dicke(n_qubits: usize, theta: f64, sign: AttractorSign) -> DickeState {
    let s = sign.as_f64();
    let nq = n_qubits as f64;
    let ln2 = std::f64::consts::LN_2;
    let amps: Vec<C64> = (0..=n_qubits)
        .map(|j| {
            let mag = (0.5 * binomial(n_qubits, j).ln() - 0.5 * nq * ln2).exp();
            // phase: e^{-i(N_q - j) theta} (s i)^j
            let phase = -(nq - j as f64) * theta + s * j as f64 * std::f64::consts::FRAC_PI_2;
            C64::from_polar(mag, phase)
        })
        .collect();
    DickeState::from_amplitudes(n_qubits, amps).unwrap()
}

/// Parameters of a basin-of-attraction state. The complex weight `a` sits on
/// the even Dicke rungs and must satisfy `|a|^2 <= 1/2^{N_q - 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasinSpec {
    pub n_qubits: usize,
    pub a: C64,
    pub theta: f64,
}

impl BasinSpec {
    pub fn new(n_qubits: usize, a: C64, theta: f64) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("n_qubits must be >= 1".into()));
        }
        let cap = 0.5f64.powi(n_qubits as i32 - 1);
        if a.norm_sqr() > cap + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "|a|^2 = {:.6e} exceeds 1/2^(N_q-1) = {:.6e}",
                a.norm_sqr(),
                cap
            )));
        }
        Ok(Self { n_qubits, a, theta })
    }

    /// Weight on the odd Dicke rungs, fixed by normalization.
    pub fn odd_weight(&self) -> f64 {
        let cap = 0.5f64.powi(self.n_qubits as i32 - 1);
        (cap - self.a.norm_sqr()).max(0.0).sqrt()
    }
}

/// A general basin-of-attraction state in the Dicke basis: amplitude
/// `A_j e^{-i j theta} sqrt(C(N_q, j))` on `|N_q, m = N_q/2 - j>`, where
/// `A_j` alternates between `a` (even `j`) and the odd weight.
pub fn basin_dicke(spec: &BasinSpec) -> Result<DickeState> {
    let b = C64::new(spec.odd_weight(), 0.0);
    let amps: Vec<C64> = (0..=spec.n_qubits)
        .map(|j| {
            let aj = if j % 2 == 0 { spec.a } else { b };
            aj * C64::from_polar(binomial(spec.n_qubits, j).sqrt(), -(j as f64) * spec.theta)
        })
        .collect();
    DickeState::from_amplitudes(spec.n_qubits, amps)
}

pub fn basin_state(spec: &BasinSpec) -> Result<QubitState> {
    Ok(basin_dicke(spec)?.to_product_basis())
}

/// A basin state written as a two-component spin cat,
/// `w_+ |z = e^{-i theta}> + w_- |z = -e^{-i theta}>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatDecomposition {
    pub weight_plus: C64,
    pub weight_minus: C64,
    pub z_plus: C64,
    pub z_minus: C64,
}

pub fn basin_as_cat(spec: &BasinSpec) -> Result<CatDecomposition> {
    let b = spec.odd_weight();
    let scale = 0.5f64.powi(2 - spec.n_qubits as i32).sqrt();
    let z = C64::from_polar(1.0, -spec.theta);
    Ok(CatDecomposition {
        weight_plus: (spec.a + b) * scale,
        weight_minus: (spec.a - b) * scale,
        z_plus: z,
        z_minus: -z,
    })
}

/// One wavepacket of the large-nbar decomposition
/// `|Psi(t)> ~ sum_k beta_k |D_k(tau)> |e^{2 pi i k tau} alpha>`,
/// evaluated at a fixed `tau`. `qubit_state` is `None` when the component
/// direction is undefined because its weight vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeNComponent {
    /// `2k`; the component index `k` runs over half-integers.
    pub twice_k: i32,
    pub beta: C64,
    pub qubit_state: Option<QubitState>,
    /// Rotated coherent amplitude `e^{2 pi i k tau} alpha`.
    pub field_alpha: C64,
}

fn d_half(sign: f64, theta: f64, tau: f64) -> QubitState {
    let w = 1.0 / 2.0f64.sqrt();
    let e = C64::from_polar(w, -theta);
    let g = -C64::from_polar(w, -sign * std::f64::consts::PI * tau) * sign;
    QubitState::from_amplitudes(1, vec![e, g]).unwrap()
}

/// The two-component decomposition of a single qubit with a coherent field.
pub fn one_qubit_components(
    psi: &QubitState,
    field: &CoherentField,
    tau: f64,
) -> Result<Vec<LargeNComponent>> {
    if psi.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: psi.dim(),
        });
    }
    let (c_e, c_g) = (psi.amplitude(0), psi.amplitude(1));
    let theta = field.theta;
    let alpha = field.alpha();
    let pi = std::f64::consts::PI;
    let mut out = Vec::with_capacity(2);
    for s in [1.0f64, -1.0] {
        let beta = (C64::from_polar(1.0, theta) * c_e - s * c_g)
            * (I * s * pi * tau * (field.nbar + 1.0)).exp()
            / 2.0f64.sqrt();
        out.push(LargeNComponent {
            twice_k: s as i32,
            beta,
            qubit_state: Some(d_half(s, theta, tau)),
            field_alpha: alpha * (I * s * pi * tau).exp(),
        });
    }
    Ok(out)
}

/// The three-component decomposition of two qubits with a coherent field.
/// The `k = 0` component weight is time-independent; when it vanishes the
/// initial state is in the basin of attraction.
pub fn two_qubit_components(
    psi: &QubitState,
    field: &CoherentField,
    tau: f64,
) -> Result<Vec<LargeNComponent>> {
    if psi.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: psi.dim(),
        });
    }
    let (c_ee, c_eg, c_ge, c_gg) = (
        psi.amplitude(0),
        psi.amplitude(1),
        psi.amplitude(2),
        psi.amplitude(3),
    );
    let theta = field.theta;
    let alpha = field.alpha();
    let pi = std::f64::consts::PI;
    let e_th = C64::from_polar(1.0, theta);
    let mut out = Vec::with_capacity(3);
    for s in [1.0f64, -1.0] {
        let beta = (e_th * e_th * c_ee - s * e_th * (c_eg + c_ge) + c_gg)
            * (I * s * 2.0 * pi * tau * (field.nbar + 2.0)).exp()
            / 2.0;
        // D_{+/-1}(tau) = D_{+/-1/2}(2 tau) x D_{+/-1/2}(2 tau)
        let d1 = d_half(s, theta, 2.0 * tau);
        out.push(LargeNComponent {
            twice_k: 2 * s as i32,
            beta,
            qubit_state: Some(d1.tensor(&d1)),
            field_alpha: alpha * (I * s * 2.0 * pi * tau).exp(),
        });
    }
    let u = e_th * e_th * c_ee - c_gg;
    let v = c_eg - c_ge;
    let weight = (u.norm_sqr() + v.norm_sqr()).sqrt();
    let beta0 = C64::new(weight / 2.0f64.sqrt(), 0.0);
    let qubit_state = if weight > 1e-12 {
        let inv = C64::new(1.0 / (2.0f64.sqrt() * weight), 0.0);
        Some(
            QubitState::from_amplitudes(
                2,
                vec![
                    u * e_th.conj() * e_th.conj() * inv,
                    v * inv,
                    -v * inv,
                    -u * inv,
                ],
            )
            .unwrap(),
        )
    } else {
        None
    };
    out.push(LargeNComponent {
        twice_k: 0,
        beta: beta0,
        qubit_state,
        field_alpha: alpha,
    });
    Ok(out)
}

/// The two extreme (`k = +/- N_q/2`) components for any qubit number:
/// `|D_{+/- N_q/2}(tau)> = |D_{+/- 1/2}(N_q tau)>^{x N_q}` with weight
/// `<D_{+/- N_q/2}(0)|psi> e^{+/- i pi N_q (nbar + N_q) tau}`.
pub fn nq_extreme_components(
    psi: &QubitState,
    field: &CoherentField,
    tau: f64,
) -> Result<Vec<LargeNComponent>> {
    let nq = psi.n_qubits();
    let theta = field.theta;
    let alpha = field.alpha();
    let pi = std::f64::consts::PI;
    let mut out = Vec::with_capacity(2);
    for s in [1.0f64, -1.0] {
        let tensor_power = |t: f64| {
            let one = d_half(s, theta, t);
            let mut acc = one.clone();
            for _ in 1..nq {
                acc = acc.tensor(&one);
            }
            acc
        };
        let beta0 = tensor_power(0.0).overlap(psi);
        let beta = beta0 * (I * s * pi * nq as f64 * (field.nbar + nq as f64) * tau).exp();
        out.push(LargeNComponent {
            twice_k: s as i32 * nq as i32,
            beta,
            qubit_state: Some(tensor_power(nq as f64 * tau)),
            field_alpha: alpha * (I * s * pi * nq as f64 * tau).exp(),
        });
    }
    Ok(out)
}

/// Sums the components into a joint state over the truncated Fock space.
/// Returns the assembled (renormalized) state together with the norm defect
/// of the raw sum, a direct measure of the decomposition quality.
pub fn assemble(
    components: &[LargeNComponent],
    n_max: usize,
) -> Result<(JointState, f64)> {
    let nq = components
        .iter()
        .find_map(|c| c.qubit_state.as_ref().map(|q| q.n_qubits()))
        .ok_or_else(|| Error::InvalidState("no component carries a qubit state".into()))?;
    let mut mat = DMatrix::from_element(1 << nq, n_max + 1, C64::new(0.0, 0.0));
    for comp in components {
        if comp.beta.norm() < 1e-14 {
            continue;
        }
        let q = comp.qubit_state.as_ref().ok_or_else(|| {
            Error::InvalidState("component with non-zero weight lacks a qubit state".into())
        })?;
        let raw = DVector::from_vec(coherent_amplitudes_raw(comp.field_alpha, n_max));
        let kept = raw.norm();
        if 1.0 - kept * kept > crate::hilbert::TRUNCATION_TOL {
            return Err(Error::Truncation {
                lost: 1.0 - kept * kept,
                n_max,
            });
        }
        let f = raw / C64::new(kept, 0.0);
        for qi in 0..(1 << nq) {
            for n in 0..=n_max {
                mat[(qi, n)] += comp.beta * q.amplitude(qi) * f[n];
            }
        }
    }
    let norm = mat.norm();
    if norm < 1e-12 {
        return Err(Error::InvalidState("assembled state has zero norm".into()));
    }
    let defect = (norm - 1.0).abs();
    mat /= C64::new(norm, 0.0);
    Ok((JointState::from_matrix(nq, mat)?, defect))
}

/// Sorted revival times in units of `t_r`: `(k + 1/p)` and `(k + (p-1)/p)`
/// for `p = 1..N_q`, deduplicated exactly, up to `max_tau`.
pub fn revival_times(n_qubits: usize, max_tau: f64) -> Vec<f64> {
    let mut set: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut push = |num: u64, den: u64| {
        if num > 0 && num as f64 / den as f64 <= max_tau + 1e-12 {
            let g = num.gcd(&den);
            set.insert((num / g, den / g));
        }
    };
    let k_max = max_tau.ceil() as u64 + 1;
    for k in 0..=k_max {
        for p in 1..=n_qubits as u64 {
            push(k * p + 1, p);
            push(k * p + p - 1, p);
        }
    }
    let mut out: Vec<f64> = set.iter().map(|&(n, d)| n as f64 / d as f64).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Sorted attractor times in units of `t_r`: `(k + (2p - 1)/(2 N_q))` for
/// `p = 1..N_q`, up to `max_tau`.
pub fn attractor_times(n_qubits: usize, max_tau: f64) -> Vec<f64> {
    let mut set: BTreeSet<(u64, u64)> = BTreeSet::new();
    let den = 2 * n_qubits as u64;
    let k_max = max_tau.ceil() as u64 + 1;
    for k in 0..=k_max {
        for p in 1..=n_qubits as u64 {
            let num = k * den + 2 * p - 1;
            if num as f64 / den as f64 <= max_tau + 1e-12 {
                let g = num.gcd(&den);
                set.insert((num / g, den / g));
            }
        }
    }
    let mut out: Vec<f64> = set.iter().map(|&(n, d)| n as f64 / d as f64).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Equatorial dipole moment of the component `k` at `tau`:
/// `|k| (sign(k) cos(theta + 2|k| pi tau), sin(theta + 2|k| pi tau))`.
pub fn dipole_moment(twice_k: i32, theta: f64, tau: f64) -> (f64, f64) {
    if twice_k == 0 {
        return (0.0, 0.0);
    }
    let abs_k = twice_k.abs() as f64 / 2.0;
    let angle = theta + std::f64::consts::PI * twice_k.abs() as f64 * tau;
    let sign = twice_k.signum() as f64;
    (sign * abs_k * angle.cos(), abs_k * angle.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::one_qubit_analytic;
    use crate::hilbert::{all_ground, basis_index, embed_product, spin_coherent};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn attractor_is_spin_coherent_state() {
        for theta in [0.0, 0.8] {
            for (sign, s) in [(AttractorSign::Plus, 1.0), (AttractorSign::Minus, -1.0)] {
                for nq in [1, 3] {
                    let att = attractor_state(nq, theta, sign);
                    let z = I * s * C64::from_polar(1.0, theta);
                    let f = att.fidelity(&spin_coherent(z, nq));
                    assert!((f - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn attractor_dicke_matches_product_form() {
        for nq in [1, 2, 5] {
            let theta = 0.4;
            let d = attractor_dicke(nq, theta, AttractorSign::Minus);
            let p = crate::hilbert::DickeState::from_product(&attractor_state(
                nq,
                theta,
                AttractorSign::Minus,
            ))
            .unwrap();
            assert!((d.amplitudes() - p.amplitudes()).norm() < 1e-12);
        }
    }

    #[test]
    fn attractors_of_opposite_sign_are_orthogonal() {
        let plus = attractor_state(3, 0.2, AttractorSign::Plus);
        let minus = attractor_state(3, 0.2, AttractorSign::Minus);
        assert!(plus.overlap(&minus).norm() < 1e-12);
    }

    #[test]
    fn basin_three_qubit_a_zero() {
        // a = 0, N_q = 3: (sqrt(3)|m=1/2> + |m=-3/2>)/2.
        let spec = BasinSpec::new(3, c(0.0, 0.0), 0.0).unwrap();
        let d = basin_dicke(&spec).unwrap();
        assert!((d.amplitude(1).unwrap() - c(3.0f64.sqrt() / 2.0, 0.0)).norm() < 1e-12);
        assert!((d.amplitude(-3).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        assert!(d.amplitude(3).unwrap().norm() < 1e-12);
        assert!(d.amplitude(-1).unwrap().norm() < 1e-12);
    }

    #[test]
    fn basin_three_qubit_a_half() {
        // a = 1/2, N_q = 3: (|m=3/2> + sqrt(3)|m=-1/2>)/2, a product state.
        let spec = BasinSpec::new(3, c(0.5, 0.0), 0.0).unwrap();
        let d = basin_dicke(&spec).unwrap();
        assert!((d.amplitude(3).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        assert!((d.amplitude(-1).unwrap() - c(3.0f64.sqrt() / 2.0, 0.0)).norm() < 1e-12);
        assert!(d.amplitude(1).unwrap().norm() < 1e-12);
    }

    #[test]
    fn basin_rejects_overweight_a() {
        assert!(BasinSpec::new(2, c(0.8, 0.0), 0.0).is_err());
        assert!(BasinSpec::new(2, c(0.7, 0.0), 0.0).is_ok());
    }

    #[test]
    fn basin_cat_reconstruction() {
        for (nq, a, theta) in [
            (2, c(0.3, 0.2), 0.0),
            (3, c(0.1, -0.3), 0.7),
            (4, c(0.0, 0.0), 0.3),
        ] {
            let spec = BasinSpec::new(nq, a, theta).unwrap();
            let cat = basin_as_cat(&spec).unwrap();
            let d = basin_dicke(&spec).unwrap();
            let plus = crate::hilbert::spin_coherent_dicke(cat.z_plus, nq);
            let minus = crate::hilbert::spin_coherent_dicke(cat.z_minus, nq);
            let rebuilt: Vec<C64> = (0..=nq)
                .map(|j| {
                    cat.weight_plus * plus.amplitudes()[j]
                        + cat.weight_minus * minus.amplitudes()[j]
                })
                .collect();
            for (j, r) in rebuilt.iter().enumerate() {
                assert!((r - d.amplitudes()[j]).norm() < 1e-12, "nq={nq} j={j}");
            }
        }
    }

    #[test]
    fn one_qubit_decomposition_exact_at_start() {
        let field = CoherentField::new(50.0, 0.4);
        let psi = QubitState::from_amplitudes(1, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let comps = one_qubit_components(&psi, &field, 0.0).unwrap();
        let (assembled, defect) = assemble(&comps, 200).unwrap();
        assert!(defect < 1e-10);
        let exact = embed_product(&psi, &field, 200).unwrap();
        assert!((assembled.amplitudes() - exact.amplitudes()).camax() < 1e-10);
    }

    #[test]
    fn one_qubit_decomposition_tracks_exact_solution() {
        let field = CoherentField::new(50.0, 0.0);
        let psi = all_ground(1);
        // Wavepacket distortion grows with tau: the neglected quadratic term
        // of the sqrt(n+1) expansion dephases the packet by O(tau) regardless
        // of nbar, so the reachable overlap shrinks along the evolution.
        for (tau, floor) in [(0.1, 0.95), (0.25, 0.85), (0.5, 0.65)] {
            let t = tau * 2.0 * std::f64::consts::PI * 50.0f64.sqrt();
            let comps = one_qubit_components(&psi, &field, tau).unwrap();
            let (assembled, _) = assemble(&comps, 200).unwrap();
            let exact = one_qubit_analytic(c(0.0, 0.0), c(1.0, 0.0), &field, 1.0, t, 200).unwrap();
            let overlap = assembled.overlap(&exact).norm_sqr();
            assert!(overlap > floor, "tau = {tau}: overlap {overlap}");
        }
    }

    #[test]
    fn d_states_reach_attractor_at_half_revival() {
        // D_{+1/2}(1/2) = D_{-1/2}(1/2) = the plus attractor.
        let theta = 0.3;
        let att = attractor_state(1, theta, AttractorSign::Plus);
        for s in [1.0, -1.0] {
            let d = d_half(s, theta, 0.5);
            assert!((d.fidelity(&att) - 1.0).abs() < 1e-12);
        }
        // and the minus attractor at 3/2.
        let att = attractor_state(1, theta, AttractorSign::Minus);
        for s in [1.0, -1.0] {
            let d = d_half(s, theta, 1.5);
            assert!((d.fidelity(&att) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_qubit_decomposition_exact_at_start() {
        let field = CoherentField::new(50.0, 0.2);
        let amps = vec![c(0.5, 0.1), c(0.3, -0.2), c(-0.1, 0.4), c(0.2, 0.3)];
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi = QubitState::from_amplitudes(2, amps.into_iter().map(|a| a / norm).collect())
            .unwrap();
        let comps = two_qubit_components(&psi, &field, 0.0).unwrap();
        let (assembled, defect) = assemble(&comps, 200).unwrap();
        assert!(defect < 1e-10);
        let exact = embed_product(&psi, &field, 200).unwrap();
        assert!((assembled.amplitudes() - exact.amplitudes()).camax() < 1e-10);
    }

    #[test]
    fn all_ground_two_qubit_weights() {
        let field = CoherentField::new(50.0, 0.0);
        let comps = two_qubit_components(&all_ground(2), &field, 0.13).unwrap();
        for comp in &comps {
            match comp.twice_k {
                0 => assert!((comp.beta.norm() - 1.0 / 2.0f64.sqrt()).abs() < 1e-12),
                _ => assert!((comp.beta.norm() - 0.5).abs() < 1e-12),
            }
        }
    }

    #[test]
    fn basin_states_have_no_stationary_component() {
        for a in [c(0.0, 0.0), c(0.3, 0.2), c(0.0, -0.5)] {
            let spec = BasinSpec::new(2, a, 0.0).unwrap();
            let psi = basin_state(&spec).unwrap();
            let comps = two_qubit_components(&psi, &CoherentField::new(50.0, 0.0), 0.0).unwrap();
            let beta0 = comps.iter().find(|c| c.twice_k == 0).unwrap().beta.norm();
            assert!(beta0 < 1e-12, "a = {a}: beta_0 = {beta0}");
        }
        // ... while |gg> is outside the basin.
        let comps =
            two_qubit_components(&all_ground(2), &CoherentField::new(50.0, 0.0), 0.0).unwrap();
        assert!(comps.iter().find(|c| c.twice_k == 0).unwrap().beta.norm() > 0.5);
    }

    #[test]
    fn extreme_components_reduce_to_small_cases() {
        let field = CoherentField::new(50.0, 0.5);
        let tau = 0.21;
        let psi1 = QubitState::from_amplitudes(1, vec![c(0.28, 0.96), c(0.0, 0.0)]).unwrap();
        let a = one_qubit_components(&psi1, &field, tau).unwrap();
        let b = nq_extreme_components(&psi1, &field, tau).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.twice_k, y.twice_k);
            assert!((x.beta - y.beta).norm() < 1e-12);
            assert!((x.field_alpha - y.field_alpha).norm() < 1e-12);
            let (xq, yq) = (x.qubit_state.as_ref().unwrap(), y.qubit_state.as_ref().unwrap());
            assert!((xq.amplitudes() - yq.amplitudes()).norm() < 1e-12);
        }

        let mut amps = vec![c(0.0, 0.0); 4];
        amps[basis_index("ee").unwrap()] = c(0.6, 0.0);
        amps[basis_index("gg").unwrap()] = c(0.0, 0.8);
        let psi2 = QubitState::from_amplitudes(2, amps).unwrap();
        let a = two_qubit_components(&psi2, &field, tau).unwrap();
        let b = nq_extreme_components(&psi2, &field, tau).unwrap();
        for y in &b {
            let x = a.iter().find(|x| x.twice_k == y.twice_k).unwrap();
            assert!((x.beta - y.beta).norm() < 1e-12, "k = {}", y.twice_k);
            assert!((x.field_alpha - y.field_alpha).norm() < 1e-12);
            let (xq, yq) = (x.qubit_state.as_ref().unwrap(), y.qubit_state.as_ref().unwrap());
            assert!((xq.amplitudes() - yq.amplitudes()).norm() < 1e-12);
        }
    }

    #[test]
    fn revival_time_tables() {
        let close = |xs: &[f64], ys: &[f64]| {
            assert_eq!(xs.len(), ys.len(), "{xs:?} vs {ys:?}");
            for (x, y) in xs.iter().zip(ys) {
                assert!((x - y).abs() < 1e-12, "{xs:?} vs {ys:?}");
            }
        };
        close(&revival_times(1, 2.0), &[1.0, 2.0]);
        close(&revival_times(2, 1.0), &[0.5, 1.0]);
        close(
            &revival_times(3, 1.0),
            &[1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0],
        );
        close(
            &revival_times(4, 1.0),
            &[0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 1.0],
        );
        close(&attractor_times(1, 2.0), &[0.5, 1.5]);
        close(&attractor_times(2, 1.0), &[0.25, 0.75]);
        close(
            &attractor_times(3, 1.0),
            &[1.0 / 6.0, 0.5, 5.0 / 6.0],
        );
    }

    #[test]
    fn dipole_magnitude_and_rotation() {
        let theta = 0.3;
        let (x0, y0) = dipole_moment(2, theta, 0.0);
        assert!((x0 - theta.cos()).abs() < 1e-12);
        assert!((y0 - theta.sin()).abs() < 1e-12);
        let (x, y) = dipole_moment(2, theta, 0.25);
        // quarter revival at |k| = 1 rotates the dipole by pi/2
        assert!((x + theta.sin()).abs() < 1e-12);
        assert!((y - theta.cos()).abs() < 1e-12);
        assert_eq!(dipole_moment(0, theta, 0.4), (0.0, 0.0));
        let (xm, _) = dipole_moment(-2, 0.0, 0.0);
        assert!((xm + 1.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn prop_one_qubit_decomposition_quality(seed in 0u64..300, tau in 0.02f64..0.6) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let amps: Vec<C64> = (0..2).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let amps: Vec<C64> = amps.into_iter().map(|a| a / norm).collect();
            let psi = QubitState::from_amplitudes(1, amps.clone()).unwrap();
            let field = CoherentField::new(50.0, 0.0);
            let comps = one_qubit_components(&psi, &field, tau).unwrap();
            let (assembled, _) = assemble(&comps, 200).unwrap();
            let t = tau * 2.0 * std::f64::consts::PI * 50.0f64.sqrt();
            let exact = one_qubit_analytic(amps[0], amps[1], &field, 1.0, t, 200).unwrap();
            let overlap = assembled.overlap(&exact).norm_sqr();
            prop_assert!(overlap > 0.6, "tau = {}: overlap {}", tau, overlap);
        }
    }
}
