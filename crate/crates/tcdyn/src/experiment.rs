//! Deterministic experiment runner: named experiment presets, flat
//! `key = value` configuration, CSV emission.
//!
//! Outputs per run: `series.csv` (time axis in units of `t_r` plus one column
//! per scalar observable), `qgrid_*.csv` files for requested phase-space
//! snapshots, and a `meta` file echoing the resolved configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{build_blocks, initial_state, TimeGrid};
use crate::error::{Error, Result};
use crate::hilbert::{
    coherent_amplitudes_raw, partial_trace_field, spin_coherent, DickeState,
    JointState, ModelConfig, QubitState, C64,
};
use crate::largen::{
    attractor_dicke, attractor_state, attractor_times, basin_dicke, basin_state, revival_times,
    AttractorSign, BasinSpec,
};
use crate::measures::{
    basis_probability, entropy, reduce_density, spin_q_pure_dicke, state_probability, tangle,
    PhaseGrid,
};

/// Scalar per-time-point observable emitted as one `series.csv` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Rescaled entropy of the qubits.
    Entropy,
    /// Rescaled entropy of the field (equal to `Entropy` for pure joints).
    EntropyField,
    /// Probability of every qubit in `|g>`.
    PGround,
    /// Probability of the `+` attractor state.
    PAttPlus,
    /// Probability of the `-` attractor state.
    PAttMinus,
    /// Probability of the initial qubit state.
    PInit,
    /// Two-qubit tangle of `rho_q` (`N_q = 2`).
    Tangle,
    /// Two-qubit concurrence of `rho_q` (`N_q = 2`).
    Concurrence,
    /// Unclamped `lambda_1 - lambda_2 - lambda_3 - lambda_4` (`N_q = 2`).
    RawTangle,
    /// Tangle of the pair `(i, j)` after tracing out the other qubits.
    PairTangle(usize, usize),
}

impl Observable {
    pub fn column(&self) -> String {
        match self {
            Observable::Entropy => "entropy".into(),
            Observable::EntropyField => "entropy_field".into(),
            Observable::PGround => "p_ground".into(),
            Observable::PAttPlus => "p_att_plus".into(),
            Observable::PAttMinus => "p_att_minus".into(),
            Observable::PInit => "p_init".into(),
            Observable::Tangle => "tangle".into(),
            Observable::Concurrence => "concurrence".into(),
            Observable::RawTangle => "raw_tangle".into(),
            Observable::PairTangle(i, j) => format!("pair_tangle_{i}{j}"),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let need_two = matches!(
            self,
            Observable::Tangle | Observable::Concurrence | Observable::RawTangle
        );
        if need_two && n_qubits != 2 {
            return Err(Error::InvalidParameter(format!(
                "observable {} requires N_q = 2, got {n_qubits}",
                self.column()
            )));
        }
        if let Observable::PairTangle(i, j) = self {
            if i >= j || *j >= n_qubits {
                return Err(Error::InvalidParameter(format!(
                    "pair_tangle_{i}{j} invalid for N_q = {n_qubits}"
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Observable::Entropy),
            "entropy_field" => Ok(Observable::EntropyField),
            "p_ground" => Ok(Observable::PGround),
            "p_att_plus" => Ok(Observable::PAttPlus),
            "p_att_minus" => Ok(Observable::PAttMinus),
            "p_init" => Ok(Observable::PInit),
            "tangle" => Ok(Observable::Tangle),
            "concurrence" => Ok(Observable::Concurrence),
            "raw_tangle" => Ok(Observable::RawTangle),
            other => {
                if let Some(rest) = other.strip_prefix("pair_tangle_") {
                    let digits: Vec<u32> = rest.chars().filter_map(|c| c.to_digit(10)).collect();
                    if digits.len() == 2 && rest.len() == 2 {
                        return Ok(Observable::PairTangle(
                            digits[0] as usize,
                            digits[1] as usize,
                        ));
                    }
                }
                Err(Error::InvalidParameter(format!("unknown observable '{other}'")))
            }
        }
    }
}

/// Complete, resolved description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: String,
    pub model: ModelConfig,
    /// Initial qubit state descriptor; see [`parse_initial`].
    pub initial: String,
    /// Time grid bounds in units of `t_r`.
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
    pub observables: Vec<Observable>,
    /// Times (units of `t_r`) at which to emit a field Q grid.
    pub qgrid_times: Vec<f64>,
    /// Times (units of `t_r`) at which to emit a spin Q grid.
    pub spin_qgrid_times: Vec<f64>,
    /// Points per Q grid axis.
    pub qgrid_points: usize,
}

impl ExperimentConfig {
    fn series_requested(&self) -> bool {
        !self.observables.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.series_requested() && self.points < 2 {
            return Err(Error::InvalidParameter(
                "time grid needs at least 2 points".into(),
            ));
        }
        if self.t_end < self.t_start {
            return Err(Error::InvalidParameter("t_end before t_start".into()));
        }
        for obs in &self.observables {
            obs.validate(self.model.n_qubits)?;
        }
        if self.qgrid_points < 2 {
            return Err(Error::InvalidParameter("qgrid_points must be >= 2".into()));
        }
        Ok(())
    }
}

/// Parses an initial qubit state descriptor:
///
/// - `ground`, `excited`: every qubit in `|g>` resp. `|e>`,
/// - `attractor+`, `attractor-`: the attractor states for the configured
///   `theta`,
/// - `basin:<re>[,<im>]`: basin-of-attraction state with the given `a`,
/// - `dicke:<re>,<im>;...`: `N_q + 1` Dicke-basis amplitudes,
/// - `product:<re>,<im>;...`: `2^N_q` product-basis amplitudes.
pub fn parse_initial(descriptor: &str, n_qubits: usize, theta: f64) -> Result<QubitState> {
    match parse_initial_dicke(descriptor, n_qubits, theta) {
        Ok(d) => return Ok(d.to_product_basis()),
        Err(Error::InvalidParameter(_)) if descriptor.starts_with("product:") => {}
        Err(e) => return Err(e),
    }
    let body = descriptor.strip_prefix("product:").unwrap();
    let amps = parse_complex_list(body)?;
    QubitState::from_amplitudes(n_qubits, amps)
}

/// The symmetric-subspace descriptors of [`parse_initial`]; usable at large
/// `N_q` where the product basis is out of reach.
pub fn parse_initial_dicke(descriptor: &str, n_qubits: usize, theta: f64) -> Result<DickeState> {
    if descriptor == "ground" {
        return DickeState::basis(n_qubits, -(n_qubits as i32));
    }
    if descriptor == "excited" {
        return DickeState::basis(n_qubits, n_qubits as i32);
    }
    if descriptor == "attractor+" {
        return Ok(attractor_dicke(n_qubits, theta, AttractorSign::Plus));
    }
    if descriptor == "attractor-" {
        return Ok(attractor_dicke(n_qubits, theta, AttractorSign::Minus));
    }
    if let Some(body) = descriptor.strip_prefix("basin:") {
        let parts: Vec<&str> = body.split(',').collect();
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number '{s}' in '{descriptor}'")))
        };
        let a = match parts.as_slice() {
            [re] => C64::new(parse(re)?, 0.0),
            [re, im] => C64::new(parse(re)?, parse(im)?),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "basin descriptor '{descriptor}' needs 1 or 2 numbers"
                )))
            }
        };
        return basin_dicke(&BasinSpec::new(n_qubits, a, theta)?);
    }
    if let Some(body) = descriptor.strip_prefix("dicke:") {
        return DickeState::from_amplitudes(n_qubits, parse_complex_list(body)?);
    }
    Err(Error::InvalidParameter(format!(
        "unrecognized initial state '{descriptor}'"
    )))
}

fn parse_complex_list(body: &str) -> Result<Vec<C64>> {
    body.split(';')
        .map(|pair| {
            let nums: Vec<&str> = pair.split(',').collect();
            if nums.len() != 2 {
                return Err(Error::InvalidParameter(format!(
                    "amplitude '{pair}' must be 're,im'"
                )));
            }
            let re = nums[0].trim().parse::<f64>();
            let im = nums[1].trim().parse::<f64>();
            match (re, im) {
                (Ok(re), Ok(im)) => Ok(C64::new(re, im)),
                _ => Err(Error::InvalidParameter(format!(
                    "bad amplitude '{pair}'"
                ))),
            }
        })
        .collect()
}

/// Whether a qubit state lies in the basin of attraction: its large-nbar
/// decomposition carries no interior (`|k| < N_q/2`) components, which for
/// the basin family means it matches a basin state up to a global phase.
pub fn is_in_basin(psi: &QubitState, theta: f64) -> bool {
    let nq = psi.n_qubits();
    let dicke = match DickeState::from_product(psi) {
        Ok(d) => d,
        Err(_) => return false,
    };
    if nq == 1 {
        return true;
    }
    // Strip the fixed phases so every even rung should read a common `a` and
    // every odd rung a common non-negative real, up to one global phase.
    let u: Vec<C64> = (0..=nq)
        .map(|j| {
            dicke.amplitudes()[j] * C64::from_polar(1.0, j as f64 * theta)
                / crate::hilbert::binomial(nq, j).sqrt()
        })
        .collect();
    let odd_mag: f64 = u.iter().skip(1).step_by(2).map(|x| x.norm_sqr()).sum::<f64>();
    let global = if odd_mag.sqrt() > 1e-9 {
        C64::from_polar(1.0, u[1].arg())
    } else {
        C64::from_polar(1.0, u[0].arg())
    };
    let a = u[0] * global.conj();
    let spec = match BasinSpec::new(nq, a, theta) {
        Ok(s) => s,
        Err(_) => return false,
    };
    match basin_state(&spec) {
        Ok(reference) => reference.fidelity(psi) > 1.0 - 1e-9,
        Err(_) => false,
    }
}

/// A named, fully resolved experiment.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: ExperimentConfig,
}

fn series_config(
    preset: &str,
    n_qubits: usize,
    initial: &str,
    t_end: f64,
    observables: Vec<Observable>,
) -> ExperimentConfig {
    ExperimentConfig {
        preset: preset.into(),
        model: ModelConfig::new(n_qubits, 50.0, 0.0),
        initial: initial.into(),
        t_start: 0.0,
        t_end,
        points: (2000.0 * t_end).round() as usize + 1,
        observables,
        qgrid_times: Vec::new(),
        spin_qgrid_times: Vec::new(),
        qgrid_points: 201,
    }
}

/// Presets in stable order, one per canned experiment plus the revival-time
/// table.
pub fn presets() -> Vec<Preset> {
    use Observable::*;
    let basic = || vec![Entropy, PGround, PAttPlus];
    let sudden = vec![Entropy, PGround, Tangle, Concurrence, RawTangle];
    let w = 1.0 / 2.0f64.sqrt();
    let fig7 = |name: &'static str, desc: &'static str, amps: [C64; 4]| Preset {
        name,
        description: desc,
        config: series_config(
            name,
            2,
            &format!(
                "product:{},{};{},{};{},{};{},{}",
                amps[0].re, amps[0].im, amps[1].re, amps[1].im, amps[2].re, amps[2].im, amps[3].re,
                amps[3].im
            ),
            1.0,
            sudden.clone(),
        ),
    };
    let c = C64::new;
    vec![
        Preset {
            name: "fig1",
            description: "one qubit in |g>: entropy dip and attractor at t_r/2",
            config: series_config("fig1", 1, "ground", 2.0, basic()),
        },
        Preset {
            name: "fig2",
            description: "field Q snapshots of the two counter-rotating wavepackets (one qubit)",
            config: ExperimentConfig {
                qgrid_times: vec![0.0, 0.125, 0.5, 0.95, 1.5, 2.0],
                ..series_config("fig2", 1, "ground", 2.0, vec![Entropy])
            },
        },
        Preset {
            name: "fig4a",
            description: "two qubits in |gg>, outside the basin: partial entropy dip",
            config: series_config("fig4a", 2, "ground", 1.0, basic()),
        },
        Preset {
            name: "fig4b",
            description: "two qubits in (|ee>+|gg>)/sqrt(2), in basin: attractor at t_r/4",
            config: series_config(
                "fig4b",
                2,
                "basin:0.7071067811865476",
                1.0,
                basic(),
            ),
        },
        Preset {
            name: "fig6",
            description: "collapse and revival of entanglement for (|ee>+|gg>)/sqrt(2)",
            config: series_config(
                "fig6",
                2,
                "basin:0.7071067811865476",
                1.0,
                vec![Entropy, PGround, Tangle],
            ),
        },
        fig7(
            "fig7a",
            "concurrence for (1/sqrt(10))|ee> - sqrt(9/10)|gg>",
            [
                c(0.1f64.sqrt(), 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(-0.9f64.sqrt(), 0.0),
            ],
        ),
        fig7(
            "fig7b",
            "concurrence for (|eg> + i|ge>)/sqrt(2): zero at t_r/2",
            [c(0.0, 0.0), c(w, 0.0), c(0.0, w), c(0.0, 0.0)],
        ),
        fig7(
            "fig7c",
            "sudden death of entanglement for sqrt(1/20)|ee> + sqrt(19/20)|gg>",
            [
                c(0.05f64.sqrt(), 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.95f64.sqrt(), 0.0),
            ],
        ),
        fig7(
            "fig7d",
            "sudden death for the Bell-like state (|eg> + e^{i pi/4}|ge>)/sqrt(2)",
            [
                c(0.0, 0.0),
                c(w, 0.0),
                c(
                    w * std::f64::consts::FRAC_PI_4.cos(),
                    w * std::f64::consts::FRAC_PI_4.sin(),
                ),
                c(0.0, 0.0),
            ],
        ),
        fig7(
            "fig7e",
            "in-basin comparison state (|ee> + |gg>)/sqrt(2)",
            [c(w, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(w, 0.0)],
        ),
        Preset {
            name: "fig9a",
            description: "three qubits, in-basin a = 1/2: attractor at t_r/6",
            config: series_config("fig9a", 3, "basin:0.5", 1.0, basic()),
        },
        Preset {
            name: "fig9b",
            description: "four qubits, in-basin a = 0: attractor at t_r/8",
            config: series_config("fig9b", 4, "basin:0", 1.0, basic()),
        },
        Preset {
            name: "fig10",
            description: "spin Q of the 40-qubit basin (a = 0) spin cat at t = 0",
            config: ExperimentConfig {
                preset: "fig10".into(),
                model: ModelConfig::new(40, 50.0, 0.0),
                initial: "basin:0".into(),
                t_start: 0.0,
                t_end: 0.0,
                points: 1,
                observables: Vec::new(),
                qgrid_times: Vec::new(),
                spin_qgrid_times: vec![0.0],
                qgrid_points: 201,
            },
        },
        Preset {
            name: "fig11",
            description: "spin Q of the 40-qubit attractor state (t = t_r/80)",
            config: ExperimentConfig {
                preset: "fig11".into(),
                model: ModelConfig::new(40, 50.0, 0.0),
                initial: "attractor+".into(),
                t_start: 0.0,
                t_end: 0.0,
                points: 1,
                observables: Vec::new(),
                qgrid_times: Vec::new(),
                spin_qgrid_times: vec![0.0],
                qgrid_points: 201,
            },
        },
        Preset {
            name: "fig12",
            description: "three-qubit GHZ-class basin state (a = 0): revival of P_init",
            config: series_config(
                "fig12",
                3,
                "basin:0",
                1.0,
                vec![Entropy, PGround, PInit, PairTangle(0, 1)],
            ),
        },
        Preset {
            name: "table1",
            description: "analytic revival and attractor times for N_q = 1..5",
            config: ExperimentConfig {
                preset: "table1".into(),
                model: ModelConfig::new(1, 50.0, 0.0),
                initial: "ground".into(),
                t_start: 0.0,
                t_end: 1.0,
                points: 2,
                observables: Vec::new(),
                qgrid_times: Vec::new(),
                spin_qgrid_times: Vec::new(),
                qgrid_points: 201,
            },
        },
    ]
}

pub fn find_preset(name: &str) -> Result<Preset> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset {
            name: name.into(),
            available: presets().iter().map(|p| p.name.to_string()).collect(),
        })
}

/// Applies one flat `key = value` override.
pub fn apply_setting(config: &mut ExperimentConfig, key: &str, value: &str) -> Result<()> {
    let bad = |what: &str| Error::InvalidParameter(format!("bad value '{value}' for {what}"));
    match key {
        "n_qubits" => {
            config.model.n_qubits = value.parse().map_err(|_| bad("n_qubits"))?;
            config.model.fock_cutoff = crate::hilbert::default_fock_cutoff(config.model.nbar);
        }
        "nbar" => {
            config.model.nbar = value.parse().map_err(|_| bad("nbar"))?;
            config.model.fock_cutoff = crate::hilbert::default_fock_cutoff(config.model.nbar);
        }
        "theta" => config.model.theta = value.parse().map_err(|_| bad("theta"))?,
        "coupling" => config.model.coupling = value.parse().map_err(|_| bad("coupling"))?,
        "fock_cutoff" => config.model.fock_cutoff = value.parse().map_err(|_| bad("fock_cutoff"))?,
        "initial" => config.initial = value.to_string(),
        "t_start" => config.t_start = value.parse().map_err(|_| bad("t_start"))?,
        "t_end" => config.t_end = value.parse().map_err(|_| bad("t_end"))?,
        "points" => config.points = value.parse().map_err(|_| bad("points"))?,
        "qgrid_points" => config.qgrid_points = value.parse().map_err(|_| bad("qgrid_points"))?,
        "observables" => {
            config.observables = value
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse())
                .collect::<Result<_>>()?;
        }
        "qgrid_times" => config.qgrid_times = parse_f64_list(value)?,
        "spin_qgrid_times" => config.spin_qgrid_times = parse_f64_list(value)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown configuration key '{other}'"
            )))
        }
    }
    Ok(())
}

fn parse_f64_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number '{s}'")))
        })
        .collect()
}

/// Parses a flat `key = value` configuration file body (`#` comments).
pub fn apply_config_text(config: &mut ExperimentConfig, text: &str) -> Result<()> {
    for line in text.lines() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidParameter(format!("config line '{line}' is not 'key = value'"))
        })?;
        apply_setting(config, key.trim(), value.trim())?;
    }
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{:.11e}", x)
}

fn tau_tag(tau: f64) -> String {
    format!("{tau}").replace('.', "p").replace('-', "m")
}

/// Field Q function of a pure joint state, using the low-rank structure of
/// `rho_f` (rank at most `2^N_q`).
fn q_function_of_state(state: &JointState, alpha: C64) -> f64 {
    let n_max = state.fock_cutoff();
    let raw = coherent_amplitudes_raw(alpha, n_max);
    let mut total = 0.0;
    for q in 0..state.qubit_dim() {
        let mut amp = C64::new(0.0, 0.0);
        for (n, cn) in raw.iter().enumerate() {
            amp += cn.conj() * state.amplitude(q, n);
        }
        total += amp.norm_sqr();
    }
    total / std::f64::consts::PI
}

fn spin_q_of_state(state: &JointState, z: C64) -> f64 {
    let nq = state.n_qubits();
    let v = spin_coherent(z, nq);
    let mut total = 0.0;
    for n in 0..=state.fock_cutoff() {
        let mut amp = C64::new(0.0, 0.0);
        for q in 0..state.qubit_dim() {
            amp += v.amplitude(q).conj() * state.amplitude(q, n);
        }
        total += amp.norm_sqr();
    }
    total / (1.0 + z.norm_sqr()).powi(2)
}

/// Runs one experiment, writing its artifacts into `out_dir`. Returns the
/// paths written, `series.csv` first when present.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    if config.preset == "table1" {
        return run_table1(config, out_dir);
    }
    if config.model.n_qubits > 12 {
        return run_symmetric_static(config, out_dir);
    }

    let model = &config.model;
    let psi0 = parse_initial(&config.initial, model.n_qubits, model.theta)?;
    let joint0 = initial_state(model, &psi0)?;
    let in_basin = is_in_basin(&psi0, model.theta);
    let t_r = model.t_r();

    let mut written = Vec::new();

    if config.series_requested() {
        let prop = build_blocks(model)?;
        let att_plus = attractor_state(model.n_qubits, model.theta, AttractorSign::Plus);
        let att_minus = attractor_state(model.n_qubits, model.theta, AttractorSign::Minus);
        let ground = (1 << model.n_qubits) - 1;
        let grid = TimeGrid::new(config.t_start * t_r, config.t_end * t_r, config.points)?;
        let times = grid.times();
        let rows: Vec<Result<Vec<f64>>> = times
            .par_iter()
            .map(|&t| {
                let state = prop.evolve(&joint0, t)?;
                let leak = state.top_level_occupancy();
                if leak > 1e-8 {
                    return Err(Error::Truncation {
                        lost: leak,
                        n_max: model.fock_cutoff,
                    });
                }
                let rho_q = partial_trace_field(&state);
                let mut row = Vec::with_capacity(config.observables.len());
                for obs in &config.observables {
                    let value = match obs {
                        Observable::Entropy => entropy(&rho_q, model.n_qubits)?,
                        Observable::EntropyField => entropy(
                            &crate::hilbert::partial_trace_qubits(&state),
                            model.n_qubits,
                        )?,
                        Observable::PGround => basis_probability(&state, ground),
                        Observable::PAttPlus => state_probability(&state, &att_plus)?,
                        Observable::PAttMinus => state_probability(&state, &att_minus)?,
                        Observable::PInit => state_probability(&state, &psi0)?,
                        Observable::Tangle => tangle(&rho_q)?.tangle,
                        Observable::Concurrence => tangle(&rho_q)?.concurrence,
                        Observable::RawTangle => tangle(&rho_q)?.raw,
                        Observable::PairTangle(i, j) => {
                            tangle(&reduce_density(&rho_q, &[*i, *j])?)?.tangle
                        }
                    };
                    row.push(value);
                }
                Ok(row)
            })
            .collect();

        let mut csv = String::from("t_over_tr");
        for obs in &config.observables {
            csv.push(',');
            csv.push_str(&obs.column());
        }
        csv.push('\n');
        for (t, row) in times.iter().zip(rows) {
            let row = row?;
            csv.push_str(&fmt(t / t_r));
            for value in row {
                csv.push(',');
                csv.push_str(&fmt(value));
            }
            csv.push('\n');
        }
        let path = out_dir.join("series.csv");
        std::fs::write(&path, csv)?;
        written.push(path);
    }

    if !config.qgrid_times.is_empty() || !config.spin_qgrid_times.is_empty() {
        let prop = build_blocks(model)?;
        let half = model.nbar.sqrt() + 4.0;
        let field_grid = PhaseGrid::square(half, config.qgrid_points);
        for &tau in &config.qgrid_times {
            let state = prop.evolve(&joint0, tau * t_r)?;
            let path = out_dir.join(format!("qgrid_field_{}.csv", tau_tag(tau)));
            write_grid(&path, &field_grid, |a| q_function_of_state(&state, a))?;
            written.push(path);
        }
        let spin_grid = PhaseGrid::square(3.0, config.qgrid_points);
        for &tau in &config.spin_qgrid_times {
            let state = prop.evolve(&joint0, tau * t_r)?;
            let path = out_dir.join(format!("qgrid_spin_{}.csv", tau_tag(tau)));
            write_grid(&path, &spin_grid, |z| spin_q_of_state(&state, z))?;
            written.push(path);
        }
    }

    written.push(write_meta(config, out_dir, Some(in_basin))?);
    Ok(written)
}

/// Static spin-Q snapshots in the symmetric subspace for large `N_q`, where
/// the full product space is out of reach and only `t = 0` states
/// (basin / attractor family) are supported.
fn run_symmetric_static(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if config.series_requested() || !config.qgrid_times.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "N_q = {} supports only spin Q snapshots of the initial state",
            config.model.n_qubits
        )));
    }
    let dicke = parse_initial_dicke(&config.initial, config.model.n_qubits, config.model.theta)?;
    let spin_grid = PhaseGrid::square(3.0, config.qgrid_points);
    let mut written = Vec::new();
    for &tau in &config.spin_qgrid_times {
        if tau != 0.0 {
            return Err(Error::InvalidParameter(
                "large-N_q spin Q snapshots are only available at t = 0".into(),
            ));
        }
        let path = out_dir.join(format!("qgrid_spin_{}.csv", tau_tag(tau)));
        write_grid(&path, &spin_grid, |z| spin_q_pure_dicke(&dicke, z))?;
        written.push(path);
    }
    written.push(write_meta(config, out_dir, None)?);
    Ok(written)
}

/// Analytic revival and attractor time table for `N_q = 1..5`.
fn run_table1(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut csv = String::from("n_qubits,event,t_over_tr\n");
    for nq in 1..=5usize {
        for tau in revival_times(nq, 1.0) {
            let _ = writeln!(csv, "{nq},revival,{}", fmt(tau));
        }
        for tau in attractor_times(nq, 1.0) {
            let _ = writeln!(csv, "{nq},attractor,{}", fmt(tau));
        }
    }
    let path = out_dir.join("series.csv");
    std::fs::write(&path, csv)?;
    let meta = write_meta(config, out_dir, None)?;
    Ok(vec![path, meta])
}

fn write_grid<F>(path: &Path, grid: &PhaseGrid, f: F) -> Result<()>
where
    F: Fn(C64) -> f64 + Sync,
{
    let points = grid.points();
    let values: Vec<f64> = points.par_iter().map(|&p| f(p)).collect();
    let mut csv = String::from("re,im,value\n");
    for (p, v) in points.iter().zip(values) {
        let _ = writeln!(csv, "{},{},{}", fmt(p.re), fmt(p.im), fmt(v));
    }
    std::fs::write(path, csv)?;
    Ok(())
}

fn write_meta(config: &ExperimentConfig, out_dir: &Path, in_basin: Option<bool>) -> Result<PathBuf> {
    let m = &config.model;
    let mut text = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(text, "{k} = {v}");
    };
    kv("preset", config.preset.clone());
    kv("n_qubits", m.n_qubits.to_string());
    kv("nbar", m.nbar.to_string());
    kv("theta", m.theta.to_string());
    kv("coupling", m.coupling.to_string());
    kv("fock_cutoff", m.fock_cutoff.to_string());
    kv("t_r", fmt(m.t_r()));
    kv("t_c", fmt(m.t_c()));
    kv("initial", config.initial.clone());
    kv("t_start", config.t_start.to_string());
    kv("t_end", config.t_end.to_string());
    kv("points", config.points.to_string());
    kv(
        "observables",
        config
            .observables
            .iter()
            .map(|o| o.column())
            .collect::<Vec<_>>()
            .join(","),
    );
    kv(
        "qgrid_times",
        config
            .qgrid_times
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    kv(
        "spin_qgrid_times",
        config
            .spin_qgrid_times
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    kv("qgrid_points", config.qgrid_points.to_string());
    if let Some(b) = in_basin {
        kv("in_basin", b.to_string());
    }
    let path = out_dir.join("meta");
    std::fs::write(&path, text)?;
    Ok(path)
}
