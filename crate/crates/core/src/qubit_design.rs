//! Qubit figures of merit for an inductively shunted capacitor network.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcap::CapacitorNetwork;
use crate::spectrum::{
    solve_charge_basis_with, turning_point, GridSpec, KerrParams, SolverSettings, Spectrum,
};
use crate::units::{Scaling, BOLTZMANN, ELEMENTARY_CHARGE, HBAR, PLANCK};

/// Puddle density above which the quantum capacitance is washed out [cm^-2].
pub const PUDDLE_DENSITY_LIMIT: f64 = 1e8;
/// Puddle depth above which the quantum capacitance is washed out [meV].
pub const PUDDLE_DEPTH_LIMIT: f64 = 10.0;

/// A capacitor network closed by a linear inductor.
#[derive(Debug, Clone)]
pub struct CircuitSpec {
    network: CapacitorNetwork,
    inductance: f64,
    design_frequency: Option<f64>,
}

impl CircuitSpec {
    pub fn with_inductance(network: CapacitorNetwork, inductance: f64) -> Result<Self> {
        if !(inductance.is_finite() && inductance > 0.0) {
            return Err(Error::InvalidCircuit(format!(
                "inductance must be finite and positive, got {inductance}"
            )));
        }
        Ok(Self {
            network,
            inductance,
            design_frequency: None,
        })
    }

    /// Picks the inductance that puts the linearized resonance at `frequency` [Hz].
    pub fn with_design_frequency(network: CapacitorNetwork, frequency: f64) -> Result<Self> {
        let inductance = design_inductor(&network, frequency)?;
        Ok(Self {
            network,
            inductance,
            design_frequency: Some(frequency),
        })
    }

    pub fn network(&self) -> &CapacitorNetwork {
        &self.network
    }

    pub fn inductance(&self) -> f64 {
        self.inductance
    }

    pub fn design_frequency(&self) -> Option<f64> {
        self.design_frequency
    }

    /// Zero-bias LC frequency [Hz].
    pub fn linear_frequency(&self) -> f64 {
        1.0 / (2.0 * PI * (self.inductance * self.network.linearized_capacitance()).sqrt())
    }

    /// Solver units anchored at the zero-bias linearized circuit.
    pub fn scaling(&self) -> Result<Scaling> {
        Scaling::from_lc(self.inductance, self.network.linearized_capacitance())
    }

    /// Same inductor with the quantum capacitor at another temperature.
    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Ok(self.with_network(self.network.with_temperature(temperature)?))
    }

    /// Same circuit around a different network, keeping the inductance.
    pub fn with_network(&self, network: CapacitorNetwork) -> Self {
        Self {
            network,
            ..self.clone()
        }
    }
}

/// Scaling of the linearized circuit.
pub fn make_scaling(circuit: &CircuitSpec) -> Result<Scaling> {
    circuit.scaling()
}

/// `L = 1 / ((2 pi f)^2 C0)` for the zero-bias capacitance of `network`.
pub fn design_inductor(network: &CapacitorNetwork, frequency: f64) -> Result<f64> {
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::InvalidCircuit(format!(
            "design frequency must be finite and positive, got {frequency}"
        )));
    }
    let omega = 2.0 * PI * frequency;
    Ok(1.0 / (omega * omega * network.linearized_capacitance()))
}

/// Which energy defines the zero-point amplitude.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPointConvention {
    /// Potential energy equal to the full half quantum `hbar w01 / 2`.
    #[default]
    HalfQuantum,
    /// Virial split: potential energy `hbar w01 / 4`.
    QuarterQuantum,
}

impl ZeroPointConvention {
    fn fraction(self) -> f64 {
        match self {
            ZeroPointConvention::HalfQuantum => 0.5,
            ZeroPointConvention::QuarterQuantum => 0.25,
        }
    }
}

/// Charge-puddle characteristics of the graphene sheets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PuddleParams {
    /// Surface density [cm^-2].
    pub density: f64,
    /// Potential depth [meV].
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub puddle_density_ok: bool,
    pub puddle_depth_ok: bool,
    pub temperature_ok: bool,
    pub messages: Vec<String>,
}

impl FeasibilityReport {
    pub fn all_ok(&self) -> bool {
        self.puddle_density_ok && self.puddle_depth_ok && self.temperature_ok
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroPoint {
    /// Charge amplitude [C].
    pub q_zp: f64,
    /// Voltage across the quantum capacitor at `q_zp` [V].
    pub v_zp: f64,
    /// `q_zp / e`.
    pub n_zp: f64,
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub n_levels: usize,
    pub grid: GridSpec,
    pub settings: SolverSettings,
    pub zero_point: ZeroPointConvention,
    pub puddles: PuddleParams,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            n_levels: 3,
            grid: GridSpec::auto(),
            settings: SolverSettings::default(),
            zero_point: ZeroPointConvention::default(),
            puddles: PuddleParams::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QubitSolution {
    /// `(E1 - E0) / h` [Hz].
    pub f_actual: f64,
    /// `(w01 - w12) / w01` in percent.
    pub anharmonicity: f64,
    /// Nonlinear interaction time [s].
    pub tau: f64,
    pub v_zp: f64,
    pub n_zp: f64,
    pub q_zp: f64,
    pub spectrum: Spectrum,
    pub feasibility: FeasibilityReport,
}

/// Spectrum and figures of merit with default options.
pub fn analyze(circuit: &CircuitSpec, n_levels: usize) -> Result<QubitSolution> {
    analyze_with(
        circuit,
        &AnalysisOptions {
            n_levels,
            ..AnalysisOptions::default()
        },
    )
}

pub fn analyze_with(circuit: &CircuitSpec, options: &AnalysisOptions) -> Result<QubitSolution> {
    if options.n_levels < 3 {
        return Err(Error::InvalidArgument(format!(
            "anharmonicity needs at least 3 levels, got {}",
            options.n_levels
        )));
    }
    let spectrum = solve_charge_basis_with(
        circuit.network(),
        circuit.inductance(),
        options.n_levels,
        options.grid,
        options.settings,
    )?;
    let f_actual = (spectrum.levels[1] - spectrum.levels[0]) / PLANCK;
    let anharmonicity = 100.0 * spectrum.anharmonicity().expect("three levels");
    let tau = extract_tau(&spectrum)?;
    let zp = zero_point_with(circuit, &spectrum, options.zero_point)?;
    let feasibility = check_feasibility(
        circuit,
        options.puddles.density,
        options.puddles.depth,
        f_actual,
    );
    Ok(QubitSolution {
        f_actual,
        anharmonicity,
        tau,
        v_zp: zp.v_zp,
        n_zp: zp.n_zp,
        q_zp: zp.q_zp,
        spectrum,
        feasibility,
    })
}

/// Rayleigh-Schrodinger series to third order for level `n` of
/// `n + 1/2 + g (a + a^dagger)^4`, in units of `hbar w`.
pub fn kerr_level_series(n: u32, g: f64) -> f64 {
    let n = n as f64;
    let n2 = n * n;
    let n3 = n2 * n;
    let n4 = n3 * n;
    n + 0.5 + 3.0 * g * (2.0 * n2 + 2.0 * n + 1.0)
        - 2.0 * g * g * (34.0 * n3 + 51.0 * n2 + 59.0 * n + 21.0)
        + 4.0 * g * g * g * (375.0 * n4 + 750.0 * n3 + 1416.0 * n2 + 1041.0 * n + 333.0)
}

fn series_anharmonicity(g: f64) -> f64 {
    let e0 = kerr_level_series(0, g);
    let e1 = kerr_level_series(1, g);
    let e2 = kerr_level_series(2, g);
    ((e1 - e0) - (e2 - e1)) / (e1 - e0)
}

/// Coupling range over which the truncated series is monotone.
const SERIES_COUPLING_LIMIT: f64 = 0.02;

/// Interaction time `tau` of the quartic model with `alpha = 0` that reproduces
/// the spectrum's anharmonicity.
pub fn extract_tau(spectrum: &Spectrum) -> Result<f64> {
    Ok(extract_kerr_model(spectrum)?.tau)
}

/// Bare frequency and interaction time of the `alpha = 0` quartic model
/// matching the spectrum's `w01` and anharmonicity.
///
/// Inverts the third-order perturbation series for `A(w tau)`. Outside the
/// series' monotone range it falls back to the first-order estimate
/// [`extract_tau_first_order`] with `w = w01`.
pub fn extract_kerr_model(spectrum: &Spectrum) -> Result<KerrParams> {
    let (a, w01) = anharmonicity_and_omega(spectrum)?;
    let params = |omega: f64, tau: f64| KerrParams {
        omega,
        alpha: 0.0,
        tau,
        n_trunc: 20,
    };
    if a == 0.0 {
        return Ok(params(w01, 0.0));
    }
    let lo_a = series_anharmonicity(SERIES_COUPLING_LIMIT);
    let hi_a = series_anharmonicity(-SERIES_COUPLING_LIMIT);
    if !(lo_a..=hi_a).contains(&a) {
        return Ok(params(w01, extract_tau_first_order(spectrum)?));
    }
    // A(g) decreases on the bracket
    let (mut lo, mut hi) = (-SERIES_COUPLING_LIMIT, SERIES_COUPLING_LIMIT);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if series_anharmonicity(mid) > a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = 0.5 * (lo + hi);
    let omega = w01 / (kerr_level_series(1, g) - kerr_level_series(0, g));
    Ok(params(omega, -4.0 * g / omega))
}

/// `tau = A / (3 w01)`, exact to first order in the quartic coupling.
pub fn extract_tau_first_order(spectrum: &Spectrum) -> Result<f64> {
    let (a, w01) = anharmonicity_and_omega(spectrum)?;
    Ok(a / (3.0 * w01))
}

fn anharmonicity_and_omega(spectrum: &Spectrum) -> Result<(f64, f64)> {
    let (Some(a), Some(w01)) = (spectrum.anharmonicity(), spectrum.transition_omega(0)) else {
        return Err(Error::InvalidArgument(
            "tau extraction needs at least three levels".into(),
        ));
    };
    if !(a > -1.0) || !(w01 > 0.0) {
        return Err(Error::NumericDomain(format!(
            "pathological spectrum: anharmonicity {a}, w01 {w01}"
        )));
    }
    Ok((a, w01))
}

/// Zero-point amplitude under the default half-quantum convention.
pub fn zero_point(circuit: &CircuitSpec, spectrum: &Spectrum) -> Result<ZeroPoint> {
    zero_point_with(circuit, spectrum, ZeroPointConvention::HalfQuantum)
}

/// Charge at which the circuit potential equals the convention's share of
/// `hbar w01`, with the matching quantum-capacitor voltage.
pub fn zero_point_with(
    circuit: &CircuitSpec,
    spectrum: &Spectrum,
    convention: ZeroPointConvention,
) -> Result<ZeroPoint> {
    let w01 = spectrum.transition_omega(0).ok_or_else(|| {
        Error::InvalidArgument("zero-point amplitude needs two levels".into())
    })?;
    let target = convention.fraction() * HBAR * w01;
    let start = circuit.scaling()?.charge_ref;
    let q_zp = turning_point(circuit.network(), target, start)?;
    Ok(ZeroPoint {
        q_zp,
        v_zp: circuit.network().node_voltage(q_zp)?,
        n_zp: q_zp / ELEMENTARY_CHARGE,
    })
}

/// Threshold checks for puddles and thermal population; advisory only.
pub fn check_feasibility(
    circuit: &CircuitSpec,
    puddle_density: f64,
    puddle_depth: f64,
    f_actual: f64,
) -> FeasibilityReport {
    let mut messages = Vec::new();
    let puddle_density_ok = puddle_density < PUDDLE_DENSITY_LIMIT;
    messages.push(if puddle_density_ok {
        format!("puddle density {puddle_density:.3e} cm^-2 is below {PUDDLE_DENSITY_LIMIT:.0e} cm^-2")
    } else {
        format!(
            "puddle density {puddle_density:.3e} cm^-2 exceeds {PUDDLE_DENSITY_LIMIT:.0e} cm^-2; \
             quantum capacitance will not survive"
        )
    });
    let puddle_depth_ok = puddle_depth < PUDDLE_DEPTH_LIMIT;
    messages.push(if puddle_depth_ok {
        format!("puddle depth {puddle_depth} meV is below {PUDDLE_DEPTH_LIMIT} meV")
    } else {
        format!(
            "puddle depth {puddle_depth} meV exceeds {PUDDLE_DEPTH_LIMIT} meV; \
             quantum capacitance will not survive"
        )
    });
    let temperature_ok = match circuit.network().temperature() {
        Some(t) => {
            let thermal = 2.0 * BOLTZMANN * t / PLANCK;
            let ok = PLANCK * f_actual > 2.0 * BOLTZMANN * t;
            messages.push(if ok {
                format!("qubit frequency {f_actual:.4e} Hz exceeds 2 k_B T / h = {thermal:.4e} Hz")
            } else {
                format!(
                    "qubit frequency {f_actual:.4e} Hz does not exceed 2 k_B T / h = {thermal:.4e} Hz; \
                     thermal population is too high"
                )
            });
            ok
        }
        None => {
            messages.push("linear element: no temperature constraint".into());
            true
        }
    };
    FeasibilityReport {
        puddle_density_ok,
        puddle_depth_ok,
        temperature_ok,
        messages,
    }
}
