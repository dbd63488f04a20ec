//! Physical constants and the nondimensionalization shared by the solvers.
//!
//! Every eigenproblem is solved in units where the linearized circuit has
//! level spacing one: energies in `hbar * omega_ref`, charges in
//! `charge_ref = sqrt(hbar / (2 Z))` with `Z = sqrt(L / C0)`. In those units the
//! harmonic Hamiltonian reads `-d^2/dq^2 + q^2 / 4` and `q` is the quadrature
//! `a + a^dagger`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Elementary charge [C] (CODATA 2018, exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant [J s] (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant [J s] (CODATA 2018, exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant [J/K] (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// One electron-volt in joules.
pub const ELECTRON_VOLT: f64 = ELEMENTARY_CHARGE;

/// The constant set used by every module. Fixed, never configurable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub e: f64,
    pub hbar: f64,
    pub k_b: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    e: ELEMENTARY_CHARGE,
    hbar: HBAR,
    k_b: BOLTZMANN,
};

/// Reference magnitudes that bring a circuit's numerics near unity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scaling {
    /// Linearized angular frequency [rad/s].
    pub omega_ref: f64,
    /// Charge unit [C].
    pub charge_ref: f64,
    /// Energy unit [J], always `hbar * omega_ref`.
    pub energy_ref: f64,
}

impl Scaling {
    /// Scaling anchored at an inductance and the zero-bias linear capacitance.
    pub fn from_lc(inductance: f64, capacitance: f64) -> Result<Self> {
        if !(inductance.is_finite() && inductance > 0.0) {
            return Err(Error::InvalidCircuit(format!(
                "inductance must be finite and positive, got {inductance}"
            )));
        }
        if !(capacitance.is_finite() && capacitance > 0.0) {
            return Err(Error::InvalidCircuit(format!(
                "linearized capacitance must be finite and positive, got {capacitance}"
            )));
        }
        let omega_ref = 1.0 / (inductance * capacitance).sqrt();
        let impedance = (inductance / capacitance).sqrt();
        let charge_ref = (HBAR / (2.0 * impedance)).sqrt();
        Ok(Self {
            omega_ref,
            charge_ref,
            energy_ref: HBAR * omega_ref,
        })
    }

    pub fn scale_energy(&self, joules: f64) -> f64 {
        joules / self.energy_ref
    }

    pub fn unscale_energy(&self, scaled: f64) -> f64 {
        scaled * self.energy_ref
    }

    pub fn scale_charge(&self, coulombs: f64) -> f64 {
        coulombs / self.charge_ref
    }

    pub fn unscale_charge(&self, scaled: f64) -> f64 {
        scaled * self.charge_ref
    }

    pub fn scale_frequency(&self, omega: f64) -> f64 {
        omega / self.omega_ref
    }

    pub fn unscale_frequency(&self, scaled: f64) -> f64 {
        scaled * self.omega_ref
    }

    /// Linear frequency of the reference oscillator [Hz].
    pub fn frequency_hz(&self) -> f64 {
        self.omega_ref / (2.0 * PI)
    }
}

/// Thermal voltage scale `2 k_B T / e` of the Fermi-level argument [V].
pub fn thermal_voltage(temperature: f64) -> f64 {
    2.0 * BOLTZMANN * temperature / ELEMENTARY_CHARGE
}
