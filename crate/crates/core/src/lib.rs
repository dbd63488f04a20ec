//! Numerical design toolkit for capacitive qubits whose nonlinearity comes from
//! the quantum capacitance of a graphene/BN/graphene stack.
//!
//! The pipeline is [`qcap`] (capacitance, charge and energy of the capacitor
//! network) → [`spectrum`] (eigenvalues of the circuit Hamiltonian) →
//! [`qubit_design`] (frequency, anharmonicity, zero-point amplitudes,
//! feasibility) → [`sweep`] (parameter grids, sensitivities, design tables and
//! CSV/JSON output).

pub mod error;
pub mod qcap;
pub mod qubit_design;
pub mod spectrum;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use qcap::{CapacitorElement, CapacitorNetwork, ChargeVoltageMap, ChargeVoltageTable, QCapModel};
pub use qubit_design::{
    analyze, analyze_with, check_feasibility, design_inductor, extract_kerr_model, extract_tau,
    make_scaling,
    zero_point, AnalysisOptions, CircuitSpec, FeasibilityReport, PuddleParams, QubitSolution,
    ZeroPointConvention,
};
pub use spectrum::{
    auto_domain, solve_charge_basis, solve_fock_kerr, GridSpec, KerrParams, Potential, Spectrum,
};
pub use sweep::{
    emit, reproduce_tables, sensitivities, sweep, CircuitTemplate, Format, InductorChoice,
    Quantity, SensitivityReport, SweepSpec, Table,
};
pub use units::Scaling;
