//! Acceptance tolerances and a small reporter shared by the acceptance tests.
//!
//! Every bound is pinned here once; the tests only read them.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

/// Relative tolerance of the harmonic-oscillator oracle.
pub const HARMONIC_REL_TOL: f64 = 1e-6;
/// Random (L, C) pairs drawn for the harmonic oracle.
pub const HARMONIC_CASES: usize = 20;
/// Levels checked per pair (n = 0..4).
pub const HARMONIC_LEVELS: usize = 5;
pub const HARMONIC_BUDGET: Duration = Duration::from_secs(10);

/// Charge-basis vs number-basis anharmonicity agreement.
pub const CROSS_SOLVER_REL_TOL: f64 = 1e-2;
pub const CROSS_SOLVER_BUDGET: Duration = Duration::from_secs(30);

/// Relative frequency window for the design-table rows.
pub const TABLE_FREQ_REL_TOL: f64 = 0.20;
/// Multiplicative window for anharmonicity.
pub const TABLE_ANHARMONICITY_FACTOR: f64 = 2.0;
pub const TABLE_BUDGET: Duration = Duration::from_secs(300);

/// Reference final design: 5e4 um^2, 60 nH, 25 mK.
pub const FINAL_AREA: f64 = 5e-8;
pub const FINAL_INDUCTANCE: f64 = 60e-9;
pub const FINAL_TEMPERATURE: f64 = 0.025;
pub const FINAL_FREQUENCY_HZ: f64 = 3.55e9;
pub const FINAL_FREQ_REL_TOL: f64 = 0.20;
pub const FINAL_ANHARMONICITY_PERCENT: f64 = 11.0;
pub const FINAL_ANHARMONICITY_FACTOR: f64 = 2.0;
pub const FINAL_V_ZP: f64 = 15e-6;
pub const FINAL_N_ZP: f64 = 1.7;
pub const FINAL_ZP_FACTOR: f64 = 3.0;
pub const FINAL_BUDGET: Duration = Duration::from_secs(30);

/// Reported temperature derivative of the frequency [MHz/mK].
pub const DF_DT_MHZ_PER_MK: f64 = 19.0;
/// Reported normalized frequency sensitivity [%].
pub const S_F_T_PERCENT: f64 = 9.5;
/// Reported normalized anharmonicity sensitivity [%].
pub const S_A_T_PERCENT: f64 = 6.1;
pub const SENSITIVITY_FACTOR: f64 = 2.0;
pub const SENSITIVITY_STEP: f64 = 1e-3;
pub const RICHARDSON_TOL: f64 = 1e-3;
pub const SENSITIVITY_BUDGET: Duration = Duration::from_secs(60);

/// Temperatures of the monotone-trend check [K].
pub const TREND_TEMPERATURES: [f64; 5] = [0.015, 0.025, 0.05, 0.075, 0.1];
/// Series capacitor added to the bare designs [F].
pub const TREND_SERIES_CS: f64 = 100e-15;

/// Equal-spacing tolerance of the cancelled quartic model.
pub const KERR_SPACING_REL_TOL: f64 = 1e-10;

/// `x` lies within a factor `factor` of `reference` (same sign).
pub fn within_factor(x: f64, reference: f64, factor: f64) -> bool {
    let ratio = x / reference;
    ratio >= 1.0 / factor && ratio <= factor
}

pub fn within_rel(x: f64, reference: f64, tol: f64) -> bool {
    ((x - reference) / reference).abs() <= tol
}

/// One checked statement inside a criterion.
#[derive(Debug, Clone)]
pub struct Check {
    pub ok: bool,
    pub detail: String,
}

/// Collects the checks of one criterion and prints the verdict line.
#[derive(Debug)]
pub struct Criterion {
    number: u32,
    title: &'static str,
    checks: Vec<Check>,
}

impl Criterion {
    pub fn new(number: u32, title: &'static str) -> Self {
        Self {
            number,
            title,
            checks: Vec::new(),
        }
    }

    pub fn check(&mut self, ok: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check {
            ok,
            detail: detail.into(),
        });
        ok
    }

    pub fn check_budget(&mut self, elapsed: Duration, budget: Duration) {
        self.check(
            elapsed <= budget,
            format!("runtime {:.2} s (limit {} s)", elapsed.as_secs_f64(), budget.as_secs()),
        );
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    /// Prints the verdict and per-check lines straight to stderr (not captured
    /// by the test harness), then fails the test if any check failed.
    pub fn finish(self) {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut text = format!(
            "acceptance criterion {} [{}]: {verdict}\n",
            self.number, self.title
        );
        for c in &self.checks {
            let mark = if c.ok { "ok  " } else { "FAIL" };
            text.push_str(&format!("    {mark} {}\n", c.detail));
        }
        let _ = std::io::stderr().write_all(text.as_bytes());
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| c.detail.as_str())
            .collect();
        assert!(
            failed.is_empty(),
            "criterion {} failed: {}",
            self.number,
            failed.join("; ")
        );
    }
}

/// Path of the `cubit` executable in the current target directory, building it
/// when absent.
pub fn cubit_binary() -> PathBuf {
    let exe = std::env::current_exe().expect("test executable path");
    let profile_dir = exe
        .parent()
        .and_then(|deps| deps.parent())
        .expect("target profile directory")
        .to_path_buf();
    let binary = profile_dir.join(format!("cubit{}", std::env::consts::EXE_SUFFIX));
    if !binary.exists() {
        let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
        let status = std::process::Command::new(cargo)
            .args(["build", "-p", "cubit-cli", "--bin", "cubit"])
            .status()
            .expect("spawn cargo build");
        assert!(status.success(), "could not build the cubit binary");
    }
    binary
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_window() {
        assert!(within_factor(5.5, 11.0, 2.0));
        assert!(within_factor(22.0, 11.0, 2.0));
        assert!(!within_factor(5.49, 11.0, 2.0));
        assert!(!within_factor(-11.0, 11.0, 2.0));
    }

    #[test]
    fn relative_window() {
        assert!(within_rel(3.18, 3.55, 0.2));
        assert!(!within_rel(2.8, 3.55, 0.2));
    }
}
