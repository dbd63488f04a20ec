//! JSON configuration and its merge with command-line flags.

use std::path::Path;

use cubit_core::qubit_design::{AnalysisOptions, PuddleParams, ZeroPointConvention};
use cubit_core::spectrum::{GridSpec, SolverSettings};
use cubit_core::sweep::{CircuitTemplate, InductorChoice, Quantity};
use cubit_core::{CircuitSpec, Error, Result};
use serde::Deserialize;

use crate::quantity::{parse, parse_range, Dimension};

/// A number in canonical units or an SI-suffixed string.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl Value {
    pub fn resolve(&self, dim: Dimension) -> Result<f64> {
        match self {
            Value::Number(x) => Ok(*x),
            Value::Text(s) => parse(s, dim),
        }
    }
}

/// A list of values, a `start:stop:count` string, or an explicit linspace.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RangeValue {
    List(Vec<Value>),
    Text(String),
    Linspace {
        start: Value,
        stop: Value,
        count: usize,
    },
}

impl RangeValue {
    pub fn resolve(&self, dim: Dimension) -> Result<Vec<f64>> {
        match self {
            RangeValue::List(items) => items.iter().map(|v| v.resolve(dim)).collect(),
            RangeValue::Text(s) => parse_range(s, dim),
            RangeValue::Linspace { start, stop, count } => {
                if *count == 0 {
                    return Err(Error::InvalidArgument("range needs at least one point".into()));
                }
                Ok(cubit_core::sweep::linspace(
                    start.resolve(dim)?,
                    stop.resolve(dim)?,
                    *count,
                ))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPointFlag {
    Half,
    Quarter,
}

impl From<ZeroPointFlag> for ZeroPointConvention {
    fn from(z: ZeroPointFlag) -> Self {
        match z {
            ZeroPointFlag::Half => ZeroPointConvention::HalfQuantum,
            ZeroPointFlag::Quarter => ZeroPointConvention::QuarterQuantum,
        }
    }
}

/// Contents of a `--config` file. Every key is optional; unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub area: Option<Value>,
    pub temperature: Option<Value>,
    pub fermi_velocity: Option<Value>,
    pub vf_scale: Option<f64>,
    pub series_cs: Option<Value>,
    pub parallel_cp: Option<Value>,
    pub inductance: Option<Value>,
    pub design_frequency: Option<Value>,
    pub linear_stub: Option<bool>,
    pub n_levels: Option<usize>,
    pub n_points: Option<usize>,
    pub n_trunc: Option<usize>,
    pub tolerance: Option<f64>,
    pub zero_point: Option<ZeroPointFlag>,
    pub puddle_density: Option<Value>,
    pub puddle_depth: Option<Value>,
    pub temperatures: Option<RangeValue>,
    pub areas: Option<RangeValue>,
    pub quantities: Option<Vec<String>>,
    pub dt: Option<Value>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidArgument(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            Error::InvalidArgument(format!("config {}: {e}", path.display()))
        })
    }
}

/// Circuit and solver inputs as given on the command line.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CircuitArgs {
    /// JSON file with default values; explicit flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    /// Capacitor area, e.g. 5e4um2 or 1mm2.
    #[arg(long)]
    pub area: Option<String>,
    /// Operating temperature, e.g. 25mK.
    #[arg(long = "temp")]
    pub temperature: Option<String>,
    /// Fermi velocity, e.g. 1e6m/s.
    #[arg(long = "vf")]
    pub fermi_velocity: Option<String>,
    /// Dimensionless factor on the Fermi velocity, in (0, 1].
    #[arg(long)]
    pub vf_scale: Option<f64>,
    /// Series capacitor, e.g. 100fF.
    #[arg(long)]
    pub series_cs: Option<String>,
    /// Parallel capacitor across the quantum capacitor.
    #[arg(long)]
    pub parallel_cp: Option<String>,
    /// Inductance, e.g. 60nH.
    #[arg(long, conflicts_with = "design_freq")]
    pub inductance: Option<String>,
    /// Linearized design frequency that fixes the inductance, e.g. 5GHz.
    #[arg(long)]
    pub design_freq: Option<String>,
    /// Replace the quantum capacitor by its zero-bias capacitance.
    #[arg(long)]
    pub linear_stub: bool,
    /// Number of levels to compute (at least 3).
    #[arg(long)]
    pub n_levels: Option<usize>,
    /// Odd node count of the coarsest charge grid.
    #[arg(long)]
    pub n_points: Option<usize>,
    /// Number-basis size for the quartic-model cross-check.
    #[arg(long)]
    pub n_trunc: Option<usize>,
    /// Relative eigenvalue change that ends grid refinement.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Energy share that defines the zero-point amplitude.
    #[arg(long, value_enum)]
    pub zero_point: Option<ZeroPointFlag>,
    /// Charge-puddle surface density, e.g. 1e8cm-2.
    #[arg(long)]
    pub puddle_density: Option<String>,
    /// Charge-puddle potential depth, e.g. 5meV.
    #[arg(long)]
    pub puddle_depth: Option<String>,
}

/// Flags merged over the config file, converted to canonical units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: Config,
    pub area: Option<f64>,
    pub temperature: Option<f64>,
    base: CircuitTemplate,
    inductor: Option<InductorChoice>,
    pub options: AnalysisOptions,
    pub n_trunc: Option<usize>,
}

fn pick(flag: &Option<String>, config: &Option<Value>, dim: Dimension) -> Result<Option<f64>> {
    match (flag, config) {
        (Some(s), _) => parse(s, dim).map(Some),
        (None, Some(v)) => v.resolve(dim).map(Some),
        (None, None) => Ok(None),
    }
}

impl CircuitArgs {
    pub fn resolve(&self) -> Result<Resolved> {
        let config = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let area = pick(&self.area, &config.area, Dimension::Area)?;
        let temperature = pick(&self.temperature, &config.temperature, Dimension::Temperature)?;
        let fermi_velocity = pick(&self.fermi_velocity, &config.fermi_velocity, Dimension::Velocity)?
            .unwrap_or(cubit_core::qcap::DEFAULT_FERMI_VELOCITY);
        let vf_scale = self.vf_scale.or(config.vf_scale).unwrap_or(1.0);
        let series_cs = pick(&self.series_cs, &config.series_cs, Dimension::Capacitance)?;
        let parallel_cp = pick(&self.parallel_cp, &config.parallel_cp, Dimension::Capacitance)?;

        // An inductor chosen by flag replaces whatever the config file says.
        let inductor = if self.inductance.is_some() || self.design_freq.is_some() {
            match (&self.inductance, &self.design_freq) {
                (Some(l), _) => Some(InductorChoice::Fixed(parse(l, Dimension::Inductance)?)),
                (None, Some(f)) => Some(InductorChoice::DesignFrequency(parse(f, Dimension::Frequency)?)),
                (None, None) => None,
            }
        } else {
            match (&config.inductance, &config.design_frequency) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidArgument(
                        "config sets both inductance and design_frequency; choose one".into(),
                    ))
                }
                (Some(l), None) => Some(InductorChoice::Fixed(l.resolve(Dimension::Inductance)?)),
                (None, Some(f)) => {
                    Some(InductorChoice::DesignFrequency(f.resolve(Dimension::Frequency)?))
                }
                (None, None) => None,
            }
        };

        let mut grid = GridSpec::auto();
        if let Some(n) = self.n_points.or(config.n_points) {
            grid.n_points = n;
        }
        grid.validate()?;
        let mut settings = SolverSettings::default();
        if let Some(tol) = self.tolerance.or(config.tolerance) {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance must be finite and positive, got {tol}"
                )));
            }
            settings.tolerance = tol;
        }
        let n_levels = self.n_levels.or(config.n_levels).unwrap_or(3);
        if !(3..=cubit_core::spectrum::MAX_LEVELS).contains(&n_levels) {
            return Err(Error::InvalidArgument(format!(
                "n_levels must be in 3..={}, got {n_levels}",
                cubit_core::spectrum::MAX_LEVELS
            )));
        }
        let n_trunc = self.n_trunc.or(config.n_trunc);
        if let Some(n) = n_trunc {
            if n < n_levels + 10 || n < 20 {
                return Err(Error::InvalidArgument(format!(
                    "n_trunc must be at least max(20, n_levels + 10), got {n}"
                )));
            }
        }
        let density = pick(&self.puddle_density, &config.puddle_density, Dimension::Density)?
            .unwrap_or(0.0);
        let depth = pick(&self.puddle_depth, &config.puddle_depth, Dimension::Energy)?
            .unwrap_or(0.0);
        if density < 0.0 || depth < 0.0 {
            return Err(Error::InvalidArgument(
                "puddle density and depth must be nonnegative".into(),
            ));
        }
        let zero_point = self
            .zero_point
            .or(config.zero_point)
            .map_or(ZeroPointConvention::default(), Into::into);

        let base = CircuitTemplate {
            fermi_velocity,
            vf_scale,
            series_cs,
            parallel_cp,
            inductor: InductorChoice::Fixed(f64::NAN),
            linear_stub: self.linear_stub || config.linear_stub.unwrap_or(false),
        };
        let options = AnalysisOptions {
            n_levels,
            grid,
            settings,
            zero_point,
            puddles: PuddleParams { density, depth },
        };
        let resolved = Resolved {
            config,
            area,
            temperature,
            base,
            inductor,
            options,
            n_trunc,
        };
        // Surface invalid circuit parameters before any solver runs.
        if let (Some(t), Some(s)) = (resolved.temperature, resolved.area) {
            if resolved.inductor.is_some() {
                resolved.template()?.build(t, s)?;
            }
        }
        Ok(resolved)
    }
}

impl Resolved {
    pub fn area(&self) -> Result<f64> {
        self.area
            .ok_or_else(|| Error::InvalidArgument("missing area (--area or config key 'area')".into()))
    }

    pub fn temperature(&self) -> Result<f64> {
        self.temperature.ok_or_else(|| {
            Error::InvalidArgument("missing temperature (--temp or config key 'temperature')".into())
        })
    }

    pub fn require_inductor(&self) -> Result<InductorChoice> {
        self.inductor.ok_or_else(|| {
            Error::InvalidArgument(
                "missing inductor: give --inductance or --design-freq (or the config keys)".into(),
            )
        })
    }

    pub fn template(&self) -> Result<CircuitTemplate> {
        Ok(CircuitTemplate {
            inductor: self.require_inductor()?,
            ..self.base
        })
    }

    /// Circuit template without an inductor requirement, for capacitor-only commands.
    pub fn capacitor(&self) -> &CircuitTemplate {
        &self.base
    }

    pub fn circuit(&self) -> Result<CircuitSpec> {
        self.template()?.build(self.temperature()?, self.area()?)
    }

    pub fn quantities(&self, flag: &Option<String>) -> Result<Vec<Quantity>> {
        match (flag, &self.config.quantities) {
            (Some(list), _) => list.split(',').map(str::parse).collect(),
            (None, Some(list)) => list.iter().map(|s| s.parse()).collect(),
            (None, None) => Ok(Quantity::ALL.to_vec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let r: std::result::Result<Config, _> = serde_json::from_str(r#"{"area": 1, "colour": 2}"#);
        assert!(r.is_err());
    }

    #[test]
    fn mixed_value_forms() {
        let c: Config = serde_json::from_str(
            r#"{"area": "5e4um2", "temperature": 0.025, "temperatures": {"start": "15mK", "stop": "100mK", "count": 18},
                "areas": ["1mm2", 1e-7], "zero_point": "quarter"}"#,
        )
        .unwrap();
        let area = c.area.unwrap().resolve(Dimension::Area).unwrap();
        assert!((area - 5e-8).abs() < 1e-20);
        assert_eq!(c.temperatures.unwrap().resolve(Dimension::Temperature).unwrap().len(), 18);
        assert_eq!(c.areas.unwrap().resolve(Dimension::Area).unwrap().len(), 2);
        assert_eq!(c.zero_point, Some(ZeroPointFlag::Quarter));
    }
}
