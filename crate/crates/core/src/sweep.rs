//! Parameter sweeps, temperature sensitivities, design-table reproduction and
//! the flat-file (CSV/JSON) writers for all of them.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::qcap::{CapacitorElement, CapacitorNetwork, QCapModel, DEFAULT_FERMI_VELOCITY};
use crate::qubit_design::{analyze_with, AnalysisOptions, CircuitSpec, QubitSolution};

/// Largest temperature a sweep may visit [K].
pub const MAX_SWEEP_TEMPERATURE: f64 = 1.0;
/// Largest area a sweep may visit [m^2].
pub const MAX_SWEEP_AREA: f64 = 1e-4;

// ---------------------------------------------------------------------------
// Tabular output
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Number(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Number)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Named columns of cells; the common currency of every writer.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric value at (`row`, `column`), if present.
    pub fn number(&self, row: usize, column: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column(column)?)? {
            Cell::Number(x) => Some(*x),
            _ => None,
        }
    }

    /// Rebuilds a table from JSON written by [`render`].
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let Value::Array(items) = value else {
            return Err(Error::Serialization("expected a JSON array".into()));
        };
        let mut columns: Vec<String> = Vec::new();
        let mut rows = Vec::new();
        for item in items {
            let Value::Object(map) = item else {
                return Err(Error::Serialization("expected JSON objects".into()));
            };
            if columns.is_empty() {
                columns = map.keys().cloned().collect();
            }
            let row = columns
                .iter()
                .map(|c| match map.get(c) {
                    Some(Value::Number(n)) => Ok(Cell::Number(n.as_f64().unwrap_or(f64::NAN))),
                    Some(Value::String(s)) => Ok(Cell::Text(s.clone())),
                    Some(Value::Null) | None => Ok(Cell::Empty),
                    Some(other) => Err(Error::Serialization(format!("unexpected value {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

/// Nine significant digits in scientific notation.
fn format_number(x: f64) -> String {
    format!("{x:.8e}")
}

/// Renders `table` as CSV or JSON text. Output depends only on the table.
pub fn render(table: &Table, format: Format) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::InvalidArgument("nothing to emit: table has no rows".into()));
    }
    match format {
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new()
                .quote_style(csv::QuoteStyle::Necessary)
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            writer.write_record(&table.columns)?;
            for row in &table.rows {
                writer.write_record(row.iter().map(|cell| match cell {
                    Cell::Number(x) => format_number(*x),
                    Cell::Text(s) => s.clone(),
                    Cell::Empty => String::new(),
                }))?;
            }
            let bytes = writer
                .into_inner()
                .map_err(|e| Error::Serialization(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
        }
        Format::Json => {
            let items: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut map = Map::new();
                    for (name, cell) in table.columns.iter().zip(row) {
                        let value = match cell {
                            Cell::Number(x) => serde_json::Number::from_f64(*x)
                                .map_or(Value::Null, Value::Number),
                            Cell::Text(s) => Value::String(s.clone()),
                            Cell::Empty => Value::Null,
                        };
                        map.insert(name.clone(), value);
                    }
                    Value::Object(map)
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&Value::Array(items))?;
            text.push('\n');
            Ok(text)
        }
    }
}

/// Writes `table` to `destination`, or to standard output when `None`.
pub fn emit(table: &Table, format: Format, destination: Option<&Path>) -> Result<()> {
    let text = render(table, format)?;
    match destination {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// A reportable figure of merit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    FActual,
    #[serde(rename = "A")]
    Anharmonicity,
    Tau,
    #[serde(rename = "V_zp")]
    VZp,
    NZp,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::FActual,
        Quantity::Anharmonicity,
        Quantity::Tau,
        Quantity::VZp,
        Quantity::NZp,
    ];

    /// Output column name, unit included.
    pub fn column(self) -> &'static str {
        match self {
            Quantity::FActual => "f_actual_hz",
            Quantity::Anharmonicity => "anharmonicity_percent",
            Quantity::Tau => "tau_s",
            Quantity::VZp => "v_zp_v",
            Quantity::NZp => "n_zp",
        }
    }

    pub fn of(self, solution: &QubitSolution) -> f64 {
        match self {
            Quantity::FActual => solution.f_actual,
            Quantity::Anharmonicity => solution.anharmonicity,
            Quantity::Tau => solution.tau,
            Quantity::VZp => solution.v_zp,
            Quantity::NZp => solution.n_zp,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Quantity::FActual => "f_actual",
            Quantity::Anharmonicity => "A",
            Quantity::Tau => "tau",
            Quantity::VZp => "V_zp",
            Quantity::NZp => "n_zp",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f_actual" | "f" => Ok(Quantity::FActual),
            "A" | "a" | "anharmonicity" => Ok(Quantity::Anharmonicity),
            "tau" => Ok(Quantity::Tau),
            "V_zp" | "v_zp" => Ok(Quantity::VZp),
            "n_zp" => Ok(Quantity::NZp),
            other => Err(Error::InvalidArgument(format!("unknown quantity '{other}'"))),
        }
    }
}

/// How the inductor of a swept circuit is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InductorChoice {
    /// The same inductance at every point [H].
    Fixed(f64),
    /// Re-derived at every point from the linearized frequency [Hz].
    DesignFrequency(f64),
}

/// Everything about a circuit except temperature and area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitTemplate {
    pub fermi_velocity: f64,
    pub vf_scale: f64,
    pub series_cs: Option<f64>,
    pub parallel_cp: Option<f64>,
    pub inductor: InductorChoice,
    /// Replace the quantum capacitor by its zero-bias linear capacitance.
    pub linear_stub: bool,
}

impl CircuitTemplate {
    pub fn with_inductor(inductor: InductorChoice) -> Self {
        Self {
            fermi_velocity: DEFAULT_FERMI_VELOCITY,
            vf_scale: 1.0,
            series_cs: None,
            parallel_cp: None,
            inductor,
            linear_stub: false,
        }
    }

    pub fn build(&self, temperature: f64, area: f64) -> Result<CircuitSpec> {
        let model = QCapModel::new(area, temperature)?
            .with_fermi_velocity(self.fermi_velocity)?
            .with_vf_scale(self.vf_scale)?;
        let element = if self.linear_stub {
            CapacitorElement::Linear {
                capacitance: model.zero_bias_capacitance(),
            }
        } else {
            CapacitorElement::Quantum(model)
        };
        let network = CapacitorNetwork::new(element, self.series_cs, self.parallel_cp)?;
        match self.inductor {
            InductorChoice::Fixed(l) => CircuitSpec::with_inductance(network, l),
            InductorChoice::DesignFrequency(f) => CircuitSpec::with_design_frequency(network, f),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Strictly increasing temperatures [K].
    pub temperatures: Vec<f64>,
    /// Strictly increasing areas [m^2].
    pub areas: Vec<f64>,
    pub template: CircuitTemplate,
    pub quantities: Vec<Quantity>,
    pub options: AnalysisOptions,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        check_axis("temperature", &self.temperatures, MAX_SWEEP_TEMPERATURE)?;
        check_axis("area", &self.areas, MAX_SWEEP_AREA)?;
        if self.quantities.is_empty() {
            return Err(Error::InvalidArgument("no quantities requested".into()));
        }
        Ok(())
    }
}

fn check_axis(name: &str, values: &[f64], max: f64) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} range is empty")));
    }
    if let Some(bad) = values.iter().find(|&&v| !(v > 0.0 && v <= max)) {
        return Err(Error::InvalidArgument(format!(
            "{name} {bad} is outside (0, {max}]"
        )));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "{name} range must be strictly increasing"
        )));
    }
    Ok(())
}

/// `n` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    end
                } else {
                    start + (end - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub temperature: f64,
    pub area: f64,
    pub inductance: Option<f64>,
    /// One entry per requested quantity; `None` when the point failed.
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub quantities: Vec<Quantity>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn to_table(&self) -> Table {
        let mut columns = vec!["temperature_k", "area_m2", "inductance_h"];
        columns.extend(self.quantities.iter().map(|q| q.column()));
        columns.push("error");
        let mut table = Table::new(&columns);
        for row in &self.rows {
            let mut cells = vec![
                Cell::Number(row.temperature),
                Cell::Number(row.area),
                row.inductance.into(),
            ];
            cells.extend(row.values.iter().map(|&v| Cell::from(v)));
            cells.push(row.error.as_deref().map_or(Cell::Empty, Cell::from));
            table.push(cells);
        }
        table
    }

    /// Values of one quantity in row order.
    pub fn column(&self, quantity: Quantity) -> Vec<Option<f64>> {
        let Some(i) = self.quantities.iter().position(|&q| q == quantity) else {
            return vec![None; self.rows.len()];
        };
        self.rows.iter().map(|r| r.values[i]).collect()
    }
}

/// Evaluates every (temperature, area) point, temperature-major.
///
/// Points are solved in parallel; a failing point is recorded in its row and
/// the sweep fails only when every point does.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let points: Vec<(f64, f64)> = spec
        .temperatures
        .iter()
        .flat_map(|&t| spec.areas.iter().map(move |&s| (t, s)))
        .collect();
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(temperature, area)| {
            let outcome = spec
                .template
                .build(temperature, area)
                .and_then(|c| analyze_with(&c, &spec.options).map(|s| (c.inductance(), s)));
            match outcome {
                Ok((inductance, solution)) => SweepRow {
                    temperature,
                    area,
                    inductance: Some(inductance),
                    values: spec.quantities.iter().map(|q| Some(q.of(&solution))).collect(),
                    error: None,
                },
                Err(e) => SweepRow {
                    temperature,
                    area,
                    inductance: None,
                    values: vec![None; spec.quantities.len()],
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    if rows.iter().all(|r| r.error.is_some()) {
        return Err(Error::NumericDomain(format!(
            "every sweep point failed; first error: {}",
            rows[0].error.as_deref().unwrap_or("unknown")
        )));
    }
    Ok(SweepResult {
        quantities: spec.quantities.clone(),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Sensitivities
// ---------------------------------------------------------------------------

/// Temperature derivatives of frequency and anharmonicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    /// Operating temperature [K].
    pub temperature: f64,
    /// Frequency at the operating point [Hz].
    pub f_actual: f64,
    /// Anharmonicity at the operating point [%].
    pub anharmonicity: f64,
    /// [Hz/K]
    pub df_dt: f64,
    /// [%/K]
    pub da_dt: f64,
    /// `(df/f) / (dT/T)` in percent.
    pub s_f_t: f64,
    /// `(dA/A) / (dT/T)` in percent.
    pub s_a_t: f64,
    /// Largest central-difference step [K].
    pub step_used: f64,
    /// Relative disagreement between the two Richardson estimates.
    pub richardson_error: f64,
}

impl SensitivityReport {
    /// Derivatives per millikelvin: (MHz/mK, %/mK).
    pub fn per_millikelvin(&self) -> (f64, f64) {
        (self.df_dt * 1e-3 / 1e6, self.da_dt * 1e-3)
    }
}

/// Central differences at steps `dt`, `dt/2`, `dt/4` about `t0`, combined by
/// Richardson extrapolation.
///
/// Every evaluation reuses the operating point's solver grid so the
/// differences are free of grid-switching noise. The reported derivatives
/// are the extrapolation from the two finer steps; `richardson_error`
/// compares it with the one from the two coarser steps.
pub fn sensitivities(circuit: &CircuitSpec, t0: f64, dt: f64) -> Result<SensitivityReport> {
    sensitivities_with(circuit, t0, dt, &AnalysisOptions::default())
}

pub fn sensitivities_with(
    circuit: &CircuitSpec,
    t0: f64,
    dt: f64,
    options: &AnalysisOptions,
) -> Result<SensitivityReport> {
    if !(dt.is_finite() && dt > 0.0 && t0.is_finite() && t0 - dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < dT < T0, got T0 = {t0}, dT = {dt}"
        )));
    }
    let center_circuit = circuit.with_temperature(t0)?;
    let center = analyze_with(&center_circuit, options)?;
    let pinned = AnalysisOptions {
        grid: center.spectrum.grid.unwrap_or(options.grid),
        ..options.clone()
    };
    let steps = [dt, dt / 2.0, dt / 4.0];
    let evaluations: Vec<(f64, f64, f64)> = steps
        .par_iter()
        .map(|&h| {
            let up = analyze_with(&circuit.with_temperature(t0 + h)?, &pinned)?;
            let down = analyze_with(&circuit.with_temperature(t0 - h)?, &pinned)?;
            Ok((
                h,
                (up.f_actual - down.f_actual) / (2.0 * h),
                (up.anharmonicity - down.anharmonicity) / (2.0 * h),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let extrapolate = |coarse: f64, fine: f64| (4.0 * fine - coarse) / 3.0;
    let (_, f1, a1) = evaluations[0];
    let (_, f2, a2) = evaluations[1];
    let (_, f3, a3) = evaluations[2];
    let df_dt = extrapolate(f2, f3);
    let da_dt = extrapolate(a2, a3);
    let rel = |best: f64, other: f64| {
        if best == 0.0 && other == 0.0 {
            0.0
        } else {
            ((best - other) / best).abs()
        }
    };
    let richardson_error = rel(df_dt, extrapolate(f1, f2)).max(rel(da_dt, extrapolate(a1, a2)));
    let normalized = |derivative: f64, value: f64| {
        if value == 0.0 {
            0.0
        } else {
            derivative * t0 / value * 100.0
        }
    };
    Ok(SensitivityReport {
        temperature: t0,
        f_actual: center.f_actual,
        anharmonicity: center.anharmonicity,
        df_dt,
        da_dt,
        s_f_t: normalized(df_dt, center.f_actual),
        s_a_t: normalized(da_dt, center.anharmonicity),
        step_used: dt,
        richardson_error,
    })
}

/// Least-squares slope of `ln A` against `ln T`.
pub fn anharmonicity_temperature_exponent(
    circuit: &CircuitSpec,
    temperatures: &[f64],
) -> Result<f64> {
    if temperatures.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two temperatures for a fit".into(),
        ));
    }
    let points: Vec<(f64, f64)> = temperatures
        .par_iter()
        .map(|&t| {
            let s = analyze_with(&circuit.with_temperature(t)?, &AnalysisOptions::default())?;
            if !(s.anharmonicity > 0.0) {
                return Err(Error::NumericDomain(format!(
                    "anharmonicity {} at {t} K has no logarithm",
                    s.anharmonicity
                )));
            }
            Ok((t.ln(), s.anharmonicity.ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

// ---------------------------------------------------------------------------
// Design tables
// ---------------------------------------------------------------------------

/// One published design row: inputs and reported results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceDesign {
    pub table: u8,
    pub area_mm2: f64,
    pub design_ghz: f64,
    pub temperature_mk: f64,
    pub series_ff: Option<f64>,
    pub actual_ghz: f64,
    pub anharmonicity_percent: f64,
}

const fn design(
    table: u8,
    area_mm2: f64,
    design_ghz: f64,
    series_ff: Option<f64>,
    actual_ghz: f64,
    anharmonicity_percent: f64,
) -> ReferenceDesign {
    ReferenceDesign {
        table,
        area_mm2,
        design_ghz,
        temperature_mk: 25.0,
        series_ff,
        actual_ghz,
        anharmonicity_percent,
    }
}

/// Tables 1-3: bare 1 mm^2, series-capacitor 1 mm^2, bare 0.1 mm^2.
pub const REFERENCE_DESIGNS: [ReferenceDesign; 9] = [
    design(1, 1.0, 2.5, None, 2.29, 3.9),
    design(1, 1.0, 5.0, None, 4.41, 6.04),
    design(1, 1.0, 10.0, None, 8.31, 8.26),
    design(2, 1.0, 2.5, Some(100.0), 2.39, 0.44),
    design(2, 1.0, 5.0, Some(100.0), 4.77, 0.76),
    design(2, 1.0, 10.0, Some(1000.0), 8.71, 5.67),
    design(3, 0.1, 10.0, None, 6.42, 11.2),
    design(3, 0.1, 15.0, None, 11.1, 9.02),
    design(3, 0.1, 20.0, None, 11.5, 11.1),
];

impl ReferenceDesign {
    pub fn circuit(&self) -> Result<CircuitSpec> {
        let model = QCapModel::new(self.area_mm2 * 1e-6, self.temperature_mk * 1e-3)?;
        let network = CapacitorNetwork::new(model, self.series_ff.map(|c| c * 1e-15), None)?;
        CircuitSpec::with_design_frequency(network, self.design_ghz * 1e9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub reference: ReferenceDesign,
    pub inductance: Option<f64>,
    pub actual_ghz: Option<f64>,
    pub anharmonicity_percent: Option<f64>,
    pub error: Option<String>,
}

impl TableRow {
    /// `(computed - reference) / reference` for frequency and anharmonicity.
    pub fn deviations(&self) -> (Option<f64>, Option<f64>) {
        let r = &self.reference;
        (
            self.actual_ghz.map(|f| (f - r.actual_ghz) / r.actual_ghz),
            self.anharmonicity_percent
                .map(|a| (a - r.anharmonicity_percent) / r.anharmonicity_percent),
        )
    }
}

/// Recomputes the rows of the requested tables (1, 2, 3) in table order.
pub fn reproduce_tables(which: &[u8]) -> Result<Vec<TableRow>> {
    if let Some(bad) = which.iter().find(|&&t| !(1..=3).contains(&t)) {
        return Err(Error::InvalidArgument(format!("no design table {bad}; choose 1, 2 or 3")));
    }
    let selected: Vec<ReferenceDesign> = REFERENCE_DESIGNS
        .iter()
        .filter(|d| which.contains(&d.table))
        .copied()
        .collect();
    Ok(selected
        .par_iter()
        .map(|reference| {
            let outcome = reference
                .circuit()
                .and_then(|c| analyze_with(&c, &AnalysisOptions::default()).map(|s| (c, s)));
            match outcome {
                Ok((circuit, solution)) => TableRow {
                    reference: *reference,
                    inductance: Some(circuit.inductance()),
                    actual_ghz: Some(solution.f_actual / 1e9),
                    anharmonicity_percent: Some(solution.anharmonicity),
                    error: None,
                },
                Err(e) => TableRow {
                    reference: *reference,
                    inductance: None,
                    actual_ghz: None,
                    anharmonicity_percent: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

pub fn tables_to_table(rows: &[TableRow]) -> Table {
    let mut table = Table::new(&[
        "table",
        "area_mm2",
        "design_ghz",
        "temperature_mk",
        "series_cs_ff",
        "inductance_nh",
        "actual_ghz",
        "anharmonicity_percent",
        "reference_actual_ghz",
        "reference_anharmonicity_percent",
        "actual_rel_deviation",
        "anharmonicity_rel_deviation",
        "error",
    ]);
    for row in rows {
        let r = &row.reference;
        let (df, da) = row.deviations();
        table.push(vec![
            Cell::Number(r.table as f64),
            r.area_mm2.into(),
            r.design_ghz.into(),
            r.temperature_mk.into(),
            r.series_ff.into(),
            row.inductance.map(|l| l * 1e9).into(),
            row.actual_ghz.into(),
            row.anharmonicity_percent.into(),
            r.actual_ghz.into(),
            r.anharmonicity_percent.into(),
            df.into(),
            da.into(),
            row.error.as_deref().map_or(Cell::Empty, Cell::from),
        ]);
    }
    table
}
