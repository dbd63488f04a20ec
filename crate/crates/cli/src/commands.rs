use std::io::Write;
use std::path::PathBuf;

use cubit_core::qcap::{CapacitorElement, ChargeVoltageMap, QCapModel};
use cubit_core::qubit_design::{analyze_with, check_feasibility, extract_kerr_model, FeasibilityReport};
use cubit_core::spectrum::solve_fock_kerr;
use cubit_core::sweep::{
    anharmonicity_temperature_exponent, linspace, render, reproduce_tables, sensitivities_with,
    tables_to_table, Cell, Format, SweepSpec, Table,
};
use cubit_core::units::thermal_voltage;
use cubit_core::{Error, Result};
use serde_json::{Map, Value};

use crate::quantity::{parse, parse_range, Dimension};
use crate::{CheckArgs, CqArgs, DesignArgs, ReportFormat, SensArgs, SweepArgs, TableFormat, TablesArgs};

fn write_out(text: &str, output: &Option<PathBuf>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn emit_table(table: &Table, format: TableFormat, output: &Option<PathBuf>) -> Result<()> {
    let format = match format {
        TableFormat::Csv => Format::Csv,
        TableFormat::Json => Format::Json,
    };
    write_out(&render(table, format)?, output)
}

/// Ordered key/value report printed as aligned text or a JSON object.
#[derive(Default)]
struct Report {
    fields: Vec<(String, Value)>,
}

impl Report {
    fn number(&mut self, key: &str, x: f64) {
        let value = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        self.fields.push((key.to_string(), value));
    }

    fn flag(&mut self, key: &str, b: bool) {
        self.fields.push((key.to_string(), Value::Bool(b)));
    }

    fn text(&mut self, key: &str, s: impl Into<String>) {
        self.fields.push((key.to_string(), Value::String(s.into())));
    }

    fn list(&mut self, key: &str, items: Vec<Value>) {
        self.fields.push((key.to_string(), Value::Array(items)));
    }

    fn feasibility(&mut self, f: &FeasibilityReport) {
        self.flag("puddle_density_ok", f.puddle_density_ok);
        self.flag("puddle_depth_ok", f.puddle_depth_ok);
        self.flag("temperature_ok", f.temperature_ok);
        self.list(
            "feasibility_notes",
            f.messages.iter().cloned().map(Value::String).collect(),
        );
    }

    fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => {
                let map: Map<String, Value> = self.fields.iter().cloned().collect();
                let mut s = serde_json::to_string_pretty(&Value::Object(map))?;
                s.push('\n');
                Ok(s)
            }
            ReportFormat::Text => {
                let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0) + 2;
                let mut s = String::new();
                for (key, value) in &self.fields {
                    match value {
                        Value::Array(items) => {
                            for item in items {
                                let line = item.as_str().map_or_else(|| format_value(item), str::to_string);
                                s.push_str(&format!("{key:<width$}{line}\n"));
                            }
                        }
                        other => s.push_str(&format!("{key:<width$}{}\n", format_value(other))),
                    }
                }
                Ok(s)
            }
        }
    }
}

fn format_value(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), |x| format!("{x:.8e}")),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "nan".into(),
        other => other.to_string(),
    }
}

pub fn cq(args: CqArgs) -> Result<()> {
    let resolved = args.circuit.resolve()?;
    let temperature = resolved.temperature()?;
    let base = resolved.capacitor();
    let model = QCapModel::new(resolved.area()?, temperature)?
        .with_fermi_velocity(base.fermi_velocity)?
        .with_vf_scale(base.vf_scale)?;
    let vmax = match &args.vmax {
        Some(v) => parse(v, Dimension::Voltage)?,
        None => 20.0 * thermal_voltage(temperature),
    };
    if !(vmax > 0.0) || args.points < 2 {
        return Err(Error::InvalidArgument(
            "need a positive --vmax and at least 2 --points".into(),
        ));
    }
    let map = ChargeVoltageMap::new(CapacitorElement::Quantum(model), 0.0)?;
    let mut table = Table::new(&["voltage_v", "cq_f", "charge_c", "energy_j"]);
    for v in linspace(-vmax, vmax, args.points) {
        table.push(vec![
            Cell::Number(v),
            Cell::Number(model.cq_of_voltage(v)?),
            Cell::Number(map.charge_of_voltage(v)?),
            Cell::Number(map.energy_of_voltage(v)?),
        ]);
    }
    emit_table(&table, args.format, &args.output)
}

pub fn design(args: DesignArgs) -> Result<()> {
    let resolved = args.circuit.resolve()?;
    let circuit = resolved.circuit()?;
    let solution = analyze_with(&circuit, &resolved.options)?;
    let mut report = Report::default();
    report.number("area_m2", resolved.area()?);
    report.number("temperature_k", resolved.temperature()?);
    report.number("inductance_h", circuit.inductance());
    report.number("linearized_capacitance_f", circuit.network().linearized_capacitance());
    report.number("linear_frequency_hz", circuit.linear_frequency());
    report.number("f_actual_hz", solution.f_actual);
    report.number("anharmonicity_percent", solution.anharmonicity);
    report.number("tau_s", solution.tau);
    report.number("q_zp_c", solution.q_zp);
    report.number("v_zp_v", solution.v_zp);
    report.number("n_zp", solution.n_zp);
    report.list(
        "levels_j",
        solution
            .spectrum
            .levels
            .iter()
            .map(|&e| serde_json::Number::from_f64(e).map_or(Value::Null, Value::Number))
            .collect(),
    );
    report.flag("converged", solution.spectrum.converged);
    report.number("refinement_error", solution.spectrum.refinement_error);
    if let Some(n_trunc) = resolved.n_trunc {
        let params = cubit_core::KerrParams {
            n_trunc,
            ..extract_kerr_model(&solution.spectrum)?
        };
        report.number("kerr_omega_rad_s", params.omega);
        match solve_fock_kerr(params, resolved.options.n_levels) {
            Ok(kerr) => report.number(
                "kerr_anharmonicity_percent",
                100.0 * kerr.anharmonicity().unwrap_or(f64::NAN),
            ),
            Err(e) => report.text("kerr_anharmonicity_percent", format!("unavailable: {e}")),
        }
    }
    report.feasibility(&solution.feasibility);
    write_out(&report.render(args.format)?, &args.output)
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let resolved = args.circuit.resolve()?;
    let temperatures = match (&args.temps, &resolved.config.temperatures) {
        (Some(r), _) => parse_range(r, Dimension::Temperature)?,
        (None, Some(r)) => r.resolve(Dimension::Temperature)?,
        (None, None) => vec![resolved.temperature()?],
    };
    let areas = match (&args.areas, &resolved.config.areas) {
        (Some(r), _) => parse_range(r, Dimension::Area)?,
        (None, Some(r)) => r.resolve(Dimension::Area)?,
        (None, None) => vec![resolved.area()?],
    };
    let spec = SweepSpec {
        temperatures,
        areas,
        template: resolved.template()?,
        quantities: resolved.quantities(&args.quantities)?,
        options: resolved.options.clone(),
    };
    let result = cubit_core::sweep::sweep(&spec)?;
    emit_table(&result.to_table(), args.format, &args.output)
}

pub fn tables(args: TablesArgs) -> Result<()> {
    let which = args
        .which
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u8>()
                .map_err(|_| Error::InvalidArgument(format!("table '{s}' is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = reproduce_tables(&which)?;
    emit_table(&tables_to_table(&rows), args.format, &args.output)
}

pub fn sens(args: SensArgs) -> Result<()> {
    let resolved = args.circuit.resolve()?;
    let circuit = resolved.circuit()?;
    let t0 = resolved.temperature()?;
    let dt = match (&args.dt, &resolved.config.dt) {
        (Some(s), _) => parse(s, Dimension::Temperature)?,
        (None, Some(v)) => v.resolve(Dimension::Temperature)?,
        (None, None) => 1e-3,
    };
    let fit_temps = match &args.fit_temps {
        Some(r) => parse_range(r, Dimension::Temperature)?,
        None => linspace(t0, (4.0 * t0).min(1.0), 7),
    };
    let r = sensitivities_with(&circuit, t0, dt, &resolved.options)?;
    let exponent = anharmonicity_temperature_exponent(&circuit, &fit_temps)?;
    let (df_mk, da_mk) = r.per_millikelvin();
    let mut report = Report::default();
    report.number("temperature_k", r.temperature);
    report.number("f_actual_hz", r.f_actual);
    report.number("anharmonicity_percent", r.anharmonicity);
    report.number("df_dt_hz_per_k", r.df_dt);
    report.number("da_dt_percent_per_k", r.da_dt);
    report.number("df_dt_mhz_per_mk", df_mk);
    report.number("da_dt_percent_per_mk", da_mk);
    report.number("s_f_t_percent", r.s_f_t);
    report.number("s_a_t_percent", r.s_a_t);
    report.number("step_used_k", r.step_used);
    report.number("richardson_error", r.richardson_error);
    report.number("a_temperature_exponent", exponent);
    report.number("fit_t_min_k", fit_temps.iter().cloned().fold(f64::INFINITY, f64::min));
    report.number("fit_t_max_k", fit_temps.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    write_out(&report.render(args.format)?, &args.output)
}

pub fn check(args: CheckArgs) -> Result<()> {
    let resolved = args.circuit.resolve()?;
    let (circuit, frequency) = match &args.frequency {
        Some(f) => {
            let f = parse(f, Dimension::Frequency)?;
            let circuit = match resolved.template() {
                Ok(t) => t.build(resolved.temperature()?, resolved.area()?)?,
                // Without an inductor, any valid one will do: only temperature matters here.
                Err(_) => {
                    let mut t = *resolved.capacitor();
                    t.inductor = cubit_core::InductorChoice::DesignFrequency(f);
                    t.build(resolved.temperature()?, resolved.area()?)?
                }
            };
            (circuit, f)
        }
        None => {
            let circuit = resolved.circuit()?;
            let f = analyze_with(&circuit, &resolved.options)?.f_actual;
            (circuit, f)
        }
    };
    let puddles = resolved.options.puddles;
    let feasibility = check_feasibility(&circuit, puddles.density, puddles.depth, frequency);
    let mut report = Report::default();
    report.number("f_actual_hz", frequency);
    report.number("puddle_density_cm2", puddles.density);
    report.number("puddle_depth_mev", puddles.depth);
    report.feasibility(&feasibility);
    report.flag("all_ok", feasibility.all_ok());
    write_out(&report.render(args.format)?, &args.output)
}
