use approx::assert_relative_eq;
use cubit_core::qcap::{CapacitorElement, CapacitorNetwork, QCapModel};
use cubit_core::qubit_design::{analyze, AnalysisOptions, CircuitSpec};
use cubit_core::sweep::{
    anharmonicity_temperature_exponent, emit, linspace, render, reproduce_tables, sensitivities,
    sweep, tables_to_table, CircuitTemplate, Format, InductorChoice, Quantity, SweepSpec, Table,
    REFERENCE_DESIGNS,
};
use cubit_core::Error;

fn final_design() -> CircuitSpec {
    let net = CapacitorNetwork::quantum(QCapModel::new(5e-8, 0.025).unwrap()).unwrap();
    CircuitSpec::with_inductance(net, 60e-9).unwrap()
}

fn spec(temperatures: Vec<f64>, areas: Vec<f64>) -> SweepSpec {
    SweepSpec {
        temperatures,
        areas,
        template: CircuitTemplate::with_inductor(InductorChoice::Fixed(60e-9)),
        quantities: Quantity::ALL.to_vec(),
        options: AnalysisOptions::default(),
    }
}

#[test]
fn single_point_sweep_equals_direct_analysis() {
    let result = sweep(&spec(vec![0.025], vec![5e-8])).unwrap();
    let direct = analyze(&final_design(), 3).unwrap();
    assert_eq!(result.rows.len(), 1);
    let row = &result.rows[0];
    for (q, v) in result.quantities.iter().zip(&row.values) {
        assert_eq!(v.unwrap(), q.of(&direct), "{q}");
    }
    assert_eq!(row.inductance, Some(60e-9));
}

#[test]
fn anharmonicity_falls_with_temperature() {
    let temps = vec![0.015, 0.025, 0.05, 0.075, 0.1];
    let result = sweep(&spec(temps, vec![5e-8])).unwrap();
    let a: Vec<f64> = result.column(Quantity::Anharmonicity).into_iter().map(Option::unwrap).collect();
    assert!(a.windows(2).all(|w| w[1] < w[0]), "{a:?}");
}

#[test]
fn rows_are_temperature_major() {
    let result = sweep(&spec(vec![0.02, 0.03], vec![4e-8, 5e-8, 6e-8])).unwrap();
    let order: Vec<(f64, f64)> = result.rows.iter().map(|r| (r.temperature, r.area)).collect();
    assert_eq!(
        order,
        vec![(0.02, 4e-8), (0.02, 5e-8), (0.02, 6e-8), (0.03, 4e-8), (0.03, 5e-8), (0.03, 6e-8)]
    );
}

#[test]
fn sweep_output_is_byte_identical() {
    let s = spec(linspace(0.02, 0.05, 4), vec![3e-8, 5e-8]);
    let a = sweep(&s).unwrap().to_table();
    let b = sweep(&s).unwrap().to_table();
    for format in [Format::Csv, Format::Json] {
        assert_eq!(render(&a, format).unwrap(), render(&b, format).unwrap());
    }
}

#[test]
fn failing_points_are_isolated() {
    let mut s = spec(vec![0.025], vec![5e-8]);
    let ok = sweep(&s).unwrap();
    assert!(ok.rows[0].error.is_none());

    s.template.inductor = InductorChoice::Fixed(-1.0);
    match sweep(&s) {
        Err(Error::NumericDomain(msg)) => assert!(msg.contains("every sweep point failed")),
        other => panic!("expected an all-rows failure, got {other:?}"),
    }
}

/// Spread of A between 15 and 100 mK at fixed inductance, as a function of area.
#[test]
fn anharmonicity_spread_peaks_at_intermediate_area() {
    let areas: Vec<f64> = (0..21).map(|i| 1e-9 * 10f64.powf(i as f64 / 5.0)).collect();
    let mut s = spec(vec![0.015, 0.1], areas.clone());
    s.quantities = vec![Quantity::Anharmonicity];
    let result = sweep(&s).unwrap();
    let n = areas.len();
    let spread: Vec<f64> = (0..n)
        .map(|i| result.rows[i].values[0].unwrap() - result.rows[n + i].values[0].unwrap())
        .collect();
    let best = (0..n).max_by(|&i, &j| spread[i].total_cmp(&spread[j])).unwrap();
    let best_um2 = areas[best] * 1e12;
    println!("largest A spread {:.3} % at S = {best_um2:.3e} um^2", spread[best]);
    assert!(best > 0 && best < n - 1, "no interior maximum");
    assert!((5e3..=1e6).contains(&best_um2), "peak at {best_um2:e} um^2");
}

#[test]
fn sensitivity_report_is_self_consistent() {
    let r = sensitivities(&final_design(), 0.025, 1e-3).unwrap();
    assert_relative_eq!(r.s_f_t, r.df_dt * r.temperature / r.f_actual * 100.0, max_relative = 1e-12);
    assert_relative_eq!(r.s_a_t, r.da_dt * r.temperature / r.anharmonicity * 100.0, max_relative = 1e-12);
    assert!(r.richardson_error <= 1e-3, "{}", r.richardson_error);
    assert!(r.df_dt < 0.0 && r.da_dt < 0.0);
    assert_eq!(r.step_used, 1e-3);
}

#[test]
fn linear_stub_has_no_temperature_dependence() {
    let c = QCapModel::new(5e-8, 0.025).unwrap().zero_bias_capacitance();
    let net = CapacitorNetwork::new(CapacitorElement::Linear { capacitance: c }, None, None).unwrap();
    let circuit = CircuitSpec::with_inductance(net, 60e-9).unwrap();
    let r = sensitivities(&circuit, 0.025, 1e-3).unwrap();
    assert_eq!(r.df_dt, 0.0);
    assert_eq!(r.da_dt, 0.0);
}

#[test]
fn sensitivity_needs_positive_lower_temperature() {
    assert!(sensitivities(&final_design(), 0.001, 1e-3).is_err());
    assert!(sensitivities(&final_design(), 0.025, 0.0).is_err());
}

#[test]
fn anharmonicity_temperature_exponent_is_negative() {
    let temps = linspace(0.025, 0.1, 7);
    let p = anharmonicity_temperature_exponent(&final_design(), &temps).unwrap();
    println!("fitted exponent of A(T): {p:.3}");
    assert!(p < 0.0);
}

#[test]
fn tables_have_reference_rows_and_deviations() {
    let rows = reproduce_tables(&[1, 2, 3]).unwrap();
    assert_eq!(rows.len(), 9);
    for (row, reference) in rows.iter().zip(REFERENCE_DESIGNS.iter()) {
        assert_eq!(&row.reference, reference);
        assert!(row.error.is_none());
        let (df, _) = row.deviations();
        assert_relative_eq!(
            df.unwrap(),
            (row.actual_ghz.unwrap() - reference.actual_ghz) / reference.actual_ghz,
            max_relative = 1e-15
        );
    }
    let only_two = reproduce_tables(&[2]).unwrap();
    assert_eq!(only_two.len(), 3);
    assert!(only_two.iter().all(|r| r.reference.series_ff.is_some()));
}

#[test]
fn table_one_csv_has_three_data_rows() {
    let table = tables_to_table(&reproduce_tables(&[1]).unwrap());
    let csv = render(&table, Format::Csv).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("table,area_mm2,design_ghz,"));
}

#[test]
fn json_emit_round_trips_through_a_file() {
    let table = sweep(&spec(vec![0.025, 0.05], vec![5e-8])).unwrap().to_table();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    emit(&table, Format::Json, Some(&path)).unwrap();
    let back = Table::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, table);
}

#[test]
fn unwritable_destination_is_an_io_error() {
    let table = sweep(&spec(vec![0.025], vec![5e-8])).unwrap().to_table();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    assert!(matches!(emit(&table, Format::Csv, Some(&path)), Err(Error::Io(_))));
}

#[test]
fn invalid_ranges_rejected_before_work() {
    assert!(sweep(&spec(vec![], vec![5e-8])).is_err());
    assert!(sweep(&spec(vec![0.025], vec![2e-4])).is_err());
    assert!(sweep(&spec(vec![0.05, 0.025], vec![5e-8])).is_err());
    assert!(sweep(&spec(vec![0.0], vec![5e-8])).is_err());
}
