use approx::assert_relative_eq;
use cubit_core::spectrum::{
    auto_domain, solve_charge_basis, solve_fock_kerr, GridSpec, KerrParams, PolynomialPotential,
};
use cubit_core::units::{Scaling, HBAR};
use cubit_core::qubit_design::kerr_level_series;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

#[test]
fn harmonic_levels_for_random_circuits() {
    let mut rng = StdRng::seed_from_u64(2024);
    for _ in 0..20 {
        let l = log_uniform(&mut rng, 1e-9, 1e-6);
        let c = log_uniform(&mut rng, 1e-15, 1e-11);
        let s = solve_charge_basis(&PolynomialPotential::harmonic(c), l, 5, GridSpec::auto()).unwrap();
        let quantum = HBAR / (l * c).sqrt();
        for (n, e) in s.levels.iter().enumerate() {
            assert_relative_eq!(*e, (n as f64 + 0.5) * quantum, max_relative = 1e-6);
        }
        assert!(s.converged);
        assert!(s.refinement_error <= 1e-6);
    }
}

/// Ground energy of `-d^2/dx^2 + x^4` from a dense oscillator basis.
fn quartic_ground_state_dense(n_basis: usize) -> f64 {
    let padded = n_basis + 4;
    // x = (a + a^dagger) / sqrt(2), p = i (a^dagger - a) / sqrt(2)
    let x = DMatrix::from_fn(padded, padded, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt() / 2f64.sqrt()
        } else {
            0.0
        }
    });
    let p_sq_neg = DMatrix::from_fn(padded, padded, |i, j| {
        // (a^dagger - a)^2 / 2
        let (i_f, j_f) = (i as f64, j as f64);
        if i == j {
            -(2.0 * i_f + 1.0) / 2.0
        } else if i == j + 2 {
            ((j_f + 1.0) * (j_f + 2.0)).sqrt() / 2.0
        } else if j == i + 2 {
            ((i_f + 1.0) * (i_f + 2.0)).sqrt() / 2.0
        } else {
            0.0
        }
    });
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let h_full = -p_sq_neg + x4;
    let h = h_full.view((0, 0), (n_basis, n_basis)).into_owned();
    let eig = SymmetricEigen::new(h);
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

#[test]
fn dense_oracle_knows_the_quartic_ground_state() {
    assert_relative_eq!(quartic_ground_state_dense(200), 1.060_362_090_484_182_9, max_relative = 1e-10);
}

#[test]
fn pure_quartic_ground_state_matches_dense_oracle() {
    let l = 20e-9;
    let kappa = 1e27;
    // Q = s x turns the Hamiltonian into eps (-d^2/dx^2 + x^4)
    let s = (HBAR * HBAR / (2.0 * l * kappa)).powf(1.0 / 6.0);
    let eps = HBAR * HBAR / (2.0 * l * s * s);
    let reference_c = 1e-13;
    let potential = PolynomialPotential::pure_quartic(kappa, reference_c);
    let spectrum = solve_charge_basis(&potential, l, 3, GridSpec::auto()).unwrap();
    let oracle = quartic_ground_state_dense(200) * eps;
    assert_relative_eq!(spectrum.levels[0], oracle, max_relative = 1e-6);
}

#[test]
fn charge_and_number_basis_agree_on_quartic_perturbation() {
    let (l, c) = (10e-9, 100e-15);
    let scaling = Scaling::from_lc(l, c).unwrap();
    let q_r = scaling.charge_ref;
    for g in [2e-4, 1e-3] {
        let lambda = g * HBAR * scaling.omega_ref / q_r.powi(4);
        let potential = PolynomialPotential::quartic_perturbed(c, lambda);
        let charge = solve_charge_basis(&potential, l, 3, GridSpec::auto()).unwrap();
        let alpha = 4.0 * lambda * q_r.powi(4) / (HBAR * scaling.omega_ref);
        let kerr = solve_fock_kerr(
            KerrParams { omega: scaling.omega_ref, alpha, tau: 0.0, n_trunc: 40 },
            3,
        )
        .unwrap();
        let a_charge = charge.anharmonicity().unwrap();
        let a_kerr = kerr.anharmonicity().unwrap();
        assert!(a_charge < 0.0, "hardening quartic must give negative A");
        assert_relative_eq!(a_charge, a_kerr, max_relative = 1e-2);
    }
}

#[test]
fn kerr_first_order_slope() {
    let omega = 2e10;
    for g in [1e-4, 2e-4] {
        let s = solve_fock_kerr(KerrParams { omega, alpha: 4.0 * g, tau: 0.0, n_trunc: 40 }, 4).unwrap();
        for n in 0..4 {
            let nf = n as f64;
            let shift = s.levels[n] / (HBAR * omega) - (nf + 0.5);
            let first = 3.0 * g * (2.0 * nf * nf + 2.0 * nf + 1.0);
            assert!((shift - first).abs() < 100.0 * g * g * (nf + 1.0).powi(3));
        }
    }
}

#[test]
fn kerr_matches_perturbation_series() {
    let omega = 3e10;
    for g in [5e-4, -5e-4] {
        let tau = if g < 0.0 { -4.0 * g / omega } else { 0.0 };
        let alpha = if g > 0.0 { 4.0 * g } else { 0.0 };
        let s = solve_fock_kerr(KerrParams { omega, alpha, tau, n_trunc: 30 }, 3).unwrap();
        for n in 0..3u32 {
            let exact = s.levels[n as usize] / (HBAR * omega);
            let series = kerr_level_series(n, g);
            let nf = n as f64;
            let third = 4.0 * g.powi(3)
                * (375.0 * nf.powi(4) + 750.0 * nf.powi(3) + 1416.0 * nf * nf + 1041.0 * nf + 333.0);
            let residual = (exact - series).abs();
            assert!(residual < third.abs(), "n = {n}: residual {residual:e} vs third-order term {third:e}");
            assert_relative_eq!(exact, series, max_relative = 1e-6);
        }
    }
}

#[test]
fn kerr_cancellation_gives_equal_spacing() {
    let omega = 2.0 * std::f64::consts::PI * 5e9;
    let tau = 1e-13;
    let s = solve_fock_kerr(KerrParams { omega, alpha: omega * tau, tau, n_trunc: 30 }, 5).unwrap();
    let spacing = HBAR * omega;
    for w in s.levels.windows(2) {
        assert_relative_eq!(w[1] - w[0], spacing, max_relative = 1e-10);
    }
}

#[test]
fn kerr_rejects_bad_parameters() {
    let ok = KerrParams { omega: 1e10, alpha: 0.0, tau: 0.0, n_trunc: 20 };
    assert!(solve_fock_kerr(KerrParams { n_trunc: 19, ..ok }, 3).is_err());
    assert!(solve_fock_kerr(KerrParams { omega: -1.0, ..ok }, 3).is_err());
    assert!(solve_fock_kerr(KerrParams { tau: -1e-12, ..ok }, 3).is_err());
    assert!(solve_fock_kerr(ok, 11).is_err());
}

#[test]
fn auto_domain_harmonic_turning_point() {
    let (l, c) = (5e-9, 3e-13);
    let scaling = Scaling::from_lc(l, c).unwrap();
    let d = auto_domain(&PolynomialPotential::harmonic(c), l, 1).unwrap();
    let q_t = (2.0 * c * 3.5 * HBAR * scaling.omega_ref).sqrt();
    assert_relative_eq!(d.q_max, 1.5 * q_t / scaling.charge_ref, max_relative = 1e-10);
    assert_eq!(d.q_min, -d.q_max);
    assert_eq!(d.n_points, 2001);
}

#[test]
fn auto_domain_grows_with_level_count() {
    let potential = PolynomialPotential::quartic_perturbed(1e-13, 1e40);
    let widths: Vec<f64> = (1..=6)
        .map(|n| auto_domain(&potential, 1e-8, n).unwrap().q_max)
        .collect();
    assert!(widths.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn extra_doubling_does_not_move_the_gap() {
    let potential = PolynomialPotential::quartic_perturbed(1e-13, 3e40);
    let l = 1e-8;
    let base = solve_charge_basis(&potential, l, 3, GridSpec::auto()).unwrap();
    assert!(base.converged);
    let performed = base.grid.unwrap().doublings.unwrap();
    let more = solve_charge_basis(
        &potential,
        l,
        3,
        GridSpec { doublings: Some(performed + 1), ..GridSpec::auto() },
    )
    .unwrap();
    let gap = |s: &cubit_core::Spectrum| s.levels[1] - s.levels[0];
    assert_relative_eq!(gap(&base), gap(&more), max_relative = 1e-6);
}

#[test]
fn fixed_grid_validation() {
    assert!(GridSpec::fixed(200, -5.0, 5.0).is_err());
    assert!(GridSpec::fixed(199, -5.0, 5.0).is_err());
    assert!(GridSpec::fixed(201, 1.0, 5.0).is_err());
    assert!(GridSpec::fixed(201, -5.0, 5.0).is_ok());
    let p = PolynomialPotential::harmonic(1e-13);
    assert!(solve_charge_basis(&p, 1e-8, 11, GridSpec::auto()).is_err());
    assert!(solve_charge_basis(&p, 0.0, 3, GridSpec::auto()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn levels_increase_and_sit_above_minimum(
        log_l in (1e-9f64).ln()..(1e-6f64).ln(),
        log_c in (1e-15f64).ln()..(1e-11f64).ln(),
        g in 0.0f64..5e-3,
    ) {
        let (l, c) = (log_l.exp(), log_c.exp());
        let scaling = Scaling::from_lc(l, c).unwrap();
        let lambda = g * HBAR * scaling.omega_ref / scaling.charge_ref.powi(4);
        let s = solve_charge_basis(&PolynomialPotential::quartic_perturbed(c, lambda), l, 4, GridSpec::auto()).unwrap();
        prop_assert!(s.levels[0] > 0.0);
        prop_assert!(s.levels.windows(2).all(|w| w[1] > w[0]));
        if s.converged {
            prop_assert!(s.refinement_error <= 1e-6);
        }
    }

    #[test]
    fn harmonic_oracle_property(
        log_l in (1e-9f64).ln()..(1e-6f64).ln(),
        log_c in (1e-15f64).ln()..(1e-11f64).ln(),
    ) {
        let (l, c) = (log_l.exp(), log_c.exp());
        let s = solve_charge_basis(&PolynomialPotential::harmonic(c), l, 5, GridSpec::auto()).unwrap();
        let quantum = HBAR / (l * c).sqrt();
        for (n, e) in s.levels.iter().enumerate() {
            let expected = (n as f64 + 0.5) * quantum;
            prop_assert!(((e - expected) / expected).abs() <= 1e-6);
        }
    }
}
