//! Energy spectra of the single-mode circuit.
//!
//! Two engines:
//!
//! * [`solve_charge_basis`] discretizes `H = Phi^2 / (2 L) + U(Q)` on a uniform
//!   charge grid with `Phi = -i hbar d/dQ`, giving a symmetric tridiagonal
//!   matrix whose lowest eigenvalues are found by Sturm-sequence bisection.
//!   Grid doubling with Richardson extrapolation removes the leading `h^2`
//!   error of the three-point Laplacian.
//! * [`solve_fock_kerr`] diagonalizes the quartic oscillator
//!   `hbar w (n + 1/2) + (1/4) hbar w (alpha - w tau) (a + a^dagger)^4`
//!   in a truncated number basis, without the rotating-wave approximation.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{Scaling, HBAR};

/// Largest number of levels the charge-basis solver returns.
pub const MAX_LEVELS: usize = 10;
/// Minimum grid size accepted by [`GridSpec`].
pub const MIN_GRID_POINTS: usize = 201;
/// Grid size chosen by [`auto_domain`].
pub const AUTO_GRID_POINTS: usize = 2001;
/// Domain half-width in units of the outermost turning point.
pub const DOMAIN_FACTOR: f64 = 1.5;
/// Extra levels whose classical region the automatic solver domain covers,
/// on top of the padding [`auto_domain`] already applies.
const AUTO_LEVEL_PADDING: usize = 2;
/// Relative agreement required between `n_trunc` and `2 n_trunc` Kerr solves.
pub const KERR_TRUNCATION_TOLERANCE: f64 = 1e-8;

/// A potential energy `U(Q)` in joules as a function of charge in coulombs.
pub trait Potential: Sync {
    fn energy(&self, charge: f64) -> Result<f64>;

    /// Capacitance that sets the solver's unit system; the inverse curvature
    /// at the minimum for a smooth well.
    fn reference_capacitance(&self) -> f64;
}

/// `U(Q) = Q^2 / (2 C) + lambda Q^4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialPotential {
    pub inverse_capacitance: f64,
    pub quartic: f64,
    pub reference_capacitance: f64,
}

impl PolynomialPotential {
    pub fn harmonic(capacitance: f64) -> Self {
        Self::quartic_perturbed(capacitance, 0.0)
    }

    pub fn quartic_perturbed(capacitance: f64, quartic: f64) -> Self {
        Self {
            inverse_capacitance: 1.0 / capacitance,
            quartic,
            reference_capacitance: capacitance,
        }
    }

    /// `lambda Q^4` alone; `reference_capacitance` only fixes the unit system.
    pub fn pure_quartic(quartic: f64, reference_capacitance: f64) -> Self {
        Self {
            inverse_capacitance: 0.0,
            quartic,
            reference_capacitance,
        }
    }
}

impl Potential for PolynomialPotential {
    fn energy(&self, q: f64) -> Result<f64> {
        let q2 = q * q;
        Ok(0.5 * self.inverse_capacitance * q2 + self.quartic * q2 * q2)
    }

    fn reference_capacitance(&self) -> f64 {
        self.reference_capacitance
    }
}

/// Uniform charge grid in scaled units (`q = Q / charge_ref`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Odd node count of the coarsest grid, endpoints included.
    pub n_points: usize,
    pub q_min: f64,
    pub q_max: f64,
    /// Choose the domain with [`auto_domain`]; `q_min`/`q_max` are ignored.
    pub auto: bool,
    /// Run exactly this many grid doublings instead of stopping at tolerance.
    pub doublings: Option<u32>,
}

impl GridSpec {
    pub fn auto() -> Self {
        Self {
            n_points: AUTO_GRID_POINTS,
            q_min: 0.0,
            q_max: 0.0,
            auto: true,
            doublings: None,
        }
    }

    pub fn fixed(n_points: usize, q_min: f64, q_max: f64) -> Result<Self> {
        let grid = Self {
            n_points,
            q_min,
            q_max,
            auto: false,
            doublings: None,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < MIN_GRID_POINTS || self.n_points % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid needs an odd point count of at least {MIN_GRID_POINTS}, got {}",
                self.n_points
            )));
        }
        if !self.auto && !(self.q_min < 0.0 && 0.0 < self.q_max && self.q_max.is_finite() && self.q_min.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must straddle zero, got [{}, {}]",
                self.q_min, self.q_max
            )));
        }
        Ok(())
    }

    fn step(&self, n_points: usize) -> f64 {
        (self.q_max - self.q_min) / (n_points - 1) as f64
    }
}

/// Refinement controls for the charge-basis solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Target relative change between successive extrapolated spectra.
    pub tolerance: f64,
    pub max_doublings: u32,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_doublings: 4,
        }
    }
}

/// Lowest eigenvalues of a circuit Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Strictly increasing energies [J].
    pub levels: Vec<f64>,
    pub n_levels: usize,
    pub converged: bool,
    /// Maximum relative change of the levels on the last refinement.
    pub refinement_error: f64,
    /// Refinement error after each doubling, in order.
    pub refinement_history: Vec<f64>,
    /// Resolved grid, with `doublings` set to the number performed.
    pub grid: Option<GridSpec>,
}

impl Spectrum {
    /// Builds a spectrum from externally computed levels.
    pub fn from_levels(levels: Vec<f64>) -> Result<Self> {
        if levels.windows(2).any(|w| !(w[1] > w[0])) || levels.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidArgument(
                "levels must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self {
            n_levels: levels.len(),
            levels,
            converged: true,
            refinement_error: 0.0,
            refinement_history: Vec::new(),
            grid: None,
        })
    }

    /// Angular frequency of the `n -> n + 1` transition [rad/s].
    pub fn transition_omega(&self, n: usize) -> Option<f64> {
        let lower = self.levels.get(n)?;
        let upper = self.levels.get(n + 1)?;
        Some((upper - lower) / HBAR)
    }

    /// `(w01 - w12) / w01`, as a fraction.
    pub fn anharmonicity(&self) -> Option<f64> {
        let w01 = self.transition_omega(0)?;
        let w12 = self.transition_omega(1)?;
        Some((w01 - w12) / w01)
    }
}

/// Lowest `n_levels` eigenvalues of `Phi^2 / (2 L) + U(Q)`.
pub fn solve_charge_basis(
    potential: &dyn Potential,
    inductance: f64,
    n_levels: usize,
    grid: GridSpec,
) -> Result<Spectrum> {
    solve_charge_basis_with(potential, inductance, n_levels, grid, SolverSettings::default())
}

pub fn solve_charge_basis_with(
    potential: &dyn Potential,
    inductance: f64,
    n_levels: usize,
    grid: GridSpec,
    settings: SolverSettings,
) -> Result<Spectrum> {
    if n_levels == 0 || n_levels > MAX_LEVELS {
        return Err(Error::InvalidArgument(format!(
            "n_levels must be in 1..={MAX_LEVELS}, got {n_levels}"
        )));
    }
    grid.validate()?;
    let scaling = Scaling::from_lc(inductance, potential.reference_capacitance())?;
    let mut grid = if grid.auto {
        GridSpec {
            n_points: grid.n_points,
            doublings: grid.doublings,
            ..auto_domain(potential, inductance, n_levels + AUTO_LEVEL_PADDING)?
        }
    } else {
        grid
    };

    let mut n_points = grid.n_points;
    let mut raw_prev = scaled_levels(potential, &scaling, &grid, n_points, n_levels)?;
    let mut extrapolated_prev: Option<Vec<f64>> = None;
    let mut history = Vec::new();
    let mut best = raw_prev.clone();
    let max_doublings = grid.doublings.unwrap_or(settings.max_doublings);

    for _ in 0..max_doublings {
        n_points = 2 * (n_points - 1) + 1;
        let raw = scaled_levels(potential, &scaling, &grid, n_points, n_levels)?;
        let extrapolated: Vec<f64> = raw
            .iter()
            .zip(&raw_prev)
            .map(|(fine, coarse)| (4.0 * fine - coarse) / 3.0)
            .collect();
        let reference = extrapolated_prev.as_ref().unwrap_or(&raw_prev);
        let change = max_relative_change(&extrapolated, reference);
        history.push(change);
        best = extrapolated.clone();
        raw_prev = raw;
        extrapolated_prev = Some(extrapolated);
        if grid.doublings.is_none() && change <= settings.tolerance {
            break;
        }
    }

    let refinement_error = history.last().copied().unwrap_or(f64::INFINITY);
    grid.doublings = Some(history.len() as u32);
    if best.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Solver(
            "eigenvalues are not strictly increasing; the grid is too coarse".into(),
        ));
    }
    Ok(Spectrum {
        levels: best.iter().map(|&e| scaling.unscale_energy(e)).collect(),
        n_levels,
        converged: refinement_error <= settings.tolerance,
        refinement_error,
        refinement_history: history,
        grid: Some(grid),
    })
}

fn max_relative_change(new: &[f64], old: &[f64]) -> f64 {
    new.iter()
        .zip(old)
        .map(|(a, b)| ((a - b) / a).abs())
        .fold(0.0, f64::max)
}

/// Lowest eigenvalues (scaled units) of `-d^2/dq^2 + U(q)` on `n_points` nodes.
fn scaled_levels(
    potential: &dyn Potential,
    scaling: &Scaling,
    grid: &GridSpec,
    n_points: usize,
    n_levels: usize,
) -> Result<Vec<f64>> {
    let h = grid.step(n_points);
    let kinetic = 1.0 / (h * h);
    let mut diag = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let q = if i == n_points - 1 {
            grid.q_max
        } else {
            grid.q_min + i as f64 * h
        };
        let u = scaling.scale_energy(potential.energy(scaling.unscale_charge(q))?);
        if !u.is_finite() {
            return Err(Error::NumericDomain(format!(
                "potential is not finite at scaled charge {q}"
            )));
        }
        diag.push(2.0 * kinetic + u);
    }
    let off_sq = vec![kinetic * kinetic; n_points - 1];
    lowest_eigenvalues(&diag, &off_sq, n_levels)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
///
/// `off_sq[i]` is the squared coupling between rows `i` and `i + 1`.
fn sturm_count(diag: &[f64], off_sq: &[f64], x: f64, pivot_floor: f64) -> usize {
    let mut count = 0;
    let mut d = diag[0] - x;
    for i in 0..diag.len() {
        if i > 0 {
            d = diag[i] - x - off_sq[i - 1] / d;
        }
        if d.abs() < pivot_floor {
            d = -pivot_floor;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k` smallest eigenvalues of a symmetric tridiagonal matrix, ascending.
pub(crate) fn lowest_eigenvalues(diag: &[f64], off_sq: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = diag.len();
    if k > n {
        return Err(Error::Solver(format!("requested {k} eigenvalues of a {n}x{n} matrix")));
    }
    let radius = |i: usize| {
        let left = if i > 0 { off_sq[i - 1].sqrt() } else { 0.0 };
        let right = if i + 1 < n { off_sq[i].sqrt() } else { 0.0 };
        left + right
    };
    let lower = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let upper = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let norm = lower.abs().max(upper.abs());
    let pivot_floor = f64::EPSILON * norm;

    let mut levels = Vec::with_capacity(k);
    let mut lo = lower;
    for j in 0..k {
        // hi: grow a bracket from lo until it holds j + 1 eigenvalues
        let mut width = 1.0_f64.max(lo.abs() * 1e-3);
        let mut hi = lo + width;
        while sturm_count(diag, off_sq, hi, pivot_floor) <= j {
            width *= 2.0;
            hi = lo + width;
            if hi > upper {
                hi = upper + width.min(1.0);
                break;
            }
        }
        let mut a = lo;
        let mut b = hi;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, off_sq, mid, pivot_floor) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        let value = 0.5 * (a + b);
        if !value.is_finite() {
            return Err(Error::Solver("bisection produced a non-finite eigenvalue".into()));
        }
        levels.push(value);
        lo = a;
    }
    Ok(levels)
}

/// Symmetric domain covering the classical region of level `n_levels + 2`.
pub fn auto_domain(potential: &dyn Potential, inductance: f64, n_levels: usize) -> Result<GridSpec> {
    let scaling = Scaling::from_lc(inductance, potential.reference_capacitance())?;
    let target = (n_levels as f64 + 2.5) * scaling.energy_ref;
    let turning = turning_point(potential, target, scaling.charge_ref)?;
    let q = DOMAIN_FACTOR * scaling.scale_charge(turning);
    Ok(GridSpec {
        n_points: AUTO_GRID_POINTS,
        q_min: -q,
        q_max: q,
        auto: false,
        doublings: None,
    })
}

/// Positive charge where `U(Q) = energy`, by bracketing and bisection.
pub(crate) fn turning_point(potential: &dyn Potential, energy: f64, start: f64) -> Result<f64> {
    if potential.energy(0.0)? >= energy {
        return Err(Error::NumericDomain(
            "target energy lies below the potential minimum".into(),
        ));
    }
    let mut lo = 0.0;
    let mut hi = start;
    let mut grow = 0;
    while potential.energy(hi)? < energy {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 200 || !hi.is_finite() {
            return Err(Error::NumericDomain(
                "potential never reaches the target energy".into(),
            ));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if potential.energy(mid)? < energy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Parameters of the quartic (Kerr-type) oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KerrParams {
    /// Bare angular frequency [rad/s].
    pub omega: f64,
    /// Josephson contribution, dimensionless.
    pub alpha: f64,
    /// Nonlinear interaction time of the quantum capacitor [s].
    pub tau: f64,
    pub n_trunc: usize,
}

impl KerrParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "omega must be finite and positive, got {}",
                self.omega
            )));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tau must be finite and nonnegative, got {}",
                self.tau
            )));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidArgument("alpha must be finite".into()));
        }
        if self.n_trunc < 20 {
            return Err(Error::InvalidArgument(format!(
                "n_trunc must be at least 20, got {}",
                self.n_trunc
            )));
        }
        Ok(())
    }

    /// Dimensionless quartic coupling `(alpha - omega tau) / 4`.
    pub fn coupling(&self) -> f64 {
        (self.alpha - self.omega * self.tau) / 4.0
    }
}

/// Lowest `n_levels` eigenvalues of the full quartic oscillator.
pub fn solve_fock_kerr(params: KerrParams, n_levels: usize) -> Result<Spectrum> {
    params.validate()?;
    if n_levels == 0 || n_levels + 10 > params.n_trunc {
        return Err(Error::InvalidArgument(format!(
            "n_levels + 10 must not exceed n_trunc ({} + 10 > {})",
            n_levels, params.n_trunc
        )));
    }
    let g = params.coupling();
    let coarse = kerr_levels(g, params.n_trunc, n_levels);
    let fine = kerr_levels(g, 2 * params.n_trunc, n_levels);
    let change = max_relative_change(&fine, &coarse);
    if !(change <= KERR_TRUNCATION_TOLERANCE) || coarse.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Solver(format!(
            "number basis of size {} is not converged (relative change {change:.3e} on doubling); \
             increase n_trunc or reduce the nonlinearity",
            params.n_trunc
        )));
    }
    let quantum = HBAR * params.omega;
    Ok(Spectrum {
        levels: coarse.iter().map(|e| e * quantum).collect(),
        n_levels,
        converged: true,
        refinement_error: change,
        refinement_history: vec![change],
        grid: None,
    })
}

/// Scaled eigenvalues of `n + 1/2 + g (a + a^dagger)^4` in a basis of size `n_trunc`.
fn kerr_levels(g: f64, n_trunc: usize, n_levels: usize) -> Vec<f64> {
    let quartic = quadrature_fourth_power(n_trunc);
    let h = DMatrix::from_fn(n_trunc, n_trunc, |i, j| {
        let diagonal = if i == j { i as f64 + 0.5 } else { 0.0 };
        diagonal + g * quartic[(i, j)]
    });
    let mut values: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values.truncate(n_levels);
    values
}

/// Exact matrix elements of `(a + a^dagger)^4` among the first `n` number states.
pub(crate) fn quadrature_fourth_power(n: usize) -> DMatrix<f64> {
    // intermediate states reach n + 1; pad so the product is exact
    let m = n + 4;
    let x = DMatrix::from_fn(m, m, |i, j| {
        if j == i + 1 {
            (j as f64).sqrt()
        } else if i == j + 1 {
            (i as f64).sqrt()
        } else {
            0.0
        }
    });
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    x4.view((0, 0), (n, n)).into_owned()
}
