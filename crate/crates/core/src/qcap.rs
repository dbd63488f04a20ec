//! Graphene quantum capacitance and the capacitor network built around it.
//!
//! The differential capacitance of a graphene/BN/graphene stack is
//!
//! ```text
//! C_Q(V) = 2 e^2 S k_B T / (pi (hbar v_F)^2) * ln[2 (1 + cosh(e V / (2 k_B T)))]
//! ```
//!
//! Charge and energy follow by integrating it. The integrals are tabulated once
//! per network on a voltage grid (composite Simpson per panel) and the table
//! grows by doubling its voltage span whenever a query falls outside it.

use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Potential;
use crate::units::{thermal_voltage, BOLTZMANN, ELEMENTARY_CHARGE, HBAR};

/// Fermi velocity of monolayer graphene used when none is given [m/s].
pub const DEFAULT_FERMI_VELOCITY: f64 = 1.0e6;

/// Simpson panels added per table segment.
const PANELS_PER_SEGMENT: usize = 4096;
/// Initial table span in units of the element's voltage scale.
const INITIAL_SPAN: f64 = 20.0;
/// Upper bound on span doublings before giving up.
const MAX_EXTENSIONS: usize = 64;

/// Parameters of the quantum capacitor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QCapModel {
    /// Geometric area [m^2].
    pub area: f64,
    /// Absolute temperature [K].
    pub temperature: f64,
    /// Fermi velocity [m/s].
    pub fermi_velocity: f64,
    /// Dimensionless multiplier on the Fermi velocity, in (0, 1].
    pub vf_scale: f64,
}

impl QCapModel {
    pub fn new(area: f64, temperature: f64) -> Result<Self> {
        let model = Self {
            area,
            temperature,
            fermi_velocity: DEFAULT_FERMI_VELOCITY,
            vf_scale: 1.0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_fermi_velocity(mut self, fermi_velocity: f64) -> Result<Self> {
        self.fermi_velocity = fermi_velocity;
        self.validate()?;
        Ok(self)
    }

    pub fn with_vf_scale(mut self, vf_scale: f64) -> Result<Self> {
        self.vf_scale = vf_scale;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be finite and positive, got {v}"
                )))
            }
        };
        positive("area", self.area)?;
        positive("temperature", self.temperature)?;
        positive("fermi velocity", self.fermi_velocity)?;
        positive("fermi velocity scale", self.vf_scale)?;
        if self.vf_scale > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "fermi velocity scale must not exceed 1, got {}",
                self.vf_scale
            )));
        }
        Ok(())
    }

    pub fn effective_velocity(&self) -> f64 {
        self.fermi_velocity * self.vf_scale
    }

    /// `2 e^2 S k_B T / (pi (hbar v)^2)`, the capacitance per unit of the log factor.
    pub fn prefactor(&self) -> f64 {
        let hv = HBAR * self.effective_velocity();
        2.0 * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * self.area * BOLTZMANN * self.temperature
            / (std::f64::consts::PI * hv * hv)
    }

    /// Quantum capacitance at bias `voltage` [F].
    pub fn cq_of_voltage(&self, voltage: f64) -> Result<f64> {
        if voltage.is_nan() {
            return Err(Error::InvalidArgument("voltage is NaN".into()));
        }
        Ok(self.capacitance(voltage))
    }

    fn capacitance(&self, voltage: f64) -> f64 {
        let x = voltage / thermal_voltage(self.temperature);
        self.prefactor() * log_two_one_plus_cosh(x)
    }

    /// Zero-bias capacitance `C_Q(0)` [F].
    pub fn zero_bias_capacitance(&self) -> f64 {
        self.prefactor() * 4f64.ln()
    }

    /// Stored charge `Q(V) = integral of C_Q from 0 to V` [C].
    ///
    /// Builds a fresh table; hold a [`ChargeVoltageMap`] for repeated queries.
    pub fn charge_of_voltage(&self, voltage: f64) -> Result<f64> {
        ChargeVoltageMap::new((*self).into(), 0.0)?.charge_of_voltage(voltage)
    }

    /// Inverse of [`QCapModel::charge_of_voltage`].
    pub fn voltage_of_charge(&self, charge: f64) -> Result<f64> {
        ChargeVoltageMap::new((*self).into(), 0.0)?.voltage_of_charge(charge)
    }
}

/// `ln[2 (1 + cosh x)] = |x| + 2 ln(1 + e^{-|x|})`, exact and overflow free.
pub fn log_two_one_plus_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + 2.0 * (-a).exp().ln_1p()
}

/// The nonlinear element of a network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacitorElement {
    Quantum(QCapModel),
    /// Constant capacitance; the harmonic reference circuit.
    Linear { capacitance: f64 },
}

impl From<QCapModel> for CapacitorElement {
    fn from(model: QCapModel) -> Self {
        CapacitorElement::Quantum(model)
    }
}

impl CapacitorElement {
    pub fn validate(&self) -> Result<()> {
        match self {
            CapacitorElement::Quantum(m) => m.validate(),
            CapacitorElement::Linear { capacitance } => {
                if capacitance.is_finite() && *capacitance > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "linear capacitance must be finite and positive, got {capacitance}"
                    )))
                }
            }
        }
    }

    pub fn capacitance(&self, voltage: f64) -> f64 {
        match self {
            CapacitorElement::Quantum(m) => m.capacitance(voltage),
            CapacitorElement::Linear { capacitance } => *capacitance,
        }
    }

    pub fn zero_bias_capacitance(&self) -> f64 {
        match self {
            CapacitorElement::Quantum(m) => m.zero_bias_capacitance(),
            CapacitorElement::Linear { capacitance } => *capacitance,
        }
    }

    pub fn temperature(&self) -> Option<f64> {
        match self {
            CapacitorElement::Quantum(m) => Some(m.temperature),
            CapacitorElement::Linear { .. } => None,
        }
    }

    /// Voltage over which the capacitance changes appreciably.
    fn voltage_scale(&self) -> f64 {
        match self {
            CapacitorElement::Quantum(m) => thermal_voltage(m.temperature),
            CapacitorElement::Linear { .. } => 1e-3,
        }
    }
}

/// Cumulative charge and energy on the nonnegative voltage half-axis.
///
/// The negative half follows by symmetry: charge is odd, energy is even.
#[derive(Debug, Clone)]
pub struct ChargeVoltageTable {
    voltages: Vec<f64>,
    charges: Vec<f64>,
    energies: Vec<f64>,
    /// Shape-preserving slopes dV/dQ at each node.
    slopes: Vec<f64>,
}

impl ChargeVoltageTable {
    pub fn voltages(&self) -> &[f64] {
        &self.voltages
    }

    pub fn charges(&self) -> &[f64] {
        &self.charges
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn max_voltage(&self) -> f64 {
        *self.voltages.last().unwrap()
    }

    pub fn max_charge(&self) -> f64 {
        *self.charges.last().unwrap()
    }

    fn with_span(law: &CapacitanceLaw, span: f64) -> Self {
        let mut table = Self {
            voltages: vec![0.0],
            charges: vec![0.0],
            energies: vec![0.0],
            slopes: Vec::new(),
        };
        table.append_segment(law, span);
        table
    }

    fn append_segment(&mut self, law: &CapacitanceLaw, end: f64) {
        let start = self.max_voltage();
        let h = (end - start) / PANELS_PER_SEGMENT as f64;
        let mut q = self.max_charge();
        let mut e = *self.energies.last().unwrap();
        let mut a = start;
        let mut ca = law.capacitance(a);
        self.voltages.reserve(PANELS_PER_SEGMENT);
        for k in 1..=PANELS_PER_SEGMENT {
            let b = if k == PANELS_PER_SEGMENT {
                end
            } else {
                start + k as f64 * h
            };
            let m = 0.5 * (a + b);
            let cm = law.capacitance(m);
            let cb = law.capacitance(b);
            let w = (b - a) / 6.0;
            q += w * (ca + 4.0 * cm + cb);
            e += w * (a * ca + 4.0 * m * cm + b * cb);
            self.voltages.push(b);
            self.charges.push(q);
            self.energies.push(e);
            a = b;
            ca = cb;
        }
        self.slopes = pchip_slopes(&self.charges, &self.voltages);
    }

    /// Index `i` with `voltages[i] <= v <= voltages[i + 1]`.
    fn voltage_panel(&self, v: f64) -> usize {
        let i = self.voltages.partition_point(|&x| x <= v);
        i.saturating_sub(1).min(self.voltages.len() - 2)
    }

    fn charge_panel(&self, q: f64) -> usize {
        let i = self.charges.partition_point(|&x| x <= q);
        i.saturating_sub(1).min(self.charges.len() - 2)
    }

    /// Monotone cubic Hermite estimate of V at charge `q >= 0`.
    fn interpolate_voltage(&self, q: f64) -> (usize, f64) {
        let i = self.charge_panel(q);
        let (q0, q1) = (self.charges[i], self.charges[i + 1]);
        let (v0, v1) = (self.voltages[i], self.voltages[i + 1]);
        let h = q1 - q0;
        let t = (q - q0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * v0 + h10 * h * self.slopes[i] + h01 * v1 + h11 * h * self.slopes[i + 1];
        (i, v.clamp(v0, v1))
    }
}

/// Fritsch-Butland (PCHIP) derivative estimates for monotone data.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        let (d0, d1) = (delta[k - 1], delta[k]);
        if d0 * d1 <= 0.0 {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    d[0] = pchip_end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Total differential capacitance seen at the quantum-capacitor node.
#[derive(Debug, Clone, Copy, PartialEq)]
struct CapacitanceLaw {
    element: CapacitorElement,
    shunt: f64,
}

impl CapacitanceLaw {
    fn capacitance(&self, v: f64) -> f64 {
        self.element.capacitance(v) + self.shunt
    }
}

/// Lazily tabulated charge/voltage/energy relations of one node.
///
/// The table is replaced wholesale when it grows, so concurrent readers always
/// see a complete table.
#[derive(Debug)]
pub struct ChargeVoltageMap {
    law: CapacitanceLaw,
    table: RwLock<Arc<ChargeVoltageTable>>,
}

impl ChargeVoltageMap {
    /// Map for `element` with an optional linear `shunt` capacitance in parallel.
    pub fn new(element: CapacitorElement, shunt: f64) -> Result<Self> {
        element.validate()?;
        if !(shunt.is_finite() && shunt >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "shunt capacitance must be finite and nonnegative, got {shunt}"
            )));
        }
        let law = CapacitanceLaw { element, shunt };
        let table = ChargeVoltageTable::with_span(&law, INITIAL_SPAN * element.voltage_scale());
        Ok(Self {
            law,
            table: RwLock::new(Arc::new(table)),
        })
    }

    /// Snapshot of the current table.
    pub fn table(&self) -> Arc<ChargeVoltageTable> {
        self.table.read().unwrap().clone()
    }

    /// Total node capacitance at `voltage` [F].
    pub fn capacitance(&self, voltage: f64) -> f64 {
        self.law.capacitance(voltage)
    }

    fn covering(&self, covered: impl Fn(&ChargeVoltageTable) -> bool) -> Result<Arc<ChargeVoltageTable>> {
        let current = self.table();
        if covered(&current) {
            return Ok(current);
        }
        let mut guard = self.table.write().unwrap();
        if covered(&guard) {
            return Ok(guard.clone());
        }
        let mut grown = (**guard).clone();
        for _ in 0..MAX_EXTENSIONS {
            let end = 2.0 * grown.max_voltage();
            grown.append_segment(&self.law, end);
            if !(grown.max_charge().is_finite() && grown.max_voltage().is_finite()) {
                return Err(Error::NumericDomain(
                    "charge table grew to non-finite values".into(),
                ));
            }
            if covered(&grown) {
                let grown = Arc::new(grown);
                *guard = grown.clone();
                return Ok(grown);
            }
        }
        Err(Error::NumericDomain(format!(
            "charge table could not cover the request after {MAX_EXTENSIONS} extensions"
        )))
    }

    /// Charge accumulated up to node voltage `voltage` [C].
    pub fn charge_of_voltage(&self, voltage: f64) -> Result<f64> {
        if !voltage.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "voltage must be finite, got {voltage}"
            )));
        }
        let v = voltage.abs();
        let table = self.covering(|t| t.max_voltage() >= v)?;
        let i = table.voltage_panel(v);
        let q = table.charges[i] + self.simpson_charge(table.voltages[i], v);
        Ok(q.copysign(voltage))
    }

    /// Node voltage holding charge `charge` [V].
    pub fn voltage_of_charge(&self, charge: f64) -> Result<f64> {
        if !charge.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "charge must be finite, got {charge}"
            )));
        }
        let q = charge.abs();
        let table = self.covering(|t| t.max_charge() >= q)?;
        let v = self.polish(&table, q);
        Ok(v.copysign(charge))
    }

    /// Stored energy `integral of v C(v) dv` up to node voltage `voltage` [J].
    pub fn energy_of_voltage(&self, voltage: f64) -> Result<f64> {
        if !voltage.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "voltage must be finite, got {voltage}"
            )));
        }
        let v = voltage.abs();
        let table = self.covering(|t| t.max_voltage() >= v)?;
        let i = table.voltage_panel(v);
        Ok(table.energies[i] + self.simpson_energy(table.voltages[i], v))
    }

    /// Energy stored when the node holds `charge` [J].
    pub fn energy_of_charge(&self, charge: f64) -> Result<f64> {
        let v = self.voltage_of_charge(charge)?;
        self.energy_of_voltage(v)
    }

    /// Interpolated guess followed by one Newton step on `Q(V) = q`.
    fn polish(&self, table: &ChargeVoltageTable, q: f64) -> f64 {
        if q == 0.0 {
            return 0.0;
        }
        let (i, v) = table.interpolate_voltage(q);
        let residual = table.charges[i] + self.simpson_charge(table.voltages[i], v) - q;
        (v - residual / self.law.capacitance(v)).max(0.0)
    }

    fn simpson_charge(&self, a: f64, b: f64) -> f64 {
        if b == a {
            return 0.0;
        }
        let m = 0.5 * (a + b);
        (b - a) / 6.0
            * (self.law.capacitance(a) + 4.0 * self.law.capacitance(m) + self.law.capacitance(b))
    }

    fn simpson_energy(&self, a: f64, b: f64) -> f64 {
        if b == a {
            return 0.0;
        }
        let m = 0.5 * (a + b);
        (b - a) / 6.0
            * (a * self.law.capacitance(a)
                + 4.0 * m * self.law.capacitance(m)
                + b * self.law.capacitance(b))
    }
}

/// The quantum capacitor with optional linear series and parallel capacitors.
///
/// `C_P` sits directly across the quantum capacitor, `C_S` in series with the
/// pair. The charge coordinate is the charge delivered through the terminals.
#[derive(Debug, Clone)]
pub struct CapacitorNetwork {
    element: CapacitorElement,
    series_cs: Option<f64>,
    parallel_cp: Option<f64>,
    map: Arc<ChargeVoltageMap>,
}

impl CapacitorNetwork {
    pub fn new(
        element: impl Into<CapacitorElement>,
        series_cs: Option<f64>,
        parallel_cp: Option<f64>,
    ) -> Result<Self> {
        let element = element.into();
        for (name, c) in [("series", series_cs), ("parallel", parallel_cp)] {
            if let Some(c) = c {
                if !(c.is_finite() && c > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "{name} capacitance must be finite and positive, got {c}"
                    )));
                }
            }
        }
        let map = ChargeVoltageMap::new(element, parallel_cp.unwrap_or(0.0))?;
        Ok(Self {
            element,
            series_cs,
            parallel_cp,
            map: Arc::new(map),
        })
    }

    /// Bare quantum capacitor.
    pub fn quantum(model: QCapModel) -> Result<Self> {
        Self::new(model, None, None)
    }

    /// Same network with the series capacitor replaced.
    pub fn with_series(&self, series_cs: Option<f64>) -> Result<Self> {
        if let Some(c) = series_cs {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "series capacitance must be finite and positive, got {c}"
                )));
            }
        }
        Ok(Self {
            series_cs,
            ..self.clone()
        })
    }

    /// Same network with the quantum capacitor at another temperature.
    /// Linear elements are returned unchanged.
    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        match self.element {
            CapacitorElement::Quantum(m) => {
                let model = QCapModel { temperature, ..m };
                model.validate()?;
                Self::new(model, self.series_cs, self.parallel_cp)
            }
            CapacitorElement::Linear { .. } => Ok(self.clone()),
        }
    }

    pub fn element(&self) -> &CapacitorElement {
        &self.element
    }

    pub fn series_cs(&self) -> Option<f64> {
        self.series_cs
    }

    pub fn parallel_cp(&self) -> Option<f64> {
        self.parallel_cp
    }

    pub fn temperature(&self) -> Option<f64> {
        self.element.temperature()
    }

    /// The tabulated map of the quantum-capacitor node.
    pub fn node_map(&self) -> &ChargeVoltageMap {
        &self.map
    }

    /// Circuit potential energy at terminal charge `charge` [J].
    pub fn energy_of_charge(&self, charge: f64) -> Result<f64> {
        let node = self.map.energy_of_charge(charge)?;
        let series = self
            .series_cs
            .map_or(0.0, |cs| charge * charge / (2.0 * cs));
        Ok(node + series)
    }

    /// Voltage across the quantum capacitor at terminal charge `charge` [V].
    pub fn node_voltage(&self, charge: f64) -> Result<f64> {
        self.map.voltage_of_charge(charge)
    }

    /// Zero-bias small-signal capacitance `1 / E''(0)` [F].
    pub fn linearized_capacitance(&self) -> f64 {
        let node = self.element.zero_bias_capacitance() + self.parallel_cp.unwrap_or(0.0);
        match self.series_cs {
            Some(cs) => 1.0 / (1.0 / node + 1.0 / cs),
            None => node,
        }
    }
}

impl Potential for CapacitorNetwork {
    fn energy(&self, charge: f64) -> Result<f64> {
        self.energy_of_charge(charge)
    }

    fn reference_capacitance(&self) -> f64 {
        self.linearized_capacitance()
    }
}
