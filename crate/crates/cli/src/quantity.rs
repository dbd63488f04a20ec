//! SI-suffixed physical inputs such as `25mK`, `60nH` or `5e4um2`.
//!
//! Every value comes back in the unit the library expects: SI for most
//! dimensions, cm^-2 for puddle densities and meV for puddle depths.

use cubit_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Temperature,
    Area,
    Inductance,
    Capacitance,
    Frequency,
    Voltage,
    Velocity,
    /// Surface density, returned in cm^-2.
    Density,
    /// Energy, returned in meV.
    Energy,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Dimension::Temperature => "temperature",
            Dimension::Area => "area",
            Dimension::Inductance => "inductance",
            Dimension::Capacitance => "capacitance",
            Dimension::Frequency => "frequency",
            Dimension::Voltage => "voltage",
            Dimension::Velocity => "velocity",
            Dimension::Density => "surface density",
            Dimension::Energy => "energy",
        }
    }
}

/// Decimal exponent of an SI prefix.
fn prefix_exponent(prefix: &str) -> Option<i32> {
    Some(match prefix {
        "" => 0,
        "f" => -15,
        "p" => -12,
        "n" => -9,
        "u" | "µ" | "μ" => -6,
        "m" => -3,
        "c" => -2,
        "k" => 3,
        "M" => 6,
        "G" => 9,
        "T" => 12,
        _ => return None,
    })
}

/// Splits `"2.5GHz"` into `("2.5", "GHz")`.
fn split_number(text: &str) -> (&str, &str) {
    let bytes = text.as_bytes();
    let mut end = 0;
    while end < bytes.len() {
        let c = bytes[end] as char;
        let exponent_ok = (c == 'e' || c == 'E')
            && end > 0
            && matches!(bytes.get(end + 1), Some(b'0'..=b'9' | b'+' | b'-'))
            && !(matches!(bytes.get(end + 1), Some(b'+' | b'-'))
                && !matches!(bytes.get(end + 2), Some(b'0'..=b'9')));
        let sign_ok = (c == '+' || c == '-')
            && (end == 0 || matches!(bytes[end - 1], b'e' | b'E'));
        if c.is_ascii_digit() || c == '.' || exponent_ok || sign_ok {
            end += 1;
        } else {
            break;
        }
    }
    (&text[..end], text[end..].trim())
}

/// Decimal exponent of `unit` for `base`, allowing any SI prefix; `power`
/// applies the prefix that many times (2 for areas).
fn prefixed(unit: &str, base: &str, power: i32) -> Option<i32> {
    let prefix = unit.strip_suffix(base)?;
    prefix_exponent(prefix).map(|k| k * power)
}

fn unit_exponent(unit: &str, dim: Dimension) -> Option<i32> {
    if unit.is_empty() {
        return Some(0);
    }
    match dim {
        Dimension::Temperature => prefixed(unit, "K", 1),
        Dimension::Area => prefixed(unit, "m2", 2).or_else(|| prefixed(unit, "m^2", 2)),
        Dimension::Inductance => prefixed(unit, "H", 1),
        Dimension::Capacitance => prefixed(unit, "F", 1),
        Dimension::Frequency => prefixed(unit, "Hz", 1),
        Dimension::Voltage => prefixed(unit, "V", 1),
        Dimension::Velocity => prefixed(unit, "m/s", 1),
        Dimension::Density => match unit {
            "cm-2" | "cm^-2" | "/cm2" | "/cm^2" => Some(0),
            "m-2" | "m^-2" | "/m2" | "/m^2" => Some(-4),
            _ => None,
        },
        Dimension::Energy => prefixed(unit, "eV", 1).map(|k| k + 3),
    }
}

/// Parses a number with an optional unit suffix into the canonical unit of `dim`.
pub fn parse(text: &str, dim: Dimension) -> Result<f64, Error> {
    let trimmed = text.trim();
    let (number, unit) = split_number(trimmed);
    let value: f64 = number.parse().map_err(|_| {
        Error::InvalidArgument(format!("cannot read '{text}' as a {}", dim.name()))
    })?;
    let exponent = unit_exponent(unit, dim).ok_or_else(|| {
        Error::InvalidArgument(format!("unknown {} unit '{unit}' in '{text}'", dim.name()))
    })?;
    // Dividing by an exact power of ten keeps "60nH" at exactly 60e-9.
    let value = if exponent < 0 {
        value / 10f64.powi(-exponent)
    } else {
        value * 10f64.powi(exponent)
    };
    if !value.is_finite() {
        return Err(Error::InvalidArgument(format!("'{text}' is not finite")));
    }
    Ok(value)
}

/// A comma list (`15mK,25mK`) or an inclusive linspace (`15mK:100mK:18`).
pub fn parse_range(text: &str, dim: Dimension) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => single
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse(s, dim))
            .collect(),
        [start, stop, count] => {
            let n: usize = count.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("point count '{count}' is not an integer"))
            })?;
            if n == 0 {
                return Err(Error::InvalidArgument("range needs at least one point".into()));
            }
            Ok(cubit_core::sweep::linspace(parse(start, dim)?, parse(stop, dim)?, n))
        }
        _ => Err(Error::InvalidArgument(format!(
            "range '{text}' must be a comma list or start:stop:count"
        ))),
    }
}
