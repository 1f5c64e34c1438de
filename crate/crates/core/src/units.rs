//! Unit-tagged scalars, SI-prefix text grammar, and the IEC 60063 preferred
//! value series.
//!
//! Text grammar: `value := decimal prefix? unit?` where
//! `prefix ∈ {p, n, u|µ|μ, m, k, M, G}`. The unit suffix is optional but, when
//! present, must agree with the unit the caller expects.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("malformed number in {0:?}")]
    MalformedNumber(String),
    #[error("unknown prefix or unit {suffix:?} in {text:?}")]
    UnknownSuffix { text: String, suffix: String },
    #[error("unit {found} in {text:?} conflicts with expected {expected}")]
    UnitConflict {
        text: String,
        expected: Unit,
        found: Unit,
    },
    #[error("{0} is not a finite magnitude")]
    NonFinite(f64),
    #[error("{unit} magnitude must be non-negative, got {value}")]
    Negative { unit: Unit, value: f64 },
    #[error("value to snap must be positive and finite, got {0}")]
    NotSnappable(f64),
    #[error("unknown preferred-value series {0:?}")]
    UnknownSeries(String),
    #[error("unknown snap mode {0:?}")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Ohm,
    Farad,
    Volt,
    Ampere,
    Second,
    Hertz,
    Watt,
    Dimensionless,
}

impl Unit {
    pub const ALL: [Unit; 8] = [
        Unit::Ohm,
        Unit::Farad,
        Unit::Volt,
        Unit::Ampere,
        Unit::Second,
        Unit::Hertz,
        Unit::Watt,
        Unit::Dimensionless,
    ];

    /// Symbol used when formatting.
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Ohm => "Ω",
            Unit::Farad => "F",
            Unit::Volt => "V",
            Unit::Ampere => "A",
            Unit::Second => "s",
            Unit::Hertz => "Hz",
            Unit::Watt => "W",
            Unit::Dimensionless => "",
        }
    }

    fn from_suffix(s: &str) -> Option<Unit> {
        match s {
            "Ω" | "ohm" | "ohms" => Some(Unit::Ohm),
            "F" => Some(Unit::Farad),
            "V" => Some(Unit::Volt),
            "A" => Some(Unit::Ampere),
            "s" => Some(Unit::Second),
            "Hz" => Some(Unit::Hertz),
            "W" => Some(Unit::Watt),
            _ => None,
        }
    }

    /// Units whose magnitude may not be negative.
    pub fn is_non_negative(self) -> bool {
        matches!(self, Unit::Ohm | Unit::Farad | Unit::Hertz)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Unit::Ohm => "ohm",
            Unit::Farad => "farad",
            Unit::Volt => "volt",
            Unit::Ampere => "ampere",
            Unit::Second => "second",
            Unit::Hertz => "hertz",
            Unit::Watt => "watt",
            Unit::Dimensionless => "dimensionless",
        };
        f.write_str(name)
    }
}

/// A finite magnitude tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    magnitude: f64,
    unit: Unit,
}

impl Quantity {
    pub fn new(magnitude: f64, unit: Unit) -> Result<Self, UnitError> {
        if !magnitude.is_finite() {
            return Err(UnitError::NonFinite(magnitude));
        }
        if unit.is_non_negative() && magnitude < 0.0 {
            return Err(UnitError::Negative {
                unit,
                value: magnitude,
            });
        }
        Ok(Quantity { magnitude, unit })
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_quantity(*self))
    }
}

const PREFIXES: [(&str, f64); 7] = [
    ("p", 1e-12),
    ("n", 1e-9),
    ("u", 1e-6),
    ("m", 1e-3),
    ("", 1.0),
    ("k", 1e3),
    ("M", 1e6),
];

const GIGA: (&str, f64) = ("G", 1e9);

fn prefix_exponent(p: &str) -> Option<i32> {
    match p {
        "p" => Some(-12),
        "n" => Some(-9),
        "u" | "µ" | "μ" => Some(-6),
        "m" => Some(-3),
        "k" => Some(3),
        "M" => Some(6),
        "G" => Some(9),
        _ => None,
    }
}

/// Splits `text` into its numeric head and the suffix after it.
fn split_number(text: &str) -> (&str, &str) {
    let bytes = text.as_bytes();
    let mut end = 0;
    let mut seen_digit = false;
    while end < bytes.len() {
        let c = bytes[end];
        let ok = c.is_ascii_digit()
            || c == b'.'
            || ((c == b'+' || c == b'-') && (end == 0 || matches!(bytes[end - 1], b'e' | b'E')))
            || ((c == b'e' || c == b'E')
                && seen_digit
                && bytes
                    .get(end + 1)
                    .is_some_and(|n| n.is_ascii_digit() || *n == b'-' || *n == b'+'));
        if !ok {
            break;
        }
        seen_digit |= c.is_ascii_digit();
        end += 1;
    }
    (&text[..end], &text[end..])
}

/// Parses a value such as `220k`, `47uF` or `0.6V` as a quantity of `expected`.
pub fn parse_quantity(text: &str, expected: Unit) -> Result<Quantity, UnitError> {
    let (magnitude, found) = parse_magnitude(text)?;
    if let Some(found) = found {
        if found != expected {
            return Err(UnitError::UnitConflict {
                text: text.trim().to_string(),
                expected,
                found,
            });
        }
    }
    Quantity::new(magnitude, expected)
}

/// Parses number and prefix, returning the unit named by the suffix if any.
pub fn parse_magnitude(text: &str) -> Result<(f64, Option<Unit>), UnitError> {
    let trimmed = text.trim();
    let (number, suffix) = split_number(trimmed);
    let value = f64::from_str(number).map_err(|_| UnitError::MalformedNumber(trimmed.into()))?;
    if !value.is_finite() {
        return Err(UnitError::NonFinite(value));
    }
    let suffix = suffix.trim_start();
    if suffix.is_empty() {
        return Ok((value, None));
    }
    if let Some(unit) = Unit::from_suffix(suffix) {
        return Ok((value, Some(unit)));
    }
    let first_len = suffix.chars().next().map_or(0, char::len_utf8);
    let (prefix, rest) = suffix.split_at(first_len);
    let unknown = || UnitError::UnknownSuffix {
        text: trimmed.into(),
        suffix: suffix.into(),
    };
    let exp = prefix_exponent(prefix).ok_or_else(unknown)?;
    let unit = if rest.is_empty() {
        None
    } else {
        Some(Unit::from_suffix(rest).ok_or_else(unknown)?)
    };
    // Re-parse with the exponent attached so "100u" is the double nearest 1e-4.
    let scaled = if number.contains(['e', 'E']) {
        value * 10f64.powi(exp)
    } else {
        format!("{number}e{exp}")
            .parse()
            .map_err(|_| UnitError::MalformedNumber(trimmed.into()))?
    };
    if !scaled.is_finite() {
        return Err(UnitError::NonFinite(scaled));
    }
    Ok((scaled, unit))
}

fn pick_prefix(abs: f64) -> (&'static str, f64) {
    if abs >= GIGA.1 {
        return GIGA;
    }
    PREFIXES
        .iter()
        .rev()
        .copied()
        .find(|(_, scale)| abs >= *scale)
        .unwrap_or(PREFIXES[0])
}

/// Shortest decimal rendering of `mantissa` that reproduces `target` after
/// scaling by `scale` to within 1e-12 relative.
fn shortest_mantissa(mantissa: f64, scale: f64, target: f64) -> String {
    for decimals in 0..=17 {
        let s = trim_decimal(format!("{mantissa:.decimals$}"));
        let back: f64 = s.parse().unwrap_or(f64::NAN);
        if ((back * scale - target) / target).abs() <= 1e-12 {
            return s;
        }
    }
    format!("{mantissa}")
}

fn trim_decimal(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Formats with an SI prefix and the shortest mantissa that round-trips
/// through [`parse_quantity`].
pub fn format_quantity(q: Quantity) -> String {
    let x = q.magnitude;
    if x == 0.0 {
        return format!("0{}", q.unit.symbol());
    }
    let sign = if x < 0.0 { "-" } else { "" };
    let abs = x.abs();
    let (prefix, scale) = pick_prefix(abs);
    let mantissa = shortest_mantissa(abs / scale, scale, abs);
    format!("{sign}{mantissa}{prefix}{}", q.unit.symbol())
}

/// Formats with an SI prefix and at most `digits` significant digits.
/// Used by human-facing reports where full round-trip precision is noise.
pub fn format_significant(q: Quantity, digits: usize) -> String {
    let x = q.magnitude;
    if x == 0.0 {
        return format!("0{}", q.unit.symbol());
    }
    let sign = if x < 0.0 { "-" } else { "" };
    // Round first: rounding can carry into the next prefix (999.9996 -> 1k).
    let rounded = round_significant(x.abs(), digits);
    let (prefix, scale) = if q.unit == Unit::Dimensionless {
        ("", 1.0)
    } else {
        pick_prefix(rounded)
    };
    let mantissa = rounded / scale;
    // Digits before the point, negative when leading zeros follow it.
    let magnitude = mantissa.log10().floor() as i64 + 1;
    let decimals = (digits as i64 - magnitude).max(0) as usize;
    let s = trim_decimal(format!("{mantissa:.decimals$}"));
    format!("{sign}{s}{prefix}{}", q.unit.symbol())
}

fn round_significant(x: f64, digits: usize) -> f64 {
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse().unwrap_or(x)
}

/// IEC 60063 preferred number series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ESeries {
    E6,
    E12,
    E24,
    E96,
}

// Mantissas stored as integers: two significant digits for E6..E24, three for E96.
const E6: [u16; 6] = [10, 15, 22, 33, 47, 68];
const E12: [u16; 12] = [10, 12, 15, 18, 22, 27, 33, 39, 47, 56, 68, 82];
const E24: [u16; 24] = [
    10, 11, 12, 13, 15, 16, 18, 20, 22, 24, 27, 30, 33, 36, 39, 43, 47, 51, 56, 62, 68, 75, 82, 91,
];
const E96: [u16; 96] = [
    100, 102, 105, 107, 110, 113, 115, 118, 121, 124, 127, 130, 133, 137, 140, 143, 147, 150, 154,
    158, 162, 165, 169, 174, 178, 182, 187, 191, 196, 200, 205, 210, 215, 221, 226, 232, 237, 243,
    249, 255, 261, 267, 274, 280, 287, 294, 301, 309, 316, 324, 332, 340, 348, 357, 365, 374, 383,
    392, 402, 412, 422, 432, 442, 453, 464, 475, 487, 499, 511, 523, 536, 549, 562, 576, 590, 604,
    619, 634, 649, 665, 681, 698, 715, 732, 750, 768, 787, 806, 825, 845, 866, 887, 909, 931, 953,
    976,
];

impl ESeries {
    pub const ALL: [ESeries; 4] = [ESeries::E6, ESeries::E12, ESeries::E24, ESeries::E96];

    pub fn name(self) -> &'static str {
        match self {
            ESeries::E6 => "E6",
            ESeries::E12 => "E12",
            ESeries::E24 => "E24",
            ESeries::E96 => "E96",
        }
    }

    fn table(self) -> (&'static [u16], i32) {
        match self {
            ESeries::E6 => (&E6, 1),
            ESeries::E12 => (&E12, 1),
            ESeries::E24 => (&E24, 1),
            ESeries::E96 => (&E96, 2),
        }
    }

    /// Per-decade mantissas in `[1, 10)`, strictly increasing.
    pub fn mantissas(self) -> Vec<f64> {
        let (table, digits) = self.table();
        table.iter().map(|&m| member_value(m, -digits)).collect()
    }

    /// Member `index` of the decade starting at `10^decade`.
    fn member(self, index: usize, decade: i32) -> f64 {
        let (table, digits) = self.table();
        member_value(table[index], decade - digits)
    }
}

impl FromStr for ESeries {
    type Err = UnitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "E6" => Ok(ESeries::E6),
            "E12" => Ok(ESeries::E12),
            "E24" => Ok(ESeries::E24),
            "E96" => Ok(ESeries::E96),
            _ => Err(UnitError::UnknownSeries(s.into())),
        }
    }
}

impl fmt::Display for ESeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `m × 10^exp`, correctly rounded for negative exponents too.
fn member_value(m: u16, exp: i32) -> f64 {
    let m = f64::from(m);
    if exp >= 0 {
        m * 10f64.powi(exp)
    } else {
        m / 10f64.powi(-exp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SnapMode {
    /// Smallest relative error; ties go to the lower member.
    #[default]
    Nearest,
    Up,
    Down,
}

impl FromStr for SnapMode {
    type Err = UnitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nearest" => Ok(SnapMode::Nearest),
            "up" => Ok(SnapMode::Up),
            "down" => Ok(SnapMode::Down),
            _ => Err(UnitError::UnknownMode(s.into())),
        }
    }
}

/// Snaps `x` to a member of `series` scaled by an integer power of ten.
pub fn snap_preferred(x: f64, series: ESeries, mode: SnapMode) -> Result<f64, UnitError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(UnitError::NotSnappable(x));
    }
    let decade = x.log10().floor() as i32;
    let len = series.table().0.len();
    // log10 can be off by one near decade edges; scanning the neighbours covers it.
    let candidates = (decade - 1..=decade + 1)
        .flat_map(|d| (0..len).map(move |i| series.member(i, d)))
        .chain(std::iter::once(series.member(0, decade + 2)));

    let mut below: Option<f64> = None;
    let mut above: Option<f64> = None;
    for c in candidates {
        if c <= x && below.is_none_or(|b| c > b) {
            below = Some(c);
        }
        if c >= x && above.is_none_or(|a| c < a) {
            above = Some(c);
        }
    }
    let (below, above) = match (below, above) {
        (Some(b), Some(a)) => (b, a),
        _ => unreachable!("candidate window always brackets x"),
    };
    Ok(match mode {
        SnapMode::Up => above,
        SnapMode::Down => below,
        SnapMode::Nearest => {
            if above - x < x - below {
                above
            } else {
                below
            }
        }
    })
}
