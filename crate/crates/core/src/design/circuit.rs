//! Component roster and electrical assumptions of the alarm circuit.

use thiserror::Error;

use crate::units::{parse_quantity, Unit, UnitError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: {key}: {source}")]
    Value {
        line: usize,
        key: String,
        source: UnitError,
    },
    #[error("invalid circuit: {0}")]
    Invalid(String),
}

macro_rules! circuit_spec {
    ($( $(#[$doc:meta])* $field:ident : $unit:ident = $default:expr ),* $(,)?) => {
        /// Every component value plus the electrical assumptions the
        /// design equations need. Field names double as circuit-file keys.
        #[derive(Debug, Clone, PartialEq)]
        pub struct CircuitSpec {
            $( $(#[$doc])* pub $field: f64, )*
        }

        impl Default for CircuitSpec {
            fn default() -> Self {
                CircuitSpec { $( $field: $default, )* }
            }
        }

        impl CircuitSpec {
            /// `(key, unit)` for every field, in declaration order.
            pub const FIELDS: &'static [(&'static str, Unit)] = &[
                $( (stringify!($field), Unit::$unit), )*
            ];

            fn field_mut(&mut self, key: &str) -> Option<&mut f64> {
                match key {
                    $( stringify!($field) => Some(&mut self.$field), )*
                    _ => None,
                }
            }

            pub fn field(&self, key: &str) -> Option<f64> {
                match key {
                    $( stringify!($field) => Some(self.$field), )*
                    _ => None,
                }
            }
        }
    };
}

circuit_spec! {
    mains_voltage: Volt = 240.0,
    transformer_secondary: Volt = 18.0,
    fuse_rating: Ampere = 1.0,
    /// Regulator output voltage, the `V` of the load-resistance estimate.
    regulator_voltage: Volt = 12.0,
    regulator_current: Ampere = 0.5,
    ripple_frequency: Hertz = 50.0,
    ripple_factor: Dimensionless = 0.05,
    diode_piv_rating: Volt = 50.0,
    /// LED1 current limiter.
    r1: Ohm = 470.0,
    /// LED2 current limiter.
    r2: Ohm = 980.0,
    /// Trigger monostable timing resistor.
    r3: Ohm = 220e3,
    /// Sensor sensitivity. Stored and displayed only.
    r4: Ohm = 10.8e6,
    /// Relay driver base resistor.
    r5: Ohm = 4.7e3,
    r6: Ohm = 1e3,
    /// Carrier oscillator Ra.
    r7: Ohm = 100e3,
    /// Carrier oscillator Rb.
    r8: Ohm = 100e3,
    /// Modulator to carrier control-pin coupling.
    r9: Ohm = 300e3,
    r10: Ohm = 2.2e3,
    /// Modulator oscillator Ra.
    r11: Ohm = 1e3,
    /// Modulator oscillator Rb.
    r12: Ohm = 22e3,
    c1: Farad = 2200e-6,
    /// Trigger monostable timing capacitor.
    c2: Farad = 47e-6,
    c3: Farad = 0.01e-6,
    /// Carrier oscillator timing capacitor.
    c4: Farad = 0.01e-6,
    c5: Farad = 47e-6,
    /// Modulator oscillator timing capacitor.
    c6: Farad = 47e-6,
    vcc: Volt = 12.0,
    v_led: Volt = 2.2,
    i_led_max: Ampere = 0.035,
    i_led_run: Ampere = 0.01,
    v_be: Volt = 0.6,
    tr1_hfe: Dimensionless = 25.0,
    tr1_saturation_factor: Dimensionless = 2.0,
    /// Output transistor gain; 10 is the value the 0.418 A / 5.016 W figures imply.
    tr2_hfe: Dimensionless = 10.0,
    /// Output transistor base resistor.
    tr2_base_resistance: Ohm = 300.0,
    relay_coil_resistance: Ohm = 400.0,
    speaker_impedance: Ohm = 8.0,
    speaker_power_rating: Watt = 5.0,
}

impl CircuitSpec {
    /// Parses a circuit file: `key = value` lines, `#` comments, omitted keys
    /// keep their defaults.
    pub fn from_config_str(text: &str) -> Result<Self, CircuitError> {
        let mut spec = CircuitSpec::default();
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(CircuitError::Syntax { line })?;
            let key = key.trim();
            let unit = Self::FIELDS
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, u)| *u)
                .ok_or_else(|| CircuitError::UnknownKey {
                    line,
                    key: key.into(),
                })?;
            if !seen.insert(key.to_string()) {
                return Err(CircuitError::DuplicateKey {
                    line,
                    key: key.into(),
                });
            }
            let q = parse_quantity(value, unit).map_err(|source| CircuitError::Value {
                line,
                key: key.into(),
                source,
            })?;
            *spec.field_mut(key).expect("key checked above") = q.magnitude();
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let bad = |msg: String| Err(CircuitError::Invalid(msg));
        for (key, unit) in Self::FIELDS {
            let v = self.field(key).unwrap_or(f64::NAN);
            if !v.is_finite() {
                return bad(format!("{key} is not finite"));
            }
            match unit {
                // Timing capacitors may be zero; the equations report that per stage.
                Unit::Ohm if v <= 0.0 => return bad(format!("{key} must be > 0")),
                Unit::Farad if v < 0.0 => return bad(format!("{key} must be >= 0")),
                Unit::Volt | Unit::Ampere | Unit::Hertz | Unit::Watt if v < 0.0 => {
                    return bad(format!("{key} must be >= 0"))
                }
                _ => {}
            }
        }
        if self.vcc <= self.v_be {
            return bad("vcc must exceed v_be".into());
        }
        if self.transformer_secondary < self.regulator_voltage {
            return bad("transformer_secondary must be >= regulator_voltage".into());
        }
        if !(self.ripple_factor > 0.0 && self.ripple_factor < 1.0) {
            return bad("ripple_factor must lie in (0, 1)".into());
        }
        for (key, gain) in [("tr1_hfe", self.tr1_hfe), ("tr2_hfe", self.tr2_hfe)] {
            if gain < 1.0 {
                return bad(format!("{key} must be >= 1"));
            }
        }
        if self.tr1_saturation_factor < 1.0 {
            return bad("tr1_saturation_factor must be >= 1".into());
        }
        Ok(())
    }
}
