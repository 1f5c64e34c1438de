//! Closed-form sizing and timing equations for the alarm's stages.

use thiserror::Error;

use crate::units::{snap_preferred, ESeries, SnapMode};

/// Monostable pulse-width coefficient (`T = 1.1·R·C`).
pub const MONOSTABLE_K: f64 = 1.1;
/// Astable charge/discharge coefficient (`t = 0.693·R·C`), the rounded ln 2.
pub const ASTABLE_K: f64 = 0.693;
/// Largest base resistor the relay driver calculation will return.
pub const MAX_BASE_RESISTOR: f64 = 10e6;
/// Thevenin resistance of the 555 internal 5k/5k/5k ladder seen from pin 5.
pub const CONTROL_PIN_RTH: f64 = 10e3 / 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquationError {
    #[error("{param} = {value} is not finite")]
    NonFinite { param: &'static str, value: f64 },
    #[error("{param} = {value} violates {requirement}")]
    OutOfRange {
        param: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

fn finite(param: &'static str, value: f64) -> Result<f64, EquationError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EquationError::NonFinite { param, value })
    }
}

fn require(
    ok: bool,
    param: &'static str,
    value: f64,
    requirement: &'static str,
) -> Result<(), EquationError> {
    if ok {
        Ok(())
    } else {
        Err(EquationError::OutOfRange {
            param,
            value,
            requirement,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonostableModel {
    /// `1.1·R·C`, as used on datasheets.
    #[default]
    Approx,
    /// `ln 3·R·C`, the exact charge time to 2/3 Vcc.
    Exact,
}

pub fn monostable_period(r: f64, c: f64, model: MonostableModel) -> Result<f64, EquationError> {
    finite("r", r)?;
    finite("c", c)?;
    require(r > 0.0, "r", r, "r > 0")?;
    require(c >= 0.0, "c", c, "c >= 0")?;
    let k = match model {
        MonostableModel::Approx => MONOSTABLE_K,
        MonostableModel::Exact => 3f64.ln(),
    };
    Ok(k * r * c)
}

/// Output timing of a 555 astable stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AstableTimes {
    /// High (charge through Ra + Rb) time.
    pub t1: f64,
    /// Low (discharge through Rb) time.
    pub t2: f64,
    pub period: f64,
    pub frequency: f64,
    /// `t1 / period`.
    pub duty: f64,
}

impl AstableTimes {
    fn from_phases(t1: f64, t2: f64) -> Self {
        let period = t1 + t2;
        AstableTimes {
            t1,
            t2,
            period,
            frequency: 1.0 / period,
            duty: t1 / period,
        }
    }
}

fn check_astable(ra: f64, rb: f64, c: f64) -> Result<(), EquationError> {
    finite("ra", ra)?;
    finite("rb", rb)?;
    finite("c", c)?;
    require(ra >= 0.0, "ra", ra, "ra >= 0")?;
    require(rb > 0.0, "rb", rb, "rb > 0")?;
    require(c > 0.0, "c", c, "c > 0")
}

pub fn astable_times(ra: f64, rb: f64, c: f64) -> Result<AstableTimes, EquationError> {
    check_astable(ra, rb, c)?;
    Ok(AstableTimes::from_phases(
        ASTABLE_K * (ra + rb) * c,
        ASTABLE_K * rb * c,
    ))
}

/// Astable timing with the control pin held at `v_ctl` instead of 2/3 Vcc.
///
/// The upper threshold becomes `v_ctl` and the lower `v_ctl / 2`, so the
/// charge phase spans `ln((vcc - v_ctl/2) / (vcc - v_ctl))` time constants
/// and the discharge phase `ln 2`. Both logarithms are scaled by
/// `ASTABLE_K / ln 2` so that `v_ctl = 2/3·vcc` reproduces [`astable_times`].
pub fn astable_times_cv(
    ra: f64,
    rb: f64,
    c: f64,
    vcc: f64,
    v_ctl: f64,
) -> Result<AstableTimes, EquationError> {
    check_astable(ra, rb, c)?;
    finite("vcc", vcc)?;
    finite("v_ctl", v_ctl)?;
    require(
        v_ctl > 0.0 && v_ctl < vcc,
        "v_ctl",
        v_ctl,
        "0 < v_ctl < vcc",
    )?;
    let scale = ASTABLE_K / std::f64::consts::LN_2;
    let charge = ((vcc - v_ctl / 2.0) / (vcc - v_ctl)).ln();
    Ok(AstableTimes::from_phases(
        scale * charge * (ra + rb) * c,
        ASTABLE_K * rb * c,
    ))
}

/// Control-pin voltages of the carrier oscillator with the modulator output low and high.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationVoltages {
    pub v_ctl_low: f64,
    pub v_ctl_high: f64,
}

/// Control-pin voltage when pin 5 (Thevenin `2/3·vcc` behind [`CONTROL_PIN_RTH`])
/// is pulled through `r_couple` toward `v_mod`.
pub fn control_voltage(vcc: f64, r_couple: f64, v_mod: f64) -> f64 {
    let g_th = 1.0 / CONTROL_PIN_RTH;
    let g_c = 1.0 / r_couple;
    ((2.0 / 3.0) * vcc * g_th + v_mod * g_c) / (g_th + g_c)
}

pub fn modulation_voltages(vcc: f64, r9: f64) -> Result<ModulationVoltages, EquationError> {
    finite("vcc", vcc)?;
    finite("r9", r9)?;
    require(vcc > 0.0, "vcc", vcc, "vcc > 0")?;
    require(r9 > 0.0, "r9", r9, "r9 > 0")?;
    Ok(ModulationVoltages {
        v_ctl_low: control_voltage(vcc, r9, 0.0),
        v_ctl_high: control_voltage(vcc, r9, vcc),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedResistor {
    pub r_ideal: f64,
    pub r_snapped: f64,
    /// Current through the LED with the snapped resistor fitted.
    pub i_actual: f64,
}

pub fn led_resistor(vcc: f64, v_led: f64, i_led: f64) -> Result<LedResistor, EquationError> {
    finite("vcc", vcc)?;
    finite("v_led", v_led)?;
    finite("i_led", i_led)?;
    require(vcc > v_led, "vcc", vcc, "vcc > v_led")?;
    require(i_led > 0.0, "i_led", i_led, "i_led > 0")?;
    let drop = vcc - v_led;
    let r_ideal = drop / i_led;
    let r_snapped = snap_preferred(r_ideal, ESeries::E12, SnapMode::Nearest)
        .expect("positive finite resistance");
    Ok(LedResistor {
        r_ideal,
        r_snapped,
        i_actual: drop / r_snapped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterCapacitor {
    pub r_load: f64,
    pub c_ideal: f64,
    pub c_snapped: f64,
}

/// Reservoir capacitor for a full-wave rectifier: `C = 1 / (4·√3·f·y·R)`.
pub fn filter_capacitor(
    f: f64,
    y: f64,
    v_reg: f64,
    i_reg: f64,
) -> Result<FilterCapacitor, EquationError> {
    finite("f", f)?;
    finite("y", y)?;
    finite("v_reg", v_reg)?;
    finite("i_reg", i_reg)?;
    require(f > 0.0, "f", f, "f > 0")?;
    require(y > 0.0 && y < 1.0, "y", y, "0 < y < 1")?;
    require(v_reg > 0.0, "v_reg", v_reg, "v_reg > 0")?;
    require(i_reg > 0.0, "i_reg", i_reg, "i_reg > 0")?;
    let r_load = v_reg / i_reg;
    let c_ideal = 1.0 / (4.0 * 3f64.sqrt() * f * y * r_load);
    let c_snapped = snap_preferred(c_ideal, ESeries::E6, SnapMode::Nearest)
        .expect("positive finite capacitance");
    Ok(FilterCapacitor {
        r_load,
        c_ideal,
        c_snapped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakInverseVoltage {
    pub piv: f64,
    pub within_rating: bool,
}

pub fn peak_inverse_voltage(
    v_secondary: f64,
    diode_rating: f64,
) -> Result<PeakInverseVoltage, EquationError> {
    finite("v_secondary", v_secondary)?;
    finite("diode_rating", diode_rating)?;
    require(
        v_secondary >= 0.0,
        "v_secondary",
        v_secondary,
        "v_secondary >= 0",
    )?;
    let piv = 2.0 * v_secondary;
    Ok(PeakInverseVoltage {
        piv,
        within_rating: piv < diode_rating,
    })
}

/// Saturated-switch base resistor for the relay driver transistor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseResistor {
    pub i_c: f64,
    pub i_b: f64,
    pub r_ideal: f64,
    pub r_snapped: f64,
}

pub fn base_resistor(
    vcc: f64,
    v_be: f64,
    coil_r: f64,
    hfe: f64,
    sat_factor: f64,
) -> Result<BaseResistor, EquationError> {
    for (p, v) in [
        ("vcc", vcc),
        ("v_be", v_be),
        ("coil_r", coil_r),
        ("hfe", hfe),
        ("sat_factor", sat_factor),
    ] {
        finite(p, v)?;
    }
    require(vcc > v_be, "vcc", vcc, "vcc > v_be")?;
    require(coil_r > 0.0, "coil_r", coil_r, "coil_r > 0")?;
    require(hfe >= 1.0, "hfe", hfe, "hfe >= 1")?;
    require(
        sat_factor >= 1.0,
        "sat_factor",
        sat_factor,
        "sat_factor >= 1",
    )?;
    let i_c = vcc / coil_r;
    let i_b = sat_factor * i_c / hfe;
    let r_ideal = (vcc - v_be) / i_b;
    require(
        r_ideal.is_finite() && r_ideal <= MAX_BASE_RESISTOR,
        "r_base",
        r_ideal,
        "base resistor <= 10 MΩ",
    )?;
    let r_snapped = snap_preferred(r_ideal, ESeries::E12, SnapMode::Nearest)
        .expect("positive finite resistance");
    Ok(BaseResistor {
        i_c,
        i_b,
        r_ideal,
        r_snapped,
    })
}

/// Emitter-follower output stage driving the speaker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierPower {
    pub i_b: f64,
    pub i_e: f64,
    pub p_out: f64,
}

pub fn amplifier_power(
    vcc: f64,
    v_be: f64,
    r_base: f64,
    hfe: f64,
) -> Result<AmplifierPower, EquationError> {
    finite("vcc", vcc)?;
    finite("v_be", v_be)?;
    finite("r_base", r_base)?;
    finite("hfe", hfe)?;
    require(vcc >= v_be, "vcc", vcc, "vcc >= v_be")?;
    require(r_base > 0.0, "r_base", r_base, "r_base > 0")?;
    require(hfe >= 1.0, "hfe", hfe, "hfe >= 1")?;
    let i_b = (vcc - v_be) / r_base;
    let i_e = (1.0 + hfe) * i_b;
    Ok(AmplifierPower {
        i_b,
        i_e,
        p_out: i_e * vcc,
    })
}

/// Trigger input level below which the monostable fires.
pub fn trigger_threshold(vcc: f64) -> Result<f64, EquationError> {
    finite("vcc", vcc)?;
    require(vcc >= 0.0, "vcc", vcc, "vcc >= 0")?;
    Ok(vcc / 3.0)
}
