use thiserror::Error;

use super::circuit::CircuitSpec;
use super::equations::*;
use crate::units::Unit;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{stage}: {quantity}: {source}")]
pub struct DesignError {
    pub stage: &'static str,
    pub quantity: &'static str,
    pub source: EquationError,
}

fn at(stage: &'static str, quantity: &'static str) -> impl FnOnce(EquationError) -> DesignError {
    move |source| DesignError {
        stage,
        quantity,
        source,
    }
}

/// One computed quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub name: &'static str,
    pub ideal: f64,
    pub snapped: Option<f64>,
    pub unit: Unit,
    /// Which equation produced the value.
    pub formula: &'static str,
}

impl Record {
    /// Key under which the snapped value is reported.
    pub fn snapped_name(&self) -> String {
        match self.name.strip_suffix("_ideal") {
            Some(base) => format!("{base}_snapped"),
            None => format!("{}_snapped", self.name),
        }
    }
}

/// Every derived design quantity for one [`CircuitSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub led1: LedResistor,
    pub led2: LedResistor,
    pub piv: PeakInverseVoltage,
    pub filter: FilterCapacitor,
    pub trigger_timeout: f64,
    pub trigger_timeout_exact: f64,
    pub trigger_frequency: f64,
    pub trigger_threshold: f64,
    pub relay_driver: BaseResistor,
    pub high_stage: AstableTimes,
    pub low_stage: AstableTimes,
    pub amplifier: AmplifierPower,
    /// Output transistor gain the amplifier figures were computed with.
    pub amp_gain: f64,
    pub modulation: ModulationVoltages,
    /// Carrier while the modulator output is high (raised control voltage).
    pub carrier_lo_tone: AstableTimes,
    /// Carrier while the modulator output is low.
    pub carrier_hi_tone: AstableTimes,
    /// Peak speaker voltage `√(P·Z)`.
    pub speaker_amplitude: f64,
}

pub fn compute_report(spec: &CircuitSpec) -> Result<DesignReport, DesignError> {
    const POWER: &str = "power stage";
    const TRIGGER: &str = "trigger stage";
    const ALARM: &str = "alarm stage";

    let led1 = led_resistor(spec.transformer_secondary, spec.v_led, spec.i_led_max)
        .map_err(at(POWER, "r1"))?;
    let led2 = led_resistor(spec.vcc, spec.v_led, spec.i_led_run).map_err(at(POWER, "r2"))?;
    let piv = peak_inverse_voltage(spec.transformer_secondary, spec.diode_piv_rating)
        .map_err(at(POWER, "piv"))?;
    let filter = filter_capacitor(
        spec.ripple_frequency,
        spec.ripple_factor,
        spec.regulator_voltage,
        spec.regulator_current,
    )
    .map_err(at(POWER, "c1"))?;

    let trigger_timeout = monostable_period(spec.r3, spec.c2, MonostableModel::Approx)
        .map_err(at(TRIGGER, "trigger_timeout"))?;
    if trigger_timeout <= 0.0 {
        return Err(DesignError {
            stage: TRIGGER,
            quantity: "trigger_timeout",
            source: EquationError::OutOfRange {
                param: "c2",
                value: spec.c2,
                requirement: "c2 > 0 for a non-zero timeout",
            },
        });
    }
    let trigger_timeout_exact = monostable_period(spec.r3, spec.c2, MonostableModel::Exact)
        .map_err(at(TRIGGER, "trigger_timeout_exact"))?;
    let trigger_threshold =
        trigger_threshold(spec.vcc).map_err(at(TRIGGER, "trigger_threshold"))?;
    let relay_driver = base_resistor(
        spec.vcc,
        spec.v_be,
        spec.relay_coil_resistance,
        spec.tr1_hfe,
        spec.tr1_saturation_factor,
    )
    .map_err(at(TRIGGER, "r5"))?;

    let high_stage = astable_times(spec.r7, spec.r8, spec.c4).map_err(at(ALARM, "high_stage"))?;
    let low_stage = astable_times(spec.r11, spec.r12, spec.c6).map_err(at(ALARM, "low_stage"))?;
    let modulation = modulation_voltages(spec.vcc, spec.r9).map_err(at(ALARM, "modulation"))?;
    let carrier_lo_tone =
        astable_times_cv(spec.r7, spec.r8, spec.c4, spec.vcc, modulation.v_ctl_high)
            .map_err(at(ALARM, "carrier_lo_tone"))?;
    let carrier_hi_tone =
        astable_times_cv(spec.r7, spec.r8, spec.c4, spec.vcc, modulation.v_ctl_low)
            .map_err(at(ALARM, "carrier_hi_tone"))?;
    let amplifier = amplifier_power(spec.vcc, spec.v_be, spec.tr2_base_resistance, spec.tr2_hfe)
        .map_err(at(ALARM, "amplifier"))?;

    Ok(DesignReport {
        led1,
        led2,
        piv,
        filter,
        trigger_timeout,
        trigger_timeout_exact,
        trigger_frequency: 1.0 / trigger_timeout,
        trigger_threshold,
        relay_driver,
        high_stage,
        low_stage,
        amplifier,
        amp_gain: spec.tr2_hfe,
        modulation,
        carrier_lo_tone,
        carrier_hi_tone,
        speaker_amplitude: (amplifier.p_out * spec.speaker_impedance).sqrt(),
    })
}

impl DesignReport {
    /// All quantities in their fixed reporting order.
    pub fn records(&self) -> Vec<Record> {
        use Unit::*;
        let rec = |name, ideal, unit, formula| Record {
            name,
            ideal,
            snapped: None,
            unit,
            formula,
        };
        let snap = |name, ideal, snapped, unit, formula| Record {
            name,
            ideal,
            snapped: Some(snapped),
            unit,
            formula,
        };
        let h = &self.high_stage;
        let l = &self.low_stage;
        vec![
            snap(
                "r1_ideal",
                self.led1.r_ideal,
                self.led1.r_snapped,
                Ohm,
                "(Vs-Vled)/Iled",
            ),
            rec("led1_current", self.led1.i_actual, Ampere, "(Vs-Vled)/R1"),
            snap(
                "r2_ideal",
                self.led2.r_ideal,
                self.led2.r_snapped,
                Ohm,
                "(Vcc-Vled)/Iled",
            ),
            rec("led2_current", self.led2.i_actual, Ampere, "(Vcc-Vled)/R2"),
            rec("piv", self.piv.piv, Volt, "2*Vs"),
            rec("filter_r_load", self.filter.r_load, Ohm, "V/I"),
            snap(
                "filter_c_ideal",
                self.filter.c_ideal,
                self.filter.c_snapped,
                Farad,
                "1/(4*sqrt3*f*y*R)",
            ),
            rec("trigger_timeout", self.trigger_timeout, Second, "1.1*R3*C2"),
            rec(
                "trigger_timeout_exact",
                self.trigger_timeout_exact,
                Second,
                "ln3*R3*C2",
            ),
            rec("trigger_frequency", self.trigger_frequency, Hertz, "1/T"),
            rec("trigger_threshold", self.trigger_threshold, Volt, "Vcc/3"),
            rec("relay_i_c", self.relay_driver.i_c, Ampere, "Vcc/Rcoil"),
            rec("relay_i_b", self.relay_driver.i_b, Ampere, "k*Ic/hFE"),
            snap(
                "r5_ideal",
                self.relay_driver.r_ideal,
                self.relay_driver.r_snapped,
                Ohm,
                "(Vcc-Vbe)/Ib",
            ),
            rec("high_t1", h.t1, Second, "0.693*(R7+R8)*C4"),
            rec("high_t2", h.t2, Second, "0.693*R8*C4"),
            rec("high_period", h.period, Second, "t1+t2"),
            rec("high_frequency", h.frequency, Hertz, "1/T"),
            rec("high_duty", h.duty, Dimensionless, "t1/T"),
            rec("low_t1", l.t1, Second, "0.693*(R11+R12)*C6"),
            rec("low_t2", l.t2, Second, "0.693*R12*C6"),
            rec("low_period", l.period, Second, "t1+t2"),
            rec("low_frequency", l.frequency, Hertz, "1/T"),
            rec("low_duty", l.duty, Dimensionless, "t1/T"),
            rec("amp_gain", self.amp_gain, Dimensionless, "hFE"),
            rec("amp_i_b", self.amplifier.i_b, Ampere, "(Vcc-Vbe)/Rb"),
            rec("amp_i_e", self.amplifier.i_e, Ampere, "(1+hFE)*Ib"),
            rec("amp_p_out", self.amplifier.p_out, Watt, "Ie*Vcc"),
            rec(
                "speaker_amplitude",
                self.speaker_amplitude,
                Volt,
                "sqrt(P*Z)",
            ),
            rec(
                "v_ctl_low",
                self.modulation.v_ctl_low,
                Volt,
                "pin5 nodal, mod low",
            ),
            rec(
                "v_ctl_high",
                self.modulation.v_ctl_high,
                Volt,
                "pin5 nodal, mod high",
            ),
            rec(
                "f_lo_tone",
                self.carrier_lo_tone.frequency,
                Hertz,
                "cv astable @ v_ctl_high",
            ),
            rec(
                "f_hi_tone",
                self.carrier_hi_tone.frequency,
                Hertz,
                "cv astable @ v_ctl_low",
            ),
        ]
    }

    pub fn record(&self, name: &str) -> Option<Record> {
        self.records().into_iter().find(|r| r.name == name)
    }
}
