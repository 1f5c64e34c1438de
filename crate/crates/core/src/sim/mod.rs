//! Deterministic behavioral simulation of the complete alarm and Monte Carlo
//! spread of its timeout.

pub mod engine;
mod model;
mod scenario;
mod tolerance;

use thiserror::Error;

use crate::design::{compute_report, CircuitSpec, DesignError, DesignReport};

pub use model::{
    build_timeline, Breakpoint, LogEntry, Retrigger, SystemParams, SystemState, Timeline,
};
pub use scenario::{
    parse_scenario, EventKind, Scenario, ScenarioError, ScenarioEvent, DEFAULT_TAIL,
};
pub use tolerance::{monte_carlo_timeout, ToleranceError, ToleranceResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("sample rate {sample_rate} Hz must exceed twice the {carrier} Hz carrier")]
    Nyquist { sample_rate: f64, carrier: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ModulationModel {
    /// Carrier tones from the control-pin network.
    #[default]
    Thevenin,
    /// Imposed tones: `f_lo` while the modulator is high, `f_hi` while low.
    IdealPair { f_lo: f64, f_hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub sample_rate: f64,
    /// Relay changeover time during which the load is unpowered.
    pub switchover_delay: f64,
    pub battery_present: bool,
    pub mains_present_initially: bool,
    pub modulation_model: ModulationModel,
    pub retrigger: Retrigger,
    /// Carried for reproducible stochastic extensions; the run itself draws nothing.
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            sample_rate: 16_000.0,
            switchover_delay: 0.010,
            battery_present: true,
            mains_present_initially: true,
            modulation_model: ModulationModel::Thevenin,
            retrigger: Retrigger::LevelSensitive,
            rng_seed: 0,
        }
    }
}

/// Uniformly sampled node waveforms plus the exact event history.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub sample_rate: f64,
    pub supply_on: Vec<bool>,
    pub trigger_out: Vec<bool>,
    pub modulator_high: Vec<bool>,
    pub carrier_freq: Vec<f64>,
    pub speaker: Vec<f64>,
    /// Peak speaker voltage while sounding.
    pub amplitude: f64,
    pub log: Vec<LogEntry>,
    pub windows: Vec<(f64, f64)>,
    /// Total sounding time measured on the exact timeline.
    pub sounding_seconds: f64,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.speaker.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speaker.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 / self.sample_rate
    }

    pub fn alarm_windows(&self) -> usize {
        self.windows.len()
    }
}

/// Square wave of frequency `f` phase-locked to `segment_start`.
pub fn square_sample(t: f64, segment_start: f64, f: f64, amplitude: f64) -> f64 {
    let phase = ((t - segment_start) * f).fract();
    if phase < 0.5 {
        amplitude
    } else {
        -amplitude
    }
}

/// Reduces the circuit and configuration to event-model parameters.
pub fn system_params(report: &DesignReport, config: &SimConfig) -> Result<SystemParams, SimError> {
    if !(config.sample_rate.is_finite() && config.sample_rate > 0.0) {
        return Err(SimError::Config(format!(
            "sample_rate {} must be positive",
            config.sample_rate
        )));
    }
    if !(config.switchover_delay.is_finite() && config.switchover_delay >= 0.0) {
        return Err(SimError::Config(format!(
            "switchover_delay {} must be >= 0",
            config.switchover_delay
        )));
    }
    let (tone_mod_high, tone_mod_low) = match config.modulation_model {
        ModulationModel::Thevenin => (
            report.carrier_lo_tone.frequency,
            report.carrier_hi_tone.frequency,
        ),
        ModulationModel::IdealPair { f_lo, f_hi } => {
            if !(f_lo.is_finite() && f_hi.is_finite() && f_lo > 0.0 && f_hi > 0.0) {
                return Err(SimError::Config(format!(
                    "ideal pair tones {f_lo}, {f_hi} must be positive"
                )));
            }
            (f_lo, f_hi)
        }
    };
    let carrier = tone_mod_high.max(tone_mod_low);
    if config.sample_rate <= 2.0 * carrier {
        return Err(SimError::Nyquist {
            sample_rate: config.sample_rate,
            carrier,
        });
    }
    Ok(SystemParams {
        timeout: report.trigger_timeout,
        modulator: report.low_stage,
        tone_mod_high,
        tone_mod_low,
        switchover_delay: config.switchover_delay,
        battery_present: config.battery_present,
        mains_initially: config.mains_present_initially,
        retrigger: config.retrigger,
    })
}

/// Simulates `scenario` on the circuit and samples every channel.
pub fn run(spec: &CircuitSpec, scenario: &Scenario, config: &SimConfig) -> Result<Trace, SimError> {
    let report = compute_report(spec)?;
    let params = system_params(&report, config)?;
    let scenario = Scenario::with_initial_mains(
        scenario.events().to_vec(),
        Some(scenario.duration()),
        config.mains_present_initially,
    )?;
    let timeline = build_timeline(params, &scenario);
    Ok(sample(
        &timeline,
        config.sample_rate,
        report.speaker_amplitude,
    ))
}

/// Samples a timeline on the grid `t_i = i / sample_rate`, `i < round(duration · rate)`.
pub fn sample(timeline: &Timeline, sample_rate: f64, amplitude: f64) -> Trace {
    let n = (timeline.duration * sample_rate).round() as usize;
    let mut trace = Trace {
        sample_rate,
        supply_on: Vec::with_capacity(n),
        trigger_out: Vec::with_capacity(n),
        modulator_high: Vec::with_capacity(n),
        carrier_freq: Vec::with_capacity(n),
        speaker: Vec::with_capacity(n),
        amplitude,
        log: timeline.log.clone(),
        windows: timeline.windows.clone(),
        sounding_seconds: timeline.sounding_seconds(),
    };
    let bps = &timeline.breakpoints;
    let mut next = 0;
    let mut state = timeline.initial;
    for i in 0..n {
        let t = i as f64 / sample_rate;
        while next < bps.len() && bps[next].at.visible_at(t) {
            state = bps[next].state;
            next += 1;
        }
        trace.supply_on.push(state.supply_on);
        trace.trigger_out.push(state.trigger_out);
        trace.modulator_high.push(state.modulator_high);
        trace.carrier_freq.push(state.carrier_freq);
        trace.speaker.push(if state.sounding() {
            square_sample(t, state.segment_start, state.carrier_freq, amplitude)
        } else {
            0.0
        });
    }
    trace
}

#[cfg(test)]
mod tests {
    use super::*;

    fn touch_at(t: f64) -> Scenario {
        Scenario::new(
            vec![ScenarioEvent {
                time: t,
                kind: EventKind::TouchStart,
            }],
            None,
        )
        .unwrap()
    }

    #[test]
    fn empty_scenario_is_silent() {
        let trace = run(
            &CircuitSpec::default(),
            &Scenario::empty(2.0),
            &SimConfig::default(),
        )
        .unwrap();
        assert_eq!(trace.len(), 32_000);
        assert!(trace.speaker.iter().all(|&s| s == 0.0));
        assert!(trace.trigger_out.iter().all(|&b| !b));
        assert!(trace.supply_on.iter().all(|&b| b));
        assert_eq!(trace.sounding_seconds, 0.0);
    }

    #[test]
    fn rejects_undersampled_carrier() {
        let cfg = SimConfig {
            sample_rate: 900.0,
            ..SimConfig::default()
        };
        let err = run(&CircuitSpec::default(), &touch_at(1.0), &cfg).unwrap_err();
        assert!(matches!(err, SimError::Nyquist { .. }));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SimConfig {
            switchover_delay: -1.0,
            ..SimConfig::default()
        };
        assert!(matches!(
            run(&CircuitSpec::default(), &touch_at(1.0), &cfg),
            Err(SimError::Config(_))
        ));
        let cfg = SimConfig {
            modulation_model: ModulationModel::IdealPair {
                f_lo: 0.0,
                f_hi: 800.0,
            },
            ..SimConfig::default()
        };
        assert!(run(&CircuitSpec::default(), &touch_at(1.0), &cfg).is_err());
    }

    #[test]
    fn mains_absent_at_start_needs_restore_first() {
        let s = Scenario::new(
            vec![ScenarioEvent {
                time: 1.0,
                kind: EventKind::MainsFail,
            }],
            None,
        )
        .unwrap();
        let cfg = SimConfig {
            mains_present_initially: false,
            ..SimConfig::default()
        };
        assert!(matches!(
            run(&CircuitSpec::default(), &s, &cfg),
            Err(SimError::Scenario(_))
        ));
    }

    #[test]
    fn ideal_pair_tones() {
        let cfg = SimConfig {
            modulation_model: ModulationModel::IdealPair {
                f_lo: 600.0,
                f_hi: 900.0,
            },
            ..SimConfig::default()
        };
        let trace = run(&CircuitSpec::default(), &touch_at(0.0), &cfg).unwrap();
        assert!(trace
            .carrier_freq
            .iter()
            .all(|&f| f == 0.0 || f == 600.0 || f == 900.0));
        assert_eq!(trace.carrier_freq[0], 600.0);
        assert!(trace.carrier_freq.contains(&900.0));
    }

    #[test]
    fn square_wave_phase() {
        assert_eq!(square_sample(1.0, 1.0, 500.0, 2.0), 2.0);
        assert_eq!(square_sample(1.0015, 1.0, 500.0, 2.0), -2.0);
    }
}
