//! Piecewise-analytic reference timeline, written independently of the event
//! engine. Covers scenarios of a few events.

#![allow(dead_code)]

use touch_alarm::design::{compute_report, CircuitSpec, DesignReport};
use touch_alarm::sim::{EventKind, Retrigger, Scenario, ScenarioEvent, SimConfig};

pub fn ev(time: f64, kind: EventKind) -> ScenarioEvent {
    ScenarioEvent { time, kind }
}

pub fn scenario(events: &[(f64, EventKind)], duration: f64) -> Scenario {
    Scenario::new(
        events.iter().map(|&(t, k)| ev(t, k)).collect(),
        Some(duration),
    )
    .unwrap()
}

pub fn default_report() -> DesignReport {
    compute_report(&CircuitSpec::default()).unwrap()
}

/// Expected channel values at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expected {
    pub supply_on: bool,
    pub trigger_out: bool,
    pub sounding: bool,
    /// Sounding onset and position in the modulator cycle, when sounding.
    pub onset: f64,
    pub modulator_high: bool,
    pub carrier: f64,
    pub segment_start: f64,
}

pub struct Oracle {
    /// Closed trigger windows `[start, end]`.
    pub windows: Vec<(f64, f64)>,
    /// Supply-off intervals `(from, to]`.
    pub gaps: Vec<(f64, f64)>,
    pub t1: f64,
    pub period: f64,
    pub f_mod_high: f64,
    pub f_mod_low: f64,
}

impl Oracle {
    pub fn new(report: &DesignReport, scenario: &Scenario, cfg: &SimConfig) -> Self {
        let timeout = report.trigger_timeout;
        let d = cfg.switchover_delay;
        let events = scenario.events();

        let mut windows: Vec<(f64, f64)> = Vec::new();
        for (i, e) in events.iter().enumerate() {
            if e.kind != EventKind::TouchStart {
                continue;
            }
            if windows.last().is_some_and(|&(_, end)| e.time <= end) {
                continue;
            }
            let nominal = e.time + timeout;
            let end = match cfg.retrigger {
                Retrigger::OneShot => nominal,
                Retrigger::LevelSensitive => {
                    // Held when the latest touch event at or before the nominal end is a
                    // start that is released later; an unreleased touch is momentary.
                    let mut held_until = None;
                    let mut touching = false;
                    for f in &events[i..] {
                        match f.kind {
                            EventKind::TouchStart if f.time <= nominal => touching = true,
                            EventKind::TouchEnd if f.time < nominal => touching = false,
                            EventKind::TouchEnd if touching => {
                                held_until = Some(f.time);
                                break;
                            }
                            _ => {}
                        }
                    }
                    match (touching, held_until) {
                        (false, _) => nominal,
                        (true, Some(t)) => t,
                        (true, None) => nominal,
                    }
                }
            };
            windows.push((e.time, end));
        }

        let mut gaps = Vec::new();
        let mut fail_at = (!cfg.mains_present_initially).then_some(f64::NEG_INFINITY);
        for e in events {
            match e.kind {
                EventKind::MainsFail => {
                    if cfg.battery_present {
                        gaps.push((e.time, e.time + d));
                    } else {
                        fail_at = Some(e.time);
                    }
                }
                EventKind::MainsRestore => match fail_at.take() {
                    Some(from) if !cfg.battery_present => gaps.push((from, e.time + d)),
                    _ => gaps.push((e.time, e.time + d)),
                },
                _ => {}
            }
        }
        if let Some(from) = fail_at {
            if !cfg.battery_present {
                gaps.push((from, f64::INFINITY));
            }
        }
        gaps.retain(|&(a, b)| b > a);

        let (f_mod_high, f_mod_low) = match cfg.modulation_model {
            touch_alarm::sim::ModulationModel::Thevenin => (
                report.carrier_lo_tone.frequency,
                report.carrier_hi_tone.frequency,
            ),
            touch_alarm::sim::ModulationModel::IdealPair { f_lo, f_hi } => (f_lo, f_hi),
        };
        Oracle {
            windows,
            gaps,
            t1: report.low_stage.t1,
            period: report.low_stage.period,
            f_mod_high,
            f_mod_low,
        }
    }

    pub fn supply_on(&self, t: f64) -> bool {
        !self.gaps.iter().any(|&(a, b)| a < t && t <= b)
    }

    pub fn window(&self, t: f64) -> Option<(f64, f64)> {
        self.windows
            .iter()
            .copied()
            .find(|&(s, e)| s <= t && t <= e)
    }

    pub fn at(&self, t: f64) -> Expected {
        let supply_on = self.supply_on(t);
        let window = self.window(t);
        let sounding = supply_on && window.is_some();
        let mut out = Expected {
            supply_on,
            trigger_out: window.is_some(),
            sounding,
            onset: 0.0,
            modulator_high: false,
            carrier: 0.0,
            segment_start: 0.0,
        };
        if let (true, Some((s, _))) = (sounding, window) {
            let onset = self
                .gaps
                .iter()
                .map(|&(_, b)| b)
                .filter(|&b| b >= s && b < t)
                .fold(s, f64::max);
            let dt = t - onset;
            let k = (dt / self.period).floor();
            let r = dt - k * self.period;
            out.onset = onset;
            out.modulator_high = r < self.t1;
            out.carrier = if out.modulator_high {
                self.f_mod_high
            } else {
                self.f_mod_low
            };
            out.segment_start =
                onset + k * self.period + if out.modulator_high { 0.0 } else { self.t1 };
        }
        out
    }

    /// True when `t` lies within `eps` of a modulator edge, where float
    /// rounding may legitimately put a sample on either side.
    pub fn near_modulator_edge(&self, t: f64, eps: f64) -> bool {
        let e = self.at(t);
        if !e.sounding {
            return false;
        }
        let dt = t - e.onset;
        let r = dt - (dt / self.period).floor() * self.period;
        r < eps || (r - self.t1).abs() < eps || self.period - r < eps
    }
}

/// Square-wave level at `t` for a tone phase-locked to `start`, or `None`
/// when `t` sits within `eps` cycles of an edge.
pub fn square_level(t: f64, start: f64, f: f64, amplitude: f64, eps: f64) -> Option<f64> {
    let phase = ((t - start) * f).rem_euclid(1.0);
    if phase < eps || (phase - 0.5).abs() < eps || 1.0 - phase < eps {
        return None;
    }
    Some(if phase < 0.5 { amplitude } else { -amplitude })
}
