//! Event-level behavior of the alarm: relay changeover, trigger window, and
//! the siren modulator. Produces an exact piecewise-constant timeline that
//! [`super::run`] samples onto a uniform grid.

use super::engine::{EventQueue, Instant};
use super::scenario::{EventKind, Scenario};
use crate::design::AstableTimes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Retrigger {
    /// The output holds while the touch is held past the timeout. A final
    /// touch with no release in the scenario counts as momentary.
    #[default]
    LevelSensitive,
    /// Exactly one timeout per trigger; touches during a window are ignored.
    OneShot,
}

/// Everything the event model needs, already reduced to times and tones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub timeout: f64,
    pub modulator: AstableTimes,
    /// Carrier frequency while the modulator output is high.
    pub tone_mod_high: f64,
    /// Carrier frequency while the modulator output is low.
    pub tone_mod_low: f64,
    pub switchover_delay: f64,
    pub battery_present: bool,
    pub mains_initially: bool,
    pub retrigger: Retrigger,
}

/// Observable state between two breakpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    pub supply_on: bool,
    pub trigger_out: bool,
    pub modulator_high: bool,
    /// 0 when silent.
    pub carrier_freq: f64,
    /// Start of the current carrier segment; the square wave is phase-locked to it.
    pub segment_start: f64,
}

impl SystemState {
    pub fn sounding(&self) -> bool {
        self.supply_on && self.trigger_out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub at: Instant,
    pub state: SystemState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub time: f64,
    pub description: String,
}

/// Exact event-level result of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    pub initial: SystemState,
    pub breakpoints: Vec<Breakpoint>,
    pub log: Vec<LogEntry>,
    /// Trigger windows `[start, end]`, the end clipped to the run duration.
    pub windows: Vec<(f64, f64)>,
    pub duration: f64,
}

impl Timeline {
    /// State seen by a sample at time `t`.
    pub fn state_at(&self, t: f64) -> SystemState {
        let idx = self.breakpoints.partition_point(|b| b.at.visible_at(t));
        if idx == 0 {
            self.initial
        } else {
            self.breakpoints[idx - 1].state
        }
    }

    /// Maximal intervals over which `pred` holds, clipped to `[0, duration]`.
    pub fn intervals(&self, pred: impl Fn(&SystemState) -> bool) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut open: Option<f64> = pred(&self.initial).then_some(0.0);
        for b in &self.breakpoints {
            let t = b.at.time.min(self.duration);
            match (open, pred(&b.state)) {
                (None, true) => open = Some(t),
                (Some(s), false) => {
                    if t > s {
                        out.push((s, t));
                    }
                    open = None;
                }
                _ => {}
            }
        }
        if let Some(s) = open {
            if self.duration > s {
                out.push((s, self.duration));
            }
        }
        out
    }

    pub fn sounding_intervals(&self) -> Vec<(f64, f64)> {
        self.intervals(SystemState::sounding)
    }

    pub fn sounding_seconds(&self) -> f64 {
        self.sounding_intervals().iter().map(|(a, b)| b - a).sum()
    }
}

#[derive(Debug, Clone, Copy)]
enum Event {
    External(EventKind),
    TriggerExpire { gen: u64 },
    RelaySettled { gen: u64 },
    ModulatorToggle { gen: u64, n: u64 },
}

struct Model {
    p: SystemParams,
    queue: EventQueue<Event>,
    mains: bool,
    switching: bool,
    relay_gen: u64,
    touching: bool,
    touch_starts: usize,
    /// Touch starts that the scenario later releases; an unreleased final
    /// touch counts as momentary.
    released_starts: usize,
    trigger: bool,
    trigger_gen: u64,
    window_end: f64,
    sounding: bool,
    sound_gen: u64,
    sound_start: f64,
    modulator_high: bool,
    segment_start: f64,
    last: SystemState,
    breakpoints: Vec<Breakpoint>,
    log: Vec<LogEntry>,
    windows: Vec<(f64, f64)>,
}

impl Model {
    fn new(p: SystemParams) -> Self {
        let mut m = Model {
            p,
            queue: EventQueue::new(),
            mains: p.mains_initially,
            switching: false,
            relay_gen: 0,
            touching: false,
            touch_starts: 0,
            released_starts: 0,
            trigger: false,
            trigger_gen: 0,
            window_end: 0.0,
            sounding: false,
            sound_gen: 0,
            sound_start: 0.0,
            modulator_high: false,
            segment_start: 0.0,
            last: SystemState {
                supply_on: false,
                trigger_out: false,
                modulator_high: false,
                carrier_freq: 0.0,
                segment_start: 0.0,
            },
            breakpoints: Vec::new(),
            log: Vec::new(),
            windows: Vec::new(),
        };
        m.last = m.snapshot();
        m
    }

    fn supply_on(&self) -> bool {
        !self.switching && (self.mains || self.p.battery_present)
    }

    fn snapshot(&self) -> SystemState {
        let carrier_freq = match (self.sounding, self.modulator_high) {
            (false, _) => 0.0,
            (true, true) => self.p.tone_mod_high,
            (true, false) => self.p.tone_mod_low,
        };
        SystemState {
            supply_on: self.supply_on(),
            trigger_out: self.trigger,
            modulator_high: self.sounding && self.modulator_high,
            carrier_freq,
            segment_start: if self.sounding {
                self.segment_start
            } else {
                0.0
            },
        }
    }

    fn note(&mut self, time: f64, description: impl Into<String>) {
        self.log.push(LogEntry {
            time,
            description: description.into(),
        });
    }

    /// Offset of modulator edge `n` from the siren onset.
    fn toggle_offset(&self, n: u64) -> f64 {
        let m = &self.p.modulator;
        (n / 2) as f64 * m.period + if n % 2 == 1 { m.t1 } else { 0.0 }
    }

    fn schedule_toggle(&mut self, n: u64) {
        let at = Instant::at(self.sound_start + self.toggle_offset(n));
        self.queue.schedule(
            at,
            Event::ModulatorToggle {
                gen: self.sound_gen,
                n,
            },
        );
    }

    fn begin_changeover(&mut self, t: f64, target: &str) {
        if self.p.switchover_delay > 0.0 {
            self.switching = true;
            self.relay_gen += 1;
            self.queue.schedule(
                Instant::after(t + self.p.switchover_delay),
                Event::RelaySettled {
                    gen: self.relay_gen,
                },
            );
            self.note(t, format!("relay changing over to {target}"));
        }
    }

    fn handle(&mut self, at: Instant, event: Event) -> String {
        let t = at.time;
        match event {
            Event::External(kind) => {
                self.note(t, kind.as_str());
                match kind {
                    EventKind::TouchStart => {
                        self.touch_starts += 1;
                        self.touching = self.touch_starts <= self.released_starts;
                        if self.trigger {
                            self.note(t, "touch during active window");
                        } else {
                            self.trigger = true;
                            self.trigger_gen += 1;
                            self.window_end = t + self.p.timeout;
                            self.windows.push((t, self.window_end));
                            self.queue.schedule(
                                Instant::after(self.window_end),
                                Event::TriggerExpire {
                                    gen: self.trigger_gen,
                                },
                            );
                        }
                    }
                    EventKind::TouchEnd => {
                        self.touching = false;
                        if self.trigger
                            && self.p.retrigger == Retrigger::LevelSensitive
                            && t >= self.window_end
                        {
                            self.end_window(t);
                        }
                    }
                    EventKind::MainsFail => {
                        self.mains = false;
                        if self.p.battery_present {
                            self.begin_changeover(t, "battery");
                        } else {
                            self.note(t, "no battery fitted");
                        }
                    }
                    EventKind::MainsRestore => {
                        self.mains = true;
                        self.begin_changeover(t, "mains");
                    }
                }
                kind.as_str().to_string()
            }
            Event::TriggerExpire { gen } => {
                if gen == self.trigger_gen && self.trigger {
                    if self.p.retrigger == Retrigger::LevelSensitive && self.touching {
                        self.note(t, "timeout reached while touch held");
                    } else {
                        self.end_window(t);
                    }
                }
                "monostable timeout".into()
            }
            Event::RelaySettled { gen } => {
                if gen == self.relay_gen && self.switching {
                    self.switching = false;
                    let source = if self.mains { "mains" } else { "battery" };
                    self.note(t, format!("relay settled on {source}"));
                }
                "relay settled".into()
            }
            Event::ModulatorToggle { gen, n } => {
                if gen == self.sound_gen && self.sounding {
                    self.modulator_high = n % 2 == 0;
                    self.segment_start = t;
                    self.schedule_toggle(n + 1);
                }
                "modulator edge".into()
            }
        }
    }

    fn end_window(&mut self, t: f64) {
        self.trigger = false;
        if let Some(w) = self.windows.last_mut() {
            w.1 = t;
        }
    }

    fn update_sounding(&mut self, t: f64) {
        let now = self.trigger && self.supply_on();
        if now && !self.sounding {
            self.sounding = true;
            self.sound_gen += 1;
            self.sound_start = t;
            self.modulator_high = true;
            self.segment_start = t;
            self.schedule_toggle(1);
        } else if !now && self.sounding {
            self.sounding = false;
            self.sound_gen += 1;
            self.modulator_high = false;
        }
    }

    fn record(&mut self, at: Instant, cause: &str) {
        let state = self.snapshot();
        if state == self.last {
            return;
        }
        let old = self.last;
        let t = at.time;
        let flag = |b: bool| if b { "on" } else { "off" };
        if old.supply_on != state.supply_on {
            self.note(t, format!("supply {} ({cause})", flag(state.supply_on)));
        }
        if old.trigger_out != state.trigger_out {
            self.note(
                t,
                format!("trigger_out {} ({cause})", flag(state.trigger_out)),
            );
        }
        if old.sounding() != state.sounding() {
            self.note(t, format!("siren {} ({cause})", flag(state.sounding())));
        }
        if state.sounding() && old.carrier_freq != state.carrier_freq {
            let level = if state.modulator_high { "high" } else { "low" };
            self.note(
                t,
                format!(
                    "modulator {level}, carrier {} Hz ({cause})",
                    state.carrier_freq
                ),
            );
        }
        self.last = state;
        self.breakpoints.push(Breakpoint { at, state });
    }
}

/// Runs the event model over `scenario`. The scenario must already be
/// validated against `p.mains_initially`.
pub fn build_timeline(p: SystemParams, scenario: &Scenario) -> Timeline {
    let mut m = Model::new(p);
    let initial = m.last;
    m.released_starts = scenario
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::TouchEnd)
        .count();
    for e in scenario.events() {
        let at = match e.kind {
            EventKind::TouchStart => Instant::at(e.time),
            _ => Instant::after(e.time),
        };
        m.queue.schedule(at, Event::External(e.kind));
    }
    let duration = scenario.duration();
    while let Some(next) = m.queue.peek() {
        if next.time > duration {
            break;
        }
        let (at, event) = m.queue.pop().expect("peeked");
        let cause = m.handle(at, event);
        m.update_sounding(at.time);
        m.record(at, &cause);
    }
    for w in &mut m.windows {
        w.1 = w.1.min(duration);
    }
    Timeline {
        initial,
        breakpoints: m.breakpoints,
        log: m.log,
        windows: m.windows,
        duration,
    }
}
