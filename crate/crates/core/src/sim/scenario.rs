use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Extra simulated time after the last event when no duration is given.
pub const DEFAULT_TAIL: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: expected `<time> <event>` or `duration <seconds>`")]
    Syntax { line: usize },
    #[error("line {line}: bad time {text:?}")]
    BadTime { line: usize, text: String },
    #[error("line {line}: unknown event kind {kind:?}")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: duration given more than once")]
    DuplicateDuration { line: usize },
    #[error("event at {time}s comes before the previous event at {previous}s")]
    NonMonotonic { time: f64, previous: f64 },
    #[error("{kind} at {time}s does not alternate with its counterpart")]
    Alternation { kind: EventKind, time: f64 },
    #[error("event time {0}s is negative or not finite")]
    BadEventTime(f64),
    #[error("duration {duration}s ends before the last event at {last}s")]
    ShortDuration { duration: f64, last: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    TouchStart,
    TouchEnd,
    MainsFail,
    MainsRestore,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::TouchStart => "touch_start",
            EventKind::TouchEnd => "touch_end",
            EventKind::MainsFail => "mains_fail",
            EventKind::MainsRestore => "mains_restore",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "touch_start" => Ok(EventKind::TouchStart),
            "touch_end" => Ok(EventKind::TouchEnd),
            "mains_fail" => Ok(EventKind::MainsFail),
            "mains_restore" => Ok(EventKind::MainsRestore),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioEvent {
    pub time: f64,
    pub kind: EventKind,
}

/// Time-ordered external stimuli.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    events: Vec<ScenarioEvent>,
    duration: f64,
}

impl Scenario {
    /// Validates ordering and alternation. Touches must start with
    /// `touch_start`; mains events must start with `mains_fail`.
    pub fn new(events: Vec<ScenarioEvent>, duration: Option<f64>) -> Result<Self, ScenarioError> {
        Self::with_initial_mains(events, duration, true)
    }

    /// As [`Scenario::new`], for runs where mains may be absent at t = 0
    /// (then the first mains event must be `mains_restore`).
    pub fn with_initial_mains(
        events: Vec<ScenarioEvent>,
        duration: Option<f64>,
        mains_initially: bool,
    ) -> Result<Self, ScenarioError> {
        let mut previous = 0.0f64;
        let mut touching = false;
        let mut mains = mains_initially;
        for e in &events {
            if !e.time.is_finite() || e.time < 0.0 {
                return Err(ScenarioError::BadEventTime(e.time));
            }
            if e.time < previous {
                return Err(ScenarioError::NonMonotonic {
                    time: e.time,
                    previous,
                });
            }
            previous = e.time;
            let ok = match e.kind {
                EventKind::TouchStart => !std::mem::replace(&mut touching, true),
                EventKind::TouchEnd => std::mem::replace(&mut touching, false),
                EventKind::MainsFail => std::mem::replace(&mut mains, false),
                EventKind::MainsRestore => !std::mem::replace(&mut mains, true),
            };
            if !ok {
                return Err(ScenarioError::Alternation {
                    kind: e.kind,
                    time: e.time,
                });
            }
        }
        let last = events.last().map_or(0.0, |e| e.time);
        let duration = duration.unwrap_or(last + DEFAULT_TAIL);
        if !duration.is_finite() || duration < last {
            return Err(ScenarioError::ShortDuration { duration, last });
        }
        Ok(Scenario { events, duration })
    }

    pub fn empty(duration: f64) -> Self {
        Scenario {
            events: Vec::new(),
            duration,
        }
    }

    pub fn events(&self) -> &[ScenarioEvent] {
        &self.events
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }
}

/// Parses the scenario file format: `<time_seconds> <event_kind>` lines, an
/// optional `duration <seconds>` line, and `#` comments.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let (events, duration) = parse_lines(text)?;
    Scenario::new(events, duration)
}

pub(crate) fn parse_lines(text: &str) -> Result<(Vec<ScenarioEvent>, Option<f64>), ScenarioError> {
    let mut events = Vec::new();
    let mut duration = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(ScenarioError::Syntax { line });
        };
        let time = |text: &str| {
            text.parse::<f64>()
                .ok()
                .filter(|t| t.is_finite() && *t >= 0.0)
                .ok_or_else(|| ScenarioError::BadTime {
                    line,
                    text: text.into(),
                })
        };
        if a == "duration" {
            if duration.replace(time(b)?).is_some() {
                return Err(ScenarioError::DuplicateDuration { line });
            }
            continue;
        }
        let t = time(a)?;
        let kind = b.parse().map_err(|_| ScenarioError::UnknownKind {
            line,
            kind: b.into(),
        })?;
        events.push(ScenarioEvent { time: t, kind });
    }
    Ok((events, duration))
}
