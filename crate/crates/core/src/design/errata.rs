//! Audit of the published worked numbers against recomputed values.

use std::fmt;

use super::report::DesignReport;
use crate::units::Unit;

pub const DEFAULT_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Erratum,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "MATCH",
            Verdict::Erratum => "ERRATUM",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrataEntry {
    pub quantity: &'static str,
    pub unit: Unit,
    pub tool: f64,
    pub paper: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

impl ErrataEntry {
    pub fn relative_error(&self) -> f64 {
        ((self.tool - self.paper) / self.paper).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrataReport {
    pub entries: Vec<ErrataEntry>,
}

impl ErrataReport {
    pub fn has_errata(&self) -> bool {
        self.entries.iter().any(|e| e.verdict == Verdict::Erratum)
    }

    pub fn entry(&self, quantity: &str) -> Option<&ErrataEntry> {
        self.entries.iter().find(|e| e.quantity == quantity)
    }
}

/// Published figures as printed, keyed by report quantity. Where the text
/// rounds (11.374 ≈ 11) the unrounded figure is stored.
const CLAIMS: &[(&str, &str)] = &[
    ("r1_ideal", "451.43"),
    ("r1_snapped", "470"),
    ("r2_ideal", "980"),
    ("led2_current", "0.012"),
    ("piv", "36"),
    ("filter_c_ideal", "2405.6e-6"),
    ("filter_c_snapped", "2200e-6"),
    ("trigger_timeout", "11.374"),
    ("relay_i_c", "0.03"),
    ("relay_i_b", "0.0024"),
    ("r5_ideal", "47050"),
    ("high_t1", "1.386e-3"),
    ("high_t2", "0.693e-3"),
    ("high_frequency", "481"),
    ("high_duty", "0.6695"),
    ("low_t1", "1.041"),
    ("low_t2", "0.9957"),
    ("low_period", "2.037"),
    ("low_frequency", "0.491"),
    ("amp_gain", "100"),
    ("amp_i_b", "0.038"),
    ("amp_i_e", "0.418"),
    ("amp_p_out", "5.016"),
];

/// Value of one unit in the last printed digit of a decimal literal.
fn last_digit_unit(text: &str) -> f64 {
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
        None => (text, 0),
    };
    let decimals = mantissa
        .split_once('.')
        .map_or(0, |(_, frac)| frac.len() as i32);
    10f64.powi(exp - decimals)
}

/// Tolerance applied to one claim: the requested relative tolerance, tightened
/// to half a unit in the claim's last printed digit.
fn claim_tolerance(text: &str, paper: f64, tolerance: f64) -> f64 {
    let printed = 0.5 * last_digit_unit(text) / paper.abs();
    tolerance.min(printed)
}

fn lookup(report: &DesignReport, quantity: &str) -> Option<(f64, Unit)> {
    report.records().into_iter().find_map(|r| {
        if r.name == quantity {
            Some((r.ideal, r.unit))
        } else if r.snapped.is_some() && r.snapped_name() == quantity {
            r.snapped.map(|s| (s, r.unit))
        } else {
            None
        }
    })
}

/// Compares each published figure with the recomputed one. An entry is MATCH
/// iff its relative difference is within the entry's tolerance, which is
/// `tolerance` capped at the precision the figure was printed to: a figure
/// quoted as 66.95 claims agreement to ±0.005.
pub fn verify_against_paper(report: &DesignReport, tolerance: f64) -> ErrataReport {
    let entries = CLAIMS
        .iter()
        .map(|&(quantity, printed)| {
            let paper: f64 = printed.parse().expect("claim literal");
            let tolerance = claim_tolerance(printed, paper, tolerance);
            let (tool, unit) = lookup(report, quantity).expect("claim names a report quantity");
            let verdict = if ((tool - paper) / paper).abs() <= tolerance {
                Verdict::Match
            } else {
                Verdict::Erratum
            };
            ErrataEntry {
                quantity,
                unit,
                tool,
                paper,
                verdict,
                tolerance,
            }
        })
        .collect();
    ErrataReport { entries }
}
