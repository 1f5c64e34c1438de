use std::fmt::Write as _;
use std::str::FromStr;

use crate::design::{DesignReport, ErrataReport};
use crate::units::{format_significant, Quantity, Unit};

/// Significant digits shown in reports.
pub const REPORT_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Kv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "kv" => Ok(ReportFormat::Kv),
            _ => Err(format!("unknown report format {s:?} (expected text or kv)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ReportRef<'a> {
    Design(&'a DesignReport),
    Errata(&'a ErrataReport),
}

fn show(value: f64, unit: Unit) -> String {
    match Quantity::new(value, unit) {
        Ok(q) => format_significant(q, REPORT_DIGITS),
        Err(_) => format!("{value}"),
    }
}

pub fn write_report(report: ReportRef<'_>, format: ReportFormat) -> String {
    match (report, format) {
        (ReportRef::Design(r), ReportFormat::Text) => design_text(r),
        (ReportRef::Design(r), ReportFormat::Kv) => design_kv(r),
        (ReportRef::Errata(e), ReportFormat::Text) => errata_text(e),
        (ReportRef::Errata(e), ReportFormat::Kv) => errata_kv(e),
    }
}

fn design_text(r: &DesignReport) -> String {
    let rows: Vec<[String; 4]> = r
        .records()
        .iter()
        .map(|rec| {
            [
                rec.name.to_string(),
                show(rec.ideal, rec.unit),
                rec.snapped
                    .map(|s| format!("-> {}", show(s, rec.unit)))
                    .unwrap_or_default(),
                rec.formula.to_string(),
            ]
        })
        .collect();
    let header = [
        "quantity".to_string(),
        "value".to_string(),
        "preferred".to_string(),
        "formula".to_string(),
    ];
    let mut widths = [0usize; 3];
    for row in std::iter::once(&header).chain(&rows) {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i < 3 {
                let pad = widths[i] - cell.chars().count();
                line.push_str(cell);
                line.push_str(&" ".repeat(pad + 2));
            } else {
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn design_kv(r: &DesignReport) -> String {
    let mut out = String::new();
    for rec in r.records() {
        let _ = writeln!(out, "{}={}", rec.name, show(rec.ideal, rec.unit));
        if let Some(s) = rec.snapped {
            let _ = writeln!(out, "{}={}", rec.snapped_name(), show(s, rec.unit));
        }
    }
    out
}

/// A fraction as a percentage to three significant digits, trailing zeros trimmed.
fn percent(fraction: f64) -> String {
    let pct = 100.0 * fraction;
    if pct == 0.0 || !pct.is_finite() {
        return format!("{pct}");
    }
    let decimals = (2 - pct.abs().log10().floor() as i32).max(0) as usize;
    let text = format!("{pct:.decimals$}");
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

fn errata_text(e: &ErrataReport) -> String {
    if e.entries.is_empty() {
        return "no entries\n".into();
    }
    let width = e
        .entries
        .iter()
        .map(|x| x.quantity.len())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for x in &e.entries {
        let _ = writeln!(
            out,
            "{:<width$}  {} vs paper {} {} (off {:.2}%, tolerance {}%)",
            x.quantity,
            show(x.tool, x.unit),
            show(x.paper, x.unit),
            x.verdict,
            100.0 * x.relative_error(),
            percent(x.tolerance),
        );
    }
    let errata = e
        .entries
        .iter()
        .filter(|x| x.verdict == crate::design::Verdict::Erratum)
        .count();
    let _ = writeln!(
        out,
        "{} entries, {} match, {} errata",
        e.entries.len(),
        e.entries.len() - errata,
        errata
    );
    out
}

fn errata_kv(e: &ErrataReport) -> String {
    let mut out = String::new();
    for x in &e.entries {
        let q = x.quantity;
        let _ = writeln!(out, "{q}.tool={}", show(x.tool, x.unit));
        let _ = writeln!(out, "{q}.paper={}", show(x.paper, x.unit));
        let _ = writeln!(out, "{q}.verdict={}", x.verdict);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{compute_report, verify_against_paper, CircuitSpec};

    fn report() -> DesignReport {
        compute_report(&CircuitSpec::default()).unwrap()
    }

    #[test]
    fn kv_lines() {
        let kv = write_report(ReportRef::Design(&report()), ReportFormat::Kv);
        assert!(kv.lines().any(|l| l == "trigger_timeout=11.374s"));
        assert!(kv.lines().any(|l| l == "r1_snapped=470Ω"));
        assert!(kv.lines().any(|l| l == "filter_c_snapped=2.2mF"));
        assert!(kv.lines().all(|l| l.contains('=')));
        assert!(kv.ends_with('\n'));
    }

    #[test]
    fn text_table_is_aligned() {
        let text = write_report(ReportRef::Design(&report()), ReportFormat::Text);
        let value_col = |l: &str| l.find("  ").unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("quantity"));
        let lt = text
            .lines()
            .find(|l| l.starts_with("trigger_timeout "))
            .unwrap();
        assert!(lt.contains("11.374s"));
        assert!(value_col(lt) <= value_col(first) + 20);
    }

    #[test]
    fn errata_text_line() {
        let audit = verify_against_paper(&report(), 0.01);
        let text = write_report(ReportRef::Errata(&audit), ReportFormat::Text);
        assert!(text.contains("1.46569s vs paper 2.037s ERRATUM"));
        assert!(text.contains("11.374s vs paper 11.374s MATCH"));
    }

    #[test]
    fn percent_digits() {
        assert_eq!(percent(0.01), "1");
        assert_eq!(percent(0.5), "50");
        assert_eq!(percent(0.0010638297872340426), "0.106");
        assert_eq!(percent(1.1075914316726846e-5), "0.00111");
        assert_eq!(percent(0.0), "0");
    }

    #[test]
    fn empty_errata() {
        let e = ErrataReport::default();
        assert_eq!(
            write_report(ReportRef::Errata(&e), ReportFormat::Text),
            "no entries\n"
        );
        assert_eq!(write_report(ReportRef::Errata(&e), ReportFormat::Kv), "");
    }
}
