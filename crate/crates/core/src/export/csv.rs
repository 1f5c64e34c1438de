use std::io::{self, Write};

use thiserror::Error;

use crate::sim::Trace;

pub const CSV_HEADER: &str = "t,supply_on,trigger_out,modulator_high,carrier_freq,speaker";

/// Writes one row per sample. Time carries 9 decimals; floats use the
/// shortest representation that parses back to the same value.
pub fn write_csv<W: Write>(trace: &Trace, out: &mut W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    let bit = |b: bool| if b { "1" } else { "0" };
    for i in 0..trace.len() {
        w.write_record([
            format!("{:.9}", trace.time(i)).as_str(),
            bit(trace.supply_on[i]),
            bit(trace.trigger_out[i]),
            bit(trace.modulator_high[i]),
            trace.carrier_freq[i].to_string().as_str(),
            trace.speaker[i].to_string().as_str(),
        ])?;
    }
    w.flush()
}

pub fn csv_bytes(trace: &Trace) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsvError {
    #[error("missing or unexpected header")]
    Header,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
}

/// Sampled channels recovered from a CSV export.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvChannels {
    pub t: Vec<f64>,
    pub supply_on: Vec<bool>,
    pub trigger_out: Vec<bool>,
    pub modulator_high: Vec<bool>,
    pub carrier_freq: Vec<f64>,
    pub speaker: Vec<f64>,
}

pub fn read_csv(text: &str) -> Result<CsvChannels, CsvError> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(|_| CsvError::Header)?;
    if !header.iter().eq(CSV_HEADER.split(',')) {
        return Err(CsvError::Header);
    }
    let mut ch = CsvChannels::default();
    for (idx, row) in r.records().enumerate() {
        let line = idx + 2;
        let err = |reason: &str| CsvError::Row {
            line,
            reason: reason.into(),
        };
        let row = row.map_err(|e| err(&e.to_string()))?;
        let float = |i: usize| row[i].parse::<f64>().map_err(|_| err("bad number"));
        let flag = |i: usize| match &row[i] {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(err("bad flag")),
        };
        ch.t.push(float(0)?);
        ch.supply_on.push(flag(1)?);
        ch.trigger_out.push(flag(2)?);
        ch.modulator_high.push(flag(3)?);
        ch.carrier_freq.push(float(4)?);
        ch.speaker.push(float(5)?);
    }
    Ok(ch)
}
