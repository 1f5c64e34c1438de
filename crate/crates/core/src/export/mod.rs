//! Byte-exact CSV waveforms, WAV audio, and design/errata reports.

mod csv;
mod report;
mod wav;

pub use csv::{csv_bytes, read_csv, write_csv, CsvChannels, CsvError, CSV_HEADER};
pub use report::{write_report, ReportFormat, ReportRef, REPORT_DIGITS};
pub use wav::{wav_bytes, write_wav, WavError, WavParams, FULL_SCALE, HEADER_LEN};
