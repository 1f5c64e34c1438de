use std::io::{self, Write};

use thiserror::Error;

use crate::sim::Trace;

/// `floor(0.9 × 32767)`: the stored value of a full-amplitude sample.
pub const FULL_SCALE: i16 = 29490;
pub const HEADER_LEN: usize = 44;

const CHANNELS: u16 = 1;
const BITS_PER_SAMPLE: u16 = 16;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("trace sampled at {trace} Hz but WAV declared at {params} Hz")]
    RateMismatch { trace: f64, params: u32 },
    #[error("sample rate {0} Hz outside 8000..=192000")]
    Rate(u32),
    #[error("amplitude {0} must be positive and finite")]
    Amplitude(f64),
    #[error("{0} samples do not fit a WAV data chunk")]
    TooLong(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Encode(#[from] hound::Error),
}

/// Mono 16-bit little-endian PCM; `amplitude` volts map to ±[`FULL_SCALE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavParams {
    pub sample_rate: u32,
    pub amplitude: f64,
}

impl WavParams {
    pub fn for_trace(trace: &Trace) -> Self {
        WavParams {
            sample_rate: trace.sample_rate.round() as u32,
            amplitude: trace.amplitude,
        }
    }
}

fn quantize(v: f64, amplitude: f64) -> i16 {
    if v == 0.0 {
        return 0;
    }
    let scaled = (f64::from(FULL_SCALE) * v / amplitude).round();
    scaled.clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16
}

pub fn write_wav<W: Write>(trace: &Trace, params: WavParams, out: &mut W) -> Result<(), WavError> {
    out.write_all(&wav_bytes(trace, params)?)?;
    Ok(())
}

pub fn wav_bytes(trace: &Trace, params: WavParams) -> Result<Vec<u8>, WavError> {
    if !(8000..=192_000).contains(&params.sample_rate) {
        return Err(WavError::Rate(params.sample_rate));
    }
    if f64::from(params.sample_rate) != trace.sample_rate {
        return Err(WavError::RateMismatch {
            trace: trace.sample_rate,
            params: params.sample_rate,
        });
    }
    if !(params.amplitude.is_finite() && params.amplitude > 0.0) {
        return Err(WavError::Amplitude(params.amplitude));
    }
    let fits = trace
        .len()
        .checked_mul(2)
        .and_then(|n| u32::try_from(n + HEADER_LEN).ok())
        .is_some();
    if !fits {
        return Err(WavError::TooLong(trace.len()));
    }
    let spec = hound::WavSpec {
        channels: CHANNELS,
        sample_rate: params.sample_rate,
        bits_per_sample: BITS_PER_SAMPLE,
        sample_format: hound::SampleFormat::Int,
    };
    let mut buf = io::Cursor::new(Vec::with_capacity(HEADER_LEN + 2 * trace.len()));
    let mut w = hound::WavWriter::new(&mut buf, spec)?;
    for &v in &trace.speaker {
        w.write_sample(quantize(v, params.amplitude))?;
    }
    w.finalize()?;
    Ok(buf.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(speaker: Vec<f64>) -> Trace {
        let n = speaker.len();
        Trace {
            sample_rate: 16_000.0,
            supply_on: vec![true; n],
            trigger_out: vec![true; n],
            modulator_high: vec![true; n],
            carrier_freq: vec![500.0; n],
            speaker,
            amplitude: 6.5,
            log: vec![],
            windows: vec![],
            sounding_seconds: 0.0,
        }
    }

    #[test]
    fn header_only() {
        let t = trace(vec![]);
        let bytes = wav_bytes(&t, WavParams::for_trace(&t)).unwrap();
        assert_eq!(bytes.len(), 44);
        assert_eq!(&bytes[40..44], &[0, 0, 0, 0]);
        assert_eq!(&bytes[0..4], b"RIFF");
        assert_eq!(&bytes[4..8], &36u32.to_le_bytes());
    }

    #[test]
    fn full_scale_samples() {
        let t = trace(vec![6.5, -6.5, 0.0]);
        let bytes = wav_bytes(&t, WavParams::for_trace(&t)).unwrap();
        let samples: Vec<i16> = bytes[44..]
            .chunks(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]))
            .collect();
        assert_eq!(samples, [29490, -29490, 0]);
        assert_eq!(FULL_SCALE, (0.9f64 * 32767.0).floor() as i16);
    }

    #[test]
    fn rejects_mismatch_and_bad_rate() {
        let t = trace(vec![0.0]);
        let p = WavParams {
            sample_rate: 44_100,
            amplitude: 1.0,
        };
        assert!(matches!(
            wav_bytes(&t, p),
            Err(WavError::RateMismatch { .. })
        ));
        let p = WavParams {
            sample_rate: 4_000,
            amplitude: 1.0,
        };
        assert!(matches!(wav_bytes(&t, p), Err(WavError::Rate(4000))));
        let p = WavParams {
            sample_rate: 16_000,
            amplitude: 0.0,
        };
        assert!(matches!(wav_bytes(&t, p), Err(WavError::Amplitude(_))));
    }
}
