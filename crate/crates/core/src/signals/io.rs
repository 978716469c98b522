//! `CSIG1` binary and `t,re,im` CSV sample formats.
//!
//! Binary layout, all little-endian:
//!
//! | offset | size | field                         |
//! |--------|------|-------------------------------|
//! | 0      | 4    | magic `CSIG`                  |
//! | 4      | 4    | u32 version = 1               |
//! | 8      | 8    | f64 sample rate (Hz)          |
//! | 16     | 8    | f64 t0 (s)                    |
//! | 24     | 8    | u64 sample count N            |
//! | 32     | 16·N | interleaved f64 (re, im)      |

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use super::ComplexSignal;
use crate::error::{invalid, Error, Result};

pub const MAGIC: &[u8; 4] = b"CSIG";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

pub fn encode_binary(sig: &ComplexSignal) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * sig.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&sig.sample_rate().to_le_bytes());
    out.extend_from_slice(&sig.t0().to_le_bytes());
    out.extend_from_slice(&(sig.len() as u64).to_le_bytes());
    for z in sig.samples() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn format_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Format { offset: offset as u64, message: message.into() }
}

fn take<const N: usize>(bytes: &[u8], offset: usize, what: &str) -> Result<[u8; N]> {
    bytes
        .get(offset..offset + N)
        .and_then(|s| s.try_into().ok())
        .ok_or_else(|| format_err(bytes.len(), format!("truncated while reading {what}")))
}

pub fn decode_binary(bytes: &[u8]) -> Result<ComplexSignal> {
    let magic: [u8; 4] = take(bytes, 0, "magic")?;
    if &magic != MAGIC {
        return Err(format_err(0, format!("bad magic {magic:?}")));
    }
    let version = u32::from_le_bytes(take(bytes, 4, "version")?);
    if version != VERSION {
        return Err(format_err(4, format!("unsupported version {version}")));
    }
    let sample_rate = f64::from_le_bytes(take(bytes, 8, "sample rate")?);
    let t0 = f64::from_le_bytes(take(bytes, 16, "t0")?);
    let n = u64::from_le_bytes(take(bytes, 24, "sample count")?);

    let payload = bytes.len() - HEADER_LEN;
    let want = n.checked_mul(16).ok_or_else(|| format_err(24, "sample count overflows"))?;
    if (payload as u64) < want {
        return Err(format_err(
            bytes.len(),
            format!("truncated payload: header announces {n} samples, {payload} payload bytes present"),
        ));
    }
    if payload as u64 > want {
        return Err(format_err(HEADER_LEN + want as usize, "trailing bytes after payload"));
    }
    let samples = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    ComplexSignal::new(samples, sample_rate, t0).map_err(|e| format_err(8, e.to_string()))
}

pub fn write_binary(path: impl AsRef<Path>, sig: &ComplexSignal) -> Result<()> {
    fs::write(path, encode_binary(sig))?;
    Ok(())
}

pub fn read_binary(path: impl AsRef<Path>) -> Result<ComplexSignal> {
    decode_binary(&fs::read(path)?)
}

pub fn write_csv(path: impl AsRef<Path>, sig: &ComplexSignal) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "t,re,im")?;
    for (t, z) in sig.times().zip(sig.samples()) {
        writeln!(w, "{t:e},{:e},{:e}", z.re, z.im)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a `t,re,im` CSV. The sample rate is inferred from the time column
/// unless given; single-sample files need it explicitly.
pub fn read_csv(path: impl AsRef<Path>, sample_rate: Option<f64>) -> Result<ComplexSignal> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != "t,re,im" {
        return Err(format_err(0, format!("expected header `t,re,im`, found `{}`", header.trim())));
    }
    let mut offset = header.len() + 1;
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for line in lines {
        let line = line?;
        let len = line.len() + 1;
        if !line.trim().is_empty() {
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 3 {
                return Err(format_err(offset, "expected three comma-separated fields"));
            }
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| format_err(offset, format!("bad number `{s}`")))
            };
            times.push(parse(fields[0])?);
            samples.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        offset += len;
    }
    let t0 = times.first().copied().unwrap_or(0.0);
    let fs = match sample_rate {
        Some(fs) => fs,
        None if times.len() >= 2 => {
            let span = times[times.len() - 1] - times[0];
            (times.len() - 1) as f64 / span
        }
        None => return Err(invalid("cannot infer sample rate from fewer than two rows")),
    };
    ComplexSignal::new(samples, fs, t0)
}
