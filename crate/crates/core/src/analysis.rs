//! Spectra, time-frequency maps, band power and harmonic cancellation.
//!
//! All dB values are relative to a full-scale reference amplitude (the
//! unsaturated peak `a + b` in the scenario pipelines, 1 by default): powers
//! are referenced to its square, STFT magnitudes to the amplitude itself.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::signals::ComplexSignal;

fn db(power: f64) -> f64 {
    10.0 * power.max(f64::MIN_POSITIVE).log10()
}

/// DC-centered bin frequencies for an `n`-point transform.
fn centered_freqs(n: usize, sample_rate: f64) -> Vec<f64> {
    let df = sample_rate / n as f64;
    let h = (n / 2) as f64;
    (0..n).map(|j| (j as f64 - h) * df).collect()
}

/// Reorder an FFT output so that index `j` holds frequency `(j - n/2) df`.
fn fftshift(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let h = n / 2;
    (0..n).map(|j| x[(j + n - h) % n]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Rectangular,
    Hann,
}

impl Window {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Self::Rectangular => vec![1.0; len],
            // periodic Hann
            Self::Hann => (0..len)
                .map(|k| {
                    let s = (std::f64::consts::PI * k as f64 / len as f64).sin();
                    s * s
                })
                .collect(),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rectangular => "rectangular",
            Self::Hann => "hann",
        })
    }
}

/// DC-centered periodogram.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFrame {
    pub freqs: Vec<f64>,
    /// Linear power per bin; sums to the mean signal power for a rectangular window.
    pub bin_power: Vec<f64>,
    pub psd_db: Vec<f64>,
    pub nfft: usize,
    pub df: f64,
    pub full_scale: f64,
    pub window: Window,
}

impl SpectrumFrame {
    /// Re-express the dB values relative to the amplitude `full_scale`.
    pub fn with_full_scale(mut self, full_scale: f64) -> Result<Self> {
        check_full_scale(full_scale)?;
        let r = full_scale * full_scale;
        self.psd_db = self.bin_power.iter().map(|&p| db(p / r)).collect();
        self.full_scale = full_scale;
        Ok(self)
    }

    /// Linear power spectral density, power per Hz.
    pub fn psd_linear(&self) -> impl Iterator<Item = f64> + '_ {
        self.bin_power.iter().map(move |p| p / self.df)
    }

    pub fn total_power(&self) -> f64 {
        self.bin_power.iter().sum()
    }

    fn band_range(&self, f_lo: f64, f_hi: f64) -> Result<std::ops::Range<usize>> {
        if !(f_lo < f_hi) {
            return Err(invalid(format!("band [{f_lo}, {f_hi}] is empty")));
        }
        let lo = self.freqs.partition_point(|&f| f < f_lo);
        let hi = self.freqs.partition_point(|&f| f <= f_hi);
        if lo >= hi {
            return Err(invalid(format!("band [{f_lo}, {f_hi}] Hz contains no bins")));
        }
        Ok(lo..hi)
    }

    pub fn band_power_linear(&self, f_lo: f64, f_hi: f64) -> Result<f64> {
        Ok(self.bin_power[self.band_range(f_lo, f_hi)?].iter().sum())
    }

    /// Strongest bin as `(freq_hz, psd_db)`.
    pub fn peak(&self) -> (f64, f64) {
        let k = argmax(&self.bin_power);
        (self.freqs[k], self.psd_db[k])
    }

    /// Strongest bin inside `[f_lo, f_hi]`, with its frequency refined by a
    /// parabola through the neighbouring log powers.
    pub fn peak_in(&self, f_lo: f64, f_hi: f64) -> Result<(f64, f64)> {
        let range = self.band_range(f_lo, f_hi)?;
        let k = range.start + argmax(&self.bin_power[range]);
        Ok((refine_peak(&self.psd_db, k, &self.freqs, self.df), self.psd_db[k]))
    }

    pub fn median_db(&self) -> f64 {
        let mut v = self.psd_db.clone();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,psd_db\n");
        for (f, p) in self.freqs.iter().zip(&self.psd_db) {
            out.push_str(&format!("{f:e},{p:e}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0)
}

fn refine_peak(level_db: &[f64], k: usize, freqs: &[f64], df: f64) -> f64 {
    if k == 0 || k + 1 >= level_db.len() {
        return freqs[k];
    }
    let (l, c, r) = (level_db[k - 1], level_db[k], level_db[k + 1]);
    let denom = l - 2.0 * c + r;
    if denom >= 0.0 {
        return freqs[k];
    }
    freqs[k] + 0.5 * (l - r) / denom * df
}

fn check_full_scale(full_scale: f64) -> Result<()> {
    if !(full_scale > 0.0 && full_scale.is_finite()) {
        return Err(invalid(format!("full-scale reference must be positive, got {full_scale}")));
    }
    Ok(())
}

/// Rectangular-window periodogram, zero-padded to `nfft`.
pub fn spectrum(x: &ComplexSignal, nfft: usize) -> Result<SpectrumFrame> {
    spectrum_windowed(x, nfft, Window::Rectangular)
}

/// Periodogram with a window; bin powers are normalised by the window energy
/// so a white input keeps its mean power.
pub fn spectrum_windowed(x: &ComplexSignal, nfft: usize, window: Window) -> Result<SpectrumFrame> {
    x.ensure_non_empty()?;
    let len = x.len();
    if nfft < len {
        return Err(invalid(format!("nfft {nfft} is shorter than the signal ({len} samples)")));
    }
    let w = window.coefficients(len);
    let w_energy: f64 = w.iter().map(|v| v * v).sum();
    let mut buf: Vec<Complex64> = x.samples().iter().zip(&w).map(|(z, &wk)| z * wk).collect();
    buf.resize(nfft, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let scale = 1.0 / (nfft as f64 * w_energy);
    let bin_power: Vec<f64> = fftshift(&buf).iter().map(|z| z.norm_sqr() * scale).collect();
    let frame = SpectrumFrame {
        freqs: centered_freqs(nfft, x.sample_rate()),
        psd_db: Vec::new(),
        bin_power,
        nfft,
        df: x.sample_rate() / nfft as f64,
        full_scale: 1.0,
        window,
    };
    frame.with_full_scale(1.0)
}

/// Integrated power over `[f_lo, f_hi]` in dB.
pub fn band_power(s: &SpectrumFrame, f_lo: f64, f_hi: f64) -> Result<f64> {
    Ok(db(s.band_power_linear(f_lo, f_hi)? / (s.full_scale * s.full_scale)))
}

/// Short-time magnitude map.
#[derive(Debug, Clone, PartialEq)]
pub struct TFMap {
    /// Frame centers in seconds.
    pub times: Vec<f64>,
    pub freqs: Vec<f64>,
    /// Row per frame, column per frequency.
    pub magnitude_db: Vec<Vec<f64>>,
    pub window: Window,
    pub window_len: usize,
    pub hop: usize,
    pub sample_rate: f64,
    pub full_scale: f64,
}

/// One ridge sample: frame time, peak frequency and level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgePoint {
    pub time: f64,
    pub freq: f64,
    pub level_db: f64,
}

impl TFMap {
    pub fn rows(&self) -> usize {
        self.times.len()
    }

    pub fn cols(&self) -> usize {
        self.freqs.len()
    }

    pub fn df(&self) -> f64 {
        self.sample_rate / self.window_len as f64
    }

    pub fn with_full_scale(mut self, full_scale: f64) -> Result<Self> {
        check_full_scale(full_scale)?;
        let shift = 20.0 * (self.full_scale / full_scale).log10();
        for row in &mut self.magnitude_db {
            for v in row.iter_mut() {
                *v += shift;
            }
        }
        self.full_scale = full_scale;
        Ok(self)
    }

    fn col_range(&self, f_lo: f64, f_hi: f64) -> Result<std::ops::Range<usize>> {
        if !(f_lo < f_hi) {
            return Err(invalid(format!("band [{f_lo}, {f_hi}] is empty")));
        }
        let lo = self.freqs.partition_point(|&f| f < f_lo);
        let hi = self.freqs.partition_point(|&f| f <= f_hi);
        if lo >= hi {
            return Err(invalid(format!("band [{f_lo}, {f_hi}] Hz contains no bins")));
        }
        Ok(lo..hi)
    }

    /// Per-frame maximum inside `[f_lo, f_hi]`.
    pub fn ridge_in(&self, f_lo: f64, f_hi: f64) -> Result<Vec<RidgePoint>> {
        let range = self.col_range(f_lo, f_hi)?;
        let df = self.df();
        Ok(self
            .magnitude_db
            .iter()
            .zip(&self.times)
            .map(|(row, &time)| {
                let k = range.start + argmax(&row[range.clone()]);
                RidgePoint { time, freq: refine_peak(row, k, &self.freqs, df), level_db: row[k] }
            })
            .collect())
    }

    /// Per-frame maximum over the whole frequency axis.
    pub fn ridge(&self) -> Vec<RidgePoint> {
        let lo = self.freqs[0];
        let hi = self.freqs[self.freqs.len() - 1];
        self.ridge_in(lo, hi).unwrap_or_default()
    }

    /// Largest magnitude anywhere in the band.
    pub fn max_in(&self, f_lo: f64, f_hi: f64) -> Result<f64> {
        let range = self.col_range(f_lo, f_hi)?;
        Ok(self
            .magnitude_db
            .iter()
            .flat_map(|row| row[range.clone()].iter().copied())
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,freq_hz,mag_db\n");
        for (row, t) in self.magnitude_db.iter().zip(&self.times) {
            for (v, f) in row.iter().zip(&self.freqs) {
                out.push_str(&format!("{t:e},{f:e},{v:e}\n"));
            }
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Binary grid: magic `TFMG`, u32 version 1, f64 sample rate, f64 first
    /// frame time, f64 frame step, f64 first frequency, f64 frequency step,
    /// u64 rows, u64 cols, then `rows * cols` f64 magnitudes row-major, all
    /// little-endian.
    pub fn encode_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(TF_HEADER_LEN + 8 * self.rows() * self.cols());
        out.extend_from_slice(TF_MAGIC);
        out.extend_from_slice(&1u32.to_le_bytes());
        let t_first = self.times.first().copied().unwrap_or(0.0);
        let f_first = self.freqs.first().copied().unwrap_or(0.0);
        let header = [self.sample_rate, t_first, self.hop as f64 / self.sample_rate, f_first, self.df()];
        for v in header {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(self.rows() as u64).to_le_bytes());
        out.extend_from_slice(&(self.cols() as u64).to_le_bytes());
        for row in &self.magnitude_db {
            for v in row {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.encode_binary())?;
        Ok(())
    }
}

const TF_MAGIC: &[u8; 4] = b"TFMG";
const TF_HEADER_LEN: usize = 4 + 4 + 5 * 8 + 2 * 8;

/// Decoded binary TF grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TFGrid {
    pub sample_rate: f64,
    pub t_first: f64,
    pub t_step: f64,
    pub f_first: f64,
    pub f_step: f64,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

pub fn decode_tf_binary(bytes: &[u8]) -> Result<TFGrid> {
    let format = |offset: usize, message: String| Error::Format { offset: offset as u64, message };
    if bytes.len() < TF_HEADER_LEN {
        return Err(format(bytes.len(), "truncated header".into()));
    }
    if &bytes[..4] != TF_MAGIC {
        return Err(format(0, "bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != 1 {
        return Err(format(4, format!("unsupported version {version}")));
    }
    let f = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let u = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap()) as usize;
    let (rows, cols) = (u(48), u(56));
    let need = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(TF_HEADER_LEN))
        .ok_or_else(|| format(48, "grid size overflows".into()))?;
    if bytes.len() != need {
        return Err(format(bytes.len().min(need), format!("expected {need} bytes, found {}", bytes.len())));
    }
    let values = bytes[TF_HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(TFGrid {
        sample_rate: f(8),
        t_first: f(16),
        t_step: f(24),
        f_first: f(32),
        f_step: f(40),
        rows,
        cols,
        values,
    })
}

/// Hann-windowed STFT with a DC-centered `window_len`-point frequency axis.
///
/// Magnitudes are scaled by the window sum, so a tone of amplitude `A`
/// peaks at `20 log10(A)` dB.
pub fn stft(x: &ComplexSignal, window_len: usize, hop: usize) -> Result<TFMap> {
    if window_len == 0 || hop == 0 || hop > window_len {
        return Err(invalid(format!("need 0 < hop <= window_len, got hop {hop}, window {window_len}")));
    }
    if window_len > x.len() {
        return Err(invalid(format!(
            "window_len {window_len} exceeds the signal length {}",
            x.len()
        )));
    }
    let fs = x.sample_rate();
    let window = Window::Hann;
    let w = window.coefficients(window_len);
    let gain: f64 = w.iter().sum();
    let n_frames = (x.len() - window_len) / hop + 1;
    let fft = FftPlanner::new().plan_fft_forward(window_len);
    let samples = x.samples();
    let magnitude_db: Vec<Vec<f64>> = (0..n_frames)
        .into_par_iter()
        .map(|r| {
            let start = r * hop;
            let mut buf: Vec<Complex64> =
                samples[start..start + window_len].iter().zip(&w).map(|(z, &wk)| z * wk).collect();
            fft.process(&mut buf);
            fftshift(&buf).iter().map(|z| 2.0 * db(z.norm() / gain)).collect()
        })
        .collect();
    let times = (0..n_frames)
        .map(|r| x.t0() + (r * hop) as f64 / fs + 0.5 * window_len as f64 / fs)
        .collect();
    Ok(TFMap {
        times,
        freqs: centered_freqs(window_len, fs),
        magnitude_db,
        window,
        window_len,
        hop,
        sample_rate: fs,
        full_scale: 1.0,
    })
}

/// Least-squares line through the ridge, returning `(slope Hz/s, intercept Hz)`.
pub fn fit_ridge_slope(points: &[RidgePoint]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(invalid("need at least two ridge points for a slope"));
    }
    let n = points.len() as f64;
    let mt = points.iter().map(|p| p.time).sum::<f64>() / n;
    let mf = points.iter().map(|p| p.freq).sum::<f64>() / n;
    let (mut stf, mut stt) = (0.0, 0.0);
    for p in points {
        stf += (p.time - mt) * (p.freq - mf);
        stt += (p.time - mt) * (p.time - mt);
    }
    if stt == 0.0 {
        return Err(invalid("ridge points share a single time"));
    }
    let slope = stf / stt;
    Ok((slope, mf - slope * mt))
}

/// Before/after band power of a single-term cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct CancellationReport {
    pub band: (f64, f64),
    pub power_before: f64,
    pub power_after: f64,
    pub reduction: f64,
    /// Strongest residual bin in the band.
    pub residual_peak: f64,
    pub full_scale: f64,
}

impl fmt::Display for CancellationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# cancellation report, dB re full scale amplitude {}", self.full_scale)?;
        writeln!(f, "band_lo_hz = {}", self.band.0)?;
        writeln!(f, "band_hi_hz = {}", self.band.1)?;
        writeln!(f, "power_before_db = {}", self.power_before)?;
        writeln!(f, "power_after_db = {}", self.power_after)?;
        writeln!(f, "reduction_db = {}", self.reduction)?;
        writeln!(f, "residual_peak_db = {}", self.residual_peak)?;
        writeln!(f, "full_scale = {}", self.full_scale)
    }
}

impl FromStr for CancellationReport {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = std::collections::HashMap::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("report line without '=': {line}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| invalid(format!("report value for {} is not a number", k.trim())))?;
            fields.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| invalid(format!("report lacks {k}")));
        Ok(Self {
            band: (get("band_lo_hz")?, get("band_hi_hz")?),
            power_before: get("power_before_db")?,
            power_after: get("power_after_db")?,
            reduction: get("reduction_db")?,
            residual_peak: get("residual_peak_db")?,
            full_scale: get("full_scale")?,
        })
    }
}

impl CancellationReport {
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_string())?;
        Ok(())
    }
}

/// Subtract a reconstructed harmonic and measure the band power either side.
///
/// Spectra are unpadded rectangular periodograms, so band powers obey
/// Parseval exactly; `full_scale` sets the dB reference amplitude.
pub fn cancel(
    saturated: &ComplexSignal,
    reconstructed: &ComplexSignal,
    band: (f64, f64),
    full_scale: f64,
) -> Result<(ComplexSignal, CancellationReport)> {
    let residual = saturated.sub(reconstructed)?;
    let nfft = saturated.len();
    let before = spectrum(saturated, nfft)?.with_full_scale(full_scale)?;
    let after = spectrum(&residual, nfft)?.with_full_scale(full_scale)?;
    let power_before = band_power(&before, band.0, band.1)?;
    let power_after = band_power(&after, band.0, band.1)?;
    let range = after.band_range(band.0, band.1)?;
    let residual_peak = after.psd_db[range].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let report = CancellationReport {
        band,
        power_before,
        power_after,
        reduction: power_before - power_after,
        residual_peak,
        full_scale,
    };
    Ok((residual, report))
}
