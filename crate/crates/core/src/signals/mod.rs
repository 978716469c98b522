//! LFM pulse generation and the complex baseband signal carrier.

mod io;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Error, Result};

pub use io::{read_binary, read_csv, write_binary, write_csv, MAGIC, VERSION};

/// Uniformly sampled complex baseband sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    samples: Vec<Complex64>,
    sample_rate: f64,
    t0: f64,
}

impl ComplexSignal {
    /// Zero-length signals are permitted here so they can be written to disk;
    /// processing operations reject them through [`ComplexSignal::ensure_non_empty`].
    pub fn new(samples: Vec<Complex64>, sample_rate: f64, t0: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(invalid(format!("sample_rate must be positive, got {sample_rate}")));
        }
        if !t0.is_finite() {
            return Err(invalid("t0 must be finite"));
        }
        Ok(Self { samples, sample_rate, t0 })
    }

    pub fn zeros(len: usize, sample_rate: f64, t0: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len], sample_rate, t0)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 / self.sample_rate
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(|k| self.time(k))
    }

    pub fn ensure_non_empty(&self) -> Result<()> {
        if self.samples.is_empty() {
            Err(invalid("signal has no samples"))
        } else {
            Ok(())
        }
    }

    /// Mean power `sum |x|^2 / N`.
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Energy `sum |x|^2 * dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dt()
    }

    pub fn peak_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_re(&self) -> f64 {
        self.samples.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.samples.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Apply `f` to each sample, keeping the time grid.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|&z| f(z)).collect(),
            sample_rate: self.sample_rate,
            t0: self.t0,
        }
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::ShapeMismatch(format!(
                "lengths differ: {} vs {}",
                self.samples.len(),
                other.samples.len()
            )));
        }
        if self.sample_rate != other.sample_rate {
            return Err(Error::ShapeMismatch(format!(
                "sample rates differ: {} vs {}",
                self.sample_rate, other.sample_rate
            )));
        }
        Ok(())
    }

    /// Sample-wise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            samples: self.samples.iter().zip(&other.samples).map(|(x, y)| x - y).collect(),
            sample_rate: self.sample_rate,
            t0: self.t0,
        })
    }
}

/// LFM pulse description.
///
/// The sweep direction follows the sign of `bandwidth`; a negative bandwidth
/// gives a down-chirp of width `|bandwidth|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpParams {
    pub f_center: f64,
    pub bandwidth: f64,
    pub pulse_width: f64,
    pub amplitude: f64,
    pub phase0: f64,
    /// Pulse start relative to the record start.
    pub delay: f64,
}

impl ChirpParams {
    pub fn new(f_center: f64, bandwidth: f64, pulse_width: f64, amplitude: f64) -> Self {
        Self { f_center, bandwidth, pulse_width, amplitude, phase0: 0.0, delay: 0.0 }
    }

    /// Chirp rate in Hz/s.
    pub fn chirp_rate(&self) -> f64 {
        self.bandwidth / self.pulse_width
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pulse_width > 0.0 && self.pulse_width.is_finite()) {
            return Err(invalid(format!("pulse_width must be positive, got {}", self.pulse_width)));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(invalid(format!("amplitude must be non-negative, got {}", self.amplitude)));
        }
        if !(self.f_center.is_finite() && self.bandwidth.is_finite() && self.phase0.is_finite()) {
            return Err(invalid("chirp parameters must be finite"));
        }
        if !(self.delay.is_finite()) {
            return Err(invalid("delay must be finite"));
        }
        Ok(())
    }

    /// Instantaneous phase at absolute time `t`, or `None` outside the pulse.
    ///
    /// `theta(t) = phase0 + 2 pi fc (t - tc) + pi K (t - tc)^2` with `tc` the
    /// pulse center, so `f_center` is the mid-pulse instantaneous frequency.
    pub fn phase_at(&self, t: f64, record_t0: f64, sample_rate: f64) -> Option<f64> {
        let start = record_t0 + self.delay;
        let tau = t - start;
        // half-sample guard so that exactly pulse_width * fs samples land inside
        let guard = 0.5 / sample_rate;
        if tau < -guard || tau >= self.pulse_width - guard {
            return None;
        }
        let u = tau - 0.5 * self.pulse_width;
        Some(self.phase0 + 2.0 * PI * self.f_center * u + PI * self.chirp_rate() * u * u)
    }

    /// Highest absolute instantaneous frequency of the sweep.
    pub fn max_abs_frequency(&self) -> f64 {
        self.f_center.abs() + 0.5 * self.bandwidth.abs()
    }
}

/// Instantaneous phase samples with a support mask (`None` where the pulse is off).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSeries {
    pub phase: Vec<Option<f64>>,
    pub sample_rate: f64,
    pub t0: f64,
}

impl PhaseSeries {
    pub fn len(&self) -> usize {
        self.phase.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phase.is_empty()
    }
}

/// Number of samples covering one pulse at `sample_rate`.
pub fn pulse_samples(p: &ChirpParams, sample_rate: f64) -> usize {
    (p.pulse_width * sample_rate).round() as usize
}

pub fn lfm_phase(p: &ChirpParams, sample_rate: f64, t0: f64, len: usize) -> Result<PhaseSeries> {
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(invalid(format!("sample_rate must be positive, got {sample_rate}")));
    }
    p.validate()?;
    let phase = (0..len)
        .map(|k| p.phase_at(t0 + k as f64 / sample_rate, t0, sample_rate))
        .collect();
    Ok(PhaseSeries { phase, sample_rate, t0 })
}

/// Generate an LFM pulse on a record of `len` samples starting at `t0`.
///
/// Samples are `amplitude * exp(j theta(t))` inside the pulse and zero
/// elsewhere. Sampling below the Nyquist rate of the sweep is allowed but
/// logged as a warning.
pub fn gen_lfm(p: &ChirpParams, sample_rate: f64, t0: f64, len: usize) -> Result<ComplexSignal> {
    let phase = lfm_phase(p, sample_rate, t0, len)?;
    if sample_rate < 2.0 * p.max_abs_frequency() {
        log::warn!(
            "sample rate {sample_rate} Hz is below twice the sweep extent {} Hz; the pulse will alias",
            p.max_abs_frequency()
        );
    }
    let samples = phase
        .phase
        .iter()
        .map(|th| match th {
            Some(th) => Complex64::from_polar(p.amplitude, *th),
            None => Complex64::new(0.0, 0.0),
        })
        .collect();
    ComplexSignal::new(samples, sample_rate, t0)
}

/// Convenience wrapper: one pulse, record exactly as long as the pulse.
pub fn gen_lfm_pulse(p: &ChirpParams, sample_rate: f64, t0: f64) -> Result<ComplexSignal> {
    gen_lfm(p, sample_rate, t0, pulse_samples(p, sample_rate))
}

/// Interference amplitude giving `20 log10(b / a) = isr_db`.
pub fn amplitude_from_isr(a: f64, isr_db: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("echo amplitude must be positive, got {a}")));
    }
    if !isr_db.is_finite() {
        return Err(invalid("ISR must be finite"));
    }
    Ok(a * 10f64.powf(isr_db / 20.0))
}

/// Sample-wise sum of echo and interference.
pub fn combine(e: &ComplexSignal, i: &ComplexSignal) -> Result<ComplexSignal> {
    e.check_same_grid(i)?;
    let samples = e.samples.iter().zip(&i.samples).map(|(x, y)| x + y).collect();
    ComplexSignal::new(samples, e.sample_rate, e.t0)
}

/// Add circular complex white Gaussian noise of total power `noise_power`.
pub fn add_noise(x: &ComplexSignal, noise_power: f64, seed: u64) -> Result<ComplexSignal> {
    if !(noise_power >= 0.0 && noise_power.is_finite()) {
        return Err(invalid(format!("noise power must be non-negative, got {noise_power}")));
    }
    if noise_power == 0.0 {
        return Ok(x.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, (0.5 * noise_power).sqrt())
        .map_err(|e| invalid(format!("noise distribution: {e}")))?;
    let samples = x
        .samples
        .iter()
        .map(|z| z + Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
        .collect();
    ComplexSignal::new(samples, x.sample_rate, x.t0)
}
