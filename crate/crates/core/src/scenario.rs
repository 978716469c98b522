//! Experiment configuration and the simulate / decompose / cancel / compare
//! pipelines behind the command-line tool.
//!
//! Configuration files are flat `key = value` text with `#` comments. Keys
//! are case-insensitive and `-` is read as `_`; the value `none` unsets an
//! optional field.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{cancel, CancellationReport};
use crate::error::{invalid, Error, Result};
use crate::harmonic_model::{
    decompose, harmonic_term, reconstruct_harmonic, reconstruct_tanh_harmonic, tanh_harmonic_coeffs,
    DecompositionTable, HarmonicTerm,
};
use crate::saturation::{hard_clip_complex, SaturationConfig};
use crate::signals::{
    add_noise, amplitude_from_isr, combine, gen_lfm, lfm_phase, pulse_samples, ChirpParams,
    ComplexSignal, PhaseSeries,
};
use crate::special_fn::QuadratureSettings;

/// Extra width added on each side of a harmonic's sweep when deriving its band.
pub const BAND_MARGIN_HZ: f64 = 5e6;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub echo: ChirpParams,
    /// Interference pulse; its `amplitude` is ignored in favour of
    /// `interference_amplitude` / `isr_db`.
    pub interference: ChirpParams,
    pub interference_amplitude: Option<f64>,
    pub isr_db: Option<f64>,
    pub s_a: Option<f64>,
    pub coefficient_c: Option<f64>,
    pub sample_rate: f64,
    /// Record length in samples; `None` covers both pulses.
    pub record_len: Option<usize>,
    /// Complex white noise power added before saturation; 0 disables it.
    pub noise_power: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub max_order: u32,
    pub stft_window: usize,
    pub stft_hop: usize,
    /// Evaluation band; `None` derives it from the harmonic being cancelled.
    pub band: Option<(f64, f64)>,
    pub oracle_grid: usize,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            echo: ChirpParams::new(0.0, 5e6, 30e-6, 1.0),
            interference: ChirpParams::new(20e6, 10e6, 30e-6, 0.0),
            interference_amplitude: None,
            isr_db: Some(30.0),
            s_a: None,
            coefficient_c: Some(0.5),
            sample_rate: 400e6,
            record_len: None,
            noise_power: 0.0,
            seed: 0,
            output_dir: PathBuf::from("out"),
            max_order: 7,
            stft_window: 512,
            stft_hop: 64,
            band: None,
            oracle_grid: 1024,
            rel_tol: None,
            abs_tol: None,
        }
    }
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

fn is_none(value: &str) -> bool {
    value.trim().eq_ignore_ascii_case("none")
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("{key}: '{}' is not a number", value.trim())))?;
    if !v.is_finite() {
        return Err(invalid(format!("{key}: value must be finite")));
    }
    Ok(v)
}

fn parse_opt_f64(key: &str, value: &str) -> Result<Option<f64>> {
    if is_none(value) {
        Ok(None)
    } else {
        parse_f64(key, value).map(Some)
    }
}

fn parse_int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("{key}: '{}' is not a non-negative integer", value.trim())))
}

/// Every key understood by [`ScenarioConfig::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "echo_f_center",
    "echo_bandwidth",
    "echo_pulse_width",
    "echo_amplitude",
    "echo_phase0",
    "echo_delay",
    "interference_f_center",
    "interference_bandwidth",
    "interference_pulse_width",
    "interference_amplitude",
    "interference_phase0",
    "interference_delay",
    "isr_db",
    "s_a",
    "c",
    "sample_rate",
    "record_len",
    "noise_power",
    "seed",
    "output_dir",
    "max_order",
    "stft_window",
    "stft_hop",
    "band_lo",
    "band_hi",
    "oracle_grid",
    "rel_tol",
    "abs_tol",
];

impl ScenarioConfig {
    /// Set one field from its textual form.
    ///
    /// Giving the interference amplitude clears the ISR and vice versa; the
    /// same holds for `s_a` and `c`. Use [`Self::apply`] to detect both
    /// members of a pair given together.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = normalize_key(key);
        let k = key.as_str();
        match k {
            "echo_f_center" => self.echo.f_center = parse_f64(k, value)?,
            "echo_bandwidth" => self.echo.bandwidth = parse_f64(k, value)?,
            "echo_pulse_width" => self.echo.pulse_width = parse_f64(k, value)?,
            "echo_amplitude" | "a" => self.echo.amplitude = parse_f64(k, value)?,
            "echo_phase0" => self.echo.phase0 = parse_f64(k, value)?,
            "echo_delay" => self.echo.delay = parse_f64(k, value)?,
            "interference_f_center" => self.interference.f_center = parse_f64(k, value)?,
            "interference_bandwidth" => self.interference.bandwidth = parse_f64(k, value)?,
            "interference_pulse_width" => self.interference.pulse_width = parse_f64(k, value)?,
            "interference_phase0" => self.interference.phase0 = parse_f64(k, value)?,
            "interference_delay" => self.interference.delay = parse_f64(k, value)?,
            "interference_amplitude" | "b" => {
                self.interference_amplitude = parse_opt_f64(k, value)?;
                if self.interference_amplitude.is_some() {
                    self.isr_db = None;
                }
            }
            "isr_db" | "isr" => {
                self.isr_db = parse_opt_f64(k, value)?;
                if self.isr_db.is_some() {
                    self.interference_amplitude = None;
                }
            }
            "s_a" => {
                self.s_a = parse_opt_f64(k, value)?;
                if self.s_a.is_some() {
                    self.coefficient_c = None;
                }
            }
            "c" | "coefficient_c" | "saturation_coefficient" => {
                self.coefficient_c = parse_opt_f64(k, value)?;
                if self.coefficient_c.is_some() {
                    self.s_a = None;
                }
            }
            "sample_rate" | "fs" => self.sample_rate = parse_f64(k, value)?,
            "record_len" => {
                self.record_len = if is_none(value) { None } else { Some(parse_int(k, value)?) }
            }
            "noise_power" => self.noise_power = parse_f64(k, value)?,
            "seed" => self.seed = parse_int(k, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value.trim()),
            "max_order" => self.max_order = parse_int(k, value)?,
            "stft_window" => self.stft_window = parse_int(k, value)?,
            "stft_hop" => self.stft_hop = parse_int(k, value)?,
            "band_lo" | "band_hi" => {
                if is_none(value) {
                    self.band = None;
                } else {
                    let v = parse_f64(k, value)?;
                    let default = self.derived_band(0, 3);
                    let (lo, hi) = self.band.unwrap_or(default);
                    self.band = Some(if k == "band_lo" { (v, hi) } else { (lo, v) });
                }
            }
            "oracle_grid" => self.oracle_grid = parse_int(k, value)?,
            "rel_tol" => self.rel_tol = parse_opt_f64(k, value)?,
            "abs_tol" => self.abs_tol = parse_opt_f64(k, value)?,
            _ => return Err(invalid(format!("unknown configuration key '{k}'"))),
        }
        Ok(())
    }

    /// Apply a batch of settings from one source (a file or a set of flags).
    pub fn apply<K: AsRef<str>, V: AsRef<str>>(&mut self, pairs: &[(K, V)]) -> Result<()> {
        let given = |names: &[&str]| {
            pairs.iter().any(|(k, v)| names.contains(&normalize_key(k.as_ref()).as_str()) && !is_none(v.as_ref()))
        };
        if given(&["interference_amplitude", "b"]) && given(&["isr_db", "isr"]) {
            return Err(invalid("give either interference_amplitude or isr_db, not both"));
        }
        if given(&["s_a"]) && given(&["c", "coefficient_c", "saturation_coefficient"]) {
            return Err(invalid("give either s_a or c, not both"));
        }
        for (k, v) in pairs {
            self.set(k.as_ref(), v.as_ref())?;
        }
        Ok(())
    }

    pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected 'key = value'", lineno + 1)))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply(&Self::parse_pairs(text)?)?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn quadrature(&self, s_a: f64) -> QuadratureSettings {
        let mut q = QuadratureSettings::for_clip_level(s_a);
        if let Some(r) = self.rel_tol {
            q.rel_tol = r;
        }
        if let Some(a) = self.abs_tol {
            q.abs_tol = a;
        }
        q
    }

    /// Band covering harmonic `(m, n)`'s sweep plus [`BAND_MARGIN_HZ`].
    pub fn derived_band(&self, m: u32, n: u32) -> (f64, f64) {
        harmonic_band(&self.echo, &self.interference, m, n)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let a = self.echo.amplitude;
        if !(a >= 0.0 && a.is_finite()) {
            return Err(invalid(format!("echo_amplitude must be non-negative, got {a}")));
        }
        let b = match (self.interference_amplitude, self.isr_db) {
            (Some(b), None) => b,
            (None, Some(isr)) => amplitude_from_isr(a, isr)?,
            (Some(_), Some(_)) => {
                return Err(invalid("give either interference_amplitude or isr_db, not both"))
            }
            (None, None) => return Err(invalid("one of interference_amplitude or isr_db is required")),
        };
        if !(b > 0.0 && b.is_finite()) {
            return Err(invalid(format!("interference amplitude must be positive, got {b}")));
        }
        let saturation = SaturationConfig::resolve(self.s_a, self.coefficient_c, a, b)?;
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(invalid(format!("sample_rate must be positive, got {}", self.sample_rate)));
        }
        if !(self.noise_power >= 0.0) {
            return Err(invalid("noise_power must be non-negative"));
        }
        if self.max_order < 1 {
            return Err(invalid("max_order must be at least 1"));
        }
        if self.stft_hop == 0 || self.stft_hop > self.stft_window {
            return Err(invalid("need 0 < stft_hop <= stft_window"));
        }
        if let Some((lo, hi)) = self.band {
            if !(lo < hi) {
                return Err(invalid(format!("band_lo {lo} must be below band_hi {hi}")));
            }
        }
        let echo = ChirpParams { amplitude: a, ..self.echo };
        let interference = ChirpParams { amplitude: b, ..self.interference };
        echo.validate().map_err(|e| invalid(format!("echo: {e}")))?;
        interference.validate().map_err(|e| invalid(format!("interference: {e}")))?;
        let fs = self.sample_rate;
        let span = |p: &ChirpParams| ((p.delay.max(0.0)) * fs).round() as usize + pulse_samples(p, fs);
        let record_len = self.record_len.unwrap_or_else(|| span(&echo).max(span(&interference)));
        if record_len == 0 {
            return Err(invalid("record_len must be positive"));
        }
        Ok(Resolved {
            a,
            b,
            isr_db: if a > 0.0 { 20.0 * (b / a).log10() } else { f64::INFINITY },
            saturation,
            echo,
            interference,
            sample_rate: fs,
            record_len,
            noise_power: self.noise_power,
            seed: self.seed,
            quadrature: self.quadrature(saturation.s_a),
        })
    }
}

/// Band covering harmonic `(m, n)`'s sweep, for echo `e` and interference `i`.
pub fn harmonic_band(e: &ChirpParams, i: &ChirpParams, m: u32, n: u32) -> (f64, f64) {
    let probe = HarmonicTerm::from_a2(crate::special_fn::A2Estimate {
        m,
        n,
        value: 1.0,
        error_estimate: 0.0,
        tail_bound: 0.0,
        cutoff: 0.0,
        panels: 0,
        converged: true,
    });
    let comps: Vec<(i64, i64)> = match probe {
        Ok(t) => t.components().into_iter().map(|c| c.0).collect(),
        Err(_) => vec![(m as i64, n as i64)],
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (p, q) in comps {
        let (p, q) = (p as f64, q as f64);
        let center = p * e.f_center + q * i.f_center;
        let half = 0.5 * (p.abs() * e.bandwidth.abs() + q.abs() * i.bandwidth.abs());
        lo = lo.min(center - half);
        hi = hi.max(center + half);
    }
    (lo - BAND_MARGIN_HZ, hi + BAND_MARGIN_HZ)
}

/// Fully resolved scenario parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub a: f64,
    pub b: f64,
    pub isr_db: f64,
    pub saturation: SaturationConfig,
    pub echo: ChirpParams,
    pub interference: ChirpParams,
    pub sample_rate: f64,
    pub record_len: usize,
    pub noise_power: f64,
    pub seed: u64,
    pub quadrature: QuadratureSettings,
}

impl Resolved {
    pub fn s_a(&self) -> f64 {
        self.saturation.s_a
    }

    /// Full-scale reference amplitude `a + b` used for every dB figure.
    pub fn full_scale(&self) -> f64 {
        self.a + self.b
    }

    /// Run manifest as `key = value` lines.
    pub fn manifest(&self) -> String {
        let mut out = String::from("# resolved scenario\n");
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        kv("a", self.a.to_string());
        kv("b", self.b.to_string());
        kv("s_a", self.s_a().to_string());
        kv("c", self.saturation.coefficient_c.to_string());
        kv("sample_rate", self.sample_rate.to_string());
        kv("isr_db", self.isr_db.to_string());
        kv("record_len", self.record_len.to_string());
        kv("full_scale", self.full_scale().to_string());
        for (name, p) in [("echo", &self.echo), ("interference", &self.interference)] {
            kv(&format!("{name}_f_center"), p.f_center.to_string());
            kv(&format!("{name}_bandwidth"), p.bandwidth.to_string());
            kv(&format!("{name}_pulse_width"), p.pulse_width.to_string());
            kv(&format!("{name}_phase0"), p.phase0.to_string());
            kv(&format!("{name}_delay"), p.delay.to_string());
        }
        kv("noise_power", self.noise_power.to_string());
        kv("seed", self.seed.to_string());
        kv("rel_tol", self.quadrature.rel_tol.to_string());
        kv("abs_tol", self.quadrature.abs_tol.to_string());
        out
    }
}

/// Signals of one simulated pulse pair.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub resolved: Resolved,
    pub echo: ComplexSignal,
    pub interference: ComplexSignal,
    pub unsaturated: ComplexSignal,
    pub saturated: ComplexSignal,
    pub phi: PhaseSeries,
    pub xi: PhaseSeries,
}

pub fn simulate(r: &Resolved) -> Result<Simulation> {
    let (fs, len) = (r.sample_rate, r.record_len);
    let echo = gen_lfm(&r.echo, fs, 0.0, len)?;
    let interference = gen_lfm(&r.interference, fs, 0.0, len)?;
    let mut unsaturated = combine(&echo, &interference)?;
    if r.noise_power > 0.0 {
        unsaturated = add_noise(&unsaturated, r.noise_power, r.seed)?;
    }
    let saturated = hard_clip_complex(&unsaturated, r.s_a())?;
    Ok(Simulation {
        resolved: r.clone(),
        phi: lfm_phase(&r.echo, fs, 0.0, len)?,
        xi: lfm_phase(&r.interference, fs, 0.0, len)?,
        echo,
        interference,
        unsaturated,
        saturated,
    })
}

pub fn decompose_scenario(r: &Resolved, max_order: u32) -> Result<DecompositionTable> {
    decompose(r.a, r.b, r.s_a(), max_order, &r.quadrature)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CancelModel {
    Bessel,
    Tanh,
}

impl fmt::Display for CancelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Bessel => "bessel",
            Self::Tanh => "tanh",
        })
    }
}

impl std::str::FromStr for CancelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bessel" => Ok(Self::Bessel),
            "tanh" => Ok(Self::Tanh),
            other => Err(invalid(format!("unknown model '{other}', expected bessel or tanh"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CancelOutcome {
    pub model: CancelModel,
    pub m: u32,
    pub n: u32,
    /// Weight on the reconstructed harmonic's Fourier component.
    pub coefficient: f64,
    pub reconstruction: ComplexSignal,
    pub residual: ComplexSignal,
    pub report: CancellationReport,
}

/// Reconstruct harmonic `(m, n)` with the chosen model and subtract it.
pub fn cancel_harmonic(
    sim: &Simulation,
    m: u32,
    n: u32,
    model: CancelModel,
    band: Option<(f64, f64)>,
) -> Result<CancelOutcome> {
    let r = &sim.resolved;
    let band = band.unwrap_or_else(|| harmonic_band(&r.echo, &r.interference, m, n));
    let (coefficient, reconstruction) = match model {
        CancelModel::Bessel => {
            let term = harmonic_term(m, n, r.a, r.b, r.s_a(), &r.quadrature)?;
            (term.combined_coefficient(), reconstruct_harmonic(&term, &sim.phi, &sim.xi)?)
        }
        CancelModel::Tanh => {
            if m != 0 {
                return Err(Error::Unsupported(format!(
                    "tanh model covers interference harmonics (0, 1), (0, 3), (0, 5) only, got ({m}, {n})"
                )));
            }
            let coeffs = tanh_harmonic_coeffs(r.b, r.saturation.coefficient_c)?;
            let (_, w) = coeffs.component(n)?;
            (w, reconstruct_tanh_harmonic(&coeffs, n, &sim.xi)?)
        }
    };
    let (residual, report) = cancel(&sim.saturated, &reconstruction, band, r.full_scale())?;
    Ok(CancelOutcome { model, m, n, coefficient, reconstruction, residual, report })
}

/// Sum of every decomposition term with a component centered inside `band`.
///
/// Used to show how much of a band's power the full model accounts for.
pub fn reconstruct_in_band(
    sim: &Simulation,
    table: &DecompositionTable,
    band: (f64, f64),
) -> Result<(ComplexSignal, Vec<(u32, u32)>)> {
    let r = &sim.resolved;
    let mut acc = ComplexSignal::zeros(r.record_len, r.sample_rate, 0.0)?;
    let mut used = Vec::new();
    for t in &table.entries {
        let hit = t.components().iter().any(|&((p, q), _)| {
            let f = p as f64 * r.echo.f_center + q as f64 * r.interference.f_center;
            f >= band.0 && f <= band.1
        });
        if hit {
            let part = reconstruct_harmonic(t, &sim.phi, &sim.xi)?;
            acc = combine(&acc, &part)?;
            used.push((t.m, t.n));
        }
    }
    Ok((acc, used))
}

/// Bessel and tanh cancellation of the same interference harmonic.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub n: u32,
    pub bessel: CancelOutcome,
    pub tanh: CancelOutcome,
}

impl Comparison {
    /// How many dB more the Bessel reconstruction removes.
    pub fn gap_db(&self) -> f64 {
        self.bessel.report.reduction - self.tanh.report.reduction
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (b, t) = (&self.bessel.report, &self.tanh.report);
        writeln!(f, "# model comparison for harmonic (0, {}), dB re full scale amplitude {}", self.n, b.full_scale)?;
        writeln!(f, "band_lo_hz = {}", b.band.0)?;
        writeln!(f, "band_hi_hz = {}", b.band.1)?;
        writeln!(f, "bessel_coefficient = {}", self.bessel.coefficient)?;
        writeln!(f, "tanh_coefficient = {}", self.tanh.coefficient)?;
        writeln!(f, "power_before_db = {}", b.power_before)?;
        writeln!(f, "bessel_power_after_db = {}", b.power_after)?;
        writeln!(f, "tanh_power_after_db = {}", t.power_after)?;
        writeln!(f, "bessel_reduction_db = {}", b.reduction)?;
        writeln!(f, "tanh_reduction_db = {}", t.reduction)?;
        writeln!(f, "gap_db = {}", self.gap_db())
    }
}

pub fn compare(sim: &Simulation, n: u32, band: Option<(f64, f64)>) -> Result<Comparison> {
    Ok(Comparison {
        n,
        bessel: cancel_harmonic(sim, 0, n, CancelModel::Bessel, band)?,
        tanh: cancel_harmonic(sim, 0, n, CancelModel::Tanh, band)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{band_power, spectrum};

    #[test]
    fn defaults_reproduce_reference_setup() {
        let r = ScenarioConfig::default().resolve().unwrap();
        assert_eq!(r.a, 1.0);
        assert!((r.b - 31.62).abs() < 0.01);
        assert!((r.s_a() - 16.31).abs() < 0.01);
        assert_eq!(r.record_len, 12000);
        let m = r.manifest();
        assert!(m.contains("a = 1\n"));
        assert!(m.contains("s_a = 16.31"));
        assert!(m.contains("sample_rate = 400000000\n"));
        assert_eq!(ScenarioConfig::default().derived_band(0, 3), (-80e6, -40e6));
    }

    #[test]
    fn config_text_parsing() {
        let text = "# comment\nisr-db = 0\nC = 0.9   # trailing\n\nSAMPLE_RATE = 1e8\nband_lo = -50e6\n";
        let cfg = ScenarioConfig::from_text(text).unwrap();
        assert_eq!(cfg.isr_db, Some(0.0));
        assert_eq!(cfg.coefficient_c, Some(0.9));
        assert_eq!(cfg.sample_rate, 1e8);
        assert_eq!(cfg.band, Some((-50e6, -40e6)));
        let r = cfg.resolve().unwrap();
        assert!((r.s_a() - 1.8).abs() < 1e-12);

        assert!(ScenarioConfig::from_text("bogus = 1").is_err());
        assert!(ScenarioConfig::from_text("seed = x").is_err());
        assert!(ScenarioConfig::from_text("just text").is_err());
        assert!(ScenarioConfig::from_text("s_a = 2\nc = 0.5").is_err());
        assert!(ScenarioConfig::from_text("isr_db = 10\ninterference_amplitude = 3").is_err());
        let cfg = ScenarioConfig::from_text("s_a = 2").unwrap();
        assert_eq!((cfg.s_a, cfg.coefficient_c), (Some(2.0), None));
        let cfg = ScenarioConfig::from_text("isr_db = none").unwrap();
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn unity_coefficient_is_transparent() {
        let mut cfg = ScenarioConfig::default();
        cfg.set("c", "1").unwrap();
        cfg.set("record_len", "2000").unwrap();
        let sim = simulate(&cfg.resolve().unwrap()).unwrap();
        assert_eq!(sim.saturated, sim.unsaturated);
    }

    #[test]
    fn rail_value_at_low_isr() {
        let cfg = ScenarioConfig::from_text("isr_db = 0\nc = 0.9\nrecord_len = 4000").unwrap();
        let sim = simulate(&cfg.resolve().unwrap()).unwrap();
        assert!((sim.saturated.max_abs_re() - 1.8).abs() < 1e-12);
    }

    #[test]
    fn simulated_third_harmonic_stands_out() {
        let sim = simulate(&ScenarioConfig::default().resolve().unwrap()).unwrap();
        let s = spectrum(&sim.saturated, sim.saturated.len()).unwrap();
        let inband = band_power(&s, -75e6, -45e6).unwrap() - 10.0 * (30e6 / s.df).log10();
        let floor = band_power(&s, 150e6, 160e6).unwrap() - 10.0 * (10e6 / s.df).log10();
        assert!(inband - s.median_db() >= 20.0);
        assert!(inband > floor);
    }

    #[test]
    fn tanh_rejects_cross_terms() {
        let cfg = ScenarioConfig::from_text("record_len = 1000").unwrap();
        let sim = simulate(&cfg.resolve().unwrap()).unwrap();
        assert!(matches!(
            cancel_harmonic(&sim, 1, 2, CancelModel::Tanh, None),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            cancel_harmonic(&sim, 0, 7, CancelModel::Tanh, None),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            cancel_harmonic(&sim, 0, 2, CancelModel::Bessel, None),
            Err(Error::Parity { .. })
        ));
    }

    #[test]
    fn nothing_to_cancel_without_clipping() {
        let cfg = ScenarioConfig::from_text("c = 1\nrecord_len = 4000").unwrap();
        let sim = simulate(&cfg.resolve().unwrap()).unwrap();
        let out = cancel_harmonic(&sim, 0, 3, CancelModel::Bessel, None).unwrap();
        assert!(out.reconstruction.mean_power() < 1e-12);
        assert!(out.report.reduction.abs() < 1e-6);
    }

    #[test]
    fn harmonic_bands() {
        let cfg = ScenarioConfig::default();
        let (lo, hi) = cfg.derived_band(0, 1);
        assert_eq!((lo, hi), (10e6, 30e6));
        let (lo, hi) = cfg.derived_band(1, 2);
        assert!(lo <= -52.5e6 && hi >= 52.5e6);
    }
}
