//! Fixed-width Gauss-Kronrod panel quadrature for oscillatory integrands on a
//! truncated half line.

use rayon::prelude::*;

use crate::error::{invalid, Result};

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss weights
// (QUADPACK qk15).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Quadrature controls for the half-line oscillatory integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Upper truncation of the half-line integral. `None` derives it from the
    /// integrand's envelope so the tail bound stays below `abs_tol / 2`.
    pub tail_cutoff: Option<f64>,
}

impl QuadratureSettings {
    /// Defaults scaled to a clip level: `rel_tol = 1e-6`, `abs_tol = 1e-9 * s_a`.
    pub fn for_clip_level(s_a: f64) -> Self {
        Self { abs_tol: 1e-9 * s_a.abs().max(f64::MIN_POSITIVE), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(invalid("quadrature tolerances must be positive"));
        }
        if self.max_panels == 0 {
            return Err(invalid("max_panels must be at least 1"));
        }
        if let Some(w) = self.tail_cutoff {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("tail cutoff must be positive and finite"));
            }
        }
        Ok(())
    }

    pub(crate) fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-9, max_panels: 2_000_000, tail_cutoff: None }
    }
}

/// Integrate a vector-valued integrand over `[lo, hi]` with one GK15 panel.
/// `f(w, out)` writes `dim` values; `value`/`error` are accumulated into.
fn gk15_panel<F>(f: &F, lo: f64, hi: f64, scratch: &mut [f64], value: &mut [f64], error: &mut [f64])
where
    F: Fn(f64, &mut [f64]),
{
    let dim = value.len();
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];

    f(center, scratch);
    for d in 0..dim {
        kron[d] = WGK[7] * scratch[d];
        gauss[d] = WG[3] * scratch[d];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let w_k = WGK[j];
        let w_g = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        f(center - dx, scratch);
        for d in 0..dim {
            kron[d] += w_k * scratch[d];
            gauss[d] += w_g * scratch[d];
        }
        f(center + dx, scratch);
        for d in 0..dim {
            kron[d] += w_k * scratch[d];
            gauss[d] += w_g * scratch[d];
        }
    }
    for d in 0..dim {
        value[d] += kron[d] * half;
        error[d] += ((kron[d] - gauss[d]) * half).abs();
    }
}

/// Sum of GK15 panels of equal `width` covering `[0, n_panels * width]`.
///
/// Returns per-component `(value, error_estimate)`. Panels are processed in
/// parallel but combined in a fixed order, so results are deterministic.
pub fn integrate_panels<F>(f: &F, dim: usize, width: f64, n_panels: usize) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    const CHUNK: usize = 512;
    let n_chunks = n_panels.div_ceil(CHUNK);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut value = vec![0.0; dim];
            let mut error = vec![0.0; dim];
            let mut scratch = vec![0.0; dim];
            let end = ((c + 1) * CHUNK).min(n_panels);
            for p in c * CHUNK..end {
                let lo = p as f64 * width;
                gk15_panel(f, lo, lo + width, &mut scratch, &mut value, &mut error);
            }
            (value, error)
        })
        .collect();

    let mut value = vec![0.0; dim];
    let mut error = vec![0.0; dim];
    for (v, e) in partial {
        for d in 0..dim {
            value[d] += v[d];
            error[d] += e[d];
        }
    }
    (value, error)
}

/// Scalar convenience over an arbitrary interval split into `n_panels`.
pub fn integrate_interval<F>(f: F, lo: f64, hi: f64, n_panels: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64 + Sync,
{
    let width = (hi - lo) / n_panels as f64;
    let shifted = |w: f64, out: &mut [f64]| out[0] = f(lo + w);
    let (v, e) = integrate_panels(&shifted, 1, width, n_panels);
    (v[0], e[0])
}
