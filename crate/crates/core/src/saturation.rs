//! Receiver saturation operators.
//!
//! The ADC limits each of the in-phase and quadrature components to
//! `[-s_a, s_a]` independently: `csat(z) = sat(Re z) + j sat(Im z)`.
//! Magnitude clipping is deliberately not offered; the harmonic model is
//! built for the component-wise operator.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::signals::ComplexSignal;
use crate::special_fn::cos_over_w2_tail;
use crate::special_fn::quadrature::integrate_panels;

/// Clip level together with the saturation coefficient it corresponds to.
///
/// `s_a = coefficient_c * reference_peak`, with the reference peak taken as
/// the unsaturated maximum amplitude `a + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationConfig {
    pub s_a: f64,
    pub coefficient_c: f64,
    pub reference_peak: f64,
}

impl SaturationConfig {
    pub fn from_coefficient(c: f64, a: f64, b: f64) -> Result<Self> {
        let s_a = saturation_level(c, a, b)?;
        Ok(Self { s_a, coefficient_c: c, reference_peak: a + b })
    }

    /// An explicit clip level; the derived coefficient may exceed 1 when the
    /// level sits above the signal peak (no clipping).
    pub fn from_clip_level(s_a: f64, a: f64, b: f64) -> Result<Self> {
        check_clip_level(s_a)?;
        check_amplitudes(a, b)?;
        Ok(Self { s_a, coefficient_c: s_a / (a + b), reference_peak: a + b })
    }

    /// Exactly one of `s_a` and `c` must be given.
    pub fn resolve(s_a: Option<f64>, c: Option<f64>, a: f64, b: f64) -> Result<Self> {
        match (s_a, c) {
            (Some(s_a), None) => Self::from_clip_level(s_a, a, b),
            (None, Some(c)) => Self::from_coefficient(c, a, b),
            (Some(_), Some(_)) => {
                Err(invalid("give either the clip level s_a or the coefficient C, not both"))
            }
            (None, None) => Err(invalid("one of the clip level s_a or the coefficient C is required")),
        }
    }
}

fn check_clip_level(s_a: f64) -> Result<()> {
    if s_a > 0.0 && s_a.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("clip level must be positive and finite, got {s_a}")))
    }
}

fn check_amplitudes(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(invalid(format!("echo amplitude must be non-negative, got {a}")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(invalid(format!("interference amplitude must be positive, got {b}")));
    }
    Ok(())
}

/// `s_a = C (a + b)`.
pub fn saturation_level(c: f64, a: f64, b: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(invalid(format!("saturation coefficient must lie in (0, 1], got {c}")));
    }
    check_amplitudes(a, b)?;
    Ok(c * (a + b))
}

/// Scalar clip; values at exactly `+-s_a` map to the rail.
#[inline]
pub fn sat(x: f64, s_a: f64) -> f64 {
    x.clamp(-s_a, s_a)
}

#[inline]
pub fn csat(z: Complex64, s_a: f64) -> Complex64 {
    Complex64::new(sat(z.re, s_a), sat(z.im, s_a))
}

#[inline]
pub fn tanh_sat(x: f64, s_a: f64) -> f64 {
    s_a * (x / s_a).tanh()
}

#[inline]
pub fn ctanh_sat(z: Complex64, s_a: f64) -> Complex64 {
    Complex64::new(tanh_sat(z.re, s_a), tanh_sat(z.im, s_a))
}

pub fn hard_clip_complex(x: &ComplexSignal, s_a: f64) -> Result<ComplexSignal> {
    check_clip_level(s_a)?;
    x.ensure_non_empty()?;
    Ok(x.map(|z| csat(z, s_a)))
}

/// Component-wise `s_a tanh(u / s_a)`.
pub fn tanh_saturate(x: &ComplexSignal, s_a: f64) -> Result<ComplexSignal> {
    check_clip_level(s_a)?;
    x.ensure_non_empty()?;
    Ok(x.map(|z| ctanh_sat(z, s_a)))
}

const SAT_INITIAL_PANELS: usize = 64;
const SAT_MAX_PANELS: usize = 1 << 22;

/// Evaluate the clip through its integral representation
///
/// ```text
/// sat(x) = (2/pi) integral_0^inf sin(s_a w) sin(x w) / w^2 dw
/// ```
///
/// The finite part `[0, W]` is integrated with GK15 panels no wider than
/// `pi / (s_a + |x|)`; beyond `W` the product is split into
/// `cos((s_a -+ x) w) / w^2` and integrated in closed form. Panels are halved
/// until the quadrature estimate meets `tol`.
pub fn sat_integral_eval(x: f64, s_a: f64, tol: f64) -> Result<f64> {
    check_clip_level(s_a)?;
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !x.is_finite() {
        return Err(invalid("x must be finite"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ax = x.abs();
    let reach = SAT_INITIAL_PANELS as f64 * PI / (s_a + ax);
    let integrand = |w: f64, out: &mut [f64]| {
        out[0] = ((s_a * w).sin() / w) * ((ax * w).sin() / w);
    };
    let tail = 0.5 * (cos_over_w2_tail(s_a - ax, reach) - cos_over_w2_tail(s_a + ax, reach));

    let mut panels = SAT_INITIAL_PANELS;
    loop {
        let (v, e) = integrate_panels(&integrand, 1, reach / panels as f64, panels);
        let value = FRAC_2_PI * (v[0] + tail);
        let err = FRAC_2_PI * e[0];
        if err <= tol {
            return Ok(value.copysign(x));
        }
        if panels * 2 > SAT_MAX_PANELS {
            return Err(Error::Convergence { achieved: err, requested: tol });
        }
        panels *= 2;
    }
}
