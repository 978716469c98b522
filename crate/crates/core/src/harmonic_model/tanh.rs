//! Interference harmonics of the truncated tanh saturation model.
//!
//! Expanding `s_a tanh(u / s_a)` to fifth order around a single tone of
//! amplitude `b` with `s_a = C b` gives
//!
//! ```text
//! c1 = b - b/(4C^2) + b/(12C^4)      on exp(+j xi)
//! c3 = -(b/(12C^2) - b/(24C^4))      on exp(-j 3 xi)
//! c5 = b/(120C^4)                    on exp(+j 5 xi)
//! ```
//!
//! The signs are kept exactly as written above; comparisons against other
//! models are made on magnitudes.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::signals::{ComplexSignal, PhaseSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhCoefficients {
    pub c1: f64,
    pub c3: f64,
    pub c5: f64,
}

impl TanhCoefficients {
    /// `(q, weight)` of `exp(j q xi)` for interference order `n`.
    pub fn component(&self, n: u32) -> Result<(i64, f64)> {
        match n {
            1 => Ok((1, self.c1)),
            3 => Ok((-3, self.c3)),
            5 => Ok((5, self.c5)),
            _ => Err(Error::Unsupported(format!(
                "tanh model provides interference orders 1, 3 and 5 only, got {n}"
            ))),
        }
    }
}

pub fn tanh_harmonic_coeffs(b: f64, c: f64) -> Result<TanhCoefficients> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(invalid(format!("interference amplitude must be positive, got {b}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid(format!("saturation coefficient must be positive, got {c}")));
    }
    let c2 = c * c;
    let c4 = c2 * c2;
    Ok(TanhCoefficients {
        c1: b - b / (4.0 * c2) + b / (12.0 * c4),
        c3: -(b / (12.0 * c2) - b / (24.0 * c4)),
        c5: b / (120.0 * c4),
    })
}

/// Time series of the tanh-model harmonic `(0, n)`; zero where the
/// interference pulse is absent.
pub fn reconstruct_tanh_harmonic(
    coeffs: &TanhCoefficients,
    n: u32,
    xi: &PhaseSeries,
) -> Result<ComplexSignal> {
    let (q, weight) = coeffs.component(n)?;
    let samples = xi
        .phase
        .iter()
        .map(|x| match x {
            Some(x) => Complex64::new(0.0, q as f64 * x).exp() * weight,
            None => Complex64::new(0.0, 0.0),
        })
        .collect();
    ComplexSignal::new(samples, xi.sample_rate, xi.t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{lfm_phase, ChirpParams};

    #[test]
    fn reference_scenario() {
        let b = 10f64.powf(1.5);
        let t = tanh_harmonic_coeffs(b, 0.5).unwrap();
        assert!((t.c3.abs() - 10.53).abs() <= 0.02, "c3 = {}", t.c3);
        assert!(t.c3 > 0.0);
        assert!((t.c5 - 4.216).abs() < 1e-3);
        assert!((t.c1 - b * (1.0 - 1.0 + 4.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn vanishing_saturation() {
        let t = tanh_harmonic_coeffs(2.0, 100.0).unwrap();
        assert!(t.c3.abs() < 1e-4 && t.c5.abs() < 1e-9);
        assert!((t.c1 - 2.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_input_and_orders() {
        assert!(tanh_harmonic_coeffs(0.0, 0.5).is_err());
        assert!(tanh_harmonic_coeffs(1.0, -0.5).is_err());
        let t = tanh_harmonic_coeffs(1.0, 0.5).unwrap();
        assert!(matches!(t.component(7), Err(Error::Unsupported(_))));
        assert_eq!(t.component(3).unwrap().0, -3);
    }

    #[test]
    fn reconstruction_follows_phase() {
        let mut i = ChirpParams::new(5e6, 2e6, 1e-6, 3.0);
        i.delay = 1e-6;
        let xi = lfm_phase(&i, 100e6, 0.0, 300).unwrap();
        let t = tanh_harmonic_coeffs(3.0, 0.5).unwrap();
        let r = reconstruct_tanh_harmonic(&t, 3, &xi).unwrap();
        for (z, x) in r.samples().iter().zip(&xi.phase) {
            match x {
                Some(x) => {
                    assert!((z - Complex64::new(0.0, -3.0 * x).exp() * t.c3).norm() < 1e-12)
                }
                None => assert_eq!(z.norm(), 0.0),
            }
        }
        assert!(r.samples()[..100].iter().all(|z| z.norm() == 0.0));
    }
}
