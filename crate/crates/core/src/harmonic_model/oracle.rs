//! Brute-force two-phase Fourier projection of the saturated two-tone signal
//!
//! ```text
//! C(p, q) = (1/(2 pi)^2) integral integral S(a e^{j phi} + b e^{j xi})
//!           exp(-j (p phi + q xi)) dphi dxi
//! ```
//!
//! sampled on a uniform periodic grid, where the trapezoidal rule converges
//! spectrally. One 2-D FFT of the grid yields every `(p, q)` at once.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::saturation::{csat, ctanh_sat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SaturationOperator {
    Hard,
    Tanh,
}

impl SaturationOperator {
    pub fn apply(self, z: Complex64, s_a: f64) -> Complex64 {
        match self {
            Self::Hard => csat(z, s_a),
            Self::Tanh => ctanh_sat(z, s_a),
        }
    }
}

impl fmt::Display for SaturationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hard => "hard",
            Self::Tanh => "tanh",
        })
    }
}

impl FromStr for SaturationOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hard" => Ok(Self::Hard),
            "tanh" => Ok(Self::Tanh),
            other => Err(invalid(format!("unknown saturation operator '{other}'"))),
        }
    }
}

/// All two-phase Fourier coefficients of one saturated grid.
#[derive(Debug, Clone)]
pub struct PhaseAverageOracle {
    grid_n: usize,
    /// Row `i` holds phi-frequency `i`, column `k` xi-frequency `k`, both mod `grid_n`.
    coeffs: Vec<Complex64>,
}

impl PhaseAverageOracle {
    pub fn new(a: f64, b: f64, s_a: f64, grid_n: usize, operator: SaturationOperator) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite() && b >= 0.0 && b.is_finite()) {
            return Err(invalid("amplitudes must be finite and non-negative"));
        }
        if !(s_a > 0.0 && s_a.is_finite()) {
            return Err(invalid(format!("clip level must be positive, got {s_a}")));
        }
        if grid_n < 4 {
            return Err(invalid(format!("grid_n must be at least 4, got {grid_n}")));
        }
        let n = grid_n;
        let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
        let step = TAU / n as f64;
        let tone: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, k as f64 * step)).collect();
        let norm = 1.0 / (n as f64 * n as f64);

        // rows: fixed phi, transform over xi
        let mut grid = vec![Complex64::new(0.0, 0.0); n * n];
        grid.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let echo = tone[i] * a;
            for (slot, t) in row.iter_mut().zip(&tone) {
                *slot = operator.apply(echo + t * b, s_a) * norm;
            }
            fft.process(row);
        });

        // columns: transpose, transform over phi, transpose back
        let mut cols = vec![Complex64::new(0.0, 0.0); n * n];
        cols.par_chunks_mut(n).enumerate().for_each(|(k, col)| {
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = grid[i * n + k];
            }
            fft.process(col);
        });
        grid.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = cols[k * n + i];
            }
        });
        Ok(Self { grid_n, coeffs: grid })
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    /// Largest `|p| + |q|` the grid resolves: `grid_n / 4 - 1`.
    pub fn max_resolved_order(&self) -> i64 {
        (self.grid_n / 4) as i64 - 1
    }

    /// Coefficient of `exp(j (p phi + q xi))`.
    pub fn coefficient(&self, p: i64, q: i64) -> Result<Complex64> {
        let order = p.abs() + q.abs();
        if order > self.max_resolved_order() {
            return Err(invalid(format!(
                "grid {} resolves |p| + |q| <= {}, asked for ({p}, {q})",
                self.grid_n,
                self.max_resolved_order()
            )));
        }
        let n = self.grid_n as i64;
        let i = p.rem_euclid(n) as usize;
        let k = q.rem_euclid(n) as usize;
        Ok(self.coeffs[i * self.grid_n + k])
    }
}

/// Single oracle coefficient; see [`PhaseAverageOracle`] for many.
pub fn phase_average_oracle(
    p: i64,
    q: i64,
    a: f64,
    b: f64,
    s_a: f64,
    grid_n: usize,
    operator: SaturationOperator,
) -> Result<Complex64> {
    let need = 4 * (p.unsigned_abs() + q.unsigned_abs() + 1) as usize;
    if grid_n < need {
        return Err(invalid(format!("grid_n {grid_n} too coarse for ({p}, {q}); need {need}")));
    }
    PhaseAverageOracle::new(a, b, s_a, grid_n, operator)?.coefficient(p, q)
}
