//! The Bessel-product weight integral
//!
//! ```text
//! A2(m, n) = integral_{-inf}^{inf} sin(s_a w) / w^2 * J_m(a w) J_n(b w) dw
//! ```
//!
//! For `m + n` odd the integrand is even in `w`, so the half-line integral is
//! doubled; for `m + n` even it is odd and the integral vanishes identically.
//! The half line is cut into GK15 panels of width `pi / (s_a + a + b)`, no
//! wider than half the fastest oscillation, and truncated at a cutoff `W`
//! where the envelope bound
//! `(1/w^2) sqrt(2/(pi a w)) sqrt(2/(pi b w))` integrates to below `abs_tol/2`.

use std::f64::consts::PI;

use super::bessel::{bessel_j_orders_into, j1_over_x};
use super::quadrature::{integrate_panels, QuadratureSettings};
use crate::error::{invalid, Error, Result};

/// Highest Bessel order the batch integrator handles.
pub const MAX_ORDER: u32 = 63;

/// Envelope slack over the leading Hankel amplitude.
const ENVELOPE_SLACK: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A2Estimate {
    pub m: u32,
    pub n: u32,
    pub value: f64,
    /// Quadrature error plus the analytic tail bound beyond the cutoff.
    pub error_estimate: f64,
    pub tail_bound: f64,
    pub cutoff: f64,
    pub panels: usize,
    pub converged: bool,
}

impl A2Estimate {
    pub fn into_result(self, q: &QuadratureSettings) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Convergence {
                achieved: self.error_estimate,
                requested: q.tolerance_for(self.value),
            })
        }
    }
}

fn check_inputs(a: f64, b: f64, s_a: f64) -> Result<()> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(invalid(format!("echo amplitude must be non-negative, got {a}")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(invalid(format!("interference amplitude must be positive, got {b}")));
    }
    if !(s_a > 0.0 && s_a.is_finite()) {
        return Err(invalid(format!("clip level must be positive, got {s_a}")));
    }
    Ok(())
}

/// Single `A2(m, n)` value; fails on even parity or non-convergence.
pub fn a2_integral(m: u32, n: u32, a: f64, b: f64, s_a: f64, q: &QuadratureSettings) -> Result<f64> {
    let est = a2_batch(&[(m, n)], a, b, s_a, q)?;
    est[0].into_result(q)
}

/// All requested `A2(m, n)` from one shared panel sweep.
///
/// Non-converged terms are returned flagged rather than as errors so a
/// decomposition table can annotate them.
pub fn a2_batch(
    orders: &[(u32, u32)],
    a: f64,
    b: f64,
    s_a: f64,
    q: &QuadratureSettings,
) -> Result<Vec<A2Estimate>> {
    check_inputs(a, b, s_a)?;
    q.validate()?;
    for &(m, n) in orders {
        if (m + n) % 2 == 0 {
            return Err(Error::Parity { m, n });
        }
        if m > MAX_ORDER || n > MAX_ORDER {
            return Err(invalid(format!("order ({m}, {n}) exceeds {MAX_ORDER}")));
        }
    }
    if orders.is_empty() {
        return Ok(Vec::new());
    }
    let top = orders.iter().map(|&(m, n)| m.max(n)).max().unwrap_or(0) as usize;

    // envelope K w^-p of the half-line integrand
    let (k_env, p_env) = if a > 0.0 {
        (ENVELOPE_SLACK * (2.0 / (PI * a)).sqrt() * (2.0 / (PI * b)).sqrt(), 3.0)
    } else {
        (ENVELOPE_SLACK * (2.0 / (PI * b)).sqrt(), 2.5)
    };
    let tail_at = |w: f64| k_env * w.powf(1.0 - p_env) / (p_env - 1.0);
    let width = PI / (s_a + a + b);
    let cutoff = match q.tail_cutoff {
        Some(w) => w,
        None => {
            let from_tol = (2.0 * k_env / ((p_env - 1.0) * q.abs_tol)).powf(1.0 / (p_env - 1.0));
            // keep the envelope in its asymptotic regime at the cutoff
            let smallest = if a > 0.0 { a.min(b) } else { b };
            from_tol.max((2.0 * top as f64 + 10.0) / smallest)
        }
    };
    let wanted = (cutoff / width).ceil() as usize;
    let panels = wanted.clamp(1, q.max_panels);
    let reached = panels as f64 * width;
    let tail_bound = tail_at(reached);

    let dim = orders.len();
    let integrand = |w: f64, out: &mut [f64]| {
        let mut ja = [0.0f64; MAX_ORDER as usize + 1];
        let mut jb = [0.0f64; MAX_ORDER as usize + 1];
        bessel_j_orders_into(a * w, &mut ja[..=top]);
        bessel_j_orders_into(b * w, &mut jb[..=top]);
        let sin_over_w = (s_a * w).sin() / w;
        for (slot, &(m, n)) in out.iter_mut().zip(orders) {
            let (m, n) = (m as usize, n as usize);
            // J_1(x)/w = scale * J_1(x)/x keeps the leading w -> 0 behavior exact
            *slot = match (m, n) {
                (1, 0) => sin_over_w * a * j1_over_x(a * w) * jb[0],
                (0, 1) => sin_over_w * ja[0] * b * j1_over_x(b * w),
                _ => sin_over_w * ja[m] * jb[n] / w,
            };
        }
    };
    let (values, errors) = integrate_panels(&integrand, dim, width, panels);

    Ok(orders
        .iter()
        .zip(values.iter().zip(&errors))
        .map(|(&(m, n), (&v, &e))| {
            // a = 0 kills every m > 0 term exactly
            let vanishes = a == 0.0 && m > 0;
            let value = if vanishes { 0.0 } else { 2.0 * v };
            let error_estimate = if vanishes { 0.0 } else { 2.0 * (e + tail_bound) };
            let converged = error_estimate <= q.tolerance_for(value);
            A2Estimate {
                m,
                n,
                value,
                error_estimate,
                tail_bound: 2.0 * tail_bound,
                cutoff: reached,
                panels,
                converged,
            }
        })
        .collect())
}
