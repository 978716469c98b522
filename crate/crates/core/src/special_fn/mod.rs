//! Bessel functions, Jacobi-Anger partial sums and the `A2(m, n)` weight
//! integral.

mod a2;
mod bessel;
pub mod quadrature;
mod trig_integrals;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

pub use a2::{a2_batch, a2_integral, A2Estimate, MAX_ORDER};
pub use bessel::{bessel_j, bessel_j_orders, bessel_j_orders_into, j1_over_x};
pub use quadrature::QuadratureSettings;
pub use trig_integrals::{cos_over_w2_tail, sine_integral};

/// Which exponential a Jacobi-Anger sum expands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobiAngerVariant {
    /// `exp(j z cos(phase)) = sum alpha_m j^m J_m(z) cos(m phase)`
    Cos,
    /// `exp(j z sin(phase)) = sum alpha_m (-j)^m J_m(z) cos(m (phase + pi/2))`
    Sin,
}

/// Neumann factor: 1 for order zero, 2 otherwise.
pub fn neumann_factor(m: u32) -> f64 {
    if m == 0 {
        1.0
    } else {
        2.0
    }
}

/// `j^k` for integer `k`.
pub(crate) fn j_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Partial sum through order `max_order` of the Jacobi-Anger expansion.
pub fn jacobi_anger(z: f64, phase: f64, variant: JacobiAngerVariant, max_order: u32) -> Complex64 {
    let j = bessel_j_orders(max_order, z);
    j.iter()
        .enumerate()
        .map(|(m, &jm)| {
            let mi = m as i64;
            let mf = m as f64;
            let (unit, angle) = match variant {
                JacobiAngerVariant::Cos => (j_pow(mi), mf * phase),
                JacobiAngerVariant::Sin => (j_pow(-mi), mf * (phase + FRAC_PI_2)),
            };
            unit * (neumann_factor(m as u32) * jm * angle.cos())
        })
        .sum()
}
