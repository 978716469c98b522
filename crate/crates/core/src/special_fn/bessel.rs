//! Bessel functions of the first kind for non-negative integer order.
//!
//! Three regimes:
//!
//! * ascending power series when `x^2/4` is small against `m + 1`,
//! * Hankel asymptotic expansion for `x >= 30 + m^2/2`,
//! * Miller downward recurrence otherwise, normalised with
//!   `J_0^2 + 2 sum J_k^2 = 1` and signed by `J_0 + 2 sum J_2k = 1`.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, FRAC_PI_4};

const RESCALE_AT: f64 = 1e100;
const RESCALE_BY: f64 = 1e-100;

fn use_series(m: u32, x: f64) -> bool {
    x <= 1.0 || 0.25 * x * x <= 0.5 * (m as f64 + 1.0)
}

fn use_asymptotic(m: u32, x: f64) -> bool {
    let mf = m as f64;
    x >= 30.0 + 0.5 * mf * mf
}

/// `J_m(x)`; negative `x` via `J_m(-x) = (-1)^m J_m(x)`.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    let v = bessel_j_nonneg(m, x.abs());
    if x < 0.0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

fn bessel_j_nonneg(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if use_series(m, x) {
        series(m, x)
    } else if use_asymptotic(m, x) {
        hankel(m, x)
    } else {
        let mut out = vec![0.0; m as usize + 1];
        miller(x, &mut out);
        out[m as usize]
    }
}

/// `J_0(x) ..= J_max_order(x)` in one pass.
pub fn bessel_j_orders(max_order: u32, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order as usize + 1];
    bessel_j_orders_into(x, &mut out);
    out
}

/// Fill `out[k] = J_k(x)` for `k < out.len()`.
pub fn bessel_j_orders_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let ax = x.abs();
    let top = (out.len() - 1) as u32;
    if ax == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
    } else if ax > top as f64 && use_asymptotic(1, ax) {
        // upward recurrence is stable while the order stays below x
        out[0] = hankel(0, ax);
        if out.len() > 1 {
            out[1] = hankel(1, ax);
        }
        for k in 1..out.len().saturating_sub(1) {
            out[k + 1] = 2.0 * k as f64 / ax * out[k] - out[k - 1];
        }
    } else if use_series(0, ax) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = series(k as u32, ax);
        }
    } else {
        miller(ax, out);
    }
    if x < 0.0 {
        for o in out.iter_mut().skip(1).step_by(2) {
            *o = -*o;
        }
    }
}

fn series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    // (x/2)^m / m!, built incrementally to dodge overflow in either factor
    let mut lead = 1.0;
    for k in 1..=m {
        lead *= half / k as f64;
    }
    let mut term = lead;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + m as f64));
        sum += term;
        if term.abs() <= f64::EPSILON * 0.5 * sum.abs() || k > 500.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Hankel asymptotic expansion `sqrt(2/(pi x)) (P cos chi - Q sin chi)`.
fn hankel(m: u32, x: f64) -> f64 {
    let mu = 4.0 * (m as f64) * (m as f64);
    let z = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200u32 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * z);
        if term.abs() > last && k > 2 {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
    }
    let chi = x - (m as f64) * FRAC_PI_2 - FRAC_PI_4;
    (FRAC_2_PI / x).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn miller(x: f64, out: &mut [f64]) {
    let top = out.len() - 1;
    let span = (top as f64).max(x);
    let mut start = (span + 30.0 + 2.0 * (40.0 * span).sqrt()) as usize;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut next = 0.0; // f_{k+1}
    let mut cur = 1e-30; // f_k
    let mut sum_sq = 0.0;
    let mut sum_even = 0.0;
    out.fill(0.0);
    for k in (0..=start).rev() {
        if k <= top {
            out[k] = cur;
        }
        let weight = if k == 0 { 1.0 } else { 2.0 };
        sum_sq += weight * cur * cur;
        if k % 2 == 0 {
            sum_even += weight * cur;
        }
        if k == 0 {
            break;
        }
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_AT {
            cur *= RESCALE_BY;
            next *= RESCALE_BY;
            sum_sq *= RESCALE_BY * RESCALE_BY;
            sum_even *= RESCALE_BY;
            for o in out.iter_mut() {
                *o *= RESCALE_BY;
            }
        }
    }
    let scale = sum_sq.sqrt().copysign(sum_even);
    for o in out.iter_mut() {
        *o /= scale;
    }
}

/// `J_1(x)/x`, finite at the origin.
pub fn j1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let q = x * x / 8.0;
        0.5 * (1.0 - q + q * q / 3.0)
    } else {
        bessel_j(1, x) / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // 20-digit values from an arbitrary-precision reference implementation
    const REFERENCE: &[(u32, f64, f64)] = &[
        (0, 0.5, 0.938_469_807_240_812_9),
        (1, 1.0, 0.440_050_585_744_933_5),
        (3, 7.3, -0.228_101_889_059_524_63),
        (5, 12.0, -0.073_470_963_101_658_58),
        (7, 31.62, -0.027_460_637_306_639_04),
        (10, 3.0, 0.000_012_928_351_645_715_884),
        (20, 15.0, 0.007_360_234_079_223_485),
        (40, 80.0, 0.009_341_477_631_143_116),
        (64, 100.0, 0.039_985_069_452_918_34),
        (0, 1000.0, 0.024_786_686_152_420_175),
        (3, 9999.5, -0.006_601_480_091_277_955),
        (64, 5000.0, -0.002_468_348_027_890_092),
        (2, 25.0, -0.106_294_803_242_381_3),
        (30, 0.7, 7.882_518_268_205_098e-47),
        (1, 1e4, 0.003_647_450_755_529_580_3),
    ];

    #[test]
    fn matches_reference_values() {
        for &(m, x, want) in REFERENCE {
            let got = bessel_j(m, x);
            assert!((got - want).abs() <= 1e-12, "J_{m}({x}) = {got}, want {want}");
        }
        assert!((bessel_j(30, 0.7) / 7.882_518_268_205_098e-47 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn origin_values() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        for m in 1..10 {
            assert_eq!(bessel_j(m, 0.0), 0.0);
        }
    }

    #[test]
    fn parity_in_argument() {
        for m in 0..8 {
            assert_eq!(bessel_j(m, -3.7), if m % 2 == 0 { 1.0 } else { -1.0 } * bessel_j(m, 3.7));
        }
    }

    #[test]
    fn orders_batch_agrees_with_scalar() {
        for &x in &[0.3, 2.0, 9.0, 29.0, 45.0, 400.0, 3.1e4] {
            let v = bessel_j_orders(9, x);
            for (m, got) in v.iter().enumerate() {
                let want = bessel_j(m as u32, x);
                assert!((got - want).abs() < 1e-13, "m={m} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn regimes_agree_at_their_borders() {
        // compare Miller against the asymptotic and series regimes just inside them
        for m in [0u32, 1, 3, 7] {
            let x = 30.0 + 0.5 * (m * m) as f64 + 0.25;
            let mut out = vec![0.0; m as usize + 1];
            miller(x, &mut out);
            assert!((out[m as usize] - hankel(m, x)).abs() < 1e-13, "m={m}");
        }
        for m in [0u32, 4, 12] {
            let x = (2.0 * (m as f64 + 1.0)).sqrt();
            let mut out = vec![0.0; m as usize + 1];
            miller(x, &mut out);
            assert!((out[m as usize] - series(m, x)).abs() < 1e-14, "m={m}");
        }
    }

    #[test]
    fn j1_over_x_is_continuous() {
        for &x in &[1e-8, 5e-4, 9.99e-4, 1.001e-3, 0.1] {
            let direct = series(1, x) / x;
            assert!((j1_over_x(x) - direct).abs() < 1e-15);
        }
        assert_eq!(j1_over_x(0.0), 0.5);
    }
}
