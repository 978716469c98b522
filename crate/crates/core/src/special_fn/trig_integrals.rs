//! Sine integral and the `cos(omega w) / w^2` tail used by the clip integral.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

/// `Si(z) = integral_0^z sin(t)/t dt`.
pub fn sine_integral(z: f64) -> f64 {
    if z < 0.0 {
        return -sine_integral(-z);
    }
    if z <= 4.0 {
        let q = -z * z;
        let mut num = z; // z^(2k+1) / (2k+1)! with alternating sign
        let mut sum = z;
        for k in 1..60 {
            let kk = 2 * k;
            num *= q / ((kk * (kk + 1)) as f64);
            let term = num / (kk + 1) as f64;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        FRAC_PI_2 + exp_integral_e1(Complex64::new(0.0, z)).im
    }
}

/// `E1(w)` by modified Lentz continued fraction; accurate for `|w| >= 4`
/// off the negative real axis.
fn exp_integral_e1(w: Complex64) -> Complex64 {
    const TINY: f64 = 1e-300;
    let mut b = w + 1.0;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-w).exp()
}

/// `integral_W^inf cos(omega w) / w^2 dw` in closed form.
pub fn cos_over_w2_tail(omega: f64, w: f64) -> f64 {
    let om = omega.abs();
    if om == 0.0 {
        return 1.0 / w;
    }
    (om * w).cos() / w - om * (FRAC_PI_2 - sine_integral(om * w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_integral_reference_values() {
        let cases = [
            (0.5, 0.493_107_418_043_066_74),
            (3.9, 1.776_501_360_447_805_5),
            (4.1, 1.738_743_626_491_768_8),
            (10.0, 1.658_347_594_218_874),
            (100.0, 1.562_225_466_889_056_3),
            (1e4, 1.570_891_545_385_962),
        ];
        for (z, want) in cases {
            assert!((sine_integral(z) - want).abs() < 1e-14, "Si({z})");
            assert!((sine_integral(-z) + want).abs() < 1e-14);
        }
        assert_eq!(sine_integral(0.0), 0.0);
    }

    #[test]
    fn tail_reference_value() {
        // high-precision oscillatory quadrature: 0.04175881678201275988...
        assert!((cos_over_w2_tail(3.0, 2.0) - 0.041_758_816_782_012_76).abs() < 1e-14);
        assert_eq!(cos_over_w2_tail(0.0, 4.0), 0.25);
        assert_eq!(cos_over_w2_tail(-3.0, 2.0), cos_over_w2_tail(3.0, 2.0));
    }
}
