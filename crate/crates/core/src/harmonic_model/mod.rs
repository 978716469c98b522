//! Harmonic decomposition of the clipped echo-plus-interference signal.
//!
//! With `z = a e^{j phi} + b e^{j xi}` the component-wise clip expands as
//!
//! ```text
//! csat(z) = sum_{m + n odd} beta_mn { exp[eps_sum  j (m phi + n xi)]
//!                                   + exp[eps_diff j (m phi - n xi)] }
//!
//! beta_mn  = -alpha_m alpha_n A2(m, n) (-1)^{(m+n+1)/2} / (2 pi)
//! eps_sum  = (-1)^{(m+n+3)/2},   eps_diff = (-1)^{(m-n+3)/2}
//! ```
//!
//! where `alpha_0 = 1`, `alpha_m = 2` otherwise. Terms with `m + n` even are
//! identically zero. When `m = 0` or `n = 0` both exponentials coincide and
//! the term contributes `2 beta` to a single Fourier component.

mod oracle;
mod tanh;

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::signals::{ComplexSignal, PhaseSeries};
use crate::special_fn::{a2_batch, neumann_factor, A2Estimate, QuadratureSettings};

pub use oracle::{phase_average_oracle, PhaseAverageOracle, SaturationOperator};
pub use tanh::{reconstruct_tanh_harmonic, tanh_harmonic_coeffs, TanhCoefficients};

/// Harmonic taxonomy of a decomposition term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HarmonicKind {
    InterferenceFundamental,
    InterferenceHigherOrder,
    TargetFundamental,
    TargetHigherOrder,
    CrossTerm,
}

impl HarmonicKind {
    pub fn classify(m: u32, n: u32) -> Self {
        match (m, n) {
            (0, 1) => Self::InterferenceFundamental,
            (0, _) => Self::InterferenceHigherOrder,
            (1, 0) => Self::TargetFundamental,
            (_, 0) => Self::TargetHigherOrder,
            _ => Self::CrossTerm,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::InterferenceFundamental => "interference fundamental wave",
            Self::InterferenceHigherOrder => "interference higher-order harmonic",
            Self::TargetFundamental => "target fundamental harmonic",
            Self::TargetHigherOrder => "target higher-order harmonic",
            Self::CrossTerm => "cross-term harmonic",
        }
    }
}

impl fmt::Display for HarmonicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn minus_one_pow(k: i64) -> i8 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// One `(m, n)` entry of the decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicTerm {
    pub m: u32,
    pub n: u32,
    pub beta: f64,
    pub eps_sum: i8,
    pub eps_diff: i8,
    pub kind: HarmonicKind,
    pub a2: A2Estimate,
}

impl HarmonicTerm {
    /// Build a term from an already evaluated `A2(m, n)`.
    pub fn from_a2(a2: A2Estimate) -> Result<Self> {
        let (m, n) = (a2.m, a2.n);
        if (m + n) % 2 == 0 {
            return Err(Error::Parity { m, n });
        }
        let (mi, ni) = (m as i64, n as i64);
        let sign = minus_one_pow((mi + ni + 1) / 2) as f64;
        let beta = -neumann_factor(m) * neumann_factor(n) * a2.value * sign / (2.0 * PI);
        Ok(Self {
            m,
            n,
            beta,
            eps_sum: minus_one_pow((mi + ni + 3) / 2),
            eps_diff: minus_one_pow((mi - ni + 3) / 2),
            kind: HarmonicKind::classify(m, n),
            a2,
        })
    }

    /// Weight on each distinct Fourier component: `2 beta` when the two
    /// exponentials coincide (`m = 0` or `n = 0`), `beta` otherwise.
    pub fn combined_coefficient(&self) -> f64 {
        if self.m == 0 || self.n == 0 {
            2.0 * self.beta
        } else {
            self.beta
        }
    }

    /// `(p, q)` exponent pairs of `exp(j (p phi + q xi))` carried by this term.
    pub fn exponents(&self) -> [(i64, i64); 2] {
        let (m, n) = (self.m as i64, self.n as i64);
        let (s, d) = (self.eps_sum as i64, self.eps_diff as i64);
        [(s * m, s * n), (d * m, -d * n)]
    }

    /// Distinct Fourier components with their weights.
    pub fn components(&self) -> Vec<((i64, i64), f64)> {
        let [first, second] = self.exponents();
        if first == second {
            vec![(first, 2.0 * self.beta)]
        } else {
            vec![(first, self.beta), (second, self.beta)]
        }
    }

    /// `|beta|^2`, a per-term power proxy for reports.
    pub fn power_proxy(&self) -> f64 {
        self.beta * self.beta
    }

    pub fn converged(&self) -> bool {
        self.a2.converged
    }
}

/// A single decomposition term; fails on even parity or non-convergence.
pub fn harmonic_term(
    m: u32,
    n: u32,
    a: f64,
    b: f64,
    s_a: f64,
    q: &QuadratureSettings,
) -> Result<HarmonicTerm> {
    if (m + n).is_multiple_of(2) {
        return Err(Error::Parity { m, n });
    }
    let est = a2_batch(&[(m, n)], a, b, s_a, q)?[0];
    est.into_result(q)?;
    HarmonicTerm::from_a2(est)
}

/// All odd-parity `(m, n)` with `m + n <= max_order`, sorted by `(m + n, m)`.
pub fn odd_parity_orders(max_order: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for total in (1..=max_order).step_by(2) {
        for m in 0..=total {
            out.push((m, total - m));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTable {
    pub entries: Vec<HarmonicTerm>,
    pub a: f64,
    pub b: f64,
    pub s_a: f64,
    pub max_order: u32,
}

pub const DECOMPOSITION_CSV_HEADER: &str =
    "m,n,beta,combined_coeff,eps_sum,eps_diff,kind,a2_value,a2_error_estimate";

impl DecompositionTable {
    pub fn term(&self, m: u32, n: u32) -> Option<&HarmonicTerm> {
        self.entries.iter().find(|t| t.m == m && t.n == n)
    }

    /// Entries whose `A2` did not meet the quadrature tolerance.
    pub fn unconverged(&self) -> impl Iterator<Item = &HarmonicTerm> {
        self.entries.iter().filter(|t| !t.converged())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(DECOMPOSITION_CSV_HEADER);
        out.push('\n');
        for t in &self.entries {
            out.push_str(&format!(
                "{},{},{:e},{:e},{},{},{},{:e},{:e}\n",
                t.m,
                t.n,
                t.beta,
                t.combined_coefficient(),
                t.eps_sum,
                t.eps_diff,
                t.kind,
                t.a2.value,
                t.a2.error_estimate
            ));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

/// Evaluate every odd-parity term up to `max_order`.
///
/// Quadrature shortfalls are recorded on the affected entries
/// ([`HarmonicTerm::converged`]) instead of aborting the table.
pub fn decompose(
    a: f64,
    b: f64,
    s_a: f64,
    max_order: u32,
    q: &QuadratureSettings,
) -> Result<DecompositionTable> {
    if max_order < 1 {
        return Err(invalid("max_order must be at least 1"));
    }
    let orders = odd_parity_orders(max_order);
    let entries = a2_batch(&orders, a, b, s_a, q)?
        .into_iter()
        .map(HarmonicTerm::from_a2)
        .collect::<Result<Vec<_>>>()?;
    for t in entries.iter().filter(|t| !t.converged()) {
        log::warn!(
            "A2({}, {}) error estimate {:.3e} exceeds tolerance",
            t.m,
            t.n,
            t.a2.error_estimate
        );
    }
    Ok(DecompositionTable { entries, a, b, s_a, max_order })
}

/// Model coefficient of `exp(j (p phi + q xi))`.
///
/// Orders beyond the table's truncation contribute nothing; even
/// `|p| + |q|` is zero by parity.
pub fn predict_fourier_coefficient(p: i64, q: i64, table: &DecompositionTable) -> Complex64 {
    let beta: f64 = table
        .entries
        .iter()
        .filter(|t| t.m as i64 == p.abs() && t.n as i64 == q.abs())
        .flat_map(|t| t.exponents().into_iter().map(move |e| (e, t.beta)))
        .filter(|&(e, _)| e == (p, q))
        .map(|(_, beta)| beta)
        .sum();
    Complex64::new(beta, 0.0)
}

/// Time series of one harmonic term driven by the echo and interference phases.
///
/// Samples where a phase the term depends on is absent (pulse off) are zero.
pub fn reconstruct_harmonic(
    term: &HarmonicTerm,
    phi: &PhaseSeries,
    xi: &PhaseSeries,
) -> Result<ComplexSignal> {
    if phi.len() != xi.len() || phi.sample_rate != xi.sample_rate {
        return Err(Error::ShapeMismatch(format!(
            "phase series differ: {} samples at {} Hz vs {} samples at {} Hz",
            phi.len(),
            phi.sample_rate,
            xi.len(),
            xi.sample_rate
        )));
    }
    let (m, n) = (term.m as f64, term.n as f64);
    let (s, d) = (term.eps_sum as f64, term.eps_diff as f64);
    let samples = phi
        .phase
        .iter()
        .zip(&xi.phase)
        .map(|(ph, x)| {
            let ph = if term.m == 0 { Some(0.0) } else { *ph };
            let x = if term.n == 0 { Some(0.0) } else { *x };
            match (ph, x) {
                (Some(ph), Some(x)) => {
                    let sum = Complex64::new(0.0, s * (m * ph + n * x)).exp();
                    let diff = Complex64::new(0.0, d * (m * ph - n * x)).exp();
                    (sum + diff) * term.beta
                }
                _ => Complex64::new(0.0, 0.0),
            }
        })
        .collect();
    ComplexSignal::new(samples, phi.sample_rate, phi.t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{lfm_phase, ChirpParams};

    fn sec3() -> (f64, f64, f64) {
        let b = 10f64.powf(1.5);
        (1.0, b, 0.5 * (1.0 + b))
    }

    fn fake_a2(m: u32, n: u32, value: f64) -> A2Estimate {
        A2Estimate {
            m,
            n,
            value,
            error_estimate: 0.0,
            tail_bound: 0.0,
            cutoff: 1.0,
            panels: 1,
            converged: true,
        }
    }

    #[test]
    fn classification() {
        assert_eq!(HarmonicKind::classify(0, 1).label(), "interference fundamental wave");
        assert_eq!(HarmonicKind::classify(0, 3), HarmonicKind::InterferenceHigherOrder);
        assert_eq!(HarmonicKind::classify(1, 0), HarmonicKind::TargetFundamental);
        assert_eq!(HarmonicKind::classify(3, 0), HarmonicKind::TargetHigherOrder);
        assert_eq!(HarmonicKind::classify(1, 2).label(), "cross-term harmonic");
    }

    #[test]
    fn sign_bookkeeping() {
        let t = HarmonicTerm::from_a2(fake_a2(0, 3, 1.0)).unwrap();
        assert_eq!((t.eps_sum, t.eps_diff), (-1, 1));
        assert_eq!(t.exponents(), [(0, -3), (0, -3)]);
        assert!((t.beta + 1.0 / PI).abs() < 1e-15);
        assert_eq!(t.components(), vec![((0, -3), 2.0 * t.beta)]);

        let t = HarmonicTerm::from_a2(fake_a2(1, 0, PI / 2.0)).unwrap();
        assert_eq!(t.components(), vec![((1, 0), 1.0)]);
        let t = HarmonicTerm::from_a2(fake_a2(0, 1, PI / 2.0)).unwrap();
        assert_eq!(t.components(), vec![((0, 1), 1.0)]);

        let t = HarmonicTerm::from_a2(fake_a2(1, 2, 1.0)).unwrap();
        let comps = t.components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|&(_, w)| w == t.beta));
        let exps: Vec<_> = comps.iter().map(|c| c.0).collect();
        assert!(exps.contains(&(-1, -2)) && exps.contains(&(-1, 2)));
        assert_eq!(t.kind, HarmonicKind::CrossTerm);

        assert!(matches!(HarmonicTerm::from_a2(fake_a2(2, 2, 1.0)), Err(Error::Parity { .. })));
    }

    #[test]
    fn third_interference_harmonic_term() {
        let (a, b, s_a) = sec3();
        let t = harmonic_term(0, 3, a, b, s_a, &QuadratureSettings::for_clip_level(s_a)).unwrap();
        assert!((t.beta + 2.17).abs() <= 0.005 * 2.17, "beta = {}", t.beta);
        assert!((t.combined_coefficient() + 4.34).abs() <= 0.01 * 4.34);
        assert_eq!(t.components()[0].0, (0, -3));
    }

    #[test]
    fn identity_regime_term() {
        let (a, b, s_a) = (1.0, 0.5, 2.0);
        let t = harmonic_term(1, 0, a, b, s_a, &QuadratureSettings::for_clip_level(s_a)).unwrap();
        assert!((t.combined_coefficient() - a).abs() < 1e-7);
        assert_eq!(t.components()[0].0, (1, 0));
        assert!(matches!(
            harmonic_term(2, 2, a, b, s_a, &QuadratureSettings::default()),
            Err(Error::Parity { .. })
        ));
    }

    #[test]
    fn enumeration() {
        assert_eq!(odd_parity_orders(1), vec![(0, 1), (1, 0)]);
        assert_eq!(odd_parity_orders(7).len(), 2 + 4 + 6 + 8);
        let five = odd_parity_orders(5);
        for pair in [(0, 1), (1, 0), (0, 3), (2, 1), (1, 2), (3, 0), (0, 5)] {
            assert!(five.contains(&pair));
        }
        assert!(five.windows(2).all(|w| (w[0].0 + w[0].1, w[0].0) < (w[1].0 + w[1].1, w[1].0)));
    }

    #[test]
    fn decomposition_of_default_scenario() {
        let (a, b, s_a) = sec3();
        let table = decompose(a, b, s_a, 5, &QuadratureSettings::for_clip_level(s_a)).unwrap();
        assert_eq!(table.entries.len(), 12);
        assert!(table.unconverged().next().is_none());
        let fund = table.term(0, 1).unwrap().combined_coefficient();
        assert!(fund.abs() < b && fund > 0.0);
        let third = table.term(0, 3).unwrap().combined_coefficient();
        assert!((third.abs() - 4.34).abs() <= 0.01 * 4.34);
        assert_eq!(predict_fourier_coefficient(0, -3, &table).re, third);
        assert_eq!(predict_fourier_coefficient(0, 3, &table), Complex64::new(0.0, 0.0));
        assert_eq!(predict_fourier_coefficient(2, 1, &table), Complex64::new(0.0, 0.0));
        assert_eq!(predict_fourier_coefficient(1, 1, &table), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn unclipped_decomposition() {
        let (a, b) = (1.0, 2.0);
        let s_a = a + b;
        let table = decompose(a, b, s_a, 5, &QuadratureSettings::for_clip_level(s_a)).unwrap();
        for t in &table.entries {
            let c = t.combined_coefficient();
            match (t.m, t.n) {
                (1, 0) => assert!((c - a).abs() < 1e-6 * b),
                (0, 1) => assert!((c - b).abs() < 1e-6 * b),
                _ => assert!(c.abs() < 1e-6 * b, "({}, {}) = {c}", t.m, t.n),
            }
        }
        assert!((predict_fourier_coefficient(1, 0, &table).re - a).abs() < 1e-6);
    }

    #[test]
    fn csv_layout() {
        let (a, b, s_a) = (1.0, 2.0, 1.5);
        let table = decompose(a, b, s_a, 3, &QuadratureSettings::for_clip_level(s_a)).unwrap();
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], DECOMPOSITION_CSV_HEADER);
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[1].starts_with("0,1,"));
        assert!(lines[1].contains("interference fundamental wave"));
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 9));
    }

    #[test]
    fn reconstruction_support_and_shape() {
        let fs = 100e6;
        let mut e = ChirpParams::new(0.0, 1e6, 1e-6, 1.0);
        e.delay = 0.5e-6;
        let i = ChirpParams::new(5e6, 2e6, 2e-6, 3.0);
        let phi = lfm_phase(&e, fs, 0.0, 200).unwrap();
        let xi = lfm_phase(&i, fs, 0.0, 200).unwrap();
        let cross = HarmonicTerm::from_a2(fake_a2(1, 2, 1.0)).unwrap();
        let r = reconstruct_harmonic(&cross, &phi, &xi).unwrap();
        assert!(r.samples()[..50].iter().all(|z| z.norm() == 0.0));
        assert!(r.samples()[150..].iter().all(|z| z.norm() == 0.0));
        let single = HarmonicTerm::from_a2(fake_a2(0, 3, 1.0)).unwrap();
        let r = reconstruct_harmonic(&single, &phi, &xi).unwrap();
        assert!(r.samples().iter().all(|z| (z.norm() - 2.0 / PI).abs() < 1e-12));

        let short = lfm_phase(&e, fs, 0.0, 100).unwrap();
        assert!(matches!(reconstruct_harmonic(&cross, &short, &xi), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn identity_reconstruction_reproduces_echo() {
        let (a, b, s_a) = (1.0, 0.5, 2.0);
        let fs = 50e6;
        let e = ChirpParams::new(1e6, 4e6, 4e-6, a);
        let i = ChirpParams::new(-3e6, 2e6, 4e-6, b);
        let n = 200;
        let phi = lfm_phase(&e, fs, 0.0, n).unwrap();
        let xi = lfm_phase(&i, fs, 0.0, n).unwrap();
        let t = harmonic_term(1, 0, a, b, s_a, &QuadratureSettings::for_clip_level(s_a)).unwrap();
        let r = reconstruct_harmonic(&t, &phi, &xi).unwrap();
        let echo = crate::signals::gen_lfm(&e, fs, 0.0, n).unwrap();
        for (x, y) in r.samples().iter().zip(echo.samples()) {
            assert!((x - y).norm() <= 1e-6 * a);
        }
    }
}
