//! Self-check suites run by `satharm verify`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::harmonic_model::{decompose, predict_fourier_coefficient, PhaseAverageOracle, SaturationOperator};
use crate::saturation::{sat, sat_integral_eval};
use crate::scenario::Resolved;
use crate::special_fn::{bessel_j, jacobi_anger, JacobiAngerVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    SatIntegral,
    Parity,
    Oracle,
    JacobiAnger,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::SatIntegral => "sat-integral",
            Self::Parity => "parity",
            Self::Oracle => "oracle",
            Self::JacobiAnger => "jacobi-anger",
            Self::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "sat-integral" => Ok(Self::SatIntegral),
            "parity" => Ok(Self::Parity),
            "oracle" => Ok(Self::Oracle),
            "jacobi-anger" => Ok(Self::JacobiAnger),
            "all" => Ok(Self::All),
            other => Err(invalid(format!("unknown verification suite '{other}'"))),
        }
    }
}

/// One measured quantity against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {:.3e} (tolerance {:.3e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        writeln!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Integral form of the clip against the clip itself, `x` in `[-2 s_a, 2 s_a]`.
pub fn sat_integral_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s_a in [1.0, 16.31] {
        let mut worst = 0.0f64;
        for k in -20..=20 {
            let x = 0.1 * k as f64 * s_a;
            worst = worst.max((sat_integral_eval(x, s_a, 1e-6)? - sat(x, s_a)).abs());
        }
        out.push(Check {
            suite: Suite::SatIntegral,
            name: format!("max |integral form - clip|, s_a = {s_a}"),
            value: worst,
            tolerance: 1e-3,
        });
    }
    Ok(out)
}

fn oracle_for(r: &Resolved, grid: usize) -> Result<PhaseAverageOracle> {
    PhaseAverageOracle::new(r.a, r.b, r.s_a(), grid, SaturationOperator::Hard)
}

fn scale(r: &Resolved) -> f64 {
    r.a.max(r.b)
}

/// Even `|p| + |q|` oracle coefficients of the hard clip.
pub fn parity_checks(r: &Resolved, grid: usize) -> Result<Vec<Check>> {
    let oracle = oracle_for(r, grid)?;
    let top = 8.min(oracle.max_resolved_order());
    let mut worst = 0.0f64;
    for p in -top..=top {
        for q in -top..=top {
            if (p.abs() + q.abs()) % 2 == 0 && p.abs() + q.abs() <= top {
                worst = worst.max(oracle.coefficient(p, q)?.norm());
            }
        }
    }
    Ok(vec![Check {
        suite: Suite::Parity,
        name: format!("max even-order oracle coefficient, |p| + |q| <= {top}, grid {grid}"),
        value: worst,
        tolerance: 1e-8 * scale(r),
    }])
}

/// Model coefficients against the oracle for `|p| + |q| <= max_order`.
pub fn oracle_checks(r: &Resolved, max_order: u32, grid: usize) -> Result<Vec<Check>> {
    let table = decompose(r.a, r.b, r.s_a(), max_order, &r.quadrature)?;
    let oracle = oracle_for(r, grid)?;
    let top = max_order as i64;
    let mut worst = 0.0f64;
    let mut worst_im = 0.0f64;
    for p in -top..=top {
        for q in -top..=top {
            if p.abs() + q.abs() > top {
                continue;
            }
            let c = oracle.coefficient(p, q)?;
            worst = worst.max((predict_fourier_coefficient(p, q, &table) - c).norm());
            if c.norm() > 1e-6 * scale(r) {
                worst_im = worst_im.max(c.im.abs() / c.norm());
            }
        }
    }
    Ok(vec![
        Check {
            suite: Suite::Oracle,
            name: format!("max |model - oracle|, |p| + |q| <= {top}, grid {grid}"),
            value: worst,
            tolerance: 1e-3 * scale(r),
        },
        Check {
            suite: Suite::Oracle,
            name: "max |Im| / |coefficient| of oracle".into(),
            value: worst_im,
            tolerance: 1e-6,
        },
    ])
}

/// Bessel recurrence residual and Jacobi-Anger partial sums.
///
/// The partial sums use `M = |z| + 30`; a margin of 20 falls short of 1e-9
/// once `z` passes about 20.
pub fn jacobi_anger_checks() -> Vec<Check> {
    let mut worst_rec = 0.0f64;
    for i in 0..=100 {
        let x = 0.5 + 49.5 * i as f64 / 100.0;
        for m in 1..=20u32 {
            let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
            let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
            let scale = lhs.abs().max(rhs.abs()).max(bessel_j(m - 1, x).abs());
            worst_rec = worst_rec.max((lhs - rhs).abs() / scale);
        }
    }
    let mut worst_ja = 0.0f64;
    for i in 0..=100 {
        let z = 0.5 * i as f64;
        for phase in [-2.9, -1.0, 0.0, 0.4, 1.7, 3.1] {
            let got = jacobi_anger(z, phase, JacobiAngerVariant::Cos, (z + 30.0).ceil() as u32);
            let want = Complex64::new(0.0, z * f64::cos(phase)).exp();
            worst_ja = worst_ja.max((got - want).norm());
        }
    }
    vec![
        Check {
            suite: Suite::JacobiAnger,
            name: "Bessel three-term recurrence, relative, x in [0.5, 50], m <= 20".into(),
            value: worst_rec,
            tolerance: 1e-9,
        },
        Check {
            suite: Suite::JacobiAnger,
            name: "partial sum at M = |z| + 30 vs exp(j z cos phase), z in [0, 50]".into(),
            value: worst_ja,
            tolerance: 1e-9,
        },
    ]
}

pub fn run_suite(suite: Suite, r: &Resolved, max_order: u32, grid: usize) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::SatIntegral | Suite::All) {
        checks.extend(sat_integral_checks()?);
    }
    if matches!(suite, Suite::Parity | Suite::All) {
        checks.extend(parity_checks(r, grid)?);
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        checks.extend(oracle_checks(r, max_order, grid)?);
    }
    if matches!(suite, Suite::JacobiAnger | Suite::All) {
        checks.extend(jacobi_anger_checks());
    }
    Ok(VerifyReport { checks })
}
