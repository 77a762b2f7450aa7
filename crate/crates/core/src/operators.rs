//! Approximation operators on `[0, 1]`: Bernstein `B_n`, the Pólya-Bernstein
//! family `P_n^{x,1-x,c}(f; x) = E f(X/n)`, its member `R_n` with
//! `c(x) = -min{x, 1-x}/(n-1)`, plus the modulus of continuity and the
//! Popoviciu ratio `sup_x |Op(f;x) - f(x)| / ω(n^{-1/2})`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::grid::{grid_sup, GridSpec};
use crate::numeric::binomial;
use crate::polya::{PolyaParams, ADMISSIBILITY_SLACK};
use crate::report::{ScanReport, SCHEMA_VERSION};

/// Default grid resolution for [`modulus_of_continuity`].
pub const DEFAULT_OMEGA_RESOLUTION: usize = 10_000;

/// Replacement increment as a function of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum CProfile {
    /// `c = 0` (Bernstein).
    Zero,
    /// `c(x) = -min{x, 1-x}/(n-1)` (the operator `R_n`).
    RnProfile,
    /// Fixed `c`; must be admissible at every `x`, i.e. `c >= 0` for `n > 1`.
    Constant(f64),
}

impl CProfile {
    pub fn validate(&self, n: u32) -> Result<()> {
        match *self {
            CProfile::Zero => Ok(()),
            CProfile::RnProfile if n < 2 => Err(Error::invalid("n", "R_n profile needs n > 1")),
            CProfile::RnProfile => Ok(()),
            CProfile::Constant(c) if !c.is_finite() => Err(Error::invalid("c", "must be finite")),
            CProfile::Constant(c) if n > 1 && f64::from(n - 1) * c < -ADMISSIBILITY_SLACK => {
                Err(Error::Inadmissible {
                    bound: "a + (n-1)c >= 0 at x = 0",
                    slack: f64::from(n - 1) * c,
                })
            }
            CProfile::Constant(_) => Ok(()),
        }
    }

    pub fn at(&self, n: u32, x: f64) -> f64 {
        match *self {
            CProfile::Zero => 0.0,
            CProfile::RnProfile => -x.min(1.0 - x) / f64::from(n - 1),
            CProfile::Constant(c) => c,
        }
    }
}

impl fmt::Display for CProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CProfile::Zero => f.write_str("zero"),
            CProfile::RnProfile => f.write_str("rn"),
            CProfile::Constant(c) => write!(f, "const:{c}"),
        }
    }
}

impl FromStr for CProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(CProfile::Zero),
            "rn" => Ok(CProfile::RnProfile),
            _ => s
                .strip_prefix("const:")
                .and_then(|v| v.parse::<f64>().ok())
                .map(CProfile::Constant)
                .ok_or_else(|| {
                    Error::invalid("c-mode", format!("`{s}` is not zero, rn or const:<value>"))
                }),
        }
    }
}

/// Which operator a scan applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Bernstein,
    Rn,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Bernstein => "bernstein",
            OperatorKind::Rn => "rn",
        }
    }

    pub fn eval(self, f: &FunctionSpec, n: u32, x: f64) -> Result<f64> {
        match self {
            OperatorKind::Bernstein => bernstein_eval(f, n, x),
            OperatorKind::Rn => r_n_eval(f, n, x),
        }
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernstein" => Ok(OperatorKind::Bernstein),
            "rn" => Ok(OperatorKind::Rn),
            _ => Err(Error::invalid(
                "op",
                format!("`{s}` is not bernstein or rn"),
            )),
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::invalid("x", format!("{x} not in [0, 1]")))
    }
}

/// `B_n(f; x) = Σ f(k/n) C(n,k) x^k (1-x)^(n-k)`.
pub fn bernstein_eval(f: &FunctionSpec, n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "must be positive"));
    }
    check_x(x)?;
    let nf = f64::from(n);
    Ok((0..=n)
        .map(|k| {
            let basis = binomial(n, k) * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32);
            f.eval(f64::from(k) / nf) * basis
        })
        .sum())
}

/// `E f(X/n)` for `X ~ Polya(n, x, 1-x, c(x))`.
pub fn polya_operator_eval(f: &FunctionSpec, n: u32, x: f64, profile: CProfile) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "must be positive"));
    }
    check_x(x)?;
    profile.validate(n)?;
    // point mass at the endpoints, whatever c is
    if x == 0.0 || x == 1.0 {
        return Ok(f.eval(x));
    }
    let pmf = PolyaParams::new(n, x, 1.0 - x, profile.at(n, x))?.pmf()?;
    let nf = f64::from(n);
    Ok(pmf.expect(|k| f.eval(f64::from(k) / nf)))
}

/// `R_n(f; x)`, defined for `n > 1`.
pub fn r_n_eval(f: &FunctionSpec, n: u32, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", "R_n needs n > 1"));
    }
    polya_operator_eval(f, n, x, CProfile::RnProfile)
}

/// Grid estimate of `ω(δ) = sup{|f(u) - f(v)| : |u - v| <= δ}` on the
/// uniform grid `i / resolution`, using sliding-window max/min deques.
/// Never exceeds the true modulus.
pub fn modulus_of_continuity(f: &FunctionSpec, delta: f64, resolution: usize) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid("delta", format!("{delta} not in (0, 1]")));
    }
    if resolution < 100 {
        return Err(Error::invalid("resolution", "must be at least 100"));
    }
    let steps = resolution as f64;
    let values: Vec<f64> = (0..=resolution).map(|i| f.eval(i as f64 / steps)).collect();
    // grid steps per window; the tiny bump absorbs delta·resolution landing
    // just below an integer
    let width = ((delta * steps) * (1.0 + 1e-12)).floor() as usize;
    let width = width.min(resolution);
    if width == 0 {
        return Ok(0.0);
    }
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for (j, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&i| values[i] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(j);
        while minq.back().is_some_and(|&i| values[i] >= v) {
            minq.pop_back();
        }
        minq.push_back(j);
        let start = j.saturating_sub(width);
        while maxq.front().is_some_and(|&i| i < start) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&i| i < start) {
            minq.pop_front();
        }
        if j >= width {
            best = best.max(values[maxq[0]] - values[minq[0]]);
        }
    }
    Ok(best)
}

/// `sup_x |Op(f;x) - f(x)| / ω(n^{-1/2})` over the uniform points of `grid`.
pub fn popoviciu_ratio(
    f: &FunctionSpec,
    n: u32,
    grid: &GridSpec,
    operator: OperatorKind,
    omega_resolution: usize,
) -> Result<ScanReport> {
    if n < 2 {
        return Err(Error::invalid("n", "must be > 1"));
    }
    grid.validate()?;
    let omega = modulus_of_continuity(f, 1.0 / f64::from(n).sqrt(), omega_resolution)?;
    if omega <= 0.0 || f.is_constant() {
        return Err(Error::invalid("fn", "constant function: ratio is 0/0"));
    }
    let points = grid.uniform_points();
    // all x are valid on [0,1]; errors are impossible past the checks above
    let peak = grid_sup(&points, |x| {
        let op = operator.eval(f, n, x).unwrap_or(f64::NAN);
        (op - f.eval(x)).abs() / omega
    });
    Ok(ScanReport {
        schema: SCHEMA_VERSION,
        kind: "popoviciu".into(),
        sup: peak.value,
        argmax_x: peak.x,
        argmax_n: Some(n),
        grid: *grid,
        c_mode: None,
        function: Some(f.label()),
        operator: Some(operator.name().into()),
        per_n: None,
    })
}

/// Popoviciu ratios for every `n` in the range, with per-`n` rows.
pub fn popoviciu_scan(
    f: &FunctionSpec,
    n_range: crate::grid::NRange,
    grid: &GridSpec,
    operator: OperatorKind,
    omega_resolution: usize,
) -> Result<ScanReport> {
    n_range.check_within(2, 200)?;
    let rows = n_range
        .iter()
        .map(|n| {
            popoviciu_ratio(f, n, grid, operator, omega_resolution).map(|r| crate::report::PerN {
                n,
                sup: r.sup,
                argmax_x: r.argmax_x,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ScanReport::from_rows("popoviciu", *grid, rows);
    report.function = Some(f.label());
    report.operator = Some(operator.name().into());
    Ok(report)
}
