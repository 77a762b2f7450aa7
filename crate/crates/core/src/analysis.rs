//! The truncated first moment `F_n^c`, the Popoviciu bound functions built
//! from it, and sup scans over `x` and `n`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{piecewise_sup, rank_breakpoints, GridSpec, NRange, Peak};
use crate::numeric::{binomial, bracket, factorial_ratio};
use crate::operators::CProfile;
use crate::polya::PolyaParams;
use crate::report::{PerN, ScanReport};

/// Sikkema's optimal Popoviciu constant for `B_n`, `(4306 + 837√6)/5832`.
pub const SIKKEMA_CONSTANT: f64 = 1.089_887_331_054_444_5;

/// Bound on `1 + √n (F_n^0(x) + F_n^0(1-x))` for `n != 6`.
pub const SIKKEMA_ESTIMATE: f64 = 1.0897;

/// Popoviciu constant established for `R_n`.
pub const RN_CONSTANT: f64 = 1.089_70;

/// `(193282 - 78887√6)/6804`, bound on `F_6^{c(x)}` over `(1/√6, 1/2]`.
pub const N6_FIRST_PIECE_BOUND: f64 = 0.007_216_734_430_251_23;

/// Bound on `F_6^{c(x)}` over `[0, 1]`.
pub const N6_GLOBAL_BOUND: f64 = 0.014_271;

/// `1 + 2√6 · 0.014271`.
pub const N6_SIKKEMA_BOUND: f64 = 1.069_913_4;

/// How the increment `c` is chosen from `(n, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CMode {
    Zero,
    Rn,
}

impl CMode {
    pub fn c(self, n: u32, x: f64) -> f64 {
        CProfile::from(self).at(n, x)
    }
}

impl From<CMode> for CProfile {
    fn from(mode: CMode) -> Self {
        match mode {
            CMode::Zero => CProfile::Zero,
            CMode::Rn => CProfile::RnProfile,
        }
    }
}

impl fmt::Display for CMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CMode::Zero => "zero",
            CMode::Rn => "rn",
        })
    }
}

impl FromStr for CMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(CMode::Zero),
            "rn" => Ok(CMode::Rn),
            _ => Err(Error::invalid("c-mode", format!("`{s}` is not zero or rn"))),
        }
    }
}

/// `r(x) = ]n x - √n[`, or `None` when `x <= 1/√n`.
pub fn rank(n: u32, x: f64) -> Option<u32> {
    let k = bracket(f64::from(n) * x - f64::from(n).sqrt()).value();
    u32::try_from(k).ok()
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("n", "must be > 1"));
    }
    Ok(())
}

/// `F_n^c(x) = Σ_{k : x - k/n > n^{-1/2}} (x - k/n) P(X = k)` for
/// `X ~ Polya(n, x, 1-x, c)`, evaluated in closed form:
/// `0` for `x <= 1/√n`, else `C(n-1, r) x^{(r+1,c)} (1-x)^{(n-r,c)} / 1^{(n,c)}`.
pub fn f_n_c(n: u32, x: f64, c: f64) -> Result<f64> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("{x} not in [0, 1]")));
    }
    PolyaParams::new(n, x, 1.0 - x, c)?;
    match rank(n, x) {
        None => Ok(0.0),
        Some(r) => Ok(binomial(n - 1, r) * factorial_ratio(x, r, n, c)?),
    }
}

/// `1 + √n (F_n^c(x) + F_n^c(1-x))` with a single `c = c(x)` serving both
/// terms.
pub fn sikkema_function(n: u32, x: f64, mode: CMode) -> Result<f64> {
    check_n(n)?;
    let c = mode.c(n, x);
    let left = f_n_c(n, x, c)?;
    let right = f_n_c(n, 1.0 - x, c)?;
    Ok(1.0 + f64::from(n).sqrt() * (left + right))
}

/// The sharper bound `1 + Σ_k max(]√n |x - k/n|[, 0) P(X = k)` that the
/// truncated-moment function relaxes (it uses `]λ[ <= λ` for `λ > 1`).
/// In zero mode its sup over `x` at `n = 6` is Sikkema's constant.
pub fn bracket_bound(n: u32, x: f64, mode: CMode) -> Result<f64> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("{x} not in [0, 1]")));
    }
    let pmf = PolyaParams::new(n, x, 1.0 - x, mode.c(n, x))?.pmf()?;
    let nf = f64::from(n);
    let root = nf.sqrt();
    Ok(1.0
        + pmf.expect(|k| {
            let lambda = (nf * x - f64::from(k)).abs() / root;
            bracket(lambda).value().max(0) as f64
        }))
}

/// Jump points of [`bracket_bound`]: `k/n ± j/√n`.
fn bracket_breakpoints(n: u32) -> Vec<f64> {
    let nf = f64::from(n);
    let root = nf.sqrt();
    let mut pts = Vec::new();
    for k in 0..=n {
        for j in 1..=n {
            let shift = f64::from(j) / root;
            if shift > 1.0 {
                break;
            }
            for b in [f64::from(k) / nf + shift, f64::from(k) / nf - shift] {
                if (0.0..=1.0).contains(&b) {
                    pts.push(b);
                }
            }
        }
    }
    pts
}

fn sikkema_peak(n: u32, mode: CMode, grid: &GridSpec) -> Peak {
    let samples = grid.samples(&rank_breakpoints(n));
    // inputs are in range by construction
    piecewise_sup(
        &samples,
        |x| sikkema_function(n, x, mode).unwrap_or(f64::NAN),
        |x| (rank(n, x), rank(n, 1.0 - x), x <= 0.5),
    )
}

/// Per-`n` sup over `x` of [`sikkema_function`], with one-sided sampling at
/// every breakpoint of `r(x)` and `r(1-x)`.
pub fn scan_sup(n_range: NRange, mode: CMode, grid: &GridSpec) -> Result<ScanReport> {
    n_range.check_within(2, 200)?;
    grid.validate_for_scan()?;
    let rows: Vec<PerN> = n_range
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| {
            let peak = sikkema_peak(n, mode, grid);
            PerN {
                n,
                sup: peak.value,
                argmax_x: peak.x,
            }
        })
        .collect();
    let mut report = ScanReport::from_rows("sikkema", *grid, rows);
    report.c_mode = Some(mode.to_string());
    Ok(report)
}

/// Per-`n` sup over `x` of [`bracket_bound`].
pub fn scan_bracket_sup(n_range: NRange, mode: CMode, grid: &GridSpec) -> Result<ScanReport> {
    n_range.check_within(2, 200)?;
    grid.validate_for_scan()?;
    let rows: Vec<PerN> = n_range
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| {
            let samples = grid.samples(&bracket_breakpoints(n));
            let nf = f64::from(n);
            let root = nf.sqrt();
            let peak = piecewise_sup(
                &samples,
                |x| bracket_bound(n, x, mode).unwrap_or(f64::NAN),
                |x| {
                    (0..=n)
                        .map(|k| bracket((nf * x - f64::from(k)).abs() / root).value())
                        .collect::<Vec<_>>()
                },
            );
            PerN {
                n,
                sup: peak.value,
                argmax_x: peak.x,
            }
        })
        .collect();
    let mut report = ScanReport::from_rows("bracket", *grid, rows);
    report.c_mode = Some(mode.to_string());
    Ok(report)
}

/// `(n, x, value)` rows of the Sikkema function over the scan samples, for
/// CSV export.
pub fn sikkema_curve(
    n_range: NRange,
    mode: CMode,
    grid: &GridSpec,
) -> Result<Vec<(u32, f64, f64)>> {
    n_range.check_within(2, 200)?;
    grid.validate()?;
    let mut rows = Vec::new();
    for n in n_range.iter() {
        let samples = grid.samples(&rank_breakpoints(n));
        let values: Vec<f64> = samples
            .par_iter()
            .map(|&x| sikkema_function(n, x, mode))
            .collect::<Result<_>>()?;
        rows.extend(samples.into_iter().zip(values).map(|(x, v)| (n, x, v)));
    }
    Ok(rows)
}
