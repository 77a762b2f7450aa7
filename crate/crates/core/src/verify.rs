//! Numerical sweeps that check the inequalities and identities behind the
//! Popoviciu-type bound for `R_n`.
//!
//! Every sweep is split into `(n, x)` cells evaluated in parallel; cell
//! results are folded in sweep order so reports do not depend on the number
//! of workers.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    f_n_c, rank, sikkema_function, CMode, N6_FIRST_PIECE_BOUND, N6_GLOBAL_BOUND, N6_SIKKEMA_BOUND,
};
use crate::error::{Error, Result};
use crate::grid::{piecewise_sup, rank_breakpoints, GridSpec, NRange, Peak};
use crate::numeric::{default_snap_eps, factorial_ratio};
use crate::polya::PolyaParams;
use crate::report::{MarginTracker, SubCheck, VerificationReport, Witness};

/// Tolerance on `lhs <= rhs` in the rising-factorial inequality.
pub const LEMMA_TOLERANCE: f64 = 1e-13;
/// Below this `c` the rising-factorial inequality must be strict.
pub const STRICT_C_THRESHOLD: f64 = -1e-10;
/// Relative tolerance of the `c = 0` identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-14;
/// Agreement required between closed forms and brute-force sums.
pub const IDENTITY_SUM_TOLERANCE: f64 = 1e-12;
/// Tolerance on `F_n^{c(x)}(x) <= F_n^0(x)`.
pub const DOMINANCE_TOLERANCE: f64 = 1e-13;
/// Slack allowed on the rounded n = 6 constants.
pub const N6_TOLERANCE: f64 = 1e-6;
/// Largest |F| accepted on the interval where F_6^{c(x)} vanishes identically.
pub const N6_ZERO_TOLERANCE: f64 = 1e-15;
/// Relative decrease treated as a monotonicity violation.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;

/// Which increments a sweep visits at each `(n, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "samples")]
pub enum CSweep {
    Zero,
    Rn,
    /// `m` equally spaced values from `-min{x,1-x}/(n-1)` to `0`.
    Uniform(usize),
}

impl CSweep {
    pub fn validate(&self) -> Result<()> {
        match self {
            CSweep::Uniform(m) if *m < 2 => {
                Err(Error::invalid("c-samples", "need at least 2 samples"))
            }
            _ => Ok(()),
        }
    }

    pub fn values(&self, n: u32, x: f64) -> Vec<f64> {
        let lowest = CMode::Rn.c(n, x);
        match *self {
            CSweep::Zero => vec![0.0],
            CSweep::Rn => vec![lowest],
            CSweep::Uniform(m) => {
                let last = (m - 1) as f64;
                (0..m).map(|j| lowest * (1.0 - j as f64 / last)).collect()
            }
        }
    }
}

impl fmt::Display for CSweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CSweep::Zero => f.write_str("zero"),
            CSweep::Rn => f.write_str("rn"),
            CSweep::Uniform(m) => write!(f, "uniform:{m}"),
        }
    }
}

impl FromStr for CSweep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(CSweep::Zero),
            "rn" => Ok(CSweep::Rn),
            _ => s
                .strip_prefix("uniform:")
                .and_then(|m| m.parse().ok())
                .map(CSweep::Uniform)
                .ok_or_else(|| {
                    Error::invalid("c-mode", format!("`{s}` is not zero, rn or uniform:<m>"))
                }),
        }
    }
}

/// All `(n, x)` cells of a sweep, in sweep order.
fn cells(n_range: NRange, grid: &GridSpec) -> Vec<(u32, f64)> {
    let xs = grid.uniform_points();
    n_range
        .iter()
        .flat_map(|n| xs.iter().map(move |&x| (n, x)))
        .collect()
}

fn fold_cells<F>(cells: &[(u32, f64)], check: F) -> MarginTracker
where
    F: Fn(u32, f64) -> MarginTracker + Sync,
{
    let parts: Vec<MarginTracker> = cells.par_iter().map(|&(n, x)| check(n, x)).collect();
    parts
        .into_iter()
        .fold(MarginTracker::default(), MarginTracker::merge)
}

/// Largest integer `r >= 0` with `r <= n x - √n`, if any.
fn max_rank(n: u32, x: f64) -> Option<u32> {
    let a = f64::from(n) * x - f64::from(n).sqrt();
    let r = (a + default_snap_eps(a)).floor();
    (r >= 0.0).then_some(r as u32)
}

fn check_range(n_range: NRange, grid: &GridSpec) -> Result<()> {
    n_range.check_within(2, 200)?;
    grid.validate()
}

/// `x^{(r+1,c)} (1-x)^{(n-r,c)} / 1^{(n,c)} <= x^{r+1} (1-x)^{n-r}` for all
/// `r <= n x - √n` and `c` on a uniform grid in `[-min{x,1-x}/(n-1), 0]`,
/// with strict inequality whenever `c < -1e-10`.
pub fn verify_lemma_claim(
    n_range: NRange,
    grid: &GridSpec,
    c_samples: usize,
) -> Result<VerificationReport> {
    check_range(n_range, grid)?;
    let sweep = CSweep::Uniform(c_samples);
    sweep.validate()?;
    let cells = cells(n_range, grid);
    let results: Vec<(MarginTracker, f64)> = cells
        .par_iter()
        .map(|&(n, x)| {
            let mut tracker = MarginTracker::default();
            let mut identity_dev = 0.0f64;
            let Some(top) = max_rank(n, x) else {
                return (tracker, identity_dev);
            };
            for c in sweep.values(n, x) {
                for r in 0..=top {
                    let lhs = factorial_ratio(x, r, n, c).unwrap_or(f64::NAN);
                    let rhs = x.powi(r as i32 + 1) * (1.0 - x).powi((n - r) as i32);
                    // the c = 0 slice is an identity, checked in relative terms
                    if c == 0.0 {
                        if rhs != 0.0 {
                            identity_dev = identity_dev.max((lhs - rhs).abs() / rhs);
                        }
                        continue;
                    }
                    let margin = rhs - lhs;
                    let witness = Witness {
                        n: Some(n),
                        x: Some(x),
                        c: Some(c),
                        r: Some(r),
                    };
                    tracker.record(margin, witness);
                    if c < STRICT_C_THRESHOLD
                        && margin.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
                    {
                        tracker.violations += 1;
                    }
                }
            }
            (tracker, identity_dev)
        })
        .collect();
    let mut identity_dev = 0.0f64;
    let mut tracker = MarginTracker::default();
    for (part, dev) in results {
        tracker = tracker.merge(part);
        identity_dev = identity_dev.max(dev);
    }
    let mut report = tracker.into_report("lemma-rising-factorial", LEMMA_TOLERANCE);
    let identity = SubCheck::upper(
        "c0-identity-relative",
        identity_dev,
        IDENTITY_TOLERANCE,
        None,
    );
    report.passed &= identity.passed;
    report.subchecks.push(identity);
    report.subchecks.push(SubCheck {
        id: "strictness-violations".into(),
        value: report.violations as f64,
        bound: 0.0,
        passed: report.violations == 0,
        witness_x: None,
    });
    Ok(report)
}

/// Left-tail sum `Σ_{k : k/n - x > n^{-1/2}} (k/n - x) p_k` straight from
/// the pmf.
fn left_tail_brute(n: u32, x: f64, pmf: &crate::polya::Pmf) -> f64 {
    let nf = f64::from(n);
    let root = nf.sqrt();
    (0..=n)
        .filter(|&k| {
            let a = f64::from(k) - nf * x - root;
            a > default_snap_eps(a)
        })
        .map(|k| (f64::from(k) / nf - x) * pmf[k as usize])
        .sum()
}

/// Closed form vs literal sum of the truncated first moment for every
/// `r = 0..n-1`, and the reflection identity: the left-tail sum at `x`
/// equals `F_n^c(1-x)`.
pub fn verify_kozniewska(
    n_range: NRange,
    grid: &GridSpec,
    sweep: CSweep,
) -> Result<VerificationReport> {
    check_range(n_range, grid)?;
    sweep.validate()?;
    let cells = cells(n_range, grid);
    let parts: Vec<(MarginTracker, MarginTracker)> = cells
        .par_iter()
        .map(|&(n, x)| {
            let mut closed_vs_sum = MarginTracker::default();
            let mut reflection = MarginTracker::default();
            let nf = f64::from(n);
            for c in sweep.values(n, x) {
                let params = PolyaParams {
                    n,
                    a: x,
                    b: 1.0 - x,
                    c,
                };
                let Ok(pmf) = params.pmf() else {
                    closed_vs_sum.record(
                        f64::NAN,
                        Witness {
                            n: Some(n),
                            x: Some(x),
                            c: Some(c),
                            r: None,
                        },
                    );
                    continue;
                };
                let mut partial = 0.0;
                for r in 0..n {
                    partial += (x - f64::from(r) / nf) * pmf[r as usize];
                    let closed = params.truncated_first_moment(r).unwrap_or(f64::NAN);
                    let witness = Witness {
                        n: Some(n),
                        x: Some(x),
                        c: Some(c),
                        r: Some(r),
                    };
                    closed_vs_sum.record(-(closed - partial).abs(), witness);
                }
                let tail = left_tail_brute(n, x, &pmf);
                let mirrored = f_n_c(n, 1.0 - x, c).unwrap_or(f64::NAN);
                let witness = Witness {
                    n: Some(n),
                    x: Some(x),
                    c: Some(c),
                    r: None,
                };
                reflection.record(-(tail - mirrored).abs(), witness);
            }
            (closed_vs_sum, reflection)
        })
        .collect();
    let (closed, reflection) = parts.into_iter().fold(
        (MarginTracker::default(), MarginTracker::default()),
        |(a, b), (pa, pb)| (a.merge(pa), b.merge(pb)),
    );
    let closed_check = SubCheck::upper(
        "closed-form-vs-sum",
        -closed.worst,
        IDENTITY_SUM_TOLERANCE,
        closed.witness.x,
    );
    let reflection_check = SubCheck::upper(
        "left-tail-reflection",
        -reflection.worst,
        IDENTITY_SUM_TOLERANCE,
        reflection.witness.x,
    );
    let mut report = closed
        .merge(reflection)
        .into_report("kozniewska-identity", IDENTITY_SUM_TOLERANCE);
    report.subchecks = vec![closed_check, reflection_check];
    Ok(report)
}

/// `F_n^{c(x)}(x) <= F_n^0(x)` with the `R_n` increment `c(x)`.
pub fn verify_dominance(n_range: NRange, grid: &GridSpec) -> Result<VerificationReport> {
    check_range(n_range, grid)?;
    let cells = cells(n_range, grid);
    let tracker = fold_cells(&cells, |n, x| {
        let mut t = MarginTracker::default();
        let c = CMode::Rn.c(n, x);
        let with_c = f_n_c(n, x, c).unwrap_or(f64::NAN);
        let without = f_n_c(n, x, 0.0).unwrap_or(f64::NAN);
        t.record(
            without - with_c,
            Witness {
                n: Some(n),
                x: Some(x),
                c: Some(c),
                r: rank(n, x),
            },
        );
        t
    });
    Ok(tracker.into_report("f-dominance", DOMINANCE_TOLERANCE))
}

fn f6(x: f64) -> f64 {
    f_n_c(6, x, CMode::Rn.c(6, x)).unwrap_or(f64::NAN)
}

fn sup_where(samples: &[f64], keep: impl Fn(f64) -> bool, f: impl Fn(f64) -> f64 + Sync) -> Peak {
    let pts: Vec<f64> = samples.iter().copied().filter(|&x| keep(x)).collect();
    piecewise_sup(&pts, f, |x| (rank(6, x), rank(6, 1.0 - x), x <= 0.5))
}

/// Re-derives the `n = 6` bounds for `R_6` from the definition of
/// `F_6^{c(x)}`, `c(x) = -min{x, 1-x}/5`.
pub fn n6_case_check(grid: &GridSpec) -> Result<VerificationReport> {
    grid.validate_for_scan()?;
    let samples = grid.samples(&rank_breakpoints(6));
    let mut checks = Vec::new();

    let first = sup_where(&samples, |x| rank(6, x) == Some(0) && x <= 0.5, f6);
    checks.push(SubCheck::upper(
        "sup F on (1/sqrt6, 1/2]",
        first.value,
        0.007_216_8,
        Some(first.x),
    ));

    let vanishing = sup_where(
        &samples,
        |x| rank(6, x) == Some(0) && x > 0.5,
        |x| f6(x).abs(),
    );
    checks.push(SubCheck::upper(
        "sup |F| on (1/2, 1/sqrt6 + 1/6]",
        vanishing.value.max(0.0),
        N6_ZERO_TOLERANCE,
        Some(vanishing.x),
    ));

    for k in 1..=3u32 {
        let piece = sup_where(&samples, |x| rank(6, x) == Some(k), f6);
        checks.push(SubCheck::upper(
            &format!("sup F on piece r = {k}"),
            piece.value,
            N6_GLOBAL_BOUND + N6_TOLERANCE,
            Some(piece.x),
        ));
    }

    let global = sup_where(&samples, |_| true, f6);
    checks.push(SubCheck::upper(
        "sup F on [0, 1]",
        global.value,
        N6_GLOBAL_BOUND + N6_TOLERANCE,
        Some(global.x),
    ));

    let bound = sup_where(
        &samples,
        |_| true,
        |x| sikkema_function(6, x, CMode::Rn).unwrap_or(f64::NAN),
    );
    checks.push(SubCheck::upper(
        "sup 1 + sqrt6 (F(x) + F(1-x))",
        bound.value,
        N6_SIKKEMA_BOUND + N6_TOLERANCE,
        Some(bound.x),
    ));

    const { assert!(N6_FIRST_PIECE_BOUND < 0.007_216_8) };
    let worst = checks
        .iter()
        .min_by(|a, b| a.margin().total_cmp(&b.margin()))
        .expect("at least one check");
    Ok(VerificationReport {
        schema: crate::report::SCHEMA_VERSION,
        claim_id: "n6-case".into(),
        passed: checks.iter().all(|c| c.passed),
        tolerance: 0.0,
        worst_margin: worst.margin(),
        witness: Witness {
            n: Some(6),
            x: worst.witness_x,
            c: worst.witness_x.map(|x| CMode::Rn.c(6, x)),
            r: None,
        },
        samples_checked: samples.len() as u64,
        violations: checks.iter().filter(|c| !c.passed).count() as u64,
        finding: false,
        subchecks: checks,
    })
}

/// Default upper end of the increment grid explored by [`conjecture_scan`].
pub const DEFAULT_C_MAX: f64 = 0.2;

/// `(c, ratio)` along `c_grid_size` equally spaced increments from
/// `-min{x,1-x}/(n-1)` to `c_max`, where ratio is the left side of the
/// rising-factorial inequality.
pub fn ratio_profile(
    n: u32,
    x: f64,
    r: u32,
    c_grid_size: usize,
    c_max: f64,
) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::invalid("n", "must be > 1"));
    }
    if c_grid_size < 2 {
        return Err(Error::invalid("c-samples", "need at least 2 samples"));
    }
    let lowest = CMode::Rn.c(n, x);
    if !(c_max >= 0.0 && c_max.is_finite()) {
        return Err(Error::invalid("c-max", "must be finite and >= 0"));
    }
    let last = (c_grid_size - 1) as f64;
    (0..c_grid_size)
        .map(|j| {
            let c = lowest + (c_max - lowest) * (j as f64 / last);
            PolyaParams::new(n, x, 1.0 - x, c)?;
            Ok((c, factorial_ratio(x, r, n, c)?))
        })
        .collect()
}

/// Explores whether the left side of the rising-factorial inequality is
/// nondecreasing in `c >= -min{x,1-x}/(n-1)`. Decreasing steps are reported
/// as a finding with a witness; they are not errors.
pub fn conjecture_scan(
    n_range: NRange,
    grid: &GridSpec,
    c_grid_size: usize,
    c_max: f64,
) -> Result<VerificationReport> {
    check_range(n_range, grid)?;
    if c_grid_size < 2 {
        return Err(Error::invalid("c-samples", "need at least 2 samples"));
    }
    if !(c_max >= 0.0 && c_max.is_finite()) {
        return Err(Error::invalid("c-max", "must be finite and >= 0"));
    }
    let cells = cells(n_range, grid);
    let tracker = fold_cells(&cells, |n, x| {
        let mut t = MarginTracker::default();
        if x.min(1.0 - x) == 0.0 {
            return t;
        }
        let Some(top) = max_rank(n, x) else {
            return t;
        };
        for r in 0..=top {
            let Ok(profile) = ratio_profile(n, x, r, c_grid_size, c_max) else {
                t.record(
                    f64::NAN,
                    Witness {
                        n: Some(n),
                        x: Some(x),
                        c: None,
                        r: Some(r),
                    },
                );
                continue;
            };
            for pair in profile.windows(2) {
                let ((c0, v0), (_, v1)) = (pair[0], pair[1]);
                let step = if v0 == 0.0 { v1 } else { (v1 - v0) / v0.abs() };
                t.record(
                    step,
                    Witness {
                        n: Some(n),
                        x: Some(x),
                        c: Some(c0),
                        r: Some(r),
                    },
                );
                if step < -MONOTONE_TOLERANCE {
                    t.violations += 1;
                }
            }
        }
        t
    });
    let mut report = tracker.into_report("monotone-in-c-conjecture", MONOTONE_TOLERANCE);
    report.finding = !report.passed;
    Ok(report)
}
