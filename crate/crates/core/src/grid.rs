//! Evaluation grids on `[0, 1]` and deterministic sup searches over them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform base grid plus optional one-sided sampling around breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    pub refine_breakpoints: bool,
    pub breakpoint_offset: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 10_001,
            refine_breakpoints: true,
            breakpoint_offset: 1e-9,
        }
    }
}

/// Smallest base grid accepted by sup scans.
pub const MIN_SCAN_POINTS: usize = 1000;

impl GridSpec {
    pub fn uniform(points: usize) -> Self {
        Self {
            points,
            refine_breakpoints: false,
            ..Self::default()
        }
    }

    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::invalid("points", "grid needs at least 2 points"));
        }
        if !(self.breakpoint_offset > 0.0 && self.breakpoint_offset <= 1e-6) {
            return Err(Error::invalid(
                "breakpoint_offset",
                format!("{} not in (0, 1e-6]", self.breakpoint_offset),
            ));
        }
        Ok(())
    }

    pub fn validate_for_scan(&self) -> Result<()> {
        self.validate()?;
        if self.points < MIN_SCAN_POINTS {
            return Err(Error::invalid(
                "points",
                format!("sup scans need at least {MIN_SCAN_POINTS} grid points"),
            ));
        }
        Ok(())
    }

    /// The same grid at (roughly) twice the resolution, containing every
    /// point of the original.
    pub fn doubled(&self) -> Self {
        Self {
            points: 2 * (self.points - 1) + 1,
            ..*self
        }
    }

    /// `i / (points - 1)` for `i = 0..points`.
    pub fn uniform_points(&self) -> Vec<f64> {
        let m = (self.points - 1) as f64;
        (0..self.points).map(|i| i as f64 / m).collect()
    }

    /// Sorted sample set symmetric under `x -> 1 - x`: the upper half of the
    /// uniform grid, `b` and `b ± offset` for every breakpoint when
    /// refinement is on, and the exact mirror image `1 - p` of each point.
    pub fn samples(&self, breakpoints: &[f64]) -> Vec<f64> {
        let m = (self.points - 1) as f64;
        let mut upper: Vec<f64> = (0..self.points)
            .filter(|&i| 2 * i >= self.points - 1)
            .map(|i| i as f64 / m)
            .collect();
        if self.refine_breakpoints {
            let off = self.breakpoint_offset;
            for &b in breakpoints {
                for y in [b, 1.0 - b] {
                    for p in [y - off, y, y + off] {
                        if (0.5..=1.0).contains(&p) {
                            upper.push(p);
                        }
                    }
                }
            }
        }
        let mut all: Vec<f64> = upper.iter().map(|&p| 1.0 - p).collect();
        all.extend(upper);
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }
}

/// Breakpoints `1/√n + k/n` of `r(x) = ]n x - √n[` inside `[0, 1]`.
pub fn rank_breakpoints(n: u32) -> Vec<f64> {
    let root = f64::from(n).sqrt();
    (0..=n)
        .map(|k| (root + f64::from(k)) / f64::from(n))
        .take_while(|&b| b <= 1.0)
        .collect()
}

/// Inclusive integer range `lo..=hi`, parsed from `lo..hi` or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NRange {
    pub lo: u32,
    pub hi: u32,
}

impl NRange {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid("n", format!("empty range {lo}..{hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn single(n: u32) -> Self {
        Self { lo: n, hi: n }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.lo..=self.hi
    }

    pub fn check_within(&self, min: u32, max: u32) -> Result<()> {
        if self.lo < min || self.hi > max {
            return Err(Error::invalid(
                "n",
                format!("range {self} not within {min}..{max}"),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for NRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid("n", format!("`{s}` is not `lo..hi` or an integer")))
        };
        match s.split_once("..") {
            Some((lo, hi)) => Self::new(parse(lo)?, parse(hi)?),
            None => Ok(Self::single(parse(s)?)),
        }
    }
}

/// A sup value with the point that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub value: f64,
    pub x: f64,
}

impl Peak {
    const NONE: Peak = Peak {
        value: f64::NEG_INFINITY,
        x: f64::INFINITY,
    };

    /// Larger value wins; ties go to the smaller `x`.
    pub fn better(self, other: Peak) -> Peak {
        if other.value > self.value || (other.value == self.value && other.x < self.x) {
            other
        } else {
            self
        }
    }
}

/// Max of `f` over `points` with the tie-break of [`Peak::better`].
/// Evaluation is parallel; the reduction is sequential and order-independent
/// of the worker count.
pub fn grid_sup<F>(points: &[f64], f: F) -> Peak
where
    F: Fn(f64) -> f64 + Sync,
{
    let values: Vec<f64> = points.par_iter().map(|&x| f(x)).collect();
    points
        .iter()
        .zip(&values)
        .fold(Peak::NONE, |best, (&x, &value)| {
            best.better(Peak { value, x })
        })
}

/// Sup of a piecewise-smooth function. `piece` labels the smooth piece a
/// point belongs to. Local maxima of the sampled values whose neighbors lie
/// in the same piece are polished with a golden-section search between the
/// neighbors; every reported value is an actual evaluation of `f`.
pub fn piecewise_sup<F, K, P>(points: &[f64], f: F, piece: K) -> Peak
where
    F: Fn(f64) -> f64 + Sync,
    K: Fn(f64) -> P + Sync,
    P: PartialEq,
{
    let values: Vec<f64> = points.par_iter().map(|&x| f(x)).collect();
    let coarse = points
        .iter()
        .zip(&values)
        .fold(Peak::NONE, |best, (&x, &value)| {
            best.better(Peak { value, x })
        });
    if points.len() < 3 {
        return coarse;
    }
    let threshold = coarse.value - 1e-6 * coarse.value.abs().max(1.0);
    let candidates: Vec<usize> = (1..points.len() - 1)
        .filter(|&i| {
            values[i] >= threshold && values[i] > values[i - 1] && values[i] >= values[i + 1]
        })
        .collect();
    let polished: Vec<Peak> = candidates
        .par_iter()
        .filter_map(|&i| {
            let (lo, hi) = (points[i - 1], points[i + 1]);
            let key = piece(points[i]);
            (piece(lo) == key && piece(hi) == key).then(|| golden_max(&f, lo, hi))
        })
        .collect();
    polished.into_iter().fold(coarse, Peak::better)
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> Peak {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = Peak::NONE;
    let probe = |x: f64, best: &mut Peak| {
        let value = f(x);
        *best = best.better(Peak { value, x });
        value
    };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = probe(x1, &mut best);
    let mut f2 = probe(x2, &mut best);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = probe(x1, &mut best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = probe(x2, &mut best);
        }
    }
    best
}
