//! Floating-point primitives shared by the rest of the crate: rising
//! factorials, the interleaved three-factorial ratio, binomial coefficients
//! and the strict-floor bracket `]a[`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealInterval {
    lo: f64,
    hi: f64,
}

impl RealInterval {
    pub const UNIT: RealInterval = RealInterval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("interval", "endpoints must be finite"));
        }
        if lo > hi {
            return Err(Error::invalid("interval", format!("lo {lo} > hi {hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// The integer `k` with `k < a <= k + 1`, i.e. the largest integer strictly
/// smaller than `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BracketInt(pub i64);

impl BracketInt {
    pub fn value(self) -> i64 {
        self.0
    }
}

/// Default integer-snap tolerance for [`strict_floor_bracket`].
pub fn default_snap_eps(a: f64) -> f64 {
    1e-12 * a.abs().max(1.0)
}

/// `]a[`: the largest integer strictly smaller than `a`.
///
/// Values within `eps` of an integer `m` are treated as equal to `m` and map
/// to `m - 1`; arguments like `n·x - √n` land a few ulps away from integers
/// at the breakpoints of `r(x)`.
pub fn strict_floor_bracket(a: f64, eps: f64) -> BracketInt {
    let m = a.round();
    if (a - m).abs() <= eps {
        BracketInt(m as i64 - 1)
    } else {
        BracketInt(a.floor() as i64)
    }
}

/// `]a[` with the default snap tolerance.
pub fn bracket(a: f64) -> BracketInt {
    strict_floor_bracket(a, default_snap_eps(a))
}

/// Generalized rising factorial `x (x+h) (x+2h) ... (x+(n-1)h)`.
///
/// Returns exactly `1` for `n = 0` and exactly `0` whenever a factor is zero.
/// Extreme inputs may overflow to `±inf`.
pub fn rising_factorial(x: f64, n: u32, h: f64) -> f64 {
    let mut acc = 1.0;
    for i in 0..n {
        acc *= x + f64::from(i) * h;
    }
    acc
}

/// Binomial coefficient `C(n, k)` as a float; exact while the result and
/// the intermediate products stay below `2^53`.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 1..=k {
        acc = acc * f64::from(n - k + i) / f64::from(i);
    }
    acc
}

/// Product of `numer[i] / denom[i]` with the numerator and denominator
/// factors consumed pairwise, so partial products stay near 1. Any extra
/// factors on either side are applied at the end.
pub(crate) fn interleaved_ratio(
    numer: impl IntoIterator<Item = f64>,
    denom: impl IntoIterator<Item = f64>,
) -> f64 {
    let mut numer = numer.into_iter();
    let mut denom = denom.into_iter();
    let mut acc = 1.0;
    loop {
        match (numer.next(), denom.next()) {
            (Some(p), Some(q)) => acc *= p / q,
            (Some(p), None) => acc *= p,
            (None, Some(q)) => acc /= q,
            (None, None) => return acc,
        }
    }
}

/// First `n` factors of a rising factorial with base `x` and increment `h`.
pub(crate) fn factors(x: f64, n: u32, h: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| x + f64::from(i) * h)
}

/// `x^{(r+1,c)} (1-x)^{(n-r,c)} / 1^{(n,c)}`.
///
/// Factor `i` of the numerator product is paired with factor `i` of the
/// denominator, which keeps intermediates near 1 and preserves exact zeros.
pub fn factorial_ratio(x: f64, r: u32, n: u32, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "must be positive"));
    }
    if r >= n {
        return Err(Error::invalid("r", format!("{r} not in 0..={}", n - 1)));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("{x} not in [0, 1]")));
    }
    if !c.is_finite() {
        return Err(Error::invalid("c", "must be finite"));
    }
    check_denominator(n, c)?;
    let numer = factors(x, r + 1, c).chain(factors(1.0 - x, n - r, c));
    Ok(interleaved_ratio(numer, factors(1.0, n, c)))
}

/// Rejects `c` for which some `1 + i·c`, `i < n`, vanishes.
pub(crate) fn check_denominator(n: u32, c: f64) -> Result<()> {
    match factors(1.0, n, c).position(|q| q == 0.0) {
        Some(index) => Err(Error::ZeroDenominator { index, c }),
        None => Ok(()),
    }
}
