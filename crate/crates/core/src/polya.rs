//! The Pólya-Eggenberger distribution `X_n^{a,b,c}`: the number of white
//! balls in `n` draws from an urn holding weights `a` (white) and `b`
//! (black), where each draw adds `c` balls of the drawn color (removes
//! `|c|` when `c < 0`). All formulas take real parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{binomial, check_denominator, factorial_ratio, factors, interleaved_ratio};

/// Slack accepted on the admissibility inequalities. `R_n` sits exactly on
/// the boundary `min(a, b) + (n-1)c = 0`.
pub const ADMISSIBILITY_SLACK: f64 = 1e-14;

/// Parameters `(n, a, b, c)` of the urn distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyaParams {
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Probability mass function indexed by `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    probabilities: Vec<f64>,
}

impl Pmf {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Number of draws `n`.
    pub fn draws(&self) -> u32 {
        (self.probabilities.len() - 1) as u32
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// `E[g(X)]`.
    pub fn expect(&self, g: impl Fn(u32) -> f64) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| g(k as u32) * p)
            .sum()
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.probabilities[k]
    }
}

impl PolyaParams {
    pub fn new(n: u32, a: f64, b: f64, c: f64) -> Result<Self> {
        let params = Self { n, a, b, c };
        params.validate()?;
        Ok(params)
    }

    /// Checks `a, b >= 0`, `a + b > 0` and the admissibility hypothesis
    /// `a + (n-1)c >= 0`, `b + (n-1)c >= 0`.
    pub fn validate(&self) -> Result<()> {
        let Self { n, a, b, c } = *self;
        if n == 0 {
            return Err(Error::invalid("n", "number of draws must be positive"));
        }
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0 && a + b > 0.0) {
            return Err(Error::InvalidWeights { a, b });
        }
        if !c.is_finite() {
            return Err(Error::invalid("c", "must be finite"));
        }
        let steps = f64::from(n - 1);
        let white = a + steps * c;
        if white < -ADMISSIBILITY_SLACK {
            return Err(Error::Inadmissible {
                bound: "a + (n-1)c >= 0",
                slack: white,
            });
        }
        let black = b + steps * c;
        if black < -ADMISSIBILITY_SLACK {
            return Err(Error::Inadmissible {
                bound: "b + (n-1)c >= 0",
                slack: black,
            });
        }
        Ok(())
    }

    /// The same distribution rescaled to `a + b = 1`.
    pub fn normalized(&self) -> Self {
        let s = self.a + self.b;
        Self {
            n: self.n,
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
        }
    }

    /// `P(X = k) = C(n,k) a^{(k,c)} b^{(n-k,c)} / (a+b)^{(n,c)}`.
    ///
    /// Evaluated on the normalized parameters with numerator and denominator
    /// factors interleaved. Rounding residue is clamped into `[0, 1]`; the
    /// vector is not renormalized.
    pub fn pmf(&self) -> Result<Pmf> {
        self.validate()?;
        let Self { n, a, b, c } = self.normalized();
        check_denominator(n, c)?;
        let probabilities = (0..=n)
            .map(|k| {
                let numer = factors(a, k, c).chain(factors(b, n - k, c));
                let p = binomial(n, k) * interleaved_ratio(numer, factors(1.0, n, c));
                p.clamp(0.0, 1.0)
            })
            .collect();
        Ok(Pmf { probabilities })
    }

    /// Closed-form `(mean, variance)`.
    pub fn moments(&self) -> Result<(f64, f64)> {
        self.validate()?;
        let Self { n, a, b, c } = *self;
        let s = a + b;
        if s + c == 0.0 {
            return Err(Error::SingularVariance);
        }
        let n = f64::from(n);
        let mean = n * a / s;
        let variance = n * a * b / (s * s) * (1.0 + (n - 1.0) * c / (s + c));
        Ok((mean, variance))
    }

    fn check_unit_total(&self) -> Result<()> {
        if (self.a + self.b - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("a + b", "truncated moments need a + b = 1"));
        }
        if self.n == 0 || self.n > i32::MAX as u32 {
            return Err(Error::invalid("n", "out of range"));
        }
        Ok(())
    }

    /// `(1/n) Σ_{k<=r} (n a - k) p_k` via the closed form
    /// `C(n-1, r) a^{(r+1,c)} (1-a)^{(n-r,c)} / 1^{(n,c)}`.
    pub fn truncated_first_moment(&self, r: u32) -> Result<f64> {
        self.validate()?;
        self.check_unit_total()?;
        if r >= self.n {
            return Err(Error::invalid(
                "r",
                format!("{r} not in 0..={}", self.n - 1),
            ));
        }
        let ratio = factorial_ratio(self.a, r, self.n, self.c)?;
        Ok(binomial(self.n - 1, r) * ratio)
    }

    /// The literal sum `Σ_{k<=r} (a - k/n) p_k`, kept as an independent
    /// check of [`Self::truncated_first_moment`].
    pub fn truncated_first_moment_brute(&self, r: u32) -> Result<f64> {
        self.validate()?;
        self.check_unit_total()?;
        if r >= self.n {
            return Err(Error::invalid(
                "r",
                format!("{r} not in 0..={}", self.n - 1),
            ));
        }
        let pmf = self.pmf()?;
        let n = f64::from(self.n);
        Ok((0..=r as usize)
            .map(|k| (self.a - k as f64 / n) * pmf[k])
            .sum())
    }
}
