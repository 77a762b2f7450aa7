//! Real-valued test functions on `[0, 1]`.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Built-in test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// `1`
    One,
    /// `t`
    Linear,
    /// `t²`
    Square,
    /// `|t - 1/2|`
    AbsMid,
    /// `sin(πt)`
    SinPi,
    /// Piecewise linear through `(0,0), (1/3,1), (2/3,0), (1,1)`.
    Sawtooth,
    /// `√t`
    Sqrt,
}

impl Builtin {
    pub const ALL: [Builtin; 7] = [
        Builtin::One,
        Builtin::Linear,
        Builtin::Square,
        Builtin::AbsMid,
        Builtin::SinPi,
        Builtin::Sawtooth,
        Builtin::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::One => "one",
            Builtin::Linear => "linear",
            Builtin::Square => "square",
            Builtin::AbsMid => "abs-mid",
            Builtin::SinPi => "sin-pi",
            Builtin::Sawtooth => "sawtooth",
            Builtin::Sqrt => "sqrt",
        }
    }

    pub fn is_constant(self) -> bool {
        matches!(self, Builtin::One)
    }

    /// The non-constant members of the library.
    pub fn non_constant() -> impl Iterator<Item = Builtin> {
        Self::ALL.into_iter().filter(|b| !b.is_constant())
    }

    pub fn eval(self, t: f64) -> f64 {
        match self {
            Builtin::One => 1.0,
            Builtin::Linear => t,
            Builtin::Square => t * t,
            Builtin::AbsMid => (t - 0.5).abs(),
            Builtin::SinPi => (std::f64::consts::PI * t).sin(),
            Builtin::Sawtooth => {
                if t <= 1.0 / 3.0 {
                    3.0 * t
                } else if t <= 2.0 / 3.0 {
                    2.0 - 3.0 * t
                } else {
                    3.0 * t - 2.0
                }
            }
            Builtin::Sqrt => t.max(0.0).sqrt(),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|b| b.name()).collect();
                Error::invalid(
                    "fn",
                    format!(
                        "unknown function `{s}` (expected one of {})",
                        names.join(", ")
                    ),
                )
            })
    }
}

/// A function given by samples `(x_i, f_i)` and linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

#[derive(Deserialize)]
struct Row {
    x: f64,
    fx: f64,
}

impl SampledTable {
    /// Requires strictly increasing abscissae running from exactly 0 to
    /// exactly 1 and finite values.
    pub fn new(xs: Vec<f64>, fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::Table("x and fx columns differ in length".into()));
        }
        if xs.len() < 2 {
            return Err(Error::Table("need at least two rows".into()));
        }
        if xs[0] != 0.0 || xs[xs.len() - 1] != 1.0 {
            return Err(Error::Table(
                "first row must have x=0 and last row x=1".into(),
            ));
        }
        if let Some(i) = xs
            .windows(2)
            .position(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::Table(format!(
                "x not strictly increasing at row {}",
                i + 2
            )));
        }
        if let Some(i) = fs.iter().position(|f| !f.is_finite()) {
            return Err(Error::Table(format!("non-finite fx at row {}", i + 1)));
        }
        Ok(Self { xs, fs })
    }

    /// Reads CSV with header `x,fx`.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Table(e.to_string()))?;
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "fx" {
            return Err(Error::Table(format!(
                "expected header `x,fx`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for row in rdr.deserialize() {
            let row: Row = row.map_err(|e| Error::Table(e.to_string()))?;
            xs.push(row.x);
            fs.push(row.fx);
        }
        Self::new(xs, fs)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self.xs.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => self.fs[i],
            Err(i) => {
                let (x0, x1) = (self.xs[i - 1], self.xs[i]);
                let (f0, f1) = (self.fs[i - 1], self.fs[i]);
                f0 + (f1 - f0) * (t - x0) / (x1 - x0)
            }
        }
    }

    fn is_constant(&self) -> bool {
        self.fs.iter().all(|&f| f == self.fs[0])
    }
}

/// A test function: a named built-in or a sampled table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum FunctionSpec {
    Builtin(Builtin),
    Sampled(SampledTable),
}

impl FunctionSpec {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::Builtin(b) => b.eval(t),
            FunctionSpec::Sampled(table) => table.eval(t),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            FunctionSpec::Builtin(b) => b.is_constant(),
            FunctionSpec::Sampled(table) => table.is_constant(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            FunctionSpec::Builtin(b) => b.name().to_owned(),
            FunctionSpec::Sampled(table) => format!("sampled({} rows)", table.xs.len()),
        }
    }
}

impl From<Builtin> for FunctionSpec {
    fn from(b: Builtin) -> Self {
        FunctionSpec::Builtin(b)
    }
}

impl From<SampledTable> for FunctionSpec {
    fn from(table: SampledTable) -> Self {
        FunctionSpec::Sampled(table)
    }
}
