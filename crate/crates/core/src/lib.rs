//! Pólya-urn Bernstein-type operators on `[0, 1]` and numerical verification
//! of the Popoviciu-type bound `|R_n(f;x) - f(x)| <= C ω(n^{-1/2})`.
//!
//! Module map:
//! - [`numeric`]: rising factorials, interleaved factorial ratios, `]a[`.
//! - [`polya`]: the Pólya-Eggenberger distribution.
//! - [`function`] and [`operators`]: test functions, `B_n`, `R_n`, the
//!   general Pólya-Bernstein family and the modulus of continuity.
//! - [`analysis`]: `F_n^c`, the bound functions and sup scans.
//! - [`verify`]: inequality and identity sweeps producing reports.

pub mod analysis;
pub mod error;
pub mod function;
pub mod grid;
pub mod numeric;
pub mod operators;
pub mod polya;
pub mod report;
pub mod verify;

pub use analysis::{
    bracket_bound, f_n_c, scan_bracket_sup, scan_sup, sikkema_curve, sikkema_function, CMode,
};
pub use error::{Error, Result};
pub use function::{Builtin, FunctionSpec, SampledTable};
pub use grid::{GridSpec, NRange};
pub use numeric::{
    factorial_ratio, rising_factorial, strict_floor_bracket, BracketInt, RealInterval,
};
pub use operators::{
    bernstein_eval, modulus_of_continuity, polya_operator_eval, popoviciu_ratio, popoviciu_scan,
    r_n_eval, CProfile, OperatorKind,
};
pub use polya::{Pmf, PolyaParams};
pub use report::{ScanReport, VerificationReport};
pub use verify::{
    conjecture_scan, n6_case_check, verify_dominance, verify_kozniewska, verify_lemma_claim, CSweep,
};
