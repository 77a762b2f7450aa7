//! Acceptance criteria. Runs every criterion at its pinned tolerance, prints
//! one PASS/FAIL line each and exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use polya_bernstein::analysis::{
    scan_bracket_sup, RN_CONSTANT, SIKKEMA_CONSTANT, SIKKEMA_ESTIMATE,
};
use polya_bernstein::operators::DEFAULT_OMEGA_RESOLUTION;
use polya_bernstein::verify::DEFAULT_C_MAX;
use polya_bernstein::*;

struct Outcome {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn outcome(id: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome { id, passed, detail }
}

fn rn_or_zero(n: u32, x: f64) -> Vec<f64> {
    let mut cs = vec![0.0];
    if n > 1 {
        cs.push(CProfile::RnProfile.at(n, x));
    }
    cs
}

fn grid101() -> Vec<f64> {
    (0..=100).map(|i| f64::from(i) / 100.0).collect()
}

fn c1_pmf_normalization() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=50 {
        for x in grid101() {
            for c in rn_or_zero(n, x) {
                let pmf = PolyaParams::new(n, x, 1.0 - x, c).unwrap().pmf().unwrap();
                worst = worst.max((pmf.total() - 1.0).abs());
            }
        }
    }
    outcome(
        "C1 pmf normalization",
        worst <= 1e-12,
        format!("max |sum - 1| = {worst:e} (tol 1e-12)"),
    )
}

fn c2_moments() -> Outcome {
    let (mut dm, mut dv) = (0.0f64, 0.0f64);
    for n in 1..=50 {
        for x in grid101() {
            for c in rn_or_zero(n, x) {
                let params = PolyaParams::new(n, x, 1.0 - x, c).unwrap();
                let pmf = params.pmf().unwrap();
                let (mean, var) = params.moments().unwrap();
                let m = pmf.expect(f64::from);
                let v = pmf.expect(|k| (f64::from(k) - m).powi(2));
                dm = dm.max((m - mean).abs());
                dv = dv.max((v - var).abs());
            }
        }
    }
    outcome(
        "C2 moment formulas",
        dm <= 1e-10 && dv <= 1e-9,
        format!("max mean err {dm:e} (tol 1e-10), max variance err {dv:e} (tol 1e-9)"),
    )
}

fn c3_zero_profile_is_bernstein() -> Outcome {
    let mut worst = 0.0f64;
    for b in Builtin::ALL {
        let f = FunctionSpec::from(b);
        for n in 2..=20 {
            for x in grid101() {
                let p = polya_operator_eval(&f, n, x, CProfile::Zero).unwrap();
                let q = bernstein_eval(&f, n, x).unwrap();
                worst = worst.max((p - q).abs());
            }
        }
    }
    outcome(
        "C3 c=0 degeneracy",
        worst <= 1e-13,
        format!("max |P - B| = {worst:e} (tol 1e-13)"),
    )
}

fn sweep_range() -> NRange {
    NRange::new(2, 40).unwrap()
}

fn sweep_grid() -> GridSpec {
    GridSpec::uniform(2001)
}

fn c4_kozniewska() -> Outcome {
    let r = verify_kozniewska(sweep_range(), &sweep_grid(), CSweep::Uniform(21)).unwrap();
    let detail = r
        .subchecks
        .iter()
        .map(|c| format!("{} max err {:e}", c.id, c.value))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(
        "C4 Kozniewska + reflection identities",
        r.passed,
        format!("{detail} (tol 1e-12)"),
    )
}

fn c5_lemma() -> Outcome {
    let r = verify_lemma_claim(sweep_range(), &sweep_grid(), 21).unwrap();
    outcome(
        "C5 rising-factorial inequality",
        r.passed,
        format!(
            "worst margin {:e} (tol -1e-13), strictness violations {}, c=0 rel dev {:e}, {} samples",
            r.worst_margin, r.violations, r.subchecks[0].value, r.samples_checked
        ),
    )
}

fn sikkema_scan() -> ScanReport {
    scan_sup(
        NRange::new(2, 30).unwrap(),
        CMode::Zero,
        &GridSpec::default(),
    )
    .unwrap()
}

fn c6_sikkema(report: &ScanReport) -> Vec<Outcome> {
    let rows = report.per_n.as_ref().unwrap();
    let others: Vec<_> = rows.iter().filter(|r| r.n != 6).collect();
    let worst = others
        .iter()
        .max_by(|a, b| a.sup.total_cmp(&b.sup))
        .unwrap();
    let six = report.row(6).unwrap();
    let bracket = scan_bracket_sup(NRange::single(6), CMode::Zero, &GridSpec::default()).unwrap();
    vec![
        outcome(
            "C6a Sikkema scan n != 6",
            others.iter().all(|r| r.sup <= SIKKEMA_ESTIMATE + 5e-5),
            format!("max sup {:.10} at n={} (bound {})", worst.sup, worst.n, SIKKEMA_ESTIMATE + 5e-5),
        ),
        outcome(
            "C6b Sikkema scan n = 6 in [1.0897, 1.08990]",
            (1.0897..=1.08990).contains(&six.sup),
            format!(
                "sup {:.10} at x={:.10}; for reference, the bracket form 1+sum ]sqrt(n)|x-k/n|[ p_k reaches {:.10} (C_opt {:.10})",
                six.sup, six.argmax_x, bracket.sup, SIKKEMA_CONSTANT
            ),
        ),
    ]
}

fn c7_n6() -> Outcome {
    let r = n6_case_check(&GridSpec::default()).unwrap();
    let detail = r
        .subchecks
        .iter()
        .map(|c| format!("{} = {:.9} <= {}", c.id, c.value, c.bound))
        .collect::<Vec<_>>()
        .join("; ");
    outcome("C7 n=6 case reproduction", r.passed, detail)
}

fn popoviciu_reports() -> Vec<ScanReport> {
    Builtin::non_constant()
        .map(|b| {
            popoviciu_scan(
                &FunctionSpec::from(b),
                NRange::new(2, 30).unwrap(),
                &GridSpec::uniform(2001),
                OperatorKind::Rn,
                DEFAULT_OMEGA_RESOLUTION,
            )
            .unwrap()
        })
        .collect()
}

fn c8_theorem(reports: &[ScanReport]) -> Outcome {
    let worst = reports
        .iter()
        .max_by(|a, b| a.sup.total_cmp(&b.sup))
        .unwrap();
    outcome(
        "C8 theorem-level bound for R_n",
        reports.iter().all(|r| r.sup <= RN_CONSTANT + 1e-6),
        format!(
            "max ratio {:.8} for {} at n={:?} (bound {})",
            worst.sup,
            worst.function.as_deref().unwrap_or("?"),
            worst.argmax_n,
            RN_CONSTANT + 1e-6
        ),
    )
}

fn c9_dominance() -> Outcome {
    let r = verify_dominance(sweep_range(), &sweep_grid()).unwrap();
    outcome(
        "C9 F_n^c dominance",
        r.passed,
        format!(
            "worst margin {:e} (tol -1e-13), {} samples",
            r.worst_margin, r.samples_checked
        ),
    )
}

fn c10_conjecture() -> Outcome {
    let r = conjecture_scan(
        NRange::new(2, 20).unwrap(),
        &sweep_grid(),
        21,
        DEFAULT_C_MAX,
    )
    .unwrap();
    let produced = r.samples_checked > 0 && r.finding == (r.violations > 0);
    let witness = if r.finding {
        format!(" witness {:?}", r.witness)
    } else {
        String::new()
    };
    outcome(
        "C10 conjecture scan report",
        produced,
        format!(
            "{} steps checked, {} decreasing steps, finding={}, worst relative step {:e}{witness}",
            r.samples_checked, r.violations, r.finding, r.worst_margin
        ),
    )
}

/// JSON for criteria 4-8, computed on the current rayon pool.
fn determinism_bundle() -> Vec<String> {
    let mut out = vec![
        verify_kozniewska(sweep_range(), &sweep_grid(), CSweep::Uniform(21))
            .unwrap()
            .to_json(),
        verify_lemma_claim(sweep_range(), &sweep_grid(), 21)
            .unwrap()
            .to_json(),
        sikkema_scan().to_json(),
        n6_case_check(&GridSpec::default()).unwrap().to_json(),
    ];
    out.extend(popoviciu_reports().iter().map(ScanReport::to_json));
    out
}

fn c11_determinism() -> Outcome {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(determinism_bundle)
    };
    let one = run(1);
    let many = run(4);
    let same = one == many;
    outcome(
        "C11 determinism across worker counts",
        same,
        format!(
            "{} reports compared byte-for-byte (1 vs 4 workers)",
            one.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut outcomes = Vec::new();
    let mut timed = |f: &dyn Fn() -> Vec<Outcome>| {
        let start = Instant::now();
        let results = f();
        let secs = start.elapsed().as_secs_f64();
        for o in results {
            println!(
                "[{}] {} ({secs:.1}s): {}",
                if o.passed { "PASS" } else { "FAIL" },
                o.id,
                o.detail
            );
            outcomes.push(o.passed);
        }
    };
    timed(&|| vec![c1_pmf_normalization()]);
    timed(&|| vec![c2_moments()]);
    timed(&|| vec![c3_zero_profile_is_bernstein()]);
    timed(&|| vec![c4_kozniewska()]);
    timed(&|| vec![c5_lemma()]);
    timed(&|| c6_sikkema(&sikkema_scan()));
    timed(&|| vec![c7_n6()]);
    timed(&|| vec![c8_theorem(&popoviciu_reports())]);
    timed(&|| vec![c9_dominance()]);
    timed(&|| vec![c10_conjecture()]);
    timed(&|| vec![c11_determinism()]);

    let failed = outcomes.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
