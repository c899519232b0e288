//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use cheese_core::derivation::{Checker, DerivationCheckRecord, Scalar};
use cheese_core::geometry::generate_cheese;
use cheese_core::norms::NormEstimate;
use cheese_core::quadrature::{pairing_t, residue_oracle_t, IntegralResult};
use cheese_core::rational::{random_member, RationalFunction};
use cheese_core::rng::derive_seed;
use cheese_core::verify::{run_verification, RunConfig, VerificationReport};
use cheese_core::{json, Complex64, QuadratureSpec, SwissCheese};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn real(s: Scalar) -> f64 {
    match s {
        Scalar::Real(x) => x,
        Scalar::Complex(z) => z.norm(),
    }
}

fn complex(s: Scalar) -> Complex64 {
    match s {
        Scalar::Real(x) => Complex64::new(x, 0.0),
        Scalar::Complex(z) => z,
    }
}

fn records<'a>(report: &'a VerificationReport, name: &str) -> &'a [DerivationCheckRecord] {
    report.checks.get(name).map_or(&[], Vec::as_slice)
}

fn all_pass(rs: &[DerivationCheckRecord]) -> bool {
    rs.iter().all(|r| r.pass && r.defect <= r.tolerance)
}

type Criterion = fn(&Context) -> Outcome;

struct Context {
    config: RunConfig,
    cheese: SwissCheese,
    report: VerificationReport,
    elapsed: Duration,
}

fn criterion_1(_ctx: &Context) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &c in &[0.1, 1.0, 5.0, 25.0] {
        for annuli in 1..=6 {
            for per in 1..=4 {
                for seed in 0..3 {
                    let cheese = generate_cheese(c, annuli, per, seed).unwrap();
                    let start = Instant::now();
                    let ok = cheese.certified_bound() <= c / 2.0;
                    let took = start.elapsed();
                    if !ok || took >= Duration::from_millis(1) {
                        return outcome(
                            false,
                            format!(
                                "C={c} annuli={annuli} per={per} seed={seed}: {}",
                                cheese.certified_bound()
                            ),
                        );
                    }
                    worst = worst.max(cheese.certified_bound() / (c / 2.0));
                    count += 1;
                }
            }
        }
    }
    outcome(true, format!("{count} cheeses, max ratio (4πΣr/s²)/(C/2) = {worst:.4}"))
}

fn criterion_2(ctx: &Context) -> Outcome {
    let rs = records(&ctx.report, "morris_bound");
    let sum = ctx.cheese.lemma21_sum();
    let mut violations = 0;
    let mut nonzero = 0;
    for r in rs {
        let (fx, gx) = (r.diagnostics["sup_f_x"], r.diagnostics["sup_g_x"]);
        let d = real(r.lhs);
        if d > 1e-9 {
            nonzero += 1;
        }
        let within = d <= 4.0 * PI * sum * fx * gx + 1e-8 * (1.0 + fx * gx);
        if !within || !r.pass {
            violations += 1;
        }
    }
    let pairs_time = ctx.report.timings.as_ref().map_or(f64::NAN, |t| t["pairs"]);
    outcome(
        rs.len() == 200 && violations == 0 && nonzero > 0 && pairs_time <= 30.0,
        format!(
            "{} pairs, {violations} violations, {nonzero} with |D| > 0, pair sweep {pairs_time:.2}s",
            rs.len()
        ),
    )
}

fn criterion_3(ctx: &Context) -> Outcome {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let family = ctx.config.family();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for i in 0..200u64 {
        let f = random_member(&ctx.cheese, &family, derive_seed(derive_seed(ctx.config.seed, 101), i)).unwrap();
        let g = random_member(&ctx.cheese, &family, derive_seed(derive_seed(ctx.config.seed, 102), i)).unwrap();
        let q = pairing_t(&f, &g, &spec).unwrap();
        let o = residue_oracle_t(&f, &g).unwrap();
        let gap = (q.value - o).norm() / (1.0 + o.norm());
        worst = worst.max(gap);
        ok &= q.converged && (q.value - o).norm() <= 1e-9 + 1e-9 * o.norm();
    }
    let mut monomial_worst: f64 = 0.0;
    for n in 1..=8u32 {
        let expected = Complex64::new(0.0, TAU * n as f64);
        let f = RationalFunction::power(n as usize);
        let g = RationalFunction::inverse_power(n);
        let q = pairing_t(&f, &g, &spec).unwrap().value;
        let o = residue_oracle_t(&f, &g).unwrap();
        monomial_worst = monomial_worst.max((q - expected).norm()).max((o - expected).norm());
    }
    ok &= monomial_worst <= 1e-10;
    ok &= all_pass(records(&ctx.report, "oracle_agreement")) && all_pass(records(&ctx.report, "monomial_pairing"));
    let took = start.elapsed();
    ok &= took <= Duration::from_secs(10);
    outcome(
        ok,
        format!(
            "200 pairs worst gap/(1+|oracle|) = {worst:.2e}, monomial worst = {monomial_worst:.2e}, {:.2}s",
            took.as_secs_f64()
        ),
    )
}

fn criterion_4(ctx: &Context) -> Outcome {
    let pairs = records(&ctx.report, "cyclicity");
    let unit = records(&ctx.report, "cyclicity_unit");
    let check = |r: &DerivationCheckRecord| {
        let fg = complex(r.lhs);
        let minus_gf = complex(r.rhs);
        (fg - minus_gf).norm() <= 1e-9 * (1.0 + fg.norm())
    };
    let ok = pairs.len() == 200
        && unit.len() == 200
        && pairs.iter().chain(unit).all(check)
        && all_pass(pairs)
        && all_pass(unit);
    let worst = pairs.iter().chain(unit).map(|r| r.defect).fold(0.0, f64::max);
    outcome(
        ok,
        format!(
            "{} pairs + {} D(f)(1) cases, max defect {worst:.2e}",
            pairs.len(),
            unit.len()
        ),
    )
}

fn criterion_5(ctx: &Context) -> Outcome {
    let rs = records(&ctx.report, "leibniz");
    let worst = rs
        .iter()
        .map(|r| r.defect / (1.0 + real(r.lhs).max(real(r.rhs))))
        .fold(0.0, f64::max);
    outcome(
        rs.len() == 100 && all_pass(rs) && worst <= 1e-8,
        format!("{} triples, worst relative defect {worst:.2e}", rs.len()),
    )
}

fn criterion_6(ctx: &Context) -> Outcome {
    let rs = records(&ctx.report, "cauchy_split");
    let polys = records(&ctx.report, "cauchy_split_polynomial_h2");
    let worst = rs
        .iter()
        .map(|r| r.defect / (1.0 + r.diagnostics["max_df"]))
        .fold(0.0, f64::max);
    let worst_h2 = polys.iter().map(|r| real(r.lhs)).fold(0.0, f64::max);
    // an independent polynomial case on the same cheese
    let p = RationalFunction::power(5).add(&RationalFunction::constant(Complex64::new(0.3, -0.1)));
    let direct = Checker::default()
        .cauchy_split_check(&p, &ctx.cheese, ctx.config.rho)
        .unwrap();
    let direct_h2 = direct.diagnostics["max_h2"];
    let nontrivial = rs.iter().filter(|r| r.diagnostics["max_h2"] > 1e-6).count();
    outcome(
        rs.len() == 50
            && all_pass(rs)
            && worst <= 1e-8
            && all_pass(polys)
            && worst_h2 <= 1e-11
            && direct_h2 <= 1e-11
            && direct.pass,
        format!(
            "{} functions ({nontrivial} with h2 ≠ 0), worst relative defect {worst:.2e}; polynomial max |h2| = {:.2e}",
            rs.len(),
            worst_h2.max(direct_h2)
        ),
    )
}

fn criterion_7(ctx: &Context) -> Outcome {
    let rs = records(&ctx.report, "fubini");
    let worst = rs.iter().map(|r| r.defect / (1.0 + real(r.lhs))).fold(0.0, f64::max);
    outcome(
        rs.len() == 50 && all_pass(rs) && worst <= 1e-8,
        format!("{} pairs, worst relative defect {worst:.2e}", rs.len()),
    )
}

fn criterion_8(ctx: &Context) -> Outcome {
    let rs = records(&ctx.report, "cauchy_deflection");
    let worst = rs.iter().map(|r| r.defect / (1.0 + real(r.lhs))).fold(0.0, f64::max);
    outcome(
        rs.len() == 50 && all_pass(rs) && worst <= 1e-9,
        format!("{} (g, w) with |w| = 1.5, worst relative defect {worst:.2e}", rs.len()),
    )
}

fn criterion_9(ctx: &Context) -> Outcome {
    let rs = records(&ctx.report, "restriction_bound");
    let ok_sweep = rs.iter().all(|r| {
        let d = real(r.lhs);
        let (a, b) = (r.diagnostics["bound_f_prime"], r.diagnostics["bound_g_prime"]);
        d <= a + 1e-9 * (1.0 + a) && d <= b + 1e-9 * (1.0 + b)
    });
    let eq = records(&ctx.report, "restriction_equality");
    let worst_eq = eq.iter().map(|r| (real(r.lhs) - real(r.rhs)).abs()).fold(0.0, f64::max);
    outcome(
        rs.len() == 200
            && ok_sweep
            && all_pass(rs)
            && eq.len() == 8
            && all_pass(eq)
            && worst_eq <= 1e-9 * (1.0 + 16.0 * PI),
        format!(
            "{} pairs within both bounds; monomial equality gap {worst_eq:.2e}",
            rs.len()
        ),
    )
}

fn criterion_10(ctx: &Context) -> Outcome {
    let rows = Checker::default().l1_unboundedness_demo(8, &ctx.cheese).unwrap();
    let mut ok = rows.len() == 8;
    let mut worst_l1: f64 = 0.0;
    let mut worst_sup: f64 = 0.0;
    for row in &rows {
        worst_l1 = worst_l1.max((row.l1_norm_derivative - TAU * row.n as f64).abs());
        worst_sup = worst_sup.max((row.sup_norm_x - 1.0).abs());
    }
    ok &= worst_l1 <= 1e-9 && worst_sup <= 1e-12;
    ok &= rows
        .windows(2)
        .all(|w| w[1].l1_norm_derivative / w[1].sup_norm_x > w[0].l1_norm_derivative / w[0].sup_norm_x);
    ok &= all_pass(records(&ctx.report, "l1_norm")) && all_pass(records(&ctx.report, "sup_norm_monomial"));
    outcome(
        ok,
        format!("n = 1..8: max |L1 - 2πn| = {worst_l1:.2e}, max ||z^n|_X - 1| = {worst_sup:.2e}"),
    )
}

fn criterion_11(ctx: &Context) -> Outcome {
    let again = ctx.config.generate().unwrap();
    let cheese_same = again.to_json().unwrap() == ctx.cheese.to_json().unwrap();
    let mut second = run_verification(&again, &ctx.config, false).unwrap();
    let mut first = ctx.report.clone();
    first.timings = None;
    second.timings = None;
    let report_same = first.to_json().unwrap() == second.to_json().unwrap();

    let cheese_rt = SwissCheese::from_json(&ctx.cheese.to_json().unwrap()).unwrap() == ctx.cheese;
    let report_rt = VerificationReport::from_json(&first.to_json().unwrap()).unwrap() == first;
    let family = ctx.config.family();
    let rational_rt = (0..50).all(|i| {
        let f = random_member(&ctx.cheese, &family, i).unwrap();
        RationalFunction::from_json(&f.to_json().unwrap()).unwrap() == f
    });
    let ir = IntegralResult {
        value: Complex64::new(0.1, 1.0 / 3.0),
        nodes_used: 128,
        est_error: 1e-13,
        converged: true,
    };
    let ne = NormEstimate {
        value: 2.0f64.sqrt(),
        arg_max: Complex64::new(0.6, 0.8),
        samples: 256,
        converged: false,
    };
    let small_rt = serde_json::from_str::<IntegralResult>(&json::to_string_compact(&ir).unwrap()).unwrap() == ir
        && serde_json::from_str::<NormEstimate>(&json::to_string_compact(&ne).unwrap()).unwrap() == ne;
    let ok = cheese_same && report_same && cheese_rt && report_rt && rational_rt && small_rt;
    outcome(
        ok,
        format!(
            "cheese identical: {cheese_same}, report identical: {report_same}, round-trips: cheese {cheese_rt} report {report_rt} rational {rational_rt} results {small_rt}"
        ),
    )
}

fn main() {
    let config = RunConfig::default();
    let cheese = config.generate().expect("default cheese");
    let start = Instant::now();
    let report = run_verification(&cheese, &config, true).expect("verification runs");
    let ctx = Context {
        config,
        cheese,
        report,
        elapsed: start.elapsed(),
    };
    println!(
        "default verification: {} records in {:.2}s, aggregate pass = {}",
        ctx.report.checks.values().map(Vec::len).sum::<usize>(),
        ctx.elapsed.as_secs_f64(),
        ctx.report.pass
    );

    let criteria: [(&str, Criterion); 11] = [
        ("budget certificate 4πΣr/s² <= C/2", criterion_1),
        ("bound |D(f)(g)| <= 4πΣ(r/s²)|f|_X|g|_X on 200 pairs", criterion_2),
        ("quadrature and residue oracle agree", criterion_3),
        ("cyclicity D(f)(g) = -D(g)(f), D(f)(1) = 0", criterion_4),
        ("Leibniz law on 100 triples", criterion_5),
        ("Cauchy split f' = h1 + h2", criterion_6),
        ("Fubini swap", criterion_7),
        ("Cauchy deflection onto the deleted circles", criterion_8),
        ("restriction bounds 2π|f'|_T|g|_T and 2π|f|_T|g'|_T", criterion_9),
        ("L1 norm of (z^n)' grows like 2πn while |z^n|_X = 1", criterion_10),
        ("determinism and round-trips", criterion_11),
    ];

    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run(&ctx);
        println!(
            "[{}] criterion {:>2}: {name} -- {}",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    if !ctx.report.pass {
        for r in ctx.report.failures().take(10) {
            println!("  failing record: {r:?}");
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 || !ctx.report.pass {
        std::process::exit(1);
    }
}
