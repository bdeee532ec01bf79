//! Acceptance criteria 1-9. Runs without the libtest harness so that one
//! pass/fail line per criterion is always printed.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use tauconv::algebra::{
    fault, in_j1, involution_tau, lconv, lift_phi, norm, psi_phi_embed, rconv, tconv, PhiDensity,
};
use tauconv::continuum::{halves, refinement_study, GridSpec, CONTINUUM_TOL};
use tauconv::function::{GFunction, KFunction};
use tauconv::group::{semidirect, AutomorphismAction, FiniteGroup, SemidirectGroup};
use tauconv::lp::{approx_identity_action, check_module_associativity, contraction, module_action, LpElement};
use tauconv::norm::{Exponent, Norm};
use tauconv::random;
use tauconv::scalar::{GaussQ, Rational, Scalar};
use tauconv::spectral::{self, BenchConfig, Kernel};
use tauconv::verify::{find_witness, run_suite, verify_witness, SuiteConfig, SuiteReport, Verdict, WitnessKind};

type Q = GaussQ;

const TRIALS: usize = 1000;

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

fn groups() -> Vec<(&'static str, Arc<SemidirectGroup>)> {
    let c = |n| FiniteGroup::cyclic(n).unwrap();
    let build = |h: FiniteGroup, k: FiniteGroup, a: AutomorphismAction| Arc::new(semidirect(h, k, a).unwrap());
    let s3 = FiniteGroup::symmetric(3).unwrap();
    // conjugation by the transposition (0 1), element 1 in lexicographic order
    let conj = AutomorphismAction::conjugation(&c(2), &s3, 1).unwrap();
    vec![
        ("Z2 x| Z3", build(c(2), c(3), AutomorphismAction::inversion(&c(2), &c(3)))),
        ("{e} x| Z4", Arc::new(SemidirectGroup::over_trivial(Arc::new(c(4))))),
        ("Z2 x| S3", build(c(2), s3, conj)),
        ("Z2 x| Z4", build(c(2), c(4), AutomorphismAction::inversion(&c(2), &c(4)))),
    ]
}

fn suites(gs: &[(&str, Arc<SemidirectGroup>)]) -> Vec<SuiteReport> {
    gs.iter().map(|(_, g)| run_suite::<Q>(g, &SuiteConfig::default())).collect()
}

fn criterion_1(gs: &[(&str, Arc<SemidirectGroup>)]) -> (Outcome, Vec<SuiteReport>) {
    let start = Instant::now();
    let reports = suites(gs);
    let elapsed = start.elapsed();
    let mut bad = Vec::new();
    for ((name, _), r) in gs.iter().zip(&reports) {
        if r.checks.len() != 16 {
            bad.push(format!("{name}: {} checks", r.checks.len()));
        }
        bad.extend(r.failures().map(|c| format!("{name}: {}", c.check_id)));
        let assoc = r.check("thm-right-left-assoc").unwrap();
        let n = r.order;
        let expected = n.pow(3) + TRIALS;
        if assoc.laws.iter().take(2).any(|l| l.trials != expected) {
            bad.push(format!("{name}: associativity ran fewer than {expected} triples"));
        }
    }
    let pass = bad.is_empty() && elapsed < Duration::from_secs(60);
    let detail = if bad.is_empty() {
        format!("16/16 checks without failure on 4 groups in {:.1}s (limit 60s)", elapsed.as_secs_f64())
    } else {
        bad.join("; ")
    };
    (outcome(pass, detail), reports)
}

fn criterion_2(gs: &[(&str, Arc<SemidirectGroup>)], reports: &[SuiteReport]) -> Outcome {
    let mut bad = Vec::new();
    for ((name, g), r) in gs.iter().zip(reports) {
        let nontrivial_h = g.h().order() > 1;
        let abelian = g.k().is_abelian();
        let nonassoc = find_witness(WitnessKind::NonAssoc, g, 0, TRIALS);
        if nonassoc.is_some() != nontrivial_h || nonassoc.as_ref().is_some_and(|w| !verify_witness(w)) {
            bad.push(format!("{name}: nonassoc witness {:?}", nonassoc.is_some()));
        }
        let noncomm = find_witness(WitnessKind::NonComm, g, 0, TRIALS);
        if noncomm.is_some() == abelian {
            bad.push(format!("{name}: noncomm witness {:?}", noncomm.is_some()));
        }
        if abelian {
            // exhaustive point-mass commutativity
            let n = g.order();
            for x in 0..n {
                for y in 0..n {
                    let f = GFunction::<Q>::point_mass_flat(g, x);
                    let h = GFunction::<Q>::point_mass_flat(g, y);
                    if tconv(&f, &h).unwrap() != tconv(&h, &f).unwrap() {
                        bad.push(format!("{name}: point masses {x},{y} do not commute"));
                    }
                }
            }
        }
        let nonco = find_witness(WitnessKind::NonCoincidence, g, 0, TRIALS);
        if nonco.is_some() != nontrivial_h {
            bad.push(format!("{name}: noncoincidence witness {:?}", nonco.is_some()));
        }
        let expect = |id: &str, witness: bool| {
            let v = r.check(id).unwrap().verdict;
            let want = if witness { Verdict::WitnessFound } else { Verdict::Pass };
            (v != want).then(|| format!("{name}: {id} is {v:?}"))
        };
        bad.extend(expect("cor-associativity-dichotomy", nontrivial_h));
        bad.extend(expect("thm-commutativity-dichotomy", !abelian));
        bad.extend(expect("cor-coincidence-dichotomy", nontrivial_h));
    }
    let first = gs
        .iter()
        .find(|(_, g)| g.h().order() > 1)
        .and_then(|(_, g)| find_witness(WitnessKind::NonAssoc, g, 0, 0))
        .map(|w| w.functions.iter().map(|(_, f)| format!("{:?}", f.group().split(flat_support(f)))).collect::<Vec<_>>());
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("witnesses match the dichotomies on 4 groups; Z2 x| Z3 nonassoc witness at {first:?}")
        } else {
            bad.join("; ")
        },
    )
}

fn flat_support(f: &GFunction<Q>) -> usize {
    f.values().iter().position(|v| !v.re.is_zero() || !v.im.is_zero()).unwrap_or(0)
}

fn criterion_3(gs: &[(&str, Arc<SemidirectGroup>)], reports: &[SuiteReport]) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for ((name, g), r) in gs.iter().zip(reports) {
        let jordan = r.check("cor-jordan").unwrap();
        if !g.k().is_abelian() {
            if jordan.verdict != Verdict::NotApplicable || !jordan.laws.iter().all(|l| l.informational) {
                bad.push(format!("{name}: nonabelian K must be informational"));
            }
            continue;
        }
        let mut rng = random::rng(3);
        for _ in 0..TRIALS {
            let f = random::gfunction::<Q, _>(g, &mut rng);
            let h = random::gfunction::<Q, _>(g, &mut rng);
            let ff = tconv(&f, &f).unwrap();
            let lhs = tconv(&tconv(&f, &h).unwrap(), &ff).unwrap();
            let rhs = tconv(&f, &tconv(&h, &ff).unwrap()).unwrap();
            if lhs != rhs {
                bad.push(format!("{name}: Jordan identity fails"));
                break;
            }
        }
        checked += 1;
        if jordan.verdict != Verdict::Pass {
            bad.push(format!("{name}: cor-jordan is {:?}", jordan.verdict));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("exact on {checked} abelian-K groups x {TRIALS} pairs; Z2 x| S3 reported informationally")
        } else {
            bad.join("; ")
        },
    )
}

fn le(a: &Norm, b: &Norm) -> bool {
    match (&a.exact, &b.exact) {
        (Some(x), Some(y)) => x <= y,
        _ => a.value <= b.value * (1.0 + 1e-12) + 1e-12,
    }
}

/// Norm statements only: involution isometry and submultiplicativity.
fn criterion_4_counts(gs: &[(&str, Arc<SemidirectGroup>)]) -> (usize, usize, Option<String>) {
    let mut violations = 0;
    let mut trials = 0;
    let mut witness = None;
    for (name, g) in gs {
        let mut rng = random::rng(4);
        for _ in 0..TRIALS {
            let f = random::gfunction::<Q, _>(g, &mut rng);
            let h = random::gfunction::<Q, _>(g, &mut rng);
            let nf = norm(&f, Exponent::ONE);
            let bound = nf.times(&norm(&h, Exponent::ONE));
            let mut ok = nf.exact.is_some() && norm(&involution_tau(&f), Exponent::ONE).exact == nf.exact;
            for prod in [rconv(&f, &h), lconv(&f, &h), tconv(&f, &h)] {
                ok &= le(&norm(&prod.unwrap(), Exponent::ONE), &bound);
            }
            trials += 1;
            if !ok {
                violations += 1;
                witness.get_or_insert_with(|| format!("{name}: f = {:?}, g = {:?}", f.values(), h.values()));
            }
        }
    }
    (trials, violations, witness)
}

fn criterion_4(gs: &[(&str, Arc<SemidirectGroup>)]) -> Outcome {
    let (trials, violations, _) = criterion_4_counts(gs);
    outcome(
        violations == 0,
        format!("{violations} violations in {trials} trials (isometry + r/l/t submultiplicativity)"),
    )
}

fn criterion_5(gs: &[(&str, Arc<SemidirectGroup>)]) -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for (name, g) in gs.iter().filter(|(_, g)| g.h().order() > 1) {
        let mut rng = random::rng(5);
        let nh = g.h().order();
        let unit = KFunction::<Q>::unit(g.k_arc());
        let dens = |w: &[i64]| {
            let t: i64 = w.iter().sum();
            w.iter().map(|&x| GaussQ::new(Rational::new(x, t), Rational::zero())).collect::<Vec<_>>()
        };
        for i in 0..TRIALS {
            let mut psi = random::kfunction::<Q, _>(g.k_arc(), &mut rng);
            if psi.is_zero() {
                psi = unit.clone();
            }
            let mut w1 = vec![0; nh];
            let mut w2 = vec![0; nh];
            w1[i % nh] = 1;
            w2[(i + 1) % nh] = 1;
            w2[i % nh] = (i % 3) as i64;
            let d = psi_phi_embed(g, &dens(&w1), &psi)
                .unwrap()
                .sub(&psi_phi_embed(g, &dens(&w2), &psi).unwrap())
                .unwrap();
            if !in_j1(&d, 0.0) || d.is_zero() {
                bad.push(format!("{name}: ψ_φ − ψ_φ' not a nonzero kernel element"));
            }
            // any u with tilde(u) = unit: a lift, a point mass on a fiber, or a lift plus kernel noise
            let u = match i % 3 {
                0 => lift_phi(&PhiDensity::uniform(g), &unit).unwrap(),
                1 => GFunction::point_mass(g, i % nh, g.k().identity()),
                _ => GFunction::point_mass(g, 0, g.k().identity())
                    .add(&random::j1_element::<Q, _>(g, &mut rng))
                    .unwrap(),
            };
            let half = d.scale(&GaussQ::half());
            if tconv(&u, &d).unwrap() != half || tconv(&d, &u).unwrap() != half || half == d {
                bad.push(format!("{name}: half collapse fails"));
            }
            count += 1;
        }
    }
    bad.dedup();
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{count} kernel elements, tconv(u,f) = tconv(f,u) = f/2 exactly")
        } else {
            bad.join("; ")
        },
    )
}

fn criterion_6(gs: &[(&str, Arc<SemidirectGroup>)]) -> Outcome {
    let mut bad = Vec::new();
    let mut trials = 0;
    for (name, g) in gs {
        let mut rng = random::rng(6);
        let phi = PhiDensity::<Q>::uniform(g);
        for p in [1.0, 2.0, 3.0] {
            let p = Exponent::new(p).unwrap();
            for _ in 0..TRIALS {
                let f = random::gfunction::<Q, _>(g, &mut rng);
                let h = random::gfunction::<Q, _>(g, &mut rng);
                let u = LpElement::new(random::gfunction::<Q, _>(g, &mut rng), p).unwrap();
                let (lhs, rhs) = contraction(&f, &u).unwrap();
                if !le(&lhs, &rhs) {
                    bad.push(format!("{name}: contraction p = {p:?}"));
                }
                if check_module_associativity(&f, &h, &u).unwrap() != 0.0 {
                    bad.push(format!("{name}: module associativity p = {p:?}"));
                }
                let id = approx_identity_action(&phi, &u).unwrap();
                if id.exact != Some(Rational::zero()) {
                    bad.push(format!("{name}: Φ(1_e) is not the identity"));
                }
                if p == Exponent::ONE && module_action(&f, &u).unwrap().func.values() != lconv(&f, &u.func).unwrap().values() {
                    bad.push(format!("{name}: p = 1 action differs from lconv"));
                }
                trials += 1;
            }
        }
    }
    bad.dedup();
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{trials} trials over p in {{1,2,3}}: 0 contraction violations, associativity residual 0")
        } else {
            bad.join("; ")
        },
    )
}

fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (a, b) in [(2, 64), (4, 256)] {
        let g = spectral::bench_group(a, b).unwrap();
        let mut rng = random::rng(7);
        for _ in 0..100 {
            let f = random::gfunction::<Complex64, _>(&g, &mut rng);
            let h = random::gfunction::<Complex64, _>(&g, &mut rng);
            let tol = spectral::agreement_tol(&f, &h);
            let pairs = [
                (spectral::rconv_fft(&f, &h).unwrap(), rconv(&f, &h).unwrap()),
                (spectral::lconv_fft(&f, &h).unwrap(), lconv(&f, &h).unwrap()),
                (spectral::tconv_fft(&f, &h).unwrap(), tconv(&f, &h).unwrap()),
            ];
            for (fast, naive) in pairs {
                let dev = fast.max_deviation(&naive);
                worst = worst.max(dev / tol);
                if dev > tol {
                    bad.push(format!("Z{a} x| Z{b}: deviation {dev:e} > {tol:e}"));
                }
            }
        }
    }
    let cfg = BenchConfig {
        reps: 5,
        ..BenchConfig::default()
    };
    let rows = spectral::bench(&[(2, 4096)], cfg).unwrap();
    let median = |k: Kernel| rows.iter().find(|r| r.kernel == k).map(|r| r.ns_median).unwrap();
    let (naive, fft) = (median(Kernel::NaiveTconv), median(Kernel::FftTconv));
    if fft >= naive {
        bad.push(format!("fft median {fft} ns not below naive {naive} ns"));
    }
    bad.truncate(3);
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "max deviation {worst:.2e} of tolerance; at (2,4096) fft {:.2} ms vs naive {:.2} ms",
                fft as f64 / 1e6,
                naive as f64 / 1e6
            )
        } else {
            bad.join("; ")
        },
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let report = refinement_study(GridSpec::standard(1 << 10).unwrap()).unwrap();
    let elapsed = start.elapsed();
    let l = &report.levels;
    let base = &l[0];
    let mut bad = Vec::new();
    if base.delta_error > CONTINUUM_TOL {
        bad.push(format!("δ error {:e}", base.delta_error));
    }
    if base.projection_residual > CONTINUUM_TOL || base.submult_slack > CONTINUUM_TOL {
        bad.push(format!(
            "projection {:e}, submultiplicativity {:e}",
            base.projection_residual, base.submult_slack
        ));
    }
    for w in l.windows(2) {
        if !halves(w[0].projection_residual, w[1].projection_residual) || !halves(w[0].submult_slack, w[1].submult_slack) {
            bad.push(format!("refinement N = {} → {} does not halve", w[0].n, w[1].n));
        }
    }
    if elapsed > Duration::from_secs(120) {
        bad.push(format!("took {:.1}s", elapsed.as_secs_f64()));
    }
    outcome(
        bad.is_empty() && report.verdict == "consistent",
        format!(
            "{}; δ error {:.1e}, projection residuals {}; {:.2}s",
            report.verdict,
            base.delta_error,
            l.iter().map(|x| format!("{:.1e}", x.projection_residual)).collect::<Vec<_>>().join(" → "),
            elapsed.as_secs_f64()
        ),
    )
}

/// Criterion 1 under the sign-flip fault.
fn criterion_9a(gs: &[(&str, Arc<SemidirectGroup>)]) -> Outcome {
    let reports = fault::with_sign_flip(|| suites(gs));
    let mut missing = Vec::new();
    for ((name, _), r) in gs.iter().zip(&reports) {
        for id in [
            "thm-right-left-assoc",
            "prop-associator",
            "thm-star-algebra",
            "thm-lambda-phi-homomorphism",
            "thm-projection-homomorphism",
        ] {
            let c = r.check(id).unwrap();
            if c.verdict != Verdict::Fail || c.witness.is_none() {
                missing.push(format!("{name}: {id} {:?}", c.verdict));
            }
        }
    }
    outcome(
        missing.is_empty(),
        if missing.is_empty() {
            "under the fault, checks 1-5 fail with witnesses on all 4 groups".to_string()
        } else {
            format!("not detected: {}", missing.join("; "))
        },
    )
}

/// Criterion 4 under the sign-flip fault.
fn criterion_9b(gs: &[(&str, Arc<SemidirectGroup>)]) -> Outcome {
    let (trials, violations, witness) = fault::with_sign_flip(|| criterion_4_counts(gs));
    outcome(
        violations > 0 && witness.is_some(),
        format!(
            "under the fault: {violations} violations of the norm statements in {trials} trials (sign changes inside a sum cannot raise its absolute value above the sum of absolute values)"
        ),
    )
}

fn main() -> ExitCode {
    let gs = groups();
    let mut lines = Vec::new();
    let mut record = |id: &str, o: Outcome| {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let line = format!("criterion {id}: {tag}  {}", o.detail);
        println!("{line}");
        lines.push(o.pass);
    };
    let (c1, reports) = criterion_1(&gs);
    record("1", c1);
    record("2", criterion_2(&gs, &reports));
    record("3", criterion_3(&gs, &reports));
    record("4", criterion_4(&gs));
    record("5", criterion_5(&gs));
    record("6", criterion_6(&gs));
    record("7", criterion_7());
    record("8", criterion_8());
    record("9a", criterion_9a(&gs));
    record("9b", criterion_9b(&gs));
    let failed = lines.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
