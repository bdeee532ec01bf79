use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::Value;

use tauconv::algebra::{self, PhiDensity};
use tauconv::continuum::refinement_study;
use tauconv::error::Error;
use tauconv::group::{ActionSpec, GroupSpec, SemidirectGroup, SemidirectSpec};
use tauconv::io::{self, GroupRef, ScalarIo};
use tauconv::lp::{module_action, LpElement};
use tauconv::norm::{Exponent, Norm};
use tauconv::scalar::GaussQ;
use tauconv::spectral::{self, BenchConfig};
use tauconv::verify::{self, SuiteConfig, Verdict};

#[derive(Parser)]
#[command(name = "tauconv", version, about = "τ-convolution on finite semidirect products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Op {
    Rconv,
    Lconv,
    Tconv,
    Standard,
    Involution,
    Tilde,
    Lift,
    ModuleAction,
}

#[derive(Subcommand)]
enum Command {
    /// Build a semidirect product spec and write it as a group file.
    GroupBuild {
        /// `cyclic:N`, `dihedral:N`, `symmetric:N`, `trivial`, or inline JSON.
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: String,
        /// `trivial`, `inversion`, `conjugation:T`, or inline JSON.
        #[arg(long, default_value = "trivial")]
        tau: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the group and action axioms of a group file.
    GroupValidate {
        #[arg(long)]
        group: PathBuf,
    },
    /// Apply one operation to function files.
    Convolve {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        f: PathBuf,
        /// Second operand; a K-function for `lift`, the L^p element for `module-action`.
        #[arg(long)]
        g: Option<PathBuf>,
        #[arg(long, value_enum)]
        op: Op,
        /// Exponent for `module-action`, a real ≥ 1 or `inf`.
        #[arg(long)]
        p: Option<String>,
        #[arg(long, value_enum, default_value = "exact")]
        backend: Backend,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the sixteen-check verification suite.
    Verify {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, value_enum, default_value = "exact")]
        backend: Backend,
        #[arg(long)]
        report: PathBuf,
    },
    /// Time the naive, FFT and standard kernels and write CSV.
    Bench {
        /// Comma-separated `HxK` sizes, e.g. `2x4096,4x256`.
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 11)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Grid refinement study on the affine group.
    Continuum {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
}

enum Failure {
    /// Exit 1.
    Check(String),
    /// Exit 2.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn parse_group_arg(s: &str) -> Result<GroupSpec, Failure> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| Failure::Input(format!("bad group JSON: {e}")));
    }
    let (kind, n) = s.split_once(':').unwrap_or((s, ""));
    let n = || {
        n.parse::<usize>()
            .map_err(|_| Failure::Input(format!("expected {kind}:N, got {s:?}")))
    };
    match kind {
        "trivial" => Ok(GroupSpec::Cyclic { n: 1 }),
        "cyclic" => Ok(GroupSpec::Cyclic { n: n()? }),
        "dihedral" => Ok(GroupSpec::Dihedral { n: n()? }),
        "symmetric" => Ok(GroupSpec::Symmetric { n: n()? }),
        _ => Err(Failure::Input(format!("unknown group {s:?}"))),
    }
}

fn parse_action_arg(s: &str) -> Result<ActionSpec, Failure> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| Failure::Input(format!("bad action JSON: {e}")));
    }
    match s.split_once(':') {
        None if s == "trivial" => Ok(ActionSpec::Trivial),
        None if s == "inversion" => Ok(ActionSpec::Inversion),
        Some(("conjugation", t)) => t
            .parse()
            .map(|by| ActionSpec::Conjugation { by })
            .map_err(|_| Failure::Input(format!("bad conjugating element in {s:?}"))),
        _ => Err(Failure::Input(format!("unknown action {s:?}"))),
    }
}

/// Builds a group, routing axiom failures to `on_violation`.
fn build(spec: &SemidirectSpec, on_violation: fn(String) -> Failure) -> Result<Arc<SemidirectGroup>, Failure> {
    match spec.build() {
        Ok(g) => Ok(Arc::new(g)),
        Err(e @ (Error::Axiom(_) | Error::InvalidAction(_))) => Err(on_violation(format!("invalid group: {e}"))),
        Err(e) => Err(e.into()),
    }
}

fn show(n: &Norm) -> String {
    match &n.exact {
        Some(r) => format!("{r} (≈ {:.12e})", n.value),
        None => format!("{:.12e}", n.value),
    }
}

fn group_build(h: &str, k: &str, tau: &str, out: &Path) -> Outcome {
    let spec = SemidirectSpec {
        h: parse_group_arg(h)?,
        k: parse_group_arg(k)?,
        tau: parse_action_arg(tau)?,
    };
    let g = build(&spec, Failure::Input)?;
    io::write_group_spec(out, &spec)?;
    println!("{} (order {})", g.label(), g.order());
    Ok(())
}

fn group_validate(path: &Path) -> Outcome {
    let spec = io::read_group_spec(path)?;
    let g = build(&spec, Failure::Check)?;
    let report = g.validate();
    match report.violation {
        Some(v) => Err(Failure::Check(format!("invalid group: {v}"))),
        None => {
            let how = if report.exhaustive { "exhaustive" } else { "sampled" };
            println!("valid: {} (order {}, {how})", g.label(), g.order());
            Ok(())
        }
    }
}

struct ConvolveArgs<'a> {
    group: &'a Path,
    f: &'a Path,
    g: Option<&'a Path>,
    op: Op,
    p: Option<Exponent>,
    out: &'a Path,
}

fn convolve<S: ScalarIo>(a: ConvolveArgs) -> Outcome {
    let spec = io::read_group_spec(a.group)?;
    let group = build(&spec, Failure::Input)?;
    let gref = GroupRef::Inline(spec);
    let unary = matches!(a.op, Op::Involution | Op::Tilde);
    match (unary, a.g) {
        (true, Some(_)) => return Err(Failure::Input("this operation takes only --f".into())),
        (false, None) => return Err(Failure::Input("this operation needs --g".into())),
        _ => {}
    }
    if a.p.is_some() && a.op != Op::ModuleAction {
        return Err(Failure::Input("--p only applies to module-action".into()));
    }
    let f = io::read_function::<S>(a.f)?.into_gfunction(&group)?;
    println!("‖f‖_1 = {}", show(&algebra::norm(&f, Exponent::ONE)));
    let second = || -> Result<_, Failure> {
        let path = a.g.expect("checked above");
        Ok(io::read_function::<S>(path)?)
    };
    let result = match a.op {
        Op::Tilde => {
            let t = algebra::tilde(&f);
            println!("‖out‖_1 = {}", show(&algebra::norm_k(&t, Exponent::ONE)));
            io::write_kfunction(a.out, &t, &gref)?;
            return Ok(());
        }
        Op::Involution => algebra::involution_tau(&f),
        Op::Lift => {
            let psi = second()?.into_kfunction(&group)?;
            println!("‖ψ‖_1 = {}", show(&algebra::norm_k(&psi, Exponent::ONE)));
            let phi = PhiDensity::new(f)?;
            algebra::lift_phi(&phi, &psi)?
        }
        Op::ModuleAction => {
            let loaded = second()?;
            let p = a.p.or(loaded.p).unwrap_or(Exponent::ONE);
            let u = LpElement::new(loaded.into_gfunction(&group)?, p)?;
            println!("‖u‖_p = {}", show(&u.norm()));
            let out = module_action(&f, &u)?;
            println!("‖out‖_p = {}", show(&out.norm()));
            io::write_gfunction(a.out, &out.func, &gref, Some(p))?;
            return Ok(());
        }
        op => {
            let g = second()?.into_gfunction(&group)?;
            println!("‖g‖_1 = {}", show(&algebra::norm(&g, Exponent::ONE)));
            match op {
                Op::Rconv => algebra::rconv(&f, &g)?,
                Op::Lconv => algebra::lconv(&f, &g)?,
                Op::Tconv => algebra::tconv(&f, &g)?,
                Op::Standard => algebra::standard_conv_g(&f, &g)?,
                _ => unreachable!(),
            }
        }
    };
    println!("‖out‖_1 = {}", show(&algebra::norm(&result, Exponent::ONE)));
    io::write_gfunction(a.out, &result, &gref, None)?;
    Ok(())
}

fn run_verify<S: ScalarIo>(group: &Path, seed: u64, trials: usize, report: &Path) -> Outcome {
    let spec = io::read_group_spec(group)?;
    let g = build(&spec, Failure::Input)?;
    if let Some(v) = g.validate().violation {
        return Err(Failure::Input(format!("invalid group: {v}")));
    }
    let cfg = SuiteConfig {
        seed,
        trials,
        spec: Some(spec),
    };
    let mut rep = verify::run_suite::<S>(&g, &cfg);
    verify::write_report(&mut rep, report)?;
    for c in &rep.checks {
        let verdict = serde_json::to_value(c.verdict).unwrap_or(Value::Null);
        println!(
            "{:<36} {:<15} residual {:.3e}",
            c.check_id,
            verdict.as_str().unwrap_or("?"),
            c.residual
        );
    }
    let failed: Vec<&str> = rep
        .checks
        .iter()
        .filter(|c| c.verdict == Verdict::Fail)
        .map(|c| c.check_id.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failed checks: {}", failed.join(", "))))
    }
}

fn bench(sizes: &str, out: &Path, reps: usize, seed: u64) -> Outcome {
    let sizes = spectral::parse_sizes(sizes)?;
    let cfg = BenchConfig {
        reps,
        seed,
        ..BenchConfig::default()
    };
    let rows = spectral::bench(&sizes, cfg)?;
    let csv = spectral::to_csv(&rows);
    io::atomic_write(out, csv.as_bytes())?;
    print!("{csv}");
    Ok(())
}

fn continuum(grid: &Path, report: &Path) -> Outcome {
    let base = io::read_grid(grid)?;
    let rep = refinement_study(base)?;
    io::write_json(report, &serde_json::to_value(&rep).map_err(Error::from)?)?;
    for l in &rep.levels {
        println!(
            "N = {:>6}  delta err {:.2e}  projection {:.2e}  submult slack {:.2e}",
            l.n, l.delta_error, l.projection_residual, l.submult_slack
        );
    }
    println!("{} ({})", rep.verdict, rep.delta_convention);
    if rep.verdict == "consistent" {
        Ok(())
    } else {
        Err(Failure::Check("continuum study is inconsistent".into()))
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::GroupBuild { h, k, tau, out } => group_build(&h, &k, &tau, &out),
        Command::GroupValidate { group } => group_validate(&group),
        Command::Convolve {
            group,
            f,
            g,
            op,
            p,
            backend,
            out,
        } => {
            let p = match p.as_deref() {
                None => None,
                Some("inf") => Some(Exponent::Infinity),
                Some(s) => {
                    let x: f64 = s.parse().map_err(|_| Failure::Input(format!("bad exponent {s:?}")))?;
                    Some(Exponent::new(x)?)
                }
            };
            let args = ConvolveArgs {
                group: &group,
                f: &f,
                g: g.as_deref(),
                op,
                p,
                out: &out,
            };
            match backend {
                Backend::Exact => convolve::<GaussQ>(args),
                Backend::Float => convolve::<Complex64>(args),
            }
        }
        Command::Verify {
            group,
            seed,
            trials,
            backend,
            report,
        } => match backend {
            Backend::Exact => run_verify::<GaussQ>(&group, seed, trials, &report),
            Backend::Float => run_verify::<Complex64>(&group, seed, trials, &report),
        },
        Command::Bench { sizes, out, reps, seed } => bench(&sizes, &out, reps, seed),
        Command::Continuum { grid, report } => continuum(&grid, &report),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
