use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use ultracoherent::circuit::{compile, parse, run};
use ultracoherent::fock::{cutoff_for, inner, represent_state, tail_bound, FockBasis};
use ultracoherent::json::{
    complex_to_json, matrix_from_json, state_from_json, state_to_json, symplectic_from_json,
    symplectic_to_json, takagi_to_json, vector_to_json, MatrixJson, StateJson, SymplecticJson,
};
use ultracoherent::linalg::takagi;
use ultracoherent::representation::{act, multiplier_with_product};
use ultracoherent::state::{overlap, UltracoherentState};
use ultracoherent::symplectic::{compose_with_tol, conjugated_free_field, SymplecticElement};
use ultracoherent::verify::{run_suite, Suite, VerifyConfig};
use ultracoherent::Error;

#[derive(Parser)]
#[command(
    name = "uc",
    version,
    about = "Ultracoherent vectors, symplectic transformations and a Fock-space oracle"
)]
struct Cli {
    /// Numerical tolerance for input validation and verification.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Seed for randomized verification.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Inner product of two states, optionally checked against the Fock oracle.
    Overlap {
        #[arg(long)]
        state_a: PathBuf,
        #[arg(long)]
        state_b: PathBuf,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Applies T(R) to a state.
    Apply {
        #[arg(long)]
        symplectic: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Product A∘B of two symplectic elements and the multiplier χ(A, B).
    Compose {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Runs a circuit on the vacuum.
    Run {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        dim: usize,
        /// Also print the compiled normal form e^{logPhase} W(h) T(R).
        #[arg(long)]
        normal_form: bool,
    },
    /// Runs the seeded verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Takagi factorization A = F diag(α) Fᵀ of a symmetric matrix.
    Takagi {
        #[arg(long)]
        matrix: PathBuf,
    },
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Subcommand)]
enum Demo {
    /// R₁ exp(−i diag(m) t) R₁⁻¹ in closed form.
    FreeField {
        #[arg(long)]
        symplectic: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        t: f64,
    },
}

enum Failure {
    Input(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::InternalInconsistency(msg)) => Failure::Verification(msg.clone()),
            _ => Failure::Input(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_state(path: &Path, tol: f64) -> anyhow::Result<UltracoherentState> {
    let j: StateJson = read_json(path)?;
    state_from_json(&j, tol).with_context(|| format!("invalid state in {}", path.display()))
}

fn load_symplectic(path: &Path, tol: f64) -> anyhow::Result<SymplecticElement> {
    let j: SymplecticJson = read_json(path)?;
    symplectic_from_json(&j, tol)
        .with_context(|| format!("invalid symplectic element in {}", path.display()))
}

fn emit(format: Format, value: &Value, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{value}"),
        Format::Text => println!("{}", text()),
    }
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn fmt_complex(z: Complex64) -> String {
    format!(
        "{:.15e} {} {:.15e}i",
        z.re,
        if z.im < 0.0 { '-' } else { '+' },
        z.im.abs()
    )
}

fn cmd_overlap(
    cli: &Cli,
    a: &Path,
    b: &Path,
    oracle: bool,
    cutoff: Option<usize>,
) -> Result<(), Failure> {
    let x = load_state(a, cli.tol)?;
    let y = load_state(b, cli.tol)?;
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        }
        .into());
    }
    let value = overlap(&x, &y)?;
    let mut out = json!({"overlap": complex_to_json(value)});
    let mut text = format!("overlap: {}", fmt_complex(value));
    let mut ok = true;
    if oracle {
        let n = match cutoff {
            Some(n) => n,
            None => {
                let nx = cutoff_for(&x, 1e-12, 8, 200)?;
                let ny = cutoff_for(&y, 1e-12, 8, 200)?;
                nx.zip(ny).map(|(p, q)| p.max(q)).ok_or_else(|| {
                    anyhow!("no cutoff up to 200 reaches the tail target; pass --cutoff")
                })?
            }
        };
        let basis = FockBasis::shared(x.dim(), n)?;
        let oracle_value = inner(&represent_state(&x, &basis)?, &represent_state(&y, &basis)?)?;
        let (tx, ty) = (tail_bound(&x, n)?, tail_bound(&y, n)?);
        let bound = (tx * ty).sqrt();
        let diff = (oracle_value - value).norm();
        let rel = diff / value.norm().max(oracle_value.norm()).max(f64::MIN_POSITIVE);
        ok = diff <= bound + cli.tol * value.norm().max(1.0) || rel <= 1e-6;
        out["oracle"] = json!({
            "cutoff": n,
            "value": complex_to_json(oracle_value),
            "abs_diff": diff,
            "rel_diff": rel,
            "tail_bound_a": tx,
            "tail_bound_b": ty,
            "agrees": ok,
        });
        text.push_str(&format!(
            "\noracle (cutoff {n}): {}\nabs diff {diff:.3e}, rel diff {rel:.3e}, truncation bound {bound:.3e}\n{}",
            fmt_complex(oracle_value),
            if ok { "agrees" } else { "DISAGREES" }
        ));
    }
    emit(cli.format, &out, || text);
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification(
            "oracle disagrees with closed form".into(),
        ))
    }
}

fn cmd_run(cli: &Cli, path: &Path, dim: usize, normal_form: bool) -> Result<(), Failure> {
    if dim == 0 {
        return Err(anyhow!("--dim must be positive").into());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let gates = parse(&text).with_context(|| format!("in {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let tol = cli.tol;
    let compiled = compile(&gates, dim, |source| {
        let p = base.join(source);
        load_symplectic(&p, tol).map_err(|e| Error::Input(format!("{e:#}")))
    })?;
    let state = run(&compiled)?;
    let mut out = serde_json::to_value(state_to_json(&state)).expect("serializable");
    if normal_form {
        out = json!({
            "state": out,
            "normal_form": {
                "h": vector_to_json(&compiled.h),
                "R": symplectic_to_json(&compiled.r),
                "log_phase": [compiled.log_phase.re, compiled.log_phase.im],
            }
        });
    }
    emit(cli.format, &out, || pretty(&out));
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(anyhow!("--tol must be a positive number").into());
    }
    match &cli.command {
        Command::Overlap {
            state_a,
            state_b,
            oracle,
            cutoff,
        } => cmd_overlap(cli, state_a, state_b, *oracle, *cutoff),
        Command::Apply { symplectic, state } => {
            let r = load_symplectic(symplectic, cli.tol)?;
            let x = load_state(state, cli.tol)?;
            let out = serde_json::to_value(state_to_json(&act(&r, &x)?)).expect("serializable");
            emit(cli.format, &out, || pretty(&out));
            Ok(())
        }
        Command::Compose { a, b } => {
            let ra = load_symplectic(a, cli.tol)?;
            let rb = load_symplectic(b, cli.tol)?;
            let product = compose_with_tol(&ra, &rb, cli.tol)?;
            let chi = multiplier_with_product(&ra, &rb, &product)?.value();
            let out = json!({
                "product": symplectic_to_json(&product),
                "multiplier": complex_to_json(chi),
            });
            emit(cli.format, &out, || pretty(&out));
            Ok(())
        }
        Command::Run {
            circuit,
            dim,
            normal_form,
        } => cmd_run(cli, circuit, *dim, *normal_form),
        Command::Verify { suite, trials } => {
            let suite: Suite = suite.parse()?;
            let cfg = VerifyConfig {
                seed: cli.seed,
                trials: *trials,
                tol: cli.tol,
            };
            let report = run_suite(suite, &cfg);
            let out = serde_json::to_value(&report).expect("serializable");
            emit(cli.format, &out, || report.to_string());
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "{} checks failed",
                    report.failures()
                )))
            }
        }
        Command::Takagi { matrix } => {
            let m: MatrixJson = read_json(matrix)?;
            let a = matrix_from_json(&m)?;
            if a.nrows() != a.ncols() {
                return Err(Error::NotSquare {
                    rows: a.nrows(),
                    cols: a.ncols(),
                }
                .into());
            }
            let scale = 1.0 + a.norm();
            let t = takagi(&a, cli.tol * scale)?;
            let residual = (&a - t.reconstruct()).norm();
            let mut out = serde_json::to_value(takagi_to_json(&t)).expect("serializable");
            out["residual"] = json!(residual);
            emit(cli.format, &out, || pretty(&out));
            Ok(())
        }
        Command::Demo(Demo::FreeField {
            symplectic,
            spectrum,
            t,
        }) => {
            let r1 = load_symplectic(symplectic, cli.tol)?;
            let m: Vec<f64> = read_json(spectrum)?;
            let r2 = conjugated_free_field(&r1, &m, *t)?;
            let out = serde_json::to_value(symplectic_to_json(&r2)).expect("serializable");
            emit(cli.format, &out, || pretty(&out));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
