use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qst_core::bench::{run_bench, to_csv};
use qst_core::eigen::conjecture_scan;
use qst_core::rng::substream;
use qst_core::tomography::{gen_state, reconstruct, SparseState, TomographyConfig, DEFAULT_PATIENCE, DEFAULT_SAFETY};
use qst_core::verify::verify_unitary;
use qst_core::{PhaseConfig, QstError};

#[derive(Parser)]
#[command(name = "qst", version, about = "K-sparse state tomography simulator and circuit checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random K-sparse state as JSON.
    GenState(GenStateArgs),
    /// Compare dense, element-formula and path-sum constructions.
    VerifyUnitary(VerifyArgs),
    /// Check the closed-form eigenvectors over random phase draws.
    ConjectureScan(ScanArgs),
    /// Run the two-phase reconstruction on a state.
    Tomography(TomographyArgs),
    /// Time the element formula and the dense circuit.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct GenStateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Floor on every |c_k|^2.
    #[arg(long, default_value_t = 0.0)]
    min_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pass iff every difference is strictly below this.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Eigenphases closer than this count as equal.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TomographyArgs {
    /// SparseState JSON file. When omitted, a state is generated from
    /// --n, --k and --min-prob.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    min_prob: f64,
    #[arg(long, default_value_t = 8)]
    t: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 100_000)]
    shots_mag: u64,
    #[arg(long, default_value_t = 100_000)]
    shots_phase: u64,
    #[arg(long, default_value_t = DEFAULT_PATIENCE)]
    patience: usize,
    /// Known lower bound on min |c_k|^2; fixes the phase-1 repetition count.
    #[arg(long)]
    min_prob_hint: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAFETY)]
    safety: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exit 0 iff the fidelity reaches this.
    #[arg(long, default_value_t = 0.99)]
    fidelity_threshold: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 24)]
    n_max: usize,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<QstError> for Failure {
    fn from(e: QstError) -> Self {
        match e {
            QstError::Argument(_) | QstError::Io(_) | QstError::Json(_) | QstError::Resource(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_json(output: &Output, value: &impl Serialize) -> Result<(), Failure> {
    if output.format != Format::Json {
        return Err(Failure::Usage("this subcommand only writes JSON".into()));
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    emit(&output.out, &text)
}

fn gen_state_cmd(a: GenStateArgs) -> Result<(), Failure> {
    let state = gen_state(a.n, a.k, a.min_prob, &mut substream(a.seed, 0, 0))?;
    emit_json(&a.output, &state)
}

fn verify_cmd(a: VerifyArgs) -> Result<(), Failure> {
    let report = verify_unitary(a.n, a.trials, a.seed, a.tol)?;
    emit_json(&a.output, &report)?;
    eprintln!("max diff {:.3e} (tol {:.1e}): {}", report.max_diff, a.tol, if report.pass { "pass" } else { "FAIL" });
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Check("verification failed".into()))
    }
}

fn scan_cmd(a: ScanArgs) -> Result<(), Failure> {
    let report = conjecture_scan(a.n, a.trials, a.seed, a.tol)?;
    emit_json(&a.output, &report)?;
    eprintln!(
        "{} trials: conforming {:.3}, distinct {:.3}, {} failure exemplars",
        report.trials,
        report.summary.conforming_fraction,
        report.summary.distinct_fraction,
        report.failures.len()
    );
    Ok(())
}

fn load_state(path: &PathBuf) -> Result<SparseState, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn tomography_cmd(a: TomographyArgs) -> Result<(), Failure> {
    let truth = match (&a.state, a.n, a.k) {
        (Some(path), _, _) => load_state(path)?,
        (None, Some(n), Some(k)) => gen_state(n, k, a.min_prob, &mut substream(a.seed, 0, 0))?,
        _ => return Err(Failure::Usage("give --state FILE or both --n and --k".into())),
    };
    let cfg = PhaseConfig::random(truth.n(), &mut substream(a.seed, 0, 3));
    let tcfg = TomographyConfig {
        min_prob_hint: a.min_prob_hint,
        patience: a.patience,
        safety: a.safety,
        shots_mag: a.shots_mag,
        shots_phase: a.shots_phase,
        seed: a.seed,
        ..TomographyConfig::default_for(a.t, a.epsilon)
    };
    let report = reconstruct(&truth, &cfg, &tcfg)?;
    emit_json(&a.output, &report)?;
    eprintln!(
        "fidelity {:.6}, repetitions {}, measurement settings {}, support {}/{}",
        report.fidelity,
        report.repetitions_used,
        report.measurement_settings,
        report.support_found.len(),
        report.truth_k
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.fidelity >= a.fidelity_threshold {
        Ok(())
    } else {
        Err(Failure::Check(format!("fidelity {} below {}", report.fidelity, a.fidelity_threshold)))
    }
}

fn bench_cmd(a: BenchArgs) -> Result<(), Failure> {
    let rows = run_bench(a.n_min, a.n_max, a.reps, a.seed)?;
    let text = match a.format {
        Format::Csv => to_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&rows).map_err(|e| Failure::Usage(e.to_string()))?,
    };
    emit(&a.out, text.trim_end())
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("QST_THREADS") {
        let n: usize = v.parse().map_err(|_| Failure::Usage(format!("QST_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Failure::Usage("QST_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match cli.command {
        Command::GenState(a) => gen_state_cmd(a),
        Command::VerifyUnitary(a) => verify_cmd(a),
        Command::ConjectureScan(a) => scan_cmd(a),
        Command::Tomography(a) => tomography_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("qst: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("qst: {msg}");
            ExitCode::from(2)
        }
    }
}
