use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use zeno_cli::report::{parse_purity_spec, CfiMode, CfiRequest, PhaseSpec};
use zeno_cli::studyrun::{execute_to_files, StudyFileError, StudyKind, StudyRun};
use zeno_cli::{exit_code_for, exit_codes, oracle_check, report};
use zeno_core::experiments::{ExperimentConfig, MonotonicityMode};
use zeno_core::fisher::EncodingParams;
use zeno_core::probe::NoiseModel;

#[derive(Parser)]
#[command(
    name = "zeno",
    version,
    about = "Fisher information for noisy GHZ-diagonal probes under dephasing",
    after_help = "Exit codes: 0 success, 1 validation failure, 2 usage, 3 resource cap, 4 I/O."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a single CFI/QFI report.
    Cfi(CfiArgs),
    /// Run a seeded Monte Carlo study and export CSV + manifest.
    Study(StudyArgs),
    /// Validate the closed forms against the density-matrix oracle.
    OracleCheck(OracleCheckArgs),
    /// Single-qubit readout: probabilities and CFI for a guess angle.
    Spq(SpqArgs),
}

#[derive(Args)]
struct ProbeArgs {
    /// Purity vector: comma list (e.g. 1,0.5,0.5), uniform:<x>, or tilted.
    #[arg(long)]
    p: String,
    /// Number of RPQs (required with uniform:/tilted).
    #[arg(long)]
    n: Option<usize>,
    /// Dephasing rate g >= 0.
    #[arg(long, default_value_t = 0.0)]
    g: f64,
    /// Inhomogeneity exponent alpha > 0.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
}

#[derive(Args)]
struct CfiArgs {
    #[command(flatten)]
    probe: ProbeArgs,
    /// Encoding time per run, or the literal `opt` for the optimal time.
    #[arg(long, default_value = "1")]
    t: String,
    /// Phase omega*t: a real or the literal `pi/2`.
    #[arg(long, default_value = "pi/2")]
    omega_t: String,
    /// Which Fisher information to compute.
    #[arg(long, default_value = "optimal")]
    mode: String,
    /// Output format.
    #[arg(long, default_value = "json")]
    format: String,
    /// Drop the last RPQ when n is odd (the optimal-readout remedy).
    #[arg(long)]
    discard_rpq: bool,
    /// Total time budget; adds F = T*cfi/t to the report.
    #[arg(long)]
    total_time: Option<f64>,
    /// Guess angle theta (spq mode).
    #[arg(long)]
    theta: Option<f64>,
    /// Use the phase-estimation convention (no t^2) for --mode uncorrelated.
    #[arg(long)]
    phase_convention: bool,
}

#[derive(Args)]
struct StudyArgs {
    /// approx | mono | symmetry | crossover | scaling | majorisation | spq-corr
    kind: String,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 11)]
    n_max: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 0.0)]
    g: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Monotonicity perturbation: single | full.
    #[arg(long, default_value = "single")]
    mode: String,
    /// Output base path; writes <out>.csv and <out>.manifest.json.
    #[arg(long, default_value = "zeno-study")]
    out: PathBuf,
    /// Thread cap for the sample loop (default: ZENO_THREADS or all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct OracleCheckArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Largest probe size n+1 to simulate (dense cap: 12).
    #[arg(long, default_value_t = 8)]
    max_qubits: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct SpqArgs {
    #[command(flatten)]
    probe: ProbeArgs,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Phase omega*t (a real; the guess is compared against it).
    #[arg(long)]
    omega_t: f64,
    /// Guess angle theta.
    #[arg(long)]
    theta: f64,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(exit_codes::USAGE)
}

fn core_error(err: &zeno_core::Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(err))
}

fn run_cfi(args: CfiArgs) -> ExitCode {
    let p = match parse_purity_spec(&args.probe.p, args.probe.n) {
        Ok(p) => p,
        Err(e) => return core_error(&e),
    };
    let noise = match NoiseModel::new(args.probe.g, args.probe.alpha) {
        Ok(n) => n,
        Err(e) => return core_error(&e),
    };
    let mode: CfiMode = match args.mode.parse() {
        Ok(m) => m,
        Err(e) => return core_error(&e),
    };
    let t = if args.t == "opt" {
        None
    } else {
        match args.t.parse::<f64>() {
            Ok(v) => Some(v),
            Err(_) => return usage_error("--t expects a number or the literal opt"),
        }
    };
    let omega_t = match PhaseSpec::parse(&args.omega_t) {
        Ok(w) => w,
        Err(e) => return core_error(&e),
    };
    let request = CfiRequest {
        p,
        mode,
        noise,
        t,
        omega_t,
        total_time: args.total_time,
        theta: args.theta,
        discard_rpq: args.discard_rpq,
        phase_convention: args.phase_convention,
    };
    let report = match request.run() {
        Ok(r) => r,
        Err(e) => return core_error(&e),
    };
    match args.format.as_str() {
        "json" => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("serializable report")
            );
        }
        "csv" => {
            println!("mode,n,t,g,alpha,omega_t,p_mean_square,per_run_cfi,per_run_qfi,total_cfi");
            println!(
                "{},{},{},{},{},{},{},{},{},{}",
                args.mode,
                report.meta.n,
                report.meta.t,
                report.meta.g,
                report.meta.alpha,
                report.meta.omega_t,
                report.meta.p_mean_square,
                report.per_run_cfi,
                report.per_run_qfi,
                report.total_cfi.map(|v| format!("{v}")).unwrap_or_default(),
            );
        }
        other => return usage_error(&format!("unknown format '{other}' (json|csv)")),
    }
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    ExitCode::from(exit_codes::OK)
}

fn run_study(args: StudyArgs) -> ExitCode {
    let kind: StudyKind = match args.kind.parse() {
        Ok(k) => k,
        Err(msg) => return usage_error(&msg),
    };
    let cfg = ExperimentConfig {
        seed: args.seed,
        samples: args.samples,
        n_min: args.n_min,
        n_max: args.n_max,
        t: args.t,
        g: args.g,
        alpha: args.alpha,
    };
    let mono_mode = match args.mode.as_str() {
        "single" => MonotonicityMode::SingleCoordinate,
        "full" => MonotonicityMode::FullVector,
        other => return usage_error(&format!("unknown mono mode '{other}' (single|full)")),
    };
    let threads = args.threads.or_else(|| {
        std::env::var("ZENO_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let run = StudyRun {
        kind,
        cfg,
        mono_mode,
        threads,
    };
    match execute_to_files(&run, &args.out) {
        Ok((result, csv_path, manifest_path)) => {
            println!("{}", result.summary.render());
            eprintln!(
                "wrote {} and {}",
                csv_path.display(),
                manifest_path.display()
            );
            ExitCode::from(exit_codes::OK)
        }
        Err(StudyFileError::Study(e)) => core_error(&e),
        Err(StudyFileError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_codes::IO)
        }
    }
}

fn run_oracle_check(args: OracleCheckArgs) -> ExitCode {
    let cfg = oracle_check::OracleCheckConfig {
        samples: args.samples,
        max_qubits: args.max_qubits,
        seed: args.seed,
    };
    let report = match oracle_check::run(&cfg) {
        Ok(r) => r,
        Err(e) => return core_error(&e),
    };
    println!(
        "samples={} max_rel_cfi={:.3e} max_rel_qfi={:.3e} violations={}",
        report.samples,
        report.max_rel_cfi,
        report.max_rel_qfi,
        report.violations.len()
    );
    if report.passed() {
        ExitCode::from(exit_codes::OK)
    } else {
        for v in &report.violations {
            eprintln!(
                "violation: {} sample {}: closed={} oracle={} rel={:.3e}",
                v.quantity, v.index, v.closed, v.oracle, v.rel
            );
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&v.manifest).expect("serializable manifest")
            );
        }
        ExitCode::from(exit_codes::VALIDATION_FAILURE)
    }
}

fn run_spq(args: SpqArgs) -> ExitCode {
    let p = match parse_purity_spec(&args.probe.p, args.probe.n) {
        Ok(p) => p,
        Err(e) => return core_error(&e),
    };
    let noise = match NoiseModel::new(args.probe.g, args.probe.alpha) {
        Ok(n) => n,
        Err(e) => return core_error(&e),
    };
    let enc = match EncodingParams::new(args.t, args.omega_t) {
        Ok(e) => e,
        Err(e) => return core_error(&e),
    };
    let record = report::spq_record(&p, &enc, &noise, args.theta);
    println!(
        "{}",
        serde_json::to_string_pretty(&record).expect("serializable record")
    );
    if !record.expansion_valid {
        eprintln!("warning: guess mismatch outside the small-delta expansion window");
    }
    ExitCode::from(exit_codes::OK)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Cfi(args) => run_cfi(args),
        Command::Study(args) => run_study(args),
        Command::OracleCheck(args) => run_oracle_check(args),
        Command::Spq(args) => run_spq(args),
    }
}
