//! Command-line front end for the partitioned trace distance library.
//!
//! Exit codes: 0 success (and verdict-consistent), 1 usage or parse error,
//! 2 validation error in an input file, 3 a property violation was detected
//! (probe witness, suite failure, contractivity violation, failed
//! majorization verdict).

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command as Process, ExitCode, Stdio};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use kyfan::distance::DistanceError;
use kyfan::harness::{blackbox_probe, probe_channel, ProbeOptions, ProbeOutcome, SuiteConfig};
use kyfan::majorization::{compare, OrderedVector};
use kyfan::measurement::{measure_pair, optimal_pvm};
use kyfan::{
    classical_partitioned_distance, configure_thread_pool, contractivity_report,
    contractivity_report_raw, distance_profile, jordan_decomposition, run_suite, DensityMatrix,
    HarnessError, SuiteKind,
};
use kyfan_cli::format::{
    emit_povm, emit_state, fmt_f64, parse_channel, parse_povm, parse_state, parse_vector,
    FormatError,
};

#[derive(Parser)]
#[command(
    name = "kyfan",
    version,
    about = "Partitioned trace distances between density matrices",
    after_help = "Files are JSON documents tagged by \"kind\" (state, vector, povm, kraus_list); \
                  see the project README for the schema. `-` reads a state from stdin."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// Seed for every randomized subcommand.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Override the default validation tolerance for input files.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads for randomized sweeps (1 forces sequential execution).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Partitioned trace distance between two states.
    Dist {
        state_a: PathBuf,
        state_b: PathBuf,
        /// Which distance to print (defaults to the whole trace distance).
        #[arg(short)]
        k: Option<usize>,
        /// Print the full profile D_1..D_d instead.
        #[arg(long, conflicts_with = "k")]
        profile: bool,
    },
    /// Singular values and Jordan spectra of the difference of two states.
    Spectrum { state_a: PathBuf, state_b: PathBuf },
    /// Partitioned classical distance between two probability vectors.
    Cdist {
        p: PathBuf,
        q: PathBuf,
        /// Which distance to print (defaults to the full L1 distance).
        #[arg(short)]
        k: Option<usize>,
    },
    /// Write the projective measurement that attains every D_k for a pair.
    PvmOpt {
        state_a: PathBuf,
        state_b: PathBuf,
        /// Output POVM file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Outcome statistics of a POVM on a state pair, with per-k comparison
    /// against the distance bound.
    Measure {
        povm: PathBuf,
        state_a: PathBuf,
        state_b: PathBuf,
    },
    /// Weak submajorization / majorization verdict for two vectors.
    Majorize {
        x: PathBuf,
        y: PathBuf,
        /// Require full majorization (equal totals), not just the weak form.
        #[arg(long)]
        strict: bool,
    },
    /// Kraus channel operations.
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
    /// Probe a channel as a black box and flag distance increases.
    Probe {
        /// Kraus file; omit when probing an external command via --exec.
        kraus: Option<PathBuf>,
        /// Treat an external command as the oracle: state file on stdin,
        /// state file on stdout. Runs sequentially.
        #[arg(long, conflicts_with = "kraus")]
        exec: Option<String>,
        /// Input dimension (required with --exec, checked against a file).
        #[arg(long)]
        dim: Option<usize>,
        /// Number of state pairs to probe.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        /// Write witness states to PREFIX-a.state / PREFIX-b.state.
        #[arg(long)]
        witness_out: Option<String>,
    },
    /// Run a verification suite (metric, convexity, povm-bound,
    /// majorization, contractivity).
    Suite {
        name: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        trials: usize,
    },
}

#[derive(Subcommand)]
enum ChannelAction {
    /// Classification flags with residuals.
    Check { kraus: PathBuf },
    /// Apply to a state; writes the output state file to stdout and the
    /// success probability to stderr.
    Apply { kraus: PathBuf, state: PathBuf },
    /// Per-k contractivity table for a state pair.
    Contract {
        kraus: PathBuf,
        state_a: PathBuf,
        state_b: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Parse(String),
    Validation(String),
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Parse(m) => CliError::Parse(m),
            FormatError::Validation(m) => CliError::Validation(m),
        }
    }
}

impl From<DistanceError> for CliError {
    fn from(e: DistanceError) -> Self {
        match e {
            DistanceError::KOutOfRange { .. } => CliError::Usage(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

macro_rules! validation_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*}
}
validation_from!(
    kyfan::StateError,
    kyfan::MeasurementError,
    kyfan::ChannelError,
    kyfan::MajorizationError,
    HarnessError
);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(m)) | Err(CliError::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Parse(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }
}

fn load_state(path: &Path, tol: Option<f64>) -> Result<DensityMatrix, CliError> {
    let text = read_input(path)?;
    parse_state(&text, tol).map_err(|e| match e {
        FormatError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        FormatError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
    })
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| fmt_f64(*v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let g = &cli.global;
    let sequential = g.jobs == Some(1);
    if let Some(jobs) = g.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        // Pool construction can only happen once; a busy pool is not an error.
        let _ = configure_thread_pool(jobs);
    }

    match cli.command {
        Command::Dist {
            state_a,
            state_b,
            k,
            profile,
        } => {
            let a = load_state(&state_a, g.tol)?;
            let b = load_state(&state_b, g.tol)?;
            let full = distance_profile(&a, &b)?;
            let selected: Vec<(usize, f64)> = if profile {
                (1..=full.dim())
                    .map(|k| (k, full.values()[k - 1]))
                    .collect()
            } else {
                let k = k.unwrap_or(full.dim());
                vec![(k, full.get(k)?)]
            };
            match g.format {
                Format::Text => {
                    for (k, v) in &selected {
                        println!("D_{k} = {}", fmt_f64(*v));
                    }
                }
                Format::Csv => {
                    println!("k,D_k");
                    for (k, v) in &selected {
                        println!("{k},{}", fmt_f64(*v));
                    }
                }
            }
            Ok(0)
        }

        Command::Spectrum { state_a, state_b } => {
            let a = load_state(&state_a, g.tol)?;
            let b = load_state(&state_b, g.tol)?;
            let jordan = jordan_decomposition(&a, &b)?;
            match g.format {
                Format::Text => {
                    println!("dim: {}", jordan.dim());
                    println!("s: {}", join(&jordan.singular_values));
                    println!("kappa: {}", join(&jordan.kappa));
                    println!("tau: {}", join(&jordan.tau));
                }
                Format::Csv => {
                    println!("quantity,index,value");
                    for (name, values) in [
                        ("s", &jordan.singular_values),
                        ("kappa", &jordan.kappa),
                        ("tau", &jordan.tau),
                    ] {
                        for (i, v) in values.iter().enumerate() {
                            println!("{name},{},{}", i + 1, fmt_f64(*v));
                        }
                    }
                }
            }
            Ok(0)
        }

        Command::Cdist { p, q, k } => {
            let pv = parse_vector(&read_input(&p)?)?;
            let qv = parse_vector(&read_input(&q)?)?;
            let k = k.unwrap_or(pv.len().max(1));
            let d = classical_partitioned_distance(&pv, &qv, k)?;
            match g.format {
                Format::Text => println!("D_{k} = {}", fmt_f64(d)),
                Format::Csv => {
                    println!("k,D_k");
                    println!("{k},{}", fmt_f64(d));
                }
            }
            Ok(0)
        }

        Command::PvmOpt {
            state_a,
            state_b,
            output,
        } => {
            let a = load_state(&state_a, g.tol)?;
            let b = load_state(&state_b, g.tol)?;
            let pvm = optimal_pvm(&a, &b)?;
            fs::write(&output, emit_povm(&pvm))
                .map_err(|e| CliError::Parse(format!("{}: {e}", output.display())))?;
            println!("outcomes: {}", pvm.n_outcomes());
            println!("wrote: {}", output.display());
            Ok(0)
        }

        Command::Measure {
            povm,
            state_a,
            state_b,
        } => {
            let measurement = parse_povm(&read_input(&povm)?, g.tol)?;
            let a = load_state(&state_a, g.tol)?;
            let b = load_state(&state_b, g.tol)?;
            let stats = measure_pair(&measurement, &a, &b)?;
            let quantum = distance_profile(&a, &b)?;
            let rows: Vec<(usize, f64, f64)> = (1..=a.dim())
                .map(|k| {
                    let classical =
                        classical_partitioned_distance(&stats.p, &stats.q, k.min(stats.p.len()))?;
                    Ok((k, classical, quantum.values()[k - 1]))
                })
                .collect::<Result<_, DistanceError>>()?;
            match g.format {
                Format::Text => {
                    println!("outcomes: {}", measurement.n_outcomes());
                    println!("p: {}", join(&stats.p));
                    println!("q: {}", join(&stats.q));
                    println!("gaps: {}", join(&stats.gaps_sorted));
                    for (k, classical, bound) in &rows {
                        println!(
                            "k={k}: classical {} quantum {}",
                            fmt_f64(*classical),
                            fmt_f64(*bound)
                        );
                    }
                }
                Format::Csv => {
                    println!("k,classical,quantum");
                    for (k, classical, bound) in &rows {
                        println!("{k},{},{}", fmt_f64(*classical), fmt_f64(*bound));
                    }
                }
            }
            Ok(0)
        }

        Command::Majorize { x, y, strict } => {
            let xv = OrderedVector::new(parse_vector(&read_input(&x)?)?)?;
            let yv = OrderedVector::new(parse_vector(&read_input(&y)?)?)?;
            let tol = g.tol.unwrap_or(kyfan::tol::SWEEP);
            let report = compare(&xv, &yv, tol);
            let ok = if strict {
                report.majorized()
            } else {
                report.weak
            };
            match g.format {
                Format::Text => {
                    println!("padded_len: {}", report.padded_len);
                    for (i, m) in report.margins.iter().enumerate() {
                        println!("k={}: margin {}", i + 1, fmt_f64(*m));
                    }
                    println!("total_difference: {}", fmt_f64(report.total_difference));
                    println!("weakly_submajorized: {}", report.weak);
                    println!("majorized: {}", report.majorized());
                    println!("verdict: {}", if ok { "pass" } else { "FAIL" });
                }
                Format::Csv => {
                    println!("k,margin");
                    for (i, m) in report.margins.iter().enumerate() {
                        println!("{},{}", i + 1, fmt_f64(*m));
                    }
                }
            }
            Ok(if ok { 0 } else { 3 })
        }

        Command::Channel { action } => run_channel(action, g),

        Command::Probe {
            kraus,
            exec,
            dim,
            pairs,
            witness_out,
        } => {
            if pairs == 0 {
                return Err(CliError::Usage("--pairs must be at least 1".into()));
            }
            let mut options = ProbeOptions::new(pairs, g.seed);
            options.sequential = sequential;
            let tol = g.tol;

            let verdict = match (kraus, exec) {
                (Some(path), None) => {
                    let channel = parse_channel(&read_input(&path)?)?;
                    if let Some(d) = dim {
                        if d != channel.dim_in() {
                            return Err(CliError::Usage(format!(
                                "--dim {d} does not match channel input dimension {}",
                                channel.dim_in()
                            )));
                        }
                    }
                    probe_channel(&channel, &options)?
                }
                (None, Some(command)) => {
                    let dim =
                        dim.ok_or_else(|| CliError::Usage("--dim is required with --exec".into()))?;
                    // External processes may not be reentrant.
                    options.sequential = true;
                    blackbox_probe(|state| exec_oracle(&command, state, tol), dim, &options)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "provide either a kraus file or --exec CMD".into(),
                    ))
                }
            };

            match g.format {
                Format::Text => {
                    println!("verdict: {}", verdict.outcome);
                    println!("pairs: {}", verdict.pairs_probed);
                    for (i, inc) in verdict.max_increase.iter().enumerate() {
                        println!("max_increase k={}: {}", i + 1, fmt_f64(*inc));
                    }
                    if let Some(w) = &verdict.witness {
                        println!(
                            "witness: k={} distance_in {} distance_out {}",
                            w.k,
                            fmt_f64(w.distance_in),
                            fmt_f64(w.distance_out)
                        );
                    }
                    println!("summary: {}", verdict.summary());
                }
                Format::Csv => {
                    println!("k,max_increase");
                    for (i, inc) in verdict.max_increase.iter().enumerate() {
                        println!("{},{}", i + 1, fmt_f64(*inc));
                    }
                }
            }
            if let (Some(prefix), Some(w)) = (&witness_out, &verdict.witness) {
                for (suffix, state) in [("a", &w.input_a), ("b", &w.input_b)] {
                    let path = format!("{prefix}-{suffix}.state");
                    fs::write(&path, emit_state(state))
                        .map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
                    eprintln!("wrote witness {path}");
                }
            }
            Ok(match verdict.outcome {
                ProbeOutcome::ConsistentWithSubunital => 0,
                ProbeOutcome::ViolatesSubunital => 3,
            })
        }

        Command::Suite { name, dim, trials } => {
            let kind: SuiteKind = name
                .parse()
                .map_err(|e: HarnessError| CliError::Usage(e.to_string()))?;
            let mut config = SuiteConfig::new(dim, trials, g.seed);
            config.sequential = sequential;
            let report = run_suite(kind, &config)?;
            match g.format {
                Format::Text => print!("{}", report.canonical_text()),
                Format::Csv => {
                    println!("assertion,worst_margin");
                    for (name, margin) in &report.worst_margins {
                        println!("{name},{}", fmt_f64(*margin));
                    }
                    println!("failures,{}", report.failures.len());
                }
            }
            eprintln!("wall_time: {:?}", report.wall_time);
            Ok(if report.passed() { 0 } else { 3 })
        }
    }
}

fn run_channel(action: ChannelAction, g: &GlobalArgs) -> Result<u8, CliError> {
    match action {
        ChannelAction::Check { kraus } => {
            let channel = parse_channel(&read_input(&kraus)?)?;
            let f = channel.flags();
            match g.format {
                Format::Text => {
                    println!("dim_in: {}", channel.dim_in());
                    println!("dim_out: {}", channel.dim_out());
                    println!("kraus_count: {}", channel.kraus().len());
                    println!(
                        "trace_preserving: {} (residual {})",
                        f.trace_preserving,
                        fmt_f64(f.trace_residual)
                    );
                    println!("trace_nonincreasing: {}", f.trace_nonincreasing);
                    println!(
                        "unital: {} (residual {})",
                        f.unital,
                        fmt_f64(f.unital_residual)
                    );
                    println!(
                        "subunital: {} (excess {})",
                        f.subunital,
                        fmt_f64(f.subunital_excess)
                    );
                    println!("bistochastic: {}", f.bistochastic());
                }
                Format::Csv => {
                    println!("flag,value,residual");
                    println!(
                        "trace_preserving,{},{}",
                        f.trace_preserving,
                        fmt_f64(f.trace_residual)
                    );
                    println!("trace_nonincreasing,{},", f.trace_nonincreasing);
                    println!("unital,{},{}", f.unital, fmt_f64(f.unital_residual));
                    println!("subunital,{},{}", f.subunital, fmt_f64(f.subunital_excess));
                    println!("bistochastic,{},", f.bistochastic());
                }
            }
            Ok(0)
        }

        ChannelAction::Apply { kraus, state } => {
            let channel = parse_channel(&read_input(&kraus)?)?;
            let rho = load_state(&state, g.tol)?;
            let (out, success) = channel.apply(&rho)?;
            print!("{}", emit_state(&out));
            eprintln!("success_probability: {}", fmt_f64(success));
            Ok(0)
        }

        ChannelAction::Contract {
            kraus,
            state_a,
            state_b,
        } => {
            let channel = parse_channel(&read_input(&kraus)?)?;
            let a = load_state(&state_a, g.tol)?;
            let b = load_state(&state_b, g.tol)?;
            let report = if channel.flags().trace_preserving {
                contractivity_report(&channel, &a, &b)?
            } else {
                // Trace-nonincreasing maps are compared on raw outputs.
                eprintln!("note: channel is not trace-preserving; comparing unnormalized outputs");
                contractivity_report_raw(&channel, &a, &b)?
            };
            match g.format {
                Format::Text => {
                    for row in &report.rows {
                        println!(
                            "k={}: in {} out {}{}",
                            row.k,
                            fmt_f64(row.distance_in),
                            fmt_f64(row.distance_out),
                            if row.violated { " VIOLATION" } else { "" }
                        );
                    }
                    println!("submajorized: {}", report.submajorized);
                    println!("worst_increase: {}", fmt_f64(report.worst_increase));
                }
                Format::Csv => {
                    println!("k,distance_in,distance_out,violated");
                    for row in &report.rows {
                        println!(
                            "{},{},{},{}",
                            row.k,
                            fmt_f64(row.distance_in),
                            fmt_f64(row.distance_out),
                            row.violated
                        );
                    }
                }
            }
            Ok(if report.any_violation() { 3 } else { 0 })
        }
    }
}

/// Run an external command as a channel oracle: canonical state file on its
/// stdin, state file expected on its stdout.
fn exec_oracle(
    command: &str,
    state: &DensityMatrix,
    tol: Option<f64>,
) -> Result<DensityMatrix, HarnessError> {
    let fail = |message: String| HarnessError::OracleFailed { trial: 0, message };
    let mut child = Process::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| fail(format!("spawn failed: {e}")))?;
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(emit_state(state).as_bytes())
        .map_err(|e| fail(format!("write to oracle failed: {e}")))?;
    let output = child
        .wait_with_output()
        .map_err(|e| fail(format!("oracle did not finish: {e}")))?;
    if !output.status.success() {
        return Err(fail(format!("oracle exited with {}", output.status)));
    }
    let text = String::from_utf8(output.stdout)
        .map_err(|_| fail("oracle produced non-UTF8 output".into()))?;
    parse_state(&text, tol).map_err(|e| match e {
        FormatError::Parse(m) => fail(format!("oracle output: {m}")),
        FormatError::Validation(m) => HarnessError::OracleFailed {
            trial: 0,
            message: format!("oracle returned an invalid state: {m}"),
        },
    })
}
