//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code:
//!
//! * `0` success
//! * `1` the channel failed validation, or a numerical check failed
//! * `2` I/O, format or usage error

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use unitarity::channels::{canonicalize, parse_channel_json, KrausChannel};
use unitarity::du::{du_bounds, du_with, DuOptions, OptimizerOptions};
use unitarity::harness::{
    distribution_csv, parse_trajectory_json, run_distribution, run_table1, run_tightness, run_witness,
    table1_csv, tightness_csv, uniform_grid, DistributionOptions, TightnessOptions, DEFAULT_THRESHOLD,
};
use unitarity::{ComplexMatrix, Error};

#[derive(Parser, Debug)]
#[command(name = "unitarity", version, about = "Degree of unitarity of quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a channel file is trace preserving.
    Validate { channel: PathBuf },
    /// Degree of unitarity of a channel, with its bounds.
    Du {
        channel: PathBuf,
        /// Haar-random optimizer restarts (in addition to two warm starts).
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Seed for the optimizer restarts.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Lower and upper bounds without running the optimizer.
    Bounds {
        channel: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// DU of the standard qubit channels against their closed forms.
    Table1 {
        /// Number of equally spaced parameters in [0, 1].
        #[arg(long, default_value_t = 51)]
        grid: usize,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower-bound errors on random channels. Also writes `<out>_by_ub.csv`.
    Tightness {
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Rejection-sample into DU bins of equal width.
        #[arg(long)]
        stratified: bool,
        #[arg(long, default_value_t = 2)]
        sys_dim: usize,
        #[arg(long, default_value_t = 2)]
        env_dim: usize,
        #[arg(long, default_value_t = 0.05)]
        bin_width: f64,
        /// Per-bin draw limit when stratifying.
        #[arg(long, default_value_t = 1_000_000)]
        attempt_cap: u64,
    },
    /// DU histograms per environment dimension, one CSV each: `<out>_d<d>.csv`.
    Distribution {
        #[arg(long)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,4")]
        env_dims: Vec<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, default_value_t = 2)]
        sys_dim: usize,
    },
    /// Flag DU increases along a channel trajectory.
    Witness {
        trajectory: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
}

enum Failure {
    Io(String),
    Core(Error),
    /// Ran fine, but the answer is "no".
    Rejected,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Rejected) => 1,
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Format(_) | Error::Parameter(_) | Error::Dimension(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Validate { channel } => validate(&channel, out),
        Command::Du {
            channel,
            restarts,
            seed,
            json,
        } => du_cmd(&channel, restarts, seed, json, out),
        Command::Bounds { channel, json } => bounds(&channel, json, out),
        Command::Table1 { grid, out: path } => table1(grid, path.as_deref(), out),
        Command::Tightness {
            samples,
            seed,
            out: path,
            stratified,
            sys_dim,
            env_dim,
            bin_width,
            attempt_cap,
        } => {
            let opts = TightnessOptions {
                samples,
                sys_dim,
                env_dim,
                seed,
                stratified,
                bin_width,
                attempt_cap,
                ..TightnessOptions::default()
            };
            tightness(&opts, &path, out, err)
        }
        Command::Distribution {
            samples,
            env_dims,
            seed,
            out: path,
            bins,
            sys_dim,
        } => {
            let opts = DistributionOptions {
                samples,
                sys_dim,
                env_dims,
                seed,
                bins,
                ..DistributionOptions::default()
            };
            distribution(&opts, &path, out)
        }
        Command::Witness { trajectory, threshold } => witness(&trajectory, threshold, out),
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

/// Parses a channel file; structural problems are format errors, a
/// non-trace-preserving Kraus set is left for the caller to judge.
fn load_channel(path: &Path) -> std::result::Result<KrausChannel, Failure> {
    let text = read(path)?;
    parse_channel_json(&text).map_err(|e| match e {
        Error::Format(m) => Failure::Core(Error::Format(format!("{}: {m}", path.display()))),
        other => Failure::Core(other),
    })
}

fn validate(path: &Path, out: &mut dyn Write) -> Outcome {
    let ch = load_channel(path)?;
    let r = ch.validate();
    let verdict = if r.passed { "valid" } else { "invalid" };
    emit(
        out,
        &format!(
            "{verdict}: dim {} with {} Kraus operators, ‖Σ E†E − I‖_F = {:.3e} (tolerance {:.0e})\n",
            ch.dim(),
            ch.len(),
            r.residual,
            r.tolerance
        ),
    )?;
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    serde_json::to_value(m).expect("matrices serialize")
}

fn matrix_text(m: &ComplexMatrix) -> String {
    let mut s = String::new();
    for r in 0..m.rows() {
        s.push_str("  [");
        for (c, z) in m.row(r).iter().enumerate() {
            if c > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{:+.6}{:+.6}i", z.re, z.im);
        }
        s.push_str("]\n");
    }
    s
}

fn du_cmd(path: &Path, restarts: usize, seed: u64, as_json: bool, out: &mut dyn Write) -> Outcome {
    let ch = load_channel(path)?;
    ch.ensure_valid()?;
    let opts = DuOptions {
        optimizer: OptimizerOptions {
            restarts,
            ..OptimizerOptions::default()
        },
        seed,
        ..DuOptions::default()
    };
    let (r, b) = du_with(&ch, &opts)?;
    if as_json {
        let v = json!({
            "value": r.value,
            "method": r.method,
            "lb": b.best_lower(),
            "lb1": b.lb1,
            "lb1_simplified": b.lb1_simplified,
            "lb2": b.lb2,
            "ub": b.ub,
            "iterations": r.iterations,
            "converged": r.converged,
            "monotone": r.monotone,
            "restarts": restarts,
            "seed": seed,
            "witness": matrix_json(r.witness.matrix()),
        });
        return emit(out, &format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
    }
    let mut s = String::new();
    let _ = writeln!(s, "# seed={seed} restarts={restarts}");
    let _ = writeln!(s, "du     {:.9}", r.value);
    let _ = writeln!(s, "lb     {:.9}  (lb1 {:.9}, lb2 {:.9})", b.best_lower(), b.lb1, b.lb2);
    let _ = writeln!(s, "ub     {:.9}", b.ub);
    let _ = writeln!(s, "method {}", r.method.name());
    if r.method == unitarity::DuMethod::NumericalOptimizer {
        let _ = writeln!(
            s,
            "best run: {} iterations, converged {}, monotone {}",
            r.iterations, r.converged, r.monotone
        );
    }
    let _ = writeln!(s, "witness unitary:");
    s.push_str(&matrix_text(r.witness.matrix()));
    emit(out, &s)
}

fn bounds(path: &Path, as_json: bool, out: &mut dyn Write) -> Outcome {
    let ch = load_channel(path)?;
    ch.ensure_valid()?;
    let b = du_bounds(&canonicalize(&ch)?)?;
    if as_json {
        let v = json!({
            "lb1": b.lb1,
            "lb1_simplified": b.lb1_simplified,
            "lb2": b.lb2,
            "ub": b.ub,
            "singular_values": b.singular_values,
        });
        return emit(out, &format!("{}\n", serde_json::to_string_pretty(&v).expect("json")));
    }
    let mut s = String::new();
    let _ = writeln!(s, "lb1            {:.9}", b.lb1);
    let _ = writeln!(s, "lb1_simplified {:.9}", b.lb1_simplified);
    let _ = writeln!(s, "lb2            {:.9}", b.lb2);
    let _ = writeln!(s, "ub             {:.9}", b.ub);
    for (i, sv) in b.singular_values.iter().enumerate() {
        let list: Vec<String> = sv.iter().map(|x| format!("{x:.6}")).collect();
        let _ = writeln!(s, "sigma[{i}]       {}", list.join(" "));
    }
    emit(out, &s)
}

fn table1(grid: usize, path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    if grid == 0 {
        return Err(Error::Parameter("--grid must be at least 1".into()).into());
    }
    let report = run_table1(&uniform_grid(grid))?;
    let csv = table1_csv(&report);
    match path {
        Some(p) => {
            write_file(p, &csv)?;
            emit(
                out,
                &format!(
                    "wrote {} rows to {}; max |DU - closed form| = {:.3e}\n",
                    report.rows.len(),
                    p.display(),
                    report.max_deviation()
                ),
            )
        }
        None => emit(out, &csv),
    }
}

/// `dir/name.csv` → `dir/name<suffix>.csv`
fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

fn tightness(opts: &TightnessOptions, path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let report = run_tightness(opts)?;
    write_file(path, &tightness_csv(&report.records, &report))?;
    let by_ub = with_suffix(path, "_by_ub");
    write_file(&by_ub, &tightness_csv(&report.by_upper_bound(), &report))?;
    for b in &report.underfilled {
        let _ = writeln!(
            err,
            "warning: DU bin [{:.2}, {:.2}) holds {} of {} records",
            b.lo, b.hi, b.filled, b.target
        );
    }
    let worst = |pred: &dyn Fn(&unitarity::harness::TightnessRecord) -> bool| {
        report
            .records
            .iter()
            .filter(|r| pred(r))
            .map(|r| r.max_lb_err())
            .fold(0.0, f64::max)
    };
    let mut s = String::new();
    let _ = writeln!(s, "# seed={} samples={} env_dim={}", opts.seed, opts.samples, opts.env_dim);
    let _ = writeln!(
        s,
        "wrote {} records to {} (by DU) and {} (by upper bound)",
        report.records.len(),
        path.display(),
        by_ub.display()
    );
    let _ = writeln!(
        s,
        "max lower-bound error: {:.3e} where DU > 0.4 (threshold 1e-3), {:.3e} where ub > 0.8 (threshold 1e-2)",
        worst(&|r| r.du_value > 0.4),
        worst(&|r| r.ub > 0.8)
    );
    emit(out, &s)
}

fn distribution(opts: &DistributionOptions, path: &Path, out: &mut dyn Write) -> Outcome {
    let hists = run_distribution(opts)?;
    let mut s = String::new();
    let _ = writeln!(s, "# seed={} samples={}", opts.seed, opts.samples);
    for h in &hists {
        let file = with_suffix(path, &format!("_d{}", h.env_dim));
        write_file(&file, &distribution_csv(h))?;
        let _ = writeln!(
            s,
            "env_dim={} mean={:.6} std_error={:.2e} mean_lb1={:.6} -> {}",
            h.env_dim,
            h.mean,
            h.std_error,
            h.mean_lb1,
            file.display()
        );
    }
    for w in hists.windows(2) {
        let gap = (w[0].mean - w[1].mean) / (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        let _ = writeln!(
            s,
            "mean(d={}) - mean(d={}) = {:.3e} ({gap:.1} combined standard errors)",
            w[0].env_dim,
            w[1].env_dim,
            w[0].mean - w[1].mean
        );
    }
    emit(out, &s)
}

fn witness(path: &Path, threshold: f64, out: &mut dyn Write) -> Outcome {
    let traj = parse_trajectory_json(&read(path)?)?;
    let report = run_witness(&traj, threshold)?;
    let mut s = String::from("time,du\n");
    for (t, v) in report.times.iter().zip(&report.du) {
        let _ = writeln!(s, "{t},{v:.12}");
    }
    for f in &report.flagged {
        let _ = writeln!(
            s,
            "# DU increases by {:.3e} between t={} and t={}",
            f.increase, f.from_time, f.to_time
        );
    }
    let _ = writeln!(s, "# threshold={threshold:e} verdict: {}", report.verdict());
    emit(out, &s)
}
