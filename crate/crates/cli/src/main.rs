//! `besov-dh`: norms, solver runs and experiments from the command line.
//!
//! Exit status: 0 on success or a passing verdict, 1 on a failing verdict or a
//! run that did not converge, 2 on usage and configuration errors.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use besov_dh::chemin_lerner::Trajectory;
use besov_dh::experiments::{run_experiment, ExperimentKind, Verdict};
use besov_dh::littlewood_paley::{BesovIndex, DyadicPartition, Measure, ShellDecomposition};
use besov_dh::report::{extended_f64, line_chart_svg, series_to_csv, to_json, Series};
use besov_dh::solver::{evolve_with_diagnostics, fixed_point_solve};
use besov_dh::{dhf, Error};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "besov-dh", version, about = "Besov norms and a pseudospectral Debye-Hückel solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Directory for reports; overrides the config's `output`.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Overrides the config seed and `BESOV_DH_SEED`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Also write SVG charts next to CSV series.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Per-shell `L^p` norms of the Littlewood-Paley blocks of a field.
    Decompose {
        /// DHF1 field snapshot
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "2", value_parser = exponent)]
        p: f64,
        /// Write each block as `block_{j}.dhf1` into the output directory.
        #[arg(long)]
        blocks: bool,
    },
    /// Homogeneous Besov norm of a field, with the per-shell table as CSV.
    Norm {
        /// DHF1 field snapshot
        #[arg(long)]
        input: PathBuf,
        /// Regularity; defaults to the critical `-2 + n/p`.
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        #[arg(long, default_value = "2", value_parser = exponent)]
        p: f64,
        #[arg(long, default_value = "2", value_parser = exponent)]
        q: f64,
        #[arg(long, value_enum, default_value_t = MeasureArg::Normalized)]
        measure: MeasureArg,
    },
    /// Time stepping of the configured data.
    Evolve {
        /// Export every snapshot as DHF1 files.
        #[arg(long)]
        snapshots: bool,
    },
    /// Fixed-point solve of the configured data.
    Picard,
    /// One of the inequality audits.
    Audit {
        #[arg(long, value_enum)]
        kind: AuditKind,
    },
    /// A scripted experiment with a pass/fail verdict.
    Experiment {
        /// self_similar, equivariance, stability, threshold_sweep, product_audit, heat_audit or bernstein_audit
        #[arg(long, value_parser = kind)]
        kind: ExperimentKind,
    },
    /// Smallness-threshold sweep.
    Sweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Normalized,
    Lebesgue,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditKind {
    Product,
    Heat,
    Bernstein,
}

fn exponent(text: &str) -> Result<f64, String> {
    match extended_f64::parse(text) {
        Some(x) if x >= 1.0 => Ok(x),
        _ => Err(format!("expected an exponent >= 1 or \"inf\", got {text:?}")),
    }
}

fn kind(text: &str) -> Result<ExperimentKind, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::InvalidGrid(_)
            | Error::InvalidExponent(_)
            | Error::NotNeutral { .. }
            | Error::BadSnapshot(_)
            | Error::Refused(_) => Failure::Usage(e.to_string()),
            other => Failure::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

struct Output {
    dir: Option<PathBuf>,
    svg: bool,
}

impl Output {
    fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        if let Some(dir) = &self.dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<String, Failure> {
        let text = to_json(value)?;
        self.write(name, &text)?;
        Ok(text)
    }

    /// Wall time lives in its own file so the main report is reproducible.
    fn meta(&self, stem: &str, wall_time_seconds: f64) -> Result<(), Failure> {
        #[derive(Serialize)]
        struct Meta {
            wall_time_seconds: f64,
        }
        self.json(&format!("{stem}.meta.json"), &Meta { wall_time_seconds }).map(|_| ())
    }

    fn series(&self, stem: &str, title: &str, series: &[Series], log_y: bool) -> Result<(), Failure> {
        if series.is_empty() {
            return Ok(());
        }
        self.write(&format!("{stem}.csv"), &series_to_csv(series))?;
        if self.svg {
            self.write(&format!("{stem}.svg"), &line_chart_svg(title, series, log_y))?;
        }
        Ok(())
    }

    fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Failed(e.to_string()))?;
    }
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let out = Output { dir: cli.output.clone().or_else(|| cfg.output.clone()), svg: cli.svg };
    let seed = cfg.seed(cli.seed)?;
    match cli.command {
        Command::Decompose { input, p, blocks } => decompose(&input, p, blocks, &out),
        Command::Norm { input, s, p, q, measure } => norm(&input, s, p, q, measure, &out),
        Command::Evolve { snapshots } => evolve(&cfg, seed, snapshots, &out),
        Command::Picard => picard(&cfg, seed, &out),
        Command::Audit { kind } => {
            let kind = match kind {
                AuditKind::Product => ExperimentKind::ProductAudit,
                AuditKind::Heat => ExperimentKind::HeatAudit,
                AuditKind::Bernstein => ExperimentKind::BernsteinAudit,
            };
            experiment(&cfg, kind, seed, &out)
        }
        Command::Experiment { kind } => experiment(&cfg, kind, seed, &out),
        Command::Sweep => experiment(&cfg, ExperimentKind::ThresholdSweep, seed, &out),
    }
}

fn load_field(path: &Path) -> Result<besov_dh::SpectralField, Failure> {
    dhf::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn decompose(input: &Path, p: f64, blocks: bool, out: &Output) -> Outcome {
    let f = load_field(input)?;
    let shells = ShellDecomposition::new(f.grid(), DyadicPartition::new());
    let mut csv = String::from("j,shell_lp_norm,energy\n");
    for j in shells.shells() {
        let block = shells.block(&f, j);
        csv.push_str(&format!("{j},{:e},{:e}\n", shells.shell_lp_norm(&f, j, p), block.energy()));
        if blocks {
            if let Some(dir) = out.dir() {
                std::fs::create_dir_all(dir)?;
                dhf::save(dir.join(format!("block_{j}.dhf1")), &block)?;
            }
        }
    }
    if blocks && out.dir().is_none() {
        return Err(Failure::Usage("--blocks needs an output directory".into()));
    }
    print!("{csv}");
    out.write("decompose.csv", &csv)?;
    Ok(true)
}

fn norm(input: &Path, s: Option<f64>, p: f64, q: f64, measure: MeasureArg, out: &Output) -> Outcome {
    let f = load_field(input)?;
    let idx = match s {
        Some(s) => BesovIndex::new(s, p, q),
        None => BesovIndex::critical(f.grid().dim(), p, q),
    }?;
    let measure = match measure {
        MeasureArg::Normalized => Measure::Normalized,
        MeasureArg::Lebesgue => Measure::Lebesgue,
    };
    let shells = ShellDecomposition::new(f.grid(), DyadicPartition::new());
    let report = shells.besov_report(&f, &idx, measure);
    println!("besov_norm = {:e}", report.norm);
    print!("{}", report.to_csv());
    out.json("norm.json", &report)?;
    out.write("norm.csv", &report.to_csv())?;
    Ok(true)
}

fn amplitude_series(history: &[besov_dh::solver::AmplitudeSample]) -> Vec<Series> {
    vec![Series {
        name: "max |coeff|".into(),
        x: history.iter().map(|a| a.t).collect(),
        y: history.iter().map(|a| a.max_abs_coeff).collect(),
    }]
}

fn evolve(cfg: &RunConfig, seed: u64, snapshots: bool, out: &Output) -> Outcome {
    let (solver, data) = cfg.problem(seed)?;
    let started = std::time::Instant::now();
    match evolve_with_diagnostics(&data, &solver) {
        Ok((traj, diag)) => {
            println!("{}", out.json("evolve.json", &diag)?.trim_end());
            out.meta("evolve", started.elapsed().as_secs_f64())?;
            out.series("amplitude", "max |coefficient|", &amplitude_series(&diag.amplitude_history), true)?;
            export(&traj, snapshots, out)?;
            Ok(true)
        }
        Err(Error::BlowUp(diag)) => {
            println!("{}", out.json("blow_up.json", &diag)?.trim_end());
            out.series("amplitude", "max |coefficient|", &amplitude_series(&diag.amplitude_history), true)?;
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn export(traj: &Trajectory, snapshots: bool, out: &Output) -> Result<(), Failure> {
    if !snapshots {
        return Ok(());
    }
    let dir = out.dir().ok_or_else(|| Failure::Usage("--snapshots needs an output directory".into()))?;
    traj.export(dir.join("trajectory"))?;
    Ok(())
}

fn picard(cfg: &RunConfig, seed: u64, out: &Output) -> Outcome {
    let (solver, data) = cfg.problem(seed)?;
    let report = match fixed_point_solve(&data, &solver) {
        Ok((_, report)) => report,
        Err(Error::NotConverged(report)) => *report,
        Err(e) => return Err(e.into()),
    };
    println!("{}", out.json("picard.json", &report)?.trim_end());
    out.meta("picard", report.wall_time_seconds)?;
    let differences: Vec<(f64, f64)> = report
        .iterations
        .iter()
        .filter_map(|r| r.difference_norm.map(|d| (r.iteration as f64, d)))
        .collect();
    let series = vec![Series {
        name: "‖u^m - u^{m-1}‖".into(),
        x: differences.iter().map(|d| d.0).collect(),
        y: differences.iter().map(|d| d.1).collect(),
    }];
    out.series("picard", "Picard differences", &series, true)?;
    Ok(report.converged)
}

fn experiment(cfg: &RunConfig, kind: ExperimentKind, seed: u64, out: &Output) -> Outcome {
    let spec = cfg.experiment_spec(kind, seed)?;
    let verdict: Verdict = run_experiment(&spec)?;
    let stem = kind.name();
    println!("{}", out.json(&format!("{stem}.json"), &verdict)?.trim_end());
    out.meta(stem, verdict.wall_time_seconds)?;
    out.series(stem, stem, &verdict.series, true)?;
    Ok(verdict.passed)
}
