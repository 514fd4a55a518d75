use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ncqbv_core::gates::{affine_envelope, staircase_value};
use ncqbv_core::scenario::{build_service_curves, evaluate};
use ncqbv_core::sim::{run, validate_scaling};
use ncqbv_core::{ArrivalPattern, GridSpec, Scenario, SimConfig};
use serde_json::json;

use crate::error::CliError;
use crate::output::{create, num, write_curve, write_sim_stats, write_sweep};
use crate::parallel::{sweep, worker_count};
use crate::scenario_file::ScenarioFile;

/// Stochastic delay bounds for 802.1Qbv-gated queues over a lossy wireless
/// link with retransmissions.
///
/// Units are abstract: bits, time units and bits per time unit.
#[derive(Debug, Parser)]
#[command(name = "ncqbv", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the delay bound, reliability and stability of every queue.
    Bound {
        scenario: PathBuf,
        /// Loss probability, overriding `channel.p`.
        #[arg(long)]
        p: Option<f64>,
        /// Also write the scenario with every default filled in (`-` for
        /// standard output).
        #[arg(long, value_name = "PATH")]
        dump_normalized: Option<PathBuf>,
    },
    /// Evaluate every queue over a grid of loss probabilities.
    Sweep {
        scenario: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        p_from: f64,
        #[arg(long, default_value_t = 0.5)]
        p_to: f64,
        #[arg(long, default_value_t = 0.01)]
        p_step: f64,
        /// CSV destination; standard output when absent. Run metadata goes
        /// next to it as `<out>.meta.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Dump the gate staircase, its affine envelope and the service curve
    /// of every queue as `t,value` tables.
    Curves {
        scenario: PathBuf,
        /// Defaults to ten times the longest cycle plus the detection wait.
        #[arg(long)]
        horizon: Option<f64>,
        /// Defaults to the smallest gate or wait duration over 100.
        #[arg(long)]
        step: Option<f64>,
        /// Loss probability used for service curves that depend on it.
        #[arg(long)]
        p: Option<f64>,
        /// Output directory; created if missing.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Run the Monte Carlo simulator and report per-queue delay statistics.
    Simulate {
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to 200 of the longest gate cycles.
        #[arg(long)]
        duration: Option<f64>,
        /// Defaults to the smaller of the shortest open window over 100 and
        /// one packet transmission time.
        #[arg(long)]
        slot: Option<f64>,
        /// Defaults to the smallest `l_max`.
        #[arg(long)]
        packet_size: Option<f64>,
        #[arg(long, value_enum, default_value_t = Pattern::Greedy)]
        pattern: Pattern,
        /// Loss probability, overriding `channel.p`.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Measure how often a Bernoulli loss process exceeds its scaling curve
    /// over some suffix window.
    ValidateScaling {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 3.3344e-4)]
        eps: f64,
        /// Window length in bits.
        #[arg(long)]
        b: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pattern {
    Greedy,
    Periodic,
}

impl From<Pattern> for ArrivalPattern {
    fn from(p: Pattern) -> Self {
        match p {
            Pattern::Greedy => ArrivalPattern::Greedy,
            Pattern::Periodic => ArrivalPattern::Periodic,
        }
    }
}

struct Loaded {
    file: ScenarioFile,
    scenario: Scenario,
}

fn load(path: &Path, p: Option<f64>) -> Result<Loaded, CliError> {
    let file = ScenarioFile::read(path)?;
    let mut scenario = file.to_scenario()?;
    if let Some(p) = p {
        scenario.channel = scenario.channel.with_loss(p)?;
    }
    Ok(Loaded { file, scenario })
}

/// Writes to `path`, or to standard output when it is `None`.
fn emit(
    path: Option<&Path>,
    force: bool,
    f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut file = create(p, force)?;
            f(&mut file)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

fn metadata_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_metadata(out: &Path, force: bool, value: serde_json::Value) -> Result<(), CliError> {
    let mut file = create(&metadata_path(out), force)?;
    let mut text = serde_json::to_string_pretty(&value).expect("metadata serializes");
    text.push('\n');
    file.write_all(text.as_bytes())?;
    Ok(())
}

pub fn run_command(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bound {
            scenario,
            p,
            dump_normalized,
        } => bound(&scenario, p, dump_normalized.as_deref()),
        Command::Sweep {
            scenario,
            p_from,
            p_to,
            p_step,
            out,
            force,
        } => cmd_sweep(&scenario, p_from, p_to, p_step, out.as_deref(), force),
        Command::Curves {
            scenario,
            horizon,
            step,
            p,
            out,
            force,
        } => curves(&scenario, horizon, step, p, &out, force),
        Command::Simulate {
            scenario,
            seed,
            duration,
            slot,
            packet_size,
            pattern,
            p,
            out,
            force,
        } => simulate(
            &scenario,
            seed,
            duration,
            slot,
            packet_size,
            pattern.into(),
            p,
            out.as_deref(),
            force,
        ),
        Command::ValidateScaling {
            p,
            eps,
            b,
            trials,
            seed,
            out,
            force,
        } => scaling(p, eps, b, trials, seed, out.as_deref(), force),
    }
}

fn bound(path: &Path, p: Option<f64>, dump: Option<&Path>) -> Result<(), CliError> {
    let Loaded { file, scenario } = load(path, p)?;
    if let Some(dump) = dump {
        let text = ScenarioFile::normalized(&scenario).to_json();
        if dump == Path::new("-") {
            print!("{text}");
        } else {
            fs::write(dump, text)?;
        }
    }
    let results = evaluate(&scenario, scenario.channel.loss)?;
    let mut out = String::new();
    for d in file.defaults_used() {
        out.push_str(&format!("# default {d}\n"));
    }
    out.push_str(&format!("# p={}\n", num(scenario.channel.loss)));
    let width = results
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(0)
        .max(5);
    out.push_str(&format!(
        "{:<width$}  {:>22}  {:>11}  {}\n",
        "queue", "bound", "reliability", "stable"
    ));
    for r in &results {
        out.push_str(&format!(
            "{:<width$}  {:>22}  {:>11.5}  {}\n",
            r.name,
            num(r.result.bound),
            r.result.reliability,
            r.result.stable
        ));
    }
    print!("{out}");
    if results.iter().all(|r| !r.result.stable) {
        return Err(CliError::AllUnstable);
    }
    Ok(())
}

fn cmd_sweep(
    path: &Path,
    from: f64,
    to: f64,
    step: f64,
    out: Option<&Path>,
    force: bool,
) -> Result<(), CliError> {
    let Loaded { file, scenario } = load(path, None)?;
    let result = sweep(&scenario, from, to, step, worker_count())?;
    emit(out, force, |w| write_sweep(w, &result.rows))?;
    if let Some(out) = out {
        write_metadata(
            out,
            force,
            json!({
                "command": "sweep",
                "p_from": from,
                "p_to": to,
                "p_step": step,
                "defaults_used": file.defaults_used(),
                "scenario": ScenarioFile::normalized(&scenario),
            }),
        )?;
    }
    if !result.rows.is_empty() && result.rows.iter().all(|r| !r.stable) {
        return Err(CliError::AllUnstable);
    }
    Ok(())
}

/// Grid times rounded to 12 decimals so they print without float noise.
fn grid_times(grid: GridSpec) -> impl Iterator<Item = f64> {
    (0..grid.len()).map(move |k| (grid.time(k) * 1e12).round() / 1e12)
}

fn curves(
    path: &Path,
    horizon: Option<f64>,
    step: Option<f64>,
    p: Option<f64>,
    out: &Path,
    force: bool,
) -> Result<(), CliError> {
    let Loaded { scenario, .. } = load(path, p)?;
    let default = scenario.default_grid();
    let grid = GridSpec::new(
        horizon.unwrap_or(default.horizon),
        step.unwrap_or(default.step),
    )?;
    fs::create_dir_all(out)?;
    let services = build_service_curves(&scenario, scenario.channel.loss)?;
    for (q, (_, service)) in scenario.queues.iter().zip(services) {
        let file = |kind: &str| out.join(format!("{}.{kind}.csv", q.name));
        let env = affine_envelope(&q.gate);
        write_curve(
            create(&file("staircase"), force)?,
            grid_times(grid).map(|t| (t, staircase_value(&q.gate, t))),
        )?;
        write_curve(
            create(&file("envelope"), force)?,
            grid_times(grid).map(|t| (t, env.evaluate(t))),
        )?;
        match service {
            Ok(beta) => write_curve(
                create(&file("service"), force)?,
                grid_times(grid).map(|t| (t, beta.evaluate(t))),
            )?,
            Err(e) => eprintln!("{}: no service curve ({e})", q.name),
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    path: &Path,
    seed: u64,
    duration: Option<f64>,
    slot: Option<f64>,
    packet_size: Option<f64>,
    pattern: ArrivalPattern,
    p: Option<f64>,
    out: Option<&Path>,
    force: bool,
) -> Result<(), CliError> {
    let Loaded { file, scenario } = load(path, p)?;
    let packet = packet_size.unwrap_or_else(|| {
        scenario
            .queues
            .iter()
            .map(|q| q.l_max)
            .fold(f64::INFINITY, f64::min)
    });
    let longest = scenario
        .queues
        .iter()
        .map(|q| q.gate.cycle())
        .fold(0.0, f64::max);
    let cfg = SimConfig {
        slot: slot.unwrap_or_else(|| SimConfig::default_slot(&scenario, packet)),
        duration: duration.unwrap_or(200.0 * longest),
        packet_size: packet,
        seed,
        pattern,
        scenario,
    };
    let bounds: Vec<f64> = evaluate(&cfg.scenario, cfg.scenario.channel.loss)?
        .iter()
        .map(|r| r.result.bound)
        .collect();
    let stats = run(&cfg)?;
    emit(out, force, |w| write_sim_stats(w, &stats, &bounds))?;
    if let Some(out) = out {
        write_metadata(
            out,
            force,
            json!({
                "command": "simulate",
                "seed": seed,
                "duration": cfg.duration,
                "slot": cfg.slot,
                "packet_size": cfg.packet_size,
                "pattern": format!("{:?}", cfg.pattern).to_lowercase(),
                "violation_bounds": bounds.iter().map(|&b| num(b)).collect::<Vec<_>>(),
                "defaults_used": file.defaults_used(),
                "scenario": ScenarioFile::normalized(&cfg.scenario),
            }),
        )?;
    }
    Ok(())
}

fn scaling(
    p: f64,
    eps: f64,
    b: u64,
    trials: u64,
    seed: u64,
    out: Option<&Path>,
    force: bool,
) -> Result<(), CliError> {
    let freq = validate_scaling(p, eps, b, trials, seed)?;
    emit(out, force, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["p", "eps", "b", "trials", "seed", "violation_freq"])?;
        csv.write_record([
            num(p),
            num(eps),
            b.to_string(),
            trials.to_string(),
            seed.to_string(),
            num(freq),
        ])?;
        csv.flush()?;
        Ok(())
    })
}
