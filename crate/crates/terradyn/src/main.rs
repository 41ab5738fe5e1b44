use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use terradyn::commands;
use terradyn::{Error, Format, OutputConfig, Result, RunConfig};
use terradyn_core::Preset;

/// Beam-channel traversal: quasi-static drag simulation, trial energy
/// analysis and tactile-shell calibration.
#[derive(Parser)]
#[command(name = "terradyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.directory`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output formats to write; repeat for several (overrides `output.formats`).
    #[arg(long, value_name = "FORMAT")]
    format: Vec<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the shell through one channel.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Channel condition: free, d0, d1, d2 or d3.
        #[arg(long, value_name = "NAME")]
        preset: Option<Preset>,
        /// Sweep step [m].
        #[arg(long, value_name = "M", allow_hyphen_values = true)]
        dx: Option<f64>,
        /// Accepted for uniformity; the simulation is deterministic.
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
    },
    /// Simulate several channel conditions concurrently, one directory each.
    Batch {
        #[command(flatten)]
        common: Common,
        /// Channel conditions to run; repeat for several.
        #[arg(long, value_name = "NAME", default_values = ["d1", "d2", "d3"])]
        preset: Vec<Preset>,
        #[arg(long, value_name = "M", allow_hyphen_values = true)]
        dx: Option<f64>,
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
    },
    /// Energy metrics for a recorded trial.
    Analyze {
        /// Telemetry CSV.
        telemetry: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fit the readings-to-force map on a shuffled split of a dataset.
    Calibrate {
        /// Dataset CSV with columns s1..s8,fx_n,fy_n,fz_n.
        dataset: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Fraction of rows used for fitting.
        #[arg(long, default_value_t = 0.8)]
        split: f64,
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
    },
    /// List the named channel conditions.
    Presets {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
    /// Write a synthetic calibration dataset.
    SynthCalibration {
        /// Output CSV.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        count: usize,
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
        /// Mean force-equivalent reading noise [N]; 0 disables noise.
        #[arg(long, value_name = "N")]
        force_noise: Option<f64>,
        /// Full-rank noise-free readings labelled by an exact linear map.
        #[arg(long)]
        exact: bool,
    },
    /// Write a synthetic telemetry trace with a trapezoidal drag profile.
    SynthTelemetry {
        /// Output CSV.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Plateau drag [N].
        #[arg(long, default_value_t = 0.13)]
        drag: f64,
        #[arg(long, default_value_t = 2.0)]
        enter: f64,
        #[arg(long, default_value_t = 8.0)]
        exit: f64,
        #[arg(long, default_value_t = 10.0)]
        duration: f64,
        /// Gaussian noise on forces [N] and power [W].
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
    },
}

fn load(config: Option<&Path>) -> Result<RunConfig> {
    match config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn output(cfg: &RunConfig, common: &Common) -> (PathBuf, OutputConfig) {
    let mut out = cfg.output.clone();
    if let Some(dir) = &common.out {
        out.directory = dir.clone();
    }
    if !common.format.is_empty() {
        out.formats = common.format.clone();
        out.formats.sort();
        out.formats.dedup();
    }
    (out.directory.clone(), out)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { common, preset, dx, seed: _ } => {
            let mut cfg = load(common.config.as_deref())?;
            if let Some(p) = preset {
                cfg.set_preset(p);
            }
            if let Some(dx) = dx {
                cfg.sweep.dx = dx;
            }
            let (dir, out) = output(&cfg, &common);
            let label = preset.map_or_else(|| "run".to_string(), |p| p.name().to_string());
            let run = commands::simulate(&cfg, &label)?;
            report(&commands::write_simulation(&run, &dir, &out)?);
            let s = &run.summary;
            println!(
                "plateau mean drag {:.6} N, contact counts {:?}, max contacts {}",
                s.plateau_mean_drag_n, s.plateau_contact_counts, s.max_contact_count
            );
        }
        Command::Batch { common, preset, dx, seed: _ } => {
            let mut base = load(common.config.as_deref())?;
            if let Some(dx) = dx {
                base.sweep.dx = dx;
            }
            let (dir, out) = output(&base, &common);
            let runs: Vec<(String, RunConfig)> = preset
                .iter()
                .map(|p| {
                    let mut cfg = base.clone();
                    cfg.set_preset(*p);
                    (p.name().to_string(), cfg)
                })
                .collect();
            for s in commands::batch(&runs, &dir, &out)? {
                println!("{}: plateau mean drag {:.6} N, contact counts {:?}", s.label, s.plateau_mean_drag_n, s.plateau_contact_counts);
            }
        }
        Command::Analyze { telemetry, common } => {
            let cfg = load(common.config.as_deref())?;
            let (dir, out) = output(&cfg, &common);
            let a = commands::analyze(&telemetry, &cfg)?;
            report(&commands::write_analysis(&a, &dir, &out)?);
            let m = &a.metrics;
            println!(
                "drag energy {:.6} J, electrical energy {:.6} J, specific resistance {:.4}, {} strides",
                m.drag_energy,
                m.electrical_energy,
                m.specific_resistance,
                m.per_stride.len()
            );
        }
        Command::Calibrate { dataset, common, split, seed } => {
            let cfg = load(common.config.as_deref())?;
            let (dir, _) = output(&cfg, &common);
            let c = commands::calibrate_samples(terradyn::io::read_dataset(&dataset)?, split, seed)?;
            report(&commands::write_calibration(&c, &dir)?);
            println!("train rms {:?} N, test rms {:?} N", c.report.train_rms_n, c.report.test_rms_n);
        }
        Command::Presets { config } => {
            let cfg = load(config.as_deref())?;
            print!("{}", commands::presets_table(cfg.body.r_y));
        }
        Command::SynthCalibration { out, count, seed, force_noise, exact } => {
            let data = commands::synth_calibration(count, seed, force_noise, exact);
            terradyn::io::write_dataset(terradyn::io::create(&out)?, &data, &out)?;
            report(&[out]);
        }
        Command::SynthTelemetry { out, drag, enter, exit, duration, noise, seed } => {
            let records = commands::synth_telemetry(drag, enter, exit, duration, noise, seed)?;
            terradyn::io::write_telemetry(terradyn::io::create(&out)?, &records, &out)?;
            report(&[out]);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error: {}", Error::Usage(first.to_string()).one_line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.one_line());
            ExitCode::FAILURE
        }
    }
}
