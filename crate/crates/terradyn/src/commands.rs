//! Command implementations shared by the binary and the tests.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use terradyn_core::calibration::{self, SensorForwardModel};
use terradyn_core::metrics::trial_metrics;
use terradyn_core::simulator::sweep_with;
use terradyn_core::telemetry::{self, detect_window, ramp_profile, SyntheticTrial};
use terradyn_core::{ForceTrace, Preset, TelemetryRecord, TrialMetrics};

use crate::config::{Format, OutputConfig, RunConfig};
use crate::error::{Error, Result};
use crate::io::{self, fmt_f64, to_json, write_file, ModelFile};
use crate::report::{BoxStats, CalibrationReport, MetricsReport, SimulationSummary};
use crate::svg::{LinePlot, Series};

pub struct SimulationRun {
    pub label: String,
    pub trace: ForceTrace,
    pub summary: SimulationSummary,
    /// First and last beam pivot.
    pub beam_span: Option<(f64, f64)>,
}

pub fn simulate(cfg: &RunConfig, label: &str) -> Result<SimulationRun> {
    let r = cfg.resolve()?;
    let trace = sweep_with(&r.channel, &r.body, &r.sweep)?;
    let bases = r.channel.base_positions();
    let beam_span = r.channel.width.and_then(|_| Some((*bases.first()?, *bases.last()?)));
    let summary = SimulationSummary::new(
        label,
        &trace,
        cfg.deflection()?,
        r.channel.width,
        r.channel.n,
        r.channel.spacing(),
        r.channel.l_channel,
    );
    Ok(SimulationRun { label: label.to_string(), trace, summary, beam_span })
}

fn drag_plot(title: &str) -> LinePlot {
    LinePlot::new(title, "Shell position X_r (m)", "Drag force F_drag (N)")
}

fn drag_series(run: &SimulationRun) -> Series {
    Series::new(run.label.clone(), run.trace.samples.iter().map(|s| (s.x_r, s.f_drag)).collect())
}

/// Write one run's files into `dir`; returns the paths written.
pub fn write_simulation(run: &SimulationRun, dir: &Path, output: &OutputConfig) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if output.wants(Format::Csv) {
        let path = dir.join("trace.csv");
        io::write_trace(io::create(&path)?, &run.trace, &path)?;
        written.push(path);
        let path = dir.join("beams.csv");
        io::write_beams(io::create(&path)?, &run.trace, &path)?;
        written.push(path);
    }
    if output.wants(Format::Json) {
        let path = dir.join("summary.json");
        write_file(&path, &to_json(&run.summary))?;
        written.push(path);
    }
    if output.wants(Format::Svg) {
        let mut plot = drag_plot(&format!("Simulated drag, {}", run.label)).series(drag_series(run));
        if let Some((a, b)) = run.beam_span {
            plot = plot.marker(a, "first beam").marker(b, "last beam");
        }
        let path = dir.join("drag.svg");
        write_file(&path, plot.render().as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Run each labelled config on its own thread, writing into
/// `out/<label>/`. Summaries come back in input order, and a combined
/// `batch.json` and overlay plot are written to `out`.
pub fn batch(runs: &[(String, RunConfig)], out: &Path, output: &OutputConfig) -> Result<Vec<SimulationSummary>> {
    let mut labels: Vec<&str> = runs.iter().map(|(l, _)| l.as_str()).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Usage("batch run labels must be distinct".into()));
    }
    let results: Vec<Result<SimulationRun>> = std::thread::scope(|scope| {
        let handles: Vec<_> = runs
            .iter()
            .map(|(label, cfg)| {
                scope.spawn(move || {
                    let run = simulate(cfg, label)?;
                    write_simulation(&run, &out.join(label), output)?;
                    Ok(run)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let runs: Vec<SimulationRun> = results.into_iter().collect::<Result<_>>()?;
    let summaries: Vec<SimulationSummary> = runs.iter().map(|r| r.summary.clone()).collect();
    if output.wants(Format::Json) {
        write_file(&out.join("batch.json"), &to_json(&summaries))?;
    }
    if output.wants(Format::Svg) {
        let plot = runs.iter().fold(drag_plot("Simulated drag"), |p, r| p.series(drag_series(r)));
        write_file(&out.join("drag.svg"), plot.render().as_bytes())?;
    }
    Ok(summaries)
}

pub struct Analysis {
    pub records: Vec<TelemetryRecord>,
    pub metrics: TrialMetrics,
}

pub fn analyze_records(records: Vec<TelemetryRecord>, cfg: &RunConfig, path: &Path) -> Result<Analysis> {
    let r = cfg.resolve()?;
    let window = detect_window(&records, &r.window).map_err(|source| Error::Telemetry { path: path.to_path_buf(), source })?;
    let metrics = trial_metrics(&records, window, r.channel.l_channel, r.body.mass(), r.g)?;
    Ok(Analysis { records, metrics })
}

pub fn analyze(telemetry: &Path, cfg: &RunConfig) -> Result<Analysis> {
    analyze_records(io::read_telemetry(telemetry)?, cfg, telemetry)
}

pub fn write_analysis(a: &Analysis, dir: &Path, output: &OutputConfig) -> Result<Vec<PathBuf>> {
    let m = &a.metrics;
    let report = MetricsReport::from(m);
    let mut written = Vec::new();
    if output.wants(Format::Json) {
        let path = dir.join("metrics.json");
        write_file(&path, &to_json(&report))?;
        written.push(path);
    }
    if output.wants(Format::Csv) {
        let mut text = String::from("stride,t_start_s,t_end_s,drag_energy_j,electrical_energy_j,specific_resistance\n");
        for s in &report.strides {
            text += &format!(
                "{},{},{},{},{},{}\n",
                s.stride,
                fmt_f64(s.t_start_s),
                fmt_f64(s.t_end_s),
                fmt_f64(s.drag_energy_j),
                fmt_f64(s.electrical_energy_j),
                fmt_f64(s.specific_resistance)
            );
        }
        let path = dir.join("strides.csv");
        write_file(&path, text.as_bytes())?;
        written.push(path);

        let mut text = String::from("metric,n,min,q1,median,q3,max\n");
        let columns: [(&str, fn(&terradyn_core::StrideMetrics) -> f64); 3] = [
            ("drag_energy_j", |s| s.drag_energy),
            ("electrical_energy_j", |s| s.electrical_energy),
            ("specific_resistance", |s| s.specific_resistance),
        ];
        for (name, f) in columns {
            let values: Vec<f64> = m.per_stride.iter().map(f).collect();
            if let Some(b) = BoxStats::of(&values) {
                text += &format!(
                    "{name},{},{},{},{},{},{}\n",
                    b.n,
                    fmt_f64(b.min),
                    fmt_f64(b.q1),
                    fmt_f64(b.median),
                    fmt_f64(b.q3),
                    fmt_f64(b.max)
                );
            }
        }
        let path = dir.join("boxplot.csv");
        write_file(&path, text.as_bytes())?;
        written.push(path);
    }
    if output.wants(Format::Svg) {
        let series = |name: &str, f: fn(&TelemetryRecord) -> f64| {
            Series::new(name, a.records.iter().map(|r| (r.t, f(r))).collect())
        };
        let plot = LinePlot::new("Measured forces", "Time (s)", "Force (N)")
            .series(series("drag -F_x", TelemetryRecord::drag))
            .series(series("F_y", |r| r.fy))
            .series(series("F_z", |r| r.fz))
            .marker(m.window.t_enter, "enter")
            .marker(m.window.t_exit, "exit");
        let path = dir.join("forces.svg");
        write_file(&path, plot.render().as_bytes())?;
        written.push(path);
        let plot = LinePlot::new("Leg motor power", "Time (s)", "Power (W)")
            .series(series("power", |r| r.power))
            .marker(m.window.t_enter, "enter")
            .marker(m.window.t_exit, "exit");
        let path = dir.join("power.svg");
        write_file(&path, plot.render().as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

pub struct Calibration {
    pub model: terradyn_core::CalibrationModel,
    pub report: CalibrationReport,
}

/// Seeded shuffle, then fit on the first `split` fraction and score the
/// rest.
pub fn calibrate_samples(mut data: Vec<terradyn_core::CalibrationSample>, split: f64, seed: u64) -> Result<Calibration> {
    if !(split > 0.0 && split <= 1.0) {
        return Err(Error::Usage(format!("--split must be in (0, 1], got {split}")));
    }
    let n = data.len();
    data.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((split * n as f64).round() as usize).min(n);
    let test = data.split_off(n_train);
    let model = calibration::fit(&data)?;
    let test_rms = if test.is_empty() { None } else { Some(calibration::rms_error(&model, &test)?) };
    let report = CalibrationReport {
        samples: n,
        n_train,
        n_test: test.len(),
        split,
        seed,
        train_rms_n: model.rms,
        test_rms_n: test_rms,
    };
    Ok(Calibration { model, report })
}

pub fn write_calibration(c: &Calibration, dir: &Path) -> Result<Vec<PathBuf>> {
    let model = dir.join("model.json");
    write_file(&model, &to_json(&ModelFile::from(&c.model)))?;
    let report = dir.join("calibration.json");
    write_file(&report, &to_json(&c.report))?;
    Ok(vec![model, report])
}

/// Table of the named channel conditions for a shell of half-width `r_y`.
pub fn presets_table(r_y: f64) -> String {
    let mut s = String::from("name  deflection_m  width_m\n");
    for p in Preset::ALL {
        let (d, b) = match (p.deflection(), p.width(r_y)) {
            (Some(d), Some(b)) => (format!("{d:.3}"), format!("{b:.3}")),
            _ => ("-".into(), "-".into()),
        };
        s += &format!("{:<5} {:<13} {}\n", p.name(), d, b);
    }
    s
}

/// Calibration dataset from the default sensor model. `exact` draws
/// full-rank readings labelled by the model's ideal decoder instead.
pub fn synth_calibration(count: usize, seed: u64, force_noise: Option<f64>, exact: bool) -> Vec<terradyn_core::CalibrationSample> {
    let mut model = SensorForwardModel::default();
    if exact {
        return calibration::synth_linear_dataset(&model.ideal_decoder(), &model.offset, 300.0, count, seed);
    }
    if let Some(target) = force_noise {
        model = if target > 0.0 { model.with_force_noise(target) } else { model.noiseless() };
    }
    let forces = calibration::random_forces(count, [1.0, 1.0, 3.0], seed);
    calibration::synth_dataset(&model, &forces, seed.wrapping_add(1))
}

/// Synthetic trial: trapezoidal drag of height `drag` between `enter` and
/// `exit`, with 0.2 s ramps.
pub fn synth_telemetry(drag: f64, enter: f64, exit: f64, duration: f64, noise: f64, seed: u64) -> Result<Vec<TelemetryRecord>> {
    if !(0.0 <= enter && enter < exit && exit <= duration) {
        return Err(Error::Usage(format!("need 0 <= enter < exit <= duration, got {enter}, {exit}, {duration}")));
    }
    let trial = SyntheticTrial { duration, force_noise: noise, power_noise: noise, ..SyntheticTrial::default() };
    let records = trial.generate(ramp_profile(enter, exit, 0.2, drag), seed);
    telemetry::validate(&records).map_err(|source| Error::Telemetry { path: PathBuf::from("<synthetic>"), source })?;
    Ok(records)
}
