//! JSON and tabular summaries written by the commands.

use serde::Serialize;
use terradyn_core::{ForceTrace, TrialMetrics};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub label: String,
    pub deflection_m: Option<f64>,
    pub width_m: Option<f64>,
    pub beams_per_wall: usize,
    pub spacing_m: f64,
    pub l_channel_m: f64,
    pub dx_m: f64,
    pub velocity_mps: f64,
    pub samples: usize,
    pub plateau_start_m: Option<f64>,
    pub plateau_end_m: Option<f64>,
    pub plateau_mean_drag_n: f64,
    pub plateau_min_drag_n: f64,
    pub plateau_max_drag_n: f64,
    pub plateau_contact_counts: Vec<usize>,
    pub max_contact_count: usize,
    pub saturated_contacts: usize,
    /// Plateau mean drag times channel length.
    pub drag_energy_j: f64,
    /// Drag integrated over the whole sweep.
    pub work_j: f64,
    pub duration_s: f64,
}

impl SimulationSummary {
    pub fn new(label: &str, trace: &ForceTrace, deflection: Option<f64>, width: Option<f64>, n: usize, spacing: f64, l_channel: f64) -> Self {
        let stats = trace.plateau_stats();
        let mean = stats.as_ref().map_or(0.0, |s| s.mean_drag);
        Self {
            label: label.to_string(),
            deflection_m: deflection,
            width_m: width,
            beams_per_wall: n,
            spacing_m: spacing,
            l_channel_m: l_channel,
            dx_m: trace.dx,
            velocity_mps: trace.v,
            samples: trace.len(),
            plateau_start_m: trace.plateau.map(|p| p.0),
            plateau_end_m: trace.plateau.map(|p| p.1),
            plateau_mean_drag_n: mean,
            plateau_min_drag_n: stats.as_ref().map_or(0.0, |s| s.min_drag),
            plateau_max_drag_n: stats.as_ref().map_or(0.0, |s| s.max_drag),
            plateau_contact_counts: stats.map(|s| s.contact_counts.into_iter().collect()).unwrap_or_default(),
            max_contact_count: trace.max_contact_count(),
            saturated_contacts: trace.samples.iter().flat_map(|s| &s.contacts).filter(|c| c.saturated).count(),
            drag_energy_j: mean * l_channel,
            work_j: trace.work(),
            duration_s: trace.samples.last().map_or(0.0, |s| s.t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    pub t_enter_s: f64,
    pub t_exit_s: f64,
    pub free_run: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrideReport {
    pub stride: usize,
    pub t_start_s: f64,
    pub t_end_s: f64,
    pub drag_energy_j: f64,
    pub electrical_energy_j: f64,
    pub specific_resistance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub mean_fx_n: f64,
    pub mean_fz_n: f64,
    pub mean_power_w: f64,
    pub mean_velocity_mps: f64,
    pub drag_energy_j: f64,
    pub electrical_energy_j: f64,
    pub specific_resistance: f64,
    pub window: WindowReport,
    pub strides: Vec<StrideReport>,
}

impl From<&TrialMetrics> for MetricsReport {
    fn from(m: &TrialMetrics) -> Self {
        Self {
            mean_fx_n: m.mean_fx,
            mean_fz_n: m.mean_fz,
            mean_power_w: m.mean_power,
            mean_velocity_mps: m.mean_velocity,
            drag_energy_j: m.drag_energy,
            electrical_energy_j: m.electrical_energy,
            specific_resistance: m.specific_resistance,
            window: WindowReport { t_enter_s: m.window.t_enter, t_exit_s: m.window.t_exit, free_run: m.window.free_run },
            strides: m
                .per_stride
                .iter()
                .enumerate()
                .map(|(i, s)| StrideReport {
                    stride: i + 1,
                    t_start_s: s.t_start,
                    t_end_s: s.t_end,
                    drag_energy_j: s.drag_energy,
                    electrical_energy_j: s.electrical_energy,
                    specific_resistance: s.specific_resistance,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub samples: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub split: f64,
    pub seed: u64,
    pub train_rms_n: [f64; 3],
    pub test_rms_n: Option<[f64; 3]>,
}

/// Five-number summary for a box plot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxStats {
    /// Quartiles by linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Option<Self> {
        let mut v: Vec<f64> = values.to_vec();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(Self { n: v.len(), min: v[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: v[v.len() - 1] })
    }
}
