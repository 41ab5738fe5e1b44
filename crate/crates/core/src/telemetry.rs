//! Robot telemetry records and channel entry/exit detection.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::TelemetryError;

/// One time-sampled row of forces, leg positions and power.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TelemetryRecord {
    pub t: f64,
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
    pub leg_left: f64,
    pub leg_right: f64,
    pub power: f64,
}

impl TelemetryRecord {
    pub const FIELDS: [&'static str; 7] = ["t", "fx", "fy", "fz", "leg_left", "leg_right", "power"];

    pub fn values(&self) -> [f64; 7] {
        [self.t, self.fx, self.fy, self.fz, self.leg_left, self.leg_right, self.power]
    }

    pub fn from_values(v: [f64; 7]) -> Self {
        Self { t: v[0], fx: v[1], fy: v[2], fz: v[3], leg_left: v[4], leg_right: v[5], power: v[6] }
    }

    /// Drag is the resisting component, `-fx`.
    pub fn drag(&self) -> f64 {
        -self.fx
    }
}

/// Checks finiteness and non-decreasing time.
pub fn validate(records: &[TelemetryRecord]) -> Result<(), TelemetryError> {
    let mut prev = f64::NEG_INFINITY;
    for (index, r) in records.iter().enumerate() {
        for (field, v) in TelemetryRecord::FIELDS.iter().zip(r.values()) {
            if !v.is_finite() {
                return Err(TelemetryError::NonFinite { index, field });
            }
        }
        if r.t < prev {
            return Err(TelemetryError::Decreasing { index, t: r.t, prev });
        }
        prev = r.t;
    }
    Ok(())
}

/// Thresholds for [`detect_window`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowParams {
    /// Drag magnitude that starts a contact run [N].
    pub threshold: f64,
    /// A run ends once drag drops below `threshold - hysteresis` [N].
    pub hysteresis: f64,
    /// Shortest run that counts as being in the channel [s].
    pub min_duration: f64,
}

impl Default for WindowParams {
    fn default() -> Self {
        Self { threshold: 0.05, hysteresis: 0.02, min_duration: 0.25 }
    }
}

/// Time span the robot spent inside the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelWindow {
    pub t_enter: f64,
    pub t_exit: f64,
    /// No sustained contact was found; the window covers the whole record.
    pub free_run: bool,
}

impl ChannelWindow {
    pub fn duration(&self) -> f64 {
        self.t_exit - self.t_enter
    }
}

/// Find the channel window from the drag magnitude `|fx|`.
///
/// A run opens when `|fx|` exceeds `threshold` and closes when it falls
/// below `threshold - hysteresis`. Runs shorter than `min_duration` are
/// ignored; the window spans the first to the last sustained run.
pub fn detect_window(records: &[TelemetryRecord], params: &WindowParams) -> Result<ChannelWindow, TelemetryError> {
    if records.len() < 2 {
        return Err(TelemetryError::TooFewRecords { need: 2, got: records.len() });
    }
    let lower = params.threshold - params.hysteresis;
    let mut first: Option<f64> = None;
    let mut last: Option<f64> = None;
    let mut open: Option<f64> = None;
    let mut last_above = records[0].t;

    let mut close = |start: f64, end: f64| {
        if end - start >= params.min_duration {
            first.get_or_insert(start);
            last = Some(end);
        }
    };

    for r in records {
        let m = r.fx.abs();
        match open {
            None if m > params.threshold => {
                open = Some(r.t);
                last_above = r.t;
            }
            Some(start) if m < lower => {
                close(start, last_above);
                open = None;
            }
            Some(_) => last_above = r.t,
            None => {}
        }
    }
    if let Some(start) = open {
        close(start, last_above);
    }

    Ok(match (first, last) {
        (Some(t_enter), Some(t_exit)) => ChannelWindow { t_enter, t_exit, free_run: false },
        _ => ChannelWindow {
            t_enter: records[0].t,
            t_exit: records[records.len() - 1].t,
            free_run: true,
        },
    })
}

/// Parameters for a synthetic open-loop trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticTrial {
    pub rate_hz: f64,
    pub duration: f64,
    pub stride_hz: f64,
    /// Leg-induced force oscillation amplitude [N].
    pub leg_ripple: f64,
    /// Lift per unit drag (negative lift pushes the shell down).
    pub lift_ratio: f64,
    pub mean_power: f64,
    pub power_ripple: f64,
    pub force_noise: f64,
    pub power_noise: f64,
}

impl Default for SyntheticTrial {
    fn default() -> Self {
        Self {
            rate_hz: 100.0,
            duration: 10.0,
            stride_hz: 1.0,
            leg_ripple: 0.02,
            lift_ratio: -0.5,
            mean_power: 2.0,
            power_ripple: 0.3,
            force_noise: 0.0,
            power_noise: 0.0,
        }
    }
}

impl SyntheticTrial {
    /// Generate records with drag profile `drag(t)` [N]. Legs are reported
    /// wrapped to `[0, 2 pi)`, the right tripod half a stride behind.
    pub fn generate<F: Fn(f64) -> f64>(&self, drag: F, seed: u64) -> Vec<TelemetryRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let force_noise = Normal::new(0.0, self.force_noise.max(0.0)).expect("finite sigma");
        let power_noise = Normal::new(0.0, self.power_noise.max(0.0)).expect("finite sigma");
        let count = (self.duration * self.rate_hz) as usize + 1;
        (0..count)
            .map(|k| {
                let t = k as f64 / self.rate_hz;
                let phase = TAU * self.stride_hz * t;
                let d = drag(t);
                let ripple = if d > 0.0 { self.leg_ripple * libm::sin(phase) } else { 0.0 };
                TelemetryRecord {
                    t,
                    fx: -(d + ripple) + force_noise.sample(&mut rng),
                    fy: 0.5 * self.leg_ripple * libm::sin(2.0 * phase) + force_noise.sample(&mut rng),
                    fz: self.lift_ratio * d + force_noise.sample(&mut rng),
                    leg_left: wrap_angle(phase),
                    leg_right: wrap_angle(phase - PI),
                    power: self.mean_power
                        + self.power_ripple * libm::sin(2.0 * phase)
                        + power_noise.sample(&mut rng),
                }
            })
            .collect()
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a - TAU * libm::floor(a / TAU);
    if w >= TAU { 0.0 } else { w }
}

/// Trapezoidal ramp: zero outside `[t_enter, t_exit]`, `plateau` inside,
/// with linear ramps of length `ramp` at both ends.
pub fn ramp_profile(t_enter: f64, t_exit: f64, ramp: f64, plateau: f64) -> impl Fn(f64) -> f64 {
    move |t| {
        if t < t_enter || t > t_exit {
            0.0
        } else if ramp > 0.0 && t < t_enter + ramp {
            plateau * (t - t_enter) / ramp
        } else if ramp > 0.0 && t > t_exit - ramp {
            plateau * (t_exit - t) / ramp
        } else {
            plateau
        }
    }
}
