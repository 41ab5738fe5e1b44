//! Energy cost of traversal: drag energy, specific resistance and
//! per-stride statistics.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::error::MetricsError;
use crate::telemetry::{ChannelWindow, TelemetryRecord};

pub const STANDARD_GRAVITY: f64 = 9.81;

/// `E_drag = F_x * l_channel`, with `F_x` the mean resisting force.
pub fn drag_energy(mean_fx: f64, l_channel: f64) -> Result<f64, MetricsError> {
    if !(l_channel.is_finite() && l_channel > 0.0) {
        return Err(MetricsError::InvalidParameter { name: "l_channel", value: l_channel });
    }
    Ok(mean_fx * l_channel)
}

/// Dimensionless cost of transport `P / (m g v)`.
pub fn specific_resistance(mean_power: f64, mass: f64, mean_velocity: f64, g: f64) -> Result<f64, MetricsError> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(MetricsError::InvalidParameter { name: "mass", value: mass });
    }
    if !(g.is_finite() && g > 0.0) {
        return Err(MetricsError::InvalidParameter { name: "g", value: g });
    }
    if !(mean_velocity.is_finite() && mean_velocity > 0.0) {
        return Err(MetricsError::Stalled(mean_velocity));
    }
    Ok(mean_power / (mass * g * mean_velocity))
}

// Crossings closer than this to a stride boundary count as reaching it.
const ANGLE_EPS: f64 = 1e-9;

/// Split a leg-angle series into strides of one full revolution.
///
/// The angle is unwrapped first. Stride boundaries are the times the
/// unwrapped angle passes a multiple of `2 pi`; with a noisy signal the
/// first and last passage are averaged. A partial trailing stride is
/// dropped.
pub fn stride_segments(leg_angle: &[f64], time: &[f64]) -> Result<Vec<(f64, f64)>, MetricsError> {
    if leg_angle.len() != time.len() {
        return Err(MetricsError::LengthMismatch(leg_angle.len(), time.len()));
    }
    if leg_angle.len() < 2 {
        return Ok(Vec::new());
    }
    let unwrapped = unwrap(leg_angle);
    let hi = unwrapped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first_turn = libm::ceil((unwrapped[0] - ANGLE_EPS) / TAU) as i64;
    let last_turn = libm::floor((hi + ANGLE_EPS) / TAU) as i64;

    let mut boundaries = Vec::new();
    for turn in first_turn..=last_turn {
        if let Some(t) = crossing_time(&unwrapped, time, TAU * turn as f64) {
            boundaries.push(t);
        }
    }
    Ok(boundaries
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect())
}

fn unwrap(angle: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angle.len());
    let mut acc = angle[0];
    out.push(acc);
    for w in angle.windows(2) {
        let mut d = w[1] - w[0];
        if d > PI || d <= -PI {
            d -= TAU * libm::round(d / TAU);
        }
        acc += d;
        out.push(acc);
    }
    out
}

fn crossing_time(u: &[f64], t: &[f64], target: f64) -> Option<f64> {
    let reached = |v: f64| v >= target - ANGLE_EPS;
    let first = u.iter().position(|&v| reached(v))?;
    let t_first = if first == 0 { t[0] } else { interpolate(u, t, first - 1, target) };
    let t_last = match u.iter().rposition(|&v| !reached(v)) {
        Some(k) if k + 1 < u.len() => interpolate(u, t, k, target),
        _ => t_first,
    };
    Some(0.5 * (t_first + t_last))
}

fn interpolate(u: &[f64], t: &[f64], k: usize, target: f64) -> f64 {
    let du = u[k + 1] - u[k];
    if du.abs() < f64::EPSILON {
        return t[k + 1];
    }
    let s = ((target - u[k]) / du).clamp(0.0, 1.0);
    t[k] + s * (t[k + 1] - t[k])
}

/// Integral over `[a, b]` of the piecewise-linear interpolant through
/// `(t_k, f(r_k))`; the interval is clipped to the record span.
pub fn integrate<F: Fn(&TelemetryRecord) -> f64>(records: &[TelemetryRecord], a: f64, b: f64, f: F) -> f64 {
    records
        .windows(2)
        .map(|w| {
            let (t0, t1) = (w[0].t, w[1].t);
            let lo = a.max(t0);
            let hi = b.min(t1);
            if hi <= lo || t1 <= t0 {
                return 0.0;
            }
            let (v0, v1) = (f(&w[0]), f(&w[1]));
            let at = |x: f64| v0 + (v1 - v0) * (x - t0) / (t1 - t0);
            0.5 * (at(lo) + at(hi)) * (hi - lo)
        })
        .sum()
}

/// Per-stride energy statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrideMetrics {
    pub t_start: f64,
    pub t_end: f64,
    pub drag_energy: f64,
    pub electrical_energy: f64,
    pub specific_resistance: f64,
}

/// Trial statistics over a channel window.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub window: ChannelWindow,
    /// Mean resisting force, `-fx` averaged over the window [N].
    pub mean_fx: f64,
    pub mean_fz: f64,
    pub mean_power: f64,
    pub mean_velocity: f64,
    pub drag_energy: f64,
    pub electrical_energy: f64,
    pub specific_resistance: f64,
    pub per_stride: Vec<StrideMetrics>,
}

/// Window means are time averages of the linearly interpolated signals.
/// Velocity is the channel length over the transit time, and each stride
/// is charged the share of channel length it covers at that velocity.
/// Strides come from the left leg.
pub fn trial_metrics(
    records: &[TelemetryRecord],
    window: ChannelWindow,
    l_channel: f64,
    mass: f64,
    g: f64,
) -> Result<TrialMetrics, MetricsError> {
    let empty = MetricsError::EmptyWindow { t_enter: window.t_enter, t_exit: window.t_exit };
    let (Some(first), Some(last)) = (records.first(), records.last()) else {
        return Err(empty);
    };
    let a = window.t_enter.max(first.t);
    let b = window.t_exit.min(last.t);
    if !(b > a) {
        return Err(empty);
    }
    let duration = b - a;
    let mean = |f: fn(&TelemetryRecord) -> f64, lo: f64, hi: f64| integrate(records, lo, hi, f) / (hi - lo);

    let mean_fx = mean(TelemetryRecord::drag, a, b);
    let mean_fz = mean(|r| r.fz, a, b);
    let electrical_energy = integrate(records, a, b, |r| r.power);
    let mean_power = electrical_energy / duration;
    let mean_velocity = l_channel / duration;
    let drag_energy = drag_energy(mean_fx, l_channel)?;
    let specific = specific_resistance(mean_power, mass, mean_velocity, g)?;

    let legs: Vec<f64> = records.iter().map(|r| r.leg_left).collect();
    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let mut per_stride = Vec::new();
    for (s, e) in stride_segments(&legs, &times)? {
        if s < a - 1e-12 || e > b + 1e-12 {
            continue;
        }
        let dt = e - s;
        let elec = integrate(records, s, e, |r| r.power);
        let drag = mean(TelemetryRecord::drag, s, e);
        per_stride.push(StrideMetrics {
            t_start: s,
            t_end: e,
            drag_energy: drag * mean_velocity * dt,
            electrical_energy: elec,
            specific_resistance: specific_resistance(elec / dt, mass, mean_velocity, g)?,
        });
    }

    Ok(TrialMetrics {
        window: ChannelWindow { t_enter: a, t_exit: b, free_run: window.free_run },
        mean_fx,
        mean_fz,
        mean_power,
        mean_velocity,
        drag_energy,
        electrical_energy,
        specific_resistance: specific,
        per_stride,
    })
}
