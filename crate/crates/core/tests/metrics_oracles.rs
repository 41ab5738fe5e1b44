use std::f64::consts::TAU;

use proptest::prelude::*;
use terradyn_core::metrics::{stride_segments, trial_metrics};
use terradyn_core::telemetry::SyntheticTrial;
use terradyn_core::{ChannelWindow, TelemetryRecord};

const MASS: f64 = 0.1;
const G: f64 = 9.81;

/// Five one-second strides sampled at 100 Hz. Drag is a tent
/// `0.1 + 0.05 |t - 2.5|` and power the ramp `2 + 0.4 t`; both are linear
/// between samples, so the closed forms below are exact.
fn tent_fixture() -> Vec<TelemetryRecord> {
    (0..=500)
        .map(|k| {
            let t = k as f64 / 100.0;
            TelemetryRecord {
                t,
                fx: -(0.1 + 0.05 * (t - 2.5).abs()),
                fy: 0.0,
                fz: 0.3,
                leg_left: (TAU * t).rem_euclid(TAU),
                leg_right: (TAU * t - std::f64::consts::PI).rem_euclid(TAU),
                power: 2.0 + 0.4 * t,
            }
        })
        .collect()
}

#[test]
fn tent_fixture_matches_closed_form() {
    let records = tent_fixture();
    let window = ChannelWindow { t_enter: 0.0, t_exit: 5.0, free_run: false };
    let m = trial_metrics(&records, window, 0.5, MASS, G).unwrap();
    let v = 0.1;
    assert!((m.mean_velocity - v).abs() < 1e-12);
    assert!((m.mean_fx - 0.1625).abs() < 1e-9);
    assert!((m.mean_fz - 0.3).abs() < 1e-9);
    assert!((m.drag_energy - 0.08125).abs() < 1e-9);
    assert!((m.electrical_energy - 15.0).abs() < 1e-9);
    assert!((m.mean_power - 3.0).abs() < 1e-9);
    assert!((m.specific_resistance - 3.0 / (MASS * G * v)).abs() < 1e-9);

    let mean_drag = [0.2, 0.15, 0.1125, 0.15, 0.2];
    assert_eq!(m.per_stride.len(), 5);
    for (k, s) in m.per_stride.iter().enumerate() {
        let elec = 2.0 + 0.4 * (k as f64 + 0.5);
        assert!((s.t_start - k as f64).abs() < 1e-9 && (s.t_end - (k + 1) as f64).abs() < 1e-9);
        assert!((s.drag_energy - mean_drag[k] * v).abs() < 1e-9, "stride {k}");
        assert!((s.electrical_energy - elec).abs() < 1e-9, "stride {k}");
        assert!((s.specific_resistance - elec / (MASS * G * v)).abs() < 1e-9, "stride {k}");
    }
}

#[test]
fn constant_drag_energy_is_force_times_length() {
    let mut records = tent_fixture();
    records.iter_mut().for_each(|r| r.fx = -0.13);
    let window = ChannelWindow { t_enter: 0.0, t_exit: 5.0, free_run: false };
    let m = trial_metrics(&records, window, 0.28, MASS, G).unwrap();
    assert!((m.drag_energy - 0.0364).abs() < 1e-12);
}

fn noisy_trial(seed: u64) -> Vec<TelemetryRecord> {
    let trial = SyntheticTrial { duration: 7.3, ..SyntheticTrial::default() };
    trial.generate(|t| 0.1 + 0.02 * (3.0 * t).sin(), seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tiling_strides_sum_to_window(seed in 0u64..1000, l in 0.1f64..1.0) {
        let records = noisy_trial(seed);
        let legs: Vec<f64> = records.iter().map(|r| r.leg_left).collect();
        let times: Vec<f64> = records.iter().map(|r| r.t).collect();
        let strides = stride_segments(&legs, &times).unwrap();
        prop_assume!(strides.len() >= 2);
        let window = ChannelWindow { t_enter: strides[0].0, t_exit: strides[strides.len() - 1].1, free_run: false };
        let m = trial_metrics(&records, window, l, MASS, G).unwrap();
        prop_assert_eq!(m.per_stride.len(), strides.len());
        let elec: f64 = m.per_stride.iter().map(|s| s.electrical_energy).sum();
        let drag: f64 = m.per_stride.iter().map(|s| s.drag_energy).sum();
        prop_assert!((elec - m.electrical_energy).abs() <= 1e-9 * m.electrical_energy.abs().max(1.0));
        prop_assert!((drag - m.drag_energy).abs() <= 1e-9 * m.drag_energy.abs().max(1e-3));
    }

    #[test]
    fn split_window_means_combine_by_duration(seed in 0u64..1000, cut in 0.2f64..0.8) {
        let records = noisy_trial(seed);
        let (a, b) = (0.5, 6.5);
        let c = a + cut * (b - a);
        let whole = trial_metrics(&records, ChannelWindow { t_enter: a, t_exit: b, free_run: false }, 0.6, MASS, G).unwrap();
        // Channel length shared in proportion to duration keeps v constant.
        let left = trial_metrics(&records, ChannelWindow { t_enter: a, t_exit: c, free_run: false }, 0.6 * cut, MASS, G).unwrap();
        let right = trial_metrics(&records, ChannelWindow { t_enter: c, t_exit: b, free_run: false }, 0.6 * (1.0 - cut), MASS, G).unwrap();
        prop_assert!((left.drag_energy + right.drag_energy - whole.drag_energy).abs() < 1e-12);
        let weighted = (left.mean_fx * (c - a) + right.mean_fx * (b - c)) / (b - a);
        prop_assert!((weighted - whole.mean_fx).abs() < 1e-12);
    }
}
