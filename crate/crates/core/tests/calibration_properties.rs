use nalgebra::{DMatrix, DVector};
use terradyn_core::calibration::{apply, fit, random_forces, rms_error, synth_dataset, synth_linear_dataset, CHANNELS, FEATURES};
use terradyn_core::{CalibrationError, CalibrationSample, SensorForwardModel};

const AMPLITUDE: [f64; 3] = [1.0, 1.0, 3.0];

/// Brute-force normal equations: `c_k = (A^T A)^-1 A^T f_k`.
fn normal_equations(data: &[CalibrationSample]) -> [[f64; FEATURES]; 3] {
    let a = DMatrix::from_fn(data.len(), FEATURES, |i, j| if j < CHANNELS { data[i].readings[j] } else { 1.0 });
    let ata = a.transpose() * &a;
    let inv = ata.try_inverse().expect("full rank");
    let mut out = [[0.0; FEATURES]; 3];
    for (k, row) in out.iter_mut().enumerate() {
        let f = DVector::from_fn(data.len(), |i, _| data[i].force[k]);
        let c = &inv * (a.transpose() * f);
        row.copy_from_slice(c.as_slice());
    }
    out
}

fn split(data: Vec<CalibrationSample>, train: usize) -> (Vec<CalibrationSample>, Vec<CalibrationSample>) {
    let mut train_set = data;
    let test_set = train_set.split_off(train);
    (train_set, test_set)
}

#[test]
fn fit_agrees_with_normal_equations() {
    for seed in 0..5 {
        let model = SensorForwardModel::default();
        let data = synth_dataset(&model, &random_forces(400, AMPLITUDE, seed), seed + 100);
        let got = fit(&data).unwrap().c;
        let want = normal_equations(&data);
        for k in 0..3 {
            let scale = want[k].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for j in 0..FEATURES {
                assert!((got[k][j] - want[k][j]).abs() <= 1e-8 * scale, "seed {seed} c[{k}][{j}]: {} vs {}", got[k][j], want[k][j]);
            }
        }
    }
}

#[test]
fn noise_free_forward_data_is_degenerate() {
    // Eight channels driven by three forces cannot excite nine columns.
    let model = SensorForwardModel::default().noiseless();
    let data = synth_dataset(&model, &random_forces(300, AMPLITUDE, 3), 4);
    assert!(matches!(fit(&data), Err(CalibrationError::DegenerateExcitation { rank: 4, .. })));
}

#[test]
fn noise_free_data_is_recovered_exactly() {
    let model = SensorForwardModel::default();
    let truth = model.ideal_decoder();
    let (train, test) = split(synth_linear_dataset(&truth, &model.offset, 300.0, 300, 4), 200);
    let fitted = fit(&train).unwrap();
    assert!(fitted.rms.iter().all(|&r| r < 1e-9), "{:?}", fitted.rms);
    let test_rms = rms_error(&fitted, &test).unwrap();
    assert!(test_rms.iter().all(|&r| r < 1e-9), "{test_rms:?}");
    for k in 0..3 {
        for j in 0..FEATURES {
            assert!((fitted.c[k][j] - truth[k][j]).abs() < 1e-9 * truth[k][j].abs().max(1e-3));
        }
    }
    for s in &test {
        let p = apply(&fitted, &s.readings);
        for k in 0..3 {
            assert!((p[k] - s.force[k]).abs() < 1e-9);
        }
    }
}

#[test]
fn held_out_rms_matches_noise_equivalent() {
    let model = SensorForwardModel::default();
    let eq = model.force_noise_equivalent();
    let (n_train, n_test) = (2000, 1000);
    for seed in 0..20 {
        let data = synth_dataset(&model, &random_forces(n_train + n_test, AMPLITUDE, seed), 1000 + seed);
        let (train, test) = split(data, n_train);
        let fitted = fit(&train).unwrap();
        let test_rms = rms_error(&fitted, &test).unwrap();
        for k in 0..3 {
            let ratio = test_rms[k] / eq[k];
            assert!((0.9..=1.2).contains(&ratio), "seed {seed} axis {k}: ratio {ratio}");
            // Expected inflation of held-out over training error for a
            // p-parameter fit, plus four standard errors of an RMS estimate.
            let p = FEATURES as f64;
            let n = n_train as f64;
            let bound = ((n + p) / (n - p)).sqrt() + 4.0 / (2.0 * n_test as f64).sqrt();
            assert!(test_rms[k] / fitted.rms[k] <= bound, "seed {seed} axis {k}");
        }
    }
}

#[test]
fn channel_permutation_permutes_columns() {
    let model = SensorForwardModel::default();
    let data = synth_dataset(&model, &random_forces(300, AMPLITUDE, 8), 9);
    let perm = [3, 7, 0, 5, 1, 6, 2, 4];
    let permuted: Vec<CalibrationSample> = data
        .iter()
        .map(|s| CalibrationSample { readings: perm.map(|p| s.readings[p]), force: s.force })
        .collect();
    let a = fit(&data).unwrap();
    let b = fit(&permuted).unwrap();
    for k in 0..3 {
        for (j, &p) in perm.iter().enumerate() {
            assert!((b.c[k][j] - a.c[k][p]).abs() < 1e-9 * a.c[k][p].abs().max(1e-6));
        }
        assert!((b.c[k][CHANNELS] - a.c[k][CHANNELS]).abs() < 1e-9 * a.c[k][CHANNELS].abs().max(1.0));
    }
}

#[test]
fn channel_offset_is_absorbed_by_bias() {
    let model = SensorForwardModel::default();
    let (train, test) = split(synth_dataset(&model, &random_forces(400, AMPLITUDE, 11), 12), 300);
    let shift = |set: &[CalibrationSample], ch: usize, by: f64| -> Vec<CalibrationSample> {
        set.iter()
            .map(|s| {
                let mut r = s.readings;
                r[ch] += by;
                CalibrationSample { readings: r, force: s.force }
            })
            .collect()
    };
    let base = fit(&train).unwrap();
    for (ch, by) in [(0, 250.0), (5, -1234.5)] {
        let moved = fit(&shift(&train, ch, by)).unwrap();
        for k in 0..3 {
            for j in 0..CHANNELS {
                assert!((moved.c[k][j] - base.c[k][j]).abs() < 1e-9 * base.c[k][j].abs().max(1e-6));
            }
            let bias = base.c[k][CHANNELS] - base.c[k][ch] * by;
            assert!((moved.c[k][CHANNELS] - bias).abs() < 1e-8);
        }
        for (s, m) in test.iter().zip(shift(&test, ch, by)) {
            let p = apply(&base, &s.readings);
            let q = apply(&moved, &m.readings);
            for k in 0..3 {
                assert!((p[k] - q[k]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn eight_samples_are_degenerate() {
    let model = SensorForwardModel::default();
    let data = synth_dataset(&model, &random_forces(8, AMPLITUDE, 1), 2);
    assert!(matches!(fit(&data), Err(CalibrationError::DegenerateExcitation { .. })));
}
