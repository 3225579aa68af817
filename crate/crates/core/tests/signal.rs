use proptest::prelude::*;

use arealoc::signal::{
    detect_steps, integrate_yaw, lowpass, process_imu, remove_bias, Butterworth, FilterConfig, SensorSample,
    SignalConfig, SignalError, StepConfig,
};

fn gait(cadence: f64, seconds: f64, fs: f64, offset_t: f64) -> Vec<SensorSample> {
    let n = (seconds * fs) as usize;
    (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            let walking = t > 2.0;
            let phase = std::f64::consts::TAU * cadence * (t - 2.0);
            let a = if walking { 1.0 + 0.08 * (phase.sin() + 0.15 * (2.0 * phase).cos()) } else { 1.0 };
            SensorSample { t: t + offset_t, accel: [0.0, 0.0, a], gyro: [0.0; 3] }
        })
        .collect()
}

#[test]
fn cutoff_gain_is_half_power() {
    for order in 1..=6 {
        let cfg = FilterConfig { order, ..FilterConfig::default() };
        let f = Butterworth::new(&cfg).unwrap();
        let g = f.magnitude_at(cfg.cutoff_hz, cfg.sample_rate_hz);
        assert!((g - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9, "order {order}: {g}");
        assert!((f.magnitude_at(0.0, cfg.sample_rate_hz) - 1.0).abs() < 1e-12);
        // monotone roll-off, steeper with order
        assert!(f.magnitude_at(10.0, cfg.sample_rate_hz) < 0.5f64.powi(order as i32));
    }
}

#[test]
fn invalid_filter_settings_are_rejected() {
    let nyquist = FilterConfig { cutoff_hz: 25.0, ..FilterConfig::default() };
    assert!(matches!(nyquist.validate(), Err(SignalError::Config(_))));
    assert!(Butterworth::new(&FilterConfig { order: 0, ..FilterConfig::default() }).is_err());
}

#[test]
fn steady_gait_gives_one_step_per_cycle() {
    for cadence in [1.5, 1.8, 2.0, 2.5] {
        let steps = detect_steps(&gait(cadence, 22.0, 50.0, 0.0), &StepConfig::default()).unwrap();
        let expected = (20.0 * cadence) as usize;
        assert!(steps.len().abs_diff(expected) <= 1, "{cadence} Hz: {} vs {expected}", steps.len());
        assert!(steps.windows(2).all(|w| w[1].t - w[0].t >= 0.3));
        assert!(steps.iter().enumerate().all(|(i, s)| s.index == i + 1));
    }
}

#[test]
fn step_times_shift_with_the_trace() {
    let base = detect_steps(&gait(2.0, 12.0, 50.0, 0.0), &StepConfig::default()).unwrap();
    let shifted = detect_steps(&gait(2.0, 12.0, 50.0, 100.0), &StepConfig::default()).unwrap();
    assert_eq!(base.len(), shifted.len());
    for (a, b) in base.iter().zip(&shifted) {
        assert!((b.t - a.t - 100.0).abs() < 1e-9);
    }
}

#[test]
fn small_wobble_never_arms_the_detector() {
    let samples: Vec<SensorSample> = (0..1000)
        .map(|i| {
            let t = i as f64 * 0.02;
            SensorSample { t, accel: [0.0, 0.0, 1.0 + 0.03 * (12.0 * t).sin()], gyro: [0.0; 3] }
        })
        .collect();
    assert!(detect_steps(&samples, &StepConfig::default()).unwrap().is_empty());
}

#[test]
fn bias_removal_bounds_loop_heading_error() {
    // one full turn over 60 s at constant rate, plus 0.01 rad/s bias after a 2 s still start
    let fs = 50.0;
    let rate = std::f64::consts::TAU / 60.0;
    let samples: Vec<SensorSample> = (0..(62.0 * fs) as usize)
        .map(|i| {
            let t = i as f64 / fs;
            let w = if t >= 2.0 { rate } else { 0.0 };
            SensorSample { t, accel: [0.0, 0.0, 1.0], gyro: [0.0, 0.0, w + 0.01] }
        })
        .collect();
    let (debiased, bias) = remove_bias(&samples.iter().map(|s| s.gyro).collect::<Vec<_>>(), 100).unwrap();
    assert!((bias[2] - 0.01).abs() < 1e-12);
    let fixed: Vec<SensorSample> =
        samples.iter().zip(&debiased).map(|(s, g)| SensorSample { gyro: *g, ..*s }).collect();
    let err = |yaw: &[f64]| (yaw.last().unwrap() - std::f64::consts::TAU).abs().to_degrees();
    assert!(err(&integrate_yaw(&fixed, 0.0)) < 2.0);
    assert!(err(&integrate_yaw(&samples, 0.0)) > 10.0);
}

#[test]
fn non_monotonic_time_is_an_error() {
    let mut s = gait(2.0, 3.0, 50.0, 0.0);
    s[10].t = s[9].t;
    assert_eq!(process_imu(&s, &SignalConfig::default(), 0.0).unwrap_err(), SignalError::NonMonotonic(10));
}

#[test]
fn short_bias_window_is_an_error() {
    let s = gait(2.0, 1.0, 50.0, 0.0);
    assert!(matches!(process_imu(&s, &SignalConfig::default(), 0.0), Err(SignalError::TooShort { .. })));
}

proptest! {
    #[test]
    fn lowpass_is_linear(
        xs in prop::collection::vec(-5.0f64..5.0, 1..200),
        ys in prop::collection::vec(-5.0f64..5.0, 1..200),
        a in -3.0f64..3.0,
    ) {
        let n = xs.len().min(ys.len());
        let cfg = FilterConfig::default();
        let combo: Vec<f64> = (0..n).map(|i| a * xs[i] + ys[i]).collect();
        let fx = lowpass(&xs[..n], &cfg).unwrap();
        let fy = lowpass(&ys[..n], &cfg).unwrap();
        let fc = lowpass(&combo, &cfg).unwrap();
        for i in 0..n {
            prop_assert!((fc[i] - (a * fx[i] + fy[i])).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_rate_integrates_exactly(rate in -2.0f64..2.0, theta0 in -3.0f64..3.0, n in 2usize..500) {
        let s: Vec<SensorSample> =
            (0..n).map(|i| SensorSample { t: i as f64 * 0.02, accel: [0.0, 0.0, 1.0], gyro: [0.0, 0.0, rate] }).collect();
        let yaw = integrate_yaw(&s, theta0);
        let expected = theta0 + rate * (n - 1) as f64 * 0.02;
        prop_assert!((yaw[n - 1] - expected).abs() < 1e-9);
    }

    #[test]
    fn bias_is_the_leading_mean(
        lead in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 5..40),
        window in 1usize..5,
    ) {
        let g: Vec<[f64; 3]> = lead.iter().map(|&(x, y, z)| [x, y, z]).collect();
        let (out, bias) = remove_bias(&g, window).unwrap();
        for axis in 0..3 {
            let mean = g[..window].iter().map(|v| v[axis]).sum::<f64>() / window as f64;
            prop_assert!((bias[axis] - mean).abs() < 1e-12);
            prop_assert!((out[7.min(g.len() - 1)][axis] - (g[7.min(g.len() - 1)][axis] - mean)).abs() < 1e-12);
        }
    }
}
