use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{NoiseProfile, SynthError, WalkPlan, WalkScript};
use crate::geometry::{wrap_angle, LocalPoint, Vec2};
use crate::map::IndoorMap;
use crate::signal::SensorSample;
use crate::trace::Trace;
use crate::wifi::{Facing, RssiScan, TwoSlopeModel, RSSI_MAX_DBM, RSSI_MIN_DBM};

/// Uninterrupted run of steps, from gait start to gait end.
struct Bout {
    start: f64,
    end: f64,
}

struct Timeline {
    bouts: Vec<Bout>,
    /// Trough time of step k at index k - 1.
    step_times: Vec<f64>,
    /// When the body starts moving towards step k.
    motion_start: Vec<f64>,
    total: f64,
}

fn timeline(script: &WalkScript, plan: &WalkPlan) -> Timeline {
    let period = 1.0 / script.speed;
    let n = plan.step_count();
    let mut t = script.gait.warmup_s + plan.pause_after[0];
    let mut bouts = Vec::new();
    let mut step_times = Vec::with_capacity(n);
    let mut motion_start = Vec::with_capacity(n);
    let mut k = 1;
    while k <= n {
        let start = t;
        let mut trough = start + 0.75 * period;
        loop {
            motion_start.push((trough - period).max(start));
            step_times.push(trough);
            if k == n || plan.pause_after[k] > 0.0 {
                break;
            }
            k += 1;
            trough += period;
        }
        let end = trough + 0.25 * period;
        bouts.push(Bout { start, end });
        t = end + plan.pause_after[k];
        k += 1;
    }
    Timeline { bouts, step_times, motion_start, total: t + script.gait.rest_s }
}

/// |accel| in g: a step-rate oscillation whose trough is sharpened by a
/// second harmonic, with a trough at every step time.
fn gait_magnitude(t: f64, bouts: &[Bout], period: f64, amplitude: f64, sharpness: f64) -> f64 {
    let Some(b) = bouts.iter().find(|b| t >= b.start && t < b.end) else {
        return 1.0;
    };
    let phase = 2.0 * PI * (t - b.start) / period;
    1.0 + amplitude * (phase.sin() + 0.5 * sharpness * (2.0 * phase).cos())
}

fn truth_at(t: f64, plan: &WalkPlan, tl: &Timeline) -> (LocalPoint, f64) {
    let done = tl.step_times.partition_point(|&s| s <= t);
    let (last_pos, last_theta) = (plan.rows[done].pos, plan.rows[done].theta);
    if done < tl.step_times.len() && t > tl.motion_start[done] {
        let next = &plan.rows[done + 1];
        let span = tl.step_times[done] - tl.motion_start[done];
        let f = ((t - tl.motion_start[done]) / span).clamp(0.0, 1.0);
        return (last_pos + (next.pos - last_pos) * f, next.theta);
    }
    (last_pos, last_theta)
}

/// Render IMU samples and RSSI scans for a planned walk. Returns the trace
/// and the trough time of each step.
pub fn render_trace<R: Rng + ?Sized>(
    map: &IndoorMap,
    script: &WalkScript,
    plan: &WalkPlan,
    noise: &NoiseProfile,
    rng: &mut R,
) -> Result<(Trace, Vec<f64>), SynthError> {
    let gait = &script.gait;
    let fs = gait.sample_rate_hz;
    let dt = 1.0 / fs;
    let period = 1.0 / script.speed;
    let tl = timeline(script, plan);
    let count = (tl.total * fs).floor() as usize + 1;
    let n = plan.step_count();

    let mut gz = vec![noise.gyro_bias; count];
    let clamp_idx = |i: i64| i.clamp(0, count as i64 - 1) as usize;
    // turns: a boxcar whose sample sum times dt equals the heading change,
    // which the trapezoidal integral reproduces exactly
    let pulse = (gait.turn_duration_s * fs).round().max(1.0) as i64;
    for k in 1..n {
        let delta = wrap_angle(plan.rows[k + 1].theta - plan.rows[k].theta);
        if delta.abs() < 1e-12 {
            continue;
        }
        let center = if plan.pause_after[k] > 0.0 {
            tl.step_times[k - 1] + 0.25 * period + 0.5 * plan.pause_after[k]
        } else {
            0.5 * (tl.step_times[k - 1] + tl.step_times[k])
        };
        let i0 = (center * fs).round() as i64 - pulse / 2;
        let rate = delta / (pulse as f64 * dt);
        for i in i0..i0 + pulse {
            gz[clamp_idx(i)] += rate;
        }
    }
    if noise.heading_jitter_sigma > 0.0 {
        let jitter = Normal::new(0.0, noise.heading_jitter_sigma).expect("sigma validated");
        for k in 0..n {
            let at = tl.step_times[k] - 0.5 * period;
            gz[clamp_idx((at * fs).round() as i64)] += jitter.sample(rng) / dt;
        }
    }

    let accel_noise = Normal::new(0.0, noise.accel_noise_sigma).expect("sigma validated");
    let gyro_noise = Normal::new(0.0, noise.gyro_noise_sigma).expect("sigma validated");
    let mut samples = Vec::with_capacity(count);
    for (i, &z) in gz.iter().enumerate() {
        let t = i as f64 * dt;
        let mag = gait_magnitude(t, &tl.bouts, period, gait.amplitude, gait.sharpness);
        let mut accel = [0.0, 0.0, mag];
        let mut gyro = [0.0, 0.0, z];
        if noise.accel_noise_sigma > 0.0 {
            for a in &mut accel {
                *a += accel_noise.sample(rng);
            }
        }
        if noise.gyro_noise_sigma > 0.0 {
            for g in &mut gyro {
                *g += gyro_noise.sample(rng);
            }
        }
        samples.push(SensorSample { t, accel, gyro });
    }

    let radio = match noise.rssi_scenario {
        Some(s) => Some(script.radio.with_scenario(s)?),
        None => None,
    };
    let mut scans = Vec::new();
    if !map.indicators.is_empty() {
        let mut j = 0usize;
        loop {
            let t = j as f64 / script.scan_rate_hz;
            if t > tl.total {
                break;
            }
            let (pos, theta) = truth_at(t, plan, &tl);
            let h = Vec2::from_angle(theta);
            let readings = map
                .indicators
                .iter()
                .map(|(id, &at)| {
                    let facing = if (at - pos).dot(h) >= 0.0 { Facing::Toward } else { Facing::Away };
                    let d = at.distance(pos);
                    let dbm = match &radio {
                        Some(model) => model.sample(d, facing, rng),
                        None => noiseless(&script.radio, d, facing),
                    };
                    (id.clone(), dbm)
                })
                .collect();
            scans.push(RssiScan { t, readings });
            j += 1;
        }
    }
    Ok((Trace { samples, scans }, tl.step_times))
}

fn noiseless(model: &TwoSlopeModel, d: f64, facing: Facing) -> f64 {
    model.mean_dbm(d, facing).clamp(RSSI_MIN_DBM, RSSI_MAX_DBM)
}
