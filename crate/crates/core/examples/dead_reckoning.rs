//! Turn a raw IMU trace into steps and headings, then dead-reckon.
//!
//! Synthesizes a loop walk with gyro bias so the effect of bias removal is visible.

use arealoc::geometry::{wrap_angle, Vec2};
use arealoc::replay::load_map;
use arealoc::signal::{process_imu, SignalConfig};
use arealoc::synth::{synth_walk, NoiseProfile, WalkScript};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = load_map(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/maps/rect_loop.osm"))?.0;
    let noise =
        NoiseProfile { gyro_bias: 0.01, gyro_noise_sigma: 0.005, accel_noise_sigma: 0.01, ..NoiseProfile::zero() };
    let out = synth_walk(&map, &WalkScript::through_nodes(&[1, 2, 3, 4, 1]), &noise, 42)?;
    let start = &out.truth[0];

    for remove in [false, true] {
        let cfg = SignalConfig { remove_gyro_bias: remove, ..SignalConfig::default() };
        let imu = process_imu(&out.trace.samples, &cfg, start.theta)?;
        let mut pos = Vec2::new(start.x, start.y);
        for h in &imu.headings {
            pos += h.h_o * 0.7;
        }
        let end = out.truth.last().unwrap();
        let heading_err = wrap_angle(imu.headings.last().unwrap().theta - end.theta).to_degrees();
        println!(
            "bias removal {:<5}  {} steps (truth {}), estimated bias {:.4} rad/s, final heading error {:6.2} deg, end point off by {:.2} m",
            remove,
            imu.steps.len(),
            out.truth.len() - 1,
            imu.gyro_bias[2],
            heading_err,
            pos.distance(Vec2::new(end.x, end.y)),
        );
    }
    Ok(())
}
