//! Firing rate of the M-of-W vicinity rule as a function of distance to a router.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use arealoc::map::{MapBuilder, NodeKind};
use arealoc::wifi::{vicinity_check, Facing, IndicatorConfig, RssiScan, TwoSlopeModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let map = MapBuilder::new().node(1, 0.0, 0.0, NodeKind::Indicator { router: "ap".into() }).build()?;
    let cfg = IndicatorConfig::default();
    let model = TwoSlopeModel::default().with_scenario(3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("phi {} dBm, {} of {} scans", cfg.phi, cfg.m_of_w.0, cfg.m_of_w.1);
    println!("distance  mean(toward)  mean(away)  fires(toward)  fires(away)");
    for d in [0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0] {
        let mut rate = |facing| {
            let trials = 1000;
            let fired = (0..trials)
                .filter(|_| {
                    let scans: Vec<RssiScan> = (0..cfg.m_of_w.1)
                        .map(|i| RssiScan {
                            t: i as f64,
                            readings: BTreeMap::from([("ap".to_string(), model.sample(d, facing, &mut rng))]),
                        })
                        .collect();
                    vicinity_check(&scans, &cfg, &map).is_some()
                })
                .count();
            fired as f64 / trials as f64
        };
        let (toward, away) = (rate(Facing::Toward), rate(Facing::Away));
        println!(
            "{d:>6.1} m  {:>9.1} dBm  {:>7.1} dBm  {:>12.1}%  {:>10.1}%",
            model.mean_dbm(d, Facing::Toward),
            model.mean_dbm(d, Facing::Away),
            100.0 * toward,
            100.0 * away
        );
    }
    Ok(())
}
