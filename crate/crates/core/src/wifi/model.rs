//! Synthetic RSSI: a two-slope log-distance curve with Gaussian noise.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::WifiError;

/// Measured RSSI mean and variance for the four body-interference scenarios:
/// phone alone on a cart, cart with the user standing by, in hand walking
/// towards the router, in hand walking away.
pub const SCENARIO_STATS: [(f64, f64); 4] = [(-59.05, 0.46), (-59.22, 1.95), (-57.83, 4.22), (-65.71, 9.45)];

pub const RSSI_MIN_DBM: f64 = -100.0;
pub const RSSI_MAX_DBM: f64 = 0.0;

/// (mean dBm, variance dBm^2) of scenario 1..=4.
pub fn scenario_stats(scenario: u8) -> Result<(f64, f64), WifiError> {
    match scenario {
        1..=4 => Ok(SCENARIO_STATS[scenario as usize - 1]),
        _ => Err(WifiError::Config(format!("RSSI scenario must be 1..=4, got {scenario}"))),
    }
}

/// Loss caused by the body blocking the direct path: walking-towards mean
/// minus walking-away mean.
pub fn body_shadow_db() -> f64 {
    SCENARIO_STATS[2].0 - SCENARIO_STATS[3].0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Facing {
    Toward,
    Away,
}

/// Path-loss exponent that turns `ref_dbm` at `ref_distance` into a value
/// `drop` times more negative at `at_distance`.
pub fn near_exponent_for_drop(ref_dbm: f64, ref_distance: f64, drop: f64, at_distance: f64) -> f64 {
    (-ref_dbm * drop) / (10.0 * (at_distance / ref_distance).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoSlopeModel {
    /// Mean RSSI at `ref_distance` facing the router; also the near-field cap.
    pub ref_dbm: f64,
    pub ref_distance: f64,
    /// Distance where the steep near slope gives way to the flat far slope.
    pub breakpoint: f64,
    pub near_exponent: f64,
    pub far_exponent: f64,
    pub body_shadow_db: f64,
    pub noise_variance: f64,
}

impl Default for TwoSlopeModel {
    fn default() -> Self {
        TwoSlopeModel {
            ref_dbm: -30.0,
            ref_distance: 0.3,
            breakpoint: 2.0,
            near_exponent: near_exponent_for_drop(-30.0, 0.3, 0.35, 1.5),
            far_exponent: 0.7,
            body_shadow_db: body_shadow_db(),
            noise_variance: SCENARIO_STATS[2].1,
        }
    }
}

impl TwoSlopeModel {
    pub fn with_scenario(self, scenario: u8) -> Result<Self, WifiError> {
        Ok(TwoSlopeModel { noise_variance: scenario_stats(scenario)?.1, ..self })
    }

    pub fn validate(&self) -> Result<(), WifiError> {
        if !(self.ref_distance > 0.0 && self.breakpoint > self.ref_distance) {
            return Err(WifiError::Config("need 0 < ref_distance < breakpoint".into()));
        }
        if self.near_exponent < 0.0 || self.far_exponent < 0.0 || self.noise_variance < 0.0 {
            return Err(WifiError::Config("exponents and noise variance must be non-negative".into()));
        }
        Ok(())
    }

    /// Noiseless mean RSSI at `distance` meters.
    pub fn mean_dbm(&self, distance: f64, facing: Facing) -> f64 {
        let d = distance.max(self.ref_distance);
        let near = |d: f64| self.ref_dbm - 10.0 * self.near_exponent * (d / self.ref_distance).log10();
        let toward = if d <= self.breakpoint {
            near(d)
        } else {
            near(self.breakpoint) - 10.0 * self.far_exponent * (d / self.breakpoint).log10()
        };
        match facing {
            Facing::Toward => toward,
            Facing::Away => toward - self.body_shadow_db,
        }
    }

    /// One noisy reading, clamped to the valid dBm range.
    pub fn sample<R: Rng + ?Sized>(&self, distance: f64, facing: Facing, rng: &mut R) -> f64 {
        let mean = self.mean_dbm(distance, facing);
        let noise = Normal::new(0.0, self.noise_variance.sqrt()).expect("variance validated non-negative");
        (mean + noise.sample(rng)).clamp(RSSI_MIN_DBM, RSSI_MAX_DBM)
    }
}

/// Free-function form of [`TwoSlopeModel::sample`].
pub fn synth_rssi<R: Rng + ?Sized>(distance: f64, facing: Facing, model: &TwoSlopeModel, rng: &mut R) -> f64 {
    model.sample(distance, facing, rng)
}

/// Draw `n` readings from N(mean, variance) of a measured scenario.
pub fn scenario_samples<R: Rng + ?Sized>(scenario: u8, n: usize, rng: &mut R) -> Result<Vec<f64>, WifiError> {
    let (mean, var) = scenario_stats(scenario)?;
    let dist = Normal::new(mean, var.sqrt()).expect("table variances are positive");
    Ok((0..n).map(|_| dist.sample(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drop_anchor_holds() {
        let m = TwoSlopeModel::default();
        let at_ref = m.mean_dbm(0.3, Facing::Toward);
        assert!((at_ref + 30.0).abs() < 1e-12);
        assert!((m.mean_dbm(1.5, Facing::Toward) - 1.35 * at_ref).abs() < 1e-9);
        // exponent = 10.5 / (10 log10 5)
        assert!((m.near_exponent - 1.502_209).abs() < 1e-5, "{}", m.near_exponent);
    }

    #[test]
    fn flat_beyond_breakpoint_and_capped_near() {
        let m = TwoSlopeModel::default();
        let d = m.mean_dbm(3.0, Facing::Toward) - m.mean_dbm(4.0, Facing::Toward);
        assert!(d > 0.0 && d < 1.0, "{d}");
        assert_eq!(m.mean_dbm(0.1, Facing::Toward), m.mean_dbm(0.3, Facing::Toward));
    }

    #[test]
    fn away_is_shadowed() {
        let m = TwoSlopeModel::default();
        let gap = m.mean_dbm(1.0, Facing::Toward) - m.mean_dbm(1.0, Facing::Away);
        assert!((gap - 7.88).abs() < 1e-9);
    }

    #[test]
    fn scenario_range_is_checked() {
        assert!(scenario_stats(0).is_err() && scenario_stats(5).is_err());
        assert_eq!(scenario_stats(4).unwrap(), (-65.71, 9.45));
    }
}
