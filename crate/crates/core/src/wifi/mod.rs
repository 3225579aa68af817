//! WiFi routers as vicinity indicators.
//!
//! RSSI falls steeply within a couple of meters of a router and is nearly
//! flat beyond, so a run of strong readings says "the phone is near this
//! router" without any attempt at ranging.

mod model;

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use model::{
    body_shadow_db, near_exponent_for_drop, scenario_samples, scenario_stats, synth_rssi, Facing, TwoSlopeModel,
    RSSI_MAX_DBM, RSSI_MIN_DBM, SCENARIO_STATS,
};

use crate::engine::PositionalState;
use crate::map::IndoorMap;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WifiError {
    #[error("unknown router {0:?}")]
    UnknownRouter(String),
    #[error("no RSSI samples")]
    Empty,
    #[error("invalid indicator configuration: {0}")]
    Config(String),
}

/// One scan: readings in dBm keyed by router id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RssiScan {
    pub t: f64,
    pub readings: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IndicatorConfig {
    /// Readings above this count as "strong".
    pub phi: f64,
    /// Radius within which strong readings are expected.
    pub rho: f64,
    /// (required strong scans, window length) in scans.
    pub m_of_w: (usize, usize),
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        IndicatorConfig { phi: -40.0, rho: 2.0, m_of_w: (3, 5) }
    }
}

impl IndicatorConfig {
    pub fn validate(&self) -> Result<(), WifiError> {
        let (m, w) = self.m_of_w;
        if w < 1 || m < 1 || m > w {
            return Err(WifiError::Config(format!("need 1 <= M <= W, got M={m} W={w}")));
        }
        if !(self.phi < 0.0) {
            return Err(WifiError::Config(format!("phi must be negative, got {}", self.phi)));
        }
        if !(self.rho > 0.0) {
            return Err(WifiError::Config(format!("rho must be positive, got {}", self.rho)));
        }
        Ok(())
    }
}

/// Router within the vicinity radius according to the last W scans.
///
/// A router qualifies with a reading above `phi` in at least M of those
/// scans. Among several, the highest window-mean RSSI wins, then the
/// smallest id. Only routers present on the map are considered; fewer than
/// W scans gives `None`.
pub fn vicinity_check(history: &[RssiScan], cfg: &IndicatorConfig, map: &IndoorMap) -> Option<String> {
    vicinity_with_mean(history, cfg, map).map(|(id, _)| id)
}

/// Same as [`vicinity_check`] but also returns the winner's window mean.
pub fn vicinity_with_mean(history: &[RssiScan], cfg: &IndicatorConfig, map: &IndoorMap) -> Option<(String, f64)> {
    let (m, w) = cfg.m_of_w;
    if history.len() < w || w == 0 {
        return None;
    }
    let window = &history[history.len() - w..];
    let mut tally: BTreeMap<&str, (usize, f64, usize)> = BTreeMap::new();
    for scan in window {
        for (id, &dbm) in &scan.readings {
            if !map.indicators.contains_key(id) {
                continue;
            }
            let e = tally.entry(id.as_str()).or_insert((0, 0.0, 0));
            if dbm > cfg.phi {
                e.0 += 1;
            }
            e.1 += dbm;
            e.2 += 1;
        }
    }
    let mut best: Option<(&str, f64)> = None;
    for (id, (strong, sum, n)) in tally {
        if strong < m {
            continue;
        }
        let mean = sum / n as f64;
        if best.is_none_or(|(_, b)| mean > b) {
            best = Some((id, mean));
        }
    }
    best.map(|(id, mean)| (id.to_string(), mean))
}

/// Bounded buffer of the most recent scans.
#[derive(Debug, Clone)]
pub struct ScanWindow {
    scans: VecDeque<RssiScan>,
    capacity: usize,
}

impl ScanWindow {
    pub fn new(capacity: usize) -> Self {
        ScanWindow { scans: VecDeque::with_capacity(capacity), capacity: capacity.max(1) }
    }

    pub fn push(&mut self, scan: RssiScan) {
        if self.scans.len() == self.capacity {
            self.scans.pop_front();
        }
        self.scans.push_back(scan);
    }

    pub fn scans(&mut self) -> &[RssiScan] {
        self.scans.make_contiguous()
    }

    pub fn len(&self) -> usize {
        self.scans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scans.is_empty()
    }
}

/// Move the position onto the router; heading is untouched.
pub fn calibrate(state: &PositionalState, router: &str, map: &IndoorMap) -> Result<PositionalState, WifiError> {
    let at = map.indicators.get(router).ok_or_else(|| WifiError::UnknownRouter(router.to_string()))?;
    Ok(state.with_pos(*at))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RssiStats {
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    pub count: usize,
}

pub fn rssi_stats(samples: &[f64]) -> Result<RssiStats, WifiError> {
    if samples.is_empty() {
        return Err(WifiError::Empty);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let variance = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok(RssiStats { mean, variance, count: samples.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::map::{MapBuilder, NodeKind, WayKind};

    fn map() -> IndoorMap {
        MapBuilder::new()
            .node(1, 0.0, 0.0, NodeKind::TurningPoint)
            .node(2, 20.0, 0.0, NodeKind::TurningPoint)
            .way(100, WayKind::Corridor, &[1, 2])
            .node(30, 8.0, 0.0, NodeKind::Indicator { router: "a".into() })
            .node(31, 15.0, 0.0, NodeKind::Indicator { router: "b".into() })
            .build()
            .unwrap()
    }

    fn scans(rows: &[&[(&str, f64)]]) -> Vec<RssiScan> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| RssiScan { t: i as f64, readings: r.iter().map(|(k, v)| (k.to_string(), *v)).collect() })
            .collect()
    }

    #[test]
    fn m_of_w_rule() {
        let m = map();
        let cfg = IndicatorConfig::default();
        let all = scans(&[&[("a", -35.0)][..]; 5]);
        assert_eq!(vicinity_check(&all, &cfg, &m).as_deref(), Some("a"));
        let two = scans(&[&[("a", -35.0)], &[("a", -35.0)], &[("a", -45.0)], &[("a", -45.0)], &[("a", -45.0)]]);
        assert_eq!(vicinity_check(&two, &cfg, &m), None);
        assert_eq!(vicinity_check(&all[..4], &cfg, &m), None);
    }

    #[test]
    fn strongest_mean_wins_then_smallest_id() {
        let m = map();
        let cfg = IndicatorConfig::default();
        let both = scans(&[&[("a", -36.0), ("b", -38.0)][..]; 5]);
        assert_eq!(vicinity_check(&both, &cfg, &m).as_deref(), Some("a"));
        let tied = scans(&[&[("a", -37.0), ("b", -37.0)][..]; 5]);
        assert_eq!(vicinity_check(&tied, &cfg, &m).as_deref(), Some("a"));
        let unknown = scans(&[&[("zz", -20.0)][..]; 5]);
        assert_eq!(vicinity_check(&unknown, &cfg, &m), None);
    }

    #[test]
    fn calibrate_moves_to_router_only() {
        let m = map();
        let st = PositionalState::new(Vec2::new(10.0, 3.0), 1.0);
        let out = calibrate(&st, "a", &m).unwrap();
        assert_eq!(out.pos, Vec2::new(8.0, 0.0));
        assert_eq!(out.h, st.h);
        assert_eq!(calibrate(&out, "a", &m).unwrap(), out);
        assert_eq!(calibrate(&st, "nope", &m), Err(WifiError::UnknownRouter("nope".into())));
    }

    #[test]
    fn stats_hand_values() {
        let s = rssi_stats(&[-40.0, -60.0]).unwrap();
        assert_eq!((s.mean, s.variance, s.count), (-50.0, 100.0, 2));
        let c = rssi_stats(&[-59.0; 100]).unwrap();
        assert_eq!((c.mean, c.variance), (-59.0, 0.0));
        assert_eq!(rssi_stats(&[]), Err(WifiError::Empty));
    }

    #[test]
    fn window_keeps_latest() {
        let mut w = ScanWindow::new(2);
        for s in scans(&[&[("a", -1.0)], &[("a", -2.0)], &[("a", -3.0)]]) {
            w.push(s);
        }
        let ts: Vec<f64> = w.scans().iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![1.0, 2.0]);
    }
}
