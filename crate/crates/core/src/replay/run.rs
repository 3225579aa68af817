use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ErrorReport, ReplayError};
use crate::config::Config;
use crate::engine::{AreaLabel, Engine, EngineStats, Observation, PositionalState, StateFlags};
use crate::geometry::{LocalPoint, Vec2};
use crate::map::IndoorMap;
use crate::signal::process_imu;
use crate::trace::{Trace, TruthRow};
use crate::wifi::{vicinity_with_mean, IndicatorConfig, RssiScan, ScanWindow};

/// Which aids are layered on top of dead reckoning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Imu,
    Area,
    Indicator,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantSpec {
    pub use_area_state: bool,
    pub use_indicator: bool,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Imu, Variant::Area, Variant::Indicator, Variant::Full];

    pub fn spec(self) -> VariantSpec {
        match self {
            Variant::Imu => VariantSpec { use_area_state: false, use_indicator: false },
            Variant::Area => VariantSpec { use_area_state: true, use_indicator: false },
            Variant::Indicator => VariantSpec { use_area_state: false, use_indicator: true },
            Variant::Full => VariantSpec { use_area_state: true, use_indicator: true },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Imu => "imu",
            Variant::Area => "area",
            Variant::Indicator => "indicator",
            Variant::Full => "full",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown variant {s:?} (expected imu, area, indicator or full)"))
    }
}

/// Where error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    /// Only at scripted waypoints.
    #[default]
    Reference,
    EveryStep,
}

/// Known initial condition of a replay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartState {
    pub pos: LocalPoint,
    pub theta: f64,
    pub area: AreaLabel,
}

impl From<&TruthRow> for StartState {
    fn from(r: &TruthRow) -> Self {
        StartState { pos: LocalPoint::new(r.x, r.y), theta: r.theta, area: r.area }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatedStep {
    pub step: usize,
    pub pos: LocalPoint,
    pub theta: f64,
    /// Only tracked by the area-state variants.
    pub area: Option<AreaLabel>,
    pub flags: StateFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub variant: Variant,
    pub steps: Vec<EstimatedStep>,
    pub warnings: Vec<String>,
    pub engine_stats: Option<EngineStats>,
}

/// Decides when a vicinity detection should move the estimate.
///
/// Within one vicinity episode (same router qualifying on consecutive
/// scans) a calibration fires whenever the window mean beats the best mean
/// seen so far, so the fix follows the walker in to the router and then lets
/// go as the signal fades.
#[derive(Debug, Clone)]
pub struct IndicatorTracker {
    cfg: IndicatorConfig,
    window: ScanWindow,
    episode: Option<(String, f64)>,
}

impl IndicatorTracker {
    pub fn new(cfg: IndicatorConfig) -> Self {
        IndicatorTracker { cfg, window: ScanWindow::new(cfg.m_of_w.1), episode: None }
    }

    /// Add a scan; returns the router to calibrate to, if any.
    pub fn push(&mut self, scan: RssiScan, map: &IndoorMap) -> Option<String> {
        self.window.push(scan);
        let Some((id, mean)) = vicinity_with_mean(self.window.scans(), &self.cfg, map) else {
            self.episode = None;
            return None;
        };
        match &mut self.episode {
            Some((current, best)) if *current == id => {
                if mean > *best {
                    *best = mean;
                    Some(id)
                } else {
                    None
                }
            }
            _ => {
                self.episode = Some((id.clone(), mean));
                Some(id)
            }
        }
    }
}

enum Tracker<'m> {
    DeadReckoning(Vec<EstimatedStep>),
    Engine(Box<Engine<'m>>),
}

impl Tracker<'_> {
    fn calibrate(&mut self, fix: LocalPoint) {
        match self {
            Tracker::DeadReckoning(steps) => {
                let last = steps.last_mut().expect("start state present");
                last.pos = fix;
                last.flags.rssi_calibrated = true;
            }
            Tracker::Engine(e) => e.calibrate(fix),
        }
    }
}

/// Run one variant over a trace from a known start.
pub fn estimate_trajectory(
    map: &IndoorMap,
    trace: &Trace,
    start: StartState,
    variant: Variant,
    cfg: &Config,
) -> Result<Estimate, ReplayError> {
    let spec = variant.spec();
    let imu = process_imu(&trace.samples, &cfg.signal, start.theta)?;
    let s = cfg.engine.step_length;
    let mut warnings = Vec::new();

    let mut tracker = if spec.use_area_state {
        let st = PositionalState::new(start.pos, start.theta);
        Tracker::Engine(Box::new(Engine::new(map, cfg.engine, st, start.area)?))
    } else {
        Tracker::DeadReckoning(vec![EstimatedStep {
            step: 0,
            pos: start.pos,
            theta: start.theta,
            area: None,
            flags: StateFlags::default(),
        }])
    };

    let mut indicator = IndicatorTracker::new(cfg.indicator);
    let mut scans = trace.scans.iter().peekable();
    if spec.use_indicator {
        let unknown: BTreeSet<&String> =
            trace.scans.iter().flat_map(|s| s.readings.keys()).filter(|id| !map.indicators.contains_key(*id)).collect();
        for id in unknown {
            warnings.push(format!("router {id:?} is not on the map; ignored"));
        }
    }
    let mut feed = |until: f64, tracker: &mut Tracker<'_>| {
        while let Some(scan) = scans.next_if(|sc| sc.t < until) {
            if let Some(router) = indicator.push(scan.clone(), map) {
                tracker.calibrate(map.indicators[&router]);
            }
        }
    };

    for (step, heading) in imu.steps.iter().zip(&imu.headings) {
        if spec.use_indicator {
            feed(step.t, &mut tracker);
        }
        match &mut tracker {
            Tracker::DeadReckoning(steps) => {
                let prev = steps.last().expect("start state present").pos;
                steps.push(EstimatedStep {
                    step: heading.k,
                    pos: prev + Vec2::from_angle(heading.theta) * s,
                    theta: heading.theta,
                    area: None,
                    flags: StateFlags::default(),
                });
            }
            Tracker::Engine(e) => {
                e.step(&Observation::from_theta(heading.k, heading.theta, s))?;
            }
        }
    }
    if spec.use_indicator {
        feed(f64::INFINITY, &mut tracker);
    }

    let (steps, engine_stats) = match tracker {
        Tracker::DeadReckoning(steps) => (steps, None),
        Tracker::Engine(e) => {
            let stats = e.stats();
            let steps = e
                .history()
                .iter()
                .map(|j| EstimatedStep {
                    step: j.k,
                    pos: j.positional.pos,
                    theta: j.positional.theta,
                    area: Some(j.area.label),
                    flags: j.flags,
                })
                .collect();
            (steps, Some(stats))
        }
    };
    Ok(Estimate { variant, steps, warnings, engine_stats })
}

/// Position error against truth, at reference points or at every step.
/// Truth steps past the end of the estimate are compared with its last state.
pub fn evaluate(estimate: &Estimate, truth: &[TruthRow], mode: ErrorMode) -> Result<ErrorReport, ReplayError> {
    let last = estimate.steps.len() - 1;
    let errors: Vec<(usize, f64)> = truth
        .iter()
        .skip(1)
        .filter(|r| mode == ErrorMode::EveryStep || r.reference)
        .map(|r| {
            let est = &estimate.steps[r.step.min(last)];
            (r.step, est.pos.distance(LocalPoint::new(r.x, r.y)))
        })
        .collect();
    ErrorReport::from_errors(errors)
}

/// Estimate and score one variant.
pub fn replay_variant(
    map: &IndoorMap,
    trace: &Trace,
    truth: &[TruthRow],
    variant: Variant,
    cfg: &Config,
) -> Result<(Estimate, ErrorReport), ReplayError> {
    let first = truth.first().ok_or(ReplayError::NoErrors)?;
    let mut estimate = estimate_trajectory(map, trace, StartState::from(first), variant, cfg)?;
    let detected = estimate.steps.len() - 1;
    let expected = truth.len() - 1;
    if detected != expected {
        estimate.warnings.push(format!("detected {detected} steps, truth has {expected}"));
    }
    let report = evaluate(&estimate, truth, cfg.error_mode)?;
    Ok((estimate, report))
}
