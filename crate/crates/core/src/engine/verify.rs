//! Maximum-likelihood check of a turn over a window of step headings.
//!
//! Each hypothesis is a corridor leaving the turning node; a heading
//! observation is modelled as Gaussian in its signed angular deviation from
//! the corridor bearing, independently per step. With equal priors the MAP
//! choice is the hypothesis with the largest summed log-likelihood.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::geometry::{signed_angle, Vec2};
use crate::map::{Direction, NodeId, WayId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    pub corridor: WayId,
    pub direction: Direction,
    /// Bearing leaving the node.
    pub bearing: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationState {
    pub node: NodeId,
    /// Corridor currently assumed (the first-check choice, or the last switch).
    pub candidate: WayId,
    pub k_win: usize,
    pub hypotheses: Vec<Hypothesis>,
    pub log_likelihood: BTreeMap<WayId, f64>,
    pub elapsed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnDecision {
    Confirm,
    Switch(WayId),
    Continue,
}

impl VerificationState {
    pub fn new(node: NodeId, candidate: WayId, hypotheses: Vec<Hypothesis>, k_win: usize) -> Self {
        let log_likelihood = hypotheses.iter().map(|h| (h.corridor, 0.0)).collect();
        VerificationState { node, candidate, k_win, hypotheses, log_likelihood, elapsed: 0 }
    }

    pub fn hypothesis(&self, corridor: WayId) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.corridor == corridor)
    }

    /// Fold one heading into every hypothesis.
    pub fn update(&mut self, h_o: Vec2, sigma_h: f64) {
        for hyp in &self.hypotheses {
            *self.log_likelihood.get_mut(&hyp.corridor).expect("hypothesis present") +=
                heading_log_likelihood(h_o, hyp.bearing, sigma_h);
        }
        self.elapsed += 1;
    }

    /// Hypothesis with the largest accumulated log-likelihood; lowest id on ties.
    pub fn best(&self) -> Option<WayId> {
        let mut best: Option<(WayId, f64)> = None;
        for (&id, &ll) in &self.log_likelihood {
            if best.is_none_or(|(_, b)| ll > b) {
                best = Some((id, ll));
            }
        }
        best.map(|(id, _)| id)
    }

    /// Start a fresh window on `candidate` with the same hypothesis set.
    pub fn rearmed(&self, candidate: WayId) -> Self {
        Self::new(self.node, candidate, self.hypotheses.clone(), self.k_win)
    }
}

/// log N(delta; 0, sigma^2) where delta is the signed angle from `bearing` to `h_o`.
pub fn heading_log_likelihood(h_o: Vec2, bearing: Vec2, sigma_h: f64) -> f64 {
    let d = signed_angle(bearing, h_o);
    let var = sigma_h * sigma_h;
    -0.5 * (2.0 * PI * var).ln() - d * d / (2.0 * var)
}

/// Functional form of [`VerificationState::update`].
pub fn likelihood_update(v: &VerificationState, h_o: Vec2, sigma_h: f64) -> VerificationState {
    let mut next = v.clone();
    next.update(h_o, sigma_h);
    next
}

/// Decide once the window is full: keep the candidate, or switch to the
/// better-supported corridor.
pub fn verify_turn(v: &VerificationState) -> TurnDecision {
    if v.elapsed < v.k_win {
        return TurnDecision::Continue;
    }
    decide(v)
}

/// Decision on whatever has been accumulated so far.
pub(crate) fn decide(v: &VerificationState) -> TurnDecision {
    match v.best() {
        Some(best) if best != v.candidate => TurnDecision::Switch(best),
        _ => TurnDecision::Confirm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_way() -> VerificationState {
        VerificationState::new(
            1,
            10,
            vec![
                Hypothesis { corridor: 10, direction: Direction::Fwd, bearing: Vec2::new(1.0, 0.0) },
                Hypothesis { corridor: 20, direction: Direction::Fwd, bearing: Vec2::new(0.0, 1.0) },
            ],
            5,
        )
    }

    #[test]
    fn exact_bearing_gets_the_mode() {
        let sigma = 0.26;
        let at_mode = heading_log_likelihood(Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0), sigma);
        for deg in [1.0f64, 10.0, 90.0, 179.0] {
            let off = heading_log_likelihood(Vec2::from_angle(deg.to_radians()), Vec2::new(1.0, 0.0), sigma);
            assert!(off < at_mode);
        }
    }

    #[test]
    fn window_along_first_bearing_separates_by_closed_form() {
        let sigma = 15f64.to_radians();
        let mut v = two_way();
        for _ in 0..5 {
            v.update(Vec2::new(1.0, 0.0), sigma);
        }
        let gap = v.log_likelihood[&10] - v.log_likelihood[&20];
        let expected = 5.0 * (PI / 2.0).powi(2) / (2.0 * sigma * sigma);
        assert!((gap - expected).abs() < 1e-9 * expected, "{gap} vs {expected}");
        assert_eq!(verify_turn(&v), TurnDecision::Confirm);
    }

    #[test]
    fn alternating_bisected_headings_tie() {
        let sigma = 0.3;
        let mut v = two_way();
        for i in 0..6 {
            let a = if i % 2 == 0 { 30f64 } else { 60f64 };
            v.update(Vec2::from_angle(a.to_radians()), sigma);
        }
        assert!((v.log_likelihood[&10] - v.log_likelihood[&20]).abs() < 1e-12);
        // tie keeps the lowest id
        assert_eq!(v.best(), Some(10));
    }

    #[test]
    fn incomplete_window_continues_and_switch_names_winner() {
        let sigma = 0.3;
        let mut v = two_way();
        v.update(Vec2::new(0.0, 1.0), sigma);
        assert_eq!(verify_turn(&v), TurnDecision::Continue);
        for _ in 0..4 {
            v.update(Vec2::new(0.0, 1.0), sigma);
        }
        assert_eq!(verify_turn(&v), TurnDecision::Switch(20));
    }
}
