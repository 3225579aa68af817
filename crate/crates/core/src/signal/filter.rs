use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SignalError;

/// Low-pass and bias-estimation settings for the IMU front end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub order: usize,
    pub cutoff_hz: f64,
    pub sample_rate_hz: f64,
    /// Number of leading (stationary) samples averaged for bias removal.
    pub bias_window: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig { order: 2, cutoff_hz: 3.0, sample_rate_hz: 50.0, bias_window: 100 }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), SignalError> {
        if self.order < 1 {
            return Err(SignalError::Config("filter order must be at least 1".into()));
        }
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return Err(SignalError::Config(format!("invalid sample rate {}", self.sample_rate_hz)));
        }
        if !(self.cutoff_hz > 0.0 && self.cutoff_hz < self.sample_rate_hz / 2.0) {
            return Err(SignalError::Config(format!(
                "cutoff {} Hz must lie in (0, {}) Hz",
                self.cutoff_hz,
                self.sample_rate_hz / 2.0
            )));
        }
        if self.bias_window < 1 {
            return Err(SignalError::Config("bias window must be at least 1 sample".into()));
        }
        Ok(())
    }
}

/// Transposed direct-form II second-order section, normalized so a0 = 1.
#[derive(Debug, Clone, Copy)]
struct Biquad {
    b: [f64; 3],
    a: [f64; 2],
    s1: f64,
    s2: f64,
}

impl Biquad {
    fn process(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.s1;
        self.s1 = self.b[1] * x - self.a[0] * y + self.s2;
        self.s2 = self.b[2] * x - self.a[1] * y;
        y
    }

    /// State of a section that has seen `x` forever (unit DC gain).
    fn prime(&mut self, x: f64) {
        self.s2 = (self.b[2] - self.a[1]) * x;
        self.s1 = (self.b[1] - self.a[0]) * x + self.s2;
    }
}

/// Digital Butterworth low-pass built with the bilinear transform (cutoff
/// pre-warped) as a cascade of second-order sections, plus one first-order
/// section for odd orders.
#[derive(Debug, Clone)]
pub struct Butterworth {
    sections: Vec<Biquad>,
    order: usize,
    warped: f64,
}

impl Butterworth {
    pub fn new(cfg: &FilterConfig) -> Result<Self, SignalError> {
        cfg.validate()?;
        let n = cfg.order;
        let k = (PI * cfg.cutoff_hz / cfg.sample_rate_hz).tan();
        let k2 = k * k;
        let mut sections = Vec::with_capacity(n.div_ceil(2));
        for i in 0..n / 2 {
            // analog pole pair at angle (2i + n + 1) pi / 2n
            let theta = PI * (2 * i + n + 1) as f64 / (2 * n) as f64;
            let two_zeta = -2.0 * theta.cos();
            let norm = 1.0 / (1.0 + two_zeta * k + k2);
            let b0 = k2 * norm;
            sections.push(Biquad {
                b: [b0, 2.0 * b0, b0],
                a: [2.0 * (k2 - 1.0) * norm, (1.0 - two_zeta * k + k2) * norm],
                s1: 0.0,
                s2: 0.0,
            });
        }
        if n % 2 == 1 {
            let norm = 1.0 / (1.0 + k);
            sections.push(Biquad { b: [k * norm, k * norm, 0.0], a: [(k - 1.0) * norm, 0.0], s1: 0.0, s2: 0.0 });
        }
        Ok(Butterworth { sections, order: n, warped: k })
    }

    pub fn process(&mut self, x: f64) -> f64 {
        self.sections.iter_mut().fold(x, |acc, s| s.process(acc))
    }

    /// Put every section in the steady state for a constant input `x`.
    pub fn prime(&mut self, x: f64) {
        for s in &mut self.sections {
            s.prime(x);
        }
    }

    pub fn reset(&mut self) {
        for s in &mut self.sections {
            s.s1 = 0.0;
            s.s2 = 0.0;
        }
    }

    /// Closed-form |H| of the bilinear Butterworth at `freq_hz`.
    pub fn magnitude_at(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        let ratio = (PI * freq_hz / sample_rate_hz).tan() / self.warped;
        1.0 / (1.0 + ratio.powi(2 * self.order as i32)).sqrt()
    }
}

/// Causal Butterworth low-pass starting from rest.
pub fn lowpass(samples: &[f64], cfg: &FilterConfig) -> Result<Vec<f64>, SignalError> {
    if samples.is_empty() {
        return Err(SignalError::TooShort { needed: 1, got: 0 });
    }
    let mut f = Butterworth::new(cfg)?;
    Ok(samples.iter().map(|&x| f.process(x)).collect())
}

/// Same filter, but started in steady state at the first sample so a signal
/// that begins at a non-zero level has no start-up transient.
pub fn lowpass_primed(samples: &[f64], cfg: &FilterConfig) -> Result<Vec<f64>, SignalError> {
    let Some(&first) = samples.first() else {
        return Err(SignalError::TooShort { needed: 1, got: 0 });
    };
    let mut f = Butterworth::new(cfg)?;
    f.prime(first);
    Ok(samples.iter().map(|&x| f.process(x)).collect())
}

/// Subtract the mean of the first `window` samples from every sample.
pub fn remove_bias(samples: &[[f64; 3]], window: usize) -> Result<(Vec<[f64; 3]>, [f64; 3]), SignalError> {
    if window == 0 {
        return Err(SignalError::Config("bias window must be at least 1 sample".into()));
    }
    if samples.len() < window {
        return Err(SignalError::TooShort { needed: window, got: samples.len() });
    }
    let mut bias = [0.0; 3];
    for s in &samples[..window] {
        for (b, v) in bias.iter_mut().zip(s) {
            *b += v;
        }
    }
    for b in &mut bias {
        *b /= window as f64;
    }
    let out = samples.iter().map(|s| [s[0] - bias[0], s[1] - bias[1], s[2] - bias[2]]).collect();
    Ok((out, bias))
}
