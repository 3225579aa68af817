//! Area-state aided indoor localization.
//!
//! Pedestrian dead reckoning from a handheld IMU is refined by the structure
//! of an indoor map (corridors, turning points, rooms and walls) and by WiFi
//! routers acting as vicinity indicators.

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod engine;
pub mod geometry;
pub mod map;
pub mod replay;
pub mod signal;
pub mod synth;
pub mod trace;
pub mod wifi;
