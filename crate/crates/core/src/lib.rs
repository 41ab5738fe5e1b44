//! Quasi-static model of a legged robot's elliptical shell pushing through a
//! channel of compliant beams, with the energy metrics and tactile-shell
//! calibration used to analyse recorded trials.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line and plotting live in the `terradyn` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod beam;
pub mod calibration;
pub mod error;
pub mod geometry;
pub mod lstsq;
pub mod metrics;
pub mod presets;
pub mod simulator;
pub mod telemetry;

pub use beam::{BeamSpec, ContactResult};
pub use calibration::{CalibrationModel, CalibrationSample, SensorForwardModel};
pub use error::{CalibrationError, MetricsError, ModelError, TelemetryError};
pub use geometry::{EllipseBody, Heading, Point2, Side, Vec2};
pub use metrics::{StrideMetrics, TrialMetrics};
pub use presets::Preset;
pub use simulator::{ChannelSpec, ForceSample, ForceTrace, Sides, SweepOptions};
pub use telemetry::{ChannelWindow, TelemetryRecord, WindowParams};
