//! Real-time visual tracking with fast target-loss recovery.
//!
//! The tracker correlates a running-average appearance model against a search
//! window every frame and gates the result on the ratio of the two dominant
//! response peaks (NNDR). A confident frame follows the peak and refreshes the
//! model; an ambiguous frame enters a one-frame failure mode in which the box
//! is updated by a census-transform backup matcher and the next search area is
//! enlarged, so the target can be re-acquired instead of locking onto the
//! background.
//!
//! The crate also ships the evaluation harness (OPE/TRE protocols, success and
//! precision curves, fps reporting), an OTB-layout sequence loader, and a
//! seeded synthetic-sequence generator used to exercise recovery behavior.

pub mod census;
pub mod config;
pub mod correlation;
pub mod eval;
pub mod features;
pub mod geom;
pub mod peaks;
pub mod plot;
pub mod synth;
pub mod template;
pub mod tracker;

pub use geom::{center_error, crop_patch, iou, BoundingBox, Frame, Patch};
pub use tracker::{run_sequence, SequenceRun, StepOutcome, Tracker, TrackerConfig, Variant};
