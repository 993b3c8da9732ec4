//! Deterministic dock-and-score engine and the staged high-throughput
//! screening pipeline built around it.

pub mod dockengine;
pub mod geometry;
pub mod molmodel;
pub mod pipeline;
pub mod predictor;
pub mod synth;
pub mod workflow;
