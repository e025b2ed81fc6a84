//! Numerical global wave front sets of sampled signals.
//!
//! The wave front set of a tempered signal is estimated from the conic
//! decay of its short-time Fourier transform with a Gaussian window: a
//! phase-space direction is regular when `|V u|` decays like
//! `exp(-eps r^{1/theta})` in a cone around it.

pub mod config;
pub mod detect;
pub mod error;
pub mod fft;
pub mod geometry;
pub mod grid;
pub mod operators;
pub mod report;
pub mod serial;
pub mod signal;
pub mod synth;
pub mod transform;
pub mod verify;
pub mod window;

pub use config::DetectConfig;
pub use error::{Error, Result};
pub use geometry::{ConeSet, Direction};
pub use grid::{make_grid, GridSpec};
pub use report::{Class, WaveFrontReport};
pub use signal::{validate_signal, SampledSignal};
pub use transform::{stft, stft_adjoint, stft_direct, stft_field, StftField};
pub use window::{Window, WindowKind};
