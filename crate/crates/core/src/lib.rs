//! Indirect (power-only) microwave holography.
//!
//! A planar scene is illuminated, its scattered field is interfered with an
//! electronically synthesized reference whose phase advances by a fixed step
//! per scan sample, and only the resulting power is recorded. The complex
//! field is recovered by isolating the +1 diffraction order in the hologram
//! spectrum and back-propagating it with the angular spectrum method.
//!
//! Module map:
//!
//! * [`field`] grids, complex/real fields, 2D DFT and spectrum centring
//! * [`wave`] wavenumber, antenna geometry, angular-spectrum propagation, scene forward model
//! * [`reference`] synthesized reference wave and its sampling check
//! * [`hologram`] sum/difference port recordings, port differencing, background, noise
//! * [`spectral`] hologram spectrum, order location, +1 order demodulation
//! * [`reconstruct`] back-propagation, amplitude and wrapped phase
//! * [`metrics`] speckle index, SNR and SSIM
//! * [`enhance`] upscaling with an additive high-frequency residual
//! * [`io`], [`config`], [`pipeline`] file formats and orchestration

pub mod config;
pub mod enhance;
pub mod error;
pub mod field;
pub mod hologram;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod reconstruct;
pub mod reference;
pub mod spectral;
pub mod wave;

pub use error::{HoloError, Result};
