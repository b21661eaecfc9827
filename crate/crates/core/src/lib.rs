//! Simulation and verification toolkit for Popper's proposed entangled
//! two-slit experiment.
//!
//! The crate is organised bottom-up:
//!
//! - [`finite_qm`]: finite-dimensional bipartite density operators, local
//!   unitaries, nonselective projective measurements and a randomized
//!   no-signaling audit.
//! - [`gaussian`]: closed-form Gaussian packet algebra and the three-branch
//!   correlated source state.
//! - [`gridprop`]: sampled one- and two-particle wavefunctions with spectral
//!   free evolution, hard apertures and coincidence post-selection.
//! - [`diffraction`]: Fresnel integrals and the closed-form single-slit
//!   densities (near field and far field).
//! - [`experiment`]: the end-to-end scenario pipeline, the Collett–Loudon
//!   predictor and the perfect-correlation limit probe.
//!
//! Data-parallel inner loops (audit trials, FFT rows, click sampling) run on
//! rayon when the default `parallel` feature is enabled and fall back to plain
//! iterators otherwise. Results are bit-identical in both modes.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diffraction;
pub mod error;
pub mod experiment;
pub mod finite_qm;
pub mod gaussian;
pub mod gridprop;
pub mod output;
mod par;
pub mod quad;

pub use error::{Error, Result};
pub use gaussian::PhysicalParams;
