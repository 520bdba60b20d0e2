//! Frames, random subset spectra and their MANOVA limits, erasure Welch
//! bounds, and analog erasure coding performance.
//!
//! Frame vectors are the columns of an `m x n` matrix throughout.

pub mod coding;
pub mod error;
pub mod frames;
pub mod functionals;
pub mod harness;
pub mod io;
pub mod manova;
pub mod moments;
pub mod numeric;
pub mod rng;
pub mod spectra;

pub use error::{Error, Result};
pub use frames::{Family, Field, FrameMatrix};
pub use manova::ManovaParams;
pub use spectra::SubsetSpectrum;
