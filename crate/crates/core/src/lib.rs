//! Executable harmonic-analysis toolkit for polynomial exponential sums:
//! scale-dependent coefficient norms, sums over progressions, Gauss sums and
//! major-arc multipliers, discrete Carleson-type operators with TT* kernels,
//! and an inverse-theorem verifier.

pub mod calibration;
pub mod carleson;
pub mod circle;
pub mod coeffnorm;
pub mod error;
pub mod expsum;
pub mod invthm;
pub mod numeric;
pub mod polycore;
pub mod sampling;

pub use error::{Error, Result};

/// Version of this library, recorded in report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
