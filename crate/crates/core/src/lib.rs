//! Computational toolkit for the tangle-free trace method on random
//! hyperbolic surfaces.

pub mod densities;
pub mod error;
pub mod expansion;
pub mod hypgeo;
pub mod inclexcl;
pub mod multicurves;
pub mod numeric;
pub mod trace;
pub mod volumes;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use volumes::{NumericVolumes, Signature, VolumeCache, VolumePolynomial};
