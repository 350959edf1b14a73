//! Density functions and their Friedman–Ramanujan-style fits.

mod assembly;
mod fr;

pub use assembly::{
    assemble_density_pants, dirac_integral, level_set_integral, torus_once_intersecting_density, DensityAssembly,
    DensityPoint, SeriesFactor,
};
pub use fr::{f1, fr_decompose, FRDecomposition, Normalizer};
