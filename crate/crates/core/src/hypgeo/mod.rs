//! Hyperbolic geometry of pants and one-holed tori.

mod census;
mod pants;
mod torus;
mod words;

pub use census::{census_loc_types, verify_census, Census, CensusReport, CensusShape, FoundGeodesic};
pub use pants::{is_filling, length_from_trace, PantsModel};
pub use torus::{
    j_kappa, j_kappa_closed, j_kappa_direct, j_kappa_normalized_gap, j_kappa_normalized_limit,
    torus_from_lengths, torus_identities, JKappa, TorusModel,
};
pub use words::{for_each_cyclic_word, FreeWord};
