//! Multicurve combinatorics: splitting types, orbit bounds and the series
//! controlling the number of short multicurves.

mod graph;
mod series;
mod splitting;

pub(crate) use graph::{compositions, connected, ordered, permutations, vertex_pairs};
pub use series::{
    moment_series, prob_b_bound, second_moment_check, tail_bound, tail_crossover, y_moment_bound, CertifiedSum,
    SecondMoment, SeriesParams, TailBound,
};
pub use splitting::{
    classes_by_part_data, enumerate_splittings, enumerate_splittings_capped, gluing_surjection_check, orbit_upper,
    GluingReport, Part, SplittingType, DEFAULT_SPLITTING_CAP,
};
