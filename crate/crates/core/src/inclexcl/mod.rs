//! Inclusion-exclusion over short loops and tangles.

mod identities;
mod ledger;
mod phi;
mod weights;

pub use identities::{indicator_identity, tangle_sandwich};
pub use ledger::{ledger_pants, ledger_simple, AverageTerm, BaseType};
pub use phi::{
    phi_evaluate, rank_truncation_check, skeletons, FamilyRank, FillingType, PhiEvaluation, RankReport, RankRow,
    Skeleton, SkeletonFamily, DEFAULT_J_MAX, DEFAULT_SKELETON_CAP,
};
pub use weights::{i_kappa_weight, i_small, WeightFunction, WeightKind};
