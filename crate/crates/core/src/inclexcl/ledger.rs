//! The inclusion-exclusion term families, kept as data.

use serde::Serialize;

use super::weights::WeightFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseType {
    /// The simple closed geodesic.
    Simple,
    /// Pairs of simple loops filling a one-holed torus.
    TorusTwoSimple,
    /// Simple loop next to a pair of pants with its boundary marked.
    SimpleWithPantsBoundary,
    /// Simple loop next to a one-holed torus with its boundary marked.
    SimpleWithTorusBoundary,
    /// Simple loop next to a one-holed torus holding a simple loop and its boundary.
    SimpleWithTorusSimpleBoundary,
    /// One-holed torus with a simple loop and its boundary.
    TorusSimpleBoundary,
    /// Two simple loops on a one-holed torus with its boundary.
    TorusTwoSimpleBoundary,
    /// A loop filling a pair of pants.
    Pants,
    /// The same loop with the pants boundary marked.
    PantsBoundary,
    /// The pants loop on a one-holed torus together with a simple loop and the boundary.
    TorusPantsSimpleBoundary,
}

impl BaseType {
    /// Absolute Euler characteristic of the filled surface.
    pub fn abs_euler(&self) -> u32 {
        match self {
            BaseType::Simple => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageTerm {
    pub sign: i8,
    pub base_tag: BaseType,
    /// Whether the term sums over a family of local types.
    pub summed: bool,
    pub weights: Vec<WeightFunction>,
    /// Every term is averaged against `mu_kappa^j` for `0 <= j <= floor(log g)`.
    pub rho_j: bool,
    /// Multiplicity normalization, reported symbolically.
    pub n_t: u32,
}

impl AverageTerm {
    fn new(sign: i8, base_tag: BaseType, summed: bool, weights: Vec<WeightFunction>) -> Self {
        AverageTerm { sign, base_tag, summed, weights, rho_j: true, n_t: 1 }
    }
}

/// Seven families for the simple local type, in printed order.
pub fn ledger_simple() -> Vec<AverageTerm> {
    use BaseType::*;
    let k1 = WeightFunction::short(1);
    let r1 = WeightFunction::tangle(1);
    let r3 = WeightFunction::tangle(3);
    vec![
        AverageTerm::new(1, Simple, false, vec![]),
        AverageTerm::new(-1, TorusTwoSimple, true, vec![k1]),
        AverageTerm::new(-1, SimpleWithPantsBoundary, false, vec![r3]),
        AverageTerm::new(-1, SimpleWithTorusBoundary, false, vec![r1]),
        AverageTerm::new(1, SimpleWithTorusSimpleBoundary, false, vec![k1, r1]),
        AverageTerm::new(-1, TorusSimpleBoundary, false, vec![r1]),
        AverageTerm::new(1, TorusTwoSimpleBoundary, true, vec![k1, r1]),
    ]
}

/// Three families for a local type filling a pair of pants.
pub fn ledger_pants() -> Vec<AverageTerm> {
    use BaseType::*;
    vec![
        AverageTerm::new(1, Pants, false, vec![]),
        AverageTerm::new(-1, PantsBoundary, false, vec![WeightFunction::tangle(3)]),
        AverageTerm::new(
            1,
            TorusPantsSimpleBoundary,
            true,
            vec![WeightFunction::short(1), WeightFunction::tangle(1)],
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inclexcl::WeightKind;

    fn signs(l: &[AverageTerm]) -> Vec<i8> {
        l.iter().map(|t| t.sign).collect()
    }

    #[test]
    fn simple_golden() {
        let l = ledger_simple();
        assert_eq!(signs(&l), [1, -1, -1, -1, 1, -1, 1]);
        let arities: Vec<Vec<(WeightKind, u32)>> =
            l.iter().map(|t| t.weights.iter().map(|w| (w.kind, w.arity)).collect()).collect();
        use WeightKind::*;
        assert_eq!(
            arities,
            vec![
                vec![],
                vec![(ShortLoopProduct, 1)],
                vec![(TangleBoundary, 3)],
                vec![(TangleBoundary, 1)],
                vec![(ShortLoopProduct, 1), (TangleBoundary, 1)],
                vec![(TangleBoundary, 1)],
                vec![(ShortLoopProduct, 1), (TangleBoundary, 1)],
            ]
        );
    }

    #[test]
    fn only_the_uncut_term_has_zero_euler_characteristic() {
        let l = ledger_simple();
        assert_eq!(l[0].base_tag.abs_euler(), 0);
        assert!(l.iter().chain(&ledger_pants()).all(|t| t.base_tag.abs_euler() <= 1));
    }

    #[test]
    fn no_pants_filled_by_simple_loops() {
        // the simple ledger never places its loops as a filling of a pair of pants
        assert!(!ledger_simple().iter().any(|t| t.base_tag == BaseType::Pants));
    }

    #[test]
    fn pants_golden() {
        let l = ledger_pants();
        assert_eq!(signs(&l), [1, -1, 1]);
        assert_eq!(l[1].weights, vec![WeightFunction::tangle(3)]);
        assert_eq!(l[2].weights.len(), 2);
    }

    #[test]
    fn ledgers_serialize() {
        let s = serde_json::to_string(&ledger_pants()).unwrap();
        assert!(s.contains("\"base_tag\":\"pants_boundary\""));
    }
}
