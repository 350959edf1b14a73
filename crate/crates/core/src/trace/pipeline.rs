//! Exponent bookkeeping for the final probability bound, in exact rational
//! arithmetic. Expectations over moduli space are not computed here; they
//! enter as exponent records.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const BOUNDARY_NOTE: &str = "The Selberg trace formula is not evaluated: moduli-space expectations enter \
only through the exponent records listed under inputs, and the existential constants C_eps, c1, c2, chi_plus \
stay symbolic.";

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn show(x: &BigRational) -> String {
    x.to_string()
}

/// Parses `0.05`, `1/20`, `5e-2` or `-3` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::domain(format!("cannot read {text:?} as a rational number"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let whole: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(whole * ten.pow(scale as u32))
    } else {
        BigRational::new(whole, ten.pow((-scale) as u32))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// `constant + eps * slope`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub constant: BigRational,
    pub slope: BigRational,
}

impl Affine {
    pub fn new(constant: BigRational, slope: BigRational) -> Self {
        Affine { constant, slope }
    }

    pub fn ints(constant: i64, slope: i64) -> Self {
        Affine::new(q(constant, 1), q(slope, 1))
    }

    pub fn at(&self, eps: &BigRational) -> BigRational {
        &self.constant + &self.slope * eps
    }

    pub fn add(&self, other: &Affine) -> Affine {
        Affine::new(&self.constant + &other.constant, &self.slope + &other.slope)
    }

    pub fn sub(&self, other: &Affine) -> Affine {
        Affine::new(&self.constant - &other.constant, &self.slope - &other.slope)
    }

    pub fn scale(&self, by: &BigRational) -> Affine {
        Affine::new(&self.constant * by, &self.slope * by)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.constant;
        let s = &self.slope;
        let eps = if s.is_one() {
            "eps".to_string()
        } else if *s == -BigRational::one() {
            "-eps".to_string()
        } else {
            format!("{s}*eps")
        };
        match (c.is_zero(), s.is_zero()) {
            (_, true) => write!(f, "{c}"),
            (true, false) => write!(f, "{eps}"),
            (false, false) if s.is_negative() => write!(f, "{c} - {}", eps.trim_start_matches('-')),
            _ => write!(f, "{c} + {eps}"),
        }
    }
}

impl Serialize for Affine {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A bound `O(g^{exponent} (log g)^{log_power})` taken as an input.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentRecord {
    pub name: String,
    pub statement: String,
    pub exponent: Affine,
    pub log_power: u32,
}

impl ExponentRecord {
    pub fn new(name: &str, statement: &str, exponent: Affine, log_power: u32) -> Self {
        ExponentRecord { name: name.into(), statement: statement.into(), exponent, log_power }
    }
}

#[derive(Debug, Clone)]
pub struct BoundConstants {
    pub epsilon: BigRational,
    pub kappa: BigRational,
    pub alpha: BigRational,
    pub m: u32,
    pub q: u32,
    /// `L = length_factor * log g`.
    pub length_factor: BigRational,
    pub symbolic: Vec<String>,
    pub inputs: Vec<ExponentRecord>,
}

/// Records used by the final argument; `expectation` is the assumed
/// `E <= C g^{1 + 5 eps}` and the rest are the pieces it is assembled from.
pub fn standard_records() -> Vec<ExponentRecord> {
    vec![
        ExponentRecord::new(
            "expectation",
            "E[H_hat(r1) 1_TF] <= C g^(1 + 5 eps)",
            Affine::ints(1, 5),
            0,
        ),
        ExponentRecord::new("selberg_remainder", "non-geodesic terms of the trace formula", Affine::ints(1, 0), 2),
        ExponentRecord::new("local_types", "number of local types in the census", Affine::ints(0, 1), 0),
        ExponentRecord::new("torus_types", "average over a double-filling torus type", Affine::ints(1, 4), 0),
        ExponentRecord::new("pants_types", "average over a simple or pants-filling type", Affine::ints(1, 1), 0),
    ]
}

impl BoundConstants {
    pub fn new(epsilon: BigRational, kappa: BigRational, m: u32) -> Self {
        BoundConstants {
            epsilon,
            kappa,
            alpha: q(1, 6),
            m,
            q: 77,
            length_factor: q(6, 1),
            symbolic: ["C_eps", "c1", "c2", "chi_plus"].iter().map(|s| s.to_string()).collect(),
            inputs: standard_records(),
        }
    }

    fn record(&self, name: &str) -> Option<&ExponentRecord> {
        self.inputs.iter().find(|r| r.name == name)
    }

    fn validate(&self) -> Result<()> {
        let zero = BigRational::zero();
        if !(self.epsilon > zero && self.epsilon < q(2, 9)) {
            return Err(Error::domain(format!("eps = {} must lie in (0, 2/9)", self.epsilon)));
        }
        if !(self.kappa > zero && self.kappa < BigRational::one()) {
            return Err(Error::domain(format!("kappa = {} must lie in (0, 1)", self.kappa)));
        }
        if self.m == 0 {
            return Err(Error::domain("the operator power m must be at least 1"));
        }
        if !(self.length_factor > zero) {
            return Err(Error::domain("the length factor must be positive"));
        }
        for (i, r) in self.inputs.iter().enumerate() {
            if self.inputs[..i].iter().any(|p| p.name == r.name) {
                return Err(Error::domain(format!("exponent record {:?} is given twice", r.name)));
            }
        }
        for name in ["selberg_remainder", "local_types", "torus_types", "pants_types"] {
            if self.record(name).is_none() {
                return Err(Error::domain(format!("missing exponent record {name:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineStep {
    pub name: String,
    pub statement: String,
    pub exponent: Option<Affine>,
    /// Exponent evaluated at the given `eps`.
    pub value: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub epsilon: String,
    pub kappa: String,
    pub alpha: String,
    pub m: u32,
    pub q: u32,
    pub length_scale: String,
    pub tangle_radius: String,
    pub symbolic_constants: Vec<String>,
    pub inputs: Vec<ExponentRecord>,
    pub steps: Vec<PipelineStep>,
    /// `alpha^2 + 2/9 = 1/4`.
    pub gap_identity: bool,
    /// `(1/4 + r^2)^m = lambda^m` at `r = i sqrt(1/4 - lambda)`, checked at `lambda = kappa`.
    pub factor_identity: bool,
    pub expectation_exponent: Affine,
    pub denominator_exponent: Affine,
    pub main_term_exponent: Affine,
    pub main_term_value: String,
    pub tangle_exponent: String,
    pub small_eigenvalue_hypothesis: bool,
    pub limsup: String,
    pub certified: bool,
    pub boundary: String,
}

fn max_at<'a>(items: &'a [Affine], eps: &BigRational) -> &'a Affine {
    items
        .iter()
        .max_by(|a, b| a.at(eps).cmp(&b.at(eps)).then(a.slope.cmp(&b.slope)))
        .expect("nonempty")
}

/// Replays the final argument: Markov's inequality against
/// `C_eps kappa^m g^{L_factor (alpha + eps)}`, the assembled expectation
/// exponent, and the additive tangle and small-eigenvalue terms.
pub fn pipeline(constants: &BoundConstants) -> Result<PipelineReport> {
    constants.validate()?;
    let eps = &constants.epsilon;
    let kappa = &constants.kappa;
    let alpha = &constants.alpha;
    let quarter = q(1, 4);
    let mut steps = Vec::new();
    let step = |name: &str, statement: String, exponent: Option<Affine>| PipelineStep {
        name: name.into(),
        value: exponent.as_ref().map(|e| show(&e.at(eps))),
        statement,
        exponent,
    };

    let gap_identity = alpha * alpha + q(2, 9) == quarter;
    steps.push(step("gap", format!("({alpha})^2 + 2/9 = 1/4: {gap_identity}"), None));

    // hat h_L(r1) >= C_eps e^{(alpha + eps) L} = C_eps g^{L_factor (alpha + eps)}
    let denominator_exponent = Affine::new(alpha.clone(), BigRational::one()).scale(&constants.length_factor);
    steps.push(step(
        "spectral_lower_bound",
        format!("hat h_L(r1) >= C_eps g^({denominator_exponent}) when lambda1 <= 2/9 - eps"),
        Some(denominator_exponent.clone()),
    ));

    // (1/4 + r^2)^m at r^2 = -(1/4 - lambda) is lambda^m; evaluated at the lower end lambda = kappa
    let r_squared = -(&quarter - kappa);
    let lhs = num_traits::pow(&quarter + &r_squared, constants.m as usize);
    let factor_identity = lhs == num_traits::pow(kappa.clone(), constants.m as usize);
    steps.push(step(
        "operator_factor",
        format!("(1/4 + r1^2)^m = lambda1^m >= kappa^m = {}: {factor_identity}", num_traits::pow(kappa.clone(), constants.m as usize)),
        None,
    ));

    // E <= sum over types + higher Euler characteristic + trace remainder
    let rec = |n: &str| constants.record(n).expect("validated").exponent.clone();
    let per_type = max_at(&[rec("torus_types"), rec("pants_types")], eps).clone();
    let over_types = rec("local_types").add(&per_type);
    steps.push(step("sum_over_types", format!("#types x max average = g^({over_types})"), Some(over_types.clone())));
    // e^{(1 + eps) L / 2} / g^2
    let half = q(1, 2);
    let high = Affine::new(half.clone(), half).scale(&constants.length_factor).sub(&Affine::ints(2, 0));
    steps.push(step("higher_euler", format!("e^((1 + eps) L / 2) / g^2 = g^({high})"), Some(high.clone())));
    let pieces = [over_types, high, rec("selberg_remainder")];
    let derived = max_at(&pieces, eps).clone();
    steps.push(step("assembled_expectation", format!("E <= C g^({derived}) up to logarithms"), Some(derived.clone())));

    let expectation_exponent = match constants.record("expectation") {
        Some(assumed) => {
            if derived.at(eps) > assumed.exponent.at(eps) {
                return Err(Error::domain(format!(
                    "inconsistent exponent records: the pieces give g^({derived}) but the expectation record claims g^({})",
                    assumed.exponent
                )));
            }
            assumed.exponent.clone()
        }
        None => derived,
    };
    steps.push(step(
        "expectation",
        format!("E[H_hat(r1) 1_TF] <= C g^({expectation_exponent})"),
        Some(expectation_exponent.clone()),
    ));

    let main = expectation_exponent.sub(&denominator_exponent);
    let main_value = main.at(eps);
    steps.push(step(
        "markov",
        format!("P(kappa <= lambda1 <= 2/9 - eps, TF) <= C g^({main}) / (C_eps kappa^m)"),
        Some(main.clone()),
    ));

    // O(kappa^2 + g^{3 kappa / 2 - 1})
    let tangle = q(3, 2) * kappa - BigRational::one();
    steps.push(step("tangles", format!("P(not TF) = O(kappa^2 + g^({tangle}))"), None));
    let small_eigenvalue_hypothesis = *kappa < q(1, 500);
    steps.push(step(
        "small_eigenvalue",
        format!("P(lambda1 <= kappa) -> 0 requires kappa < 1/500: {small_eigenvalue_hypothesis}"),
        None,
    ));

    let certified = gap_identity && factor_identity && main_value.is_negative() && tangle.is_negative();
    let limsup = if certified {
        format!(
            "limsup_g P(lambda1 <= 2/9 - eps) <= O(kappa^2){}",
            if small_eigenvalue_hypothesis { "" } else { " + limsup_g P(lambda1 <= kappa)" }
        )
    } else {
        "not certified".into()
    };
    Ok(PipelineReport {
        epsilon: show(eps),
        kappa: show(kappa),
        alpha: show(alpha),
        m: constants.m,
        q: constants.q,
        length_scale: format!("{} log g", constants.length_factor),
        tangle_radius: format!("{kappa} log g"),
        symbolic_constants: constants.symbolic.clone(),
        inputs: constants.inputs.clone(),
        steps,
        gap_identity,
        factor_identity,
        expectation_exponent,
        denominator_exponent,
        main_term_exponent: main,
        main_term_value: show(&main_value),
        tangle_exponent: show(&tangle),
        small_eigenvalue_hypothesis,
        limsup,
        certified,
        boundary: BOUNDARY_NOTE.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.05").unwrap(), q(1, 20));
        assert_eq!(parse_rational("5e-2").unwrap(), q(1, 20));
        assert_eq!(parse_rational("-1/3").unwrap(), q(-1, 3));
        assert_eq!(parse_rational("12").unwrap(), q(12, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn main_term_is_minus_eps() {
        let c = BoundConstants::new(q(1, 20), q(1, 100), 4);
        let r = pipeline(&c).unwrap();
        assert_eq!(r.main_term_exponent, Affine::ints(0, -1));
        assert_eq!(r.main_term_value, "-1/20");
        assert_eq!(r.denominator_exponent, Affine::ints(1, 6));
        assert!(r.gap_identity && r.factor_identity && r.certified);
        assert!(!r.small_eigenvalue_hypothesis);
        assert_eq!(r.tangle_exponent, "-197/200");
    }

    #[test]
    fn assembled_pieces_reach_one_plus_five_eps() {
        let mut c = BoundConstants::new(q(1, 50), q(1, 1000), 2);
        c.inputs.retain(|r| r.name != "expectation");
        let r = pipeline(&c).unwrap();
        assert_eq!(r.expectation_exponent, Affine::ints(1, 5));
        assert_eq!(r.main_term_exponent, Affine::ints(0, -1));
        assert!(r.small_eigenvalue_hypothesis);
    }

    #[test]
    fn inconsistent_records_are_rejected() {
        let mut c = BoundConstants::new(q(1, 20), q(1, 100), 4);
        c.inputs[0].exponent = Affine::ints(1, 4);
        assert!(matches!(pipeline(&c), Err(Error::Domain(_))));
        let mut c = BoundConstants::new(q(1, 20), q(1, 100), 4);
        c.inputs.push(c.inputs[1].clone());
        assert!(pipeline(&c).is_err());
    }

    #[test]
    fn weaker_input_is_not_certified() {
        let mut c = BoundConstants::new(q(1, 20), q(1, 100), 4);
        c.inputs[0].exponent = Affine::ints(1, 7);
        let r = pipeline(&c).unwrap();
        assert_eq!(r.main_term_exponent, Affine::ints(0, 1));
        assert!(!r.certified);
    }

    #[test]
    fn large_kappa_keeps_the_tangle_term() {
        let r = pipeline(&BoundConstants::new(q(1, 20), q(7, 10), 4)).unwrap();
        assert!(!r.certified);
    }

    #[test]
    fn domain_checks() {
        assert!(pipeline(&BoundConstants::new(q(1, 4), q(1, 100), 4)).is_err());
        assert!(pipeline(&BoundConstants::new(q(1, 20), q(1, 1), 4)).is_err());
        assert!(pipeline(&BoundConstants::new(q(1, 20), q(1, 100), 0)).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Affine::ints(1, 5).to_string(), "1 + 5*eps");
        assert_eq!(Affine::ints(0, -1).to_string(), "-eps");
        assert_eq!(Affine::ints(1, -2).to_string(), "1 - 2*eps");
        assert_eq!(Affine::ints(1, 1).to_string(), "1 + eps");
    }
}
