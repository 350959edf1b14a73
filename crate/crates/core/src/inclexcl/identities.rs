use num_bigint::BigInt;
use num_traits::{One, Zero};

/// `sum_{j=0}^{n} (-1)^j C(n, j)`, exactly.
pub fn indicator_identity(n: u32) -> BigInt {
    let mut total = BigInt::zero();
    let mut binom = BigInt::one();
    for j in 0..=n {
        if j % 2 == 0 {
            total += &binom;
        } else {
            total -= &binom;
        }
        binom = binom * (n - j) / (j + 1);
    }
    total
}

/// Both halves of `0 <= n - 1[n >= 1] <= C(n, 2)`.
pub fn tangle_sandwich(n: u64) -> (bool, bool) {
    let mid = n - u64::from(n >= 1);
    let pairs = n as u128 * n.saturating_sub(1) as u128 / 2;
    (mid as i128 >= 0, mid as u128 <= pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_binomial_sum() {
        assert_eq!(indicator_identity(0), BigInt::one());
        for n in 1..=64 {
            assert!(indicator_identity(n).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn sandwich_small_cases() {
        assert_eq!(tangle_sandwich(0), (true, true));
        assert_eq!(tangle_sandwich(1), (true, true));
        assert_eq!(tangle_sandwich(3), (true, true));
        assert_eq!(tangle_sandwich(1_000_000), (true, true));
    }
}
