//! Random scheme generators for property-based checks.
//!
//! All generators are deterministic given the RNG, so tests seed a
//! `ChaCha8Rng` and stay reproducible.

use crate::money::Money;
use crate::scheme::CostSharingScheme;
use rand::Rng;

/// A random cross-monotonic scheme: player `i` pays a base amount plus a
/// non-negative surcharge for every player missing from the served set.
/// Payments then weakly decrease as the set grows, by construction.
pub fn random_cross_monotonic<R: Rng>(n: usize, rng: &mut R) -> CostSharingScheme {
    let base: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=10)).collect();
    let surcharge: Vec<Vec<i64>> =
        (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..=5)).collect()).collect();
    CostSharingScheme::from_fn(n, |i, s| {
        let missing: i64 = (1..=n)
            .filter(|&j| j != i && !s.contains(j))
            .map(|j| surcharge[i - 1][j - 1])
            .sum();
        Money::from_int(base[i - 1] + missing)
    })
    .expect("non-negative by construction")
}

/// A random unconstrained scheme with small integer payments. Almost never
/// Fence Monotone; used to exercise refuters and violation reporting.
pub fn random_scheme<R: Rng>(n: usize, rng: &mut R) -> CostSharingScheme {
    CostSharingScheme::from_fn(n, |_, _| Money::from_int(rng.gen_range(0..=10)))
        .expect("non-negative by construction")
}

/// A random scheme drawing each payment from a fixed pool of values.
pub fn random_scheme_from_pool<R: Rng>(
    n: usize,
    pool: &[Money],
    rng: &mut R,
) -> CostSharingScheme {
    assert!(!pool.is_empty(), "empty value pool");
    CostSharingScheme::from_fn(n, |_, _| pool[rng.gen_range(0..pool.len())].clone())
        .expect("pool values are validated by from_fn")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fence::check_cross_monotonicity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_schemes_are_cross_monotonic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            let s = random_cross_monotonic(n, &mut rng);
            assert!(check_cross_monotonicity(&s).is_satisfied(), "{s:?}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_cross_monotonic(4, &mut ChaCha8Rng::seed_from_u64(42));
        let b = random_cross_monotonic(4, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
        let c = random_scheme(4, &mut ChaCha8Rng::seed_from_u64(42));
        let d = random_scheme(4, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(c, d);
    }

    #[test]
    fn pool_schemes_only_use_pool_values() {
        let pool = vec![Money::from_int(1), Money::ratio(3, 2)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_scheme_from_pool(3, &pool, &mut rng);
        for set in s.sets() {
            for i in set.players() {
                assert!(pool.contains(s.payment(i, set)));
            }
        }
    }
}
