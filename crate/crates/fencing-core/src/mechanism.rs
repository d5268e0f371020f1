//! Stable pairs, the Fencing Mechanism, the Moulin mechanism and outcome
//! recovery.

use crate::fence::{xi_star, FenceError};
use crate::money::Money;
use crate::player_set::PlayerSet;
use crate::scheme::{BidVector, CostSharingScheme, MechanismOutcome};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MechanismError {
    #[error("bid vector has {got} bids, scheme has {want} players")]
    BidCountMismatch { got: usize, want: usize },
    #[error("no stable pair exists at bids {bids}")]
    NoStablePair { bids: BidVector },
    #[error("multiple stable pairs at bids {bids}: {pairs:?}")]
    MultipleStablePairs { bids: BidVector, pairs: Vec<StablePair> },
    #[error("no tie-breaking set between {lower} and {upper} attains the minimum payments")]
    NoTieBreakSet { lower: PlayerSet, upper: PlayerSet },
    #[error("scheme is not cross-monotonic: player {player} pays more in {larger} than in {smaller}")]
    NotCrossMonotonic { player: usize, smaller: PlayerSet, larger: PlayerSet },
    #[error("outcome does not arise from a stable pair: recovered (L={lower}, U={upper}) is not stable at {bids}")]
    NotAMechanismOutcome { bids: BidVector, lower: PlayerSet, upper: PlayerSet },
    #[error(transparent)]
    Fence(#[from] FenceError),
}

/// A pair `(L, U)` of nested sets. `L` holds players served at every
/// candidate outcome, `U` the players possibly served.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StablePair {
    pub lower: PlayerSet,
    pub upper: PlayerSet,
}

impl fmt::Display for StablePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(L={}, U={})", self.lower, self.upper)
    }
}

impl fmt::Debug for StablePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn check_bids(scheme: &CostSharingScheme, bids: &BidVector) -> Result<(), MechanismError> {
    if bids.num_players() != scheme.num_players() {
        return Err(MechanismError::BidCountMismatch {
            got: bids.num_players(),
            want: scheme.num_players(),
        });
    }
    Ok(())
}

/// A bid strictly above every payment `i` can face, so `i` is served by any
/// mechanism honouring voluntary participation and consumer sovereignty.
pub fn sentinel_bid(scheme: &CostSharingScheme, player: usize) -> Money {
    let max = scheme
        .sets()
        .filter(|s| s.contains(player))
        .map(|s| scheme.payment(player, s).clone())
        .max()
        .expect("player belongs to some set");
    max + Money::one()
}

pub fn sentinel_bids(scheme: &CostSharingScheme) -> BidVector {
    BidVector::new((1..=scheme.num_players()).map(|i| sentinel_bid(scheme, i)).collect())
}

impl StablePair {
    /// Checks all three stability requirements by definition: every `L`
    /// player bids strictly above its minimum payment, every `U \ L` player
    /// bids exactly it, and every non-empty extension `R` of `U` contains a
    /// player bidding below its minimum payment at the extended pair.
    pub fn is_stable_at(
        &self,
        scheme: &CostSharingScheme,
        bids: &BidVector,
    ) -> Result<bool, MechanismError> {
        check_bids(scheme, bids)?;
        let (lower, upper) = (self.lower, self.upper);
        if !lower.is_subset_of(upper) {
            return Ok(false);
        }
        for i in lower.players() {
            if !(bids.bid(i) > &xi_star(scheme, i, lower, upper)?) {
                return Ok(false);
            }
        }
        for i in upper.difference(lower).players() {
            if bids.bid(i) != &xi_star(scheme, i, lower, upper)? {
                return Ok(false);
            }
        }
        let outside = upper.complement(scheme.num_players());
        for r in outside.subsets().skip(1) {
            let extended = upper.union(r);
            let blocked = r
                .players()
                .map(|i| Ok(bids.bid(i) < &xi_star(scheme, i, lower, extended)?))
                .collect::<Result<Vec<bool>, MechanismError>>()?
                .into_iter()
                .any(|b| b);
            if !blocked {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The largest upper set compatible with `lower` at `bids`: start from the
/// ground set and repeatedly drop players of `U \ L` bidding below their
/// minimum payment, until a fixpoint.
pub fn maximal_upper_set(
    scheme: &CostSharingScheme,
    bids: &BidVector,
    lower: PlayerSet,
) -> Result<PlayerSet, MechanismError> {
    check_bids(scheme, bids)?;
    let mut upper = scheme.ground_set();
    loop {
        let mut next = lower;
        for i in upper.difference(lower).players() {
            if bids.bid(i) >= &xi_star(scheme, i, lower, upper)? {
                next = next.with(i);
            }
        }
        let next = next.union(lower);
        if next == upper {
            return Ok(upper);
        }
        upper = next;
    }
}

/// All stable pairs at `bids`, ascending by lexicographic order of `L`.
pub fn stable_pairs(
    scheme: &CostSharingScheme,
    bids: &BidVector,
) -> Result<Vec<StablePair>, MechanismError> {
    check_bids(scheme, bids)?;
    let mut lowers: Vec<PlayerSet> = scheme.ground_set().subsets().collect();
    lowers.sort_by(|a, b| a.cmp_lex(*b));
    let mut found = Vec::new();
    for lower in lowers {
        let upper = maximal_upper_set(scheme, bids, lower)?;
        let pair = StablePair { lower, upper };
        if pair.is_stable_at(scheme, bids)? {
            found.push(pair);
        }
    }
    Ok(found)
}

/// The unique stable pair at `bids`. Errors if none or several exist, which
/// cannot happen on Fence Monotone schemes.
pub fn find_stable_pair(
    scheme: &CostSharingScheme,
    bids: &BidVector,
) -> Result<StablePair, MechanismError> {
    let pairs = stable_pairs(scheme, bids)?;
    match pairs.as_slice() {
        [p] => Ok(*p),
        [] => Err(MechanismError::NoStablePair { bids: bids.clone() }),
        _ => Err(MechanismError::MultipleStablePairs { bids: bids.clone(), pairs }),
    }
}

/// Picks the served set for a stable pair: among sets `S` between `L` and
/// `U` where every member of `S` pays its minimum, the largest one, with
/// ties broken towards the lexicographically smallest. Depends only on the
/// pair, not on the bids.
pub fn tie_break(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
) -> Result<PlayerSet, MechanismError> {
    let mut candidates: Vec<PlayerSet> = Vec::new();
    for s in PlayerSet::between(lower, upper) {
        let ok = s
            .players()
            .map(|i| Ok(scheme.payment(i, s) == &xi_star(scheme, i, lower, upper)?))
            .collect::<Result<Vec<bool>, MechanismError>>()?
            .into_iter()
            .all(|b| b);
        if ok {
            candidates.push(s);
        }
    }
    candidates
        .into_iter()
        .min_by(|a, b| b.len().cmp(&a.len()).then(a.cmp_lex(*b)))
        .ok_or(MechanismError::NoTieBreakSet { lower, upper })
}

/// The Fencing Mechanism: locate the unique stable pair, then serve the
/// tie-break set, charging scheme payments.
pub fn run_fencing(
    scheme: &CostSharingScheme,
    bids: &BidVector,
) -> Result<MechanismOutcome, MechanismError> {
    let pair = find_stable_pair(scheme, bids)?;
    let served = tie_break(scheme, pair.lower, pair.upper)?;
    Ok(MechanismOutcome::from_scheme(scheme, served))
}

/// The Moulin mechanism: start from the ground set and repeatedly drop every
/// player bidding below its current payment. Requires a cross-monotonic
/// scheme.
pub fn run_moulin(
    scheme: &CostSharingScheme,
    bids: &BidVector,
) -> Result<MechanismOutcome, MechanismError> {
    check_bids(scheme, bids)?;
    if let crate::fence::CrossMonotonicity::Violated { player, smaller, larger } =
        crate::fence::check_cross_monotonicity(scheme)
    {
        return Err(MechanismError::NotCrossMonotonic { player, smaller, larger });
    }
    let mut served = scheme.ground_set();
    loop {
        let drop = PlayerSet::from_players(
            served.players().filter(|&i| bids.bid(i) < scheme.payment(i, served)),
        );
        if drop.is_empty() {
            return Ok(MechanismOutcome::from_scheme(scheme, served));
        }
        served = served.difference(drop);
    }
}

/// A scheme with every ξ* value precomputed, for running the Fencing
/// Mechanism many times over (grid searches, sampling loops).
///
/// The stable-pair search here skips the explicit check of stability
/// condition (3): the fixpoint of [`maximal_upper_set`] always satisfies it.
/// If some extension R of the final U had every member bidding at or above
/// its minimum payment at (L, U ∪ R), consider the first iteration that
/// removes a member of R. At that point all of R is still present, so the
/// iterate contains U ∪ R, and anti-monotonicity of ξ* makes the removed
/// player's bid fall below its minimum payment at (L, U ∪ R) as well,
/// a contradiction.
pub struct PreparedFencing<'a> {
    scheme: &'a CostSharingScheme,
    /// ξ*(i, L, U) indexed by `(L.bits << n | U.bits) * n + (i - 1)`;
    /// zero-filled for non-nested pairs.
    xi: Vec<Money>,
}

impl<'a> PreparedFencing<'a> {
    pub fn new(scheme: &'a CostSharingScheme) -> PreparedFencing<'a> {
        let n = scheme.num_players();
        let full = scheme.ground_set();
        let mut xi = vec![Money::zero(); (1 << (2 * n)) * n];
        for upper in full.subsets() {
            for lower in upper.subsets() {
                let base = (((lower.bits() as usize) << n) | upper.bits() as usize) * n;
                for i in upper.players() {
                    xi[base + i - 1] =
                        xi_star(scheme, i, lower, upper).expect("nested pair");
                }
            }
        }
        PreparedFencing { scheme, xi }
    }

    pub fn scheme(&self) -> &CostSharingScheme {
        self.scheme
    }

    fn xi_star(&self, player: usize, lower: PlayerSet, upper: PlayerSet) -> &Money {
        let n = self.scheme.num_players();
        &self.xi[(((lower.bits() as usize) << n) | upper.bits() as usize) * n + player - 1]
    }

    fn maximal_upper(&self, bids: &BidVector, lower: PlayerSet) -> PlayerSet {
        let mut upper = self.scheme.ground_set();
        loop {
            let mut next = lower;
            for i in upper.difference(lower).players() {
                if bids.bid(i) >= self.xi_star(i, lower, upper) {
                    next = next.with(i);
                }
            }
            if next == upper {
                return upper;
            }
            upper = next;
        }
    }

    /// Same result as [`find_stable_pair`], via table lookups.
    pub fn find_stable_pair(&self, bids: &BidVector) -> Result<StablePair, MechanismError> {
        check_bids(self.scheme, bids)?;
        let mut lowers: Vec<PlayerSet> = self.scheme.ground_set().subsets().collect();
        lowers.sort_by(|a, b| a.cmp_lex(*b));
        let mut found: Vec<StablePair> = Vec::new();
        'next_lower: for lower in lowers {
            let upper = self.maximal_upper(bids, lower);
            for i in lower.players() {
                if !(bids.bid(i) > self.xi_star(i, lower, upper)) {
                    continue 'next_lower;
                }
            }
            for i in upper.difference(lower).players() {
                if bids.bid(i) != self.xi_star(i, lower, upper) {
                    continue 'next_lower;
                }
            }
            found.push(StablePair { lower, upper });
        }
        match found.as_slice() {
            [p] => Ok(*p),
            [] => Err(MechanismError::NoStablePair { bids: bids.clone() }),
            _ => Err(MechanismError::MultipleStablePairs { bids: bids.clone(), pairs: found }),
        }
    }

    /// Same result as [`run_fencing`], via table lookups.
    pub fn run(&self, bids: &BidVector) -> Result<MechanismOutcome, MechanismError> {
        let pair = self.find_stable_pair(bids)?;
        let served = self.tie_break(pair.lower, pair.upper)?;
        Ok(MechanismOutcome::from_scheme(self.scheme, served))
    }

    fn tie_break(&self, lower: PlayerSet, upper: PlayerSet) -> Result<PlayerSet, MechanismError> {
        PlayerSet::between(lower, upper)
            .filter(|&s| {
                s.players().all(|i| self.scheme.payment(i, s) == self.xi_star(i, lower, upper))
            })
            .min_by(|a, b| b.len().cmp(&a.len()).then(a.cmp_lex(*b)))
            .ok_or(MechanismError::NoTieBreakSet { lower, upper })
    }
}

/// Reconstructs the stable pair behind an outcome: `L` are the served
/// players bidding strictly above their payment, `U` the maximal upper set
/// for that `L`. Errors if the result is not actually stable at `bids`,
/// which flags outcomes not produced by the Fencing Mechanism.
pub fn recover_stable_pair(
    scheme: &CostSharingScheme,
    bids: &BidVector,
    outcome: &MechanismOutcome,
) -> Result<StablePair, MechanismError> {
    check_bids(scheme, bids)?;
    let lower = PlayerSet::from_players(
        outcome
            .served
            .players()
            .filter(|&i| bids.bid(i) > scheme.payment(i, outcome.served)),
    );
    let upper = maximal_upper_set(scheme, bids, lower)?;
    let pair = StablePair { lower, upper };
    if !pair.is_stable_at(scheme, bids)? {
        return Err(MechanismError::NotAMechanismOutcome {
            bids: bids.clone(),
            lower,
            upper,
        });
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(players: &[usize]) -> PlayerSet {
        PlayerSet::from_players(players.iter().copied())
    }

    fn ratio(n: i64, d: i64) -> Money {
        Money::ratio(n, d)
    }

    #[test]
    fn sentinel_exceeds_every_payment() {
        for s in [fixtures::ex_a(), fixtures::ex_b(), fixtures::ex_c(), fixtures::cm2()] {
            for i in 1..=s.num_players() {
                let b = sentinel_bid(&s, i);
                for t in s.sets().filter(|t| t.contains(i)) {
                    assert!(&b > s.payment(i, t));
                }
            }
        }
        assert_eq!(sentinel_bid(&fixtures::ex_b(), 3), Money::from_int(41));
        assert_eq!(sentinel_bid(&fixtures::cm2(), 1), Money::from_int(3));
    }

    #[test]
    fn cm2_stable_pairs() {
        let s = fixtures::cm2();
        let b = BidVector::new(vec![ratio(3, 2), ratio(3, 2)]);
        assert_eq!(
            find_stable_pair(&s, &b).unwrap(),
            StablePair { lower: set(&[1, 2]), upper: set(&[1, 2]) }
        );
        let b = BidVector::new(vec![ratio(3, 2), Money::one()]);
        assert_eq!(
            find_stable_pair(&s, &b).unwrap(),
            StablePair { lower: set(&[1]), upper: set(&[1, 2]) }
        );
        let b = BidVector::new(vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(
            find_stable_pair(&s, &b).unwrap(),
            StablePair { lower: PlayerSet::EMPTY, upper: PlayerSet::EMPTY }
        );
    }

    #[test]
    fn maximal_upper_set_drops_low_bidders() {
        let s = fixtures::cm2();
        let b = BidVector::new(vec![ratio(3, 2), ratio(1, 2)]);
        // Player 2 bids below even the shared price 1 and drops out; alone,
        // player 1 faces the stand-alone price 2 above its bid and drops too.
        assert_eq!(maximal_upper_set(&s, &b, PlayerSet::EMPTY).unwrap(), PlayerSet::EMPTY);
        let b = BidVector::new(vec![ratio(3, 2), Money::one()]);
        assert_eq!(maximal_upper_set(&s, &b, set(&[1])).unwrap(), set(&[1, 2]));
    }

    #[test]
    fn tie_break_prefers_larger_then_lex() {
        let s = fixtures::cm2();
        assert_eq!(tie_break(&s, set(&[1]), set(&[1, 2])).unwrap(), set(&[1, 2]));
        assert_eq!(tie_break(&s, PlayerSet::EMPTY, PlayerSet::EMPTY).unwrap(), PlayerSet::EMPTY);
        // EX_A at (L={1,2}, U=A): minimum payments (20,20,30,30); no set
        // attains them for all members, so tie-breaking must fail.
        assert!(matches!(
            tie_break(&fixtures::ex_a(), set(&[1, 2]), set(&[1, 2, 3, 4])),
            Err(MechanismError::NoTieBreakSet { .. })
        ));
    }

    #[test]
    fn fencing_on_cm2_serves_stable_outcome() {
        let s = fixtures::cm2();
        let b = BidVector::new(vec![ratio(3, 2), Money::one()]);
        let out = run_fencing(&s, &b).unwrap();
        assert_eq!(out.served, set(&[1, 2]));
        assert_eq!(out.payment(1), &Money::one());
        assert_eq!(out.payment(2), &Money::one());

        let b = BidVector::new(vec![ratio(1, 2), ratio(1, 2)]);
        let out = run_fencing(&s, &b).unwrap();
        assert_eq!(out.served, PlayerSet::EMPTY);
    }

    #[test]
    fn moulin_matches_fencing_on_cm2() {
        let s = fixtures::cm2();
        for b1 in [-1, 0, 1, 2, 3] {
            for b2 in [-1, 0, 1, 2, 3] {
                let b = BidVector::from_ints(&[b1, b2]);
                assert_eq!(
                    run_moulin(&s, &b).unwrap(),
                    run_fencing(&s, &b).unwrap(),
                    "bids {b}"
                );
            }
        }
    }

    #[test]
    fn moulin_rejects_non_cross_monotonic() {
        let s = fixtures::ex_b();
        let b = BidVector::from_ints(&[50, 50, 50, 50]);
        assert!(matches!(run_moulin(&s, &b), Err(MechanismError::NotCrossMonotonic { .. })));
    }

    #[test]
    fn moulin_remark_pair_is_the_stable_pair() {
        // On a cross-monotonic scheme the stable pair is U = Moulin's served
        // set, L = its members bidding strictly above their payment.
        let s = fixtures::cm2();
        for b1 in [-1, 0, 1, 2, 3] {
            for b2 in [-1, 0, 1, 2, 3] {
                let b = BidVector::from_ints(&[b1, b2]);
                let out = run_moulin(&s, &b).unwrap();
                let lower = PlayerSet::from_players(
                    out.served.players().filter(|&i| b.bid(i) > s.payment(i, out.served)),
                );
                assert_eq!(
                    find_stable_pair(&s, &b).unwrap(),
                    StablePair { lower, upper: out.served }
                );
            }
        }
    }

    #[test]
    fn recover_roundtrip_on_cm2() {
        let s = fixtures::cm2();
        for b1 in [-1, 0, 1, 2, 3] {
            for b2 in [-1, 0, 1, 2, 3] {
                let b = BidVector::from_ints(&[b1, b2]);
                let out = run_fencing(&s, &b).unwrap();
                let pair = recover_stable_pair(&s, &b, &out).unwrap();
                assert_eq!(pair, find_stable_pair(&s, &b).unwrap());
            }
        }
    }

    #[test]
    fn recover_rejects_foreign_outcome() {
        let s = fixtures::cm2();
        let b = BidVector::from_ints(&[3, 3]);
        // Serving only player 1 cannot arise at these bids.
        let out = MechanismOutcome::from_scheme(&s, set(&[1]));
        assert!(matches!(
            recover_stable_pair(&s, &b, &out),
            Err(MechanismError::NotAMechanismOutcome { .. })
        ));
    }

    #[test]
    fn fence_violation_surfaces_at_tie_break() {
        // EX_A with bids pinning (L={1,2}, U=A): players 1,2 high, players
        // 3,4 at their minimum payments 30. That pair is stable, but
        // condition (a) fails there, so no set qualifies for tie-breaking
        // and the mechanism cannot produce an outcome.
        let s = fixtures::ex_a();
        let b = BidVector::from_ints(&[100, 100, 30, 30]);
        assert_eq!(
            find_stable_pair(&s, &b).unwrap(),
            StablePair { lower: set(&[1, 2]), upper: set(&[1, 2, 3, 4]) }
        );
        assert!(matches!(
            run_fencing(&s, &b),
            Err(MechanismError::NoTieBreakSet { .. })
        ));
    }

    #[test]
    fn prepared_fencing_agrees_with_direct_implementation() {
        use crate::gen::random_cross_monotonic;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(1..=4);
            let s = random_cross_monotonic(n, &mut rng);
            let fast = PreparedFencing::new(&s);
            for _ in 0..50 {
                let b = BidVector::new(
                    (0..n).map(|_| Money::ratio(rng.gen_range(-2..=20), 2)).collect(),
                );
                match (find_stable_pair(&s, &b), fast.find_stable_pair(&b)) {
                    (Ok(p), Ok(q)) => assert_eq!(p, q, "bids {b}"),
                    (a, c) => panic!("disagreement at {b}: {a:?} vs {c:?}"),
                }
                assert_eq!(run_fencing(&s, &b).unwrap(), fast.run(&b).unwrap(), "bids {b}");
            }
        }
    }

    #[test]
    fn bid_count_mismatch_is_an_error() {
        let s = fixtures::cm2();
        let b = BidVector::from_ints(&[1, 2, 3]);
        assert!(matches!(
            run_fencing(&s, &b),
            Err(MechanismError::BidCountMismatch { got: 3, want: 2 })
        ));
    }
}
