//! Budget balance: recovery ratios against a cost function, the 3-player
//! lower-bound cost family, a proof-driven refuter, and a randomized search
//! for well-balanced Fence Monotone schemes.

use crate::fence::{check_fence_monotonicity, RemovalPart, RemovalViolation};
use crate::gen::random_scheme_from_pool;
use crate::money::Money;
use crate::player_set::PlayerSet;
use crate::scheme::{CostFunction, CostSharingScheme};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BudgetError {
    #[error("scheme has {got} players, cost function has {want}")]
    PlayerCountMismatch { got: usize, want: usize },
    #[error("family parameter x = {0} is below 1")]
    XBelowOne(Money),
    #[error("family refuter needs a 3-player scheme, got {0} players")]
    NotThreePlayers(usize),
    #[error("internal error: no violated constraint found, which contradicts the impossibility bound; this is a bug")]
    NoViolationFound,
}

/// One budget line: what the served set pays in total versus what it costs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetRow {
    pub set: PlayerSet,
    pub sum: Money,
    pub cost: Money,
    /// `sum / cost`; absent when the cost is zero.
    pub ratio: Option<Money>,
    pub overcharge: bool,
    /// Zero cost but a positive recovered sum; excluded from the ratio
    /// minimum and reported separately.
    pub zero_cost_positive_sum: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub rows: Vec<BudgetRow>,
    /// Minimum recovery ratio over sets with positive cost.
    pub alpha: Option<Money>,
    pub any_overcharge: bool,
}

impl BudgetReport {
    /// α-budget balance: every considered set recovers at least `alpha`
    /// times its cost and never more than its cost.
    pub fn is_alpha_budget_balanced(&self, alpha: &Money) -> bool {
        !self.any_overcharge
            && self.rows.iter().all(|r| !r.zero_cost_positive_sum)
            && self.alpha.as_ref().is_some_and(|a| a >= alpha)
    }
}

impl fmt::Display for BudgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            write!(f, "{}: recovers {} of cost {}", r.set, r.sum, r.cost)?;
            if r.overcharge {
                write!(f, " (overcharge)")?;
            }
            if r.zero_cost_positive_sum {
                write!(f, " (positive sum at zero cost)")?;
            }
            writeln!(f)?;
        }
        match &self.alpha {
            Some(a) => writeln!(f, "alpha = {a}"),
            None => writeln!(f, "alpha undefined (no positive-cost set)"),
        }
    }
}

fn report_over_sets<I: Iterator<Item = PlayerSet>>(
    scheme: &CostSharingScheme,
    cost: &CostFunction,
    sets: I,
) -> BudgetReport {
    let mut rows = Vec::new();
    let mut alpha: Option<Money> = None;
    let mut any_overcharge = false;
    for set in sets {
        let sum: Money = set.players().map(|i| scheme.payment(i, set)).sum();
        let c = cost.cost(set).clone();
        let (ratio, zero_cost_positive_sum) = if c.is_zero() {
            (None, !sum.is_zero())
        } else {
            (Some(&sum / &c), false)
        };
        let overcharge = sum > c;
        any_overcharge |= overcharge;
        if let Some(r) = &ratio {
            alpha = Some(match alpha {
                Some(a) => a.min(r.clone()),
                None => r.clone(),
            });
        }
        rows.push(BudgetRow { set, sum, cost: c, ratio, overcharge, zero_cost_positive_sum });
    }
    BudgetReport { rows, alpha, any_overcharge }
}

/// Budget report over every non-empty subset, the conservative reading:
/// consumer sovereignty makes every player serviceable, so any set can be
/// an outcome under some bids.
pub fn budget_balance_ratio(
    scheme: &CostSharingScheme,
    cost: &CostFunction,
) -> Result<BudgetReport, BudgetError> {
    if scheme.num_players() != cost.num_players() {
        return Err(BudgetError::PlayerCountMismatch {
            got: scheme.num_players(),
            want: cost.num_players(),
        });
    }
    Ok(report_over_sets(scheme, cost, scheme.sets()))
}

/// Budget report restricted to outcomes the Fencing Mechanism actually
/// reaches over the bid grid (non-empty served sets only).
pub fn budget_balance_ratio_reachable(
    scheme: &CostSharingScheme,
    cost: &CostFunction,
) -> Result<BudgetReport, BudgetError> {
    if scheme.num_players() != cost.num_players() {
        return Err(BudgetError::PlayerCountMismatch {
            got: scheme.num_players(),
            want: cost.num_players(),
        });
    }
    let grid = crate::gsp::build_grid(scheme);
    let fast = crate::mechanism::PreparedFencing::new(scheme);
    let mut reached: Vec<PlayerSet> = Vec::new();
    for bids in grid.vectors() {
        if let Ok(out) = fast.run(&bids) {
            if !out.served.is_empty() && !reached.contains(&out.served) {
                reached.push(out.served);
            }
        }
    }
    reached.sort_by(|a, b| a.cmp_lex(*b));
    Ok(report_over_sets(scheme, cost, reached.into_iter()))
}

/// The 3-player cost family parameterized by x ≥ 1: serving either of
/// {1,2}, {1,3} costs 1, singletons cost x, {2,3} costs x²+x and the full
/// set x³+x²+x. No Fence Monotone scheme recovers more than a 1/x share
/// of cost on this family.
pub fn family_cost(x: &Money) -> Result<CostFunction, BudgetError> {
    if x < &Money::one() {
        return Err(BudgetError::XBelowOne(x.clone()));
    }
    let x2 = x * x;
    let x3 = &x2 * x;
    let pair23 = &x2 + x;
    let full = &x3 + &x2 + x;
    let table = move |s: PlayerSet| match s.bits() {
        0b011 | 0b101 => Money::one(),
        0b110 => pair23.clone(),
        0b111 => full.clone(),
        _ => x.clone(),
    };
    Ok(CostFunction::from_fn(3, table).expect("non-negative for x >= 1"))
}

/// A violated constraint found by [`find_family_violation`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyViolation {
    /// The recovered sum fails the strict lower bound `(1/x)·C(S) < sum`.
    BbLower { set: PlayerSet, sum: Money, bound: Money },
    /// The recovered sum exceeds the cost.
    BbUpper { set: PlayerSet, sum: Money, cost: Money },
    /// A removal-consistency violation, with the cells involved.
    Removal(RemovalViolation),
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyViolation::BbLower { set, sum, bound } => {
                write!(f, "recovery {sum} at {set} is not above the required {bound}")
            }
            FamilyViolation::BbUpper { set, sum, cost } => {
                write!(f, "recovery {sum} at {set} overcharges the cost {cost}")
            }
            FamilyViolation::Removal(v) => write!(f, "removal consistency {v}"),
        }
    }
}

/// Decides which constraint a 3-player scheme violates on the x-family:
/// either a budget bound (strict lower `(1/x)·C(S) < Σ`, upper `Σ ≤ C(S)`)
/// on some set, or a removal-consistency part, following the impossibility
/// argument's case analysis. Every scheme violates something; an empty
/// answer is a bug, reported as an error.
pub fn find_family_violation(
    scheme: &CostSharingScheme,
    x: &Money,
) -> Result<FamilyViolation, BudgetError> {
    if scheme.num_players() != 3 {
        return Err(BudgetError::NotThreePlayers(scheme.num_players()));
    }
    let cost = family_cost(x)?;
    let mut sets: Vec<PlayerSet> = scheme.sets().collect();
    sets.sort_by(|a, b| a.cmp_lex(*b));
    for set in sets {
        let sum: Money = set.players().map(|i| scheme.payment(i, set)).sum();
        let c = cost.cost(set);
        let bound = c / x;
        if !(sum > bound) {
            return Ok(FamilyViolation::BbLower { set, sum, bound });
        }
        if !(&sum <= c) {
            return Ok(FamilyViolation::BbUpper { set, sum, cost: c.clone() });
        }
    }
    // All budget bounds hold; the case analysis now forces a
    // removal-consistency violation.
    let full = PlayerSet::full(3);
    let one = Money::one();
    let pay = |i: usize, s: PlayerSet| scheme.payment(i, s);
    let pair23 = PlayerSet::from_players([2, 3]);
    if pay(2, full) > &one && pay(3, full) > &one {
        // Deleting 3 lowers 2's payment (the pair price is at most 1), yet
        // deleting 2 lowers 3's as well: part (c) fails at the full set.
        return Ok(FamilyViolation::Removal(RemovalViolation {
            part: RemovalPart::C,
            set: full,
            removed: 3,
            beneficiary: 2,
            other: None,
        }));
    }
    let (p, q) = if pay(2, full) <= &one { (2, 3) } else { (3, 2) };
    if pay(p, pair23) <= &one {
        // q pays above x at {2,3} (the pair must recover more than x+1)
        // but at most x alone, while p's payment rises when q leaves:
        // part (b) fails at {2,3}.
        return Ok(FamilyViolation::Removal(RemovalViolation {
            part: RemovalPart::B,
            set: pair23,
            removed: p,
            beneficiary: q,
            other: None,
        }));
    }
    if pay(q, pair23) < pay(q, full) {
        // Deleting 1 lowers q's payment but raises p's: part (a) fails at
        // the full set.
        return Ok(FamilyViolation::Removal(RemovalViolation {
            part: RemovalPart::A,
            set: full,
            removed: 1,
            beneficiary: q,
            other: Some(p),
        }));
    }
    let pair1q = PlayerSet::from_players([1, q]);
    if pay(1, pair1q) < pay(1, full) {
        // Deleting p lowers 1's payment but raises p's own when 1 leaves:
        // part (b) fails at the full set.
        return Ok(FamilyViolation::Removal(RemovalViolation {
            part: RemovalPart::B,
            set: full,
            removed: p,
            beneficiary: 1,
            other: None,
        }));
    }
    // Unreachable when the budget bounds hold: the three payments at the
    // full set would sum below (1/x)·C({1,2,3}).
    Err(BudgetError::NoViolationFound)
}

/// Outcome of the randomized search for well-balanced Fence Monotone
/// schemes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub trials: usize,
    pub fence_monotone_found: usize,
    /// Best Fence Monotone, never-overcharging scheme seen, with its α.
    pub best: Option<(CostSharingScheme, Money)>,
    pub meets_target: bool,
}

/// Randomized search over payment tables with values drawn from
/// cost-derived breakpoints ({0} ∪ {C(S)/k} ∪ ±1 perturbations). Keeps only
/// schemes that pass the Fence Monotonicity check and never overcharge;
/// reports the best recovery ratio found and whether it reaches `alpha`.
pub fn search_bb_schemes(
    cost: &CostFunction,
    alpha: &Money,
    trials: usize,
    seed: u64,
) -> SearchResult {
    let n = cost.num_players();
    let mut pool = vec![Money::zero()];
    for s in cost.sets() {
        for k in 1..=n {
            let v = cost.cost(s) / &Money::from_int(k as i64);
            let lo = &v - &Money::one();
            pool.push(v.clone());
            pool.push(&v + &Money::one());
            if lo.is_nonnegative() {
                pool.push(lo);
            }
        }
    }
    pool.sort();
    pool.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(CostSharingScheme, Money)> = None;
    let mut fence_monotone_found = 0;
    for _ in 0..trials {
        let s = random_scheme_from_pool(n, &pool, &mut rng);
        let report = budget_balance_ratio(&s, cost).expect("same player count");
        if report.any_overcharge {
            continue;
        }
        let Some(a) = report.alpha else { continue };
        if best.as_ref().is_some_and(|(_, b)| *b >= a) {
            continue;
        }
        if !check_fence_monotonicity(&s).is_fence_monotone() {
            continue;
        }
        fence_monotone_found += 1;
        best = Some((s, a));
    }
    let meets_target = best.as_ref().is_some_and(|(_, a)| a >= alpha);
    SearchResult { trials, fence_monotone_found, best, meets_target }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fence::check_removal_consistency;
    use crate::fixtures;
    use crate::gen::random_scheme;
    use rand::Rng;

    fn set(players: &[usize]) -> PlayerSet {
        PlayerSet::from_players(players.iter().copied())
    }

    #[test]
    fn cm2_ratio_examples() {
        let s = fixtures::cm2();
        let c = CostFunction::from_fn(2, |_| Money::from_int(2)).unwrap();
        let report = budget_balance_ratio(&s, &c).unwrap();
        assert_eq!(report.alpha, Some(Money::one()));
        assert!(!report.any_overcharge);
        assert!(report.is_alpha_budget_balanced(&Money::one()));

        let c = CostFunction::from_fn(2, |s| {
            Money::from_int(if s.len() == 2 { 4 } else { 2 })
        })
        .unwrap();
        let report = budget_balance_ratio(&s, &c).unwrap();
        assert_eq!(report.alpha, Some(Money::ratio(1, 2)));
        let worst = report.rows.iter().find(|r| r.set == set(&[1, 2])).unwrap();
        assert_eq!(worst.ratio, Some(Money::ratio(1, 2)));
    }

    #[test]
    fn zero_scheme_has_alpha_zero() {
        let s = CostSharingScheme::from_fn(2, |_, _| Money::zero()).unwrap();
        let c = CostFunction::from_fn(2, |_| Money::from_int(3)).unwrap();
        let report = budget_balance_ratio(&s, &c).unwrap();
        assert_eq!(report.alpha, Some(Money::zero()));
    }

    #[test]
    fn zero_cost_positive_sum_is_flagged_and_excluded() {
        let s = fixtures::cm2();
        let c = CostFunction::from_fn(2, |s| {
            Money::from_int(if s == PlayerSet::singleton(1) { 0 } else { 2 })
        })
        .unwrap();
        let report = budget_balance_ratio(&s, &c).unwrap();
        let row = report.rows.iter().find(|r| r.set == set(&[1])).unwrap();
        assert!(row.zero_cost_positive_sum);
        assert_eq!(row.ratio, None);
        assert_eq!(report.alpha, Some(Money::one()));
        assert!(!report.is_alpha_budget_balanced(&Money::ratio(1, 2)));
    }

    #[test]
    fn reachable_report_only_counts_mechanism_outcomes() {
        let s = fixtures::cm2();
        let c = CostFunction::from_fn(2, |_| Money::from_int(2)).unwrap();
        let all = budget_balance_ratio(&s, &c).unwrap();
        let reachable = budget_balance_ratio_reachable(&s, &c).unwrap();
        assert!(reachable.rows.len() <= all.rows.len());
        for r in &reachable.rows {
            assert!(all.rows.iter().any(|a| a.set == r.set && a.sum == r.sum));
        }
    }

    #[test]
    fn family_cost_values() {
        let c = family_cost(&Money::one()).unwrap();
        let vals: Vec<Money> = c.sets().map(|s| c.cost(s).clone()).collect();
        let mut sorted = vals.clone();
        sorted.sort();
        assert_eq!(
            sorted,
            [1, 1, 1, 1, 1, 2, 3].map(Money::from_int).to_vec()
        );

        let c = family_cost(&Money::from_int(2)).unwrap();
        assert_eq!(c.cost(set(&[2, 3])), &Money::from_int(6));
        assert_eq!(c.cost(set(&[1, 2, 3])), &Money::from_int(14));

        let c = family_cost(&Money::from_int(4)).unwrap();
        assert_eq!(c.cost(set(&[2, 3])), &Money::from_int(20));
        assert_eq!(c.cost(set(&[1, 2, 3])), &Money::from_int(84));

        assert!(matches!(
            family_cost(&Money::ratio(1, 2)),
            Err(BudgetError::XBelowOne(_))
        ));
    }

    #[test]
    fn refuter_flags_bb_lower_at_equality() {
        // Exactly (1/x)·C(S) recovered on a singleton: the strict lower
        // bound fails there.
        let x = Money::from_int(2);
        let cost = family_cost(&x).unwrap();
        // Full cost recovery everywhere, except player 2 alone pays exactly
        // half the singleton cost; the strict lower bound fails right there.
        let s = CostSharingScheme::from_fn(3, |i, s| {
            if s == PlayerSet::singleton(2) && i == 2 {
                Money::one()
            } else {
                cost.cost(s) / &Money::from_int(s.len() as i64)
            }
        })
        .unwrap();
        assert_eq!(
            find_family_violation(&s, &x).unwrap(),
            FamilyViolation::BbLower {
                set: set(&[2]),
                sum: Money::one(),
                bound: Money::one(),
            }
        );
    }

    #[test]
    fn refuter_is_total_on_random_schemes() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for x in [Money::one(), Money::ratio(3, 2), Money::from_int(2), Money::from_int(4)] {
            for _ in 0..200 {
                let s = random_scheme(3, &mut rng);
                let v = find_family_violation(&s, &x).expect("refuter is total");
                check_violation_is_genuine(&s, &x, &v);
            }
        }
    }

    /// Replays a refuter verdict against the definitions: budget rows by
    /// direct arithmetic, removal verdicts against the independent
    /// removal-consistency scan.
    fn check_violation_is_genuine(s: &CostSharingScheme, x: &Money, v: &FamilyViolation) {
        let cost = family_cost(x).unwrap();
        match v {
            FamilyViolation::BbLower { set, sum, bound } => {
                let direct: Money = set.players().map(|i| s.payment(i, *set)).sum();
                assert_eq!(&direct, sum);
                assert_eq!(bound, &(cost.cost(*set) / x));
                assert!(!(sum > bound));
            }
            FamilyViolation::BbUpper { set, sum, cost: c } => {
                let direct: Money = set.players().map(|i| s.payment(i, *set)).sum();
                assert_eq!(&direct, sum);
                assert_eq!(c, cost.cost(*set));
                assert!(sum > c);
            }
            FamilyViolation::Removal(rv) => {
                let scan = check_removal_consistency(s);
                assert!(
                    scan.violations.contains(rv),
                    "refuter produced {rv:?} not found by the scan: {scan:?}"
                );
            }
        }
    }

    #[test]
    fn refuter_exercises_removal_branches() {
        // Hand-built schemes that satisfy every budget bound for x=2 and
        // are forced into each removal branch.
        let x = Money::from_int(2);
        let build = |cells: &[(&[usize], &[i64])]| {
            CostSharingScheme::from_fn(3, |i, s| {
                for (players, values) in cells {
                    if PlayerSet::from_players(players.iter().copied()) == s {
                        let pos = players.iter().position(|&p| p == i).unwrap();
                        return Money::ratio(values[pos], 2);
                    }
                }
                unreachable!()
            })
            .unwrap()
        };
        // Values are halves. Budget windows for x=2: singles (1,2]; {1,2}
        // and {1,3} (1/2,1]; {2,3} (3,6]; full (7,14].
        // Part (c) branch: both players 2,3 pay above 1 at the full set.
        let s = build(&[
            (&[1], &[4]),
            (&[2], &[4]),
            (&[3], &[4]),
            (&[1, 2], &[0, 2]),
            (&[1, 3], &[0, 2]),
            (&[2, 3], &[6, 6]),
            (&[1, 2, 3], &[10, 3, 3]),
        ]);
        let v = find_family_violation(&s, &x).unwrap();
        assert_eq!(
            v,
            FamilyViolation::Removal(RemovalViolation {
                part: RemovalPart::C,
                set: set(&[1, 2, 3]),
                removed: 3,
                beneficiary: 2,
                other: None,
            })
        );
        check_violation_is_genuine(&s, &x, &v);

        // Part (b) branch at {2,3}: player 2 cheap both at the full set and
        // at the pair.
        let s = build(&[
            (&[1], &[4]),
            (&[2], &[4]),
            (&[3], &[4]),
            (&[1, 2], &[0, 2]),
            (&[1, 3], &[0, 2]),
            (&[2, 3], &[2, 10]),
            (&[1, 2, 3], &[12, 2, 2]),
        ]);
        let v = find_family_violation(&s, &x).unwrap();
        assert_eq!(
            v,
            FamilyViolation::Removal(RemovalViolation {
                part: RemovalPart::B,
                set: set(&[2, 3]),
                removed: 2,
                beneficiary: 3,
                other: None,
            })
        );
        check_violation_is_genuine(&s, &x, &v);
    }

    #[test]
    fn search_finds_cm2_like_scheme() {
        let c = CostFunction::from_fn(2, |_| Money::from_int(2)).unwrap();
        let result = search_bb_schemes(&c, &Money::one(), 500, 5);
        assert!(result.meets_target, "{:?}", result.best.as_ref().map(|(_, a)| a));
        let (s, a) = result.best.unwrap();
        assert_eq!(a, Money::one());
        assert!(check_fence_monotonicity(&s).is_fence_monotone());
    }

    #[test]
    fn search_with_zero_trials_finds_nothing() {
        let c = family_cost(&Money::from_int(2)).unwrap();
        let result = search_bb_schemes(&c, &Money::one(), 0, 1);
        assert!(result.best.is_none());
        assert!(!result.meets_target);
    }

    #[test]
    fn search_never_reports_violating_schemes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let x = Money::from_int(rng.gen_range(1..=4));
            let c = family_cost(&x).unwrap();
            let result = search_bb_schemes(&c, &Money::one(), 200, rng.gen());
            if let Some((s, _)) = result.best {
                assert!(check_fence_monotonicity(&s).is_fence_monotone());
                let report = budget_balance_ratio(&s, &c).unwrap();
                assert!(!report.any_overcharge);
            }
        }
    }

    #[test]
    fn wrong_player_counts_are_errors() {
        let s = fixtures::cm2();
        let c = family_cost(&Money::from_int(2)).unwrap();
        assert!(matches!(
            budget_balance_ratio(&s, &c),
            Err(BudgetError::PlayerCountMismatch { got: 2, want: 3 })
        ));
        assert!(matches!(
            find_family_violation(&s, &Money::from_int(2)),
            Err(BudgetError::NotThreePlayers(2))
        ));
    }
}
