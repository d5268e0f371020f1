//! Fence Monotonicity: minimum payments, the three conditions with witnesses,
//! the harm relation, and related payment-structure checks.

use crate::money::Money;
use crate::player_set::PlayerSet;
use crate::scheme::CostSharingScheme;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FenceError {
    #[error("lower set {lower} is not a subset of upper set {upper}")]
    NotNested { lower: PlayerSet, upper: PlayerSet },
    #[error("player {player} not in upper set {upper}")]
    PlayerOutsideUpper { player: usize, upper: PlayerSet },
    #[error("players must be distinct, got {0} twice")]
    NotDistinct(usize),
}

/// ξ*: the least amount player `i` can be charged over outcomes `S` with
/// `lower ⊆ S ⊆ upper` and `i ∈ S`.
pub fn xi_star(
    scheme: &CostSharingScheme,
    player: usize,
    lower: PlayerSet,
    upper: PlayerSet,
) -> Result<Money, FenceError> {
    if !lower.is_subset_of(upper) {
        return Err(FenceError::NotNested { lower, upper });
    }
    if !upper.contains(player) {
        return Err(FenceError::PlayerOutsideUpper { player, upper });
    }
    let base = lower.with(player);
    Ok(PlayerSet::between(base, upper)
        .map(|s| scheme.payment(player, s))
        .min()
        .expect("at least one candidate outcome")
        .clone())
}

/// Memoizing wrapper around [`xi_star`]; entries never change once computed.
#[derive(Default)]
pub struct XiStarCache {
    memo: HashMap<(usize, PlayerSet, PlayerSet), Money>,
}

impl XiStarCache {
    pub fn new() -> XiStarCache {
        XiStarCache::default()
    }

    pub fn get(
        &mut self,
        scheme: &CostSharingScheme,
        player: usize,
        lower: PlayerSet,
        upper: PlayerSet,
    ) -> Result<Money, FenceError> {
        if let Some(v) = self.memo.get(&(player, lower, upper)) {
            return Ok(v.clone());
        }
        let v = xi_star(scheme, player, lower, upper)?;
        self.memo.insert((player, lower, upper), v.clone());
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }
}

/// ξ* of every player of `upper` at the pair `(lower, upper)`, indexed by
/// player - 1 (entries for players outside `upper` are `None`).
fn xi_star_row(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
) -> Vec<Option<Money>> {
    (1..=scheme.num_players())
        .map(|i| {
            if upper.contains(i) {
                Some(xi_star(scheme, i, lower, upper).expect("nested pair"))
            } else {
                None
            }
        })
        .collect()
}

/// Which of the three conditions a record refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FenceCondition {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
}

impl fmt::Display for FenceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FenceCondition::A => write!(f, "a"),
            FenceCondition::B => write!(f, "b"),
            FenceCondition::C => write!(f, "c"),
        }
    }
}

/// Outcome of condition (a) at a pair: a set where every served player gets
/// its minimum payment, or a proof that none exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionA {
    /// The lexicographically smallest qualifying set.
    Satisfied { set: PlayerSet },
    Violated,
}

impl ConditionA {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, ConditionA::Satisfied { .. })
    }
}

/// Outcome of condition (b): per player of `U \ L`, a set serving it where
/// everyone outside `L` pays the minimum, or the first player lacking one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionB {
    Satisfied {
        /// `(i, S_i)` for every `i ∈ U \ L`, ascending by player.
        sets: Vec<(usize, PlayerSet)>,
    },
    Violated {
        player: usize,
    },
}

impl ConditionB {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, ConditionB::Satisfied { .. })
    }
}

/// Outcome of condition (c): every undercutting set `C` is answered by a
/// non-empty `T ⊆ L \ C` served at minimum payments alongside it, or the
/// first `C` (with a premise player) that is not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionC {
    Satisfied,
    Violated {
        undercut: PlayerSet,
        player: usize,
    },
}

impl ConditionC {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, ConditionC::Satisfied)
    }
}

pub fn check_condition_a(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
) -> Result<ConditionA, FenceError> {
    let row = checked_row(scheme, lower, upper)?;
    Ok(condition_a_with_row(scheme, lower, upper, &row))
}

fn condition_a_with_row(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
    row: &[Option<Money>],
) -> ConditionA {
    let mut best: Option<PlayerSet> = None;
    for s in PlayerSet::between(lower, upper) {
        if s.is_empty() {
            // Vacuously minimal, but condition (a) asks for a served set; the
            // empty set only arises when lower = upper = ∅.
            if best.is_none() {
                best = Some(s);
            }
            continue;
        }
        let ok = s
            .players()
            .all(|i| scheme.payment(i, s) == row[i - 1].as_ref().unwrap());
        if ok {
            best = Some(match best {
                Some(b) if b.cmp_lex(s).is_le() => b,
                _ => s,
            });
        }
    }
    match best {
        Some(set) => ConditionA::Satisfied { set },
        None => ConditionA::Violated,
    }
}

pub fn check_condition_b(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
) -> Result<ConditionB, FenceError> {
    let row = checked_row(scheme, lower, upper)?;
    Ok(condition_b_with_row(scheme, lower, upper, &row))
}

fn condition_b_with_row(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
    row: &[Option<Money>],
) -> ConditionB {
    let mut sets = Vec::new();
    for i in upper.difference(lower).players() {
        let mut found: Option<PlayerSet> = None;
        for s in PlayerSet::between(lower.with(i), upper) {
            let ok = s
                .difference(lower)
                .players()
                .all(|j| scheme.payment(j, s) == row[j - 1].as_ref().unwrap());
            if ok {
                // Prefer the smallest qualifying set, then lex order.
                found = Some(match found {
                    Some(b) if b.len().cmp(&s.len()).then(b.cmp_lex(s)).is_le() => b,
                    _ => s,
                });
            }
        }
        match found {
            Some(s) => sets.push((i, s)),
            None => return ConditionB::Violated { player: i },
        }
    }
    ConditionB::Satisfied { sets }
}

pub fn check_condition_c(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
) -> Result<ConditionC, FenceError> {
    let row = checked_row(scheme, lower, upper)?;
    Ok(condition_c_with_row(scheme, lower, upper, &row))
}

fn condition_c_with_row(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
    row: &[Option<Money>],
) -> ConditionC {
    // All proper subsets C of upper, including those containing lower; for
    // the latter the premise ξ(i,C) < ξ* can never hold, so no branch is
    // needed to skip them.
    let mut candidates: Vec<PlayerSet> =
        upper.subsets().filter(|c| *c != upper && !c.is_empty()).collect();
    candidates.sort_by(|a, b| a.cmp_lex(*b));
    for c in candidates {
        let premise = c
            .players()
            .find(|&i| scheme.payment(i, c) < row[i - 1].as_ref().unwrap());
        let Some(witness_player) = premise else { continue };
        let answered = lower.difference(c).subsets().skip(1).any(|t| {
            let joint = c.union(t);
            t.players()
                .all(|j| scheme.payment(j, joint) == row[j - 1].as_ref().unwrap())
        });
        if !answered {
            return ConditionC::Violated { undercut: c, player: witness_player };
        }
    }
    ConditionC::Satisfied
}

fn checked_row(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
) -> Result<Vec<Option<Money>>, FenceError> {
    if !lower.is_subset_of(upper) {
        return Err(FenceError::NotNested { lower, upper });
    }
    Ok(xi_star_row(scheme, lower, upper))
}

/// One violated `(L, U, condition)` record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FenceViolation {
    pub lower: PlayerSet,
    pub upper: PlayerSet,
    pub condition: FenceCondition,
    /// Player witnessing the violation (conditions b and c).
    pub player: Option<usize>,
    /// The undercutting set C (condition c).
    pub undercut: Option<PlayerSet>,
}

impl fmt::Display for FenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(L={},U={}) condition {} violated", self.lower, self.upper, self.condition)?;
        if let Some(p) = self.player {
            write!(f, " for player {p}")?;
        }
        if let Some(c) = self.undercut {
            write!(f, " at C={c}")?;
        }
        Ok(())
    }
}

/// Full check result: one record per violated `(L, U, condition)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FenceReport {
    pub num_players: usize,
    pub pairs_checked: usize,
    pub violations: Vec<FenceViolation>,
}

impl FenceReport {
    pub fn is_fence_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_fence_monotone() {
            write!(
                f,
                "Fence Monotonicity holds ({} pairs checked)",
                self.pairs_checked
            )
        } else {
            writeln!(f, "Fence Monotonicity violated:")?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

/// Runs conditions (a), (b), (c) at every pair `L ⊆ U` of the ground set.
pub fn check_fence_monotonicity(scheme: &CostSharingScheme) -> FenceReport {
    let full = scheme.ground_set();
    let uppers: Vec<PlayerSet> = full.subsets().collect();
    let mut violations: Vec<FenceViolation> = uppers
        .par_iter()
        .flat_map_iter(|&upper| {
            let mut local = Vec::new();
            for lower in upper.subsets() {
                let row = xi_star_row(scheme, lower, upper);
                if !condition_a_with_row(scheme, lower, upper, &row).is_satisfied() {
                    local.push(FenceViolation {
                        lower,
                        upper,
                        condition: FenceCondition::A,
                        player: None,
                        undercut: None,
                    });
                }
                if let ConditionB::Violated { player } =
                    condition_b_with_row(scheme, lower, upper, &row)
                {
                    local.push(FenceViolation {
                        lower,
                        upper,
                        condition: FenceCondition::B,
                        player: Some(player),
                        undercut: None,
                    });
                }
                if let ConditionC::Violated { undercut, player } =
                    condition_c_with_row(scheme, lower, upper, &row)
                {
                    local.push(FenceViolation {
                        lower,
                        upper,
                        condition: FenceCondition::C,
                        player: Some(player),
                        undercut: Some(undercut),
                    });
                }
            }
            local
        })
        .collect();
    violations.sort_by(|a, b| {
        a.lower
            .cmp_lex(b.lower)
            .then(a.upper.cmp_lex(b.upper))
            .then(a.condition.cmp(&b.condition))
    });
    let pairs_checked = uppers.iter().map(|u| 1usize << u.len()).sum();
    FenceReport { num_players: scheme.num_players(), pairs_checked, violations }
}

/// Whether forcing `i` into the outcome raises `j`'s minimum payment at
/// `(lower, upper)`.
pub fn harms(
    scheme: &CostSharingScheme,
    i: usize,
    j: usize,
    lower: PlayerSet,
    upper: PlayerSet,
) -> Result<bool, FenceError> {
    if i == j {
        return Err(FenceError::NotDistinct(i));
    }
    if !upper.contains(i) {
        return Err(FenceError::PlayerOutsideUpper { player: i, upper });
    }
    let without = xi_star(scheme, j, lower, upper)?;
    let with = xi_star(scheme, j, lower.with(i), upper)?;
    Ok(without < with)
}

/// Partial-order diagnosis of a harm graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub antisymmetric: bool,
    pub transitive: bool,
    pub acyclic: bool,
}

impl OrderVerdict {
    pub fn is_strict_partial_order(&self) -> bool {
        self.antisymmetric && self.transitive && self.acyclic
    }
}

/// The harm relation restricted to `U \ L`, with edge `i -> j` when `i`
/// harms `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmGraph {
    pub lower: PlayerSet,
    pub upper: PlayerSet,
    pub edges: Vec<(usize, usize)>,
    pub verdict: OrderVerdict,
}

impl HarmGraph {
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// Nodes of `U \ L` with no outgoing edge.
    pub fn sinks(&self) -> Vec<usize> {
        self.upper
            .difference(self.lower)
            .players()
            .filter(|&i| self.edges.iter().all(|&(a, _)| a != i))
            .collect()
    }
}

/// Builds the harm graph on `U \ L` and diagnoses whether it is a strict
/// partial order. Arbitrary (non-Fence-Monotone) schemes may fail any of the
/// properties; the verdict reports this instead of erroring.
pub fn harm_graph(
    scheme: &CostSharingScheme,
    lower: PlayerSet,
    upper: PlayerSet,
) -> Result<HarmGraph, FenceError> {
    if !lower.is_subset_of(upper) {
        return Err(FenceError::NotNested { lower, upper });
    }
    let nodes: Vec<usize> = upper.difference(lower).players().collect();
    let mut edges = Vec::new();
    for &i in &nodes {
        for &j in &nodes {
            if i != j && harms(scheme, i, j, lower, upper)? {
                edges.push((i, j));
            }
        }
    }
    let has = |i: usize, j: usize| edges.contains(&(i, j));
    let antisymmetric = edges.iter().all(|&(i, j)| !has(j, i));
    let transitive = edges
        .iter()
        .all(|&(i, j)| edges.iter().filter(|&&(a, _)| a == j).all(|&(_, k)| k == i || has(i, k)));
    let acyclic = {
        // Kahn-style elimination.
        let mut remaining = nodes.clone();
        let mut live_edges = edges.clone();
        loop {
            let Some(pos) = remaining
                .iter()
                .position(|&v| live_edges.iter().all(|&(_, t)| t != v))
            else {
                break remaining.is_empty();
            };
            let v = remaining.remove(pos);
            live_edges.retain(|&(s, t)| s != v && t != v);
            if remaining.is_empty() {
                break true;
            }
        }
    };
    Ok(HarmGraph {
        lower,
        upper,
        edges,
        verdict: OrderVerdict { antisymmetric, transitive, acyclic },
    })
}

/// Result of the cross-monotonicity scan: payments must weakly decrease as
/// the served set grows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossMonotonicity {
    Satisfied,
    Violated {
        player: usize,
        smaller: PlayerSet,
        larger: PlayerSet,
    },
}

impl CrossMonotonicity {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, CrossMonotonicity::Satisfied)
    }
}

pub fn check_cross_monotonicity(scheme: &CostSharingScheme) -> CrossMonotonicity {
    let mut larger_sets: Vec<PlayerSet> = scheme.sets().collect();
    larger_sets.sort_by(|a, b| a.cmp_lex(*b));
    for larger in larger_sets {
        let mut smaller_sets: Vec<PlayerSet> =
            larger.subsets().skip(1).filter(|s| *s != larger).collect();
        smaller_sets.sort_by(|a, b| a.cmp_lex(*b));
        for smaller in smaller_sets {
            for i in smaller.players() {
                if scheme.payment(i, smaller) < scheme.payment(i, larger) {
                    return CrossMonotonicity::Violated { player: i, smaller, larger };
                }
            }
        }
    }
    CrossMonotonicity::Satisfied
}

/// Parts of the removal-consistency property: whenever deleting player `i`
/// from `S` strictly lowers `j`'s payment, (a) every other remaining player's
/// payment weakly drops too, and (b)+(c) `i`'s payment is unchanged by
/// deleting `j` instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RemovalPart {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
}

impl fmt::Display for RemovalPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RemovalPart::A => write!(f, "a"),
            RemovalPart::B => write!(f, "b"),
            RemovalPart::C => write!(f, "c"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalViolation {
    pub part: RemovalPart,
    pub set: PlayerSet,
    pub removed: usize,
    pub beneficiary: usize,
    /// The third player breaking part (a), when applicable.
    pub other: Option<usize>,
}

impl fmt::Display for RemovalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "part ({}) violated at S={}, i={}, j={}",
            self.part, self.set, self.removed, self.beneficiary
        )?;
        if let Some(k) = self.other {
            write!(f, ", k={k}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalReport {
    pub violations: Vec<RemovalViolation>,
}

impl RemovalReport {
    pub fn is_satisfied(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated_parts(&self) -> Vec<RemovalPart> {
        let mut parts: Vec<RemovalPart> = self.violations.iter().map(|v| v.part).collect();
        parts.sort();
        parts.dedup();
        parts
    }
}

/// Scans every `S` and pair of distinct `i, j ∈ S` with
/// `ξ(j, S\{i}) < ξ(j, S)` and records each violated part. Parts (b) and (c)
/// together force `ξ(i, S\{j}) = ξ(i, S)` whenever the premise holds.
pub fn check_removal_consistency(scheme: &CostSharingScheme) -> RemovalReport {
    let mut violations = Vec::new();
    let mut sets: Vec<PlayerSet> = scheme.sets().filter(|s| s.len() >= 2).collect();
    sets.sort_by(|a, b| a.cmp_lex(*b));
    for s in sets {
        for i in s.players() {
            for j in s.players() {
                if i == j {
                    continue;
                }
                let shrunk = s.without(i);
                if !(scheme.payment(j, shrunk) < scheme.payment(j, s)) {
                    continue;
                }
                for k in s.players() {
                    if k != i && k != j && scheme.payment(k, shrunk) > scheme.payment(k, s) {
                        violations.push(RemovalViolation {
                            part: RemovalPart::A,
                            set: s,
                            removed: i,
                            beneficiary: j,
                            other: Some(k),
                        });
                    }
                }
                let other_shrunk = s.without(j);
                if scheme.payment(i, other_shrunk) > scheme.payment(i, s) {
                    violations.push(RemovalViolation {
                        part: RemovalPart::B,
                        set: s,
                        removed: i,
                        beneficiary: j,
                        other: None,
                    });
                }
                if scheme.payment(i, other_shrunk) < scheme.payment(i, s) {
                    violations.push(RemovalViolation {
                        part: RemovalPart::C,
                        set: s,
                        removed: i,
                        beneficiary: j,
                        other: None,
                    });
                }
            }
        }
    }
    RemovalReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::money::Money;

    fn set(players: &[usize]) -> PlayerSet {
        PlayerSet::from_players(players.iter().copied())
    }

    #[test]
    fn xi_star_examples() {
        let a = fixtures::ex_a();
        let full = set(&[1, 2, 3, 4]);
        assert_eq!(xi_star(&a, 1, set(&[1, 2]), full).unwrap(), Money::from_int(20));
        let b = fixtures::ex_b();
        assert_eq!(xi_star(&b, 4, set(&[1, 2]), full).unwrap(), Money::from_int(20));
        // At L = U the minimum ranges over the single outcome U.
        for s in b.sets() {
            for i in s.players() {
                assert_eq!(&xi_star(&b, i, s, s).unwrap(), b.payment(i, s));
            }
        }
    }

    #[test]
    fn xi_star_rejects_bad_pairs() {
        let s = fixtures::cm2();
        assert!(xi_star(&s, 1, set(&[1, 2]), set(&[1])).is_err());
        assert!(xi_star(&s, 2, set(&[1]), set(&[1])).is_err());
    }

    #[test]
    fn xi_star_cache_consistent() {
        let s = fixtures::ex_b();
        let mut cache = XiStarCache::new();
        let full = set(&[1, 2, 3, 4]);
        let v1 = cache.get(&s, 4, set(&[1, 2]), full).unwrap();
        let v2 = cache.get(&s, 4, set(&[1, 2]), full).unwrap();
        assert_eq!(v1, v2);
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn condition_a_examples() {
        let a = fixtures::ex_a();
        let full = set(&[1, 2, 3, 4]);
        assert_eq!(check_condition_a(&a, set(&[1, 2]), full).unwrap(), ConditionA::Violated);
        // L = U is always satisfied with S = U.
        for s in a.sets() {
            assert_eq!(
                check_condition_a(&a, s, s).unwrap(),
                ConditionA::Satisfied { set: s }
            );
        }
        let b = fixtures::ex_b();
        assert!(check_condition_a(&b, set(&[1, 2]), full).unwrap().is_satisfied());
    }

    #[test]
    fn condition_b_examples() {
        let b = fixtures::ex_b();
        let full = set(&[1, 2, 3, 4]);
        assert_eq!(
            check_condition_b(&b, set(&[1, 2]), full).unwrap(),
            ConditionB::Violated { player: 3 }
        );
        for s in b.sets() {
            assert!(check_condition_b(&b, s, s).unwrap().is_satisfied());
        }
        let a = fixtures::ex_a();
        match check_condition_b(&a, set(&[1, 2]), full).unwrap() {
            ConditionB::Satisfied { sets } => {
                assert!(sets.contains(&(3, set(&[1, 2, 3]))));
                assert!(sets.contains(&(4, set(&[1, 2, 4]))));
            }
            other => panic!("expected satisfied, got {other:?}"),
        }
    }

    #[test]
    fn condition_c_examples() {
        let c = fixtures::ex_c();
        let full = set(&[1, 2, 3, 4]);
        assert_eq!(
            check_condition_c(&c, set(&[1, 2]), full).unwrap(),
            ConditionC::Violated { undercut: set(&[3, 4]), player: 3 }
        );
        for s in c.sets() {
            assert!(check_condition_c(&c, s, s).unwrap().is_satisfied());
        }
        assert!(check_condition_c(&fixtures::cm2(), PlayerSet::EMPTY, set(&[1, 2]))
            .unwrap()
            .is_satisfied());
    }

    #[test]
    fn fence_report_pinpoints_ex_a() {
        let report = check_fence_monotonicity(&fixtures::ex_a());
        assert_eq!(
            report.violations,
            vec![FenceViolation {
                lower: set(&[1, 2]),
                upper: set(&[1, 2, 3, 4]),
                condition: FenceCondition::A,
                player: None,
                undercut: None,
            }]
        );
    }

    #[test]
    fn fence_report_pinpoints_ex_b() {
        let report = check_fence_monotonicity(&fixtures::ex_b());
        assert_eq!(
            report.violations,
            vec![FenceViolation {
                lower: set(&[1, 2]),
                upper: set(&[1, 2, 3, 4]),
                condition: FenceCondition::B,
                player: Some(3),
                undercut: None,
            }]
        );
    }

    #[test]
    fn fence_report_pinpoints_ex_c() {
        let report = check_fence_monotonicity(&fixtures::ex_c());
        assert_eq!(
            report.violations,
            vec![
                FenceViolation {
                    lower: set(&[1, 2]),
                    upper: set(&[1, 2, 3, 4]),
                    condition: FenceCondition::C,
                    player: Some(3),
                    undercut: Some(set(&[3, 4])),
                },
                FenceViolation {
                    lower: set(&[1, 2, 3]),
                    upper: set(&[1, 2, 3, 4]),
                    condition: FenceCondition::C,
                    player: Some(3),
                    undercut: Some(set(&[3, 4])),
                },
            ]
        );
    }

    #[test]
    fn cm2_passes_fence_monotonicity() {
        assert!(check_fence_monotonicity(&fixtures::cm2()).is_fence_monotone());
    }

    #[test]
    fn harm_examples() {
        let b = fixtures::ex_b();
        let full = set(&[1, 2, 3, 4]);
        assert!(harms(&b, 3, 4, set(&[1, 2]), full).unwrap());
        assert!(!harms(&b, 4, 3, set(&[1, 2]), full).unwrap());
        // Players already in L never harm anyone.
        for j in [2, 3, 4] {
            assert!(!harms(&b, 1, j, set(&[1, 2]), full).unwrap());
        }
        assert!(harms(&b, 3, 3, set(&[1, 2]), full).is_err());
    }

    #[test]
    fn harm_graph_examples() {
        let b = fixtures::ex_b();
        let full = set(&[1, 2, 3, 4]);
        let g = harm_graph(&b, set(&[1, 2]), full).unwrap();
        assert!(g.has_edge(3, 4));
        assert!(g.verdict.acyclic);

        let cm = fixtures::cm2();
        let g = harm_graph(&cm, PlayerSet::EMPTY, set(&[1, 2])).unwrap();
        assert!(g.edges.is_empty());
        assert!(g.verdict.is_strict_partial_order());

        let g = harm_graph(&b, full, full).unwrap();
        assert!(g.edges.is_empty());
    }

    #[test]
    fn cross_monotonicity_examples() {
        assert!(check_cross_monotonicity(&fixtures::cm2()).is_satisfied());
        match check_cross_monotonicity(&fixtures::ex_b()) {
            CrossMonotonicity::Violated { player, smaller, larger } => {
                assert!(smaller.is_proper_subset_of(larger));
                assert!(smaller.contains(player));
                let b = fixtures::ex_b();
                assert!(b.payment(player, smaller) < b.payment(player, larger));
            }
            CrossMonotonicity::Satisfied => panic!("expected a violation"),
        }
        let single = CostSharingScheme::from_fn(1, |_, _| Money::from_int(5)).unwrap();
        assert!(check_cross_monotonicity(&single).is_satisfied());
    }

    #[test]
    fn removal_consistency_on_cm2_vacuous() {
        assert!(check_removal_consistency(&fixtures::cm2()).is_satisfied());
    }

    #[test]
    fn removal_consistency_catches_constructed_violation() {
        // Removing 1 from {1,2,3} lowers 2's payment (premise) while raising
        // 3's, breaking part (a).
        let s = CostSharingScheme::from_fn(3, |i, set| {
            Money::from_int(match (i, set.bits()) {
                (2, 0b110) => 1,  // {2,3}: player 2 cheap
                (3, 0b110) => 9,  // {2,3}: player 3 expensive
                (_, 0b111) => 5,  // {1,2,3}: everyone 5
                _ => 5,
            })
        })
        .unwrap();
        let report = check_removal_consistency(&s);
        assert!(report
            .violations
            .iter()
            .any(|v| v.part == RemovalPart::A
                && v.set == set(&[1, 2, 3])
                && v.removed == 1
                && v.beneficiary == 2
                && v.other == Some(3)));
    }
}
