//! Brute-force group-strategyproofness oracle over a finite bid grid.
//!
//! Any deterministic mechanism can be checked: the oracle enumerates
//! coalitions and misreports drawn from a per-player grid of critical bids
//! (payment values, epsilon perturbations, a guaranteed-service sentinel and
//! a refusal bid) and reports an explicit, replayable coalition witness on
//! failure. Verdicts are always relative to the grid, never to the full
//! real-valued bid space.

use crate::mechanism::{sentinel_bid, PreparedFencing};
use crate::money::Money;
use crate::player_set::PlayerSet;
use crate::scheme::{utility, BidVector, CostSharingScheme, MechanismOutcome};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GspError {
    #[error("{n} players exceeds the configured cap {cap}; exhaustive coalition search is infeasible at this size")]
    TooManyPlayers { n: usize, cap: usize },
    #[error("bid vector has {got} bids, grid has {want} players")]
    BidCountMismatch { got: usize, want: usize },
}

/// Per-player finite bid sets: every payment value the player can face, the
/// same values shifted by ±ε, a sentinel bid above everything, and −1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidGrid {
    pub epsilon: Money,
    /// Sorted ascending, distinct; indexed by player − 1.
    pub values: Vec<Vec<Money>>,
}

impl BidGrid {
    pub fn num_players(&self) -> usize {
        self.values.len()
    }

    pub fn player_values(&self, player: usize) -> &[Money] {
        &self.values[player - 1]
    }

    /// Number of grid bid vectors.
    pub fn num_vectors(&self) -> usize {
        self.values.iter().map(|v| v.len()).product()
    }

    /// All grid bid vectors, in mixed-radix order (last player fastest).
    pub fn vectors(&self) -> impl Iterator<Item = BidVector> + '_ {
        let sizes: Vec<usize> = self.values.iter().map(|v| v.len()).collect();
        let total = self.num_vectors();
        (0..total).map(move |mut idx| {
            let mut bids = vec![Money::zero(); sizes.len()];
            for p in (0..sizes.len()).rev() {
                bids[p] = self.values[p][idx % sizes[p]].clone();
                idx /= sizes[p];
            }
            BidVector::new(bids)
        })
    }
}

/// Half the smallest gap between distinct payment values of the scheme,
/// capped at 1/2. With fewer than two distinct values the cap applies.
fn grid_epsilon(scheme: &CostSharingScheme) -> Money {
    let values = scheme.all_payments();
    let half = Money::ratio(1, 2);
    values
        .windows(2)
        .map(|w| &(&w[1] - &w[0]) / &Money::from_int(2))
        .min()
        .map_or(half.clone(), |m| m.min(half))
}

pub fn build_grid(scheme: &CostSharingScheme) -> BidGrid {
    let epsilon = grid_epsilon(scheme);
    let values = (1..=scheme.num_players())
        .map(|i| {
            let mut vals = vec![Money::from_int(-1), sentinel_bid(scheme, i)];
            for p in scheme.player_payments(i) {
                vals.push(&p - &epsilon);
                vals.push(p.clone());
                vals.push(&p + &epsilon);
            }
            vals.sort();
            vals.dedup();
            vals
        })
        .collect();
    BidGrid { epsilon, values }
}

/// A deterministic mechanism under test: same bids, same outcome.
pub trait MechanismUnderTest: Sync {
    fn num_players(&self) -> usize;
    fn run(&self, bids: &BidVector) -> MechanismOutcome;
}

/// The Fencing Mechanism of a Fence Monotone scheme as a testable mechanism.
/// Panics if the scheme fails to produce an outcome at some bids, which
/// cannot happen when the scheme satisfies Fence Monotonicity.
pub struct FencingMechanism<'a> {
    prepared: PreparedFencing<'a>,
}

impl<'a> FencingMechanism<'a> {
    pub fn new(scheme: &'a CostSharingScheme) -> FencingMechanism<'a> {
        FencingMechanism { prepared: PreparedFencing::new(scheme) }
    }
}

impl MechanismUnderTest for FencingMechanism<'_> {
    fn num_players(&self) -> usize {
        self.prepared.scheme().num_players()
    }

    fn run(&self, bids: &BidVector) -> MechanismOutcome {
        self.prepared.run(bids).expect("scheme admits a Fencing outcome at these bids")
    }
}

/// An arbitrary allocation rule given as a closure; payments follow the
/// scheme for the served set.
pub struct FnMechanism<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&BidVector) -> MechanismOutcome + Sync> FnMechanism<F> {
    pub fn new(n: usize, f: F) -> FnMechanism<F> {
        FnMechanism { n, f }
    }
}

impl<F: Fn(&BidVector) -> MechanismOutcome + Sync> MechanismUnderTest for FnMechanism<F> {
    fn num_players(&self) -> usize {
        self.n
    }

    fn run(&self, bids: &BidVector) -> MechanismOutcome {
        (self.f)(bids)
    }
}

/// A successful coalition: at true values `truth`, the players of `liars`
/// jointly misreport, none of them loses utility and `gainer` strictly
/// profits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoalitionWitness {
    pub truth: BidVector,
    pub misreport: BidVector,
    pub liars: PlayerSet,
    pub gainer: usize,
    pub outcome_truthful: MechanismOutcome,
    pub outcome_misreport: MechanismOutcome,
    /// Utilities with respect to `truth`, indexed by player − 1.
    pub utilities_before: Vec<Money>,
    pub utilities_after: Vec<Money>,
}

impl CoalitionWitness {
    fn build(
        truth: &BidVector,
        misreport: &BidVector,
        out_truth: &MechanismOutcome,
        out_lie: &MechanismOutcome,
    ) -> Option<CoalitionWitness> {
        let n = truth.num_players();
        let liars = PlayerSet::from_players(
            (1..=n).filter(|&i| truth.bid(i) != misreport.bid(i)),
        );
        let before: Vec<Money> =
            (1..=n).map(|i| utility(truth.bid(i), out_truth, i)).collect();
        let after: Vec<Money> =
            (1..=n).map(|i| utility(truth.bid(i), out_lie, i)).collect();
        if liars.players().any(|i| after[i - 1] < before[i - 1]) {
            return None;
        }
        let gainer = (1..=n).find(|&i| after[i - 1] > before[i - 1])?;
        Some(CoalitionWitness {
            truth: truth.clone(),
            misreport: misreport.clone(),
            liars,
            gainer,
            outcome_truthful: out_truth.clone(),
            outcome_misreport: out_lie.clone(),
            utilities_before: before,
            utilities_after: after,
        })
    }

    /// Re-executes the mechanism on both bid vectors and checks that every
    /// recorded outcome and utility reproduces exactly.
    pub fn replays_against(&self, m: &dyn MechanismUnderTest) -> bool {
        let out_truth = m.run(&self.truth);
        let out_lie = m.run(&self.misreport);
        if out_truth != self.outcome_truthful || out_lie != self.outcome_misreport {
            return false;
        }
        let n = self.truth.num_players();
        (1..=n).all(|i| {
            utility(self.truth.bid(i), &out_truth, i) == self.utilities_before[i - 1]
                && utility(self.truth.bid(i), &out_lie, i) == self.utilities_after[i - 1]
        })
    }
}

impl fmt::Display for CoalitionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coalition {} at truth {}", self.liars, self.truth)?;
        writeln!(f, "  misreport {}", self.misreport)?;
        writeln!(f, "  outcome {} -> {}", self.outcome_truthful, self.outcome_misreport)?;
        write!(f, "  player {} gains ", self.gainer)?;
        write!(
            f,
            "{} -> {}",
            self.utilities_before[self.gainer - 1],
            self.utilities_after[self.gainer - 1]
        )
    }
}

/// Mechanism outcomes precomputed for every grid bid vector, deduplicated,
/// with utilities tabulated per (player, grid value, outcome).
struct DenseTables {
    sizes: Vec<usize>,
    outcomes: Vec<MechanismOutcome>,
    /// Outcome id per grid vector index.
    outcome_of: Vec<u32>,
    /// `util[player - 1][value_index][outcome_id]`.
    util: Vec<Vec<Vec<Money>>>,
    /// Coalitions as player lists, by increasing size then lex.
    coalitions: Vec<Vec<usize>>,
}

impl DenseTables {
    fn build(m: &dyn MechanismUnderTest, grid: &BidGrid) -> DenseTables {
        let n = grid.num_players();
        let sizes: Vec<usize> = grid.values.iter().map(|v| v.len()).collect();
        let mut outcomes: Vec<MechanismOutcome> = Vec::new();
        let mut ids: HashMap<MechanismOutcome, u32> = HashMap::new();
        let mut outcome_of = Vec::with_capacity(grid.num_vectors());
        for bids in grid.vectors() {
            let out = m.run(&bids);
            let id = *ids.entry(out.clone()).or_insert_with(|| {
                outcomes.push(out.clone());
                (outcomes.len() - 1) as u32
            });
            outcome_of.push(id);
        }
        let util = (1..=n)
            .map(|i| {
                grid.player_values(i)
                    .iter()
                    .map(|v| outcomes.iter().map(|o| utility(v, o, i)).collect())
                    .collect()
            })
            .collect();
        let mut coalitions: Vec<Vec<usize>> = PlayerSet::full(n)
            .subsets()
            .skip(1)
            .map(|s| s.players().collect())
            .collect();
        coalitions.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        DenseTables { sizes, outcomes, outcome_of, util, coalitions }
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.sizes.len()];
        for p in (0..self.sizes.len().saturating_sub(1)).rev() {
            strides[p] = strides[p + 1] * self.sizes[p + 1];
        }
        strides
    }

    fn bids_for(&self, grid: &BidGrid, digits: &[usize]) -> BidVector {
        BidVector::new(
            digits.iter().enumerate().map(|(p, &k)| grid.values[p][k].clone()).collect(),
        )
    }

    /// First successful coalition at the truth given by `digits`, in
    /// coalition-size-then-lex, misreports-in-grid order.
    fn search_at(&self, grid: &BidGrid, digits: &[usize], idx: usize) -> Option<CoalitionWitness> {
        let strides = self.strides();
        let base_id = self.outcome_of[idx] as usize;
        let before: Vec<&Money> = digits
            .iter()
            .enumerate()
            .map(|(p, &k)| &self.util[p][k][base_id])
            .collect();
        let mut alt = Vec::new();
        for coalition in &self.coalitions {
            // Mixed-radix walk over alternative values of every member.
            alt.clear();
            alt.resize(coalition.len(), 0usize);
            'outer: loop {
                let mut lie_idx = idx;
                let mut skip = false;
                for (c, &i) in coalition.iter().enumerate() {
                    let p = i - 1;
                    // Members must actually change their bid; keeping it
                    // equal reduces to a smaller coalition already tried.
                    if alt[c] == digits[p] {
                        skip = true;
                        break;
                    }
                    lie_idx = lie_idx + alt[c] * strides[p] - digits[p] * strides[p];
                }
                if !skip {
                    let lie_id = self.outcome_of[lie_idx] as usize;
                    if lie_id != base_id {
                        let ok = coalition
                            .iter()
                            .all(|&i| self.util[i - 1][digits[i - 1]][lie_id] >= *before[i - 1]);
                        if ok {
                            let gain = (1..=digits.len())
                                .find(|&j| self.util[j - 1][digits[j - 1]][lie_id] > *before[j - 1]);
                            if gain.is_some() {
                                let truth = self.bids_for(grid, digits);
                                let mut lie_digits = digits.to_vec();
                                for (c, &i) in coalition.iter().enumerate() {
                                    lie_digits[i - 1] = alt[c];
                                }
                                let misreport = self.bids_for(grid, &lie_digits);
                                let w = CoalitionWitness::build(
                                    &truth,
                                    &misreport,
                                    &self.outcomes[base_id],
                                    &self.outcomes[lie_id],
                                );
                                debug_assert!(w.is_some());
                                if let Some(w) = w {
                                    return Some(w);
                                }
                            }
                        }
                    }
                }
                // Advance the mixed-radix counter.
                let mut c = coalition.len();
                loop {
                    if c == 0 {
                        break 'outer;
                    }
                    c -= 1;
                    alt[c] += 1;
                    if alt[c] < self.sizes[coalition[c] - 1] {
                        break;
                    }
                    alt[c] = 0;
                }
            }
        }
        None
    }
}

fn decode(idx: usize, sizes: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; sizes.len()];
    let mut rest = idx;
    for p in (0..sizes.len()).rev() {
        digits[p] = rest % sizes[p];
        rest /= sizes[p];
    }
    digits
}

/// Verdict of a grid search. "GSP-on-grid" is deliberately not "GSP": bids
/// outside the grid are never examined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GspVerdict {
    GspOnGrid { vectors_checked: usize },
    Witness(Box<CoalitionWitness>),
}

impl GspVerdict {
    pub fn is_gsp_on_grid(&self) -> bool {
        matches!(self, GspVerdict::GspOnGrid { .. })
    }

    pub fn witness(&self) -> Option<&CoalitionWitness> {
        match self {
            GspVerdict::Witness(w) => Some(w),
            GspVerdict::GspOnGrid { .. } => None,
        }
    }
}

pub const DEFAULT_PLAYER_CAP: usize = 4;

/// Exhaustive search: every grid truth vector, every coalition, every grid
/// misreport. First witness in deterministic order, if any.
pub fn verify_gsp(m: &dyn MechanismUnderTest, grid: &BidGrid) -> Result<GspVerdict, GspError> {
    verify_gsp_with_cap(m, grid, DEFAULT_PLAYER_CAP)
}

pub fn verify_gsp_with_cap(
    m: &dyn MechanismUnderTest,
    grid: &BidGrid,
    cap: usize,
) -> Result<GspVerdict, GspError> {
    let n = grid.num_players();
    if n > cap {
        return Err(GspError::TooManyPlayers { n, cap });
    }
    let tables = DenseTables::build(m, grid);
    let total = grid.num_vectors();
    for idx in 0..total {
        let digits = decode(idx, &tables.sizes);
        if let Some(w) = tables.search_at(grid, &digits, idx) {
            return Ok(GspVerdict::Witness(Box::new(w)));
        }
    }
    Ok(GspVerdict::GspOnGrid { vectors_checked: total })
}

/// Sampled variant: full coalition search at `samples` uniformly drawn grid
/// truth vectors. Deterministic for a fixed seed.
pub fn verify_gsp_sampled(
    m: &dyn MechanismUnderTest,
    grid: &BidGrid,
    samples: usize,
    seed: u64,
) -> GspVerdict {
    let tables = DenseTables::build(m, grid);
    let total = grid.num_vectors();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let idx = rng.gen_range(0..total);
        let digits = decode(idx, &tables.sizes);
        if let Some(w) = tables.search_at(grid, &digits, idx) {
            return GspVerdict::Witness(Box::new(w));
        }
    }
    GspVerdict::GspOnGrid { vectors_checked: samples }
}

/// Coalition search for one truth vector against a black-box mechanism.
/// The truth need not lie on the grid; misreports are drawn from it.
pub fn find_successful_coalition(
    m: &dyn MechanismUnderTest,
    grid: &BidGrid,
    truth: &BidVector,
) -> Result<Option<CoalitionWitness>, GspError> {
    let n = grid.num_players();
    if truth.num_players() != n {
        return Err(GspError::BidCountMismatch { got: truth.num_players(), want: n });
    }
    let mut cache: HashMap<BidVector, MechanismOutcome> = HashMap::new();
    let run = |b: &BidVector, cache: &mut HashMap<BidVector, MechanismOutcome>| {
        cache.entry(b.clone()).or_insert_with(|| m.run(b)).clone()
    };
    let out_truth = run(truth, &mut cache);
    let mut coalitions: Vec<Vec<usize>> = PlayerSet::full(n)
        .subsets()
        .skip(1)
        .map(|s| s.players().collect())
        .collect();
    coalitions.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    for coalition in &coalitions {
        let mut alt = vec![0usize; coalition.len()];
        'outer: loop {
            let mut lie = truth.clone();
            let mut skip = false;
            for (c, &i) in coalition.iter().enumerate() {
                let v = &grid.values[i - 1][alt[c]];
                if v == truth.bid(i) {
                    skip = true;
                    break;
                }
                lie = lie.with_bid(i, v.clone());
            }
            if !skip {
                let out_lie = run(&lie, &mut cache);
                if out_lie != out_truth {
                    if let Some(w) =
                        CoalitionWitness::build(truth, &lie, &out_truth, &out_lie)
                    {
                        if w.liars == PlayerSet::from_players(coalition.iter().copied()) {
                            return Ok(Some(w));
                        }
                    }
                }
            }
            let mut c = coalition.len();
            loop {
                if c == 0 {
                    break 'outer;
                }
                c -= 1;
                alt[c] += 1;
                if alt[c] < grid.values[coalition[c] - 1].len() {
                    break;
                }
                alt[c] = 0;
            }
        }
    }
    Ok(None)
}

/// One axiom violation: which player, at which bids, with which outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomWitness {
    pub player: usize,
    pub bids: BidVector,
    pub outcome: MechanismOutcome,
}

/// Voluntary participation (served pay at most their bid, unserved pay
/// zero), no positive transfers (payments non-negative) and consumer
/// sovereignty (a sentinel bid guarantees service), checked over every grid
/// bid vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub vectors_checked: usize,
    pub vp_violation: Option<AxiomWitness>,
    pub npt_violation: Option<AxiomWitness>,
    pub cs_violation: Option<AxiomWitness>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.vp_violation.is_none()
            && self.npt_violation.is_none()
            && self.cs_violation.is_none()
    }
}

pub fn verify_axioms(
    m: &dyn MechanismUnderTest,
    grid: &BidGrid,
    scheme: &CostSharingScheme,
) -> AxiomReport {
    let n = grid.num_players();
    let sentinels: Vec<Money> = (1..=n).map(|i| sentinel_bid(scheme, i)).collect();
    let mut report = AxiomReport {
        vectors_checked: 0,
        vp_violation: None,
        npt_violation: None,
        cs_violation: None,
    };
    for bids in grid.vectors() {
        report.vectors_checked += 1;
        let out = m.run(&bids);
        for i in 1..=n {
            let pay = out.payment(i);
            let witness = || AxiomWitness { player: i, bids: bids.clone(), outcome: out.clone() };
            if report.npt_violation.is_none() && pay.is_negative() {
                report.npt_violation = Some(witness());
            }
            let vp_broken = if out.served.contains(i) {
                pay > bids.bid(i)
            } else {
                !pay.is_zero()
            };
            if report.vp_violation.is_none() && vp_broken {
                report.vp_violation = Some(witness());
            }
            if report.cs_violation.is_none()
                && bids.bid(i) == &sentinels[i - 1]
                && !out.served.contains(i)
            {
                report.cs_violation = Some(witness());
            }
        }
    }
    report
}

/// A fixture scheme with the probe bid vectors its narrative argues over.
pub struct ProbeSet {
    pub scheme: CostSharingScheme,
    pub probes: Vec<BidVector>,
}

fn probe(scheme: &CostSharingScheme, spec: &[Option<i64>]) -> BidVector {
    BidVector::new(
        spec.iter()
            .enumerate()
            .map(|(p, v)| match v {
                Some(x) => Money::from_int(*x),
                None => sentinel_bid(scheme, p + 1),
            })
            .collect(),
    )
}

/// Probes for the condition (a) fixture: players 3 and 4 pinned at their
/// only payment 30, then each dropped in turn.
pub fn probes_ex_a() -> ProbeSet {
    let scheme = crate::fixtures::ex_a();
    let probes = vec![
        probe(&scheme, &[None, None, Some(30), Some(30)]),
        probe(&scheme, &[None, None, None, Some(-1)]),
        probe(&scheme, &[None, None, Some(-1), None]),
    ];
    ProbeSet { scheme, probes }
}

/// Probes for the condition (b) fixture: player 3 above the full-set price
/// but below its {1,2,3} price, player 4 between its two prices.
pub fn probes_ex_b() -> ProbeSet {
    let scheme = crate::fixtures::ex_b();
    let probes = vec![
        probe(&scheme, &[None, None, None, None]),
        probe(&scheme, &[None, None, Some(35), None]),
        probe(&scheme, &[None, None, Some(30), Some(25)]),
        probe(&scheme, &[None, None, Some(35), Some(25)]),
        probe(&scheme, &[None, None, Some(-1), None]),
    ];
    ProbeSet { scheme, probes }
}

/// Probes for the condition (c) fixture: players 1 and 2 below their shared
/// cheap price's alternatives, player 3 guaranteed service.
pub fn probes_ex_c() -> ProbeSet {
    let scheme = crate::fixtures::ex_c();
    let probes = vec![
        probe(&scheme, &[Some(25), Some(25), None, Some(30)]),
        probe(&scheme, &[None, None, None, Some(-1)]),
        probe(&scheme, &[Some(25), Some(25), None, None]),
    ];
    ProbeSet { scheme, probes }
}

/// Served sets a mechanism may answer at `bids` without breaking voluntary
/// participation (members pay at most their bid) or consumer sovereignty
/// (sentinel bidders must be served), assuming scheme payments.
/// Lexicographic order.
pub fn consistent_outcomes(scheme: &CostSharingScheme, bids: &BidVector) -> Vec<PlayerSet> {
    let n = scheme.num_players();
    let forced = PlayerSet::from_players(
        (1..=n).filter(|&i| bids.bid(i) >= &sentinel_bid(scheme, i)),
    );
    let mut sets: Vec<PlayerSet> = scheme
        .ground_set()
        .subsets()
        .filter(|s| {
            forced.is_subset_of(*s)
                && s.players().all(|i| scheme.payment(i, *s) <= bids.bid(i))
        })
        .collect();
    sets.sort_by(|a, b| a.cmp_lex(*b));
    sets
}

/// One mechanism reply under scrutiny: the outcome it assigns to each probe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeAssignment {
    pub outcomes: Vec<PlayerSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessityCase {
    pub assignment: ProbeAssignment,
    pub witness: Option<CoalitionWitness>,
}

/// Result of driving the probe vectors: one case per axiom-consistent
/// assignment of outcomes, each with a coalition witness if one exists
/// among the probes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub cases: Vec<NecessityCase>,
}

impl NecessityReport {
    /// True when every consistent assignment admits a witness: no mechanism
    /// respecting the axioms can be group-strategyproof on these probes.
    pub fn all_refuted(&self) -> bool {
        !self.cases.is_empty() && self.cases.iter().all(|c| c.witness.is_some())
    }
}

/// Enumerates every assignment of axiom-consistent outcomes to the probes
/// and searches each for a coalition witness: a pair of probes (truth,
/// misreport) where no player changing its bid loses utility and someone
/// strictly gains.
pub fn check_necessity(probe_set: &ProbeSet) -> NecessityReport {
    let scheme = &probe_set.scheme;
    let per_probe: Vec<Vec<PlayerSet>> = probe_set
        .probes
        .iter()
        .map(|b| consistent_outcomes(scheme, b))
        .collect();
    let mut cases = Vec::new();
    let mut pick = vec![0usize; per_probe.len()];
    loop {
        let outcomes: Vec<PlayerSet> =
            pick.iter().enumerate().map(|(k, &c)| per_probe[k][c]).collect();
        let witness = witness_among_probes(scheme, &probe_set.probes, &outcomes);
        cases.push(NecessityCase { assignment: ProbeAssignment { outcomes }, witness });
        let mut k = per_probe.len();
        loop {
            if k == 0 {
                return NecessityReport { cases };
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < per_probe[k].len() {
                break;
            }
            pick[k] = 0;
        }
    }
}

fn witness_among_probes(
    scheme: &CostSharingScheme,
    probes: &[BidVector],
    outcomes: &[PlayerSet],
) -> Option<CoalitionWitness> {
    for (vi, truth) in probes.iter().enumerate() {
        for (bi, lie) in probes.iter().enumerate() {
            if vi == bi {
                continue;
            }
            let out_truth = MechanismOutcome::from_scheme(scheme, outcomes[vi]);
            let out_lie = MechanismOutcome::from_scheme(scheme, outcomes[bi]);
            if let Some(w) = CoalitionWitness::build(truth, lie, &out_truth, &out_lie) {
                if !w.liars.is_empty() {
                    return Some(w);
                }
            }
        }
    }
    None
}
