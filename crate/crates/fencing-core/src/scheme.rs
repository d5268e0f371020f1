//! Cost-sharing schemes, cost functions, bids and mechanism outcomes.

use crate::money::Money;
use crate::player_set::{PlayerSet, MAX_PLAYERS};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("player count {0} out of range 1..={MAX_PLAYERS}")]
    BadPlayerCount(usize),
    #[error("scheme table is invalid:\n{0}")]
    Invalid(ValidationReport),
    #[error("player {player} not in 1..={n}")]
    PlayerOutOfRange { player: usize, n: usize },
}

/// The payment table: one non-negative amount per (player, containing set).
/// Entries for players outside a set are identically zero.
#[derive(Clone, PartialEq, Eq)]
pub struct CostSharingScheme {
    n: usize,
    /// Indexed by set mask; row `m` holds payments of players 1..n in set `m`
    /// (zero for players outside the set).
    table: Vec<Vec<Money>>,
}

impl CostSharingScheme {
    /// Builds a dense table by evaluating `payment(i, s)` for every non-empty
    /// `s` and every `i ∈ s`. Fails if any produced value is negative.
    pub fn from_fn(
        n: usize,
        mut payment: impl FnMut(usize, PlayerSet) -> Money,
    ) -> Result<CostSharingScheme, SchemeError> {
        if n == 0 || n > MAX_PLAYERS {
            return Err(SchemeError::BadPlayerCount(n));
        }
        let full = PlayerSet::full(n);
        let mut table = vec![vec![Money::zero(); n]; 1 << n];
        let mut negative = Vec::new();
        for s in full.subsets().skip(1) {
            for i in s.players() {
                let v = payment(i, s);
                if v.is_negative() {
                    negative.push(CellIssue { player: i, set: s, value: Some(v.clone()) });
                }
                table[s.bits() as usize][i - 1] = v;
            }
        }
        if negative.is_empty() {
            Ok(CostSharingScheme { n, table })
        } else {
            Err(SchemeError::Invalid(ValidationReport {
                missing: vec![],
                negative,
                nonzero_outside: vec![],
            }))
        }
    }

    pub fn num_players(&self) -> usize {
        self.n
    }

    pub fn ground_set(&self) -> PlayerSet {
        PlayerSet::full(self.n)
    }

    /// The payment ξ(i, s). Zero whenever `i ∉ s`.
    pub fn payment(&self, player: usize, set: PlayerSet) -> &Money {
        assert!(player >= 1 && player <= self.n, "player {player} out of range");
        &self.table[set.bits() as usize][player - 1]
    }

    /// All non-empty subsets of the ground set, in increasing mask order.
    pub fn sets(&self) -> impl Iterator<Item = PlayerSet> {
        self.ground_set().subsets().skip(1)
    }

    /// Distinct payment values of one player, sorted ascending.
    pub fn player_payments(&self, player: usize) -> Vec<Money> {
        let mut vals: Vec<Money> = self
            .sets()
            .filter(|s| s.contains(player))
            .map(|s| self.payment(player, s).clone())
            .collect();
        vals.sort();
        vals.dedup();
        vals
    }

    /// Distinct payment values across the whole table, sorted ascending.
    pub fn all_payments(&self) -> Vec<Money> {
        let mut vals: Vec<Money> = (1..=self.n)
            .flat_map(|i| self.player_payments(i))
            .collect();
        vals.sort();
        vals.dedup();
        vals
    }
}

impl fmt::Debug for CostSharingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CostSharingScheme(n={})", self.n)?;
        for s in self.sets() {
            write!(f, "  {s}:")?;
            for i in s.players() {
                write!(f, " {i}->{}", self.payment(i, s))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A raw scheme table as read from a file: possibly partial, possibly
/// inconsistent. [`SchemeData::validate`] reports every violation of the
/// scheme contract; [`SchemeData::build`] converts to a checked scheme.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchemeData {
    pub n: usize,
    pub entries: BTreeMap<(usize, PlayerSet), Money>,
}

/// One offending table cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellIssue {
    pub player: usize,
    pub set: PlayerSet,
    pub value: Option<Money>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Entries `(i, S)` with `i ∈ S` absent from the table.
    pub missing: Vec<CellIssue>,
    /// Entries with a negative value.
    pub negative: Vec<CellIssue>,
    /// Entries `(i, S)` with `i ∉ S` carrying a non-zero value.
    pub nonzero_outside: Vec<CellIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.missing.is_empty() && self.negative.is_empty() && self.nonzero_outside.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for c in &self.missing {
            writeln!(f, "missing entry: player {} in set {}", c.player, c.set)?;
        }
        for c in &self.negative {
            writeln!(
                f,
                "negative payment: player {} in set {} = {}",
                c.player,
                c.set,
                c.value.as_ref().unwrap()
            )?;
        }
        for c in &self.nonzero_outside {
            writeln!(
                f,
                "non-zero payment outside set: player {} for set {} = {}",
                c.player,
                c.set,
                c.value.as_ref().unwrap()
            )?;
        }
        Ok(())
    }
}

impl SchemeData {
    pub fn from_scheme(s: &CostSharingScheme) -> SchemeData {
        let mut entries = BTreeMap::new();
        for set in s.sets() {
            for i in set.players() {
                entries.insert((i, set), s.payment(i, set).clone());
            }
        }
        SchemeData { n: s.num_players(), entries }
    }

    /// Checks totality (every `i ∈ S` present for every non-empty `S`),
    /// non-negativity, and that nothing is charged outside a set.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.n == 0 || self.n > MAX_PLAYERS {
            // Totality is unverifiable; flag everything we can.
            return report;
        }
        let full = PlayerSet::full(self.n);
        for s in full.subsets().skip(1) {
            for i in 1..=self.n {
                match (s.contains(i), self.entries.get(&(i, s))) {
                    (true, None) => {
                        report.missing.push(CellIssue { player: i, set: s, value: None })
                    }
                    (true, Some(v)) if v.is_negative() => report.negative.push(CellIssue {
                        player: i,
                        set: s,
                        value: Some(v.clone()),
                    }),
                    (false, Some(v)) if !v.is_zero() => report.nonzero_outside.push(CellIssue {
                        player: i,
                        set: s,
                        value: Some(v.clone()),
                    }),
                    _ => {}
                }
            }
        }
        report
    }

    pub fn build(&self) -> Result<CostSharingScheme, SchemeError> {
        if self.n == 0 || self.n > MAX_PLAYERS {
            return Err(SchemeError::BadPlayerCount(self.n));
        }
        let report = self.validate();
        if !report.is_valid() {
            return Err(SchemeError::Invalid(report));
        }
        CostSharingScheme::from_fn(self.n, |i, s| self.entries[&(i, s)].clone())
    }
}

/// The cost of serving each non-empty subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostFunction {
    n: usize,
    cost: Vec<Money>,
}

impl CostFunction {
    pub fn from_fn(
        n: usize,
        mut cost: impl FnMut(PlayerSet) -> Money,
    ) -> Result<CostFunction, SchemeError> {
        if n == 0 || n > MAX_PLAYERS {
            return Err(SchemeError::BadPlayerCount(n));
        }
        let full = PlayerSet::full(n);
        let mut table = vec![Money::zero(); 1 << n];
        let mut negative = Vec::new();
        for s in full.subsets().skip(1) {
            let v = cost(s);
            if v.is_negative() {
                negative.push(CellIssue { player: 0, set: s, value: Some(v.clone()) });
            }
            table[s.bits() as usize] = v;
        }
        if negative.is_empty() {
            Ok(CostFunction { n, cost: table })
        } else {
            Err(SchemeError::Invalid(ValidationReport {
                missing: vec![],
                negative,
                nonzero_outside: vec![],
            }))
        }
    }

    pub fn num_players(&self) -> usize {
        self.n
    }

    pub fn ground_set(&self) -> PlayerSet {
        PlayerSet::full(self.n)
    }

    pub fn cost(&self, set: PlayerSet) -> &Money {
        &self.cost[set.bits() as usize]
    }

    pub fn sets(&self) -> impl Iterator<Item = PlayerSet> {
        self.ground_set().subsets().skip(1)
    }
}

/// One bid per player; negative bids model refusal to participate.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BidVector(pub Vec<Money>);

impl BidVector {
    pub fn new(bids: Vec<Money>) -> BidVector {
        BidVector(bids)
    }

    pub fn from_ints(bids: &[i64]) -> BidVector {
        BidVector(bids.iter().map(|&b| Money::from_int(b)).collect())
    }

    pub fn num_players(&self) -> usize {
        self.0.len()
    }

    pub fn bid(&self, player: usize) -> &Money {
        &self.0[player - 1]
    }

    /// A copy with player `i`'s bid replaced.
    pub fn with_bid(&self, player: usize, bid: Money) -> BidVector {
        let mut b = self.clone();
        b.0[player - 1] = bid;
        b
    }
}

impl fmt::Display for BidVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for BidVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The served set and the payment vector chosen by a mechanism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MechanismOutcome {
    pub served: PlayerSet,
    pub payments: Vec<Money>,
}

impl MechanismOutcome {
    /// Serves `set`, charging each served player its scheme payment and
    /// everyone else zero.
    pub fn from_scheme(s: &CostSharingScheme, set: PlayerSet) -> MechanismOutcome {
        let payments = (1..=s.num_players())
            .map(|i| if set.contains(i) { s.payment(i, set).clone() } else { Money::zero() })
            .collect();
        MechanismOutcome { served: set, payments }
    }

    pub fn payment(&self, player: usize) -> &Money {
        &self.payments[player - 1]
    }
}

impl fmt::Display for MechanismOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "served {} payments (", self.served)?;
        for (k, p) in self.payments.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Quasi-linear utility of player `i` with valuation `v_i`: value minus
/// payment when served, zero otherwise.
pub fn utility(v_i: &Money, outcome: &MechanismOutcome, player: usize) -> Money {
    if outcome.served.contains(player) {
        v_i - outcome.payment(player)
    } else {
        Money::zero()
    }
}
