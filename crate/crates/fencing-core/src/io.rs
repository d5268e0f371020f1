//! File formats: JSON scheme and cost tables, and bid-vector parsing.
//!
//! Scheme files look like
//! `{"n": 2, "table": [{"set": [1,2], "payments": {"1": "1", "2": "1"}}, ...]}`;
//! cost files carry a single `"cost"` per set instead of per-player
//! payments. Rationals are strings `"p/q"` (q > 0) or plain integers. Sets
//! are sorted player lists.

use crate::money::Money;
use crate::player_set::{PlayerSet, MAX_PLAYERS};
use crate::scheme::{BidVector, CostFunction, CostSharingScheme, SchemeData, SchemeError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("player {0} out of range 1..={max}", max = MAX_PLAYERS)]
    PlayerOutOfRange(usize),
    #[error("player {player} repeated in set entry")]
    DuplicatePlayer { player: usize },
    #[error("duplicate table entry for set {0}")]
    DuplicateSet(PlayerSet),
    #[error("payment key {0:?} is not a player number")]
    BadPlayerKey(String),
    #[error("bad rational {0:?}: {1}")]
    BadRational(String, crate::money::MoneyParseError),
    #[error("{0}")]
    Scheme(#[from] SchemeError),
}

#[derive(Serialize, Deserialize)]
struct SchemeEntry {
    set: Vec<usize>,
    payments: BTreeMap<String, Money>,
}

/// On-disk scheme representation.
#[derive(Serialize, Deserialize)]
pub struct SchemeFile {
    pub n: usize,
    table: Vec<SchemeEntry>,
}

#[derive(Serialize, Deserialize)]
struct CostEntry {
    set: Vec<usize>,
    cost: Money,
}

/// On-disk cost-function representation.
#[derive(Serialize, Deserialize)]
pub struct CostFile {
    pub n: usize,
    table: Vec<CostEntry>,
}

fn parse_set(players: &[usize]) -> Result<PlayerSet, IoError> {
    let mut set = PlayerSet::EMPTY;
    for &p in players {
        if p == 0 || p > MAX_PLAYERS {
            return Err(IoError::PlayerOutOfRange(p));
        }
        if set.contains(p) {
            return Err(IoError::DuplicatePlayer { player: p });
        }
        set = set.with(p);
    }
    Ok(set)
}

impl SchemeFile {
    pub fn from_scheme(s: &CostSharingScheme) -> SchemeFile {
        let table = s
            .sets()
            .map(|set| SchemeEntry {
                set: set.players().collect(),
                payments: set
                    .players()
                    .map(|i| (i.to_string(), s.payment(i, set).clone()))
                    .collect(),
            })
            .collect();
        SchemeFile { n: s.num_players(), table }
    }

    /// The raw table, for validation and diagnostics before building.
    pub fn to_data(&self) -> Result<SchemeData, IoError> {
        let mut entries = BTreeMap::new();
        let mut seen: Vec<PlayerSet> = Vec::new();
        for e in &self.table {
            let set = parse_set(&e.set)?;
            if seen.contains(&set) {
                return Err(IoError::DuplicateSet(set));
            }
            seen.push(set);
            for (key, value) in &e.payments {
                let player: usize =
                    key.parse().map_err(|_| IoError::BadPlayerKey(key.clone()))?;
                if player == 0 || player > MAX_PLAYERS {
                    return Err(IoError::PlayerOutOfRange(player));
                }
                entries.insert((player, set), value.clone());
            }
        }
        Ok(SchemeData { n: self.n, entries })
    }

    /// Parses and validates into a checked scheme.
    pub fn build(&self) -> Result<CostSharingScheme, IoError> {
        Ok(self.to_data()?.build()?)
    }

    pub fn from_json(text: &str) -> Result<SchemeFile, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

impl CostFile {
    pub fn from_cost(c: &CostFunction) -> CostFile {
        let table = c
            .sets()
            .map(|set| CostEntry { set: set.players().collect(), cost: c.cost(set).clone() })
            .collect();
        CostFile { n: c.num_players(), table }
    }

    pub fn build(&self) -> Result<CostFunction, IoError> {
        let mut by_set: BTreeMap<PlayerSet, Money> = BTreeMap::new();
        for e in &self.table {
            let set = parse_set(&e.set)?;
            if by_set.insert(set, e.cost.clone()).is_some() {
                return Err(IoError::DuplicateSet(set));
            }
        }
        let full = PlayerSet::full(self.n);
        if self.n == 0 || self.n > MAX_PLAYERS {
            return Err(IoError::Scheme(SchemeError::BadPlayerCount(self.n)));
        }
        for s in full.subsets().skip(1) {
            if !by_set.contains_key(&s) {
                return Err(IoError::Scheme(SchemeError::Invalid(
                    SchemeData { n: self.n, entries: BTreeMap::new() }.validate(),
                )));
            }
        }
        Ok(CostFunction::from_fn(self.n, |s| by_set[&s].clone())?)
    }

    pub fn from_json(text: &str) -> Result<CostFile, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Parses a comma-separated list of rationals, e.g. `3/2, -1, 2`.
pub fn parse_bids_inline(text: &str) -> Result<BidVector, IoError> {
    let bids = text
        .split(',')
        .map(|part| {
            let part = part.trim();
            Money::parse(part).map_err(|e| IoError::BadRational(part.to_string(), e))
        })
        .collect::<Result<Vec<Money>, IoError>>()?;
    Ok(BidVector::new(bids))
}

/// Parses a JSON array of rationals (strings or integers).
pub fn parse_bids_json(text: &str) -> Result<BidVector, IoError> {
    let bids: Vec<Money> = serde_json::from_str(text)?;
    Ok(BidVector::new(bids))
}
