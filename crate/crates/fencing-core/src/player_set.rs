//! Subsets of the player ground set `{1..n}` as bit patterns.
//!
//! Players are numbered from 1. Bit `p - 1` of the mask holds membership of
//! player `p`. The cap is [`MAX_PLAYERS`] players, which keeps every subset
//! family enumerable.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// Largest supported player count.
pub const MAX_PLAYERS: usize = 16;

/// A subset of the ground set, encoded as a bit mask over players `1..=n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PlayerSet(u32);

impl PlayerSet {
    pub const EMPTY: PlayerSet = PlayerSet(0);

    /// The full set `{1..n}`.
    pub fn full(n: usize) -> PlayerSet {
        assert!(n <= MAX_PLAYERS, "player count {n} exceeds cap {MAX_PLAYERS}");
        PlayerSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(player: usize) -> PlayerSet {
        assert!((1..=MAX_PLAYERS).contains(&player), "player {player} out of range");
        PlayerSet(1 << (player - 1))
    }

    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> PlayerSet {
        players.into_iter().fold(PlayerSet::EMPTY, |s, p| s.with(p))
    }

    pub fn from_bits(bits: u32) -> PlayerSet {
        PlayerSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, player: usize) -> bool {
        player >= 1 && player <= MAX_PLAYERS && self.0 & (1 << (player - 1)) != 0
    }

    pub fn with(self, player: usize) -> PlayerSet {
        self.union(PlayerSet::singleton(player))
    }

    pub fn without(self, player: usize) -> PlayerSet {
        PlayerSet(self.0 & !PlayerSet::singleton(player).0)
    }

    pub fn union(self, other: PlayerSet) -> PlayerSet {
        PlayerSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PlayerSet) -> PlayerSet {
        PlayerSet(self.0 & other.0)
    }

    /// Set difference `self \ other`.
    pub fn difference(self, other: PlayerSet) -> PlayerSet {
        PlayerSet(self.0 & !other.0)
    }

    /// Complement within `{1..n}`.
    pub fn complement(self, n: usize) -> PlayerSet {
        PlayerSet::full(n).difference(self)
    }

    pub fn is_subset_of(self, other: PlayerSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset_of(self, other: PlayerSet) -> bool {
        self != other && self.is_subset_of(other)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Players of the set in increasing order.
    pub fn players(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let p = bits.trailing_zeros() as usize + 1;
                bits &= bits - 1;
                Some(p)
            }
        })
    }

    /// All subsets of `self`, including the empty set and `self`,
    /// each visited exactly once, in increasing mask order.
    pub fn subsets(self) -> Subsets {
        Subsets { mask: self.0, next: Some(0) }
    }

    /// All sets `S` with `lower ⊆ S ⊆ upper`. Empty when `lower ⊄ upper`.
    pub fn between(lower: PlayerSet, upper: PlayerSet) -> impl Iterator<Item = PlayerSet> {
        let valid = lower.is_subset_of(upper);
        upper
            .difference(lower)
            .subsets()
            .filter(move |_| valid)
            .map(move |free| free.union(lower))
    }

    /// Order by the sorted player list (so `{1,4}` precedes `{2,3}`).
    /// Ties in the shared prefix are broken by shorter-first.
    pub fn cmp_lex(self, other: PlayerSet) -> Ordering {
        self.players().cmp(other.players())
    }
}

/// Iterator over submasks of a fixed mask in increasing order.
pub struct Subsets {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = PlayerSet;

    fn next(&mut self) -> Option<PlayerSet> {
        let cur = self.next?;
        let succ = ((cur | !self.mask).wrapping_add(1)) & self.mask;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(PlayerSet(cur))
    }
}

impl fmt::Display for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.players().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for PlayerSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.players())
    }
}

impl<'de> Deserialize<'de> for PlayerSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<PlayerSet, D::Error> {
        let players = Vec::<usize>::deserialize(deserializer)?;
        for &p in &players {
            if !(1..=MAX_PLAYERS).contains(&p) {
                return Err(D::Error::custom(format!("player {p} out of range 1..={MAX_PLAYERS}")));
            }
        }
        Ok(PlayerSet::from_players(players))
    }
}
