//! Built-in reference schemes.
//!
//! `ex_a`, `ex_b` and `ex_c` are four-player schemes that each violate exactly
//! one Fence Monotonicity condition (a, b and c respectively) at specific
//! pairs; `cm2` is a two-player cross-monotonic scheme.

use crate::money::Money;
use crate::player_set::PlayerSet;
use crate::scheme::CostSharingScheme;

fn scheme_from_cells(n: usize, cells: &[(&[usize], &[i64])]) -> CostSharingScheme {
    CostSharingScheme::from_fn(n, |i, s| {
        for (players, values) in cells {
            if PlayerSet::from_players(players.iter().copied()) == s {
                let pos = players.iter().position(|&p| p == i).expect("player in set");
                return Money::from_int(values[pos]);
            }
        }
        panic!("no cell for set {s}");
    })
    .expect("fixture table is valid")
}

/// Four players; condition (a) fails at L={1,2}, U={1,2,3,4} and nowhere
/// else. Players 3 and 4 pay 30 in every set containing them.
pub fn ex_a() -> CostSharingScheme {
    scheme_from_cells(
        4,
        &[
            (&[1, 2, 3, 4], &[30, 30, 30, 30]),
            (&[1, 2, 3], &[20, 30, 30]),
            (&[1, 2, 4], &[30, 20, 30]),
            (&[1, 3, 4], &[30, 30, 30]),
            (&[2, 3, 4], &[30, 30, 30]),
            (&[1, 2], &[30, 30]),
            (&[1, 3], &[20, 30]),
            (&[1, 4], &[30, 30]),
            (&[2, 3], &[30, 30]),
            (&[2, 4], &[20, 30]),
            (&[3, 4], &[30, 30]),
            (&[1], &[30]),
            (&[2], &[30]),
            (&[3], &[30]),
            (&[4], &[30]),
        ],
    )
}

/// Four players; condition (b) fails at L={1,2}, U={1,2,3,4} for player 3 and
/// nowhere else.
pub fn ex_b() -> CostSharingScheme {
    scheme_from_cells(
        4,
        &[
            (&[1, 2, 3, 4], &[30, 30, 30, 30]),
            (&[1, 2, 3], &[30, 30, 40]),
            (&[1, 2, 4], &[30, 30, 20]),
            (&[1, 3, 4], &[30, 30, 30]),
            (&[2, 3, 4], &[30, 30, 30]),
            (&[1, 2], &[30, 30]),
            (&[1, 3], &[30, 30]),
            (&[1, 4], &[30, 30]),
            (&[2, 3], &[30, 30]),
            (&[2, 4], &[30, 30]),
            (&[3, 4], &[30, 30]),
            (&[1], &[30]),
            (&[2], &[30]),
            (&[3], &[30]),
            (&[4], &[30]),
        ],
    )
}

/// Four players; condition (c) fails for C={3,4} against L={1,2} and
/// L={1,2,3} (with U={1,2,3,4}) and nowhere else.
pub fn ex_c() -> CostSharingScheme {
    scheme_from_cells(
        4,
        &[
            (&[1, 2, 3, 4], &[30, 30, 30, 30]),
            (&[1, 2, 3], &[20, 20, 30]),
            (&[1, 2, 4], &[30, 30, 30]),
            (&[1, 3, 4], &[30, 30, 30]),
            (&[2, 3, 4], &[30, 30, 30]),
            (&[1, 2], &[20, 20]),
            (&[1, 3], &[20, 20]),
            (&[1, 4], &[30, 30]),
            (&[2, 3], &[20, 20]),
            (&[2, 4], &[30, 30]),
            (&[3, 4], &[20, 30]),
            (&[1], &[30]),
            (&[2], &[30]),
            (&[3], &[30]),
            (&[4], &[30]),
        ],
    )
}

/// Two players, cross-monotonic: each pays 1 when both are served, 2 alone.
pub fn cm2() -> CostSharingScheme {
    scheme_from_cells(2, &[(&[1, 2], &[1, 1]), (&[1], &[2]), (&[2], &[2])])
}
