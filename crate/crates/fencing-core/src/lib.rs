//! Verification toolkit for cost-sharing mechanism design: Fence
//! Monotonicity checking, the Fencing and Moulin mechanisms,
//! group-strategyproofness cross-validation and budget-balance analysis,
//! all in exact rational arithmetic.

pub mod budget;
pub mod fence;
pub mod fixtures;
pub mod gen;
pub mod gsp;
pub mod io;
pub mod mechanism;
pub mod money;
pub mod player_set;
pub mod scheme;

pub use budget::{
    budget_balance_ratio, budget_balance_ratio_reachable, family_cost, find_family_violation,
    search_bb_schemes, BudgetReport, FamilyViolation,
};
pub use gsp::{
    build_grid, check_necessity, find_successful_coalition, verify_axioms, verify_gsp,
    verify_gsp_sampled, BidGrid, CoalitionWitness, FencingMechanism, FnMechanism, GspVerdict,
    MechanismUnderTest,
};
pub use fence::{
    check_cross_monotonicity, check_fence_monotonicity, harm_graph, harms, xi_star, FenceReport,
};
pub use io::{parse_bids_inline, parse_bids_json, CostFile, SchemeFile};
pub use mechanism::{
    find_stable_pair, maximal_upper_set, recover_stable_pair, run_fencing, run_moulin,
    sentinel_bid, sentinel_bids, stable_pairs, tie_break, StablePair,
};
pub use money::Money;
pub use player_set::{PlayerSet, MAX_PLAYERS};
pub use scheme::{
    utility, BidVector, CostFunction, CostSharingScheme, MechanismOutcome, SchemeData,
};
