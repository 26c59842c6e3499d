//! Local structure of a frozen configuration: forward neighbourhoods, the
//! exploration process, segmented paths and good tuples, and the Monte Carlo
//! check that isomorphic segmented paths carry equal rewiring-event mass.

mod ball;
mod diagnostics;
mod explore;
mod good;
mod isomorphic;
mod paths;
mod revealed;

pub use ball::{
    ball, ball_profile_in, ball_size, distances_from, is_tree_ball, is_tree_ball_in,
    tree_half_edges, tree_half_edges_in, BallProfile, UNREACHED,
};
pub use diagnostics::{diagnostic_jumps, topology_diagnostics, DiagnosticsRow};
pub use explore::{explore, explore_in, ThornyGraph};
pub use good::{
    good_tuple_density, good_tuple_density_uniform, is_good_tuple, is_good_tuple_in,
    GoodTupleEstimate,
};
pub use isomorphic::{
    isomorphic_path_event_check, path_event, path_event_hits, random_self_avoiding_path,
    summarize_path_events, window_counts, PathEventCheck,
};
pub use paths::{
    enumerate_segmented_paths, validate_segmented_path, SegmentedPath, PATH_WORK_LIMIT,
};
pub use revealed::{PairingSource, RevealedConfiguration};
