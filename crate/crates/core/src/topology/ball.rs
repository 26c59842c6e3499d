use alloc::collections::VecDeque;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::config::Configuration;
use crate::degrees::{DegreeSequence, HalfEdge, Vertex};

use super::revealed::PairingSource;

/// Marker for half-edges farther than the requested radius.
pub const UNREACHED: u32 = u32::MAX;

/// Non-backtracking distances from `x` in `c`, up to `radius`.
///
/// The neighbours of `y` are the siblings of `c(y)`. Returned in breadth-first
/// order, so distances are nondecreasing.
fn bfs<P: PairingSource>(
    c: &mut P,
    seq: &DegreeSequence,
    x: HalfEdge,
    radius: u32,
) -> Vec<(HalfEdge, u32)> {
    let mut dist: HashMap<HalfEdge, u32> = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    dist.insert(x, 0);
    queue.push_back(x);
    while let Some(y) = queue.pop_front() {
        let d = dist[&y];
        order.push((y, d));
        if d == radius {
            continue;
        }
        for w in seq.siblings(c.partner_of(y)) {
            if let hashbrown::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                queue.push_back(w);
            }
        }
    }
    order
}

/// The forward ball `B_t(x)`: half-edges at non-backtracking distance at most `t`, sorted.
pub fn ball(c: &Configuration, seq: &DegreeSequence, x: HalfEdge, t: u32) -> Vec<HalfEdge> {
    let mut out: Vec<HalfEdge> = bfs(&mut { c }, seq, x, t)
        .into_iter()
        .map(|(y, _)| y)
        .collect();
    out.sort_unstable();
    out
}

pub fn ball_size(c: &Configuration, seq: &DegreeSequence, x: HalfEdge, t: u32) -> usize {
    bfs(&mut { c }, seq, x, t).len()
}

/// Dense distance array from `x`, `UNREACHED` beyond `radius`.
pub fn distances_from(
    c: &Configuration,
    seq: &DegreeSequence,
    x: HalfEdge,
    radius: u32,
) -> Vec<u32> {
    let mut out = alloc::vec![UNREACHED; c.len()];
    for (y, d) in bfs(&mut { c }, seq, x, radius) {
        out[y as usize] = d;
    }
    out
}

/// True iff exploring `B_t(x)` never reaches a vertex twice.
///
/// Vertices are discovered through the edges `{y, c(y)}` with `dist(y) < t`,
/// starting from `v(x)`; a self-loop revisits its own vertex.
pub fn is_tree_ball(c: &Configuration, seq: &DegreeSequence, x: HalfEdge, t: u32) -> bool {
    is_tree_ball_in(&mut { c }, seq, x, t)
}

pub fn is_tree_ball_in<P: PairingSource>(
    c: &mut P,
    seq: &DegreeSequence,
    x: HalfEdge,
    t: u32,
) -> bool {
    ball_profile_in(c, seq, x, t).tree_radius >= t
}

/// Sizes of `B_0(x), ..., B_radius(x)` and the largest `t <= radius` for
/// which `B_t(x)` is a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallProfile {
    pub sizes: Vec<usize>,
    pub tree_radius: u32,
}

pub fn ball_profile_in<P: PairingSource>(
    c: &mut P,
    seq: &DegreeSequence,
    x: HalfEdge,
    radius: u32,
) -> BallProfile {
    let order = bfs(c, seq, x, radius);
    let mut sizes = alloc::vec![0usize; radius as usize + 1];
    let mut seen: HashSet<Vertex> = HashSet::new();
    seen.insert(seq.owner(x));
    // the edge out of `y` belongs to every ball of radius above dist(y), and
    // the discovery order is shared by all radii
    let mut tree_radius = radius;
    for &(y, d) in &order {
        sizes[d as usize] += 1;
        if d < tree_radius && !seen.insert(seq.owner(c.partner_of(y))) {
            tree_radius = d;
        }
    }
    for t in 1..sizes.len() {
        sizes[t] += sizes[t - 1];
    }
    BallProfile { sizes, tree_radius }
}

/// Half-edges of the ball together with the partners of its inner half-edges,
/// i.e. every half-edge on an edge of the explored tree.
pub fn tree_half_edges(
    c: &Configuration,
    seq: &DegreeSequence,
    x: HalfEdge,
    t: u32,
) -> Vec<HalfEdge> {
    tree_half_edges_in(&mut { c }, seq, x, t)
}

pub fn tree_half_edges_in<P: PairingSource>(
    c: &mut P,
    seq: &DegreeSequence,
    x: HalfEdge,
    t: u32,
) -> Vec<HalfEdge> {
    let mut out = Vec::new();
    for (y, d) in bfs(c, seq, x, t) {
        out.push(y);
        if d < t {
            out.push(c.partner_of(y));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::sample_configuration;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// 3-regular graph: two triangles joined by a perfect matching (prism).
    fn prism() -> (DegreeSequence, Configuration) {
        let seq = DegreeSequence::make_regular(6, 3).unwrap();
        // vertex v owns half-edges 3v, 3v+1, 3v+2
        let c = Configuration::from_pairs(
            18,
            &[
                (0, 4),
                (5, 6),
                (7, 1),
                (9, 13),
                (14, 15),
                (16, 10),
                (2, 11),
                (3, 12),
                (8, 17),
            ],
        )
        .unwrap();
        (seq, c)
    }

    #[test]
    fn radius_zero_is_the_half_edge() {
        let (seq, c) = prism();
        assert_eq!(ball(&c, &seq, 4, 0), [4]);
        assert!(is_tree_ball(&c, &seq, 4, 0));
    }

    #[test]
    fn prism_ball_and_cycle() {
        let (seq, c) = prism();
        // from 0: partner 4 at v1, siblings 3 and 5
        assert_eq!(ball(&c, &seq, 0, 1), [0, 3, 5]);
        assert!(is_tree_ball(&c, &seq, 0, 1));
        // 5 -> 6 at v2, siblings 7 and 8; 7 -> 1 back at v0 (triangle)
        assert!(!is_tree_ball(&c, &seq, 0, 3));
        let d = distances_from(&c, &seq, 0, 2);
        assert_eq!((d[3], d[7], d[8], d[1]), (1, 2, 2, UNREACHED));
    }

    #[test]
    fn self_loop_is_not_a_tree() {
        let seq = DegreeSequence::make_regular(2, 4).unwrap();
        let c = Configuration::from_pairs(8, &[(0, 4), (5, 6), (7, 1), (2, 3)]).unwrap();
        assert!(!is_tree_ball(&c, &seq, 0, 2));
        assert!(is_tree_ball(&c, &seq, 0, 1));
    }

    proptest! {
        #[test]
        fn balls_are_nested(seed in any::<u64>(), x in 0u32..60, t in 0u32..6) {
            let seq = DegreeSequence::make_regular(20, 3).unwrap();
            let c = sample_configuration(&seq, &mut ChaCha8Rng::seed_from_u64(seed));
            let inner = ball(&c, &seq, x, t);
            let outer = ball(&c, &seq, x, t + 1);
            prop_assert!(inner.iter().all(|y| outer.binary_search(y).is_ok()));
            if is_tree_ball(&c, &seq, x, t + 1) {
                prop_assert!(is_tree_ball(&c, &seq, x, t));
            }
        }

        #[test]
        fn profile_matches_single_radius_queries(seed in any::<u64>(), x in 0u32..60) {
            let seq = DegreeSequence::make_regular(20, 3).unwrap();
            let c = sample_configuration(&seq, &mut ChaCha8Rng::seed_from_u64(seed));
            let profile = ball_profile_in(&mut &c, &seq, x, 6);
            for t in 0..=6u32 {
                prop_assert_eq!(profile.sizes[t as usize], ball_size(&c, &seq, x, t));
                // reference tree check straight from the definition
                let mut seen = HashSet::new();
                seen.insert(seq.owner(x));
                let tree = bfs(&mut &c, &seq, x, t)
                    .into_iter()
                    .all(|(y, d)| d >= t || seen.insert(seq.owner(c.partner(y))));
                prop_assert_eq!(profile.tree_radius >= t, tree);
            }
        }
    }
}
