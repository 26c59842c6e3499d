use alloc::vec::Vec;
use core::ops::Range;

use hashbrown::HashSet;
use rand::Rng;

use crate::config::Configuration;
use crate::deferred::LazyDynamics;
use crate::degrees::{DegreeSequence, HalfEdge, Vertex};
use crate::error::{Error, Result};
use crate::seeding::{domain, stream_rng};
use crate::stats::two_proportion_z;

use super::paths::{validate_segmented_path, SegmentedPath};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEventCheck {
    pub replicas: u64,
    pub hits_a: u64,
    pub hits_b: u64,
    pub p_a: f64,
    pub p_b: f64,
    pub z: f64,
}

/// `counts[s][s' - s - 1]` is the number of distinct half-edges in `x_s..=x_s'`.
pub fn window_counts(half_edges: &[HalfEdge]) -> Vec<Vec<usize>> {
    (0..half_edges.len())
        .map(|s| {
            let mut seen: HashSet<HalfEdge> = HashSet::new();
            seen.insert(half_edges[s]);
            half_edges[s + 1..]
                .iter()
                .map(|&x| {
                    seen.insert(x);
                    seen.len()
                })
                .collect()
        })
        .collect()
}

fn check_isomorphic(a: &SegmentedPath, b: &SegmentedPath) -> Result<()> {
    if a.half_edges.len() != b.half_edges.len() || a.jumps != b.jumps {
        return Err(Error::InvalidPath(
            "paths differ in length or segment positions".into(),
        ));
    }
    let (wa, wb) = (window_counts(&a.half_edges), window_counts(&b.half_edges));
    for (s, (ra, rb)) in wa.iter().zip(&wb).enumerate() {
        for (i, (&left, &right)) in ra.iter().zip(rb).enumerate() {
            if left != right {
                return Err(Error::NotIsomorphic {
                    start: s,
                    end: s + i + 1,
                    left,
                    right,
                });
            }
        }
    }
    Ok(())
}

/// Whether the revealed run realises the rewiring pattern of `path`: the
/// position before every jump has been rewired by then, and no other position
/// has.
pub fn path_event<R: Rng + ?Sized>(
    engine: &mut LazyDynamics,
    path: &SegmentedPath,
    rng: &mut R,
) -> bool {
    engine.reset();
    (1..path.half_edges.len()).all(|i| {
        let rewired = engine.rewired_upto(i, path.half_edges[i - 1], rng);
        rewired == path.jumps.binary_search(&i).is_ok()
    })
}

/// Event hits for replicas in `range`; replica `i` uses the same stream for any path.
pub fn path_event_hits(
    engine: &mut LazyDynamics,
    path: &SegmentedPath,
    master_seed: u64,
    range: Range<u64>,
) -> u64 {
    range
        .filter(|&i| {
            let mut rng = stream_rng(master_seed, domain::PATH_EVENT, 0, i);
            path_event(engine, path, &mut rng)
        })
        .count() as u64
}

/// Monte Carlo estimates of the rewiring-pattern probability for two
/// isomorphic segmented paths, with common random numbers per replica.
pub fn isomorphic_path_event_check(
    seq: &DegreeSequence,
    eta: &Configuration,
    path_a: &SegmentedPath,
    path_b: &SegmentedPath,
    k: usize,
    replicas: u64,
    master_seed: u64,
) -> Result<PathEventCheck> {
    validate_segmented_path(eta, seq, path_a, false)?;
    validate_segmented_path(eta, seq, path_b, false)?;
    check_isomorphic(path_a, path_b)?;
    let mut engine = LazyDynamics::new(seq, eta, k)?;
    let hits_a = path_event_hits(&mut engine, path_a, master_seed, 0..replicas);
    let hits_b = path_event_hits(&mut engine, path_b, master_seed, 0..replicas);
    Ok(summarize_path_events(replicas, hits_a, hits_b))
}

pub fn summarize_path_events(replicas: u64, hits_a: u64, hits_b: u64) -> PathEventCheck {
    let n = replicas.max(1) as f64;
    PathEventCheck {
        replicas,
        hits_a,
        hits_b,
        p_a: hits_a as f64 / n,
        p_b: hits_b as f64 / n,
        z: two_proportion_z(hits_a, replicas, hits_b, replicas),
    }
}

/// Draws a self-avoiding segmented path of length `t` avoiding the vertices in
/// `avoid`, or `None` after `attempts` failures.
pub fn random_self_avoiding_path<R: Rng + ?Sized>(
    c: &Configuration,
    seq: &DegreeSequence,
    jumps: &[usize],
    t: usize,
    avoid: &HashSet<Vertex>,
    attempts: usize,
    rng: &mut R,
) -> Option<SegmentedPath> {
    let ell = seq.ell() as HalfEdge;
    'attempt: for _ in 0..attempts {
        let mut used = avoid.clone();
        let mut xs = Vec::with_capacity(t + 1);
        for j in 0..=t {
            let x = if j == 0 || jumps.binary_search(&j).is_ok() {
                rng.random_range(0..ell)
            } else {
                let z = c.partner(xs[j - 1]);
                seq.sibling(z, rng.random_range(0..seq.deg(z)))
            };
            if !used.insert(seq.owner(x)) {
                continue 'attempt;
            }
            xs.push(x);
        }
        return Some(SegmentedPath {
            half_edges: xs,
            jumps: jumps.to_vec(),
        });
    }
    None
}
