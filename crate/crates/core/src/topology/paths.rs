use alloc::format;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::config::Configuration;
use crate::degrees::{DegreeSequence, HalfEdge, Vertex};
use crate::error::{Error, Result};

/// Search nodes visited before [`enumerate_segmented_paths`] gives up.
pub const PATH_WORK_LIMIT: usize = 20_000_000;
const SMALL_ELL: usize = 20;
const SHORT_PATH: usize = 6;

/// Half-edges `x_0..x_t`; positions in `jumps` start a new segment, every
/// other step follows the configuration without backtracking.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentedPath {
    pub half_edges: Vec<HalfEdge>,
    pub jumps: Vec<usize>,
}

impl SegmentedPath {
    pub fn len(&self) -> usize {
        self.half_edges.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.half_edges.len() <= 1
    }
}

fn check_jumps(jumps: &[usize], t: usize) -> Result<()> {
    if jumps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidPath(format!(
            "jump positions {jumps:?} not strictly increasing"
        )));
    }
    if jumps.iter().any(|&j| j == 0 || j > t) {
        return Err(Error::InvalidPath(format!(
            "jump positions {jumps:?} outside [1, {t}]"
        )));
    }
    Ok(())
}

/// Checks the segment rule and, when `self_avoiding`, that no vertex repeats.
pub fn validate_segmented_path(
    c: &Configuration,
    seq: &DegreeSequence,
    path: &SegmentedPath,
    self_avoiding: bool,
) -> Result<()> {
    let xs = &path.half_edges;
    if xs.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    for &x in xs {
        seq.check_half_edge(x as u64)?;
    }
    check_jumps(&path.jumps, path.len())?;
    for j in 1..xs.len() {
        if path.jumps.binary_search(&j).is_err() && !seq.are_siblings(xs[j], c.partner(xs[j - 1])) {
            return Err(Error::InvalidPath(format!(
                "step {j}: {} is not a sibling of the partner of {}",
                xs[j],
                xs[j - 1]
            )));
        }
    }
    if self_avoiding {
        let mut seen: HashSet<Vertex> = HashSet::new();
        if let Some(x) = xs.iter().find(|&&x| !seen.insert(seq.owner(x))) {
            return Err(Error::InvalidPath(format!("vertex of {x} visited twice")));
        }
    }
    Ok(())
}

/// Every self-avoiding segmented path of length `t` from `x` to `y` whose
/// segments start exactly at `jumps`.
pub fn enumerate_segmented_paths(
    c: &Configuration,
    seq: &DegreeSequence,
    x: HalfEdge,
    y: HalfEdge,
    jumps: &[usize],
    t: usize,
) -> Result<Vec<SegmentedPath>> {
    seq.check_half_edge(x as u64)?;
    seq.check_half_edge(y as u64)?;
    check_jumps(jumps, t)?;
    if seq.ell() > SMALL_ELL && t > SHORT_PATH {
        return Err(Error::ScaleGuard {
            what: "path length",
            size: t,
            limit: SHORT_PATH,
        });
    }
    struct Search<'a> {
        c: &'a Configuration,
        seq: &'a DegreeSequence,
        y: HalfEdge,
        jumps: &'a [usize],
        t: usize,
        prefix: Vec<HalfEdge>,
        used: HashSet<Vertex>,
        out: Vec<SegmentedPath>,
        work: usize,
    }
    impl Search<'_> {
        fn step(&mut self, next: HalfEdge) -> Result<()> {
            self.work += 1;
            if self.work > PATH_WORK_LIMIT {
                return Err(Error::ScaleGuard {
                    what: "search nodes",
                    size: self.work,
                    limit: PATH_WORK_LIMIT,
                });
            }
            let v = self.seq.owner(next);
            if !self.used.insert(v) {
                return Ok(());
            }
            self.prefix.push(next);
            self.extend()?;
            self.prefix.pop();
            self.used.remove(&v);
            Ok(())
        }

        fn extend(&mut self) -> Result<()> {
            let j = self.prefix.len();
            let last = *self.prefix.last().expect("non-empty prefix");
            if j == self.t + 1 {
                if last == self.y {
                    self.out.push(SegmentedPath {
                        half_edges: self.prefix.clone(),
                        jumps: self.jumps.to_vec(),
                    });
                }
                return Ok(());
            }
            if self.jumps.binary_search(&j).is_ok() {
                for next in 0..self.seq.ell() as HalfEdge {
                    self.step(next)?;
                }
            } else {
                let z = self.c.partner(last);
                let sibs: Vec<HalfEdge> = self.seq.siblings(z).collect();
                for next in sibs {
                    self.step(next)?;
                }
            }
            Ok(())
        }
    }
    let mut search = Search {
        c,
        seq,
        y,
        jumps,
        t,
        prefix: alloc::vec![x],
        used: HashSet::from_iter([seq.owner(x)]),
        out: Vec::new(),
        work: 0,
    };
    search.extend()?;
    Ok(search.out)
}
