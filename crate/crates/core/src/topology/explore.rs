use alloc::collections::VecDeque;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
use rand::Rng;

use crate::config::Configuration;
use crate::degrees::{DegreeSequence, HalfEdge, Vertex};

/// A partially explored graph: some half-edges are paired, the rest dangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThornyGraph {
    root: HalfEdge,
    edges: Vec<(HalfEdge, HalfEdge)>,
    vertices: Vec<Vertex>,
    active: VecDeque<HalfEdge>,
    paired: HashMap<HalfEdge, HalfEdge>,
    present: HashSet<Vertex>,
}

impl ThornyGraph {
    fn start(seq: &DegreeSequence, root: HalfEdge) -> Self {
        let v = seq.owner(root);
        let mut present = HashSet::new();
        present.insert(v);
        Self {
            root,
            edges: Vec::new(),
            vertices: alloc::vec![v],
            active: VecDeque::from([root]),
            paired: HashMap::new(),
            present,
        }
    }

    fn pair(&mut self, seq: &DegreeSequence, y: HalfEdge, z: HalfEdge) {
        self.edges.push((y, z));
        self.paired.insert(y, z);
        self.paired.insert(z, y);
        self.active.retain(|&a| a != z);
        let v = seq.owner(z);
        if self.present.insert(v) {
            self.vertices.push(v);
        }
        // unpaired half-edges of v(z) join the queue once
        for h in seq.siblings(z) {
            if h != y && self.is_unpaired(h) && !self.active.contains(&h) {
                self.active.push_back(h);
            }
        }
    }

    pub fn root(&self) -> HalfEdge {
        self.root
    }

    /// Formed pairs in the order they were formed.
    pub fn edges(&self) -> &[(HalfEdge, HalfEdge)] {
        &self.edges
    }

    /// Vertices in discovery order.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// The first-in first-out queue of active half-edges.
    pub fn active(&self) -> impl Iterator<Item = HalfEdge> + '_ {
        self.active.iter().copied()
    }

    pub fn is_unpaired(&self, h: HalfEdge) -> bool {
        !self.paired.contains_key(&h)
    }

    /// Unpaired half-edges of the vertices in the graph, sorted.
    pub fn dangling(&self, seq: &DegreeSequence) -> Vec<HalfEdge> {
        let mut out: Vec<HalfEdge> = self
            .vertices
            .iter()
            .flat_map(|&v| seq.half_edges_of(v))
            .filter(|h| self.is_unpaired(*h))
            .collect();
        out.sort_unstable();
        out
    }

    /// True iff no pairing closed a cycle or a self-loop.
    pub fn is_tree(&self) -> bool {
        self.vertices.len() == self.edges.len() + 1
    }

    /// Formed pairs as sorted `(min, max)` tuples.
    pub fn canonical_edges(&self) -> Vec<(HalfEdge, HalfEdge)> {
        let mut out: Vec<_> = self
            .edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Breadth-first exploration from `root` of a uniform configuration that is
/// revealed one pairing at a time. Stops after `s_max` pairings or when the
/// active queue empties.
pub fn explore<R: Rng + ?Sized>(
    seq: &DegreeSequence,
    root: HalfEdge,
    rng: &mut R,
    s_max: usize,
) -> ThornyGraph {
    let mut g = ThornyGraph::start(seq, root);
    let ell = seq.ell() as HalfEdge;
    while g.edges.len() < s_max {
        let Some(y) = g.active.pop_front() else { break };
        let z = loop {
            let z = rng.random_range(0..ell);
            if z != y && g.is_unpaired(z) {
                break z;
            }
        };
        g.pair(seq, y, z);
    }
    g
}

/// The same breadth-first exploration, reading pairs from a fixed configuration.
pub fn explore_in(
    c: &Configuration,
    seq: &DegreeSequence,
    root: HalfEdge,
    s_max: usize,
) -> ThornyGraph {
    let mut g = ThornyGraph::start(seq, root);
    while g.edges.len() < s_max {
        let Some(y) = g.active.pop_front() else { break };
        g.pair(seq, y, c.partner(y));
    }
    g
}
