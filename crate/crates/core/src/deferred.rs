//! Deferred-decision simulation of the rewiring chain.
//!
//! A walker only ever looks at one pairing per step, so instead of rewiring
//! `k` edges of an `ell`-sized configuration at every step, the engine reveals
//! the configuration `C_j` lazily: the first time the pair of `h` at level `j`
//! is requested, it decides whether the edge of `h` in `C_{j-1}` belongs to
//! the rewired set at step `j` (probability `(k - c_j) / (m - d_j)` given
//! `d_j` edges decided so far, `c_j` of them chosen) and, if so, draws its new
//! partner from the uniform matching of the rewired half-edges. The joint law
//! of everything revealed equals the law under the eager chain, while the cost
//! per replica depends only on the horizon.

use alloc::vec::Vec;

use rand::Rng;

use crate::config::Configuration;
use crate::degrees::{DegreeSequence, HalfEdge};
use crate::dynamics::check_k;
use crate::error::Result;

const NIL: u32 = u32::MAX;
const UNMATCHED: HalfEdge = HalfEdge::MAX;

#[derive(Debug, Clone, Copy)]
struct Entry {
    level: u32,
    partner: HalfEdge,
    next: u32,
}

#[derive(Debug, Clone, Default)]
struct Level {
    chosen: usize,
    decided: usize,
    /// Rewired half-edges at this level whose new partner is still undrawn.
    unmatched: Vec<HalfEdge>,
}

/// Lazily revealed trajectory `C_0 = eta, C_1, C_2, ...` of the rewiring chain.
#[derive(Debug, Clone)]
pub struct LazyDynamics {
    eta: Vec<HalfEdge>,
    m: usize,
    k: usize,
    epoch: u32,
    stamp: Vec<u32>,
    /// `h` has been decided at every level in `1..=upto[h]`.
    upto: Vec<u32>,
    /// Smallest level at which `h` was rewired, `NIL` if none yet.
    first: Vec<u32>,
    /// Most recent entry of `h`; each entry is a level at which `h` was rewired.
    head: Vec<u32>,
    entries: Vec<Entry>,
    levels: Vec<Level>,
}

impl LazyDynamics {
    pub fn new(seq: &DegreeSequence, eta: &Configuration, k: usize) -> Result<Self> {
        eta.check_fits(seq)?;
        check_k(k, eta.m())?;
        let ell = eta.len();
        Ok(Self {
            eta: eta.pairing().to_vec(),
            m: eta.m(),
            k,
            epoch: 1,
            stamp: alloc::vec![0; ell],
            upto: alloc::vec![0; ell],
            first: alloc::vec![NIL; ell],
            head: alloc::vec![NIL; ell],
            entries: Vec::new(),
            levels: alloc::vec![Level::default()],
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Forgets everything revealed; the next queries start a fresh run from `eta`.
    pub fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.entries.clear();
        for l in &mut self.levels {
            l.chosen = 0;
            l.decided = 0;
            l.unmatched.clear();
        }
    }

    #[inline]
    fn touch(&mut self, h: HalfEdge) {
        let i = h as usize;
        if self.stamp[i] != self.epoch {
            self.stamp[i] = self.epoch;
            self.upto[i] = 0;
            self.first[i] = NIL;
            self.head[i] = NIL;
        }
    }

    /// `C_level(h)`.
    pub fn partner<R: Rng + ?Sized>(&mut self, level: usize, h: HalfEdge, rng: &mut R) -> HalfEdge {
        if level == 0 {
            return self.eta[h as usize];
        }
        self.touch(h);
        while (self.upto[h as usize] as usize) < level {
            self.advance(h, rng);
        }
        self.resolved(level as u32, h, rng)
    }

    /// Whether `h` lies in `R_{<=level}`.
    pub fn rewired_upto<R: Rng + ?Sized>(
        &mut self,
        level: usize,
        h: HalfEdge,
        rng: &mut R,
    ) -> bool {
        if level == 0 {
            return false;
        }
        self.partner(level, h, rng);
        self.first[h as usize] as usize <= level
    }

    /// Partner at `level <= upto[h]`, drawing it if `h` is still unmatched there.
    fn resolved<R: Rng + ?Sized>(&mut self, level: u32, h: HalfEdge, rng: &mut R) -> HalfEdge {
        let mut e = self.head[h as usize];
        while e != NIL && self.entries[e as usize].level > level {
            e = self.entries[e as usize].next;
        }
        if e == NIL {
            return self.eta[h as usize];
        }
        let entry = self.entries[e as usize];
        if entry.partner == UNMATCHED {
            self.match_fresh(entry.level, h, e, rng)
        } else {
            entry.partner
        }
    }

    fn push_entry(&mut self, h: HalfEdge, level: u32, partner: HalfEdge) -> u32 {
        let i = h as usize;
        let idx = self.entries.len() as u32;
        self.entries.push(Entry {
            level,
            partner,
            next: self.head[i],
        });
        self.head[i] = idx;
        if self.first[i] == NIL {
            self.first[i] = level;
        }
        self.upto[i] = level;
        idx
    }

    fn level_mut(&mut self, level: u32) -> &mut Level {
        let l = level as usize;
        if self.levels.len() <= l {
            self.levels.resize_with(l + 1, Level::default);
        }
        &mut self.levels[l]
    }

    /// Decides the next level for `h` and its current partner.
    fn advance<R: Rng + ?Sized>(&mut self, h: HalfEdge, rng: &mut R) {
        let below = self.upto[h as usize];
        let lev = below + 1;
        let w = self.resolved(below, h, rng);
        self.touch(w);
        debug_assert_eq!(self.upto[w as usize], below);
        let (k, m) = (self.k, self.m);
        let l = self.level_mut(lev);
        let chosen = rng.random_range(0..m - l.decided) < k - l.chosen;
        l.decided += 1;
        if chosen {
            l.chosen += 1;
            l.unmatched.push(h);
            l.unmatched.push(w);
            self.push_entry(h, lev, UNMATCHED);
            self.push_entry(w, lev, UNMATCHED);
        } else {
            self.upto[h as usize] = lev;
            self.upto[w as usize] = lev;
        }
    }

    /// Draws the partner of the rewired half-edge `h` at `level`.
    fn match_fresh<R: Rng + ?Sized>(
        &mut self,
        level: u32,
        h: HalfEdge,
        entry: u32,
        rng: &mut R,
    ) -> HalfEdge {
        let k = self.k;
        let l = &mut self.levels[level as usize];
        let pos = l
            .unmatched
            .iter()
            .position(|&u| u == h)
            .expect("h is unmatched");
        l.unmatched.swap_remove(pos);
        let a = l.unmatched.len();
        let b = 2 * (k - l.chosen);
        let r = rng.random_range(0..a + b);
        let z = if r < a {
            let z = l.unmatched.swap_remove(r);
            let ze = self.head[z as usize];
            debug_assert_eq!(self.entries[ze as usize].level, level);
            self.entries[ze as usize].partner = h;
            z
        } else {
            // a uniform half-edge whose step-`level` edge is still undecided
            let ell = self.eta.len() as u32;
            let z = loop {
                let z = rng.random_range(0..ell);
                self.touch(z);
                if self.upto[z as usize] < level {
                    break z;
                }
            };
            while self.upto[z as usize] < level - 1 {
                self.advance(z, rng);
            }
            let w2 = self.resolved(level - 1, z, rng);
            self.touch(w2);
            let l = &mut self.levels[level as usize];
            l.chosen += 1;
            l.decided += 1;
            l.unmatched.push(w2);
            self.push_entry(z, level, h);
            self.push_entry(w2, level, UNMATCHED);
            z
        };
        self.entries[entry as usize].partner = z;
        z
    }
}

/// Runs one replica of the joint chain on the lazy engine, calling
/// `visit(t, X_t)` for `t = 1..=horizon`. Returns `tau` if it is at most `horizon`.
pub fn lazy_walk<R: Rng + ?Sized>(
    engine: &mut LazyDynamics,
    seq: &DegreeSequence,
    x0: HalfEdge,
    horizon: usize,
    rng: &mut R,
    mut visit: impl FnMut(usize, HalfEdge),
) -> Option<usize> {
    engine.reset();
    let mut x = x0;
    let mut tau = None;
    for t in 1..=horizon {
        let z = engine.partner(t, x, rng);
        if tau.is_none() && engine.rewired_upto(t, x, rng) {
            tau = Some(t);
        }
        x = seq.sibling(z, rng.random_range(0..seq.deg(z)));
        visit(t, x);
    }
    tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::sample_configuration;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn revealed_pairings_are_involutions() {
        let seq = DegreeSequence::make_regular(8, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let eta = sample_configuration(&seq, &mut rng);
        let mut lazy = LazyDynamics::new(&seq, &eta, 3).unwrap();
        for _ in 0..50 {
            lazy.reset();
            for level in 0..6 {
                for h in 0..24 {
                    let p = lazy.partner(level, h, &mut rng);
                    assert_ne!(p, h);
                    assert_eq!(lazy.partner(level, p, &mut rng), h);
                }
            }
            for level in 1..6 {
                let l = &lazy.levels[level];
                assert_eq!((l.chosen, l.decided), (3, 12));
                assert!(l.unmatched.is_empty());
                let rewired = (0..24u32)
                    .filter(|&h| {
                        lazy.partner(level, h, &mut rng) != lazy.partner(level - 1, h, &mut rng)
                    })
                    .count();
                assert!(rewired <= 6);
            }
        }
    }

    #[test]
    fn rewired_sets_are_closed_under_pairing() {
        let seq = DegreeSequence::make_regular(30, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let eta = sample_configuration(&seq, &mut rng);
        let mut lazy = LazyDynamics::new(&seq, &eta, 4).unwrap();
        for _ in 0..20 {
            lazy.reset();
            for level in 1..8 {
                for h in 0..90 {
                    let p = lazy.partner(level, h, &mut rng);
                    let a = lazy.rewired_upto(level, h, &mut rng);
                    let b = lazy.rewired_upto(level, p, &mut rng);
                    assert_eq!(a, b);
                    if !lazy.rewired_upto(level - 1, h, &mut rng) && !a {
                        assert_eq!(p, eta.partner(h));
                    }
                }
            }
        }
    }

    #[test]
    fn full_rewiring_marks_every_half_edge() {
        let seq = DegreeSequence::make_regular(4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let eta = sample_configuration(&seq, &mut rng);
        let mut lazy = LazyDynamics::new(&seq, &eta, 6).unwrap();
        let tau = lazy_walk(&mut lazy, &seq, 5, 3, &mut rng, |_, _| {});
        assert_eq!(tau, Some(1));
    }
}
