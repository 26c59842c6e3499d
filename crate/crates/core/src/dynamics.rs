//! The `k`-edge rewiring chain on configurations.

use alloc::vec::Vec;

use hashbrown::HashSet;
use rand::Rng;

use crate::config::{uniform_pairing, Configuration};
use crate::degrees::{DegreeSequence, HalfEdge};
use crate::error::{Error, Result};

/// Per-step rewired half-edge sets `R_t` and their running union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewiringTrace {
    per_step: Vec<Vec<HalfEdge>>,
    cumulative: Vec<u64>,
    cumulative_count: usize,
}

impl RewiringTrace {
    pub fn new(ell: usize) -> Self {
        Self {
            per_step: Vec::new(),
            cumulative: alloc::vec![0; ell.div_ceil(64)],
            cumulative_count: 0,
        }
    }

    /// Appends `R_t` (sorted) for the next step.
    pub fn push(&mut self, rewired: Vec<HalfEdge>) {
        for &x in &rewired {
            let (w, b) = (x as usize / 64, x % 64);
            if self.cumulative[w] & (1 << b) == 0 {
                self.cumulative[w] |= 1 << b;
                self.cumulative_count += 1;
            }
        }
        self.per_step.push(rewired);
    }

    /// Number of recorded steps.
    pub fn steps(&self) -> usize {
        self.per_step.len()
    }

    /// `R_t` for `t` in `1..=steps()`.
    pub fn step(&self, t: usize) -> &[HalfEdge] {
        &self.per_step[t - 1]
    }

    pub fn per_step(&self) -> &[Vec<HalfEdge>] {
        &self.per_step
    }

    /// Whether `x` is in the union of all recorded steps.
    #[inline]
    pub fn in_cumulative(&self, x: HalfEdge) -> bool {
        self.cumulative[x as usize / 64] & (1 << (x % 64)) != 0
    }

    /// `|R_{<=t}|` for the last recorded step.
    pub fn cumulative_count(&self) -> usize {
        self.cumulative_count
    }
}

/// `k` chosen from a target fraction `alpha = k / m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaChoice {
    pub k: usize,
    pub requested: f64,
    pub effective: f64,
    /// True when rounding or clamping moved `k / m` away from the request.
    pub adjusted: bool,
}

pub fn alpha_to_k(seq: &DegreeSequence, alpha: f64) -> Result<AlphaChoice> {
    alpha_to_k_for_m(seq.m(), alpha)
}

pub fn alpha_to_k_for_m(m: usize, alpha: f64) -> Result<AlphaChoice> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    if m < 2 {
        return Err(Error::KOutOfRange { k: 2, m });
    }
    let k = (libm::round(alpha * m as f64) as usize).clamp(2, m);
    let effective = k as f64 / m as f64;
    Ok(AlphaChoice {
        k,
        requested: alpha,
        effective,
        adjusted: libm::fabs(effective - alpha) > 1e-12 * alpha,
    })
}

pub(crate) fn check_k(k: usize, m: usize) -> Result<()> {
    if k < 2 || k > m {
        Err(Error::KOutOfRange { k, m })
    } else {
        Ok(())
    }
}

/// Picks `k` distinct edges of `c` uniformly, writing their `2k` half-edges
/// (sorted) into `out`.
fn choose_edges<R: Rng + ?Sized>(
    c: &Configuration,
    k: usize,
    rng: &mut R,
    out: &mut Vec<HalfEdge>,
) {
    let m = c.m();
    let ell = c.len() as u32;
    out.clear();
    if 2 * k <= m {
        // rejection on edge representatives; expected O(k) draws
        let mut seen: HashSet<HalfEdge> = HashSet::with_capacity(k);
        while seen.len() < k {
            let h = rng.random_range(0..ell);
            let rep = h.min(c.partner(h));
            if seen.insert(rep) {
                out.push(rep);
                out.push(c.partner(rep));
            }
        }
    } else {
        let mut reps: Vec<HalfEdge> = c.edges().map(|(x, _)| x).collect();
        for i in 0..k {
            let j = rng.random_range(i..m);
            reps.swap(i, j);
            out.push(reps[i]);
            out.push(c.partner(reps[i]));
        }
    }
    out.sort_unstable();
}

/// One rewiring step in place; `rewired` receives `R_t` sorted.
pub fn rewire_in_place<R: Rng + ?Sized>(
    c: &mut Configuration,
    k: usize,
    rng: &mut R,
    rewired: &mut Vec<HalfEdge>,
) -> Result<()> {
    check_k(k, c.m())?;
    choose_edges(c, k, rng, rewired);
    uniform_pairing(rewired.len(), rng, |a, b| c.pair(rewired[a], rewired[b]));
    Ok(())
}

/// Cuts `k` uniformly chosen edges and re-pairs their half-edges uniformly.
pub fn rewire_step<R: Rng + ?Sized>(
    c: &Configuration,
    k: usize,
    rng: &mut R,
) -> Result<(Configuration, Vec<HalfEdge>)> {
    let mut next = c.clone();
    let mut rewired = Vec::with_capacity(2 * k);
    rewire_in_place(&mut next, k, rng, &mut rewired)?;
    Ok((next, rewired))
}

/// `steps` successive rewiring steps, recording every `R_t`.
pub fn evolve<R: Rng + ?Sized>(
    c0: &Configuration,
    k: usize,
    steps: usize,
    rng: &mut R,
) -> Result<(Configuration, RewiringTrace)> {
    check_k(k, c0.m())?;
    let mut c = c0.clone();
    let mut trace = RewiringTrace::new(c.len());
    for _ in 0..steps {
        let mut rewired = Vec::with_capacity(2 * k);
        rewire_in_place(&mut c, k, rng, &mut rewired)?;
        trace.push(rewired);
    }
    Ok((c, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{hamming, sample_configuration};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alpha_examples() {
        let a = alpha_to_k_for_m(100, 0.05).unwrap();
        assert_eq!((a.k, a.adjusted), (5, false));
        assert!((a.effective - 0.05).abs() < 1e-15);
        let a = alpha_to_k_for_m(10, 0.01).unwrap();
        assert_eq!((a.k, a.adjusted), (2, true));
        assert!((a.effective - 0.2).abs() < 1e-15);
        assert_eq!(alpha_to_k_for_m(6, 1.0).unwrap().k, 6);
        assert!(alpha_to_k_for_m(6, 0.0).is_err());
        assert!(alpha_to_k_for_m(6, 1.5).is_err());
        assert!(alpha_to_k_for_m(6, f64::NAN).is_err());
    }

    #[test]
    fn zero_steps_is_identity() {
        let seq = DegreeSequence::make_regular(10, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = sample_configuration(&seq, &mut rng);
        let (d, trace) = evolve(&c, 2, 0, &mut rng).unwrap();
        assert_eq!(c, d);
        assert_eq!(trace.steps(), 0);
        assert_eq!(trace.cumulative_count(), 0);
    }

    #[test]
    fn rewire_respects_k_and_closure() {
        let seq = DegreeSequence::make_regular(40, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = sample_configuration(&seq, &mut rng);
        for k in [2, 7, 30, 60] {
            let (d, r) = rewire_step(&c, k, &mut rng).unwrap();
            assert_eq!(r.len(), 2 * k);
            assert!(hamming(&c, &d).unwrap() <= k);
            for &x in &r {
                assert!(r.binary_search(&d.partner(x)).is_ok());
                assert!(r.binary_search(&c.partner(x)).is_ok());
            }
            for x in 0..c.len() as u32 {
                if r.binary_search(&x).is_err() {
                    assert_eq!(c.partner(x), d.partner(x));
                }
            }
        }
        assert!(rewire_step(&c, 1, &mut rng).is_err());
        assert!(rewire_step(&c, 61, &mut rng).is_err());
    }

    #[test]
    fn full_rewiring_touches_everything() {
        let seq = DegreeSequence::make_regular(6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = sample_configuration(&seq, &mut rng);
        let (_, r) = rewire_step(&c, 9, &mut rng).unwrap();
        assert_eq!(r, (0..18).collect::<Vec<_>>());
    }

    #[test]
    fn trace_union() {
        let mut t = RewiringTrace::new(130);
        t.push(alloc::vec![1, 2, 64, 129]);
        t.push(alloc::vec![2, 3, 64, 100]);
        assert_eq!(t.cumulative_count(), 6);
        assert!(t.in_cumulative(129) && t.in_cumulative(3));
        assert!(!t.in_cumulative(0));
        assert_eq!(t.step(2), &[2, 3, 64, 100]);
    }
}
