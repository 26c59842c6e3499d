//! Configurations: fixed-point-free involutions on the half-edge set.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::degrees::{DegreeSequence, HalfEdge};
use crate::error::{Error, Result};

/// A perfect matching of the half-edges; `pairing[x]` is the partner of `x`.
///
/// Self-loops and multi-edges are allowed, the pairing is unconditioned.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pairing: Vec<HalfEdge>,
}

impl Configuration {
    /// Validates the involution and no-fixed-point invariants.
    pub fn from_pairing(pairing: Vec<HalfEdge>) -> Result<Self> {
        let len = pairing.len();
        if len % 2 == 1 {
            return Err(Error::InvalidConfiguration(format!(
                "odd number of half-edges ({len})"
            )));
        }
        for (x, &y) in pairing.iter().enumerate() {
            if y as usize >= len {
                return Err(Error::HalfEdgeOutOfRange {
                    index: y as u64,
                    len,
                });
            }
            if y as usize == x {
                return Err(Error::InvalidConfiguration(format!(
                    "half-edge {x} is paired to itself"
                )));
            }
            if pairing[y as usize] as usize != x {
                return Err(Error::InvalidConfiguration(format!(
                    "pairing is not an involution at half-edge {x}"
                )));
            }
        }
        Ok(Self { pairing })
    }

    /// Builds a configuration from a list of disjoint pairs covering `0..ell`.
    pub fn from_pairs(ell: usize, pairs: &[(HalfEdge, HalfEdge)]) -> Result<Self> {
        let mut pairing = alloc::vec![HalfEdge::MAX; ell];
        for &(a, b) in pairs {
            for x in [a, b] {
                if x as usize >= ell {
                    return Err(Error::HalfEdgeOutOfRange {
                        index: x as u64,
                        len: ell,
                    });
                }
                if pairing[x as usize] != HalfEdge::MAX {
                    return Err(Error::InvalidConfiguration(format!(
                        "half-edge {x} appears in two pairs"
                    )));
                }
            }
            pairing[a as usize] = b;
            pairing[b as usize] = a;
        }
        if let Some(x) = pairing.iter().position(|&y| y == HalfEdge::MAX) {
            return Err(Error::InvalidConfiguration(format!(
                "half-edge {x} is unpaired"
            )));
        }
        Self::from_pairing(pairing)
    }

    pub(crate) fn from_pairing_unchecked(pairing: Vec<HalfEdge>) -> Self {
        debug_assert!(Self::from_pairing(pairing.clone()).is_ok());
        Self { pairing }
    }

    pub fn pairing(&self) -> &[HalfEdge] {
        &self.pairing
    }

    pub fn into_pairing(self) -> Vec<HalfEdge> {
        self.pairing
    }

    /// Number of half-edges.
    pub fn len(&self) -> usize {
        self.pairing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairing.is_empty()
    }

    pub fn m(&self) -> usize {
        self.pairing.len() / 2
    }

    /// Checked partner lookup.
    pub fn pair_of(&self, x: u64) -> Result<HalfEdge> {
        if x < self.pairing.len() as u64 {
            Ok(self.pairing[x as usize])
        } else {
            Err(Error::HalfEdgeOutOfRange {
                index: x,
                len: self.pairing.len(),
            })
        }
    }

    #[inline]
    pub fn partner(&self, x: HalfEdge) -> HalfEdge {
        self.pairing[x as usize]
    }

    #[inline]
    pub(crate) fn pair(&mut self, a: HalfEdge, b: HalfEdge) {
        self.pairing[a as usize] = b;
        self.pairing[b as usize] = a;
    }

    /// Edges as `(x, η(x))` with `x < η(x)`, in increasing order of `x`.
    pub fn edges(&self) -> impl Iterator<Item = (HalfEdge, HalfEdge)> + '_ {
        self.pairing
            .iter()
            .enumerate()
            .filter(|(x, &y)| (*x as HalfEdge) < y)
            .map(|(x, &y)| (x as HalfEdge, y))
    }

    /// Sorted list of `(min, max)` pairs; equal for equal configurations.
    pub fn canonical_edges(&self) -> Vec<(HalfEdge, HalfEdge)> {
        self.edges().collect()
    }

    /// Checks that the configuration lives on the half-edges of `seq`.
    pub fn check_fits(&self, seq: &DegreeSequence) -> Result<()> {
        if self.len() != seq.ell() {
            return Err(Error::SizeMismatch {
                left: self.len(),
                right: seq.ell(),
            });
        }
        Ok(())
    }
}

/// Uniform perfect matching of the items `0..n` (`n` even).
///
/// Repeatedly pairs the lowest unpaired item with an item drawn uniformly from
/// the remaining unpaired ones. The unpaired pool is kept as an array with
/// swap-removal so each draw is O(1).
pub(crate) fn uniform_pairing<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    mut emit: impl FnMut(usize, usize),
) {
    debug_assert!(n % 2 == 0);
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut pos: Vec<u32> = (0..n as u32).collect();
    let remove = |pool: &mut Vec<u32>, pos: &mut Vec<u32>, item: u32| {
        let i = pos[item as usize] as usize;
        let last = pool.pop().expect("pool is non-empty");
        if last != item {
            pool[i] = last;
            pos[last as usize] = i as u32;
        }
    };
    let mut paired = alloc::vec![false; n];
    let mut cursor = 0usize;
    while !pool.is_empty() {
        while paired[cursor] {
            cursor += 1;
        }
        let a = cursor as u32;
        remove(&mut pool, &mut pos, a);
        let b = pool[rng.random_range(0..pool.len())];
        remove(&mut pool, &mut pos, b);
        paired[a as usize] = true;
        paired[b as usize] = true;
        emit(a as usize, b as usize);
    }
}

/// Draws a configuration uniformly from all `(ell - 1)!!` pairings.
pub fn sample_configuration<R: Rng + ?Sized>(seq: &DegreeSequence, rng: &mut R) -> Configuration {
    let ell = seq.ell();
    let mut pairing = alloc::vec![0 as HalfEdge; ell];
    uniform_pairing(ell, rng, |a, b| {
        pairing[a] = b as HalfEdge;
        pairing[b] = a as HalfEdge;
    });
    Configuration::from_pairing_unchecked(pairing)
}

/// Number of edges of `a` that are not edges of `b`.
pub fn hamming(a: &Configuration, b: &Configuration) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.edges().filter(|&(x, y)| b.partner(x) != y).count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MultigraphStats {
    pub self_loops: usize,
    /// Edges beyond the first between each pair of distinct vertices.
    pub multi_edge_excess: usize,
}

pub fn multigraph_stats(c: &Configuration, seq: &DegreeSequence) -> MultigraphStats {
    let mut self_loops = 0;
    let mut keys: Vec<u64> = Vec::with_capacity(c.m());
    for (x, y) in c.edges() {
        let (v, w) = (seq.owner(x), seq.owner(y));
        if v == w {
            self_loops += 1;
        } else {
            let (lo, hi) = if v < w { (v, w) } else { (w, v) };
            keys.push(((lo as u64) << 32) | hi as u64);
        }
    }
    keys.sort_unstable();
    let multi_edge_excess = keys.windows(2).filter(|w| w[0] == w[1]).count();
    MultigraphStats {
        self_loops,
        multi_edge_excess,
    }
}

pub(crate) fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, r: u64) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut c: u128 = 1;
    for i in 1..=r as u128 {
        c = c.checked_mul(n as u128 - r as u128 + i)? / i;
    }
    Some(c)
}

/// `(2k - 1)!! = 1 * 3 * ... * (2k - 1)`, the number of pairings of `2k` items.
pub fn pairings_count(k: u64) -> Option<u128> {
    (1..=k).try_fold(1u128, |acc, j| acc.checked_mul(2 * j as u128 - 1))
}

/// One-step rewiring probability between configurations at Hamming distance
/// `d`, as a reduced fraction `(numerator, denominator)`.
pub fn q_rational(m: usize, k: usize, d: usize) -> Result<(u128, u128)> {
    if k < 2 || k > m {
        return Err(Error::KOutOfRange { k, m });
    }
    if d > k {
        return Ok((0, 1));
    }
    let overflow = || Error::Overflow("rewiring kernel");
    let num = binomial((m - d) as u64, (k - d) as u64).ok_or_else(overflow)?;
    let den = pairings_count(k as u64)
        .and_then(|p| p.checked_mul(binomial(m as u64, k as u64)?))
        .ok_or_else(overflow)?;
    let g = gcd(num, den);
    Ok((num / g, den / g))
}

/// Probability that one `k`-edge rewiring step turns `a` into `b`.
pub fn q_probability(a: &Configuration, b: &Configuration, k: usize) -> Result<f64> {
    let d = hamming(a, b)?;
    let (num, den) = q_rational(a.m(), k, d)?;
    Ok(num as f64 / den as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn conf(pairs: &[(u32, u32)]) -> Configuration {
        Configuration::from_pairs(pairs.len() * 2, pairs).unwrap()
    }

    #[test]
    fn rejects_bad_pairings() {
        assert!(Configuration::from_pairing(alloc::vec![1, 0]).is_ok());
        assert!(Configuration::from_pairing(alloc::vec![0, 1]).is_err());
        assert!(Configuration::from_pairing(alloc::vec![1, 2, 0, 3]).is_err());
        assert!(Configuration::from_pairing(alloc::vec![1, 5]).is_err());
        assert!(Configuration::from_pairs(4, &[(0, 1), (1, 2)]).is_err());
        assert!(Configuration::from_pairs(4, &[(0, 1)]).is_err());
    }

    #[test]
    fn two_half_edges_have_one_pairing() {
        let seq = DegreeSequence::new(alloc::vec![2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = sample_configuration(&seq, &mut rng);
        assert_eq!(c.pairing(), &[1, 0]);
    }

    #[test]
    fn pair_of_checks_range() {
        let c = conf(&[(0, 1)]);
        assert_eq!(c.pair_of(0), Ok(1));
        assert_eq!(c.pair_of(c.pair_of(1).unwrap() as u64), Ok(1));
        assert!(matches!(
            c.pair_of(2),
            Err(Error::HalfEdgeOutOfRange { .. })
        ));
    }

    #[test]
    fn hamming_examples() {
        let a = conf(&[(0, 1), (2, 3)]);
        let b = conf(&[(0, 2), (1, 3)]);
        assert_eq!(hamming(&a, &a), Ok(0));
        assert_eq!(hamming(&a, &b), Ok(2));
        assert_eq!(hamming(&b, &a), Ok(2));
        let c = conf(&[(0, 1), (2, 3), (4, 5)]);
        assert!(matches!(hamming(&a, &c), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn multigraph_counts() {
        // two vertices of degree 2, both edges between them
        let seq = DegreeSequence::parse("2 2").unwrap();
        let c = conf(&[(0, 2), (1, 3)]);
        assert_eq!(
            multigraph_stats(&c, &seq),
            MultigraphStats {
                self_loops: 0,
                multi_edge_excess: 1
            }
        );
        let c = conf(&[(0, 1), (2, 3)]);
        assert_eq!(multigraph_stats(&c, &seq).self_loops, 2);
        // triangle on three degree-2 vertices is simple
        let seq = DegreeSequence::parse("2 2 2").unwrap();
        let c = conf(&[(1, 2), (3, 4), (5, 0)]);
        assert_eq!(multigraph_stats(&c, &seq), MultigraphStats::default());
    }

    #[test]
    fn kernel_values() {
        let a = conf(&[(0, 1), (2, 3)]);
        assert!((q_probability(&a, &a, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let b = conf(&[(0, 2), (1, 3)]);
        assert!((q_probability(&a, &b, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            q_probability(&a, &a, 3),
            Err(Error::KOutOfRange { k: 3, m: 2 })
        ));
        assert!(matches!(
            q_probability(&a, &a, 1),
            Err(Error::KOutOfRange { .. })
        ));
        // distance 3 with k = 2 is unreachable
        let x = conf(&[(0, 1), (2, 3), (4, 5)]);
        let y = conf(&[(1, 2), (3, 4), (5, 0)]);
        assert_eq!(hamming(&x, &y), Ok(3));
        assert_eq!(q_probability(&x, &y, 2), Ok(0.0));
        assert!(matches!(q_rational(400, 200, 0), Err(Error::Overflow(_))));
    }

    #[test]
    fn binomials_and_double_factorials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(60, 30), Some(118264581564861424));
        assert_eq!(pairings_count(3), Some(15));
        assert_eq!(pairings_count(5), Some(945));
        assert_eq!(pairings_count(0), Some(1));
    }
}
