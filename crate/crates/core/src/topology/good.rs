use alloc::vec::Vec;

use hashbrown::HashSet;
use rand::Rng;

use crate::config::Configuration;
use crate::degrees::{DegreeSequence, HalfEdge};
use crate::error::{Error, Result};
use crate::stats::binomial_se;

use super::ball::{is_tree_ball_in, tree_half_edges_in};
use super::revealed::{PairingSource, RevealedConfiguration};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodTupleEstimate {
    pub good: u64,
    pub samples: u64,
    pub density: f64,
    pub se: f64,
}

/// Radii of the balls attached to a tuple: segment `i` starts at `x_{i-1}` and
/// has length `t_i - t_{i-1}`, the last ball around `x_r` has radius `t - t_r`.
fn radii(jumps: &[usize], t: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(jumps.len() + 1);
    let mut prev = 0;
    for &j in jumps {
        out.push((j - prev) as u32);
        prev = j;
    }
    out.push((t - prev) as u32);
    out
}

/// Whether every ball of the tuple is a tree and no two share a half-edge.
pub fn is_good_tuple(
    c: &Configuration,
    seq: &DegreeSequence,
    tuple: &[HalfEdge],
    jumps: &[usize],
    t: usize,
) -> bool {
    is_good_tuple_in(&mut { c }, seq, tuple, jumps, t)
}

pub fn is_good_tuple_in<P: PairingSource>(
    c: &mut P,
    seq: &DegreeSequence,
    tuple: &[HalfEdge],
    jumps: &[usize],
    t: usize,
) -> bool {
    debug_assert_eq!(tuple.len(), jumps.len() + 1);
    let mut seen: HashSet<HalfEdge> = HashSet::new();
    for (&x, r) in tuple.iter().zip(radii(jumps, t)) {
        if !is_tree_ball_in(c, seq, x, r) {
            return false;
        }
        for h in tree_half_edges_in(c, seq, x, r) {
            if !seen.insert(h) {
                return false;
            }
        }
    }
    true
}

fn check_tuple_args(seq: &DegreeSequence, jumps: &[usize], t: usize) -> Result<()> {
    let limit = (usize::BITS - (seq.n() - 1).leading_zeros()) as usize;
    if t > limit {
        return Err(Error::ScaleGuard {
            what: "radius",
            size: t,
            limit,
        });
    }
    if jumps.windows(2).any(|w| w[0] >= w[1]) || jumps.iter().any(|&j| j == 0 || j > t) {
        return Err(Error::InvalidSpec(
            "jump positions must increase within [1, t]".into(),
        ));
    }
    Ok(())
}

fn estimate(good: u64, samples: u64) -> GoodTupleEstimate {
    GoodTupleEstimate {
        good,
        samples,
        density: good as f64 / samples.max(1) as f64,
        se: binomial_se(good, samples),
    }
}

/// Fraction of uniformly drawn `(|jumps| + 1)`-tuples that are good in `c`.
pub fn good_tuple_density<R: Rng + ?Sized>(
    c: &Configuration,
    seq: &DegreeSequence,
    jumps: &[usize],
    t: usize,
    samples: u64,
    rng: &mut R,
) -> Result<GoodTupleEstimate> {
    c.check_fits(seq)?;
    check_tuple_args(seq, jumps, t)?;
    let ell = seq.ell() as HalfEdge;
    let mut tuple = alloc::vec![0; jumps.len() + 1];
    let mut good = 0;
    for _ in 0..samples {
        tuple.iter_mut().for_each(|x| *x = rng.random_range(0..ell));
        good += is_good_tuple(c, seq, &tuple, jumps, t) as u64;
    }
    Ok(estimate(good, samples))
}

/// Fraction of good tuples over independent draws of a uniform configuration
/// and a uniform tuple, revealing only the pairs the check looks at.
pub fn good_tuple_density_uniform<R: Rng + ?Sized>(
    seq: &DegreeSequence,
    jumps: &[usize],
    t: usize,
    samples: u64,
    rng: &mut R,
) -> Result<GoodTupleEstimate> {
    check_tuple_args(seq, jumps, t)?;
    let ell = seq.ell() as HalfEdge;
    let mut tuple = alloc::vec![0; jumps.len() + 1];
    let mut good = 0;
    for _ in 0..samples {
        tuple.iter_mut().for_each(|x| *x = rng.random_range(0..ell));
        let mut c = RevealedConfiguration::new(seq.ell(), &mut *rng);
        good += is_good_tuple_in(&mut c, seq, &tuple, jumps, t) as u64;
    }
    Ok(estimate(good, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::sample_configuration;
    use crate::topology::is_tree_ball;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radii_follow_segments() {
        assert_eq!(radii(&[], 5), [5]);
        assert_eq!(radii(&[2, 4], 5), [2, 2, 1]);
        assert_eq!(radii(&[1, 8], 8), [1, 7, 0]);
    }

    #[test]
    fn empty_jumps_is_the_tree_rate() {
        let seq = DegreeSequence::make_regular(200, 3).unwrap();
        let c = sample_configuration(&seq, &mut ChaCha8Rng::seed_from_u64(1));
        let est =
            good_tuple_density(&c, &seq, &[], 5, 2000, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trees = (0..2000)
            .filter(|_| is_tree_ball(&c, &seq, rng.random_range(0..600), 5))
            .count() as u64;
        assert_eq!(est.good, trees);
    }

    #[test]
    fn revealed_and_frozen_densities_agree() {
        let seq = DegreeSequence::make_regular(60, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 20_000;
        let lazy = good_tuple_density_uniform(&seq, &[2], 4, n, &mut rng).unwrap();
        let good: u64 = (0..n / 100)
            .map(|_| {
                let c = sample_configuration(&seq, &mut rng);
                good_tuple_density(&c, &seq, &[2], 4, 100, &mut rng)
                    .unwrap()
                    .good
            })
            .sum();
        let z = crate::stats::two_proportion_z(lazy.good, n, good, n);
        assert!(z.abs() < 4.0, "{} vs {good}", lazy.good);
        assert!(lazy.density > 0.05 && lazy.density < 0.95);
    }

    #[test]
    fn overlapping_tuple_is_bad() {
        let seq = DegreeSequence::make_regular(200, 3).unwrap();
        let c = sample_configuration(&seq, &mut ChaCha8Rng::seed_from_u64(3));
        assert!(!is_good_tuple(&c, &seq, &[7, 7], &[1], 2));
    }

    #[test]
    fn radius_guard() {
        let seq = DegreeSequence::make_regular(16, 3).unwrap();
        let c = sample_configuration(&seq, &mut ChaCha8Rng::seed_from_u64(4));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(good_tuple_density(&c, &seq, &[], 4, 10, &mut rng).is_ok());
        assert!(good_tuple_density(&c, &seq, &[], 5, 10, &mut rng).is_err());
        assert!(good_tuple_density(&c, &seq, &[3, 2], 4, 10, &mut rng).is_err());
    }
}
