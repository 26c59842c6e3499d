use alloc::vec::Vec;

use rand::Rng;

use crate::degrees::{DegreeSequence, HalfEdge};
use crate::error::{Error, Result};
use crate::stats::binomial_se;

use super::ball::ball_profile_in;
use super::good::good_tuple_density_uniform;
use super::revealed::RevealedConfiguration;

/// Neighbourhood statistics at one radius over uniform `(eta, x)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub t: usize,
    pub mean_ball_size: f64,
    pub ball_size_se: f64,
    /// `nu^(t + 1)`.
    pub nu_power_prediction: f64,
    pub tree_fraction: f64,
    pub tree_fraction_se: f64,
    /// Good-tuple density for the jumps of [`diagnostic_jumps`]; NaN for `t < 2`.
    pub good_density: f64,
    pub good_se: f64,
}

/// Two jump positions splitting `0..t` into near-equal thirds.
pub fn diagnostic_jumps(t: usize) -> Vec<usize> {
    let mut j = alloc::vec![t.div_ceil(3).max(1), (2 * t).div_ceil(3)];
    j.dedup();
    j
}

/// Ball sizes, tree fractions and good-tuple densities for `t = 0..=t_max`.
/// Every sample draws a fresh uniform configuration, revealed only as far
/// as the checks need.
pub fn topology_diagnostics<R: Rng + ?Sized>(
    seq: &DegreeSequence,
    t_max: usize,
    samples: u64,
    rng: &mut R,
) -> Result<Vec<DiagnosticsRow>> {
    let limit = (usize::BITS - (seq.n() - 1).leading_zeros()) as usize;
    if t_max > limit {
        return Err(Error::ScaleGuard {
            what: "radius",
            size: t_max,
            limit,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidSpec("samples must be at least 1".into()));
    }
    let ell = seq.ell() as HalfEdge;
    let mut sum = alloc::vec![0.0f64; t_max + 1];
    let mut sum_sq = alloc::vec![0.0f64; t_max + 1];
    let mut trees = alloc::vec![0u64; t_max + 1];
    for _ in 0..samples {
        let x = rng.random_range(0..ell);
        let mut c = RevealedConfiguration::new(seq.ell(), &mut *rng);
        let profile = ball_profile_in(&mut c, seq, x, t_max as u32);
        for t in 0..=t_max {
            let b = profile.sizes[t] as f64;
            sum[t] += b;
            sum_sq[t] += b * b;
            trees[t] += (profile.tree_radius as usize >= t) as u64;
        }
    }
    let nu = seq.regularity().nu;
    let n = samples as f64;
    let mut rows = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mean = sum[t] / n;
        let var = if samples > 1 {
            ((sum_sq[t] - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let (good_density, good_se) = if t >= 2 {
            let g = good_tuple_density_uniform(seq, &diagnostic_jumps(t), t, samples, rng)?;
            (g.density, g.se)
        } else {
            (f64::NAN, f64::NAN)
        };
        rows.push(DiagnosticsRow {
            t,
            mean_ball_size: mean,
            ball_size_se: libm::sqrt(var / n),
            nu_power_prediction: libm::pow(nu, t as f64 + 1.0),
            tree_fraction: trees[t] as f64 / n,
            tree_fraction_se: binomial_se(trees[t], samples),
            good_density,
            good_se,
        });
    }
    Ok(rows)
}
