//! Non-backtracking walk on half-edges and the joint (graph, walk) chain.
//!
//! One step of the joint chain rewires first and then moves the walker under
//! the new configuration. The stopping time is
//! `tau = min { t : X_{t-1} in R_{<=t} }`.

use alloc::vec::Vec;

use rand::Rng;

use crate::config::Configuration;
use crate::degrees::{DegreeSequence, HalfEdge};
use crate::dynamics::{check_k, rewire_in_place, RewiringTrace};
use crate::error::{Error, Result};

/// Largest `ell` for which [`transition_matrix`] builds a dense matrix.
pub const TRANSITION_MATRIX_LIMIT: usize = 2048;

/// Moves from `x` to a uniform sibling of `eta(x)`.
#[inline]
pub fn walk_step<R: Rng + ?Sized>(
    c: &Configuration,
    seq: &DegreeSequence,
    x: HalfEdge,
    rng: &mut R,
) -> HalfEdge {
    let z = c.partner(x);
    let r = rng.random_range(0..seq.deg(z));
    seq.sibling(z, r)
}

/// Dense `P_eta`, row `x` is the law of the next position from `x`.
pub fn transition_matrix(c: &Configuration, seq: &DegreeSequence) -> Result<Vec<Vec<f64>>> {
    c.check_fits(seq)?;
    let ell = c.len();
    if ell > TRANSITION_MATRIX_LIMIT {
        return Err(Error::ScaleGuard {
            what: "ell",
            size: ell,
            limit: TRANSITION_MATRIX_LIMIT,
        });
    }
    let mut p = alloc::vec![alloc::vec![0.0; ell]; ell];
    for x in 0..ell as HalfEdge {
        let z = c.partner(x);
        let w = 1.0 / seq.deg(z) as f64;
        for y in seq.siblings(z) {
            p[x as usize][y as usize] += w;
        }
    }
    Ok(p)
}

/// State of the joint chain `(C_t, X_t)` together with its rewiring history.
#[derive(Debug, Clone)]
pub struct JointChain {
    config: Configuration,
    position: HalfEdge,
    k: usize,
    trace: RewiringTrace,
    tau: Option<usize>,
}

impl JointChain {
    pub fn new(seq: &DegreeSequence, eta: Configuration, x0: HalfEdge, k: usize) -> Result<Self> {
        eta.check_fits(seq)?;
        seq.check_half_edge(x0 as u64)?;
        check_k(k, eta.m())?;
        let trace = RewiringTrace::new(eta.len());
        Ok(Self {
            config: eta,
            position: x0,
            k,
            trace,
            tau: None,
        })
    }

    /// Rewire, record whether the pre-move position was ever rewired, move.
    pub fn step<R: Rng + ?Sized>(&mut self, seq: &DegreeSequence, rng: &mut R) {
        let mut rewired = Vec::with_capacity(2 * self.k);
        rewire_in_place(&mut self.config, self.k, rng, &mut rewired)
            .expect("k validated at construction");
        self.trace.push(rewired);
        if self.tau.is_none() && self.trace.in_cumulative(self.position) {
            self.tau = Some(self.trace.steps());
        }
        self.position = walk_step(&self.config, seq, self.position, rng);
    }

    pub fn t(&self) -> usize {
        self.trace.steps()
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn position(&self) -> HalfEdge {
        self.position
    }

    pub fn tau(&self) -> Option<usize> {
        self.tau
    }

    pub fn trace(&self) -> &RewiringTrace {
        &self.trace
    }
}

/// A sampled run of the joint chain.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTrajectory {
    /// `X_0, ..., X_T`.
    pub positions: Vec<HalfEdge>,
    pub tau: Option<usize>,
    pub trace: RewiringTrace,
    /// `C_T`.
    pub final_config: Configuration,
}

pub fn run_joint<R: Rng + ?Sized>(
    seq: &DegreeSequence,
    eta: &Configuration,
    x0: HalfEdge,
    k: usize,
    steps: usize,
    rng: &mut R,
) -> Result<JointTrajectory> {
    let mut chain = JointChain::new(seq, eta.clone(), x0, k)?;
    let mut positions = Vec::with_capacity(steps + 1);
    positions.push(x0);
    for _ in 0..steps {
        chain.step(seq, rng);
        positions.push(chain.position());
    }
    Ok(JointTrajectory {
        positions,
        tau: chain.tau,
        trace: chain.trace,
        final_config: chain.config,
    })
}

/// Recomputes `tau` from positions and the per-step sets alone.
pub fn rescan_tau(positions: &[HalfEdge], trace: &RewiringTrace) -> Option<usize> {
    let steps = trace.steps().min(positions.len().saturating_sub(1));
    (1..=steps).find(|&t| {
        let x = positions[t - 1];
        trace.per_step()[..t].iter().any(|r| r.contains(&x))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::sample_configuration;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn step_lands_on_sibling_of_partner() {
        let seq = DegreeSequence::parse("2 3 3 4 2 4").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = sample_configuration(&seq, &mut rng);
        for x in 0..seq.ell() as u32 {
            for _ in 0..20 {
                let y = walk_step(&c, &seq, x, &mut rng);
                assert!(seq.are_siblings(y, c.partner(x)));
            }
        }
    }

    #[test]
    fn degree_two_is_deterministic() {
        let seq = DegreeSequence::make_regular(3, 2).unwrap();
        let c = Configuration::from_pairs(6, &[(1, 2), (3, 4), (5, 0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            assert_eq!(walk_step(&c, &seq, 1, &mut rng), 3);
        }
    }

    #[test]
    fn matrix_is_doubly_stochastic_and_symmetric() {
        let seq = DegreeSequence::parse("2 3 3 4").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let c = sample_configuration(&seq, &mut rng);
            let p = transition_matrix(&c, &seq).unwrap();
            let ell = seq.ell();
            for x in 0..ell {
                let row: f64 = p[x].iter().sum();
                let col: f64 = (0..ell).map(|y| p[y][x]).sum();
                assert!((row - 1.0).abs() < 1e-12 && (col - 1.0).abs() < 1e-12);
                for y in 0..ell {
                    let (ex, ey) = (c.partner(x as u32) as usize, c.partner(y as u32) as usize);
                    assert!((p[x][y] - p[ey][ex]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn full_rewiring_stops_at_one() {
        let seq = DegreeSequence::make_regular(6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = sample_configuration(&seq, &mut rng);
        let run = run_joint(&seq, &c, 0, 9, 5, &mut rng).unwrap();
        assert_eq!(run.tau, Some(1));
    }

    #[test]
    fn tau_matches_rescan() {
        let seq = DegreeSequence::make_regular(50, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let c = sample_configuration(&seq, &mut rng);
            let x0 = rng.random_range(0..150);
            let run = run_joint(&seq, &c, x0, 4, 30, &mut rng).unwrap();
            assert_eq!(run.positions.len(), 31);
            assert_eq!(run.tau, rescan_tau(&run.positions, &run.trace));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let seq = DegreeSequence::make_regular(4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = sample_configuration(&seq, &mut rng);
        assert!(run_joint(&seq, &c, 12, 2, 1, &mut rng).is_err());
        assert!(run_joint(&seq, &c, 0, 1, 1, &mut rng).is_err());
        let other = DegreeSequence::make_regular(2, 3).unwrap();
        assert!(run_joint(&other, &c, 0, 2, 1, &mut rng).is_err());
    }
}
