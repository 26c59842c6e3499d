use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;

use crate::config::{sample_configuration, Configuration};
use crate::deferred::{lazy_walk, LazyDynamics};
use crate::degrees::{DegreeSequence, HalfEdge};
use crate::dynamics::{alpha_to_k, check_k};
use crate::error::{Error, Result};
use crate::seeding::{domain, stream_rng};
use crate::walk::JointChain;

use super::theory::default_horizon;

/// How the per-step rewiring amount is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    Alpha(f64),
    K(usize),
}

/// Simulation backend for replicas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Reveals only the pairings the walker looks at.
    #[default]
    Lazy,
    /// Materialises the full configuration at every step.
    Eager,
}

/// Which curves the analysis fills in; disabled columns are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Curves {
    pub tv: bool,
    pub tau: bool,
    pub conditional: bool,
}

impl Default for Curves {
    fn default() -> Self {
        Self {
            tv: true,
            tau: true,
            conditional: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub k: usize,
    pub alpha_requested: Option<f64>,
    pub alpha_effective: f64,
    pub alpha_adjusted: bool,
    pub epsilon: f64,
    pub horizon: usize,
    pub replicas: u64,
    pub master_seed: u64,
    pub repetition: u64,
    pub engine: Engine,
    pub curves: Curves,
}

impl ExperimentSpec {
    /// Validates inputs; `horizon = None` selects three times the predicted mixing time.
    pub fn new(
        seq: &DegreeSequence,
        rate: Rate,
        epsilon: f64,
        horizon: Option<usize>,
        replicas: u64,
        master_seed: u64,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(epsilon));
        }
        if replicas == 0 {
            return Err(Error::InvalidSpec("replicas must be at least 1".into()));
        }
        let m = seq.m();
        let (k, alpha_requested, alpha_adjusted) = match rate {
            Rate::Alpha(a) => {
                let choice = alpha_to_k(seq, a)?;
                (choice.k, Some(a), choice.adjusted)
            }
            Rate::K(k) => {
                check_k(k, m)?;
                (k, None, false)
            }
        };
        let alpha_effective = k as f64 / m as f64;
        let horizon = match horizon {
            Some(0) => return Err(Error::InvalidSpec("horizon must be at least 1".into())),
            Some(h) => h,
            None => default_horizon(epsilon, alpha_effective)?,
        };
        Ok(Self {
            k,
            alpha_requested,
            alpha_effective,
            alpha_adjusted,
            epsilon,
            horizon,
            replicas,
            master_seed,
            repetition: 0,
            engine: Engine::default(),
            curves: Curves::default(),
        })
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_repetition(mut self, repetition: u64) -> Self {
        self.repetition = repetition;
        self
    }

    pub fn with_curves(mut self, curves: Curves) -> Self {
        self.curves = curves;
        self
    }
}

/// The shared starting point `(eta, x0)` of all replicas in a repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub eta: Configuration,
    pub x0: HalfEdge,
}

impl InitialCondition {
    pub fn new(seq: &DegreeSequence, eta: Configuration, x0: HalfEdge) -> Result<Self> {
        eta.check_fits(seq)?;
        seq.check_half_edge(x0 as u64)?;
        Ok(Self { eta, x0 })
    }

    /// Uniform configuration and uniform starting half-edge for `repetition`.
    pub fn draw(seq: &DegreeSequence, master_seed: u64, repetition: u64) -> Self {
        let mut rng = stream_rng(master_seed, domain::INITIAL_CONDITION, repetition, 0);
        let eta = sample_configuration(seq, &mut rng);
        let x0 = rng.random_range(0..seq.ell() as HalfEdge);
        Self { eta, x0 }
    }
}

/// Marker in [`ReplicaBatch::taus`] for runs with `tau > horizon`.
pub const NO_TAU: u32 = u32::MAX;

/// Per-replica outcomes, in replica order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicaBatch {
    pub horizon: usize,
    pub taus: Vec<u32>,
    /// `endpoints[i * horizon + t - 1] = X_t` of replica `i`.
    pub endpoints: Vec<HalfEdge>,
}

impl ReplicaBatch {
    pub fn empty(horizon: usize) -> Self {
        Self {
            horizon,
            taus: Vec::new(),
            endpoints: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn append(&mut self, mut other: ReplicaBatch) {
        assert_eq!(self.horizon, other.horizon);
        self.taus.append(&mut other.taus);
        self.endpoints.append(&mut other.endpoints);
    }

    /// `X_t` of replica `i`, with `X_0 = x0`.
    #[inline]
    pub fn position(&self, i: usize, t: usize, x0: HalfEdge) -> HalfEdge {
        if t == 0 {
            x0
        } else {
            self.endpoints[i * self.horizon + t - 1]
        }
    }

    /// Whether `tau <= t` for replica `i`.
    #[inline]
    pub fn stopped(&self, i: usize, t: usize) -> bool {
        self.taus[i] != NO_TAU && self.taus[i] as usize <= t
    }
}

/// Runs replicas `range` of the experiment. Replica `i` draws from its own
/// stream, so any partition of the replica indices gives the same outcomes.
pub fn simulate_replicas(
    seq: &DegreeSequence,
    init: &InitialCondition,
    spec: &ExperimentSpec,
    range: Range<u64>,
) -> Result<ReplicaBatch> {
    let horizon = spec.horizon;
    let count = (range.end - range.start) as usize;
    let mut batch = ReplicaBatch {
        horizon,
        taus: Vec::with_capacity(count),
        endpoints: Vec::with_capacity(count * horizon),
    };
    match spec.engine {
        Engine::Lazy => {
            let mut engine = LazyDynamics::new(seq, &init.eta, spec.k)?;
            for i in range {
                let mut rng = stream_rng(spec.master_seed, domain::REPLICA, spec.repetition, i);
                let tau = lazy_walk(&mut engine, seq, init.x0, horizon, &mut rng, |_, x| {
                    batch.endpoints.push(x)
                });
                batch.taus.push(tau.map_or(NO_TAU, |t| t as u32));
            }
        }
        Engine::Eager => {
            for i in range {
                let mut rng = stream_rng(spec.master_seed, domain::REPLICA, spec.repetition, i);
                let mut chain = JointChain::new(seq, init.eta.clone(), init.x0, spec.k)?;
                for _ in 0..horizon {
                    chain.step(seq, &mut rng);
                    batch.endpoints.push(chain.position());
                }
                batch.taus.push(chain.tau().map_or(NO_TAU, |t| t as u32));
            }
        }
    }
    Ok(batch)
}
