//! Exact computations on the full configuration space at tiny scale.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::config::{q_rational, Configuration};
use crate::degrees::{DegreeSequence, HalfEdge};
use crate::dynamics::check_k;
use crate::error::{Error, Result};

/// Default largest `ell` for configuration-space enumeration.
pub const CONF_SPACE_LIMIT: usize = 10;
/// Largest horizon for [`exact_walk_distribution`].
pub const WALK_HORIZON_LIMIT: usize = 12;
/// Largest `m` for [`exact_tau_tail`].
pub const TAU_EDGE_LIMIT: usize = 4;
/// Largest horizon for [`exact_tau_tail`].
pub const TAU_HORIZON_LIMIT: usize = 4;

fn guard(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::ScaleGuard { what, size, limit })
    } else {
        Ok(())
    }
}

/// Calls `emit` with every perfect matching of `items` as a list of pairs.
pub fn for_each_matching(items: &[HalfEdge], mut emit: impl FnMut(&[(HalfEdge, HalfEdge)])) {
    fn rec(
        rest: &mut Vec<HalfEdge>,
        acc: &mut Vec<(HalfEdge, HalfEdge)>,
        emit: &mut dyn FnMut(&[(HalfEdge, HalfEdge)]),
    ) {
        if rest.is_empty() {
            emit(acc);
            return;
        }
        let a = rest.remove(0);
        for i in 0..rest.len() {
            let b = rest.remove(i);
            acc.push((a, b));
            rec(rest, acc, emit);
            acc.pop();
            rest.insert(i, b);
        }
        rest.insert(0, a);
    }
    debug_assert!(items.len() % 2 == 0);
    rec(&mut items.to_vec(), &mut Vec::new(), &mut emit);
}

/// All configurations on a half-edge set, in a fixed canonical order.
#[derive(Debug, Clone)]
pub struct ConfSpace {
    configurations: Vec<Configuration>,
    index: HashMap<Vec<HalfEdge>, usize>,
    ell: usize,
}

impl ConfSpace {
    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configurations
    }

    pub fn get(&self, i: usize) -> &Configuration {
        &self.configurations[i]
    }

    pub fn index_of(&self, c: &Configuration) -> Option<usize> {
        self.index.get(c.pairing()).copied()
    }
}

pub fn enumerate_configurations(seq: &DegreeSequence) -> Result<ConfSpace> {
    enumerate_configurations_with_limit(seq, CONF_SPACE_LIMIT)
}

pub fn enumerate_configurations_with_limit(
    seq: &DegreeSequence,
    limit: usize,
) -> Result<ConfSpace> {
    let ell = seq.ell();
    guard("ell", ell, limit)?;
    let items: Vec<HalfEdge> = (0..ell as HalfEdge).collect();
    let mut configurations = Vec::new();
    for_each_matching(&items, |pairs| {
        configurations.push(Configuration::from_pairs(ell, pairs).expect("perfect matching"));
    });
    let index = configurations
        .iter()
        .enumerate()
        .map(|(i, c)| (c.pairing().to_vec(), i))
        .collect();
    Ok(ConfSpace {
        configurations,
        index,
        ell,
    })
}

/// Dense one-step rewiring kernel over `space`.
pub fn exact_q_matrix(space: &ConfSpace, k: usize) -> Result<Vec<Vec<f64>>> {
    let m = space.ell / 2;
    check_k(k, m)?;
    // Q depends on the pair only through the Hamming distance
    let by_distance: Vec<f64> = (0..=m)
        .map(|d| q_rational(m, k, d).map(|(a, b)| a as f64 / b as f64))
        .collect::<Result<_>>()?;
    let n = space.len();
    let mut q = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let d = crate::config::hamming(space.get(i), space.get(j))?;
            q[i][j] = by_distance[d];
            q[j][i] = by_distance[d];
        }
    }
    Ok(q)
}

fn check_start(
    space: &ConfSpace,
    seq: &DegreeSequence,
    eta: &Configuration,
    x0: HalfEdge,
) -> Result<usize> {
    eta.check_fits(seq)?;
    seq.check_half_edge(x0 as u64)?;
    if space.ell != seq.ell() {
        return Err(Error::SizeMismatch {
            left: space.ell,
            right: seq.ell(),
        });
    }
    space
        .index_of(eta)
        .ok_or_else(|| Error::InvalidConfiguration("not in the enumerated space".into()))
}

/// Law of `X_t` for `t = 0..=horizon` under the joint chain started at `(eta, x0)`.
pub fn exact_walk_distributions(
    space: &ConfSpace,
    seq: &DegreeSequence,
    eta: &Configuration,
    x0: HalfEdge,
    k: usize,
    horizon: usize,
) -> Result<Vec<Vec<f64>>> {
    guard("horizon", horizon, WALK_HORIZON_LIMIT)?;
    let start = check_start(space, seq, eta, x0)?;
    let q = exact_q_matrix(space, k)?;
    let (n, ell) = (space.len(), space.ell);
    let mut joint = alloc::vec![alloc::vec![0.0; ell]; n];
    joint[start][x0 as usize] = 1.0;
    let marginal = |joint: &Vec<Vec<f64>>| -> Vec<f64> {
        (0..ell)
            .map(|x| joint.iter().map(|row| row[x]).sum())
            .collect()
    };
    let mut laws = alloc::vec![marginal(&joint)];
    for _ in 0..horizon {
        // rewire: mixed[c'][x] = sum_c joint[c][x] Q[c][c']
        let mut mixed = alloc::vec![alloc::vec![0.0; ell]; n];
        for (c, row) in joint.iter().enumerate() {
            if row.iter().all(|&v| v == 0.0) {
                continue;
            }
            for (c2, target) in mixed.iter_mut().enumerate() {
                let w = q[c][c2];
                if w == 0.0 {
                    continue;
                }
                for x in 0..ell {
                    target[x] += w * row[x];
                }
            }
        }
        // move under the new configuration
        let mut next = alloc::vec![alloc::vec![0.0; ell]; n];
        for (c2, row) in mixed.iter().enumerate() {
            let conf = space.get(c2);
            for x in 0..ell {
                if row[x] == 0.0 {
                    continue;
                }
                let z = conf.partner(x as HalfEdge);
                let w = row[x] / seq.deg(z) as f64;
                for y in seq.siblings(z) {
                    next[c2][y as usize] += w;
                }
            }
        }
        joint = next;
        laws.push(marginal(&joint));
    }
    Ok(laws)
}

/// Law of `X_t` under the joint chain started at `(eta, x0)`.
pub fn exact_walk_distribution(
    space: &ConfSpace,
    seq: &DegreeSequence,
    eta: &Configuration,
    x0: HalfEdge,
    k: usize,
    t: usize,
) -> Result<Vec<f64>> {
    let mut laws = exact_walk_distributions(space, seq, eta, x0, k, t)?;
    Ok(laws.pop().expect("at least the t = 0 law"))
}

/// Total variation distance of `p` from the uniform law.
pub fn tv_from_uniform(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * p.iter().map(|&v| libm::fabs(v - u)).sum::<f64>()
}

pub fn exact_tv(
    space: &ConfSpace,
    seq: &DegreeSequence,
    eta: &Configuration,
    x0: HalfEdge,
    k: usize,
    t: usize,
) -> Result<f64> {
    Ok(tv_from_uniform(&exact_walk_distribution(
        space, seq, eta, x0, k, t,
    )?))
}

/// Exact survival function of `tau` together with the unstopped mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TauProfile {
    /// `P(tau > t)` for `t = 0..=horizon`.
    pub survival: Vec<f64>,
    /// `P(X_t = y, tau > t)` for `t = 0..=horizon`.
    pub unstopped: Vec<Vec<f64>>,
}

/// Enumerates every rewiring choice and walk move, merging identical
/// `(configuration, position, rewired set)` states between steps.
pub fn exact_tau_profile(
    seq: &DegreeSequence,
    eta: &Configuration,
    x0: HalfEdge,
    k: usize,
    horizon: usize,
) -> Result<TauProfile> {
    eta.check_fits(seq)?;
    seq.check_half_edge(x0 as u64)?;
    let m = eta.m();
    guard("m", m, TAU_EDGE_LIMIT)?;
    guard("horizon", horizon, TAU_HORIZON_LIMIT)?;
    check_k(k, m)?;
    let ell = eta.len();
    let subsets = crate::config::binomial(m as u64, k as u64).ok_or(Error::Overflow("binomial"))?;
    let matchings =
        crate::config::pairings_count(k as u64).ok_or(Error::Overflow("double factorial"))?;
    let choice_weight = 1.0 / (subsets as f64 * matchings as f64);

    type State = (Vec<HalfEdge>, HalfEdge, u32);
    let mut states: HashMap<State, f64> = HashMap::new();
    states.insert((eta.pairing().to_vec(), x0, 0), 1.0);
    let mut survival = alloc::vec![1.0];
    let mut point = alloc::vec![0.0; ell];
    point[x0 as usize] = 1.0;
    let mut unstopped = alloc::vec![point];

    for _ in 0..horizon {
        let mut next: HashMap<State, f64> = HashMap::new();
        for ((pairing, x, mask), mass) in &states {
            let conf = Configuration::from_pairing(pairing.clone())?;
            let edges: Vec<(HalfEdge, HalfEdge)> = conf.edges().collect();
            for_each_subset(m, k, |subset| {
                let mut rewired: Vec<HalfEdge> = subset
                    .iter()
                    .flat_map(|&e| [edges[e].0, edges[e].1])
                    .collect();
                rewired.sort_unstable();
                let new_mask = rewired.iter().fold(*mask, |acc, &h| acc | (1 << h));
                if new_mask & (1 << x) != 0 {
                    return; // tau is this step
                }
                for_each_matching(&rewired, |pairs| {
                    let mut p = pairing.clone();
                    for &(a, b) in pairs {
                        p[a as usize] = b;
                        p[b as usize] = a;
                    }
                    let z = p[*x as usize];
                    let w = mass * choice_weight / seq.deg(z) as f64;
                    for y in seq.siblings(z) {
                        *next.entry((p.clone(), y, new_mask)).or_insert(0.0) += w;
                    }
                });
            });
        }
        states = next;
        let mut law = alloc::vec![0.0; ell];
        for ((_, y, _), mass) in &states {
            law[*y as usize] += mass;
        }
        survival.push(law.iter().sum());
        unstopped.push(law);
    }
    Ok(TauProfile {
        survival,
        unstopped,
    })
}

/// `P(tau > t)` for the joint chain started at `(eta, x0)`.
pub fn exact_tau_tail(
    seq: &DegreeSequence,
    eta: &Configuration,
    x0: HalfEdge,
    k: usize,
    t: usize,
) -> Result<f64> {
    Ok(exact_tau_profile(seq, eta, x0, k, t)?.survival[t])
}

fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
