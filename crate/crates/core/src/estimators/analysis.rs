use alloc::string::String;
use alloc::vec::Vec;

use crate::degrees::{DegreeSequence, HalfEdge};
use crate::error::{Error, Result};
use crate::stats::{binomial_se, jackknife_se, wilson_interval};
use crate::topology::{distances_from, UNREACHED};

use super::experiment::{simulate_replicas, ExperimentSpec, InitialCondition, ReplicaBatch};
use super::theory::{theory_mixing_time, theory_tau_tail, tree_tau_tail};

/// Replicas per cell required before the plug-in TV estimator is used.
pub const PLUGIN_FACTOR: u64 = 20;
/// Contiguous replica groups for the jackknife.
pub const JACKKNIFE_GROUPS: usize = 20;
/// Normal quantile for Wilson intervals.
pub const WILSON_Z: f64 = 1.96;

/// How a conditional TV entry was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionalMode {
    /// Plug-in TV of the conditional endpoint law.
    Plugin,
    /// `sqrt(chi^2) / 2` with an unbiased chi-square estimate: an upper bound.
    ChiSquareBound,
    /// `P(X_t in B_t | tau > t) - |B_t| / ell`: exact up to `|B_t| / ell`.
    BallBound,
    /// Fewer than two replicas in the condition, or the curve was not requested.
    Unavailable,
}

impl ConditionalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Plugin => "plugin",
            Self::ChiSquareBound => "chi2_bound",
            Self::BallBound => "ball_bound",
            Self::Unavailable => "unavailable",
        }
    }
}

/// One row of the result table; NaN marks an unavailable value.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub t: usize,
    pub tv_plugin: f64,
    pub tv_plugin_se: f64,
    /// `P(tau > t) (1 - |B_t| / ell)`.
    pub tv_struct: f64,
    pub tv_struct_se: f64,
    pub tau_tail: f64,
    pub tau_tail_se: f64,
    pub tau_tail_lo: f64,
    pub tau_tail_hi: f64,
    pub tau_theory: f64,
    /// Exact tail when the walk's first `t` edges are distinct.
    pub tau_tree: f64,
    pub tv_stopped: f64,
    pub tv_stopped_se: f64,
    pub stopped_mode: ConditionalMode,
    pub stopped_count: u64,
    pub tv_unstopped: f64,
    pub tv_unstopped_se: f64,
    pub unstopped_mode: ConditionalMode,
    /// `P(X_t in B_t) - |B_t| / ell`, a lower bound on the TV distance.
    pub tv_lower: f64,
    /// `P(tau > t) + P(tau <= t) * tv_stopped`, an upper bound when the
    /// stopped entry is a plug-in value or a chi-square bound.
    pub tv_upper: f64,
    pub ball_size: usize,
    /// `t > ln n`, where the tail formula is no longer expected to hold.
    pub beyond_log_n: bool,
}

/// Which curve produced the reported mixing time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingSource {
    Plugin,
    Structural,
}

impl MixingSource {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Plugin => "plugin",
            Self::Structural => "structural",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingTimeEstimate {
    /// `None` means the horizon was exhausted.
    pub t_mix_hat: Option<usize>,
    pub source: MixingSource,
    /// First `t` at which the lower bound curve is at most `epsilon`.
    pub bracket_lo: Option<usize>,
    /// First `t` at which the upper bound curve is at most `epsilon`.
    pub bracket_hi: Option<usize>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultScalars {
    pub mixing: MixingTimeEstimate,
    pub t_mix_theory: f64,
    pub theory_degenerate: bool,
    pub alpha_requested: Option<f64>,
    pub alpha_effective: f64,
    pub alpha_adjusted: bool,
    pub k: usize,
    pub epsilon: f64,
    pub horizon: usize,
    pub replicas: u64,
    pub seed: u64,
    pub repetition: u64,
    pub x0: HalfEdge,
    pub plugin_available: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub scalars: ResultScalars,
}

/// Endpoint counts split into contiguous replica groups, stored cell-major.
struct Grouped {
    groups: usize,
    counts: Vec<u32>,
    totals: Vec<u64>,
    occupied: Vec<u32>,
    marked: Vec<bool>,
}

impl Grouped {
    fn new(groups: usize, ell: usize) -> Self {
        Self {
            groups,
            counts: alloc::vec![0; groups * ell],
            totals: alloc::vec![0; groups],
            occupied: Vec::new(),
            marked: alloc::vec![false; ell],
        }
    }

    fn clear(&mut self) {
        let g = self.groups;
        for &y in &self.occupied {
            let y = y as usize;
            self.counts[y * g..(y + 1) * g]
                .iter_mut()
                .for_each(|c| *c = 0);
            self.marked[y] = false;
        }
        self.occupied.clear();
        self.totals.iter_mut().for_each(|n| *n = 0);
    }

    #[inline]
    fn add(&mut self, group: usize, y: HalfEdge) {
        if !self.marked[y as usize] {
            self.marked[y as usize] = true;
            self.occupied.push(y);
        }
        self.counts[y as usize * self.groups + group] += 1;
        self.totals[group] += 1;
    }

    fn total(&self) -> u64 {
        self.totals.iter().sum()
    }

    /// Applies `stat(cell counts, total)` to the full sample and to every
    /// leave-one-group-out sample; returns the estimate and its jackknife SE.
    fn jackknife(
        &self,
        mut cell: impl FnMut(u64, u64) -> f64,
        finish: impl Fn(f64, u64) -> f64,
    ) -> (f64, f64) {
        let n = self.total();
        let g = self.groups;
        let usable: Vec<usize> = (0..g)
            .filter(|&j| self.totals[j] > 0 && self.totals[j] < n)
            .collect();
        let mut full = 0.0;
        let mut loo = alloc::vec![0.0; g];
        for &y in &self.occupied {
            let row = &self.counts[y as usize * g..(y as usize + 1) * g];
            let c: u64 = row.iter().map(|&v| v as u64).sum();
            full += cell(c, n);
            for &j in &usable {
                loo[j] += cell(c - row[j] as u64, n - self.totals[j]);
            }
        }
        let est = finish(full, n);
        let reps: Vec<f64> = usable
            .iter()
            .map(|&j| finish(loo[j], n - self.totals[j]))
            .collect();
        (est, jackknife_se(&reps))
    }

    fn plugin_tv(&self, ell: usize) -> (f64, f64) {
        let u = 1.0 / ell as f64;
        self.jackknife(
            |c, n| {
                let p = c as f64 / n as f64;
                if p > u {
                    p - u
                } else {
                    0.0
                }
            },
            |s, _| s,
        )
    }

    fn chi_square_bound(&self, ell: usize) -> (f64, f64) {
        self.jackknife(
            |c, _| (c * c.saturating_sub(1)) as f64,
            |s, n| {
                if n < 2 {
                    return f64::NAN;
                }
                let chi = ell as f64 * s / (n as f64 * (n as f64 - 1.0)) - 1.0;
                (0.5 * libm::sqrt(chi.max(0.0))).min(1.0)
            },
        )
    }
}

/// First `t` with `estimate + 2 se <= epsilon`; the scan does not assume monotonicity
/// of the curve, so later rows are never consulted once a crossing is found.
pub fn first_crossing<'a>(
    rows: impl IntoIterator<Item = &'a ResultRow>,
    epsilon: f64,
    value: impl Fn(&ResultRow) -> (f64, f64),
) -> Option<usize> {
    rows.into_iter()
        .find(|r| {
            let (v, se) = value(r);
            !v.is_nan() && v + 2.0 * if se.is_nan() { 0.0 } else { se } <= epsilon
        })
        .map(|r| r.t)
}

/// Reads the mixing time off a result table.
pub fn measure_mixing_time(
    rows: &[ResultRow],
    epsilon: f64,
    plugin_available: bool,
) -> MixingTimeEstimate {
    let (source, t_mix_hat) = if plugin_available {
        (
            MixingSource::Plugin,
            first_crossing(rows, epsilon, |r| (r.tv_plugin, r.tv_plugin_se)),
        )
    } else {
        (
            MixingSource::Structural,
            first_crossing(rows, epsilon, |r| (r.tv_struct, r.tv_struct_se)),
        )
    };
    let bracket_lo = first_crossing(rows, epsilon, |r| (r.tv_lower, 0.0));
    let bracket_hi = first_crossing(rows, epsilon, |r| (r.tv_upper, 0.0));
    let horizon = rows.last().map_or(0, |r| r.t);
    let note = match t_mix_hat {
        Some(t) => alloc::format!(
            "{} estimate + 2 se first <= {epsilon} at t = {t}",
            source.as_str()
        ),
        None => alloc::format!(
            "> {horizon}: {} curve never crossed {epsilon}",
            source.as_str()
        ),
    };
    MixingTimeEstimate {
        t_mix_hat,
        source,
        bracket_lo,
        bracket_hi,
        note,
    }
}

/// Builds the result table from simulated replicas.
pub fn analyze(
    seq: &DegreeSequence,
    init: &InitialCondition,
    spec: &ExperimentSpec,
    batch: &ReplicaBatch,
) -> Result<ResultTable> {
    if batch.horizon != spec.horizon {
        return Err(Error::InvalidSpec(alloc::format!(
            "batch horizon {} differs from spec horizon {}",
            batch.horizon,
            spec.horizon
        )));
    }
    let n_rep = batch.len() as u64;
    if n_rep == 0 {
        return Err(Error::InvalidSpec("no replicas to analyse".into()));
    }
    let ell = seq.ell();
    let horizon = spec.horizon;
    let threshold = PLUGIN_FACTOR * ell as u64;
    let plugin_available = spec.curves.tv && n_rep >= threshold;
    let mut warnings = Vec::new();
    if spec.curves.tv && !plugin_available {
        warnings.push(alloc::format!(
            "{n_rep} replicas is below the plug-in threshold {threshold} = {PLUGIN_FACTOR} * ell; \
             reporting the structural proxy and TV bounds instead"
        ));
    }

    let dist = distances_from(&init.eta, seq, init.x0, horizon as u32);
    let mut ball_sizes = alloc::vec![0usize; horizon + 1];
    for &d in &dist {
        if d != UNREACHED {
            ball_sizes[d as usize] += 1;
        }
    }
    for t in 1..=horizon {
        ball_sizes[t] += ball_sizes[t - 1];
    }

    let groups = JACKKNIFE_GROUPS.min(batch.len());
    let mut stopped = Grouped::new(groups, ell);
    let mut unstopped = Grouped::new(groups, ell);
    let mut pooled = Grouped::new(
        if plugin_available { groups } else { 0 },
        if plugin_available { ell } else { 0 },
    );
    let group_of = |i: usize| i * groups / batch.len();
    let ln_n = libm::log(seq.n() as f64);
    let alpha = spec.alpha_effective;
    let m = seq.m();

    let mut rows = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        stopped.clear();
        unstopped.clear();
        pooled.clear();
        let mut in_ball = 0u64;
        let mut unstopped_in_ball = 0u64;
        for i in 0..batch.len() {
            let x = batch.position(i, t, init.x0);
            let inside = dist[x as usize] as usize <= t;
            in_ball += inside as u64;
            if plugin_available {
                pooled.add(group_of(i), x);
            }
            if batch.stopped(i, t) {
                stopped.add(group_of(i), x);
            } else {
                unstopped_in_ball += inside as u64;
                unstopped.add(group_of(i), x);
            }
        }
        let n_s = stopped.total();
        let n_u = unstopped.total();
        let b = ball_sizes[t];
        let outside = 1.0 - b as f64 / ell as f64;

        let (tau_tail, tau_tail_se, tau_tail_lo, tau_tail_hi) = if spec.curves.tau || spec.curves.tv
        {
            let (lo, hi) = wilson_interval(n_u, n_rep, WILSON_Z);
            (n_u as f64 / n_rep as f64, binomial_se(n_u, n_rep), lo, hi)
        } else {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        };

        let (tv_plugin, tv_plugin_se) = if plugin_available {
            pooled.plugin_tv(ell)
        } else {
            (f64::NAN, f64::NAN)
        };

        let (tv_stopped, tv_stopped_se, stopped_mode) = if !spec.curves.conditional || n_s < 2 {
            (f64::NAN, f64::NAN, ConditionalMode::Unavailable)
        } else if n_s >= threshold {
            let (v, se) = stopped.plugin_tv(ell);
            (v, se, ConditionalMode::Plugin)
        } else {
            let (v, se) = stopped.chi_square_bound(ell);
            (v, se, ConditionalMode::ChiSquareBound)
        };

        let (tv_unstopped, tv_unstopped_se, unstopped_mode) = if !spec.curves.conditional || n_u < 2
        {
            (f64::NAN, f64::NAN, ConditionalMode::Unavailable)
        } else if n_u >= threshold {
            let (v, se) = unstopped.plugin_tv(ell);
            (v, se, ConditionalMode::Plugin)
        } else {
            let f = unstopped_in_ball as f64 / n_u as f64;
            let v = (f - b as f64 / ell as f64).max(0.0);
            (
                v,
                binomial_se(unstopped_in_ball, n_u),
                ConditionalMode::BallBound,
            )
        };

        let tv_lower = (in_ball as f64 / n_rep as f64 - b as f64 / ell as f64).max(0.0);
        let p_stop = n_s as f64 / n_rep as f64;
        let tv_upper = if n_s == 0 {
            tau_tail
        } else if tv_stopped.is_nan() {
            1.0
        } else {
            (tau_tail + p_stop * tv_stopped).min(1.0)
        };

        rows.push(ResultRow {
            t,
            tv_plugin,
            tv_plugin_se,
            tv_struct: tau_tail * outside,
            tv_struct_se: tau_tail_se * outside,
            tau_tail,
            tau_tail_se,
            tau_tail_lo,
            tau_tail_hi,
            tau_theory: theory_tau_tail(t, alpha)?,
            tau_tree: tree_tau_tail(m, spec.k, t),
            tv_stopped,
            tv_stopped_se,
            stopped_mode,
            stopped_count: n_s,
            tv_unstopped,
            tv_unstopped_se,
            unstopped_mode,
            tv_lower,
            tv_upper,
            ball_size: b,
            beyond_log_n: t as f64 > ln_n,
        });
    }

    let mixing = measure_mixing_time(&rows, spec.epsilon, plugin_available);
    let theory = theory_mixing_time(spec.epsilon, alpha)?;
    Ok(ResultTable {
        rows,
        scalars: ResultScalars {
            mixing,
            t_mix_theory: theory.value,
            theory_degenerate: theory.degenerate,
            alpha_requested: spec.alpha_requested,
            alpha_effective: alpha,
            alpha_adjusted: spec.alpha_adjusted,
            k: spec.k,
            epsilon: spec.epsilon,
            horizon,
            replicas: n_rep,
            seed: spec.master_seed,
            repetition: spec.repetition,
            x0: init.x0,
            plugin_available,
            warnings,
        },
    })
}

/// Simulates all replicas on the current thread and analyses them.
pub fn run_experiment(
    seq: &DegreeSequence,
    init: &InitialCondition,
    spec: &ExperimentSpec,
) -> Result<ResultTable> {
    let batch = simulate_replicas(seq, init, spec, 0..spec.replicas)?;
    analyze(seq, init, spec, &batch)
}

/// `t`, `P(tau > t)` estimate, its standard error.
pub fn estimate_tau_tail(
    seq: &DegreeSequence,
    init: &InitialCondition,
    spec: &ExperimentSpec,
) -> Result<Vec<(usize, f64, f64)>> {
    let table = run_experiment(seq, init, spec)?;
    Ok(table
        .rows
        .iter()
        .map(|r| (r.t, r.tau_tail, r.tau_tail_se))
        .collect())
}

/// `t`, plug-in TV and its standard error (NaN below the plug-in threshold).
pub fn estimate_tv_curve(
    seq: &DegreeSequence,
    init: &InitialCondition,
    spec: &ExperimentSpec,
) -> Result<Vec<(usize, f64, f64)>> {
    let table = run_experiment(seq, init, spec)?;
    Ok(table
        .rows
        .iter()
        .map(|r| (r.t, r.tv_plugin, r.tv_plugin_se))
        .collect())
}

/// Stopped and unstopped conditional TV curves as `(t, value, mode)`.
#[allow(clippy::type_complexity)]
pub fn estimate_conditional_tv(
    seq: &DegreeSequence,
    init: &InitialCondition,
    spec: &ExperimentSpec,
) -> Result<(
    Vec<(usize, f64, ConditionalMode)>,
    Vec<(usize, f64, ConditionalMode)>,
)> {
    let table = run_experiment(seq, init, spec)?;
    let stopped = table
        .rows
        .iter()
        .map(|r| (r.t, r.tv_stopped, r.stopped_mode))
        .collect();
    let unstopped = table
        .rows
        .iter()
        .map(|r| (r.t, r.tv_unstopped, r.unstopped_mode))
        .collect();
    Ok((stopped, unstopped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::experiment::{Engine, Rate};

    fn small() -> (DegreeSequence, InitialCondition) {
        let seq = DegreeSequence::make_regular(5, 2).unwrap();
        let init = InitialCondition::draw(&seq, 1, 0);
        (seq, init)
    }

    #[test]
    fn row_zero_is_a_point_mass() {
        let (seq, init) = small();
        let spec = ExperimentSpec::new(&seq, Rate::K(2), 0.1, Some(4), 400, 3).unwrap();
        let table = run_experiment(&seq, &init, &spec).unwrap();
        let r0 = &table.rows[0];
        assert!((r0.tv_plugin - 0.9).abs() < 1e-15);
        assert_eq!(r0.tv_plugin_se, 0.0);
        assert_eq!(r0.tau_tail, 1.0);
        assert_eq!(r0.ball_size, 1);
        assert!(table.scalars.plugin_available);
        for r in &table.rows {
            for v in [r.tv_plugin, r.tv_struct, r.tau_tail, r.tv_lower, r.tv_upper] {
                assert!((0.0..=1.0).contains(&v));
            }
            assert!(r.tv_lower <= r.tv_upper + 1e-12);
        }
        for w in table.rows.windows(2) {
            assert!(w[1].tau_tail <= w[0].tau_tail);
        }
    }

    #[test]
    fn loose_epsilon_mixes_at_zero() {
        let (seq, init) = small();
        let spec = ExperimentSpec::new(&seq, Rate::K(2), 0.95, Some(3), 300, 3).unwrap();
        let table = run_experiment(&seq, &init, &spec).unwrap();
        assert_eq!(table.scalars.mixing.t_mix_hat, Some(0));
    }

    #[test]
    fn below_threshold_uses_structural_proxy() {
        let seq = DegreeSequence::make_regular(100, 3).unwrap();
        let init = InitialCondition::draw(&seq, 2, 0);
        let spec = ExperimentSpec::new(&seq, Rate::Alpha(0.2), 0.1, Some(12), 500, 4).unwrap();
        let table = run_experiment(&seq, &init, &spec).unwrap();
        assert!(!table.scalars.plugin_available);
        assert_eq!(table.scalars.warnings.len(), 1);
        assert_eq!(table.scalars.mixing.source, MixingSource::Structural);
        assert!(table.rows.iter().all(|r| r.tv_plugin.is_nan()));
        assert_eq!(table.rows[2].unstopped_mode, ConditionalMode::BallBound);
        assert_eq!(table.rows[2].stopped_mode, ConditionalMode::ChiSquareBound);
        assert!(table.rows[2].tv_unstopped > 0.8);
    }

    #[test]
    fn horizon_refinement_keeps_the_crossing() {
        let (seq, init) = small();
        let base = ExperimentSpec::new(&seq, Rate::K(2), 0.2, Some(8), 2000, 9).unwrap();
        let longer = ExperimentSpec {
            horizon: 16,
            ..base.clone()
        };
        let a = run_experiment(&seq, &init, &base).unwrap();
        let b = run_experiment(&seq, &init, &longer).unwrap();
        let show = |rows: &[ResultRow]| std::format!("{rows:?}");
        assert_eq!(show(&a.rows), show(&b.rows[..9]));
        assert!(a.scalars.mixing.t_mix_hat.is_some());
        assert_eq!(a.scalars.mixing.t_mix_hat, b.scalars.mixing.t_mix_hat);
    }

    #[test]
    fn engines_agree_in_distribution() {
        let (seq, init) = small();
        let lazy = ExperimentSpec::new(&seq, Rate::K(2), 0.1, Some(3), 20_000, 5).unwrap();
        let eager = lazy.clone().with_engine(Engine::Eager);
        let a = run_experiment(&seq, &init, &lazy).unwrap();
        let b = run_experiment(&seq, &init, &eager).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            let se = libm::hypot(x.tau_tail_se, y.tau_tail_se).max(1e-9);
            assert!((x.tau_tail - y.tau_tail).abs() < 5.0 * se);
        }
    }

    #[test]
    fn grouped_chi_square_of_uniform_counts_is_zero() {
        let mut g = Grouped::new(4, 5);
        for i in 0..4000usize {
            g.add(i % 4, (i % 5) as u32);
        }
        let (v, _) = g.chi_square_bound(5);
        assert!(v < 0.02, "{v}");
        let (tv, se) = g.plugin_tv(5);
        assert!(tv.abs() < 1e-12 && se.abs() < 1e-12);
        g.clear();
        assert_eq!(g.total(), 0);
        assert!(g.counts.iter().all(|&c| c == 0));
    }
}
