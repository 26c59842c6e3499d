//! Replica execution across a bounded thread pool. Replicas are split into
//! fixed chunks by index and reassembled in index order, so results do not
//! depend on the thread count.

use rayon::prelude::*;

use dcm_core::estimators::{
    analyze, simulate_replicas, ExperimentSpec, InitialCondition, ReplicaBatch, ResultTable,
};
use dcm_core::DegreeSequence;

use crate::error::{LabError, LabResult};

/// Replicas per work item.
pub const CHUNK: u64 = 8192;

fn pool(threads: usize) -> LabResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Invalid(format!("cannot start {threads} worker threads: {e}")))
}

/// All replicas of `spec`; `threads = 0` uses every available core.
pub fn run_replicas(
    seq: &DegreeSequence,
    init: &InitialCondition,
    spec: &ExperimentSpec,
    threads: usize,
) -> LabResult<ReplicaBatch> {
    let chunks: Vec<(u64, u64)> = (0..spec.replicas.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(spec.replicas)))
        .collect();
    let parts: Vec<_> = pool(threads)?.install(|| {
        chunks
            .par_iter()
            .map(|&(a, b)| simulate_replicas(seq, init, spec, a..b))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut batch = ReplicaBatch::empty(spec.horizon);
    for p in parts {
        batch.append(p);
    }
    Ok(batch)
}

/// Simulates and analyses one repetition.
pub fn run_table(
    seq: &DegreeSequence,
    init: &InitialCondition,
    spec: &ExperimentSpec,
    threads: usize,
) -> LabResult<ResultTable> {
    let batch = run_replicas(seq, init, spec, threads)?;
    Ok(analyze(seq, init, spec, &batch)?)
}

/// Runs `repetitions` repetitions, each with its own initial condition.
pub fn run_repetitions(
    seq: &DegreeSequence,
    spec: &ExperimentSpec,
    repetitions: u64,
    threads: usize,
) -> LabResult<Vec<ResultTable>> {
    (0..repetitions)
        .map(|r| {
            let spec = spec.clone().with_repetition(r);
            let init = InitialCondition::draw(seq, spec.master_seed, r);
            run_table(seq, &init, &spec, threads)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use dcm_core::estimators::Rate;

    #[test]
    fn thread_count_does_not_matter() {
        let seq = DegreeSequence::make_regular(50, 3).unwrap();
        let init = InitialCondition::draw(&seq, 3, 0);
        let spec = ExperimentSpec::new(&seq, Rate::K(5), 0.1, Some(6), 2 * CHUNK + 17, 3).unwrap();
        let one = run_replicas(&seq, &init, &spec, 1).unwrap();
        let three = run_replicas(&seq, &init, &spec, 3).unwrap();
        assert_eq!(one, three);
        assert_eq!(
            one,
            simulate_replicas(&seq, &init, &spec, 0..spec.replicas).unwrap()
        );
    }
}
