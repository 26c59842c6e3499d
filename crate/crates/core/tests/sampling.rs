mod common;

use common::chi_square_pvalue;
use dcm_core::deferred::LazyDynamics;
use dcm_core::exact::{enumerate_configurations, exact_q_matrix};
use dcm_core::{q_probability, rewire_step, sample_configuration, Configuration, DegreeSequence};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 100_000;
const ALPHA: f64 = 1e-4;

#[test]
fn configuration_sampler_is_uniform() {
    for (text, cells) in [
        ("2 2", 3),
        ("3 3", 15),
        ("2 2 2", 15),
        ("2 3 3", 105),
        ("4 4", 105),
    ] {
        let seq = DegreeSequence::parse(text).unwrap();
        let space = enumerate_configurations(&seq).unwrap();
        assert_eq!(space.len(), cells);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = vec![0u64; cells];
        for _ in 0..SAMPLES {
            let c = sample_configuration(&seq, &mut rng);
            counts[space.index_of(&c).unwrap()] += 1;
        }
        let p = chi_square_pvalue(&counts, &vec![1.0 / cells as f64; cells]);
        assert!(p > ALPHA, "{text}: p = {p}");
    }
}

#[test]
fn one_rewiring_step_follows_q() {
    let seq = DegreeSequence::parse("2 3 3").unwrap();
    let space = enumerate_configurations(&seq).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let start = sample_configuration(&seq, &mut rng);
    for k in 2..=4 {
        let probs: Vec<f64> = space
            .configurations()
            .iter()
            .map(|c| q_probability(&start, c, k).unwrap())
            .collect();
        let mut counts = vec![0u64; space.len()];
        for _ in 0..SAMPLES {
            let (next, _) = rewire_step(&start, k, &mut rng).unwrap();
            counts[space.index_of(&next).unwrap()] += 1;
        }
        let p = chi_square_pvalue(&counts, &probs);
        assert!(p > ALPHA, "k = {k}: p = {p}");
    }
}

/// Reveals the whole of `C_level` through the lazy engine.
fn reveal(
    lazy: &mut LazyDynamics,
    ell: usize,
    level: usize,
    rng: &mut ChaCha8Rng,
) -> Configuration {
    let pairing = (0..ell as u32)
        .map(|h| lazy.partner(level, h, rng))
        .collect();
    Configuration::from_pairing(pairing).unwrap()
}

#[test]
fn lazily_revealed_configurations_follow_q_powers() {
    let seq = DegreeSequence::parse("2 2 2 2 2").unwrap();
    let space = enumerate_configurations(&seq).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let eta = sample_configuration(&seq, &mut rng);
    let start = space.index_of(&eta).unwrap();
    let k = 2;
    let q = exact_q_matrix(&space, k).unwrap();
    let n = space.len();
    let mut law = vec![0.0; n];
    law[start] = 1.0;
    let mut laws = Vec::new();
    for _ in 0..3 {
        law = (0..n)
            .map(|j| (0..n).map(|i| law[i] * q[i][j]).sum())
            .collect();
        laws.push(law.clone());
    }
    let mut lazy = LazyDynamics::new(&seq, &eta, k).unwrap();
    let mut counts = vec![vec![0u64; n]; 3];
    // querying the levels in reverse order exercises the out-of-order paths
    for _ in 0..SAMPLES {
        lazy.reset();
        for level in (1..=3).rev() {
            let c = reveal(&mut lazy, seq.ell(), level, &mut rng);
            counts[level - 1][space.index_of(&c).unwrap()] += 1;
        }
    }
    for level in 0..3 {
        let p = chi_square_pvalue(&counts[level], &laws[level]);
        assert!(p > ALPHA, "level {}: p = {p}", level + 1);
    }
}
