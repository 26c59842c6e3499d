#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson goodness-of-fit p-value of `observed` against `probs`.
/// Cells with zero probability must be empty.
pub fn chi_square_pvalue(observed: &[u64], probs: &[f64]) -> f64 {
    assert_eq!(observed.len(), probs.len());
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(probs) {
        if p <= 1e-15 {
            assert_eq!(o, 0, "mass on a cell of probability {p}");
            continue;
        }
        let e = p * n as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    ChiSquared::new((cells - 1) as f64).unwrap().sf(stat)
}

/// `|estimate - exact| / se`, with a floor on `se` for degenerate cells.
pub fn z_score(estimate: f64, exact: f64, trials: u64) -> f64 {
    let se = (exact * (1.0 - exact) / trials as f64).sqrt().max(1e-12);
    (estimate - exact).abs() / se
}
