//! Small statistical helpers shared by the estimators.

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Binomial standard error `sqrt(p(1-p)/n)`.
pub fn binomial_se(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    libm::sqrt(p * (1.0 - p) / n)
}

/// Two-proportion z statistic with pooled variance; 0 when undefined.
pub fn two_proportion_z(a: u64, na: u64, b: u64, nb: u64) -> f64 {
    if na == 0 || nb == 0 {
        return 0.0;
    }
    let (pa, pb) = (a as f64 / na as f64, b as f64 / nb as f64);
    let pooled = (a + b) as f64 / (na + nb) as f64;
    let var = pooled * (1.0 - pooled) * (1.0 / na as f64 + 1.0 / nb as f64);
    if var <= 0.0 {
        0.0
    } else {
        (pa - pb) / libm::sqrt(var)
    }
}

/// Delete-one jackknife standard error from leave-one-out replicates.
pub fn jackknife_se(leave_one_out: &[f64]) -> f64 {
    let g = leave_one_out.len();
    if g < 2 {
        return 0.0;
    }
    let mean = leave_one_out.iter().sum::<f64>() / g as f64;
    let ss: f64 = leave_one_out.iter().map(|v| (v - mean) * (v - mean)).sum();
    libm::sqrt((g as f64 - 1.0) / g as f64 * ss)
}

/// Total variation distance between the empirical law `counts / total` and
/// the uniform law on `cells` cells. Cells absent from `counts` are zero.
pub fn plugin_tv_uniform<'a, I>(counts: I, total: u64, cells: usize) -> f64
where
    I: IntoIterator<Item = &'a u64>,
{
    if total == 0 {
        return f64::NAN;
    }
    let u = 1.0 / cells as f64;
    let n = total as f64;
    // sum over occupied cells of (p - u)^+ equals the TV distance
    counts
        .into_iter()
        .map(|&c| {
            let p = c as f64 / n;
            if p > u {
                p - u
            } else {
                0.0
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100, 1.96);
        assert!(lo < 0.3 && 0.3 < hi);
        assert!((lo - 0.2189).abs() < 1e-3 && (hi - 0.3958).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 10, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
    }

    #[test]
    fn z_is_antisymmetric() {
        let z = two_proportion_z(60, 100, 40, 100);
        assert!((z + two_proportion_z(40, 100, 60, 100)).abs() < 1e-15);
        assert!((z - 2.8284).abs() < 1e-3);
        assert_eq!(two_proportion_z(5, 10, 5, 10), 0.0);
    }

    #[test]
    fn jackknife_of_mean_is_standard_error() {
        let xs = [1.0, 2.0, 4.0, 7.0, 11.0];
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let loo: std::vec::Vec<f64> = xs.iter().map(|x| (mean * n - x) / (n - 1.0)).collect();
        let sd = libm::sqrt(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0));
        assert!((jackknife_se(&loo) - sd / libm::sqrt(n)).abs() < 1e-12);
    }

    #[test]
    fn plugin_tv_point_mass() {
        assert!((plugin_tv_uniform(&[10], 10, 4) - 0.75).abs() < 1e-15);
        assert!(plugin_tv_uniform(&[5, 5, 5, 5], 20, 4).abs() < 1e-15);
    }
}
