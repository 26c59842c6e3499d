use crate::error::{Error, Result};

/// Closed-form mixing-time prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryMixingTime {
    pub value: f64,
    /// Set when `alpha = 1`: every edge is resampled at once and the formula
    /// degenerates to zero steps.
    pub degenerate: bool,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(epsilon))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// `sqrt(2 ln(1/epsilon) / ln(1/(1 - alpha)))`.
pub fn theory_mixing_time(epsilon: f64, alpha: f64) -> Result<TheoryMixingTime> {
    check_epsilon(epsilon)?;
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(TheoryMixingTime {
            value: 0.0,
            degenerate: true,
        });
    }
    let value = libm::sqrt(2.0 * libm::log(1.0 / epsilon) / -libm::log1p(-alpha));
    Ok(TheoryMixingTime {
        value,
        degenerate: false,
    })
}

/// `(1 - alpha)^(t(t+1)/2)`.
pub fn theory_tau_tail(t: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if t == 0 {
        return Ok(1.0);
    }
    let e = (t * (t + 1) / 2) as f64;
    Ok(libm::exp(e * libm::log1p(-alpha)))
}

/// Exact `P(tau > t)` when the walk's first `t` steps cross `t` distinct edges:
/// `prod_{i=1}^t C(m - i, k) / C(m, k)`.
pub fn tree_tau_tail(m: usize, k: usize, t: usize) -> f64 {
    (1..=t)
        .map(|j| {
            let left = m as f64 - j as f64 + 1.0;
            let f = (1.0 - k as f64 / left).max(0.0);
            libm::pow(f, (t - j + 1) as f64)
        })
        .product()
}

/// `3 * theory_mixing_time` rounded up, at least one step.
pub fn default_horizon(epsilon: f64, alpha: f64) -> Result<usize> {
    let t = theory_mixing_time(epsilon, alpha)?.value;
    Ok((libm::ceil(3.0 * t) as usize).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixing_time_values() {
        let v = theory_mixing_time(0.1, 0.02).unwrap().value;
        assert!((v - 15.098).abs() < 1e-3, "{v}");
        assert!((theory_mixing_time(0.1, 0.05).unwrap().value - 9.475).abs() < 1e-3);
        assert!((theory_mixing_time(0.1, 0.1).unwrap().value - 6.611).abs() < 1e-3);
        let e2 = libm::exp(-2.0);
        let a = 1e-4;
        assert!(
            (theory_mixing_time(e2, a).unwrap().value * libm::sqrt(a) / 2.0 - 1.0).abs() < 1e-4
        );
        assert!(theory_mixing_time(1.0 - 1e-12, 0.1).unwrap().value < 1e-5);
        assert!(theory_mixing_time(0.1, 1.0).unwrap().degenerate);
        assert!(theory_mixing_time(0.0, 0.1).is_err());
        assert!(theory_mixing_time(0.1, 0.0).is_err());
    }

    #[test]
    fn tau_tail_values() {
        assert!((theory_tau_tail(3, 0.1).unwrap() - 0.531441).abs() < 1e-12);
        assert_eq!(theory_tau_tail(0, 0.3).unwrap(), 1.0);
        assert_eq!(theory_tau_tail(2, 1.0).unwrap(), 0.0);
        assert!((theory_tau_tail(10, 0.05).unwrap() - 0.95f64.powi(55)).abs() < 1e-15);
        assert!(theory_tau_tail(1, 1.5).is_err());
    }

    #[test]
    fn tree_tail_matches_binomial_form() {
        // prod_i C(m-i,k)/C(m,k) for m = 10, k = 2, t = 3
        let direct = (28.0 / 45.0) * (21.0 / 45.0) * (36.0 / 45.0);
        assert!((tree_tau_tail(10, 2, 3) - direct).abs() < 1e-15);
        assert_eq!(tree_tau_tail(3, 3, 1), 0.0);
        assert_eq!(tree_tau_tail(10, 2, 0), 1.0);
    }

    #[test]
    fn horizons() {
        assert_eq!(default_horizon(0.1, 0.02).unwrap(), 46);
        assert_eq!(default_horizon(0.1, 1.0).unwrap(), 1);
    }
}
