use crate::error::{Error, Result};

/// Drive photon-number families with closed-form asymptotic error laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionFamily {
    Poisson,
    Binomial,
}

/// Large-`n̄` lower bound on the channel eigenerror at fixed Fano factor:
///
/// - Poisson: `(τ² + sin²τ) / (6 n̄)`
/// - Binomial: `τ² Δn² / (6 n̄²) + sin²τ / (6 Δn²)`
///
/// The binomial law diverges as `Δn² → 0`; a zero variance returns `+∞`.
pub fn asymptotic_eigenerror_lower_bound(
    family: DistributionFamily,
    nbar: f64,
    variance: f64,
    tau: f64,
) -> Result<f64> {
    if !(nbar > 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidMean(nbar));
    }
    let sin2 = tau.sin().powi(2);
    match family {
        DistributionFamily::Poisson => Ok((tau * tau + sin2) / (6.0 * nbar)),
        DistributionFamily::Binomial => {
            if !(variance >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "variance",
                    reason: format!("must be non-negative, got {variance}"),
                });
            }
            if variance == 0.0 {
                return Ok(f64::INFINITY);
            }
            Ok(tau * tau / 6.0 * variance / (nbar * nbar) + sin2 / (6.0 * variance))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn poisson_quarter_turn() {
        let v = asymptotic_eigenerror_lower_bound(DistributionFamily::Poisson, 1000.0, 1000.0, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(v, (PI * PI / 4.0 + 1.0) / 6000.0, epsilon = 1e-18);
        assert_abs_diff_eq!(v, 5.7791e-4, epsilon = 1e-8);
    }

    #[test]
    fn binomial_with_poisson_variance_agrees() {
        for &tau in &[0.0, 0.3, FRAC_PI_2, 2.5, PI] {
            for &nbar in &[10.0, 250.0, 1e4] {
                let p = asymptotic_eigenerror_lower_bound(DistributionFamily::Poisson, nbar, nbar, tau).unwrap();
                let b = asymptotic_eigenerror_lower_bound(DistributionFamily::Binomial, nbar, nbar, tau).unwrap();
                assert_abs_diff_eq!(p, b, epsilon = 1e-15 * p.max(1e-300));
            }
        }
    }

    #[test]
    fn zero_time_and_divergence() {
        assert_eq!(asymptotic_eigenerror_lower_bound(DistributionFamily::Poisson, 5.0, 5.0, 0.0).unwrap(), 0.0);
        assert_eq!(
            asymptotic_eigenerror_lower_bound(DistributionFamily::Binomial, 5.0, 0.0, 1.0).unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            asymptotic_eigenerror_lower_bound(DistributionFamily::Poisson, 0.0, 0.0, 1.0),
            Err(Error::InvalidMean(0.0))
        );
    }
}
