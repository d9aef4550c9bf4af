use statrs::function::factorial::{ln_binomial, ln_factorial};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Default probability mass allowed outside a truncated support window.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// How the binomial width and offset are derived from `(n̄, Δn²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinomialMode {
    /// Width `N = 4Δn²` centred on `n̄`: realized mean and variance are
    /// exactly the requested ones.
    #[default]
    MomentMatched,
    /// Width `N = 2Δn²` with `k_n = n - (n̄ - N)`. The realized mean is
    /// `n̄ - N/2` and the realized variance `N/4`.
    HalfWidth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveKind {
    Poisson,
    Binomial { mode: BinomialMode, width: u64 },
    Fock,
    Custom,
}

/// Fock-basis amplitudes `b_n` of the initial drive state, stored on the
/// contiguous window `n_min..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveDistribution {
    kind: DriveKind,
    n_min: usize,
    coeffs: Vec<C64>,
    mean: f64,
    variance: f64,
    requested_mean: f64,
    requested_variance: f64,
    discarded_mass: f64,
}

impl DriveDistribution {
    fn from_probabilities(
        kind: DriveKind,
        n_min: usize,
        probs: &[f64],
        requested: (f64, f64),
        discarded_mass: f64,
    ) -> Self {
        let total: f64 = probs.iter().sum();
        let coeffs = probs.iter().map(|p| C64::new((p / total).sqrt(), 0.0)).collect();
        Self::from_amplitudes(kind, n_min, coeffs, requested, discarded_mass)
    }

    fn from_amplitudes(
        kind: DriveKind,
        n_min: usize,
        coeffs: Vec<C64>,
        requested: (f64, f64),
        discarded_mass: f64,
    ) -> Self {
        let mut d = Self {
            kind,
            n_min,
            coeffs,
            mean: 0.0,
            variance: 0.0,
            requested_mean: requested.0,
            requested_variance: requested.1,
            discarded_mass,
        };
        let (mean, variance) = d.realized_moments();
        d.mean = mean;
        d.variance = variance;
        d
    }

    /// Mean and variance of `|b_n|²`, computed from the stored amplitudes.
    pub fn realized_moments(&self) -> (f64, f64) {
        let mean: f64 = self.iter().map(|(n, b)| n as f64 * b.norm_sqr()).sum();
        let var: f64 = self
            .iter()
            .map(|(n, b)| (n as f64 - mean).powi(2) * b.norm_sqr())
            .sum();
        (mean, var)
    }

    pub fn kind(&self) -> DriveKind {
        self.kind
    }

    /// Realized mean photon number.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Realized photon-number variance.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// `Δn² / n̄`.
    pub fn fano(&self) -> f64 {
        self.variance / self.mean
    }

    pub fn requested_mean(&self) -> f64 {
        self.requested_mean
    }

    pub fn requested_variance(&self) -> f64 {
        self.requested_variance
    }

    /// False when the construction cannot reproduce the requested moments
    /// (the half-width binomial).
    pub fn moments_match_request(&self) -> bool {
        (self.mean - self.requested_mean).abs() <= 1e-9 * self.requested_mean.max(1.0)
            && (self.variance - self.requested_variance).abs()
                <= 1e-9 * self.requested_variance.max(1.0)
    }

    /// Probability mass dropped when truncating an infinite support.
    pub fn discarded_mass(&self) -> f64 {
        self.discarded_mass
    }

    pub fn n_min(&self) -> usize {
        self.n_min
    }

    pub fn n_max(&self) -> usize {
        self.n_min + self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    /// `b_n`, zero outside the stored window.
    pub fn amplitude(&self, n: usize) -> C64 {
        if n < self.n_min {
            return C64::new(0.0, 0.0);
        }
        self.coeffs.get(n - self.n_min).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// `b_n` for a possibly negative index.
    pub(crate) fn amplitude_i(&self, n: i64) -> C64 {
        if n < 0 {
            C64::new(0.0, 0.0)
        } else {
            self.amplitude(n as usize)
        }
    }

    pub fn probability(&self, n: usize) -> f64 {
        self.amplitude(n).norm_sqr()
    }

    /// `(n, b_n)` over the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (usize, C64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, &b)| (self.n_min + i, b))
    }

    /// `Σ |b_n|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|b| b.norm_sqr()).sum()
    }

    /// `⟨b⟩ = Σ conj(b_n) b_{n+1} √(n+1)`.
    pub fn annihilation_expectation(&self) -> C64 {
        self.iter()
            .map(|(n, b)| b.conj() * self.amplitude(n + 1) * ((n + 1) as f64).sqrt())
            .sum()
    }
}

fn poisson_ln_pmf(n: usize, nbar: f64) -> f64 {
    n as f64 * nbar.ln() - nbar - ln_factorial(n as u64)
}

/// Coherent-state drive: `|b_n|²` is the Poisson distribution of mean `n̄`,
/// truncated to the smallest window around the mode whose complement carries
/// less than `tail_tol` mass, then renormalized.
pub fn poisson_drive(nbar: f64, tail_tol: f64) -> Result<DriveDistribution> {
    if !(nbar > 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidMean(nbar));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_tol",
            reason: format!("must lie in (0, 1), got {tail_tol}"),
        });
    }
    let pmf = |n: usize| poisson_ln_pmf(n, nbar).exp();
    let mode = nbar.floor() as usize;
    let (mut lo, mut hi) = (mode, mode);
    let mut mass = pmf(mode);
    let mut below = if lo > 0 { pmf(lo - 1) } else { 0.0 };
    let mut above = pmf(hi + 1);
    while 1.0 - mass >= tail_tol {
        if lo > 0 && below >= above {
            lo -= 1;
            mass += below;
            below = if lo > 0 { pmf(lo - 1) } else { 0.0 };
        } else {
            hi += 1;
            mass += above;
            above = pmf(hi + 1);
        }
    }
    let probs: Vec<f64> = (lo..=hi).map(pmf).collect();
    Ok(DriveDistribution::from_probabilities(
        DriveKind::Poisson,
        lo,
        &probs,
        (nbar, nbar),
        (1.0 - mass).max(0.0),
    ))
}

fn as_integer(x: f64, what: &str) -> Result<u64> {
    let r = x.round();
    if (x - r).abs() > 1e-9 || r < 0.0 {
        return Err(Error::UnsupportedParameters(format!(
            "{what} = {x} is not a non-negative integer"
        )));
    }
    Ok(r as u64)
}

/// Binomial drive with requested mean `n̄` and variance `Δn²`.
pub fn binomial_drive(nbar: f64, variance: f64, mode: BinomialMode) -> Result<DriveDistribution> {
    if !(nbar > 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidMean(nbar));
    }
    if !(variance > 0.0) || variance > nbar {
        return Err(Error::UnsupportedParameters(format!(
            "binomial variance must lie in (0, nbar], got {variance} with nbar = {nbar}"
        )));
    }
    let (width, offset) = match mode {
        BinomialMode::MomentMatched => {
            let width = as_integer(4.0 * variance, "width 4*variance")?;
            let start = nbar - 2.0 * variance;
            if start < -1e-9 {
                return Err(Error::UnsupportedParameters(format!(
                    "support would start at n = {start}"
                )));
            }
            (width, as_integer(start, "support start nbar - 2*variance")?)
        }
        BinomialMode::HalfWidth => {
            let width = as_integer(2.0 * variance, "width 2*variance")?;
            let start = nbar - width as f64;
            if start < -1e-9 {
                return Err(Error::UnsupportedParameters(format!(
                    "support would start at n = {start}"
                )));
            }
            (width, as_integer(start, "support start nbar - width")?)
        }
    };
    let ln2 = std::f64::consts::LN_2;
    let probs: Vec<f64> = (0..=width)
        .map(|k| (ln_binomial(width, k) - width as f64 * ln2).exp())
        .collect();
    Ok(DriveDistribution::from_probabilities(
        DriveKind::Binomial { mode, width },
        offset as usize,
        &probs,
        (nbar, variance),
        0.0,
    ))
}

/// Number-state drive `|N⟩`.
pub fn fock_drive(n: usize) -> DriveDistribution {
    DriveDistribution::from_amplitudes(
        DriveKind::Fock,
        n,
        vec![C64::new(1.0, 0.0)],
        (n as f64, 0.0),
        0.0,
    )
}

/// Arbitrary amplitudes starting at `n_min`; rescaled to unit norm.
pub fn custom_drive(n_min: usize, coeffs: Vec<C64>) -> Result<DriveDistribution> {
    let norm: f64 = coeffs.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    if coeffs.is_empty() || !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::UnsupportedParameters(
            "custom drive needs at least one non-zero coefficient".into(),
        ));
    }
    let coeffs: Vec<C64> = coeffs.into_iter().map(|b| b / norm).collect();
    let mut d = DriveDistribution::from_amplitudes(DriveKind::Custom, n_min, coeffs, (0.0, 0.0), 0.0);
    d.requested_mean = d.mean;
    d.requested_variance = d.variance;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn poisson_vacuum_weight() {
        // Before renormalization |b_0|² = e^{-1}; the tail beyond the window
        // is below 1e-12 so the stored value agrees to that level.
        let d = poisson_drive(1.0, DEFAULT_TAIL_TOL).unwrap();
        assert_abs_diff_eq!(d.probability(0), (-1.0_f64).exp(), epsilon = 1e-11);
        assert_abs_diff_eq!(d.probability(0), 0.367879, epsilon = 1e-6);
        assert_eq!(d.n_min(), 0);
    }

    #[test]
    fn poisson_moments_and_window() {
        let d = poisson_drive(100.0, 1e-12).unwrap();
        assert_abs_diff_eq!(d.norm_sqr(), 1.0, epsilon = 1e-12);
        assert!((d.fano() - 1.0).abs() <= 1e-6, "fano {}", d.fano());
        assert!((d.variance() - 100.0).abs() <= 1e-6 * 100.0);
        assert!(d.n_max() - d.n_min() <= 200);
        assert!(d.discarded_mass() < 1e-12);
        assert!(d.moments_match_request() || (d.mean() - 100.0).abs() < 1e-6);
    }

    #[test]
    fn poisson_rejects_bad_mean() {
        assert_eq!(poisson_drive(0.0, 1e-12), Err(Error::InvalidMean(0.0)));
        assert_eq!(poisson_drive(-2.0, 1e-12), Err(Error::InvalidMean(-2.0)));
    }

    #[test]
    fn binomial_moment_matched() {
        let d = binomial_drive(25.0, 5.0, BinomialMode::MomentMatched).unwrap();
        assert_abs_diff_eq!(d.mean(), 25.0, epsilon = 1e-9);
        assert_abs_diff_eq!(d.variance(), 5.0, epsilon = 1e-9);
        assert!(d.moments_match_request());
        assert_eq!(d.kind(), DriveKind::Binomial { mode: BinomialMode::MomentMatched, width: 20 });

        let d = binomial_drive(400.0, 200.0, BinomialMode::MomentMatched).unwrap();
        assert_abs_diff_eq!(d.variance(), 200.0, epsilon = 1e-7);
        assert_eq!(d.n_min(), 0);
        assert!(binomial_drive(400.0, 400.0, BinomialMode::MomentMatched).is_err());
    }

    #[test]
    fn binomial_half_width_flags_mismatch() {
        let d = binomial_drive(25.0, 5.0, BinomialMode::HalfWidth).unwrap();
        assert_eq!(d.kind(), DriveKind::Binomial { mode: BinomialMode::HalfWidth, width: 10 });
        assert_abs_diff_eq!(d.variance(), 2.5, epsilon = 1e-9);
        assert_abs_diff_eq!(d.mean(), 20.0, epsilon = 1e-9);
        assert!(!d.moments_match_request());
    }

    #[test]
    fn binomial_rejects_unsupported() {
        assert!(matches!(
            binomial_drive(25.0, 30.0, BinomialMode::MomentMatched),
            Err(Error::UnsupportedParameters(_))
        ));
        assert!(matches!(
            binomial_drive(25.0, 5.1, BinomialMode::MomentMatched),
            Err(Error::UnsupportedParameters(_))
        ));
        assert!(matches!(
            binomial_drive(3.0, 2.0, BinomialMode::HalfWidth),
            Err(Error::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn fock_examples() {
        let vac = fock_drive(0);
        assert_eq!(vac.mean(), 0.0);
        assert_eq!(vac.amplitude(0), C64::new(1.0, 0.0));
        let d = fock_drive(100);
        assert_eq!(d.mean(), 100.0);
        assert_eq!(d.variance(), 0.0);
        assert_eq!(d.amplitude(99), C64::new(0.0, 0.0));
    }

    #[test]
    fn custom_normalizes() {
        let d = custom_drive(3, vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(d.norm_sqr(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.mean(), 3.5, epsilon = 1e-15);
        assert!(custom_drive(0, vec![C64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn coherent_annihilation_expectation() {
        let d = poisson_drive(49.0, 1e-12).unwrap();
        assert_abs_diff_eq!(d.annihilation_expectation().re, 7.0, epsilon = 1e-9);
    }
}
