//! Randomized checks of the state-level inequality chains, shared by the
//! `bounds-check` command and the test suites.

use crate::densmat::{DensityMatrix, PureState};
use crate::error::Result;
use crate::haar::SeededSampler;

/// Schatten orders exercised by the norm chain.
pub const SCHATTEN_ORDERS: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

/// Violations found by [`check_bounds`], per inequality family.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundsReport {
    pub trials: usize,
    /// Fidelity to a pure state exceeding the eigenfidelity, or the top
    /// eigenvector failing to attain it.
    pub overlap_violations: usize,
    /// `‖ρ‖_p / d^{1/p} ≤ ‖ρ‖_p^{p/(p−1)} ≤ r ≤ ‖ρ‖_p` failures.
    pub schatten_violations: usize,
    /// `γ ≤ r ≤ (1+γ)/2` or `S_L/2 ≤ 1−r ≤ S_L` failures.
    pub purity_violations: usize,
    /// Largest violation magnitude seen.
    pub worst: f64,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.overlap_violations == 0 && self.schatten_violations == 0 && self.purity_violations == 0
    }

    /// `prop1 OK prop2 OK thm1 OK`, with `FAIL(n)` for failing families.
    pub fn summary(&self) -> String {
        let tag = |n: usize| if n == 0 { "OK".to_string() } else { format!("FAIL({n})") };
        format!(
            "prop1 {} prop2 {} thm1 {}",
            tag(self.overlap_violations),
            tag(self.schatten_violations),
            tag(self.purity_violations)
        )
    }
}

/// Outcome of the checks on a single state.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    overlap: bool,
    schatten: bool,
    purity: bool,
    worst: f64,
}

fn check_state(rho: &DensityMatrix, probes: &[PureState], tol: f64) -> Result<Tally> {
    let mut t = Tally::default();
    let mut flag = |slack: f64, which: &mut bool| {
        if slack > tol {
            *which = true;
        }
        t.worst = t.worst.max(slack);
    };
    let ef = rho.eigenfidelity();
    let r = ef.value;
    let d = rho.dim() as f64;

    let mut p1 = false;
    for phi in probes {
        flag(rho.fidelity_to_pure(phi)? - r, &mut p1);
    }
    flag((rho.fidelity_to_pure(&ef.closest)? - r).abs(), &mut p1);

    let mut p2 = false;
    for &p in &SCHATTEN_ORDERS {
        let norm = rho.schatten_norm(p)?;
        flag(norm / d.powf(1.0 / p) - r, &mut p2);
        flag(r - norm, &mut p2);
        if p > 1.0 {
            flag(norm.powf(p / (p - 1.0)) - r, &mut p2);
        }
    }

    let mut th = false;
    let g = rho.purity();
    flag(g - r, &mut th);
    flag(r - 0.5 * (1.0 + g), &mut th);
    let (sl, eps) = (rho.linear_entropy(), rho.eigenerror());
    flag(0.5 * sl - eps, &mut th);
    flag(eps - sl, &mut th);

    t.overlap = p1;
    t.schatten = p2;
    t.purity = th;
    Ok(t)
}

/// Runs the pure-state overlap, Schatten-norm and purity chains on `trials` random
/// density matrices of dimension `dim`, with `probes` random pure states per
/// matrix for the fidelity check. Ranks cycle through `1..=dim`, so pure and
/// rank-deficient states are covered.
pub fn check_bounds(dim: usize, trials: usize, probes: usize, seed: u64, tol: f64) -> Result<BoundsReport> {
    let mut sampler = SeededSampler::new(seed, dim);
    let mut report = BoundsReport {
        trials,
        ..Default::default()
    };
    for k in 0..trials {
        let rho = sampler.sample_density(1 + k % dim);
        let phis: Vec<PureState> = (0..probes).map(|_| sampler.sample_pure()).collect();
        let t = check_state(&rho, &phis, tol)?;
        report.overlap_violations += usize::from(t.overlap);
        report.schatten_violations += usize::from(t.schatten);
        report.purity_violations += usize::from(t.purity);
        report.worst = report.worst.max(t.worst);
    }
    Ok(report)
}
