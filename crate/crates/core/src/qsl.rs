//! Quantum speed limits for the drive-qubit interaction and the energy cost
//! they imply for a target eigenerror. Units: `ħ = 1`, energies in rad/s.

use crate::densmat::PureState;
use crate::error::{Error, Result};
use crate::jcdrive::{asymptotic_eigenerror_lower_bound, DistributionFamily, DriveDistribution, JcConfig};
use crate::C64;

/// Mean and standard deviation of a Hamiltonian in a pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMoments {
    mean: f64,
    stdev: f64,
}

impl HamiltonianMoments {
    pub fn new(mean: f64, stdev: f64) -> Result<Self> {
        if !(stdev >= 0.0) || !mean.is_finite() || !stdev.is_finite() {
            return Err(Error::InvalidParameter {
                name: "stdev",
                reason: format!("moments must be finite with ΔH ≥ 0, got ({mean}, {stdev})"),
            });
        }
        Ok(Self { mean, stdev })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stdev(&self) -> f64 {
        self.stdev
    }
}

/// Rotation angle `θ ∈ [0, π/2]` between initial and final pure states.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RotationTarget(f64);

impl RotationTarget {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("must lie in [0, π/2], got {theta}"),
            });
        }
        Ok(Self(theta))
    }

    pub fn theta(&self) -> f64 {
        self.0
    }
}

/// Mandelstam-Tamm time `θ / ΔH`; `+∞` for frozen dynamics with `θ > 0`.
pub fn mt_time(target: RotationTarget, m: HamiltonianMoments) -> f64 {
    if target.0 == 0.0 {
        return 0.0;
    }
    if m.stdev == 0.0 {
        return f64::INFINITY;
    }
    target.0 / m.stdev
}

/// Margolus-Levitin time `θ / ⟨H⟩`, with `⟨H⟩` measured from the ground energy.
pub fn ml_time(target: RotationTarget, m: HamiltonianMoments) -> Result<f64> {
    if !(m.mean > 0.0) {
        return Err(Error::NonpositiveMeanEnergy(m.mean));
    }
    Ok(target.0 / m.mean)
}

/// Frame of the Hamiltonian whose moments are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// `g i (b ℓ† − b† ℓ)`.
    #[default]
    Interaction,
    /// Interaction plus `ω (b†b + ℓ†ℓ)`.
    Lab,
}

/// Moments of the drive-qubit Hamiltonian on a product state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcMoments {
    pub moments: HamiltonianMoments,
    /// Lowest eigenvalue of the Hamiltonian on the truncated Fock space.
    pub ground_energy: f64,
    /// `g √n̄`.
    pub asymptote: f64,
}

impl JcMoments {
    /// Moments with the mean shifted above the ground energy, for [`ml_time`].
    pub fn above_ground(&self) -> HamiltonianMoments {
        HamiltonianMoments {
            mean: self.moments.mean - self.ground_energy,
            stdev: self.moments.stdev,
        }
    }
}

/// Interaction-frame moments, see [`jc_moments_in`].
pub fn jc_moments(drive: &DriveDistribution, qubit: &PureState, cfg: &JcConfig) -> Result<JcMoments> {
    jc_moments_in(drive, qubit, cfg, Frame::Interaction)
}

/// Exact `⟨H⟩`, `ΔH` on `|drive⟩ ⊗ |qubit⟩`.
///
/// The Fock space is truncated at `n_max + 1`, which holds `H|ψ⟩` exactly.
pub fn jc_moments_in(
    drive: &DriveDistribution,
    qubit: &PureState,
    cfg: &JcConfig,
    frame: Frame,
) -> Result<JcMoments> {
    if qubit.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: qubit.dim(),
        });
    }
    let g = cfg.coupling;
    let omega = match frame {
        Frame::Interaction => 0.0,
        Frame::Lab => cfg.carrier,
    };
    let top = drive.n_max() + 1;
    let psi = |n: usize, q: usize| drive.amplitude(n) * qubit.amplitude(q);
    let i = C64::new(0.0, 1.0);

    let mut mean = C64::new(0.0, 0.0);
    let mut second = 0.0;
    for n in 0..=top {
        for q in 0..2 {
            // ⟨n,q|H|ψ⟩
            let mut h = psi(n, q) * (omega * (n + q) as f64);
            if q == 1 {
                h += i * g * ((n + 1) as f64).sqrt() * psi(n + 1, 0);
            } else if n >= 1 {
                h -= i * g * (n as f64).sqrt() * psi(n - 1, 1);
            }
            mean += psi(n, q).conj() * h;
            second += h.norm_sqr();
        }
    }
    let mean = mean.re;
    let stdev = (second - mean * mean).max(0.0).sqrt();

    // Blocks {|n,0⟩, |n−1,1⟩} carry energies ω n ± g√n; |0,0⟩ carries 0.
    let ground_energy = (1..=top)
        .map(|n| omega * n as f64 - g * (n as f64).sqrt())
        .fold(0.0, f64::min);

    Ok(JcMoments {
        moments: HamiltonianMoments::new(mean, stdev)?,
        ground_energy,
        asymptote: g * drive.mean().sqrt(),
    })
}

/// Equal-weight qubit state whose phase maximizes the interaction mean,
/// `(|0⟩ + e^{i(arg⟨b⟩ + π/2)} |1⟩)/√2`.
pub fn phase_aligned_qubit(drive: &DriveDistribution) -> PureState {
    let beta = drive.annihilation_expectation();
    let phase = beta.arg() + std::f64::consts::FRAC_PI_2;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_slice(&[C64::new(h, 0.0), C64::from_polar(h, phase)]).expect("unit norm")
}

/// Joint rotation angle `ϑ = arccos(overlap · cos θ)`, never below `θ`.
pub fn bipartite_angle_check(theta_logical: f64, drive_overlap: f64) -> Result<f64> {
    let target = RotationTarget::new(theta_logical)?;
    if !(0.0..=1.0).contains(&drive_overlap) {
        return Err(Error::InvalidParameter {
            name: "drive_overlap",
            reason: format!("must lie in [0, 1], got {drive_overlap}"),
        });
    }
    Ok((drive_overlap * target.0.cos()).clamp(-1.0, 1.0).acos())
}

/// Eigenerror floor `(θ² + sin²θ) / (6 n̄)` for a coherent drive rotating by `θ`.
pub fn qsl_eigenerror_bound(theta: f64, nbar: f64) -> Result<f64> {
    asymptotic_eigenerror_lower_bound(DistributionFamily::Poisson, nbar, nbar, theta)
}

/// Small-angle form `θ² / (3 n̄)`.
pub fn qsl_eigenerror_bound_small_angle(theta: f64, nbar: f64) -> Result<f64> {
    if !(nbar > 0.0) {
        return Err(Error::InvalidMean(nbar));
    }
    Ok(theta * theta / (3.0 * nbar))
}

/// Mean photon number at which [`qsl_eigenerror_bound`] equals `epsilon`.
pub fn required_photons(theta: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("must be positive, got {epsilon}"),
        });
    }
    let s = theta.sin();
    Ok((theta * theta + s * s) / (6.0 * epsilon))
}
