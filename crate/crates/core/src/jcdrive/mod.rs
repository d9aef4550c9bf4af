//! Jaynes-Cummings drive-qubit dynamics.
//!
//! The drive is a bosonic mode prepared in `Σ b_n |n⟩`; the qubit starts pure.
//! In the rotating frame the interaction `g i (b ℓ† - b† ℓ)` couples only the
//! pairs `|n, 0⟩ ↔ |n-1, 1⟩`, each rotating at `ω_n = g√n`. Tracing out the
//! drive yields a qubit channel whose basis images are drive-weighted sums.
//!
//! Times are expressed through the reduced time `τ = g√n̄ t`, so that each
//! block rotates by the angle `τ √(n / n̄)`.

mod asymptotic;
mod drive;
mod dynamics;
mod taylor;

pub use asymptotic::{asymptotic_eigenerror_lower_bound, DistributionFamily};
pub use drive::{
    binomial_drive, custom_drive, fock_drive, poisson_drive, BinomialMode, DriveDistribution,
    DriveKind, DEFAULT_TAIL_TOL,
};
pub use dynamics::{
    build_channel_exact, evolve_bipartite, f_matrices, BipartiteState, FMatrixSet, JcConfig,
};
pub use taylor::build_channel_taylor2;
