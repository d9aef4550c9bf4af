//! Density matrices and state-level eigenfidelity diagnostics.
//!
//! The eigenfidelity `r(ρ)` is the largest eigenvalue of `ρ`: no pure target
//! state `|φ⟩` can be matched with fidelity `⟨φ|ρ|φ⟩` above it, and the top
//! eigenvector attains it. Purity brackets it as `γ ≤ r ≤ (1 + γ)/2`, and any
//! Schatten `p`-norm as `‖ρ‖_p / d^{1/p} ≤ r ≤ ‖ρ‖_p`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::C64;

/// Elementwise Hermiticity tolerance for states.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `(-PSD_TOL, 0)` are treated as round-off and clamped to zero.
pub const PSD_TOL: f64 = 1e-10;
/// Norm tolerance for pure states.
pub const NORM_TOL: f64 = 1e-12;

/// Largest elementwise deviation `|M_ij - conj(M_ji)|`.
pub fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(M + M†)/2`.
pub fn symmetrize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// Ordered eigensystem of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one column per eigenvalue.
    pub eigenvectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues with round-off negatives clamped to zero.
    pub fn clamped(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|&f| f.max(0.0)).collect()
    }

    /// Column `i` as a pure state.
    pub fn eigenvector(&self, i: usize) -> PureState {
        PureState {
            amplitudes: self.eigenvectors.column(i).into_owned(),
        }
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = self.dim();
        let lambda = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(self.eigenvalues[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.eigenvectors * lambda * self.eigenvectors.adjoint()
    }
}

/// Eigendecomposition of an arbitrary square matrix that is required to be
/// Hermitian within [`HERMITIAN_TOL`] (relative to its largest entry).
pub fn hermitian_eigen(m: &DMatrix<C64>) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitianInput(dev));
    }
    Ok(sorted_eigen(symmetrize(m)))
}

fn sorted_eigen(h: DMatrix<C64>) -> Spectrum {
    let d = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Wraps a vector that must already have unit norm.
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales any non-zero vector to unit norm.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    /// Computational basis state `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> C64 {
        self.amplitudes[k]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `U|ψ⟩`.
    pub fn transformed(&self, unitary: &DMatrix<C64>) -> PureState {
        PureState {
            amplitudes: unitary * &self.amplitudes,
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DMatrix<C64> {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
}

impl TryFrom<DMatrix<C64>> for DensityMatrix {
    type Error = Error;
    fn try_from(m: DMatrix<C64>) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DensityMatrix> for DMatrix<C64> {
    fn from(rho: DensityMatrix) -> Self {
        rho.entries
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity; the stored matrix is
    /// the symmetrized input.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NonHermitianInput(dev));
        }
        let entries = symmetrize(&m);
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = sorted_eigen(entries.clone())
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { entries })
    }

    /// Wraps a matrix produced by a validated map; only symmetrizes.
    pub(crate) fn from_trusted(m: DMatrix<C64>) -> Self {
        Self {
            entries: symmetrize(&m),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            entries: psi.projector(),
        }
    }

    /// `Σ_i w_i |i⟩⟨i|` for non-negative weights summing to one.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let d = weights.len();
        Self::new(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(weights[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// `Σ_i f_i |ψ_i⟩⟨ψ_i|` with descending `f_i`.
    pub fn eigendecompose(&self) -> Spectrum {
        sorted_eigen(self.entries.clone())
    }

    /// Spectral radius together with the closest pure state (the top
    /// eigenvector). With a degenerate top eigenvalue the first eigenvector
    /// returned by the decomposition is reported.
    pub fn eigenfidelity(&self) -> Eigenfidelity {
        let sp = self.eigendecompose();
        Eigenfidelity {
            value: sp.eigenvalues[0].min(1.0),
            closest: sp.eigenvector(0),
        }
    }

    /// `1 - r(ρ)`.
    pub fn eigenerror(&self) -> f64 {
        1.0 - self.eigenfidelity().value
    }

    /// `⟨φ|ρ|φ⟩`.
    pub fn fidelity_to_pure(&self, phi: &PureState) -> Result<f64> {
        if phi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: phi.dim(),
            });
        }
        let v = phi.amplitudes();
        Ok(v.dotc(&(&self.entries * v)).re)
    }

    /// `(Σ f_i^p)^{1/p}` over the clamped spectrum.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidOrder(p));
        }
        let f = self.eigendecompose().clamped();
        // Factor out the largest eigenvalue to keep large p finite.
        let top = f[0];
        if top == 0.0 {
            return Ok(0.0);
        }
        let s: f64 = f.iter().map(|&x| (x / top).powf(p)).sum();
        Ok(top * s.powf(1.0 / p))
    }

    /// `tr ρ²`, evaluated as `Σ_ij |ρ_ij|²`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `1 - tr ρ²`.
    pub fn linear_entropy(&self) -> f64 {
        1.0 - self.purity()
    }

    /// `(γ, (1 + γ)/2)`, which brackets the eigenfidelity.
    pub fn eigenfidelity_bounds(&self) -> (f64, f64) {
        let gamma = self.purity();
        (gamma, 0.5 * (1.0 + gamma))
    }

    /// Passive state: the spectrum rearranged in the energy basis with the
    /// largest population on the lowest level.
    pub fn passive_state(&self, basis: &EnergyBasis) -> Result<DensityMatrix> {
        if basis.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: basis.dim(),
            });
        }
        let populations = self.eigendecompose().clamped();
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for (k, &s) in populations.iter().enumerate() {
            let e = basis.basis.column(k);
            out += (e * e.adjoint()).scale(s);
        }
        Ok(DensityMatrix {
            entries: symmetrize(&out),
        })
    }

    /// Temperature (with `k_B = 1`) of the thermal qubit state sharing this
    /// state's passive state. Pure states give zero, the maximally mixed
    /// state gives `+∞`.
    pub fn effective_temperature(&self, basis: &EnergyBasis) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::InvalidDimension {
                expected: 2,
                got: self.dim(),
            });
        }
        if basis.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: basis.dim(),
            });
        }
        let gap = basis.levels[1] - basis.levels[0];
        let r = self.eigenfidelity().value;
        let excited = 1.0 - r;
        if excited <= PSD_TOL {
            return Ok(0.0);
        }
        let log_ratio = (r / excited).ln();
        if log_ratio <= 1e-12 {
            return Ok(f64::INFINITY);
        }
        Ok(gap / log_ratio)
    }
}

/// Top eigenvalue of a density matrix and its eigenvector.
#[derive(Debug, Clone)]
pub struct Eigenfidelity {
    pub value: f64,
    pub closest: PureState,
}

/// Energy eigenbasis with strictly increasing levels.
#[derive(Debug, Clone)]
pub struct EnergyBasis {
    levels: Vec<f64>,
    basis: DMatrix<C64>,
}

impl EnergyBasis {
    pub fn new(levels: Vec<f64>, basis: DMatrix<C64>) -> Result<Self> {
        let d = levels.len();
        if basis.nrows() != d || basis.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: basis.ncols(),
            });
        }
        if levels.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::UnorderedEnergies);
        }
        let gram = basis.adjoint() * &basis - DMatrix::<C64>::identity(d, d);
        let dev = gram.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { levels, basis })
    }

    /// Levels attached to the computational basis.
    pub fn computational(levels: Vec<f64>) -> Result<Self> {
        let d = levels.len();
        Self::new(levels, DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn vector(&self, k: usize) -> PureState {
        PureState {
            amplitudes: self.basis.column(k).into_owned(),
        }
    }
}
