//! Qubit CPTP channels stored by their action on the operator basis.
//!
//! A channel `E` is fixed by the four images `E_ij = E[|i⟩⟨j|]`; everything
//! else (application, composition, Choi matrices, average purity) follows by
//! linearity.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, Matrix2, Matrix4};

use crate::densmat::{DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::haar::{mc_average, McEstimate, SeededSampler};
use crate::C64;

/// Trace-preservation and Hermiticity-preservation tolerance.
pub const CHANNEL_TOL: f64 = 1e-10;
/// Smallest admissible Choi eigenvalue.
pub const CP_TOL: f64 = 1e-8;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn ket_bra(i: usize, j: usize) -> Matrix2<C64> {
    let mut m = Matrix2::zeros();
    m[(i, j)] = ONE;
    m
}

/// Largest eigenvalue of a 2×2 Hermitian matrix.
fn top_eigenvalue2(m: &Matrix2<C64>) -> f64 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt()
}

/// `|α⟩⟨α|` for `|α⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`, given `cos θ`.
fn bloch_projector(cos_theta: f64, phi: f64) -> Matrix2<C64> {
    let p0 = 0.5 * (1.0 + cos_theta);
    let p1 = 0.5 * (1.0 - cos_theta);
    let coh = C64::from_polar((p0 * p1).max(0.0).sqrt(), -phi);
    Matrix2::new(C64::new(p0, 0.0), coh, coh.conj(), C64::new(p1, 0.0))
}

/// Qubit CPTP map.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitChannel {
    images: [Matrix2<C64>; 4],
}

impl QubitChannel {
    /// Validates trace preservation, Hermiticity preservation and complete
    /// positivity of the map with the given basis images.
    pub fn from_images(
        e00: Matrix2<C64>,
        e01: Matrix2<C64>,
        e10: Matrix2<C64>,
        e11: Matrix2<C64>,
    ) -> Result<Self> {
        let ch = Self {
            images: [e00, e01, e10, e11],
        };
        let tp = ch.tp_residual();
        if tp > CHANNEL_TOL {
            return Err(Error::NotTracePreserving(tp));
        }
        let herm = ch.hermiticity_residual();
        if herm > CHANNEL_TOL {
            return Err(Error::NotHermiticityPreserving(herm));
        }
        let cp = ch.min_choi_eigenvalue();
        if cp < -CP_TOL {
            return Err(Error::CpViolation(cp));
        }
        Ok(ch)
    }

    /// TP and Hermiticity checked, CP left to the caller; used for
    /// series approximations whose Choi spectrum carries truncation slack.
    pub(crate) fn from_images_approximate(images: [Matrix2<C64>; 4]) -> Result<Self> {
        let ch = Self { images };
        let tp = ch.tp_residual();
        if tp > CHANNEL_TOL {
            return Err(Error::NotTracePreserving(tp));
        }
        let herm = ch.hermiticity_residual();
        if herm > CHANNEL_TOL {
            return Err(Error::NotHermiticityPreserving(herm));
        }
        Ok(ch)
    }

    /// Map with Kraus operators `K_m`: `ρ ↦ Σ K_m ρ K_m†`.
    pub fn from_kraus(kraus: &[Matrix2<C64>]) -> Result<Self> {
        let img = |i, j| {
            let e = ket_bra(i, j);
            kraus.iter().map(|k| k * e * k.adjoint()).sum::<Matrix2<C64>>()
        };
        Self::from_images(img(0, 0), img(0, 1), img(1, 0), img(1, 1))
    }

    pub fn identity() -> Self {
        Self {
            images: [ket_bra(0, 0), ket_bra(0, 1), ket_bra(1, 0), ket_bra(1, 1)],
        }
    }

    /// Completely depolarizing channel: every input goes to `I/2`.
    pub fn depolarizing() -> Self {
        let half = Matrix2::identity().scale(0.5);
        Self {
            images: [half, Matrix2::zeros(), Matrix2::zeros(), half],
        }
    }

    /// `ρ ↦ U ρ U†`.
    pub fn unitary(u: &TargetGate) -> Self {
        let u = u.matrix();
        let img = |i, j| u * ket_bra(i, j) * u.adjoint();
        Self {
            images: [img(0, 0), img(0, 1), img(1, 0), img(1, 1)],
        }
    }

    /// `E[|i⟩⟨j|]`.
    pub fn image(&self, i: usize, j: usize) -> &Matrix2<C64> {
        &self.images[2 * i + j]
    }

    pub fn images(&self) -> &[Matrix2<C64>; 4] {
        &self.images
    }

    /// `max |tr E_ii - 1|, |tr E_ij|` over the basis images.
    pub fn tp_residual(&self) -> f64 {
        let [e00, e01, e10, e11] = &self.images;
        [
            (e00.trace() - ONE).norm(),
            (e11.trace() - ONE).norm(),
            e01.trace().norm(),
            e10.trace().norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let [e00, e01, e10, e11] = &self.images;
        let max_abs = |m: Matrix2<C64>| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        max_abs(e00 - e00.adjoint())
            .max(max_abs(e11 - e11.adjoint()))
            .max(max_abs(e10 - e01.adjoint()))
    }

    /// Unnormalized Choi matrix `Σ_ij |i⟩⟨j| ⊗ E_ij`.
    pub fn choi(&self) -> Matrix4<C64> {
        let mut out = Matrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let e = self.image(i, j);
                for k in 0..2 {
                    for l in 0..2 {
                        out[(2 * i + k, 2 * j + l)] = e[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        let c = self.choi();
        let h = (c + c.adjoint()).scale(0.5);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Linear action on an arbitrary 2×2 operator.
    pub fn apply_matrix(&self, m: &Matrix2<C64>) -> Matrix2<C64> {
        let mut out = Matrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let r = m[(i, j)];
                if r != ZERO {
                    out += self.image(i, j) * r;
                }
            }
        }
        out
    }

    /// `E[ρ] = Σ ρ_ij E_ij`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: rho.dim(),
            });
        }
        let m = rho.matrix();
        let out = self.apply_matrix(&Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]));
        let out = (out + out.adjoint()).scale(0.5);
        let min = out.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -CP_TOL {
            return Err(Error::CpViolation(min));
        }
        Ok(DensityMatrix::from_trusted(DMatrix::from_iterator(2, 2, out.iter().copied())))
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &QubitChannel, inner: &QubitChannel) -> Result<QubitChannel> {
        let img = |k: usize| outer.apply_matrix(&inner.images[k]);
        Self::from_images(img(0), img(1), img(2), img(3))
    }

    /// `C`-fold self-composition, `C ≥ 1`.
    pub fn power(&self, times: usize) -> Result<QubitChannel> {
        let mut acc = self.clone();
        for _ in 1..times.max(1) {
            acc = Self::compose(self, &acc)?;
        }
        Ok(acc)
    }

    /// Haar average of the output purity,
    /// `(1/3) tr(E00² + E00 E11 + E11² + E01 E10)`.
    pub fn average_purity(&self) -> f64 {
        let [e00, e01, e10, e11] = &self.images;
        let m = e00 * e00 + e00 * e11 + e11 * e11 + e01 * e10;
        m.trace().re / 3.0
    }

    /// `(γ̄, (1 + γ̄)/2)`, bracketing the channel eigenfidelity.
    pub fn eigenfidelity_bounds(&self) -> (f64, f64) {
        let g = self.average_purity();
        (g, 0.5 * (1.0 + g))
    }

    /// `(S̄_L/2, S̄_L)`, bracketing the channel eigenerror.
    pub fn eigenerror_bounds(&self) -> (f64, f64) {
        let sl = 1.0 - self.average_purity();
        (0.5 * sl, sl)
    }

    /// Eigenfidelity of `E[|ψ⟩⟨ψ|]`.
    pub fn output_eigenfidelity(&self, psi: &PureState) -> f64 {
        let p = psi.projector();
        top_eigenvalue2(&self.apply_matrix(&Matrix2::new(p[(0, 0)], p[(0, 1)], p[(1, 0)], p[(1, 1)])))
    }

    /// Haar average of the output eigenfidelity by product quadrature on the
    /// Bloch sphere (Gauss-Legendre in `cos θ` on each hemisphere, periodic
    /// trapezoid in `φ`).
    pub fn channel_eigenfidelity(&self) -> f64 {
        self.channel_eigenfidelity_with(ChannelQuadrature::default())
    }

    pub fn channel_eigenfidelity_with(&self, q: ChannelQuadrature) -> f64 {
        let gl = GaussLegendre::new(q.polar_nodes);
        let m = q.azimuthal_nodes.get();
        let ring = |x: f64| -> f64 {
            (0..m)
                .map(|k| {
                    let phi = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    top_eigenvalue2(&self.apply_matrix(&bloch_projector(x, phi)))
                })
                .sum::<f64>()
                / m as f64
        };
        0.5 * (gl.integrate(-1.0, 0.0, ring) + gl.integrate(0.0, 1.0, ring))
    }

    /// Monte Carlo estimate of the channel eigenfidelity.
    pub fn channel_eigenfidelity_mc(&self, sampler: &mut SeededSampler, n: usize) -> Result<McEstimate> {
        mc_average(|psi| Ok(self.output_eigenfidelity(psi)), sampler, n)
    }

    /// Monte Carlo estimate of the average output purity.
    pub fn average_purity_mc(&self, sampler: &mut SeededSampler, n: usize) -> Result<McEstimate> {
        mc_average(
            |psi| {
                let p = psi.projector();
                let out = self.apply_matrix(&Matrix2::new(p[(0, 0)], p[(0, 1)], p[(1, 0)], p[(1, 1)]));
                Ok(out.iter().map(|z| z.norm_sqr()).sum())
            },
            sampler,
            n,
        )
    }
}

/// Node counts for [`QubitChannel::channel_eigenfidelity_with`].
#[derive(Debug, Clone, Copy)]
pub struct ChannelQuadrature {
    /// Gauss-Legendre nodes per hemisphere.
    pub polar_nodes: NonZeroUsize,
    pub azimuthal_nodes: NonZeroUsize,
}

impl Default for ChannelQuadrature {
    fn default() -> Self {
        Self {
            polar_nodes: NonZeroUsize::new(48).unwrap(),
            azimuthal_nodes: NonZeroUsize::new(64).unwrap(),
        }
    }
}

/// Target single-qubit unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetGate {
    u: Matrix2<C64>,
}

impl TargetGate {
    pub fn new(u: Matrix2<C64>) -> Result<Self> {
        let dev = (u.adjoint() * u - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > 1e-12 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { u })
    }

    pub fn identity() -> Self {
        Self { u: Matrix2::identity() }
    }

    pub fn pauli_x() -> Self {
        Self {
            u: Matrix2::new(ZERO, ONE, ONE, ZERO),
        }
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.u
    }
}

/// Choi matrix `S_U` of `ρ ↦ U† E[ρ] U`, normalized so that
/// `tr[(ρ^T ⊗ ρ) S_U] = ⟨α|U† E[ρ] U|α⟩` for `ρ = |α⟩⟨α|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    entries: Matrix4<C64>,
}

impl ChoiMatrix {
    pub fn new(channel: &QubitChannel, gate: &TargetGate) -> Self {
        let u = gate.matrix();
        let mut entries = Matrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let phi = u.adjoint() * channel.image(i, j) * u;
                for k in 0..2 {
                    for l in 0..2 {
                        entries[(2 * i + k, 2 * j + l)] = phi[(k, l)];
                    }
                }
            }
        }
        Self { entries }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.entries
    }

    /// `tr[(ρ^T ⊗ ρ) S]` for `ρ = |α⟩⟨α|`.
    pub fn fidelity(&self, alpha: &PureState) -> Result<f64> {
        if alpha.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: alpha.dim(),
            });
        }
        let p = alpha.projector();
        let rho = Matrix2::new(p[(0, 0)], p[(0, 1)], p[(1, 0)], p[(1, 1)]);
        Ok((rho.transpose().kronecker(&rho) * self.entries).trace().re)
    }
}

/// `S_U` for the given channel and target gate.
pub fn choi_matrix(channel: &QubitChannel, gate: &TargetGate) -> ChoiMatrix {
    ChoiMatrix::new(channel, gate)
}

/// Haar average of `ρ^T ⊗ ρ` over pure qubit states.
pub fn a_matrix() -> Matrix4<f64> {
    Matrix4::new(
        2.0, 0.0, 0.0, 1.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        1.0, 0.0, 0.0, 2.0,
    ) / 6.0
}

/// Average gate fidelity `tr(A S_U)`.
pub fn average_gate_fidelity(channel: &QubitChannel, gate: &TargetGate) -> f64 {
    let a = a_matrix().map(|x| C64::new(x, 0.0));
    (a * ChoiMatrix::new(channel, gate).entries).trace().re
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn random_state(s: &mut SeededSampler) -> DensityMatrix {
        s.sample_density(2)
    }

    fn close(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> bool {
        (a.matrix() - b.matrix()).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn identity_and_depolarizing_apply() {
        let mut s = SeededSampler::new(1, 2);
        for _ in 0..10 {
            let rho = random_state(&mut s);
            assert!(close(&QubitChannel::identity().apply(&rho).unwrap(), &rho, 1e-14));
            let out = QubitChannel::depolarizing().apply(&rho).unwrap();
            assert!(close(&out, &DensityMatrix::maximally_mixed(2), 1e-14));
        }
    }

    #[test]
    fn compose_examples() {
        let mut s = SeededSampler::new(2, 2);
        let c = QubitChannel::from_kraus(&s.sample_kraus(2)).unwrap();
        let left = QubitChannel::compose(&QubitChannel::identity(), &c).unwrap();
        for (a, b) in left.images().iter().zip(c.images()) {
            assert!((a - b).norm() < 1e-14);
        }
        let absorbed = QubitChannel::compose(&QubitChannel::depolarizing(), &c).unwrap();
        for (a, b) in absorbed.images().iter().zip(QubitChannel::depolarizing().images()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn average_purity_examples() {
        assert_abs_diff_eq!(QubitChannel::identity().average_purity(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(QubitChannel::depolarizing().average_purity(), 0.5, epsilon = 1e-14);
        let mut s = SeededSampler::new(3, 2);
        let u = TargetGate::new(s.sample_unitary2()).unwrap();
        assert_abs_diff_eq!(QubitChannel::unitary(&u).average_purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenfidelity_bound_examples() {
        assert_eq!(QubitChannel::identity().eigenfidelity_bounds(), (1.0, 1.0));
        let (lo, hi) = QubitChannel::depolarizing().eigenfidelity_bounds();
        assert_abs_diff_eq!(lo, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(hi, 0.75, epsilon = 1e-14);
        let mut s = SeededSampler::new(4, 2);
        let mc = QubitChannel::depolarizing().channel_eigenfidelity_mc(&mut s, 1000).unwrap();
        assert_abs_diff_eq!(mc.mean, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(QubitChannel::depolarizing().channel_eigenfidelity(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(QubitChannel::identity().channel_eigenfidelity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn a_matrix_entries() {
        let a = a_matrix();
        assert_abs_diff_eq!(a[(0, 0)], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[(0, 3)], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[(1, 1)], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[(1, 2)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn choi_fidelity_examples() {
        let id = QubitChannel::identity();
        let s_id = choi_matrix(&id, &TargetGate::identity());
        let s_x = choi_matrix(&id, &TargetGate::pauli_x());
        let mut s = SeededSampler::new(5, 2);
        for _ in 0..20 {
            let a = s.sample_pure();
            assert_abs_diff_eq!(s_id.fidelity(&a).unwrap(), 1.0, epsilon = 1e-12);
            let xa = a.transformed(&DMatrix::from_iterator(2, 2, TargetGate::pauli_x().matrix().iter().copied()));
            assert_abs_diff_eq!(s_x.fidelity(&a).unwrap(), a.inner(&xa).norm_sqr(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s_x.fidelity(&PureState::basis(2, 0)).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn average_gate_fidelity_examples() {
        let mut s = SeededSampler::new(6, 2);
        let u = TargetGate::new(s.sample_unitary2()).unwrap();
        assert_abs_diff_eq!(average_gate_fidelity(&QubitChannel::unitary(&u), &u), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(average_gate_fidelity(&QubitChannel::depolarizing(), &u), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(
            average_gate_fidelity(&QubitChannel::identity(), &TargetGate::pauli_x()),
            1.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn validation_rejects_bad_maps() {
        let id = QubitChannel::identity();
        let [e00, e01, e10, e11] = *id.images();
        assert!(matches!(
            QubitChannel::from_images(e00.scale(2.0), e01, e10, e11),
            Err(Error::NotTracePreserving(_))
        ));
        assert!(matches!(
            QubitChannel::from_images(e00, e01, e10.scale(0.5), e11),
            Err(Error::NotHermiticityPreserving(_))
        ));
        // Transpose map: positive but not completely positive.
        assert!(matches!(
            QubitChannel::from_images(e00, e10, e01, e11),
            Err(Error::CpViolation(_))
        ));
        assert!(matches!(TargetGate::new(Matrix2::identity().scale(2.0)), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn power_matches_repeated_compose() {
        let mut s = SeededSampler::new(8, 2);
        let c = QubitChannel::from_kraus(&s.sample_kraus(2)).unwrap();
        let c3 = c.power(3).unwrap();
        let manual = QubitChannel::compose(&c, &QubitChannel::compose(&c, &c).unwrap()).unwrap();
        for (a, b) in c3.images().iter().zip(manual.images()) {
            assert!((a - b).norm() < 1e-14);
        }
        assert_eq!(c.power(1).unwrap(), c);
    }
}
