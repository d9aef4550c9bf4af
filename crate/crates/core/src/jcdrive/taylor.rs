use nalgebra::Matrix2;

use super::asymptotic::DistributionFamily;
use super::dynamics::JcConfig;
use crate::channel::QubitChannel;
use crate::error::{Error, Result};
use crate::C64;

/// Value with first and second derivative in the photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Jet {
    v: f64,
    d1: f64,
    d2: f64,
}

impl Jet {
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    fn neg(self) -> Jet {
        Jet {
            v: -self.v,
            d1: -self.d1,
            d2: -self.d2,
        }
    }

    /// Central differences with unit step.
    fn from_samples(f: impl Fn(f64) -> f64, x: f64) -> Jet {
        let (lo, mid, hi) = (f(x - 1.0), f(x), f(x + 1.0));
        Jet {
            v: mid,
            d1: 0.5 * (hi - lo),
            d2: hi - 2.0 * mid + lo,
        }
    }

    /// `v + ½ v'' Δn²`.
    fn second_order(self, variance: f64) -> f64 {
        self.v + 0.5 * self.d2 * variance
    }
}

/// `cos` and `sin` of `τ √((x + shift)/n̄)` with analytic derivatives in `x`.
fn trig_jets(tau: f64, nbar: f64, x: f64, shift: f64) -> (Jet, Jet) {
    let m = (x + shift).max(f64::MIN_POSITIVE);
    let a = tau * (m / nbar).sqrt();
    let a1 = tau / (2.0 * (nbar * m).sqrt());
    let a2 = -tau / (4.0 * nbar.sqrt() * m.powf(1.5));
    let (s, c) = a.sin_cos();
    let cos = Jet {
        v: c,
        d1: -s * a1,
        d2: -c * a1 * a1 - s * a2,
    };
    let sin = Jet {
        v: s,
        d1: c * a1,
        d2: -s * a1 * a1 + c * a2,
    };
    (cos, sin)
}

/// Continuous extension of `b_{n+1}/b_n` for real non-negative amplitudes.
fn amplitude_ratio(family: DistributionFamily, nbar: f64, variance: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| match family {
        DistributionFamily::Poisson => (nbar / (x + 1.0)).max(0.0).sqrt(),
        DistributionFamily::Binomial => {
            let width = 4.0 * variance;
            let k = x - (nbar - 2.0 * variance);
            ((width - k) / (k + 1.0)).max(0.0).sqrt()
        }
    }
}

/// Channel from `E_ij ≈ F_ij(n̄) + ½ F_ij''(n̄) Δn²`.
///
/// Trigonometric factors are differentiated analytically through
/// `ω_n = g√n`; the amplitude-ratio factors of the coherences are
/// differentiated by unit-step central differences of their continuous
/// extension. Binomial drives use the moment-matched parametrization.
///
/// Only trace and Hermiticity preservation are enforced: the truncated
/// series may leave Choi eigenvalues slightly negative, at the size of the
/// neglected higher orders (see [`QubitChannel::min_choi_eigenvalue`]).
pub fn build_channel_taylor2(
    nbar: f64,
    variance: f64,
    family: DistributionFamily,
    cfg: &JcConfig,
) -> Result<QubitChannel> {
    if !(nbar > 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidMean(nbar));
    }
    if !(variance >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "variance",
            reason: format!("must be non-negative, got {variance}"),
        });
    }
    let dn = variance.sqrt();
    if dn > nbar {
        return Err(Error::ApproximationDomain { dn, nbar });
    }
    let tau = cfg.tau;
    let x = nbar;
    let (c0, s0) = trig_jets(tau, nbar, x, 0.0);
    let (c1, s1) = trig_jets(tau, nbar, x, 1.0);
    let (c2, s2) = trig_jets(tau, nbar, x, 2.0);
    let ratio = amplitude_ratio(family, nbar, variance);
    let r1 = Jet::from_samples(&ratio, x);
    let r2 = Jet::from_samples(|y| ratio(y) * ratio(y + 1.0), x);

    let ev = |j: Jet| C64::new(j.second_order(variance), 0.0);

    let x00 = ev(r1.mul(c0).mul(s1));
    let e00 = Matrix2::new(ev(c0.mul(c0)), x00, x00, ev(s0.mul(s0)));

    let x11 = ev(r1.mul(s1).mul(c2).neg());
    let e11 = Matrix2::new(ev(s1.mul(s1)), x11, x11, ev(c1.mul(c1)));

    let cs1 = r1.mul(c1).mul(s1);
    let e01 = Matrix2::new(
        ev(cs1.neg()),
        ev(c0.mul(c1)),
        ev(r2.mul(s1).mul(s2).neg()),
        ev(cs1),
    );
    QubitChannel::from_images_approximate([e00, e01, e01.adjoint(), e11])
}
