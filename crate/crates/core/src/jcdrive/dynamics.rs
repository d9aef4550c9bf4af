use nalgebra::{DMatrix, Matrix2};

use super::drive::DriveDistribution;
use crate::channel::QubitChannel;
use crate::densmat::{DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::C64;

/// Trace residual above which the drive window is considered too narrow.
pub const TRUNCATION_TOL: f64 = 1e-8;

/// Coupling, carrier frequency and reduced interaction time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcConfig {
    /// Coupling `g` (rad/s).
    pub coupling: f64,
    /// Carrier `ω` (rad/s); only enters energy bookkeeping.
    pub carrier: f64,
    /// Reduced time `τ = g√n̄ t` (rad).
    pub tau: f64,
}

impl JcConfig {
    pub fn new(coupling: f64, carrier: f64, tau: f64) -> Result<Self> {
        if !(coupling > 0.0) || !coupling.is_finite() {
            return Err(Error::InvalidParameter {
                name: "coupling",
                reason: format!("must be positive, got {coupling}"),
            });
        }
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("must be non-negative, got {tau}"),
            });
        }
        Ok(Self {
            coupling,
            carrier,
            tau,
        })
    }

    /// Unit coupling and carrier at reduced time `tau`.
    pub fn with_tau(tau: f64) -> Result<Self> {
        Self::new(1.0, 1.0, tau)
    }

    /// Physical time `t = τ / (g√n̄)`.
    pub fn interaction_time(&self, nbar: f64) -> f64 {
        self.tau / (self.coupling * nbar.sqrt())
    }
}

/// Rotation angles `ω_n t = τ √(n / n̄)` of the invariant blocks.
#[derive(Debug, Clone, Copy)]
struct BlockAngles {
    scale: f64,
}

impl BlockAngles {
    fn new(tau: f64, nbar: f64) -> Result<Self> {
        if !(nbar > 0.0) || !nbar.is_finite() {
            return Err(Error::InvalidMean(nbar));
        }
        Ok(Self {
            scale: tau / nbar.sqrt(),
        })
    }

    fn angle(&self, n: i64) -> f64 {
        if n <= 0 {
            0.0
        } else {
            self.scale * (n as f64).sqrt()
        }
    }

    fn c(&self, n: i64) -> f64 {
        self.angle(n).cos()
    }

    fn s(&self, n: i64) -> f64 {
        self.angle(n).sin()
    }
}

/// Per-photon-number matrices whose `|b_n|²`-weighted sums give the channel
/// images: `E_ij = Σ_n |b_n|² F_ij(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrixSet {
    pub n: usize,
    pub f00: Matrix2<C64>,
    pub f01: Matrix2<C64>,
    pub f10: Matrix2<C64>,
    pub f11: Matrix2<C64>,
}

impl FMatrixSet {
    pub fn get(&self, i: usize, j: usize) -> &Matrix2<C64> {
        match (i, j) {
            (0, 0) => &self.f00,
            (0, 1) => &self.f01,
            (1, 0) => &self.f10,
            _ => &self.f11,
        }
    }
}

/// `F_ij(n)` at reduced time `tau` with `t = τ/(g√n̄)`.
///
/// Amplitude ratios `b_{n+1}/b_n` and `b_{n+2}/b_n` enter the coherences;
/// they are taken as zero when `b_n = 0`, where the weight `|b_n|²` vanishes
/// anyway.
pub fn f_matrices(n: usize, tau: f64, nbar: f64, drive: &DriveDistribution) -> Result<FMatrixSet> {
    let ang = BlockAngles::new(tau, nbar)?;
    let n_i = n as i64;
    let (c, s) = (|k: i64| ang.c(k), |k: i64| ang.s(k));
    let bn = drive.amplitude(n);
    let (r1, r2) = if bn.norm_sqr() > 0.0 {
        (drive.amplitude(n + 1) / bn, drive.amplitude(n + 2) / bn)
    } else {
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    };
    let re = |x: f64| C64::new(x, 0.0);

    let x00 = r1.conj() * (c(n_i) * s(n_i + 1));
    let f00 = Matrix2::new(re(c(n_i).powi(2)), x00, x00.conj(), re(s(n_i).powi(2)));

    let x11 = -r1.conj() * (s(n_i + 1) * c(n_i + 2));
    let f11 = Matrix2::new(re(s(n_i + 1).powi(2)), x11, x11.conj(), re(c(n_i + 1).powi(2)));

    let cs1 = c(n_i + 1) * s(n_i + 1);
    let f01 = Matrix2::new(
        -r1 * cs1,
        re(c(n_i) * c(n_i + 1)),
        -r2 * (s(n_i + 1) * s(n_i + 2)),
        r1 * cs1,
    );
    Ok(FMatrixSet {
        n,
        f10: f01.adjoint(),
        f00,
        f01,
        f11,
    })
}

/// Drive-space vectors `χ_{ip}` with `U(|drive⟩|i⟩) = Σ_p |χ_{ip}⟩|p⟩`,
/// stored on the window `lo..=hi`.
struct Branches {
    lo: i64,
    chi: [[Vec<C64>; 2]; 2],
}

fn branches(drive: &DriveDistribution, ang: BlockAngles) -> Branches {
    let lo = drive.n_min() as i64 - 1;
    let hi = drive.n_max() as i64 + 1;
    let len = (hi - lo + 1) as usize;
    let b = |k: i64| drive.amplitude_i(k);
    let mut chi: [[Vec<C64>; 2]; 2] = Default::default();
    for row in chi.iter_mut() {
        for v in row.iter_mut() {
            *v = vec![C64::new(0.0, 0.0); len];
        }
    }
    for (idx, k) in (lo..=hi).enumerate() {
        // |k,0⟩ → c_k |k,0⟩ + s_k |k-1,1⟩ ; |k,1⟩ → c_{k+1} |k,1⟩ - s_{k+1} |k+1,0⟩
        chi[0][0][idx] = b(k) * ang.c(k);
        chi[0][1][idx] = b(k + 1) * ang.s(k + 1);
        chi[1][0][idx] = -b(k - 1) * ang.s(k);
        chi[1][1][idx] = b(k) * ang.c(k + 1);
    }
    Branches { lo, chi }
}

/// Exact channel: `E_ij[p][q] = ⟨χ_{jq}|χ_{ip}⟩`, with `τ` normalized by the
/// drive's realized mean photon number.
pub fn build_channel_exact(drive: &DriveDistribution, cfg: &JcConfig) -> Result<QubitChannel> {
    let ang = BlockAngles::new(cfg.tau, drive.mean())?;
    let br = branches(drive, ang);
    let dot = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let image = |i: usize, j: usize| -> Matrix2<C64> {
        Matrix2::from_fn(|p, q| dot(&br.chi[j][q], &br.chi[i][p]))
    };
    let (e00, e01, e10, e11) = (image(0, 0), image(0, 1), image(1, 0), image(1, 1));
    let residual = (e00.trace().re - 1.0)
        .abs()
        .max((e11.trace().re - 1.0).abs())
        .max(e01.trace().norm());
    if residual > TRUNCATION_TOL {
        return Err(Error::TruncationError(residual));
    }
    QubitChannel::from_images(e00, e01, e10, e11)
}

/// Joint drive-qubit pure state `Σ_{n,q} ψ_{n,q} |n, q⟩`.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    n_min: usize,
    amps: Vec<[C64; 2]>,
}

impl BipartiteState {
    pub fn n_min(&self) -> usize {
        self.n_min
    }

    pub fn n_max(&self) -> usize {
        self.n_min + self.amps.len() - 1
    }

    /// `⟨n, q|ψ⟩`, zero outside the window.
    pub fn amplitude(&self, n: usize, q: usize) -> C64 {
        if n < self.n_min {
            return C64::new(0.0, 0.0);
        }
        self.amps.get(n - self.n_min).map_or(C64::new(0.0, 0.0), |a| a[q])
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Qubit state after tracing out the drive.
    pub fn reduced_qubit(&self) -> DensityMatrix {
        let m = DMatrix::from_fn(2, 2, |p, q| {
            self.amps.iter().map(|a| a[p] * a[q].conj()).sum::<C64>()
        });
        DensityMatrix::from_trusted(m)
    }
}

/// Joint state after the interaction, starting from `|drive⟩ ⊗ |qubit⟩`.
pub fn evolve_bipartite(drive: &DriveDistribution, qubit: &PureState, cfg: &JcConfig) -> Result<BipartiteState> {
    if qubit.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: qubit.dim(),
        });
    }
    let ang = BlockAngles::new(cfg.tau, drive.mean())?;
    let br = branches(drive, ang);
    let (q0, q1) = (qubit.amplitude(0), qubit.amplitude(1));
    // The window starts at n_min - 1, which is -1 only for drives touching the
    // vacuum; that slot is always empty.
    let skip = usize::from(br.lo < 0);
    let amps: Vec<[C64; 2]> = (skip..br.chi[0][0].len())
        .map(|idx| {
            [
                q0 * br.chi[0][0][idx] + q1 * br.chi[1][0][idx],
                q0 * br.chi[0][1][idx] + q1 * br.chi[1][1][idx],
            ]
        })
        .collect();
    Ok(BipartiteState {
        n_min: (br.lo + skip as i64) as usize,
        amps,
    })
}
