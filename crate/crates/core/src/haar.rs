//! Seeded Haar-random sampling and Monte Carlo averages over pure states.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::densmat::{DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::C64;

/// Deterministic source of Haar-random states of a fixed dimension.
///
/// Equal `(seed, dim)` pairs produce identical streams on every platform.
#[derive(Debug, Clone)]
pub struct SeededSampler {
    seed: u64,
    dim: usize,
    rng: ChaCha8Rng,
}

/// SplitMix64 finalizer, used to derive child seeds.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `k`-th independent child stream of `seed`.
pub fn child_seed(seed: u64, k: u64) -> u64 {
    mix64(seed ^ mix64(k.wrapping_add(1)))
}

impl SeededSampler {
    pub fn new(seed: u64, dim: usize) -> Self {
        assert!(dim >= 1, "sampler dimension must be positive");
        Self {
            seed,
            dim,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Independent sampler for parallel worker `k`.
    pub fn child(&self, k: u64) -> Self {
        Self::new(child_seed(self.seed, k), self.dim)
    }

    fn gaussian(&mut self) -> C64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        C64::new(re, im)
    }

    /// Haar-random pure state: normalized vector of i.i.d. complex Gaussians.
    pub fn sample_pure(&mut self) -> PureState {
        loop {
            let v = DVector::from_fn(self.dim, |_, _| self.gaussian());
            if v.norm() > 1e-300 {
                return PureState::normalized(v).expect("non-zero vector");
            }
        }
    }

    /// Uniform real in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        rand::Rng::gen::<f64>(&mut self.rng)
    }

    /// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> DMatrix<C64> {
        DMatrix::from_fn(rows, cols, |_, _| self.gaussian())
    }

    /// Random density matrix `G G† / tr(G G†)` with `G` a `dim × rank`
    /// Ginibre matrix; `rank = dim` gives the Hilbert-Schmidt ensemble.
    pub fn sample_density(&mut self, rank: usize) -> DensityMatrix {
        let g = self.ginibre(self.dim, rank.max(1));
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        DensityMatrix::new(crate::densmat::symmetrize(&m.unscale(tr)))
            .expect("Ginibre product is a valid state")
    }

    /// Haar-random qubit unitary (QR of a Ginibre matrix with phase fix).
    pub fn sample_unitary2(&mut self) -> Matrix2<C64> {
        let g = self.ginibre(2, 2);
        let qr = g.qr();
        let q = qr.q();
        let r = qr.r();
        let mut u = Matrix2::zeros();
        for j in 0..2 {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
            for i in 0..2 {
                u[(i, j)] = q[(i, j)] * phase;
            }
        }
        u
    }

    /// Kraus operators of a random qubit channel with `rank` Kraus terms,
    /// taken from blocks of a random `2·rank × 2` isometry.
    pub fn sample_kraus(&mut self, rank: usize) -> Vec<Matrix2<C64>> {
        let rank = rank.max(1);
        let g = self.ginibre(2 * rank, 2);
        let q = g.qr().q();
        (0..rank)
            .map(|m| {
                Matrix2::new(
                    q[(2 * m, 0)],
                    q[(2 * m, 1)],
                    q[(2 * m + 1, 0)],
                    q[(2 * m + 1, 1)],
                )
            })
            .collect()
    }
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Unbiased sample standard deviation divided by `√n`.
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn contains(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }

    /// Welford accumulation over an iterator of samples.
    pub fn from_samples(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut n = 0usize;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for x in values {
            n += 1;
            let delta = x - mean;
            mean += delta / n as f64;
            m2 += delta * (x - mean);
        }
        if n < 2 {
            return Err(Error::TooFewSamples(n));
        }
        let var = m2 / (n - 1) as f64;
        Ok(Self {
            mean,
            stderr: (var / n as f64).sqrt(),
            samples: n,
        })
    }
}

/// Monte Carlo average of `f` over `n_samples` Haar-random states.
pub fn mc_average<F>(mut f: F, sampler: &mut SeededSampler, n_samples: usize) -> Result<McEstimate>
where
    F: FnMut(&PureState) -> Result<f64>,
{
    if n_samples < 2 {
        return Err(Error::TooFewSamples(n_samples));
    }
    let mut values = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let psi = sampler.sample_pure();
        values.push(f(&psi)?);
    }
    McEstimate::from_samples(values)
}
