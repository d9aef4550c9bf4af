use std::f64::consts::{FRAC_PI_2, PI};

use eigenfid::channel::QubitChannel;
use eigenfid::densmat::{DensityMatrix, PureState};
use eigenfid::haar::SeededSampler;
use eigenfid::jcdrive::{
    binomial_drive, build_channel_exact, build_channel_taylor2, custom_drive, evolve_bipartite, f_matrices,
    fock_drive, poisson_drive, BinomialMode, DistributionFamily, DriveDistribution, JcConfig, DEFAULT_TAIL_TOL,
};
use eigenfid::C64;
use nalgebra::{DMatrix, DVector, Matrix2};

/// Reduced qubit state from diagonalizing the truncated interaction
/// Hamiltonian `g i (b ℓ† − b† ℓ)` on `n ≤ n_max + 2`.
fn dense_oracle(drive: &DriveDistribution, qubit: &PureState, cfg: &JcConfig) -> Matrix2<C64> {
    let top = drive.n_max() + 2;
    let dim = 2 * (top + 1);
    let idx = |n: usize, q: usize| 2 * n + q;
    let g = cfg.coupling;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for n in 1..=top {
        // ⟨n−1,1| H |n,0⟩ = i g √n
        let v = C64::new(0.0, g * (n as f64).sqrt());
        h[(idx(n - 1, 1), idx(n, 0))] = v;
        h[(idx(n, 0), idx(n - 1, 1))] = v.conj();
    }
    let t = cfg.interaction_time(drive.mean());
    let eig = h.symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -l * t)));
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    let psi0 = DVector::from_fn(dim, |k, _| drive.amplitude(k / 2) * qubit.amplitude(k % 2));
    let psi = u * psi0;
    Matrix2::from_fn(|p, q| (0..=top).map(|n| psi[idx(n, p)] * psi[idx(n, q)].conj()).sum())
}

fn random_drive(s: &mut SeededSampler, k: usize) -> DriveDistribution {
    match k % 4 {
        0 => poisson_drive(1.0 + 60.0 * s.uniform(), DEFAULT_TAIL_TOL).unwrap(),
        1 => binomial_drive(20.0 + (k as f64), 2.0 + (k % 3) as f64, BinomialMode::MomentMatched).unwrap(),
        2 => fock_drive(1 + k),
        _ => {
            let coeffs = (0..6).map(|_| C64::from_polar(s.uniform() + 0.05, 2.0 * PI * s.uniform())).collect();
            custom_drive(k % 5, coeffs).unwrap()
        }
    }
}

fn m2(rho: &DensityMatrix) -> Matrix2<C64> {
    let m = rho.matrix();
    Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

#[test]
fn partial_trace_matches_dense_evolution_and_channel() {
    let mut s = SeededSampler::new(2718, 2);
    for k in 0..20 {
        let drive = random_drive(&mut s, k);
        let qubit = s.sample_pure();
        let cfg = JcConfig::new(0.5 + s.uniform(), 1.0, 2.0 * PI * s.uniform()).unwrap();

        let joint = evolve_bipartite(&drive, &qubit, &cfg).unwrap();
        assert!((joint.norm() - 1.0).abs() < 1e-12);
        let reduced = m2(&joint.reduced_qubit());
        let oracle = dense_oracle(&drive, &qubit, &cfg);
        assert!((reduced - oracle).norm() < 1e-10, "case {k}: {}", (reduced - oracle).norm());

        let ch = build_channel_exact(&drive, &cfg).unwrap();
        let out = m2(&ch.apply(&DensityMatrix::from_pure(&qubit)).unwrap());
        assert!((out - reduced).norm() < 1e-10, "case {k}");
    }
}

#[test]
fn channel_equals_weighted_f_matrices() {
    let mut s = SeededSampler::new(31, 2);
    for k in 0..16 {
        let drive = random_drive(&mut s, k);
        let tau = 3.0 * s.uniform();
        let ch = build_channel_exact(&drive, &JcConfig::with_tau(tau).unwrap()).unwrap();
        let nbar = drive.mean();
        let mut acc = [Matrix2::<C64>::zeros(); 4];
        for (n, b) in drive.iter() {
            let f = f_matrices(n, tau, nbar, &drive).unwrap();
            for (slot, (i, j)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                acc[slot] += f.get(i, j).scale(b.norm_sqr());
            }
        }
        for (a, e) in acc.iter().zip(ch.images()) {
            assert!((a - e).norm() < 1e-12, "case {k}: {}", (a - e).norm());
        }
    }
}

#[test]
fn f_matrix_traces() {
    let d = poisson_drive(30.0, DEFAULT_TAIL_TOL).unwrap();
    let mut s = SeededSampler::new(3, 2);
    for _ in 0..50 {
        let n = d.n_min() + (s.uniform() * (d.n_max() - d.n_min()) as f64) as usize;
        let f = f_matrices(n, 4.0 * s.uniform(), 30.0, &d).unwrap();
        assert!((f.f00.trace() - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((f.f11.trace() - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(f.f01.trace().norm() < 1e-14);
        assert!((f.f10 - f.f01.adjoint()).norm() < 1e-15);
    }
}

#[test]
fn built_channels_preserve_trace() {
    let mut s = SeededSampler::new(4, 2);
    for k in 0..40 {
        let drive = random_drive(&mut s, k);
        let ch = build_channel_exact(&drive, &JcConfig::with_tau(6.0 * s.uniform()).unwrap()).unwrap();
        assert!(ch.tp_residual() < 1e-10);
        assert!(ch.min_choi_eigenvalue() >= -1e-8);
    }
}

fn max_and_frobenius(a: &QubitChannel, b: &QubitChannel) -> (f64, f64) {
    let mut max = 0.0f64;
    let mut fro = 0.0;
    for (x, y) in a.images().iter().zip(b.images()) {
        let d = x - y;
        max = max.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
        fro += d.norm_squared();
    }
    (max, fro.sqrt())
}

#[test]
fn taylor_channel_close_for_coherent_drive() {
    let cfg = JcConfig::with_tau(FRAC_PI_2).unwrap();
    let exact = build_channel_exact(&poisson_drive(400.0, DEFAULT_TAIL_TOL).unwrap(), &cfg).unwrap();
    let approx = build_channel_taylor2(400.0, 400.0, DistributionFamily::Poisson, &cfg).unwrap();
    let (max, _) = max_and_frobenius(&exact, &approx);
    assert!(max <= 1e-3, "max deviation {max}");
}

#[test]
fn taylor_error_shrinks_as_photon_number_doubles() {
    for tau in [0.5, FRAC_PI_2, 3.0] {
        let cfg = JcConfig::with_tau(tau).unwrap();
        let mut prev_poisson = f64::INFINITY;
        let mut prev_binomial = f64::INFINITY;
        for nbar in [100.0, 200.0, 400.0, 800.0, 1600.0] {
            let exact = build_channel_exact(&poisson_drive(nbar, DEFAULT_TAIL_TOL).unwrap(), &cfg).unwrap();
            let t = build_channel_taylor2(nbar, nbar, DistributionFamily::Poisson, &cfg).unwrap();
            let (_, fro) = max_and_frobenius(&exact, &t);
            assert!(fro < prev_poisson, "Poisson τ={tau} n̄={nbar}: {fro} ≥ {prev_poisson}");
            prev_poisson = fro;

            let var = 0.25 * nbar;
            let drive = binomial_drive(nbar, var, BinomialMode::MomentMatched).unwrap();
            let exact = build_channel_exact(&drive, &cfg).unwrap();
            let t = build_channel_taylor2(nbar, var, DistributionFamily::Binomial, &cfg).unwrap();
            let (_, fro) = max_and_frobenius(&exact, &t);
            assert!(fro < prev_binomial, "binomial τ={tau} n̄={nbar}: {fro} ≥ {prev_binomial}");
            prev_binomial = fro;
        }
    }
}

#[test]
fn taylor_without_spread_is_the_number_state_channel() {
    for n in [5usize, 40, 300] {
        let cfg = JcConfig::with_tau(1.1).unwrap();
        let exact = build_channel_exact(&fock_drive(n), &cfg).unwrap();
        let t = build_channel_taylor2(n as f64, 0.0, DistributionFamily::Binomial, &cfg).unwrap();
        let (max, _) = max_and_frobenius(&exact, &t);
        assert!(max < 1e-14, "n={n}: {max}");
    }
}

#[test]
fn fock_quarter_turn_fully_mixes_ground_input() {
    for n in [1usize, 10, 100] {
        let ch = build_channel_exact(&fock_drive(n), &JcConfig::with_tau(std::f64::consts::FRAC_PI_4).unwrap()).unwrap();
        let out = ch.apply(&DensityMatrix::from_pure(&PureState::basis(2, 0))).unwrap();
        assert!((out.purity() - 0.5).abs() < 1e-12);
        assert!((out.eigenerror() - 0.5).abs() < 1e-12);
    }
}
