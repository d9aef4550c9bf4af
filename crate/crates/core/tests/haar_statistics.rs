use eigenfid::haar::{child_seed, SeededSampler};

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

#[test]
fn distribution_is_unitarily_invariant() {
    let n = 10_000;
    let mut s = SeededSampler::new(314, 2);
    let u = s.sample_unitary2();
    let mut plain = Vec::with_capacity(n);
    let mut rotated = Vec::with_capacity(n);
    for _ in 0..n {
        plain.push(s.sample_pure().amplitude(0).norm_sqr());
        let a = s.sample_pure();
        let ua0 = u[(0, 0)] * a.amplitude(0) + u[(0, 1)] * a.amplitude(1);
        rotated.push(ua0.norm_sqr());
    }
    let d = ks_statistic(plain, rotated);
    let critical = 1.628 * (2.0 / n as f64).sqrt();
    assert!(d < critical, "KS statistic {d} above 1% critical value {critical}");
}

#[test]
fn populations_are_uniform_for_qubits() {
    let n = 10_000;
    let mut s = SeededSampler::new(8, 2);
    let mut p: Vec<f64> = (0..n).map(|_| s.sample_pure().amplitude(0).norm_sqr()).collect();
    p.sort_by(f64::total_cmp);
    let d = p
        .iter()
        .enumerate()
        .map(|(k, &x)| ((k + 1) as f64 / n as f64 - x).abs().max((x - k as f64 / n as f64).abs()))
        .fold(0.0, f64::max);
    assert!(d < 1.628 / (n as f64).sqrt(), "one-sample KS statistic {d}");
}

#[test]
fn child_streams_are_reproducible_and_distinct() {
    let parent = SeededSampler::new(99, 3);
    let mut a = parent.child(5);
    let mut b = SeededSampler::new(child_seed(99, 5), 3);
    for _ in 0..20 {
        assert_eq!(a.sample_pure(), b.sample_pure());
    }
    let seeds: std::collections::HashSet<u64> = (0..1000).map(|k| child_seed(99, k)).collect();
    assert_eq!(seeds.len(), 1000);
}
