use orthozeros::kac::{expected_zeros, expected_zeros_full_line};
use orthozeros::montecarlo::{
    all_zeros, count_real_zeros, empirical_measure, ks_to_ullman, mc_expected_zeros, sample_coeffs, CoeffDist,
    CoefficientSample, CountConfig, CountingGrid, EmpiricalMeasure,
};
use orthozeros::orthopoly::build_recurrence;
use orthozeros::scaling::{solve_mrs, ullman_cdf, CONSTANT_TOL};
use orthozeros::weights::make_freud;

#[test]
fn sign_changes_agree_with_eigenvalues() {
    let spec = make_freud(0.5, 2.0).unwrap();
    let table = build_recurrence(&spec, 50, 1.5).unwrap();
    let cfg = CountConfig::default();
    for n in [10, 30, 50] {
        let grid = CountingGrid::new(&spec, &table, n, &cfg).unwrap();
        let a_n = solve_mrs(&spec, n, CONSTANT_TOL).unwrap().a_n;
        let mut agree = 0;
        for trial in 0..100 {
            let s = sample_coeffs(CoeffDist::Gaussian(1.0), 11, trial, n).unwrap();
            let c = count_real_zeros(&table, &grid, &s, &cfg).unwrap();
            let real = all_zeros(&table, &s)
                .unwrap()
                .iter()
                .filter(|z| z.im.abs() <= 1e-7 * a_n)
                .count();
            agree += usize::from(real == c.count);
        }
        assert!(agree >= 98, "n = {n}: {agree}/100");
    }
}

#[test]
fn rademacher_interval_fractions_match_kac() {
    let spec = make_freud(1.0, 4.0).unwrap();
    let n = 100;
    let table = build_recurrence(&spec, n, 1.5).unwrap();
    let info = solve_mrs(&spec, n, CONSTANT_TOL).unwrap();
    let edges = [-1.0, -0.6, -0.2, 0.2, 0.6, 1.0];
    let mc = mc_expected_zeros(
        &spec,
        &table,
        n,
        400,
        CoeffDist::Rademacher,
        3,
        &edges,
        &CountConfig::default(),
    )
    .unwrap();
    for (b, w) in edges.windows(2).enumerate() {
        let kac = expected_zeros(&table, n, (info.expand(w[0]), info.expand(w[1])), 1e-8)
            .unwrap()
            .expected_count
            / n as f64;
        assert!((mc.bin_means[b] - kac).abs() < 0.03, "bin {b}: {} vs {kac}", mc.bin_means[b]);
    }
}

#[test]
fn coefficient_moments() {
    let n = 200_000;
    let cases = [
        (CoeffDist::Gaussian(2.0), 4.0, 3.0 * 16.0),
        (CoeffDist::Rademacher, 1.0, 1.0),
        (CoeffDist::Uniform, 1.0 / 3.0, 1.0 / 5.0),
    ];
    for (dist, var, m4) in cases {
        let c = sample_coeffs(dist, 5, 0, n - 1).unwrap().coeffs;
        let m = c.iter().sum::<f64>() / n as f64;
        let v = c.iter().map(|x| x * x).sum::<f64>() / n as f64;
        let sd_v = ((m4 - var * var) / n as f64).sqrt();
        assert!(m.abs() < 5.0 * (var / n as f64).sqrt(), "{dist}: mean {m}");
        assert!((v - var).abs() <= 5.0 * sd_v + 1e-12, "{dist}: variance {v}");
    }
    let r = sample_coeffs(CoeffDist::Rademacher, 5, 1, 999).unwrap().coeffs;
    assert!(r.iter().all(|&x| x == 1.0 || x == -1.0));
    let u = sample_coeffs(CoeffDist::Uniform, 5, 1, 999).unwrap().coeffs;
    assert!(u.iter().all(|&x| (-1.0..1.0).contains(&x)));
}

/// Scaled points at the Ullman quantiles `(k - 1/2) / m` sit at KS distance `1 / (2m)`.
#[test]
fn ks_on_a_quantile_grid() {
    let alpha = 4.0;
    let m = 200;
    let mut pts = Vec::with_capacity(m);
    for k in 0..m {
        let q = (k as f64 + 0.5) / m as f64;
        let (mut lo, mut hi) = (-1.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if ullman_cdf(alpha, mid, 1e-14).unwrap() < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        pts.push(0.5 * (lo + hi));
    }
    let measure = EmpiricalMeasure {
        scaled_points: pts,
        total: m,
        complex_count: 0,
    };
    let ks = ks_to_ullman(&measure, alpha, 1e-12).unwrap();
    assert!((ks - 0.5 / m as f64).abs() < 1e-9, "{ks}");
}

#[test]
fn expected_counts_grow_with_the_interval() {
    let spec = make_freud(1.0, 4.0).unwrap();
    let n = 120;
    let table = build_recurrence(&spec, n, 1.5).unwrap();
    let a = solve_mrs(&spec, n, CONSTANT_TOL).unwrap().a_n;
    let mut last = 0.0;
    for r in [0.05, 0.2, 0.5, 0.9, 1.0, 1.1, 1.5, 3.0] {
        let e = expected_zeros(&table, n, (-r * a, r * a), 1e-8).unwrap().expected_count;
        assert!(e >= last - 1e-8, "r = {r}: {e} < {last}");
        last = e;
    }
    let full = expected_zeros_full_line(&spec, &table, n, 1e-8).unwrap().expected_count;
    assert!(full >= last - 1e-8);
    assert!(full <= n as f64);
}

#[test]
fn clamping_is_rare_and_tiny() {
    let spec = make_freud(0.5, 2.0).unwrap();
    let table = build_recurrence(&spec, 300, 1.5).unwrap();
    for n in [50, 300] {
        let p = expected_zeros_full_line(&spec, &table, n, 1e-6).unwrap();
        assert!((p.clamped_nodes as f64) <= 0.01 * p.samples.len() as f64, "n = {n}: {}", p.clamped_nodes);
        assert!(p.worst_clamp >= -1e-10, "n = {n}: {}", p.worst_clamp);
    }
}

#[test]
fn counts_ignore_coefficient_scale() {
    let spec = make_freud(1.0, 4.0).unwrap();
    let n = 60;
    let table = build_recurrence(&spec, n, 1.5).unwrap();
    let cfg = CountConfig::default();
    let grid = CountingGrid::new(&spec, &table, n, &cfg).unwrap();
    for trial in 0..50 {
        let s = sample_coeffs(CoeffDist::Gaussian(1.0), 2, trial, n).unwrap();
        let scaled = CoefficientSample::from_coeffs(s.coeffs.iter().map(|c| 7.0 * c).collect());
        let a = count_real_zeros(&table, &grid, &s, &cfg).unwrap();
        let b = count_real_zeros(&table, &grid, &scaled, &cfg).unwrap();
        assert_eq!(a.count, b.count);
        for (x, y) in a.zeros.iter().zip(&b.zeros) {
            assert!((x - y).abs() <= 8.0 * f64::EPSILON * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let spec = make_freud(0.5, 2.0).unwrap();
    let table = build_recurrence(&spec, 80, 1.5).unwrap();
    let cfg = CountConfig::default();
    let run = |seed| mc_expected_zeros(&spec, &table, 80, 64, CoeffDist::Uniform, seed, &[-1.0, 0.0, 1.0], &cfg).unwrap();
    assert_eq!(run(9), run(9));
    assert_ne!(run(9).trials, run(10).trials);
    let z1 = all_zeros(&table, &sample_coeffs(CoeffDist::Gaussian(1.0), 4, 2, 80).unwrap()).unwrap();
    let z2 = all_zeros(&table, &sample_coeffs(CoeffDist::Gaussian(1.0), 4, 2, 80).unwrap()).unwrap();
    assert_eq!(z1, z2);
}

#[test]
fn eigen_zeros_fill_the_support() {
    let spec = make_freud(1.0, 4.0).unwrap();
    let n = 150;
    let table = build_recurrence(&spec, n, 1.5).unwrap();
    let info = solve_mrs(&spec, n, CONSTANT_TOL).unwrap();
    let z = all_zeros(&table, &sample_coeffs(CoeffDist::Gaussian(1.0), 0, 0, n).unwrap()).unwrap();
    assert_eq!(z.len(), n);
    let m = empirical_measure(&z, &info, 1e-8 * info.a_n);
    assert!(m.fraction_outside(1.05) < 0.05);
    assert!(ks_to_ullman(&m, 4.0, 1e-10).unwrap() < 0.1);
}
