use nalgebra::{DMatrix, SymmetricEigen};
use orthozeros::kac::kac_density;
use orthozeros::orthopoly::{
    build_recurrence, check_indices, eval_poly, gram_residual, kernel_triple, kernel_triple_shifted, Mesh,
    RecurrenceTable,
};
use orthozeros::scaling::{solve_mrs, CONSTANT_TOL};
use orthozeros::weights::make_freud;

fn jacobi(t: &RecurrenceTable, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            t.diag[i]
        } else if i + 1 == j {
            t.b(j)
        } else if j + 1 == i {
            t.b(i)
        } else {
            0.0
        }
    })
}

/// Physicists' Hermite values `H_0 .. H_n` from their own recurrence.
fn hermite_h(n: usize, x: f64) -> Vec<f64> {
    let mut h = vec![1.0, 2.0 * x];
    for k in 1..n {
        h.push(2.0 * x * h[k] - 2.0 * k as f64 * h[k - 1]);
    }
    h
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn gauss_hermite_rule_n10() {
    let spec = make_freud(0.5, 2.0).unwrap();
    let t = build_recurrence(&spec, 12, 1.5).unwrap();
    let n = 10;
    let eig = SymmetricEigen::new(jacobi(&t, n));
    let mut nodes: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let h = |x: f64| hermite_h(n, x)[n];
    let mut roots = Vec::new();
    let grid: Vec<f64> = (0..=4000).map(|k| -5.0 + k as f64 * 10.0 / 4000.0).collect();
    for w in grid.windows(2) {
        if h(w[0]).signum() != h(w[1]).signum() {
            roots.push(bisect(h, w[0], w[1]));
        }
    }
    assert_eq!(roots.len(), n);
    let fact: f64 = (1..n).map(|k| k as f64).product::<f64>() * n as f64;
    for (&(x, w), &r) in nodes.iter().zip(&roots) {
        assert!((x - r).abs() < 1e-12, "node {x} vs {r}");
        let hm1 = hermite_h(n, r)[n - 1];
        let exact = 2f64.powi(n as i32 - 1) * fact * std::f64::consts::PI.sqrt() / ((n * n) as f64 * hm1 * hm1);
        assert!((w - exact).abs() < 1e-12 * exact.max(1e-3), "weight {w} vs {exact}");
    }
}

#[test]
fn trace_identity_at_degree_20() {
    let spec = make_freud(1.0, 4.0).unwrap();
    let t = build_recurrence(&spec, 24, 1.5).unwrap();
    let n = 20;
    let p = |x: f64| eval_poly(&t, x, n).unwrap().value(n);
    let grid: Vec<f64> = (0..=20000).map(|k| -4.0 + k as f64 * 8.0 / 20000.0).collect();
    let mut zeros = Vec::new();
    for w in grid.windows(2) {
        if p(w[0]).signum() != p(w[1]).signum() {
            zeros.push(bisect(p, w[0], w[1]));
        }
    }
    assert_eq!(zeros.len(), n);
    let lhs: f64 = zeros.iter().map(|z| z * z).sum();
    let rhs: f64 = (0..n).map(|k| t.diag[k].powi(2)).sum::<f64>() + 2.0 * (1..n).map(|k| t.b(k).powi(2)).sum::<f64>();
    assert!((lhs - rhs).abs() < 1e-10 * rhs, "{lhs} vs {rhs}");
    assert!(zeros.iter().sum::<f64>().abs() < 1e-10);
}

#[test]
fn kernel_b_is_half_the_derivative_of_a() {
    let spec = make_freud(1.0, 4.0).unwrap();
    let t = build_recurrence(&spec, 40, 1.5).unwrap();
    let h = 1e-5;
    for x in [-2.5, -1.1, -0.3, 0.0, 0.7, 1.9, 3.0] {
        let k = kernel_triple(&t, x, 40).unwrap();
        let fd = (kernel_triple(&t, x + h, 40).unwrap().a() - kernel_triple(&t, x - h, 40).unwrap().a()) / (4.0 * h);
        assert!((k.b() - fd).abs() <= 1e-6 * (k.a() + k.b().abs()), "x = {x}: {} vs {fd}", k.b());
    }
}

#[test]
fn cauchy_schwarz_holds_on_1000_points() {
    let spec = make_freud(0.5, 2.0).unwrap();
    let t = build_recurrence(&spec, 200, 1.5).unwrap();
    let a = solve_mrs(&spec, 200, CONSTANT_TOL).unwrap().a_n;
    for i in 0..1000 {
        let x = -1.5 * a + 3.0 * a * (i as f64 + 0.5) / 1000.0;
        let k = kernel_triple(&t, x, 200).unwrap();
        assert!(k.a_val * k.c_val >= k.b_val * k.b_val * (1.0 - 1e-12), "x = {x}");
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let spec = make_freud(1.0, 4.0).unwrap();
    let t = build_recurrence(&spec, 30, 1.5).unwrap();
    let h = 1e-6;
    for x in [-2.0, -0.9, 0.1, 0.55, 1.7] {
        let v = eval_poly(&t, x, 30).unwrap();
        let up = eval_poly(&t, x + h, 30).unwrap();
        let dn = eval_poly(&t, x - h, 30).unwrap();
        for j in 0..=30 {
            let fd = (up.value(j) - dn.value(j)) / (2.0 * h);
            let scale = v.deriv(j).abs().max(v.value(j).abs()).max(1.0);
            assert!((v.deriv(j) - fd).abs() < 1e-6 * scale, "j = {j}, x = {x}");
        }
    }
}

#[test]
fn forced_rescaling_is_exact() {
    let spec = make_freud(0.5, 2.0).unwrap();
    let t = build_recurrence(&spec, 30, 1.5).unwrap();
    for n in 1..=30 {
        for i in 0..=20 {
            let x = -5.0 + 0.5 * i as f64;
            let plain = kernel_triple(&t, x, n).unwrap();
            for at in [0, n / 2, n - 1] {
                let s = kernel_triple_shifted(&t, x, n, Some(at)).unwrap();
                assert_ne!(s.exponent, plain.exponent);
                assert_eq!(s.a(), plain.a());
                assert_eq!(s.b(), plain.b());
                assert_eq!(s.c(), plain.c());
                assert_eq!(kac_density(&s), kac_density(&plain));
            }
        }
    }
}

#[test]
fn gram_matrix_on_an_independent_mesh() {
    let spec = make_freud(1.0, 4.0).unwrap();
    let t = build_recurrence(&spec, 150, 1.5).unwrap();
    let radius = t.mesh.signature.radius();
    let mesh = Mesh::half_line(radius, 3 * t.mesh.signature.panels as usize / 2 + 5, 16, 25, 3);
    let r = gram_residual(&spec, &t, &mesh, &check_indices(150)).unwrap();
    assert!(r <= 1e-8, "residual {r}");
}

#[test]
fn leading_coefficients_follow_the_recurrence() {
    let spec = make_freud(1.0, 6.0).unwrap();
    let t = build_recurrence(&spec, 60, 1.5).unwrap();
    for k in 1..=60 {
        let step = t.log_leading[k] - t.log_leading[k - 1];
        assert!((step + t.b(k).ln()).abs() < 1e-12);
    }
}
