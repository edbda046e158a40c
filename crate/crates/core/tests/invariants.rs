use std::sync::OnceLock;

use orthozeros::kac::{kac_density, monomial_density};
use orthozeros::montecarlo::{count_real_zeros, sample_coeffs, CoeffDist, CountConfig, CountingGrid};
use orthozeros::orthopoly::{build_recurrence, eval_poly, kernel_triple, RecurrenceTable};
use orthozeros::weights::{make_freud, WeightSpec};
use proptest::prelude::*;

fn quartic() -> &'static (WeightSpec, RecurrenceTable) {
    static T: OnceLock<(WeightSpec, RecurrenceTable)> = OnceLock::new();
    T.get_or_init(|| {
        let spec = make_freud(1.0, 4.0).unwrap();
        let t = build_recurrence(&spec, 64, 1.5).unwrap();
        (spec, t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kac_density_is_even_and_nonnegative(x in -20.0f64..20.0, n in 1usize..=64) {
        let (_, t) = quartic();
        let d = kac_density(&kernel_triple(t, x, n).unwrap());
        let e = kac_density(&kernel_triple(t, -x, n).unwrap());
        prop_assert!(d >= 0.0 && d.is_finite());
        prop_assert!((d - e).abs() <= 1e-10 * d.max(1e-300));
    }

    #[test]
    fn parity_of_orthonormal_polynomials(x in 0.01f64..5.0, j in 0usize..=64) {
        let (_, t) = quartic();
        let p = eval_poly(t, x, j).unwrap().value(j);
        let q = eval_poly(t, -x, j).unwrap().value(j);
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((p - s * q).abs() <= 1e-12 * p.abs().max(1e-300));
    }

    #[test]
    fn monomial_density_inverts(x in 0.05f64..0.999, n in 1usize..3000) {
        let inner = monomial_density(n, x);
        let outer = monomial_density(n, 1.0 / x) / (x * x);
        prop_assert!((inner - outer).abs() <= 1e-9 * inner.max(1e-12));
    }

    #[test]
    fn real_zero_counts_are_bounded_with_parity(seed in 0u64..1000, n in 1usize..=64) {
        let (spec, t) = quartic();
        let cfg = CountConfig::default();
        let grid = CountingGrid::new(spec, t, n, &cfg).unwrap();
        let s = sample_coeffs(CoeffDist::Gaussian(1.0), seed, 0, n).unwrap();
        let c = count_real_zeros(t, &grid, &s, &cfg).unwrap();
        let deg = s.degree().unwrap();
        prop_assert!(c.count <= deg);
        prop_assert_eq!(c.count % 2, deg % 2);
        prop_assert!(c.zeros.windows(2).all(|w| w[0] <= w[1]));
    }
}
