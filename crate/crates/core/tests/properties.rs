use proptest::prelude::*;

use whitham_crest::kernels::{second_difference, KernelSpec};
use whitham_crest::quadrature::{integrate_panel, QuadratureConfig, Singularity};
use whitham_crest::special_functions::phi_s;
use whitham_crest::wave_solver::{GalerkinProblem, WaveFamily};

fn cfg(rel: f64) -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: rel,
        abs_tol: 1e-15,
        ..QuadratureConfig::default()
    }
}

fn specs() -> Vec<KernelSpec> {
    vec![
        KernelSpec::whitham(),
        KernelSpec::bidirectional(),
        KernelSpec::pure_homogeneous(0.5).unwrap(),
        KernelSpec::pure_homogeneous(0.3).unwrap(),
        KernelSpec::pure_logarithmic(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quadrature_is_linear(
        a in -2.0f64..1.0,
        len in 0.1f64..4.0,
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
        k in 0.5f64..6.0,
    ) {
        let b = a + len;
        let c = cfg(1e-12);
        let f = |x: f64| (k * x).cos();
        let g = |x: f64| (-x * x).exp();
        let h = |x: f64| alpha * f(x) + beta * g(x);
        let ff = integrate_panel(&f, a, b, &[], &c).unwrap().value;
        let gg = integrate_panel(&g, a, b, &[], &c).unwrap().value;
        let hh = integrate_panel(&h, a, b, &[], &c).unwrap().value;
        prop_assert!((hh - (alpha * ff + beta * gg)).abs() <= 1e-10 * (1.0 + hh.abs()));
    }

    #[test]
    fn quadrature_refines_monotonically(s in 0.15f64..0.9, b in 0.5f64..3.0) {
        // ∫₀ᵇ x^{s−1} dx = b^s/s, endpoint-singular
        let f = |x: f64| x.powf(s - 1.0);
        let exact = b.powf(s) / s;
        let sing = [Singularity::algebraic(0.0, s).unwrap()];
        let mut last_evals = 0;
        for rel in [1e-4, 1e-7, 1e-10] {
            let r = integrate_panel(&f, 0.0, b, &sing, &cfg(rel)).unwrap();
            prop_assert!((r.value - exact).abs() <= 10.0 * rel * exact, "rel {rel}: {} vs {exact}", r.value);
            prop_assert!(r.evaluations >= last_evals);
            last_evals = r.evaluations;
        }
    }

    #[test]
    fn kernels_are_even(x in 1e-3f64..20.0, idx in 0usize..5) {
        let spec = &specs()[idx];
        prop_assert_eq!(spec.scaled(x).unwrap(), spec.scaled(-x).unwrap());
        prop_assert_eq!(spec.value(x).unwrap(), spec.value(-x).unwrap());
    }

    #[test]
    fn kernels_are_convex_on_random_grids(
        y in 0.05f64..8.0,
        frac in 1e-2f64..0.95,
        idx in 0usize..5,
    ) {
        let spec = &specs()[idx];
        let h = frac * y;
        let d = second_difference(|t| spec.scaled(t), h, y).unwrap();
        prop_assert!(d > 0.0, "{:?}: δ² at y = {y}, h = {h} is {d}", spec.family);
        let k1 = spec.scaled(y).unwrap();
        let k2 = spec.scaled(y + h).unwrap();
        prop_assert!(k2 < k1, "{:?} not decreasing at {y}", spec.family);
    }

    #[test]
    fn homogeneous_second_difference_scales(tau in 1.05f64..30.0, x in 0.05f64..5.0, s in 0.1f64..0.9) {
        let spec = KernelSpec::pure_homogeneous(s).unwrap();
        let direct = spec.scaled_second_difference(x, tau * x).unwrap();
        let model = x.powf(s - 1.0) * phi_s(tau, s).unwrap();
        prop_assert!((direct - model).abs() <= 1e-12 * model.abs().max(1e-300));
    }

    #[test]
    fn evaluations_are_deterministic(x in 1e-3f64..10.0, idx in 0usize..5) {
        let spec = &specs()[idx];
        prop_assert_eq!(spec.scaled(x).unwrap().to_bits(), spec.scaled(x).unwrap().to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn galerkin_residual_is_deterministic(seed in proptest::collection::vec(-0.05f64..0.05, 17), c in 0.6f64..1.0) {
        for family in [WaveFamily::Unidirectional, WaveFamily::Bidirectional] {
            let p = GalerkinProblem::new(family, std::f64::consts::TAU, 16).unwrap();
            let r1 = p.residual_coefficients(&seed, c);
            let r2 = p.residual_coefficients(&seed, c);
            prop_assert_eq!(r1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), r2.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
    }
}
