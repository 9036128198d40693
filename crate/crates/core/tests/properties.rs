use cnls_core::charge::{free_trace, solve_charge, VolterraConfig};
use cnls_core::field::random_hs_field;
use cnls_core::io::Float;
use cnls_core::kernels::{s_delta_gamma_partial, s_delta_partial};
use cnls_core::solvers::{scgl_pointwise, SplitStepper};
use cnls_core::validators::{heat_smoothing_ratio, BoundCheck};
use cnls_core::{Complex64, KernelSpec, Mollifier, Nonlinearity, SpectralField};
use proptest::prelude::*;

fn field(n: usize, seed: u64) -> SpectralField {
    random_hs_field(1.0, n, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_conjugate_symmetry(t in -20.0f64..20.0, n in 0usize..64, gamma in 0.0f64..1.0) {
        let a = s_delta_partial(t, n);
        let b = s_delta_partial(-t, n);
        prop_assert!((a - b.conj()).norm() < 1e-9);
        let spec = KernelSpec::new(gamma, n).unwrap();
        let a = s_delta_gamma_partial(t, &spec);
        let b = s_delta_gamma_partial(-t, &spec);
        prop_assert!((a - b.conj()).norm() < 1e-9);
    }

    #[test]
    fn kernel_periodic_and_bounded(t in -10.0f64..10.0, n in 0usize..64, gamma in 0.0f64..1.0) {
        let a = s_delta_partial(t, n);
        let b = s_delta_partial(t + 2.0 * std::f64::consts::PI, n);
        prop_assert!((a - b).norm() < 1e-12 * (2 * n + 1) as f64 * 10.0);
        let spec = KernelSpec::new(gamma, n).unwrap();
        let peak = s_delta_gamma_partial(0.0, &spec);
        prop_assert!((peak.re - (2 * n + 1) as f64).abs() < 1e-12);
        prop_assert!(s_delta_gamma_partial(t, &spec).norm() <= peak.re + 1e-9);
    }

    #[test]
    fn snls_step_reversible_and_isometric(seed in 0u64..1000, dt in 1e-4f64..0.05, eps in 0.2f64..1.0) {
        let u = field(16, seed);
        let moll = Mollifier::new(eps, 16).unwrap();
        let mut s = SplitStepper::new(&moll, 16, Nonlinearity::Defocusing, 1.0, 0.0, false, 0.0);
        let fwd = s.snls_step(&u, dt);
        prop_assert!((fwd.mass() - u.mass()).abs() <= 1e-12 * u.mass());
        let back = s.snls_step(&fwd, -dt);
        prop_assert!(back.max_coeff_distance(&u) < 1e-11);
    }

    #[test]
    fn scgl_step_never_increases_mass(seed in 0u64..1000, gamma in 0.01f64..1.0, x0 in -3.0f64..3.0) {
        let u = field(16, seed);
        let moll = Mollifier::new(0.5, 16).unwrap();
        let mut s = SplitStepper::new(&moll, 16, Nonlinearity::Defocusing, 1.0, gamma, false, x0);
        let next = s.scgl_step(&u, 0.01, 0.0).unwrap();
        prop_assert!(next.mass() <= u.mass() * (1.0 + 1e-12));
    }

    #[test]
    fn defocusing_substep_contracts_pointwise(
        re in -3.0f64..3.0, im in -3.0f64..3.0, a in 0.0f64..2.0,
        p in 1.0f64..3.0, gamma in 0.0f64..1.0, dt in 0.0f64..0.5,
    ) {
        let u = Complex64::new(re, im);
        let v = scgl_pointwise(u, a, 1.0, p, gamma, dt).unwrap();
        prop_assert!(v.norm() <= u.norm() * (1.0 + 1e-15));
    }

    #[test]
    fn linear_charge_is_the_free_trace(seed in 0u64..1000) {
        let u0 = field(8, seed);
        let cfg = VolterraConfig {
            mode_cutoff: 8,
            horizon: 0.05,
            nonlinearity: Nonlinearity::Disabled,
            ..Default::default()
        };
        let charge = solve_charge(&u0, &cfg).unwrap();
        let free = free_trace(&u0, &charge.times);
        for (q, f) in charge.q.iter().zip(&free) {
            prop_assert!((q - f).norm() < 1e-12);
        }
    }

    #[test]
    fn charge_solver_is_deterministic(seed in 0u64..1000, gamma in 0.0f64..0.3) {
        let u0 = field(8, seed);
        let cfg = VolterraConfig { mode_cutoff: 8, horizon: 0.02, gamma, ..Default::default() };
        let a = solve_charge(&u0, &cfg).unwrap();
        let b = solve_charge(&u0, &cfg).unwrap();
        prop_assert_eq!(a.q, b.q);
    }

    #[test]
    fn heat_single_mode_identity(
        n in 1i64..40, gamma in 0.01f64..1.0, frac in 0.01f64..1.0,
        s in 0.0f64..1.0, gap in 0.0f64..2.0,
    ) {
        let t = frac / gamma;
        // keep e^{−2γn²t} out of the subnormal range
        prop_assume!(gamma * (n * n) as f64 * t < 300.0);
        let f = SpectralField::plane_wave(40, n, Complex64::new(1.0, 0.0));
        let check = heat_smoothing_ratio(gamma, s, s + gap, &[t], &[f]).unwrap();
        let k = (1.0 + (n * n) as f64).powf(gap / 2.0);
        let expected = k * (-gamma * (n * n) as f64 * t).exp() * (gamma * t).powf(gap / 2.0);
        prop_assert!((check.quantity - expected).abs() <= 1e-12 * expected.max(1e-300));
        prop_assert!(check.pass);
    }

    #[test]
    fn bound_check_ratio(q in 0.0f64..10.0, b in 1e-3f64..10.0, cap in 0.1f64..5.0) {
        let c = BoundCheck::new(q, b, cap);
        prop_assert_eq!(c.ratio, q / b);
        prop_assert_eq!(c.pass, q / b <= cap);
    }

    #[test]
    fn csv_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let text = Float(x).to_string();
        prop_assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}
