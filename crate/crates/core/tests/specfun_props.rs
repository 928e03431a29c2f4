use num_complex::Complex64;
use proptest::prelude::*;

use fsorf::specfun::{
    fox_h, ln_gamma_complex, meijer_g, BivariateFoxHSpec, FoxHSpec, QuadratureControl,
    SpecFunError,
};

fn ctl() -> QuadratureControl {
    QuadratureControl::with_tol(1e-11)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_formula(x in -4.99f64..4.99) {
        prop_assume!((x - x.round()).abs() > 1e-3);
        let z = Complex64::new(x, 0.0);
        let lhs = (ln_gamma_complex(z).unwrap() + ln_gamma_complex(1.0 - z).unwrap()).exp();
        let rhs = std::f64::consts::PI / (std::f64::consts::PI * x).sin();
        prop_assert!(((lhs.re - rhs) / rhs).abs() < 1e-11, "{} vs {}", lhs, rhs);
        prop_assert!(lhs.im.abs() < 1e-11 * rhs.abs());
    }

    #[test]
    fn unit_weights_match_meijer(z in 1e-2f64..20.0, b in 0.1f64..2.0, a in 2.5f64..4.0) {
        let spec = FoxHSpec::new(vec![(a, 1.0)], vec![(0.0, 1.0), (b, 1.0)], 0, 2).unwrap();
        let h = fox_h(&spec, z, &ctl()).unwrap();
        let g = meijer_g(2, 0, &[a], &[0.0, b], z, &ctl()).unwrap();
        prop_assert!(((h - g) / g).abs() < 1e-10);
    }

    /// `H[z | (a, cA); (b, cB)] = H[z^{1/c} | (a, A); (b, B)] / c`.
    #[test]
    fn weight_scaling(z in 1e-2f64..10.0, c in 0.5f64..3.0, b in 0.0f64..1.5) {
        let scaled = FoxHSpec::new(vec![(0.5, c)], vec![(b, c), (0.0, c)], 1, 2).unwrap();
        let plain = FoxHSpec::new(vec![(0.5, 1.0)], vec![(b, 1.0), (0.0, 1.0)], 1, 2).unwrap();
        let lhs = fox_h(&scaled, z, &ctl()).unwrap();
        let rhs = fox_h(&plain, z.powf(1.0 / c), &ctl()).unwrap() / c;
        prop_assert!(((lhs - rhs) / rhs).abs() < 1e-9, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn separable_bivariate(x in 0.05f64..5.0, y in 0.05f64..5.0, a in 1.5f64..3.0) {
        let first = FoxHSpec::new(vec![], vec![(0.0, 1.0)], 0, 1).unwrap();
        let second = FoxHSpec::new(vec![(1.0 - a, 1.0)], vec![(0.0, 1.0)], 1, 1).unwrap();
        let joint = BivariateFoxHSpec::new(vec![], 0, vec![], first.clone(), second.clone()).unwrap();
        let c = QuadratureControl::with_tol(1e-9);
        let both = joint.eval(x, y, &c).unwrap();
        let product = fox_h(&first, x, &c).unwrap() * fox_h(&second, y, &c).unwrap();
        prop_assert!(((both - product) / product).abs() < 1e-8);
    }
}

#[test]
fn refinement_does_not_increase_error() {
    let spec = FoxHSpec::meijer(3, 0, &[5.0], &[4.0, 2.29, 1.0]).unwrap();
    let mut c = QuadratureControl::with_tol(1e-14);
    c.max_nodes = 128;
    let mut errors = Vec::new();
    for _ in 0..6 {
        let err = match spec.eval_detailed(0.7, &c) {
            Ok(est) => est.rel_error,
            Err(SpecFunError::NonConvergence { rel_error, .. }) => rel_error,
            Err(e) => panic!("{e}"),
        };
        errors.push(err);
        c.max_nodes *= 2;
    }
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
    assert!(errors[5] < 1e-14, "{errors:?}");
}
