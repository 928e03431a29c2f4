use proptest::prelude::*;

use fsorf::channel::{db_to_linear, Detection, MalagaParams, RfParams, Scenario, Truncation};
use fsorf::mc::{estimate_capacity, estimate_outage, RngStream};
use fsorf::metrics::{
    diversity_order, ergodic_capacity_exact, ergodic_capacity_quadrature, outage_exact,
    outage_quadrature, BindingTerm,
};

fn scenario(fso: MalagaParams, rf: RfParams, db: f64, gamma_th_db: f64) -> Scenario {
    let snr = db_to_linear(db);
    Scenario::new(
        MalagaParams { avg_snr: snr, ..fso },
        RfParams { avg_snr: snr, ..rf },
        db_to_linear(gamma_th_db),
        Truncation::default(),
    )
    .unwrap()
}

fn m_below_mu() -> RfParams {
    RfParams { kappa: 2.0, mu: 3, m: 1, avg_snr: 1.0 }
}

#[test]
fn capacity_grows_with_snr() {
    let fso = MalagaParams::strong_turbulence(6.7, Detection::ImDd, 1.0);
    let values: Vec<f64> = [0.0, 10.0, 20.0, 30.0]
        .iter()
        .map(|&db| {
            ergodic_capacity_exact(&scenario(fso.clone(), RfParams::rician_shadowed(1.0), db, 0.0))
                .unwrap()
                .value
        })
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
}

#[test]
fn capacity_m_below_mu_matches_quadrature_and_simulation() {
    let sc = scenario(MalagaParams::moderate_turbulence(6.7, Detection::Heterodyne, 1.0), m_below_mu(), 20.0, 5.0);
    let exact = ergodic_capacity_exact(&sc).unwrap();
    let quad = ergodic_capacity_quadrature(&sc).unwrap();
    assert!((exact.value / quad.value - 1.0).abs() < 1e-6, "{exact:?} {quad:?}");
    let mc = estimate_capacity(&sc, 400_000, &RngStream::new(5, 0));
    assert!((mc.mean - exact.value).abs() < 4.0 * mc.std_error, "{mc:?} vs {exact:?}");
}

#[test]
fn outage_quadrature_matches_simulation() {
    for (fso, rf) in [
        (MalagaParams::strong_turbulence(6.7, Detection::Heterodyne, 1.0), RfParams::rician_shadowed(1.0)),
        (MalagaParams::moderate_turbulence(6.7, Detection::ImDd, 1.0), m_below_mu()),
    ] {
        let sc = scenario(fso, rf, 15.0, 5.0);
        let quad = outage_quadrature(&sc).unwrap().value;
        let mc = estimate_outage(&sc, 1_000_000, &RngStream::new(9, 0));
        assert!((mc.mean - quad).abs() < 4.0 * mc.std_error, "{mc:?} vs {quad}");
    }
}

#[test]
fn simulation_is_reproducible() {
    let sc = scenario(MalagaParams::strong_turbulence(6.7, Detection::ImDd, 1.0), RfParams::rician_shadowed(1.0), 10.0, 5.0);
    let a = estimate_outage(&sc, 100_000, &RngStream::new(1, 3));
    let b = estimate_outage(&sc, 100_000, &RngStream::new(1, 3));
    let c = estimate_outage(&sc, 100_000, &RngStream::new(2, 3));
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_ne!(a.mean.to_bits(), c.mean.to_bits());
}

#[test]
fn diversity_binding_terms() {
    let fso = MalagaParams::gamma_gamma(2.29, 4, 6.7, Detection::Heterodyne, 1.0);
    let rf = RfParams { kappa: 2.0, mu: 3, m: 3, avg_snr: 1.0 };
    let rep = diversity_order(&scenario(fso, rf, 20.0, 5.0)).unwrap();
    assert_eq!(rep.binding_term, BindingTerm::AlphaOverR);
    assert!((rep.fitted_slope + rep.g_d).abs() < 0.05 * rep.g_d, "{rep:?}");
    assert!(rep.g_c > 0.0 && rep.g_c.is_finite());
    assert!(rep.fit_on_exact);

    let fso = MalagaParams::gamma_gamma(4.2, 3, 6.7, Detection::ImDd, 1.0);
    let rep = diversity_order(&scenario(fso, rf, 20.0, 5.0)).unwrap();
    assert_eq!(rep.binding_term, BindingTerm::BetaOverR);
    assert_eq!(rep.g_d, 1.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The end-to-end SNR never exceeds either hop's SNR.
    #[test]
    fn outage_dominates_single_hops(
        strong in prop::bool::ANY,
        imdd in prop::bool::ANY,
        db in 20.0f64..45.0,
        th_db in -5.0f64..10.0,
    ) {
        let det = if imdd { Detection::ImDd } else { Detection::Heterodyne };
        let fso = if strong {
            MalagaParams::strong_turbulence(6.7, det, 1.0)
        } else {
            MalagaParams::moderate_turbulence(6.7, det, 1.0)
        };
        let sc = scenario(fso, RfParams::rician_shadowed(1.0), db, th_db);
        let p = outage_exact(&sc).unwrap().value;
        let f1 = sc.fso.snr_cdf(sc.gamma_th).unwrap();
        let f2 = sc.rf.snr_cdf(sc.gamma_th);
        prop_assert!(p >= f1.max(f2), "{} < max({}, {})", p, f1, f2);
    }
}
