use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use radial_toeplitz::carleson::d_log;
use radial_toeplitz::spectral::{gamma, gamma_via_averages, gamma_via_distribution, kappa};
use radial_toeplitz::{MeasurePrimitive, QuadratureConfig, RadialMeasure};

fn primitive() -> impl Strategy<Value = MeasurePrimitive> {
    prop_oneof![
        (0.0f64..0.999).prop_map(|x| MeasurePrimitive::dirac(x).unwrap()),
        (
            prop::collection::vec(-3.0f64..3.0, 1..4),
            0.0f64..0.5,
            0.5f64..1.0
        )
            .prop_map(|(c, a, b)| MeasurePrimitive::poly(c, a, b).unwrap()),
        (-0.9f64..4.0, 0.0f64..4.0).prop_map(|(p, q)| MeasurePrimitive::jacobi(p, q).unwrap()),
    ]
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn measure() -> impl Strategy<Value = RadialMeasure> {
    prop::collection::vec((coeff(), primitive()), 1..4).prop_map(RadialMeasure::new)
}

fn positive_measure() -> impl Strategy<Value = RadialMeasure> {
    prop::collection::vec(
        (
            0.0f64..2.0,
            prop_oneof![
                (0.0f64..0.999).prop_map(|x| MeasurePrimitive::dirac(x).unwrap()),
                (-0.9f64..4.0, 0.0f64..4.0)
                    .prop_map(|(p, q)| MeasurePrimitive::jacobi(p, q).unwrap()),
            ],
        ),
        1..4,
    )
    .prop_map(|terms| {
        RadialMeasure::new(terms.into_iter().map(|(w, p)| (Complex64::new(w, 0.0), p)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_is_linear(a in measure(), b in measure(), s in coeff(), n in 0u64..300) {
        let combo = RadialMeasure::combine([(s, &a), (Complex64::new(1.0, 0.0), &b)]);
        let expected = s * gamma(&a, n) + gamma(&b, n);
        let scale = 1.0 + s.norm() * gamma(&a, n).norm() + gamma(&b, n).norm();
        prop_assert!((gamma(&combo, n) - expected).norm() <= 1e-12 * scale);
    }

    #[test]
    fn tail_mass_is_monotone_for_positive_measures(eta in positive_measure(), r in 0.0f64..0.999, dr in 0.0f64..0.5) {
        let r2 = (r + dr).min(0.999_999);
        let (t1, t2) = (eta.tail_mass(r).unwrap().re, eta.tail_mass(r2).unwrap().re);
        prop_assert!(t2 <= t1 + 1e-14 * (1.0 + t1));
        prop_assert!(kappa(&eta, r).unwrap().re >= 0.0);
    }

    #[test]
    fn jordan_parts_reconstruct(eta in measure(), n in 0u64..200) {
        let parts = eta.jordan_decompose().unwrap();
        for p in parts.as_array() {
            prop_assert!(p.is_positive());
        }
        let g = gamma(&eta, n);
        let back = gamma(&parts.recombine(), n);
        prop_assert!((g - back).norm() <= 1e-11 * (1.0 + g.norm()) + 1e-11 * parts.as_array().iter().map(|p| gamma(p, n).norm()).sum::<f64>());
    }

    #[test]
    fn quadrature_routes_match_moments(eta in measure(), n in 1u64..48) {
        let cfg = QuadratureConfig::default();
        let exact = gamma(&eta, n);
        let scale = 1.0 + eta.terms().iter().map(|t| t.coeff.norm() * gamma(&RadialMeasure::from_primitive(t.primitive.clone()), n).norm()).sum::<f64>();
        let d = gamma_via_distribution(&eta, n, &cfg).unwrap().value;
        let a = gamma_via_averages(&eta, n, &cfg).unwrap().value;
        prop_assert!((d - exact).norm() <= 1e-8 * scale, "{d} vs {exact}");
        prop_assert!((a - exact).norm() <= 1e-8 * scale, "{a} vs {exact}");
    }

    #[test]
    fn display_reparses_to_the_same_measure(eta in measure()) {
        let text = eta.to_string();
        let back = radial_toeplitz::dsl::parse_measure(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, eta);
    }

    #[test]
    fn d_log_is_a_metric(m in 0u64..1_000_000, n in 0u64..1_000_000, k in 0u64..1_000_000) {
        prop_assert_eq!(d_log(m, m), 0.0);
        prop_assert_eq!(d_log(m, n), d_log(n, m));
        prop_assert!(d_log(m, n) >= 0.0);
        prop_assert!(m == n || d_log(m, n) > 0.0);
        prop_assert!(d_log(m, k) <= d_log(m, n) + d_log(n, k) + 1e-15);
    }
}

#[test]
fn lebesgue_moments_are_exact() {
    let eta = RadialMeasure::lebesgue();
    for k in 0..100 {
        assert_relative_eq!(
            eta.moment(k).re,
            1.0 / (k as f64 + 2.0),
            max_relative = 1e-15
        );
    }
}
