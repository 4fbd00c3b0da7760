use proptest::prelude::*;
use scatterlab_core::geometry::{
    connect, reflect_along, reflect_closed_form, reflect_transport, Metric,
};
use scatterlab_core::highdim::{energy_p_direct, HDDomain, HDOptions, ModelSpace};
use scatterlab_core::Vec2;

fn model(kind: u8, dim: usize) -> ModelSpace {
    ModelSpace::new(dim, [-1.0, 0.0, 1.0][kind as usize]).unwrap()
}

fn point(m: &ModelSpace, c: &[f64]) -> Vec<f64> {
    m.exp(&m.origin(), &m.tangent_at_origin(&c[..m.dim()]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_reflection_is_an_isometry(
        kind in 0u8..3, dim in 2usize..5,
        a in prop::collection::vec(-0.7f64..0.7, 4),
        b in prop::collection::vec(-0.7f64..0.7, 4),
        c in prop::collection::vec(-1.0f64..1.0, 4),
        d in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let m = model(kind, dim);
        let (x, y) = (point(&m, &a), point(&m, &b));
        prop_assume!(m.distance(&x, &y) > 1e-3);
        let frame = m.tangent_frame(&y);
        let v = ModelSpace::combine(&frame, &c);
        let w = ModelSpace::combine(&frame, &d);
        let (rv, rw) = (m.reflect(&x, &y, &v).unwrap(), m.reflect(&x, &y, &w).unwrap());
        prop_assert!((m.inner(&rv, &rw) - m.inner(&v, &w)).abs() < 1e-10);
        // tangent at x
        if m.curvature() != 0.0 {
            prop_assert!(m.inner(&rv, &x).abs() < 1e-10);
        }
        // reflecting back from x to y is the inverse
        let back = m.reflect(&y, &x, &rv).unwrap();
        prop_assert!(back.iter().zip(&v).all(|(p, q)| (p - q).abs() < 1e-10));
    }

    #[test]
    fn comparison_functions_satisfy_the_pythagorean_identity(kind in 0u8..3, r in 0.0f64..3.0) {
        let m = model(kind, 3);
        prop_assert!(m.pythagorean_residual(r).abs() < 1e-10 * (1.0 + m.cs(r).powi(2)));
    }

    #[test]
    fn weighted_energy_is_nonnegative(
        a in 0.5f64..1.5, b in 0.5f64..1.5, c in 0.5f64..1.5, p in -1.0f64..2.0,
    ) {
        let d = HDDomain::ellipsoid(ModelSpace::euclidean(3).unwrap(), &[0.0; 3], &[a, b, c]).unwrap();
        let opts = HDOptions { polar: 8, azimuth: 16, ..Default::default() };
        prop_assert!(energy_p_direct(&d, p, &opts).unwrap() >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn surface_reflection_forms_agree(
        amp in 0.0f64..0.3,
        x in (-0.6f64..0.6, -0.6f64..0.6), y in (-0.6f64..0.6, -0.6f64..0.6),
        angle in 0.0f64..core::f64::consts::TAU,
    ) {
        let m = Metric::conformal_bump(amp, 1.0);
        let (x, y) = (Vec2::new(x.0, x.1), Vec2::new(y.0, y.1));
        prop_assume!((x - y).norm() > 1e-2);
        let v = m.normalize(y, Vec2::from_angle(angle));
        let gamma = connect(&m, y, x).unwrap();
        let frame = reflect_along(&m, &gamma, v);
        let closed = reflect_closed_form(&m, &gamma, v).unwrap();
        prop_assert!((frame - closed).norm() < 1e-7);
        prop_assert!((m.norm(x, frame) - 1.0).abs() < 1e-9);
        let back = reflect_transport(&m, y, x, frame).unwrap();
        prop_assert!((back - v).norm() < 1e-7);
    }
}
