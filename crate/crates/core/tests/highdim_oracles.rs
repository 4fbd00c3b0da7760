use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatterlab_core::domain::{BoundaryCurve, CurveSpec, Domain, FourierCurve};
use scatterlab_core::energy::scattering_energy_direct;
use scatterlab_core::geometry::Metric;
use scatterlab_core::highdim::{
    energy_p_direct, highdim_identity, HDDomain, HDOptions, ModelSpace,
};
use scatterlab_core::Vec2;

// ∬_{B×B} |x − y|^{−2} over the unit ball in ℝ³ is 4π². Sampling x uniform in
// B and a uniform direction u, the inner integral along the ray is
// ∫_0^{t_e} t^{−2} t² dt = t_e, so the estimator is |B| · 4π · t_e.
fn ball_inverse_square_oracle(samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vol = 4.0 * PI / 3.0;
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..samples {
        let x = loop {
            let p: [f64; 3] = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            if p.iter().map(|v| v * v).sum::<f64>() < 1.0 {
                break p;
            }
        };
        let z = rng.gen_range(-1.0f64..1.0);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).sqrt();
        let u = [s * phi.cos(), s * phi.sin(), z];
        let b: f64 = x.iter().zip(&u).map(|(a, b)| a * b).sum();
        let c: f64 = x.iter().map(|v| v * v).sum::<f64>() - 1.0;
        let te = -b + (b * b - c).sqrt();
        let v = vol * 4.0 * PI * te;
        sum += v;
        sq += v * v;
    }
    let mean = sum / samples as f64;
    (
        mean,
        ((sq / samples as f64 - mean * mean) / samples as f64).sqrt(),
    )
}

#[test]
fn inverse_square_pair_integral_of_the_ball() {
    let (mean, err) = ball_inverse_square_oracle(1_000_000, 7);
    let exact = 4.0 * PI * PI;
    assert!((mean - exact).abs() < 1e-2 * exact, "{mean} ± {err}");
    assert!((mean - exact).abs() < 4.0 * err);
}

#[test]
fn identities_in_space_and_on_the_three_sphere() {
    let opts = HDOptions::default();
    let ball = HDDomain::ball(ModelSpace::euclidean(3).unwrap(), &[0.0; 3], 1.0).unwrap();
    let crit = highdim_identity(&ball, -1.0, &opts).unwrap();
    let target = 16.0 * PI * PI;
    assert!((crit.boundary_term - target).abs() < 5e-3 * target);
    assert!((crit.scale - target).abs() < 5e-3 * target);
    assert!(crit.residual < 5e-3);
    let id = highdim_identity(&ball, 0.0, &opts).unwrap();
    assert!(id.residual < 1e-2, "{id:?}");
    let cap = HDDomain::ball(ModelSpace::sphere(3).unwrap(), &[0.0; 3], 0.4).unwrap();
    let id = highdim_identity(&cap, 0.0, &opts).unwrap();
    assert!(id.residual < 1e-2, "{id:?}");
}

#[test]
fn two_dimensional_energy_matches_the_surface_code() {
    let curve = FourierCurve::ellipse(Vec2::ZERO, 2.0, 1.0);
    let d = Domain::new(
        BoundaryCurve::new(&Metric::plane(), &CurveSpec::Fourier(curve), 256).unwrap(),
        16,
    )
    .unwrap();
    let surface = scattering_energy_direct(&d).unwrap();
    let e = HDDomain::ellipsoid(ModelSpace::euclidean(2).unwrap(), &[0.0; 2], &[2.0, 1.0]).unwrap();
    let hd = energy_p_direct(
        &e,
        0.0,
        &HDOptions {
            azimuth: 256,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((hd - surface).abs() < 1e-3 * surface, "{hd} vs {surface}");
}
