//! Numerical checks of the pointwise identities behind the scattering energy.

use core::f64::consts::PI;

use super::geodesic::{connect, shoot};
use super::jacobi::jacobi_along;
use super::metric::Metric;
use super::transport::reflect_transport;
use crate::quadrature::periodic_trapezoid;
use crate::{Result, Vec2};

/// Divergence at `x` of the vector field `p ↦ 𝖱v_y(p)`, by centered
/// differences of `√det g · X` with step `h`, together with the predicted
/// value `w(y; x) ⟨∇_y r, v_y⟩`.
pub fn reflection_divergence(
    metric: &Metric,
    x: Vec2,
    y: Vec2,
    v_y: Vec2,
    h: f64,
) -> Result<(f64, f64)> {
    let field = |p: Vec2| -> Result<Vec2> {
        Ok(reflect_transport(metric, p, y, v_y)? * metric.sqrt_det(p))
    };
    let ex = Vec2::new(h, 0.0);
    let ey = Vec2::new(0.0, h);
    let dx = (field(x + ex)?.x - field(x - ex)?.x) / (2.0 * h);
    let dy = (field(x + ey)?.y - field(x - ey)?.y) / (2.0 * h);
    let fd = (dx + dy) / metric.sqrt_det(x);

    let gamma = connect(metric, x, y)?;
    let jac = jacobi_along(metric, &gamma)?;
    // the geodesic from x arrives at y along ∇_y r
    let predicted = jac.w * metric.inner(y, gamma.end_tangent, v_y);
    Ok((fd, predicted))
}

/// Flux `∫_{∂B_ε(x)} w(y; x) ds_y` over the geodesic circle of radius `ε`,
/// with `n` equally spaced initial directions.
///
/// Along the radial geodesic `w ds = (1 + c(ε))/a(ε) · a(ε) dθ`.
pub fn flux_of_w(metric: &Metric, x: Vec2, eps: f64, n: usize) -> Result<f64> {
    let (e1, e2) = metric.orthonormal_frame(x);
    let mut err = None;
    let total = periodic_trapezoid(0.0, 2.0 * PI, n, |theta| {
        let v = e1 * libm::cos(theta) + e2 * libm::sin(theta);
        match shoot(metric, x, v, eps) {
            Ok(g) => 1.0 + g.jacobi.c,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::{Profile, Tolerances};

    #[test]
    fn divergence_identity_on_sample_metrics() {
        let tol = Tolerances {
            ode: 1e-12,
            bvp: 1e-13,
            ..Tolerances::default()
        };
        let metrics = [
            Metric::plane(),
            Metric::sphere(),
            Metric::conformal_bump(0.1, 1.0),
            Metric::revolution(Profile::Sine),
        ];
        for m in metrics {
            let m = m.with_tolerances(tol);
            let (fd, pred) = reflection_divergence(
                &m,
                Vec2::new(0.3, -0.2),
                Vec2::new(-0.4, 0.5),
                Vec2::new(0.6, 0.8),
                1e-4,
            )
            .unwrap();
            assert!((fd - pred).abs() < 1e-4, "{fd} vs {pred}");
        }
    }

    #[test]
    fn flux_is_four_pi_on_small_circles() {
        for m in [
            Metric::plane(),
            Metric::sphere(),
            Metric::conformal_bump(0.1, 1.0),
        ] {
            let f = flux_of_w(&m, Vec2::new(0.2, 0.1), 1e-2, 64).unwrap();
            assert!((f - 4.0 * PI).abs() < 1e-3, "{f}");
        }
    }
}
