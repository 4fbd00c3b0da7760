use super::geodesic::{connect, initial_step, step_control, GeodesicSolution};
use super::metric::Metric;
use crate::ode::Dopri;
use crate::{Result, Vec2};

/// Parallel transport of `v` from `γ.start` to `γ.end` by integrating
/// `V′ = −Γ(γ′, V)` alongside the geodesic.
pub fn parallel_transport(metric: &Metric, gamma: &GeodesicSolution, v: Vec2) -> Result<Vec2> {
    if metric.is_flat() || gamma.length == 0.0 {
        return Ok(v);
    }
    let mut f = |_t: f64, s: &[f64; 6]| {
        let p = Vec2::new(s[0], s[1]);
        let u = Vec2::new(s[2], s[3]);
        let w = Vec2::new(s[4], s[5]);
        let gam = metric.christoffel(p);
        let acc = -gam.contract(u, u);
        let dw = -gam.contract(u, w);
        [u.x, u.y, acc.x, acc.y, dw.x, dw.y]
    };
    let (p, u) = (gamma.start, gamma.start_tangent);
    let y0 = [p.x, p.y, u.x, u.y, v.x, v.y];
    let mut st = Dopri::new(
        &mut f,
        0.0,
        y0,
        initial_step(gamma.length),
        step_control(metric),
    );
    while st.t < gamma.length {
        st.step(&mut f, gamma.length)?;
    }
    Ok(Vec2::new(st.y[4], st.y[5]))
}

/// `𝖱v` for `v` at `γ.start`, landing at `γ.end`: reflect across the axis
/// orthogonal to `γ` and transport.
///
/// On a surface transport carries the frame `(T, JT)` at the start to the
/// frame at the end, so the reflected coordinates are simply re-expanded
/// there: `𝖱v = −⟨v, T₀⟩ T₁ + ⟨v, JT₀⟩ JT₁`.
pub fn reflect_along(metric: &Metric, gamma: &GeodesicSolution, v: Vec2) -> Vec2 {
    let (y, x) = (gamma.start, gamma.end);
    let t0 = gamma.start_tangent;
    let t1 = metric.normalize(x, gamma.end_tangent);
    let along = metric.inner(y, v, t0);
    let across = metric.inner(y, v, metric.rotate(y, t0));
    t1 * (-along) + metric.rotate(x, t1) * across
}

/// `𝖱v` by reflecting then integrating the transport ODE.
pub fn reflect_by_transport(metric: &Metric, gamma: &GeodesicSolution, v: Vec2) -> Result<Vec2> {
    let t0 = gamma.start_tangent;
    let s = v - t0 * (2.0 * metric.inner(gamma.start, v, t0));
    parallel_transport(metric, gamma, s)
}

/// `𝖱v = v⃗ + 2⟨v, ∇_y r⟩ ∇_x r` with `∇_y r = −T₀`, `∇_x r = T₁`.
pub fn reflect_closed_form(metric: &Metric, gamma: &GeodesicSolution, v: Vec2) -> Result<Vec2> {
    let moved = parallel_transport(metric, gamma, v)?;
    let grad_y = -gamma.start_tangent;
    Ok(moved + gamma.end_tangent * (2.0 * metric.inner(gamma.start, v, grad_y)))
}

/// The reflection map: `v` at `y` to `𝖱v` at `x`; identity when `x = y`.
pub fn reflect_transport(metric: &Metric, x: Vec2, y: Vec2, v: Vec2) -> Result<Vec2> {
    if x == y {
        return Ok(v);
    }
    let gamma = connect(metric, y, x)?;
    Ok(reflect_along(metric, &gamma, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::Profile;

    #[test]
    fn planar_reflection_examples() {
        let m = Metric::plane();
        let (y, x) = (Vec2::ZERO, Vec2::new(1.0, 0.0));
        assert_eq!(
            reflect_transport(&m, x, y, Vec2::new(0.0, 1.0)).unwrap(),
            Vec2::new(0.0, 1.0)
        );
        // the tangential component is reversed by the reflection
        assert_eq!(
            reflect_transport(&m, x, y, Vec2::new(1.0, 0.0)).unwrap(),
            Vec2::new(-1.0, 0.0)
        );
        assert_eq!(
            reflect_transport(&m, y, y, Vec2::new(0.3, 0.4)).unwrap(),
            Vec2::new(0.3, 0.4)
        );
    }

    #[test]
    fn tangent_is_transported_to_tangent() {
        let m = Metric::conformal_bump(0.3, 1.0);
        let g = connect(&m, Vec2::new(-0.5, 0.1), Vec2::new(0.6, 0.5)).unwrap();
        let t = parallel_transport(&m, &g, g.start_tangent).unwrap();
        assert!((t - g.end_tangent).norm() < 1e-8);
    }

    #[test]
    fn three_reflection_constructions_agree() {
        let metrics = [
            Metric::sphere(),
            Metric::hyperbolic(),
            Metric::conformal_bump(0.2, 1.0),
            Metric::revolution(Profile::Cubic { coefficient: 0.3 }),
        ];
        for m in &metrics {
            let g = connect(m, Vec2::new(0.1, -0.3), Vec2::new(-0.2, 0.45)).unwrap();
            let v = Vec2::new(0.8, -0.35);
            let a = reflect_along(m, &g, v);
            let b = reflect_by_transport(m, &g, v).unwrap();
            let c = reflect_closed_form(m, &g, v).unwrap();
            assert!((a - b).norm() < 1e-8, "{a:?} {b:?}");
            assert!((a - c).norm() < 1e-8, "{a:?} {c:?}");
            assert!((m.norm(g.end, a) - m.norm(g.start, v)).abs() < 1e-10);
            let transported = parallel_transport(m, &g, v).unwrap();
            assert!((m.norm(g.end, transported) - m.norm(g.start, v)).abs() < 1e-8);
        }
    }
}
