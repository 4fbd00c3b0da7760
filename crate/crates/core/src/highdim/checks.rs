//! Finite-difference divergences of the vector fields behind the identities.

use alloc::vec::Vec;

use super::model::{Ambient, ModelSpace};
use crate::Result;

/// `div X` at `z` by central differences along geodesics in an orthonormal
/// frame, with values transported back to `z`.
pub fn divergence_fd<F>(model: &ModelSpace, z: &[f64], h: f64, field: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<Ambient>,
{
    let mut div = 0.0;
    for e in model.tangent_frame(z) {
        let mut diff = 0.0;
        for sign in [1.0, -1.0] {
            let step: Vec<f64> = e.iter().map(|v| sign * h * v).collect();
            let q = model.exp(z, &step);
            let back = model.transport(z, &q, &field(&q)?)?;
            diff += sign * model.inner(&back, &e);
        }
        div += diff / (2.0 * h);
    }
    Ok(div)
}

/// `div_x(𝖱v_y)` by differences, and `(n−1)(f′+1)/f ⟨v_y, ∇_y r⟩`.
pub fn reflection_divergence_hd(
    model: &ModelSpace,
    x: &[f64],
    y: &[f64],
    v: &[f64],
    h: f64,
) -> Result<(f64, f64)> {
    let fd = divergence_fd(model, x, h, |q| model.reflect(q, y, v))?;
    let (toward_x, r) = model.unit_toward(y, x)?;
    let n = model.dim() as f64;
    let grad_y = -model.inner(v, &toward_x);
    Ok((fd, (n - 1.0) * (model.cs(r) + 1.0) / model.sn(r) * grad_y))
}

/// `div_y(f^{p−1}∇_y r)` by differences, and `(n−2+p) f^{p−2} f′`.
pub fn radial_power_divergence(
    model: &ModelSpace,
    x: &[f64],
    y: &[f64],
    p: f64,
    h: f64,
) -> Result<(f64, f64)> {
    let fd = divergence_fd(model, y, h, |q| {
        let (toward_x, r) = model.unit_toward(q, x)?;
        let c = -libm::pow(model.sn(r), p - 1.0);
        Ok(toward_x.into_iter().map(|v| c * v).collect())
    })?;
    let r = model.distance(x, y);
    let n = model.dim() as f64;
    Ok((
        fd,
        (n - 2.0 + p) * libm::pow(model.sn(r), p - 2.0) * model.cs(r),
    ))
}
