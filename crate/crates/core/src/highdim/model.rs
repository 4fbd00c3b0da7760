//! Constant-curvature model spaces in ambient coordinates: `ℝⁿ` itself, the
//! unit sphere in `ℝⁿ⁺¹` and the hyperboloid `⟨x, x⟩ = −1, x_n > 0` in
//! Minkowski space (last coordinate timelike).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geometry::{cs_k, sn_k};
use crate::{Error, Result};

/// A point or tangent vector in ambient coordinates.
pub type Ambient = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpace {
    dim: usize,
    curvature: f64,
}

impl ModelSpace {
    pub fn new(dim: usize, curvature: f64) -> Result<ModelSpace> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "model dimension must be at least 2, got {dim}"
            )));
        }
        if curvature != 0.0 && curvature != 1.0 && curvature != -1.0 {
            return Err(Error::InvalidParameter(format!(
                "model curvature must be -1, 0 or 1, got {curvature}; rescale lengths by √|K| for other values"
            )));
        }
        Ok(ModelSpace { dim, curvature })
    }

    pub fn euclidean(dim: usize) -> Result<ModelSpace> {
        ModelSpace::new(dim, 0.0)
    }

    pub fn sphere(dim: usize) -> Result<ModelSpace> {
        ModelSpace::new(dim, 1.0)
    }

    pub fn hyperbolic(dim: usize) -> Result<ModelSpace> {
        ModelSpace::new(dim, -1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    pub fn ambient_dim(&self) -> usize {
        if self.curvature == 0.0 {
            self.dim
        } else {
            self.dim + 1
        }
    }

    pub fn sn(&self, r: f64) -> f64 {
        sn_k(self.curvature, r)
    }

    pub fn cs(&self, r: f64) -> f64 {
        cs_k(self.curvature, r)
    }

    /// `(f′)² + K f² − 1` at `r`.
    pub fn pythagorean_residual(&self, r: f64) -> f64 {
        let (f, df) = (self.sn(r), self.cs(r));
        df * df + self.curvature * f * f - 1.0
    }

    /// `|∂Bⁿ(1)| = 2π^{n/2}/Γ(n/2)`.
    pub fn unit_sphere_measure(&self) -> f64 {
        let h = 0.5 * self.dim as f64;
        2.0 * libm::pow(PI, h) / libm::tgamma(h)
    }

    /// Largest distance at which geodesics stay unique and minimizing.
    pub fn injectivity_radius(&self) -> f64 {
        if self.curvature > 0.0 {
            PI
        } else {
            f64::INFINITY
        }
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let s: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        if self.curvature < 0.0 {
            s - 2.0 * u[self.dim] * v[self.dim]
        } else {
            s
        }
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        libm::sqrt(self.inner(v, v).max(0.0))
    }

    /// The base point: `0`, the north pole, or the hyperboloid vertex.
    pub fn origin(&self) -> Ambient {
        let mut o = vec![0.0; self.ambient_dim()];
        if self.curvature != 0.0 {
            o[self.dim] = 1.0;
        }
        o
    }

    /// Embeds `v ∈ ℝⁿ` as a tangent vector at the origin.
    pub fn tangent_at_origin(&self, v: &[f64]) -> Ambient {
        let mut out = vec![0.0; self.ambient_dim()];
        out[..self.dim].copy_from_slice(&v[..self.dim]);
        out
    }

    /// Tangent component of `w` at `x`.
    pub fn project(&self, x: &[f64], w: &[f64]) -> Ambient {
        if self.curvature == 0.0 {
            return w.to_vec();
        }
        // ⟨x, x⟩ = K in both curved models
        let c = self.inner(w, x) / self.curvature;
        w.iter().zip(x).map(|(a, b)| a - c * b).collect()
    }

    pub fn exp(&self, x: &[f64], v: &[f64]) -> Ambient {
        let t = self.norm(v);
        if t == 0.0 {
            return x.to_vec();
        }
        let (a, b) = (self.cs(t), self.sn(t) / t);
        x.iter().zip(v).map(|(p, w)| a * p + b * w).collect()
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let d: Ambient = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let chord = self.norm(&d);
        match self.curvature {
            k if k > 0.0 => 2.0 * libm::asin((0.5 * chord).min(1.0)),
            k if k < 0.0 => 2.0 * libm::asinh(0.5 * chord),
            _ => chord,
        }
    }

    /// Unit tangent at `x` pointing along the geodesic towards `y`, and the
    /// distance.
    pub fn unit_toward(&self, x: &[f64], y: &[f64]) -> Result<(Ambient, f64)> {
        let r = self.distance(x, y);
        if r == 0.0 {
            return Err(Error::InvalidParameter(
                "coincident points have no connecting direction".into(),
            ));
        }
        if r >= self.injectivity_radius() - 1e-9 {
            return Err(Error::Antipodal(r));
        }
        let c = self.cs(r);
        let mut u: Ambient = y.iter().zip(x).map(|(b, a)| b - c * a).collect();
        let s = self.norm(&u);
        for v in &mut u {
            *v /= s;
        }
        Ok((u, r))
    }

    /// Parallel transport of `v ∈ T_yM` along the geodesic to `x`.
    pub fn transport(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<Ambient> {
        if x == y {
            return Ok(v.to_vec());
        }
        let (ux, _) = self.unit_toward(x, y)?;
        let (uy, _) = self.unit_toward(y, x)?;
        let a = self.inner(v, &uy);
        Ok(v.iter()
            .zip(uy.iter().zip(&ux))
            .map(|(w, (p, q))| w - a * (p + q))
            .collect())
    }

    /// The reflection map `𝖱v = v⃗ + 2⟨v, ∇_y r⟩∇_x r`, from `T_yM` to `T_xM`.
    pub fn reflect(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<Ambient> {
        let (ux, _) = self.unit_toward(x, y)?;
        let (uy, _) = self.unit_toward(y, x)?;
        let a = self.inner(v, &uy);
        Ok(v.iter()
            .zip(uy.iter().zip(&ux))
            .map(|(w, (p, q))| w - a * (p - q))
            .collect())
    }

    /// Orthonormal basis of `T_xM`.
    pub fn tangent_frame(&self, x: &[f64]) -> Vec<Ambient> {
        let mut frame: Vec<Ambient> = Vec::with_capacity(self.dim);
        for i in 0..self.ambient_dim() {
            if frame.len() == self.dim {
                break;
            }
            let mut e = vec![0.0; self.ambient_dim()];
            e[i] = 1.0;
            let mut w = self.project(x, &e);
            for b in &frame {
                let c = self.inner(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
            let n = self.norm(&w);
            if n > 1e-6 {
                frame.push(w.into_iter().map(|v| v / n).collect());
            }
        }
        frame
    }

    /// `Σ cᵢ eᵢ` for a frame `e`.
    pub fn combine(frame: &[Ambient], c: &[f64]) -> Ambient {
        let mut out = vec![0.0; frame[0].len()];
        for (e, &ci) in frame.iter().zip(c) {
            for (o, v) in out.iter_mut().zip(e) {
                *o += ci * v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> [ModelSpace; 3] {
        [
            ModelSpace::euclidean(3).unwrap(),
            ModelSpace::sphere(3).unwrap(),
            ModelSpace::hyperbolic(3).unwrap(),
        ]
    }

    #[test]
    fn pythagorean_identity() {
        for m in models() {
            for k in 1..50 {
                let r = 0.06 * k as f64;
                assert!(m.pythagorean_residual(r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sphere_measures() {
        let m2 = ModelSpace::euclidean(2).unwrap();
        let m3 = ModelSpace::euclidean(3).unwrap();
        let m4 = ModelSpace::euclidean(4).unwrap();
        assert!((m2.unit_sphere_measure() - 2.0 * PI).abs() < 1e-12);
        assert!((m3.unit_sphere_measure() - 4.0 * PI).abs() < 1e-12);
        assert!((m4.unit_sphere_measure() - 2.0 * PI * PI).abs() < 1e-12);
        assert!(ModelSpace::new(3, 2.0).is_err() && ModelSpace::new(1, 0.0).is_err());
    }

    #[test]
    fn exp_distance_and_isometries() {
        for m in models() {
            let o = m.origin();
            let x = m.exp(&o, &m.tangent_at_origin(&[0.3, -0.2, 0.4]));
            let y = m.exp(&o, &m.tangent_at_origin(&[-0.5, 0.1, 0.2]));
            let (u, r) = m.unit_toward(&x, &y).unwrap();
            let back = m.exp(&x, &u.iter().map(|v| v * r).collect::<Vec<_>>());
            assert!(back.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-12));
            let frame = m.tangent_frame(&y);
            for v in &frame {
                let t = m.transport(&x, &y, v).unwrap();
                let rv = m.reflect(&x, &y, v).unwrap();
                assert!((m.norm(&t) - 1.0).abs() < 1e-12 && (m.norm(&rv) - 1.0).abs() < 1e-12);
                assert!(m.inner(&t, &x).abs() < 1e-12 || m.curvature() == 0.0);
            }
            // the direction to x maps to the direction pointing away from y
            let (uy, _) = m.unit_toward(&y, &x).unwrap();
            let t = m.transport(&x, &y, &uy).unwrap();
            assert!(t.iter().zip(&u).all(|(a, b)| (a + b).abs() < 1e-12));
        }
    }

    #[test]
    fn reflection_of_sphere_normals_in_space() {
        let m = ModelSpace::euclidean(3).unwrap();
        let x = [0.6, 0.0, 0.8];
        let y = [0.0, -1.0, 0.0];
        let rv = m.reflect(&x, &y, &y).unwrap();
        assert!(rv.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-14));
        // vectors orthogonal to the chord are untouched
        let v = [1.0, -0.6, 0.0];
        let rv = m.reflect(&x, &y, &v).unwrap();
        assert!(rv.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-15));
    }
}
