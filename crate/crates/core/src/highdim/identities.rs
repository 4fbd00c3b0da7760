//! `ℰ_p` and the integral identities relating it to boundary and interior
//! pair integrals of `f = sn_K(r)`.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::domain::{HDDomain, HDNode, SphereRule};
use crate::par::try_map_indexed;
use crate::quadrature::{pairwise_sum, GaussLegendre};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HDOptions {
    /// Polar and azimuthal nodes of the boundary sphere rules.
    pub polar: usize,
    pub azimuth: usize,
    /// Radial nodes per Monte Carlo ray and per deterministic volume ray.
    pub radial: usize,
    pub samples: usize,
    pub seed: u64,
    /// Samples per RNG stream; each chunk owns one stream.
    pub chunk: usize,
    /// Pairs closer than this fraction of the diameter are dropped from the
    /// energy sum.
    pub diag_cutoff: f64,
}

impl Default for HDOptions {
    fn default() -> Self {
        HDOptions {
            polar: 24,
            azimuth: 48,
            radial: 16,
            samples: 100_000,
            seed: 0x5ca7,
            chunk: 1024,
            diag_cutoff: 1e-3,
        }
    }
}

fn check_p(domain: &HDDomain, p: f64) -> Result<()> {
    let n = domain.model().dim() as f64;
    if !(p >= 2.0 - n - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "p = {p} is below 2 − n = {}",
            2.0 - n
        )));
    }
    Ok(())
}

/// `∬_{∂Ω×∂Ω} F(x, y)` with the inner sphere rule rotated so its pole sits at
/// the outer node; integrable singularities at `y = x` are then damped by
/// the polar Jacobian.
fn boundary_pair_sum<F>(domain: &HDDomain, opts: &HDOptions, f: F) -> Result<f64>
where
    F: Fn(&HDNode, &HDNode) -> Result<f64> + Sync + Send,
{
    let rule = SphereRule::new(domain.model().dim(), opts.polar, opts.azimuth);
    let outer = domain.boundary_nodes(&rule);
    let rows = try_map_indexed(outer.len(), |i| {
        let x = &outer[i];
        let inner = domain.boundary_nodes(&rule.about(&x.omega));
        let terms = inner
            .iter()
            .map(|y| Ok(y.weight * f(x, y)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(x.weight * pairwise_sum(&terms))
    })?;
    Ok(pairwise_sum(&rows))
}

/// `ℰ_p(Ω) = ½ ∬ f^p |ν_x − 𝖱ν_y|²`.
pub fn energy_p_direct(domain: &HDDomain, p: f64, opts: &HDOptions) -> Result<f64> {
    check_p(domain, p)?;
    let m = domain.model();
    let cutoff = opts.diag_cutoff * domain.diameter();
    let sum = boundary_pair_sum(domain, opts, |x, y| {
        let r = m.distance(&x.point, &y.point);
        if r < cutoff {
            return Ok(0.0);
        }
        let rv = m.reflect(&x.point, &y.point, &y.normal)?;
        let d: Vec<f64> = x.normal.iter().zip(&rv).map(|(a, b)| a - b).collect();
        Ok(libm::pow(m.sn(r), p) * m.inner(&d, &d))
    })?;
    Ok(0.5 * sum)
}

/// `∬_{∂Ω×∂Ω} f^p`.
pub fn boundary_power_sum(domain: &HDDomain, p: f64, opts: &HDOptions) -> Result<f64> {
    let m = domain.model();
    boundary_pair_sum(domain, opts, |x, y| {
        let r = m.distance(&x.point, &y.point);
        Ok(if r == 0.0 { 0.0 } else { libm::pow(m.sn(r), p) })
    })
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `∬_{Ω×Ω} F(r(x, y))` for integrands depending on distance only, for up
/// to four integrands at once. `x` is uniform in `Ω` and the direction of
/// `y` from `x` uniform on the unit sphere; the radial integral along each
/// ray is done by Gauss–Legendre after the substitution `t ∝ u^{1/(γ+1)}`,
/// which absorbs a `t^γ` singularity of `F · sn^{n−1}` at `t = 0`.
pub fn interior_pair_mc<F>(
    domain: &HDDomain,
    gamma: f64,
    opts: &HDOptions,
    integrand: F,
) -> Result<[McEstimate; 4]>
where
    F: Fn(f64) -> [f64; 4] + Sync + Send,
{
    if !(gamma > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "radial exponent {gamma} must exceed −1"
        )));
    }
    if opts.samples == 0 || opts.chunk == 0 {
        return Err(Error::InvalidParameter(
            "Monte Carlo needs samples and a positive chunk size".into(),
        ));
    }
    let m = domain.model();
    let n = m.dim();
    let rule = SphereRule::new(n, opts.polar.min(12), opts.azimuth.min(24));
    let volume = domain.volume(&rule, opts.radial);
    let scale = volume * m.unit_sphere_measure();
    let gl = GaussLegendre::new(opts.radial);
    let nodes: Vec<(f64, f64)> = gl.on_interval(0.0, 1.0).collect();
    let chunks = opts.samples.div_ceil(opts.chunk);
    let parts = try_map_indexed(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(c as u64);
        let count = opts.chunk.min(opts.samples - c * opts.chunk);
        let mut sum = [0.0; 4];
        let mut sq = [0.0; 4];
        for _ in 0..count {
            let x = domain.sample_interior(&mut rng);
            let u = domain.sample_direction(&x, &mut rng);
            let te = domain.exit_distance(&x, &u);
            let lead = libm::pow(te, gamma + 1.0) / (gamma + 1.0);
            let mut ray = [0.0; 4];
            for &(s, w) in &nodes {
                let t = te * libm::pow(s, 1.0 / (gamma + 1.0));
                let vals = integrand(t);
                let jac = w * lead * libm::pow(m.sn(t), (n - 1) as f64) * libm::pow(t, -gamma);
                for k in 0..4 {
                    ray[k] += jac * vals[k];
                }
            }
            for k in 0..4 {
                let v = scale * ray[k];
                sum[k] += v;
                sq[k] += v * v;
            }
        }
        Ok::<_, Error>((sum, sq, count))
    })?;
    let total: usize = parts.iter().map(|p| p.2).sum();
    let mut out = [McEstimate {
        mean: 0.0,
        std_error: 0.0,
        samples: total,
        seed: opts.seed,
    }; 4];
    for (k, est) in out.iter_mut().enumerate() {
        let s = pairwise_sum(&parts.iter().map(|p| p.0[k]).collect::<Vec<_>>());
        let q = pairwise_sum(&parts.iter().map(|p| p.1[k]).collect::<Vec<_>>());
        let mean = s / total as f64;
        let var = (q / total as f64 - mean * mean).max(0.0);
        est.mean = mean;
        est.std_error = libm::sqrt(var / total as f64);
    }
    Ok(out)
}

/// Both sides of the boundary–interior identity for `ℰ_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct HDIdentity {
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// `n |∂Bⁿ(1)| |Ω|`.
    pub scale: f64,
    /// `∬_{∂Ω×∂Ω} f^p`.
    pub boundary_term: f64,
    /// Everything else on the right, with its Monte Carlo error.
    pub interior_term: f64,
    pub interior_std_error: f64,
    pub volume: f64,
    pub samples: usize,
    pub seed: u64,
}

/// For `p = 2 − n`:
/// `ℰ_p = ∬ f^{2−n} − n|∂Bⁿ(1)||Ω| + K ∬_{Ω×Ω} f^{2−n}`;
/// for `p > 2 − n`:
/// `ℰ_p = ∬ f^p − (n−1)(n−2+p) ∬ f′f^{p−2} − (n−1+p) ∬ ((n−2+p) f^{p−2} − (n−1+p) K f^p)`.
pub fn highdim_identity(domain: &HDDomain, p: f64, opts: &HDOptions) -> Result<HDIdentity> {
    check_p(domain, p)?;
    let m = *domain.model();
    let nf = m.dim() as f64;
    let k = m.curvature();
    let lhs = energy_p_direct(domain, p, opts)?;
    let boundary_term = boundary_power_sum(domain, p, opts)?;
    let volume = domain.volume(
        &SphereRule::new(m.dim(), opts.polar.min(12), opts.azimuth.min(24)),
        opts.radial,
    );
    let scale = nf * m.unit_sphere_measure() * volume;
    let critical = (p - (2.0 - nf)).abs() < 1e-12;
    let (interior_term, interior_std_error, samples) = if critical {
        let (term, err, samples) = if k == 0.0 {
            (0.0, 0.0, 0)
        } else {
            let est = interior_pair_mc(domain, 0.0, opts, |t| {
                [libm::pow(m.sn(t), p), 0.0, 0.0, 0.0]
            })?;
            (k * est[0].mean, k.abs() * est[0].std_error, est[0].samples)
        };
        (term - scale, err, samples)
    } else {
        let gamma = (p + nf - 3.0).min(0.0);
        let (a, b) = ((nf - 1.0) * (nf - 2.0 + p), nf - 1.0 + p);
        let est = interior_pair_mc(domain, gamma, opts, |t| {
            let (f, df) = (m.sn(t), m.cs(t));
            let fp2 = libm::pow(f, p - 2.0);
            let fp = libm::pow(f, p);
            [
                -a * df * fp2 - b * ((nf - 2.0 + p) * fp2 - b * k * fp),
                0.0,
                0.0,
                0.0,
            ]
        })?;
        (est[0].mean, est[0].std_error, est[0].samples)
    };
    let rhs = boundary_term + interior_term;
    Ok(HDIdentity {
        p,
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / lhs.abs().max(scale),
        scale,
        boundary_term,
        interior_term,
        interior_std_error,
        volume,
        samples,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::highdim::ModelSpace;
    use core::f64::consts::PI;

    fn fast() -> HDOptions {
        HDOptions {
            polar: 16,
            azimuth: 32,
            ..Default::default()
        }
    }

    #[test]
    fn round_balls_have_zero_energy() {
        let e3 = ModelSpace::euclidean(3).unwrap();
        let ball = HDDomain::ball(e3, &[0.0; 3], 1.0).unwrap();
        assert!(energy_p_direct(&ball, -1.0, &fast()).unwrap().abs() < 1e-10);
        let s3 = ModelSpace::sphere(3).unwrap();
        let cap = HDDomain::ball(s3, &[0.3, 0.0, 0.0], 0.5).unwrap();
        for p in [-1.0, 0.0, 1.5] {
            assert!(energy_p_direct(&cap, p, &fast()).unwrap().abs() < 1e-10);
        }
        assert!(energy_p_direct(&cap, -1.5, &fast()).is_err());
    }

    #[test]
    fn ellipsoid_energy_is_positive() {
        let d = HDDomain::ellipsoid(
            ModelSpace::euclidean(3).unwrap(),
            &[0.0; 3],
            &[1.5, 1.0, 1.0],
        )
        .unwrap();
        assert!(energy_p_direct(&d, 0.0, &fast()).unwrap() > 0.1);
    }

    #[test]
    fn critical_identity_on_the_unit_ball() {
        let ball = HDDomain::ball(ModelSpace::euclidean(3).unwrap(), &[0.0; 3], 1.0).unwrap();
        let id = highdim_identity(&ball, -1.0, &HDOptions::default()).unwrap();
        let target = 16.0 * PI * PI;
        assert!(
            (id.boundary_term - target).abs() < 5e-3 * target,
            "{}",
            id.boundary_term
        );
        assert!((id.scale - target).abs() < 1e-9 * target);
        assert!(id.residual < 5e-3);
    }

    #[test]
    fn general_identity_on_balls() {
        let opts = HDOptions {
            samples: 20_000,
            ..fast()
        };
        let cases = [
            HDDomain::ball(ModelSpace::euclidean(3).unwrap(), &[0.0; 3], 1.0).unwrap(),
            HDDomain::ball(ModelSpace::sphere(3).unwrap(), &[0.0; 3], 0.4).unwrap(),
            HDDomain::ball(ModelSpace::hyperbolic(3).unwrap(), &[0.2, 0.0, 0.0], 0.6).unwrap(),
        ];
        for d in &cases {
            let id = highdim_identity(d, 0.0, &opts).unwrap();
            assert!(id.residual < 1e-2, "{id:?}");
            // the discrepancy is Monte Carlo noise, not bias
            assert!(
                (id.lhs - id.rhs).abs() < 4.0 * id.interior_std_error + 1e-3 * id.scale,
                "{id:?}"
            );
            assert!(id.interior_std_error < 1e-2 * id.scale, "{id:?}");
        }
    }

    #[test]
    fn identities_on_an_ellipsoid() {
        let d = HDDomain::ellipsoid(
            ModelSpace::euclidean(3).unwrap(),
            &[0.0; 3],
            &[1.5, 1.0, 1.0],
        )
        .unwrap();
        let opts = HDOptions {
            samples: 20_000,
            ..HDOptions::default()
        };
        for p in [-1.0, 0.0, 1.0] {
            let id = highdim_identity(&d, p, &opts).unwrap();
            assert!(id.lhs > 0.0);
            assert!(id.residual < 1e-2, "p={p}: {id:?}");
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_per_seed() {
        let d = HDDomain::ball(ModelSpace::sphere(3).unwrap(), &[0.0; 3], 0.4).unwrap();
        let opts = HDOptions {
            samples: 3000,
            chunk: 256,
            ..fast()
        };
        let a = interior_pair_mc(&d, 0.0, &opts, |t| [t, 1.0, 0.0, 0.0]).unwrap();
        let b = interior_pair_mc(&d, 0.0, &opts, |t| [t, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(a, b);
        let c = interior_pair_mc(&d, 0.0, &HDOptions { seed: 1, ..opts }, |t| {
            [t, 1.0, 0.0, 0.0]
        })
        .unwrap();
        assert_ne!(a[0].mean, c[0].mean);
        // ∬ 1 = |Ω|², with no variance from the radial part beyond the ray exit
        let vol = d.volume(&SphereRule::new(3, 12, 24), 16);
        assert!((a[1].mean - vol * vol).abs() < 4.0 * a[1].std_error + 1e-12);
    }
}
