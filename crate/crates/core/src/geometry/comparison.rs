/// Generalized sine, cosine and cotangent of constant curvature `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonFns {
    pub sn: f64,
    pub cs: f64,
    /// `cs / sn`; infinite at `r = 0`.
    pub ct: f64,
}

pub fn sn_k(k: f64, r: f64) -> f64 {
    if k > 0.0 {
        let s = libm::sqrt(k);
        libm::sin(s * r) / s
    } else if k < 0.0 {
        let s = libm::sqrt(-k);
        libm::sinh(s * r) / s
    } else {
        r
    }
}

pub fn cs_k(k: f64, r: f64) -> f64 {
    if k > 0.0 {
        libm::cos(libm::sqrt(k) * r)
    } else if k < 0.0 {
        libm::cosh(libm::sqrt(-k) * r)
    } else {
        1.0
    }
}

/// `sn_K`, `cs_K = sn_K′` and `ct_K = cs_K / sn_K` at distance `r`.
///
/// For `K > 0` the cotangent changes sign at `π/(2√K)` and has a pole at
/// `π/√K`; callers stay below the first conjugate distance.
pub fn comparison_fns(k: f64, r: f64) -> ComparisonFns {
    let sn = sn_k(k, r);
    let cs = cs_k(k, r);
    ComparisonFns {
        sn,
        cs,
        ct: cs / sn,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn closed_form_values() {
        let c = comparison_fns(0.0, 2.0);
        assert_eq!((c.sn, c.cs, c.ct), (2.0, 1.0, 0.5));
        let c = comparison_fns(1.0, PI / 2.0);
        assert!((c.sn - 1.0).abs() < 1e-15 && c.cs.abs() < 1e-15 && c.ct.abs() < 1e-15);
        let c = comparison_fns(-1.0, 1.0);
        assert!((c.sn - 1.175_201_193_643_801_4).abs() < 1e-14);
        assert!((c.cs - 1.543_080_634_815_243_7).abs() < 1e-14);
    }

    #[test]
    fn continuous_in_curvature_at_zero() {
        for r in [0.1, 1.0, 2.5] {
            for k in [1e-10, -1e-10] {
                assert!((sn_k(k, r) - r).abs() < 1e-9);
                assert!((cs_k(k, r) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pythagorean_identity() {
        for k in [-2.0, -1.0, 0.0, 0.5, 1.0] {
            for r in [0.05, 0.4, 1.1] {
                let c = comparison_fns(k, r);
                assert!((c.cs * c.cs + k * c.sn * c.sn - 1.0).abs() < 1e-12);
            }
        }
    }
}
