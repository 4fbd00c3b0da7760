//! Dormand–Prince 5(4) embedded Runge–Kutta integrator with adaptive steps.

use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h_min: f64,
}

impl StepControl {
    pub fn new(tol: f64) -> Self {
        StepControl {
            rtol: tol,
            atol: tol,
            h_max: f64::INFINITY,
            h_min: 1e-14,
        }
    }
}

/// Adaptive stepper holding the current state.
#[derive(Clone)]
pub(crate) struct Dopri<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub h: f64,
    k1: [f64; N],
    ctl: StepControl,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

impl<const N: usize> Dopri<N> {
    pub fn new<F>(f: &mut F, t0: f64, y0: [f64; N], h0: f64, ctl: StepControl) -> Self
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let k1 = f(t0, &y0);
        Dopri {
            t: t0,
            y: y0,
            h: h0.min(ctl.h_max),
            k1,
            ctl,
        }
    }

    /// Fifth-order solution after a step of size `h` from the current state,
    /// plus the embedded error vector and the last stage derivative.
    fn attempt<F>(&self, f: &mut F, h: f64) -> ([f64; N], [f64; N], [f64; N])
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let (t, y, k1) = (self.t, &self.y, &self.k1);
        let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
        let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * h,
            &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * h,
            &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(
                y,
                h,
                &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            y,
            h,
            &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y_new);
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        (y_new, err, k7)
    }

    /// State after a single fifth-order step of size `h` from the current
    /// state, without changing it.
    pub fn peek<F>(&self, f: &mut F, h: f64) -> [f64; N]
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        self.attempt(f, h).0
    }

    /// Takes one accepted step, never stepping past `t_end`. Returns the step
    /// length that was taken.
    pub fn step<F>(&mut self, f: &mut F, t_end: f64) -> Result<f64>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        loop {
            let remaining = t_end - self.t;
            let mut h = self.h.min(remaining).min(self.ctl.h_max);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h < self.ctl.h_min && !last {
                return Err(Error::StepUnderflow { t: self.t });
            }
            let (y_new, err, k7) = self.attempt(f, h);
            let mut e = 0.0f64;
            for i in 0..N {
                let sc = self.ctl.atol + self.ctl.rtol * self.y[i].abs().max(y_new[i].abs());
                let r = err[i] / sc;
                e = e.max(r.abs());
            }
            if !e.is_finite() {
                self.h = h * 0.1;
                if self.h < self.ctl.h_min {
                    return Err(Error::StepUnderflow { t: self.t });
                }
                continue;
            }
            let factor = if e == 0.0 {
                5.0
            } else {
                (0.9 * libm::pow(e, -0.2)).clamp(0.2, 5.0)
            };
            if e <= 1.0 {
                self.t = if last { t_end } else { self.t + h };
                self.y = y_new;
                self.k1 = k7;
                // keep the pre-clamp step so a short final step does not shrink later ones
                self.h = (if last { self.h.max(h) } else { h }) * factor;
                return Ok(h);
            }
            self.h = h * factor.min(1.0);
            if self.h < self.ctl.h_min {
                return Err(Error::StepUnderflow { t: self.t });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_to_tolerance() {
        let mut f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let mut s = Dopri::new(&mut f, 0.0, [0.0, 1.0], 0.1, StepControl::new(1e-10));
        let t_end = 10.0;
        let mut steps = 0;
        while s.t < t_end {
            s.step(&mut f, t_end).unwrap();
            steps += 1;
        }
        assert_eq!(s.t, t_end);
        assert!((s.y[0] - libm::sin(10.0)).abs() < 1e-8, "{}", s.y[0]);
        assert!((s.y[1] - libm::cos(10.0)).abs() < 1e-8);
        assert!(steps < 2000);
    }

    #[test]
    fn peek_does_not_advance() {
        let mut f = |_t: f64, y: &[f64; 1]| [y[0]];
        let s = Dopri::new(&mut f, 0.0, [1.0], 0.1, StepControl::new(1e-10));
        let y = s.peek(&mut f, 0.01);
        assert!((y[0] - libm::exp(0.01)).abs() < 1e-12);
        assert_eq!(s.t, 0.0);
    }
}
