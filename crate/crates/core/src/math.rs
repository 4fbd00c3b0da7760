/// `x mod period` in `[0, period)`, as `f64::rem_euclid` (unavailable in `core`).
pub(crate) fn wrap(x: f64, period: f64) -> f64 {
    let r = libm::fmod(x, period);
    if r < 0.0 {
        r + libm::fabs(period)
    } else {
        r
    }
}
