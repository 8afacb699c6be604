//! Float helpers that work without std.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Rounds half away from zero, like `f64::round`.
#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
