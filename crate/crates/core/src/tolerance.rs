//! Float comparison used by every verification check. Algorithms themselves
//! compare exactly; only checks of proven inequalities get this slack.

/// Absolute slack, scaled by `1 + max(|a|, |b|)`.
pub const TOLERANCE: f64 = 1e-9;

#[inline]
pub fn slack_scale(a: f64, b: f64) -> f64 {
    TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

/// `a >= b` up to [`TOLERANCE`].
#[inline]
pub fn approx_ge(a: f64, b: f64) -> bool {
    a >= b - slack_scale(a, b)
}

#[inline]
pub fn approx_le(a: f64, b: f64) -> bool {
    approx_ge(b, a)
}
