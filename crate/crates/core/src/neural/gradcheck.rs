//! Central finite differences against analytic gradients.

use alloc::vec::Vec;

/// Worst mismatch found by [`compare`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mismatch {
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    /// `|a − n| / max(|a|, |n|, floor)`.
    pub relative: f64,
}

/// Denominator floor of the relative error.
pub const REL_FLOOR: f64 = 1e-6;

/// Compares `analytic` with `(f(x + h·e_i) − f(x − h·e_i)) / 2h` for every
/// coordinate of `x` and returns the worst coordinate (`None` for empty `x`).
pub fn compare(x: &[f64], analytic: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Option<Mismatch> {
    assert_eq!(x.len(), analytic.len(), "gradient length");
    let mut probe: Vec<f64> = x.to_vec();
    let mut worst: Option<Mismatch> = None;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let plus = f(&probe);
        probe[i] = x[i] - h;
        let minus = f(&probe);
        probe[i] = x[i];
        let numeric = (plus - minus) / (2.0 * h);
        let a = analytic[i];
        let relative = (a - numeric).abs() / a.abs().max(numeric.abs()).max(REL_FLOOR);
        if worst.is_none_or(|w| relative > w.relative || relative.is_nan()) {
            worst = Some(Mismatch {
                index: i,
                analytic: a,
                numeric,
                relative,
            });
        }
    }
    worst
}
