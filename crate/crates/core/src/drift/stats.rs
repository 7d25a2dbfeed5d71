//! Divergence and significance primitives.

use crate::error::{Error, Result};
use crate::histogram::Histogram;

/// Jensen-Shannon divergence in nats over all histogram coordinates,
/// including the special slot. Bounded by `[0, ln 2]`.
pub fn js_divergence(p: &Histogram, q: &Histogram) -> Result<f64> {
    if !p.is_compatible(q) {
        return Err(Error::IncompatibleHistograms);
    }
    Ok(js_divergence_slices(p.coordinates(), q.coordinates()))
}

/// Same measure over paired probability coordinates. Each pair contributes
/// `½·p·ln(2p/(p+q)) + ½·q·ln(2q/(p+q))`; zero numerators contribute nothing.
pub fn js_divergence_slices(p: impl IntoIterator<Item = f64>, q: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = 0.0;
    for (a, b) in p.into_iter().zip(q) {
        let m = 0.5 * (a + b);
        let term = |x: f64| if x > 0.0 { x * (x / m).ln() } else { 0.0 };
        acc += term(a) + term(b);
    }
    (0.5 * acc).clamp(0.0, std::f64::consts::LN_2)
}

/// Add-one empirical tail probability of `observed` within `null_sample`:
/// `(1 + #{x >= observed}) / (N + 1)`.
pub fn empirical_p_value(observed: f64, null_sample: &[f64]) -> f64 {
    let exceed = null_sample.iter().filter(|&&x| x >= observed).count();
    (1 + exceed) as f64 / (null_sample.len() + 1) as f64
}

/// Holm step-down adjustment, returned in input order and not clamped at 1.
///
/// With `p_(1) <= ... <= p_(m)`, the adjusted value at rank `i` is
/// `max_{j<=i} (m - j + 1) * p_(j)`.
pub fn holm_normalize(raw_p: &[f64]) -> Vec<f64> {
    let m = raw_p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| raw_p[a].total_cmp(&raw_p[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running = f64::NEG_INFINITY;
    for (rank, &idx) in order.iter().enumerate() {
        running = running.max((m - rank) as f64 * raw_p[idx]);
        adjusted[idx] = running;
    }
    adjusted
}
