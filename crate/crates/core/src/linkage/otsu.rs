//! Otsu threshold selection over a fixed-width histogram on `[0, 1]`.
//!
//! Split `k` puts bins `0..k` in the lower class. The chosen split maximizes
//! `s0²/w0 + s1²/w1` (class mass `w`, first moment `s` in bin units), which is
//! the between-class variance up to a constant and so also minimizes the
//! within-class variance. Comparisons are exact in integer arithmetic as long
//! as the products fit in 128 bits; ties go to the lowest split.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub const DEFAULT_BINS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OtsuError {
    #[error("degenerate histogram: fewer than two non-empty bins")]
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(counts: Vec<u64>) -> Self {
        Histogram { counts }
    }

    /// Bins values in `[0, 1]` into `bins` equal-width bins. Values are
    /// clamped to the range; `1.0` lands in the last bin.
    pub fn from_values(values: impl IntoIterator<Item = f64>, bins: usize) -> Self {
        assert!(bins > 0, "histogram needs at least one bin");
        let mut counts = vec![0u64; bins];
        for v in values {
            counts[Self::bin_of(v, bins)] += 1;
        }
        Histogram { counts }
    }

    pub fn bin_of(value: f64, bins: usize) -> usize {
        let v = if value.is_nan() { 1.0 } else { value.clamp(0.0, 1.0) };
        ((v * bins as f64).floor() as usize).min(bins - 1)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Value of the boundary below bin `k`.
    pub fn boundary(&self, k: usize) -> f64 {
        k as f64 / self.bins() as f64
    }
}

/// Class criterion `(s0² w1 + s1² w0) / (w0 w1)` kept as a fraction.
#[derive(Clone, Copy)]
struct Criterion {
    num: u128,
    den: u128,
}

impl Criterion {
    fn new(w0: u128, s0: u128, w1: u128, s1: u128) -> Option<Self> {
        let num = s0
            .checked_mul(s0)?
            .checked_mul(w1)?
            .checked_add(s1.checked_mul(s1)?.checked_mul(w0)?)?;
        Some(Criterion { num, den: w0 * w1 })
    }

    fn approx(w0: f64, s0: f64, w1: f64, s1: f64) -> f64 {
        s0 * s0 / w0 + s1 * s1 / w1
    }

    fn cmp_exact(&self, other: &Criterion) -> Option<Ordering> {
        let l = self.num.checked_mul(other.den)?;
        let r = other.num.checked_mul(self.den)?;
        Some(l.cmp(&r))
    }
}

/// Index `k` of the optimal split (lower class = bins `0..k`).
pub fn otsu_split(hist: &Histogram) -> Result<usize, OtsuError> {
    if hist.counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(OtsuError::Degenerate);
    }
    let w_total: u128 = hist.counts.iter().map(|&c| c as u128).sum();
    let s_total: u128 = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| i as u128 * c as u128)
        .sum();

    let mut best: Option<(usize, Option<Criterion>, f64)> = None;
    let (mut w0, mut s0) = (0u128, 0u128);
    for k in 1..hist.bins() {
        let c = hist.counts[k - 1] as u128;
        w0 += c;
        s0 += (k as u128 - 1) * c;
        let w1 = w_total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let s1 = s_total - s0;
        let exact = Criterion::new(w0, s0, w1, s1);
        let approx = Criterion::approx(w0 as f64, s0 as f64, w1 as f64, s1 as f64);
        let better = match &best {
            None => true,
            Some((_, best_exact, best_approx)) => match (exact.as_ref(), best_exact.as_ref()) {
                (Some(e), Some(b)) => match e.cmp_exact(b) {
                    Some(ord) => ord == Ordering::Greater,
                    None => approx > *best_approx,
                },
                _ => approx > *best_approx,
            },
        };
        if better {
            best = Some((k, exact, approx));
        }
    }
    best.map(|(k, _, _)| k).ok_or(OtsuError::Degenerate)
}

/// Threshold value on `[0, 1]`: the bin boundary of the optimal split.
pub fn otsu_threshold(hist: &Histogram) -> Result<f64, OtsuError> {
    otsu_split(hist).map(|k| hist.boundary(k))
}
