//! Recovery and classification quality measures.

use crate::error::{check_dim, invalid, Result};
use crate::numerics::{dist2, norm2, Matrix};

/// Entries with magnitude above this count as nonzero.
pub const DEFAULT_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Confusion {
    /// Compares predicted against actual labels position by position.
    pub fn from_labels(truth: impl IntoIterator<Item = bool>, predicted: impl IntoIterator<Item = bool>) -> Self {
        let mut c = Confusion::default();
        for (t, p) in truth.into_iter().zip(predicted) {
            match (t, p) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// Also called recall.
    pub fn sensitivity(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn specificity(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }

    /// `2PR/(P+R)`, zero when both are zero.
    pub fn f_score(&self) -> f64 {
        let (p, r) = (self.precision(), self.sensitivity());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    /// Matthews correlation coefficient, zero when a marginal is empty.
    pub fn mcc(&self) -> f64 {
        let (tp, fp, tn, fn_) = (self.tp as f64, self.fp as f64, self.tn as f64, self.fn_ as f64);
        let den = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
        if den == 0.0 {
            0.0
        } else {
            (tp * tn - fp * fn_) / den
        }
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.tp + self.tn + self.fp + self.fn_)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    /// `‖x̂ − x̄‖ / ‖x̄‖`
    pub estimation_error: f64,
    pub f_score: f64,
    /// `‖x̂ − x̄‖` (Frobenius for matrices)
    pub frobenius: f64,
    pub specificity: f64,
    pub sensitivity: f64,
    pub mcc: f64,
    /// Wall-clock time of the solve; filled in by the caller.
    pub seconds: f64,
}

impl MetricsReport {
    fn build(c: Confusion, err: f64, truth_norm: f64) -> Self {
        Self {
            estimation_error: if truth_norm > 0.0 { err / truth_norm } else { err },
            f_score: c.f_score(),
            frobenius: err,
            specificity: c.specificity(),
            sensitivity: c.sensitivity(),
            mcc: c.mcc(),
            seconds: 0.0,
        }
    }
}

/// Support metrics over all coordinates, entries above `threshold` in
/// magnitude counting as nonzero.
pub fn compute_metrics(truth: &[f64], estimate: &[f64], threshold: f64) -> Result<MetricsReport> {
    check_dim(truth.len(), estimate.len())?;
    let c = Confusion::from_labels(
        truth.iter().map(|v| v.abs() > threshold),
        estimate.iter().map(|v| v.abs() > threshold),
    );
    Ok(MetricsReport::build(c, dist2(truth, estimate), norm2(truth)))
}

/// Support metrics over the strictly upper triangle; errors over all
/// entries.
pub fn compute_matrix_metrics(truth: &Matrix, estimate: &Matrix, threshold: f64) -> Result<MetricsReport> {
    if truth.rows() != estimate.rows() || truth.cols() != estimate.cols() || !truth.is_square() {
        return Err(invalid("truth and estimate must be square matrices of equal size"));
    }
    let p = truth.rows();
    let upper = || (0..p).flat_map(move |i| (i + 1..p).map(move |j| (i, j)));
    let c = Confusion::from_labels(
        upper().map(|(i, j)| truth[(i, j)].abs() > threshold),
        upper().map(|(i, j)| estimate[(i, j)].abs() > threshold),
    );
    Ok(MetricsReport::build(
        c,
        truth.sub(estimate).frobenius_norm(),
        truth.frobenius_norm(),
    ))
}
