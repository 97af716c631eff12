//! Two-class linear discriminant analysis driven by an estimated precision
//! matrix.

use crate::error::{check_dim, invalid, Result};
use crate::numerics::{dot, Matrix};

#[derive(Clone, Debug)]
pub struct LdaModel {
    precision: Matrix,
    means: [Vec<f64>; 2],
    priors: [f64; 2],
}

/// Scores `δ₁`, `δ₂` and the predicted class (1 or 2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LdaScore {
    pub delta: [f64; 2],
    pub class: u8,
}

impl LdaModel {
    pub fn new(precision: Matrix, means: [Vec<f64>; 2], priors: [f64; 2]) -> Result<Self> {
        let p = precision.rows();
        precision.require_square("precision")?;
        check_dim(p, means[0].len())?;
        check_dim(p, means[1].len())?;
        if !(priors[0] > 0.0 && priors[1] > 0.0) || (priors[0] + priors[1] - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("class priors must be positive and sum to 1, got {priors:?}")));
        }
        Ok(Self { precision, means, priors })
    }

    /// Class means and proportions from training rows labelled 1 or 2.
    pub fn fit(samples: &Matrix, labels: &[u8], precision: Matrix) -> Result<Self> {
        check_dim(samples.rows(), labels.len())?;
        let p = samples.cols();
        let mut sums = [vec![0.0; p], vec![0.0; p]];
        let mut counts = [0usize; 2];
        for (i, &l) in labels.iter().enumerate() {
            let c = match l {
                1 => 0,
                2 => 1,
                other => return Err(invalid(format!("class labels must be 1 or 2, got {other}"))),
            };
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(samples.row(i)) {
                *s += x;
            }
        }
        if counts.contains(&0) {
            return Err(invalid("both classes need at least one training sample"));
        }
        let n = labels.len() as f64;
        let [s1, s2] = sums;
        let means = [
            s1.into_iter().map(|v| v / counts[0] as f64).collect(),
            s2.into_iter().map(|v| v / counts[1] as f64).collect(),
        ];
        Self::new(precision, means, [counts[0] as f64 / n, counts[1] as f64 / n])
    }

    pub fn score(&self, x: &[f64]) -> Result<LdaScore> {
        lda_score(self, x)
    }
}

/// `δ_l(x) = xᵀΩμ_l − ½ μ_lᵀΩμ_l + log π_l`; ties go to class 2.
pub fn lda_score(model: &LdaModel, x: &[f64]) -> Result<LdaScore> {
    check_dim(model.precision.rows(), x.len())?;
    let mut delta = [0.0; 2];
    for (c, d) in delta.iter_mut().enumerate() {
        let om = model.precision.matvec(&model.means[c]);
        *d = dot(x, &om) - 0.5 * dot(&model.means[c], &om) + model.priors[c].ln();
    }
    let class = if delta[0] > delta[1] { 1 } else { 2 };
    Ok(LdaScore { delta, class })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> LdaModel {
        LdaModel::new(Matrix::identity(2), [vec![1.0, 0.0], vec![0.0, 1.0]], [0.5, 0.5]).unwrap()
    }

    #[test]
    fn direct_substitution() {
        let s = lda_score(&toy(), &[1.0, 0.0]).unwrap();
        assert!((s.delta[0] - (0.5 + 0.5f64.ln())).abs() < 1e-15);
        assert!((s.delta[1] - (-0.5 + 0.5f64.ln())).abs() < 1e-15);
        assert_eq!(s.class, 1);
        assert_eq!(lda_score(&toy(), &[0.0, 1.0]).unwrap().class, 2);
    }

    #[test]
    fn ties_go_to_class_two() {
        assert_eq!(lda_score(&toy(), &[1.0, 1.0]).unwrap().class, 2);
    }

    #[test]
    fn validation() {
        assert!(lda_score(&toy(), &[1.0]).is_err());
        assert!(LdaModel::new(Matrix::identity(2), [vec![0.0; 2], vec![0.0; 2]], [0.7, 0.7]).is_err());
        assert!(LdaModel::new(Matrix::identity(2), [vec![0.0; 2], vec![0.0; 2]], [1.0, 0.0]).is_err());
    }

    #[test]
    fn fit_means_and_priors() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![3.0, 0.0], vec![0.0, 2.0], vec![0.0, 4.0]]).unwrap();
        let m = LdaModel::fit(&x, &[1, 1, 2, 2], Matrix::identity(2)).unwrap();
        assert_eq!(m.means[0], vec![2.0, 0.0]);
        assert_eq!(m.means[1], vec![0.0, 3.0]);
        assert_eq!(m.priors, [0.5, 0.5]);
        assert!(LdaModel::fit(&x, &[1, 1, 1, 1], Matrix::identity(2)).is_err());
        assert!(LdaModel::fit(&x, &[1, 3, 2, 2], Matrix::identity(2)).is_err());
    }
}
