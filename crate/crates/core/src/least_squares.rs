//! Squared-error objective `f(x) = ½‖y − Ax‖²`.
//!
//! On this objective GraHTP is hard thresholding pursuit (HTP) and FGraHTP is
//! iterative hard thresholding (IHT). [`htp_reference`] and
//! [`iht_reference`] implement those two classical iterations directly, with
//! their own thresholding and a QR least-squares solve, so they can serve as
//! equivalence oracles for the generic engines.

use crate::error::{check_dim, invalid, Result};
use crate::numerics::{dot, Cholesky, Matrix, SupportSet};
use crate::solver::{Debiased, Objective};

const RIDGE: f64 = 1e-10;

/// Design matrix `A` (n × p) and observations `y` (length n).
#[derive(Clone, Debug)]
pub struct LinearModel {
    a: Matrix,
    y: Vec<f64>,
}

impl LinearModel {
    pub fn new(a: Matrix, y: Vec<f64>) -> Result<Self> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(invalid("design matrix must be non-empty"));
        }
        check_dim(a.rows(), y.len())?;
        if !a.is_finite() || y.iter().any(|v| !v.is_finite()) {
            return Err(invalid("design and observations must be finite"));
        }
        Ok(Self { a, y })
    }

    pub fn design(&self) -> &Matrix {
        &self.a
    }

    pub fn observations(&self) -> &[f64] {
        &self.y
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.a.matvec(x);
        self.y.iter().zip(&ax).map(|(y, v)| y - v).collect()
    }
}

impl Objective for LinearModel {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = self.residual(x);
        0.5 * dot(&r, &r)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r = self.residual(x);
        self.a.tr_matvec(&r).into_iter().map(|v| -v).collect()
    }

    fn debias(&self, support: &SupportSet, _start: &[f64]) -> Result<Debiased> {
        ls_debias(self, support)
    }

    fn restricted_hessian(&self, support: &SupportSet, _x: &[f64]) -> Matrix {
        self.a.select_columns(support.indices()).gram()
    }

    fn has_constant_curvature(&self) -> bool {
        true
    }
}

pub fn ls_value(m: &LinearModel, x: &[f64]) -> Result<f64> {
    check_dim(m.dim(), x.len())?;
    Ok(m.value(x))
}

/// `−Aᵀ(y − Ax)`
pub fn ls_gradient(m: &LinearModel, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(m.dim(), x.len())?;
    Ok(m.gradient(x))
}

/// Orthogonal projection `argmin ‖y − Ax‖` over `supp(x) ⊆ F`, solved via
/// the `|F| × |F|` normal equations. Rank-deficient restrictions are solved
/// with a `1e-10` ridge and flagged.
pub fn ls_debias(m: &LinearModel, support: &SupportSet) -> Result<Debiased> {
    let p = m.dim();
    if support.is_empty() {
        return Ok(Debiased {
            x: vec![0.0; p],
            flagged: false,
        });
    }
    let cols = m.a.select_columns(support.indices());
    let gram = cols.gram();
    let rhs = cols.tr_matvec(&m.y);
    let solved = Cholesky::new(&gram)
        .map(|c| (c.solve(&rhs), false))
        .filter(|(x, _)| x.iter().all(|v| v.is_finite()));
    let (coef, flagged) = match solved {
        Some(s) => s,
        None => {
            let mut ridged = gram.clone();
            for i in 0..ridged.rows() {
                ridged[(i, i)] += RIDGE;
            }
            let c = Cholesky::new(&ridged)
                .ok_or_else(|| invalid("restricted normal equations are singular even with ridge"))?;
            (c.solve(&rhs), true)
        }
    };
    Ok(Debiased {
        x: support.scatter(&coef, p),
        flagged,
    })
}

/// Hard thresholding pursuit: `x ← argmin{‖y − Az‖ : supp(z) ⊆ top_k(x + ηAᵀ(y − Ax))}`.
/// Returns the `t_max` iterates `x⁽¹⁾ … x⁽ᵀ⁾`.
pub fn htp_reference(m: &LinearModel, k: usize, eta: f64, x0: &[f64], t_max: usize) -> Result<Vec<Vec<f64>>> {
    reference(m, k, eta, x0, t_max, true)
}

/// Iterative hard thresholding: `x ← (x + ηAᵀ(y − Ax))_k`.
pub fn iht_reference(m: &LinearModel, k: usize, eta: f64, x0: &[f64], t_max: usize) -> Result<Vec<Vec<f64>>> {
    reference(m, k, eta, x0, t_max, false)
}

fn reference(m: &LinearModel, k: usize, eta: f64, x0: &[f64], t_max: usize, project: bool) -> Result<Vec<Vec<f64>>> {
    let (n, p) = (m.a.rows(), m.a.cols());
    check_dim(p, x0.len())?;
    if k == 0 || k > p {
        return Err(invalid(format!("k = {k} must be in 1..={p}")));
    }
    let a = &m.a;
    let mut x = x0.to_vec();
    let mut out = Vec::with_capacity(t_max);
    for _ in 0..t_max {
        let mut r = m.y.clone();
        for i in 0..n {
            for j in 0..p {
                r[i] -= a[(i, j)] * x[j];
            }
        }
        let mut z = x.clone();
        for j in 0..p {
            let mut c = 0.0;
            for i in 0..n {
                c += a[(i, j)] * r[i];
            }
            z[j] += eta * c;
        }
        let keep = largest_k(&z, k);
        let mut next = vec![0.0; p];
        if project {
            let coef = qr_least_squares(a, &m.y, &keep)?;
            for (j, c) in keep.iter().zip(coef) {
                next[*j] = c;
            }
        } else {
            for &j in &keep {
                next[j] = z[j];
            }
        }
        x = next;
        out.push(x.clone());
    }
    Ok(out)
}

/// Indices of the `k` largest `|z_j|`, lowest index first on ties.
fn largest_k(z: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..z.len()).collect();
    idx.sort_by(|&i, &j| z[j].abs().partial_cmp(&z[i].abs()).unwrap().then(i.cmp(&j)));
    let mut keep = idx[..k].to_vec();
    keep.sort_unstable();
    keep
}

/// Least squares on the columns `cols` of `a` by Householder QR.
fn qr_least_squares(a: &Matrix, y: &[f64], cols: &[usize]) -> Result<Vec<f64>> {
    let n = a.rows();
    let s = cols.len();
    if s > n {
        return Err(invalid("more selected columns than observations"));
    }
    // column-major working copy
    let mut q: Vec<Vec<f64>> = cols.iter().map(|&j| a.column(j)).collect();
    let mut b = y.to_vec();
    for c in 0..s {
        let norm = q[c][c..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("selected columns are rank deficient"));
        }
        let alpha = if q[c][c] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = q[c][c..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64]| {
            let proj: f64 = v.iter().zip(&col[c..]).map(|(a, b)| a * b).sum::<f64>() * 2.0 / vnorm2;
            for (ci, vi) in col[c..].iter_mut().zip(&v) {
                *ci -= proj * vi;
            }
        };
        for col in q.iter_mut().skip(c) {
            reflect(col);
        }
        reflect(&mut b);
    }
    let mut x = vec![0.0; s];
    for i in (0..s).rev() {
        let mut acc = b[i];
        for j in (i + 1)..s {
            acc -= q[j][i] * x[j];
        }
        x[i] = acc / q[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::norm2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_model(n: usize, p: usize, seed: u64) -> LinearModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));
        let y = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        LinearModel::new(a, y).unwrap()
    }

    #[test]
    fn identity_design_values() {
        let m = LinearModel::new(Matrix::identity(2), vec![1.0, 2.0]).unwrap();
        assert_eq!(ls_value(&m, &[0.0, 0.0]).unwrap(), 2.5);
        assert_eq!(ls_gradient(&m, &[0.0, 0.0]).unwrap(), vec![-1.0, -2.0]);
        assert_eq!(ls_value(&m, &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ls_gradient(&m, &[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
        assert!(ls_value(&m, &[1.0]).is_err());
        assert!(ls_gradient(&m, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let m = random_model(5, 8, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = m.gradient(&x);
        let h = 1e-6;
        for j in 0..8 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fd = (m.value(&xp) - m.value(&xm)) / (2.0 * h);
            assert!((fd - g[j]).abs() <= 1e-6 * g[j].abs().max(1.0), "coord {j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn identity_projection() {
        let m = LinearModel::new(Matrix::identity(3), vec![1.0, 2.0, 3.0]).unwrap();
        let s = SupportSet::new(vec![0, 2], 3).unwrap();
        let d = ls_debias(&m, &s).unwrap();
        assert_eq!(d.x, vec![1.0, 0.0, 3.0]);
        assert!(!d.flagged);
    }

    #[test]
    fn full_support_is_inverse_solve() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let m = LinearModel::new(a, vec![3.0, 5.0]).unwrap();
        let d = ls_debias(&m, &SupportSet::full(2)).unwrap();
        // A⁻¹y = [0.8, 1.4]
        assert!((d.x[0] - 0.8).abs() < 1e-12 && (d.x[1] - 1.4).abs() < 1e-12);
    }

    /// Inverse of a small SPD matrix by Gauss-Jordan elimination.
    fn gauss_jordan_inverse(m: &Matrix) -> Matrix {
        let n = m.rows();
        let mut aug = Matrix::from_fn(n, 2 * n, |i, j| if j < n { m[(i, j)] } else if j - n == i { 1.0 } else { 0.0 });
        for c in 0..n {
            let piv = (c..n).max_by(|&a, &b| aug[(a, c)].abs().total_cmp(&aug[(b, c)].abs())).unwrap();
            for j in 0..2 * n {
                let t = aug[(c, j)];
                aug[(c, j)] = aug[(piv, j)];
                aug[(piv, j)] = t;
            }
            let d = aug[(c, c)];
            for j in 0..2 * n {
                aug[(c, j)] /= d;
            }
            for r in 0..n {
                if r != c {
                    let f = aug[(r, c)];
                    for j in 0..2 * n {
                        aug[(r, j)] -= f * aug[(c, j)];
                    }
                }
            }
        }
        Matrix::from_fn(n, n, |i, j| aug[(i, j + n)])
    }

    #[test]
    fn restricted_solve_matches_explicit_inverse() {
        let m = random_model(20, 40, 9);
        let s = SupportSet::new(vec![3, 7, 11, 25, 38], 40).unwrap();
        let d = ls_debias(&m, &s).unwrap();
        let cols = m.design().select_columns(s.indices());
        let inv = gauss_jordan_inverse(&cols.gram());
        let want = inv.matvec(&cols.tr_matvec(m.observations()));
        for (i, j) in s.iter().enumerate() {
            assert!((d.x[j] - want[i]).abs() < 1e-10);
        }
        // restricted normal equations
        let g = m.gradient(&d.x);
        let aty = norm2(&m.design().tr_matvec(m.observations()));
        let gf = norm2(&s.gather(&g));
        assert!(gf <= 1e-10 * aty);
    }

    #[test]
    fn duplicated_column_falls_back_to_ridge() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 1.0], vec![0.5, 0.5, 3.0]]).unwrap();
        let m = LinearModel::new(a, vec![1.0, 2.0, 3.0]).unwrap();
        let d = ls_debias(&m, &SupportSet::new(vec![0, 1], 3).unwrap()).unwrap();
        assert!(d.flagged);
        assert!(d.x.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn references_on_identity_design() {
        let m = LinearModel::new(Matrix::identity(4), vec![0.0, 5.0, 0.0, -3.0]).unwrap();
        let htp = htp_reference(&m, 2, 1.0, &[0.0; 4], 2).unwrap();
        let iht = iht_reference(&m, 2, 1.0, &[0.0; 4], 2).unwrap();
        for it in [&htp, &iht] {
            assert_eq!(it[0], vec![0.0, 5.0, 0.0, -3.0]);
            assert_eq!(it[1], vec![0.0, 5.0, 0.0, -3.0]);
        }
    }

    #[test]
    fn qr_solve_matches_normal_equations() {
        let m = random_model(12, 6, 2);
        let cols = [0usize, 2, 5];
        let qr = qr_least_squares(m.design(), m.observations(), &cols).unwrap();
        let d = ls_debias(&m, &SupportSet::new(cols.to_vec(), 6).unwrap()).unwrap();
        for (i, j) in cols.iter().enumerate() {
            assert!((qr[i] - d.x[*j]).abs() < 1e-10);
        }
    }
}
