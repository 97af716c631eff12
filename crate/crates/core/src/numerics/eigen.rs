//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use crate::error::{invalid, Result};
use crate::numerics::Matrix;

const OFF_DIAG_REL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// `A = V diag(λ) Vᵀ` with eigenvalues sorted in descending order and the
/// eigenvectors stored as the columns of `V`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(λ)) Vᵀ`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..n).map(|k| v[(i, k)] * mapped[k] * v[(j, k)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(|l| l)
    }
}

/// Eigendecomposition of `(A + Aᵀ)/2`.
///
/// Sweeps stop once the off-diagonal Frobenius mass falls below
/// `1e-12 · ‖A‖_F` or after 100 sweeps.
pub fn sym_eigen(a: &Matrix) -> Result<EigenDecomposition> {
    a.require_square("eigendecomposition input")?;
    if !a.is_finite() {
        return Err(invalid("eigendecomposition input has non-finite entries"));
    }
    let sym = a.symmetrize();
    let threshold = OFF_DIAG_REL_TOL * sym.frobenius_norm();
    Ok(jacobi(sym, Matrix::identity(a.rows()), threshold))
}

/// [`sym_eigen`] started from the orthonormal `basis` (eigenvectors as
/// columns), typically the eigenvectors of a nearby matrix. Jacobi then runs
/// on the nearly diagonal `basisᵀ A basis` and needs far fewer sweeps.
pub fn sym_eigen_from(a: &Matrix, basis: &Matrix) -> Result<EigenDecomposition> {
    a.require_square("eigendecomposition input")?;
    if basis.rows() != a.rows() || basis.cols() != a.rows() {
        return Err(invalid("basis dimensions differ from the input"));
    }
    if !a.is_finite() {
        return Err(invalid("eigendecomposition input has non-finite entries"));
    }
    let sym = a.symmetrize();
    let threshold = OFF_DIAG_REL_TOL * sym.frobenius_norm();
    let rotated = basis.transpose().matmul(&sym).matmul(basis).symmetrize();
    Ok(jacobi(rotated, basis.transpose(), threshold))
}

/// Cyclic Jacobi on symmetric `m`; `vt0` holds the starting eigenvector
/// estimates as rows.
fn jacobi(m: Matrix, vt0: Matrix, threshold: f64) -> EigenDecomposition {
    let n = m.rows();
    let mut m = m.into_vec();
    // rows of `vt` are the eigenvectors, so rotations touch contiguous memory
    let mut vt = vt0.into_vec();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m, n) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut vt, n, p, q, c, s, t);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| vt[order[c] * n + r]);
    EigenDecomposition { values, vectors }
}

fn off_diagonal_norm(m: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for v in &m[i * n + i + 1..(i + 1) * n] {
            s += 2.0 * v * v;
        }
    }
    s.sqrt()
}

/// Applies the rotation zeroing `m[p][q]` (row-major, `n × n`) and
/// accumulates it into the eigenvector rows `vt`.
#[allow(clippy::too_many_arguments)]
fn rotate(m: &mut [f64], vt: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64, t: f64) {
    let apq = m[p * n + q];
    m[p * n + p] -= t * apq;
    m[q * n + q] += t * apq;
    m[p * n + q] = 0.0;
    m[q * n + p] = 0.0;
    {
        let (head, tail) = m.split_at_mut(q * n);
        let row_p = &mut head[p * n..(p + 1) * n];
        let row_q = &mut tail[..n];
        for r in 0..n {
            if r != p && r != q {
                let arp = row_p[r];
                let arq = row_q[r];
                row_p[r] = c * arp - s * arq;
                row_q[r] = s * arp + c * arq;
            }
        }
    }
    for r in 0..n {
        if r != p && r != q {
            m[r * n + p] = m[p * n + r];
            m[r * n + q] = m[q * n + r];
        }
    }
    let (head, tail) = vt.split_at_mut(q * n);
    let vp = &mut head[p * n..(p + 1) * n];
    let vq = &mut tail[..n];
    for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Eigenvalues of `(A + Aᵀ)/2` in descending order, without eigenvectors.
///
/// Householder reduction to tridiagonal form followed by implicit QL with
/// Wilkinson shifts; much cheaper than [`sym_eigen`] when only the spectrum
/// is needed.
pub fn sym_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    a.require_square("eigenvalue input")?;
    if !a.is_finite() {
        return Err(invalid("eigenvalue input has non-finite entries"));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(a.symmetrize().into_vec(), n);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| y.total_cmp(x));
    Ok(d)
}

/// Diagonal `d` and subdiagonal `e` (`e[0]` unused) of a Householder
/// tridiagonalization of the row-major symmetric `m`.
fn tridiagonalize(mut m: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = m[i * n..i * n + i].iter().map(|v| v.abs()).sum();
            if scale == 0.0 {
                e[i] = m[i * n + l];
            } else {
                for k in 0..=l {
                    m[i * n + k] /= scale;
                    h += m[i * n + k] * m[i * n + k];
                }
                let f = m[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                m[i * n + l] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += m[j * n + k] * m[i * n + k];
                    }
                    for k in j + 1..=l {
                        g += m[k * n + j] * m[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * m[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = m[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        m[j * n + k] -= f * e[k] + g * m[i * n + k];
                    }
                }
            }
        } else {
            e[i] = m[i * n + l];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = m[i * n + i];
    }
    (d, e)
}

/// Implicit QL on a symmetric tridiagonal matrix; eigenvalues land in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(invalid("tridiagonal QL did not converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Spectral norm of a symmetric matrix.
pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    let v = sym_eigenvalues(a)?;
    Ok(v.iter().fold(0.0, |m: f64, x| m.max(x.abs())))
}
