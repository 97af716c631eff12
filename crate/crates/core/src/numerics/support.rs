//! Supports and top-k selection.
//!
//! Ties between equal magnitudes always go to the lowest index (lowest
//! `(i, j)` in lexicographic order for pairs) so traces are reproducible.

use std::cmp::Ordering;

use crate::error::{invalid, Result};
use crate::numerics::Matrix;

/// Strictly increasing set of coordinate indices in `[0, p)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    /// Builds a support from arbitrary indices, sorting them and checking
    /// bounds and duplicates.
    pub fn new(mut indices: Vec<usize>, p: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(&last) = indices.last() {
            if last >= p {
                return Err(invalid(format!("support index {last} out of range for p = {p}")));
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("support contains duplicate indices"));
        }
        Ok(Self { indices })
    }

    /// All indices `0..p`.
    pub fn full(p: usize) -> Self {
        Self {
            indices: (0..p).collect(),
        }
    }

    /// Indices of the nonzero entries of `x`.
    pub fn of(x: &[f64]) -> Self {
        Self {
            indices: x
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Copy of `x` with every coordinate outside the support zeroed.
    pub fn restrict(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for i in self.iter() {
            out[i] = x[i];
        }
        out
    }

    /// Entries of `x` on the support, in index order.
    pub fn gather(&self, x: &[f64]) -> Vec<f64> {
        self.iter().map(|i| x[i]).collect()
    }

    /// Dense length-`p` vector holding `values` on the support.
    pub fn scatter(&self, values: &[f64], p: usize) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.len());
        let mut out = vec![0.0; p];
        for (i, v) in self.iter().zip(values) {
            out[i] = *v;
        }
        out
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let mut indices: Vec<usize> = self.iter().chain(other.iter()).collect();
        indices.sort_unstable();
        indices.dedup();
        SupportSet { indices }
    }
}

/// Descending magnitude, lowest index first on ties.
fn by_magnitude(a: (usize, f64), b: (usize, f64)) -> Ordering {
    b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0))
}

/// Keeps the `k` largest-magnitude entries of `x` and zeroes the rest.
///
/// The returned support always has exactly `k` indices, so zero entries are
/// selected (lowest index first) when `x` has fewer than `k` nonzeros.
pub fn hard_threshold(x: &[f64], k: usize) -> Result<(Vec<f64>, SupportSet)> {
    let p = x.len();
    if k == 0 || k > p {
        return Err(invalid(format!("hard threshold needs 1 <= k <= p, got k = {k}, p = {p}")));
    }
    let mut order: Vec<(usize, f64)> = x.iter().copied().enumerate().collect();
    if k < p {
        order.select_nth_unstable_by(k - 1, |a, b| by_magnitude(*a, *b));
    }
    let mut indices: Vec<usize> = order[..k].iter().map(|(i, _)| *i).collect();
    indices.sort_unstable();
    let support = SupportSet { indices };
    Ok((support.restrict(x), support))
}

/// Off-diagonal support of a symmetric matrix: a set of unordered pairs
/// `(i, j)` with `i < j`. The full diagonal is always implied.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PairSupport {
    dim: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairSupport {
    pub fn new(dim: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(pairs.len());
        for (i, j) in pairs {
            if i == j {
                return Err(invalid(format!("pair ({i}, {j}) is on the diagonal")));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if b >= dim {
                return Err(invalid(format!("pair ({i}, {j}) out of range for p = {dim}")));
            }
            normalized.push((a, b));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("pair support contains duplicates"));
        }
        Ok(Self {
            dim,
            pairs: normalized,
        })
    }

    /// Diagonal only.
    pub fn diagonal(dim: usize) -> Self {
        Self {
            dim,
            pairs: Vec::new(),
        }
    }

    /// Every off-diagonal pair.
    pub fn complete(dim: usize) -> Self {
        let pairs = (0..dim)
            .flat_map(|i| ((i + 1)..dim).map(move |j| (i, j)))
            .collect();
        Self { dim, pairs }
    }

    /// Pairs whose entry exceeds `threshold` in magnitude.
    pub fn of(a: &Matrix, threshold: f64) -> Self {
        let dim = a.rows();
        let pairs = (0..dim)
            .flat_map(|i| ((i + 1)..dim).map(move |j| (i, j)))
            .filter(|&(i, j)| a[(i, j)].abs() > threshold)
            .collect();
        Self { dim, pairs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of off-diagonal pairs.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of matrix entries covered: both triangles plus the diagonal.
    pub fn entry_count(&self) -> usize {
        2 * self.pairs.len() + self.dim
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        if i == j {
            return i < self.dim;
        }
        let key = if i < j { (i, j) } else { (j, i) };
        self.pairs.binary_search(&key).is_ok()
    }

    /// Zeroes every entry of `a` outside the support.
    pub fn project(&self, a: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            out[(i, i)] = a[(i, i)];
        }
        for &(i, j) in &self.pairs {
            out[(i, j)] = a[(i, j)];
            out[(j, i)] = a[(j, i)];
        }
        out
    }
}

/// Selects the `k` off-diagonal pairs of largest `|a_ij|`; the diagonal is
/// implied. `k = 0` yields the diagonal-only support.
pub fn top_k_offdiag_pairs(a: &Matrix, k: usize) -> Result<PairSupport> {
    a.require_square("pair selection input")?;
    let p = a.rows();
    let max_pairs = p * p.saturating_sub(1) / 2;
    if k > max_pairs {
        return Err(invalid(format!("k = {k} exceeds the {max_pairs} off-diagonal pairs of a {p}x{p} matrix")));
    }
    if !a.is_symmetric(1e-12) {
        return Err(invalid(format!("matrix is not symmetric (asymmetry {:.3e})", a.asymmetry())));
    }
    let mut cands: Vec<((usize, usize), f64)> = Vec::with_capacity(max_pairs);
    for i in 0..p {
        for j in (i + 1)..p {
            cands.push(((i, j), a[(i, j)].abs()));
        }
    }
    let cmp = |x: &((usize, usize), f64), y: &((usize, usize), f64)| {
        y.1.total_cmp(&x.1).then(x.0.cmp(&y.0))
    };
    if k > 0 && k < cands.len() {
        cands.select_nth_unstable_by(k - 1, cmp);
    }
    let mut pairs: Vec<(usize, usize)> = cands[..k].iter().map(|c| c.0).collect();
    pairs.sort_unstable();
    Ok(PairSupport { dim: p, pairs })
}
