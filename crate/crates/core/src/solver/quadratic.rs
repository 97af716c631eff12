use crate::error::{check_dim, invalid, Result};
use crate::numerics::{dot, Cholesky, Matrix, SupportSet};
use crate::solver::{Debiased, Objective};

/// `f(x) = ½ xᵀQx − bᵀx` with symmetric `Q`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    q: Matrix,
    b: Vec<f64>,
}

impl Quadratic {
    pub fn new(q: Matrix, b: Vec<f64>) -> Result<Self> {
        q.require_square("quadratic form")?;
        check_dim(q.rows(), b.len())?;
        if !q.is_symmetric(1e-12) {
            return Err(invalid("quadratic form must be symmetric"));
        }
        Ok(Self { q, b })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.q
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.q.matvec(x)) - dot(&self.b, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.q.matvec(x);
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi -= bi;
        }
        g
    }

    fn debias(&self, support: &SupportSet, _start: &[f64]) -> Result<Debiased> {
        let sub = self.q.principal(support.indices());
        let rhs = support.gather(&self.b);
        let chol = Cholesky::new(&sub).ok_or_else(|| invalid("restricted quadratic form is not positive definite"))?;
        Ok(Debiased {
            x: support.scatter(&chol.solve(&rhs), self.dim()),
            flagged: false,
        })
    }

    fn restricted_hessian(&self, support: &SupportSet, _x: &[f64]) -> Matrix {
        self.q.principal(support.indices())
    }

    fn has_constant_curvature(&self) -> bool {
        true
    }
}
