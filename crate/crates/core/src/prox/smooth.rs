//! Differentiable terms with Lipschitz gradients.

use std::sync::Arc;

use crate::dense::{Cholesky, DenseMatrix};
use crate::error::Result;
use crate::linop::{power_iteration, DenseOp, LinOp};
use crate::vector::Vector;

use super::Quadratic;

/// Shared handle to a smooth function.
pub type SmoothRef = Arc<dyn SmoothFn>;

/// Conjugate value of a smooth term at a (possibly slightly infeasible)
/// dual point. `residual` is the distance from the queried point to the
/// nearby point where `value` is exact; closed forms report zero.
#[derive(Clone, Copy, Debug)]
pub struct FenchelValue {
    pub value: f64,
    pub residual: f64,
}

/// A convex differentiable function with a Lipschitz-continuous gradient.
pub trait SmoothFn: Send + Sync {
    fn eval(&self, x: &Vector) -> f64;
    fn grad(&self, x: &Vector) -> Vector;
    /// Lipschitz constant of the gradient (0 allowed for affine terms).
    fn beta(&self) -> f64;

    /// Conjugate value `h*(u)` when a closed form exists.
    fn fenchel(&self, _u: &Vector) -> Option<FenchelValue> {
        None
    }

    /// Quadratic structure `h(x) = x'Qx/2 + q'x + r` when available.
    fn quadratic_model(&self, _n: usize) -> Option<(DenseMatrix, Vector, f64)> {
        None
    }

    /// True for the zero smooth term.
    fn is_zero(&self) -> bool {
        false
    }

    /// `(weight, center)` when the term is `(weight/2)||x - center||^2`;
    /// lets a solver fold the term into a prox in closed form.
    fn as_quadratic(&self) -> Option<(f64, Option<&Vector>)> {
        None
    }
}

/// The zero smooth term.
pub struct ZeroSmooth;

impl SmoothFn for ZeroSmooth {
    fn eval(&self, _x: &Vector) -> f64 {
        0.0
    }

    fn grad(&self, x: &Vector) -> Vector {
        Vector::zeros(x.len())
    }

    fn beta(&self) -> f64 {
        0.0
    }

    fn fenchel(&self, u: &Vector) -> Option<FenchelValue> {
        // 0* is the indicator of {0}; report the distance to the origin.
        Some(FenchelValue {
            value: 0.0,
            residual: u.norm(),
        })
    }

    fn quadratic_model(&self, n: usize) -> Option<(DenseMatrix, Vector, f64)> {
        Some((DenseMatrix::zeros(n, n), Vector::zeros(n), 0.0))
    }

    fn is_zero(&self) -> bool {
        true
    }
}

impl SmoothFn for Quadratic {
    fn eval(&self, x: &Vector) -> f64 {
        let d = match self.center() {
            Some(c) => x.sub(c),
            None => x.clone(),
        };
        0.5 * self.weight() * d.dot(&d)
    }

    fn grad(&self, x: &Vector) -> Vector {
        let d = match self.center() {
            Some(c) => x.sub(c),
            None => x.clone(),
        };
        d.scale(self.weight())
    }

    fn beta(&self) -> f64 {
        self.weight()
    }

    fn fenchel(&self, u: &Vector) -> Option<FenchelValue> {
        // ((w/2)||x - y||^2)*(u) = <u, y> + ||u||^2 / (2w)
        let lin = match self.center() {
            Some(c) => u.dot(c),
            None => 0.0,
        };
        Some(FenchelValue {
            value: lin + u.dot(u) / (2.0 * self.weight()),
            residual: 0.0,
        })
    }

    fn quadratic_model(&self, n: usize) -> Option<(DenseMatrix, Vector, f64)> {
        super::ProxFn::quadratic_model(self, n)
    }

    fn as_quadratic(&self) -> Option<(f64, Option<&Vector>)> {
        Some((self.weight(), self.center()))
    }
}

/// Least-squares data term `h(x) = ||Ax - b||^2 / 2`.
pub struct LeastSquares {
    op: DenseOp,
    b: Vector,
    beta: f64,
    /// Cached factor of A A^T for conjugate evaluation; absent when A A^T is
    /// numerically singular (the conjugate is then unavailable).
    outer_chol: Option<Cholesky>,
}

impl LeastSquares {
    pub fn new(matrix: DenseMatrix, b: Vector) -> Result<Self> {
        let op = DenseOp::new(matrix)?;
        // beta = ||A||^2; certified by the power-iteration bound.
        let sigma = power_iteration(&op, 1e-9, 5_000)?;
        let beta = sigma.bound * sigma.bound;
        let outer_chol = Cholesky::factor(&op.matrix().gram_t()).ok();
        Ok(LeastSquares {
            op,
            b,
            beta,
            outer_chol,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        self.op.matrix()
    }

    pub fn rhs(&self) -> &Vector {
        &self.b
    }

    fn residual_vec(&self, x: &Vector) -> Vector {
        self.op.apply(x).sub(&self.b)
    }
}

impl SmoothFn for LeastSquares {
    fn eval(&self, x: &Vector) -> f64 {
        let r = self.residual_vec(x);
        0.5 * r.dot(&r)
    }

    fn grad(&self, x: &Vector) -> Vector {
        self.op.adjoint(&self.residual_vec(x))
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn fenchel(&self, u: &Vector) -> Option<FenchelValue> {
        // h*(u) is finite only on the range of A^T. Solve A A^T z = A u,
        // evaluate at the projected point A^T z where
        // h*(A^T z) = <z, b> + ||z||^2 / 2, and report the projection
        // distance so the caller can certify the duality gap.
        let chol = self.outer_chol.as_ref()?;
        let au = self.op.apply(u);
        let z = chol.solve_vec(&au);
        let u_proj = self.op.adjoint(&z);
        Some(FenchelValue {
            value: z.dot(&self.b) + 0.5 * z.dot(&z),
            residual: u_proj.dist(u),
        })
    }

    fn quadratic_model(&self, n: usize) -> Option<(DenseMatrix, Vector, f64)> {
        assert_eq!(n, self.op.cols(), "least-squares dimension mismatch");
        let q = self.op.matrix().gram();
        let lin = self.op.adjoint(&self.b).scale(-1.0);
        Some((q, lin, 0.5 * self.b.dot(&self.b)))
    }
}
