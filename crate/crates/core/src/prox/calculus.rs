//! Conjugation-calculus combinators: translation, linear tilt, scalar
//! multiplication, argument scaling, reflection, separability.
//!
//! Each combinator transforms the prox map in closed form and names its
//! conjugate by the matching rule, so conjugates of composed functions stay
//! exact.

use std::sync::Arc;

use crate::error::{PdError, Result};
use crate::extreal::ExtReal;
use crate::vector::Vector;

use super::{check_step, ProxFn, ProxRef};

/// `x -> f(x - shift)`.
pub struct Translate {
    inner: ProxRef,
    shift: Vector,
}

/// `x -> f(x) + <x, slope>`.
pub struct Tilt {
    inner: ProxRef,
    slope: Vector,
}

/// `x -> alpha f(x)`, `alpha > 0`.
pub struct ScaleFn {
    inner: ProxRef,
    alpha: f64,
}

/// `x -> f(x / alpha)`, `alpha != 0`.
pub struct ScaleArg {
    inner: ProxRef,
    alpha: f64,
}

/// `x -> sum_j phi_j(x_j)` with scalar pieces.
pub struct Separable {
    pieces: Vec<ProxRef>,
}

/// Blockwise separable function over a product space; used by product-space
/// stacking where each block keeps its own dimension.
pub struct StackedSeparable {
    blocks: Vec<(ProxRef, usize)>,
    sizes: Vec<usize>,
}

pub fn translate(f: ProxRef, shift: Vector) -> ProxRef {
    Arc::new(Translate { inner: f, shift })
}

pub fn linear_tilt(f: ProxRef, slope: Vector) -> ProxRef {
    Arc::new(Tilt { inner: f, slope })
}

pub fn scale_fn(f: ProxRef, alpha: f64) -> Result<ProxRef> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(PdError::InvalidParameter {
            reason: format!("scale_fn needs alpha > 0, got {alpha}"),
        });
    }
    Ok(Arc::new(ScaleFn { inner: f, alpha }))
}

pub fn scale_arg(f: ProxRef, alpha: f64) -> Result<ProxRef> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(PdError::InvalidParameter {
            reason: format!("scale_arg needs alpha != 0, got {alpha}"),
        });
    }
    Ok(Arc::new(ScaleArg { inner: f, alpha }))
}

/// `x -> f(-x)`, the scaling rule at alpha = -1.
pub fn reflect(f: ProxRef) -> ProxRef {
    Arc::new(ScaleArg {
        inner: f,
        alpha: -1.0,
    })
}

pub fn separable(pieces: Vec<ProxRef>) -> ProxRef {
    Arc::new(Separable { pieces })
}

impl ProxFn for Translate {
    fn eval(&self, x: &Vector) -> ExtReal {
        self.inner.eval(&x.sub(&self.shift))
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        Ok(self.shift.add(&self.inner.prox(&x.sub(&self.shift), gamma)?))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        // f(. - c)* = f* + <., c>
        Some(linear_tilt(self.inner.conjugate()?, self.shift.clone()))
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        let (p, v) = self.inner.eval_nearby(&x.sub(&self.shift))?;
        Some((p.add(&self.shift), v))
    }
}

impl ProxFn for Tilt {
    fn eval(&self, x: &Vector) -> ExtReal {
        self.inner.eval(x) + ExtReal::Finite(x.dot(&self.slope))
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        self.inner.prox(&x.axpy(-gamma, &self.slope), gamma)
    }

    fn conjugate(&self) -> Option<ProxRef> {
        // (f + <., c>)* = f*(. - c)
        Some(translate(self.inner.conjugate()?, self.slope.clone()))
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        let (p, v) = self.inner.eval_nearby(x)?;
        let tilted = v + p.dot(&self.slope);
        Some((p, tilted))
    }
}

impl ProxFn for ScaleFn {
    fn eval(&self, x: &Vector) -> ExtReal {
        match self.inner.eval(x) {
            ExtReal::Finite(v) => ExtReal::Finite(self.alpha * v),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        self.inner.prox(x, self.alpha * gamma)
    }

    fn conjugate(&self) -> Option<ProxRef> {
        // (alpha f)*(u) = alpha f*(u / alpha)
        let inner_conj = self.inner.conjugate()?;
        let scaled_arg = Arc::new(ScaleArg {
            inner: inner_conj,
            alpha: self.alpha,
        });
        Some(Arc::new(ScaleFn {
            inner: scaled_arg,
            alpha: self.alpha,
        }))
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        let (p, v) = self.inner.eval_nearby(x)?;
        Some((p, self.alpha * v))
    }
}

impl ProxFn for ScaleArg {
    fn eval(&self, x: &Vector) -> ExtReal {
        self.inner.eval(&x.scale(1.0 / self.alpha))
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        // prox_{gamma f(./alpha)}(x) = alpha prox_{(gamma/alpha^2) f}(x/alpha)
        let inner = self
            .inner
            .prox(&x.scale(1.0 / self.alpha), gamma / (self.alpha * self.alpha))?;
        Ok(inner.scale(self.alpha))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        // f(./alpha)*(u) = f*(alpha u)
        Some(Arc::new(ScaleArg {
            inner: self.inner.conjugate()?,
            alpha: 1.0 / self.alpha,
        }))
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        let (p, v) = self.inner.eval_nearby(&x.scale(1.0 / self.alpha))?;
        Some((p.scale(self.alpha), v))
    }
}

impl ProxFn for Separable {
    fn eval(&self, x: &Vector) -> ExtReal {
        assert_eq!(x.len(), self.pieces.len(), "separable: dimension mismatch");
        let mut total = ExtReal::Finite(0.0);
        for (piece, v) in self.pieces.iter().zip(x.iter()) {
            total = total + piece.eval(&Vector::from_raw(vec![*v]));
        }
        total
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        assert_eq!(x.len(), self.pieces.len(), "separable: dimension mismatch");
        let mut out = Vec::with_capacity(x.len());
        for (piece, v) in self.pieces.iter().zip(x.iter()) {
            out.push(piece.prox(&Vector::from_raw(vec![*v]), gamma)?[0]);
        }
        Ok(Vector::from_raw(out))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        // (sum_j phi_j)* = sum_j phi_j* componentwise.
        let conjs: Option<Vec<ProxRef>> = self.pieces.iter().map(|p| p.conjugate()).collect();
        Some(separable(conjs?))
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        let mut p = Vec::with_capacity(x.len());
        let mut total = 0.0;
        for (piece, v) in self.pieces.iter().zip(x.iter()) {
            let (pj, vj) = piece.eval_nearby(&Vector::from_raw(vec![*v]))?;
            p.push(pj[0]);
            total += vj;
        }
        Some((Vector::from_raw(p), total))
    }
}

impl StackedSeparable {
    pub fn new(blocks: Vec<(ProxRef, usize)>) -> Self {
        let sizes = blocks.iter().map(|(_, s)| *s).collect();
        StackedSeparable { blocks, sizes }
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.sizes
    }
}

impl ProxFn for StackedSeparable {
    fn eval(&self, x: &Vector) -> ExtReal {
        let parts = x.split(&self.sizes);
        let mut total = ExtReal::Finite(0.0);
        for ((f, _), part) in self.blocks.iter().zip(parts.iter()) {
            total = total + f.eval(part);
        }
        total
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        let parts = x.split(&self.sizes);
        // Block proxes are pure; results combine in ascending block index.
        let mut out = Vec::with_capacity(self.blocks.len());
        for ((f, _), part) in self.blocks.iter().zip(parts.iter()) {
            out.push(f.prox(part, gamma)?);
        }
        Ok(Vector::concat(&out))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        let conjs: Option<Vec<(ProxRef, usize)>> = self
            .blocks
            .iter()
            .map(|(f, s)| f.conjugate().map(|c| (c, *s)))
            .collect();
        Some(Arc::new(StackedSeparable::new(conjs?)))
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        let parts = x.split(&self.sizes);
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut total = 0.0;
        for ((f, _), part) in self.blocks.iter().zip(parts.iter()) {
            let (p, v) = f.eval_nearby(part)?;
            out.push(p);
            total += v;
        }
        Some((Vector::concat(&out), total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::{Bounds, BoxInd, Power, Quadratic, L1};

    #[test]
    fn translate_shifts_prox() {
        // prox_{gamma f(.-c)}(x) = c + prox_{gamma f}(x - c)
        let c = Vector::from(vec![1.0, -2.0]);
        let f = translate(Arc::new(L1::new(1.0)), c.clone());
        let x = Vector::from(vec![3.0, -0.5]);
        let p = f.prox(&x, 1.0).unwrap();
        let manual = c.add(&L1::new(1.0).prox(&x.sub(&c), 1.0).unwrap());
        assert!(p.dist(&manual) < 1e-15);
    }

    #[test]
    fn translate_prox_is_argmin_on_grid() {
        // 1D grid check of the translated-prox identity.
        let c = Vector::from(vec![0.4]);
        let f = translate(Arc::new(L1::new(1.0)), c);
        let x = Vector::from(vec![1.7]);
        let gamma = 0.8;
        let p = f.prox(&x, gamma).unwrap()[0];
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=400_000 {
            let t = -2.0 + 4.0 * (k as f64) / 400_000.0;
            let val = (t - 0.4).abs() + (t - 1.7) * (t - 1.7) / (2.0 * gamma);
            if val < best.0 {
                best = (val, t);
            }
        }
        assert!((p - best.1).abs() < 1e-4, "{p} vs grid {}", best.1);
    }

    #[test]
    fn scale_fn_on_quadratic() {
        // 2 * (||.||^2 / 2): prox(x) = x / (1 + 2 gamma)
        let f = scale_fn(Arc::new(Quadratic::new(1.0, None).unwrap()), 2.0).unwrap();
        let p = f.prox(&Vector::from(vec![3.0]), 0.5).unwrap();
        assert!((p[0] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn reflect_negates_prox() {
        let f = reflect(Arc::new(Translate {
            inner: Arc::new(L1::new(1.0)),
            shift: Vector::from(vec![0.7]),
        }));
        let inner = translate(Arc::new(L1::new(1.0)), Vector::from(vec![0.7]));
        let x = Vector::from(vec![2.0]);
        let lhs = f.prox(&x, 1.3).unwrap();
        let rhs = inner.prox(&x.scale(-1.0), 1.3).unwrap().scale(-1.0);
        assert!(lhs.dist(&rhs) < 1e-15);
    }

    #[test]
    fn scale_arg_eval_matches_definition() {
        let f = scale_arg(Arc::new(Power::new(3.0, 1.0).unwrap()), 2.0).unwrap();
        let x = Vector::from(vec![4.0]);
        assert!((f.eval(&x).finite().unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn separable_mixes_pieces() {
        let f = separable(vec![
            Arc::new(L1::new(1.0)) as ProxRef,
            Arc::new(BoxInd::new(Bounds::uniform(0.0, 1.0).unwrap())),
        ]);
        let p = f.prox(&Vector::from(vec![2.0, 2.0]), 1.0).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 1.0]);
        assert_eq!(
            f.eval(&Vector::from(vec![-1.0, 0.5])),
            ExtReal::Finite(1.0)
        );
        assert_eq!(f.eval(&Vector::from(vec![0.0, 2.0])), ExtReal::PosInf);
    }
}
