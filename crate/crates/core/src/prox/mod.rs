//! Proximity operators and the Fenchel-conjugate calculus.
//!
//! A [`ProxFn`] is a proper convex lower-semicontinuous function exposing its
//! value and its proximity operator
//! `prox_{gamma f}(x) = argmin_y f(y) + ||y - x||^2 / (2 gamma)`.
//! When the conjugate `f*(u) = sup_x <u, x> - f(x)` has an analytic form in
//! the catalog, [`ProxFn::conjugate`] returns it as another `ProxFn`, which
//! is how the calculus rules compose. The prox of a conjugate is never needed
//! analytically: Moreau's decomposition
//! `x = prox_{gamma f}(x) + gamma prox_{f*/gamma}(x / gamma)`
//! supplies it from the primal prox (see [`conjugate_prox`]).

mod calculus;
mod catalog;
pub mod smooth;

pub use calculus::{
    linear_tilt, reflect, scale_arg, scale_fn, separable, translate, Separable, StackedSeparable,
};
pub use catalog::{
    support_indicator_pair, Bounds, BoxInd, ConsensusInd, PointInd, Power, Quadratic, SupportBox,
    Zero, ZeroSumInd, L1,
};

use std::sync::Arc;

use crate::dense::DenseMatrix;
use crate::error::{PdError, Result};
use crate::extreal::ExtReal;
use crate::vector::Vector;

/// Shared handle to a proximable function.
pub type ProxRef = Arc<dyn ProxFn>;

/// A proper convex lsc function with an exact proximity operator.
pub trait ProxFn: Send + Sync {
    /// Function value; +inf is allowed (indicator functions), NaN never.
    fn eval(&self, x: &Vector) -> ExtReal;

    /// `argmin_y f(y) + ||y - x||^2 / (2 gamma)`. Rejects `gamma <= 0`.
    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector>;

    /// Analytic conjugate when the catalog knows one.
    fn conjugate(&self) -> Option<ProxRef> {
        None
    }

    /// A nearby domain point and the (finite) value there. For functions
    /// finite everywhere this is `(x, f(x))`; indicators project first.
    /// Duality-gap evaluation uses the distance `||x - p||` to certify how
    /// far an iterate sits from the domain. `None` means no such evaluation
    /// is available and the dual value is reported as unavailable.
    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        match self.eval(x) {
            ExtReal::Finite(v) => Some((x.clone(), v)),
            ExtReal::PosInf => None,
        }
    }

    /// Quadratic structure `f(x) = x'Qx/2 + q'x + r` when the function has
    /// one (used by the ADMM subproblem assembly).
    fn quadratic_model(&self, _n: usize) -> Option<(DenseMatrix, Vector, f64)> {
        None
    }

    /// True for the zero function; some algorithms require `f = 0`.
    fn is_zero(&self) -> bool {
        false
    }
}

pub(crate) fn check_step(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(PdError::InvalidStep { gamma })
    }
}

/// Componentwise soft thresholding, the prox of the l1 norm:
/// `sign(x_j) max(|x_j| - gamma, 0)`.
pub fn prox_l1(x: &Vector, gamma: f64) -> Result<Vector> {
    L1::new(1.0).prox(x, gamma)
}

/// Componentwise prox of `|.|^p`, `p >= 1`.
pub fn prox_power(x: &Vector, gamma: f64, p: f64) -> Result<Vector> {
    Power::new(p, 1.0)?.prox(x, gamma)
}

/// Projection onto the box `[lo, hi]` (componentwise clamp).
pub fn project_box(x: &Vector, lo: &Vector, hi: &Vector) -> Result<Vector> {
    if lo.len() != x.len() || hi.len() != x.len() {
        return Err(PdError::DimensionMismatch {
            expected: x.len(),
            got: lo.len().max(hi.len()),
        });
    }
    let bounds = Bounds::per(lo.as_slice().to_vec(), hi.as_slice().to_vec())?;
    BoxInd::new(bounds).prox(x, 1.0)
}

/// Moreau complement `x - prox_{gamma f}(x)`, which equals
/// `gamma prox_{f*/gamma}(x / gamma)`.
pub fn moreau_complement(f: &dyn ProxFn, x: &Vector, gamma: f64) -> Result<Vector> {
    check_step(gamma)?;
    Ok(x.sub(&f.prox(x, gamma)?))
}

/// Prox of the conjugate with step `sigma`, via Moreau's decomposition:
/// `prox_{sigma f*}(v) = v - sigma prox_{f/sigma}(v / sigma)`.
pub fn conjugate_prox(f: &dyn ProxFn, v: &Vector, sigma: f64) -> Result<Vector> {
    check_step(sigma)?;
    let inner = f.prox(&v.scale(1.0 / sigma), 1.0 / sigma)?;
    Ok(v.sub(&inner.scale(sigma)))
}

/// Grid approximation of the scalar conjugate value.
#[derive(Clone, Copy, Debug)]
pub struct ConjugateEstimate {
    /// `max_t (u t - f(t))` over the grid.
    pub value: f64,
    /// False when the maximum sits on the grid boundary, which signals that
    /// the true supremum is likely unbounded (or the grid too small).
    pub bounded: bool,
}

/// Approximates `f*(u)` for a scalar function by a grid search over
/// `[lo, hi]` with `steps + 1` points. Test oracle only; solver paths never
/// call this.
pub fn conjugate_value_1d(
    f: &dyn ProxFn,
    u: f64,
    lo: f64,
    hi: f64,
    steps: usize,
) -> ConjugateEstimate {
    assert!(hi > lo && steps >= 2, "conjugate_value_1d: bad grid");
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for k in 0..=steps {
        let t = lo + (hi - lo) * (k as f64) / (steps as f64);
        let candidate = match f.eval(&Vector::from_raw(vec![t])) {
            ExtReal::Finite(v) => u * t - v,
            ExtReal::PosInf => f64::NEG_INFINITY,
        };
        if candidate > best {
            best = candidate;
            best_idx = k;
        }
    }
    ConjugateEstimate {
        value: best,
        bounded: best_idx != 0 && best_idx != steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rv(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
        Vector::from_raw((0..n).map(|_| rng.gen_range(-scale..scale)).collect())
    }

    /// Catalog instances the property tests sweep over (4-dimensional).
    fn catalog4() -> Vec<(&'static str, ProxRef)> {
        let y = Vector::from(vec![0.3, -0.7, 1.1, 0.0]);
        let box4 = Bounds::per(vec![-1.0, -0.5, 0.0, -2.0], vec![1.0, 0.5, 2.0, 2.0]).unwrap();
        let mut list: Vec<(&'static str, ProxRef)> = vec![
            ("l1", Arc::new(L1::new(0.7))),
            ("sq", Arc::new(Quadratic::new(2.0, Some(y.clone())).unwrap())),
            ("sq_origin", Arc::new(Quadratic::new(1.0, None).unwrap())),
            ("box", Arc::new(BoxInd::new(box4.clone()))),
            ("support", Arc::new(SupportBox::new(box4).unwrap())),
            ("nonneg", Arc::new(BoxInd::nonneg())),
            ("pow1.5", Arc::new(Power::new(1.5, 0.8).unwrap())),
            ("pow3", Arc::new(Power::new(3.0, 1.0).unwrap())),
            ("zero", Arc::new(Zero)),
            ("point", Arc::new(PointInd::origin())),
            (
                "point_c",
                Arc::new(PointInd::at(Vector::from(vec![1.0, 2.0, -1.0, 0.5]))),
            ),
        ];
        list.push(("translate_l1", translate(Arc::new(L1::new(1.0)), y.clone())));
        list.push(("tilt_sq", linear_tilt(Arc::new(Quadratic::new(1.0, None).unwrap()), y)));
        list.push(("scale_l1", scale_fn(Arc::new(L1::new(1.0)), 2.5).unwrap()));
        list.push((
            "scalearg_pow",
            scale_arg(Arc::new(Power::new(2.0, 1.0).unwrap()), -1.5).unwrap(),
        ));
        list.push(("reflect_l1", reflect(Arc::new(L1::new(1.0)))));
        list.push((
            "separable",
            separable(vec![
                Arc::new(L1::new(1.0)) as ProxRef,
                Arc::new(Power::new(2.0, 0.5).unwrap()),
                Arc::new(Power::new(4.0, 1.0).unwrap()),
                Arc::new(BoxInd::new(Bounds::uniform(-1.0, 1.0).unwrap())),
            ]),
        ));
        list
    }

    #[test]
    fn prox_l1_examples() {
        let out = prox_l1(&Vector::from(vec![3.0, -0.5, 0.0]), 1.0).unwrap();
        assert_eq!(out.as_slice(), &[2.0, 0.0, 0.0]);
        let zero = prox_l1(&Vector::zeros(4), 3.7).unwrap();
        assert_eq!(zero.as_slice(), &[0.0; 4]);
        let below = prox_l1(&Vector::from(vec![-2.0]), 3.0).unwrap();
        assert_eq!(below.as_slice(), &[0.0]);
        assert!(prox_l1(&Vector::zeros(1), 0.0).is_err());
        assert!(prox_l1(&Vector::zeros(1), -1.0).is_err());
    }

    #[test]
    fn prox_power_examples() {
        // p = 2: closed form x / (1 + 2 gamma)
        let out = prox_power(&Vector::from(vec![3.0]), 0.5, 2.0).unwrap();
        assert!((out[0] - 1.5).abs() < 1e-12);
        // p = 1 reduces to soft thresholding
        let out = prox_power(&Vector::from(vec![3.0]), 1.0, 1.0).unwrap();
        assert!((out[0] - 2.0).abs() < 1e-12);
        assert!(Power::new(0.5, 1.0).is_err());
    }

    #[test]
    fn prox_power_p4_matches_grid_search() {
        // Brute-force 1e-6 grid oracle for argmin y^4 + (y-1)^2/2.
        let mut best = (f64::INFINITY, 0.0);
        let steps = 2_000_000usize;
        for k in 0..=steps {
            let y = -1.0 + 3.0 * (k as f64) / (steps as f64) * 2.0 / 3.0; // [-1, 1]
            let val = y.powi(4) + (y - 1.0) * (y - 1.0) / 2.0;
            if val < best.0 {
                best = (val, y);
            }
        }
        let out = prox_power(&Vector::from(vec![1.0]), 1.0, 4.0).unwrap();
        assert!(
            (out[0] - best.1).abs() < 1e-5,
            "newton {} vs grid {}",
            out[0],
            best.1
        );
    }

    #[test]
    fn project_box_examples() {
        let lo = Vector::from(vec![-1.0, -1.0]);
        let hi = Vector::from(vec![1.0, 1.0]);
        let out = project_box(&Vector::from(vec![2.0, -0.3]), &lo, &hi).unwrap();
        assert_eq!(out.as_slice(), &[1.0, -0.3]);
        let inside = project_box(&Vector::from(vec![0.2, 0.9]), &lo, &hi).unwrap();
        assert_eq!(inside.as_slice(), &[0.2, 0.9]);
        let bad_lo = Vector::from(vec![2.0, 0.0]);
        assert!(project_box(&Vector::zeros(2), &bad_lo, &hi).is_err());
    }

    #[test]
    fn l1_conjugate_prox_is_box_projection() {
        // prox of the l1 conjugate (indicator of [-1,1]^N) is the clamp.
        let f = L1::new(1.0);
        let x = Vector::from(vec![2.0, -0.3]);
        let via_moreau = conjugate_prox(&f, &x, 1.0).unwrap();
        let direct = project_box(
            &x,
            &Vector::from(vec![-1.0, -1.0]),
            &Vector::from(vec![1.0, 1.0]),
        )
        .unwrap();
        assert!(via_moreau.dist(&direct) < 1e-12);
    }

    #[test]
    fn moreau_complement_of_l1_is_clipped() {
        let f = L1::new(1.0);
        for gamma in [0.1, 1.0, 10.0] {
            let x = Vector::from(vec![2.0, -0.3]);
            let r = moreau_complement(&f, &x, gamma).unwrap();
            for (rj, xj) in r.iter().zip(x.iter()) {
                let clip = xj.clamp(-gamma, gamma);
                assert!((rj - clip).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn quadratic_is_self_conjugate() {
        // f = ||.||^2 / 2 has f* = f, so prox_{f*} = prox_f.
        let f = Quadratic::new(1.0, None).unwrap();
        let g = f.conjugate().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = rv(&mut rng, 3, 4.0);
            let a = f.prox(&x, 0.7).unwrap();
            let b = g.prox(&x, 0.7).unwrap();
            assert!(a.dist(&b) < 1e-12);
        }
    }

    #[test]
    fn point_indicator_conjugate_is_identity_prox() {
        // f = indicator of {0}: prox maps to 0, and f* = 0 has identity prox.
        let f = PointInd::origin();
        let x = Vector::from(vec![1.0, -2.0]);
        assert_eq!(f.prox(&x, 2.0).unwrap().as_slice(), &[0.0, 0.0]);
        let conj = f.conjugate().unwrap();
        assert_eq!(conj.prox(&x, 2.0).unwrap().as_slice(), x.as_slice());
    }

    #[test]
    fn moreau_identity_two_sided() {
        // prox_{gamma f}(x) + gamma prox_{f*/gamma}(x/gamma) = x whenever the
        // conjugate has its own analytic prox.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (name, f) in catalog4() {
            let Some(fc) = f.conjugate() else { continue };
            for gamma in [0.1, 1.0, 10.0] {
                for _ in 0..25 {
                    let x = rv(&mut rng, 4, 5.0);
                    let p = f.prox(&x, gamma).unwrap();
                    let q = fc.prox(&x.scale(1.0 / gamma), 1.0 / gamma).unwrap();
                    let recomposed = p.axpy(gamma, &q);
                    assert!(
                        recomposed.dist(&x) <= 1e-9 * (1.0 + x.norm()),
                        "moreau identity failed for {name} at gamma {gamma}: err {}",
                        recomposed.dist(&x)
                    );
                }
            }
        }
    }

    #[test]
    fn prox_optimality_probe() {
        // f(p) + ||p-x||^2/(2 gamma) <= f(y) + ||y-x||^2/(2 gamma) + 1e-8
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (name, f) in catalog4() {
            for _ in 0..100 {
                let x = rv(&mut rng, 4, 3.0);
                let gamma = rng.gen_range(0.05..5.0);
                let p = f.prox(&x, gamma).unwrap();
                let fp = f.eval(&p);
                assert!(
                    fp.is_finite(),
                    "{name}: prox output left the domain (value {fp})"
                );
                let lhs = fp.finite().unwrap() + p.dist(&x).powi(2) / (2.0 * gamma);
                let y = rv(&mut rng, 4, 3.0);
                let rhs = match f.eval(&y) {
                    ExtReal::Finite(v) => v + y.dist(&x).powi(2) / (2.0 * gamma),
                    ExtReal::PosInf => continue,
                };
                assert!(
                    lhs <= rhs + 1e-8,
                    "{name}: prox optimality violated: {lhs} > {rhs}"
                );
            }
        }
    }

    #[test]
    fn prox_is_firmly_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (name, f) in catalog4() {
            for _ in 0..50 {
                let x = rv(&mut rng, 4, 3.0);
                let y = rv(&mut rng, 4, 3.0);
                let gamma = rng.gen_range(0.1..4.0);
                let px = f.prox(&x, gamma).unwrap();
                let py = f.prox(&y, gamma).unwrap();
                assert!(
                    px.dist(&py) <= x.dist(&y) + 1e-10,
                    "{name}: prox expanded a pair"
                );
            }
        }
    }

    #[test]
    fn conjugate_grid_oracle_scalar_cases() {
        // f = x^2/2 at u = 3: f*(u) = u^2/2 = 4.5.
        let sq = Quadratic::new(1.0, None).unwrap();
        let est = conjugate_value_1d(&sq, 3.0, -10.0, 10.0, 20_000);
        assert!((est.value - 4.5).abs() < 1e-3);
        assert!(est.bounded);
        // f = |x|: f* is the indicator of [-1,1].
        let l1 = L1::new(1.0);
        let inside = conjugate_value_1d(&l1, 0.5, -10.0, 10.0, 20_000);
        assert!(inside.value.abs() < 1e-3);
        assert!(inside.bounded);
        let outside = conjugate_value_1d(&l1, 2.0, -10.0, 10.0, 20_000);
        assert!(!outside.bounded, "sup should ride the grid boundary");
        // Value at 0 row: f*(0) = -inf f; f = (x-1)^2 has infimum 0.
        let shifted = Quadratic::new(2.0, Some(Vector::from(vec![1.0]))).unwrap();
        let at0 = conjugate_value_1d(&shifted, 0.0, -10.0, 10.0, 20_000);
        assert!(at0.value.abs() < 1e-3);
    }

    #[test]
    fn fermat_check_at_known_minimizer() {
        // Differentiable entry: gradient vanishes exactly at the minimizer.
        let y = Vector::from(vec![0.4, -1.2, 0.0]);
        let f = Quadratic::new(3.0, Some(y.clone())).unwrap();
        use smooth::SmoothFn;
        assert!(f.grad(&y).norm() <= 1e-8);
        let off = f.grad(&y.axpy(1.0, &Vector::from(vec![0.1, 0.0, 0.0])));
        assert!(off.norm() > 1e-8);
    }
}
