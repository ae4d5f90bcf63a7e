//! The proximable-function catalog.

use std::sync::Arc;

use crate::dense::DenseMatrix;
use crate::error::{PdError, Result};
use crate::extreal::ExtReal;
use crate::vector::Vector;

use super::{check_step, linear_tilt, ProxFn, ProxRef};

/// Box bounds, uniform across coordinates or per coordinate. Entries may be
/// -inf / +inf to drop a side (the values are only ever used as clamp limits
/// and in sign tests, never in sums).
#[derive(Clone, Debug)]
pub enum Bounds {
    Uniform { lo: f64, hi: f64 },
    Per { lo: Vec<f64>, hi: Vec<f64> },
}

impl Bounds {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(PdError::InvalidSet {
                reason: format!("empty or invalid box [{lo}, {hi}]"),
            });
        }
        Ok(Bounds::Uniform { lo, hi })
    }

    pub fn per(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(PdError::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        for (j, (l, h)) in lo.iter().zip(hi.iter()).enumerate() {
            if l.is_nan() || h.is_nan() || l > h || *l == f64::INFINITY || *h == f64::NEG_INFINITY {
                return Err(PdError::InvalidSet {
                    reason: format!("empty or invalid box [{l}, {h}] at coordinate {j}"),
                });
            }
        }
        Ok(Bounds::Per { lo, hi })
    }

    pub fn symmetric(radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(PdError::InvalidSet {
                reason: format!("negative box radius {radius}"),
            });
        }
        Bounds::uniform(-radius, radius)
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Bounds::Uniform { .. } => None,
            Bounds::Per { lo, .. } => Some(lo.len()),
        }
    }

    fn check_dim(&self, n: usize) -> (f64, f64) {
        // Returns placeholder; concrete access goes through lo_at / hi_at.
        if let Some(d) = self.dim() {
            assert_eq!(d, n, "box bounds dimension mismatch");
        }
        (0.0, 0.0)
    }

    fn lo_at(&self, j: usize) -> f64 {
        match self {
            Bounds::Uniform { lo, .. } => *lo,
            Bounds::Per { lo, .. } => lo[j],
        }
    }

    fn hi_at(&self, j: usize) -> f64 {
        match self {
            Bounds::Uniform { hi, .. } => *hi,
            Bounds::Per { hi, .. } => hi[j],
        }
    }

    fn clamp(&self, x: &Vector) -> Vector {
        self.check_dim(x.len());
        Vector::from_raw(
            x.iter()
                .enumerate()
                .map(|(j, v)| v.clamp(self.lo_at(j), self.hi_at(j)))
                .collect(),
        )
    }

    fn contains(&self, x: &Vector) -> bool {
        self.check_dim(x.len());
        x.iter()
            .enumerate()
            .all(|(j, v)| *v >= self.lo_at(j) && *v <= self.hi_at(j))
    }
}

/// Weighted l1 norm `weight * ||x||_1`.
pub struct L1 {
    weight: f64,
}

impl L1 {
    /// `weight >= 0`.
    pub fn new(weight: f64) -> Self {
        assert!(weight >= 0.0 && weight.is_finite(), "l1 weight must be >= 0");
        L1 { weight }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

impl ProxFn for L1 {
    fn eval(&self, x: &Vector) -> ExtReal {
        ExtReal::Finite(self.weight * x.iter().map(|v| v.abs()).sum::<f64>())
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        let t = gamma * self.weight;
        Ok(Vector::from_raw(
            x.iter()
                .map(|v| v.signum() * (v.abs() - t).max(0.0))
                .collect(),
        ))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        // Conjugate of the (scaled) l1 norm: indicator of [-w, w]^N.
        Some(Arc::new(BoxInd::new(
            Bounds::symmetric(self.weight).expect("weight validated at construction"),
        )))
    }
}

/// Quadratic `(weight / 2) ||x - center||^2`; `center = None` means the origin
/// in any dimension. Also usable as the smooth term (see [`super::smooth`]).
pub struct Quadratic {
    weight: f64,
    center: Option<Vector>,
}

impl Quadratic {
    pub fn new(weight: f64, center: Option<Vector>) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(PdError::InvalidParameter {
                reason: format!("quadratic weight must be > 0, got {weight}"),
            });
        }
        Ok(Quadratic { weight, center })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn center(&self) -> Option<&Vector> {
        self.center.as_ref()
    }

    fn diff(&self, x: &Vector) -> Vector {
        match &self.center {
            Some(c) => x.sub(c),
            None => x.clone(),
        }
    }
}

impl ProxFn for Quadratic {
    fn eval(&self, x: &Vector) -> ExtReal {
        let d = self.diff(x);
        ExtReal::Finite(0.5 * self.weight * d.dot(&d))
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        let a = gamma * self.weight;
        let scaled = match &self.center {
            Some(c) => x.axpy(a, c),
            None => x.clone(),
        };
        Ok(scaled.scale(1.0 / (1.0 + a)))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        // ((w/2)||. - y||^2)*(u) = ||u||^2 / (2w) + <u, y>
        let base: ProxRef = Arc::new(Quadratic {
            weight: 1.0 / self.weight,
            center: None,
        });
        Some(match &self.center {
            Some(c) => linear_tilt(base, c.clone()),
            None => base,
        })
    }

    fn quadratic_model(&self, n: usize) -> Option<(DenseMatrix, Vector, f64)> {
        let mut q = DenseMatrix::zeros(n, n);
        for i in 0..n {
            q[(i, i)] = self.weight;
        }
        match &self.center {
            Some(c) => {
                assert_eq!(c.len(), n, "quadratic center dimension mismatch");
                Some((q, c.scale(-self.weight), 0.5 * self.weight * c.dot(c)))
            }
            None => Some((q, Vector::zeros(n), 0.0)),
        }
    }
}

/// Indicator of a box; prox is the clamp projection for every step.
pub struct BoxInd {
    bounds: Bounds,
}

impl BoxInd {
    pub fn new(bounds: Bounds) -> Self {
        BoxInd { bounds }
    }

    /// Indicator of the nonnegative orthant.
    pub fn nonneg() -> Self {
        BoxInd {
            bounds: Bounds::Uniform {
                lo: 0.0,
                hi: f64::INFINITY,
            },
        }
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }
}

impl ProxFn for BoxInd {
    fn eval(&self, x: &Vector) -> ExtReal {
        if self.bounds.contains(x) {
            ExtReal::Finite(0.0)
        } else {
            ExtReal::PosInf
        }
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        Ok(self.bounds.clamp(x))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        Some(Arc::new(SupportBox {
            bounds: self.bounds.clone(),
        }))
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        Some((self.bounds.clamp(x), 0.0))
    }
}

/// Support function of a box: `sigma_C(u) = sup_{x in C} <u, x>`, which is
/// `sum_j max(lo_j u_j, hi_j u_j)`. For a symmetric box this is a weighted
/// l1 norm. Its prox comes from Moreau's decomposition through the
/// projection onto the box.
pub struct SupportBox {
    bounds: Bounds,
}

impl SupportBox {
    pub fn new(bounds: Bounds) -> Result<Self> {
        Ok(SupportBox { bounds })
    }

    fn term(&self, j: usize, u: f64) -> ExtReal {
        if u == 0.0 {
            return ExtReal::Finite(0.0);
        }
        let t = if u > 0.0 {
            self.bounds.hi_at(j)
        } else {
            self.bounds.lo_at(j)
        };
        if t.is_infinite() {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(u * t)
        }
    }
}

impl ProxFn for SupportBox {
    fn eval(&self, u: &Vector) -> ExtReal {
        self.bounds.check_dim(u.len());
        let mut total = ExtReal::Finite(0.0);
        for (j, v) in u.iter().enumerate() {
            total = total + self.term(j, *v);
        }
        total
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        // prox_{gamma sigma_C}(x) = x - gamma P_C(x / gamma)
        let projected = self.bounds.clamp(&x.scale(1.0 / gamma));
        Ok(x.axpy(-gamma, &projected))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        Some(Arc::new(BoxInd {
            bounds: self.bounds.clone(),
        }))
    }

    fn eval_nearby(&self, u: &Vector) -> Option<(Vector, f64)> {
        // Finite only where unbounded box directions see the right sign;
        // clamp the offending coordinates to zero first.
        self.bounds.check_dim(u.len());
        let mut p = Vec::with_capacity(u.len());
        for (j, v) in u.iter().enumerate() {
            let mut w = *v;
            if self.bounds.hi_at(j).is_infinite() {
                w = w.min(0.0);
            }
            if self.bounds.lo_at(j).is_infinite() {
                w = w.max(0.0);
            }
            p.push(w);
        }
        let p = Vector::from_raw(p);
        let value = match self.eval(&p) {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => return None,
        };
        Some((p, value))
    }
}

/// Builds the support/indicator pair of a box: `(sigma_C, iota_C)` with
/// `(sigma_C)* = iota_C`.
pub fn support_indicator_pair(bounds: Bounds) -> Result<(Arc<SupportBox>, Arc<BoxInd>)> {
    let support = Arc::new(SupportBox::new(bounds.clone())?);
    let indicator = Arc::new(BoxInd::new(bounds));
    Ok((support, indicator))
}

/// Power penalty `weight * sum_j |x_j|^p`, `p >= 1`, applied componentwise.
pub struct Power {
    p: f64,
    weight: f64,
}

impl Power {
    pub fn new(p: f64, weight: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(PdError::UnsupportedStructure {
                reason: format!("|x|^p with p = {p} < 1 is nonconvex"),
            });
        }
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(PdError::InvalidParameter {
                reason: format!("power weight must be >= 0, got {weight}"),
            });
        }
        Ok(Power { p, weight })
    }

    /// Scalar prox: minimizer of `w |t|^p + (t - x)^2 / (2 gamma)`.
    fn scalar_prox(&self, x: f64, gamma: f64) -> f64 {
        let w = self.weight;
        if w == 0.0 {
            return x;
        }
        if self.p == 1.0 {
            return x.signum() * (x.abs() - gamma * w).max(0.0);
        }
        if self.p == 2.0 {
            return x / (1.0 + 2.0 * gamma * w);
        }
        let a = x.abs();
        if a == 0.0 {
            return 0.0;
        }
        // Optimality on t in (0, a]: t + c t^(p-1) = a with c = gamma w p.
        let c = gamma * w * self.p;
        let pm1 = self.p - 1.0;
        let phi = |t: f64| t + c * t.powf(pm1) - a;
        let (mut lo, mut hi) = (0.0f64, a);
        let mut t = a / 2.0;
        for _ in 0..200 {
            let f = phi(t);
            if f.abs() <= 1e-12 * (1.0 + a) {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let dphi = 1.0 + c * pm1 * t.powf(self.p - 2.0);
            let newton = t - f / dphi;
            // Bisection fallback whenever Newton leaves the bracket.
            t = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        x.signum() * t
    }
}

impl ProxFn for Power {
    fn eval(&self, x: &Vector) -> ExtReal {
        ExtReal::Finite(self.weight * x.iter().map(|v| v.abs().powf(self.p)).sum::<f64>())
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        Ok(Vector::from_raw(
            x.iter().map(|v| self.scalar_prox(*v, gamma)).collect(),
        ))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        if self.p == 1.0 {
            return Some(Arc::new(BoxInd::new(
                Bounds::symmetric(self.weight).expect("validated"),
            )));
        }
        if self.weight == 0.0 {
            return Some(Arc::new(PointInd::origin()));
        }
        // (w |t|^p)*(u) = w (p-1) (|u| / (w p))^(p/(p-1))
        let q = self.p / (self.p - 1.0);
        let cw = self.weight * (self.p - 1.0) / (self.weight * self.p).powf(q);
        Some(Arc::new(Power { p: q, weight: cw }))
    }
}

/// The zero function (identity prox), any dimension.
pub struct Zero;

impl ProxFn for Zero {
    fn eval(&self, _x: &Vector) -> ExtReal {
        ExtReal::Finite(0.0)
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        Ok(x.clone())
    }

    fn conjugate(&self) -> Option<ProxRef> {
        Some(Arc::new(PointInd::origin()))
    }

    fn quadratic_model(&self, n: usize) -> Option<(DenseMatrix, Vector, f64)> {
        Some((DenseMatrix::zeros(n, n), Vector::zeros(n), 0.0))
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// Indicator of a single point; `None` is the origin in any dimension.
pub struct PointInd {
    center: Option<Vector>,
}

impl PointInd {
    pub fn origin() -> Self {
        PointInd { center: None }
    }

    pub fn at(center: Vector) -> Self {
        PointInd {
            center: Some(center),
        }
    }

    fn point(&self, n: usize) -> Vector {
        match &self.center {
            Some(c) => {
                assert_eq!(c.len(), n, "point indicator dimension mismatch");
                c.clone()
            }
            None => Vector::zeros(n),
        }
    }
}

impl ProxFn for PointInd {
    fn eval(&self, x: &Vector) -> ExtReal {
        let c = self.point(x.len());
        if x.as_slice() == c.as_slice() {
            ExtReal::Finite(0.0)
        } else {
            ExtReal::PosInf
        }
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        Ok(self.point(x.len()))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        match &self.center {
            None => Some(Arc::new(Zero)),
            Some(c) => Some(linear_tilt(Arc::new(Zero), c.clone())),
        }
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        Some((self.point(x.len()), 0.0))
    }
}

/// Indicator of the consensus subspace `{(x_1,...,x_M) : x_1 = ... = x_M}`
/// over `(R^len)^M`; prox replicates the blockwise mean.
pub struct ConsensusInd {
    blocks: usize,
    block_len: usize,
}

impl ConsensusInd {
    pub fn new(blocks: usize, block_len: usize) -> Self {
        assert!(blocks > 0, "consensus needs at least one block");
        ConsensusInd { blocks, block_len }
    }

    fn mean(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.blocks * self.block_len);
        let mut mean = vec![0.0; self.block_len];
        for b in 0..self.blocks {
            for j in 0..self.block_len {
                mean[j] += x[b * self.block_len + j];
            }
        }
        for m in mean.iter_mut() {
            *m /= self.blocks as f64;
        }
        Vector::from_raw(mean)
    }

    fn replicate(&self, mean: &Vector) -> Vector {
        let mut out = Vec::with_capacity(self.blocks * self.block_len);
        for _ in 0..self.blocks {
            out.extend_from_slice(mean.as_slice());
        }
        Vector::from_raw(out)
    }
}

impl ProxFn for ConsensusInd {
    fn eval(&self, x: &Vector) -> ExtReal {
        let rep = self.replicate(&self.mean(x));
        if rep.as_slice() == x.as_slice() {
            ExtReal::Finite(0.0)
        } else {
            ExtReal::PosInf
        }
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        Ok(self.replicate(&self.mean(x)))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        // Conjugate of the indicator of a subspace: indicator of its
        // orthogonal complement, here the zero-sum subspace.
        Some(Arc::new(ZeroSumInd {
            blocks: self.blocks,
            block_len: self.block_len,
        }))
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        Some((self.replicate(&self.mean(x)), 0.0))
    }
}

/// Indicator of `{(v_1,...,v_M) : v_1 + ... + v_M = 0}`; prox subtracts the
/// blockwise mean.
pub struct ZeroSumInd {
    blocks: usize,
    block_len: usize,
}

impl ZeroSumInd {
    pub fn new(blocks: usize, block_len: usize) -> Self {
        assert!(blocks > 0);
        ZeroSumInd { blocks, block_len }
    }

    fn project(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.blocks * self.block_len);
        let mut mean = vec![0.0; self.block_len];
        for b in 0..self.blocks {
            for j in 0..self.block_len {
                mean[j] += x[b * self.block_len + j];
            }
        }
        for m in mean.iter_mut() {
            *m /= self.blocks as f64;
        }
        let mut out = Vec::with_capacity(x.len());
        for b in 0..self.blocks {
            for j in 0..self.block_len {
                out.push(x[b * self.block_len + j] - mean[j]);
            }
        }
        Vector::from_raw(out)
    }
}

impl ProxFn for ZeroSumInd {
    fn eval(&self, x: &Vector) -> ExtReal {
        let p = self.project(x);
        if p.as_slice() == x.as_slice() {
            ExtReal::Finite(0.0)
        } else {
            ExtReal::PosInf
        }
    }

    fn prox(&self, x: &Vector, gamma: f64) -> Result<Vector> {
        check_step(gamma)?;
        Ok(self.project(x))
    }

    fn conjugate(&self) -> Option<ProxRef> {
        Some(Arc::new(ConsensusInd {
            blocks: self.blocks,
            block_len: self.block_len,
        }))
    }

    fn eval_nearby(&self, x: &Vector) -> Option<(Vector, f64)> {
        Some((self.project(x), 0.0))
    }
}
