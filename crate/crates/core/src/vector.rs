//! Finite-dimensional real vectors.
//!
//! All solver state lives in [`Vector`]s. Construction rejects NaN and
//! infinite entries so that downstream arithmetic can assume finiteness.

use std::fmt;
use std::ops::{Deref, Index, IndexMut};

use crate::error::PdError;

/// A finite real vector. Every entry is guaranteed finite at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Builds a vector, rejecting NaN/infinite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self, PdError> {
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(PdError::NonFiniteEntry { index: i });
        }
        Ok(Vector(entries))
    }

    /// Builds a vector from entries already known to be finite.
    ///
    /// Panics in debug builds if an entry is not finite; used internally
    /// where the arithmetic cannot produce NaN from finite inputs.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        Vector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        Vector(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Checks every entry is still finite (iteration guards use this to
    /// detect divergence).
    pub fn all_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.len(), other.len(), "dot: dimension mismatch");
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, alpha: f64) -> Vector {
        Vector(self.0.iter().map(|v| alpha * v).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len(), "add: dimension mismatch");
        Vector(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len(), "sub: dimension mismatch");
        Vector(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    /// self + alpha * other
    pub fn axpy(&self, alpha: f64, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len(), "axpy: dimension mismatch");
        Vector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + alpha * b)
                .collect(),
        )
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.sub(other).norm()
    }

    /// Concatenates blocks into one vector.
    pub fn concat(blocks: &[Vector]) -> Vector {
        let mut out = Vec::with_capacity(blocks.iter().map(|b| b.len()).sum());
        for b in blocks {
            out.extend_from_slice(&b.0);
        }
        Vector(out)
    }

    /// Splits into blocks of the given sizes. Sizes must sum to `len()`.
    pub fn split(&self, sizes: &[usize]) -> Vec<Vector> {
        assert_eq!(sizes.iter().sum::<usize>(), self.len(), "split: size mismatch");
        let mut out = Vec::with_capacity(sizes.len());
        let mut offset = 0;
        for &s in sizes {
            out.push(Vector(self.0[offset..offset + s].to_vec()));
            offset += s;
        }
        out
    }
}

impl Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<f64>> for Vector {
    /// Panics on non-finite entries; prefer [`Vector::new`] for untrusted data.
    fn from(v: Vec<f64>) -> Self {
        Vector::new(v).expect("non-finite entry in vector literal")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_inf() {
        assert!(Vector::new(vec![0.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![1.0, -2.0]).is_ok());
    }

    #[test]
    fn block_roundtrip() {
        let v = Vector::from(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let blocks = v.split(&[2, 3]);
        assert_eq!(blocks[0].as_slice(), &[1.0, 2.0]);
        assert_eq!(Vector::concat(&blocks), v);
    }

    #[test]
    fn norms() {
        let v = Vector::from(vec![3.0, -4.0]);
        assert_eq!(v.norm(), 5.0);
        assert_eq!(v.norm_inf(), 4.0);
    }
}
