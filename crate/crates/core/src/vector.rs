//! Elements of the ordered vector space `R^d`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite vector in `R^d`, `d >= 1`.
///
/// Arithmetic between vectors of different dimension panics; constructors
/// and the cone operations check dimensions up front and return an error.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EVector(Vec<f64>);

impl EVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Rejected(
                "vector must have at least one coordinate".into(),
            ));
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(coords))
    }

    /// The zero vector of dimension `d`.
    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        Self(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        debug_assert_eq!(self.0.len(), other.len());
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    /// Largest absolute coordinate.
    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|c| c * s).collect())
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() == d {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: d,
                found: self.dim(),
            })
        }
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Self(self.0.iter().zip(&rhs.0).map(|(&a, &b)| f(a, b)).collect())
    }
}

impl TryFrom<Vec<f64>> for EVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<EVector> for Vec<f64> {
    fn from(v: EVector) -> Self {
        v.0
    }
}

impl Index<usize> for EVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for EVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl fmt::Display for EVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &EVector {
    type Output = EVector;

    fn add(self, rhs: &EVector) -> EVector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Add for EVector {
    type Output = EVector;

    fn add(self, rhs: EVector) -> EVector {
        &self + &rhs
    }
}

impl Sub for &EVector {
    type Output = EVector;

    fn sub(self, rhs: &EVector) -> EVector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Sub for EVector {
    type Output = EVector;

    fn sub(self, rhs: EVector) -> EVector {
        &self - &rhs
    }
}

impl Neg for &EVector {
    type Output = EVector;

    fn neg(self) -> EVector {
        self.scale(-1.0)
    }
}

impl Mul<&EVector> for f64 {
    type Output = EVector;

    fn mul(self, rhs: &EVector) -> EVector {
        rhs.scale(self)
    }
}

/// Builds an [`EVector`] from literal coordinates, panicking on invalid input.
///
/// ```
/// use cone_smetric::evec;
/// let v = evec![1.0, 2.0];
/// assert_eq!(v.dim(), 2);
/// ```
#[macro_export]
macro_rules! evec {
    ($($x:expr),+ $(,)?) => {
        $crate::EVector::new(vec![$(($x) as f64),+]).expect("valid vector literal")
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nan() {
        assert!(EVector::new(vec![]).is_err());
        assert_eq!(
            EVector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        );
        assert!(EVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = evec![1, 2];
        let b = evec![3, -1];
        assert_eq!(&a + &b, evec![4, 1]);
        assert_eq!(&a - &b, evec![-2, 3]);
        assert_eq!(2.0 * &a, evec![2, 4]);
        assert_eq!(-&b, evec![-3, 1]);
        assert_eq!(a.dot(b.coords()), 1.0);
    }

    #[test]
    fn serde_roundtrip_validates() {
        let v: EVector = serde_json::from_str("[0.5, 1]").unwrap();
        assert_eq!(v, evec![0.5, 1]);
        assert!(serde_json::from_str::<EVector>("[]").is_err());
    }
}
