//! The nonlinear scalarization `ξ_e(y) = inf { r : y ∈ r·e − K }`.
//!
//! For `K = {x : Ax >= 0}` the infimum has a closed form: `y ∈ r·e − K` holds
//! exactly when `r·(Ae)_i >= (Ay)_i` for every facet, so
//!
//! ```text
//! ξ_e(y) = max_i (Ay)_i / (Ae)_i
//! ```
//!
//! which is what [`Scalarizer::xi`] evaluates. [`Scalarizer::xi_oracle`]
//! recovers the same number by bisection on cone membership and exists to
//! cross-check the closed form.

use crate::cone::{Classification, PolyhedralCone};
use crate::error::{Error, Result};
use crate::vector::EVector;

/// A cone paired with an interior direction `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scalarizer {
    cone: PolyhedralCone,
    e: EVector,
    ae: Vec<f64>,
}

impl Scalarizer {
    pub fn new(cone: PolyhedralCone, e: EVector) -> Result<Self> {
        if cone.classify(&e)? != Classification::Interior {
            return Err(Error::Rejected(
                "scalarizer direction e is not interior".into(),
            ));
        }
        let ae = cone.facet_values_unchecked(&e);
        Ok(Self { cone, e, ae })
    }

    /// Uses the cone's own interior witness as `e`.
    pub fn from_cone(cone: PolyhedralCone) -> Self {
        let e = cone.interior_point().clone();
        Self::new(cone, e).expect("cone witness is interior")
    }

    pub fn cone(&self) -> &PolyhedralCone {
        &self.cone
    }

    pub fn e(&self) -> &EVector {
        &self.e
    }

    pub fn xi(&self, y: &EVector) -> Result<f64> {
        y.check_dim(self.cone.dim())?;
        Ok(self.xi_unchecked(y))
    }

    pub(crate) fn xi_unchecked(&self, y: &EVector) -> f64 {
        self.cone
            .facets()
            .iter()
            .zip(&self.ae)
            .map(|(row, ae)| y.dot(row) / ae)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bisection for `inf { r : r·e − y ∈ K }` over `[lo, hi]`.
    ///
    /// The bracket must satisfy `lo·e − y ∉ K` and `hi·e − y ∈ K`; the result
    /// is within `(hi − lo) / 2^iters` of the infimum.
    pub fn xi_oracle(&self, y: &EVector, lo: f64, hi: f64, iters: u32) -> Result<f64> {
        y.check_dim(self.cone.dim())?;
        if iters < 40 {
            return Err(Error::Rejected(format!(
                "need at least 40 iterations, got {iters}"
            )));
        }
        let member = |r: f64| {
            self.cone
                .contains(&(&self.e.scale(r) - y))
                .expect("dimension checked")
        };
        if !(lo < hi) || member(lo) || !member(hi) {
            return Err(Error::Rejected(format!("invalid bracket [{lo}, {hi}]")));
        }
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..iters {
            let mid = 0.5 * (lo + hi);
            if member(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// `max_i ‖A_i‖₂ / (Ae)_i`, a Lipschitz constant of `ξ_e` in the
    /// Euclidean norm.
    pub fn lipschitz_constant(&self) -> f64 {
        self.cone
            .facets()
            .iter()
            .zip(&self.ae)
            .map(|(row, ae)| row.iter().map(|v| v * v).sum::<f64>().sqrt() / ae)
            .fold(0.0, f64::max)
    }
}
