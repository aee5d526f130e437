//! Polyhedral cones in `R^d` and the orders they induce.
//!
//! A cone is stored by its inward facet normals: `K = {x : Ax >= 0}`. Every
//! query is then a scan over the rows of `A`. The cone must be pointed
//! (`rank A = d`) and carry a witness `e` with `Ae > 0`, so its interior is
//! nonempty.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::EVector;

/// Pivot threshold for the numerical rank test on normalised rows.
const RANK_PIVOT_TOL: f64 = 1e-10;

/// Where a vector sits relative to a cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Interior,
    Boundary,
    Outside,
}

/// Outcome of comparing `x` against `y` in the cone order.
///
/// `Ll` means `x << y` (`y - x` interior), `Leq` means `x <= y` with `x != y`
/// and `y - x` on the boundary. `Ll` also implies `x <= y`; use
/// [`Order::is_leq`] when the weak order is what matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Eq,
    Leq,
    Ll,
    None,
}

impl Order {
    /// `x <= y` in the weak cone order (including equality).
    pub fn is_leq(self) -> bool {
        !matches!(self, Order::None)
    }

    pub fn is_ll(self) -> bool {
        matches!(self, Order::Ll)
    }
}

/// A closed pointed polyhedral cone with nonempty interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeRepr", into = "ConeRepr")]
pub struct PolyhedralCone {
    facets: Vec<Vec<f64>>,
    interior_point: EVector,
    strict_tol: f64,
}

#[derive(Serialize, Deserialize)]
struct ConeRepr {
    facets: Vec<Vec<f64>>,
    interior_point: EVector,
    #[serde(default)]
    strict_tol: f64,
}

impl TryFrom<ConeRepr> for PolyhedralCone {
    type Error = Error;

    fn try_from(r: ConeRepr) -> Result<Self> {
        Self::with_tolerance(r.facets, r.interior_point, r.strict_tol)
    }
}

impl From<PolyhedralCone> for ConeRepr {
    fn from(c: PolyhedralCone) -> Self {
        ConeRepr {
            facets: c.facets,
            interior_point: c.interior_point,
            strict_tol: c.strict_tol,
        }
    }
}

impl PolyhedralCone {
    /// Builds the cone `{x : Ax >= 0}` with `strict_tol = 0`.
    pub fn new(facets: Vec<Vec<f64>>, interior_point: EVector) -> Result<Self> {
        Self::with_tolerance(facets, interior_point, 0.0)
    }

    pub fn with_tolerance(
        facets: Vec<Vec<f64>>,
        interior_point: EVector,
        strict_tol: f64,
    ) -> Result<Self> {
        let d = interior_point.dim();
        if !(strict_tol.is_finite() && strict_tol >= 0.0) {
            return Err(Error::InvalidCone(format!(
                "strict_tol must be finite and nonnegative, got {strict_tol}"
            )));
        }
        if facets.len() < d {
            return Err(Error::InvalidCone(format!(
                "need at least {d} facets in dimension {d}, got {}",
                facets.len()
            )));
        }
        for (i, row) in facets.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidCone(format!(
                    "facet {i} has length {}, expected {d}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidCone(format!("facet {i} is not finite")));
            }
            if row.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidCone(format!("facet {i} is a zero row")));
            }
        }
        if numerical_rank(&facets) < d {
            return Err(Error::InvalidCone(
                "cone is not pointed (rank A < d)".into(),
            ));
        }
        let cone = Self {
            facets,
            interior_point,
            strict_tol,
        };
        if let Some(i) = cone
            .facet_values_unchecked(&cone.interior_point)
            .iter()
            .position(|&v| v <= strict_tol)
        {
            return Err(Error::InvalidCone(format!(
                "interior_point not interior (facet {i})"
            )));
        }
        Ok(cone)
    }

    /// The nonnegative orthant of `R^d` with witness `(1, ..., 1)`.
    pub fn orthant(d: usize) -> Self {
        let facets = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(facets, EVector::new(vec![1.0; d]).expect("finite"))
            .expect("orthant is a valid cone")
    }

    pub fn dim(&self) -> usize {
        self.interior_point.dim()
    }

    pub fn facets(&self) -> &[Vec<f64>] {
        &self.facets
    }

    pub fn interior_point(&self) -> &EVector {
        &self.interior_point
    }

    pub fn strict_tol(&self) -> f64 {
        self.strict_tol
    }

    /// `Ax`, one entry per facet.
    pub fn facet_values(&self, x: &EVector) -> Result<Vec<f64>> {
        x.check_dim(self.dim())?;
        Ok(self.facet_values_unchecked(x))
    }

    pub(crate) fn facet_values_unchecked(&self, x: &EVector) -> Vec<f64> {
        self.facets.iter().map(|row| x.dot(row)).collect()
    }

    pub fn classify(&self, x: &EVector) -> Result<Classification> {
        let ax = self.facet_values(x)?;
        Ok(self.classify_values(&ax))
    }

    fn classify_values(&self, ax: &[f64]) -> Classification {
        let tol = self.strict_tol;
        if ax.iter().all(|&v| v > tol) {
            Classification::Interior
        } else if ax.iter().any(|&v| v < -tol) {
            Classification::Outside
        } else {
            Classification::Boundary
        }
    }

    /// `x ∈ K` (interior or boundary).
    pub fn contains(&self, x: &EVector) -> Result<bool> {
        Ok(self.classify(x)? != Classification::Outside)
    }

    pub fn is_interior(&self, x: &EVector) -> Result<bool> {
        Ok(self.classify(x)? == Classification::Interior)
    }

    /// Membership with an explicit slack: every `(Ax)_i >= -tol`.
    pub fn contains_within(&self, x: &EVector, tol: f64) -> Result<bool> {
        Ok(self.facet_values(x)?.iter().all(|&v| v >= -tol))
    }

    /// Compares `x` with `y` in the order induced by the cone.
    pub fn order_rel(&self, x: &EVector, y: &EVector) -> Result<Order> {
        x.check_dim(self.dim())?;
        y.check_dim(self.dim())?;
        if x == y {
            return Ok(Order::Eq);
        }
        Ok(match self.classify(&(y - x))? {
            Classification::Interior => Order::Ll,
            Classification::Boundary => Order::Leq,
            Classification::Outside => Order::None,
        })
    }

    /// Least `n <= n_max` with `x << n·y`, for `x ∈ K` and `y ∈ int K`.
    pub fn archimedean_witness(&self, x: &EVector, y: &EVector, n_max: u64) -> Result<u64> {
        if self.classify(x)? == Classification::Outside {
            return Err(Error::Rejected("x must lie in the cone".into()));
        }
        if self.classify(y)? != Classification::Interior {
            return Err(Error::Rejected("y must be an interior point".into()));
        }
        if n_max == 0 {
            return Err(Error::Rejected("n_max must be positive".into()));
        }
        // (A(ny - x))_i > tol  <=>  n > ((Ax)_i + tol) / (Ay)_i, so the facet
        // ratios give a starting guess; the exact test settles it.
        let ax = self.facet_values_unchecked(x);
        let ay = self.facet_values_unchecked(y);
        let bound = ax
            .iter()
            .zip(&ay)
            .map(|(a, b)| (a + self.strict_tol) / b)
            .fold(f64::NEG_INFINITY, f64::max);
        let works = |n: u64| -> bool {
            self.order_rel(x, &(n as f64 * y))
                .map(Order::is_ll)
                .unwrap_or(false)
        };
        let mut n = if bound.is_finite() && bound >= 1.0 {
            (bound.floor() as u64).saturating_sub(2).max(1)
        } else {
            1
        };
        if n > n_max {
            return Err(Error::NotFound(format!(
                "no n <= {n_max} with x << n·y (needs about {n})"
            )));
        }
        while n <= n_max {
            if works(n) {
                return Ok(n);
            }
            n += 1;
        }
        Err(Error::NotFound(format!("no n <= {n_max} with x << n·y")))
    }
}

/// Rank of `rows` by Gaussian elimination with partial pivoting.
pub(crate) fn numerical_rank(rows: &[Vec<f64>]) -> usize {
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let s = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            r.iter().map(|v| v / s).collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if rank == m.len() {
            break;
        }
        let (pivot, best) = (rank..m.len())
            .map(|i| (i, m[i][col].abs()))
            .fold((rank, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best <= RANK_PIVOT_TOL {
            continue;
        }
        m.swap(rank, pivot);
        #[allow(clippy::needless_range_loop)]
        for i in rank + 1..m.len() {
            let f = m[i][col] / m[rank][col];
            for j in col..cols {
                m[i][j] -= f * m[rank][j];
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evec;

    fn skew() -> PolyhedralCone {
        PolyhedralCone::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]], evec![1, 0]).unwrap()
    }

    #[test]
    fn classify_examples() {
        let k = PolyhedralCone::orthant(2);
        assert_eq!(k.classify(&evec![1, 2]).unwrap(), Classification::Interior);
        assert_eq!(k.classify(&evec![0, 0]).unwrap(), Classification::Boundary);
        assert_eq!(
            skew().classify(&evec![1, -3]).unwrap(),
            Classification::Outside
        );
        assert_eq!(skew().facet_values(&evec![1, -3]).unwrap(), vec![1.0, -2.0]);
    }

    #[test]
    fn classify_dimension_mismatch() {
        let k = PolyhedralCone::orthant(2);
        assert_eq!(
            k.classify(&evec![1, 2, 3]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        assert!(k.order_rel(&evec![1], &evec![1, 2]).is_err());
    }

    #[test]
    fn order_examples() {
        let k = PolyhedralCone::orthant(2);
        assert_eq!(k.order_rel(&evec![0, 0], &evec![1, 1]).unwrap(), Order::Ll);
        assert_eq!(k.order_rel(&evec![0, 0], &evec![1, 0]).unwrap(), Order::Leq);
        assert_eq!(
            k.order_rel(&evec![1, 0], &evec![0, 1]).unwrap(),
            Order::None
        );
        assert_eq!(k.order_rel(&evec![2, 3], &evec![2, 3]).unwrap(), Order::Eq);
    }

    #[test]
    fn archimedean_examples() {
        let k = PolyhedralCone::orthant(2);
        assert_eq!(
            k.archimedean_witness(&evec![5, 1], &evec![1, 1], 100)
                .unwrap(),
            6
        );
        assert_eq!(
            k.archimedean_witness(&evec![0, 0], &evec![1, 1], 100)
                .unwrap(),
            1
        );
        assert_eq!(
            skew()
                .archimedean_witness(&evec![3, 0], &evec![1, 0], 100)
                .unwrap(),
            4
        );
    }

    #[test]
    fn archimedean_errors() {
        let k = PolyhedralCone::orthant(2);
        assert!(matches!(
            k.archimedean_witness(&evec![-1, 0], &evec![1, 1], 10),
            Err(Error::Rejected(_))
        ));
        assert!(matches!(
            k.archimedean_witness(&evec![1, 0], &evec![1, 0], 10),
            Err(Error::Rejected(_))
        ));
        assert!(matches!(
            k.archimedean_witness(&evec![50, 0], &evec![1, 1], 10),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn construction_rejects_bad_cones() {
        // rank 1: the half-plane {x1 >= 0} is not pointed
        assert!(matches!(
            PolyhedralCone::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]], evec![1, 0]),
            Err(Error::InvalidCone(_))
        ));
        // m < d
        assert!(PolyhedralCone::new(vec![vec![1.0, 1.0]], evec![1, 1]).is_err());
        // zero row
        assert!(PolyhedralCone::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]],
            evec![1, 1]
        )
        .is_err());
        // witness on the boundary
        let err = PolyhedralCone::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], evec![1, 0]);
        assert!(
            matches!(err, Err(Error::InvalidCone(m)) if m.contains("interior_point not interior"))
        );
        // negative tolerance
        assert!(PolyhedralCone::with_tolerance(vec![vec![1.0]], evec![1], -1.0).is_err());
    }

    #[test]
    fn ray_cone_in_one_dimension() {
        let k = PolyhedralCone::new(vec![vec![1.0]], evec![1]).unwrap();
        assert_eq!(k.classify(&evec![3]).unwrap(), Classification::Interior);
        assert_eq!(k.classify(&evec![-3]).unwrap(), Classification::Outside);
    }

    #[test]
    fn strict_tol_widens_boundary() {
        let k = PolyhedralCone::with_tolerance(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            evec![1, 1],
            1e-12,
        )
        .unwrap();
        assert_eq!(
            k.classify(&evec![1, 1e-13]).unwrap(),
            Classification::Boundary
        );
        assert_eq!(
            k.classify(&evec![1, -1e-13]).unwrap(),
            Classification::Boundary
        );
    }

    #[test]
    fn rank_of_redundant_facets() {
        assert_eq!(
            numerical_rank(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]),
            2
        );
        assert_eq!(numerical_rank(&[vec![1.0, 2.0], vec![-2.0, -4.0]]), 1);
    }

    #[test]
    fn serde_validates() {
        let k: PolyhedralCone = serde_json::from_str(
            r#"{"facets": [[1,0],[1,1]], "interior_point": [1,0], "strict_tol": 0.0}"#,
        )
        .unwrap();
        assert_eq!(k, skew());
        assert!(serde_json::from_str::<PolyhedralCone>(
            r#"{"facets": [[1,0]], "interior_point": [1,0]}"#
        )
        .is_err());
    }
}
