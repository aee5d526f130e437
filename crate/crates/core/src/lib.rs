//! Cone S-metric spaces over polyhedral cones in `R^d`.
//!
//! The crate provides:
//!
//! - [`cone`]: polyhedral cones, membership and the orders `≼`, `≪`;
//! - [`scalarization`]: the scalarization `ξ_e` and a bisection cross-check;
//! - [`smetric`]: real S-metrics, their axioms, balls and sequences;
//! - [`cone_metric`]: cone S-metrics and their reduction to real ones;
//! - [`theta`]: the quantized chain-infimum S-metric `S*` and the ball
//!   refinement check between `S*` and a cone S-metric;
//! - [`fixed_point`]: Picard iteration under a cone contraction;
//! - [`spec`] and [`run`]: the JSON space description and the commands of
//!   the `cone-smetric` binary.
//!
//! ```
//! use cone_smetric::{evec, PolyhedralCone, Scalarizer};
//!
//! let s = Scalarizer::from_cone(PolyhedralCone::orthant(2));
//! assert_eq!(s.xi(&evec![3, 5]).unwrap(), 5.0);
//! ```

// Comparisons are written `!(a <= b)` on purpose, so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod cone_metric;
pub mod error;
pub mod fixed_point;
pub mod run;
pub mod scalarization;
pub mod smetric;
pub mod spec;
pub mod theta;
mod vector;

pub use cone::{Classification, Order, PolyhedralCone};
pub use cone_metric::{ConeSMetric, ConeTable, ConeValued, ScaledAbsDiff, ScaledSMetric};
pub use error::{Error, Result};
pub use scalarization::Scalarizer;
pub use smetric::{AxiomReport, SMetric, Table3};
pub use theta::ThetaParams;
pub use vector::EVector;

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cones.md")]
    mod cones {}
    #[doc = include_str!("../../../book/src/scalarization.md")]
    mod scalarization {}
    #[doc = include_str!("../../../book/src/smetrics.md")]
    mod smetrics {}
    #[doc = include_str!("../../../book/src/cone-smetrics.md")]
    mod cone_smetrics {}
    #[doc = include_str!("../../../book/src/star-metric.md")]
    mod star_metric {}
    #[doc = include_str!("../../../book/src/fixed-points.md")]
    mod fixed_points {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
