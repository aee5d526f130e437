//! Picard iteration for maps contracting in a cone S-metric.
//!
//! If `S_p(Tx, Tx, Ty) ≼ h·S_p(x, x, y)` with `h < 1`, scalarizing both sides
//! gives the same contraction for the real S-metric `ξ_e ∘ S_p`, so the
//! iteration is monitored through the scalar residual
//! `ξ_e(S_p(x_k, x_k, T x_k))`. A residual below `eps` is the same statement
//! as `S_p(x_k, x_k, T x_k) ≪ eps·e`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone_metric::ConeSMetric;
use crate::error::{Error, Result};
use crate::scalarization::Scalarizer;
use crate::smetric::{Axiom, AxiomReport};

/// Relative slack for the contraction comparison, absorbing rounding in
/// `Tx` and `Ty`.
pub const DEFAULT_CONTRACTION_TOL: f64 = 1e-12;

pub struct ContractionProblem<P, M, T> {
    metric: M,
    scalarizer: Scalarizer,
    map: T,
    h: f64,
    x0: P,
    eps: f64,
    max_iter: usize,
    tol: f64,
}

impl<P: fmt::Debug, M: fmt::Debug, T> fmt::Debug for ContractionProblem<P, M, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContractionProblem")
            .field("metric", &self.metric)
            .field("h", &self.h)
            .field("x0", &self.x0)
            .field("eps", &self.eps)
            .field("max_iter", &self.max_iter)
            .finish_non_exhaustive()
    }
}

impl<P, M, T> ContractionProblem<P, M, T>
where
    P: Clone + fmt::Debug,
    M: ConeSMetric<P>,
    T: Fn(&P) -> P,
{
    pub fn new(
        metric: M,
        scalarizer: Scalarizer,
        map: T,
        h: f64,
        x0: P,
        eps: f64,
        max_iter: usize,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&h) {
            return Err(Error::Rejected(format!("h must lie in [0, 1), got {h}")));
        }
        if !(eps > 0.0) {
            return Err(Error::Rejected(format!("eps must be positive, got {eps}")));
        }
        if max_iter == 0 {
            return Err(Error::Rejected("max_iter must be positive".into()));
        }
        if metric.cone() != scalarizer.cone() {
            return Err(Error::Rejected(
                "scalarizer cone differs from the metric's cone".into(),
            ));
        }
        Ok(Self {
            metric,
            scalarizer,
            map,
            h,
            x0,
            eps,
            max_iter,
            tol: DEFAULT_CONTRACTION_TOL,
        })
    }

    /// Overrides the relative slack used by [`Self::verify_contraction`].
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol.max(0.0);
        self
    }

    pub fn with_start(mut self, x0: P) -> Self {
        self.x0 = x0;
        self
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn scalarizer(&self) -> &Scalarizer {
        &self.scalarizer
    }

    pub fn apply(&self, x: &P) -> P {
        (self.map)(x)
    }

    /// `ξ_e(S_p(x, x, y))`.
    pub fn distance(&self, x: &P, y: &P) -> f64 {
        self.scalarizer.xi_unchecked(&self.metric.eval(x, x, y))
    }

    /// Checks `S_p(Tx, Tx, Ty) ≼ h·S_p(x, x, y)` on each sample pair.
    ///
    /// The comparison allows a slack of `tol·(1 + ‖h·S_p(x, x, y)‖∞)` per
    /// facet. Pairs whose images leave the domain are reported as
    /// [`Axiom::DomainEscape`].
    pub fn verify_contraction(&self, samples: &[(P, P)]) -> Result<AxiomReport<P>> {
        let cone = self.metric.cone();
        let mut report = AxiomReport::default();
        for (x, y) in samples {
            if !(self.metric.contains(x) && self.metric.contains(y)) {
                return Err(Error::OutsideDomain("contraction sample".into()));
            }
            report.checked += 1;
            let (tx, ty) = (self.apply(x), self.apply(y));
            if !(self.metric.contains(&tx) && self.metric.contains(&ty)) {
                report.push(
                    Axiom::DomainEscape,
                    vec![x.clone(), y.clone()],
                    Vec::new(),
                    Vec::new(),
                );
                continue;
            }
            let lhs = self.metric.eval(&tx, &tx, &ty);
            let rhs = self.metric.eval(x, x, y).scale(self.h);
            let slack = self.tol * (1.0 + rhs.norm_inf());
            if !cone.contains_within(&(&rhs - &lhs), slack)? {
                report.push(
                    Axiom::Contraction,
                    vec![x.clone(), y.clone()],
                    lhs.coords().to_vec(),
                    rhs.coords().to_vec(),
                );
            }
        }
        Ok(report)
    }

    /// Iterates `x_{k+1} = T x_k` from `x0` until the residual drops below
    /// `eps`.
    pub fn banach_solve(&self) -> std::result::Result<Solution<P>, SolveError<P>> {
        let mut x = self.x0.clone();
        if !self.metric.contains(&x) {
            return Err(SolveError::DomainEscape { from: x, step: 0 });
        }
        let mut trajectory = vec![x.clone()];
        let mut residuals = Vec::new();
        let mut best = (x.clone(), f64::INFINITY);
        for k in 1..=self.max_iter {
            let tx = self.apply(&x);
            if !self.metric.contains(&tx) {
                return Err(SolveError::DomainEscape { from: x, step: k });
            }
            let residual = self.distance(&x, &tx);
            residuals.push(residual);
            if residual < best.1 {
                best = (x.clone(), residual);
            }
            if residual < self.eps {
                return Ok(Solution {
                    point: x,
                    iterations: k,
                    residual,
                    trajectory,
                    residuals,
                });
            }
            trajectory.push(tx.clone());
            x = tx;
        }
        Err(SolveError::NoConvergence {
            best: best.0,
            residual: best.1,
            iterations: self.max_iter,
        })
    }
}

/// A point whose residual fell below `eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution<P> {
    pub point: P,
    /// Number of evaluations of `T`, including the one that certified
    /// `point`.
    pub iterations: usize,
    /// `ξ_e(S_p(point, point, T point))`.
    pub residual: f64,
    /// `x_0, x_1, …, point`.
    pub trajectory: Vec<P>,
    /// `ξ_e(S_p(x_k, x_k, x_{k+1}))` for each evaluation.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError<P: fmt::Debug> {
    #[error(
        "no convergence after {iterations} iterations; best residual {residual:e} at {best:?}"
    )]
    NoConvergence {
        best: P,
        residual: f64,
        iterations: usize,
    },
    #[error("map left the domain at step {step} from {from:?}")]
    DomainEscape { from: P, step: usize },
}

/// `T(x) = scale·x + shift`, coordinatewise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| self.scale * v + self.shift).collect()
    }

    pub fn apply_scalar(&self, x: f64) -> f64 {
        self.scale * x + self.shift
    }

    /// The unique fixed point `shift / (1 − scale)` when `scale != 1`.
    pub fn fixed_point(&self) -> Option<f64> {
        (self.scale != 1.0).then(|| self.shift / (1.0 - self.scale))
    }
}
