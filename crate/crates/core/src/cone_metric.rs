//! Cone S-metrics: S-metrics whose values live in `R^d` ordered by a cone.
//!
//! Over `R^d` the topological-vector-space flavour of the definition adds
//! nothing, so a single [`ConeSMetric`] trait covers both. Composing a cone
//! S-metric with the scalarization `ξ_e` yields a real S-metric
//! ([`ScaledSMetric`]), and convergence in the cone sense transfers to it.

use serde::Serialize;

use crate::cone::{Classification, PolyhedralCone};
use crate::error::{Error, Result};
use crate::scalarization::Scalarizer;
use crate::smetric::{check_domain, quadruples, Axiom, AxiomReport, SMetric, Table3};
use crate::vector::EVector;

/// Anything whose values are ordered by a fixed cone.
pub trait ConeValued {
    fn cone(&self) -> &PolyhedralCone;
}

impl<M: ConeValued + ?Sized> ConeValued for &M {
    fn cone(&self) -> &PolyhedralCone {
        (**self).cone()
    }
}

/// A ternary map `X³ → R^d` together with the cone ordering its values.
pub trait ConeSMetric<P: ?Sized>: ConeValued {
    fn eval(&self, x: &P, y: &P, z: &P) -> EVector;

    fn contains(&self, _p: &P) -> bool {
        true
    }
}

impl<P: ?Sized, M: ConeSMetric<P> + ?Sized> ConeSMetric<P> for &M {
    fn eval(&self, x: &P, y: &P, z: &P) -> EVector {
        (**self).eval(x, y, z)
    }

    fn contains(&self, p: &P) -> bool {
        (**self).contains(p)
    }
}

/// `S(x, y, z) = (|x − z| + |y − z|)·w` for a fixed weight `w ∈ K \ {θ}`.
///
/// On vector points `|·|` is the ℓ¹ norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledAbsDiff {
    cone: PolyhedralCone,
    weights: EVector,
}

impl ScaledAbsDiff {
    pub fn new(cone: PolyhedralCone, weights: EVector) -> Result<Self> {
        if cone.classify(&weights)? == Classification::Outside || weights.is_zero() {
            return Err(Error::Rejected(format!(
                "weights {weights} must be a nonzero element of the cone"
            )));
        }
        Ok(Self { cone, weights })
    }

    pub fn weights(&self) -> &EVector {
        &self.weights
    }

    /// The same family with weights multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.cone.clone(), self.weights.scale(lambda))
    }

    fn at(&self, spread: f64) -> EVector {
        self.weights.scale(spread)
    }
}

impl ConeValued for ScaledAbsDiff {
    fn cone(&self) -> &PolyhedralCone {
        &self.cone
    }
}

impl ConeSMetric<f64> for ScaledAbsDiff {
    fn eval(&self, x: &f64, y: &f64, z: &f64) -> EVector {
        self.at((x - z).abs() + (y - z).abs())
    }

    fn contains(&self, p: &f64) -> bool {
        p.is_finite()
    }
}

impl ConeSMetric<Vec<f64>> for ScaledAbsDiff {
    fn eval(&self, x: &Vec<f64>, y: &Vec<f64>, z: &Vec<f64>) -> EVector {
        let l1 =
            |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum() };
        self.at(l1(x, z) + l1(y, z))
    }

    fn contains(&self, p: &Vec<f64>) -> bool {
        p.iter().all(|c| c.is_finite())
    }
}

/// A cone S-metric stored as a dense table over point indices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeTable {
    cone: PolyhedralCone,
    values: Table3<EVector>,
}

impl ConeTable {
    pub fn new(cone: PolyhedralCone, values: Table3<EVector>) -> Result<Self> {
        let d = cone.dim();
        for x in 0..values.len() {
            for y in 0..values.len() {
                for z in 0..values.len() {
                    values.get(x, y, z).check_dim(d)?;
                }
            }
        }
        Ok(Self { cone, values })
    }

    /// Evaluates `metric` on every triple of `domain`.
    pub fn tabulate<P, M: ConeSMetric<P>>(metric: &M, domain: &[P]) -> Self {
        let values = Table3::from_fn(domain.len(), |x, y, z| {
            metric.eval(&domain[x], &domain[y], &domain[z])
        });
        Self {
            cone: metric.cone().clone(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn domain(&self) -> Vec<usize> {
        self.values.domain()
    }

    pub fn values(&self) -> &Table3<EVector> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Table3<EVector> {
        &mut self.values
    }
}

impl ConeValued for ConeTable {
    fn cone(&self) -> &PolyhedralCone {
        &self.cone
    }
}

impl ConeSMetric<usize> for ConeTable {
    fn eval(&self, x: &usize, y: &usize, z: &usize) -> EVector {
        self.values.get(*x, *y, *z).clone()
    }

    fn contains(&self, p: &usize) -> bool {
        *p < self.values.len()
    }
}

/// Cone-order version of the S-metric axiom check.
///
/// Comparisons `u ≼ v` are taken as `A(v − u) >= −tol`; a value counts as
/// `θ` when its largest coordinate magnitude is at most `tol`.
pub fn check_cone_s_axioms<P, M>(
    sp: &M,
    samples: &[(P, P, P, P)],
    tol: f64,
) -> Result<AxiomReport<P>>
where
    P: Clone + PartialEq + std::fmt::Debug,
    M: ConeSMetric<P> + ?Sized,
{
    if !(tol >= 0.0) {
        return Err(Error::Rejected(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let cone = sp.cone();
    let mut report = AxiomReport::default();
    let mut last: Option<(&P, &P, &P)> = None;
    for (x, y, z, a) in samples {
        check_domain(|p| sp.contains(p), &[x, y, z, a])?;
        report.checked += 1;
        let sxyz = sp.eval(x, y, z);
        sxyz.check_dim(cone.dim())?;
        if last != Some((x, y, z)) {
            last = Some((x, y, z));
            let witness = || vec![x.clone(), y.clone(), z.clone()];
            if !cone.contains_within(&sxyz, tol)? {
                report.push(
                    Axiom::NonNegative,
                    witness(),
                    sxyz.coords().to_vec(),
                    vec![0.0; cone.dim()],
                );
            }
            let all_equal = x == y && y == z;
            if all_equal != (sxyz.norm_inf() <= tol) {
                report.push(
                    Axiom::Identity,
                    witness(),
                    sxyz.coords().to_vec(),
                    vec![0.0; cone.dim()],
                );
            }
        }
        let rhs = &(&sp.eval(x, x, a) + &sp.eval(y, y, a)) + &sp.eval(z, z, a);
        if !cone.contains_within(&(&rhs - &sxyz), tol)? {
            report.push(
                Axiom::Triangle,
                vec![x.clone(), y.clone(), z.clone(), a.clone()],
                sxyz.coords().to_vec(),
                rhs.coords().to_vec(),
            );
        }
    }
    Ok(report)
}

/// Componentwise check of `S(x, x, y) = S(y, y, x)`.
pub fn cone_symmetry_check<P, M>(sp: &M, pairs: &[(P, P)], tol: f64) -> Result<AxiomReport<P>>
where
    P: Clone + std::fmt::Debug,
    M: ConeSMetric<P> + ?Sized,
{
    let mut report = AxiomReport::default();
    for (x, y) in pairs {
        check_domain(|p| sp.contains(p), &[x, y])?;
        report.checked += 1;
        let l = sp.eval(x, x, y);
        let r = sp.eval(y, y, x);
        if !((&l - &r).norm_inf() <= tol) {
            report.push(
                Axiom::Symmetry,
                vec![x.clone(), y.clone()],
                l.coords().to_vec(),
                r.coords().to_vec(),
            );
        }
    }
    Ok(report)
}

/// Axioms over every quadruple of `domain`, plus symmetry over every pair.
pub fn check_cone_s_axioms_exhaustive<P, M>(
    sp: &M,
    domain: &[P],
    tol: f64,
) -> Result<AxiomReport<P>>
where
    P: Clone + PartialEq + std::fmt::Debug,
    M: ConeSMetric<P> + ?Sized,
{
    let mut report = check_cone_s_axioms(sp, &quadruples(domain), tol)?;
    report.merge(cone_symmetry_check(
        sp,
        &crate::smetric::pairs(domain),
        tol,
    )?);
    Ok(report)
}

/// `ξ_e ∘ S_p`, viewed as a real S-metric.
#[derive(Debug, Clone)]
pub struct ScaledSMetric<M> {
    source: M,
    scalarizer: Scalarizer,
}

impl<M> ScaledSMetric<M> {
    pub fn source(&self) -> &M {
        &self.source
    }

    pub fn scalarizer(&self) -> &Scalarizer {
        &self.scalarizer
    }
}

impl<P: ?Sized, M: ConeSMetric<P>> SMetric<P> for ScaledSMetric<M> {
    fn eval(&self, x: &P, y: &P, z: &P) -> f64 {
        self.scalarizer.xi_unchecked(&self.source.eval(x, y, z))
    }

    fn contains(&self, p: &P) -> bool {
        self.source.contains(p)
    }
}

/// Composes a cone S-metric with the scalarization over the same cone.
pub fn scalarized_smetric<M: ConeValued>(sp: M, s: Scalarizer) -> Result<ScaledSMetric<M>> {
    if sp.cone() != s.cone() {
        return Err(Error::Rejected(
            "scalarizer cone differs from the metric's cone".into(),
        ));
    }
    Ok(ScaledSMetric {
        source: sp,
        scalarizer: s,
    })
}

/// `B(x, c) = { y ∈ domain : S(y, y, x) ≪ c }` for interior `c`.
pub fn cone_open_ball<P, M>(sp: &M, x: &P, c: &EVector, domain: &[P]) -> Result<Vec<P>>
where
    P: Clone + std::fmt::Debug,
    M: ConeSMetric<P> + ?Sized,
{
    let cone = sp.cone();
    if cone.classify(c)? != Classification::Interior {
        return Err(Error::Rejected(format!("ball radius {c} is not interior")));
    }
    check_domain(|p| sp.contains(p), &[x])?;
    let mut ball = Vec::new();
    for y in domain {
        check_domain(|p| sp.contains(p), &[y])?;
        if cone.order_rel(&sp.eval(y, y, x), c)?.is_ll() {
            ball.push(y.clone());
        }
    }
    Ok(ball)
}

/// Cone and scalar verdicts for one sequence prefix.
///
/// Cone convergence is tested against the single radius `eps·e` rather than
/// every interior `c`: any interior `c` dominates some `eps·e`, so the family
/// `{eps·e : eps > 0}` decides the same limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferReport<P> {
    pub cone_converges: Option<bool>,
    pub scalar_converges: Option<bool>,
    pub cone_cauchy: bool,
    pub scalar_cauchy: bool,
    pub violations: Vec<crate::smetric::Violation<P>>,
    pub note: &'static str,
}

impl<P> TransferReport<P> {
    pub fn implication_holds(&self) -> bool {
        self.violations.is_empty()
    }
}

const TRANSFER_NOTE: &str =
    "cone convergence tested against c = eps·e only; every interior c dominates some eps·e";

/// Evaluates cone and scalarized convergence (when `limit` is given) and
/// the Cauchy condition on `seq[horizon..]`, reporting any instance where
/// the cone statement holds and the scalar one does not.
pub fn transfer_check<P, M>(
    sp: &M,
    s: &Scalarizer,
    seq: &[P],
    limit: Option<&P>,
    eps: f64,
    horizon: usize,
) -> Result<TransferReport<P>>
where
    P: Clone + std::fmt::Debug,
    M: ConeSMetric<P> + ?Sized,
{
    if sp.cone() != s.cone() {
        return Err(Error::Rejected(
            "scalarizer cone differs from the metric's cone".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(Error::Rejected(format!("eps must be positive, got {eps}")));
    }
    if horizon >= seq.len() {
        return Err(Error::Rejected(format!(
            "horizon {horizon} leaves no terms in a prefix of length {}",
            seq.len()
        )));
    }
    let cone = sp.cone();
    let radius = s.e().scale(eps);
    let tail = &seq[horizon..];
    for p in tail.iter().chain(limit) {
        check_domain(|q| sp.contains(q), &[p])?;
    }

    let mut violations = Vec::new();
    // Records each (u, v) with S(u, u, v) ≪ eps·e but ξ(S(u, u, v)) >= eps.
    let mut compare = |u: &P, v: &P| -> Result<(bool, bool)> {
        let val = sp.eval(u, u, v);
        let in_cone = cone.order_rel(&val, &radius)?.is_ll();
        let xi = s.xi(&val)?;
        let in_scalar = xi < eps;
        if in_cone && !in_scalar {
            violations.push(crate::smetric::Violation {
                axiom: Axiom::Transfer,
                witness: vec![u.clone(), u.clone(), v.clone()],
                lhs: vec![xi],
                rhs: vec![eps],
            });
        }
        Ok((in_cone, in_scalar))
    };

    let (cone_converges, scalar_converges) = match limit {
        Some(limit) => {
            let (mut c, mut r) = (true, true);
            for x in tail {
                let (a, b) = compare(x, limit)?;
                c &= a;
                r &= b;
            }
            (Some(c), Some(r))
        }
        None => (None, None),
    };
    let (mut cone_cauchy, mut scalar_cauchy) = (true, true);
    for x in tail {
        for y in tail {
            let (a, b) = compare(x, y)?;
            cone_cauchy &= a;
            scalar_cauchy &= b;
        }
    }
    Ok(TransferReport {
        cone_converges,
        scalar_converges,
        cone_cauchy,
        scalar_cauchy,
        violations,
        note: TRANSFER_NOTE,
    })
}
