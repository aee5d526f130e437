//! Real-valued S-metrics: axiom checks, balls and sequence status.
//!
//! An S-metric is a ternary map `S : X³ → [0, ∞)` with
//!
//! 1. `S(x, y, z) >= 0`,
//! 2. `S(x, y, z) = 0` iff `x = y = z`,
//! 3. `S(x, y, z) <= S(x, x, a) + S(y, y, a) + S(z, z, a)` for every `a`.
//!
//! Convergence and Cauchy-ness are asymptotic notions. Here they are decided
//! on a finite prefix for an explicit `(eps, horizon)` pair, so a verdict only
//! speaks for the prefix it was given.

use serde::Serialize;

use crate::error::{Error, Result};

/// A ternary distance on points of type `P`.
pub trait SMetric<P: ?Sized> {
    fn eval(&self, x: &P, y: &P, z: &P) -> f64;

    /// Whether `p` belongs to the metric's domain.
    fn contains(&self, _p: &P) -> bool {
        true
    }
}

impl<P: ?Sized, M: SMetric<P> + ?Sized> SMetric<P> for &M {
    fn eval(&self, x: &P, y: &P, z: &P) -> f64 {
        (**self).eval(x, y, z)
    }

    fn contains(&self, p: &P) -> bool {
        (**self).contains(p)
    }
}

/// Adapts a closure into an [`SMetric`] over an unrestricted domain.
#[derive(Debug, Clone, Copy)]
pub struct FnSMetric<F>(pub F);

impl<P: ?Sized, F: Fn(&P, &P, &P) -> f64> SMetric<P> for FnSMetric<F> {
    fn eval(&self, x: &P, y: &P, z: &P) -> f64 {
        (self.0)(x, y, z)
    }
}

/// Dense `n × n × n` table indexed by point positions `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table3<T> {
    n: usize,
    values: Vec<T>,
}

impl<T> Table3<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    values.push(f(x, y, z));
                }
            }
        }
        Self { n, values }
    }

    /// Wraps a flat row-major buffer of length `n³`.
    pub fn from_flat(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != n * n * n {
            return Err(Error::Rejected(format!(
                "table for {n} points needs {} entries, got {}",
                n * n * n,
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> &T {
        &self.values[(x * self.n + y) * self.n + z]
    }

    pub fn get_mut(&mut self, x: usize, y: usize, z: usize) -> &mut T {
        &mut self.values[(x * self.n + y) * self.n + z]
    }

    /// Nested `[x][y][z]` view, the layout used in serialized specs.
    pub fn to_nested(&self) -> Vec<Vec<Vec<T>>>
    where
        T: Clone,
    {
        (0..self.n)
            .map(|x| {
                (0..self.n)
                    .map(|y| (0..self.n).map(|z| self.get(x, y, z).clone()).collect())
                    .collect()
            })
            .collect()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Table3<U> {
        Table3 {
            n: self.n,
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Indices `0..n`, the natural domain of the table.
    pub fn domain(&self) -> Vec<usize> {
        (0..self.n).collect()
    }
}

impl SMetric<usize> for Table3<f64> {
    fn eval(&self, x: &usize, y: &usize, z: &usize) -> f64 {
        *self.get(*x, *y, *z)
    }

    fn contains(&self, p: &usize) -> bool {
        *p < self.n
    }
}

/// Which property a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `S(x, y, z) >= 0` (or `θ <= S(x, y, z)` in the cone order).
    NonNegative,
    /// `S(x, y, z) = 0` exactly when `x = y = z`.
    Identity,
    /// `S(x, y, z) <= S(x, x, a) + S(y, y, a) + S(z, z, a)`.
    Triangle,
    /// `S(x, x, y) = S(y, y, x)`.
    Symmetry,
    /// `S(Tx, Tx, Ty) <= h·S(x, x, y)`.
    Contraction,
    /// A mapped point left the domain.
    DomainEscape,
    /// Cone convergence held but scalar convergence did not.
    Transfer,
}

/// One failed instance of an axiom, with the values that failed it.
///
/// `lhs` and `rhs` have one entry for real metrics and `d` entries for cone
/// metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<P> {
    pub axiom: Axiom,
    pub witness: Vec<P>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl<P> Violation<P> {
    pub fn map_witness<Q>(self, f: impl Fn(P) -> Q) -> Violation<Q> {
        Violation {
            axiom: self.axiom,
            witness: self.witness.into_iter().map(f).collect(),
            lhs: self.lhs,
            rhs: self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport<P> {
    pub checked: usize,
    pub violations: Vec<Violation<P>>,
}

impl<P> Default for AxiomReport<P> {
    fn default() -> Self {
        Self {
            checked: 0,
            violations: Vec::new(),
        }
    }
}

impl<P> AxiomReport<P> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, axiom: Axiom) -> usize {
        self.violations.iter().filter(|v| v.axiom == axiom).count()
    }

    pub fn merge(&mut self, other: AxiomReport<P>) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }

    pub(crate) fn push(&mut self, axiom: Axiom, witness: Vec<P>, lhs: Vec<f64>, rhs: Vec<f64>) {
        self.violations.push(Violation {
            axiom,
            witness,
            lhs,
            rhs,
        });
    }
}

/// Every `(x, y, z, a)` over `domain`, with `a` varying fastest.
pub fn quadruples<P: Clone>(domain: &[P]) -> Vec<(P, P, P, P)> {
    let mut out = Vec::with_capacity(domain.len().pow(4));
    for x in domain {
        for y in domain {
            for z in domain {
                for a in domain {
                    out.push((x.clone(), y.clone(), z.clone(), a.clone()));
                }
            }
        }
    }
    out
}

/// Every ordered pair over `domain`.
pub fn pairs<P: Clone>(domain: &[P]) -> Vec<(P, P)> {
    domain
        .iter()
        .flat_map(|x| domain.iter().map(move |y| (x.clone(), y.clone())))
        .collect()
}

pub(crate) fn check_domain<P: std::fmt::Debug>(
    contains: impl Fn(&P) -> bool,
    points: &[&P],
) -> Result<()> {
    for p in points {
        if !contains(p) {
            return Err(Error::OutsideDomain(format!("{p:?}")));
        }
    }
    Ok(())
}

/// Checks the three S-metric axioms on each sample `(x, y, z, a)`.
///
/// Axioms 1 and 2 concern `(x, y, z)` only and are checked once per run of
/// samples sharing that triple, so an `a`-innermost enumeration reports each
/// failing triple once. A value counts as zero when it is at most `tol`.
pub fn check_s_axioms<P, M>(s: &M, samples: &[(P, P, P, P)], tol: f64) -> Result<AxiomReport<P>>
where
    P: Clone + PartialEq + std::fmt::Debug,
    M: SMetric<P> + ?Sized,
{
    if !(tol >= 0.0) {
        return Err(Error::Rejected(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let mut report = AxiomReport::default();
    let mut last: Option<(&P, &P, &P)> = None;
    for (x, y, z, a) in samples {
        check_domain(|p| s.contains(p), &[x, y, z, a])?;
        report.checked += 1;
        let sxyz = s.eval(x, y, z);
        if last != Some((x, y, z)) {
            last = Some((x, y, z));
            let witness = || vec![x.clone(), y.clone(), z.clone()];
            if sxyz < -tol || sxyz.is_nan() {
                report.push(Axiom::NonNegative, witness(), vec![sxyz], vec![0.0]);
            }
            let all_equal = x == y && y == z;
            let is_zero = sxyz.abs() <= tol;
            if all_equal != is_zero {
                report.push(Axiom::Identity, witness(), vec![sxyz], vec![0.0]);
            }
        }
        let rhs = s.eval(x, x, a) + s.eval(y, y, a) + s.eval(z, z, a);
        if sxyz > rhs + tol {
            report.push(
                Axiom::Triangle,
                vec![x.clone(), y.clone(), z.clone(), a.clone()],
                vec![sxyz],
                vec![rhs],
            );
        }
    }
    Ok(report)
}

/// [`check_s_axioms`] over every quadruple of `domain`.
pub fn check_s_axioms_exhaustive<P, M>(s: &M, domain: &[P], tol: f64) -> Result<AxiomReport<P>>
where
    P: Clone + PartialEq + std::fmt::Debug,
    M: SMetric<P> + ?Sized,
{
    check_s_axioms(s, &quadruples(domain), tol)
}

/// Flags pairs with `|S(x, x, y) − S(y, y, x)| > tol`.
pub fn symmetry_check<P, M>(s: &M, pairs: &[(P, P)], tol: f64) -> Result<AxiomReport<P>>
where
    P: Clone + std::fmt::Debug,
    M: SMetric<P> + ?Sized,
{
    let mut report = AxiomReport::default();
    for (x, y) in pairs {
        check_domain(|p| s.contains(p), &[x, y])?;
        report.checked += 1;
        let l = s.eval(x, x, y);
        let r = s.eval(y, y, x);
        if !((l - r).abs() <= tol) {
            report.push(
                Axiom::Symmetry,
                vec![x.clone(), y.clone()],
                vec![l],
                vec![r],
            );
        }
    }
    Ok(report)
}

/// `B(x, r) = { y ∈ domain : S(y, y, x) < r }`, in domain order.
pub fn open_ball<P, M>(s: &M, x: &P, r: f64, domain: &[P]) -> Result<Vec<P>>
where
    P: Clone + std::fmt::Debug,
    M: SMetric<P> + ?Sized,
{
    if !(r > 0.0) {
        return Err(Error::Rejected(format!(
            "ball radius must be positive, got {r}"
        )));
    }
    check_domain(|p| s.contains(p), &[x])?;
    let mut ball = Vec::new();
    for y in domain {
        check_domain(|p| s.contains(p), &[y])?;
        if s.eval(y, y, x) < r {
            ball.push(y.clone());
        }
    }
    Ok(ball)
}

/// Verdict on a finite sequence prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceStatus {
    ConvergesTo,
    CauchyLike,
    Neither,
}

fn check_prefix(len: usize, eps: f64, horizon: usize) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::Rejected(format!("eps must be positive, got {eps}")));
    }
    if horizon >= len {
        return Err(Error::Rejected(format!(
            "horizon {horizon} leaves no terms in a prefix of length {len}"
        )));
    }
    Ok(())
}

/// `S(x_n, x_n, limit) < eps` for every `n >= horizon` (0-based).
pub fn converges_to<P, M>(s: &M, seq: &[P], limit: &P, eps: f64, horizon: usize) -> Result<bool>
where
    P: std::fmt::Debug,
    M: SMetric<P> + ?Sized,
{
    check_prefix(seq.len(), eps, horizon)?;
    check_domain(|p| s.contains(p), &[limit])?;
    for x in &seq[horizon..] {
        check_domain(|p| s.contains(p), &[x])?;
        if !(s.eval(x, x, limit) < eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `S(x_n, x_n, x_m) < eps` for every `n, m >= horizon` (0-based).
pub fn cauchy_like<P, M>(s: &M, seq: &[P], eps: f64, horizon: usize) -> Result<bool>
where
    P: std::fmt::Debug,
    M: SMetric<P> + ?Sized,
{
    check_prefix(seq.len(), eps, horizon)?;
    let tail = &seq[horizon..];
    for x in tail {
        check_domain(|p| s.contains(p), &[x])?;
    }
    Ok(tail
        .iter()
        .all(|x| tail.iter().all(|y| s.eval(x, x, y) < eps)))
}

/// Classifies a prefix: convergence to `limit` first (when given), then the
/// Cauchy condition.
pub fn sequence_status<P, M>(
    s: &M,
    seq: &[P],
    limit: Option<&P>,
    eps: f64,
    horizon: usize,
) -> Result<SequenceStatus>
where
    P: std::fmt::Debug,
    M: SMetric<P> + ?Sized,
{
    if let Some(limit) = limit {
        if converges_to(s, seq, limit, eps, horizon)? {
            return Ok(SequenceStatus::ConvergesTo);
        }
    }
    Ok(if cauchy_like(s, seq, eps, horizon)? {
        SequenceStatus::CauchyLike
    } else {
        SequenceStatus::Neither
    })
}
