//! A real S-metric with the same topology as a cone S-metric.
//!
//! Fix `0 < a < 1`, `h = 1/a` and an interior `e`. Each nonzero cone value is
//! quantized to the least power of `h` that strictly dominates it:
//!
//! ```text
//! Θ(x, y, z) = h^α*,   α* = min { α ∈ ℤ : S(x, y, z) ≪ h^α·e }
//! ```
//!
//! and `Θ = 0` on `θ`. Since `S ≪ h^α·e` exactly when `ξ_e(S) < h^α`, the
//! exponent is the least integer with `h^α > ξ_e(S)`.
//!
//! The chain infimum
//!
//! ```text
//! S*(x, y, z) = inf Σ_{i=1}^{n−2} Θ(x_i, x_{i+1}, x_{i+2}),
//!               over chains x_1 = x, …, x_{n−1} = y, x_n = z,  n >= 3,
//! ```
//!
//! is a shortest path in the graph whose nodes are consecutive pairs
//! `(x_i, x_{i+1})` and whose edge `(u, v) → (v, w)` costs `Θ(u, v, w)`.
//! [`star_metric`] runs Dijkstra on that graph from every start point;
//! [`star_metric_bruteforce`] enumerates chains directly.
//!
//! Whether `S*` satisfies the S-metric inequality depends on the fixture: the
//! chain template fixes the second-to-last point, and concatenating optimal
//! chains does not always produce an admissible chain. Run
//! [`crate::smetric::check_s_axioms_exhaustive`] on the result rather than
//! assuming it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cone::Classification;
use crate::cone_metric::{cone_open_ball, ConeSMetric, ConeTable, ConeValued};
use crate::error::{Error, Result};
use crate::scalarization::Scalarizer;
use crate::smetric::{open_ball, Table3};
use crate::vector::EVector;

/// Default cap on `|X|` for [`star_metric`].
pub const DEFAULT_MAX_POINTS: usize = 64;

/// Cap on the number of chains [`star_metric_bruteforce`] will enumerate.
pub const BRUTEFORCE_MAX_CHAINS: u64 = 50_000_000;

/// Exponents searched when quantizing radii.
const ALPHA_LIMIT: i32 = 1000;

/// The parameters `a`, `h = 1/a` and the direction `e` (via its scalarizer).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaParams {
    a: f64,
    h: f64,
    scalarizer: Scalarizer,
}

impl ThetaParams {
    /// `a` must lie in `(0, 1)`; `a = 0` leaves `h` undefined.
    pub fn new(a: f64, scalarizer: Scalarizer) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Rejected(format!("a must lie in (0, 1), got {a}")));
        }
        let h = 1.0 / a;
        debug_assert!((h * a - 1.0).abs() <= 1e-12);
        Ok(Self { a, h, scalarizer })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn scalarizer(&self) -> &Scalarizer {
        &self.scalarizer
    }

    pub fn e(&self) -> &EVector {
        self.scalarizer.e()
    }

    pub fn power(&self, alpha: i32) -> f64 {
        self.h.powi(alpha)
    }

    /// Least `α` with `h^α > value`, for `value > 0`.
    pub fn exponent_above(&self, value: f64) -> Result<i32> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Rejected(format!(
                "cannot quantize non-positive or non-finite value {value}"
            )));
        }
        let guess = (value.ln() / self.h.ln()).floor();
        if !(guess.abs() < f64::from(ALPHA_LIMIT)) {
            return Err(Error::NotFound(format!(
                "exponent for {value} out of range"
            )));
        }
        // Step down until h^α <= value, then up to the first strict excess,
        // so float error in the logarithm cannot shift the answer.
        let mut alpha = guess as i32 + 2;
        while self.power(alpha - 1) > value {
            alpha -= 1;
        }
        while self.power(alpha) <= value {
            alpha += 1;
        }
        Ok(alpha)
    }

    /// Greatest `α` with `h^α < value`, for `value > 0`.
    pub fn exponent_below(&self, value: f64) -> Result<i32> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Rejected(format!(
                "radius must be positive, got {value}"
            )));
        }
        let guess = (value.ln() / self.h.ln()).floor();
        if !(guess.abs() < f64::from(ALPHA_LIMIT)) {
            return Err(Error::NotFound(format!(
                "exponent for {value} out of range"
            )));
        }
        let mut alpha = guess as i32 - 2;
        while self.power(alpha + 1) < value {
            alpha += 1;
        }
        while self.power(alpha) >= value {
            alpha -= 1;
        }
        if self.power(alpha) <= 0.0 {
            return Err(Error::NotFound(format!("h^α underflows below {value}")));
        }
        Ok(alpha)
    }
}

/// `Θ(x, y, z)`: zero on `θ`, otherwise the least power of `h` strictly
/// above `ξ_e(S(x, y, z))`.
pub fn theta<P: ?Sized, M: ConeSMetric<P> + ?Sized>(
    sp: &M,
    p: &ThetaParams,
    x: &P,
    y: &P,
    z: &P,
) -> Result<f64> {
    theta_of_value(p, &sp.eval(x, y, z))
}

/// `Θ` applied to a cone value directly.
pub fn theta_of_value(p: &ThetaParams, v: &EVector) -> Result<f64> {
    if v.is_zero() {
        return Ok(0.0);
    }
    let xi = p.scalarizer.xi(v)?;
    if !(xi.is_finite() && xi > 0.0) {
        return Err(Error::Rejected(format!(
            "ξ of nonzero value {v} is {xi}; the fixture is not a cone S-metric"
        )));
    }
    Ok(p.power(p.exponent_above(xi)?))
}

fn check_cone(sp_cone: &crate::cone::PolyhedralCone, p: &ThetaParams) -> Result<()> {
    if sp_cone != p.scalarizer.cone() {
        return Err(Error::Rejected(
            "scalarizer cone differs from the metric's cone".into(),
        ));
    }
    Ok(())
}

/// `Θ` on every triple of `domain`, indexed by position.
pub fn theta_table<P, M>(sp: &M, p: &ThetaParams, domain: &[P]) -> Result<Table3<f64>>
where
    M: ConeSMetric<P> + ?Sized,
{
    check_cone(sp.cone(), p)?;
    let n = domain.len();
    let mut values = Vec::with_capacity(n * n * n);
    for x in domain {
        for y in domain {
            for z in domain {
                values.push(theta(sp, p, x, y, z)?);
            }
        }
    }
    Table3::from_flat(n, values)
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest chain cost from start point `x` to every pair state `(y, z)`.
/// Node `(u, v)` is encoded as `u * n + v`.
fn chain_distances(theta: &Table3<f64>, x: usize) -> Vec<f64> {
    let n = theta.len();
    let mut dist = vec![f64::INFINITY; n * n];
    let mut heap = BinaryHeap::new();
    // One-edge chains x, v, w.
    for v in 0..n {
        for w in 0..n {
            let cost = *theta.get(x, v, w);
            let node = v * n + w;
            if cost < dist[node] {
                dist[node] = cost;
                heap.push(State { cost, node });
            }
        }
    }
    while let Some(State { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        let (u, v) = (node / n, node % n);
        for w in 0..n {
            let next = v * n + w;
            let c = cost + *theta.get(u, v, w);
            if c < dist[next] {
                dist[next] = c;
                heap.push(State {
                    cost: c,
                    node: next,
                });
            }
        }
    }
    dist
}

/// The chain-infimum S-metric over a finite domain, indexed by position.
pub fn star_metric<P, M>(sp: &M, p: &ThetaParams, domain: &[P]) -> Result<Table3<f64>>
where
    P: Sync,
    M: ConeSMetric<P> + Sync + ?Sized,
{
    star_metric_bounded(sp, p, domain, DEFAULT_MAX_POINTS)
}

pub fn star_metric_bounded<P, M>(
    sp: &M,
    p: &ThetaParams,
    domain: &[P],
    max_points: usize,
) -> Result<Table3<f64>>
where
    P: Sync,
    M: ConeSMetric<P> + Sync + ?Sized,
{
    if domain.len() > max_points {
        return Err(Error::TooLarge {
            what: "point set",
            actual: domain.len(),
            limit: max_points,
        });
    }
    let theta = theta_table(sp, p, domain)?;
    Ok(star_from_theta(&theta))
}

/// Runs the shortest-path computation on a precomputed `Θ` table.
pub fn star_from_theta(theta: &Table3<f64>) -> Table3<f64> {
    let n = theta.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|x| chain_distances(theta, x))
        .collect();
    Table3::from_fn(n, |x, y, z| rows[x][y * n + z])
}

/// Minimum over every chain of length `3..=max_len`, by enumeration.
///
/// Agrees with [`star_metric`] once `max_len` reaches `|X|² + 1`, the
/// longest chain that visits no pair state twice; shorter bounds give a
/// pointwise upper bound.
pub fn star_metric_bruteforce<P, M>(
    sp: &M,
    p: &ThetaParams,
    domain: &[P],
    max_len: usize,
) -> Result<Table3<f64>>
where
    M: ConeSMetric<P> + ?Sized,
{
    let n = domain.len();
    if n > 10 {
        return Err(Error::TooLarge {
            what: "point set",
            actual: n,
            limit: 10,
        });
    }
    if max_len < 3 {
        return Err(Error::Rejected(format!(
            "chains need length >= 3, got {max_len}"
        )));
    }
    let chains = chain_count(n, max_len);
    if chains > BRUTEFORCE_MAX_CHAINS {
        return Err(Error::TooLarge {
            what: "chain count",
            actual: chains as usize,
            limit: BRUTEFORCE_MAX_CHAINS as usize,
        });
    }
    let theta = theta_table(sp, p, domain)?;
    let mut best = Table3::from_fn(n, |_, _, _| f64::INFINITY);
    let mut chain = Vec::with_capacity(max_len);
    for x in 0..n {
        for y in 0..n {
            chain.clear();
            chain.extend([x, y]);
            extend_chains(&theta, &mut chain, 0.0, max_len, &mut best);
        }
    }
    Ok(best)
}

fn extend_chains(
    theta: &Table3<f64>,
    chain: &mut Vec<usize>,
    cost: f64,
    max_len: usize,
    best: &mut Table3<f64>,
) {
    if chain.len() == max_len {
        return;
    }
    let k = chain.len();
    let (u, v) = (chain[k - 2], chain[k - 1]);
    for w in 0..theta.len() {
        let c = cost + *theta.get(u, v, w);
        let slot = best.get_mut(chain[0], v, w);
        if c < *slot {
            *slot = c;
        }
        chain.push(w);
        extend_chains(theta, chain, c, max_len, best);
        chain.pop();
    }
}

/// Number of chains of length `3..=max_len` over `n` points.
pub fn chain_count(n: usize, max_len: usize) -> u64 {
    let n = n as u64;
    (3..=max_len as u32)
        .map(|len| n.saturating_pow(len))
        .fold(0u64, u64::saturating_add)
}

/// Which inclusion a [`RefinementReport`] establishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// For each star ball `B*(x, r)` a cone ball `B(x, c) ⊆ B*(x, r)`.
    ConeIntoStar,
    /// For each cone ball `B(x, c)` a star ball `B*(x, r) ⊆ B(x, c)`.
    StarIntoCone,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Radius {
    Scalar(f64),
    Vector(EVector),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementWitness<P> {
    pub center: P,
    /// The radius of the ball to be refined.
    pub given: Radius,
    /// The radius chosen for the inner ball, if one was admissible.
    pub found: Option<Radius>,
    pub inner_ball: Vec<P>,
    pub outer_ball: Vec<P>,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementReport<P> {
    pub direction: Direction,
    pub witnesses: Vec<RefinementWitness<P>>,
}

impl<P> RefinementReport<P> {
    pub fn verified(&self) -> bool {
        self.witnesses.iter().all(|w| w.verified)
    }

    pub fn map_points<Q>(self, f: impl Fn(P) -> Q) -> RefinementReport<Q> {
        let f = &f;
        RefinementReport {
            direction: self.direction,
            witnesses: self
                .witnesses
                .into_iter()
                .map(|w| RefinementWitness {
                    center: f(w.center),
                    given: w.given,
                    found: w.found,
                    inner_ball: w.inner_ball.into_iter().map(f).collect(),
                    outer_ball: w.outer_ball.into_iter().map(f).collect(),
                    verified: w.verified,
                })
                .collect(),
        }
    }
}

fn subset<P: PartialEq>(inner: &[P], outer: &[P]) -> bool {
    inner.iter().all(|p| outer.contains(p))
}

/// Checks mutual ball refinement between `S` and `S*` around every point.
///
/// For a star radius `r`, takes the greatest `α` with `h^α < r` and the cone
/// radius `c = a·h^α·e`, then tests `B(x, c) ⊆ B*(x, r)`. For an interior
/// cone radius `c`, takes `r = a·min_i (Ac)_i / (Ae)_i` (so `r·e ≪ c`) and
/// tests `B*(x, r) ⊆ B(x, c)`. Radii for which no admissible partner exists
/// are reported as unverified witnesses.
pub fn refinement_check<P, M>(
    sp: &M,
    p: &ThetaParams,
    domain: &[P],
    cone_radii: &[EVector],
    star_radii: &[f64],
) -> Result<(RefinementReport<usize>, RefinementReport<usize>)>
where
    P: Sync,
    M: ConeSMetric<P> + Sync + ?Sized,
{
    let star = star_metric(sp, p, domain)?;
    let table = ConeTable::tabulate(
        &ConeOnDomain { sp, domain },
        &(0..domain.len()).collect::<Vec<_>>(),
    );
    refinement_check_tables(&table, &star, p, cone_radii, star_radii)
}

/// Indexes a metric over `domain` by position.
struct ConeOnDomain<'a, P, M: ?Sized> {
    sp: &'a M,
    domain: &'a [P],
}

impl<P, M: ConeSMetric<P> + ?Sized> ConeValued for ConeOnDomain<'_, P, M> {
    fn cone(&self) -> &crate::cone::PolyhedralCone {
        self.sp.cone()
    }
}

impl<P, M: ConeSMetric<P> + ?Sized> ConeSMetric<usize> for ConeOnDomain<'_, P, M> {
    fn eval(&self, x: &usize, y: &usize, z: &usize) -> EVector {
        self.sp
            .eval(&self.domain[*x], &self.domain[*y], &self.domain[*z])
    }
}

/// [`refinement_check`] on a tabulated cone metric and a precomputed `S*`.
pub fn refinement_check_tables(
    cone_table: &ConeTable,
    star: &Table3<f64>,
    p: &ThetaParams,
    cone_radii: &[EVector],
    star_radii: &[f64],
) -> Result<(RefinementReport<usize>, RefinementReport<usize>)> {
    check_cone(cone_table.cone(), p)?;
    if star.len() != cone_table.len() {
        return Err(Error::Rejected(
            "star metric and cone table sizes differ".into(),
        ));
    }
    let cone = p.scalarizer.cone();
    for c in cone_radii {
        if cone.classify(c)? != Classification::Interior {
            return Err(Error::Rejected(format!("cone radius {c} is not interior")));
        }
    }
    if let Some(r) = star_radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::Rejected(format!("star radius {r} is not positive")));
    }
    let domain = cone_table.domain();
    let ae = cone.facet_values(p.e())?;

    let mut into_star = Vec::new();
    let mut into_cone = Vec::new();
    for &x in &domain {
        for &r in star_radii {
            let outer_ball = open_ball(star, &x, r, &domain)?;
            let witness = match p.exponent_below(r) {
                Ok(alpha) => {
                    let c = p.e().scale(p.a * p.power(alpha));
                    let inner_ball = cone_open_ball(cone_table, &x, &c, &domain)?;
                    RefinementWitness {
                        center: x,
                        given: Radius::Scalar(r),
                        found: Some(Radius::Vector(c)),
                        verified: subset(&inner_ball, &outer_ball),
                        inner_ball,
                        outer_ball,
                    }
                }
                Err(_) => RefinementWitness {
                    center: x,
                    given: Radius::Scalar(r),
                    found: None,
                    inner_ball: Vec::new(),
                    outer_ball,
                    verified: false,
                },
            };
            into_star.push(witness);
        }
        for c in cone_radii {
            let outer_ball = cone_open_ball(cone_table, &x, c, &domain)?;
            let ac = cone.facet_values(c)?;
            let r = p.a
                * ac.iter()
                    .zip(&ae)
                    .map(|(u, v)| u / v)
                    .fold(f64::INFINITY, f64::min);
            let admissible = r > 0.0 && cone.order_rel(&p.e().scale(r), c)?.is_ll();
            let witness = if admissible {
                let inner_ball = open_ball(star, &x, r, &domain)?;
                RefinementWitness {
                    center: x,
                    given: Radius::Vector(c.clone()),
                    found: Some(Radius::Scalar(r)),
                    verified: subset(&inner_ball, &outer_ball),
                    inner_ball,
                    outer_ball,
                }
            } else {
                RefinementWitness {
                    center: x,
                    given: Radius::Vector(c.clone()),
                    found: None,
                    inner_ball: Vec::new(),
                    outer_ball,
                    verified: false,
                }
            };
            into_cone.push(witness);
        }
    }
    Ok((
        RefinementReport {
            direction: Direction::ConeIntoStar,
            witnesses: into_star,
        },
        RefinementReport {
            direction: Direction::StarIntoCone,
            witnesses: into_cone,
        },
    ))
}
