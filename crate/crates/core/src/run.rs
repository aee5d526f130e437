//! The commands behind the `cone-smetric` binary.
//!
//! [`run`] turns a validated [`SpaceSpec`] into a [`RunReport`]. Everything in
//! the report except its timing is a function of the command, the spec bytes
//! and the [`RunOptions`], so two runs with the same seed serialize
//! identically.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cone::{numerical_rank, Classification};
use crate::cone_metric::{check_cone_s_axioms_exhaustive, scalarized_smetric, ConeTable};
use crate::error::Error;
use crate::fixed_point::{ContractionProblem, SolveError};
use crate::scalarization::Scalarizer;
use crate::smetric::{check_s_axioms_exhaustive, pairs, symmetry_check, AxiomReport, Table3};
use crate::spec::{MetricSpec, SpaceSpec};
use crate::theta::{
    refinement_check_tables, star_from_theta, theta_table, Radius, RefinementReport, ThetaParams,
    DEFAULT_MAX_POINTS,
};
use crate::vector::EVector;

/// Random samples drawn by each sampled check.
pub const SAMPLES: usize = 1000;
/// Seeded random interior radii added to the cone-radius grid.
pub const RANDOM_CONE_RADII: usize = 8;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_STAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ValidateCone,
    CheckAxioms,
    Scalarize,
    DeriveSmetric,
    StarMetric,
    TopologyCheck,
    FixedPoint,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ValidateCone => "validate-cone",
            Command::CheckAxioms => "check-axioms",
            Command::Scalarize => "scalarize",
            Command::DeriveSmetric => "derive-smetric",
            Command::StarMetric => "star-metric",
            Command::TopologyCheck => "topology-check",
            Command::FixedPoint => "fixed-point",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    /// Overrides the per-command comparison tolerance.
    pub tol: Option<f64>,
    /// Overrides `theta.a` from the spec.
    pub a: Option<f64>,
    /// Overrides `contraction.eps`.
    pub eps: Option<f64>,
    /// Overrides `contraction.max_iter`.
    pub max_iter: Option<usize>,
}

#[derive(Debug, Error)]
pub enum RunError {
    /// A required spec block or option is missing or out of range.
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One failed check, with the labelled points that reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportViolation {
    pub check: String,
    pub witness: Vec<String>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// A labelled grid of cells, rendered as aligned columns in text output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: Command,
    pub spec_digest: String,
    pub verdict: Verdict,
    pub violations: Vec<ReportViolation>,
    pub summary: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// 0 on pass, 1 when a violation was found.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// The deterministic part of the report as pretty JSON.
    pub fn report_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `{"report": …, "timing": {"elapsed_ms": …}}`.
    pub fn to_json(&self) -> String {
        let doc = json!({
            "report": self,
            "timing": { "elapsed_ms": self.elapsed.as_secs_f64() * 1e3 },
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "spec:    sha256:{}", self.spec_digest);
        let _ = writeln!(
            out,
            "verdict: {verdict} ({} violations)",
            self.violations.len()
        );
        for (k, v) in &self.summary {
            let _ = writeln!(out, "  {k}: {v}");
        }
        for t in &self.tables {
            let _ = writeln!(out, "\n{}", t.title);
            out.push_str(&render_table(t));
        }
        if !self.violations.is_empty() {
            let _ = writeln!(out, "\nviolations");
            for v in &self.violations {
                let _ = writeln!(
                    out,
                    "  {} at ({}): lhs {:?} rhs {:?}",
                    v.check,
                    v.witness.join(", "),
                    v.lhs,
                    v.rhs
                );
            }
        }
        let _ = writeln!(out, "\nelapsed: {:.3} ms", self.elapsed.as_secs_f64() * 1e3);
        out
    }
}

fn render_table(t: &Table) -> String {
    let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
    for row in &t.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::from(" ");
        for (cell, w) in cells.iter().zip(&widths) {
            let _ = write!(s, " {cell:<w$}");
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&t.columns);
    for row in &t.rows {
        out.push_str(&line(row));
    }
    out
}

struct Builder {
    violations: Vec<ReportViolation>,
    summary: BTreeMap<String, Value>,
    tables: Vec<Table>,
}

impl Builder {
    fn new() -> Self {
        Self {
            violations: Vec::new(),
            summary: BTreeMap::new(),
            tables: Vec::new(),
        }
    }

    fn set(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(
            key.to_string(),
            serde_json::to_value(value).expect("summary serializes"),
        );
    }

    fn violation(&mut self, check: &str, witness: Vec<String>, lhs: Vec<f64>, rhs: Vec<f64>) {
        self.violations.push(ReportViolation {
            check: check.to_string(),
            witness,
            lhs,
            rhs,
        });
    }

    fn axioms<P>(&mut self, report: AxiomReport<P>, label: impl Fn(&P) -> String) {
        for v in report.violations {
            let check = serde_json::to_value(v.axiom).expect("axiom serializes");
            self.violation(
                check.as_str().unwrap_or("axiom"),
                v.witness.iter().map(&label).collect(),
                v.lhs,
                v.rhs,
            );
        }
    }

    fn finish(self, command: Command, digest: &str, started: Instant) -> RunReport {
        RunReport {
            command,
            spec_digest: digest.to_string(),
            verdict: if self.violations.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            violations: self.violations,
            summary: self.summary,
            tables: self.tables,
            elapsed: started.elapsed(),
        }
    }
}

/// Runs `command` on `spec`; `digest` identifies the spec bytes in the report.
pub fn run(
    command: Command,
    spec: &SpaceSpec,
    digest: &str,
    options: &RunOptions,
) -> Result<RunReport, RunError> {
    if let Some(tol) = options.tol {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(RunError::Usage(format!(
                "--tol must be nonnegative, got {tol}"
            )));
        }
    }
    let started = Instant::now();
    let mut b = Builder::new();
    match command {
        Command::ValidateCone => validate_cone(&mut b, spec, options)?,
        Command::CheckAxioms => check_axioms(&mut b, spec, options)?,
        Command::Scalarize => scalarize(&mut b, spec, options)?,
        Command::DeriveSmetric => derive_smetric(&mut b, spec, options)?,
        Command::StarMetric => star_metric(&mut b, spec, options)?,
        Command::TopologyCheck => topology_check(&mut b, spec, options)?,
        Command::FixedPoint => fixed_point(&mut b, spec, options)?,
    }
    Ok(b.finish(command, digest, started))
}

fn rng(options: &RunOptions) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(options.seed)
}

fn random_vector(rng: &mut impl Rng, d: usize, scale: f64) -> EVector {
    EVector::new((0..d).map(|_| rng.gen_range(-scale..=scale)).collect()).expect("finite")
}

/// `t·e + u`, with `u` halved until the sum lies in the cone (or its
/// interior when `interior`).
fn random_cone_element(rng: &mut impl Rng, s: &Scalarizer, t: f64, interior: bool) -> EVector {
    let cone = s.cone();
    let base = s.e().scale(t);
    let mut u = random_vector(rng, cone.dim(), t.max(1.0));
    for _ in 0..64 {
        let v = &base + &u;
        let ok = if interior {
            cone.is_interior(&v)
        } else {
            cone.contains(&v)
        };
        if ok.expect("dimension matches") {
            return v;
        }
        u = u.scale(0.5);
    }
    base
}

fn check_size(n: usize) -> Result<(), RunError> {
    if n > DEFAULT_MAX_POINTS {
        return Err(Error::TooLarge {
            what: "point set",
            actual: n,
            limit: DEFAULT_MAX_POINTS,
        }
        .into());
    }
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn vec_cell(v: &EVector) -> String {
    format!("{v}")
}

fn point_cell(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|c| num(*c)).collect();
    format!("({})", parts.join(", "))
}

/// An `n × n` table with `cell(x, y)` in row `x`, column `y`.
fn pair_table(title: &str, labels: &[String], cell: impl Fn(usize, usize) -> String) -> Table {
    let mut columns = vec![String::new()];
    columns.extend(labels.iter().cloned());
    let rows = (0..labels.len())
        .map(|x| {
            let mut row = vec![labels[x].clone()];
            row.extend((0..labels.len()).map(|y| cell(x, y)));
            row
        })
        .collect();
    Table {
        title: title.to_string(),
        columns,
        rows,
    }
}

fn validate_cone(b: &mut Builder, spec: &SpaceSpec, options: &RunOptions) -> Result<(), RunError> {
    let cone = &spec.cone;
    let s = &spec.scalarizer;
    let tol = options.tol.unwrap_or(DEFAULT_TOL);
    let d = cone.dim();
    b.set("dimension", d);
    b.set("facets", cone.facets().len());
    b.set("rank", numerical_rank(cone.facets()));
    b.set("strict_tol", cone.strict_tol());
    b.set("interior_point", cone.interior_point());
    b.set("e", s.e());
    b.set("samples_per_check", SAMPLES);

    let mut rng = rng(options);
    let mut n_max_hits = 0usize;
    for _ in 0..SAMPLES {
        // K ∩ −K = {θ}
        let x = random_vector(&mut rng, d, 1.0);
        if cone.contains(&x)? && cone.contains(&-&x)? && x.norm_inf() > tol {
            b.violation(
                "pointedness",
                vec![vec_cell(&x)],
                x.coords().to_vec(),
                vec![],
            );
        }

        // x ≼ y ≪ z  ⇒  x ≪ z
        let x = random_vector(&mut rng, d, 10.0);
        let t = rng.gen_range(0.0..5.0);
        let y = &x + &random_cone_element(&mut rng, s, t, false);
        let t = rng.gen_range(0.1..5.0);
        let z = &y + &random_cone_element(&mut rng, s, t, true);
        if !cone.order_rel(&x, &z)?.is_ll() {
            b.violation(
                "order_chain",
                vec![vec_cell(&x), vec_cell(&y), vec_cell(&z)],
                x.coords().to_vec(),
                z.coords().to_vec(),
            );
        }

        // y ∈ int K, k ∈ K  ⇒  y + k ∈ int K
        let t = rng.gen_range(0.1..5.0);
        let y = random_cone_element(&mut rng, s, t, true);
        let t = rng.gen_range(0.0..5.0);
        let k = random_cone_element(&mut rng, s, t, false);
        if !cone.is_interior(&(&y + &k))? {
            b.violation(
                "interior_absorption",
                vec![vec_cell(&y), vec_cell(&k)],
                y.coords().to_vec(),
                k.coords().to_vec(),
            );
        }

        // The least n with x ≪ n·y.
        let t = rng.gen_range(0.0..20.0);
        let x = random_cone_element(&mut rng, s, t, false);
        let t = rng.gen_range(0.1..2.0);
        let y = random_cone_element(&mut rng, s, t, true);
        match cone.archimedean_witness(&x, &y, 1_000_000) {
            Ok(n) => {
                let works = |n: u64| cone.order_rel(&x, &(n as f64 * &y)).map(|o| o.is_ll());
                if !works(n)? || (n > 1 && works(n - 1)?) {
                    b.violation(
                        "archimedean_minimality",
                        vec![vec_cell(&x), vec_cell(&y)],
                        vec![n as f64],
                        vec![],
                    );
                }
            }
            Err(Error::NotFound(_)) => n_max_hits += 1,
            Err(e) => return Err(e.into()),
        }
    }
    b.set("archimedean_search_exhausted", n_max_hits);
    b.set("e_classification", cone.classify(s.e())?);
    Ok(())
}

fn check_axioms(b: &mut Builder, spec: &SpaceSpec, options: &RunOptions) -> Result<(), RunError> {
    let labels = spec.labels();
    check_size(labels.len())?;
    let table = spec.cone_table();
    let tol = options.tol.unwrap_or(DEFAULT_TOL);
    let report = check_cone_s_axioms_exhaustive(&table, &table.domain(), tol)?;
    b.set("metric", metric_kind(spec));
    b.set("points", labels.len());
    b.set("instances_checked", report.checked);
    b.set("tol", tol);
    b.axioms(report, |&i| labels[i].clone());
    b.tables.push(pair_table("S(x, x, y)", &labels, |x, y| {
        vec_cell(table.values().get(x, x, y))
    }));
    Ok(())
}

fn metric_kind(spec: &SpaceSpec) -> &'static str {
    match spec.metric {
        MetricSpec::Table(_) => "table",
        MetricSpec::ScaledAbsDiff(_) => "scaled_absdiff",
    }
}

fn scalarize(b: &mut Builder, spec: &SpaceSpec, options: &RunOptions) -> Result<(), RunError> {
    let s = &spec.scalarizer;
    let cone = s.cone();
    let d = cone.dim();
    let tol = options.tol.unwrap_or(DEFAULT_TOL);
    let lipschitz = s.lipschitz_constant();
    b.set("e", s.e());
    b.set("lipschitz_constant", lipschitz);
    b.set("samples_per_check", SAMPLES);
    b.set("tol", tol);

    let mut rng = rng(options);
    let mut max_oracle_gap = 0.0f64;
    for _ in 0..SAMPLES {
        let y = random_vector(&mut rng, d, 10.0);
        let xi = s.xi(&y)?;
        let r = rng.gen_range(-20.0..20.0);
        let shifted = &s.e().scale(r) - &y;
        // Skip draws within tol of the threshold, where both sides are
        // rounding-dependent.
        if (xi - r).abs() > tol {
            if (xi <= r) != (cone.classify(&shifted)? != Classification::Outside) {
                b.violation("sublevel", vec![vec_cell(&y)], vec![xi], vec![r]);
            }
            if (xi < r) != (cone.classify(&shifted)? == Classification::Interior) {
                b.violation("strict_sublevel", vec![vec_cell(&y)], vec![xi], vec![r]);
            }
        }

        let lambda = rng.gen_range(0.0..10.0);
        let lhs = s.xi(&y.scale(lambda))?;
        if (lhs - lambda * xi).abs() > tol * (1.0 + lhs.abs()) {
            b.violation(
                "homogeneity",
                vec![vec_cell(&y), num(lambda)],
                vec![lhs],
                vec![lambda * xi],
            );
        }

        let t = rng.gen_range(0.0..5.0);
        let y2 = &y - &random_cone_element(&mut rng, s, t, false);
        if s.xi(&y2)? > xi + tol {
            b.violation(
                "monotonicity",
                vec![vec_cell(&y2), vec_cell(&y)],
                vec![s.xi(&y2)?],
                vec![xi],
            );
        }

        let y1 = random_vector(&mut rng, d, 10.0);
        let sum = s.xi(&(&y + &y1))?;
        let bound = xi + s.xi(&y1)?;
        if sum > bound + tol {
            b.violation(
                "subadditivity",
                vec![vec_cell(&y), vec_cell(&y1)],
                vec![sum],
                vec![bound],
            );
        }

        let delta = random_vector(&mut rng, d, 1e-3);
        let moved = s.xi(&(&y + &delta))?;
        if (moved - xi).abs() > lipschitz * delta.norm2() + tol {
            b.violation(
                "lipschitz",
                vec![vec_cell(&y), vec_cell(&delta)],
                vec![(moved - xi).abs()],
                vec![lipschitz * delta.norm2()],
            );
        }

        let span = 1.0 + y.norm_inf() * (1.0 + lipschitz);
        let oracle = s.xi_oracle(&y, xi - span, xi + span, 80)?;
        max_oracle_gap = max_oracle_gap.max((oracle - xi).abs());
        if (oracle - xi).abs() > 1e-8 {
            b.violation(
                "oracle_agreement",
                vec![vec_cell(&y)],
                vec![xi],
                vec![oracle],
            );
        }
    }
    b.set("max_oracle_gap", max_oracle_gap);

    let labels = spec.labels();
    if labels.len() <= DEFAULT_MAX_POINTS {
        let table = spec.cone_table();
        b.tables.push(pair_table("xi(S(x, x, y))", &labels, |x, y| {
            num(s.xi_unchecked(table.values().get(x, x, y)))
        }));
    }
    Ok(())
}

fn derive_smetric(b: &mut Builder, spec: &SpaceSpec, options: &RunOptions) -> Result<(), RunError> {
    let labels = spec.labels();
    check_size(labels.len())?;
    let table = spec.cone_table();
    let domain = table.domain();
    let tol = options.tol.unwrap_or(DEFAULT_TOL);
    let s = scalarized_smetric(&table, spec.scalarizer.clone())?;
    let mut report = check_s_axioms_exhaustive(&s, &domain, tol)?;
    report.merge(symmetry_check(&s, &pairs(&domain), tol)?);
    b.set("metric", metric_kind(spec));
    b.set("points", labels.len());
    b.set("instances_checked", report.checked);
    b.set("tol", tol);
    b.axioms(report, |&i| labels[i].clone());
    b.tables.push(pair_table("xi(S(x, x, y))", &labels, |x, y| {
        num(spec.scalarizer.xi_unchecked(table.values().get(x, x, y)))
    }));
    Ok(())
}

fn theta_params(
    spec: &SpaceSpec,
    options: &RunOptions,
    command: Command,
) -> Result<ThetaParams, RunError> {
    let a = options
        .a
        .or(spec.theta.map(|t| t.a))
        .ok_or_else(|| RunError::Usage(format!("{command} needs --a or a theta block")))?;
    if !(a > 0.0 && a < 1.0) {
        return Err(RunError::Usage(format!("--a must lie in (0, 1), got {a}")));
    }
    Ok(ThetaParams::new(a, spec.scalarizer.clone())?)
}

struct StarTables {
    cone: ConeTable,
    theta: Table3<f64>,
    star: Table3<f64>,
}

fn star_tables(spec: &SpaceSpec, p: &ThetaParams) -> Result<StarTables, RunError> {
    check_size(spec.points.len())?;
    let cone = spec.cone_table();
    let theta = theta_table(&cone, p, &cone.domain())?;
    let star = star_from_theta(&theta);
    Ok(StarTables { cone, theta, star })
}

fn star_metric(b: &mut Builder, spec: &SpaceSpec, options: &RunOptions) -> Result<(), RunError> {
    let p = theta_params(spec, options, Command::StarMetric)?;
    let labels = spec.labels();
    let StarTables { theta, star, .. } = star_tables(spec, &p)?;
    let domain = star.domain();
    let tol = options.tol.unwrap_or(DEFAULT_STAR_TOL);
    let mut report = check_s_axioms_exhaustive(&star, &domain, tol)?;
    report.merge(symmetry_check(&star, &pairs(&domain), tol)?);

    let n = domain.len();
    let shortcuts = (0..n)
        .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
        .filter(|&(x, y, z)| star.get(x, y, z) < theta.get(x, y, z))
        .count();
    b.set("a", p.a());
    b.set("h", p.h());
    b.set("points", n);
    b.set("instances_checked", report.checked);
    b.set("chain_shortcuts", shortcuts);
    b.set("tol", tol);
    b.axioms(report, |&i| labels[i].clone());
    b.tables.push(pair_table("S*(x, x, y)", &labels, |x, y| {
        num(*star.get(x, x, y))
    }));
    b.tables.push(pair_table("Theta(x, x, y)", &labels, |x, y| {
        num(*theta.get(x, x, y))
    }));
    Ok(())
}

/// Star radii: every distinct positive `S*(y, y, x)`, the midpoints between
/// consecutive ones, and one value beyond each end; padded geometrically to
/// at least five.
fn star_radius_grid(star: &Table3<f64>) -> Vec<f64> {
    let n = star.len();
    let mut values: Vec<f64> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| *star.get(y, y, x))
        .filter(|v| *v > 0.0)
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut grid = Vec::new();
    match (values.first(), values.last()) {
        (Some(&lo), Some(&hi)) => {
            grid.push(lo / 2.0);
            for w in values.windows(2) {
                grid.push(w[0]);
                grid.push(0.5 * (w[0] + w[1]));
            }
            grid.push(hi);
            grid.push(2.0 * hi);
        }
        _ => grid.push(1.0),
    }
    while grid.len() < 5 {
        let last = *grid.last().expect("nonempty");
        grid.push(2.0 * last);
    }
    grid
}

fn topology_check(b: &mut Builder, spec: &SpaceSpec, options: &RunOptions) -> Result<(), RunError> {
    let p = theta_params(spec, options, Command::TopologyCheck)?;
    let labels = spec.labels();
    let StarTables { cone, star, .. } = star_tables(spec, &p)?;
    let star_radii = star_radius_grid(&star);

    let mut cone_radii: Vec<EVector> = star_radii.iter().map(|&t| p.e().scale(t)).collect();
    let (lo, hi) = (star_radii[0], star_radii[star_radii.len() - 1]);
    let mut rng = rng(options);
    for _ in 0..RANDOM_CONE_RADII {
        let t = (rng.gen_range(lo.ln()..=hi.ln())).exp();
        cone_radii.push(random_cone_element(&mut rng, &spec.scalarizer, t, true));
    }

    let (into_star, into_cone) =
        refinement_check_tables(&cone, &star, &p, &cone_radii, &star_radii)?;
    b.set("a", p.a());
    b.set("h", p.h());
    b.set("points", labels.len());
    b.set("star_radii", &star_radii);
    b.set("cone_radii", cone_radii.len());
    b.set("cone_into_star_verified", into_star.verified());
    b.set("star_into_cone_verified", into_cone.verified());
    for (check, report) in [("cone_into_star", into_star), ("star_into_cone", into_cone)] {
        refinement_table(b, check, report, &labels);
    }
    Ok(())
}

fn radius_coords(r: &Radius) -> Vec<f64> {
    match r {
        Radius::Scalar(v) => vec![*v],
        Radius::Vector(c) => c.coords().to_vec(),
    }
}

fn radius_cell(r: &Radius) -> String {
    match r {
        Radius::Scalar(v) => num(*v),
        Radius::Vector(c) => vec_cell(c),
    }
}

fn refinement_table(
    b: &mut Builder,
    check: &str,
    report: RefinementReport<usize>,
    labels: &[String],
) {
    let names = |ps: &[usize]| {
        ps.iter()
            .map(|&i| labels[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut rows = Vec::new();
    for w in &report.witnesses {
        rows.push(vec![
            labels[w.center].clone(),
            radius_cell(&w.given),
            w.found
                .as_ref()
                .map_or_else(|| "-".to_string(), radius_cell),
            names(&w.inner_ball),
            names(&w.outer_ball),
            if w.verified { "yes" } else { "no" }.to_string(),
        ]);
        if !w.verified {
            // The center followed by the inner-ball points that escape the
            // outer ball.
            let mut witness = vec![labels[w.center].clone()];
            witness.extend(
                w.inner_ball
                    .iter()
                    .filter(|q| !w.outer_ball.contains(q))
                    .map(|&q| labels[q].clone()),
            );
            b.violation(
                check,
                witness,
                radius_coords(&w.given),
                w.found.as_ref().map(radius_coords).unwrap_or_default(),
            );
        }
    }
    b.tables.push(Table {
        title: format!("refinement {check}"),
        columns: [
            "center",
            "given",
            "found",
            "inner ball",
            "outer ball",
            "verified",
        ]
        .map(String::from)
        .to_vec(),
        rows,
    });
}

fn fixed_point(b: &mut Builder, spec: &SpaceSpec, options: &RunOptions) -> Result<(), RunError> {
    let c = spec
        .contraction
        .as_ref()
        .ok_or_else(|| RunError::Usage("fixed-point needs a contraction block".into()))?;
    let MetricSpec::ScaledAbsDiff(metric) = &spec.metric else {
        return Err(RunError::Usage(
            "fixed-point needs a scaled_absdiff metric".into(),
        ));
    };
    let eps = options.eps.unwrap_or(c.eps);
    let max_iter = options.max_iter.unwrap_or(c.max_iter);
    let map = c.map.clone();
    let problem = ContractionProblem::new(
        metric,
        spec.scalarizer.clone(),
        move |x: &Vec<f64>| map.apply(x),
        c.h,
        c.x0.clone(),
        eps,
        max_iter,
    )
    .map_err(|e| RunError::Usage(e.to_string()))?;
    let problem = match options.tol {
        Some(tol) => problem.with_tolerance(tol),
        None => problem,
    };

    let mut rng = rng(options);
    let k = c.x0.len();
    let r = c.sample_radius;
    let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..SAMPLES)
        .map(|_| {
            let mut draw = || (0..k).map(|_| rng.gen_range(-r..=r)).collect::<Vec<f64>>();
            (draw(), draw())
        })
        .collect();
    let report = problem.verify_contraction(&samples)?;
    b.set("map", &c.map);
    b.set("h", c.h);
    b.set("eps", eps);
    b.set("max_iter", max_iter);
    b.set("x0", &c.x0);
    b.set("contraction_samples", report.checked);
    b.axioms(report, |x| point_cell(x));

    match problem.banach_solve() {
        Ok(sol) => {
            b.set("fixed_point", &sol.point);
            b.set("iterations", sol.iterations);
            b.set("residual", sol.residual);
            let rows = sol
                .trajectory
                .iter()
                .zip(&sol.residuals)
                .enumerate()
                .map(|(i, (x, res))| vec![i.to_string(), point_cell(x), num(*res)])
                .collect();
            b.tables.push(Table {
                title: "iterates".into(),
                columns: ["k", "x_k", "residual"].map(String::from).to_vec(),
                rows,
            });
        }
        Err(SolveError::NoConvergence {
            best,
            residual,
            iterations,
        }) => {
            b.set("iterations", iterations);
            b.set("residual", residual);
            b.violation(
                "no_convergence",
                vec![point_cell(&best)],
                vec![residual],
                vec![eps],
            );
        }
        Err(SolveError::DomainEscape { from, step }) => {
            b.set("iterations", step);
            b.violation("domain_escape", vec![point_cell(&from)], vec![], vec![]);
        }
    }
    if let Some(exact) = c.map.fixed_point() {
        b.set("exact_fixed_point", exact);
    }
    Ok(())
}
