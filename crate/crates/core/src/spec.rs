//! The JSON space description consumed by the command-line tool.
//!
//! ```json
//! {
//!   "spec_version": 1,
//!   "dimension": 2,
//!   "cone": { "facets": [[1, 0], [0, 1]], "interior_point": [1, 1], "strict_tol": 0.0 },
//!   "scalarizer": { "e": [1, 1] },
//!   "points": [ { "label": "p0", "coords": [0] }, { "label": "p1", "coords": [1] } ],
//!   "metric": { "kind": "scaled_absdiff", "weights": [1, 1] },
//!   "theta": { "a": 0.5 },
//!   "contraction": {
//!     "map": { "kind": "affine", "scale": 0.5, "shift": 1.0 },
//!     "h": 0.5, "x0": [100], "eps": 1e-8, "max_iter": 100
//!   }
//! }
//! ```
//!
//! A `"table"` metric instead carries `"values"`, an `n × n × n × d` array
//! aligned with `points`. `scalarizer`, `theta` and `contraction` are
//! optional; `e` defaults to the cone's interior point.

use std::collections::HashSet;
use std::fmt;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::cone::{Classification, PolyhedralCone};
use crate::cone_metric::{ConeTable, ScaledAbsDiff};
use crate::fixed_point::AffineMap;
use crate::scalarization::Scalarizer;
use crate::smetric::Table3;
use crate::vector::EVector;

pub const SPEC_VERSION: u32 = 1;

/// A validation failure, located by a JSON path such as `metric.values[1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

impl SpecError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for SpecError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    spec_version: u32,
    dimension: usize,
    cone: RawCone,
    #[serde(default)]
    scalarizer: Option<RawScalarizer>,
    points: Vec<RawPoint>,
    metric: RawMetric,
    #[serde(default)]
    theta: Option<ThetaSpec>,
    #[serde(default)]
    contraction: Option<RawContraction>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCone {
    facets: Vec<Vec<f64>>,
    interior_point: Vec<f64>,
    #[serde(default)]
    strict_tol: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScalarizer {
    e: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    label: String,
    #[serde(default)]
    coords: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawMetric {
    Table { values: Vec<Vec<Vec<Vec<f64>>>> },
    ScaledAbsdiff { weights: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSpec {
    pub a: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContraction {
    map: RawMap,
    h: f64,
    x0: Vec<f64>,
    eps: f64,
    max_iter: usize,
    #[serde(default = "default_sample_radius")]
    sample_radius: f64,
}

fn default_sample_radius() -> f64 {
    100.0
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawMap {
    Affine { scale: f64, shift: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub label: String,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    Table(ConeTable),
    ScaledAbsDiff(ScaledAbsDiff),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionSpec {
    pub map: AffineMap,
    pub h: f64,
    pub x0: Vec<f64>,
    pub eps: f64,
    pub max_iter: usize,
    /// Contraction samples are drawn from `[-sample_radius, sample_radius]^k`.
    pub sample_radius: f64,
}

/// A validated space description.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    pub dimension: usize,
    pub cone: PolyhedralCone,
    pub scalarizer: Scalarizer,
    pub points: Vec<LabeledPoint>,
    pub metric: MetricSpec,
    pub theta: Option<ThetaSpec>,
    pub contraction: Option<ContractionSpec>,
}

impl SpaceSpec {
    pub fn labels(&self) -> Vec<String> {
        self.points.iter().map(|p| p.label.clone()).collect()
    }

    /// The cone metric restricted to the listed points, indexed by position.
    pub fn cone_table(&self) -> ConeTable {
        match &self.metric {
            MetricSpec::Table(t) => t.clone(),
            MetricSpec::ScaledAbsDiff(m) => {
                let coords: Vec<Vec<f64>> = self.points.iter().map(|p| p.coords.clone()).collect();
                ConeTable::tabulate(m, &coords)
            }
        }
    }
}

/// Hex SHA-256 of the raw spec bytes.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn vector(path: &str, coords: Vec<f64>, d: usize) -> Result<EVector, SpecError> {
    if coords.len() != d {
        return Err(SpecError::at(
            path,
            format!("expected {d} entries, found {}", coords.len()),
        ));
    }
    EVector::new(coords).map_err(|e| SpecError::at(path, e.to_string()))
}

fn finite(path: &str, v: f64) -> Result<f64, SpecError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SpecError::at(path, "must be finite"))
    }
}

/// Parses and validates a space description.
pub fn parse_space_spec(bytes: &[u8]) -> Result<SpaceSpec, SpecError> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| SpecError::at("$", format!("not UTF-8: {e}")))?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." || path == "?" {
            "$".to_string()
        } else {
            path
        };
        SpecError::at(path, e.into_inner().to_string())
    })?;
    validate(raw)
}

fn validate(raw: RawSpec) -> Result<SpaceSpec, SpecError> {
    if raw.spec_version != SPEC_VERSION {
        return Err(SpecError::at(
            "spec_version",
            format!(
                "unsupported version {}, expected {SPEC_VERSION}",
                raw.spec_version
            ),
        ));
    }
    let d = raw.dimension;
    if d == 0 {
        return Err(SpecError::at("dimension", "must be at least 1"));
    }

    for (i, row) in raw.cone.facets.iter().enumerate() {
        if row.len() != d {
            return Err(SpecError::at(
                format!("cone.facets[{i}]"),
                format!("expected {d} entries, found {}", row.len()),
            ));
        }
    }
    let witness = vector("cone.interior_point", raw.cone.interior_point, d)?;
    let cone = PolyhedralCone::with_tolerance(raw.cone.facets, witness, raw.cone.strict_tol)
        .map_err(|e| {
            let msg = e.to_string();
            let path = if msg.contains("interior_point") {
                "cone.interior_point"
            } else if msg.contains("strict_tol") {
                "cone.strict_tol"
            } else {
                "cone.facets"
            };
            SpecError::at(path, msg)
        })?;

    let scalarizer = match raw.scalarizer {
        Some(s) => {
            let e = vector("scalarizer.e", s.e, d)?;
            if cone.classify(&e).expect("dimension checked") != Classification::Interior {
                return Err(SpecError::at("scalarizer.e", "e not interior"));
            }
            Scalarizer::new(cone.clone(), e).expect("checked interior")
        }
        None => Scalarizer::from_cone(cone.clone()),
    };

    if raw.points.is_empty() {
        return Err(SpecError::at("points", "at least one point is required"));
    }
    let mut seen = HashSet::new();
    for (i, p) in raw.points.iter().enumerate() {
        if !seen.insert(p.label.as_str()) {
            return Err(SpecError::at(
                format!("points[{i}].label"),
                format!("duplicate label {:?}", p.label),
            ));
        }
        if let Some(j) = p.coords.iter().position(|c| !c.is_finite()) {
            return Err(SpecError::at(
                format!("points[{i}].coords[{j}]"),
                "must be finite",
            ));
        }
    }
    let n = raw.points.len();
    let points: Vec<LabeledPoint> = raw
        .points
        .into_iter()
        .map(|p| LabeledPoint {
            label: p.label,
            coords: p.coords,
        })
        .collect();

    let metric = match raw.metric {
        RawMetric::Table { values } => {
            if values.len() != n {
                return Err(SpecError::at(
                    "metric.values",
                    format!(
                        "expected {n} entries for {n} points, found {}",
                        values.len()
                    ),
                ));
            }
            let mut flat = Vec::with_capacity(n * n * n);
            for (i, plane) in values.into_iter().enumerate() {
                if plane.len() != n {
                    return Err(SpecError::at(
                        format!("metric.values[{i}]"),
                        format!("expected {n} entries, found {}", plane.len()),
                    ));
                }
                for (j, row) in plane.into_iter().enumerate() {
                    if row.len() != n {
                        return Err(SpecError::at(
                            format!("metric.values[{i}][{j}]"),
                            format!("expected {n} entries, found {}", row.len()),
                        ));
                    }
                    for (k, v) in row.into_iter().enumerate() {
                        flat.push(vector(&format!("metric.values[{i}][{j}][{k}]"), v, d)?);
                    }
                }
            }
            let table = Table3::from_flat(n, flat).expect("sizes checked");
            MetricSpec::Table(ConeTable::new(cone.clone(), table).expect("dimensions checked"))
        }
        RawMetric::ScaledAbsdiff { weights } => {
            let w = vector("metric.weights", weights, d)?;
            let m = ScaledAbsDiff::new(cone.clone(), w)
                .map_err(|e| SpecError::at("metric.weights", e.to_string()))?;
            let k = points[0].coords.len();
            for (i, p) in points.iter().enumerate() {
                if p.coords.is_empty() || p.coords.len() != k {
                    return Err(SpecError::at(
                        format!("points[{i}].coords"),
                        format!(
                            "scaled_absdiff needs coordinates of equal nonzero length (first point has {k})"
                        ),
                    ));
                }
            }
            MetricSpec::ScaledAbsDiff(m)
        }
    };

    if let Some(t) = raw.theta {
        if !(t.a > 0.0 && t.a < 1.0) {
            return Err(SpecError::at(
                "theta.a",
                format!("must lie in (0, 1), got {}", t.a),
            ));
        }
    }

    let contraction = match raw.contraction {
        None => None,
        Some(c) => {
            if !matches!(metric, MetricSpec::ScaledAbsDiff(_)) {
                return Err(SpecError::at(
                    "contraction",
                    "fixed-point problems need a scaled_absdiff metric",
                ));
            }
            let RawMap::Affine { scale, shift } = c.map;
            finite("contraction.map.scale", scale)?;
            finite("contraction.map.shift", shift)?;
            if !(0.0..1.0).contains(&c.h) {
                return Err(SpecError::at(
                    "contraction.h",
                    format!("must lie in [0, 1), got {}", c.h),
                ));
            }
            if !(c.eps > 0.0 && c.eps.is_finite()) {
                return Err(SpecError::at("contraction.eps", "must be positive"));
            }
            if c.max_iter == 0 {
                return Err(SpecError::at("contraction.max_iter", "must be positive"));
            }
            if !(c.sample_radius > 0.0 && c.sample_radius.is_finite()) {
                return Err(SpecError::at(
                    "contraction.sample_radius",
                    "must be positive",
                ));
            }
            let k = points[0].coords.len();
            if c.x0.len() != k {
                return Err(SpecError::at(
                    "contraction.x0",
                    format!("expected {k} coordinates, found {}", c.x0.len()),
                ));
            }
            if let Some(j) = c.x0.iter().position(|v| !v.is_finite()) {
                return Err(SpecError::at(
                    format!("contraction.x0[{j}]"),
                    "must be finite",
                ));
            }
            Some(ContractionSpec {
                map: AffineMap { scale, shift },
                h: c.h,
                x0: c.x0,
                eps: c.eps,
                max_iter: c.max_iter,
                sample_radius: c.sample_radius,
            })
        }
    };

    Ok(SpaceSpec {
        dimension: d,
        cone,
        scalarizer,
        points,
        metric,
        theta: raw.theta,
        contraction,
    })
}
