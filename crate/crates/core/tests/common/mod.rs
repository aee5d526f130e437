//! Fixtures and independent oracles shared by the integration tests.
//!
//! The oracles only use facet rows and plain arithmetic, never the crate's
//! own order, scalarization or shortest-path code.

#![allow(dead_code)]

use std::path::PathBuf;

use cone_smetric::spec::{parse_space_spec, SpaceSpec};
use cone_smetric::{EVector, PolyhedralCone, Scalarizer};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> SpaceSpec {
    let bytes = std::fs::read(fixture_path(name)).expect("fixture exists");
    parse_space_spec(&bytes).expect("fixture parses")
}

/// A cone with its facet rows, extreme rays and scalarization direction.
pub struct Family {
    pub name: &'static str,
    pub facets: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
    pub e: Vec<f64>,
}

impl Family {
    pub fn cone(&self) -> PolyhedralCone {
        PolyhedralCone::new(self.facets.clone(), ev(&self.e)).unwrap()
    }

    pub fn scalarizer(&self) -> Scalarizer {
        Scalarizer::new(self.cone(), ev(&self.e)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.e.len()
    }

    /// `Σ λ_i r_i` for nonnegative weights.
    pub fn combine(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (r, w) in self.rays.iter().zip(weights) {
            for (o, v) in out.iter_mut().zip(r) {
                *o += w * v;
            }
        }
        out
    }
}

pub fn families() -> Vec<Family> {
    vec![
        Family {
            name: "orthant R^2",
            facets: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            rays: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            e: vec![1.0, 1.0],
        },
        Family {
            name: "orthant R^3",
            facets: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            rays: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            e: vec![1.0, 1.0, 1.0],
        },
        Family {
            name: "A=[[1,0],[1,1]]",
            facets: vec![vec![1.0, 0.0], vec![1.0, 1.0]],
            rays: vec![vec![0.0, 1.0], vec![1.0, -1.0]],
            e: vec![1.0, 0.0],
        },
    ]
}

pub fn ev(v: &[f64]) -> EVector {
    EVector::new(v.to_vec()).unwrap()
}

pub fn facet_values(facets: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    facets
        .iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn in_cone(facets: &[Vec<f64>], v: &[f64]) -> bool {
    facet_values(facets, v).iter().all(|&t| t >= 0.0)
}

pub fn in_interior(facets: &[Vec<f64>], v: &[f64]) -> bool {
    facet_values(facets, v).iter().all(|&t| t > 0.0)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

/// `ξ_e` by its defining infimum, located by bisection on facet checks.
pub fn xi_bisect(facets: &[Vec<f64>], e: &[f64], y: &[f64]) -> f64 {
    let member = |r: f64| in_cone(facets, &sub(&scale(e, r), y));
    let (mut lo, mut hi) = (-1.0, 1.0);
    while member(lo) {
        lo *= 2.0;
    }
    while !member(hi) {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if member(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `Θ(v)` by scanning exponents: the least `h^α` with `h^α e − v` interior.
pub fn theta_scan(facets: &[Vec<f64>], e: &[f64], h: f64, v: &[f64]) -> f64 {
    if v.iter().all(|&c| c == 0.0) {
        return 0.0;
    }
    (-200..=200)
        .map(|alpha| h.powi(alpha))
        .find(|&p| in_interior(facets, &sub(&scale(e, p), v)))
        .expect("exponent in scan range")
}

/// `S*` by Bellman–Ford relaxation over pair states, from a `Θ` table
/// indexed `theta[x][y][z]`.
pub fn star_relax(theta: &[Vec<Vec<f64>>]) -> Vec<Vec<Vec<f64>>> {
    let n = theta.len();
    let mut out = vec![vec![vec![0.0; n]; n]; n];
    for x in 0..n {
        let mut dist: Vec<Vec<f64>> = (0..n)
            .map(|v| (0..n).map(|w| theta[x][v][w]).collect())
            .collect();
        loop {
            let mut changed = false;
            for v in 0..n {
                for w in 0..n {
                    for u in 0..n {
                        let c = dist[v][w] + theta[v][w][u];
                        if c < dist[w][u] {
                            dist[w][u] = c;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        out[x] = dist;
    }
    out
}

/// `Θ` table of a spec's cone metric, computed with [`theta_scan`].
pub fn theta_oracle_table(spec: &SpaceSpec, h: f64) -> Vec<Vec<Vec<f64>>> {
    let table = spec.cone_table();
    let n = table.len();
    let facets = spec.cone.facets();
    let e = spec.scalarizer.e().coords();
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    (0..n)
                        .map(|z| theta_scan(facets, e, h, table.values().get(x, y, z).coords()))
                        .collect()
                })
                .collect()
        })
        .collect()
}
