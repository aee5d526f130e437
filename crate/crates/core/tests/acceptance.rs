//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//!
//! Runs with a custom harness so the lines are printed by a plain
//! `cargo test`.

#![allow(clippy::needless_range_loop)]

mod common;

use std::process::{Command as Proc, ExitCode};
use std::time::{Duration, Instant};

use cone_smetric::cone_metric::{check_cone_s_axioms_exhaustive, scalarized_smetric, ConeSMetric};
use cone_smetric::fixed_point::ContractionProblem;
use cone_smetric::smetric::{check_s_axioms_exhaustive, pairs, symmetry_check};
use cone_smetric::theta::{
    chain_count, refinement_check, star_metric, star_metric_bruteforce, theta_table,
    BRUTEFORCE_MAX_CHAINS,
};
use cone_smetric::{ConeTable, PolyhedralCone, Scalarizer, ScaledAbsDiff, ThetaParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Check = Result<String, String>;
type Criterion = (&'static str, &'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        (
            "AC1",
            "scalarization properties (1)-(7) and oracle agreement",
            Duration::from_secs(5),
            ac1,
        ),
        (
            "AC2",
            "cone axioms and scalarized S-metric axioms on 3 fixtures",
            Duration::from_secs(2),
            ac2,
        ),
        (
            "AC3",
            "S* axioms, brute-force agreement, chain shortcut",
            Duration::from_secs(10),
            ac3,
        ),
        (
            "AC4",
            "ball refinement in both directions for a in {1/2, 1/3}",
            Duration::from_secs(5),
            ac4,
        ),
        (
            "AC5",
            "Picard iteration for T(x) = x/2 + 1",
            Duration::from_secs(1),
            ac5,
        ),
        (
            "AC6",
            "symmetry, Archimedean minimality, order lemmas",
            Duration::from_secs(3),
            ac6,
        ),
        (
            "AC7",
            "CLI determinism and exit statuses",
            Duration::MAX,
            ac7,
        ),
    ];
    let mut failed = 0;
    for (id, title, limit, f) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        let limit = if limit == Duration::MAX {
            "no limit".to_string()
        } else {
            format!("limit {} ms", limit.as_millis())
        };
        println!(
            "[{}] {id} {title}: {detail} ({:.0} ms, {limit})",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64() * 1e3,
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}

fn ac1() -> Check {
    const N: usize = 10_000;
    const TOL: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_oracle = 0.0f64;
    for fam in families() {
        let s = fam.scalarizer();
        let d = fam.dim();
        let xi = |y: &[f64]| s.xi(&ev(y)).unwrap();
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..d)
                .map(|_| (rng.gen_range(-40..=40) as f64) / 4.0)
                .collect()
        };
        for i in 0..N {
            let y = draw(&mut rng);
            let y1 = draw(&mut rng);
            let r = rng.gen_range(-60..=60) as f64 / 4.0;
            let lambda = rng.gen_range(0..=40) as f64 / 4.0;
            let k: Vec<f64> = fam.combine(
                &(0..fam.rays.len())
                    .map(|_| rng.gen_range(0..=20) as f64 / 4.0)
                    .collect::<Vec<_>>(),
            );
            let v = xi(&y);
            let shifted = sub(&scale(&fam.e, r), &y);
            // (1)/(2): ξ(y) ≤ r ⇔ y ∈ re − K
            ensure(
                (v <= r + TOL) == in_cone(&fam.facets, &shifted) || (v - r).abs() <= TOL,
                || format!("{}: sublevel fails at y={y:?}, r={r}", fam.name),
            )?;
            // (3)/(4): ξ(y) < r ⇔ y ∈ re − int K
            if (v - r).abs() > TOL {
                ensure((v < r) == in_interior(&fam.facets, &shifted), || {
                    format!("{}: strict sublevel fails at y={y:?}, r={r}", fam.name)
                })?;
            }
            // (5) positive homogeneity
            let hv = xi(&scale(&y, lambda));
            ensure((hv - lambda * v).abs() <= TOL * (1.0 + hv.abs()), || {
                format!("{}: homogeneity fails at y={y:?}, λ={lambda}", fam.name)
            })?;
            // (6) y2 ≼ y1 ⇒ ξ(y2) ≤ ξ(y1)
            let y2 = sub(&y1, &k);
            ensure(xi(&y2) <= xi(&y1) + TOL, || {
                format!("{}: monotonicity fails at y1={y1:?}, y2={y2:?}", fam.name)
            })?;
            // (7) subadditivity
            ensure(xi(&add(&y, &y1)) <= v + xi(&y1) + TOL, || {
                format!("{}: subadditivity fails at {y:?}, {y1:?}", fam.name)
            })?;
            // Continuity, as the Lipschitz bound of the closed form.
            let delta: Vec<f64> = (0..d).map(|_| rng.gen_range(-1e-3..1e-3)).collect();
            let norm = delta.iter().map(|t| t * t).sum::<f64>().sqrt();
            ensure(
                (xi(&add(&y, &delta)) - v).abs() <= s.lipschitz_constant() * norm + TOL,
                || format!("{}: Lipschitz bound fails at y={y:?}", fam.name),
            )?;

            if i < 1000 {
                let yr: Vec<f64> = (0..d).map(|_| rng.gen_range(-100.0..100.0)).collect();
                let exact = xi(&yr);
                let oracle = s
                    .xi_oracle(&ev(&yr), exact - 1000.0, exact + 1000.0, 80)
                    .unwrap();
                let bisect = xi_bisect(&fam.facets, &fam.e, &yr);
                let gap = (oracle - exact).abs().max((bisect - exact).abs());
                worst_oracle = worst_oracle.max(gap);
                ensure(gap <= 1e-8, || {
                    format!("{}: oracle gap {gap:e} at {yr:?}", fam.name)
                })?;
            }
        }
    }
    Ok(format!(
        "3 cone families x {N} samples, max |xi - oracle| = {worst_oracle:.1e}"
    ))
}

fn ac2() -> Check {
    const TOL: f64 = 1e-9;
    let skew = PolyhedralCone::new(vec![vec![1.0, 0.0], vec![1.0, 1.0]], ev(&[1.0, 0.0])).unwrap();
    let skew_metric = ScaledAbsDiff::new(skew.clone(), ev(&[1.0, 0.0])).unwrap();
    let skew_domain: Vec<f64> = vec![-3.0, 0.0, 0.5, 1.0, 2.0, 5.0, 8.0, 13.0];
    let skew_table = ConeTable::tabulate(&skew_metric, &skew_domain);

    let pow2 = fixture("pow2m1_8pt.json");
    let table = fixture("table_4pt.json");
    let cases = [
        (
            "pow2m1_8pt (orthant, w=(1,2))",
            pow2.cone_table(),
            pow2.scalarizer.clone(),
        ),
        (
            "skew cone, w=(1,0)",
            skew_table,
            Scalarizer::new(skew, ev(&[1.0, 0.0])).unwrap(),
        ),
        ("table_4pt", table.cone_table(), table.scalarizer.clone()),
    ];
    let mut checked = 0;
    for (name, t, s) in cases {
        let domain = t.domain();
        let cone_report = check_cone_s_axioms_exhaustive(&t, &domain, TOL).unwrap();
        ensure(cone_report.passed(), || {
            format!("{name}: cone axioms {:?}", cone_report.violations.first())
        })?;
        let scalar = scalarized_smetric(&t, s).unwrap();
        let mut report = check_s_axioms_exhaustive(&scalar, &domain, TOL).unwrap();
        report.merge(symmetry_check(&scalar, &pairs(&domain), TOL).unwrap());
        ensure(report.passed(), || {
            format!("{name}: scalar axioms {:?}", report.violations.first())
        })?;
        checked += cone_report.checked + report.checked;
    }
    Ok(format!("3 fixtures, {checked} instances"))
}

fn ac3() -> Check {
    let half = |spec: &cone_smetric::spec::SpaceSpec| {
        ThetaParams::new(0.5, spec.scalarizer.clone()).unwrap()
    };

    // Axioms on the 3- and 8-point fixtures.
    for name in ["orthant_3pt.json", "pow2m1_8pt.json"] {
        let spec = fixture(name);
        let t = spec.cone_table();
        let star = star_metric(&t, &half(&spec), &t.domain()).unwrap();
        let domain = star.domain();
        let mut report = check_s_axioms_exhaustive(&star, &domain, 1e-12).unwrap();
        report.merge(symmetry_check(&star, &pairs(&domain), 1e-12).unwrap());
        ensure(report.passed(), || {
            format!("{name}: S* axioms {:?}", report.violations.first())
        })?;
        let oracle = star_relax(&theta_oracle_table(&spec, 2.0));
        let n = domain.len();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    ensure(*star.get(x, y, z) == oracle[x][y][z], || {
                        format!(
                            "{name}: S*({x},{y},{z}) = {} but relaxation gives {}",
                            star.get(x, y, z),
                            oracle[x][y][z]
                        )
                    })?;
                }
            }
        }
    }

    // Exact agreement with chain enumeration on the small fixtures.
    let five = {
        let cone = PolyhedralCone::orthant(2);
        let sp = ScaledAbsDiff::new(cone.clone(), ev(&[1.0, 1.0])).unwrap();
        let domain = [0.0, 1.0, 3.0, 7.0, 8.0];
        (
            ConeTable::tabulate(&sp, &domain),
            Scalarizer::from_cone(cone),
        )
    };
    let small = [
        (
            "orthant_3pt",
            fixture("orthant_3pt.json").cone_table(),
            fixture("orthant_3pt.json").scalarizer,
        ),
        (
            "table_4pt",
            fixture("table_4pt.json").cone_table(),
            fixture("table_4pt.json").scalarizer,
        ),
        ("{0,1,3,7,8}", five.0, five.1),
    ];
    let mut lens = Vec::new();
    for (name, t, s) in small {
        let p = ThetaParams::new(0.5, s).unwrap();
        let n = t.len();
        let max_len = (3..=n * n + 2)
            .take_while(|&l| chain_count(n, l) <= BRUTEFORCE_MAX_CHAINS)
            .last()
            .unwrap();
        let fast = star_metric(&t, &p, &t.domain()).unwrap();
        let slow = star_metric_bruteforce(&t, &p, &t.domain(), max_len).unwrap();
        ensure(fast == slow, || {
            format!("{name}: Dijkstra and enumeration (len {max_len}) differ")
        })?;
        lens.push(format!("{name}:{max_len}"));
    }

    // The chain shortcut.
    let spec = fixture("orthant_3pt.json");
    let t = spec.cone_table();
    let p = half(&spec);
    let theta = theta_table(&t, &p, &t.domain()).unwrap();
    let star = star_metric(&t, &p, &t.domain()).unwrap();
    ensure(
        *theta.get(2, 2, 0) == 8.0 && *star.get(2, 2, 0) == 6.0 && *star.get(0, 0, 1) == 4.0,
        || {
            format!(
                "shortcut fixture: Θ(2,2,0)={}, S*(2,2,0)={}, S*(0,0,1)={}",
                theta.get(2, 2, 0),
                star.get(2, 2, 0),
                star.get(0, 0, 1)
            )
        },
    )?;
    Ok(format!(
        "axioms pass on 3- and 8-point fixtures; enumeration agrees ({}); S*(2,2,0)=6 < Θ(2,2,0)=8",
        lens.join(", ")
    ))
}

fn ac4() -> Check {
    let star_radii = [0.25, 1.0, 2.5, 4.0, 6.0, 9.0, 17.0, 100.0, 1000.0];
    let mut summary = Vec::new();
    for name in ["orthant_3pt.json", "pow2m1_8pt.json"] {
        let spec = fixture(name);
        let t = spec.cone_table();
        let e = spec.scalarizer.e().clone();
        let mut cone_radii: Vec<_> = star_radii.iter().map(|&r| e.scale(r)).collect();
        cone_radii.extend([
            ev(&[0.5, 3.0]),
            ev(&[3.0, 0.5]),
            ev(&[10.0, 40.0]),
            ev(&[300.0, 7.0]),
        ]);
        let mut verdicts = Vec::new();
        for a in [0.5, 1.0 / 3.0] {
            let p = ThetaParams::new(a, spec.scalarizer.clone()).unwrap();
            let (into_star, into_cone) =
                refinement_check(&t, &p, &t.domain(), &cone_radii, &star_radii).unwrap();
            let n = t.len();
            ensure(into_star.witnesses.len() == n * star_radii.len(), || {
                "missing witnesses".into()
            })?;
            ensure(into_cone.witnesses.len() == n * cone_radii.len(), || {
                "missing witnesses".into()
            })?;
            for w in into_star.witnesses.iter().chain(&into_cone.witnesses) {
                ensure(
                    w.inner_ball.iter().all(|q| w.outer_ball.contains(q)) == w.verified,
                    || {
                        format!(
                            "{name}: witness flag disagrees with its balls at {}",
                            w.center
                        )
                    },
                )?;
            }
            verdicts.push((into_star.verified(), into_cone.verified()));
        }
        ensure(verdicts[0] == verdicts[1], || {
            format!("{name}: verdicts differ across a: {verdicts:?}")
        })?;
        ensure(verdicts[0] == (true, true), || {
            format!("{name}: refinement failed: {verdicts:?}")
        })?;
        summary.push(format!(
            "{name} ({} star, {} cone radii)",
            star_radii.len(),
            cone_radii.len()
        ));
    }
    Ok(summary.join("; "))
}

fn ac5() -> Check {
    let cone = PolyhedralCone::orthant(2);
    let metric = ScaledAbsDiff::new(cone.clone(), ev(&[1.0, 2.0])).unwrap();
    let s = Scalarizer::from_cone(cone);
    let affine = |x: &f64| x / 2.0 + 1.0;
    let solve = |x0: f64| {
        ContractionProblem::new(&metric, s.clone(), affine, 0.5, x0, 1e-8, 60)
            .unwrap()
            .banach_solve()
    };
    let mut worst_iters = 0;
    for x0 in [-100.0, 0.0, 100.0] {
        let sol = solve(x0).map_err(|e| format!("x0={x0}: {e}"))?;
        ensure((sol.point - 2.0).abs() <= 1e-7, || {
            format!("x0={x0}: got {}", sol.point)
        })?;
        worst_iters = worst_iters.max(sol.iterations);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let points: Vec<f64> = (0..10)
        .map(|_| solve(rng.gen_range(-1000.0..1000.0)).map(|s| s.point))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let spread = points
        .iter()
        .fold(0.0f64, |m, p| m.max((p - points[0]).abs()));
    ensure(spread <= 1e-6, || {
        format!("random starts spread {spread:e}")
    })?;

    let samples: Vec<(f64, f64)> = (0..1000)
        .map(|_| (rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0)))
        .collect();
    let halving = ContractionProblem::new(&metric, s.clone(), affine, 0.5, 0.0, 1e-8, 60).unwrap();
    let report = halving.verify_contraction(&samples).unwrap();
    ensure(report.passed(), || {
        format!("halving flagged: {:?}", report.violations.first())
    })?;
    let identity = ContractionProblem::new(&metric, s, |x: &f64| *x, 0.5, 0.0, 1e-8, 60).unwrap();
    let report = identity.verify_contraction(&samples).unwrap();
    ensure(!report.passed(), || {
        "identity accepted as a contraction".into()
    })?;
    Ok(format!(
        "x* = 2 within 1e-7 in <= {worst_iters} iterations; identity rejected"
    ))
}

fn ac6() -> Check {
    // Exact symmetry on every fixture pair.
    let mut pairs_checked = 0;
    for name in [
        "orthant_3pt.json",
        "pow2m1_8pt.json",
        "table_4pt.json",
        "line_8pt.json",
        "affine_halving.json",
    ] {
        let t = fixture(name).cone_table();
        for x in 0..t.len() {
            for y in 0..t.len() {
                ensure(t.eval(&x, &x, &y) == t.eval(&y, &y, &x), || {
                    format!("{name}: asymmetric at ({x},{y})")
                })?;
                pairs_checked += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for fam in families() {
        let cone = fam.cone();
        let d = fam.dim();
        let nrays = fam.rays.len();
        let in_k = |rng: &mut ChaCha8Rng, lo: i32| {
            fam.combine(
                &(0..nrays)
                    .map(|_| rng.gen_range(lo..=20) as f64 / 4.0)
                    .collect::<Vec<_>>(),
            )
        };
        for _ in 0..1000 {
            let x = in_k(&mut rng, 0);
            let y = in_k(&mut rng, 1);
            let n = cone
                .archimedean_witness(&ev(&x), &ev(&y), 1_000_000)
                .unwrap();
            let works = |n: u64| in_interior(&fam.facets, &sub(&scale(&y, n as f64), &x));
            ensure(works(n) && (n == 1 || !works(n - 1)), || {
                format!("{}: n={n} is not minimal for x={x:?}, y={y:?}", fam.name)
            })?;
        }
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..d)
                .map(|_| rng.gen_range(-40..=40) as f64 / 4.0)
                .collect();
            let k = in_k(&mut rng, 0);
            let c = in_k(&mut rng, 1);
            // x ≼ y ≪ z ⇒ x ≪ z
            let y = add(&x, &k);
            let z = add(&y, &c);
            ensure(cone.order_rel(&ev(&x), &ev(&z)).unwrap().is_ll(), || {
                format!("{}: x<=y<<z but not x<<z at {x:?}, {y:?}, {z:?}", fam.name)
            })?;
            // x ≪ y ≼ z ⇒ x ≪ z
            let y = add(&x, &c);
            let z = add(&y, &k);
            ensure(cone.order_rel(&ev(&x), &ev(&z)).unwrap().is_ll(), || {
                format!("{}: x<<y<=z but not x<<z at {x:?}, {y:?}, {z:?}", fam.name)
            })?;
            // y interior and x ≽ y ⇒ x interior
            let yi = in_k(&mut rng, 1);
            let x2 = add(&yi, &k);
            ensure(cone.is_interior(&ev(&x2)).unwrap(), || {
                format!(
                    "{}: {x2:?} dominates interior {yi:?} but is not interior",
                    fam.name
                )
            })?;
        }
    }
    Ok(format!(
        "{pairs_checked} symmetric pairs; 3 families x (1000 witnesses, 10000 triples)"
    ))
}

fn ac7() -> Check {
    let bin = env!("CARGO_BIN_EXE_cone-smetric");
    let call = |args: &[&str]| {
        Proc::new(bin)
            .args(args)
            .output()
            .map_err(|e| format!("cannot run binary: {e}"))
    };
    let pass = fixture_path("orthant_3pt.json");
    let pass = pass.to_str().unwrap();
    let args = [
        "topology-check",
        pass,
        "--a",
        "0.5",
        "--seed",
        "42",
        "--format",
        "json",
    ];
    let report_section = |out: &std::process::Output| -> Result<String, String> {
        let doc: serde_json::Value =
            serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        Ok(doc["report"].to_string())
    };
    let first = call(&args)?;
    let second = call(&args)?;
    ensure(first.status.code() == Some(0), || {
        format!("pass fixture exited {:?}", first.status.code())
    })?;
    ensure(report_section(&first)? == report_section(&second)?, || {
        "report sections differ".into()
    })?;

    let violation = fixture_path("asymmetric_2pt.json");
    let out = call(&["check-axioms", violation.to_str().unwrap()])?;
    ensure(out.status.code() == Some(1), || {
        format!("violation fixture exited {:?}", out.status.code())
    })?;

    let malformed = fixture_path("malformed_table.json");
    let out = call(&["check-axioms", malformed.to_str().unwrap()])?;
    ensure(out.status.code() == Some(2), || {
        format!("malformed spec exited {:?}", out.status.code())
    })?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(stderr.contains("metric.values"), || {
        format!("error lacks field path: {stderr}")
    })?;
    Ok("identical JSON report sections; exit codes 0 / 1 / 2".into())
}
