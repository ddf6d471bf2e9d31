//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use smoothrig::curves::{composition_report, ParamCurve};
use smoothrig::fractal::{box_dimension_estimate, rigidity_threshold, rigidity_threshold_check, PointCloud};
use smoothrig::geometry::random::{random_configuration, CircleConfigParams};
use smoothrig::geometry::{decompose, validate_configuration, BBox, Oval, OvalConfiguration};
use smoothrig::poly::{chebyshev_value, monomial_basis, MultiPoly};
use smoothrig::prooftrace::{
    bezout_bound, bezout_check, domain_pigeonhole_report, find_critical_points, perturb_linear, LinearForm,
    PigeonholeOptions, Verdict,
};
use smoothrig::remez::{ball_grid, empirical_ratio};
use smoothrig::rigidity::{factorial, rigidity_1d_bound};

const REMEZ_REL_TOL: f64 = 0.05;
const REMEZ_TIME_LIMIT: Duration = Duration::from_secs(30);
const AREA_REL_TOL: f64 = 1e-9;
const RATIO_SLACK: f64 = 1e-6;
const BOUNDARY_SAMPLES: usize = 256;
const CANDIDATE_GRID: usize = 64;
const RIGIDITY_SLACK: f64 = 1e-9;
const DENSE_GRID: usize = 20001;
const COMPOSITION_REL_TOL: f64 = 1e-9;
const BOXDIM_TOL: f64 = 0.1;
const CRITICAL_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_poly<R: Rng>(rng: &mut R, n: usize, d: usize) -> MultiPoly {
    let basis = monomial_basis(n, d);
    let coeffs: Vec<f64> = basis.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    MultiPoly::from_basis(n, &basis, &coeffs)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smoothrig"))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn chebyshev_remez() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let z = dir.path().join("z.csv");
    let body: String = (0..512).map(|i| format!("{}\n", -1.0 + i as f64 / 511.0)).collect();
    std::fs::write(&z, body).map_err(|e| e.to_string())?;

    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in 1..=5usize {
        let out = bin()
            .args(["remez-lp", "--degree", &d.to_string(), "--z", z.to_str().unwrap(), "--grid", "1024"])
            .output()
            .map_err(|e| e.to_string())?;
        check(out.status.success(), || format!("d={d}: exit {:?}", out.status.code()))?;
        let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        check(
            v["report"]["diagnostics"]["candidates"] == 1024 && v["report"]["diagnostics"]["z_samples"] == 512,
            || format!("d={d}: unexpected sample sizes"),
        )?;
        let got = v["report"]["remez_constant"]["value"]
            .as_f64()
            .ok_or_else(|| format!("d={d}: no finite value"))?;
        let want = chebyshev_value(d, 3.0);
        let rel = (got - want).abs() / want;
        check(rel <= REMEZ_REL_TOL, || format!("d={d}: {got} vs T_d(3) = {want}"))?;
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed();
    check(elapsed < REMEZ_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "d=1..5 max rel err {worst:.2e} (tol {REMEZ_REL_TOL}), {:.2}s (limit {}s)",
        elapsed.as_secs_f64(),
        REMEZ_TIME_LIMIT.as_secs()
    ))
}

fn domain_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let params = CircleConfigParams {
            count: rng.gen_range(1..=20),
            max_depth: 4,
            ..Default::default()
        };
        let cfg = random_configuration(&mut rng, &params);
        let dec = decompose(&cfg).map_err(|e| format!("trial {trial}: {e}"))?;
        check(dec.forest.max_depth() <= 4, || format!("trial {trial}: depth {}", dec.forest.max_depth()))?;
        check(dec.domains.len() == cfg.len(), || {
            format!("trial {trial}: {} domains for {} ovals", dec.domains.len(), cfg.len())
        })?;
        let total: f64 = dec.domains.iter().map(|d| d.area).sum();
        let roots: f64 = dec.forest.roots().map(|i| cfg.ovals()[i].area()).sum();
        let rel = (total - roots).abs() / roots;
        check(rel <= AREA_REL_TOL, || format!("trial {trial}: area rel err {rel:e}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("200 configurations, counts equal, max area rel err {worst:.1e} (tol {AREA_REL_TOL:e})"))
}

fn topological_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cands = ball_grid(2, CANDIDATE_GRID);
    let mut tightest: f64 = 0.0;
    for d in [2usize, 3] {
        let count = (d - 1).pow(2) + 1;
        for trial in 0..100 {
            let params = CircleConfigParams {
                count,
                ..Default::default()
            };
            let cfg = random_configuration(&mut rng, &params);
            let mu = decompose(&cfg).map_err(|e| e.to_string())?.mu;
            let z: Vec<Vec<f64>> = cfg
                .sample_boundaries(BOUNDARY_SAMPLES)
                .into_iter()
                .map(|p| p.to_vec())
                .collect();
            let p = random_poly(&mut rng, 2, d);
            let ratio = empirical_ratio(&p, &cands, &z);
            let bound = (8.0 / mu).powi(d as i32);
            check(ratio <= bound + RATIO_SLACK, || {
                format!("d={d} trial {trial}: ratio {ratio} > (8/mu)^d = {bound}")
            })?;
            tightest = tightest.max(ratio / bound);
        }
    }
    Ok(format!("d in {{2,3}}, 2x100 trials, max ratio/(8/mu)^d = {tightest:.3e}"))
}

fn one_dimensional_rigidity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid: Vec<Vec<f64>> = (0..DENSE_GRID)
        .map(|i| vec![-1.0 + 2.0 * i as f64 / (DENSE_GRID - 1) as f64])
        .collect();
    let mut trials = 0;
    for d in 1..=4usize {
        for trial in 0..200 {
            let mut nodes: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            check(nodes.len() == d + 1, || "repeated random node".into())?;
            let raw = nodes
                .iter()
                .fold(MultiPoly::constant(1, 1.0), |acc, &x| &acc * &MultiPoly::univariate(&[-x, 1.0]));
            let (imax, vmax) = grid
                .iter()
                .enumerate()
                .map(|(i, x)| (i, raw.eval_unchecked(x).abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            let f = raw.scale(1.0 / vmax);
            let z0 = grid[imax][0];
            let fz0 = f.eval_unchecked(&[z0]);
            let bound = rigidity_1d_bound(&nodes, z0, fz0, d).map_err(|e| format!("d={d} trial {trial}: {e}"))?;
            let exact = f
                .derivative_norm_max(d + 1, grid.iter().map(|x| x.as_slice()))
                .map_err(|e| e.to_string())?
                .value;
            check(bound <= exact + RIGIDITY_SLACK, || {
                format!("d={d} trial {trial}: bound {bound} > max|f^(d+1)| {exact}")
            })?;
            let floor = factorial(d + 1) / 2f64.powi(d as i32 + 1);
            check(bound >= floor, || format!("d={d} trial {trial}: bound {bound} < floor {floor}"))?;
            trials += 1;
        }
    }
    Ok(format!("{trials} trials, d=1..4, bound <= max|f^(d+1)| + {RIGIDITY_SLACK:e}, bound >= (d+1)!/2^(d+1)"))
}

fn random_curve<R: Rng>(rng: &mut R, s: usize) -> ParamCurve {
    loop {
        let comps: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..=s).map(|_| rng.gen_range(-0.4..0.4)).collect())
            .collect();
        if let Ok(c) = ParamCurve::new(comps, s) {
            return c;
        }
    }
}

fn composition_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut nondegenerate = 0;
    for trial in 0..100 {
        let df = rng.gen_range(1..=4usize);
        let s = rng.gen_range(1..=3usize);
        let f = random_poly(&mut rng, 2, df);
        let omega = random_curve(&mut rng, s);
        let g = f.compose(&omega.as_polys()).map_err(|e| e.to_string())?;
        check(g.degree() <= s * f.degree(), || {
            format!("trial {trial}: deg g {} > s deg f {}", g.degree(), s * f.degree())
        })?;
        for i in 0..100 {
            let t = -1.0 + 2.0 * i as f64 / 99.0;
            let symbolic = g.eval_unchecked(&[t]);
            let numeric = f.eval_unchecked(&omega.eval(t));
            let rel = (symbolic - numeric).abs() / numeric.abs();
            check(rel <= COMPOSITION_REL_TOL, || {
                format!("trial {trial} t={t}: {symbolic} vs {numeric}, rel err {rel:e}")
            })?;
            worst = worst.max(rel);
        }
        let d = rng.gen_range(0..=df * s);
        let r = composition_report(&f, &omega, d, 128).map_err(|e| e.to_string())?;
        if !r.all_degenerate {
            nondegenerate += 1;
            let c = r.c_hat.unwrap_or(0.0);
            check(c > 0.0, || format!("trial {trial}: c_hat = {c}"))?;
        }
    }
    Ok(format!(
        "100 pairs, max rel err {worst:.1e} (tol {COMPOSITION_REL_TOL:e}), c_hat > 0 in all {nondegenerate} non-degenerate reports"
    ))
}

fn box_dimension() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let square = PointCloud::new((0..200_000).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect())
        .map_err(|e| e.to_string())?;
    let dyadic: Vec<f64> = (3..=6).map(|k| 0.5f64.powi(k)).collect();
    let sq = box_dimension_estimate(&square, &dyadic).map_err(|e| e.to_string())?.slope;
    check((sq - 2.0).abs() <= BOXDIM_TOL, || format!("square slope {sq}"))?;

    let segment = PointCloud::new(
        (0..50_000)
            .map(|_| {
                let t: f64 = rng.gen();
                vec![-0.6 + 1.1 * t, 0.3 - 0.7 * t]
            })
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let seg_scales: Vec<f64> = (3..=8).map(|k| 0.5f64.powi(k)).collect();
    let sg = box_dimension_estimate(&segment, &seg_scales).map_err(|e| e.to_string())?.slope;
    check((sg - 1.0).abs() <= BOXDIM_TOL, || format!("segment slope {sg}"))?;

    let few = PointCloud::new((0..50).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect())
        .map_err(|e| e.to_string())?;
    let fine: Vec<f64> = (14..=20).map(|k| 0.5f64.powi(k)).collect();
    let fw = box_dimension_estimate(&few, &fine).map_err(|e| e.to_string())?.slope;
    check(fw <= BOXDIM_TOL, || format!("50-point slope {fw}"))?;

    let mut verdicts = 0;
    for n in 1..=3usize {
        for d in 0..=9usize {
            let th = n as f64 - 1.0 / (d as f64 + 1.0);
            check(rigidity_threshold(n, d) == th, || format!("threshold n={n} d={d}"))?;
            for beta in [th - 1e-9, th, th + 1e-9, th - 0.3, th + 0.3] {
                check(rigidity_threshold_check(beta, n, d) == (beta > th), || {
                    format!("verdict n={n} d={d} beta={beta}")
                })?;
                verdicts += 1;
            }
        }
    }
    Ok(format!(
        "square {sq:.3}, segment {sg:.3}, 50 points {fw:.3} (tol {BOXDIM_TOL}), {verdicts} threshold verdicts exact"
    ))
}

fn circle(id: i64, c: [f64; 2], r: f64) -> Oval {
    Oval::regular(id, c, r, 96, 0.0)
}

fn rho2(c: [f64; 2]) -> MultiPoly {
    let x = &MultiPoly::var(2, 0) - &MultiPoly::constant(2, c[0]);
    let y = &MultiPoly::var(2, 1) - &MultiPoly::constant(2, c[1]);
    &(&x * &x) + &(&y * &y)
}

/// Configurations with products of `r^2 - |x - c|^2` vanishing on every circle.
fn pigeonhole_fixtures() -> Vec<(&'static str, OvalConfiguration, MultiPoly)> {
    let k = |v: f64| MultiPoly::constant(2, v);
    let o = [0.0, 0.0];
    let ring = validate_configuration(vec![circle(1, o, 0.9), circle(2, o, 0.4)]).unwrap();
    let ring_p = &(&k(0.81) - &rho2(o)) * &(&rho2(o) - &k(0.16));

    let bands = validate_configuration(vec![circle(1, o, 0.9), circle(2, o, 0.6), circle(3, o, 0.3)]).unwrap();
    let bands_p = &(&(&k(0.81) - &rho2(o)) * &(&rho2(o) - &k(0.36))) * &(&k(0.09) - &rho2(o));

    let (c1, c2) = ([-0.4, 0.1], [0.4, -0.1]);
    let twins = validate_configuration(vec![circle(1, o, 0.95), circle(2, c1, 0.3), circle(3, c2, 0.25)]).unwrap();
    let twins_p = &(&(&k(0.9025) - &rho2(o)) * &(&rho2(c1) - &k(0.09))) * &(&rho2(c2) - &k(0.0625));
    vec![("ring", ring, ring_p), ("bands", bands, bands_p), ("twins", twins, twins_p)]
}

fn proof_trace() -> Outcome {
    let p9 = MultiPoly::from_terms(
        2,
        [
            (vec![4, 0], 1.0),
            (vec![2, 0], -2.0),
            (vec![0, 4], 1.0),
            (vec![0, 2], -2.0),
            (vec![0, 0], 2.0),
        ],
    )
    .unwrap();
    let bbox = BBox {
        min: [-1.25, -1.25],
        max: [1.25, 1.25],
    };
    let set = find_critical_points(&p9, bbox, 64).map_err(|e| e.to_string())?;
    check(set.cluster_count() == 9, || format!("{} clusters for 9 critical points", set.cluster_count()))?;
    let mut worst: f64 = 0.0;
    for x in [-1.0, 0.0, 1.0] {
        for y in [-1.0f64, 0.0, 1.0] {
            let dist = set
                .points
                .iter()
                .map(|c| (c.point[0] - x).hypot(c.point[1] - y))
                .fold(f64::INFINITY, f64::min);
            check(dist <= CRITICAL_TOL, || format!("({x},{y}) missed by {dist:e}"))?;
            worst = worst.max(dist);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let unit = BBox {
        min: [-1.0, -1.0],
        max: [1.0, 1.0],
    };
    let mut most = 0;
    for trial in 0..500 {
        let d = rng.gen_range(2..=5usize);
        let p = random_poly(&mut rng, 2, d);
        let q = perturb_linear(&p, LinearForm::default_for(&p, 1e-6)).map_err(|e| e.to_string())?;
        let cps = find_critical_points(&q, unit, 24).map_err(|e| e.to_string())?;
        let r = bezout_check(&cps, d);
        check(r.verdict == Verdict::Consistent, || {
            format!("trial {trial}: {} clusters > {}", r.clusters, bezout_bound(d))
        })?;
        most = most.max(r.clusters);
    }

    let opts = PigeonholeOptions {
        grid: 64,
        relative_eps: 1e-6,
    };
    let mut flagged = 0;
    for (name, cfg, p) in pigeonhole_fixtures() {
        let dec = decompose(&cfg).map_err(|e| e.to_string())?;
        let r = domain_pigeonhole_report(&p, &cfg, &dec.forest, &dec.domains, 128, opts).map_err(|e| e.to_string())?;
        for t in &r.domains {
            if t.interior_exceeds_boundary {
                flagged += 1;
                check(t.has_critical_point, || format!("{name}: domain {} flagged without critical point", t.outer_id))?;
            }
        }
        check(r.confinement_ok, || format!("{name}: high critical point outside a unique domain"))?;
    }
    check(flagged > 0, || "no domain flagged on the fixtures".into())?;
    Ok(format!(
        "9/9 points within {worst:.1e} (tol {CRITICAL_TOL:e}); 500 perturbed trials, max {most} clusters, never above (d-1)^2; {flagged} flagged domains all hold a critical point"
    ))
}

fn strip_timestamp(mut v: Value) -> Value {
    if let Some(m) = v.get_mut("manifest").and_then(Value::as_object_mut) {
        m.remove("timestamp");
    }
    v
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let svg = dir.path().join("d.svg");
    let runs: Vec<Vec<String>> = [
        vec!["decompose", "--config", &fixture("annulus.json"), "--svg", svg.to_str().unwrap()],
        vec!["decompose", "--random", "12", "--seed", "9"],
        vec!["remez-lp", "--degree", "3", "--z", &fixture("halfline.csv"), "--grid", "256"],
        vec!["remez-lp", "--degree", "2", "--z", &fixture("ring.json"), "--grid", "24", "--samples-per-oval", "64"],
        vec!["bounds", "--config", &fixture("annulus.json"), "--degree", "2", "--lambda", "0.25"],
        vec!["rigidity", "--config", &fixture("ring.json"), "--degree", "2", "--lp", "--grid", "16"],
        vec!["rigidity-1d", "--zeros", "-0.7,0.1,0.5", "--z0", "-0.2", "--fz0", "1", "--degree", "2"],
        vec![
            "curve-check", "--f", &fixture("paraboloid.json"), "--points", &fixture("ring_points.csv"), "--s", "3",
            "--degree", "3", "--tgrid", "512", "--config", &fixture("ring.json"),
        ],
        vec!["boxdim", "--points", &fixture("square_points.csv"), "--degree", "2"],
        vec!["verify-proof", "--poly", &fixture("ring_poly.json"), "--config", &fixture("ring.json"), "--degree", "4"],
    ]
    .iter()
    .map(|r| r.iter().map(|s| s.to_string()).collect())
    .collect();

    let mut names = std::collections::BTreeSet::new();
    for args in &runs {
        let mut bodies = Vec::new();
        for _ in 0..2 {
            let out = bin().args(args).output().map_err(|e| e.to_string())?;
            check(out.status.success(), || {
                format!("{}: {}", args[0], String::from_utf8_lossy(&out.stderr))
            })?;
            let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
            bodies.push(serde_json::to_string(&strip_timestamp(v)).unwrap());
        }
        check(bodies[0] == bodies[1], || format!("{} differs between runs", args[0]))?;
        names.insert(args[0].clone());
    }
    check(names.len() == 8, || format!("only {} subcommands exercised", names.len()))?;
    Ok(format!("{} runs over all 8 subcommands, bodies identical modulo timestamp", runs.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("chebyshev-remez oracle", chebyshev_remez),
        ("domain count and area identity", domain_identity),
        ("topological Remez inequality", topological_inequality),
        ("1D rigidity soundness", one_dimensional_rigidity),
        ("composition exactness", composition_exactness),
        ("box dimension", box_dimension),
        ("proof trace", proof_trace),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
