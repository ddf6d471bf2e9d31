use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use smoothrig::curves::{composition_report, crossing_params, fit_curve, chebyshev_nodes, CurveError};
use smoothrig::fractal::{box_dimension_estimate, default_scales, threshold_verdict, PointCloud};
use smoothrig::geometry::random::{random_configuration, CircleConfigParams};
use smoothrig::geometry::{decompose, Decomposition, GeometryError, OvalConfiguration};
use smoothrig::poly::MultiPoly;
use smoothrig::prooftrace::{bezout_bound, domain_pigeonhole_report, PigeonholeOptions, Verdict};
use smoothrig::remez::{
    ball_grid, brudnyi_ganzburg_bound, empirical_ratio, inverse_remez, remez_bound_topological, remez_estimate_lp,
    required_oval_count, RemezError, RemezEstimate, RemezOptions,
};
use smoothrig::rigidity::{factorial, RigidityError, RigidityReport};

use crate::io;
use crate::manifest::RunManifest;
use crate::{Cli, CliError, Command};

/// Planar configurations live in `B^2`.
const PLANE: usize = 2;

fn quantity(value: f64, formula: &str) -> Value {
    json!({ "value": value, "formula": formula })
}

fn params<T: Serialize>(cli: &Cli, args: &T) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(m) = &mut v {
        m.insert("tol".into(), json!(cli.tol));
        m.insert("seed".into(), json!(cli.seed));
    }
    v
}

fn geometry_err(e: GeometryError) -> CliError {
    CliError::Validation(e.to_string())
}

fn remez_err(e: RemezError) -> CliError {
    match e {
        RemezError::SolverFailure { .. } => CliError::Solver(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

fn rigidity_err(e: RigidityError) -> CliError {
    CliError::Validation(e.to_string())
}

fn curve_err(e: CurveError) -> CliError {
    CliError::Validation(e.to_string())
}

fn wrap(manifest: RunManifest, report: Value) -> Value {
    json!({ "manifest": manifest, "report": report })
}

pub fn run(cli: &Cli) -> Result<Value, CliError> {
    match &cli.command {
        Command::Decompose(a) => {
            let mut m = RunManifest::new("decompose", params(cli, a));
            let cfg = match (&a.config, a.random) {
                (Some(path), _) => io::read_config(path, a.allow_outside_ball, &mut m)?,
                (None, Some(count)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let p = CircleConfigParams {
                        count,
                        max_depth: a.max_depth,
                        ..Default::default()
                    };
                    random_configuration(&mut rng, &p)
                }
                (None, None) => return Err(CliError::Input("either --config or --random is required".into())),
            };
            let dec = decompose(&cfg).map_err(geometry_err)?;
            if let Some(svg) = &a.svg {
                std::fs::write(svg, crate::svg::render_svg(&cfg, &dec.domains))
                    .map_err(|e| CliError::Output(format!("{}: {e}", svg.display())))?;
            }
            let mut report = decomposition_json(&cfg, &dec);
            if a.random.is_some() {
                report["ovals"] = serde_json::to_value(cfg.ovals()).expect("ovals serialize");
            }
            Ok(wrap(m, report))
        }
        Command::RemezLp(a) => {
            let mut m = RunManifest::new("remez-lp", params(cli, a));
            let z = load_samples(&a.z, a.samples_per_oval, &mut m)?;
            let n = z[0].len();
            let cands = match &a.candidates {
                Some(p) => io::read_points(p, &mut m)?,
                None => ball_grid(n, a.grid),
            };
            let opts = RemezOptions {
                tol: cli.tol,
                parallel: !a.serial,
            };
            let est = remez_estimate_lp(&z, a.degree, &cands, opts).map_err(remez_err)?;
            Ok(wrap(m, estimate_json(&est)))
        }
        Command::Bounds(a) => {
            let mut m = RunManifest::new("bounds", params(cli, a));
            let cfg = io::read_config(&a.config, a.allow_outside_ball, &mut m)?;
            let dec = decompose(&cfg).map_err(geometry_err)?;
            let (d, count) = (a.degree, cfg.len());
            let required = required_oval_count(d, PLANE);
            let remez = match remez_bound_topological(dec.mu, d, PLANE, count) {
                Ok(v) => json!({
                    "value": v,
                    "formula": "(4n/mu)^d",
                    "hypothesis": format!("{count} >= (d-1)^n + 1 = {required} disjoint ovals"),
                }),
                Err(RemezError::TooFewOvals { count, required }) => json!({
                    "value": null,
                    "formula": "(4n/mu)^d",
                    "skipped": format!("{count} ovals, at least {required} required"),
                }),
                Err(e) => return Err(remez_err(e)),
            };
            let mut rig = RigidityReport::new(d, PLANE);
            rig.add_topological(dec.mu, count).map_err(rigidity_err)?;
            let mut report = json!({
                "n": PLANE,
                "d": d,
                "oval_count": count,
                "required_oval_count": quantity(required as f64, "(d-1)^n + 1"),
                "mu": quantity(dec.mu, "min domain area"),
                "remez_topological": remez,
                "rigidity": rig,
            });
            if let Some(lambda) = a.lambda {
                let v = brudnyi_ganzburg_bound(lambda, d, PLANE).map_err(remez_err)?;
                report["brudnyi_ganzburg"] = json!({
                    "value": v,
                    "lambda": lambda,
                    "formula": "T_d((1+r)/(1-r)), r = (1-lambda)^(1/n)",
                });
            }
            Ok(wrap(m, report))
        }
        Command::Rigidity(a) => {
            let mut m = RunManifest::new("rigidity", params(cli, a));
            let cfg = io::read_config(&a.config, a.allow_outside_ball, &mut m)?;
            let dec = decompose(&cfg).map_err(geometry_err)?;
            let mut rig = RigidityReport::new(a.degree, PLANE);
            rig.add_topological(dec.mu, cfg.len()).map_err(rigidity_err)?;
            let mut report = json!({ "mu": quantity(dec.mu, "min domain area") });
            if a.lp {
                let z: Vec<Vec<f64>> = cfg
                    .sample_boundaries(a.samples_per_oval)
                    .into_iter()
                    .map(|p| p.to_vec())
                    .collect();
                let opts = RemezOptions {
                    tol: cli.tol,
                    parallel: true,
                };
                let est = remez_estimate_lp(&z, a.degree, &ball_grid(PLANE, a.grid), opts).map_err(remez_err)?;
                rig.add_from_remez(inverse_remez(&est), true).map_err(rigidity_err)?;
                report["remez_lp"] = estimate_json(&est);
            }
            report["rigidity"] = serde_json::to_value(&rig).expect("report serializes");
            Ok(wrap(m, report))
        }
        Command::Rigidity1d(a) => {
            let m = RunManifest::new("rigidity-1d", params(cli, a));
            let zeros = io::parse_list(&a.zeros, "--zeros")?;
            let mut rig = RigidityReport::new(a.degree, 1);
            rig.add_one_dimensional(&zeros, a.z0, a.fz0).map_err(rigidity_err)?;
            let d = a.degree;
            let report = json!({
                "rigidity": rig,
                "floor": quantity(factorial(d + 1) / 2f64.powi(d as i32 + 1), "(d+1)!/2^(d+1)"),
            });
            Ok(wrap(m, report))
        }
        Command::CurveCheck(a) => {
            let mut m = RunManifest::new("curve-check", params(cli, a));
            let f = io::read_poly(&a.f, &mut m)?;
            let pts = io::read_points(&a.points, &mut m)?;
            let omega = fit_curve(&pts, a.s).map_err(curve_err)?;
            let comp = composition_report(&f, &omega, a.degree, a.tgrid).map_err(curve_err)?;
            let mut report = json!({
                "curve": {
                    "components": omega.components(),
                    "s": omega.s(),
                    "nodes": chebyshev_nodes(pts.len()),
                    "node_formula": "t_j = cos((2j+1)pi/(2k))",
                },
                "composition": comp,
            });
            if let Some(path) = &a.config {
                let cfg = io::read_config(path, false, &mut m)?;
                let ts = crossing_params(&omega, &cfg, 1e-9);
                report["crossings"] = json!({
                    "count": ts.len(),
                    "params": ts,
                    "expected_at_least": pts.len(),
                });
            }
            Ok(wrap(m, report))
        }
        Command::Boxdim(a) => {
            let mut m = RunManifest::new("boxdim", params(cli, a));
            let pts = io::read_points(&a.points, &mut m)?;
            let cloud = PointCloud::new(pts).map_err(|e| CliError::Validation(e.to_string()))?;
            let scales = match &a.scales {
                Some(s) => io::parse_list(s, "--scales")?,
                None => default_scales(),
            };
            let est = box_dimension_estimate(&cloud, &scales).map_err(|e| CliError::Validation(e.to_string()))?;
            let verdict = threshold_verdict(est.slope, cloud.dim(), a.degree);
            Ok(wrap(m, json!({ "points": cloud.len(), "dimension": est, "threshold": verdict })))
        }
        Command::VerifyProof(a) => {
            let mut m = RunManifest::new("verify-proof", params(cli, a));
            let p = io::read_poly(&a.poly, &mut m)?;
            if p.nvars() != PLANE {
                return Err(CliError::Validation(format!(
                    "polynomial has {} variables, expected 2",
                    p.nvars()
                )));
            }
            if p.degree() > a.degree {
                return Err(CliError::Validation(format!(
                    "polynomial degree {} exceeds --degree {}",
                    p.degree(),
                    a.degree
                )));
            }
            let cfg = io::read_config(&a.config, a.allow_outside_ball, &mut m)?;
            let dec = decompose(&cfg).map_err(geometry_err)?;
            let opts = PigeonholeOptions {
                grid: a.grid,
                relative_eps: a.eps,
            };
            let ph = domain_pigeonhole_report(&p, &cfg, &dec.forest, &dec.domains, a.samples, opts)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let clusters = ph.critical_points.len();
            let bound = bezout_bound(a.degree);
            let verdict = if clusters <= bound {
                Verdict::Consistent
            } else {
                Verdict::Violation
            };
            let report = json!({
                "d": a.degree,
                "mu": quantity(dec.mu, "min domain area"),
                "pigeonhole": ph,
                "bezout": {
                    "clusters": clusters,
                    "bound": bound,
                    "formula": "(d-1)^2",
                    "verdict": verdict,
                    "note": (verdict == Verdict::Violation)
                        .then_some("numerical artifact: duplicated clusters or a non-isolated critical set"),
                },
                "remez_ratio": remez_ratio_json(&p, &cfg, &dec, a.degree),
            });
            Ok(wrap(m, report))
        }
    }
}

fn load_samples(path: &std::path::Path, per_oval: usize, m: &mut RunManifest) -> Result<Vec<Vec<f64>>, CliError> {
    let bytes = io::read_bytes(path, m)?;
    let is_json = path.extension().is_some_and(|e| e == "json")
        || bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{');
    if is_json {
        let cfg = io::parse_config(path, &bytes, false)?;
        Ok(cfg.sample_boundaries(per_oval).into_iter().map(|p| p.to_vec()).collect())
    } else {
        io::parse_points(path, &bytes)
    }
}

fn decomposition_json(cfg: &OvalConfiguration, dec: &Decomposition) -> Value {
    let ovals = cfg.ovals();
    let forest: Vec<Value> = dec
        .forest
        .nodes
        .iter()
        .map(|n| {
            json!({
                "id": n.id,
                "parent": n.parent.map(|p| ovals[p].id),
                "children": n.children.iter().map(|&c| ovals[c].id).collect::<Vec<_>>(),
                "depth": n.depth,
            })
        })
        .collect();
    let domains: Vec<Value> = dec
        .domains
        .iter()
        .map(|d| {
            json!({
                "outer_id": d.outer_id,
                "hole_ids": d.hole_ids,
                "area": quantity(d.area, "area(outer) - sum area(holes)"),
            })
        })
        .collect();
    json!({
        "oval_count": cfg.len(),
        "max_depth": dec.forest.max_depth(),
        "forest": forest,
        "domains": domains,
        "mu": quantity(dec.mu, "min domain area"),
    })
}

fn estimate_json(est: &RemezEstimate) -> Value {
    json!({
        "degree": est.degree,
        "nvars": est.nvars,
        "remez_constant": {
            "value": est.value,
            "infinite": est.infinite,
            "formula": "max_{x0 in candidates} max{P(x0) : |P| <= 1 on Z, deg P <= d}",
        },
        "inverse_remez": quantity(inverse_remez(est), "1/R_d(Z), 0 if infinite"),
        "witness": {
            "point": est.witness_point,
            "poly": est.witness_poly,
        },
        "diagnostics": est.diagnostics,
    })
}

/// Sampled `max_B |P| / max_Z |P|` next to `(4n/mu)^d`.
fn remez_ratio_json(p: &MultiPoly, cfg: &OvalConfiguration, dec: &Decomposition, d: usize) -> Value {
    let z: Vec<Vec<f64>> = cfg.sample_boundaries(256).into_iter().map(|q| q.to_vec()).collect();
    let ratio = empirical_ratio(p, &ball_grid(PLANE, 64), &z);
    let bound = remez_bound_topological(dec.mu, d, PLANE, cfg.len()).ok();
    json!({
        "ratio": quantity(ratio, "max_{B^2 grid} |P| / max_{256 samples per oval} |P|"),
        "bound": bound.map(|b| quantity(b, "(4n/mu)^d")),
        "within_bound": bound.map(|b| ratio <= b + 1e-6),
    })
}
