//! Numerical trace of the critical-point counting argument on concrete
//! bivariate polynomials: per-domain maxima, critical points of a linearly
//! perturbed polynomial, and the `(d-1)^2` Bezout count.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{BBox, Domain, NestingForest, OvalConfiguration, Point};
use crate::poly::univariate;
use crate::poly::MultiPoly;

pub const MERGE_RADIUS: f64 = 1e-6;
pub const DEFAULT_GRID: usize = 64;
pub const DEFAULT_RELATIVE_EPS: f64 = 1e-6;
const MAX_NEWTON_STEPS: usize = 60;
const POLISH_STEPS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("polynomial must have 2 variables, has {0}")]
    NotBivariate(usize),
    #[error("critical points need degree at least 1")]
    DegreeTooLow,
    #[error("perturbation size must be positive, got {0}")]
    NonPositiveEps(f64),
    #[error("perturbation direction ({0}, {1}) is not a unit vector")]
    NotUnitDirection(f64, f64),
    #[error("grid must have at least one seed per axis")]
    EmptyGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Minimum,
    Maximum,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub point: Point,
    pub value: f64,
    pub grad_norm: f64,
    pub hessian_det: f64,
    pub kind: CriticalKind,
    /// Seeds that converged into this cluster.
    pub cluster_size: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchDiagnostics {
    pub seeds: usize,
    pub converged: usize,
    pub no_convergence: usize,
    pub outside_box: usize,
}

/// One representative per cluster; representatives are pairwise more than
/// [`MERGE_RADIUS`] apart.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalPointSet {
    pub points: Vec<CriticalPoint>,
    pub merge_radius: f64,
    pub diagnostics: SearchDiagnostics,
}

impl CriticalPointSet {
    pub fn cluster_count(&self) -> usize {
        self.points.len()
    }
}

struct Derivs {
    p: MultiPoly,
    gx: MultiPoly,
    gy: MultiPoly,
    hxx: MultiPoly,
    hxy: MultiPoly,
    hyy: MultiPoly,
}

impl Derivs {
    fn new(p: &MultiPoly) -> Self {
        let gx = p.partial_derivative(0);
        let gy = p.partial_derivative(1);
        Derivs {
            p: p.clone(),
            hxx: gx.partial_derivative(0),
            hxy: gx.partial_derivative(1),
            hyy: gy.partial_derivative(1),
            gx,
            gy,
        }
    }

    fn grad(&self, x: &[f64]) -> [f64; 2] {
        [self.gx.eval_unchecked(x), self.gy.eval_unchecked(x)]
    }

    fn hess(&self, x: &[f64]) -> [f64; 3] {
        [
            self.hxx.eval_unchecked(x),
            self.hxy.eval_unchecked(x),
            self.hyy.eval_unchecked(x),
        ]
    }

    fn newton_step(&self, x: &[f64; 2]) -> Option<[f64; 2]> {
        let g = self.grad(x);
        let [a, b, c] = self.hess(x);
        let det = a * c - b * b;
        let scale = (a.abs() + b.abs() + c.abs()).powi(2);
        if det == 0.0 || det.abs() <= 1e-300 || det.abs() <= 1e-28 * scale {
            return None;
        }
        Some([(c * g[0] - b * g[1]) / det, (a * g[1] - b * g[0]) / det])
    }
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Newton iteration on the gradient from one seed.
fn refine(dv: &Derivs, seed: [f64; 2], tol: f64, reach: f64) -> Option<[f64; 2]> {
    let mut x = seed;
    let mut converged_at = None;
    for it in 0..MAX_NEWTON_STEPS {
        let step = dv.newton_step(&x)?;
        x = [x[0] - step[0], x[1] - step[1]];
        if !(x[0].is_finite() && x[1].is_finite()) || norm2([x[0] - seed[0], x[1] - seed[1]]) > reach {
            return None;
        }
        if norm2(dv.grad(&x)) <= tol {
            converged_at = Some(it);
            break;
        }
    }
    converged_at?;
    // a few more steps; a genuine simple zero makes them vanish
    let mut last = f64::INFINITY;
    for _ in 0..POLISH_STEPS {
        let Some(step) = dv.newton_step(&x) else { break };
        last = norm2(step);
        x = [x[0] - step[0], x[1] - step[1]];
        if last <= 1e-15 * (1.0 + norm2(x)) {
            break;
        }
    }
    let accept = last <= 1e-10 * (1.0 + norm2(x)) && norm2(dv.grad(&x)) <= tol;
    accept.then_some(x)
}

/// Gradient zeros of `p` inside `bbox`, seeded from a `grid × grid` lattice.
///
/// Seeds that fail to converge are dropped and counted in the diagnostics.
/// Degenerate critical sets (curves of critical points) typically produce
/// no converged seeds at all, since Newton's Hessian is singular there.
pub fn find_critical_points(p: &MultiPoly, bbox: BBox, grid: usize) -> Result<CriticalPointSet, TraceError> {
    if p.nvars() != 2 {
        return Err(TraceError::NotBivariate(p.nvars()));
    }
    if p.degree() < 1 {
        return Err(TraceError::DegreeTooLow);
    }
    if grid == 0 {
        return Err(TraceError::EmptyGrid);
    }
    let dv = Derivs::new(p);
    let tol = 1e-10 * (1.0 + p.coef_max_norm());
    let w = [bbox.max[0] - bbox.min[0], bbox.max[1] - bbox.min[1]];
    let reach = 4.0 * norm2(w).max(1e-12);
    let seeds: Vec<[f64; 2]> = (0..grid)
        .flat_map(|i| {
            (0..grid).map(move |j| {
                [
                    bbox.min[0] + w[0] * (i as f64 + 0.5) / grid as f64,
                    bbox.min[1] + w[1] * (j as f64 + 0.5) / grid as f64,
                ]
            })
        })
        .collect();
    let results: Vec<Option<[f64; 2]>> = seeds.par_iter().map(|&s| refine(&dv, s, tol, reach)).collect();

    let slack = 1e-9 * (1.0 + norm2(w));
    let mut diagnostics = SearchDiagnostics {
        seeds: seeds.len(),
        ..Default::default()
    };
    let mut reps: Vec<([f64; 2], usize)> = Vec::new();
    for r in results {
        let Some(x) = r else {
            diagnostics.no_convergence += 1;
            continue;
        };
        diagnostics.converged += 1;
        let inside = x[0] >= bbox.min[0] - slack
            && x[0] <= bbox.max[0] + slack
            && x[1] >= bbox.min[1] - slack
            && x[1] <= bbox.max[1] + slack;
        if !inside {
            diagnostics.outside_box += 1;
            continue;
        }
        match reps.iter_mut().find(|(c, _)| norm2([c[0] - x[0], c[1] - x[1]]) <= MERGE_RADIUS) {
            Some(rep) => rep.1 += 1,
            None => reps.push((x, 1)),
        }
    }
    let points = reps
        .into_iter()
        .map(|(x, cluster_size)| {
            let [a, b, c] = dv.hess(&x);
            let det = a * c - b * b;
            let kind = if det.abs() <= 1e-12 * (a.abs() + b.abs() + c.abs()).powi(2) {
                CriticalKind::Degenerate
            } else if det < 0.0 {
                CriticalKind::Saddle
            } else if a > 0.0 {
                CriticalKind::Minimum
            } else {
                CriticalKind::Maximum
            };
            CriticalPoint {
                point: x,
                value: dv.p.eval_unchecked(&x),
                grad_norm: norm2(dv.grad(&x)),
                hessian_det: det,
                kind,
                cluster_size,
            }
        })
        .collect();
    Ok(CriticalPointSet {
        points,
        merge_radius: MERGE_RADIUS,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearForm {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
}

impl LinearForm {
    /// Direction `(1, φ)/|(1, φ)|` with `φ` the golden ratio, size
    /// `rel · max|coef|`.
    pub fn default_for(p: &MultiPoly, rel: f64) -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let n = 1f64.hypot(phi);
        LinearForm {
            a: 1.0 / n,
            b: phi / n,
            eps: rel * p.coef_max_norm().max(f64::MIN_POSITIVE),
        }
    }
}

/// `p + eps (a x + b y)`.
pub fn perturb_linear(p: &MultiPoly, xi: LinearForm) -> Result<MultiPoly, TraceError> {
    if p.nvars() != 2 {
        return Err(TraceError::NotBivariate(p.nvars()));
    }
    if !(xi.eps > 0.0) {
        return Err(TraceError::NonPositiveEps(xi.eps));
    }
    if ((xi.a * xi.a + xi.b * xi.b).sqrt() - 1.0).abs() > 1e-12 {
        return Err(TraceError::NotUnitDirection(xi.a, xi.b));
    }
    let lin = &MultiPoly::var(2, 0).scale(xi.eps * xi.a) + &MultiPoly::var(2, 1).scale(xi.eps * xi.b);
    Ok(p + &lin)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    /// More clusters than a degree-`d` polynomial can have isolated critical
    /// points: always a numerical artifact (split clusters or a sampled
    /// curve of critical points), never a counterexample.
    Violation,
}

#[derive(Debug, Clone, Serialize)]
pub struct BezoutReport {
    pub clusters: usize,
    pub bound: usize,
    pub formula: &'static str,
    pub verdict: Verdict,
    pub note: Option<&'static str>,
}

pub fn bezout_bound(d: usize) -> usize {
    d.saturating_sub(1).pow(2)
}

pub fn bezout_check(cps: &CriticalPointSet, d: usize) -> BezoutReport {
    let bound = bezout_bound(d);
    let clusters = cps.cluster_count();
    let verdict = if clusters <= bound {
        Verdict::Consistent
    } else {
        Verdict::Violation
    };
    BezoutReport {
        clusters,
        bound,
        formula: "(d-1)^2",
        verdict,
        note: (verdict == Verdict::Violation)
            .then_some("numerical artifact: duplicated clusters or a non-isolated critical set"),
    }
}

/// Exact `max |p|` over a polygonal boundary, edge by edge.
pub fn polygon_max_abs(p: &MultiPoly, vertices: &[Point]) -> f64 {
    let k = vertices.len();
    (0..k)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % k]);
            let line = [
                MultiPoly::univariate(&[a[0], b[0] - a[0]]),
                MultiPoly::univariate(&[a[1], b[1] - a[1]]),
            ];
            let c = p.compose(&line).expect("bivariate").univariate_coeffs();
            univariate::max_abs_on(&c, 0.0, 1.0).1
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PigeonholeOptions {
    pub grid: usize,
    pub relative_eps: f64,
}

impl Default for PigeonholeOptions {
    fn default() -> Self {
        PigeonholeOptions {
            grid: DEFAULT_GRID,
            relative_eps: DEFAULT_RELATIVE_EPS,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainTrace {
    pub domain: usize,
    pub outer_id: i64,
    pub boundary_max: f64,
    pub interior_max: f64,
    pub interior_points: usize,
    pub interior_exceeds_boundary: bool,
    /// Indices into [`PigeonholeReport::critical_points`].
    pub critical_points: Vec<usize>,
    pub has_critical_point: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocatedCritical {
    pub point: Point,
    pub value: f64,
    pub kind: CriticalKind,
    pub domain: Option<usize>,
    /// Number of domains containing the point; 0 or 1 for disjoint domains.
    pub containing_domains: usize,
    /// `|value|` exceeds the largest boundary maximum.
    pub high: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PigeonholeReport {
    pub samples: usize,
    pub perturbation: LinearForm,
    pub boundary_max_formula: &'static str,
    pub boundary_max_global: f64,
    pub domains: Vec<DomainTrace>,
    pub critical_points: Vec<LocatedCritical>,
    pub search: SearchDiagnostics,
    /// Every high critical point lies in exactly one domain.
    pub confinement_ok: bool,
    /// Flagged domains without any located critical point.
    pub flagged_without_critical: Vec<usize>,
}

/// Per-domain comparison of boundary and interior maxima of `|p|`, with the
/// critical points of the perturbed polynomial assigned to domains.
///
/// Boundary maxima are exact over the polygon edges. Interior maxima use
/// the lattice with `samples` intervals per axis over the outer oval's
/// bounding box, so doubling `samples` refines the lattice and never
/// lowers them.
pub fn domain_pigeonhole_report(
    p: &MultiPoly,
    config: &OvalConfiguration,
    forest: &NestingForest,
    domains: &[Domain],
    samples: usize,
    opts: PigeonholeOptions,
) -> Result<PigeonholeReport, TraceError> {
    if p.nvars() != 2 {
        return Err(TraceError::NotBivariate(p.nvars()));
    }
    let ovals = config.ovals();
    let samples = samples.max(1);
    let oval_max: Vec<f64> = ovals.par_iter().map(|o| polygon_max_abs(p, &o.vertices)).collect();
    let boundary_max_global = oval_max.iter().copied().fold(0.0, f64::max);

    let xi = LinearForm::default_for(p, opts.relative_eps);
    let pt = perturb_linear(p, xi)?;
    let (cps, search) = match (config.bbox(), pt.degree() >= 1) {
        (Some(bb), true) => {
            let set = find_critical_points(&pt, bb, opts.grid)?;
            (set.points, set.diagnostics)
        }
        _ => (Vec::new(), SearchDiagnostics::default()),
    };

    let critical_points: Vec<LocatedCritical> = cps
        .iter()
        .map(|c| {
            let containing = domains.iter().filter(|d| d.contains_point(config, c.point)).count();
            LocatedCritical {
                point: c.point,
                value: c.value,
                kind: c.kind,
                domain: crate::geometry::locate_domain(config, forest, c.point),
                containing_domains: containing,
                high: c.value.abs() > boundary_max_global,
            }
        })
        .collect();

    let domain_traces: Vec<DomainTrace> = domains
        .par_iter()
        .enumerate()
        .map(|(j, d)| {
            let boundary_max = std::iter::once(d.outer)
                .chain(d.holes.iter().copied())
                .map(|i| oval_max[i])
                .fold(0.0, f64::max);
            let bb = ovals[d.outer].bbox();
            let h = [
                (bb.max[0] - bb.min[0]) / samples as f64,
                (bb.max[1] - bb.min[1]) / samples as f64,
            ];
            let mut interior_max: f64 = 0.0;
            let mut interior_points = 0;
            for i in 0..=samples {
                for k in 0..=samples {
                    let q = [bb.min[0] + i as f64 * h[0], bb.min[1] + k as f64 * h[1]];
                    if d.contains_point(config, q) {
                        interior_points += 1;
                        interior_max = interior_max.max(p.eval_unchecked(&q).abs());
                    }
                }
            }
            let critical: Vec<usize> = critical_points
                .iter()
                .enumerate()
                .filter(|(_, c)| c.domain == Some(j))
                .map(|(i, _)| i)
                .collect();
            DomainTrace {
                domain: j,
                outer_id: d.outer_id,
                boundary_max,
                interior_max,
                interior_points,
                interior_exceeds_boundary: interior_max > boundary_max,
                has_critical_point: !critical.is_empty(),
                critical_points: critical,
            }
        })
        .collect();

    let confinement_ok = critical_points.iter().filter(|c| c.high).all(|c| c.containing_domains == 1);
    let flagged_without_critical = domain_traces
        .iter()
        .filter(|t| t.interior_exceeds_boundary && !t.has_critical_point)
        .map(|t| t.domain)
        .collect();
    Ok(PigeonholeReport {
        samples,
        perturbation: xi,
        boundary_max_formula: "max over polygon edges of |p|, exact per edge",
        boundary_max_global,
        domains: domain_traces,
        critical_points,
        search,
        confinement_ok,
        flagged_without_critical,
    })
}
