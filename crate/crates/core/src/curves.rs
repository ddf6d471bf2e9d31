//! Polynomial test curves `ω: [-1, 1] → B^n` and the composition inequality
//! `Σ_{k ≥ ⌈(d+1)/s⌉} Σ_{|α|=k} |f^{(α)}(ω(t))| ≥ C · |g^{(d+1)}(t)|`, `g = f∘ω`.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{OvalConfiguration, Point};
use crate::poly::univariate;
use crate::poly::{MultiPoly, PolyError};

/// Parameter grid used to check that a curve stays in the unit ball.
pub const BALL_CHECK_GRID: usize = 1000;

/// `|g^{(d+1)}(t)|` at or below this counts as degenerate.
pub const RHS_DEGENERATE: f64 = 1e-12;

/// Polyline resolution used by [`crossing_count`].
pub const CROSSING_SEGMENTS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("{k} points cannot be interpolated by a curve of degree {s}")]
    TooManyPoints { k: usize, s: usize },
    #[error("curve leaves the unit ball at t = {t}")]
    ImageLeavesBall { t: f64 },
    #[error("degree bound s must be at least 1")]
    ZeroDegree,
    #[error("component {index} has degree {degree} > {s}")]
    ComponentDegree { index: usize, degree: usize, s: usize },
    #[error("no points or components given")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("tgrid must be at least 2")]
    GridTooSmall,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Polynomial curve on `[-1, 1]`; `components[i]` holds the ascending
/// coefficients of `ω_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamCurve {
    components: Vec<Vec<f64>>,
    s: usize,
}

fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    if c.is_empty() {
        c.push(0.0);
    }
    c
}

impl ParamCurve {
    pub fn new(components: Vec<Vec<f64>>, s: usize) -> Result<Self, CurveError> {
        if s == 0 {
            return Err(CurveError::ZeroDegree);
        }
        if components.is_empty() {
            return Err(CurveError::Empty);
        }
        let components: Vec<Vec<f64>> = components.into_iter().map(trim).collect();
        for (index, c) in components.iter().enumerate() {
            if c.len() - 1 > s {
                return Err(CurveError::ComponentDegree {
                    index,
                    degree: c.len() - 1,
                    s,
                });
            }
        }
        let curve = ParamCurve { components, s };
        for i in 0..BALL_CHECK_GRID {
            let t = -1.0 + 2.0 * i as f64 / (BALL_CHECK_GRID - 1) as f64;
            let r2: f64 = curve.eval(t).iter().map(|x| x * x).sum();
            if r2.sqrt() > 1.0 + 1e-12 {
                return Err(CurveError::ImageLeavesBall { t });
            }
        }
        Ok(curve)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.components.iter().map(|c| univariate::horner(c, t)).collect()
    }

    pub fn as_polys(&self) -> Vec<MultiPoly> {
        self.components.iter().map(|c| MultiPoly::univariate(c)).collect()
    }
}

/// Chebyshev nodes `cos((2j+1)π/(2k))`, `j = 0..k`.
pub fn chebyshev_nodes(k: usize) -> Vec<f64> {
    (0..k)
        .map(|j| ((2 * j + 1) as f64 * std::f64::consts::PI / (2 * k) as f64).cos())
        .collect()
}

/// Monomial coefficients of the interpolant through `(ts[j], ys[j])`.
fn interpolate(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let k = ts.len();
    let mut dd = ys.to_vec();
    for level in 1..k {
        for i in (level..k).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (ts[i] - ts[i - level]);
        }
    }
    // Newton form to monomials by nested multiplication
    let mut c = vec![dd[k - 1]];
    for i in (0..k - 1).rev() {
        c = univariate::mul(&c, &[-ts[i], 1.0]);
        c[0] += dd[i];
    }
    c
}

/// Curve of degree at most `s` with `ω(t_j) = points[j]` at the Chebyshev
/// nodes `t_j`, taken in order.
pub fn fit_curve(points: &[Vec<f64>], s: usize) -> Result<ParamCurve, CurveError> {
    if s == 0 {
        return Err(CurveError::ZeroDegree);
    }
    let k = points.len();
    if k == 0 {
        return Err(CurveError::Empty);
    }
    if k > s + 1 {
        return Err(CurveError::TooManyPoints { k, s });
    }
    let n = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(CurveError::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    let ts = chebyshev_nodes(k);
    let components = (0..n)
        .map(|i| {
            let ys: Vec<f64> = points.iter().map(|p| p[i]).collect();
            interpolate(&ts, &ys)
        })
        .collect();
    ParamCurve::new(components, s)
}

/// Smallest derivative order entering the left-hand side of the composition
/// inequality: `⌈(d+1)/s⌉`.
pub fn lowest_order(d: usize, s: usize) -> usize {
    (d + 1).div_ceil(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct CompositionSample {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompositionReport {
    pub d: usize,
    pub s: usize,
    pub lowest_order: usize,
    pub lhs_formula: &'static str,
    pub rhs_formula: &'static str,
    /// Coefficients of `g = f∘ω`, ascending.
    pub g: Vec<f64>,
    pub samples: Vec<CompositionSample>,
    /// `min LHS/RHS` over samples with `RHS > 1e-12`: an empirical lower
    /// estimate of the constant, not the constant itself.
    pub c_hat: Option<f64>,
    pub c_hat_formula: &'static str,
    pub all_degenerate: bool,
    /// Every sample with `RHS > 0` also has `LHS > 0`.
    pub positivity_holds: bool,
    pub max_lhs: f64,
    pub max_rhs: f64,
}

pub fn composition_report(
    f: &MultiPoly,
    omega: &ParamCurve,
    d: usize,
    tgrid: usize,
) -> Result<CompositionReport, CurveError> {
    if f.nvars() != omega.dim() {
        return Err(CurveError::DimensionMismatch {
            expected: f.nvars(),
            got: omega.dim(),
        });
    }
    if tgrid < 2 {
        return Err(CurveError::GridTooSmall);
    }
    let s = omega.s();
    let g = f.compose(&omega.as_polys())?.univariate_coeffs();
    let mut gd = g.clone();
    for _ in 0..=d {
        gd = univariate::derivative(&gd);
    }
    let lo = lowest_order(d, s);
    let ders: Vec<MultiPoly> = (lo..=d + 1).flat_map(|k| f.derivatives_of_order(k)).collect();

    let samples: Vec<CompositionSample> = (0..tgrid)
        .map(|i| {
            let t = -1.0 + 2.0 * i as f64 / (tgrid - 1) as f64;
            let x = omega.eval(t);
            let lhs = ders.iter().map(|q| q.eval_unchecked(&x).abs()).sum();
            let rhs = univariate::horner(&gd, t).abs();
            CompositionSample { t, lhs, rhs }
        })
        .collect();

    let c_hat = samples
        .iter()
        .filter(|p| p.rhs > RHS_DEGENERATE)
        .map(|p| p.lhs / p.rhs)
        .min_by(f64::total_cmp);
    let positivity_holds = samples.iter().all(|p| p.rhs <= 0.0 || p.lhs > 0.0);
    let max_lhs = samples.iter().map(|p| p.lhs).fold(0.0, f64::max);
    let max_rhs = samples.iter().map(|p| p.rhs).fold(0.0, f64::max);
    Ok(CompositionReport {
        d,
        s,
        lowest_order: lo,
        lhs_formula: "sum_{k=ceil((d+1)/s)}^{d+1} sum_{|alpha|=k} |f^(alpha)(omega(t))|",
        rhs_formula: "|g^(d+1)(t)|, g = f o omega",
        g,
        samples,
        all_degenerate: c_hat.is_none(),
        c_hat,
        c_hat_formula: "min_t LHS(t)/RHS(t) over RHS(t) > 1e-12",
        positivity_holds,
        max_lhs,
        max_rhs,
    })
}

/// Parameter of the intersection of segments `p0 p1` and `q0 q1`, measured
/// along the first one.
fn segment_param(p0: Point, p1: Point, q0: Point, q1: Point) -> Option<f64> {
    const EPS: f64 = 1e-12;
    let r = [p1[0] - p0[0], p1[1] - p0[1]];
    let w = [q1[0] - q0[0], q1[1] - q0[1]];
    let den = r[0] * w[1] - r[1] * w[0];
    let qp = [q0[0] - p0[0], q0[1] - p0[1]];
    if den.abs() < EPS * (r[0].hypot(r[1]) * w[0].hypot(w[1])).max(f64::MIN_POSITIVE) {
        return None;
    }
    let a = (qp[0] * w[1] - qp[1] * w[0]) / den;
    let b = (qp[0] * r[1] - qp[1] * r[0]) / den;
    if (-EPS..=1.0 + EPS).contains(&a) && (-EPS..=1.0 + EPS).contains(&b) {
        Some(a.clamp(0.0, 1.0))
    } else {
        None
    }
}

/// Parameters where a plane curve meets an oval boundary, merged within
/// `tol` and sorted.
pub fn crossing_params(omega: &ParamCurve, config: &OvalConfiguration, tol: f64) -> Vec<f64> {
    if omega.dim() != 2 {
        return Vec::new();
    }
    let m = CROSSING_SEGMENTS;
    let ts: Vec<f64> = (0..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect();
    let pts: Vec<Point> = ts
        .iter()
        .map(|&t| {
            let x = omega.eval(t);
            [x[0], x[1]]
        })
        .collect();
    let mut hits = Vec::new();
    for i in 0..m {
        let (p0, p1) = (pts[i], pts[i + 1]);
        let lo = [p0[0].min(p1[0]), p0[1].min(p1[1])];
        let hi = [p0[0].max(p1[0]), p0[1].max(p1[1])];
        for oval in config.ovals() {
            let bb = oval.bbox();
            if bb.max[0] < lo[0] || bb.min[0] > hi[0] || bb.max[1] < lo[1] || bb.min[1] > hi[1] {
                continue;
            }
            for (q0, q1) in oval.edges() {
                if let Some(a) = segment_param(p0, p1, q0, q1) {
                    hits.push(ts[i] + a * (ts[i + 1] - ts[i]));
                }
            }
        }
    }
    hits.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::new();
    for t in hits {
        match merged.last() {
            Some(&last) if t - last <= tol => {}
            _ => merged.push(t),
        }
    }
    merged
}

pub fn crossing_count(omega: &ParamCurve, config: &OvalConfiguration, tol: f64) -> usize {
    crossing_params(omega, config, tol).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{validate_configuration, Oval};
    use nalgebra::{DMatrix, DVector};

    fn vandermonde_solve(ts: &[f64], ys: &[f64]) -> Vec<f64> {
        let k = ts.len();
        let a = DMatrix::from_fn(k, k, |i, j| ts[i].powi(j as i32));
        let b = DVector::from_column_slice(ys);
        a.lu().solve(&b).unwrap().iter().copied().collect()
    }

    #[test]
    fn two_points_give_segment() {
        let c = fit_curve(&[vec![-0.5, 0.1], vec![0.4, -0.2]], 1).unwrap();
        let ts = chebyshev_nodes(2);
        assert!((c.eval(ts[0])[0] + 0.5).abs() < 1e-12);
        assert!((c.eval(ts[1])[1] + 0.2).abs() < 1e-12);
        assert!(c.components().iter().all(|v| v.len() <= 2));
    }

    #[test]
    fn collinear_points_have_no_curvature() {
        // points placed affinely in the node parameter
        let ts = chebyshev_nodes(4);
        let pts: Vec<Vec<f64>> = ts.iter().map(|t| vec![0.1 + 0.5 * t, -0.2 - 0.3 * t]).collect();
        let c = fit_curve(&pts, 3).unwrap();
        for comp in c.components() {
            for &a in comp.iter().skip(2) {
                assert!(a.abs() < 1e-10);
            }
        }
        // any spacing along a line keeps the image on that line
        let pts: Vec<Vec<f64>> = [0.0, 0.1, 0.5, 0.6]
            .iter()
            .map(|u| vec![-0.3 + u, 0.2 - 0.5 * u])
            .collect();
        let c = fit_curve(&pts, 3).unwrap();
        for i in 0..50 {
            let x = c.eval(-1.0 + i as f64 / 25.0);
            assert!(((x[0] + 0.3) * -0.5 - (x[1] - 0.2)).abs() < 1e-10);
        }
    }

    #[test]
    fn parabola_matches_vandermonde() {
        let pts = vec![vec![0.1, 0.3], vec![-0.4, -0.1], vec![0.5, -0.3]];
        let c = fit_curve(&pts, 2).unwrap();
        let ts = chebyshev_nodes(3);
        for i in 0..2 {
            let ys: Vec<f64> = pts.iter().map(|p| p[i]).collect();
            let want = vandermonde_solve(&ts, &ys);
            for (a, b) in c.components()[i].iter().zip(&want) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        for (j, p) in pts.iter().enumerate() {
            let q = c.eval(ts[j]);
            assert!((q[0] - p[0]).abs() < 1e-10 && (q[1] - p[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn fit_errors() {
        let pts = vec![vec![0.0, 0.0]; 3];
        assert_eq!(fit_curve(&pts, 1), Err(CurveError::TooManyPoints { k: 3, s: 1 }));
        // steep cubic through points near the boundary overshoots the disk
        let pts = vec![vec![0.99, 0.0], vec![-0.99, 0.0], vec![0.99, 0.05], vec![-0.99, 0.05]];
        assert!(matches!(fit_curve(&pts, 3), Err(CurveError::ImageLeavesBall { .. })));
    }

    #[test]
    fn line_case_uses_single_order() {
        assert_eq!(lowest_order(3, 1), 4);
        assert_eq!(lowest_order(3, 2), 2);
        assert_eq!(lowest_order(4, 2), 3);
        let f = MultiPoly::from_terms(2, [(vec![5, 0], 1.0), (vec![2, 3], 1.0)]).unwrap();
        let omega = ParamCurve::new(vec![vec![0.1, 0.5], vec![-0.2, 0.3]], 1).unwrap();
        let r = composition_report(&f, &omega, 4, 64).unwrap();
        assert_eq!(r.lowest_order, 5);
        // along a line, LHS >= RHS with constant 1 by the chain rule
        assert!(r.c_hat.unwrap() > 0.0);
        assert!(r.positivity_holds);
    }

    #[test]
    fn low_degree_is_degenerate() {
        let f = MultiPoly::from_terms(2, [(vec![1, 0], 1.0), (vec![0, 1], 2.0)]).unwrap();
        let omega = ParamCurve::new(vec![vec![0.0, 0.5, 0.2], vec![0.1, 0.0, 0.4]], 2).unwrap();
        let r = composition_report(&f, &omega, 2, 32).unwrap();
        assert!(r.all_degenerate);
        assert!(r.c_hat.is_none());
        assert!(r.samples.iter().all(|p| p.rhs == 0.0));
    }

    #[test]
    fn quadratic_on_parabola() {
        let f = MultiPoly::from_terms(2, [(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap();
        let omega = ParamCurve::new(vec![vec![0.0, 0.7], vec![0.0, 0.0, 0.7]], 2).unwrap();
        let r = composition_report(&f, &omega, 3, 128).unwrap();
        // g = 0.49 t^2 + 0.49 t^4, g'''' = 24 * 0.49
        assert!((r.g[4] - 0.49).abs() < 1e-15);
        for p in &r.samples {
            assert!((p.rhs - 24.0 * 0.49).abs() < 1e-10);
            assert!(p.lhs > 0.0);
        }
        assert!(r.c_hat.unwrap() > 0.0);
        assert!(r.max_lhs >= r.c_hat.unwrap() * r.max_rhs - 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let f = MultiPoly::var(3, 0);
        let omega = ParamCurve::new(vec![vec![0.0, 0.5], vec![0.0, 0.5]], 1).unwrap();
        assert!(matches!(
            composition_report(&f, &omega, 1, 8),
            Err(CurveError::DimensionMismatch { .. })
        ));
    }

    fn circle_config(r: f64) -> OvalConfiguration {
        validate_configuration(vec![Oval::regular(0, [0.0, 0.0], r, 64, 0.0)]).unwrap()
    }

    #[test]
    fn crossing_examples() {
        let cfg = circle_config(0.5);
        let through = ParamCurve::new(vec![vec![0.0, 0.9], vec![0.05, 0.0]], 1).unwrap();
        assert_eq!(crossing_count(&through, &cfg, 1e-9), 2);
        let away = ParamCurve::new(vec![vec![0.0, 0.2], vec![0.8, 0.0]], 1).unwrap();
        assert_eq!(crossing_count(&away, &cfg, 1e-9), 0);
    }

    #[test]
    fn fitted_curve_through_boundary_points() {
        let cfg = circle_config(0.5);
        let samples = cfg.ovals()[0].sample_boundary(16);
        let pts: Vec<Vec<f64>> = [1usize, 3, 6, 10].iter().map(|&i| samples[i].to_vec()).collect();
        let omega = fit_curve(&pts, 3).unwrap();
        assert!(crossing_count(&omega, &cfg, 1e-9) >= 4);
    }
}
