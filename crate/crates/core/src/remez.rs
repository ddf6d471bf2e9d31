//! Remez constants: closed-form bounds and a sampled LP estimator.
//!
//! The Remez constant of a set `Z ⊂ Bⁿ` in degree `d` is the smallest `K`
//! with `sup_B |P| ≤ K sup_Z |P|` for every polynomial `P` of degree `d`.
//! It is infinite exactly when `Z` lies in the zero set of such a `P`.
//!
//! [`remez_estimate_lp`] discretizes both suprema. For a fixed candidate
//! point `x0` the program
//!
//! ```text
//! maximize P_c(x0)  subject to  -1 ≤ P_c(z) ≤ 1  for z in Z
//! ```
//!
//! is solved through its dual, `min ‖y‖₁ s.t. Σ y_z a(z) = a(x0)` with
//! `a(·)` the monomial feature vector; the simplex multipliers of the dual
//! are the coefficients of the maximizing polynomial. Infeasibility of the
//! dual (a Farkas vector) is a polynomial vanishing on the samples.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lp::{self, LpOptions, LpOutcome, StandardLp};
use crate::poly::{basis_size, chebyshev_value, monomial_basis, MultiPoly, PolyError};

/// Objective values above this are reported as an infinite constant.
pub const UNBOUNDED_OBJECTIVE: f64 = 1e12;

/// A polynomial counts as vanishing on the samples when its maximum there
/// is below this multiple of its coefficient norm.
pub const VANISHING_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RemezError {
    #[error("mu must be positive, got {0}")]
    MuNonPositive(f64),
    #[error("{count} ovals given, the bound needs at least {required}")]
    TooFewOvals { count: usize, required: usize },
    #[error("measure fraction must lie in (0, 1], got {0}")]
    LambdaOutOfRange(f64),
    #[error("sample set is empty")]
    EmptySamples,
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("point dimension {got} does not match {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point outside the closed unit ball: {0:?}")]
    OutsideBall(Vec<f64>),
    #[error("LP solver failed at tolerance {tol}: {reason}")]
    SolverFailure { tol: f64, reason: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Minimum oval count `(d - 1)^n + 1` for the topological bound.
pub fn required_oval_count(d: usize, n: usize) -> usize {
    d.saturating_sub(1).pow(n as u32) + 1
}

/// `(4n / mu)^d`, which is `(8 / mu)^d` in the plane. Requires at least
/// `(d - 1)^n + 1` ovals.
pub fn remez_bound_topological(mu: f64, d: usize, n: usize, count: usize) -> Result<f64, RemezError> {
    if !(mu > 0.0) {
        return Err(RemezError::MuNonPositive(mu));
    }
    let required = required_oval_count(d, n);
    if count < required {
        return Err(RemezError::TooFewOvals { count, required });
    }
    Ok((4.0 * n as f64 / mu).powi(d as i32))
}

/// Chebyshev growth bound for a subset of measure fraction `lambda` of a
/// convex body in `Rⁿ`:
/// `T_d((1 + (1-λ)^{1/n}) / (1 - (1-λ)^{1/n}))`.
pub fn brudnyi_ganzburg_bound(lambda: f64, d: usize, n: usize) -> Result<f64, RemezError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(RemezError::LambdaOutOfRange(lambda));
    }
    let r = (1.0 - lambda).powf(1.0 / n as f64);
    Ok(chebyshev_value(d, (1.0 + r) / (1.0 - r)))
}

#[derive(Debug, Clone, Copy)]
pub struct RemezOptions {
    pub tol: f64,
    /// Solve candidate programs on the rayon pool.
    pub parallel: bool,
}

impl Default for RemezOptions {
    fn default() -> Self {
        RemezOptions {
            tol: 1e-9,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RemezDiagnostics {
    pub z_samples: usize,
    pub candidates: usize,
    pub basis_size: usize,
    pub lps_solved: usize,
    pub total_lp_iterations: usize,
    pub max_lp_iterations: usize,
    /// Smallest singular value of the sample/monomial matrix.
    pub min_singular_value: f64,
    /// How the infinite flag was raised, if it was.
    pub degeneracy: Option<String>,
}

/// Lower estimate of the Remez constant of a finite sample.
#[derive(Debug, Clone, Serialize)]
pub struct RemezEstimate {
    pub degree: usize,
    pub nvars: usize,
    /// `None` when the constant is infinite.
    pub value: Option<f64>,
    pub infinite: bool,
    pub witness_poly: MultiPoly,
    pub witness_point: Vec<f64>,
    pub diagnostics: RemezDiagnostics,
}

impl RemezEstimate {
    pub fn value_or_inf(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }
}

/// `1 / R`, or `0` for an infinite constant.
pub fn inverse_remez(e: &RemezEstimate) -> f64 {
    match e.value {
        Some(v) if !e.infinite => 1.0 / v,
        _ => 0.0,
    }
}

fn features(basis: &[Vec<u32>], x: &[f64]) -> Vec<f64> {
    basis
        .iter()
        .map(|e| {
            e.iter()
                .zip(x)
                .fold(1.0, |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k as i32) })
        })
        .collect()
}

fn check_points(points: &[Vec<f64>], n: usize) -> Result<(), RemezError> {
    for p in points {
        if p.len() != n {
            return Err(RemezError::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
        if p.iter().map(|v| v * v).sum::<f64>().sqrt() > 1.0 + 1e-12 {
            return Err(RemezError::OutsideBall(p.clone()));
        }
    }
    Ok(())
}

fn max_abs_on(p: &MultiPoly, pts: &[Vec<f64>]) -> f64 {
    pts.iter().fold(0.0, |m, z| m.max(p.eval_unchecked(z).abs()))
}

/// Candidate with the largest `|p|`, first one on ties.
fn argmax_abs(p: &MultiPoly, pts: &[Vec<f64>]) -> Vec<f64> {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, x) in pts.iter().enumerate() {
        let v = p.eval_unchecked(x).abs();
        if v > best.1 {
            best = (i, v);
        }
    }
    pts[best.0].clone()
}

enum CandidateResult {
    Finite { value: f64, coeffs: Vec<f64>, iterations: usize },
    Vanishing { coeffs: Vec<f64>, iterations: usize },
}

pub fn remez_estimate_lp(
    zsamples: &[Vec<f64>],
    d: usize,
    candidates: &[Vec<f64>],
    opts: RemezOptions,
) -> Result<RemezEstimate, RemezError> {
    let first = zsamples.first().ok_or(RemezError::EmptySamples)?;
    if candidates.is_empty() {
        return Err(RemezError::EmptyCandidates);
    }
    let n = first.len();
    check_points(zsamples, n)?;
    check_points(candidates, n)?;

    let m = basis_size(n, d)?;
    let basis = monomial_basis(n, d);
    debug_assert_eq!(basis.len(), m);
    let rows: Vec<Vec<f64>> = zsamples.iter().map(|z| features(&basis, z)).collect();

    let mut diagnostics = RemezDiagnostics {
        z_samples: zsamples.len(),
        candidates: candidates.len(),
        basis_size: m,
        ..Default::default()
    };

    // Degeneracy: a unit coefficient vector v with max_z |P_v(z)| tiny means
    // the samples sit on an algebraic curve of degree d.
    let nrows = rows.len().max(m);
    let vander = DMatrix::from_fn(nrows, m, |i, k| if i < rows.len() { rows[i][k] } else { 0.0 });
    let svd = vander.svd(false, true);
    let (kmin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    diagnostics.min_singular_value = smin;
    let vt = svd.v_t.as_ref().expect("right singular vectors requested");
    let v: Vec<f64> = (0..m).map(|k| vt[(kmin, k)]).collect();
    let null_poly = MultiPoly::from_basis(n, &basis, &v);
    if !null_poly.is_zero() && max_abs_on(&null_poly, zsamples) <= VANISHING_TOL * null_poly.coef_l2_norm() {
        diagnostics.degeneracy = Some("samples lie on the zero set of the witness polynomial".into());
        let witness_point = argmax_abs(&null_poly, candidates);
        return Ok(RemezEstimate {
            degree: d,
            nvars: n,
            value: None,
            infinite: true,
            witness_poly: null_poly,
            witness_point,
            diagnostics,
        });
    }

    // Dual program columns: +a(z) and -a(z) for each sample, unit cost.
    let ncols = 2 * rows.len();
    let mut a = Vec::with_capacity(ncols * m);
    for r in &rows {
        a.extend_from_slice(r);
        a.extend(r.iter().map(|v| -v));
    }
    let base = StandardLp {
        m,
        n: ncols,
        a,
        b: vec![0.0; m],
        c: vec![1.0; ncols],
    };
    let lp_opts = LpOptions {
        tol: opts.tol,
        ..Default::default()
    };

    let solve_one = |x0: &Vec<f64>| -> Result<CandidateResult, RemezError> {
        let mut prob = base.clone();
        prob.b = features(&basis, x0);
        match lp::solve(&prob, lp_opts) {
            Ok(LpOutcome::Optimal(s)) => Ok(CandidateResult::Finite {
                value: s.objective,
                coeffs: s.duals,
                iterations: s.iterations,
            }),
            Ok(LpOutcome::Infeasible { certificate, iterations }) => Ok(CandidateResult::Vanishing {
                coeffs: certificate,
                iterations,
            }),
            Ok(LpOutcome::Unbounded { .. }) => Err(RemezError::SolverFailure {
                tol: opts.tol,
                reason: "dual program reported unbounded with non-negative costs".into(),
            }),
            Err(e) => Err(RemezError::SolverFailure {
                tol: opts.tol,
                reason: e.to_string(),
            }),
        }
    };

    let results: Vec<Result<CandidateResult, RemezError>> = if opts.parallel {
        candidates.par_iter().map(solve_one).collect()
    } else {
        candidates.iter().map(solve_one).collect()
    };

    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for (i, r) in results.into_iter().enumerate() {
        let r = r?;
        diagnostics.lps_solved += 1;
        match r {
            CandidateResult::Finite { value, coeffs, iterations } => {
                diagnostics.total_lp_iterations += iterations;
                diagnostics.max_lp_iterations = diagnostics.max_lp_iterations.max(iterations);
                if value > UNBOUNDED_OBJECTIVE {
                    diagnostics.degeneracy = Some(format!("objective {value:e} exceeds threshold"));
                    let witness_poly = MultiPoly::from_basis(n, &basis, &coeffs);
                    return Ok(RemezEstimate {
                        degree: d,
                        nvars: n,
                        value: None,
                        infinite: true,
                        witness_poly,
                        witness_point: candidates[i].clone(),
                        diagnostics,
                    });
                }
                if best.as_ref().is_none_or(|b| value > b.1) {
                    best = Some((i, value, coeffs));
                }
            }
            CandidateResult::Vanishing { coeffs, iterations } => {
                diagnostics.total_lp_iterations += iterations;
                let witness_poly = MultiPoly::from_basis(n, &basis, &coeffs);
                let on_z = max_abs_on(&witness_poly, zsamples);
                if on_z > VANISHING_TOL.sqrt() * witness_poly.coef_l2_norm() {
                    return Err(RemezError::SolverFailure {
                        tol: opts.tol,
                        reason: format!("phase one reported infeasibility but certificate reaches {on_z:e} on Z"),
                    });
                }
                diagnostics.degeneracy = Some("dual program infeasible (Farkas certificate)".into());
                return Ok(RemezEstimate {
                    degree: d,
                    nvars: n,
                    value: None,
                    infinite: true,
                    witness_poly,
                    witness_point: candidates[i].clone(),
                    diagnostics,
                });
            }
        }
    }
    let (i, value, coeffs) = best.expect("at least one candidate solved");
    Ok(RemezEstimate {
        degree: d,
        nvars: n,
        // P ≡ 1 is always feasible
        value: Some(value.max(1.0)),
        infinite: false,
        witness_poly: MultiPoly::from_basis(n, &basis, &coeffs),
        witness_point: candidates[i].clone(),
        diagnostics,
    })
}

/// `count` equispaced points of `[a, b]`, endpoints included.
pub fn uniform_interval(a: f64, b: f64, count: usize) -> Vec<Vec<f64>> {
    match count {
        0 => Vec::new(),
        1 => vec![vec![0.5 * (a + b)]],
        _ => (0..count)
            .map(|i| vec![a + (b - a) * i as f64 / (count - 1) as f64])
            .collect(),
    }
}

/// Candidate points for the supremum over `Bⁿ`.
///
/// In one dimension this is `k` equispaced points of `[-1, 1]`; otherwise
/// the lattice of step `2/k` on `[-1, 1]ⁿ`, kept where it meets the ball.
pub fn ball_grid(n: usize, k: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return uniform_interval(-1.0, 1.0, k);
    }
    let step = 2.0 / k as f64;
    let side: Vec<f64> = (0..=k).map(|i| -1.0 + step * i as f64).collect();
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                side.iter().map(move |&s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out.retain(|p| p.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12);
    out
}

/// `max_candidates |p| / max_samples |p|` for a single polynomial.
pub fn empirical_ratio(p: &MultiPoly, candidates: &[Vec<f64>], zsamples: &[Vec<f64>]) -> f64 {
    max_abs_on(p, candidates) / max_abs_on(p, zsamples)
}
