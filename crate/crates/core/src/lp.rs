//! Dense two-phase revised simplex for small standard-form programs
//!
//! ```text
//! minimize c·x  subject to  A x = b,  x ≥ 0
//! ```
//!
//! The basis inverse is kept explicitly (problems here have at most a few
//! dozen rows) and refactored periodically. Pricing is Dantzig's rule with a
//! switch to Bland's rule after a run of degenerate pivots, so the pivot
//! sequence is a deterministic function of the input.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("basis became singular during refactorization")]
    SingularBasis,
    #[error("inconsistent problem dimensions")]
    Shape,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    /// Reduced-cost, pivot and feasibility tolerance, relative to the data scale.
    pub tol: f64,
    pub max_iterations: usize,
    pub refactor_every: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            tol: 1e-9,
            max_iterations: 100_000,
            refactor_every: 64,
        }
    }
}

/// Problem data with `A` stored column-major (`m` entries per column).
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl StandardLp {
    pub fn column(&self, j: usize) -> &[f64] {
        &self.a[j * self.m..(j + 1) * self.m]
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Simplex multipliers `y` with `c - Aᵀy ≥ 0`; an optimal dual solution.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    /// `certificate` is a Farkas vector `y` with `Aᵀy ≤ 0` and `b·y > 0`.
    Infeasible { certificate: Vec<f64>, iterations: usize },
    Unbounded { iterations: usize },
}

struct Tableau<'a> {
    lp: &'a StandardLp,
    /// Row signs making the right-hand side non-negative.
    sign: Vec<f64>,
    b: Vec<f64>,
    /// Basic variable per row; indices `>= n` are artificials.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>, // m x m row-major
    xb: Vec<f64>,
    iterations: usize,
    opts: LpOptions,
    scale: f64,
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a StandardLp, opts: LpOptions) -> Self {
        let m = lp.m;
        let sign: Vec<f64> = lp.b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let b: Vec<f64> = lp.b.iter().zip(&sign).map(|(v, s)| v * s).collect();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        let scale = lp.a.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        Tableau {
            lp,
            sign,
            xb: b.clone(),
            b,
            basis: (lp.n..lp.n + m).collect(),
            is_basic: vec![false; lp.n + m],
            binv,
            iterations: 0,
            opts,
            scale,
        }
        .mark_basis()
    }

    fn mark_basis(mut self) -> Self {
        for &j in &self.basis {
            self.is_basic[j] = true;
        }
        self
    }

    /// Column `j` of the row-flipped constraint matrix.
    fn col(&self, j: usize, out: &mut [f64]) {
        let m = self.lp.m;
        if j < self.lp.n {
            for (i, (o, v)) in out.iter_mut().zip(self.lp.column(j)).enumerate() {
                *o = v * self.sign[i];
            }
        } else {
            out.iter_mut().for_each(|o| *o = 0.0);
            out[j - self.lp.n] = 1.0;
        }
        debug_assert_eq!(out.len(), m);
    }

    fn multipliers(&self, cost: &dyn Fn(usize) -> f64) -> Vec<f64> {
        let m = self.lp.m;
        let mut pi = vec![0.0; m];
        for (r, &j) in self.basis.iter().enumerate() {
            let cj = cost(j);
            if cj != 0.0 {
                for k in 0..m {
                    pi[k] += cj * self.binv[r * m + k];
                }
            }
        }
        pi
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.lp.m;
        let mut bmat = DMatrix::<f64>::zeros(m, m);
        let mut col = vec![0.0; m];
        for (r, &j) in self.basis.iter().enumerate() {
            self.col(j, &mut col);
            for i in 0..m {
                bmat[(i, r)] = col[i];
            }
        }
        let inv = bmat.try_inverse().ok_or(LpError::SingularBasis)?;
        for r in 0..m {
            for k in 0..m {
                self.binv[r * m + k] = inv[(r, k)];
            }
        }
        for r in 0..m {
            self.xb[r] = (0..m).map(|k| self.binv[r * m + k] * self.b[k]).sum::<f64>().max(0.0);
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, q: usize, u: &[f64]) {
        let m = self.lp.m;
        let theta = self.xb[r] / u[r];
        for i in 0..m {
            if i != r {
                self.xb[i] = (self.xb[i] - theta * u[i]).max(0.0);
            }
        }
        self.xb[r] = theta;
        let piv = u[r];
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        for i in 0..m {
            if i != r && u[i] != 0.0 {
                let f = u[i];
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[r * m + k];
                }
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    /// Runs simplex iterations for the given cost until optimal. Returns
    /// `false` on an unbounded ray.
    fn run(&mut self, cost: &dyn Fn(usize) -> f64, allow_artificial: bool) -> Result<bool, LpError> {
        let m = self.lp.m;
        let n = self.lp.n;
        let tol = self.opts.tol * self.scale;
        let mut u = vec![0.0; m];
        let mut col = vec![0.0; m];
        let mut degenerate_run = 0usize;
        let mut since_refactor = 0usize;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Err(LpError::IterationLimit(self.opts.max_iterations));
            }
            let bland = degenerate_run > 50;
            let pi = self.multipliers(cost);
            let limit = if allow_artificial { n + m } else { n };
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..limit {
                if self.is_basic[j] || (j >= n && !allow_artificial) {
                    continue;
                }
                self.col(j, &mut col);
                let dj = cost(j) - pi.iter().zip(&col).map(|(p, a)| p * a).sum::<f64>();
                if dj < -tol {
                    match entering {
                        None => entering = Some((j, dj)),
                        Some((_, best)) if !bland && dj < best => entering = Some((j, dj)),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((q, _)) = entering else {
                return Ok(true);
            };
            self.col(q, &mut col);
            for r in 0..m {
                u[r] = (0..m).map(|k| self.binv[r * m + k] * col[k]).sum();
            }
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                if u[r] > tol {
                    let ratio = self.xb[r] / u[r];
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            let better = if bland {
                                ratio < lratio - 1e-15
                                    || (ratio <= lratio + 1e-15 && self.basis[r] < self.basis[lr])
                            } else {
                                ratio < lratio - 1e-15
                                    || (ratio <= lratio + 1e-15 && u[r] > u[lr])
                            };
                            if better {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, theta)) = leave else {
                return Ok(false);
            };
            if theta <= 1e-15 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q, &u);
            self.iterations += 1;
            since_refactor += 1;
            if since_refactor >= self.opts.refactor_every {
                self.refactor()?;
                since_refactor = 0;
            }
        }
    }

    /// Swaps zero-level artificials out of the basis where a real column
    /// can take their place.
    fn expel_artificials(&mut self) {
        let m = self.lp.m;
        let n = self.lp.n;
        let tol = self.opts.tol * self.scale;
        let mut col = vec![0.0; m];
        let mut u = vec![0.0; m];
        for r in 0..m {
            if self.basis[r] < n {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if self.is_basic[j] {
                    continue;
                }
                self.col(j, &mut col);
                let ur: f64 = (0..m).map(|k| self.binv[r * m + k] * col[k]).sum();
                if ur.abs() > tol && best.is_none_or(|(_, b)| ur.abs() > b) {
                    best = Some((j, ur.abs()));
                }
            }
            if let Some((q, _)) = best {
                self.col(q, &mut col);
                for i in 0..m {
                    u[i] = (0..m).map(|k| self.binv[i * m + k] * col[k]).sum();
                }
                self.xb[r] = 0.0;
                self.pivot(r, q, &u);
            }
        }
    }
}

pub fn solve(lp: &StandardLp, opts: LpOptions) -> Result<LpOutcome, LpError> {
    let (m, n) = (lp.m, lp.n);
    if lp.a.len() != m * n || lp.b.len() != m || lp.c.len() != n {
        return Err(LpError::Shape);
    }
    let mut t = Tableau::new(lp, opts);

    let phase1 = |j: usize| if j >= n { 1.0 } else { 0.0 };
    t.run(&phase1, false)?;
    let infeas: f64 = t
        .basis
        .iter()
        .zip(&t.xb)
        .filter(|(&j, _)| j >= n)
        .map(|(_, v)| v)
        .sum();
    let bscale = t.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    if infeas > opts.tol * bscale * (m as f64).max(1.0) {
        let pi = t.multipliers(&phase1);
        // Phase-one multipliers y satisfy a_j·y <= 0 for every real column
        // and b·y = infeasibility > 0, up to the row flips.
        let certificate = pi.iter().zip(&t.sign).map(|(p, s)| p * s).collect();
        return Ok(LpOutcome::Infeasible {
            certificate,
            iterations: t.iterations,
        });
    }
    t.expel_artificials();
    t.refactor()?;

    let cost = |j: usize| if j < n { lp.c[j] } else { 0.0 };
    if !t.run(&cost, false)? {
        return Ok(LpOutcome::Unbounded {
            iterations: t.iterations,
        });
    }
    t.refactor()?;
    let mut x = vec![0.0; n];
    for (r, &j) in t.basis.iter().enumerate() {
        if j < n {
            x[j] = t.xb[r];
        }
    }
    let pi = t.multipliers(&cost);
    let duals: Vec<f64> = pi.iter().zip(&t.sign).map(|(p, s)| p * s).collect();
    let objective = x.iter().zip(&lp.c).map(|(a, b)| a * b).sum();
    Ok(LpOutcome::Optimal(LpSolution {
        x,
        objective,
        duals,
        iterations: t.iterations,
    }))
}
