//! Box counting on point clouds and the box-dimension rigidity threshold.
//!
//! The grid is anchored at the origin, with cells `∏ [k_i ε, (k_i + 1) ε)`.
//! Counts depend on that offset; no averaging over shifted grids is done.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FractalError {
    #[error("point cloud is empty")]
    Empty,
    #[error("point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("degenerate scales: {0}")]
    DegenerateScales(String),
}

/// Nonempty list of points of equal dimension.
///
/// Points are not required to lie in the unit ball: box counting is
/// translation and scale covariant, and unit-square samples are a natural
/// input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, FractalError> {
        let dim = points.first().ok_or(FractalError::Empty)?.len();
        if dim == 0 {
            return Err(FractalError::DimensionMismatch {
                index: 0,
                expected: 1,
                got: 0,
            });
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(FractalError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(FractalError::NonFinite(index));
            }
        }
        Ok(PointCloud { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

fn cell(p: &[f64], eps: f64) -> Vec<i64> {
    p.iter().map(|x| (x / eps).floor() as i64).collect()
}

/// Number of occupied grid cells of side `eps`.
pub fn covering_number(cloud: &PointCloud, eps: f64) -> usize {
    assert!(eps > 0.0, "eps must be positive");
    if cloud.len() < 4096 {
        return cloud.points.iter().map(|p| cell(p, eps)).collect::<HashSet<_>>().len();
    }
    cloud
        .points
        .par_chunks(4096)
        .map(|chunk| chunk.iter().map(|p| cell(p, eps)).collect::<HashSet<_>>())
        .reduce(HashSet::new, |a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
            big.extend(small);
            big
        })
        .len()
}

/// Dyadic scales `2^{-2}, ..., 2^{-8}`.
pub fn default_scales() -> Vec<f64> {
    (2..=8).map(|k| 0.5f64.powi(k)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxDimension {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square residual of the fit in log space.
    pub residual: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub formula: &'static str,
}

/// Least-squares slope of `log M(ε)` against `log(1/ε)`.
pub fn box_dimension_estimate(cloud: &PointCloud, scales: &[f64]) -> Result<BoxDimension, FractalError> {
    if scales.len() < 3 {
        return Err(FractalError::DegenerateScales(format!(
            "need at least 3 scales, got {}",
            scales.len()
        )));
    }
    if let Some(e) = scales.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(FractalError::DegenerateScales(format!("scale {e} is not positive")));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(FractalError::DegenerateScales("scales must be strictly decreasing".into()));
    }
    let counts: Vec<usize> = scales.iter().map(|&e| covering_number(cloud, e)).collect();
    let xs: Vec<f64> = scales.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(BoxDimension {
        slope,
        intercept,
        residual,
        scales: scales.to_vec(),
        counts,
        formula: "least-squares slope of log M(eps) vs log(1/eps)",
    })
}

/// `n - 1/(d+1)`.
pub fn rigidity_threshold(n: usize, d: usize) -> f64 {
    n as f64 - 1.0 / (d as f64 + 1.0)
}

/// Whether `beta > n - 1/(d+1)`, the box-dimension condition under which
/// `RG_d(Z) >= M(n, d) > 0` for a constant `M` with no known closed form.
pub fn rigidity_threshold_check(beta: f64, n: usize, d: usize) -> bool {
    beta > rigidity_threshold(n, d)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdVerdict {
    pub beta: f64,
    pub n: usize,
    pub d: usize,
    pub threshold: f64,
    pub threshold_formula: &'static str,
    pub exceeds: bool,
    pub conclusion: Option<&'static str>,
}

pub fn threshold_verdict(beta: f64, n: usize, d: usize) -> ThresholdVerdict {
    let exceeds = rigidity_threshold_check(beta, n, d);
    ThresholdVerdict {
        beta,
        n,
        d,
        threshold: rigidity_threshold(n, d),
        threshold_formula: "n - 1/(d+1)",
        exceeds,
        conclusion: exceeds.then_some("RG_d(Z) >= M(n,d) > 0 (M not computed)"),
    }
}
