//! Lower bounds on `‖f^{(d+1)}‖` for normalized functions vanishing on `Z`.
//!
//! Functions are normalized by `max_B |f| = 1`. Every bound is tagged with
//! a [`FormulaId`] and the expression it evaluates.

use serde::Serialize;
use thiserror::Error;

use crate::remez::required_oval_count;

/// Largest `d` accepted; `(d + 1)!` stays exact in `f64` up to here.
pub const MAX_DEGREE: usize = 18;

/// Bisection stops once the bracketing interval is this short.
pub const ZERO_BRACKET_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RigidityError {
    #[error("degree {0} exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("nodes must be strictly increasing (position {0})")]
    DuplicateNodes(usize),
    #[error("node and value lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("divided difference needs at least one node")]
    NoNodes,
    #[error("degenerate nodes: {0}")]
    DegenerateNodes(String),
    #[error("mu must be positive, got {0}")]
    MuNonPositive(f64),
    #[error("inverse Remez constant must lie in [0, 1], got {0}")]
    InverseRemezOutOfRange(f64),
    #[error("sampler returned a non-finite value at {0:?}")]
    SamplerFailure(Vec<f64>),
    #[error("point outside the closed unit ball: {0:?}")]
    OutsideBall(Vec<f64>),
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

fn check_degree(d: usize) -> Result<(), RigidityError> {
    if d > MAX_DEGREE {
        Err(RigidityError::DegreeTooLarge(d))
    } else {
        Ok(())
    }
}

/// `(d+1)!/2 · inverse_remez`.
pub fn rigidity_from_remez(inverse_remez: f64, d: usize) -> Result<f64, RigidityError> {
    check_degree(d)?;
    if !(0.0..=1.0).contains(&inverse_remez) {
        return Err(RigidityError::InverseRemezOutOfRange(inverse_remez));
    }
    Ok(factorial(d + 1) / 2.0 * inverse_remez)
}

/// `(1/(d+1)!) · (4n/mu)^d`, the expression as printed alongside the
/// topological Remez bound.
pub fn rigidity_topological_literal(mu: f64, d: usize, n: usize) -> Result<f64, RigidityError> {
    check_degree(d)?;
    if !(mu > 0.0) {
        return Err(RigidityError::MuNonPositive(mu));
    }
    Ok((4.0 * n as f64 / mu).powi(d as i32) / factorial(d + 1))
}

/// `(d+1)!/2 · (mu/(4n))^d`: the Remez-to-rigidity transfer applied to
/// the topological Remez bound.
pub fn rigidity_topological_composed(mu: f64, d: usize, n: usize) -> Result<f64, RigidityError> {
    check_degree(d)?;
    if !(mu > 0.0) {
        return Err(RigidityError::MuNonPositive(mu));
    }
    Ok(factorial(d + 1) / 2.0 * (mu / (4.0 * n as f64)).powi(d as i32))
}

/// Newton divided difference `f[x_0, ..., x_k]` over strictly increasing nodes.
pub fn divided_difference(xs: &[f64], fs: &[f64]) -> Result<f64, RigidityError> {
    if xs.len() != fs.len() {
        return Err(RigidityError::LengthMismatch(xs.len(), fs.len()));
    }
    if xs.is_empty() {
        return Err(RigidityError::NoNodes);
    }
    if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(RigidityError::DuplicateNodes(i + 1));
    }
    let mut table = fs.to_vec();
    let k = xs.len();
    for level in 1..k {
        for i in 0..k - level {
            table[i] = (table[i + 1] - table[i]) / (xs[i + level] - xs[i]);
        }
    }
    Ok(table[0])
}

/// `(d+1)! · |f[x_0, ..., x_d, z0]|` for a function vanishing at the `d + 1`
/// points `zeros` and equal to `fz0` at `z0`.
///
/// With every node in an interval of length 2 and `|fz0| = 1` this is at
/// least `(d+1)!/2^{d+1}`.
pub fn rigidity_1d_bound(zeros: &[f64], z0: f64, fz0: f64, d: usize) -> Result<f64, RigidityError> {
    check_degree(d)?;
    if zeros.len() != d + 1 {
        return Err(RigidityError::DegenerateNodes(format!(
            "expected {} zeros, got {}",
            d + 1,
            zeros.len()
        )));
    }
    let mut nodes: Vec<(f64, f64)> = zeros.iter().map(|&x| (x, 0.0)).collect();
    nodes.push((z0, fz0));
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    if nodes.iter().any(|(x, _)| !x.is_finite()) {
        return Err(RigidityError::DegenerateNodes("non-finite node".into()));
    }
    if nodes.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(RigidityError::DegenerateNodes("repeated node".into()));
    }
    let (xs, fs): (Vec<f64>, Vec<f64>) = nodes.into_iter().unzip();
    let dd = divided_difference(&xs, &fs)?;
    Ok((factorial(d + 1) * dd.abs()).max(0.0))
}

/// Zeros found along the line and the resulting bound.
#[derive(Debug, Clone, Serialize)]
pub struct LineRestriction {
    pub bound: f64,
    pub fz0: f64,
    /// Unit-speed parameters of the zeros used, measured from `z0`.
    pub zero_params: Vec<f64>,
    pub zero_points: Vec<Vec<f64>>,
    /// Chord of the ball cut by the line, in the same parameter.
    pub chord: (f64, f64),
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Restricts `f` to the line through `z0` and `zint`, clipped to the unit
/// ball, and applies [`rigidity_1d_bound`] to the `d + 1` zeros nearest to
/// `zint`.
///
/// Zeros are sign changes on a uniform grid of `samples` intervals refined
/// by bisection, plus isolated exact zeros; runs of exact zeros (the
/// function vanishing on a whole piece of the line) are ignored. The bound
/// is a lower bound for the `(d+1)`-st derivative along the line. Returns a
/// zero bound when fewer than `d + 1` zeros are found or `f(z0) = 0`.
pub fn interior_line_bound<F>(
    f: F,
    z0: &[f64],
    zint: &[f64],
    d: usize,
    samples: usize,
) -> Result<LineRestriction, RigidityError>
where
    F: Fn(&[f64]) -> f64,
{
    check_degree(d)?;
    if z0.len() != zint.len() {
        return Err(RigidityError::DegenerateNodes("dimension mismatch".into()));
    }
    for p in [z0, zint] {
        if norm(p) > 1.0 + 1e-12 {
            return Err(RigidityError::OutsideBall(p.to_vec()));
        }
    }
    let diff: Vec<f64> = zint.iter().zip(z0).map(|(a, b)| a - b).collect();
    let len = norm(&diff);
    if len == 0.0 {
        return Err(RigidityError::DegenerateNodes("z0 equals the interior point".into()));
    }
    let dir: Vec<f64> = diff.iter().map(|v| v / len).collect();
    let at = |t: f64| -> Vec<f64> { z0.iter().zip(&dir).map(|(a, u)| a + t * u).collect() };
    let eval = |t: f64| -> Result<f64, RigidityError> {
        let p = at(t);
        let v = f(&p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(RigidityError::SamplerFailure(p))
        }
    };

    // |z0 + t u|^2 = 1
    let b: f64 = z0.iter().zip(&dir).map(|(a, u)| a * u).sum();
    let c = norm(z0).powi(2) - 1.0;
    let disc = (b * b - c).max(0.0).sqrt();
    let chord = (-b - disc, -b + disc);

    let fz0 = eval(0.0)?;
    let empty = |fz0| LineRestriction {
        bound: 0.0,
        fz0,
        zero_params: Vec::new(),
        zero_points: Vec::new(),
        chord,
    };
    if fz0 == 0.0 {
        return Ok(empty(fz0));
    }

    let samples = samples.max(2);
    let ts: Vec<f64> = (0..=samples)
        .map(|i| chord.0 + (chord.1 - chord.0) * i as f64 / samples as f64)
        .collect();
    let gs: Vec<f64> = ts.iter().map(|&t| eval(t)).collect::<Result<_, _>>()?;

    let mut zeros: Vec<f64> = Vec::new();
    for i in 0..ts.len() {
        if gs[i] == 0.0 {
            let left_zero = i > 0 && gs[i - 1] == 0.0;
            let right_zero = i + 1 < gs.len() && gs[i + 1] == 0.0;
            if !left_zero && !right_zero {
                zeros.push(ts[i]);
            }
            continue;
        }
        if i + 1 < ts.len() && gs[i + 1] != 0.0 && (gs[i] < 0.0) != (gs[i + 1] < 0.0) {
            let (mut lo, mut hi, mut glo) = (ts[i], ts[i + 1], gs[i]);
            while hi - lo > ZERO_BRACKET_TOL {
                let mid = 0.5 * (lo + hi);
                let gm = eval(mid)?;
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (gm < 0.0) == (glo < 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
    }
    zeros.retain(|&t| t.abs() > ZERO_BRACKET_TOL);
    if zeros.len() < d + 1 {
        return Ok(empty(fz0));
    }
    // nearest to the interior point, which sits at parameter `len`
    zeros.sort_by(|a, b| (a - len).abs().total_cmp(&(b - len).abs()).then(a.total_cmp(b)));
    zeros.truncate(d + 1);
    zeros.sort_by(f64::total_cmp);
    let bound = rigidity_1d_bound(&zeros, 0.0, fz0, d)?;
    Ok(LineRestriction {
        bound,
        fz0,
        zero_points: zeros.iter().map(|&t| at(t)).collect(),
        zero_params: zeros,
        chord,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    FromRemez,
    TopologicalLiteral,
    TopologicalComposed,
    OneDimensional,
    InteriorLine,
}

impl FormulaId {
    pub fn formula(self) -> &'static str {
        match self {
            FormulaId::FromRemez => "(d+1)!/2 * inverse_remez",
            FormulaId::TopologicalLiteral => "(1/(d+1)!) * (4n/mu)^d",
            FormulaId::TopologicalComposed => "(d+1)!/2 * (mu/(4n))^d",
            FormulaId::OneDimensional => "(d+1)! * |f[x_0..x_d, z0]|",
            FormulaId::InteriorLine => "(d+1)! * |g[t_0..t_d, 0]| for g = f restricted to a line",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Satisfied,
    /// Hypothesis holds for a sampled estimate of an input, not the input itself.
    Estimated,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub formula_id: FormulaId,
    pub formula: &'static str,
    pub value: f64,
    pub hypothesis: String,
    pub status: HypothesisStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedBound {
    pub formula_id: FormulaId,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityReport {
    pub d: usize,
    pub n: usize,
    pub bounds: Vec<BoundEntry>,
    pub skipped: Vec<SkippedBound>,
}

impl RigidityReport {
    pub fn new(d: usize, n: usize) -> Self {
        RigidityReport {
            d,
            n,
            bounds: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn get(&self, id: FormulaId) -> Option<&BoundEntry> {
        self.bounds.iter().find(|b| b.formula_id == id)
    }

    fn push(&mut self, id: FormulaId, value: f64, hypothesis: String, status: HypothesisStatus) {
        self.bounds.push(BoundEntry {
            formula_id: id,
            formula: id.formula(),
            value,
            hypothesis,
            status,
        });
    }

    /// Adds both topological expressions when `count` ovals satisfy the
    /// `(d - 1)^n + 1` hypothesis, otherwise records why they were skipped.
    pub fn add_topological(&mut self, mu: f64, count: usize) -> Result<(), RigidityError> {
        let required = required_oval_count(self.d, self.n);
        if count < required {
            for id in [FormulaId::TopologicalLiteral, FormulaId::TopologicalComposed] {
                self.skipped.push(SkippedBound {
                    formula_id: id,
                    reason: format!("{count} ovals, at least {required} required"),
                });
            }
            return Ok(());
        }
        let hyp = format!("{count} >= (d-1)^n + 1 = {required} disjoint ovals, mu = {mu}");
        let lit = rigidity_topological_literal(mu, self.d, self.n)?;
        let comp = rigidity_topological_composed(mu, self.d, self.n)?;
        self.push(FormulaId::TopologicalLiteral, lit, hyp.clone(), HypothesisStatus::Satisfied);
        self.push(FormulaId::TopologicalComposed, comp, hyp, HypothesisStatus::Satisfied);
        Ok(())
    }

    /// `estimated` marks an inverse Remez constant taken from a sampled
    /// lower estimate of the Remez constant.
    pub fn add_from_remez(&mut self, inverse_remez: f64, estimated: bool) -> Result<(), RigidityError> {
        let v = rigidity_from_remez(inverse_remez, self.d)?;
        let (hyp, status) = if estimated {
            (
                format!("inverse Remez constant {inverse_remez} from a sampled LP estimate"),
                HypothesisStatus::Estimated,
            )
        } else {
            (format!("inverse Remez constant {inverse_remez}"), HypothesisStatus::Satisfied)
        };
        self.push(FormulaId::FromRemez, v, hyp, status);
        Ok(())
    }

    pub fn add_one_dimensional(&mut self, zeros: &[f64], z0: f64, fz0: f64) -> Result<(), RigidityError> {
        let v = rigidity_1d_bound(zeros, z0, fz0, self.d)?;
        self.push(
            FormulaId::OneDimensional,
            v,
            format!("{} distinct zeros, |f(z0)| = {}", zeros.len(), fz0.abs()),
            HypothesisStatus::Satisfied,
        );
        Ok(())
    }

    pub fn add_interior_line(&mut self, r: &LineRestriction) {
        if r.zero_params.len() == self.d + 1 {
            self.push(
                FormulaId::InteriorLine,
                r.bound,
                format!("{} zeros located on the line, |f(z0)| = {}", r.zero_params.len(), r.fz0.abs()),
                HypothesisStatus::Satisfied,
            );
        } else {
            self.skipped.push(SkippedBound {
                formula_id: FormulaId::InteriorLine,
                reason: format!("fewer than {} zeros located on the line", self.d + 1),
            });
        }
    }
}
