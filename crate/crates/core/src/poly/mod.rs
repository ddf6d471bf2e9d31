//! Dense multivariate polynomials over `f64`.
//!
//! Terms are stored in a `BTreeMap` keyed by the exponent tuple, which keeps
//! iteration (and therefore every derived report) deterministic. Zero
//! coefficients are never stored.
//!
//! Derivative norms follow the convention used throughout the crate: the
//! order-`k` norm at a point is the sum of `|∂^α p(x)|` over all distinct
//! multi-indices `α` with `|α| = k`, each multi-index counted once (no
//! multinomial weights).

pub mod univariate;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomial must have at least one variable")]
    NoVariables,
    #[error("duplicate exponent {0:?} in term list")]
    DuplicateExponent(Vec<u32>),
    #[error("non-finite coefficient for exponent {0:?}")]
    NonFiniteCoefficient(Vec<u32>),
    #[error("basis size overflows for n = {n}, d = {d}")]
    Overflow { n: usize, d: usize },
}

/// Multivariate real polynomial in `nvars` variables.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyWire", into = "PolyWire")]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl MultiPoly {
    /// The zero polynomial.
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars >= 1, "polynomial needs at least one variable");
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_axis`.
    pub fn var(nvars: usize, axis: usize) -> Self {
        assert!(axis < nvars, "axis {axis} out of range for {nvars} variables");
        let mut exp = vec![0; nvars];
        exp[axis] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exp, 1.0);
        p
    }

    /// Univariate polynomial from ascending coefficients `c[0] + c[1] t + ...`.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let mut p = Self::zero(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(vec![k as u32], c);
        }
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs. Repeated
    /// exponents are summed.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        if nvars == 0 {
            return Err(PolyError::NoVariables);
        }
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: nvars,
                    got: exp.len(),
                });
            }
            if !c.is_finite() {
                return Err(PolyError::NonFiniteCoefficient(exp));
            }
            p.add_term(exp, c);
        }
        Ok(p)
    }

    /// Coefficients in the given monomial basis.
    pub fn from_basis(nvars: usize, basis: &[Vec<u32>], coeffs: &[f64]) -> Self {
        assert_eq!(basis.len(), coeffs.len());
        let mut p = Self::zero(nvars);
        for (exp, &c) in basis.iter().zip(coeffs) {
            p.add_term(exp.clone(), c);
        }
        p
    }

    fn add_term(&mut self, exp: Vec<u32>, c: f64) {
        debug_assert_eq!(exp.len(), self.nvars);
        if c == 0.0 {
            return;
        }
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exp: &[u32]) -> f64 {
        self.terms.get(exp).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree; `0` for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as usize).sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    /// Largest absolute coefficient.
    pub fn coef_max_norm(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coef_l2_norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Monomial-sum evaluation without the dimension check.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (exp, &c) in &self.terms {
            let mut m = c;
            for (xi, &k) in x.iter().zip(exp) {
                if k > 0 {
                    m *= xi.powi(k as i32);
                }
            }
            acc += m;
        }
        acc
    }

    /// Formal partial derivative along `axis`.
    pub fn partial_derivative(&self, axis: usize) -> Self {
        assert!(axis < self.nvars, "axis {axis} out of range");
        let mut out = Self::zero(self.nvars);
        for (exp, &c) in &self.terms {
            let k = exp[axis];
            if k == 0 {
                continue;
            }
            let mut e = exp.clone();
            e[axis] = k - 1;
            out.add_term(e, c * k as f64);
        }
        out
    }

    /// Mixed derivative `∂^α p` for a multi-index `alpha`.
    pub fn derivative(&self, alpha: &[u32]) -> Self {
        assert_eq!(alpha.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        'terms: for (exp, &c) in &self.terms {
            let mut coef = c;
            let mut e = exp.clone();
            for (i, &a) in alpha.iter().enumerate() {
                if e[i] < a {
                    continue 'terms;
                }
                for j in 0..a {
                    coef *= (e[i] - j) as f64;
                }
                e[i] -= a;
            }
            out.add_term(e, coef);
        }
        out
    }

    /// All derivatives of total order `k`, one per multi-index.
    pub fn derivatives_of_order(&self, k: usize) -> Vec<Self> {
        multi_indices(self.nvars, k)
            .iter()
            .map(|a| self.derivative(a))
            .filter(|p| !p.is_zero())
            .collect()
    }

    /// `Σ_{|α| = k} |∂^α p(x)|`.
    pub fn derivative_norm_pointwise(&self, k: usize, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        if k > self.degree() {
            return Ok(0.0);
        }
        Ok(self
            .derivatives_of_order(k)
            .iter()
            .map(|q| q.eval_unchecked(x).abs())
            .sum())
    }

    /// Maximum of the pointwise order-`k` norm over a finite point set.
    pub fn derivative_norm_max<'a, I>(&self, k: usize, points: I) -> Result<DerivativeNorm, PolyError>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let ders = self.derivatives_of_order(k);
        let mut value: f64 = 0.0;
        for x in points {
            if x.len() != self.nvars {
                return Err(PolyError::DimensionMismatch {
                    expected: self.nvars,
                    got: x.len(),
                });
            }
            let v: f64 = ders.iter().map(|q| q.eval_unchecked(x).abs()).sum();
            value = value.max(v);
        }
        Ok(DerivativeNorm { order: k, value })
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.partial_derivative(i)).collect()
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(self.nvars, 1.0);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitutes `x_i := omega[i]`. All entries of `omega` must share the
    /// same number of variables, which becomes the variable count of the
    /// result (univariate curves give a univariate result).
    pub fn compose(&self, omega: &[MultiPoly]) -> Result<Self, PolyError> {
        if omega.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars,
                got: omega.len(),
            });
        }
        let m = omega[0].nvars;
        if let Some(bad) = omega.iter().find(|w| w.nvars != m) {
            return Err(PolyError::DimensionMismatch {
                expected: m,
                got: bad.nvars,
            });
        }
        // powers[i][k] = omega_i^k, filled lazily up to the max exponent used.
        let mut max_exp = vec![0u32; self.nvars];
        for exp in self.terms.keys() {
            for (i, &k) in exp.iter().enumerate() {
                max_exp[i] = max_exp[i].max(k);
            }
        }
        let powers: Vec<Vec<MultiPoly>> = omega
            .iter()
            .zip(&max_exp)
            .map(|(w, &top)| {
                let mut v = Vec::with_capacity(top as usize + 1);
                v.push(MultiPoly::constant(m, 1.0));
                for k in 1..=top as usize {
                    let next = &v[k - 1] * w;
                    v.push(next);
                }
                v
            })
            .collect();

        let mut out = MultiPoly::zero(m);
        for (exp, &c) in &self.terms {
            let mut term = MultiPoly::constant(m, c);
            for (i, &k) in exp.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Dense ascending coefficients of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Vec<f64> {
        assert_eq!(self.nvars, 1, "not a univariate polynomial");
        let mut c = vec![0.0; self.degree() + 1];
        for (e, &v) in &self.terms {
            c[e[0] as usize] = v;
        }
        c
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}](", self.nvars)?;
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{e:?}")?;
        }
        write!(f, ")")
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &rhs.scale(-1.0)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(-1.0)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut acc: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        acc.retain(|_, c| *c != 0.0);
        MultiPoly {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

/// Sup-type derivative norm of a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeNorm {
    pub order: usize,
    pub value: f64,
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    exp: Vec<u32>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    nvars: usize,
    terms: Vec<TermWire>,
}

impl TryFrom<PolyWire> for MultiPoly {
    type Error = PolyError;
    fn try_from(w: PolyWire) -> Result<Self, PolyError> {
        let mut seen = std::collections::BTreeSet::new();
        for t in &w.terms {
            if !seen.insert(t.exp.clone()) {
                return Err(PolyError::DuplicateExponent(t.exp.clone()));
            }
        }
        MultiPoly::from_terms(w.nvars, w.terms.into_iter().map(|t| (t.exp, t.coef)))
    }
}

impl From<MultiPoly> for PolyWire {
    fn from(p: MultiPoly) -> Self {
        PolyWire {
            nvars: p.nvars,
            terms: p
                .terms
                .into_iter()
                .map(|(exp, coef)| TermWire { exp, coef })
                .collect(),
        }
    }
}

/// Chebyshev polynomial of the first kind, `T_0 = 1`, `T_1 = t`,
/// `T_{k+1} = 2t T_k - T_{k-1}`.
pub fn chebyshev(d: usize) -> MultiPoly {
    let mut prev = MultiPoly::constant(1, 1.0);
    if d == 0 {
        return prev;
    }
    let two_t = MultiPoly::univariate(&[0.0, 2.0]);
    let mut cur = MultiPoly::var(1, 0);
    for _ in 1..d {
        let next = &(&two_t * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `T_d(t)` by the three-term recurrence, without building the polynomial.
pub fn chebyshev_value(d: usize, t: f64) -> f64 {
    let (mut a, mut b) = (1.0, t);
    if d == 0 {
        return a;
    }
    for _ in 1..d {
        let c = 2.0 * t * b - a;
        a = b;
        b = c;
    }
    b
}

/// Dimension of the space of polynomials of degree `≤ d` in `n` variables,
/// `C(n + d, n)`.
pub fn basis_size(n: usize, d: usize) -> Result<usize, PolyError> {
    let mut r: usize = 1;
    for i in 1..=n {
        // r * (d + i) / i is exactly C(d + i, i)
        r = r
            .checked_mul(d.checked_add(i).ok_or(PolyError::Overflow { n, d })?)
            .ok_or(PolyError::Overflow { n, d })?
            / i;
    }
    Ok(r)
}

/// All exponent tuples of length `n` with total degree exactly `k`, in
/// descending lexicographic order (`x_0` heaviest first).
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            prefix.push(k as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first as u32);
            rec(n - 1, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, k, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Monomials of total degree `≤ d` in graded-lexicographic order.
pub fn monomial_basis(n: usize, d: usize) -> Vec<Vec<u32>> {
    (0..=d).flat_map(|k| multi_indices(n, k)).collect()
}
