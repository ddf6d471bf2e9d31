//! Helpers on dense ascending coefficient slices `c[0] + c[1] t + ...`.

/// Horner evaluation.
pub fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

fn trim(c: &[f64]) -> &[f64] {
    let mut n = c.len();
    while n > 0 && c[n - 1] == 0.0 {
        n -= 1;
    }
    &c[..n]
}

/// Real roots in `[lo, hi]`, located by isolating monotone pieces between
/// consecutive roots of the derivative and bisecting each sign change.
pub fn roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trim(c);
    if c.len() <= 1 {
        return Vec::new();
    }
    if c.len() == 2 {
        let r = -c[0] / c[1];
        return if (lo..=hi).contains(&r) { vec![r] } else { Vec::new() };
    }
    let mut knots = vec![lo];
    knots.extend(roots_in(&derivative(c), lo, hi));
    knots.push(hi);

    let mut roots: Vec<f64> = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (horner(c, a), horner(c, b));
        let r = if fa == 0.0 {
            Some(a)
        } else if fb == 0.0 {
            Some(b)
        } else if (fa < 0.0) != (fb < 0.0) {
            Some(bisect(c, a, b, fa))
        } else {
            None
        };
        if let Some(r) = r {
            if roots.last().is_none_or(|&last| r - last > 1e-14 * (1.0 + r.abs())) {
                roots.push(r);
            }
        }
    }
    roots
}

fn bisect(c: &[f64], mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = horner(c, m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Exact maximum of `|p|` on `[lo, hi]`: endpoints plus interior critical
/// points. Returns `(argmax, max)`.
pub fn max_abs_on(c: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let mut best = (lo, horner(c, lo).abs());
    let mut consider = |t: f64| {
        let v = horner(c, t).abs();
        if v > best.1 {
            best = (t, v);
        }
    };
    consider(hi);
    for t in roots_in(&derivative(c), lo, hi) {
        consider(t);
    }
    best
}

/// Product of two coefficient vectors.
pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
