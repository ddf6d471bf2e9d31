#![allow(dead_code)]

use rand::Rng;
use smoothrig::poly::{monomial_basis, MultiPoly};

/// Dense random polynomial with uniform coefficients in `[-1, 1]`.
pub fn random_poly<R: Rng>(rng: &mut R, n: usize, d: usize) -> MultiPoly {
    let basis = monomial_basis(n, d);
    let coeffs: Vec<f64> = basis.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    MultiPoly::from_basis(n, &basis, &coeffs)
}
