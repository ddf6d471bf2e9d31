mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smoothrig::curves::{chebyshev_nodes, composition_report, fit_curve, ParamCurve};

fn random_curve<R: Rng>(rng: &mut R, s: usize) -> ParamCurve {
    loop {
        let comps: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..=s).map(|_| rng.gen_range(-0.35..0.35)).collect())
            .collect();
        if let Ok(c) = ParamCurve::new(comps, s) {
            return c;
        }
    }
}

#[test]
fn composition_degree_and_positivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let df = rng.gen_range(1..=4usize);
        let s = rng.gen_range(1..=3usize);
        let f = common::random_poly(&mut rng, 2, df);
        let omega = random_curve(&mut rng, s);
        let g = f.compose(&omega.as_polys()).unwrap();
        assert!(g.degree() <= s * f.degree());
        let d = rng.gen_range(1..=(df * s).max(1));
        let r = composition_report(&f, &omega, d, 64).unwrap();
        assert!(r.positivity_holds);
        if !r.all_degenerate {
            assert!(r.c_hat.unwrap() > 0.0);
            assert!(r.max_lhs >= r.c_hat.unwrap() * r.max_rhs * (1.0 - 1e-12));
        }
    }
}

#[test]
fn fitted_curves_reproduce_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut fitted = 0;
    for _ in 0..200 {
        let s = rng.gen_range(1..=4usize);
        let k = rng.gen_range(1..=s + 1);
        let pts: Vec<Vec<f64>> = (0..k)
            .map(|_| vec![rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)])
            .collect();
        let Ok(c) = fit_curve(&pts, s) else { continue };
        fitted += 1;
        for (t, p) in chebyshev_nodes(k).iter().zip(&pts) {
            let q = c.eval(*t);
            assert!((q[0] - p[0]).abs() <= 1e-10 && (q[1] - p[1]).abs() <= 1e-10);
        }
    }
    assert!(fitted > 100);
}
