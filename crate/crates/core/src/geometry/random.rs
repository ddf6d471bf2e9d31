//! Random nested circle configurations for property tests and fixtures.

use rand::Rng;

use super::{validate_configuration, Oval, OvalConfiguration, Point};

/// Disk used while placing circles; converted to a polygon at the end.
#[derive(Debug, Clone, Copy)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
    pub parent: Option<usize>,
    pub depth: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CircleConfigParams {
    pub count: usize,
    pub max_depth: usize,
    pub vertices_per_oval: usize,
    /// Chance that a new circle is placed inside an existing one.
    pub nest_probability: f64,
}

impl Default for CircleConfigParams {
    fn default() -> Self {
        CircleConfigParams {
            count: 8,
            max_depth: 4,
            vertices_per_oval: 48,
            nest_probability: 0.6,
        }
    }
}

const OUTER_RADIUS: f64 = 0.98;
const GAP: f64 = 0.004;

/// Places `params.count` circles with pairwise disjoint boundaries inside
/// the unit disk and nesting depth at most `params.max_depth`.
///
/// Each inscribed polygon of a child lies inside the inscribed circle of
/// its parent's polygon (radius `r cos(π/k)`), so the polygonal ovals keep
/// the nesting of the circles. Returns `None` if placement stalls.
pub fn random_circles<R: Rng>(rng: &mut R, params: &CircleConfigParams) -> Option<Vec<Circle>> {
    let shrink = (std::f64::consts::PI / params.vertices_per_oval as f64).cos();
    let mut circles: Vec<Circle> = Vec::with_capacity(params.count);
    'place: for _ in 0..params.count {
        for _attempt in 0..4000 {
            let eligible: Vec<usize> = (0..circles.len())
                .filter(|&i| circles[i].depth < params.max_depth)
                .collect();
            let parent = if !eligible.is_empty() && rng.gen_bool(params.nest_probability) {
                Some(eligible[rng.gen_range(0..eligible.len())])
            } else {
                None
            };
            let (cc, cr) = match parent {
                None => ([0.0, 0.0], OUTER_RADIUS),
                Some(p) => (circles[p].center, circles[p].radius * shrink - GAP),
            };
            if cr <= 4.0 * GAP {
                continue;
            }
            let r = cr * rng.gen_range(0.08..0.55);
            let room = cr - r - GAP;
            if room <= 0.0 {
                continue;
            }
            let rho = room * rng.gen::<f64>().sqrt();
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let center = [cc[0] + rho * phi.cos(), cc[1] + rho * phi.sin()];
            let clear = circles.iter().filter(|c| c.parent == parent).all(|c| {
                let d = (c.center[0] - center[0]).hypot(c.center[1] - center[1]);
                d > c.radius + r + GAP
            });
            if clear {
                let depth = parent.map_or(1, |p| circles[p].depth + 1);
                circles.push(Circle {
                    center,
                    radius: r,
                    parent,
                    depth,
                });
                continue 'place;
            }
        }
        return None;
    }
    Some(circles)
}

/// Random validated configuration; retries placement until it succeeds.
pub fn random_configuration<R: Rng>(rng: &mut R, params: &CircleConfigParams) -> OvalConfiguration {
    loop {
        let Some(circles) = random_circles(rng, params) else {
            continue;
        };
        let ovals = circles
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                Oval::regular(i as i64, c.center, c.radius, params.vertices_per_oval, phase)
            })
            .collect();
        match validate_configuration(ovals) {
            Ok(cfg) => return cfg,
            Err(_) => continue,
        }
    }
}
