//! Nested plane ovals and their domain decomposition.
//!
//! An oval is a simple counterclockwise polygon in the closed unit disk.
//! A validated [`OvalConfiguration`] has pairwise disjoint boundaries, so
//! any two ovals are either nested or have disjoint interiors. The nesting
//! forest records, for each oval, the smallest oval strictly containing it;
//! the domain of an oval is its interior minus the interiors of its direct
//! children, which gives exactly one domain per oval.
//!
//! Ovals that touch, even at a single point, are rejected.

pub mod random;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Point = [f64; 2];

/// Vertex norms may exceed one by this much (rounding on circle samples).
pub const UNIT_BALL_SLACK: f64 = 1e-12;

/// Vertical shift applied to a point-in-polygon ray that hits a vertex.
const RAY_SHIFT: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("oval {0} has fewer than 3 vertices")]
    TooFewVertices(i64),
    #[error("oval {0} has a non-finite vertex coordinate")]
    NonFiniteVertex(i64),
    #[error("oval {0} has a vertex outside the closed unit disk")]
    OutsideUnitBall(i64),
    #[error("oval {0} is self-intersecting")]
    SelfIntersecting(i64),
    #[error("oval {0} is not oriented counterclockwise")]
    NotCounterclockwise(i64),
    #[error("ovals {0} and {1} have intersecting boundaries")]
    BoundariesIntersect(i64, i64),
    #[error("duplicate oval id {0}")]
    DuplicateId(i64),
    #[error("domain bounded by oval {0} has non-positive area")]
    NonPositiveArea(i64),
    #[error("configuration has no ovals")]
    EmptyConfiguration,
}

/// Closed simple polygon; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Oval {
    pub id: i64,
    pub vertices: Vec<Point>,
}

impl Oval {
    pub fn new(id: i64, vertices: Vec<Point>) -> Self {
        Oval { id, vertices }
    }

    /// Regular `k`-gon inscribed in the circle of the given center and radius.
    pub fn regular(id: i64, center: Point, radius: f64, k: usize, phase: f64) -> Self {
        let vertices = (0..k)
            .map(|j| {
                let a = phase + std::f64::consts::TAU * j as f64 / k as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            })
            .collect();
        Oval { id, vertices }
    }

    /// Axis-aligned square, counterclockwise.
    pub fn square(id: i64, center: Point, side: f64) -> Self {
        let h = side / 2.0;
        let [cx, cy] = center;
        Oval {
            id,
            vertices: vec![
                [cx - h, cy - h],
                [cx + h, cy - h],
                [cx + h, cy + h],
                [cx - h, cy + h],
            ],
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace signed area; positive for counterclockwise order.
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| dist(a, b)).sum()
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(&self.vertices)
    }

    /// Even-odd test with a horizontal ray towards `+x`.
    pub fn contains_point(&self, p: Point) -> bool {
        point_in_polygon(p, &self.vertices)
    }

    /// `m` points spaced uniformly by arc length, starting at vertex 0.
    pub fn sample_boundary(&self, m: usize) -> Vec<Point> {
        let total = self.perimeter();
        if m == 0 || total == 0.0 {
            return Vec::new();
        }
        let step = total / m as f64;
        let mut out = Vec::with_capacity(m);
        let mut edges = self.edges();
        let (mut a, mut b) = edges.next().expect("oval has edges");
        let mut edge_start = 0.0;
        let mut edge_len = dist(a, b);
        for i in 0..m {
            let s = step * i as f64;
            while s > edge_start + edge_len {
                match edges.next() {
                    Some((na, nb)) => {
                        edge_start += edge_len;
                        a = na;
                        b = nb;
                        edge_len = dist(a, b);
                    }
                    None => break,
                }
            }
            let u = if edge_len > 0.0 {
                ((s - edge_start) / edge_len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            out.push([a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of(points: &[Point]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        BBox { min, max }
    }

    pub fn overlaps(&self, o: &BBox) -> bool {
        self.min[0] <= o.max[0]
            && o.min[0] <= self.max[0]
            && self.min[1] <= o.max[1]
            && o.min[1] <= self.max[1]
    }

    pub fn contains_box(&self, o: &BBox) -> bool {
        self.min[0] <= o.min[0]
            && self.min[1] <= o.min[1]
            && o.max[0] <= self.max[0]
            && o.max[1] <= self.max[1]
    }

    pub fn union(&self, o: &BBox) -> BBox {
        BBox {
            min: [self.min[0].min(o.min[0]), self.min[1].min(o.min[1])],
            max: [self.max[0].max(o.max[0]), self.max[1].max(o.max[1])],
        }
    }
}

pub fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let [x0, y0] = vertices[i];
        let [x1, y1] = vertices[(i + 1) % n];
        twice += x0 * y1 - x1 * y0;
    }
    twice / 2.0
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test, touching and collinear overlap included.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Even-odd ray crossing. A horizontal ray passing exactly through a
/// vertex is shifted up by `1e-12` until it misses every vertex.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let px = p[0];
    let mut py = p[1];
    for _ in 0..64 {
        if poly.iter().any(|v| v[1] == py) {
            py += RAY_SHIFT;
        } else {
            break;
        }
    }
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a[1] > py) != (b[1] > py) {
            let x = a[0] + (py - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if x > px {
                inside = !inside;
            }
        }
    }
    inside
}

fn check_simple(oval: &Oval) -> Result<(), GeometryError> {
    let v = &oval.vertices;
    let n = v.len();
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let c = v[(i + 2) % n];
        if a == b {
            return Err(GeometryError::SelfIntersecting(oval.id));
        }
        // adjacent edges folding back onto each other
        let dot = (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]);
        if orient(a, b, c) == 0.0 && dot < 0.0 {
            return Err(GeometryError::SelfIntersecting(oval.id));
        }
    }
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return Err(GeometryError::SelfIntersecting(oval.id));
            }
        }
    }
    Ok(())
}

fn boundaries_intersect(a: &Oval, b: &Oval) -> bool {
    if !a.bbox().overlaps(&b.bbox()) {
        return false;
    }
    for (p1, p2) in a.edges() {
        let eb = BBox::of(&[p1, p2]);
        for (q1, q2) in b.edges() {
            if eb.overlaps(&BBox::of(&[q1, q2])) && segments_intersect(p1, p2, q1, q2) {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    /// Reject vertices with norm above `1 + UNIT_BALL_SLACK`.
    pub require_unit_ball: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            require_unit_ball: true,
        }
    }
}

/// Set of ovals satisfying every configuration invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OvalConfiguration {
    ovals: Vec<Oval>,
}

impl OvalConfiguration {
    pub fn ovals(&self) -> &[Oval] {
        &self.ovals
    }

    pub fn len(&self) -> usize {
        self.ovals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ovals.is_empty()
    }

    pub fn index_of(&self, id: i64) -> Option<usize> {
        self.ovals.iter().position(|o| o.id == id)
    }

    pub fn bbox(&self) -> Option<BBox> {
        self.ovals.iter().map(Oval::bbox).reduce(|a, b| a.union(&b))
    }

    /// All boundary samples, `per_oval` per oval.
    pub fn sample_boundaries(&self, per_oval: usize) -> Vec<Point> {
        self.ovals
            .iter()
            .flat_map(|o| o.sample_boundary(per_oval))
            .collect()
    }
}

pub fn validate_configuration(ovals: Vec<Oval>) -> Result<OvalConfiguration, GeometryError> {
    validate_configuration_with(ovals, ValidationOptions::default())
}

pub fn validate_configuration_with(
    ovals: Vec<Oval>,
    opts: ValidationOptions,
) -> Result<OvalConfiguration, GeometryError> {
    let mut ids = std::collections::BTreeSet::new();
    for o in &ovals {
        if !ids.insert(o.id) {
            return Err(GeometryError::DuplicateId(o.id));
        }
        if o.vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(o.id));
        }
        if o.vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFiniteVertex(o.id));
        }
        if opts.require_unit_ball
            && o.vertices
                .iter()
                .any(|v| v[0].hypot(v[1]) > 1.0 + UNIT_BALL_SLACK)
        {
            return Err(GeometryError::OutsideUnitBall(o.id));
        }
        check_simple(o)?;
        if o.signed_area() <= 0.0 {
            return Err(GeometryError::NotCounterclockwise(o.id));
        }
    }
    for i in 0..ovals.len() {
        for j in i + 1..ovals.len() {
            if boundaries_intersect(&ovals[i], &ovals[j]) {
                return Err(GeometryError::BoundariesIntersect(ovals[i].id, ovals[j].id));
            }
        }
    }
    Ok(OvalConfiguration { ovals })
}

/// Whether `b` lies strictly inside `a`.
///
/// Only meaningful for ovals with disjoint boundaries (as in a validated
/// configuration): then `b` is either wholly inside or wholly outside `a`,
/// so testing a single vertex of `b` decides it. Distinct-area and
/// bounding-box checks run first and make the relation irreflexive.
pub fn contains(a: &Oval, b: &Oval) -> bool {
    if a == b || b.area() >= a.area() {
        return false;
    }
    if !a.bbox().contains_box(&b.bbox()) {
        return false;
    }
    point_in_polygon(b.vertices[0], &a.vertices)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForestNode {
    pub id: i64,
    /// Index of the smallest strictly containing oval.
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// 1 for ovals contained in no other oval.
    pub depth: usize,
}

/// Containment hierarchy, indexed in configuration order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestingForest {
    pub nodes: Vec<ForestNode>,
}

impl NestingForest {
    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.parent.is_none())
            .map(|(i, _)| i)
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }
}

/// Depth is one plus the number of containing ovals; the parent is the
/// deepest of those.
pub fn build_nesting_forest(config: &OvalConfiguration) -> NestingForest {
    let ovals = config.ovals();
    let n = ovals.len();
    let containers: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| contains(&ovals[j], &ovals[i])).collect())
        .collect();
    let depths: Vec<usize> = containers.iter().map(|c| c.len() + 1).collect();
    let mut nodes: Vec<ForestNode> = (0..n)
        .map(|i| ForestNode {
            id: ovals[i].id,
            parent: containers[i].iter().copied().max_by_key(|&j| depths[j]),
            children: Vec::new(),
            depth: depths[i],
        })
        .collect();
    for i in 0..n {
        if let Some(p) = nodes[i].parent {
            nodes[p].children.push(i);
        }
    }
    NestingForest { nodes }
}

/// Region bounded outside by one oval and inside by its direct children.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    pub outer: usize,
    pub holes: Vec<usize>,
    pub outer_id: i64,
    pub hole_ids: Vec<i64>,
    pub area: f64,
}

impl Domain {
    /// Whether `p` is inside the outer oval and outside every hole.
    pub fn contains_point(&self, config: &OvalConfiguration, p: Point) -> bool {
        let ovals = config.ovals();
        ovals[self.outer].contains_point(p) && !self.holes.iter().any(|&h| ovals[h].contains_point(p))
    }
}

pub fn build_domains(
    config: &OvalConfiguration,
    forest: &NestingForest,
) -> Result<Vec<Domain>, GeometryError> {
    let ovals = config.ovals();
    forest
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let d = Domain {
                outer: i,
                holes: node.children.clone(),
                outer_id: node.id,
                hole_ids: node.children.iter().map(|&c| ovals[c].id).collect(),
                area: 0.0,
            };
            let area = domain_area(config, &d)?;
            Ok(Domain { area, ..d })
        })
        .collect()
}

/// Outer shoelace area minus the hole areas.
pub fn domain_area(config: &OvalConfiguration, d: &Domain) -> Result<f64, GeometryError> {
    let ovals = config.ovals();
    let area = ovals[d.outer].area() - d.holes.iter().map(|&h| ovals[h].area()).sum::<f64>();
    if area > 0.0 {
        Ok(area)
    } else {
        Err(GeometryError::NonPositiveArea(ovals[d.outer].id))
    }
}

/// Smallest domain area.
pub fn mu(domains: &[Domain]) -> Result<f64, GeometryError> {
    domains
        .iter()
        .map(|d| d.area)
        .reduce(f64::min)
        .ok_or(GeometryError::EmptyConfiguration)
}

/// Index of the domain containing `p` (the deepest oval around it).
pub fn locate_domain(config: &OvalConfiguration, forest: &NestingForest, p: Point) -> Option<usize> {
    config
        .ovals()
        .iter()
        .enumerate()
        .filter(|(_, o)| o.contains_point(p))
        .max_by_key(|(i, _)| forest.nodes[*i].depth)
        .map(|(i, _)| i)
}

/// Everything derived from a configuration in one pass.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub forest: NestingForest,
    pub domains: Vec<Domain>,
    pub mu: f64,
}

pub fn decompose(config: &OvalConfiguration) -> Result<Decomposition, GeometryError> {
    let forest = build_nesting_forest(config);
    let domains = build_domains(config, &forest)?;
    let mu = mu(&domains)?;
    Ok(Decomposition { forest, domains, mu })
}

/// JSON layout `{"ovals": [{"id": .., "vertices": [[x, y], ..]}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigurationFile {
    pub ovals: Vec<Oval>,
}
