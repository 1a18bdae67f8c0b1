//! Sectors, convex polygons, polygonal-nest / polygonal-cell structures,
//! angle rationality classification, and local corner frames.
//!
//! A corner is modeled by a [`Sector`]: the set of points whose polar angle
//! lies in `[theta_m, theta_M]` within radius `r0`, with opening angle
//! `beta = theta_M - theta_m` in `(0, pi)`. Whether `beta / pi` is rational
//! decides the behavior of every determinant system downstream, so the
//! classification is explicit and bounded: [`classify_angle`] searches
//! continued-fraction approximants up to a denominator bound instead of
//! pretending to decide irrationality in floating point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("angle {0} outside (0, 2 pi)")]
    AngleOutOfRange(f64),
    #[error("vertex index {index} out of range for polygon with {len} vertices")]
    VertexOutOfRange { index: usize, len: usize },
    #[error("r0 = {r0} too large: ball at vertex {index} reaches a non-incident edge")]
    CornerBallTooLarge { r0: f64, index: usize },
    #[error("polygon must have at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not strictly convex near vertex {0}")]
    NotConvex(usize),
    #[error("polygon vertices must be in counterclockwise order")]
    NotCounterClockwise,
    #[error("sector requires -pi <= theta_m < theta_M < pi with opening in (0, pi)")]
    BadSector,
}

/// Plane vector / point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn from_polar(r: f64, theta: f64) -> Vec2 {
        Vec2::new(r * theta.cos(), r * theta.sin())
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Corner region: polar angles in `[theta_m, theta_M]`, radius `r0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub theta_m: f64,
    pub theta_max: f64,
    pub r0: f64,
}

impl Sector {
    pub fn new(theta_m: f64, theta_max: f64, r0: f64) -> Result<Self, GeometryError> {
        let opening = theta_max - theta_m;
        if !(-PI..PI).contains(&theta_m)
            || theta_max >= PI
            || !(opening > 0.0 && opening < PI)
            || !(r0 > 0.0)
        {
            return Err(GeometryError::BadSector);
        }
        Ok(Self {
            theta_m,
            theta_max,
            r0,
        })
    }

    /// Opening angle `beta = theta_M - theta_m`.
    pub fn opening(&self) -> f64 {
        self.theta_max - self.theta_m
    }

    /// Bisector angle.
    pub fn bisector(&self) -> f64 {
        0.5 * (self.theta_m + self.theta_max)
    }

    /// Symmetric sector of opening `beta` about the positive x-axis.
    pub fn symmetric(beta: f64, r0: f64) -> Result<Self, GeometryError> {
        Sector::new(-beta / 2.0, beta / 2.0, r0)
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        (self.theta_m..=self.theta_max).contains(&theta)
    }
}

/// Rationality verdict for an angle `omega = lambda pi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleClass {
    /// `omega` is within `tol` of `(p/q) pi` with `q <= Q`, `gcd(p, q) = 1`.
    Rational { p: i64, q: i64 },
    /// No reduced fraction with denominator `<= bound` approximates
    /// `omega / pi` within the tolerance.
    IrrationalWithin { bound: i64 },
}

/// Best continued-fraction classification of `omega / pi` with denominators
/// bounded by `q_bound`.
///
/// Returns the best rational approximant if it lands within `tol_angle`,
/// otherwise `IrrationalWithin(q_bound)`. Semiconvergents are scanned along
/// with convergents, so the result is the true best approximation with
/// bounded denominator.
pub fn classify_angle(omega: f64, q_bound: i64, tol_angle: f64) -> Result<AngleClass, GeometryError> {
    if !(omega > 0.0 && omega < 2.0 * PI) {
        return Err(GeometryError::AngleOutOfRange(omega));
    }
    assert!(q_bound >= 2, "denominator bound must be >= 2");
    assert!(tol_angle > 0.0);
    let lambda = omega / PI;
    let (p, q, err) = best_rational(lambda, q_bound);
    if err < tol_angle {
        Ok(AngleClass::Rational { p, q })
    } else {
        Ok(AngleClass::IrrationalWithin { bound: q_bound })
    }
}

/// Best rational approximation `p/q` of `x > 0` with `q <= q_bound`,
/// via continued fractions including semiconvergents. Returns
/// `(p, q, |x - p/q|)`.
pub fn best_rational(x: f64, q_bound: i64) -> (i64, i64, f64) {
    // convergents p_k/q_k; the best bounded-denominator approximant is the
    // last convergent with q <= bound or a semiconvergent of the next step
    let (mut p_prev, mut q_prev): (i64, i64) = (1, 0);
    let (mut p_cur, mut q_cur): (i64, i64) = (x.floor() as i64, 1);
    let mut frac = x - x.floor();
    let mut best = (p_cur, q_cur, (x - p_cur as f64).abs());
    for _ in 0..64 {
        if frac.abs() < 1e-18 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor() as i64;
        frac = inv - inv.floor();
        let p_next = a.saturating_mul(p_cur).saturating_add(p_prev);
        let q_next = a.saturating_mul(q_cur).saturating_add(q_prev);
        if q_next > q_bound {
            // semiconvergents (p_prev + t p_cur) / (q_prev + t q_cur)
            let t_max = (q_bound - q_prev) / q_cur;
            let t_min = (a + 1) / 2; // only t >= ceil(a/2) can beat the last convergent
            let mut t = t_max;
            if t < t_min {
                t = t_min;
            }
            if t >= t_min && t <= t_max && t >= 1 {
                let ps = p_prev + t * p_cur;
                let qs = q_prev + t * q_cur;
                let err = (x - ps as f64 / qs as f64).abs();
                if err < best.2 {
                    best = (ps, qs, err);
                }
            }
            break;
        }
        let err = (x - p_next as f64 / q_next as f64).abs();
        if err < best.2 {
            best = (p_next, q_next, err);
        }
        (p_prev, q_prev) = (p_cur, q_cur);
        (p_cur, q_cur) = (p_next, q_next);
    }
    best
}

/// Linear refractive index `q(x) = q0 + q1 x1 + q2 x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearIndex {
    pub q0: Complex64,
    pub q1: Complex64,
    pub q2: Complex64,
}

impl LinearIndex {
    pub fn constant(q0: Complex64) -> Self {
        Self {
            q0,
            q1: Complex64::new(0.0, 0.0),
            q2: Complex64::new(0.0, 0.0),
        }
    }

    pub fn eval(&self, x: Vec2) -> Complex64 {
        self.q0 + self.q1 * x.x + self.q2 * x.y
    }
}

/// Convex polygon with counterclockwise vertices; convexity is checked on
/// construction by cross-product signs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let n = vertices.len();
        let mut area2 = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            area2 += a.cross(b);
        }
        if area2 <= 0.0 {
            return Err(GeometryError::NotCounterClockwise);
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).cross(c - b) <= 0.0 {
                return Err(GeometryError::NotConvex((i + 1) % n));
            }
        }
        Ok(Self { vertices })
    }

    /// Regular n-gon.
    pub fn regular(n: usize, radius: f64, center: Vec2) -> Self {
        let vertices = (0..n)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / n as f64;
                center + Vec2::from_polar(radius, th)
            })
            .collect();
        Self::new(vertices).expect("regular polygon is convex")
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interior angle at vertex `i`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let prev = self.vertices[(i + n - 1) % n];
        let v = self.vertices[i];
        let next = self.vertices[(i + 1) % n];
        let u = (prev - v).normalized();
        let w = (next - v).normalized();
        u.dot(w).clamp(-1.0, 1.0).acos()
    }

    /// Strict interior test (boundary counts as outside).
    pub fn contains(&self, p: Vec2) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (b - a).cross(p - a) <= 0.0 {
                return false;
            }
        }
        true
    }

    /// Signed distance-style containment with tolerance: minimum over edges
    /// of the inward distance (positive inside).
    pub fn inward_distance(&self, p: Vec2) -> f64 {
        let n = self.vertices.len();
        let mut d = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let t = (b - a).normalized();
            d = d.min(t.cross(p - a));
        }
        d
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, &a) in self.vertices.iter().enumerate() {
            for &b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Distance from point to the polygon boundary.
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        let n = self.vertices.len();
        let mut d = f64::INFINITY;
        for i in 0..n {
            d = d.min(segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]));
        }
        d
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let mut area2 = 0.0;
        for i in 0..n {
            area2 += self.vertices[i].cross(self.vertices[(i + 1) % n]);
        }
        area2 / 2.0
    }
}

pub fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Rigid motion `x_global = R(angle) x_local + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    pub angle: f64,
    pub translation: Vec2,
}

impl RigidMotion {
    pub fn apply(&self, local: Vec2) -> Vec2 {
        let (s, c) = self.angle.sin_cos();
        Vec2::new(
            c * local.x - s * local.y + self.translation.x,
            s * local.x + c * local.y + self.translation.y,
        )
    }

    pub fn inverse_apply(&self, global: Vec2) -> Vec2 {
        let (s, c) = self.angle.sin_cos();
        let d = global - self.translation;
        Vec2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }
}

/// Local sector frame at a polygon vertex.
///
/// Returns the corner as a [`Sector`] in a frame with the vertex at the
/// origin and the bisector along the positive x-axis, plus the rigid motion
/// mapping local back to global coordinates.
pub fn corner_at_vertex(
    polygon: &ConvexPolygon,
    vertex_index: usize,
    r0: f64,
) -> Result<(Sector, RigidMotion), GeometryError> {
    let n = polygon.len();
    if vertex_index >= n {
        return Err(GeometryError::VertexOutOfRange {
            index: vertex_index,
            len: n,
        });
    }
    let v = polygon.vertices()[vertex_index];
    let prev = polygon.vertices()[(vertex_index + n - 1) % n];
    let next = polygon.vertices()[(vertex_index + 1) % n];
    // the ball may only meet the two incident edges
    for i in 0..n {
        if i == vertex_index || (i + 1) % n == vertex_index {
            continue;
        }
        let a = polygon.vertices()[i];
        let b = polygon.vertices()[(i + 1) % n];
        if segment_distance(v, a, b) <= r0 {
            return Err(GeometryError::CornerBallTooLarge {
                r0,
                index: vertex_index,
            });
        }
    }
    // also require r0 shorter than both incident edges
    if (next - v).norm() <= r0 || (prev - v).norm() <= r0 {
        return Err(GeometryError::CornerBallTooLarge {
            r0,
            index: vertex_index,
        });
    }
    let dir_a = (next - v).angle();
    let dir_b = (prev - v).angle();
    let opening = polygon.interior_angle(vertex_index);
    // local frame: theta_m = 0 along the edge toward the next vertex; the
    // interior lies counterclockwise from it for a CCW polygon
    let sector = Sector::new(0.0, opening, r0)?;
    let motion = RigidMotion {
        angle: dir_a,
        translation: v,
    };
    debug_assert!(
        angle_close(motion.angle + opening, dir_b),
        "frame mismatch: {} vs {}",
        motion.angle + opening,
        dir_b
    );
    Ok((sector, motion))
}

fn angle_close(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(2.0 * PI);
    d < 1e-9 || d > 2.0 * PI - 1e-9
}

/// Polygonal-nest scatterer: strictly nested convex layers with a linear
/// index on each shell region and a conductive constant on each interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestScatterer {
    /// Layers outermost first: `layers[0]` is the scatterer boundary.
    pub layers: Vec<ConvexPolygon>,
    /// `indices[i]` is the refractive index on `layers[i] \ layers[i+1]`.
    pub indices: Vec<LinearIndex>,
    /// `etas[i]` is the conductive constant on the boundary of `layers[i]`.
    pub etas: Vec<Complex64>,
}

/// Polygonal-cell scatterer: a partition of a polygon into convex cells
/// sharing a single conductive constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellScatterer {
    pub cells: Vec<ConvexPolygon>,
    pub indices: Vec<LinearIndex>,
    /// Shared conductive constant on all cell boundaries.
    pub eta: Complex64,
}

/// A violation of the structural invariants, as data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StructureViolation {
    /// Layer `inner` is not compactly contained in layer `outer`.
    NestingBroken { outer: usize, inner: usize, separation: f64 },
    /// Mismatched layer / index / eta counts.
    CountMismatch { layers: usize, indices: usize, etas: usize },
    /// Cells `a` and `b` overlap.
    CellsOverlap { a: usize, b: usize },
    /// The cell closures do not cover the hull of the union.
    CoverageGap { witness: (f64, f64) },
    /// Cell `cell` has no vertex whose two incident edges lie on the outer
    /// boundary.
    NoBoundaryVertex { cell: usize },
}

impl std::fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StructureViolation::NestingBroken { outer, inner, separation } => write!(
                f,
                "layer {inner} is not strictly inside layer {outer} (separation {separation:.3e})"
            ),
            StructureViolation::CountMismatch { layers, indices, etas } => write!(
                f,
                "count mismatch: {layers} layers, {indices} indices, {etas} etas"
            ),
            StructureViolation::CellsOverlap { a, b } => write!(f, "cells {a} and {b} overlap"),
            StructureViolation::CoverageGap { witness } => write!(
                f,
                "cell union does not cover the domain near ({}, {})",
                witness.0, witness.1
            ),
            StructureViolation::NoBoundaryVertex { cell } => write!(
                f,
                "cell {cell} has no vertex with both incident edges on the outer boundary"
            ),
        }
    }
}

/// Relative separation demanded by the strict-nesting check.
pub const NESTING_SEPARATION_REL: f64 = 1e-9;

/// Check the polygonal-nest invariants; an empty list means valid.
pub fn validate_nest(s: &NestScatterer) -> Vec<StructureViolation> {
    let mut out = Vec::new();
    if s.indices.len() != s.layers.len() || s.etas.len() != s.layers.len() {
        out.push(StructureViolation::CountMismatch {
            layers: s.layers.len(),
            indices: s.indices.len(),
            etas: s.etas.len(),
        });
    }
    if s.layers.is_empty() {
        return out;
    }
    let min_sep = NESTING_SEPARATION_REL * s.layers[0].diameter();
    for i in 0..s.layers.len().saturating_sub(1) {
        let outer = &s.layers[i];
        let inner = &s.layers[i + 1];
        let mut sep = f64::INFINITY;
        for &v in inner.vertices() {
            sep = sep.min(outer.inward_distance(v));
        }
        if !(sep > min_sep) {
            out.push(StructureViolation::NestingBroken {
                outer: i,
                inner: i + 1,
                separation: sep,
            });
        }
    }
    out
}

/// Check the polygonal-cell invariants; an empty list means valid.
///
/// Coverage (clause b) is verified on a deterministic sample grid over the
/// hull of the union; pairwise disjointness by mutual vertex containment and
/// edge midpoint checks; clause (c) by matching cell edges against the outer
/// boundary.
pub fn validate_cell(s: &CellScatterer) -> Vec<StructureViolation> {
    let mut out = Vec::new();
    if s.indices.len() != s.cells.len() {
        out.push(StructureViolation::CountMismatch {
            layers: s.cells.len(),
            indices: s.indices.len(),
            etas: 1,
        });
    }
    let n = s.cells.len();
    if n == 0 {
        return out;
    }
    // pairwise interior disjointness
    for a in 0..n {
        for b in a + 1..n {
            if cells_overlap(&s.cells[a], &s.cells[b]) {
                out.push(StructureViolation::CellsOverlap { a, b });
            }
        }
    }
    // coverage of the hull of all vertices on a sample grid
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in &s.cells {
        for v in c.vertices() {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
    }
    let outer = outer_boundary_edges(s);
    let tol = 1e-9 * (hi - lo).norm();
    let grid = 48;
    'grid: for gi in 0..=grid {
        for gj in 0..=grid {
            let p = Vec2::new(
                lo.x + (hi.x - lo.x) * gi as f64 / grid as f64,
                lo.y + (hi.y - lo.y) * gj as f64 / grid as f64,
            );
            let inside_hull = point_in_union_hull(s, p, tol);
            if !inside_hull {
                continue;
            }
            let covered = s
                .cells
                .iter()
                .any(|c| c.inward_distance(p) > -tol);
            if !covered {
                out.push(StructureViolation::CoverageGap {
                    witness: (p.x, p.y),
                });
                break 'grid;
            }
        }
    }
    // clause (c): each cell needs a vertex whose two incident edges lie on
    // the outer boundary of the union
    for (ci, cell) in s.cells.iter().enumerate() {
        let m = cell.len();
        let mut ok = false;
        for vi in 0..m {
            let prev_edge = (cell.vertices()[(vi + m - 1) % m], cell.vertices()[vi]);
            let next_edge = (cell.vertices()[vi], cell.vertices()[(vi + 1) % m]);
            if edge_on_outer(&outer, prev_edge, tol) && edge_on_outer(&outer, next_edge, tol) {
                ok = true;
                break;
            }
        }
        if !ok {
            out.push(StructureViolation::NoBoundaryVertex { cell: ci });
        }
    }
    out
}

fn cells_overlap(a: &ConvexPolygon, b: &ConvexPolygon) -> bool {
    // strict interior overlap witnessed by a vertex or centroid
    let centroid = |p: &ConvexPolygon| {
        let mut c = Vec2::new(0.0, 0.0);
        for v in p.vertices() {
            c = c + *v;
        }
        c * (1.0 / p.len() as f64)
    };
    let tol = -1e-12 * (a.diameter() + b.diameter());
    if b.inward_distance(centroid(a)) > -tol || a.inward_distance(centroid(b)) > -tol {
        return true;
    }
    let eps = 1e-9 * (a.diameter() + b.diameter());
    for &v in a.vertices() {
        if b.inward_distance(v) > eps {
            return true;
        }
    }
    for &v in b.vertices() {
        if a.inward_distance(v) > eps {
            return true;
        }
    }
    false
}

fn point_in_union_hull(s: &CellScatterer, p: Vec2, tol: f64) -> bool {
    // convex hull containment, computed from all vertices (gift wrapping is
    // overkill: check against the hull implicitly via support functions)
    let mut pts: Vec<Vec2> = Vec::new();
    for c in &s.cells {
        pts.extend_from_slice(c.vertices());
    }
    let hull = convex_hull(&pts);
    let m = hull.len();
    for i in 0..m {
        let a = hull[i];
        let b = hull[(i + 1) % m];
        if (b - a).cross(p - a) < tol * (b - a).norm() {
            return false;
        }
    }
    true
}

/// Counterclockwise convex hull (monotone chain).
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-14);
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && (lower[lower.len() - 1] - lower[lower.len() - 2])
                .cross(p - lower[lower.len() - 1])
                <= 0.0
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && (upper[upper.len() - 1] - upper[upper.len() - 2])
                .cross(p - upper[upper.len() - 1])
                <= 0.0
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn outer_boundary_edges(s: &CellScatterer) -> Vec<(Vec2, Vec2)> {
    let mut pts: Vec<Vec2> = Vec::new();
    for c in &s.cells {
        pts.extend_from_slice(c.vertices());
    }
    let hull = convex_hull(&pts);
    (0..hull.len())
        .map(|i| (hull[i], hull[(i + 1) % hull.len()]))
        .collect()
}

fn edge_on_outer(outer: &[(Vec2, Vec2)], edge: (Vec2, Vec2), tol: f64) -> bool {
    outer.iter().any(|&(a, b)| {
        segment_distance(edge.0, a, b) < tol.max(1e-12) && segment_distance(edge.1, a, b) < tol.max(1e-12)
    })
}
