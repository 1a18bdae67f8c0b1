//! Graded conforming triangulation of the truncated scattering domain.
//!
//! Interface polylines and the truncation circle are discretized first and
//! become constraint edges of a Delaunay triangulation; interior points come
//! from hierarchical hex lattices filtered by a sizing field
//!
//! ```text
//! size(x) = clamp(h sqrt(dist(x, nearest corner)), h^2, h)
//! ```
//!
//! so elements shrink like the square root of the distance to the nearest
//! polygon vertex with floor `h^2`. Everything is deterministic: lattice
//! jitter comes from a hash of the lattice index.

use crate::geometry::{segment_distance, Vec2};
use crate::scatterer::{Curve, Scatterer};
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid scatterer: {0}")]
    InvalidScatterer(String),
    #[error("scatterer (circumradius {circumradius}) must fit inside 0.8 x truncation radius {rt}")]
    ScattererTooLarge { circumradius: f64, rt: f64 },
    #[error("mesh size h = {0} must be positive")]
    BadH(f64),
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error("constraint edge lost between nodes {0} and {1}")]
    ConstraintLost(usize, usize),
}

/// Conforming triangle mesh with tagged interface and truncation edges.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Vec2>,
    /// Triangles as CCW node index triples.
    pub triangles: Vec<[usize; 3]>,
    /// Interface edges `(a, b, interface id)`.
    pub interface_edges: Vec<(usize, usize, usize)>,
    /// Truncation-circle edges in circular order.
    pub boundary_edges: Vec<(usize, usize)>,
    /// Region tag per triangle (0 = background annulus, `i + 1` = region of
    /// interface `i` for nests/disks, cell index + 1 for cells).
    pub region: Vec<u32>,
    /// Target element size away from corners.
    pub h: f64,
    /// Truncation radius.
    pub rt: f64,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        0.5 * (q - p).cross(r - p)
    }

    pub fn triangle_diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        (q - p).norm().max((r - q).norm()).max((p - r).norm())
    }

    /// Smallest element diameter among triangles touching `point` within
    /// `radius`.
    pub fn min_diameter_near(&self, point: Vec2, radius: f64) -> f64 {
        let mut best = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let touches = self.triangles[t]
                .iter()
                .any(|&v| (self.nodes[v] - point).norm() <= radius);
            if touches {
                best = best.min(self.triangle_diameter(t));
            }
        }
        best
    }

    /// Plain-text export: `node x y`, `tri a b c region`, `iedge a b id`,
    /// `bedge a b` lines after a counts header.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "mesh {} {} {} {}\n",
            self.nodes.len(),
            self.triangles.len(),
            self.interface_edges.len(),
            self.boundary_edges.len()
        ));
        for n in &self.nodes {
            out.push_str(&format!("node {:.17e} {:.17e}\n", n.x, n.y));
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            out.push_str(&format!(
                "tri {} {} {} {}\n",
                tri[0], tri[1], tri[2], self.region[t]
            ));
        }
        for &(a, b, id) in &self.interface_edges {
            out.push_str(&format!("iedge {a} {b} {id}\n"));
        }
        for &(a, b) in &self.boundary_edges {
            out.push_str(&format!("bedge {a} {b}\n"));
        }
        out
    }
}

/// Sizing field: square-root corner grading on top of medium-aware
/// refinement (the local wavelength shrinks by sqrt(|q|), so elements do
/// too).
struct Sizing<'a> {
    h: f64,
    floor: f64,
    corners: Vec<Vec2>,
    scatterer: &'a Scatterer,
}

impl Sizing<'_> {
    fn at(&self, x: Vec2) -> f64 {
        // take the densest medium within a probe radius so interface chains
        // are resolved for their finer side
        let probe = 0.35 * self.h;
        let mut q_peak = 1.0f64;
        for &(dx, dy) in &[(0.0, 0.0), (probe, 0.0), (-probe, 0.0), (0.0, probe), (0.0, -probe)] {
            q_peak = q_peak.max(self.scatterer.index_at(x + Vec2::new(dx, dy)).norm());
        }
        let base = self.h / q_peak.sqrt();
        if self.corners.is_empty() {
            return base.max(self.floor);
        }
        let d = self
            .corners
            .iter()
            .map(|&c| (x - c).norm())
            .fold(f64::INFINITY, f64::min);
        (self.h * d.sqrt()).clamp(self.floor, base.max(self.floor))
    }
}

/// Deterministic jitter in `[-1, 1]` from a lattice index hash (splitmix64).
fn hash_unit(seed: u64) -> f64 {
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z = z ^ (z >> 31);
    (z >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

/// Node store that welds points closer than a tolerance onto one index,
/// via a quantized spatial hash.
struct NodeBank {
    points: Vec<Vec2>,
    lookup: std::collections::HashMap<(i64, i64), Vec<usize>>,
    cell: f64,
}

impl NodeBank {
    fn new(tol: f64) -> Self {
        Self {
            points: Vec::new(),
            lookup: std::collections::HashMap::new(),
            cell: tol.max(1e-300),
        }
    }

    fn key(&self, p: Vec2) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    fn push(&mut self, p: Vec2) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.lookup.get(&(kx + dx, ky + dy)) {
                    for &id in ids {
                        if (self.points[id] - p).norm() <= self.cell {
                            return id;
                        }
                    }
                }
            }
        }
        let id = self.points.len();
        self.points.push(p);
        self.lookup.entry((kx, ky)).or_default().push(id);
        id
    }
}

/// Triangulate the disk of radius `rt` around a scatterer.
pub fn mesh_scatterer(s: &Scatterer, rt: f64, h: f64) -> Result<Mesh, MeshError> {
    if !(h > 0.0) {
        return Err(MeshError::BadH(h));
    }
    let violations: Vec<String> = match s {
        Scatterer::Nest(nest) => crate::geometry::validate_nest(nest)
            .iter()
            .map(|v| v.to_string())
            .collect(),
        Scatterer::Cell(cell) => crate::geometry::validate_cell(cell)
            .iter()
            .map(|v| v.to_string())
            .collect(),
        Scatterer::Disk(disk) => disk.validate().err().iter().map(|e| e.to_string()).collect(),
        Scatterer::Empty => Vec::new(),
    };
    if !violations.is_empty() {
        return Err(MeshError::InvalidScatterer(violations.join("; ")));
    }
    let circumradius = s.circumradius();
    if circumradius > 0.8 * rt {
        return Err(MeshError::ScattererTooLarge { circumradius, rt });
    }
    let corners = s.corner_vertices();
    let sizing = Sizing {
        h,
        floor: (h * h).min(h),
        corners,
        scatterer: s,
    };

    let mut nodes = NodeBank::new(1e-9 * rt.max(1.0));
    let mut constraint_chains: Vec<(Vec<usize>, usize, bool)> = Vec::new(); // (chain, id, closed)

    // interface discretization; shared endpoints (cell partitions meet at
    // vertices and T-junctions) weld onto one node
    let interfaces = s.interfaces();
    for iface in &interfaces {
        match &iface.curve {
            Curve::Polygon(vertices) => {
                let chain = discretize_polygon(vertices, &sizing, &mut nodes);
                constraint_chains.push((chain, iface.id, true));
            }
            Curve::Segments(segments) => {
                for seg in segments {
                    let chain = discretize_segment(seg.0, seg.1, &sizing, &mut nodes);
                    constraint_chains.push((chain, iface.id, false));
                }
            }
            Curve::Circle { radius } => {
                let local = sizing.at(Vec2::new(*radius, 0.0)).min(h);
                let count =
                    ((2.0 * std::f64::consts::PI * radius / local).ceil() as usize).max(24);
                // vertices pushed out so the chords straddle the circle;
                // the one-sided geometry bias of an inscribed polygon is
                // first order in the far field, the straddling one second
                let vertex_radius = radius / (std::f64::consts::PI / count as f64).cos();
                let chain: Vec<usize> = (0..count)
                    .map(|j| {
                        let th = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
                        nodes.push(Vec2::from_polar(vertex_radius, th))
                    })
                    .collect();
                constraint_chains.push((chain, iface.id, true));
            }
        }
    }

    // truncation circle (uniform, no grading)
    let boundary_count = ((2.0 * std::f64::consts::PI * rt / h).ceil() as usize).max(24);
    let boundary_start = nodes.points.len();
    for j in 0..boundary_count {
        let th = 2.0 * std::f64::consts::PI * j as f64 / boundary_count as f64;
        nodes.push(Vec2::from_polar(rt, th));
    }

    // interior seeding: hierarchical hex lattices filtered by the sizing
    // band, kept away from constraint curves and the outer circle
    let all_segments: Vec<(Vec2, Vec2)> = constraint_chains
        .iter()
        .flat_map(|(chain, _, closed)| {
            let mut segs = Vec::new();
            for w in chain.windows(2) {
                segs.push((nodes.points[w[0]], nodes.points[w[1]]));
            }
            if *closed && chain.len() > 2 {
                segs.push((nodes.points[*chain.last().unwrap()], nodes.points[chain[0]]));
            }
            segs
        })
        .collect();
    let levels = ((sizing.h / sizing.floor).log2().ceil() as i32).max(0);
    for level in 0..=levels {
        let spacing = h / 2.0f64.powi(level);
        if spacing < sizing.floor * 0.5 {
            break;
        }
        let band_lo = spacing * 0.71; // next finer level takes over below
        let band_hi = if level == 0 { f64::INFINITY } else { spacing * 1.42 };
        let dy = spacing * 0.8660254037844386; // hex row height
        let rows = (2.0 * rt / dy).ceil() as i64 + 2;
        let cols = (2.0 * rt / spacing).ceil() as i64 + 2;
        for row in 0..rows {
            let y = -rt + row as f64 * dy;
            let offset = if row % 2 == 0 { 0.0 } else { 0.5 * spacing };
            for col in 0..cols {
                let x = -rt + col as f64 * spacing + offset;
                let seed = (level as u64) << 40 ^ (row as u64) << 20 ^ col as u64;
                let jx = 0.06 * spacing * hash_unit(seed);
                let jy = 0.06 * spacing * hash_unit(seed ^ 0xabcdef);
                let p = Vec2::new(x + jx, y + jy);
                let local = sizing.at(p);
                if local < band_lo || local >= band_hi {
                    continue;
                }
                if p.norm() > rt - 0.7 * local {
                    continue;
                }
                let near_constraint = all_segments
                    .iter()
                    .any(|&(a, b)| segment_distance(p, a, b) < 0.65 * local);
                if near_constraint {
                    continue;
                }
                // keep the immediate corner collar clear so the apex fan is
                // built from the graded boundary nodes alone
                let near_corner = sizing
                    .corners
                    .iter()
                    .any(|&v| (p - v).norm() < 1.5 * sizing.floor);
                if near_corner {
                    continue;
                }
                nodes.push(p);
            }
        }
    }
    let nodes = nodes.points;

    // constrained Delaunay triangulation
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(nodes.len());
    for n in &nodes {
        let handle = cdt
            .insert(Point2::new(n.x, n.y))
            .map_err(|e| MeshError::Triangulation(format!("{e:?}")))?;
        handles.push(handle);
    }
    for (chain, _, closed) in &constraint_chains {
        let mut pairs: Vec<(usize, usize)> = chain.windows(2).map(|w| (w[0], w[1])).collect();
        if *closed && chain.len() > 2 {
            pairs.push((*chain.last().unwrap(), chain[0]));
        }
        for (a, b) in pairs {
            if handles[a] == handles[b] {
                continue;
            }
            if !cdt.can_add_constraint(handles[a], handles[b]) {
                return Err(MeshError::ConstraintLost(a, b));
            }
            cdt.add_constraint(handles[a], handles[b]);
        }
    }

    // map handles back to node indices
    let mut handle_to_node = vec![usize::MAX; cdt.num_vertices()];
    for (idx, &h) in handles.iter().enumerate() {
        handle_to_node[h.index()] = idx;
    }
    let mut triangles = Vec::with_capacity(cdt.num_inner_faces());
    let mut region = Vec::with_capacity(cdt.num_inner_faces());
    for face in cdt.inner_faces() {
        let vs = face.vertices();
        let tri = [
            handle_to_node[vs[0].index()],
            handle_to_node[vs[1].index()],
            handle_to_node[vs[2].index()],
        ];
        if tri.iter().any(|&v| v == usize::MAX) {
            return Err(MeshError::Triangulation(
                "triangulation introduced an unknown vertex".into(),
            ));
        }
        let centroid = (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]) * (1.0 / 3.0);
        triangles.push(tri);
        region.push(region_tag(s, centroid));
    }

    // tags: interface chains are constraint edges by construction
    let mut interface_edges = Vec::new();
    for (chain, id, closed) in &constraint_chains {
        for w in chain.windows(2) {
            interface_edges.push((w[0], w[1], *id));
        }
        if *closed && chain.len() > 2 {
            interface_edges.push((*chain.last().unwrap(), chain[0], *id));
        }
    }
    let boundary_edges: Vec<(usize, usize)> = (0..boundary_count)
        .map(|j| {
            (
                boundary_start + j,
                boundary_start + (j + 1) % boundary_count,
            )
        })
        .collect();

    Ok(Mesh {
        nodes,
        triangles,
        interface_edges,
        boundary_edges,
        region,
        h,
        rt,
    })
}

fn region_tag(s: &Scatterer, x: Vec2) -> u32 {
    match s {
        Scatterer::Nest(nest) => {
            let mut depth = 0u32;
            for (i, layer) in nest.layers.iter().enumerate() {
                if layer.contains(x) {
                    depth = i as u32 + 1;
                } else {
                    break;
                }
            }
            depth
        }
        Scatterer::Cell(cell) => cell
            .cells
            .iter()
            .position(|c| c.contains(x))
            .map(|i| i as u32 + 1)
            .unwrap_or(0),
        Scatterer::Disk(disk) => {
            let r = x.norm();
            let mut tag = 0;
            for (i, &radius) in disk.radii.iter().enumerate() {
                if r < radius {
                    tag = i as u32 + 1;
                }
            }
            tag
        }
        Scatterer::Empty => 0,
    }
}

/// Graded subdivision of a polygon boundary; polygon vertices always become
/// nodes and the first step away from each vertex sits at half the grading
/// floor so the corner elements reach the floor size.
fn discretize_polygon(vertices: &[Vec2], sizing: &Sizing, nodes: &mut NodeBank) -> Vec<usize> {
    let mut chain = Vec::new();
    let n = vertices.len();
    let first_of_edge: Vec<usize> = vertices.iter().map(|&v| nodes.push(v)).collect();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        chain.push(first_of_edge[i]);
        for idx in interior_points_on_edge(a, b, sizing) {
            chain.push(nodes.push(idx));
        }
    }
    chain
}

fn discretize_segment(a: Vec2, b: Vec2, sizing: &Sizing, nodes: &mut NodeBank) -> Vec<usize> {
    let mut chain = vec![nodes.push(a)];
    for p in interior_points_on_edge(a, b, sizing) {
        chain.push(nodes.push(p));
    }
    chain.push(nodes.push(b));
    chain
}

/// Interior subdivision points of the edge `a -> b` honoring the sizing
/// field, by marching from both endpoints toward the middle.
fn interior_points_on_edge(a: Vec2, b: Vec2, sizing: &Sizing) -> Vec<Vec2> {
    let len = (b - a).norm();
    let dir = (b - a) * (1.0 / len);
    let step_at = |t: f64| -> f64 {
        let p = a + dir * t;
        let near_corner = t.min(len - t) < sizing.floor * 1.5;
        // halve the first step so corner elements reach the floor diameter
        if near_corner {
            0.5 * sizing.floor
        } else {
            sizing.at(p)
        }
    };
    // march from the left; mirror-march handled by the symmetric sizing
    let mut ts = Vec::new();
    let mut t = 0.0;
    loop {
        let s = step_at(t);
        t += s;
        if t >= len - 0.55 * step_at(len - 1e-12) {
            break;
        }
        ts.push(t);
        if ts.len() > 100_000 {
            break;
        }
    }
    ts.into_iter().map(|t| a + dir * t).collect()
}
