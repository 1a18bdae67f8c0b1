//! P1 assembly of the scattered-field variational problem.
//!
//! Find `u^s` with
//!
//! ```text
//! int grad u^s . grad v - k^2 int q u^s v - sum_i eta_i int_{iface i} u^s v
//!   - int_{r=Rt} (T u^s) v  =  k^2 int (q - 1) u^i v + sum_i eta_i int_{iface i} u^i v
//! ```
//!
//! where `T` is the circular Dirichlet-to-Neumann map with exact modal
//! Hankel ratios. The system matrix is complex symmetric; the DtN block is a
//! dense low-rank coupling of the truncation-circle nodes.

use super::mesh::Mesh;
use crate::geometry::Vec2;
use crate::scatterer::{Incident, Scatterer};
use crate::specfun::hankel1_seq;
use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

/// Degree-4 triangle rule (6 points), barycentric coordinates and weights.
const TRI_QUAD: [([f64; 3], f64); 6] = [
    (
        [0.816847572980459, 0.091576213509771, 0.091576213509771],
        0.109951743655322,
    ),
    (
        [0.091576213509771, 0.816847572980459, 0.091576213509771],
        0.109951743655322,
    ),
    (
        [0.091576213509771, 0.091576213509771, 0.816847572980459],
        0.109951743655322,
    ),
    (
        [0.108103018168070, 0.445948490915965, 0.445948490915965],
        0.223381589678011,
    ),
    (
        [0.445948490915965, 0.108103018168070, 0.445948490915965],
        0.223381589678011,
    ),
    (
        [0.445948490915965, 0.445948490915965, 0.108103018168070],
        0.223381589678011,
    ),
];

/// 6-point Gauss rule on [0, 1].
const EDGE_QUAD: [(f64, f64); 6] = [
    (0.033765242898424, 0.085662246189585),
    (0.169395306766868, 0.180380786524069),
    (0.380690406958402, 0.233956967286345),
    (0.619309593041598, 0.233956967286345),
    (0.830604693233132, 0.180380786524069),
    (0.966234757101576, 0.085662246189585),
];

pub struct Assembled {
    pub matrix: SparseColMat<usize, Complex64>,
    pub rhs: Vec<Complex64>,
    /// Circle boundary nodes in circular order.
    pub boundary_nodes: Vec<usize>,
    /// Boundary moments `m_n(phi_j)` for `n = -n_dtn ..= n_dtn`, indexed
    /// `[n + n_dtn][j]` over `boundary_nodes`.
    pub moments: Vec<Vec<Complex64>>,
}

pub fn assemble(
    mesh: &Mesh,
    scatterer: &Scatterer,
    k: f64,
    incident: &Incident,
) -> Result<Assembled, crate::fem::FemError> {
    let n_nodes = mesh.nodes.len();
    let mut trips: Vec<Triplet<usize, usize, Complex64>> = Vec::new();
    let mut rhs = vec![Complex64::new(0.0, 0.0); n_nodes];
    let zero = Complex64::new(0.0, 0.0);

    // volume terms
    for tri in &mesh.triangles {
        let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
        debug_assert!(area > 0.0);
        // constant P1 gradients
        let grads = [
            perp_over(p[1], p[2], area),
            perp_over(p[2], p[0], area),
            perp_over(p[0], p[1], area),
        ];
        let mut local = [[zero; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                local[i][j] += Complex64::new(area * grads[i].dot(grads[j]), 0.0);
            }
        }
        let mut local_rhs = [zero; 3];
        let mut mass = [[zero; 3]; 3];
        for &(bary, w) in &TRI_QUAD {
            let x = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
            let q = scatterer.index_at(x);
            let ui = incident.eval(k, x);
            for i in 0..3 {
                for j in 0..3 {
                    mass[i][j] += q * bary[i] * bary[j] * w * area;
                }
                local_rhs[i] += k * k * (q - 1.0) * ui * bary[i] * w * area;
            }
        }
        // equal blend of consistent and row-sum-lumped mass: cancels the
        // leading dispersion error of linear elements
        for i in 0..3 {
            let row_sum = mass[i][0] + mass[i][1] + mass[i][2];
            for j in 0..3 {
                let blended = 0.5 * mass[i][j] + if i == j { 0.5 * row_sum } else { zero };
                local[i][j] -= k * k * blended;
            }
        }
        for i in 0..3 {
            rhs[tri[i]] += local_rhs[i];
            for j in 0..3 {
                if local[i][j] != zero {
                    trips.push(Triplet::new(tri[i], tri[j], local[i][j]));
                }
            }
        }
    }

    // conductive interface terms
    let etas: Vec<Complex64> = scatterer.interfaces().iter().map(|i| i.eta).collect();
    for &(a, b, id) in &mesh.interface_edges {
        let eta = etas[id];
        if eta == zero {
            continue;
        }
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        let len = (pb - pa).norm();
        // mass matrix of the hat functions on the edge
        let m = [[len / 3.0, len / 6.0], [len / 6.0, len / 3.0]];
        for (i, &ni) in [a, b].iter().enumerate() {
            for (j, &nj) in [a, b].iter().enumerate() {
                trips.push(Triplet::new(ni, nj, -eta * m[i][j]));
            }
            let mut acc = zero;
            for &(t, w) in &EDGE_QUAD {
                let x = pa + (pb - pa) * t;
                let phi = if i == 0 { 1.0 - t } else { t };
                acc += incident.eval(k, x) * phi * w * len;
            }
            rhs[ni] += eta * acc;
        }
    }

    // truncation circle: DtN block over boundary nodes
    let rt = mesh.rt;
    let n_dtn = (k * rt).ceil() as usize + 20;
    let mut boundary_nodes: Vec<usize> = Vec::new();
    for &(a, _) in &mesh.boundary_edges {
        boundary_nodes.push(a);
    }
    let node_pos: std::collections::HashMap<usize, usize> = boundary_nodes
        .iter()
        .enumerate()
        .map(|(pos, &n)| (n, pos))
        .collect();
    // moments m_n(phi_j) = sum over the two edges at j of
    // int phi_j e^{-i n theta} ds
    let mut moments = vec![vec![zero; boundary_nodes.len()]; 2 * n_dtn + 1];
    for &(a, b) in &mesh.boundary_edges {
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        let len = (pb - pa).norm();
        for &(t, w) in &EDGE_QUAD {
            let x = pa + (pb - pa) * t;
            let theta = x.angle();
            for n in -(n_dtn as i64)..=n_dtn as i64 {
                let ph = Complex64::from_polar(1.0, -(n as f64) * theta) * w * len;
                let row = (n + n_dtn as i64) as usize;
                moments[row][node_pos[&a]] += ph * (1.0 - t);
                moments[row][node_pos[&b]] += ph * t;
            }
        }
    }
    // modal impedances k H_n'(k Rt) / H_n(k Rt)
    let h = hankel1_seq(n_dtn + 1, Complex64::new(k * rt, 0.0))
        .map_err(crate::fem::FemError::SpecFun)?;
    let ratio = |n: i64| -> Complex64 {
        let nu = n.unsigned_abs() as usize;
        let hp = if nu == 0 {
            -h[1]
        } else {
            h[nu - 1] - (nu as f64 / (k * rt)) * h[nu]
        };
        k * hp / h[nu]
    };
    let nb = boundary_nodes.len();
    let mut dtn = vec![vec![zero; nb]; nb];
    for n in -(n_dtn as i64)..=n_dtn as i64 {
        let c = ratio(n) / (2.0 * std::f64::consts::PI * rt);
        let row = (n + n_dtn as i64) as usize;
        for i in 0..nb {
            let mi = moments[row][i].conj() * c;
            if mi == zero {
                continue;
            }
            for j in 0..nb {
                dtn[i][j] += mi * moments[row][j];
            }
        }
    }
    for (i, &ni) in boundary_nodes.iter().enumerate() {
        for (j, &nj) in boundary_nodes.iter().enumerate() {
            if dtn[i][j] != zero {
                trips.push(Triplet::new(ni, nj, -dtn[i][j]));
            }
        }
    }

    let matrix = SparseColMat::try_new_from_triplets(n_nodes, n_nodes, &trips)
        .map_err(|e| crate::fem::FemError::Assembly(format!("{e:?}")))?;
    Ok(Assembled {
        matrix,
        rhs,
        boundary_nodes,
        moments,
    })
}

/// Gradient of the hat function opposite to edge (a, b): rotate the edge and
/// scale by twice the area.
fn perp_over(a: Vec2, b: Vec2, area: f64) -> Vec2 {
    Vec2::new(a.y - b.y, b.x - a.x) * (1.0 / (2.0 * area))
}
