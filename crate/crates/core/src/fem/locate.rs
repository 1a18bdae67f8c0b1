//! Point location in a triangle mesh via uniform binning.

use super::mesh::Mesh;
use crate::geometry::Vec2;

pub struct Locator {
    bins: Vec<Vec<u32>>,
    nx: usize,
    ny: usize,
    lo: Vec2,
    cell: f64,
}

impl Locator {
    pub fn build(mesh: &Mesh) -> Self {
        let lo = Vec2::new(-mesh.rt, -mesh.rt);
        let cell = (2.0 * mesh.h).max(2.0 * mesh.rt / 512.0);
        let nx = ((2.0 * mesh.rt) / cell).ceil() as usize + 1;
        let ny = nx;
        let mut bins = vec![Vec::new(); nx * ny];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let ps = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
            let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
            for p in &ps {
                x0 = x0.min(p.x);
                y0 = y0.min(p.y);
                x1 = x1.max(p.x);
                y1 = y1.max(p.y);
            }
            let i0 = (((x0 - lo.x) / cell).floor().max(0.0)) as usize;
            let j0 = (((y0 - lo.y) / cell).floor().max(0.0)) as usize;
            let i1 = (((x1 - lo.x) / cell).floor() as usize).min(nx - 1);
            let j1 = (((y1 - lo.y) / cell).floor() as usize).min(ny - 1);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    bins[j * nx + i].push(t as u32);
                }
            }
        }
        Self { bins, nx, ny, lo, cell }
    }

    /// Triangle containing `p` plus its barycentric coordinates.
    pub fn find(&self, mesh: &Mesh, p: Vec2) -> Option<(usize, [f64; 3])> {
        let i = (((p.x - self.lo.x) / self.cell).floor()) as i64;
        let j = (((p.y - self.lo.y) / self.cell).floor()) as i64;
        // search the home bin, then widen one ring for boundary roundoff
        for ring in 0..2i64 {
            let mut best: Option<(usize, [f64; 3], f64)> = None;
            for dj in -ring..=ring {
                for di in -ring..=ring {
                    if ring > 0 && di.abs() != ring && dj.abs() != ring {
                        continue;
                    }
                    let (ii, jj) = (i + di, j + dj);
                    if ii < 0 || jj < 0 || ii >= self.nx as i64 || jj >= self.ny as i64 {
                        continue;
                    }
                    for &t in &self.bins[jj as usize * self.nx + ii as usize] {
                        let tri = mesh.triangles[t as usize];
                        let (a, b, c) =
                            (mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
                        let area2 = (b - a).cross(c - a);
                        let l0 = (b - p).cross(c - p) / area2;
                        let l1 = (c - p).cross(a - p) / area2;
                        let l2 = 1.0 - l0 - l1;
                        let worst = l0.min(l1).min(l2);
                        if worst >= -1e-12 {
                            return Some((t as usize, [l0, l1, l2]));
                        }
                        if best.map(|(_, _, w)| worst > w).unwrap_or(true) {
                            best = Some((t as usize, [l0, l1, l2], worst));
                        }
                    }
                }
            }
            // tolerate slight exterior points (chord sagitta at the rim)
            if let Some((t, bary, worst)) = best {
                if worst > -0.05 && ring == 1 {
                    let clamped = [
                        bary[0].max(0.0),
                        bary[1].max(0.0),
                        bary[2].max(0.0),
                    ];
                    let s = clamped[0] + clamped[1] + clamped[2];
                    return Some((t, [clamped[0] / s, clamped[1] / s, clamped[2] / s]));
                }
            }
        }
        None
    }
}
