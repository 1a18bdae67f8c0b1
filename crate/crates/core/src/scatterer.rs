//! Incident waves, far-field patterns, and the scatterer union type.

use crate::disk::DiskScatterer;
use crate::geometry::{CellScatterer, NestScatterer, Vec2};
use crate::specfun::{hankel1_seq, SpecFunError};
#[cfg(test)]
use crate::specfun::bessel_j_seq;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Incident wave: plane wave, Herglotz superposition, or exterior point
/// source. All satisfy the Helmholtz equation wherever they are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Incident {
    /// `e^{i k x . d}`, `d = (cos angle, sin angle)`.
    Plane { angle: f64 },
    /// `int_{S^1} e^{i k xi . x} g(xi) d sigma(xi)` with the kernel sampled
    /// on a uniform angle grid.
    Herglotz { kernel: Vec<Complex64> },
    /// `H_0^(1)(k |x - z0|)`.
    PointSource { location: Vec2 },
}

impl Incident {
    pub fn plane(angle: f64) -> Self {
        Incident::Plane { angle }
    }

    /// Field value at `x`.
    pub fn eval(&self, k: f64, x: Vec2) -> Complex64 {
        match self {
            Incident::Plane { angle } => {
                let d = Vec2::from_polar(1.0, *angle);
                Complex64::from_polar(1.0, k * d.dot(x))
            }
            Incident::Herglotz { kernel } => {
                let m = kernel.len();
                let w = 2.0 * PI / m as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &g) in kernel.iter().enumerate() {
                    let xi = Vec2::from_polar(1.0, w * j as f64);
                    acc += g * Complex64::from_polar(1.0, k * xi.dot(x));
                }
                acc * w
            }
            Incident::PointSource { location } => {
                let r = (x - *location).norm();
                hankel1_seq(0, Complex64::new(k * r, 0.0)).expect("evaluation point at source")[0]
            }
        }
    }

    /// Cartesian gradient at `x`.
    pub fn grad(&self, k: f64, x: Vec2) -> [Complex64; 2] {
        match self {
            Incident::Plane { angle } => {
                let d = Vec2::from_polar(1.0, *angle);
                let v = self.eval(k, x) * Complex64::i() * k;
                [v * d.x, v * d.y]
            }
            Incident::Herglotz { kernel } => {
                let m = kernel.len();
                let w = 2.0 * PI / m as f64;
                let mut gx = Complex64::new(0.0, 0.0);
                let mut gy = Complex64::new(0.0, 0.0);
                for (j, &g) in kernel.iter().enumerate() {
                    let xi = Vec2::from_polar(1.0, w * j as f64);
                    let v = g * Complex64::from_polar(1.0, k * xi.dot(x)) * Complex64::i() * k;
                    gx += v * xi.x;
                    gy += v * xi.y;
                }
                [gx * w, gy * w]
            }
            Incident::PointSource { location } => {
                let dvec = x - *location;
                let r = dvec.norm();
                let h = hankel1_seq(1, Complex64::new(k * r, 0.0))
                    .expect("evaluation point at source");
                let factor = -k * h[1] / r;
                [factor * dvec.x, factor * dvec.y]
            }
        }
    }

    /// Modal coefficients `c_n` (signed order, `n = -n_max ..= n_max`) of
    /// the expansion `u^i = sum_n c_n J_n(k r) e^{i n theta}` around the
    /// origin, valid for `r < validity_radius`.
    ///
    /// For a point source the expansion only converges inside the circle
    /// through the source, so `|z0| > validity_radius` is required.
    pub fn modal_coeffs(
        &self,
        k: f64,
        n_max: usize,
        validity_radius: f64,
    ) -> Result<Vec<Complex64>, SpecFunError> {
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        match self {
            Incident::Plane { angle } => {
                for n in -(n_max as i64)..=n_max as i64 {
                    out[(n + n_max as i64) as usize] = i_pow(n)
                        * Complex64::from_polar(1.0, -(n as f64) * angle);
                }
            }
            Incident::Herglotz { kernel } => {
                let m = kernel.len();
                let w = 2.0 * PI / m as f64;
                for n in -(n_max as i64)..=n_max as i64 {
                    let mut hat = Complex64::new(0.0, 0.0);
                    for (j, &g) in kernel.iter().enumerate() {
                        hat += g * Complex64::from_polar(1.0, -(n as f64) * w * j as f64);
                    }
                    out[(n + n_max as i64) as usize] = i_pow(n) * hat * w;
                }
            }
            Incident::PointSource { location } => {
                let r0 = location.norm();
                if r0 <= validity_radius {
                    return Err(SpecFunError::Domain(format!(
                        "point source at radius {r0} inside the expansion disk {validity_radius}"
                    )));
                }
                let theta0 = location.angle();
                let h = hankel1_seq(n_max, Complex64::new(k * r0, 0.0))?;
                for n in -(n_max as i64)..=n_max as i64 {
                    let hn = h[n.unsigned_abs() as usize]
                        * if n < 0 && n % 2 != 0 { -1.0 } else { 1.0 };
                    out[(n + n_max as i64) as usize] =
                        hn * Complex64::from_polar(1.0, -(n as f64) * theta0);
                }
            }
        }
        Ok(out)
    }
}

/// `i^n` for signed `n`.
pub fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Far-field samples on a uniform angle grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldPattern {
    /// Sample angles (uniform, starting at 0).
    pub angles: Vec<f64>,
    /// `u_infty` at each angle.
    pub values: Vec<Complex64>,
}

impl FarFieldPattern {
    pub fn uniform_angles(count: usize) -> Vec<f64> {
        (0..count).map(|j| 2.0 * PI * j as f64 / count as f64).collect()
    }

    /// `L^2(S^1)` norm by the periodic trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        let dt = 2.0 * PI / self.values.len() as f64;
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dt).sqrt()
    }

    /// `L^2(S^1)` distance to another pattern on the same grid.
    pub fn l2_diff(&self, other: &FarFieldPattern) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "grids must match");
        let dt = 2.0 * PI / self.values.len() as f64;
        (self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * dt)
            .sqrt()
    }

    /// Fourier coefficients `(1/2 pi) int u_infty e^{-i n theta} d theta`
    /// for `n = -n_max ..= n_max`.
    pub fn fourier_coeffs(&self, n_max: usize) -> Vec<Complex64> {
        let m = self.values.len();
        let mut out = Vec::with_capacity(2 * n_max + 1);
        for n in -(n_max as i64)..=n_max as i64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in self.values.iter().enumerate() {
                let th = 2.0 * PI * j as f64 / m as f64;
                acc += v * Complex64::from_polar(1.0, -(n as f64) * th);
            }
            out.push(acc / m as f64);
        }
        out
    }

    /// Value at the grid angle closest to `theta`.
    pub fn nearest(&self, theta: f64) -> Complex64 {
        let m = self.values.len() as f64;
        let idx = (theta.rem_euclid(2.0 * PI) / (2.0 * PI) * m).round() as usize % self.values.len();
        self.values[idx]
    }
}

/// Interface geometry handed to the mesh generator.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    /// Closed polygon, counterclockwise.
    Polygon(Vec<Vec2>),
    /// Open segment list (cell partitions share edges).
    Segments(Vec<(Vec2, Vec2)>),
    /// Circle about the origin.
    Circle { radius: f64 },
}

/// One conductive interface: geometry plus its jump constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Interface {
    pub id: usize,
    pub eta: Complex64,
    pub curve: Curve,
}

/// Any supported scatterer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scatterer {
    Nest(NestScatterer),
    Cell(CellScatterer),
    Disk(DiskScatterer),
    /// Background only; scatters nothing.
    Empty,
}

impl Scatterer {
    /// Radius of a disk (about the origin) containing the scatterer.
    pub fn circumradius(&self) -> f64 {
        match self {
            Scatterer::Nest(s) => s
                .layers
                .first()
                .map(|p| p.circumradius())
                .unwrap_or(0.0),
            Scatterer::Cell(s) => s
                .cells
                .iter()
                .map(|p| p.circumradius())
                .fold(0.0, f64::max),
            Scatterer::Disk(s) => s.radii.first().copied().unwrap_or(0.0),
            Scatterer::Empty => 0.0,
        }
    }

    /// Refractive index `q` at a point (1 outside the scatterer).
    pub fn index_at(&self, x: Vec2) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Scatterer::Nest(s) => {
                let mut deepest = None;
                for (i, layer) in s.layers.iter().enumerate() {
                    if layer.contains(x) {
                        deepest = Some(i);
                    } else {
                        break;
                    }
                }
                match deepest {
                    Some(i) => s.indices[i].eval(x),
                    None => one,
                }
            }
            Scatterer::Cell(s) => {
                for (i, cell) in s.cells.iter().enumerate() {
                    if cell.contains(x) {
                        return s.indices[i].eval(x);
                    }
                }
                one
            }
            Scatterer::Disk(s) => {
                let r = x.norm();
                for (i, &radius) in s.radii.iter().enumerate() {
                    let inner = s.radii.get(i + 1).copied().unwrap_or(0.0);
                    if r < radius && r >= inner {
                        return s.q_values[i];
                    }
                }
                one
            }
            Scatterer::Empty => one,
        }
    }

    /// Conductive interfaces, outermost first.
    pub fn interfaces(&self) -> Vec<Interface> {
        match self {
            Scatterer::Nest(s) => s
                .layers
                .iter()
                .enumerate()
                .map(|(i, layer)| Interface {
                    id: i,
                    eta: s.etas[i],
                    curve: Curve::Polygon(layer.vertices().to_vec()),
                })
                .collect(),
            Scatterer::Cell(s) => {
                // split every edge at cell vertices lying on it (partitions
                // may have T-junctions), then dedupe so each sub-segment
                // carries the jump exactly once
                let close = |a: Vec2, b: Vec2| (a - b).norm() < 1e-12;
                let mut all_vertices: Vec<Vec2> = Vec::new();
                for cell in &s.cells {
                    for &v in cell.vertices() {
                        if !all_vertices.iter().any(|&w| close(w, v)) {
                            all_vertices.push(v);
                        }
                    }
                }
                let mut segments: Vec<(Vec2, Vec2)> = Vec::new();
                for cell in &s.cells {
                    let m = cell.len();
                    for i in 0..m {
                        let (a, b) = (cell.vertices()[i], cell.vertices()[(i + 1) % m]);
                        let len = (b - a).norm();
                        let dir = (b - a) * (1.0 / len);
                        let mut cuts = vec![0.0, len];
                        for &v in &all_vertices {
                            let t = (v - a).dot(dir);
                            if t > 1e-9 && t < len - 1e-9
                                && crate::geometry::segment_distance(v, a, b) < 1e-9
                            {
                                cuts.push(t);
                            }
                        }
                        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
                        for w in cuts.windows(2) {
                            let e = (a + dir * w[0], a + dir * w[1]);
                            let dup = segments.iter().any(|&(p, q)| {
                                (close(p, e.0) && close(q, e.1))
                                    || (close(p, e.1) && close(q, e.0))
                            });
                            if !dup {
                                segments.push(e);
                            }
                        }
                    }
                }
                vec![Interface {
                    id: 0,
                    eta: s.eta,
                    curve: Curve::Segments(segments),
                }]
            }
            Scatterer::Disk(s) => s
                .radii
                .iter()
                .enumerate()
                .map(|(i, &radius)| Interface {
                    id: i,
                    eta: s.etas[i],
                    curve: Curve::Circle { radius },
                })
                .collect(),
            Scatterer::Empty => Vec::new(),
        }
    }

    /// All polygon corner vertices (empty for disks).
    pub fn corner_vertices(&self) -> Vec<Vec2> {
        match self {
            Scatterer::Nest(s) => s
                .layers
                .iter()
                .flat_map(|p| p.vertices().iter().copied())
                .collect(),
            Scatterer::Cell(s) => {
                let mut out: Vec<Vec2> = Vec::new();
                for cell in &s.cells {
                    for &v in cell.vertices() {
                        if !out.iter().any(|&w| (w - v).norm() < 1e-12) {
                            out.push(v);
                        }
                    }
                }
                out
            }
            Scatterer::Disk(_) | Scatterer::Empty => Vec::new(),
        }
    }

    /// True when the medium is indistinguishable from the background.
    pub fn is_trivial(&self) -> bool {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Scatterer::Empty => true,
            Scatterer::Disk(s) => {
                s.q_values.iter().all(|&q| (q - one).norm() == 0.0)
                    && s.etas.iter().all(|&e| e.norm() == 0.0)
            }
            Scatterer::Nest(s) => {
                s.indices.iter().all(|ix| {
                    (ix.q0 - one).norm() == 0.0 && ix.q1.norm() == 0.0 && ix.q2.norm() == 0.0
                }) && s.etas.iter().all(|&e| e.norm() == 0.0)
            }
            Scatterer::Cell(s) => {
                s.indices.iter().all(|ix| {
                    (ix.q0 - one).norm() == 0.0 && ix.q1.norm() == 0.0 && ix.q2.norm() == 0.0
                }) && s.eta.norm() == 0.0
            }
        }
    }
}
