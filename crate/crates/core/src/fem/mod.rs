//! Finite-element solver for conductive scattering.
//!
//! Scattered-field formulation on a disk of radius `Rt`, truncated by the
//! exact circular Dirichlet-to-Neumann map: the unknown is `u^s`
//! everywhere, so invisibility questions read directly off the solution
//! magnitude. Piecewise-linear elements on an interface-conforming graded
//! mesh; conductive interface jumps enter as boundary bilinear terms; the
//! sparse complex-symmetric system goes to a direct LU factorization.

mod assemble;
mod locate;
pub mod mesh;

pub use mesh::{mesh_scatterer, Mesh, MeshError};

use crate::geometry::Vec2;
use crate::scatterer::{FarFieldPattern, Incident, Scatterer};
use crate::specfun::hankel1_seq;
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use locate::Locator;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("h = {h} too coarse for k = {k}: need at least 10 nodes per wavelength (h <= {limit:.4})")]
    TooCoarse { h: f64, k: f64, limit: f64 },
    #[error("point source must lie outside the truncation circle")]
    SourceInsideDomain,
    #[error("assembly failed: {0}")]
    Assembly(String),
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("evaluation point ({0}, {1}) outside the computational domain")]
    OutsideDomain(f64, f64),
    #[error("extraction circle radius {radius} must lie strictly between the scatterer ({inner}) and the truncation circle ({outer})")]
    BadExtractionRadius { radius: f64, inner: f64, outer: f64 },
    #[error(transparent)]
    SpecFun(#[from] crate::specfun::SpecFunError),
}

/// Discrete scattered field with everything needed to evaluate it.
pub struct FemSolution {
    pub mesh: Arc<Mesh>,
    pub scatterer: Scatterer,
    pub k: f64,
    pub incident: Incident,
    /// Nodal values of `u^s`.
    pub us: Vec<Complex64>,
    /// Relative magnitude of the two highest DtN modes of the solution
    /// trace; a large value means the modal truncation is too short.
    pub dtn_tail: f64,
    locator: Locator,
}

/// Solve the scattering problem on a prepared mesh.
pub fn solve(
    mesh: Mesh,
    scatterer: &Scatterer,
    k: f64,
    incident: &Incident,
) -> Result<FemSolution, FemError> {
    let limit = 2.0 * PI / (10.0 * k);
    if mesh.h > limit * (1.0 + 1e-12) {
        return Err(FemError::TooCoarse { h: mesh.h, k, limit });
    }
    if let Incident::PointSource { location } = incident {
        if location.norm() <= mesh.rt {
            return Err(FemError::SourceInsideDomain);
        }
    }
    let assembled = assemble::assemble(&mesh, scatterer, k, incident)?;
    let symbolic = SymbolicLu::try_new(assembled.matrix.symbolic())
        .map_err(|e| FemError::Factorization(format!("{e:?}")))?;
    let lu = Lu::try_new_with_symbolic(symbolic, assembled.matrix.as_ref())
        .map_err(|e| FemError::Factorization(format!("{e:?}")))?;
    let n = assembled.rhs.len();
    let mut rhs = faer::Mat::<Complex64>::zeros(n, 1);
    for (i, &v) in assembled.rhs.iter().enumerate() {
        rhs[(i, 0)] = v;
    }
    let x = lu.solve(&rhs);
    let us: Vec<Complex64> = (0..n).map(|i| x[(i, 0)]).collect();

    // DtN truncation diagnostic from the solved trace
    let mut mode_mags = Vec::new();
    for row in &assembled.moments {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &node) in assembled.boundary_nodes.iter().enumerate() {
            acc += row[j] * us[node];
        }
        mode_mags.push(acc.norm());
    }
    let peak = mode_mags.iter().copied().fold(0.0f64, f64::max);
    let edge = mode_mags[0].max(mode_mags[mode_mags.len() - 1]);
    let dtn_tail = if peak > 0.0 { edge / peak } else { 0.0 };

    let locator = Locator::build(&mesh);
    Ok(FemSolution {
        mesh: Arc::new(mesh),
        scatterer: scatterer.clone(),
        k,
        incident: incident.clone(),
        us,
        dtn_tail,
        locator,
    })
}

impl FemSolution {
    /// Scattered field at a point.
    pub fn scattered_at(&self, p: Vec2) -> Result<Complex64, FemError> {
        let (t, bary) = self
            .locator
            .find(&self.mesh, p)
            .ok_or(FemError::OutsideDomain(p.x, p.y))?;
        let tri = self.mesh.triangles[t];
        Ok(self.us[tri[0]] * bary[0] + self.us[tri[1]] * bary[1] + self.us[tri[2]] * bary[2])
    }

    /// Total field at a point.
    pub fn total_at(&self, p: Vec2) -> Result<Complex64, FemError> {
        Ok(self.incident.eval(self.k, p) + self.scattered_at(p)?)
    }

    /// Piecewise-constant gradient of the scattered field.
    pub fn grad_scattered_at(&self, p: Vec2) -> Result<[Complex64; 2], FemError> {
        let (t, _) = self
            .locator
            .find(&self.mesh, p)
            .ok_or(FemError::OutsideDomain(p.x, p.y))?;
        let tri = self.mesh.triangles[t];
        let (a, b, c) = (
            self.mesh.nodes[tri[0]],
            self.mesh.nodes[tri[1]],
            self.mesh.nodes[tri[2]],
        );
        let area = 0.5 * (b - a).cross(c - a);
        let grads = [
            Vec2::new(b.y - c.y, c.x - b.x) * (1.0 / (2.0 * area)),
            Vec2::new(c.y - a.y, a.x - c.x) * (1.0 / (2.0 * area)),
            Vec2::new(a.y - b.y, b.x - a.x) * (1.0 / (2.0 * area)),
        ];
        let mut gx = Complex64::new(0.0, 0.0);
        let mut gy = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            gx += self.us[tri[i]] * grads[i].x;
            gy += self.us[tri[i]] * grads[i].y;
        }
        Ok([gx, gy])
    }

    /// Gradient of the total field.
    pub fn grad_total_at(&self, p: Vec2) -> Result<[Complex64; 2], FemError> {
        let gi = self.incident.grad(self.k, p);
        let gs = self.grad_scattered_at(p)?;
        Ok([gi[0] + gs[0], gi[1] + gs[1]])
    }

    /// `L^2` norm of the scattered field over the mesh (mass-lumped).
    pub fn scattered_l2(&self) -> f64 {
        let mut acc = 0.0;
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            let area = self.mesh.triangle_area(t);
            let mean_sq: f64 = tri.iter().map(|&v| self.us[v].norm_sqr()).sum::<f64>() / 3.0;
            acc += area * mean_sq;
        }
        acc.sqrt()
    }

    /// `L^2` norm of the incident field over the mesh, for relative scales.
    pub fn incident_l2(&self) -> f64 {
        let mut acc = 0.0;
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            let area = self.mesh.triangle_area(t);
            let mean_sq: f64 = tri
                .iter()
                .map(|&v| self.incident.eval(self.k, self.mesh.nodes[v]).norm_sqr())
                .sum::<f64>()
                / 3.0;
            acc += area * mean_sq;
        }
        acc.sqrt()
    }
}

/// Far field by the Helmholtz representation integral over an extraction
/// circle.
///
/// The trace of `u^s` is sampled on the circle from the FEM solution; its
/// normal derivative is reconstructed modally (the annulus is source-free,
/// so the trace determines the outgoing flux exactly), which avoids the
/// noisy raw P1 gradients. The kernel is the large-argument asymptotics of
/// the outgoing Green function.
pub fn near_to_far(
    sol: &FemSolution,
    circle_radius: f64,
    directions: &[f64],
) -> Result<FarFieldPattern, FemError> {
    let inner = sol.scatterer.circumradius();
    let outer = sol.mesh.rt;
    if !(circle_radius > inner && circle_radius < outer) {
        return Err(FemError::BadExtractionRadius {
            radius: circle_radius,
            inner,
            outer,
        });
    }
    let k = sol.k;
    let a = circle_radius;
    let m = (((2.0 * PI * a / sol.mesh.h).ceil() as usize) * 4).max(256);
    let mut trace = Vec::with_capacity(m);
    for j in 0..m {
        let th = 2.0 * PI * j as f64 / m as f64;
        trace.push(sol.scattered_at(Vec2::from_polar(a, th))?);
    }
    // modal coefficients of the trace
    let n_modes = ((k * a).ceil() as usize + 15).min(m / 4);
    let h = hankel1_seq(n_modes + 1, Complex64::new(k * a, 0.0))?;
    let mut hat = vec![Complex64::new(0.0, 0.0); 2 * n_modes + 1];
    for (j, &v) in trace.iter().enumerate() {
        for n in -(n_modes as i64)..=n_modes as i64 {
            let red = (n * j as i64).rem_euclid(m as i64);
            let w = Complex64::from_polar(1.0, -2.0 * PI * red as f64 / m as f64);
            hat[(n + n_modes as i64) as usize] += v * w;
        }
    }
    for v in hat.iter_mut() {
        *v /= m as f64;
    }
    // normal derivative of the outgoing trace, mode by mode
    let flux: Vec<Complex64> = (0..m)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / m as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for n in -(n_modes as i64)..=n_modes as i64 {
                let nu = n.unsigned_abs() as usize;
                let hn = h[nu];
                let hp = if nu == 0 {
                    -h[1]
                } else {
                    h[nu - 1] - (nu as f64 / (k * a)) * h[nu]
                };
                acc += hat[(n + n_modes as i64) as usize]
                    * k
                    * (hp / hn)
                    * Complex64::from_polar(1.0, n as f64 * th);
            }
            acc
        })
        .collect();
    // representation integral, trapezoid over the circle
    let ds = 2.0 * PI * a / m as f64;
    let amp =
        Complex64::i() / 4.0 * (2.0 / (PI * k)).sqrt() * Complex64::from_polar(1.0, -PI / 4.0);
    let values = directions
        .iter()
        .map(|&phi| {
            let xhat = Vec2::from_polar(1.0, phi);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let th = 2.0 * PI * j as f64 / m as f64;
                let y = Vec2::from_polar(a, th);
                let nu = Vec2::from_polar(1.0, th);
                let kernel = Complex64::from_polar(1.0, -k * xhat.dot(y));
                acc += kernel * (-Complex64::i() * k * xhat.dot(nu) * trace[j] - flux[j]) * ds;
            }
            amp * acc
        })
        .collect();
    Ok(FarFieldPattern {
        angles: directions.to_vec(),
        values,
    })
}
