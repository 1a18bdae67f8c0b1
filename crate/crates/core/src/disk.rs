//! Separation-of-variables oracle for concentric-disk conductive
//! scatterers.
//!
//! Each angular mode decouples into a small radial matching system: the
//! innermost disk carries `J_n(k_i r)` only, annuli carry `J_n` and `Y_n`,
//! the exterior carries the incident modal coefficient times `J_n(k r)`
//! plus an outgoing `H_n^(1)(k r)`. The conductive jump enters the radial
//! derivative matching on every interface. Solutions here are exact up to
//! special-function accuracy and serve as the oracle for the FEM solver.

use crate::geometry::Vec2;
use crate::scatterer::{i_pow, FarFieldPattern, Incident};
use crate::specfun::{bessel_j_seq, bessel_y_seq, hankel1_seq, SpecFunError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("radii must be strictly decreasing and positive, got {0:?}")]
    BadRadii(Vec<f64>),
    #[error("need one q per annulus and one eta per interface: {radii} radii, {q} q values, {etas} etas")]
    CountMismatch { radii: usize, q: usize, etas: usize },
    #[error("interface matching system is singular at mode n = {n}, k = {k} (resonance)")]
    Resonance { n: i64, k: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Concentric-disk conductive scatterer: `radii` strictly decreasing,
/// `q_values[i]` constant on the ring between `radii[i]` and `radii[i+1]`
/// (the last one filling the innermost disk), `etas[i]` on the circle of
/// `radii[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskScatterer {
    pub radii: Vec<f64>,
    pub q_values: Vec<Complex64>,
    pub etas: Vec<Complex64>,
}

impl DiskScatterer {
    pub fn validate(&self) -> Result<(), DiskError> {
        if self.radii.is_empty()
            || self.radii.iter().any(|&r| r <= 0.0)
            || self.radii.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(DiskError::BadRadii(self.radii.clone()));
        }
        if self.q_values.len() != self.radii.len() || self.etas.len() != self.radii.len() {
            return Err(DiskError::CountMismatch {
                radii: self.radii.len(),
                q: self.q_values.len(),
                etas: self.etas.len(),
            });
        }
        Ok(())
    }

    /// Single homogeneous disk.
    pub fn homogeneous(radius: f64, q: Complex64, eta: Complex64) -> Self {
        Self {
            radii: vec![radius],
            q_values: vec![q],
            etas: vec![eta],
        }
    }
}

/// Per-mode radial coefficients of the solved scattering problem.
#[derive(Debug, Clone)]
pub struct ModalSolution {
    pub scatterer: DiskScatterer,
    pub k: f64,
    pub incident: Incident,
    pub n_max: usize,
    /// Incident modal coefficients `c_n`, `n = -n_max ..= n_max`.
    pub incident_coeffs: Vec<Complex64>,
    /// Outgoing coefficients `s_n` of `u^s = sum s_n H_n^(1)(k r) e^{i n
    /// theta}`.
    pub scattered: Vec<Complex64>,
    /// Interior coefficients per mode and region: `(alpha, beta)` multiply
    /// `J_n(k_i r)` and `Y_n(k_i r)`; `beta = 0` in the innermost disk.
    pub interior: Vec<Vec<(Complex64, Complex64)>>,
}

/// Interior wavenumbers `k sqrt(q_i)` with the principal square root.
fn region_wavenumbers(s: &DiskScatterer, k: f64) -> Vec<Complex64> {
    s.q_values.iter().map(|&q| k * q.sqrt()).collect()
}

/// Solve the per-mode interface matching systems.
///
/// `n_max` defaults to `ceil(k R_1) + 15`.
pub fn mie_solve(
    scatterer: &DiskScatterer,
    k: f64,
    incident: &Incident,
    n_max: Option<usize>,
) -> Result<ModalSolution, DiskError> {
    scatterer.validate()?;
    assert!(k > 0.0);
    let r1 = scatterer.radii[0];
    let n_max = n_max.unwrap_or_else(|| (k * r1).ceil() as usize + 15);
    let incident_coeffs = incident.modal_coeffs(k, n_max, r1)?;
    let n_regions = scatterer.radii.len();
    let kr = region_wavenumbers(scatterer, k);

    let mut scattered = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
    let mut interior =
        vec![vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); n_regions]; 2 * n_max + 1];

    for sn in -(n_max as i64)..=n_max as i64 {
        let c_n = incident_coeffs[(sn + n_max as i64) as usize];
        let n = sn.unsigned_abs() as usize;
        let parity = if sn < 0 && sn % 2 != 0 { -1.0 } else { 1.0 };

        // unknowns: [s, alpha_0, beta_0, ..., alpha_{N-1}] (beta of the
        // innermost region is dropped)
        let dim = 2 * n_regions;
        let mut a = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        let mut rhs = vec![Complex64::new(0.0, 0.0); dim];
        let col_alpha = |region: usize| 1 + 2 * region;
        let col_beta = |region: usize| 1 + 2 * region + 1; // absent for last

        for (iface, &radius) in scatterer.radii.iter().enumerate() {
            let eta = scatterer.etas[iface];
            let row_val = 2 * iface;
            let row_der = 2 * iface + 1;
            // outer side values at the interface
            let (out_val_cols, out_der_cols, out_rhs_val, out_rhs_der);
            if iface == 0 {
                let z = Complex64::new(k * radius, 0.0);
                let (j, jp) = j_pair(n, z, parity)?;
                let (h, hp) = h_pair(n, z, parity)?;
                out_val_cols = vec![(0usize, h)];
                out_der_cols = vec![(0usize, hp * k)];
                out_rhs_val = c_n * j;
                out_rhs_der = c_n * jp * k;
            } else {
                let outer = iface - 1;
                let z = kr[outer] * radius;
                let (j, jp) = j_pair(n, z, parity)?;
                let (y, yp) = y_pair(n, z, parity)?;
                out_val_cols = vec![(col_alpha(outer), j), (col_beta(outer), y)];
                out_der_cols = vec![
                    (col_alpha(outer), jp * kr[outer]),
                    (col_beta(outer), yp * kr[outer]),
                ];
                out_rhs_val = Complex64::new(0.0, 0.0);
                out_rhs_der = Complex64::new(0.0, 0.0);
            }
            // inner side
            let inner = iface;
            let z = kr[inner] * radius;
            let (j_in, jp_in) = j_pair(n, z, parity)?;
            let innermost = inner == n_regions - 1;
            let mut in_val_cols = vec![(col_alpha(inner), j_in)];
            let mut in_der_cols = vec![(col_alpha(inner), jp_in * kr[inner])];
            if !innermost {
                let (y_in, yp_in) = y_pair(n, z, parity)?;
                in_val_cols.push((col_beta(inner), y_in));
                in_der_cols.push((col_beta(inner), yp_in * kr[inner]));
            }

            // continuity: outer - inner = 0
            for &(col, v) in &out_val_cols {
                a[row_val][col] += v;
            }
            for &(col, v) in &in_val_cols {
                a[row_val][col] -= v;
            }
            rhs[row_val] = -out_rhs_val;

            // derivative jump: inner' - outer' - eta * outer = 0
            for &(col, v) in &in_der_cols {
                a[row_der][col] += v;
            }
            for &(col, v) in &out_der_cols {
                a[row_der][col] -= v;
            }
            for &(col, v) in &out_val_cols {
                a[row_der][col] -= eta * v;
            }
            rhs[row_der] = out_rhs_der + eta * out_rhs_val;
        }
        // the innermost beta column is unused: pin it to keep the system
        // square and nonsingular
        let last_beta = col_beta(n_regions - 1);
        if last_beta < dim {
            a[last_beta][last_beta] = Complex64::new(1.0, 0.0);
        }

        let x = solve_dense(&mut a, &mut rhs).ok_or(DiskError::Resonance { n: sn, k })?;
        let idx = (sn + n_max as i64) as usize;
        scattered[idx] = x[0];
        for region in 0..n_regions {
            let alpha = x[col_alpha(region)];
            let beta = if region == n_regions - 1 {
                Complex64::new(0.0, 0.0)
            } else {
                x[col_beta(region)]
            };
            interior[idx][region] = (alpha, beta);
        }
    }
    Ok(ModalSolution {
        scatterer: scatterer.clone(),
        k,
        incident: incident.clone(),
        n_max,
        incident_coeffs,
        scattered,
        interior,
    })
}

/// `J_{n}` and derivative for possibly negative order folded into `parity`.
fn j_pair(n: usize, z: Complex64, parity: f64) -> Result<(Complex64, Complex64), DiskError> {
    let seq = bessel_j_seq(n + 1, z);
    let j = seq[n];
    let jp = if n == 0 {
        -seq[1]
    } else {
        seq[n - 1] - (n as f64 / z) * seq[n]
    };
    Ok((parity * j, parity * jp))
}

fn y_pair(n: usize, z: Complex64, parity: f64) -> Result<(Complex64, Complex64), DiskError> {
    let seq = bessel_y_seq(n + 1, z)?;
    let y = seq[n];
    let yp = if n == 0 {
        -seq[1]
    } else {
        seq[n - 1] - (n as f64 / z) * seq[n]
    };
    Ok((parity * y, parity * yp))
}

fn h_pair(n: usize, z: Complex64, parity: f64) -> Result<(Complex64, Complex64), DiskError> {
    let seq = hankel1_seq(n + 1, z)?;
    let h = seq[n];
    let hp = if n == 0 {
        -seq[1]
    } else {
        seq[n - 1] - (n as f64 / z) * seq[n]
    };
    Ok((parity * h, parity * hp))
}

/// Dense complex solve by Gaussian elimination with partial pivoting.
/// Columns are equilibrated first; Bessel and Hankel columns differ by many
/// orders of magnitude at high mode numbers. Returns `None` on a
/// (near-)singular pivot.
fn solve_dense(a: &mut [Vec<Complex64>], rhs: &mut [Complex64]) -> Option<Vec<Complex64>> {
    let n = rhs.len();
    let mut col_scale = vec![1.0f64; n];
    for (col, scale) in col_scale.iter_mut().enumerate() {
        let m = a.iter().map(|row| row[col].norm()).fold(0.0f64, f64::max);
        if m > 0.0 {
            *scale = m;
            for row in a.iter_mut() {
                row[col] /= m;
            }
        }
    }
    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if pivot_mag < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = a[col][col];
        for r in col + 1..n {
            let factor = a[r][col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for cc in col..n {
                let v = a[col][cc];
                a[r][cc] -= factor * v;
            }
            let v = rhs[col];
            rhs[r] -= factor * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for cc in row + 1..n {
            acc -= a[row][cc] * x[cc];
        }
        x[row] = acc / a[row][row];
    }
    for (xi, &s) in x.iter_mut().zip(col_scale.iter()) {
        *xi /= s;
    }
    Some(x)
}

impl ModalSolution {
    /// Total field at a point.
    pub fn eval(&self, x: Vec2) -> Complex64 {
        self.eval_many(&[x])[0]
    }

    /// Total field at many points.
    pub fn eval_many(&self, points: &[Vec2]) -> Vec<Complex64> {
        points.iter().map(|&p| self.eval_inner(p)).collect()
    }

    fn region_of(&self, r: f64) -> Option<usize> {
        let radii = &self.scatterer.radii;
        if r >= radii[0] {
            return None;
        }
        for (i, &radius) in radii.iter().enumerate() {
            let inner = radii.get(i + 1).copied().unwrap_or(0.0);
            if r < radius && r >= inner {
                return Some(i);
            }
        }
        Some(radii.len() - 1)
    }

    fn eval_inner(&self, p: Vec2) -> Complex64 {
        let r = p.norm();
        let theta = p.angle();
        let n_max = self.n_max;
        match self.region_of(r) {
            None => {
                let z = Complex64::new(self.k * r, 0.0);
                let j = bessel_j_seq(n_max, z);
                let h = hankel1_seq(n_max, z).expect("r > 0 outside scatterer");
                let mut acc = Complex64::new(0.0, 0.0);
                for sn in -(n_max as i64)..=n_max as i64 {
                    let idx = (sn + n_max as i64) as usize;
                    let n = sn.unsigned_abs() as usize;
                    let parity = if sn < 0 && sn % 2 != 0 { -1.0 } else { 1.0 };
                    let ph = Complex64::from_polar(1.0, sn as f64 * theta);
                    acc += (self.incident_coeffs[idx] * parity * j[n]
                        + self.scattered[idx] * parity * h[n])
                        * ph;
                }
                acc
            }
            Some(region) => {
                let kz = region_wavenumbers(&self.scatterer, self.k)[region];
                let z = kz * r;
                let j = bessel_j_seq(n_max, z);
                let innermost = region == self.scatterer.radii.len() - 1;
                let y = if innermost {
                    None
                } else {
                    Some(bessel_y_seq(n_max, z).expect("annulus excludes origin"))
                };
                let mut acc = Complex64::new(0.0, 0.0);
                for sn in -(n_max as i64)..=n_max as i64 {
                    let idx = (sn + n_max as i64) as usize;
                    let n = sn.unsigned_abs() as usize;
                    let parity = if sn < 0 && sn % 2 != 0 { -1.0 } else { 1.0 };
                    let (alpha, beta) = self.interior[idx][region];
                    let ph = Complex64::from_polar(1.0, sn as f64 * theta);
                    let mut v = alpha * parity * j[n];
                    if let Some(ref y) = y {
                        v += beta * parity * y[n];
                    }
                    acc += v * ph;
                }
                acc
            }
        }
    }

    /// Cartesian gradient of the total field.
    pub fn grad(&self, p: Vec2) -> [Complex64; 2] {
        let r = p.norm().max(1e-12);
        let theta = p.angle();
        let n_max = self.n_max;
        let (dr, dth) = match self.region_of(p.norm()) {
            None => {
                let z = Complex64::new(self.k * r, 0.0);
                let j = bessel_j_seq(n_max + 1, z);
                let h = hankel1_seq(n_max + 1, z).expect("outside scatterer");
                let mut dr = Complex64::new(0.0, 0.0);
                let mut dth = Complex64::new(0.0, 0.0);
                for sn in -(n_max as i64)..=n_max as i64 {
                    let idx = (sn + n_max as i64) as usize;
                    let n = sn.unsigned_abs() as usize;
                    let parity = if sn < 0 && sn % 2 != 0 { -1.0 } else { 1.0 };
                    let ph = Complex64::from_polar(1.0, sn as f64 * theta);
                    let jp = if n == 0 { -j[1] } else { j[n - 1] - (n as f64 / z) * j[n] };
                    let hp = if n == 0 { -h[1] } else { h[n - 1] - (n as f64 / z) * h[n] };
                    let c = self.incident_coeffs[idx] * parity;
                    let s = self.scattered[idx] * parity;
                    dr += (c * jp + s * hp) * self.k * ph;
                    dth += (c * j[n] + s * h[n]) * Complex64::i() * sn as f64 * ph;
                }
                (dr, dth)
            }
            Some(region) => {
                let kz = region_wavenumbers(&self.scatterer, self.k)[region];
                let z = kz * r;
                let j = bessel_j_seq(n_max + 1, z);
                let innermost = region == self.scatterer.radii.len() - 1;
                let y = if innermost {
                    None
                } else {
                    Some(bessel_y_seq(n_max + 1, z).expect("annulus excludes origin"))
                };
                let mut dr = Complex64::new(0.0, 0.0);
                let mut dth = Complex64::new(0.0, 0.0);
                for sn in -(n_max as i64)..=n_max as i64 {
                    let idx = (sn + n_max as i64) as usize;
                    let n = sn.unsigned_abs() as usize;
                    let parity = if sn < 0 && sn % 2 != 0 { -1.0 } else { 1.0 };
                    let (alpha, beta) = self.interior[idx][region];
                    let ph = Complex64::from_polar(1.0, sn as f64 * theta);
                    let jp = if n == 0 { -j[1] } else { j[n - 1] - (n as f64 / z) * j[n] };
                    let mut val = alpha * parity * j[n];
                    let mut der = alpha * parity * jp;
                    if let Some(ref y) = y {
                        let yp = if n == 0 { -y[1] } else { y[n - 1] - (n as f64 / z) * y[n] };
                        val += beta * parity * y[n];
                        der += beta * parity * yp;
                    }
                    dr += der * kz * ph;
                    dth += val * Complex64::i() * sn as f64 * ph;
                }
                (dr, dth)
            }
        };
        let (st, ct) = theta.sin_cos();
        [dr * ct - dth * st / r, dr * st + dth * ct / r]
    }

    /// Scattered field only (exterior evaluation).
    pub fn scattered_eval(&self, p: Vec2) -> Complex64 {
        let r = p.norm();
        debug_assert!(r >= self.scatterer.radii[0]);
        let theta = p.angle();
        let h = hankel1_seq(self.n_max, Complex64::new(self.k * r, 0.0)).expect("r > 0");
        let mut acc = Complex64::new(0.0, 0.0);
        for sn in -(self.n_max as i64)..=self.n_max as i64 {
            let idx = (sn + self.n_max as i64) as usize;
            let n = sn.unsigned_abs() as usize;
            let parity = if sn < 0 && sn % 2 != 0 { -1.0 } else { 1.0 };
            acc += self.scattered[idx] * parity * h[n] * Complex64::from_polar(1.0, sn as f64 * theta);
        }
        acc
    }

    /// Worst transmission-condition residual over modes and interfaces,
    /// relative to the local field scale.
    pub fn transmission_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        let k = self.k;
        let kr = region_wavenumbers(&self.scatterer, k);
        for sn in -(self.n_max as i64)..=self.n_max as i64 {
            let idx = (sn + self.n_max as i64) as usize;
            let n = sn.unsigned_abs() as usize;
            let parity = if sn < 0 && sn % 2 != 0 { -1.0 } else { 1.0 };
            for (iface, &radius) in self.scatterer.radii.iter().enumerate() {
                let eta = self.scatterer.etas[iface];
                // outer side
                let (oval, oder) = if iface == 0 {
                    let z = Complex64::new(k * radius, 0.0);
                    let (j, jp) = j_pair(n, z, parity).unwrap();
                    let (h, hp) = h_pair(n, z, parity).unwrap();
                    let c = self.incident_coeffs[idx];
                    let s = self.scattered[idx];
                    (c * j + s * h, (c * jp + s * hp) * k)
                } else {
                    let outer = iface - 1;
                    let z = kr[outer] * radius;
                    let (j, jp) = j_pair(n, z, parity).unwrap();
                    let (y, yp) = y_pair(n, z, parity).unwrap();
                    let (alpha, beta) = self.interior[idx][outer];
                    (
                        alpha * j + beta * y,
                        (alpha * jp + beta * yp) * kr[outer],
                    )
                };
                // inner side
                let inner = iface;
                let z = kr[inner] * radius;
                let (j, jp) = j_pair(n, z, parity).unwrap();
                let innermost = inner == self.scatterer.radii.len() - 1;
                let (alpha, beta) = self.interior[idx][inner];
                let (mut ival, mut ider) = (alpha * j, alpha * jp * kr[inner]);
                if !innermost {
                    let (y, yp) = y_pair(n, z, parity).unwrap();
                    ival += beta * y;
                    ider += beta * yp * kr[inner];
                }
                let scale = oval.norm().max(oder.norm()).max(1e-14);
                worst = worst.max((oval - ival).norm() / scale);
                worst = worst.max((ider - oder - eta * oval).norm() / scale);
            }
        }
        worst
    }
}

/// Far-field pattern `u_infty(theta) = sqrt(2/(pi k)) e^{-i pi/4} sum_n s_n
/// (-i)^n e^{i n theta}`; the constant comes from the large-argument Hankel
/// asymptotics and is pinned by the finite-radius comparison test.
pub fn far_field(sol: &ModalSolution, directions: &[f64]) -> FarFieldPattern {
    let k = sol.k;
    let amp = (2.0 / (PI * k)).sqrt() * Complex64::from_polar(1.0, -PI / 4.0);
    let values = directions
        .iter()
        .map(|&theta| {
            let mut acc = Complex64::new(0.0, 0.0);
            for sn in -(sol.n_max as i64)..=sol.n_max as i64 {
                let idx = (sn + sol.n_max as i64) as usize;
                acc += sol.scattered[idx]
                    * i_pow(-sn)
                    * Complex64::from_polar(1.0, sn as f64 * theta);
            }
            amp * acc
        })
        .collect();
    FarFieldPattern {
        angles: directions.to_vec(),
        values,
    }
}
