//! Desk-scale experiments: invisibility scans, far-field comparisons,
//! admissibility checks at polygon vertices, and corner regularity probes.
//!
//! The harness is one-sided about invisibility: it can witness "not
//! invisible" (a far-field norm bounded away from zero) but can never
//! certify invisibility; reports carry that caveat in their metadata.

use crate::disk;
use crate::fem;
use crate::geometry::Vec2;
use crate::scatterer::{FarFieldPattern, Incident, Scatterer};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Fem(#[from] fem::FemError),
    #[error(transparent)]
    Disk(#[from] disk::DiskError),
    #[error("admissibility needs at least 4 radii, got {0}")]
    TooFewRadii(usize),
    #[error("extrapolation did not converge: {0}")]
    NonConvergent(String),
    #[error("scatterer solve failed at k = {k}: {reason}")]
    SolveFailed { k: f64, reason: String },
}

/// How to produce far fields for a scatterer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    /// Separation of variables for disks, finite elements otherwise.
    Auto,
    Fem,
    Mie,
}

/// Discretization choices for the forward solvers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Target mesh size; default `lambda / 20`.
    pub h: Option<f64>,
    /// Truncation radius; default `max(2 R, R + 0.75 lambda)`.
    pub rt: Option<f64>,
    /// Far-field sample count on the unit circle.
    pub far_angles: usize,
    pub method: SolveMethod,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            h: None,
            rt: None,
            far_angles: 256,
            method: SolveMethod::Auto,
        }
    }
}

impl SolverSettings {
    pub fn mesh_size(&self, k: f64) -> f64 {
        self.h.unwrap_or(2.0 * PI / k / 20.0)
    }

    pub fn truncation_radius(&self, circumradius: f64, k: f64) -> f64 {
        let r = circumradius.max(0.25);
        self.rt.unwrap_or((2.0 * r).max(r + 0.75 * 2.0 * PI / k))
    }
}

/// Far field of a scatterer under one incident wave.
pub fn compute_far_field(
    s: &Scatterer,
    k: f64,
    incident: &Incident,
    settings: &SolverSettings,
) -> Result<FarFieldPattern, ExperimentError> {
    let angles = FarFieldPattern::uniform_angles(settings.far_angles);
    let use_mie = match settings.method {
        SolveMethod::Mie => true,
        SolveMethod::Fem => false,
        SolveMethod::Auto => matches!(s, Scatterer::Disk(_)),
    };
    if use_mie {
        let d = match s {
            Scatterer::Disk(d) => d.clone(),
            _ => {
                return Err(ExperimentError::SolveFailed {
                    k,
                    reason: "separation of variables requires a disk scatterer".into(),
                })
            }
        };
        let sol = disk::mie_solve(&d, k, incident, None)?;
        return Ok(disk::far_field(&sol, &angles));
    }
    if s.is_trivial() {
        // nothing to solve; the scattered field is identically zero
        return Ok(FarFieldPattern {
            angles: angles.clone(),
            values: vec![Complex64::new(0.0, 0.0); angles.len()],
        });
    }
    let h = settings.mesh_size(k);
    let rt = settings.truncation_radius(s.circumradius(), k);
    let mesh = fem::mesh_scatterer(s, rt, h).map_err(fem::FemError::Mesh)?;
    let sol = fem::solve(mesh, s, k, incident)?;
    let extraction = 0.5 * (s.circumradius().max(0.2) + rt);
    Ok(fem::near_to_far(&sol, extraction, &angles)?)
}

/// One row of an invisibility scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: f64,
    /// `L^2(S^1)` norm of the far field; NaN when the solve failed.
    pub farfield_norm: f64,
    /// Below the invisibility threshold.
    pub flagged: bool,
    pub error: Option<String>,
}

/// Scan metadata and rows; serializable for the report files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub theta_inv: f64,
    /// Norm of the incident wave used for the relative threshold.
    pub incident_scale: f64,
    pub caveat: String,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn min_norm(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.error.is_none())
            .map(|r| r.farfield_norm)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn any_flagged(&self) -> bool {
        self.rows.iter().any(|r| r.flagged)
    }
}

/// Default invisibility threshold (relative to the incident scale).
pub const THETA_INV: f64 = 1e-4;
/// Default admissibility threshold after extrapolation.
pub const THETA_ADM: f64 = 1e-3;

/// Far-field norm per wavenumber, flagging candidate near-invisibility.
/// Solver failures are recorded and the scan continues.
pub fn invisibility_scan(
    s: &Scatterer,
    k_grid: &[f64],
    incident: &Incident,
    settings: &SolverSettings,
    theta_inv: f64,
) -> ScanReport {
    let mut k_grid: Vec<f64> = k_grid.to_vec();
    k_grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in &k_grid {
        match compute_far_field(s, k, incident, settings) {
            Ok(ff) => {
                let norm = ff.l2_norm();
                rows.push(ScanRow {
                    k,
                    farfield_norm: norm,
                    flagged: norm < theta_inv,
                    error: None,
                });
            }
            Err(e) => rows.push(ScanRow {
                k,
                farfield_norm: f64::NAN,
                flagged: false,
                error: Some(e.to_string()),
            }),
        }
    }
    ScanReport {
        theta_inv,
        incident_scale: 1.0,
        caveat: "one-sided witness: norms above threshold refute invisibility; \
                 norms below cannot certify it"
            .into(),
        rows,
    }
}

/// `L^2(S^1)` distance between the far fields of two scatterers under the
/// same incident wave.
pub fn farfield_difference(
    s1: &Scatterer,
    s2: &Scatterer,
    k: f64,
    incident: &Incident,
    settings: &SolverSettings,
) -> Result<f64, ExperimentError> {
    let f1 = compute_far_field(s1, k, incident, settings)?;
    let f2 = compute_far_field(s2, k, incident, settings)?;
    Ok(f1.l2_diff(&f2))
}

/// Pointwise field access used by the admissibility quadrature.
pub trait FieldEval {
    fn value(&self, x: Vec2) -> Complex64;
    fn gradient(&self, x: Vec2) -> [Complex64; 2];
}

/// Total FEM field as a [`FieldEval`].
pub struct FemField<'a>(pub &'a fem::FemSolution);

impl FieldEval for FemField<'_> {
    fn value(&self, x: Vec2) -> Complex64 {
        self.0.total_at(x).unwrap_or(Complex64::new(f64::NAN, 0.0))
    }
    fn gradient(&self, x: Vec2) -> [Complex64; 2] {
        self.0
            .grad_total_at(x)
            .unwrap_or([Complex64::new(f64::NAN, 0.0); 2])
    }
}

/// Total modal (disk oracle) field as a [`FieldEval`].
pub struct MieField<'a>(pub &'a disk::ModalSolution);

impl FieldEval for MieField<'_> {
    fn value(&self, x: Vec2) -> Complex64 {
        self.0.eval(x)
    }
    fn gradient(&self, x: Vec2) -> [Complex64; 2] {
        self.0.grad(x)
    }
}

/// Closures as fields, for synthetic checks.
pub struct ClosureField<V, G>(pub V, pub G);

impl<V: Fn(Vec2) -> Complex64, G: Fn(Vec2) -> [Complex64; 2]> FieldEval for ClosureField<V, G> {
    fn value(&self, x: Vec2) -> Complex64 {
        (self.0)(x)
    }
    fn gradient(&self, x: Vec2) -> [Complex64; 2] {
        (self.1)(x)
    }
}

/// Verdict of the vertex admissibility check, with the extrapolated ball
/// averages behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Admissibility {
    /// The field itself does not vanish at the vertex.
    CondI { limit: f64 },
    /// The field vanishes but the gradient does not; the flags record which
    /// partial derivatives survive (the three sub-cases of the gradient
    /// condition).
    CondII { d1: bool, d2: bool, limits: [f64; 2] },
    /// Both shrinking-ball averages vanish.
    Inadmissible { value_limit: f64, gradient_limit: f64 },
}

/// Shrinking-ball averages of `|u|` and `|grad u|` extrapolated to the
/// vertex, classified against `theta_adm`.
///
/// `rho_grid` must be at least four radii in decreasing geometric
/// progression; the limit is an Aitken extrapolation over the last three
/// entries with a consistency diagnostic over the previous window.
pub fn admissibility_check(
    field: &dyn FieldEval,
    vertex: Vec2,
    rho_grid: &[f64],
    theta_adm: f64,
) -> Result<Admissibility, ExperimentError> {
    if rho_grid.len() < 4 {
        return Err(ExperimentError::TooFewRadii(rho_grid.len()));
    }
    debug_assert!(rho_grid.windows(2).all(|w| w[1] < w[0]));
    let avg_value: Vec<f64> = rho_grid
        .iter()
        .map(|&rho| ball_average(field, vertex, rho, false, 0))
        .collect();
    let value_limit = extrapolate(&avg_value)?;
    if value_limit > theta_adm {
        return Ok(Admissibility::CondI { limit: value_limit });
    }
    let avg_d1: Vec<f64> = rho_grid
        .iter()
        .map(|&rho| ball_average(field, vertex, rho, true, 0))
        .collect();
    let avg_d2: Vec<f64> = rho_grid
        .iter()
        .map(|&rho| ball_average(field, vertex, rho, true, 1))
        .collect();
    let l1 = extrapolate(&avg_d1)?;
    let l2 = extrapolate(&avg_d2)?;
    if l1 > theta_adm || l2 > theta_adm {
        return Ok(Admissibility::CondII {
            d1: l1 > theta_adm,
            d2: l2 > theta_adm,
            limits: [l1, l2],
        });
    }
    Ok(Admissibility::Inadmissible {
        value_limit,
        gradient_limit: l1.max(l2),
    })
}

/// Ball average of `|u|` or `|d_i u|` by tensor quadrature (Gauss radial x
/// trapezoid angular).
fn ball_average(
    field: &dyn FieldEval,
    center: Vec2,
    rho: f64,
    use_gradient: bool,
    component: usize,
) -> f64 {
    const N_ANG: usize = 48;
    const GL8_NODES: [f64; 8] = [
        0.019855071751231884,
        0.10166676129318663,
        0.2372337950418355,
        0.40828267875217505,
        0.591717321247825,
        0.7627662049581645,
        0.8983332387068134,
        0.9801449282487681,
    ];
    const GL8_WEIGHTS: [f64; 8] = [
        0.05061426814518813,
        0.11119051722668723,
        0.15685332293894372,
        0.18134189168918097,
        0.18134189168918097,
        0.15685332293894372,
        0.11119051722668723,
        0.05061426814518813,
    ];
    let mut acc = 0.0;
    for (&t, &w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        let r = rho * t;
        let mut ring = 0.0;
        for j in 0..N_ANG {
            let th = 2.0 * PI * j as f64 / N_ANG as f64;
            let x = center + Vec2::from_polar(r, th);
            let v = if use_gradient {
                field.gradient(x)[component].norm()
            } else {
                field.value(x).norm()
            };
            ring += v;
        }
        acc += w * (ring / N_ANG as f64) * t;
    }
    // average over the ball: (1 / pi rho^2) int_0^rho int |u| r dth dr,
    // with r = rho t: equals 2 int_0^1 mean_ring(t) t dt
    2.0 * acc
}

/// Aitken extrapolation over the final triple, with a consistency check
/// against the previous window.
fn extrapolate(values: &[f64]) -> Result<f64, ExperimentError> {
    let n = values.len();
    let aitken = |a: f64, b: f64, c: f64| -> f64 {
        let denom = (c - b) - (b - a);
        if denom.abs() < 1e-14 * (a.abs() + c.abs()).max(1e-300) {
            c
        } else {
            c - (c - b) * (c - b) / denom
        }
    };
    let last = aitken(values[n - 3], values[n - 2], values[n - 1]);
    let prev = aitken(values[n - 4], values[n - 3], values[n - 2]);
    let scale = values[n - 1].abs().max(1e-12);
    if (last - prev).abs() > 0.25 * scale.max(last.abs()) {
        return Err(ExperimentError::NonConvergent(format!(
            "extrapolants {prev:.4e} and {last:.4e} disagree"
        )));
    }
    Ok(last.max(0.0))
}

/// Whether a vertex verdict survives the opening-angle restriction.
///
/// The gradient condition only certifies uniqueness at openings in
/// `(0, pi)` away from the right angle (its determinant vanishes there);
/// whether the value condition should also exclude `pi/2` is a preset
/// choice, exposed as `exclude_right_angle_for_value`.
pub fn angle_filter(
    opening: f64,
    verdict: &Admissibility,
    exclude_right_angle_for_value: bool,
) -> bool {
    let right = (opening - PI / 2.0).abs() < 1e-9;
    let in_range = opening > 0.0 && opening < PI;
    match verdict {
        Admissibility::CondI { .. } => in_range && !(exclude_right_angle_for_value && right),
        Admissibility::CondII { .. } => in_range && !right,
        Admissibility::Inadmissible { .. } => false,
    }
}

/// Fitted local growth exponent of a solution at a corner.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityEstimate {
    /// Fitted exponent of `sup_{|x - v| = rho} |u(x) - u(v)| ~ C rho^alpha`.
    pub alpha: f64,
    pub r_squared: f64,
    /// False when the fit is degenerate or r^2 < 0.9.
    pub reliable: bool,
}

/// Probe the growth of the field away from a vertex on a geometric radius
/// grid.
pub fn corner_regularity_probe(
    field: &dyn FieldEval,
    vertex: Vec2,
    rho_grid: &[f64],
) -> Result<RegularityEstimate, ExperimentError> {
    if rho_grid.len() < 4 {
        return Err(ExperimentError::TooFewRadii(rho_grid.len()));
    }
    let center = field.value(vertex);
    let sups: Vec<f64> = rho_grid
        .iter()
        .map(|&rho| {
            let mut sup = 0.0f64;
            for j in 0..96 {
                let th = 2.0 * PI * j as f64 / 96.0;
                let v = field.value(vertex + Vec2::from_polar(rho, th));
                if v.re.is_finite() {
                    sup = sup.max((v - center).norm());
                }
            }
            sup
        })
        .collect();
    let scale = center.norm().max(1e-12);
    if sups.iter().all(|&s| s < 1e-10 * scale) {
        return Ok(RegularityEstimate {
            alpha: f64::NAN,
            r_squared: 0.0,
            reliable: false,
        });
    }
    // log-log least squares
    let xs: Vec<f64> = rho_grid.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = sups.iter().map(|s| s.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    let alpha = slope.clamp(0.0, 1.5);
    Ok(RegularityEstimate {
        alpha,
        r_squared,
        reliable: r_squared >= 0.9 && slope > 0.0,
    })
}
