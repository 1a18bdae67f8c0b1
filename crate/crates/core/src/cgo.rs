//! Complex-geometrical-optics corner probes.
//!
//! The probe is the pure exponential `e^{rho . x}` with `rho = -tau (d + i
//! d_perp)`, so `rho . rho = 0` and along a ray of polar angle `theta` the
//! phase is `exp(-tau r e^{+- i (theta - phi)})` depending on which of the
//! two perpendicular choices is active. Boundary and area moments of such
//! phases against `r^m` weights reduce to incomplete-Gamma closed forms with
//! `Gamma(m+1) / mu^{m+1}` leading behavior; a geometric `tau` sweep plus a
//! log-log fit turns each asymptotic statement into a measured slope.

use crate::geometry::{Sector, Vec2};
use crate::specfun::{gamma_fn, lower_incomplete_gamma, FourierBesselField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CgoError {
    #[error("sector opening {0} leaves no uniform decay direction (need beta < pi)")]
    OpeningTooWide(f64),
    #[error("Re mu = {0} must be positive")]
    NonDecayingMoment(f64),
    #[error("phase does not decay on the ray at angle {theta}: Re mu = {re_mu}")]
    DecayViolatedOnRay { theta: f64, re_mu: f64 },
    #[error("tau grid needs at least {needed} points, got {got}")]
    GridTooShort { needed: usize, got: usize },
    #[error("zero value in sweep at grid index {0}")]
    ZeroValue(usize),
    #[error(transparent)]
    SpecFun(#[from] crate::specfun::SpecFunError),
}

/// Which perpendicular completes the probe direction.
///
/// `Plus` is `d_perp = (-sin phi, cos phi)`, `Minus` the negative; along the
/// ray at angle `theta` they produce phase rates `mu = tau e^{i (theta -
/// phi)}` and `tau e^{-i (theta - phi)}` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerpChoice {
    Plus,
    Minus,
}

/// Probe parameters: direction angle `phi`, perpendicular branch, and the
/// large parameter `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgoParams {
    pub phi: f64,
    pub perp: PerpChoice,
    pub tau: f64,
}

impl CgoParams {
    pub fn new(phi: f64, perp: PerpChoice, tau: f64) -> Self {
        assert!(tau > 0.0, "tau must be positive");
        Self { phi, perp, tau }
    }

    pub fn direction(&self) -> Vec2 {
        Vec2::from_polar(1.0, self.phi)
    }

    pub fn perp_direction(&self) -> Vec2 {
        let base = Vec2::new(-self.phi.sin(), self.phi.cos());
        match self.perp {
            PerpChoice::Plus => base,
            PerpChoice::Minus => -base,
        }
    }

    /// `rho = -tau (d + i d_perp)` as a complex 2-vector.
    pub fn rho(&self) -> [Complex64; 2] {
        let d = self.direction();
        let p = self.perp_direction();
        [
            -self.tau * Complex64::new(d.x, p.x),
            -self.tau * Complex64::new(d.y, p.y),
        ]
    }

    /// `rho . rho`; zero up to roundoff by construction.
    pub fn rho_dot_rho(&self) -> Complex64 {
        let r = self.rho();
        r[0] * r[0] + r[1] * r[1]
    }

    /// Phase decay rate along the ray at polar angle `theta`:
    /// `mu(theta) = tau e^{+- i (theta - phi)}` so that
    /// `e^{rho . x} = e^{-mu(theta) r}` on the ray.
    pub fn ray_rate(&self, theta: f64) -> Complex64 {
        let sign = match self.perp {
            PerpChoice::Plus => 1.0,
            PerpChoice::Minus => -1.0,
        };
        self.tau * Complex64::from_polar(1.0, sign * (theta - self.phi))
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self { tau, ..*self }
    }
}

/// Bisector probe direction for a sector, with the uniform decay margin
/// `varsigma = cos(beta / 2)`: `d . x_hat >= varsigma > 0` on the closed
/// sector.
///
/// The returned template has `tau = 1`; scale with [`CgoParams::with_tau`].
pub fn pick_direction(sector: &Sector) -> Result<(CgoParams, f64), CgoError> {
    let beta = sector.opening();
    if !(beta > 0.0 && beta < std::f64::consts::PI) {
        return Err(CgoError::OpeningTooWide(beta));
    }
    let phi = sector.bisector();
    let varsigma = (beta / 2.0).cos();
    let params = CgoParams::new(phi, PerpChoice::Plus, 1.0);
    debug_assert!({
        let d = params.direction();
        (0..=64).all(|i| {
            let th = sector.theta_m + beta * i as f64 / 64.0;
            d.dot(Vec2::from_polar(1.0, th)) >= varsigma - 1e-12
        })
    });
    Ok((params, varsigma))
}

/// The exact probe factor `e^{rho . x}`.
pub fn cgo_phase(params: &CgoParams, x: Vec2) -> Complex64 {
    let rho = params.rho();
    (rho[0] * x.x + rho[1] * x.y).exp()
}

/// Exact and leading values of the segment moment
/// `int_0^zeta r^s e^{-mu r} dr`, plus the exponential remainder bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentMoment {
    /// Closed form `gamma(s+1, mu zeta) / mu^{s+1}`.
    pub exact: Complex64,
    /// Leading term `Gamma(s+1) / mu^{s+1}`.
    pub leading: Complex64,
    /// `(2 / Re mu) e^{-(zeta/2) Re mu}`; bounds `|exact - leading|` in the
    /// large-`Re mu` regime.
    pub remainder_bound: f64,
}

/// Segment moment of a monomial against a decaying exponential.
pub fn segment_moment(s: f64, mu: Complex64, zeta: f64) -> Result<SegmentMoment, CgoError> {
    if mu.re <= 0.0 {
        return Err(CgoError::NonDecayingMoment(mu.re));
    }
    assert!(s >= 0.0 && zeta > 0.0);
    let mu_pow = ((s + 1.0) * mu.ln()).exp();
    let exact = lower_incomplete_gamma(s + 1.0, mu * zeta)? / mu_pow;
    let leading = Complex64::new(gamma_fn(s + 1.0), 0.0) / mu_pow;
    let remainder_bound = 2.0 / mu.re * (-0.5 * zeta * mu.re).exp();
    Ok(SegmentMoment {
        exact,
        leading,
        remainder_bound,
    })
}

/// Exact and leading values of a corner integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerIntegral {
    pub exact: Complex64,
    pub leading: Complex64,
}

/// Boundary moment of a Fourier-Bessel angular profile against the probe:
///
/// `int_{both rays} (sum_n a_n e^{i n theta} + b_n e^{-i n theta}) r^m
/// e^{rho . x} d sigma`
///
/// with the monomial weight `r^m` supplied by the caller (matching the
/// leading power of the Bessel factor under study). `exact` uses the
/// incomplete-Gamma closed form per ray, `leading` the two-ray
/// `Gamma(m+1) / mu^{m+1}` formula.
pub fn boundary_corner_integral(
    field: &FourierBesselField,
    weight_power: u32,
    sector: &Sector,
    params: &CgoParams,
) -> Result<CornerIntegral, CgoError> {
    let mut exact = Complex64::new(0.0, 0.0);
    let mut leading = Complex64::new(0.0, 0.0);
    for &theta in &[sector.theta_m, sector.theta_max] {
        let mu = params.ray_rate(theta);
        if mu.re <= 0.0 {
            return Err(CgoError::DecayViolatedOnRay {
                theta,
                re_mu: mu.re,
            });
        }
        let ang = angular_profile(field, theta);
        let m = segment_moment(weight_power as f64, mu, sector.r0)?;
        exact += ang * m.exact;
        leading += ang * m.leading;
    }
    Ok(CornerIntegral { exact, leading })
}

fn angular_profile(field: &FourierBesselField, theta: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &(a, b)) in field.coeffs.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, n as f64 * theta);
        acc += a * ph + b * ph.conj();
    }
    acc
}

/// Monomial weight for the area integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monomial {
    One,
    X1,
    X2,
}

/// Area moment of a monomial against the probe over the sector:
/// `int_S monomial(x) e^{rho . x} dx`.
///
/// `exact` integrates the radial closed form over the angle adaptively
/// (tolerance 1e-12); `leading` is the order `tau^{-2}` (monomial 1) or
/// `tau^{-3}` (x1, x2) angular closed form.
pub fn sector_area_integral(
    monomial: Monomial,
    sector: &Sector,
    params: &CgoParams,
) -> Result<CornerIntegral, CgoError> {
    let (theta_m, theta_max) = (sector.theta_m, sector.theta_max);
    for &theta in &[theta_m, theta_max] {
        let mu = params.ray_rate(theta);
        if mu.re <= 0.0 {
            return Err(CgoError::DecayViolatedOnRay {
                theta,
                re_mu: mu.re,
            });
        }
    }
    let r0 = sector.r0;
    let radial_power = match monomial {
        Monomial::One => 1.0,
        Monomial::X1 | Monomial::X2 => 2.0,
    };
    let integrand = |theta: f64| -> Complex64 {
        let w = match monomial {
            Monomial::One => 1.0,
            Monomial::X1 => theta.cos(),
            Monomial::X2 => theta.sin(),
        };
        let mu = params.ray_rate(theta);
        let mu_pow = ((radial_power + 1.0) * mu.ln()).exp();
        let g = lower_incomplete_gamma(radial_power + 1.0, mu * r0)
            .expect("Re(mu zeta) > 0 inside the sector");
        w * g / mu_pow
    };
    let exact = adaptive_gauss_kronrod(&integrand, theta_m, theta_max, 1e-12, 1e-12);

    let tau = params.tau;
    let phi = params.phi;
    let i = Complex64::i();
    let leading = match (monomial, params.perp) {
        (Monomial::One, PerpChoice::Plus) => {
            // Gamma(2)/tau^2 e^{2 i phi} [e^{-2 i theta} / (-2 i)]
            let bracket = (Complex64::from_polar(1.0, -2.0 * theta_max)
                - Complex64::from_polar(1.0, -2.0 * theta_m))
                / (-2.0 * i);
            gamma_fn(2.0) / tau.powi(2) * Complex64::from_polar(1.0, 2.0 * phi) * bracket
        }
        (Monomial::One, PerpChoice::Minus) => {
            let bracket = (Complex64::from_polar(1.0, 2.0 * theta_max)
                - Complex64::from_polar(1.0, 2.0 * theta_m))
                / (2.0 * i);
            gamma_fn(2.0) / tau.powi(2) * Complex64::from_polar(1.0, -2.0 * phi) * bracket
        }
        (m, perp) => {
            let anti = |theta: f64| -> Complex64 {
                let (s, c) = theta.sin_cos();
                match (m, perp) {
                    // antiderivatives of cos/sin theta e^{-+3 i theta}, each 1/8 of
                    // the bracketed closed forms
                    (Monomial::X1, PerpChoice::Plus) => {
                        (Complex64::new(-s, 3.0 * c)) * Complex64::from_polar(1.0, -3.0 * theta)
                    }
                    (Monomial::X2, PerpChoice::Plus) => {
                        (Complex64::new(c, 3.0 * s)) * Complex64::from_polar(1.0, -3.0 * theta)
                    }
                    (Monomial::X1, PerpChoice::Minus) => {
                        -(Complex64::new(s, 3.0 * c)) * Complex64::from_polar(1.0, 3.0 * theta)
                    }
                    (Monomial::X2, PerpChoice::Minus) => {
                        (Complex64::new(c, -3.0 * s)) * Complex64::from_polar(1.0, 3.0 * theta)
                    }
                    (Monomial::One, _) => unreachable!(),
                }
            };
            let sign = match perp {
                PerpChoice::Plus => 3.0,
                PerpChoice::Minus => -3.0,
            };
            gamma_fn(3.0) / tau.powi(3)
                * Complex64::from_polar(1.0, sign * phi)
                * (anti(theta_max) - anti(theta_m))
                * 0.125
        }
    };
    Ok(CornerIntegral { exact, leading })
}

/// Result of fitting `|value| ~ C tau^{-p}` on a log-log grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    /// Fitted decay exponent `p` (positive for decaying sweeps).
    pub slope: f64,
    /// Fitted `log C`.
    pub intercept: f64,
    /// Coefficient of determination of the log-log fit.
    pub r_squared: f64,
    pub tau_grid: Vec<f64>,
}

/// Default geometric sweep grid: ratio 2 from 16 to 4096.
pub fn default_tau_grid() -> Vec<f64> {
    let mut grid = Vec::new();
    let mut tau = 16.0;
    while tau <= 4096.0 {
        grid.push(tau);
        tau *= 2.0;
    }
    grid
}

/// Least-squares fit of `log |value|` against `log tau`.
pub fn fit_decay(tau_grid: &[f64], values: &[Complex64]) -> Result<AsymptoticFit, CgoError> {
    if tau_grid.len() < 5 || tau_grid.len() != values.len() {
        return Err(CgoError::GridTooShort {
            needed: 5,
            got: tau_grid.len().min(values.len()),
        });
    }
    debug_assert!(tau_grid.windows(2).all(|w| w[1] > w[0]));
    for (i, v) in values.iter().enumerate() {
        if v.norm() == 0.0 {
            return Err(CgoError::ZeroValue(i));
        }
    }
    let xs: Vec<f64> = tau_grid.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.norm().ln()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let b = sxy / sxx;
    let a = mean_y - b * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (a + b * x)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).max(0.0)
    };
    Ok(AsymptoticFit {
        slope: -b,
        intercept: a,
        r_squared,
        tau_grid: tau_grid.to_vec(),
    })
}

// ---------------------------------------------------------------------------
// adaptive Gauss-Kronrod quadrature (G7, K15)

const K15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_67,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    for (i, (&x, &w)) in K15_NODES.iter().zip(K15_WEIGHTS.iter()).enumerate() {
        let (fu, fl) = if x == 0.0 {
            let v = f(mid);
            (v, Complex64::new(0.0, 0.0))
        } else {
            (f(mid + half * x), f(mid - half * x))
        };
        k += w * (fu + fl);
        // odd Kronrod indices (and the center) are the embedded Gauss nodes
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * (fu + fl);
        }
    }
    // the center node belongs to both rules
    (k * half, ((k - g) * half).norm())
}

/// Adaptive bisection on the Kronrod error estimate.
pub fn adaptive_gauss_kronrod(
    f: &impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Complex64 {
    fn recurse(
        f: &impl Fn(f64) -> Complex64,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let (val, err) = gk15(f, a, b);
        if err <= tol || depth >= 24 {
            return val;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, tol / 2.0, depth + 1) + recurse(f, mid, b, tol / 2.0, depth + 1)
    }
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let (rough, _) = gk15(f, a, b);
    let tol = abs_tol.max(rel_tol * rough.norm());
    recurse(f, a, b, tol, 0)
}
