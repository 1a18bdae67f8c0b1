//! Special functions and Fourier–Bessel fields.
//!
//! Cylinder Bessel functions `J_n` and `H_n^(1)` (complex argument), the real
//! Gamma function and the lower incomplete Gamma function for complex
//! argument, plus evaluation and fitting of Fourier–Bessel expansions
//!
//! ```text
//! v(r, theta) = sum_n (a_n e^{i n theta} + b_n e^{-i n theta}) J_n(kappa r)
//! ```
//!
//! which represent solutions of (Delta + kappa^2) v = 0 on a disk.

mod bessel;
mod gamma;

pub use bessel::{
    bessel_j, bessel_j_prime, bessel_j_seq, bessel_y_seq, cyl_bessel, hankel1, hankel1_prime,
    hankel1_seq, CylKind,
};
pub use gamma::{gamma_fn, lower_incomplete_gamma};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecFunError {
    #[error("H1 is singular at z = 0")]
    HankelAtOrigin,
    #[error("argument outside supported domain: {0}")]
    Domain(String),
    #[error("series/recurrence overflow for order {order} at |z| = {abs_z}")]
    Overflow { order: u32, abs_z: f64 },
    #[error("ill-conditioned fit: |J_{n}(kappa r_c)| = {divisor:.3e} < 1e-8")]
    IllConditionedFit { n: u32, divisor: f64 },
    #[error("need at least {needed} equispaced samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

/// Truncated Fourier–Bessel expansion of a Helmholtz solution around the
/// origin. `coeffs[n] = (a_n, b_n)`; at the origin only the `n = 0` term
/// survives, so the field value there is `a_0 + b_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBesselField {
    /// Interior wavenumber (square root of the zeroth-order coefficient of
    /// the Helmholtz operator).
    pub kappa: f64,
    /// `(a_n, b_n)` for `n = 0..=n_trunc`.
    pub coeffs: Vec<(Complex64, Complex64)>,
}

impl FourierBesselField {
    pub fn new(kappa: f64, coeffs: Vec<(Complex64, Complex64)>) -> Self {
        Self { kappa, coeffs }
    }

    /// Field with a single nonzero coefficient `a_n` (or `b_n`).
    pub fn single(kappa: f64, n: usize, value: Complex64, conjugate_branch: bool) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut coeffs = vec![(zero, zero); n + 1];
        if conjugate_branch {
            coeffs[n].1 = value;
        } else {
            coeffs[n].0 = value;
        }
        Self { kappa, coeffs }
    }

    pub fn n_trunc(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Default truncation order for a circle of radius `r_c`: transition
    /// order plus a fixed tail margin.
    pub fn default_n_trunc(kappa: f64, r_c: f64) -> usize {
        (kappa * r_c).ceil() as usize + 15
    }
}

/// Evaluate the truncated expansion at polar coordinates `(r, theta)`.
pub fn fb_eval(field: &FourierBesselField, r: f64, theta: f64) -> Complex64 {
    debug_assert!(r >= 0.0);
    let n_max = field.n_trunc();
    let j = bessel_j_seq(n_max, Complex64::new(field.kappa * r, 0.0));
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &(a, b)) in field.coeffs.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, n as f64 * theta);
        acc += (a * phase + b * phase.conj()) * j[n];
    }
    acc
}

/// Gradient of the expansion in Cartesian coordinates.
///
/// Uses d/dr of `J_n` via the recurrence and the angular derivative of the
/// phases; at `r = 0` only the `n = 1` terms contribute.
pub fn fb_grad(field: &FourierBesselField, r: f64, theta: f64) -> [Complex64; 2] {
    let kappa = field.kappa;
    let n_max = field.n_trunc() + 1;
    let z = Complex64::new(kappa * r, 0.0);
    let j = bessel_j_seq(n_max, z);
    let (ct, st) = (theta.cos(), theta.sin());
    if r < 1e-300 {
        // limit: v = (a_1 e^{i th} + b_1 e^{-i th}) (kappa r / 2) + O(r^2)
        if field.coeffs.len() < 2 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        let (a1, b1) = field.coeffs[1];
        let i = Complex64::i();
        let dx = (a1 + b1) * kappa / 2.0;
        let dy = (a1 - b1) * i * kappa / 2.0;
        return [dx, dy];
    }
    let mut dv_dr = Complex64::new(0.0, 0.0);
    let mut dv_dth = Complex64::new(0.0, 0.0);
    for (n, &(a, b)) in field.coeffs.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, n as f64 * theta);
        let ang = a * phase + b * phase.conj();
        let dang = Complex64::i() * n as f64 * (a * phase - b * phase.conj());
        // J_n'(z) = J_{n-1}(z) - (n/z) J_n(z)
        let jp = if n == 0 {
            -j[1]
        } else {
            j[n - 1] - (n as f64 / z.re) * j[n]
        };
        dv_dr += ang * jp * kappa;
        dv_dth += dang * j[n];
    }
    let dx = dv_dr * ct - dv_dth * st / r;
    let dy = dv_dr * st + dv_dth * ct / r;
    [dx, dy]
}

/// Crude bound on the truncation tail at radius `r`, from the super-
/// exponential decay `|J_n(x)| <= (x/2)^n / n!` past the transition order.
pub fn fb_tail_bound(field: &FourierBesselField, r: f64) -> f64 {
    let n = field.n_trunc() + 1;
    let x = field.kappa * r;
    if x <= 0.0 {
        return 0.0;
    }
    let scale = field
        .coeffs
        .iter()
        .map(|(a, b)| a.norm() + b.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    // first omitted Bessel magnitude, geometric tail with ratio x/(2(n+1))
    let mut log_term = (n as f64) * (x / 2.0).ln() - ln_factorial(n);
    if log_term > 300.0 {
        log_term = 300.0;
    }
    let first = log_term.exp();
    let ratio = (x / (2.0 * (n as f64 + 1.0))).min(0.5);
    scale * first / (1.0 - ratio)
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Fit a Fourier–Bessel field from equispaced samples of `v` on the circle
/// of radius `r_c`.
///
/// Discrete Fourier transform of the samples divided by `J_n(kappa r_c)`.
/// The expansion is redundant at `n = 0` (both `a_0` and `b_0` multiply
/// `J_0`), so the fit pins `b_0 = 0`.
pub fn fb_fit(
    samples: &[Complex64],
    kappa: f64,
    r_c: f64,
    n_trunc: usize,
) -> Result<FourierBesselField, SpecFunError> {
    let m = samples.len();
    if m < 4 * n_trunc.max(1) {
        return Err(SpecFunError::TooFewSamples {
            needed: 4 * n_trunc.max(1),
            got: m,
        });
    }
    let j = bessel_j_seq(n_trunc, Complex64::new(kappa * r_c, 0.0));
    for (n, jn) in j.iter().enumerate() {
        if jn.norm() < 1e-8 {
            return Err(SpecFunError::IllConditionedFit {
                n: n as u32,
                divisor: jn.norm(),
            });
        }
    }
    // plain O(M N) DFT; sample counts here are tiny. The phase index is
    // reduced modulo the grid before the trig call to keep the noise floor
    // at machine precision for high orders.
    let mut coeffs = Vec::with_capacity(n_trunc + 1);
    for n in 0..=n_trunc {
        let mut pos = Complex64::new(0.0, 0.0);
        let mut neg = Complex64::new(0.0, 0.0);
        for (idx, &v) in samples.iter().enumerate() {
            let red = (n * idx) % m;
            let th = 2.0 * std::f64::consts::PI * red as f64 / m as f64;
            let w = Complex64::from_polar(1.0, -th);
            pos += v * w;
            neg += v * w.conj();
        }
        pos /= m as f64;
        neg /= m as f64;
        let a_n = pos / j[n];
        let b_n = if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            neg / j[n]
        };
        coeffs.push((a_n, b_n));
    }
    Ok(FourierBesselField { kappa, coeffs })
}

#[cfg(test)]
mod tests;
