use super::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coefficients of a unit plane wave e^{i k x . d} around the origin:
/// a_n = i^n e^{-i n theta_d}, b_n = 0 for n >= 1 (Jacobi-Anger).
pub fn plane_wave_field(k: f64, theta_d: f64, n_trunc: usize) -> FourierBesselField {
    let mut coeffs = Vec::with_capacity(n_trunc + 1);
    for n in 0..=n_trunc {
        let a = Complex64::i().powu(n as u32) * Complex64::from_polar(1.0, -(n as f64) * theta_d);
        // the expansion carries both e^{i n th} and e^{-i n th}; for the
        // plane wave the conjugate branch coefficient is i^n e^{+i n th_d},
        // folded here as b_n for n >= 1
        let b = if n == 0 {
            c(0.0, 0.0)
        } else {
            Complex64::i().powu(n as u32) * Complex64::from_polar(1.0, n as f64 * theta_d)
        };
        coeffs.push((a, b));
    }
    FourierBesselField::new(k, coeffs)
}

#[test]
fn single_term_field() {
    let field = FourierBesselField::single(1.3, 1, c(1.0, 0.0), false);
    for &(r, th) in &[(0.2, 0.1), (0.9, -2.0), (2.5, 3.0)] {
        let want = Complex64::from_polar(1.0, th) * bessel_j(1, c(1.3 * r, 0.0));
        let got = fb_eval(&field, r, th);
        assert!((got - want).norm() < 1e-14);
    }
}

#[test]
fn value_at_origin_is_a0_plus_b0() {
    let field = FourierBesselField::new(
        2.0,
        vec![(c(0.3, -0.2), c(0.1, 0.5)), (c(1.0, 0.0), c(0.0, 2.0))],
    );
    let got = fb_eval(&field, 0.0, 1.234);
    let want = c(0.3, -0.2) + c(0.1, 0.5);
    assert!((got - want).norm() < 1e-15);
}

#[test]
fn plane_wave_expansion_matches_pointwise() {
    let k = 2.0;
    let theta_d = 0.7;
    let field = plane_wave_field(k, theta_d, FourierBesselField::default_n_trunc(k, 1.5));
    let d = (theta_d.cos(), theta_d.sin());
    // deterministic pseudo-random points in the disk r <= 1.5
    let mut state = 0x9e3779b97f4a7c15u64;
    for _ in 0..100 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let r = 1.5 * ((state >> 11) as f64 / (1u64 << 53) as f64);
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let th = 2.0 * PI * ((state >> 11) as f64 / (1u64 << 53) as f64) - PI;
        let x = (r * th.cos(), r * th.sin());
        let want = Complex64::from_polar(1.0, k * (x.0 * d.0 + x.1 * d.1));
        let got = fb_eval(&field, r, th);
        assert!(
            (got - want).norm() < 1e-10,
            "plane wave mismatch at r={r}, th={th}: {got} vs {want}"
        );
    }
}

#[test]
fn fit_recovers_single_mode() {
    let kappa = 2.0;
    let r_c = 1.0;
    let m = 128;
    let j1 = bessel_j(1, c(kappa * r_c, 0.0));
    let samples: Vec<Complex64> = (0..m)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / m as f64;
            Complex64::from_polar(1.0, th) * j1
        })
        .collect();
    // truncation chosen so every Bessel divisor keeps the one-ulp sample
    // noise below the 1e-12 bar
    let field = fb_fit(&samples, kappa, r_c, 5).unwrap();
    assert!((field.coeffs[1].0 - c(1.0, 0.0)).norm() < 1e-12);
    for (n, &(a, b)) in field.coeffs.iter().enumerate() {
        if n != 1 {
            assert!(a.norm() < 1e-12, "spurious a_{n} = {a}");
        }
        assert!(b.norm() < 1e-12, "spurious b_{n} = {b}");
    }
}

#[test]
fn fit_recovers_plane_wave_coefficients() {
    let k = 2.0;
    let theta_d: f64 = -0.35;
    let r_c = 1.0;
    // the default truncation would push |J_n(k r_c)| under the
    // ill-conditioning guard; stay where the divisors are healthy
    let n_trunc = 10;
    let m = 8 * n_trunc.max(8);
    let d = (theta_d.cos(), theta_d.sin());
    let samples: Vec<Complex64> = (0..m)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / m as f64;
            let x = (r_c * th.cos(), r_c * th.sin());
            Complex64::from_polar(1.0, k * (x.0 * d.0 + x.1 * d.1))
        })
        .collect();
    let field = fb_fit(&samples, k, r_c, n_trunc).unwrap();
    // fitted a_n soak up both branches' n = 0 weight; b_0 = 0 by convention
    assert!(field.coeffs[0].1.norm() == 0.0);
    for n in 0..=6usize {
        let want_a =
            Complex64::i().powu(n as u32) * Complex64::from_polar(1.0, -(n as f64) * theta_d);
        let got = field.coeffs[n].0;
        assert!(
            (got - want_a).norm() < 1e-10,
            "a_{n}: got {got}, want {want_a}"
        );
        // the conjugate branch carries i^n e^{+i n theta_d} (signed-order
        // Jacobi-Anger folded onto n >= 0)
        if n > 0 {
            let want_b =
                Complex64::i().powu(n as u32) * Complex64::from_polar(1.0, n as f64 * theta_d);
            let got_b = field.coeffs[n].1;
            assert!(
                (got_b - want_b).norm() < 1e-10,
                "b_{n}: got {got_b}, want {want_b}"
            );
        }
    }
}

#[test]
fn fit_reports_vanishing_origin_value() {
    // v = J_1 combination vanishes at the origin; fitted a_0 + b_0 ~ 0
    let kappa = 1.7;
    let r_c = 0.8;
    let m = 96;
    let samples: Vec<Complex64> = (0..m)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / m as f64;
            let j1 = bessel_j(1, c(kappa * r_c, 0.0));
            let j2 = bessel_j(2, c(kappa * r_c, 0.0));
            Complex64::from_polar(1.0, th) * j1 * c(0.4, 0.1)
                + Complex64::from_polar(1.0, -2.0 * th) * j2 * c(-0.3, 0.8)
        })
        .collect();
    let field = fb_fit(&samples, kappa, r_c, 8).unwrap();
    let origin = field.coeffs[0].0 + field.coeffs[0].1;
    assert!(origin.norm() < 1e-10, "origin value {origin}");
}

#[test]
fn fit_rejects_near_zero_bessel_divisor() {
    // kappa r_c at the first zero of J_0
    let kappa = 2.404_825_557_695_773;
    let r_c = 1.0;
    let samples = vec![c(1.0, 0.0); 64];
    let err = fb_fit(&samples, kappa, r_c, 4).unwrap_err();
    match err {
        SpecFunError::IllConditionedFit { n, .. } => assert_eq!(n, 0),
        other => panic!("expected ill-conditioned fit, got {other}"),
    }
}

#[test]
fn eval_satisfies_helmholtz_fd() {
    // 5-point Laplacian residual < 1e-6 kappa^2 |v| at h = 1e-4
    let kappa = 2.0;
    let field = FourierBesselField::new(
        kappa,
        vec![
            (c(0.5, 0.1), c(0.0, 0.0)),
            (c(1.0, -0.3), c(0.2, 0.4)),
            (c(-0.7, 0.2), c(0.1, 0.0)),
            (c(0.0, 0.9), c(-0.5, 0.3)),
        ],
    );
    let h = 1e-4;
    let eval_xy = |x: f64, y: f64| {
        let r = x.hypot(y);
        let th = y.atan2(x);
        fb_eval(&field, r, th)
    };
    for &(x, y) in &[(0.3, 0.2), (-0.5, 0.8), (0.9, -0.1)] {
        let v = eval_xy(x, y);
        let lap = (eval_xy(x + h, y) + eval_xy(x - h, y) + eval_xy(x, y + h) + eval_xy(x, y - h)
            - 4.0 * v)
            / (h * h);
        let residual = (lap + kappa * kappa * v).norm();
        assert!(
            residual < 1e-6 * kappa * kappa * v.norm().max(0.1),
            "Helmholtz residual {residual:.3e} at ({x}, {y})"
        );
    }
}

#[test]
fn grad_matches_finite_differences() {
    let field = FourierBesselField::new(
        1.5,
        vec![
            (c(0.2, 0.0), c(0.0, 0.0)),
            (c(0.5, -0.1), c(0.3, 0.2)),
            (c(-0.1, 0.4), c(0.0, -0.6)),
        ],
    );
    let h = 1e-6;
    let eval_xy = |x: f64, y: f64| fb_eval(&field, x.hypot(y), y.atan2(x));
    for &(x, y) in &[(0.4f64, 0.1f64), (-0.2, 0.7), (0.0, 0.0)] {
        let g = fb_grad(&field, x.hypot(y), y.atan2(x));
        let gx = (eval_xy(x + h, y) - eval_xy(x - h, y)) / (2.0 * h);
        let gy = (eval_xy(x, y + h) - eval_xy(x, y - h)) / (2.0 * h);
        assert!((g[0] - gx).norm() < 1e-8, "d/dx at ({x},{y}): {} vs {gx}", g[0]);
        assert!((g[1] - gy).norm() < 1e-8, "d/dy at ({x},{y}): {} vs {gy}", g[1]);
    }
}
