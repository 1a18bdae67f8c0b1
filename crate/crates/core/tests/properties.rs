//! Property tests for the module invariants.

use corner_scatter::cgo::{segment_moment, CgoParams, PerpChoice};
use corner_scatter::disk::{self, DiskScatterer};
use corner_scatter::experiments::{farfield_difference, SolverSettings};
use corner_scatter::geometry::{classify_angle, corner_at_vertex, AngleClass, ConvexPolygon, Vec2};
use corner_scatter::scatterer::Incident;
use corner_scatter::specfun::{fb_eval, fb_fit, FourierBesselField};
use corner_scatter::ucp;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 16-point Gauss-Legendre rule on [-1, 1], used as the independent
/// quadrature oracle.
const GL16: [(f64, f64); 8] = [
    (0.0950125098376374, 0.1894506104550685),
    (0.2816035507792589, 0.1826034150449236),
    (0.4580167776572274, 0.1691565193950025),
    (0.6178762444026438, 0.1495959888165767),
    (0.7554044083550030, 0.1246289712555339),
    (0.8656312023878318, 0.0951585116824928),
    (0.9445750230732326, 0.0622535239386479),
    (0.9894009349916499, 0.0271524594117541),
];

/// 64 dyadically graded panels: `r^s` has a non-smooth endpoint for
/// fractional `s`, so the panels shrink geometrically toward zero. The
/// leftover stub below the last panel is beyond f64 resolution.
fn quad_oracle(s: f64, mu: Complex64, zeta: f64, panels: usize) -> Complex64 {
    let mut total = c(0.0, 0.0);
    let mut b = zeta;
    for _ in 0..panels {
        let a = 0.5 * b;
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for &(x, w) in &GL16 {
            for r in [mid - half * x, mid + half * x] {
                total += w * half * r.powf(s) * (-mu * r).exp();
            }
        }
        b = a;
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 125, ..ProptestConfig::default() })]

    /// Exact segment moments agree with 64-panel Gauss-Legendre quadrature.
    #[test]
    fn segment_moment_matches_quadrature(
        s in 0.0f64..3.0,
        re_mu in 1.0f64..100.0,
        im_frac in -1.0f64..1.0,
        zeta in 0.1f64..2.0,
    ) {
        let mu = c(re_mu, re_mu * im_frac);
        let m = segment_moment(s, mu, zeta).unwrap();
        let oracle = quad_oracle(s, mu, zeta, 64);
        let denom = oracle.norm().max(1e-300);
        prop_assert!(
            (m.exact - oracle).norm() / denom < 1e-11,
            "closed form {} vs quadrature {} (rel {})",
            m.exact, oracle, (m.exact - oracle).norm() / denom
        );
    }

    /// rho . rho vanishes identically for every probe.
    #[test]
    fn rho_dot_rho_vanishes(phi in -PI..PI, tau in 1.0f64..1e5, minus in any::<bool>()) {
        let perp = if minus { PerpChoice::Minus } else { PerpChoice::Plus };
        let p = CgoParams::new(phi, perp, tau);
        prop_assert!(p.rho_dot_rho().norm() < 1e-14 * tau * tau);
    }

    /// The step-system verdict never depends on where the sector sits.
    #[test]
    fn step_determinant_is_position_free(
        beta in 0.05f64..3.09,
        shift in -3.0f64..0.0,
        ell in 0u32..12,
    ) {
        prop_assume!(shift + beta < PI);
        let sector = corner_scatter::geometry::Sector::new(shift, shift + beta, 1.0).unwrap();
        let m = ucp::step_matrix(&sector, ell);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        prop_assert!((det.re - ucp::det_step(beta, ell)).abs() < 1e-11);
        prop_assert!(det.im.abs() < 1e-11);
    }

    /// The two gradient determinants cancel identically.
    #[test]
    fn gradient_determinants_cancel(beta in 0.01f64..3.13, theta_m in -3.0f64..0.0) {
        let (m1, m2) = ucp::gradient_matrices(theta_m, theta_m + beta);
        let d1 = m1[0][0] * m1[1][1] - m1[0][1] * m1[1][0];
        let d2 = m2[0][0] * m2[1][1] - m2[0][1] * m2[1][0];
        prop_assert!((d1 + d2).abs() < 1e-12);
    }

    /// Fit-then-eval round trip on coefficient space.
    #[test]
    fn fb_fit_round_trips(seed in any::<u64>(), n_trunc in 1usize..20) {
        let kappa = 30.0;
        let r_c = 1.0;
        let mut state = seed | 1;
        let mut rand = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let coeffs: Vec<(Complex64, Complex64)> = (0..=n_trunc)
            .map(|n| {
                (
                    c(rand(), rand()),
                    if n == 0 { c(0.0, 0.0) } else { c(rand(), rand()) },
                )
            })
            .collect();
        let field = FourierBesselField::new(kappa, coeffs.clone());
        let m = 8 * n_trunc.max(8);
        let samples: Vec<Complex64> = (0..m)
            .map(|i| fb_eval(&field, r_c, 2.0 * PI * i as f64 / m as f64))
            .collect();
        let fitted = fb_fit(&samples, kappa, r_c, n_trunc).unwrap();
        for n in 0..=n_trunc {
            prop_assert!((coeffs[n].0 - fitted.coeffs[n].0).norm() < 1e-10);
            prop_assert!((coeffs[n].1 - fitted.coeffs[n].1).norm() < 1e-10);
        }
    }

    /// Local corner frames map their boundary rays onto the incident edges.
    #[test]
    fn corner_frames_land_on_edges(
        seed in any::<u64>(),
        n_vertices in 3usize..8,
        vertex_index in 0usize..8,
    ) {
        // random convex polygon: sorted angles on a randomized circle
        let mut state = seed | 1;
        let mut rand = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut angles: Vec<f64> = (0..n_vertices).map(|_| rand() * 2.0 * PI).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        prop_assume!(angles.len() >= 3);
        let radius = 0.5 + rand();
        let vertices: Vec<Vec2> = angles
            .iter()
            .map(|&th| Vec2::from_polar(radius, th))
            .collect();
        let poly = ConvexPolygon::new(vertices).unwrap();
        let vi = vertex_index % poly.len();
        let r0 = 1e-3 * radius;
        let (sector, motion) = corner_at_vertex(&poly, vi, r0).unwrap();
        for &theta in &[sector.theta_m, sector.theta_max] {
            for &t in &[0.25, 0.6, 1.0] {
                let local = Vec2::from_polar(t * r0, theta);
                let global = motion.apply(local);
                prop_assert!(
                    poly.boundary_distance(global) < 1e-12,
                    "ray point off boundary"
                );
            }
        }
    }

    /// Far-field differences form a metric up to solver tolerance.
    #[test]
    fn farfield_difference_is_metric_like(q2 in 1.5f64..3.0, eta3 in 0.0f64..1.0) {
        let settings = SolverSettings::default();
        let inc = Incident::plane(0.0);
        let k = 2.0;
        let s1 = corner_scatter::scatterer::Scatterer::Disk(
            DiskScatterer::homogeneous(1.0, c(2.0, 0.0), c(0.5, 0.0)),
        );
        let s2 = corner_scatter::scatterer::Scatterer::Disk(
            DiskScatterer::homogeneous(1.0, c(q2, 0.0), c(0.0, 0.0)),
        );
        let s3 = corner_scatter::scatterer::Scatterer::Disk(
            DiskScatterer::homogeneous(0.8, c(1.5, 0.0), c(eta3, 0.0)),
        );
        let d12 = farfield_difference(&s1, &s2, k, &inc, &settings).unwrap();
        let d21 = farfield_difference(&s2, &s1, k, &inc, &settings).unwrap();
        prop_assert!((d12 - d21).abs() < 1e-12);
        let d13 = farfield_difference(&s1, &s3, k, &inc, &settings).unwrap();
        let d32 = farfield_difference(&s3, &s2, k, &inc, &settings).unwrap();
        prop_assert!(d12 <= d13 + d32 + 1e-10, "triangle inequality: {d12} > {d13} + {d32}");
    }
}

/// All reduced fractions with denominator <= 50 classify exactly
/// (exhaustive, not randomized).
#[test]
fn classify_angle_exhaustive_rationals() {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    for q in 1..=50i64 {
        for p in 1..2 * q {
            if gcd(p, q) != 1 {
                continue;
            }
            let omega = p as f64 * PI / q as f64;
            if omega <= 0.0 || omega >= 2.0 * PI {
                continue;
            }
            assert_eq!(
                classify_angle(omega, 50, 1e-12).unwrap(),
                AngleClass::Rational { p, q },
                "misclassified {p} pi / {q}"
            );
        }
    }
}

/// Canonical irrational openings keep every step system well away from
/// singular through ell = 50.
#[test]
fn irrational_openings_stay_nonsingular() {
    let betas = [
        PI / 2.0f64.sqrt(),
        PI * (5.0f64.sqrt() - 1.0) / 2.0,
        PI / 3.0f64.sqrt(),
        PI / std::f64::consts::E,
        2.0f64.sqrt(),
        1.0,
    ];
    for beta in betas {
        let class = classify_angle(beta, 10_000, 1e-12).unwrap();
        assert!(
            matches!(class, AngleClass::IrrationalWithin { .. }),
            "beta = {beta} unexpectedly rational"
        );
        for ell in 0..=50u32 {
            let det = ucp::det_step(beta, ell);
            assert!(
                det.abs() > 1e-6,
                "det_step({beta}, {ell}) = {det} too close to zero"
            );
        }
    }
}

/// Modal truncation stability of the oracle far field.
#[test]
fn mie_truncation_stable() {
    let s = DiskScatterer::homogeneous(1.0, c(2.0, 0.0), c(0.5, 0.0));
    let k = 2.0;
    let base = (k * 1.0f64).ceil() as usize + 15;
    let inc = Incident::plane(0.4);
    let angles = corner_scatter::scatterer::FarFieldPattern::uniform_angles(128);
    let f1 = disk::far_field(&disk::mie_solve(&s, k, &inc, Some(base)).unwrap(), &angles);
    let f2 = disk::far_field(&disk::mie_solve(&s, k, &inc, Some(base + 10)).unwrap(), &angles);
    assert!(f1.l2_diff(&f2) < 1e-10);
}
