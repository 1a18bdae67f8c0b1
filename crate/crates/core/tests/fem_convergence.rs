//! Convergence studies for the finite-element solver: manufactured
//! single-mode solutions and interface flux recovery.

use corner_scatter::disk::{self, DiskScatterer};
use corner_scatter::fem::{self, mesh_scatterer};
use corner_scatter::geometry::Vec2;
use corner_scatter::scatterer::{FarFieldPattern, Incident, Scatterer};
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Herglotz kernel whose wave is exactly `J_n(k r) e^{i n theta}`.
fn bessel_mode_kernel(n: usize, samples: usize) -> Vec<Complex64> {
    let i_pow_n = Complex64::i().powu(n as u32);
    (0..samples)
        .map(|j| {
            let xi = 2.0 * PI * j as f64 / samples as f64;
            Complex64::from_polar(1.0, n as f64 * xi) / (2.0 * PI * i_pow_n)
        })
        .collect()
}

/// Single-mode incidence on a homogeneous disk has an exact modal solution;
/// the scattered-field L2 error over a probe circle must drop at second
/// order under uniform refinement.
#[test]
fn manufactured_mode_converges_at_second_order() {
    let k = 2.0;
    let sdisk = DiskScatterer::homogeneous(1.0, c(2.0, 0.0), c(0.0, 0.0));
    let s = Scatterer::Disk(sdisk.clone());
    let incident = Incident::Herglotz {
        kernel: bessel_mode_kernel(1, 64),
    };
    let exact = disk::mie_solve(&sdisk, k, &incident, None).unwrap();

    let mut errors = Vec::new();
    for level in 0..3 {
        let h = 2.0 * PI / k / 15.0 / 2.0f64.powi(level);
        let mesh = mesh_scatterer(&s, 2.0, h).unwrap();
        let sol = fem::solve(mesh, &s, k, &incident).unwrap();
        // L2 error of the scattered trace on a probe circle
        let m = 256;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..m {
            let th = 2.0 * PI * j as f64 / m as f64;
            let p = Vec2::from_polar(1.5, th);
            let got = sol.scattered_at(p).unwrap();
            let want = exact.scattered_eval(p);
            num += (got - want).norm_sqr();
            den += want.norm_sqr();
        }
        errors.push((num / den).sqrt());
    }
    println!("manufactured-mode errors: {errors:?}");
    let order1 = (errors[0] / errors[1]).log2();
    let order2 = (errors[1] / errors[2]).log2();
    assert!(
        order1 > 1.5 && order2 > 1.5,
        "observed orders {order1:.2}, {order2:.2} below 2"
    );
}

/// The post-processed flux jump across the conductive interface approaches
/// `eta u` in relative `L^2` under refinement.
///
/// Raw piecewise-constant gradients carry O(h) noise, so the normal
/// derivative on each side is linearly extrapolated toward the interface
/// from two sampling rings.
#[test]
fn interface_flux_jump_recovers_eta_u() {
    let k = 2.0;
    let eta = c(2.0, 0.0);
    let sdisk = DiskScatterer::homogeneous(1.0, c(2.0, 0.0), eta);
    let s = Scatterer::Disk(sdisk);
    let incident = Incident::plane(0.0);
    let mut errors = Vec::new();
    for level in 0..3 {
        let h = 2.0 * PI / k / 20.0 / 2.0f64.powi(level);
        let mesh = mesh_scatterer(&s, 2.0, h).unwrap();
        let sol = fem::solve(mesh, &s, k, &incident).unwrap();
        let delta = 0.8 * h;
        let radial_d = |r: f64, th: f64| -> Complex64 {
            let g = sol.grad_total_at(Vec2::from_polar(r, th)).unwrap();
            let n = Vec2::from_polar(1.0, th);
            g[0] * n.x + g[1] * n.y
        };
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..128 {
            let th = 2.0 * PI * (j as f64 + 0.5) / 128.0;
            let du_in = 2.0 * radial_d(1.0 - delta, th) - radial_d(1.0 - 2.0 * delta, th);
            let du_out = 2.0 * radial_d(1.0 + delta, th) - radial_d(1.0 + 2.0 * delta, th);
            let u_plus = sol.total_at(Vec2::from_polar(1.0 + delta, th)).unwrap();
            num += (du_in - du_out - eta * u_plus).norm_sqr();
            den += (eta * u_plus).norm_sqr();
        }
        errors.push((num / den).sqrt());
    }
    println!("flux-jump errors: {errors:?}");
    assert!(
        errors[1] < errors[0] && errors[2] < errors[1],
        "no decay: {errors:?}"
    );
    assert!(errors[2] < 0.5, "flux jump error too large: {errors:?}");
}

/// Far-field error against the oracle decreases monotonically under
/// refinement for a layered conductive disk.
#[test]
fn layered_disk_oracle_equivalence() {
    let k = 2.0;
    let sdisk = DiskScatterer {
        radii: vec![1.0, 0.5],
        q_values: vec![c(2.0, 0.0), c(3.0, 0.0)],
        etas: vec![c(0.5, 0.0), c(0.25, 0.0)],
    };
    let s = Scatterer::Disk(sdisk.clone());
    let inc = Incident::plane(0.0);
    let angles = FarFieldPattern::uniform_angles(128);
    let mie_ff = disk::far_field(&disk::mie_solve(&sdisk, k, &inc, None).unwrap(), &angles);
    let mut errors = Vec::new();
    for level in 0..2 {
        let h = 2.0 * PI / k / 20.0 / 2.0f64.powi(level);
        let mesh = mesh_scatterer(&s, 2.0, h).unwrap();
        let sol = fem::solve(mesh, &s, k, &inc).unwrap();
        let ff = fem::near_to_far(&sol, 1.5, &angles).unwrap();
        errors.push(ff.l2_diff(&mie_ff) / mie_ff.l2_norm());
    }
    println!("layered-disk errors: {errors:?}");
    assert!(errors[0] < 2e-2);
    assert!(errors[1] < errors[0]);
}
