//! `cscat`: forward solves, far fields, determinant scans, CGO step
//! verification, invisibility scans, far-field differences, and vertex
//! admissibility checks, all emitting CSV/JSON plus a manifest.
//!
//! Exit codes: 0 ok, 1 configuration error, 2 solver failure, 3 assertion
//! failure. Failures print one machine-readable JSON line on stderr.

use clap::{Args, Parser, Subcommand};
use corner_scatter::cgo::default_tau_grid;
use corner_scatter::config::{parse_scatterer_toml, preset_names, preset_toml, LoadedScatterer};
use corner_scatter::experiments::{
    admissibility_check, compute_far_field, farfield_difference, invisibility_scan, FemField,
    MieField, SolveMethod, SolverSettings, THETA_ADM, THETA_INV,
};
use corner_scatter::geometry::Sector;
use corner_scatter::report::{
    det_scan_csv, farfield_csv, scan_csv, write_output, Manifest,
};
use corner_scatter::scatterer::{Incident, Scatterer};
use corner_scatter::specfun::FourierBesselField;
use corner_scatter::{fem, ucp};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cscat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScattererArg {
    /// Scatterer description: a TOML file path or `preset:NAME`.
    #[arg(long)]
    scatterer: String,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Wavenumber; falls back to the scatterer file's `wavenumber`.
    #[arg(long)]
    k: Option<f64>,
    /// Mesh size (default: lambda / 20).
    #[arg(long)]
    h: Option<f64>,
    /// Truncation radius (default: max(2 R, R + 0.75 lambda)).
    #[arg(long)]
    rt: Option<f64>,
    /// Incident plane-wave direction angle in radians.
    #[arg(long, default_value_t = 0.0)]
    incident_angle: f64,
    /// Far-field sample count.
    #[arg(long, default_value_t = 256)]
    angles: usize,
    /// Solver: auto, fem, or mie.
    #[arg(long, default_value = "auto")]
    method: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scattering problem and report solution norms.
    Solve {
        #[command(flatten)]
        scatterer: ScattererArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute and emit a far-field pattern.
    Farfield {
        #[command(flatten)]
        scatterer: ScattererArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the corner step systems on a tau sweep.
    UcpVerify {
        /// Sector opening angle in radians.
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_re: f64,
        #[arg(long, default_value_t = 0.0)]
        eta_im: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma1: f64,
        #[arg(long, default_value_t = 10)]
        l_max: u32,
        /// Inject a unit coefficient at this order into the trial field.
        #[arg(long)]
        inject_order: Option<u32>,
        /// Exit 3 if any step system is singular.
        #[arg(long, default_value_t = false)]
        expect_nonsingular: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the determinant closed forms over an opening-angle grid.
    DetScan {
        #[arg(long, default_value_t = 0.01)]
        beta_min: f64,
        #[arg(long, default_value_t = 3.13)]
        beta_max: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        l_max: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Far-field norms over a wavenumber grid.
    InvisScan {
        #[command(flatten)]
        scatterer: ScattererArg,
        /// Comma-separated wavenumbers.
        #[arg(long, value_delimiter = ',')]
        k_grid: Vec<f64>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Exit 3 if the minimum norm falls below theta_inv.
        #[arg(long, default_value_t = false)]
        assert_visible: bool,
        #[arg(long, default_value_t = THETA_INV)]
        theta_inv: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// L2 far-field difference of two scatterers.
    Diff {
        #[command(flatten)]
        scatterer: ScattererArg,
        /// Second scatterer (TOML file or preset:NAME).
        #[arg(long)]
        scatterer2: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Exit 3 if the difference falls below this threshold.
        #[arg(long)]
        assert_above: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Vertex admissibility verdicts for a scatterer.
    Admissibility {
        #[command(flatten)]
        scatterer: ScattererArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = THETA_ADM)]
        theta_adm: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a bundled scatterer preset as TOML.
    Preset {
        /// One of the bundled names; omit to list them.
        name: Option<String>,
    },
}

enum CliError {
    Config(String),
    Solver(String),
    Assertion(String),
}

impl CliError {
    fn class(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Solver(_) => "solver",
            CliError::Assertion(_) => "assertion",
        }
    }
    fn reason(&self) -> &str {
        match self {
            CliError::Config(r) | CliError::Solver(r) | CliError::Assertion(r) => r,
        }
    }
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Assertion(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({
                "error_class": e.class(),
                "reason": e.reason(),
            });
            eprintln!("{line}");
            ExitCode::from(e.code())
        }
    }
}

/// `CSCAT_THREADS` picks the linear-algebra thread count; the default (1)
/// keeps output byte-identical across runs.
fn configure_threads() {
    let n = std::env::var("CSCAT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(1);
    if n <= 1 {
        faer::set_global_parallelism(faer::Par::Seq);
    } else {
        faer::set_global_parallelism(faer::Par::rayon(n));
    }
}

fn load_scatterer(spec: &str) -> Result<LoadedScatterer, CliError> {
    if let Some(name) = spec.strip_prefix("preset:") {
        return corner_scatter::config::preset(name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown preset {name:?}; available: {}",
                preset_names().join(", ")
            ))
        });
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| CliError::Config(format!("cannot read {spec}: {e}")))?;
    parse_scatterer_toml(&text).map_err(|e| CliError::Config(e.to_string()))
}

fn settings_of(args: &SolverArgs) -> Result<SolverSettings, CliError> {
    let method = match args.method.as_str() {
        "auto" => SolveMethod::Auto,
        "fem" => SolveMethod::Fem,
        "mie" => SolveMethod::Mie,
        other => {
            return Err(CliError::Config(format!(
                "unknown method {other:?} (expected auto, fem, or mie)"
            )))
        }
    };
    Ok(SolverSettings {
        h: args.h,
        rt: args.rt,
        far_angles: args.angles,
        method,
    })
}

fn pick_k(args: &SolverArgs, loaded: &LoadedScatterer) -> Result<f64, CliError> {
    args.k
        .or(loaded.wavenumber)
        .filter(|&k| k > 0.0)
        .ok_or_else(|| CliError::Config("no positive wavenumber given (use --k)".into()))
}

fn solver_json(args: &SolverArgs, k: f64) -> serde_json::Value {
    serde_json::json!({
        "k": k,
        "h": args.h,
        "rt": args.rt,
        "incident_angle": args.incident_angle,
        "angles": args.angles,
        "method": args.method,
    })
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Preset { name } => {
            match name {
                None => println!("{}", preset_names().join("\n")),
                Some(n) => match preset_toml(&n) {
                    Some(text) => print!("{text}"),
                    None => {
                        return Err(CliError::Config(format!(
                            "unknown preset {n:?}; available: {}",
                            preset_names().join(", ")
                        )))
                    }
                },
            }
            Ok(())
        }
        Command::Solve {
            scatterer,
            solver,
            out,
        } => {
            let loaded = load_scatterer(&scatterer.scatterer)?;
            let k = pick_k(&solver, &loaded)?;
            let settings = settings_of(&solver)?;
            let incident = Incident::plane(solver.incident_angle);
            let s = &loaded.scatterer;
            let (summary, mesh_text) = if s.is_trivial() {
                (
                    serde_json::json!({
                        "k": k, "scattered_l2": 0.0, "incident_l2": serde_json::Value::Null,
                        "relative": 0.0, "dtn_tail": 0.0, "trivial_medium": true,
                    }),
                    None,
                )
            } else {
                let h = settings.mesh_size(k);
                let rt = settings.truncation_radius(s.circumradius(), k);
                let mesh = fem::mesh_scatterer(s, rt, h)
                    .map_err(|e| CliError::Solver(e.to_string()))?;
                let sol = fem::solve(mesh, s, k, &incident)
                    .map_err(|e| CliError::Solver(e.to_string()))?;
                let scattered = sol.scattered_l2();
                let incident_norm = sol.incident_l2();
                (
                    serde_json::json!({
                        "k": k,
                        "scattered_l2": scattered,
                        "incident_l2": incident_norm,
                        "relative": scattered / incident_norm,
                        "dtn_tail": sol.dtn_tail,
                        "nodes": sol.mesh.node_count(),
                        "triangles": sol.mesh.triangle_count(),
                        "trivial_medium": false,
                    }),
                    Some(sol.mesh.export_text()),
                )
            };
            let mut outputs = vec!["solution.json".to_string()];
            write_file(&out, "solution.json", &format!("{:#}\n", summary))?;
            if let Some(text) = mesh_text {
                write_file(&out, "mesh.txt", &text)?;
                outputs.push("mesh.txt".into());
            }
            finish(
                &out,
                "solve",
                serde_json::json!({
                    "scatterer": scatterer.scatterer,
                    "solver": solver_json(&solver, k),
                }),
                outputs,
            )
        }
        Command::Farfield {
            scatterer,
            solver,
            out,
        } => {
            let loaded = load_scatterer(&scatterer.scatterer)?;
            let k = pick_k(&solver, &loaded)?;
            let settings = settings_of(&solver)?;
            let incident = Incident::plane(solver.incident_angle);
            let ff = compute_far_field(&loaded.scatterer, k, &incident, &settings)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            write_file(&out, "farfield.csv", &farfield_csv(&ff))?;
            write_file(
                &out,
                "farfield.json",
                &format!(
                    "{:#}\n",
                    serde_json::json!({"k": k, "l2_norm": ff.l2_norm(), "samples": ff.values.len()})
                ),
            )?;
            finish(
                &out,
                "farfield",
                serde_json::json!({
                    "scatterer": scatterer.scatterer,
                    "solver": solver_json(&solver, k),
                }),
                vec!["farfield.csv".into(), "farfield.json".into()],
            )
        }
        Command::UcpVerify {
            beta,
            eta_re,
            eta_im,
            gamma1,
            l_max,
            inject_order,
            expect_nonsingular,
            out,
        } => {
            if !(beta > 0.0 && beta < std::f64::consts::PI) {
                return Err(CliError::Config(format!(
                    "beta must lie in (0, pi), got {beta}"
                )));
            }
            let sector = Sector::symmetric(beta, 1.0)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let eta = Complex64::new(eta_re, eta_im);
            let kappa = gamma1.sqrt();
            let order = inject_order.unwrap_or(0) as usize;
            let mut coeffs =
                vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); order.max(3) + 1];
            if let Some(n) = inject_order {
                coeffs[n as usize].0 = Complex64::new(1.0, 0.0);
            }
            let field = FourierBesselField::new(kappa, coeffs);
            let grid = default_tau_grid();
            let report = ucp::ucp_verify(&sector, eta, gamma1, &field, &grid, l_max)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            write_file(&out, "ucp_report.json", &format!("{json}\n"))?;
            let mut outputs = vec!["ucp_report.json".to_string()];
            for step in &report.steps {
                if step.singular {
                    continue;
                }
                let sweep =
                    ucp::boundary_sweep(&sector, eta, gamma1, &field, step.ell, &grid)
                        .map_err(|e| CliError::Solver(e.to_string()))?;
                let (taus, exacts, leadings): (Vec<f64>, Vec<f64>, Vec<f64>) = (
                    sweep.iter().map(|r| r.0).collect(),
                    sweep.iter().map(|r| r.1).collect(),
                    sweep.iter().map(|r| r.2).collect(),
                );
                let name = format!("sweep_step_{}.csv", step.ell);
                write_file(
                    &out,
                    &name,
                    &corner_scatter::report::sweep_csv(&taus, &exacts, &leadings),
                )?;
                outputs.push(name);
            }
            finish(
                &out,
                "ucp-verify",
                serde_json::json!({
                    "beta": beta, "eta": [eta_re, eta_im], "gamma1": gamma1,
                    "l_max": l_max, "inject_order": inject_order,
                }),
                outputs,
            )?;
            if expect_nonsingular && !report.all_nonsingular() {
                let first = report.first_singular().unwrap();
                return Err(CliError::Assertion(format!(
                    "step {} singular (witness {:?})",
                    first.ell, first.rational_witness
                )));
            }
            Ok(())
        }
        Command::DetScan {
            beta_min,
            beta_max,
            samples,
            l_max,
            out,
        } => {
            if !(beta_min > 0.0 && beta_max < std::f64::consts::PI && beta_min < beta_max) {
                return Err(CliError::Config(
                    "need 0 < beta_min < beta_max < pi".into(),
                ));
            }
            if samples < 2 {
                return Err(CliError::Config("need at least 2 samples".into()));
            }
            let betas: Vec<f64> = (0..samples)
                .map(|i| beta_min + (beta_max - beta_min) * i as f64 / (samples - 1) as f64)
                .collect();
            write_file(&out, "det_scan.csv", &det_scan_csv(&betas, l_max))?;
            // enumerated zero set per step for cross-checking the scan
            let zeros: Vec<serde_json::Value> = (0..=l_max)
                .map(|ell| {
                    serde_json::json!({
                        "ell": ell,
                        "zeros_pi_fractions": ucp::step_zero_set(ell),
                    })
                })
                .collect();
            write_file(
                &out,
                "zero_set.json",
                &format!("{:#}\n", serde_json::json!({ "steps": zeros })),
            )?;
            finish(
                &out,
                "det-scan",
                serde_json::json!({
                    "beta_min": beta_min, "beta_max": beta_max,
                    "samples": samples, "l_max": l_max,
                }),
                vec!["det_scan.csv".into(), "zero_set.json".into()],
            )
        }
        Command::InvisScan {
            scatterer,
            k_grid,
            solver,
            assert_visible,
            theta_inv,
            out,
        } => {
            if k_grid.is_empty() || k_grid.iter().any(|&k| k <= 0.0) {
                return Err(CliError::Config("k grid must be positive".into()));
            }
            let loaded = load_scatterer(&scatterer.scatterer)?;
            let settings = settings_of(&solver)?;
            let incident = Incident::plane(solver.incident_angle);
            let report =
                invisibility_scan(&loaded.scatterer, &k_grid, &incident, &settings, theta_inv);
            write_file(&out, "scan.csv", &scan_csv(&report))?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            write_file(&out, "scan.json", &format!("{json}\n"))?;
            finish(
                &out,
                "invis-scan",
                serde_json::json!({
                    "scatterer": scatterer.scatterer,
                    "k_grid": k_grid,
                    "theta_inv": theta_inv,
                    "solver": solver_json(&solver, f64::NAN),
                }),
                vec!["scan.csv".into(), "scan.json".into()],
            )?;
            if let Some(row) = report.rows.iter().find(|r| r.error.is_some()) {
                return Err(CliError::Solver(format!(
                    "solve failed at k = {}: {}",
                    row.k,
                    row.error.as_deref().unwrap_or("")
                )));
            }
            if assert_visible && report.any_flagged() {
                return Err(CliError::Assertion(format!(
                    "minimum far-field norm {} fell below theta_inv = {}",
                    report.min_norm(),
                    theta_inv
                )));
            }
            Ok(())
        }
        Command::Diff {
            scatterer,
            scatterer2,
            solver,
            assert_above,
            out,
        } => {
            let s1 = load_scatterer(&scatterer.scatterer)?;
            let s2 = load_scatterer(&scatterer2)?;
            let k = pick_k(&solver, &s1)?;
            let settings = settings_of(&solver)?;
            let incident = Incident::plane(solver.incident_angle);
            let d = farfield_difference(&s1.scatterer, &s2.scatterer, k, &incident, &settings)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            write_file(
                &out,
                "diff.json",
                &format!("{:#}\n", serde_json::json!({"k": k, "l2_difference": d})),
            )?;
            finish(
                &out,
                "diff",
                serde_json::json!({
                    "scatterer": scatterer.scatterer,
                    "scatterer2": scatterer2,
                    "solver": solver_json(&solver, k),
                }),
                vec!["diff.json".into()],
            )?;
            if let Some(threshold) = assert_above {
                if d <= threshold {
                    return Err(CliError::Assertion(format!(
                        "far-field difference {d} not above {threshold}"
                    )));
                }
            }
            Ok(())
        }
        Command::Admissibility {
            scatterer,
            solver,
            theta_adm,
            out,
        } => {
            let loaded = load_scatterer(&scatterer.scatterer)?;
            let k = pick_k(&solver, &loaded)?;
            let settings = settings_of(&solver)?;
            let incident = Incident::plane(solver.incident_angle);
            let s = &loaded.scatterer;
            let vertices = s.corner_vertices();
            if vertices.is_empty() {
                return Err(CliError::Config(
                    "scatterer has no polygon vertices to check".into(),
                ));
            }
            let rho_grid: Vec<f64> = {
                let base = 0.2 * s.circumradius().max(0.2);
                (0..5).map(|j| base / 2.0f64.powi(j)).collect()
            };
            let mut rows = Vec::new();
            match s {
                Scatterer::Disk(d) => {
                    let sol = corner_scatter::disk::mie_solve(d, k, &incident, None)
                        .map_err(|e| CliError::Solver(e.to_string()))?;
                    let field = MieField(&sol);
                    for v in &vertices {
                        let verdict = admissibility_check(&field, *v, &rho_grid, theta_adm)
                            .map_err(|e| CliError::Solver(e.to_string()))?;
                        rows.push(serde_json::json!({
                            "vertex": [v.x, v.y],
                            "verdict": verdict,
                        }));
                    }
                }
                _ => {
                    let h = settings.mesh_size(k);
                    let rt = settings.truncation_radius(s.circumradius(), k);
                    let mesh = fem::mesh_scatterer(s, rt, h)
                        .map_err(|e| CliError::Solver(e.to_string()))?;
                    let sol = fem::solve(mesh, s, k, &incident)
                        .map_err(|e| CliError::Solver(e.to_string()))?;
                    let field = FemField(&sol);
                    for v in &vertices {
                        let verdict = admissibility_check(&field, *v, &rho_grid, theta_adm)
                            .map_err(|e| CliError::Solver(e.to_string()))?;
                        rows.push(serde_json::json!({
                            "vertex": [v.x, v.y],
                            "verdict": verdict,
                        }));
                    }
                }
            }
            write_file(
                &out,
                "admissibility.json",
                &format!(
                    "{:#}\n",
                    serde_json::json!({"k": k, "theta_adm": theta_adm, "vertices": rows})
                ),
            )?;
            finish(
                &out,
                "admissibility",
                serde_json::json!({
                    "scatterer": scatterer.scatterer,
                    "theta_adm": theta_adm,
                    "solver": solver_json(&solver, k),
                }),
                vec!["admissibility.json".into()],
            )
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    write_output(&dir.join(name), contents)
        .map_err(|e| CliError::Config(format!("cannot write {name}: {e}")))
}

fn finish(
    dir: &Path,
    command: &str,
    config: serde_json::Value,
    mut outputs: Vec<String>,
) -> Result<(), CliError> {
    outputs.push("manifest.json".into());
    let manifest = Manifest::new(command, config, outputs);
    write_file(dir, "manifest.json", &manifest.to_json())
}
