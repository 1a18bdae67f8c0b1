//! CSV and JSON result emission.
//!
//! Output is byte-deterministic for a fixed input: floats print through the
//! shortest round-trip formatter, rows follow input order, and the manifest
//! hash is a FNV-1a digest of the canonical config text.

use crate::cgo::AsymptoticFit;
use crate::experiments::ScanReport;
use crate::scatterer::FarFieldPattern;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// FNV-1a 64-bit digest; stable across platforms and releases.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// `theta,re,im` rows of a far-field pattern.
pub fn farfield_csv(ff: &FarFieldPattern) -> String {
    let mut out = String::from("theta,re_u_inf,im_u_inf\n");
    for (theta, value) in ff.angles.iter().zip(&ff.values) {
        out.push_str(&format!("{theta},{},{}\n", value.re, value.im));
    }
    out
}

/// `tau,abs_exact,abs_leading` rows of a decay sweep.
pub fn sweep_csv(tau: &[f64], exact: &[f64], leading: &[f64]) -> String {
    let mut out = String::from("tau,abs_exact,abs_leading\n");
    for i in 0..tau.len() {
        out.push_str(&format!("{},{},{}\n", tau[i], exact[i], leading[i]));
    }
    out
}

/// `k,farfield_norm,flagged,error` rows of an invisibility scan.
pub fn scan_csv(report: &ScanReport) -> String {
    let mut out = String::from("k,farfield_norm,flagged,error\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.k,
            row.farfield_norm,
            row.flagged,
            row.error.as_deref().unwrap_or("")
        ));
    }
    out
}

/// `beta,det_step_l0,...` rows of a determinant scan.
pub fn det_scan_csv(betas: &[f64], l_max: u32) -> String {
    let mut header = String::from("beta");
    for ell in 0..=l_max {
        header.push_str(&format!(",det_step_l{ell}"));
    }
    header.push_str(",det_m1,det_m2,abs_det_param\n");
    let mut out = header;
    for &beta in betas {
        out.push_str(&format!("{beta}"));
        for ell in 0..=l_max {
            out.push_str(&format!(",{}", crate::ucp::det_step(beta, ell)));
        }
        let (m1, m2) = crate::ucp::det_gradient(beta);
        let dp = crate::ucp::det_param_recovery(beta).norm();
        out.push_str(&format!(",{m1},{m2},{dp}\n"));
    }
    out
}

/// Fit summary line appended to sweep CSV emissions.
pub fn fit_summary(fit: &AsymptoticFit) -> String {
    format!(
        "# slope={} intercept={} r_squared={}\n",
        fit.slope, fit.intercept, fit.r_squared
    )
}

/// Run manifest: every output file records how it was produced.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    /// Canonical echo of the effective configuration, defaults included.
    pub config: serde_json::Value,
    pub crate_version: String,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value, outputs: Vec<String>) -> Self {
        let canonical = serde_json::to_string(&config).unwrap_or_default();
        Manifest {
            command: command.to_string(),
            config_hash: format!("{:016x}", fnv1a(canonical.as_bytes())),
            config,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Write a file, creating parent directories.
pub fn write_output(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())
}
