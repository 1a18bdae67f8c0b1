//! Scatterer description files.
//!
//! One TOML document describes one scatterer. Complex numbers are `[re, im]`
//! pairs; a linear refractive index is the triple `q0 + q1 x1 + q2 x2`.
//!
//! ```text
//! kind = "nest"                 # "nest" | "cell" | "disk" | "empty"
//! wavenumber = 2.0              # optional default k
//!
//! [[layers]]                    # nest: outermost first
//! vertices = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]
//! q = { q0 = [2.0, 0.0], q1 = [0.0, 0.0], q2 = [0.0, 0.0] }
//! eta = [1.0, 0.0]
//!
//! # cell partitions use [[cells]] with a shared top-level eta;
//! # disks use radii = [...], q_values = [...], etas = [...]
//! ```

use crate::disk::DiskScatterer;
use crate::geometry::{
    validate_cell, validate_nest, CellScatterer, ConvexPolygon, GeometryError, LinearIndex,
    NestScatterer, Vec2,
};
use crate::scatterer::Scatterer;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("TOML parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown scatterer kind {0:?} (expected nest, cell, disk, or empty)")]
    UnknownKind(String),
    #[error("{kind} scatterer requires field {field}")]
    MissingField { kind: &'static str, field: &'static str },
    #[error("invalid polygon: {0}")]
    Geometry(#[from] GeometryError),
    #[error("structure violations: {0}")]
    Structure(String),
    #[error("invalid disk: {0}")]
    Disk(#[from] crate::disk::DiskError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegionSpec {
    vertices: Vec<[f64; 2]>,
    q: LinearIndex,
    #[serde(default)]
    eta: Option<Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScattererFile {
    kind: String,
    #[serde(default)]
    wavenumber: Option<f64>,
    #[serde(default)]
    layers: Option<Vec<RegionSpec>>,
    #[serde(default)]
    cells: Option<Vec<RegionSpec>>,
    #[serde(default)]
    eta: Option<Complex64>,
    #[serde(default)]
    radii: Option<Vec<f64>>,
    #[serde(default)]
    q_values: Option<Vec<Complex64>>,
    #[serde(default)]
    etas: Option<Vec<Complex64>>,
}

/// A parsed scatterer plus the file's optional default wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScatterer {
    pub scatterer: Scatterer,
    pub wavenumber: Option<f64>,
}

/// Parse and validate a scatterer description.
pub fn parse_scatterer_toml(text: &str) -> Result<LoadedScatterer, ConfigError> {
    let file: ScattererFile = toml::from_str(text)?;
    let zero = Complex64::new(0.0, 0.0);
    let scatterer = match file.kind.as_str() {
        "empty" => Scatterer::Empty,
        "nest" => {
            let layers = file.layers.ok_or(ConfigError::MissingField {
                kind: "nest",
                field: "layers",
            })?;
            let mut polys = Vec::new();
            let mut indices = Vec::new();
            let mut etas = Vec::new();
            for layer in layers {
                polys.push(poly(&layer.vertices)?);
                indices.push(layer.q);
                etas.push(layer.eta.unwrap_or(zero));
            }
            let nest = NestScatterer {
                layers: polys,
                indices,
                etas,
            };
            let violations = validate_nest(&nest);
            if !violations.is_empty() {
                return Err(ConfigError::Structure(join(&violations)));
            }
            Scatterer::Nest(nest)
        }
        "cell" => {
            let cells = file.cells.ok_or(ConfigError::MissingField {
                kind: "cell",
                field: "cells",
            })?;
            let eta = file.eta.ok_or(ConfigError::MissingField {
                kind: "cell",
                field: "eta",
            })?;
            let mut polys = Vec::new();
            let mut indices = Vec::new();
            for cell in cells {
                polys.push(poly(&cell.vertices)?);
                indices.push(cell.q);
            }
            let cell = CellScatterer {
                cells: polys,
                indices,
                eta,
            };
            let violations = validate_cell(&cell);
            if !violations.is_empty() {
                return Err(ConfigError::Structure(join(&violations)));
            }
            Scatterer::Cell(cell)
        }
        "disk" => {
            let radii = file.radii.ok_or(ConfigError::MissingField {
                kind: "disk",
                field: "radii",
            })?;
            let q_values = file.q_values.ok_or(ConfigError::MissingField {
                kind: "disk",
                field: "q_values",
            })?;
            let etas = file.etas.ok_or(ConfigError::MissingField {
                kind: "disk",
                field: "etas",
            })?;
            let d = DiskScatterer {
                radii,
                q_values,
                etas,
            };
            d.validate()?;
            Scatterer::Disk(d)
        }
        other => return Err(ConfigError::UnknownKind(other.to_string())),
    };
    Ok(LoadedScatterer {
        scatterer,
        wavenumber: file.wavenumber,
    })
}

fn poly(vertices: &[[f64; 2]]) -> Result<ConvexPolygon, GeometryError> {
    ConvexPolygon::new(vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect())
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Bundled presets used by the experiments and the CLI.
///
/// `irrational-triangle` has its apex angle equal to `pi / sqrt(2)` radians,
/// which no fraction with denominator below 1e5 matches to 1e-12.
pub fn preset(name: &str) -> Option<LoadedScatterer> {
    let text = preset_toml(name)?;
    Some(parse_scatterer_toml(text).expect("bundled preset must parse"))
}

/// TOML source of a bundled preset (also served by the CLI for reference).
pub fn preset_toml(name: &str) -> Option<&'static str> {
    match name {
        "empty" => Some("kind = \"empty\"\n"),
        "unit-disk" => Some(
            r#"kind = "disk"
wavenumber = 2.0
radii = [1.0]
q_values = [[2.0, 0.0]]
etas = [[0.5, 0.0]]
"#,
        ),
        "irrational-triangle" => Some(
            // apex at the origin with opening pi/sqrt(2) ~ 2.2214414690,
            // legs of unit length
            r#"kind = "nest"
wavenumber = 2.0

[[layers]]
vertices = [[1.0, 0.0], [-0.60569986707881, 0.79569320156748], [0.0, 0.0]]
q = { q0 = [2.0, 0.0], q1 = [0.0, 0.0], q2 = [0.0, 0.0] }
eta = [1.0, 0.0]
"#,
        ),
        "nested-squares" => Some(
            r#"kind = "nest"
wavenumber = 2.0

[[layers]]
vertices = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]
q = { q0 = [2.0, 0.0], q1 = [0.0, 0.0], q2 = [0.0, 0.0] }
eta = [1.0, 0.0]

[[layers]]
vertices = [[-0.22, -0.22], [0.22, -0.22], [0.22, 0.22], [-0.22, 0.22]]
q = { q0 = [3.0, 0.0], q1 = [0.0, 0.0], q2 = [0.0, 0.0] }
eta = [0.5, 0.0]
"#,
        ),
        "split-square" => Some(
            r#"kind = "cell"
wavenumber = 2.0
eta = [1.0, 0.0]

[[cells]]
vertices = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5]]
q = { q0 = [2.0, 0.0], q1 = [0.0, 0.0], q2 = [0.0, 0.0] }

[[cells]]
vertices = [[-0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]
q = { q0 = [3.0, 0.0], q1 = [0.0, 0.0], q2 = [0.0, 0.0] }
"#,
        ),
        _ => None,
    }
}

/// Names of all bundled presets.
pub fn preset_names() -> &'static [&'static str] {
    &[
        "empty",
        "unit-disk",
        "irrational-triangle",
        "nested-squares",
        "split-square",
    ]
}
