//! Command-line front end: run configuration, operator surface sampling to
//! CSV/JSON, the invariant verification report, remainder-vs-bound tables,
//! and node listings. The thin binary wrapper handles argument parsing and
//! exit codes; everything here is plain library code.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    bound_boolean, bound_directional, bound_product, moment_gap_x, moment_gap_y, ModulusSource,
};
use crate::domain::{Axis, CurveSpec, CurvedTriangle};
use crate::error::Error;
use crate::fields::ScalarField;
use crate::operators::{apply, remainder, BivariateParams, OperatorKind};
use crate::verify::{self, PropertyReport};

/// Configuration problems; the binary maps these to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config file {path}: {source}")]
    Toml {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("unrecognized curve spec '{spec}' (expected line | superellipse:p | poly:c0,c1,...)")]
    CurveSyntax { spec: String },
    #[error("curve spec '{spec}' rejected: {reason}")]
    CurveRejected { spec: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

/// Runtime failures during an otherwise valid run; exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("evaluating {surface} at ({x}, {y}): {source}")]
    Eval {
        surface: String,
        x: f64,
        y: f64,
        #[source]
        source: Error,
    },
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(ConfigError::Invalid(format!(
                "unknown output format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// One run's worth of settings. Defaults mirror the reference experiment:
/// unit triangle with a straight hypotenuse, `m = 5`, `n = 6`,
/// `beta = b = 1`, the gentle field on a 33-point lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub h: f64,
    pub curve: String,
    pub m: usize,
    pub n: usize,
    pub beta: f64,
    pub b: f64,
    pub field: String,
    pub grid: usize,
    pub op: String,
    pub out: PathBuf,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            h: 1.0,
            curve: "line".into(),
            m: 5,
            n: 6,
            beta: 1.0,
            b: 1.0,
            field: "gentle".into(),
            grid: 33,
            op: "all".into(),
            out: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Toml {
            path: path.to_path_buf(),
            source: Box::new(source),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Which surfaces a sample run emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    /// The raw field itself.
    Field,
    Op(OperatorKind),
}

impl Surface {
    pub fn file_stem(&self) -> String {
        match self {
            Surface::Field => "f".into(),
            Surface::Op(kind) => kind.to_string(),
        }
    }
}

/// A validated configuration with the domain objects constructed.
#[derive(Debug, Clone)]
pub struct Scene {
    pub tri: CurvedTriangle,
    pub params: BivariateParams,
    pub field: ScalarField,
    pub surfaces: Vec<Surface>,
    pub grid: usize,
}

pub fn parse_curve_spec(spec: &str) -> Result<CurveSpec, ConfigError> {
    if spec == "line" {
        return Ok(CurveSpec::StraightLine);
    }
    if let Some(p) = spec.strip_prefix("superellipse:") {
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| ConfigError::CurveSyntax { spec: spec.into() })?;
        return Ok(CurveSpec::SuperellipseArc { p });
    }
    if let Some(body) = spec.strip_prefix("poly:") {
        let coeffs: Result<Vec<f64>, _> = body.split(',').map(|c| c.trim().parse()).collect();
        let coeffs = coeffs.map_err(|_| ConfigError::CurveSyntax { spec: spec.into() })?;
        return Ok(CurveSpec::MonotonePolynomial { coeffs });
    }
    Err(ConfigError::CurveSyntax { spec: spec.into() })
}

/// Validates a configuration and constructs the triangle, parameters, field
/// and surface selection.
pub fn resolve(cfg: &RunConfig) -> Result<Scene, ConfigError> {
    let curve = parse_curve_spec(&cfg.curve)?;
    let tri = CurvedTriangle::new(cfg.h, curve).map_err(|e| ConfigError::CurveRejected {
        spec: cfg.curve.clone(),
        reason: e.to_string(),
    })?;
    let params = BivariateParams::new(cfg.m, cfg.beta, cfg.n, cfg.b)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let field =
        ScalarField::from_spec(&cfg.field).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    if cfg.grid < 2 {
        return Err(ConfigError::Invalid(format!(
            "grid must be at least 2, got {}",
            cfg.grid
        )));
    }
    let surfaces = match cfg.op.as_str() {
        "all" => vec![
            Surface::Field,
            Surface::Op(OperatorKind::Qx),
            Surface::Op(OperatorKind::Qy),
            Surface::Op(OperatorKind::P1),
            Surface::Op(OperatorKind::P2),
            Surface::Op(OperatorKind::S1),
        ],
        other => {
            let kind: OperatorKind = other
                .parse()
                .map_err(|e: Error| ConfigError::Invalid(e.to_string()))?;
            vec![Surface::Field, Surface::Op(kind)]
        }
    };
    Ok(Scene {
        tri,
        params,
        field,
        surfaces,
        grid: cfg.grid,
    })
}

/// A sampled surface: `(x, y, value)` records over the lattice points that
/// fall inside the triangle, row-major in `y` then `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub records: Vec<[f64; 3]>,
}

impl GridSample {
    /// Plot-ready CSV with a `x,y,value` header and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,value\n");
        for r in &self.records {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", r[0], r[1], r[2]));
        }
        s
    }

    pub fn to_json(&self, meta: &RunConfig) -> String {
        #[derive(Serialize)]
        struct JsonSurface<'a> {
            meta: &'a RunConfig,
            points: &'a [[f64; 3]],
        }
        let mut s = serde_json::to_string_pretty(&JsonSurface {
            meta,
            points: &self.records,
        })
        .expect("surface serializes");
        s.push('\n');
        s
    }
}

/// The `grid x grid` lattice of `[0, h]^2` masked to the closed triangle,
/// row-major in `y` then `x`. Points outside are omitted, not emitted as
/// nulls.
pub fn lattice_points(tri: &CurvedTriangle, grid: usize) -> Vec<(f64, f64)> {
    let h = tri.h();
    let step = h / (grid - 1) as f64;
    let mut pts = Vec::new();
    for iy in 0..grid {
        let y = if iy + 1 == grid { h } else { iy as f64 * step };
        for ix in 0..grid {
            let x = if ix + 1 == grid { h } else { ix as f64 * step };
            if tri.contains(x, y, 0.0) {
                pts.push((x, y));
            }
        }
    }
    pts
}

/// Evaluates one surface over the masked lattice.
pub fn sample_surface(scene: &Scene, surface: Surface) -> Result<GridSample, CliError> {
    let pts = lattice_points(&scene.tri, scene.grid);
    let mut records = Vec::with_capacity(pts.len());
    for (x, y) in pts {
        let value = match surface {
            Surface::Field => scene.field.eval(x, y),
            Surface::Op(kind) => apply(kind, &scene.tri, &scene.params, &scene.field, x, y)
                .map_err(|source| CliError::Eval {
                    surface: surface.file_stem(),
                    x,
                    y,
                    source,
                })?,
        };
        records.push([x, y, value]);
    }
    Ok(GridSample { records })
}

/// Writes one file per requested surface (and the raw field) into the
/// output directory; returns the written paths in emission order.
pub fn cmd_sample(cfg: &RunConfig, scene: &Scene) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&cfg.out).map_err(|source| CliError::Output {
        path: cfg.out.clone(),
        source,
    })?;
    let mut written = Vec::new();
    for &surface in &scene.surfaces {
        let sample = sample_surface(scene, surface)?;
        let path = cfg.out.join(format!(
            "{}.{}",
            surface.file_stem(),
            cfg.format.extension()
        ));
        let body = match cfg.format {
            OutputFormat::Csv => sample.to_csv(),
            OutputFormat::Json => sample.to_json(cfg),
        };
        fs::write(&path, body).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

/// Runs every module's invariant suite at the configured parameters.
pub fn cmd_verify(scene: &Scene) -> Vec<PropertyReport> {
    verify::run_all(&scene.tri, &scene.params)
}

#[derive(Debug, Clone)]
pub struct BoundsRow {
    pub x: f64,
    pub y: f64,
    /// `(|remainder|, bound)` for Qx, Qy, P1, S1 in that order.
    pub entries: [(f64, f64); 4],
    pub violation: bool,
}

#[derive(Debug, Clone)]
pub struct BoundsTable {
    pub certified: bool,
    pub rows: Vec<BoundsRow>,
    pub violations: usize,
}

/// Remainders against their bounds at deterministic interior sample points.
/// A `Lipschitz` source is certified mode (must show zero violations); a
/// `BruteForce` source is estimate mode.
pub fn cmd_bounds(
    scene: &Scene,
    source: &ModulusSource,
    points: usize,
) -> Result<BoundsTable, CliError> {
    let certified = matches!(source, ModulusSource::Lipschitz(_));
    let tri = &scene.tri;
    let params = &scene.params;
    let field = &scene.field;
    let eval = |x: f64, y: f64| -> Result<BoundsRow, Error> {
        let gap_x = moment_gap_x(tri, params, x, y)?.max(0.0);
        let gap_y = moment_gap_y(tri, params, x, y)?.max(0.0);
        let delta_x = gap_x.sqrt().max(f64::MIN_POSITIVE);
        let delta_y = gap_y.sqrt().max(f64::MIN_POSITIVE);
        let r_qx = remainder(OperatorKind::Qx, tri, params, field, x, y)?.abs();
        let b_qx = bound_directional(tri, params, field, x, y, delta_x, Axis::X, source)?;
        let r_qy = remainder(OperatorKind::Qy, tri, params, field, x, y)?.abs();
        let b_qy = bound_directional(tri, params, field, x, y, delta_y, Axis::Y, source)?;
        let r_p1 = remainder(OperatorKind::P1, tri, params, field, x, y)?.abs();
        let b_p1 = bound_product(tri, params, field, x, y, source)?;
        let r_s1 = remainder(OperatorKind::S1, tri, params, field, x, y)?.abs();
        let b_s1 = bound_boolean(tri, params, field, x, y, source)?;
        let entries = [(r_qx, b_qx), (r_qy, b_qy), (r_p1, b_p1), (r_s1, b_s1)];
        let violation = entries.iter().any(|(r, b)| r > b);
        Ok(BoundsRow {
            x,
            y,
            entries,
            violation,
        })
    };
    let mut rows = Vec::with_capacity(points);
    for (x, y) in verify::interior_points(tri, points, 97) {
        let row = eval(x, y).map_err(|source| CliError::Eval {
            surface: "bounds".into(),
            x,
            y,
            source,
        })?;
        rows.push(row);
    }
    let violations = rows.iter().filter(|r| r.violation).count();
    Ok(BoundsTable {
        certified,
        rows,
        violations,
    })
}

#[derive(Debug, Clone)]
pub struct NodeListing {
    pub label: String,
    pub nodes: Vec<f64>,
    pub degenerate: bool,
}

/// Node partitions at fixed coordinates: the x-direction partition of
/// `[0, g(y)]` and/or the y-direction partition of `[0, f(x)]`.
pub fn cmd_nodes(
    scene: &Scene,
    at_y: Option<f64>,
    at_x: Option<f64>,
) -> Result<Vec<NodeListing>, ConfigError> {
    if at_y.is_none() && at_x.is_none() {
        return Err(ConfigError::Invalid(
            "nodes needs --at-y and/or --at-x".into(),
        ));
    }
    let mut listings = Vec::new();
    if let Some(y) = at_y {
        let m = scene.params.x_dir().m();
        let nodes = scene
            .tri
            .nodes_along(m, y, Axis::X)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        listings.push(NodeListing {
            label: format!("x-direction nodes at y = {y} (m = {m})"),
            degenerate: nodes[m] <= 1e-12,
            nodes,
        });
    }
    if let Some(x) = at_x {
        let n = scene.params.y_dir().m();
        let nodes = scene
            .tri
            .nodes_along(n, x, Axis::Y)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        listings.push(NodeListing {
            label: format!("y-direction nodes at x = {x} (n = {n})"),
            degenerate: nodes[n] <= 1e-12,
            nodes,
        });
    }
    Ok(listings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        let parsed: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(parsed, cfg);
        assert_eq!(parsed.to_toml(), text);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let r: Result<RunConfig, _> = toml::from_str("hh = 2.0");
        assert!(r.is_err());
    }

    #[test]
    fn curve_specs_parse() {
        assert_eq!(parse_curve_spec("line").unwrap(), CurveSpec::StraightLine);
        assert_eq!(
            parse_curve_spec("superellipse:2").unwrap(),
            CurveSpec::SuperellipseArc { p: 2.0 }
        );
        assert_eq!(
            parse_curve_spec("poly:1,0,-1").unwrap(),
            CurveSpec::MonotonePolynomial {
                coeffs: vec![1.0, 0.0, -1.0]
            }
        );
        assert!(parse_curve_spec("circle").is_err());
        assert!(parse_curve_spec("superellipse:x").is_err());
    }

    #[test]
    fn resolve_default_config() {
        let scene = resolve(&RunConfig::default()).unwrap();
        assert_eq!(scene.surfaces.len(), 6);
        assert_eq!(scene.surfaces[0], Surface::Field);
    }

    #[test]
    fn resolve_rejects_bad_settings() {
        let cfg = RunConfig {
            grid: 1,
            ..RunConfig::default()
        };
        assert!(matches!(resolve(&cfg), Err(ConfigError::Invalid(_))));

        let cfg = RunConfig {
            op: "zz".into(),
            ..RunConfig::default()
        };
        assert!(resolve(&cfg).is_err());

        let cfg = RunConfig {
            field: "nope".into(),
            ..RunConfig::default()
        };
        assert!(resolve(&cfg).is_err());

        let cfg = RunConfig {
            curve: "poly:1,1,-2".into(),
            ..RunConfig::default()
        };
        assert!(matches!(
            resolve(&cfg),
            Err(ConfigError::CurveRejected { .. })
        ));
    }

    #[test]
    fn lattice_is_masked_and_row_major() {
        let tri = CurvedTriangle::new(1.0, CurveSpec::StraightLine).unwrap();
        let pts = lattice_points(&tri, 5);
        for &(x, y) in &pts {
            assert!(tri.contains(x, y, 0.0));
        }
        // row-major: y varies slowest
        for pair in pts.windows(2) {
            assert!(pair[1].1 > pair[0].1 || pair[1].0 > pair[0].0);
        }
        // the diagonal lattice points of the straight hypotenuse are kept
        assert!(pts.contains(&(0.5, 0.5)));
        assert!(!pts.contains(&(0.75, 0.5)));
    }

    #[test]
    fn constant_field_sample_is_identically_one() {
        let cfg = RunConfig {
            field: "e00".into(),
            op: "s1".into(),
            ..RunConfig::default()
        };
        let scene = resolve(&cfg).unwrap();
        let sample = sample_surface(&scene, Surface::Op(OperatorKind::S1)).unwrap();
        for r in sample.records {
            assert!((r[2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let sample = GridSample {
            records: vec![[0.5, 0.25, 1.0 / 3.0]],
        };
        let csv = sample.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,y,value");
        let row = lines.next().unwrap();
        assert!(row.starts_with("5.0000000000000000e-1,2.5000000000000000e-1,"));
        let parsed: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(parsed, 1.0 / 3.0);
    }

    #[test]
    fn nodes_listing_matches_uniform_partition() {
        let cfg = RunConfig {
            m: 4,
            ..RunConfig::default()
        };
        let scene = resolve(&cfg).unwrap();
        let listing = cmd_nodes(&scene, Some(0.2), None).unwrap();
        let expected = [0.0, 0.2, 0.4, 0.6, 0.8];
        for (a, b) in listing[0].nodes.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(!listing[0].degenerate);

        let listing = cmd_nodes(&scene, Some(1.0), None).unwrap();
        assert!(listing[0].degenerate);
        assert!(listing[0].nodes.iter().all(|&u| u == 0.0));

        assert!(cmd_nodes(&scene, None, None).is_err());
        assert!(cmd_nodes(&scene, Some(2.0), None).is_err());
    }
}
