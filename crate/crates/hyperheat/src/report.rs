//! Machine-readable report emission: versioned JSON envelopes, CSV node
//! dumps for external plotting, and atomic file writes (temp + rename).

use crate::bounds_verifier::{classify_region, GridSpec, RegionConstants, UNDERFLOW_FLOOR_LOG};
use crate::dimension::Dimension;
use crate::error::{HyperheatError, Result};
use crate::model_kernels::{dm_quantity, heat_kernel};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Version of the JSON report layout; bumped on breaking changes.
pub const SCHEMA_VERSION: u32 = 1;

pub fn library_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Envelope placed around every report payload.
#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    library_version: &'a str,
    command: &'a str,
    report: &'a T,
}

/// Serialize a payload inside the versioned envelope. serde_json prints
/// floats with the shortest round-trip representation, which always
/// carries at least 15 significant digits when they matter.
pub fn render_json<T: Serialize>(command: &str, payload: &T) -> Result<String> {
    let env = Envelope {
        schema: SCHEMA_VERSION,
        library_version: library_version(),
        command,
        report: payload,
    };
    serde_json::to_string_pretty(&env)
        .map_err(|e| HyperheatError::Config(format!("report serialization: {e}")))
}

/// Write contents to `path` atomically: a temp file in the same directory
/// is written, flushed, and renamed over the target.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let tmp_name = format!(
        ".{}.tmp-{}",
        path.file_name()
            .and_then(|f| f.to_str())
            .unwrap_or("report"),
        std::process::id()
    );
    let tmp = match dir {
        Some(d) => d.join(&tmp_name),
        None => Path::new(&tmp_name).to_path_buf(),
    };
    let mut f = std::fs::File::create(&tmp)?;
    f.write_all(contents.as_bytes())?;
    f.sync_all()?;
    drop(f);
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json_report<T: Serialize>(path: &Path, command: &str, payload: &T) -> Result<()> {
    let mut body = render_json(command, payload)?;
    body.push('\n');
    write_atomic(path, &body)
}

/// One grid node of a comparison dump.
#[derive(Debug, Clone, Serialize)]
pub struct NodeRow {
    pub r: f64,
    pub t: f64,
    pub log_h: f64,
    pub log_dm: f64,
    /// H / DM; NaN when either side underflowed past the floor.
    pub ratio: f64,
    /// Overlapping regions containing the node, e.g. "II+IV".
    pub regions: String,
}

/// Evaluate every grid node for a CSV dump of the heat kernel against the
/// comparison quantity.
pub fn dm_node_rows(dim: Dimension, grid: &GridSpec) -> Result<Vec<NodeRow>> {
    grid.validate()?;
    let constants = RegionConstants::default();
    let nodes = grid.nodes();
    nodes
        .par_iter()
        .map(|&p| {
            let h = heat_kernel(dim, p)?;
            let dm = dm_quantity(dim, p);
            let ratio = if h.log_magnitude < UNDERFLOOR || dm.log_magnitude < UNDERFLOOR {
                f64::NAN
            } else {
                h.sign as f64 * h.log_ratio(&dm).exp()
            };
            let regions = classify_region(p, &constants)?
                .iter()
                .map(|l| format!("{l:?}"))
                .collect::<Vec<_>>()
                .join("+");
            Ok(NodeRow {
                r: p.r,
                t: p.t,
                log_h: h.log_magnitude,
                log_dm: dm.log_magnitude,
                ratio,
                regions,
            })
        })
        .collect()
}

const UNDERFLOOR: f64 = UNDERFLOW_FLOOR_LOG;

/// Render node rows as CSV with a versioned, documented header. Floats are
/// printed with 17 significant digits; underflowed ratios are empty.
pub fn render_csv(rows: &[NodeRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# hyperheat csv schema {SCHEMA_VERSION}, library {}\n",
        library_version()
    ));
    out.push_str("# columns: geodesic distance, time, log heat kernel, log comparison quantity, heat/comparison ratio (empty on underflow), overlapping region labels\n");
    out.push_str("r,t,log_h,log_dm,ratio,regions\n");
    for row in rows {
        let ratio = if row.ratio.is_nan() {
            String::new()
        } else {
            format!("{:.17e}", row.ratio)
        };
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{},{}\n",
            row.r, row.t, row.log_h, row.log_dm, ratio, row.regions
        ));
    }
    out
}

pub fn write_csv_report(path: &Path, rows: &[NodeRow]) -> Result<()> {
    write_atomic(path, &render_csv(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds_verifier::Spacing;

    fn tiny_grid() -> GridSpec {
        GridSpec {
            r_min: 0.5,
            r_max: 5.0,
            t_min: 0.5,
            t_max: 5.0,
            r_points: 4,
            t_points: 4,
            spacing: Spacing::Log,
        }
    }

    #[test]
    fn json_envelope_has_schema_and_version() {
        let body = render_json("eval", &serde_json::json!({"x": 1.0 / 3.0})).unwrap();
        let v: serde_json::Value = serde_json::from_str(&body).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["library_version"], library_version());
        assert_eq!(v["command"], "eval");
        // Shortest round-trip float text preserves all significant digits.
        assert!(body.contains("0.3333333333333333"));
    }

    #[test]
    fn atomic_write_replaces_and_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        let leftovers: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name() != "report.json")
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn csv_rows_parse_back() {
        let dim = Dimension::new(2).unwrap();
        let rows = dm_node_rows(dim, &tiny_grid()).unwrap();
        assert_eq!(rows.len(), 16);
        let text = render_csv(&rows);
        let mut lines = text.lines().skip(2);
        assert_eq!(lines.next().unwrap(), "r,t,log_h,log_dm,ratio,regions");
        for (line, row) in lines.zip(&rows) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 6);
            assert!((cols[0].parse::<f64>().unwrap() - row.r).abs() < 1e-15 * row.r);
            let ratio: f64 = cols[4].parse().unwrap();
            assert!(ratio.is_finite() && ratio > 0.0);
            assert!(!cols[5].is_empty());
        }
    }

    #[test]
    fn csv_deterministic_across_runs() {
        let dim = Dimension::new(4).unwrap();
        let a = render_csv(&dm_node_rows(dim, &tiny_grid()).unwrap());
        let b = render_csv(&dm_node_rows(dim, &tiny_grid()).unwrap());
        assert_eq!(a, b);
    }
}
