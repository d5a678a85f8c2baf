//! Trace file schema shared by the simulator and the offline tools.
//!
//! Traces are CSV with `#`-prefixed metadata lines ahead of the column
//! header. The first line carries the schema version; readers reject
//! unknown major versions. Column names and order are a stable contract.

use std::fmt::Write as _;
use std::io::{self, BufRead};
use std::path::Path;

use thiserror::Error;

/// Current schema major version.
pub const TRACE_VERSION: u32 = 1;

/// Magic prefix of the version line.
const VERSION_PREFIX: &str = "# tethersim-trace v";

/// Fixed column order of the trace schema.
pub const COLUMNS: [&str; 23] = [
    "t",
    "x",
    "y",
    "z",
    "tx_true",
    "ty_true",
    "tz_true",
    "tx_obs",
    "ty_obs",
    "tz_obs",
    "tx_est",
    "ty_est",
    "tz_est",
    "r_est",
    "z_est",
    "beta_est",
    "x_est",
    "y_est",
    "goal_x",
    "goal_y",
    "goal_z",
    "following",
    "motors_on",
];

/// One control-tick record.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub tx_true: f64,
    pub ty_true: f64,
    pub tz_true: f64,
    pub tx_obs: f64,
    pub ty_obs: f64,
    pub tz_obs: f64,
    pub tx_est: f64,
    pub ty_est: f64,
    pub tz_est: f64,
    pub r_est: f64,
    pub z_est: f64,
    pub beta_est: f64,
    pub x_est: f64,
    pub y_est: f64,
    pub goal_x: f64,
    pub goal_y: f64,
    pub goal_z: f64,
    pub following: bool,
    pub motors_on: bool,
}

/// Metadata recorded ahead of the header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceMeta {
    pub seed: u64,
    /// SHA-256 of the scenario config, hex; empty for hand-made traces.
    pub config_hash: String,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("missing version line '{VERSION_PREFIX}<n>'")]
    MissingVersion,
    #[error("unsupported trace version {found} (reader supports {TRACE_VERSION})")]
    UnsupportedVersion { found: u32 },
    #[error("schema mismatch at column '{column}'")]
    SchemaMismatch { column: String },
    #[error("trace contains no data rows")]
    Empty,
    #[error("row {row}: bad field '{field}'")]
    BadField { row: usize, field: String },
}

fn fmt_fields(row: &TraceRow) -> [String; 23] {
    [
        row.t.to_string(),
        row.x.to_string(),
        row.y.to_string(),
        row.z.to_string(),
        row.tx_true.to_string(),
        row.ty_true.to_string(),
        row.tz_true.to_string(),
        row.tx_obs.to_string(),
        row.ty_obs.to_string(),
        row.tz_obs.to_string(),
        row.tx_est.to_string(),
        row.ty_est.to_string(),
        row.tz_est.to_string(),
        row.r_est.to_string(),
        row.z_est.to_string(),
        row.beta_est.to_string(),
        row.x_est.to_string(),
        row.y_est.to_string(),
        row.goal_x.to_string(),
        row.goal_y.to_string(),
        row.goal_z.to_string(),
        (row.following as u8).to_string(),
        (row.motors_on as u8).to_string(),
    ]
}

/// Serialize a trace to a string (deterministic byte-for-byte for equal
/// inputs).
pub fn to_string(meta: &TraceMeta, rows: &[TraceRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{VERSION_PREFIX}{TRACE_VERSION}");
    let _ = writeln!(out, "# seed: {}", meta.seed);
    let _ = writeln!(out, "# config: {}", meta.config_hash);
    let _ = writeln!(out, "{}", COLUMNS.join(","));
    for row in rows {
        let _ = writeln!(out, "{}", fmt_fields(row).join(","));
    }
    out
}

/// Write a trace file.
pub fn write_file(path: &Path, meta: &TraceMeta, rows: &[TraceRow]) -> Result<(), TraceError> {
    std::fs::write(path, to_string(meta, rows))?;
    Ok(())
}

/// Parse a trace from a reader, validating version and column names.
pub fn read<R: BufRead>(reader: R) -> Result<(TraceMeta, Vec<TraceRow>), TraceError> {
    let mut lines = reader.lines();
    let first = lines.next().ok_or(TraceError::MissingVersion)??;
    let version: u32 = first
        .strip_prefix(VERSION_PREFIX)
        .and_then(|v| v.trim().parse().ok())
        .ok_or(TraceError::MissingVersion)?;
    if version != TRACE_VERSION {
        return Err(TraceError::UnsupportedVersion { found: version });
    }

    let mut meta = TraceMeta::default();
    let mut header: Option<String> = None;
    for line in lines.by_ref() {
        let line = line?;
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(seed) = rest.strip_prefix("seed:") {
                meta.seed = seed.trim().parse().unwrap_or(0);
            } else if let Some(hash) = rest.strip_prefix("config:") {
                meta.config_hash = hash.trim().to_string();
            }
        } else {
            header = Some(line);
            break;
        }
    }
    let header = header.ok_or(TraceError::Empty)?;
    let names: Vec<&str> = header.split(',').collect();
    if names.len() != COLUMNS.len() {
        let column = names
            .iter()
            .zip(COLUMNS.iter())
            .find(|(got, want)| got != want)
            .map(|(got, _)| got.to_string())
            .unwrap_or_else(|| {
                COLUMNS
                    .get(names.len())
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| names.last().unwrap_or(&"").to_string())
            });
        return Err(TraceError::SchemaMismatch { column });
    }
    for (got, want) in names.iter().zip(COLUMNS.iter()) {
        if got != want {
            return Err(TraceError::SchemaMismatch {
                column: got.to_string(),
            });
        }
    }

    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != COLUMNS.len() {
            return Err(TraceError::BadField {
                row: i,
                field: format!("expected {} fields, found {}", COLUMNS.len(), fields.len()),
            });
        }
        let num = |idx: usize| -> Result<f64, TraceError> {
            fields[idx].parse().map_err(|_| TraceError::BadField {
                row: i,
                field: format!("{}={}", COLUMNS[idx], fields[idx]),
            })
        };
        let flag = |idx: usize| -> Result<bool, TraceError> {
            match fields[idx] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(TraceError::BadField {
                    row: i,
                    field: format!("{}={}", COLUMNS[idx], other),
                }),
            }
        };
        rows.push(TraceRow {
            t: num(0)?,
            x: num(1)?,
            y: num(2)?,
            z: num(3)?,
            tx_true: num(4)?,
            ty_true: num(5)?,
            tz_true: num(6)?,
            tx_obs: num(7)?,
            ty_obs: num(8)?,
            tz_obs: num(9)?,
            tx_est: num(10)?,
            ty_est: num(11)?,
            tz_est: num(12)?,
            r_est: num(13)?,
            z_est: num(14)?,
            beta_est: num(15)?,
            x_est: num(16)?,
            y_est: num(17)?,
            goal_x: num(18)?,
            goal_y: num(19)?,
            goal_z: num(20)?,
            following: flag(21)?,
            motors_on: flag(22)?,
        });
    }
    if rows.is_empty() {
        return Err(TraceError::Empty);
    }
    Ok((meta, rows))
}

/// Read a trace file.
pub fn read_file(path: &Path) -> Result<(TraceMeta, Vec<TraceRow>), TraceError> {
    let file = std::fs::File::open(path)?;
    read(io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<TraceRow> {
        (0..3)
            .map(|k| TraceRow {
                t: k as f64 * 0.01,
                x: 1.0 + k as f64,
                tz_true: -0.05,
                following: k == 2,
                motors_on: true,
                ..TraceRow::default()
            })
            .collect()
    }

    #[test]
    fn round_trips_through_string() {
        let meta = TraceMeta {
            seed: 42,
            config_hash: "abc123".into(),
        };
        let rows = sample_rows();
        let text = to_string(&meta, &rows);
        let (meta2, rows2) = read(text.as_bytes()).unwrap();
        assert_eq!(meta, meta2);
        assert_eq!(rows, rows2);
    }

    #[test]
    fn header_column_order_is_the_contract() {
        let text = to_string(&TraceMeta::default(), &sample_rows());
        let header = text.lines().nth(3).unwrap();
        assert_eq!(
            header,
            "t,x,y,z,tx_true,ty_true,tz_true,tx_obs,ty_obs,tz_obs,tx_est,ty_est,tz_est,\
             r_est,z_est,beta_est,x_est,y_est,goal_x,goal_y,goal_z,following,motors_on"
        );
    }

    #[test]
    fn rejects_unknown_major_version() {
        let mut text = to_string(&TraceMeta::default(), &sample_rows());
        text = text.replace("trace v1", "trace v2");
        match read(text.as_bytes()) {
            Err(TraceError::UnsupportedVersion { found: 2 }) => {}
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_renamed_column() {
        let text =
            to_string(&TraceMeta::default(), &sample_rows()).replace("tx_obs", "tension_x_obs");
        match read(text.as_bytes()) {
            Err(TraceError::SchemaMismatch { column }) => assert_eq!(column, "tension_x_obs"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_trace() {
        let text = to_string(&TraceMeta::default(), &[]);
        assert!(matches!(read(text.as_bytes()), Err(TraceError::Empty)));
    }
}
