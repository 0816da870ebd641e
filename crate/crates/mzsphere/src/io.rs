//! Reading and writing artifacts. Every file is written to a temporary
//! sibling and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mzsphere_core::forward::{MeasurementSet, TruthRef};
use mzsphere_core::geometry::{MzFamily, SpherePoint};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::formats::MeasurementSidecar;
use crate::{CliError, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Schema(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// A CSV document with a fixed header, rendered in memory.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

fn read_table(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let fmt = |message: String| CliError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| fmt(e.to_string()))?;
    let got: Vec<String> = reader
        .headers()
        .map_err(|e| fmt(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if got != header {
        return Err(fmt(format!("expected header {}, found {}", header.join(","), got.join(","))));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fmt(e.to_string()))?;
        let row = record
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| fmt(format!("row {}: {e}", line + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

pub const NODES_HEADER: [&str; 3] = ["theta", "phi", "weight"];
pub const MEASUREMENT_HEADER: [&str; 4] = ["theta", "phi", "weight", "y"];

pub fn nodes_csv(fam: &MzFamily) -> Vec<u8> {
    let mut t = Table::new(&NODES_HEADER);
    for (p, w) in fam.nodes.iter().zip(&fam.weights) {
        t.row([fmt_f64(p.theta), fmt_f64(p.phi), fmt_f64(*w)]);
    }
    t.into_bytes()
}

fn points(rows: &[Vec<f64>]) -> Result<Vec<SpherePoint>> {
    rows.iter()
        .map(|r| SpherePoint::new(r[0], r[1]).map_err(CliError::from))
        .collect()
}

pub fn read_nodes(path: &Path) -> Result<MzFamily> {
    let rows = read_table(path, &NODES_HEADER)?;
    let nodes = points(&rows)?;
    Ok(MzFamily::new(nodes, rows.iter().map(|r| r[2]).collect())?)
}

pub const PROFILE_HEADER: [&str; 2] = ["r", "value"];

/// A tabulated radial profile, `(r, value)` pairs.
pub fn read_profile(path: &Path) -> Result<Vec<(f64, f64)>> {
    Ok(read_table(path, &PROFILE_HEADER)?.into_iter().map(|r| (r[0], r[1])).collect())
}

/// The JSON file stored beside a measurement CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_measurements(path: &Path, set: &MeasurementSet) -> Result<()> {
    let mut t = Table::new(&MEASUREMENT_HEADER);
    for ((p, w), y) in set.nodes.iter().zip(&set.weights).zip(&set.y) {
        t.row([fmt_f64(p.theta), fmt_f64(p.phi), fmt_f64(*w), fmt_f64(*y)]);
    }
    let sidecar = MeasurementSidecar {
        nodes: set.len(),
        beta: set.beta,
        seed: set.seed,
        truth_digest: set.truth_ref.as_ref().map(|r| r.truth_digest.clone()),
        filter_digest: set.truth_ref.as_ref().map(|r| r.filter_digest.clone()),
    };
    write_atomic(path, &t.into_bytes())?;
    write_json(&sidecar_path(path), &sidecar)
}

/// Without a sidecar the noise level is taken as 0.
pub fn read_measurements(path: &Path) -> Result<MeasurementSet> {
    let rows = read_table(path, &MEASUREMENT_HEADER)?;
    let nodes = points(&rows)?;
    let side = sidecar_path(path);
    let meta: Option<MeasurementSidecar> = side.exists().then(|| read_json(&side)).transpose()?;
    if let Some(m) = &meta {
        if m.nodes != rows.len() {
            return Err(CliError::Format {
                path: side,
                message: format!("sidecar lists {} nodes, the CSV has {}", m.nodes, rows.len()),
            });
        }
    }
    let mut set = MeasurementSet::new(
        nodes,
        rows.iter().map(|r| r[2]).collect(),
        rows.iter().map(|r| r[3]).collect(),
        meta.as_ref().map_or(0.0, |m| m.beta),
    )?;
    if let Some(m) = meta {
        set.seed = m.seed;
        if let (Some(truth_digest), Some(filter_digest)) = (m.truth_digest, m.filter_digest) {
            set.truth_ref = Some(TruthRef {
                truth_digest,
                filter_digest,
            });
        }
    }
    Ok(set)
}
