//! Point-cloud files: CSV (`re_W,im_W,re_Wt,im_Wt`, one row per pair) and
//! JSON with run metadata.
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so `2.0` is written `2` and every value round-trips exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PointCloud;
use crate::linalg::C64;

pub const CSV_HEADER: [&str; 4] = ["re_W", "im_W", "re_Wt", "im_Wt"];

/// Shortest round-trip decimal, without a trailing `.0`.
pub fn format_number(v: f64) -> String {
    let s = format!("{v:?}");
    match s.strip_suffix(".0") {
        Some(t) => t.to_string(),
        None => s,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse { path: path.into(), line, message: format!("{other:?}") },
    }
}

pub fn write_cloud_csv<W: Write>(cloud: &PointCloud, out: W, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(|e| csv_error(path, e))?;
    for (p, q) in cloud.w.iter().zip(&cloud.w_tilde) {
        let row = [p.re, p.im, q.re, q.im].map(format_number);
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Read a CSV cloud; pairs are not stored in CSV, so the result is
/// points-only.
pub fn read_cloud_csv<R: Read>(input: R, path: &Path) -> Result<PointCloud> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse { path: path.into(), line: 1, message: format!("expected header {}", CSV_HEADER.join(",")) });
    }
    let mut cloud = PointCloud::points_only();
    for record in r.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut v = [0.0; 4];
        for (slot, field) in v.iter_mut().zip(record.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| Error::Parse { path: path.into(), line, message: format!("cannot parse number {field:?}") })?;
        }
        cloud.w.push(C64::new(v[0], v[1]));
        cloud.w_tilde.push(C64::new(v[2], v[3]));
    }
    Ok(cloud)
}

/// Provenance written next to the points in JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudMetadata {
    pub matrix: String,
    pub seed: u64,
    /// Human-readable budget, e.g. `60s`, `100000 samples`, `5 iterations`.
    pub budget: String,
    pub method: String,
    pub points: usize,
}

#[derive(Serialize, Deserialize)]
struct CloudDocument {
    metadata: CloudMetadata,
    w: Vec<[f64; 2]>,
    w_tilde: Vec<[f64; 2]>,
}

pub fn cloud_to_json(cloud: &PointCloud, metadata: &CloudMetadata) -> String {
    let pts = |v: &[C64]| v.iter().map(|z| [z.re, z.im]).collect();
    let doc = CloudDocument { metadata: metadata.clone(), w: pts(&cloud.w), w_tilde: pts(&cloud.w_tilde) };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn cloud_from_json(text: &str, path: &Path) -> Result<(PointCloud, CloudMetadata)> {
    let doc: CloudDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse { path: path.into(), line: e.line(), message: e.to_string() })?;
    if doc.w.len() != doc.w_tilde.len() {
        return Err(Error::Parse { path: path.into(), line: 1, message: "w and w_tilde differ in length".into() });
    }
    let pts = |v: &[[f64; 2]]| v.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    let cloud = PointCloud { w: pts(&doc.w), w_tilde: pts(&doc.w_tilde), pairs: None };
    Ok((cloud, doc.metadata))
}

/// Write `cloud` as CSV or JSON according to the extension of `path`.
pub fn write_cloud(path: &Path, cloud: &PointCloud, metadata: &CloudMetadata) -> Result<()> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match ext.as_deref() {
        Some("csv") => write_cloud_csv(cloud, &mut out, path)?,
        Some("json") => out.write_all(cloud_to_json(cloud, metadata).as_bytes()).map_err(|e| Error::io(path, e))?,
        _ => return Err(Error::InvalidConfig(format!("{}: output must end in .csv or .json", path.display()))),
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let mut text = String::new();
    File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        cloud_from_json(&text, path).map(|(c, _)| c)
    } else {
        read_cloud_csv(text.as_bytes(), path)
    }
}
