//! File formats: distance-matrix and point-cloud CSV, complex and measure
//! JSON, and the report envelope written by the command-line tool.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measure::FiniteMeasure;
use crate::metric_space::{MetricSpace, Norm};
use crate::simplicial_complex::SimplicialComplex;
use crate::wasserstein::Transport;

fn parse_err(line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses a distance or coordinate cell. `inf`, `+inf`, `infinity` and `∞`
/// (any case) mean `+∞`.
pub fn parse_distance(cell: &str) -> Option<f64> {
    let c = cell.trim();
    match c.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" | "∞" => Some(f64::INFINITY),
        "nan" | "-nan" | "+nan" => None,
        _ => c.parse().ok(),
    }
}

fn records(text: &str) -> Result<Vec<(u64, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, 1, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

/// A distance-matrix CSV: a header of `n` point labels (optionally
/// preceded by a corner cell), then one row per point holding its label and
/// `n` distances. Row labels must follow the header order.
pub fn read_distance_csv(text: &str) -> Result<MetricSpace> {
    let rows = records(text)?;
    let Some(((hline, header), body)) = rows.split_first() else {
        return Err(parse_err(1, 1, "empty distance matrix"));
    };
    let n = body.len();
    let labels: Vec<String> = match header.len() {
        l if l == n => header.clone(),
        l if l == n + 1 => header[1..].to_vec(),
        l => {
            return Err(parse_err(
                *hline,
                1,
                format!("header has {l} cells but there are {n} data rows"),
            ))
        }
    };
    let mut matrix = Vec::with_capacity(n);
    for (i, (line, row)) in body.iter().enumerate() {
        if row.len() != n + 1 {
            return Err(parse_err(
                *line,
                row.len().min(n + 1) + 1,
                format!("expected a label and {n} distances, found {} cells", row.len()),
            ));
        }
        if row[0] != labels[i] {
            return Err(parse_err(
                *line,
                1,
                format!("row label `{}` does not match header label `{}`", row[0], labels[i]),
            ));
        }
        let values = row[1..]
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                parse_distance(cell).ok_or_else(|| parse_err(*line, j + 2, format!("`{cell}` is not a distance")))
            })
            .collect::<Result<Vec<f64>>>()?;
        matrix.push(values);
    }
    MetricSpace::new(labels, matrix)
}

/// A point-cloud CSV: each row is a label followed by coordinates. A first
/// row whose coordinates are not numbers is taken as a header.
pub fn read_point_cloud_csv(text: &str, norm: Norm) -> Result<MetricSpace> {
    let mut rows = records(text)?;
    if let Some((_, first)) = rows.first() {
        if first.len() > 1 && first[1..].iter().any(|c| parse_distance(c).is_none()) {
            rows.remove(0);
        }
    }
    let dim = rows.first().map_or(0, |(_, r)| r.len().saturating_sub(1));
    let mut labels = Vec::with_capacity(rows.len());
    let mut coords = Vec::with_capacity(rows.len());
    for (line, row) in &rows {
        if row.len() != dim + 1 {
            return Err(parse_err(
                *line,
                row.len().min(dim + 1) + 1,
                format!("expected a label and {dim} coordinates, found {} cells", row.len()),
            ));
        }
        let xs = row[1..]
            .iter()
            .enumerate()
            .map(|(j, cell)| match parse_distance(cell) {
                Some(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(*line, j + 2, format!("`{cell}` is not a finite coordinate"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        labels.push(row[0].clone());
        coords.push(xs);
    }
    MetricSpace::from_points(labels, &coords, norm)
}

/// Reads a space from a file: a point cloud when `norm` is given, a
/// distance matrix otherwise.
pub fn read_space(path: &Path, norm: Option<Norm>) -> Result<MetricSpace> {
    let text = std::fs::read_to_string(path)?;
    match norm {
        Some(norm) => read_point_cloud_csv(&text, norm),
        None => read_distance_csv(&text),
    }
}

/// A scale: a nonnegative number or `inf`.
pub fn parse_scale(s: &str) -> Result<f64> {
    match parse_distance(s) {
        Some(r) if r >= 0.0 => Ok(r),
        _ => Err(Error::domain(format!("`{s}` is not a scale in [0, inf]"))),
    }
}

/// An r grid: `start:step:stop` (inclusive of `stop` up to rounding) or a
/// comma-separated list. The result must be sorted.
pub fn parse_r_grid(s: &str) -> Result<Vec<f64>> {
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, step, b] = parts[..] else {
            return Err(Error::domain(format!("`{s}` is not of the form start:step:stop")));
        };
        let (a, step, b) = (parse_scale(a)?, parse_scale(step)?, parse_scale(b)?);
        if !(step > 0.0 && step.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!("`{s}` needs finite bounds and a positive step")));
        }
        let n = ((b - a) / step + 1e-9).floor();
        if n < 0.0 {
            return Err(Error::domain(format!("`{s}` is empty")));
        }
        (0..=n as usize).map(|k| a + k as f64 * step).collect()
    } else {
        s.split(',').map(|c| parse_scale(c.trim())).collect::<Result<Vec<f64>>>()?
    };
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain(format!("r grid `{s}` is not sorted")));
    }
    Ok(grid)
}

/// Writes a distance matrix with a corner cell and `inf` for `+∞`.
pub fn write_distance_csv(space: &MetricSpace) -> String {
    let mut out = String::from("point");
    for l in space.labels() {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for i in 0..space.len() {
        out.push_str(space.label(i));
        for &d in space.row(i) {
            out.push(',');
            if d.is_infinite() {
                out.push_str("inf");
            } else {
                out.push_str(&d.to_string());
            }
        }
        out.push('\n');
    }
    out
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| parse_err(e.line() as u64, e.column(), e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub vertices: Vec<String>,
    pub maximal_faces: Vec<Vec<String>>,
}

impl ComplexJson {
    /// Maximal faces with labels sorted inside each face and faces sorted.
    pub fn from_complex(k: &SimplicialComplex) -> Self {
        ComplexJson {
            vertices: k.vertices().to_vec(),
            maximal_faces: k.canonical_faces().into_iter().collect(),
        }
    }

    pub fn to_complex(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::from_label_faces(self.vertices.clone(), &self.maximal_faces)
    }

    pub fn parse(text: &str) -> Result<Self> {
        from_json(text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub point: String,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    #[serde(default)]
    pub space: Option<String>,
    pub atoms: Vec<AtomJson>,
}

impl MeasureJson {
    pub fn parse(text: &str) -> Result<Self> {
        from_json(text)
    }

    pub fn from_measure(mu: &FiniteMeasure, space_name: Option<&str>) -> Self {
        MeasureJson {
            space: space_name.map(str::to_owned),
            atoms: mu
                .atoms()
                .iter()
                .map(|&(p, w)| AtomJson {
                    point: mu.space().label(p).to_owned(),
                    weight: w,
                })
                .collect(),
        }
    }

    /// Resolves point labels against `space`. The `space` name in the file
    /// is informational; a mismatch with `expected_name` is only logged.
    pub fn to_measure(&self, space: &Arc<MetricSpace>, expected_name: Option<&str>) -> Result<FiniteMeasure> {
        if let (Some(have), Some(want)) = (self.space.as_deref(), expected_name) {
            if have != want {
                log::warn!("measure names space `{have}` but is read against `{want}`");
            }
        }
        let atoms: Vec<(&str, f64)> = self.atoms.iter().map(|a| (a.point.as_str(), a.weight)).collect();
        FiniteMeasure::from_labels(Arc::clone(space), &atoms)
    }
}

/// `+∞` becomes the string `"inf"`; finite values stay numbers.
pub fn extended_number(x: f64) -> serde_json::Value {
    if x.is_infinite() {
        serde_json::Value::from("inf")
    } else {
        serde_json::Value::from(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanEntry {
    pub from: String,
    pub to: String,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportJson {
    pub distance: serde_json::Value,
    pub p: f64,
    pub plan: Option<Vec<PlanEntry>>,
}

impl TransportJson {
    pub fn new(t: &Transport, p: f64) -> Self {
        TransportJson {
            distance: extended_number(t.distance),
            p,
            plan: t.plan.as_ref().map(|plan| {
                plan.entries()
                    .into_iter()
                    .map(|(from, to, mass)| PlanEntry {
                        from: from.to_owned(),
                        to: to.to_owned(),
                        mass,
                    })
                    .collect()
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let sha256 = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        Ok(FileDigest {
            path: path.display().to_string(),
            sha256,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inputs {
    pub files: Vec<FileDigest>,
    pub flags: BTreeMap<String, String>,
}

/// The envelope every command prints. `pass` is present only for
/// verification commands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Inputs,
    pub results: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    pub timing: f64,
}
