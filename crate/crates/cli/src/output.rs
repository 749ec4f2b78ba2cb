//! Output formats: time-series CSV, snapshot JSON, and the cross-integrator
//! comparison CSV. Floats are written with 17 significant digits.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SERIES_COLUMNS: [&str; 16] = [
    "t",
    "T_str",
    "T_rb",
    "V_elastic",
    "V_grav",
    "E_total",
    "pi3",
    "orth_err",
    "stretched_len",
    "v_body_x",
    "v_body_y",
    "v_body_z",
    "omega_x",
    "omega_y",
    "omega_z",
    "fp_iters",
];

pub const SERIES_COMMENT: &str = "# gravity acts along +e3; positions in m, energies in J, pi3 in kg m^2/s";

pub const COMPARE_COLUMNS: [&str; 4] = ["t", "max_node_gap", "body_node_gap", "attitude_gap"];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Shape(String),
}

/// One row of the time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    #[serde(rename = "T_str")]
    pub t_str: f64,
    #[serde(rename = "T_rb")]
    pub t_rb: f64,
    #[serde(rename = "V_elastic")]
    pub v_elastic: f64,
    #[serde(rename = "V_grav")]
    pub v_grav: f64,
    #[serde(rename = "E_total")]
    pub e_total: f64,
    pub pi3: f64,
    pub orth_err: f64,
    pub stretched_len: f64,
    pub v_body_x: f64,
    pub v_body_y: f64,
    pub v_body_z: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub omega_z: f64,
    pub fp_iters: u32,
}

impl SeriesRow {
    fn fields(&self) -> Vec<String> {
        let mut out: Vec<String> = [
            self.t,
            self.t_str,
            self.t_rb,
            self.v_elastic,
            self.v_grav,
            self.e_total,
            self.pi3,
            self.orth_err,
            self.stretched_len,
            self.v_body_x,
            self.v_body_y,
            self.v_body_z,
            self.omega_x,
            self.omega_y,
            self.omega_z,
        ]
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect();
        out.push(self.fp_iters.to_string());
        out
    }
}

pub struct SeriesWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> SeriesWriter<W> {
    pub fn new(mut sink: W) -> Result<Self, FormatError> {
        writeln!(sink, "{SERIES_COMMENT}")?;
        let mut inner = csv::Writer::from_writer(sink);
        inner.write_record(SERIES_COLUMNS)?;
        Ok(SeriesWriter { inner })
    }

    pub fn write(&mut self, row: &SeriesRow) -> Result<(), FormatError> {
        self.inner.write_record(row.fields())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W, FormatError> {
        self.inner.flush()?;
        self.inner.into_inner().map_err(|e| FormatError::Io(e.into_error()))
    }
}

/// Reads a series file back. Comment lines are skipped; the header must
/// match [`SERIES_COLUMNS`] exactly.
pub fn read_series<R: Read>(source: R) -> Result<Vec<SeriesRow>, FormatError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(SERIES_COLUMNS) {
        return Err(FormatError::Shape(format!("unexpected series header {header:?}")));
    }
    reader.deserialize().map(|row| row.map_err(FormatError::from)).collect()
}

/// Full configuration at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub t: f64,
    pub nodes: Vec<[f64; 3]>,
    #[serde(rename = "R")]
    pub rotation: [[f64; 3]; 3],
    pub strain_energy: Vec<f64>,
}

impl Snapshot {
    pub fn to_json(&self) -> Result<String, FormatError> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Parses a snapshot and checks that `strain_energy` has one entry per
/// element.
pub fn parse_snapshot(text: &str) -> Result<Snapshot, FormatError> {
    let snap: Snapshot = serde_json::from_str(text)?;
    if snap.nodes.len() < 2 {
        return Err(FormatError::Shape("snapshot needs at least two nodes".into()));
    }
    if snap.strain_energy.len() + 1 != snap.nodes.len() {
        return Err(FormatError::Shape(format!(
            "{} strain entries for {} nodes",
            snap.strain_energy.len(),
            snap.nodes.len()
        )));
    }
    Ok(snap)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub max_node_gap: f64,
    pub body_node_gap: f64,
    pub attitude_gap: f64,
}

pub fn write_compare<W: Write>(sink: W, rows: &[CompareRow]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(COMPARE_COLUMNS)?;
    for r in rows {
        w.write_record([r.t, r.max_node_gap, r.body_node_gap, r.attitude_gap].map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}
