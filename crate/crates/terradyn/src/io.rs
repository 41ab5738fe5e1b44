//! File formats: telemetry and calibration CSV, simulation traces and the
//! calibration model JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use terradyn_core::calibration::{CHANNELS, FEATURES};
use terradyn_core::telemetry;
use terradyn_core::{CalibrationModel, CalibrationSample, ForceTrace, TelemetryRecord};

use crate::error::{Error, Result};

pub const TELEMETRY_HEADER: [&str; 7] = ["t_s", "fx_n", "fy_n", "fz_n", "leg_left_rad", "leg_right_rad", "power_w"];
pub const TRACE_HEADER: [&str; 4] = ["x_m", "t_s", "f_drag_n", "contact_count"];
pub const BEAM_HEADER: [&str; 7] = ["x_m", "beam_index", "phi_rad", "delta_theta_rad", "fx_n", "fy_n", "saturated"];
pub const DATASET_HEADER: [&str; 11] = ["s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "fx_n", "fy_n", "fz_n"];

/// Shortest text that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(contents).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::parse(path, line, e.to_string())
}

/// Parse a numeric CSV with a fixed header into rows of `N` finite values.
fn parse_rows<R: Read, const N: usize>(r: R, path: &Path, header: &[&str; N]) -> Result<Vec<(u64, [f64; N])>> {
    let mut rdr = reader(r);
    let mut records = rdr.records();
    let first = match records.next() {
        None => return Err(Error::parse(path, 1, format!("missing header `{}`", header.join(",")))),
        Some(rec) => rec.map_err(|e| csv_error(path, e))?,
    };
    if first.len() != N || first.iter().zip(header).any(|(a, b)| a != *b) {
        return Err(Error::parse(
            path,
            1,
            format!("expected header `{}`, found `{}`", header.join(","), first.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != N {
            return Err(Error::parse(path, line, format!("expected {N} fields, found {}", rec.len())));
        }
        let mut row = [0.0; N];
        for (k, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(path, line, format!("column `{}`: `{field}` is not a number", header[k])))?;
            if !v.is_finite() {
                return Err(Error::parse(path, line, format!("column `{}`: `{field}` is not finite", header[k])));
            }
            row[k] = v;
        }
        rows.push((line, row));
    }
    Ok(rows)
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn flush<W: Write>(mut w: csv::Writer<W>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_write_error(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

pub fn parse_telemetry<R: Read>(r: R, path: &Path) -> Result<Vec<TelemetryRecord>> {
    let rows = parse_rows(r, path, &TELEMETRY_HEADER)?;
    let mut out: Vec<TelemetryRecord> = Vec::with_capacity(rows.len());
    for (line, v) in rows {
        if let Some(prev) = out.last() {
            if v[0] < prev.t {
                return Err(Error::parse(path, line, format!("time {} precedes previous time {}", v[0], prev.t)));
            }
        }
        out.push(TelemetryRecord::from_values(v));
    }
    Ok(out)
}

pub fn read_telemetry(path: &Path) -> Result<Vec<TelemetryRecord>> {
    parse_telemetry(open(path)?, path)
}

pub fn write_telemetry<W: Write>(w: W, records: &[TelemetryRecord], path: &Path) -> Result<()> {
    telemetry::validate(records).map_err(|source| Error::Telemetry { path: path.to_path_buf(), source })?;
    let mut w = writer(w);
    w.write_record(TELEMETRY_HEADER).map_err(|e| csv_write_error(path, e))?;
    for r in records {
        w.write_record(r.values().map(fmt_f64)).map_err(|e| csv_write_error(path, e))?;
    }
    flush(w, path)
}

pub fn write_trace<W: Write>(w: W, trace: &ForceTrace, path: &Path) -> Result<()> {
    let mut w = writer(w);
    w.write_record(TRACE_HEADER).map_err(|e| csv_write_error(path, e))?;
    for s in &trace.samples {
        w.write_record([fmt_f64(s.x_r), fmt_f64(s.t), fmt_f64(s.f_drag), s.contact_count.to_string()])
            .map_err(|e| csv_write_error(path, e))?;
    }
    flush(w, path)
}

/// Long format: one row per contacting beam per sweep position.
pub fn write_beams<W: Write>(w: W, trace: &ForceTrace, path: &Path) -> Result<()> {
    let mut w = writer(w);
    w.write_record(BEAM_HEADER).map_err(|e| csv_write_error(path, e))?;
    for s in &trace.samples {
        for c in &s.contacts {
            w.write_record([
                fmt_f64(s.x_r),
                c.beam_index.to_string(),
                fmt_f64(c.phi),
                fmt_f64(c.delta_theta),
                fmt_f64(c.force.x),
                fmt_f64(c.force.y),
                u8::from(c.saturated).to_string(),
            ])
            .map_err(|e| csv_write_error(path, e))?;
        }
    }
    flush(w, path)
}

pub fn parse_dataset<R: Read>(r: R, path: &Path) -> Result<Vec<CalibrationSample>> {
    Ok(parse_rows(r, path, &DATASET_HEADER)?
        .into_iter()
        .map(|(_, v)| {
            let mut readings = [0.0; CHANNELS];
            readings.copy_from_slice(&v[..CHANNELS]);
            CalibrationSample { readings, force: [v[8], v[9], v[10]] }
        })
        .collect())
}

pub fn read_dataset(path: &Path) -> Result<Vec<CalibrationSample>> {
    parse_dataset(open(path)?, path)
}

pub fn write_dataset<W: Write>(w: W, data: &[CalibrationSample], path: &Path) -> Result<()> {
    let mut w = writer(w);
    w.write_record(DATASET_HEADER).map_err(|e| csv_write_error(path, e))?;
    for s in data {
        let row: Vec<String> = s.readings.iter().chain(&s.force).map(|&v| fmt_f64(v)).collect();
        w.write_record(&row).map_err(|e| csv_write_error(path, e))?;
    }
    flush(w, path)
}

/// Calibration model file; `c` holds the 3 x 9 matrix row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub c: Vec<f64>,
    pub rms: [f64; 3],
    pub n_train: usize,
}

impl From<&CalibrationModel> for ModelFile {
    fn from(m: &CalibrationModel) -> Self {
        Self { c: m.c.iter().flatten().copied().collect(), rms: m.rms, n_train: m.n_train }
    }
}

impl ModelFile {
    pub fn to_model(&self, path: &Path) -> Result<CalibrationModel> {
        if self.c.len() != 3 * FEATURES {
            return Err(Error::parse(path, 0, format!("`c` must hold {} values, found {}", 3 * FEATURES, self.c.len())));
        }
        let mut model = CalibrationModel::zero();
        for (k, row) in model.c.iter_mut().enumerate() {
            row.copy_from_slice(&self.c[k * FEATURES..(k + 1) * FEATURES]);
        }
        model.rms = self.rms;
        model.n_train = self.n_train;
        Ok(model)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable report");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: &str = "t.csv";

    #[test]
    fn header_only_is_empty() {
        let text = TELEMETRY_HEADER.join(",") + "\n";
        assert!(parse_telemetry(text.as_bytes(), Path::new(P)).unwrap().is_empty());
    }

    #[test]
    fn missing_or_wrong_header() {
        let err = parse_telemetry("".as_bytes(), Path::new(P)).unwrap_err();
        assert!(err.to_string().contains("missing header"), "{err}");
        let err = parse_telemetry("0,1,2,3,4,5,6\n".as_bytes(), Path::new(P)).unwrap_err();
        assert!(err.to_string().starts_with("t.csv:1:"), "{err}");
    }

    #[test]
    fn bad_rows_report_line_numbers() {
        let h = TELEMETRY_HEADER.join(",");
        let err = parse_telemetry(format!("{h}\n0,0,0,0,0,0,1\n0.1,x,0,0,0,0,1\n").as_bytes(), Path::new(P)).unwrap_err();
        assert!(err.to_string().starts_with("t.csv:3:") && err.to_string().contains("fx_n"), "{err}");
        let err = parse_telemetry(format!("{h}\n0,NaN,0,0,0,0,1\n").as_bytes(), Path::new(P)).unwrap_err();
        assert!(err.to_string().contains("not finite"), "{err}");
        let err = parse_telemetry(format!("{h}\n0.2,0,0,0,0,0,1\n0.1,0,0,0,0,0,1\n").as_bytes(), Path::new(P)).unwrap_err();
        assert!(err.to_string().starts_with("t.csv:3:") && err.to_string().contains("precedes"), "{err}");
    }

    #[test]
    fn float_text_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0, 123456.789] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn model_file_layout_is_row_major() {
        let mut m = CalibrationModel::zero();
        m.c[1][0] = 7.0;
        let f = ModelFile::from(&m);
        assert_eq!(f.c[FEATURES], 7.0);
        assert_eq!(f.to_model(Path::new("m.json")).unwrap(), m);
    }
}
