//! Summary and trace files.
//!
//! Reals are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly. Missing values are an empty CSV field or a
//! JSON `null`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use super::{SummaryFormat, SummaryRow};
use crate::adapt::RunTrace;
use crate::error::{Error, Result};

fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io { path: path.to_path_buf(), source },
            _ => unreachable!(),
        }
    } else {
        Error::Parse { path: path.to_path_buf(), reason: e.to_string() }
    }
}

/// `mu,seed,iterations,mse,w_final_0..,final_squared_error,conv_iter_0..,conv_combined,accuracy_pct,elapsed_s,diverged`
pub fn summary_header(taps: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["mu", "seed", "iterations", "mse"].map(String::from).to_vec();
    cols.extend((0..taps).map(|i| format!("w_final_{i}")));
    cols.push("final_squared_error".into());
    cols.extend((0..taps).map(|i| format!("conv_iter_{i}")));
    cols.extend(["conv_combined", "accuracy_pct", "elapsed_s", "diverged"].map(String::from));
    cols
}

fn common_taps(rows: &[SummaryRow]) -> Result<usize> {
    let first = rows.first().ok_or_else(|| Error::invalid("no summary rows to write"))?;
    let taps = first.final_weights.len();
    if rows
        .iter()
        .any(|r| r.final_weights.len() != taps || r.per_coefficient_convergence.len() != taps)
    {
        return Err(Error::invalid("summary rows disagree on tap count"));
    }
    Ok(taps)
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let taps = common_taps(rows)?;
    let mut w = csv::Writer::from_writer(out);
    let label = Path::new("<summary>");
    w.write_record(summary_header(taps)).map_err(|e| csv_err(label, e))?;
    for r in rows {
        let mut rec = vec![fmt_real(r.mu), r.seed.to_string(), r.iterations.to_string(), fmt_real(r.mse)];
        rec.extend(r.final_weights.iter().map(|v| fmt_real(*v)));
        rec.push(fmt_real(r.final_squared_error));
        rec.extend(r.per_coefficient_convergence.iter().map(|v| fmt_opt(*v)));
        rec.push(fmt_opt(r.combined_convergence));
        rec.push(r.accuracy_percent.map(fmt_real).unwrap_or_default());
        rec.push(fmt_real(r.elapsed_seconds));
        rec.push(r.diverged.to_string());
        w.write_record(&rec).map_err(|e| csv_err(label, e))?;
    }
    w.flush().map_err(io_err(label))?;
    Ok(())
}

fn json_real(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(Number::from_str(&fmt_real(v)).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn json_opt_int(v: Option<usize>) -> Value {
    v.map(|v| Value::from(v as u64)).unwrap_or(Value::Null)
}

pub fn write_summary_json<W: Write>(rows: &[SummaryRow], mut out: W) -> Result<()> {
    common_taps(rows)?;
    let arr: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("mu".into(), json_real(r.mu));
            m.insert("seed".into(), Value::from(r.seed));
            m.insert("iterations".into(), Value::from(r.iterations as u64));
            m.insert("mse".into(), json_real(r.mse));
            m.insert("w_final".into(), Value::Array(r.final_weights.iter().map(|v| json_real(*v)).collect()));
            m.insert("final_squared_error".into(), json_real(r.final_squared_error));
            m.insert(
                "conv_iter".into(),
                Value::Array(r.per_coefficient_convergence.iter().map(|v| json_opt_int(*v)).collect()),
            );
            m.insert("conv_combined".into(), json_opt_int(r.combined_convergence));
            m.insert("accuracy_pct".into(), r.accuracy_percent.map(json_real).unwrap_or(Value::Null));
            m.insert("elapsed_s".into(), json_real(r.elapsed_seconds));
            m.insert("diverged".into(), Value::Bool(r.diverged));
            Value::Object(m)
        })
        .collect();
    let label = Path::new("<summary>");
    serde_json::to_writer_pretty(&mut out, &Value::Array(arr))
        .map_err(|e| Error::Io { path: label.into(), source: e.into() })?;
    out.write_all(b"\n").map_err(io_err(label))?;
    Ok(())
}

/// Writes the summary to `path` in the chosen format.
pub fn emit_summary(rows: &[SummaryRow], format: SummaryFormat, path: &Path) -> Result<()> {
    common_taps(rows)?;
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    let res = match format {
        SummaryFormat::Csv => write_summary_csv(rows, &mut out),
        SummaryFormat::Json => write_summary_json(rows, &mut out),
    };
    res.map_err(|e| relabel(e, path))?;
    out.flush().map_err(io_err(path))
}

fn relabel(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::Io { path: path.to_path_buf(), source },
        other => other,
    }
}

/// `n,y,e,squared_error,w_0..w_{N-1}`, one row per sample; row `n` holds the
/// weight in effect before update `n`.
pub fn write_trace_csv<W: Write>(trace: &RunTrace, out: W) -> Result<()> {
    let label = Path::new("<trace>");
    let taps = trace.weight_history.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["n", "y", "e", "squared_error"].map(String::from).to_vec();
    header.extend((0..taps).map(|i| format!("w_{i}")));
    w.write_record(&header).map_err(|e| csv_err(label, e))?;
    for n in 0..trace.len() {
        let mut rec = vec![
            n.to_string(),
            fmt_real(trace.y[n]),
            fmt_real(trace.e[n]),
            fmt_real(trace.squared_error[n]),
        ];
        rec.extend(trace.weight_history[n].iter().map(|v| fmt_real(*v)));
        w.write_record(&rec).map_err(|e| csv_err(label, e))?;
    }
    w.flush().map_err(io_err(label))?;
    Ok(())
}

pub fn emit_trace(trace: &RunTrace, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    write_trace_csv(trace, &mut out).map_err(|e| relabel(e, path))?;
    out.flush().map_err(io_err(path))
}

/// Columns of a trace file as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub n: Vec<usize>,
    pub y: Vec<f64>,
    pub e: Vec<f64>,
    pub squared_error: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
}

struct Fields<'a> {
    path: &'a Path,
    record: csv::StringRecord,
    line: usize,
}

impl Fields<'_> {
    fn raw(&self, i: usize) -> Result<&str> {
        self.record.get(i).ok_or_else(|| self.fail(format!("missing column {i}")))
    }

    fn fail(&self, reason: String) -> Error {
        Error::Parse { path: self.path.to_path_buf(), reason: format!("record {}: {reason}", self.line) }
    }

    fn parse<T: FromStr>(&self, i: usize) -> Result<T> {
        let s = self.raw(i)?;
        s.parse().map_err(|_| self.fail(format!("cannot parse {s:?}")))
    }

    fn parse_opt<T: FromStr>(&self, i: usize) -> Result<Option<T>> {
        if self.raw(i)?.is_empty() {
            Ok(None)
        } else {
            self.parse(i).map(Some)
        }
    }
}

fn open_csv(path: &Path) -> Result<(csv::Reader<File>, Vec<String>)> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut rdr = csv::Reader::from_reader(file);
    let header = rdr.headers().map_err(|e| csv_err(path, e))?.iter().map(String::from).collect();
    Ok((rdr, header))
}

fn records(path: &Path, rdr: csv::Reader<File>) -> impl Iterator<Item = Result<Fields<'_>>> {
    rdr.into_records().enumerate().map(move |(line, rec)| {
        rec.map(|record| Fields { path, record, line: line + 1 }).map_err(|e| csv_err(path, e))
    })
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    let (rdr, header) = open_csv(path)?;
    if header.len() < 9 || (header.len() - 9) % 2 != 0 {
        return Err(Error::Parse { path: path.into(), reason: format!("{} columns", header.len()) });
    }
    let taps = (header.len() - 9) / 2;
    if header != summary_header(taps) {
        return Err(Error::Parse { path: path.into(), reason: "unexpected header".into() });
    }
    let mut rows = Vec::new();
    for f in records(path, rdr) {
        let f = f?;
        let wf = 4;
        let conv = wf + taps + 1;
        let tail = conv + taps;
        rows.push(SummaryRow {
            mu: f.parse(0)?,
            seed: f.parse(1)?,
            iterations: f.parse(2)?,
            mse: f.parse(3)?,
            final_weights: (wf..wf + taps).map(|i| f.parse(i)).collect::<Result<_>>()?,
            final_squared_error: f.parse(wf + taps)?,
            per_coefficient_convergence: (conv..conv + taps).map(|i| f.parse_opt(i)).collect::<Result<_>>()?,
            combined_convergence: f.parse_opt(tail)?,
            accuracy_percent: f.parse_opt(tail + 1)?,
            elapsed_seconds: f.parse(tail + 2)?,
            diverged: f.parse(tail + 3)?,
        });
    }
    Ok(rows)
}

pub fn read_summary_json(path: &Path) -> Result<Vec<SummaryRow>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let bad = |reason: &str| Error::Parse { path: PathBuf::from(path), reason: reason.to_string() };
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    let arr = value.as_array().ok_or_else(|| bad("expected an array"))?;
    let real = |v: &Value, key: &str| v.get(key).and_then(Value::as_f64).ok_or_else(|| bad(key));
    let int = |v: &Value, key: &str| v.get(key).and_then(Value::as_u64).ok_or_else(|| bad(key));
    let opt_int = |v: &Value| -> Result<Option<usize>> {
        match v {
            Value::Null => Ok(None),
            other => other.as_u64().map(|n| Some(n as usize)).ok_or_else(|| bad("iteration")),
        }
    };
    arr.iter()
        .map(|r| {
            let weights = r.get("w_final").and_then(Value::as_array).ok_or_else(|| bad("w_final"))?;
            let conv = r.get("conv_iter").and_then(Value::as_array).ok_or_else(|| bad("conv_iter"))?;
            Ok(SummaryRow {
                mu: real(r, "mu")?,
                seed: int(r, "seed")?,
                iterations: int(r, "iterations")? as usize,
                mse: real(r, "mse")?,
                final_weights: weights
                    .iter()
                    .map(|v| v.as_f64().ok_or_else(|| bad("w_final")))
                    .collect::<Result<_>>()?,
                final_squared_error: real(r, "final_squared_error")?,
                per_coefficient_convergence: conv.iter().map(opt_int).collect::<Result<_>>()?,
                combined_convergence: opt_int(r.get("conv_combined").ok_or_else(|| bad("conv_combined"))?)?,
                accuracy_percent: match r.get("accuracy_pct") {
                    Some(Value::Null) => None,
                    _ => Some(real(r, "accuracy_pct")?),
                },
                elapsed_seconds: real(r, "elapsed_s")?,
                diverged: r.get("diverged").and_then(Value::as_bool).ok_or_else(|| bad("diverged"))?,
            })
        })
        .collect()
}

pub fn read_trace_csv(path: &Path) -> Result<TraceTable> {
    let (rdr, header) = open_csv(path)?;
    if header.len() < 4 || header[..4] != ["n", "y", "e", "squared_error"] {
        return Err(Error::Parse { path: path.into(), reason: "unexpected header".into() });
    }
    let taps = header.len() - 4;
    let mut t = TraceTable { n: vec![], y: vec![], e: vec![], squared_error: vec![], weights: vec![] };
    for f in records(path, rdr) {
        let f = f?;
        t.n.push(f.parse(0)?);
        t.y.push(f.parse(1)?);
        t.e.push(f.parse(2)?);
        t.squared_error.push(f.parse(3)?);
        t.weights.push((4..4 + taps).map(|i| f.parse(i)).collect::<Result<_>>()?);
    }
    Ok(t)
}
