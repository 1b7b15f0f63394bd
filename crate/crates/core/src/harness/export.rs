//! CSV output for traces and constant reports. Floats use Rust's shortest
//! round-trip formatting, so identical runs produce identical bytes.

use std::io::Write;

use crate::constants::{ConstantEstimates, CONSTANT_NAMES};
use crate::error::Result;
use crate::trace::RunTrace;

pub const TRACE_COLUMNS: [&str; 8] = ["k", "f_value", "h_k", "gap", "step_type", "gamma", "gamma_max", "active_size"];

/// One row per iterate; the terminal row has step type `none`.
pub fn write_trace_csv<W: Write>(trace: &RunTrace, fstar: f64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for r in &trace.records {
        w.write_record([
            r.k.to_string(),
            r.f_value.to_string(),
            (r.f_value - fstar).to_string(),
            r.gap.to_string(),
            r.step_type.map_or("none", |s| s.as_str()).to_string(),
            r.gamma.to_string(),
            r.gamma_max.to_string(),
            r.active_size.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_csv_string(trace: &RunTrace, fstar: f64) -> Result<String> {
    let mut buf = Vec::new();
    write_trace_csv(trace, fstar, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Header plus a single row; the last column holds `name=provenance` flags.
pub fn write_constants_csv<W: Write>(est: &ConstantEstimates, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = CONSTANT_NAMES.to_vec();
    header.push("provenance");
    w.write_record(&header)?;
    let mut row: Vec<String> = est.values().iter().map(|v| v.to_string()).collect();
    row.push(est.provenance_flags());
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}
