//! CSV writers for experiment outputs. Headers are fixed.

use std::io::Write;

use crate::error::Result;
use crate::runlength::{RunLengthSummary, TraceRow};

use super::table1::Table1Cell;

pub const TABLE1_HEADER: [&str; 8] = ["rho", "delta_x", "chart", "lambda", "L", "arl", "se", "paper_arl"];
pub const TRACE_HEADER: [&str; 9] = ["t", "zbar_x", "zbar_y", "z", "w", "lcl", "ucl", "signal", "regime"];
pub const SCATTER_HEADER: [&str; 4] = ["t", "x_bar", "y_bar", "regime"];
pub const SUMMARY_HEADER: [&str; 11] =
    ["arl", "sdrl", "se_arl", "reps", "p5", "p25", "p50", "p75", "p95", "censored", "censored_fraction"];

fn regime(row: &TraceRow) -> &'static str {
    if row.out_of_control {
        "out-of-control"
    } else {
        "in-control"
    }
}

pub fn write_table1<W: Write>(out: W, cells: &[Table1Cell]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE1_HEADER)?;
    for c in cells {
        w.write_record([
            format!("{:.2}", c.rho),
            format!("{:.2}", c.delta_x),
            c.column.kind.to_string(),
            format!("{:.2}", c.column.lambda),
            format!("{:.3}", c.column.limit_multiplier),
            format!("{:.4}", c.summary.arl),
            format!("{:.4}", c.summary.se_arl),
            format!("{:.1}", c.reference_arl),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace<W: Write>(out: W, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            format!("{:.6}", r.x_bar),
            format!("{:.6}", r.y_bar),
            format!("{:.6}", r.z),
            format!("{:.6}", r.w),
            format!("{:.6}", r.lcl),
            format!("{:.6}", r.ucl),
            (r.signal as u8).to_string(),
            regime(r).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scatter<W: Write>(out: W, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCATTER_HEADER)?;
    for r in rows {
        w.write_record([r.t.to_string(), format!("{:.6}", r.x_bar), format!("{:.6}", r.y_bar), regime(r).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, s: &RunLengthSummary) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    let p = &s.percentiles;
    w.write_record([
        format!("{:.6}", s.arl),
        format!("{:.6}", s.sdrl),
        format!("{:.6}", s.se_arl),
        s.reps.to_string(),
        format!("{}", p.p5),
        format!("{}", p.p25),
        format!("{}", p.p50),
        format!("{}", p.p75),
        format!("{}", p.p95),
        s.censored.to_string(),
        format!("{:.6}", s.censored_fraction()),
    ])?;
    w.flush()?;
    Ok(())
}

/// One JSON object per line.
pub fn write_summary_jsonl<W: Write>(mut out: W, s: &RunLengthSummary) -> Result<()> {
    let line = serde_json::to_string(s).map_err(|e| crate::error::Error::Io(e.to_string()))?;
    writeln!(out, "{line}")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runlength::{summarize, RunLength};

    #[test]
    fn headers_are_exact() {
        let mut buf = Vec::new();
        write_table1(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "rho,delta_x,chart,lambda,L,arl,se,paper_arl\n");
        let mut buf = Vec::new();
        write_trace(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,zbar_x,zbar_y,z,w,lcl,ucl,signal,regime\n");
        let mut buf = Vec::new();
        write_scatter(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,x_bar,y_bar,regime\n");
    }

    #[test]
    fn trace_row_format() {
        let row = TraceRow {
            t: 26,
            x_bar: 1.0,
            y_bar: -0.5,
            z: 0.25,
            w: 0.125,
            lcl: -0.4876,
            ucl: 0.4876,
            signal: false,
            out_of_control: true,
        };
        let mut buf = Vec::new();
        write_trace(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "26,1.000000,-0.500000,0.250000,0.125000,-0.487600,0.487600,0,out-of-control"
        );
    }

    #[test]
    fn summary_outputs() {
        let s = summarize(&[RunLength { length: 2, censored: false }, RunLength { length: 4, censored: false }]);
        let mut buf = Vec::new();
        write_summary_jsonl(&mut buf, &s).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["arl"], 3.0);
        assert_eq!(v["percentiles"]["p50"], 3.0);
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &s).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("arl,sdrl,se_arl,reps,"));
    }
}
