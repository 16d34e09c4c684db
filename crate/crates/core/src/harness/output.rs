//! CSV and JSON-lines output.

use std::io::Write;

use super::{HarnessError, MetricSummary, ResultRow};

/// Column order of the CSV output: spec fields, then metrics.
pub const CSV_HEADER: [&str; 18] = [
    "name",
    "tree",
    "q",
    "model",
    "algo",
    "trials",
    "seed",
    "nodes",
    "depth",
    "moves_mean",
    "moves_stderr",
    "moves_median",
    "moves_p95",
    "queries_mean",
    "queries_stderr",
    "queries_median",
    "queries_p95",
    "censored",
];

fn metric_fields(m: &Option<MetricSummary>) -> [String; 4] {
    match m {
        Some(m) => [m.mean, m.stderr, m.median, m.p95].map(|x| x.to_string()),
        None => Default::default(),
    }
}

/// Writes a header and one record per row. Wall time is left out so that
/// reruns produce identical files.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let mut rec = vec![
            r.name.clone(),
            r.tree.clone(),
            r.q.clone(),
            r.model.clone(),
            r.algo.clone(),
            r.trials.to_string(),
            r.seed.to_string(),
            r.nodes.to_string(),
            r.depth.to_string(),
        ];
        rec.extend(metric_fields(&r.moves));
        rec.extend(metric_fields(&r.queries));
        rec.push(r.censored.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per row and line.
pub fn write_jsonl<W: Write>(rows: &[ResultRow], mut out: W) -> Result<(), HarnessError> {
    for r in rows {
        let line = serde_json::to_string(r).map_err(|e| HarnessError::Invalid(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::Algorithm;
    use crate::harness::{run, ExperimentSpec, TreeSpec};

    #[test]
    fn csv_layout() {
        let spec = ExperimentSpec::new(TreeSpec::complete(2, 2, 3), Algorithm::Loop).trials(4).name("x");
        let row = run(&spec).unwrap();
        let mut buf = Vec::new();
        write_csv(&[row.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "x,\"complete:b=2,d=3,root=2,td=3\",0,random,a_loop,4,0,15,3,,,,,4,0,4,4,0"
        );
        let mut buf = Vec::new();
        write_jsonl(&[row], &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["queries"]["mean"], 4.0);
        assert!(v["moves"].is_null());
    }
}
