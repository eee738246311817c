use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::{Error, Result};

#[derive(Serialize)]
struct PlotRow {
    x: f64,
    series: String,
    value: f64,
}

/// Converts a results CSV into long-format (x, series, value) rows and returns the
/// number of data rows written. The layout is picked from the header:
/// distance / guess_prob against rε with the bound as a second series, rank
/// against gate count, entropy against r, and the two-rank comparisons.
pub fn emit_plot_data(results: &Path, out: &Path) -> Result<usize> {
    let text = std::fs::read_to_string(results)?;
    let mut rows: Vec<PlotRow> = Vec::new();
    if !text.trim().is_empty() {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header = rdr.headers()?.clone();
        let has = |c: &str| header.iter().any(|h| h == c);
        let records: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;
        let col = |name: &str| -> Result<usize> {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Config(format!("results CSV lacks column {name:?}")))
        };
        let num = |rec: &csv::StringRecord, i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("non-numeric value in column {}", &header[i])))
        };
        if has("distance") || has("guess_prob") {
            let metric = if has("distance") { "distance" } else { "guess_prob" };
            let (m, b, r, e) = (col(metric)?, col("bound")?, col("r")?, col("epsilon")?);
            for rec in &records {
                let x = num(rec, r)? * num(rec, e)?;
                rows.push(PlotRow { x, series: metric.into(), value: num(rec, m)? });
                rows.push(PlotRow { x, series: "bound".into(), value: num(rec, b)? });
            }
        } else if has("rank") {
            let (slots, rank, arch) = (col("R")?, col("rank")?, col("arch_id")?);
            let mut best: BTreeMap<(u64, String), f64> = BTreeMap::new();
            for rec in &records {
                let key = (num(rec, slots)? as u64, rec[arch].to_string());
                let v = num(rec, rank)?;
                let e = best.entry(key).or_insert(v);
                *e = e.max(v);
            }
            rows.extend(best.into_iter().map(|((x, _), v)| PlotRow { x: x as f64, series: "rank".into(), value: v }));
        } else if has("complexity_entropy") {
            let (r, hc, seed) = (col("r")?, col("complexity_entropy")?, col("seed")?);
            for rec in &records {
                rows.push(PlotRow { x: num(rec, r)?, series: format!("seed-{}", &rec[seed]), value: num(rec, hc)? });
            }
        } else if has("short_rank") {
            let (t, te, s, l) = (col("layers")?, col("extended_layers")?, col("short_rank")?, col("long_rank")?);
            for rec in &records {
                rows.push(PlotRow { x: num(rec, t)?, series: "rank".into(), value: num(rec, s)? });
                rows.push(PlotRow { x: num(rec, te)?, series: "rank".into(), value: num(rec, l)? });
            }
        } else if has("upper_rank") {
            let (k, lo, up) = (col("k")?, col("lower_rank")?, col("upper_rank")?);
            for rec in &records {
                let k = num(rec, k)?;
                rows.push(PlotRow { x: k - 1.0, series: "rank".into(), value: num(rec, lo)? });
                rows.push(PlotRow { x: k, series: "rank".into(), value: num(rec, up)? });
            }
        } else {
            return Err(Error::Config(format!("no plot layout for columns {:?}", header.iter().collect::<Vec<_>>())));
        }
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(out)?;
    w.write_record(["x", "series", "value"])?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_results_give_empty_series() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("empty.csv");
        std::fs::write(&input, "seed,n,r,eta,epsilon,w,distance,bound,converse_cap,pass\n").unwrap();
        let out = dir.path().join("plot.csv");
        assert_eq!(emit_plot_data(&input, &out).unwrap(), 0);
        assert_eq!(std::fs::read_to_string(&out).unwrap(), "x,series,value\n");
    }

    #[test]
    fn rank_series_takes_max_per_gate_count() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("dim.csv");
        std::fs::write(
            &input,
            "seed,arch_id,n,R,point,rank,tol,saturated\n1,a,3,1,0,7,1e-8,false\n1,a,3,1,1,6,1e-8,false\n2,b,3,2,0,13,1e-8,false\n",
        )
        .unwrap();
        let out = dir.path().join("plot.csv");
        assert_eq!(emit_plot_data(&input, &out).unwrap(), 2);
        assert_eq!(std::fs::read_to_string(&out).unwrap(), "x,series,value\n1.0,rank,7.0\n2.0,rank,13.0\n");
    }

    #[test]
    fn missing_columns_error() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("bad.csv");
        std::fs::write(&input, "seed,distance\n1,0.1\n").unwrap();
        assert!(emit_plot_data(&input, &dir.path().join("p.csv")).is_err());
    }
}
