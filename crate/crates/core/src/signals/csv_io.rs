use std::path::Path;

use super::Trajectory;
use crate::{DpcError, Mat, Result};

/// One named block of columns in a trajectory CSV, e.g. `("u", &u)` → `u1, u2, u3`.
pub type CsvGroup<'a> = (&'a str, &'a Trajectory);

/// Writes `t_s` followed by each group's channels. All groups must share length and Ts.
pub fn write_csv(path: &Path, groups: &[CsvGroup<'_>]) -> Result<()> {
    let Some((_, first)) = groups.first() else {
        return Err(DpcError::Config("nothing to write".into()));
    };
    for (_, g) in groups {
        if g.len() != first.len() {
            return Err(DpcError::dim("csv group length", first.len(), g.len()));
        }
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| DpcError::parse(path, e))?;
    let mut header = vec!["t_s".to_string()];
    for (prefix, g) in groups {
        header.extend((1..=g.channels()).map(|i| format!("{prefix}{i}")));
    }
    w.write_record(&header).map_err(|e| DpcError::parse(path, e))?;
    let mut record = Vec::with_capacity(header.len());
    for t in 0..first.len() {
        record.clear();
        record.push(format!("{:.6}", first.time(t)));
        for (_, g) in groups {
            record.extend((0..g.channels()).map(|ch| format!("{}", g.get(ch, t))));
        }
        w.write_record(&record).map_err(|e| DpcError::parse(path, e))?;
    }
    w.flush().map_err(|e| DpcError::io(path, e))
}

/// Reads a trajectory CSV, returning one trajectory per requested prefix.
pub fn read_csv(path: &Path, prefixes: &[&str]) -> Result<Vec<Trajectory>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| DpcError::parse(path, e))?;
    let header = r.headers().map_err(|e| DpcError::parse(path, e))?.clone();
    if header.get(0) != Some("t_s") {
        return Err(DpcError::parse(path, "first column must be `t_s`"));
    }
    let mut columns: Vec<Vec<usize>> = Vec::new();
    for prefix in prefixes {
        let mut cols = Vec::new();
        for i in 1.. {
            let name = format!("{prefix}{i}");
            match header.iter().position(|h| h == name) {
                Some(c) => cols.push(c),
                None => break,
            }
        }
        if cols.is_empty() {
            return Err(DpcError::parse(path, format!("no `{prefix}1..` columns")));
        }
        columns.push(cols);
    }
    let mut times = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| DpcError::parse(path, e))?;
        let parse = |c: usize| -> Result<f64> {
            rec.get(c)
                .ok_or_else(|| DpcError::parse(path, "short record"))?
                .trim()
                .parse::<f64>()
                .map_err(|e| DpcError::parse(path, e))
        };
        times.push(parse(0)?);
        rows.push((0..header.len()).map(parse).collect::<Result<_>>()?);
    }
    if rows.is_empty() {
        return Err(DpcError::parse(path, "no data rows"));
    }
    let ts = if times.len() > 1 {
        times[1] - times[0]
    } else {
        super::DEFAULT_SAMPLE_PERIOD
    };
    columns
        .iter()
        .map(|cols| {
            let data = Mat::from_fn(cols.len(), rows.len(), |ch, t| rows[t][cols[ch]]);
            Trajectory::from_matrix(data, ts)
        })
        .collect()
}
