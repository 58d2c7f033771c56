//! Run records and their CSV form.
//!
//! Header: `algorithm,tau,f,cost,fairness_diff,queries,wall_ms,seed,count_0,…`.
//! Integral values are written without a fractional part, other values
//! with six digits. A cell that failed has empty metric fields.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{FairError, Result};
use crate::model::fairness_difference_counts;

/// Parameters a record was produced with.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub delta: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub f: f64,
    pub cost: usize,
    /// Undefined for an empty solution.
    pub fairness_diff: Option<f64>,
    pub queries: u64,
    pub wall_ms: f64,
    pub counts: Vec<usize>,
    /// Relaxed per-color guarantee, for converter outputs.
    pub relaxed_fair: Option<bool>,
    /// Whether the converter's repair reached `βκ` elements.
    pub repair_complete: Option<bool>,
    /// `p_c|S| ≤ |S ∩ U_c| ≤ q_c|S|` and `f(S) ≥ τ`.
    pub strict_fair: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: String,
    pub tau: f64,
    pub seed: u64,
    pub params: RunParams,
    pub metrics: Option<RunMetrics>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn failed(algorithm: &str, tau: f64, seed: u64, params: RunParams, error: String) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            tau,
            seed,
            params,
            metrics: None,
            error: Some(error),
        }
    }

    /// Converter output whose relaxed guarantee fails although the repair
    /// completed; this should never happen.
    pub fn violates_relaxed_fairness(&self) -> bool {
        self.metrics.as_ref().is_some_and(|m| {
            m.relaxed_fair == Some(false) && m.repair_complete == Some(true)
        })
    }
}

pub fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.6}")
    }
}

fn header(num_colors: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "algorithm",
        "tau",
        "f",
        "cost",
        "fairness_diff",
        "queries",
        "wall_ms",
        "seed",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend((0..num_colors).map(|c| format!("count_{c}")));
    h
}

pub fn write_csv<W: Write>(out: W, records: &[RunRecord], num_colors: usize) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header(num_colors))?;
    for r in records {
        let mut row = vec![r.algorithm.clone(), format_value(r.tau)];
        match &r.metrics {
            Some(m) => {
                if m.counts.len() != num_colors {
                    return Err(FairError::Invariant(format!(
                        "record has {} counts, header has {num_colors}",
                        m.counts.len()
                    )));
                }
                row.push(format_value(m.f));
                row.push(m.cost.to_string());
                row.push(m.fairness_diff.map(|d| format!("{d:.6}")).unwrap_or_default());
                row.push(m.queries.to_string());
                row.push(format!("{:.6}", m.wall_ms));
                row.push(r.seed.to_string());
                row.extend(m.counts.iter().map(|c| c.to_string()));
            }
            None => {
                row.extend(std::iter::repeat_n(String::new(), 5));
                row.push(r.seed.to_string());
                row.extend(std::iter::repeat_n(String::new(), num_colors));
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(path: &Path, records: &[RunRecord], num_colors: usize) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), records, num_colors)
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = row.get(i).unwrap_or("");
    raw.parse().map_err(|_| FairError::Parse {
        path: "csv".into(),
        line,
        message: format!("column {i}: cannot parse {raw:?}"),
    })
}

/// Parses CSV text back into records; parameters and fairness verdicts
/// are not part of the file and come back as defaults.
pub fn read_csv_from<R: Read>(input: R) -> Result<(Vec<RunRecord>, usize)> {
    let mut rd = csv::ReaderBuilder::new().from_reader(input);
    let head = rd.headers()?.clone();
    let fixed = header(0);
    if head.len() < fixed.len() || head.iter().zip(&fixed).any(|(a, b)| a != b) {
        return Err(FairError::Parse {
            path: "csv".into(),
            line: 1,
            message: "unexpected header".into(),
        });
    }
    let num_colors = head.len() - fixed.len();
    let mut out = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let algorithm = row.get(0).unwrap_or("").to_string();
        let tau: f64 = field(&row, 1, line)?;
        let seed: u64 = field(&row, 7, line)?;
        let metrics = if row.get(2).unwrap_or("").is_empty() {
            None
        } else {
            let diff = row.get(4).unwrap_or("");
            Some(RunMetrics {
                f: field(&row, 2, line)?,
                cost: field(&row, 3, line)?,
                fairness_diff: if diff.is_empty() { None } else { Some(field(&row, 4, line)?) },
                queries: field(&row, 5, line)?,
                wall_ms: field(&row, 6, line)?,
                counts: (0..num_colors)
                    .map(|c| field(&row, 8 + c, line))
                    .collect::<Result<_>>()?,
                relaxed_fair: None,
                repair_complete: None,
                strict_fair: false,
            })
        };
        out.push(RunRecord {
            algorithm,
            tau,
            seed,
            params: RunParams::default(),
            error: metrics.is_none().then(|| "failed".to_string()),
            metrics,
        });
    }
    Ok((out, num_colors))
}

pub fn read_csv(path: &Path) -> Result<(Vec<RunRecord>, usize)> {
    read_csv_from(std::fs::File::open(path)?)
}

/// Recomputes the fairness difference from stored counts.
pub fn recomputed_difference(m: &RunMetrics) -> Option<f64> {
    fairness_difference_counts(&m.counts).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(counts: Vec<usize>) -> RunRecord {
        let cost = counts.iter().sum();
        RunRecord {
            algorithm: "greedy-bi".into(),
            tau: 4.0,
            seed: 1,
            params: RunParams::default(),
            metrics: Some(RunMetrics {
                f: 4.0,
                cost,
                fairness_diff: fairness_difference_counts(&counts).ok(),
                queries: 9,
                wall_ms: 0.25,
                counts,
                relaxed_fair: None,
                repair_complete: None,
                strict_fair: false,
            }),
            error: None,
        }
    }

    fn emit(records: &[RunRecord], n: usize) -> String {
        let mut buf = Vec::new();
        write_csv(&mut buf, records, n).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn single_row_format() {
        let text = emit(&[rec(vec![2, 2])], 2);
        assert_eq!(
            text,
            "algorithm,tau,f,cost,fairness_diff,queries,wall_ms,seed,count_0,count_1\n\
             greedy-bi,4,4,4,0.000000,9,0.250000,1,2,2\n"
        );
    }

    #[test]
    fn header_only() {
        let text = emit(&[], 3);
        assert_eq!(text.lines().count(), 1);
        let (r, n) = read_csv_from(text.as_bytes()).unwrap();
        assert!(r.is_empty());
        assert_eq!(n, 3);
    }

    #[test]
    fn error_rows_have_empty_metrics() {
        let r = RunRecord::failed("greedy-bi", 9.5, 3, RunParams::default(), "boom".into());
        let text = emit(&[r], 2);
        assert!(text.ends_with("greedy-bi,9.500000,,,,,,3,,\n"));
        let (back, _) = read_csv_from(text.as_bytes()).unwrap();
        assert!(back[0].metrics.is_none());
    }

    #[test]
    fn quoting() {
        let mut r = rec(vec![1, 0]);
        r.algorithm = "a,\"b\"".into();
        let text = emit(&[r.clone()], 2);
        let (back, _) = read_csv_from(text.as_bytes()).unwrap();
        assert_eq!(back[0].algorithm, r.algorithm);
    }

    /// Half a unit in the sixth decimal, plus slack for the f64 subtraction.
    const HALF_ULP6: f64 = 5e-7 + 1e-12;

    proptest! {
        #[test]
        fn round_trip(
            counts in proptest::collection::vec(0usize..50, 1..7),
            tau in 0.0f64..1e4,
            f in 0u32..10_000,
            queries in any::<u32>(),
            wall in 0.0f64..1e5,
            seed in any::<u64>(),
        ) {
            let mut r = rec(counts.clone());
            r.tau = tau;
            r.seed = seed;
            let m = r.metrics.as_mut().unwrap();
            m.f = f as f64;
            m.queries = queries as u64;
            m.wall_ms = wall;
            let n = counts.len();
            let (back, nc) = read_csv_from(emit(&[r.clone()], n).as_bytes()).unwrap();
            prop_assert_eq!(nc, n);
            let b = &back[0];
            let (m, bm) = (r.metrics.as_ref().unwrap(), b.metrics.as_ref().unwrap());
            prop_assert_eq!(&b.algorithm, &r.algorithm);
            prop_assert_eq!(b.seed, r.seed);
            prop_assert!((b.tau - r.tau).abs() <= HALF_ULP6);
            prop_assert_eq!(bm.f, m.f);
            prop_assert_eq!(bm.cost, m.cost);
            prop_assert_eq!(bm.queries, m.queries);
            prop_assert_eq!(&bm.counts, &m.counts);
            prop_assert!((bm.wall_ms - m.wall_ms).abs() <= HALF_ULP6);
            match (bm.fairness_diff, m.fairness_diff) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= HALF_ULP6),
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }
}
