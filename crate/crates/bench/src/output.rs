use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use noisysort::primitives::{constants, search_bound, search_floor};

use crate::{Aggregate, AggregateRow, BenchError, TrialReport};

pub const CSV_HEADER: &str = "algorithm,n,p,delta,trials,error_rate,error_ci_lo,error_ci_hi,mean_queries,std_queries,p95_queries,ratio_nlogn,mean_restarts,seed,c1,c2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    #[serde(flatten)]
    row: &'a AggregateRow,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_trial: Option<&'a [TrialReport]>,
}

/// Writes one row per aggregate. Floats use the shortest decimal that parses
/// back to the same value.
pub fn emit_to_writer<W: Write>(
    aggregates: &[Aggregate],
    format: Format,
    per_trial: bool,
    mut out: W,
) -> Result<(), BenchError> {
    if aggregates.is_empty() {
        return Err(BenchError::InvalidConfig("nothing to emit".into()));
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for a in aggregates {
                w.serialize(&a.row)?;
            }
            w.flush().map_err(BenchError::from_io("output"))?;
        }
        Format::Json => {
            let records: Vec<JsonRecord> = aggregates
                .iter()
                .map(|a| JsonRecord {
                    row: &a.row,
                    per_trial: per_trial.then_some(a.per_trial.as_slice()),
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &records)?;
            out.write_all(b"\n").map_err(BenchError::from_io("output"))?;
        }
    }
    Ok(())
}

pub fn emit(aggregates: &[Aggregate], format: Format, per_trial: bool, path: &Path) -> Result<(), BenchError> {
    let label = path.display().to_string();
    let file = File::create(path).map_err(BenchError::from_io(&label))?;
    let mut w = BufWriter::new(file);
    emit_to_writer(aggregates, format, per_trial, &mut w)?;
    w.flush().map_err(BenchError::from_io(&label))
}

/// Parses CSV produced by [`emit_to_writer`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<AggregateRow>, BenchError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Human-readable constants for `p`, plus the search expression at `delta`
/// and `n`. One `name=value` pair per line.
pub fn report_constants(p: f64, delta: f64, n: usize) -> Result<String, BenchError> {
    let c = constants(p)?;
    let bound = search_bound(p, delta, n)?;
    let lines = [
        format!("p={}", c.p),
        format!("h_p={}", c.h_p),
        format!("capacity={}", c.capacity),
        format!("walk_rate={}", c.walk_rate),
        format!("lower_only={}", c.lower_only),
        format!("sort_constant={}", c.sort_constant),
        format!("prior_upper={}", c.prior_upper),
        format!("search_n={n}"),
        format!("search_delta={delta}"),
        format!("search_floor={}", search_floor(p, delta, n)),
        format!("search_bound={bound}"),
    ];
    Ok(lines.join("\n") + "\n")
}
