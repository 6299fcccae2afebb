//! TREC-format run files and qrels.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::ranked::{Qrels, RankedList};

/// Write runs in the `qid Q0 docid rank score tag` format.
pub fn write_run_file(path: &Path, runs: &[RankedList], tag: &str) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for run in runs {
        for (rank0, (doc, score)) in run.entries().iter().enumerate() {
            writeln!(
                out,
                "{} Q0 {} {} {:.6} {}",
                run.query_id,
                doc,
                rank0 + 1,
                score,
                tag
            )?;
        }
    }
    Ok(())
}

/// Parse a run file back into ranked lists, in file order of queries.
pub fn parse_run_file(path: &Path) -> Result<Vec<RankedList>> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut order: Vec<String> = Vec::new();
    let mut per_query: std::collections::HashMap<String, Vec<(String, f64)>> =
        std::collections::HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 6 run-file fields, got {}", fields.len()),
            });
        }
        let score: f64 = fields[4].parse().map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("bad score {:?}: {e}", fields[4]),
        })?;
        let qid = fields[0].to_string();
        if !per_query.contains_key(&qid) {
            order.push(qid.clone());
        }
        per_query
            .entry(qid)
            .or_default()
            .push((fields[2].to_string(), score));
    }
    order
        .into_iter()
        .map(|qid| {
            let scored = per_query.remove(&qid).expect("query recorded");
            RankedList::from_scores(qid, scored)
        })
        .collect()
}

/// Parse TREC 4-column qrels: `qid 0 docid grade`.
pub fn parse_qrels(path: &Path) -> Result<Qrels> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut qrels = Qrels::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 4 qrels fields, got {}", fields.len()),
            });
        }
        let grade: u32 = fields[3].parse().map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("bad grade {:?}: {e}", fields[3]),
        })?;
        qrels.insert(fields[0], fields[2], grade);
    }
    Ok(qrels)
}
