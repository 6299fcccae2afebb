//! Learning-curve CSV emission.

use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::train::sets::CurveRecord;

fn field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Write checkpoint records as CSV with the header
/// `weak_batch,split,loss_t,loss_c,loss_wso,metric_test`. Missing values
/// (a run without full steps, a train row's metric) stay empty.
pub fn write_curves_csv(records: &[CurveRecord], path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "weak_batch,split,loss_t,loss_c,loss_wso,metric_test")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.weak_batch,
            r.split,
            field(r.loss_t),
            field(r.loss_c),
            field(r.loss_wso),
            field(r.metric_test),
        )?;
    }
    Ok(())
}

/// Parse a curves CSV back (tests and plotting convenience).
pub fn read_curves_csv(path: &Path) -> Result<Vec<CurveRecord>> {
    use std::io::BufRead;
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if idx == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(crate::error::Error::Parse {
                line: idx + 1,
                msg: format!("expected 6 csv fields, got {}", fields.len()),
            });
        }
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>()
                    .map(Some)
                    .map_err(|e| crate::error::Error::Parse {
                        line: idx + 1,
                        msg: format!("bad float {s:?}: {e}"),
                    })
            }
        };
        records.push(CurveRecord {
            weak_batch: fields[0].parse().map_err(|e| crate::error::Error::Parse {
                line: idx + 1,
                msg: format!("bad weak_batch {:?}: {e}", fields[0]),
            })?,
            split: fields[1].to_string(),
            loss_t: opt(fields[2])?,
            loss_c: opt(fields[3])?,
            loss_wso: opt(fields[4])?,
            metric_test: opt(fields[5])?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("cws_curves");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn empty_records_give_header_only_file() {
        let path = tmp("empty.csv");
        write_curves_csv(&[], &path).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            content,
            "weak_batch,split,loss_t,loss_c,loss_wso,metric_test\n"
        );
    }

    #[test]
    fn round_trip_preserves_six_decimal_values() {
        let records = vec![
            CurveRecord {
                weak_batch: 20,
                split: "train".into(),
                loss_t: Some(0.654321),
                loss_c: Some(0.123456),
                loss_wso: Some(0.7),
                metric_test: None,
            },
            CurveRecord {
                weak_batch: 20,
                split: "test".into(),
                loss_t: None,
                loss_c: None,
                loss_wso: None,
                metric_test: Some(0.5),
            },
        ];
        let path = tmp("round.csv");
        write_curves_csv(&records, &path).unwrap();
        let back = read_curves_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].loss_t, Some(0.654321));
        assert_eq!(back[0].metric_test, None);
        assert_eq!(back[1].metric_test, Some(0.5));
    }

    #[test]
    fn missing_confidence_loss_leaves_empty_column() {
        let records = vec![CurveRecord {
            weak_batch: 10,
            split: "train".into(),
            loss_t: Some(1.0),
            loss_c: None,
            loss_wso: Some(1.0),
            metric_test: None,
        }];
        let path = tmp("wso.csv");
        write_curves_csv(&records, &path).unwrap();
        let content = std::fs::read_to_string(&path).unwrap();
        assert!(content
            .lines()
            .nth(1)
            .unwrap()
            .contains("1.000000,,1.000000,"));
    }
}
