//! Per-step run records as CSV with lossless `f64` text.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rislab_core::sac::StepRecord;

pub const CSV_HEADER: [&str; 5] = ["step", "true_sum_rate", "training_reward", "lambda", "alpha"];

pub fn write_csv(path: &Path, records: &[StepRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(CSV_HEADER)?;
    for r in records {
        // `Display` for f64 prints the shortest string that parses back exactly
        w.write_record([
            r.step.to_string(),
            r.true_sum_rate.to_string(),
            r.training_reward.to_string(),
            r.lambda.to_string(),
            r.alpha.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<StepRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    if r.headers()?.iter().ne(CSV_HEADER) {
        bail!("{}: unexpected header {:?}", path.display(), r.headers()?);
    }
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let f = |j: usize| -> Result<f64> {
            row[j]
                .parse()
                .with_context(|| format!("{} row {}: column {}", path.display(), i + 1, CSV_HEADER[j]))
        };
        out.push(StepRecord {
            step: row[0]
                .parse()
                .with_context(|| format!("{} row {}: step", path.display(), i + 1))?,
            true_sum_rate: f(1)?,
            training_reward: f(2)?,
            lambda: f(3)?,
            alpha: f(4)?,
        });
    }
    Ok(out)
}

/// The reported metric column.
pub fn true_rates(records: &[StepRecord]) -> Vec<f64> {
    records.iter().map(|r| r.true_sum_rate).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_round_trip_is_bitwise(values in proptest::collection::vec((any::<f64>().prop_filter("finite", |x| x.is_finite()), 0.0..1.0f64, 1e-12..1.0f64), 1..40)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("run.csv");
            let records: Vec<StepRecord> = values.iter().enumerate().map(|(i, &(r, l, a))| StepRecord {
                step: i as u64, true_sum_rate: r, training_reward: -r, lambda: l, alpha: a,
            }).collect();
            write_csv(&path, &records).unwrap();
            let back = read_csv(&path).unwrap();
            prop_assert_eq!(back, records);
        }
    }

    #[test]
    fn rejects_foreign_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_csv(&path).is_err());
    }
}
