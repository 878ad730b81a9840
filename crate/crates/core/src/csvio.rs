use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::CoreError;
use crate::month::Month;
use crate::series::{Dataset, TimeSeries};

/// Load a monthly panel from CSV.
///
/// Expected layout: UTF-8, header row, first column `date` with `YYYY-MM`
/// cells, remaining columns numeric. Lines starting with `#` are ignored.
/// Dates must be contiguous months; empty cells and gaps are hard errors.
/// A non-empty `schema` requires exactly those value columns, in order.
pub fn load_dataset(path: &Path, schema: &[&str]) -> Result<Dataset, CoreError> {
    let mut raw = String::new();
    File::open(path)?.read_to_string(&mut raw)?;
    load_dataset_str(&raw, schema)
}

/// `load_dataset` on an in-memory CSV string.
pub fn load_dataset_str(raw: &str, schema: &[&str]) -> Result<Dataset, CoreError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());

    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.get(0) != Some("date") {
        return Err(CoreError::Misaligned(
            "first column header must be `date`".into(),
        ));
    }
    let names: Vec<String> = headers.iter().skip(1).map(|s| s.to_string()).collect();
    if names.is_empty() {
        return Err(CoreError::Empty("no value columns".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for n in &names {
        if !seen.insert(n.clone()) {
            return Err(CoreError::DuplicateColumn(n.clone()));
        }
    }
    if !schema.is_empty() {
        if names.len() != schema.len() {
            return Err(CoreError::Misaligned(format!(
                "schema expects {} columns, file has {}",
                schema.len(),
                names.len()
            )));
        }
        for (want, got) in schema.iter().zip(&names) {
            if want != got {
                return Err(CoreError::MissingColumn((*want).to_string()));
            }
        }
    }

    let mut months: Vec<Month> = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let date_cell = record.get(0).unwrap_or("");
        let m: Month = date_cell.parse()?;
        if let Some(prev) = months.last() {
            let expected = prev.plus(1);
            if m != expected {
                return Err(CoreError::DateGap {
                    expected: expected.to_string(),
                    found: m.to_string(),
                    row: row_idx + 2,
                });
            }
        }
        months.push(m);
        for (j, name) in names.iter().enumerate() {
            let cell = record.get(j + 1).unwrap_or("");
            if cell.is_empty() {
                return Err(CoreError::MissingCell {
                    column: name.clone(),
                    row: row_idx + 2,
                });
            }
            let v: f64 = cell.parse().map_err(|_| CoreError::NonNumericCell {
                column: name.clone(),
                row: row_idx + 2,
                cell: cell.to_string(),
            })?;
            cols[j].push(v);
        }
    }
    if months.is_empty() {
        return Err(CoreError::Empty("no data rows".into()));
    }
    let start = months[0];
    let series = names
        .into_iter()
        .zip(cols)
        .map(|(name, values)| TimeSeries::new(name, start, values))
        .collect::<Result<Vec<_>, _>>()?;
    Dataset::new(series)
}

/// Write a dataset as CSV (date column plus one column per series).
///
/// Values use Rust's shortest round-trip float formatting, so a re-load
/// reproduces them bit-for-bit. Optional `comments` lines are emitted first,
/// each prefixed with `# `.
pub fn write_dataset(d: &Dataset, path: &Path, comments: &[String]) -> Result<(), CoreError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dataset_to(d, &mut w, comments)
}

/// `write_dataset` to any writer.
pub fn write_dataset_to(
    d: &Dataset,
    out: &mut dyn Write,
    comments: &[String],
) -> Result<(), CoreError> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut header = String::from("date");
    for c in d.columns() {
        header.push(',');
        header.push_str(c.name());
    }
    writeln!(out, "{header}")?;
    for i in 0..d.len() {
        let mut line = d.month_at(i).to_string();
        for c in d.columns() {
            line.push(',');
            line.push_str(&format_float(c.values()[i]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Shortest decimal representation that parses back to the same f64.
pub fn format_float(v: f64) -> String {
    let s = format!("{v}");
    // Guard against Display producing inf/NaN (containers forbid them anyway).
    debug_assert!(s.parse::<f64>().map(|r| r == v).unwrap_or(false) || v.is_nan());
    s
}

/// Write generic long-format rows as CSV with a header.
pub fn write_rows(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = String>,
    comments: &[String],
) -> Result<(), CoreError> {
    let mut w = BufWriter::new(File::create(path)?);
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{header}")?;
    for r in rows {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_two_row_file() {
        let d = load_dataset_str("date,value\n2005-01,1\n2005-02,2\n", &[]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.start().to_string(), "2005-01");
        assert_eq!(d.column("value").unwrap().values(), &[1.0, 2.0]);
    }

    #[test]
    fn merged_files_intersect_to_seven_months() {
        let mut f1 = String::from("date,a\n");
        let mut m: Month = "2005-01".parse().unwrap();
        for i in 0..12 {
            f1.push_str(&format!("{m},{i}\n"));
            m = m.plus(1);
        }
        let mut f2 = String::from("date,b\n");
        let mut m: Month = "2005-06".parse().unwrap();
        for i in 0..13 {
            f2.push_str(&format!("{m},{i}\n"));
            m = m.plus(1);
        }
        let d1 = load_dataset_str(&f1, &[]).unwrap();
        let d2 = load_dataset_str(&f2, &[]).unwrap();
        let merged = Dataset::merge(&[d1, d2]).unwrap();
        assert_eq!(merged.len(), 7);
        assert_eq!(merged.start().to_string(), "2005-06");
        assert_eq!(merged.end().to_string(), "2005-12");
    }

    #[test]
    fn malformed_date_and_bad_cells_error() {
        assert!(matches!(
            load_dataset_str("date,v\n2005-13,1\n", &[]),
            Err(CoreError::MalformedDate(_))
        ));
        assert!(matches!(
            load_dataset_str("date,v\n2005-01,abc\n", &[]),
            Err(CoreError::NonNumericCell { .. })
        ));
        assert!(matches!(
            load_dataset_str("date,v\n2005-01,\n", &[]),
            Err(CoreError::MissingCell { .. })
        ));
        assert!(matches!(
            load_dataset_str("date,v\n2005-01,1\n2005-03,2\n", &[]),
            Err(CoreError::DateGap { .. })
        ));
        assert!(matches!(
            load_dataset_str("date,v,v\n2005-01,1,2\n", &[]),
            Err(CoreError::DuplicateColumn(_))
        ));
    }

    #[test]
    fn schema_mismatch_errors() {
        let raw = "date,a,b\n2005-01,1,2\n";
        assert!(load_dataset_str(raw, &["a", "b"]).is_ok());
        assert!(load_dataset_str(raw, &["a"]).is_err());
        assert!(load_dataset_str(raw, &["a", "c"]).is_err());
    }

    #[test]
    fn round_trip_preserves_values_exactly() {
        let raw = "date,a,b\n2005-01,1.25,-3.5e-7\n2005-02,0.1,2\n2005-03,1e300,-0.0001\n";
        let d = load_dataset_str(raw, &[]).unwrap();
        let mut buf = Vec::new();
        write_dataset_to(&d, &mut buf, &[]).unwrap();
        let again = load_dataset_str(std::str::from_utf8(&buf).unwrap(), &[]).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn comments_are_skipped_on_read() {
        let raw = "# manifest: abc\ndate,v\n2005-01,1\n";
        let d = load_dataset_str(raw, &[]).unwrap();
        assert_eq!(d.len(), 1);
    }
}
