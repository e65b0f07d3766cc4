use super::{fmt_num, ParseError, SeriesEnsemble};

/// Parses a CSV table: header row of labels, then one numeric row per sample.
///
/// Row numbers in diagnostics count data rows from 1 (the header is row 0).
pub fn parse_series(bytes: &[u8]) -> Result<SeriesEnsemble, ParseError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(bytes);
    let labels: Vec<String> = reader
        .headers()
        .map_err(|e| ParseError::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if labels.is_empty() || labels.iter().all(String::is_empty) {
        return Err(ParseError::NoColumns);
    }

    let mut columns = vec![Vec::new(); labels.len()];
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| ParseError::Csv(e.to_string()))?;
        if record.len() != labels.len() {
            return Err(ParseError::RaggedRow { row, expected: labels.len(), found: record.len() });
        }
        for (c, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| ParseError::NonNumeric {
                row,
                column: labels[c].clone(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(ParseError::NonFinite { row, column: labels[c].clone() });
            }
            columns[c].push(value);
        }
    }
    SeriesEnsemble::new(labels, columns)
}

/// Writes an ensemble in the format `parse_series` reads.
pub fn emit_series(ensemble: &SeriesEnsemble) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(ensemble.labels()).expect("in-memory write");
    for row in 0..ensemble.sample_len() {
        writer
            .write_record(ensemble.samples().iter().map(|s| fmt_num(s[row])))
            .expect("in-memory write");
    }
    writer.into_inner().expect("in-memory flush")
}
