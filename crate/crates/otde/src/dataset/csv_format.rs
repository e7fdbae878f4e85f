//! CSV alternatives: one row per instance with `d*l` value columns named
//! `v<dim>_<t>` followed by a `label` column, and a simple price-history
//! reader for financial dataset construction.

use std::fs::File;
use std::path::Path;

use crate::dataset::{Series, TimeSeriesDataset};
use crate::error::{Error, Result};

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedDataset(msg.into())
}

/// Reads a dataset from the documented CSV layout. Dimension and length
/// are inferred from the `v<dim>_<t>` header names; the class count is the
/// largest label plus one (at least 2).
pub fn read_csv_dataset(path: impl AsRef<Path>, name: impl Into<String>) -> Result<TimeSeriesDataset> {
    let file = File::open(path.as_ref())?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| malformed(e.to_string()))?
        .clone();
    let mut dims = 0usize;
    let mut len = 0usize;
    let mut value_columns = Vec::new();
    for (idx, column) in headers.iter().enumerate() {
        if column == "label" {
            continue;
        }
        let rest = column
            .strip_prefix('v')
            .ok_or_else(|| malformed(format!("unexpected column `{column}`")))?;
        let (d, t) = rest
            .split_once('_')
            .ok_or_else(|| malformed(format!("unexpected column `{column}`")))?;
        let d: usize = d.parse().map_err(|_| malformed("bad dimension index"))?;
        let t: usize = t.parse().map_err(|_| malformed("bad time index"))?;
        dims = dims.max(d + 1);
        len = len.max(t + 1);
        value_columns.push((idx, d, t));
    }
    let label_column = headers
        .iter()
        .position(|c| c == "label")
        .ok_or_else(|| malformed("missing `label` column"))?;
    if value_columns.len() != dims * len {
        return Err(malformed("value columns do not cover a full d*l grid"));
    }

    let mut series = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        let mut instance: Series = vec![vec![0.0; len]; dims];
        for &(idx, d, t) in &value_columns {
            let token = record
                .get(idx)
                .ok_or_else(|| malformed("short record"))?
                .trim();
            instance[d][t] = token
                .parse()
                .map_err(|_| malformed(format!("bad value `{token}`")))?;
        }
        let token = record
            .get(label_column)
            .ok_or_else(|| malformed("short record"))?
            .trim();
        let label: usize = token
            .parse()
            .map_err(|_| Error::UnknownLabel(token.to_string()))?;
        series.push(instance);
        labels.push(label);
    }
    let num_classes = labels.iter().max().map_or(0, |&m| m + 1).max(2);
    TimeSeriesDataset::new(name, series, labels, num_classes)
}

/// Writes a dataset in the documented CSV layout.
pub fn write_csv_dataset(dataset: &TimeSeriesDataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut writer = csv::Writer::from_writer(file);

    let mut header = Vec::new();
    for d in 0..dataset.dimension_count {
        for t in 0..dataset.series_length {
            header.push(format!("v{d}_{t}"));
        }
    }
    header.push("label".into());
    writer.write_record(&header).map_err(io_like)?;

    for (series, label) in dataset.series.iter().zip(&dataset.labels) {
        let mut row = Vec::with_capacity(header.len());
        for channel in series {
            for v in channel {
                row.push(v.to_string());
            }
        }
        row.push(label.to_string());
        writer.write_record(&row).map_err(io_like)?;
    }
    writer.flush()?;
    Ok(())
}

fn io_like(e: csv::Error) -> Error {
    Error::MalformedDataset(e.to_string())
}

/// Reads a chronological price list from a CSV file.
///
/// A `price` or `close` column (case-insensitive) is used when the file has
/// a header naming one; otherwise the last column of each row is taken. A
/// header row is detected by the chosen column failing to parse.
pub fn read_price_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let file = File::open(path.as_ref())?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        rows.push(record.map_err(|e| malformed(e.to_string()))?);
    }
    if rows.is_empty() {
        return Err(malformed("price file is empty"));
    }

    let mut column: Option<usize> = None;
    let mut start = 0;
    let first = &rows[0];
    for (idx, cell) in first.iter().enumerate() {
        let lowered = cell.trim().to_ascii_lowercase();
        if lowered == "price" || lowered == "close" {
            column = Some(idx);
            start = 1;
            break;
        }
    }
    if column.is_none() && first.iter().last().map(|c| c.trim().parse::<f64>().is_err()) == Some(true) {
        // Header row without a recognised price column: use the last column.
        start = 1;
    }

    let mut prices = Vec::with_capacity(rows.len());
    for row in &rows[start..] {
        let cell = match column {
            Some(idx) => row.get(idx),
            None => row.iter().last(),
        }
        .ok_or_else(|| malformed("empty row in price file"))?;
        let value: f64 = cell
            .trim()
            .parse()
            .map_err(|_| malformed(format!("bad price `{}`", cell.trim())))?;
        prices.push(value);
    }
    if prices.is_empty() {
        return Err(malformed("price file has no data rows"));
    }
    Ok(prices)
}
