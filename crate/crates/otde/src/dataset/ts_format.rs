//! Community `.ts` text format: `@`-prefixed header lines, then one record
//! per line with `:`-separated dimensions, comma-separated values and a
//! final label field. `#` lines are comments.

use std::fs;
use std::path::Path;

use crate::dataset::{Series, TimeSeriesDataset};
use crate::error::{Error, Result};

struct Header {
    name: Option<String>,
    dimensions: Option<usize>,
    series_length: Option<usize>,
    class_labels: Option<Vec<String>>,
    target_label: bool,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedDataset(msg.into())
}

fn parse_header_and_body(text: &str) -> Result<(Header, Vec<&str>)> {
    let mut header = Header {
        name: None,
        dimensions: None,
        series_length: None,
        class_labels: None,
        target_label: false,
    };
    let mut body = Vec::new();
    let mut in_data = false;

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if in_data {
            body.push(line);
            continue;
        }
        if let Some(rest) = line.strip_prefix('@') {
            let mut parts = rest.split_whitespace();
            let key = parts.next().unwrap_or("").to_ascii_lowercase();
            let args: Vec<&str> = parts.collect();
            match key.as_str() {
                "data" => in_data = true,
                "problemname" => header.name = args.first().map(|s| s.to_string()),
                "dimensions" => {
                    header.dimensions = Some(
                        args.first()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| malformed("bad @dimensions value"))?,
                    )
                }
                "serieslength" => {
                    header.series_length = Some(
                        args.first()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| malformed("bad @seriesLength value"))?,
                    )
                }
                "classlabel" => match args.first().copied() {
                    Some("true") => {
                        header.class_labels = Some(args[1..].iter().map(|s| s.to_string()).collect())
                    }
                    Some("false") => header.class_labels = None,
                    _ => return Err(malformed("bad @classLabel line")),
                },
                "targetlabel" => header.target_label = args.first() == Some(&"true"),
                // @univariate, @equalLength, @timeStamps, @missing and any
                // other directives carry no information we need.
                _ => {}
            }
        } else {
            return Err(malformed("record found before @data"));
        }
    }
    if !in_data {
        return Err(malformed("missing @data section"));
    }
    if body.is_empty() {
        return Err(malformed("no records after @data"));
    }
    Ok((header, body))
}

fn parse_record(line: &str) -> Result<(Series, &str)> {
    let mut fields: Vec<&str> = line.split(':').collect();
    if fields.len() < 2 {
        return Err(malformed("record has no label field"));
    }
    let label = fields.pop().unwrap().trim();
    let mut channels = Vec::with_capacity(fields.len());
    for field in fields {
        let mut values = Vec::new();
        for token in field.split(',') {
            let token = token.trim();
            let value: f64 = token
                .parse()
                .map_err(|_| malformed(format!("bad value `{token}`")))?;
            values.push(value);
        }
        channels.push(values);
    }
    Ok((channels, label))
}

fn check_shape(header: &Header, series: &[Series]) -> Result<()> {
    let dims = series[0].len();
    let len = series[0][0].len();
    if let Some(declared) = header.dimensions {
        if declared != dims {
            return Err(malformed(format!(
                "record has {dims} dimensions but header declares {declared}"
            )));
        }
    }
    if let Some(declared) = header.series_length {
        for s in series {
            for channel in s {
                if channel.len() != declared {
                    return Err(malformed(format!(
                        "record length {} does not match declared @seriesLength {declared}",
                        channel.len()
                    )));
                }
            }
        }
    }
    for s in series {
        if s.len() != dims {
            return Err(malformed("ragged dimension counts across records"));
        }
        for channel in s {
            if channel.len() != len {
                return Err(malformed("ragged series lengths across records"));
            }
        }
    }
    Ok(())
}

/// Canonical class index per token: ascending numeric order when every
/// token parses as a number, lexical order otherwise.
fn label_order(tokens: &[String]) -> Result<Vec<String>> {
    if tokens.is_empty() {
        return Err(malformed("@classLabel declares no labels"));
    }
    let numeric: Option<Vec<f64>> = tokens
        .iter()
        .map(|t| t.parse::<f64>().ok().filter(|v| !v.is_nan()))
        .collect();
    let mut ordered = tokens.to_vec();
    match numeric {
        Some(values) => {
            let mut pairs: Vec<(f64, String)> =
                values.into_iter().zip(ordered.iter().cloned()).collect();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            ordered = pairs.into_iter().map(|(_, t)| t).collect();
        }
        None => ordered.sort(),
    }
    if ordered.windows(2).any(|w| w[0] == w[1]) {
        return Err(malformed("duplicate class label tokens"));
    }
    Ok(ordered)
}

/// Parses a classification `.ts` text into a dataset with labels re-encoded
/// to `0..K-1` in the canonical token order.
pub fn parse_ts_text(text: &str) -> Result<TimeSeriesDataset> {
    let (header, body) = parse_header_and_body(text)?;
    let tokens = header
        .class_labels
        .clone()
        .ok_or_else(|| malformed("file has no @classLabel declaration"))?;
    let ordered = label_order(&tokens)?;

    let mut series = Vec::with_capacity(body.len());
    let mut labels = Vec::with_capacity(body.len());
    for line in body {
        let (channels, label_token) = parse_record(line)?;
        let label = ordered
            .iter()
            .position(|t| t == label_token)
            .ok_or_else(|| Error::UnknownLabel(label_token.to_string()))?;
        series.push(channels);
        labels.push(label);
    }
    check_shape(&header, &series)?;

    TimeSeriesDataset::new(
        header.name.unwrap_or_else(|| "unnamed".into()),
        series,
        labels,
        ordered.len(),
    )
}

/// Parses a regression-style `.ts` text (real-valued final field) into
/// series and raw targets, for later discretisation.
pub fn parse_tser_text(text: &str) -> Result<(String, Vec<Series>, Vec<f64>)> {
    let (header, body) = parse_header_and_body(text)?;
    if header.class_labels.is_some() && !header.target_label {
        return Err(malformed(
            "file declares class labels; use the classification reader",
        ));
    }
    let mut series = Vec::with_capacity(body.len());
    let mut targets = Vec::with_capacity(body.len());
    for line in body {
        let (channels, target_token) = parse_record(line)?;
        let target: f64 = target_token
            .parse()
            .map_err(|_| malformed(format!("bad target `{target_token}`")))?;
        series.push(channels);
        targets.push(target);
    }
    check_shape(&header, &series)?;
    Ok((
        header.name.unwrap_or_else(|| "unnamed".into()),
        series,
        targets,
    ))
}

/// Serialises a dataset in the `.ts` text format; labels are written as
/// their `0..K-1` indices so a re-parse reproduces the dataset exactly.
pub fn write_ts_text(dataset: &TimeSeriesDataset) -> String {
    let mut out = String::new();
    out.push_str(&format!("@problemName {}\n", dataset.name));
    out.push_str(&format!("@dimensions {}\n", dataset.dimension_count));
    out.push_str(&format!("@seriesLength {}\n", dataset.series_length));
    out.push_str("@classLabel true");
    for class in 0..dataset.num_classes {
        out.push_str(&format!(" {class}"));
    }
    out.push_str("\n@data\n");
    for (series, label) in dataset.series.iter().zip(&dataset.labels) {
        let mut fields: Vec<String> = series
            .iter()
            .map(|channel| {
                channel
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        fields.push(label.to_string());
        out.push_str(&fields.join(":"));
        out.push('\n');
    }
    out
}

/// Reads a classification `.ts` file; a missing `@problemName` falls back
/// to the file stem.
pub fn read_ts_file(path: impl AsRef<Path>) -> Result<TimeSeriesDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut dataset = parse_ts_text(&text)?;
    if dataset.name == "unnamed" {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            dataset.name = stem.to_string();
        }
    }
    Ok(dataset)
}

/// Reads a regression-style `.ts` file.
pub fn read_tser_file(path: impl AsRef<Path>) -> Result<(String, Vec<Series>, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    parse_tser_text(&text)
}

pub fn write_ts_file(dataset: &TimeSeriesDataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_ts_text(dataset))?;
    Ok(())
}
