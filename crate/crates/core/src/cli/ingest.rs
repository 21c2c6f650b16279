//! Reading observation series from delimited text.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DateFormat {
    /// `YYYY-MM-DD`
    #[default]
    Iso,
    /// `DD/MM/YYYY`
    Dmy,
}

impl DateFormat {
    fn pattern(self) -> &'static str {
        match self {
            DateFormat::Iso => "%Y-%m-%d",
            DateFormat::Dmy => "%d/%m/%Y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregate {
    /// One observation per row.
    #[default]
    None,
    /// Average of the non-missing values of each calendar month.
    MonthlyMean,
}

/// How the columns of an input file are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub value_column: String,
    #[serde(default)]
    pub date_column: Option<String>,
    #[serde(default)]
    pub date_format: DateFormat,
    #[serde(default)]
    pub aggregate: Aggregate,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// Accept `1234,5` as a number (for `;`-delimited files).
    #[serde(default)]
    pub decimal_comma: bool,
}

fn default_delimiter() -> char {
    ','
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            value_column: "value".into(),
            date_column: None,
            date_format: DateFormat::Iso,
            aggregate: Aggregate::None,
            delimiter: ',',
            decimal_comma: false,
        }
    }
}

/// A series in time order, with optional labels (dates or `YYYY-MM`).
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub values: Vec<f64>,
    pub labels: Option<Vec<String>>,
}

fn is_missing(field: &str) -> bool {
    matches!(
        field.trim().to_ascii_lowercase().as_str(),
        "" | "na" | "nan" | "null" | "-"
    )
}

fn parse_value(field: &str, decimal_comma: bool) -> Option<f64> {
    let s = field.trim();
    let v = if decimal_comma {
        s.replace(',', ".").parse::<f64>().ok()
    } else {
        s.parse::<f64>().ok()
    };
    v.filter(|v| v.is_finite())
}

/// Reads `opts.value_column` from `path`.
///
/// Without aggregation every row is one observation and a missing value is an
/// error; rows are sorted by date when a date column is given. With
/// `monthly-mean`, rows are grouped by calendar month, missing values inside a
/// month are skipped and every month between the first and last must keep at
/// least one value.
pub fn ingest_series(path: &Path, opts: &IngestOptions) -> Result<Observations> {
    if !opts.delimiter.is_ascii() {
        return Err(Error::invalid(format!(
            "delimiter {:?} is not ASCII",
            opts.delimiter
        )));
    }
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter as u8)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: format!(
                    "no column named '{name}' (have: {})",
                    headers.iter().collect::<Vec<_>>().join(", ")
                ),
            })
    };
    let value_idx = column(&opts.value_column)?;
    let date_idx = opts.date_column.as_deref().map(column).transpose()?;
    if opts.aggregate == Aggregate::MonthlyMean && date_idx.is_none() {
        return Err(Error::invalid(
            "monthly-mean aggregation needs a date column",
        ));
    }

    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    // (date, value, line)
    let mut rows: Vec<(Option<NaiveDate>, Option<f64>, usize)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = record.get(value_idx).unwrap_or("");
        let value = if is_missing(field) {
            None
        } else {
            Some(parse_value(field, opts.decimal_comma).ok_or_else(|| {
                parse_err(
                    line,
                    format!(
                        "'{field}' in column '{}' is not a number",
                        opts.value_column
                    ),
                )
            })?)
        };
        let date = match date_idx {
            Some(i) => {
                let raw = record.get(i).unwrap_or("");
                Some(
                    NaiveDate::parse_from_str(raw, opts.date_format.pattern()).map_err(|_| {
                        parse_err(
                            line,
                            format!(
                                "'{raw}' is not a {:?} date ({})",
                                opts.date_format,
                                opts.date_format.pattern()
                            ),
                        )
                    })?,
                )
            }
            None => None,
        };
        rows.push((date, value, line));
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }

    let out = match opts.aggregate {
        Aggregate::None => {
            if let Some((_, _, line)) = rows.iter().find(|r| r.1.is_none()) {
                return Err(parse_err(
                    *line,
                    "missing value (only --aggregate monthly-mean skips missing values)".into(),
                ));
            }
            if date_idx.is_some() {
                rows.sort_by_key(|r| r.0);
            }
            Observations {
                values: rows.iter().map(|r| r.1.expect("checked above")).collect(),
                labels: date_idx.map(|_| {
                    rows.iter()
                        .map(|r| r.0.expect("dated").to_string())
                        .collect()
                }),
            }
        }
        Aggregate::MonthlyMean => monthly_means(&rows).map_err(|msg| Error::Input {
            path: path.to_path_buf(),
            msg,
        })?,
    };
    Ok(out)
}

fn month_index(d: NaiveDate) -> i64 {
    d.year() as i64 * 12 + d.month0() as i64
}

fn monthly_means(
    rows: &[(Option<NaiveDate>, Option<f64>, usize)],
) -> std::result::Result<Observations, String> {
    let mut groups: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for &(date, value, _) in rows {
        let entry = groups
            .entry(month_index(date.expect("dated")))
            .or_insert((0.0, 0));
        if let Some(v) = value {
            entry.0 += v;
            entry.1 += 1;
        }
    }
    let first = *groups.keys().next().expect("non-empty");
    let last = *groups.keys().next_back().expect("non-empty");
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for m in first..=last {
        let label = format!("{:04}-{:02}", m.div_euclid(12), m.rem_euclid(12) + 1);
        match groups.get(&m) {
            Some(&(sum, count)) if count > 0 => {
                values.push(sum / count as f64);
                labels.push(label);
            }
            _ => return Err(format!("month {label} has no observations")),
        }
    }
    Ok(Observations {
        values,
        labels: Some(labels),
    })
}
