//! Price loading, normalized volatility and shuffled surrogates.

use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, RowError};
use crate::seed;

/// Dated prices of one instrument, strictly increasing in date.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub label: String,
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(label: impl Into<String>, dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(Error::InvalidParameter(format!(
                "{} dates for {} prices",
                dates.len(),
                prices.len()
            )));
        }
        if prices.len() < 2 {
            return Err(Error::TooShort {
                needed: 2,
                got: prices.len(),
            });
        }
        if let Some(i) = prices.iter().position(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "price at position {i} is not strictly positive"
            )));
        }
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "dates not strictly increasing at position {}",
                i + 1
            )));
        }
        Ok(Self {
            label: label.into(),
            dates,
            prices,
        })
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DateFormat {
    /// `YYYY-MM-DD`
    #[default]
    Iso,
    /// `M/D/YYYY`, as in some EIA spreadsheet exports.
    Us,
}

impl DateFormat {
    fn parse(self, s: &str) -> Option<NaiveDate> {
        let s = s.trim();
        match self {
            DateFormat::Iso => NaiveDate::parse_from_str(s, "%Y-%m-%d").ok(),
            DateFormat::Us => NaiveDate::parse_from_str(s, "%m/%d/%Y").ok(),
        }
    }
}

/// Which CSV columns hold the date and the price.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub date: String,
    pub price: String,
    #[serde(default)]
    pub date_format: DateFormat,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            date: "date".into(),
            price: "price".into(),
            date_format: DateFormat::Iso,
        }
    }
}

/// Reads a header-led, comma-separated price file.
///
/// Every row with an unparsable date, or a missing or non-positive price,
/// is collected into one [`Error::InvalidRows`] report; rows are numbered
/// from 1 after the header. Valid rows are sorted by date.
pub fn load_price_csv(
    path: impl AsRef<Path>,
    columns: &ColumnSpec,
    label: &str,
) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
            })
    };
    let date_idx = find(&columns.date)?;
    let price_idx = find(&columns.price)?;

    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(csv_err)?;
        let date_field = record.get(date_idx).unwrap_or("");
        let price_field = record.get(price_idx).unwrap_or("");
        let Some(date) = columns.date_format.parse(date_field) else {
            bad.push(RowError {
                row,
                reason: format!("unparsable date `{date_field}`"),
            });
            continue;
        };
        match price_field.parse::<f64>() {
            Ok(p) if p > 0.0 && p.is_finite() => rows.push((date, p)),
            Ok(p) => bad.push(RowError {
                row,
                reason: format!("non-positive price {p}"),
            }),
            Err(_) => bad.push(RowError {
                row,
                reason: if price_field.is_empty() {
                    "missing price".to_string()
                } else {
                    format!("unparsable price `{price_field}`")
                },
            }),
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidRows {
            path: path.to_path_buf(),
            rows: bad,
        });
    }
    if rows.len() <= 1 {
        return Err(Error::TooShort {
            needed: 2,
            got: rows.len(),
        });
    }
    rows.sort_by_key(|(d, _)| *d);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidParameter(format!(
            "duplicate date {} in {}",
            w[0].0,
            path.display()
        )));
    }
    let (dates, prices) = rows.into_iter().unzip();
    PriceSeries::new(label, dates, prices)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Original,
    Shuffled { seed: u64 },
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Original => f.write_str("original"),
            Source::Shuffled { seed } => write!(f, "shuffled-{seed}"),
        }
    }
}

/// Absolute log returns scaled to unit (population) standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilitySeries {
    pub values: Vec<f64>,
    pub source: Source,
}

impl VolatilitySeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `v(t) = |ln Y(t) - ln Y(t-1)| / sd(R)`.
///
/// The divisor is the uncorrected standard deviation of the absolute
/// returns and the returns are not centered, so thresholds are in units of
/// that standard deviation.
pub fn compute_volatility(prices: &PriceSeries) -> Result<VolatilitySeries> {
    volatility_from_prices(&prices.prices)
}

pub fn volatility_from_prices(prices: &[f64]) -> Result<VolatilitySeries> {
    if prices.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: prices.len(),
        });
    }
    let returns: Vec<f64> = prices
        .windows(2)
        .map(|w| (w[1].ln() - w[0].ln()).abs())
        .collect();
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    let scale = returns.iter().cloned().fold(0.0, f64::max);
    if !(sd > 1e-12 * scale) {
        return Err(Error::ZeroVariance);
    }
    Ok(VolatilitySeries {
        values: returns.into_iter().map(|r| r / sd).collect(),
        source: Source::Original,
    })
}

/// Uniform random permutation of the volatility values (Fisher-Yates).
pub fn shuffle(v: &VolatilitySeries, seed: u64) -> VolatilitySeries {
    let mut values = v.values.clone();
    values.shuffle(&mut seed::stream(seed, 0));
    VolatilitySeries {
        values,
        source: Source::Shuffled { seed },
    }
}
