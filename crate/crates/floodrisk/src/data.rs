//! Loading, validation, CPI normalization, and summary statistics for the
//! loss/precipitation/indicator CSV inputs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, RowError};
use crate::Result;

/// One flooding event: loss in billion RMB and the 24-hour maximum point
/// precipitation in mm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossRecord {
    pub event_id: String,
    pub year: i32,
    pub province: String,
    pub loss: f64,
    pub max_point_precip: f64,
}

/// Annual consumer price index series.
#[derive(Debug, Clone)]
pub struct CpiSeries {
    index: BTreeMap<i32, f64>,
}

impl CpiSeries {
    pub fn new(index: BTreeMap<i32, f64>) -> Result<Self> {
        if let Some((y, v)) = index.iter().find(|(_, v)| **v <= 0.0) {
            return Err(Error::Domain(format!(
                "CPI index for {y} is {v}, must be > 0"
            )));
        }
        Ok(CpiSeries { index })
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        self.index.get(&year).copied()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.index.keys().copied()
    }
}

pub const N_CRITERIA: usize = 13;

/// Whether larger criterion values indicate more vulnerability (benefit)
/// or less (cost).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Benefit,
    Cost,
}

/// X1..X6 measure exposure/damage (benefit for vulnerability), X7..X13
/// measure coping capacity (cost).
pub fn default_orientations() -> [Orientation; N_CRITERIA] {
    let mut o = [Orientation::Cost; N_CRITERIA];
    for slot in o.iter_mut().take(6) {
        *slot = Orientation::Benefit;
    }
    o
}

/// Province-by-criterion performance table (19 provinces, X1..X13).
#[derive(Debug, Clone)]
pub struct IndicatorTable {
    pub provinces: Vec<String>,
    pub values: Vec<[f64; N_CRITERIA]>,
    pub orientations: [Orientation; N_CRITERIA],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsSummary {
    pub size: usize,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Column names expected in the loss CSV; override to absorb naming drift
/// in source files.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossColumns {
    pub event_id: String,
    pub year: String,
    pub province: String,
    pub loss: String,
    pub precip: String,
}

impl Default for LossColumns {
    fn default() -> Self {
        LossColumns {
            event_id: "event_id".into(),
            year: "year".into(),
            province: "province".into(),
            loss: "loss_billion".into(),
            precip: "precip_mm".into(),
        }
    }
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file))
}

fn column_index(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| {
            Error::Schema(format!(
                "missing column '{}' in {} (found: {})",
                name,
                path.display(),
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
}

/// Load loss records; either every row parses or the full row-indexed error
/// list is returned.
pub fn load_loss_csv(path: &Path, schema: &LossColumns) -> Result<Vec<LossRecord>> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers()?.clone();
    let i_id = column_index(&headers, &schema.event_id, path)?;
    let i_year = column_index(&headers, &schema.year, path)?;
    let i_prov = column_index(&headers, &schema.province, path)?;
    let i_loss = column_index(&headers, &schema.loss, path)?;
    let i_prec = column_index(&headers, &schema.precip, path)?;

    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2; // header is line 1
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let field = |i: usize, name: &str| -> std::result::Result<String, RowError> {
            row.get(i)
                .map(|s| s.trim().to_string())
                .ok_or_else(|| RowError {
                    line,
                    message: format!("missing field '{name}'"),
                })
        };
        let parsed = (|| -> std::result::Result<LossRecord, RowError> {
            let event_id = field(i_id, &schema.event_id)?;
            let year = field(i_year, &schema.year)?
                .parse::<i32>()
                .map_err(|e| RowError {
                    line,
                    message: format!("year: {e}"),
                })?;
            let province = field(i_prov, &schema.province)?;
            let loss = field(i_loss, &schema.loss)?
                .parse::<f64>()
                .map_err(|e| RowError {
                    line,
                    message: format!("loss: {e}"),
                })?;
            let max_point_precip =
                field(i_prec, &schema.precip)?
                    .parse::<f64>()
                    .map_err(|e| RowError {
                        line,
                        message: format!("precipitation: {e}"),
                    })?;
            if loss <= 0.0 {
                return Err(RowError {
                    line,
                    message: format!("loss {loss} must be > 0"),
                });
            }
            if max_point_precip < 0.0 {
                return Err(RowError {
                    line,
                    message: format!("precipitation {max_point_precip} must be >= 0"),
                });
            }
            Ok(LossRecord {
                event_id,
                year,
                province,
                loss,
                max_point_precip,
            })
        })();
        match parsed {
            Ok(r) => records.push(r),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(records)
    } else {
        Err(Error::Rows(errors))
    }
}

pub fn load_cpi_csv(path: &Path) -> Result<CpiSeries> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers()?.clone();
    let i_year = column_index(&headers, "year", path)?;
    let i_index = column_index(&headers, "index", path)?;
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2;
        let row = row?;
        let year = row.get(i_year).unwrap_or("").trim().parse::<i32>();
        let value = row.get(i_index).unwrap_or("").trim().parse::<f64>();
        match (year, value) {
            (Ok(y), Ok(v)) => {
                map.insert(y, v);
            }
            (y, v) => {
                let msg = [
                    y.err().map(|e| format!("year: {e}")),
                    v.err().map(|e| format!("index: {e}")),
                ]
                .into_iter()
                .flatten()
                .collect::<Vec<_>>()
                .join("; ");
                errors.push(RowError { line, message: msg });
            }
        }
    }
    if !errors.is_empty() {
        return Err(Error::Rows(errors));
    }
    CpiSeries::new(map)
}

/// Annual exceedance counts, ordered by year.
pub fn load_counts_csv(path: &Path) -> Result<Vec<(i32, u64)>> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers()?.clone();
    let i_year = column_index(&headers, "year", path)?;
    let i_count = column_index(&headers, "count", path)?;
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2;
        let row = row?;
        let year = row.get(i_year).unwrap_or("").trim().parse::<i32>();
        let count = row.get(i_count).unwrap_or("").trim().parse::<u64>();
        match (year, count) {
            (Ok(y), Ok(c)) => {
                if map.insert(y, c).is_some() {
                    errors.push(RowError {
                        line,
                        message: format!("duplicate year {y}"),
                    });
                }
            }
            (y, c) => {
                let msg = [
                    y.err().map(|e| format!("year: {e}")),
                    c.err().map(|e| format!("count: {e}")),
                ]
                .into_iter()
                .flatten()
                .collect::<Vec<_>>()
                .join("; ");
                errors.push(RowError { line, message: msg });
            }
        }
    }
    if !errors.is_empty() {
        return Err(Error::Rows(errors));
    }
    if map.is_empty() {
        return Err(Error::Schema(format!("{}: no count rows", path.display())));
    }
    Ok(map.into_iter().collect())
}

pub fn load_indicators_csv(path: &Path) -> Result<IndicatorTable> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers()?.clone();
    let i_prov = column_index(&headers, "province", path)?;
    let mut cols = Vec::with_capacity(N_CRITERIA);
    for j in 1..=N_CRITERIA {
        cols.push(column_index(&headers, &format!("X{j}"), path)?);
    }
    let mut provinces = Vec::new();
    let mut values = Vec::new();
    let mut errors = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2;
        let row = row?;
        let mut vals = [0.0; N_CRITERIA];
        let mut bad = false;
        for (j, &ci) in cols.iter().enumerate() {
            match row.get(ci).unwrap_or("").trim().parse::<f64>() {
                Ok(v) => vals[j] = v,
                Err(e) => {
                    errors.push(RowError {
                        line,
                        message: format!("X{}: {e}", j + 1),
                    });
                    bad = true;
                }
            }
        }
        if !bad {
            provinces.push(row.get(i_prov).unwrap_or("").trim().to_string());
            values.push(vals);
        }
    }
    if !errors.is_empty() {
        return Err(Error::Rows(errors));
    }
    Ok(IndicatorTable {
        provinces,
        values,
        orientations: default_orientations(),
    })
}

/// Rescale losses to `base_year` price levels: loss' = loss * cpi[base] / cpi[year].
pub fn normalize_cpi(
    records: &[LossRecord],
    cpi: &CpiSeries,
    base_year: i32,
) -> Result<Vec<LossRecord>> {
    let base = cpi
        .get(base_year)
        .ok_or_else(|| Error::Domain(format!("base year {base_year} missing from CPI series")))?;
    records
        .iter()
        .map(|r| {
            let idx = cpi
                .get(r.year)
                .ok_or_else(|| Error::Domain(format!("year {} missing from CPI series", r.year)))?;
            Ok(LossRecord {
                loss: r.loss * base / idx,
                ..r.clone()
            })
        })
        .collect()
}

/// Linear-interpolation order-statistic quantile at position q(n-1)+1
/// (the common "type 7" rule). Sample must be sorted ascending.
pub fn empirical_quantile(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::Domain("quantile of empty sample".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("quantile level {q} outside [0,1]")));
    }
    let n = sorted.len();
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Moment-based summary. Skewness is m3/m2^1.5, kurtosis is raw m4/m2^2
/// (normal = 3), both with biased (1/n) moments.
pub fn descriptive_stats(sample: &[f64]) -> Result<StatsSummary> {
    let n = sample.len();
    if n < 4 {
        return Err(Error::Domain(format!(
            "need at least 4 observations, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = sample.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in sample {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if m2 == 0.0 {
        return Err(Error::Domain(
            "constant sample: skewness/kurtosis undefined".into(),
        ));
    }
    let mut sorted: Vec<f64> = sample.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(StatsSummary {
        size: n,
        min: sorted[0],
        median: empirical_quantile(&sorted, 0.5)?,
        mean,
        max: sorted[n - 1],
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}

/// Pearson correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Domain(
            "correlation needs two equal-length samples, n >= 2".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Domain("constant sample in correlation".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}
