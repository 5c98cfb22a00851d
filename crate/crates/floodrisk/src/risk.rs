//! Tail risk measures on a fitted POT model: exceedance probability,
//! return level, VaR, CVaR, expected aggregate annual loss, back-testing,
//! and the layered compensation table.

use serde::Serialize;

use crate::error::Error;
use crate::evt::{GevParams, GpdParams, SHAPE_EPS};
use crate::Result;

/// Tail model: GPD over a threshold, the empirical survival probability at
/// the threshold, and the annual event frequency.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailModel {
    pub gpd: GpdParams,
    /// Empirical survival probability at the threshold, n_u / n.
    pub tail_prob: f64,
    /// Events per year.
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LossTaker {
    Insurer,
    Crfcif,
    Reinsurance,
    CatBond,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompensationLayer {
    pub name: String,
    pub lower: f64,
    /// None for the open-ended top layer.
    pub upper: Option<f64>,
    pub taker: LossTaker,
}

#[derive(Debug, Clone, Serialize)]
pub struct BacktestResult {
    pub level: f64,
    pub value: f64,
    pub theoretical_spillover: f64,
    pub exceed_count: usize,
    pub actual_rate: f64,
}

impl TailModel {
    fn validate(&self) -> Result<()> {
        if !(self.tail_prob > 0.0 && self.tail_prob <= 1.0) {
            return Err(Error::Domain(format!(
                "tail probability {} outside (0,1]",
                self.tail_prob
            )));
        }
        if self.gpd.scale <= 0.0 {
            return Err(Error::Domain(format!(
                "GPD scale {} not positive",
                self.gpd.scale
            )));
        }
        Ok(())
    }
}

/// Survival function beyond the threshold:
/// tail_prob * (1 + shape (x-u)/scale)^(-1/shape).
pub fn exceed_prob(x: f64, model: &TailModel) -> Result<f64> {
    model.validate()?;
    let GpdParams {
        scale,
        shape,
        threshold: u,
    } = model.gpd;
    if x <= u {
        return Err(Error::Domain(format!("x = {x} not above threshold {u}")));
    }
    if shape.abs() < SHAPE_EPS {
        return Ok(model.tail_prob * (-(x - u) / scale).exp());
    }
    let t = 1.0 + shape * (x - u) / scale;
    if t <= 0.0 {
        // beyond the finite upper endpoint
        return Ok(0.0);
    }
    Ok(model.tail_prob * t.powf(-1.0 / shape))
}

/// Loss level exceeded on average once per T observations.
pub fn return_level(t_years: f64, model: &TailModel) -> Result<f64> {
    model.validate()?;
    let GpdParams {
        scale,
        shape,
        threshold: u,
    } = model.gpd;
    let m = t_years * model.tail_prob;
    if m <= 1.0 {
        return Err(Error::Domain(format!(
            "return period {t_years} too short for tail probability {}",
            model.tail_prob
        )));
    }
    if shape.abs() < SHAPE_EPS {
        Ok(u + scale * m.ln())
    } else {
        Ok(u + scale / shape * (m.powf(shape) - 1.0))
    }
}

/// Value-at-Risk at level q by tail extrapolation.
pub fn var(q: f64, model: &TailModel) -> Result<f64> {
    model.validate()?;
    let GpdParams {
        scale,
        shape,
        threshold: u,
    } = model.gpd;
    if q <= 1.0 - model.tail_prob || q >= 1.0 {
        return Err(Error::Domain(format!(
            "VaR level {q} outside the extrapolation domain ({}, 1)",
            1.0 - model.tail_prob
        )));
    }
    let ratio = (1.0 - q) / model.tail_prob;
    if shape.abs() < SHAPE_EPS {
        Ok(u - scale * ratio.ln())
    } else {
        Ok(u + scale / shape * (ratio.powf(-shape) - 1.0))
    }
}

/// Conditional VaR (tail expectation beyond VaR). Requires the GEV-form
/// parameters of the underlying point process model: for shape < 1,
/// CVaR_q = VaR_q/(1-shape) + (scale - shape*location)/(1-shape), which
/// equals VaR_q plus the mean excess over VaR_q.
pub fn cvar(q: f64, model: &TailModel, gev: &GevParams) -> Result<f64> {
    if gev.shape >= 1.0 {
        return Err(Error::Model(format!(
            "CVaR undefined: shape {} >= 1 (infinite mean)",
            gev.shape
        )));
    }
    let v = var(q, model)?;
    if gev.shape.abs() < SHAPE_EPS {
        return Ok(v + model.gpd.scale);
    }
    Ok(v / (1.0 - gev.shape) + (gev.scale - gev.shape * gev.location) / (1.0 - gev.shape))
}

/// Expected aggregate annual loss of exceedance events: by Wald's identity
/// lambda times the mean event size, lambda (u + scale - shape*location)/(1-shape).
pub fn expected_annual_loss(model: &TailModel, gev: &GevParams) -> Result<f64> {
    if gev.shape >= 1.0 {
        return Err(Error::Model(format!(
            "expected loss undefined: shape {} >= 1 (infinite mean)",
            gev.shape
        )));
    }
    if model.lambda < 0.0 {
        return Err(Error::Domain(format!(
            "negative frequency {}",
            model.lambda
        )));
    }
    let u = model.gpd.threshold;
    if gev.shape.abs() < SHAPE_EPS {
        return Ok(model.lambda * (u + model.gpd.scale));
    }
    Ok(model.lambda * (u + gev.scale - gev.shape * gev.location) / (1.0 - gev.shape))
}

/// Count sample points strictly exceeding each risk-measure value.
pub fn backtest_spillover(sample: &[f64], measure_values: &[(f64, f64)]) -> Vec<BacktestResult> {
    let n = sample.len();
    measure_values
        .iter()
        .map(|&(level, value)| {
            let count = sample.iter().filter(|&&x| x > value).count();
            BacktestResult {
                level,
                value,
                theoretical_spillover: level,
                exceed_count: count,
                actual_rate: count as f64 / n as f64,
            }
        })
        .collect()
}

/// Build the layered compensation scheme: the first boundary is the VaR at
/// the lowest level, subsequent boundaries are CVaR at the intermediate
/// levels, and the last level's layer is open-ended. Takers are assigned
/// Insurer, CRFCIF, Reinsurance for the inner layers and CAT bond for the
/// top layer.
pub fn build_compensation_table(
    model: &TailModel,
    gev: &GevParams,
    levels: &[f64],
) -> Result<Vec<CompensationLayer>> {
    if levels.is_empty() {
        return Err(Error::Domain("no confidence levels given".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "confidence levels must be strictly ascending".into(),
        ));
    }
    let mut boundaries = vec![var(levels[0], model)?];
    for &q in levels.iter().take(levels.len().saturating_sub(1)).skip(1) {
        boundaries.push(cvar(q, model, gev)?);
    }
    if boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Model(format!(
            "non-monotone layer boundaries: {boundaries:?}"
        )));
    }
    let n_layers = boundaries.len() + 1;
    if n_layers > 4 {
        return Err(Error::Domain(format!(
            "{n_layers} layers exceed the four available loss takers"
        )));
    }
    let inner = [
        LossTaker::Insurer,
        LossTaker::Crfcif,
        LossTaker::Reinsurance,
    ];
    let ordinal = ["First", "Second", "Third", "Fourth"];
    let mut layers = Vec::with_capacity(n_layers);
    let mut lower = 0.0;
    for (i, &b) in boundaries.iter().enumerate() {
        layers.push(CompensationLayer {
            name: format!("{} level", ordinal[i]),
            lower,
            upper: Some(b),
            taker: inner[i],
        });
        lower = b;
    }
    layers.push(CompensationLayer {
        name: format!("{} level", ordinal[n_layers - 1]),
        lower,
        upper: None,
        taker: LossTaker::CatBond,
    });
    Ok(layers)
}

/// One line of the published-value comparison emitted with every risk
/// report: the value printed in the source tables, ours, and the relative
/// deviation. Deviations are reported, never silently reconciled.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceComparison {
    pub quantity: String,
    pub reference_value: f64,
    pub computed_value: f64,
    pub relative_deviation: f64,
}

impl ReferenceComparison {
    pub fn new(quantity: &str, reference_value: f64, computed_value: f64) -> Self {
        ReferenceComparison {
            quantity: quantity.to_string(),
            reference_value,
            computed_value,
            relative_deviation: (computed_value - reference_value) / reference_value,
        }
    }
}

/// Published VaR/CVaR reference values (billion) by significance level,
/// used for back-testing and the consistency report.
pub const REFERENCE_VAR: [(f64, f64); 5] = [
    (0.15, 28.76),
    (0.10, 35.53),
    (0.05, 46.97),
    (0.025, 58.26),
    (0.01, 72.94),
];

pub const REFERENCE_CVAR: [(f64, f64); 5] = [
    (0.15, 46.85),
    (0.10, 53.48),
    (0.05, 64.70),
    (0.025, 75.77),
    (0.01, 90.16),
];
