//! Distortion calibration: bisection on kappa until the Monte Carlo price
//! (common random numbers via a fixed seed) meets the target, plus the
//! sensitivity sweeps over kappa and the severity shape.

use serde::Serialize;

use super::pricing::{price_bond, BondTerms, PriceResult};
use super::trigger::TriggerModel;
use super::vasicek::VasicekPair;
use crate::error::Error;
use crate::Result;

/// Absolute price tolerance (currency units) for calibration.
pub const CALIBRATION_TOL: f64 = 0.5;
const MAX_BISECTIONS: usize = 60;

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationResult {
    pub kappa: f64,
    pub price: f64,
    pub target: f64,
    pub iterations: usize,
    pub n_paths: usize,
    pub seed: u64,
}

/// Bisect on kappa with a fixed seed so every evaluation shares the same
/// random numbers; the price is monotone decreasing in kappa, so the
/// bracket must satisfy price(lo) > target > price(hi).
#[allow(clippy::too_many_arguments)]
pub fn calibrate_kappa(
    terms: &BondTerms,
    trigger: &TriggerModel,
    rates: &VasicekPair,
    target: f64,
    bracket: (f64, f64),
    n_paths: usize,
    seed: u64,
) -> Result<CalibrationResult> {
    let (mut lo, mut hi) = bracket;
    // rejects NaN endpoints as well as an empty or reversed bracket
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::Domain(format!("invalid bracket ({lo}, {hi})")));
    }
    let price_at =
        |kappa: f64| price_bond(terms, trigger, rates, kappa, n_paths, seed).map(|r| r.price);
    let p_lo = price_at(lo)?;
    let p_hi = price_at(hi)?;
    if !(p_lo > target && target > p_hi) {
        return Err(Error::Model(format!(
            "bracket does not straddle the target: price({lo}) = {p_lo:.2}, \
             price({hi}) = {p_hi:.2}, target = {target:.2}"
        )));
    }
    let mut mid = 0.5 * (lo + hi);
    let mut p_mid = price_at(mid)?;
    let mut iterations = 1;
    while (p_mid - target).abs() >= CALIBRATION_TOL && iterations < MAX_BISECTIONS {
        if p_mid > target {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        p_mid = price_at(mid)?;
        iterations += 1;
    }
    Ok(CalibrationResult {
        kappa: mid,
        price: p_mid,
        target,
        iterations,
        n_paths,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParameter {
    Kappa,
    Shape,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub price: Option<f64>,
    pub std_error: Option<f64>,
    /// Set when the grid point violates model validity.
    pub flagged: Option<String>,
}

/// Price the bond across a parameter grid under common random numbers.
/// For the shape sweep the severity scale is adjusted to hold scale/shape
/// constant at its baseline value.
#[allow(clippy::too_many_arguments)]
pub fn sensitivity_sweep(
    parameter: SweepParameter,
    grid: &[f64],
    terms: &BondTerms,
    trigger: &TriggerModel,
    rates: &VasicekPair,
    kappa: f64,
    n_paths: usize,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() {
        return Err(Error::Domain("empty sweep grid".into()));
    }
    let scale_over_shape = trigger.severity.scale / trigger.severity.shape;
    grid.iter()
        .map(|&value| {
            let result: Result<PriceResult> = match parameter {
                SweepParameter::Kappa => price_bond(terms, trigger, rates, value, n_paths, seed),
                SweepParameter::Shape => {
                    let mut t = trigger.clone();
                    t.severity.shape = value;
                    t.severity.scale = scale_over_shape * value;
                    if t.severity.scale <= 0.0 {
                        return Ok(SweepPoint {
                            value,
                            price: None,
                            std_error: None,
                            flagged: Some(format!(
                                "shape {value} gives nonpositive scale {}",
                                t.severity.scale
                            )),
                        });
                    }
                    price_bond(terms, &t, rates, kappa, n_paths, seed)
                }
            };
            match result {
                Ok(r) => Ok(SweepPoint {
                    value,
                    price: Some(r.price),
                    std_error: Some(r.std_error),
                    flagged: None,
                }),
                Err(Error::Domain(msg)) | Err(Error::Model(msg)) => Ok(SweepPoint {
                    value,
                    price: None,
                    std_error: None,
                    flagged: Some(msg),
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}
