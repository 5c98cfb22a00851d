//! Compound Poisson trigger process: Poisson event times, Wang-distorted
//! GPD severities, layered principal wipe fractions, and the payoff /
//! wipe-out time bookkeeping.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::normal::{norm_cdf, norm_ppf};
use crate::error::Error;
use crate::evt::{GpdParams, SHAPE_EPS};
use crate::Result;

/// Layered parametric trigger: each event whose severity falls in layer j
/// wipes the layer's fraction of principal; events above the top
/// threshold wipe the top fraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriggerModel {
    /// (lower threshold in mm, wipe fraction); thresholds strictly
    /// increasing, each layer reaching to the next threshold and the last
    /// one unbounded.
    pub layers: Vec<(f64, f64)>,
    /// Event frequency per year.
    pub lambda: f64,
    /// Severity model for precipitation over its threshold.
    pub severity: GpdParams,
}

impl TriggerModel {
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Domain("trigger needs at least one layer".into()));
        }
        if self.layers.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Domain(
                "layer thresholds must be strictly increasing".into(),
            ));
        }
        if self.layers.iter().any(|&(_, f)| !(0.0..=1.0).contains(&f)) {
            return Err(Error::Domain("wipe fractions must lie in [0,1]".into()));
        }
        if self.lambda < 0.0 {
            return Err(Error::Domain(format!(
                "negative event rate {}",
                self.lambda
            )));
        }
        if self.severity.scale <= 0.0 {
            return Err(Error::Domain("severity scale must be positive".into()));
        }
        Ok(())
    }
}

/// Uniform draw on the open interval (0,1).
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // 53 random bits offset by half a ulp: never exactly 0 or 1
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Homogeneous Poisson arrivals on [0, horizon] via exponential
/// inter-arrival times.
pub fn simulate_event_times<R: Rng + ?Sized>(lambda: f64, horizon: f64, rng: &mut R) -> Vec<f64> {
    let mut times = Vec::new();
    if lambda <= 0.0 {
        return times;
    }
    let mut t = 0.0;
    loop {
        t += -open_unit(rng).ln() / lambda;
        if t > horizon {
            break;
        }
        times.push(t);
    }
    times
}

/// One severity draw under the distorted measure: the GPD quantile
/// transform with the uniform's tail shifted through the normal, so kappa
/// = 0 recovers the plain inverse-CDF draw and kappa > 0 loads the tail.
pub fn sample_severity_distorted<R: Rng + ?Sized>(gpd: &GpdParams, kappa: f64, rng: &mut R) -> f64 {
    let u = open_unit(rng);
    let tail = 1.0 - norm_cdf(norm_ppf(u) + kappa);
    if gpd.shape.abs() < SHAPE_EPS {
        gpd.threshold - gpd.scale * tail.ln()
    } else {
        (tail.powf(-gpd.shape) - 1.0) * gpd.scale / gpd.shape + gpd.threshold
    }
}

/// Principal fraction wiped by one event of the given severity.
pub fn trigger_increment(severity: f64, layers: &[(f64, f64)]) -> f64 {
    let mut frac = 0.0;
    for (i, &(lower, wipe)) in layers.iter().enumerate() {
        let upper = layers.get(i + 1).map(|&(u, _)| u).unwrap_or(f64::INFINITY);
        if severity > lower && severity <= upper {
            frac = wipe;
            break;
        }
    }
    frac
}

/// Remaining-principal fraction.
pub fn payoff(y: f64) -> f64 {
    (1.0 - y).max(0.0)
}

/// One simulated trigger path.
#[derive(Debug, Clone)]
pub struct TriggerPath {
    pub event_times: Vec<f64>,
    pub severities: Vec<f64>,
    /// Cumulative wiped fraction after each event.
    pub cumulative: Vec<f64>,
    /// First time the cumulative fraction reaches 1, if any.
    pub wipeout: Option<f64>,
}

impl TriggerPath {
    pub fn build(event_times: Vec<f64>, severities: Vec<f64>, layers: &[(f64, f64)]) -> Self {
        let mut cumulative = Vec::with_capacity(event_times.len());
        let mut y = 0.0;
        let mut wipeout = None;
        for (&t, &x) in event_times.iter().zip(&severities) {
            y += trigger_increment(x, layers);
            cumulative.push(y);
            if wipeout.is_none() && y >= 1.0 {
                wipeout = Some(t);
            }
        }
        TriggerPath {
            event_times,
            severities,
            cumulative,
            wipeout,
        }
    }

    /// Cumulative wiped fraction at time t (right-continuous).
    pub fn y_at(&self, t: f64) -> f64 {
        let mut y = 0.0;
        for (&et, &c) in self.event_times.iter().zip(&self.cumulative) {
            if et <= t {
                y = c;
            } else {
                break;
            }
        }
        y
    }
}

/// First time the cumulative wiped fraction reaches 1, if any.
pub fn wipeout_time(path: &TriggerPath) -> Option<f64> {
    path.wipeout
}
