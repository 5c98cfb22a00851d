//! Catastrophe-bond pricing: two-factor Vasicek discounting with closed-form
//! inner expectations, an aggregate-loss trigger driven by a compound
//! Poisson process with distorted generalized Pareto severities, a
//! block-parallel deterministic Monte Carlo pricer, and distortion
//! calibration / sensitivity sweeps.

pub mod calibrate;
pub mod normal;
pub mod pricing;
pub mod trigger;
pub mod vasicek;

pub use calibrate::{
    calibrate_kappa, sensitivity_sweep, CalibrationResult, SweepParameter, SweepPoint,
};
pub use pricing::{price_bond, riskless_coupon_bond, BondTerms, PriceResult};
pub use trigger::TriggerModel;
pub use vasicek::{OuParams, VasicekPair};
