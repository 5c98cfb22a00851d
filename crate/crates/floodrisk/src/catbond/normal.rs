//! Standard normal CDF and quantile without an external dependency.
//!
//! The CDF uses Hart-style rational/continued-fraction approximations
//! (double precision, absolute error well below 1e-9 on the whole line);
//! the quantile uses a rational initial guess refined by one Halley step,
//! accurate to full double precision.

/// Standard normal cumulative distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    let z = x.abs();
    if z > 37.0 {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let e = (-z * z / 2.0).exp();
    let c = if z < 7.071_067_811_865_475 {
        // rational approximation on the central range
        let n = ((((((3.526_249_659_989_11e-2 * z + 0.700_383_064_443_688) * z
            + 6.373_962_203_531_65)
            * z
            + 33.912_866_078_383)
            * z
            + 112.079_291_497_871)
            * z
            + 221.213_596_169_931)
            * z
            + 220.206_867_912_376)
            * e;
        let d = (((((((8.838_834_764_831_84e-2 * z + 1.755_667_163_182_64) * z
            + 16.064_177_579_207)
            * z
            + 86.780_732_202_946_1)
            * z
            + 296.564_248_779_674)
            * z
            + 637.333_633_378_831)
            * z
            + 793.826_512_519_948)
            * z)
            + 440.413_735_824_752;
        n / d
    } else {
        // continued fraction in the far tail (nine levels keep the
        // relative error below 1e-11 out to the underflow cutoff)
        let mut b = z;
        for k in (1..=9).rev() {
            b = z + k as f64 / b;
        }
        e / (b * 2.506_628_274_631_000_5)
    };
    if x > 0.0 {
        1.0 - c
    } else {
        c
    }
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile for p in the open unit interval.
///
/// Initial guess by a low-order rational approximation in the central and
/// tail regions, then one Halley refinement against `norm_cdf`.
pub fn norm_ppf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "norm_ppf needs p in (0,1), got {p}");
    let x0 = ppf_guess(p);
    // Halley step: x1 = x0 - f/f' / (1 - f f''/(2 f'^2)) with f = cdf - p
    let f = norm_cdf(x0) - p;
    let d = norm_pdf(x0);
    if d == 0.0 {
        return x0;
    }
    let u = f / d;
    x0 - u / (1.0 + x0 * u / 2.0)
}

fn ppf_guess(p: f64) -> f64 {
    // Acklam-style piecewise rational approximation (relative error ~1e-9)
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -ppf_guess(1.0 - p)
    }
}
