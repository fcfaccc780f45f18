//! Globally adaptive Gauss–Kronrod (7/15) quadrature, with a compactifying
//! map for semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-10,
            max_subdivisions: 4_000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lower: f64, upper: f64) -> Result<Segment> {
    let center = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    if !value.is_finite() {
        return Err(domain(format!(
            "integrand is not finite on [{lower}, {upper}]"
        )));
    }
    let error = ((kronrod - gauss) * half).abs();
    Ok(Segment {
        lower,
        upper,
        value,
        error,
    })
}

/// Integrate `f` over the finite interval `[lower, upper]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    config: &QuadratureConfig,
) -> Result<Quadrature> {
    if !(lower.is_finite() && upper.is_finite()) {
        return Err(domain("integration bounds must be finite"));
    }
    if lower == upper {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    if lower > upper {
        let q = integrate(f, upper, lower, config)?;
        return Ok(Quadrature {
            value: -q.value,
            ..q
        });
    }

    let first = kronrod(&f, lower, upper)?;
    let mut total = first.value;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 1;

    while total_error > config.abs_tol.max(config.rel_tol * total.abs()) {
        if subdivisions >= config.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error_estimate: total_error,
                lower,
                upper,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lower + worst.upper);
        if mid <= worst.lower || mid >= worst.upper {
            // Interval exhausted at machine resolution; keep what we have.
            heap.push(worst);
            break;
        }
        let left = kronrod(&f, worst.lower, mid)?;
        let right = kronrod(&f, mid, worst.upper)?;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    // Re-sum in position order so the result does not carry drift from the running updates.
    let mut segments = heap.into_vec();
    segments.sort_by(|a, b| a.lower.total_cmp(&b.lower));
    let value = segments.iter().map(|s| s.value).sum();
    let error_estimate = segments.iter().map(|s| s.error).sum();
    Ok(Quadrature {
        value,
        error_estimate,
        subdivisions,
    })
}

/// Integrate `f` over `[lower, ∞)` through `x = lower + scale (1 − t) / t`, `t ∈ (0, 1]`.
///
/// With `lower > 0` and `scale = lower` this is the map `x = lower / t`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    scale: f64,
    config: &QuadratureConfig,
) -> Result<Quadrature> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(domain(format!("map scale must be positive, got {scale}")));
    }
    let mapped = |t: f64| {
        let x = lower + scale * (1.0 - t) / t;
        let jacobian = scale / (t * t);
        let fx = f(x);
        if fx == 0.0 {
            0.0
        } else {
            fx * jacobian
        }
    };
    integrate(mapped, 0.0, 1.0, config)
}

/// Gini coefficient of a distribution on `[lower, ∞)` from its survival function:
/// `G = 1 − (lower + ∫_lower^∞ S(x)² dx) / mean`.
///
/// `E min(X, X') = lower + ∫_lower^∞ S²` and `E|X − X'| = 2 (mean − E min)`.
pub fn integrate_survival_squared<S: Fn(f64) -> f64>(
    survival: S,
    lower: f64,
    mean: f64,
) -> Result<f64> {
    integrate_survival_squared_with(survival, lower, mean, &QuadratureConfig::default())
}

pub fn integrate_survival_squared_with<S: Fn(f64) -> f64>(
    survival: S,
    lower: f64,
    mean: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    if !(mean.is_finite() && mean > 0.0) {
        return Err(domain(format!(
            "mean must be finite and positive, got {mean}"
        )));
    }
    if !(lower.is_finite() && lower >= 0.0) {
        return Err(domain(format!(
            "lower bound must be finite and >= 0, got {lower}"
        )));
    }
    let scale = if lower > 0.0 { lower } else { mean };
    let q = integrate_semi_infinite(
        |x| {
            let s = survival(x);
            s * s
        },
        lower,
        scale,
        config,
    )?;
    let gini = 1.0 - (lower + q.value) / mean;
    // Quadrature noise may push a zero-dispersion result a hair below 0.
    Ok(if gini < 0.0 && gini > -config.abs_tol.max(1e-12) {
        0.0
    } else {
        gini
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let cfg = QuadratureConfig::default();
        let q = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &cfg).unwrap();
        assert!((q.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
        assert_eq!(q.subdivisions, 1);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let cfg = QuadratureConfig::default();
        let q = integrate(f64::exp, 1.0, 0.0, &cfg).unwrap();
        assert!((q.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn semi_infinite_exponential() {
        let cfg = QuadratureConfig::with_tolerance(1e-12, 1e-12);
        let q = integrate_semi_infinite(|x| (-x).exp(), 0.0, 1.0, &cfg).unwrap();
        assert!((q.value - 1.0).abs() < 1e-11);
        let q = integrate_semi_infinite(|x| x.powf(-2.5), 1.0, 1.0, &cfg).unwrap();
        assert!((q.value - 1.0 / 1.5).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_reports_last_estimate() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_subdivisions: 3,
        };
        let err = integrate(|x| (50.0 * x).sin().abs(), 0.0, 10.0, &cfg).unwrap_err();
        match err {
            Error::QuadratureNonConvergence { lower, upper, .. } => {
                assert_eq!((lower, upper), (0.0, 10.0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_rejected() {
        let cfg = QuadratureConfig::default();
        assert!(integrate(|_| f64::NAN, 0.0, 1.0, &cfg).is_err());
    }
}
