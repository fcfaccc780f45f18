//! Empirical ("direct") Gini estimators.
//!
//! Two routes to the same number: the O(n²) pairwise mean difference and an
//! O(n log n) form over the sorted sample. Both use the identity
//!
//! ```text
//! Σ_i Σ_j |Y_i − Y_j| = 2 Σ_{k=1}^{n−1} k (n − k) (Y_(k+1) − Y_(k))
//! ```
//!
//! on the ordered side, which keeps every summand nonnegative, so ties
//! contribute exactly zero and a constant sample yields exactly 0.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Denominator convention for the direct estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `ΣΣ|Y_i − Y_j| / (2 (n − 1) ΣY)`: the mean over distinct pairs.
    #[default]
    PairUnbiased,
    /// `ΣΣ|Y_i − Y_j| / (2 n ΣY)`.
    Plugin,
}

impl Normalization {
    fn denominator(self, n: usize, total: f64) -> f64 {
        let pairs = match self {
            Normalization::PairUnbiased => (n - 1) as f64,
            Normalization::Plugin => n as f64,
        };
        2.0 * pairs * total
    }
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Normalization::PairUnbiased => "pair-unbiased",
            Normalization::Plugin => "plugin",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GiniMethod {
    DirectPairwise,
    DirectOrdered,
    MlDerived,
    Analytic,
}

impl std::fmt::Display for GiniMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GiniMethod::DirectPairwise => "direct-pairwise",
            GiniMethod::DirectOrdered => "direct-ordered",
            GiniMethod::MlDerived => "ml-derived",
            GiniMethod::Analytic => "analytic",
        })
    }
}

/// A Gini value with the method and bookkeeping that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiniResult {
    pub value: f64,
    pub method: GiniMethod,
    pub n: usize,
    /// Only meaningful for the direct methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Validates the estimator preconditions and returns `ΣY`.
fn validate(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: values.len(),
        });
    }
    if let Some((i, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(domain(format!(
            "direct Gini needs finite nonnegative values; got {v} at index {i}"
        )));
    }
    let total = compensated_sum(values.iter().copied());
    if total == 0.0 {
        return Err(Error::DegenerateSample("sum of values is zero".into()));
    }
    Ok(total)
}

fn finish(abs_diff_sum: f64, total: f64, n: usize, normalization: Normalization) -> f64 {
    (abs_diff_sum / normalization.denominator(n, total)).clamp(0.0, 1.0)
}

const PAIRWISE_BLOCK: usize = 128;

/// `Σ_i Σ_j |Y_i − Y_j|` by brute force. Rows are split into fixed blocks and
/// the block sums are reduced in block order, so the result does not depend
/// on the number of worker threads.
fn pairwise_abs_diff_sum(values: &[f64]) -> f64 {
    let n = values.len();
    let block_sums: Vec<f64> = (0..n.div_ceil(PAIRWISE_BLOCK))
        .into_par_iter()
        .map(|block| {
            let start = block * PAIRWISE_BLOCK;
            let end = (start + PAIRWISE_BLOCK).min(n);
            let mut acc = CompensatedSum::default();
            for i in start..end {
                let yi = values[i];
                for &yj in &values[i + 1..] {
                    acc.add((yi - yj).abs());
                }
            }
            acc.value()
        })
        .collect();
    2.0 * compensated_sum(block_sums)
}

/// `Σ_i Σ_j |Y_i − Y_j|` from an ascending sample.
fn ordered_abs_diff_sum(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let gaps = sorted.windows(2).enumerate().map(|(idx, w)| {
        let k = (idx + 1) as f64;
        k * (n as f64 - k) * (w[1] - w[0])
    });
    2.0 * compensated_sum(gaps)
}

/// Direct Gini via the double sum of absolute differences.
pub fn gini_pairwise(values: &[f64], normalization: Normalization) -> Result<GiniResult> {
    let total = validate(values)?;
    let n = values.len();
    Ok(GiniResult {
        value: finish(pairwise_abs_diff_sum(values), total, n, normalization),
        method: GiniMethod::DirectPairwise,
        n,
        normalization: Some(normalization),
    })
}

/// Direct Gini via order statistics; sorts a copy of the input.
pub fn gini_ordered(values: &[f64], normalization: Normalization) -> Result<GiniResult> {
    let total = validate(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(ordered_from_sorted(&sorted, total, normalization))
}

/// As [`gini_ordered`], sorting the caller's buffer in place.
pub fn gini_ordered_in_place(
    values: &mut [f64],
    normalization: Normalization,
) -> Result<GiniResult> {
    let total = validate(values)?;
    values.sort_by(f64::total_cmp);
    Ok(ordered_from_sorted(values, total, normalization))
}

fn ordered_from_sorted(sorted: &[f64], total: f64, normalization: Normalization) -> GiniResult {
    let n = sorted.len();
    GiniResult {
        value: finish(ordered_abs_diff_sum(sorted), total, n, normalization),
        method: GiniMethod::DirectOrdered,
        n,
        normalization: Some(normalization),
    }
}

/// Pooled Gini of several samples alongside the size-weighted mean of the parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionGini {
    pub pooled: GiniResult,
    pub parts: Vec<GiniResult>,
    pub weighted_average: f64,
}

impl UnionGini {
    /// Pooled minus weighted average; positive means super-additive.
    pub fn gap(&self) -> f64 {
        self.pooled.value - self.weighted_average
    }
}

pub fn gini_of_union<S: AsRef<[f64]>>(
    samples: &[S],
    normalization: Normalization,
) -> Result<UnionGini> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let parts = samples
        .iter()
        .map(|s| gini_ordered(s.as_ref(), normalization))
        .collect::<Result<Vec<_>>>()?;
    let total_n: usize = parts.iter().map(|p| p.n).sum();
    let weighted_average =
        compensated_sum(parts.iter().map(|p| p.value * p.n as f64 / total_n as f64));
    let mut pooled: Vec<f64> = Vec::with_capacity(total_n);
    for s in samples {
        pooled.extend_from_slice(s.as_ref());
    }
    let pooled = gini_ordered_in_place(&mut pooled, normalization)?;
    Ok(UnionGini {
        pooled,
        parts,
        weighted_average,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample_is_exactly_zero() {
        let v = vec![3.7; 17];
        assert_eq!(
            gini_pairwise(&v, Normalization::PairUnbiased)
                .unwrap()
                .value,
            0.0
        );
        assert_eq!(gini_ordered(&v, Normalization::Plugin).unwrap().value, 0.0);
    }

    #[test]
    fn single_holder_is_one() {
        let v = [0.0, 5.0];
        assert_eq!(
            gini_pairwise(&v, Normalization::PairUnbiased)
                .unwrap()
                .value,
            1.0
        );
        assert_eq!(
            gini_ordered(&v, Normalization::PairUnbiased).unwrap().value,
            1.0
        );
        assert_eq!(gini_ordered(&v, Normalization::Plugin).unwrap().value, 0.5);
    }

    #[test]
    fn one_two_three() {
        let g = gini_ordered(&[1.0, 2.0, 3.0], Normalization::PairUnbiased).unwrap();
        assert!((g.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.method, GiniMethod::DirectOrdered);
        assert_eq!(g.n, 3);
        let p = gini_ordered(&[3.0, 1.0, 2.0], Normalization::Plugin).unwrap();
        assert!((p.value - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn error_paths() {
        assert_eq!(
            gini_ordered(&[1.0], Normalization::PairUnbiased),
            Err(Error::InsufficientData { needed: 2, got: 1 })
        );
        assert!(matches!(
            gini_pairwise(&[0.0, 0.0], Normalization::PairUnbiased),
            Err(Error::DegenerateSample(_))
        ));
        assert!(matches!(
            gini_ordered(&[1.0, -1.0, 2.0], Normalization::PairUnbiased),
            Err(Error::Domain(_))
        ));
        assert!(gini_of_union(&[vec![1.0, 2.0]], Normalization::Plugin).is_err());
    }

    #[test]
    fn union_of_constant_groups_is_positive() {
        let u = gini_of_union(
            &[vec![2.0, 2.0], vec![5.0, 5.0]],
            Normalization::PairUnbiased,
        )
        .unwrap();
        assert_eq!(u.weighted_average, 0.0);
        assert!(u.pooled.value > 0.0);
        assert!(u.gap() > 0.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s = compensated_sum([1e16, 1.0, -1e16, 1.0]);
        assert_eq!(s, 2.0);
    }
}
