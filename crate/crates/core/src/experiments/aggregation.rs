//! Pooling equal-size units: the pooled direct Gini against the average of the units.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{stream_rng, StreamDomain};
use super::stats::Summary;
use crate::direct::{gini_of_union, Normalization};
use crate::distributions::{Family, TailDistribution};
use crate::error::{domain, Result};

/// One-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.326_347_874_040_841;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationConfig {
    pub units: usize,
    pub unit_size: usize,
    pub family: Family,
    pub alpha: f64,
    pub scale: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub normalization: Normalization,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        Self {
            units: 10,
            unit_size: 1_000,
            family: Family::ParetoI,
            alpha: 1.1,
            scale: 1.0,
            replications: 1_000,
            master_seed: 42,
            normalization: Normalization::PairUnbiased,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregationRecord {
    pub per_unit_mean: f64,
    pub weighted_average: f64,
    pub pooled: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationReport {
    pub config: AggregationConfig,
    pub analytic_target: f64,
    pub per_unit_mean_gini: f64,
    pub pooled_gini: f64,
    pub weighted_avg: f64,
    pub superadditivity_gap: f64,
    pub gap_std_error: f64,
    /// `gap / gap_std_error`.
    pub gap_z: f64,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl AggregationReport {
    /// Mean gap is positive at one-sided confidence level given by `z`.
    pub fn gap_positive_at(&self, z: f64) -> bool {
        self.superadditivity_gap - z * self.gap_std_error > 0.0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Pool `units` i.i.d. unit samples, once per replication.
///
/// Unit `u` of replication `r` draws from the stream `(master_seed, r, u)`.
pub fn run_aggregation_experiment(config: &AggregationConfig) -> Result<AggregationReport> {
    if config.units < 2 || config.unit_size < 2 {
        return Err(domain("aggregation needs units >= 2 and unit_size >= 2"));
    }
    if config.replications == 0 {
        return Err(domain("replications must be >= 1"));
    }
    let dist = crate::distributions::Distribution::new(config.family, config.alpha, config.scale)?;
    let target = dist.gini()?;
    let start = Instant::now();
    let records = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let units = (0..config.units)
                .map(|u| {
                    let mut rng = stream_rng(
                        config.master_seed,
                        StreamDomain::Aggregation,
                        r as u64,
                        u as u64,
                    );
                    dist.sample(config.unit_size, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            aggregate_units(&units, config.normalization)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(config.clone(), target, &records, start))
}

/// Per-unit, weighted and pooled Ginis for one set of units.
pub fn aggregate_units<S: AsRef<[f64]>>(
    units: &[S],
    normalization: Normalization,
) -> Result<AggregationRecord> {
    let union = gini_of_union(units, normalization)?;
    let per_unit_mean = union.parts.iter().map(|p| p.value).sum::<f64>() / union.parts.len() as f64;
    Ok(AggregationRecord {
        per_unit_mean,
        weighted_average: union.weighted_average,
        pooled: union.pooled.value,
        gap: union.gap(),
    })
}

fn summarize(
    config: AggregationConfig,
    target: f64,
    records: &[AggregationRecord],
    start: Instant,
) -> AggregationReport {
    let column = |f: fn(&AggregationRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    let mean = |v: Vec<f64>| Summary::of(&v).expect("replications >= 1").mean;
    let gap = Summary::of(&column(|r| r.gap)).expect("replications >= 1");
    let gap_std_error = gap.standard_error();
    AggregationReport {
        config,
        analytic_target: target,
        per_unit_mean_gini: mean(column(|r| r.per_unit_mean)),
        pooled_gini: mean(column(|r| r.pooled)),
        weighted_avg: mean(column(|r| r.weighted_average)),
        superadditivity_gap: gap.mean,
        gap_std_error,
        gap_z: if gap_std_error > 0.0 {
            gap.mean / gap_std_error
        } else {
            0.0
        },
        wall_time_secs: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_units_have_no_gap() {
        let units = vec![vec![4.0; 5]; 3];
        let rec = aggregate_units(&units, Normalization::PairUnbiased).unwrap();
        assert_eq!(rec.gap, 0.0);
        assert_eq!(rec.pooled, 0.0);
        assert_eq!(rec.per_unit_mean, 0.0);
    }

    #[test]
    fn rejects_small_configs() {
        let cfg = AggregationConfig {
            units: 1,
            ..AggregationConfig::default()
        };
        assert!(run_aggregation_experiment(&cfg).is_err());
    }
}
