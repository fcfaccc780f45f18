//! Direct versus ML-derived Gini across sample sizes.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::replication_rng;
use super::stats::Summary;
use super::{fmt_opt, fmt_real};
use crate::direct::{gini_ordered_in_place, Normalization};
use crate::distributions::{Distribution, Family, TailDistribution};
use crate::error::{domain, Result};
use crate::tail_ml::{ml_alpha, ScaleChoice, DEFAULT_EPSILON};

pub const TABLE_CSV_HEADER: &str =
    "n,direct_mean,direct_bias,direct_std,ml_mean,ml_std,ml_rejections,error_ratio";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: Family,
    pub alpha: f64,
    /// `L` for Pareto I, `λ` for Lomax.
    pub scale: f64,
    pub sizes: Vec<usize>,
    /// Replications per size; `None` uses [`default_replications`].
    pub replications: Option<usize>,
    pub epsilon: f64,
    pub master_seed: u64,
    pub normalization: Normalization,
    /// Keep every replication record in the report.
    #[serde(default)]
    pub keep_raw: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::ParetoI,
            alpha: 1.1,
            scale: 1.0,
            sizes: vec![1_000, 10_000],
            replications: None,
            epsilon: DEFAULT_EPSILON,
            master_seed: 42,
            normalization: Normalization::PairUnbiased,
            keep_raw: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(domain(format!(
                "experiments need alpha > 1 for a finite Gini, got {}",
                self.alpha
            )));
        }
        if self.sizes.is_empty() {
            return Err(domain("at least one sample size is required"));
        }
        if let Some(n) = self.sizes.iter().find(|n| **n < 2) {
            return Err(domain(format!("sample sizes must be >= 2, got {n}")));
        }
        if self.replications == Some(0) {
            return Err(domain("replications must be >= 1"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(domain(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        self.distribution().map(|_| ())
    }

    pub fn distribution(&self) -> Result<Distribution> {
        Distribution::new(self.family, self.alpha, self.scale)
    }

    pub fn replications_for(&self, n: usize) -> usize {
        self.replications.unwrap_or_else(|| default_replications(n))
    }
}

/// Desk-scale replication counts: 5000 at n = 10³ tapering to 100 at n = 10⁶.
pub fn default_replications(n: usize) -> usize {
    match n {
        0..=1_000 => 5_000,
        1_001..=10_000 => 2_000,
        10_001..=100_000 => 500,
        _ => 100,
    }
}

/// Outcome of one simulated sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub n: usize,
    pub replication: usize,
    pub direct_gini: f64,
    pub alpha_hat: f64,
    pub alpha_debiased: f64,
    /// `None` when the tail estimate was rejected (`α̂′ ≤ 1 + ε`).
    pub ml_gini: Option<f64>,
}

/// Draw one sample and compute both estimators.
pub fn run_replication<R: Rng + ?Sized>(
    dist: &Distribution,
    n: usize,
    replication: usize,
    epsilon: f64,
    normalization: Normalization,
    rng: &mut R,
) -> Result<ReplicationRecord> {
    let mut values = dist.sample(n, rng)?.into_values();
    // Lomax(α, λ) shifted by λ is Pareto I(α, λ) with known bound.
    let estimate = match dist {
        Distribution::Pareto(p) => ml_alpha(&values, ScaleChoice::Known(p.scale()), epsilon)?,
        Distribution::Lomax(l) => {
            let shifted: Vec<f64> = values.iter().map(|x| x + l.scale()).collect();
            ml_alpha(&shifted, ScaleChoice::Known(l.scale()), epsilon)?
        }
    };
    let direct = gini_ordered_in_place(&mut values, normalization)?;
    let ml_gini = estimate
        .accepted
        .then(|| dist.family().gini_from_alpha(estimate.alpha_debiased));
    Ok(ReplicationRecord {
        n,
        replication,
        direct_gini: direct.value,
        alpha_hat: estimate.alpha_hat,
        alpha_debiased: estimate.alpha_debiased,
        ml_gini,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub replications: usize,
    pub direct_mean: f64,
    pub direct_bias: f64,
    pub direct_std: f64,
    pub direct_skewness: f64,
    pub direct_max: f64,
    pub ml_mean: Option<f64>,
    pub ml_std: Option<f64>,
    pub ml_rejections: usize,
    pub error_ratio: Option<f64>,
}

impl TableRow {
    fn from_records(n: usize, records: &[ReplicationRecord], target: f64) -> Self {
        let direct: Vec<f64> = records.iter().map(|r| r.direct_gini).collect();
        let ml: Vec<f64> = records.iter().filter_map(|r| r.ml_gini).collect();
        let d = Summary::of(&direct).expect("at least one replication");
        let m = Summary::of(&ml);
        let ml_std = m.filter(|s| s.count > 1).map(|s| s.std);
        Self {
            n,
            replications: records.len(),
            direct_mean: d.mean,
            direct_bias: d.mean - target,
            direct_std: d.std,
            direct_skewness: d.skewness,
            direct_max: d.max,
            ml_mean: m.map(|s| s.mean),
            ml_std,
            ml_rejections: records.len() - ml.len(),
            error_ratio: ml_std.filter(|s| *s > 0.0).map(|s| d.std / s),
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            fmt_real(self.direct_mean),
            fmt_real(self.direct_bias),
            fmt_real(self.direct_std),
            fmt_opt(self.ml_mean),
            fmt_opt(self.ml_std),
            self.ml_rejections,
            fmt_opt(self.error_ratio),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub analytic_target: f64,
    pub rows: Vec<TableRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raw: Option<Vec<ReplicationRecord>>,
    /// Not serialized: reports must be byte-identical across runs.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TABLE_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn row(&self, n: usize) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

pub fn run_table_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let dist = config.distribution()?;
    let target = dist.gini()?;
    let mut rows = Vec::with_capacity(config.sizes.len());
    let mut raw = config.keep_raw.then(Vec::new);
    for &n in &config.sizes {
        let reps = config.replications_for(n);
        let records = (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = replication_rng(config.master_seed, n, r);
                run_replication(&dist, n, r, config.epsilon, config.normalization, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(TableRow::from_records(n, &records, target));
        if let Some(raw) = raw.as_mut() {
            raw.extend(records);
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        analytic_target: target,
        rows,
        raw,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
