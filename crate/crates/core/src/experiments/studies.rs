//! Analytic studies of the derived-Gini law: series convergence in the number
//! of terms, and the decline of its standard deviation with sample size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{stream_rng, StreamDomain};
use super::stats::Summary;
use super::{fmt_opt, fmt_real};
use crate::distributions::{ParetoSpec, TailDistribution};
use crate::error::{domain, Result};
use crate::tail_ml::{derived_gini, ml_alpha, DerivedGiniDistribution, ScaleChoice};

pub const CONVERGENCE_CSV_HEADER: &str = "terms,mu1";
pub const STD_DECLINE_CSV_HEADER: &str =
    "n,analytic_mean,analytic_std,mc_mean,mc_std,mc_accepted,mc_rejected";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub terms: usize,
    pub mu1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub distribution: DerivedGiniDistribution,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CONVERGENCE_CSV_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!("{},{}\n", r.terms, fmt_real(r.mu1)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Partial sums of the first-moment series for `U = 1..=max_terms`.
pub fn run_convergence_study(
    dist: &DerivedGiniDistribution,
    max_terms: usize,
) -> Result<ConvergenceTable> {
    if max_terms == 0 {
        return Err(domain("max_terms must be >= 1"));
    }
    let rows = dist
        .moment_partial_sums(1, max_terms)?
        .into_iter()
        .enumerate()
        .map(|(i, mu1)| ConvergenceRow { terms: i + 1, mu1 })
        .collect();
    Ok(ConvergenceTable {
        distribution: *dist,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StdDeclineConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub sizes: Vec<usize>,
    /// Monte Carlo replications per size; 0 skips the simulation column.
    pub replications: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StdDeclineRow {
    pub n: usize,
    pub analytic_mean: f64,
    pub analytic_std: f64,
    pub mc_mean: Option<f64>,
    pub mc_std: Option<f64>,
    pub mc_accepted: usize,
    pub mc_rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StdDeclineTable {
    pub config: StdDeclineConfig,
    pub rows: Vec<StdDeclineRow>,
}

impl StdDeclineTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{STD_DECLINE_CSV_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                fmt_real(r.analytic_mean),
                fmt_real(r.analytic_std),
                fmt_opt(r.mc_mean),
                fmt_opt(r.mc_std),
                r.mc_accepted,
                r.mc_rejected
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Standard deviation of the ML-derived Gini against sample size, from the
/// moment series and from accepted Pareto I(α, 1) replications.
pub fn run_std_decline_study(config: &StdDeclineConfig) -> Result<StdDeclineTable> {
    if config.sizes.is_empty() {
        return Err(domain("at least one sample size is required"));
    }
    let spec = ParetoSpec::new(config.alpha, 1.0)?;
    let mut rows = Vec::with_capacity(config.sizes.len());
    for &n in &config.sizes {
        let dist = DerivedGiniDistribution::new(config.alpha, n, config.epsilon)?;
        let (analytic_mean, analytic_std) = dist.mean_std()?;
        let estimates = (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream_rng(
                    config.master_seed,
                    StreamDomain::StdDecline,
                    n as u64,
                    r as u64,
                );
                let sample = spec.sample(n, &mut rng)?;
                let est = ml_alpha(sample.values(), ScaleChoice::Known(1.0), config.epsilon)?;
                Ok(derived_gini(&est).ok().map(|g| g.value))
            })
            .collect::<Result<Vec<Option<f64>>>>()?;
        let accepted: Vec<f64> = estimates.iter().flatten().copied().collect();
        let mc = Summary::of(&accepted);
        rows.push(StdDeclineRow {
            n,
            analytic_mean,
            analytic_std,
            mc_mean: mc.map(|s| s.mean),
            mc_std: mc.filter(|s| s.count > 1).map(|s| s.std),
            mc_accepted: accepted.len(),
            mc_rejected: estimates.len() - accepted.len(),
        });
    }
    Ok(StdDeclineTable {
        config: config.clone(),
        rows,
    })
}
