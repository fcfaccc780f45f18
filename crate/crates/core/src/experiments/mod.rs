//! Deterministic Monte Carlo harness.
//!
//! Replications are the unit of parallel work. Each one owns a random stream
//! derived from `(master_seed, n, replication)`, results land in index-ordered
//! slots, and every reduction runs sequentially over those slots, so reports
//! are byte-identical for any thread count.

mod aggregation;
mod histogram;
pub mod rng;
mod stats;
mod studies;
mod table;

pub use aggregation::{
    aggregate_units, run_aggregation_experiment, AggregationConfig, AggregationRecord,
    AggregationReport, Z_99,
};
pub use histogram::{emit_histogram, Histogram, HistogramBin, HISTOGRAM_CSV_HEADER};
pub use stats::Summary;
pub use studies::{
    run_convergence_study, run_std_decline_study, ConvergenceRow, ConvergenceTable,
    StdDeclineConfig, StdDeclineRow, StdDeclineTable, CONVERGENCE_CSV_HEADER,
    STD_DECLINE_CSV_HEADER,
};
pub use table::{
    default_replications, run_replication, run_table_experiment, ExperimentConfig,
    ExperimentReport, ReplicationRecord, TableRow, TABLE_CSV_HEADER,
};

use crate::error::{domain, Result};

/// Run `f` on a dedicated pool of `threads` workers (`None`: rayon's default).
pub fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(domain("thread count must be >= 1"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| domain(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Shortest round-trip decimal form.
pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_real).unwrap_or_default()
}
