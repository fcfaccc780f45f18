//! Indirect Gini estimation through the maximum-likelihood tail exponent.
//!
//! For Pareto I data with known scale `L`, `α̂ = n / Σ ln(x_i / L)`. Since
//! `Σ ln(x_i / L)` is Gamma(n, rate α), `α̂` is inverse-gamma with shape `n`
//! and scale `α n`, and the debiased `α̂′ = (n − 1)/n · α̂` is inverse-gamma
//! with shape `n` and scale `α (n − 1)`. Conditioning `α̂′ > 1 + ε` gives the
//! truncated law, and `G = 1/(2α̂′ − 1)` maps it onto `(0, 1/(2ε + 1)]`.

use serde::{Deserialize, Serialize};

use crate::direct::{GiniMethod, GiniResult};
use crate::error::{domain, Error, Result};
use crate::numerics::{log_gamma_unchecked, reg_gamma_p, reg_gamma_q};

/// Truncation margin used when the caller does not choose one.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// How the lower support bound `L` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum ScaleChoice {
    Known(f64),
    /// Use the sample minimum; the minimum is then dropped from the likelihood.
    SampleMinimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub alpha_hat: f64,
    pub alpha_debiased: f64,
    /// Number of log-exceedances in the likelihood.
    pub n: usize,
    pub epsilon: f64,
    pub accepted: bool,
    pub scale_l: f64,
    pub scale_estimated: bool,
}

impl TailEstimate {
    /// Builds the estimate from the sufficient statistic `Σ ln(x_i / L)`.
    pub fn from_log_sum(
        log_sum: f64,
        n: usize,
        scale_l: f64,
        scale_estimated: bool,
        epsilon: f64,
    ) -> Result<Self> {
        check_epsilon(epsilon, true)?;
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        if log_sum <= 0.0 {
            return Err(Error::InfiniteEstimate { scale: scale_l });
        }
        let alpha_hat = n as f64 / log_sum;
        let alpha_debiased = alpha_hat * ((n - 1) as f64 / n as f64);
        Ok(Self {
            alpha_hat,
            alpha_debiased,
            n,
            epsilon,
            accepted: alpha_debiased > 1.0 + epsilon,
            scale_l,
            scale_estimated,
        })
    }

    pub fn cutoff(&self) -> f64 {
        1.0 + self.epsilon
    }
}

fn check_epsilon(epsilon: f64, allow_zero: bool) -> Result<()> {
    let ok = epsilon.is_finite() && (epsilon > 0.0 || (allow_zero && epsilon == 0.0));
    if ok {
        Ok(())
    } else {
        Err(domain(format!(
            "epsilon must be finite and positive, got {epsilon}"
        )))
    }
}

/// Maximum-likelihood tail exponent of a Pareto I sample.
pub fn ml_alpha(values: &[f64], scale: ScaleChoice, epsilon: f64) -> Result<TailEstimate> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: values.len(),
        });
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
        return Err(domain(format!(
            "tail estimation needs finite positive values, got {v}"
        )));
    }
    let (scale_l, estimated) = match scale {
        ScaleChoice::Known(l) => {
            if !(l.is_finite() && l > 0.0) {
                return Err(domain(format!(
                    "scale L must be finite and positive, got {l}"
                )));
            }
            (l, false)
        }
        ScaleChoice::SampleMinimum => (values.iter().copied().fold(f64::INFINITY, f64::min), true),
    };
    if let Some(v) = values.iter().find(|v| **v < scale_l) {
        return Err(domain(format!(
            "value {v} lies below the scale bound {scale_l}"
        )));
    }
    let log_sum: f64 = values.iter().map(|x| (x / scale_l).ln()).sum();
    // With an estimated bound one observation (the minimum) contributes ln 1 = 0 by construction.
    let n = if estimated {
        values.len() - 1
    } else {
        values.len()
    };
    TailEstimate::from_log_sum(log_sum, n, scale_l, estimated, epsilon)
}

/// `G = 1/(2α̂′ − 1)` for an accepted estimate.
pub fn derived_gini(estimate: &TailEstimate) -> Result<GiniResult> {
    if !estimate.accepted {
        return Err(Error::InfiniteMean {
            alpha_debiased: estimate.alpha_debiased,
            cutoff: estimate.cutoff(),
        });
    }
    Ok(GiniResult {
        value: 1.0 / (2.0 * estimate.alpha_debiased - 1.0),
        method: GiniMethod::MlDerived,
        n: estimate.n,
        normalization: None,
    })
}

fn check_law_args(alpha: f64, n: usize, min_n: usize) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(domain(format!(
            "alpha must be finite and positive, got {alpha}"
        )));
    }
    if n < min_n {
        return Err(Error::InsufficientData {
            needed: min_n,
            got: n,
        });
    }
    Ok(())
}

/// Inverse-gamma log density with the given shape and scale.
fn ln_inverse_gamma(a: f64, shape: f64, scale: f64) -> f64 {
    shape * scale.ln() - log_gamma_unchecked(shape) - (shape + 1.0) * a.ln() - scale / a
}

fn check_point(a: f64) -> Result<()> {
    if a.is_nan() {
        Err(domain("evaluation point is NaN"))
    } else {
        Ok(())
    }
}

/// Density of the raw estimator `α̂`: inverse-gamma, shape `n`, scale `α n`.
pub fn pdf_alpha_hat(a: f64, alpha: f64, n: usize) -> Result<f64> {
    check_law_args(alpha, n, 1)?;
    check_point(a)?;
    if a <= 0.0 || a.is_infinite() {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok(ln_inverse_gamma(a, nf, alpha * nf).exp())
}

/// Distribution function of `α̂`: `Q(n, α n / a)`.
pub fn cdf_alpha_hat(a: f64, alpha: f64, n: usize) -> Result<f64> {
    check_law_args(alpha, n, 1)?;
    check_point(a)?;
    if a <= 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    reg_gamma_q(nf, alpha * nf / a)
}

/// Density of the debiased estimator `α̂′`: inverse-gamma, shape `n`, scale `α (n − 1)`.
pub fn pdf_alpha_debiased(a: f64, alpha: f64, n: usize) -> Result<f64> {
    check_law_args(alpha, n, 2)?;
    check_point(a)?;
    if a <= 0.0 || a.is_infinite() {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok(ln_inverse_gamma(a, nf, alpha * (nf - 1.0)).exp())
}

/// Density of `α̂′` conditional on `α̂′ ≥ 1 + ε`.
pub fn pdf_alpha_truncated(a: f64, alpha: f64, n: usize, epsilon: f64) -> Result<f64> {
    DerivedGiniDistribution::new(alpha, n, epsilon)?.pdf_alpha_truncated(a)
}

/// Density of the derived Gini, evaluated at `g`.
pub fn pdf_derived_gini(g: f64, dist: &DerivedGiniDistribution) -> Result<f64> {
    dist.pdf(g)
}

/// Value of the `m`-th moment series and how it terminated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSeries {
    pub value: f64,
    pub terms_used: usize,
    pub last_relative_term: f64,
}

/// Finite-sample law of `G = 1/(2α̂″ − 1)` for true exponent `alpha`,
/// sample size `n` and truncation margin `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedGiniDistribution {
    alpha: f64,
    n: usize,
    epsilon: f64,
    #[serde(skip)]
    ln_tail_mass: f64,
}

impl DerivedGiniDistribution {
    pub fn new(alpha: f64, n: usize, epsilon: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::UndefinedMean { alpha });
        }
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        check_epsilon(epsilon, false)?;
        let mut dist = Self {
            alpha,
            n,
            epsilon,
            ln_tail_mass: 0.0,
        };
        let mass = reg_gamma_p(n as f64, dist.beta())?;
        if mass <= 0.0 {
            return Err(Error::DegenerateSample(format!(
                "no probability mass above 1 + epsilon for alpha={alpha}, n={n}, epsilon={epsilon}"
            )));
        }
        dist.ln_tail_mass = mass.ln();
        Ok(dist)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Inverse-gamma scale of `α̂′`.
    pub fn scale(&self) -> f64 {
        self.alpha * (self.n as f64 - 1.0)
    }

    /// Argument of the tail-mass gamma term: `scale / (1 + ε)`.
    pub fn beta(&self) -> f64 {
        self.scale() / (1.0 + self.epsilon)
    }

    /// `P(α̂′ ≥ 1 + ε) = P(n, β)`.
    pub fn tail_mass(&self) -> f64 {
        self.ln_tail_mass.exp()
    }

    /// Upper end of the derived-Gini support, `1/(2ε + 1)`.
    pub fn support_upper(&self) -> f64 {
        1.0 / (2.0 * self.epsilon + 1.0)
    }

    pub fn pdf_alpha_truncated(&self, a: f64) -> Result<f64> {
        check_point(a)?;
        if a < 1.0 + self.epsilon || a.is_infinite() {
            return Ok(0.0);
        }
        let nf = self.n as f64;
        Ok((ln_inverse_gamma(a, nf, self.scale()) - self.ln_tail_mass).exp())
    }

    pub fn pdf(&self, g: f64) -> Result<f64> {
        check_point(g)?;
        if g <= 0.0 || g > self.support_upper() {
            return Ok(0.0);
        }
        let nf = self.n as f64;
        let u = g / (1.0 + g);
        let su = self.scale() * u;
        let ln_density = nf * std::f64::consts::LN_2 - 2.0 * su + nf * su.ln()
            - g.ln()
            - g.ln_1p()
            - log_gamma_unchecked(nf)
            - self.ln_tail_mass;
        Ok(ln_density.exp())
    }

    /// Natural log of the `i`-th series term for moment `m`, and the next
    /// term's log via the ratio recurrence.
    fn series_terms(&self, m: u32) -> impl Iterator<Item = Result<f64>> + '_ {
        let nf = self.n as f64;
        let beta = self.beta();
        let c = 1.0 / (2.0 * self.epsilon + 2.0);
        let ln_ratio = (c / beta).ln();
        let mf = m as f64;
        // ln of the i = 0 term without the gamma-tail factor:
        // m ln(c/β) + ln Γ(n+m) − ln Γ(n) − ln P(n, β)
        let ln_gamma_shift: f64 = (0..m).map(|j| (nf + j as f64).ln()).sum();
        let mut ln_base = mf * ln_ratio + ln_gamma_shift - self.ln_tail_mass;
        let mut i = 0usize;
        std::iter::from_fn(move || {
            let shape = nf + mf + i as f64;
            let term = reg_gamma_p(shape, beta).map(|p| (ln_base + p.ln()).exp());
            // binomial (i+m)/(i+1), geometric c/β, gamma shift Γ(s+1)/Γ(s) = s
            ln_base += ((i as f64 + mf) / (i as f64 + 1.0)).ln() + ln_ratio + shape.ln();
            i += 1;
            Some(term)
        })
    }

    /// Partial sums `μ_U(m)` for `U = 1..=max_terms` (`U` counts terms, so
    /// `U = 1` is the `i = 0` term alone).
    pub fn moment_partial_sums(&self, m: u32, max_terms: usize) -> Result<Vec<f64>> {
        check_moment_order(m)?;
        let mut sum = 0.0;
        self.series_terms(m)
            .take(max_terms)
            .map(|t| {
                sum += t?;
                Ok(sum)
            })
            .collect()
    }

    /// Moment `E[G^m]` from the series, stopping after `max_terms` terms or
    /// once a term falls below `rel_tol` relative to the running sum.
    pub fn moment(&self, m: u32, max_terms: usize, rel_tol: f64) -> Result<MomentSeries> {
        check_moment_order(m)?;
        if max_terms == 0 {
            return Err(domain("the moment series needs at least one term"));
        }
        let mut sum = 0.0;
        let mut last_relative_term = f64::INFINITY;
        for (idx, term) in self.series_terms(m).take(max_terms).enumerate() {
            let term = term?;
            sum += term;
            last_relative_term = if sum > 0.0 { term / sum } else { f64::INFINITY };
            if last_relative_term < rel_tol {
                return Ok(MomentSeries {
                    value: sum,
                    terms_used: idx + 1,
                    last_relative_term,
                });
            }
        }
        Err(Error::SeriesNonConvergence {
            partial: sum,
            terms: max_terms,
            last_relative_term,
        })
    }

    /// Mean and standard deviation of the derived Gini from the first two moments.
    pub fn mean_std(&self) -> Result<(f64, f64)> {
        let m1 = self.moment(1, DEFAULT_MAX_TERMS, DEFAULT_SERIES_TOL)?.value;
        let m2 = self.moment(2, DEFAULT_MAX_TERMS, DEFAULT_SERIES_TOL)?.value;
        Ok((m1, (m2 - m1 * m1).max(0.0).sqrt()))
    }
}

pub const DEFAULT_MAX_TERMS: usize = 500;
pub const DEFAULT_SERIES_TOL: f64 = 1e-16;

fn check_moment_order(m: u32) -> Result<()> {
    if m == 0 {
        Err(domain("moment order must be at least 1"))
    } else {
        Ok(())
    }
}

/// `E[G^m]` for the derived-Gini law.
pub fn gini_moment(
    m: u32,
    dist: &DerivedGiniDistribution,
    terms_u: usize,
    rel_tol: f64,
) -> Result<MomentSeries> {
    dist.moment(m, terms_u, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn forced_estimate() {
        let est = ml_alpha(&[E, E * E, E * E * E], ScaleChoice::Known(1.0), 0.01).unwrap();
        assert!((est.alpha_hat - 0.5).abs() < 1e-15);
        assert!((est.alpha_debiased - 1.0 / 3.0).abs() < 1e-15);
        assert!(!est.accepted);
        assert!(matches!(
            derived_gini(&est),
            Err(Error::InfiniteMean { .. })
        ));
    }

    #[test]
    fn ml_errors() {
        assert!(matches!(
            ml_alpha(&[0.5, 2.0], ScaleChoice::Known(1.0), 0.01),
            Err(Error::Domain(_))
        ));
        assert_eq!(
            ml_alpha(&[1.0, 1.0, 1.0], ScaleChoice::Known(1.0), 0.01),
            Err(Error::InfiniteEstimate { scale: 1.0 })
        );
        assert!(ml_alpha(&[2.0], ScaleChoice::Known(1.0), 0.01).is_err());
        assert!(ml_alpha(&[2.0, 3.0], ScaleChoice::Known(1.0), -0.1).is_err());
    }

    #[test]
    fn estimated_scale_drops_minimum() {
        let est = ml_alpha(&[1.0, E, E * E], ScaleChoice::SampleMinimum, 0.0).unwrap();
        assert!(est.scale_estimated);
        assert_eq!(est.n, 2);
        assert_eq!(est.scale_l, 1.0);
        assert!((est.alpha_hat - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn derived_gini_values_and_boundary() {
        let mk = |a: f64| TailEstimate {
            alpha_hat: a,
            alpha_debiased: a,
            n: 100,
            epsilon: 0.01,
            accepted: a > 1.01,
            scale_l: 1.0,
            scale_estimated: false,
        };
        let g = derived_gini(&mk(1.1)).unwrap();
        assert!((g.value - 1.0 / 1.2).abs() < 1e-15);
        assert_eq!(g.method, GiniMethod::MlDerived);
        assert!((derived_gini(&mk(1.5)).unwrap().value - 0.5).abs() < 1e-15);
        // n = 2, Σ ln = 0.5: α̂ = 4 and α̂′ = 2 exactly, equal to the cutoff 1 + ε.
        let exact = TailEstimate::from_log_sum(0.5, 2, 1.0, false, 1.0).unwrap();
        assert_eq!(exact.alpha_debiased, 2.0);
        assert!(!exact.accepted);
        assert!(derived_gini(&exact).is_err());
    }

    #[test]
    fn law_argument_checks() {
        assert!(pdf_alpha_hat(1.0, 0.0, 10).is_err());
        assert!(pdf_alpha_hat(1.0, 1.1, 0).is_err());
        assert!(pdf_alpha_debiased(1.0, 1.1, 1).is_err());
        assert_eq!(pdf_alpha_hat(-1.0, 1.1, 10).unwrap(), 0.0);
        assert!(DerivedGiniDistribution::new(1.0, 100, 0.01).is_err());
        assert!(DerivedGiniDistribution::new(1.1, 100, 0.0).is_err());
        let d = DerivedGiniDistribution::new(1.1, 100, 0.01).unwrap();
        assert_eq!(d.pdf_alpha_truncated(1.005).unwrap(), 0.0);
        assert_eq!(d.pdf(0.0).unwrap(), 0.0);
        assert_eq!(d.pdf(0.99).unwrap(), 0.0);
        assert!(d.moment(0, 10, 1e-10).is_err());
    }

    #[test]
    fn moment_non_convergence_carries_partial_sum() {
        let d = DerivedGiniDistribution::new(1.1, 1000, 0.01).unwrap();
        match d.moment(1, 3, 1e-12) {
            Err(Error::SeriesNonConvergence { partial, terms, .. }) => {
                assert_eq!(terms, 3);
                let sums = d.moment_partial_sums(1, 3).unwrap();
                assert_eq!(partial, sums[2]);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
