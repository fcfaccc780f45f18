//! Pareto I and Lomax (Pareto II) distributions.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Generator provenance attached to simulated samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub master_seed: u64,
    pub stream: u64,
}

/// Observations with optional provenance. Values are finite and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    seed_info: Option<SeedInfo>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(domain(format!(
                "sample values must be finite and nonnegative; value {v} at index {i}"
            )));
        }
        Ok(Self {
            values,
            seed_info: None,
        })
    }

    pub fn with_seed_info(mut self, info: SeedInfo) -> Self {
        self.seed_info = Some(info);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed_info(&self) -> Option<SeedInfo> {
        self.seed_info
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl AsRef<[f64]> for Sample {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

/// Common surface of the fat-tailed families.
pub trait TailDistribution {
    fn alpha(&self) -> f64;
    /// Lower end of the support.
    fn support_min(&self) -> f64;
    fn pdf(&self, x: f64) -> f64;
    fn survival(&self, x: f64) -> f64;
    fn mean(&self) -> Result<f64>;
    /// Closed-form Gini coefficient.
    fn gini(&self) -> Result<f64>;
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;

    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        if n == 0 {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let values = (0..n).map(|_| self.draw(rng)).collect();
        Ok(Sample {
            values,
            seed_info: None,
        })
    }
}

/// Pareto I: density `α L^α x^{−α−1}` on `x ≥ L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoSpec {
    alpha: f64,
    scale: f64,
}

impl ParetoSpec {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("scale L", scale)?;
        Ok(Self { alpha, scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl TailDistribution for ParetoSpec {
    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn support_min(&self) -> f64 {
        self.scale
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < self.scale {
            return 0.0;
        }
        (self.alpha.ln() + self.alpha * self.scale.ln() - (self.alpha + 1.0) * x.ln()).exp()
    }

    fn survival(&self, x: f64) -> f64 {
        if x <= self.scale {
            1.0
        } else {
            (self.scale / x).powf(self.alpha)
        }
    }

    fn mean(&self) -> Result<f64> {
        if self.alpha <= 1.0 {
            return Err(Error::UndefinedMean { alpha: self.alpha });
        }
        Ok(self.alpha * self.scale / (self.alpha - 1.0))
    }

    fn gini(&self) -> Result<f64> {
        if self.alpha <= 1.0 {
            return Err(Error::UndefinedMean { alpha: self.alpha });
        }
        Ok(1.0 / (2.0 * self.alpha - 1.0))
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.scale * (-u.ln() / self.alpha).exp()
    }
}

/// Lomax (Pareto II): survival `(1 + x/λ)^{−α}` on `x ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LomaxSpec {
    alpha: f64,
    scale: f64,
}

impl LomaxSpec {
    pub fn new(alpha: f64, scale: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("scale lambda", scale)?;
        Ok(Self { alpha, scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl TailDistribution for LomaxSpec {
    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn support_min(&self) -> f64 {
        0.0
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let a = self.alpha;
        (a.ln() - self.scale.ln() - (a + 1.0) * (x / self.scale).ln_1p()).exp()
    }

    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.alpha * (x / self.scale).ln_1p()).exp()
        }
    }

    fn mean(&self) -> Result<f64> {
        if self.alpha <= 1.0 {
            return Err(Error::UndefinedMean { alpha: self.alpha });
        }
        Ok(self.scale / (self.alpha - 1.0))
    }

    fn gini(&self) -> Result<f64> {
        if self.alpha <= 1.0 {
            return Err(Error::UndefinedMean { alpha: self.alpha });
        }
        Ok(self.alpha / (2.0 * self.alpha - 1.0))
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        // U^{-1/α} − 1 without cancellation near U = 1.
        self.scale * (-u.ln() / self.alpha).exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(rename = "pareto-I")]
    ParetoI,
    Lomax,
}

impl Family {
    /// Gini of the family at tail exponent `alpha` (> 1); scale-free for both.
    pub fn gini_from_alpha(self, alpha: f64) -> f64 {
        match self {
            Family::ParetoI => 1.0 / (2.0 * alpha - 1.0),
            Family::Lomax => alpha / (2.0 * alpha - 1.0),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::ParetoI => "pareto-I",
            Family::Lomax => "lomax",
        })
    }
}

/// Either family, chosen at runtime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Pareto(ParetoSpec),
    Lomax(LomaxSpec),
}

impl Distribution {
    pub fn new(family: Family, alpha: f64, scale: f64) -> Result<Self> {
        Ok(match family {
            Family::ParetoI => Distribution::Pareto(ParetoSpec::new(alpha, scale)?),
            Family::Lomax => Distribution::Lomax(LomaxSpec::new(alpha, scale)?),
        })
    }

    pub fn family(&self) -> Family {
        match self {
            Distribution::Pareto(_) => Family::ParetoI,
            Distribution::Lomax(_) => Family::Lomax,
        }
    }

    pub fn scale(&self) -> f64 {
        match self {
            Distribution::Pareto(p) => p.scale(),
            Distribution::Lomax(l) => l.scale(),
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $d:ident => $e:expr) => {
        match $self {
            Distribution::Pareto($d) => $e,
            Distribution::Lomax($d) => $e,
        }
    };
}

impl TailDistribution for Distribution {
    fn alpha(&self) -> f64 {
        dispatch!(self, d => d.alpha())
    }
    fn support_min(&self) -> f64 {
        dispatch!(self, d => d.support_min())
    }
    fn pdf(&self, x: f64) -> f64 {
        dispatch!(self, d => d.pdf(x))
    }
    fn survival(&self, x: f64) -> f64 {
        dispatch!(self, d => d.survival(x))
    }
    fn mean(&self) -> Result<f64> {
        dispatch!(self, d => d.mean())
    }
    fn gini(&self) -> Result<f64> {
        dispatch!(self, d => d.gini())
    }
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        dispatch!(self, d => d.draw(rng))
    }
}

pub fn pareto_pdf(spec: &ParetoSpec, x: f64) -> f64 {
    spec.pdf(x)
}

pub fn sample_pareto<R: Rng + ?Sized>(spec: &ParetoSpec, n: usize, rng: &mut R) -> Result<Sample> {
    spec.sample(n, rng)
}

pub fn sample_lomax<R: Rng + ?Sized>(spec: &LomaxSpec, n: usize, rng: &mut R) -> Result<Sample> {
    spec.sample(n, rng)
}

pub fn analytic_gini<D: TailDistribution>(spec: &D) -> Result<f64> {
    spec.gini()
}
