use serde::{Deserialize, Serialize};

/// Location and spread of a set of replication outputs, summed in input order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for a single value.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub skewness: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let (mut m2, mut m3) = (0.0, 0.0);
        for v in values {
            let d = v - mean;
            m2 += d * d;
            m3 += d * d * d;
        }
        let std = if values.len() > 1 {
            (m2 / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let skewness = if m2 > 0.0 {
            (m3 / n) / (m2 / n).powf(1.5)
        } else {
            0.0
        };
        Some(Self {
            count: values.len(),
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            skewness,
        })
    }

    pub fn standard_error(&self) -> f64 {
        self.std / (self.count as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_summary() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 10.0]).unwrap();
        assert_eq!(s.mean, 4.0);
        assert!((s.std - (50.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!(s.skewness > 0.0);
        assert_eq!((s.min, s.max), (1.0, 10.0));
        assert!(Summary::of(&[]).is_none());
        assert_eq!(Summary::of(&[2.0]).unwrap().std, 0.0);
    }
}
