use serde::{Deserialize, Serialize};

use super::fmt_real;
use crate::error::{domain, Error, Result};

pub const HISTOGRAM_CSV_HEADER: &str = "bin_left,bin_right,count,density";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    pub total: usize,
}

impl Histogram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(HISTOGRAM_CSV_HEADER);
        out.push('\n');
        for b in &self.bins {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_real(b.left),
                fmt_real(b.right),
                b.count,
                fmt_real(b.density)
            ));
        }
        out
    }
}

/// Equal-width histogram over `[min, max]`; the last bin is closed on the right.
///
/// When every estimate is identical the range is empty and a single unit-width
/// bin centred on the value holds everything.
pub fn emit_histogram(estimates: &[f64], bins: usize) -> Result<Histogram> {
    if estimates.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if bins < 2 {
        return Err(domain(format!("need at least 2 bins, got {bins}")));
    }
    if estimates.iter().any(|v| !v.is_finite()) {
        return Err(domain("histogram input must be finite"));
    }
    let total = estimates.len();
    let lo = estimates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(Histogram {
            bins: vec![HistogramBin {
                left: lo - 0.5,
                right: lo + 0.5,
                count: total,
                density: 1.0,
            }],
            total,
        });
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in estimates {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            left: lo + i as f64 * width,
            right: if i + 1 == bins {
                hi
            } else {
                lo + (i + 1) as f64 * width
            },
            count,
            density: count as f64 / (total as f64 * width),
        })
        .collect();
    Ok(Histogram { bins, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_density() {
        let data: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let h = emit_histogram(&data, 17).unwrap();
        assert_eq!(h.bins.iter().map(|b| b.count).sum::<usize>(), 1000);
        let width = h.bins[0].right - h.bins[0].left;
        let mass: f64 = h.bins.iter().map(|b| b.density * width).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn repeated_value_single_bin() {
        let h = emit_histogram(&[0.4; 12], 10).unwrap();
        assert_eq!(h.bins.len(), 1);
        assert_eq!(h.bins[0].count, 12);
    }

    #[test]
    fn errors() {
        assert!(emit_histogram(&[], 10).is_err());
        assert!(emit_histogram(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn csv_header_is_fixed() {
        let h = emit_histogram(&[0.0, 1.0], 2).unwrap();
        assert!(h.to_csv().starts_with("bin_left,bin_right,count,density\n"));
    }
}
