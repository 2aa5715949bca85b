//! Binomial law and sample summaries for the congestion experiments.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// `P[X = x]` for `x = 0..=n` under `Binomial(n, p)`.
pub fn binomial_pmf(n: u64, p: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid!("success probability {p} outside [0, 1]"));
    }
    let len = n as usize + 1;
    let mut pmf = vec![0.0; len];
    if p == 0.0 {
        pmf[0] = 1.0;
        return Ok(pmf);
    }
    if p == 1.0 {
        pmf[len - 1] = 1.0;
        return Ok(pmf);
    }
    // log space keeps the ratio recursion stable for large n
    let (lp, lq) = (libm::log(p), libm::log1p(-p));
    let mut log_choose = 0.0;
    for (x, slot) in pmf.iter_mut().enumerate() {
        if x > 0 {
            log_choose += libm::log((n - x as u64 + 1) as f64) - libm::log(x as f64);
        }
        *slot = libm::exp(log_choose + x as f64 * lp + (n - x as u64) as f64 * lq);
    }
    Ok(pmf)
}

/// `P[X <= x]` under `Binomial(n, p)`; 0 for negative `x`.
pub fn binomial_cdf(n: u64, p: f64, x: i64) -> Result<f64> {
    let pmf = binomial_pmf(n, p)?;
    if x < 0 {
        return Ok(0.0);
    }
    let upto = (x as usize).min(n as usize);
    Ok(pmf[..=upto].iter().sum::<f64>().min(1.0))
}

/// Running mean and variance (Welford), mergeable across shards.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            libm::sqrt(self.variance() / self.count as f64)
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Histogram of non-negative integer samples, `hist[x]` = occurrences of `x`.
pub fn histogram(samples: &[u64]) -> Vec<u64> {
    let max = samples.iter().copied().max().unwrap_or(0) as usize;
    let mut hist = vec![0u64; max + 1];
    for &x in samples {
        hist[x as usize] += 1;
    }
    hist
}

/// Largest gap between the empirical CDF of `samples` and the CDF given by
/// `pmf` (mass beyond `pmf.len()` counts as zero).
pub fn ks_distance(samples: &[u64], pmf: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let hist = histogram(samples);
    let total = samples.len() as f64;
    let (mut emp, mut theo, mut worst) = (0.0f64, 0.0f64, 0.0f64);
    for x in 0..hist.len().max(pmf.len()) {
        emp += hist.get(x).copied().unwrap_or(0) as f64 / total;
        theo += pmf.get(x).copied().unwrap_or(0.0);
        worst = worst.max(libm::fabs(emp - theo));
    }
    worst
}

/// `base^exp` by repeated squaring.
pub fn powu(base: f64, mut exp: u32) -> f64 {
    let (mut acc, mut b) = (1.0, base);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}
