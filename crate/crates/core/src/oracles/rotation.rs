//! Return-time statistics of a circle rotation.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationProblem {
    pub xi0: f64,
    pub alpha: f64,
    pub eps: f64,
    pub max_iter: u64,
}

impl RotationProblem {
    pub fn new(xi0: f64, alpha: f64, eps: f64, max_iter: u64) -> Result<Self> {
        let p = Self { xi0, alpha, eps, max_iter };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(domain(format!("window half-width must lie in (0, 1/2), got {}", self.eps)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(domain(format!("rotation step must lie in (0, 1), got {}", self.alpha)));
        }
        if !(0.0..1.0).contains(&self.xi0) {
            return Err(domain(format!("initial point must lie in [0, 1), got {}", self.xi0)));
        }
        Ok(())
    }

    fn in_window(&self, n: u64) -> bool {
        let x = (self.xi0 + self.alpha * n as f64).rem_euclid(1.0);
        x <= self.eps || x >= 1.0 - self.eps
    }
}

/// Return times to a window of length `L` are among `q₁`, `q₂` and
/// `q₁ + q₂`, where `q₁` is the first `n` with `{nα} < L` and `q₂` the first
/// with `{nα} > 1 - L`.
fn return_steps(prob: &RotationProblem) -> Vec<u64> {
    let width = 2.0 * prob.eps;
    let (mut q1, mut q2) = (None, None);
    for n in 1..=prob.max_iter {
        let d = (prob.alpha * n as f64).rem_euclid(1.0);
        if q1.is_none() && d < width {
            q1 = Some(n);
        }
        if q2.is_none() && d > 1.0 - width {
            q2 = Some(n);
        }
        if q1.is_some() && q2.is_some() {
            break;
        }
    }
    let mut steps: Vec<u64> = [q1, q2, q1.zip(q2).map(|(a, b)| a + b)].into_iter().flatten().collect();
    steps.sort_unstable();
    steps
}

fn next_visit(prob: &RotationProblem, n: u64, steps: &[u64]) -> Option<u64> {
    if n > 0 {
        if let Some(&q) = steps.iter().find(|&&q| prob.in_window(n + q)) {
            return (n + q <= prob.max_iter).then_some(n + q);
        }
    }
    (n + 1..=prob.max_iter).find(|&k| prob.in_window(k))
}

/// Smallest `l` with `n₁ - n₂ + … + n_{2l-1} - n_{2l} ≤ 0`, where `n_j` are
/// the gaps between successive visits of `ξ + αn mod 1` to `[-ε, ε]`.
pub fn rotation_l(prob: &RotationProblem) -> Result<u64> {
    prob.validate()?;
    let steps = return_steps(prob);
    let mut sum: i64 = 0;
    let mut last = 0u64;
    let mut visits = 0u64;
    while let Some(n) = next_visit(prob, last, &steps) {
        let gap = (n - last) as i64;
        last = n;
        visits += 1;
        if visits % 2 == 1 {
            sum += gap;
        } else {
            sum -= gap;
            if sum <= 0 {
                return Ok(visits / 2);
            }
        }
    }
    Err(Error::CapExceeded(prob.max_iter))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationHistogram {
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub seed: u64,
    pub capped: u64,
    /// `l ↦` fraction of uncapped samples.
    pub p: BTreeMap<u64, f64>,
}

impl RotationHistogram {
    pub fn total_variation(&self, other: &RotationHistogram) -> f64 {
        let keys: std::collections::BTreeSet<_> = self.p.keys().chain(other.p.keys()).collect();
        0.5 * keys.into_iter().map(|k| (self.p.get(k).unwrap_or(&0.0) - other.p.get(k).unwrap_or(&0.0)).abs()).sum::<f64>()
    }
}

/// Empirical law of `l` over uniform `(ξ, α)`.
pub fn rotation_histogram(eps: f64, n: u64, seed: u64, max_iter: u64) -> Result<RotationHistogram> {
    RotationProblem::new(0.0, 0.5, eps, max_iter)?;
    let ls: Vec<Option<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let xi0: f64 = rng.random();
            let alpha = loop {
                let a: f64 = rng.random();
                if a > 0.0 {
                    break a;
                }
            };
            rotation_l(&RotationProblem { xi0, alpha, eps, max_iter }).ok()
        })
        .collect();
    let mut counts = BTreeMap::new();
    let mut capped = 0;
    for l in ls {
        match l {
            Some(l) => *counts.entry(l).or_insert(0u64) += 1,
            None => capped += 1,
        }
    }
    let done = (n - capped) as f64;
    let p = counts.into_iter().map(|(k, c)| (k, c as f64 / done)).collect();
    Ok(RotationHistogram { eps, n, seed, capped, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn near_half_rotation() {
        let p = RotationProblem::new(0.0, 0.5 - 1e-9, 0.1, 1000).unwrap();
        assert_eq!(rotation_l(&p).unwrap(), 1);
    }

    #[test]
    fn non_decreasing_first_gaps() {
        // visits at 3, 6, ... give equal gaps
        let p = RotationProblem::new(0.0, 1.0 / 3.0 + 1e-12, 0.05, 100).unwrap();
        assert_eq!(rotation_l(&p).unwrap(), 1);
    }

    #[test]
    fn longer_alternating_run() {
        // visits at 3, 13
        let p = RotationProblem::new(0.12, 0.3, 0.05, 1000).unwrap();
        assert_eq!(rotation_l(&p).unwrap(), 1);
        // visits at 10, 19, 30, 39, 48, 59, 68, 79; partial sums 1, 3, 1, -1
        let p = RotationProblem::new(0.495, 0.449, 0.05, 1000).unwrap();
        assert_eq!(rotation_l(&p).unwrap(), 4);
    }

    #[test]
    fn cap_and_domain() {
        let p = RotationProblem::new(0.3, 1e-6, 0.01, 50).unwrap();
        assert_eq!(rotation_l(&p), Err(Error::CapExceeded(50)));
        assert!(RotationProblem::new(0.0, 0.3, 0.5, 10).is_err());
        assert!(RotationProblem::new(0.0, 1.0, 0.1, 10).is_err());
    }

    fn scan_l(prob: &RotationProblem) -> Option<u64> {
        let (mut sum, mut last, mut visits) = (0i64, 0u64, 0u64);
        for n in 1..=prob.max_iter {
            if prob.in_window(n) {
                visits += 1;
                let gap = (n - last) as i64;
                last = n;
                sum += if visits % 2 == 1 { gap } else { -gap };
                if visits % 2 == 0 && sum <= 0 {
                    return Some(visits / 2);
                }
            }
        }
        None
    }

    #[test]
    fn histogram_sums_to_one() {
        let h = rotation_histogram(1e-2, 20_000, 5, 10_000_000).unwrap();
        let s: f64 = h.p.values().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((h.capped as f64) < 0.01 * 20_000.0);
    }

    proptest! {
        #[test]
        fn return_steps_match_scan(xi0 in 0.0..1.0f64, alpha in 0.001..0.999f64, eps in 0.005..0.2f64) {
            let p = RotationProblem::new(xi0, alpha, eps, 200_000).unwrap();
            prop_assert_eq!(rotation_l(&p).ok(), scan_l(&p));
        }
    }
}
