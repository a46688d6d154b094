//! Closed forms for the star-network sharing problem.
//!
//! With anticommuting settings and maximally entangled sources, each relay
//! multiplies the correlators of its edge by
//! `f(λ, m) = (1 + (m−1)√(1−λ²)) / m` and the measuring observer contributes
//! a factor `λ`. The functional at position `k` is therefore
//!
//! ```text
//! S_k = 2^(m−1) √m · Π_l [ λ_{l,k} Π_{j<k} f(λ_{l,j}, m) ]^(1/n)
//! ```
//!
//! Setting `S_k = α_m` position by position gives the critical unsharpness
//! schedule. Both sharing modes reduce to the recursion
//! `λ_k = m λ_{k−1} / (1 + (m−1)√(1−λ_{k−1}²))`; they differ only in the
//! seed, `(α_m / S_opt)^n` when one edge shares and `α_m / S_opt` when all
//! edges share a common `λ`.

use serde::Serialize;

use crate::measurement::correlator_factor;
use crate::network::{Scenario, SharingMode};
use crate::tolerance;
use crate::{Error, Result};

/// Guard against seeds so small that the schedule would not fit in memory;
/// the schedule length grows like `(S_opt/α_m)^(2n)`.
pub const MAX_SCHEDULE_LEN: usize = 1 << 26;

/// Classical n-local bound `α_m = Σ_{j=0}^{⌊m/2⌋} C(m, j)(m − 2j)`.
pub fn alpha(m: usize) -> Result<u64> {
    if m < 2 {
        return Err(Error::InvalidInputCount(m));
    }
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for j in 0..=m / 2 {
        if j > 0 {
            binom = binom * (m - j + 1) as u128 / j as u128;
        }
        total += binom * (m - 2 * j) as u128;
    }
    u64::try_from(total).map_err(|_| Error::InvalidInputCount(m))
}

/// Optimal quantum value `2^(m−1) √m` of the m-input functional.
pub fn optimal_s(m: usize) -> f64 {
    2f64.powi(m as i32 - 1) * (m as f64).sqrt()
}

/// `2^(m−1) √m / α_m`, the quantum-over-classical ratio.
pub fn advantage_ratio(m: usize) -> Result<f64> {
    Ok(optimal_s(m) / alpha(m)? as f64)
}

/// Critical unsharpness of the first observer.
pub fn first_critical(n: usize, m: usize, mode: SharingMode) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidScenario("edge count must be positive".into()));
    }
    let base = 1.0 / advantage_ratio(m)?;
    Ok(match mode {
        SharingMode::Asymmetric => base.powi(n as i32),
        SharingMode::Symmetric => base,
    })
}

/// Closed-form functional value at position `k` (1-based).
pub fn predicted_s(scenario: &Scenario, k: usize) -> Result<f64> {
    if k == 0 || k > scenario.positions() {
        return Err(Error::ScheduleTooShort { needed: k, got: scenario.positions() });
    }
    let (n, m) = (scenario.n(), scenario.m());
    let inv = 1.0 / n as f64;
    let mut s = optimal_s(m);
    for edge in 0..n {
        let mut factor = scenario.lambda(edge, k)?;
        if scenario.is_sequenced(edge) {
            for j in 1..k {
                factor *= correlator_factor(scenario.lambda(edge, j)?, m)?;
            }
        }
        s *= factor.powf(inv);
    }
    Ok(s)
}

/// Next critical value `m λ / (1 + (m−1)√(1−λ²))`. Exceeding 1 signals that
/// no legitimate measurement can violate at the next position.
pub fn critical_recursion_step(lambda_prev: f64, m: usize) -> Result<f64> {
    if !(lambda_prev > 0.0 && lambda_prev <= 1.0) {
        return Err(Error::LambdaOutOfRange(lambda_prev));
    }
    Ok(lambda_prev / correlator_factor(lambda_prev, m)?)
}

/// Critical unsharpness per position, ending with the first value above 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalSchedule {
    pub n: usize,
    pub m: usize,
    pub mode: SharingMode,
    pub criticals: Vec<f64>,
    /// Number of positions whose critical value is at most 1.
    pub max_observers: usize,
}

impl CriticalSchedule {
    /// Critical values that are legitimate unsharpness parameters.
    pub fn feasible(&self) -> &[f64] {
        &self.criticals[..self.max_observers]
    }

    /// The first critical value above 1, if the schedule terminated.
    pub fn terminating(&self) -> Option<f64> {
        self.criticals.get(self.max_observers).copied()
    }
}

pub fn critical_schedule(n: usize, m: usize, mode: SharingMode) -> Result<CriticalSchedule> {
    let mut lambda = first_critical(n, m, mode)?;
    let mut criticals = vec![lambda];
    while lambda <= 1.0 {
        if criticals.len() >= MAX_SCHEDULE_LEN {
            return Err(Error::ResourceLimitExceeded { n, m });
        }
        lambda = critical_recursion_step(lambda, m)?;
        criticals.push(lambda);
    }
    let max_observers = criticals.len() - 1;
    Ok(CriticalSchedule { n, m, mode, criticals, max_observers })
}

pub fn max_observers(n: usize, m: usize, mode: SharingMode) -> Result<usize> {
    Ok(critical_schedule(n, m, mode)?.max_observers)
}

/// Approximate lower bound `1/√(1/λ₁*² − k + 1)` on the `k`-th observer's
/// unsharpness in the asymmetric case.
pub fn approx_lower_bound(n: usize, m: usize, k: usize) -> Result<f64> {
    let seed = first_critical(n, m, SharingMode::Asymmetric)?;
    let denominator = 1.0 / (seed * seed) - k as f64 + 1.0;
    if denominator <= tolerance::ALGEBRA {
        return Err(Error::BoundDomainExceeded { k, denominator });
    }
    Ok(1.0 / denominator.sqrt())
}

/// Edge count `log₂ k / (2 log₂(2^(m−1)√m / α_m))` above which a `k`-th sharp
/// observer can still violate in the asymmetric case.
pub fn min_edges(k: usize, m: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::IndexOutOfRange { index: 0, len: 0 });
    }
    Ok((k as f64).log2() / (2.0 * advantage_ratio(m)?.log2()))
}
