use serde::Serialize;

use super::SpectrumTruncation;
use crate::error::{Error, Result};

/// Number of trailing estimator values inspected by the growth estimators.
pub const ESTIMATOR_WINDOW: usize = 5;

/// Counting functions of a spectrum on integer bins.
///
/// `beta[n]` counts eigenvalues in `[0, n]`, `gamma[n]` those in `(n−1, n]`
/// (`gamma[0] = beta[0]`). All sequences are indexed by `n` and have the same
/// length; estimator entries are `None` where undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub beta: Vec<u64>,
    pub gamma: Vec<u64>,
    /// `beta[n]^(1/n)` for `n ≥ 1`.
    pub omega_root: Vec<Option<f64>>,
    /// `gamma[n+1] / gamma[n]`, absent where `gamma[n] = 0` or `n` is last.
    pub omega_ratio: Vec<Option<f64>>,
    /// `ln beta[n] / ln n` for `n ≥ 2`.
    pub spectral_dimension: Vec<Option<f64>>,
    /// False when built from an incomplete spectrum: counts are lower bounds.
    pub certified: bool,
}

impl GrowthProfile {
    pub fn from_gamma(gamma: Vec<u64>, certified: bool) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::InvalidArgument("a profile needs at least one bin".into()));
        }
        let mut beta = Vec::with_capacity(gamma.len());
        let mut acc = 0u64;
        for &g in &gamma {
            acc = acc.checked_add(g).ok_or(Error::Overflow("beta"))?;
            beta.push(acc);
        }
        let len = gamma.len();
        let omega_root = (0..len)
            .map(|n| (n >= 1).then(|| (beta[n] as f64).powf(1.0 / n as f64)))
            .collect();
        let omega_ratio = (0..len)
            .map(|n| {
                (n + 1 < len && gamma[n] > 0).then(|| gamma[n + 1] as f64 / gamma[n] as f64)
            })
            .collect();
        let spectral_dimension = (0..len)
            .map(|n| (n >= 2 && beta[n] > 0).then(|| (beta[n] as f64).ln() / (n as f64).ln()))
            .collect();
        Ok(GrowthProfile {
            beta,
            gamma,
            omega_root,
            omega_ratio,
            spectral_dimension,
            certified,
        })
    }

    /// Largest bin index `N`.
    pub fn depth(&self) -> usize {
        self.beta.len() - 1
    }
}

/// Exact counting functions of `spectrum` on bins `0..=depth`.
pub fn growth_profile(spectrum: &SpectrumTruncation, depth: usize) -> Result<GrowthProfile> {
    if depth as f64 > spectrum.cutoff.floor() {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} exceeds the spectrum cutoff {}",
            spectrum.cutoff
        )));
    }
    let mut gamma = vec![0u64; depth + 1];
    for e in &spectrum.entries {
        if e.value > depth as f64 {
            continue;
        }
        // bin 0 is {0}; bin n is (n−1, n]
        let bin = e.value.ceil().max(0.0) as usize;
        gamma[bin] = gamma[bin]
            .checked_add(e.multiplicity)
            .ok_or(Error::Overflow("gamma"))?;
    }
    GrowthProfile::from_gamma(gamma, spectrum.complete)
}

/// Last-window values of both growth-rate estimators. These are
/// finite-horizon estimates, never limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaEstimate {
    pub root: f64,
    pub ratio: Option<f64>,
    /// Inclusive range of `n` covered by the window.
    pub window: (usize, usize),
    pub root_window: Vec<f64>,
    pub ratio_window: Vec<f64>,
    pub label: String,
}

pub fn omega_estimate(profile: &GrowthProfile) -> Result<OmegaEstimate> {
    if profile.beta.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "omega estimates need at least 4 bins, got {}",
            profile.beta.len()
        )));
    }
    let last = profile.depth();
    let start = (last + 1).saturating_sub(ESTIMATOR_WINDOW).max(1);
    let root_window: Vec<f64> = (start..=last).filter_map(|n| profile.omega_root[n]).collect();
    let ratio_window: Vec<f64> = (start.saturating_sub(1)..last)
        .filter_map(|n| profile.omega_ratio[n])
        .collect();
    Ok(OmegaEstimate {
        root: profile.omega_root[last].unwrap_or(1.0),
        ratio: profile.omega_ratio.iter().rev().find_map(|r| *r),
        window: (start, last),
        root_window,
        ratio_window,
        label: "finite-horizon estimate".to_string(),
    })
}
