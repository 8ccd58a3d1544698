use serde::Serialize;

use super::{GrowthProfile, PartitionEstimate, Verdict, ESTIMATOR_WINDOW};

/// Estimator values in the window may differ by at most this relative amount.
pub const STABILITY_TOLERANCE: f64 = 0.05;
/// The ratio estimator must stay at or above this value for an exponential call.
pub const EXPONENTIAL_THRESHOLD: f64 = 1.1;
/// Maximum spread of the spectral-dimension estimates for a polynomial call.
pub const DIMENSION_SPREAD: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthClass {
    Polynomial { dimension: f64 },
    Subexponential,
    Exponential { rate: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub class: GrowthClass,
    /// Inclusive range of `n` used as evidence.
    pub window: (usize, usize),
    /// Estimator values the decision was based on.
    pub evidence: Vec<f64>,
    pub reason: String,
}

fn window_values(seq: &[Option<f64>], start: usize, end: usize) -> Option<Vec<f64>> {
    (start..=end).map(|n| seq.get(n).copied().flatten()).collect()
}

fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return f64::INFINITY;
    }
    max / min - 1.0
}

/// Finite-horizon growth classification.
///
/// Exponential when the last window of ratio estimates is stable within 5%
/// and at least 1.1 throughout; polynomial when the last window of
/// spectral-dimension estimates spreads less than 0.2; subexponential when
/// every supplied partition estimate is certified finite; otherwise
/// inconclusive.
pub fn classify(profile: &GrowthProfile, partitions: &[PartitionEstimate]) -> Classification {
    let last = profile.depth();
    let fallback_window = (last.saturating_sub(ESTIMATOR_WINDOW - 1), last);
    if !profile.certified {
        return Classification {
            class: GrowthClass::Inconclusive,
            window: fallback_window,
            evidence: Vec::new(),
            reason: "counts come from an incomplete spectrum".into(),
        };
    }
    if last + 1 < ESTIMATOR_WINDOW + 2 {
        return Classification {
            class: GrowthClass::Inconclusive,
            window: fallback_window,
            evidence: Vec::new(),
            reason: format!("profile depth {last} is too short for a window of {ESTIMATOR_WINDOW}"),
        };
    }

    // ratios are defined up to n = last − 1
    let ratio_window = (last - ESTIMATOR_WINDOW, last - 1);
    if let Some(values) = window_values(&profile.omega_ratio, ratio_window.0, ratio_window.1) {
        if values.iter().all(|&v| v >= EXPONENTIAL_THRESHOLD)
            && relative_spread(&values) <= STABILITY_TOLERANCE
        {
            return Classification {
                class: GrowthClass::Exponential {
                    rate: *values.last().unwrap(),
                },
                window: ratio_window,
                evidence: values,
                reason: "ratio estimates stable and above threshold".into(),
            };
        }
    }

    let dim_window = (last + 1 - ESTIMATOR_WINDOW, last);
    if let Some(values) = window_values(&profile.spectral_dimension, dim_window.0, dim_window.1) {
        let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().copied().fold(f64::INFINITY, f64::min);
        if spread < DIMENSION_SPREAD {
            let saturated = profile.gamma[dim_window.0..=dim_window.1].iter().all(|&g| g == 0);
            let (dimension, reason) = if saturated {
                (0.0, "counting function constant over the window: finite spectrum")
            } else {
                (*values.last().unwrap(), "spectral dimension estimates stable")
            };
            return Classification {
                class: GrowthClass::Polynomial { dimension },
                window: dim_window,
                evidence: values,
                reason: reason.into(),
            };
        }
    }

    if !partitions.is_empty() && partitions.iter().all(|p| p.verdict == Verdict::Finite) {
        return Classification {
            class: GrowthClass::Subexponential,
            window: fallback_window,
            evidence: partitions.iter().map(|p| p.t).collect(),
            reason: "partition function certified finite at every sampled t".into(),
        };
    }

    Classification {
        class: GrowthClass::Inconclusive,
        window: fallback_window,
        evidence: Vec::new(),
        reason: "no estimator stabilized and partition evidence is incomplete".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_is_exponential() {
        let gamma: Vec<u64> = (0..=12u32)
            .map(|n| if n == 0 { 1 } else { 4 * 3u64.pow(n - 1) })
            .collect();
        let p = GrowthProfile::from_gamma(gamma, true).unwrap();
        let c = classify(&p, &[]);
        assert_eq!(c.class, GrowthClass::Exponential { rate: 3.0 });
    }

    #[test]
    fn plane_is_polynomial() {
        let gamma: Vec<u64> = (0..=20u64).map(|n| if n == 0 { 1 } else { 4 * n }).collect();
        let p = GrowthProfile::from_gamma(gamma, true).unwrap();
        match classify(&p, &[]).class {
            GrowthClass::Polynomial { dimension } => assert!((dimension - 2.0).abs() < 0.3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn finite_spectrum_has_dimension_zero() {
        let mut gamma = vec![1, 2, 2];
        gamma.extend(std::iter::repeat_n(0, 18));
        let p = GrowthProfile::from_gamma(gamma, true).unwrap();
        assert_eq!(classify(&p, &[]).class, GrowthClass::Polynomial { dimension: 0.0 });
    }

    #[test]
    fn uncertified_or_short_is_inconclusive() {
        let p = GrowthProfile::from_gamma(vec![1, 4, 12, 36, 108, 324, 972, 2916], false).unwrap();
        assert_eq!(classify(&p, &[]).class, GrowthClass::Inconclusive);
        let p = GrowthProfile::from_gamma(vec![1, 4, 12], true).unwrap();
        assert_eq!(classify(&p, &[]).class, GrowthClass::Inconclusive);
    }

    #[test]
    fn subexponential_from_partition_evidence() {
        // a late spike breaks both estimator windows
        let mut gamma = vec![1u64; 12];
        gamma.push(10_000);
        let p = GrowthProfile::from_gamma(gamma, true).unwrap();
        let finite = PartitionEstimate {
            t: 1.0,
            partial_sum: 1.0,
            tail_bound: 0.1,
            verdict: Verdict::Finite,
            certificate: String::new(),
        };
        assert_eq!(
            classify(&p, std::slice::from_ref(&finite)).class,
            GrowthClass::Subexponential
        );
        let unknown = PartitionEstimate { verdict: Verdict::Unknown, ..finite };
        assert_eq!(classify(&p, &[unknown]).class, GrowthClass::Inconclusive);
        assert_eq!(classify(&p, &[]).class, GrowthClass::Inconclusive);
    }
}
