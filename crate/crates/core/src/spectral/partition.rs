use serde::Serialize;

use super::{GrowthProfile, SpectrumTruncation, TailBound, TailModel};
use crate::error::{Error, Result};
use crate::report::serialize_extended_f64;

/// Bins summed exactly from an exact tail model before the remainder bound
/// takes over.
pub const DEFAULT_TAIL_DEPTH: u64 = 64;

const MAX_TAIL_TERMS: u64 = 50_000_000;
const ROUNDING_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Finite,
    Divergent,
    Unknown,
}

/// Bracket `[partial_sum, partial_sum + tail_bound]` for `Tr(e^{−tL})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionEstimate {
    pub t: f64,
    pub partial_sum: f64,
    #[serde(serialize_with = "serialize_extended_f64")]
    pub tail_bound: f64,
    pub verdict: Verdict,
    /// The argument behind the verdict: tail formula, divergence witness, or
    /// the reason no verdict is possible.
    pub certificate: String,
}

impl PartitionEstimate {
    pub fn upper(&self) -> f64 {
        self.partial_sum + self.tail_bound
    }

    fn unknown(t: f64, partial_sum: f64, why: impl Into<String>) -> Self {
        PartitionEstimate {
            t,
            partial_sum,
            tail_bound: f64::INFINITY,
            verdict: Verdict::Unknown,
            certificate: why.into(),
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("t must be positive, got {t}")))
    }
}

/// `γ_n ≥ c·R^n` with `R·e^{−t} ≥ 1` makes `Σ γ_n e^{−tn}` diverge, and that
/// sum is a lower bound for the partition function.
fn divergence_witness(model: Option<&TailModel>, t: f64) -> Option<String> {
    match model?.lower.as_ref()? {
        TailBound::Geometric { scale, ratio } if ratio * (-t).exp() >= 1.0 => Some(format!(
            "gamma_n >= {scale}*{ratio}^n and {ratio}*exp(-{t}) >= 1: the lower bound series diverges"
        )),
        _ => None,
    }
}

/// Upper bound for `Σ_{n ≥ first} bound(n)·w_n` with `w_n = e^{−tn}` when
/// the spectrum is integral and `e^{−t(n−1)}` otherwise.
fn tail_sum(bound: &TailBound, first: u64, t: f64, integral: bool) -> Option<f64> {
    let shift = if integral { 1.0 } else { t.exp() };
    match *bound {
        TailBound::Geometric { scale, ratio } => {
            let q = ratio * (-t).exp();
            if q >= 1.0 {
                return None;
            }
            Some(shift * scale * q.powf(first as f64) / (1.0 - q))
        }
        TailBound::Polynomial { scale, degree } => {
            polynomial_tail(scale, degree, t, first).map(|s| shift * s)
        }
        TailBound::Vanishing { .. } => None,
    }
}

/// `Σ_{n ≥ first} scale·n^degree·e^{−tn}`, summed until the ratio of
/// consecutive terms `((n+1)/n)^degree·e^{−t}` drops below one and the
/// geometric remainder is negligible; the remainder is then added in full
/// and the result inflated by a relative margin covering rounding.
fn polynomial_tail(scale: f64, degree: f64, t: f64, first: u64) -> Option<f64> {
    let first = first.max(1);
    let mut sum = 0.0;
    for n in first..first.saturating_add(MAX_TAIL_TERMS) {
        let x = n as f64;
        let term = scale * x.powf(degree) * (-t * x).exp();
        sum += term;
        let rho = ((x + 1.0) / x).powf(degree) * (-t).exp();
        if rho < 1.0 {
            let rest = term * rho / (1.0 - rho);
            if rest <= 1e-17 * sum || rest < 1e-300 {
                return Some((sum + rest) * (1.0 + ROUNDING_MARGIN));
            }
        }
    }
    None
}

/// Partition function of a spectrum truncation.
///
/// Eigenvalues beyond the cutoff are bounded through `tail`; when the tail
/// model is exact and integral, bins up to `depth` are summed exactly.
pub fn partition_function(
    spectrum: &SpectrumTruncation,
    t: f64,
    tail: Option<&TailModel>,
    depth: u64,
) -> Result<PartitionEstimate> {
    check_t(t)?;
    let mut partial: f64 = spectrum
        .entries
        .iter()
        .map(|e| e.multiplicity as f64 * (-t * e.value).exp())
        .sum();
    if let Some(witness) = divergence_witness(tail, t) {
        return Ok(PartitionEstimate {
            t,
            partial_sum: partial,
            tail_bound: f64::INFINITY,
            verdict: Verdict::Divergent,
            certificate: witness,
        });
    }
    if !spectrum.complete {
        return Ok(PartitionEstimate::unknown(t, partial, "spectrum incomplete below the cutoff"));
    }
    let Some(model) = tail else {
        return Ok(PartitionEstimate::unknown(t, partial, "no tail model"));
    };
    let Some(upper) = model.upper.as_ref() else {
        return Ok(PartitionEstimate::unknown(t, partial, "tail model has no upper bound"));
    };
    let mut first = spectrum.cutoff.floor() as u64 + 1;
    if let TailBound::Vanishing { beyond, total } = *upper {
        let bound = if spectrum.cutoff >= beyond {
            0.0
        } else {
            let listed = spectrum.total_multiplicity()?;
            total.saturating_sub(listed) as f64 * (-t * spectrum.cutoff).exp()
        };
        return Ok(PartitionEstimate {
            t,
            partial_sum: partial,
            tail_bound: bound,
            verdict: Verdict::Finite,
            certificate: format!("finite spectrum: {total} eigenvalues, all <= {beyond}"),
        });
    }
    if model.exact && model.integral {
        while first <= depth {
            partial += upper.at(first) * (-t * first as f64).exp();
            first += 1;
        }
    }
    match tail_sum(upper, first, t, model.integral) {
        Some(bound) => Ok(PartitionEstimate {
            t,
            partial_sum: partial,
            tail_bound: bound,
            verdict: Verdict::Finite,
            certificate: format!("tail over bins n >= {first} bounded by {upper:?}"),
        }),
        None => Ok(PartitionEstimate::unknown(
            t,
            partial,
            format!("upper tail bound {upper:?} does not converge at t = {t}"),
        )),
    }
}

/// Partition function from counting data alone.
///
/// For integral spectra the bins are the eigenvalues. Otherwise the bracket
/// is `γ_0 + Σ γ_n e^{−tn} ≤ Tr(e^{−tL}) ≤ γ_0 + e^t Σ γ_n e^{−tn}`.
pub fn partition_from_profile(
    profile: &GrowthProfile,
    t: f64,
    tail: Option<&TailModel>,
    depth: u64,
) -> Result<PartitionEstimate> {
    check_t(t)?;
    if tail.is_some_and(|m| m.integral) {
        let spectrum = SpectrumTruncation::from_bins(&profile.gamma, profile.certified);
        return partition_function(&spectrum, t, tail, depth);
    }
    let (lower, upper) = sandwich_bounds(&profile.gamma, t);
    let mut estimate = partition_function(
        &SpectrumTruncation {
            cutoff: profile.depth() as f64,
            entries: Vec::new(),
            complete: profile.certified,
            radius_explored: 0,
        },
        t,
        tail,
        depth,
    )?;
    estimate.partial_sum = lower;
    if estimate.verdict == Verdict::Finite {
        estimate.tail_bound += upper - lower;
    }
    Ok(estimate)
}

/// Bin-wise lower and upper bounds on `Σ_{λ ≤ N} e^{−tλ}` from the counts
/// `γ_0, …, γ_N`.
pub fn sandwich_bounds(gamma: &[u64], t: f64) -> (f64, f64) {
    let g0 = gamma.first().copied().unwrap_or(0) as f64;
    let rest: f64 = gamma
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &g)| g as f64 * (-t * n as f64).exp())
        .sum();
    (g0 + rest, g0 + t.exp() * rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralEntry;

    fn free_rank_two(cutoff: u64) -> SpectrumTruncation {
        let gamma: Vec<u64> = (0..=cutoff)
            .map(|n| if n == 0 { 1 } else { 4 * 3u64.pow(n as u32 - 1) })
            .collect();
        SpectrumTruncation::from_bins(&gamma, true)
    }

    #[test]
    fn free_group_closed_form_at_t_two() {
        let tail = TailModel::exact_geometric(4.0 / 3.0, 3.0).unwrap();
        let est = partition_function(&free_rank_two(6), 2.0, Some(&tail), 40).unwrap();
        let q = 3.0 * (-2f64).exp();
        let closed = 1.0 + 4.0 * (-2f64).exp() / (1.0 - q);
        assert_eq!(est.verdict, Verdict::Finite);
        assert!(est.tail_bound < 1e-6);
        assert!(est.partial_sum - 1e-12 <= closed && closed <= est.upper() + 1e-12);
        assert!((est.partial_sum - 1.9114).abs() < 1e-4);
    }

    #[test]
    fn free_group_diverges_at_t_one() {
        let tail = TailModel::exact_geometric(4.0 / 3.0, 3.0).unwrap();
        let est = partition_function(&free_rank_two(4), 1.0, Some(&tail), 40).unwrap();
        assert_eq!(est.verdict, Verdict::Divergent);
        assert!(est.tail_bound.is_infinite());
    }

    #[test]
    fn single_zero_eigenvalue() {
        let s = SpectrumTruncation {
            cutoff: 0.0,
            entries: vec![SpectralEntry { value: 0.0, multiplicity: 1 }],
            complete: true,
            radius_explored: 0,
        };
        let tail = TailModel::finite(0.0, 1).unwrap();
        for t in [0.01, 1.0, 7.0] {
            let est = partition_function(&s, t, Some(&tail), 10).unwrap();
            assert_eq!(est.partial_sum, 1.0);
            assert_eq!(est.tail_bound, 0.0);
            assert_eq!(est.verdict, Verdict::Finite);
        }
    }

    #[test]
    fn unknown_without_model_or_completeness() {
        let mut s = free_rank_two(3);
        assert_eq!(partition_function(&s, 2.0, None, 10).unwrap().verdict, Verdict::Unknown);
        s.complete = false;
        let tail = TailModel::upper_only(TailBound::Geometric { scale: 2.0, ratio: 3.0 }, true).unwrap();
        assert_eq!(partition_function(&s, 2.0, Some(&tail), 10).unwrap().verdict, Verdict::Unknown);
        assert!(partition_function(&s, 0.0, None, 10).is_err());
    }

    #[test]
    fn polynomial_tail_matches_direct_summation() {
        // Σ_{n≥1} n e^{−n/2} = e^{-1/2} / (1 − e^{-1/2})^2
        let q = (-0.5f64).exp();
        let exact = q / (1.0 - q).powi(2);
        let got = polynomial_tail(1.0, 1.0, 0.5, 1).unwrap();
        assert!(got >= exact && got - exact < 1e-11 * exact);
        // degree zero is geometric
        let got = polynomial_tail(2.0, 0.0, 0.001, 1).unwrap();
        let exact = 2.0 * (-0.001f64).exp() / (1.0 - (-0.001f64).exp());
        assert!(got >= exact && got - exact < 1e-9 * exact);
    }

    #[test]
    fn sandwich_from_non_integral_profile() {
        let p = GrowthProfile::from_gamma(vec![1, 3, 0, 2], true).unwrap();
        let tail = TailModel::upper_only(TailBound::Polynomial { scale: 4.0, degree: 1.0 }, false).unwrap();
        let est = partition_from_profile(&p, 1.0, Some(&tail), 10).unwrap();
        let (lo, hi) = sandwich_bounds(&p.gamma, 1.0);
        assert_eq!(est.partial_sum, lo);
        assert!(est.upper() > hi);
        assert_eq!(est.verdict, Verdict::Finite);
    }
}
