use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Group, Limits, SphereWalk};
use crate::kernels::{Coercivity, LengthKernel, ValueCache};

/// Non-integer eigenvalues closer than this are merged into one entry.
pub const GROUPING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEntry {
    pub value: f64,
    pub multiplicity: u64,
}

/// Eigenvalues of the multiplication operator by `ℓ` up to `cutoff`.
///
/// `complete` certifies that every eigenvalue `≤ cutoff` is listed with its
/// full multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTruncation {
    pub cutoff: f64,
    pub entries: Vec<SpectralEntry>,
    pub complete: bool,
    /// Largest ball radius that was enumerated.
    pub radius_explored: u64,
}

impl SpectrumTruncation {
    /// Total multiplicity of the listed eigenvalues.
    pub fn total_multiplicity(&self) -> Result<u64> {
        self.entries.iter().try_fold(0u64, |acc, e| {
            acc.checked_add(e.multiplicity)
                .ok_or(Error::Overflow("spectral multiplicities"))
        })
    }

    /// A truncation with integer eigenvalues `n` of multiplicity `gamma[n]`.
    pub fn from_bins(gamma: &[u64], complete: bool) -> Self {
        let entries = gamma
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(n, &m)| SpectralEntry {
                value: n as f64,
                multiplicity: m,
            })
            .collect();
        SpectrumTruncation {
            cutoff: gamma.len().saturating_sub(1) as f64,
            entries,
            complete,
            radius_explored: 0,
        }
    }
}

/// Sorts values and merges equal ones (or ones within [`GROUPING_TOLERANCE`]
/// of the first value of a run) into entries.
pub fn group_values(mut values: Vec<f64>) -> Vec<SpectralEntry> {
    values.sort_by(f64::total_cmp);
    let mut entries: Vec<SpectralEntry> = Vec::new();
    for v in values {
        match entries.last_mut() {
            Some(last) if v == last.value || v - last.value <= GROUPING_TOLERANCE => {
                last.multiplicity += 1
            }
            _ => entries.push(SpectralEntry {
                value: v,
                multiplicity: 1,
            }),
        }
    }
    entries
}

/// Radius after which the coercivity bound excludes every value `≤ cutoff`:
/// the smallest `r` with `f(r + 1) > cutoff`.
pub(crate) fn certifying_radius(coercivity: &Coercivity, cutoff: f64) -> Option<u64> {
    coercivity
        .radius_exceeding(cutoff)
        .map(|r| r.saturating_sub(1))
}

/// Lists every value `ℓ(g) ≤ cutoff` over balls of growing radius.
pub fn spectrum_from_kernel(
    model: &dyn Group,
    kernel: &LengthKernel,
    cutoff: f64,
    max_radius: u64,
    limits: &Limits,
) -> Result<SpectrumTruncation> {
    if !(cutoff >= 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidArgument(format!("cutoff must be finite and nonnegative, got {cutoff}")));
    }
    let certified_at = certifying_radius(kernel.coercivity(), cutoff);
    let last = certified_at.map_or(max_radius, |r| r.min(max_radius));
    let cache = ValueCache::for_kernel(kernel);
    let mut walk = SphereWalk::new(model, *limits)?;
    let mut values = Vec::new();
    let mut exhausted = false;
    let mut radius_explored = 0;
    for r in 0..=last {
        let sphere = walk.next_sphere()?;
        if sphere.is_empty() {
            exhausted = true;
            break;
        }
        radius_explored = r;
        for g in sphere {
            let v = cache.get(model, g)?;
            if v <= cutoff {
                values.push(v);
            }
        }
    }
    let complete = exhausted || certified_at.is_some_and(|r| r <= max_radius);
    Ok(SpectrumTruncation {
        cutoff,
        entries: group_values(values),
        complete,
        radius_explored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{CyclicGroup, FreeGroup, GroupModel, IntegerLattice};
    use std::sync::Arc;

    #[test]
    fn free_group_word_length_to_two() {
        let f2: GroupModel = Arc::new(FreeGroup::new(2).unwrap());
        let k = LengthKernel::word_length(&f2, &Limits::default()).unwrap();
        let s = spectrum_from_kernel(f2.as_ref(), &k, 2.0, 10, &Limits::default()).unwrap();
        assert!(s.complete);
        let pairs: Vec<_> = s.entries.iter().map(|e| (e.value, e.multiplicity)).collect();
        assert_eq!(pairs, vec![(0.0, 1), (1.0, 4), (2.0, 12)]);
    }

    #[test]
    fn zero_cutoff_gives_identity_only() {
        let z2: GroupModel = Arc::new(IntegerLattice::new(2));
        let k = LengthKernel::l2_squared(&z2).unwrap();
        let s = spectrum_from_kernel(z2.as_ref(), &k, 0.0, 10, &Limits::default()).unwrap();
        assert!(s.complete);
        assert_eq!(s.entries, vec![SpectralEntry { value: 0.0, multiplicity: 1 }]);
    }

    #[test]
    fn incomplete_without_coercivity() {
        let z2: GroupModel = Arc::new(IntegerLattice::new(2));
        let z1: GroupModel = Arc::new(IntegerLattice::new(1));
        let inner = LengthKernel::l1(&z1).unwrap();
        let k = LengthKernel::pullback(&z2, crate::kernels::Homomorphism::Projection(1), inner).unwrap();
        let s = spectrum_from_kernel(z2.as_ref(), &k, 1.0, 3, &Limits::default()).unwrap();
        assert!(!s.complete);
        assert_eq!(s.radius_explored, 3);
    }

    #[test]
    fn finite_group_is_complete_once_exhausted() {
        let c: GroupModel = Arc::new(CyclicGroup::new(5).unwrap());
        let k = LengthKernel::from_fn("flat", Coercivity::zero(), |_| 0.0);
        let s = spectrum_from_kernel(c.as_ref(), &k, 1.0, 10, &Limits::default()).unwrap();
        assert!(s.complete);
        assert_eq!(s.total_multiplicity().unwrap(), 5);
    }

    #[test]
    fn grouping_merges_close_values() {
        let e = group_values(vec![2.0, 1.0, 1.0 + 1e-12, 3.0, 2.0]);
        assert_eq!(e.len(), 3);
        assert_eq!(e[0].multiplicity, 2);
        assert_eq!(e[1], SpectralEntry { value: 2.0, multiplicity: 2 });
    }
}
