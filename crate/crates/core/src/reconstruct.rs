//! Reconstruction of a conditionally negative definite function from
//! resolvent diagonals of the multiplication generator:
//! `ℓ′ = Σ_k (1 − ω_{ε_k})` with `ω_ε(s) = 1 / (1 + ε·ℓ(s))`.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{ball_enumerate, Group, GroupElement, Limits};
use crate::kernels::{Coercivity, LengthKernel, ValueCache};
use crate::relative::{quotient_ball, quotient_properness, CosetStructure};

pub const DEFAULT_DEPTH: usize = 24;
/// Default cap on the radius of the exhaustion sets `F_k`.
pub const DEFAULT_MAX_RADIUS: u64 = 8;

/// `s ↦ (1 + ε·ℓ(s))⁻¹`, the diagonal of the resolvent `(I + εL)⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolventDiagonal {
    pub epsilon: f64,
}

impl ResolventDiagonal {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(ResolventDiagonal { epsilon })
        } else {
            Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")))
        }
    }

    /// `ω_ε` at a point where `ℓ` takes the value `length`.
    pub fn at(&self, length: f64) -> f64 {
        1.0 / (1.0 + self.epsilon * length)
    }

    /// `1 − ω_ε`, computed as `εℓ / (1 + εℓ)` to avoid cancellation.
    pub fn complement(&self, length: f64) -> f64 {
        let x = self.epsilon * length;
        x / (1.0 + x)
    }
}

/// `ε_k` for `k = 1..=depth`, each the largest value with
/// `1 − ω_{ε_k} ≤ 2^{−k}` on `F_k`, the ball of radius `min(k, max_radius)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonSchedule {
    pub radii: Vec<u64>,
    /// `M_k = max_{F_k} ℓ`.
    pub maxima: Vec<f64>,
    pub epsilons: Vec<f64>,
}

impl EpsilonSchedule {
    pub fn depth(&self) -> usize {
        self.epsilons.len()
    }

    pub fn diagonals(&self) -> impl Iterator<Item = ResolventDiagonal> + '_ {
        self.epsilons.iter().map(|&epsilon| ResolventDiagonal { epsilon })
    }
}

fn bound_for(k: usize) -> f64 {
    (0.5f64).powi(k as i32)
}

pub fn epsilon_schedule(
    model: &dyn Group,
    kernel: &LengthKernel,
    depth: usize,
    max_radius: u64,
    limits: &Limits,
) -> Result<EpsilonSchedule> {
    if depth == 0 || depth > 1000 {
        return Err(Error::InvalidArgument(format!("depth must be in 1..=1000, got {depth}")));
    }
    let top = (depth as u64).min(max_radius);
    let ball = ball_enumerate(model, top, limits)?;
    let cache = ValueCache::for_kernel(kernel);
    // distinct values per radius, so the constraint can be checked exhaustively
    let mut by_radius: Vec<Vec<f64>> = vec![Vec::new(); top as usize + 1];
    for (g, r) in ball.elements.iter().zip(ball.lengths()) {
        by_radius[r as usize].push(cache.get(model, g)?);
    }
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(by_radius.len());
    let mut acc: Vec<f64> = Vec::new();
    for sphere in by_radius {
        acc.extend(sphere);
        acc.sort_by(f64::total_cmp);
        acc.dedup();
        values.push(acc.clone());
    }
    let (mut radii, mut maxima, mut epsilons) = (Vec::new(), Vec::new(), Vec::new());
    for k in 1..=depth {
        let r = (k as u64).min(top);
        let f_k = &values[r as usize];
        let m = f_k.last().copied().unwrap_or(0.0);
        let cap = bound_for(k);
        let mut eps = if m > 0.0 { cap / (m * (1.0 - cap)) } else { 1.0 };
        // rounding can push the maximal choice just past the constraint
        while f_k.iter().any(|&v| ResolventDiagonal { epsilon: eps }.complement(v) > cap) {
            eps = eps.next_down();
        }
        radii.push(r);
        maxima.push(m);
        epsilons.push(eps);
    }
    Ok(EpsilonSchedule {
        radii,
        maxima,
        epsilons,
    })
}

/// `ℓ′_K = Σ_{k ≤ K} (1 − ω_{ε_k})` with a bound on the omitted terms.
#[derive(Debug, Clone)]
pub struct ReconstructedKernel {
    kernel: LengthKernel,
    schedule: EpsilonSchedule,
}

impl ReconstructedKernel {
    pub fn new(kernel: LengthKernel, schedule: EpsilonSchedule) -> Result<Self> {
        for &e in &schedule.epsilons {
            ResolventDiagonal::new(e)?;
        }
        Ok(ReconstructedKernel { kernel, schedule })
    }

    pub fn schedule(&self) -> &EpsilonSchedule {
        &self.schedule
    }

    pub fn kernel(&self) -> &LengthKernel {
        &self.kernel
    }

    pub fn depth(&self) -> usize {
        self.schedule.depth()
    }

    /// `ℓ′_k` for a point where `ℓ` equals `length`.
    pub fn partial_at_length(&self, length: f64, k: usize) -> f64 {
        self.schedule.diagonals().take(k).map(|d| d.complement(length)).sum()
    }

    pub fn evaluate(&self, g: &GroupElement) -> f64 {
        self.partial_at_length(self.kernel.evaluate(g), self.depth())
    }

    pub fn evaluate_partial(&self, g: &GroupElement, k: usize) -> f64 {
        self.partial_at_length(self.kernel.evaluate(g), k)
    }

    /// Upper bound on `Σ_{k > K} (1 − ω_{ε_k})` where `ℓ` equals `length`.
    ///
    /// Later sets `F_k` contain `F_K`, so `M_k ≥ M_K` and every later term is
    /// at most `2^{−k}` when `length ≤ M_K`, and at most
    /// `length / M_K · 2^{−k} / (1 − 2^{−k})` in general.
    pub fn truncation_bound_at_length(&self, length: f64) -> f64 {
        if length == 0.0 {
            return 0.0;
        }
        let k = self.depth();
        let m = self.schedule.maxima[k - 1];
        if m <= 0.0 {
            return f64::INFINITY;
        }
        let geometric = bound_for(k);
        let scaled = length / m * geometric / (1.0 - bound_for(k + 1));
        if length <= m {
            geometric.min(scaled)
        } else {
            scaled
        }
    }

    pub fn truncation_bound(&self, g: &GroupElement) -> f64 {
        self.truncation_bound_at_length(self.kernel.evaluate(g))
    }

    /// `ℓ′_K` as a kernel. It carries no coercivity bound.
    pub fn into_kernel(self) -> LengthKernel {
        let label = format!("reconstruct({}, K={})", self.kernel.label(), self.depth());
        let this = Arc::new(self);
        LengthKernel::from_fn(label, Coercivity::zero(), move |g| this.evaluate(g))
    }
}

pub fn reconstruct(kernel: &LengthKernel, schedule: EpsilonSchedule, depth: usize) -> Result<ReconstructedKernel> {
    if depth == 0 || depth > schedule.depth() {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} outside the schedule's 1..={}",
            schedule.depth()
        )));
    }
    let mut schedule = schedule;
    schedule.radii.truncate(depth);
    schedule.maxima.truncate(depth);
    schedule.epsilons.truncate(depth);
    ReconstructedKernel::new(kernel.clone(), schedule)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    /// Allowed shortfall below `N/2`.
    pub margin: f64,
    /// Largest radius used to enumerate each `Γ_k`.
    pub max_radius: u64,
    /// Sampling reaches this far past the radius that encloses the `Γ_k`.
    pub extra_radius: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            margin: bound_for(20),
            max_radius: 10_000,
            extra_radius: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    #[serde(rename = "N")]
    pub n: usize,
    /// `|Γ_k|` for `k = 1..=N`, counted in cosets.
    pub gamma_sizes: Vec<u64>,
    /// Every `Γ_k` was enumerated completely.
    pub certified: bool,
    /// Cosets outside `Γ_1 ∪ … ∪ Γ_N` at which `ℓ′` was evaluated.
    pub sampled: u64,
    pub sample_radius: u64,
    pub min_lprime: Option<f64>,
    /// `N/2 − margin`.
    pub bound: f64,
    pub pass: bool,
}

/// Enumerates `Γ_k = {s̃ : ω_{ε_k}(s) ≥ 1/2} = {ε_k·ℓ ≤ 1}` for `k ≤ N` and
/// checks `ℓ′ ≥ N/2 − margin` on the cosets outside their union.
pub fn properness_audit(
    rec: &ReconstructedKernel,
    cosets: &CosetStructure,
    n: usize,
    options: &AuditOptions,
    limits: &Limits,
) -> Result<AuditReport> {
    if n == 0 || n > rec.depth() {
        return Err(Error::InvalidArgument(format!(
            "N must be in 1..={}, got {n}",
            rec.depth()
        )));
    }
    let model = cosets.parent().as_ref();
    let mut union: HashSet<GroupElement> = HashSet::new();
    let mut gamma_sizes = Vec::with_capacity(n);
    let mut certified = true;
    let mut enclosing = 0;
    for &eps in &rec.schedule.epsilons[..n] {
        let report = quotient_properness(cosets, &rec.kernel, 1.0 / eps, options.max_radius, limits)?;
        certified &= report.complete;
        enclosing = enclosing.max(report.radius_explored);
        gamma_sizes.push(report.count);
        union.extend(report.representatives);
    }
    let sample_radius = enclosing + options.extra_radius;
    let cache = ValueCache::for_kernel(&rec.kernel);
    let outside: Vec<f64> = quotient_ball(cosets, sample_radius, limits)?
        .cosets
        .into_iter()
        .filter(|c| !union.contains(&c.representative))
        .map(|c| cache.get(model, &c.representative))
        .collect::<Result<_>>()?;
    let min_lprime = outside
        .par_iter()
        .map(|&l| rec.partial_at_length(l, rec.depth()))
        .min_by(f64::total_cmp);
    let bound = n as f64 / 2.0 - options.margin;
    Ok(AuditReport {
        n,
        gamma_sizes,
        certified,
        sampled: outside.len() as u64,
        sample_radius,
        min_lprime,
        bound,
        pass: certified && min_lprime.is_none_or(|m| m >= bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupModel, IntegerLattice};
    use crate::kernels::{schoenberg_check, DEFAULT_TOLERANCE, DEFAULT_T_GRID};

    fn z1() -> (GroupModel, LengthKernel) {
        let z: GroupModel = Arc::new(IntegerLattice::new(1));
        let k = LengthKernel::l1(&z).unwrap();
        (z, k)
    }

    #[test]
    fn resolvent_matches_explicit_inverse() {
        // (I + εL)⁻¹ for L = diag(ℓ) on five points, solved by Gauss-Jordan
        let ls = [0.0, 1.0, 1.0, 2.0, 3.5];
        let eps = 0.3;
        let mut a = [[0.0f64; 10]; 5];
        for i in 0..5 {
            a[i][i] = 1.0 + eps * ls[i];
            a[i][5 + i] = 1.0;
        }
        for i in 0..5 {
            let p = a[i][i];
            a[i].iter_mut().for_each(|x| *x /= p);
            for j in 0..5 {
                if j != i {
                    let f = a[j][i];
                    let row = a[i];
                    a[j].iter_mut().zip(row).for_each(|(x, y)| *x -= f * y);
                }
            }
        }
        let d = ResolventDiagonal::new(eps).unwrap();
        for i in 0..5 {
            assert!((a[i][5 + i] - d.at(ls[i])).abs() < 1e-15);
            assert!((1.0 - d.at(ls[i]) - d.complement(ls[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn schedule_on_integers() {
        let (z, k) = z1();
        let s = epsilon_schedule(z.as_ref(), &k, 24, 30, &Limits::default()).unwrap();
        assert_eq!(s.epsilons[0], 1.0);
        assert!((s.epsilons[1] - 1.0 / 6.0).abs() < 1e-16);
        for (k, (&r, d)) in s.radii.iter().zip(s.diagonals()).enumerate() {
            assert!(d.complement(r as f64) <= bound_for(k + 1));
        }
        let flat = LengthKernel::zero();
        let s = epsilon_schedule(z.as_ref(), &flat, 3, 3, &Limits::default()).unwrap();
        assert_eq!(s.epsilons, vec![1.0; 3]);
    }

    #[test]
    fn reconstructed_kernel_properties() {
        let (z, k) = z1();
        let lim = Limits::default();
        let s = epsilon_schedule(z.as_ref(), &k, 10, DEFAULT_MAX_RADIUS, &lim).unwrap();
        let rec = reconstruct(&k, s, 10).unwrap();
        assert_eq!(rec.evaluate(&z.identity()), 0.0);
        let vals: Vec<f64> = (0..30).map(|n| rec.evaluate(&IntegerLattice::encode(&[n]))).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        let lk = rec.clone().into_kernel();
        let report = schoenberg_check(z.as_ref(), &lk, 5, &DEFAULT_T_GRID, DEFAULT_TOLERANCE, &lim).unwrap();
        assert!(report.pass);
        assert_eq!(rec.truncation_bound(&z.identity()), 0.0);
        assert!(reconstruct(&k, rec.schedule().clone(), 11).is_err());
    }

    #[test]
    fn audit_on_integers() {
        let (z, k) = z1();
        let lim = Limits::default();
        let s = epsilon_schedule(z.as_ref(), &k, DEFAULT_DEPTH, DEFAULT_MAX_RADIUS, &lim).unwrap();
        let rec = reconstruct(&k, s, DEFAULT_DEPTH).unwrap();
        let trivial = CosetStructure::trivial(&z);
        let a = properness_audit(&rec, &trivial, 2, &AuditOptions::default(), &lim).unwrap();
        assert_eq!(a.gamma_sizes[0], 3);
        assert!(a.pass && a.sampled > 0);
        assert!(a.min_lprime.unwrap() >= 1.0 - bound_for(20));

        let full = CosetStructure::full(&z);
        let a = properness_audit(&rec, &full, 4, &AuditOptions::default(), &lim).unwrap();
        assert!(a.pass);
        assert_eq!(a.sampled, 0);
        assert_eq!(a.gamma_sizes, vec![1; 4]);
    }
}
