//! Subgroup inclusions `H < G`: coset spaces, invariance of kernels under
//! `H`, properness on `G/H`, orbit growth of the left `H`-action and
//! relative spectra counted by cosets.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{ball_enumerate, FreeGroup, Group, GroupElement, GroupKind, GroupModel, IntegerLattice, Limits, SphereWalk};
use crate::kernels::{LengthKernel, ValueCache};
use crate::spectral::{
    certifying_radius, group_values, partition_function, PartitionEstimate, SpectrumTruncation,
    TailModel, Verdict,
};

/// Report label emitted when properness and finite relative partition
/// functions are certified. It is a label, not a proof of amenability.
pub const CRITERION_LABEL: &str = "relative amenability criterion satisfied";

type Membership = dyn Fn(&GroupElement) -> bool + Send + Sync;
type Section = dyn Fn(&GroupElement) -> GroupElement + Send + Sync;

/// A subgroup `H` of a model together with a canonical representative for
/// each coset `sH`.
///
/// `coset_rep(s)⁻¹·s` lies in `H`, `coset_rep` is idempotent, and the
/// representative has minimal word length in its coset.
#[derive(Clone)]
pub struct CosetStructure {
    parent: GroupModel,
    label: String,
    in_subgroup: Arc<Membership>,
    coset_rep: Arc<Section>,
    index: Option<u64>,
}

impl fmt::Debug for CosetStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CosetStructure")
            .field("parent", &self.parent.label())
            .field("label", &self.label)
            .field("index", &self.index)
            .finish_non_exhaustive()
    }
}

impl CosetStructure {
    /// A custom inclusion. `index` is the number of cosets when known.
    pub fn new(
        parent: GroupModel,
        label: impl Into<String>,
        in_subgroup: impl Fn(&GroupElement) -> bool + Send + Sync + 'static,
        coset_rep: impl Fn(&GroupElement) -> GroupElement + Send + Sync + 'static,
        index: Option<u64>,
    ) -> Self {
        CosetStructure {
            parent,
            label: label.into(),
            in_subgroup: Arc::new(in_subgroup),
            coset_rep: Arc::new(coset_rep),
            index,
        }
    }

    /// `H = {e}`.
    pub fn trivial(parent: &GroupModel) -> Self {
        let id = parent.identity();
        Self::new(parent.clone(), "trivial", move |g| *g == id, |g| g.clone(), parent.order())
    }

    /// `H = G`.
    pub fn full(parent: &GroupModel) -> Self {
        let id = parent.identity();
        Self::new(parent.clone(), "full", |_| true, move |_| id.clone(), Some(1))
    }

    /// The `i`-th coordinate axis of `Z^d`.
    pub fn axis(parent: &GroupModel, i: usize) -> Result<Self> {
        match parent.kind() {
            GroupKind::Lattice { dim } if i < dim => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "axis({i}) needs zd(d) with d > {i}, got {}",
                    parent.label()
                )))
            }
        }
        let index = (parent.kind() == GroupKind::Lattice { dim: 1 }).then_some(1);
        Ok(Self::new(
            parent.clone(),
            format!("axis({i})"),
            move |g| {
                IntegerLattice::decode(g)
                    .iter()
                    .enumerate()
                    .all(|(j, &x)| j == i || x == 0)
            },
            move |g| {
                let mut v = IntegerLattice::decode(g);
                v[i] = 0;
                IntegerLattice::encode(&v)
            },
            index,
        ))
    }

    /// The cyclic subgroup generated by the free generator `generator`
    /// (0 for `a`). Representatives drop the trailing powers of it.
    pub fn cyclic_free(parent: &GroupModel, generator: usize) -> Result<Self> {
        let rank = match parent.kind() {
            GroupKind::Free { rank } if generator < rank => rank,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "cyclic-free needs a free group with generator {generator}, got {}",
                    parent.label()
                )))
            }
        };
        let letters = [2 * generator as u64 + 1, 2 * generator as u64 + 2];
        let name = FreeGroup::new(rank)?.format_element(&GroupElement::from_encoding(vec![letters[0]]));
        let index = (rank == 1).then_some(1);
        Ok(Self::new(
            parent.clone(),
            format!("cyclic-free({name})"),
            move |g| g.encoding().iter().all(|x| letters.contains(x)),
            move |g| {
                let w = g.encoding();
                let keep = w.len() - w.iter().rev().take_while(|x| letters.contains(x)).count();
                GroupElement::from_encoding(w[..keep].to_vec())
            },
            index,
        ))
    }

    pub fn parent(&self) -> &GroupModel {
        &self.parent
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn in_subgroup(&self, g: &GroupElement) -> bool {
        (self.in_subgroup)(g)
    }

    pub fn coset_rep(&self, g: &GroupElement) -> GroupElement {
        (self.coset_rep)(g)
    }

    /// Number of cosets, when finite and known.
    pub fn index(&self) -> Option<u64> {
        self.index
    }

    /// Elements of `H` within the ball of radius `radius`, with their lengths.
    fn subgroup_sample(&self, radius: u64, limits: &Limits) -> Result<Vec<(GroupElement, u64)>> {
        let ball = ball_enumerate(self.parent.as_ref(), radius, limits)?;
        Ok(ball
            .elements
            .iter()
            .zip(ball.lengths())
            .filter(|(g, _)| self.in_subgroup(g))
            .map(|(g, l)| (g.clone(), l))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub inclusion: String,
    pub radius: u64,
    pub tolerance: f64,
    /// Elements of `H` in the ball, the identity included.
    pub sample_size: usize,
    /// Set when the sample holds nothing but the identity.
    pub sample_trivial: bool,
    pub right_invariant: bool,
    pub left_invariant: bool,
    pub vanishes_on_subgroup: bool,
    /// Whether `{ℓ = 0}` inside the ball is exactly `H` inside the ball.
    pub zero_set_matches_subgroup: bool,
    pub max_deviation: f64,
    pub counterexample: Option<String>,
    pub pass: bool,
}

/// Checks `ℓ(sh) = ℓ(s)`, `ℓ(hs) = ℓ(s)` and `ℓ(h) = 0` for `s` in the ball
/// of radius `radius` and `h` in `H` within the same ball.
pub fn h_invariance_check(
    cosets: &CosetStructure,
    kernel: &LengthKernel,
    radius: u64,
    tol: f64,
    limits: &Limits,
) -> Result<InvarianceReport> {
    let model = cosets.parent.as_ref();
    let ball = ball_enumerate(model, radius, limits)?;
    let sample: Vec<&GroupElement> = ball.elements.iter().filter(|g| cosets.in_subgroup(g)).collect();
    let cache = ValueCache::for_kernel(kernel);
    let mut counterexample = None;
    let mut note = |text: String| {
        if counterexample.is_none() {
            counterexample = Some(text);
        }
    };
    let mut vanishes = true;
    for h in &sample {
        let v = cache.get(model, h)?;
        if v.abs() > tol {
            vanishes = false;
            note(format!("l({}) = {v}", model.format_element(h)));
        }
    }
    let mut zero_set_matches = true;
    for s in &ball.elements {
        if (cache.get(model, s)?.abs() <= tol) != cosets.in_subgroup(s) {
            zero_set_matches = false;
        }
    }
    let deviations = ball
        .elements
        .par_iter()
        .map(|s| -> Result<(f64, f64, Option<String>)> {
            let base = cache.get(model, s)?;
            let (mut right, mut left, mut witness) = (0.0f64, 0.0f64, None);
            for h in &sample {
                let r = (cache.get(model, &model.multiply(s, h))? - base).abs();
                let l = (cache.get(model, &model.multiply(h, s))? - base).abs();
                if witness.is_none() && r.max(l) > tol {
                    witness = Some(format!(
                        "s = {}, h = {}: deviation {}",
                        model.format_element(s),
                        model.format_element(h),
                        r.max(l)
                    ));
                }
                right = right.max(r);
                left = left.max(l);
            }
            Ok((right, left, witness))
        })
        .collect::<Result<Vec<_>>>()?;
    let right = deviations.iter().map(|d| d.0).fold(0.0, f64::max);
    let left = deviations.iter().map(|d| d.1).fold(0.0, f64::max);
    if let Some(w) = deviations.into_iter().find_map(|d| d.2) {
        note(w);
    }
    let (right_invariant, left_invariant) = (right <= tol, left <= tol);
    Ok(InvarianceReport {
        inclusion: cosets.label.clone(),
        radius,
        tolerance: tol,
        sample_size: sample.len(),
        sample_trivial: sample.len() <= 1,
        right_invariant,
        left_invariant,
        vanishes_on_subgroup: vanishes,
        zero_set_matches_subgroup: zero_set_matches,
        max_deviation: right.max(left),
        counterexample,
        pass: right_invariant && left_invariant && vanishes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosetRecord {
    pub representative: GroupElement,
    /// Minimal word length over the coset.
    pub min_length: u64,
}

/// Cosets met by the ball of radius `horizon`, ordered by minimal length and
/// then by the encoding of the representative.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientBall {
    pub horizon: u64,
    pub cosets: Vec<CosetRecord>,
    /// The parent group was exhausted before the horizon.
    pub exhausted: bool,
}

/// Walks the parent group sphere by sphere and yields each newly met coset.
struct CosetWalk<'a> {
    cosets: &'a CosetStructure,
    walk: SphereWalk<'a>,
    seen: HashSet<GroupElement>,
}

impl<'a> CosetWalk<'a> {
    fn new(cosets: &'a CosetStructure, limits: &Limits) -> Result<Self> {
        Ok(CosetWalk {
            cosets,
            walk: SphereWalk::new(cosets.parent.as_ref(), *limits)?,
            seen: HashSet::new(),
        })
    }

    /// New representatives on the next sphere, sorted; `None` once the
    /// group is exhausted.
    fn next_sphere(&mut self) -> Result<Option<Vec<GroupElement>>> {
        let sphere = self.walk.next_sphere()?;
        if sphere.is_empty() {
            return Ok(None);
        }
        let mut fresh: Vec<GroupElement> = sphere
            .iter()
            .map(|g| self.cosets.coset_rep(g))
            .filter(|rep| self.seen.insert(rep.clone()))
            .collect();
        fresh.sort_unstable();
        Ok(Some(fresh))
    }

    fn count(&self) -> usize {
        self.seen.len()
    }
}

pub fn quotient_ball(cosets: &CosetStructure, horizon: u64, limits: &Limits) -> Result<QuotientBall> {
    let mut walk = CosetWalk::new(cosets, limits)?;
    let mut records = Vec::new();
    let mut exhausted = false;
    for r in 0..=horizon {
        match walk.next_sphere()? {
            Some(fresh) => records.extend(fresh.into_iter().map(|representative| CosetRecord {
                representative,
                min_length: r,
            })),
            None => {
                exhausted = true;
                break;
            }
        }
    }
    Ok(QuotientBall {
        horizon,
        cosets: records,
        exhausted,
    })
}

/// Cosets `s̃` with `ℓ(s̃) ≤ Λ` found over growing balls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropernessReport {
    pub inclusion: String,
    pub lambda: f64,
    pub count: u64,
    /// Every coset with `ℓ ≤ Λ` has been found.
    pub complete: bool,
    pub radius_explored: u64,
    /// Cumulative count of cosets with `ℓ ≤ Λ` met within each radius.
    pub counts_by_radius: Vec<u64>,
    pub certificate: String,
    #[serde(skip)]
    pub values: Vec<f64>,
    /// Representatives of the counted cosets, aligned with `values`.
    #[serde(skip)]
    pub representatives: Vec<GroupElement>,
}

pub fn quotient_properness(
    cosets: &CosetStructure,
    kernel: &LengthKernel,
    lambda: f64,
    max_radius: u64,
    limits: &Limits,
) -> Result<PropernessReport> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("cutoff must be finite and nonnegative, got {lambda}")));
    }
    let model = cosets.parent.as_ref();
    let certified_at = certifying_radius(&kernel.relative_coercivity(&cosets.label), lambda);
    let last = certified_at.map_or(max_radius, |r| r.min(max_radius));
    let cache = ValueCache::for_kernel(kernel);
    let mut walk = CosetWalk::new(cosets, limits)?;
    let mut values = Vec::new();
    let mut representatives = Vec::new();
    let mut counts_by_radius = Vec::new();
    let mut radius_explored = 0;
    let mut exhausted = false;
    let mut index_reached = false;
    for r in 0..=max_radius {
        let Some(fresh) = walk.next_sphere()? else {
            exhausted = true;
            break;
        };
        radius_explored = r;
        for rep in &fresh {
            let v = cache.get(model, rep)?;
            if v <= lambda {
                values.push(v);
                representatives.push(rep.clone());
            }
        }
        counts_by_radius.push(values.len() as u64);
        index_reached = cosets.index.is_some_and(|n| walk.count() as u64 >= n);
        if index_reached || r >= last {
            break;
        }
    }
    let certified = certified_at.is_some_and(|r| r <= max_radius);
    let certificate = if exhausted {
        "parent group exhausted".to_string()
    } else if index_reached {
        format!("all {} cosets found", walk.count())
    } else if certified {
        format!(
            "coercivity on minimal coset representatives exceeds {lambda} beyond radius {}",
            certified_at.unwrap_or_default()
        )
    } else {
        "lower bound only: no coercivity on coset representatives".to_string()
    };
    Ok(PropernessReport {
        inclusion: cosets.label.clone(),
        lambda,
        count: values.len() as u64,
        complete: exhausted || index_reached || certified,
        radius_explored,
        counts_by_radius,
        certificate,
        values,
        representatives,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitVerdict {
    BoundedWithinHorizon,
    Growing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitProbe {
    pub representative: GroupElement,
    /// Number of distinct cosets `h·sH` with `|h| ≤ horizon`, per horizon.
    pub counts: Vec<u64>,
    pub verdict: OrbitVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiNormalityReport {
    pub inclusion: String,
    pub probe_radius: u64,
    pub horizons: Vec<u64>,
    pub probes: Vec<OrbitProbe>,
    /// `Growing` when any probe grows.
    pub verdict: OrbitVerdict,
}

/// Orbit sizes of the left `H`-action on the cosets met by the ball of
/// radius `probe_radius`. A probe is growing when its counts strictly
/// increase across the last three horizons.
pub fn quasi_normality(
    cosets: &CosetStructure,
    probe_radius: u64,
    horizons: &[u64],
    limits: &Limits,
) -> Result<QuasiNormalityReport> {
    if horizons.is_empty() || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "horizons must be nonempty and strictly increasing, got {horizons:?}"
        )));
    }
    let model = cosets.parent.as_ref();
    let probes = quotient_ball(cosets, probe_radius, limits)?.cosets;
    let sample = cosets.subgroup_sample(*horizons.last().unwrap(), limits)?;
    let probes: Vec<OrbitProbe> = probes
        .into_par_iter()
        .map(|record| {
            let s = record.representative;
            let counts: Vec<u64> = horizons
                .iter()
                .map(|&horizon| {
                    sample
                        .iter()
                        .filter(|(_, len)| *len <= horizon)
                        .map(|(h, _)| cosets.coset_rep(&model.multiply(h, &s)))
                        .collect::<HashSet<_>>()
                        .len() as u64
                })
                .collect();
            let growing = counts.len() >= 3 && counts[counts.len() - 3..].windows(2).all(|w| w[0] < w[1]);
            OrbitProbe {
                representative: s,
                counts,
                verdict: if growing {
                    OrbitVerdict::Growing
                } else {
                    OrbitVerdict::BoundedWithinHorizon
                },
            }
        })
        .collect();
    let verdict = if probes.iter().any(|p| p.verdict == OrbitVerdict::Growing) {
        OrbitVerdict::Growing
    } else {
        OrbitVerdict::BoundedWithinHorizon
    };
    Ok(QuasiNormalityReport {
        inclusion: cosets.label.clone(),
        probe_radius,
        horizons: horizons.to_vec(),
        probes,
        verdict,
    })
}

/// Spectrum of `ℓ` on `G/H` with coset counts as multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeSpectrum {
    pub inclusion: String,
    #[serde(flatten)]
    pub truncation: SpectrumTruncation,
}

pub fn relative_spectrum(
    cosets: &CosetStructure,
    kernel: &LengthKernel,
    lambda: f64,
    max_radius: u64,
    limits: &Limits,
) -> Result<RelativeSpectrum> {
    let report = quotient_properness(cosets, kernel, lambda, max_radius, limits)?;
    Ok(RelativeSpectrum {
        inclusion: report.inclusion,
        truncation: SpectrumTruncation {
            cutoff: lambda,
            entries: group_values(report.values),
            complete: report.complete,
            radius_explored: report.radius_explored,
        },
    })
}

/// Tail model for the coset multiplicities: all cosets listed for finite
/// index, the kernel's own model for the trivial subgroup, otherwise the
/// bound registered on the kernel for this inclusion.
pub fn relative_tail_model(
    cosets: &CosetStructure,
    kernel: &LengthKernel,
    spectrum: &RelativeSpectrum,
) -> Result<Option<TailModel>> {
    if let Some(n) = cosets.index {
        let listed = spectrum.truncation.total_multiplicity()?;
        if spectrum.truncation.complete && listed == n {
            return TailModel::finite(spectrum.truncation.cutoff, n).map(Some);
        }
    }
    if cosets.label == "trivial" {
        return Ok(kernel.tail_model().cloned());
    }
    Ok(kernel.relative_tail(&cosets.label))
}

/// `Σ_{s̃ ∈ G/H} e^{−tℓ(s̃)}` bracketed as in [`partition_function`].
pub fn relative_partition(
    spectrum: &RelativeSpectrum,
    t: f64,
    tail: Option<&TailModel>,
    depth: u64,
) -> Result<PartitionEstimate> {
    partition_function(&spectrum.truncation, t, tail, depth)
}

/// True when invariance holds, properness is certified at every sampled
/// cutoff and every relative partition estimate is certified finite.
pub fn criterion_satisfied(
    invariance: &InvarianceReport,
    properness: &[PropernessReport],
    partitions: &[PartitionEstimate],
) -> bool {
    invariance.pass
        && !properness.is_empty()
        && properness.iter().all(|p| p.complete)
        && !partitions.is_empty()
        && partitions.iter().all(|p| p.verdict == Verdict::Finite)
}
