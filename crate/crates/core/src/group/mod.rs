//! Finitely generated groups with canonical element encodings.
//!
//! Every concrete model stores its elements in a normal form (reduced words,
//! coordinate vectors, matrix entries, tuples) so that equality and hashing
//! never require solving a word problem.

mod cyclic;
mod free;
mod heisenberg;
mod lattice;
mod product;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use cyclic::CyclicGroup;
pub use free::FreeGroup;
pub use heisenberg::HeisenbergGroup;
pub use lattice::IntegerLattice;
pub use product::DirectProduct;

/// Default cap on the number of elements held by a single enumeration.
pub const DEFAULT_MAX_ELEMENTS: usize = 5_000_000;
/// Default cap on the dimension of assembled Gram matrices.
pub const DEFAULT_MAX_MATRIX: usize = 4000;

/// Environment variable that overrides [`DEFAULT_MAX_ELEMENTS`].
pub const MAX_ELEMENTS_ENV: &str = "SPECTRAL_GROWTH_MAX_ELEMENTS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_elements: usize,
    pub max_matrix: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_elements: DEFAULT_MAX_ELEMENTS,
            max_matrix: DEFAULT_MAX_MATRIX,
        }
    }
}

impl Limits {
    /// Defaults, with the element cap overridden by `SPECTRAL_GROWTH_MAX_ELEMENTS`
    /// when it holds a positive integer.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var(MAX_ELEMENTS_ENV) {
            let cap: usize = raw.trim().parse().map_err(|_| {
                Error::Parse(format!("{MAX_ELEMENTS_ENV} must be a positive integer, got {raw:?}"))
            })?;
            if cap == 0 {
                return Err(Error::Parse(format!("{MAX_ELEMENTS_ENV} must be positive")));
            }
            limits.max_elements = cap;
        }
        Ok(limits)
    }

    pub fn with_max_elements(mut self, cap: usize) -> Self {
        self.max_elements = cap;
        self
    }

    pub(crate) fn check_elements(&self, requested: usize) -> Result<()> {
        if requested > self.max_elements {
            return Err(Error::ResourceLimit {
                what: "group enumeration",
                requested,
                limit: self.max_elements,
            });
        }
        Ok(())
    }

    pub(crate) fn check_matrix(&self, dim: usize) -> Result<()> {
        if dim > self.max_matrix {
            return Err(Error::ResourceLimit {
                what: "matrix dimension",
                requested: dim,
                limit: self.max_matrix,
            });
        }
        Ok(())
    }
}

/// Canonical encoding of a group element.
///
/// Encodings are sequences of unsigned integers; signed coordinates are stored
/// zigzag-coded so that the identity of every model has the smallest encoding.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Arc<[u64]>);

impl GroupElement {
    pub fn from_encoding(code: Vec<u64>) -> Self {
        GroupElement(code.into())
    }

    pub fn encoding(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement{:?}", &self.0[..])
    }
}

pub(crate) fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

pub(crate) fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

/// Structural tag of a model, used by kernels and inclusions that only make
/// sense on particular families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Free { rank: usize },
    Lattice { dim: usize },
    Cyclic { modulus: u64 },
    Heisenberg,
    Product,
}

pub trait Group: Send + Sync + fmt::Debug {
    /// Spec string that reproduces this model, e.g. `free(2)`.
    fn label(&self) -> String;
    fn kind(&self) -> GroupKind;
    fn identity(&self) -> GroupElement;
    fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement;
    fn invert(&self, g: &GroupElement) -> GroupElement;
    /// Symmetric generating set, closed under inversion.
    fn generators(&self) -> &[GroupElement];

    /// Closed-form word length with respect to [`Group::generators`], when known.
    fn word_length_hint(&self, _g: &GroupElement) -> Option<u64> {
        None
    }

    /// Integer coordinates for abelian lattice models.
    fn coordinates(&self, _g: &GroupElement) -> Option<Vec<i64>> {
        None
    }

    /// Number of elements for finite groups.
    fn order(&self) -> Option<u64> {
        None
    }

    fn format_element(&self, g: &GroupElement) -> String;
    fn parse_element(&self, text: &str) -> Result<GroupElement>;
}

/// Shared handle to a group model.
pub type GroupModel = Arc<dyn Group>;

/// Breadth-first walk over the Cayley graph, one sphere at a time.
///
/// Only the two most recent spheres are retained: in a Cayley graph with a
/// symmetric generating set, neighbours of sphere `r` lie in spheres
/// `r - 1`, `r` or `r + 1`.
pub struct SphereWalk<'a> {
    model: &'a dyn Group,
    limits: Limits,
    radius: Option<u64>,
    previous: HashSet<GroupElement>,
    current: Vec<GroupElement>,
    current_set: HashSet<GroupElement>,
    seen: usize,
}

impl<'a> SphereWalk<'a> {
    pub fn new(model: &'a dyn Group, limits: Limits) -> Result<Self> {
        if model.generators().is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} has an empty generating set",
                model.label()
            )));
        }
        Ok(SphereWalk {
            model,
            limits,
            radius: None,
            previous: HashSet::new(),
            current: Vec::new(),
            current_set: HashSet::new(),
            seen: 0,
        })
    }

    /// Radius of the most recently produced sphere.
    pub fn radius(&self) -> Option<u64> {
        self.radius
    }

    /// Total number of elements produced so far.
    pub fn seen(&self) -> usize {
        self.seen
    }

    /// Produces the next sphere, sorted by encoding. An empty sphere means the
    /// group is finite and exhausted.
    pub fn next_sphere(&mut self) -> Result<&[GroupElement]> {
        let next = match self.radius {
            None => vec![self.model.identity()],
            Some(_) => {
                let mut fresh = HashSet::new();
                for g in &self.current {
                    for s in self.model.generators() {
                        let h = self.model.multiply(g, s);
                        if !self.current_set.contains(&h) && !self.previous.contains(&h) {
                            fresh.insert(h);
                        }
                    }
                }
                let mut next: Vec<_> = fresh.into_iter().collect();
                next.sort_unstable();
                next
            }
        };
        self.limits.check_elements(self.seen + next.len())?;
        self.seen += next.len();
        self.radius = Some(self.radius.map_or(0, |r| r + 1));
        self.previous = std::mem::take(&mut self.current_set);
        self.current_set = next.iter().cloned().collect();
        self.current = next;
        Ok(&self.current)
    }
}

/// All elements of word length at most `radius`, ordered by (length, encoding).
#[derive(Debug, Clone)]
pub struct Ball {
    pub radius: u64,
    pub elements: Vec<GroupElement>,
    pub sphere_sizes: Vec<u64>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements of word length exactly `n`.
    pub fn sphere(&self, n: u64) -> &[GroupElement] {
        let n = n as usize;
        if n >= self.sphere_sizes.len() {
            return &[];
        }
        let start: u64 = self.sphere_sizes[..n].iter().sum();
        let start = start as usize;
        &self.elements[start..start + self.sphere_sizes[n] as usize]
    }

    /// Word length of each element, aligned with `elements`.
    pub fn lengths(&self) -> impl Iterator<Item = u64> + '_ {
        self.sphere_sizes
            .iter()
            .enumerate()
            .flat_map(|(n, &size)| std::iter::repeat_n(n as u64, size as usize))
    }
}

/// Enumerates the ball of radius `n` around the identity.
pub fn ball_enumerate(model: &dyn Group, n: u64, limits: &Limits) -> Result<Ball> {
    let mut walk = SphereWalk::new(model, *limits)?;
    let mut elements = Vec::new();
    let mut sphere_sizes = Vec::new();
    for _ in 0..=n {
        let sphere = walk.next_sphere()?;
        if sphere.is_empty() {
            // finite group: the remaining spheres are empty
            sphere_sizes.push(0);
            continue;
        }
        sphere_sizes.push(sphere.len() as u64);
        elements.extend_from_slice(sphere);
    }
    Ok(Ball {
        radius: n,
        elements,
        sphere_sizes,
    })
}

/// Minimal word length of `g`, or `None` when it exceeds `horizon`.
pub fn word_length(
    model: &dyn Group,
    g: &GroupElement,
    horizon: u64,
    limits: &Limits,
) -> Result<Option<u64>> {
    let mut walk = SphereWalk::new(model, *limits)?;
    for r in 0..=horizon {
        let sphere = walk.next_sphere()?;
        if sphere.is_empty() {
            return Ok(None);
        }
        if sphere.binary_search(g).is_ok() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}
