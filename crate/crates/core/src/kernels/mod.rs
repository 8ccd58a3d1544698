//! Length kernels on groups and numerical positivity evidence.

mod check;
mod coercivity;

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};

use crate::error::{Error, Result};
use crate::group::{
    ball_enumerate, FreeGroup, Group, GroupElement, GroupKind, GroupModel, IntegerLattice, Limits,
    SphereWalk,
};
use crate::spectral::{TailBound, TailModel};

pub use check::{
    direct_cnd_check, positive_definite_check, schoenberg_check, CndReport, PsdEntry, PsdReport,
    DEFAULT_TOLERANCE, DEFAULT_T_GRID,
};
pub use coercivity::Coercivity;

type EvalFn = dyn Fn(&GroupElement) -> f64 + Send + Sync;

/// Group homomorphisms onto Z used by pullback kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homomorphism {
    /// `Z^d → Z`, the i-th coordinate.
    Projection(usize),
    /// `F_k → Z`, exponent sum of the i-th generator.
    ExponentSum(usize),
}

impl fmt::Display for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Homomorphism::Projection(i) => write!(f, "proj({i})"),
            Homomorphism::ExponentSum(i) => write!(f, "expsum({i})"),
        }
    }
}

/// Coercivity and tail data valid on the coset space of one inclusion,
/// keyed by the inclusion's spec string.
#[derive(Debug, Clone)]
pub struct RelativeBound {
    pub inclusion: String,
    pub coercivity: Coercivity,
    pub tail: Option<TailModel>,
}

/// A symmetric nonnegative function `ℓ` on a group with `ℓ(e) = 0`.
#[derive(Clone)]
pub struct LengthKernel {
    label: String,
    eval: Arc<EvalFn>,
    coercivity: Coercivity,
    tail: Option<TailModel>,
    relative: Vec<RelativeBound>,
}

impl fmt::Debug for LengthKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LengthKernel")
            .field("label", &self.label)
            .field("coercivity", &self.coercivity)
            .field("tail", &self.tail)
            .finish_non_exhaustive()
    }
}

fn lattice_dim(model: &dyn Group, what: &str) -> Result<usize> {
    match model.kind() {
        GroupKind::Lattice { dim } => Ok(dim),
        _ => Err(Error::InvalidArgument(format!(
            "{what} needs a lattice zd(d), got {}",
            model.label()
        ))),
    }
}

impl LengthKernel {
    /// A kernel from an arbitrary function. The coercivity bound is asserted
    /// by the caller; [`LengthKernel::validate`] checks it on a ball.
    pub fn from_fn(
        label: impl Into<String>,
        coercivity: Coercivity,
        f: impl Fn(&GroupElement) -> f64 + Send + Sync + 'static,
    ) -> Self {
        LengthKernel {
            label: label.into(),
            eval: Arc::new(f),
            coercivity,
            tail: None,
            relative: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self::from_fn("zero", Coercivity::zero(), |_| 0.0)
    }

    /// Word length with respect to the model's generators.
    pub fn word_length(model: &GroupModel, limits: &Limits) -> Result<Self> {
        let tail = word_length_tail(model.as_ref(), limits)?;
        let table = Arc::new(WordLengthTable::new(model.clone(), *limits));
        let mut k = Self::from_fn("wordlength", Coercivity::linear(1.0)?, move |g| {
            table.length(g).map_or(f64::NAN, |l| l as f64)
        });
        k.tail = tail;
        Ok(k)
    }

    /// `Σ |n_i|` on `Z^d`.
    pub fn l1(model: &GroupModel) -> Result<Self> {
        let dim = lattice_dim(model.as_ref(), "l1")?;
        let mut k = Self::from_fn("l1", Coercivity::linear(1.0)?, |g| {
            IntegerLattice::decode(g).iter().map(|x| x.unsigned_abs() as f64).sum()
        });
        k.tail = Some(lattice_word_length_tail(dim)?);
        Ok(k)
    }

    /// `Σ n_i²` on `Z^d`.
    pub fn l2_squared(model: &GroupModel) -> Result<Self> {
        let dim = lattice_dim(model.as_ref(), "l2sq")?;
        let mut k = Self::from_fn("l2sq", Coercivity::power(1.0 / dim.max(1) as f64, 2.0)?, |g| {
            IntegerLattice::decode(g).iter().map(|&x| (x * x) as f64).sum()
        });
        let d = dim as f64;
        k.tail = Some(TailModel::upper_only(
            TailBound::Polynomial {
                scale: 3f64.powf(d),
                degree: d / 2.0,
            },
            true,
        )?);
        Ok(k)
    }

    /// `(Σ |n_i|)^alpha` on `Z^d`; on `Z` this is `|n|^alpha`.
    pub fn power(model: &GroupModel, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("power exponent must be positive, got {alpha}")));
        }
        let dim = lattice_dim(model.as_ref(), "power")?;
        let mut k = Self::from_fn(format!("power({alpha})"), Coercivity::power(1.0, alpha)?, move |g| {
            let r: u64 = IntegerLattice::decode(g).iter().map(|x| x.unsigned_abs()).sum();
            (r as f64).powf(alpha)
        });
        let d = dim as f64;
        k.tail = Some(TailModel::upper_only(
            TailBound::Polynomial {
                scale: 3f64.powf(d),
                degree: d / alpha,
            },
            alpha.fract() == 0.0,
        )?);
        Ok(k)
    }

    /// `inner ∘ hom`, where `inner` is a kernel on Z.
    pub fn pullback(model: &GroupModel, hom: Homomorphism, inner: LengthKernel) -> Result<Self> {
        let label = format!("pullback({hom}, {})", inner.label);
        let map: Box<dyn Fn(&GroupElement) -> i64 + Send + Sync> = match (hom, model.kind()) {
            (Homomorphism::Projection(i), GroupKind::Lattice { dim }) if i < dim => {
                Box::new(move |g| IntegerLattice::decode(g)[i])
            }
            (Homomorphism::ExponentSum(i), GroupKind::Free { rank }) if i < rank => {
                let f = FreeGroup::new(rank)?;
                Box::new(move |g| f.exponent_sum(g, i))
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "{hom} is not a homomorphism on {}",
                    model.label()
                )))
            }
        };
        let inner_eval = inner.eval.clone();
        let mut k = Self::from_fn(label, Coercivity::zero(), move |g| {
            inner_eval(&IntegerLattice::encode(&[map(g)]))
        });
        if let (Homomorphism::Projection(i), GroupKind::Lattice { dim }) = (hom, model.kind()) {
            if dim == 1 {
                // the projection is the identity of Z
                k.coercivity = inner.coercivity.clone();
                k.tail = inner.tail.clone();
            } else if dim == 2 {
                // Z^2 / (other axis) is identified with Z through the projection,
                // and the canonical coset representative has length |n_i|
                k.relative.push(RelativeBound {
                    inclusion: format!("axis({})", 1 - i),
                    coercivity: inner.coercivity.clone(),
                    tail: inner.tail.clone(),
                });
            }
        }
        Ok(k)
    }

    pub fn sum(a: &LengthKernel, b: &LengthKernel) -> Self {
        let (fa, fb) = (a.eval.clone(), b.eval.clone());
        let mut k = Self::from_fn(
            format!("sum({}, {})", a.label, b.label),
            a.coercivity.plus(&b.coercivity),
            move |g| fa(g) + fb(g),
        );
        let mut labels: Vec<&str> = a
            .relative
            .iter()
            .chain(&b.relative)
            .map(|r| r.inclusion.as_str())
            .collect();
        labels.sort_unstable();
        labels.dedup();
        k.relative = labels
            .into_iter()
            .map(|l| RelativeBound {
                inclusion: l.to_string(),
                coercivity: a.relative_coercivity(l).plus(&b.relative_coercivity(l)),
                tail: None,
            })
            .collect();
        k
    }

    pub fn scale(factor: f64, k: &LengthKernel) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor must be nonnegative, got {factor}")));
        }
        let f = k.eval.clone();
        let mut out = Self::from_fn(
            format!("scale({factor}, {})", k.label),
            k.coercivity.scaled(factor),
            move |g| factor * f(g),
        );
        if factor == 1.0 {
            out.tail = k.tail.clone();
        }
        out.relative = k
            .relative
            .iter()
            .map(|r| RelativeBound {
                inclusion: r.inclusion.clone(),
                coercivity: r.coercivity.scaled(factor),
                tail: if factor == 1.0 { r.tail.clone() } else { None },
            })
            .collect();
        Ok(out)
    }

    /// Explicit values; elements missing from the table are undefined and make
    /// any computation that reaches them fail.
    pub fn table(label: impl Into<String>, values: HashMap<GroupElement, f64>) -> Self {
        Self::from_fn(label, Coercivity::zero(), move |g| {
            values.get(g).copied().unwrap_or(f64::NAN)
        })
    }

    /// Reads a table kernel from CSV rows `encoding,value`, where `encoding` is
    /// the model's text form of the element.
    pub fn table_from_csv(model: &dyn Group, path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut values = HashMap::new();
        for row in reader.records() {
            let row = row?;
            if row.len() != 2 {
                return Err(Error::Parse(format!("table rows need 2 fields, got {row:?}")));
            }
            let g = model.parse_element(&row[0])?;
            let v: f64 = row[1]
                .parse()
                .map_err(|_| Error::Parse(format!("bad table value {:?}", &row[1])))?;
            values.insert(g, v);
        }
        Ok(Self::table(format!("table({})", path.display()), values))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_tail(mut self, tail: Option<TailModel>) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_relative(mut self, bound: RelativeBound) -> Self {
        self.relative.retain(|r| r.inclusion != bound.inclusion);
        self.relative.push(bound);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn evaluate(&self, g: &GroupElement) -> f64 {
        (self.eval)(g)
    }

    pub fn coercivity(&self) -> &Coercivity {
        &self.coercivity
    }

    pub fn tail_model(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }

    pub fn relative_bounds(&self) -> &[RelativeBound] {
        &self.relative
    }

    /// Lower bound on `ℓ` in terms of the length of canonical coset
    /// representatives. Falls back to the kernel's own coercivity, which is
    /// valid for any inclusion under which `ℓ` is invariant.
    pub fn relative_coercivity(&self, inclusion: &str) -> Coercivity {
        self.relative
            .iter()
            .find(|r| r.inclusion == inclusion)
            .map_or_else(|| self.coercivity.clone(), |r| r.coercivity.clone())
    }

    pub fn relative_tail(&self, inclusion: &str) -> Option<TailModel> {
        self.relative
            .iter()
            .find(|r| r.inclusion == inclusion)
            .and_then(|r| r.tail.clone())
    }

    /// Checks `ℓ(e) = 0`, nonnegativity, `ℓ(g⁻¹) = ℓ(g)` and the coercivity
    /// bound on every element of the ball of radius `radius`.
    pub fn validate(&self, model: &dyn Group, radius: u64, limits: &Limits) -> Result<()> {
        let ball = ball_enumerate(model, radius, limits)?;
        let fail = |g: &GroupElement, what: &str| Error::KernelValue {
            kernel: format!("{} ({what})", self.label),
            element: model.format_element(g),
        };
        for (g, len) in ball.elements.iter().zip(ball.lengths()) {
            let v = self.evaluate(g);
            if !v.is_finite() || v < 0.0 {
                return Err(fail(g, "not a finite nonnegative value"));
            }
            if len == 0 && v != 0.0 {
                return Err(fail(g, "nonzero at the identity"));
            }
            if self.evaluate(&model.invert(g)) != v {
                return Err(fail(g, "not symmetric"));
            }
            if v < self.coercivity.eval(len) * (1.0 - 1e-12) {
                return Err(fail(g, "coercivity bound violated"));
            }
        }
        Ok(())
    }
}

/// Word lengths by breadth-first search, grown on demand, for models
/// without a closed form.
struct WordLengthTable {
    model: GroupModel,
    limits: Limits,
    state: Mutex<(HashMap<GroupElement, u64>, u64, bool)>,
}

impl WordLengthTable {
    fn new(model: GroupModel, limits: Limits) -> Self {
        WordLengthTable {
            model,
            limits,
            state: Mutex::new((HashMap::new(), 0, false)),
        }
    }

    fn length(&self, g: &GroupElement) -> Option<u64> {
        if let Some(l) = self.model.word_length_hint(g) {
            return Some(l);
        }
        let mut state = self.state.lock();
        let (table, explored, exhausted) = &mut *state;
        if let Some(&l) = table.get(g) {
            return Some(l);
        }
        if *exhausted {
            return None;
        }
        // re-walk from scratch to a larger radius; the walk only keeps two spheres
        let target = (*explored * 2).max(8);
        let mut walk = SphereWalk::new(self.model.as_ref(), self.limits).ok()?;
        for r in 0..=target {
            let sphere = match walk.next_sphere() {
                Ok(s) => s,
                Err(_) => {
                    *exhausted = true;
                    return None;
                }
            };
            if sphere.is_empty() {
                *exhausted = true;
                break;
            }
            for h in sphere {
                table.entry(h.clone()).or_insert(r);
            }
            if table.len() > self.limits.max_elements {
                *exhausted = true;
                break;
            }
        }
        *explored = target;
        match table.get(g) {
            Some(&l) => Some(l),
            None => {
                drop(state);
                self.length(g)
            }
        }
    }
}

fn lattice_word_length_tail(dim: usize) -> Result<TailModel> {
    if dim == 1 {
        // two elements at every distance n >= 1
        return TailModel::exact_polynomial(2.0, 0.0);
    }
    let d = dim as i32;
    // ℓ¹ spheres in Z^d hold at most (3^d − 1)·n^(d−1) points for n >= 1
    TailModel::upper_only(
        TailBound::Polynomial {
            scale: 3f64.powi(d) - 1.0,
            degree: (d - 1) as f64,
        },
        true,
    )
}

fn word_length_tail(model: &dyn Group, limits: &Limits) -> Result<Option<TailModel>> {
    match model.kind() {
        GroupKind::Free { rank } => {
            let r = (2 * rank - 1) as f64;
            Ok(Some(TailModel::exact_geometric(2.0 * rank as f64 / r, r)?))
        }
        GroupKind::Lattice { dim } if dim >= 1 => Ok(Some(lattice_word_length_tail(dim)?)),
        _ => match model.order() {
            Some(order) if (order as usize) <= limits.max_elements => {
                let mut walk = SphereWalk::new(model, *limits)?;
                let mut diameter = 0;
                loop {
                    let sphere = walk.next_sphere()?;
                    if sphere.is_empty() {
                        break;
                    }
                    diameter = walk.radius().unwrap_or(0);
                }
                Ok(Some(TailModel::finite(diameter as f64, order)?))
            }
            _ => Ok(None),
        },
    }
}

/// Concurrent memo table for kernel values keyed by canonical encoding.
pub(crate) struct ValueCache<'a> {
    label: &'a str,
    f: &'a (dyn Fn(&GroupElement) -> f64 + Sync),
    nonnegative: bool,
    values: RwLock<HashMap<GroupElement, f64>>,
}

impl<'a> ValueCache<'a> {
    pub(crate) fn new(
        label: &'a str,
        f: &'a (dyn Fn(&GroupElement) -> f64 + Sync),
        nonnegative: bool,
    ) -> Self {
        ValueCache {
            label,
            f,
            nonnegative,
            values: RwLock::new(HashMap::new()),
        }
    }

    pub(crate) fn for_kernel(kernel: &'a LengthKernel) -> Self {
        Self::new(&kernel.label, kernel.eval.as_ref(), true)
    }

    pub(crate) fn get(&self, model: &dyn Group, g: &GroupElement) -> Result<f64> {
        if let Some(&v) = self.values.read().get(g) {
            return Ok(v);
        }
        let v = (self.f)(g);
        if !v.is_finite() || (self.nonnegative && v < 0.0) {
            return Err(Error::KernelValue {
                kernel: self.label.to_string(),
                element: model.format_element(g),
            });
        }
        self.values.write().insert(g.clone(), v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{CyclicGroup, HeisenbergGroup};

    fn z(d: usize) -> GroupModel {
        Arc::new(IntegerLattice::new(d))
    }

    #[test]
    fn builtins_validate_on_balls() {
        let limits = Limits::default();
        let f2: GroupModel = Arc::new(FreeGroup::new(2).unwrap());
        let heis: GroupModel = Arc::new(HeisenbergGroup::new());
        let cases = vec![
            (f2.clone(), LengthKernel::word_length(&f2, &limits).unwrap()),
            (heis.clone(), LengthKernel::word_length(&heis, &limits).unwrap()),
            (z(2), LengthKernel::l1(&z(2)).unwrap()),
            (z(2), LengthKernel::l2_squared(&z(2)).unwrap()),
            (z(1), LengthKernel::power(&z(1), 3.0).unwrap()),
            (z(3), LengthKernel::l2_squared(&z(3)).unwrap()),
        ];
        for (model, k) in cases {
            k.validate(model.as_ref(), 3, &limits).unwrap();
        }
    }

    #[test]
    fn heisenberg_word_length_by_search() {
        let heis: GroupModel = Arc::new(HeisenbergGroup::new());
        let k = LengthKernel::word_length(&heis, &Limits::default()).unwrap();
        let g = heis.parse_element("0 0 1").unwrap();
        // [x, y] = x y x^-1 y^-1 has length 4
        assert_eq!(k.evaluate(&g), 4.0);
        assert!(k.tail_model().is_none());
    }

    #[test]
    fn word_length_tails() {
        let limits = Limits::default();
        let f2: GroupModel = Arc::new(FreeGroup::new(2).unwrap());
        let t = LengthKernel::word_length(&f2, &limits).unwrap();
        let tail = t.tail_model().unwrap();
        assert!(tail.exact && tail.integral);
        assert_eq!(tail.upper.as_ref().unwrap().at(3), 4.0 * 9.0);

        let c: GroupModel = Arc::new(CyclicGroup::new(7).unwrap());
        let t = LengthKernel::word_length(&c, &limits).unwrap();
        assert_eq!(
            t.tail_model().unwrap().upper,
            Some(TailBound::Vanishing { beyond: 3.0, total: 7 })
        );
    }

    #[test]
    fn pullback_on_plane_registers_quotient_bound() {
        let limits = Limits::default();
        let inner = LengthKernel::word_length(&z(1), &limits).unwrap();
        let k = LengthKernel::pullback(&z(2), Homomorphism::Projection(1), inner).unwrap();
        let g = z(2).parse_element("5 -3").unwrap();
        assert_eq!(k.evaluate(&g), 3.0);
        assert!(k.coercivity().is_zero());
        assert_eq!(k.relative_coercivity("axis(0)").eval(4), 4.0);
        assert!(k.relative_coercivity("axis(1)").is_zero());
        assert!(k.relative_tail("axis(0)").is_some());
        k.validate(z(2).as_ref(), 3, &limits).unwrap();
    }

    #[test]
    fn exponent_sum_pullback() {
        let f2: GroupModel = Arc::new(FreeGroup::new(2).unwrap());
        let inner = LengthKernel::word_length(&z(1), &Limits::default()).unwrap();
        let k = LengthKernel::pullback(&f2, Homomorphism::ExponentSum(1), inner).unwrap();
        assert_eq!(k.evaluate(&f2.parse_element("abAbb").unwrap()), 3.0);
        assert_eq!(k.evaluate(&f2.parse_element("aaaa").unwrap()), 0.0);
        assert!(LengthKernel::pullback(&f2, Homomorphism::Projection(0), LengthKernel::zero()).is_err());
    }

    #[test]
    fn combinators() {
        let m = z(1);
        let a = LengthKernel::l1(&m).unwrap();
        let b = LengthKernel::power(&m, 2.0).unwrap();
        let s = LengthKernel::sum(&a, &b);
        let g = m.parse_element("3").unwrap();
        assert_eq!(s.evaluate(&g), 12.0);
        assert_eq!(s.coercivity().eval(3), 12.0);
        let c = LengthKernel::scale(0.5, &s).unwrap();
        assert_eq!(c.evaluate(&g), 6.0);
        assert!(LengthKernel::scale(-1.0, &s).is_err());
        let zero = LengthKernel::scale(0.0, &s).unwrap();
        assert_eq!(zero.evaluate(&g), 0.0);
    }

    #[test]
    fn validation_catches_bad_kernels() {
        let m = z(1);
        let limits = Limits::default();
        let asym = LengthKernel::from_fn("asym", Coercivity::zero(), |g| {
            IntegerLattice::decode(g)[0].max(0) as f64
        });
        assert!(asym.validate(m.as_ref(), 2, &limits).is_err());
        let overclaimed = LengthKernel::from_fn("over", Coercivity::linear(2.0).unwrap(), |g| {
            IntegerLattice::decode(g)[0].unsigned_abs() as f64
        });
        assert!(overclaimed.validate(m.as_ref(), 2, &limits).is_err());
        let mut values = HashMap::new();
        values.insert(m.identity(), 0.0);
        let table = LengthKernel::table("t", values);
        assert!(table.validate(m.as_ref(), 1, &limits).is_err());
    }
}
