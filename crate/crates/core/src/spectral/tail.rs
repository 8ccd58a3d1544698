use serde::Serialize;

use crate::error::{Error, Result};

/// Certified bound on the bin counts `γ_n` for `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailBound {
    /// `γ_n` compared with `scale · ratio^n`.
    Geometric { scale: f64, ratio: f64 },
    /// `γ_n` compared with `scale · n^degree`.
    Polynomial { scale: f64, degree: f64 },
    /// Finite spectrum: every eigenvalue is `≤ beyond`, `total` of them.
    Vanishing { beyond: f64, total: u64 },
}

impl TailBound {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TailBound::Geometric { scale, ratio } => scale > 0.0 && ratio > 0.0,
            TailBound::Polynomial { scale, degree } => scale > 0.0 && degree >= 0.0,
            TailBound::Vanishing { beyond, .. } => beyond >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid tail bound {self:?}")))
        }
    }

    /// Value of the bound at bin `n ≥ 1`.
    pub fn at(&self, n: u64) -> f64 {
        let x = n as f64;
        match *self {
            TailBound::Geometric { scale, ratio } => scale * ratio.powf(x),
            TailBound::Polynomial { scale, degree } => scale * x.powf(degree),
            TailBound::Vanishing { beyond, total } => {
                if x > beyond.floor() + 1.0 {
                    0.0
                } else {
                    total as f64
                }
            }
        }
    }
}

/// Tail information attached to a kernel at construction.
///
/// `upper` bounds `γ_n` from above, `lower` from below (used only to certify
/// divergence). `exact` means `γ_n` equals the upper bound for every `n ≥ 1`.
/// `integral` means every eigenvalue is an integer, so bin `n` holds only the
/// eigenvalue `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailModel {
    pub upper: Option<TailBound>,
    pub lower: Option<TailBound>,
    pub exact: bool,
    pub integral: bool,
}

impl TailModel {
    pub fn new(
        upper: Option<TailBound>,
        lower: Option<TailBound>,
        exact: bool,
        integral: bool,
    ) -> Result<Self> {
        for b in upper.iter().chain(lower.iter()) {
            b.validate()?;
        }
        if exact && upper.is_none() {
            return Err(Error::InvalidArgument("an exact tail model needs an upper bound".into()));
        }
        if matches!(lower, Some(TailBound::Vanishing { .. })) {
            return Err(Error::InvalidArgument("a vanishing bound cannot be a lower bound".into()));
        }
        Ok(TailModel {
            upper,
            lower,
            exact,
            integral,
        })
    }

    /// `γ_n = scale · ratio^n` for `n ≥ 1`, integer eigenvalues.
    pub fn exact_geometric(scale: f64, ratio: f64) -> Result<Self> {
        let b = TailBound::Geometric { scale, ratio };
        Self::new(Some(b.clone()), Some(b), true, true)
    }

    /// `γ_n = scale · n^degree` for `n ≥ 1`, integer eigenvalues.
    pub fn exact_polynomial(scale: f64, degree: f64) -> Result<Self> {
        let b = TailBound::Polynomial { scale, degree };
        Self::new(Some(b.clone()), Some(b), true, true)
    }

    pub fn upper_only(bound: TailBound, integral: bool) -> Result<Self> {
        Self::new(Some(bound), None, false, integral)
    }

    pub fn finite(beyond: f64, total: u64) -> Result<Self> {
        Self::new(Some(TailBound::Vanishing { beyond, total }), None, false, true)
    }
}
