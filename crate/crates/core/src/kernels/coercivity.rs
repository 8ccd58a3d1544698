use serde::Serialize;

use crate::error::{Error, Result};

/// A monotone lower bound `f(r) = Σ c_i · r^{p_i}` (all `c_i ≥ 0`, `p_i > 0`)
/// with `ℓ(g) ≥ f(|g|)`.
///
/// The empty sum is the zero bound, used when nothing is known.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Coercivity {
    terms: Vec<(f64, f64)>,
}

impl Coercivity {
    pub fn zero() -> Self {
        Coercivity::default()
    }

    pub fn linear(slope: f64) -> Result<Self> {
        Self::power(slope, 1.0)
    }

    pub fn power(coefficient: f64, exponent: f64) -> Result<Self> {
        if !(coefficient >= 0.0 && coefficient.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coercivity coefficient must be finite and nonnegative, got {coefficient}"
            )));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coercivity exponent must be positive, got {exponent}"
            )));
        }
        let terms = if coefficient == 0.0 {
            Vec::new()
        } else {
            vec![(coefficient, exponent)]
        };
        Ok(Coercivity { terms })
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, radius: u64) -> f64 {
        let r = radius as f64;
        self.terms.iter().map(|&(c, p)| c * r.powf(p)).sum()
    }

    pub fn plus(&self, other: &Coercivity) -> Coercivity {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Coercivity { terms }
    }

    pub fn scaled(&self, factor: f64) -> Coercivity {
        if factor <= 0.0 {
            return Coercivity::zero();
        }
        Coercivity {
            terms: self.terms.iter().map(|&(c, p)| (c * factor, p)).collect(),
        }
    }

    /// Smallest radius `r` with `f(r) > lambda`, or `None` for the zero bound.
    pub fn radius_exceeding(&self, lambda: f64) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        if self.eval(0) > lambda {
            return Some(0);
        }
        let mut hi = 1u64;
        while self.eval(hi) <= lambda {
            if hi >= 1 << 62 {
                return None;
            }
            hi *= 2;
        }
        let mut lo = hi / 2;
        // invariant: f(lo) <= lambda < f(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.eval(mid) > lambda {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_exceeding_linear_and_quadratic() {
        let lin = Coercivity::linear(1.0).unwrap();
        assert_eq!(lin.radius_exceeding(2.0), Some(3));
        assert_eq!(lin.radius_exceeding(2.5), Some(3));
        assert_eq!(lin.radius_exceeding(-1.0), Some(0));
        let quad = Coercivity::power(0.5, 2.0).unwrap();
        // r^2 / 2 > 100 first at r = 15
        assert_eq!(quad.radius_exceeding(100.0), Some(15));
        assert_eq!(Coercivity::zero().radius_exceeding(1.0), None);
    }

    #[test]
    fn algebra() {
        let a = Coercivity::linear(1.0).unwrap();
        let b = Coercivity::power(2.0, 2.0).unwrap();
        assert_eq!(a.plus(&b).eval(3), 3.0 + 18.0);
        assert_eq!(b.scaled(0.5).eval(2), 4.0);
        assert!(a.scaled(0.0).is_zero());
        assert!(Coercivity::power(1.0, 0.0).is_err());
        assert!(Coercivity::power(-1.0, 1.0).is_err());
    }
}
