use rayon::prelude::*;
use serde::Serialize;

use super::{LengthKernel, ValueCache};
use crate::error::{Error, Result};
use crate::group::{ball_enumerate, Ball, Group, GroupElement, Limits};
use crate::linalg::{trace_residual, SymmetricMatrix};

/// Sampled values of `t` for the Schoenberg test. A failure at any sampled
/// `t` is conclusive; a pass is evidence on the grid only.
pub const DEFAULT_T_GRID: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 2.0, 10.0];
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const PASS_ON_GRID: &str = "pass on grid";
const FAIL_ON_BALL: &str = "fail: explicit counterexample on the ball";

#[derive(Debug, Clone, Serialize)]
pub struct PsdEntry {
    /// `None` for a direct positive-definiteness test of a fixed function.
    pub t: Option<f64>,
    pub radius: u64,
    pub dim: usize,
    pub min_eigenvalue: f64,
    pub trace_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsdReport {
    pub tolerance: f64,
    pub entries: Vec<PsdEntry>,
    pub pass: bool,
    pub evidence: String,
}

impl PsdReport {
    fn from_entries(tolerance: f64, entries: Vec<PsdEntry>) -> Self {
        let pass = entries.iter().all(|e| e.pass);
        PsdReport {
            tolerance,
            entries,
            pass,
            evidence: if pass { PASS_ON_GRID } else { FAIL_ON_BALL }.to_string(),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CndReport {
    pub radius: u64,
    pub dim: usize,
    pub tolerance: f64,
    /// Largest eigenvalue on the mean-zero subspace; `None` when that
    /// subspace is trivial (a single element).
    pub max_restricted_eigenvalue: Option<f64>,
    pub trace_residual: f64,
    pub pass: bool,
    pub evidence: String,
}

fn check_inputs(radius_ok: bool, tol: f64) -> Result<()> {
    if !radius_ok {
        return Err(Error::InvalidArgument("radius must be at least 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn enumerate(model: &dyn Group, radius: u64, limits: &Limits) -> Result<Ball> {
    let ball = ball_enumerate(model, radius, limits)?;
    limits.check_matrix(ball.len())?;
    Ok(ball)
}

/// `[f(g_i⁻¹ g_j)]` over the ball. Only the upper triangle is evaluated, so
/// the matrix is exactly symmetric.
fn gram(
    model: &dyn Group,
    ball: &Ball,
    f: impl Fn(&GroupElement) -> Result<f64> + Sync,
) -> Result<SymmetricMatrix> {
    let n = ball.len();
    let inverses: Vec<GroupElement> = ball.elements.iter().map(|g| model.invert(g)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| f(&model.multiply(&inverses[i], &ball.elements[j])))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(SymmetricMatrix::from_upper(n, |i, j| rows[i][j - i]))
}

fn psd_entry(matrix: &SymmetricMatrix, t: Option<f64>, radius: u64, tol: f64) -> Result<PsdEntry> {
    let ev = matrix.eigenvalues()?;
    let min_eigenvalue = ev.first().copied().unwrap_or(0.0);
    Ok(PsdEntry {
        t,
        radius,
        dim: matrix.dim(),
        min_eigenvalue,
        trace_residual: trace_residual(matrix, &ev),
        pass: min_eigenvalue >= -tol,
    })
}

/// Minimum eigenvalue of `[exp(−t·ℓ(g_i⁻¹ g_j))]` over the ball, for each `t`.
pub fn schoenberg_check(
    model: &dyn Group,
    kernel: &LengthKernel,
    radius: u64,
    ts: &[f64],
    tol: f64,
    limits: &Limits,
) -> Result<PsdReport> {
    check_inputs(radius >= 1, tol)?;
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument("t-grid must be nonempty and positive".into()));
    }
    let ball = enumerate(model, radius, limits)?;
    let cache = ValueCache::for_kernel(kernel);
    let lengths = gram(model, &ball, |g| cache.get(model, g))?;
    let entries = ts
        .par_iter()
        .map(|&t| psd_entry(&lengths.map(|v| (-t * v).exp()), Some(t), radius, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(PsdReport::from_entries(tol, entries))
}

/// Minimum eigenvalue of `[φ(g_i⁻¹ g_j)]` over the ball.
pub fn positive_definite_check(
    model: &dyn Group,
    phi: &(dyn Fn(&GroupElement) -> f64 + Sync),
    radius: u64,
    tol: f64,
    limits: &Limits,
) -> Result<PsdReport> {
    check_inputs(radius >= 1, tol)?;
    let ball = enumerate(model, radius, limits)?;
    let cache = ValueCache::new("phi", phi, false);
    let matrix = gram(model, &ball, |g| cache.get(model, g))?;
    let entry = psd_entry(&matrix, None, radius, tol)?;
    Ok(PsdReport::from_entries(tol, vec![entry]))
}

/// Largest eigenvalue of `P·[ℓ(g_i⁻¹ g_j)]·P` on the mean-zero subspace.
pub fn direct_cnd_check(
    model: &dyn Group,
    kernel: &LengthKernel,
    radius: u64,
    tol: f64,
    limits: &Limits,
) -> Result<CndReport> {
    check_inputs(true, tol)?;
    let ball = enumerate(model, radius, limits)?;
    let cache = ValueCache::for_kernel(kernel);
    let centered = gram(model, &ball, |g| cache.get(model, g))?.center();
    let mut ev = centered.eigenvalues()?;
    let residual = trace_residual(&centered, &ev);
    // the constant vector spans the kernel of P; drop its zero eigenvalue
    if let Some(k) = (0..ev.len()).min_by(|&a, &b| ev[a].abs().total_cmp(&ev[b].abs())) {
        ev.remove(k);
    }
    let max_restricted_eigenvalue = ev.last().copied();
    let pass = max_restricted_eigenvalue.is_none_or(|m| m <= tol);
    Ok(CndReport {
        radius,
        dim: ball.len(),
        tolerance: tol,
        max_restricted_eigenvalue,
        trace_residual: residual,
        pass,
        evidence: if pass { PASS_ON_GRID } else { FAIL_ON_BALL }.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FreeGroup, GroupModel, IntegerLattice};
    use std::sync::Arc;

    fn z(d: usize) -> GroupModel {
        Arc::new(IntegerLattice::new(d))
    }

    #[test]
    fn integers_abs_is_positive_at_t_one() {
        let m = z(1);
        let k = LengthKernel::l1(&m).unwrap();
        let r = schoenberg_check(m.as_ref(), &k, 5, &[1.0], DEFAULT_TOLERANCE, &Limits::default())
            .unwrap();
        assert!(r.pass);
        assert_eq!(r.entries[0].dim, 11);
        assert!(r.entries[0].min_eigenvalue > 0.0);
    }

    #[test]
    fn cubic_power_fails() {
        let m = z(1);
        let k = LengthKernel::power(&m, 3.0).unwrap();
        let r = schoenberg_check(m.as_ref(), &k, 6, &DEFAULT_T_GRID, DEFAULT_TOLERANCE, &Limits::default())
            .unwrap();
        assert!(!r.pass);
        assert!(r.min_eigenvalue() < -1e-6);
        let d = direct_cnd_check(m.as_ref(), &k, 6, DEFAULT_TOLERANCE, &Limits::default()).unwrap();
        assert!(!d.pass);
    }

    #[test]
    fn direct_checks_on_fixtures() {
        let limits = Limits::default();
        let m = z(1);
        let k = LengthKernel::l1(&m).unwrap();
        assert!(direct_cnd_check(m.as_ref(), &k, 4, DEFAULT_TOLERANCE, &limits).unwrap().pass);

        let m2 = z(2);
        let k2 = LengthKernel::l2_squared(&m2).unwrap();
        assert!(direct_cnd_check(m2.as_ref(), &k2, 3, DEFAULT_TOLERANCE, &limits).unwrap().pass);

        let trivial = direct_cnd_check(m2.as_ref(), &k2, 0, DEFAULT_TOLERANCE, &limits).unwrap();
        assert!(trivial.pass);
        assert_eq!(trivial.max_restricted_eigenvalue, None);
    }

    #[test]
    fn positive_definite_examples() {
        let limits = Limits::default();
        let m = z(1);
        let omega = |g: &GroupElement| 1.0 / (1.0 + IntegerLattice::decode(g)[0].abs() as f64);
        assert!(positive_definite_check(m.as_ref(), &omega, 4, DEFAULT_TOLERANCE, &limits).unwrap().pass);

        let f2: GroupModel = Arc::new(FreeGroup::new(2).unwrap());
        let ones = |_: &GroupElement| 1.0;
        let r = positive_definite_check(f2.as_ref(), &ones, 3, DEFAULT_TOLERANCE, &limits).unwrap();
        assert!(r.pass);
        assert!(r.entries[0].min_eigenvalue.abs() < DEFAULT_TOLERANCE);

        let id = m.identity();
        let spike = move |g: &GroupElement| if *g == id { 1.0 } else { -1.0 };
        let r = positive_definite_check(m.as_ref(), &spike, 2, DEFAULT_TOLERANCE, &limits).unwrap();
        assert!(!r.pass);
        assert!((r.entries[0].min_eigenvalue + 3.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_parameters() {
        let m = z(1);
        let k = LengthKernel::l1(&m).unwrap();
        let limits = Limits::default();
        assert!(schoenberg_check(m.as_ref(), &k, 0, &[1.0], 1e-9, &limits).is_err());
        assert!(schoenberg_check(m.as_ref(), &k, 2, &[], 1e-9, &limits).is_err());
        assert!(schoenberg_check(m.as_ref(), &k, 2, &[1.0], 0.0, &limits).is_err());
        let small = Limits { max_elements: 1000, max_matrix: 5 };
        assert!(matches!(
            schoenberg_check(m.as_ref(), &k, 3, &[1.0], 1e-9, &small),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
