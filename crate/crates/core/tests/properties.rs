use std::collections::HashSet;
use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;

use spectral_growth::group::{ball_enumerate, FreeGroup, GroupModel, IntegerLattice, Limits};
use spectral_growth::kernels::{positive_definite_check, LengthKernel, DEFAULT_TOLERANCE};
use spectral_growth::linalg::SymmetricMatrix;
use spectral_growth::reconstruct::{epsilon_schedule, reconstruct};
use spectral_growth::relative::CosetStructure;
use spectral_growth::spectral::{sandwich_bounds, GrowthProfile};

fn z(d: usize) -> GroupModel {
    Arc::new(IntegerLattice::new(d))
}

fn f2() -> GroupModel {
    Arc::new(FreeGroup::new(2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_agree_with_nalgebra(n in 1usize..24, seed in prop::collection::vec(-10.0f64..10.0, 24 * 24)) {
        let m = SymmetricMatrix::from_upper(n, |i, j| seed[i * 24 + j]);
        let ours = m.eigenvalues().unwrap();
        let dense = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
        let mut theirs: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        let scale = m.frobenius_norm().max(1.0);
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
        prop_assert!((ours.iter().sum::<f64>() - m.trace()).abs() <= 1e-8 * scale);
    }

    #[test]
    fn sandwich_contains_the_exact_sum(
        values in prop::collection::vec(0.0f64..12.0, 1..200),
        t in 0.01f64..5.0,
    ) {
        let n = 12usize;
        let mut gamma = vec![0u64; n + 1];
        gamma[0] = 1;
        for &v in &values {
            gamma[(v.ceil() as usize).max(1)] += 1;
        }
        let exact = 1.0 + values.iter().map(|v| (-t * v).exp()).sum::<f64>();
        let (lo, hi) = sandwich_bounds(&gamma, t);
        prop_assert!(lo <= exact * (1.0 + 1e-12) && exact <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn profile_counts_are_cumulative(gamma in prop::collection::vec(0u64..1000, 1..30)) {
        let p = GrowthProfile::from_gamma(gamma.clone(), true).unwrap();
        let mut acc = 0;
        for (n, g) in gamma.iter().enumerate() {
            acc += g;
            prop_assert_eq!(p.beta[n], acc);
        }
    }

    #[test]
    fn coset_representative_ignores_right_subgroup_factor(
        word in prop::collection::vec(0usize..4, 0..12),
        k in -6i64..6,
        x in -20i64..20, y in -20i64..20, h in -20i64..20,
    ) {
        let f = f2();
        let letters = ["a", "A", "b", "B"];
        let text: String = word.iter().map(|&i| letters[i]).collect();
        let s = f.parse_element(if text.is_empty() { "e" } else { &text }).unwrap();
        let power = if k == 0 { "e".to_string() } else { (if k > 0 { "a" } else { "A" }).repeat(k.unsigned_abs() as usize) };
        let hk = f.parse_element(&power).unwrap();
        let c = CosetStructure::cyclic_free(&f, 0).unwrap();
        prop_assert_eq!(c.coset_rep(&f.multiply(&s, &hk)), c.coset_rep(&s));

        let z2 = z(2);
        let axis = CosetStructure::axis(&z2, 0).unwrap();
        let s = IntegerLattice::encode(&[x, y]);
        let hh = IntegerLattice::encode(&[h, 0]);
        prop_assert_eq!(axis.coset_rep(&z2.multiply(&s, &hh)), axis.coset_rep(&s));
    }

    #[test]
    fn reconstruction_nondecreasing_in_depth(n in -500i64..500) {
        let line = z(1);
        let k = LengthKernel::l1(&line).unwrap();
        let s = epsilon_schedule(line.as_ref(), &k, 24, 8, &Limits::default()).unwrap();
        let rec = reconstruct(&k, s, 24).unwrap();
        let g = IntegerLattice::encode(&[n]);
        let partial: Vec<f64> = (0..=24).map(|d| rec.evaluate_partial(&g, d)).collect();
        prop_assert!(partial.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(rec.evaluate(&g), rec.evaluate(&IntegerLattice::encode(&[-n])));
    }
}

#[test]
fn free_group_spheres_match_closed_form() {
    let ball = ball_enumerate(f2().as_ref(), 10, &Limits::default()).unwrap();
    for (n, &size) in ball.sphere_sizes.iter().enumerate() {
        let expected = if n == 0 { 1 } else { 4 * 3u64.pow(n as u32 - 1) };
        assert_eq!(size, expected, "sphere {n}");
    }
}

#[test]
fn lattice_balls_match_brute_force() {
    for d in 1..=3usize {
        let top = if d == 3 { 12 } else { 20 };
        let ball = ball_enumerate(z(d).as_ref(), top, &Limits::default()).unwrap();
        for n in 0..=top as i64 {
            let range: Vec<i64> = (-n..=n).collect();
            let mut points: Vec<Vec<i64>> = vec![vec![]];
            for _ in 0..d {
                points = points
                    .into_iter()
                    .flat_map(|p| range.iter().map(move |&x| [p.clone(), vec![x]].concat()))
                    .collect();
            }
            let brute = points.iter().filter(|p| p.iter().map(|x| x.abs()).sum::<i64>() <= n).count();
            let counted: u64 = ball.sphere_sizes[..=n as usize].iter().sum();
            assert_eq!(counted as usize, brute, "d = {d}, n = {n}");
        }
        let distinct: HashSet<_> = ball.elements.iter().collect();
        assert_eq!(distinct.len(), ball.len());
    }
}

/// Positivity on a ball implies positivity on every smaller ball, since the
/// Gram matrix of the smaller ball is a principal submatrix.
#[test]
fn positivity_is_monotone_in_radius() {
    let f = f2();
    let lim = Limits::default();
    for t in [0.1, 1.0] {
        let wl = LengthKernel::word_length(&f, &lim).unwrap();
        let phi = move |g: &_| (-t * wl.evaluate(g)).exp();
        let mins: Vec<f64> = (1..=3)
            .map(|r| positive_definite_check(f.as_ref(), &phi, r, DEFAULT_TOLERANCE, &lim).unwrap().min_eigenvalue())
            .collect();
        assert!(mins.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{mins:?}");
    }
}
