use elasto_core::kaczmarz::{kaczmarz_solve, Equation, KaczmarzProblem, KaczmarzSettings};
use elasto_oracle::linalg::pseudoinverse_solve;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
}

fn consistent(rows: usize, cols: usize, seed: u64) -> (DMatrix<f64>, DVector<f64>) {
    let a = gaussian(rows, cols, seed);
    let x = gaussian(cols, 1, seed + 1).column(0).into_owned();
    let p = &a * x;
    (a, p)
}

#[test]
fn converges_to_pseudoinverse_solution() {
    for (seed, loops) in [(1, 200), (2, 50)] {
        let (a, p) = consistent(20, 60, seed);
        let expected = pseudoinverse_solve(&a, &p);
        let problem = KaczmarzProblem::new(vec![Equation::new(a, p, 1.0)], KaczmarzSettings::new(1e-12, loops));
        let q = kaczmarz_solve(&problem).unwrap().q;
        assert!((q - expected).amax() <= 1e-6);
    }
}

#[test]
fn multi_block_underdetermined_pseudoinverse() {
    let (a, p) = consistent(24, 60, 9);
    let expected = pseudoinverse_solve(&a, &p);
    let eqs =
        (0..3).map(|k| Equation::new(a.rows(8 * k, 8).into_owned(), p.rows(8 * k, 8).into_owned(), k as f64)).collect();
    let q = kaczmarz_solve(&KaczmarzProblem::new(eqs, KaczmarzSettings::new(1e-12, 400))).unwrap().q;
    assert!((q - expected).amax() <= 1e-6);
}

#[test]
fn exact_solution_is_fixed() {
    let x = gaussian(40, 1, 3).column(0).into_owned();
    let eqs: Vec<Equation> = (0..4)
        .map(|k| {
            let a = gaussian(10, 40, 10 + k);
            let p = &a * &x;
            Equation::new(a, p, k as f64)
        })
        .collect();
    for gamma in [1e-12, 1e-3, 10.0] {
        let problem = KaczmarzProblem::new(eqs.clone(), KaczmarzSettings::new(gamma, 1)).with_initial(x.clone());
        let q = kaczmarz_solve(&problem).unwrap().q;
        assert!((q - &x).amax() <= 1e-12);
    }
}

fn scaled_run(c: f64, seed: u64) -> Vec<DVector<f64>> {
    (1..=3)
        .map(|loops| {
            let eqs = (0..3)
                .map(|k| {
                    let a = gaussian(7, 15, seed + k);
                    let p = gaussian(7, 1, seed + 100 + k).column(0).into_owned();
                    Equation::new(a * c, p * c, k as f64)
                })
                .collect();
            kaczmarz_solve(&KaczmarzProblem::new(eqs, KaczmarzSettings::new(0.3 * c * c, loops))).unwrap().q
        })
        .collect()
}

#[test]
fn scale_covariance() {
    let base = scaled_run(1.0, 40);
    for c in [1e-3, 0.5, 7.0, 1e3] {
        for (a, b) in base.iter().zip(scaled_run(c, 40)) {
            assert!((a - b).amax() <= 1e-12 * a.amax().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn history_length_is_loops_times_blocks(blocks in 1usize..5, loops in 1usize..6, seed in 0u64..1000) {
        let eqs = (0..blocks).map(|k| Equation::new(gaussian(3, 5, seed + k as u64), DVector::from_element(3, 1.0), k as f64)).collect();
        let result = kaczmarz_solve(&KaczmarzProblem::new(eqs, KaczmarzSettings::new(1e-2, loops))).unwrap();
        prop_assert_eq!(result.residuals.len(), blocks * loops);
        prop_assert!(result.residuals.iter().all(|r| r.residual_norm.is_finite() && r.residual_norm >= 0.0));
    }

    #[test]
    fn regularized_step_never_overshoots(seed in 0u64..1000, gamma in 1e-6f64..10.0) {
        let (a, p) = consistent(6, 12, seed);
        let problem = KaczmarzProblem::new(vec![Equation::new(a, p, 1.0)], KaczmarzSettings::new(gamma, 2));
        let r = kaczmarz_solve(&problem).unwrap().residuals;
        prop_assert!(r[1].residual_norm <= r[0].residual_norm * (1.0 + 1e-12));
    }
}
