use proptest::prelude::*;
use stiefel_core::linalg::{qr_decompose, solve_linear};
use stiefel_core::optim::{lr_schedule, CayleySgd, CayleySgdConfig};
use stiefel_core::problems::{
    default_spectrum, fd_check, from_internal, make_procrustes, make_subspace, project_unchecked, to_internal,
    Objective,
};
use stiefel_core::rng::gaussian_matrix;
use stiefel_core::stiefel::{
    adaptive_alpha, build_skew, cayley_closed, cayley_iterates, orthonormality_error, random_point, random_skew,
    tangency_residual, tangent_project,
};
use stiefel_core::{Complex64, Matrix, Rng, Scalar};

/// `(seed, n, p)` with `1 ≤ p ≤ n ≤ max_n`.
fn dims(max_n: usize) -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 1..=max_n).prop_flat_map(|(seed, n)| (Just(seed), Just(n), 1..=n))
}

fn check_projection<T: Scalar>(seed: u64, n: usize, p: usize) -> Result<(), TestCaseError> {
    let mut rng = Rng::new(seed);
    let x = random_point::<T>(&mut rng, n, p).unwrap();
    let z = gaussian_matrix::<T>(&mut rng, n, p);
    let once = tangent_project(&x, &z).unwrap().into_matrix();
    let twice = tangent_project(&x, &once).unwrap().into_matrix();
    let scale = z.frobenius_norm().max(1.0);
    prop_assert!(twice.sub(&once).unwrap().frobenius_norm() <= 1e-12 * scale);
    prop_assert!(tangency_residual(x.matrix(), &once).unwrap() <= 1e-12 * scale);
    let direct = project_unchecked(x.matrix(), &z).unwrap();
    prop_assert!(direct.sub(&once).unwrap().frobenius_norm() <= 1e-12 * scale);
    Ok(())
}

fn check_closed_orthonormal<T: Scalar>(seed: u64, n: usize, p: usize) -> Result<(), TestCaseError> {
    let mut rng = Rng::new(seed);
    let x = random_point::<T>(&mut rng, n, p).unwrap().retolerate(1e-10).unwrap();
    let z = gaussian_matrix::<T>(&mut rng, n, p);
    let w = build_skew(&x, &z).unwrap();
    for alpha in [0.01, 0.1, 1.0, 10.0] {
        let y = cayley_closed(&x, &w, alpha).unwrap();
        prop_assert!(y.orthonormality_error() <= 1e-11, "alpha {} error {:e}", alpha, y.orthonormality_error());
    }
    Ok(())
}

fn check_contraction<T: Scalar>(seed: u64, n: usize, p: usize, lr: f64) -> Result<(), TestCaseError> {
    let mut rng = Rng::new(seed);
    let x = random_point::<T>(&mut rng, n, p).unwrap().retolerate(1e-10).unwrap();
    let w = random_skew::<T>(&mut rng, n).scale(4.0 * rng.uniform());
    let alpha = adaptive_alpha(lr, &w, 0.5, 1e-8);
    prop_assert!(alpha <= lr);
    prop_assert!(0.5 * alpha * w.frobenius_norm() <= 0.5 + 1e-12);
    let target = cayley_closed(&x, &w, alpha).unwrap();
    let errs: Vec<f64> = cayley_iterates(&x, &w, alpha, 6, x.matrix())
        .unwrap()
        .iter()
        .map(|y| y.sub(target.matrix()).unwrap().frobenius_norm())
        .collect();
    let bound = 0.5 * alpha * w.frobenius_norm();
    for pair in errs.windows(2) {
        prop_assert!(pair[1] <= bound * pair[0] + 1e-13, "{:?} bound {}", errs, bound);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent_and_tangent((seed, n, p) in dims(10)) {
        check_projection::<f64>(seed, n, p)?;
        check_projection::<Complex64>(seed, n, p)?;
    }

    #[test]
    fn closed_form_stays_on_the_manifold((seed, n, p) in dims(10)) {
        check_closed_orthonormal::<f64>(seed, n, p)?;
        check_closed_orthonormal::<Complex64>(seed, n, p)?;
    }

    #[test]
    fn fixed_point_iteration_contracts((seed, n, p) in dims(10), lr in 1e-3f64..10.0) {
        check_contraction::<f64>(seed, n, p, lr)?;
        check_contraction::<Complex64>(seed, n, p, lr)?;
    }

    #[test]
    fn unitary_cayley_is_unitary(seed in any::<u64>(), n in 1usize..12, alpha in -5.0f64..5.0) {
        let mut rng = Rng::new(seed);
        let x = random_point::<Complex64>(&mut rng, n, n).unwrap().retolerate(1e-10).unwrap();
        let w = random_skew::<Complex64>(&mut rng, n);
        let y = cayley_closed(&x, &w, alpha).unwrap();
        prop_assert!(y.orthonormality_error() <= 1e-12);
    }

    #[test]
    fn halving_alpha_gains_fourth_order(seed in any::<u64>(), n in 4usize..12) {
        let mut rng = Rng::new(seed);
        let x = random_point::<f64>(&mut rng, n, 2).unwrap();
        let w = random_skew::<f64>(&mut rng, n);
        let wx = w.apply(x.matrix()).unwrap();
        let err = |alpha: f64| {
            let y0 = x.matrix().add_scaled(alpha, &wx).unwrap();
            let y2 = stiefel_core::stiefel::cayley_iterative(&x, &w, alpha, 2, &y0).unwrap();
            y2.sub(cayley_closed(&x, &w, alpha).unwrap().matrix()).unwrap().frobenius_norm()
        };
        let (e1, e2, e3) = (err(0.2), err(0.1), err(0.05));
        prop_assert!(e1 / e2 >= 2f64.powf(3.5) && e2 / e3 >= 2f64.powf(3.5), "{} {} {}", e1, e2, e3);
    }

    #[test]
    fn sgd_momentum_is_tangent_at_the_previous_point((seed, n, p) in dims(8), beta in 0.0f64..0.99) {
        let mut rng = Rng::new(seed);
        // Unit-scale random gradients saturate the guard and drift ~1e-3 per step;
        // W X is tangent at X whatever the drift.
        let mut x = random_point::<Complex64>(&mut rng, n, p).unwrap().retolerate(0.1).unwrap();
        let mut opt = CayleySgd::new(CayleySgdConfig::new(0.05, beta), n, p).unwrap();
        for _ in 0..3 {
            let g = gaussian_matrix::<Complex64>(&mut rng, n, p);
            let next = opt.step(&x, &g).unwrap();
            prop_assert!(tangency_residual(x.matrix(), opt.momentum()).unwrap() <= 1e-10 * opt.momentum().frobenius_norm().max(1.0));
            x = next.point;
        }
    }

    #[test]
    fn adapter_round_trip_is_exact((seed, n, p) in dims(9)) {
        let mut rng = Rng::new(seed);
        let k = from_internal(&random_point::<Complex64>(&mut rng, n, p).unwrap());
        prop_assert_eq!(k.shape(), (p, n));
        let back = from_internal(&to_internal(&k, 1e-10).unwrap());
        prop_assert_eq!(back, k);
    }

    #[test]
    fn subspace_loss_lies_within_rayleigh_bounds((seed, n, p) in dims(12)) {
        let mut rng = Rng::new(seed);
        let problem = make_subspace::<Complex64>(&mut rng, n, p, &default_spectrum(n, p)).unwrap();
        let (lo, hi) = problem.rayleigh_bounds();
        let x = random_point::<Complex64>(&mut rng, n, p).unwrap();
        let f = problem.loss(x.matrix()).unwrap();
        prop_assert!(lo - 1e-10 <= f && f <= hi + 1e-10, "{} not in [{}, {}]", f, lo, hi);
        prop_assert_eq!(problem.optimum(), Some(lo));
    }

    #[test]
    fn qr_factors_reconstruct((seed, n, p) in dims(10)) {
        let mut rng = Rng::new(seed);
        let a = gaussian_matrix::<Complex64>(&mut rng, n, p);
        let (q, r) = qr_decompose(&a).unwrap();
        prop_assert!(orthonormality_error(&q) <= 1e-12);
        for i in 0..r.rows() {
            for j in 0..i.min(r.cols()) {
                prop_assert_eq!(r[(i, j)], Complex64::new(0.0, 0.0));
            }
        }
        prop_assert!(q.matmul(&r).unwrap().sub(&a).unwrap().frobenius_norm() <= 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn lu_solve_has_small_residual(seed in any::<u64>(), n in 1usize..16, k in 1usize..5) {
        let mut rng = Rng::new(seed);
        let a = gaussian_matrix::<f64>(&mut rng, n, n).add(&Matrix::identity(n).scale(n as f64)).unwrap();
        let b = gaussian_matrix::<f64>(&mut rng, n, k);
        let x = solve_linear(&a, &b).unwrap();
        prop_assert!(a.matmul(&x).unwrap().sub(&b).unwrap().frobenius_norm() <= 1e-12 * b.frobenius_norm().max(1.0) * n as f64);
    }

    #[test]
    fn matmul_is_associative(seed in any::<u64>(), m in 1usize..8, k in 1usize..8, l in 1usize..8, n in 1usize..8) {
        let mut rng = Rng::new(seed);
        let a = gaussian_matrix::<Complex64>(&mut rng, m, k);
        let b = gaussian_matrix::<Complex64>(&mut rng, k, l);
        let c = gaussian_matrix::<Complex64>(&mut rng, l, n);
        let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
        prop_assert!(left.sub(&right).unwrap().frobenius_norm() <= 1e-12 * left.frobenius_norm().max(1.0));
        let adj = a.adjoint_mul(&a).unwrap();
        prop_assert_eq!(adj, a.conj_transpose().matmul(&a).unwrap());
    }

    #[test]
    fn schedule_never_increases(base in 1e-4f64..1.0, factor in 0.0f64..=1.0, steps in proptest::collection::vec(0u64..500, 0..5)) {
        let mut milestones = steps;
        milestones.sort_unstable();
        let mut last = f64::INFINITY;
        for step in 0..600 {
            let lr = lr_schedule(step, base, &milestones, factor);
            prop_assert!(lr <= last && lr <= base);
            last = lr;
        }
        if milestones.first().is_none_or(|&m| m > 0) {
            prop_assert_eq!(lr_schedule(0, base, &milestones, factor), base);
        }
    }

    #[test]
    fn gradients_match_finite_differences(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let subspace = make_subspace::<Complex64>(&mut rng, 12, 3, &default_spectrum(12, 3)).unwrap();
        let x = random_point(&mut rng, 12, 3).unwrap();
        let r = fd_check(&subspace, &x, &mut rng, 3).unwrap();
        prop_assert!(r.passes(1e-4), "{:?}", r);
        let procrustes = make_procrustes::<f64>(&mut rng, 7).unwrap();
        let x = random_point(&mut rng, 7, 7).unwrap();
        let r = fd_check(&procrustes, &x, &mut rng, 3).unwrap();
        prop_assert!(r.passes(1e-4), "{:?}", r);
    }
}

fn planted_gradient<T: Scalar, P: Objective<T>>(problem: &P) -> f64 {
    let x = problem.planted().expect("planted").clone().retolerate(1e-10).unwrap();
    problem.riemannian_grad(&x).unwrap().frobenius_norm()
}

#[test]
fn planted_points_are_stationary() {
    for seed in 0..20 {
        let mut rng = Rng::new(seed);
        let g = [
            planted_gradient(&make_subspace::<f64>(&mut rng, 50, 5, &default_spectrum(50, 5)).unwrap()),
            planted_gradient(&make_subspace::<Complex64>(&mut rng, 30, 4, &default_spectrum(30, 4)).unwrap()),
            planted_gradient(&make_procrustes::<f64>(&mut rng, 16).unwrap()),
            planted_gradient(&make_procrustes::<Complex64>(&mut rng, 10).unwrap()),
        ];
        assert!(g.iter().all(|&v| v <= 1e-8), "seed {seed}: {g:?}");
    }
}

#[test]
fn fd_check_at_twenty_points_per_problem() {
    let mut rng = Rng::new(77);
    let subspace = make_subspace::<f64>(&mut rng, 50, 5, &default_spectrum(50, 5)).unwrap();
    let procrustes = make_procrustes::<Complex64>(&mut rng, 16).unwrap();
    for _ in 0..20 {
        let x = random_point(&mut rng, 50, 5).unwrap();
        assert!(fd_check(&subspace, &x, &mut rng, 4).unwrap().passes(1e-4));
        let x = random_point(&mut rng, 16, 16).unwrap();
        assert!(fd_check(&procrustes, &x, &mut rng, 4).unwrap().passes(1e-4));
    }
}
