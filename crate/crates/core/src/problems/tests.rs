use std::sync::Arc;

use nalgebra::DMatrix;

use super::*;
use crate::data::{gen_classification, gen_correlated_gaussian, CscMatrix};
use crate::solvers::{solve, Algorithm, SolverConfig};

fn dense(rows: usize, cols: usize, vals: &[f64]) -> CscMatrix<f64> {
    CscMatrix::from_dense(&DMatrix::from_row_slice(rows, cols, vals))
}

fn identity_data(y: &[f64]) -> Arc<Dataset<f64>> {
    let n = y.len();
    Arc::new(Dataset::new(CscMatrix::from_dense(&DMatrix::identity(n, n)), y.to_vec(), "id").unwrap())
}

fn regression(n: usize, p: usize, seed: u64) -> Arc<Dataset<f64>> {
    Arc::new(gen_correlated_gaussian(n, p, 0.5, 5.0, seed).unwrap())
}

fn classification(n: usize, p: usize, seed: u64) -> Arc<Dataset<f64>> {
    Arc::new(gen_classification(n, p, 0.3, seed).unwrap())
}

fn random_point(p: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..p).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn long_run(prob: &Problem<f64>) -> Vec<f64> {
    let cfg = SolverConfig::new(Algorithm::Pcd).with_max_epochs(20_000).with_tol(1e-14);
    solve(prob, &cfg).unwrap().x
}

#[test]
fn objectives_at_zero() {
    let data = regression(12, 5, 1);
    let lasso = Problem::lasso(data.clone(), 0.3).unwrap();
    let half_y2 = 0.5 * data.y.iter().map(|v| v * v).sum::<f64>();
    assert_eq!(lasso.objective(&[0.0; 5]).unwrap(), half_y2);

    let cls = classification(9, 4, 2);
    let logreg = Problem::logreg_l1(cls, 0.1).unwrap();
    let v = logreg.objective(&[0.0; 4]).unwrap();
    assert!((v - 9.0 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn elastic_net_hand_instance() {
    let a = dense(3, 2, &[1.0, 2.0, 0.0, -1.0, 3.0, 0.5]);
    let y = vec![1.0, -2.0, 0.5];
    let data = Arc::new(Dataset::new(a, y, "hand").unwrap());
    let prob = Problem::elastic_net(data, 0.2, 0.7).unwrap();
    let x = [0.4, -1.1];
    // Ax = (0.4 - 2.2, 1.1, 1.2 - 0.55) = (-1.8, 1.1, 0.65)
    let r = [1.0 + 1.8, -2.0 - 1.1, 0.5 - 0.65];
    let fit = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]) / 6.0;
    let expected = fit + 0.2 * 1.5 + 0.35 * (0.16 + 1.21);
    assert!((prob.objective(&x).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn objective_rejects_wrong_dimension() {
    let prob = Problem::lasso(regression(5, 3, 0), 1.0).unwrap();
    assert!(matches!(prob.objective(&[0.0; 4]), Err(Error::InvalidArgument(_))));
}

#[test]
fn constructor_validation() {
    let data = regression(5, 3, 0);
    assert!(Problem::lasso(data.clone(), 0.0).is_err());
    assert!(Problem::lasso(data.clone(), f64::NAN).is_err());
    assert!(Problem::elastic_net(data.clone(), 1.0, -0.1).is_err());
    assert!(Problem::logreg_l1(data.clone(), 1.0).is_err());
    let groups = Arc::new(Groups::contiguous(2, 1).unwrap());
    assert!(Problem::group_lasso(data, 1.0, groups).is_err());
}

#[test]
fn groups_validation() {
    assert!(Groups::new(vec![vec![0, 1], vec![2]], 3).is_ok());
    assert!(Groups::new(vec![vec![0, 1], vec![1, 2]], 3).is_err());
    assert!(Groups::new(vec![vec![0]], 2).is_err());
    assert!(Groups::new(vec![vec![0, 3]], 2).is_err());
    assert!(Groups::new(vec![vec![], vec![0]], 1).is_err());
    let g = Groups::contiguous(7, 3).unwrap();
    assert_eq!(g.len(), 3);
    assert_eq!(g.get(2), &[6]);
    assert!(Groups::contiguous(4, 0).is_err());
}

#[test]
fn datafit_gradient_special_points() {
    let data = regression(6, 3, 3);
    let lasso = Problem::lasso(data.clone(), 1.0).unwrap();
    assert!(lasso.datafit_gradient(&data.y).iter().all(|&g| g == 0.0));

    let cls = classification(7, 3, 4);
    let logreg = Problem::logreg_l1(cls.clone(), 1.0).unwrap();
    let g = logreg.datafit_gradient(&[0.0; 7]);
    for (gi, yi) in g.iter().zip(&cls.y) {
        assert_eq!(*gi, -yi / 2.0);
    }
}

fn check_gradient(prob: &Problem<f64>, seed: u64) {
    let p = prob.n_features();
    let x = random_point(p, seed);
    let grad = prob.gradient(&prob.predictor(&x));
    let f = |x: &[f64]| prob.datafit(x, &prob.predictor(x));
    let h = 1e-6;
    for j in 0..p {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let fd = (f(&xp) - f(&xm)) / (2.0 * h);
        let err = (fd - grad[j]).abs() / grad[j].abs().max(1.0);
        assert!(err < 1e-5, "{} coordinate {j}: fd {fd} vs {}", prob.name(), grad[j]);
    }
}

#[test]
fn gradients_match_finite_differences() {
    let data = regression(15, 6, 5);
    let cls = classification(15, 6, 6);
    check_gradient(&Problem::lasso(data.clone(), 1.0).unwrap(), 1);
    check_gradient(&Problem::elastic_net(data.clone(), 1.0, 0.5).unwrap(), 2);
    check_gradient(&Problem::logreg_l1(cls.clone(), 1.0).unwrap(), 3);
    check_gradient(&Problem::logreg_l2(cls, 1.0).unwrap(), 4);
    let groups = Arc::new(Groups::contiguous(6, 2).unwrap());
    check_gradient(&Problem::group_lasso(data.clone(), 1.0, groups).unwrap(), 5);
    let q = crate::fixedpoint::Quadratic::from_least_squares(&data.a, &data.y, 0.1).unwrap();
    check_gradient(&Problem::quadratic(q), 6);
}

#[test]
fn logistic_objective_is_stable_for_large_margins() {
    let data = identity_data(&[1.0, -1.0]);
    let prob = Problem::logreg_l1(data, 1.0).unwrap();
    let v = prob.objective(&[800.0, -800.0]).unwrap();
    assert!(v.is_finite() && v > 1600.0 - 1e-9);
    let v = prob.objective(&[-800.0, 800.0]).unwrap();
    assert!((v - (2.0 * 800.0 + 1600.0)).abs() < 1e-9);
}

#[test]
fn lipschitz_constants() {
    // orthonormal columns
    let s = 1.0 / 2f64.sqrt();
    let a = dense(3, 2, &[s, s, s, -s, 0.0, 0.0]);
    let data = Arc::new(Dataset::new(a, vec![1.0, 0.0, 0.0], "o").unwrap());
    let l = Problem::lasso(data, 1.0).unwrap().coordinate_lipschitz();
    assert!(l.iter().all(|v| (v - 1.0).abs() < 1e-15));

    let cls = identity_data(&[1.0, -1.0, 1.0]);
    let l = Problem::logreg_l1(cls, 1.0).unwrap().coordinate_lipschitz();
    assert_eq!(l, vec![0.25; 3]);

    let data = regression(10, 4, 7);
    let enet = Problem::elastic_net(data.clone(), 1.0, 3.0).unwrap();
    let l = enet.coordinate_lipschitz();
    let norms = col_norms_sq(&data.a);
    for (lj, nj) in l.iter().zip(norms) {
        assert!((lj - nj / 10.0).abs() < 1e-14);
    }
}

#[test]
fn group_lipschitz_matches_power_iteration() {
    let data = regression(12, 4, 8);
    let groups = Arc::new(Groups::new(vec![vec![0, 2], vec![1, 3]], 4).unwrap());
    let prob = Problem::group_lasso(data.clone(), 1.0, groups.clone()).unwrap();
    let l = prob.coordinate_lipschitz();
    for (gi, g) in groups.iter().enumerate() {
        let block = data.a.select_columns(g).to_dense();
        let gram = block.transpose() * &block;
        // power iteration oracle
        let mut v = nalgebra::DVector::from_element(2, 1.0);
        let mut est = 0.0;
        for _ in 0..500 {
            let w = &gram * &v;
            est = w.norm();
            v = w / est;
        }
        assert!((l[gi] - est).abs() < 1e-8 * est, "{} vs {est}", l[gi]);
    }
}

/// Minimizer of `pen(u) + (l/2)(u − v)²` for a convex `pen` with at most a
/// kink at 0: a grid search brackets it, then bisection on the derivative
/// (numerical for `pen`) refines it.
fn minimize_1d(pen: &dyn Fn(f64) -> f64, l: f64, v: f64) -> f64 {
    let f = |u: f64| pen(u) + 0.5 * l * (u - v) * (u - v);
    let (lo, hi, n) = (-8.0, 8.0, 4000);
    let step = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + i as f64 * step)
        .min_by(|a, b| f(*a).partial_cmp(&f(*b)).unwrap())
        .unwrap();
    let (mut a, mut b) = (best - step, best + step);
    let h0 = 1e-6;
    if a < 0.0 && b > 0.0 {
        let right = (pen(h0) - pen(0.0)) / h0 - l * v;
        let left = (pen(0.0) - pen(-h0)) / h0 - l * v;
        if left <= 0.0 && right >= 0.0 {
            return 0.0;
        }
        if right < 0.0 {
            a = 0.0;
        } else {
            b = 0.0;
        }
    }
    let slope = |u: f64| {
        let h = h0.min(0.5 * u.abs()).max(1e-12);
        (pen(u + h) - pen(u - h)) / (2.0 * h) + l * (u - v)
    };
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if slope(m) > 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn coordinate_prox_matches_scalar_minimization() {
    let reg = regression(5, 2, 9);
    let cls = classification(5, 2, 10);
    let lambda = 0.7;
    let rho = 1.3;
    let cases: Vec<(Problem<f64>, Box<dyn Fn(f64) -> f64>)> = vec![
        (Problem::lasso(reg.clone(), lambda).unwrap(), Box::new(move |u: f64| lambda * u.abs())),
        (Problem::logreg_l1(cls.clone(), lambda).unwrap(), Box::new(move |u: f64| lambda * u.abs())),
        (
            Problem::elastic_net(reg, lambda, rho).unwrap(),
            Box::new(move |u: f64| lambda * u.abs() + 0.5 * rho * u * u),
        ),
        (Problem::logreg_l2(cls, lambda).unwrap(), Box::new(move |u: f64| 0.5 * lambda * u * u)),
    ];
    for (prob, pen) in &cases {
        for &l in &[0.3, 1.0, 4.0] {
            for &v in &[-3.0, -0.5, -0.1, 0.0, 0.2, 0.69, 2.5] {
                let got = prob.prox_coordinate(v, l);
                let want = minimize_1d(pen.as_ref(), l, v);
                assert!((got - want).abs() < 1e-8, "{} L={l} v={v}: {got} vs {want}", prob.name());
            }
        }
    }
}

#[test]
fn lambda_max_values() {
    let data = identity_data(&[3.0, -1.0]);
    assert_eq!(Problem::lasso(data.clone(), 1.0).unwrap().lambda_max().unwrap(), 3.0);
    assert_eq!(lambda_max_for("logreg_l1", Some(data.as_ref()), None).unwrap(), 1.5);
    assert_eq!(Problem::elastic_net(data.clone(), 1.0, 0.0).unwrap().lambda_max().unwrap(), 1.5);
    let binary = identity_data(&[1.0, -1.0]);
    assert_eq!(Problem::logreg_l1(binary, 1.0).unwrap().lambda_max().unwrap(), 0.5);
    let groups = Arc::new(Groups::contiguous(2, 2).unwrap());
    let gl = Problem::group_lasso(data, 1.0, groups).unwrap();
    assert!((gl.lambda_max().unwrap() - 10f64.sqrt()).abs() < 1e-15);

    let q = crate::fixedpoint::Quadratic::new(DMatrix::identity(2, 2), vec![0.0, 0.0]).unwrap();
    assert!(matches!(Problem::quadratic(q).lambda_max(), Err(Error::Unsupported(_))));
}

fn certificate_problems(scale: f64) -> Vec<Problem<f64>> {
    let reg = regression(20, 8, 11);
    let cls = classification(20, 8, 12);
    let groups = Arc::new(Groups::contiguous(8, 2).unwrap());
    let lm = |kind: &str, data: &Dataset<f64>, g: Option<&Groups>| lambda_max_for(kind, Some(data), g).unwrap();
    vec![
        Problem::lasso(reg.clone(), scale * lm("lasso", &reg, None)).unwrap(),
        Problem::elastic_net(reg.clone(), scale * lm("enet", &reg, None), 0.5).unwrap(),
        Problem::logreg_l1(cls.clone(), scale * lm("logreg_l1", &cls, None)).unwrap(),
        Problem::group_lasso(reg.clone(), scale * lm("group_lasso", &reg, Some(&groups)), groups.clone())
            .unwrap(),
    ]
}

#[test]
fn lambda_max_certificate() {
    for prob in certificate_problems(1.0) {
        let cfg = SolverConfig::new(Algorithm::Pcd).with_max_epochs(50);
        let trace = solve(&prob, &cfg).unwrap();
        assert!(trace.x.iter().all(|&v| v == 0.0), "{} left zero", prob.name());
    }
    for prob in certificate_problems(0.99) {
        let cfg = SolverConfig::new(Algorithm::Pcd).with_max_epochs(200);
        let trace = solve(&prob, &cfg).unwrap();
        assert!(trace.x.iter().any(|&v| v != 0.0), "{} stayed at zero", prob.name());
    }
}

#[test]
fn gap_unavailable_for_other_problems() {
    let data = regression(6, 4, 13);
    let groups = Arc::new(Groups::contiguous(4, 2).unwrap());
    let gl = Problem::group_lasso(data.clone(), 1.0, groups).unwrap();
    assert!(gl.duality_gap(&[0.0; 4]).is_none());
    let cls = classification(6, 4, 14);
    assert!(Problem::logreg_l2(cls, 1.0).unwrap().duality_gap(&[0.0; 4]).is_none());
}

fn gap_problems() -> Vec<Problem<f64>> {
    let reg = regression(25, 10, 15);
    let cls = classification(25, 10, 16);
    let l_lasso = lambda_max_for("lasso", Some(&reg), None).unwrap();
    let l_enet = lambda_max_for("enet", Some(&reg), None).unwrap();
    let l_log = lambda_max_for("logreg_l1", Some(&cls), None).unwrap();
    vec![
        Problem::lasso(reg.clone(), 0.1 * l_lasso).unwrap(),
        Problem::elastic_net(reg.clone(), 0.1 * l_enet, 0.3).unwrap(),
        Problem::elastic_net(reg, 0.1 * l_enet, 0.0).unwrap(),
        Problem::logreg_l1(cls, 0.1 * l_log).unwrap(),
    ]
}

#[test]
fn gap_vanishes_at_the_optimum() {
    for prob in gap_problems() {
        let x = long_run(&prob);
        let g = prob.duality_gap(&x).unwrap();
        assert!(g.gap <= 1e-8 * g.primal.max(1.0), "{}: gap {:e}", prob.name(), g.gap);
    }
}

#[test]
fn gap_at_zero_is_nonnegative() {
    for prob in gap_problems() {
        let g = prob.duality_gap(&vec![0.0; prob.n_features()]).unwrap();
        assert!(g.gap >= 0.0 && g.dual <= g.primal + 1e-12);
    }
}

#[test]
fn gap_bounds_suboptimality() {
    for prob in gap_problems() {
        let x_star = long_run(&prob);
        let f_star = prob.objective(&x_star).unwrap();
        for s in 0..20 {
            let x = random_point(prob.n_features(), 100 + s);
            let g = prob.duality_gap(&x).unwrap();
            let subopt = prob.objective(&x).unwrap() - f_star;
            assert!(g.gap >= subopt - 1e-9, "{}: gap {} < subopt {}", prob.name(), g.gap, subopt);
        }
    }
}

#[test]
fn tikhonov_strength_reaches_target_condition() {
    let lam: f64 = tikhonov_for_condition(1e-3, 10.0, 1e2).unwrap();
    assert!(((10.0 + lam) / (1e-3 + lam) - 1e2).abs() < 1e-9);
    assert_eq!(tikhonov_for_condition(1.0, 2.0, 10.0).unwrap(), 0.0);
    assert!(tikhonov_for_condition(1.0, 2.0, 1.0).is_err());
    assert!(tikhonov_for_condition(3.0, 2.0, 10.0).is_err());
}
