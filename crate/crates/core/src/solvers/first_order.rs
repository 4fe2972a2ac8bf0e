use super::{Recorder, SolverConfig, Trace};
use crate::anderson::{ExtrapolationWindow, Outcome};
use crate::error::{invalid, Result};
use crate::problems::Problem;
use crate::scalar::Real;

/// Smoothness constant of the data fit, falling back to 1 for a zero design.
fn step_lipschitz<T: Real>(prob: &Problem<T>) -> T {
    let l = prob.global_lipschitz();
    if l > T::zero() {
        l
    } else {
        T::one()
    }
}

/// Ridge strength folded into the gradient of a smooth problem.
fn smooth_ridge<T: Real>(prob: &Problem<T>) -> Result<T> {
    match prob {
        Problem::Quadratic(_) => Ok(T::zero()),
        Problem::LogRegL2 { lambda, .. } => Ok(*lambda),
        other => Err(invalid(format!(
            "gradient descent needs a smooth objective, {} has a nonsmooth penalty",
            other.name()
        ))),
    }
}

fn gd_step<T: Real>(prob: &Problem<T>, ridge: T, l: T, x: &[T]) -> Vec<T> {
    let g = prob.gradient(&prob.predictor(x));
    x.iter().zip(g).map(|(&xi, gi)| xi - (gi + ridge * xi) / l).collect()
}

fn prox_grad_step<T: Real>(prob: &Problem<T>, l: T, x: &[T]) -> Vec<T> {
    let g = prob.gradient(&prob.predictor(x));
    let mut v: Vec<T> = x.iter().zip(g).map(|(&xi, gi)| xi - gi / l).collect();
    prob.prox_full(&mut v, l);
    v
}

/// Gradient descent with step `1/L` on a smooth objective.
pub fn gd<T: Real>(prob: &Problem<T>, cfg: &SolverConfig<T>) -> Result<Trace<T>> {
    let mut rec = Recorder::new(prob, cfg)?;
    rec.start_clock();
    let ridge = smooth_ridge(prob)?;
    let l = step_lipschitz(prob) + ridge;
    let mut x = vec![T::zero(); prob.n_features()];
    let mut epoch = 0;
    while !rec.record(epoch, &x, None)? {
        rec.start_clock();
        epoch += 1;
        x = gd_step(prob, ridge, l, &x);
    }
    Ok(rec.finish(x))
}

/// Gradient descent with online extrapolation every `K` steps.
pub fn anderson_gd<T: Real>(prob: &Problem<T>, cfg: &SolverConfig<T>) -> Result<Trace<T>> {
    let mut rec = Recorder::new(prob, cfg)?;
    rec.start_clock();
    let ridge = smooth_ridge(prob)?;
    let l = step_lipschitz(prob) + ridge;
    let mut x = vec![T::zero(); prob.n_features()];
    let mut window = ExtrapolationWindow::new(cfg.k, cfg.lambda_reg)?;
    window.reset(x.clone());
    let mut epoch = 0;
    while !rec.record(epoch, &x, None)? {
        rec.start_clock();
        epoch += 1;
        x = gd_step(prob, ridge, l, &x);
        window.push(x.clone());
        if epoch % cfg.k == 0 {
            let res = window.extrapolate().expect("window holds K + 1 points");
            let outcome = if !res.solved {
                Outcome::Unsolved
            } else if cfg.use_guard
                && prob.objective_with_predictor(&res.point, &prob.predictor(&res.point))
                    > prob.objective_with_predictor(&x, &prob.predictor(&x))
            {
                Outcome::Rejected
            } else {
                x = res.point;
                Outcome::Accepted
            };
            rec.event(epoch, outcome);
            window.reset(x.clone());
        }
    }
    Ok(rec.finish(x))
}

/// Proximal gradient descent with step `1/L`.
pub fn pgd<T: Real>(prob: &Problem<T>, cfg: &SolverConfig<T>) -> Result<Trace<T>> {
    let mut rec = Recorder::new(prob, cfg)?;
    rec.start_clock();
    let l = step_lipschitz(prob);
    let mut x = vec![T::zero(); prob.n_features()];
    let mut epoch = 0;
    while !rec.record(epoch, &x, None)? {
        rec.start_clock();
        epoch += 1;
        x = prox_grad_step(prob, l, &x);
    }
    Ok(rec.finish(x))
}

/// Proximal gradient with Nesterov momentum, `t_{k+1} = (1 + √(1 + 4t_k²))/2`.
pub fn fista<T: Real>(prob: &Problem<T>, cfg: &SolverConfig<T>) -> Result<Trace<T>> {
    let mut rec = Recorder::new(prob, cfg)?;
    rec.start_clock();
    let l = step_lipschitz(prob);
    let four = T::from(4.0).expect("representable");
    let two = T::one() + T::one();
    let mut x = vec![T::zero(); prob.n_features()];
    let mut y = x.clone();
    let mut t = T::one();
    let mut epoch = 0;
    while !rec.record(epoch, &x, None)? {
        rec.start_clock();
        epoch += 1;
        let next = prox_grad_step(prob, l, &y);
        let t_next = (T::one() + (T::one() + four * t * t).sqrt()) / two;
        let beta = (t - T::one()) / t_next;
        y = next
            .iter()
            .zip(&x)
            .map(|(&n, &o)| n + beta * (n - o))
            .collect();
        x = next;
        t = t_next;
    }
    Ok(rec.finish(x))
}

/// Conjugate gradient on `Hx = −b`; one matrix-vector product per epoch.
pub fn conjugate_gradient<T: Real>(prob: &Problem<T>, cfg: &SolverConfig<T>) -> Result<Trace<T>> {
    let Problem::Quadratic(q) = prob else {
        return Err(invalid(format!(
            "conjugate gradient applies to quadratics only, not {}",
            prob.name()
        )));
    };
    let mut rec = Recorder::new(prob, cfg)?;
    rec.start_clock();
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&u, &v)| u * v).sum::<T>();
    let mut x = vec![T::zero(); q.dim()];
    let mut r: Vec<T> = q.b().iter().map(|&v| -v).collect();
    let mut d = r.clone();
    let mut rr = dot(&r, &r);
    // below this the recursive residual is rounding noise and the search
    // directions degrade, so the iterate is frozen
    let rr_floor = T::epsilon() * T::epsilon() * rr;
    let mut epoch = 0;
    while !rec.record(epoch, &x, None)? {
        rec.start_clock();
        epoch += 1;
        if !(rr > rr_floor) {
            continue;
        }
        let hd = prob.predictor(&d);
        let curv = dot(&d, &hd);
        if !(curv > T::zero()) || !curv.is_finite() {
            continue;
        }
        let alpha = rr / curv;
        for i in 0..x.len() {
            x[i] = x[i] + alpha * d[i];
            r[i] = r[i] - alpha * hd[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for (di, &ri) in d.iter_mut().zip(&r) {
            *di = ri + beta * *di;
        }
        rr = rr_next;
    }
    Ok(rec.finish(x))
}
