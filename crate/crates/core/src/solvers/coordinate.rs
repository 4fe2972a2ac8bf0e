use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Recorder, SolverConfig, Trace};
use crate::anderson::{ExtrapolationWindow, Outcome};
use crate::error::Result;
use crate::problems::{prox_group, Problem};
use crate::scalar::Real;

/// Epochs between exact recomputations of the predictor.
pub const RESYNC_PERIOD: usize = 100;

/// Incrementally maintained predictor `z = Ax` (or `Hx`).
#[derive(Debug, Clone)]
pub struct ResidualState<T> {
    z: Vec<T>,
}

impl<T: Real> ResidualState<T> {
    pub fn new(prob: &Problem<T>, x: &[T]) -> Self {
        Self { z: prob.predictor(x) }
    }

    pub fn z(&self) -> &[T] {
        &self.z
    }

    pub(crate) fn replace(&mut self, z: Vec<T>) {
        self.z = z;
    }

    /// Recomputes `z` exactly and returns `‖z_old − z‖∞ / (1 + ‖z‖∞)`.
    pub fn resync(&mut self, prob: &Problem<T>, x: &[T]) -> T {
        let exact = prob.predictor(x);
        let (diff, scale) = self
            .z
            .iter()
            .zip(&exact)
            .fold((T::zero(), T::zero()), |(d, s), (&a, &b)| {
                (d.max((a - b).abs()), s.max(b.abs()))
            });
        self.z = exact;
        diff / (T::one() + scale)
    }
}

/// Coordinate visiting order within an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// `0..p`.
    Forward,
    /// `0..p` then `p−1..0`.
    Symmetric,
}

#[inline]
fn update_coordinate<T: Real>(prob: &Problem<T>, lips: &[T], j: usize, x: &mut [T], z: &mut [T]) {
    let l = lips[j];
    if l == T::zero() {
        return;
    }
    let g = prob.coordinate_gradient(j, z);
    let new = prob.prox_coordinate(x[j] - g / l, l);
    let delta = new - x[j];
    if delta != T::zero() {
        x[j] = new;
        prob.predictor_axpy(j, delta, z);
    }
}

fn update_group<T: Real>(prob: &Problem<T>, lips: &[T], gi: usize, x: &mut [T], z: &mut [T]) {
    let l = lips[gi];
    if l == T::zero() {
        return;
    }
    let g = prob.groups().expect("group problem").get(gi);
    let lambda = prob.lambda().expect("group problem has lambda");
    let v: Vec<T> = g.iter().map(|&j| x[j] - prob.coordinate_gradient(j, z) / l).collect();
    let new = prox_group(&v, lambda / l);
    for (&j, nj) in g.iter().zip(new) {
        let delta = nj - x[j];
        if delta != T::zero() {
            x[j] = nj;
            prob.predictor_axpy(j, delta, z);
        }
    }
}

/// Number of coordinate blocks (features, or groups for the group Lasso).
fn n_blocks<T: Real>(prob: &Problem<T>) -> usize {
    prob.groups().map_or_else(|| prob.n_features(), |g| g.len())
}

#[inline]
fn update_block<T: Real>(prob: &Problem<T>, lips: &[T], b: usize, x: &mut [T], z: &mut [T]) {
    if prob.groups().is_some() {
        update_group(prob, lips, b, x, z);
    } else {
        update_coordinate(prob, lips, b, x, z);
    }
}

/// One epoch of proximal coordinate descent.
///
/// `lips` comes from [`Problem::coordinate_lipschitz`]; blocks with a zero
/// constant are left untouched.
pub fn pcd_epoch<T: Real>(
    prob: &Problem<T>,
    lips: &[T],
    x: &mut [T],
    state: &mut ResidualState<T>,
    sweep: Sweep,
) {
    let m = n_blocks(prob);
    for b in 0..m {
        update_block(prob, lips, b, x, &mut state.z);
    }
    if sweep == Sweep::Symmetric {
        for b in (0..m).rev() {
            update_block(prob, lips, b, x, &mut state.z);
        }
    }
}

/// Cyclic proximal coordinate descent.
pub fn pcd<T: Real>(prob: &Problem<T>, cfg: &SolverConfig<T>, sweep: Sweep) -> Result<Trace<T>> {
    let mut rec = Recorder::new(prob, cfg)?;
    rec.start_clock();
    let lips = prob.coordinate_lipschitz();
    let mut x = vec![T::zero(); prob.n_features()];
    let mut state = ResidualState::new(prob, &x);
    let mut epoch = 0;
    while !rec.record(epoch, &x, Some(state.z()))? {
        rec.start_clock();
        epoch += 1;
        pcd_epoch(prob, &lips, &mut x, &mut state, sweep);
        if epoch % RESYNC_PERIOD == 0 {
            let d = state.resync(prob, &x);
            rec.drift(d);
        }
    }
    Ok(rec.finish(x))
}

/// Proximal coordinate descent with online extrapolation every `K` epochs.
///
/// The extrapolated point replaces the iterate only when it does not
/// increase the objective (with `use_guard`). A singular coefficient system
/// skips the round.
pub fn anderson_pcd<T: Real>(prob: &Problem<T>, cfg: &SolverConfig<T>, sweep: Sweep) -> Result<Trace<T>> {
    let mut rec = Recorder::new(prob, cfg)?;
    rec.start_clock();
    let lips = prob.coordinate_lipschitz();
    let mut x = vec![T::zero(); prob.n_features()];
    let mut state = ResidualState::new(prob, &x);
    let mut window = ExtrapolationWindow::new(cfg.k, cfg.lambda_reg)?;
    window.reset(x.clone());
    let mut epoch = 0;
    while !rec.record(epoch, &x, Some(state.z()))? {
        rec.start_clock();
        epoch += 1;
        pcd_epoch(prob, &lips, &mut x, &mut state, sweep);
        if epoch % RESYNC_PERIOD == 0 {
            let d = state.resync(prob, &x);
            rec.drift(d);
        }
        window.push(x.clone());
        if epoch % cfg.k == 0 {
            let res = window.extrapolate().expect("window holds K + 1 points");
            let outcome = if res.solved {
                let z_e = prob.predictor(&res.point);
                let accept = !cfg.use_guard
                    || prob.objective_with_predictor(&res.point, &z_e)
                        <= prob.objective_with_predictor(&x, state.z());
                if accept {
                    x = res.point;
                    state.replace(z_e);
                    Outcome::Accepted
                } else {
                    Outcome::Rejected
                }
            } else {
                Outcome::Unsolved
            };
            rec.event(epoch, outcome);
            window.reset(x.clone());
        }
    }
    Ok(rec.finish(x))
}

/// Proximal coordinate descent with blocks drawn uniformly with replacement.
///
/// An epoch is as many block updates as there are blocks. Runs with the same
/// seed are bit-identical.
pub fn prcd<T: Real>(prob: &Problem<T>, cfg: &SolverConfig<T>) -> Result<Trace<T>> {
    let mut rec = Recorder::new(prob, cfg)?;
    rec.start_clock();
    let lips = prob.coordinate_lipschitz();
    let m = n_blocks(prob);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x = vec![T::zero(); prob.n_features()];
    let mut state = ResidualState::new(prob, &x);
    let mut epoch = 0;
    while !rec.record(epoch, &x, Some(state.z()))? {
        rec.start_clock();
        epoch += 1;
        for _ in 0..m {
            let b = rng.random_range(0..m);
            update_block(prob, &lips, b, &mut x, &mut state.z);
        }
        if epoch % RESYNC_PERIOD == 0 {
            let d = state.resync(prob, &x);
            rec.drift(d);
        }
    }
    Ok(rec.finish(x))
}
