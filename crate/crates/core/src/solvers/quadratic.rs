use crate::fixedpoint::Quadratic;
use crate::scalar::Field;

/// Exact minimization along coordinate `j`: `x_j ← x_j − (H_{j:}x + b_j)/H_jj`.
#[inline]
fn coordinate_step<T: Field>(q: &Quadratic<T>, j: usize, x: &mut [T]) {
    let h = q.h();
    let g = x
        .iter()
        .enumerate()
        .fold(q.b()[j].clone(), |acc, (i, xi)| acc + h[(j, i)].clone() * xi.clone());
    x[j] = x[j].clone() - g / h[(j, j)].clone();
}

/// One cyclic sweep over coordinates `0..p`, each using the freshest `x`.
pub fn cd_epoch_quadratic<T: Field>(q: &Quadratic<T>, x: &mut [T]) {
    for j in 0..q.dim() {
        coordinate_step(q, j, x);
    }
}

/// A forward sweep `0..p` followed by a backward sweep `p−1..0`.
pub fn cdsym_epoch_quadratic<T: Field>(q: &Quadratic<T>, x: &mut [T]) {
    for j in (0..q.dim()).chain((0..q.dim()).rev()) {
        coordinate_step(q, j, x);
    }
}
