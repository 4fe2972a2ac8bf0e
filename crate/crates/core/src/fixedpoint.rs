//! Linear fixed-point iterations on quadratics and their spectral diagnostics.
//!
//! For `min ½ xᵀHx + ⟨b, x⟩`, gradient descent, cyclic coordinate descent and
//! the forward-backward (pseudo-symmetric) sweep are all affine maps
//! `x ↦ T x + c`. This module materializes `T` for small problems and
//! computes spectral radii, numerical ranges and extrapolation rate bounds.
//!
//! Dense materialization is limited to [`MAX_DENSE_DIM`] coordinates.

use std::io::Write;

use nalgebra::{DMatrix, RealField, Schur, SymmetricEigen};
use num_complex::Complex;

use crate::data::CscMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, identity, matvec};
use crate::scalar::{lit, Field, Real};
use crate::solvers::{cd_epoch_quadratic, cdsym_epoch_quadratic};

pub const MAX_DENSE_DIM: usize = 2000;

/// Angles used for numerical-range boundaries unless specified.
pub const DEFAULT_ANGLES: usize = 360;

fn check_dim(p: usize) -> Result<()> {
    if p > MAX_DENSE_DIM {
        return Err(invalid(format!(
            "dense diagnostics are limited to p <= {MAX_DENSE_DIM}, got {p}"
        )));
    }
    Ok(())
}

/// `½ xᵀHx + ⟨b, x⟩` with symmetric `H` and positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic<T: Field> {
    h: DMatrix<T>,
    b: Vec<T>,
}

impl<T: Field> Quadratic<T> {
    /// Validates shape, symmetry (relative tolerance 1e-10, then symmetrized)
    /// and the diagonal. Positive definiteness is checked where it is needed.
    pub fn new(h: DMatrix<T>, b: Vec<T>) -> Result<Self> {
        let p = h.nrows();
        if h.ncols() != p || b.len() != p {
            return Err(invalid(format!(
                "quadratic needs square H matching b, got {}x{} and {}",
                h.nrows(),
                h.ncols(),
                b.len()
            )));
        }
        let tol = lit::<T>(1e-10) * linalg::max_abs(&h);
        let two = T::one() + T::one();
        let mut sym = h.clone();
        for i in 0..p {
            if !(h[(i, i)] > T::zero()) {
                return Err(invalid(format!("H[{i},{i}] must be positive")));
            }
            for j in 0..i {
                if (h[(i, j)].clone() - h[(j, i)].clone()).magnitude() > tol {
                    return Err(invalid(format!("H is not symmetric at ({i},{j})")));
                }
                let avg = (h[(i, j)].clone() + h[(j, i)].clone()) / two.clone();
                sym[(i, j)] = avg.clone();
                sym[(j, i)] = avg;
            }
        }
        Ok(Self { h: sym, b })
    }

    pub fn h(&self) -> &DMatrix<T> {
        &self.h
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn objective(&self, x: &[T]) -> T {
        let hx = matvec(&self.h, x);
        let two = T::one() + T::one();
        linalg::dot(x, &hx) / two + linalg::dot(&self.b, x)
    }

    /// `Hx + b`
    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        matvec(&self.h, x)
            .into_iter()
            .zip(&self.b)
            .map(|(a, b)| a + b.clone())
            .collect()
    }

    /// `x* = −H⁻¹b` by a direct solve.
    pub fn minimizer(&self) -> Result<Vec<T>> {
        let rhs: Vec<T> = self.b.iter().map(|v| T::zero() - v.clone()).collect();
        linalg::solve(&self.h, &rhs)
    }
}

impl<T: Real> Quadratic<T> {
    /// Least squares `½‖y − Ax‖² + (ridge/2)‖x‖²` up to a constant: `H = AᵀA + ridge·Id`, `b = −Aᵀy`.
    pub fn from_least_squares(a: &CscMatrix<T>, y: &[T], ridge: T) -> Result<Self> {
        if y.len() != a.n_rows() {
            return Err(invalid("target length does not match design rows"));
        }
        let mut h = a.gram();
        for i in 0..h.nrows() {
            h[(i, i)] = h[(i, i)] + ridge;
        }
        let b = a.rmatvec(y).into_iter().map(|v| -v).collect();
        Self::new(h, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationKind {
    GradientDescent,
    CoordinateDescent,
    PseudoSymmetricCd,
}

/// The affine map `x ↦ T x + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearIteration<T: Field> {
    pub t: DMatrix<T>,
    pub offset: Vec<T>,
    pub kind: IterationKind,
}

impl<T: Field> LinearIteration<T> {
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        matvec(&self.t, x)
            .into_iter()
            .zip(&self.offset)
            .map(|(a, b)| a + b.clone())
            .collect()
    }

    /// `x − T x − offset`
    pub fn residual(&self, x: &[T]) -> Vec<T> {
        let tx = self.apply(x);
        x.iter().zip(tx).map(|(a, b)| a.clone() - b).collect()
    }

    /// Solves `(Id − T) x = offset`.
    pub fn fixed_point(&self) -> Result<Vec<T>> {
        let m = linalg::sub(&identity(self.t.nrows()), &self.t);
        linalg::solve(&m, &self.offset)
    }
}

/// Gradient descent with step `1/l`: `T = Id − H/l`, offset `−b/l`.
pub fn gd_iteration<T: Field>(q: &Quadratic<T>, l: T) -> Result<LinearIteration<T>> {
    if !(l > T::zero()) || !l.is_finite_value() {
        return Err(invalid("step constant L must be positive"));
    }
    check_dim(q.dim())?;
    let p = q.dim();
    let t = DMatrix::from_fn(p, p, |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        id - q.h[(i, j)].clone() / l.clone()
    });
    let offset = q.b.iter().map(|v| T::zero() - v.clone() / l.clone()).collect();
    Ok(LinearIteration {
        t,
        offset,
        kind: IterationKind::GradientDescent,
    })
}

/// Materializes an affine epoch by probing: `T[:, j] = epoch(e_j) − epoch(0)`.
fn probe<T: Field>(p: usize, epoch: impl Fn(&mut [T])) -> (DMatrix<T>, Vec<T>) {
    let mut base = vec![T::zero(); p];
    epoch(&mut base);
    let mut t = DMatrix::from_element(p, p, T::zero());
    for j in 0..p {
        let mut x = vec![T::zero(); p];
        x[j] = T::one();
        epoch(&mut x);
        for i in 0..p {
            t[(i, j)] = x[i].clone() - base[i].clone();
        }
    }
    (t, base)
}

/// Cyclic coordinate descent (coordinates `1..p`), built by epoch probing.
pub fn cd_iteration<T: Field>(q: &Quadratic<T>) -> Result<LinearIteration<T>> {
    check_dim(q.dim())?;
    let (t, offset) = probe(q.dim(), |x| cd_epoch_quadratic(q, x));
    Ok(LinearIteration {
        t,
        offset,
        kind: IterationKind::CoordinateDescent,
    })
}

/// Forward sweep `1..p` followed by the backward sweep `p..1`, built by probing.
pub fn cdsym_iteration_matrix<T: Field>(q: &Quadratic<T>) -> Result<LinearIteration<T>> {
    check_dim(q.dim())?;
    let (t, offset) = probe(q.dim(), |x| cdsym_epoch_quadratic(q, x));
    Ok(LinearIteration {
        t,
        offset,
        kind: IterationKind::PseudoSymmetricCd,
    })
}

/// Left-multiplies `m` by `Id − e_j e_jᵀ H / H_jj`, which only touches row `j`.
fn apply_cd_factor<T: Field>(h: &DMatrix<T>, j: usize, m: &mut DMatrix<T>) {
    let p = h.nrows();
    for c in 0..m.ncols() {
        let hm = (0..p).fold(T::zero(), |acc, k| acc + h[(j, k)].clone() * m[(k, c)].clone());
        m[(j, c)] = m[(j, c)].clone() - hm / h[(j, j)].clone();
    }
}

/// `T^CD` as the ordered product of single-coordinate factors (`j = 1` applied first).
pub fn cd_product<T: Field>(q: &Quadratic<T>) -> Result<DMatrix<T>> {
    check_dim(q.dim())?;
    let mut m = identity(q.dim());
    for j in 0..q.dim() {
        apply_cd_factor(&q.h, j, &mut m);
    }
    Ok(m)
}

/// Pseudo-symmetric iteration matrix as a product of `2p` factors.
pub fn cdsym_product<T: Field>(q: &Quadratic<T>) -> Result<DMatrix<T>> {
    check_dim(q.dim())?;
    let mut m = identity(q.dim());
    for j in (0..q.dim()).chain((0..q.dim()).rev()) {
        apply_cd_factor(&q.h, j, &mut m);
    }
    Ok(m)
}

/// `(H^{1/2}, H^{−1/2})` from a symmetric eigendecomposition.
///
/// Fails when an eigenvalue is below 1e-12.
pub fn spd_sqrt<T: Field + RealField + Copy>(h: &DMatrix<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let eig = SymmetricEigen::new(h.clone());
    let floor = lit::<T>(1e-12);
    if eig.eigenvalues.iter().any(|&v| v < floor) {
        return Err(invalid("matrix is not positive definite"));
    }
    let v = &eig.eigenvectors;
    let root = v * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.sqrt())) * v.transpose();
    let inv = v * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.sqrt().recip())) * v.transpose();
    Ok((root, inv))
}

/// Pseudo-symmetric iteration `T` and its symmetric conjugate `S = H^{1/2} T H^{−1/2}`.
pub fn cdsym_iteration<T: Field + RealField + Copy>(
    q: &Quadratic<T>,
) -> Result<(LinearIteration<T>, DMatrix<T>)> {
    let it = cdsym_iteration_matrix(q)?;
    let (root, inv) = spd_sqrt(&q.h)?;
    let s = root * &it.t * inv;
    Ok((it, s))
}

/// All eigenvalues of a real square matrix (real Schur form).
pub fn eigenvalues<T: Field + RealField + Copy>(t: &DMatrix<T>) -> Result<Vec<Complex<T>>> {
    if !t.is_square() {
        return Err(invalid(format!("expected a square matrix, got {}x{}", t.nrows(), t.ncols())));
    }
    check_dim(t.nrows())?;
    if t.nrows() == 0 {
        return Ok(Vec::new());
    }
    if t.iter().any(|v| !Field::is_finite_value(v)) {
        return Err(invalid("matrix has non-finite entries"));
    }
    let schur = Schur::try_new(t.clone(), T::default_epsilon(), 1000 * t.nrows())
        .ok_or_else(|| Error::Numeric("Schur decomposition did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Largest eigenvalue modulus.
pub fn spectral_radius<T: Field + RealField + Copy>(t: &DMatrix<T>) -> Result<T> {
    Ok(eigenvalues(t)?
        .into_iter()
        .map(modulus)
        .fold(T::zero(), |a, b| if b > a { b } else { a }))
}

/// `ζ = (1 − √(1 − ρ)) / (1 + √(1 − ρ))`
pub fn zeta<T: RealField + Copy>(rho: T) -> T {
    let s = (T::one() - rho).sqrt();
    (T::one() - s) / (T::one() + s)
}

/// `2ζ^{k−1} / (1 + ζ^{2(k−1)})`, the Chebyshev contraction after `k` extrapolated points.
pub fn chebyshev_factor<T: RealField + Copy>(zeta: T, k: usize) -> T {
    assert!(k >= 1, "chebyshev factor needs k >= 1");
    let zk = zeta.powi((k - 1) as i32);
    (T::one() + T::one()) * zk / (T::one() + zk * zk)
}

/// Error bounds for offline and online extrapolation of a linear iteration.
///
/// Errors are measured in the norm `‖v‖_B = √(vᵀBv)`.
#[derive(Debug, Clone)]
pub struct RateBound<T: Field> {
    pub rho: T,
    pub zeta: T,
    pub b: DMatrix<T>,
    /// Condition number of `H`; only set for pseudo-symmetric iterations,
    /// where `√κ(H)` multiplies the bound.
    pub kappa_h: Option<T>,
}

impl<T: Field + RealField + Copy> RateBound<T> {
    /// Symmetric PSD `T`: `B = (Id − T)²`.
    pub fn symmetric(it: &LinearIteration<T>) -> Result<Self> {
        let rho = spectral_radius(&it.t)?;
        let m = DMatrix::identity(it.t.nrows(), it.t.ncols()) - &it.t;
        Ok(Self {
            rho,
            zeta: zeta(rho),
            b: &m * &m,
            kappa_h: None,
        })
    }

    /// Pseudo-symmetric `T`: `B = (T − Id)ᵀ(T − Id)`.
    pub fn pseudo_symmetric(it: &LinearIteration<T>, q: &Quadratic<T>) -> Result<Self> {
        let rho = spectral_radius(&it.t)?;
        let m = &it.t - DMatrix::identity(it.t.nrows(), it.t.ncols());
        let eig = SymmetricEigen::new(q.h.clone()).eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo > T::zero()) {
            return Err(invalid("H is not positive definite"));
        }
        Ok(Self {
            rho,
            zeta: zeta(rho),
            b: m.transpose() * &m,
            kappa_h: Some(hi / lo),
        })
    }

    fn kappa_factor(&self) -> T {
        self.kappa_h.map_or(T::one(), |k| k.sqrt())
    }

    /// Bound on `‖x_e⁽ᵏ⁾ − x*‖_B / ‖x⁽⁰⁾ − x*‖_B` for offline extrapolation.
    pub fn offline_factor(&self, k: usize) -> T {
        self.kappa_factor() * chebyshev_factor(self.zeta, k)
    }

    /// Bound after `k` steps of online extrapolation with window `window`.
    pub fn online_factor(&self, k: usize, window: usize) -> T {
        let per_block = self.kappa_factor() * chebyshev_factor(self.zeta, window);
        per_block.powf(lit::<T>(k as f64 / window as f64))
    }

    pub fn b_norm(&self, v: &[T]) -> T {
        let bv = matvec(&self.b, v);
        let sq = linalg::dot(v, &bv);
        if sq > T::zero() {
            sq.sqrt()
        } else {
            T::zero()
        }
    }
}

/// Sampled boundary of the numerical range `W(T^q) = {x*T^q x : ‖x‖ = 1}`.
#[derive(Debug, Clone)]
pub struct NumericalRange<T> {
    pub q: usize,
    pub angles: Vec<T>,
    pub points: Vec<Complex<T>>,
    /// Whether `1 + 0i` lies in the convex hull of the sampled points.
    pub contains_one: bool,
}

/// Support points of `W(T^q)`.
///
/// For each angle θ the top eigenvector `v` of the Hermitian part of
/// `e^{iθ} T^q` gives the boundary point `v* T^q v`. The Hermitian eigenproblem
/// is solved through its real symmetric embedding of size `2p`.
pub fn numerical_range_boundary<T: Field + RealField + Copy>(
    t: &DMatrix<T>,
    q: usize,
    n_angles: usize,
) -> Result<NumericalRange<T>> {
    if !t.is_square() {
        return Err(invalid("numerical range needs a square matrix"));
    }
    check_dim(t.nrows())?;
    if q == 0 {
        return Err(invalid("power q must be at least 1"));
    }
    if n_angles < 3 {
        return Err(invalid("need at least 3 angles"));
    }
    let p = t.nrows();
    let m = matrix_power(t, q);
    let half = lit::<T>(0.5);
    let mt = m.transpose();
    let sym = (&m + &mt) * half;
    let skew = (&m - &mt) * half;
    let mut angles = Vec::with_capacity(n_angles);
    let mut points = Vec::with_capacity(n_angles);
    for k in 0..n_angles {
        let theta = T::two_pi() * lit::<T>(k as f64 / n_angles as f64);
        let (s, c) = (theta.sin(), theta.cos());
        // Hermitian part is c·sym + i·s·skew; embed as [[R, −I], [I, R]]
        let mut big = DMatrix::zeros(2 * p, 2 * p);
        for i in 0..p {
            for j in 0..p {
                let r = c * sym[(i, j)];
                let im = s * skew[(i, j)];
                big[(i, j)] = r;
                big[(i + p, j + p)] = r;
                big[(i, j + p)] = -im;
                big[(i + p, j)] = im;
            }
        }
        let eig = SymmetricEigen::try_new(big, T::default_epsilon(), 10_000)
            .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;
        let top = eig.eigenvalues.imax();
        let vec = eig.eigenvectors.column(top);
        let a = vec.rows(0, p).into_owned();
        let b = vec.rows(p, p).into_owned();
        let norm = a.norm_squared() + b.norm_squared();
        let ma = &m * &a;
        let mb = &m * &b;
        let re = (a.dot(&ma) + b.dot(&mb)) / norm;
        let im = (a.dot(&mb) - b.dot(&ma)) / norm;
        angles.push(theta);
        points.push(Complex::new(re, im));
    }
    let hull = convex_hull(&points);
    let contains_one = hull_contains(&hull, Complex::new(T::one(), T::zero()), lit::<T>(1e-12));
    Ok(NumericalRange {
        q,
        angles,
        points,
        contains_one,
    })
}

impl<T: Field + RealField + Copy> NumericalRange<T> {
    /// Counter-clockwise convex hull of the sampled points.
    pub fn hull(&self) -> Vec<Complex<T>> {
        convex_hull(&self.points)
    }

    /// Whether `z` lies in the hull, up to distance `tol` from its boundary.
    pub fn contains(&self, z: Complex<T>, tol: T) -> bool {
        hull_contains(&self.hull(), z, tol)
    }

    /// `angle,re,im` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "angle,re,im")?;
        for (a, z) in self.angles.iter().zip(&self.points) {
            writeln!(
                out,
                "{:e},{:e},{:e}",
                a.to_f64_lossy(),
                z.re.to_f64_lossy(),
                z.im.to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

fn matrix_power<T: RealField + Copy>(t: &DMatrix<T>, mut q: usize) -> DMatrix<T> {
    let mut result = DMatrix::identity(t.nrows(), t.ncols());
    let mut base = t.clone();
    while q > 0 {
        if q & 1 == 1 {
            result = &result * &base;
        }
        q >>= 1;
        if q > 0 {
            base = &base * &base;
        }
    }
    result
}

fn modulus<T: RealField + Copy>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

fn cross<T: RealField + Copy>(o: Complex<T>, a: Complex<T>, b: Complex<T>) -> T {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Andrew's monotone chain.
fn convex_hull<T: RealField + Copy>(points: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Complex<T>> = Vec::new();
    for &pt in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], pt) <= T::zero() {
            lower.pop();
        }
        lower.push(pt);
    }
    let mut upper: Vec<Complex<T>> = Vec::new();
    for &pt in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], pt) <= T::zero() {
            upper.pop();
        }
        upper.push(pt);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn segment_distance<T: RealField + Copy>(a: Complex<T>, b: Complex<T>, z: Complex<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2.is_zero() {
        return modulus(z - a);
    }
    let t = ((z - a).re * ab.re + (z - a).im * ab.im) / len2;
    let t = t.max(T::zero()).min(T::one());
    modulus(z - (a + ab * t))
}

fn hull_contains<T: RealField + Copy>(hull: &[Complex<T>], z: Complex<T>, tol: T) -> bool {
    match hull.len() {
        0 => false,
        1 => modulus(z - hull[0]) <= tol,
        2 => segment_distance(hull[0], hull[1], z) <= tol,
        n => (0..n).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            // signed distance of z to the left of edge a→b
            cross(a, b, z) >= -tol * modulus(b - a)
        }),
    }
}

/// `T` restricted to the rows and columns in `support`.
pub fn restrict<T: Field>(t: &DMatrix<T>, support: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(support.len(), support.len(), |i, j| t[(support[i], support[j])].clone())
}
