//! Exact ground states of sector Hamiltonians.
//!
//! Small sectors are diagonalized densely. Larger ones use Lanczos with full
//! reorthogonalization; the first excited level comes from a second Lanczos
//! run restricted to the orthogonal complement of the ground vector, so exact
//! degeneracies are resolved.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::models::HamiltonianMatrix;
use crate::rng::CounterRng;
use crate::scalar::{cr, Real};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Sectors up to this dimension are diagonalized densely.
    pub dense_max_dim: usize,
    pub max_iterations: usize,
    /// Convergence threshold on `||H v - E v||` relative to `max|H_ij| * sqrt(dim)`.
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { dense_max_dim: 4096, max_iterations: 1000, tolerance: 1e-12 }
    }
}

#[derive(Clone, Debug)]
pub struct GroundStateResult<T: Real> {
    pub energy: T,
    pub vector: Vec<Complex<T>>,
    /// `E1 - E0`, infinite for one-dimensional sectors.
    pub gap: T,
    pub degenerate: bool,
    pub residual: T,
    pub method: Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Dense,
    Lanczos,
}

pub fn ground_state<T: Real>(h: &HamiltonianMatrix<T>) -> Result<GroundStateResult<T>> {
    ground_state_with(&h.matrix, &SolverOptions::default())
}

pub fn ground_state_with<T: Real>(m: &CsrMatrix<T>, opts: &SolverOptions) -> Result<GroundStateResult<T>> {
    let dim = m.dim();
    if dim == 0 {
        return Err(Error::Domain("empty sector".into()));
    }
    let (energy, e1, mut vector, method) = if dim <= opts.dense_max_dim {
        let (vals, vecs) = T::hermitian_eigh(dim, &m.to_dense(), true);
        let vecs = vecs.expect("vectors requested");
        let e1 = if dim > 1 { vals[1] } else { T::infinity() };
        (vals[0], e1, vecs[..dim].to_vec(), Method::Dense)
    } else {
        let (e0, v0) = lanczos_lowest(m, None, opts)?;
        let (e1, _) = lanczos_lowest(m, Some(&v0), opts)?;
        (e0, e1, v0, Method::Lanczos)
    };
    normalize(&mut vector);
    fix_phase(&mut vector);
    let residual = residual_norm(m, energy, &vector);
    let gap = e1 - energy;
    let degenerate = gap < T::of(1e-10) * T::one().max(energy.abs());
    Ok(GroundStateResult { energy, vector, gap, degenerate, residual, method })
}

/// Bound `1e-10 * max|H_ij| * sqrt(dim)` on the eigen-residual.
pub fn residual_bound<T: Real>(m: &CsrMatrix<T>) -> T {
    T::of(1e-10) * m.max_abs().max(T::min_positive_value()) * T::of(m.dim() as f64).sqrt()
}

pub fn residual_norm<T: Real>(m: &CsrMatrix<T>, e: T, v: &[Complex<T>]) -> T {
    let mut hv = vec![cr(T::zero()); v.len()];
    m.matvec(v, &mut hv);
    hv.iter().zip(v).map(|(a, b)| (*a - *b * e).norm_sqr()).sum::<T>().sqrt()
}

/// Rotate so the largest-magnitude amplitude (first one on ties) is real positive.
pub fn fix_phase<T: Real>(v: &mut [Complex<T>]) {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() == T::zero() {
        return;
    }
    let rot = z.conj() / z.norm();
    for x in v.iter_mut() {
        *x *= rot;
    }
    v[best] = cr(v[best].re);
}

fn normalize<T: Real>(v: &mut [Complex<T>]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(cr(T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn project_out<T: Real>(v: &mut [Complex<T>], q: &[Complex<T>]) {
    let c = dot(q, v);
    for (x, y) in v.iter_mut().zip(q) {
        *x -= *y * c;
    }
}

/// Lowest eigenpair by Lanczos with full reorthogonalization, optionally in
/// the orthogonal complement of `deflate`.
fn lanczos_lowest<T: Real>(
    m: &CsrMatrix<T>,
    deflate: Option<&[Complex<T>]>,
    opts: &SolverOptions,
) -> Result<(T, Vec<Complex<T>>)> {
    let dim = m.dim();
    let scale = m.max_abs().max(T::min_positive_value()) * T::of(dim as f64).sqrt();
    let tol = T::of(opts.tolerance) * scale;
    let cap = opts.max_iterations.min(dim - deflate.map_or(0, |_| 1)).max(1);

    // the deflated run needs a start vector independent of the first one, otherwise
    // its component inside a degenerate ground space is exactly the first ground vector
    let tag = if deflate.is_some() { "lanczos-start-deflated" } else { "lanczos-start" };
    let mut rng = CounterRng::stream(dim as u64, tag);
    let mut q: Vec<Complex<T>> = (0..dim).map(|_| Complex::new(T::of(rng.normal()), T::of(rng.normal()))).collect();
    if let Some(d) = deflate {
        project_out(&mut q, d);
    }
    normalize(&mut q);

    let mut basis: Vec<Vec<Complex<T>>> = vec![q];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let mut w = vec![cr(T::zero()); dim];
    let mut last_residual = T::infinity();

    for it in 0..cap {
        m.matvec(&basis[it], &mut w);
        let a = dot(&basis[it], &w).re;
        alpha.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            if let Some(d) = deflate {
                project_out(&mut w, d);
            }
            for qk in &basis {
                project_out(&mut w, qk);
            }
        }
        let b = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();

        let k = alpha.len();
        let check = k == cap || b <= tol || k.is_multiple_of(5);
        if check {
            let (theta, s) = tridiagonal_lowest(&alpha, &beta);
            let res = b * s[k - 1].abs();
            last_residual = res;
            if res <= tol || b <= tol || k == cap {
                let mut v = vec![cr(T::zero()); dim];
                for (qk, &sk) in basis.iter().zip(&s) {
                    for (x, y) in v.iter_mut().zip(qk) {
                        *x += *y * sk;
                    }
                }
                normalize(&mut v);
                let true_res = residual_norm(m, theta, &v);
                if true_res <= tol * T::of(10.0) || b <= tol || k == dim {
                    return Ok((theta, v));
                }
                if k == cap {
                    return Err(Error::Solver { iterations: k, residual: true_res.as_f64() });
                }
            }
        }
        if b <= tol {
            break;
        }
        beta.push(b);
        let next: Vec<Complex<T>> = w.iter().map(|z| *z / b).collect();
        basis.push(next);
    }
    Err(Error::Solver { iterations: alpha.len(), residual: last_residual.as_f64() })
}

/// Lowest eigenpair of the symmetric tridiagonal matrix with diagonal `alpha` and off-diagonal `beta`.
fn tridiagonal_lowest<T: Real>(alpha: &[T], beta: &[T]) -> (T, Vec<T>) {
    let k = alpha.len();
    let mut t = vec![cr(T::zero()); k * k];
    for i in 0..k {
        t[i * k + i] = cr(alpha[i]);
        if i + 1 < k {
            t[i * k + i + 1] = cr(beta[i]);
            t[(i + 1) * k + i] = cr(beta[i]);
        }
    }
    let (vals, vecs) = T::hermitian_eigh(k, &t, true);
    let vecs = vecs.expect("vectors requested");
    // eigenvectors of a real symmetric matrix are real up to a global phase
    let phase = vecs[..k].iter().fold(cr(T::zero()), |m, z| if z.norm() > m.norm() { *z } else { m });
    let rot = if phase.norm() > T::zero() { phase.conj() / phase.norm() } else { cr(T::one()) };
    let s = vecs[..k].iter().map(|z| (*z * rot).re).collect();
    (vals[0], s)
}
