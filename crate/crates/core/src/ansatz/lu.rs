//! Small dense complex LU factorization with partial pivoting.

use num_complex::Complex;

use crate::scalar::{cr, Real};

/// Row-major square matrix.
#[derive(Clone, Debug)]
pub struct SquareMatrix<T: Real> {
    pub n: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: vec![cr(T::zero()); n * n] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_to_diagonal(&mut self, shift: T) {
        for i in 0..self.n {
            self.data[i * self.n + i].re += shift;
        }
    }
}

pub struct Lu<T: Real> {
    n: usize,
    lu: Vec<Complex<T>>,
    perm: Vec<usize>,
    odd: bool,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn factor(m: &SquareMatrix<T>) -> Self {
        let n = m.n;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm_sqr();
            for r in k + 1..n {
                let v = lu[r * n + k].norm_sqr();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let pivot = cr(T::one()) / lu[k * n + k];
            for r in k + 1..n {
                let f = lu[r * n + k] * pivot;
                lu[r * n + k] = f;
                if f.re != T::zero() || f.im != T::zero() {
                    for c in k + 1..n {
                        let u = lu[k * n + c];
                        lu[r * n + c] -= f * u;
                    }
                }
            }
        }
        Lu { n, lu, perm, odd, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex<T> {
        if self.singular {
            return cr(T::zero());
        }
        let mut d = cr(if self.odd { -T::one() } else { T::one() });
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    /// Dense inverse; only meaningful for non-singular factors.
    pub fn inverse(&self) -> SquareMatrix<T> {
        let n = self.n;
        let mut inv = SquareMatrix::zeros(n);
        let mut col = vec![cr(T::zero()); n];
        let recip: Vec<Complex<T>> = (0..n).map(|i| cr(T::one()) / self.lu[i * n + i]).collect();
        for j in 0..n {
            // solve A x = e_j, where P A = L U
            for (i, x) in col.iter_mut().enumerate() {
                *x = if self.perm[i] == j { cr(T::one()) } else { cr(T::zero()) };
            }
            for i in 0..n {
                let mut s = col[i];
                for k in 0..i {
                    s -= self.lu[i * n + k] * col[k];
                }
                col[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for k in i + 1..n {
                    s -= self.lu[i * n + k] * col[k];
                }
                col[i] = s * recip[i];
            }
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        inv
    }
}
