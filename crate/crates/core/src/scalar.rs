//! Scalar abstraction shared by every numerical module.
//!
//! All state vectors, matrices and variational parameters are generic over a
//! real floating point type `T: Real`; complex quantities are `Complex<T>`.
//! `f64` is the working precision of the pipeline, `f32` is supported for
//! cheap exploratory runs.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type used by the lab.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64` (exact for `f64`).
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("real scalar converts to f64")
    }

    /// Eigen-decomposition of a dense Hermitian `n x n` matrix stored row-major.
    ///
    /// Eigenvalues are returned in ascending order. When `want_vectors` is set,
    /// the second element holds the eigenvectors column-major: vector `k` is
    /// `vecs[k * n..(k + 1) * n]`.
    fn hermitian_eigh(
        n: usize,
        a: &[Complex<Self>],
        want_vectors: bool,
    ) -> (Vec<Self>, Option<Vec<Complex<Self>>>);
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            fn hermitian_eigh(
                n: usize,
                a: &[Complex<$t>],
                want_vectors: bool,
            ) -> (Vec<$t>, Option<Vec<Complex<$t>>>) {
                assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
                if n == 0 {
                    return (Vec::new(), want_vectors.then(Vec::new));
                }
                let m = DMatrix::<Complex<$t>>::from_row_slice(n, n, a);
                if !want_vectors {
                    let mut vals: Vec<$t> = m.symmetric_eigenvalues().iter().copied().collect();
                    vals.sort_by(|x, y| x.total_cmp(y));
                    return (vals, None);
                }
                let eig = m.symmetric_eigen();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
                let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
                let mut vecs = Vec::with_capacity(n * n);
                for &k in &order {
                    vecs.extend(eig.eigenvectors.column(k).iter().copied());
                }
                (vals, Some(vecs))
            }
        }
    )*};
}

impl_real!(f32, f64);

/// Complex scalar over a [`Real`].
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::of(z.re), T::of(z.im))
}
