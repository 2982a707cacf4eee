//! Trial wavefunctions.
//!
//! Every ansatz exposes its variational parameters as a flat real vector
//! (complex parameters contribute their real and imaginary parts as two
//! consecutive entries) and evaluates amplitudes on basis configurations.
//! Gradients are produced by reverse accumulation: for a seed `g`,
//! [`Ansatz::accumulate_gradient`] adds `d Re(conj(g) psi(n)) / d p_k` for
//! every real parameter `p_k`.

mod checkpoint;
mod gutzwiller;
mod hfds;
pub mod lu;
mod mlp;
mod probes;
mod slater;

pub use checkpoint::Checkpoint;
pub use gutzwiller::GutzwillerState;
pub use hfds::{HfdsLayout, HfdsState, INIT_NOISE};
pub use mlp::{selu, selu_complex, selu_derivative, DenseLayer, MlpParams, SELU_ALPHA, SELU_LAMBDA};
pub use probes::{AmplitudeProbeState, PhaseProbeState};
pub use slater::SlaterState;

use num_complex::Complex;

use crate::error::{Error, Result};
use self::lu::{Lu, SquareMatrix};
use crate::fock::Config;
use crate::rng::CounterRng;
use crate::scalar::{c64, cr, Real};

/// `|det|` below this is treated as singular by [`Ansatz::log_gradient`].
pub const DET_FLOOR: f64 = 1e-300;
/// Diagonal shift used to regularize singular determinant matrices during training.
pub const RIDGE: f64 = 1e-12;

pub trait Ansatz<T: Real>: Send + Sync {
    fn name(&self) -> &'static str;

    /// Number of real degrees of freedom.
    fn num_params(&self) -> usize;

    fn params(&self) -> Vec<T>;

    fn set_params(&mut self, p: &[T]);

    /// Parameter blocks in flattening order.
    fn blocks(&self) -> Vec<ParamBlock> {
        vec![ParamBlock::new("params", &[self.num_params()], false)]
    }

    /// `psi(n)`; `index` is the position of `n` in the sector basis.
    fn amplitude(&self, n: Config, index: usize) -> Complex<T>;

    /// Add `d Re(conj(seed) psi(n)) / d p_k` to `grad[k]`.
    ///
    /// With `regularize` set, a singular determinant matrix is shifted by
    /// [`RIDGE`] on its diagonal instead of failing; the return value reports
    /// whether that happened.
    fn accumulate_gradient(
        &self,
        n: Config,
        index: usize,
        seed: Complex<T>,
        grad: &mut [T],
        regularize: bool,
    ) -> Result<bool>;

    /// Returns `psi(n)` and adds the gradients of `Re(conj(s) psi(n))` for the
    /// three seeds `s = t`, `s = i t` and `s = psi(n)` into `out[0]`, `out[1]`
    /// and `out[2]`. The overlap-loss gradient is a real combination of these.
    fn accumulate_loss_terms(
        &self,
        n: Config,
        index: usize,
        t: Complex<T>,
        out: [&mut [T]; 3],
        regularize: bool,
    ) -> Result<(Complex<T>, bool)> {
        let psi = self.amplitude(n, index);
        let mut ridged = false;
        for (seed, grad) in loss_seeds(t, psi).into_iter().zip(out) {
            if seed != cr(T::zero()) {
                ridged |= self.accumulate_gradient(n, index, seed, grad, regularize)?;
            }
        }
        Ok((psi, ridged))
    }

    /// `d log psi(n) / d p_k` for every real parameter.
    fn log_gradient(&self, n: Config, index: usize) -> Result<Vec<Complex<T>>> {
        let psi = self.amplitude(n, index);
        if psi.norm() <= T::of(DET_FLOOR) {
            return Err(Error::Conditioning(psi.norm().as_f64()));
        }
        let p = self.num_params();
        let mut re = vec![T::zero(); p];
        let mut im = vec![T::zero(); p];
        self.accumulate_gradient(n, index, cr(T::one()), &mut re, false)?;
        self.accumulate_gradient(n, index, Complex::new(T::zero(), T::one()), &mut im, false)?;
        Ok(re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b) / psi).collect())
    }
}

/// Shape table entry of a parameter block, used by checkpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamBlock {
    pub name: String,
    pub dims: Vec<usize>,
    /// Complex blocks hold two reals per element.
    pub complex: bool,
}

impl ParamBlock {
    pub fn new(name: &str, dims: &[usize], complex: bool) -> Self {
        ParamBlock { name: name.to_string(), dims: dims.to_vec(), complex }
    }

    pub fn real_len(&self) -> usize {
        self.dims.iter().product::<usize>() * if self.complex { 2 } else { 1 }
    }
}

pub(crate) fn loss_seeds<T: Real>(t: Complex<T>, psi: Complex<T>) -> [Complex<T>; 3] {
    [t, t * Complex::new(T::zero(), T::one()), psi]
}

/// Cotangent of `Re(conj(seed) det A)` with respect to the entries of `A`,
/// `G[i][j] = conj(det A * inv(A)[j][i]) * seed`.
pub(crate) fn det_cotangent<T: Real>(
    a: SquareMatrix<T>,
    seed: Complex<T>,
    regularize: bool,
) -> Result<(SquareMatrix<T>, bool)> {
    let (mut g, _, ridged) = det_cofactors(a, regularize)?;
    for v in &mut g.data {
        *v *= seed;
    }
    Ok((g, ridged))
}

/// `det A` and the conjugated cofactor matrix `C[i][j] = conj(det A * inv(A)[j][i])`,
/// so that `C * seed` is the cotangent of `Re(conj(seed) det A)`.
///
/// The returned determinant is that of the unshifted matrix even when the
/// cofactors had to be taken from the ridged one.
pub(crate) fn det_cofactors<T: Real>(mut a: SquareMatrix<T>, regularize: bool) -> Result<(SquareMatrix<T>, Complex<T>, bool)> {
    let mut lu = Lu::factor(&a);
    let det0 = lu.det();
    let mut det = det0;
    let mut ridged = false;
    if lu.is_singular() || det.norm() <= T::of(DET_FLOOR) {
        if !regularize {
            return Err(Error::Conditioning(det.norm().as_f64()));
        }
        a.add_to_diagonal(T::of(RIDGE));
        lu = Lu::factor(&a);
        det = lu.det();
        ridged = true;
        if lu.is_singular() {
            return Err(Error::Conditioning(0.0));
        }
    }
    let inv = lu.inverse();
    let dc = det.conj();
    let n = a.n;
    let mut g = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, inv.at(j, i).conj() * dc);
        }
    }
    Ok((g, det0, ridged))
}

pub(crate) fn determinant<T: Real>(a: &SquareMatrix<T>) -> Complex<T> {
    Lu::factor(a).det()
}

/// Occupied modes in ascending order; panics if the count differs from `n`.
pub(crate) fn occupied_modes(config: Config, n: usize) -> Vec<usize> {
    let occ: Vec<usize> = config.modes().collect();
    assert_eq!(occ.len(), n, "configuration outside the ansatz sector");
    occ
}

/// `N x N` matrix of orbital rows selected at the occupied modes.
pub(crate) fn slater_matrix<T: Real>(phi: &[Complex<T>], n: usize, occ: &[usize]) -> SquareMatrix<T> {
    let mut a = SquareMatrix::zeros(n);
    for (r, &m) in occ.iter().enumerate() {
        a.data[r * n..(r + 1) * n].copy_from_slice(&phi[m * n..(m + 1) * n]);
    }
    a
}

pub(crate) fn flatten_complex<T: Real>(src: &[Complex<T>], out: &mut Vec<T>) {
    for z in src {
        out.push(z.re);
        out.push(z.im);
    }
}

pub(crate) fn unflatten_complex<T: Real>(src: &[T], dst: &mut [Complex<T>]) -> usize {
    for (k, z) in dst.iter_mut().enumerate() {
        *z = Complex::new(src[2 * k], src[2 * k + 1]);
    }
    2 * dst.len()
}

/// `modes x n` orbital matrix: `base` plus complex Gaussian noise of standard deviation `noise`,
/// or pure noise when no base is given.
pub(crate) fn noisy_orbitals<T: Real>(
    modes: usize,
    n: usize,
    base: Option<&[Complex<f64>]>,
    noise: f64,
    rng: &mut CounterRng,
) -> Vec<Complex<T>> {
    (0..modes * n)
        .map(|k| {
            let b = base.map_or(Complex::new(0.0, 0.0), |b| b[k]);
            c64::<T>(b + rng.complex_gaussian(noise * noise))
        })
        .collect()
}
