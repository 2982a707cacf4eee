use num_complex::Complex;

use crate::rng::CounterRng;
use crate::scalar::{c64, cr, Real};

pub const SELU_ALPHA: f64 = 1.6732632423543772;
pub const SELU_LAMBDA: f64 = 1.0507009873554805;

pub fn selu<T: Real>(x: T) -> T {
    let lambda = T::of(SELU_LAMBDA);
    if x >= T::zero() {
        lambda * x
    } else {
        lambda * T::of(SELU_ALPHA) * (x.exp() - T::one())
    }
}

pub fn selu_derivative<T: Real>(x: T) -> T {
    let lambda = T::of(SELU_LAMBDA);
    if x >= T::zero() {
        lambda
    } else {
        lambda * T::of(SELU_ALPHA) * x.exp()
    }
}

/// `selu(Re z) + i selu(Im z)`.
pub fn selu_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(selu(z.re), selu(z.im))
}

/// Fully connected layer `z = W a + b`, `W` row-major `n_out x n_in`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer<S> {
    pub n_in: usize,
    pub n_out: usize,
    pub w: Vec<S>,
    pub b: Vec<S>,
}

impl<T: Real> DenseLayer<Complex<T>> {
    /// Complex Gaussian weights with `E|w|^2 = 1/n_in`, zero bias.
    pub fn random_complex(n_in: usize, n_out: usize, rng: &mut CounterRng) -> Self {
        let var = 1.0 / n_in.max(1) as f64;
        let w = (0..n_in * n_out).map(|_| c64::<T>(rng.complex_gaussian(var))).collect();
        DenseLayer { n_in, n_out, w, b: vec![cr(T::zero()); n_out] }
    }

    pub fn forward(&self, a: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n_out)
            .map(|i| {
                let row = &self.w[i * self.n_in..(i + 1) * self.n_in];
                row.iter().zip(a).fold(self.b[i], |acc, (w, x)| acc + *w * *x)
            })
            .collect()
    }
}

impl<T: Real> DenseLayer<T> {
    /// Real Gaussian weights with variance `1/n_in`, zero bias.
    pub fn random_real(n_in: usize, n_out: usize, rng: &mut CounterRng) -> Self {
        let sd = (1.0 / n_in.max(1) as f64).sqrt();
        let w = (0..n_in * n_out).map(|_| T::of(rng.normal() * sd)).collect();
        DenseLayer { n_in, n_out, w, b: vec![T::zero(); n_out] }
    }

    pub fn forward(&self, a: &[T]) -> Vec<T> {
        (0..self.n_out)
            .map(|i| {
                let row = &self.w[i * self.n_in..(i + 1) * self.n_in];
                row.iter().zip(a).fold(self.b[i], |acc, (w, x)| acc + *w * *x)
            })
            .collect()
    }
}

impl<S> DenseLayer<S> {
    pub fn scalar_count(&self) -> usize {
        self.w.len() + self.b.len()
    }
}

/// Multilayer perceptron for one hidden determinant row: `depth` selu hidden
/// layers followed by an output layer whose affine result is exponentiated.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpParams<T: Real> {
    pub layers: Vec<DenseLayer<Complex<T>>>,
}

/// Intermediate values kept for the backward pass.
pub(crate) struct MlpTrace<T: Real> {
    /// Input of each layer.
    pub inputs: Vec<Vec<Complex<T>>>,
    /// Pre-activation of each layer.
    pub pre: Vec<Vec<Complex<T>>>,
    pub output: Vec<Complex<T>>,
}

impl<T: Real> MlpParams<T> {
    /// Widths follow the hidden-row rule: the first `ceil(depth/2)` hidden layers
    /// have the input width, the rest the input width plus `extra`.
    pub fn widths(n_in: usize, extra: usize, depth: usize, n_out: usize) -> Vec<usize> {
        let mut w = vec![n_in];
        for h in 0..depth {
            w.push(if h < depth.div_ceil(2) { n_in } else { n_in + extra });
        }
        w.push(n_out);
        w
    }

    pub fn random(widths: &[usize], rng: &mut CounterRng) -> Self {
        let layers = widths.windows(2).map(|w| DenseLayer::random_complex(w[0], w[1], rng)).collect();
        MlpParams { layers }
    }

    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn scalar_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::scalar_count).sum()
    }

    pub(crate) fn forward(&self, input: Vec<Complex<T>>) -> MlpTrace<T> {
        let last = self.layers.len() - 1;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut a = input;
        let mut output = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&a);
            let next: Vec<Complex<T>> =
                if l == last { z.iter().map(|x| x.exp()).collect() } else { z.iter().map(|x| selu_complex(*x)).collect() };
            inputs.push(std::mem::replace(&mut a, next));
            pre.push(z);
            if l == last {
                output = a.clone();
            }
        }
        MlpTrace { inputs, pre, output }
    }

    /// Backpropagate `g_out[i] = dL/dRe(out_i) + i dL/dIm(out_i)` and add the
    /// same representation of the parameter gradient into `grad`, laid out as
    /// the flattened layers (weights then biases, real and imaginary parts interleaved).
    pub(crate) fn backward(&self, trace: &MlpTrace<T>, g_out: &[Complex<T>], grad: &mut [T]) {
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut off = 0;
        for layer in &self.layers {
            offsets.push(off);
            off += 2 * layer.scalar_count();
        }
        // through exp: holomorphic, so G_z = G_out * conj(exp(z))
        let mut gz: Vec<Complex<T>> = g_out.iter().zip(&trace.output).map(|(g, o)| *g * o.conj()).collect();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let a = &trace.inputs[l];
            let base = offsets[l];
            for i in 0..layer.n_out {
                let g = gz[i];
                for j in 0..layer.n_in {
                    let d = g * a[j].conj();
                    let k = base + 2 * (i * layer.n_in + j);
                    grad[k] += d.re;
                    grad[k + 1] += d.im;
                }
                let k = base + 2 * (layer.w.len() + i);
                grad[k] += g.re;
                grad[k + 1] += g.im;
            }
            if l == 0 {
                break;
            }
            let z_prev = &trace.pre[l - 1];
            let mut next = vec![cr(T::zero()); layer.n_in];
            for (j, out) in next.iter_mut().enumerate() {
                let mut ga = cr(T::zero());
                for (i, g) in gz.iter().enumerate() {
                    ga += layer.w[i * layer.n_in + j].conj() * *g;
                }
                // selu acts on real and imaginary parts separately
                *out = Complex::new(ga.re * selu_derivative(z_prev[j].re), ga.im * selu_derivative(z_prev[j].im));
            }
            gz = next;
        }
    }

    pub(crate) fn flatten_into(&self, out: &mut Vec<T>) {
        for layer in &self.layers {
            super::flatten_complex(&layer.w, out);
            super::flatten_complex(&layer.b, out);
        }
    }

    pub(crate) fn load_from(&mut self, src: &[T]) -> usize {
        let mut off = 0;
        for layer in &mut self.layers {
            off += super::unflatten_complex(&src[off..], &mut layer.w);
            off += super::unflatten_complex(&src[off..], &mut layer.b);
        }
        off
    }
}
