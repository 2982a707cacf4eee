//! Hidden-fermion determinant state.
//!
//! The amplitude is the determinant of an `(N+M) x (N+M)` matrix. Its first `N`
//! rows are the rows of `[Phi_v Chi_v]` at the occupied modes; each of the `M`
//! remaining rows is produced by its own MLP acting on the `±1` occupation
//! vector. Hidden MLP layers use [`selu_complex`](super::selu_complex), the
//! output layer an elementwise `exp`.
//!
//! Parameter count: with `K` modes and `L = N + M`, the visible block holds
//! `K * L` complex numbers and each hidden row `sum_l (w_l + 1) * w_{l+1}`
//! over its layer widths `w_0 = K, ..., w_{D+1} = L`. For `D = 0` the total is
//! `L * (K + M * (K + 1))` complex, twice that in real degrees of freedom.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::lu::SquareMatrix;
use super::mlp::{MlpParams, MlpTrace};
use super::{
    det_cofactors, det_cotangent, determinant, flatten_complex, loss_seeds, noisy_orbitals, occupied_modes, unflatten_complex, Ansatz,
    ParamBlock,
};
use crate::error::Result;
use crate::fock::{occupation_vector, Config};
use crate::rng::CounterRng;
use crate::scalar::{cr, Real};

/// Standard deviation of the noise added to the initial orbitals.
pub const INIT_NOISE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HfdsLayout {
    pub n_modes: usize,
    /// Visible particles `N`.
    pub n_particles: usize,
    /// Hidden particles `M`.
    pub hidden: usize,
    /// Hidden layers per row MLP.
    pub depth: usize,
}

impl HfdsLayout {
    pub fn size(&self) -> usize {
        self.n_particles + self.hidden
    }

    pub fn row_widths(&self) -> Vec<usize> {
        MlpParams::<f64>::widths(self.n_modes, self.hidden, self.depth, self.size())
    }

    /// Complex scalars in the whole state.
    pub fn complex_count(&self) -> usize {
        let row: usize = self.row_widths().windows(2).map(|w| (w[0] + 1) * w[1]).sum();
        self.n_modes * self.size() + self.hidden * row
    }

    pub fn num_params(&self) -> usize {
        2 * self.complex_count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HfdsState<T: Real> {
    pub layout: HfdsLayout,
    /// Row-major `modes x N`.
    pub phi_v: Vec<Complex<T>>,
    /// Row-major `modes x M`.
    pub chi_v: Vec<Complex<T>>,
    pub rows: Vec<MlpParams<T>>,
}

impl<T: Real> HfdsState<T> {
    /// Random initialization: `Phi_v` is `orbitals` (if given) plus small noise,
    /// `Chi_v` pure small noise, MLP weights complex Gaussian with variance
    /// `1/fan_in` and zero biases.
    pub fn init(layout: HfdsLayout, orbitals: Option<&[Complex<f64>]>, seed: u64) -> Self {
        let k = layout.n_modes;
        let mut rng = CounterRng::stream(seed, "hfds-visible");
        let phi_v = noisy_orbitals(k, layout.n_particles, orbitals, INIT_NOISE, &mut rng);
        let chi_v = noisy_orbitals(k, layout.hidden, None, INIT_NOISE, &mut rng);
        let widths = layout.row_widths();
        let rows = (0..layout.hidden)
            .map(|h| MlpParams::random(&widths, &mut CounterRng::stream(seed, &format!("hfds-row-{h}"))))
            .collect();
        HfdsState { layout, phi_v, chi_v, rows }
    }

    fn row_offset(&self, h: usize) -> usize {
        let visible = 2 * self.layout.n_modes * self.layout.size();
        visible + self.rows[..h].iter().map(|r| 2 * r.scalar_count()).sum::<usize>()
    }

    fn assemble(&self, occ: &[usize], n: Config) -> (SquareMatrix<T>, Vec<MlpTrace<T>>) {
        let (np, m) = (self.layout.n_particles, self.layout.hidden);
        let size = np + m;
        let mut a = SquareMatrix::zeros(size);
        for (r, &mode) in occ.iter().enumerate() {
            a.data[r * size..r * size + np].copy_from_slice(&self.phi_v[mode * np..(mode + 1) * np]);
            a.data[r * size + np..(r + 1) * size].copy_from_slice(&self.chi_v[mode * m..(mode + 1) * m]);
        }
        let traces: Vec<MlpTrace<T>> = if m == 0 {
            Vec::new()
        } else {
            let input: Vec<Complex<T>> = occupation_vector::<T>(n, self.layout.n_modes).into_iter().map(cr).collect();
            self.rows.iter().map(|row| row.forward(input.clone())).collect()
        };
        for (h, t) in traces.iter().enumerate() {
            a.data[(np + h) * size..(np + h + 1) * size].copy_from_slice(&t.output);
        }
        (a, traces)
    }
}

impl<T: Real> Ansatz<T> for HfdsState<T> {
    fn name(&self) -> &'static str {
        "hfds"
    }

    fn num_params(&self) -> usize {
        self.layout.num_params()
    }

    fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.num_params());
        flatten_complex(&self.phi_v, &mut out);
        flatten_complex(&self.chi_v, &mut out);
        for row in &self.rows {
            row.flatten_into(&mut out);
        }
        out
    }

    fn set_params(&mut self, p: &[T]) {
        let mut off = unflatten_complex(p, &mut self.phi_v);
        off += unflatten_complex(&p[off..], &mut self.chi_v);
        for row in &mut self.rows {
            off += row.load_from(&p[off..]);
        }
    }

    fn blocks(&self) -> Vec<ParamBlock> {
        let l = &self.layout;
        let mut out =
            vec![ParamBlock::new("phi_v", &[l.n_modes, l.n_particles], true), ParamBlock::new("chi_v", &[l.n_modes, l.hidden], true)];
        for (h, row) in self.rows.iter().enumerate() {
            for (i, layer) in row.layers.iter().enumerate() {
                out.push(ParamBlock::new(&format!("row{h}.w{i}"), &[layer.n_out, layer.n_in], true));
                out.push(ParamBlock::new(&format!("row{h}.b{i}"), &[layer.n_out], true));
            }
        }
        out
    }

    fn amplitude(&self, n: Config, _index: usize) -> Complex<T> {
        let occ = occupied_modes(n, self.layout.n_particles);
        determinant(&self.assemble(&occ, n).0)
    }

    fn accumulate_gradient(&self, n: Config, _index: usize, seed: Complex<T>, grad: &mut [T], regularize: bool) -> Result<bool> {
        let occ = occupied_modes(n, self.layout.n_particles);
        let (a, traces) = self.assemble(&occ, n);
        let (g, ridged) = det_cotangent(a, seed, regularize)?;
        self.scatter(&occ, &traces, &g, grad);
        Ok(ridged)
    }

    fn accumulate_loss_terms(
        &self,
        n: Config,
        _index: usize,
        t: Complex<T>,
        out: [&mut [T]; 3],
        regularize: bool,
    ) -> Result<(Complex<T>, bool)> {
        let occ = occupied_modes(n, self.layout.n_particles);
        let (a, traces) = self.assemble(&occ, n);
        let (cof, psi, ridged) = det_cofactors(a, regularize)?;
        let mut g = cof.clone();
        for (seed, grad) in loss_seeds(t, psi).into_iter().zip(out) {
            for (x, c) in g.data.iter_mut().zip(&cof.data) {
                *x = *c * seed;
            }
            self.scatter(&occ, &traces, &g, grad);
        }
        Ok((psi, ridged))
    }
}

impl<T: Real> HfdsState<T> {
    /// Route a cotangent of the determinant matrix to the parameters.
    fn scatter(&self, occ: &[usize], traces: &[MlpTrace<T>], g: &SquareMatrix<T>, grad: &mut [T]) {
        let (np, m) = (self.layout.n_particles, self.layout.hidden);
        let size = np + m;
        let chi_base = 2 * self.layout.n_modes * np;
        for (r, &mode) in occ.iter().enumerate() {
            for c in 0..np {
                let v = g.at(r, c);
                let k = 2 * (mode * np + c);
                grad[k] += v.re;
                grad[k + 1] += v.im;
            }
            for c in 0..m {
                let v = g.at(r, np + c);
                let k = chi_base + 2 * (mode * m + c);
                grad[k] += v.re;
                grad[k + 1] += v.im;
            }
        }
        for (h, (row, trace)) in self.rows.iter().zip(traces).enumerate() {
            let off = self.row_offset(h);
            let g_out = &g.data[(np + h) * size..(np + h + 1) * size];
            row.backward(trace, g_out, &mut grad[off..off + 2 * row.scalar_count()]);
        }
    }
}
