use num_complex::Complex;

use super::{det_cotangent, determinant, flatten_complex, occupied_modes, slater_matrix, unflatten_complex, Ansatz, ParamBlock};
use crate::error::Result;
use crate::fock::Config;
use crate::scalar::Real;

/// Single Slater determinant on a `modes x N` orbital matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SlaterState<T: Real> {
    pub n_modes: usize,
    pub n_particles: usize,
    /// Row-major `modes x N`.
    pub phi: Vec<Complex<T>>,
}

impl<T: Real> SlaterState<T> {
    pub fn new(n_modes: usize, n_particles: usize, phi: Vec<Complex<T>>) -> Self {
        assert_eq!(phi.len(), n_modes * n_particles);
        SlaterState { n_modes, n_particles, phi }
    }
}

impl<T: Real> Ansatz<T> for SlaterState<T> {
    fn name(&self) -> &'static str {
        "slater"
    }

    fn num_params(&self) -> usize {
        2 * self.phi.len()
    }

    fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.num_params());
        flatten_complex(&self.phi, &mut out);
        out
    }

    fn set_params(&mut self, p: &[T]) {
        unflatten_complex(p, &mut self.phi);
    }

    fn blocks(&self) -> Vec<ParamBlock> {
        vec![ParamBlock::new("phi", &[self.n_modes, self.n_particles], true)]
    }

    fn amplitude(&self, n: Config, _index: usize) -> Complex<T> {
        let occ = occupied_modes(n, self.n_particles);
        determinant(&slater_matrix(&self.phi, self.n_particles, &occ))
    }

    fn accumulate_gradient(&self, n: Config, _index: usize, seed: Complex<T>, grad: &mut [T], regularize: bool) -> Result<bool> {
        let np = self.n_particles;
        let occ = occupied_modes(n, np);
        let (g, ridged) = det_cotangent(slater_matrix(&self.phi, np, &occ), seed, regularize)?;
        for (r, &m) in occ.iter().enumerate() {
            for c in 0..np {
                let k = 2 * (m * np + c);
                let v = g.at(r, c);
                grad[k] += v.re;
                grad[k + 1] += v.im;
            }
        }
        Ok(ridged)
    }
}
