use num_complex::Complex;

use super::{det_cotangent, determinant, flatten_complex, occupied_modes, slater_matrix, unflatten_complex, Ansatz, ParamBlock};
use crate::error::Result;
use crate::fock::Config;
use crate::scalar::Real;

/// Slater determinant times `exp(-sum_i lambda_i n_i_up n_i_down)` on a spinful lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct GutzwillerState<T: Real> {
    pub n_sites: usize,
    pub n_particles: usize,
    /// Row-major `2 N_S x N`.
    pub phi: Vec<Complex<T>>,
    pub lambda: Vec<T>,
}

impl<T: Real> GutzwillerState<T> {
    pub fn new(n_sites: usize, n_particles: usize, phi: Vec<Complex<T>>) -> Self {
        assert_eq!(phi.len(), 2 * n_sites * n_particles);
        GutzwillerState { n_sites, n_particles, phi, lambda: vec![T::zero(); n_sites] }
    }

    fn weight(&self, n: Config) -> T {
        let mut e = T::zero();
        for (i, l) in self.lambda.iter().enumerate() {
            if n.occupied(i) && n.occupied(self.n_sites + i) {
                e += *l;
            }
        }
        (-e).exp()
    }
}

impl<T: Real> Ansatz<T> for GutzwillerState<T> {
    fn name(&self) -> &'static str {
        "gutzwiller"
    }

    fn num_params(&self) -> usize {
        2 * self.phi.len() + self.n_sites
    }

    fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.num_params());
        flatten_complex(&self.phi, &mut out);
        out.extend_from_slice(&self.lambda);
        out
    }

    fn set_params(&mut self, p: &[T]) {
        let off = unflatten_complex(p, &mut self.phi);
        self.lambda.copy_from_slice(&p[off..off + self.n_sites]);
    }

    fn blocks(&self) -> Vec<ParamBlock> {
        vec![
            ParamBlock::new("phi", &[2 * self.n_sites, self.n_particles], true),
            ParamBlock::new("lambda", &[self.n_sites], false),
        ]
    }

    fn amplitude(&self, n: Config, _index: usize) -> Complex<T> {
        let occ = occupied_modes(n, self.n_particles);
        determinant(&slater_matrix(&self.phi, self.n_particles, &occ)) * self.weight(n)
    }

    fn accumulate_gradient(&self, n: Config, _index: usize, seed: Complex<T>, grad: &mut [T], regularize: bool) -> Result<bool> {
        let np = self.n_particles;
        let occ = occupied_modes(n, np);
        let w = self.weight(n);
        let a = slater_matrix(&self.phi, np, &occ);
        let psi = determinant(&a) * w;
        let (g, ridged) = det_cotangent(a, seed * w, regularize)?;
        for (r, &m) in occ.iter().enumerate() {
            for c in 0..np {
                let k = 2 * (m * np + c);
                let v = g.at(r, c);
                grad[k] += v.re;
                grad[k + 1] += v.im;
            }
        }
        let dl = (seed.conj() * psi).re;
        let base = 2 * self.phi.len();
        for i in 0..self.n_sites {
            if n.occupied(i) && n.occupied(self.n_sites + i) {
                grad[base + i] -= dl;
            }
        }
        Ok(ridged)
    }
}
