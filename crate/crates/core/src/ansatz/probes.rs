//! Probe states that fix either the magnitude or the phase of every amplitude
//! to the exact ground state and train only the other half.

use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex;

use super::lu::Lu;
use super::mlp::{selu, selu_derivative, DenseLayer};
use super::{flatten_complex, occupied_modes, slater_matrix, unflatten_complex, Ansatz, ParamBlock, DET_FLOOR};
use crate::error::Result;
use crate::fock::{occupation_vector, Config};
use crate::rng::CounterRng;
use crate::scalar::{cr, Real};

/// `psi(n) = |target_n| * phi(n) / |phi(n)|` with `phi` a trainable Slater determinant.
#[derive(Debug)]
pub struct PhaseProbeState<T: Real> {
    pub n_modes: usize,
    pub n_particles: usize,
    /// Row-major `modes x N`.
    pub phi: Vec<Complex<T>>,
    /// Fixed magnitudes indexed like the sector basis.
    pub magnitudes: Vec<T>,
    zero_phase_events: AtomicU64,
}

impl<T: Real> Clone for PhaseProbeState<T> {
    fn clone(&self) -> Self {
        PhaseProbeState {
            n_modes: self.n_modes,
            n_particles: self.n_particles,
            phi: self.phi.clone(),
            magnitudes: self.magnitudes.clone(),
            zero_phase_events: AtomicU64::new(self.zero_phase_events.load(Ordering::Relaxed)),
        }
    }
}

impl<T: Real> PhaseProbeState<T> {
    pub fn new(n_modes: usize, n_particles: usize, phi: Vec<Complex<T>>, target: &[Complex<T>]) -> Self {
        assert_eq!(phi.len(), n_modes * n_particles);
        PhaseProbeState {
            n_modes,
            n_particles,
            phi,
            magnitudes: target.iter().map(|z| z.norm()).collect(),
            zero_phase_events: AtomicU64::new(0),
        }
    }

    /// How often an exactly vanishing determinant forced the phase to one.
    pub fn zero_phase_events(&self) -> u64 {
        self.zero_phase_events.load(Ordering::Relaxed)
    }

    fn slater(&self, n: Config) -> (Lu<T>, Complex<T>) {
        let occ = occupied_modes(n, self.n_particles);
        let lu = Lu::factor(&slater_matrix(&self.phi, self.n_particles, &occ));
        let det = lu.det();
        (lu, det)
    }
}

impl<T: Real> Ansatz<T> for PhaseProbeState<T> {
    fn name(&self) -> &'static str {
        "phase-probe"
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

    fn amplitude(&self, n: Config, index: usize) -> Complex<T> {
        let (_, det) = self.slater(n);
        let r = det.norm();
        if r == T::zero() {
            self.zero_phase_events.fetch_add(1, Ordering::Relaxed);
            log::debug!("phase probe: vanishing determinant at {:#x}, phase set to one", n.0);
            return cr(self.magnitudes[index]);
        }
        det * (self.magnitudes[index] / r)
    }

    fn accumulate_gradient(&self, n: Config, index: usize, seed: Complex<T>, grad: &mut [T], _regularize: bool) -> Result<bool> {
        let (lu, det) = self.slater(n);
        if lu.is_singular() || det.norm() <= T::of(DET_FLOOR) {
            // the phase is locally constant by convention at a vanishing determinant
            return Ok(false);
        }
        let psi = det * (self.magnitudes[index] / det.norm());
        // d Re(conj(s) psi) = kappa * d arg(phi), d arg(phi) = Im(sum_rc inv[c][r] dA[r][c])
        let kappa = -(seed.conj() * psi).im;
        let inv = lu.inverse();
        let np = self.n_particles;
        for (r, &m) in n.modes().collect::<Vec<_>>().iter().enumerate() {
            for c in 0..np {
                let g = inv.at(c, r);
                let k = 2 * (m * np + c);
                grad[k] += kappa * g.im;
                grad[k + 1] += kappa * g.re;
            }
        }
        Ok(false)
    }
}

/// `psi(n) = exp(f(n)) * phase_n` with `f` a real MLP on the occupation vector
/// and `phase_n` fixed to the exact ground-state phase.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeProbeState<T: Real> {
    pub n_modes: usize,
    pub layers: Vec<DenseLayer<T>>,
    pub phases: Vec<Complex<T>>,
}

impl<T: Real> AmplitudeProbeState<T> {
    /// `depth` selu hidden layers of `width` neurons and a scalar output.
    pub fn init(n_modes: usize, width: usize, depth: usize, target: &[Complex<T>], seed: u64) -> Self {
        let mut rng = CounterRng::stream(seed, "amplitude-probe");
        let mut widths = vec![n_modes];
        widths.extend(std::iter::repeat_n(width, depth));
        widths.push(1);
        let layers = widths.windows(2).map(|w| DenseLayer::random_real(w[0], w[1], &mut rng)).collect();
        let phases = target.iter().map(|z| if z.norm() > T::zero() { *z / z.norm() } else { cr(T::one()) }).collect();
        AmplitudeProbeState { n_modes, layers, phases }
    }

    /// Default hidden width: four neurons per site.
    pub fn default_width(n_sites: usize) -> usize {
        4 * n_sites
    }

    fn forward(&self, n: Config) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut a: Vec<T> = occupation_vector(n, self.n_modes);
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&a);
            let next = if l == last { z.clone() } else { z.iter().map(|x| selu(*x)).collect() };
            inputs.push(std::mem::replace(&mut a, next));
            pre.push(z);
        }
        (inputs, pre)
    }
}

impl<T: Real> Ansatz<T> for AmplitudeProbeState<T> {
    fn name(&self) -> &'static str {
        "amplitude-probe"
    }

    fn num_params(&self) -> usize {
        self.layers.iter().map(DenseLayer::scalar_count).sum()
    }

    fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            out.extend_from_slice(&l.w);
            out.extend_from_slice(&l.b);
        }
        out
    }

    fn set_params(&mut self, p: &[T]) {
        let mut off = 0;
        for l in &mut self.layers {
            let nw = l.w.len();
            l.w.copy_from_slice(&p[off..off + nw]);
            off += nw;
            let nb = l.b.len();
            l.b.copy_from_slice(&p[off..off + nb]);
            off += nb;
        }
    }

    fn blocks(&self) -> Vec<ParamBlock> {
        let mut out = Vec::new();
        for (i, l) in self.layers.iter().enumerate() {
            out.push(ParamBlock::new(&format!("w{i}"), &[l.n_out, l.n_in], false));
            out.push(ParamBlock::new(&format!("b{i}"), &[l.n_out], false));
        }
        out
    }

    fn amplitude(&self, n: Config, index: usize) -> Complex<T> {
        let (_, pre) = self.forward(n);
        self.phases[index] * pre.last().expect("output layer")[0].exp()
    }

    fn accumulate_gradient(&self, n: Config, index: usize, seed: Complex<T>, grad: &mut [T], _regularize: bool) -> Result<bool> {
        let (inputs, pre) = self.forward(n);
        let psi = self.phases[index] * pre.last().expect("output layer")[0].exp();
        let mut gz = vec![(seed.conj() * psi).re];
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut off = 0;
        for l in &self.layers {
            offsets.push(off);
            off += l.scalar_count();
        }
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let a = &inputs[l];
            for (i, g) in gz.iter().enumerate() {
                for (j, x) in a.iter().enumerate() {
                    grad[offsets[l] + i * layer.n_in + j] += *g * *x;
                }
                grad[offsets[l] + layer.w.len() + i] += *g;
            }
            if l == 0 {
                break;
            }
            gz = (0..layer.n_in)
                .map(|j| {
                    let back: T = gz.iter().enumerate().map(|(i, g)| layer.w[i * layer.n_in + j] * *g).sum();
                    back * selu_derivative(pre[l - 1][j])
                })
                .collect();
        }
        Ok(false)
    }
}
