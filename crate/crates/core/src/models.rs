//! Random fermionic Hamiltonians.
//!
//! Six models are supported, all built from one seeded [`CouplingDraw`]:
//!
//! | kind      | Hamiltonian |
//! |-----------|-------------|
//! | `syk`     | `J/sqrt(2N) sum_ij J2_ij c+_i c_j + U/sqrt(2N)^3 sum_ijkl J4_ijkl c+_i c+_j c_l c_k` (spinless) |
//! | `hubbard` | `J/sqrt(N) sum_ij,s J2_ij c+_is c_js + U sum_i n_iu n_id` |
//! | `density` | `J/sqrt(N) sum_{i<=j},s t_ij c+_is c_js + h.c. + U/(4 sqrt(N)) sum_{i<=j} sum_ss' v_ij n_is n_js' + h.c.` |
//! | `pair`    | same hopping `+ U/sqrt(N) sum_{i<=j} v_ij c+_iu c+_id c_jd c_ju + h.c.` |
//! | `spin`    | same hopping `+ U/sqrt(N) sum_{i<=j} v_ij c+_iu c_id c+_jd c_ju + h.c.` |
//! | `syk1d`   | `J/2 sum_{|i-j|<=1} J2_ij c+_i c_j + U/sqrt(8)^3 sum_{S4} J4_ijkl c+_i c+_j c_l c_k`, open chain |
//!
//! `N` is the number of sites. In `syk1d` the quartic sum runs over index
//! quadruples whose largest and smallest index differ by at most four.
//! Every `+ h.c.` conjugates the whole preceding sum, diagonal `i = j`
//! pieces included.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{apply_string, Filling, Op, SectorBasis, SectorKind};
use crate::rng::CounterRng;
use crate::scalar::{c64, Real};
use crate::sparse::CsrMatrix;

type C64 = Complex<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Syk,
    Hubbard,
    Density,
    Pair,
    Spin,
    Syk1d,
}

impl ModelKind {
    pub const SPINFUL: [ModelKind; 4] = [ModelKind::Hubbard, ModelKind::Density, ModelKind::Pair, ModelKind::Spin];
    pub const MAIN: [ModelKind; 5] =
        [ModelKind::Syk, ModelKind::Hubbard, ModelKind::Density, ModelKind::Pair, ModelKind::Spin];

    pub fn sector_kind(self) -> SectorKind {
        match self {
            ModelKind::Syk | ModelKind::Syk1d => SectorKind::Spinless,
            _ => SectorKind::Spinful,
        }
    }

    pub fn default_j(self) -> f64 {
        match self {
            ModelKind::Syk => 0.0,
            _ => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Syk => "syk",
            ModelKind::Hubbard => "hubbard",
            ModelKind::Density => "density",
            ModelKind::Pair => "pair",
            ModelKind::Spin => "spin",
            ModelKind::Syk1d => "syk1d",
        }
    }

    fn has_quartic_tensor(self) -> bool {
        matches!(self, ModelKind::Syk | ModelKind::Syk1d)
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "syk" => Ok(ModelKind::Syk),
            "hubbard" => Ok(ModelKind::Hubbard),
            "density" => Ok(ModelKind::Density),
            "pair" => Ok(ModelKind::Pair),
            "spin" => Ok(ModelKind::Spin),
            "syk1d" => Ok(ModelKind::Syk1d),
            other => Err(Error::Domain(format!("unknown model '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n_sites: usize,
    pub j: f64,
    pub u: f64,
    pub seed: u64,
}

impl ModelSpec {
    /// Spec with the model's default kinetic scale.
    pub fn new(kind: ModelKind, n_sites: usize, u: f64, seed: u64) -> Self {
        ModelSpec { kind, n_sites, j: kind.default_j(), u, seed }
    }

    pub fn with_j(mut self, j: f64) -> Self {
        self.j = j;
        self
    }

    pub fn half_filling(&self) -> Filling {
        Filling::half(self.kind.sector_kind(), self.n_sites)
    }

    pub fn half_filled_basis(&self) -> Result<SectorBasis> {
        SectorBasis::enumerate(self.n_sites, self.half_filling())
    }
}

/// One realization of every random coupling a model may use.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingDraw {
    pub seed: u64,
    pub n_sites: usize,
    /// Row-major `n x n`, entries `N(0,1) + i N(0,1)`.
    pub t: Vec<C64>,
    pub v: Vec<C64>,
    /// Hermitian `n x n` with unit-variance entries.
    pub j2: Vec<C64>,
    /// `n^4` antisymmetric tensor, index `((i*n + j)*n + k)*n + l`; SYK variants only.
    pub j4: Option<Vec<C64>>,
}

impl CouplingDraw {
    pub fn j4_at(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        let n = self.n_sites;
        self.j4.as_ref().map_or(C64::new(0.0, 0.0), |t| t[((i * n + j) * n + k) * n + l])
    }
}

pub fn draw_couplings(spec: &ModelSpec) -> CouplingDraw {
    let n = spec.n_sites;
    let mut rt = CounterRng::stream(spec.seed, "t");
    let t = (0..n * n).map(|_| rt.complex_normal()).collect();
    let mut rv = CounterRng::stream(spec.seed, "v");
    let v = (0..n * n).map(|_| rv.complex_normal()).collect();

    let mut r2 = CounterRng::stream(spec.seed, "j2");
    let mut j2 = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let x = if i == j { C64::new(r2.normal(), 0.0) } else { r2.complex_gaussian(1.0) };
            j2[i * n + j] = x;
            j2[j * n + i] = x.conj();
        }
    }

    let j4 = spec.kind.has_quartic_tensor().then(|| {
        let mut r4 = CounterRng::stream(spec.seed, "j4");
        let mut j4 = vec![C64::new(0.0, 0.0); n * n * n * n];
        let at = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    for l in k + 1..n {
                        if (i, j) > (k, l) {
                            continue;
                        }
                        let x = if (i, j) == (k, l) { C64::new(r4.normal(), 0.0) } else { r4.complex_gaussian(1.0) };
                        j4[at(i, j, k, l)] = x;
                        j4[at(i, j, l, k)] = -x;
                        j4[at(j, i, k, l)] = -x;
                        j4[at(j, i, l, k)] = x;
                        j4[at(k, l, i, j)] = x.conj();
                        j4[at(l, k, i, j)] = -x.conj();
                        j4[at(k, l, j, i)] = -x.conj();
                        j4[at(l, k, j, i)] = x.conj();
                    }
                }
            }
        }
        j4
    });

    CouplingDraw { seed: spec.seed, n_sites: n, t, v, j2, j4 }
}

/// `coef * ops`, with ops written left to right.
#[derive(Clone, Debug)]
pub struct Term {
    pub coef: C64,
    pub ops: Vec<(Op, usize)>,
}

impl Term {
    fn adjoint(&self) -> Term {
        let ops = self
            .ops
            .iter()
            .rev()
            .map(|&(op, m)| (if op == Op::Create { Op::Annihilate } else { Op::Create }, m))
            .collect();
        Term { coef: self.coef.conj(), ops }
    }
}

fn with_adjoints(terms: Vec<Term>) -> Vec<Term> {
    let adj: Vec<Term> = terms.iter().map(Term::adjoint).collect();
    terms.into_iter().chain(adj).collect()
}

/// Per-spin single-particle matrix `h` with `H_kin = sum_ij,s h_ij c+_is c_js`, row-major `n x n`.
pub fn one_body_matrix(spec: &ModelSpec, draw: &CouplingDraw) -> Vec<C64> {
    let n = spec.n_sites;
    let nf = n as f64;
    let mut h = vec![C64::new(0.0, 0.0); n * n];
    match spec.kind {
        ModelKind::Syk | ModelKind::Hubbard => {
            let pref = if spec.kind == ModelKind::Syk { spec.j / (2.0 * nf).sqrt() } else { spec.j / nf.sqrt() };
            for (hij, &x) in h.iter_mut().zip(&draw.j2) {
                *hij = x * pref;
            }
        }
        ModelKind::Syk1d => {
            for i in 0..n {
                for j in 0..n {
                    if i.abs_diff(j) <= 1 {
                        h[i * n + j] = draw.j2[i * n + j] * (spec.j / 2.0);
                    }
                }
            }
        }
        ModelKind::Density | ModelKind::Pair | ModelKind::Spin => {
            let pref = spec.j / nf.sqrt();
            for i in 0..n {
                for j in i..n {
                    let x = draw.t[i * n + j] * pref;
                    h[i * n + j] += x;
                    h[j * n + i] += x.conj();
                }
            }
        }
    }
    h
}

/// Operator terms of the model, `+ h.c.` parts expanded.
pub fn hamiltonian_terms(spec: &ModelSpec, draw: &CouplingDraw) -> Vec<Term> {
    let n = spec.n_sites;
    let nf = n as f64;
    let (c, a) = (Op::Create, Op::Annihilate);
    let up = |i: usize| i;
    let dn = |i: usize| n + i;
    let mut terms = Vec::new();

    match spec.kind {
        ModelKind::Syk | ModelKind::Syk1d => {
            let (p2, p4) = if spec.kind == ModelKind::Syk {
                (spec.j / (2.0 * nf).sqrt(), spec.u / (2.0 * nf).sqrt().powi(3))
            } else {
                (spec.j / 2.0, spec.u / 8f64.sqrt().powi(3))
            };
            let local = |idx: &[usize]| {
                spec.kind == ModelKind::Syk || idx.iter().max().unwrap() - idx.iter().min().unwrap() <= 4
            };
            if p2 != 0.0 {
                for i in 0..n {
                    for j in 0..n {
                        if spec.kind == ModelKind::Syk1d && i.abs_diff(j) > 1 {
                            continue;
                        }
                        terms.push(Term { coef: draw.j2[i * n + j] * p2, ops: vec![(c, i), (a, j)] });
                    }
                }
            }
            if p4 != 0.0 {
                // J4 antisymmetry folds the four orderings of (i,j) and (k,l) into i<j, k<l.
                for i in 0..n {
                    for j in i + 1..n {
                        for k in 0..n {
                            for l in k + 1..n {
                                if !local(&[i, j, k, l]) {
                                    continue;
                                }
                                terms.push(Term {
                                    coef: draw.j4_at(i, j, k, l) * (4.0 * p4),
                                    ops: vec![(c, i), (c, j), (a, l), (a, k)],
                                });
                            }
                        }
                    }
                }
            }
        }
        ModelKind::Hubbard => {
            let p = spec.j / nf.sqrt();
            if p != 0.0 {
                for off in [0, n] {
                    for i in 0..n {
                        for j in 0..n {
                            terms.push(Term { coef: draw.j2[i * n + j] * p, ops: vec![(c, off + i), (a, off + j)] });
                        }
                    }
                }
            }
            if spec.u != 0.0 {
                for i in 0..n {
                    terms.push(Term {
                        coef: C64::new(spec.u, 0.0),
                        ops: vec![(c, up(i)), (a, up(i)), (c, dn(i)), (a, dn(i))],
                    });
                }
            }
        }
        ModelKind::Density | ModelKind::Pair | ModelKind::Spin => {
            let p = spec.j / nf.sqrt();
            let mut kinetic = Vec::new();
            if p != 0.0 {
                for off in [0, n] {
                    for i in 0..n {
                        for j in i..n {
                            kinetic.push(Term { coef: draw.t[i * n + j] * p, ops: vec![(c, off + i), (a, off + j)] });
                        }
                    }
                }
            }
            terms.extend(with_adjoints(kinetic));
            let mut inter = Vec::new();
            if spec.u != 0.0 {
                for i in 0..n {
                    for j in i..n {
                        let v = draw.v[i * n + j];
                        match spec.kind {
                            ModelKind::Density => {
                                let coef = v * (spec.u / (4.0 * nf.sqrt()));
                                for oi in [0, n] {
                                    for oj in [0, n] {
                                        inter.push(Term {
                                            coef,
                                            ops: vec![(c, oi + i), (a, oi + i), (c, oj + j), (a, oj + j)],
                                        });
                                    }
                                }
                            }
                            ModelKind::Pair => inter.push(Term {
                                coef: v * (spec.u / nf.sqrt()),
                                ops: vec![(c, up(i)), (c, dn(i)), (a, dn(j)), (a, up(j))],
                            }),
                            ModelKind::Spin => inter.push(Term {
                                coef: v * (spec.u / nf.sqrt()),
                                ops: vec![(c, up(i)), (a, dn(i)), (c, dn(j)), (a, up(j))],
                            }),
                            _ => unreachable!(),
                        }
                    }
                }
            }
            terms.extend(with_adjoints(inter));
        }
    }
    terms
}

/// Sparse Hermitian operator on a sector basis.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix<T: Real> {
    pub spec: ModelSpec,
    pub basis: Arc<SectorBasis>,
    pub matrix: CsrMatrix<T>,
}

impl<T: Real> HamiltonianMatrix<T> {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

pub fn build_hamiltonian<T: Real>(spec: &ModelSpec, basis: Arc<SectorBasis>) -> Result<HamiltonianMatrix<T>> {
    let draw = draw_couplings(spec);
    build_hamiltonian_with(spec, basis, &draw)
}

/// Build from an explicit coupling draw (used to inject deterministic couplings).
pub fn build_hamiltonian_with<T: Real>(
    spec: &ModelSpec,
    basis: Arc<SectorBasis>,
    draw: &CouplingDraw,
) -> Result<HamiltonianMatrix<T>> {
    if basis.kind() != spec.kind.sector_kind() || basis.n_sites() != spec.n_sites {
        return Err(Error::Domain(format!(
            "{} model on {} sites needs a {:?} sector on {} sites",
            spec.kind.name(),
            spec.n_sites,
            spec.kind.sector_kind(),
            spec.n_sites
        )));
    }
    if draw.n_sites != spec.n_sites {
        return Err(Error::Domain("coupling draw has the wrong size".into()));
    }
    let terms = hamiltonian_terms(spec, draw);
    let mut triplets = Vec::new();
    for (col, &cfg) in basis.configs().iter().enumerate() {
        for term in &terms {
            if let Some((out, sign)) = apply_string(cfg, &term.ops) {
                let row = basis.index_of(out).expect("number-conserving term stays in the sector");
                triplets.push((row, col, c64::<T>(term.coef * f64::from(sign))));
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(basis.dim(), triplets);
    Ok(HamiltonianMatrix { spec: *spec, basis, matrix })
}

/// Lowest single-particle orbitals of the kinetic term as a `modes x N` matrix (column per particle).
///
/// A vanishing kinetic scale is replaced by one so the orbitals stay well defined.
pub fn free_orbitals(spec: &ModelSpec, draw: &CouplingDraw, filling: Filling) -> Vec<C64> {
    let mut s = *spec;
    if s.j == 0.0 {
        s.j = 1.0;
    }
    let n = spec.n_sites;
    let h = one_body_matrix(&s, draw);
    let (_, vecs) = f64::hermitian_eigh(n, &h, true);
    let vecs = vecs.expect("vectors requested");
    let modes = filling.kind().modes(n);
    let npart = filling.particles();
    let mut phi = vec![C64::new(0.0, 0.0); modes * npart];
    let mut col = 0;
    let blocks: Vec<(usize, usize)> = match filling {
        Filling::Spinless { n: k } => vec![(0, k)],
        Filling::Spinful { n_up, n_down } => vec![(0, n_up), (n, n_down)],
    };
    for (offset, count) in blocks {
        for k in 0..count {
            for i in 0..n {
                phi[(offset + i) * npart + col] = vecs[k * n + i];
            }
            col += 1;
        }
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Config;

    fn basis(spec: &ModelSpec) -> Arc<SectorBasis> {
        Arc::new(spec.half_filled_basis().unwrap())
    }

    #[test]
    fn draws_are_deterministic_and_constrained() {
        let spec = ModelSpec::new(ModelKind::Syk, 5, 1.0, 11);
        let a = draw_couplings(&spec);
        assert_eq!(a, draw_couplings(&spec));
        assert_ne!(a, draw_couplings(&ModelSpec { seed: 12, ..spec }));
        let n = 5;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(a.j2[i * n + j], a.j2[j * n + i].conj());
                for k in 0..n {
                    for l in 0..n {
                        let x = a.j4_at(i, j, k, l);
                        assert_eq!(x, -a.j4_at(i, j, l, k));
                        assert_eq!(x, -a.j4_at(j, i, k, l));
                        assert_eq!(x, a.j4_at(k, l, i, j).conj());
                    }
                }
            }
        }
        assert!(draw_couplings(&ModelSpec::new(ModelKind::Hubbard, 4, 1.0, 0)).j4.is_none());
    }

    #[test]
    fn unit_variance_of_j2() {
        let n = 4;
        let mut acc = 0.0;
        let draws = 10_000;
        for seed in 0..draws {
            let d = draw_couplings(&ModelSpec::new(ModelKind::Hubbard, n, 1.0, seed));
            acc += d.j2.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * n) as f64;
        }
        let mean = acc / draws as f64;
        assert!((mean - 1.0).abs() < 0.05, "mean |J2|^2 = {mean}");
    }

    #[test]
    fn every_model_is_hermitian_with_real_diagonal() {
        for kind in ModelKind::MAIN.into_iter().chain([ModelKind::Syk1d]) {
            let n = if kind.sector_kind() == SectorKind::Spinless { 8 } else { 4 };
            let spec = ModelSpec::new(kind, n, 1.3, 5).with_j(0.7);
            let h = build_hamiltonian::<f64>(&spec, basis(&spec)).unwrap();
            assert!(h.dim() <= 500);
            let dense = h.matrix.to_dense();
            let d = h.dim();
            for r in 0..d {
                assert!(dense[r * d + r].im.abs() < 1e-12, "{kind:?} complex diagonal");
                for c in 0..d {
                    assert!((dense[r * d + c] - dense[c * d + r].conj()).norm() < 1e-12, "{kind:?}");
                }
            }
        }
    }

    #[test]
    fn density_model_is_diagonal_without_hopping() {
        let spec = ModelSpec::new(ModelKind::Density, 4, 2.0, 3).with_j(0.0);
        let h = build_hamiltonian::<f64>(&spec, basis(&spec)).unwrap();
        assert!(h.matrix.is_diagonal());
    }

    #[test]
    fn pair_and_spin_conserve_double_occupancy_without_hopping() {
        for kind in [ModelKind::Pair, ModelKind::Spin] {
            let spec = ModelSpec::new(kind, 5, 1.0, 9).with_j(0.0);
            let b = basis(&spec);
            let h = build_hamiltonian::<f64>(&spec, b.clone()).unwrap();
            for r in 0..h.dim() {
                for (c, _) in h.matrix.row(r) {
                    assert_eq!(b.config(r).double_occupancy(5), b.config(c).double_occupancy(5));
                }
            }
        }
    }

    #[test]
    fn wrong_sector_is_a_domain_error() {
        let spec = ModelSpec::new(ModelKind::Hubbard, 4, 1.0, 0);
        let b = Arc::new(SectorBasis::enumerate(4, Filling::Spinless { n: 2 }).unwrap());
        assert!(build_hamiltonian::<f64>(&spec, b).is_err());
    }

    #[test]
    fn syk1d_quartic_range_is_local() {
        let spec = ModelSpec::new(ModelKind::Syk1d, 8, 1.0, 1).with_j(0.0);
        let terms = hamiltonian_terms(&spec, &draw_couplings(&spec));
        assert!(!terms.is_empty());
        for t in &terms {
            let idx: Vec<usize> = t.ops.iter().map(|o| o.1).collect();
            assert!(idx.iter().max().unwrap() - idx.iter().min().unwrap() <= 4);
        }
        let full = ModelSpec::new(ModelKind::Syk, 8, 1.0, 1);
        assert!(hamiltonian_terms(&full, &draw_couplings(&full)).len() > terms.len());
    }

    #[test]
    fn hubbard_dimer_matrix_elements() {
        let spec = ModelSpec::new(ModelKind::Hubbard, 2, 8.0, 0).with_j(2f64.sqrt());
        let mut draw = draw_couplings(&spec);
        draw.j2 = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let b = basis(&spec);
        let h = build_hamiltonian_with::<f64>(&spec, b.clone(), &draw).unwrap();
        assert_eq!(h.dim(), 4);
        // doubly occupied site 0: up bit 0, down bit 2
        let d0 = b.index_of(Config(0b0101)).unwrap();
        assert!((h.matrix.get(d0, d0).re - 8.0).abs() < 1e-12);
        for r in 0..4 {
            for (_, v) in h.matrix.row(r) {
                assert!(v.norm() < 8.0 + 1e-12);
            }
        }
    }
}
