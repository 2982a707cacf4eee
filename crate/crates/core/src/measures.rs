//! Complexity diagnostics of sector states.
//!
//! All entropies use the natural logarithm.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{apply_string, Config, Op, SectorBasis, SectorKind};
use crate::scalar::{cr, Real};

/// Entanglement spectrum entries below this are dropped from the reported spectrum.
pub const SPECTRUM_FLOOR: f64 = 1e-14;

/// Normalized amplitudes over a sector basis.
#[derive(Clone, Debug)]
pub struct StateVector<T: Real> {
    pub basis: Arc<SectorBasis>,
    pub amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Normalizes `amplitudes`; an all-zero vector is rejected.
    pub fn new(basis: Arc<SectorBasis>, mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Domain(format!("{} amplitudes for a sector of dimension {}", amplitudes.len(), basis.dim())));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::DegenerateState);
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(StateVector { basis, amplitudes })
    }
}

/// `-sum_n |psi(n)|^2 log |psi(n)|^2`.
pub fn born_entropy<T: Real>(v: &StateVector<T>) -> T {
    entropy_of(v.amplitudes.iter().map(|z| z.norm_sqr()))
}

fn entropy_of<T: Real>(probs: impl Iterator<Item = T>) -> T {
    probs.filter(|p| *p > T::zero()).map(|p| -p * p.ln()).sum()
}

/// One-particle reduced density matrix `gamma_ij = <c^dag_j c_i>`.
#[derive(Clone, Debug)]
pub struct OneRdm<T: Real> {
    pub n_modes: usize,
    pub particles: usize,
    /// Row-major `modes x modes`, trace equal to the particle number.
    pub matrix: Vec<Complex<T>>,
}

impl<T: Real> OneRdm<T> {
    /// Eigenvalues of `gamma` (occupations of the natural orbitals), ascending.
    pub fn occupations(&self) -> Vec<T> {
        T::hermitian_eigh(self.n_modes, &self.matrix, false).0
    }

    pub fn trace(&self) -> T {
        (0..self.n_modes).map(|i| self.matrix[i * self.n_modes + i].re).sum()
    }
}

pub fn one_rdm<T: Real>(v: &StateVector<T>) -> Result<OneRdm<T>> {
    let basis = &v.basis;
    let k = basis.n_modes();
    let mut g = vec![cr(T::zero()); k * k];
    for (col, &n) in basis.configs().iter().enumerate() {
        let a = v.amplitudes[col];
        if a == cr(T::zero()) {
            continue;
        }
        for i in n.modes() {
            for j in 0..k {
                if let Some((m, sign)) = apply_string(n, &[(Op::Create, j), (Op::Annihilate, i)]) {
                    if let Some(row) = basis.index_of(m) {
                        g[i * k + j] += v.amplitudes[row].conj() * a * T::of(f64::from(sign));
                    }
                }
            }
        }
    }
    let rdm = OneRdm { n_modes: k, particles: basis.particles(), matrix: g };
    let tr = rdm.trace().as_f64();
    if (tr - basis.particles() as f64).abs() > 1e-8 {
        return Err(Error::Consistency(format!("1-RDM trace {tr} for {} particles", basis.particles())));
    }
    Ok(rdm)
}

/// Von Neumann entropy of `gamma / N`; slightly negative eigenvalues are clamped to zero.
pub fn rdm_entropy<T: Real>(g: &OneRdm<T>) -> T {
    let n = T::of(g.particles as f64);
    entropy_of(g.occupations().into_iter().map(|x| (x / n).max(T::zero())))
}

/// Bipartition of the single-particle modes into `A` and its complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "set", rename_all = "snake_case")]
pub enum Cut {
    /// Sites in `A`; both spin modes of a site go together.
    Sites(Vec<usize>),
    /// Up modes versus down modes.
    SpinSector,
    /// Arbitrary mode subset.
    Modes(Vec<usize>),
}

impl Cut {
    /// The first `ceil(N_S / 2)` sites.
    pub fn half(n_sites: usize) -> Self {
        Cut::Sites((0..n_sites.div_ceil(2)).collect())
    }

    /// Bitmask of the `A` modes.
    pub fn mask(&self, n_sites: usize, kind: SectorKind) -> Result<u64> {
        let k = kind.modes(n_sites);
        let bits = |modes: &mut dyn Iterator<Item = usize>| -> Result<u64> {
            let mut mask = 0u64;
            for m in modes {
                if m >= k {
                    return Err(Error::Domain(format!("mode {m} outside {k} modes")));
                }
                mask |= 1 << m;
            }
            Ok(mask)
        };
        match self {
            Cut::Sites(s) => {
                if let Some(bad) = s.iter().find(|&&i| i >= n_sites) {
                    return Err(Error::Domain(format!("site {bad} outside {n_sites} sites")));
                }
                match kind {
                    SectorKind::Spinless => bits(&mut s.iter().copied()),
                    SectorKind::Spinful => bits(&mut s.iter().flat_map(|&i| [i, n_sites + i])),
                }
            }
            Cut::SpinSector => match kind {
                SectorKind::Spinful => bits(&mut (0..n_sites)),
                SectorKind::Spinless => Err(Error::Domain("spin-sector cut of a spinless state".into())),
            },
            Cut::Modes(m) => bits(&mut m.iter().copied()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entanglement {
    pub entropy: f64,
    /// Eigenvalues of the reduced density matrix, descending, without entries below [`SPECTRUM_FLOOR`].
    pub spectrum: Vec<f64>,
}

/// Sign of `|n> = sign * |n_A> (x) |n_B>` when the `A` creators are moved in front of the `B` ones.
pub(crate) fn reorder_sign(n: Config, mask_a: u64) -> i8 {
    let a = n.0 & mask_a;
    let mut b = n.0 & !mask_a;
    let mut swaps = 0u32;
    while b != 0 {
        let m = b.trailing_zeros();
        // A modes above this B mode have to pass it
        swaps += (a >> m).count_ones();
        b &= b - 1;
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Eigenvalues of the reduced density matrix on the modes in `mask_a`.
pub fn reduced_spectrum<T: Real>(v: &StateVector<T>, mask_a: u64) -> Vec<T> {
    // rho_A commutes with the particle number in A, so it is block diagonal in that number
    let mut blocks: BTreeMap<u32, (Vec<u64>, Vec<u64>)> = BTreeMap::new();
    for n in v.basis.configs() {
        let a = n.0 & mask_a;
        let e = blocks.entry(a.count_ones()).or_default();
        e.0.push(a);
        e.1.push(n.0 & !mask_a);
    }
    let mut spectrum = Vec::new();
    for (a_list, b_list) in blocks.values_mut() {
        let mut a_sorted = a_list.clone();
        a_sorted.sort_unstable();
        a_sorted.dedup();
        let mut b_sorted = b_list.clone();
        b_sorted.sort_unstable();
        b_sorted.dedup();
        let (da, db) = (a_sorted.len(), b_sorted.len());
        let mut m = vec![cr(T::zero()); da * db];
        for (a, b) in a_list.iter().zip(b_list.iter()) {
            let n = Config(a | b);
            let idx = v.basis.index_of(n).expect("config from the basis");
            let i = a_sorted.binary_search(a).expect("collected");
            let j = b_sorted.binary_search(b).expect("collected");
            m[i * db + j] = v.amplitudes[idx] * T::of(f64::from(reorder_sign(n, mask_a)));
        }
        let mut rho = vec![cr(T::zero()); da * da];
        for i in 0..da {
            for k in i..da {
                let s = (0..db).fold(cr(T::zero()), |acc, j| acc + m[i * db + j] * m[k * db + j].conj());
                rho[i * da + k] = s;
                rho[k * da + i] = s.conj();
            }
        }
        spectrum.extend(T::hermitian_eigh(da, &rho, false).0);
    }
    spectrum
}

pub fn entanglement<T: Real>(v: &StateVector<T>, cut: &Cut) -> Result<Entanglement> {
    let mask = cut.mask(v.basis.n_sites(), v.basis.kind())?;
    Ok(spectrum_to_entanglement(reduced_spectrum(v, mask)))
}

fn spectrum_to_entanglement<T: Real>(xi: Vec<T>) -> Entanglement {
    let mut xi: Vec<f64> = xi.into_iter().map(|x| x.as_f64().max(0.0)).collect();
    xi.sort_by(|a, b| b.total_cmp(a));
    let entropy = entropy_of(xi.iter().copied());
    xi.retain(|&x| x >= SPECTRUM_FLOOR);
    Entanglement { entropy, spectrum: xi }
}

/// Spin label of a mode for [`mutual_information`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orbital {
    Up(usize),
    Down(usize),
    Spinless(usize),
}

impl Orbital {
    fn mode(self, n_sites: usize) -> usize {
        match self {
            Orbital::Up(i) | Orbital::Spinless(i) => i,
            Orbital::Down(i) => n_sites + i,
        }
    }
}

/// `S(rho_i) + S(rho_j) - S(rho_ij)` for two distinct orbitals.
pub fn mutual_information<T: Real>(v: &StateVector<T>, i: Orbital, j: Orbital) -> Result<f64> {
    let ns = v.basis.n_sites();
    let (mi, mj) = (i.mode(ns), j.mode(ns));
    if mi == mj {
        return Err(Error::Domain("mutual information of an orbital with itself".into()));
    }
    let k = v.basis.n_modes();
    if mi >= k || mj >= k {
        return Err(Error::Domain("orbital outside the mode range".into()));
    }
    let s = |mask: u64| spectrum_to_entanglement(reduced_spectrum(v, mask)).entropy;
    Ok(s(1 << mi) + s(1 << mj) - s((1 << mi) | (1 << mj)))
}

/// `<x> = (1/N_S) sum_i <1 + 2 n_up n_down - n_up - n_down>`: the fraction of sites that are empty or doubly occupied.
pub fn x_observable<T: Real>(v: &StateVector<T>) -> Result<T> {
    if v.basis.kind() != SectorKind::Spinful {
        return Err(Error::Domain("x observable needs a spinful state".into()));
    }
    let ns = v.basis.n_sites();
    let mut acc = T::zero();
    for (n, a) in v.basis.configs().iter().zip(&v.amplitudes) {
        let up = n.0 & ((1u64 << ns) - 1);
        let dn = n.0 >> ns;
        // sites where both spins agree
        let paired = ns as u32 - (up ^ dn).count_ones();
        acc += a.norm_sqr() * T::of(f64::from(paired));
    }
    Ok(acc / T::of(ns as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Filling;
    use crate::rng::CounterRng;
    use proptest::prelude::*;

    fn state(basis: SectorBasis, amps: Vec<Complex<f64>>) -> StateVector<f64> {
        StateVector::new(Arc::new(basis), amps).unwrap()
    }

    fn random_state(kind: SectorKind, n_sites: usize, seed: u64) -> StateVector<f64> {
        let basis = SectorBasis::half_filled(kind, n_sites).unwrap();
        let mut rng = CounterRng::stream(seed, "state");
        let amps = (0..basis.dim()).map(|_| rng.complex_normal()).collect();
        state(basis, amps)
    }

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn born_entropy_examples() {
        let basis = SectorBasis::half_filled(SectorKind::Spinless, 4).unwrap();
        let d = basis.dim();
        let mut e = vec![c(0.0); d];
        e[2] = c(1.0);
        assert_eq!(born_entropy(&state(basis.clone(), e)), 0.0);
        assert!((born_entropy(&state(basis.clone(), vec![c(1.0); d])) - (d as f64).ln()).abs() < 1e-14);
        let mut two = vec![c(0.0); d];
        two[0] = c(0.5f64.sqrt());
        two[1] = c(0.5f64.sqrt());
        assert!((born_entropy(&state(basis, two)) - 2f64.ln()).abs() < 1e-14);
    }

    /// Dense Jordan-Wigner annihilator on the full Fock space of `k` modes.
    fn dense_annihilator(k: usize, mode: usize) -> Vec<Vec<f64>> {
        let d = 1 << k;
        let mut a = vec![vec![0.0; d]; d];
        for s in 0..d {
            if s >> mode & 1 == 1 {
                let sign = if (s & ((1 << mode) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                a[s ^ (1 << mode)][s] = sign;
            }
        }
        a
    }

    #[test]
    fn one_rdm_matches_dense_fock_space() {
        use crate::eigensolver::ground_state;
        use crate::models::{build_hamiltonian, ModelKind, ModelSpec};
        let spec = ModelSpec::new(ModelKind::Syk, 4, 1.0, 2);
        let basis = Arc::new(spec.half_filled_basis().unwrap());
        let h = build_hamiltonian::<f64>(&spec, basis.clone()).unwrap();
        let v = StateVector::new(basis.clone(), ground_state(&h).unwrap().vector).unwrap();
        let g = one_rdm(&v).unwrap();
        let k = 4;
        let mut full = vec![c(0.0); 1 << k];
        for (i, n) in basis.configs().iter().enumerate() {
            full[n.0 as usize] = v.amplitudes[i];
        }
        let ops: Vec<Vec<Vec<f64>>> = (0..k).map(|m| dense_annihilator(k, m)).collect();
        for i in 0..k {
            for j in 0..k {
                // <c^dag_j c_i> = (c_j v)^dag (c_i v)
                let apply = |a: &Vec<Vec<f64>>| -> Vec<Complex<f64>> {
                    (0..1 << k).map(|r| (0..1 << k).map(|s| full[s] * a[r][s]).sum()).collect()
                };
                let (ci, cj) = (apply(&ops[i]), apply(&ops[j]));
                let expect: Complex<f64> = cj.iter().zip(&ci).map(|(x, y)| x.conj() * y).sum();
                assert!((g.matrix[i * k + j] - expect).norm() < 1e-13, "({i},{j})");
            }
        }
    }

    #[test]
    fn slater_state_has_log_n_entropy() {
        use crate::ansatz::{Ansatz, SlaterState};
        let basis = Arc::new(SectorBasis::half_filled(SectorKind::Spinful, 3).unwrap());
        let mut rng = CounterRng::stream(3, "phi");
        // one up orbital and one down orbital, so the determinant stays inside the spin sector
        let phi = (0..12).map(|k| if (k / 2 < 3) == (k % 2 == 0) { rng.complex_normal() } else { c(0.0) }).collect();
        let s = SlaterState::new(6, 2, phi);
        let amps = basis.configs().iter().enumerate().map(|(i, &n)| s.amplitude(n, i)).collect();
        let g = one_rdm(&StateVector::new(basis, amps).unwrap()).unwrap();
        assert!((rdm_entropy(&g) - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn uniform_occupations_give_log_modes() {
        let basis = SectorBasis::half_filled(SectorKind::Spinless, 4).unwrap();
        let mut a = vec![c(0.0); basis.dim()];
        a[basis.index_of(Config(0b0011)).unwrap()] = c(1.0);
        a[basis.index_of(Config(0b1100)).unwrap()] = c(1.0);
        let g = one_rdm(&state(basis, a)).unwrap();
        assert!((rdm_entropy(&g) - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn entanglement_examples() {
        let basis = SectorBasis::enumerate(2, Filling::Spinless { n: 1 }).unwrap();
        let cut = Cut::Sites(vec![0]);
        let product = entanglement(&state(basis.clone(), vec![c(1.0), c(0.0)]), &cut).unwrap();
        assert!(product.entropy.abs() < 1e-15);
        assert_eq!(product.spectrum, vec![1.0]);
        let bell = entanglement(&state(basis, vec![c(1.0), c(1.0)]), &cut).unwrap();
        assert!((bell.entropy - 2f64.ln()).abs() < 1e-14);
        assert_eq!(bell.spectrum.len(), 2);
        assert!(bell.spectrum.iter().all(|x| (x - 0.5).abs() < 1e-15));
    }

    #[test]
    fn spin_cut_of_spinless_state_is_rejected() {
        let v = random_state(SectorKind::Spinless, 4, 1);
        assert!(entanglement(&v, &Cut::SpinSector).is_err());
        assert!(x_observable(&v).is_err());
    }

    /// `<beta| rho_A |alpha> = <psi| (|alpha><beta|)_A |psi>`, with the A operator written as
    /// `c^dag_alpha ... P_0 ... c_beta` through the full-space fermion algebra.
    fn explicit_rho(v: &StateVector<f64>, mask: u64) -> (Vec<u64>, Vec<Complex<f64>>) {
        let mut subs: Vec<u64> = v.basis.configs().iter().map(|n| n.0 & mask).collect();
        subs.sort_unstable();
        subs.dedup();
        let d = subs.len();
        let mut rho = vec![c(0.0); d * d];
        let modes = |x: u64| (0..64).filter(move |m| x >> m & 1 == 1);
        for (bi, &beta) in subs.iter().enumerate() {
            for (ai, &alpha) in subs.iter().enumerate() {
                let mut val = c(0.0);
                for (col, &n) in v.basis.configs().iter().enumerate() {
                    // annihilate beta (highest mode first in application order), require A empty, create alpha
                    let ops: Vec<(Op, usize)> = modes(alpha).collect::<Vec<_>>().iter().map(|&m| (Op::Create, m)).collect();
                    let ann: Vec<(Op, usize)> = modes(beta).collect::<Vec<_>>().iter().rev().map(|&m| (Op::Annihilate, m)).collect();
                    let Some((mid, s1)) = apply_string(n, &ann) else { continue };
                    if mid.0 & mask != 0 {
                        continue;
                    }
                    let Some((out, s2)) = apply_string(mid, &ops) else { continue };
                    if let Some(row) = v.basis.index_of(out) {
                        val += v.amplitudes[row].conj() * v.amplitudes[col] * f64::from(s1 * s2);
                    }
                }
                rho[bi * d + ai] = val;
            }
        }
        (subs, rho)
    }

    #[test]
    fn reshape_matches_explicit_reduced_density_matrix() {
        for (kind, ns, seed) in [(SectorKind::Spinful, 4, 1), (SectorKind::Spinful, 6, 2), (SectorKind::Spinless, 8, 3)] {
            let v = random_state(kind, ns, seed);
            assert!(v.basis.dim() <= 400);
            let mut cuts = vec![Cut::half(ns), Cut::Sites(vec![1, ns - 1]), Cut::Modes(vec![0, 3])];
            if kind == SectorKind::Spinful {
                cuts.push(Cut::SpinSector);
            }
            for cut in cuts {
                let mask = cut.mask(ns, kind).unwrap();
                let (subs, rho) = explicit_rho(&v, mask);
                let mut oracle = f64::hermitian_eigh(subs.len(), &rho, false).0;
                let mut ours = reduced_spectrum(&v, mask);
                oracle.sort_by(f64::total_cmp);
                ours.sort_by(f64::total_cmp);
                assert_eq!(oracle.len(), ours.len());
                for (a, b) in oracle.iter().zip(&ours) {
                    assert!((a - b).abs() < 1e-12, "{cut:?}");
                }
                let s_oracle = entropy_of(oracle.iter().map(|x| x.max(0.0)));
                assert!((s_oracle - entanglement(&v, &cut).unwrap().entropy).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn x_observable_examples() {
        let basis = SectorBasis::half_filled(SectorKind::Spinful, 4).unwrap();
        let d = basis.dim();
        let mut singly = vec![c(0.0); d];
        singly[basis.index_of(Config(0b1010_0101)).unwrap()] = c(1.0);
        assert_eq!(x_observable(&state(basis.clone(), singly)).unwrap(), 0.0);
        let mut paired = vec![c(0.0); d];
        paired[basis.index_of(Config(0b0011_0011)).unwrap()] = c(1.0);
        assert_eq!(x_observable(&state(basis, paired)).unwrap(), 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn born_entropy_bounds_entanglement(seed in any::<u64>(), ns in 2usize..=4, spinful in any::<bool>()) {
            let (kind, ns) = if spinful { (SectorKind::Spinful, ns) } else { (SectorKind::Spinless, 2 * ns) };
            let v = random_state(kind, ns, seed);
            let sb = born_entropy(&v);
            for mask in 1..(1u64 << ns) - 1 {
                let cut = Cut::Sites((0..ns).filter(|i| mask >> i & 1 == 1).collect());
                prop_assert!(sb >= entanglement(&v, &cut).unwrap().entropy - 1e-12);
            }
            if spinful {
                prop_assert!(sb >= entanglement(&v, &Cut::SpinSector).unwrap().entropy - 1e-12);
            }
        }

        #[test]
        fn rdm_entropy_bounds(seed in any::<u64>(), ns in 2usize..=4) {
            let v = random_state(SectorKind::Spinful, ns, seed);
            let g = one_rdm(&v).unwrap();
            let s = rdm_entropy(&g);
            let n = v.basis.particles() as f64;
            prop_assert!(s >= n.ln() - 1e-10);
            prop_assert!(s <= (v.basis.n_modes() as f64).ln() + 1e-10);
            for x in g.occupations() {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&x));
            }
        }

        #[test]
        fn entropies_ignore_global_phase(seed in any::<u64>(), phase in 0.0f64..6.3) {
            let v = random_state(SectorKind::Spinful, 3, seed);
            let rot = Complex::from_polar(1.0, phase);
            let w = StateVector::new(v.basis.clone(), v.amplitudes.iter().map(|z| z * rot).collect()).unwrap();
            prop_assert!((born_entropy(&v) - born_entropy(&w)).abs() < 1e-12);
            prop_assert!((rdm_entropy(&one_rdm(&v).unwrap()) - rdm_entropy(&one_rdm(&w).unwrap())).abs() < 1e-12);
            let (a, b) = (entanglement(&v, &Cut::half(3)).unwrap(), entanglement(&w, &Cut::half(3)).unwrap());
            prop_assert!((a.entropy - b.entropy).abs() < 1e-12);
        }

        #[test]
        fn mutual_information_is_non_negative(seed in any::<u64>(), i in 0usize..3, j in 0usize..3, si in any::<bool>(), sj in any::<bool>()) {
            let v = random_state(SectorKind::Spinful, 3, seed);
            let o = |k: usize, up: bool| if up { Orbital::Up(k) } else { Orbital::Down(k) };
            prop_assume!((i, si) != (j, sj));
            prop_assert!(mutual_information(&v, o(i, si), o(j, sj)).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn mutual_information_of_product_orbitals_vanishes() {
        // |up on site 0> (x) (|down 0> + |down 1>)/sqrt 2 : the up orbital is uncorrelated
        let basis = SectorBasis::enumerate(2, Filling::Spinful { n_up: 1, n_down: 1 }).unwrap();
        let mut a = vec![c(0.0); basis.dim()];
        a[basis.index_of(Config(0b0101)).unwrap()] = c(1.0);
        a[basis.index_of(Config(0b1001)).unwrap()] = c(1.0);
        let v = state(basis, a);
        assert!(mutual_information(&v, Orbital::Up(0), Orbital::Down(0)).unwrap().abs() < 1e-14);
        assert!(mutual_information(&v, Orbital::Up(0), Orbital::Down(1)).unwrap().abs() < 1e-14);
        assert!((mutual_information(&v, Orbital::Down(0), Orbital::Down(1)).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
    }
}
