//! Occupation-number bases and fermionic operator strings.
//!
//! Modes are flattened in spin-block order: spinless mode `i` is bit `i`;
//! spinful `(i, up)` is bit `i` and `(i, down)` is bit `n_sites + i`.
//! Creation and annihilation pick up the Jordan-Wigner sign
//! `(-1)^(number of occupied modes with a strictly lower index)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of modes a [`Config`] can hold.
pub const MAX_MODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
    Spinless,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorKind {
    Spinless,
    Spinful,
}

impl SectorKind {
    pub fn modes(self, n_sites: usize) -> usize {
        match self {
            SectorKind::Spinless => n_sites,
            SectorKind::Spinful => 2 * n_sites,
        }
    }
}

/// A site/spin pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub site: usize,
    pub spin: Spin,
}

impl ModeIndex {
    pub fn up(site: usize) -> Self {
        ModeIndex { site, spin: Spin::Up }
    }

    pub fn down(site: usize) -> Self {
        ModeIndex { site, spin: Spin::Down }
    }

    pub fn spinless(site: usize) -> Self {
        ModeIndex { site, spin: Spin::Spinless }
    }

    /// Flattened mode id for a lattice of `n_sites` sites.
    pub fn flat(self, n_sites: usize) -> usize {
        match self.spin {
            Spin::Up | Spin::Spinless => self.site,
            Spin::Down => n_sites + self.site,
        }
    }
}

/// Occupation bitmask, bit `m` set iff flattened mode `m` is occupied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Config(pub u64);

impl Config {
    #[inline]
    pub fn occupied(self, mode: usize) -> bool {
        self.0 >> mode & 1 == 1
    }

    #[inline]
    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    /// Number of occupied modes with index strictly below `mode`.
    #[inline]
    pub fn count_below(self, mode: usize) -> u32 {
        (self.0 & ((1u64 << mode) - 1)).count_ones()
    }

    /// Occupied modes in ascending order.
    pub fn modes(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let m = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(m)
            }
        })
    }

    /// `n_up` (low block) and `n_down` (high block) populations.
    pub fn spin_counts(self, n_sites: usize) -> (u32, u32) {
        let low = low_mask(n_sites);
        ((self.0 & low).count_ones(), (self.0 >> n_sites & low).count_ones())
    }

    /// Number of doubly occupied sites of a spinful configuration.
    pub fn double_occupancy(self, n_sites: usize) -> u32 {
        let low = low_mask(n_sites);
        (self.0 & (self.0 >> n_sites) & low).count_ones()
    }
}

#[inline]
pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Particle content of a sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Filling {
    Spinless { n: usize },
    Spinful { n_up: usize, n_down: usize },
}

impl Filling {
    pub fn kind(self) -> SectorKind {
        match self {
            Filling::Spinless { .. } => SectorKind::Spinless,
            Filling::Spinful { .. } => SectorKind::Spinful,
        }
    }

    pub fn particles(self) -> usize {
        match self {
            Filling::Spinless { n } => n,
            Filling::Spinful { n_up, n_down } => n_up + n_down,
        }
    }

    /// Half filling: `floor(n_sites / 2)` spinless particles, or that many per spin.
    pub fn half(kind: SectorKind, n_sites: usize) -> Self {
        match kind {
            SectorKind::Spinless => Filling::Spinless { n: n_sites / 2 },
            SectorKind::Spinful => Filling::Spinful { n_up: n_sites / 2, n_down: n_sites / 2 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Create,
    Annihilate,
}

/// Apply an operator string to a basis configuration.
///
/// `ops` is written left to right as in an operator product and applied
/// right to left. Returns `None` when the string annihilates the state.
pub fn apply_string(config: Config, ops: &[(Op, usize)]) -> Option<(Config, i8)> {
    let mut bits = config;
    let mut odd = false;
    for &(op, mode) in ops.iter().rev() {
        let occ = bits.occupied(mode);
        match op {
            Op::Create if occ => return None,
            Op::Annihilate if !occ => return None,
            _ => {}
        }
        odd ^= bits.count_below(mode) & 1 == 1;
        bits = Config(bits.0 ^ (1u64 << mode));
    }
    Some((bits, if odd { -1 } else { 1 }))
}

/// `+1` for occupied modes, `-1` for empty ones.
pub fn occupation_vector<T: num_traits::Float>(config: Config, n_modes: usize) -> Vec<T> {
    (0..n_modes)
        .map(|m| if config.occupied(m) { T::one() } else { -T::one() })
        .collect()
}

/// All configurations of a fixed particle-number sector, sorted by bitmask.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    n_sites: usize,
    filling: Filling,
    configs: Vec<Config>,
    index: HashMap<Config, usize>,
}

impl SectorBasis {
    pub fn enumerate(n_sites: usize, filling: Filling) -> Result<Self> {
        let kind = filling.kind();
        if kind.modes(n_sites) > MAX_MODES {
            return Err(Error::Domain(format!(
                "{} modes exceed the {MAX_MODES}-mode bitmask",
                kind.modes(n_sites)
            )));
        }
        let mut configs = match filling {
            Filling::Spinless { n } => {
                if n > n_sites {
                    return Err(Error::Domain(format!("{n} particles on {n_sites} sites")));
                }
                combinations(n_sites, n).map(Config).collect::<Vec<_>>()
            }
            Filling::Spinful { n_up, n_down } => {
                if n_up > n_sites || n_down > n_sites {
                    return Err(Error::Domain(format!(
                        "({n_up}, {n_down}) particles on {n_sites} sites"
                    )));
                }
                let ups: Vec<u64> = combinations(n_sites, n_up).collect();
                let mut out = Vec::new();
                for down in combinations(n_sites, n_down) {
                    for &up in &ups {
                        out.push(Config(up | down << n_sites));
                    }
                }
                out
            }
        };
        configs.sort_unstable();
        let index = configs.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Ok(SectorBasis { n_sites, filling, configs, index })
    }

    pub fn half_filled(kind: SectorKind, n_sites: usize) -> Result<Self> {
        Self::enumerate(n_sites, Filling::half(kind, n_sites))
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn kind(&self) -> SectorKind {
        self.filling.kind()
    }

    pub fn filling(&self) -> Filling {
        self.filling
    }

    pub fn particles(&self) -> usize {
        self.filling.particles()
    }

    pub fn n_modes(&self) -> usize {
        self.kind().modes(self.n_sites)
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[Config] {
        &self.configs
    }

    pub fn config(&self, i: usize) -> Config {
        self.configs[i]
    }

    pub fn index_of(&self, c: Config) -> Option<usize> {
        self.index.get(&c).copied()
    }
}

/// Bitmasks with exactly `k` of the lowest `n` bits set, ascending (Gosper's hack).
fn combinations(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = if n >= 64 { u64::MAX } else { 1u64 << n };
    let mut next = if k == 0 { Some(0u64) } else if k <= n { Some(low_mask(k)) } else { None };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (r != 0 && nxt < limit).then_some(nxt)
        };
        Some(cur)
    })
}
