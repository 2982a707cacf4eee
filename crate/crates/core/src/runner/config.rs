//! Experiment configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fock::{Filling, SectorKind};
use crate::measures::Cut;
use crate::models::{ModelKind, ModelSpec};
use crate::scaling::Family;
use crate::training::AdamConfig;

/// One experiment: a model family swept over sizes, interaction strengths and
/// coupling seeds, with the ansätze to train and the measures to record.
///
/// Every field except `name` and `output` enters the record hashes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: ModelKind,
    /// Kinetic scale; the model default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default)]
    pub filling: FillingSpec,
    #[serde(default)]
    pub ansatz: Vec<AnsatzSpec>,
    #[serde(default)]
    pub adam: AdamConfig,
    pub seeds: Vec<u64>,
    pub sweep: Sweep,
    #[serde(default)]
    pub measures: MeasureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSpec>,
    /// Subdirectory of the output root; `name` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Write a parameter checkpoint for every trained network.
    #[serde(default)]
    pub checkpoints: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub n_sites: Vec<usize>,
    pub u: Vec<f64>,
    /// When set, `J = j_plus_u - U` at every sweep point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_plus_u: Option<f64>,
}

/// Particle content, resolved per system size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FillingSpec {
    #[default]
    Half,
    /// Half filling minus `holes` particles per spin species (spinful) or in total (spinless).
    Doped { holes: usize },
    Spinless { n: usize },
    Spinful { n_up: usize, n_down: usize },
}

impl FillingSpec {
    pub fn resolve(self, kind: SectorKind, n_sites: usize) -> Result<Filling> {
        let half = n_sites / 2;
        let f = match self {
            FillingSpec::Half => Filling::half(kind, n_sites),
            FillingSpec::Doped { holes } => {
                let n = half.checked_sub(holes).ok_or_else(|| Error::Config(format!("{holes} holes at {n_sites} sites")))?;
                match kind {
                    SectorKind::Spinless => Filling::Spinless { n },
                    SectorKind::Spinful => Filling::Spinful { n_up: n, n_down: n },
                }
            }
            FillingSpec::Spinless { n } => Filling::Spinless { n },
            FillingSpec::Spinful { n_up, n_down } => Filling::Spinful { n_up, n_down },
        };
        if f.kind() != kind {
            return Err(Error::Config(format!("filling {f:?} does not match a {kind:?} model")));
        }
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    Hfds,
    Slater,
    Gutzwiller,
    PhaseProbe,
    AmplitudeProbe,
}

impl AnsatzKind {
    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::Hfds => "hfds",
            AnsatzKind::Slater => "slater",
            AnsatzKind::Gutzwiller => "gutzwiller",
            AnsatzKind::PhaseProbe => "phase-probe",
            AnsatzKind::AmplitudeProbe => "amplitude-probe",
        }
    }
}

impl std::str::FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [AnsatzKind::Hfds, AnsatzKind::Slater, AnsatzKind::Gutzwiller, AnsatzKind::PhaseProbe, AnsatzKind::AmplitudeProbe]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown ansatz '{s}'")))
    }
}

/// An ansatz family and the capacity grid to train.
///
/// `hidden` is the hidden-particle count `M` and `depth` the number of hidden
/// MLP layers; only HFDS uses `hidden`, and the amplitude probe uses `depth`
/// and `width`. Every combination of the lists is trained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    #[serde(default = "zero_list")]
    pub hidden: Vec<usize>,
    #[serde(default = "zero_list")]
    pub depth: Vec<usize>,
    /// Amplitude-probe hidden widths; `4 N_S` when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub width: Vec<usize>,
    /// Per-ansatz optimizer override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adam: Option<AdamConfig>,
}

fn zero_list() -> Vec<usize> {
    vec![0]
}

impl AnsatzSpec {
    pub fn new(kind: AnsatzKind, hidden: &[usize], depth: &[usize]) -> Self {
        AnsatzSpec { kind, hidden: hidden.to_vec(), depth: depth.to_vec(), width: Vec::new(), adam: None }
    }
}

/// Which bipartitions to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutChoice {
    /// First `ceil(N_S/2)` sites against the rest.
    Half,
    /// Up modes against down modes; skipped for spinless models.
    Spin,
}

impl CutChoice {
    pub fn cut(self, n_sites: usize) -> Cut {
        match self {
            CutChoice::Half => Cut::half(n_sites),
            CutChoice::Spin => Cut::SpinSector,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CutChoice::Half => "half",
            CutChoice::Spin => "spin",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureSpec {
    pub born: bool,
    pub rdm: bool,
    pub cuts: Vec<CutChoice>,
    /// Store entanglement spectra next to the entropies.
    pub spectrum: bool,
    pub mutual_information: bool,
    /// The paired-site fraction; spinful models only.
    pub x: bool,
    /// Also measure every trained state.
    pub trained: bool,
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec {
            born: true,
            rdm: true,
            cuts: vec![CutChoice::Half],
            spectrum: false,
            mutual_information: false,
            x: false,
            trained: true,
        }
    }
}

/// Scaling analysis over the train rows of the experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    /// `delta O` at which parameter counts are read off.
    pub target: f64,
    #[serde(default = "default_family")]
    pub family: Family,
    /// Drop `M = 0` networks from the global fit when enough points remain.
    #[serde(default = "default_true")]
    pub exclude_m0: bool,
}

fn default_family() -> Family {
    Family::Algebraic
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if let Some(&n) = self.sweep.n_sites.iter().find(|&&n| n < 2) {
            return bad(format!("n_sites = {n} is below 2"));
        }
        if self.sweep.u.iter().any(|u| !u.is_finite()) || self.j.is_some_and(|j| !j.is_finite()) {
            return bad("couplings must be finite".into());
        }
        for a in &self.ansatz {
            if a.hidden.is_empty() || a.depth.is_empty() {
                return bad(format!("{}: empty hidden or depth list", a.kind.name()));
            }
            if a.kind == AnsatzKind::AmplitudeProbe && a.depth.contains(&0) {
                return bad("amplitude-probe depth must be at least 1".into());
            }
            if a.kind == AnsatzKind::Gutzwiller && self.model.sector_kind() != SectorKind::Spinful {
                return bad("gutzwiller needs a spinful model".into());
            }
        }
        if self.measures.x && self.model.sector_kind() != SectorKind::Spinful {
            return bad("the x observable needs a spinful model".into());
        }
        if let Some(f) = &self.fit {
            if !(f.target > 0.0 && f.target < 1.0) {
                return bad(format!("fit target {} outside (0, 1)", f.target));
            }
        }
        for &n in &self.sweep.n_sites {
            let f = self.filling.resolve(self.model.sector_kind(), n)?;
            if f.particles() == 0 {
                return bad(format!("empty sector at {n} sites"));
            }
        }
        Ok(())
    }

    pub fn output_dir(&self) -> &str {
        self.output.as_deref().unwrap_or(&self.name)
    }

    /// Sweep points in execution order: sizes, then interaction strengths, then seeds.
    pub fn points(&self) -> Vec<ModelSpec> {
        let mut out = Vec::new();
        for &n in &self.sweep.n_sites {
            for &u in &self.sweep.u {
                for &seed in &self.seeds {
                    let j = match (self.sweep.j_plus_u, self.j) {
                        (Some(total), _) => total - u,
                        (None, Some(j)) => j,
                        (None, None) => self.model.default_j(),
                    };
                    out.push(ModelSpec { kind: self.model, n_sites: n, j, u, seed });
                }
            }
        }
        out
    }
}

/// Everything that determines the rows of one sweep point.
#[derive(Serialize)]
pub(crate) struct UnitKey<'a> {
    pub schema: u32,
    pub model: &'a ModelSpec,
    pub filling: Filling,
    pub ansatz: &'a [AnsatzSpec],
    pub adam: &'a AdamConfig,
    pub measures: &'a MeasureSpec,
    pub checkpoints: bool,
}

/// Hex SHA-256 of the canonical JSON form of `value`.
pub fn content_hash<S: Serialize>(value: &S) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
