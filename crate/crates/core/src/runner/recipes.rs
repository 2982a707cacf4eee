//! Built-in experiment definitions.
//!
//! Sizes are chosen for a single workstation; edit the generated TOML
//! (`hfds run <recipe> --dump`) to scale them up.

use super::config::{AnsatzKind, AnsatzSpec, CutChoice, ExperimentConfig, FillingSpec, FitSpec, MeasureSpec, Sweep};
use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::scaling::Family;
use crate::training::AdamConfig;

pub const NAMES: [&str; 10] =
    ["fig1", "fig3-syk", "fig3-models", "fig4", "fig5", "fig6", "appD-arealaw", "appE-probes", "appF-mutualinfo", "appG-doped"];

/// Interaction strengths of the coupling sweeps.
pub const U_SWEEP: [f64; 9] = [0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0];

const SIX_SEEDS: [u64; 6] = [0, 1, 2, 3, 4, 5];

fn base(name: &str, model: ModelKind, n_sites: &[usize], u: &[f64]) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        model,
        j: None,
        filling: FillingSpec::Half,
        ansatz: Vec::new(),
        adam: AdamConfig::default(),
        seeds: SIX_SEEDS.to_vec(),
        sweep: Sweep { n_sites: n_sites.to_vec(), u: u.to_vec(), j_plus_u: None },
        measures: MeasureSpec::default(),
        fit: None,
        output: Some(name.to_string()),
        checkpoints: false,
    }
}

fn hfds(hidden: &[usize], depth: &[usize]) -> AnsatzSpec {
    AnsatzSpec::new(AnsatzKind::Hfds, hidden, depth)
}

fn fit(target: f64) -> Option<FitSpec> {
    Some(FitSpec { target, family: Family::Algebraic, exclude_m0: true })
}

fn named(mut c: ExperimentConfig, suffix: &str) -> ExperimentConfig {
    c.name = format!("{}-{suffix}", c.name);
    c
}

fn sizes(model: ModelKind) -> &'static [usize] {
    if model == ModelKind::Syk {
        &[8, 10, 12, 14]
    } else {
        &[4, 6, 8]
    }
}

/// The configurations of a named recipe; several models become several configs sharing an output directory.
pub fn recipe(name: &str) -> Result<Vec<ExperimentConfig>> {
    let configs = match name {
        // entanglement of exact ground states against system size, U = 3
        "fig1" => ModelKind::MAIN
            .iter()
            .map(|&m| {
                let mut c = named(base(name, m, sizes(m), &[3.0]), m.name());
                c.measures.cuts = vec![CutChoice::Half, CutChoice::Spin];
                c
            })
            .collect(),
        // error against parameters; SYK with two hidden layers
        "fig3-syk" => {
            let mut c = base(name, ModelKind::Syk, &[8, 10, 12], &[3.0]);
            c.ansatz = vec![hfds(&[0, 1, 2, 3, 4], &[2])];
            c.fit = fit(0.05);
            vec![c]
        }
        // error against parameters for the spinful models without hidden layers
        "fig3-models" => ModelKind::SPINFUL
            .iter()
            .map(|&m| {
                let mut c = named(base(name, m, &[4, 6, 8], &[3.0]), m.name());
                c.ansatz = vec![hfds(&[0, 1, 2, 4, 8], &[0])];
                c.fit = fit(0.05);
                c
            })
            .collect(),
        "fig4" => {
            let mut c = base(name, ModelKind::Hubbard, &[8], &U_SWEEP);
            c.ansatz = vec![hfds(&[1], &[0])];
            vec![c]
        }
        // SYK at fixed J + U = 1, one hidden particle, 0..2 hidden layers
        "fig5" => {
            let mut c = base(name, ModelKind::Syk, &[14], &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
            c.sweep.j_plus_u = Some(1.0);
            c.seeds = vec![0, 1, 2];
            c.ansatz = vec![hfds(&[1], &[0, 1, 2])];
            vec![c]
        }
        "fig6" => ModelKind::SPINFUL
            .iter()
            .map(|&m| {
                let mut c = named(base(name, m, &[8], &U_SWEEP), m.name());
                c.ansatz = vec![hfds(&[1], &[0])];
                c.measures.x = true;
                c
            })
            .collect(),
        // area-law 1D SYK against the all-to-all model at the same sizes
        "appD-arealaw" => [ModelKind::Syk1d, ModelKind::Syk]
            .iter()
            .map(|&m| {
                let mut c = named(base(name, m, &[6, 8, 10, 12], &[1.0]), m.name());
                c.j = Some(0.0);
                c.ansatz = vec![hfds(&[0, 1, 2, 3, 4], &[0])];
                c.fit = fit(0.05);
                c
            })
            .collect(),
        // probes: the amplitude probe learns |psi| with the exact signs, the phase probe the reverse
        "appE-probes" => {
            let mut c = base(name, ModelKind::Syk, &[8, 10, 12], &[1.0]);
            c.ansatz = vec![
                AnsatzSpec { width: vec![2, 4, 8, 16, 32], ..AnsatzSpec::new(AnsatzKind::AmplitudeProbe, &[0], &[1]) },
                AnsatzSpec::new(AnsatzKind::PhaseProbe, &[0], &[0]),
            ];
            c.fit = Some(FitSpec { target: 0.05, family: Family::Algebraic, exclude_m0: false });
            vec![c]
        }
        "appF-mutualinfo" => ModelKind::MAIN
            .iter()
            .map(|&m| {
                let mut c = named(base(name, m, &[if m == ModelKind::Syk { 12 } else { 6 }], &[3.0]), m.name());
                c.seeds = vec![0];
                c.measures = MeasureSpec {
                    cuts: vec![CutChoice::Half, CutChoice::Spin],
                    spectrum: true,
                    mutual_information: true,
                    ..MeasureSpec::default()
                };
                c
            })
            .collect(),
        // one hole per spin species below half filling
        "appG-doped" => {
            let mut c = base(name, ModelKind::Hubbard, &[8], &U_SWEEP);
            c.filling = FillingSpec::Doped { holes: 1 };
            c.ansatz = vec![hfds(&[1], &[0])];
            vec![c]
        }
        other => return Err(Error::Config(format!("unknown recipe '{other}' (known: {})", NAMES.join(", ")))),
    };
    Ok(configs)
}
