//! Reproducible experiment sweeps.
//!
//! [`run`] expands an [`ExperimentConfig`] into sweep points (size x
//! interaction x coupling seed). Each point is solved exactly, every requested
//! ansatz is trained on the ground state, and exact and trained states are
//! measured. The rows of a point form one unit identified by a content hash;
//! units already present in the output log are skipped, so interrupted sweeps
//! resume where they stopped. Points run on a rayon pool while a single
//! appender writes finished units in sweep order.

mod config;
pub mod recipes;
mod records;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;
use serde_json::{json, Value};

pub use config::{
    content_hash, AnsatzKind, AnsatzSpec, CutChoice, ExperimentConfig, FillingSpec, FitSpec, MeasureSpec, Sweep,
};
pub use records::{
    completed_units, export, now_unix, read_records, ExportFormat, RecordKind, RecordLog, RecordRow, CODE_VERSION, LOG_FILE,
    SCHEMA_VERSION,
};

use crate::ansatz::{
    noisy_orbitals, AmplitudeProbeState, Ansatz, Checkpoint, GutzwillerState, HfdsLayout, HfdsState, PhaseProbeState, SlaterState,
    INIT_NOISE,
};
use crate::eigensolver::{ground_state, residual_bound, GroundStateResult};
use crate::error::{Error, Result};
use crate::fock::{Filling, SectorBasis, SectorKind};
use crate::measures::{born_entropy, entanglement, mutual_information, one_rdm, rdm_entropy, x_observable, Orbital, StateVector};
use crate::models::{build_hamiltonian, draw_couplings, free_orbitals, CouplingDraw, HamiltonianMatrix, ModelSpec};
use crate::rng::CounterRng;
use crate::scaling::{compare_hypotheses, global_invert, piecewise_invert, CurvePoint, ParamsEstimate, SizeEstimate};
use crate::training::{amplitudes, train, AdamConfig, TrainRecord};

type C64 = Complex<f64>;
type Data = BTreeMap<String, Value>;

/// A solved sweep point.
pub struct Instance {
    pub spec: ModelSpec,
    pub filling: Filling,
    pub draw: CouplingDraw,
    pub hamiltonian: HamiltonianMatrix<f64>,
    pub ground: GroundStateResult<f64>,
}

impl Instance {
    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.hamiltonian.basis
    }

    pub fn exact_state(&self) -> Result<StateVector<f64>> {
        StateVector::new(self.basis().clone(), self.ground.vector.clone())
    }

    /// `<psi|H|psi> / <psi|psi>`.
    pub fn energy_of(&self, psi: &[C64]) -> f64 {
        let mut hpsi = vec![C64::new(0.0, 0.0); psi.len()];
        self.hamiltonian.matrix.matvec(psi, &mut hpsi);
        let num: C64 = psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
        num.re / psi.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    /// Model, sector and solver fields shared by every row of the point.
    fn describe(&self) -> Data {
        let s = &self.spec;
        let mut d = Data::new();
        d.insert("model".into(), json!(s.kind.name()));
        d.insert("n_sites".into(), json!(s.n_sites));
        d.insert("j".into(), json!(s.j));
        d.insert("u".into(), json!(s.u));
        d.insert("seed".into(), json!(s.seed));
        d.insert("dim".into(), json!(self.basis().dim()));
        d.insert("n_particles".into(), json!(self.filling.particles()));
        if let Filling::Spinful { n_up, n_down } = self.filling {
            d.insert("n_up".into(), json!(n_up));
            d.insert("n_down".into(), json!(n_down));
        }
        d
    }
}

/// Draw couplings, build the Hamiltonian and solve for its ground state.
pub fn solve_instance(spec: &ModelSpec, filling: Filling) -> Result<Instance> {
    let basis = Arc::new(SectorBasis::enumerate(spec.n_sites, filling)?);
    let hamiltonian = build_hamiltonian::<f64>(spec, basis)?;
    let ground = ground_state(&hamiltonian)?;
    Ok(Instance { spec: *spec, filling, draw: draw_couplings(spec), hamiltonian, ground })
}

/// One trainable network of an [`AnsatzSpec`] grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Variant {
    pub kind: AnsatzKind,
    pub hidden: usize,
    pub depth: usize,
    pub width: usize,
}

impl AnsatzSpec {
    /// Grid points of this spec at `n_sites`.
    pub fn variants(&self, n_sites: usize) -> Vec<Variant> {
        let kind = self.kind;
        match kind {
            AnsatzKind::Hfds => self
                .hidden
                .iter()
                .flat_map(|&hidden| self.depth.iter().map(move |&depth| Variant { kind, hidden, depth, width: 0 }))
                .collect(),
            AnsatzKind::AmplitudeProbe => {
                let widths = if self.width.is_empty() { vec![AmplitudeProbeState::<f64>::default_width(n_sites)] } else { self.width.clone() };
                self.depth
                    .iter()
                    .flat_map(|&depth| widths.iter().map(move |&width| Variant { kind, hidden: 0, depth, width }))
                    .collect()
            }
            _ => vec![Variant { kind, hidden: 0, depth: 0, width: 0 }],
        }
    }
}

/// Initial network for `variant` on `inst`, seeded by the coupling seed.
///
/// Determinant ansätze start from the free orbitals plus complex Gaussian noise
/// of standard deviation [`INIT_NOISE`]; the probes take the part of the target
/// they do not learn from the exact ground state.
pub fn build_ansatz(variant: Variant, inst: &Instance) -> Result<Box<dyn Ansatz<f64>>> {
    let basis = inst.basis();
    let (modes, np) = (basis.n_modes(), basis.particles());
    let seed = inst.spec.seed;
    let orbitals = free_orbitals(&inst.spec, &inst.draw, inst.filling);
    let noisy = |tag: &str| noisy_orbitals::<f64>(modes, np, Some(&orbitals), INIT_NOISE, &mut CounterRng::stream(seed, tag));
    Ok(match variant.kind {
        AnsatzKind::Hfds => {
            let layout = HfdsLayout { n_modes: modes, n_particles: np, hidden: variant.hidden, depth: variant.depth };
            Box::new(HfdsState::<f64>::init(layout, Some(&orbitals), seed))
        }
        AnsatzKind::Slater => Box::new(SlaterState::new(modes, np, noisy("slater-visible"))),
        AnsatzKind::Gutzwiller => {
            if basis.kind() != SectorKind::Spinful {
                return Err(Error::Config("gutzwiller needs a spinful model".into()));
            }
            Box::new(GutzwillerState::new(inst.spec.n_sites, np, noisy("gutzwiller-visible")))
        }
        AnsatzKind::PhaseProbe => Box::new(PhaseProbeState::new(modes, np, noisy("phase-probe"), &inst.ground.vector)),
        AnsatzKind::AmplitudeProbe => {
            Box::new(AmplitudeProbeState::init(modes, variant.width, variant.depth, &inst.ground.vector, seed))
        }
    })
}

/// Train `variant` on the ground state of `inst`; returns the record and the trained network.
pub fn train_variant(variant: Variant, inst: &Instance, adam: &AdamConfig) -> Result<(TrainRecord, Box<dyn Ansatz<f64>>)> {
    let mut a = build_ansatz(variant, inst)?;
    let rec = train(a.as_mut(), &inst.ground.vector, inst.basis(), adam, inst.spec.seed)?;
    Ok((rec, a))
}

fn orbital(mode: usize, n_sites: usize, kind: SectorKind) -> Orbital {
    match kind {
        SectorKind::Spinless => Orbital::Spinless(mode),
        SectorKind::Spinful if mode < n_sites => Orbital::Up(mode),
        SectorKind::Spinful => Orbital::Down(mode - n_sites),
    }
}

/// Selected diagnostics of a normalized state.
pub fn measure_state(v: &StateVector<f64>, spec: &MeasureSpec) -> Result<Data> {
    let basis = &v.basis;
    let (ns, kind) = (basis.n_sites(), basis.kind());
    let mut d = Data::new();
    if spec.born {
        let s = born_entropy(v);
        let max = (basis.dim() as f64).ln();
        d.insert("born_entropy".into(), json!(s));
        d.insert("born_entropy_max".into(), json!(max));
        d.insert("born_entropy_ratio".into(), json!(if max > 0.0 { s / max } else { 0.0 }));
    }
    if spec.rdm {
        let g = one_rdm(v)?;
        d.insert("rdm_entropy".into(), json!(rdm_entropy(&g)));
        d.insert("rdm_entropy_min".into(), json!((g.particles as f64).ln()));
        d.insert("rdm_entropy_max".into(), json!((g.n_modes as f64).ln()));
        d.insert("occupations".into(), json!(g.occupations()));
    }
    for &c in &spec.cuts {
        if c == CutChoice::Spin && kind == SectorKind::Spinless {
            continue;
        }
        let e = entanglement(v, &c.cut(ns))?;
        d.insert(format!("ent_{}", c.label()), json!(e.entropy));
        if spec.spectrum {
            d.insert(format!("ent_{}_spectrum", c.label()), json!(e.spectrum));
        }
    }
    if spec.x {
        d.insert("x".into(), json!(x_observable(v)?));
    }
    if spec.mutual_information {
        let k = basis.n_modes();
        let mut mi = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let m = mutual_information(v, orbital(i, ns, kind), orbital(j, ns, kind))?;
                mi[i][j] = m;
                mi[j][i] = m;
            }
        }
        d.insert("mi_matrix".into(), json!(mi));
    }
    Ok(d)
}

fn variant_fields(d: &mut Data, v: Variant) {
    d.insert("ansatz".into(), json!(v.kind.name()));
    d.insert("hidden".into(), json!(v.hidden));
    d.insert("depth".into(), json!(v.depth));
    if v.kind == AnsatzKind::AmplitudeProbe {
        d.insert("width".into(), json!(v.width));
    }
}

fn train_fields(d: &mut Data, rec: &TrainRecord, dim: usize) {
    let a = &rec.adam;
    for (k, v) in [
        ("num_params", json!(rec.num_params)),
        ("params_per_dim", json!(rec.num_params as f64 / dim as f64)),
        ("best_delta_o", json!(rec.best_delta_o)),
        ("final_delta_o", json!(rec.final_delta_o)),
        ("steps", json!(rec.steps)),
        ("best_step", json!(rec.best_step)),
        ("stop_reason", json!(rec.stop_reason)),
        ("ridge_events", json!(rec.ridge_events)),
        ("init", json!(format!("free orbitals + noise {INIT_NOISE}"))),
        ("lr", json!(a.lr)),
        ("beta1", json!(a.beta1)),
        ("beta2", json!(a.beta2)),
        ("eps", json!(a.eps)),
        ("max_steps", json!(a.max_steps)),
        ("patience", json!(a.patience)),
        ("tolerance", json!(a.tolerance)),
        ("target_loss", json!(a.target_loss)),
        ("trace_delta_o", json!(rec.trace.iter().map(|s| s.delta_o).collect::<Vec<_>>())),
        ("trace_grad_norm", json!(rec.trace.iter().map(|s| s.grad_norm).collect::<Vec<_>>())),
    ] {
        d.insert(k.into(), v);
    }
}

fn failed(mut d: Data, stage: &str, err: &Error) -> RecordRow {
    d.insert("stage".into(), json!(stage));
    d.insert("error".into(), json!(err.to_string()));
    RecordRow::new(RecordKind::Failed, d)
}

struct Timed(RecordRow, f64);

fn timed<F: FnOnce() -> RecordRow>(f: F) -> Timed {
    let start = Instant::now();
    let row = f();
    Timed(row, start.elapsed().as_secs_f64() * 1e3)
}

/// All rows of one sweep point, in a fixed order.
fn run_point(cfg: &ExperimentConfig, spec: &ModelSpec, filling: Filling, ckpt_dir: &Path, hash: &str) -> Vec<Timed> {
    let mut out = Vec::new();
    let base = {
        let mut d = Data::new();
        d.insert("model".into(), json!(spec.kind.name()));
        d.insert("n_sites".into(), json!(spec.n_sites));
        d.insert("j".into(), json!(spec.j));
        d.insert("u".into(), json!(spec.u));
        d.insert("seed".into(), json!(spec.seed));
        d
    };
    let start = Instant::now();
    let inst = match solve_instance(spec, filling) {
        Ok(i) => i,
        Err(e) => return vec![Timed(failed(base, "solve", &e), start.elapsed().as_secs_f64() * 1e3)],
    };
    let solve_ms = start.elapsed().as_secs_f64() * 1e3;
    let common = inst.describe();
    let dim = inst.basis().dim();

    let Timed(row, ms) = timed(|| {
        let mut d = common.clone();
        d.insert("state".into(), json!("exact"));
        d.insert("energy".into(), json!(inst.ground.energy));
        d.insert("gap".into(), json!(inst.ground.gap));
        d.insert("degenerate".into(), json!(inst.ground.degenerate));
        d.insert("residual".into(), json!(inst.ground.residual));
        d.insert("residual_bound".into(), json!(residual_bound(&inst.hamiltonian.matrix)));
        d.insert("solver".into(), json!(format!("{:?}", inst.ground.method).to_lowercase()));
        match inst.exact_state().and_then(|v| measure_state(&v, &cfg.measures)) {
            Ok(m) => {
                d.extend(m);
                RecordRow::new(RecordKind::Measure, d)
            }
            Err(e) => failed(d, "measure", &e),
        }
    });
    out.push(Timed(row, ms + solve_ms));

    for a in &cfg.ansatz {
        let adam = a.adam.unwrap_or(cfg.adam);
        for variant in a.variants(spec.n_sites) {
            let mut d = common.clone();
            variant_fields(&mut d, variant);
            let start = Instant::now();
            let (rec, net) = match train_variant(variant, &inst, &adam) {
                Ok(x) => x,
                Err(e) => {
                    out.push(Timed(failed(d, "train", &e), start.elapsed().as_secs_f64() * 1e3));
                    continue;
                }
            };
            let train_ms = start.elapsed().as_secs_f64() * 1e3;
            train_fields(&mut d, &rec, dim);
            let psi = amplitudes(net.as_ref(), inst.basis());
            d.insert("energy".into(), json!(inst.energy_of(&psi)));
            if cfg.checkpoints {
                let path = ckpt_dir.join(format!("{hash}-{}.ckpt", out.len()));
                if let Err(e) = std::fs::create_dir_all(ckpt_dir)
                    .map_err(Error::from)
                    .and_then(|_| Checkpoint::from_ansatz(net.as_ref()).write(std::fs::File::create(&path)?))
                {
                    out.push(Timed(failed(d.clone(), "checkpoint", &e), 0.0));
                } else {
                    d.insert("checkpoint".into(), json!(path.file_name().map(|n| n.to_string_lossy().into_owned())));
                }
            }
            out.push(Timed(RecordRow::new(RecordKind::Train, d), train_ms));
            if cfg.measures.trained {
                out.push(timed(|| {
                    let mut d = common.clone();
                    variant_fields(&mut d, variant);
                    d.insert("state".into(), json!("trained"));
                    d.insert("best_delta_o".into(), json!(rec.best_delta_o));
                    match StateVector::new(inst.basis().clone(), psi).and_then(|v| measure_state(&v, &cfg.measures)) {
                        Ok(m) => {
                            d.extend(m);
                            RecordRow::new(RecordKind::Measure, d)
                        }
                        Err(e) => failed(d, "measure", &e),
                    }
                }));
            }
        }
    }
    out
}

/// Options that do not affect record payloads.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Directory receiving `records.jsonl`; the config's output directory is appended.
    pub out_root: PathBuf,
    /// Worker threads; rayon's default when `None`.
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub log: PathBuf,
    pub units: usize,
    pub skipped: usize,
    pub rows_written: usize,
    pub failed_rows: usize,
}

struct Unit {
    spec: ModelSpec,
    filling: Filling,
    hash: String,
}

fn units(cfg: &ExperimentConfig) -> Result<Vec<Unit>> {
    cfg.points()
        .into_iter()
        .map(|spec| {
            let filling = cfg.filling.resolve(spec.kind.sector_kind(), spec.n_sites)?;
            let key = config::UnitKey {
                schema: SCHEMA_VERSION,
                model: &spec,
                filling,
                ansatz: &cfg.ansatz,
                adam: &cfg.adam,
                measures: &cfg.measures,
                checkpoints: cfg.checkpoints,
            };
            Ok(Unit { spec, filling, hash: content_hash(&key)? })
        })
        .collect()
}

fn stamp(rows: Vec<Timed>, hash: &str) -> Vec<RecordRow> {
    let parts = rows.len();
    let now = now_unix();
    rows.into_iter()
        .enumerate()
        .map(|(part, Timed(row, ms))| RecordRow { config_hash: hash.to_string(), part, parts, timestamp: now, wall_ms: ms, ..row })
        .collect()
}

/// Run every pending unit of `cfg`, then the optional scaling fit.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    cfg.validate()?;
    let dir = opts.out_root.join(cfg.output_dir());
    let log_path = dir.join(LOG_FILE);
    let mut log = RecordLog::open(&log_path)?;
    let existing = read_records(&log_path)?;
    let done = completed_units(&existing);
    let all = units(cfg)?;
    let pending: Vec<&Unit> = all.iter().filter(|u| !done.contains(&u.hash)).collect();
    let mut summary = RunSummary { log: log_path.clone(), units: all.len(), skipped: all.len() - pending.len(), ..Default::default() };
    log::info!("{}: {} units, {} already complete", cfg.name, all.len(), summary.skipped);

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = opts.threads {
            b = b.num_threads(t);
        }
        b.build().map_err(|e| Error::Config(e.to_string()))?
    };
    let ckpt_dir = dir.join("checkpoints");
    let (tx, rx) = mpsc::channel::<(usize, Vec<RecordRow>)>();
    let mut write_err = None;
    std::thread::scope(|s| {
        s.spawn(|| {
            pool.install(|| {
                pending.par_iter().enumerate().for_each_with(tx, |tx, (i, u)| {
                    let rows = stamp(run_point(cfg, &u.spec, u.filling, &ckpt_dir, &u.hash), &u.hash);
                    // the receiver only disappears after a write error, which is reported below
                    let _ = tx.send((i, rows));
                });
            });
        });
        // single appender: buffer out-of-order units and write them in sweep order
        let mut next = 0;
        let mut buffer: BTreeMap<usize, Vec<RecordRow>> = BTreeMap::new();
        for (i, rows) in rx {
            buffer.insert(i, rows);
            while let Some(rows) = buffer.remove(&next) {
                if write_err.is_none() {
                    summary.failed_rows += rows.iter().filter(|r| r.kind == RecordKind::Failed).count();
                    summary.rows_written += rows.len();
                    if let Err(e) = log.append(&rows) {
                        write_err = Some(e);
                    }
                }
                next += 1;
            }
        }
    });
    if let Some(e) = write_err {
        return Err(e);
    }

    if let Some(fit) = &cfg.fit {
        let hashes: BTreeSet<&str> = all.iter().map(|u| u.hash.as_str()).collect();
        let fit_hash = content_hash(&(fit, &hashes))?;
        let rows = read_records(&log_path)?;
        if !completed_units(&rows).contains(&fit_hash) {
            let own: Vec<RecordRow> = rows.into_iter().filter(|r| hashes.contains(r.config_hash.as_str())).collect();
            let start = Instant::now();
            let fit_rows = fit_rows(fit, &own);
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let fit_rows = stamp(fit_rows.into_iter().map(|r| Timed(r, ms)).collect(), &fit_hash);
            summary.failed_rows += fit_rows.iter().filter(|r| r.kind == RecordKind::Failed).count();
            summary.rows_written += fit_rows.len();
            log.append(&fit_rows)?;
        }
    }
    Ok(summary)
}

/// Key of one error-versus-parameters curve family.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct CurveKey {
    model: String,
    ansatz: String,
    /// Interaction strength as ordered bits.
    u_bits: u64,
}

fn estimate_fields(d: &mut Data, method: &str, e: &ParamsEstimate, dim: usize) {
    d.insert("stage".into(), json!("estimate"));
    d.insert("method".into(), json!(method));
    d.insert("params".into(), json!(e.params));
    d.insert("sem".into(), json!(e.sem));
    d.insert("seeds".into(), json!(e.seeds));
    d.insert("params_per_dim".into(), json!(e.params / dim as f64));
}

/// Parameter estimates per size and scaling hypotheses across sizes, from the train rows in `rows`.
pub fn fit_rows(fit: &FitSpec, rows: &[RecordRow]) -> Vec<RecordRow> {
    let mut curves: BTreeMap<CurveKey, BTreeMap<usize, (usize, Vec<CurvePoint>)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.kind == RecordKind::Train) {
        let (Some(model), Some(ansatz), Some(u), Some(n), Some(dim), Some(seed), Some(params), Some(delta)) = (
            r.get_str("model"),
            r.get_str("ansatz"),
            r.get_f64("u"),
            r.get_u64("n_sites"),
            r.get_u64("dim"),
            r.get_u64("seed"),
            r.get_f64("num_params"),
            r.get_f64("best_delta_o"),
        ) else {
            continue;
        };
        let key = CurveKey { model: model.into(), ansatz: ansatz.into(), u_bits: u.to_bits() };
        let point = CurvePoint {
            params,
            delta_o: delta,
            n_sites: n as usize,
            seed,
            hidden: r.get_u64("hidden").unwrap_or(0) as usize,
            depth: r.get_u64("depth").unwrap_or(0) as usize,
        };
        curves.entry(key).or_default().entry(n as usize).or_insert((dim as usize, Vec::new())).1.push(point);
    }
    let mut out = Vec::new();
    for (key, sizes) in curves {
        let base = |d: &mut Data| {
            d.insert("model".into(), json!(key.model));
            d.insert("ansatz".into(), json!(key.ansatz));
            d.insert("u".into(), json!(f64::from_bits(key.u_bits)));
            d.insert("target".into(), json!(fit.target));
            d.insert("family".into(), json!(fit.family));
        };
        for (method, global) in [("piecewise", false), ("global", true)] {
            let mut estimates = Vec::new();
            for (&n, (dim, points)) in &sizes {
                let mut d = Data::new();
                base(&mut d);
                d.insert("n_sites".into(), json!(n));
                d.insert("dim".into(), json!(dim));
                let est = if global {
                    global_invert(points, fit.target, fit.family, fit.exclude_m0 && key.ansatz == "hfds")
                } else {
                    piecewise_invert(points, fit.target, fit.family)
                };
                match est {
                    Ok(e) => {
                        estimate_fields(&mut d, method, &e, *dim);
                        if let Some(sem) = e.sem {
                            estimates.push(SizeEstimate { n_sites: n, dim: *dim, params: e.params, sem });
                        }
                        out.push(RecordRow::new(RecordKind::Fit, d));
                    }
                    Err(e) => {
                        d.insert("method".into(), json!(method));
                        out.push(failed(d, "estimate", &e));
                    }
                }
            }
            let mut d = Data::new();
            base(&mut d);
            d.insert("method".into(), json!(method));
            match compare_hypotheses(&estimates) {
                Ok(fits) => {
                    for f in fits {
                        let mut d = d.clone();
                        d.insert("stage".into(), json!("hypothesis"));
                        d.insert("hypothesis".into(), json!(f.hypothesis));
                        d.insert("exponent".into(), json!(f.exponent));
                        d.insert("prefactor".into(), json!(f.prefactor));
                        d.insert("rme".into(), json!(f.rme));
                        d.insert("sizes".into(), json!(f.sizes));
                        d.insert("underdetermined".into(), json!(f.underdetermined));
                        d.insert("weighting".into(), json!(f.weighting));
                        out.push(RecordRow::new(RecordKind::Fit, d));
                    }
                }
                Err(e) => out.push(failed(d, "hypothesis", &e)),
            }
        }
    }
    out
}
