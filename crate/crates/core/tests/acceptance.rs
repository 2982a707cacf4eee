//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Pass criterion numbers to run a
//! subset, e.g. `cargo test --release --test acceptance -- 1 2 9`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex;

use hfds_core::ansatz::{Ansatz, SlaterState};
use hfds_core::eigensolver::{ground_state, ground_state_with, residual_bound, residual_norm, SolverOptions};
use hfds_core::fock::{Filling, SectorBasis, SectorKind};
use hfds_core::measures::{born_entropy, entanglement, one_rdm, rdm_entropy, Cut, StateVector};
use hfds_core::models::{build_hamiltonian, build_hamiltonian_with, draw_couplings, ModelKind, ModelSpec};
use hfds_core::rng::CounterRng;
use hfds_core::runner::{
    build_ansatz, read_records, run, solve_instance, AnsatzKind, AnsatzSpec, ExperimentConfig, FillingSpec, FitSpec,
    MeasureSpec, RecordKind, RecordRow, RunOptions, Sweep, Variant,
};
use hfds_core::scaling::{compare_hypotheses, piecewise_invert, CurvePoint, Family, Hypothesis, SizeEstimate};
use hfds_core::training::{amplitudes, AdamConfig};

type C64 = Complex<f64>;
type Verdict = Result<String, String>;

const SIX_SEEDS: [u64; 6] = [0, 1, 2, 3, 4, 5];

struct Ctx {
    root: PathBuf,
    /// Every runner config executed so far, for the determinism rerun.
    ran: Vec<(ExperimentConfig, PathBuf)>,
}

impl Ctx {
    fn run(&mut self, cfg: ExperimentConfig) -> Result<Vec<RecordRow>, String> {
        let summary = run(&cfg, &RunOptions { out_root: self.root.join("first"), threads: None }).map_err(|e| e.to_string())?;
        let rows = read_records(&summary.log).map_err(|e| e.to_string())?;
        self.ran.push((cfg, summary.log));
        // a fit that cannot be made stays in the log; criteria that need it look for its rows
        let fit_stage = |r: &RecordRow| matches!(r.get_str("stage"), Some("estimate" | "hypothesis"));
        if let Some(f) = rows.iter().find(|r| r.kind == RecordKind::Failed && !fit_stage(r)) {
            return Err(format!("failed row: {:?}", f.data));
        }
        for r in exact_rows(&rows) {
            let (res, bound) = (r.get_f64("residual").unwrap_or(f64::NAN), r.get_f64("residual_bound").unwrap_or(f64::NAN));
            if !(res <= bound) {
                return Err(format!("residual {res:e} above bound {bound:e} for {:?}", r.data));
            }
        }
        Ok(rows)
    }
}

fn config(name: &str, model: ModelKind, n_sites: &[usize], u: &[f64], seeds: &[u64]) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        model,
        j: None,
        filling: FillingSpec::Half,
        ansatz: Vec::new(),
        adam: AdamConfig::default(),
        seeds: seeds.to_vec(),
        sweep: Sweep { n_sites: n_sites.to_vec(), u: u.to_vec(), j_plus_u: None },
        measures: MeasureSpec { cuts: Vec::new(), trained: false, ..MeasureSpec::default() },
        fit: None,
        output: None,
        checkpoints: false,
    }
}

fn hfds(hidden: &[usize]) -> AnsatzSpec {
    AnsatzSpec::new(AnsatzKind::Hfds, hidden, &[0])
}

fn exact_rows(rows: &[RecordRow]) -> impl Iterator<Item = &RecordRow> {
    rows.iter().filter(|r| r.kind == RecordKind::Measure && r.get_str("state") == Some("exact"))
}

fn train_rows(rows: &[RecordRow]) -> impl Iterator<Item = &RecordRow> {
    rows.iter().filter(|r| r.kind == RecordKind::Train)
}

fn field(r: &RecordRow, key: &str) -> f64 {
    r.get_f64(key).unwrap_or_else(|| panic!("row without '{key}': {:?}", r.data))
}

fn median(mut xs: Vec<f64>) -> f64 {
    assert!(!xs.is_empty(), "median of nothing");
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2])
    }
}

/// Ranks starting at 1; tied values share their average rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    if e > limit {
        return Err(format!("took {:.1} s, limit {:.0} s", e.as_secs_f64(), limit.as_secs_f64()));
    }
    Ok(())
}

fn check(ok: bool, msg: String) -> Verdict {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------------------

fn c1_dimer_oracle(_: &mut Ctx) -> Verdict {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for u in [0.0, 1.0, 8.0] {
        // J / sqrt(2) * j2 gives unit hopping between the two sites
        let spec = ModelSpec::new(ModelKind::Hubbard, 2, u, 0).with_j(2f64.sqrt());
        let mut draw = draw_couplings(&spec);
        let (zero, one) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        draw.j2 = vec![zero, one, one, zero];
        let basis = Arc::new(SectorBasis::half_filled(SectorKind::Spinful, 2).map_err(|e| e.to_string())?);
        let h = build_hamiltonian_with::<f64>(&spec, basis, &draw).map_err(|e| e.to_string())?;
        let g = ground_state(&h).map_err(|e| e.to_string())?;
        let exact = (u - (u * u + 16.0).sqrt()) / 2.0;
        worst = worst.max((g.energy - exact).abs());
        if g.residual > residual_bound(&h.matrix) {
            return Err(format!("dimer U={u}: residual {:e}", g.residual));
        }
    }
    if worst > 1e-10 {
        return Err(format!("dimer energy off by {worst:e}"));
    }
    // residual bound on random instances of every model, dense and Lanczos paths
    let mut solved = 3;
    for kind in [ModelKind::Syk, ModelKind::Syk1d, ModelKind::Hubbard, ModelKind::Density, ModelKind::Pair, ModelKind::Spin] {
        for n in [2usize, 3, 4] {
            let n = if kind.sector_kind() == SectorKind::Spinless { 2 * n } else { n };
            let spec = ModelSpec::new(kind, n, 1.5, n as u64).with_j(1.0);
            let basis = Arc::new(spec.half_filled_basis().map_err(|e| e.to_string())?);
            let h = build_hamiltonian::<f64>(&spec, basis).map_err(|e| e.to_string())?;
            let bound = residual_bound(&h.matrix);
            let dense = ground_state(&h).map_err(|e| e.to_string())?;
            let opts = SolverOptions { dense_max_dim: 0, ..SolverOptions::default() };
            let lanczos = ground_state_with(&h.matrix, &opts).map_err(|e| e.to_string())?;
            for g in [&dense, &lanczos] {
                let r = residual_norm(&h.matrix, g.energy, &g.vector);
                if !(g.residual <= bound && r <= bound) {
                    return Err(format!("{} N_S={n}: residual {:e} above {bound:e}", kind.name(), g.residual));
                }
            }
            if (dense.energy - lanczos.energy).abs() > 1e-10 * dense.energy.abs().max(1.0) {
                return Err(format!("{} N_S={n}: dense {} vs lanczos {}", kind.name(), dense.energy, lanczos.energy));
            }
            solved += 2;
        }
    }
    within(t0, Duration::from_secs(1))?;
    Ok(format!("dimer max |dE| = {worst:.1e}; {solved} solves within the residual bound"))
}

/// Central difference of `psi(n)` along parameter `k`.
fn central_difference(a: &mut dyn Ansatz<f64>, index: usize, basis: &SectorBasis, k: usize, h: f64) -> C64 {
    let n = basis.config(index);
    let p0 = a.params();
    let mut p = p0.clone();
    p[k] = p0[k] + h;
    a.set_params(&p);
    let plus = a.amplitude(n, index);
    p[k] = p0[k] - h;
    a.set_params(&p);
    let minus = a.amplitude(n, index);
    a.set_params(&p0);
    (plus - minus) / (2.0 * h)
}

fn c2_gradients(_: &mut Ctx) -> Verdict {
    const H: f64 = 1e-5;
    let t0 = Instant::now();
    let instances = [
        solve_instance(&ModelSpec::new(ModelKind::Hubbard, 4, 2.0, 7), Filling::half(SectorKind::Spinful, 4)),
        solve_instance(&ModelSpec::new(ModelKind::Pair, 3, 1.0, 8), Filling::Spinful { n_up: 2, n_down: 1 }),
        solve_instance(&ModelSpec::new(ModelKind::Syk, 6, 1.0, 9).with_j(0.5), Filling::half(SectorKind::Spinless, 6)),
    ];
    let v = |kind, hidden, depth, width| Variant { kind, hidden, depth, width };
    let variants = [
        v(AnsatzKind::Hfds, 0, 0, 0),
        v(AnsatzKind::Hfds, 1, 0, 0),
        v(AnsatzKind::Hfds, 2, 1, 0),
        v(AnsatzKind::Hfds, 1, 2, 0),
        v(AnsatzKind::Slater, 0, 0, 0),
        v(AnsatzKind::Gutzwiller, 0, 0, 0),
        v(AnsatzKind::PhaseProbe, 0, 0, 0),
        v(AnsatzKind::AmplitudeProbe, 0, 1, 6),
        v(AnsatzKind::AmplitudeProbe, 0, 2, 5),
    ];
    let mut rng = CounterRng::stream(2024, "acceptance-gradients");
    let (mut triples, mut worst, mut worst_at) = (0usize, 0f64, String::new());
    for inst in &instances {
        let inst = inst.as_ref().map_err(|e| e.to_string())?;
        let basis = inst.basis().clone();
        for &var in &variants {
            if var.kind == AnsatzKind::Gutzwiller && basis.kind() != SectorKind::Spinful {
                continue;
            }
            let mut a = build_ansatz(var, inst).map_err(|e| e.to_string())?;
            for _state in 0..3 {
                // a random point in parameter space
                let p: Vec<f64> = a.params().iter().map(|x| x + 0.3 * rng.normal()).collect();
                a.set_params(&p);
                for _ in 0..10 {
                    let index = (rng.next_u64() % basis.dim() as u64) as usize;
                    let k = (rng.next_u64() % p.len() as u64) as usize;
                    let n = basis.config(index);
                    let (mut re, mut im) = (vec![0.0; p.len()], vec![0.0; p.len()]);
                    a.accumulate_gradient(n, index, C64::new(1.0, 0.0), &mut re, false).map_err(|e| e.to_string())?;
                    a.accumulate_gradient(n, index, C64::new(0.0, 1.0), &mut im, false).map_err(|e| e.to_string())?;
                    let analytic: Vec<C64> = re.iter().zip(&im).map(|(&x, &y)| C64::new(x, y)).collect();
                    let fd = central_difference(a.as_mut(), index, &basis, k, H);
                    // components below the roundoff of the difference quotient, eps |psi| / h, cannot be resolved to 1e-6
                    let floor = 1e6 * f64::EPSILON * a.amplitude(n, index).norm() / H;
                    let scale = analytic[k].norm().max(fd.norm()).max(floor).max(f64::MIN_POSITIVE);
                    let err = (analytic[k] - fd).norm() / scale;
                    if err > worst {
                        worst = err;
                        worst_at = format!("{} on {} (k={k})", a.name(), inst.spec.kind.name());
                    }
                    triples += 1;
                }
            }
        }
    }
    within(t0, Duration::from_secs(60))?;
    let msg = format!("{triples} triples, worst relative error {worst:.1e} ({worst_at})");
    check(triples >= 200 && worst <= 1e-6, msg)
}

fn c3_free_fermions(ctx: &mut Ctx) -> Verdict {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for m in ModelKind::SPINFUL {
        let mut c = config(&format!("acc3-{}", m.name()), m, &[6], &[0.0], &SIX_SEEDS);
        c.ansatz = vec![hfds(&[0])];
        let rows = ctx.run(c)?;
        for r in train_rows(&rows) {
            if field(r, "best_step") > 5000.0 {
                return Err(format!("best step beyond 5000: {:?}", r.data));
            }
            worst = worst.max(field(r, "best_delta_o"));
            count += 1;
        }
    }
    within(t0, Duration::from_secs(600))?;
    check(count == 24 && worst < 1e-8, format!("{count} trainings, worst best dO = {worst:.2e}"))
}

fn random_state(rng: &mut CounterRng) -> Result<StateVector<f64>, String> {
    let n_sites = 2 + (rng.next_u64() % 5) as usize;
    let filling = if rng.uniform() < 0.5 {
        Filling::Spinless { n: 1 + (rng.next_u64() % n_sites as u64) as usize }
    } else {
        let n_up = (rng.next_u64() % (n_sites as u64 + 1)) as usize;
        let n_down = ((rng.next_u64() % n_sites as u64) as usize + 1).min(n_sites);
        Filling::Spinful { n_up, n_down }
    };
    let basis = Arc::new(SectorBasis::enumerate(n_sites, filling).map_err(|e| e.to_string())?);
    let dim = basis.dim();
    let amps: Vec<C64> = match rng.next_u64() % 3 {
        0 => (0..dim).map(|_| rng.complex_normal()).collect(),
        1 => {
            // a handful of configurations
            let mut a = vec![C64::new(0.0, 0.0); dim];
            for _ in 0..1 + rng.next_u64() % 4 {
                a[(rng.next_u64() % dim as u64) as usize] = rng.complex_normal();
            }
            if a.iter().all(|z| z.norm() == 0.0) {
                a[0] = C64::new(1.0, 0.0);
            }
            a
        }
        _ => {
            let (modes, np) = (basis.n_modes(), basis.particles());
            let phi: Vec<C64> = (0..modes * np).map(|_| rng.complex_normal()).collect();
            amplitudes(&SlaterState::new(modes, np, phi), &basis)
        }
    };
    StateVector::new(basis, amps).map_err(|e| e.to_string())
}

fn c4_entropy_bounds(_: &mut Ctx) -> Verdict {
    let t0 = Instant::now();
    let mut rng = CounterRng::stream(7, "acceptance-states");
    let (mut cuts, mut min_gap, mut worst_occ, mut worst_low) = (0usize, f64::INFINITY, 0f64, 0f64);
    for s in 0..500 {
        let v = random_state(&mut rng)?;
        let basis = v.basis.clone();
        let (n_sites, kind) = (basis.n_sites(), basis.kind());
        let s_psi = born_entropy(&v);
        let mut all_cuts: Vec<Cut> =
            (1u64..(1 << n_sites) - 1).map(|m| Cut::Sites((0..n_sites).filter(|i| m >> i & 1 == 1).collect())).collect();
        if kind == SectorKind::Spinful {
            all_cuts.push(Cut::SpinSector);
        }
        for cut in &all_cuts {
            let e = entanglement(&v, cut).map_err(|e| e.to_string())?;
            min_gap = min_gap.min(s_psi - e.entropy);
            if e.entropy > s_psi + 1e-12 {
                return Err(format!("state {s}: entanglement {} exceeds S_psi {s_psi} on {cut:?}", e.entropy));
            }
            cuts += 1;
        }
        let g = one_rdm(&v).map_err(|e| e.to_string())?;
        let s = rdm_entropy(&g);
        let (lo, hi) = ((g.particles as f64).ln(), (g.n_modes as f64).ln());
        worst_low = worst_low.max(lo - s);
        if s < lo - 1e-10 || s > hi + 1e-12 {
            return Err(format!("S(gamma/N) = {s} outside [{lo}, {hi}]"));
        }
        for x in g.occupations() {
            worst_occ = worst_occ.max(-x).max(x - 1.0);
            if !(-1e-12..=1.0 + 1e-12).contains(&x) {
                return Err(format!("1-RDM eigenvalue {x}"));
            }
        }
    }
    within(t0, Duration::from_secs(300))?;
    Ok(format!(
        "500 states, {cuts} cuts; min S_psi - S_A = {min_gap:.1e}, max log N - S = {worst_low:.1e}, occupation overshoot {worst_occ:.1e}"
    ))
}

fn c5_slater_anchor(ctx: &mut Ctx) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for m in ModelKind::MAIN {
        let mut c = config(&format!("acc5-{}", m.name()), m, &[4, 6, 8], &[0.0], &[0, 1, 2]);
        // the SYK default J = 0 would leave nothing at U = 0
        c.j = Some(1.0);
        let rows = ctx.run(c)?;
        for r in exact_rows(&rows) {
            worst = worst.max((field(r, "rdm_entropy") - field(r, "n_particles").ln()).abs());
            count += 1;
        }
    }
    check(count == 45 && worst <= 1e-9, format!("{count} ground states, max |S(gamma/N) - log N| = {worst:.1e}"))
}

fn c6_strong_coupling(ctx: &mut Ctx) -> Verdict {
    let t0 = Instant::now();
    let mut trained = config("acc6-train", ModelKind::Hubbard, &[8], &[3.0, 20.0], &SIX_SEEDS);
    trained.ansatz = vec![hfds(&[1])];
    let rows = ctx.run(trained)?;
    let weak = ctx.run(config("acc6-weak", ModelKind::Hubbard, &[8], &[0.5], &SIX_SEEDS))?;

    let delta_at = |u: f64| median(train_rows(&rows).filter(|r| field(r, "u") == u).map(|r| field(r, "best_delta_o")).collect());
    let ratio = |rows: &[RecordRow], u: f64| {
        median(exact_rows(rows).filter(|r| field(r, "u") == u).map(|r| field(r, "born_entropy") / field(r, "dim").ln()).collect())
    };
    let (d3, d20) = (delta_at(3.0), delta_at(20.0));
    let (s05, s20) = (ratio(&weak, 0.5), ratio(&rows, 20.0));
    within(t0, Duration::from_secs(7200))?;
    check(d20 < d3 && s20 < s05, format!("median dO: U=3 {d3:.3e}, U=20 {d20:.3e}; median S_psi/log dim: U=0.5 {s05:.4}, U=20 {s20:.4}"))
}

fn c7_syk_correlation(ctx: &mut Ctx) -> Verdict {
    let t0 = Instant::now();
    let us: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let mut c = config("acc7", ModelKind::Syk, &[10], &us, &[0, 1, 2]);
    c.sweep.j_plus_u = Some(1.0);
    c.ansatz = vec![hfds(&[1])];
    c.measures.cuts = vec![hfds_core::runner::CutChoice::Half];
    let rows = ctx.run(c)?;

    // one point per (U, seed) instance
    let key = |r: &RecordRow| (field(r, "u").to_bits(), r.get_u64("seed"));
    let exact: BTreeMap<_, &RecordRow> = exact_rows(&rows).map(|r| (key(r), r)).collect();
    let (mut delta, mut s_rdm, mut s_ent) = (Vec::new(), Vec::new(), Vec::new());
    for r in train_rows(&rows) {
        let e = exact.get(&key(r)).ok_or("train row without exact row")?;
        delta.push(field(r, "best_delta_o"));
        s_rdm.push(field(e, "rdm_entropy"));
        s_ent.push(field(e, "ent_half"));
    }
    let (rho_rdm, rho_ent) = (spearman(&delta, &s_rdm), spearman(&delta, &s_ent));
    within(t0, Duration::from_secs(3 * 3600))?;
    check(
        delta.len() == 33 && rho_rdm >= 0.8 && rho_ent.abs() <= 0.5,
        format!("{} points: rho(dO, S(gamma)) = {rho_rdm:.3}, rho(dO, S_half) = {rho_ent:.3}", delta.len()),
    )
}

fn c8_pairing_limits(ctx: &mut Ctx) -> Verdict {
    let mut medians = Vec::new();
    for m in [ModelKind::Spin, ModelKind::Pair] {
        let mut c = config(&format!("acc8-{}", m.name()), m, &[8], &[1.0], &SIX_SEEDS);
        c.j = Some(0.01);
        c.measures.x = true;
        let rows = ctx.run(c)?;
        medians.push(median(exact_rows(&rows).map(|r| field(r, "x")).collect()));
    }
    check(medians[0] < 0.05 && medians[1] > 0.95, format!("median <x>: spin {:.2e}, pair {:.6}", medians[0], medians[1]))
}

fn spinful_half_dim(n: usize) -> usize {
    let k = n / 2;
    let c = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
    c * c
}

fn c9_fit_self_test(_: &mut Ctx) -> Verdict {
    let t0 = Instant::now();
    let (c, m, target) = (0.5, 3.6, 0.05);
    let mut rng = CounterRng::stream(9, "acceptance-synthetic");
    let mut estimates = Vec::new();
    for n in [4usize, 6, 8, 10, 12] {
        let p_true = c * (n as f64).powf(m);
        let mut points = Vec::new();
        for seed in 0..6u64 {
            let p_seed = p_true * (1.0 + 0.05 * rng.normal());
            // an algebraic error curve per pseudo-seed crossing the target at p_seed
            for k in -3..=3 {
                let params = p_true * 2f64.powi(k);
                points.push(CurvePoint { params, delta_o: target * p_seed / params, n_sites: n, seed, hidden: 0, depth: 0 });
            }
        }
        let e = piecewise_invert(&points, target, Family::Algebraic).map_err(|e| e.to_string())?;
        estimates.push(SizeEstimate { n_sites: n, dim: spinful_half_dim(n), params: e.params, sem: e.sem.ok_or("no SEM")? });
    }
    let [poly, expo] = compare_hypotheses(&estimates).map_err(|e| e.to_string())?;
    assert_eq!((poly.hypothesis, expo.hypothesis), (Hypothesis::Polynomial, Hypothesis::Exponential));
    within(t0, Duration::from_secs(60))?;
    check(
        (poly.exponent - m).abs() <= 0.15 && poly.rme < 2.0 && expo.rme > 5.0,
        format!("exponent {:.3} (true {m}), RME polynomial {:.2}, exponential {:.1}", poly.exponent, poly.rme, expo.rme),
    )
}

/// Piecewise params/dim at the fit target, by size.
fn params_per_dim(rows: &[RecordRow], model: &str, ansatz: &str) -> Vec<(u64, f64)> {
    let mut v: Vec<(u64, f64)> = rows
        .iter()
        .filter(|r| {
            r.kind == RecordKind::Fit
                && r.get_str("stage") == Some("estimate")
                && r.get_str("method") == Some("piecewise")
                && r.get_str("model") == Some(model)
                && r.get_str("ansatz") == Some(ansatz)
        })
        .map(|r| (r.get_u64("n_sites").unwrap_or(0), field(r, "params_per_dim")))
        .collect();
    v.sort_by_key(|p| p.0);
    v
}

fn fmt_curve(v: &[(u64, f64)]) -> String {
    v.iter().map(|(n, x)| format!("{n}:{x:.3}")).collect::<Vec<_>>().join(" ")
}

fn c10_area_law(ctx: &mut Ctx) -> Verdict {
    let t0 = Instant::now();
    let mut curves = Vec::new();
    for m in [ModelKind::Syk1d, ModelKind::Syk] {
        let mut c = config(&format!("acc10-{}", m.name()), m, &[6, 8, 10], &[1.0], &SIX_SEEDS);
        c.j = Some(0.0);
        c.ansatz = vec![hfds(&[0, 1, 2, 3, 4])];
        c.fit = Some(FitSpec { target: 0.05, family: Family::Algebraic, exclude_m0: true });
        let rows = ctx.run(c)?;
        curves.push(params_per_dim(&rows, m.name(), "hfds"));
    }
    let (local, full) = (&curves[0], &curves[1]);
    let decreasing = local.len() == 3 && local.windows(2).all(|w| w[1].1 < w[0].1);
    let spread = full.iter().map(|p| p.1).fold(0.0, f64::max) / full.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    within(t0, Duration::from_secs(6 * 3600))?;
    check(
        decreasing && full.len() == 3 && spread < 2.0,
        format!("params/dim 1D SYK [{}], SYK [{}] (spread {spread:.2})", fmt_curve(local), fmt_curve(full)),
    )
}

fn c11_probes(ctx: &mut Ctx) -> Verdict {
    let mut c = config("acc11", ModelKind::Syk, &[8, 10, 12], &[1.0], &[0, 1, 2]);
    c.ansatz = vec![AnsatzSpec { width: vec![1, 2, 4, 8, 16, 32, 64], ..AnsatzSpec::new(AnsatzKind::AmplitudeProbe, &[0], &[1]) }];
    c.fit = Some(FitSpec { target: 0.05, family: Family::Algebraic, exclude_m0: false });
    let rows = ctx.run(c)?;
    let curve = params_per_dim(&rows, "syk", "amplitude-probe");
    let spread = curve.iter().map(|p| p.1).fold(0.0, f64::max) / curve.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    check(curve.len() == 3 && spread < 2.0, format!("params/dim [{}] (spread {spread:.2})", fmt_curve(&curve)))
}

fn payloads(path: &Path) -> Result<Vec<String>, String> {
    read_records(path).map_err(|e| e.to_string())?.iter().map(|r| r.payload().map_err(|e| e.to_string())).collect()
}

fn c12_determinism(ctx: &mut Ctx) -> Verdict {
    if ctx.ran.is_empty() {
        // run standalone: use the cheap configs
        c5_slater_anchor(ctx)?;
        c8_pairing_limits(ctx)?;
    }
    let mut rows = 0;
    let ran = std::mem::take(&mut ctx.ran);
    for (cfg, first) in &ran {
        let opts = RunOptions { out_root: ctx.root.join("second"), threads: Some(1) };
        let again = run(cfg, &opts).map_err(|e| e.to_string())?;
        let (a, b) = (payloads(first)?, payloads(&again.log)?);
        if a != b {
            let at = a.iter().zip(&b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
            return Err(format!("{}: payloads differ at row {at} ({} vs {} rows)", cfg.name, a.len(), b.len()));
        }
        rows += a.len();
    }
    ctx.ran = ran;
    Ok(format!("{} configs rerun single-threaded, {rows} payloads identical", ctx.ran.len()))
}

type Criterion = (u32, &'static str, fn(&mut Ctx) -> Verdict);

const CRITERIA: [Criterion; 12] = [
    (1, "exact diagonalization oracle", c1_dimer_oracle),
    (2, "gradient correctness", c2_gradients),
    (3, "free-fermion exactness", c3_free_fermions),
    (4, "entropy bounds", c4_entropy_bounds),
    (5, "Slater 1-RDM anchor", c5_slater_anchor),
    (6, "strong-coupling trend", c6_strong_coupling),
    (7, "SYK correlation coupling", c7_syk_correlation),
    (8, "pairing-model x limits", c8_pairing_limits),
    (9, "scaling-fit self-test", c9_fit_self_test),
    (10, "area-law contrast", c10_area_law),
    (11, "probe-state behaviour", c11_probes),
    (12, "determinism", c12_determinism),
];

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut ctx = Ctx { root: dir.path().to_path_buf(), ran: Vec::new() };
    let mut failures = 0;
    for (id, name, f) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&mut ctx)))
            .unwrap_or_else(|p| Err(format!("panic: {}", p.downcast_ref::<String>().cloned().unwrap_or_default())));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {id:>2} PASS  {name}: {msg} [{secs:.1} s]"),
            Err(msg) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name}: {msg} [{secs:.1} s]");
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
