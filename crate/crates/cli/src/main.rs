//! `hfds`: command-line front end of the ground-state laboratory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hfds_core::ansatz::Checkpoint;
use hfds_core::fock::Filling;
use hfds_core::models::{ModelKind, ModelSpec};
use hfds_core::runner::{
    self, build_ansatz, export, fit_rows, measure_state, read_records, recipes, solve_instance, train_variant, AnsatzKind,
    CutChoice, ExperimentConfig, ExportFormat, FillingSpec, FitSpec, MeasureSpec, RunOptions, Variant,
};
use hfds_core::scaling::Family;
use hfds_core::training::{amplitudes, AdamConfig};

#[derive(Parser)]
#[command(name = "hfds", version, about = "Exact and variational ground states of random fermionic models")]
struct Cli {
    /// Coupling seed for single-instance commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output root directory.
    #[arg(long, global = true, env = "HFDS_OUT", default_value = "runs")]
    out: PathBuf,
    /// Worker threads (all cores when omitted).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw couplings and summarize the Hamiltonian.
    Gen(PointArgs),
    /// Exact ground state of one instance.
    Solve(PointArgs),
    /// Train one network on the exact ground state.
    Train {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        #[arg(long, default_value_t = 5000)]
        steps: usize,
        /// Write the best parameters here.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Complexity measures of the exact state, or of a trained network given `--checkpoint`.
    Measure {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Comma-separated cuts: half, spin.
        #[arg(long, default_value = "half")]
        cuts: String,
        #[arg(long)]
        spectrum: bool,
        #[arg(long)]
        x: bool,
        #[arg(long)]
        mutual_information: bool,
    },
    /// Scaling fit over the train rows of a record log.
    Fit {
        records: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        target: f64,
        #[arg(long, default_value = "algebraic")]
        family: String,
        /// Keep M = 0 networks in the global fit.
        #[arg(long)]
        keep_m0: bool,
    },
    /// Run a built-in recipe or a TOML experiment file.
    Run {
        /// Recipe name or path to a config file.
        target: String,
        /// Print the configuration(s) as TOML instead of running.
        #[arg(long)]
        dump: bool,
    },
    /// Flat per-kind exports of a record log.
    Export {
        records: PathBuf,
        /// jsonl, csv or both.
        #[arg(long, default_value = "both")]
        format: String,
        /// Destination directory; next to the log when omitted.
        #[arg(long = "to")]
        to: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, default_value = "hubbard")]
    model: ModelKind,
    #[arg(long, default_value_t = 4)]
    sites: usize,
    #[arg(long, default_value_t = 3.0)]
    u: f64,
    /// Kinetic scale; the model default when omitted.
    #[arg(long)]
    j: Option<f64>,
    /// half, doped:<holes>, <n> (spinless) or <n_up>,<n_down> (spinful).
    #[arg(long, default_value = "half")]
    filling: String,
}

#[derive(Args)]
struct NetArgs {
    #[arg(long, default_value = "hfds")]
    ansatz: AnsatzKind,
    /// Hidden particles M.
    #[arg(long, default_value_t = 1)]
    hidden: usize,
    /// Hidden MLP layers.
    #[arg(long, default_value_t = 0)]
    depth: usize,
    /// Amplitude-probe width (4 N_S when omitted).
    #[arg(long)]
    width: Option<usize>,
}

impl PointArgs {
    fn spec(&self, seed: u64) -> ModelSpec {
        let s = ModelSpec::new(self.model, self.sites, self.u, seed);
        self.j.map_or(s, |j| s.with_j(j))
    }

    fn filling(&self) -> Result<Filling> {
        let spec = match self.filling.as_str() {
            "half" => FillingSpec::Half,
            f if f.starts_with("doped:") => FillingSpec::Doped { holes: f["doped:".len()..].parse()? },
            f if f.contains(',') => {
                let (a, b) = f.split_once(',').unwrap_or_default();
                FillingSpec::Spinful { n_up: a.trim().parse()?, n_down: b.trim().parse()? }
            }
            f => FillingSpec::Spinless { n: f.parse().with_context(|| format!("filling '{f}'"))? },
        };
        Ok(spec.resolve(self.model.sector_kind(), self.sites)?)
    }
}

impl NetArgs {
    fn variant(&self, n_sites: usize) -> Variant {
        let width = self.width.unwrap_or(4 * n_sites);
        match self.ansatz {
            AnsatzKind::Hfds => Variant { kind: self.ansatz, hidden: self.hidden, depth: self.depth, width: 0 },
            AnsatzKind::AmplitudeProbe => Variant { kind: self.ansatz, hidden: 0, depth: self.depth.max(1), width },
            kind => Variant { kind, hidden: 0, depth: 0, width: 0 },
        }
    }
}

fn print(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn config_or_recipe(target: &str) -> Result<Vec<ExperimentConfig>> {
    let path = Path::new(target);
    if path.extension().is_some_and(|e| e == "toml") || path.exists() {
        return Ok(vec![ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?]);
    }
    Ok(recipes::recipe(target)?)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let (Some(t), false) = (cli.threads, matches!(cli.command, Command::Run { .. })) {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Gen(p) => {
            let spec = p.spec(cli.seed);
            let inst = hfds_core::fock::SectorBasis::enumerate(spec.n_sites, p.filling()?)?;
            let h = hfds_core::models::build_hamiltonian::<f64>(&spec, std::sync::Arc::new(inst))?;
            print(&json!({
                "spec": spec,
                "dim": h.dim(),
                "nnz": h.matrix.nnz(),
                "max_abs": h.matrix.max_abs(),
                "hermiticity_error": h.matrix.hermiticity_error(),
                "diagonal": h.matrix.is_diagonal(),
            }))
        }
        Command::Solve(p) => {
            let inst = solve_instance(&p.spec(cli.seed), p.filling()?)?;
            let g = &inst.ground;
            print(&json!({
                "spec": inst.spec,
                "dim": inst.basis().dim(),
                "energy": g.energy,
                "gap": g.gap,
                "degenerate": g.degenerate,
                "residual": g.residual,
                "method": format!("{:?}", g.method).to_lowercase(),
            }))
        }
        Command::Train { point, net, lr, steps, checkpoint } => {
            let inst = solve_instance(&point.spec(cli.seed), point.filling()?)?;
            let adam = AdamConfig { lr: *lr, max_steps: *steps, ..AdamConfig::default() };
            let (rec, trained) = train_variant(net.variant(point.sites), &inst, &adam)?;
            if let Some(path) = checkpoint {
                Checkpoint::from_ansatz(trained.as_ref()).write(std::fs::File::create(path)?)?;
            }
            print(&json!({
                "ansatz": rec.ansatz,
                "num_params": rec.num_params,
                "dim": inst.basis().dim(),
                "best_delta_o": rec.best_delta_o,
                "best_step": rec.best_step,
                "steps": rec.steps,
                "stop_reason": rec.stop_reason,
                "ridge_events": rec.ridge_events,
            }))
        }
        Command::Measure { point, net, checkpoint, cuts, spectrum, x, mutual_information } => {
            let inst = solve_instance(&point.spec(cli.seed), point.filling()?)?;
            let cuts = cuts
                .split(',')
                .filter(|c| !c.is_empty())
                .map(|c| match c.trim() {
                    "half" => Ok(CutChoice::Half),
                    "spin" => Ok(CutChoice::Spin),
                    other => bail!("unknown cut '{other}'"),
                })
                .collect::<Result<Vec<_>>>()?;
            let spec = MeasureSpec { cuts, spectrum: *spectrum, x: *x, mutual_information: *mutual_information, ..MeasureSpec::default() };
            let state = match checkpoint {
                None => inst.exact_state()?,
                Some(path) => {
                    let mut a = build_ansatz(net.variant(point.sites), &inst)?;
                    Checkpoint::read(std::fs::File::open(path)?)?.apply_to(a.as_mut())?;
                    hfds_core::measures::StateVector::new(inst.basis().clone(), amplitudes(a.as_ref(), inst.basis()))?
                }
            };
            print(&Value::Object(measure_state(&state, &spec)?.into_iter().collect()))
        }
        Command::Fit { records, target, family, keep_m0 } => {
            let family = match family.as_str() {
                "algebraic" => Family::Algebraic,
                "exponential" => Family::Exponential,
                other => bail!("unknown family '{other}'"),
            };
            let rows = read_records(records)?;
            for row in fit_rows(&FitSpec { target: *target, family, exclude_m0: !keep_m0 }, &rows) {
                println!("{}", serde_json::to_string(&json!({ "kind": row.kind, "data": row.data }))?);
            }
            Ok(())
        }
        Command::Run { target, dump } => {
            let configs = config_or_recipe(target)?;
            if *dump {
                for c in &configs {
                    println!("{}", c.to_toml()?);
                }
                return Ok(());
            }
            let opts = RunOptions { out_root: cli.out.clone(), threads: cli.threads };
            let mut totals: BTreeMap<&str, usize> = BTreeMap::new();
            for c in &configs {
                let s = runner::run(c, &opts)?;
                log::info!("{}: {} rows written ({} failed), {} of {} units skipped -> {}", c.name, s.rows_written, s.failed_rows, s.skipped, s.units, s.log.display());
                *totals.entry("rows").or_default() += s.rows_written;
                *totals.entry("failed").or_default() += s.failed_rows;
            }
            print(&json!(totals))
        }
        Command::Export { records, format, to } => {
            let rows = read_records(records)?;
            let dir = to.clone().unwrap_or_else(|| records.parent().map(Path::to_path_buf).unwrap_or_default().join("export"));
            let formats = match format.as_str() {
                "both" => vec![ExportFormat::Jsonl, ExportFormat::Csv],
                f => vec![f.parse()?],
            };
            for f in formats {
                for path in export(&rows, &dir, f)? {
                    println!("{}", path.display());
                }
            }
            Ok(())
        }
    }
}
