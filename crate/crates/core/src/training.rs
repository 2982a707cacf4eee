//! Exact overlap-loss training.
//!
//! The loss `1 - |<target|psi>|^2 / <psi|psi>` is contracted over the full
//! sector basis, so both the loss and its gradient are exact. Parameters are
//! optimized with ADAM on their real and imaginary parts.

use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::fock::SectorBasis;
use crate::scalar::{cr, Real};

/// Basis configurations per parallel work item. Fixed so the reduction order,
/// and therefore every bit of the result, is independent of the thread count.
const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub max_steps: usize,
    /// Window `W` of the flattening test.
    pub patience: usize,
    /// Training stops once the best loss improved by less than this fraction over the last `patience` steps.
    pub tolerance: f64,
    /// Optional early exit once the loss drops to this value.
    pub target_loss: Option<f64>,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8, max_steps: 5000, patience: 500, tolerance: 1e-4, target_loss: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossSnapshot {
    pub step: usize,
    pub delta_o: f64,
    pub grad_norm: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxSteps,
    Flattened,
    TargetReached,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub ansatz: String,
    pub num_params: usize,
    pub seed: u64,
    pub adam: AdamConfig,
    pub steps: usize,
    pub best_step: usize,
    pub best_delta_o: f64,
    pub final_delta_o: f64,
    pub stop_reason: StopReason,
    /// Configurations whose gradient needed a diagonal shift of the determinant matrix.
    pub ridge_events: u64,
    pub trace: Vec<LossSnapshot>,
    pub best_params: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LossEvaluation<T: Real> {
    pub delta_o: T,
    pub gradient: Vec<T>,
    pub ridge_events: u64,
}

/// Amplitudes of `ansatz` on every basis configuration.
pub fn amplitudes<T: Real, A: Ansatz<T> + ?Sized>(ansatz: &A, basis: &SectorBasis) -> Vec<Complex<T>> {
    basis.configs().par_iter().enumerate().map(|(i, &c)| ansatz.amplitude(c, i)).collect()
}

/// `delta O` between a normalized target and an unnormalized trial vector.
pub fn infidelity<T: Real>(target: &[Complex<T>], psi: &[Complex<T>]) -> Result<T> {
    let (o, s) = overlap_and_norm(target, psi);
    if s == T::zero() {
        return Err(Error::DegenerateState);
    }
    Ok((T::one() - o.norm_sqr() / s).max(T::zero()))
}

fn overlap_and_norm<T: Real>(target: &[Complex<T>], psi: &[Complex<T>]) -> (Complex<T>, T) {
    // chunked so the summation order matches the parallel gradient reduction
    let parts: Vec<(Complex<T>, T)> = target
        .par_chunks(CHUNK)
        .zip(psi.par_chunks(CHUNK))
        .map(|(t, p)| {
            t.iter().zip(p).fold((cr(T::zero()), T::zero()), |(o, s), (t, p)| (o + t.conj() * *p, s + p.norm_sqr()))
        })
        .collect();
    parts.into_iter().fold((cr(T::zero()), T::zero()), |(o, s), (a, b)| (o + a, s + b))
}

/// Loss value and its exact gradient with respect to every real parameter.
///
/// One pass over the basis collects `<target|psi>`, `<psi|psi>` and the
/// gradients for the seeds of [`Ansatz::accumulate_loss_terms`]; the loss seed
/// `2 (-o t / s + psi |o|^2 / s^2)` is then assembled from them.
pub fn evaluate_loss<T: Real, A: Ansatz<T> + ?Sized>(ansatz: &A, target: &[Complex<T>], basis: &SectorBasis) -> Result<LossEvaluation<T>> {
    let p = ansatz.num_params();
    let configs = basis.configs();
    let partials: Vec<Result<ChunkTerms<T>>> = (0..configs.len().div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = ChunkTerms::new(p);
            let [ga, gb, gc] = &mut acc.grads;
            for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(configs.len()) {
                let (psi, ridged) = ansatz.accumulate_loss_terms(configs[i], i, target[i], [ga, gb, gc], true)?;
                acc.overlap += target[i].conj() * psi;
                acc.norm += psi.norm_sqr();
                acc.ridged += u64::from(ridged);
            }
            Ok(acc)
        })
        .collect();
    let mut total = ChunkTerms::new(p);
    for part in partials {
        let part = part?;
        total.overlap += part.overlap;
        total.norm += part.norm;
        total.ridged += part.ridged;
        for (a, b) in total.grads.iter_mut().zip(&part.grads) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y;
            }
        }
    }
    let (o, s) = (total.overlap, total.norm);
    if s == T::zero() {
        return Err(Error::DegenerateState);
    }
    let two = T::of(2.0);
    let o2 = o.norm_sqr();
    // seed = alpha t + beta psi with alpha complex, beta real
    let alpha = -(o * two) / s;
    let beta = two * o2 / (s * s);
    let [ga, gb, gc] = &total.grads;
    let gradient = (0..p).map(|k| alpha.re * ga[k] + alpha.im * gb[k] + beta * gc[k]).collect();
    Ok(LossEvaluation { delta_o: (T::one() - o2 / s).max(T::zero()), gradient, ridge_events: total.ridged })
}

struct ChunkTerms<T: Real> {
    overlap: Complex<T>,
    norm: T,
    grads: [Vec<T>; 3],
    ridged: u64,
}

impl<T: Real> ChunkTerms<T> {
    fn new(p: usize) -> Self {
        ChunkTerms { overlap: cr(T::zero()), norm: T::zero(), grads: [vec![T::zero(); p], vec![T::zero(); p], vec![T::zero(); p]], ridged: 0 }
    }
}

/// Train `ansatz` against `target` and leave it at the best parameters seen.
///
/// `seed` identifies the initialization of `ansatz`; the optimizer itself is deterministic.
pub fn train<T: Real, A: Ansatz<T> + ?Sized>(
    ansatz: &mut A,
    target: &[Complex<T>],
    basis: &SectorBasis,
    cfg: &AdamConfig,
    seed: u64,
) -> Result<TrainRecord> {
    let start = Instant::now();
    let n = ansatz.num_params();
    let mut params = ansatz.params();
    let mut best_params = params.clone();
    let mut best = f64::INFINITY;
    let mut best_step = 0;
    let mut best_history: Vec<f64> = Vec::with_capacity(cfg.max_steps + 1);
    let mut trace = Vec::with_capacity(cfg.max_steps + 1);
    let mut ridge_events = 0;
    let mut m = vec![T::zero(); n];
    let mut v = vec![T::zero(); n];
    let (b1, b2) = (T::of(cfg.beta1), T::of(cfg.beta2));
    let (lr, eps) = (T::of(cfg.lr), T::of(cfg.eps));
    let mut stop_reason = StopReason::MaxSteps;
    let mut step = 0;
    let mut last_delta;

    loop {
        ansatz.set_params(&params);
        let eval = evaluate_loss(ansatz, target, basis)?;
        ridge_events += eval.ridge_events;
        let delta = eval.delta_o.as_f64();
        last_delta = delta;
        let grad_norm = eval.gradient.iter().map(|g| g.as_f64().powi(2)).sum::<f64>().sqrt();
        trace.push(LossSnapshot { step, delta_o: delta, grad_norm, wall_ms: start.elapsed().as_secs_f64() * 1e3 });
        if delta < best {
            best = delta;
            best_step = step;
            best_params.clone_from(&params);
        }
        best_history.push(best);

        if cfg.target_loss.is_some_and(|t| best <= t) {
            stop_reason = StopReason::TargetReached;
            break;
        }
        if step >= cfg.patience && cfg.patience > 0 {
            let old = best_history[step - cfg.patience];
            if old - best <= cfg.tolerance * old {
                stop_reason = StopReason::Flattened;
                break;
            }
        }
        if step >= cfg.max_steps {
            break;
        }

        step += 1;
        let c1 = T::one() - b1.powi(step as i32);
        let c2 = T::one() - b2.powi(step as i32);
        for k in 0..n {
            let g = eval.gradient[k];
            m[k] = b1 * m[k] + (T::one() - b1) * g;
            v[k] = b2 * v[k] + (T::one() - b2) * g * g;
            let mh = m[k] / c1;
            let vh = v[k] / c2;
            params[k] -= lr * mh / (vh.sqrt() + eps);
        }
    }
    ansatz.set_params(&best_params);
    log::debug!("{}: {} steps, best delta O {:.3e} at step {}", ansatz.name(), step, best, best_step);
    Ok(TrainRecord {
        ansatz: ansatz.name().to_string(),
        num_params: n,
        seed,
        adam: *cfg,
        steps: step,
        best_step,
        best_delta_o: best,
        final_delta_o: last_delta,
        stop_reason,
        ridge_events,
        trace,
        best_params: best_params.iter().map(|x| x.as_f64()).collect(),
    })
}
