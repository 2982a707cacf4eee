//! Parameter-scaling analysis.
//!
//! Training curves `delta O(P)` are inverted to the parameter count `P` that
//! reaches a target error, either piecewise between the two bracketing points
//! or through a global least-squares fit per seed. The per-size estimates are
//! then compared against a polynomial law in the system size and a power law
//! in the sector dimension, scored by the SEM-rescaled root mean error (RME).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Errors below this are numerically exact and are raised to it before taking logarithms.
pub const DELTA_FLOOR: f64 = 1e-12;

fn floored(p: &CurvePoint) -> Result<f64> {
    if !(p.params > 0.0 && p.delta_o >= 0.0) {
        return Err(Error::Domain(format!("curve point needs positive params and a non-negative error, got {p:?}")));
    }
    Ok(p.delta_o.max(DELTA_FLOOR))
}

/// One trained network: its real parameter count and achieved error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub params: f64,
    pub delta_o: f64,
    pub n_sites: usize,
    pub seed: u64,
    pub hidden: usize,
    pub depth: usize,
}

/// Two-parameter curve family used for inversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `delta O = A P^-m`
    Algebraic,
    /// `delta O = A exp(-m P)`
    Exponential,
}

impl Family {
    fn abscissa(self, p: f64) -> f64 {
        match self {
            Family::Algebraic => p.ln(),
            Family::Exponential => p,
        }
    }

    fn invert_abscissa(self, g: f64) -> f64 {
        match self {
            Family::Algebraic => g.exp(),
            Family::Exponential => g,
        }
    }

    /// `A` and `m` of the family.
    pub fn evaluate(self, a: f64, m: f64, p: f64) -> f64 {
        a * (-m * self.abscissa(p)).exp()
    }
}

/// Parameters at the target error, with the standard error when it is defined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsEstimate {
    pub params: f64,
    /// `None` when only one seed contributed.
    pub sem: Option<f64>,
    pub seeds: usize,
}

fn mean_and_sem(xs: &[f64]) -> (f64, Option<f64>) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, Some((var / k).sqrt()))
}

/// Invert between the two seed-averaged points that bracket `target`.
///
/// Points are grouped by parameter count; the SEM of the two bracketing means
/// is propagated to first order through the inversion.
pub fn piecewise_invert(points: &[CurvePoint], target: f64, family: Family) -> Result<ParamsEstimate> {
    if !(target > 0.0) {
        return Err(Error::Domain("target error must be positive".into()));
    }
    let mut groups: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for p in points {
        groups.entry(p.params.to_bits()).or_default().push(floored(p)?);
    }
    let mut curve: Vec<(f64, f64, Option<f64>, usize)> = groups
        .into_iter()
        .map(|(bits, ds)| {
            let (m, s) = mean_and_sem(&ds);
            (f64::from_bits(bits), m, s, ds.len())
        })
        .collect();
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pair = curve.windows(2).find(|w| (w[0].1 - target) * (w[1].1 - target) <= 0.0 && w[0].1 != w[1].1);
    let Some(w) = pair else {
        return Err(Error::Bracketing { target });
    };
    let (p1, d1, s1, k1) = w[0];
    let (p2, d2, s2, k2) = w[1];
    let (u1, u2, lt) = (d1.ln(), d2.ln(), target.ln());
    let r = (u1 - lt) / (u1 - u2);
    let (g1, g2) = (family.abscissa(p1), family.abscissa(p2));
    let g = g1 + r * (g2 - g1);
    let params = family.invert_abscissa(g);
    let sem = match (s1, s2) {
        (Some(s1), Some(s2)) => {
            let du = (u1 - u2).powi(2);
            let dr1 = (lt - u2) / du * (s1 / d1);
            let dr2 = (u1 - lt) / du * (s2 / d2);
            let sg = (g2 - g1).abs() * (dr1 * dr1 + dr2 * dr2).sqrt();
            Some(match family {
                Family::Algebraic => params * sg,
                Family::Exponential => sg,
            })
        }
        _ => None,
    };
    Ok(ParamsEstimate { params, sem, seeds: k1.min(k2) })
}

/// Least-squares `ln(delta O) = ln A - m g(P)` over the points; returns `(A, m)`.
pub fn fit_family(points: &[(f64, f64)], family: Family) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("{} points cannot determine a two-parameter curve", points.len())));
    }
    let xs: Vec<f64> = points.iter().map(|(p, _)| family.abscissa(*p)).collect();
    let ys: Vec<f64> = points.iter().map(|(_, d)| d.ln()).collect();
    let (a, b) = weighted_line(&xs, &ys, None)?;
    Ok((a.exp(), -b))
}

/// Global inversion: one least-squares fit per seed, inverted at `target`, then
/// averaged over seeds.
///
/// With `exclude_m0` the networks without hidden particles are dropped, unless
/// that would leave fewer than two points for a seed.
pub fn global_invert(points: &[CurvePoint], target: f64, family: Family, exclude_m0: bool) -> Result<ParamsEstimate> {
    let mut by_seed: BTreeMap<u64, Vec<&CurvePoint>> = BTreeMap::new();
    for p in points {
        by_seed.entry(p.seed).or_default().push(p);
    }
    if by_seed.is_empty() {
        return Err(Error::Fit("no curve points".into()));
    }
    let mut estimates = Vec::with_capacity(by_seed.len());
    for pts in by_seed.values() {
        let all = pts.iter().map(|p| Ok((p.params, floored(p)?, p.hidden))).collect::<Result<Vec<_>>>()?;
        let hidden: Vec<(f64, f64)> = all.iter().filter(|p| p.2 > 0).map(|p| (p.0, p.1)).collect();
        let used: Vec<(f64, f64)> = if exclude_m0 && hidden.len() >= 2 { hidden } else { all.iter().map(|p| (p.0, p.1)).collect() };
        let (a, m) = fit_family(&used, family)?;
        if !(m > 0.0) {
            return Err(Error::Fit(format!("fitted error does not decrease with parameters (m = {m})")));
        }
        estimates.push(family.invert_abscissa((a.ln() - target.ln()) / m));
    }
    let (params, sem) = mean_and_sem(&estimates);
    Ok(ParamsEstimate { params, sem, seeds: estimates.len() })
}

/// Weighted least squares `y = a + b x`.
fn weighted_line(xs: &[f64], ys: &[f64], w: Option<&[f64]>) -> Result<(f64, f64)> {
    let weight = |i: usize| w.map_or(1.0, |w| w[i]);
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for i in 0..xs.len() {
        sw += weight(i);
        sx += weight(i) * xs[i];
        sy += weight(i) * ys[i];
    }
    let (mx, my) = (sx / sw, sy / sw);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..xs.len() {
        sxx += weight(i) * (xs[i] - mx).powi(2);
        sxy += weight(i) * (xs[i] - mx) * (ys[i] - my);
    }
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let b = sxy / sxx;
    Ok((my - b * mx, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    /// `P = c N_S^m`
    Polynomial,
    /// `P = c dim^m`, with `dim` the sector dimension
    Exponential,
}

/// Parameters needed at one system size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeEstimate {
    pub n_sites: usize,
    pub dim: usize,
    pub params: f64,
    pub sem: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub hypothesis: Hypothesis,
    pub exponent: f64,
    pub prefactor: f64,
    /// `sqrt(mean(((P_fit - P) / SEM)^2))`.
    pub rme: f64,
    pub sizes: usize,
    /// Exactly two sizes: the fit passes through both and the RME carries no information.
    pub underdetermined: bool,
    /// Regression weights are `(P / SEM)^2`, the inverse variance of `ln P`.
    pub weighting: String,
}

pub fn hypothesis_fit(estimates: &[SizeEstimate], hypothesis: Hypothesis) -> Result<FitResult> {
    if estimates.len() < 2 {
        return Err(Error::Fit("at least two sizes are needed".into()));
    }
    if let Some(e) = estimates.iter().find(|e| !(e.sem > 0.0 && e.params > 0.0)) {
        return Err(Error::Fit(format!("size {} needs positive params and SEM", e.n_sites)));
    }
    let x = |e: &SizeEstimate| match hypothesis {
        Hypothesis::Polynomial => (e.n_sites as f64).ln(),
        Hypothesis::Exponential => (e.dim as f64).ln(),
    };
    let xs: Vec<f64> = estimates.iter().map(x).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| e.params.ln()).collect();
    let w: Vec<f64> = estimates.iter().map(|e| (e.params / e.sem).powi(2)).collect();
    let (a, b) = weighted_line(&xs, &ys, Some(&w))?;
    let k = estimates.len() as f64;
    let rme = (estimates.iter().zip(&xs).map(|(e, x)| (((a + b * x).exp() - e.params) / e.sem).powi(2)).sum::<f64>() / k).sqrt();
    Ok(FitResult {
        hypothesis,
        exponent: b,
        prefactor: a.exp(),
        rme,
        sizes: estimates.len(),
        underdetermined: estimates.len() == 2,
        weighting: "inverse variance of ln P".into(),
    })
}

/// Both hypotheses on the same estimates, polynomial first.
pub fn compare_hypotheses(estimates: &[SizeEstimate]) -> Result<[FitResult; 2]> {
    Ok([hypothesis_fit(estimates, Hypothesis::Polynomial)?, hypothesis_fit(estimates, Hypothesis::Exponential)?])
}
