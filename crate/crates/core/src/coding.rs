//! Analog erasure source and channel coding with frames: amplification,
//! rates, capacities, optimal redundancy and the high-resolution gaps.
//!
//! All logarithms are base 2. In the column convention a source code keeps
//! k = beta m of the m frame coefficients (p < beta < 1); a channel code
//! receives k = beta m > m of the n transmitted samples.

use faer::{c64, Mat};
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::frames::FrameMatrix;
use crate::functionals::ahmr;
use crate::numeric::{binary_entropy, golden_max, mean, median};
use crate::rng;
use crate::spectra::{hermitian_eigenvalues, subset_spectra_batch, ZERO_EIG};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Source,
    Channel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    Mp,
    Manova,
}

/// Asymptotic amplification Lambda(beta) for a closed-form model.
pub fn amplification(model: Model, beta: f64, p: f64) -> Result<f64> {
    if beta == 1.0 {
        return Err(Error::Divergent("amplification at beta = 1".into()));
    }
    Ok(match (model, beta < 1.0) {
        (Model::Mp, true) => 1.0 / (1.0 - beta),
        (Model::Mp, false) => beta / (beta - 1.0),
        (Model::Manova, true) => (1.0 - p) / (1.0 - beta),
        (Model::Manova, false) => (beta - p) / (beta - 1.0),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalAmplification {
    pub k: usize,
    /// Mean AHMR over the trials.
    pub ahmr: f64,
    /// Mean inverse energy (1/m) tr(G^{-1}) over the trials (k <= m only).
    pub inverse_energy: Option<f64>,
    pub divergent: usize,
}

/// Monte Carlo AHMR of uniform k-subsets with k = round(beta m).
pub fn amplification_empirical(f: &FrameMatrix, beta: f64, trials: usize, seed: u64) -> Result<EmpiricalAmplification> {
    let k = (beta * f.m() as f64).round() as usize;
    if k == 0 || k > f.n() {
        return param(format!("beta={beta} gives k={k} outside 1..=n"));
    }
    let spectra = subset_spectra_batch(f, k, trials, seed, &[rng::tag("amplification"), k as u64])?;
    let mut vals = Vec::new();
    let mut ie = Vec::new();
    let mut divergent = 0;
    for s in &spectra {
        match ahmr(&s.eigenvalues) {
            Ok(v) => {
                vals.push(v);
                if k <= f.m() {
                    ie.push(s.eigenvalues.iter().map(|l| 1.0 / l).sum::<f64>() / f.m() as f64);
                }
            }
            Err(_) => divergent += 1,
        }
    }
    if vals.is_empty() {
        return Err(Error::Divergent("every subset was rank deficient".into()));
    }
    Ok(EmpiricalAmplification {
        k,
        ahmr: mean(&vals),
        inverse_energy: (!ie.is_empty()).then(|| mean(&ie)),
        divergent,
    })
}

/// Rate-distortion function of the erasure source, (p/2) log y.
pub fn rdf(p: f64, y: f64) -> f64 {
    0.5 * p * y.log2()
}

/// Finite-SDR rate (1/beta)(p/2) log(1 + (y-1) beta Lambda).
pub fn rate_sc_with(beta: f64, p: f64, y: f64, lambda: f64) -> f64 {
    0.5 * p / beta * (1.0 + (y - 1.0) * beta * lambda).log2()
}

/// High-resolution form (1/beta)(p/2) log(y beta Lambda).
pub fn rate_sc_high_res(beta: f64, p: f64, y: f64, lambda: f64) -> f64 {
    0.5 * p / beta * (y * beta * lambda).log2()
}

fn check_source(beta: f64, p: f64, y: f64) -> Result<()> {
    if !(beta > p && beta < 1.0) {
        return param(format!("source coding needs p < beta < 1, got beta={beta} p={p}"));
    }
    if y < 1.0 {
        return param(format!("SDR must be >= 1, got {y}"));
    }
    Ok(())
}

fn check_channel(beta: f64, y: f64) -> Result<()> {
    if beta <= 1.0 {
        return param(format!("channel coding needs beta > 1, got {beta}"));
    }
    if y < 0.0 {
        return param(format!("SNR must be >= 0, got {y}"));
    }
    Ok(())
}

pub fn rate_sc(beta: f64, p: f64, y: f64, model: Model) -> Result<f64> {
    check_source(beta, p, y)?;
    Ok(rate_sc_with(beta, p, y, amplification(model, beta, p)?))
}

/// Excess rate over the RDF.
pub fn excess_rate(beta: f64, p: f64, y: f64, model: Model) -> Result<f64> {
    Ok(rate_sc(beta, p, y, model)? - rdf(p, y))
}

/// Shannon capacity of the erasure channel, (p/2) log(1 + y).
pub fn capacity_reference(p: f64, y: f64) -> f64 {
    0.5 * p * (1.0 + y).log2()
}

pub fn capacity_cc_with(beta: f64, p: f64, y: f64, lambda: f64) -> f64 {
    0.5 * p / beta * (1.0 + y * beta / lambda).log2()
}

pub fn capacity_cc(beta: f64, p: f64, y: f64, model: Model) -> Result<f64> {
    check_channel(beta, y)?;
    Ok(capacity_cc_with(beta, p, y, amplification(model, beta, p)?))
}

pub const SOURCE_MARGIN: f64 = 1e-4;
pub const CHANNEL_BETA_MAX: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub beta: f64,
    /// Rate (source) or capacity (channel) at `beta`.
    pub value: f64,
}

/// Golden-section search for the best redundancy: minimal rate over
/// [p + 1e-4, 1 - 1e-4] for source coding, maximal capacity over
/// [1 + 1e-4, beta_max] (searched in ln(beta - 1)) for channel coding.
pub fn optimize_beta(direction: Direction, p: f64, y: f64, model: Model) -> Result<Optimum> {
    optimize_beta_bounded(direction, p, y, model, CHANNEL_BETA_MAX)
}

pub fn optimize_beta_bounded(direction: Direction, p: f64, y: f64, model: Model, beta_max: f64) -> Result<Optimum> {
    if !(0.0 < p && p < 1.0) {
        return param(format!("need 0 < p < 1, got {p}"));
    }
    match direction {
        Direction::Source => {
            let (a, b) = (p + SOURCE_MARGIN, 1.0 - SOURCE_MARGIN);
            if a >= b {
                return param("empty source-coding beta interval");
            }
            let f = |beta: f64| -rate_sc(beta, p, y, model).unwrap_or(f64::INFINITY);
            let (beta, v) = golden_max(f, a, b, 1e-7);
            Ok(Optimum { beta, value: -v })
        }
        Direction::Channel => {
            if beta_max <= 1.0 + SOURCE_MARGIN {
                return param("empty channel-coding beta interval");
            }
            let f = |u: f64| capacity_cc(1.0 + u.exp(), p, y, model).unwrap_or(f64::NEG_INFINITY);
            let (u, v) = golden_max(f, SOURCE_MARGIN.ln(), (beta_max - 1.0).ln(), 1e-9);
            Ok(Optimum { beta: 1.0 + u.exp(), value: v })
        }
    }
}

/// Fallback for non-unimodal objectives: best point of a uniform grid.
pub fn grid_scan_beta(direction: Direction, p: f64, y: f64, model: Model, points: usize) -> Result<Optimum> {
    let mut best: Option<Optimum> = None;
    for i in 0..points {
        let t = i as f64 / (points - 1).max(1) as f64;
        let (beta, value) = match direction {
            Direction::Source => {
                let beta = p + SOURCE_MARGIN + t * (1.0 - 2.0 * SOURCE_MARGIN - p);
                (beta, -rate_sc(beta, p, y, model)?)
            }
            Direction::Channel => {
                let u = SOURCE_MARGIN.ln() + t * ((CHANNEL_BETA_MAX - 1.0).ln() - SOURCE_MARGIN.ln());
                let beta = 1.0 + u.exp();
                (beta, capacity_cc(beta, p, y, model)?)
            }
        };
        if best.is_none_or(|b| value > b.value) {
            best = Some(Optimum { beta, value });
        }
    }
    let mut b = best.ok_or_else(|| Error::Param("grid needs at least one point".into()))?;
    if direction == Direction::Source {
        b.value = -b.value;
    }
    Ok(b)
}

/// Asymptotic optimum locations 1 -+ 1/ln y.
pub fn best_beta_asymptote(direction: Direction, y: f64) -> f64 {
    match direction {
        Direction::Source => 1.0 - 1.0 / y.ln(),
        Direction::Channel => 1.0 + 1.0 / y.ln(),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Gaps {
    /// Excess rates at the optimized beta.
    pub gap_sc_mp: f64,
    pub gap_sc_manova: f64,
    /// C~ - C at the optimized beta (negative).
    pub gap_cc_mp: f64,
    pub gap_cc_manova: f64,
    pub diff_sc: f64,
    pub diff_cc: f64,
    /// (p/2) log(1-p): predicted diff_sc; diff_cc is predicted as its negative.
    pub diff_analytic: f64,
    /// (p/2) log ln y, the leading growth of both gaps.
    pub loglog_term: f64,
}

pub fn high_resolution_gaps(p: f64, y: f64) -> Result<Gaps> {
    let r = rdf(p, y);
    let c = capacity_reference(p, y);
    let sc_mp = optimize_beta(Direction::Source, p, y, Model::Mp)?.value - r;
    let sc_manova = optimize_beta(Direction::Source, p, y, Model::Manova)?.value - r;
    let cc_mp = optimize_beta(Direction::Channel, p, y, Model::Mp)?.value - c;
    let cc_manova = optimize_beta(Direction::Channel, p, y, Model::Manova)?.value - c;
    Ok(Gaps {
        gap_sc_mp: sc_mp,
        gap_sc_manova: sc_manova,
        gap_cc_mp: cc_mp,
        gap_cc_manova: cc_manova,
        diff_sc: sc_manova - sc_mp,
        diff_cc: cc_manova - cc_mp,
        diff_analytic: 0.5 * p * (1.0 - p).log2(),
        loglog_term: 0.5 * p * y.ln().log2(),
    })
}

/// Rate of sending the erasure pattern as side information, per sample.
pub fn si_benchmark(p: f64) -> f64 {
    binary_entropy(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MlieMode {
    Exact,
    MonteCarlo { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Mlie {
    /// Mean of (m/n)(1/2) log eta_s over the non-divergent patterns.
    pub value: f64,
    pub patterns: usize,
    /// Patterns whose Gram matrix is numerically singular.
    pub divergent: usize,
}

pub const MLIE_EXACT_GUARD: u128 = 1_000_000;

fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx)?;
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Mean logarithmic inverse energy with eta_s = (1/m) tr(G_s^{-1}), G_s the
/// k x k Gram of the kept columns (k <= m).
pub fn mlie(f: &FrameMatrix, k: usize, mode: MlieMode) -> Result<Mlie> {
    let (n, m) = (f.n(), f.m());
    if k == 0 || k > m {
        return param(format!("MLIE needs 1 <= k <= m, got k={k} m={m}"));
    }
    let scale = m as f64 / n as f64 * 0.5;
    let term = |idx: &[usize]| -> Result<Option<f64>> {
        let s = crate::spectra::subset_gram_spectrum(f, idx)?;
        if s.eigenvalues.iter().any(|&l| l < ZERO_EIG) {
            return Ok(None);
        }
        let eta = s.eigenvalues.iter().map(|l| 1.0 / l).sum::<f64>() / m as f64;
        Ok(Some(scale * eta.log2()))
    };
    let mut vals = Vec::new();
    let mut divergent = 0;
    match mode {
        MlieMode::Exact => {
            let count = crate::moments::partitions::binomial(n as u64, k as u64);
            if count > MLIE_EXACT_GUARD {
                return Err(Error::Guard(format!("C({n},{k}) = {count} patterns")));
            }
            for_each_combination(n, k, |idx| {
                match term(idx)? {
                    Some(v) => vals.push(v),
                    None => divergent += 1,
                }
                Ok(())
            })?;
        }
        MlieMode::MonteCarlo { trials, seed } => {
            for s in subset_spectra_batch(f, k, trials, seed, &[rng::tag("mlie"), k as u64])? {
                if s.eigenvalues.iter().any(|&l| l < ZERO_EIG) {
                    divergent += 1;
                } else {
                    let eta = s.eigenvalues.iter().map(|l| 1.0 / l).sum::<f64>() / m as f64;
                    vals.push(scale * eta.log2());
                }
            }
        }
    }
    let patterns = vals.len() + divergent;
    if vals.is_empty() {
        return Err(Error::Divergent("every pattern is singular".into()));
    }
    Ok(Mlie { value: mean(&vals), patterns, divergent })
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceRow {
    pub k: usize,
    /// Median-of-means of (1/k) tr((A A')^{-1}), A = H / sqrt(k) square.
    pub square_estimate: f64,
    pub envelope_low: f64,
    pub envelope_high: f64,
    /// Mean of (1/m) tr((A A')^{-1}) for a k x m control with k/m = control_beta.
    pub control_estimate: f64,
    pub control_limit: f64,
}

/// Growth of the inverse energy of square complex Gaussian blocks. The mean
/// is infinite, so the estimate is a median of `groups` group means.
pub fn square_gaussian_divergence_probe(
    k_values: &[usize],
    trials: usize,
    groups: usize,
    control_beta: f64,
    seed: u64,
) -> Result<Vec<DivergenceRow>> {
    if groups == 0 || trials < groups || !(0.0 < control_beta && control_beta < 1.0) {
        return param("need trials >= groups >= 1 and 0 < control_beta < 1");
    }
    let c = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    k_values
        .iter()
        .map(|&k| {
            let draw = |rows: usize, cols: usize, t: usize, tag: &str| -> Result<f64> {
                let mut r = rng::stream(seed, &[rng::tag(tag), k as u64, t as u64]);
                let s = (0.5 / cols as f64).sqrt();
                let a = Mat::from_fn(rows, cols, |_, _| {
                    c64::new(r.sample(StandardNormal), r.sample(StandardNormal)) * s
                });
                let ev = hermitian_eigenvalues(&(&a * a.adjoint()))?;
                Ok(ev.iter().map(|l| 1.0 / l.max(1e-300)).sum::<f64>())
            };
            let sq: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| Ok(draw(k, k, t, "square")? / k as f64))
                .collect::<Result<_>>()?;
            let per = trials / groups;
            let means: Vec<f64> = sq.chunks(per).take(groups).map(mean).collect();
            let m_ctrl = (k as f64 / control_beta).round() as usize;
            let ctrl: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| Ok(draw(k, m_ctrl, t, "control")? / m_ctrl as f64))
                .collect::<Result<_>>()?;
            Ok(DivergenceRow {
                k,
                square_estimate: median(&means),
                envelope_low: (k * k) as f64 / c,
                envelope_high: (k * k * k) as f64 / c,
                control_estimate: mean(&ctrl),
                control_limit: control_beta / (1.0 - control_beta),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub y_db: f64,
    pub beta_opt: f64,
    pub value: f64,
    pub benchmark: f64,
    pub benchmark_si: f64,
}

/// Rate (source) or capacity (channel) curve over a dB grid. With
/// `fixed_beta` the redundancy is held; otherwise it is optimized.
pub fn curve(
    direction: Direction,
    p: f64,
    model: Model,
    y_db: &[f64],
    fixed_beta: Option<f64>,
    grid_points: Option<usize>,
) -> Result<Vec<CurvePoint>> {
    y_db.iter()
        .map(|&db| {
            let y = 10f64.powf(db / 10.0);
            let opt = match (fixed_beta, grid_points) {
                (Some(beta), _) => Optimum {
                    beta,
                    value: match direction {
                        Direction::Source => rate_sc(beta, p, y, model)?,
                        Direction::Channel => capacity_cc(beta, p, y, model)?,
                    },
                },
                (None, Some(pts)) => grid_scan_beta(direction, p, y, model, pts)?,
                (None, None) => optimize_beta(direction, p, y, model)?,
            };
            let benchmark = match direction {
                Direction::Source => rdf(p, y),
                Direction::Channel => capacity_reference(p, y),
            };
            Ok(CurvePoint {
                y_db: db,
                beta_opt: opt.beta,
                value: opt.value,
                benchmark,
                benchmark_si: match direction {
                    Direction::Source => rdf(p, y) + si_benchmark(p),
                    Direction::Channel => f64::NAN,
                },
            })
        })
        .collect()
}
