//! Finite-frame moments: exact Bernoulli-selection expectations by tuple
//! enumeration, the all-subsets oracle, Monte Carlo estimates, and the
//! erasure Welch bound.

use faer::c64;
use serde::Serialize;

use super::asymptotic::asymptotic_moment;
use super::partitions::Partition;
use crate::error::{param, Error, Result};
use crate::frames::FrameMatrix;
use crate::numeric::{mean, variance};
use crate::rng;
use crate::spectra::{select, subset_gram_spectrum, SelectionMode};

pub const TUPLE_GUARD: f64 = 1e8;

/// a_{d,k}(F) for k = 1..=d, plus the share of each coming from crossing
/// index patterns.
#[derive(Debug, Clone, Serialize)]
pub struct ExactMoment {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    /// a[k-1] = a_{d,k}(F).
    pub a: Vec<f64>,
    /// crossing[k-1] = part of a_{d,k}(F) from crossing partitions.
    pub crossing: Vec<f64>,
}

impl ExactMoment {
    /// E[(1/n) tr((X'X)^d)] under i.i.d. Bernoulli(p) selection.
    pub fn eval(&self, p: f64) -> f64 {
        self.a.iter().enumerate().map(|(i, a)| p.powi(i as i32 + 1) * a).sum()
    }
}

/// Enumerates all n^d index tuples (i_1..i_d), multiplies the correlation
/// cycle c_{i1 i2} c_{i2 i3} ... c_{id i1}, and bins by the number of distinct
/// indices. Each bin is divided by n.
pub fn exact_expected_moment(f: &FrameMatrix, d: usize) -> Result<ExactMoment> {
    let n = f.n();
    if d == 0 {
        return param("moment order must be >= 1");
    }
    if (n as f64).powi(d as i32) > TUPLE_GUARD {
        return Err(Error::Guard(format!("n^d = {n}^{d} tuples exceeds {TUPLE_GUARD:e}")));
    }
    let g = f.gram();
    let c: Vec<c64> = (0..n * n).map(|t| g[(t / n, t % n)]).collect();
    let mut sums = vec![c64::new(0.0, 0.0); d];
    let mut crossing = vec![c64::new(0.0, 0.0); d];
    let mut tuple = vec![0usize; d];
    loop {
        let mut prod = c64::new(1.0, 0.0);
        for j in 0..d {
            prod *= c[tuple[j] * n + tuple[(j + 1) % d]];
        }
        let pattern = Partition::from_labels(&tuple);
        let k = pattern.block_count();
        sums[k - 1] += prod;
        if k >= 2 && d >= 4 && !pattern.is_noncrossing() {
            crossing[k - 1] += prod;
        }
        // Odometer increment.
        let mut pos = d;
        loop {
            if pos == 0 {
                let scale = 1.0 / n as f64;
                return Ok(ExactMoment {
                    d,
                    n,
                    m: f.m(),
                    a: sums.iter().map(|s| s.re * scale).collect(),
                    crossing: crossing.iter().map(|s| s.re * scale).collect(),
                });
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// Independent oracle: sum over all 2^n subsets of P(S) (1/n) tr(G_S^d),
/// with tr(G_S^d) from the subset eigenvalues.
pub fn all_subsets_moment(f: &FrameMatrix, d: usize, p: f64) -> Result<f64> {
    let n = f.n();
    if n > 16 {
        return Err(Error::Guard(format!("all-subsets oracle limited to n <= 16, got {n}")));
    }
    let mut total = 0.0;
    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let k = idx.len() as i32;
        let s = subset_gram_spectrum(f, &idx)?;
        let tr: f64 = s.eigenvalues.iter().map(|l| l.powi(d as i32)).sum();
        total += p.powi(k) * (1.0 - p).powi(n as i32 - k) * tr;
    }
    Ok(total / n as f64)
}

/// Monte Carlo estimate of m_d with its standard error.
pub fn empirical_moment(
    f: &FrameMatrix,
    mode: SelectionMode,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials < 2 {
        return param("need at least two trials for a standard error");
    }
    let n = f.n() as f64;
    let vals: Vec<f64> = (0..trials)
        .map(|t| {
            let mut r = rng::stream(seed, &[rng::tag("empirical-moment"), d as u64, t as u64]);
            let s = select(f.n(), mode, &mut r)?;
            if s.indices.is_empty() {
                return Ok(0.0);
            }
            let sp = subset_gram_spectrum(f, &s.indices)?;
            Ok(sp.eigenvalues.iter().map(|l| l.powi(d as i32)).sum::<f64>() / n)
        })
        .collect::<Result<_>>()?;
    Ok((mean(&vals), (variance(&vals) / trials as f64).sqrt()))
}

/// Finite-n correction term of the bound: p^2 (1-p)^2 x^2 / (n-1) at d = 4,
/// zero for d = 2, 3.
pub fn ewb_delta(gamma: f64, p: f64, d: usize, n: usize) -> Result<f64> {
    let x = 1.0 / gamma - 1.0;
    match d {
        2 | 3 => Ok(0.0),
        4 => Ok(p * p * (1.0 - p) * (1.0 - p) * x * x / (n as f64 - 1.0)),
        _ => param(format!("the erasure Welch bound is available for d = 2, 3, 4; got {d}")),
    }
}

/// Erasure Welch bound of order d: m^MANOVA(gamma, p, d) + Delta(gamma, p, d, n).
pub fn ewb_bound(gamma: f64, p: f64, d: usize, n: usize) -> Result<f64> {
    let delta = ewb_delta(gamma, p, d, n)?;
    let x = 1.0 / gamma - 1.0;
    Ok(asymptotic_moment(d)?.eval(p, x) + delta)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingRow {
    pub n: usize,
    pub m: usize,
    /// Crossing contribution a^{(3)}_{4,2}(F) = (1/n) sum_{i != j} |c_ij|^4.
    pub crossing_a42: f64,
    /// x^2/(n-1), the ETF value.
    pub etf_value: f64,
    /// n * crossing_a42, which stays bounded when the term decays like 1/n.
    pub scaled: f64,
}

pub fn crossing_decay_probe(frames: &[FrameMatrix]) -> Vec<CrossingRow> {
    frames
        .iter()
        .map(|f| {
            let (n, m) = (f.n(), f.m());
            let g = f.gram();
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += g[(i, j)].norm_sqr().powi(2);
                    }
                }
            }
            let a = s / n as f64;
            let x = n as f64 / m as f64 - 1.0;
            CrossingRow { n, m, crossing_a42: a, etf_value: x * x / (n as f64 - 1.0), scaled: n as f64 * a }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{construct_dss, construct_lowpass_dft, construct_real_paley};

    #[test]
    fn dss7_coefficients() {
        let f = construct_dss(7).unwrap();
        let e = exact_expected_moment(&f, 4).unwrap();
        let x = 4.0 / 3.0;
        assert!((e.a[0] - 1.0).abs() < 1e-12);
        assert!((e.a[3] - (x * x * x - 3.0 * x * x + x + x * x / 6.0)).abs() < 1e-9);
        let e2 = exact_expected_moment(&f, 2).unwrap();
        assert!((e2.a[1] - x).abs() < 1e-10);
        let e3 = exact_expected_moment(&f, 3).unwrap();
        assert!((e3.a[1] - 3.0 * e2.a[1]).abs() < 1e-10);
        assert!((e3.a[2] - (x * x - x)).abs() < 1e-9);
        // Crossing part of a_{4,2} is (1/n) sum |c|^4 = x^2/(n-1) for an ETF.
        assert!((e.crossing[1] - x * x / 6.0).abs() < 1e-9);
    }

    #[test]
    fn a32_is_three_a22_for_any_unit_norm_frame() {
        let f = construct_lowpass_dft(9, 4).unwrap();
        let e2 = exact_expected_moment(&f, 2).unwrap();
        let e3 = exact_expected_moment(&f, 3).unwrap();
        assert!((e3.a[1] - 3.0 * e2.a[1]).abs() < 1e-10);
    }

    #[test]
    fn exact_matches_all_subsets() {
        let f = construct_real_paley(5).unwrap();
        for d in 1..=4 {
            let e = exact_expected_moment(&f, d).unwrap();
            for p in [0.2, 0.5, 0.9] {
                assert!((e.eval(p) - all_subsets_moment(&f, d, p).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ewb_examples() {
        for d in 2..=4 {
            let x = 3.0;
            let at_one = ewb_bound(0.25, 1.0, d, 40).unwrap();
            assert!((at_one - (x + 1.0f64).powi(d as i32 - 1)).abs() < 1e-12);
        }
        assert!((ewb_bound(0.5, 0.4, 2, 10).unwrap() - 0.56).abs() < 1e-12);
        let m4 = asymptotic_moment(4).unwrap().eval(0.5, 1.0);
        assert!((ewb_bound(0.5, 0.5, 4, 7).unwrap() - (m4 + 0.25 * 0.25 / 6.0)).abs() < 1e-15);
        assert!(ewb_bound(0.5, 0.5, 5, 7).is_err());
    }

    #[test]
    fn empirical_moment_limits() {
        let f = construct_dss(7).unwrap();
        let (v, _) = empirical_moment(&f, SelectionMode::Bernoulli(1.0), 3, 2, 1).unwrap();
        assert!((v - 3.0 * (7.0f64 / 3.0).powi(3) / 7.0).abs() < 1e-10);
        let (v, _) = empirical_moment(&f, SelectionMode::Bernoulli(0.0), 3, 2, 1).unwrap();
        assert_eq!(v, 0.0);
        let (v, se) = empirical_moment(&f, SelectionMode::Bernoulli(0.4), 1, 400, 3).unwrap();
        assert!((v - 0.4).abs() < 3.0 * se);
    }

    #[test]
    fn crossing_probe_dss7() {
        let rows = crossing_decay_probe(&[construct_dss(7).unwrap()]);
        assert!((rows[0].crossing_a42 - (4.0f64 / 3.0).powi(2) / 6.0).abs() < 1e-12);
    }
}
