//! Random column subsets, subset Gram spectra, empirical CDFs and
//! Kolmogorov-Smirnov distances; sampling of the MANOVA random-matrix ensemble.

use faer::{c64, Mat, Side};
use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::frames::{Field, FrameMatrix};
use crate::rng;

/// Eigenvalues below this are treated as exact zeros.
pub const ZERO_EIG: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SelectionMode {
    UniformK(usize),
    Bernoulli(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSelection {
    /// Sorted, distinct, 0-based column indices.
    pub indices: Vec<usize>,
    pub mode: SelectionMode,
}

pub fn select(n: usize, mode: SelectionMode, r: &mut rng::Rng) -> Result<SubsetSelection> {
    let mut indices = match mode {
        SelectionMode::UniformK(k) => {
            if k > n {
                return param(format!("cannot select k={k} of n={n} columns"));
            }
            sample(r, n, k).into_vec()
        }
        SelectionMode::Bernoulli(p) => {
            if !(0.0..=1.0).contains(&p) {
                return param(format!("Bernoulli probability {p} outside [0,1]"));
            }
            (0..n).filter(|_| r.random::<f64>() < p).collect()
        }
    };
    indices.sort_unstable();
    Ok(SubsetSelection { indices, mode })
}

/// Nonzero spectrum of a subset Gram matrix. `eigenvalues` holds the
/// r = min(k, m) eigenvalues of the smaller Gram (ascending, clamped at zero);
/// the k - r structural zeros of the k x k Gram are only counted.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSpectrum {
    pub eigenvalues: Vec<f64>,
    pub structural_zeros: usize,
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

impl SubsetSpectrum {
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn beta(&self) -> f64 {
        self.k as f64 / self.m as f64
    }

    pub fn gamma(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn cdf(&self) -> EmpiricalCdf<'_> {
        EmpiricalCdf { sorted: &self.eigenvalues }
    }
}

fn finish(mut ev: Vec<f64>) -> Vec<f64> {
    for v in ev.iter_mut() {
        if *v < ZERO_EIG {
            *v = 0.0;
        }
    }
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn hermitian_eigenvalues(g: &Mat<c64>) -> Result<Vec<f64>> {
    let n = g.nrows();
    // Explicit symmetrization against roundoff asymmetry.
    let h = Mat::from_fn(n, n, |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5);
    h.self_adjoint_eigenvalues(Side::Lower)
        .map(finish)
        .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))
}

pub fn symmetric_eigenvalues(g: &Mat<f64>) -> Result<Vec<f64>> {
    let n = g.nrows();
    let h = Mat::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
    h.self_adjoint_eigenvalues(Side::Lower)
        .map(finish)
        .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))
}

/// Spectrum of the Gram matrix of the selected columns, formed on the smaller
/// side: A'A when k <= m, AA' otherwise (same nonzero spectrum).
pub fn subset_gram_spectrum(f: &FrameMatrix, indices: &[usize]) -> Result<SubsetSpectrum> {
    let k = indices.len();
    if k == 0 {
        return param("empty subset");
    }
    let (m, n) = (f.m(), f.n());
    let eigenvalues = match f.field {
        Field::Real => {
            let a = Mat::from_fn(m, k, |i, j| f.entries[(i, indices[j])].re);
            let g = if k <= m { a.transpose() * &a } else { &a * a.transpose() };
            symmetric_eigenvalues(&g)?
        }
        Field::Complex => {
            let a = Mat::from_fn(m, k, |i, j| f.entries[(i, indices[j])]);
            let g = if k <= m { a.adjoint() * &a } else { &a * a.adjoint() };
            hermitian_eigenvalues(&g)?
        }
    };
    Ok(SubsetSpectrum { eigenvalues, structural_zeros: k - k.min(m), n, m, k })
}

/// Right-continuous step CDF of a sorted sample.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalCdf<'a> {
    pub sorted: &'a [f64],
}

impl EmpiricalCdf<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v < x) as f64 / self.sorted.len() as f64
    }
}

/// A reference distribution for KS comparisons. Jump locations must be listed
/// in `atoms` so the distance is evaluated on both sides of them.
pub trait ReferenceCdf {
    fn cdf(&self, x: f64) -> f64;
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
    fn atoms(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// sup_x |F_emp(x) - F_ref(x)|, evaluated exactly: between jump points both
/// CDFs are monotone and the empirical one is flat, so the supremum is
/// attained at a one-sided limit at a jump of either function.
pub fn ks_distance<R: ReferenceCdf + ?Sized>(sorted: &[f64], reference: &R) -> f64 {
    let emp = EmpiricalCdf { sorted };
    let mut points: Vec<f64> = sorted.to_vec();
    points.extend(reference.atoms());
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
        .iter()
        .map(|&t| {
            let right = (emp.eval(t) - reference.cdf(t)).abs();
            let left = (emp.eval_left(t) - reference.cdf_left(t)).abs();
            right.max(left)
        })
        .fold(0.0, f64::max)
}

/// Draws one matrix from MANOVA(n, m, k, field) and returns its nonzero
/// spectrum: (n/m) W^{-1/2} B B' W^{-1/2} with W = AA' + BB', A of size
/// k x (n-m) and B of size k x m. For k > m the roles of k and m are swapped
/// (the beta > 1 baseline), keeping the n/m scaling. Computed through the
/// Cholesky factor W = LL': the eigenvalues equal those of CC', C = L^{-1}B.
pub fn sample_manova_ensemble(
    n: usize,
    m: usize,
    k: usize,
    field: Field,
    r: &mut rng::Rng,
) -> Result<SubsetSpectrum> {
    if k == 0 || m == 0 || m > n || k > n {
        return param(format!("MANOVA ensemble needs 1 <= k, m <= n; got n={n} m={m} k={k}"));
    }
    let (rows, cols_b) = if k <= m { (k, m) } else { (m, k) };
    let cols_a = n - cols_b;
    let scale = n as f64 / m as f64;
    let eigenvalues = match field {
        Field::Real => {
            let a = Mat::from_fn(rows, cols_a, |_, _| r.sample::<f64, _>(StandardNormal));
            let b = Mat::from_fn(rows, cols_b, |_, _| r.sample::<f64, _>(StandardNormal));
            let w = &a * a.transpose() + &b * b.transpose();
            let llt = w.llt(Side::Lower).map_err(|e| Error::Numerical(format!("singular W: {e:?}")))?;
            let mut c = b;
            llt.L().solve_lower_triangular_in_place(c.as_mut());
            let g = &c * c.transpose();
            symmetric_eigenvalues(&g)?
        }
        Field::Complex => {
            let h = (0.5f64).sqrt();
            let mut z = || c64::new(r.sample(StandardNormal), r.sample(StandardNormal)) * h;
            let a = Mat::from_fn(rows, cols_a, |_, _| z());
            let b = Mat::from_fn(rows, cols_b, |_, _| z());
            let w = &a * a.adjoint() + &b * b.adjoint();
            let llt = w.llt(Side::Lower).map_err(|e| Error::Numerical(format!("singular W: {e:?}")))?;
            let mut c = b;
            llt.L().solve_lower_triangular_in_place(c.as_mut());
            let g = &c * c.adjoint();
            hermitian_eigenvalues(&g)?
        }
    };
    let eigenvalues = finish(eigenvalues.into_iter().map(|v| v * scale).collect());
    Ok(SubsetSpectrum { eigenvalues, structural_zeros: k - k.min(m), n, m, k })
}

/// Spectra of `trials` uniform k-subsets, trial t drawn from the stream
/// (seed, path.., t). Output order is the trial order.
pub fn subset_spectra_batch(
    f: &FrameMatrix,
    k: usize,
    trials: usize,
    seed: u64,
    path: &[u64],
) -> Result<Vec<SubsetSpectrum>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut full = path.to_vec();
            full.push(t as u64);
            let mut r = rng::stream(seed, &full);
            let s = select(f.n(), SelectionMode::UniformK(k), &mut r)?;
            subset_gram_spectrum(f, &s.indices)
        })
        .collect()
}

pub fn manova_ensemble_batch(
    n: usize,
    m: usize,
    k: usize,
    field: Field,
    trials: usize,
    seed: u64,
    path: &[u64],
) -> Result<Vec<SubsetSpectrum>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut full = path.to_vec();
            full.push(t as u64);
            sample_manova_ensemble(n, m, k, field, &mut rng::stream(seed, &full))
        })
        .collect()
}
