//! Frame constructions and structural predicates.
//!
//! A frame is stored as an `m x n` complex matrix whose columns are the frame
//! vectors. Real families carry `Field::Real` and have zero imaginary parts, so
//! downstream code may take a real fast path.

use std::f64::consts::PI;

use faer::{c64, Mat, Side};
use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::numeric::{is_prime, legendre};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Dss,
    LowPassDft,
    RandomSpectrumDft,
    RealPaley,
    ComplexPaley,
    Grassmannian,
    Alltop,
    SpikesSines,
    SpikesHadamard,
    GaussianIid,
    HaarReal,
    HaarComplex,
    RandomFourier,
    RandomCosine,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::Dss,
        Family::LowPassDft,
        Family::RandomSpectrumDft,
        Family::RealPaley,
        Family::ComplexPaley,
        Family::Grassmannian,
        Family::Alltop,
        Family::SpikesSines,
        Family::SpikesHadamard,
        Family::GaussianIid,
        Family::HaarReal,
        Family::HaarComplex,
        Family::RandomFourier,
        Family::RandomCosine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Dss => "dss",
            Family::LowPassDft => "low-pass-dft",
            Family::RandomSpectrumDft => "random-spectrum-dft",
            Family::RealPaley => "real-paley",
            Family::ComplexPaley => "complex-paley",
            Family::Grassmannian => "grassmannian",
            Family::Alltop => "alltop",
            Family::SpikesSines => "spikes-sines",
            Family::SpikesHadamard => "spikes-hadamard",
            Family::GaussianIid => "gaussian-iid",
            Family::HaarReal => "haar-real",
            Family::HaarComplex => "haar-complex",
            Family::RandomFourier => "random-fourier",
            Family::RandomCosine => "random-cosine",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .or(match key.as_str() {
                "ss" | "spikes-and-sines" => Some(Family::SpikesSines),
                "sh" | "spikes-and-hadamard" => Some(Family::SpikesHadamard),
                "lowpass" | "low-pass" => Some(Family::LowPassDft),
                "gaussian" => Some(Family::GaussianIid),
                "paley" => Some(Family::RealPaley),
                _ => None,
            })
            .ok_or_else(|| Error::Param(format!("unknown frame family '{s}'")))
    }

    pub fn is_random(self) -> bool {
        matches!(
            self,
            Family::RandomSpectrumDft
                | Family::GaussianIid
                | Family::HaarReal
                | Family::HaarComplex
                | Family::RandomFourier
                | Family::RandomCosine
        )
    }
}

#[derive(Debug, Clone)]
pub struct FrameMatrix {
    pub entries: Mat<c64>,
    pub field: Field,
    pub family: Family,
    pub seed: Option<u64>,
}

impl FrameMatrix {
    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    /// Real parts of the entries, for `Field::Real` frames.
    pub fn real_entries(&self) -> Mat<f64> {
        Mat::from_fn(self.m(), self.n(), |i, j| self.entries[(i, j)].re)
    }

    /// The n x n Gram matrix F'F of all frame vectors.
    pub fn gram(&self) -> Mat<c64> {
        self.entries.adjoint() * &self.entries
    }

    /// Cross correlation c_{ij} = <f_i, f_j> = f_i' f_j.
    pub fn correlation(&self, i: usize, j: usize) -> c64 {
        (0..self.m())
            .map(|r| self.entries[(r, i)].conj() * self.entries[(r, j)])
            .sum()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.n())
            .map(|j| (0..self.m()).map(|r| self.entries[(r, j)].norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }
}

fn dft_rows(n: usize, freqs: &[usize], scale: f64) -> Mat<c64> {
    Mat::from_fn(freqs.len(), n, |r, j| {
        let phase = 2.0 * PI * ((freqs[r] * j) % n) as f64 / n as f64;
        c64::new(phase.cos(), phase.sin()) * scale
    })
}

fn quadratic_residues(n: usize) -> Vec<usize> {
    (1..n).filter(|&a| legendre(a as i64, n as u64) == 1).collect()
}

/// Parameters (m, lambda) of the quadratic-residue difference set in Z_n.
pub fn dss_parameters(n: usize) -> Result<(usize, usize)> {
    if n < 7 || !is_prime(n as u64) || n % 4 != 3 {
        return param(format!("DSS needs a prime n >= 7 with n = 3 mod 4, got {n}"));
    }
    Ok(((n - 1) / 2, (n - 3) / 4))
}

/// Difference-set spectrum frame: the n-point inverse DFT restricted to the
/// quadratic-residue frequencies.
pub fn construct_dss(n: usize) -> Result<FrameMatrix> {
    let (m, _) = dss_parameters(n)?;
    let qr = quadratic_residues(n);
    debug_assert_eq!(qr.len(), m);
    Ok(FrameMatrix {
        entries: dft_rows(n, &qr, 1.0 / (m as f64).sqrt()),
        field: Field::Complex,
        family: Family::Dss,
        seed: None,
    })
}

pub fn construct_lowpass_dft(n: usize, m: usize) -> Result<FrameMatrix> {
    if m == 0 || m > n {
        return param(format!("low-pass DFT needs 1 <= m <= n, got n={n} m={m}"));
    }
    let freqs: Vec<usize> = (0..m).collect();
    Ok(FrameMatrix {
        entries: dft_rows(n, &freqs, 1.0 / (m as f64).sqrt()),
        field: Field::Complex,
        family: Family::LowPassDft,
        seed: None,
    })
}

fn random_dft(n: usize, m: usize, seed: u64, family: Family) -> Result<FrameMatrix> {
    if m == 0 || m > n {
        return param(format!("random DFT needs 1 <= m <= n, got n={n} m={m}"));
    }
    let mut r = rng::stream(seed, &[rng::tag(family.name()), n as u64, m as u64]);
    let mut freqs = sample(&mut r, n, m).into_vec();
    freqs.sort_unstable();
    Ok(FrameMatrix {
        entries: dft_rows(n, &freqs, 1.0 / (m as f64).sqrt()),
        field: Field::Complex,
        family,
        seed: Some(seed),
    })
}

pub fn construct_random_spectrum_dft(n: usize, m: usize, seed: u64) -> Result<FrameMatrix> {
    random_dft(n, m, seed, Family::RandomSpectrumDft)
}

// Paley conference matrix of order q+1: symmetric for q = 1 mod 4,
// skew-symmetric for q = 3 mod 4. C C' = q I in both cases.
fn paley_conference(q: usize) -> Mat<f64> {
    let skew = q % 4 == 3;
    Mat::from_fn(q + 1, q + 1, |i, j| match (i, j) {
        (0, 0) => 0.0,
        (0, _) => 1.0,
        (_, 0) => {
            if skew {
                -1.0
            } else {
                1.0
            }
        }
        _ => legendre(j as i64 - i as i64, q as u64) as f64,
    })
}

/// Factor a PSD Gram matrix of rank m as F'F with F m x n real.
fn factor_real_gram(g: &Mat<f64>, m: usize) -> Result<Mat<f64>> {
    let n = g.nrows();
    let evd = g.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numerical(format!("{e:?}")))?;
    let (u, s) = (evd.U(), evd.S().column_vector());
    Ok(Mat::from_fn(m, n, |r, j| {
        let col = n - m + r;
        s[col].max(0.0).sqrt() * u[(j, col)]
    }))
}

fn factor_complex_gram(g: &Mat<c64>, m: usize) -> Result<Mat<c64>> {
    let n = g.nrows();
    let evd = g.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numerical(format!("{e:?}")))?;
    let (u, s) = (evd.U(), evd.S().column_vector());
    Ok(Mat::from_fn(m, n, |r, j| {
        let col = n - m + r;
        u[(j, col)].conj() * s[col].re.max(0.0).sqrt()
    }))
}

/// Real ETF with n = q+1 vectors in R^{n/2} from the symmetric Paley
/// conference matrix: the Gram matrix is I + C/sqrt(q).
pub fn construct_real_paley(q: usize) -> Result<FrameMatrix> {
    if !is_prime(q as u64) || q % 4 != 1 {
        return param(format!("real Paley needs a prime q = 1 mod 4, got {q}"));
    }
    let n = q + 1;
    let c = paley_conference(q);
    let s = 1.0 / (q as f64).sqrt();
    let g = Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { c[(i, j)] * s });
    let f = factor_real_gram(&g, n / 2)?;
    Ok(FrameMatrix {
        entries: Mat::from_fn(n / 2, n, |i, j| c64::new(f[(i, j)], 0.0)),
        field: Field::Real,
        family: Family::RealPaley,
        seed: None,
    })
}

/// Complex ETF with n = q+1 vectors in C^{n/2}, q = 3 mod 4, from the
/// Hermitian matrix iC built on the skew Paley conference matrix.
pub fn construct_complex_paley(q: usize) -> Result<FrameMatrix> {
    if !is_prime(q as u64) || q % 4 != 3 {
        return param(format!("complex Paley needs a prime q = 3 mod 4, got {q}"));
    }
    let n = q + 1;
    let c = paley_conference(q);
    let s = 1.0 / (q as f64).sqrt();
    let g = Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, c[(i, j)] * s)
        }
    });
    Ok(FrameMatrix {
        entries: factor_complex_gram(&g, n / 2)?,
        field: Field::Complex,
        family: Family::ComplexPaley,
        seed: None,
    })
}

/// Complex ETF of n vectors in C^{(n+1)/2} on the difference set
/// {0} U (non-residues) of Z_n, n prime = 3 mod 4.
pub fn construct_grassmannian(n: usize) -> Result<FrameMatrix> {
    if dss_parameters(n).is_err() {
        return param(format!("Grassmannian frame supported for primes n = 3 mod 4, n >= 7; got {n}"));
    }
    let freqs: Vec<usize> =
        (0..n).filter(|&a| a == 0 || legendre(a as i64, n as u64) == -1).collect();
    let m = freqs.len();
    Ok(FrameMatrix {
        entries: dft_rows(n, &freqs, 1.0 / (m as f64).sqrt()),
        field: Field::Complex,
        family: Family::Grassmannian,
        seed: None,
    })
}

/// Union of `l` of the `p` cubic-chirp orthonormal bases of C^p.
pub fn construct_alltop(p: usize, l: usize) -> Result<FrameMatrix> {
    if p < 5 || !is_prime(p as u64) {
        return param(format!("Alltop needs a prime p >= 5, got {p}"));
    }
    if l < 2 || l > p {
        return param(format!("Alltop needs 2 <= L <= p, got L={l}"));
    }
    let scale = 1.0 / (p as f64).sqrt();
    let entries = Mat::from_fn(p, p * l, |t, col| {
        let (a, b) = (col / p, col % p);
        let s = (t + a) % p;
        let e = (s * s % p * s + b * t) % p;
        let phase = 2.0 * PI * e as f64 / p as f64;
        c64::new(phase.cos(), phase.sin()) * scale
    });
    Ok(FrameMatrix { entries, field: Field::Complex, family: Family::Alltop, seed: None })
}

/// [I | unitary DFT], m x 2m.
pub fn construct_spikes_sines(m: usize) -> Result<FrameMatrix> {
    if m < 2 {
        return param(format!("spikes and sines needs m >= 2, got {m}"));
    }
    let s = 1.0 / (m as f64).sqrt();
    let entries = Mat::from_fn(m, 2 * m, |i, j| {
        if j < m {
            c64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        } else {
            let phase = 2.0 * PI * ((i * (j - m)) % m) as f64 / m as f64;
            c64::new(phase.cos(), phase.sin()) * s
        }
    });
    Ok(FrameMatrix { entries, field: Field::Complex, family: Family::SpikesSines, seed: None })
}

/// [I | normalized Sylvester Hadamard], m x 2m, m a power of two.
pub fn construct_spikes_hadamard(m: usize) -> Result<FrameMatrix> {
    if m < 2 || !m.is_power_of_two() {
        return param(format!("spikes and Hadamard needs m a power of two >= 2, got {m}"));
    }
    let s = 1.0 / (m as f64).sqrt();
    let entries = Mat::from_fn(m, 2 * m, |i, j| {
        let v = if j < m {
            if i == j {
                1.0
            } else {
                0.0
            }
        } else if (i & (j - m)).count_ones().is_multiple_of(2) {
            s
        } else {
            -s
        };
        c64::new(v, 0.0)
    });
    Ok(FrameMatrix { entries, field: Field::Real, family: Family::SpikesHadamard, seed: None })
}

fn check_random_size(n: usize, m: usize) -> Result<()> {
    if m == 0 || m > n {
        return param(format!("random frame needs 1 <= m <= n, got n={n} m={m}"));
    }
    Ok(())
}

/// Real Gaussian frame with i.i.d. N(0, 1/m) entries. Columns have unit norm
/// only on average unless `normalize` is set.
pub fn construct_gaussian_iid(n: usize, m: usize, seed: u64, normalize: bool) -> Result<FrameMatrix> {
    check_random_size(n, m)?;
    let mut r = rng::stream(seed, &[rng::tag("gaussian-iid"), n as u64, m as u64]);
    let s = 1.0 / (m as f64).sqrt();
    let mut entries = Mat::from_fn(m, n, |_, _| c64::new(r.sample::<f64, _>(StandardNormal) * s, 0.0));
    if normalize {
        for j in 0..n {
            let norm = (0..m).map(|i| entries[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..m {
                entries[(i, j)] /= norm;
            }
        }
    }
    Ok(FrameMatrix { entries, field: Field::Real, family: Family::GaussianIid, seed: Some(seed) })
}

/// Haar-distributed n x n orthogonal (real) or unitary matrix: QR of a
/// Gaussian matrix with the diagonal of R made positive real.
pub fn haar_matrix(n: usize, field: Field, r: &mut rng::Rng) -> Mat<c64> {
    let z = Mat::from_fn(n, n, |_, _| match field {
        Field::Real => c64::new(r.sample(StandardNormal), 0.0),
        Field::Complex => c64::new(r.sample(StandardNormal), r.sample(StandardNormal)) * (0.5f64).sqrt(),
    });
    let qr = z.qr();
    let mut q = qr.compute_Q();
    let rr = qr.R();
    for j in 0..n {
        let d = rr[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// First m columns of a Haar matrix, transposed and scaled by sqrt(n/m), so
/// that FF' = (n/m) I.
pub fn construct_haar(n: usize, m: usize, field: Field, seed: u64) -> Result<FrameMatrix> {
    check_random_size(n, m)?;
    let family = match field {
        Field::Real => Family::HaarReal,
        Field::Complex => Family::HaarComplex,
    };
    let mut r = rng::stream(seed, &[rng::tag(family.name()), n as u64, m as u64]);
    let u = haar_matrix(n, field, &mut r);
    let s = (n as f64 / m as f64).sqrt();
    let entries = Mat::from_fn(m, n, |i, j| u[(j, i)] * s);
    Ok(FrameMatrix { entries, field, family, seed: Some(seed) })
}

pub fn construct_random_fourier(n: usize, m: usize, seed: u64) -> Result<FrameMatrix> {
    random_dft(n, m, seed, Family::RandomFourier)
}

/// m random rows of the orthonormal DCT-II matrix, columns normalized.
pub fn construct_random_cosine(n: usize, m: usize, seed: u64) -> Result<FrameMatrix> {
    check_random_size(n, m)?;
    let mut r = rng::stream(seed, &[rng::tag("random-cosine"), n as u64, m as u64]);
    let mut freqs = sample(&mut r, n, m).into_vec();
    freqs.sort_unstable();
    let mut entries = Mat::from_fn(m, n, |i, t| {
        let k = freqs[i];
        c64::new((PI * (2 * t + 1) as f64 * k as f64 / (2 * n) as f64).cos(), 0.0)
    });
    for j in 0..n {
        let norm = (0..m).map(|i| entries[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..m {
            entries[(i, j)] /= norm;
        }
    }
    Ok(FrameMatrix { entries, field: Field::Real, family: Family::RandomCosine, seed: Some(seed) })
}

pub fn construct_random(family: Family, n: usize, m: usize, seed: u64) -> Result<FrameMatrix> {
    match family {
        Family::GaussianIid => construct_gaussian_iid(n, m, seed, false),
        Family::HaarReal => construct_haar(n, m, Field::Real, seed),
        Family::HaarComplex => construct_haar(n, m, Field::Complex, seed),
        Family::RandomFourier => construct_random_fourier(n, m, seed),
        Family::RandomCosine => construct_random_cosine(n, m, seed),
        Family::RandomSpectrumDft => construct_random_spectrum_dft(n, m, seed),
        other => param(format!("{} is not a random family", other.name())),
    }
}

/// Parameters accepted by [`construct`]. The meaning of `n` follows each
/// family's natural parameter: the prime for DSS/Paley/Alltop and the frame
/// size otherwise (even for the spikes families, which have m = n/2).
#[derive(Debug, Clone, Copy)]
pub struct FrameSpec {
    pub family: Family,
    pub n: usize,
    pub m: Option<usize>,
    pub seed: u64,
    pub redundancy: Option<usize>,
}

pub fn construct(spec: FrameSpec) -> Result<FrameMatrix> {
    let need_m = || spec.m.ok_or_else(|| Error::Param(format!("{} needs m", spec.family.name())));
    match spec.family {
        Family::Dss => construct_dss(spec.n),
        Family::LowPassDft => construct_lowpass_dft(spec.n, need_m()?),
        Family::RealPaley => construct_real_paley(spec.n),
        Family::ComplexPaley => construct_complex_paley(spec.n),
        Family::Grassmannian => construct_grassmannian(spec.n),
        Family::Alltop => construct_alltop(spec.n, spec.redundancy.unwrap_or(2)),
        Family::SpikesSines | Family::SpikesHadamard if spec.n % 2 == 1 => {
            param(format!("{} needs an even frame size, got {}", spec.family.name(), spec.n))
        }
        Family::SpikesSines => construct_spikes_sines(spec.n / 2),
        Family::SpikesHadamard => construct_spikes_hadamard(spec.n / 2),
        f => construct_random(f, spec.n, need_m()?, spec.seed),
    }
}

/// Squared-correlation Welch value (n-m)/((n-1)m): the lower bound on the
/// mean square off-diagonal correlation.
pub fn welch_rms_bound(n: usize, m: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    (n - m) as f64 / ((n - 1) * m) as f64
}

/// Lower bound on the maximal squared correlation; same value as the rms bound.
pub fn welch_max_bound(n: usize, m: usize) -> f64 {
    welch_rms_bound(n, m)
}

pub fn tightness_residual(f: &FrameMatrix) -> f64 {
    let ff = &f.entries * f.entries.adjoint();
    let a = f.n() as f64 / f.m() as f64;
    let mut worst = 0f64;
    for i in 0..f.m() {
        for j in 0..f.m() {
            let target = if i == j { a } else { 0.0 };
            worst = worst.max((ff[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn is_tight(f: &FrameMatrix, tol: f64) -> bool {
    tightness_residual(f) <= tol
}

/// Largest deviation of an off-diagonal |c_ij| from the Welch value.
pub fn equiangularity_residual(f: &FrameMatrix) -> f64 {
    let g = f.gram();
    let w = welch_rms_bound(f.n(), f.m()).sqrt();
    let mut worst = 0f64;
    for i in 0..f.n() {
        for j in 0..i {
            worst = worst.max((g[(i, j)].norm() - w).abs());
        }
    }
    worst
}

pub fn is_equiangular(f: &FrameMatrix, tol: f64) -> bool {
    equiangularity_residual(f) <= tol
}

/// Maximal off-diagonal |c_ij|.
pub fn coherence(f: &FrameMatrix) -> f64 {
    let g = f.gram();
    let mut worst = 0f64;
    for i in 0..f.n() {
        for j in 0..i {
            worst = worst.max(g[(i, j)].norm());
        }
    }
    worst
}

/// Mean of |c_ij|^2 over ordered off-diagonal pairs.
pub fn mean_square_correlation(f: &FrameMatrix) -> f64 {
    let g = f.gram();
    let n = f.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += g[(i, j)].norm_sqr();
            }
        }
    }
    s / (n * (n - 1)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dss7_shape_and_parameters() {
        assert_eq!(dss_parameters(7).unwrap(), (3, 1));
        let f = construct_dss(7).unwrap();
        assert_eq!((f.m(), f.n()), (3, 7));
        for j in 0..7 {
            for i in 0..3 {
                assert!((f.entries[(i, j)].norm() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
            }
        }
        // Brute-force Gram against the Welch value sqrt(4/18).
        let w = (4.0f64 / 18.0).sqrt();
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    assert!((f.correlation(i, j).norm() - w).abs() < 1e-12);
                }
            }
        }
        assert!((coherence(&f).powi(2) - welch_max_bound(7, 3)).abs() < 1e-12);
    }

    #[test]
    fn dss_rejects_bad_sizes() {
        for n in [5, 9, 13, 15, 21] {
            assert!(construct_dss(n).is_err(), "n={n}");
        }
    }

    #[test]
    fn dss31_is_tight() {
        let f = construct_dss(31).unwrap();
        assert_eq!(f.m(), 15);
        assert!(tightness_residual(&f) < 1e-9);
    }

    #[test]
    fn lowpass_cases() {
        let u = construct_lowpass_dft(6, 6).unwrap();
        assert!(tightness_residual(&u) < 1e-12);
        assert!(coherence(&u) < 1e-12);
        let f = construct_lowpass_dft(8, 4).unwrap();
        assert!(tightness_residual(&f) < 1e-12);
        let f = construct_lowpass_dft(101, 50).unwrap();
        assert!(!is_equiangular(&f, 1e-9));
        assert!(construct_lowpass_dft(4, 5).is_err());
    }

    #[test]
    fn random_spectrum_determinism_and_tightness() {
        let a = construct_random_spectrum_dft(101, 50, 1).unwrap();
        let b = construct_random_spectrum_dft(101, 50, 1).unwrap();
        assert_eq!(a.entries, b.entries);
        assert!(tightness_residual(&a) < 1e-9);
        assert!(a.column_norms().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn paley_frames() {
        let f = construct_real_paley(5).unwrap();
        assert_eq!((f.m(), f.n()), (3, 6));
        assert!(equiangularity_residual(&f) < 1e-9);
        assert!((coherence(&f) - 0.2f64.sqrt()).abs() < 1e-9);
        assert!((0..3).all(|i| (0..6).all(|j| f.entries[(i, j)].im == 0.0)));
        let f = construct_real_paley(13).unwrap();
        assert_eq!((f.m(), f.n()), (7, 14));
        assert!(tightness_residual(&f) < 1e-9);
        assert!(construct_real_paley(4).is_err());
        assert!(construct_real_paley(7).is_err());
        for q in [7, 11, 19] {
            let f = construct_complex_paley(q).unwrap();
            assert!(is_tight(&f, 1e-9) && is_equiangular(&f, 1e-9), "q={q}");
        }
        assert!(construct_complex_paley(13).is_err());
    }

    #[test]
    fn grassmannian_is_etf() {
        for n in [7, 11, 23] {
            let f = construct_grassmannian(n).unwrap();
            assert_eq!(f.m(), n.div_ceil(2));
            assert!(is_tight(&f, 1e-9) && is_equiangular(&f, 1e-9), "n={n}");
        }
        assert!(construct_grassmannian(13).is_err());
    }

    #[test]
    fn alltop_is_tight_not_equiangular() {
        for (p, l) in [(5, 2), (7, 3), (11, 11)] {
            let f = construct_alltop(p, l).unwrap();
            assert!(is_tight(&f, 1e-9));
            assert!(!is_equiangular(&f, 1e-9));
            assert!(f.column_norms().iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
        assert!(construct_alltop(9, 2).is_err());
        assert!(construct_alltop(7, 8).is_err());
    }

    #[test]
    fn spikes_frames() {
        let f = construct_spikes_hadamard(4).unwrap();
        assert!(tightness_residual(&f) < 1e-12);
        let f = construct_spikes_sines(4).unwrap();
        assert!(tightness_residual(&f) < 1e-12);
        for j in 4..8 {
            assert!((f.correlation(0, j).norm() - 0.5).abs() < 1e-12);
        }
        assert!(!is_equiangular(&f, 1e-9));
        assert!(construct_spikes_hadamard(3).is_err());
    }

    #[test]
    fn haar_frame_spectrum() {
        let f = construct_haar(64, 32, Field::Complex, 7).unwrap();
        let evs = f.gram().self_adjoint_eigenvalues(Side::Lower).unwrap();
        let nonzero: Vec<f64> = evs.into_iter().filter(|v| *v > 1e-8).collect();
        assert_eq!(nonzero.len(), 32);
        assert!(nonzero.iter().all(|v| (v - 2.0).abs() < 1e-9));
        assert!(tightness_residual(&f) < 1e-9);
        let g = construct_haar(20, 7, Field::Real, 3).unwrap();
        assert!(tightness_residual(&g) < 1e-9);
        assert!((0..7).all(|i| (0..20).all(|j| g.entries[(i, j)].im == 0.0)));
    }

    #[test]
    fn gaussian_columns_near_unit() {
        let f = construct_gaussian_iid(500, 400, 11, false).unwrap();
        assert!(f.column_norms().iter().all(|v| (v - 1.0).abs() < 0.15));
        let g = construct_gaussian_iid(500, 400, 11, true).unwrap();
        assert!(g.column_norms().iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert_eq!(f.entries, construct_gaussian_iid(500, 400, 11, false).unwrap().entries);
    }

    #[test]
    fn cosine_columns_unit() {
        let f = construct_random_cosine(40, 12, 5).unwrap();
        assert!(f.column_norms().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn welch_values() {
        assert!((welch_rms_bound(7, 3) - 4.0 / 18.0).abs() < 1e-15);
        assert_eq!(welch_rms_bound(5, 5), 0.0);
        assert_eq!(welch_max_bound(5, 5), 0.0);
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(Family::parse(f.name()).unwrap(), f);
        }
        assert!(Family::parse("nope").is_err());
    }
}
