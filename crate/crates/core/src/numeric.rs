//! Small numerical kernels shared by the analytic and statistical modules.

use crate::error::{param, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Legendre symbol (a | p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: i64, p: u64) -> i64 {
    let p = p as i64;
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    // Euler's criterion by square-and-multiply.
    let (mut base, mut e, mut acc) = (a as i128, (p - 1) / 2, 1i128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as i128;
        }
        base = base * base % p as i128;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod panel: (kronrod estimate, |kronrod - gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Globally adaptive Gauss-Kronrod integration on [a, b]: keeps bisecting the
/// panel with the largest error estimate until the summed estimate is below
/// `tol` or the panel budget runs out.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Quadrature {
    const MAX_PANELS: usize = 4000;
    if a == b {
        return Quadrature { value: 0.0, error: 0.0, panels: 0 };
    }
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= tol || panels.len() >= MAX_PANELS {
            let value = panels.iter().map(|p| p.2).sum();
            return Quadrature { value, error: err, panels: panels.len() };
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

/// Golden-section search for the maximizer of a unimodal `f` on [a, b].
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Ordinary least squares of `y` on the columns of `x` plus an intercept.
/// Returns coefficients `[intercept, b1, b2, ...]`, their standard errors,
/// R^2 and residuals.
#[derive(Debug, Clone)]
pub struct Ols {
    pub coef: Vec<f64>,
    pub stderr: Vec<f64>,
    pub r2: f64,
    pub residuals: Vec<f64>,
}

pub fn ols(y: &[f64], x: &[Vec<f64>]) -> Result<Ols> {
    let n = y.len();
    let p = x.len() + 1;
    if n <= p {
        return param(format!("regression needs more than {p} points, got {n}"));
    }
    let row = |i: usize| -> Vec<f64> {
        std::iter::once(1.0).chain(x.iter().map(|c| c[i])).collect()
    };
    let mut xtx = faer::Mat::<f64>::zeros(p, p);
    let mut xty = faer::Mat::<f64>::zeros(p, 1);
    for i in 0..n {
        let r = row(i);
        for a in 0..p {
            xty[(a, 0)] += r[a] * y[i];
            for b in 0..p {
                xtx[(a, b)] += r[a] * r[b];
            }
        }
    }
    let lu = xtx.partial_piv_lu();
    let coef_m = faer::linalg::solvers::Solve::solve(&lu, &xty);
    let inv = faer::linalg::solvers::DenseSolveCore::inverse(&lu);
    let coef: Vec<f64> = (0..p).map(|a| coef_m[(a, 0)]).collect();
    let residuals: Vec<f64> = (0..n)
        .map(|i| y[i] - row(i).iter().zip(&coef).map(|(r, c)| r * c).sum::<f64>())
        .collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let ybar = mean(y);
    let sst: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let s2 = sse / (n - p) as f64;
    let stderr = (0..p).map(|a| (s2 * inv[(a, a)]).max(0.0).sqrt()).collect();
    let r2 = if sst > 0.0 { (1.0 - sse / sst).clamp(0.0, 1.0) } else { 1.0 };
    Ok(Ols { coef, stderr, r2, residuals })
}

/// Two-sided p-value of a Student t statistic with `dof` degrees of freedom.
pub fn t_two_sided(t: f64, dof: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, StudentsT};
    let dist = StudentsT::new(0.0, 1.0, dof).expect("dof > 0");
    (2.0 * dist.cdf(-t.abs())).min(1.0)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        s += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Asymptotic p-value of the two-sample KS test, with the usual small-sample
/// correction of the effective size.
pub fn ks_two_sample_pvalue(d: f64, na: usize, nb: usize) -> f64 {
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let s = ne.sqrt();
    kolmogorov_q((s + 0.12 + 0.11 / s) * d)
}

pub fn binary_entropy(p: f64) -> f64 {
    let h = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    h(p) + h(1.0 - p)
}
