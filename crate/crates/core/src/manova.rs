//! Limiting spectral laws: Wachter's MANOVA(beta, gamma) distribution,
//! Marchenko-Pastur, the eta-transform chain and the inverse moment.
//!
//! Integrals over a square-root edge use x = r- + (r+ - r-) sin^2(theta),
//! which turns the density times dx into a smooth function of theta on
//! [0, pi/2]; adaptive Gauss-Kronrod then converges fast. Atoms are carried
//! explicitly and never integrated.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::frames::Field;
use crate::numeric::{gk15, integrate};
use crate::spectra::ReferenceCdf;

/// Requested absolute accuracy of every quadrature in this module.
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManovaParams {
    pub beta: f64,
    pub gamma: f64,
    pub field: Field,
}

impl ManovaParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) || !(gamma > 0.0 && gamma <= 1.0) {
            return param(format!("need beta > 0 and 0 < gamma <= 1; got beta={beta} gamma={gamma}"));
        }
        if beta * gamma > 1.0 + 1e-12 {
            return param(format!("p = beta*gamma = {} exceeds 1", beta * gamma));
        }
        Ok(ManovaParams { beta, gamma, field: Field::Complex })
    }

    /// The (gamma, p) parameterization: beta = p / gamma.
    pub fn from_gamma_p(gamma: f64, p: f64) -> Result<Self> {
        Self::new(p / gamma, gamma)
    }

    /// Realized aspect ratios of an (n, m, k) triple.
    pub fn from_sizes(n: usize, m: usize, k: usize) -> Result<Self> {
        Self::new(k as f64 / m as f64, m as f64 / n as f64)
    }

    pub fn with_field(mut self, field: Field) -> Self {
        self.field = field;
        self
    }

    pub fn p(&self) -> f64 {
        self.beta * self.gamma
    }

    /// x = 1/gamma - 1.
    pub fn x(&self) -> f64 {
        1.0 / self.gamma - 1.0
    }

    pub fn edges(&self) -> SupportEdges {
        let (b, g) = (self.beta, self.gamma);
        let u = (b * (1.0 - g)).sqrt();
        let v = (1.0 - b * g).max(0.0).sqrt();
        SupportEdges { r_minus: (u - v) * (u - v), r_plus: (u + v) * (u + v) }
    }

    /// Mass of the atom at 1/gamma in f_{beta,gamma}: (1 + 1/beta - 1/(beta gamma))^+.
    pub fn atom_inv_gamma(&self) -> f64 {
        (1.0 + 1.0 / self.beta - 1.0 / (self.beta * self.gamma)).max(0.0)
    }

    /// Mass of the atom at zero, present for beta > 1.
    pub fn atom_zero(&self) -> f64 {
        (1.0 - 1.0 / self.beta).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportEdges {
    pub r_minus: f64,
    pub r_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Continuous part of f_{beta,gamma}(x), without atoms.
pub fn manova_density(x: f64, params: &ManovaParams) -> f64 {
    let SupportEdges { r_minus, r_plus } = params.edges();
    if x <= r_minus || x >= r_plus {
        return 0.0;
    }
    ((x - r_minus) * (r_plus - x)).sqrt() / (2.0 * PI * params.beta * x * (1.0 - params.gamma * x))
}

/// Atoms of f_{beta,gamma} in its beta > 1 extended form.
pub fn manova_atoms(params: &ManovaParams) -> Vec<Atom> {
    let mut atoms = Vec::new();
    if params.atom_zero() > 0.0 {
        atoms.push(Atom { location: 0.0, mass: params.atom_zero() });
    }
    if params.atom_inv_gamma() > 0.0 {
        atoms.push(Atom { location: 1.0 / params.gamma, mass: params.atom_inv_gamma() });
    }
    atoms
}

/// Wachter's density in the (gamma, p) form rho_{p,gamma}, continuous part.
/// Written independently of [`manova_density`]; the two agree under p = beta gamma.
pub fn rho_gamma_p(t: f64, gamma: f64, p: f64) -> f64 {
    let a = (p / gamma * (1.0 - gamma)).sqrt();
    let b = (1.0 - p).max(0.0).sqrt();
    let (lo, hi) = ((a - b) * (a - b), (a + b) * (a + b));
    if t <= lo || t >= hi {
        return 0.0;
    }
    gamma * ((t - lo) * (hi - t)).sqrt() / (2.0 * PI * t * (1.0 - gamma * t) * p.min(gamma))
}

pub fn mp_edges(beta: f64) -> (f64, f64) {
    let s = beta.sqrt();
    ((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s))
}

pub fn mp_density(x: f64, beta: f64) -> f64 {
    let (lo, hi) = mp_edges(beta);
    if x <= lo || x >= hi {
        return 0.0;
    }
    ((x - lo) * (hi - x)).sqrt() / (2.0 * beta * PI * x)
}

const TABLE_PANELS: usize = 96;

/// A compactly supported law with a square-root edge density c(x) on
/// [lo, hi] and an optional atom, normalized to total mass one. Represents the
/// distribution of the nonzero eigenvalues.
#[derive(Debug, Clone)]
pub struct EdgeLaw {
    lo: f64,
    hi: f64,
    // density(x) = weight * sqrt((x-lo)(hi-x)) / (2 pi beta x (1 - gamma x)); gamma = 0 gives MP.
    weight: f64,
    beta: f64,
    gamma: f64,
    atom: Option<Atom>,
    table: Vec<f64>,
}

impl EdgeLaw {
    fn build(lo: f64, hi: f64, weight: f64, beta: f64, gamma: f64, atom: Option<Atom>) -> Self {
        let mut law = EdgeLaw { lo, hi, weight, beta, gamma, atom, table: Vec::new() };
        let h = FRAC_PI_2 / TABLE_PANELS as f64;
        let mut acc = 0.0;
        law.table.push(0.0);
        for j in 0..TABLE_PANELS {
            let q = integrate(|t| law.theta_weight(t), j as f64 * h, (j + 1) as f64 * h, 1e-15);
            acc += q.value;
            law.table.push(acc);
        }
        law
    }

    /// Law of the nonzero eigenvalues in the MANOVA(beta, gamma) limit. For
    /// beta > 1 this is beta * f_{beta,gamma} (the zero atom removed).
    pub fn manova(params: &ManovaParams) -> Self {
        let SupportEdges { r_minus, r_plus } = params.edges();
        let weight = params.beta.max(1.0);
        let atom = (params.atom_inv_gamma() > 0.0)
            .then(|| Atom { location: 1.0 / params.gamma, mass: weight * params.atom_inv_gamma() });
        Self::build(r_minus, r_plus, weight, params.beta, params.gamma, atom)
    }

    pub fn marchenko_pastur(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return param(format!("Marchenko-Pastur law needs 0 < beta <= 1, got {beta}"));
        }
        let (lo, hi) = mp_edges(beta);
        Ok(Self::build(lo, hi, 1.0, beta, 0.0, None))
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn atom(&self) -> Option<Atom> {
        self.atom
    }

    fn x_of(&self, theta: f64) -> f64 {
        let s = theta.sin();
        self.lo + (self.hi - self.lo) * s * s
    }

    /// density(x(theta)) * dx/dtheta.
    fn theta_weight(&self, theta: f64) -> f64 {
        let x = self.x_of(theta);
        let (s, c) = theta.sin_cos();
        let w = self.hi - self.lo;
        self.weight * w * w * s * s * c * c / (PI * self.beta * x * (1.0 - self.gamma * x))
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            return 0.0;
        }
        self.weight * ((x - self.lo) * (self.hi - x)).sqrt()
            / (2.0 * PI * self.beta * x * (1.0 - self.gamma * x))
    }

    fn theta_at(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0).sqrt().asin()
    }

    /// Mass of the continuous part.
    pub fn continuous_mass(&self) -> f64 {
        *self.table.last().unwrap()
    }

    pub fn total_mass(&self) -> f64 {
        self.continuous_mass() + self.atom.map_or(0.0, |a| a.mass)
    }

    /// Continuous part of the CDF, from the panel table plus one
    /// Gauss-Kronrod panel inside the last partial interval.
    pub fn continuous_cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return self.continuous_mass();
        }
        let th = self.theta_at(x);
        let h = FRAC_PI_2 / TABLE_PANELS as f64;
        let j = ((th / h) as usize).min(TABLE_PANELS - 1);
        self.table[j] + gk15(&|t| self.theta_weight(t), j as f64 * h, th).0
    }

    /// The same CDF by a fresh adaptive integral; slower, used as a check.
    pub fn continuous_cdf_adaptive(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        let th = self.theta_at(x.min(self.hi));
        integrate(|t| self.theta_weight(t), 0.0, th, 1e-14).value
    }

    /// E[g(X)] including the atom.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let cont = integrate(|t| g(self.x_of(t)) * self.theta_weight(t), 0.0, FRAC_PI_2, QUAD_TOL).value;
        cont + self.atom.map_or(0.0, |a| a.mass * g(a.location))
    }

    pub fn moment(&self, d: i32) -> f64 {
        self.expect(|x| x.powi(d))
    }
}

impl ReferenceCdf for EdgeLaw {
    fn cdf(&self, x: f64) -> f64 {
        let atom = self.atom.map_or(0.0, |a| if x >= a.location { a.mass } else { 0.0 });
        (self.continuous_cdf(x) + atom).min(1.0)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        let atom = self.atom.map_or(0.0, |a| if x > a.location { a.mass } else { 0.0 });
        (self.continuous_cdf(x) + atom).min(1.0)
    }

    fn atoms(&self) -> Vec<f64> {
        self.atom.iter().map(|a| a.location).collect()
    }
}

/// CDF of f_{beta,gamma} including the zero atom for beta > 1.
pub fn manova_cdf(x: f64, params: &ManovaParams) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let law = EdgeLaw::manova(params);
    params.atom_zero() + law.cdf(x) / params.beta.max(1.0)
}

/// m^MANOVA(gamma, p, d) = min(p, gamma) * integral of t^d against rho_{p,gamma}
/// (the nonzero-eigenvalue law), i.e. normalized by the full dimension n.
pub fn manova_moment_numeric(d: i32, params: &ManovaParams) -> Result<f64> {
    if d < -1 {
        return param(format!("moment order must be >= -1, got {d}"));
    }
    if d == -1 && params.beta >= 1.0 {
        return Err(Error::Divergent("inverse moment with a zero atom (beta >= 1)".into()));
    }
    let law = EdgeLaw::manova(params);
    Ok(params.p().min(params.gamma) * law.moment(d))
}

/// Closed-form moments for d = 1..6 in (p, x).
pub fn manova_moment_closed(d: u32, params: &ManovaParams) -> Result<f64> {
    if !(1..=6).contains(&d) {
        return param(format!("closed-form moments cover d = 1..6, got {d}"));
    }
    let poly = crate::moments::asymptotic_moment(d as usize)?;
    Ok(poly.eval(params.p(), params.x()))
}

/// Closed form of the AHMR: (1-p)/(1-beta) below beta = 1 and
/// (beta-p)/(beta-1) above.
pub fn inverse_moment_amplification(beta: f64, p: f64) -> Result<f64> {
    if beta == 1.0 {
        return Err(Error::Divergent("inverse moment at beta = 1".into()));
    }
    if !(0.0..1.0).contains(&p) {
        return param(format!("need 0 <= p < 1, got {p}"));
    }
    Ok(if beta < 1.0 { (1.0 - p) / (1.0 - beta) } else { (beta - p) / (beta - 1.0) })
}

/// AHMR of the limiting nonzero-eigenvalue law, E[1/t] E[t], by quadrature.
pub fn ahmr_numeric(params: &ManovaParams) -> Result<f64> {
    if (params.beta - 1.0).abs() < 1e-12 {
        return Err(Error::Divergent("inverse moment at beta = 1".into()));
    }
    let law = EdgeLaw::manova(params);
    Ok(law.moment(-1) * law.moment(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaChain {
    pub eta_tilde: f64,
    pub eta_normalized: f64,
    /// lim z eta(z) as z -> infinity; NaN when s = t.
    pub z_eta_limit: f64,
}

pub fn eta_tilde(s: f64, t: f64, z: f64) -> f64 {
    let disc = 1.0 + (2.0 * (s + t) - 4.0 * s * t) * z + (s - t) * (s - t) * z * z;
    (1.0 + (s + t) * z + disc.sqrt()) / (2.0 * (1.0 + z))
}

pub fn eta_transform_chain(s: f64, t: f64, z: f64) -> Result<EtaChain> {
    if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&t) || z < 0.0 {
        return param(format!("need 0 <= s, t < 1 and z >= 0; got s={s} t={t} z={z}"));
    }
    let mx = s.max(t);
    let et = eta_tilde(s, t, z);
    Ok(EtaChain {
        eta_tilde: et,
        eta_normalized: (et - mx) / (1.0 - mx),
        z_eta_limit: if s == t { f64::NAN } else { mx / (s - t).abs() },
    })
}
