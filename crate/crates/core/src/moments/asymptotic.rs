//! Exact asymptotic moment polynomials m_d(p, x) from the recursion over
//! non-crossing partitions of the d-cycle.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::partitions::{contract_cycle, enumerate_noncrossing_partitions, Partition};
use crate::error::{param, Result};

pub const MAX_ASYMPTOTIC_D: usize = 12;

/// Polynomial in x with exact rational coefficients, index = power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XPoly(pub Vec<BigRational>);

impl XPoly {
    pub fn zero() -> Self {
        XPoly(Vec::new())
    }

    pub fn constant(c: i64) -> Self {
        XPoly(vec![BigRational::from_integer(BigInt::from(c))]).trimmed()
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        XPoly(coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect()).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn coeff(&self, power: usize) -> BigRational {
        self.0.get(power).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &XPoly) -> XPoly {
        let n = self.0.len().max(other.0.len());
        XPoly((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect()).trimmed()
    }

    pub fn sub(&self, other: &XPoly) -> XPoly {
        let n = self.0.len().max(other.0.len());
        XPoly((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect()).trimmed()
    }

    pub fn mul(&self, other: &XPoly) -> XPoly {
        if self.0.is_empty() || other.0.is_empty() {
            return XPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        XPoly(out).trimmed()
    }

    pub fn scale(&self, c: i64) -> XPoly {
        let c = BigRational::from_integer(BigInt::from(c));
        XPoly(self.0.iter().map(|v| v * &c).collect()).trimmed()
    }

    /// (x + 1)^e.
    pub fn x_plus_one_pow(e: usize) -> XPoly {
        (0..e).fold(XPoly::constant(1), |acc, _| acc.mul(&XPoly::from_ints(&[1, 1])))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn abs_coeff_sum(&self) -> BigRational {
        self.0.iter().map(|c| c.abs()).sum()
    }
}

/// One a_{d,k} block: the product terms (cycle-length multisets) and how many
/// partitions produce each, plus the resulting polynomial in x.
#[derive(Debug, Clone)]
pub struct Block {
    pub k: usize,
    pub terms: BTreeMap<Vec<usize>, u64>,
    pub poly: XPoly,
}

impl Block {
    /// Number of partition product terms; equals N(d, k) for 1 < k < d.
    pub fn term_count(&self) -> u64 {
        self.terms.values().sum()
    }
}

/// m_d(p, x) = sum_k p^k a_{d,k}(x) with exact coefficients.
#[derive(Debug, Clone)]
pub struct MomentPolynomial {
    pub d: usize,
    /// blocks[k-1] holds a_{d,k}.
    pub blocks: Vec<Block>,
}

impl MomentPolynomial {
    /// Coefficient of p^pp x^xp.
    pub fn coefficient(&self, pp: usize, xp: usize) -> BigRational {
        if pp == 0 || pp > self.d {
            return BigRational::zero();
        }
        self.blocks[pp - 1].poly.coeff(xp)
    }

    pub fn coefficients(&self) -> BTreeMap<(usize, usize), BigRational> {
        let mut out = BTreeMap::new();
        for b in &self.blocks {
            for (xp, c) in b.poly.0.iter().enumerate() {
                if !c.is_zero() {
                    out.insert((b.k, xp), c.clone());
                }
            }
        }
        out
    }

    pub fn block(&self, k: usize) -> &XPoly {
        &self.blocks[k - 1].poly
    }

    pub fn eval(&self, p: f64, x: f64) -> f64 {
        self.blocks.iter().map(|b| p.powi(b.k as i32) * b.poly.eval(x)).sum()
    }

    /// The p = 1 specialization as a polynomial in x.
    pub fn at_p_one(&self) -> XPoly {
        self.blocks.iter().fold(XPoly::zero(), |acc, b| acc.add(&b.poly))
    }

    pub fn to_latex(&self) -> String {
        let mut parts = Vec::new();
        for b in &self.blocks {
            let body = xpoly_latex(&b.poly);
            if body.is_empty() {
                continue;
            }
            let pp = if b.k == 1 { "p".to_string() } else { format!("p^{{{}}}", b.k) };
            let nonzero: Vec<(usize, &BigRational)> =
                b.poly.0.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            parts.push(match nonzero.as_slice() {
                [(0, c)] if c.is_one() => pp,
                [(i, c)] if c.is_positive() => {
                    let coef = if c.is_one() { String::new() } else { c.to_string() };
                    let mon = match i {
                        0 => String::new(),
                        1 => "x".into(),
                        _ => format!("x^{{{i}}}"),
                    };
                    format!("{coef}{pp}{mon}")
                }
                _ => format!("{pp}({body})"),
            });
        }
        format!("m_{{{}}} = {}", self.d, parts.join(" + "))
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Term {
            p: usize,
            x: usize,
            coefficient: String,
        }
        #[derive(Serialize)]
        struct BlockJson {
            k: usize,
            partition_terms: u64,
            products: Vec<(Vec<usize>, u64)>,
        }
        let terms: Vec<Term> = self
            .coefficients()
            .into_iter()
            .map(|((p, x), c)| Term { p, x, coefficient: c.to_string() })
            .collect();
        let blocks: Vec<BlockJson> = self
            .blocks
            .iter()
            .map(|b| BlockJson {
                k: b.k,
                partition_terms: b.term_count(),
                products: b.terms.iter().map(|(t, c)| (t.clone(), *c)).collect(),
            })
            .collect();
        serde_json::json!({ "d": self.d, "terms": terms, "blocks": blocks })
    }
}

fn xpoly_latex(p: &XPoly) -> String {
    let mut s = String::new();
    for (i, c) in p.0.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        let coef = if mag.is_one() && i > 0 { String::new() } else { mag.to_string() };
        let mon = match i {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{{{i}}}"),
        };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&coef);
        s.push_str(&mon);
    }
    s
}

/// Diagonal coefficients a_{j,j}(x) for j = 1..=d_max, with the full block
/// structure of every level.
pub struct Recursion {
    pub diagonal: Vec<XPoly>,
    pub levels: Vec<MomentPolynomial>,
}

fn level(d: usize, diagonal: &[XPoly], partitions: &[Partition]) -> Result<MomentPolynomial> {
    let mut blocks: Vec<Block> =
        (1..=d).map(|k| Block { k, terms: BTreeMap::new(), poly: XPoly::zero() }).collect();
    for p in partitions {
        let k = p.block_count();
        if k == d {
            continue;
        }
        let mut cycles = contract_cycle(p)?;
        cycles.sort_unstable_by(|a, b| b.cmp(a));
        *blocks[k - 1].terms.entry(cycles).or_insert(0) += 1;
    }
    for b in blocks.iter_mut().take(d - 1) {
        let mut poly = XPoly::zero();
        for (cycles, count) in &b.terms {
            let prod = cycles.iter().fold(XPoly::constant(1), |acc, &l| acc.mul(&diagonal[l - 1]));
            poly = poly.add(&prod.scale(*count as i64));
        }
        b.poly = poly;
    }
    // a_{d,d} closes the p = 1 identity m_d(1, x) = (x+1)^{d-1}.
    let lower = blocks[..d - 1].iter().fold(XPoly::zero(), |acc, b| acc.add(&b.poly));
    let mut top = Block { k: d, terms: BTreeMap::new(), poly: XPoly::x_plus_one_pow(d - 1).sub(&lower) };
    top.terms.insert(vec![d], 1);
    blocks[d - 1] = top;
    Ok(MomentPolynomial { d, blocks })
}

pub fn recursion(d_max: usize) -> Result<Recursion> {
    if d_max == 0 || d_max > MAX_ASYMPTOTIC_D {
        return param(format!("asymptotic moments supported for 1 <= d <= {MAX_ASYMPTOTIC_D}, got {d_max}"));
    }
    let mut diagonal = Vec::new();
    let mut levels = Vec::new();
    for d in 1..=d_max {
        let parts = enumerate_noncrossing_partitions(d)?;
        let lvl = level(d, &diagonal, &parts)?;
        diagonal.push(lvl.block(d).clone());
        levels.push(lvl);
    }
    Ok(Recursion { diagonal, levels })
}

pub fn asymptotic_moment(d: usize) -> Result<MomentPolynomial> {
    Ok(recursion(d)?.levels.pop().expect("d >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::partitions::narayana;

    fn ints(p: &XPoly) -> Vec<i64> {
        p.0.iter().map(|c| c.to_integer().to_i64().unwrap()).collect()
    }

    #[test]
    fn low_orders() {
        let r = recursion(3).unwrap();
        assert_eq!(ints(&r.diagonal[0]), vec![1]);
        assert_eq!(ints(&r.diagonal[1]), vec![0, 1]);
        assert_eq!(ints(&r.diagonal[2]), vec![0, -1, 1]);
        let m3 = &r.levels[2];
        assert_eq!(ints(m3.block(1)), vec![1]);
        assert_eq!(ints(m3.block(2)), vec![0, 3]);
        assert_eq!(m3.blocks[1].terms.get(&vec![2]), Some(&3));
    }

    #[test]
    fn latex_rendering() {
        let m4 = asymptotic_moment(4).unwrap();
        assert_eq!(m4.to_latex(), "m_{4} = p + 6p^{2}x + p^{3}(6x^{2} - 4x) + p^{4}(x^{3} - 3x^{2} + x)");
    }

    #[test]
    fn block_term_counts_are_narayana() {
        let r = recursion(9).unwrap();
        for m in &r.levels {
            for b in &m.blocks[..m.d.saturating_sub(1)] {
                assert_eq!(b.term_count() as u128, narayana(m.d as u64, b.k as u64), "d={} k={}", m.d, b.k);
            }
        }
    }

    #[test]
    fn coefficients_are_integers() {
        let m = asymptotic_moment(8).unwrap();
        assert!(m.coefficients().values().all(|c| c.is_integer()));
    }
}
