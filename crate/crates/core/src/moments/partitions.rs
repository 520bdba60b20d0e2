//! Non-crossing partitions of the d-cycle and their contraction into cycles.

use crate::error::{param, Result};

/// A set partition of {0..d-1} in restricted-growth form: `labels[i]` is the
/// block of position i, blocks numbered in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub labels: Vec<usize>,
}

impl Partition {
    pub fn from_labels(raw: &[usize]) -> Partition {
        let mut map = Vec::<(usize, usize)>::new();
        let labels = raw
            .iter()
            .map(|&l| match map.iter().find(|(r, _)| *r == l) {
                Some(&(_, c)) => c,
                None => {
                    map.push((l, map.len()));
                    map.len() - 1
                }
            })
            .collect();
        Partition { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks as sorted position lists (0-based).
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut b = vec![Vec::new(); self.block_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            b[l].push(i);
        }
        b
    }

    /// True when no a < b < c < d has a, c in one block and b, d in another.
    pub fn is_noncrossing(&self) -> bool {
        let d = self.len();
        for a in 0..d {
            for b in a + 1..d {
                if self.labels[b] == self.labels[a] {
                    continue;
                }
                for c in b + 1..d {
                    if self.labels[c] != self.labels[a] {
                        continue;
                    }
                    for e in c + 1..d {
                        if self.labels[e] == self.labels[b] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

pub const MAX_ENUM_D: usize = 14;

/// All non-crossing partitions of {0..d-1}, in lexicographic label order.
pub fn enumerate_noncrossing_partitions(d: usize) -> Result<Vec<Partition>> {
    if d == 0 || d > MAX_ENUM_D {
        return param(format!("non-crossing enumeration supports 1 <= d <= {MAX_ENUM_D}, got {d}"));
    }
    let mut out = Vec::new();
    let mut labels = Vec::with_capacity(d);
    // (min, max) position of each block so far.
    let mut spans: Vec<(usize, usize)> = Vec::new();
    grow(d, &mut labels, &mut spans, &mut out);
    Ok(out)
}

fn grow(d: usize, labels: &mut Vec<usize>, spans: &mut Vec<(usize, usize)>, out: &mut Vec<Partition>) {
    let i = labels.len();
    if i == d {
        out.push(Partition { labels: labels.clone() });
        return;
    }
    for b in 0..=spans.len() {
        if b < spans.len() {
            // Joining block b at position i crosses iff some other block C has
            // min(C) < x < max(C) for an element x of b (all of C lies before i).
            let crosses = labels.iter().enumerate().any(|(x, &lx)| {
                lx == b && spans.iter().enumerate().any(|(c, &(lo, hi))| c != b && lo < x && x < hi)
            });
            if crosses {
                continue;
            }
            let saved = spans[b];
            spans[b].1 = i;
            labels.push(b);
            grow(d, labels, spans, out);
            labels.pop();
            spans[b] = saved;
        } else {
            spans.push((i, i));
            labels.push(b);
            grow(d, labels, spans, out);
            labels.pop();
            spans.pop();
        }
    }
}

/// Contracts the d-cycle 0 -> 1 -> ... -> d-1 -> 0 by merging the vertices of
/// each block. Self-loops (edges inside a block, factor c_ii = 1) disappear;
/// the remaining closed walk over blocks splits into edge-disjoint cycles.
/// Returns the lengths of the cycles of length >= 2, in discovery order.
pub fn contract_cycle(p: &Partition) -> Result<Vec<usize>> {
    if !p.is_noncrossing() {
        return param("contraction is defined for non-crossing partitions only");
    }
    let mut walk: Vec<usize> = Vec::with_capacity(p.len());
    for &l in &p.labels {
        if walk.last() != Some(&l) {
            walk.push(l);
        }
    }
    while walk.len() > 1 && walk.first() == walk.last() {
        walk.pop();
    }
    if walk.len() < 2 {
        return Ok(Vec::new());
    }
    let mut cycles = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let closing = walk[0];
    for &v in walk.iter().chain(std::iter::once(&closing)) {
        match stack.iter().position(|&s| s == v) {
            Some(j) => {
                cycles.push(stack.len() - j);
                stack.truncate(j + 1);
            }
            None => stack.push(v),
        }
    }
    Ok(cycles)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Narayana number N(d, k) = (1/d) C(d, k) C(d, k-1).
pub fn narayana(d: u64, k: u64) -> u128 {
    if d == 0 || k == 0 || k > d {
        return 0;
    }
    binomial(d, k) * binomial(d, k - 1) / d as u128
}

pub fn catalan(d: u64) -> u128 {
    binomial(2 * d, d) / (d as u128 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Oracle: every set partition via restricted growth strings, filtered.
    fn all_set_partitions(d: usize) -> Vec<Partition> {
        fn rec(d: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Partition>) {
            if cur.len() == d {
                out.push(Partition { labels: cur.clone() });
                return;
            }
            let limit = if cur.is_empty() { 0 } else { max + 1 };
            for b in 0..=limit {
                cur.push(b);
                rec(d, cur, max.max(b), out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(d, &mut Vec::new(), 0, &mut out);
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for d in 1..=8 {
            let fast = enumerate_noncrossing_partitions(d).unwrap();
            let slow: Vec<Partition> = all_set_partitions(d).into_iter().filter(|p| p.is_noncrossing()).collect();
            assert_eq!(fast, slow, "d={d}");
            assert_eq!(fast.len() as u128, catalan(d as u64));
            for k in 1..=d {
                let c = fast.iter().filter(|p| p.block_count() == k).count() as u128;
                assert_eq!(c, narayana(d as u64, k as u64), "d={d} k={k}");
            }
        }
        assert_eq!(enumerate_noncrossing_partitions(3).unwrap().len(), 5);
        assert!(enumerate_noncrossing_partitions(15).is_err());
    }

    #[test]
    fn narayana_values() {
        assert_eq!(narayana(5, 2), 10);
        assert_eq!(narayana(4, 2), 6);
        assert_eq!(narayana(6, 3), 50);
        for d in 1..=12u64 {
            assert_eq!(narayana(d, 1), 1);
            assert_eq!((1..=d).map(|k| narayana(d, k)).sum::<u128>(), catalan(d));
        }
    }

    #[test]
    fn contraction_examples() {
        let c = |l: &[usize]| contract_cycle(&Partition::from_labels(l)).unwrap();
        assert_eq!(c(&[0, 0, 1, 2]), vec![3]);
        assert_eq!(c(&[0, 0, 1, 1]), vec![2]);
        assert_eq!(c(&[0, 1, 0, 2]), vec![2, 2]);
        assert_eq!(c(&[0, 1]), vec![2]);
        assert_eq!(c(&[0, 0, 0]), Vec::<usize>::new());
        assert!(contract_cycle(&Partition::from_labels(&[0, 1, 0, 1])).is_err());
    }

    #[test]
    fn contraction_length_identity() {
        // sum of cycle lengths = k + s - 1 with s the number of nontrivial cycles.
        for d in 1..=9 {
            for p in enumerate_noncrossing_partitions(d).unwrap() {
                let cycles = contract_cycle(&p).unwrap();
                let s = cycles.len();
                assert_eq!(cycles.iter().sum::<usize>() + 1, p.block_count() + s, "{p:?}");
            }
        }
    }
}
