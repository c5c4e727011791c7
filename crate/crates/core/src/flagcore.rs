//! Flag shapes, dimension formulas and block-ascending permutations.
//!
//! Every index exposed here is 1-based: positions `1..=n`, blocks
//! `0..=l+1` with `s_0 = 0` and `s_{l+1} = n`.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair `(n; s_1, ..., s_l)` describing a partial flag variety.
///
/// `0 < s_1 < ... < s_l <= n`. The top subspace may fill the ambient space
/// (`s_l = n`), which is the rank-zero quotient case; `F(1;1)` is the
/// standard example.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlagShape {
    n: usize,
    s: Vec<usize>,
}

impl FlagShape {
    pub fn new(n: usize, s: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidShape("n must be positive".into()));
        }
        if s.is_empty() {
            return Err(Error::InvalidShape("s must be nonempty".into()));
        }
        if s[0] == 0 {
            return Err(Error::InvalidShape("s_1 must be positive".into()));
        }
        if let Some(w) = s.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidShape(format!(
                "s must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        if *s.last().unwrap() > n {
            return Err(Error::InvalidShape(format!(
                "s_l = {} exceeds n = {}",
                s[s.len() - 1],
                n
            )));
        }
        Ok(Self { n, s })
    }

    /// The complete flag `F(n;1,2,...,n-1)`.
    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (1..n).collect())
    }

    /// The Grassmannian of rank-`r` quotients, `G^r(n) = F(n;n-r)`.
    pub fn grassmannian(n: usize, r: usize) -> Result<Self> {
        if r >= n {
            return Err(Error::InvalidShape(format!(
                "quotient rank {r} leaves no subspace in C^{n}"
            )));
        }
        Self::new(n, vec![n - r])
    }

    /// All shapes with `0 < s_1 < ... < s_l < n`, ordered by `s`.
    pub fn all_proper(n: usize) -> Vec<Self> {
        if n < 2 {
            return Vec::new();
        }
        let inner = n - 1;
        let mut shapes: Vec<Self> = (1u32..(1 << inner))
            .map(|mask| {
                let s = (1..=inner)
                    .filter(|&k| mask & (1 << (k - 1)) != 0)
                    .collect();
                Self { n, s }
            })
            .collect();
        shapes.sort();
        shapes
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.s.len()
    }

    /// `s_1..s_l` as given.
    pub fn subspace_dims(&self) -> &[usize] {
        &self.s
    }

    /// `s_i` for `0 <= i <= l+1`.
    pub fn s(&self, i: usize) -> usize {
        match i {
            0 => 0,
            i if i <= self.l() => self.s[i - 1],
            i if i == self.l() + 1 => self.n,
            _ => panic!("block index {i} beyond l+1 = {}", self.l() + 1),
        }
    }

    /// Quotient rank `r_i = n - s_i`.
    pub fn r(&self, i: usize) -> usize {
        self.n - self.s(i)
    }

    /// Positions `s_{i-1}+1 ..= s_i` of block `i` (`1 <= i <= l+1`).
    pub fn block(&self, i: usize) -> RangeInclusive<usize> {
        self.s(i - 1) + 1..=self.s(i)
    }

    /// Block containing position `k`.
    pub fn block_of(&self, k: usize) -> usize {
        (1..=self.l() + 1)
            .find(|&i| k <= self.s(i))
            .expect("position within 1..=n")
    }

    pub fn is_complete(&self) -> bool {
        self.s.iter().copied().eq(1..self.n)
    }

    pub fn check_degree(&self, d: &Multidegree) -> Result<()> {
        if d.len() != self.l() {
            return Err(Error::DegreeLength {
                expected: self.l(),
                got: d.len(),
            });
        }
        Ok(())
    }

    /// `dim F(n;s) = sum_i (s_{i+1} - s_i) s_i`.
    pub fn flag_dimension(&self) -> u64 {
        (1..=self.l())
            .map(|i| ((self.s(i + 1) - self.s(i)) * self.s(i)) as u64)
            .sum()
    }

    /// `sum_i d_i (s_{i+1} - s_{i-1}) + dim F(n;s)`.
    pub fn hyperquot_dimension(&self, d: &Multidegree) -> Result<u64> {
        self.check_degree(d)?;
        let degree_part: u64 = (1..=self.l())
            .map(|i| u64::from(d.get(i)) * (self.s(i + 1) - self.s(i - 1)) as u64)
            .sum();
        Ok(degree_part + self.flag_dimension())
    }

    /// `#S(n;s) = prod_{i=0}^{l} C(n - s_i, s_{i+1} - s_i)`.
    pub fn count_block_permutations(&self) -> BigUint {
        (0..=self.l())
            .map(|i| binomial(self.n - self.s(i), self.s(i + 1) - self.s(i)))
            .product()
    }

    /// Every element of `S(n;s)` in lexicographic order of one-line notation.
    pub fn block_permutations(&self) -> Vec<BlockPermutation> {
        let mut out = Vec::new();
        let mut used = vec![false; self.n + 1];
        let mut current = Vec::with_capacity(self.n);
        self.extend_block_permutations(&mut current, &mut used, &mut out);
        out
    }

    fn extend_block_permutations(
        &self,
        current: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<BlockPermutation>,
    ) {
        let pos = current.len() + 1;
        if pos > self.n {
            out.push(BlockPermutation(current.clone()));
            return;
        }
        let starts_block = (0..=self.l()).any(|i| self.s(i) + 1 == pos);
        let floor = if starts_block {
            1
        } else {
            current[pos - 2] + 1
        };
        for v in floor..=self.n {
            if used[v] {
                continue;
            }
            used[v] = true;
            current.push(v);
            self.extend_block_permutations(current, used, out);
            current.pop();
            used[v] = false;
        }
    }

    /// Whether `values` lies in `S(n;s)`.
    pub fn admits(&self, values: &[usize]) -> bool {
        if values.len() != self.n {
            return false;
        }
        let mut seen = vec![false; self.n + 1];
        for &v in values {
            if v == 0 || v > self.n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        (1..=self.l() + 1).all(|i| {
            let block = self.block(i);
            values[block.start() - 1..*block.end()]
                .windows(2)
                .all(|w| w[0] < w[1])
        })
    }
}

impl fmt::Display for FlagShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({};", self.n)?;
        for (idx, s) in self.s.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Degrees `d_1..d_l` of the successive quotient sheaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multidegree(Vec<u32>);

impl Multidegree {
    pub fn new(d: Vec<u32>) -> Self {
        Self(d)
    }

    pub fn zero(l: usize) -> Self {
        Self(vec![0; l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `d_i`, 1-based; zero outside `1..=l`.
    pub fn get(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&x| u64::from(x)).sum()
    }

    /// Every multidegree with `0 <= d_i <= caps_i`, lexicographic.
    pub fn all_within(caps: &[u32]) -> Vec<Self> {
        let mut out = vec![Vec::with_capacity(caps.len())];
        for &cap in caps {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=cap).map(move |v| {
                        let mut next = prefix.clone();
                        next.push(v);
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(Self).collect()
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Whether a sum runs along a row (`eps_{i,j}` for `j` in a block) or down a
/// column (`eps_{i,j}` for `i` in a block).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    Row,
    Col,
}

/// A permutation of `1..=n` in one-line notation, `sigma(k) = values[k-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlockPermutation(Vec<usize>);

impl BlockPermutation {
    pub fn new(shape: &FlagShape, values: Vec<usize>) -> Result<Self> {
        if shape.admits(&values) {
            Ok(Self(values))
        } else {
            Err(Error::NotBlockAscending(values))
        }
    }

    #[cfg(test)]
    pub(crate) fn from_values(values: Vec<usize>) -> Self {
        Self(values)
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// `sigma(k)`, 1-based.
    pub fn at(&self, k: usize) -> usize {
        self.0[k - 1]
    }

    /// `eps_{i,j}`: 1 when `sigma(i) < sigma(j)`.
    pub fn epsilon(&self, i: usize, j: usize) -> Result<u32> {
        let max = self.n();
        for index in [i, j] {
            if index == 0 || index > max {
                return Err(Error::IndexOutOfRange { index, max });
            }
        }
        Ok(self.eps(i, j))
    }

    #[inline]
    pub(crate) fn eps(&self, i: usize, j: usize) -> u32 {
        u32::from(self.0[i - 1] < self.0[j - 1])
    }

    /// Row mode: `sum_{s_lo < j <= s_hi} eps_{fixed,j}`.
    /// Col mode: `sum_{s_lo < i <= s_hi} eps_{i,fixed}`.
    pub fn varepsilon(
        &self,
        shape: &FlagShape,
        mode: SumMode,
        fixed: usize,
        lo: usize,
        hi: usize,
    ) -> Result<u64> {
        let l = shape.l();
        if lo > hi || hi > l + 1 {
            return Err(Error::BlockRange { lo, hi, l });
        }
        if fixed == 0 || fixed > shape.n() {
            return Err(Error::IndexOutOfRange {
                index: fixed,
                max: shape.n(),
            });
        }
        Ok(block_sum(shape, mode, fixed, lo, hi, |i, j| self.eps(i, j)))
    }
}

impl fmt::Display for BlockPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (idx, v) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// Unchecked block sum over an arbitrary `eps` relation.
#[inline]
pub(crate) fn block_sum(
    shape: &FlagShape,
    mode: SumMode,
    fixed: usize,
    lo: usize,
    hi: usize,
    eps: impl Fn(usize, usize) -> u32,
) -> u64 {
    (shape.s(lo) + 1..=shape.s(hi))
        .map(|m| {
            u64::from(match mode {
                SumMode::Row => eps(fixed, m),
                SumMode::Col => eps(m, fixed),
            })
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(n: usize, s: &[usize]) -> FlagShape {
        FlagShape::new(n, s.to_vec()).unwrap()
    }

    #[test]
    fn construction() {
        let g = shape(2, &[1]);
        assert_eq!(g.l(), 1);
        assert_eq!(g.r(1), 1);
        assert_eq!((g.s(0), g.s(2)), (0, 2));
        assert!(shape(3, &[1, 2]).is_complete());
        assert!(FlagShape::new(3, vec![2, 1]).is_err());
        assert!(FlagShape::new(3, vec![1, 1]).is_err());
        assert!(FlagShape::new(3, vec![0, 2]).is_err());
        assert!(FlagShape::new(3, vec![4]).is_err());
        assert!(FlagShape::new(3, vec![]).is_err());
        assert!(FlagShape::new(0, vec![1]).is_err());
        // rank-zero top quotient
        assert!(FlagShape::new(1, vec![1]).is_ok());
    }

    #[test]
    fn dimensions() {
        assert_eq!(shape(2, &[1]).flag_dimension(), 1);
        assert_eq!(shape(3, &[1, 2]).flag_dimension(), 3);
        assert_eq!(shape(4, &[1, 3]).flag_dimension(), 5);
        let d = |v: &[u32]| Multidegree::new(v.to_vec());
        assert_eq!(shape(2, &[1]).hyperquot_dimension(&d(&[1])).unwrap(), 3);
        assert_eq!(
            shape(3, &[1, 2]).hyperquot_dimension(&d(&[1, 1])).unwrap(),
            7
        );
        assert_eq!(shape(1, &[1]).hyperquot_dimension(&d(&[4])).unwrap(), 4);
        for n in 2..=5 {
            for sh in FlagShape::all_proper(n) {
                assert_eq!(
                    sh.hyperquot_dimension(&Multidegree::zero(sh.l())).unwrap(),
                    sh.flag_dimension()
                );
            }
            let full = FlagShape::complete(n).unwrap();
            let deg = Multidegree::new((1..n as u32).collect());
            let expected = 2 * deg.total() + (n * (n - 1) / 2) as u64;
            assert_eq!(full.hyperquot_dimension(&deg).unwrap(), expected);
        }
        assert!(shape(3, &[1, 2]).hyperquot_dimension(&d(&[1])).is_err());
    }

    #[test]
    fn enumerate_small() {
        let vals = |sh: &FlagShape| -> Vec<Vec<usize>> {
            sh.block_permutations().into_iter().map(|p| p.0).collect()
        };
        assert_eq!(vals(&shape(2, &[1])), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(
            vals(&shape(3, &[2])),
            vec![vec![1, 2, 3], vec![1, 3, 2], vec![2, 3, 1]]
        );
        assert_eq!(shape(4, &[1, 2, 3]).block_permutations().len(), 24);
        assert_eq!(vals(&shape(1, &[1])), vec![vec![1]]);
    }

    #[test]
    fn counts() {
        assert_eq!(
            shape(2, &[1]).count_block_permutations(),
            BigUint::from(2u32)
        );
        assert_eq!(
            shape(3, &[1, 2]).count_block_permutations(),
            BigUint::from(6u32)
        );
        assert_eq!(
            shape(4, &[2]).count_block_permutations(),
            BigUint::from(6u32)
        );
        for n in 2..=6 {
            for sh in FlagShape::all_proper(n) {
                let perms = sh.block_permutations();
                assert_eq!(
                    BigUint::from(perms.len()),
                    sh.count_block_permutations(),
                    "{sh}"
                );
                assert!(perms.windows(2).all(|w| w[0] < w[1]));
                assert!(perms.iter().all(|p| sh.admits(p.values())));
            }
        }
    }

    #[test]
    fn epsilon_values() {
        let id = BlockPermutation::identity(2);
        let swap = BlockPermutation(vec![2, 1]);
        assert_eq!(id.epsilon(1, 2).unwrap(), 1);
        assert_eq!(swap.epsilon(1, 2).unwrap(), 0);
        assert_eq!(swap.epsilon(2, 2).unwrap(), 0);
        assert!(id.epsilon(0, 1).is_err());
        assert!(id.epsilon(1, 3).is_err());
    }

    #[test]
    fn varepsilon_values() {
        let g = shape(2, &[1]);
        let id = BlockPermutation::identity(2);
        let swap = BlockPermutation(vec![2, 1]);
        assert_eq!(id.varepsilon(&g, SumMode::Row, 1, 1, 2).unwrap(), 1);
        assert_eq!(swap.varepsilon(&g, SumMode::Row, 1, 1, 2).unwrap(), 0);
        assert_eq!(id.varepsilon(&g, SumMode::Col, 2, 1, 1).unwrap(), 0);
        assert_eq!(id.varepsilon(&g, SumMode::Col, 2, 0, 1).unwrap(), 1);
        assert!(id.varepsilon(&g, SumMode::Row, 1, 2, 1).is_err());
        assert!(id.varepsilon(&g, SumMode::Row, 1, 0, 3).is_err());
        assert!(id.varepsilon(&g, SumMode::Row, 3, 0, 1).is_err());
    }

    #[test]
    fn epsilon_antisymmetry_and_block_ascents() {
        for n in 1..=5 {
            let shapes = if n == 1 {
                vec![shape(1, &[1])]
            } else {
                FlagShape::all_proper(n)
            };
            for sh in shapes {
                for p in sh.block_permutations() {
                    for i in 1..=n {
                        assert_eq!(p.epsilon(i, i).unwrap(), 0);
                        for j in (1..=n).filter(|&j| j != i) {
                            assert_eq!(p.epsilon(i, j).unwrap() + p.epsilon(j, i).unwrap(), 1);
                        }
                    }
                    for i in 1..=sh.l() {
                        for k in sh.block(i) {
                            let within = p.varepsilon(&sh, SumMode::Col, k, i - 1, i).unwrap();
                            assert_eq!(within, (k - sh.s(i - 1) - 1) as u64);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_member() {
        let sh = shape(3, &[2]);
        assert!(BlockPermutation::new(&sh, vec![2, 1, 3]).is_err());
        assert!(BlockPermutation::new(&sh, vec![1, 1, 3]).is_err());
        assert!(BlockPermutation::new(&sh, vec![2, 3, 1]).is_ok());
    }

    #[test]
    fn all_within_caps() {
        let all = Multidegree::all_within(&[1, 2]);
        assert_eq!(all.len(), 6);
        assert_eq!(all[1].as_slice(), &[0, 1]);
        assert_eq!(Multidegree::all_within(&[]).len(), 1);
    }
}
