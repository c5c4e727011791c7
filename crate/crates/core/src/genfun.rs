//! Closed-form generating functions, expanded as truncated series in
//! `(z, t_1, ..., t_l)`.
//!
//! Products are accumulated one factor at a time with truncation after every
//! multiplication. Each factor `1/f^{i,j}_k = 1/(1 - t_i...t_j z^k)` always
//! involves a capped `t`, so every expansion terminates.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixedpoints::BettiTable;
use crate::flagcore::{block_sum, BlockPermutation, FlagShape, Multidegree, SumMode};
use crate::mpoly::{ExponentVector, SparsePoly, TruncationProfile, VariableSet};

/// Index of `z` in [`VariableSet::series`].
pub const Z: usize = 0;

/// Cap on the exponent of `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZCap {
    /// The dimension of `HQ_d` at the componentwise maximal degree.
    #[default]
    Auto,
    #[serde(untagged)]
    Fixed(u32),
}

impl std::str::FromStr for ZCap {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        s.parse()
            .map(Self::Fixed)
            .map_err(|_| format!("expected `auto` or a nonnegative integer, got `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesRequest {
    pub shape: FlagShape,
    pub t_caps: Multidegree,
    pub z_cap: ZCap,
}

impl SeriesRequest {
    pub fn new(shape: FlagShape, t_caps: Vec<u32>, z_cap: ZCap) -> Result<Self> {
        let t_caps = Multidegree::new(t_caps);
        shape.check_degree(&t_caps)?;
        Ok(Self {
            shape,
            t_caps,
            z_cap,
        })
    }

    pub fn vars(&self) -> VariableSet {
        VariableSet::series(self.shape.l())
    }

    /// Dimension of `HQ` at the maximal requested degree; an upper bound on
    /// the `z`-degree of every requested coefficient.
    pub fn max_dimension(&self) -> u64 {
        self.shape
            .hyperquot_dimension(&self.t_caps)
            .expect("validated caps")
    }

    pub fn resolved_z_cap(&self) -> u32 {
        match self.z_cap {
            ZCap::Auto => self.max_dimension() as u32,
            ZCap::Fixed(c) => c,
        }
    }

    pub fn profile(&self) -> TruncationProfile {
        let mut caps = vec![Some(self.resolved_z_cap())];
        caps.extend(self.t_caps.as_slice().iter().map(|&c| Some(c)));
        TruncationProfile::new(caps)
    }

    /// The `z` cap loses nothing once it reaches the dimension, so the
    /// result may be treated as exact in `z`.
    fn finish(&self, series: SparsePoly) -> SparsePoly {
        if u64::from(self.resolved_z_cap()) >= self.max_dimension() {
            series.assume_exact_in(Z)
        } else {
            series
        }
    }
}

/// `z^k * t_i * ... * t_j` over `(z, t_1..t_l)`.
fn f_monomial(l: usize, i: usize, j: usize, k: usize) -> ExponentVector {
    let mut e = vec![0; l + 1];
    e[Z] = k as u32;
    for slot in &mut e[i..=j] {
        *slot = 1;
    }
    ExponentVector::new(e)
}

fn times_reciprocal(
    acc: SparsePoly,
    m: &ExponentVector,
    trunc: &TruncationProfile,
) -> Result<SparsePoly> {
    let r = SparsePoly::expand_reciprocal(acc.vars(), m, trunc)?;
    acc.mul(&r, trunc)
}

fn one_minus_z_pow(vars: &VariableSet, k: u32) -> SparsePoly {
    SparsePoly::one(vars)
        .sub(&SparsePoly::power(vars, 0, k, 1))
        .expect("same variables")
}

/// `prod (1 - z^i)` over the given exponents.
fn z_product(vars: &VariableSet, exps: impl IntoIterator<Item = usize>) -> SparsePoly {
    let inf = TruncationProfile::unbounded(vars.len());
    exps.into_iter().fold(SparsePoly::one(vars), |acc, i| {
        acc.mul(&one_minus_z_pow(vars, i as u32), &inf)
            .expect("same variables")
    })
}

/// Poincaré polynomial of `F(n;s)` in the single variable `z`, by exact
/// division of `prod_{i<=n} (1 - z^i)` by the per-block products.
pub fn flag_poincare(shape: &FlagShape) -> Result<SparsePoly> {
    let vars = VariableSet::univariate("z");
    let numerator = z_product(&vars, 1..=shape.n());
    let blocks = (1..=shape.l() + 1).flat_map(|j| 1..=shape.s(j) - shape.s(j - 1));
    let denominator = z_product(&vars, blocks);
    numerator.div_exact_univariate(&denominator, 0)
}

fn poincare_in_series_vars(
    shape_poincare: &SparsePoly,
    vars: &VariableSet,
    trunc: &TruncationProfile,
) -> SparsePoly {
    shape_poincare.embed(vars, &[Z]).truncate(trunc)
}

/// Generating function for the Poincaré polynomials of `HQ_d` over all `d`:
/// `P(F) * prod_{i<=j} prod_{k in block i} 1/f^{i,j}_{s_j-k} * 1/f^{i,j}_{s_{j+1}-k+1}`.
pub fn theorem1_series(req: &SeriesRequest) -> Result<SparsePoly> {
    let shape = &req.shape;
    let l = shape.l();
    let vars = req.vars();
    let trunc = req.profile();
    let mut acc = poincare_in_series_vars(&flag_poincare(shape)?, &vars, &trunc);
    for i in 1..=l {
        for j in i..=l {
            for k in shape.block(i) {
                acc = times_reciprocal(acc, &f_monomial(l, i, j, shape.s(j) - k), &trunc)?;
                acc = times_reciprocal(acc, &f_monomial(l, i, j, shape.s(j + 1) - k + 1), &trunc)?;
            }
        }
    }
    Ok(req.finish(acc))
}

/// Generating function for Euler characteristics:
/// `#S * (prod_{i<=j} (1 - t_i...t_j)^{-(s_i - s_{i-1})})^2`, over the same
/// variables as [`theorem1_series`] with `z` absent.
pub fn euler_series(req: &SeriesRequest) -> Result<SparsePoly> {
    let shape = &req.shape;
    let l = shape.l();
    let vars = req.vars();
    let mut caps = vec![None];
    caps.extend(req.t_caps.as_slice().iter().map(|&c| Some(c)));
    let trunc = TruncationProfile::new(caps);
    let count = BigInt::from(shape.count_block_permutations());
    let mut acc = SparsePoly::constant(&vars, count).truncate(&trunc);
    for i in 1..=l {
        for j in i..=l {
            let m = f_monomial(l, i, j, 0);
            for _ in 0..2 * (shape.s(i) - shape.s(i - 1)) {
                acc = times_reciprocal(acc, &m, &trunc)?;
            }
        }
    }
    Ok(acc.assume_exact_in(Z))
}

/// Sum of `eps^w_{k(i,i+1]}` over `i <= l`, `k <= s_i`: the `z`-shift of the
/// `w`-indexed summand.
pub fn base_exponent(shape: &FlagShape, w: &BlockPermutation) -> u64 {
    let eps = |p: usize, q: usize| w.eps(p, q);
    (1..=shape.l())
        .flat_map(|i| (1..=shape.s(i)).map(move |k| (i, k)))
        .map(|(i, k)| block_sum(shape, SumMode::Row, k, i, i + 1, eps))
        .sum()
}

/// `rho_{i,j,k} = s_j - s_i + eps^w_{k(j,j+1]} + k - s_{i-1} - 1` for
/// `1 <= i <= j <= l` and `k` in block `i`.
pub fn rho(shape: &FlagShape, w: &BlockPermutation, i: usize, j: usize, k: usize) -> u64 {
    let eps = |p: usize, q: usize| w.eps(p, q);
    (shape.s(j) - shape.s(i)) as u64
        + block_sum(shape, SumMode::Row, k, j, j + 1, eps)
        + (k - shape.s(i - 1) - 1) as u64
}

/// Contribution of the fixed points with `sigma = w`:
/// `z^{E(w)} prod_{i<=j} prod_{k in block i} 1/f^{i,j}_{rho} * 1/f^{i,j}_{rho+1}`.
pub fn per_w_series(w: &BlockPermutation, req: &SeriesRequest) -> Result<SparsePoly> {
    let shape = &req.shape;
    if !shape.admits(w.values()) {
        return Err(Error::NotBlockAscending(w.values().to_vec()));
    }
    let l = shape.l();
    let vars = req.vars();
    let trunc = req.profile();
    let mut acc = SparsePoly::power(&vars, Z, base_exponent(shape, w) as u32, 1).truncate(&trunc);
    for i in 1..=l {
        for j in i..=l {
            for k in shape.block(i) {
                let r = rho(shape, w, i, j, k) as usize;
                acc = times_reciprocal(acc, &f_monomial(l, i, j, r), &trunc)?;
                acc = times_reciprocal(acc, &f_monomial(l, i, j, r + 1), &trunc)?;
            }
        }
    }
    Ok(req.finish(acc))
}

/// Shapes with a dedicated closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCase {
    /// `G^r(n)`: rank-`r` quotients of `C^n`, i.e. `F(n;n-r)`.
    Grassmannian { n: usize, r: usize },
    /// `F(n) = F(n;1,...,n-1)`.
    CompleteFlag { n: usize },
}

impl SpecialCase {
    /// The corresponding flag shape; `None` for the point `G^n(n)`.
    pub fn shape(&self) -> Result<Option<FlagShape>> {
        match *self {
            Self::Grassmannian { n, r } if r == n && n > 0 => Ok(None),
            Self::Grassmannian { n, r } => FlagShape::grassmannian(n, r).map(Some),
            Self::CompleteFlag { n } => FlagShape::complete(n).map(Some),
        }
    }
}

/// Specialized products, built independently of [`theorem1_series`].
///
/// Grassmannian: `P(G^r(n)) prod_{i=1}^{n-r} 1/(1 - t z^{i-1}) 1/(1 - t z^{n-i+1})`.
/// Complete flag: `P(F(n)) prod_{i<=j<=n-1} 1/(1 - t_i..t_j z^{j-i}) 1/(1 - t_i..t_j z^{j-i+2})`.
pub fn special_case_series(kind: SpecialCase, t_caps: &[u32], z_cap: ZCap) -> Result<SparsePoly> {
    match kind {
        SpecialCase::Grassmannian { n, r } => {
            let Some(shape) = kind.shape()? else {
                // G^n(n) is a point for d = 0 and empty otherwise
                if t_caps.len() != 1 {
                    return Err(Error::DegreeLength {
                        expected: 1,
                        got: t_caps.len(),
                    });
                }
                let vars = VariableSet::series(1);
                return Ok(SparsePoly::one(&vars)
                    .truncate(&TruncationProfile::new(vec![None, Some(t_caps[0])])));
            };
            let req = SeriesRequest::new(shape, t_caps.to_vec(), z_cap)?;
            let vars = req.vars();
            let trunc = req.profile();
            let z = VariableSet::univariate("z");
            let poincare = z_product(&z, 1..=n)
                .div_exact_univariate(&z_product(&z, (1..=n - r).chain(1..=r)), 0)?;
            let mut acc = poincare_in_series_vars(&poincare, &vars, &trunc);
            for i in 1..=n - r {
                acc = times_reciprocal(acc, &f_monomial(1, 1, 1, i - 1), &trunc)?;
                acc = times_reciprocal(acc, &f_monomial(1, 1, 1, n - i + 1), &trunc)?;
            }
            Ok(req.finish(acc))
        }
        SpecialCase::CompleteFlag { n } => {
            let shape = kind.shape()?.expect("complete flags have a shape");
            let req = SeriesRequest::new(shape, t_caps.to_vec(), z_cap)?;
            let vars = req.vars();
            let trunc = req.profile();
            let z = VariableSet::univariate("z");
            let poincare = z_product(&z, 1..=n)
                .div_exact_univariate(&z_product(&z, std::iter::repeat_n(1, n)), 0)?;
            let mut acc = poincare_in_series_vars(&poincare, &vars, &trunc);
            for i in 1..n {
                for j in i..n {
                    acc = times_reciprocal(acc, &f_monomial(n - 1, i, j, j - i), &trunc)?;
                    acc = times_reciprocal(acc, &f_monomial(n - 1, i, j, j - i + 2), &trunc)?;
                }
            }
            Ok(req.finish(acc))
        }
    }
}

/// Exponent vector `z^M t^d` over the series variables.
pub fn series_exponent(d: &Multidegree, m: u32) -> ExponentVector {
    let mut e = vec![m];
    e.extend_from_slice(d.as_slice());
    ExponentVector::new(e)
}

/// Betti numbers of `HQ_d` read off the `t^d` coefficient of
/// [`theorem1_series`]. Errors with out-of-truncation when a fixed `z` cap
/// falls below the dimension.
pub fn betti_from_series(shape: &FlagShape, d: &Multidegree, z_cap: ZCap) -> Result<BettiTable> {
    let req = SeriesRequest::new(shape.clone(), d.as_slice().to_vec(), z_cap)?;
    let series = theorem1_series(&req)?;
    let dim = shape.hyperquot_dimension(d)? as u32;
    let counts = (0..=dim)
        .map(|m| {
            let c = series.coefficient_at(&series_exponent(d, m))?;
            Ok(c.to_biguint().expect("series coefficients are nonnegative"))
        })
        .collect::<Result<Vec<BigUint>>>()?;
    Ok(BettiTable {
        shape: shape.clone(),
        degree: d.clone(),
        counts,
    })
}

/// `chi(HQ_d)` as the `t^d` coefficient of [`euler_series`].
pub fn euler_from_series(shape: &FlagShape, d: &Multidegree) -> Result<BigUint> {
    let req = SeriesRequest::new(shape.clone(), d.as_slice().to_vec(), ZCap::Auto)?;
    let c = euler_series(&req)?.coefficient_at(&series_exponent(d, 0))?;
    Ok(c.to_biguint().unwrap_or_else(BigUint::zero))
}
