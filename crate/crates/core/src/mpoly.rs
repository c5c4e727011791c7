//! Sparse multivariate polynomials and truncated power series over `Z`.
//!
//! A [`SparsePoly`] remembers the [`TruncationProfile`] under which it is
//! known exactly: coefficients at exponent vectors inside the profile are
//! exact, everything beyond it has been discarded. Genuine polynomials carry
//! an unbounded profile.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Ordered variable names shared by every polynomial in a computation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableSet(Arc<[String]>);

impl VariableSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Self(names.into_iter().map(Into::into).collect())
    }

    /// `(z, t_1, ..., t_l)`.
    pub fn series(l: usize) -> Self {
        Self::new(std::iter::once("z".to_string()).chain((1..=l).map(|i| format!("t{i}"))))
    }

    /// `(x_0, ..., x_l, z)`.
    pub fn identity(l: usize) -> Self {
        Self::new(
            (0..=l)
                .map(|i| format!("x{i}"))
                .chain(std::iter::once("z".to_string())),
        )
    }

    /// Just `(z)`.
    pub fn univariate(name: &str) -> Self {
        Self::new([name])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.0[idx]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.0
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::VariableMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for VariableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(", "))
    }
}

/// One exponent per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(exps: Vec<u32>) -> Self {
        Self(exps)
    }

    pub fn zero(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, idx: usize) -> u32 {
        self.0[idx]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn scaled(&self, k: u32) -> Self {
        Self(self.0.iter().map(|e| e * k).collect())
    }

    /// Render as a monomial over `vars`, e.g. `z^2*t1`.
    pub fn display(&self, vars: &VariableSet) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    vars.name(i).to_string()
                } else {
                    format!("{}^{e}", vars.name(i))
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Per-variable degree caps; `None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncationProfile(Vec<Option<u32>>);

impl TruncationProfile {
    pub fn unbounded(len: usize) -> Self {
        Self(vec![None; len])
    }

    pub fn new(caps: Vec<Option<u32>>) -> Self {
        Self(caps)
    }

    pub fn with_cap(mut self, idx: usize, cap: u32) -> Self {
        self.0[idx] = Some(cap);
        self
    }

    pub fn cap(&self, idx: usize) -> Option<u32> {
        self.0[idx]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn admits(&self, e: &ExponentVector) -> bool {
        self.0
            .iter()
            .zip(&e.0)
            .all(|(cap, &x)| cap.is_none_or(|c| x <= c))
    }

    /// Componentwise minimum.
    pub fn meet(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| match (a, b) {
                    (Some(x), Some(y)) => Some(*x.min(y)),
                    (Some(x), None) | (None, Some(x)) => Some(*x),
                    (None, None) => None,
                })
                .collect(),
        )
    }
}

/// Exact integer polynomial (or truncated series) with sparse storage.
///
/// Invariants: no zero coefficients are stored and every stored exponent
/// vector is admitted by `precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    vars: VariableSet,
    precision: TruncationProfile,
    terms: BTreeMap<ExponentVector, BigInt>,
}

impl SparsePoly {
    pub fn zero(vars: &VariableSet) -> Self {
        Self {
            vars: vars.clone(),
            precision: TruncationProfile::unbounded(vars.len()),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &VariableSet) -> Self {
        Self::constant(vars, BigInt::one())
    }

    pub fn constant(vars: &VariableSet, c: BigInt) -> Self {
        Self::monomial(vars, ExponentVector::zero(vars.len()), c)
    }

    pub fn monomial(vars: &VariableSet, e: ExponentVector, c: BigInt) -> Self {
        assert_eq!(e.len(), vars.len(), "exponent vector length");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// `c * var^k`.
    pub fn power(vars: &VariableSet, var: usize, k: u32, c: impl Into<BigInt>) -> Self {
        let mut e = vec![0; vars.len()];
        e[var] = k;
        Self::monomial(vars, ExponentVector(e), c.into())
    }

    /// Sum of `(exponents, coefficient)` pairs, combining duplicates.
    pub fn from_terms(
        vars: &VariableSet,
        terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>,
    ) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            accumulate(&mut p.terms, ExponentVector(e), c);
        }
        p
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    pub fn precision(&self) -> &TruncationProfile {
        &self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigInt)> {
        self.terms.iter()
    }

    pub fn max_degree(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e.get(var)).max()
    }

    /// Restrict to `trunc`, discarding everything it does not admit.
    pub fn truncate(&self, trunc: &TruncationProfile) -> Self {
        let precision = self.precision.meet(trunc);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| precision.admits(e))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Self {
            vars: self.vars.clone(),
            precision,
            terms,
        }
    }

    /// Declare the series exact in `var`.
    ///
    /// Only sound when the caller knows no discarded term was nonzero, e.g.
    /// when the cap in `var` already exceeds the true degree.
    pub fn assume_exact_in(mut self, var: usize) -> Self {
        self.precision.0[var] = None;
        self
    }

    pub fn neg(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            precision: self.precision.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            let mut z = Self::zero(&self.vars);
            z.precision = self.precision.clone();
            return z;
        }
        Self {
            vars: self.vars.clone(),
            precision: self.precision.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        let precision = self.precision.meet(&other.precision);
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            if precision.admits(e) {
                accumulate(&mut terms, e.clone(), c.clone());
            }
        }
        Ok(Self {
            vars: self.vars.clone(),
            precision,
            terms,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product modulo `v^(cap_v + 1)` for every capped `v`.
    pub fn mul(&self, other: &Self, trunc: &TruncationProfile) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        check_profile(&self.vars, trunc)?;
        let precision = self.precision.meet(&other.precision).meet(trunc);
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            if !precision.admits(ea) {
                continue;
            }
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                if precision.admits(&e) {
                    accumulate(&mut terms, e, ca * cb);
                }
            }
        }
        Ok(Self {
            vars: self.vars.clone(),
            precision,
            terms,
        })
    }

    /// `1 / (1 - m)` expanded as `sum_r m^r` within `trunc`.
    pub fn expand_reciprocal(
        vars: &VariableSet,
        m: &ExponentVector,
        trunc: &TruncationProfile,
    ) -> Result<Self> {
        if m.len() != vars.len() {
            return Err(Error::ExponentLength {
                expected: vars.len(),
                got: m.len(),
            });
        }
        check_profile(vars, trunc)?;
        if m.is_zero() {
            return Err(Error::ReciprocalOfOne);
        }
        let max_power =
            m.0.iter()
                .zip(&trunc.0)
                .filter(|(&e, _)| e > 0)
                .filter_map(|(&e, cap)| cap.map(|c| c / e))
                .min()
                .ok_or_else(|| Error::NonTerminating(m.display(vars)))?;
        let mut p = Self::zero(vars);
        p.precision = trunc.clone();
        for r in 0..=max_power {
            p.terms.insert(m.scaled(r), BigInt::one());
        }
        Ok(p)
    }

    /// Coefficient at `e`; errors when `e` lies beyond the known precision.
    pub fn coefficient_at(&self, e: &ExponentVector) -> Result<BigInt> {
        if e.len() != self.vars.len() {
            return Err(Error::ExponentLength {
                expected: self.vars.len(),
                got: e.len(),
            });
        }
        if !self.precision.admits(e) {
            return Err(Error::OutOfTruncation(e.display(&self.vars)));
        }
        Ok(self.terms.get(e).cloned().unwrap_or_default())
    }

    /// Substitute `var = 1`, keeping `var` in the variable set with exponent 0.
    pub fn eval_at_one(&self, var: usize) -> Result<Self> {
        if self.precision.cap(var).is_some() {
            return Err(Error::InvalidSubstitution(self.vars.name(var).to_string()));
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e.0[var] = 0;
            accumulate(&mut terms, e, c.clone());
        }
        Ok(Self {
            vars: self.vars.clone(),
            precision: self.precision.clone(),
            terms,
        })
    }

    /// Terms whose exponent in `var` equals `k`, with that exponent zeroed.
    pub fn slice(&self, var: usize, k: u32) -> Self {
        let mut precision = self.precision.clone();
        precision.0[var] = None;
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.get(var) == k)
            .map(|(e, c)| {
                let mut e = e.clone();
                e.0[var] = 0;
                (e, c.clone())
            })
            .collect();
        Self {
            vars: self.vars.clone(),
            precision,
            terms,
        }
    }

    /// Move every term to another variable set via an index map
    /// (`map[i]` is the target index of variable `i`).
    pub fn embed(&self, target: &VariableSet, map: &[usize]) -> Self {
        let mut p = Self::zero(target);
        for (i, cap) in self.precision.0.iter().enumerate() {
            p.precision.0[map[i]] = *cap;
        }
        for (e, c) in &self.terms {
            let mut out = vec![0; target.len()];
            for (i, &x) in e.0.iter().enumerate() {
                out[map[i]] += x;
            }
            accumulate(&mut p.terms, ExponentVector(out), c.clone());
        }
        p
    }

    /// Quotient and remainder by a divisor in one variable whose leading
    /// coefficient is a unit.
    ///
    /// Both operands must involve only `var` and be exact.
    pub fn div_rem_univariate(&self, divisor: &Self, var: usize) -> Result<(Self, Self)> {
        self.vars.check_same(&divisor.vars)?;
        let only_var = |p: &Self| {
            p.terms
                .keys()
                .all(|e| e.0.iter().enumerate().all(|(i, &x)| i == var || x == 0))
        };
        if !only_var(self) || !only_var(divisor) || divisor.is_zero() {
            return Err(Error::BadDivisor);
        }
        let dense = |p: &Self| -> Vec<BigInt> {
            let deg = p.max_degree(var).unwrap_or(0) as usize;
            let mut v = vec![BigInt::zero(); deg + 1];
            for (e, c) in &p.terms {
                v[e.get(var) as usize] = c.clone();
            }
            v
        };
        let mut rem = dense(self);
        let div = dense(divisor);
        let lead = div.last().unwrap().clone();
        if lead.abs() != BigInt::one() {
            return Err(Error::BadDivisor);
        }
        let dd = div.len() - 1;
        let mut quot = vec![BigInt::zero(); rem.len().saturating_sub(dd).max(1)];
        if !self.is_zero() {
            for k in (dd..rem.len()).rev() {
                if rem[k].is_zero() {
                    continue;
                }
                let q = &rem[k] * &lead;
                for (j, c) in div.iter().enumerate() {
                    rem[k - dd + j] -= &q * c;
                }
                quot[k - dd] = q;
            }
        }
        let build = |coeffs: Vec<BigInt>| {
            Self::from_terms(
                &self.vars,
                coeffs.into_iter().enumerate().map(|(k, c)| {
                    let mut e = vec![0; self.vars.len()];
                    e[var] = k as u32;
                    (e, c)
                }),
            )
        };
        Ok((build(quot), build(rem)))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn div_exact_univariate(&self, divisor: &Self, var: usize) -> Result<Self> {
        let (q, r) = self.div_rem_univariate(divisor, var)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision)
        }
    }

    /// First exponent vector (in term order) where the two differ, with
    /// both coefficients.
    pub fn first_difference(&self, other: &Self) -> Option<(ExponentVector, BigInt, BigInt)> {
        let keys: std::collections::BTreeSet<&ExponentVector> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().find_map(|e| {
            let a = self.terms.get(e).cloned().unwrap_or_default();
            let b = other.terms.get(e).cloned().unwrap_or_default();
            (a != b).then(|| (e.clone(), a, b))
        })
    }
}

fn accumulate(terms: &mut BTreeMap<ExponentVector, BigInt>, e: ExponentVector, c: BigInt) {
    if c.is_zero() {
        return;
    }
    match terms.entry(e) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn check_profile(vars: &VariableSet, trunc: &TruncationProfile) -> Result<()> {
    if trunc.len() != vars.len() {
        return Err(Error::ExponentLength {
            expected: vars.len(),
            got: trunc.len(),
        });
    }
    Ok(())
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mono = e.display(&self.vars);
            match (mag.is_one(), mono.as_str()) {
                (_, "1") => write!(f, "{mag}")?,
                (true, m) => f.write_str(m)?,
                (false, m) => write!(f, "{mag}*{m}")?,
            }
        }
        Ok(())
    }
}
