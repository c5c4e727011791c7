//! Instance verification of the structural identities behind the Betti
//! number formulas. Every failing report carries a counterexample written
//! with 1-based indices and one-line permutations.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::error::Result;
use crate::fixedpoints::{
    enumerate_fixed_points, euler_by_count, histogram_with, telescoped_weight, to_alpha_beta,
    weight_H, weight_h, FixedPoint,
};
use crate::flagcore::{FlagShape, Multidegree};
use crate::genfun::{
    betti_from_series, euler_from_series, per_w_series, theorem1_series, SeriesRequest, ZCap,
};
use crate::mpoly::{SparsePoly, TruncationProfile, VariableSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    FixedPoint {
        point: String,
        detail: String,
    },
    Monomial {
        monomial: String,
        lhs: String,
        rhs: String,
    },
    Property {
        detail: String,
    },
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FixedPoint { point, detail } => write!(f, "at {point}: {detail}"),
            Self::Monomial { monomial, lhs, rhs } => {
                write!(f, "coefficient of {monomial}: {lhs} vs {rhs}")
            }
            Self::Property { detail } => f.write_str(detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub parameters: String,
    pub verdict: Verdict,
    /// Fixed points, monomials or properties examined.
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl VerificationReport {
    fn new(
        check: &str,
        parameters: String,
        cases: u64,
        counterexample: Option<Counterexample>,
    ) -> Self {
        let verdict = if counterexample.is_some() {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        Self {
            check: check.to_string(),
            parameters,
            verdict,
            cases,
            counterexample,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        write!(
            f,
            "{} {} {}: {} cases",
            verdict, self.check, self.parameters, self.cases
        )?;
        if let Some(c) = &self.counterexample {
            write!(f, "; {c}")?;
        }
        Ok(())
    }
}

fn params(shape: &FlagShape, d: &Multidegree) -> String {
    format!("{shape} d={d}")
}

/// Pointwise: `h` equals its telescoped component form and equals `H` in
/// the difference variables.
pub fn verify_pointwise_weights(shape: &FlagShape, d: &Multidegree) -> Result<VerificationReport> {
    let points = enumerate_fixed_points(shape, d)?;
    let failure = points.iter().find_map(|fp| {
        let h = weight_h(fp, shape);
        let telescoped = telescoped_weight(fp, shape);
        if telescoped != h as i64 {
            return Some(Counterexample::FixedPoint {
                point: fp.to_string(),
                detail: format!("h = {h} but component sum = {telescoped}"),
            });
        }
        let ab = to_alpha_beta(fp);
        if ab.to_fixed_point(fp.sigma.clone()) != *fp || !ab.satisfies_relations(shape, d) {
            return Some(Counterexample::FixedPoint {
                point: fp.to_string(),
                detail: "difference variables do not round-trip".into(),
            });
        }
        let big_h = weight_H(&ab, &fp.sigma, shape);
        (big_h != h).then(|| Counterexample::FixedPoint {
            point: fp.to_string(),
            detail: format!("h = {h} but H = {big_h}"),
        })
    });
    Ok(VerificationReport::new(
        "pointwise-weights",
        params(shape, d),
        points.len() as u64,
        failure,
    ))
}

fn monomial_difference(lhs: &SparsePoly, rhs: &SparsePoly) -> Option<Counterexample> {
    lhs.first_difference(rhs)
        .map(|(e, a, b)| Counterexample::Monomial {
            monomial: e.display(lhs.vars()),
            lhs: a.to_string(),
            rhs: b.to_string(),
        })
}

/// Sum of the per-permutation series equals the closed form, coefficientwise
/// within the request's caps.
pub fn verify_comb(req: &SeriesRequest) -> Result<VerificationReport> {
    let closed = theorem1_series(req)?;
    let mut sum = SparsePoly::zero(&req.vars());
    for w in req.shape.block_permutations() {
        sum = sum.add(&per_w_series(&w, req)?)?;
    }
    let parameters = format!(
        "{} caps={} zmax={}",
        req.shape,
        req.t_caps,
        req.resolved_z_cap()
    );
    let cases = closed.len().max(sum.len()) as u64;
    Ok(VerificationReport::new(
        "comb",
        parameters,
        cases,
        monomial_difference(&sum, &closed),
    ))
}

/// Both sides of the clearing-denominators identity, expanded over
/// `(x_0, ..., x_l, z)` with `e^{i,j}_k = x_i - x_j z^k`.
pub fn xpf_sides(shape: &FlagShape) -> (SparsePoly, SparsePoly) {
    let l = shape.l();
    let n = shape.n();
    let vars = VariableSet::identity(l);
    let zi = l + 1;
    let inf = TruncationProfile::unbounded(vars.len());
    let s = |i: usize| shape.s(i);
    let e = |i: usize, j: usize, k: usize| -> SparsePoly {
        let mut xi = vec![0; vars.len()];
        xi[i] = 1;
        let mut xj = vec![0; vars.len()];
        xj[j] = 1;
        xj[zi] = k as u32;
        SparsePoly::from_terms(&vars, [(xi, BigInt::from(1)), (xj, BigInt::from(-1))])
    };
    let one_minus_z = |k: usize| {
        SparsePoly::one(&vars)
            .sub(&SparsePoly::power(&vars, zi, k as u32, 1))
            .expect("same variables")
    };
    let product = |factors: Vec<SparsePoly>| {
        factors.into_iter().fold(SparsePoly::one(&vars), |acc, f| {
            acc.mul(&f, &inf).expect("same variables")
        })
    };
    let pairs: Vec<(usize, usize)> = (1..=l).flat_map(|i| (i..=l).map(move |j| (i, j))).collect();

    let lhs = product(
        std::iter::once(one_minus_z(n))
            .chain(pairs.iter().map(|&(i, j)| e(i - 1, j, s(j + 1) - s(i))))
            .collect(),
    );

    let mut rhs = SparsePoly::zero(&vars);
    for m in 1..=l + 1 {
        let mut factors = vec![
            SparsePoly::power(&vars, zi, (n - s(m)) as u32, 1),
            one_minus_z(s(m) - s(m - 1)),
        ];
        factors.extend((1..m).map(|i| e(i - 1, m - 1, s(m) - s(i - 1))));
        factors.extend((m..=l).map(|j| e(m - 1, j, s(j) - s(m))));
        factors.extend(
            pairs
                .iter()
                .filter(|&&(i, j)| i != m && j + 1 != m)
                .map(|&(i, j)| e(i - 1, j, s(j + 1) - s(i))),
        );
        rhs = rhs.add(&product(factors)).expect("same variables");
    }
    (lhs, rhs)
}

pub fn verify_xpf(shape: &FlagShape) -> VerificationReport {
    let (lhs, rhs) = xpf_sides(shape);
    let cases = lhs.len().max(rhs.len()) as u64;
    VerificationReport::new(
        "xpf",
        shape.to_string(),
        cases,
        monomial_difference(&lhs, &rhs),
    )
}

/// Counting against series, plus the smoothness and Euler signatures.
pub fn cross_check(shape: &FlagShape, d: &Multidegree) -> Result<VerificationReport> {
    cross_check_with(shape, d, |fp| weight_h(fp, shape))
}

/// [`cross_check`] with the cell-dimension weight replaced by `weight`.
pub fn cross_check_with(
    shape: &FlagShape,
    d: &Multidegree,
    weight: impl Fn(&FixedPoint) -> u64 + Sync,
) -> Result<VerificationReport> {
    let dim = shape.hyperquot_dimension(d)? as usize;
    let counted = histogram_with(shape, d, weight)?;
    let series = betti_from_series(shape, d, ZCap::Auto)?;
    let euler_count = euler_by_count(shape, d)?;
    let euler_series = euler_from_series(shape, d)?;
    let one = BigUint::from(1u32);

    let t_part: String = d
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, &x)| {
            if x == 1 {
                format!("*t{}", i + 1)
            } else {
                format!("*t{}^{x}", i + 1)
            }
        })
        .collect();
    let width = counted.counts.len().max(series.counts.len());
    let mut failure = (0..width).find_map(|m| {
        let (a, b) = (counted.get(m), series.get(m));
        (a != b).then(|| Counterexample::Monomial {
            monomial: format!("z^{m}{t_part}"),
            lhs: format!("{a} (fixed-point count)"),
            rhs: format!("{b} (series)"),
        })
    });
    let property = |ok: bool, detail: String| (!ok).then_some(Counterexample::Property { detail });
    failure = failure
        .or_else(|| property(counted.get(0) == one, format!("b_0 = {}", counted.get(0))))
        .or_else(|| property(counted.get(dim) == one, format!("b_2D = {} with D = {dim}", counted.get(dim))))
        .or_else(|| {
            (0..=dim).find_map(|m| {
                property(
                    counted.get(m) == counted.get(dim - m),
                    format!("duality: b_{} = {} but b_{} = {}", 2 * m, counted.get(m), 2 * (dim - m), counted.get(dim - m)),
                )
            })
        })
        .or_else(|| property(counted.top_degree() == Some(dim), format!("top degree {:?} != D = {dim}", counted.top_degree())))
        .or_else(|| {
            let total = counted.total();
            property(
                total == euler_count && total == euler_series,
                format!("sum of Betti numbers {total}, fixed points {euler_count}, Euler series {euler_series}"),
            )
        });
    let cases = (width + 5) as u64;
    Ok(VerificationReport::new(
        "cross-check",
        params(shape, d),
        cases,
        failure,
    ))
}

/// `eval_at_one(theorem1_series, z)` against the Euler series.
pub fn verify_euler_substitution(req: &SeriesRequest) -> Result<VerificationReport> {
    let series = theorem1_series(req)?;
    let at_one = series.eval_at_one(crate::genfun::Z)?;
    let euler = crate::genfun::euler_series(req)?;
    let parameters = format!("{} caps={}", req.shape, req.t_caps);
    Ok(VerificationReport::new(
        "euler-substitution",
        parameters,
        at_one.len() as u64,
        monomial_difference(&at_one, &euler),
    ))
}
