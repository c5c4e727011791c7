//! Torus fixed points `(a, b, sigma)` of a hyperquot scheme and the
//! cell-dimension weight whose fibres count Betti numbers.

use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flagcore::{block_sum, BlockPermutation, FlagShape, Multidegree, SumMode};

/// Ragged array with row `i` (1-based) of length `s_i`.
pub type Rows = Vec<Vec<u32>>;

fn ragged_get(rows: &Rows, i: usize, j: usize) -> u32 {
    if i == 0 {
        return 0;
    }
    rows.get(i - 1)
        .and_then(|r| r.get(j.wrapping_sub(1)))
        .copied()
        .unwrap_or(0)
}

fn fmt_rows(f: &mut fmt::Formatter<'_>, rows: &Rows) -> fmt::Result {
    f.write_str("[")?;
    for (idx, r) in rows.iter().enumerate() {
        if idx > 0 {
            f.write_str(";")?;
        }
        let cells: Vec<String> = r.iter().map(u32::to_string).collect();
        f.write_str(&cells.join(","))?;
    }
    f.write_str("]")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FixedPoint {
    pub sigma: BlockPermutation,
    pub a: Rows,
    pub b: Rows,
}

impl FixedPoint {
    /// `a_{i,j}`, zero outside `1 <= i <= l`, `1 <= j <= s_i`.
    pub fn a(&self, i: usize, j: usize) -> u32 {
        ragged_get(&self.a, i, j)
    }

    pub fn b(&self, i: usize, j: usize) -> u32 {
        ragged_get(&self.b, i, j)
    }

    fn ab(&self, i: usize, j: usize) -> u64 {
        u64::from(self.a(i, j)) + u64::from(self.b(i, j))
    }

    /// Whether this is an element of `P` for `(shape, d)`.
    pub fn is_valid(&self, shape: &FlagShape, d: &Multidegree) -> bool {
        let l = shape.l();
        if d.len() != l || !shape.admits(self.sigma.values()) {
            return false;
        }
        let shaped =
            |rows: &Rows| rows.len() == l && (1..=l).all(|i| rows[i - 1].len() == shape.s(i));
        if !shaped(&self.a) || !shaped(&self.b) {
            return false;
        }
        let decreasing = (1..l).all(|i| {
            (1..=shape.s(i))
                .all(|j| self.a(i, j) >= self.a(i + 1, j) && self.b(i, j) >= self.b(i + 1, j))
        });
        let sums = (1..=l)
            .all(|i| (1..=shape.s(i)).map(|j| self.ab(i, j)).sum::<u64>() == u64::from(d.get(i)));
        decreasing && sums
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma={} a=", self.sigma)?;
        fmt_rows(f, &self.a)?;
        f.write_str(" b=")?;
        fmt_rows(f, &self.b)
    }
}

/// Successive differences `alpha_{i,j} = a_{i,j} - a_{i+1,j}` (and likewise
/// `beta`), which range independently over the naturals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaBeta {
    pub alpha: Rows,
    pub beta: Rows,
}

impl AlphaBeta {
    pub fn alpha(&self, i: usize, j: usize) -> u32 {
        ragged_get(&self.alpha, i, j)
    }

    pub fn beta(&self, i: usize, j: usize) -> u32 {
        ragged_get(&self.beta, i, j)
    }

    /// `a_{i,j} = sum_{k >= i} alpha_{k,j}`, likewise for `b`.
    pub fn to_fixed_point(&self, sigma: BlockPermutation) -> FixedPoint {
        let l = self.alpha.len();
        let rebuild = |diff: &Rows| -> Rows {
            (1..=l)
                .map(|i| {
                    (1..=diff[i - 1].len())
                        .map(|j| (i..=l).map(|k| ragged_get(diff, k, j)).sum())
                        .collect()
                })
                .collect()
        };
        FixedPoint {
            sigma,
            a: rebuild(&self.alpha),
            b: rebuild(&self.beta),
        }
    }

    /// The linear relations `sum_{k>=i} sum_{j<=s_i} (alpha_{k,j} + beta_{k,j}) = d_i`.
    pub fn satisfies_relations(&self, shape: &FlagShape, d: &Multidegree) -> bool {
        let l = shape.l();
        (1..=l).all(|i| {
            let total: u64 = (i..=l)
                .flat_map(|k| (1..=shape.s(i)).map(move |j| (k, j)))
                .map(|(k, j)| u64::from(self.alpha(k, j)) + u64::from(self.beta(k, j)))
                .sum();
            total == u64::from(d.get(i))
        })
    }
}

pub fn to_alpha_beta(fp: &FixedPoint) -> AlphaBeta {
    let diff = |rows: &Rows| -> Rows {
        (1..=rows.len())
            .map(|i| {
                (1..=rows[i - 1].len())
                    .map(|j| ragged_get(rows, i, j) - ragged_get(rows, i + 1, j))
                    .collect()
            })
            .collect()
    };
    AlphaBeta {
        alpha: diff(&fp.a),
        beta: diff(&fp.b),
    }
}

/// Every valid `(a, b)` pair for `(shape, d)`, lexicographic in
/// (`a` row-major, `b` row-major). The set does not depend on `sigma`.
pub fn degree_splittings(shape: &FlagShape, d: &Multidegree) -> Result<Vec<(Rows, Rows)>> {
    shape.check_degree(d)?;
    let positions: Vec<(usize, usize)> = (1..=shape.l())
        .flat_map(|i| (1..=shape.s(i)).map(move |j| (i, j)))
        .collect();
    let empty: Rows = (1..=shape.l()).map(|i| vec![0; shape.s(i)]).collect();

    let mut a_choices = Vec::new();
    fill_rows(
        shape,
        d,
        &positions,
        0,
        &mut empty.clone(),
        None,
        &mut a_choices,
    );

    let mut out = Vec::new();
    for a in a_choices {
        let mut b_choices = Vec::new();
        fill_rows(
            shape,
            d,
            &positions,
            0,
            &mut empty.clone(),
            Some(&a),
            &mut b_choices,
        );
        out.extend(b_choices.into_iter().map(|b| (a.clone(), b)));
    }
    Ok(out)
}

/// Depth-first fill in row-major order with values ascending.
///
/// Without `partner` the rows are `a`: each row sum is at most `d_i`.
/// With `partner = Some(a)` the rows are `b`: each row sum is exactly
/// `d_i - sum(a_i)`. Column chains are weakly decreasing down the rows.
fn fill_rows(
    shape: &FlagShape,
    d: &Multidegree,
    positions: &[(usize, usize)],
    at: usize,
    rows: &mut Rows,
    partner: Option<&Rows>,
    out: &mut Vec<Rows>,
) {
    let Some(&(i, j)) = positions.get(at) else {
        out.push(rows.clone());
        return;
    };
    let used: u32 = rows[i - 1][..j - 1].iter().sum();
    let budget = d.get(i) - partner.map_or(0, |a| a[i - 1].iter().sum::<u32>()) - used;
    let above = if i > 1 && j <= shape.s(i - 1) {
        rows[i - 2][j - 1]
    } else {
        u32::MAX
    };
    let last_in_row = j == shape.s(i);
    if partner.is_some() && last_in_row {
        // the last column of a row is never bounded from above
        if budget <= above {
            rows[i - 1][j - 1] = budget;
            fill_rows(shape, d, positions, at + 1, rows, partner, out);
        }
        rows[i - 1][j - 1] = 0;
        return;
    }
    for v in 0..=budget.min(above) {
        rows[i - 1][j - 1] = v;
        fill_rows(shape, d, positions, at + 1, rows, partner, out);
    }
    rows[i - 1][j - 1] = 0;
}

/// Every fixed point, ordered by (`sigma`, `a`, `b`).
pub fn enumerate_fixed_points(shape: &FlagShape, d: &Multidegree) -> Result<Vec<FixedPoint>> {
    let splits = degree_splittings(shape, d)?;
    Ok(shape
        .block_permutations()
        .into_iter()
        .flat_map(|sigma| {
            splits.iter().map(move |(a, b)| FixedPoint {
                sigma: sigma.clone(),
                a: a.clone(),
                b: b.clone(),
            })
        })
        .collect())
}

/// Cell dimension `h(a, b, sigma)`.
pub fn weight_h(fp: &FixedPoint, shape: &FlagShape) -> u64 {
    weight_h_with(fp, shape, |i, j| fp.sigma.eps(i, j))
}

/// `h` evaluated against an arbitrary order relation `eps(i, j)` in place of
/// the one induced by `fp.sigma`.
pub fn weight_h_with(fp: &FixedPoint, shape: &FlagShape, eps: impl Fn(usize, usize) -> u32) -> u64 {
    let l = shape.l();
    let mut h = 0;
    for i in 1..=l {
        for k in 1..=shape.s(i) {
            let ab = fp.ab(i, k);
            h += (ab + 1) * block_sum(shape, SumMode::Row, k, i, i + 1, &eps);
            h += ab * block_sum(shape, SumMode::Col, k, i - 1, i, &eps);
        }
        h += shape.block(i).map(|k| u64::from(fp.b(i, k))).sum::<u64>();
    }
    h
}

/// `(h^1_{i,j}, h^2_{i,j}, h^3_{i,j})` for `0 <= i <= j <= l+1`; out-of-range
/// rows contribute zero.
pub fn weight_components(
    fp: &FixedPoint,
    shape: &FlagShape,
    i: usize,
    j: usize,
) -> Result<(u64, u64, u64)> {
    let l = shape.l();
    if i > j || j > l + 1 {
        return Err(Error::BlockRange { lo: i, hi: j, l });
    }
    let eps = |p: usize, q: usize| fp.sigma.eps(p, q);
    let row_len = |r: usize| if r == 0 || r > l { 0 } else { shape.s(r) };
    let h1 = (1..=row_len(i))
        .map(|k| (fp.ab(i, k) + 1) * block_sum(shape, SumMode::Row, k, j, l + 1, eps))
        .sum();
    let h2 = (1..=row_len(j))
        .map(|k| fp.ab(j, k) * block_sum(shape, SumMode::Col, k, 0, i, eps))
        .sum();
    let h3 = if j > l {
        0
    } else {
        (1..=row_len(i)).map(|k| u64::from(fp.b(j, k))).sum()
    };
    Ok((h1, h2, h3))
}

/// `sum_{i<=l} H_{i,i} - sum_{i<l} H_{i,i+1}` with `H = h^1 + h^2 + h^3`.
pub fn telescoped_weight(fp: &FixedPoint, shape: &FlagShape) -> i64 {
    let total = |i, j| {
        let (x, y, z) = weight_components(fp, shape, i, j).expect("indices in range");
        (x + y + z) as i64
    };
    let l = shape.l();
    (1..=l).map(|i| total(i, i)).sum::<i64>() - (1..l).map(|i| total(i, i + 1)).sum::<i64>()
}

/// The weight rewritten in the independent difference variables.
#[allow(non_snake_case)]
pub fn weight_H(ab: &AlphaBeta, sigma: &BlockPermutation, shape: &FlagShape) -> u64 {
    let l = shape.l();
    let eps = |p: usize, q: usize| sigma.eps(p, q);
    let mut h = 0;
    for i in 1..=l {
        for k in 1..=shape.s(i) {
            h += block_sum(shape, SumMode::Row, k, i, i + 1, eps);
            h += u64::from(ab.beta(i, k));
        }
    }
    for i in 1..=l {
        for j in i..=l {
            for k in shape.block(i) {
                let coeff = (shape.s(j) - shape.s(i)) as u64
                    + block_sum(shape, SumMode::Row, k, j, j + 1, eps)
                    + block_sum(shape, SumMode::Col, k, i - 1, i, eps);
                h += (u64::from(ab.alpha(j, k)) + u64::from(ab.beta(j, k))) * coeff;
            }
        }
    }
    h
}

/// Betti numbers `b_{2M}` indexed by the complex half-degree `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    pub shape: FlagShape,
    pub degree: Multidegree,
    /// `counts[M] = b_{2M}` for `0 <= M <= dimension` (longer only if a
    /// weight overshoots the dimension).
    pub counts: Vec<BigUint>,
}

impl BettiTable {
    pub fn dimension(&self) -> u64 {
        self.shape
            .hyperquot_dimension(&self.degree)
            .expect("validated degree")
    }

    pub fn get(&self, m: usize) -> BigUint {
        self.counts.get(m).cloned().unwrap_or_default()
    }

    /// Odd Betti numbers vanish; `k` is the real degree.
    pub fn betti(&self, k: usize) -> BigUint {
        if k % 2 == 1 {
            BigUint::default()
        } else {
            self.get(k / 2)
        }
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Largest `M` with `b_{2M} != 0`.
    pub fn top_degree(&self) -> Option<usize> {
        self.counts.iter().rposition(|c| *c != BigUint::default())
    }
}

pub fn betti_histogram(shape: &FlagShape, d: &Multidegree) -> Result<BettiTable> {
    histogram_with(shape, d, |fp| weight_h(fp, shape))
}

/// Histogram of an arbitrary weight over the fixed points, partitioned by
/// `sigma` across the rayon pool. Integer sums make the merge order-free.
pub fn histogram_with(
    shape: &FlagShape,
    d: &Multidegree,
    weight: impl Fn(&FixedPoint) -> u64 + Sync,
) -> Result<BettiTable> {
    let dim = shape.hyperquot_dimension(d)? as usize;
    let splits = degree_splittings(shape, d)?;
    let perms = shape.block_permutations();
    let counts = perms
        .into_par_iter()
        .map(|sigma| {
            let mut local = vec![0u64; dim + 1];
            let mut fp = FixedPoint {
                sigma,
                a: Vec::new(),
                b: Vec::new(),
            };
            for (a, b) in &splits {
                fp.a.clone_from(a);
                fp.b.clone_from(b);
                let w = weight(&fp) as usize;
                if w >= local.len() {
                    local.resize(w + 1, 0);
                }
                local[w] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; dim + 1],
            |mut x, y| {
                if y.len() > x.len() {
                    x.resize(y.len(), 0);
                }
                for (slot, v) in x.iter_mut().zip(y) {
                    *slot += v;
                }
                x
            },
        );
    Ok(BettiTable {
        shape: shape.clone(),
        degree: d.clone(),
        counts: counts.into_iter().map(BigUint::from).collect(),
    })
}

/// `chi(HQ_d)` as the number of fixed points.
pub fn euler_by_count(shape: &FlagShape, d: &Multidegree) -> Result<BigUint> {
    let splits = degree_splittings(shape, d)?;
    Ok(shape.count_block_permutations() * BigUint::from(splits.len()))
}
