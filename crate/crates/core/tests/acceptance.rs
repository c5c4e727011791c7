//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::process::Command;
use std::time::{Duration, Instant};

use hyperquot::genfun::{
    betti_from_series, euler_series, flag_poincare, series_exponent, theorem1_series, Z,
};
use hyperquot::identity::{
    cross_check, verify_comb, verify_euler_substitution, verify_pointwise_weights, verify_xpf,
};
use hyperquot::mpoly::ExponentVector;
use hyperquot::{betti_histogram, euler_by_count, FlagShape, Multidegree, SeriesRequest, ZCap};
use num_bigint::{BigInt, BigUint};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Proper shapes for each n up to `max_n`, with F(1;1) standing in for n = 1.
fn shapes_up_to(max_n: usize) -> Vec<FlagShape> {
    let mut shapes = vec![FlagShape::new(1, vec![1]).unwrap()];
    for n in 2..=max_n {
        shapes.extend(FlagShape::all_proper(n));
    }
    shapes
}

fn grid() -> Vec<(FlagShape, Multidegree)> {
    shapes_up_to(4)
        .into_iter()
        .flat_map(|shape| {
            Multidegree::all_within(&vec![2; shape.l()])
                .into_iter()
                .map(move |d| (shape.clone(), d))
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let elapsed = start.elapsed();
    ensure(elapsed <= limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn all_ones(table: &hyperquot::BettiTable, top: usize) -> bool {
    table.counts.len() == top + 1 && table.counts.iter().all(|b| *b == BigUint::from(1u32))
}

fn projective_space() -> Outcome {
    let start = Instant::now();
    let shape = FlagShape::new(1, vec![1]).unwrap();
    for d in 0..=10u32 {
        let d = Multidegree::new(vec![d]);
        let counted = betti_histogram(&shape, &d).map_err(|e| e.to_string())?;
        let series = betti_from_series(&shape, &d, ZCap::Auto).map_err(|e| e.to_string())?;
        let top = d.total() as usize;
        ensure(all_ones(&counted, top), || {
            format!("counting d={d}: {:?}", counted.counts)
        })?;
        ensure(all_ones(&series, top), || {
            format!("series d={d}: {:?}", series.counts)
        })?;
        ensure(counted.get(top + 1) == BigUint::from(0u32), || {
            format!("b beyond top at d={d}")
        })?;
    }
    within(Duration::from_secs(1), start)?;
    Ok("HQ_d(F(1;1)) = P^d for d <= 10, both methods".into())
}

fn sheaf_injection() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for n in 2..=4usize {
        // G^{n-1}(n): rank n-1 quotients, i.e. injections O(-d) -> O^n
        let shape = FlagShape::grassmannian(n, n - 1).unwrap();
        assert_eq!(shape.subspace_dims(), &[1]);
        for d in 0..=3u32 {
            let deg = Multidegree::new(vec![d]);
            let top = n * (d as usize + 1) - 1;
            let counted = betti_histogram(&shape, &deg).map_err(|e| e.to_string())?;
            let series = betti_from_series(&shape, &deg, ZCap::Auto).map_err(|e| e.to_string())?;
            ensure(all_ones(&counted, top), || {
                format!("counting {shape} d={d}: {:?}", counted.counts)
            })?;
            ensure(all_ones(&series, top), || {
                format!("series {shape} d={d}: {:?}", series.counts)
            })?;
            cases += 1;
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!(
        "HQ_d(G^(n-1)(n)) = P^(n(d+1)-1) for n in 2..=4, d <= 3 ({cases} cases)"
    ))
}

fn degree_zero() -> Outcome {
    let start = Instant::now();
    let shapes = shapes_up_to(6);
    for shape in &shapes {
        let table =
            betti_histogram(shape, &Multidegree::zero(shape.l())).map_err(|e| e.to_string())?;
        let poly = flag_poincare(shape).map_err(|e| e.to_string())?;
        let width = table
            .counts
            .len()
            .max(poly.max_degree(Z).map_or(0, |m| m as usize + 1));
        for m in 0..width {
            let want = poly
                .coefficient_at(&ExponentVector::new(vec![m as u32]))
                .map_err(|e| e.to_string())?;
            ensure(BigInt::from(table.get(m)) == want, || {
                format!("{shape} M={m}: {} vs {want}", table.get(m))
            })?;
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!(
        "d = 0 recovers the flag variety Poincaré polynomial ({} shapes, n <= 6)",
        shapes.len()
    ))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let grid = grid();
    for (shape, d) in &grid {
        let counted = betti_histogram(shape, d).map_err(|e| e.to_string())?;
        let series = betti_from_series(shape, d, ZCap::Auto).map_err(|e| e.to_string())?;
        let width = counted.counts.len().max(series.counts.len());
        for m in 0..width {
            ensure(counted.get(m) == series.get(m), || {
                format!(
                    "{shape} d={d} M={m}: count {} vs series {}",
                    counted.get(m),
                    series.get(m)
                )
            })?;
        }
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!(
        "fixed-point counting equals series coefficients on {} (shape, d) pairs",
        grid.len()
    ))
}

fn euler_consistency() -> Outcome {
    let start = Instant::now();
    let grid = grid();
    for (shape, d) in &grid {
        let total = betti_histogram(shape, d)
            .map_err(|e| e.to_string())?
            .total();
        let count = euler_by_count(shape, d).map_err(|e| e.to_string())?;
        let req = SeriesRequest::new(shape.clone(), d.as_slice().to_vec(), ZCap::Auto)
            .map_err(|e| e.to_string())?;
        let coeff = euler_series(&req)
            .and_then(|p| p.coefficient_at(&series_exponent(d, 0)))
            .map_err(|e| e.to_string())?;
        ensure(
            total == count && BigInt::from(count.clone()) == coeff,
            || format!("{shape} d={d}: sum {total}, count {count}, series {coeff}"),
        )?;
    }
    let mut substitutions = 0;
    for shape in shapes_up_to(4) {
        let req = SeriesRequest::new(shape.clone(), vec![2; shape.l()], ZCap::Auto)
            .map_err(|e| e.to_string())?;
        let report = verify_euler_substitution(&req).map_err(|e| e.to_string())?;
        ensure(report.passed(), || report.to_string())?;
        let theorem = theorem1_series(&req).map_err(|e| e.to_string())?;
        ensure(!theorem.is_zero(), || format!("{shape}: empty series"))?;
        substitutions += 1;
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!(
        "sum of Betti numbers = fixed-point count = Euler series on {} pairs; z = 1 substitution on {substitutions} shapes",
        grid.len()
    ))
}

fn structural_identities() -> Outcome {
    let start = Instant::now();
    let grid = grid();
    for (shape, d) in &grid {
        let report = verify_pointwise_weights(shape, d).map_err(|e| e.to_string())?;
        ensure(report.passed(), || report.to_string())?;
    }
    let comb_shapes = shapes_up_to(4);
    for shape in &comb_shapes {
        let req = SeriesRequest::new(shape.clone(), vec![2; shape.l()], ZCap::Auto)
            .map_err(|e| e.to_string())?;
        let report = verify_comb(&req).map_err(|e| e.to_string())?;
        ensure(report.passed(), || report.to_string())?;
    }
    let xpf_shapes = shapes_up_to(5);
    for shape in &xpf_shapes {
        let report = verify_xpf(shape);
        ensure(report.passed(), || report.to_string())?;
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!(
        "pointwise weights on {} pairs, comb on {} shapes, xpf on {} shapes",
        grid.len(),
        comb_shapes.len(),
        xpf_shapes.len()
    ))
}

fn smoothness_signatures() -> Outcome {
    let grid = grid();
    for (shape, d) in &grid {
        let table = betti_histogram(shape, d).map_err(|e| e.to_string())?;
        let dim = shape.hyperquot_dimension(d).map_err(|e| e.to_string())? as usize;
        let one = BigUint::from(1u32);
        ensure(table.get(0) == one && table.get(dim) == one, || {
            format!("{shape} d={d}: b_0 or b_2D is not 1")
        })?;
        ensure(table.top_degree() == Some(dim), || {
            format!(
                "{shape} d={d}: top degree {:?}, D = {dim}",
                table.top_degree()
            )
        })?;
        for m in 0..=dim {
            ensure(table.get(m) == table.get(dim - m), || {
                format!("{shape} d={d}: duality fails at M={m}")
            })?;
        }
        let report = cross_check(shape, d).map_err(|e| e.to_string())?;
        ensure(report.passed(), || report.to_string())?;
    }
    Ok(format!(
        "b_0 = b_2D = 1, Poincaré duality and top degree D on {} pairs",
        grid.len()
    ))
}

fn run_cli(args: &[&str], threads: Option<&str>) -> Result<(Vec<u8>, i32), String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperquot"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("HYPERQUOT_THREADS", t),
        None => cmd.env_remove("HYPERQUOT_THREADS"),
    };
    let out = cmd.output().map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let jobs = dir.path().join("jobs.jsonl");
    let lines = [
        r#"{"command":"betti","n":4,"s":[1,3],"d":[2,1],"format":"json"}"#,
        r#"{"command":"euler","n":3,"s":[1,2],"d":[1,0]}"#,
        r#"{"command":"series","n":3,"s":[1,2],"d":[1,1],"format":"csv"}"#,
        r#"{"command":"verify","n":3,"s":[1,2],"d":[1,1],"format":"json"}"#,
        r#"{"command":"compare","n":4,"s":[2],"d":[2]}"#,
    ];
    std::fs::write(&jobs, lines.join("\n")).map_err(|e| e.to_string())?;
    let jobs = jobs.to_str().ok_or("non-UTF-8 temp path")?.to_string();
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "betti", "--n", "4", "--s", "1,2,3", "--d", "1,2,1", "--format", "json",
        ],
        vec![
            "euler-series",
            "--n",
            "4",
            "--s",
            "2",
            "--d",
            "3",
            "--format",
            "table",
        ],
        vec![
            "verify", "--n", "4", "--s", "1,2,3", "--d", "1,1,1", "--format", "csv",
        ],
        vec!["--jobs", &jobs],
    ];
    for args in &invocations {
        let (reference, status) = run_cli(args, None)?;
        ensure(status == 0, || format!("{args:?} exited {status}"))?;
        for threads in [None, Some("1"), Some("2"), Some("4"), Some("8")] {
            let (again, _) = run_cli(args, threads)?;
            ensure(again == reference, || {
                format!("{args:?} differs with threads={threads:?}")
            })?;
        }
    }
    Ok(format!(
        "{} CLI jobs byte-identical across repeated runs and HYPERQUOT_THREADS in 1..8",
        invocations.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("projective space", projective_space),
        ("sheaf injection", sheaf_injection),
        ("degree zero", degree_zero),
        ("oracle equivalence", oracle_equivalence),
        ("euler consistency", euler_consistency),
        ("structural identities", structural_identities),
        ("smoothness signatures", smoothness_signatures),
        ("determinism", determinism),
    ];
    let mut failures = Vec::new();
    for (idx, (name, criterion)) in criteria.iter().enumerate() {
        let number = idx + 1;
        match criterion() {
            Ok(detail) => println!("PASS criterion {number} ({name}): {detail}"),
            Err(why) => {
                println!("FAIL criterion {number} ({name}): {why}");
                failures.push(number);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
