//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p hbvm-cli --test acceptance` (add `--release` for
//! representative runtimes).

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hbvm::problems::{
    henon_heiles_system, nbody_system, quintic_system, sitnikov_config, sitnikov_initial_state,
    HarmonicOscillator, HenonHeiles, QuinticCoefficients, HENON_HEILES_ENERGY_BOUND,
};
use hbvm::{
    build_tableau, eval_basis, eval_basis_integral, gauss_rule, integrate, step, HamiltonianSystem,
    HbvmError, SolverConfig,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};

const HSTAR: f64 = 9.050199350868576e-2;
const BOUNDARY_P: f64 = 3.757055929263451e-1;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn hbvm_bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hbvm"))
        .args(args)
        .output()
        .expect("hbvm binary runs");
    let stderr = String::from_utf8_lossy(&out.stderr);
    if !stderr.is_empty() {
        eprint!("{stderr}");
    }
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Runs `integrate` through the binary; returns the output directory.
fn integrate_run(problem: &str, k: usize, s: usize, h: f64, steps: usize) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let (k, s, h, steps) = (
        k.to_string(),
        s.to_string(),
        h.to_string(),
        steps.to_string(),
    );
    let (code, _) = hbvm_bin(&[
        "integrate",
        "--problem",
        problem,
        "--s",
        &s,
        "--k",
        &k,
        "--h",
        &h,
        "--steps",
        &steps,
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "integrate {problem} ({k},{s}) failed");
    dir
}

// ---- criterion 1 -----------------------------------------------------------

/// Gauss nodes and weights on [0, 1] from the Legendre Jacobi matrix.
fn golub_welsch(s: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(s, s);
    for n in 1..s {
        let beta = n as f64 / ((4 * n * n - 1) as f64).sqrt();
        jac[(n, n - 1)] = beta;
        jac[(n - 1, n)] = beta;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..s)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            ((1.0 + eig.eigenvalues[i]) / 2.0, v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn lagrange_integral(c: &[f64], j: usize, upper: f64) -> f64 {
    let mut poly = vec![1.0];
    for (_, &cr) in c.iter().enumerate().filter(|&(r, _)| r != j) {
        let d = c[j] - cr;
        let mut next = vec![0.0; poly.len() + 1];
        for (i, p) in poly.iter().enumerate() {
            next[i] -= p * cr / d;
            next[i + 1] += p / d;
        }
        poly = next;
    }
    poly.iter()
        .enumerate()
        .map(|(d, a)| a * upper.powi(d as i32 + 1) / (d as f64 + 1.0))
        .sum()
}

fn criterion_1() -> Verdict {
    let mut worst: f64 = 0.0;
    for s in 1..=5 {
        let (c, _) = golub_welsch(s);
        let rk = build_tableau::<f64>(s, s).unwrap().as_runge_kutta();
        for i in 0..s {
            worst = worst.max((rk.abscissae[i] - c[i]).abs());
            worst = worst.max((rk.weights[i] - lagrange_integral(&c, i, 1.0)).abs());
            for j in 0..s {
                worst = worst.max((rk.matrix[i][j] - lagrange_integral(&c, j, c[i])).abs());
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("max entry difference {worst:.3e} (tol 1e-12), s = 1..5"),
    )
}

// ---- criteria 2 and 3 --------------------------------------------------------

fn criteria_2_3() -> (Verdict, Verdict) {
    let hbvm = integrate_run("henon-heiles", 4, 2, 1.0, 5000);
    let gauss = integrate_run("henon-heiles", 2, 2, 1.0, 5000);
    let drift = |dir: &Path| {
        let (header, rows) = read_csv(&dir.join("drift.csv"));
        max_of(&column(&header, &rows, "hamiltonian_rel_err"))
    };
    let (dh, dg) = (drift(hbvm.path()), drift(gauss.path()));
    let c2 = verdict(
        dh <= 1e-12 && dg > 1e-8,
        format!("HBVM(4,2) max drift {dh:.3e} (<= 1e-12), Gauss(2,2) max drift {dg:.3e} (> 1e-8)"),
    );

    let (_, rows) = read_csv(&hbvm.path().join("trajectory.csv"));
    let u_max = rows
        .iter()
        .map(|r| HenonHeiles::potential(r[1], r[2]))
        .fold(f64::NEG_INFINITY, f64::max);
    let inside = rows
        .iter()
        .all(|r| HenonHeiles::inside_triangle(r[1], r[2]));
    let c3 = verdict(
        u_max < HENON_HEILES_ENERGY_BOUND && inside,
        format!(
            "max U(q_n) = {u_max:.6} (< 1/6) over {} states, inside triangle: {inside}",
            rows.len()
        ),
    );
    (c2, c3)
}

// ---- criterion 4 -----------------------------------------------------------

fn criterion_4() -> Verdict {
    let sys = quintic_system(QuinticCoefficients::<f64>::reference()).unwrap();
    let y0 = [0.0, 0.3];
    let h0 = sys.hamiltonian(&y0);
    let drift = |k: usize| {
        let tab = build_tableau::<f64>(k, 2).unwrap();
        let traj = integrate(&sys, &y0, 1.0, 1000, &tab, &SolverConfig::default()).unwrap();
        traj.states
            .iter()
            .map(|y| ((sys.hamiltonian(y) - h0) / h0).abs())
            .fold(0.0, f64::max)
    };
    let (d5, d4) = (drift(5), drift(4));
    verdict(
        d5 <= 1e-12 && d4 > 1e-9,
        format!("k=5 max drift {d5:.3e} (<= 1e-12), k=4 max drift {d4:.3e} (> 1e-9)"),
    )
}

// ---- criteria 5 and 6 ------------------------------------------------------

/// `(p component of y0, relative H error)` from the annulus subcommand.
fn annulus(k: usize, s: usize, h: &str, tol: &str) -> (f64, f64) {
    let (k, s) = (k.to_string(), s.to_string());
    let (code, out) = hbvm_bin(&[
        "annulus", "--s", &s, "--k", &k, "--h", h, "--steps", "2500", "--tol", tol,
    ]);
    assert_eq!(code, 0, "annulus ({k},{s}) h={h} failed");
    let row: Vec<f64> = out
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|f| f.parse().unwrap())
        .collect();
    // the CLI reports the error against its own H*; recompute against the pinned value
    let sys = quintic_system(QuinticCoefficients::<f64>::reference()).unwrap();
    let rel = (sys.hamiltonian(&row[..2]) - HSTAR).abs() / HSTAR;
    assert_eq!(rel, row[5]);
    (row[1], rel)
}

fn criterion_5() -> Verdict {
    let (p, rel) = annulus(5, 2, "1", "1e-12");
    let digits_ok = format!("{p:.9e}") == format!("{BOUNDARY_P:.9e}");
    let (p_eps, rel_eps) = annulus(5, 2, "1", &f64::EPSILON.to_string());
    verdict(
        digits_ok && rel <= 1e-12,
        format!(
            "p = {p:.16e} (10 digits agree: {digits_ok}), |H-H*|/H* = {rel:.3e} (<= 1e-12); \
             with tol 2^-52: p = {p_eps:.16e}, |H-H*|/H* = {rel_eps:.3e}"
        ),
    )
}

fn criterion_6() -> Verdict {
    let (_, r1) = annulus(2, 2, "1", "1e-12");
    let (_, r2) = annulus(2, 2, "0.5", "1e-12");
    verdict(
        (1e-2..=5e-2).contains(&r1) && r2 < 1e-3,
        format!("Gauss(2,2) h=1 error {r1:.3e} (in [1e-2, 5e-2]), h=1/2 error {r2:.3e} (< 1e-3)"),
    )
}

// ---- criterion 7 -----------------------------------------------------------

fn observed_orders(k: usize, s: usize, h0: &str) -> Vec<f64> {
    let (k, s) = (k.to_string(), s.to_string());
    let (code, out) = hbvm_bin(&[
        "convergence",
        "--problem",
        "henon-heiles",
        "--s",
        &s,
        "--k",
        &k,
        "--h0",
        h0,
        "--levels",
        "3",
        "--t-end",
        "1",
    ]);
    assert_eq!(code, 0);
    out.lines()
        .skip(2)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

fn criterion_7() -> Verdict {
    let o4 = observed_orders(4, 2, "0.25");
    let o6 = observed_orders(8, 3, "0.5");
    let pass =
        o4.iter().all(|p| (p - 4.0).abs() <= 0.6) && o6.iter().all(|p| (p - 6.0).abs() <= 0.9);
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|p| format!("{p:.3}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    verdict(
        pass,
        format!(
            "(4,2) orders [{}] (4 ± 0.6), (8,3) orders [{}] (6 ± 0.9)",
            fmt(&o4),
            fmt(&o6)
        ),
    )
}

// ---- criterion 8 -----------------------------------------------------------

type SymmetryCase = (
    &'static str,
    Box<dyn HamiltonianSystem<f64>>,
    BoxedStrategy<Vec<f64>>,
);

fn criterion_8() -> Verdict {
    let cfg = SolverConfig::<f64>::default();
    let tol = cfg.abs_tol.max(cfg.rel_tol);
    let h = 0.1;
    let sitnikov = nbody_system(sitnikov_config::<f64>()).unwrap();
    let base = sitnikov_initial_state::<f64>();
    let problems: Vec<SymmetryCase> = vec![
        (
            "harmonic",
            Box::new(HarmonicOscillator::default()),
            proptest::collection::vec(-1.0..1.0f64, 2).boxed(),
        ),
        (
            "henon-heiles",
            Box::new(henon_heiles_system()),
            proptest::collection::vec(-0.25..0.25f64, 4).boxed(),
        ),
        (
            "quintic",
            Box::new(quintic_system(QuinticCoefficients::<f64>::reference()).unwrap()),
            proptest::collection::vec(-0.3..0.3f64, 2).boxed(),
        ),
        (
            "sitnikov",
            Box::new(sitnikov),
            proptest::collection::vec(-0.01..0.01f64, 18)
                .prop_map(move |d| base.iter().zip(&d).map(|(b, e)| b + e).collect())
                .boxed(),
        ),
    ];
    let worst_ratio = std::cell::Cell::new(0.0f64);
    let mut failure = None;
    for (name, sys, states) in &problems {
        for (k, s) in [(1, 1), (4, 2), (8, 3)] {
            let tab = build_tableau::<f64>(k, s).unwrap();
            let mut runner = TestRunner::new(PropConfig {
                cases: 10,
                failure_persistence: None,
                rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
                ..PropConfig::default()
            });
            let result = runner.run(states, |y0| {
                let y1 = step(sys.as_ref(), &y0, h, &tab, &cfg).unwrap();
                let back = step(sys.as_ref(), &y1, -h, &tab, &cfg).unwrap();
                let norm = y0.iter().map(|v| v * v).sum::<f64>().sqrt();
                let bound = 10.0 * tol * (1.0 + norm);
                let err = back
                    .iter()
                    .zip(&y0)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                worst_ratio.set(worst_ratio.get().max(err / bound));
                prop_assert!(
                    err <= bound,
                    "{} ({},{}) error {:e} > {:e}",
                    name,
                    k,
                    s,
                    err,
                    bound
                );
                Ok(())
            });
            if let Err(e) = result {
                failure.get_or_insert(e.to_string());
            }
        }
    }
    let detail = format!(
        "4 problems x 10 random states x (k,s) in {{(1,1),(4,2),(8,3)}}, h = {h}; worst error/bound = {:.3}",
        worst_ratio.get()
    );
    match failure {
        None => verdict(true, detail),
        Some(e) => verdict(false, format!("{detail}; {e}")),
    }
}

// ---- criterion 9 -----------------------------------------------------------

fn criterion_9() -> Verdict {
    let gauss = integrate_run("sitnikov", 2, 2, 0.5, 600);
    let hbvm = integrate_run("sitnikov", 18, 2, 0.5, 600);
    let (hg, rg) = read_csv(&gauss.path().join("drift.csv"));
    let (hh, rh) = read_csv(&hbvm.path().join("drift.csv"));
    let gauss_l = max_of(&column(&hg, &rg, "angular_momentum_norm_rel_err"));
    let hbvm_h = max_of(&column(&hh, &rh, "hamiltonian_rel_err"));
    let hbvm_l = column(&hh, &rh, "angular_momentum_norm_rel_err");
    let third = hbvm_l.len() / 3;
    let thirds: Vec<f64> = (0..3)
        .map(|i| max_of(&hbvm_l[i * third..(i + 1) * third]))
        .collect();
    let monotone = thirds[0] < thirds[1] && thirds[1] < thirds[2];
    let l_max = max_of(&hbvm_l);
    verdict(
        gauss_l <= 1e-11 && hbvm_h <= 1e-10 && l_max <= 1e-4 && !monotone,
        format!(
            "Gauss(2,2) max L drift {gauss_l:.3e} (<= 1e-11); HBVM(18,2) max H drift {hbvm_h:.3e} \
             (<= 1e-10), max L drift {l_max:.3e} (<= 1e-4), maxima by thirds \
             [{:.3e}, {:.3e}, {:.3e}] monotone: {monotone}",
            thirds[0], thirds[1], thirds[2]
        ),
    )
}

// ---- criterion 10 ----------------------------------------------------------

/// `√(2n+1) Σ_m (−1)^(n+m) C(n,m) C(n+m,m) x^m`, evaluated with compensated Horner.
fn monomial_basis(j: usize, x: f64) -> f64 {
    let n = j - 1;
    let binom =
        |a: usize, b: usize| (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64);
    let coeffs: Vec<f64> = (0..=n)
        .map(|m| {
            let sign = if (n + m).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binom(n, m) * binom(n + m, m)
        })
        .collect();
    let (mut acc, mut comp) = (0.0f64, 0.0f64);
    for &c in coeffs.iter().rev() {
        let prod = acc * x;
        let prod_err = acc.mul_add(x, -prod);
        let sum = prod + c;
        let bb = sum - prod;
        let sum_err = (prod - (sum - bb)) + (c - bb);
        acc = sum;
        comp = comp * x + (prod_err + sum_err);
    }
    ((2 * n + 1) as f64).sqrt() * (acc + comp)
}

fn property(
    cases: u32,
    strategy: impl Strategy<Value = f64>,
    test: impl Fn(f64) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(PropConfig {
        cases,
        failure_persistence: None,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        ..PropConfig::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn criterion_10() -> Verdict {
    let mut problems: Vec<String> = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            problems.push(what);
        }
    };

    let rule32 = gauss_rule::<f64>(32).unwrap();
    for i in 1..=8 {
        for j in 1..=8 {
            let v = rule32.integrate(|x| eval_basis(i, x).unwrap() * eval_basis(j, x).unwrap());
            let want = if i == j { 1.0 } else { 0.0 };
            check(
                (v - want).abs() <= 1e-12,
                format!("orthonormality ({i},{j}): {v:e}"),
            );
        }
    }
    for j in 1..=64 {
        let v = eval_basis_integral(j, 1.0f64).unwrap();
        let want = if j == 1 { 1.0 } else { 0.0 };
        check((v - want).abs() <= 1e-14, format!("mean of P_{j}: {v:e}"));
    }
    for j in 1..=8 {
        if let Err(e) = property(100, 0.0..=1.0f64, |x| {
            let (a, b) = (eval_basis(j, x).unwrap(), monomial_basis(j, x));
            prop_assert!((a - b).abs() <= 1e-12, "P_{}({}) = {} vs {}", j, x, a, b);
            Ok(())
        }) {
            check(false, format!("recurrence: {e}"));
        }
        if let Err(e) = property(100, 1e-6..=1.0 - 1e-6, |c| {
            let d = 1e-6;
            let fd = (eval_basis_integral(j, c + d).unwrap()
                - eval_basis_integral(j, c - d).unwrap())
                / (2.0 * d);
            let p = eval_basis(j, c).unwrap();
            prop_assert!(
                (fd - p).abs() <= 1e-6,
                "d/dc ∫P_{} at {}: {} vs {}",
                j,
                c,
                fd,
                p
            );
            Ok(())
        }) {
            check(false, format!("derivative: {e}"));
        }
    }

    for k in 1..=32 {
        let rule = gauss_rule::<f64>(k).unwrap();
        let (c, w) = (&rule.nodes, &rule.weights);
        check(c.len() == k && w.len() == k, format!("k={k}: sizes"));
        check(
            c.windows(2).all(|p| p[0] < p[1]),
            format!("k={k}: nodes not increasing"),
        );
        check(
            c[0] > 0.0 && c[k - 1] < 1.0,
            format!("k={k}: nodes outside (0,1)"),
        );
        check(
            w.iter().all(|&x| x > 0.0),
            format!("k={k}: non-positive weight"),
        );
        let sum: f64 = w.iter().sum();
        check(
            (sum - 1.0).abs() <= 1e-14,
            format!("k={k}: weight sum {sum:e}"),
        );
        for l in 0..k {
            let m = k - 1 - l;
            check(
                (c[l] + c[m] - 1.0).abs() <= 1e-14,
                format!("k={k}: node symmetry at {l}"),
            );
            check(
                (w[l] - w[m]).abs() <= 1e-14,
                format!("k={k}: weight symmetry at {l}"),
            );
            let r = eval_basis(k + 1, c[l]).unwrap();
            check(r.abs() <= 1e-12, format!("k={k}: |P_(k+1)(c_{l})| = {r:e}"));
        }
        for d in 0..2 * k {
            let v = rule.integrate(|x| x.powi(d as i32));
            let exact = 1.0 / (d as f64 + 1.0);
            check(
                (v - exact).abs() <= 1e-13,
                format!("k={k}: x^{d} integrates to {v:e}"),
            );
        }
    }
    let k1 = gauss_rule::<f64>(1).unwrap();
    check(
        k1.nodes == [0.5] && k1.weights == [1.0],
        "k=1 is the midpoint rule".into(),
    );
    let k3 = gauss_rule::<f64>(3).unwrap();
    let w3 = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    check(
        k3.weights
            .iter()
            .zip(&w3)
            .all(|(a, b)| (a - b).abs() <= 1e-15),
        "k=3 weights 5/18, 8/18, 5/18".into(),
    );
    check(
        matches!(gauss_rule::<f64>(0), Err(HbvmError::Argument(_))),
        "k=0 is an argument error".into(),
    );
    check(
        matches!(gauss_rule::<f64>(513), Err(HbvmError::Resource(_))),
        "k=513 is a resource error".into(),
    );

    let n = problems.len();
    let detail = if n == 0 {
        "basis: orthonormality, zero mean, recurrence, derivative; rules k = 1..32: sum, symmetry, exactness, roots".to_string()
    } else {
        format!("{n} violations, first: {}", problems[0])
    };
    verdict(n == 0, detail)
}

type Row = (usize, &'static str, Duration, Duration, Verdict);

fn timed(results: &mut Vec<Row>, n: usize, name: &'static str, limit: u64, f: fn() -> Verdict) {
    let t = Instant::now();
    let v = f();
    results.push((n, name, t.elapsed(), Duration::from_secs(limit), v));
}

fn main() {
    let mut results: Vec<Row> = Vec::new();
    timed(&mut results, 1, "Gauss equivalence", 1, criterion_1);
    let t = Instant::now();
    let (c2, c3) = criteria_2_3();
    let e = t.elapsed();
    results.push((
        2,
        "exact polynomial energy conservation",
        e,
        Duration::from_secs(30),
        c2,
    ));
    results.push((3, "triangle containment", e, Duration::from_secs(30), c3));
    timed(&mut results, 4, "sharpness of k >= nu s/2", 5, criterion_4);
    timed(
        &mut results,
        5,
        "boundary search, HBVM side",
        300,
        criterion_5,
    );
    timed(
        &mut results,
        6,
        "boundary search, Gauss side",
        300,
        criterion_6,
    );
    timed(&mut results, 7, "order 2s", 10, criterion_7);
    timed(&mut results, 8, "symmetry", 60, criterion_8);
    timed(&mut results, 9, "quadratic invariant", 60, criterion_9);
    timed(
        &mut results,
        10,
        "quadrature and basis properties",
        5,
        criterion_10,
    );

    let mut failed = 0;
    for (n, name, elapsed, limit, v) in &results {
        let pass = v.pass && elapsed <= limit;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {name}: {} | {} | {:.2}s (limit {}s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
