use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use hbvm::problems::{hstar_reference, quintic_system, QuinticCoefficients};
use hbvm::{
    bisect_boundary, build_tableau, integrate, EscapeCriterion, HamiltonianSystem, HbvmError,
    HbvmTableau, ProbeOutcome, ProbeParams, SolverConfig, Trajectory,
};
use serde_json::{json, Map, Value};

use crate::args::{AnnulusArgs, ConvergenceArgs, Format, IntegrateArgs, SolverArgs, TableauArgs};
use crate::error::CliError;
use crate::problems::{build_system, initial_state};
use crate::report::{csv_row, fmt_num, DriftReport, RunManifest, DETERMINISM_NOTE};

fn solver_config(args: &SolverArgs) -> Result<SolverConfig<f64>, CliError> {
    let cfg = SolverConfig {
        abs_tol: args.abs_tol,
        rel_tol: args.rel_tol,
        max_iterations: args.max_iter,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn check_step(h: f64) -> Result<(), CliError> {
    if h.is_finite() && h != 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "step size must be finite and nonzero, got {h}"
        )))
    }
}

fn manifest(
    command: &str,
    problem: &str,
    tab: &HbvmTableau<f64>,
    h: f64,
    steps: usize,
    cfg: &SolverConfig<f64>,
    y0: &[f64],
) -> RunManifest {
    RunManifest {
        command: command.into(),
        problem: problem.into(),
        s: tab.s,
        k: tab.k,
        h,
        steps,
        abs_tol: cfg.abs_tol,
        rel_tol: cfg.rel_tol,
        max_iter: cfg.max_iterations,
        y0: y0.to_vec(),
        outputs: Vec::new(),
        extra: Map::new(),
        status: "ok".into(),
        failed_step: None,
        determinism: DETERMINISM_NOTE,
    }
}

pub fn tableau(args: &TableauArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tab = build_tableau::<f64>(args.method.k, args.method.s)?;
    let rk = tab.as_runge_kutta();
    match args.format {
        Format::Csv => {
            let m_cols: Vec<String> = (1..=tab.k).map(|i| format!("m_{i}")).collect();
            writeln!(out, "c,b,{}", m_cols.join(","))?;
            for i in 0..tab.k {
                let row = [rk.abscissae[i], rk.weights[i]]
                    .into_iter()
                    .chain(rk.matrix[i].iter().copied());
                writeln!(out, "{}", csv_row(row))?;
            }
            writeln!(out)?;
            let a_cols: Vec<String> = (1..=tab.s).map(|j| format!("a_{j}")).collect();
            let p_cols: Vec<String> = (1..=tab.s).map(|j| format!("p_{j}")).collect();
            writeln!(out, "c,omega,{},{}", a_cols.join(","), p_cols.join(","))?;
            for i in 0..tab.k {
                let row = [tab.nodes()[i], tab.weights()[i]]
                    .into_iter()
                    .chain(tab.integrated_basis[i].iter().copied())
                    .chain(tab.basis_at_nodes[i].iter().copied());
                writeln!(out, "{}", csv_row(row))?;
            }
        }
        Format::Json => {
            let doc = json!({
                "s": tab.s,
                "k": tab.k,
                "c": tab.nodes(),
                "omega": tab.weights(),
                "integrated_basis": tab.integrated_basis,
                "basis_at_nodes": tab.basis_at_nodes,
                "rk_matrix": rk.matrix,
                "b": rk.weights,
            });
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?
            )?;
        }
    }
    Ok(())
}

fn write_trajectory(path: &Path, traj: &Trajectory<f64>) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let dim = traj.states.first().map_or(0, Vec::len);
    let cols: Vec<String> = (1..=dim).map(|i| format!("y{i}")).collect();
    writeln!(w, "t,{}", cols.join(","))?;
    for (n, y) in traj.states.iter().enumerate() {
        writeln!(
            w,
            "{}",
            csv_row(std::iter::once(traj.time(n)).chain(y.iter().copied()))
        )?;
    }
    w.flush()
}

fn write_drift(
    path: &Path,
    traj: &Trajectory<f64>,
    reports: &[DriftReport],
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let cols: Vec<String> = reports.iter().map(DriftReport::column_name).collect();
    writeln!(w, "t,{}", cols.join(","))?;
    for n in 0..traj.states.len() {
        let row = std::iter::once(traj.time(n)).chain(reports.iter().map(|r| r.errors[n]));
        writeln!(w, "{}", csv_row(row))?;
    }
    w.flush()
}

pub fn integrate_cmd(args: &IntegrateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_step(args.h)?;
    let cfg = solver_config(&args.solver)?;
    let tab = build_tableau::<f64>(args.method.k, args.method.s)?;
    let sys = build_system(args.problem)?;
    let y0 = initial_state(args.problem, sys.as_ref(), &args.initial)?;
    let names: Vec<String> = match &args.drift {
        Some(names) => names.clone(),
        None => sys
            .invariant_names()
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    for name in &names {
        if sys.invariant(name, &y0).is_none() {
            return Err(CliError::Usage(format!(
                "unknown invariant {name:?} for {}; available: {}",
                args.problem.name(),
                sys.invariant_names().join(",")
            )));
        }
    }

    let (traj, failure) = match integrate(sys.as_ref(), &y0, args.h, args.steps, &tab, &cfg) {
        Ok(traj) => (traj, None),
        Err(f) => (f.partial.clone(), Some(f)),
    };
    let reports: Vec<DriftReport> = names
        .iter()
        .filter_map(|name| DriftReport::compute(sys.as_ref(), name, &traj.states))
        .collect();

    fs::create_dir_all(&args.out_dir)?;
    let traj_path = args.out_dir.join("trajectory.csv");
    let drift_path = args.out_dir.join("drift.csv");
    write_trajectory(&traj_path, &traj)?;
    write_drift(&drift_path, &traj, &reports)?;

    let mut m = manifest(
        "integrate",
        args.problem.name(),
        &tab,
        args.h,
        args.steps,
        &cfg,
        &y0,
    );
    m.outputs = vec!["trajectory.csv".into(), "drift.csv".into()];
    m.extra.insert("invariants".into(), json!(names));
    m.extra
        .insert("steps_completed".into(), json!(traj.step_count()));
    if let Some(f) = &failure {
        m.status = match f.error {
            HbvmError::NonConvergence { .. } => "nonconvergence".into(),
            HbvmError::EvaluationFailure(_) => "evaluation_failure".into(),
            _ => "error".into(),
        };
        m.failed_step = Some(f.step);
        m.extra.insert("error".into(), json!(f.error.to_string()));
    }
    m.write(&args.out_dir.join("manifest.json"))?;

    writeln!(out, "wrote {}", traj_path.display())?;
    writeln!(out, "wrote {}", drift_path.display())?;
    for r in &reports {
        writeln!(out, "max {} = {}", r.column_name(), fmt_num(r.max))?;
    }
    match failure {
        Some(f) => Err(CliError::from(f.error).with_context(format!("step {}", f.step))),
        None => Ok(()),
    }
}

/// Integer number of steps of size `h` that reach `t_end`.
fn steps_for(t_end: f64, h: f64) -> Result<usize, CliError> {
    let n = (t_end / h).round();
    if !(n >= 1.0) || (n * h - t_end).abs() > 1e-9 * t_end.abs().max(1.0) {
        return Err(CliError::Usage(format!(
            "t-end {t_end} is not a positive multiple of h = {h}"
        )));
    }
    Ok(n as usize)
}

pub fn convergence(args: &ConvergenceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.levels < 2 {
        return Err(CliError::Usage(format!(
            "--levels must be >= 2, got {}",
            args.levels
        )));
    }
    if args.levels > 30 {
        return Err(CliError::Usage("--levels must be <= 30".into()));
    }
    check_step(args.h0)?;
    if !(args.h0 > 0.0) {
        return Err(CliError::Usage("--h0 must be positive".into()));
    }
    let cfg = solver_config(&args.solver)?;
    let tab = build_tableau::<f64>(args.method.k, args.method.s)?;
    let sys = build_system(args.problem)?;
    let y0 = initial_state(args.problem, sys.as_ref(), &args.initial)?;

    // levels 0..L-1, then the reference at h0 / 2^(L+2)
    let mut hs: Vec<f64> = (0..args.levels)
        .map(|l| args.h0 / 2f64.powi(l as i32))
        .collect();
    hs.push(args.h0 / 2f64.powi(args.levels as i32 + 2));
    let steps = hs
        .iter()
        .map(|&h| steps_for(args.t_end, h))
        .collect::<Result<Vec<_>, _>>()?;

    let finals: Vec<Result<Vec<f64>, HbvmError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = hs
            .iter()
            .zip(&steps)
            .map(|(&h, &n)| {
                let (sys, y0, tab, cfg) = (&sys, &y0, &tab, &cfg);
                scope.spawn(move || {
                    integrate(sys.as_ref(), y0, h, n, tab, cfg)
                        .map(|t| t.last().to_vec())
                        .map_err(|f| f.error)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("integration thread panicked"))
            .collect()
    });
    let finals = finals.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (reference, levels) = finals.split_last().expect("at least three runs");
    let errors: Vec<f64> = levels
        .iter()
        .map(|y| {
            y.iter()
                .zip(reference)
                .fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs()))
        })
        .collect();

    let mut csv = String::from("h,error,order\n");
    for (l, (&h, &e)) in hs.iter().zip(&errors).enumerate() {
        let order = if l == 0 {
            String::new()
        } else {
            fmt_num((errors[l - 1] / e).log2())
        };
        csv.push_str(&format!("{},{},{}\n", fmt_num(h), fmt_num(e), order));
    }
    out.write_all(csv.as_bytes())?;

    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("convergence.csv"), &csv)?;
        let mut m = manifest(
            "convergence",
            args.problem.name(),
            &tab,
            args.h0,
            steps[0],
            &cfg,
            &y0,
        );
        m.outputs = vec!["convergence.csv".into()];
        m.extra.insert("levels".into(), json!(args.levels));
        m.extra.insert("t_end".into(), json!(args.t_end));
        m.extra.insert("reference_h".into(), json!(hs[args.levels]));
        m.write(&dir.join("manifest.json"))?;
    }
    Ok(())
}

fn outcome_label(o: ProbeOutcome) -> (&'static str, Option<usize>) {
    match o {
        ProbeOutcome::Bounded => ("bounded", None),
        ProbeOutcome::Escaped { step } => ("escaped", Some(step)),
        ProbeOutcome::SolverFailure { step } => ("solver_failure", Some(step)),
    }
}

pub fn annulus(args: &AnnulusArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_step(args.h)?;
    if !(args.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let cfg = solver_config(&args.solver)?;
    let sys = quintic_system(QuinticCoefficients::<f64>::reference())?;
    let params = ProbeParams {
        s: args.method.s,
        k: args.method.k,
        h: args.h,
        n_steps: args.steps,
        solver: cfg,
    };
    let crit = EscapeCriterion {
        radius: args.escape_radius,
        check_every: args.check_every,
    };
    let (p0, q) = ([0.0, 0.0], [0.0, 1.0]);
    let result = bisect_boundary(&sys, &p0, &q, &params, args.tol, &crit)?;
    let y0 = &result.boundary_point;
    let energy = sys.hamiltonian(y0);
    let hstar = hstar_reference();
    let rel_err = (energy - hstar).abs() / hstar;

    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("q0,p0,c_low,c_high,hamiltonian,rel_h_err,probes\n");
            s.push_str(&csv_row([
                y0[0],
                y0[1],
                result.c_low,
                result.c_high,
                energy,
                rel_err,
            ]));
            s.push_str(&format!(
                ",{}\n\nc,outcome,step,steps_run\n",
                result.probes.len()
            ));
            for p in &result.probes {
                let (label, at) = outcome_label(p.outcome);
                let at = at.map_or(String::new(), |n| n.to_string());
                s.push_str(&format!("{},{label},{at},{}\n", fmt_num(p.c), p.steps_run));
            }
            s
        }
        Format::Json => {
            let probes: Vec<Value> = result
                .probes
                .iter()
                .map(|p| {
                    let (label, at) = outcome_label(p.outcome);
                    json!({ "c": p.c, "outcome": label, "step": at, "steps_run": p.steps_run })
                })
                .collect();
            let doc = json!({
                "y0": y0,
                "c_low": result.c_low,
                "c_high": result.c_high,
                "hamiltonian": energy,
                "hstar": hstar,
                "rel_h_err": rel_err,
                "probes": probes,
            });
            let mut s = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
            s.push('\n');
            s
        }
    };
    out.write_all(text.as_bytes())?;

    if let Some(dir) = &args.out_dir {
        let name = match args.format {
            Format::Csv => "annulus.csv",
            Format::Json => "annulus.json",
        };
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), &text)?;
        let tab = build_tableau::<f64>(args.method.k, args.method.s)?;
        let mut m = manifest("annulus", "quintic", &tab, args.h, args.steps, &cfg, &[]);
        m.extra.insert("boundary_point".into(), json!(y0));
        m.outputs = vec![name.into()];
        m.extra.insert("tol".into(), json!(args.tol));
        m.extra
            .insert("escape_radius".into(), json!(args.escape_radius));
        m.extra
            .insert("check_every".into(), json!(args.check_every));
        m.extra
            .insert("segment".into(), json!({ "p0": p0, "q": q }));
        m.write(&dir.join("manifest.json"))?;
    }
    Ok(())
}
