//! The five subcommands. Each validates its settings before computing
//! anything, so configuration errors never leave partial output behind.

use serde_json::json;
use zeroflow_core::bounds::{
    ellipse_min_brute, ellipse_min_log_distance, lower_bound_inequality_check,
    optimal_contour_parameter, optimal_contour_parameter_search, verify_flow_bound,
};
use zeroflow_core::measures::{ks_distance, wasserstein1, EmpiricalMeasure, LimitMeasure};
use zeroflow_core::polyflow::{jacobi_roots, DerivativeFlow, FlowRecord, Generator};
use zeroflow_core::potential::{equilibrium_constant, essential_min_check, verify_equilibrium};
use zeroflow_core::regression::bounds as frozen;
use zeroflow_core::RootMultiset;

use crate::output::{num, Run, Table};
use crate::settings::{check_degree, check_time, stem, Settings};
use crate::CliError;

const JACOBI_ORACLE_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const SWEEP_SIZE: u32 = 50;
const SWEEP_SAMPLES: usize = 4096;

fn zeros_table(state: &RootMultiset) -> Table {
    let mut table = Table::new(&["index", "location", "multiplicity"]);
    for (i, r) in state.roots().iter().enumerate() {
        table.push(vec![
            i.to_string(),
            num(r.location),
            r.multiplicity.to_string(),
        ]);
    }
    table
}

fn max_atomwise(a: &RootMultiset, b: &RootMultiset) -> f64 {
    if a.distinct() != b.distinct() {
        return f64::INFINITY;
    }
    a.locations()
        .zip(b.locations())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn flow(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    let n = s.degree()?;
    let (k, _) = s.depth(n)?;
    let generators = s.generators()?;
    if s.stride == Some(0) {
        return Err(CliError::Config("--stride must be positive".into()));
    }
    for g in &generators {
        let label = stem(g);
        let start = g.generate(n)?;
        let symmetric = start.is_symmetric(0.0);
        for (step, state) in DerivativeFlow::new(start).take(k + 1).enumerate() {
            let state = state?;
            let strided = s.stride.is_some_and(|d| step % d == 0);
            if step == 0 || step == k || strided {
                let file = format!("{label}_n{n}_k{step}");
                run.table(&file, &zeros_table(&state))?;
            }
            if step != k {
                continue;
            }
            let degree = state.degree();
            run.check(
                format!("{label} degree"),
                degree as f64,
                (n - k) as f64,
                degree == n - k,
            );
            if symmetric {
                let ok = state.is_symmetric(SYMMETRY_TOL);
                run.check(
                    format!("{label} symmetric"),
                    f64::from(u8::from(ok)),
                    1.0,
                    ok,
                );
            }
            if let Generator::Jacobi { alpha, beta } = *g {
                let oracle = jacobi_roots(n - k, alpha + k as f64, beta + k as f64)?;
                let err = max_atomwise(&state, &oracle);
                run.check(
                    format!("{label} jacobi oracle"),
                    err,
                    JACOBI_ORACLE_TOL,
                    err <= JACOBI_ORACLE_TOL,
                );
            }
        }
        run.plot(&format!("{label}_n{n}_k{k}.csv"), "index", "location");
    }
    Ok(())
}

pub fn compare(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    let mut ns = if s.n_list.is_empty() {
        s.n.map_or_else(|| vec![100, 200, 400], |n| vec![n])
    } else {
        s.n_list.clone()
    };
    ns.sort_unstable();
    ns.dedup();
    for &n in &ns {
        check_degree(n)?;
    }
    if s.k.is_some() {
        return Err(CliError::Config(
            "compare takes flow times (--t or --t-list)".into(),
        ));
    }
    let ts = match (s.t_list.is_empty(), s.t) {
        (false, _) => s.t_list.clone(),
        (true, Some(t)) => vec![t],
        (true, None) => vec![0.5],
    };
    for &t in &ts {
        check_time(t)?;
    }
    let generators = s.generators()?;
    let limits = frozen().limit_law.clone();

    let mut table = Table::new(&["generator", "seed", "n", "k", "t", "ks", "w1"]);
    for g in &generators {
        // ks[t index] over increasing n
        let mut series = vec![Vec::new(); ts.len()];
        for &n in &ns {
            let ks_targets: Vec<usize> =
                ts.iter().map(|t| (t * n as f64).round() as usize).collect();
            if let Some(&bad) = ks_targets.iter().find(|&&k| k >= n) {
                return Err(CliError::Config(format!("k = {bad} must be below n = {n}")));
            }
            let last = *ks_targets.iter().max().expect("t list is not empty");
            let mut found = vec![None; ts.len()];
            for (k, state) in DerivativeFlow::new(g.generate(n)?)
                .take(last + 1)
                .enumerate()
            {
                let state = state?;
                for (i, _) in ks_targets.iter().enumerate().filter(|(_, &kt)| kt == k) {
                    let e = EmpiricalMeasure::from_roots(&state, n)?;
                    let m = LimitMeasure::new(k as f64 / n as f64)?;
                    found[i] = Some((ks_distance(&e, &m)?, wasserstein1(&e, &m)?));
                }
            }
            for (i, pair) in found.into_iter().enumerate() {
                let (ks, w1) = pair.expect("every target step is visited");
                let k = ks_targets[i];
                table.push(vec![
                    g.label().to_string(),
                    g.seed().map(|x| x.to_string()).unwrap_or_default(),
                    n.to_string(),
                    k.to_string(),
                    num(k as f64 / n as f64),
                    num(ks),
                    num(w1),
                ]);
                series[i].push((n, k, ks));
            }
        }
        // frozen bounds were established for deterministic starting zeros
        if g.seed().is_some() {
            continue;
        }
        let label = stem(g);
        for (t, points) in ts.iter().zip(&series) {
            for w in points.windows(2) {
                let (n0, _, a) = w[0];
                let (n1, _, b) = w[1];
                run.check(
                    format!("{label} t={t} ks trend n={n0}->{n1}"),
                    b - a,
                    limits.ks_trend_slack,
                    b <= a + limits.ks_trend_slack,
                );
            }
            if let Some(&(n, _, ks)) = points.last().filter(|p| p.0 >= 800) {
                run.check(
                    format!("{label} t={t} ks at n={n}"),
                    ks,
                    limits.ks_max_at_largest_n,
                    ks <= limits.ks_max_at_largest_n,
                );
            }
            if matches!(g, Generator::Chebyshev) {
                for &(n, k, ks) in points.iter().filter(|p| p.0 == 400 && p.1 == 200) {
                    let bound = limits.ks_chebyshev_400_half;
                    run.check(format!("{label} ks at n={n} k={k}"), ks, bound, ks <= bound);
                }
            }
        }
    }
    run.table("compare", &table)?;
    run.plot("compare.csv", "n", "ks");
    Ok(())
}

pub fn equilibrium(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    let t =
        s.t.ok_or_else(|| CliError::Config("equilibrium needs --t".into()))?;
    if s.k.is_some() {
        return Err(CliError::Config("equilibrium takes --t, not --k".into()));
    }
    let reference = &frozen().equilibrium;
    let t_max = s.positive("t_max", s.t_max, reference.t_max)?;
    check_time(t)?;
    if t > t_max {
        return Err(CliError::Config(format!(
            "t = {t} is above t_max = {t_max}"
        )));
    }
    let grid = s.grid.unwrap_or(1001);
    if grid < 16 {
        return Err(CliError::Config(format!("--grid {grid} is below 16")));
    }
    let tol_support = s.positive("tol_support", s.tol_support, reference.tol_support)?;
    let tol_exterior = s.positive("tol_exterior", s.tol_exterior, reference.tol_exterior)?;
    equilibrium_at(t, grid, tol_support, tol_exterior, run)
}

fn equilibrium_at(
    t: f64,
    grid: usize,
    tol_support: f64,
    tol_exterior: f64,
    run: &mut Run,
) -> Result<(), CliError> {
    let report = verify_equilibrium(t, grid, tol_support, tol_exterior)?;
    let stem = format!("equilibrium_t{t}");
    let mut table = Table::new(&["x", "in_support", "value", "deviation"]);
    for p in &report.grid {
        table.push(vec![
            num(p.x),
            p.in_support.to_string(),
            num(p.value),
            num(p.deviation),
        ]);
    }
    run.table(&format!("{stem}_grid"), &table)?;
    run.json(
        &format!("{stem}_summary"),
        &json!({
            "t": num(t),
            "grid": grid.to_string(),
            "m": num(report.m_reference),
            "max_abs_deviation_on_support": num(report.max_abs_deviation_on_support),
            "min_slack_off_support": report.min_slack_off_support.map(num),
            "tol_support": num(tol_support),
            "tol_exterior": num(tol_exterior),
            "passed": report.passed,
        }),
    )?;
    run.check(
        format!("t={t} deviation on support"),
        report.max_abs_deviation_on_support,
        tol_support,
        report.max_abs_deviation_on_support <= tol_support,
    );
    if let Some(slack) = report.min_slack_off_support {
        run.check(
            format!("t={t} slack off support"),
            slack,
            -tol_exterior,
            slack >= -tol_exterior,
        );
    }
    run.plot(&format!("{stem}_grid.csv"), "x", "deviation");
    Ok(())
}

pub fn bounds(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    flow_bounds(s, run)?;
    ellipse_checks(run)
}

/// Returns the slacks of the last generator, in ζ order.
fn flow_bounds(s: &Settings, run: &mut Run) -> Result<Vec<f64>, CliError> {
    let n = s.n.unwrap_or(200);
    check_degree(n)?;
    let (k, t) = if s.t.is_none() && s.k.is_none() {
        Settings {
            t: Some(0.5),
            ..Settings::default()
        }
        .depth(n)?
    } else {
        s.depth(n)?
    };
    let a = match s.contour_a {
        Some(a) if a > 1.0 && a.is_finite() => a,
        Some(a) => return Err(CliError::Config(format!("--contour-A {a} must exceed 1"))),
        None if k == 0 => {
            return Err(CliError::Config(
                "at k = 0 give --contour-A explicitly".into(),
            ))
        }
        None => optimal_contour_parameter(t)?,
    };
    let zetas = if s.zetas.is_empty() {
        vec![-0.5, 0.0, 0.5]
    } else {
        s.zetas.clone()
    };
    if let Some(z) = zetas.iter().find(|z| !(z.abs() < 1.0)) {
        return Err(CliError::Config(format!("zeta = {z} must lie in (-1, 1)")));
    }
    let generators = s.generators()?;
    let floor = frozen().flow_bound.min_slack;

    let mut slacks = Vec::new();
    for g in &generators {
        let label = stem(g);
        let record: FlowRecord = g.flow(n, k)?;
        let rows = verify_flow_bound(&record, a, &zetas)?;
        let mut table = Table::new(&[
            "zeta",
            "lhs",
            "rhs",
            "slack",
            "exact_rhs",
            "n",
            "k",
            "t",
            "contour_a",
        ]);
        for r in &rows {
            table.push(vec![
                num(r.zeta),
                num(r.lhs),
                num(r.rhs),
                num(r.slack),
                num(r.exact_rhs),
                r.n.to_string(),
                r.k.to_string(),
                num(r.t),
                num(r.contour_a),
            ]);
            run.check(
                format!("{label} n={n} k={k} zeta={} slack", r.zeta),
                r.slack,
                floor,
                r.slack >= floor,
            );
        }
        run.table(&format!("bounds_{label}_n{n}_k{k}"), &table)?;
        slacks = rows.iter().map(|r| r.slack).collect();
    }
    Ok(slacks)
}

/// Closed-form ellipse minimum against brute force, the algebraic identity,
/// and the optimal contour parameter.
fn ellipse_checks(run: &mut Run) -> Result<(), CliError> {
    let limits = frozen().ellipse.clone();
    let mut sweep = Table::new(&[
        "a",
        "zeta",
        "closed_form",
        "brute_force",
        "error",
        "identity",
    ]);
    let (mut worst, mut worst_identity, mut mismatches) = (0.0f64, 0.0f64, 0usize);
    for i in 1..=SWEEP_SIZE {
        let a = 1.0 + 4.0 * f64::from(i) / f64::from(SWEEP_SIZE);
        for j in 0..SWEEP_SIZE {
            let zeta = -1.0 + 2.0 * f64::from(j) / f64::from(SWEEP_SIZE - 1);
            let closed = ellipse_min_log_distance(a, zeta)?;
            let brute = ellipse_min_brute(a, zeta, SWEEP_SAMPLES)?;
            let identity = lower_bound_inequality_check(a, zeta);
            let err = (closed - brute).abs();
            worst = worst.max(err);
            worst_identity = worst_identity.max(identity.abs());
            mismatches += usize::from(err > limits.closed_vs_brute);
            sweep.push(vec![
                num(a),
                num(zeta),
                num(closed),
                num(brute),
                num(err),
                num(identity),
            ]);
        }
    }
    run.table("ellipse_sweep", &sweep)?;
    run.check(
        "ellipse closed form vs brute force",
        worst,
        limits.closed_vs_brute,
        mismatches == 0,
    );
    run.check(
        "ellipse identity",
        worst_identity,
        limits.identity,
        worst_identity <= limits.identity,
    );

    let mut optimal = Table::new(&["t", "closed_form", "search", "error"]);
    let mut worst_a = 0.0f64;
    for i in 1..10 {
        let t = f64::from(i) / 10.0;
        let closed = optimal_contour_parameter(t)?;
        let searched = optimal_contour_parameter_search(t)?;
        worst_a = worst_a.max((closed - searched).abs());
        optimal.push(vec![
            num(t),
            num(closed),
            num(searched),
            num((closed - searched).abs()),
        ]);
    }
    run.table("optimal_contour", &optimal)?;
    run.check(
        "optimal contour parameter",
        worst_a,
        limits.optimal_a,
        worst_a <= limits.optimal_a,
    );
    run.plot("optimal_contour.csv", "t", "closed_form");
    Ok(())
}

/// The fixed schedule whose observed values back `data/regression.toml`.
pub fn report(s: &Settings, run: &mut Run) -> Result<(), CliError> {
    if s.generator.is_some()
        || !s.seeds.is_empty()
        || s.n.is_some()
        || s.t.is_some()
        || s.k.is_some()
    {
        return Err(CliError::Config(
            "report runs a fixed schedule; only --n-list, --t-list, --grid, --out, --format apply"
                .into(),
        ));
    }
    let grid = s.grid.unwrap_or(1001);
    if grid < 16 {
        return Err(CliError::Config(format!("--grid {grid} is below 16")));
    }
    let compare_settings = Settings {
        n_list: if s.n_list.is_empty() {
            vec![100, 200, 400, 800]
        } else {
            s.n_list.clone()
        },
        t_list: if s.t_list.is_empty() {
            vec![0.2, 0.5, 0.8]
        } else {
            s.t_list.clone()
        },
        ..Settings::default()
    };
    compare(&compare_settings, run)?;

    let eq = &frozen().equilibrium;
    for i in 0..10 {
        equilibrium_at(
            f64::from(i) / 10.0,
            grid,
            eq.tol_support,
            eq.tol_exterior,
            run,
        )?;
    }

    let mut slacks = Vec::new();
    for (n, k) in [(200, 100), (400, 200)] {
        let b = Settings {
            n: Some(n),
            k: Some(k),
            ..Settings::default()
        };
        slacks.push(flow_bounds(&b, run)?);
    }
    let tol = frozen().flow_bound.trend_tolerance;
    for (i, (before, after)) in slacks[0].iter().zip(&slacks[1]).enumerate() {
        // a positive slack that shrinks toward zero is still an improvement
        let change = after.min(0.0) - before.min(0.0);
        run.check(
            format!("bound slack trend n=200->400 zeta#{i}"),
            change,
            -tol,
            change >= -tol,
        );
    }
    ellipse_checks(run)?;

    let slack = &frozen().essential_min;
    let e = EmpiricalMeasure::from_record(&Generator::Chebyshev.flow(400, 200)?);
    let min = essential_min_check(0.5, &e, grid)?;
    let m = equilibrium_constant(0.5)?;
    run.check(
        "essential min n=400 t=0.5",
        min - m,
        -slack.slack_flow_n400,
        min >= m - slack.slack_flow_n400,
    );
    for n in [100, 200, 400] {
        let e = EmpiricalMeasure::from_record(&Generator::Chebyshev.flow(n, 0)?);
        let min = essential_min_check(0.0, &e, grid)?;
        let m0 = equilibrium_constant(0.0)?;
        run.check(
            format!("essential min chebyshev n={n} t=0"),
            min - m0,
            -slack.slack_chebyshev_t0,
            min >= m0 - slack.slack_chebyshev_t0,
        );
    }

    let mut table = Table::new(&["check", "observed", "threshold", "passed"]);
    for c in &run.checks {
        table.push(vec![
            c.name.clone(),
            c.observed.clone(),
            c.threshold.clone(),
            c.passed.to_string(),
        ]);
    }
    run.table("report", &table)
}
