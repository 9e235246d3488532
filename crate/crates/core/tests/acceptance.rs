//! Acceptance criteria, one test per criterion.
//!
//! Each test prints a single `criterion N ... PASS|FAIL` line with the
//! observed values.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeroflow_core::bounds::{
    binomial_rate, contour_lower_bound, ellipse_min_brute, ellipse_min_log_distance,
    lower_bound_inequality_check, optimal_contour_parameter, optimal_contour_parameter_search,
    stirling_constant, verify_flow_bound,
};
use zeroflow_core::measures::{ks_distance, EmpiricalMeasure, LimitMeasure};
use zeroflow_core::polyflow::{
    chebyshev_roots, derivative_roots, flow, jacobi_roots, sample_arcsine_roots, DerivativeFlow,
    Generator, RootMultiset,
};
use zeroflow_core::potential::{equilibrium_constant, u_phi_infinity, verify_equilibrium};

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    // straight to the handle, so the line shows up without --nocapture
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id} [{name}] ... {verdict} ({detail})");
}

fn t_grid() -> Vec<f64> {
    (0..10).map(|i| f64::from(i) / 10.0).collect()
}

#[test]
fn criterion_1_jacobi_oracle() {
    const TOL: f64 = 1e-9;
    let params = [0.0, 0.4, -0.4];
    let mut worst: f64 = 0.0;
    for n in [20usize, 50, 100, 200] {
        let k = n / 2;
        for &alpha in &params {
            for &beta in &params {
                let rec = Generator::Jacobi { alpha, beta }.flow(n, k).unwrap();
                let oracle = jacobi_roots(n - k, alpha + k as f64, beta + k as f64).unwrap();
                assert_eq!(rec.state.degree(), oracle.degree());
                assert_eq!(rec.state.distinct(), oracle.distinct());
                for (a, b) in rec.state.locations().zip(oracle.locations()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
    }
    let pass = worst <= TOL;
    report(
        1,
        "Jacobi oracle",
        pass,
        format!("max atomwise error {worst:.3e}, tol {TOL:e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_limit_law_convergence() {
    const TREND_SLACK: f64 = 0.005;
    const FINAL_MAX: f64 = 0.03;
    let ts = [0.2, 0.5, 0.8];
    let ns = [100usize, 200, 400, 800];
    // ks[t][n]
    let mut ks = vec![vec![0.0; ns.len()]; ts.len()];
    for (j, &n) in ns.iter().enumerate() {
        let targets: Vec<usize> = ts.iter().map(|t| (t * n as f64).round() as usize).collect();
        let last = *targets.iter().max().unwrap();
        for (k, state) in DerivativeFlow::new(chebyshev_roots(n).unwrap())
            .take(last + 1)
            .enumerate()
        {
            let state = state.unwrap();
            for (i, &target) in targets.iter().enumerate() {
                if k == target {
                    let e = EmpiricalMeasure::from_roots(&state, n).unwrap();
                    ks[i][j] = ks_distance(&e, &LimitMeasure::new(ts[i]).unwrap()).unwrap();
                }
            }
        }
    }
    let mut pass = true;
    let mut detail = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        let row = &ks[i];
        let monotone = row.windows(2).all(|w| w[1] <= w[0] + TREND_SLACK);
        let final_ok = row[ns.len() - 1] <= FINAL_MAX;
        pass &= monotone && final_ok;
        detail.push(format!(
            "t={t}: {}",
            row.iter()
                .map(|v| format!("{v:.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    report(
        2,
        "limit-law convergence",
        pass,
        format!("KS at n=100,200,400,800 -> {}", detail.join("; ")),
    );
    assert!(pass);
}

#[test]
fn criterion_3_equilibrium_characterization() {
    const TOL: f64 = 1e-7;
    let mut worst_in: f64 = 0.0;
    let mut worst_out = f64::INFINITY;
    let mut pass = true;
    for t in t_grid() {
        let rep = verify_equilibrium(t, 1001, TOL, TOL).unwrap();
        pass &= rep.passed;
        worst_in = worst_in.max(rep.max_abs_deviation_on_support);
        if let Some(v) = rep.min_slack_off_support {
            worst_out = worst_out.min(v);
        }
        if t > 0.0 {
            pass &= rep.min_slack_off_support.is_some();
        }
    }
    report(
        3,
        "equilibrium characterization",
        pass,
        format!("max |U+phi-m| on support {worst_in:.3e}, min off-support slack {worst_out:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_constant_cross_derivation() {
    let mut worst: f64 = 0.0;
    for t in t_grid() {
        let s = (1.0 - t * t).sqrt();
        // u_phi_infinity itself fails if closed form and quadrature differ by > 1e-8
        let u = u_phi_infinity(t).unwrap();
        let m = equilibrium_constant(t).unwrap();
        worst = worst.max((m - (u + (1.0 - t) * (2.0 / s).ln())).abs());
    }
    let pass = worst <= 1e-10;
    report(
        4,
        "constant cross-derivation",
        pass,
        format!(
            "max |m - u_phi(inf) - (1-t)log(2/s)| {worst:.3e}; closed vs quadrature within 1e-8"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_ellipse_optimization() {
    let mut worst_brute: f64 = 0.0;
    let mut worst_identity: f64 = 0.0;
    for i in 1..=50 {
        let a = 1.0 + 4.0 * f64::from(i) / 50.0;
        for j in 0..50 {
            let zeta = -1.0 + 2.0 * f64::from(j) / 49.0;
            let closed = ellipse_min_log_distance(a, zeta).unwrap();
            let brute = ellipse_min_brute(a, zeta, 4096).unwrap();
            worst_brute = worst_brute.max((closed - brute).abs());
            worst_identity = worst_identity.max(lower_bound_inequality_check(a, zeta).abs());
        }
    }
    let mut worst_a: f64 = 0.0;
    for i in 1..10 {
        let t = f64::from(i) / 10.0;
        let searched = optimal_contour_parameter_search(t).unwrap();
        worst_a = worst_a.max((searched - 1.0 / (1.0 - t * t).sqrt()).abs());
        // the searched A really maximises the bound
        let at = |a: f64| contour_lower_bound(t, 0.0, a).unwrap();
        assert!(
            at(searched) >= at(searched * 1.01)
                && at(searched) >= at(1.0 + (searched - 1.0) * 0.99)
        );
    }
    let pass = worst_brute <= 1e-7 && worst_identity <= 1e-13 && worst_a <= 1e-6;
    report(
        5,
        "ellipse optimization",
        pass,
        format!(
            "closed vs brute {worst_brute:.3e}, identity {worst_identity:.3e}, optimal A {worst_a:.3e}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_stirling_constant() {
    let mut pass = true;
    let mut worst_ratio: f64 = 0.0;
    for n in [100u64, 1_000, 10_000] {
        let envelope = 2.0 * (n as f64).ln() / n as f64;
        for i in 1..10 {
            let t = f64::from(i) / 10.0;
            let k = (t * n as f64).floor() as u64;
            let err = (binomial_rate(n, k).unwrap() + stirling_constant(t).unwrap()).abs();
            pass &= err <= envelope;
            worst_ratio = worst_ratio.max(err / envelope);
        }
    }
    report(
        6,
        "Stirling constant",
        pass,
        format!("max |rate + c_t| / (2 log n / n) = {worst_ratio:.3}"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_finite_n_contour_bound() {
    const MIN_SLACK: f64 = -0.02;
    const TREND_TOL: f64 = 0.01;
    let zetas = [-0.5, 0.0, 0.5];
    let a = optimal_contour_parameter(0.5).unwrap();
    let slacks: Vec<Vec<f64>> = [(200usize, 100usize), (400, 200)]
        .iter()
        .map(|&(n, k)| {
            let rec = Generator::Chebyshev.flow(n, k).unwrap();
            verify_flow_bound(&rec, a, &zetas)
                .unwrap()
                .iter()
                .map(|r| r.slack)
                .collect()
        })
        .collect();
    let floor_ok = slacks.iter().flatten().all(|&s| s >= MIN_SLACK);
    let trend_ok = slacks[1]
        .iter()
        .zip(&slacks[0])
        .all(|(big, small)| *big >= small - TREND_TOL);
    let pass = floor_ok && trend_ok;
    report(
        7,
        "finite-n contour bound",
        pass,
        format!(
            "slack n=200 {:?}, n=400 {:?}",
            fmt(&slacks[0]),
            fmt(&slacks[1])
        ),
    );
    assert!(pass);
}

fn fmt(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| format!("{x:.4}")).collect()
}

#[test]
fn criterion_8_mass_and_density() {
    let mut worst_mass: f64 = 0.0;
    let mut worst_deriv: f64 = 0.0;
    let mut pass = true;
    for t in t_grid() {
        let m = LimitMeasure::new(t).unwrap();
        let mass = m.mass_between_angles(-FRAC_PI_2, FRAC_PI_2).unwrap();
        worst_mass = worst_mass.max((mass - (1.0 - t)).abs());
        worst_mass = worst_mass.max((m.cdf(m.s()).unwrap() - (1.0 - t)).abs());
        let s = m.s();
        if t > 0.0 {
            pass &= m.density(s).unwrap() == 0.0 && m.density(-s).unwrap() == 0.0;
        }
        let mut prev = 0.0;
        for i in 0..=2000 {
            let x = -1.0 + f64::from(i) / 1000.0;
            let d = m.density(x).unwrap();
            pass &= d >= 0.0;
            let c = m.cdf(x).unwrap();
            pass &= c >= prev - 1e-15;
            prev = c;
            if x.abs() <= 0.9 * s {
                let h = 1e-5;
                let fd = (m.cdf(x + h).unwrap() - m.cdf(x - h).unwrap()) / (2.0 * h);
                worst_deriv = worst_deriv.max((fd - d).abs());
            }
        }
    }
    pass &= worst_mass <= 1e-9 && worst_deriv <= 1e-5;
    report(
        8,
        "mass and density",
        pass,
        format!("mass error {worst_mass:.3e}, CDF derivative vs density {worst_deriv:.3e}"),
    );
    assert!(pass);
}

/// Counts violations of the structural rules for one derivative step.
fn step_violations(input: &RootMultiset, output: &RootMultiset) -> usize {
    let mut bad = 0;
    if output.degree() + 1 != input.degree() {
        bad += 1;
    }
    let (lo, hi) = (input.min_location(), input.max_location());
    if output.locations().any(|x| x < lo || x > hi) {
        bad += 1;
    }
    for w in input.roots().windows(2) {
        let inside = output
            .roots()
            .iter()
            .filter(|r| r.location > w[0].location && r.location < w[1].location)
            .collect::<Vec<_>>();
        if inside.len() != 1 || inside[0].multiplicity != 1 {
            bad += 1;
        }
    }
    for r in input.roots() {
        let kept = output.roots().iter().find(|o| o.location == r.location);
        match (r.multiplicity, kept) {
            (1, None) => {}
            (m, Some(o)) if m >= 2 && o.multiplicity == m - 1 => {}
            _ => bad += 1,
        }
    }
    bad
}

#[test]
fn criterion_9_flow_structural_invariants() {
    const TRIALS: u64 = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut violations = 0usize;
    let mut steps = 0usize;
    for trial in 0..TRIALS {
        let n = rng.random_range(2..=24usize);
        let base = sample_arcsine_roots(n, trial).unwrap();
        let input = match trial % 3 {
            // plain sample
            0 => base,
            // symmetrised sample
            1 => RootMultiset::from_locations(base.locations().flat_map(|x| [x, -x])).unwrap(),
            // repeated zeros
            _ => RootMultiset::new(base.locations().map(|x| (x, rng.random_range(1..=3u32))))
                .unwrap(),
        };
        let symmetric = input.is_symmetric(0.0);
        let mut current = input;
        while current.degree() >= 2 {
            let next = derivative_roots(&current).unwrap();
            violations += step_violations(&current, &next);
            if symmetric && !next.is_symmetric(1e-12) {
                violations += 1;
            }
            steps += 1;
            current = next;
        }
        let rec = flow(&sample_arcsine_roots(n, trial).unwrap(), n - 1).unwrap();
        if rec.state.degree() != 1 {
            violations += 1;
        }
    }
    let pass = violations == 0;
    report(
        9,
        "flow structural invariants",
        pass,
        format!("{TRIALS} trials, {steps} derivative steps, {violations} violations"),
    );
    assert!(pass);
}

#[test]
fn sanity_arcsine_potential_used_by_the_suite() {
    // keeps the closed-form pieces the criteria rely on honest
    let m0 = LimitMeasure::new(0.0).unwrap();
    let v = zeroflow_core::potential::potential_mu_t(&m0, Complex64::new(0.0, 1.0)).unwrap();
    let expected = 2f64.ln() - (1.0 + 2f64.sqrt()).ln();
    assert!((v - expected).abs() < 1e-9);
}
