//! Identity self-test of the special-function stack: the elementary
//! identities every closed form relies on, evaluated on log-spaced grids
//! with one pass/fail line each.

use std::process::ExitCode;

use hoplab_core::specfun::{
    complex_gamma, erfc, erfc_identity_params, exp_identity_params, fox_h, log_identity_params,
};
use num_complex::Complex64;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

struct Check {
    name: &'static str,
    worst: f64,
    pass: bool,
}

fn check_identity<F: Fn(f64) -> (f64, f64)>(name: &'static str, f: F) -> Check {
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for z in grid(1e-2, 10.0, 200) {
        let (got, want) = f(z);
        let err = (got - want).abs();
        let tol = 1e-8 * want.abs() + 1e-14;
        worst = worst.max(if want.abs() > 0.0 { err / want.abs() } else { err });
        if err > tol {
            pass = false;
        }
    }
    Check { name, worst, pass }
}

pub fn run() -> ExitCode {
    let mut checks = Vec::new();

    let exp_params = exp_identity_params();
    checks.push(check_identity("fox_h exp identity", |z| {
        (fox_h(&exp_params, z).unwrap_or(f64::NAN), (-z).exp())
    }));

    let erfc_params = erfc_identity_params();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    checks.push(check_identity("fox_h erfc identity", |z| {
        (fox_h(&erfc_params, z).unwrap_or(f64::NAN) / sqrt_pi, erfc(z.sqrt()))
    }));

    let log_params = log_identity_params();
    checks.push(check_identity("fox_h log identity", |z| {
        (fox_h(&log_params, z).unwrap_or(f64::NAN), (1.0 + z).ln())
    }));

    // Gamma recurrence on a complex grid.
    {
        let mut worst: f64 = 0.0;
        let mut pass = true;
        for i in 0..10 {
            for j in 0..10 {
                let z = Complex64::new(-4.3 + i as f64, -4.7 + 1.05 * j as f64);
                match (complex_gamma(z + 1.0), complex_gamma(z)) {
                    (Ok(g1), Ok(g0)) => {
                        let rel = (g1 - z * g0).norm() / g1.norm();
                        worst = worst.max(rel);
                        if rel > 1e-12 {
                            pass = false;
                        }
                    }
                    _ => pass = false,
                }
            }
        }
        checks.push(Check { name: "gamma recurrence", worst, pass });
    }

    // Reflection formula on real non-integers.
    {
        let mut worst: f64 = 0.0;
        let mut pass = true;
        let pi = std::f64::consts::PI;
        for k in 0..40 {
            let z = -4.95 + 0.25 * k as f64;
            if (z - z.round()).abs() < 1e-9 {
                continue;
            }
            let lhs = complex_gamma(Complex64::new(z, 0.0)).unwrap()
                * complex_gamma(Complex64::new(1.0 - z, 0.0)).unwrap()
                * (pi * z).sin()
                / pi;
            let err = (lhs - Complex64::new(1.0, 0.0)).norm();
            worst = worst.max(err);
            if err > 1e-10 {
                pass = false;
            }
        }
        checks.push(Check { name: "gamma reflection", worst, pass });
    }

    let mut all_pass = true;
    for c in &checks {
        println!(
            "[{}] {:<24} worst relative error {:.2e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.worst
        );
        all_pass &= c.pass;
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
