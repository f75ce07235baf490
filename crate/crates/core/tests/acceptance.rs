//! Acceptance criteria. Run with `cargo test --test acceptance`; prints one line per
//! criterion and exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vtcp_core::classes::{
    analyze, certificate_admissible, is_violation_value, violation_functional, Outcome, SearchConfig,
    Subject, TensorClass, TensorPair,
};
use vtcp_core::solvers::{
    boundedness_probe, residual, residual_jacobian, solve, solve_mtensor, solve_newton, verify_solution,
    Method, SolverConfig, Status, VtcpInstance,
};
use vtcp_core::tensor::vector::inf_dist;
use vtcp_core::workbench::{generate_instance, generate_pair, registry, reproduce_all, GenKind};
use vtcp_core::DenseTensor;

const SOLUTION_TOL: f64 = 1e-8;
const UNIQUE_DIAMETER: f64 = 1e-6;
const VERIFY_TOL: f64 = 1e-8;
const MTENSOR_PASS_RATE: f64 = 0.95;
const BOUND_RADIUS: f64 = 5.0;
const FD_REL_TOL: f64 = 1e-6;
const PRODUCT_TOL: f64 = 1e-12;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn images_equal(id: &str, x: &[f64], first: &[f64], second: &[f64]) -> std::result::Result<(), String> {
    let (g, f) = registry::pair(id).map_err(fail)?.images(x).map_err(fail)?;
    ensure(
        g == first && f == second,
        format!("{id} at {x:?}: got {g:?} / {f:?}, expected {first:?} / {second:?}"),
    )
}

fn products_equal(id: &str, x: &[f64], expected: &[f64]) -> std::result::Result<(), String> {
    let (g, f) = registry::pair(id).map_err(fail)?.images(x).map_err(fail)?;
    let p: Vec<f64> = g.iter().zip(&f).map(|(a, b)| a * b).collect();
    ensure(p == expected, format!("{id} at {x:?}: products {p:?}, expected {expected:?}"))
}

fn exact_values() -> Check {
    images_equal("3.2", &[-1.0, -1.0], &[-1.0, -2.0], &[-5.0, -3.0])?;
    products_equal("3.3", &[1.0, 1.0], &[0.0, -8.0])?;
    products_equal("3.5", &[1.0, -1.0], &[-1.0, -2.0])?;
    images_equal("4.2", &[1.0, 2.0], &[1.0, 3.0], &[1.0, 1.0])?;
    Ok("4 printed evaluations match exactly".into())
}

fn class_suite() -> Check {
    let out = Command::new(env!("CARGO_BIN_EXE_vtcp"))
        .args(["reproduce", "--all", "--seed", "0", "--starts", "200", "--json"])
        .env_remove("VTCP_SEED")
        .output()
        .map_err(fail)?;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(fail)?;
    let failures = report["failures"].as_array().cloned().unwrap_or_default();
    let facts: usize = report["examples"]
        .as_array()
        .map(|e| e.iter().map(|r| r["facts"].as_array().map_or(0, |f| f.len())).sum())
        .unwrap_or(0);
    ensure(
        out.status.success() && failures.is_empty() && facts > 0,
        format!("exit {:?}, failures {failures:?}", out.status.code()),
    )?;
    Ok(format!("{facts} registered facts reproduced by `vtcp reproduce --all`"))
}

fn solver_agreement() -> Check {
    let cfg = SolverConfig::default();
    let cases = [
        ("4.1", vec![2.0, 1.0], vec![Method::Newton, Method::Homotopy, Method::Oracle]),
        (
            "4.2",
            vec![2.0, 1.0 + 7f64.sqrt()],
            vec![Method::Newton, Method::Homotopy, Method::Mtensor, Method::Oracle],
        ),
    ];
    let mut runs = 0;
    for (id, expected, methods) in cases {
        let inst = registry::instance(id).map_err(fail)?;
        for method in methods {
            let r = solve(&inst, method, None, &cfg).map_err(fail)?;
            let x = if method == Method::Oracle {
                let positive: Vec<&Vec<f64>> = r
                    .solutions
                    .iter()
                    .filter(|s| id == "4.1" || s.iter().all(|&v| v > 0.0))
                    .collect();
                ensure(positive.len() == 1, format!("{id} oracle: {:?}", r.solutions))?;
                positive[0].clone()
            } else {
                ensure(r.converged(), format!("{id} {method}: {:?}", r.status))?;
                r.x.clone()
            };
            ensure(
                inf_dist(&x, &expected) <= SOLUTION_TOL,
                format!("{id} {method}: {x:?} vs {expected:?}"),
            )?;
            if method == Method::Mtensor {
                ensure(
                    !r.path.is_empty() && r.path.iter().flatten().all(|&v| v > 0.0),
                    format!("{id} mtensor iterates not positive: {:?}", r.path),
                )?;
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} solver runs within {SOLUTION_TOL:e}"))
}

fn uniqueness() -> Check {
    let pair = registry::pair("3.6").map_err(fail)?;
    let cfg = SolverConfig::default();
    let mut converged = 0;
    let mut widest: f64 = 0.0;
    for k in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k);
        let q1: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let q2: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let inst = VtcpInstance::new(pair.clone(), q1.clone(), q2.clone()).map_err(fail)?;
        let mut points: Vec<Vec<f64>> = Vec::new();
        for _ in 0..100 {
            let x0: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..=3.0)).collect();
            let r = solve_newton(&inst, &x0, &cfg).map_err(fail)?;
            if r.converged() {
                points.push(r.x);
            }
        }
        ensure(!points.is_empty(), format!("q1 {q1:?}, q2 {q2:?}: no run converged"))?;
        let diam = points
            .iter()
            .flat_map(|a| points.iter().map(move |b| inf_dist(a, b)))
            .fold(0.0, f64::max);
        ensure(
            diam <= UNIQUE_DIAMETER,
            format!("q1 {q1:?}, q2 {q2:?}: converged points spread {diam:e}"),
        )?;
        widest = widest.max(diam);
        converged += points.len();
    }
    Ok(format!("{converged}/2000 runs converged; widest cluster {widest:.1e}"))
}

fn z_semipositive_solves() -> Check {
    let cfg = SolverConfig::default();
    let total = 50;
    let mut passed = 0;
    for seed in 0..total as u64 {
        let order = 3 + (seed % 2) as usize;
        let dim = 2 + ((seed / 2) % 2) as usize;
        let inst = generate_instance(GenKind::ZSemipositivePair, order, dim, seed, None).map_err(fail)?;
        ensure(
            inst.q1().iter().chain(inst.q2()).all(|&v| v < 0.0),
            format!("seed {seed}: q not negative"),
        )?;
        let r = solve_mtensor(&inst, &cfg).map_err(fail)?;
        let ok = r.converged()
            && r.x.iter().all(|&v| v > 0.0)
            && verify_solution(&inst, &r.x, VERIFY_TOL).map_err(fail)?.passed;
        if ok {
            passed += 1;
        } else {
            ensure(
                r.status == Status::MaxIters,
                format!("seed {seed} (order {order}, dim {dim}): {:?} at {:?}", r.status, r.x),
            )?;
        }
    }
    let rate = passed as f64 / total as f64;
    ensure(rate >= MTENSOR_PASS_RATE, format!("only {passed}/{total} passed"))?;
    Ok(format!("{passed}/{total} positive verified solutions"))
}

fn boundedness() -> Check {
    let cfg = SolverConfig {
        oracle_radius: BOUND_RADIUS,
        ..Default::default()
    };
    let zero = DenseTensor::zeros(3, 2).map_err(fail)?;
    let zero_pair = TensorPair::new(zero.clone(), zero).map_err(fail)?;
    let r = boundedness_probe(&zero_pair, &[(vec![0.0; 2], vec![0.0; 2])], &cfg).map_err(fail)?;
    ensure(
        !r.bounded && r.escaping_ray.is_some(),
        format!("zero pair not flagged: {r:?}"),
    )?;

    let levels = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let grid: Vec<(Vec<f64>, Vec<f64>)> = levels
        .iter()
        .flat_map(|&a| levels.iter().map(move |&b| (vec![a, b], vec![b, a])))
        .collect();
    let mut worst: f64 = 0.0;
    for id in ["3.1", "3.3"] {
        let pair = registry::pair(id).map_err(fail)?;
        let r = boundedness_probe(&pair, &grid, &cfg).map_err(fail)?;
        ensure(
            r.bounded && r.escaping_ray.is_none() && r.max_norm < BOUND_RADIUS,
            format!("{id}: bounded {}, max norm {}, ray {:?}", r.bounded, r.max_norm, r.escaping_ray),
        )?;
        worst = worst.max(r.max_norm);
    }
    Ok(format!(
        "zero pair escapes along a ray; 3.1 and 3.3 bounded on 25 q each (max norm {worst:.3})"
    ))
}

fn random_tensor(rng: &mut ChaCha8Rng, order: usize, dim: usize) -> DenseTensor {
    DenseTensor::from_fn(order, dim, |_| rng.random_range(-1.0..=1.0)).unwrap()
}

fn central_difference(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect());
    }
    cols
}

fn relative_gap(j: &nalgebra::DMatrix<f64>, cols: &[Vec<f64>]) -> f64 {
    let mut diff = 0.0;
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            diff += (j[(r, c)] - v).powi(2);
        }
    }
    diff.sqrt() / j.norm()
}

fn numerical_consistency() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-5;
    let mut worst_power: f64 = 0.0;
    for case in 0..100 {
        let order = rng.random_range(2..=4);
        let dim = rng.random_range(1..=4);
        let a = random_tensor(&mut rng, order, dim);
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let j = a.power_jacobian(&x).map_err(fail)?;
        let fd = central_difference(|y| a.power_apply(y).unwrap(), &x, h);
        let gap = relative_gap(&j, &fd);
        ensure(gap <= FD_REL_TOL, format!("power jacobian case {case}: relative gap {gap:e}"))?;
        worst_power = worst_power.max(gap);
    }

    let mut worst_residual: f64 = 0.0;
    let mut case = 0;
    while case < 100 {
        let order = rng.random_range(2..=4);
        let dim = rng.random_range(1..=3);
        let pair = TensorPair::new(random_tensor(&mut rng, order, dim), random_tensor(&mut rng, order, dim))
            .map_err(fail)?;
        let q1: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let q2: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let inst = VtcpInstance::new(pair, q1, q2).map_err(fail)?;
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let (g, f) = inst.branches(&x).map_err(fail)?;
        if g.iter().zip(&f).any(|(a, b)| (a - b).abs() <= 1e-3) {
            continue;
        }
        let j = residual_jacobian(&inst, &x).map_err(fail)?.matrix;
        let fd = central_difference(|y| residual(&inst, y).unwrap(), &x, h);
        let gap = relative_gap(&j, &fd);
        ensure(gap <= FD_REL_TOL, format!("residual jacobian case {case}: relative gap {gap:e}"))?;
        worst_residual = worst_residual.max(gap);
        case += 1;
    }

    let mut worst_product: f64 = 0.0;
    for case in 0..100 {
        let (ma, mb, mc) = (rng.random_range(2..=3), rng.random_range(2..=3), rng.random_range(2..=3));
        let a = random_tensor(&mut rng, ma, 2);
        let a2 = random_tensor(&mut rng, ma, 2);
        let b = random_tensor(&mut rng, mb, 2);
        let c = random_tensor(&mut rng, mc, 2);
        let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let xt = DenseTensor::new(1, 2, x.clone()).map_err(fail)?;
        let prod = |p: &DenseTensor, q: &DenseTensor| p.shao_product(q).unwrap();
        let sum = |p: &DenseTensor, q: &DenseTensor| p.try_add(q).unwrap();
        let apply_gap = {
            let lhs = sum(&a, &a2).power_apply(&x).map_err(fail)?;
            let (l, r) = (a.power_apply(&x).map_err(fail)?, a2.power_apply(&x).map_err(fail)?);
            lhs.iter().zip(l.iter().zip(&r)).map(|(s, (p, q))| (s - p - q).abs()).fold(0.0, f64::max)
        };
        let gaps = [
            prod(&prod(&a, &b), &c).max_abs_diff(&prod(&a, &prod(&b, &c))).map_err(fail)?,
            prod(&prod(&a, &b), &xt).max_abs_diff(&prod(&a, &prod(&b, &xt))).map_err(fail)?,
            prod(&sum(&a, &a2), &b).max_abs_diff(&sum(&prod(&a, &b), &prod(&a2, &b))).map_err(fail)?,
            apply_gap,
        ];
        for g in gaps {
            ensure(g <= PRODUCT_TOL, format!("product identity case {case}: gap {g:e}"))?;
            worst_product = worst_product.max(g);
        }
    }
    Ok(format!(
        "max relative gaps: power {worst_power:.1e}, residual {worst_residual:.1e}; product identities {worst_product:.1e}"
    ))
}

fn certificate_soundness() -> Check {
    let search = SearchConfig::default();
    let mut pair_checked = 0;
    let mut tensor_checked = 0;
    let mut check_pair = |pair: &TensorPair, class: TensorClass, outcome: &Outcome| -> std::result::Result<(), String> {
        if let Outcome::Violated { certificate, .. } = outcome {
            let v = violation_functional(pair, class, certificate).map_err(fail)?;
            ensure(
                certificate_admissible(class, certificate, &search) && is_violation_value(v, search.tol_cert),
                format!("{class} certificate {certificate:?} evaluates to {v:e}"),
            )?;
            pair_checked += 1;
        }
        Ok(())
    };

    for report in reproduce_all(&search, &SolverConfig::default()).map_err(fail)? {
        let pair = registry::pair(&report.id).map_err(fail)?;
        for fact in &report.facts {
            for v in &fact.verdicts {
                if v.class.is_pair_universal() {
                    check_pair(&pair, v.class, &v.outcome)?;
                } else if v.is_violated() {
                    let ok = [Subject::Tensor(&pair.a1), Subject::Tensor(&pair.a2)]
                        .into_iter()
                        .any(|s| v.reverify(s, &search).unwrap_or(false));
                    ensure(ok, format!("{} {} verdict does not re-verify", report.id, v.class))?;
                    tensor_checked += 1;
                }
            }
        }
    }

    let mut pairs: Vec<TensorPair> = registry::EXAMPLE_IDS
        .iter()
        .map(|id| registry::pair(id).unwrap())
        .collect();
    for seed in 0..10 {
        pairs.push(generate_pair(GenKind::RandomDensePair, 3 + seed as usize % 2, 2, seed, None).map_err(fail)?);
    }
    let mut classes = TensorClass::PAIR_UNIVERSAL.to_vec();
    classes.extend([TensorClass::ZTensor, TensorClass::RTensor, TensorClass::StrongM]);
    for pair in &pairs {
        for tv in analyze(pair, &classes, &search).map_err(fail)? {
            if tv.verdict.class.is_pair_universal() {
                check_pair(pair, tv.verdict.class, &tv.verdict.outcome)?;
            } else if tv.verdict.is_violated() {
                ensure(
                    tv.reverify(pair, &search).map_err(fail)?,
                    format!("{} verdict on {:?} does not re-verify", tv.verdict.class, tv.target),
                )?;
                tensor_checked += 1;
            }
        }
    }
    ensure(pair_checked > 0, "no violated pair verdicts were produced")?;
    Ok(format!(
        "{pair_checked} pair-class and {tensor_checked} single-tensor violations re-verified"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact worked-example values", exact_values),
        ("class suite", class_suite),
        ("solver agreement", solver_agreement),
        ("uniqueness on a strong VP pair", uniqueness),
        ("Z-tensor semi-positive pairs", z_semipositive_solves),
        ("boundedness", boundedness),
        ("numerical consistency", numerical_consistency),
        ("certificate soundness", certificate_soundness),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why} ({secs:.2}s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
