//! Single-tensor structure (Z, R, strong M) and the existential semi-positive check.

use nalgebra::DMatrix;
use rand::Rng;

use super::search::{lattice, pattern_search, MAX_LATTICE_DIM};
use super::{Certificate, ClassVerdict, Outcome, SearchConfig, TensorClass, TensorPair};
use crate::error::{check_dims, Result, VtcpError};
use crate::numeric::{newton, substream, NewtonOptions, NewtonStatus};
use crate::tensor::vector::inf_norm;
use crate::tensor::DenseTensor;

/// Largest dimension for which every support of the R-system is enumerated.
const R_SUPPORT_ENUM_DIM: usize = 3;
/// Newton starts per support when solving the equal-value system.
const R_SUPPORT_STARTS: u64 = 12;
/// Offset separating R-system substreams from the random-start substreams.
const R_STREAM_BASE: u64 = 1 << 32;

pub fn first_positive_off_diagonal(t: &DenseTensor) -> Option<(Vec<usize>, f64)> {
    let mut found = None;
    t.for_each_entry(|idx, a| {
        if found.is_none() && a > 0.0 && idx.windows(2).any(|w| w[0] != w[1]) {
            found = Some((idx.to_vec(), a));
        }
    });
    found
}

/// Every off-diagonal entry is `<= 0`.
pub fn is_z_tensor(t: &DenseTensor) -> bool {
    first_positive_off_diagonal(t).is_none()
}

/// How far `(x, t)` is from solving the R-system
///
/// ```text
/// x >= 0, sum(x) = 1, t >= 0,
/// (A x^(m-1))_i + t = 0  where x_i > 0,
/// (A x^(m-1))_j + t >= 0 where x_j = 0.
/// ```
///
/// Returns the largest violation among all these conditions.
pub fn r_system_defect(a: &DenseTensor, x: &[f64], t: f64) -> Result<f64> {
    check_dims("R-system vector", a.dim(), x.len())?;
    if a.order() < 2 {
        return Err(VtcpError::Precondition(
            "R-tensor check needs order >= 2".into(),
        ));
    }
    let y = a.power_apply(x)?;
    let mut defect = (x.iter().sum::<f64>() - 1.0).abs().max(-t);
    for (xi, yi) in x.iter().zip(&y) {
        let d = if *xi < 0.0 {
            -xi
        } else if *xi > 0.0 {
            (yi + t).abs()
        } else {
            -(yi + t)
        };
        defect = defect.max(d);
    }
    Ok(if defect.is_finite() {
        defect.max(0.0)
    } else {
        f64::INFINITY
    })
}

/// Solves the equal-value system on `support`: `(Ax)_i = (Ax)_{s0}` for `i` in the support
/// and `sum x = 1`, with `x` zero off the support.
fn solve_on_support(
    a: &DenseTensor,
    support: &[usize],
    start: &[f64],
) -> Option<Vec<f64>> {
    let n = a.dim();
    let s = support.len();
    let embed = |z: &[f64]| {
        let mut x = vec![0.0; n];
        for (k, &i) in support.iter().enumerate() {
            x[i] = z[k];
        }
        x
    };
    let f = |z: &[f64]| -> Vec<f64> {
        let y = a.power_apply(&embed(z)).unwrap_or_else(|_| vec![f64::NAN; n]);
        let mut r: Vec<f64> = support[1..].iter().map(|&i| y[i] - y[support[0]]).collect();
        r.push(z.iter().sum::<f64>() - 1.0);
        r
    };
    let jac = |z: &[f64]| -> DMatrix<f64> {
        let j = a
            .power_jacobian(&embed(z))
            .unwrap_or_else(|_| DMatrix::zeros(n, n));
        let mut out = DMatrix::zeros(s, s);
        for (row, &i) in support[1..].iter().enumerate() {
            for (col, &c) in support.iter().enumerate() {
                out[(row, col)] = j[(i, c)] - j[(support[0], c)];
            }
        }
        for col in 0..s {
            out[(s - 1, col)] = 1.0;
        }
        out
    };
    let out = newton(
        f,
        jac,
        start,
        NewtonOptions {
            tol: 1e-14,
            max_iters: 60,
            shrink: 0.5,
            max_backtracks: 30,
        },
    );
    (out.status == NewtonStatus::Converged || out.residual_norm <= 1e-12).then(|| embed(&out.x))
}

/// Turns a support solution into an R-system certificate if it satisfies the sign
/// conditions, otherwise returns its defect.
fn r_candidate(
    a: &DenseTensor,
    x: Vec<f64>,
    support: &[usize],
    cfg: &SearchConfig,
) -> std::result::Result<(Vec<f64>, f64), f64> {
    let Ok(y) = a.power_apply(&x) else {
        return Err(f64::INFINITY);
    };
    let t = -y[support[0]];
    let defect = r_system_defect(a, &x, t).unwrap_or(f64::INFINITY);
    if support.iter().all(|&i| x[i] > 0.0) && defect <= cfg.tol_cert {
        Ok((x, t))
    } else {
        Err(defect)
    }
}

fn supports(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1..(1usize << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| s.len() <= max_size)
        .collect();
    out.sort_by_key(|s| s.len());
    out
}

/// Best penalty value of the complementarity form at a simplex point.
fn r_penalty(a: &DenseTensor, x: &[f64]) -> f64 {
    let Ok(y) = a.power_apply(x) else {
        return f64::INFINITY;
    };
    let t = (-y.iter().copied().fold(f64::INFINITY, f64::min)).max(0.0);
    x.iter()
        .zip(&y)
        .map(|(xi, yi)| xi * (yi + t))
        .fold(0.0, f64::max)
}

fn project_simplex(p: &mut [f64]) {
    for v in p.iter_mut() {
        *v = v.abs();
    }
    let s: f64 = p.iter().sum();
    if s > 0.0 {
        for v in p.iter_mut() {
            *v /= s;
        }
    }
}

/// Searches for a solution of the R-system; finding one proves `a` is not an R-tensor.
///
/// For `n <= 3` every support is tried: singletons exactly, larger supports by Newton on
/// the equal-value system from several starts. For larger `n`, singletons and pairs are
/// enumerated and a penalty search over the simplex covers the rest.
pub fn is_r_tensor(a: &DenseTensor, cfg: &SearchConfig) -> Result<ClassVerdict> {
    cfg.validate()?;
    if a.order() < 2 {
        return Err(VtcpError::Precondition(
            "R-tensor check needs order >= 2".into(),
        ));
    }
    let n = a.dim();
    let violated = |x: Vec<f64>, t: f64| ClassVerdict {
        class: TensorClass::RTensor,
        outcome: Outcome::Violated {
            certificate: Certificate::RSystem { x, t },
            value: -t,
            evaluation: None,
            boundary: t.abs() <= cfg.tol_cert,
        },
    };

    let max_size = if n <= R_SUPPORT_ENUM_DIM { n } else { 2 };
    let mut tried = 0;
    let mut best_value = f64::INFINITY;
    for (k, support) in supports(n, max_size).iter().enumerate() {
        if support.len() == 1 {
            tried += 1;
            let mut x = vec![0.0; n];
            x[support[0]] = 1.0;
            match r_candidate(a, x, support, cfg) {
                Ok((x, t)) => return Ok(violated(x, t)),
                Err(d) => best_value = best_value.min(d),
            }
            continue;
        }
        let s = support.len();
        let mut rng = substream(cfg.seed, R_STREAM_BASE + k as u64);
        for attempt in 0..R_SUPPORT_STARTS {
            tried += 1;
            let start: Vec<f64> = if attempt == 0 {
                vec![1.0 / s as f64; s]
            } else {
                let mut p: Vec<f64> = (0..s).map(|_| rng.random_range(0.01..1.0)).collect();
                project_simplex(&mut p);
                p
            };
            if let Some(x) = solve_on_support(a, support, &start) {
                match r_candidate(a, x, support, cfg) {
                    Ok((x, t)) => return Ok(violated(x, t)),
                    Err(d) => best_value = best_value.min(d),
                }
            }
        }
    }

    if n > R_SUPPORT_ENUM_DIM {
        let mut f = |p: &[f64]| {
            let mut q = p.to_vec();
            project_simplex(&mut q);
            r_penalty(a, &q)
        };
        for start in 0..cfg.num_starts {
            tried += 1;
            let mut rng = substream(cfg.seed, start as u64);
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let (mut p, _) = pattern_search(&mut f, &project_simplex, raw, 0.1, cfg.max_polish_iters, 0.0);
            project_simplex(&mut p);
            let support: Vec<usize> = (0..n).filter(|&i| p[i] > 1e-8).collect();
            if support.is_empty() {
                continue;
            }
            let start: Vec<f64> = support.iter().map(|&i| p[i]).collect();
            if let Some(x) = solve_on_support(a, &support, &start) {
                match r_candidate(a, x, &support, cfg) {
                    Ok((x, t)) => return Ok(violated(x, t)),
                    Err(d) => best_value = best_value.min(d),
                }
            }
        }
    }

    Ok(ClassVerdict {
        class: TensorClass::RTensor,
        outcome: Outcome::Undetermined {
            starts: tried,
            best_value,
        },
    })
}

/// Both images at `x` when `x > 0` and both images are strictly positive.
pub fn positive_witness_images(
    pair: &TensorPair,
    x: &[f64],
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    check_dims("witness", pair.dim(), x.len())?;
    if !x.iter().all(|&v| v > 0.0 && v.is_finite()) {
        return Ok(None);
    }
    let (g, f) = pair.images(x)?;
    let positive = |v: &[f64]| v.iter().all(|&c| c > 0.0);
    Ok((positive(&g) && positive(&f)).then_some((g, f)))
}

fn witness_score(pair: &TensorPair, x: &[f64]) -> f64 {
    match pair.images(x) {
        Ok((g, f)) => g.iter().chain(&f).copied().fold(f64::INFINITY, f64::min),
        Err(_) => f64::NEG_INFINITY,
    }
}

fn normalize_positive(p: &mut [f64]) {
    for v in p.iter_mut() {
        *v = v.abs().max(1e-6);
    }
    let s = inf_norm(p);
    for v in p.iter_mut() {
        *v /= s;
    }
}

/// Looks for `x > 0` with `A1 x^(m-1) > 0` and `A2 x^(m-1) > 0`.
///
/// Candidates, in order: the ones vector, the lattice `{1, 2, 3}^n`, seeded positive
/// samples, then compass search maximizing the smallest image component.
pub fn semi_positive_witness(pair: &TensorPair, cfg: &SearchConfig) -> Result<ClassVerdict> {
    cfg.validate()?;
    let n = pair.dim();
    let holds = |x: Vec<f64>, g: Vec<f64>, f: Vec<f64>| ClassVerdict {
        class: TensorClass::SemiPositive,
        outcome: Outcome::HoldsCertified {
            witness: Some(x),
            proof: "positive witness with positive images".into(),
            components: g.into_iter().chain(f).collect(),
        },
    };

    let mut candidates = vec![vec![1.0; n]];
    if n <= MAX_LATTICE_DIM {
        candidates.extend(lattice(n, &[1.0, 2.0, 3.0]));
    }
    let mut tried = 0;
    let mut best_value = f64::NEG_INFINITY;
    for x in candidates {
        tried += 1;
        best_value = best_value.max(witness_score(pair, &x));
        if let Some((g, f)) = positive_witness_images(pair, &x)? {
            return Ok(holds(x, g, f));
        }
    }

    let samples: Vec<Vec<f64>> = (0..cfg.num_starts)
        .map(|s| {
            let mut rng = substream(cfg.seed, s as u64);
            (0..n).map(|_| rng.random_range(0.0..cfg.box_radius)).collect()
        })
        .collect();
    for raw in &samples {
        let mut x = raw.clone();
        normalize_positive(&mut x);
        tried += 1;
        best_value = best_value.max(witness_score(pair, &x));
        if let Some((g, f)) = positive_witness_images(pair, &x)? {
            return Ok(holds(x, g, f));
        }
    }

    let mut objective = |p: &[f64]| {
        let mut x = p.to_vec();
        normalize_positive(&mut x);
        -witness_score(pair, &x)
    };
    for raw in samples {
        let (mut x, v) = pattern_search(
            &mut objective,
            &normalize_positive,
            raw,
            0.1,
            cfg.max_polish_iters,
            -1e-3,
        );
        best_value = best_value.max(-v);
        normalize_positive(&mut x);
        if let Some((g, f)) = positive_witness_images(pair, &x)? {
            return Ok(holds(x, g, f));
        }
    }

    Ok(ClassVerdict {
        class: TensorClass::SemiPositive,
        outcome: Outcome::Undetermined {
            starts: tried,
            best_value,
        },
    })
}

/// Z-tensor with a positive witness `x > 0`, `A x^(m-1) > 0`.
pub fn is_strong_m_tensor(a: &DenseTensor, cfg: &SearchConfig) -> Result<ClassVerdict> {
    if let Some((index, value)) = first_positive_off_diagonal(a) {
        return Ok(ClassVerdict {
            class: TensorClass::StrongM,
            outcome: Outcome::Violated {
                certificate: Certificate::OffDiagonal { index, value },
                value,
                evaluation: None,
                boundary: false,
            },
        });
    }
    let single = TensorPair::new(a.clone(), a.clone())?;
    let verdict = semi_positive_witness(&single, cfg)?;
    let outcome = match verdict.outcome {
        Outcome::HoldsCertified {
            witness,
            components,
            ..
        } => Outcome::HoldsCertified {
            witness,
            proof: "Z-tensor with a positive witness".into(),
            components: components[..a.dim()].to_vec(),
        },
        other => other,
    };
    Ok(ClassVerdict {
        class: TensorClass::StrongM,
        outcome,
    })
}

/// `D1 . A1 + D2 . A2` for nonnegative diagonal matrices given by their diagonals.
pub fn diag_combination(d1: &[f64], d2: &[f64], pair: &TensorPair) -> Result<DenseTensor> {
    check_dims("first diagonal", pair.dim(), d1.len())?;
    check_dims("second diagonal", pair.dim(), d2.len())?;
    if let Some(v) = d1.iter().chain(d2).find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(VtcpError::Precondition(format!(
            "diagonal entries must be finite and nonnegative, got {v}"
        )));
    }
    pair.a1.row_scaled(d1)?.try_add(&pair.a2.row_scaled(d2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::Subject;
    use crate::workbench::registry;

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    #[test]
    fn z_tensor_examples() {
        let p = registry::pair("4.2").unwrap();
        assert!(is_z_tensor(&p.a1) && is_z_tensor(&p.a2));
        assert!(is_z_tensor(&DenseTensor::unit(4, 3).unwrap()));
        let p = registry::pair("3.1").unwrap();
        assert_eq!(first_positive_off_diagonal(&p.a1), Some((vec![0, 0, 1], 3.0)));
    }

    #[test]
    fn r_tensor_examples() {
        let p = registry::pair("4.1").unwrap();
        assert!(is_r_tensor(&p.a2, &cfg()).unwrap().is_undetermined());
        assert!(is_r_tensor(&DenseTensor::unit(3, 2).unwrap(), &cfg())
            .unwrap()
            .is_undetermined());
        let zero = DenseTensor::zeros(3, 2).unwrap();
        let v = is_r_tensor(&zero, &cfg()).unwrap();
        assert!(v.is_violated());
        assert!(v.reverify(Subject::Tensor(&zero), &cfg()).unwrap());
    }

    #[test]
    fn r_system_on_a_two_point_support() {
        // -I: (Ax)_i = -x_i^2, equal on the full support at x = (1/2, 1/2), t = 1/4.
        let a = DenseTensor::unit(3, 2).unwrap().scaled(-1.0);
        let v = is_r_tensor(&a, &cfg()).unwrap();
        let Some(Certificate::RSystem { x, t }) = v.certificate() else {
            panic!("{v:?}");
        };
        assert_eq!(x, &vec![1.0, 0.0]);
        assert_eq!(*t, 1.0);
        assert!(r_system_defect(&a, &[0.5, 0.5], 0.25).unwrap() < 1e-15);
        assert!(r_system_defect(&a, &[0.5, 0.5], 0.3).unwrap() > 1e-3);
    }

    #[test]
    fn r_system_needs_a_nontrivial_support() {
        // Off-diagonal coupling makes singletons fail; x = (1/2, 1/2) with t = 0 works.
        let a = DenseTensor::from_fn(3, 2, |idx| match idx {
            [0, 0, 0] => 1.0,
            [0, 1, 1] => -1.0,
            [1, 1, 1] => 1.0,
            [1, 0, 0] => -1.0,
            _ => 0.0,
        })
        .unwrap();
        let v = is_r_tensor(&a, &cfg()).unwrap();
        let Some(Certificate::RSystem { x, t }) = v.certificate() else {
            panic!("{v:?}");
        };
        assert!((x[0] - 0.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12);
        assert!(t.abs() < 1e-12);
        assert!(v.reverify(Subject::Tensor(&a), &cfg()).unwrap());
    }

    #[test]
    fn semi_positive_witnesses() {
        let p = registry::pair("4.2").unwrap();
        let v = semi_positive_witness(&p, &cfg()).unwrap();
        assert_eq!(v.witness(), Some(&[1.0, 2.0][..]));
        let unit = DenseTensor::unit(3, 2).unwrap();
        let up = TensorPair::new(unit.clone(), unit.clone()).unwrap();
        assert_eq!(semi_positive_witness(&up, &cfg()).unwrap().witness(), Some(&[1.0, 1.0][..]));
        let neg = TensorPair::new(unit.scaled(-1.0), unit).unwrap();
        let small = SearchConfig {
            num_starts: 20,
            ..cfg()
        };
        assert!(semi_positive_witness(&neg, &small).unwrap().is_undetermined());
    }

    #[test]
    fn strong_m_checks() {
        let unit = DenseTensor::unit(3, 2).unwrap();
        let v = is_strong_m_tensor(&unit, &cfg()).unwrap();
        assert!(v.is_certified());
        assert!(v.reverify(Subject::Tensor(&unit), &cfg()).unwrap());

        let p = registry::pair("4.2").unwrap();
        let m = diag_combination(&[0.5, 0.5], &[0.5, 0.5], &p).unwrap();
        let v = is_strong_m_tensor(&m, &cfg()).unwrap();
        assert_eq!(v.witness(), Some(&[1.0, 2.0][..]));

        let p31 = registry::pair("3.1").unwrap();
        let v = is_strong_m_tensor(&p31.a1, &cfg()).unwrap();
        assert!(v.is_violated());
        assert!(v.reverify(Subject::Tensor(&p31.a1), &cfg()).unwrap());
    }

    #[test]
    fn diag_combination_rows() {
        let p = registry::pair("4.2").unwrap();
        let id = diag_combination(&[1.0, 1.0], &[0.0, 0.0], &p).unwrap();
        assert_eq!(id, p.a1);
        let half = diag_combination(&[0.5, 0.5], &[0.5, 0.5], &p).unwrap();
        for (k, v) in half.row(1).iter().enumerate() {
            assert_eq!(*v, (p.a1.row(1)[k] + p.a2.row(1)[k]) / 2.0);
        }
        assert!(is_z_tensor(&half));
        assert!(diag_combination(&[-1.0, 0.0], &[0.0, 0.0], &p).is_err());
    }
}
