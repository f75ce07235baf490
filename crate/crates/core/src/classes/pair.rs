use rand::Rng;
use rand_distr::StandardNormal;

use super::functional::{certificate_admissible, evaluate};
use super::search::{lattice, pattern_search};
use super::{Certificate, ClassVerdict, Outcome, SearchConfig, TensorClass, TensorPair};
use crate::error::{Result, VtcpError};
use crate::numeric::substream;
use crate::tensor::vector::{euclid_norm, inf_dist, inf_norm};
use crate::tensor::{distinct_count, distinct_indices, SymTensor};

/// Search space and normalization for one class.
///
/// Every functional is sign-invariant under positive rescaling of its point, so each
/// candidate is normalized before evaluation: unit Euclidean norm for vectors, unit
/// `‖diag(Z)‖∞` for symmetric tensors and unit `‖x - y‖∞` for vector pairs.
enum Space {
    Sphere,
    Orthant,
    Sym { order: usize, diag_pos: Vec<usize> },
    Pair,
}

impl Space {
    fn for_class(class: TensorClass, order: usize, dim: usize) -> Space {
        match class {
            TensorClass::Vp1 => Space::Orthant,
            TensorClass::Vp2 => {
                let sym_order = order - 1;
                let diag_pos = distinct_indices(sym_order, dim)
                    .iter()
                    .enumerate()
                    .filter(|(_, idx)| idx.windows(2).all(|w| w[0] == w[1]))
                    .map(|(r, _)| r)
                    .collect();
                Space::Sym {
                    order: sym_order,
                    diag_pos,
                }
            }
            TensorClass::StrongVp => Space::Pair,
            _ => Space::Sphere,
        }
    }

    fn coords(&self, dim: usize) -> usize {
        match self {
            Space::Sphere | Space::Orthant => dim,
            Space::Sym { order, .. } => distinct_count(*order, dim),
            Space::Pair => 2 * dim,
        }
    }

    fn sample(&self, rng: &mut impl Rng, dim: usize, radius: f64) -> Vec<f64> {
        let d = self.coords(dim);
        match self {
            Space::Sphere => (0..d).map(|_| rng.sample(StandardNormal)).collect(),
            Space::Orthant => (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal).abs())
                .collect(),
            Space::Sym { .. } | Space::Pair => {
                (0..d).map(|_| rng.random_range(-radius..=radius)).collect()
            }
        }
    }

    fn normalize(&self, p: &[f64], tol_diag: f64) -> Option<Vec<f64>> {
        let scale = match self {
            Space::Sphere | Space::Orthant => euclid_norm(p),
            Space::Sym { diag_pos, .. } => {
                let d = diag_pos.iter().fold(0.0_f64, |m, &r| m.max(p[r].abs()));
                if d < tol_diag * inf_norm(p) {
                    return None;
                }
                d
            }
            Space::Pair => {
                let n = p.len() / 2;
                let d = inf_dist(&p[..n], &p[n..]);
                if d < tol_diag * inf_norm(p) {
                    return None;
                }
                d
            }
        };
        if !(scale > 0.0 && scale.is_finite()) {
            return None;
        }
        Some(match self {
            Space::Orthant => p.iter().map(|v| v.abs() / scale).collect(),
            _ => p.iter().map(|v| v / scale).collect(),
        })
    }

    fn certificate(&self, p: &[f64], dim: usize) -> Result<Certificate> {
        Ok(match self {
            Space::Sphere | Space::Orthant => Certificate::Vector { x: p.to_vec() },
            Space::Sym { order, .. } => Certificate::Symmetric {
                z: SymTensor::new(*order, dim, p.to_vec())?,
            },
            Space::Pair => Certificate::VectorPair {
                x: p[..dim].to_vec(),
                y: p[dim..].to_vec(),
            },
        })
    }
}

fn violated(
    pair: &TensorPair,
    class: TensorClass,
    certificate: Certificate,
    cfg: &SearchConfig,
) -> Result<ClassVerdict> {
    let evaluation = evaluate(pair, class, &certificate)?;
    let value = evaluation.value;
    Ok(ClassVerdict {
        class,
        outcome: Outcome::Violated {
            certificate,
            value,
            boundary: value > -cfg.tol_cert,
            evaluation: Some(evaluation),
        },
    })
}

/// Searches for a counterexample to one of the universal pair classes.
///
/// Deterministic starts come first: every nonzero point of `{1, -1, 0}^d` (or `{1, 0}^d`
/// for VP-I) when `d` is small, evaluated unnormalized. Then `num_starts` seeded random
/// starts are each polished by compass search. The first admissible point whose
/// functional is `<= tol_cert` becomes the certificate.
///
/// Odd-order pairs are never of type strong VP: `G(x) = G(-x)` because `m - 1` is even, so
/// `(e_1, -e_1)` is returned directly.
pub fn check_pair_class(
    pair: &TensorPair,
    class: TensorClass,
    cfg: &SearchConfig,
) -> Result<ClassVerdict> {
    cfg.validate()?;
    if !class.is_pair_universal() {
        return Err(VtcpError::UnknownClass(class.to_string()));
    }
    let m = pair.order();
    let n = pair.dim();
    if m < 2 {
        return Err(VtcpError::Precondition(format!(
            "class {class} needs tensors of order >= 2, got {m}"
        )));
    }

    if class == TensorClass::StrongVp && m % 2 == 1 {
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        let y = x.iter().map(|v| -v).collect();
        return violated(pair, class, Certificate::VectorPair { x, y }, cfg);
    }

    let space = Space::for_class(class, m, n);
    let d = space.coords(n);
    let digits: &[f64] = match space {
        Space::Orthant => &[1.0, 0.0],
        _ => &[1.0, -1.0, 0.0],
    };
    let value_at = |cert: &Certificate| -> f64 {
        match evaluate(pair, class, cert) {
            Ok(e) if e.value.is_finite() => e.value,
            _ => f64::INFINITY,
        }
    };

    let mut evaluated = 0;
    let mut best_value = f64::INFINITY;
    let mut best_lattice: Option<(Certificate, f64)> = None;
    for p in lattice(d, digits) {
        let cert = space.certificate(&p, n)?;
        if !certificate_admissible(class, &cert, cfg) {
            continue;
        }
        evaluated += 1;
        let v = value_at(&cert);
        if v < best_value {
            best_value = v;
            best_lattice = Some((cert, v));
        }
    }
    if let Some((cert, v)) = best_lattice {
        if v <= cfg.tol_cert {
            return violated(pair, class, cert, cfg);
        }
    }

    let tol_diag = cfg.tol_diag;
    let mut objective = |p: &[f64]| -> f64 {
        match space.normalize(p, tol_diag) {
            Some(q) => space
                .certificate(&q, n)
                .map(|c| value_at(&c))
                .unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        }
    };
    let project = |p: &mut [f64]| {
        if let Some(q) = space.normalize(p, tol_diag) {
            p.copy_from_slice(&q);
        }
    };
    for start in 0..cfg.num_starts {
        let mut rng = substream(cfg.seed, start as u64);
        let raw = space.sample(&mut rng, n, cfg.box_radius);
        let (p, v) = pattern_search(
            &mut objective,
            &project,
            raw,
            0.25,
            cfg.max_polish_iters,
            -cfg.tol_cert,
        );
        evaluated += 1;
        best_value = best_value.min(v);
        if v <= cfg.tol_cert {
            if let Some(q) = space.normalize(&p, tol_diag) {
                let cert = space.certificate(&q, n)?;
                if super::verify_certificate(pair, class, &cert, cfg)? {
                    return violated(pair, class, cert, cfg);
                }
            }
        }
    }

    Ok(ClassVerdict {
        class,
        outcome: Outcome::Undetermined {
            starts: evaluated,
            best_value,
        },
    })
}
