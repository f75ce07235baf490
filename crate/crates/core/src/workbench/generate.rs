//! Seeded instance generators.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::registry;
use crate::classes::TensorPair;
use crate::error::{Result, VtcpError};
use crate::solvers::VtcpInstance;
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    ZSemipositivePair,
    RandomDensePair,
    PaperExample,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::ZSemipositivePair => "z-semipositive-pair",
            GenKind::RandomDensePair => "random-dense-pair",
            GenKind::PaperExample => "paper-example",
        })
    }
}

impl FromStr for GenKind {
    type Err = VtcpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z-semipositive-pair" => Ok(GenKind::ZSemipositivePair),
            "random-dense-pair" => Ok(GenKind::RandomDensePair),
            "paper-example" => Ok(GenKind::PaperExample),
            _ => Err(VtcpError::Unknown {
                kind: "generator kind",
                name: s.into(),
            }),
        }
    }
}

fn check_shape(order: usize, dim: usize) -> Result<()> {
    if order < 2 || dim == 0 {
        return Err(VtcpError::Precondition(format!(
            "generators need order >= 2 and dim >= 1, got order {order}, dim {dim}"
        )));
    }
    Ok(())
}

/// A Z-tensor whose rows satisfy `(A 1^(m-1))_i = (1 - rho_i) d_i > 0`.
///
/// Row `i` has diagonal `d_i` in `[1, 2]`. Each off-diagonal entry is kept with
/// probability one half and given a uniform weight; the kept weights are rescaled to sum
/// to `rho_i d_i` with `rho_i` in `[0.2, 0.8]` and subtracted.
pub fn z_semipositive_tensor(order: usize, dim: usize, rng: &mut impl Rng) -> Result<DenseTensor> {
    check_shape(order, dim)?;
    let row_len = dim.pow(order as u32 - 1);
    let mut entries = Vec::with_capacity(dim * row_len);
    for i in 0..dim {
        let d: f64 = rng.random_range(1.0..=2.0);
        let rho: f64 = rng.random_range(0.2..=0.8);
        let diag_pos = (0..order - 1).fold(0, |acc, _| acc * dim + i);
        let mut row: Vec<f64> = (0..row_len)
            .map(|k| {
                if k != diag_pos && rng.random_bool(0.5) {
                    rng.random_range(0.0..1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let mass: f64 = row.iter().sum();
        let scale = if mass > 0.0 { rho * d / mass } else { 0.0 };
        for v in row.iter_mut() {
            *v = -*v * scale;
        }
        row[diag_pos] = d;
        entries.extend(row);
    }
    DenseTensor::new(order, dim, entries)
}

pub fn random_dense_tensor(order: usize, dim: usize, rng: &mut impl Rng) -> Result<DenseTensor> {
    check_shape(order, dim)?;
    DenseTensor::from_fn(order, dim, |_| rng.random_range(-1.0..=1.0))
}

/// A pair of the given kind. Registered examples ignore `order`, `dim` and `seed`.
pub fn generate_pair(kind: GenKind, order: usize, dim: usize, seed: u64, id: Option<&str>) -> Result<TensorPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GenKind::ZSemipositivePair => TensorPair::new(
            z_semipositive_tensor(order, dim, &mut rng)?,
            z_semipositive_tensor(order, dim, &mut rng)?,
        ),
        GenKind::RandomDensePair => TensorPair::new(
            random_dense_tensor(order, dim, &mut rng)?,
            random_dense_tensor(order, dim, &mut rng)?,
        ),
        GenKind::PaperExample => registry::pair(id.ok_or_else(|| {
            VtcpError::Precondition("paper-example needs an example id".into())
        })?),
    }
}

/// A full instance. Z-semipositive pairs get `q1, q2` uniform in `[-2, -0.1]`, dense
/// pairs get `q1, q2` uniform in `[-1, 1]`, and registered examples use their own `q`
/// or zero vectors.
pub fn generate_instance(
    kind: GenKind,
    order: usize,
    dim: usize,
    seed: u64,
    id: Option<&str>,
) -> Result<VtcpInstance> {
    let pair = generate_pair(kind, order, dim, seed, id)?;
    let n = pair.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut draw = |lo: f64, hi: f64| -> Vec<f64> { (0..n).map(|_| rng.random_range(lo..=hi)).collect() };
    match kind {
        GenKind::ZSemipositivePair => {
            let (q1, q2) = (draw(-2.0, -0.1), draw(-2.0, -0.1));
            VtcpInstance::new(pair, q1, q2)
        }
        GenKind::RandomDensePair => {
            let (q1, q2) = (draw(-1.0, 1.0), draw(-1.0, 1.0));
            VtcpInstance::new(pair, q1, q2)
        }
        GenKind::PaperExample => {
            let id = id.unwrap_or_default();
            match registry::instance(id) {
                Ok(inst) => Ok(inst),
                Err(VtcpError::Precondition(_)) => VtcpInstance::new(pair, vec![0.0; n], vec![0.0; n]),
                Err(e) => Err(e),
            }
        }
    }
}
