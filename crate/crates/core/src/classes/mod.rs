//! Structure classes of tensor pairs and single tensors.
//!
//! The universal pair classes (VR0, VE, VP, VP-I, VP-II, strong VP) are checked by
//! searching for a counterexample. A found counterexample is conclusive and is stored as a
//! [`Certificate`] that re-verifies through [`violation_functional`]; when the search comes
//! up empty the verdict is [`Outcome::Undetermined`], never a membership claim.
//! Existential properties (semi-positivity) and the decidable Z-tensor test can be
//! certified positively.

mod functional;
mod pair;
mod search;
mod single;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VtcpError};
use crate::tensor::{DenseTensor, SymTensor};

pub use functional::{
    certificate_admissible, evaluate, is_violation_value, verify_certificate,
    violation_functional, Evaluation,
};
pub use pair::check_pair_class;
pub use single::{
    diag_combination, first_positive_off_diagonal, is_r_tensor, is_strong_m_tensor,
    is_z_tensor, positive_witness_images, r_system_defect, semi_positive_witness,
};

/// The two tensors `{A1, A2}` defining a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorPair {
    pub a1: DenseTensor,
    pub a2: DenseTensor,
}

impl TensorPair {
    pub fn new(a1: DenseTensor, a2: DenseTensor) -> Result<Self> {
        if a1.order() != a2.order() || a1.dim() != a2.dim() {
            return Err(VtcpError::Dimension(format!(
                "pair tensors differ in shape: order {} dim {} vs order {} dim {}",
                a1.order(),
                a1.dim(),
                a2.order(),
                a2.dim()
            )));
        }
        Ok(TensorPair { a1, a2 })
    }

    pub fn order(&self) -> usize {
        self.a1.order()
    }

    pub fn dim(&self) -> usize {
        self.a1.dim()
    }

    /// Both images `(A1 x^(m-1), A2 x^(m-1))`.
    pub fn images(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((self.a1.power_apply(x)?, self.a2.power_apply(x)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TensorClass {
    #[serde(rename = "VR0")]
    Vr0,
    #[serde(rename = "VE")]
    Ve,
    #[serde(rename = "VP")]
    Vp,
    #[serde(rename = "VP1")]
    Vp1,
    #[serde(rename = "VP2")]
    Vp2,
    #[serde(rename = "StrongVP")]
    StrongVp,
    SemiPositive,
    RTensor,
    ZTensor,
    StrongM,
}

impl TensorClass {
    pub const PAIR_UNIVERSAL: [TensorClass; 6] = [
        TensorClass::Vr0,
        TensorClass::Ve,
        TensorClass::Vp,
        TensorClass::Vp1,
        TensorClass::Vp2,
        TensorClass::StrongVp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TensorClass::Vr0 => "VR0",
            TensorClass::Ve => "VE",
            TensorClass::Vp => "VP",
            TensorClass::Vp1 => "VP1",
            TensorClass::Vp2 => "VP2",
            TensorClass::StrongVp => "StrongVP",
            TensorClass::SemiPositive => "SemiPositive",
            TensorClass::RTensor => "RTensor",
            TensorClass::ZTensor => "ZTensor",
            TensorClass::StrongM => "StrongM",
        }
    }

    pub fn is_pair_universal(self) -> bool {
        Self::PAIR_UNIVERSAL.contains(&self)
    }
}

impl fmt::Display for TensorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TensorClass {
    type Err = VtcpError;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "vr0" => TensorClass::Vr0,
            "ve" => TensorClass::Ve,
            "vp" => TensorClass::Vp,
            "vp1" | "vpi" => TensorClass::Vp1,
            "vp2" | "vpii" => TensorClass::Vp2,
            "strongvp" => TensorClass::StrongVp,
            "semipositive" => TensorClass::SemiPositive,
            "r" | "rtensor" => TensorClass::RTensor,
            "z" | "ztensor" => TensorClass::ZTensor,
            "strongm" | "strongmtensor" => TensorClass::StrongM,
            _ => return Err(VtcpError::UnknownClass(s.to_string())),
        })
    }
}

/// Effort and tolerance settings for every stochastic search in this module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub num_starts: usize,
    pub box_radius: f64,
    /// A candidate is a counterexample when its functional value is `<= tol_cert`.
    pub tol_cert: f64,
    /// Minimum relative size of `diag(Z)` (VP-II) or `x - y` (strong VP).
    pub tol_diag: f64,
    pub max_polish_iters: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            num_starts: 200,
            box_radius: 2.0,
            tol_cert: 1e-9,
            tol_diag: 1e-6,
            max_polish_iters: 100,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.num_starts > 0
            && self.box_radius > 0.0
            && self.tol_cert > 0.0
            && self.tol_diag > 0.0
            && self.max_polish_iters > 0;
        if ok {
            Ok(())
        } else {
            Err(VtcpError::Precondition(
                "search configuration values must be positive".into(),
            ))
        }
    }
}

/// The point at which a class condition was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Vector { x: Vec<f64> },
    VectorPair { x: Vec<f64>, y: Vec<f64> },
    Symmetric { z: SymTensor },
    /// A solution `(x, t)` of the R-tensor system.
    RSystem { x: Vec<f64>, t: f64 },
    /// A positive off-diagonal entry.
    OffDiagonal { index: Vec<usize>, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum Outcome {
    Violated {
        certificate: Certificate,
        value: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        evaluation: Option<Evaluation>,
        /// The functional sits in `[-tol_cert, tol_cert]`: a tie rather than a strict violation.
        boundary: bool,
    },
    HoldsCertified {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<Vec<f64>>,
        proof: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        components: Vec<f64>,
    },
    Undetermined {
        starts: usize,
        best_value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub class: TensorClass,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// What a verdict talks about.
#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    Pair(&'a TensorPair),
    Tensor(&'a DenseTensor),
}

impl ClassVerdict {
    pub fn is_violated(&self) -> bool {
        matches!(self.outcome, Outcome::Violated { .. })
    }

    pub fn is_undetermined(&self) -> bool {
        matches!(self.outcome, Outcome::Undetermined { .. })
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.outcome, Outcome::HoldsCertified { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.outcome {
            Outcome::Violated { certificate, .. } => Some(certificate),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&[f64]> {
        match &self.outcome {
            Outcome::HoldsCertified {
                witness: Some(w), ..
            } => Some(w),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            Outcome::Violated { .. } => "violated",
            Outcome::HoldsCertified { .. } => "holds (certified)",
            Outcome::Undetermined { .. } => "undetermined",
        }
    }

    /// Re-checks the stored certificate or witness from scratch.
    ///
    /// Undetermined verdicts carry nothing to check and re-verify trivially.
    pub fn reverify(&self, subject: Subject<'_>, cfg: &SearchConfig) -> Result<bool> {
        match (&self.outcome, subject) {
            (Outcome::Undetermined { .. }, _) => Ok(true),
            (Outcome::Violated { certificate, .. }, Subject::Pair(pair))
                if self.class.is_pair_universal() =>
            {
                verify_certificate(pair, self.class, certificate, cfg)
            }
            (Outcome::Violated { certificate, .. }, Subject::Tensor(t)) => {
                match (self.class, certificate) {
                    (TensorClass::RTensor, Certificate::RSystem { x, t: tt }) => {
                        Ok(r_system_defect(t, x, *tt)? <= cfg.tol_cert)
                    }
                    (
                        TensorClass::ZTensor | TensorClass::StrongM,
                        Certificate::OffDiagonal { index, value },
                    ) => {
                        let diagonal = index.windows(2).all(|w| w[0] == w[1]);
                        Ok(index.len() == t.order()
                            && index.iter().all(|&i| i < t.dim())
                            && !diagonal
                            && t.get(index) == *value
                            && *value > 0.0)
                    }
                    _ => Ok(false),
                }
            }
            (Outcome::HoldsCertified { witness, .. }, subject) => {
                let pair_owned;
                let pair = match subject {
                    Subject::Pair(p) => p,
                    Subject::Tensor(t) => {
                        pair_owned = TensorPair::new(t.clone(), t.clone())?;
                        &pair_owned
                    }
                };
                match (self.class, witness) {
                    (TensorClass::SemiPositive | TensorClass::StrongM, Some(w)) => {
                        Ok(positive_witness_images(pair, w)?.is_some())
                    }
                    (TensorClass::ZTensor, None) => Ok(match subject {
                        Subject::Tensor(t) => is_z_tensor(t),
                        Subject::Pair(p) => is_z_tensor(&p.a1) && is_z_tensor(&p.a2),
                    }),
                    _ => Ok(false),
                }
            }
            _ => Ok(false),
        }
    }
}

/// Exact Z-tensor verdict for a single tensor.
pub fn z_tensor_verdict(t: &DenseTensor) -> ClassVerdict {
    let outcome = match first_positive_off_diagonal(t) {
        Some((index, value)) => Outcome::Violated {
            certificate: Certificate::OffDiagonal { index, value },
            value,
            evaluation: None,
            boundary: false,
        },
        None => Outcome::HoldsCertified {
            witness: None,
            proof: "all off-diagonal entries are non-positive".into(),
            components: vec![],
        },
    };
    ClassVerdict {
        class: TensorClass::ZTensor,
        outcome,
    }
}

/// What an [`analyze`] verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "pair")]
    Pair,
    A1,
    A2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetVerdict {
    pub target: Target,
    #[serde(flatten)]
    pub verdict: ClassVerdict,
}

impl TargetVerdict {
    /// Re-checks the verdict against the tensor or pair it refers to.
    pub fn reverify(&self, pair: &TensorPair, cfg: &SearchConfig) -> Result<bool> {
        let subject = match self.target {
            Target::Pair => Subject::Pair(pair),
            Target::A1 => Subject::Tensor(&pair.a1),
            Target::A2 => Subject::Tensor(&pair.a2),
        };
        self.verdict.reverify(subject, cfg)
    }
}

/// Runs each requested check. Pair classes produce one verdict; single-tensor classes
/// (Z, R, strong M) produce one verdict for each of `A1` and `A2`.
pub fn analyze(pair: &TensorPair, classes: &[TensorClass], cfg: &SearchConfig) -> Result<Vec<TargetVerdict>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for &class in classes {
        match class {
            c if c.is_pair_universal() => out.push(TargetVerdict {
                target: Target::Pair,
                verdict: check_pair_class(pair, c, cfg)?,
            }),
            TensorClass::SemiPositive => out.push(TargetVerdict {
                target: Target::Pair,
                verdict: semi_positive_witness(pair, cfg)?,
            }),
            _ => {
                for (target, t) in [(Target::A1, &pair.a1), (Target::A2, &pair.a2)] {
                    let verdict = match class {
                        TensorClass::ZTensor => z_tensor_verdict(t),
                        TensorClass::RTensor => is_r_tensor(t, cfg)?,
                        _ => is_strong_m_tensor(t, cfg)?,
                    };
                    out.push(TargetVerdict { target, verdict });
                }
            }
        }
    }
    Ok(out)
}
