//! The worked examples: their tensors, instances and the facts stated about them.

use crate::classes::{Certificate, TensorClass, TensorPair};
use crate::error::{Result, VtcpError};
use crate::solvers::{Method, VtcpInstance};
use crate::tensor::{DenseTensor, SymTensor};

pub const EXAMPLE_IDS: [&str; 9] = ["3.1", "3.2", "3.3", "3.4", "3.5", "3.6", "3.7", "4.1", "4.2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

impl Which {
    pub fn pick<'a>(&self, pair: &'a TensorPair) -> &'a DenseTensor {
        match self {
            Which::First => &pair.a1,
            Which::Second => &pair.a2,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Which::First => "A1",
            Which::Second => "A2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// `A1 x^(m-1)` and `A2 x^(m-1)` take exactly these values.
    Images {
        x: Vec<f64>,
        first: Vec<f64>,
        second: Vec<f64>,
    },
    /// The class criterion (min or product per component) at a point.
    Criterion {
        class: TensorClass,
        point: Certificate,
        criterion: Vec<f64>,
    },
    /// The class search refutes membership; a stated point must also refute it.
    Violated {
        class: TensorClass,
        point: Option<Certificate>,
    },
    /// The class search finds no counterexample.
    NoCounterexample { class: TensorClass },
    ZTensor { tensor: Which, expected: bool },
    /// No solution of the R-system is found.
    RTensor { tensor: Which },
    SemiPositive { witness: Vec<f64> },
    /// The solver converges to `x` within `1e-8`.
    Solves { method: Method, x: Vec<f64> },
    /// The oracle finds `x`; with `positive_only`, `x` is the only positive solution,
    /// otherwise the only solution.
    OracleSolutions { x: Vec<f64>, positive_only: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Membership,
    NonMembership,
    Value,
}

impl Check {
    pub fn polarity(&self) -> Polarity {
        match self {
            Check::NoCounterexample { .. }
            | Check::RTensor { .. }
            | Check::SemiPositive { .. }
            | Check::ZTensor { expected: true, .. } => Polarity::Membership,
            Check::Violated { .. } | Check::ZTensor { expected: false, .. } => Polarity::NonMembership,
            _ => Polarity::Value,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Check::Images { x, first, second } => {
                format!("images at {x:?} are {first:?} and {second:?}")
            }
            Check::Criterion {
                class,
                point,
                criterion,
            } => format!("{class} criterion at {} is {criterion:?}", point_label(point)),
            Check::Violated { class, point: Some(p) } => {
                format!("not {class}; refuted at {}", point_label(p))
            }
            Check::Violated { class, point: None } => format!("not {class}"),
            Check::NoCounterexample { class } => format!("{class}: no counterexample"),
            Check::ZTensor { tensor, expected } => format!(
                "{} is {}a Z-tensor",
                tensor.label(),
                if *expected { "" } else { "not " }
            ),
            Check::RTensor { tensor } => format!("{} is an R-tensor", tensor.label()),
            Check::SemiPositive { witness } => format!("semi-positive with witness {witness:?}"),
            Check::Solves { method, x } => format!("{method} solves to {x:?}"),
            Check::OracleSolutions { x, positive_only } => format!(
                "oracle: {x:?} is the unique {}solution",
                if *positive_only { "positive " } else { "" }
            ),
        }
    }
}

fn point_label(p: &Certificate) -> String {
    match p {
        Certificate::Vector { x } => format!("x = {x:?}"),
        Certificate::VectorPair { x, y } => format!("x = {x:?}, y = {y:?}"),
        Certificate::Symmetric { z } => format!("Z = {:?}", z.distinct()),
        Certificate::RSystem { x, t } => format!("x = {x:?}, t = {t}"),
        Certificate::OffDiagonal { index, value } => format!("a{index:?} = {value}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fact {
    pub check: Check,
    pub citation: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleEntry {
    pub id: &'static str,
    pub pair: TensorPair,
    pub instance: Option<VtcpInstance>,
    pub facts: Vec<Fact>,
    pub notes: &'static str,
}

fn dense(order: usize, entries: &[f64]) -> DenseTensor {
    DenseTensor::new(order, 2, entries.to_vec()).expect("registry tensor shape")
}

fn make_pair(order: usize, a1: &[f64], a2: &[f64]) -> TensorPair {
    TensorPair::new(dense(order, a1), dense(order, a2)).expect("registry pair shape")
}

/// The symmetric order-3 tensor with slices `[[0,-1],[-1,0]]` and `[[-1,0],[0,1]]`.
pub fn auxiliary_z() -> SymTensor {
    SymTensor::new(3, 2, vec![0.0, -1.0, 0.0, 1.0]).expect("registry Z")
}

fn strong_vp_pair() -> TensorPair {
    make_pair(
        4,
        &[1., 1., -2., 1., 1., -1., 0., 0., 0., 0., 1., 0., 0., -1., 1., 1.],
        &[1., 0., 0., 0., 0., 0., 0., 0., 0., -1., 1., 0., 0., 0., 0., 1.],
    )
}

fn z_pair() -> TensorPair {
    make_pair(3, &[1., 0., 0., 0., -1., 0., 0., 1.], &[1., 0., 0., 0., -1., -1., 0., 1.])
}

/// The tensor pair of a worked example.
pub fn pair(id: &str) -> Result<TensorPair> {
    Ok(match id {
        "3.1" => make_pair(3, &[-1., 3., 0., 0., 1., 0., -3., 1.], &[0., 2., 1., 0., 2., -1., -2., 1.]),
        "3.2" => make_pair(
            4,
            &[1., 2., -2., 0., 0., 0., 0., 0., 0., -2., 1., 0., 2., 0., 0., 1.],
            &[1., 0., 0., 1., 0., 1., 2., 0., 0., 1., 1., 0., 0., 0., 0., 1.],
        ),
        "3.3" => make_pair(3, &[0., 1., -1., 1., 1., 0., 0., 1.], &[0., -2., 1., 1., -1., 0., -2., -1.]),
        "3.4" => make_pair(3, &[1., 0., 0., 1., 1., 1., -1., 0.], &[1., 1., -1., 1., 0., 0., 0., -1.]),
        "3.5" => make_pair(3, &[1., 0., 0., 0., 1., 0., 0., 1.], &[0., 2., -1., 0., 1., 3., 0., 1.]),
        "3.6" | "4.1" => strong_vp_pair(),
        "3.7" => make_pair(
            4,
            &[0., -1., 2., 0., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 0., 1.],
            &[0., 1., 1., 0., -1., 0., 0., 0., 1., -1., 1., 0., 0., 0., 0., 1.],
        ),
        "4.2" => z_pair(),
        _ => return Err(unknown(id)),
    })
}

fn unknown(id: &str) -> VtcpError {
    VtcpError::Unknown {
        kind: "example",
        name: id.into(),
    }
}

/// The instance a worked example solves, for ids that have one.
pub fn instance(id: &str) -> Result<VtcpInstance> {
    match id {
        "4.1" => VtcpInstance::new(pair(id)?, vec![-8.0, -1.0], vec![-1.0, -1.0]),
        "4.2" => VtcpInstance::new(pair(id)?, vec![-1.0, -1.0], vec![-4.0, -2.0]),
        _ if EXAMPLE_IDS.contains(&id) => Err(VtcpError::Precondition(format!(
            "example {id} has no registered instance"
        ))),
        _ => Err(unknown(id)),
    }
}

fn vector(x: &[f64]) -> Certificate {
    Certificate::Vector { x: x.to_vec() }
}

fn fact(check: Check, citation: &'static str) -> Fact {
    Fact { check, citation }
}

pub fn entry(id: &str) -> Result<ExampleEntry> {
    use Check::*;
    use TensorClass as C;
    let pair = pair(id)?;
    let (facts, notes) = match id {
        "3.1" => (
            vec![
                fact(NoCounterexample { class: C::Ve }, "Example 3.1: \"is of type VE\""),
                fact(
                    Violated { class: C::StrongVp, point: None },
                    "Proposition 3.2: \"There is no type strong VP tensor set with odd order\"",
                ),
                fact(
                    ZTensor { tensor: Which::First, expected: false },
                    "Example 3.1 entry table: a_112 = 3",
                ),
            ],
            "order 3, VE but not strong VP",
        ),
        "3.2" => (
            vec![
                fact(NoCounterexample { class: C::Vp }, "Example 3.2: \"is of type VP\""),
                fact(
                    Images {
                        x: vec![-1.0, -1.0],
                        first: vec![-1.0, -2.0],
                        second: vec![-5.0, -3.0],
                    },
                    "Example 3.2: \"(A2 x^3)_1 = -5\"",
                ),
                fact(
                    Violated { class: C::Ve, point: Some(vector(&[-1.0, -1.0])) },
                    "Example 3.2: \"is not of type VE\"",
                ),
                fact(
                    Criterion {
                        class: C::Vp2,
                        point: Certificate::Symmetric { z: auxiliary_z() },
                        criterion: vec![0.0, 0.0],
                    },
                    "after Example 3.4: \"(A1 Z)_i (A2 Z)_i = 0\"",
                ),
                fact(
                    Violated {
                        class: C::Vp2,
                        point: Some(Certificate::Symmetric { z: auxiliary_z() }),
                    },
                    "after Example 3.4: \"is not of type VP-II\"",
                ),
            ],
            "order 4, VP but not VE; the auxiliary Z refutes VP-II",
        ),
        "3.3" => (
            vec![
                fact(NoCounterexample { class: C::Vr0 }, "Example 3.3: \"is of type VR0\""),
                fact(
                    Criterion {
                        class: C::Vp,
                        point: vector(&[1.0, 1.0]),
                        criterion: vec![0.0, -8.0],
                    },
                    "Example 3.3: \"(A1 x)_2 (A2 x)_2 = -8\"",
                ),
                fact(
                    Violated { class: C::Vp, point: Some(vector(&[1.0, 1.0])) },
                    "Example 3.3: \"is not of type VP\"",
                ),
            ],
            "order 3, VR0 but not VP",
        ),
        "3.4" => (
            vec![fact(
                NoCounterexample { class: C::Vp2 },
                "Example 3.4: \"is of type VP-II\"",
            )],
            "order 3, VP-II",
        ),
        "3.5" => (
            vec![
                fact(NoCounterexample { class: C::Vp1 }, "Example 3.5: \"is of type VP-I\""),
                fact(
                    Criterion {
                        class: C::Vp,
                        point: vector(&[1.0, -1.0]),
                        criterion: vec![-1.0, -2.0],
                    },
                    "Example 3.5: \"(A1 x)_1 (A2 x)_1 = -1\"",
                ),
                fact(
                    Violated { class: C::Vp, point: Some(vector(&[1.0, -1.0])) },
                    "Example 3.5: \"is not of type VP\"",
                ),
            ],
            "order 3, VP-I but not VP; entries follow the slice table, so the first component of A1 x^2 is x1^2 where the printed closed form has x2^2",
        ),
        "3.6" => (
            vec![
                fact(
                    NoCounterexample { class: C::StrongVp },
                    "Example 3.6: \"is of type strong VP\"",
                ),
                fact(
                    Violated {
                        class: C::Vp2,
                        point: Some(Certificate::Symmetric { z: auxiliary_z() }),
                    },
                    "Example 3.6: \"is not type VP-II with even order\"",
                ),
            ],
            "order 4, strong VP but not VP-II",
        ),
        "3.7" => (
            vec![
                fact(NoCounterexample { class: C::Vp }, "Example 3.7: \"is of type VP with even order\""),
                fact(
                    Violated {
                        class: C::StrongVp,
                        point: Some(Certificate::VectorPair {
                            x: vec![0.0, 1.0],
                            y: vec![1.0, 0.0],
                        }),
                    },
                    "Example 3.7: \"is not of type strong VP\"",
                ),
            ],
            "order 4, VP but not strong VP",
        ),
        "4.1" => (
            vec![
                fact(RTensor { tensor: Which::Second }, "Example 4.1: \"A2 is a R-tensor\""),
                fact(
                    NoCounterexample { class: C::StrongVp },
                    "Example 4.1: \"is of type strong VP\"",
                ),
                fact(
                    Solves { method: Method::Newton, x: vec![2.0, 1.0] },
                    "Example 4.1: \"x1 = cbrt(-c)\" with c = -8, then x2 = 1",
                ),
                fact(
                    Solves { method: Method::Homotopy, x: vec![2.0, 1.0] },
                    "Example 4.1: \"has a unique solution for all q1, q2\"",
                ),
                fact(
                    OracleSolutions { x: vec![2.0, 1.0], positive_only: false },
                    "Example 4.1: \"has a unique solution for all q1, q2\"",
                ),
            ],
            "the strong VP pair of Example 3.6 with q1 = (-8, -1), q2 = (-1, -1)",
        ),
        "4.2" => {
            let x = vec![2.0, 1.0 + 7f64.sqrt()];
            (
                vec![
                    fact(
                        ZTensor { tensor: Which::First, expected: true },
                        "Example 4.2: \"are two Z-tensors\"",
                    ),
                    fact(
                        ZTensor { tensor: Which::Second, expected: true },
                        "Example 4.2: \"are two Z-tensors\"",
                    ),
                    fact(
                        Images {
                            x: vec![1.0, 2.0],
                            first: vec![1.0, 3.0],
                            second: vec![1.0, 1.0],
                        },
                        "Example 4.2: \"A1 x^2 = (1,3)^T\"",
                    ),
                    fact(
                        SemiPositive { witness: vec![1.0, 2.0] },
                        "Example 4.2: \"is of type semi-positive\"",
                    ),
                    fact(
                        Solves { method: Method::Newton, x: x.clone() },
                        "Example 4.2: \"has a unique positive solution\"",
                    ),
                    fact(
                        Solves { method: Method::Homotopy, x: x.clone() },
                        "Example 4.2: \"has a unique positive solution\"",
                    ),
                    fact(
                        Solves { method: Method::Mtensor, x: x.clone() },
                        "Example 4.2: \"has a unique positive solution\"",
                    ),
                    fact(
                        OracleSolutions { x, positive_only: true },
                        "Example 4.2: \"x = (sqrt(-c), x*)\"",
                    ),
                ],
                "Z-tensor semi-positive pair with q1 = (-1, -1), q2 = (-4, -2)",
            )
        }
        _ => return Err(unknown(id)),
    };
    let instance = if id.starts_with('4') { Some(instance(id)?) } else { None };
    Ok(ExampleEntry {
        id: EXAMPLE_IDS.iter().find(|e| **e == id).copied().ok_or_else(|| unknown(id))?,
        pair,
        instance,
        facts,
        notes,
    })
}

pub fn entries() -> Vec<ExampleEntry> {
    EXAMPLE_IDS
        .iter()
        .map(|id| entry(id).expect("registered id"))
        .collect()
}
