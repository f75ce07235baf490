use serde::{Deserialize, Serialize};

use super::registry::{self, Check, ExampleEntry, Fact};
use crate::classes::{
    check_pair_class, evaluate, is_r_tensor, is_z_tensor, positive_witness_images,
    semi_positive_witness, verify_certificate, ClassVerdict, SearchConfig, Subject,
};
use crate::error::{Result, VtcpError};
use crate::solvers::{solve, solve_oracle, Method, SolverConfig, VtcpInstance};
use crate::tensor::vector::inf_dist;

/// Agreement required between a computed and a stated solution.
pub const SOLUTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactResult {
    pub description: String,
    pub citation: String,
    pub passed: bool,
    pub observed: String,
    /// Every class verdict computed for this fact.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<ClassVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub id: String,
    pub notes: String,
    pub facts: Vec<FactResult>,
    pub passed: bool,
}

impl ReproductionReport {
    pub fn failures(&self) -> impl Iterator<Item = &FactResult> {
        self.facts.iter().filter(|f| !f.passed)
    }
}

fn needs_instance(e: &ExampleEntry) -> Result<&VtcpInstance> {
    e.instance.as_ref().ok_or_else(|| {
        VtcpError::Precondition(format!("example {} has no registered instance", e.id))
    })
}

fn run_fact(
    e: &ExampleEntry,
    fact: &Fact,
    search: &SearchConfig,
    solver: &SolverConfig,
) -> Result<FactResult> {
    let pair = &e.pair;
    let mut verdicts = Vec::new();
    let (passed, observed) = match &fact.check {
        Check::Images { x, first, second } => {
            let (g, f) = pair.images(x)?;
            (&g == first && &f == second, format!("{g:?} and {f:?}"))
        }
        Check::Criterion {
            class,
            point,
            criterion,
        } => {
            let ev = evaluate(pair, *class, point)?;
            (&ev.criterion == criterion, format!("{:?}", ev.criterion))
        }
        Check::Violated { class, point } => {
            let v = check_pair_class(pair, *class, search)?;
            let found = v.is_violated() && v.reverify(Subject::Pair(pair), search)?;
            let mut observed = format!("search: {}", v.label());
            if let Some(c) = v.certificate() {
                observed.push_str(&format!(" at {}", serde_json::to_string(c).unwrap_or_default()));
            }
            verdicts.push(v);
            let stated = match point {
                Some(p) => {
                    let ok = verify_certificate(pair, *class, p, search)?;
                    observed.push_str(&format!(
                        "; stated point {}",
                        if ok { "refutes" } else { "does not refute" }
                    ));
                    ok
                }
                None => true,
            };
            (found && stated, observed)
        }
        Check::NoCounterexample { class } => {
            let v = check_pair_class(pair, *class, search)?;
            let observed = match &v.outcome {
                crate::classes::Outcome::Undetermined { starts, best_value } => {
                    format!("undetermined after {starts} starts, best value {best_value:.3e}")
                }
                _ => format!("{}: {:?}", v.label(), v.certificate()),
            };
            let ok = v.is_undetermined();
            verdicts.push(v);
            (ok, observed)
        }
        Check::ZTensor { tensor, expected } => {
            let z = is_z_tensor(tensor.pick(pair));
            (z == *expected, format!("Z-tensor: {z}"))
        }
        Check::RTensor { tensor } => {
            let v = is_r_tensor(tensor.pick(pair), search)?;
            let ok = v.is_undetermined();
            let observed = format!("R-system search: {}", v.label());
            verdicts.push(v);
            (ok, observed)
        }
        Check::SemiPositive { witness } => {
            let stated = positive_witness_images(pair, witness)?;
            let v = semi_positive_witness(pair, search)?;
            let found = v.is_certified() && v.reverify(Subject::Pair(pair), search)?;
            let observed = format!(
                "stated witness images {:?}; search witness {:?}",
                stated,
                v.witness()
            );
            verdicts.push(v);
            (stated.is_some() && found, observed)
        }
        Check::Solves { method, x } => {
            let inst = needs_instance(e)?;
            let r = solve(inst, *method, None, solver)?;
            let ok = r.converged()
                && inf_dist(&r.x, x) <= SOLUTION_TOL
                && (*method != Method::Mtensor || r.path.iter().flatten().all(|&v| v > 0.0));
            (ok, format!("{:?} at {:?}, residual {:.3e}", r.status, r.x, r.residual_inf_norm))
        }
        Check::OracleSolutions { x, positive_only } => {
            let inst = needs_instance(e)?;
            let r = solve_oracle(inst, solver)?;
            let relevant: Vec<&Vec<f64>> = r
                .solutions
                .iter()
                .filter(|s| !positive_only || s.iter().all(|&v| v > 0.0))
                .collect();
            let ok = relevant.len() == 1 && inf_dist(relevant[0], x) <= SOLUTION_TOL && !r.non_isolated;
            (ok, format!("solutions {:?}", r.solutions))
        }
    };
    Ok(FactResult {
        description: fact.check.describe(),
        citation: fact.citation.to_string(),
        passed,
        observed,
        verdicts,
    })
}

/// Runs every registered fact of one example.
pub fn reproduce(id: &str, search: &SearchConfig, solver: &SolverConfig) -> Result<ReproductionReport> {
    let e = registry::entry(id)?;
    let facts = e
        .facts
        .iter()
        .map(|f| run_fact(&e, f, search, solver))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReproductionReport {
        id: e.id.to_string(),
        notes: e.notes.to_string(),
        passed: facts.iter().all(|f| f.passed),
        facts,
    })
}

pub fn reproduce_all(search: &SearchConfig, solver: &SolverConfig) -> Result<Vec<ReproductionReport>> {
    registry::EXAMPLE_IDS
        .iter()
        .map(|id| reproduce(id, search, solver))
        .collect()
}
