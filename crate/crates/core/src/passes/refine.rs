//! Refinement of the gate-list view by the DAG under every pass.

use super::manager::{pass_by_name, PassState};
use crate::device::CouplingMap;
use crate::ir::{circuit_dag_equiv, DAGCircuit, QuantumCircuit};
use crate::semantics::refinement::{Rejected, Representation};
use crate::semantics::Convention;

/// Concrete DAGs (with whatever arena history earlier passes left) against
/// freshly built gate lists. A pass name is one transform; cancellation
/// runs after its own commutation analysis.
#[derive(Debug, Clone)]
pub struct DagRepresentation {
    pub cmap: CouplingMap,
    pub convention: Convention,
}

impl DagRepresentation {
    fn apply(&self, pass: &str, dag: DAGCircuit) -> std::result::Result<DAGCircuit, Rejected> {
        let mut st = PassState::new(dag, Some(self.cmap.clone()), self.convention);
        let reject = |e: crate::Error| Rejected(e.to_string());
        if pass == "commutative_cancellation" {
            pass_by_name("commutation_analysis").map_err(reject)?.run(&mut st).map_err(reject)?;
        }
        pass_by_name(pass).map_err(reject)?.run(&mut st).map_err(reject)?;
        Ok(st.dag)
    }
}

impl Representation for DagRepresentation {
    type Concrete = DAGCircuit;
    type Spec = QuantumCircuit;
    type Transform = String;

    fn name(&self) -> &str {
        "dag"
    }

    fn related(&self, c: &DAGCircuit, s: &QuantumCircuit) -> bool {
        c.check_invariants().is_ok() && circuit_dag_equiv(s, c)
    }

    fn apply_concrete(&self, t: &String, c: &DAGCircuit) -> std::result::Result<DAGCircuit, Rejected> {
        self.apply(t, c.clone())
    }

    fn apply_spec(&self, t: &String, s: &QuantumCircuit) -> std::result::Result<QuantumCircuit, Rejected> {
        self.apply(t, DAGCircuit::from_circuit(s)).map(|d| d.to_circuit())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::refinement::{refinement_check, RefinementVerdict};

    #[test]
    fn passes_commute_with_the_abstraction() {
        let rep = DagRepresentation {
            cmap: CouplingMap::line(4),
            convention: Convention::Diagram,
        };
        let mut r = crate::gen::rng(9);
        let samples: Vec<_> = (0..20)
            .map(|_| {
                let c = crate::gen::random_circuit(&mut r, 4, 10, &crate::gen::GateSet::commutation_safe());
                (DAGCircuit::from_circuit(&c), c)
            })
            .collect();
        let ts: Vec<String> = ["commutative_cancellation", "optimize_1q_gates", "basic_swap", "collect_2q_blocks"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let rep_ = refinement_check(&rep, &ts, &samples).unwrap();
        assert_eq!(rep_.verdict, RefinementVerdict::Pass);
        assert_eq!(rep_.checked, 80);
    }
}
