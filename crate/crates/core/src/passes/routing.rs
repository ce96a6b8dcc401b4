//! Swap-insertion routing: the per-gate BasicSwap and lookahead search.

use std::collections::HashSet;
use std::ops::ControlFlow;

use super::mapped::MappedCircuit;
use super::primitives::{append_mapped_gate, apply_layout, swap_along_path};
use crate::contracts::Emit;
use crate::device::{simple_layout, CouplingMap, Layout};
use crate::error::{Error, Result};
use crate::ir::{DAGCircuit, Gate};

/// Measure name for the BasicSwap outer loop.
pub const BASIC_SWAP_MEASURE: &str = "remaining_gates";
/// Measure name for the lookahead outer loop (must strictly increase).
pub const LOOKAHEAD_MEASURE: &str = "-gates_remaining.size";

/// Check the routing precondition and complete the layout with ancillas.
pub fn routing_layout(qreg: usize, cmap: &CouplingMap, layout: Option<&Layout>) -> Result<Layout> {
    if qreg > cmap.size() {
        return Err(Error::Precondition(format!(
            "register of {qreg} qubits exceeds device of {}",
            cmap.size()
        )));
    }
    if !cmap.is_connected() {
        return Err(Error::InvalidCouplingMap("routing needs a connected map".into()));
    }
    let l = match layout {
        Some(l) => l.clone(),
        None => simple_layout(qreg, cmap)?,
    };
    if !l.is_consistent() || l.num_physical() != cmap.size() || l.num_virtual() < qreg {
        return Err(Error::InvalidLayout(format!(
            "layout of {} virtual over {} physical does not fit {qreg} qubits on {} physical",
            l.num_virtual(),
            l.num_physical(),
            cmap.size()
        )));
    }
    Ok(l.with_ancillas())
}

fn two_qubit_support(g: &Gate) -> Result<Option<(usize, usize)>> {
    match g.qubits()[..] {
        [_] => Ok(None),
        [a, b] => Ok(Some((a, b))),
        _ => Err(Error::Precondition(format!("{g} touches more than two qubits"))),
    }
}

/// Route `dag` in place: each two-qubit gate whose operands sit at distance
/// `d > 1` gets `d - 1` SWAPs along a shortest path first.
pub fn basic_swap(dag: &DAGCircuit, cmap: &CouplingMap, layout: Option<&Layout>) -> Result<MappedCircuit> {
    let mut ignore = |_| ControlFlow::Continue(());
    basic_swap_instrumented(dag, cmap, layout, &mut ignore).map(|m| m.expect("never interrupted"))
}

/// [`basic_swap`] reporting the number of unprocessed input gates before
/// every iteration and once at exit. `None` if `emit` stopped the loop.
pub fn basic_swap_instrumented(
    dag: &DAGCircuit,
    cmap: &CouplingMap,
    layout: Option<&Layout>,
    emit: &mut Emit<'_>,
) -> Result<Option<MappedCircuit>> {
    let init = routing_layout(dag.qreg(), cmap, layout)?;
    let mut d = dag.clone();
    apply_layout(&mut d, &init)?;
    let mut cur = init.clone();
    let mut remaining = d.op_count() as i64;
    let mut i = 0;
    loop {
        if emit(remaining).is_break() {
            return Ok(None);
        }
        if i >= d.op_count() {
            break;
        }
        let g = d.gate(d.op_nodes()[i]).clone();
        if let Some((p1, p2)) = two_qubit_support(&g)? {
            let path = cmap.shortest_path(p1, p2)?;
            if path.len() > 2 {
                i += swap_along_path(&mut d, &mut cur, cmap, i, &path[..path.len() - 1])?;
            }
        }
        i += 1;
        remaining -= 1;
    }
    MappedCircuit::new(d, init, cur).map(Some)
}

/// How each lookahead step picks its SWAPs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scorer {
    /// Depth-limited beam over all edges, ranked by total layout distance,
    /// step score = mapped two-qubit gates minus three per SWAP.
    #[default]
    Beam,
    /// Every SWAP sequence of length `1..=depth` over edges touching an
    /// active qubit; minimise the summed distance of the next four
    /// two-qubit gates, ties to the lexicographically first sequence.
    Exhaustive,
}

impl Scorer {
    pub fn as_str(self) -> &'static str {
        match self {
            Scorer::Beam => "beam",
            Scorer::Exhaustive => "exhaustive",
        }
    }

    pub fn from_str_name(s: &str) -> Option<Scorer> {
        match s {
            "beam" => Some(Scorer::Beam),
            "exhaustive" => Some(Scorer::Exhaustive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LookaheadConfig {
    pub depth: usize,
    pub width: usize,
    pub max_steps: usize,
    pub scorer: Scorer,
}

impl Default for LookaheadConfig {
    fn default() -> Self {
        LookaheadConfig {
            depth: 4,
            width: 4,
            max_steps: 64,
            scorer: Scorer::Beam,
        }
    }
}

/// Why the lookahead loop gave up.
#[derive(Debug, Clone, PartialEq)]
pub struct StallReport {
    /// First iteration of the final run of iterations that routed nothing.
    pub iteration: usize,
    /// SWAP edges chosen by the last iteration.
    pub swaps: Vec<(usize, usize)>,
    pub layout: Layout,
    /// Unrouted input gates, virtual qubits.
    pub remaining: Vec<Gate>,
    /// Layout and remaining gates repeat an earlier state, so the loop
    /// would never end.
    pub cycle: bool,
}

#[derive(Debug, Clone)]
pub enum RoutingOutcome {
    Mapped(MappedCircuit),
    Stalled(StallReport),
}

impl RoutingOutcome {
    pub fn mapped(self) -> Option<MappedCircuit> {
        match self {
            RoutingOutcome::Mapped(m) => Some(m),
            RoutingOutcome::Stalled(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
struct Step {
    layout: Layout,
    swaps: Vec<(usize, usize)>,
    mapped: Vec<Gate>,
    remaining: Vec<usize>,
}

struct Search<'a> {
    gates: &'a [Gate],
    cmap: &'a CouplingMap,
    cfg: LookaheadConfig,
}

impl Search<'_> {
    fn support(&self, i: usize) -> Option<(usize, usize)> {
        let qs = self.gates[i].qubits();
        (qs.len() == 2).then(|| (qs[0], qs[1]))
    }

    fn dist(&self, layout: &Layout, (a, b): (usize, usize)) -> usize {
        self.cmap.distance(layout.v2p(a), layout.v2p(b)).expect("connected map")
    }

    /// Route every gate not blocked by an earlier unroutable one.
    fn map_free(&self, layout: &Layout, todo: &[usize]) -> (Vec<Gate>, Vec<usize>) {
        let mut blocked = HashSet::new();
        let mut mapped = Vec::new();
        let mut rest = Vec::new();
        for &i in todo {
            let qs = self.gates[i].qubits();
            let free = !qs.iter().any(|q| blocked.contains(q))
                && self.support(i).is_none_or(|s| self.dist(layout, s) == 1);
            if free {
                mapped.push(self.gates[i].map_qubits(|v| layout.v2p(v)));
            } else {
                blocked.extend(qs);
                rest.push(i);
            }
        }
        (mapped, rest)
    }

    fn layout_distance(&self, layout: &Layout, todo: &[usize]) -> usize {
        let cap = 50 + 10 * self.cmap.size();
        todo.iter()
            .take(cap)
            .filter_map(|&i| self.support(i))
            .map(|s| self.dist(layout, s))
            .sum()
    }

    fn beam(&self, layout: &Layout, todo: &[usize], depth: usize) -> Step {
        let (mapped, remaining) = self.map_free(layout, todo);
        if remaining.is_empty() || depth == 0 {
            return Step {
                layout: layout.clone(),
                swaps: Vec::new(),
                mapped,
                remaining,
            };
        }
        let trial = |&(a, b): &(usize, usize)| {
            let mut l = layout.clone();
            l.swap_physical(a, b).expect("edge inside map");
            l
        };
        let mut ranked: Vec<(usize, usize)> = self.cmap.edges().to_vec();
        ranked.sort_by_cached_key(|e| self.layout_distance(&trial(e), todo));
        let mut best: Option<((usize, usize), Step)> = None;
        for e in ranked.iter().take(self.cfg.width) {
            let next = self.beam(&trial(e), &remaining, depth - 1);
            if best.as_ref().is_none_or(|(_, b)| step_score(&next) > step_score(b)) {
                best = Some((*e, next));
            }
        }
        let (e, next) = best.expect("map has edges");
        let mut gates = mapped;
        gates.push(Gate::swap(e.0, e.1));
        gates.extend(next.mapped);
        let mut swaps = vec![e];
        swaps.extend(next.swaps);
        Step {
            layout: next.layout,
            swaps,
            mapped: gates,
            remaining: next.remaining,
        }
    }

    fn exhaustive(&self, layout: &Layout, todo: &[usize]) -> Step {
        let (mut mapped, remaining) = self.map_free(layout, todo);
        if remaining.is_empty() {
            return Step {
                layout: layout.clone(),
                swaps: Vec::new(),
                mapped,
                remaining,
            };
        }
        let next: Vec<(usize, usize)> = remaining.iter().filter_map(|&i| self.support(i)).take(4).collect();
        let active: HashSet<usize> = next.iter().flat_map(|&(a, b)| [a, b]).collect();
        let mut edges: Vec<(usize, usize)> = self
            .cmap
            .edges()
            .iter()
            .copied()
            .filter(|&(a, b)| {
                layout.p2v(a).is_some_and(|v| active.contains(&v)) || layout.p2v(b).is_some_and(|v| active.contains(&v))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let score = |l: &Layout| next.iter().map(|&s| self.dist(l, s)).sum::<usize>();
        let mut best: Option<(usize, Vec<(usize, usize)>, Layout)> = None;
        let mut seq = Vec::new();
        self.enumerate(layout, &edges, &mut seq, &mut best, &score);
        let (_, swaps, l) = best.expect("active qubits have edges");
        let mut cur = layout.clone();
        for &(a, b) in &swaps {
            mapped.push(Gate::swap(a, b));
            cur.swap_physical(a, b).expect("edge inside map");
        }
        debug_assert_eq!(cur, l);
        let (after, remaining) = self.map_free(&l, &remaining);
        mapped.extend(after);
        Step {
            layout: l,
            swaps,
            mapped,
            remaining,
        }
    }

    #[allow(clippy::type_complexity)]
    fn enumerate(
        &self,
        layout: &Layout,
        edges: &[(usize, usize)],
        seq: &mut Vec<(usize, usize)>,
        best: &mut Option<(usize, Vec<(usize, usize)>, Layout)>,
        score: &dyn Fn(&Layout) -> usize,
    ) {
        if seq.len() == self.cfg.depth {
            return;
        }
        for &(a, b) in edges {
            let mut l = layout.clone();
            l.swap_physical(a, b).expect("edge inside map");
            seq.push((a, b));
            let s = score(&l);
            if best.as_ref().is_none_or(|(bs, _, _)| s < *bs) {
                *best = Some((s, seq.clone(), l.clone()));
            }
            self.enumerate(&l, edges, seq, best, score);
            seq.pop();
        }
    }

    fn step(&self, layout: &Layout, todo: &[usize]) -> Step {
        match self.cfg.scorer {
            Scorer::Beam => self.beam(layout, todo, self.cfg.depth),
            Scorer::Exhaustive => self.exhaustive(layout, todo),
        }
    }
}

fn step_score(s: &Step) -> i64 {
    let two = s.mapped.iter().filter(|g| g.qubits().len() == 2).count() as i64;
    two - 3 * s.swaps.len() as i64
}

/// Lookahead routing. Stops with a [`StallReport`] when an iteration
/// revisits an earlier (layout, remaining) state or `max_steps` runs out.
pub fn lookahead_swap(
    dag: &DAGCircuit,
    cmap: &CouplingMap,
    layout: Option<&Layout>,
    cfg: LookaheadConfig,
) -> Result<RoutingOutcome> {
    let mut ignore = |_| ControlFlow::Continue(());
    lookahead_instrumented(dag, cmap, layout, cfg, &mut ignore).map(|o| o.expect("never interrupted"))
}

/// [`lookahead_swap`] reporting `-remaining.len()` before every iteration
/// and once at exit. `None` if `emit` stopped the loop.
pub fn lookahead_instrumented(
    dag: &DAGCircuit,
    cmap: &CouplingMap,
    layout: Option<&Layout>,
    cfg: LookaheadConfig,
    emit: &mut Emit<'_>,
) -> Result<Option<RoutingOutcome>> {
    let init = routing_layout(dag.qreg(), cmap, layout)?;
    let input = dag.to_circuit();
    let gates = input.gates();
    for g in gates {
        two_qubit_support(g)?;
    }
    let search = Search { gates, cmap, cfg };
    let mut out = DAGCircuit::new(cmap.size(), dag.cbits())?;
    let mut cur = init.clone();
    let mut remaining: Vec<usize> = (0..gates.len()).collect();
    let mut seen = HashSet::new();
    let mut last_swaps = Vec::new();
    let mut stuck_since = 0;
    for iteration in 0..=cfg.max_steps {
        if emit(-(remaining.len() as i64)).is_break() {
            return Ok(None);
        }
        if remaining.is_empty() {
            return MappedCircuit::new(out, init, cur).map(|m| Some(RoutingOutcome::Mapped(m)));
        }
        let cycle = !seen.insert((cur.clone(), remaining.clone()));
        if cycle || iteration == cfg.max_steps {
            return Ok(Some(RoutingOutcome::Stalled(StallReport {
                iteration: stuck_since,
                swaps: last_swaps,
                layout: cur,
                remaining: remaining.iter().map(|&i| gates[i].clone()).collect(),
                cycle,
            })));
        }
        let step = search.step(&cur, &remaining);
        for g in step.mapped {
            append_mapped_gate(&mut out, cmap, g)?;
        }
        for &(a, b) in &step.swaps {
            cur.swap_physical(a, b)?;
        }
        debug_assert_eq!(cur, step.layout);
        last_swaps = step.swaps;
        if step.remaining.len() < remaining.len() {
            stuck_since = iteration + 1;
        }
        remaining = step.remaining;
    }
    unreachable!("loop returns by max_steps")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::{check_monotone, Monotone, MonotoneVerdict};
    use crate::ir::QuantumCircuit;
    use crate::semantics::{Convention, EqualityMode, TOL};

    fn ladder_stall() -> QuantumCircuit {
        QuantumCircuit::from_gates(16, vec![Gate::cx(0, 8), Gate::cx(7, 14), Gate::cx(8, 7), Gate::cx(0, 14)]).unwrap()
    }

    #[test]
    fn input_swap_is_not_a_layout_change() {
        let c = QuantumCircuit::from_gates(2, vec![Gate::swap(0, 1)]).unwrap();
        let out = lookahead_swap(&DAGCircuit::from_circuit(&c), &CouplingMap::line(3), None, LookaheadConfig::default())
            .unwrap()
            .mapped()
            .unwrap();
        assert_eq!(out.final_layout, out.initial_layout);
        assert!(out.equivalent_to(&c, Convention::Diagram, EqualityMode::Exact, TOL).unwrap());
    }

    #[test]
    fn one_swap_on_chain() {
        let c = QuantumCircuit::from_gates(3, vec![Gate::cx(0, 2)]).unwrap();
        let m = basic_swap(&DAGCircuit::from_circuit(&c), &CouplingMap::line(3), None).unwrap();
        assert_eq!(m.circuit().gates(), &[Gate::swap(0, 1), Gate::cx(1, 2)]);
        assert!(m.equivalent_to(&c, Convention::Diagram, EqualityMode::Exact, TOL).unwrap());
    }

    #[test]
    fn adjacent_circuit_is_a_fixpoint() {
        let c = QuantumCircuit::from_gates(3, vec![Gate::h(0), Gate::cx(0, 1), Gate::cx(1, 2)]).unwrap();
        let d = DAGCircuit::from_circuit(&c);
        let m = basic_swap(&d, &CouplingMap::line(3), None).unwrap();
        assert_eq!(m.circuit(), c);
        let l = lookahead_swap(&d, &CouplingMap::line(3), None, LookaheadConfig::default()).unwrap();
        assert_eq!(l.mapped().unwrap().swaps(), 0);
    }

    #[test]
    fn register_larger_than_device_is_rejected() {
        let c = QuantumCircuit::from_gates(4, vec![Gate::x(3)]).unwrap();
        assert!(basic_swap(&DAGCircuit::from_circuit(&c), &CouplingMap::line(3), None).is_err());
    }

    #[test]
    fn random_routing_on_chain_of_five() {
        let mut r = crate::gen::rng(11);
        let cmap = CouplingMap::line(5);
        for _ in 0..30 {
            let c = crate::gen::random_circuit(&mut r, 4, 10, &crate::gen::GateSet::clifford_t());
            let d = DAGCircuit::from_circuit(&c);
            for m in [
                basic_swap(&d, &cmap, None).unwrap(),
                lookahead_swap(&d, &cmap, None, LookaheadConfig::default()).unwrap().mapped().unwrap(),
            ] {
                assert!(m.is_coupling_compliant(&cmap));
                for conv in [Convention::Diagram, Convention::TimeOrdered] {
                    assert!(m.equivalent_to(&c, conv, EqualityMode::Exact, TOL).unwrap());
                }
            }
        }
    }

    #[test]
    fn ladder_circuit_stalls_lookahead() {
        let d = DAGCircuit::from_circuit(&ladder_stall());
        let cmap = CouplingMap::ibmqx5();
        let out = lookahead_swap(&d, &cmap, None, LookaheadConfig::default()).unwrap();
        let RoutingOutcome::Stalled(s) = out else {
            panic!("expected a stall");
        };
        assert_eq!(s.iteration, 0);
        assert!(s.cycle);
        assert_eq!(s.swaps.len(), 4);
        let mut l = Layout::trivial(16);
        for &(a, b) in &s.swaps {
            l.swap_physical(a, b).unwrap();
        }
        assert_eq!(l, Layout::trivial(16), "chosen swaps cancel");
        assert_eq!(s.remaining.len(), 4);
        let runner = |c: &QuantumCircuit, emit: &mut Emit<'_>| {
            lookahead_instrumented(&DAGCircuit::from_circuit(c), &cmap, None, LookaheadConfig::default(), emit).map(|_| ())
        };
        let v = check_monotone("lookahead_swap", &runner, &Monotone::increasing(LOOKAHEAD_MEASURE), [ladder_stall()])
            .unwrap();
        assert!(matches!(v, MonotoneVerdict::Stall { stall, .. } if stall.iteration == 0));
    }
}
