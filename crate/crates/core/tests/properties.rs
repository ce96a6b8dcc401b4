use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;

use qtv_core::calculus::{apply_rule_gates, equiv_prove, Direction, ProofResult, ProverConfig, RuleSet};
use qtv_core::device::{layout_swap, simple_layout, CouplingMap, Layout};
use qtv_core::gen::{self, GateSet};
use qtv_core::passes::{
    basic_swap, collect_2q_blocks, commutation_analysis, oracle_equal, optimize_1q_gates, parse_pipeline,
    run_pass_manager, ManagerOptions, Optimize1qConfig, Grouping, merge_run,
};
use qtv_core::qasm;
use qtv_core::semantics::{
    denote_gates, denote_lowered, equal_in_mode, phase_equal, u3_from_quat, u3_matrix, unitary_equal, Convention,
    EqualityMode, Unitary, QUAT_TOL, TOL,
};
use qtv_core::validator::{validate_swap_insertion, Status};
use qtv_core::{DAGCircuit, Gate, GateKind, QuantumCircuit};

const CONV: Convention = Convention::Diagram;

fn circuit(seed: u64, qubits: usize, gates: usize) -> QuantumCircuit {
    gen::random_small_circuit(&mut gen::rng(seed), qubits, gates, &GateSet::unitary())
}

/// Random circuit with some `c_if` and `q_if` guards sprinkled in.
fn guarded_circuit(seed: u64) -> QuantumCircuit {
    let mut rng = gen::rng(seed);
    let qreg = rng.gen_range(2..=4);
    let gates = (0..rng.gen_range(0..=12))
        .map(|_| {
            let g = gen::random_gate(&mut rng, qreg, &GateSet::unitary());
            match rng.gen_range(0..6) {
                0 => g.with_c_if(rng.gen_range(0..4)),
                1 => {
                    let free: Vec<usize> = (0..qreg).filter(|q| !g.operands().contains(q)).collect();
                    match free.first() {
                        Some(&q) => g.with_q_if(q),
                        None => g,
                    }
                }
                _ => g,
            }
        })
        .collect();
    QuantumCircuit::from_parts(qreg, 2, gates).expect("fits")
}

fn random_map(seed: u64) -> CouplingMap {
    let mut rng = gen::rng(seed);
    let n = rng.gen_range(1..=8);
    let extra = rng.gen_range(0..=n);
    gen::random_connected_map(&mut rng, n, extra)
}

fn u3_chain(seed: u64) -> Vec<Gate> {
    let mut rng = gen::rng(seed);
    (0..rng.gen_range(1..=8))
        .map(|_| gen::random_gate(&mut rng, 1, &GateSet::single_qubit_u()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dag_round_trip(seed in any::<u64>()) {
        let c = guarded_circuit(seed);
        let d = DAGCircuit::from_circuit(&c);
        prop_assert!(qtv_core::ir::circuit_dag_equiv(&c, &d));
        prop_assert_eq!(d.to_circuit(), c);
        prop_assert!(d.check_invariants().is_ok());
    }

    #[test]
    fn topological_order_respects_wires(seed in any::<u64>()) {
        let d = DAGCircuit::from_circuit(&guarded_circuit(seed));
        let order = d.topological_op_nodes();
        prop_assert_eq!(order.len(), d.op_count());
        let at = |id| order.iter().position(|&x| x == id).expect("listed");
        for q in 0..d.qreg() {
            let w = d.wire(q);
            for pair in w.windows(2) {
                prop_assert!(at(pair[0]) < at(pair[1]));
            }
        }
    }

    #[test]
    fn append_extends_the_gate_list(seed in any::<u64>()) {
        let c = circuit(seed, 4, 12);
        let mut rng = gen::rng(seed ^ 1);
        let g = gen::random_gate(&mut rng, c.qreg(), &GateSet::unitary());
        let mut d = DAGCircuit::from_circuit(&c);
        d.append(g.clone()).unwrap();
        let mut want = c.gates().to_vec();
        want.push(g);
        let got = d.to_circuit();
        prop_assert_eq!(got.gates(), want.as_slice());
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let c = guarded_circuit(seed);
        let back = qasm::parse(&qasm::print(&c)).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn layout_stays_a_bijection_under_swaps(seed in any::<u64>()) {
        let m = random_map(seed);
        let mut rng = gen::rng(seed);
        let mut l = simple_layout(rng.gen_range(1..=m.size()), &m).unwrap();
        for _ in 0..10 {
            if m.edges().is_empty() {
                break;
            }
            let (a, b) = m.edges()[rng.gen_range(0..m.edges().len())];
            l = layout_swap(&l, a, b).unwrap();
            prop_assert!(l.is_consistent());
            for v in 0..l.num_virtual() {
                prop_assert_eq!(l.p2v(l.v2p(v)), Some(v));
            }
        }
    }

    #[test]
    fn paths_are_adjacent_and_distances_metric(seed in any::<u64>()) {
        let m = random_map(seed);
        let n = m.size();
        for a in 0..n {
            for b in 0..n {
                let p = m.shortest_path(a, b).unwrap();
                prop_assert_eq!(p.first(), Some(&a));
                prop_assert_eq!(p.last(), Some(&b));
                prop_assert!(p.windows(2).all(|w| m.adjacent(w[0], w[1])));
                let dab = m.distance(a, b).unwrap();
                prop_assert_eq!(p.len() - 1, dab);
                prop_assert_eq!(dab, m.distance(b, a).unwrap());
                for c in 0..n {
                    prop_assert!(dab <= m.distance(a, c).unwrap() + m.distance(c, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn denotations_are_unitary_and_compose(seed in any::<u64>(), cut in 0usize..=16) {
        let c = circuit(seed, 4, 16);
        let k = cut.min(c.len());
        let (g1, g2) = c.gates().split_at(k);
        let whole = denote_gates(c.qreg(), c.gates(), CONV).unwrap();
        prop_assert!(whole.is_unitary(TOL));
        let split = denote_gates(c.qreg(), g1, CONV).unwrap().mul(&denote_gates(c.qreg(), g2, CONV).unwrap()).unwrap();
        prop_assert!(unitary_equal(&whole, &split, TOL));
        let t = denote_gates(c.qreg(), c.gates(), Convention::TimeOrdered).unwrap();
        let tsplit = denote_gates(c.qreg(), g2, Convention::TimeOrdered).unwrap()
            .mul(&denote_gates(c.qreg(), g1, Convention::TimeOrdered).unwrap()).unwrap();
        prop_assert!(unitary_equal(&t, &tsplit, TOL));
    }

    #[test]
    fn equality_is_reflexive_and_phase_is_coarser(seed in any::<u64>(), gamma in -PI..PI) {
        let c = circuit(seed, 3, 10);
        let u = denote_gates(c.qreg(), c.gates(), CONV).unwrap();
        prop_assert!(unitary_equal(&u, &u, 0.0));
        prop_assert!(phase_equal(&u, &u, 0.0));
        let v = u.scale(C64::from_polar(1.0, gamma));
        prop_assert!(phase_equal(&u, &v, TOL));
        prop_assert!(phase_equal(&v, &u, TOL));
        if unitary_equal(&u, &v, TOL) {
            prop_assert!(gamma.abs() < 1e-6);
        }
    }

    #[test]
    fn quaternion_composition_matches_matrices(seed in any::<u64>()) {
        let chain = u3_chain(seed);
        let kinds: Vec<GateKind> = chain.iter().map(|g| g.kind).collect();
        for conv in [Convention::Diagram, Convention::TimeOrdered] {
            let (t, p, l) = u3_from_quat(&merge_run(&kinds, conv).unwrap()).unwrap();
            let direct = denote_gates(1, &chain, conv).unwrap();
            let fused = Unitary::from_row_major(1, u3_matrix(t, p, l).to_vec()).unwrap();
            prop_assert!(phase_equal(&direct, &fused, QUAT_TOL));
        }
    }

    #[test]
    fn rule_application_changes_count_by_side_difference(seed in any::<u64>()) {
        let rules = RuleSet::standard(CONV);
        let c = circuit(seed, 4, 12);
        let mut rng = gen::rng(seed);
        for r in rules.usable() {
            for dir in [Direction::Forward, Direction::Backward] {
                if !r.supports(dir) {
                    continue;
                }
                let (from, to) = r.sides(dir);
                for p in r.matches(c.gates(), dir) {
                    let out = apply_rule_gates(c.gates(), r, p, dir).unwrap();
                    let out = QuantumCircuit::from_gates(c.qreg(), out).unwrap();
                    prop_assert_eq!(out.len() as i64 - c.len() as i64, to.len() as i64 - from.len() as i64);
                    let (u, v) = (denote_gates(c.qreg(), c.gates(), CONV).unwrap(), denote_gates(c.qreg(), out.gates(), CONV).unwrap());
                    prop_assert!(equal_in_mode(&u, &v, r.mode, TOL));
                    if rng.gen_bool(0.5) {
                        break;
                    }
                }
            }
        }
    }
}

/// A short random rewrite chain from `seed`, so the prover has something to find.
fn rewritten(seed: u64) -> (QuantumCircuit, QuantumCircuit) {
    let rules = RuleSet::standard(CONV);
    let c = circuit(seed, 3, 6);
    let mut rng = gen::rng(seed);
    let mut gates = c.gates().to_vec();
    for _ in 0..rng.gen_range(0..=2) {
        let mut sites = Vec::new();
        for r in rules.usable() {
            for d in [Direction::Forward, Direction::Backward] {
                if r.supports(d) {
                    sites.extend(r.matches(&gates, d).into_iter().map(|p| (r, d, p)));
                }
            }
        }
        if sites.is_empty() {
            break;
        }
        let (r, d, p) = sites[rng.gen_range(0..sites.len())];
        gates = apply_rule_gates(&gates, r, p, d).unwrap();
    }
    let end = QuantumCircuit::from_gates(c.qreg(), gates).unwrap();
    (c, end)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn proofs_are_sound_and_reversible(seed in any::<u64>()) {
        let (a, b) = rewritten(seed);
        let cfg = ProverConfig { budget: 2_000, convention: CONV };
        if let ProofResult::Proved(trace) = equiv_prove(&a, &b, &cfg).unwrap() {
            let (u, v) = (denote_gates(a.qreg(), a.gates(), CONV).unwrap(), denote_gates(b.qreg(), b.gates(), CONV).unwrap());
            prop_assert!(equal_in_mode(&u, &v, trace.mode, TOL));
            let rules = RuleSet::standard(CONV);
            trace.replay(rules).unwrap();
            let back = trace.reversed();
            back.replay(rules).unwrap();
            prop_assert_eq!(back.start_circuit().unwrap(), trace.end_circuit().unwrap());
            prop_assert_eq!(back.end_circuit().unwrap(), trace.start_circuit().unwrap());
        }
    }

    #[test]
    fn pipeline_preserves_semantics(seed in any::<u64>()) {
        let c = circuit(seed, 5, 14);
        let cmap = CouplingMap::line(5);
        let passes = parse_pipeline(
            "commutation_analysis,commutative_cancellation,collect_2q_blocks,optimize_1q_gates,basic_swap,optimize_1q_gates",
        ).unwrap();
        let r = run_pass_manager(&passes, &c, Some(&cmap), ManagerOptions::default()).unwrap();
        prop_assert!(r.aborted.is_none(), "{:?}", r.aborted);
        let m = r.mapped();
        prop_assert!(m.is_coupling_compliant(&cmap));
        prop_assert!(m.equivalent_to(&c, CONV, EqualityMode::UpToPhase, TOL).unwrap());
    }

    #[test]
    fn optimize_is_idempotent_and_analyses_are_read_only(seed in any::<u64>()) {
        let c = guarded_circuit(seed);
        let mut once = DAGCircuit::from_circuit(&c);
        let opt = Optimize1qConfig { convention: CONV, merge_conditioned: false };
        optimize_1q_gates(&mut once, opt).unwrap();
        let mut twice = once.clone();
        optimize_1q_gates(&mut twice, opt).unwrap();
        prop_assert_eq!(twice.to_circuit(), once.to_circuit());

        let d = DAGCircuit::from_circuit(&c);
        let h = d.structural_hash();
        let _ = commutation_analysis(&d, Grouping::AllPairs);
        let _ = collect_2q_blocks(&d);
        prop_assert_eq!(d.structural_hash(), h);
    }

    #[test]
    fn validator_never_passes_an_inequivalent_pair(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let c = circuit(seed, 5, 12);
        let cmap = CouplingMap::line(5);
        let m = basic_swap(&DAGCircuit::from_circuit(&c), &cmap, None).unwrap();
        let v = validate_swap_insertion(&c, &m).unwrap();
        prop_assert_eq!(v.status, Status::Valid);
        // Inserted swaps cost two moves; swaps already in the input cost three.
        prop_assert!(v.trace.len() <= 3 * m.swaps() + 1);

        // Corrupt one gate; a VALID verdict must still mean equivalence.
        let mut gates = m.circuit().gates().to_vec();
        if gates.is_empty() {
            return Ok(());
        }
        let i = pick.index(gates.len());
        gates[i] = if gates[i].qubits().len() == 2 {
            Gate::cx(gates[i].qubits()[1], gates[i].qubits()[0])
        } else {
            Gate::x(gates[i].qubits()[0])
        };
        let bent = QuantumCircuit::from_gates(m.circuit().qreg(), gates).unwrap();
        let bent = qtv_core::passes::MappedCircuit::new(DAGCircuit::from_circuit(&bent), m.initial_layout.clone(), m.final_layout.clone()).unwrap();
        if validate_swap_insertion(&c, &bent).unwrap().status == Status::Valid {
            prop_assert!(bent.equivalent_to(&c, CONV, EqualityMode::Exact, TOL).unwrap());
        }
    }
}

#[test]
fn phase_invisible_on_bloch_sphere_but_not_under_control() {
    // XZXZ = -I: the same Bloch rotation as the identity.
    let plain = [Gate::x(0), Gate::z(0), Gate::x(0), Gate::z(0)];
    let u = denote_gates(1, &plain, CONV).unwrap();
    assert!(phase_equal(&u, &Unitary::identity(1), TOL));
    assert!(!unitary_equal(&u, &Unitary::identity(1), TOL));
    let controlled: Vec<Gate> = plain.iter().map(|g| g.clone().with_q_if(1)).collect();
    let c = QuantumCircuit::from_gates(2, controlled).unwrap();
    let cu = denote_lowered(&c, CONV).unwrap();
    assert!(!phase_equal(&cu, &Unitary::identity(2), TOL));
}

#[test]
fn oracle_agrees_with_itself_across_layouts() {
    let c = QuantumCircuit::from_gates(3, vec![Gate::h(0), Gate::cx(0, 2)]).unwrap();
    let m = basic_swap(&DAGCircuit::from_circuit(&c), &CouplingMap::line(3), Some(&Layout::trivial(3))).unwrap();
    assert!(m.equivalent_to(&c, CONV, EqualityMode::Exact, TOL).unwrap());
    assert!(!oracle_equal(&c, &m.circuit(), CONV, EqualityMode::Exact, TOL).unwrap());
}
