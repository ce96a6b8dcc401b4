use super::check::Violation;
use super::input::CaseInput;
use crate::device::{CouplingMap, Layout};
use crate::error::{Error, Result};
use crate::ir::{Gate, GateKind, QuantumCircuit};
use crate::qasm;

const QASM_MARK: &str = "--- qasm ---";

/// A failing input together with what it broke.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub op: String,
    /// Name of the violated obligation or monotone.
    pub obligation: String,
    /// One-line summary of the failure.
    pub detail: String,
    pub circuit: Option<QuantumCircuit>,
    pub coupling: Option<CouplingMap>,
    pub layout: Option<Layout>,
    /// Loop iteration at which a monotone stalled.
    pub iteration: Option<usize>,
}

impl Counterexample {
    pub fn new(op: impl Into<String>, obligation: impl Into<String>, detail: impl Into<String>) -> Counterexample {
        Counterexample {
            op: op.into(),
            obligation: obligation.into(),
            detail: detail.into(),
            circuit: None,
            coupling: None,
            layout: None,
            iteration: None,
        }
    }

    pub fn from_input<I: CaseInput>(op: &str, v: &Violation, input: &I) -> Counterexample {
        let mut ce = Counterexample::new(op, v.obligation.as_str(), v.detail.clone());
        ce.circuit = input.circuit();
        ce.coupling = input.coupling();
        ce.layout = input.layout();
        if ce.circuit.is_none() && ce.coupling.is_none() && ce.layout.is_none() {
            ce.detail = format!("{} on input {input:?}", ce.detail);
        }
        ce
    }
}

/// `CX(Q0,Q8)`-style label used in the gate listing.
pub fn gate_label(g: &Gate) -> String {
    let mut s = String::new();
    if let Some(c) = g.c_if {
        s.push_str(&format!("if(c=={})", c.value));
    }
    if let Some(q) = g.q_if {
        s.push_str(&format!("qif(Q{q})"));
    }
    s.push_str(&g.name().as_str().to_uppercase());
    let ps = g.kind.params();
    if !ps.is_empty() {
        let ps: Vec<String> = ps.iter().map(|&p| qasm::format_angle(p)).collect();
        s.push_str(&format!("[{}]", ps.join(",")));
    }
    let qs: Vec<String> = g.operands().iter().map(|q| format!("Q{q}")).collect();
    s.push_str(&format!("({})", qs.join(",")));
    s
}

fn cell(g: &Gate, q: usize) -> String {
    let ops = g.operands();
    if g.q_if == Some(q) {
        return "*".into();
    }
    let base = match (&g.kind, ops.iter().position(|&o| o == q)) {
        (_, None) => return "|".into(),
        (GateKind::CX, Some(0)) | (GateKind::CY, Some(0)) | (GateKind::CZ, _) => "*".to_string(),
        (GateKind::CX, Some(_)) => "X".to_string(),
        (GateKind::CY, Some(_)) => "Y".to_string(),
        (GateKind::Swap, _) => "x".to_string(),
        _ => {
            let ps = g.kind.params();
            if ps.is_empty() {
                g.name().as_str().to_string()
            } else {
                let ps: Vec<String> = ps.iter().map(|&p| qasm::format_angle(p)).collect();
                format!("{}({})", g.name().as_str(), ps.join(","))
            }
        }
    };
    match g.c_if {
        Some(c) if ops.first() == Some(&q) => format!("{base}[c={}]", c.value),
        _ => base,
    }
}

/// ASCII diagram: one row per used qubit, gates placed as early as their
/// row span allows.
pub fn diagram(c: &QuantumCircuit) -> String {
    let rows = c.used_qubits();
    if rows.is_empty() {
        return String::new();
    }
    let row_of = |q: usize| rows.binary_search(&q).expect("used qubit");
    let mut depth = vec![0usize; rows.len()];
    let mut columns: Vec<Vec<(usize, usize)>> = Vec::new();
    for (i, g) in c.gates().iter().enumerate() {
        let rs: Vec<usize> = g.qubits().into_iter().map(row_of).collect();
        let (lo, hi) = (*rs.iter().min().expect("gate has qubits"), *rs.iter().max().expect("gate has qubits"));
        let col = depth[lo..=hi].iter().copied().max().unwrap_or(0);
        for d in &mut depth[lo..=hi] {
            *d = col + 1;
        }
        if columns.len() <= col {
            columns.resize(col + 1, Vec::new());
        }
        columns[col].push((i, lo * rows.len() + hi));
    }
    let label_w = rows.iter().map(|q| format!("Q{q}").len()).max().unwrap_or(2);
    let mut lines: Vec<String> = rows.iter().map(|q| format!("{:<label_w$} : -", format!("Q{q}"))).collect();
    for col in &columns {
        let mut cells = vec![String::new(); rows.len()];
        for &(i, span) in col {
            let (lo, hi) = (span / rows.len(), span % rows.len());
            let g = &c.gates()[i];
            for (r, cell_text) in cells.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *cell_text = cell(g, rows[r]);
            }
        }
        let w = cells.iter().map(|s| s.len()).max().unwrap_or(1);
        for (line, s) in lines.iter_mut().zip(&cells) {
            line.push_str(s);
            line.push_str(&"-".repeat(w - s.len() + 1));
        }
    }
    lines.iter().map(|l| format!("{}\n", l.trim_end())).collect()
}

/// Deterministic text form; [`parse_counterexample`] reads it back.
pub fn render_counterexample(ce: &Counterexample) -> String {
    let mut out = format!("counterexample {}\n", ce.op);
    out.push_str(&format!("obligation: {}\n", ce.obligation));
    out.push_str(&format!("detail: {}\n", ce.detail.replace('\n', " ")));
    if let Some(k) = ce.iteration {
        out.push_str(&format!("iteration: {k}\n"));
    }
    if let Some(m) = &ce.coupling {
        out.push_str(&format!("coupling: {}\n", m.to_json()));
    }
    if let Some(l) = &ce.layout {
        out.push_str(&format!("layout: {} of {}\n", l.to_json(), l.num_physical()));
    }
    if let Some(c) = &ce.circuit {
        if !c.is_empty() {
            let labels: Vec<String> = c.gates().iter().map(gate_label).collect();
            out.push_str(&format!("gates: {}\n", labels.join(" ")));
            out.push('\n');
            out.push_str(&diagram(c));
        }
        out.push_str(QASM_MARK);
        out.push('\n');
        out.push_str(&qasm::print(c));
    }
    out
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column: 1,
        message: message.into(),
    }
}

pub fn parse_counterexample(text: &str) -> Result<Counterexample> {
    let (head, body) = match text.split_once(&format!("{QASM_MARK}\n")) {
        Some((h, b)) => (h, Some(b)),
        None => (text, None),
    };
    let mut lines = head.lines().enumerate();
    let op = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix("counterexample "))
        .ok_or_else(|| bad(1, "expected `counterexample <op>`"))?;
    let mut ce = Counterexample::new(op, "", "");
    for (i, line) in lines {
        let Some((key, value)) = line.split_once(": ") else {
            continue;
        };
        match key {
            "obligation" => ce.obligation = value.to_string(),
            "detail" => ce.detail = value.to_string(),
            "iteration" => ce.iteration = Some(value.parse().map_err(|_| bad(i + 1, "bad iteration"))?),
            "coupling" => ce.coupling = Some(CouplingMap::from_json(value)?),
            "layout" => {
                let (json, m) = value.rsplit_once(" of ").ok_or_else(|| bad(i + 1, "layout needs a size"))?;
                let m = m.parse().map_err(|_| bad(i + 1, "bad layout size"))?;
                ce.layout = Some(Layout::from_json(json, m)?);
            }
            _ => {}
        }
    }
    if let Some(b) = body {
        ce.circuit = Some(qasm::parse(b)?);
    }
    Ok(ce)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder_stall() -> QuantumCircuit {
        QuantumCircuit::from_gates(16, vec![Gate::cx(0, 8), Gate::cx(7, 14), Gate::cx(8, 7), Gate::cx(0, 14)]).unwrap()
    }

    #[test]
    fn four_rows_and_gate_list() {
        let mut ce = Counterexample::new("lookahead_swap", "-gates_remaining.size", "no progress");
        ce.circuit = Some(ladder_stall());
        ce.iteration = Some(0);
        let text = render_counterexample(&ce);
        assert!(text.contains("gates: CX(Q0,Q8) CX(Q7,Q14) CX(Q8,Q7) CX(Q0,Q14)\n"));
        let rows: Vec<&str> = text.lines().filter(|l| l.starts_with('Q')).collect();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0], "Q0  : -*-----*-");
        assert_eq!(rows[1], "Q7  : -|-*-X-|-");
        assert_eq!(rows[2], "Q8  : -X-|-*-|-");
        assert_eq!(rows[3], "Q14 : ---X---X-");
    }

    #[test]
    fn empty_circuit_is_header_only() {
        let mut ce = Counterexample::new("op", "pre=>post", "d");
        ce.circuit = Some(QuantumCircuit::new(2).unwrap());
        let text = render_counterexample(&ce);
        assert!(!text.contains("gates:"));
        assert!(!text.lines().any(|l| l.starts_with('Q')));
        assert_eq!(parse_counterexample(&text).unwrap(), ce);
    }

    #[test]
    fn round_trip_with_map_and_layout() {
        let mut ce = Counterexample::new("basic_swap", "pre=>post", "postcondition false");
        ce.circuit = Some(
            QuantumCircuit::from_gates(3, vec![Gate::u3(0.25, -1.0, 3.0, 2), Gate::x(1).with_c_if(1), Gate::h(0).with_q_if(2)])
                .unwrap(),
        );
        ce.coupling = Some(CouplingMap::line(4));
        ce.layout = Some(Layout::from_v2p(vec![3, 0, 1], 4).unwrap());
        let back = parse_counterexample(&render_counterexample(&ce)).unwrap();
        assert_eq!(back, ce);
    }
}
