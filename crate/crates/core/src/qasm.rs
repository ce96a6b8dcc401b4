//! OpenQASM 2.0 subset reader and writer.
//!
//! Supported statements: one `qreg`, at most one `creg`, the gate set of
//! [`GateName`], `measure q[i] -> c[j]` (read as `measz`), `if(c==V)` guards
//! and a `qif(q[k])` prefix for quantum-controlled gates. Angles are
//! arithmetic over decimal literals and `pi`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ir::{Gate, GateKind, GateName, QuantumCircuit};

/// Render an angle so that [`parse`] reads back the identical float.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    for den in 1..=64i64 {
        let num = (x * den as f64 / PI).round();
        if num == 0.0 || num.abs() > 1e6 {
            continue;
        }
        let n = num as i64;
        if gcd(n.unsigned_abs(), den as u64) != 1 {
            continue;
        }
        if n as f64 * PI / den as f64 == x {
            let sign = if n < 0 { "-" } else { "" };
            let m = n.abs();
            let head = if m == 1 { "pi".to_string() } else { format!("{m}*pi") };
            return if den == 1 {
                format!("{sign}{head}")
            } else {
                format!("{sign}{head}/{den}")
            };
        }
    }
    let a = x.abs();
    if (1e-5..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Gate statement without the trailing semicolon.
pub fn format_gate(g: &Gate) -> String {
    let mut s = String::new();
    if let Some(c) = g.c_if {
        s.push_str(&format!("if(c=={}) ", c.value));
    }
    if let Some(q) = g.q_if {
        s.push_str(&format!("qif(q[{q}]) "));
    }
    s.push_str(g.name().as_str());
    let params = g.kind.params();
    if !params.is_empty() {
        let ps: Vec<String> = params.iter().map(|&p| format_angle(p)).collect();
        s.push_str(&format!("({})", ps.join(",")));
    }
    let ops: Vec<String> = g.operands().iter().map(|q| format!("q[{q}]")).collect();
    s.push(' ');
    s.push_str(&ops.join(","));
    s
}

pub fn print(c: &QuantumCircuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    out.push_str(&format!("qreg q[{}];\n", c.qreg()));
    if c.cbits() > 0 {
        out.push_str(&format!("creg c[{}];\n", c.cbits()));
    }
    for g in c.gates() {
        out.push_str(&format_gate(g));
        out.push_str(";\n");
    }
    out
}

pub fn parse(src: &str) -> Result<QuantumCircuit> {
    Parser::new(src).circuit()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(char),
    Arrow,
    EqEq,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let line_no = li + 1;
        let code = match line.find("//") {
            Some(i) => &line[..i],
            None => line,
        };
        let chars: Vec<char> = code.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: line_no, col });
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    column: col,
                    message: format!("bad number {text:?}"),
                })?;
                push(&mut out, Tok::Num(v));
            } else if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(Error::Parse {
                        line: line_no,
                        column: col,
                        message: "unterminated string".into(),
                    });
                }
                push(&mut out, Tok::Str(chars[start..i].iter().collect()));
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                push(&mut out, Tok::Arrow);
                i += 2;
            } else if c == '=' && chars.get(i + 1) == Some(&'=') {
                push(&mut out, Tok::EqEq);
                i += 2;
            } else if "()[];,+-*/".contains(c) {
                push(&mut out, Tok::Sym(c));
                i += 1;
            } else {
                return Err(Error::Parse {
                    line: line_no,
                    column: col,
                    message: format!("unexpected character {c:?}"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    lex_error: Option<Error>,
}

impl Parser {
    fn new(src: &str) -> Parser {
        match lex(src) {
            Ok(toks) => Parser {
                toks,
                pos: 0,
                lex_error: None,
            },
            Err(e) => Parser {
                toks: Vec::new(),
                pos: 0,
                lex_error: Some(e),
            },
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        };
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            other => {
                let found = format!("{other:?}");
                self.err(format!("expected '{c}', found {found}"))
            }
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => {
                self.pos -= 1;
                self.err(format!("expected identifier, found {other:?}"))
            }
        }
    }

    fn uint(&mut self) -> Result<usize> {
        match self.next() {
            Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
            other => {
                self.pos -= 1;
                self.err(format!("expected non-negative integer, found {other:?}"))
            }
        }
    }

    fn circuit(mut self) -> Result<QuantumCircuit> {
        if let Some(e) = self.lex_error.take() {
            return Err(e);
        }
        let mut qreg: Option<(String, usize)> = None;
        let mut creg: Option<(String, usize)> = None;
        let mut gates = Vec::new();
        while self.peek().is_some() {
            let word = self.ident()?;
            match word.as_str() {
                "OPENQASM" => {
                    match self.next() {
                        Some(Tok::Num(_)) => {}
                        _ => {
                            self.pos -= 1;
                            return self.err("expected version number");
                        }
                    }
                    self.expect_sym(';')?;
                }
                "include" => {
                    match self.next() {
                        Some(Tok::Str(_)) => {}
                        _ => {
                            self.pos -= 1;
                            return self.err("expected file name");
                        }
                    }
                    self.expect_sym(';')?;
                }
                "qreg" | "creg" => {
                    let name = self.ident()?;
                    self.expect_sym('[')?;
                    let size = self.uint()?;
                    self.expect_sym(']')?;
                    self.expect_sym(';')?;
                    let slot = if word == "qreg" { &mut qreg } else { &mut creg };
                    if slot.is_some() {
                        self.pos -= 1;
                        return self.err(format!("only one {word} is supported"));
                    }
                    *slot = Some((name, size));
                }
                _ => {
                    let Some((qname, qsize)) = qreg.clone() else {
                        self.pos -= 1;
                        return self.err("gate before qreg declaration");
                    };
                    let start = self.pos - 1;
                    let g = self.statement(word, &qname, qsize, creg.as_ref())?;
                    let cbits = creg.as_ref().map_or(0, |c| c.1);
                    if let Err(e) = crate::ir::QuantumCircuit::from_parts(qsize, cbits, vec![g.clone()]) {
                        self.pos = start;
                        return self.err(e.to_string());
                    }
                    gates.push(g);
                }
            }
        }
        let Some((_, qsize)) = qreg else {
            return self.err("missing qreg declaration");
        };
        let cbits = creg.map_or(0, |c| c.1);
        QuantumCircuit::from_parts(qsize, cbits, gates)
    }

    fn qubit_ref(&mut self, qname: &str, qsize: usize) -> Result<usize> {
        let name = self.ident()?;
        if name != qname {
            self.pos -= 1;
            return self.err(format!("unknown register {name:?}"));
        }
        self.expect_sym('[')?;
        let idx = self.uint()?;
        if idx >= qsize {
            self.pos -= 1;
            return self.err(format!("qubit {idx} out of range for qreg of size {qsize}"));
        }
        self.expect_sym(']')?;
        Ok(idx)
    }

    fn statement(
        &mut self,
        mut word: String,
        qname: &str,
        qsize: usize,
        creg: Option<&(String, usize)>,
    ) -> Result<Gate> {
        let mut c_if = None;
        let mut q_if = None;
        if word == "if" {
            self.expect_sym('(')?;
            let name = self.ident()?;
            if creg.map(|c| c.0.as_str()) != Some(name.as_str()) {
                self.pos -= 1;
                return self.err(format!("unknown classical register {name:?}"));
            }
            if self.next() != Some(Tok::EqEq) {
                self.pos -= 1;
                return self.err("expected '=='");
            }
            c_if = Some(self.uint()? as u64);
            self.expect_sym(')')?;
            word = self.ident()?;
        }
        if word == "qif" {
            self.expect_sym('(')?;
            q_if = Some(self.qubit_ref(qname, qsize)?);
            self.expect_sym(')')?;
            word = self.ident()?;
        }
        if word == "measure" {
            let q = self.qubit_ref(qname, qsize)?;
            if self.next() != Some(Tok::Arrow) {
                self.pos -= 1;
                return self.err("expected '->'");
            }
            let cname = self.ident()?;
            if creg.map(|c| c.0.as_str()) != Some(cname.as_str()) {
                self.pos -= 1;
                return self.err(format!("unknown classical register {cname:?}"));
            }
            self.expect_sym('[')?;
            self.uint()?;
            self.expect_sym(']')?;
            self.expect_sym(';')?;
            return self.finish(Gate::measz(q), c_if, q_if);
        }
        let Some(name) = GateName::from_str_name(&word) else {
            self.pos -= 1;
            return self.err(format!("unknown gate {word:?}"));
        };
        let mut params = Vec::new();
        if self.eat_sym('(') {
            if !self.eat_sym(')') {
                loop {
                    params.push(self.expr()?);
                    if self.eat_sym(')') {
                        break;
                    }
                    self.expect_sym(',')?;
                }
            }
        }
        let kind = match GateKind::from_parts(name, &params) {
            Ok(k) => k,
            Err(e) => return self.err(e.to_string()),
        };
        let mut ops = vec![self.qubit_ref(qname, qsize)?];
        while self.eat_sym(',') {
            ops.push(self.qubit_ref(qname, qsize)?);
        }
        self.expect_sym(';')?;
        match Gate::new(kind, ops) {
            Ok(g) => self.finish(g, c_if, q_if),
            Err(e) => {
                self.pos -= 1;
                self.err(e.to_string())
            }
        }
    }

    fn finish(&self, mut g: Gate, c_if: Option<u64>, q_if: Option<usize>) -> Result<Gate> {
        if let Some(v) = c_if {
            g = g.with_c_if(v);
        }
        if let Some(q) = q_if {
            g = g.with_q_if(q);
        }
        Ok(g)
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym('*') {
                v *= self.unary()?;
            } else if self.eat_sym('/') {
                let d = self.unary()?;
                if d == 0.0 {
                    return self.err("division by zero");
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        match self.next() {
            Some(Tok::Num(v)) => Ok(v),
            Some(Tok::Ident(s)) if s == "pi" => Ok(PI),
            Some(Tok::Sym('(')) => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            other => {
                self.pos -= 1;
                self.err(format!("expected angle expression, found {other:?}"))
            }
        }
    }
}
