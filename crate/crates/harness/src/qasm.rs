//! OpenQASM 2.0 subset: `ry`, `rz`, `cx`, and `measure` on one register.

use std::fmt::Write as _;

use thiserror::Error;
use treeprep_core::circuit::{AnsatzSpec, Circuit, Gate, ParameterVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QasmError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported gate `{name}` at {line}:{column}")]
    UnsupportedGate {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("circuit does not match the ansatz: {0}")]
    Mismatch(String),
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros trimmed.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Serialize a gate list, in simulation order, with final measurements.
pub fn emit_circuit(circuit: &Circuit) -> String {
    let n = circuit.n_qubits;
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{n}];\ncreg c[{n}];");
    for g in &circuit.gates {
        let _ = match *g {
            Gate::Ry { qubit, angle } => writeln!(out, "ry({}) q[{qubit}];", format_angle(angle)),
            Gate::Rz { qubit, angle } => writeln!(out, "rz({}) q[{qubit}];", format_angle(angle)),
            Gate::Cx { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
        };
    }
    for q in 0..n {
        let _ = writeln!(out, "measure q[{q}] -> c[{q}];");
    }
    out
}

pub fn emit_qasm(spec: &AnsatzSpec, theta: &ParameterVector) -> treeprep_core::Result<String> {
    Ok(emit_circuit(&spec.circuit(theta)?))
}

/// Gate list and rotation angles recovered from QASM text.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCircuit {
    pub circuit: Circuit,
    /// Rotation angles in gate order.
    pub angles: Vec<f64>,
}

impl ParsedCircuit {
    /// Angles as ansatz parameters, checking that the gate structure matches.
    pub fn parameters_for(&self, spec: &AnsatzSpec) -> Result<ParameterVector, QasmError> {
        let template = spec
            .circuit(&ParameterVector::zeros(spec.param_count()))
            .map_err(|e| QasmError::Mismatch(e.to_string()))?;
        if template.n_qubits != self.circuit.n_qubits
            || template.gates.len() != self.circuit.gates.len()
        {
            return Err(QasmError::Mismatch(format!(
                "expected {} gates on {} qubits, found {} on {}",
                template.gates.len(),
                template.n_qubits,
                self.circuit.gates.len(),
                self.circuit.n_qubits
            )));
        }
        for (i, (a, b)) in template.gates.iter().zip(&self.circuit.gates).enumerate() {
            let same = match (a, b) {
                (Gate::Ry { qubit: p, .. }, Gate::Ry { qubit: q, .. })
                | (Gate::Rz { qubit: p, .. }, Gate::Rz { qubit: q, .. }) => p == q,
                (x @ Gate::Cx { .. }, y @ Gate::Cx { .. }) => x == y,
                _ => false,
            };
            if !same {
                return Err(QasmError::Mismatch(format!("gate {i} differs from the ansatz")));
            }
        }
        Ok(ParameterVector::new(self.angles.clone()))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    Sym(char),
    Arrow,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> QasmError {
    QasmError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn advance(n: usize, i: &mut usize, col: &mut usize) {
    *i += n;
    *col += n;
}

fn lex(text: &str) -> Result<Vec<Token>, QasmError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            advance(1, &mut i, &mut col);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i, &mut col);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(1, &mut i, &mut col);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                advance(1, &mut i, &mut col);
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                advance(1, &mut i, &mut col);
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    advance(1, &mut i, &mut col);
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(1, &mut i, &mut col);
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse()
                .map_err(|_| syntax(l0, c0, format!("invalid number `{s}`")))?;
            out.push(Token {
                tok: Tok::Number(v),
                line: l0,
                column: c0,
            });
        } else if c == '"' {
            advance(1, &mut i, &mut col);
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                advance(1, &mut i, &mut col);
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(syntax(l0, c0, "unterminated string"));
            }
            let s = chars[start..i].iter().collect();
            advance(1, &mut i, &mut col);
            out.push(Token {
                tok: Tok::Str(s),
                line: l0,
                column: c0,
            });
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            advance(2, &mut i, &mut col);
            out.push(Token {
                tok: Tok::Arrow,
                line: l0,
                column: c0,
            });
        } else if "()[];,*/-".contains(c) {
            advance(1, &mut i, &mut col);
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                column: c0,
            });
        } else {
            return Err(syntax(l0, c0, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    qreg: Option<(String, usize)>,
    creg: Option<(String, usize)>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.end, |t| (t.line, t.column))
    }

    fn next(&mut self, what: &str) -> Result<Token, QasmError> {
        let (l, c) = self.here();
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| syntax(l, c, format!("expected {what}, found end of input")))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_sym(&mut self, s: char) -> Result<(), QasmError> {
        let t = self.next(&format!("`{s}`"))?;
        if t.tok == Tok::Sym(s) {
            Ok(())
        } else {
            Err(syntax(t.line, t.column, format!("expected `{s}`")))
        }
    }

    fn eat_sym(&mut self, s: char) -> bool {
        if self.peek().is_some_and(|t| t.tok == Tok::Sym(s)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), QasmError> {
        let t = self.next("identifier")?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.column)),
            _ => Err(syntax(t.line, t.column, "expected identifier")),
        }
    }

    fn integer(&mut self) -> Result<usize, QasmError> {
        let t = self.next("integer")?;
        match t.tok {
            Tok::Number(v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
            _ => Err(syntax(t.line, t.column, "expected non-negative integer")),
        }
    }

    /// expr := factor (('*' | '/') factor)*
    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.factor()?;
        loop {
            if self.eat_sym('*') {
                v *= self.factor()?;
            } else if self.eat_sym('/') {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    /// factor := '-' factor | number | 'pi' | '(' expr ')'
    fn factor(&mut self) -> Result<f64, QasmError> {
        let t = self.next("expression")?;
        match t.tok {
            Tok::Sym('-') => Ok(-self.factor()?),
            Tok::Number(v) => Ok(v),
            Tok::Ident(ref s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            _ => Err(syntax(t.line, t.column, "expected number, `pi`, or `(`")),
        }
    }

    fn register(&mut self) -> Result<(String, usize), QasmError> {
        let (name, _, _) = self.ident()?;
        self.expect_sym('[')?;
        let size = self.integer()?;
        self.expect_sym(']')?;
        self.expect_sym(';')?;
        Ok((name, size))
    }

    /// `name[i]` on the declared register named by `reg`.
    fn operand(&mut self, reg: &Option<(String, usize)>, kind: &str) -> Result<usize, QasmError> {
        let (name, l, c) = self.ident()?;
        let (decl, size) = reg
            .as_ref()
            .ok_or_else(|| syntax(l, c, format!("{kind} register used before declaration")))?;
        if &name != decl {
            return Err(syntax(l, c, format!("unknown register `{name}`")));
        }
        self.expect_sym('[')?;
        let (il, ic) = self.here();
        let i = self.integer()?;
        self.expect_sym(']')?;
        if i >= *size {
            return Err(syntax(il, ic, format!("index {i} out of range for `{name}`")));
        }
        Ok(i)
    }
}

/// Parse QASM in the emitted subset.
pub fn parse_qasm(text: &str) -> Result<ParsedCircuit, QasmError> {
    let toks = lex(text)?;
    let end = (text.lines().count().max(1), 1);
    let mut p = Parser {
        toks,
        pos: 0,
        end,
        qreg: None,
        creg: None,
    };
    let mut gates = Vec::new();
    let mut angles = Vec::new();
    let mut seen_header = false;
    while p.peek().is_some() {
        let (word, l, c) = p.ident()?;
        match word.as_str() {
            "OPENQASM" => {
                if seen_header || p.pos > 1 {
                    return Err(syntax(l, c, "OPENQASM header must come first"));
                }
                let t = p.next("version")?;
                if t.tok != Tok::Number(2.0) {
                    return Err(syntax(t.line, t.column, "only OPENQASM 2.0 is supported"));
                }
                p.expect_sym(';')?;
                seen_header = true;
            }
            "include" => {
                let t = p.next("file name")?;
                if !matches!(t.tok, Tok::Str(_)) {
                    return Err(syntax(t.line, t.column, "expected quoted file name"));
                }
                p.expect_sym(';')?;
            }
            "qreg" | "creg" => {
                let slot = if word == "qreg" { &p.qreg } else { &p.creg };
                if slot.is_some() {
                    return Err(syntax(l, c, format!("only one {word} is supported")));
                }
                let r = p.register()?;
                if word == "qreg" {
                    if r.1 == 0 {
                        return Err(syntax(l, c, "qreg must have at least one qubit"));
                    }
                    p.qreg = Some(r);
                } else {
                    p.creg = Some(r);
                }
            }
            "ry" | "rz" => {
                p.expect_sym('(')?;
                let angle = p.expr()?;
                p.expect_sym(')')?;
                let qreg = p.qreg.clone();
                let qubit = p.operand(&qreg, "quantum")?;
                p.expect_sym(';')?;
                angles.push(angle);
                gates.push(if word == "ry" {
                    Gate::Ry { qubit, angle }
                } else {
                    Gate::Rz { qubit, angle }
                });
            }
            "cx" => {
                let qreg = p.qreg.clone();
                let control = p.operand(&qreg, "quantum")?;
                p.expect_sym(',')?;
                let (tl, tc) = p.here();
                let target = p.operand(&qreg, "quantum")?;
                p.expect_sym(';')?;
                if control == target {
                    return Err(syntax(tl, tc, "cx control and target must differ"));
                }
                gates.push(Gate::Cx { control, target });
            }
            "measure" => {
                let (qreg, creg) = (p.qreg.clone(), p.creg.clone());
                let whole = p.toks.get(p.pos + 1).is_some_and(|t| t.tok == Tok::Arrow);
                if whole {
                    let (name, l, c) = p.ident()?;
                    if qreg.as_ref().is_none_or(|(q, _)| *q != name) {
                        return Err(syntax(l, c, format!("unknown register `{name}`")));
                    }
                    p.next("->")?;
                    let (name, l, c) = p.ident()?;
                    if creg.as_ref().is_none_or(|(r, _)| *r != name) {
                        return Err(syntax(l, c, format!("unknown register `{name}`")));
                    }
                } else {
                    p.operand(&qreg, "quantum")?;
                    let t = p.next("->")?;
                    if t.tok != Tok::Arrow {
                        return Err(syntax(t.line, t.column, "expected `->`"));
                    }
                    p.operand(&creg, "classical")?;
                }
                p.expect_sym(';')?;
            }
            other => {
                return Err(QasmError::UnsupportedGate {
                    name: other.to_string(),
                    line: l,
                    column: c,
                })
            }
        }
    }
    let (_, n) = p
        .qreg
        .ok_or_else(|| syntax(end.0, end.1, "missing qreg declaration"))?;
    let circuit = Circuit::new(n, gates).map_err(|e| syntax(end.0, end.1, e.to_string()))?;
    Ok(ParsedCircuit { circuit, angles })
}
