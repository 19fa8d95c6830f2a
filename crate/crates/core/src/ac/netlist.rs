//! Line-oriented R/L/C netlist language.
//!
//! ```text
//! * comment
//! R1 1 0 332
//! Lm 1 2 17.59u
//! .ac lin 201 29g 31g
//! .probe 1 0
//! ```
//!
//! Node `0` is ground. Element names start with their kind letter
//! (case-insensitive) and must be unique.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::resonator::Spacing;
use crate::units::{parse_value, ValueError};

pub const GROUND: &str = "0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    R,
    L,
    C,
}

impl ElementKind {
    fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'R' => Some(ElementKind::R),
            'L' => Some(ElementKind::L),
            'C' => Some(ElementKind::C),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    /// Full name including the kind letter, e.g. `Rm`.
    pub name: String,
    pub a: String,
    pub b: String,
    /// Ω, H or F depending on `kind`.
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcSweep {
    pub spacing: Spacing,
    pub points: usize,
    pub start: f64,
    pub stop: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Netlist {
    pub elements: Vec<Element>,
    pub sweep: Option<AcSweep>,
    pub probe: Option<Probe>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagnosticCode {
    /// Element name does not start with R, L or C.
    UnknownKind,
    /// Value is not a number with an optional engineering suffix.
    BadValue,
    /// Node has no path to ground.
    DanglingNode,
    /// No element touches node 0.
    MissingGround,
    DuplicateName,
    NonPositiveValue,
    /// Wrong token count or an element connected to itself.
    MalformedStatement,
    /// Unknown directive or bad directive arguments.
    BadDirective,
    /// Probe names a node no element connects to.
    UnknownProbeNode,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::UnknownKind => "E001",
            DiagnosticCode::BadValue => "E002",
            DiagnosticCode::DanglingNode => "E003",
            DiagnosticCode::MissingGround => "E004",
            DiagnosticCode::DuplicateName => "E005",
            DiagnosticCode::NonPositiveValue => "E006",
            DiagnosticCode::MalformedStatement => "E007",
            DiagnosticCode::BadDirective => "E008",
            DiagnosticCode::UnknownProbeNode => "E009",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parse problem at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {} {}", self.line, self.column, self.code, self.message)
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: line[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: line[..s].chars().count() + 1 });
    }
    out
}

fn show(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) { format!("{v}") } else { format!("{v:e}") }
}

struct Parser {
    diags: Vec<Diagnostic>,
    netlist: Netlist,
    names: HashSet<String>,
    /// First (line, column) at which each node appears.
    node_sites: HashMap<String, (usize, usize)>,
    probe_site: Option<(usize, usize, usize)>,
}

impl Parser {
    fn diag(&mut self, code: DiagnosticCode, line: usize, column: usize, message: impl Into<String>) {
        self.diags.push(Diagnostic { code, line, column, message: message.into() });
    }

    fn value(&mut self, tok: &Token, line: usize) -> Option<f64> {
        match parse_value(tok.text) {
            Ok(v) => Some(v),
            Err(e) => {
                let column = match &e {
                    ValueError::BadSuffix { offset, .. } => tok.column + offset,
                    _ => tok.column,
                };
                self.diag(DiagnosticCode::BadValue, line, column, e.to_string());
                None
            }
        }
    }

    fn element(&mut self, toks: &[Token], line: usize) {
        let name_tok = &toks[0];
        let first = name_tok.text.chars().next().unwrap_or(' ');
        let Some(kind) = ElementKind::from_letter(first) else {
            self.diag(
                DiagnosticCode::UnknownKind,
                line,
                name_tok.column,
                format!("unknown element kind `{first}` (expected R, L or C)"),
            );
            return;
        };
        if toks.len() != 4 {
            self.diag(
                DiagnosticCode::MalformedStatement,
                line,
                name_tok.column,
                format!("element needs `<name> <node> <node> <value>`, got {} token(s)", toks.len()),
            );
            return;
        }
        if name_tok.text.chars().count() < 2 {
            self.diag(DiagnosticCode::MalformedStatement, line, name_tok.column, "element name is empty after the kind letter");
            return;
        }
        let (a, b) = (toks[1].text, toks[2].text);
        if a == b {
            self.diag(DiagnosticCode::MalformedStatement, line, toks[2].column, format!("element connects node `{a}` to itself"));
            return;
        }
        let Some(value) = self.value(&toks[3], line) else { return };
        if !(value > 0.0 && value.is_finite()) {
            self.diag(DiagnosticCode::NonPositiveValue, line, toks[3].column, format!("element value must be > 0, got {}", show(value)));
            return;
        }
        if !self.names.insert(name_tok.text.to_ascii_lowercase()) {
            self.diag(
                DiagnosticCode::DuplicateName,
                line,
                name_tok.column,
                format!("element `{}` is already defined", name_tok.text),
            );
            return;
        }
        for t in &toks[1..3] {
            self.node_sites.entry(t.text.to_string()).or_insert((line, t.column));
        }
        self.netlist.elements.push(Element {
            kind,
            name: name_tok.text.to_string(),
            a: a.to_string(),
            b: b.to_string(),
            value,
        });
    }

    fn directive(&mut self, toks: &[Token], line: usize) {
        let head = toks[0].text.to_ascii_lowercase();
        match head.as_str() {
            ".ac" => self.ac(toks, line),
            ".probe" => {
                if toks.len() != 3 {
                    self.diag(DiagnosticCode::BadDirective, line, toks[0].column, "`.probe` takes two nodes");
                } else if self.netlist.probe.is_some() {
                    self.diag(DiagnosticCode::BadDirective, line, toks[0].column, "duplicate `.probe`");
                } else if toks[1].text == toks[2].text {
                    self.diag(DiagnosticCode::BadDirective, line, toks[2].column, "probe nodes must differ");
                } else {
                    self.netlist.probe = Some(Probe { a: toks[1].text.into(), b: toks[2].text.into() });
                    self.probe_site = Some((line, toks[1].column, toks[2].column));
                }
            }
            _ => self.diag(DiagnosticCode::BadDirective, line, toks[0].column, format!("unknown directive `{}`", toks[0].text)),
        }
    }

    fn ac(&mut self, toks: &[Token], line: usize) {
        let bad = |p: &mut Parser, col: usize, msg: String| p.diag(DiagnosticCode::BadDirective, line, col, msg);
        if toks.len() != 5 {
            return bad(self, toks[0].column, "`.ac` takes `lin|log <points> <fstart> <fstop>`".into());
        }
        if self.netlist.sweep.is_some() {
            return bad(self, toks[0].column, "duplicate `.ac`".into());
        }
        let spacing = match toks[1].text.to_ascii_lowercase().as_str() {
            "lin" => Spacing::Linear,
            "log" => Spacing::Log,
            other => return bad(self, toks[1].column, format!("sweep spacing must be `lin` or `log`, got `{other}`")),
        };
        let points = match toks[2].text.parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => return bad(self, toks[2].column, format!("point count must be a positive integer, got `{}`", toks[2].text)),
        };
        let Some(start) = self.value(&toks[3], line) else { return };
        let Some(stop) = self.value(&toks[4], line) else { return };
        if !(start > 0.0 && start.is_finite()) {
            return bad(self, toks[3].column, format!("start frequency must be > 0, got {}", show(start)));
        }
        if !(stop.is_finite() && (stop > start || (points == 1 && stop == start))) {
            return bad(self, toks[4].column, format!("stop frequency {} must exceed start {}", show(stop), show(start)));
        }
        self.netlist.sweep = Some(AcSweep { spacing, points, start, stop });
    }

    fn check_graph(&mut self, last_line: usize) {
        if self.netlist.elements.is_empty() && self.diags.is_empty() {
            self.diag(DiagnosticCode::MissingGround, last_line.max(1), 1, "netlist has no elements");
            return;
        }
        if !self.node_sites.is_empty() && !self.node_sites.contains_key(GROUND) {
            self.diag(DiagnosticCode::MissingGround, last_line.max(1), 1, "no element connects to ground node `0`");
        } else if self.node_sites.contains_key(GROUND) {
            let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
            for e in &self.netlist.elements {
                adj.entry(&e.a).or_default().push(&e.b);
                adj.entry(&e.b).or_default().push(&e.a);
            }
            let mut seen: HashSet<&str> = HashSet::from([GROUND]);
            let mut queue = VecDeque::from([GROUND]);
            while let Some(n) = queue.pop_front() {
                for &m in adj.get(n).into_iter().flatten() {
                    if seen.insert(m) {
                        queue.push_back(m);
                    }
                }
            }
            let mut dangling: Vec<(String, (usize, usize))> = self
                .node_sites
                .iter()
                .filter(|(n, _)| !seen.contains(n.as_str()))
                .map(|(n, s)| (n.clone(), *s))
                .collect();
            dangling.sort_by_key(|(_, s)| *s);
            for (node, (line, col)) in dangling {
                self.diag(DiagnosticCode::DanglingNode, line, col, format!("node `{node}` has no path to ground"));
            }
        }
        if let (Some(p), Some((line, ca, cb))) = (self.netlist.probe.clone(), self.probe_site) {
            for (node, col) in [(&p.a, ca), (&p.b, cb)] {
                if !self.node_sites.contains_key(node) {
                    self.diag(DiagnosticCode::UnknownProbeNode, line, col, format!("probe node `{node}` is not connected to any element"));
                }
            }
        }
    }
}

/// Parse netlist text, returning every problem found.
pub fn parse_netlist(text: &str) -> Result<Netlist, Vec<Diagnostic>> {
    let mut p = Parser {
        diags: Vec::new(),
        netlist: Netlist::default(),
        names: HashSet::new(),
        node_sites: HashMap::new(),
        probe_site: None,
    };
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let toks = tokenize(raw);
        let Some(first) = toks.first() else { continue };
        if first.text.starts_with('*') {
            continue;
        }
        if first.text.starts_with('.') {
            p.directive(&toks, line);
        } else {
            p.element(&toks, line);
        }
    }
    p.check_graph(last_line);
    if p.diags.is_empty() {
        Ok(p.netlist)
    } else {
        p.diags.sort_by_key(|d| (d.line, d.column));
        Err(p.diags)
    }
}

/// Text form that parses back to an identical netlist.
pub fn serialize_netlist(netlist: &Netlist) -> String {
    let mut out = String::new();
    for e in &netlist.elements {
        out.push_str(&format!("{} {} {} {:e}\n", e.name, e.a, e.b, e.value));
    }
    if let Some(s) = &netlist.sweep {
        let spacing = match s.spacing {
            Spacing::Linear => "lin",
            Spacing::Log => "log",
        };
        out.push_str(&format!(".ac {spacing} {} {:e} {:e}\n", s.points, s.start, s.stop));
    }
    if let Some(p) = &netlist.probe {
        out.push_str(&format!(".probe {} {}\n", p.a, p.b));
    }
    out
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_netlist(self))
    }
}
