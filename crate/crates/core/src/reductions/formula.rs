//! Propositional and quantified formulas in clause form, their DIMACS and
//! QDIMACS readers, and brute-force evaluators.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("the formula has no clauses")]
    NoClauses,
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("variable {var} out of range 1..={k}")]
    VariableOutOfRange { var: usize, k: usize },
    #[error("the formula needs at least one variable")]
    NoVariables,
}

/// A literal over `x_var` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    /// Whether assigning `value` to this literal's variable makes it true.
    pub fn holds_with(self, value: bool) -> bool {
        self.positive == value
    }
}

/// A CNF formula over `x_1 .. x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    k: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(k: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, FormulaError> {
        check_clauses(k, &clauses, |l| l.var)?;
        Ok(CnfFormula { k, clauses })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// `assignment[i]` is the value of `x_{i+1}`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.holds_with(assignment[l.var - 1])))
    }
}

/// Variables of a QBF `∀x_1 ∃y_1 … ∀x_k ∃y_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QVar {
    X(usize),
    Y(usize),
}

impl QVar {
    pub fn index(self) -> usize {
        match self {
            QVar::X(i) | QVar::Y(i) => i,
        }
    }

    /// Position in the quantifier prefix, 0-based: `x_1, y_1, x_2, ...`.
    pub fn order(self) -> usize {
        match self {
            QVar::X(i) => 2 * (i - 1),
            QVar::Y(i) => 2 * (i - 1) + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QLiteral {
    pub var: QVar,
    pub positive: bool,
}

impl QLiteral {
    pub fn holds_with(self, value: bool) -> bool {
        self.positive == value
    }
}

impl fmt::Display for QLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = if self.positive { "" } else { "!" };
        match self.var {
            QVar::X(i) => write!(f, "{neg}x{i}"),
            QVar::Y(i) => write!(f, "{neg}y{i}"),
        }
    }
}

/// A QBF `∀x_1 ∃y_1 … ∀x_k ∃y_k: C_1 ∧ … ∧ C_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfFormula {
    k: usize,
    clauses: Vec<Vec<QLiteral>>,
}

impl QbfFormula {
    pub fn new(k: usize, clauses: Vec<Vec<QLiteral>>) -> Result<Self, FormulaError> {
        check_clauses(k, &clauses, |l| l.var.index())?;
        Ok(QbfFormula { k, clauses })
    }

    /// Builds a formula from clauses written as `"x1 !y1"` style strings.
    pub fn parse_clauses(k: usize, clauses: &[&str]) -> Result<Self, FormulaError> {
        let mut out = Vec::new();
        for (j, c) in clauses.iter().enumerate() {
            let mut clause = Vec::new();
            for tok in c.split_whitespace() {
                let (positive, rest) = match tok.strip_prefix('!') {
                    Some(r) => (false, r),
                    None => (true, tok),
                };
                let bad = || FormulaError::Parse { line: j + 1, message: format!("bad literal `{tok}`") };
                let idx: usize = rest.get(1..).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                let var = match rest.as_bytes().first() {
                    Some(b'x') => QVar::X(idx),
                    Some(b'y') => QVar::Y(idx),
                    _ => return Err(bad()),
                };
                clause.push(QLiteral { var, positive });
            }
            out.push(clause);
        }
        QbfFormula::new(k, out)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clauses(&self) -> &[Vec<QLiteral>] {
        &self.clauses
    }

    /// `values` lists `x_1, y_1, x_2, y_2, ...` in prefix order.
    pub fn eval(&self, values: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.holds_with(values[l.var.order()])))
    }

    /// Whether clause `j` (0-based) is satisfied by a partial assignment
    /// of the first `values.len()` prefix variables.
    pub fn clause_satisfied_by(&self, j: usize, values: &[bool]) -> bool {
        self.clauses[j]
            .iter()
            .any(|l| l.var.order() < values.len() && l.holds_with(values[l.var.order()]))
    }
}

impl fmt::Display for QbfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.k {
            write!(f, "A x{i} E y{i} ")?;
        }
        f.write_str(":")?;
        for (j, c) in self.clauses.iter().enumerate() {
            if j > 0 {
                f.write_str(" &")?;
            }
            let lits: Vec<String> = c.iter().map(|l| l.to_string()).collect();
            write!(f, " ({})", lits.join(" | "))?;
        }
        Ok(())
    }
}

fn check_clauses<L>(k: usize, clauses: &[Vec<L>], var: impl Fn(&L) -> usize) -> Result<(), FormulaError> {
    if k == 0 {
        return Err(FormulaError::NoVariables);
    }
    if clauses.is_empty() {
        return Err(FormulaError::NoClauses);
    }
    for (j, c) in clauses.iter().enumerate() {
        if c.is_empty() {
            return Err(FormulaError::EmptyClause(j + 1));
        }
        for l in c {
            let v = var(l);
            if v == 0 || v > k {
                return Err(FormulaError::VariableOutOfRange { var: v, k });
            }
        }
    }
    Ok(())
}

/// Exhaustive truth-value search over `x_1 .. x_k` in binary counting
/// order. Returns the first satisfying assignment.
pub fn sat_brute_force(phi: &CnfFormula) -> Option<Vec<bool>> {
    assert!(phi.k() <= 20, "brute force is limited to 20 variables");
    (0u32..1 << phi.k()).find_map(|bits| {
        let a: Vec<bool> = (0..phi.k()).map(|i| bits >> (phi.k() - 1 - i) & 1 == 1).collect();
        phi.eval(&a).then_some(a)
    })
}

/// Evaluates the quantifier prefix by recursive expansion.
pub fn qbf_brute_force(psi: &QbfFormula) -> bool {
    assert!(psi.k() <= 10, "brute force is limited to 20 variables");
    let mut values = Vec::with_capacity(2 * psi.k());
    expand(psi, &mut values)
}

fn expand(psi: &QbfFormula, values: &mut Vec<bool>) -> bool {
    if values.len() == 2 * psi.k() {
        return psi.eval(values);
    }
    let universal = values.len() % 2 == 0;
    let branch = |v: bool, values: &mut Vec<bool>| {
        values.push(v);
        let r = expand(psi, values);
        values.pop();
        r
    };
    if universal {
        branch(false, values) && branch(true, values)
    } else {
        branch(false, values) || branch(true, values)
    }
}

/// A value for the next universal variable after `prefix` (which has even
/// length) under which the existential player cannot satisfy the formula.
pub fn falsifying_choice(psi: &QbfFormula, prefix: &[bool]) -> Option<bool> {
    assert!(prefix.len() % 2 == 0 && prefix.len() < 2 * psi.k());
    let mut values = prefix.to_vec();
    [false, true].into_iter().find(|&v| {
        values.push(v);
        let r = !expand(psi, &mut values);
        values.pop();
        r
    })
}

fn perr(line: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Parse { line, message: message.into() }
}

struct Dimacs {
    vars: usize,
    prefix: Vec<(char, Vec<usize>, usize)>,
    clauses: Vec<(usize, Vec<i64>)>,
}

fn read_dimacs(text: &str, quantified: bool) -> Result<Dimacs, FormulaError> {
    let mut header: Option<(usize, usize)> = None;
    let mut prefix = Vec::new();
    let mut clauses = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    let mut pending_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if let Some(rest) = t.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if header.is_some() {
                return Err(perr(line, "duplicate problem line"));
            }
            if f.len() != 3 || f[0] != "cnf" {
                return Err(perr(line, "expected `p cnf <vars> <clauses>`"));
            }
            let n = f[1].parse().map_err(|_| perr(line, "bad variable count"))?;
            let m = f[2].parse().map_err(|_| perr(line, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        if header.is_none() {
            return Err(perr(line, "missing problem line"));
        }
        if t.starts_with('a') || t.starts_with('e') {
            if !quantified {
                return Err(perr(line, "quantifier line in a CNF file"));
            }
            if !clauses.is_empty() || !pending.is_empty() {
                return Err(perr(line, "quantifier line after clauses"));
            }
            let q = t.chars().next().unwrap();
            let mut vars = Vec::new();
            let mut closed = false;
            for tok in t[1..].split_whitespace() {
                let v: usize = tok.parse().map_err(|_| perr(line, format!("bad variable `{tok}`")))?;
                if closed {
                    return Err(perr(line, "tokens after terminating 0"));
                }
                if v == 0 {
                    closed = true;
                } else {
                    vars.push(v);
                }
            }
            if !closed {
                return Err(perr(line, "quantifier line must end with 0"));
            }
            prefix.push((q, vars, line));
            continue;
        }
        for tok in t.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| perr(line, format!("bad literal `{tok}`")))?;
            if pending.is_empty() {
                pending_line = line;
            }
            if v == 0 {
                clauses.push((pending_line, std::mem::take(&mut pending)));
            } else {
                pending.push(v);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| perr(1, "missing problem line"))?;
    if !pending.is_empty() {
        return Err(perr(pending_line, "clause not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(perr(1, format!("header announces {count} clauses, found {}", clauses.len())));
    }
    for (line, c) in &clauses {
        if c.is_empty() {
            return Err(perr(*line, "empty clause"));
        }
        if let Some(v) = c.iter().find(|v| v.unsigned_abs() as usize > vars) {
            return Err(perr(*line, format!("literal {v} exceeds the declared {vars} variables")));
        }
    }
    Ok(Dimacs { vars, prefix, clauses })
}

/// Reads a DIMACS CNF file.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, FormulaError> {
    let d = read_dimacs(text, false)?;
    let clauses = d
        .clauses
        .into_iter()
        .map(|(_, c)| c.into_iter().map(|v| Literal { var: v.unsigned_abs() as usize, positive: v > 0 }).collect())
        .collect();
    CnfFormula::new(d.vars, clauses)
}

/// Reads a QDIMACS file whose prefix alternates `a`/`e` lines with one
/// variable each, starting with `a` and ending with `e`. The i-th
/// universal variable becomes `x_i`, the i-th existential one `y_i`.
pub fn parse_qdimacs(text: &str) -> Result<QbfFormula, FormulaError> {
    let d = read_dimacs(text, true)?;
    if d.prefix.is_empty() {
        return Err(perr(1, "missing quantifier prefix"));
    }
    let mut map = vec![None; d.vars + 1];
    for (n, (q, vars, line)) in d.prefix.iter().enumerate() {
        let expected = if n % 2 == 0 { 'a' } else { 'e' };
        if *q != expected {
            return Err(perr(*line, format!("expected an `{expected}` line; the prefix must alternate a/e starting with a")));
        }
        if vars.len() != 1 {
            return Err(perr(*line, "each quantifier line must bind exactly one variable"));
        }
        let v = vars[0];
        if v > d.vars {
            return Err(perr(*line, format!("variable {v} exceeds the declared {} variables", d.vars)));
        }
        if map[v].is_some() {
            return Err(perr(*line, format!("variable {v} quantified twice")));
        }
        let i = n / 2 + 1;
        map[v] = Some(if n % 2 == 0 { QVar::X(i) } else { QVar::Y(i) });
    }
    if d.prefix.len() % 2 != 0 {
        let line = d.prefix.last().unwrap().2;
        return Err(perr(line, "the prefix must end with an `e` line"));
    }
    let k = d.prefix.len() / 2;
    let mut clauses = Vec::new();
    for (line, c) in d.clauses {
        let mut clause = Vec::new();
        for v in c {
            let var = map[v.unsigned_abs() as usize]
                .ok_or_else(|| perr(line, format!("variable {} is not quantified", v.unsigned_abs())))?;
            clause.push(QLiteral { var, positive: v > 0 });
        }
        clauses.push(clause);
    }
    QbfFormula::new(k, clauses)
}

/// QDIMACS text with `x_i` numbered `2i-1` and `y_i` numbered `2i`.
pub fn serialize_qdimacs(psi: &QbfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", 2 * psi.k(), psi.clauses().len());
    for i in 1..=psi.k() {
        out.push_str(&format!("a {} 0\ne {} 0\n", 2 * i - 1, 2 * i));
    }
    for c in psi.clauses() {
        for l in c {
            let n = l.var.order() as i64 + 1;
            out.push_str(&format!("{} ", if l.positive { n } else { -n }));
        }
        out.push_str("0\n");
    }
    out
}

pub fn serialize_dimacs(phi: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", phi.k(), phi.clauses().len());
    for c in phi.clauses() {
        for l in c {
            let n = l.var as i64;
            out.push_str(&format!("{} ", if l.positive { n } else { -n }));
        }
        out.push_str("0\n");
    }
    out
}
