//! A small bundled solver for the QF_LIA fragment the prover emits, so
//! the SMT backend works out of the box without an external solver.
//!
//! Supported input: `set-logic`/`set-option`/`set-info` (ignored),
//! `declare-const` of sort `Int` or `Bool`, `assert`, `check-sat` and
//! `get-model`. Formulas may use `true`, `false`, `not`, `and`, `or`,
//! `=>`, `=` (on booleans or integers) and the integer comparisons
//! `<`, `<=`, `>`, `>=` over declared constants and numerals.
//!
//! Every integer variable must be boxed by top-level bounds asserts
//! `(<= lo x)` and `(<= x hi)` (the prover emits these); integers are
//! then order-encoded into booleans (one "x >= v" variable per value)
//! and the whole problem is Tseitin-translated to CNF for a SAT solver.

use std::collections::BTreeMap;
use std::process::ExitCode;

use varisat::{ExtendFormula, Lit, Solver};

#[derive(Debug, Clone, PartialEq, Eq)]
enum SExpr {
    Atom(String),
    List(Vec<SExpr>),
}

impl SExpr {
    fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a) => Some(a),
            SExpr::List(_) => None,
        }
    }
}

fn tokenize(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = src.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_all(tokens: &[String]) -> Result<Vec<SExpr>, String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let (e, next) = parse_one(tokens, i)?;
        out.push(e);
        i = next;
    }
    Ok(out)
}

fn parse_one(tokens: &[String], i: usize) -> Result<(SExpr, usize), String> {
    match tokens.get(i).map(String::as_str) {
        None => Err("unexpected end of input".into()),
        Some("(") => {
            let mut items = Vec::new();
            let mut j = i + 1;
            loop {
                match tokens.get(j).map(String::as_str) {
                    None => return Err("unbalanced parenthesis".into()),
                    Some(")") => return Ok((SExpr::List(items), j + 1)),
                    Some(_) => {
                        let (e, next) = parse_one(tokens, j)?;
                        items.push(e);
                        j = next;
                    }
                }
            }
        }
        Some(")") => Err("unexpected closing parenthesis".into()),
        Some(a) => Ok((SExpr::Atom(a.to_string()), i + 1)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Int,
    Bool,
}

#[derive(Debug, Default)]
struct Script {
    sorts: BTreeMap<String, Sort>,
    asserts: Vec<SExpr>,
    check_sat: bool,
    get_model: bool,
}

fn read_script(exprs: &[SExpr]) -> Result<Script, String> {
    let mut script = Script::default();
    for e in exprs {
        let SExpr::List(items) = e else {
            return Err(format!("top-level atom {e:?}"));
        };
        match items.first().and_then(SExpr::atom) {
            Some("set-logic") | Some("set-option") | Some("set-info") => {}
            Some("declare-const") => {
                let name = items
                    .get(1)
                    .and_then(SExpr::atom)
                    .ok_or("declare-const needs a name")?;
                let sort = match items.get(2).and_then(SExpr::atom) {
                    Some("Int") => Sort::Int,
                    Some("Bool") => Sort::Bool,
                    other => return Err(format!("unsupported sort {other:?}")),
                };
                script.sorts.insert(name.to_string(), sort);
            }
            Some("declare-fun") => {
                // Zero-argument declare-fun is declare-const.
                let name = items
                    .get(1)
                    .and_then(SExpr::atom)
                    .ok_or("declare-fun needs a name")?;
                if items.get(2) != Some(&SExpr::List(Vec::new())) {
                    return Err("only zero-argument declare-fun is supported".into());
                }
                let sort = match items.get(3).and_then(SExpr::atom) {
                    Some("Int") => Sort::Int,
                    Some("Bool") => Sort::Bool,
                    other => return Err(format!("unsupported sort {other:?}")),
                };
                script.sorts.insert(name.to_string(), sort);
            }
            Some("assert") => {
                let body = items.get(1).ok_or("assert needs a formula")?;
                script.asserts.push(body.clone());
            }
            Some("check-sat") => script.check_sat = true,
            Some("get-model") => script.get_model = true,
            Some("exit") => {}
            other => return Err(format!("unsupported command {other:?}")),
        }
    }
    Ok(script)
}

fn parse_numeral(e: &SExpr) -> Option<i64> {
    match e {
        SExpr::Atom(a) => a.parse::<i64>().ok(),
        SExpr::List(items) => {
            // (- k)
            if items.len() == 2 && items[0].atom() == Some("-") {
                parse_numeral(&items[1]).map(|n| -n)
            } else {
                None
            }
        }
    }
}

/// Derives [lo, hi] bounds for every integer variable from top-level
/// `(<= lo x)` / `(<= x hi)` (and the mirrored `>=`) asserts.
fn derive_bounds(script: &Script) -> Result<BTreeMap<String, (i64, i64)>, String> {
    let mut lo: BTreeMap<String, i64> = BTreeMap::new();
    let mut hi: BTreeMap<String, i64> = BTreeMap::new();
    for a in &script.asserts {
        let SExpr::List(items) = a else { continue };
        if items.len() != 3 {
            continue;
        }
        let op = items[0].atom();
        let (le_lhs, le_rhs) = match op {
            Some("<=") => (&items[1], &items[2]),
            Some(">=") => (&items[2], &items[1]),
            _ => continue,
        };
        match (parse_numeral(le_lhs), le_rhs.atom()) {
            (Some(k), Some(x)) if script.sorts.get(x) == Some(&Sort::Int) => {
                let e = lo.entry(x.to_string()).or_insert(k);
                *e = (*e).max(k);
                continue;
            }
            _ => {}
        }
        if let (Some(x), Some(k)) = (le_lhs.atom(), parse_numeral(le_rhs)) {
            if script.sorts.get(x) == Some(&Sort::Int) {
                let e = hi.entry(x.to_string()).or_insert(k);
                *e = (*e).min(k);
            }
        }
    }
    let mut out = BTreeMap::new();
    for (name, sort) in &script.sorts {
        if *sort != Sort::Int {
            continue;
        }
        let l = *lo.get(name).ok_or(format!("no lower bound for {name}"))?;
        let h = *hi.get(name).ok_or(format!("no upper bound for {name}"))?;
        if l > h {
            return Err(format!("empty range [{l}, {h}] for {name}"));
        }
        out.insert(name.clone(), (l, h));
    }
    Ok(out)
}

/// Boolean circuit over SAT literals.
#[derive(Debug, Clone)]
enum Circuit {
    Const(bool),
    Lit(Lit),
    Not(Box<Circuit>),
    And(Vec<Circuit>),
    Or(Vec<Circuit>),
}

struct Encoder {
    solver: Solver<'static>,
    /// Boolean SMT variables.
    bools: BTreeMap<String, Lit>,
    /// Order encoding: ge[x][v - lo - 1] means x >= v.
    ge: BTreeMap<String, Vec<Lit>>,
    bounds: BTreeMap<String, (i64, i64)>,
}

impl Encoder {
    fn new(script: &Script, bounds: BTreeMap<String, (i64, i64)>) -> Encoder {
        let mut solver = Solver::new();
        let mut bools = BTreeMap::new();
        let mut ge = BTreeMap::new();
        for (name, sort) in &script.sorts {
            match sort {
                Sort::Bool => {
                    bools.insert(name.clone(), solver.new_lit());
                }
                Sort::Int => {
                    let (l, h) = bounds[name];
                    let lits: Vec<Lit> = (0..(h - l)).map(|_| solver.new_lit()).collect();
                    // x >= v+1 implies x >= v.
                    for w in lits.windows(2) {
                        solver.add_clause(&[!w[1], w[0]]);
                    }
                    ge.insert(name.clone(), lits);
                }
            }
        }
        Encoder {
            solver,
            bools,
            ge,
            bounds,
        }
    }

    /// x >= v as a circuit (constant outside the range).
    fn int_ge(&self, x: &str, v: i64) -> Circuit {
        let (l, h) = self.bounds[x];
        if v <= l {
            Circuit::Const(true)
        } else if v > h {
            Circuit::Const(false)
        } else {
            Circuit::Lit(self.ge[x][(v - l - 1) as usize])
        }
    }

    /// One side of an integer comparison: a variable or a numeral.
    fn int_term<'a>(&self, e: &'a SExpr) -> Result<IntTerm<'a>, String> {
        if let Some(k) = parse_numeral(e) {
            return Ok(IntTerm::Num(k));
        }
        if let Some(name) = e.atom() {
            if self.ge.contains_key(name) {
                return Ok(IntTerm::Var(name));
            }
        }
        Err(format!("unsupported integer term {e:?}"))
    }

    /// a >= b over integer terms.
    fn cmp_ge(&self, a: &IntTerm, b: &IntTerm) -> Circuit {
        match (a, b) {
            (IntTerm::Num(x), IntTerm::Num(y)) => Circuit::Const(x >= y),
            (IntTerm::Var(x), IntTerm::Num(y)) => self.int_ge(x, *y),
            (IntTerm::Num(x), IntTerm::Var(y)) => {
                // x >= y  ⇔  ¬(y >= x+1)
                Circuit::Not(Box::new(self.int_ge(y, *x + 1)))
            }
            (IntTerm::Var(x), IntTerm::Var(y)) => {
                // x >= y  ⇔  ∀v: y >= v → x >= v.
                let (ly, hy) = self.bounds[*y];
                let mut parts = Vec::new();
                for v in (ly + 1)..=hy {
                    parts.push(Circuit::Or(vec![
                        Circuit::Not(Box::new(self.int_ge(y, v))),
                        self.int_ge(x, v),
                    ]));
                }
                Circuit::And(parts)
            }
        }
    }

    fn int_eq(&self, a: &IntTerm, b: &IntTerm) -> Circuit {
        Circuit::And(vec![self.cmp_ge(a, b), self.cmp_ge(b, a)])
    }

    fn formula(&self, e: &SExpr) -> Result<Circuit, String> {
        match e {
            SExpr::Atom(a) => match a.as_str() {
                "true" => Ok(Circuit::Const(true)),
                "false" => Ok(Circuit::Const(false)),
                name => self
                    .bools
                    .get(name)
                    .map(|l| Circuit::Lit(*l))
                    .ok_or(format!("unknown boolean {name}")),
            },
            SExpr::List(items) => {
                let head = items
                    .first()
                    .and_then(SExpr::atom)
                    .ok_or("formula with non-atomic head")?;
                let args = &items[1..];
                match head {
                    "not" => {
                        if args.len() != 1 {
                            return Err("not takes one argument".into());
                        }
                        Ok(Circuit::Not(Box::new(self.formula(&args[0])?)))
                    }
                    "and" => Ok(Circuit::And(
                        args.iter().map(|a| self.formula(a)).collect::<Result<_, _>>()?,
                    )),
                    "or" => Ok(Circuit::Or(
                        args.iter().map(|a| self.formula(a)).collect::<Result<_, _>>()?,
                    )),
                    "=>" => {
                        if args.len() != 2 {
                            return Err("=> takes two arguments".into());
                        }
                        Ok(Circuit::Or(vec![
                            Circuit::Not(Box::new(self.formula(&args[0])?)),
                            self.formula(&args[1])?,
                        ]))
                    }
                    "=" => {
                        if args.len() != 2 {
                            return Err("= takes two arguments".into());
                        }
                        if let (Ok(a), Ok(b)) = (self.int_term(&args[0]), self.int_term(&args[1])) {
                            return Ok(self.int_eq(&a, &b));
                        }
                        let a = self.formula(&args[0])?;
                        let b = self.formula(&args[1])?;
                        Ok(Circuit::Or(vec![
                            Circuit::And(vec![a.clone(), b.clone()]),
                            Circuit::And(vec![
                                Circuit::Not(Box::new(a)),
                                Circuit::Not(Box::new(b)),
                            ]),
                        ]))
                    }
                    ">" | ">=" | "<" | "<=" => {
                        if args.len() != 2 {
                            return Err(format!("{head} takes two arguments"));
                        }
                        let a = self.int_term(&args[0])?;
                        let b = self.int_term(&args[1])?;
                        Ok(match head {
                            ">=" => self.cmp_ge(&a, &b),
                            "<=" => self.cmp_ge(&b, &a),
                            ">" => Circuit::Not(Box::new(self.cmp_ge(&b, &a))),
                            _ => Circuit::Not(Box::new(self.cmp_ge(&a, &b))),
                        })
                    }
                    other => Err(format!("unsupported operator {other}")),
                }
            }
        }
    }

    /// Tseitin translation: returns a literal equivalent to the circuit.
    fn tseitin(&mut self, c: &Circuit) -> Lit {
        match c {
            Circuit::Const(b) => {
                let l = self.solver.new_lit();
                self.solver.add_clause(&[if *b { l } else { !l }]);
                l
            }
            Circuit::Lit(l) => *l,
            Circuit::Not(inner) => !self.tseitin(inner),
            Circuit::And(parts) => {
                let lits: Vec<Lit> = parts.iter().map(|p| self.tseitin(p)).collect();
                let o = self.solver.new_lit();
                let mut long = vec![o];
                for l in &lits {
                    self.solver.add_clause(&[!o, *l]);
                    long.push(!*l);
                }
                self.solver.add_clause(&long);
                o
            }
            Circuit::Or(parts) => {
                let lits: Vec<Lit> = parts.iter().map(|p| self.tseitin(p)).collect();
                let o = self.solver.new_lit();
                let mut long = vec![!o];
                for l in &lits {
                    self.solver.add_clause(&[o, !*l]);
                    long.push(*l);
                }
                self.solver.add_clause(&long);
                o
            }
        }
    }

    fn assert_formula(&mut self, e: &SExpr) -> Result<(), String> {
        let circuit = self.formula(e)?;
        let root = self.tseitin(&circuit);
        self.solver.add_clause(&[root]);
        Ok(())
    }
}

enum IntTerm<'a> {
    Var(&'a str),
    Num(i64),
}

fn render_model(enc: &Encoder, model: &[Lit]) -> String {
    let assignment: std::collections::HashSet<Lit> = model.iter().copied().collect();
    let is_true = |l: Lit| assignment.contains(&l);
    let mut out = String::from("(model\n");
    for (name, lit) in &enc.bools {
        out.push_str(&format!(
            "  (define-fun {name} () Bool {})\n",
            is_true(*lit)
        ));
    }
    for (name, lits) in &enc.ge {
        let (l, _) = enc.bounds[name];
        let value = l + lits.iter().take_while(|&&g| is_true(g)).count() as i64;
        out.push_str(&format!("  (define-fun {name} () Int {value})\n"));
    }
    out.push_str(")\n");
    out
}

fn run(path: &str) -> Result<String, String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let exprs = parse_all(&tokenize(&src))?;
    let script = read_script(&exprs)?;
    if !script.check_sat {
        return Err("script has no (check-sat)".into());
    }
    let bounds = derive_bounds(&script)?;
    let mut enc = Encoder::new(&script, bounds);
    for a in &script.asserts {
        enc.assert_formula(a)?;
    }
    let sat = enc.solver.solve().map_err(|e| format!("solver error: {e}"))?;
    if !sat {
        return Ok("unsat\n".into());
    }
    let mut out = String::from("sat\n");
    if script.get_model {
        let model = enc.solver.model().ok_or("sat without model")?;
        out.push_str(&render_model(&enc, &model));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let Some(path) = args.get(1) else {
        eprintln!("usage: ncpo-smt FILE.smt2");
        return ExitCode::from(2);
    };
    match run(path) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            println!("unknown");
            ExitCode::SUCCESS
        }
    }
}
