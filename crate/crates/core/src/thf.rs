//! Frontend for a typed higher-order TPTP fragment: unit equality
//! clauses over declared symbols, with universally quantified rule
//! variables and lambda abstractions.
//!
//! Accepted statements:
//! - `thf(<name>, type, <base> : $tType).`
//! - `thf(<name>, type, <symbol> : <type>).` with `>` right-associative
//! - `thf(<name>, axiom, ![X:<type>,...]: (<term> = <term>)).`
//!   (the quantifier prefix is optional)
//! - terms: identifiers, `@`-applications (left-associative, explicit),
//!   `^[X:<type>,...]: <term>` abstractions, parentheses; `%` comments.
//!
//! Parsing yields a pre-arity problem where every symbol has arity 0 and
//! all application structure is explicit; [`infer_arities`] then picks
//! the maximal consistent arity per symbol and rebuilds the terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::problem::{Problem, Rule};
use crate::term::{Symbol, Term};
use crate::types::SimpleType;

/// Parse error with source position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    TType, // $tType
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Period,
    Colon,
    Greater,
    At,
    Caret,
    Bang,
    Equals,
}

#[derive(Debug, Clone)]
struct SpannedTok {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<SpannedTok>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' | ')' | '[' | ']' | ',' | '.' | ':' | '>' | '@' | '^' | '!' | '=' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    '.' => Tok::Period,
                    ':' => Tok::Colon,
                    '>' => Tok::Greater,
                    '@' => Tok::At,
                    '^' => Tok::Caret,
                    '!' => Tok::Bang,
                    '=' => Tok::Equals,
                    _ => unreachable!(),
                };
                out.push(SpannedTok {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            '$' => {
                let mut word = String::new();
                chars.next();
                col += 1;
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                if word == "tType" {
                    out.push(SpannedTok {
                        tok: Tok::TType,
                        line: tline,
                        col: tcol,
                    });
                } else {
                    return Err(ParseError {
                        line: tline,
                        col: tcol,
                        message: format!("unsupported defined symbol ${word}"),
                    });
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(SpannedTok {
                    tok: Tok::Ident(word),
                    line: tline,
                    col: tcol,
                });
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    message: format!("unexpected character {other:?}"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<SpannedTok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|t| (t.line, t.col))
            .unwrap_or((0, 0))
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            other => Err(self.err(format!("expected {tok:?}, found {other:?}"))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.next() {
                Some(Tok::Ident(s)) => Ok(s),
                _ => unreachable!(),
            },
            other => Err(self.err(format!("expected identifier, found {other:?}"))),
        }
    }
}

/// Scope for term parsing: lambda binders (innermost last), quantified
/// variables, and the signature.
struct Scope<'a> {
    binders: Vec<(String, SimpleType)>,
    quantified: &'a BTreeMap<String, SimpleType>,
    symbols: &'a BTreeMap<String, Symbol>,
}

/// Parses the accepted fragment into a pre-arity [`Problem`] (every
/// symbol has arity 0; all application structure is explicit).
pub fn parse_problem(text: &str, source: &str) -> Result<Problem, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut problem = Problem {
        source: source.to_string(),
        ..Problem::default()
    };
    while p.peek().is_some() {
        parse_statement(&mut p, &mut problem)?;
    }
    Ok(problem)
}

fn parse_statement(p: &mut Parser, problem: &mut Problem) -> Result<(), ParseError> {
    let kw = p.ident()?;
    if kw != "thf" {
        return Err(p.err(format!("expected thf statement, found {kw}")));
    }
    p.expect(Tok::LParen)?;
    let name = p.ident()?;
    p.expect(Tok::Comma)?;
    let role = p.ident()?;
    p.expect(Tok::Comma)?;
    match role.as_str() {
        "type" => {
            let sym = p.ident()?;
            p.expect(Tok::Colon)?;
            if matches!(p.peek(), Some(Tok::TType)) {
                p.next();
                problem.base_types.insert(sym);
            } else {
                let ty = parse_type(p, &problem.base_types)?;
                let symbol = Symbol::new(sym.clone(), ty, 0)
                    .map_err(|e| p.err(e.to_string()))?;
                if problem.symbols.insert(sym.clone(), symbol).is_some() {
                    return Err(p.err(format!("symbol {sym} declared twice")));
                }
            }
        }
        "axiom" => {
            let rule = parse_axiom(p, &name, problem)?;
            problem.rules.push(rule);
        }
        other => return Err(p.err(format!("unsupported role {other}"))),
    }
    p.expect(Tok::RParen)?;
    p.expect(Tok::Period)?;
    Ok(())
}

fn parse_type(p: &mut Parser, bases: &BTreeSet<String>) -> Result<SimpleType, ParseError> {
    let lhs = parse_type_atom(p, bases)?;
    if matches!(p.peek(), Some(Tok::Greater)) {
        p.next();
        let rhs = parse_type(p, bases)?;
        Ok(SimpleType::arrow(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_type_atom(p: &mut Parser, bases: &BTreeSet<String>) -> Result<SimpleType, ParseError> {
    match p.peek() {
        Some(Tok::LParen) => {
            p.next();
            let ty = parse_type(p, bases)?;
            p.expect(Tok::RParen)?;
            Ok(ty)
        }
        Some(Tok::Ident(_)) => {
            let name = p.ident()?;
            if bases.contains(&name) {
                Ok(SimpleType::base(name))
            } else {
                Err(p.err(format!("undeclared base type {name}")))
            }
        }
        other => Err(p.err(format!("expected a type, found {other:?}"))),
    }
}

fn parse_bindings(
    p: &mut Parser,
    bases: &BTreeSet<String>,
) -> Result<Vec<(String, SimpleType)>, ParseError> {
    p.expect(Tok::LBracket)?;
    let mut out = Vec::new();
    loop {
        let var = p.ident()?;
        p.expect(Tok::Colon)?;
        let ty = parse_type(p, bases)?;
        out.push((var, ty));
        match p.peek() {
            Some(Tok::Comma) => {
                p.next();
            }
            _ => break,
        }
    }
    p.expect(Tok::RBracket)?;
    Ok(out)
}

fn parse_axiom(p: &mut Parser, name: &str, problem: &Problem) -> Result<Rule, ParseError> {
    let mut quantified = BTreeMap::new();
    if matches!(p.peek(), Some(Tok::Bang)) {
        p.next();
        for (var, ty) in parse_bindings(p, &problem.base_types)? {
            if quantified.insert(var.clone(), ty).is_some() {
                return Err(p.err(format!("variable {var} quantified twice")));
            }
        }
        p.expect(Tok::Colon)?;
    }
    let mut scope = Scope {
        binders: Vec::new(),
        quantified: &quantified,
        symbols: &problem.symbols,
    };
    let (lhs, rhs) = parse_equation(p, &mut scope, &problem.base_types)?;
    Ok(Rule {
        name: name.to_string(),
        lhs,
        rhs,
    })
}

/// `<term> = <term>`, with an optional layer of parentheses around the
/// whole equation. A leading `(` is ambiguous (equation vs. term), so
/// the parser backtracks.
fn parse_equation(
    p: &mut Parser,
    scope: &mut Scope,
    bases: &BTreeSet<String>,
) -> Result<(Term, Term), ParseError> {
    if matches!(p.peek(), Some(Tok::LParen)) {
        let save = p.pos;
        p.next();
        if let Ok(eq) = parse_equation(p, scope, bases) {
            if p.expect(Tok::RParen).is_ok() {
                return Ok(eq);
            }
        }
        p.pos = save;
    }
    let lhs = parse_term(p, scope, bases)?;
    p.expect(Tok::Equals)?;
    let rhs = parse_term(p, scope, bases)?;
    Ok((lhs, rhs))
}

fn parse_term(
    p: &mut Parser,
    scope: &mut Scope,
    bases: &BTreeSet<String>,
) -> Result<Term, ParseError> {
    let mut cur = parse_primary(p, scope, bases)?;
    while matches!(p.peek(), Some(Tok::At)) {
        p.next();
        let arg = parse_primary(p, scope, bases)?;
        cur = Term::app(cur, arg).map_err(|e| p.err(e.to_string()))?;
    }
    Ok(cur)
}

fn parse_primary(
    p: &mut Parser,
    scope: &mut Scope,
    bases: &BTreeSet<String>,
) -> Result<Term, ParseError> {
    match p.peek() {
        Some(Tok::LParen) => {
            p.next();
            let t = parse_term(p, scope, bases)?;
            p.expect(Tok::RParen)?;
            Ok(t)
        }
        Some(Tok::Caret) => {
            p.next();
            let bindings = parse_bindings(p, bases)?;
            p.expect(Tok::Colon)?;
            for b in &bindings {
                scope.binders.push(b.clone());
            }
            // Binder occurrences are parsed as free variables (keeping
            // every intermediate term locally closed) and captured here,
            // innermost first.
            let body = parse_term(p, scope, bases)?;
            let mut t = body;
            for (name, ty) in bindings.iter().rev() {
                scope.binders.pop();
                t = Term::lam(name, ty.clone(), t);
            }
            Ok(t)
        }
        Some(Tok::Ident(_)) => {
            let name = p.ident()?;
            // Innermost lambda binder first, then quantified variables,
            // then the signature.
            if let Some((_, ty)) = scope.binders.iter().rev().find(|(n, _)| *n == name) {
                return Ok(Term::free(name, ty.clone()));
            }
            if let Some(ty) = scope.quantified.get(&name) {
                return Ok(Term::free(name, ty.clone()));
            }
            if let Some(sym) = scope.symbols.get(&name) {
                return Ok(Term::Fun(sym.clone(), vec![]));
            }
            Err(p.err(format!("unknown symbol or variable {name}")))
        }
        other => Err(p.err(format!("expected a term, found {other:?}"))),
    }
}

/// Computes the maximal consistent arity for every symbol (minimum
/// argument count over its occurrences, capped by the type's arrows;
/// symbols without occurrences get arity 0) and rebuilds all rule terms
/// so that each occurrence becomes an applied-symbol node.
pub fn infer_arities(problem: &Problem) -> Problem {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for rule in &problem.rules {
        count_applications(&rule.lhs, &mut counts);
        count_applications(&rule.rhs, &mut counts);
    }
    let mut symbols = BTreeMap::new();
    for (name, sym) in &problem.symbols {
        let arity = counts
            .get(name)
            .copied()
            .unwrap_or(0)
            .min(sym.ty().arrow_count());
        symbols.insert(
            name.clone(),
            Symbol::new(name.clone(), sym.ty().clone(), arity)
                .expect("arity capped by arrow count"),
        );
    }
    let mut fresh = crate::term::FreshVars::new();
    let rules = problem
        .rules
        .iter()
        .map(|r| Rule {
            name: r.name.clone(),
            lhs: rebuild(&r.lhs, &symbols, &mut fresh),
            rhs: rebuild(&r.rhs, &symbols, &mut fresh),
        })
        .collect();
    Problem {
        base_types: problem.base_types.clone(),
        symbols,
        rules,
        source: problem.source.clone(),
    }
}

fn count_applications(t: &Term, counts: &mut BTreeMap<String, usize>) {
    let (head, args) = t.spine();
    if let Term::Fun(f, fargs) = head {
        let applied = fargs.len() + args.len();
        counts
            .entry(f.name().to_string())
            .and_modify(|c| *c = (*c).min(applied))
            .or_insert(applied);
        for a in fargs {
            count_applications(a, counts);
        }
    } else if let Term::Lam(_, body) = head {
        count_applications(body, counts);
    }
    for a in args {
        count_applications(a, counts);
    }
}

fn rebuild(
    t: &Term,
    symbols: &BTreeMap<String, Symbol>,
    fresh: &mut crate::term::FreshVars,
) -> Term {
    match t {
        Term::Bound(_) | Term::Free(..) => t.clone(),
        Term::Lam(ty, body) => {
            // Open the body so every intermediate term handed to the
            // checked constructors stays locally closed.
            let var = fresh.fresh(ty.clone());
            let name = match &var {
                Term::Free(n, _) => n.clone(),
                _ => unreachable!(),
            };
            let rebuilt = rebuild(&body.open(&var), symbols, fresh);
            Term::Lam(ty.clone(), Box::new(rebuilt.close(&name)))
        }
        Term::Fun(..) | Term::App(..) => {
            let (head, args) = t.spine();
            let args: Vec<Term> = args.iter().map(|a| rebuild(a, symbols, fresh)).collect();
            match head {
                Term::Fun(f, fargs) => {
                    let sym = symbols[f.name()].clone();
                    let mut all: Vec<Term> = fargs
                        .iter()
                        .map(|a| rebuild(a, symbols, fresh))
                        .collect();
                    all.extend(args);
                    let rest = all.split_off(sym.arity());
                    let fun = Term::fun(sym, all).expect("arity inferred from occurrences");
                    Term::apps(fun, rest).expect("well-typed before rebuilding")
                }
                head => {
                    let head = rebuild(head, symbols, fresh);
                    Term::apps(head, args).expect("well-typed before rebuilding")
                }
            }
        }
    }
}

/// Pretty-prints a problem back to the accepted fragment. Applied
/// symbols are flattened to explicit applications, so re-parsing and
/// re-inferring arities reconstructs an α-equivalent problem.
pub fn print_problem(problem: &Problem) -> String {
    let mut out = String::new();
    for base in &problem.base_types {
        writeln!(out, "thf({base}_type, type, {base}: $tType).").unwrap();
    }
    for (name, sym) in &problem.symbols {
        writeln!(out, "thf({name}_decl, type, {name}: {}).", sym.ty()).unwrap();
    }
    for rule in &problem.rules {
        let mut vars = rule.lhs.free_vars();
        vars.extend(rule.rhs.free_vars());
        let lhs = print_term(&rule.lhs, &mut Vec::new());
        let rhs = print_term(&rule.rhs, &mut Vec::new());
        if vars.is_empty() {
            writeln!(out, "thf({}, axiom, ({lhs} = {rhs})).", rule.name).unwrap();
        } else {
            let bindings = vars
                .iter()
                .map(|(v, ty)| format!("{v}: {ty}"))
                .collect::<Vec<_>>()
                .join(", ");
            writeln!(
                out,
                "thf({}, axiom, ![{bindings}]: ({lhs} = {rhs})).",
                rule.name
            )
            .unwrap();
        }
    }
    out
}

fn print_term(t: &Term, binders: &mut Vec<String>) -> String {
    match t {
        Term::Bound(i) => binders[binders.len() - 1 - i].clone(),
        Term::Free(name, _) => name.clone(),
        Term::Fun(f, args) => {
            if args.is_empty() {
                f.name().to_string()
            } else {
                let parts: Vec<String> =
                    args.iter().map(|a| print_term(a, binders)).collect();
                format!("({} @ {})", f.name(), parts.join(" @ "))
            }
        }
        Term::App(..) => {
            let (head, args) = t.spine();
            // Flatten the applied head into the same spine.
            let (head_str, mut parts) = match head {
                Term::Fun(f, fargs) if !fargs.is_empty() => (
                    f.name().to_string(),
                    fargs.iter().map(|a| print_term(a, binders)).collect(),
                ),
                other => (print_term(other, binders), Vec::new()),
            };
            parts.extend(args.iter().map(|a| print_term(a, binders)));
            format!("({} @ {})", head_str, parts.join(" @ "))
        }
        Term::Lam(ty, body) => {
            let name = fresh_binder(t, binders);
            binders.push(name.clone());
            let body_str = print_term(body, binders);
            binders.pop();
            format!("(^[{name}: {ty}]: {body_str})")
        }
    }
}

fn fresh_binder(scope: &Term, binders: &[String]) -> String {
    for i in 0.. {
        let candidate = format!("Y{i}");
        if !binders.contains(&candidate) && !scope.has_free(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::validate_rules;

    const NNF: &str = r#"
        % negation normal form
        thf(t_type, type, t: $tType).
        thf(f_type, type, f: $tType).
        thf(not_decl, type, not: f > f).
        thf(and_decl, type, and: f > f > f).
        thf(or_decl, type, or: f > f > f).
        thf(all_decl, type, all: (t > f) > f).
        thf(ex_decl, type, ex: (t > f) > f).
        thf(nnf1, axiom, ![P:f]: ((not @ (not @ P)) = P)).
        thf(nnf2, axiom, ![P:f, Q:f]:
            ((not @ (and @ P @ Q)) = (or @ (not @ P) @ (not @ Q)))).
        thf(nnf3, axiom, ![P:f, Q:f]:
            ((not @ (or @ P @ Q)) = (and @ (not @ P) @ (not @ Q)))).
        thf(nnf4, axiom, ![R:t > f]:
            ((not @ (all @ R)) = (ex @ (^[X:t]: (not @ (R @ X)))))).
        thf(nnf5, axiom, ![R:t > f]:
            ((not @ (ex @ R)) = (all @ (^[X:t]: (not @ (R @ X)))))).
    "#;

    #[test]
    fn parses_nnf_and_infers_arities() {
        let pre = parse_problem(NNF, "nnf.p").unwrap();
        assert_eq!(pre.rules.len(), 5);
        assert_eq!(pre.base_types.len(), 2);
        let p = infer_arities(&pre);
        assert_eq!(p.symbols["not"].arity(), 1);
        assert_eq!(p.symbols["and"].arity(), 2);
        assert_eq!(p.symbols["all"].arity(), 1);
        validate_rules(&p).unwrap();
        // first rule is not(not(P)) -> P with applied symbols
        let r = &p.rules[0];
        match &r.lhs {
            Term::Fun(f, args) => {
                assert_eq!(f.name(), "not");
                assert!(matches!(&args[0], Term::Fun(g, _) if g.name() == "not"));
            }
            other => panic!("unexpected lhs {other:?}"),
        }
        assert_eq!(r.rhs, Term::free("P", SimpleType::base("f")));
    }

    #[test]
    fn type_declarations_only_is_a_valid_problem() {
        let text = "thf(a_type, type, a: $tType). thf(c_decl, type, c: a).";
        let p = parse_problem(text, "decls.p").unwrap();
        assert!(p.rules.is_empty());
        assert_eq!(p.symbols.len(), 1);
    }

    #[test]
    fn single_rule_with_unapplied_rhs_symbol() {
        // f x = g x c, with all symbols applied; arity of g is 2.
        let text = r#"
            thf(a_type, type, a: $tType).
            thf(c_decl, type, c: a).
            thf(f_decl, type, f: a > a).
            thf(g_decl, type, g: a > a > a).
            thf(only, axiom, ![X:a]: ((f @ X) = (g @ X @ c))).
        "#;
        let p = infer_arities(&parse_problem(text, "one.p").unwrap());
        assert_eq!(p.symbols["f"].arity(), 1);
        assert_eq!(p.symbols["g"].arity(), 2);
        assert_eq!(p.symbols["c"].arity(), 0);
        validate_rules(&p).unwrap();
    }

    #[test]
    fn arity_is_min_over_occurrences() {
        // diff applied to one argument in both rules even though its
        // type has two arrows.
        let text = r#"
            thf(r_type, type, r: $tType).
            thf(sin_decl, type, sin: r > r).
            thf(diff_decl, type, diff: (r > r) > r > r).
            thf(d, axiom, ![F:r > r]:
                ((diff @ (^[X:r]: (sin @ (F @ X)))) = (diff @ F))).
        "#;
        let p = infer_arities(&parse_problem(text, "d.p").unwrap());
        assert_eq!(p.symbols["diff"].arity(), 1);
        assert_eq!(p.symbols["sin"].arity(), 1);
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let text = r#"
            thf(a_type, type, a: $tType).
            thf(r, axiom, (zzz = zzz)).
        "#;
        let err = parse_problem(text, "bad.p").unwrap_err();
        assert!(err.message.contains("zzz"));
    }

    #[test]
    fn application_type_mismatch_is_reported() {
        let text = r#"
            thf(a_type, type, a: $tType).
            thf(c_decl, type, c: a).
            thf(f_decl, type, f: (a > a) > a).
            thf(r, axiom, ((f @ c) = c)).
        "#;
        assert!(parse_problem(text, "bad.p").is_err());
    }

    #[test]
    fn round_trip_preserves_problem() {
        let p = infer_arities(&parse_problem(NNF, "nnf.p").unwrap());
        let printed = print_problem(&p);
        let p2 = infer_arities(&parse_problem(&printed, "nnf2.p").unwrap());
        assert_eq!(p.base_types, p2.base_types);
        assert_eq!(p.symbols.len(), p2.symbols.len());
        for (name, sym) in &p.symbols {
            assert_eq!(sym.arity(), p2.symbols[name].arity());
            assert_eq!(sym.ty(), p2.symbols[name].ty());
        }
        assert_eq!(p.rules.len(), p2.rules.len());
        for (r1, r2) in p.rules.iter().zip(&p2.rules) {
            assert_eq!(r1.lhs, r2.lhs, "lhs of {}", r1.name);
            assert_eq!(r1.rhs, r2.rhs, "rhs of {}", r1.name);
        }
    }

    #[test]
    fn lambda_binders_shadow_quantified_variables() {
        let text = r#"
            thf(a_type, type, a: $tType).
            thf(f_decl, type, f: (a > a) > a > a).
            thf(r, axiom, ![X:a]: ((f @ (^[X:a]: X) @ X) = X)).
        "#;
        let p = infer_arities(&parse_problem(text, "shadow.p").unwrap());
        let r = &p.rules[0];
        match &r.lhs {
            Term::Fun(_, args) => {
                assert_eq!(args[0], Term::Lam(
                    SimpleType::base("a"),
                    Box::new(Term::Bound(0)),
                ));
                assert_eq!(args[1], Term::free("X", SimpleType::base("a")));
            }
            other => panic!("unexpected lhs {other:?}"),
        }
    }
}
