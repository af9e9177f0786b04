//! Simply-typed lambda terms with applied function symbols of fixed arity.
//!
//! Bound variables are represented by de Bruijn indices, so structural
//! equality coincides with α-equivalence. Free variables are named and
//! carry their type. Function symbols are applied to exactly their arity;
//! further arguments show up as surrounding `App` nodes.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::TermError;
use crate::types::SimpleType;

#[derive(Debug)]
struct SymbolData {
    name: String,
    ty: SimpleType,
    arity: usize,
}

/// A function symbol with a type and a fixed arity.
///
/// Symbols are compared by name only; a signature never contains two
/// distinct symbols with the same name.
#[derive(Debug, Clone)]
pub struct Symbol(Arc<SymbolData>);

impl Symbol {
    pub fn new(
        name: impl Into<String>,
        ty: SimpleType,
        arity: usize,
    ) -> Result<Symbol, TermError> {
        let name = name.into();
        if arity > ty.arrow_count() {
            return Err(TermError::ArityExceedsType {
                symbol: name,
                arity,
                arrows: ty.arrow_count(),
            });
        }
        Ok(Symbol(Arc::new(SymbolData { name, ty, arity })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn ty(&self) -> &SimpleType {
        &self.0.ty
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    /// Argument types of the full decomposition `T1 > ... > Tn > a`.
    pub fn full_arg_types(&self) -> Vec<&SimpleType> {
        self.0.ty.decompose().0
    }

    /// The base type at the end of the full decomposition.
    pub fn result_base(&self) -> &str {
        self.0.ty.decompose().1
    }

    /// Result type after consuming the first `arity` arguments.
    pub fn applied_type(&self) -> &SimpleType {
        self.0
            .ty
            .result_after(self.0.arity)
            .expect("arity checked at construction")
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.0.name == other.0.name
    }
}
impl Eq for Symbol {}
impl std::hash::Hash for Symbol {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
    }
}
impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.name.cmp(&other.0.name)
    }
}
impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

/// A well-typed lambda term.
///
/// Invariants (maintained by the checked constructors and preserved by
/// every operation in this crate):
/// - `Fun(f, args)` has exactly `f.arity()` arguments of the right types;
/// - `App(u, v)` has `u` of an arrow type matching `v`;
/// - terms handed across public APIs are locally closed (no dangling
///   `Bound` indices).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// De Bruijn index referencing an enclosing `Lam`.
    Bound(usize),
    /// Named free variable with its type.
    Free(String, SimpleType),
    /// Function symbol applied to exactly its arity.
    Fun(Symbol, Vec<Term>),
    /// Application.
    App(Box<Term>, Box<Term>),
    /// Abstraction; the binder type is stored, the body uses `Bound(0)`.
    Lam(SimpleType, Box<Term>),
}

impl Term {
    pub fn free(name: impl Into<String>, ty: SimpleType) -> Term {
        Term::Free(name.into(), ty)
    }

    /// Checked construction of an applied function symbol.
    pub fn fun(sym: Symbol, args: Vec<Term>) -> Result<Term, TermError> {
        if args.len() != sym.arity() {
            return Err(TermError::WrongArgumentCount {
                symbol: sym.name().to_string(),
                expected: sym.arity(),
                got: args.len(),
            });
        }
        for (i, (arg, expected)) in args.iter().zip(sym.full_arg_types()).enumerate() {
            let actual = arg.type_of();
            if &actual != expected {
                return Err(TermError::ArgumentTypeMismatch {
                    symbol: sym.name().to_string(),
                    index: i + 1,
                    expected: expected.clone(),
                    actual,
                });
            }
        }
        Ok(Term::Fun(sym, args))
    }

    /// Checked construction of an application.
    pub fn app(fun: Term, arg: Term) -> Result<Term, TermError> {
        match fun.type_of() {
            SimpleType::Arrow(dom, _) => {
                let actual = arg.type_of();
                if *dom != actual {
                    return Err(TermError::ApplicationTypeMismatch {
                        expected: *dom,
                        actual,
                    });
                }
                Ok(Term::App(Box::new(fun), Box::new(arg)))
            }
            ty => Err(TermError::NotAFunction { ty }),
        }
    }

    /// Left-associated application `fun t1 ... tn`.
    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
        let mut cur = fun;
        for a in args {
            cur = Term::app(cur, a)?;
        }
        Ok(cur)
    }

    /// Abstraction over the named free variable: binds every free
    /// occurrence of `name` in `body`.
    pub fn lam(name: &str, ty: SimpleType, body: Term) -> Term {
        let closed = body.close(name);
        Term::Lam(ty, Box::new(closed))
    }

    /// The unique simple type. Panics on dangling de Bruijn indices,
    /// which cannot occur for terms built through the public API.
    pub fn type_of(&self) -> SimpleType {
        let mut env = Vec::new();
        self.type_in(&mut env)
    }

    fn type_in(&self, env: &mut Vec<SimpleType>) -> SimpleType {
        match self {
            Term::Bound(i) => env
                .get(env.len() - 1 - i)
                .expect("dangling de Bruijn index")
                .clone(),
            Term::Free(_, ty) => ty.clone(),
            Term::Fun(f, _) => f.applied_type().clone(),
            Term::App(u, _) => match u.type_in(env) {
                SimpleType::Arrow(_, cod) => *cod,
                _ => unreachable!("ill-typed application"),
            },
            Term::Lam(ty, body) => {
                env.push(ty.clone());
                let cod = body.type_in(env);
                env.pop();
                SimpleType::arrow(ty.clone(), cod)
            }
        }
    }

    /// Free variables with their types.
    pub fn free_vars(&self) -> BTreeMap<String, SimpleType> {
        let mut out = BTreeMap::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeMap<String, SimpleType>) {
        match self {
            Term::Bound(_) => {}
            Term::Free(name, ty) => {
                out.insert(name.clone(), ty.clone());
            }
            Term::Fun(_, args) => {
                for a in args {
                    a.collect_free(out);
                }
            }
            Term::App(u, v) => {
                u.collect_free(out);
                v.collect_free(out);
            }
            Term::Lam(_, body) => body.collect_free(out),
        }
    }

    pub fn has_free(&self, name: &str) -> bool {
        match self {
            Term::Bound(_) => false,
            Term::Free(n, _) => n == name,
            Term::Fun(_, args) => args.iter().any(|a| a.has_free(name)),
            Term::App(u, v) => u.has_free(name) || v.has_free(name),
            Term::Lam(_, body) => body.has_free(name),
        }
    }

    /// Node count (`Fun` counts one node plus its arguments).
    pub fn size(&self) -> usize {
        match self {
            Term::Bound(_) | Term::Free(..) => 1,
            Term::Fun(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::App(u, v) => 1 + u.size() + v.size(),
            Term::Lam(_, body) => 1 + body.size(),
        }
    }

    /// Whether `Bound(idx)` (counted relative to this term's root)
    /// occurs free in the term.
    pub(crate) fn uses_bound(&self, idx: usize) -> bool {
        match self {
            Term::Bound(i) => *i == idx,
            Term::Free(..) => false,
            Term::Fun(_, args) => args.iter().any(|a| a.uses_bound(idx)),
            Term::App(u, v) => u.uses_bound(idx) || v.uses_bound(idx),
            Term::Lam(_, body) => body.uses_bound(idx + 1),
        }
    }

    /// Instantiates the body of an abstraction: replaces `Bound(0)` by
    /// `arg` (which must be locally closed) and renumbers the remaining
    /// dangling indices.
    pub fn open(&self, arg: &Term) -> Term {
        self.open_at(0, arg)
    }

    fn open_at(&self, depth: usize, arg: &Term) -> Term {
        match self {
            Term::Bound(i) => {
                if *i == depth {
                    arg.clone()
                } else if *i > depth {
                    Term::Bound(i - 1)
                } else {
                    Term::Bound(*i)
                }
            }
            Term::Free(..) => self.clone(),
            Term::Fun(f, args) => Term::Fun(
                f.clone(),
                args.iter().map(|a| a.open_at(depth, arg)).collect(),
            ),
            Term::App(u, v) => Term::App(
                Box::new(u.open_at(depth, arg)),
                Box::new(v.open_at(depth, arg)),
            ),
            Term::Lam(ty, body) => Term::Lam(ty.clone(), Box::new(body.open_at(depth + 1, arg))),
        }
    }

    /// Abstracts the named free variable: replaces every occurrence of
    /// `Free(name, _)` by the index pointing at an enclosing binder to
    /// be wrapped around the result.
    pub fn close(&self, name: &str) -> Term {
        self.close_at(0, name)
    }

    fn close_at(&self, depth: usize, name: &str) -> Term {
        match self {
            Term::Bound(_) => self.clone(),
            Term::Free(n, _) => {
                if n == name {
                    Term::Bound(depth)
                } else {
                    self.clone()
                }
            }
            Term::Fun(f, args) => Term::Fun(
                f.clone(),
                args.iter().map(|a| a.close_at(depth, name)).collect(),
            ),
            Term::App(u, v) => Term::App(
                Box::new(u.close_at(depth, name)),
                Box::new(v.close_at(depth, name)),
            ),
            Term::Lam(ty, body) => Term::Lam(ty.clone(), Box::new(body.close_at(depth + 1, name))),
        }
    }

    /// Simultaneous capture-avoiding substitution of free variables.
    ///
    /// Capture cannot occur because bound variables are nameless and the
    /// range terms are locally closed.
    pub fn substitute(&self, subst: &Substitution) -> Term {
        if subst.is_empty() {
            return self.clone();
        }
        match self {
            Term::Bound(_) => self.clone(),
            Term::Free(name, ty) => match subst.get(name) {
                Some(t) => {
                    debug_assert_eq!(&t.type_of(), ty, "ill-typed substitution binding");
                    t.clone()
                }
                None => self.clone(),
            },
            Term::Fun(f, args) => Term::Fun(
                f.clone(),
                args.iter().map(|a| a.substitute(subst)).collect(),
            ),
            Term::App(u, v) => Term::App(
                Box::new(u.substitute(subst)),
                Box::new(v.substitute(subst)),
            ),
            Term::Lam(ty, body) => Term::Lam(ty.clone(), Box::new(body.substitute(subst))),
        }
    }

    /// Decomposes a left-associated application spine into its head and
    /// the argument list (`Fun` nodes count as heads, not spines).
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(u, v) = cur {
            args.push(v.as_ref());
            cur = u.as_ref();
        }
        args.reverse();
        (cur, args)
    }

    /// All subterms with their access paths. Crossing a binder
    /// instantiates the bound variable with a fresh free variable drawn
    /// from `fresh`, so every reported subterm is locally closed.
    pub fn subterm_positions(&self, fresh: &mut FreshVars) -> Vec<(Vec<usize>, Term)> {
        let mut out = Vec::new();
        self.collect_subterms(&mut Vec::new(), fresh, &mut out);
        out
    }

    fn collect_subterms(
        &self,
        path: &mut Vec<usize>,
        fresh: &mut FreshVars,
        out: &mut Vec<(Vec<usize>, Term)>,
    ) {
        out.push((path.clone(), self.clone()));
        match self {
            Term::Bound(_) | Term::Free(..) => {}
            Term::Fun(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    path.push(i + 1);
                    a.collect_subterms(path, fresh, out);
                    path.pop();
                }
            }
            Term::App(u, v) => {
                path.push(1);
                u.collect_subterms(path, fresh, out);
                path.pop();
                path.push(2);
                v.collect_subterms(path, fresh, out);
                path.pop();
            }
            Term::Lam(ty, body) => {
                let z = fresh.fresh(ty.clone());
                let opened = body.open(&z);
                path.push(1);
                opened.collect_subterms(path, fresh, out);
                path.pop();
            }
        }
    }
}

/// A finite, well-typed map from free-variable names to terms.
#[derive(Debug, Clone, Default)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    /// Adds a binding, checking that the replacement has the variable's
    /// declared type.
    pub fn bind(
        &mut self,
        name: impl Into<String>,
        ty: &SimpleType,
        term: Term,
    ) -> Result<(), TermError> {
        let name = name.into();
        let actual = term.type_of();
        if &actual != ty {
            return Err(TermError::SubstitutionTypeMismatch {
                variable: name,
                expected: ty.clone(),
                actual,
            });
        }
        self.map.insert(name, term);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.map.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    /// Free variables of the range.
    pub fn range_free_vars(&self) -> BTreeMap<String, SimpleType> {
        let mut out = BTreeMap::new();
        for t in self.map.values() {
            out.extend(t.free_vars());
        }
        out
    }
}

/// Supply of fresh free-variable names.
///
/// Generated names contain `!`, which the surface syntax rejects in
/// identifiers, so they can never collide with user-written variables.
#[derive(Debug, Default)]
pub struct FreshVars {
    counter: u64,
    prefix: &'static str,
}

impl FreshVars {
    pub fn new() -> FreshVars {
        FreshVars {
            counter: 0,
            prefix: "z",
        }
    }

    pub fn with_prefix(prefix: &'static str) -> FreshVars {
        FreshVars { counter: 0, prefix }
    }

    pub fn fresh(&mut self, ty: SimpleType) -> Term {
        let name = format!("{}!{}", self.prefix, self.counter);
        self.counter += 1;
        Term::Free(name, ty)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        self.fmt_named(f, &mut names, false)
    }
}

impl Term {
    fn fmt_named(
        &self,
        f: &mut fmt::Formatter<'_>,
        binders: &mut Vec<String>,
        parens: bool,
    ) -> fmt::Result {
        match self {
            Term::Bound(i) => {
                let idx = binders.len().checked_sub(i + 1);
                match idx.and_then(|k| binders.get(k)) {
                    Some(name) => f.write_str(name),
                    None => write!(f, "#{i}"),
                }
            }
            Term::Free(name, _) => f.write_str(name),
            Term::Fun(sym, args) => {
                write!(f, "{sym}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        a.fmt_named(f, binders, false)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Term::App(u, v) => {
                if parens {
                    f.write_str("(")?;
                }
                u.fmt_named(f, binders, matches!(u.as_ref(), Term::Lam(..)))?;
                f.write_str(" ")?;
                v.fmt_named(
                    f,
                    binders,
                    matches!(v.as_ref(), Term::App(..) | Term::Lam(..)),
                )?;
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Term::Lam(ty, body) => {
                if parens {
                    f.write_str("(")?;
                }
                let name = pick_binder_name(self, binders);
                write!(f, "\\{name}:{ty}. ")?;
                binders.push(name);
                body.fmt_named(f, binders, false)?;
                binders.pop();
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

fn pick_binder_name(scope: &Term, binders: &[String]) -> String {
    for i in 0.. {
        let candidate = format!("x{i}");
        if !binders.contains(&candidate) && !scope.has_free(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(n: &str) -> SimpleType {
        SimpleType::base(n)
    }

    fn sym(name: &str, ty: SimpleType, ar: usize) -> Symbol {
        Symbol::new(name, ty, ar).unwrap()
    }

    #[test]
    fn alpha_equivalence_is_structural_equality() {
        let a = base("a");
        let s = Term::lam("x", a.clone(), Term::free("x", a.clone()));
        let t = Term::lam("y", a.clone(), Term::free("y", a.clone()));
        assert_eq!(s, t);
        let diff = Term::lam("x", a.clone(), Term::free("w", a.clone()));
        assert_ne!(s, diff);
    }

    #[test]
    fn fun_construction_checks_arity_and_types() {
        let a = base("a");
        let f = sym("f", SimpleType::arrow(a.clone(), a.clone()), 1);
        assert!(Term::fun(f.clone(), vec![]).is_err());
        let c = Term::fun(sym("c", a.clone(), 0), vec![]).unwrap();
        let t = Term::fun(f.clone(), vec![c.clone()]).unwrap();
        assert_eq!(t.type_of(), a);
        let g = sym("g", SimpleType::arrow(SimpleType::arrow(a.clone(), a.clone()), a.clone()), 1);
        assert!(Term::fun(g, vec![c]).is_err());
    }

    #[test]
    fn free_vars_excludes_bound() {
        let a = base("a");
        let fty = SimpleType::arrow(a.clone(), a.clone());
        // \x. F x
        let t = Term::lam(
            "x",
            a.clone(),
            Term::app(Term::free("F", fty.clone()), Term::free("x", a.clone())).unwrap(),
        );
        let fv = t.free_vars();
        assert_eq!(fv.len(), 1);
        assert_eq!(fv.get("F"), Some(&fty));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (\x. F x){F -> \y. x0} where x0 is a free variable named like
        // a binder candidate: nameless binders make capture impossible.
        let a = base("a");
        let fty = SimpleType::arrow(a.clone(), a.clone());
        let t = Term::lam(
            "x0",
            a.clone(),
            Term::app(Term::free("F", fty.clone()), Term::free("x0", a.clone())).unwrap(),
        );
        let replacement = Term::lam("y", a.clone(), Term::free("x0", a.clone()));
        let mut sigma = Substitution::new();
        sigma.bind("F", &fty, replacement).unwrap();
        let result = t.substitute(&sigma);
        // x0 of the range stays free.
        assert!(result.free_vars().contains_key("x0"));
        assert_eq!(result.type_of(), fty);
    }

    #[test]
    fn substitution_example_from_nonversatility_discussion() {
        // (y x){y -> \z. d} = (\z. d) x
        let a = base("a");
        let yty = SimpleType::arrow(a.clone(), a.clone());
        let t = Term::app(Term::free("y", yty.clone()), Term::free("x", a.clone())).unwrap();
        let d = Term::fun(sym("d", a.clone(), 0), vec![]).unwrap();
        let mut sigma = Substitution::new();
        sigma.bind("y", &yty, Term::lam("z", a.clone(), d.clone())).unwrap();
        let expected = Term::app(Term::lam("z", a.clone(), d), Term::free("x", a)).unwrap();
        assert_eq!(t.substitute(&sigma), expected);
    }

    #[test]
    fn open_close_round_trip() {
        let a = base("a");
        let body = Term::app(
            Term::free("F", SimpleType::arrow(a.clone(), a.clone())),
            Term::free("v", a.clone()),
        )
        .unwrap();
        let lam = Term::lam("v", a.clone(), body.clone());
        match &lam {
            Term::Lam(_, inner) => {
                assert_eq!(inner.open(&Term::free("v", a.clone())), body);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn subterm_positions_enumerates_all_nodes() {
        let a = base("a");
        let f = sym(
            "f",
            SimpleType::arrow_chain([a.clone(), a.clone()], a.clone()),
            2,
        );
        let s = Term::fun(
            f,
            vec![Term::free("u", a.clone()), Term::free("w", a.clone())],
        )
        .unwrap();
        let mut fresh = FreshVars::new();
        let subs = s.subterm_positions(&mut fresh);
        assert_eq!(subs.len(), 3);
        assert_eq!(subs[0].0, Vec::<usize>::new());
        assert_eq!(subs[1], (vec![1], Term::free("u", a.clone())));
        assert_eq!(subs[2], (vec![2], Term::free("w", a)));
    }

    #[test]
    fn subterm_positions_opens_binders_with_fresh_vars() {
        let a = base("a");
        let f = sym("f", SimpleType::arrow(a.clone(), a.clone()), 1);
        let t = Term::lam(
            "x",
            a.clone(),
            Term::fun(f, vec![Term::free("x", a.clone())]).unwrap(),
        );
        let mut fresh = FreshVars::new();
        let subs = t.subterm_positions(&mut fresh);
        // \x.f(x), f(z!0), z!0
        assert_eq!(subs.len(), 3);
        assert!(matches!(&subs[2].1, Term::Free(n, _) if n.contains('!')));
        assert_eq!(subs[1].1.free_vars().len(), 1);
    }

    #[test]
    fn display_is_readable() {
        let a = base("a");
        let f = sym("f", SimpleType::arrow(a.clone(), a.clone()), 1);
        let t = Term::lam(
            "x",
            a.clone(),
            Term::fun(f, vec![Term::free("x", a.clone())]).unwrap(),
        );
        assert_eq!(t.to_string(), "\\x0:a. f(x0)");
    }
}
