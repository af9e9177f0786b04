//! SMT-script backend of the parameter search: a definitional (Tseitin)
//! encoding of the order's inference rules over symbolic parameters.
//!
//! Integer variables carry precedences and base levels (bounded by the
//! symbol resp. base count, since only the relative order matters);
//! boolean variables carry status, big flags, accessible positions and
//! basic flags. Every strict judgment reachable from a rule's root
//! comparison gets one shared definitional variable; type comparisons
//! expand through the type-order recursion into comparisons of level
//! variables; subterm and structurally-smaller chains are expanded
//! syntactically with their basic/acc guards left symbolic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::params::{OrderParams, Status};
use crate::problem::Problem;
use crate::structure::{is_nonversatile, locally_closed, Marked};
use crate::term::Term;
use crate::typeorder::{pos_sets, spos};
use crate::types::SimpleType;

/// A quantifier-free formula over the parameter variables and the
/// definitional variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exp {
    Const(bool),
    /// prec(f) > prec(g)
    PrecGt(String, String),
    /// prec(f) = prec(g)
    PrecEq(String, String),
    /// level(a) > level(b)
    LevelGt(String, String),
    Big(String),
    Mul(String),
    Acc(String, usize),
    Basic(String),
    Def(usize),
    Not(Box<Exp>),
    And(Vec<Exp>),
    Or(Vec<Exp>),
}

/// Conjunction with constant folding and flattening.
pub fn and(parts: Vec<Exp>) -> Exp {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Exp::Const(true) => {}
            Exp::Const(false) => return Exp::Const(false),
            Exp::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Exp::Const(true),
        1 => out.pop().unwrap(),
        _ => Exp::And(out),
    }
}

/// Disjunction with constant folding and flattening.
pub fn or(parts: Vec<Exp>) -> Exp {
    let mut out = Vec::new();
    for p in parts {
        match p {
            Exp::Const(false) => {}
            Exp::Const(true) => return Exp::Const(true),
            Exp::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Exp::Const(false),
        1 => out.pop().unwrap(),
        _ => Exp::Or(out),
    }
}

fn not(e: Exp) -> Exp {
    match e {
        Exp::Const(b) => Exp::Const(!b),
        Exp::Not(inner) => *inner,
        other => Exp::Not(Box::new(other)),
    }
}

fn implies(a: Exp, b: Exp) -> Exp {
    or(vec![not(a), b])
}

fn iff(a: Exp, b: Exp) -> Exp {
    or(vec![
        and(vec![a.clone(), b.clone()]),
        and(vec![not(a), not(b)]),
    ])
}

/// The complete symbolic encoding of one problem.
#[derive(Debug)]
pub struct Encoding {
    /// Definitional bodies: `defs[i]` is the formula the variable `d_i`
    /// abbreviates.
    pub defs: Vec<Exp>,
    /// Parameter admissibility constraints.
    pub globals: Vec<Exp>,
    /// One root formula per rule (`ℓ >τ^∅ r`), in rule order.
    pub roots: Vec<Exp>,
    /// Symbol names, for variable declarations.
    pub symbols: Vec<String>,
    /// Base-type names.
    pub bases: Vec<String>,
    /// Statically admissible accessible positions per symbol.
    pub allowed_acc: BTreeMap<String, BTreeSet<usize>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("encoding exceeds the node budget of {0} definitions")]
    BudgetExceeded(usize),
}

/// Default definitional-variable budget.
pub const DEFAULT_BUDGET: usize = 200_000;

/// Encodes orientability of every rule as an SMT problem over symbolic
/// order parameters.
pub fn encode_problem(problem: &Problem) -> Result<Encoding, EncodeError> {
    encode_problem_with(problem, DEFAULT_BUDGET)
}

/// [`encode_problem`] with an explicit definition budget.
pub fn encode_problem_with(problem: &Problem, budget: usize) -> Result<Encoding, EncodeError> {
    let mut enc = Encoder {
        defs: Vec::new(),
        memo: HashMap::new(),
        budget,
        allowed_acc: allowed_acc_positions(problem),
    };
    let mut roots = Vec::new();
    for rule in &problem.rules {
        // Rule sides have equal types, so the type comparison of the
        // root judgment is reflexively true.
        roots.push(enc.gt(&rule.lhs, &rule.rhs, &Marked::new())?);
    }
    let globals = global_constraints(problem, &enc.allowed_acc);
    Ok(Encoding {
        defs: enc.defs,
        globals,
        roots,
        symbols: problem.symbols.keys().cloned().collect(),
        bases: problem.base_types.iter().cloned().collect(),
        allowed_acc: enc.allowed_acc,
    })
}

/// Positions that can be accessible regardless of the level assignment:
/// the positivity condition on position sets is parameter-independent.
pub fn allowed_acc_positions(problem: &Problem) -> BTreeMap<String, BTreeSet<usize>> {
    let mut out = BTreeMap::new();
    for (name, sym) in &problem.symbols {
        let (arg_tys, result) = sym.ty().decompose();
        let mut allowed = BTreeSet::new();
        for (idx, ti) in arg_tys.iter().enumerate() {
            let ps = pos_sets(result, ti);
            if ps.of_a.is_subset(&ps.pos) {
                allowed.insert(idx + 1);
            }
        }
        out.insert(name.clone(), allowed);
    }
    out
}

/// `a ⩾̇ b` for every base `b` in `ty`, as a formula over level variables.
fn enc_base_dominates(a: &str, ty: &SimpleType) -> Exp {
    let mut parts = Vec::new();
    for b in ty.base_names() {
        if b != a {
            parts.push(Exp::LevelGt(a.to_string(), b.to_string()));
        }
    }
    and(parts)
}

/// `T > U` in the admissible type order, over level variables.
fn enc_type_gt(t: &SimpleType, u: &SimpleType) -> Exp {
    match (t, u) {
        (SimpleType::Base(a), SimpleType::Base(b)) => {
            if a == b {
                Exp::Const(false)
            } else {
                Exp::LevelGt(a.clone(), b.clone())
            }
        }
        (SimpleType::Base(_), SimpleType::Arrow(..)) => Exp::Const(false),
        (SimpleType::Arrow(t1, t2), u) => {
            let mut parts = vec![if u == t2.as_ref() {
                Exp::Const(true)
            } else {
                enc_type_gt(t2, u)
            }];
            if let SimpleType::Arrow(u1, u2) = u {
                if u1 == t1 {
                    parts.push(enc_type_gt(t2, u2));
                }
            }
            or(parts)
        }
    }
}

fn enc_type_geq(t: &SimpleType, u: &SimpleType) -> Exp {
    if t == u {
        Exp::Const(true)
    } else {
        enc_type_gt(t, u)
    }
}

/// The auxiliary well-founded relation on types, over level variables.
fn enc_type_gtdot(t: &SimpleType, u: &SimpleType) -> Exp {
    match (t, u) {
        (SimpleType::Base(a), SimpleType::Base(b)) => {
            if a == b {
                Exp::Const(false)
            } else {
                Exp::LevelGt(a.clone(), b.clone())
            }
        }
        (SimpleType::Base(_), SimpleType::Arrow(..)) => Exp::Const(false),
        (SimpleType::Arrow(t1, t2), u) => or(vec![
            enc_type_gt(t, u),
            Exp::Const(u == t1.as_ref() || u == t2.as_ref()),
            enc_type_gtdot(t1, u),
            enc_type_gtdot(t2, u),
        ]),
    }
}

fn enc_type_geqdot(t: &SimpleType, u: &SimpleType) -> Exp {
    if t == u {
        Exp::Const(true)
    } else {
        enc_type_gtdot(t, u)
    }
}

/// Every admissibility constraint of `validate_params`, symbolically.
fn global_constraints(
    problem: &Problem,
    allowed_acc: &BTreeMap<String, BTreeSet<usize>>,
) -> Vec<Exp> {
    let mut out = Vec::new();
    let symbols: Vec<_> = problem.symbols.values().collect();
    let bases: Vec<_> = problem.base_types.iter().collect();

    // Equal precedence forces equal status.
    for (i, f) in symbols.iter().enumerate() {
        for g in &symbols[i + 1..] {
            out.push(implies(
                Exp::PrecEq(f.name().into(), g.name().into()),
                iff(Exp::Mul(f.name().into()), Exp::Mul(g.name().into())),
            ));
        }
    }
    // Big is upward closed: prec(f) >= prec(g) and big(g) imply big(f).
    for f in &symbols {
        for g in &symbols {
            if f.name() == g.name() {
                continue;
            }
            out.push(or(vec![
                Exp::PrecGt(g.name().into(), f.name().into()),
                not(Exp::Big(g.name().into())),
                Exp::Big(f.name().into()),
            ]));
        }
    }
    // Accessible positions need base dominance (positivity is static and
    // already folded into `allowed_acc`).
    for f in &symbols {
        let (arg_tys, result) = f.ty().decompose();
        for &i in &allowed_acc[f.name()] {
            out.push(implies(
                Exp::Acc(f.name().into(), i),
                enc_base_dominates(result, arg_tys[i - 1]),
            ));
        }
    }
    // Basic bases are downward closed along the levels.
    for a in &bases {
        for b in &bases {
            if a == b {
                continue;
            }
            out.push(implies(
                and(vec![
                    Exp::Basic((*a).clone()),
                    Exp::LevelGt((*a).clone(), (*b).clone()),
                ]),
                Exp::Basic((*b).clone()),
            ));
        }
    }
    // Accessible arguments of symbols producing a basic base stay basic.
    for f in &symbols {
        let (arg_tys, result) = f.ty().decompose();
        for &i in &allowed_acc[f.name()] {
            let arg_ok = match arg_tys[i - 1].as_base() {
                Some(b) if b == result => Exp::Const(true),
                Some(b) => Exp::Basic(b.to_string()),
                None => Exp::Const(false),
            };
            out.push(implies(
                and(vec![
                    Exp::Basic(result.to_string()),
                    Exp::Acc(f.name().into(), i),
                ]),
                arg_ok,
            ));
        }
    }
    // Small-symbol conditions.
    for f in &symbols {
        let (arg_tys, result) = f.ty().decompose();
        let n = arg_tys.len();
        let ar = f.arity();
        let mut needed = Vec::new();
        if ar == n {
            for ti in &arg_tys {
                needed.push(enc_base_dominates(result, ti));
                needed.push(Exp::Const(spos(result, ti).is_empty()));
            }
        } else {
            for &i in &allowed_acc[f.name()] {
                needed.push(not(Exp::Acc(f.name().into(), i)));
            }
            let tail = f.ty().result_after(ar).expect("arity within arrows");
            for ti in arg_tys.iter().take(ar) {
                needed.push(enc_base_dominates(result, ti));
                needed.push(enc_type_geqdot(tail, ti));
            }
        }
        out.push(or(vec![Exp::Big(f.name().into()), and(needed)]));
    }
    out.retain(|e| *e != Exp::Const(true));
    out
}

struct Encoder {
    defs: Vec<Exp>,
    memo: HashMap<(Term, Term, Marked), usize>,
    budget: usize,
    allowed_acc: BTreeMap<String, BTreeSet<usize>>,
}

impl Encoder {
    fn acc_exp(&self, f: &str, i: usize) -> Exp {
        if self.allowed_acc.get(f).is_some_and(|s| s.contains(&i)) {
            Exp::Acc(f.to_string(), i)
        } else {
            Exp::Const(false)
        }
    }

    fn fresh_name(&self, s: &Term, t: &Term, marked: &Marked) -> String {
        let sv = s.free_vars();
        let tv = t.free_vars();
        for n in 0.. {
            let candidate = format!("z!{n}");
            if !sv.contains_key(&candidate)
                && !tv.contains_key(&candidate)
                && !marked.contains_key(&candidate)
            {
                return candidate;
            }
        }
        unreachable!()
    }

    /// s >^X t as a definitional variable (shared across judgments).
    fn gt(&mut self, s: &Term, t: &Term, marked: &Marked) -> Result<Exp, EncodeError> {
        if !is_nonversatile(s) {
            return Ok(Exp::Const(false));
        }
        let key = (s.clone(), t.clone(), marked.clone());
        if let Some(&id) = self.memo.get(&key) {
            return Ok(Exp::Def(id));
        }
        if self.defs.len() >= self.budget {
            return Err(EncodeError::BudgetExceeded(self.budget));
        }
        // Reserve the id before recursing; the recursion cannot revisit
        // this key because the (|s|, |t|) measure strictly decreases.
        let id = self.defs.len();
        self.defs.push(Exp::Const(false));
        self.memo.insert(key, id);
        let body = self.gt_body(s, t, marked)?;
        self.defs[id] = body;
        Ok(Exp::Def(id))
    }

    fn gt_tau(&mut self, s: &Term, t: &Term, marked: &Marked) -> Result<Exp, EncodeError> {
        Ok(and(vec![
            enc_type_geq(&s.type_of(), &t.type_of()),
            self.gt(s, t, marked)?,
        ]))
    }

    fn geq(&mut self, s: &Term, t: &Term, marked: &Marked) -> Result<Exp, EncodeError> {
        if s == t {
            Ok(Exp::Const(true))
        } else {
            self.gt(s, t, marked)
        }
    }

    fn geq_tau(&mut self, s: &Term, t: &Term, marked: &Marked) -> Result<Exp, EncodeError> {
        if s == t {
            Ok(Exp::Const(true))
        } else {
            self.gt_tau(s, t, marked)
        }
    }

    fn gt_body(&mut self, s: &Term, t: &Term, marked: &Marked) -> Result<Exp, EncodeError> {
        match s {
            Term::Fun(f, ts) => {
                let big = self.big_cases(s, f.name(), ts, t, marked)?;
                let small = self.small_cases(s, f.name(), ts, t, marked)?;
                Ok(or(vec![
                    and(vec![Exp::Big(f.name().into()), big]),
                    and(vec![not(Exp::Big(f.name().into())), small]),
                ]))
            }
            Term::App(fun, arg) => self.app_cases(s, fun, arg, t, marked),
            Term::Lam(ty, body) => self.lam_cases(s, ty, body, t, marked),
            Term::Free(..) | Term::Bound(_) => Ok(Exp::Const(false)),
        }
    }

    fn big_cases(
        &mut self,
        s: &Term,
        f: &str,
        ts: &[Term],
        t: &Term,
        marked: &Marked,
    ) -> Result<Exp, EncodeError> {
        let mut cases = Vec::new();
        if let Term::Free(y, _) = t {
            if marked.contains_key(y) {
                cases.push(Exp::Const(true));
            }
        }
        match t {
            Term::Fun(g, us) => {
                let eq_ext = or(vec![
                    and(vec![
                        Exp::Mul(f.to_string()),
                        self.mul_ext(ts, us, true, marked)?,
                    ]),
                    and(vec![
                        not(Exp::Mul(f.to_string())),
                        self.lex_ext(s, ts, us, marked)?,
                    ]),
                ]);
                cases.push(and(vec![
                    Exp::PrecEq(f.to_string(), g.name().into()),
                    eq_ext,
                ]));
                let mut under = vec![Exp::PrecGt(f.to_string(), g.name().into())];
                for u in us {
                    under.push(self.gt(s, u, marked)?);
                }
                cases.push(and(under));
            }
            Term::App(u, v) => {
                cases.push(and(vec![
                    self.gt(s, u, marked)?,
                    self.gt(s, v, marked)?,
                ]));
            }
            Term::Lam(ty, body) => {
                let z = self.fresh_name(s, t, marked);
                let zt = Term::free(z.clone(), ty.clone());
                let mut extended = marked.clone();
                extended.insert(z, ty.clone());
                cases.push(self.gt(s, &body.open(&zt), &extended)?);
            }
            _ => {}
        }
        cases.push(self.sub_big(ts, t)?);
        Ok(or(cases))
    }

    /// The basic/accessible subterm case: some tᵢ reaches t through a
    /// guarded ⊵_b · ⊵_acc chain followed by ≥τ at the empty marked set.
    fn sub_big(&mut self, ts: &[Term], t: &Term) -> Result<Exp, EncodeError> {
        let empty = Marked::new();
        let mut cases = Vec::new();
        for ti in ts {
            let mut firsts = vec![(ti.clone(), Exp::Const(true))];
            if is_nonversatile(ti) {
                firsts.extend(self.guarded_bsubt(ti));
            }
            for (w1, g1) in firsts {
                let mut seconds = vec![(w1.clone(), Exp::Const(true))];
                seconds.extend(self.guarded_asubt(&w1));
                for (w2, g2) in seconds {
                    let tail = self.geq_tau(&w2, t, &empty)?;
                    cases.push(and(vec![g1.clone(), g2, tail]));
                }
            }
        }
        Ok(or(cases))
    }

    /// Proper subterms reachable through nonversatile intermediate nodes
    /// that are locally closed and of base type, each guarded by its
    /// base's basic flag.
    fn guarded_bsubt(&self, s: &Term) -> Vec<(Term, Exp)> {
        fn descend(node: &Term, out: &mut Vec<(Term, Exp)>) {
            let mut visit = |child: &Term| {
                if locally_closed(child) {
                    if let Some(b) = child.type_of().as_base() {
                        out.push((child.clone(), Exp::Basic(b.to_string())));
                    }
                }
                descend(child, out);
            };
            match node {
                Term::Bound(_) | Term::Free(..) => {}
                Term::Fun(_, args) => args.iter().for_each(visit),
                Term::App(u, v) => {
                    if is_nonversatile(node) {
                        visit(u);
                        visit(v);
                    }
                }
                Term::Lam(_, body) => {
                    if is_nonversatile(node) {
                        visit(body);
                    }
                }
            }
        }
        let mut out = Vec::new();
        descend(s, &mut out);
        out
    }

    /// Accessible subterms with their acc guards: each chain step through
    /// argument j of head symbol f contributes the guard acc(f, j).
    fn guarded_asubt(&self, s: &Term) -> Vec<(Term, Exp)> {
        let mut out = Vec::new();
        self.guarded_asubt_into(s, &Exp::Const(true), &mut out);
        out
    }

    fn guarded_asubt_into(&self, s: &Term, guard: &Exp, out: &mut Vec<(Term, Exp)>) {
        let (head, trailing) = s.spine();
        let Term::Fun(f, args) = head else {
            return;
        };
        let all_args: Vec<&Term> = args.iter().chain(trailing).collect();
        for j in 1..=all_args.len() {
            let step = self.acc_exp(f.name(), j);
            if step == Exp::Const(false) {
                continue;
            }
            let g = and(vec![guard.clone(), step]);
            out.push((all_args[j - 1].clone(), g.clone()));
            self.guarded_asubt_into(all_args[j - 1], &g, out);
        }
    }

    /// Structurally-smaller witnesses of s under the marked set, with
    /// their acc guards: accessible subterms applied to marked variables
    /// whose types avoid the result base, ending at that base.
    fn guarded_structsm(&self, s: &Term, marked: &Marked) -> Vec<(Term, Exp)> {
        let mut out = Vec::new();
        let Some(a) = s.type_of().as_base().map(str::to_string) else {
            return out;
        };
        fn extend(w: Term, g: &Exp, a: &str, marked: &Marked, out: &mut Vec<(Term, Exp)>) {
            match w.type_of() {
                SimpleType::Base(b) => {
                    if b == a {
                        out.push((w, g.clone()));
                    }
                }
                SimpleType::Arrow(dom, _) => {
                    for (x, ty) in marked {
                        if *ty == *dom && pos_sets(a, ty).of_a.is_empty() {
                            let next = Term::app(w.clone(), Term::free(x.clone(), ty.clone()))
                                .expect("domain matched");
                            extend(next, g, a, marked, out);
                        }
                    }
                }
            }
        }
        for (u, g) in self.guarded_asubt(s) {
            extend(u, &g, &a, marked, &mut out);
        }
        out
    }

    /// One argument comparison of the big equal-precedence extension:
    /// >τ at the empty marked set, or a structurally-smaller witness
    /// followed by ≥τ.
    fn arg_cmp(
        &mut self,
        ti: &Term,
        uj: &Term,
        big: bool,
        marked: &Marked,
    ) -> Result<Exp, EncodeError> {
        let empty = Marked::new();
        let mut cases = vec![self.gt_tau(ti, uj, &empty)?];
        if big {
            for (w, g) in self.guarded_structsm(ti, marked) {
                cases.push(and(vec![g, self.geq_tau(&w, uj, &empty)?]));
            }
        }
        Ok(or(cases))
    }

    /// Multiset extension after cancelling the maximal common submultiset
    /// (syntactic equality is parameter-independent, so cancellation is
    /// static): the left remainder must be nonempty and cover every
    /// right remainder element.
    fn mul_ext(
        &mut self,
        ts: &[Term],
        us: &[Term],
        big: bool,
        marked: &Marked,
    ) -> Result<Exp, EncodeError> {
        let mut left: Vec<&Term> = ts.iter().collect();
        let mut rest: Vec<&Term> = Vec::new();
        for u in us {
            if let Some(pos) = left.iter().position(|t| *t == u) {
                left.remove(pos);
            } else {
                rest.push(u);
            }
        }
        if left.is_empty() {
            return Ok(Exp::Const(false));
        }
        let mut parts = Vec::new();
        for u in rest {
            let mut covers = Vec::new();
            for t in &left {
                covers.push(self.arg_cmp(t, u, big, marked)?);
            }
            parts.push(or(covers));
        }
        Ok(and(parts))
    }

    /// Lexicographic extension: the first syntactic difference within the
    /// common length decides, followed by root comparisons against the
    /// remaining right arguments.
    fn lex_ext(
        &mut self,
        s: &Term,
        ts: &[Term],
        us: &[Term],
        marked: &Marked,
    ) -> Result<Exp, EncodeError> {
        for i in 0..ts.len().min(us.len()) {
            if ts[i] == us[i] {
                continue;
            }
            let mut parts = vec![self.arg_cmp(&ts[i], &us[i], true, marked)?];
            for uj in &us[i + 1..] {
                parts.push(self.gt(s, uj, marked)?);
            }
            return Ok(and(parts));
        }
        Ok(Exp::Const(false))
    }

    fn small_cases(
        &mut self,
        s: &Term,
        f: &str,
        ts: &[Term],
        t: &Term,
        marked: &Marked,
    ) -> Result<Exp, EncodeError> {
        let mut cases = Vec::new();
        if let Term::Free(y, _) = t {
            if marked.contains_key(y) {
                cases.push(Exp::Const(true));
            }
        }
        match t {
            Term::Fun(g, us) => {
                let mut all = Vec::new();
                for u in us {
                    all.push(self.gt_tau(s, u, marked)?);
                }
                let ext = or(vec![
                    and(vec![
                        Exp::Mul(f.to_string()),
                        self.mul_ext(ts, us, false, marked)?,
                    ]),
                    and(vec![
                        not(Exp::Mul(f.to_string())),
                        self.lex_small(ts, us, marked)?,
                    ]),
                ]);
                cases.push(and(vec![
                    Exp::PrecEq(f.to_string(), g.name().into()),
                    and(all.clone()),
                    ext,
                ]));
                let mut under = vec![Exp::PrecGt(f.to_string(), g.name().into())];
                under.extend(all);
                cases.push(and(under));
            }
            Term::App(u, v) => {
                cases.push(and(vec![
                    self.gt_tau(s, u, marked)?,
                    self.gt_tau(s, v, marked)?,
                ]));
            }
            _ => {}
        }
        let empty = Marked::new();
        for ti in ts {
            cases.push(self.geq_tau(ti, t, &empty)?);
        }
        Ok(or(cases))
    }

    /// Lexicographic extension of the small equal-precedence rule (the
    /// argument comparison is >τ only).
    fn lex_small(&mut self, ts: &[Term], us: &[Term], marked: &Marked) -> Result<Exp, EncodeError> {
        for i in 0..ts.len().min(us.len()) {
            if ts[i] == us[i] {
                continue;
            }
            return self.arg_cmp(&ts[i], &us[i], false, marked);
        }
        Ok(Exp::Const(false))
    }

    fn app_cases(
        &mut self,
        s: &Term,
        fun: &Term,
        arg: &Term,
        t: &Term,
        marked: &Marked,
    ) -> Result<Exp, EncodeError> {
        let mut cases = Vec::new();
        if let Term::Free(y, _) = t {
            if marked.contains_key(y) {
                cases.push(Exp::Const(true));
            }
        }
        cases.push(self.geq(fun, t, marked)?);
        cases.push(self.geq_tau(arg, t, marked)?);
        match t {
            Term::App(tfun, targ) => {
                if fun == tfun.as_ref() {
                    cases.push(self.gt(arg, targ, marked)?);
                }
                let cl = self.app_helper(s, fun, arg, tfun, marked)?;
                let cr = self.app_helper(s, fun, arg, targ, marked)?;
                cases.push(and(vec![cl, cr]));
            }
            Term::Lam(ty, body) => {
                let z = self.fresh_name(s, t, marked);
                let zt = Term::free(z, ty.clone());
                cases.push(self.gt(s, &body.open(&zt), marked)?);
            }
            Term::Fun(g, vs) => {
                let mut parts = vec![not(Exp::Big(g.name().into()))];
                for v in vs {
                    parts.push(self.gt_tau(s, v, marked)?);
                }
                cases.push(and(parts));
            }
            _ => {}
        }
        Ok(or(cases))
    }

    fn app_helper(
        &mut self,
        s: &Term,
        fun: &Term,
        arg: &Term,
        v: &Term,
        marked: &Marked,
    ) -> Result<Exp, EncodeError> {
        Ok(or(vec![
            self.gt_tau(fun, v, marked)?,
            self.geq_tau(arg, v, marked)?,
            self.gt_tau(s, v, marked)?,
        ]))
    }

    fn lam_cases(
        &mut self,
        s: &Term,
        tx: &SimpleType,
        body: &Term,
        t: &Term,
        marked: &Marked,
    ) -> Result<Exp, EncodeError> {
        let mut cases = Vec::new();
        if let Term::Free(y, _) = t {
            if marked.contains_key(y) {
                cases.push(Exp::Const(true));
            }
        }
        if let Term::Lam(ty, tbody) = t {
            let z = self.fresh_name(s, t, marked);
            if ty == tx {
                let zt = Term::free(z, tx.clone());
                cases.push(self.gt(&body.open(&zt), &tbody.open(&zt), marked)?);
            } else {
                let zt = Term::free(z, ty.clone());
                cases.push(self.gt(s, &tbody.open(&zt), marked)?);
            }
        }
        if let Term::Fun(g, vs) = t {
            let mut parts = vec![not(Exp::Big(g.name().into()))];
            for v in vs {
                parts.push(self.gt_tau(s, v, marked)?);
            }
            cases.push(and(parts));
        }
        {
            let z = self.fresh_name(s, t, marked);
            let zt = Term::free(z, tx.clone());
            cases.push(self.geq_tau(&body.open(&zt), t, marked)?);
        }
        let eta_applies = match t.type_of() {
            SimpleType::Arrow(dom, _) => *dom == *tx && !matches!(t, Term::Lam(..)),
            SimpleType::Base(_) => false,
        };
        if eta_applies {
            let z = self.fresh_name(s, t, marked);
            let zt = Term::free(z, tx.clone());
            let rhs = Term::app(t.clone(), zt.clone()).expect("domain checked");
            cases.push(self.geq_tau(&body.open(&zt), &rhs, marked)?);
        }
        Ok(or(cases))
    }
}

/// Evaluates a formula under concrete parameters, resolving definitional
/// variables through the encoding.
pub fn eval_exp(e: &Exp, enc: &Encoding, params: &OrderParams, cache: &mut [Option<bool>]) -> bool {
    match e {
        Exp::Const(b) => *b,
        Exp::PrecGt(f, g) => params.prec_of(f) > params.prec_of(g),
        Exp::PrecEq(f, g) => params.prec_of(f) == params.prec_of(g),
        Exp::LevelGt(a, b) => {
            params.levels.level(a).unwrap_or(0) > params.levels.level(b).unwrap_or(0)
        }
        Exp::Big(f) => params.is_big(f),
        Exp::Mul(f) => params.status_of(f) == Status::Mul,
        Exp::Acc(f, i) => params.acc_of(f).contains(i),
        Exp::Basic(a) => params.is_basic(a),
        Exp::Def(i) => {
            if let Some(v) = cache[*i] {
                return v;
            }
            let v = eval_exp(&enc.defs[*i].clone(), enc, params, cache);
            cache[*i] = Some(v);
            v
        }
        Exp::Not(inner) => !eval_exp(inner, enc, params, cache),
        Exp::And(parts) => parts.iter().all(|p| eval_exp(p, enc, params, cache)),
        Exp::Or(parts) => parts.iter().any(|p| eval_exp(p, enc, params, cache)),
    }
}

/// Evaluates each rule's root formula under concrete parameters.
pub fn eval_roots(enc: &Encoding, params: &OrderParams) -> Vec<bool> {
    let mut cache = vec![None; enc.defs.len()];
    enc.roots
        .iter()
        .map(|r| eval_exp(r, enc, params, &mut cache))
        .collect()
}

fn render_exp(e: &Exp, out: &mut String) {
    match e {
        Exp::Const(true) => out.push_str("true"),
        Exp::Const(false) => out.push_str("false"),
        Exp::PrecGt(f, g) => {
            out.push_str(&format!("(> p_{f} p_{g})"));
        }
        Exp::PrecEq(f, g) => {
            out.push_str(&format!("(= p_{f} p_{g})"));
        }
        Exp::LevelGt(a, b) => {
            out.push_str(&format!("(> l_{a} l_{b})"));
        }
        Exp::Big(f) => out.push_str(&format!("big_{f}")),
        Exp::Mul(f) => out.push_str(&format!("mul_{f}")),
        Exp::Acc(f, i) => out.push_str(&format!("acc_{f}_{i}")),
        Exp::Basic(a) => out.push_str(&format!("basic_{a}")),
        Exp::Def(i) => out.push_str(&format!("d{i}")),
        Exp::Not(inner) => {
            out.push_str("(not ");
            render_exp(inner, out);
            out.push(')');
        }
        Exp::And(parts) | Exp::Or(parts) => {
            out.push_str(if matches!(e, Exp::And(_)) {
                "(and"
            } else {
                "(or"
            });
            for p in parts {
                out.push(' ');
                render_exp(p, out);
            }
            out.push(')');
        }
    }
}

/// Renders the encoding as a complete SMT-LIB 2 script.
pub fn render_script(enc: &Encoding) -> String {
    let mut s = String::new();
    s.push_str("(set-logic QF_LIA)\n");
    let prec_bound = enc.symbols.len().saturating_sub(1);
    for f in &enc.symbols {
        s.push_str(&format!("(declare-const p_{f} Int)\n"));
        s.push_str(&format!("(assert (<= 0 p_{f}))\n"));
        s.push_str(&format!("(assert (<= p_{f} {prec_bound}))\n"));
    }
    let level_bound = enc.bases.len().saturating_sub(1);
    for a in &enc.bases {
        s.push_str(&format!("(declare-const l_{a} Int)\n"));
        s.push_str(&format!("(assert (<= 0 l_{a}))\n"));
        s.push_str(&format!("(assert (<= l_{a} {level_bound}))\n"));
    }
    for f in &enc.symbols {
        s.push_str(&format!("(declare-const big_{f} Bool)\n"));
        s.push_str(&format!("(declare-const mul_{f} Bool)\n"));
        for &i in &enc.allowed_acc[f] {
            s.push_str(&format!("(declare-const acc_{f}_{i} Bool)\n"));
        }
    }
    for a in &enc.bases {
        s.push_str(&format!("(declare-const basic_{a} Bool)\n"));
    }
    for (i, _) in enc.defs.iter().enumerate() {
        s.push_str(&format!("(declare-const d{i} Bool)\n"));
    }
    for g in &enc.globals {
        s.push_str("(assert ");
        render_exp(g, &mut s);
        s.push_str(")\n");
    }
    for (i, body) in enc.defs.iter().enumerate() {
        s.push_str(&format!("(assert (= d{i} "));
        render_exp(body, &mut s);
        s.push_str("))\n");
    }
    for r in &enc.roots {
        s.push_str("(assert ");
        render_exp(r, &mut s);
        s.push_str(")\n");
    }
    s.push_str("(check-sat)\n(get-model)\n");
    s
}

/// How to invoke the external solver: a program and leading arguments;
/// the script's file path is appended as the final argument.
#[derive(Debug, Clone)]
pub struct SolverCommand {
    pub program: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverVerdict {
    Sat { model: String },
    Unsat,
    Unknown { reason: String },
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("failed to run {command}: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("solver produced no verdict line: {output}")]
    NoVerdict { output: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Runs a solver subprocess on the script with a wall-clock timeout.
/// Timeouts map to `Unknown`.
pub fn run_solver(
    command: &SolverCommand,
    script: &str,
    timeout: Duration,
) -> Result<SolverVerdict, SolverError> {
    let mut file = tempfile::Builder::new()
        .prefix("ncpo")
        .suffix(".smt2")
        .tempfile()?;
    file.write_all(script.as_bytes())?;
    file.flush()?;

    let mut child = std::process::Command::new(&command.program)
        .args(&command.args)
        .arg(file.path())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .map_err(|source| SolverError::Spawn {
            command: command.program.clone(),
            source,
        })?;

    let start = Instant::now();
    loop {
        match child.try_wait()? {
            Some(_) => break,
            None => {
                if start.elapsed() >= timeout {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Ok(SolverVerdict::Unknown {
                        reason: format!("solver timed out after {}s", timeout.as_secs()),
                    });
                }
                std::thread::sleep(Duration::from_millis(5));
            }
        }
    }
    let output = child.wait_with_output()?;
    let stdout = String::from_utf8_lossy(&output.stdout).to_string();
    for line in stdout.lines() {
        match line.trim() {
            "sat" => {
                let model = stdout
                    .split_once("sat")
                    .map(|(_, rest)| rest.to_string())
                    .unwrap_or_default();
                return Ok(SolverVerdict::Sat { model });
            }
            "unsat" => return Ok(SolverVerdict::Unsat),
            "unknown" => {
                return Ok(SolverVerdict::Unknown {
                    reason: "solver reported unknown".into(),
                })
            }
            _ => continue,
        }
    }
    Err(SolverError::NoVerdict {
        output: format!(
            "{}{}",
            stdout,
            String::from_utf8_lossy(&output.stderr)
        ),
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("model binding {name} has unexpected value {value}")]
    BadValue { name: String, value: String },
    #[error("unbalanced s-expression in model output")]
    Unbalanced,
}

/// Reads an SMT model back into concrete parameters. Unknown or missing
/// bindings keep their defaults (precedence/level 0, status mul, big,
/// empty acc, not basic).
pub fn decode_model(model: &str, problem: &Problem) -> Result<OrderParams, DecodeError> {
    let mut params = OrderParams::defaults_for(problem);
    for (name, value) in model_bindings(model)? {
        if let Some(sym) = name.strip_prefix("p_") {
            if problem.symbols.contains_key(sym) {
                let v = parse_int(&value).ok_or_else(|| DecodeError::BadValue {
                    name: name.clone(),
                    value: value.clone(),
                })?;
                params.prec.insert(sym.to_string(), v);
            }
        } else if let Some(base) = name.strip_prefix("l_") {
            if problem.base_types.contains(base) {
                let v = parse_int(&value).ok_or_else(|| DecodeError::BadValue {
                    name: name.clone(),
                    value: value.clone(),
                })?;
                params.levels.set(base, v.max(0) as u64);
            }
        } else if let Some(sym) = name.strip_prefix("big_") {
            if problem.symbols.contains_key(sym) {
                params.big.insert(sym.to_string(), value == "true");
            }
        } else if let Some(sym) = name.strip_prefix("mul_") {
            if problem.symbols.contains_key(sym) {
                let status = if value == "true" {
                    Status::Mul
                } else {
                    Status::Lex
                };
                params.status.insert(sym.to_string(), status);
            }
        } else if let Some(base) = name.strip_prefix("basic_") {
            if problem.base_types.contains(base) {
                params.basic.insert(base.to_string(), value == "true");
            }
        } else if let Some(rest) = name.strip_prefix("acc_") {
            if let Some((sym, idx)) = rest.rsplit_once('_') {
                if problem.symbols.contains_key(sym) {
                    if let Ok(i) = idx.parse::<usize>() {
                        if value == "true" {
                            params.acc.entry(sym.to_string()).or_default().insert(i);
                        }
                    }
                }
            }
        }
    }
    Ok(params)
}

fn parse_int(value: &str) -> Option<i64> {
    let v = value.trim();
    if let Some(rest) = v.strip_prefix("(-") {
        let inner = rest.trim_end_matches(')').trim();
        return inner.parse::<i64>().ok().map(|n| -n);
    }
    v.parse::<i64>().ok()
}

/// Extracts `(define-fun NAME () TYPE VALUE)` bindings from a model
/// s-expression, tolerating the wrapping `(model ...)` used by some
/// solvers.
fn model_bindings(model: &str) -> Result<Vec<(String, String)>, DecodeError> {
    let tokens = tokenize(model);
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i] == "(" && i + 1 < tokens.len() && tokens[i + 1] == "define-fun" {
            // (define-fun name () Type value...)
            let name = tokens.get(i + 2).cloned().ok_or(DecodeError::Unbalanced)?;
            let mut j = i + 3;
            // skip the argument list
            if tokens.get(j).map(String::as_str) == Some("(") {
                let mut depth = 1;
                j += 1;
                while j < tokens.len() && depth > 0 {
                    match tokens[j].as_str() {
                        "(" => depth += 1,
                        ")" => depth -= 1,
                        _ => {}
                    }
                    j += 1;
                }
            }
            // skip the result type
            j += 1;
            // the value runs to the closing paren of the define-fun
            let mut depth = 0;
            let mut value = String::new();
            while j < tokens.len() {
                match tokens[j].as_str() {
                    "(" => {
                        depth += 1;
                        value.push('(');
                    }
                    ")" => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                        value.push(')');
                    }
                    tok => {
                        if !value.is_empty() && !value.ends_with('(') {
                            value.push(' ');
                        }
                        value.push_str(tok);
                    }
                }
                j += 1;
            }
            out.push((name, value));
            i = j;
        } else {
            i += 1;
        }
    }
    Ok(out)
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::orient_rule;
    use crate::params::{parse_params, validate_params};
    use crate::thf::{infer_arities, parse_problem};

    fn fixture(name: &str) -> String {
        let path = format!("{}/../../problems/{}", env!("CARGO_MANIFEST_DIR"), name);
        std::fs::read_to_string(&path).unwrap()
    }

    fn load(problem: &str) -> Problem {
        infer_arities(&parse_problem(&fixture(problem), problem).unwrap())
    }

    #[test]
    fn script_contains_the_protocol_commands() {
        let p = load("single.p");
        let enc = encode_problem(&p).unwrap();
        let script = render_script(&enc);
        for needle in [
            "(set-logic QF_LIA)",
            "(declare-const p_f Int)",
            "(declare-const big_g Bool)",
            "(check-sat)",
            "(get-model)",
        ] {
            assert!(script.contains(needle), "missing {needle}");
        }
    }

    #[test]
    fn empty_rule_set_encodes_to_globals_only() {
        let mut p = load("single.p");
        p.rules.clear();
        let enc = encode_problem(&p).unwrap();
        assert!(enc.roots.is_empty());
        assert!(!enc.globals.is_empty());
    }

    #[test]
    fn roots_evaluate_like_the_engine_on_the_examples() {
        for (prob, pars) in [
            ("single.p", "single.params"),
            ("diff.p", "diff.params"),
            ("nnf.p", "nnf.params"),
            ("mapinc.p", "mapinc.params"),
        ] {
            let p = load(prob);
            let params = parse_params(&fixture(pars), &p).unwrap();
            assert!(validate_params(&p, &params).is_ok());
            let enc = encode_problem(&p).unwrap();
            let values = eval_roots(&enc, &params);
            for (rule, value) in p.rules.iter().zip(&values) {
                let oriented = orient_rule(rule, &params).is_some();
                assert_eq!(
                    *value, oriented,
                    "{prob}: rule {} encoding/engine mismatch",
                    rule.name
                );
                assert!(*value, "{prob}: rule {} should orient", rule.name);
            }
        }
    }

    #[test]
    fn defaults_do_not_orient_the_self_embedding() {
        let p = load("selfembed.p");
        let enc = encode_problem(&p).unwrap();
        let params = OrderParams::defaults_for(&p);
        assert_eq!(eval_roots(&enc, &params), vec![false]);
    }

    #[test]
    fn budget_violation_is_reported() {
        let p = load("nnf.p");
        assert_eq!(
            encode_problem_with(&p, 1).unwrap_err(),
            EncodeError::BudgetExceeded(1)
        );
    }

    #[test]
    fn model_decoding_reads_every_variable_kind() {
        let p = load("nnf.p");
        let model = r#"(
  (define-fun p_not () Int 1)
  (define-fun p_and () Int 0)
  (define-fun l_f () Int 1)
  (define-fun l_t () Int 0)
  (define-fun mul_not () Bool true)
  (define-fun mul_or () Bool false)
  (define-fun big_not () Bool true)
  (define-fun big_ex () Bool false)
  (define-fun acc_all_1 () Bool true)
  (define-fun basic_t () Bool true)
)"#;
        let params = decode_model(model, &p).unwrap();
        assert_eq!(params.prec_of("not"), 1);
        assert_eq!(params.prec_of("and"), 0);
        assert_eq!(params.levels.level("f").unwrap(), 1);
        assert_eq!(params.status_of("not"), Status::Mul);
        assert_eq!(params.status_of("or"), Status::Lex);
        assert!(params.is_big("not"));
        assert!(!params.is_big("ex"));
        assert!(params.acc_of("all").contains(&1));
        assert!(params.is_basic("t"));
        assert!(!params.is_basic("f"));
    }

    #[test]
    fn negative_integers_in_models_are_parsed() {
        assert_eq!(parse_int("(- 3)"), Some(-3));
        assert_eq!(parse_int("7"), Some(7));
        assert_eq!(parse_int("x"), None);
    }

    #[test]
    fn encode_decode_round_trips_variable_names() {
        // Every declared variable in the script is decodable: feed a
        // fabricated model that binds each declared name and check the
        // decoded parameters reflect the bindings.
        let p = load("mapinc.p");
        let enc = encode_problem(&p).unwrap();
        let mut model = String::from("(\n");
        for f in &enc.symbols {
            model.push_str(&format!("(define-fun p_{f} () Int 2)\n"));
            model.push_str(&format!("(define-fun mul_{f} () Bool false)\n"));
            model.push_str(&format!("(define-fun big_{f} () Bool true)\n"));
            for i in &enc.allowed_acc[f] {
                model.push_str(&format!("(define-fun acc_{f}_{i} () Bool true)\n"));
            }
        }
        for a in &enc.bases {
            model.push_str(&format!("(define-fun l_{a} () Int 1)\n"));
            model.push_str(&format!("(define-fun basic_{a} () Bool true)\n"));
        }
        model.push(')');
        let params = decode_model(&model, &p).unwrap();
        for f in &enc.symbols {
            assert_eq!(params.prec_of(f), 2);
            assert_eq!(params.status_of(f), Status::Lex);
            assert_eq!(params.acc_of(f), enc.allowed_acc[f]);
        }
        for a in &enc.bases {
            assert_eq!(params.levels.level(a).unwrap(), 1);
            assert!(params.is_basic(a));
        }
    }
}
