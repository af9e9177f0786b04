//! Structural ingredients of the order: nonversatility, the basic
//! subterm relation ⊳_b, the accessible subterm relation ⊳_acc and the
//! structurally-smaller relation ≫_X.

use std::collections::{BTreeMap, BTreeSet};

use crate::normalize::is_beta_eta_normal;
use crate::params::OrderParams;
use crate::term::Term;
use crate::typeorder::pos_sets;
use crate::types::SimpleType;

/// The set X of marked variables, with their types.
pub type Marked = BTreeMap<String, SimpleType>;

/// Sufficient syntactic condition for nonversatility: substitution
/// followed by βη-normalization only affects proper subterms. The
/// checked shapes are (i) applied function symbols, (ii) applications
/// with a nonversatile left part, (iii) abstractions λx.ux all of whose
/// application subterms are nonversatile, and (iv) abstractions λx.u
/// with u ≠ vx where u is a variable or nonversatile and an application
/// or abstraction argument of u is itself nonversatile. Variables are
/// always versatile.
pub fn is_nonversatile(t: &Term) -> bool {
    debug_assert!(is_beta_eta_normal(t), "nonversatility needs a normal form");
    match t {
        Term::Bound(_) | Term::Free(..) => false,
        Term::Fun(..) => true,
        Term::App(u, _) => is_nonversatile(u),
        Term::Lam(_, body) => {
            // Clause (iii): body of shape u x with x the bound variable.
            let clause_iii = match body.as_ref() {
                Term::App(_, arg) if **arg == Term::Bound(0) => all_apps_nonversatile(body),
                _ => false,
            };
            if clause_iii {
                return true;
            }
            // Clause (iv).
            if let Term::App(_, arg) = body.as_ref() {
                if **arg == Term::Bound(0) {
                    return false; // u = vx is excluded here
                }
            }
            let head_ok = match body.as_ref() {
                Term::Bound(_) | Term::Free(..) => true,
                other => is_nonversatile(other),
            };
            if !head_ok {
                return false;
            }
            match body.as_ref() {
                Term::App(_, w) => match w.as_ref() {
                    Term::App(..) | Term::Lam(..) => is_nonversatile(w),
                    _ => true,
                },
                _ => true,
            }
        }
    }
}

/// Every application subterm (in the `uv` sense; applied function
/// symbols are separate constructors) is nonversatile. Bound variables
/// under crossed binders behave like free ones for this check, so no
/// opening is needed.
fn all_apps_nonversatile(t: &Term) -> bool {
    let self_ok = match t {
        Term::App(..) => is_nonversatile(t),
        _ => true,
    };
    self_ok
        && match t {
            Term::Bound(_) | Term::Free(..) => true,
            Term::Fun(_, args) => args.iter().all(all_apps_nonversatile),
            Term::App(u, v) => all_apps_nonversatile(u) && all_apps_nonversatile(v),
            Term::Lam(_, body) => all_apps_nonversatile(body),
        }
}

/// No dangling de Bruijn indices: every `Bound` points at a binder
/// inside the term itself.
pub fn locally_closed(t: &Term) -> bool {
    locally_closed_at(t, 0)
}

/// `Bound` indices all point at binders inside the term itself.
fn locally_closed_at(t: &Term, depth: usize) -> bool {
    match t {
        Term::Bound(i) => *i < depth,
        Term::Free(..) => true,
        Term::Fun(_, args) => args.iter().all(|a| locally_closed_at(a, depth)),
        Term::App(u, v) => locally_closed_at(u, depth) && locally_closed_at(v, depth),
        Term::Lam(_, body) => locally_closed_at(body, depth + 1),
    }
}

/// All t with s ⊳_b t: proper subterms of basic base type reached by
/// descending freely through applied-symbol arguments and through
/// application/abstraction nodes only when the node passed through is
/// nonversatile; subterms where a crossed bound variable would escape
/// are excluded. The targets themselves need not be nonversatile. The
/// root must be nonversatile.
pub fn bsubt_targets(s: &Term, params: &OrderParams) -> BTreeSet<Term> {
    debug_assert!(is_nonversatile(s), "basic subterms need a nonversatile root");
    bsubt_targets_mode(s, params, true)
}

/// ⊳_b with the nonversatility gate optional: the plain (CPO) companion
/// order descends through application and abstraction nodes
/// unconditionally.
pub fn bsubt_targets_mode(
    s: &Term,
    params: &OrderParams,
    gate_nonversatile: bool,
) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    descend_b(s, params, gate_nonversatile, &mut out);
    out
}

fn qualifies_b(t: &Term, params: &OrderParams) -> bool {
    if !locally_closed_at(t, 0) {
        return false;
    }
    match t.type_of().as_base() {
        Some(a) => params.is_basic(a),
        None => false,
    }
}

fn descend_b(node: &Term, params: &OrderParams, gate: bool, out: &mut BTreeSet<Term>) {
    let mut visit_child = |child: &Term| {
        if qualifies_b(child, params) {
            out.insert(child.clone());
        }
        descend_b(child, params, gate, out);
    };
    match node {
        Term::Bound(_) | Term::Free(..) => {}
        Term::Fun(_, args) => {
            for a in args {
                visit_child(a);
            }
        }
        Term::App(u, v) => {
            if !gate || is_nonversatile(node) {
                visit_child(u);
                visit_child(v);
            }
        }
        Term::Lam(_, body) => {
            if !gate || is_nonversatile(node) {
                visit_child(body);
            }
        }
    }
}

/// All t with s ⊳_acc t: s decomposes as f(s₁..s_ar) s_{ar+1} ⋯ sₙ,
/// some j ∈ acc(f) picks the argument s_j, and t is reached from s_j by
/// the reflexive-transitive unfolding (so s_j itself is included).
/// Empty when the head is not a function symbol.
pub fn asubt_targets(s: &Term, params: &OrderParams) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    let (head, trailing) = s.spine();
    let Term::Fun(f, args) = head else {
        return out;
    };
    let acc = params.acc_of(f.name());
    let all_args: Vec<&Term> = args.iter().chain(trailing).collect();
    for &j in &acc {
        if j == 0 || j > all_args.len() {
            continue;
        }
        let sj = all_args[j - 1];
        if out.insert(sj.clone()) {
            out.extend(asubt_targets(sj, params));
        }
    }
    out
}

/// s ≫_X t: t = u x₁⋯x_k with every x_i a free variable named in X,
/// both sides of the same base type a, s ⊳_acc u, and a never occurring
/// in the types of the x_i. Returns the spine length k on success so
/// callers can impose k ≥ 1.
pub fn structsm_spine(
    s: &Term,
    t: &Term,
    marked: &Marked,
    params: &OrderParams,
) -> Option<usize> {
    let s_ty = s.type_of();
    let a = s_ty.as_base()?;
    if t.type_of().as_base() != Some(a) {
        return None;
    }
    // Strip marked variables from the right; the remaining prefix of t
    // must be an accessible subterm of s.
    let mut u = t.clone();
    let mut k = 0;
    let targets = asubt_targets(s, params);
    loop {
        if targets.contains(&u) {
            return Some(k);
        }
        match u {
            Term::App(fun, arg) => {
                match arg.as_ref() {
                    Term::Free(x, ty) if marked.contains_key(x) => {
                        if !pos_sets(a, ty).of_a.is_empty() {
                            return None;
                        }
                    }
                    _ => return None,
                }
                u = *fun;
                k += 1;
            }
            _ => return None,
        }
    }
}

/// s ≫_X t with any spine length k ≥ 0.
pub fn structsm(s: &Term, t: &Term, marked: &Marked, params: &OrderParams) -> bool {
    structsm_spine(s, t, marked, params).is_some()
}

/// All terms w with s ≫_X w and spine length at least `min_spine`:
/// accessible subterms of s applied to marked variables of types in
/// which the result base does not occur, ending at the base type of s.
/// Finite because every spine step consumes one arrow of the accessible
/// subterm's type.
pub fn structsm_witnesses(
    s: &Term,
    marked: &Marked,
    params: &OrderParams,
    min_spine: usize,
) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    let Some(a) = s.type_of().as_base().map(str::to_string) else {
        return out;
    };
    fn extend(
        w: Term,
        k: usize,
        a: &str,
        marked: &Marked,
        min_spine: usize,
        out: &mut BTreeSet<Term>,
    ) {
        match w.type_of() {
            SimpleType::Base(b) => {
                if b == a && k >= min_spine {
                    out.insert(w);
                }
            }
            SimpleType::Arrow(dom, _) => {
                for (x, ty) in marked {
                    if *ty == *dom && pos_sets(a, ty).of_a.is_empty() {
                        let next =
                            Term::app(w.clone(), Term::free(x.clone(), ty.clone()))
                                .expect("domain matched");
                        extend(next, k + 1, a, marked, min_spine, out);
                    }
                }
            }
        }
    }
    for u in asubt_targets(s, params) {
        extend(u, 0, &a, marked, min_spine, &mut out);
    }
    out
}
