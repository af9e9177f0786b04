//! Seeded random generation of simple types, βη-normal terms, rewrite
//! problems and substitutions. Used by the differential test suites
//! (backend agreement, stability sampling) and by property tests.

use std::collections::BTreeMap;

use rand::Rng;

use crate::normalize::beta_eta_normalize;
use crate::problem::{validate_rules, Problem, Rule};
use crate::term::{Substitution, Symbol, Term};
use crate::types::SimpleType;

/// Size caps for random problems. The defaults match the small-problem
/// regime of the differential suites: at most 4 symbols over at most 2
/// base types, at most 3 rules, terms of size at most 8.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_base_types: usize,
    pub max_symbols: usize,
    pub max_rules: usize,
    pub max_term_size: usize,
    pub max_type_size: usize,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            max_base_types: 2,
            max_symbols: 4,
            max_rules: 3,
            max_term_size: 8,
            max_type_size: 5,
        }
    }
}

/// A random simple type over the given bases with at most `max_size`
/// nodes (size = node count, so a base has size 1).
pub fn random_type<R: Rng>(rng: &mut R, bases: &[String], max_size: usize) -> SimpleType {
    debug_assert!(!bases.is_empty());
    if max_size < 3 || rng.gen_bool(0.55) {
        return SimpleType::base(bases[rng.gen_range(0..bases.len())].clone());
    }
    let left = rng.gen_range(1..max_size - 1);
    let right = max_size - 1 - left;
    SimpleType::arrow(
        random_type(rng, bases, left),
        random_type(rng, bases, right),
    )
}

/// The generation context for one term: the signature and the free
/// variables in scope.
struct TermGen<'a, R: Rng> {
    rng: &'a mut R,
    symbols: Vec<Symbol>,
    vars: Vec<(String, SimpleType)>,
    next_var: usize,
}

impl<'a, R: Rng> TermGen<'a, R> {
    /// A term of exactly the target type within the size budget, or
    /// `None` when the budget cannot be met. Lambdas are introduced for
    /// arrow targets; heads are variables or symbols whose type reaches
    /// the target after some number of applications.
    fn gen(&mut self, ty: &SimpleType, budget: usize) -> Option<Term> {
        if budget == 0 {
            return None;
        }
        if let SimpleType::Arrow(dom, cod) = ty {
            if self.rng.gen_bool(0.5) || self.head_choices(ty).is_empty() {
                let name = format!("V{}", self.next_var);
                self.next_var += 1;
                self.vars.push((name.clone(), (**dom).clone()));
                let body = self.gen(cod, budget.saturating_sub(1));
                self.vars.pop();
                return Some(Term::lam(&name, (**dom).clone(), body?));
            }
        }
        let choices = self.head_choices(ty);
        if choices.is_empty() {
            return None;
        }
        let (head, arg_tys) = choices[self.rng.gen_range(0..choices.len())].clone();
        let mut remaining = budget.checked_sub(1 + arg_tys.len())?;
        let mut args = Vec::new();
        for aty in &arg_tys {
            // Spread the remaining budget: each argument gets one node
            // plus a random share of the slack.
            let extra = if remaining == 0 {
                0
            } else {
                self.rng.gen_range(0..=remaining)
            };
            remaining -= extra;
            args.push(self.gen(aty, 1 + extra)?);
        }
        match head {
            Head::Var(name, vty) => {
                let base = Term::free(name, vty);
                Term::apps(base, args).ok()
            }
            Head::Sym(sym) => {
                let ar = sym.arity();
                let direct: Vec<Term> = args.drain(..ar).collect();
                let funterm = Term::fun(sym, direct).ok()?;
                Term::apps(funterm, args).ok()
            }
        }
    }

    /// All heads whose type reaches `ty` after zero or more argument
    /// applications (at least `arity` of them for symbols), paired with
    /// the argument types to fill in.
    fn head_choices(&self, ty: &SimpleType) -> Vec<(Head, Vec<SimpleType>)> {
        let mut out = Vec::new();
        for (name, vty) in &self.vars {
            for k in 0..=vty.arrow_count() {
                if vty.result_after(k) == Some(ty) {
                    out.push((
                        Head::Var(name.clone(), vty.clone()),
                        arg_prefix(vty, k),
                    ));
                }
            }
        }
        for sym in &self.symbols {
            for k in sym.arity()..=sym.ty().arrow_count() {
                if sym.ty().result_after(k) == Some(ty) {
                    out.push((Head::Sym(sym.clone()), arg_prefix(sym.ty(), k)));
                }
            }
        }
        out
    }
}

#[derive(Clone)]
enum Head {
    Var(String, SimpleType),
    Sym(Symbol),
}

fn arg_prefix(ty: &SimpleType, k: usize) -> Vec<SimpleType> {
    let mut out = Vec::new();
    let mut cur = ty;
    for _ in 0..k {
        match cur {
            SimpleType::Arrow(d, c) => {
                out.push((**d).clone());
                cur = c;
            }
            SimpleType::Base(_) => unreachable!("k bounded by arrow_count"),
        }
    }
    out
}

/// A random βη-normal term of the given type over the problem's
/// signature, using (a subset of) the given free variables. Terms are
/// normalized after generation, so the result can be smaller than the
/// budget but never larger than a normal form of a budget-sized term.
pub fn random_normal_term<R: Rng>(
    rng: &mut R,
    problem: &Problem,
    vars: &BTreeMap<String, SimpleType>,
    ty: &SimpleType,
    max_size: usize,
) -> Option<Term> {
    let mut gen = TermGen {
        rng,
        symbols: problem.symbols.values().cloned().collect(),
        vars: vars.iter().map(|(n, t)| (n.clone(), t.clone())).collect(),
        next_var: 0,
    };
    for _ in 0..40 {
        if let Some(t) = gen.gen(ty, max_size) {
            return Some(beta_eta_normalize(&t));
        }
    }
    None
}

/// A random validated rewrite problem within the configured caps. Every
/// base type gets a constant so that term generation cannot get stuck,
/// and rule generation retries until `validate_rules` accepts the rule
/// set (rules that cannot be completed are dropped, so the problem can
/// have fewer rules than the cap, but never zero).
pub fn random_problem<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Problem {
    let names = ["a", "b", "c"];
    let n_bases = rng.gen_range(1..=cfg.max_base_types.min(names.len()));
    let bases: Vec<String> = names[..n_bases].iter().map(|s| s.to_string()).collect();

    let mut problem = Problem {
        base_types: bases.iter().cloned().collect(),
        symbols: BTreeMap::new(),
        rules: Vec::new(),
        source: "<random>".into(),
    };
    // One constant per base type, then random symbols up to the cap.
    for (i, base) in bases.iter().enumerate() {
        let name = format!("k{i}");
        let sym = Symbol::new(&name, SimpleType::base(base.clone()), 0).unwrap();
        problem.symbols.insert(name, sym);
    }
    let extra = cfg.max_symbols.saturating_sub(bases.len());
    for i in 0..extra {
        let ty = random_type(rng, &bases, cfg.max_type_size);
        let arity = rng.gen_range(0..=ty.arrow_count());
        let name = format!("f{i}");
        problem
            .symbols
            .insert(name.clone(), Symbol::new(&name, ty, arity).unwrap());
    }

    let n_rules = rng.gen_range(1..=cfg.max_rules);
    'rules: for r in 0..n_rules {
        for _ in 0..60 {
            let ty = if rng.gen_bool(0.7) {
                SimpleType::base(bases[rng.gen_range(0..bases.len())].clone())
            } else {
                random_type(rng, &bases, cfg.max_type_size)
            };
            // Left-hand side over fresh rule variables.
            let mut lhs_vars = BTreeMap::new();
            for v in 0..rng.gen_range(0..=2) {
                let vty = random_type(rng, &bases, cfg.max_type_size);
                lhs_vars.insert(format!("X{v}"), vty);
            }
            let Some(lhs) = random_normal_term(rng, &problem, &lhs_vars, &ty, cfg.max_term_size)
            else {
                continue;
            };
            let (head, _) = lhs.spine();
            if matches!(head, Term::Free(..) | Term::Bound(_)) {
                continue;
            }
            // Right-hand side over the variables actually used on the left.
            let used = lhs.free_vars();
            let Some(rhs) = random_normal_term(rng, &problem, &used, &ty, cfg.max_term_size)
            else {
                continue;
            };
            let candidate = Rule {
                name: format!("r{r}"),
                lhs,
                rhs,
            };
            let mut probe = problem.clone();
            probe.rules.push(candidate.clone());
            if validate_rules(&probe).is_ok() {
                problem.rules.push(candidate);
                continue 'rules;
            }
        }
    }
    if problem.rules.is_empty() {
        // Guaranteed fallback: k0 -> k0 is never orientable but always a
        // valid rule, keeping the problem nonempty.
        let k0 = problem.symbols["k0"].clone();
        let t = Term::fun(k0, vec![]).unwrap();
        problem.rules.push(Rule {
            name: "r0".into(),
            lhs: t.clone(),
            rhs: t,
        });
    }
    debug_assert!(validate_rules(&problem).is_ok());
    problem
}

/// A random substitution for the given free variables: each variable is
/// mapped to a random normal term of its type (closed up to a small pool
/// of extra variables `Y0`, `Y1` of base type).
pub fn random_substitution<R: Rng>(
    rng: &mut R,
    problem: &Problem,
    vars: &BTreeMap<String, SimpleType>,
    max_size: usize,
) -> Option<Substitution> {
    let mut pool = BTreeMap::new();
    for (i, base) in problem.base_types.iter().take(2).enumerate() {
        pool.insert(format!("Y{i}"), SimpleType::base(base.clone()));
    }
    let mut subst = Substitution::new();
    for (name, ty) in vars {
        let image = random_normal_term(rng, problem, &pool, ty, max_size)?;
        subst.bind(name.clone(), ty, image).ok()?;
    }
    Some(subst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::is_beta_eta_normal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_types_respect_the_size_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bases = vec!["a".to_string(), "b".to_string()];
        for _ in 0..200 {
            let ty = random_type(&mut rng, &bases, 5);
            assert!(ty.size() <= 5, "oversized type {ty}");
        }
    }

    #[test]
    fn random_problems_validate_and_stay_in_bounds() {
        let cfg = GenConfig::default();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_problem(&mut rng, &cfg);
            assert!(validate_rules(&p).is_ok());
            assert!(p.symbols.len() <= cfg.max_symbols);
            assert!(p.base_types.len() <= cfg.max_base_types);
            assert!(!p.rules.is_empty() && p.rules.len() <= cfg.max_rules);
            for rule in &p.rules {
                assert!(is_beta_eta_normal(&rule.lhs));
                assert!(is_beta_eta_normal(&rule.rhs));
                assert_eq!(rule.lhs.type_of(), rule.rhs.type_of());
            }
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let cfg = GenConfig::default();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let p1 = random_problem(&mut r1, &cfg);
        let p2 = random_problem(&mut r2, &cfg);
        assert_eq!(format!("{:?}", p1.rules), format!("{:?}", p2.rules));
    }

    #[test]
    fn substitutions_cover_every_variable_and_preserve_types() {
        let cfg = GenConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let p = random_problem(&mut rng, &cfg);
            for rule in &p.rules {
                let fv = rule.lhs.free_vars();
                let Some(subst) = random_substitution(&mut rng, &p, &fv, 6) else {
                    continue;
                };
                let image = rule.lhs.substitute(&subst);
                assert_eq!(image.type_of(), rule.lhs.type_of());
            }
        }
    }
}
