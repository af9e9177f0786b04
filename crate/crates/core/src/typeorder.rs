//! The admissible order on simple types, base-type dominance, and the
//! position-set computations used by the side conditions on accessible
//! arguments and small symbols.
//!
//! Base types are ordered by integer levels. The order on function types
//! is the smallest admissible one containing the base order and the
//! right-argument relation and closed under `V > V'  ⇒  U→V > U→V'`.

use std::collections::{BTreeSet, HashMap};

use crate::error::TypeOrderError;
use crate::types::SimpleType;

/// Integer levels for base types; `a > b` on bases iff `level(a) > level(b)`.
///
/// Distinct bases with equal levels are incomparable (never equivalent),
/// which keeps the strict order well-founded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BaseLevels {
    levels: HashMap<String, u64>,
}

impl BaseLevels {
    pub fn new() -> BaseLevels {
        BaseLevels::default()
    }

    pub fn set(&mut self, base: impl Into<String>, level: u64) {
        self.levels.insert(base.into(), level);
    }

    pub fn level(&self, base: &str) -> Result<u64, TypeOrderError> {
        self.levels
            .get(base)
            .copied()
            .ok_or_else(|| TypeOrderError::UnknownBase(base.to_string()))
    }

    pub fn bases(&self) -> impl Iterator<Item = (&str, u64)> {
        self.levels.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn check_known(&self, ty: &SimpleType) -> Result<(), TypeOrderError> {
        for b in ty.base_names() {
            self.level(b)?;
        }
        Ok(())
    }
}

/// Decides `T > U` in the admissible type order:
/// - bases compare by level;
/// - a base is never greater than an arrow type;
/// - `T1→T2 > U` iff `T2 >= U`, or `U = T1→U2` with `T2 > U2`.
pub fn type_gt(
    levels: &BaseLevels,
    t: &SimpleType,
    u: &SimpleType,
) -> Result<bool, TypeOrderError> {
    levels.check_known(t)?;
    levels.check_known(u)?;
    Ok(gt(levels, t, u))
}

/// Reflexive closure of [`type_gt`].
pub fn type_geq(
    levels: &BaseLevels,
    t: &SimpleType,
    u: &SimpleType,
) -> Result<bool, TypeOrderError> {
    Ok(t == u || type_gt(levels, t, u)?)
}

fn gt(levels: &BaseLevels, t: &SimpleType, u: &SimpleType) -> bool {
    match (t, u) {
        (SimpleType::Base(a), SimpleType::Base(b)) => {
            levels.level(a).unwrap() > levels.level(b).unwrap()
        }
        (SimpleType::Base(_), SimpleType::Arrow(..)) => false,
        (SimpleType::Arrow(t1, t2), u) => {
            if u == t2.as_ref() || gt(levels, t2, u) {
                return true;
            }
            match u {
                SimpleType::Arrow(u1, u2) if u1 == t1 => gt(levels, t2, u2),
                _ => false,
            }
        }
    }
}

/// Decides membership in the auxiliary well-founded relation, the
/// transitive closure of the type order together with the left-argument
/// relation. Uses the derived recursion
/// `gtdot(T1→T2, U) = gt(T1→T2, U) ∨ geqdot(T1,U) ∨ geqdot(T2,U)`,
/// which is validated against a brute-force closure oracle in the tests.
/// Since the type order is transitive, any closure chain collapses into
/// at most one order step followed by a subterm descent, which is what
/// the recursion captures. Note that the closure is not closed under the
/// arrow congruence, so the congruence clause inside `gt` must not be
/// lifted to `gtdot`.
pub fn type_gtdot(
    levels: &BaseLevels,
    t: &SimpleType,
    u: &SimpleType,
) -> Result<bool, TypeOrderError> {
    levels.check_known(t)?;
    levels.check_known(u)?;
    Ok(gtdot(levels, t, u))
}

/// Reflexive closure of [`type_gtdot`].
pub fn type_geqdot(
    levels: &BaseLevels,
    t: &SimpleType,
    u: &SimpleType,
) -> Result<bool, TypeOrderError> {
    Ok(t == u || type_gtdot(levels, t, u)?)
}

fn gtdot(levels: &BaseLevels, t: &SimpleType, u: &SimpleType) -> bool {
    match (t, u) {
        (SimpleType::Base(a), SimpleType::Base(b)) => {
            levels.level(a).unwrap() > levels.level(b).unwrap()
        }
        (SimpleType::Base(_), SimpleType::Arrow(..)) => false,
        (SimpleType::Arrow(t1, t2), u) => {
            gt(levels, t, u)
                || u == t1.as_ref()
                || u == t2.as_ref()
                || gtdot(levels, t1, u)
                || gtdot(levels, t2, u)
        }
    }
}

/// `a ⋗ b` (strict) resp. `a ⩾̇ b` (reflexive closure) for every base `b`
/// occurring in `T`. With integer levels, `a ⋗ b` is `level(a) > level(b)`
/// and `a ⩾̇ b` is `a = b` or `level(a) > level(b)`; distinct bases with
/// equal levels do not dominate each other.
pub fn base_dominates(
    levels: &BaseLevels,
    a: &str,
    ty: &SimpleType,
    strict: bool,
) -> Result<bool, TypeOrderError> {
    let la = levels.level(a)?;
    for b in ty.base_names() {
        let lb = levels.level(b)?;
        let ok = if strict {
            la > lb
        } else {
            b == a || la > lb
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A set of base-type positions: strings over {1, 2} addressing base
/// occurrences in a type.
pub type PositionSet = BTreeSet<String>;

/// The positive, negative and per-base position sets of a type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosSets {
    pub pos: PositionSet,
    pub neg: PositionSet,
    pub of_a: PositionSet,
}

/// Computes positive base positions, negative base positions and the
/// positions of base `a` in `ty` by the mutual recursion:
/// at a base, the position itself is positive (and in `of_a` iff it is
/// `a`); at `U→V`, polarity flips through the argument.
pub fn pos_sets(a: &str, ty: &SimpleType) -> PosSets {
    match ty {
        SimpleType::Base(b) => PosSets {
            pos: BTreeSet::from([String::new()]),
            neg: BTreeSet::new(),
            of_a: if b == a {
                BTreeSet::from([String::new()])
            } else {
                BTreeSet::new()
            },
        },
        SimpleType::Arrow(u, v) => {
            let pu = pos_sets(a, u);
            let pv = pos_sets(a, v);
            PosSets {
                pos: prefix('1', &pu.neg).chain(prefix('2', &pv.pos)).collect(),
                neg: prefix('1', &pu.pos).chain(prefix('2', &pv.neg)).collect(),
                of_a: prefix('1', &pu.of_a).chain(prefix('2', &pv.of_a)).collect(),
            }
        }
    }
}

fn prefix<'a>(c: char, set: &'a PositionSet) -> impl Iterator<Item = String> + 'a {
    set.iter().map(move |p| format!("{c}{p}"))
}

/// The five mutually recursive position sets used by the small-symbol
/// side conditions; each corresponds to one computability property of
/// the underlying termination argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SposSets {
    pub s: PositionSet,
    pub r: PositionSet,
    pub n: PositionSet,
    pub l: PositionSet,
    pub c: PositionSet,
}

/// Computes `SPos_a(ty)` along with its four companion sets.
pub fn spos_sets(a: &str, ty: &SimpleType) -> SposSets {
    match ty {
        SimpleType::Base(b) => SposSets {
            s: BTreeSet::new(),
            r: BTreeSet::new(),
            n: BTreeSet::new(),
            l: BTreeSet::new(),
            c: if b == a {
                BTreeSet::from([String::new()])
            } else {
                BTreeSet::new()
            },
        },
        SimpleType::Arrow(u, v) => {
            let pu = spos_sets(a, u);
            let pv = spos_sets(a, v);
            let s: PositionSet = prefix('1', &pu.n).chain(prefix('2', &pv.s)).collect();
            let r = s.clone();
            let n: PositionSet = prefix('1', &pu.s)
                .chain(prefix('2', &(&pv.l | &pv.c)))
                .collect();
            let l: PositionSet = n
                .iter()
                .cloned()
                .chain(prefix('1', &(&pu.s | &pu.n)))
                .chain(prefix('2', &(&pv.l | &pv.c)))
                .collect();
            let c = n.clone();
            SposSets { s, r, n, l, c }
        }
    }
}

/// `SPos_a(ty)`.
pub fn spos(a: &str, ty: &SimpleType) -> PositionSet {
    spos_sets(a, ty).s
}

/// Memoizing cache for [`pos_sets`] and [`spos_sets`]; the sets are
/// re-queried for every accessible-argument and small-symbol condition.
#[derive(Debug, Default)]
pub struct PosCache {
    pos: HashMap<(String, SimpleType), PosSets>,
    spos: HashMap<(String, SimpleType), SposSets>,
}

impl PosCache {
    pub fn new() -> PosCache {
        PosCache::default()
    }

    pub fn pos_sets(&mut self, a: &str, ty: &SimpleType) -> &PosSets {
        self.pos
            .entry((a.to_string(), ty.clone()))
            .or_insert_with(|| pos_sets(a, ty))
    }

    pub fn spos_sets(&mut self, a: &str, ty: &SimpleType) -> &SposSets {
        self.spos
            .entry((a.to_string(), ty.clone()))
            .or_insert_with(|| spos_sets(a, ty))
    }
}

/// Enumerates all simple types over the given bases with size up to
/// `max_size` (size = node count of the type tree). Used by the
/// brute-force oracles.
pub fn all_types(bases: &[&str], max_size: usize) -> Vec<SimpleType> {
    let mut by_size: Vec<Vec<SimpleType>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        for b in bases {
            by_size[1].push(SimpleType::base(*b));
        }
    }
    for size in 2..=max_size {
        for left in 1..size - 1 {
            let right = size - 1 - left;
            let mut combos = Vec::new();
            for l in &by_size[left] {
                for r in &by_size[right] {
                    combos.push(SimpleType::arrow(l.clone(), r.clone()));
                }
            }
            by_size[size].extend(combos);
        }
    }
    by_size.into_iter().flatten().collect()
}

/// Brute-force transitive closure of `type_gt ∪ left-argument` restricted
/// to a finite type universe. Oracle for [`type_gtdot`]; pairs leaving
/// the universe (argument types are always inside it) cannot occur
/// because both relations only move to structurally smaller or
/// equal-size-bounded types within the closure of the universe under
/// subterms, which `all_types` already is.
pub fn gtdot_closure_oracle(
    levels: &BaseLevels,
    universe: &[SimpleType],
) -> BTreeSet<(SimpleType, SimpleType)> {
    let mut edges: BTreeSet<(SimpleType, SimpleType)> = BTreeSet::new();
    for t in universe {
        for u in universe {
            if gt(levels, t, u) {
                edges.insert((t.clone(), u.clone()));
            }
        }
        if let SimpleType::Arrow(l, _) = t {
            edges.insert((t.clone(), l.as_ref().clone()));
        }
    }
    // Transitive closure by iteration.
    loop {
        let mut added = Vec::new();
        for (a, b) in &edges {
            for (c, d) in &edges {
                if b == c && !edges.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        edges.extend(added);
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels_abc() -> BaseLevels {
        let mut l = BaseLevels::new();
        l.set("a", 2);
        l.set("b", 1);
        l.set("c", 0);
        l
    }

    fn a() -> SimpleType {
        SimpleType::base("a")
    }
    fn b() -> SimpleType {
        SimpleType::base("b")
    }
    fn c() -> SimpleType {
        SimpleType::base("c")
    }

    #[test]
    fn type_gt_examples() {
        let l = levels_abc();
        // a→b > a→c because b > c
        assert!(type_gt(&l, &SimpleType::arrow(a(), b()), &SimpleType::arrow(a(), c())).unwrap());
        // c > b→b does not hold
        assert!(!type_gt(&l, &c(), &SimpleType::arrow(b(), b())).unwrap());
        // strictness
        let t = SimpleType::arrow(a(), b());
        assert!(!type_gt(&l, &t, &t).unwrap());
        // right-argument containment
        assert!(type_gt(&l, &SimpleType::arrow(a(), b()), &b()).unwrap());
    }

    #[test]
    fn type_gt_unknown_base_is_an_error() {
        let l = levels_abc();
        assert!(type_gt(&l, &SimpleType::base("zzz"), &a()).is_err());
    }

    #[test]
    fn gtdot_examples() {
        let l = levels_abc();
        // left argument step
        assert!(type_gtdot(&l, &SimpleType::arrow(a(), b()), &a()).unwrap());
        // right argument is already in the type order
        assert!(type_gtdot(&l, &SimpleType::arrow(a(), b()), &b()).unwrap());
        // a base is never above an arrow
        assert!(!type_gtdot(&l, &a(), &SimpleType::arrow(b(), b())).unwrap());
    }

    #[test]
    fn gtdot_matches_closure_oracle_small() {
        let l = levels_abc();
        let universe = all_types(&["a", "b"], 5);
        let closure = gtdot_closure_oracle(&l, &universe);
        for t in &universe {
            for u in &universe {
                let derived = type_gtdot(&l, t, u).unwrap();
                let oracle = closure.contains(&(t.clone(), u.clone()));
                assert_eq!(derived, oracle, "gtdot mismatch for {t} vs {u}");
            }
        }
    }

    #[test]
    fn base_dominance_examples() {
        let mut l = BaseLevels::new();
        l.set("f", 1);
        l.set("t", 0);
        let tf = SimpleType::arrow(SimpleType::base("t"), SimpleType::base("f"));
        assert!(base_dominates(&l, "f", &tf, false).unwrap());
        assert!(base_dominates(&l, "f", &SimpleType::base("f"), false).unwrap());
        // strict dominance fails on equal levels
        let mut eq = BaseLevels::new();
        eq.set("a", 0);
        eq.set("b", 0);
        assert!(!base_dominates(&eq, "a", &SimpleType::base("b"), true).unwrap());
        // non-strict also fails for a distinct base at the same level
        assert!(!base_dominates(&eq, "a", &SimpleType::base("b"), false).unwrap());
    }

    #[test]
    fn pos_sets_worked_example() {
        // T = (a→b)→(a→b)
        let ab = SimpleType::arrow(a(), b());
        let t = SimpleType::arrow(ab.clone(), ab);
        let p = pos_sets("a", &t);
        let expect = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        assert_eq!(p.pos, expect(&["11", "22"]));
        assert_eq!(p.neg, expect(&["12", "21"]));
        assert_eq!(p.of_a, expect(&["11", "21"]));
        assert_eq!(pos_sets("b", &t).of_a, expect(&["12", "22"]));
    }

    #[test]
    fn pos_sets_base_clauses() {
        let p = pos_sets("a", &a());
        assert_eq!(p.pos, BTreeSet::from([String::new()]));
        assert!(p.neg.is_empty());
        assert_eq!(p.of_a, BTreeSet::from([String::new()]));
        assert!(pos_sets("b", &a()).of_a.is_empty());
    }

    #[test]
    fn pos_sets_partition_and_count() {
        for t in all_types(&["a", "b"], 5) {
            let p = pos_sets("a", &t);
            assert!(p.pos.is_disjoint(&p.neg));
            let all: BTreeSet<_> = p.pos.union(&p.neg).cloned().collect();
            // every a-position is a base position
            assert!(p.of_a.is_subset(&all));
            let occurrences = t
                .to_string()
                .split(|ch: char| !ch.is_alphanumeric())
                .filter(|w| *w == "a")
                .count();
            assert_eq!(p.of_a.len(), occurrences);
        }
    }

    #[test]
    fn spos_hand_evaluated_cases() {
        // SPos_a(b) = ∅ for any base b
        assert!(spos("a", &b()).is_empty());
        assert!(spos("a", &a()).is_empty());
        // SPos_a(a→a) = {1p | p ∈ NPos_a(a)} ∪ {2p | p ∈ SPos_a(a)} = ∅
        assert!(spos("a", &SimpleType::arrow(a(), a())).is_empty());
        // SPos_a((b→a)→b): NPos_a(b→a) = {2p | p ∈ LPos∪CPos of a at a}
        //   = {2} via CPos_a(a) = {ε}; so SPos = {1·2} = {12}.
        let t = SimpleType::arrow(SimpleType::arrow(b(), a()), b());
        let expected: PositionSet = BTreeSet::from(["12".to_string()]);
        assert_eq!(spos("a", &t), expected);
    }

    #[test]
    fn spos_positions_address_a() {
        for t in all_types(&["a", "b"], 5) {
            let of_a = pos_sets("a", &t).of_a;
            let sets = spos_sets("a", &t);
            for set in [&sets.s, &sets.r, &sets.n, &sets.l, &sets.c] {
                assert!(set.is_subset(&of_a), "non-a position reported for {t}");
            }
        }
    }

    #[test]
    fn gtdot_graph_is_acyclic_small() {
        let l = levels_abc();
        let universe = all_types(&["a", "b"], 4);
        let closure = gtdot_closure_oracle(&l, &universe);
        for t in &universe {
            assert!(
                !closure.contains(&(t.clone(), t.clone())),
                "cycle through {t}"
            );
        }
    }

    #[test]
    fn memo_cache_agrees_with_direct_computation() {
        let mut cache = PosCache::new();
        let t = SimpleType::arrow(a(), b());
        assert_eq!(cache.pos_sets("a", &t), &pos_sets("a", &t));
        assert_eq!(cache.spos_sets("a", &t), &spos_sets("a", &t));
        // second lookup hits the memo
        assert_eq!(cache.pos_sets("a", &t).pos.len(), 1);
    }
}
