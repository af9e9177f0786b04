//! Exhaustive parameter search for small problems: the independent
//! reference backend against which the SMT-script backend is tested.
//!
//! The space is finite because only the following data influence the
//! order:
//! - the weak order the precedence induces on symbols (enumerated as
//!   all maps onto a rank prefix {0, …, k-1});
//! - likewise the weak order of the base levels;
//! - one status bit per precedence class (equal precedence forces equal
//!   status; classes whose members all take at most one argument are
//!   insensitive to it);
//! - the big flags, which are constant on each precedence class and
//!   upward closed, hence a rank threshold;
//! - the accessible positions, a subset of the statically admissible
//!   positions per symbol;
//! - the basic bases, for which the unique maximal admissible set
//!   (a greatest fixpoint given levels and acc) dominates every other
//!   choice because enlarging it only adds basic subterms.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::order::orient_rule;
use crate::params::{validate_params, OrderParams, Status};
use crate::problem::Problem;
use crate::smt::allowed_acc_positions;
use crate::trace::ProofTrace;
use crate::typeorder::{base_dominates, BaseLevels};

/// Size caps on the enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumBounds {
    /// Refuse problems with more symbols than this.
    pub max_symbols: usize,
    /// Refuse problems with more base types than this.
    pub max_base_types: usize,
    /// Abort after examining this many parameter candidates.
    pub max_candidates: u64,
}

impl Default for EnumBounds {
    fn default() -> EnumBounds {
        EnumBounds {
            max_symbols: 6,
            max_base_types: 3,
            max_candidates: 5_000_000,
        }
    }
}

/// Result of an exhaustive search.
#[derive(Debug)]
pub enum EnumOutcome {
    /// Admissible parameters orienting every rule, with one trace per
    /// rule in rule order.
    Found {
        params: OrderParams,
        traces: Vec<ProofTrace>,
        tried: u64,
    },
    /// The whole bounded space was examined without success.
    Exhausted { tried: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error(
        "problem has {symbols} symbols and {bases} base types; enumeration is \
         capped at {max_symbols} symbols and {max_bases} base types"
    )]
    TooLarge {
        symbols: usize,
        bases: usize,
        max_symbols: usize,
        max_bases: usize,
    },
    #[error("enumeration aborted after {0} candidates")]
    CandidateCapExceeded(u64),
}

/// All maps from `n` items onto a prefix {0, …, k-1} of the ranks, i.e.
/// all weak orders of `n` items (the ordered Bell numbers: 1, 1, 3, 13,
/// 75, 541, 4683 for n = 0…6).
pub fn rank_maps(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            let m = cur.iter().copied().max().unwrap_or(0);
            if n == 0 || (0..=m).all(|v| cur.contains(&v)) {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..n {
            cur[i] = v;
            rec(i + 1, n, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    out
}

/// The unique maximal basic set admissible for the given levels and
/// accessible positions: start from all bases and remove violators of
/// downward closure and of the accessible-argument condition until the
/// fixpoint.
fn maximal_basic(
    problem: &Problem,
    levels: &BaseLevels,
    acc: &BTreeMap<String, BTreeSet<usize>>,
) -> BTreeMap<String, bool> {
    let bases: Vec<String> = problem.base_types.iter().cloned().collect();
    let mut basic: BTreeSet<String> = bases.iter().cloned().collect();
    let empty = BTreeSet::new();
    loop {
        let snapshot = basic.clone();
        for a in &snapshot {
            let la = levels.level(a).unwrap_or(0);
            // Downward closure: every strictly lower base must be basic.
            let mut ok = bases
                .iter()
                .all(|b| levels.level(b).unwrap_or(0) >= la || snapshot.contains(b));
            // Accessible arguments of symbols producing `a` must be `a`
            // itself or a basic base.
            if ok {
                'syms: for sym in problem.symbols.values() {
                    let (arg_tys, result) = sym.ty().decompose();
                    if result != a.as_str() {
                        continue;
                    }
                    for &i in acc.get(sym.name()).unwrap_or(&empty) {
                        let arg_ok = match arg_tys[i - 1].as_base() {
                            Some(b) if b == result => true,
                            Some(b) => snapshot.contains(b),
                            None => false,
                        };
                        if !arg_ok {
                            ok = false;
                            break 'syms;
                        }
                    }
                }
            }
            if !ok {
                basic.remove(a);
            }
        }
        if basic.len() == snapshot.len() {
            break;
        }
    }
    bases
        .iter()
        .map(|b| (b.clone(), basic.contains(b)))
        .collect()
}

/// Exhaustively searches the bounded parameter space for parameters
/// that orient every rule, in a fixed deterministic order. The first
/// success wins.
pub fn enumerate_search(
    problem: &Problem,
    bounds: &EnumBounds,
) -> Result<EnumOutcome, EnumError> {
    let symbols: Vec<String> = problem.symbols.keys().cloned().collect();
    let bases: Vec<String> = problem.base_types.iter().cloned().collect();
    if symbols.len() > bounds.max_symbols || bases.len() > bounds.max_base_types {
        return Err(EnumError::TooLarge {
            symbols: symbols.len(),
            bases: bases.len(),
            max_symbols: bounds.max_symbols,
            max_bases: bounds.max_base_types,
        });
    }
    let allowed_acc = allowed_acc_positions(problem);
    let prec_maps = rank_maps(symbols.len());
    let level_maps = rank_maps(bases.len());
    let mut tried: u64 = 0;

    for level_map in &level_maps {
        let mut levels = BaseLevels::default();
        for (b, &rank) in bases.iter().zip(level_map) {
            levels.set(b.clone(), rank as u64);
        }
        // Positions admissible under these levels: positivity is folded
        // into `allowed_acc`; dominance depends on the levels.
        let acc_options: Vec<Vec<BTreeSet<usize>>> = symbols
            .iter()
            .map(|f| {
                let sym = &problem.symbols[f];
                let (arg_tys, result) = sym.ty().decompose();
                let live: Vec<usize> = allowed_acc[f]
                    .iter()
                    .copied()
                    .filter(|&i| {
                        base_dominates(&levels, result, arg_tys[i - 1], false).unwrap_or(false)
                    })
                    .collect();
                subsets(&live)
            })
            .collect();

        for prec_map in &prec_maps {
            let classes = 1 + prec_map.iter().copied().max().unwrap_or(0);
            // Status only matters for classes containing a symbol that
            // is applied to at least two arguments.
            let mut class_sensitive = vec![false; classes];
            for (f, &rank) in symbols.iter().zip(prec_map) {
                if problem.symbols[f].arity() >= 2 {
                    class_sensitive[rank] = true;
                }
            }
            let sensitive: Vec<usize> = (0..classes).filter(|&c| class_sensitive[c]).collect();

            for cutoff in 0..=classes {
                for status_bits in 0..(1u32 << sensitive.len()) {
                    let mut class_status = vec![Status::Mul; classes];
                    for (bit, &class) in sensitive.iter().enumerate() {
                        if status_bits >> bit & 1 == 1 {
                            class_status[class] = Status::Lex;
                        }
                    }
                    let mut acc_choice = vec![0usize; symbols.len()];
                    loop {
                        tried += 1;
                        if tried > bounds.max_candidates {
                            return Err(EnumError::CandidateCapExceeded(bounds.max_candidates));
                        }
                        let mut params = OrderParams::defaults_for(problem);
                        params.levels = levels.clone();
                        for (f, &rank) in symbols.iter().zip(prec_map) {
                            params.prec.insert(f.clone(), rank as i64);
                            params.big.insert(f.clone(), rank >= cutoff);
                            params.status.insert(f.clone(), class_status[rank]);
                        }
                        for (idx, f) in symbols.iter().enumerate() {
                            params
                                .acc
                                .insert(f.clone(), acc_options[idx][acc_choice[idx]].clone());
                        }
                        params.basic = maximal_basic(problem, &levels, &params.acc);

                        if validate_params(problem, &params).is_ok() {
                            let traces: Option<Vec<ProofTrace>> = problem
                                .rules
                                .iter()
                                .map(|r| orient_rule(r, &params))
                                .collect();
                            if let Some(traces) = traces {
                                return Ok(EnumOutcome::Found {
                                    params,
                                    traces,
                                    tried,
                                });
                            }
                        }

                        // Advance the mixed-radix acc counter.
                        let mut pos = 0;
                        loop {
                            if pos == symbols.len() {
                                break;
                            }
                            acc_choice[pos] += 1;
                            if acc_choice[pos] < acc_options[pos].len() {
                                break;
                            }
                            acc_choice[pos] = 0;
                            pos += 1;
                        }
                        if pos == symbols.len() {
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(EnumOutcome::Exhausted { tried })
}

fn subsets(items: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::with_capacity(1 << items.len());
    for mask in 0..(1u32 << items.len()) {
        let mut set = BTreeSet::new();
        for (bit, &item) in items.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                set.insert(item);
            }
        }
        out.push(set);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thf::{infer_arities, parse_problem};
    use crate::trace::replay;

    fn fixture(name: &str) -> String {
        let path = format!("{}/../../problems/{}", env!("CARGO_MANIFEST_DIR"), name);
        std::fs::read_to_string(&path).unwrap()
    }

    fn load(problem: &str) -> Problem {
        infer_arities(&parse_problem(&fixture(problem), problem).unwrap())
    }

    #[test]
    fn rank_map_counts_are_the_ordered_bell_numbers() {
        assert_eq!(rank_maps(0).len(), 1);
        assert_eq!(rank_maps(1).len(), 1);
        assert_eq!(rank_maps(2).len(), 3);
        assert_eq!(rank_maps(3).len(), 13);
        assert_eq!(rank_maps(4).len(), 75);
    }

    #[test]
    fn single_rule_problem_is_found() {
        let p = load("single.p");
        match enumerate_search(&p, &EnumBounds::default()).unwrap() {
            EnumOutcome::Found { params, traces, .. } => {
                assert!(validate_params(&p, &params).is_ok());
                assert_eq!(traces.len(), 1);
                for t in &traces {
                    assert!(replay(t, &params, Default::default()));
                }
            }
            EnumOutcome::Exhausted { .. } => panic!("single.p should be orientable"),
        }
    }

    #[test]
    fn diff_problem_is_found() {
        let p = load("diff.p");
        match enumerate_search(&p, &EnumBounds::default()).unwrap() {
            EnumOutcome::Found { params, traces, .. } => {
                assert_eq!(traces.len(), p.rules.len());
                for t in &traces {
                    assert!(replay(t, &params, Default::default()));
                }
            }
            EnumOutcome::Exhausted { .. } => panic!("diff.p should be orientable"),
        }
    }

    #[test]
    fn self_embedding_exhausts_without_success() {
        let p = load("selfembed.p");
        match enumerate_search(&p, &EnumBounds::default()).unwrap() {
            EnumOutcome::Exhausted { tried } => assert!(tried > 0),
            EnumOutcome::Found { params, .. } => {
                panic!("f x → f (f x) must not orient, found {params:?}")
            }
        }
    }

    #[test]
    fn size_caps_are_enforced() {
        let p = load("mapinc.p");
        let bounds = EnumBounds {
            max_symbols: 3,
            ..EnumBounds::default()
        };
        assert!(matches!(
            enumerate_search(&p, &bounds),
            Err(EnumError::TooLarge { .. })
        ));
    }

    #[test]
    fn candidate_cap_is_enforced() {
        let p = load("selfembed.p");
        let bounds = EnumBounds {
            max_candidates: 1,
            ..EnumBounds::default()
        };
        assert!(matches!(
            enumerate_search(&p, &bounds),
            Err(EnumError::CandidateCapExceeded(1))
        ));
    }
}
