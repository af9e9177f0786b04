//! Order parameters: base-type levels, symbol precedence, statuses, the
//! big/small partition, accessible-argument sets and basic-base flags,
//! plus their admissibility validation and the textual parameter-file
//! format used by the checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::problem::Problem;
use crate::term::Symbol;
use crate::typeorder::{base_dominates, pos_sets, spos, type_geqdot, BaseLevels};

/// Argument status of a function symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Status {
    #[default]
    Mul,
    Lex,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Mul => write!(f, "mul"),
            Status::Lex => write!(f, "lex"),
        }
    }
}

/// One full parameter assignment for a problem. All maps are total over
/// the problem's symbols and base types; [`OrderParams::defaults_for`]
/// builds the all-defaults assignment (level 0, precedence 0, status
/// mul, big, empty acc, nothing basic).
#[derive(Debug, Clone, Default)]
pub struct OrderParams {
    pub levels: BaseLevels,
    pub prec: BTreeMap<String, i64>,
    pub status: BTreeMap<String, Status>,
    pub big: BTreeMap<String, bool>,
    /// Accessible argument positions, 1-based over the full decomposition
    /// of the symbol's type down to its base result.
    pub acc: BTreeMap<String, BTreeSet<usize>>,
    pub basic: BTreeMap<String, bool>,
}

impl OrderParams {
    pub fn defaults_for(problem: &Problem) -> OrderParams {
        let mut p = OrderParams::default();
        for base in &problem.base_types {
            p.levels.set(base.clone(), 0);
            p.basic.insert(base.clone(), false);
        }
        for name in problem.symbols.keys() {
            p.prec.insert(name.clone(), 0);
            p.status.insert(name.clone(), Status::Mul);
            p.big.insert(name.clone(), true);
            p.acc.insert(name.clone(), BTreeSet::new());
        }
        p
    }

    pub fn prec_of(&self, symbol: &str) -> i64 {
        self.prec.get(symbol).copied().unwrap_or(0)
    }

    pub fn status_of(&self, symbol: &str) -> Status {
        self.status.get(symbol).copied().unwrap_or_default()
    }

    pub fn is_big(&self, symbol: &str) -> bool {
        self.big.get(symbol).copied().unwrap_or(true)
    }

    pub fn acc_of(&self, symbol: &str) -> BTreeSet<usize> {
        self.acc.get(symbol).cloned().unwrap_or_default()
    }

    pub fn is_basic(&self, base: &str) -> bool {
        self.basic.get(base).copied().unwrap_or(false)
    }
}

/// Parameter-file parse failure.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParamsParseError {
    pub line: usize,
    pub message: String,
}

/// Parses the one-declaration-per-line parameter format:
/// `level <base> <int>`, `prec <symbol> <int>`, `status <symbol> mul|lex`,
/// `big <symbol> true|false`, `acc <symbol> <i,...>`,
/// `basic <base> true|false`. Unlisted entries keep their defaults.
/// `#` and `%` start comments.
pub fn parse_params(text: &str, problem: &Problem) -> Result<OrderParams, ParamsParseError> {
    let mut params = OrderParams::defaults_for(problem);
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| ParamsParseError { line, message };
        let content = raw
            .split(['#', '%'])
            .next()
            .unwrap_or("")
            .trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let kind = words.next().unwrap();
        let subject = words
            .next()
            .ok_or_else(|| err(format!("{kind}: missing name")))?;
        let value = words
            .next()
            .ok_or_else(|| err(format!("{kind} {subject}: missing value")))?;
        if let Some(extra) = words.next() {
            return Err(err(format!("trailing input {extra:?}")));
        }
        let check_base = |name: &str| -> Result<(), ParamsParseError> {
            if problem.base_types.contains(name) {
                Ok(())
            } else {
                Err(err(format!("unknown base type {name}")))
            }
        };
        let check_symbol = |name: &str| -> Result<(), ParamsParseError> {
            if problem.symbols.contains_key(name) {
                Ok(())
            } else {
                Err(err(format!("unknown symbol {name}")))
            }
        };
        let parse_bool = |v: &str| -> Result<bool, ParamsParseError> {
            match v {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(err(format!("expected true or false, found {other}"))),
            }
        };
        match kind {
            "level" => {
                check_base(subject)?;
                let lvl: u64 = value
                    .parse()
                    .map_err(|_| err(format!("bad level {value}")))?;
                params.levels.set(subject, lvl);
            }
            "prec" => {
                check_symbol(subject)?;
                let p: i64 = value
                    .parse()
                    .map_err(|_| err(format!("bad precedence {value}")))?;
                params.prec.insert(subject.to_string(), p);
            }
            "status" => {
                check_symbol(subject)?;
                let s = match value {
                    "mul" => Status::Mul,
                    "lex" => Status::Lex,
                    other => return Err(err(format!("bad status {other}"))),
                };
                params.status.insert(subject.to_string(), s);
            }
            "big" => {
                check_symbol(subject)?;
                let b = parse_bool(value)?;
                params.big.insert(subject.to_string(), b);
            }
            "acc" => {
                check_symbol(subject)?;
                let mut set = BTreeSet::new();
                for part in value.split(',') {
                    let i: usize = part
                        .trim()
                        .parse()
                        .map_err(|_| err(format!("bad argument index {part}")))?;
                    set.insert(i);
                }
                params.acc.insert(subject.to_string(), set);
            }
            "basic" => {
                check_base(subject)?;
                let b = parse_bool(value)?;
                params.basic.insert(subject.to_string(), b);
            }
            other => return Err(err(format!("unknown declaration {other}"))),
        }
    }
    Ok(params)
}

/// Renders a parameter assignment in the parameter-file format, listing
/// every entry explicitly in a deterministic order.
pub fn render_params(params: &OrderParams, problem: &Problem) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for base in &problem.base_types {
        let lvl = params.levels.level(base).unwrap_or(0);
        writeln!(out, "level {base} {lvl}").unwrap();
    }
    for base in &problem.base_types {
        writeln!(out, "basic {base} {}", params.is_basic(base)).unwrap();
    }
    for name in problem.symbols.keys() {
        writeln!(out, "prec {name} {}", params.prec_of(name)).unwrap();
    }
    for name in problem.symbols.keys() {
        writeln!(out, "status {name} {}", params.status_of(name)).unwrap();
    }
    for name in problem.symbols.keys() {
        writeln!(out, "big {name} {}", params.is_big(name)).unwrap();
    }
    for name in problem.symbols.keys() {
        let acc = params.acc_of(name);
        if !acc.is_empty() {
            let list = acc
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",");
            writeln!(out, "acc {name} {list}").unwrap();
        }
    }
    out
}

/// A violated admissibility constraint.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamViolation {
    #[error("{f} and {g} share a precedence level but have different statuses")]
    StatusMismatch { f: String, g: String },
    #[error("{g} is small but {f} is big with precedence at most {g}'s")]
    BigNotUpwardClosed { f: String, g: String },
    #[error("acc({f}) contains {i}, outside the argument positions of its type")]
    AccIndexOutOfRange { f: String, i: usize },
    #[error("acc({f}) position {i}: result base does not dominate the argument type")]
    AccDominance { f: String, i: usize },
    #[error("acc({f}) position {i}: result base occurs non-positively in the argument type")]
    AccPositivity { f: String, i: usize },
    #[error("basic base {a}: base {b} below it is not basic")]
    BasicNotDownwardClosed { a: String, b: String },
    #[error("basic base {a}: acc({f}) position {i} has a non-basic argument type")]
    BasicAccArgNotBasic { a: String, f: String, i: usize },
    #[error("small symbol {f}, argument {i}: result base does not dominate the argument type")]
    SmallDominance { f: String, i: usize },
    #[error("small fully-applied symbol {f}, argument {i}: result base has strictly positive occurrences in the argument type")]
    SmallSpos { f: String, i: usize },
    #[error("small partially-applied symbol {f}: acc({f}) must be empty")]
    SmallPartialAcc { f: String },
    #[error("small partially-applied symbol {f}, argument {i}: remaining type does not weakly dominate the argument type")]
    SmallPartialGeqdot { f: String, i: usize },
}

/// Checks every admissibility constraint of a parameter assignment and
/// returns all violations.
pub fn validate_params(problem: &Problem, params: &OrderParams) -> Result<(), Vec<ParamViolation>> {
    let mut out = Vec::new();
    let symbols: Vec<&Symbol> = problem.symbols.values().collect();

    // Equal precedence forces equal status; the big flag is upward
    // closed along the precedence.
    for f in &symbols {
        for g in &symbols {
            if f.name() >= g.name() {
                continue;
            }
            if params.prec_of(f.name()) == params.prec_of(g.name())
                && params.status_of(f.name()) != params.status_of(g.name())
            {
                out.push(ParamViolation::StatusMismatch {
                    f: f.name().to_string(),
                    g: g.name().to_string(),
                });
            }
        }
    }
    for f in &symbols {
        for g in &symbols {
            if params.prec_of(f.name()) >= params.prec_of(g.name())
                && params.is_big(g.name())
                && !params.is_big(f.name())
            {
                out.push(ParamViolation::BigNotUpwardClosed {
                    f: f.name().to_string(),
                    g: g.name().to_string(),
                });
            }
        }
    }

    for f in &symbols {
        let (arg_tys, result) = f.ty().decompose();
        let n = arg_tys.len();
        for &i in &params.acc_of(f.name()) {
            if i == 0 || i > n {
                out.push(ParamViolation::AccIndexOutOfRange {
                    f: f.name().to_string(),
                    i,
                });
                continue;
            }
            let ti = arg_tys[i - 1];
            if !base_dominates(&params.levels, result, ti, false).unwrap_or(false) {
                out.push(ParamViolation::AccDominance {
                    f: f.name().to_string(),
                    i,
                });
            }
            let ps = pos_sets(result, ti);
            if !ps.of_a.is_subset(&ps.pos) {
                out.push(ParamViolation::AccPositivity {
                    f: f.name().to_string(),
                    i,
                });
            }
        }
    }

    // Basic bases: downward closed along the levels, and accessible
    // arguments of symbols producing a basic base stay basic.
    for a in &problem.base_types {
        if !params.is_basic(a) {
            continue;
        }
        let la = params.levels.level(a).unwrap_or(0);
        for b in &problem.base_types {
            let lb = params.levels.level(b).unwrap_or(0);
            if la > lb && !params.is_basic(b) {
                out.push(ParamViolation::BasicNotDownwardClosed {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
        for f in &symbols {
            let (arg_tys, result) = f.ty().decompose();
            if result != a {
                continue;
            }
            for &i in &params.acc_of(f.name()) {
                if i == 0 || i > arg_tys.len() {
                    continue; // reported as out of range above
                }
                let ok = match arg_tys[i - 1].as_base() {
                    Some(b) => b == a || params.is_basic(b),
                    None => false,
                };
                if !ok {
                    out.push(ParamViolation::BasicAccArgNotBasic {
                        a: a.clone(),
                        f: f.name().to_string(),
                        i,
                    });
                }
            }
        }
    }

    // Small symbols.
    for f in &symbols {
        if params.is_big(f.name()) {
            continue;
        }
        let (arg_tys, result) = f.ty().decompose();
        let n = arg_tys.len();
        let ar = f.arity();
        if ar == n {
            for (idx, ti) in arg_tys.iter().enumerate() {
                let i = idx + 1;
                if !base_dominates(&params.levels, result, ti, false).unwrap_or(false) {
                    out.push(ParamViolation::SmallDominance {
                        f: f.name().to_string(),
                        i,
                    });
                }
                if !spos(result, ti).is_empty() {
                    out.push(ParamViolation::SmallSpos {
                        f: f.name().to_string(),
                        i,
                    });
                }
            }
        } else {
            if !params.acc_of(f.name()).is_empty() {
                out.push(ParamViolation::SmallPartialAcc {
                    f: f.name().to_string(),
                });
            }
            let tail = f
                .ty()
                .result_after(ar)
                .expect("arity bounded by arrow count");
            for (idx, ti) in arg_tys.iter().take(ar).enumerate() {
                let i = idx + 1;
                if !base_dominates(&params.levels, result, ti, false).unwrap_or(false) {
                    out.push(ParamViolation::SmallDominance {
                        f: f.name().to_string(),
                        i,
                    });
                }
                if !type_geqdot(&params.levels, tail, ti).unwrap_or(false) {
                    out.push(ParamViolation::SmallPartialGeqdot {
                        f: f.name().to_string(),
                        i,
                    });
                }
            }
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
