//! Rewrite problems: a signature, a base-type inventory and a rule set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::normalize::{beta_eta_normalize, is_beta_eta_normal};
use crate::term::{Symbol, Term};
use crate::types::SimpleType;

/// A rewrite rule `lhs -> rhs` between βη-normal terms of equal type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

/// A higher-order rewrite problem.
#[derive(Debug, Clone, Default)]
pub struct Problem {
    /// Declared base-type names.
    pub base_types: BTreeSet<String>,
    /// Signature, keyed by symbol name.
    pub symbols: BTreeMap<String, Symbol>,
    /// Rules in declaration order.
    pub rules: Vec<Rule>,
    /// Originating file name, for reporting.
    pub source: String,
}

impl Problem {
    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }
}

/// Rule-validation failures (the conditions a rewrite rule must satisfy).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {rule}: left-hand side is headed by a variable")]
    VariableHeadedLhs { rule: String },
    #[error("rule {rule}: left-hand side has type {lhs} but right-hand side has type {rhs}")]
    TypeMismatch {
        rule: String,
        lhs: SimpleType,
        rhs: SimpleType,
    },
    #[error("rule {rule}: right-hand side introduces variables {vars:?} not free in the left-hand side")]
    ExtraRhsVariables { rule: String, vars: Vec<String> },
    #[error("rule {rule}: {side} side is not in beta-eta normal form (normalizes to {normalized})")]
    NotNormal {
        rule: String,
        side: &'static str,
        normalized: String,
    },
    #[error("duplicate rule name {0}")]
    DuplicateName(String),
}

/// Checks every rule of the problem against the rewrite-rule conditions:
/// βη-normal sides, equal types, no fresh right-hand-side variables, and
/// a non-variable-headed left-hand side. Returns all violations.
pub fn validate_rules(problem: &Problem) -> Result<(), Vec<RuleError>> {
    let mut errors = Vec::new();
    let mut seen = BTreeSet::new();
    for rule in &problem.rules {
        if !seen.insert(rule.name.clone()) {
            errors.push(RuleError::DuplicateName(rule.name.clone()));
        }
        let (head, _) = rule.lhs.spine();
        if matches!(head, Term::Free(..) | Term::Bound(_)) {
            errors.push(RuleError::VariableHeadedLhs {
                rule: rule.name.clone(),
            });
        }
        let lty = rule.lhs.type_of();
        let rty = rule.rhs.type_of();
        if lty != rty {
            errors.push(RuleError::TypeMismatch {
                rule: rule.name.clone(),
                lhs: lty,
                rhs: rty,
            });
        }
        let lhs_vars: BTreeSet<_> = rule.lhs.free_vars().into_keys().collect();
        let extra: Vec<String> = rule
            .rhs
            .free_vars()
            .into_keys()
            .filter(|v| !lhs_vars.contains(v))
            .collect();
        if !extra.is_empty() {
            errors.push(RuleError::ExtraRhsVariables {
                rule: rule.name.clone(),
                vars: extra,
            });
        }
        for (side, term) in [("left", &rule.lhs), ("right", &rule.rhs)] {
            if !is_beta_eta_normal(term) {
                errors.push(RuleError::NotNormal {
                    rule: rule.name.clone(),
                    side,
                    normalized: beta_eta_normalize(term).to_string(),
                });
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.name, self.lhs, self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> SimpleType {
        SimpleType::base("a")
    }

    fn problem_with(rules: Vec<Rule>) -> Problem {
        Problem {
            base_types: BTreeSet::from(["a".to_string()]),
            symbols: BTreeMap::new(),
            rules,
            source: "test".into(),
        }
    }

    #[test]
    fn variable_lhs_is_rejected() {
        let p = problem_with(vec![Rule {
            name: "r".into(),
            lhs: Term::free("X", a()),
            rhs: Term::free("X", a()),
        }]);
        let errs = validate_rules(&p).unwrap_err();
        assert!(matches!(errs[0], RuleError::VariableHeadedLhs { .. }));
    }

    #[test]
    fn extra_rhs_variable_is_rejected() {
        let c = Term::fun(Symbol::new("c", a(), 0).unwrap(), vec![]).unwrap();
        let f = Symbol::new("f", SimpleType::arrow(a(), a()), 1).unwrap();
        let p = problem_with(vec![Rule {
            name: "r".into(),
            lhs: Term::fun(f, vec![c]).unwrap(),
            rhs: Term::free("G", a()),
        }]);
        let errs = validate_rules(&p).unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, RuleError::ExtraRhsVariables { .. })));
    }

    #[test]
    fn non_normal_side_is_rejected_with_normal_form() {
        let f = Symbol::new("f", SimpleType::arrow(a(), a()), 1).unwrap();
        let redex = Term::app(
            Term::lam("x", a(), Term::free("x", a())),
            Term::free("X", a()),
        )
        .unwrap();
        let p = problem_with(vec![Rule {
            name: "r".into(),
            lhs: Term::fun(f, vec![Term::free("X", a())]).unwrap(),
            rhs: redex,
        }]);
        let errs = validate_rules(&p).unwrap_err();
        match &errs[0] {
            RuleError::NotNormal { normalized, .. } => assert_eq!(normalized, "X"),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
