//! Search orchestration: runs one of the two backends and gates every
//! `Proved` verdict behind a concrete re-check with the order engine,
//! independent of the encoding.

use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

use crate::enumerate::{enumerate_search, EnumBounds, EnumError, EnumOutcome};
use crate::order::orient_rule;
use crate::params::{validate_params, OrderParams};
use crate::problem::Problem;
use crate::smt::{
    decode_model, encode_problem_with, render_script, run_solver, DecodeError, EncodeError,
    SolverCommand, SolverError, SolverVerdict, DEFAULT_BUDGET,
};
use crate::trace::ProofTrace;

/// Outcome kind of a parameter search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Admissible parameters orienting every rule were found and
    /// re-checked concretely.
    Proved,
    /// The search space holds no orienting parameters (which does not
    /// imply nontermination).
    NotProvable,
    /// The search gave up (solver timeout or unknown).
    Unknown,
}

/// Result of a parameter search.
#[derive(Debug)]
pub struct SearchResult {
    pub verdict: Verdict,
    /// Present exactly when proved.
    pub params: Option<OrderParams>,
    /// One trace per rule, in rule order, when proved.
    pub traces: Vec<ProofTrace>,
    /// Solver or search diagnostics, for reporting.
    pub diagnostics: Vec<String>,
}

/// SMT backend configuration.
#[derive(Debug, Clone)]
pub struct SmtConfig {
    pub solver: SolverCommand,
    pub timeout: Duration,
    /// Write the generated script here before solving.
    pub dump_smt: Option<PathBuf>,
    /// Definitional-variable budget for the encoder.
    pub budget: usize,
}

impl SmtConfig {
    pub fn new(solver: SolverCommand) -> SmtConfig {
        SmtConfig {
            solver,
            timeout: Duration::from_secs(60),
            dump_smt: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Which search backend to run.
#[derive(Debug, Clone)]
pub enum Backend {
    Smt(SmtConfig),
    Enumeration(EnumBounds),
}

#[derive(Debug, Error)]
pub enum ProveError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error("failed to write SMT script to {path}: {source}")]
    DumpSmt {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("internal soundness error: {0}")]
    Internal(String),
}

/// Concrete re-check of candidate parameters: admissibility plus one
/// orientation per rule, using only the order engine.
pub fn confirm(problem: &Problem, params: &OrderParams) -> Result<Vec<ProofTrace>, String> {
    if let Err(violations) = validate_params(problem, params) {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(format!(
            "decoded parameters are inadmissible: {}",
            msgs.join("; ")
        ));
    }
    let mut traces = Vec::new();
    for rule in &problem.rules {
        match orient_rule(rule, params) {
            Some(t) => traces.push(t),
            None => {
                return Err(format!(
                    "decoded parameters do not orient rule {}",
                    rule.name
                ))
            }
        }
    }
    Ok(traces)
}

/// Searches for orienting parameters with the chosen backend. `Proved`
/// is only ever returned after [`confirm`] succeeds.
pub fn prove(problem: &Problem, backend: &Backend) -> Result<SearchResult, ProveError> {
    match backend {
        Backend::Smt(cfg) => prove_smt(problem, cfg),
        Backend::Enumeration(bounds) => match enumerate_search(problem, bounds)? {
            EnumOutcome::Found {
                params,
                traces,
                tried,
            } => {
                // The enumeration already ran the engine, but the gate is
                // cheap and uniform across backends.
                let traces2 = confirm(problem, &params).map_err(ProveError::Internal)?;
                debug_assert_eq!(traces.len(), traces2.len());
                Ok(SearchResult {
                    verdict: Verdict::Proved,
                    params: Some(params),
                    traces: traces2,
                    diagnostics: vec![format!("enumeration: {tried} candidates examined")],
                })
            }
            EnumOutcome::Exhausted { tried } => Ok(SearchResult {
                verdict: Verdict::NotProvable,
                params: None,
                traces: Vec::new(),
                diagnostics: vec![format!(
                    "enumeration: search space exhausted after {tried} candidates"
                )],
            }),
        },
    }
}

fn prove_smt(problem: &Problem, cfg: &SmtConfig) -> Result<SearchResult, ProveError> {
    let encoding = encode_problem_with(problem, cfg.budget)?;
    let script = render_script(&encoding);
    if let Some(path) = &cfg.dump_smt {
        std::fs::write(path, &script).map_err(|source| ProveError::DumpSmt {
            path: path.clone(),
            source,
        })?;
    }
    match run_solver(&cfg.solver, &script, cfg.timeout)? {
        SolverVerdict::Sat { model } => {
            let params = decode_model(&model, problem)?;
            let traces = confirm(problem, &params).map_err(ProveError::Internal)?;
            Ok(SearchResult {
                verdict: Verdict::Proved,
                params: Some(params),
                traces,
                diagnostics: vec![format!(
                    "smt: {} definitions, solver {}",
                    encoding.defs.len(),
                    cfg.solver.program
                )],
            })
        }
        SolverVerdict::Unsat => Ok(SearchResult {
            verdict: Verdict::NotProvable,
            params: None,
            traces: Vec::new(),
            diagnostics: vec!["smt: constraints unsatisfiable".into()],
        }),
        SolverVerdict::Unknown { reason } => Ok(SearchResult {
            verdict: Verdict::Unknown,
            params: None,
            traces: Vec::new(),
            diagnostics: vec![format!("smt: {reason}")],
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::parse_params;
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
    fn enumeration_backend_proves_and_replays() {
        let p = load("single.p");
        let res = prove(&p, &Backend::Enumeration(EnumBounds::default())).unwrap();
        assert_eq!(res.verdict, Verdict::Proved);
        let params = res.params.unwrap();
        assert_eq!(res.traces.len(), 1);
        for t in &res.traces {
            assert!(replay(t, &params, Default::default()));
        }
    }

    #[test]
    fn enumeration_backend_reports_not_provable() {
        let p = load("selfembed.p");
        let res = prove(&p, &Backend::Enumeration(EnumBounds::default())).unwrap();
        assert_eq!(res.verdict, Verdict::NotProvable);
        assert!(res.params.is_none());
    }

    #[test]
    fn confirm_rejects_inadmissible_and_nonorienting_params() {
        let p = load("single.p");
        // Defaults (all precedence 0) cannot orient f x → g x c.
        let defaults = OrderParams::defaults_for(&p);
        assert!(confirm(&p, &defaults)
            .unwrap_err()
            .contains("do not orient"));
        // Admissible, orienting parameters pass.
        let good = parse_params(&fixture("single.params"), &p).unwrap();
        assert_eq!(confirm(&p, &good).unwrap().len(), 1);
        // Inadmissible parameters are flagged as such: make g big with
        // lower precedence than the small f.
        let mut bad = good.clone();
        bad.big.insert("f".into(), false);
        assert!(confirm(&p, &bad).unwrap_err().contains("inadmissible"));
    }

    #[test]
    fn missing_solver_is_a_spawn_error() {
        let p = load("single.p");
        let cfg = SmtConfig::new(SolverCommand {
            program: "ncpo-no-such-solver".into(),
            args: vec![],
        });
        match prove(&p, &Backend::Smt(cfg)) {
            Err(ProveError::Solver(SolverError::Spawn { command, .. })) => {
                assert_eq!(command, "ncpo-no-such-solver");
            }
            other => panic!("expected spawn error, got {other:?}"),
        }
    }
}
