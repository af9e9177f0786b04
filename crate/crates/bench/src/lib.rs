//! Shared fixtures for the criterion benchmarks: loads the bundled
//! example problems relative to the workspace root.

use std::path::PathBuf;

use ncpo::params::{parse_params, OrderParams};
use ncpo::thf::{infer_arities, parse_problem};
use ncpo::Problem;

fn problems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

/// Loads a bundled problem file with inferred arities.
pub fn load_problem(name: &str) -> Problem {
    let path = problems_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    infer_arities(&parse_problem(&text, name).unwrap())
}

/// Loads a bundled parameter file for a problem.
pub fn load_params(name: &str, problem: &Problem) -> OrderParams {
    let path = problems_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    parse_params(&text, problem).unwrap()
}
