//! Proof traces: one node per derivation step, serialized as an
//! indented text format, replayable against the checker.

use std::fmt;

use crate::params::OrderParams;
use crate::structure::Marked;
use crate::term::Term;

/// The judgment shape a node claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Strict,
    StrictTau,
    Weak,
    WeakTau,
}

impl Rel {
    fn symbol(self) -> &'static str {
        match self {
            Rel::Strict => ">",
            Rel::StrictTau => ">τ",
            Rel::Weak => "≥",
            Rel::WeakTau => "≥τ",
        }
    }
}

/// One derivation node: the rule applied, the judgment it concludes and
/// the premise subtraces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub rule: &'static str,
    pub lhs: Term,
    pub rhs: Term,
    pub marked: Marked,
    pub rel: Rel,
    pub children: Vec<ProofTrace>,
}

impl ProofTrace {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, indent: usize, out: &mut String) {
        use fmt::Write as _;
        let names: Vec<&str> = self.marked.keys().map(String::as_str).collect();
        writeln!(
            out,
            "{:indent$}{} {} {} {} [X = {{{}}}]",
            "",
            self.rule,
            self.lhs,
            self.rel.symbol(),
            self.rhs,
            names.join(", "),
            indent = indent,
        )
        .unwrap();
        for c in &self.children {
            c.render_into(indent + 2, out);
        }
    }

    /// Total number of nodes.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(ProofTrace::node_count).sum::<usize>()
    }
}

impl fmt::Display for ProofTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Re-validates every node of a trace against a fresh checker run: each
/// claimed judgment must be independently derivable.
pub fn replay(trace: &ProofTrace, params: &OrderParams, config: crate::order::OrderConfig) -> bool {
    let node_ok = {
        let mut session = crate::order::Session::new(params, config);
        match trace.rel {
            Rel::Strict => session.gt(&trace.lhs, &trace.rhs, &trace.marked).is_some(),
            Rel::StrictTau => session
                .gt_tau(&trace.lhs, &trace.rhs, &trace.marked)
                .is_some(),
            Rel::Weak => session.geq(&trace.lhs, &trace.rhs, &trace.marked).is_some(),
            Rel::WeakTau => session
                .geq_tau(&trace.lhs, &trace.rhs, &trace.marked)
                .is_some(),
        }
    };
    node_ok
        && trace
            .children
            .iter()
            .all(|c| replay(c, params, config))
}
