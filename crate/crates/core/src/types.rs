//! Simple types over a set of declared base types.

use std::collections::BTreeSet;
use std::fmt;

/// A simple type: a base type name or a function type.
///
/// The arrow is right-associative in the surface syntax (`a > b > c`
/// parses as `a > (b > c)`); internally it is a binary tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    Base(String),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn base(name: impl Into<String>) -> Self {
        SimpleType::Base(name.into())
    }

    pub fn arrow(dom: SimpleType, cod: SimpleType) -> Self {
        SimpleType::Arrow(Box::new(dom), Box::new(cod))
    }

    /// Builds `T1 > T2 > ... > Tn > result`.
    pub fn arrow_chain<I>(doms: I, result: SimpleType) -> Self
    where
        I: IntoIterator<Item = SimpleType>,
        I::IntoIter: DoubleEndedIterator,
    {
        doms.into_iter()
            .rev()
            .fold(result, |acc, d| SimpleType::arrow(d, acc))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, SimpleType::Base(_))
    }

    pub fn as_base(&self) -> Option<&str> {
        match self {
            SimpleType::Base(n) => Some(n),
            SimpleType::Arrow(..) => None,
        }
    }

    /// Full decomposition `T1 > ... > Tn > a` into argument types and the
    /// final base name.
    pub fn decompose(&self) -> (Vec<&SimpleType>, &str) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                SimpleType::Base(a) => return (args, a),
                SimpleType::Arrow(d, c) => {
                    args.push(d.as_ref());
                    cur = c.as_ref();
                }
            }
        }
    }

    /// Number of leading arrows.
    pub fn arrow_count(&self) -> usize {
        self.decompose().0.len()
    }

    /// The type obtained by consuming the first `k` arguments, if there
    /// are at least `k` leading arrows.
    pub fn result_after(&self, k: usize) -> Option<&SimpleType> {
        let mut cur = self;
        for _ in 0..k {
            match cur {
                SimpleType::Arrow(_, c) => cur = c.as_ref(),
                SimpleType::Base(_) => return None,
            }
        }
        Some(cur)
    }

    /// Base type names occurring anywhere in this type.
    pub fn base_names(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_bases(&mut out);
        out
    }

    fn collect_bases<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            SimpleType::Base(a) => {
                out.insert(a.as_str());
            }
            SimpleType::Arrow(d, c) => {
                d.collect_bases(out);
                c.collect_bases(out);
            }
        }
    }

    /// Node count, with base types counting 1.
    pub fn size(&self) -> usize {
        match self {
            SimpleType::Base(_) => 1,
            SimpleType::Arrow(d, c) => 1 + d.size() + c.size(),
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Base(a) => write!(f, "{a}"),
            SimpleType::Arrow(d, c) => {
                if d.is_base() {
                    write!(f, "{d} > {c}")
                } else {
                    write!(f, "({d}) > {c}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> SimpleType {
        SimpleType::base("a")
    }
    fn b() -> SimpleType {
        SimpleType::base("b")
    }

    #[test]
    fn arrow_chain_is_right_associative() {
        let t = SimpleType::arrow_chain([a(), b()], a());
        assert_eq!(t, SimpleType::arrow(a(), SimpleType::arrow(b(), a())));
        assert_eq!(t.to_string(), "a > b > a");
    }

    #[test]
    fn decompose_round_trip() {
        let t = SimpleType::arrow(SimpleType::arrow(a(), b()), a());
        let (args, res) = t.decompose();
        assert_eq!(args, vec![&SimpleType::arrow(a(), b())]);
        assert_eq!(res, "a");
        assert_eq!(t.to_string(), "(a > b) > a");
    }

    #[test]
    fn result_after_strips_arrows() {
        let t = SimpleType::arrow_chain([a(), b()], a());
        assert_eq!(t.result_after(0), Some(&t));
        assert_eq!(t.result_after(2), Some(&a()));
        assert_eq!(t.result_after(3), None);
    }
}
