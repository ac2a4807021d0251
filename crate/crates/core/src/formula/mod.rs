//! Formula syntax: surface parsing, desugaring into the core operators
//! {true, atom, not, or, until, since}, and horizon/history bounds.
//!
//! Interval bounds always count samples. The core formula is a DAG of
//! structurally distinct subformulas stored in an array where node 0 is the
//! root and every operand index is strictly greater than its parent's, so a
//! descending sweep visits operands before the nodes that read them.

mod parse;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use parse::{seconds_to_samples, TimeUnits};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulaError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbounded future interval at offset {pos}")]
    UnboundedFuture { pos: usize },
    #[error("empty interval at offset {pos}")]
    EmptyInterval { pos: usize },
    #[error("{secs} s is not a multiple of the sampling period {delta_t} s")]
    NotDivisible { secs: f64, delta_t: f64 },
}

/// A non-empty interval of sample counts. `upper == None` stands for `+inf`
/// (right-open) and is only legal on past operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lower: usize,
    pub upper: Option<usize>,
}

impl Interval {
    pub fn bounded(lower: usize, upper: usize) -> Self {
        assert!(lower <= upper, "empty interval [{lower},{upper}]");
        Interval {
            lower,
            upper: Some(upper),
        }
    }

    pub fn unbounded(lower: usize) -> Self {
        Interval { lower, upper: None }
    }

    pub fn upper_closed(&self) -> bool {
        self.upper.is_some()
    }
}

/// Surface syntax tree, including the derived operators.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    True,
    False,
    Atom(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Until(Box<Expr>, Box<Expr>, Interval),
    Since(Box<Expr>, Box<Expr>, Interval),
    Eventually(Interval, Box<Expr>),
    Always(Interval, Box<Expr>),
    Once(Interval, Box<Expr>),
    Historically(Interval, Box<Expr>),
    Next(Box<Expr>),
    Prev(Box<Expr>),
}

impl Expr {
    /// Parses formula text whose interval bounds are sample counts.
    pub fn parse(text: &str) -> Result<Expr, FormulaError> {
        parse::parse_with(text, TimeUnits::Samples)
    }

    pub fn parse_with_units(text: &str, units: TimeUnits) -> Result<Expr, FormulaError> {
        parse::parse_with(text, units)
    }

    /// Horizon computed directly on the surface tree, with every derived
    /// operator expanded through its defining equivalence.
    pub fn horizon(&self) -> usize {
        clamp(self.horizon_i())
    }

    /// History computed directly on the surface tree.
    pub fn history(&self) -> usize {
        clamp(self.history_i())
    }

    fn horizon_i(&self) -> i64 {
        use Expr::*;
        match self {
            True | False | Atom(_) => 0,
            Not(e) => e.horizon_i(),
            And(a, b) | Or(a, b) | Implies(a, b) | Since(a, b, _) => {
                a.horizon_i().max(b.horizon_i())
            }
            Until(a, b, iv) => until_horizon(a.horizon_i(), b.horizon_i(), iv),
            Eventually(iv, e) | Always(iv, e) => until_horizon(0, e.horizon_i(), iv),
            Next(e) => until_horizon(0, e.horizon_i(), &Interval::bounded(1, 1)),
            Once(_, e) | Historically(_, e) | Prev(e) => e.horizon_i(),
        }
    }

    fn history_i(&self) -> i64 {
        use Expr::*;
        match self {
            True | False | Atom(_) => 0,
            Not(e) => e.history_i(),
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b, _) => {
                a.history_i().max(b.history_i())
            }
            Since(a, b, iv) => since_history(a.history_i(), b.history_i(), iv),
            Once(iv, e) | Historically(iv, e) => since_history(0, e.history_i(), iv),
            Prev(e) => since_history(0, e.history_i(), &Interval::bounded(1, 1)),
            Eventually(_, e) | Always(_, e) | Next(e) => e.history_i(),
        }
    }
}

fn until_horizon(left: i64, right: i64, iv: &Interval) -> i64 {
    let u = iv.upper.expect("future intervals are bounded") as i64;
    (left + u - 1).max(right + u)
}

// The unbounded case also reads `left` at the current column.
fn since_history(left: i64, right: i64, iv: &Interval) -> i64 {
    match iv.upper {
        Some(u) => {
            let u = u as i64;
            (left + u - 1).max(right + u)
        }
        None => {
            let l = iv.lower as i64;
            (left + l - 1).max(right + l).max(left)
        }
    }
}

fn clamp(v: i64) -> usize {
    v.max(0) as usize
}

/// Core operator of a formula node; operands are node indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeKind {
    True,
    Atom(String),
    Not(usize),
    Or(usize, usize),
    Until(usize, usize, Interval),
    Since(usize, usize, Interval),
}

impl NodeKind {
    pub fn operands(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            NodeKind::True | NodeKind::Atom(_) => (None, None),
            NodeKind::Not(m) => (Some(m), None),
            NodeKind::Or(m, n) | NodeKind::Until(m, n, _) | NodeKind::Since(m, n, _) => {
                (Some(m), Some(n))
            }
        };
        a.into_iter().chain(b)
    }

    fn remap(&self, f: impl Fn(usize) -> usize) -> NodeKind {
        match self {
            NodeKind::True => NodeKind::True,
            NodeKind::Atom(a) => NodeKind::Atom(a.clone()),
            NodeKind::Not(m) => NodeKind::Not(f(*m)),
            NodeKind::Or(m, n) => NodeKind::Or(f(*m), f(*n)),
            NodeKind::Until(m, n, iv) => NodeKind::Until(f(*m), f(*n), *iv),
            NodeKind::Since(m, n, iv) => NodeKind::Since(f(*m), f(*n), *iv),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaNode {
    pub kind: NodeKind,
    /// Future samples this subformula depends on.
    pub hrz: usize,
    /// Past samples this subformula depends on.
    pub hst: usize,
}

/// Core formula ready for monitoring.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    nodes: Vec<FormulaNode>,
    horizon: usize,
    core_history: usize,
    atoms: BTreeSet<String>,
}

impl Formula {
    pub fn parse(text: &str) -> Result<Formula, FormulaError> {
        Ok(Formula::from_expr(&Expr::parse(text)?))
    }

    pub fn parse_with_units(text: &str, units: TimeUnits) -> Result<Formula, FormulaError> {
        Ok(Formula::from_expr(&Expr::parse_with_units(text, units)?))
    }

    /// Desugars a surface tree into core nodes and annotates horizons/histories.
    pub fn from_expr(expr: &Expr) -> Formula {
        let mut b = Builder::default();
        let root = b.lower(expr);
        b.finish(root)
    }

    pub fn nodes(&self) -> &[FormulaNode] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> &FormulaNode {
        &self.nodes[k]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Hrz`: number of predicted samples the monitor needs.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `hst` of the root.
    pub fn core_history(&self) -> usize {
        self.core_history
    }

    /// `Hst = Hrz + hst(root)`: past columns kept by the monitor, extended so
    /// that every stored past value only depends on observed samples.
    pub fn history(&self) -> usize {
        self.horizon + self.core_history
    }

    /// Columns of the robustness table, `Hst + 1 + Hrz`.
    pub fn width(&self) -> usize {
        self.history() + 1 + self.horizon
    }

    pub fn atoms(&self) -> &BTreeSet<String> {
        &self.atoms
    }

    /// Finds the row holding a given core node, if present.
    pub fn find(&self, kind: &NodeKind) -> Option<usize> {
        self.nodes.iter().position(|n| &n.kind == kind)
    }

    /// Row index of the core node a surface subformula desugars to.
    pub fn row_of(&self, expr: &Expr) -> Option<usize> {
        let mut b = Builder::default();
        let tmp_root = b.lower(expr);
        let sub = b.finish(tmp_root);
        // Walk both DAGs in lockstep from their roots.
        fn matches(a: &Formula, ka: usize, b: &Formula, kb: usize) -> bool {
            let (na, nb) = (&a.nodes[ka].kind, &b.nodes[kb].kind);
            match (na, nb) {
                (NodeKind::True, NodeKind::True) => true,
                (NodeKind::Atom(x), NodeKind::Atom(y)) => x == y,
                (NodeKind::Not(m1), NodeKind::Not(m2)) => matches(a, *m1, b, *m2),
                (NodeKind::Or(m1, n1), NodeKind::Or(m2, n2)) => {
                    matches(a, *m1, b, *m2) && matches(a, *n1, b, *n2)
                }
                (NodeKind::Until(m1, n1, i1), NodeKind::Until(m2, n2, i2))
                | (NodeKind::Since(m1, n1, i1), NodeKind::Since(m2, n2, i2)) => {
                    i1 == i2 && matches(a, *m1, b, *m2) && matches(a, *n1, b, *n2)
                }
                _ => false,
            }
        }
        (0..self.nodes.len()).find(|&k| matches(self, k, &sub, 0))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(fm: &Formula, k: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match &fm.nodes[k].kind {
                NodeKind::True => f.write_str("true"),
                NodeKind::Atom(a) => f.write_str(a),
                NodeKind::Not(m) => {
                    f.write_str("(not ")?;
                    go(fm, *m, f)?;
                    f.write_str(")")
                }
                NodeKind::Or(m, n) => {
                    f.write_str("(")?;
                    go(fm, *m, f)?;
                    f.write_str(" or ")?;
                    go(fm, *n, f)?;
                    f.write_str(")")
                }
                NodeKind::Until(m, n, iv) | NodeKind::Since(m, n, iv) => {
                    let op = if matches!(fm.nodes[k].kind, NodeKind::Until(..)) {
                        "U"
                    } else {
                        "S"
                    };
                    f.write_str("(")?;
                    go(fm, *m, f)?;
                    write!(f, " {op}{iv} ")?;
                    go(fm, *n, f)?;
                    f.write_str(")")
                }
            }
        }
        go(self, 0, f)
    }
}

/// Hash-consing builder. Nodes are created operands-first, so reversing the
/// creation order yields the parent-before-operand index layout.
#[derive(Default)]
struct Builder {
    kinds: Vec<NodeKind>,
    interned: HashMap<NodeKind, usize>,
}

impl Builder {
    fn intern(&mut self, kind: NodeKind) -> usize {
        if let Some(&id) = self.interned.get(&kind) {
            return id;
        }
        let id = self.kinds.len();
        self.kinds.push(kind.clone());
        self.interned.insert(kind, id);
        id
    }

    fn not(&mut self, m: usize) -> usize {
        self.intern(NodeKind::Not(m))
    }

    fn truth(&mut self) -> usize {
        self.intern(NodeKind::True)
    }

    fn lower(&mut self, e: &Expr) -> usize {
        match e {
            Expr::True => self.truth(),
            Expr::False => {
                let t = self.truth();
                self.not(t)
            }
            Expr::Atom(a) => self.intern(NodeKind::Atom(a.clone())),
            Expr::Not(x) => {
                let m = self.lower(x);
                self.not(m)
            }
            Expr::And(a, b) => {
                let a = self.lower(a);
                let b = self.lower(b);
                let na = self.not(a);
                let nb = self.not(b);
                let or = self.intern(NodeKind::Or(na, nb));
                self.not(or)
            }
            Expr::Or(a, b) => {
                let a = self.lower(a);
                let b = self.lower(b);
                self.intern(NodeKind::Or(a, b))
            }
            Expr::Implies(a, b) => {
                let a = self.lower(a);
                let b = self.lower(b);
                let na = self.not(a);
                self.intern(NodeKind::Or(na, b))
            }
            Expr::Until(a, b, iv) => {
                let a = self.lower(a);
                let b = self.lower(b);
                self.intern(NodeKind::Until(a, b, *iv))
            }
            Expr::Since(a, b, iv) => {
                let a = self.lower(a);
                let b = self.lower(b);
                self.intern(NodeKind::Since(a, b, *iv))
            }
            Expr::Eventually(iv, x) => {
                let t = self.truth();
                let m = self.lower(x);
                self.intern(NodeKind::Until(t, m, *iv))
            }
            Expr::Always(iv, x) => {
                let t = self.truth();
                let m = self.lower(x);
                let nm = self.not(m);
                let u = self.intern(NodeKind::Until(t, nm, *iv));
                self.not(u)
            }
            Expr::Once(iv, x) => {
                let t = self.truth();
                let m = self.lower(x);
                self.intern(NodeKind::Since(t, m, *iv))
            }
            Expr::Historically(iv, x) => {
                let t = self.truth();
                let m = self.lower(x);
                let nm = self.not(m);
                let s = self.intern(NodeKind::Since(t, nm, *iv));
                self.not(s)
            }
            Expr::Next(x) => {
                let t = self.truth();
                let m = self.lower(x);
                self.intern(NodeKind::Until(t, m, Interval::bounded(1, 1)))
            }
            Expr::Prev(x) => {
                let t = self.truth();
                let m = self.lower(x);
                self.intern(NodeKind::Since(t, m, Interval::bounded(1, 1)))
            }
        }
    }

    fn finish(self, root: usize) -> Formula {
        // Keep only nodes reachable from `root`, then reverse creation order.
        let mut reachable = vec![false; self.kinds.len()];
        let mut stack = vec![root];
        while let Some(k) = stack.pop() {
            if !reachable[k] {
                reachable[k] = true;
                stack.extend(self.kinds[k].operands());
            }
        }
        let live: Vec<usize> = (0..self.kinds.len()).filter(|&k| reachable[k]).collect();
        let mut index = vec![usize::MAX; self.kinds.len()];
        for (pos, &old) in live.iter().rev().enumerate() {
            index[old] = pos;
        }
        let mut kinds: Vec<NodeKind> = vec![NodeKind::True; live.len()];
        for &old in &live {
            kinds[index[old]] = self.kinds[old].remap(|m| index[m]);
        }
        debug_assert_eq!(index[root], 0);

        let mut nodes: Vec<FormulaNode> = kinds
            .into_iter()
            .map(|kind| FormulaNode {
                kind,
                hrz: 0,
                hst: 0,
            })
            .collect();
        for k in (0..nodes.len()).rev() {
            let hrz = compute_horizon(&nodes, k);
            let hst = compute_history(&nodes, k);
            nodes[k].hrz = hrz;
            nodes[k].hst = hst;
        }
        let atoms = nodes
            .iter()
            .filter_map(|n| match &n.kind {
                NodeKind::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect();
        Formula {
            horizon: nodes[0].hrz,
            core_history: nodes[0].hst,
            nodes,
            atoms,
        }
    }
}

/// Horizon of node `k`, given that its operands are already annotated.
pub fn compute_horizon(nodes: &[FormulaNode], k: usize) -> usize {
    let h = |i: usize| nodes[i].hrz as i64;
    let v = match &nodes[k].kind {
        NodeKind::True | NodeKind::Atom(_) => 0,
        NodeKind::Not(m) => h(*m),
        NodeKind::Or(m, n) | NodeKind::Since(m, n, _) => h(*m).max(h(*n)),
        NodeKind::Until(m, n, iv) => until_horizon(h(*m), h(*n), iv),
    };
    clamp(v)
}

/// History of node `k`, given that its operands are already annotated.
pub fn compute_history(nodes: &[FormulaNode], k: usize) -> usize {
    let h = |i: usize| nodes[i].hst as i64;
    let v = match &nodes[k].kind {
        NodeKind::True | NodeKind::Atom(_) => 0,
        NodeKind::Not(m) => h(*m),
        NodeKind::Or(m, n) | NodeKind::Until(m, n, _) => h(*m).max(h(*n)),
        NodeKind::Since(m, n, iv) => since_history(h(*m), h(*n), iv),
    };
    clamp(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(s: &str) -> Box<Expr> {
        Box::new(Expr::Atom(s.into()))
    }

    #[test]
    fn parses_single_atom() {
        assert_eq!(Expr::parse("p").unwrap(), Expr::Atom("p".into()));
    }

    #[test]
    fn parses_until() {
        assert_eq!(
            Expr::parse("p U[0,5] q").unwrap(),
            Expr::Until(atom("p"), atom("q"), Interval::bounded(0, 5))
        );
        assert_eq!(
            Expr::parse("p until [0, 5] q").unwrap(),
            Expr::parse("p U[0,5] q").unwrap()
        );
    }

    #[test]
    fn parses_worked_example() {
        let e = Expr::parse("historically[0,inf) p and always[1,2] q").unwrap();
        assert_eq!(
            e,
            Expr::And(
                Box::new(Expr::Historically(Interval::unbounded(0), atom("p"))),
                Box::new(Expr::Always(Interval::bounded(1, 2), atom("q"))),
            )
        );
    }

    #[test]
    fn precedence_and_symbols() {
        let a = Expr::parse("p -> q -> r").unwrap();
        assert_eq!(
            a,
            Expr::Implies(atom("p"), Box::new(Expr::Implies(atom("q"), atom("r"))))
        );
        let b = Expr::parse("!p \\/ q /\\ r").unwrap();
        assert_eq!(
            b,
            Expr::Or(
                Box::new(Expr::Not(atom("p"))),
                Box::new(Expr::And(atom("q"), atom("r")))
            )
        );
        let c = Expr::parse("<>[0,3] []  [1,2] <*>[0,inf) [*][2,4] p").unwrap();
        assert_eq!(
            c,
            Expr::Eventually(
                Interval::bounded(0, 3),
                Box::new(Expr::Always(
                    Interval::bounded(1, 2),
                    Box::new(Expr::Once(
                        Interval::unbounded(0),
                        Box::new(Expr::Historically(Interval::bounded(2, 4), atom("p")))
                    ))
                ))
            )
        );
        assert_eq!(
            Expr::parse("next prev false or true").unwrap(),
            Expr::Or(
                Box::new(Expr::Next(Box::new(Expr::Prev(Box::new(Expr::False))))),
                Box::new(Expr::True)
            )
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Expr::parse("eventually[0,inf) p"),
            Err(FormulaError::UnboundedFuture { .. })
        ));
        assert!(matches!(
            Expr::parse("p U[0,inf) q"),
            Err(FormulaError::UnboundedFuture { .. })
        ));
        assert!(matches!(
            Expr::parse("once[3,2] p"),
            Err(FormulaError::EmptyInterval { .. })
        ));
        assert!(matches!(
            Expr::parse("p and"),
            Err(FormulaError::Syntax { pos: 5, .. })
        ));
        assert!(matches!(
            Expr::parse("p ? q"),
            Err(FormulaError::Syntax { pos: 2, .. })
        ));
        assert!(Expr::parse("(p").is_err());
        assert!(Expr::parse("p q").is_err());
        assert!(Expr::parse("eventually[0,1.5] p").is_err());
        assert!(Expr::parse("until").is_err());
    }

    #[test]
    fn seconds_conversion() {
        let units = TimeUnits::Seconds { delta_t: 0.01 };
        let e = Expr::parse_with_units("once[0,1] historically[0,2] p", units).unwrap();
        assert_eq!(
            e,
            Expr::Once(
                Interval::bounded(0, 100),
                Box::new(Expr::Historically(Interval::bounded(0, 200), atom("p")))
            )
        );
        assert!(matches!(
            Expr::parse_with_units("eventually[0,0.015] p", units),
            Err(FormulaError::NotDivisible { .. })
        ));
    }

    #[test]
    fn desugars_always() {
        let f = Formula::parse("always[1,2] q").unwrap();
        // not (true U[1,2] not q)
        let nodes = f.nodes();
        let NodeKind::Not(u) = nodes[0].kind else {
            panic!()
        };
        let NodeKind::Until(t, nq, iv) = nodes[u].kind else {
            panic!()
        };
        assert_eq!(iv, Interval::bounded(1, 2));
        assert_eq!(nodes[t].kind, NodeKind::True);
        let NodeKind::Not(q) = nodes[nq].kind else {
            panic!()
        };
        assert_eq!(nodes[q].kind, NodeKind::Atom("q".into()));
    }

    #[test]
    fn desugars_once() {
        let f = Formula::parse("once[0,inf) q").unwrap();
        let NodeKind::Since(t, q, iv) = f.node(0).kind else {
            panic!()
        };
        assert_eq!(iv, Interval::unbounded(0));
        assert_eq!(f.node(t).kind, NodeKind::True);
        assert_eq!(f.node(q).kind, NodeKind::Atom("q".into()));
    }

    #[test]
    fn worked_example_bounds() {
        let f = Formula::parse("historically[0,inf) p and always[1,2] q").unwrap();
        assert_eq!(f.horizon(), 2);
        assert_eq!(f.core_history(), 0);
        assert_eq!(f.history(), 2);
        assert_eq!(f.width(), 5);
        // not(or(not H, not A)) with H = not(true S not p), A = not(true U not q);
        // `true` is shared.
        assert_eq!(f.len(), 13);
        assert_eq!(
            f.atoms().iter().cloned().collect::<Vec<_>>(),
            vec!["p".to_string(), "q".to_string()]
        );
    }

    #[test]
    fn horizon_and_history_examples() {
        assert_eq!(Formula::parse("p U[0,5] q").unwrap().horizon(), 5);
        assert_eq!(Formula::parse("p U[0,5] q").unwrap().core_history(), 0);
        assert_eq!(Formula::parse("p").unwrap().horizon(), 0);
        assert_eq!(Formula::parse("p S[2,inf) q").unwrap().core_history(), 2);
        let f = Formula::parse("eventually[0,1] p").unwrap();
        assert_eq!(
            (f.horizon(), f.core_history(), f.history(), f.width()),
            (1, 0, 1, 3)
        );
    }

    #[test]
    fn unbounded_since_with_zero_lower_bound_covers_left_history() {
        let f = Formula::parse("(once[2,2] p) S[0,inf) q").unwrap();
        assert_eq!(f.core_history(), 2);
    }

    #[test]
    fn operands_follow_parents() {
        let f = Formula::parse(
            "(p S[1,3] (q or r)) and eventually[2,4] (p U[0,2] not r) -> once[0,inf) p",
        )
        .unwrap();
        for (k, n) in f.nodes().iter().enumerate() {
            for m in n.kind.operands() {
                assert!(m > k);
            }
        }
    }

    #[test]
    fn row_lookup() {
        let f = Formula::parse("historically[0,inf) p and always[1,2] q").unwrap();
        let row = f.row_of(&Expr::parse("always[1,2] q").unwrap()).unwrap();
        assert!(matches!(f.node(row).kind, NodeKind::Not(_)));
        assert!(f.row_of(&Expr::parse("always[1,3] q").unwrap()).is_none());
    }
}
