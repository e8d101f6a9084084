//! Finite-depth unfolding of a state into its tree of observable behaviour.
//!
//! Trees are shared DAGs: unfolding a finite coalgebra to depth `d` builds
//! one node per (state, level) and reuses it wherever that state recurs.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::json;
use thiserror::Error;

use crate::coalgebra::{disjoint_union, Answer, CoalgebraError, FiniteCoalgebra};
use crate::value::{Tolerance, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnfoldError {
    #[error("unknown state index {index} (carrier has {size} states)")]
    UnknownState { index: usize, size: usize },
    #[error("trees have different depths ({0} and {1})")]
    DepthMismatch(usize, usize),
    #[error("trees are over different questions")]
    QuestionMismatch,
    #[error(transparent)]
    Coalgebra(#[from] CoalgebraError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Branch {
    No,
    /// `next` is absent at depth 0.
    Yes { prob: Value, next: Option<Arc<Node>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub depth: usize,
    /// One branch per question, in question order.
    pub branches: Vec<Branch>,
}

#[derive(Debug, Clone)]
pub struct BehaviourTree {
    pub questions: Arc<Vec<String>>,
    pub root: Arc<Node>,
}

impl BehaviourTree {
    pub fn depth(&self) -> usize {
        self.root.depth
    }

    /// Indented text, one line per branch, questions in list order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_node(&self.root, &self.questions, 0, &mut out);
        out
    }

    /// `{question: null | {"prob": .., "next": ..}}`.
    pub fn to_json(&self) -> serde_json::Value {
        node_json(&self.root, &self.questions)
    }
}

fn render_node(node: &Node, questions: &[String], indent: usize, out: &mut String) {
    for (q, b) in questions.iter().zip(&node.branches) {
        match b {
            Branch::No => {
                let _ = writeln!(out, "{:indent$}{q}: no", "");
            }
            Branch::Yes { prob, next } => {
                let _ = writeln!(out, "{:indent$}{q}: yes {prob}", "");
                if let Some(n) = next {
                    render_node(n, questions, indent + 2, out);
                }
            }
        }
    }
}

fn node_json(node: &Node, questions: &[String]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (q, b) in questions.iter().zip(&node.branches) {
        let v = match b {
            Branch::No => serde_json::Value::Null,
            Branch::Yes { prob, next } => {
                let p = match prob {
                    Value::Float(x) => json!(x),
                    other => json!(other.render()),
                };
                match next {
                    Some(n) => json!({ "prob": p, "next": node_json(n, questions) }),
                    None => json!({ "prob": p }),
                }
            }
        };
        map.insert(q.clone(), v);
    }
    serde_json::Value::Object(map)
}

/// Depth-`depth` trees of every state, sharing subtrees.
pub fn unfold_all(a: &FiniteCoalgebra, depth: usize) -> Vec<BehaviourTree> {
    let questions = Arc::new(a.questions().to_vec());
    let mut level: Vec<Arc<Node>> = Vec::new();
    for d in 0..=depth {
        let next_level: Vec<Arc<Node>> = (0..a.len())
            .map(|x| {
                let branches = a
                    .row(x)
                    .iter()
                    .map(|ans| match ans {
                        Answer::No => Branch::No,
                        Answer::Yes { prob, next } => {
                            Branch::Yes { prob: prob.clone(), next: (d > 0).then(|| level[*next].clone()) }
                        }
                    })
                    .collect();
                Arc::new(Node { depth: d, branches })
            })
            .collect();
        level = next_level;
    }
    level.into_iter().map(|root| BehaviourTree { questions: questions.clone(), root }).collect()
}

pub fn unfold(a: &FiniteCoalgebra, x: usize, depth: usize) -> Result<BehaviourTree, UnfoldError> {
    if x >= a.len() {
        return Err(UnfoldError::UnknownState { index: x, size: a.len() });
    }
    Ok(unfold_all(a, depth).swap_remove(x))
}

/// Structural equality; probabilities compare under the numeric tower with
/// tolerance `eps_eq`.
pub fn tree_equal(t1: &BehaviourTree, t2: &BehaviourTree, tol: &Tolerance) -> Result<bool, UnfoldError> {
    if t1.depth() != t2.depth() {
        return Err(UnfoldError::DepthMismatch(t1.depth(), t2.depth()));
    }
    if t1.questions != t2.questions {
        return Err(UnfoldError::QuestionMismatch);
    }
    let mut known = HashSet::new();
    Ok(node_equal(&t1.root, &t2.root, tol.eps_eq, &mut known))
}

fn node_equal(a: &Arc<Node>, b: &Arc<Node>, eps: f64, known: &mut HashSet<(usize, usize)>) -> bool {
    if Arc::ptr_eq(a, b) {
        return true;
    }
    let key = (Arc::as_ptr(a) as usize, Arc::as_ptr(b) as usize);
    if known.contains(&key) {
        return true;
    }
    let equal = a.branches.iter().zip(&b.branches).all(|pair| match pair {
        (Branch::No, Branch::No) => true,
        (Branch::Yes { prob: p, next: m }, Branch::Yes { prob: q, next: n }) => {
            p.eq_within(q, eps)
                && match (m, n) {
                    (Some(m), Some(n)) => node_equal(m, n, eps, known),
                    (None, None) => true,
                    _ => false,
                }
        }
        _ => false,
    });
    if equal {
        known.insert(key);
    }
    equal
}

/// Compares the trees of `x` and `y` at depth `|A| + |B|`.
pub fn semantic_equal(
    a: &FiniteCoalgebra,
    x: usize,
    b: &FiniteCoalgebra,
    y: usize,
    tol: &Tolerance,
) -> Result<bool, UnfoldError> {
    semantic_equal_at(a, x, b, y, a.len() + b.len(), tol)
}

pub fn semantic_equal_at(
    a: &FiniteCoalgebra,
    x: usize,
    b: &FiniteCoalgebra,
    y: usize,
    depth: usize,
    tol: &Tolerance,
) -> Result<bool, UnfoldError> {
    if x >= a.len() {
        return Err(UnfoldError::UnknownState { index: x, size: a.len() });
    }
    if y >= b.len() {
        return Err(UnfoldError::UnknownState { index: y, size: b.len() });
    }
    let u = disjoint_union(a, b)?;
    let trees = unfold_all(&u.coalgebra, depth);
    tree_equal(&trees[u.left[x]], &trees[u.right[y]], tol)
}

/// Classes of equal depth-`depth` trees over the carrier, as block labels in
/// first-appearance order.
pub fn tree_classes(a: &FiniteCoalgebra, depth: usize, tol: &Tolerance) -> Vec<usize> {
    let trees = unfold_all(a, depth);
    let mut reps: Vec<usize> = Vec::new();
    let mut labels = Vec::with_capacity(trees.len());
    for (x, t) in trees.iter().enumerate() {
        let found = reps.iter().position(|&r| tree_equal(&trees[r], t, tol).unwrap_or(false));
        labels.push(found.unwrap_or_else(|| {
            reps.push(x);
            reps.len() - 1
        }));
    }
    labels
}

/// The shallowest observable difference between two states.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviourDiff {
    /// Question ids leading to the differing answer; the last one is the
    /// question answered differently.
    pub path: Vec<String>,
    pub left: Option<Value>,
    pub right: Option<Value>,
}

impl BehaviourDiff {
    pub fn render(&self) -> String {
        let show = |v: &Option<Value>| v.as_ref().map_or_else(|| "no".to_string(), |p| format!("yes {p}"));
        format!("{}: {} vs {}", self.path.join(" > "), show(&self.left), show(&self.right))
    }
}

/// Breadth-first search over pairs of states reached by the same question
/// sequence. `None` means no difference exists at any depth, i.e. the
/// states are bisimilar.
pub fn diff_behaviour(
    a: &FiniteCoalgebra,
    x: usize,
    b: &FiniteCoalgebra,
    y: usize,
    tol: &Tolerance,
) -> Result<Option<BehaviourDiff>, UnfoldError> {
    if x >= a.len() {
        return Err(UnfoldError::UnknownState { index: x, size: a.len() });
    }
    if y >= b.len() {
        return Err(UnfoldError::UnknownState { index: y, size: b.len() });
    }
    if a.questions() != b.questions() {
        return Err(UnfoldError::QuestionMismatch);
    }
    let mut parent: HashMap<(usize, usize), Option<((usize, usize), usize)>> = HashMap::new();
    parent.insert((x, y), None);
    let mut queue = VecDeque::from([(x, y)]);
    let path_to = |parent: &HashMap<(usize, usize), Option<((usize, usize), usize)>>, mut at: (usize, usize)| {
        let mut qs = Vec::new();
        while let Some(Some((prev, q))) = parent.get(&at) {
            qs.push(*q);
            at = *prev;
        }
        qs.reverse();
        qs
    };
    while let Some((s, t)) = queue.pop_front() {
        for q in 0..a.questions().len() {
            let (l, r) = (a.answer(s, q), b.answer(t, q));
            let differs = match (l, r) {
                (Answer::No, Answer::No) => false,
                (Answer::Yes { prob: p, .. }, Answer::Yes { prob: pp, .. }) => !p.eq_within(pp, tol.eps_eq),
                _ => true,
            };
            if differs {
                let mut path: Vec<String> = path_to(&parent, (s, t)).iter().map(|&i| a.questions()[i].clone()).collect();
                path.push(a.questions()[q].clone());
                return Ok(Some(BehaviourDiff { path, left: l.prob().cloned(), right: r.prob().cloned() }));
            }
            if let (Answer::Yes { next: n1, .. }, Answer::Yes { next: n2, .. }) = (l, r) {
                let pair = (*n1, *n2);
                if !parent.contains_key(&pair) {
                    parent.insert(pair, Some(((s, t), q)));
                    queue.push_back(pair);
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::bisimilar;
    use crate::value::NumericMode;

    fn ids(p: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{p}{i}")).collect()
    }

    fn coalg(nq: usize, rows: Vec<Vec<Answer>>) -> FiniteCoalgebra {
        let n = rows.len();
        FiniteCoalgebra::new(NumericMode::Rational, ids("q", nq), ids("x", n), rows.into_iter().flatten().collect())
            .unwrap()
    }

    fn yes(n: i64, d: i64, next: usize) -> Answer {
        Answer::yes(Value::ratio(n, d), next)
    }

    #[test]
    fn depth_zero_all_no() {
        let a = coalg(2, vec![vec![Answer::No, Answer::No]]);
        let t = unfold(&a, 0, 0).unwrap();
        assert_eq!(t.render(), "q0: no\nq1: no\n");
        assert!(unfold(&a, 1, 0).is_err());
    }

    #[test]
    fn static_self_loops_repeat_the_root() {
        let a = coalg(2, vec![vec![yes(1, 2, 0), Answer::No]]);
        let t = unfold(&a, 0, 3).unwrap();
        let shallower = unfold(&a, 0, 2).unwrap();
        match &t.root.branches[0] {
            Branch::Yes { next: Some(n), .. } => assert_eq!(**n, *shallower.root),
            _ => panic!("expected a subtree"),
        }
    }

    #[test]
    fn successor_identity_does_not_matter() {
        // x0 -> x2, x1 -> x3, and x2, x3 behave alike
        let a = coalg(
            1,
            vec![vec![yes(1, 2, 2)], vec![yes(1, 2, 3)], vec![yes(1, 3, 2)], vec![yes(1, 3, 3)]],
        );
        let tol = Tolerance::exact();
        assert!(semantic_equal(&a, 0, &a, 1, &tol).unwrap());
        assert!(bisimilar(&a, 0, &a, 1, &tol).unwrap());
        assert_eq!(diff_behaviour(&a, 0, &a, 1, &tol).unwrap(), None);
    }

    #[test]
    fn shallowest_difference_is_reported() {
        let a = coalg(
            2,
            vec![
                vec![yes(1, 2, 1), Answer::No],
                vec![Answer::No, yes(1, 3, 1)],
                vec![yes(1, 2, 3), Answer::No],
                vec![Answer::No, yes(1, 4, 3)],
            ],
        );
        let tol = Tolerance::exact();
        let d = diff_behaviour(&a, 0, &a, 2, &tol).unwrap().unwrap();
        assert_eq!(d.path, vec!["q0".to_string(), "q1".to_string()]);
        assert_eq!(d.render(), "q0 > q1: yes 1/3 vs yes 1/4");
        assert!(!semantic_equal(&a, 0, &a, 2, &tol).unwrap());
        // the first level agrees
        assert!(tree_equal(&unfold(&a, 0, 0).unwrap(), &unfold(&a, 2, 0).unwrap(), &tol).unwrap());
        assert!(!tree_equal(&unfold(&a, 0, 1).unwrap(), &unfold(&a, 2, 1).unwrap(), &tol).unwrap());
    }

    #[test]
    fn mismatched_trees_are_errors() {
        let a = coalg(1, vec![vec![Answer::No]]);
        let b = coalg(2, vec![vec![Answer::No, Answer::No]]);
        let tol = Tolerance::exact();
        assert_eq!(
            tree_equal(&unfold(&a, 0, 0).unwrap(), &unfold(&a, 0, 1).unwrap(), &tol),
            Err(UnfoldError::DepthMismatch(0, 1))
        );
        assert_eq!(tree_equal(&unfold(&a, 0, 0).unwrap(), &unfold(&b, 0, 0).unwrap(), &tol), Err(UnfoldError::QuestionMismatch));
    }

    #[test]
    fn json_form() {
        let a = coalg(1, vec![vec![yes(1, 2, 0)]]);
        let t = unfold(&a, 0, 1).unwrap();
        assert_eq!(t.to_json(), json!({"q0": {"prob": "1/2", "next": {"q0": {"prob": "1/2"}}}}));
    }
}
