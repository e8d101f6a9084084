//! Coalgebras for `X ↦ ({0} + (0,1] × X)^Q`: for every question a state
//! either answers "no" or answers "yes" with a probability and a successor.

use thiserror::Error;

use crate::value::{NumericMode, Value};

/// Default cap on the number of states [`materialize`] may create.
pub const DEFAULT_STATE_CAP: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoalgebraError {
    #[error("behaviour table has {found} cells, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("state `{state}`, question `{question}`: probability {value} is not in (0, 1]")]
    BadProbability { state: String, question: String, value: String },
    #[error("state `{state}`, question `{question}`: {value} is not a {mode} probability")]
    ModeMismatch { state: String, question: String, value: String, mode: NumericMode },
    #[error("state `{state}`, question `{question}`: successor {next} is outside the carrier")]
    SuccessorOutOfRange { state: String, question: String, next: usize },
    #[error("duplicate {what} id `{id}`")]
    DuplicateId { what: &'static str, id: String },
    #[error("question sequences differ: {0}")]
    QuestionMismatch(String),
    #[error("numeric modes differ ({0} vs {1})")]
    MixedModes(NumericMode, NumericMode),
    #[error("carrier map has {found} entries, expected {expected}")]
    MapLength { expected: usize, found: usize },
    #[error("carrier map sends state {index} to {value}, outside a carrier of {size}")]
    MapOutOfRange { index: usize, value: usize, size: usize },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown question `{0}`")]
    UnknownQuestion(String),
    #[error("closure exceeded the cap of {cap} states ({count} created)")]
    StateExplosion { count: usize, cap: usize },
}

/// The answer of a state to one question.
#[derive(Debug, Clone, PartialEq)]
pub enum Answer<S = usize> {
    No,
    Yes { prob: Value, next: S },
}

impl<S> Answer<S> {
    pub fn yes(prob: Value, next: S) -> Self {
        Answer::Yes { prob, next }
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Answer::No)
    }

    pub fn prob(&self) -> Option<&Value> {
        match self {
            Answer::No => None,
            Answer::Yes { prob, .. } => Some(prob),
        }
    }

    pub fn next(&self) -> Option<&S> {
        match self {
            Answer::No => None,
            Answer::Yes { next, .. } => Some(next),
        }
    }

    pub fn map_next<T>(self, f: impl FnOnce(S) -> T) -> Answer<T> {
        match self {
            Answer::No => Answer::No,
            Answer::Yes { prob, next } => Answer::Yes { prob, next: f(next) },
        }
    }
}

/// A coalgebra over a finite carrier, stored as a row-major `X × Q` table.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCoalgebra {
    mode: NumericMode,
    questions: Vec<String>,
    states: Vec<String>,
    table: Vec<Answer>,
}

fn check_unique(what: &'static str, ids: &[String]) -> Result<(), CoalgebraError> {
    let mut sorted: Vec<&String> = ids.iter().collect();
    sorted.sort();
    match sorted.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(CoalgebraError::DuplicateId { what, id: w[0].clone() }),
        None => Ok(()),
    }
}

impl FiniteCoalgebra {
    pub fn new(
        mode: NumericMode,
        questions: Vec<String>,
        states: Vec<String>,
        table: Vec<Answer>,
    ) -> Result<Self, CoalgebraError> {
        let expected = questions.len() * states.len();
        if table.len() != expected {
            return Err(CoalgebraError::TableSize { expected, found: table.len() });
        }
        check_unique("question", &questions)?;
        check_unique("state", &states)?;
        let nq = questions.len();
        for (i, cell) in table.iter().enumerate() {
            if let Answer::Yes { prob, next } = cell {
                let (x, q) = (i / nq, i % nq);
                let ctx = || (states[x].clone(), questions[q].clone());
                if prob.mode() != Some(mode) {
                    let (state, question) = ctx();
                    return Err(CoalgebraError::ModeMismatch { state, question, value: prob.render(), mode });
                }
                if !prob.is_answer_probability() {
                    let (state, question) = ctx();
                    return Err(CoalgebraError::BadProbability { state, question, value: prob.render() });
                }
                if *next >= states.len() {
                    let (state, question) = ctx();
                    return Err(CoalgebraError::SuccessorOutOfRange { state, question, next: *next });
                }
            }
        }
        Ok(FiniteCoalgebra { mode, questions, states, table })
    }

    pub fn from_fn(
        mode: NumericMode,
        questions: Vec<String>,
        states: Vec<String>,
        mut f: impl FnMut(usize, usize) -> Answer,
    ) -> Result<Self, CoalgebraError> {
        let mut table = Vec::with_capacity(questions.len() * states.len());
        for x in 0..states.len() {
            for q in 0..questions.len() {
                table.push(f(x, q));
            }
        }
        Self::new(mode, questions, states, table)
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    pub fn questions(&self) -> &[String] {
        &self.questions
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn answer(&self, x: usize, q: usize) -> &Answer {
        &self.table[x * self.questions.len() + q]
    }

    pub fn row(&self, x: usize) -> &[Answer] {
        let n = self.questions.len();
        &self.table[x * n..(x + 1) * n]
    }

    pub fn table(&self) -> &[Answer] {
        &self.table
    }

    /// True when at least one cell is a "yes".
    pub fn has_probabilities(&self) -> bool {
        self.table.iter().any(|a| !a.is_no())
    }

    pub fn state_index(&self, id: &str) -> Result<usize, CoalgebraError> {
        self.states.iter().position(|s| s == id).ok_or_else(|| CoalgebraError::UnknownState(id.to_string()))
    }

    pub fn question_index(&self, id: &str) -> Result<usize, CoalgebraError> {
        self.questions.iter().position(|s| s == id).ok_or_else(|| CoalgebraError::UnknownQuestion(id.to_string()))
    }

    /// Same carrier and questions, new table.
    pub(crate) fn with_table(&self, questions: Vec<String>, table: Vec<Answer>) -> Self {
        FiniteCoalgebra { mode: self.mode, questions, states: self.states.clone(), table }
    }

    pub(crate) fn from_parts_unchecked(
        mode: NumericMode,
        questions: Vec<String>,
        states: Vec<String>,
        table: Vec<Answer>,
    ) -> Self {
        FiniteCoalgebra { mode, questions, states, table }
    }
}

pub(crate) fn same_questions(a: &[String], b: &[String]) -> Result<(), CoalgebraError> {
    if a == b {
        Ok(())
    } else {
        Err(CoalgebraError::QuestionMismatch(format!("[{}] vs [{}]", a.join(", "), b.join(", "))))
    }
}

pub(crate) fn check_carrier_map(h: &[usize], dom: usize, cod: usize) -> Result<(), CoalgebraError> {
    if h.len() != dom {
        return Err(CoalgebraError::MapLength { expected: dom, found: h.len() });
    }
    match h.iter().enumerate().find(|(_, &v)| v >= cod) {
        Some((index, &value)) => Err(CoalgebraError::MapOutOfRange { index, value, size: cod }),
        None => Ok(()),
    }
}

/// Checks `F h ∘ α = β ∘ h`: "no" answers are preserved, and "yes" answers
/// keep their probability while successors are mapped through `h`.
pub fn check_homomorphism(
    a: &FiniteCoalgebra,
    b: &FiniteCoalgebra,
    h: &[usize],
    eps: f64,
) -> Result<bool, CoalgebraError> {
    same_questions(a.questions(), b.questions())?;
    check_carrier_map(h, a.len(), b.len())?;
    for (x, &hx) in h.iter().enumerate() {
        for (left, right) in a.row(x).iter().zip(b.row(hx)) {
            let ok = match (left, right) {
                (Answer::No, Answer::No) => true,
                (Answer::Yes { prob: r, next: x2 }, Answer::Yes { prob: s, next: y2 }) => {
                    r.eq_within(s, eps) && h[*x2] == *y2
                }
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `A ⊎ B` together with the two injections.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointUnion {
    pub coalgebra: FiniteCoalgebra,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

fn union_mode(a: &FiniteCoalgebra, b: &FiniteCoalgebra) -> Result<NumericMode, CoalgebraError> {
    match (a.has_probabilities(), b.has_probabilities()) {
        (true, true) if a.mode != b.mode => Err(CoalgebraError::MixedModes(a.mode, b.mode)),
        (false, true) => Ok(b.mode),
        _ => Ok(a.mode),
    }
}

/// Tags states `inl:<id>` and `inr:<id>`; behaviour is inherited.
pub fn disjoint_union(a: &FiniteCoalgebra, b: &FiniteCoalgebra) -> Result<DisjointUnion, CoalgebraError> {
    same_questions(a.questions(), b.questions())?;
    let mode = union_mode(a, b)?;
    let n = a.len();
    let states = a.states.iter().map(|s| format!("inl:{s}")).chain(b.states.iter().map(|s| format!("inr:{s}"))).collect();
    let table = a
        .table
        .iter()
        .cloned()
        .chain(b.table.iter().cloned().map(|ans| ans.map_next(|y| y + n)))
        .collect();
    Ok(DisjointUnion {
        coalgebra: FiniteCoalgebra { mode, questions: a.questions.clone(), states, table },
        left: (0..n).collect(),
        right: (n..n + b.len()).collect(),
    })
}

/// Every "yes" answer leaves the state where it was.
pub fn is_static(a: &FiniteCoalgebra) -> bool {
    let nq = a.questions.len();
    a.table.iter().enumerate().all(|(i, ans)| ans.next().is_none_or(|&next| next == i / nq))
}

/// A coalgebra whose behaviour is computed on demand. Implementations must be
/// deterministic and free of interior mutation so they can be shared.
pub trait ImplicitCoalgebra {
    type State: Clone;

    fn mode(&self) -> NumericMode;

    fn questions(&self) -> &[String];

    fn answer(&self, state: &Self::State, question: usize) -> Answer<Self::State>;

    /// Display id of the `index`-th materialized state.
    fn label(&self, _state: &Self::State, index: usize) -> String {
        format!("s{index}")
    }
}

impl ImplicitCoalgebra for FiniteCoalgebra {
    type State = usize;

    fn mode(&self) -> NumericMode {
        self.mode
    }

    fn questions(&self) -> &[String] {
        &self.questions
    }

    fn answer(&self, state: &usize, question: usize) -> Answer<usize> {
        FiniteCoalgebra::answer(self, *state, question).clone()
    }

    fn label(&self, state: &usize, _index: usize) -> String {
        self.states[*state].clone()
    }
}

/// A "yes" answer at the depth frontier whose successor was not already in
/// the carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontierEscape {
    pub state: usize,
    pub question: usize,
    /// The absorbing stand-in the answer was redirected to.
    pub absorbing: usize,
}

/// Result of [`materialize`]. Carrier indices `0..reachable` are the states
/// reached within the depth bound; the remaining ones are absorbing
/// stand-ins for escaped successors and answer "no" to every question.
#[derive(Debug, Clone)]
pub struct Materialized<S> {
    pub coalgebra: FiniteCoalgebra,
    /// Representative per carrier state (the escaped successor itself for
    /// absorbing states).
    pub states: Vec<S>,
    /// Breadth-first depth of each reachable state; absorbing states carry
    /// `depth + 1`.
    pub depths: Vec<usize>,
    pub reachable: usize,
    pub frontier: Vec<FrontierEscape>,
}

impl<S> Materialized<S> {
    pub fn is_absorbing(&self, x: usize) -> bool {
        x >= self.reachable
    }

    /// Index of the first carrier state matching `state`, searching either
    /// the reachable part or the absorbing part.
    pub fn find(&self, state: &S, absorbing: bool, same: impl Fn(&S, &S) -> bool) -> Option<usize> {
        let range = if absorbing { self.reachable..self.states.len() } else { 0..self.reachable };
        range.into_iter().find(|&i| same(&self.states[i], state))
    }
}

/// Closes `seeds` under "yes" successors for at most `depth` steps,
/// identifying states with `same`. Successors escaping from the last layer
/// are redirected to absorbing all-"no" copies and listed in the frontier
/// report.
pub fn materialize<C: ImplicitCoalgebra>(
    a: &C,
    seeds: &[C::State],
    depth: usize,
    same: impl Fn(&C::State, &C::State) -> bool,
    cap: usize,
) -> Result<Materialized<C::State>, CoalgebraError> {
    let nq = a.questions().len();
    let mut states: Vec<C::State> = Vec::new();
    let mut depths = Vec::new();
    for s in seeds {
        if !states.iter().any(|t| same(t, s)) {
            states.push(s.clone());
            depths.push(0);
        }
    }
    if states.len() > cap {
        return Err(CoalgebraError::StateExplosion { count: states.len(), cap });
    }
    enum Slot {
        Carrier(usize),
        Absorbing(usize),
    }
    let mut rows: Vec<Vec<Answer<Slot>>> = Vec::new();
    let mut absorbing: Vec<C::State> = Vec::new();
    let mut escapes = Vec::new();
    let mut layer_start = 0;
    for k in 0..=depth {
        let layer_end = states.len();
        if layer_start == layer_end {
            break;
        }
        for x in layer_start..layer_end {
            let mut row = Vec::with_capacity(nq);
            for q in 0..nq {
                let cell = match a.answer(&states[x], q) {
                    Answer::No => Answer::No,
                    Answer::Yes { prob, next } => {
                        let slot = match states.iter().position(|t| same(t, &next)) {
                            Some(i) => Slot::Carrier(i),
                            None if k < depth => {
                                states.push(next);
                                depths.push(k + 1);
                                if states.len() > cap {
                                    return Err(CoalgebraError::StateExplosion { count: states.len(), cap });
                                }
                                Slot::Carrier(states.len() - 1)
                            }
                            None => {
                                let j = match absorbing.iter().position(|t| same(t, &next)) {
                                    Some(j) => j,
                                    None => {
                                        absorbing.push(next);
                                        if states.len() + absorbing.len() > cap {
                                            return Err(CoalgebraError::StateExplosion {
                                                count: states.len() + absorbing.len(),
                                                cap,
                                            });
                                        }
                                        absorbing.len() - 1
                                    }
                                };
                                escapes.push((x, q, j));
                                Slot::Absorbing(j)
                            }
                        };
                        Answer::Yes { prob, next: slot }
                    }
                };
                row.push(cell);
            }
            rows.push(row);
        }
        layer_start = layer_end;
    }
    // Only states of the final layer can escape, so the reachable part is
    // complete here.
    let reachable = states.len();
    debug_assert_eq!(rows.len(), reachable);
    let resolve = |slot: Slot| match slot {
        Slot::Carrier(i) => i,
        Slot::Absorbing(j) => reachable + j,
    };
    let mut labels: Vec<String> = states.iter().enumerate().map(|(i, s)| a.label(s, i)).collect();
    for (j, s) in absorbing.iter().enumerate() {
        labels.push(format!("absorb:{}", a.label(s, reachable + j)));
    }
    let mut table = Vec::with_capacity((reachable + absorbing.len()) * nq);
    for row in rows {
        table.extend(row.into_iter().map(|c| c.map_next(resolve)));
    }
    table.extend(std::iter::repeat_n(Answer::No, absorbing.len() * nq));
    let frontier =
        escapes.into_iter().map(|(state, question, j)| FrontierEscape { state, question, absorbing: reachable + j }).collect();
    depths.extend(std::iter::repeat_n(depth + 1, absorbing.len()));
    states.extend(absorbing);
    let coalgebra = FiniteCoalgebra::new(a.mode(), a.questions().to_vec(), labels, table)?;
    Ok(Materialized { coalgebra, states, depths, reachable, frontier })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn q(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("q{i}")).collect()
    }

    fn s(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn yes(n: i64, d: i64, next: usize) -> Answer {
        Answer::yes(Value::ratio(n, d), next)
    }

    #[test]
    fn identity_is_a_homomorphism() {
        let a = FiniteCoalgebra::new(
            NumericMode::Rational,
            q(2),
            s(2),
            vec![yes(1, 2, 1), Answer::No, Answer::No, yes(1, 1, 1)],
        )
        .unwrap();
        assert!(check_homomorphism(&a, &a, &[0, 1], 0.0).unwrap());
    }

    #[test]
    fn probability_clash_blocks_constant_map() {
        let a = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(2), vec![yes(1, 2, 0), yes(1, 3, 1)]).unwrap();
        let b = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(1), vec![yes(1, 2, 0)]).unwrap();
        assert!(!check_homomorphism(&a, &b, &[0, 0], 0.0).unwrap());
    }

    #[test]
    fn question_mismatch_is_an_error() {
        let a = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(1), vec![Answer::No]).unwrap();
        let b = FiniteCoalgebra::new(NumericMode::Rational, q(2), s(1), vec![Answer::No, Answer::No]).unwrap();
        assert!(matches!(check_homomorphism(&a, &b, &[0], 0.0), Err(CoalgebraError::QuestionMismatch(_))));
        assert!(matches!(disjoint_union(&a, &b), Err(CoalgebraError::QuestionMismatch(_))));
    }

    #[test]
    fn table_validation() {
        let bad = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(1), vec![yes(3, 2, 0)]);
        assert!(matches!(bad, Err(CoalgebraError::BadProbability { .. })));
        let bad = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(1), vec![yes(0, 1, 0)]);
        assert!(matches!(bad, Err(CoalgebraError::BadProbability { .. })));
        let bad = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(1), vec![yes(1, 2, 4)]);
        assert!(matches!(bad, Err(CoalgebraError::SuccessorOutOfRange { next: 4, .. })));
        let bad = FiniteCoalgebra::new(NumericMode::Float, q(1), s(1), vec![yes(1, 2, 0)]);
        assert!(matches!(bad, Err(CoalgebraError::ModeMismatch { .. })));
    }

    #[test]
    fn union_with_empty() {
        let a = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(2), vec![yes(1, 2, 1), Answer::No]).unwrap();
        let e = FiniteCoalgebra::new(NumericMode::Rational, q(1), vec![], vec![]).unwrap();
        let u = disjoint_union(&a, &e).unwrap();
        assert_eq!(u.coalgebra.len(), 2);
        assert_eq!(u.coalgebra.table(), a.table());
        assert_eq!(u.coalgebra.states()[0], "inl:x0");
    }

    #[test]
    fn static_detection() {
        let all_no = FiniteCoalgebra::new(NumericMode::Rational, q(2), s(1), vec![Answer::No, Answer::No]).unwrap();
        assert!(is_static(&all_no));
        let looped = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(1), vec![yes(1, 2, 0)]).unwrap();
        assert!(is_static(&looped));
        let moving = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(2), vec![yes(1, 2, 1), Answer::No]).unwrap();
        assert!(!is_static(&moving));
    }

    #[test]
    fn materialize_depth_zero_keeps_deduplicated_seeds() {
        let a = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(3), vec![yes(1, 2, 1), yes(1, 2, 2), Answer::No])
            .unwrap();
        let m = materialize(&a, &[0, 0], 0, |x, y| x == y, 100).unwrap();
        assert_eq!(m.reachable, 1);
        assert_eq!(m.frontier.len(), 1);
        assert_eq!(m.coalgebra.len(), 2);
        assert!(m.coalgebra.row(1).iter().all(Answer::is_no));
        assert_eq!(m.coalgebra.answer(0, 0), &yes(1, 2, 1));
    }

    #[test]
    fn materialize_static_stays_on_seeds() {
        let a = FiniteCoalgebra::new(NumericMode::Rational, q(2), s(2), vec![yes(1, 2, 0), Answer::No, Answer::No, yes(1, 1, 1)])
            .unwrap();
        for d in 0..4 {
            let m = materialize(&a, &[1], d, |x, y| x == y, 100).unwrap();
            assert_eq!(m.states, vec![1]);
            assert!(m.frontier.is_empty());
        }
    }

    #[test]
    fn materialize_is_monotone_in_depth() {
        let a = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(4), vec![yes(1, 2, 1), yes(1, 2, 2), yes(1, 2, 3), Answer::No])
            .unwrap();
        let mut prev: Vec<usize> = Vec::new();
        for d in 0..5 {
            let m = materialize(&a, &[0], d, |x, y| x == y, 100).unwrap();
            let reach = m.states[..m.reachable].to_vec();
            assert!(reach.starts_with(&prev));
            prev = reach;
        }
        assert_eq!(prev, vec![0, 1, 2, 3]);
    }

    #[test]
    fn materialize_cap() {
        let a = FiniteCoalgebra::new(NumericMode::Rational, q(1), s(3), vec![yes(1, 2, 1), yes(1, 2, 2), Answer::No])
            .unwrap();
        assert_eq!(
            materialize(&a, &[0], 3, |x, y| x == y, 2).unwrap_err(),
            CoalgebraError::StateExplosion { count: 3, cap: 2 }
        );
    }
}
