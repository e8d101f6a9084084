//! Reindexing along question maps, the Grothendieck category of the
//! question-indexed coalgebra categories, its Chu analogue, the truncation
//! functor and the static embedding.
//!
//! A question map `f : Q' → Q` acts contravariantly: coalgebras and Chu
//! spaces over `Q` are pulled back to `Q'` by precomposing with `f`. A
//! Grothendieck morphism `(A over Q) → (B over Q')` is such an `f` together
//! with a carrier map `h` that is a homomorphism `f*(A) → B`. It is stored
//! as a forward carrier map plus a backward question map, the same layout
//! as a [`ChuMorphism`], so the bridge between the two is a relabelling.

use thiserror::Error;

use crate::chu::{check_chu_morphism, check_index_map, ChuError, ChuMorphism, ChuSpace};
use crate::coalgebra::{check_homomorphism, Answer, CoalgebraError, FiniteCoalgebra};
use crate::value::{Value, ValueAlphabet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexedError {
    #[error(transparent)]
    Coalgebra(#[from] CoalgebraError),
    #[error(transparent)]
    Chu(#[from] ChuError),
    #[error("question map: {0}")]
    BadQuestionMap(String),
    #[error("question map targets [{expected}] but the object is indexed by [{found}]")]
    TargetMismatch { expected: String, found: String },
    #[error("static embedding needs a numeric alphabet, found {0}")]
    NonNumericAlphabet(&'static str),
    #[error("morphisms are not composable: {0}")]
    NotComposable(String),
}

/// A total map `f : Q' → Q` between question sequences, by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionMap {
    source: Vec<String>,
    target: Vec<String>,
    map: Vec<usize>,
    surjective: bool,
}

impl QuestionMap {
    pub fn new(source: Vec<String>, target: Vec<String>, map: Vec<usize>) -> Result<Self, IndexedError> {
        if map.len() != source.len() {
            return Err(IndexedError::BadQuestionMap(format!(
                "{} images for {} source questions",
                map.len(),
                source.len()
            )));
        }
        if let Some((i, &j)) = map.iter().enumerate().find(|(_, &j)| j >= target.len()) {
            return Err(IndexedError::BadQuestionMap(format!(
                "`{}` maps to index {j}, target has {} questions",
                source[i],
                target.len()
            )));
        }
        let mut hit = vec![false; target.len()];
        for &j in &map {
            hit[j] = true;
        }
        let surjective = hit.into_iter().all(|h| h);
        Ok(QuestionMap { source, target, map, surjective })
    }

    pub fn identity(questions: &[String]) -> Self {
        QuestionMap {
            source: questions.to_vec(),
            target: questions.to_vec(),
            map: (0..questions.len()).collect(),
            surjective: true,
        }
    }

    /// Builds the map from `(source id, target id)` pairs.
    pub fn from_pairs(
        source: Vec<String>,
        target: Vec<String>,
        pairs: &[(String, String)],
    ) -> Result<Self, IndexedError> {
        let mut map = vec![usize::MAX; source.len()];
        for (from, to) in pairs {
            let i = source
                .iter()
                .position(|q| q == from)
                .ok_or_else(|| IndexedError::BadQuestionMap(format!("unknown source question `{from}`")))?;
            let j = target
                .iter()
                .position(|q| q == to)
                .ok_or_else(|| IndexedError::BadQuestionMap(format!("unknown target question `{to}`")))?;
            if map[i] != usize::MAX && map[i] != j {
                return Err(IndexedError::BadQuestionMap(format!("`{from}` is mapped twice")));
            }
            map[i] = j;
        }
        if let Some(i) = map.iter().position(|&j| j == usize::MAX) {
            return Err(IndexedError::BadQuestionMap(format!("`{}` is unmapped", source[i])));
        }
        Self::new(source, target, map)
    }

    pub fn source(&self) -> &[String] {
        &self.source
    }

    pub fn target(&self) -> &[String] {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, q: usize) -> usize {
        self.map[q]
    }

    /// Computed once at construction.
    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        self.map.iter().enumerate().map(|(i, &j)| (self.source[i].clone(), self.target[j].clone())).collect()
    }

    /// `self ∘ inner`, where `inner : Q'' → Q'` and `self : Q' → Q`.
    pub fn after(&self, inner: &QuestionMap) -> Result<QuestionMap, IndexedError> {
        if inner.target != self.source {
            return Err(IndexedError::NotComposable(format!(
                "inner map lands in [{}], outer map starts from [{}]",
                inner.target.join(", "),
                self.source.join(", ")
            )));
        }
        Self::new(inner.source.clone(), self.target.clone(), inner.map.iter().map(|&j| self.map[j]).collect())
    }
}

fn expect_target(f: &QuestionMap, found: &[String]) -> Result<(), IndexedError> {
    if f.target() == found {
        Ok(())
    } else {
        Err(IndexedError::TargetMismatch { expected: f.target().join(", "), found: found.join(", ") })
    }
}

/// `f*(X, α) = (X, α')` with `α'(x)(q') = α(x)(f(q'))`.
pub fn reindex_coalgebra(f: &QuestionMap, a: &FiniteCoalgebra) -> Result<FiniteCoalgebra, IndexedError> {
    expect_target(f, a.questions())?;
    let table = (0..a.len()).flat_map(|x| f.map().iter().map(move |&q| a.answer(x, q).clone())).collect();
    Ok(a.with_table(f.source().to_vec(), table))
}

/// `(X, Q, e) ↦ (X, Q', e ∘ (1 × f))`.
pub fn reindex_chu(f: &QuestionMap, c: &ChuSpace) -> Result<ChuSpace, IndexedError> {
    expect_target(f, c.attributes())?;
    Ok(ChuSpace::from_fn(c.alphabet().clone(), c.points().to_vec(), f.source().to_vec(), |x, q| {
        c.eval(x, f.apply(q)).clone()
    })?)
}

/// Forgets successors: `e(x, q)` is 0 on "no" and the probability on "yes".
pub fn truncate(a: &FiniteCoalgebra) -> ChuSpace {
    let zero = Value::zero(a.mode());
    ChuSpace::from_fn(ValueAlphabet::numeric(a.mode()), a.states().to_vec(), a.questions().to_vec(), |x, q| {
        a.answer(x, q).prob().cloned().unwrap_or_else(|| zero.clone())
    })
    .expect("answer probabilities lie in the unit interval")
}

/// The Chu morphism `(h, id_Q)` a coalgebra homomorphism truncates to.
pub fn truncate_homomorphism(h: &[usize], questions: usize) -> ChuMorphism {
    ChuMorphism::new(h.to_vec(), (0..questions).collect())
}

/// Static coalgebra of a `[0, 1]`-valued Chu space: zero entries answer "no",
/// positive entries answer "yes" and stay put.
pub fn static_embed(c: &ChuSpace) -> Result<FiniteCoalgebra, IndexedError> {
    let mode = c.alphabet().mode().ok_or(IndexedError::NonNumericAlphabet(c.alphabet().name()))?;
    Ok(FiniteCoalgebra::from_fn(mode, c.attributes().to_vec(), c.points().to_vec(), |x, q| {
        let v = c.eval(x, q);
        if v.is_zero() {
            Answer::No
        } else {
            Answer::yes(v.clone(), x)
        }
    })?)
}

/// An arrow of the Grothendieck category: backward question map
/// `f : Q' → Q` and forward carrier map `h : X → Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrothMorphism {
    pub qmap: QuestionMap,
    pub carrier: Vec<usize>,
}

impl GrothMorphism {
    pub fn identity(questions: &[String], carrier: usize) -> Self {
        GrothMorphism { qmap: QuestionMap::identity(questions), carrier: (0..carrier).collect() }
    }
}

/// `(f, h) : (Q, A) → (Q', B)` is valid when `h` is a homomorphism
/// `f*(A) → B`.
pub fn groth_check(
    m: &GrothMorphism,
    source: &FiniteCoalgebra,
    target: &FiniteCoalgebra,
    eps: f64,
) -> Result<bool, IndexedError> {
    expect_target(&m.qmap, source.questions())?;
    if m.qmap.source() != target.questions() {
        return Err(IndexedError::TargetMismatch {
            expected: m.qmap.source().join(", "),
            found: target.questions().join(", "),
        });
    }
    let pulled = reindex_coalgebra(&m.qmap, source)?;
    Ok(check_homomorphism(&pulled, target, &m.carrier, eps)?)
}

/// Chu analogue of [`groth_check`]: `e(x, f(q')) = e'(h(x), q')`.
pub fn groth_check_chu(m: &GrothMorphism, source: &ChuSpace, target: &ChuSpace, eps: f64) -> Result<bool, IndexedError> {
    expect_target(&m.qmap, source.attributes())?;
    if m.qmap.source() != target.attributes() {
        return Err(IndexedError::TargetMismatch {
            expected: m.qmap.source().join(", "),
            found: target.attributes().join(", "),
        });
    }
    Ok(check_chu_morphism(source, target, &groth_to_chu(m), eps)?)
}

/// `second ∘ first`: question maps compose contravariantly, carrier maps
/// covariantly.
pub fn groth_compose(second: &GrothMorphism, first: &GrothMorphism) -> Result<GrothMorphism, IndexedError> {
    let qmap = first.qmap.after(&second.qmap)?;
    if let Some(&y) = first.carrier.iter().find(|&&y| y >= second.carrier.len()) {
        return Err(IndexedError::NotComposable(format!(
            "first carrier map reaches state {y}, second is defined on {} states",
            second.carrier.len()
        )));
    }
    Ok(GrothMorphism { qmap, carrier: first.carrier.iter().map(|&y| second.carrier[y]).collect() })
}

/// A Chu morphism `(f_*, f^*) : (X, A, e) → (X', A', e')` as the
/// Grothendieck arrow `(f^*, f_*)`.
pub fn chu_to_groth(source: &ChuSpace, target: &ChuSpace, m: &ChuMorphism) -> Result<GrothMorphism, IndexedError> {
    check_index_map("forward", &m.forward, source.num_points(), target.num_points())?;
    let qmap = QuestionMap::new(target.attributes().to_vec(), source.attributes().to_vec(), m.backward.clone())?;
    Ok(GrothMorphism { qmap, carrier: m.forward.clone() })
}

/// Inverse of [`chu_to_groth`].
pub fn groth_to_chu(m: &GrothMorphism) -> ChuMorphism {
    ChuMorphism::new(m.carrier.clone(), m.qmap.map().to_vec())
}

/// The functor `∫T` on arrows. Truncation is the identity on carrier maps
/// and the question map becomes the backward attribute map, so the result
/// is a Chu morphism `T(A) → T(B)`.
pub fn integral_truncate(m: &GrothMorphism) -> ChuMorphism {
    groth_to_chu(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::is_static;
    use crate::value::NumericMode;

    fn ids(p: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{p}{i}")).collect()
    }

    fn sample() -> FiniteCoalgebra {
        FiniteCoalgebra::new(
            NumericMode::Rational,
            ids("q", 2),
            ids("x", 2),
            vec![Answer::yes(Value::ratio(1, 2), 1), Answer::No, Answer::No, Answer::yes(Value::ratio(1, 3), 0)],
        )
        .unwrap()
    }

    #[test]
    fn identity_reindexing() {
        let a = sample();
        assert_eq!(reindex_coalgebra(&QuestionMap::identity(a.questions()), &a).unwrap(), a);
        let c = truncate(&a);
        assert_eq!(reindex_chu(&QuestionMap::identity(c.attributes()), &c).unwrap(), c);
    }

    #[test]
    fn constant_map_copies_one_column() {
        let a = sample();
        let f = QuestionMap::new(ids("p", 3), a.questions().to_vec(), vec![1, 1, 1]).unwrap();
        assert!(!f.is_surjective());
        let b = reindex_coalgebra(&f, &a).unwrap();
        for x in 0..2 {
            for q in 0..3 {
                assert_eq!(b.answer(x, q), a.answer(x, 1));
            }
        }
    }

    #[test]
    fn target_mismatch() {
        let a = sample();
        let f = QuestionMap::identity(&ids("z", 2));
        assert!(matches!(reindex_coalgebra(&f, &a), Err(IndexedError::TargetMismatch { .. })));
    }

    #[test]
    fn question_map_validation() {
        assert!(QuestionMap::new(ids("a", 2), ids("b", 1), vec![0, 1]).is_err());
        assert!(QuestionMap::new(ids("a", 2), ids("b", 1), vec![0]).is_err());
        let f = QuestionMap::from_pairs(ids("a", 2), ids("b", 2), &[("a0".into(), "b1".into()), ("a1".into(), "b0".into())])
            .unwrap();
        assert!(f.is_surjective());
        assert!(QuestionMap::from_pairs(ids("a", 2), ids("b", 2), &[("a0".into(), "b1".into())]).is_err());
    }

    #[test]
    fn all_no_truncates_to_zeros() {
        let a = FiniteCoalgebra::new(NumericMode::Rational, ids("q", 2), ids("x", 1), vec![Answer::No, Answer::No]).unwrap();
        assert!(truncate(&a).table().iter().all(Value::is_zero));
    }

    #[test]
    fn static_embedding_of_extremes() {
        let zeros = ChuSpace::from_fn(ValueAlphabet::RationalUnit, ids("x", 2), ids("q", 2), |_, _| Value::ratio(0, 1))
            .unwrap();
        let e = static_embed(&zeros).unwrap();
        assert!(e.table().iter().all(Answer::is_no));
        let ones = ChuSpace::from_fn(ValueAlphabet::FloatUnit, ids("x", 2), ids("q", 2), |_, _| Value::Float(1.0)).unwrap();
        let e = static_embed(&ones).unwrap();
        assert!(is_static(&e));
        assert_eq!(e.answer(1, 0), &Answer::yes(Value::Float(1.0), 1));
        assert_eq!(truncate(&e), ones);
        let symbols = ChuSpace::from_fn(ValueAlphabet::boolean(), ids("x", 1), ids("q", 1), |_, _| Value::Symbol(0)).unwrap();
        assert!(matches!(static_embed(&symbols), Err(IndexedError::NonNumericAlphabet(_))));
    }

    #[test]
    fn identity_groth_morphism() {
        let a = sample();
        let id = GrothMorphism::identity(a.questions(), a.len());
        assert!(groth_check(&id, &a, &a, 0.0).unwrap());
        let c = truncate(&a);
        assert!(groth_check_chu(&id, &c, &c, 0.0).unwrap());
        assert_eq!(groth_compose(&id, &id).unwrap(), id);
        assert_eq!(chu_to_groth(&c, &c, &ChuMorphism::identity(&c)).unwrap(), id);
    }

    #[test]
    fn swapping_questions_and_states() {
        // b is a with both questions and states swapped.
        let a = sample();
        let b = FiniteCoalgebra::new(
            NumericMode::Rational,
            ids("p", 2),
            ids("y", 2),
            vec![Answer::yes(Value::ratio(1, 3), 1), Answer::No, Answer::No, Answer::yes(Value::ratio(1, 2), 0)],
        )
        .unwrap();
        let f = QuestionMap::new(ids("p", 2), ids("q", 2), vec![1, 0]).unwrap();
        let m = GrothMorphism { qmap: f, carrier: vec![1, 0] };
        assert!(groth_check(&m, &a, &b, 0.0).unwrap());
        assert!(groth_check_chu(&m, &truncate(&a), &truncate(&b), 0.0).unwrap());
        let wrong = GrothMorphism { carrier: vec![0, 1], ..m };
        assert!(!groth_check(&wrong, &a, &b, 0.0).unwrap());
    }
}
