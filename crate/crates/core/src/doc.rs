//! JSON documents for every input and output kind.
//!
//! Each document is an object whose `kind` field is one of `chu`,
//! `coalgebra`, `morphism`, `quantum` or `questionmap`. Rationals are
//! written as `"p/q"` strings, floats as JSON numbers and complex numbers as
//! `[re, im]`. The format is described in `docs/FORMAT.md`.

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chu::{ChuError, ChuMorphism, ChuSpace};
use crate::coalgebra::{Answer, CoalgebraError, FiniteCoalgebra};
use crate::indexed::{IndexedError, QuestionMap};
use crate::quantum::{c, CMatrix, CVector, HilbertSystem, QuantumError, Ray, RayMap, Semiunitary, StateVector, Subspace};
use crate::value::{parse_rational, NumericMode, Value, ValueAlphabet, ValueError};

#[derive(Debug, Error)]
pub enum DocError {
    /// Malformed JSON or a field of the wrong shape; the message carries
    /// the line and column.
    #[error("{0}")]
    Syntax(#[from] serde_json::Error),
    #[error("expected a `{expected}` document, found `{found}`")]
    WrongKind { expected: &'static str, found: String },
    #[error("unknown document kind `{0}`")]
    UnknownKind(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Chu(#[from] ChuError),
    #[error(transparent)]
    Coalgebra(#[from] CoalgebraError),
    #[error(transparent)]
    Indexed(#[from] IndexedError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// A parsed document of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Chu(ChuDoc),
    Coalgebra(CoalgebraDoc),
    Morphism(MorphismDoc),
    Quantum(QuantumDoc),
    QuestionMap(QuestionMapDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Chu(_) => "chu",
            Document::Coalgebra(_) => "coalgebra",
            Document::Morphism(_) => "morphism",
            Document::Quantum(_) => "quantum",
            Document::QuestionMap(_) => "questionmap",
        }
    }

    pub fn to_json(&self) -> String {
        let s = match self {
            Document::Chu(d) => serde_json::to_string_pretty(d),
            Document::Coalgebra(d) => serde_json::to_string_pretty(d),
            Document::Morphism(d) => serde_json::to_string_pretty(d),
            Document::Quantum(d) => serde_json::to_string_pretty(d),
            Document::QuestionMap(d) => serde_json::to_string_pretty(d),
        };
        s.expect("documents always serialize")
    }
}

#[derive(Deserialize)]
struct Header {
    kind: String,
}

/// Parses a document, dispatching on its `kind` field. Errors inside the
/// body are reported with positions relative to the whole text.
pub fn parse_document(text: &str) -> Result<Document, DocError> {
    let header: Header = serde_json::from_str(text)?;
    Ok(match header.kind.as_str() {
        "chu" => Document::Chu(serde_json::from_str(text)?),
        "coalgebra" => Document::Coalgebra(serde_json::from_str(text)?),
        "morphism" => Document::Morphism(serde_json::from_str(text)?),
        "quantum" => Document::Quantum(serde_json::from_str(text)?),
        "questionmap" => Document::QuestionMap(serde_json::from_str(text)?),
        other => return Err(DocError::UnknownKind(other.to_string())),
    })
}

macro_rules! kind_field {
    ($name:ident, $lit:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
        pub struct $name;

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str($lit)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                if s == $lit {
                    Ok($name)
                } else {
                    Err(de::Error::custom(format!("expected kind `{}`, found `{s}`", $lit)))
                }
            }
        }
    };
}

kind_field!(ChuKind, "chu");
kind_field!(CoalgebraKind, "coalgebra");
kind_field!(MorphismKind, "morphism");
kind_field!(QuantumKind, "quantum");
kind_field!(QuestionMapKind, "questionmap");

/// `{"kind": "symbols", "elements": [..]}`, `{"kind": "rational"}` or
/// `{"kind": "float"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AlphabetDoc {
    Symbols { elements: Vec<String> },
    Rational,
    Float,
}

impl AlphabetDoc {
    pub fn of(a: &ValueAlphabet) -> Self {
        match a {
            ValueAlphabet::Symbols(els) => AlphabetDoc::Symbols { elements: els.to_vec() },
            ValueAlphabet::RationalUnit => AlphabetDoc::Rational,
            ValueAlphabet::FloatUnit => AlphabetDoc::Float,
        }
    }

    pub fn to_alphabet(&self) -> Result<ValueAlphabet, DocError> {
        Ok(match self {
            AlphabetDoc::Symbols { elements } => ValueAlphabet::symbols(elements.clone())?,
            AlphabetDoc::Rational => ValueAlphabet::RationalUnit,
            AlphabetDoc::Float => ValueAlphabet::FloatUnit,
        })
    }
}

/// A table cell: a symbol name or `"p/q"` string, or a float.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellDoc {
    Text(String),
    Number(f64),
}

impl CellDoc {
    fn of(alphabet: &ValueAlphabet, v: &Value) -> Self {
        match v {
            Value::Symbol(_) => CellDoc::Text(alphabet.symbol_name(v).unwrap_or("?").to_string()),
            Value::Rational(r) => CellDoc::Text(r.to_string()),
            Value::Float(x) => CellDoc::Number(*x),
        }
    }

    fn to_value(&self, alphabet: &ValueAlphabet) -> Result<Value, ValueError> {
        let v = match (alphabet, self) {
            (ValueAlphabet::Symbols(_), CellDoc::Text(s)) => alphabet.symbol(s)?,
            (ValueAlphabet::RationalUnit, CellDoc::Text(s)) => Value::Rational(parse_rational(s)?),
            (ValueAlphabet::FloatUnit, CellDoc::Number(x)) => Value::Float(*x),
            (_, CellDoc::Text(s)) => return Err(ValueError::WrongKind { value: s.clone(), alphabet: alphabet.name() }),
            (_, CellDoc::Number(x)) => {
                return Err(ValueError::WrongKind { value: x.to_string(), alphabet: alphabet.name() })
            }
        };
        alphabet.check(&v)?;
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChuDoc {
    pub kind: ChuKind,
    pub alphabet: AlphabetDoc,
    pub points: Vec<String>,
    pub attributes: Vec<String>,
    /// One row per point.
    pub table: Vec<Vec<CellDoc>>,
}

impl ChuDoc {
    pub fn of(c: &ChuSpace) -> Self {
        ChuDoc {
            kind: ChuKind,
            alphabet: AlphabetDoc::of(c.alphabet()),
            points: c.points().to_vec(),
            attributes: c.attributes().to_vec(),
            table: (0..c.num_points()).map(|x| c.row(x).iter().map(|v| CellDoc::of(c.alphabet(), v)).collect()).collect(),
        }
    }

    pub fn to_space(&self) -> Result<ChuSpace, DocError> {
        let alphabet = self.alphabet.to_alphabet()?;
        check_rows(&self.table, self.points.len(), self.attributes.len(), "points", "attributes")?;
        let mut eval = Vec::with_capacity(self.points.len() * self.attributes.len());
        for (x, row) in self.table.iter().enumerate() {
            for (a, cell) in row.iter().enumerate() {
                eval.push(cell.to_value(&alphabet).map_err(|e| {
                    DocError::Invalid(format!("entry ({}, {}): {e}", self.points[x], self.attributes[a]))
                })?);
            }
        }
        Ok(ChuSpace::new(alphabet, self.points.clone(), self.attributes.clone(), eval)?)
    }
}

fn check_rows<T>(table: &[Vec<T>], rows: usize, cols: usize, row_name: &str, col_name: &str) -> Result<(), DocError> {
    if table.len() != rows {
        return Err(DocError::Invalid(format!("table has {} rows for {rows} {row_name}", table.len())));
    }
    if let Some((i, r)) = table.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(DocError::Invalid(format!("table row {i} has {} entries for {cols} {col_name}", r.len())));
    }
    Ok(())
}

/// An answer probability, range-checked to `(0, 1]` while parsing.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDoc(pub Value);

impl Serialize for ProbDoc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.0 {
            Value::Rational(r) => s.serialize_str(&r.to_string()),
            Value::Float(x) => s.serialize_f64(*x),
            Value::Symbol(i) => s.serialize_str(&format!("#{i}")),
        }
    }
}

impl<'de> Deserialize<'de> for ProbDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = match CellDoc::deserialize(d)? {
            CellDoc::Text(s) => Value::Rational(parse_rational(&s).map_err(de::Error::custom)?),
            CellDoc::Number(x) => Value::Float(x),
        };
        if !v.is_answer_probability() {
            return Err(de::Error::custom(format!("probability {v} is outside (0, 1]")));
        }
        Ok(ProbDoc(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalgebraDoc {
    pub kind: CoalgebraKind,
    pub mode: NumericMode,
    pub questions: Vec<String>,
    pub states: Vec<String>,
    /// One row per state; `null` is "no", `[prob, next]` is "yes".
    pub table: Vec<Vec<Option<(ProbDoc, String)>>>,
}

impl CoalgebraDoc {
    pub fn of(a: &FiniteCoalgebra) -> Self {
        CoalgebraDoc {
            kind: CoalgebraKind,
            mode: a.mode(),
            questions: a.questions().to_vec(),
            states: a.states().to_vec(),
            table: (0..a.len())
                .map(|x| {
                    a.row(x)
                        .iter()
                        .map(|ans| match ans {
                            Answer::No => None,
                            Answer::Yes { prob, next } => Some((ProbDoc(prob.clone()), a.states()[*next].clone())),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_coalgebra(&self) -> Result<FiniteCoalgebra, DocError> {
        check_rows(&self.table, self.states.len(), self.questions.len(), "states", "questions")?;
        let mut table = Vec::with_capacity(self.states.len() * self.questions.len());
        for (x, row) in self.table.iter().enumerate() {
            for (q, cell) in row.iter().enumerate() {
                table.push(match cell {
                    None => Answer::No,
                    Some((p, next)) => {
                        let y = self.states.iter().position(|s| s == next).ok_or_else(|| {
                            DocError::Invalid(format!(
                                "entry ({}, {}): unknown successor `{next}`",
                                self.states[x], self.questions[q]
                            ))
                        })?;
                        Answer::yes(p.0.clone(), y)
                    }
                });
            }
        }
        Ok(FiniteCoalgebra::new(self.mode, self.questions.clone(), self.states.clone(), table)?)
    }
}

/// A Chu morphism (`forward` on points, `backward` on attributes), a
/// coalgebra homomorphism (`forward` only) or a Grothendieck arrow
/// (`forward` on states, `backward` on questions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub kind: MorphismKind,
    pub forward: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backward: Option<Vec<(String, String)>>,
}

impl MorphismDoc {
    pub fn new(forward: Vec<(String, String)>, backward: Option<Vec<(String, String)>>) -> Self {
        MorphismDoc { kind: MorphismKind, forward, backward }
    }

    pub fn to_chu_morphism(&self, source: &ChuSpace, target: &ChuSpace) -> Result<ChuMorphism, DocError> {
        let backward = self.backward.as_ref().ok_or_else(|| DocError::Invalid("Chu morphism needs `backward`".into()))?;
        Ok(ChuMorphism::from_ids(source, target, &self.forward, backward)?)
    }

    /// Resolves `forward` against two carriers given as id lists.
    pub fn carrier_map(&self, source: &[String], target: &[String]) -> Result<Vec<usize>, DocError> {
        resolve_pairs(&self.forward, source, target, "forward")
    }
}

pub(crate) fn resolve_pairs(
    pairs: &[(String, String)],
    source: &[String],
    target: &[String],
    what: &str,
) -> Result<Vec<usize>, DocError> {
    let mut map = vec![None; source.len()];
    for (from, to) in pairs {
        let i = source
            .iter()
            .position(|s| s == from)
            .ok_or_else(|| DocError::Invalid(format!("{what}: unknown source id `{from}`")))?;
        let j = target
            .iter()
            .position(|s| s == to)
            .ok_or_else(|| DocError::Invalid(format!("{what}: unknown target id `{to}`")))?;
        if map[i].is_some_and(|k| k != j) {
            return Err(DocError::Invalid(format!("{what}: `{from}` is mapped twice")));
        }
        map[i] = Some(j);
    }
    map.iter()
        .enumerate()
        .map(|(i, m)| m.ok_or_else(|| DocError::Invalid(format!("{what}: `{}` is unmapped", source[i]))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionMapDoc {
    pub kind: QuestionMapKind,
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub pairs: Vec<(String, String)>,
}

impl QuestionMapDoc {
    pub fn of(f: &QuestionMap) -> Self {
        QuestionMapDoc { kind: QuestionMapKind, source: f.source().to_vec(), target: f.target().to_vec(), pairs: f.pairs() }
    }

    pub fn to_map(&self) -> Result<QuestionMap, DocError> {
        Ok(QuestionMap::from_pairs(self.source.clone(), self.target.clone(), &self.pairs)?)
    }
}

pub type ComplexDoc = [f64; 2];

fn vector_doc(v: &CVector) -> Vec<ComplexDoc> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn vector_of(v: &[ComplexDoc]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|z| c(z[0], z[1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub id: String,
    pub amplitudes: Vec<ComplexDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionDoc {
    pub id: String,
    /// Spanning vectors; orthonormalized on load unless already orthonormal.
    pub basis: Vec<Vec<ComplexDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiunitaryDoc {
    /// Row-major.
    pub matrix: Vec<Vec<ComplexDoc>>,
    #[serde(default)]
    pub antiunitary: bool,
}

impl SemiunitaryDoc {
    pub fn of(u: &Semiunitary) -> Self {
        let m = u.matrix();
        SemiunitaryDoc {
            matrix: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect(),
            antiunitary: u.is_antiunitary(),
        }
    }

    pub fn to_semiunitary(&self) -> Result<Semiunitary, DocError> {
        let n = self.matrix.len();
        check_rows(&self.matrix, n, n, "rows", "columns")?;
        let m = CMatrix::from_fn(n, n, |i, j| c(self.matrix[i][j][0], self.matrix[i][j][1]));
        Ok(Semiunitary::new(m, self.antiunitary)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayPairDoc {
    pub from: Vec<ComplexDoc>,
    pub to: Vec<ComplexDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumDoc {
    pub kind: QuantumKind,
    pub dim: usize,
    #[serde(default)]
    pub states: Vec<StateDoc>,
    #[serde(default)]
    pub questions: Vec<QuestionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semiunitary: Option<SemiunitaryDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray_map: Option<Vec<RayPairDoc>>,
}

impl QuantumDoc {
    pub fn of(h: &HilbertSystem) -> Self {
        QuantumDoc {
            kind: QuantumKind,
            dim: h.dim,
            states: h
                .state_ids
                .iter()
                .zip(&h.states)
                .map(|(id, s)| StateDoc { id: id.clone(), amplitudes: vector_doc(s.amplitudes()) })
                .collect(),
            questions: h
                .question_ids
                .iter()
                .zip(&h.questions)
                .map(|(id, s)| QuestionDoc { id: id.clone(), basis: s.basis().iter().map(vector_doc).collect() })
                .collect(),
            semiunitary: None,
            ray_map: None,
        }
    }

    pub fn to_system(&self) -> Result<HilbertSystem, DocError> {
        let states = self
            .states
            .iter()
            .map(|s| {
                StateVector::new(vector_of(&s.amplitudes)).map_err(|e| DocError::Invalid(format!("state `{}`: {e}", s.id)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let questions = self
            .questions
            .iter()
            .map(|q| {
                let vs: Vec<CVector> = q.basis.iter().map(|v| vector_of(v)).collect();
                Subspace::from_orthonormal(self.dim, vs.clone())
                    .or_else(|_| Subspace::span(self.dim, &vs))
                    .map_err(|e| DocError::Invalid(format!("question `{}`: {e}", q.id)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let state_ids = self.states.iter().map(|s| s.id.clone()).collect();
        let question_ids = self.questions.iter().map(|q| q.id.clone()).collect();
        for (what, ids) in [("state", &state_ids), ("question", &question_ids)] {
            let ids: &Vec<String> = ids;
            if let Some(i) = (1..ids.len()).find(|&i| ids[..i].contains(&ids[i])) {
                return Err(DocError::Invalid(format!("duplicate {what} id `{}`", ids[i])));
            }
        }
        Ok(HilbertSystem::with_ids(self.dim, state_ids, states, question_ids, questions)?)
    }

    pub fn to_ray_map(&self, eps: f64) -> Result<Option<RayMap>, DocError> {
        let Some(pairs) = &self.ray_map else { return Ok(None) };
        let mut out = Vec::with_capacity(pairs.len());
        for p in pairs {
            let (from, to) = (vector_of(&p.from), vector_of(&p.to));
            for v in [&from, &to] {
                if v.len() != self.dim {
                    return Err(QuantumError::DimMismatch { expected: self.dim, found: v.len() }.into());
                }
                StateVector::new(v.clone())?;
            }
            out.push((Ray::from_vector(&from, eps), Ray::from_vector(&to, eps)));
        }
        Ok(Some(RayMap { pairs: out }))
    }

    pub fn ray_map_doc(map: &RayMap) -> Vec<RayPairDoc> {
        map.pairs
            .iter()
            .map(|(a, b)| RayPairDoc { from: vector_doc(a.representative()), to: vector_doc(b.representative()) })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::NumericMode;

    fn round_trip(d: &Document) -> Document {
        parse_document(&d.to_json()).unwrap()
    }

    #[test]
    fn empty_chu_space_round_trips() {
        let c = ChuSpace::new(ValueAlphabet::boolean(), vec![], vec![], vec![]).unwrap();
        let d = Document::Chu(ChuDoc::of(&c));
        let Document::Chu(back) = round_trip(&d) else { panic!("kind changed") };
        assert_eq!(back.to_space().unwrap(), c);
    }

    #[test]
    fn rational_coalgebra_round_trips() {
        let a = FiniteCoalgebra::new(
            NumericMode::Rational,
            vec!["q".into(), "r".into()],
            vec!["x".into(), "y".into()],
            vec![Answer::yes(Value::ratio(1, 3), 1), Answer::No, Answer::No, Answer::yes(Value::ratio(1, 1), 1)],
        )
        .unwrap();
        let d = Document::Coalgebra(CoalgebraDoc::of(&a));
        assert!(d.to_json().contains("\"1/3\""));
        let Document::Coalgebra(back) = round_trip(&d) else { panic!("kind changed") };
        assert_eq!(back.to_coalgebra().unwrap(), a);
    }

    #[test]
    fn bad_probability_reports_position() {
        let text = r#"{
  "kind": "coalgebra",
  "mode": "float",
  "questions": ["q"],
  "states": ["x"],
  "table": [[[1.5, "x"]]]
}"#;
        let err = parse_document(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("outside (0, 1]"), "{msg}");
        assert!(msg.contains("line 6"), "{msg}");
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_document("{\"kind\": \"chu\",\n  \"points\": [1,]}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(matches!(parse_document("{\"kind\": \"nope\"}"), Err(DocError::UnknownKind(_))));
    }

    #[test]
    fn chu_entries_are_checked() {
        let text = r#"{"kind":"chu","alphabet":{"kind":"rational"},"points":["x"],"attributes":["a"],"table":[["3/2"]]}"#;
        let Document::Chu(d) = parse_document(text).unwrap() else { panic!() };
        let err = d.to_space().unwrap_err().to_string();
        assert!(err.contains("(x, a)"), "{err}");
    }

    #[test]
    fn quantum_round_trip_is_exact() {
        let h = HilbertSystem::new(
            2,
            vec![StateVector::from_slice(&[c(0.1, 0.2), c(-0.3, 1.0 / 3.0)]).unwrap()],
            vec![Subspace::span(2, &[vector_of(&[[1.0, 0.0], [0.0, 1.0]])]).unwrap()],
        )
        .unwrap();
        let d = Document::Quantum(QuantumDoc::of(&h));
        let Document::Quantum(back) = round_trip(&d) else { panic!("kind changed") };
        assert_eq!(back.to_system().unwrap(), h);
    }
}
