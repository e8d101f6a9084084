//! Finite Chu spaces, Chu morphisms, biextensional collapse, and the
//! correspondence between normal Chu spaces and `K^{P X}`-coalgebras.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::value::{Value, ValueAlphabet, ValueError};

/// Largest carrier accepted by the powerset constructions.
pub const DEFAULT_POWERSET_LIMIT: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChuError {
    #[error("evaluation table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("entry ({point}, {attribute}): {source}")]
    BadEntry { point: String, attribute: String, source: ValueError },
    #[error("duplicate {what} id `{id}`")]
    DuplicateId { what: &'static str, id: String },
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("{map} map has {found} entries, expected {expected}")]
    MapLength { map: &'static str, expected: usize, found: usize },
    #[error("{map} map sends {index} to {value}, outside a set of size {size}")]
    MapOutOfRange { map: &'static str, index: usize, value: usize, size: usize },
    #[error("{map} map leaves `{id}` unmapped")]
    Unmapped { map: &'static str, id: String },
    #[error("value alphabets differ ({0} vs {1})")]
    AlphabetMismatch(&'static str, &'static str),
    #[error("morphisms are not composable: {0}")]
    NotComposable(String),
    #[error("not a normal Chu space: {0}")]
    NotNormal(String),
    #[error("carrier of {size} points exceeds the powerset limit of {limit}")]
    CarrierTooLarge { size: usize, limit: usize },
    #[error("backward map is not the inverse image of the forward map")]
    NotPreimagePair,
}

/// A Chu space `(X, A, e)` over a finite value alphabet. The evaluation
/// table is stored row-major, one row per point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChuSpace {
    alphabet: ValueAlphabet,
    points: Arc<[String]>,
    attributes: Arc<[String]>,
    eval: Vec<Value>,
}

fn check_unique(what: &'static str, ids: &[String]) -> Result<(), ChuError> {
    let mut seen = HashMap::with_capacity(ids.len());
    for id in ids {
        if seen.insert(id.as_str(), ()).is_some() {
            return Err(ChuError::DuplicateId { what, id: id.clone() });
        }
    }
    Ok(())
}

impl ChuSpace {
    pub fn new(
        alphabet: ValueAlphabet,
        points: Vec<String>,
        attributes: Vec<String>,
        eval: Vec<Value>,
    ) -> Result<Self, ChuError> {
        let expected = points.len() * attributes.len();
        if eval.len() != expected {
            return Err(ChuError::TableSize { expected, found: eval.len() });
        }
        check_unique("point", &points)?;
        check_unique("attribute", &attributes)?;
        for (i, v) in eval.iter().enumerate() {
            if let Err(source) = alphabet.check(v) {
                let (x, a) = (i / attributes.len(), i % attributes.len());
                return Err(ChuError::BadEntry {
                    point: points[x].clone(),
                    attribute: attributes[a].clone(),
                    source,
                });
            }
        }
        Ok(ChuSpace { alphabet, points: points.into(), attributes: attributes.into(), eval })
    }

    pub fn from_fn(
        alphabet: ValueAlphabet,
        points: Vec<String>,
        attributes: Vec<String>,
        mut e: impl FnMut(usize, usize) -> Value,
    ) -> Result<Self, ChuError> {
        let mut eval = Vec::with_capacity(points.len() * attributes.len());
        for x in 0..points.len() {
            for a in 0..attributes.len() {
                eval.push(e(x, a));
            }
        }
        Self::new(alphabet, points, attributes, eval)
    }

    pub fn alphabet(&self) -> &ValueAlphabet {
        &self.alphabet
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    /// `e(x, a)` by index.
    pub fn eval(&self, x: usize, a: usize) -> &Value {
        &self.eval[x * self.attributes.len() + a]
    }

    pub fn row(&self, x: usize) -> &[Value] {
        let n = self.attributes.len();
        &self.eval[x * n..(x + 1) * n]
    }

    pub fn column(&self, a: usize) -> Vec<Value> {
        (0..self.points.len()).map(|x| self.eval(x, a).clone()).collect()
    }

    pub fn table(&self) -> &[Value] {
        &self.eval
    }

    pub fn point_index(&self, id: &str) -> Result<usize, ChuError> {
        self.points.iter().position(|p| p == id).ok_or_else(|| ChuError::UnknownPoint(id.to_string()))
    }

    pub fn attribute_index(&self, id: &str) -> Result<usize, ChuError> {
        self.attributes
            .iter()
            .position(|a| a == id)
            .ok_or_else(|| ChuError::UnknownAttribute(id.to_string()))
    }
}

/// A pair `(f_*, f^*)` of index maps: points forward, attributes backward.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChuMorphism {
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

impl ChuMorphism {
    pub fn new(forward: Vec<usize>, backward: Vec<usize>) -> Self {
        ChuMorphism { forward, backward }
    }

    pub fn identity(c: &ChuSpace) -> Self {
        ChuMorphism { forward: (0..c.num_points()).collect(), backward: (0..c.num_attributes()).collect() }
    }

    /// Resolves id-level pair lists against the two spaces. Every source point
    /// and every target attribute must be mapped exactly once.
    pub fn from_ids(
        source: &ChuSpace,
        target: &ChuSpace,
        forward: &[(String, String)],
        backward: &[(String, String)],
    ) -> Result<Self, ChuError> {
        let fwd = resolve_map("forward", source.points(), forward, |id| source.point_index(id), |id| {
            target.point_index(id)
        })?;
        let bwd = resolve_map(
            "backward",
            target.attributes(),
            backward,
            |id| target.attribute_index(id),
            |id| source.attribute_index(id),
        )?;
        Ok(ChuMorphism { forward: fwd, backward: bwd })
    }

    /// Id-level pair lists, the inverse of [`ChuMorphism::from_ids`].
    pub fn to_ids(&self, source: &ChuSpace, target: &ChuSpace) -> (Vec<(String, String)>, Vec<(String, String)>) {
        let fwd = self
            .forward
            .iter()
            .enumerate()
            .map(|(x, &y)| (source.points()[x].clone(), target.points()[y].clone()))
            .collect();
        let bwd = self
            .backward
            .iter()
            .enumerate()
            .map(|(b, &a)| (target.attributes()[b].clone(), source.attributes()[a].clone()))
            .collect();
        (fwd, bwd)
    }
}

pub(crate) fn resolve_map(
    map: &'static str,
    domain: &[String],
    pairs: &[(String, String)],
    dom_index: impl Fn(&str) -> Result<usize, ChuError>,
    cod_index: impl Fn(&str) -> Result<usize, ChuError>,
) -> Result<Vec<usize>, ChuError> {
    let mut out = vec![usize::MAX; domain.len()];
    for (from, to) in pairs {
        let i = dom_index(from)?;
        let j = cod_index(to)?;
        if out[i] != usize::MAX && out[i] != j {
            return Err(ChuError::DuplicateId { what: map, id: from.clone() });
        }
        out[i] = j;
    }
    if let Some(i) = out.iter().position(|&j| j == usize::MAX) {
        return Err(ChuError::Unmapped { map, id: domain[i].clone() });
    }
    Ok(out)
}

pub(crate) fn check_index_map(map: &'static str, f: &[usize], dom: usize, cod: usize) -> Result<(), ChuError> {
    if f.len() != dom {
        return Err(ChuError::MapLength { map, expected: dom, found: f.len() });
    }
    if let Some((index, &value)) = f.iter().enumerate().find(|(_, &v)| v >= cod) {
        return Err(ChuError::MapOutOfRange { map, index, value, size: cod });
    }
    Ok(())
}

fn same_alphabet_kind(a: &ValueAlphabet, b: &ValueAlphabet) -> Result<(), ChuError> {
    let compatible = match (a, b) {
        (ValueAlphabet::Symbols(x), ValueAlphabet::Symbols(y)) => x == y,
        _ => a.mode() == b.mode(),
    };
    if compatible {
        Ok(())
    } else {
        Err(ChuError::AlphabetMismatch(a.name(), b.name()))
    }
}

/// Checks the adjointness condition `e(x, f^*(a')) = e'(f_*(x), a')` for all
/// `x` and `a'`. Float alphabets compare within `eps`.
pub fn check_chu_morphism(
    source: &ChuSpace,
    target: &ChuSpace,
    m: &ChuMorphism,
    eps: f64,
) -> Result<bool, ChuError> {
    same_alphabet_kind(source.alphabet(), target.alphabet())?;
    check_index_map("forward", &m.forward, source.num_points(), target.num_points())?;
    check_index_map("backward", &m.backward, target.num_attributes(), source.num_attributes())?;
    for x in 0..source.num_points() {
        let fx = m.forward[x];
        for (b, &fb) in m.backward.iter().enumerate() {
            if !source.eval(x, fb).eq_within(target.eval(fx, b), eps) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `g ∘ f`: forward maps compose covariantly, backward maps contravariantly.
pub fn compose_chu(g: &ChuMorphism, f: &ChuMorphism) -> Result<ChuMorphism, ChuError> {
    if let Some(&y) = f.forward.iter().find(|&&y| y >= g.forward.len()) {
        return Err(ChuError::NotComposable(format!(
            "first forward map reaches point {y}, second is defined on {} points",
            g.forward.len()
        )));
    }
    if let Some(&a) = g.backward.iter().find(|&&a| a >= f.backward.len()) {
        return Err(ChuError::NotComposable(format!(
            "second backward map reaches attribute {a}, first is defined on {} attributes",
            f.backward.len()
        )));
    }
    Ok(ChuMorphism {
        forward: f.forward.iter().map(|&y| g.forward[y]).collect(),
        backward: g.backward.iter().map(|&a| f.backward[a]).collect(),
    })
}

/// Result of [`biextensional_collapse`].
#[derive(Debug, Clone, PartialEq)]
pub struct Collapse {
    pub space: ChuSpace,
    /// Surjection from the original points onto the collapsed points.
    pub point_map: Vec<usize>,
    /// Surjection from the original attributes onto the collapsed attributes.
    pub attribute_map: Vec<usize>,
}

fn first_occurrence_classes(n: usize, same: impl Fn(usize, usize) -> bool) -> (Vec<usize>, Vec<usize>) {
    let mut reps: Vec<usize> = Vec::new();
    let mut class = Vec::with_capacity(n);
    for i in 0..n {
        match reps.iter().position(|&r| same(r, i)) {
            Some(k) => class.push(k),
            None => {
                class.push(reps.len());
                reps.push(i);
            }
        }
    }
    (reps, class)
}

/// Quotients points with identical rows and attributes with identical
/// columns. Representatives are first occurrences. Entries compare exactly
/// (bitwise for floats) so the quotient is an equivalence and idempotent.
pub fn biextensional_collapse(c: &ChuSpace) -> Collapse {
    let (point_reps, point_map) = first_occurrence_classes(c.num_points(), |a, b| c.row(a) == c.row(b));
    let (attr_reps, attribute_map) = first_occurrence_classes(c.num_attributes(), |a, b| {
        (0..c.num_points()).all(|x| c.eval(x, a) == c.eval(x, b))
    });
    let space = ChuSpace {
        alphabet: c.alphabet.clone(),
        points: point_reps.iter().map(|&x| c.points[x].clone()).collect(),
        attributes: attr_reps.iter().map(|&a| c.attributes[a].clone()).collect(),
        eval: point_reps
            .iter()
            .flat_map(|&x| attr_reps.iter().map(move |&a| c.eval(x, a).clone()))
            .collect(),
    };
    Collapse { space, point_map, attribute_map }
}

/// Canonical id of the subset of `points` encoded by `mask` (bit `i` set
/// means `points[i]` is a member), e.g. `{}` or `{x,y}`.
pub fn subset_label(points: &[String], mask: usize) -> String {
    let members: Vec<&str> =
        points.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.as_str()).collect();
    format!("{{{}}}", members.join(","))
}

/// `h^{-1}(S)` as a bitmask over the domain of `h`.
pub fn preimage_mask(h: &[usize], target_mask: usize) -> usize {
    h.iter().enumerate().filter(|(_, &y)| target_mask >> y & 1 == 1).fold(0, |m, (x, _)| m | 1 << x)
}

/// A Chu space whose attributes are the full powerset of its points, listed
/// in ascending bitmask order.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalChuSpace {
    base: ChuSpace,
}

impl NormalChuSpace {
    pub fn new(base: ChuSpace) -> Result<Self, ChuError> {
        let n = base.num_points();
        if n >= usize::BITS as usize - 1 {
            return Err(ChuError::NotNormal(format!("{n} points have no enumerable powerset")));
        }
        let expected = 1usize << n;
        if base.num_attributes() != expected {
            return Err(ChuError::NotNormal(format!(
                "{} attributes, a powerset of {n} points has {expected}",
                base.num_attributes()
            )));
        }
        for (mask, a) in base.attributes().iter().enumerate() {
            let label = subset_label(base.points(), mask);
            if *a != label {
                return Err(ChuError::NotNormal(format!("attribute {mask} is `{a}`, expected `{label}`")));
            }
        }
        Ok(NormalChuSpace { base })
    }

    /// Builds the normal space with `e(x, S) = e(x_index, mask)`.
    pub fn from_fn(
        alphabet: ValueAlphabet,
        points: Vec<String>,
        limit: usize,
        e: impl FnMut(usize, usize) -> Value,
    ) -> Result<Self, ChuError> {
        if points.len() > limit {
            return Err(ChuError::CarrierTooLarge { size: points.len(), limit });
        }
        let attributes = (0..1usize << points.len()).map(|m| subset_label(&points, m)).collect();
        Ok(NormalChuSpace { base: ChuSpace::from_fn(alphabet, points, attributes, e)? })
    }

    pub fn space(&self) -> &ChuSpace {
        &self.base
    }

    /// The same carrier with a new table, in point-major order.
    pub fn with_table(&self, eval: Vec<Value>) -> Result<Self, ChuError> {
        let b = &self.base;
        if eval.len() != b.eval.len() {
            return Err(ChuError::TableSize { expected: b.eval.len(), found: eval.len() });
        }
        if let Some((i, source)) = eval.iter().enumerate().find_map(|(i, v)| b.alphabet.check(v).err().map(|e| (i, e))) {
            let width = b.attributes.len();
            return Err(ChuError::BadEntry {
                point: b.points[i / width].clone(),
                attribute: b.attributes[i % width].clone(),
                source,
            });
        }
        Ok(NormalChuSpace { base: ChuSpace { eval, ..b.clone() } })
    }

    pub fn into_space(self) -> ChuSpace {
        self.base
    }
}

/// A coalgebra for `X ↦ K^{P X}`, stored as a table over `X × P(X)`.
/// Subsets are bitmasks over the carrier order.
#[derive(Debug, Clone, PartialEq)]
pub struct PowersetCoalgebra {
    alphabet: ValueAlphabet,
    carrier: Arc<[String]>,
    table: Vec<Value>,
    /// Subset labels in mask order, kept so that conversions back to a
    /// normal Chu space do not rebuild them.
    subsets: Arc<[String]>,
}

impl PowersetCoalgebra {
    pub fn new(alphabet: ValueAlphabet, carrier: Vec<String>, table: Vec<Value>) -> Result<Self, ChuError> {
        if carrier.len() >= usize::BITS as usize - 1 {
            return Err(ChuError::CarrierTooLarge { size: carrier.len(), limit: usize::BITS as usize - 2 });
        }
        let width = 1usize << carrier.len();
        let expected = carrier.len() * width;
        if table.len() != expected {
            return Err(ChuError::TableSize { expected, found: table.len() });
        }
        check_unique("state", &carrier)?;
        for (i, v) in table.iter().enumerate() {
            if let Err(source) = alphabet.check(v) {
                return Err(ChuError::BadEntry {
                    point: carrier[i / width].clone(),
                    attribute: subset_label(&carrier, i % width),
                    source,
                });
            }
        }
        let subsets = (0..width).map(|m| subset_label(&carrier, m)).collect();
        Ok(PowersetCoalgebra { alphabet, carrier: carrier.into(), table, subsets })
    }

    pub fn alphabet(&self) -> &ValueAlphabet {
        &self.alphabet
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    /// The same carrier with a new table, in state-major order.
    pub fn with_table(&self, table: Vec<Value>) -> Result<Self, ChuError> {
        if table.len() != self.table.len() {
            return Err(ChuError::TableSize { expected: self.table.len(), found: table.len() });
        }
        if let Some((i, source)) = table.iter().enumerate().find_map(|(i, v)| self.alphabet.check(v).err().map(|e| (i, e))) {
            let width = self.subsets.len();
            return Err(ChuError::BadEntry {
                point: self.carrier[i / width].clone(),
                attribute: self.subsets[i % width].clone(),
                source,
            });
        }
        Ok(PowersetCoalgebra { table, ..self.clone() })
    }

    /// `α(x)(S)`.
    pub fn behaviour(&self, x: usize, mask: usize) -> &Value {
        &self.table[(x << self.carrier.len()) + mask]
    }
}

/// Reads a normal Chu space as a coalgebra: `α(x)(S) = e(x, S)`.
pub fn normal_to_coalgebra(c: &NormalChuSpace, limit: usize) -> Result<PowersetCoalgebra, ChuError> {
    let s = c.space();
    if s.num_points() > limit {
        return Err(ChuError::CarrierTooLarge { size: s.num_points(), limit });
    }
    Ok(PowersetCoalgebra {
        alphabet: s.alphabet.clone(),
        carrier: s.points.clone(),
        table: s.eval.clone(),
        subsets: s.attributes.clone(),
    })
}

/// Inverse of [`normal_to_coalgebra`]: `e(x, S) = α(x)(S)`.
pub fn coalgebra_to_normal(a: &PowersetCoalgebra) -> NormalChuSpace {
    NormalChuSpace {
        base: ChuSpace {
            alphabet: a.alphabet.clone(),
            points: a.carrier.clone(),
            attributes: a.subsets.clone(),
            eval: a.table.clone(),
        },
    }
}

/// Homomorphism condition for the powerset functor:
/// `β(h(x))(S) = α(x)(h^{-1}(S))` for every `x` and every `S ⊆ Y`.
pub fn check_powerset_homomorphism(
    a: &PowersetCoalgebra,
    b: &PowersetCoalgebra,
    h: &[usize],
    eps: f64,
) -> Result<bool, ChuError> {
    same_alphabet_kind(&a.alphabet, &b.alphabet)?;
    check_index_map("carrier", h, a.carrier.len(), b.carrier.len())?;
    for (x, &hx) in h.iter().enumerate() {
        for mask in 0..1usize << b.carrier.len() {
            if !b.behaviour(hx, mask).eq_within(a.behaviour(x, preimage_mask(h, mask)), eps) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(h, h^{-1})` as a Chu morphism between the normal spaces on `nx` and
/// `ny` points.
pub fn preimage_morphism(h: &[usize], ny: usize) -> ChuMorphism {
    ChuMorphism { forward: h.to_vec(), backward: (0..1usize << ny).map(|m| preimage_mask(h, m)).collect() }
}

/// The action of `G` on morphisms: a Chu morphism of the form `(f, f^{-1})`
/// yields its carrier map.
pub fn chu_morphism_to_homomorphism(
    source: &NormalChuSpace,
    target: &NormalChuSpace,
    m: &ChuMorphism,
) -> Result<Vec<usize>, ChuError> {
    let (nx, ny) = (source.space().num_points(), target.space().num_points());
    check_index_map("forward", &m.forward, nx, ny)?;
    if m.backward != preimage_morphism(&m.forward, ny).backward {
        return Err(ChuError::NotPreimagePair);
    }
    Ok(m.forward.clone())
}

/// The action of `H` on morphisms: `h ↦ (h, h^{-1})`.
pub fn homomorphism_to_chu_morphism(
    a: &PowersetCoalgebra,
    b: &PowersetCoalgebra,
    h: &[usize],
) -> Result<ChuMorphism, ChuError> {
    check_index_map("carrier", h, a.carrier.len(), b.carrier.len())?;
    Ok(preimage_morphism(h, b.carrier.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::NumericMode;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn bool_space(rows: &[&[usize]]) -> ChuSpace {
        let n = rows.first().map_or(0, |r| r.len());
        ChuSpace::from_fn(ValueAlphabet::boolean(), ids("x", rows.len()), ids("a", n), |x, a| {
            Value::Symbol(rows[x][a])
        })
        .unwrap()
    }

    #[test]
    fn identity_is_a_morphism() {
        let c = bool_space(&[&[0, 1, 1], &[1, 0, 1]]);
        assert!(check_chu_morphism(&c, &c, &ChuMorphism::identity(&c), 0.0).unwrap());
    }

    #[test]
    fn one_versus_zero_is_not_a_morphism() {
        let alphabet = ValueAlphabet::RationalUnit;
        let c = ChuSpace::new(alphabet.clone(), vec!["x".into()], vec!["a".into()], vec![Value::ratio(1, 1)])
            .unwrap();
        let d = ChuSpace::new(alphabet, vec!["y".into()], vec!["b".into()], vec![Value::ratio(0, 1)]).unwrap();
        assert!(!check_chu_morphism(&c, &d, &ChuMorphism::new(vec![0], vec![0]), 0.0).unwrap());
    }

    #[test]
    fn unknown_ids_are_named() {
        let c = bool_space(&[&[0, 1]]);
        let err = ChuMorphism::from_ids(&c, &c, &[("x0".into(), "x9".into())], &[]).unwrap_err();
        assert_eq!(err, ChuError::UnknownPoint("x9".into()));
        let err = ChuMorphism::from_ids(
            &c,
            &c,
            &[("x0".into(), "x0".into())],
            &[("a0".into(), "a0".into()), ("zz".into(), "a0".into())],
        )
        .unwrap_err();
        assert_eq!(err, ChuError::UnknownAttribute("zz".into()));
        let err = check_chu_morphism(&c, &c, &ChuMorphism::new(vec![3], vec![0, 1]), 0.0).unwrap_err();
        assert!(matches!(err, ChuError::MapOutOfRange { map: "forward", value: 3, .. }));
    }

    #[test]
    fn flip_composed_with_itself_is_identity() {
        let c = bool_space(&[&[1, 0], &[0, 1]]);
        let flip = ChuMorphism::new(vec![1, 0], vec![1, 0]);
        assert!(check_chu_morphism(&c, &c, &flip, 0.0).unwrap());
        assert_eq!(compose_chu(&flip, &flip).unwrap(), ChuMorphism::identity(&c));
    }

    #[test]
    fn composition_rejects_mismatched_shapes() {
        let f = ChuMorphism::new(vec![2], vec![0]);
        let g = ChuMorphism::new(vec![0, 0], vec![0]);
        assert!(matches!(compose_chu(&g, &f), Err(ChuError::NotComposable(_))));
    }

    #[test]
    fn collapse_merges_duplicate_rows() {
        let c = bool_space(&[&[0, 1], &[0, 1], &[1, 1]]);
        let col = biextensional_collapse(&c);
        assert_eq!(col.space.num_points(), 2);
        assert_eq!(col.point_map, vec![0, 0, 1]);
        assert_eq!(col.space.num_attributes(), 2);
    }

    #[test]
    fn collapse_of_distinct_space_is_a_copy() {
        let c = bool_space(&[&[0, 1], &[1, 0]]);
        let col = biextensional_collapse(&c);
        assert_eq!(col.space, c);
        assert_eq!(col.point_map, vec![0, 1]);
        assert_eq!(col.attribute_map, vec![0, 1]);
    }

    #[test]
    fn empty_spaces_are_vacuous() {
        let c = ChuSpace::new(ValueAlphabet::boolean(), vec![], vec![], vec![]).unwrap();
        assert!(check_chu_morphism(&c, &c, &ChuMorphism::identity(&c), 0.0).unwrap());
        assert_eq!(biextensional_collapse(&c).space, c);
        let only_points = bool_space(&[&[], &[]]);
        let col = biextensional_collapse(&only_points);
        assert_eq!(col.space.num_points(), 1);
    }

    #[test]
    fn one_point_normal_space() {
        let n = NormalChuSpace::from_fn(ValueAlphabet::boolean(), vec!["x".into()], 4, |_, m| Value::Symbol(m))
            .unwrap();
        assert_eq!(n.space().attributes(), &["{}".to_string(), "{x}".to_string()]);
        let a = normal_to_coalgebra(&n, 4).unwrap();
        assert_eq!(a.behaviour(0, 0), &Value::Symbol(0));
        assert_eq!(a.behaviour(0, 1), &Value::Symbol(1));
    }

    #[test]
    fn empty_carrier_gives_single_empty_attribute() {
        let a = PowersetCoalgebra::new(ValueAlphabet::boolean(), vec![], vec![]).unwrap();
        let n = coalgebra_to_normal(&a);
        assert_eq!(n.space().points().len(), 0);
        assert_eq!(n.space().attributes(), &["{}".to_string()]);
        assert!(n.space().table().is_empty());
    }

    #[test]
    fn powerset_guard() {
        let n = NormalChuSpace::from_fn(ValueAlphabet::boolean(), ids("p", 3), 4, |_, _| Value::Symbol(0)).unwrap();
        assert_eq!(normal_to_coalgebra(&n, 2).unwrap_err(), ChuError::CarrierTooLarge { size: 3, limit: 2 });
        assert!(NormalChuSpace::from_fn(ValueAlphabet::boolean(), ids("p", 5), 4, |_, _| Value::Symbol(0)).is_err());
    }

    #[test]
    fn normality_is_validated() {
        let c = bool_space(&[&[0, 1]]);
        assert!(matches!(NormalChuSpace::new(c), Err(ChuError::NotNormal(_))));
        let ok = ChuSpace::new(
            ValueAlphabet::boolean(),
            vec!["x".into()],
            vec!["{}".into(), "{x}".into()],
            vec![Value::Symbol(0), Value::Symbol(1)],
        )
        .unwrap();
        assert!(NormalChuSpace::new(ok).is_ok());
    }

    #[test]
    fn preimage_masks() {
        // h: {0,1,2} -> {0,1}, 0,1 -> 0 and 2 -> 1
        let h = [0, 0, 1];
        assert_eq!(preimage_mask(&h, 0b01), 0b011);
        assert_eq!(preimage_mask(&h, 0b10), 0b100);
        assert_eq!(preimage_mask(&h, 0b11), 0b111);
        assert_eq!(preimage_mask(&h, 0), 0);
    }

    #[test]
    fn non_preimage_pairs_are_rejected_by_g() {
        let n = NormalChuSpace::from_fn(ValueAlphabet::boolean(), ids("p", 1), 4, |_, m| Value::Symbol(m)).unwrap();
        let m = ChuMorphism::new(vec![0], vec![1, 1]);
        assert_eq!(chu_morphism_to_homomorphism(&n, &n, &m), Err(ChuError::NotPreimagePair));
    }

    #[test]
    fn bad_entries_report_coordinates() {
        let err = ChuSpace::new(
            ValueAlphabet::numeric(NumericMode::Rational),
            vec!["x".into()],
            vec!["a".into()],
            vec![Value::ratio(3, 2)],
        )
        .unwrap_err();
        assert!(matches!(err, ChuError::BadEntry { ref point, .. } if point == "x"));
    }
}
