//! Finite-dimensional quantum systems: states, subspace questions, the Born
//! rule and the unnormalized Lüders rule, projective structure, symmetries
//! and embeddings into a universal space.

pub mod embed;
pub mod linalg;
pub mod random;
pub mod symmetry;

use std::fmt::Write as _;

use thiserror::Error;

use crate::coalgebra::{materialize, Answer, CoalgebraError, FiniteCoalgebra, ImplicitCoalgebra, Materialized};
use crate::indexed::IndexedError;
use crate::value::{NumericMode, Tolerance, Value};

pub use embed::{embed_system, embed_with_isometry, subspace_preimage, Embedding, DEFAULT_UNIVERSAL_DIM};
pub use linalg::{basis_vector, c, inner, CMatrix, CVector, C64, EPS_ORTH, EPS_RANK};
pub use symmetry::{
    apply_semiunitary, close_questions, probe_rays, semiunitary_morphism, wigner_reconstruct, RayMap, Semiunitary,
    SemiunitaryMorphism,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("the zero vector is not a state")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("basis is not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("map is not an isometry (defect {0:e})")]
    NotIsometry(f64),
    #[error("question list is not closed under the inverse symmetry; missing preimages of: {}", .0.join(", "))]
    QuestionsNotClosed(Vec<String>),
    #[error("materializations do not correspond under the symmetry: no image for state `{0}`")]
    CarrierNotClosed(String),
    #[error("ray maps are only reconstructed in dimension greater than 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("no semiunitary fits the ray map: {0}")]
    InconsistentRayMap(String),
    #[error("system of dimension {dim} does not fit a universal space of dimension {universal}")]
    DimTooLarge { dim: usize, universal: usize },
    #[error("basis map is not injective into 0..{0}")]
    BadBasisMap(usize),
    #[error("states `{0}` and `{1}` are projectively equivalent; deduplicate by rays first")]
    NotRayDeduplicated(String, String),
    #[error("question list has {questions} entries but {ids} ids")]
    IdCount { questions: usize, ids: usize },
    #[error(transparent)]
    Coalgebra(#[from] CoalgebraError),
    #[error(transparent)]
    Indexed(#[from] IndexedError),
}

/// A nonzero vector of a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self, QuantumError> {
        if amplitudes.iter().all(|z| *z == c(0.0, 0.0)) {
            return Err(QuantumError::ZeroVector);
        }
        Ok(StateVector(amplitudes))
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self, QuantumError> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    pub fn real(amplitudes: &[f64]) -> Result<Self, QuantumError> {
        Self::new(CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&x| c(x, 0.0))))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn scaled(&self, lambda: C64) -> Result<Self, QuantumError> {
        Self::new(&self.0 * lambda)
    }
}

/// A subspace given by an orthonormal basis (possibly empty).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    dim: usize,
    basis: Vec<CVector>,
}

impl Subspace {
    /// Span of arbitrary vectors, orthonormalized.
    pub fn span(dim: usize, vectors: &[CVector]) -> Result<Self, QuantumError> {
        for v in vectors {
            if v.len() != dim {
                return Err(QuantumError::DimMismatch { expected: dim, found: v.len() });
            }
        }
        Ok(Subspace { dim, basis: linalg::orthonormalize(vectors, EPS_RANK) })
    }

    /// Accepts a basis that is already orthonormal within `EPS_ORTH`.
    pub fn from_orthonormal(dim: usize, basis: Vec<CVector>) -> Result<Self, QuantumError> {
        let mut defect: f64 = 0.0;
        for (i, u) in basis.iter().enumerate() {
            if u.len() != dim {
                return Err(QuantumError::DimMismatch { expected: dim, found: u.len() });
            }
            for (j, v) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((inner(u, v) - c(target, 0.0)).norm());
            }
        }
        if defect > EPS_ORTH {
            return Err(QuantumError::NotOrthonormal(defect));
        }
        Ok(Subspace { dim, basis })
    }

    pub fn zero(dim: usize) -> Self {
        Subspace { dim, basis: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        Subspace { dim, basis: (0..dim).map(|k| basis_vector(dim, k)).collect() }
    }

    pub fn ray(v: &CVector) -> Result<Self, QuantumError> {
        let n = v.norm();
        if n == 0.0 {
            return Err(QuantumError::ZeroVector);
        }
        Ok(Subspace { dim: v.len(), basis: vec![v.unscale(n)] })
    }

    /// Span of the given coordinate axes.
    pub fn coordinate(dim: usize, axes: &[usize]) -> Self {
        Subspace { dim, basis: axes.iter().map(|&k| basis_vector(dim, k)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    /// `P_S v`.
    pub fn project(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for b in &self.basis {
            out += b * inner(b, v);
        }
        out
    }

    /// `P_S = B B†`.
    pub fn projector(&self) -> CMatrix {
        let mut p = CMatrix::zeros(self.dim, self.dim);
        for b in &self.basis {
            p += b * b.adjoint();
        }
        p
    }

    pub fn contains(&self, v: &CVector, eps: f64) -> bool {
        (self.project(v) - v).norm() <= eps * v.norm().max(1.0)
    }

    /// Equality as subspaces: projectors agree entrywise within `eps`.
    pub fn same_as(&self, other: &Subspace, eps: f64) -> bool {
        self.dim == other.dim
            && self.rank() == other.rank()
            && (self.projector() - other.projector()).iter().all(|z| z.norm() <= eps)
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let comp = CMatrix::identity(self.dim, self.dim) - self.projector();
        let cols: Vec<CVector> = (0..self.dim).map(|k| comp.column(k).into_owned()).collect();
        Subspace { dim: self.dim, basis: linalg::orthonormalize(&cols, 1e-8) }
    }

    /// `S + T`.
    pub fn join(&self, other: &Subspace) -> Subspace {
        let vs: Vec<CVector> = self.basis.iter().chain(other.basis.iter()).cloned().collect();
        Subspace { dim: self.dim, basis: linalg::orthonormalize(&vs, EPS_RANK) }
    }
}

fn check_dims(psi: &StateVector, s: &Subspace) -> Result<(), QuantumError> {
    if psi.dim() != s.dim() {
        return Err(QuantumError::DimMismatch { expected: s.dim(), found: psi.dim() });
    }
    Ok(())
}

/// `‖P_S ψ‖² / ‖ψ‖²`, clamped to `[0, 1]`.
pub fn born(psi: &StateVector, s: &Subspace) -> Result<f64, QuantumError> {
    check_dims(psi, s)?;
    let p = s.project(psi.amplitudes()).norm_squared() / psi.norm_sqr();
    Ok(p.clamp(0.0, 1.0))
}

/// "No" when the Born probability is at most `eps`; otherwise "yes" with
/// that probability and the unnormalized projection `P_S ψ`.
pub fn lueders(psi: &StateVector, s: &Subspace, eps: f64) -> Result<Answer<StateVector>, QuantumError> {
    let r = born(psi, s)?;
    if r <= eps {
        return Ok(Answer::No);
    }
    let next = StateVector::new(s.project(psi.amplitudes()))?;
    Ok(Answer::yes(Value::Float(r), next))
}

/// Cauchy–Schwarz equality `|⟨ψ,φ⟩|² = ⟨ψ,ψ⟩⟨φ,φ⟩`, tested on the
/// normalized overlap: `1 − |⟨ψ̂,φ̂⟩|² ≤ eps`.
pub fn projective_equiv(psi: &StateVector, phi: &StateVector, eps: f64) -> Result<bool, QuantumError> {
    if psi.dim() != phi.dim() {
        return Err(QuantumError::DimMismatch { expected: psi.dim(), found: phi.dim() });
    }
    Ok(1.0 - fidelity(psi.amplitudes(), phi.amplitudes()) <= eps)
}

/// `|⟨a,b⟩|² / (‖a‖²‖b‖²)`.
pub fn fidelity(a: &CVector, b: &CVector) -> f64 {
    inner(a, b).norm_sqr() / (a.norm_squared() * b.norm_squared())
}

/// The canonical representative of a ray: unit norm, with the first
/// amplitude of modulus above `eps` made real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray(CVector);

impl Ray {
    pub fn of(psi: &StateVector, eps: f64) -> Ray {
        Ray::from_vector(psi.amplitudes(), eps)
    }

    pub(crate) fn from_vector(v: &CVector, eps: f64) -> Ray {
        let u = v.unscale(v.norm());
        let phase = u.iter().find(|z| z.norm() > eps).map(|z| z.conj() / z.norm()).unwrap_or(c(1.0, 0.0));
        Ray(u * phase)
    }

    pub fn representative(&self) -> &CVector {
        &self.0
    }

    pub fn state(&self) -> StateVector {
        StateVector(self.0.clone())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Representational equality within `eps` per amplitude.
    pub fn approx_eq(&self, other: &Ray, eps: f64) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(other.0.iter()).all(|(a, b)| (a - b).norm() <= eps)
    }

    pub fn render(&self, digits: usize) -> String {
        let mut out = String::from("[");
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{}", render_complex(*z, digits));
        }
        out.push(']');
        out
    }
}

pub(crate) fn render_complex(z: C64, digits: usize) -> String {
    let clean = |x: f64| if x.abs() < 0.5 * 10f64.powi(-(digits as i32)) { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.digits$}")
    } else if re == 0.0 {
        format!("{im:.digits$}i")
    } else {
        format!("{re:.digits$}{}{:.digits$}i", if im < 0.0 { "-" } else { "+" }, im.abs())
    }
}

/// A finite-dimensional system with chosen states and a finite question
/// list.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertSystem {
    pub dim: usize,
    pub state_ids: Vec<String>,
    pub states: Vec<StateVector>,
    pub question_ids: Vec<String>,
    pub questions: Vec<Subspace>,
}

impl HilbertSystem {
    pub fn new(dim: usize, states: Vec<StateVector>, questions: Vec<Subspace>) -> Result<Self, QuantumError> {
        let state_ids = (0..states.len()).map(|i| format!("psi{i}")).collect();
        let question_ids = (0..questions.len()).map(|i| format!("q{i}")).collect();
        Self::with_ids(dim, state_ids, states, question_ids, questions)
    }

    pub fn with_ids(
        dim: usize,
        state_ids: Vec<String>,
        states: Vec<StateVector>,
        question_ids: Vec<String>,
        questions: Vec<Subspace>,
    ) -> Result<Self, QuantumError> {
        for s in &states {
            if s.dim() != dim {
                return Err(QuantumError::DimMismatch { expected: dim, found: s.dim() });
            }
        }
        for q in &questions {
            if q.dim() != dim {
                return Err(QuantumError::DimMismatch { expected: dim, found: q.dim() });
            }
        }
        if state_ids.len() != states.len() {
            return Err(QuantumError::IdCount { questions: states.len(), ids: state_ids.len() });
        }
        if question_ids.len() != questions.len() {
            return Err(QuantumError::IdCount { questions: questions.len(), ids: question_ids.len() });
        }
        Ok(HilbertSystem { dim, state_ids, states, question_ids, questions })
    }

    /// The Chu evaluation table `born(ψ, S)` over the chosen states and
    /// questions, row-major.
    pub fn born_table(&self) -> Vec<f64> {
        self.states
            .iter()
            .flat_map(|psi| self.questions.iter().map(move |s| born(psi, s).expect("dimensions checked")))
            .collect()
    }
}

/// The Lüders coalgebra of a system over its question list.
#[derive(Debug, Clone, Copy)]
pub struct QuantumCoalgebra<'a> {
    system: &'a HilbertSystem,
    eps: f64,
}

pub fn quantum_coalgebra<'a>(system: &'a HilbertSystem, tol: &Tolerance) -> QuantumCoalgebra<'a> {
    QuantumCoalgebra { system, eps: tol.eps_eq }
}

impl ImplicitCoalgebra for QuantumCoalgebra<'_> {
    type State = StateVector;

    fn mode(&self) -> NumericMode {
        NumericMode::Float
    }

    fn questions(&self) -> &[String] {
        &self.system.question_ids
    }

    fn answer(&self, state: &StateVector, question: usize) -> Answer<StateVector> {
        lueders(state, &self.system.questions[question], self.eps).expect("system dimensions are consistent")
    }

    /// Seed states keep their ids; everything reached from them is `s{index}`.
    fn label(&self, state: &StateVector, index: usize) -> String {
        match self.system.states.iter().position(|s| s.amplitudes() == state.amplitudes()) {
            Some(i) => self.system.state_ids[i].clone(),
            None => format!("s{index}"),
        }
    }
}

/// How [`materialize_system`] identifies states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateEquality {
    /// Amplitudes agree within `eps_eq` (relative to the larger norm).
    Vector,
    /// Same ray.
    Projective,
}

impl StateEquality {
    pub fn same(self, a: &StateVector, b: &StateVector, eps: f64) -> bool {
        match self {
            StateEquality::Vector => {
                let scale = a.amplitudes().norm().max(b.amplitudes().norm()).max(1e-300);
                (a.amplitudes() - b.amplitudes()).norm() <= eps * scale
            }
            StateEquality::Projective => projective_equiv(a, b, eps).unwrap_or(false),
        }
    }
}

/// Materializes the Lüders coalgebra from the system's states.
pub fn materialize_system(
    system: &HilbertSystem,
    depth: usize,
    equality: StateEquality,
    tol: &Tolerance,
    cap: usize,
) -> Result<Materialized<StateVector>, QuantumError> {
    let coalg = quantum_coalgebra(system, tol);
    let eps = tol.eps_eq;
    Ok(materialize(&coalg, &system.states, depth, |a, b| equality.same(a, b, eps), cap)?)
}

/// The projective coalgebra over canonical rays.
#[derive(Debug, Clone)]
pub struct ProjectiveQuotient {
    pub coalgebra: FiniteCoalgebra,
    pub rays: Vec<Ray>,
}

/// Replaces every carrier state of a ray-deduplicated materialization by its
/// canonical ray; answers are carried over unchanged.
pub fn projective_quotient(m: &Materialized<StateVector>, tol: &Tolerance) -> Result<ProjectiveQuotient, QuantumError> {
    let n = m.states.len();
    for i in 0..n {
        for j in i + 1..n {
            if projective_equiv(&m.states[i], &m.states[j], tol.eps_eq)? {
                let ids = m.coalgebra.states();
                return Err(QuantumError::NotRayDeduplicated(ids[i].clone(), ids[j].clone()));
            }
        }
    }
    let rays: Vec<Ray> = m.states.iter().map(|s| Ray::of(s, tol.eps_eq)).collect();
    let mut labels: Vec<String> = Vec::with_capacity(n);
    for r in &rays {
        let base = r.render(6);
        let mut label = base.clone();
        let mut k = 1;
        while labels.contains(&label) {
            label = format!("{base}#{k}");
            k += 1;
        }
        labels.push(label);
    }
    let coalgebra = FiniteCoalgebra::new(
        m.coalgebra.mode(),
        m.coalgebra.questions().to_vec(),
        labels,
        m.coalgebra.table().to_vec(),
    )?;
    Ok(ProjectiveQuotient { coalgebra, rays })
}

/// A finite question family meant to separate the given states: the
/// coordinate rays, the ray of each state, and the rays of `ψ_i + ψ_j` and
/// `ψ_i + i·ψ_j` for every pair. Duplicate rays are dropped.
pub fn discriminating_questions(states: &[StateVector], dim: usize) -> Result<Vec<Subspace>, QuantumError> {
    let mut generators: Vec<CVector> = (0..dim).map(|k| basis_vector(dim, k)).collect();
    for s in states {
        if s.dim() != dim {
            return Err(QuantumError::DimMismatch { expected: dim, found: s.dim() });
        }
        generators.push(s.amplitudes().clone());
    }
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let (a, b) = (states[i].amplitudes(), states[j].amplitudes());
            generators.push(a + b);
            generators.push(a + b * c(0.0, 1.0));
        }
    }
    let mut kept: Vec<CVector> = Vec::new();
    for g in generators {
        if g.norm() <= EPS_RANK {
            continue;
        }
        if kept.iter().all(|k| 1.0 - fidelity(k, &g) > 1e-12) {
            kept.push(g);
        }
    }
    kept.iter().map(Subspace::ray).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::{is_bisimulation, Relation};
    use crate::coalgebra::is_static;
    use crate::indexed::truncate;

    fn e(dim: usize, k: usize) -> StateVector {
        StateVector::new(basis_vector(dim, k)).unwrap()
    }

    #[test]
    fn born_basics() {
        let e1 = e(2, 0);
        assert_eq!(born(&e1, &Subspace::coordinate(2, &[0])).unwrap(), 1.0);
        assert_eq!(born(&e1, &Subspace::zero(2)).unwrap(), 0.0);
        let plus = StateVector::real(&[1.0, 1.0]).unwrap();
        assert!((born(&plus, &Subspace::full(2)).unwrap() - 1.0).abs() < 1e-15);
        assert!((born(&plus, &Subspace::coordinate(2, &[0])).unwrap() - 0.5).abs() < 1e-15);
        assert!(born(&e(3, 0), &Subspace::full(2)).is_err());
        assert_eq!(StateVector::real(&[0.0, 0.0]), Err(QuantumError::ZeroVector));
    }

    #[test]
    fn lueders_rule() {
        let s1 = Subspace::coordinate(2, &[0]);
        assert_eq!(lueders(&e(2, 1), &s1, 1e-9).unwrap(), Answer::No);
        let plus = StateVector::real(&[1.0, 1.0]).unwrap();
        match lueders(&plus, &s1, 1e-9).unwrap() {
            Answer::Yes { prob, next } => {
                assert!(prob.eq_within(&Value::Float(0.5), 1e-15));
                assert_eq!(next, StateVector::real(&[1.0, 0.0]).unwrap());
                // asking again is certain and leaves the state alone
                assert_eq!(lueders(&next, &s1, 1e-9).unwrap(), Answer::yes(Value::Float(1.0), next.clone()));
            }
            Answer::No => panic!("expected yes"),
        }
    }

    #[test]
    fn scalar_multiples_are_equivalent() {
        let psi = StateVector::from_slice(&[c(1.0, 2.0), c(-0.5, 0.25), c(0.0, 1.0)]).unwrap();
        assert!(projective_equiv(&psi, &psi.scaled(c(2.0, 0.0)).unwrap(), 1e-12).unwrap());
        assert!(projective_equiv(&psi, &psi.scaled(c(0.0, 1.0)).unwrap(), 1e-12).unwrap());
        assert!(!projective_equiv(&e(2, 0), &e(2, 1), 1e-9).unwrap());
        let r1 = Ray::of(&psi, 1e-9);
        let r2 = Ray::of(&psi.scaled(c(-3.0, 0.5)).unwrap(), 1e-9);
        assert!(r1.approx_eq(&r2, 1e-12));
        assert!(r1.representative()[0].im.abs() < 1e-15 && r1.representative()[0].re > 0.0);
    }

    fn two_dim_system() -> HilbertSystem {
        HilbertSystem::new(
            2,
            vec![StateVector::real(&[1.0, 1.0]).unwrap()],
            vec![Subspace::coordinate(2, &[0]), Subspace::coordinate(2, &[1])],
        )
        .unwrap()
    }

    #[test]
    fn depth_one_closure_has_three_rays() {
        let sys = two_dim_system();
        let tol = Tolerance::default();
        let m = materialize_system(&sys, 1, StateEquality::Projective, &tol, 100).unwrap();
        assert_eq!(m.reachable, 3);
        assert!(m.frontier.is_empty());
        assert!(!is_static(&m.coalgebra));
    }

    #[test]
    fn truncation_reproduces_born_table() {
        let sys = two_dim_system();
        let m = materialize_system(&sys, 0, StateEquality::Vector, &Tolerance::default(), 100).unwrap();
        let chu = truncate(&m.coalgebra);
        let born_values = sys.born_table();
        for (q, expected) in born_values.iter().enumerate() {
            assert!(chu.eval(0, q).eq_within(&Value::Float(*expected), 1e-15));
        }
    }

    #[test]
    fn scaled_states_are_bisimilar_in_materialization() {
        let sys = HilbertSystem::new(
            2,
            vec![StateVector::real(&[1.0, 1.0]).unwrap(), StateVector::real(&[2.0, 2.0]).unwrap()],
            vec![Subspace::coordinate(2, &[0]), Subspace::coordinate(2, &[1])],
        )
        .unwrap();
        let tol = Tolerance::default();
        let m = materialize_system(&sys, 3, StateEquality::Vector, &tol, 100).unwrap();
        assert!(m.frontier.is_empty());
        let n = m.coalgebra.len();
        let rel = Relation::new((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| {
            projective_equiv(&m.states[i], &m.states[j], tol.eps_eq).unwrap()
        }));
        assert!(rel.contains(0, 1));
        assert!(is_bisimulation(&rel, &m.coalgebra, &m.coalgebra, &tol).unwrap());
    }

    #[test]
    fn projective_quotient_requires_ray_dedup() {
        let sys = HilbertSystem::new(
            2,
            vec![StateVector::real(&[1.0, 1.0]).unwrap(), StateVector::real(&[3.0, 3.0]).unwrap()],
            vec![Subspace::coordinate(2, &[0])],
        )
        .unwrap();
        let tol = Tolerance::default();
        let exact = materialize_system(&sys, 0, StateEquality::Vector, &tol, 100).unwrap();
        assert!(matches!(projective_quotient(&exact, &tol), Err(QuantumError::NotRayDeduplicated(..))));
        let rays = materialize_system(&sys, 0, StateEquality::Projective, &tol, 100).unwrap();
        assert_eq!(rays.reachable, 1);
        let pq = projective_quotient(&rays, &tol).unwrap();
        assert_eq!(pq.rays.len(), 2); // the seed ray plus the absorbing escape
    }

    #[test]
    fn discriminating_questions_include_coordinates() {
        let qs = discriminating_questions(&[e(2, 0)], 2).unwrap();
        assert!(qs.iter().any(|s| s.same_as(&Subspace::coordinate(2, &[0]), 1e-12)));
        assert!(qs.iter().any(|s| s.same_as(&Subspace::coordinate(2, &[1]), 1e-12)));
        let (a, b) = (e(2, 0), e(2, 1));
        let qs = discriminating_questions(&[a.clone(), b.clone()], 2).unwrap();
        let row = |psi: &StateVector| qs.iter().map(|s| born(psi, s).unwrap()).collect::<Vec<_>>();
        assert_ne!(row(&a), row(&b));
    }

    #[test]
    fn subspace_operations() {
        let s = Subspace::coordinate(3, &[0, 1]);
        let comp = s.orthogonal_complement();
        assert!(comp.same_as(&Subspace::coordinate(3, &[2]), 1e-12));
        assert!(s.join(&comp).same_as(&Subspace::full(3), 1e-12));
        let bad = vec![basis_vector(2, 0), basis_vector(2, 0)];
        assert!(matches!(Subspace::from_orthonormal(2, bad), Err(QuantumError::NotOrthonormal(_))));
    }
}
