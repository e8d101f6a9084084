//! Unitaries and antiunitaries, their action on states and questions, and
//! reconstruction of a semiunitary from its action on rays.

use super::linalg::{self, basis_vector, c, conjugate, isometry_defect, CMatrix, CVector, EPS_ORTH, EPS_RANK};
use super::{fidelity, HilbertSystem, QuantumError, Ray, StateEquality, StateVector, Subspace};
use crate::coalgebra::Materialized;
use crate::indexed::{GrothMorphism, QuestionMap};

/// `ψ ↦ M ψ`, or `ψ ↦ M ψ̄` when `antiunitary` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct Semiunitary {
    matrix: CMatrix,
    antiunitary: bool,
}

impl Semiunitary {
    pub fn new(matrix: CMatrix, antiunitary: bool) -> Result<Self, QuantumError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QuantumError::DimMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let defect = isometry_defect(&matrix);
        if defect > EPS_ORTH {
            return Err(QuantumError::NotUnitary(defect));
        }
        Ok(Semiunitary { matrix, antiunitary })
    }

    pub fn identity(dim: usize) -> Self {
        Semiunitary { matrix: CMatrix::identity(dim, dim), antiunitary: false }
    }

    /// Entrywise complex conjugation.
    pub fn conjugation(dim: usize) -> Self {
        Semiunitary { matrix: CMatrix::identity(dim, dim), antiunitary: true }
    }

    /// The unitary permuting basis vectors: `e_k ↦ e_{perm[k]}`.
    pub fn permutation(perm: &[usize]) -> Result<Self, QuantumError> {
        let n = perm.len();
        let mut m = CMatrix::zeros(n, n);
        for (k, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(QuantumError::DimMismatch { expected: n, found: p + 1 });
            }
            m[(p, k)] = c(1.0, 0.0);
        }
        Self::new(m, false)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_antiunitary(&self) -> bool {
        self.antiunitary
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        if self.antiunitary {
            &self.matrix * conjugate(v)
        } else {
            &self.matrix * v
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Semiunitary) -> Result<Semiunitary, QuantumError> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimMismatch { expected: self.dim(), found: other.dim() });
        }
        let inner = if self.antiunitary { other.matrix.map(|z| z.conj()) } else { other.matrix.clone() };
        Ok(Semiunitary { matrix: &self.matrix * inner, antiunitary: self.antiunitary ^ other.antiunitary })
    }

    pub fn inverse(&self) -> Semiunitary {
        // (M K)⁻¹ = K M† = Mᵀ K
        let matrix = if self.antiunitary { self.matrix.transpose() } else { self.matrix.adjoint() };
        Semiunitary { matrix, antiunitary: self.antiunitary }
    }

    /// `U(S)`.
    pub fn image(&self, s: &Subspace) -> Result<Subspace, QuantumError> {
        if s.dim() != self.dim() {
            return Err(QuantumError::DimMismatch { expected: self.dim(), found: s.dim() });
        }
        let vs: Vec<CVector> = s.basis().iter().map(|b| self.apply(b)).collect();
        Subspace::span(self.dim(), &vs)
    }

    /// `U⁻¹(S)`.
    pub fn preimage(&self, s: &Subspace) -> Result<Subspace, QuantumError> {
        self.inverse().image(s)
    }

    /// The system with states `Uψ` and questions `U(S)`, keeping ids.
    pub fn image_system(&self, h: &HilbertSystem) -> Result<HilbertSystem, QuantumError> {
        let states = h.states.iter().map(|s| apply_semiunitary(self, s)).collect::<Result<Vec<_>, _>>()?;
        let questions = h.questions.iter().map(|s| self.image(s)).collect::<Result<Vec<_>, _>>()?;
        HilbertSystem::with_ids(h.dim, h.state_ids.clone(), states, h.question_ids.clone(), questions)
    }
}

pub fn apply_semiunitary(u: &Semiunitary, psi: &StateVector) -> Result<StateVector, QuantumError> {
    if psi.dim() != u.dim() {
        return Err(QuantumError::DimMismatch { expected: u.dim(), found: psi.dim() });
    }
    StateVector::new(u.apply(psi.amplitudes()))
}

/// Adds `U⁻¹(S)` for every question until the list is closed, giving up
/// after `limit` questions.
pub fn close_questions(u: &Semiunitary, questions: &[Subspace], eps: f64, limit: usize) -> Result<Vec<Subspace>, QuantumError> {
    let mut out: Vec<Subspace> = questions.to_vec();
    let mut next = 0;
    while next < out.len() {
        let pre = u.preimage(&out[next])?;
        if !out.iter().any(|s| s.same_as(&pre, eps)) {
            if out.len() == limit {
                return Err(QuantumError::QuestionsNotClosed(vec![format!("preimage of question {next}")]));
            }
            out.push(pre);
        }
        next += 1;
    }
    Ok(out)
}

/// The arrow induced by a semiunitary `U : H → K`: questions of `K` are
/// pulled back by `U⁻¹`, states pushed forward by `U`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiunitaryMorphism {
    /// From `K`'s question ids to `H`'s.
    pub qmap: QuestionMap,
    pub unitary: Semiunitary,
}

pub fn semiunitary_morphism(
    u: &Semiunitary,
    h: &HilbertSystem,
    k: &HilbertSystem,
    eps: f64,
) -> Result<SemiunitaryMorphism, QuantumError> {
    for dim in [h.dim, k.dim] {
        if dim != u.dim() {
            return Err(QuantumError::DimMismatch { expected: u.dim(), found: dim });
        }
    }
    let mut map = Vec::with_capacity(k.questions.len());
    let mut missing = Vec::new();
    for (id, s) in k.question_ids.iter().zip(&k.questions) {
        let pre = u.preimage(s)?;
        match h.questions.iter().position(|t| t.same_as(&pre, eps)) {
            Some(j) => map.push(j),
            None => missing.push(id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(QuantumError::QuestionsNotClosed(missing));
    }
    let qmap = QuestionMap::new(k.question_ids.clone(), h.question_ids.clone(), map)?;
    Ok(SemiunitaryMorphism { qmap, unitary: u.clone() })
}

impl SemiunitaryMorphism {
    /// The carrier map between materializations of `H` and `K`: each state
    /// goes to the state of `mk` equal to its image (absorbing states to
    /// absorbing states).
    pub fn carrier_map(
        &self,
        mh: &Materialized<StateVector>,
        mk: &Materialized<StateVector>,
        equality: StateEquality,
        eps: f64,
    ) -> Result<GrothMorphism, QuantumError> {
        let mut carrier = Vec::with_capacity(mh.states.len());
        for (x, s) in mh.states.iter().enumerate() {
            let image = apply_semiunitary(&self.unitary, s)?;
            let y = mk
                .find(&image, mh.is_absorbing(x), |a, b| equality.same(a, b, eps))
                .ok_or_else(|| QuantumError::CarrierNotClosed(mh.coalgebra.states()[x].clone()))?;
            carrier.push(y);
        }
        Ok(GrothMorphism { qmap: self.qmap.clone(), carrier })
    }
}

/// The rays `[e_j]`, `[e_0 + e_j]` and `[e_0 + i·e_j]`.
pub fn probe_rays(n: usize) -> Vec<Ray> {
    let mut rays: Vec<Ray> = (0..n).map(|j| Ray::from_vector(&basis_vector(n, j), 0.0)).collect();
    for j in 1..n {
        rays.push(Ray::from_vector(&(basis_vector(n, 0) + basis_vector(n, j)), 0.0));
    }
    for j in 1..n {
        rays.push(Ray::from_vector(&(basis_vector(n, 0) + basis_vector(n, j) * c(0.0, 1.0)), 0.0));
    }
    rays
}

/// A map on rays given by a finite table.
#[derive(Debug, Clone, PartialEq)]
pub struct RayMap {
    pub pairs: Vec<(Ray, Ray)>,
}

impl RayMap {
    pub fn from_fn(rays: &[Ray], f: impl Fn(&Ray) -> Ray) -> Self {
        RayMap { pairs: rays.iter().map(|r| (r.clone(), f(r))).collect() }
    }

    /// The action of `u` on the given rays.
    pub fn of_semiunitary(u: &Semiunitary, rays: &[Ray], eps: f64) -> Self {
        Self::from_fn(rays, |r| Ray::from_vector(&u.apply(r.representative()), eps))
    }

    pub fn lookup(&self, ray: &Ray, eps: f64) -> Option<&Ray> {
        self.pairs.iter().find(|(r, _)| 1.0 - fidelity(r.representative(), ray.representative()) <= eps).map(|(_, s)| s)
    }
}

/// Builds a semiunitary whose action on rays agrees with `map` on the
/// probe rays of dimension `n`. The images of `[e_j]` fix the columns up to
/// phase, those of `[e_0 + e_j]` fix the relative phases, and those of
/// `[e_0 + i·e_j]` decide between linear and antilinear.
pub fn wigner_reconstruct(map: &RayMap, n: usize, eps: f64) -> Result<Semiunitary, QuantumError> {
    if n <= 2 {
        return Err(QuantumError::DimensionTooSmall(n));
    }
    let probes = probe_rays(n);
    let image = |k: usize| -> Result<CVector, QuantumError> {
        let r = map
            .lookup(&probes[k], eps)
            .ok_or_else(|| QuantumError::InconsistentRayMap(format!("no image for probe ray {}", probes[k].render(3))))?;
        if r.dim() != n {
            return Err(QuantumError::DimMismatch { expected: n, found: r.dim() });
        }
        Ok(r.representative().unscale(r.representative().norm()))
    };
    let u: Vec<CVector> = (0..n).map(image).collect::<Result<_, _>>()?;
    for i in 0..n {
        for j in i + 1..n {
            if fidelity(&u[i], &u[j]) > eps {
                return Err(QuantumError::InconsistentRayMap(format!(
                    "images of orthogonal basis rays {i} and {j} are not orthogonal"
                )));
            }
        }
    }
    let mut columns = vec![u[0].clone()];
    for j in 1..n {
        let w = image(n + j - 1)?;
        let (a, b) = (linalg::inner(&u[0], &w), linalg::inner(&u[j], &w));
        let residual = (&w - &u[0] * a - &u[j] * b).norm();
        if residual > eps.sqrt() || a.norm() <= EPS_RANK || b.norm() <= EPS_RANK || (a.norm() - b.norm()).abs() > eps.sqrt() {
            return Err(QuantumError::InconsistentRayMap(format!(
                "image of [e_0 + e_{j}] is not an equal-weight combination of the images of e_0 and e_{j}"
            )));
        }
        let phase = b / a;
        columns.push(&u[j] * (phase / phase.norm()));
    }
    let mut flag: Option<bool> = None;
    for j in 1..n {
        let w = image(2 * n + j - 2)?;
        let linear = &columns[0] + &columns[j] * c(0.0, 1.0);
        let antilinear = &columns[0] - &columns[j] * c(0.0, 1.0);
        let (fl, fa) = (fidelity(&linear, &w), fidelity(&antilinear, &w));
        let this = if 1.0 - fl <= eps {
            false
        } else if 1.0 - fa <= eps {
            true
        } else {
            return Err(QuantumError::InconsistentRayMap(format!(
                "image of [e_0 + i e_{j}] fits neither a unitary nor an antiunitary"
            )));
        };
        if flag.is_some_and(|f| f != this) {
            return Err(QuantumError::InconsistentRayMap("probe rays disagree on linearity".into()));
        }
        flag = Some(this);
    }
    let matrix = CMatrix::from_columns(&columns);
    let defect = isometry_defect(&matrix);
    if defect > eps.sqrt().max(EPS_ORTH) {
        return Err(QuantumError::InconsistentRayMap(format!("reconstructed matrix is not unitary (defect {defect:e})")));
    }
    Ok(Semiunitary { matrix, antiunitary: flag.unwrap_or(false) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::is_bisimulation;
    use crate::indexed::groth_check;
    use crate::quantum::{born, materialize_system, StateVector};
    use crate::value::Tolerance;

    fn sample_unitary() -> Semiunitary {
        // a rotation mixing e0 and e1 with a phase on e2
        let (s, co) = (0.6, 0.8);
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[c(co, 0.0), c(-s, 0.0), c(0.0, 0.0), c(0.0, s), c(0.0, co), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
        );
        Semiunitary::new(m, false).unwrap()
    }

    fn psi() -> StateVector {
        StateVector::from_slice(&[c(0.3, -0.1), c(0.5, 0.7), c(-0.2, 0.4)]).unwrap()
    }

    #[test]
    fn rejects_non_unitary() {
        let m = CMatrix::from_diagonal_element(2, 2, c(2.0, 0.0));
        assert!(matches!(Semiunitary::new(m, false), Err(QuantumError::NotUnitary(_))));
    }

    #[test]
    fn conjugation_fixes_real_vectors() {
        let v = StateVector::real(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(apply_semiunitary(&Semiunitary::conjugation(3), &v).unwrap(), v);
        assert_eq!(apply_semiunitary(&Semiunitary::identity(3), &psi()).unwrap(), psi());
    }

    #[test]
    fn compose_and_inverse() {
        for anti in [false, true] {
            let u = Semiunitary::new(sample_unitary().matrix().clone(), anti).unwrap();
            let v = psi().amplitudes().clone();
            let back = u.inverse().apply(&u.apply(&v));
            assert!((back - &v).norm() < 1e-12);
            let uu = u.compose(&u).unwrap();
            assert!(!uu.is_antiunitary());
            assert!((uu.apply(&v) - u.apply(&u.apply(&v))).norm() < 1e-12);
            assert!((u.apply(&v).norm() - v.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_intertwines() {
        let s = Subspace::span(3, &[CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)])]).unwrap();
        for anti in [false, true] {
            let u = Semiunitary::new(sample_unitary().matrix().clone(), anti).unwrap();
            let v = psi().amplitudes().clone();
            let lhs = s.project(&u.apply(&v));
            let rhs = u.apply(&u.preimage(&s).unwrap().project(&v));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn permutation_morphism_permutes_columns() {
        let h = HilbertSystem::new(3, vec![psi()], (0..3).map(|k| Subspace::coordinate(3, &[k])).collect()).unwrap();
        let u = Semiunitary::permutation(&[1, 2, 0]).unwrap();
        let m = semiunitary_morphism(&u, &h, &h, 1e-9).unwrap();
        // U⁻¹ span{e_k} = span{e_{k-1}}
        assert_eq!(m.qmap.map(), &[2, 0, 1]);
        let k = HilbertSystem::new(3, vec![apply_semiunitary(&u, &psi()).unwrap()], h.questions.clone()).unwrap();
        for q in 0..3 {
            let lhs = born(&k.states[0], &k.questions[q]).unwrap();
            let rhs = born(&h.states[0], &h.questions[m.qmap.apply(q)]).unwrap();
            assert!((lhs - rhs).abs() < 1e-15);
        }
    }

    #[test]
    fn morphism_passes_groth_check_on_materializations() {
        let tol = Tolerance::default();
        let qs = crate::quantum::discriminating_questions(&[psi()], 3).unwrap();
        let h = HilbertSystem::new(3, vec![psi()], qs).unwrap();
        for anti in [false, true] {
            let u = Semiunitary::new(sample_unitary().matrix().clone(), anti).unwrap();
            let k = u.image_system(&h).unwrap();
            let m = semiunitary_morphism(&u, &h, &k, 1e-9).unwrap();
            let mh = materialize_system(&h, 2, StateEquality::Vector, &tol, 10_000).unwrap();
            let mk = materialize_system(&k, 2, StateEquality::Vector, &tol, 10_000).unwrap();
            let g = m.carrier_map(&mh, &mk, StateEquality::Vector, tol.eps_eq).unwrap();
            assert!(groth_check(&g, &mh.coalgebra, &mk.coalgebra, 1e-8).unwrap());
        }
    }

    #[test]
    fn missing_preimages_are_listed() {
        let h = HilbertSystem::new(3, vec![psi()], vec![Subspace::coordinate(3, &[0])]).unwrap();
        let u = Semiunitary::permutation(&[1, 2, 0]).unwrap();
        match semiunitary_morphism(&u, &h, &h, 1e-9) {
            Err(QuantumError::QuestionsNotClosed(ids)) => assert_eq!(ids, vec!["q0".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
        let closed = close_questions(&u, &h.questions, 1e-9, 10).unwrap();
        assert_eq!(closed.len(), 3);
        let h3 = HilbertSystem::new(3, vec![psi()], closed).unwrap();
        assert!(semiunitary_morphism(&u, &h3, &h3, 1e-9).is_ok());
    }

    #[test]
    fn wigner_identity_and_conjugation() {
        let probes = probe_rays(3);
        let id = wigner_reconstruct(&RayMap::of_semiunitary(&Semiunitary::identity(3), &probes, 1e-9), 3, 1e-9).unwrap();
        assert!(!id.is_antiunitary());
        assert!((id.matrix() - CMatrix::identity(3, 3)).norm() < 1e-12);
        let conj = wigner_reconstruct(&RayMap::of_semiunitary(&Semiunitary::conjugation(3), &probes, 1e-9), 3, 1e-9).unwrap();
        assert!(conj.is_antiunitary());
        assert!((conj.matrix() - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn wigner_round_trip_on_sample() {
        for anti in [false, true] {
            let u = Semiunitary::new(sample_unitary().matrix().clone(), anti).unwrap();
            let map = RayMap::of_semiunitary(&u, &probe_rays(3), 1e-9);
            let r = wigner_reconstruct(&map, 3, 1e-9).unwrap();
            assert_eq!(r.is_antiunitary(), anti);
            let v = psi().amplitudes().clone();
            assert!(1.0 - fidelity(&r.apply(&v), &u.apply(&v)) < 1e-12);
        }
    }

    #[test]
    fn wigner_rejects_small_dimensions_and_bad_maps() {
        let map = RayMap::of_semiunitary(&Semiunitary::identity(2), &probe_rays(2), 1e-9);
        assert_eq!(wigner_reconstruct(&map, 2, 1e-9), Err(QuantumError::DimensionTooSmall(2)));
        // send every probe ray to [e_0]
        let e0 = Ray::from_vector(&basis_vector(3, 0), 0.0);
        let collapse = RayMap::from_fn(&probe_rays(3), |_| e0.clone());
        assert!(matches!(wigner_reconstruct(&collapse, 3, 1e-9), Err(QuantumError::InconsistentRayMap(_))));
    }

    #[test]
    fn projective_equivalence_is_a_bisimulation_after_symmetry() {
        let tol = Tolerance::default();
        let h = HilbertSystem::new(
            3,
            vec![psi(), psi().scaled(c(0.0, 2.0)).unwrap()],
            (0..3).map(|k| Subspace::coordinate(3, &[k])).collect(),
        )
        .unwrap();
        let k = sample_unitary().image_system(&h).unwrap();
        let mk = materialize_system(&k, 2, StateEquality::Vector, &tol, 1000).unwrap();
        let n = mk.states.len();
        let rel = crate::bisim::Relation::new(
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| mk.is_absorbing(i) == mk.is_absorbing(j))
                .filter(|&(i, j)| StateEquality::Projective.same(&mk.states[i], &mk.states[j], tol.eps_eq)),
        );
        assert!(is_bisimulation(&rel, &mk.coalgebra, &mk.coalgebra, &tol).unwrap());
    }
}
