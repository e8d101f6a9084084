//! Isometric embeddings of a system into a larger "universal" space.

use super::linalg::{basis_vector, isometry_defect, null_space, CMatrix, CVector, EPS_ORTH, EPS_RANK};
use super::{HilbertSystem, QuantumError, StateVector, Subspace};
use crate::indexed::QuestionMap;

/// Dimension of the universal space when none is given.
pub const DEFAULT_UNIVERSAL_DIM: usize = 8;

/// `i⁻¹(S) = {v : P_S(i v) = i v}`, the null space of `(1 − P_S)·i`.
pub fn subspace_preimage(i: &CMatrix, s: &Subspace, eps_rank: f64) -> Result<Subspace, QuantumError> {
    if i.nrows() != s.dim() {
        return Err(QuantumError::DimMismatch { expected: i.nrows(), found: s.dim() });
    }
    let defect = isometry_defect(i);
    if defect > EPS_ORTH {
        return Err(QuantumError::NotIsometry(defect));
    }
    let d = i.nrows();
    let m = (CMatrix::identity(d, d) - s.projector()) * i;
    let basis = null_space(&m, eps_rank);
    Subspace::from_orthonormal(i.ncols(), basis)
}

/// A system transported into the universal space, with the question map
/// from the universal question list back to the original one.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub system: HilbertSystem,
    /// `f = i⁻¹`, from universal question ids to the original ids.
    pub qmap: QuestionMap,
    pub isometry: CMatrix,
}

/// Embeds `k` into dimension `universal` by `e_j ↦ e_{basis_map[j]}`
/// (identity placement when `basis_map` is `None`).
pub fn embed_system(k: &HilbertSystem, universal: usize, basis_map: Option<&[usize]>) -> Result<Embedding, QuantumError> {
    if k.dim > universal {
        return Err(QuantumError::DimTooLarge { dim: k.dim, universal });
    }
    let placement: Vec<usize> = match basis_map {
        Some(m) => m.to_vec(),
        None => (0..k.dim).collect(),
    };
    if placement.len() != k.dim
        || placement.iter().any(|&p| p >= universal)
        || (1..placement.len()).any(|a| placement[..a].contains(&placement[a]))
    {
        return Err(QuantumError::BadBasisMap(universal));
    }
    let columns: Vec<CVector> = placement.iter().map(|&p| basis_vector(universal, p)).collect();
    let isometry = if columns.is_empty() { CMatrix::zeros(universal, 0) } else { CMatrix::from_columns(&columns) };
    embed_with_isometry(k, isometry)
}

/// Embeds `k` along an arbitrary isometry. Each question `S` yields the
/// universal questions `i(S)` (same id) and, when the image is proper,
/// `i(S) ⊕ image(i)^⊥` (id suffixed `+perp`); both pull back to `S`.
pub fn embed_with_isometry(k: &HilbertSystem, isometry: CMatrix) -> Result<Embedding, QuantumError> {
    if isometry.ncols() != k.dim {
        return Err(QuantumError::DimMismatch { expected: k.dim, found: isometry.ncols() });
    }
    let defect = isometry_defect(&isometry);
    if defect > EPS_ORTH {
        return Err(QuantumError::NotIsometry(defect));
    }
    let d = isometry.nrows();
    let image_cols: Vec<CVector> = (0..k.dim).map(|j| isometry.column(j).into_owned()).collect();
    let image = Subspace::span(d, &image_cols)?;
    let perp = image.orthogonal_complement();
    let push = |s: &Subspace| -> Result<Subspace, QuantumError> {
        let vs: Vec<CVector> = s.basis().iter().map(|b| &isometry * b).collect();
        Subspace::span(d, &vs)
    };
    let states = k
        .states
        .iter()
        .map(|s| StateVector::new(&isometry * s.amplitudes()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut question_ids = Vec::new();
    let mut questions = Vec::new();
    for (id, s) in k.question_ids.iter().zip(&k.questions) {
        let pushed = push(s)?;
        question_ids.push(id.clone());
        if perp.rank() > 0 {
            questions.push(pushed.clone());
            question_ids.push(format!("{id}+perp"));
            questions.push(pushed.join(&perp));
        } else {
            questions.push(pushed);
        }
    }
    let mut map = Vec::with_capacity(questions.len());
    for (id, u) in question_ids.iter().zip(&questions) {
        let pre = subspace_preimage(&isometry, u, EPS_RANK)?;
        let j = k
            .questions
            .iter()
            .position(|s| s.same_as(&pre, 1e-8))
            .ok_or_else(|| QuantumError::QuestionsNotClosed(vec![id.clone()]))?;
        map.push(j);
    }
    let qmap = QuestionMap::new(question_ids.clone(), k.question_ids.clone(), map)?;
    let system = HilbertSystem::with_ids(d, k.state_ids.clone(), states, question_ids, questions)?;
    Ok(Embedding { system, qmap, isometry })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::born;
    use crate::quantum::linalg::c;

    fn embedding_2_into_4() -> CMatrix {
        CMatrix::from_columns(&[basis_vector(4, 1), basis_vector(4, 3)])
    }

    #[test]
    fn preimage_of_full_and_image() {
        let i = embedding_2_into_4();
        assert!(subspace_preimage(&i, &Subspace::full(4), EPS_RANK).unwrap().same_as(&Subspace::full(2), 1e-12));
        let image = Subspace::coordinate(4, &[1, 3]);
        assert!(subspace_preimage(&i, &image, EPS_RANK).unwrap().same_as(&Subspace::full(2), 1e-12));
        let perp = image.orthogonal_complement();
        assert_eq!(subspace_preimage(&i, &perp, EPS_RANK).unwrap().rank(), 0);
        let partial = Subspace::coordinate(4, &[0, 3]);
        assert!(subspace_preimage(&i, &partial, EPS_RANK).unwrap().same_as(&Subspace::coordinate(2, &[1]), 1e-12));
    }

    #[test]
    fn preimage_rejects_non_isometry() {
        let m = embedding_2_into_4() * c(2.0, 0.0);
        assert!(matches!(subspace_preimage(&m, &Subspace::full(4), EPS_RANK), Err(QuantumError::NotIsometry(_))));
    }

    fn system() -> HilbertSystem {
        HilbertSystem::new(
            2,
            vec![StateVector::from_slice(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap()],
            vec![Subspace::coordinate(2, &[0]), Subspace::ray(&CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn identity_embedding_is_unchanged() {
        let k = system();
        let e = embed_system(&k, 2, None).unwrap();
        assert_eq!(e.system.question_ids, k.question_ids);
        assert_eq!(e.system.states, k.states);
        assert!(e.system.questions.iter().zip(&k.questions).all(|(a, b)| a.same_as(b, 1e-12)));
        assert_eq!(e.qmap.map(), &[0, 1]);
    }

    #[test]
    fn born_values_survive_embedding() {
        let k = system();
        let e = embed_system(&k, 4, Some(&[2, 0])).unwrap();
        assert_eq!(e.system.questions.len(), 4);
        assert!(e.qmap.is_surjective());
        for (u, &j) in e.system.questions.iter().zip(e.qmap.map()) {
            let lhs = born(&e.system.states[0], u).unwrap();
            let rhs = born(&k.states[0], &k.questions[j]).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_errors() {
        let k = system();
        assert_eq!(embed_system(&k, 1, None), Err(QuantumError::DimTooLarge { dim: 2, universal: 1 }));
        assert_eq!(embed_system(&k, 4, Some(&[1, 1])), Err(QuantumError::BadBasisMap(4)));
    }
}
