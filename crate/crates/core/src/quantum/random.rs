//! Seeded random states, subspaces, unitaries and systems.

use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{c, orthonormalize, CMatrix, CVector, C64, EPS_RANK};
use super::symmetry::Semiunitary;
use super::{discriminating_questions, HilbertSystem, QuantumError, StateVector, Subspace};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| gaussian(rng))
}

/// A state with independent complex Gaussian amplitudes.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        if let Ok(s) = StateVector::new(random_vector(rng, dim)) {
            return s;
        }
    }
}

/// A nonzero complex scalar with modulus in `[0.25, 4]`.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let modulus = 2f64.powf(rng.random_range(-2.0..=2.0));
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(modulus, angle)
}

/// Gram–Schmidt applied to a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Semiunitary {
    loop {
        let cols: Vec<CVector> = (0..dim).map(|_| random_vector(rng, dim)).collect();
        let basis = orthonormalize(&cols, EPS_RANK);
        if basis.len() == dim {
            let m = if dim == 0 { CMatrix::zeros(0, 0) } else { CMatrix::from_columns(&basis) };
            if let Ok(u) = Semiunitary::new(m, false) {
                return u;
            }
        }
    }
}

pub fn random_semiunitary<R: Rng + ?Sized>(rng: &mut R, dim: usize, antiunitary: bool) -> Semiunitary {
    let u = random_unitary(rng, dim);
    Semiunitary::new(u.matrix().clone(), antiunitary).expect("unitary by construction")
}

/// A subspace of the given rank spanned by Gaussian vectors.
pub fn random_subspace<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Subspace {
    loop {
        let vs: Vec<CVector> = (0..rank).map(|_| random_vector(rng, dim)).collect();
        let s = Subspace::span(dim, &vs).expect("dimensions agree");
        if s.rank() == rank {
            return s;
        }
    }
}

/// How [`random_system`] chooses questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuestionStyle {
    /// [`discriminating_questions`] of the generated states.
    Discriminating,
    /// The coordinate rays.
    Coordinate,
    /// Random subspaces of random rank between 1 and `dim − 1`.
    Random { count: usize },
}

pub fn random_system<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    states: usize,
    style: QuestionStyle,
) -> Result<HilbertSystem, QuantumError> {
    let psis: Vec<StateVector> = (0..states).map(|_| random_state(rng, dim)).collect();
    let questions = match style {
        QuestionStyle::Discriminating => discriminating_questions(&psis, dim)?,
        QuestionStyle::Coordinate => (0..dim).map(|k| Subspace::coordinate(dim, &[k])).collect(),
        QuestionStyle::Random { count } => (0..count)
            .map(|_| {
                let rank = if dim > 1 { rng.random_range(1..dim) } else { dim };
                random_subspace(rng, dim, rank)
            })
            .collect(),
    };
    HilbertSystem::new(dim, psis, questions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::isometry_defect;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_state(&mut ChaCha8Rng::seed_from_u64(5), 3);
        let b = random_state(&mut ChaCha8Rng::seed_from_u64(5), 3);
        assert_eq!(a, b);
    }

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in 1..5 {
            assert!(isometry_defect(random_unitary(&mut rng, dim).matrix()) < 1e-12);
        }
    }

    #[test]
    fn random_system_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_system(&mut rng, 3, 2, QuestionStyle::Random { count: 4 }).unwrap();
        assert_eq!(s.questions.len(), 4);
        assert!(s.questions.iter().all(|q| (1..3).contains(&q.rank())));
        let d = random_system(&mut rng, 3, 2, QuestionStyle::Discriminating).unwrap();
        assert!(d.questions.len() >= 3);
    }
}
