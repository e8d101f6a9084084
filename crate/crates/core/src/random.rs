//! Seeded generators for finite coalgebras, Chu spaces, question maps and
//! homomorphisms.

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chu::ChuSpace;
use crate::coalgebra::{Answer, FiniteCoalgebra};
use crate::indexed::QuestionMap;
use crate::value::{NumericMode, Value, ValueAlphabet};

/// The generator used everywhere randomness is needed.
pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for sub-task `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn ids(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Probabilities from `{1/4, 1/2, 3/4, 1}`, so that random coalgebras have
/// plenty of coincidences for bisimulation to find.
pub fn random_probability<R: Rng + ?Sized>(rng: &mut R, mode: NumericMode) -> Value {
    let k = rng.random_range(1..=4);
    match mode {
        NumericMode::Rational => Value::Rational(Rational64::new(k, 4)),
        NumericMode::Float => Value::Float(k as f64 / 4.0),
    }
}

/// Each cell is "no" with probability `no_rate`, otherwise a random
/// probability and successor.
pub fn random_coalgebra<R: Rng + ?Sized>(
    rng: &mut R,
    states: usize,
    questions: usize,
    mode: NumericMode,
    no_rate: f64,
) -> FiniteCoalgebra {
    FiniteCoalgebra::from_fn(mode, ids("q", questions), ids("x", states), |_, _| {
        if rng.random_bool(no_rate) {
            Answer::No
        } else {
            Answer::yes(random_probability(rng, mode), rng.random_range(0..states))
        }
    })
    .expect("generated tables are well formed")
}

/// A `[0, 1]`-valued Chu space with entries from `{0, 1/4, .., 1}`.
pub fn random_chu<R: Rng + ?Sized>(rng: &mut R, points: usize, attributes: usize, mode: NumericMode) -> ChuSpace {
    ChuSpace::from_fn(ValueAlphabet::numeric(mode), ids("x", points), ids("a", attributes), |_, _| {
        if rng.random_bool(0.25) {
            Value::zero(mode)
        } else {
            random_probability(rng, mode)
        }
    })
    .expect("generated tables are well formed")
}

/// A uniformly random function `0..n → 0..m`.
pub fn random_function<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..m)).collect()
}

/// A random surjection `0..n → 0..m` (`n ≥ m`).
pub fn random_surjection<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Vec<usize> {
    assert!(n >= m, "no surjection from {n} onto {m}");
    let mut map: Vec<usize> = (0..m).chain((m..n).map(|_| rng.random_range(0..m.max(1)))).collect();
    map.shuffle(rng);
    map
}

/// A random question map onto `target`, with `source_len` source questions
/// named `p0, p1, ..`.
pub fn random_question_map<R: Rng + ?Sized>(
    rng: &mut R,
    source_len: usize,
    target: &[String],
    surjective: bool,
) -> QuestionMap {
    let map = if surjective {
        random_surjection(rng, source_len, target.len())
    } else {
        random_function(rng, source_len, target.len())
    };
    QuestionMap::new(ids("p", source_len), target.to_vec(), map).expect("indices in range")
}

/// A coalgebra `A` on `states ≥ |B|` states together with a surjective
/// homomorphism `h : A → B`: each state of `A` copies the answers of its
/// image, choosing successors at random among preimages.
pub fn random_homomorphism_into<R: Rng + ?Sized>(
    rng: &mut R,
    b: &FiniteCoalgebra,
    states: usize,
) -> (FiniteCoalgebra, Vec<usize>) {
    let h = random_surjection(rng, states, b.len());
    let mut preimages = vec![Vec::new(); b.len()];
    for (x, &y) in h.iter().enumerate() {
        preimages[y].push(x);
    }
    let a = FiniteCoalgebra::from_fn(b.mode(), b.questions().to_vec(), ids("z", states), |x, q| {
        b.answer(h[x], q).clone().map_next(|y| {
            let pre = &preimages[y];
            pre[rng.random_range(0..pre.len())]
        })
    })
    .expect("copied answers are well formed");
    (a, h)
}

/// Two copies of `a`: copy 0 is `a` itself, copy 1 answers like `a` but
/// jumps to a random copy of each successor. `x ↦ x` is a homomorphism
/// into the result, as is the projection back onto `a`.
pub fn random_blow_up<R: Rng + ?Sized>(rng: &mut R, a: &FiniteCoalgebra) -> FiniteCoalgebra {
    let n = a.len();
    let states = a.states().iter().cloned().chain(a.states().iter().map(|s| format!("{s}'"))).collect();
    FiniteCoalgebra::from_fn(a.mode(), a.questions().to_vec(), states, |x, q| {
        let copy = x / n.max(1);
        a.answer(x % n, q).clone().map_next(|y| if copy == 0 { y } else { y + n * rng.random_range(0..2) })
    })
    .expect("copied answers are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::check_homomorphism;

    #[test]
    fn generated_homomorphisms_are_valid() {
        let mut r = rng(3);
        for _ in 0..50 {
            let b = random_coalgebra(&mut r, 4, 3, NumericMode::Rational, 0.3);
            let (a, h) = random_homomorphism_into(&mut r, &b, 7);
            assert!(check_homomorphism(&a, &b, &h, 0.0).unwrap());
            let blow = random_blow_up(&mut r, &b);
            assert!(check_homomorphism(&b, &blow, &(0..4).collect::<Vec<_>>(), 0.0).unwrap());
            let proj: Vec<usize> = (0..8).map(|x| x % 4).collect();
            assert!(check_homomorphism(&blow, &b, &proj, 0.0).unwrap());
        }
    }

    #[test]
    fn substreams_differ() {
        let a: u64 = substream(1, 0).random();
        let b: u64 = substream(1, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, substream(1, 0).random::<u64>());
    }

    #[test]
    fn surjections_hit_everything() {
        let mut r = rng(9);
        for _ in 0..20 {
            let s = random_surjection(&mut r, 6, 4);
            assert!((0..4).all(|y| s.contains(&y)));
        }
    }
}
