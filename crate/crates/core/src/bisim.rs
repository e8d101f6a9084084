//! Bisimulation: relation checking, the largest bisimulation by partition
//! refinement, and strongly extensional quotients.

use std::collections::{BTreeSet, HashMap};

use crate::coalgebra::{disjoint_union, same_questions, Answer, CoalgebraError, FiniteCoalgebra};
use crate::value::{Tolerance, ValueKey};

/// A relation between the carriers of two coalgebras, by state index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Relation { pairs: pairs.into_iter().collect() }
    }

    pub fn identity(n: usize) -> Self {
        Relation::new((0..n).map(|x| (x, x)))
    }

    /// Resolves id pairs against the two carriers.
    pub fn from_ids(
        a: &FiniteCoalgebra,
        b: &FiniteCoalgebra,
        pairs: &[(String, String)],
    ) -> Result<Self, CoalgebraError> {
        pairs.iter().map(|(x, y)| Ok((a.state_index(x)?, b.state_index(y)?))).collect::<Result<BTreeSet<_>, _>>().map(Relation::new)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.contains(&(x, y))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A partition of `0..n` into nonempty blocks. Blocks are kept sorted, and
/// ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds the partition whose blocks are the classes of equal labels.
    pub fn from_labels<K: Eq + std::hash::Hash>(labels: &[K]) -> Self {
        let mut index: HashMap<&K, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (x, k) in labels.iter().enumerate() {
            let b = *index.entry(k).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(x);
            block_of.push(b);
        }
        Partition { block_of, blocks }
    }

    pub fn discrete(n: usize) -> Self {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    /// The partition induced on `elements` (re-indexed `0..elements.len()`).
    pub fn restrict(&self, elements: &[usize]) -> Partition {
        Partition::from_labels(&elements.iter().map(|&x| self.block_of[x]).collect::<Vec<_>>())
    }

    /// Blocks rendered through `name`, e.g. `[[a, b], [c]]`.
    pub fn render(&self, name: impl Fn(usize) -> String) -> Vec<Vec<String>> {
        self.blocks.iter().map(|b| b.iter().map(|&x| name(x)).collect()).collect()
    }
}

/// Checks both clauses of the bisimulation condition for every related pair
/// and every question.
pub fn is_bisimulation(
    r: &Relation,
    a: &FiniteCoalgebra,
    b: &FiniteCoalgebra,
    tol: &Tolerance,
) -> Result<bool, CoalgebraError> {
    same_questions(a.questions(), b.questions())?;
    for &(x, y) in &r.pairs {
        if x >= a.len() {
            return Err(CoalgebraError::UnknownState(format!("#{x} (left carrier has {})", a.len())));
        }
        if y >= b.len() {
            return Err(CoalgebraError::UnknownState(format!("#{y} (right carrier has {})", b.len())));
        }
    }
    for &(x, y) in &r.pairs {
        for (left, right) in a.row(x).iter().zip(b.row(y)) {
            let ok = match (left, right) {
                (Answer::No, Answer::No) => true,
                (Answer::Yes { prob: p, next: x2 }, Answer::Yes { prob: q, next: y2 }) => {
                    p.eq_within(q, tol.eps_eq) && r.contains(*x2, *y2)
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

/// Outcome of [`refine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub partition: Partition,
    pub rounds: usize,
}

type Signature = Vec<Option<(ValueKey, usize)>>;

/// Moore-style refinement: every round re-signs each state by its current
/// block and, per question, "no" or the grid key of the probability together
/// with the block of the successor. Stops when the block count is stable.
pub fn refine(a: &FiniteCoalgebra, tol: &Tolerance) -> Refinement {
    let n = a.len();
    let mut current = vec![0usize; n];
    let mut count = usize::from(n > 0);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut index: HashMap<(usize, Signature), usize> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for x in 0..n {
            let sig: Signature = a
                .row(x)
                .iter()
                .map(|ans| match ans {
                    Answer::No => None,
                    Answer::Yes { prob, next } => Some((prob.grid_key(tol.eps_grid), current[*next])),
                })
                .collect();
            let fresh = index.len();
            next.push(*index.entry((current[x], sig)).or_insert(fresh));
        }
        let new_count = index.len();
        current = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    Refinement { partition: Partition::from_labels(&current), rounds }
}

/// Largest bisimulation between `a` and `b`, as a partition of `a ⊎ b`
/// (states of `a` first, then states of `b`).
pub fn largest_bisimulation(
    a: &FiniteCoalgebra,
    b: &FiniteCoalgebra,
    tol: &Tolerance,
) -> Result<Partition, CoalgebraError> {
    let u = disjoint_union(a, b)?;
    Ok(refine(&u.coalgebra, tol).partition)
}

pub fn bisimilar(
    a: &FiniteCoalgebra,
    x: usize,
    b: &FiniteCoalgebra,
    y: usize,
    tol: &Tolerance,
) -> Result<bool, CoalgebraError> {
    if x >= a.len() {
        return Err(CoalgebraError::UnknownState(format!("#{x}")));
    }
    if y >= b.len() {
        return Err(CoalgebraError::UnknownState(format!("#{y}")));
    }
    Ok(largest_bisimulation(a, b, tol)?.same_block(x, a.len() + y))
}

/// A coalgebra quotiented by its largest auto-bisimulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Quotient {
    pub coalgebra: FiniteCoalgebra,
    /// Homomorphism from the original carrier onto the quotient.
    pub projection: Vec<usize>,
}

/// Quotient by the largest bisimulation on `a`. Each block is represented
/// by its first member, whose id and answers it inherits.
pub fn strongly_extensional_quotient(a: &FiniteCoalgebra, tol: &Tolerance) -> Quotient {
    let partition = refine(a, tol).partition;
    let projection: Vec<usize> = (0..a.len()).map(|x| partition.block_of(x)).collect();
    let reps: Vec<usize> = partition.blocks().iter().map(|b| b[0]).collect();
    let states = reps.iter().map(|&x| a.states()[x].clone()).collect();
    let table = reps
        .iter()
        .flat_map(|&x| a.row(x).iter().cloned().map(|ans| ans.map_next(|n| projection[n])))
        .collect();
    Quotient {
        coalgebra: FiniteCoalgebra::from_parts_unchecked(a.mode(), a.questions().to_vec(), states, table),
        projection,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalgebra::check_homomorphism;
    use crate::value::{NumericMode, Value};

    fn ids(p: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{p}{i}")).collect()
    }

    fn yes(n: i64, d: i64, next: usize) -> Answer {
        Answer::yes(Value::ratio(n, d), next)
    }

    fn coalg(nq: usize, rows: Vec<Vec<Answer>>) -> FiniteCoalgebra {
        let n = rows.len();
        FiniteCoalgebra::new(NumericMode::Rational, ids("q", nq), ids("x", n), rows.into_iter().flatten().collect())
            .unwrap()
    }

    #[test]
    fn trivial_relations() {
        let a = coalg(1, vec![vec![yes(1, 2, 1)], vec![Answer::No]]);
        let tol = Tolerance::exact();
        assert!(is_bisimulation(&Relation::default(), &a, &a, &tol).unwrap());
        assert!(is_bisimulation(&Relation::identity(2), &a, &a, &tol).unwrap());
        assert!(!is_bisimulation(&Relation::new([(0, 1)]), &a, &a, &tol).unwrap());
        assert!(is_bisimulation(&Relation::new([(5, 0)]), &a, &a, &tol).is_err());
    }

    #[test]
    fn identical_self_loops_form_one_block() {
        let a = coalg(2, vec![vec![yes(1, 2, 0), Answer::No], vec![yes(1, 2, 1), Answer::No], vec![yes(1, 2, 0), Answer::No]]);
        assert_eq!(refine(&a, &Tolerance::exact()).partition.num_blocks(), 1);
    }

    #[test]
    fn one_answer_difference_separates_immediately() {
        let a = coalg(1, vec![vec![Answer::No], vec![yes(1, 1, 1)]]);
        let r = refine(&a, &Tolerance::exact());
        assert_eq!(r.partition.num_blocks(), 2);
        assert!(r.rounds <= 2);
    }

    #[test]
    fn successor_identity_does_not_matter() {
        // x0 -> x1, x2 -> x3; x1 and x3 are bisimilar dead ends.
        let a = coalg(
            1,
            vec![vec![yes(1, 3, 1)], vec![Answer::No], vec![yes(1, 3, 3)], vec![Answer::No]],
        );
        assert!(bisimilar(&a, 0, &a, 2, &Tolerance::exact()).unwrap());
        assert!(!bisimilar(&a, 0, &a, 1, &Tolerance::exact()).unwrap());
    }

    #[test]
    fn cross_coalgebra_partition_is_ordered() {
        let a = coalg(1, vec![vec![yes(1, 2, 0)]]);
        let b = coalg(1, vec![vec![Answer::No], vec![yes(1, 2, 1)]]);
        let p = largest_bisimulation(&a, &b, &Tolerance::exact()).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn quotient_projection_is_a_homomorphism() {
        let a = coalg(
            2,
            vec![
                vec![yes(1, 2, 1), Answer::No],
                vec![yes(1, 1, 1), yes(1, 4, 0)],
                vec![yes(1, 2, 3), Answer::No],
                vec![yes(1, 1, 3), yes(1, 4, 2)],
            ],
        );
        let q = strongly_extensional_quotient(&a, &Tolerance::exact());
        assert_eq!(q.coalgebra.len(), 2);
        assert!(check_homomorphism(&a, &q.coalgebra, &q.projection, 0.0).unwrap());
        let again = strongly_extensional_quotient(&q.coalgebra, &Tolerance::exact());
        assert_eq!(again.coalgebra, q.coalgebra);
        assert_eq!(refine(&q.coalgebra, &Tolerance::exact()).partition, Partition::discrete(2));
    }

    #[test]
    fn float_probabilities_group_on_the_grid() {
        let a = FiniteCoalgebra::new(
            NumericMode::Float,
            ids("q", 1),
            ids("x", 2),
            vec![Answer::yes(Value::Float(0.3), 0), Answer::yes(Value::Float(0.3 + 1e-13), 1)],
        )
        .unwrap();
        assert!(bisimilar(&a, 0, &a, 1, &Tolerance::default()).unwrap());
        assert!(!bisimilar(&a, 0, &a, 1, &Tolerance::exact()).unwrap());
    }

    #[test]
    fn partition_restriction() {
        let p = Partition::from_labels(&[7, 3, 7, 3, 1]);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 3], vec![4]]);
        assert_eq!(p.restrict(&[1, 3, 4]).blocks(), &[vec![0, 1], vec![2]]);
    }
}
