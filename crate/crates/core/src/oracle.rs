//! Slow, direct reference procedures. Tests and the verification suite
//! compare the main algorithms against these; nothing here is shared with
//! the code under test beyond the data types.

use crate::coalgebra::{Answer, FiniteCoalgebra};
use crate::quantum::{c, CVector, C64};
use crate::value::Tolerance;

fn answers_match(a: &Answer, b: &Answer, eps: f64, related: impl Fn(usize, usize) -> bool) -> bool {
    match (a, b) {
        (Answer::No, Answer::No) => true,
        (Answer::Yes { prob: p, next: x }, Answer::Yes { prob: q, next: y }) => p.eq_within(q, eps) && related(*x, *y),
        _ => false,
    }
}

/// Greatest bisimulation between `a` and `b` as a boolean matrix, computed
/// as a greatest fixpoint: start from the full relation and delete
/// violating pairs until nothing changes.
pub fn greatest_bisimulation(a: &FiniteCoalgebra, b: &FiniteCoalgebra, tol: &Tolerance) -> Vec<Vec<bool>> {
    let (n, m) = (a.len(), b.len());
    let nq = a.questions().len();
    let mut rel = vec![vec![true; m]; n];
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..m {
                if rel[x][y] {
                    let ok = (0..nq).all(|q| answers_match(a.answer(x, q), b.answer(y, q), tol.eps_eq, |s, t| rel[s][t]));
                    if !ok {
                        rel[x][y] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// Block labels (first-appearance order) of the greatest auto-bisimulation.
pub fn bisimulation_classes(a: &FiniteCoalgebra, tol: &Tolerance) -> Vec<usize> {
    let rel = greatest_bisimulation(a, a, tol);
    let mut labels: Vec<Option<usize>> = vec![None; a.len()];
    let mut next = 0;
    for x in 0..a.len() {
        if labels[x].is_none() {
            for y in x..a.len() {
                if rel[x][y] && labels[y].is_none() {
                    labels[y] = Some(next);
                }
            }
            next += 1;
        }
    }
    labels.into_iter().map(|l| l.expect("every state labelled")).collect()
}

/// Whether two label vectors describe the same partition.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// `ψ = λ φ` for some `λ`, searched over the componentwise ratios
/// `λ = ψ_k / φ_k`; `eps` bounds `‖ψ − λφ‖ / ‖ψ‖`.
pub fn scalar_multiple(psi: &CVector, phi: &CVector, eps: f64) -> bool {
    if psi.len() != phi.len() {
        return false;
    }
    let floor = 1e-12 * phi.norm();
    (0..phi.len()).filter(|&k| phi[k].norm() > floor).any(|k| {
        let lambda: C64 = psi[k] / phi[k];
        (psi - phi * lambda).norm() <= eps * psi.norm()
    })
}

/// Every function `0..n → 0..m`, in lexicographic order.
pub fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    if m == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut f = vec![0; n];
    loop {
        out.push(f.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            f[i] += 1;
            if f[i] < m {
                break;
            }
            f[i] = 0;
        }
    }
}

/// Every permutation of `0..n`.
pub fn all_bijections(n: usize) -> Vec<Vec<usize>> {
    all_functions(n, n).into_iter().filter(|f| (0..n).all(|y| f.contains(&y))).collect()
}

/// Every homomorphism `a → b`, by exhaustive search over carrier maps.
pub fn all_homomorphisms(a: &FiniteCoalgebra, b: &FiniteCoalgebra, tol: &Tolerance) -> Vec<Vec<usize>> {
    let nq = a.questions().len();
    all_functions(a.len(), b.len())
        .into_iter()
        .filter(|h| {
            (0..a.len()).all(|x| {
                (0..nq).all(|q| {
                    let mapped = a.answer(x, q).clone().map_next(|y| h[y]);
                    answers_match(b.answer(h[x], q), &mapped, tol.eps_eq, |s, t| s == t)
                })
            })
        })
        .collect()
}

/// Unit vector with a single nonzero entry, for hand-built tests.
pub fn unit(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = c(1.0, 0.0);
    v
}
