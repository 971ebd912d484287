use num_traits::Zero;

use super::simplex::{solve_unchecked, LpOutcome, LpProblem};
use crate::rat::{add, identity, neg, zeros, Rat, Vector};

/// Nonnegative coefficients `λ` with `Σ λ_i g_i = target`, if any exist.
pub fn conic_combination(generators: &[Vector], target: &[Rat]) -> Option<Vector> {
    let n = target.len();
    let k = generators.len();
    if k == 0 {
        return target.iter().all(Zero::is_zero).then(Vec::new);
    }
    let e: Vec<Vector> = (0..n).map(|i| generators.iter().map(|g| g[i].clone()).collect()).collect();
    let a: Vec<Vector> = identity(k).iter().map(|row| neg(row)).collect();
    let p = LpProblem::feasibility(k, a, zeros(k), e, target.to_vec());
    match solve_unchecked(&p) {
        LpOutcome::Infeasible => None,
        other => other.point().cloned(),
    }
}

pub fn cone_contains(generators: &[Vector], v: &[Rat]) -> bool {
    conic_combination(generators, v).is_some()
}

/// Decides whether `cone(generators)` is a linear subspace with one LP: the
/// cone is a subspace iff `−Σ g_i` lies in it, since then each
/// `−g_j = Σ_{i≠j} g_i + Σ λ_i g_i`.
pub fn cone_is_subspace(generators: &[Vector]) -> bool {
    let Some(first) = generators.first() else {
        return true;
    };
    let total = generators.iter().fold(zeros(first.len()), |acc, g| add(&acc, g));
    cone_contains(generators, &neg(&total))
}

/// Certificate that a generator's negation lies outside the cone, or `None`
/// when the cone is a subspace. Returns the index of the first such generator.
pub fn first_irreversible(generators: &[Vector]) -> Option<usize> {
    (0..generators.len()).find(|&j| {
        !generators[j].iter().all(Zero::is_zero) && !cone_contains(generators, &neg(&generators[j]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::vec_from;

    #[test]
    fn subspace_examples() {
        assert!(cone_is_subspace(&[]));
        assert!(cone_is_subspace(&[vec_from(&[1, 0]), vec_from(&[-1, 0])]));
        assert!(!cone_is_subspace(&[vec_from(&[1, 0]), vec_from(&[0, 1])]));
        assert!(cone_is_subspace(&[
            vec_from(&[1, 0]),
            vec_from(&[-1, 0]),
            vec_from(&[0, 1]),
            vec_from(&[0, -1]),
        ]));
        // three vectors summing to zero span the plane
        assert!(cone_is_subspace(&[vec_from(&[1, 0]), vec_from(&[0, 1]), vec_from(&[-1, -1])]));
    }

    #[test]
    fn irreversible_generator_index() {
        let g = vec![vec_from(&[1, 0]), vec_from(&[-1, 0]), vec_from(&[0, 1])];
        assert_eq!(first_irreversible(&g), Some(2));
    }
}
