//! Exact rational linear algebra and linear programming. Every geometric
//! predicate in the crate bottoms out here.

mod cone;
mod linalg;
mod simplex;

pub use cone::{cone_contains, cone_is_subspace, conic_combination, first_irreversible};
pub use linalg::{coordinates, nullspace, rank, rref, solve_particular, Rref};
pub use simplex::{solve_lp, LpOutcome, LpProblem, MAX_CONSTRAINTS, MAX_DIM};
pub(crate) use simplex::solve_unchecked;
