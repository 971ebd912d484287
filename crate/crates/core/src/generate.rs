//! Reproducible random instances: polyhedra built around a lattice witness,
//! cones, PL function pairs with controlled domain overlap, set-valued maps,
//! matrices and tail sequences.

use num_traits::{One, Zero};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::functions::{AffinePiece, PLConcaveFunction, PLConvexFunction};
use crate::graphs_orders::PolySetValuedMap;
use crate::rat::{dot, frac, int, unit, Matrix, Rat, Vector};
use crate::seqlab::TailSequence;
use crate::sets::{HPolyhedron, PolyCone};

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derived seed for the `index`-th instance of a named stream, so instances
/// can be generated independently and in parallel.
pub fn stream_seed(seed: u64, stream: &str, index: usize) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in stream.bytes().chain((index as u64).to_le_bytes()) {
        h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
        h ^= h >> 29;
    }
    h
}

fn small_rat(rng: &mut InstanceRng, span: i64) -> Rat {
    let den = *[1, 1, 1, 2, 3, 4].choose(rng).expect("nonempty");
    frac(rng.random_range(-span * den..=span * den), den)
}

fn lattice_point(rng: &mut InstanceRng, dim: usize) -> Vector {
    (0..dim).map(|_| int(rng.random_range(-2..=2))).collect()
}

fn nonzero_normal(rng: &mut InstanceRng, dim: usize) -> Vector {
    loop {
        let a: Vector = (0..dim).map(|_| int(rng.random_range(-3..=3))).collect();
        if a.iter().any(|v| !v.is_zero()) {
            return a;
        }
    }
}

/// Shape controls for [`random_polyhedron`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolyShape {
    /// Every inequality has positive slack at the witness, so the set is solid.
    pub solid: bool,
    /// Add a bounding box around the witness.
    pub bounded: bool,
}

/// Inequalities through or near the lattice witness `w`; optionally an
/// equality and a pair of opposite inequalities (an implicit equality).
pub fn random_polyhedron_around(rng: &mut InstanceRng, w: &[Rat], shape: PolyShape) -> HPolyhedron {
    let dim = w.len();
    let rows = rng.random_range(dim + 1..=dim + 4);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for _ in 0..rows {
        let normal = nonzero_normal(rng, dim);
        let slack = if shape.solid {
            frac(rng.random_range(1..=6), *[1, 2].choose(rng).expect("nonempty"))
        } else {
            frac(rng.random_range(0..=4), 2)
        };
        b.push(dot(&normal, w) + slack);
        a.push(normal);
    }
    if shape.bounded {
        for (i, wi) in w.iter().enumerate() {
            let e = unit(dim, i);
            let ne: Vector = e.iter().map(|v| -v).collect();
            b.push(wi + int(rng.random_range(1..=3)));
            a.push(e);
            b.push(-wi + int(rng.random_range(1..=3)));
            a.push(ne);
        }
    }
    let mut e = Vec::new();
    let mut d = Vec::new();
    if !shape.solid {
        match rng.random_range(0..6) {
            0 => {
                let normal = nonzero_normal(rng, dim);
                d.push(dot(&normal, w));
                e.push(normal);
            }
            1 => {
                let normal = nonzero_normal(rng, dim);
                let v = dot(&normal, w);
                b.push(v.clone());
                b.push(-v);
                a.push(normal.clone());
                a.push(normal.iter().map(|x| -x).collect());
            }
            _ => {}
        }
    }
    HPolyhedron::new(dim, a, b, e, d).expect("desk-scale instance")
}

/// A nonempty polyhedron of dimension `1..=max_dim`.
pub fn random_polyhedron(rng: &mut InstanceRng, max_dim: usize) -> HPolyhedron {
    let dim = rng.random_range(1..=max_dim);
    let w = lattice_point(rng, dim);
    let shape = PolyShape { solid: rng.random_bool(0.3), bounded: rng.random_bool(0.5) };
    random_polyhedron_around(rng, &w, shape)
}

pub fn random_polyhedron_of_dim(rng: &mut InstanceRng, dim: usize) -> HPolyhedron {
    let w = lattice_point(rng, dim);
    let shape = PolyShape { solid: rng.random_bool(0.3), bounded: rng.random_bool(0.5) };
    random_polyhedron_around(rng, &w, shape)
}

/// One to four integer generators.
pub fn random_cone(rng: &mut InstanceRng, max_dim: usize) -> PolyCone {
    let dim = rng.random_range(1..=max_dim);
    let count = rng.random_range(1..=4);
    let gens = (0..count).map(|_| nonzero_normal(rng, dim)).collect();
    PolyCone::new(dim, gens).expect("matching dimensions")
}

pub fn random_matrix(rng: &mut InstanceRng, rows: usize, cols: usize) -> Matrix {
    (0..rows).map(|_| (0..cols).map(|_| int(rng.random_range(-2..=2))).collect()).collect()
}

/// Points outside `p`: the witness pushed far along each violated normal.
pub fn exterior_points(p: &HPolyhedron, inside: &[Rat]) -> Vec<Vector> {
    let (a, _) = p.ineq();
    let (e, _) = p.eq();
    let mut out = Vec::new();
    for row in a.iter().chain(e) {
        let norm2: Rat = row.iter().map(|v| v * v).sum();
        if norm2.is_zero() {
            continue;
        }
        let x: Vector = inside.iter().zip(row).map(|(c, r)| c + r * int(100)).collect();
        if !p.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// How the domains of a generated pair relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Overlap {
    /// A common point interior to both domains.
    Qualified,
    /// Separated by a slab.
    Disjoint,
    /// Meeting only on a hyperplane, relative interiors disjoint.
    Touching,
    /// Independent domains.
    Random,
}

impl std::str::FromStr for Overlap {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "qualified" => Ok(Overlap::Qualified),
            "disjoint" => Ok(Overlap::Disjoint),
            "touching" => Ok(Overlap::Touching),
            "random" => Ok(Overlap::Random),
            other => Err(crate::Error::Parse(format!("unknown overlap mode {other:?}"))),
        }
    }
}

fn with_row(p: &HPolyhedron, row: Vector, rhs: Rat) -> HPolyhedron {
    let (a, b) = p.ineq();
    let (e, d) = p.eq();
    let mut a = a.clone();
    let mut b = b.clone();
    a.push(row);
    b.push(rhs);
    HPolyhedron::new(p.dim(), a, b, e.clone(), d.clone()).expect("desk-scale instance")
}

/// Two domains with the requested overlap.
pub fn random_domain_pair(rng: &mut InstanceRng, dim: usize, overlap: Overlap) -> (HPolyhedron, HPolyhedron) {
    let solid = PolyShape { solid: true, bounded: rng.random_bool(0.5) };
    match overlap {
        Overlap::Qualified => {
            let w = lattice_point(rng, dim);
            if rng.random_bool(0.2) {
                return (HPolyhedron::universe(dim), random_polyhedron_around(rng, &w, solid));
            }
            let s2 = PolyShape { solid: true, bounded: rng.random_bool(0.5) };
            (random_polyhedron_around(rng, &w, solid), random_polyhedron_around(rng, &w, s2))
        }
        Overlap::Disjoint => {
            let mut wf = lattice_point(rng, dim);
            let mut wg = lattice_point(rng, dim);
            wf[0] = int(-1);
            wg[0] = int(2);
            let e = unit(dim, 0);
            let ne: Vector = e.iter().map(|v| -v).collect();
            let f = with_row(&random_polyhedron_around(rng, &wf, solid), e, Rat::zero());
            let g = with_row(&random_polyhedron_around(rng, &wg, solid), ne, -Rat::one());
            (f, g)
        }
        Overlap::Touching => {
            let mut w = lattice_point(rng, dim);
            w[0] = Rat::zero();
            let e = unit(dim, 0);
            let ne: Vector = e.iter().map(|v| -v).collect();
            let f = with_row(&random_polyhedron_around(rng, &w, solid), e, Rat::zero());
            let s2 = PolyShape { solid: true, bounded: rng.random_bool(0.5) };
            let g = with_row(&random_polyhedron_around(rng, &w, s2), ne, Rat::zero());
            (f, g)
        }
        Overlap::Random => (random_polyhedron_of_dim(rng, dim), random_polyhedron_of_dim(rng, dim)),
    }
}

fn random_pieces(rng: &mut InstanceRng, dim: usize) -> Vec<AffinePiece> {
    let count = rng.random_range(1..=3);
    (0..count)
        .map(|_| AffinePiece::new((0..dim).map(|_| int(rng.random_range(-2..=2))).collect(), small_rat(rng, 3)))
        .collect()
}

/// A convex `f` and a concave `g` on `R^dim` whose domains overlap as asked.
pub fn random_pl_pair(rng: &mut InstanceRng, dim: usize, overlap: Overlap) -> (PLConvexFunction, PLConcaveFunction) {
    let (df, dg) = random_domain_pair(rng, dim, overlap);
    let f = PLConvexFunction::new(dim, random_pieces(rng, dim), df).expect("valid pieces");
    let g = PLConcaveFunction::new(dim, random_pieces(rng, dim), dg).expect("valid pieces");
    (f, g)
}

/// A convex PL function on a random domain.
pub fn random_convex(rng: &mut InstanceRng, dim: usize) -> PLConvexFunction {
    let w = lattice_point(rng, dim);
    let domain = if rng.random_bool(0.3) {
        HPolyhedron::universe(dim)
    } else {
        let shape = PolyShape { solid: rng.random_bool(0.6), bounded: rng.random_bool(0.5) };
        random_polyhedron_around(rng, &w, shape)
    };
    PLConvexFunction::new(dim, random_pieces(rng, dim), domain).expect("valid pieces")
}

/// A map with a random polyhedral graph, `x_dim, y_dim ∈ {1, 2}`.
pub fn random_map(rng: &mut InstanceRng) -> PolySetValuedMap {
    let x_dim = rng.random_range(1..=2);
    let y_dim = rng.random_range(1..=2);
    let graph = random_polyhedron_of_dim(rng, x_dim + y_dim);
    PolySetValuedMap::new(x_dim, y_dim, graph).expect("matching dimensions")
}

/// `F(x) = [φ(x), ∞)` for a random convex `φ` with solid domain.
pub fn random_epigraph_map(rng: &mut InstanceRng) -> PolySetValuedMap {
    let dim = rng.random_range(1..=2);
    let w = lattice_point(rng, dim);
    let shape = PolyShape { solid: true, bounded: rng.random_bool(0.5) };
    let domain = random_polyhedron_around(rng, &w, shape);
    let phi = PLConvexFunction::new(dim, random_pieces(rng, dim), domain).expect("valid pieces");
    PolySetValuedMap::from_epigraph(phi.epigraph()).expect("nonzero dimension")
}

fn random_tail(rng: &mut InstanceRng, sign_free: bool) -> TailSequence {
    let len = rng.random_range(0..=3);
    let entry = |rng: &mut InstanceRng| {
        let v = frac(rng.random_range(1..=4), rng.random_range(1..=4));
        if sign_free && rng.random_bool(0.5) {
            -v
        } else {
            v
        }
    };
    let prefix: Vec<Rat> = (0..len).map(|_| entry(rng)).collect();
    if rng.random_bool(0.3) {
        return TailSequence::finite(if prefix.is_empty() { vec![entry(rng)] } else { prefix });
    }
    let rho = [frac(1, 2), frac(1, 3), frac(2, 3), frac(1, 4), frac(3, 4)].choose(rng).expect("nonempty").clone();
    TailSequence::geometric(prefix, entry(rng), rho).expect("ratio in (0, 1)")
}

fn scaled(x: &TailSequence, k: &Rat) -> TailSequence {
    let prefix = x.prefix().iter().map(|p| p * k).collect();
    match x.tail() {
        None => TailSequence::finite(prefix),
        Some(t) => TailSequence::geometric(prefix, &t.c * k, t.rho.clone()).expect("ratio in (0, 1)"),
    }
}

/// A point of the ℓ¹-ball; about a third lie on the unit sphere.
pub fn random_ell1_member(rng: &mut InstanceRng) -> TailSequence {
    let x = random_tail(rng, true);
    let n = x.norm1();
    let k = if rng.random_bool(0.35) { Rat::one() / n } else { frac(rng.random_range(1..=9), 10) / n };
    scaled(&x, &k)
}

/// A candidate for the nonnegative ℓ²-ball refutation: most have a positive
/// tail and norm below one; some have a zero coordinate or unit norm.
pub fn random_nonneg_candidate(rng: &mut InstanceRng) -> TailSequence {
    match rng.random_range(0..10) {
        0 => TailSequence::unit(rng.random_range(1..=3)),
        1 => {
            let x = random_tail(rng, false);
            let x = scaled(&x, &(Rat::one() / (x.norm1() + Rat::one())));
            let mut prefix = x.prefix().to_vec();
            prefix.insert(0, Rat::zero());
            match x.tail() {
                Some(t) => TailSequence::geometric(prefix, t.c.clone(), t.rho.clone()).expect("ratio in (0, 1)"),
                None => TailSequence::finite(prefix),
            }
        }
        _ => {
            let rho = [frac(1, 2), frac(1, 3), frac(2, 3), frac(3, 4)].choose(rng).expect("nonempty").clone();
            let len = rng.random_range(0..=3);
            let prefix: Vec<Rat> = (0..len).map(|_| frac(rng.random_range(1..=4), rng.random_range(1..=4))).collect();
            let x = TailSequence::geometric(prefix, frac(rng.random_range(1..=4), rng.random_range(1..=4)), rho)
                .expect("ratio in (0, 1)");
            // ‖x‖₂ ≤ ‖x‖₁, so dividing by ‖x‖₁ + 1 lands strictly inside.
            let k = Rat::one() / (x.norm1() + Rat::one());
            scaled(&x, &k)
        }
    }
}

/// A random generated instance bundle for the `gen` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceBundle {
    pub seed: u64,
    pub polyhedra: Vec<HPolyhedron>,
    pub pairs: Vec<PairInstance>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairInstance {
    pub overlap: Overlap,
    pub f: PLConvexFunction,
    pub g: PLConcaveFunction,
}

/// `count` polyhedra of dimension exactly `dim` and `count` function pairs.
pub fn instance_bundle(seed: u64, count: usize, dim: usize, overlap: Overlap) -> InstanceBundle {
    let polyhedra = (0..count).map(|i| random_polyhedron_of_dim(&mut rng(stream_seed(seed, "poly", i)), dim)).collect();
    let pairs = (0..count)
        .map(|i| {
            let (f, g) = random_pl_pair(&mut rng(stream_seed(seed, "pair", i)), dim, overlap);
            PairInstance { overlap, f, g }
        })
        .collect();
    InstanceBundle { seed, polyhedra, pairs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interiors::is_full_dimensional;
    use crate::separation::ri_intersect;

    #[test]
    fn deterministic() {
        let a = serde_json::to_string(&instance_bundle(1, 1, 2, Overlap::Qualified)).unwrap();
        let b = serde_json::to_string(&instance_bundle(1, 1, 2, Overlap::Qualified)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, serde_json::to_string(&instance_bundle(2, 1, 2, Overlap::Qualified)).unwrap());
    }

    #[test]
    fn polyhedra_are_nonempty() {
        for i in 0..40 {
            let p = random_polyhedron(&mut rng(i), 4);
            assert!(!p.is_empty(), "{}", serde_json::to_string(&p).unwrap());
        }
    }

    #[test]
    fn overlap_modes_hold() {
        for i in 0..12 {
            let dim = 1 + (i as usize % 3);
            let mut r = rng(i);
            let (f, g) = random_domain_pair(&mut r, dim, Overlap::Qualified);
            let both = crate::sets::cartesian_product(&f, &g);
            assert!(is_full_dimensional(&f) && is_full_dimensional(&g) && !both.is_empty());
            assert!(ri_intersect(&f, &g).unwrap());
            let (f, g) = random_domain_pair(&mut r, dim, Overlap::Disjoint);
            assert!(!ri_intersect(&f, &g).unwrap());
            let (f, g) = random_domain_pair(&mut r, dim, Overlap::Touching);
            assert!(!ri_intersect(&f, &g).unwrap());
        }
    }

    #[test]
    fn sequences_respect_their_sets() {
        let mut r = rng(5);
        for _ in 0..50 {
            assert!(random_ell1_member(&mut r).norm1() <= Rat::one());
            let c = random_nonneg_candidate(&mut r);
            assert!(c.norm2_squared() <= Rat::one());
        }
    }
}
