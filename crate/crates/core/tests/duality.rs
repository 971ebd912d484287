use proptest::prelude::*;
use relint::duality::{duality_values, solve_dual, solve_primal};
use relint::functions::{concave_conjugate, conjugate, AffinePiece, ExtRat, PLConcaveFunction, PLConvexFunction};
use relint::generate::{random_convex, random_pl_pair, rng, Overlap};
use relint::rat::{int, neg, vec_from};
use relint::sets::HPolyhedron;
use relint::Rat;

type Pieces = Vec<(i64, i64)>;

fn pieces() -> impl Strategy<Value = Pieces> {
    prop::collection::vec((-3i64..=3, -4i64..=4), 1..=3)
}

fn interval() -> impl Strategy<Value = (i64, i64)> {
    (-4i64..=4, 0i64..=4).prop_map(|(lo, w)| (lo, lo + w))
}

fn affine(ps: &Pieces) -> Vec<AffinePiece> {
    ps.iter().map(|&(a, b)| AffinePiece::new(vec_from(&[a]), int(b))).collect()
}

fn boxed((lo, hi): (i64, i64)) -> HPolyhedron {
    HPolyhedron::boxed(&vec_from(&[lo]), &vec_from(&[hi]))
}

fn max_of(ps: &Pieces, x: &Rat) -> Rat {
    ps.iter().map(|&(a, b)| int(a) * x + int(b)).max().unwrap()
}

fn min_of(ps: &Pieces, x: &Rat) -> Rat {
    ps.iter().map(|&(a, b)| int(a) * x + int(b)).min().unwrap()
}

/// Interval endpoints and every crossing of two pieces inside the interval.
fn kinks(ps: &Pieces, (lo, hi): (i64, i64)) -> Vec<Rat> {
    let mut out = vec![int(lo), int(hi)];
    for (i, &(a1, b1)) in ps.iter().enumerate() {
        for &(a2, b2) in &ps[i + 1..] {
            if a1 != a2 {
                let x = Rat::new((b2 - b1).into(), (a1 - a2).into());
                if x >= int(lo) && x <= int(hi) {
                    out.push(x);
                }
            }
        }
    }
    out
}

fn chord_slopes(xs: &[Rat], f: impl Fn(&Rat) -> Rat) -> Vec<Rat> {
    let mut out = vec![int(0)];
    for (i, x1) in xs.iter().enumerate() {
        for x2 in &xs[i + 1..] {
            if x1 != x2 {
                out.push((f(x2) - f(x1)) / (x2 - x1));
            }
        }
    }
    out
}

/// Brute-force `inf (f − g)` and `sup (g_* − f*)` for one-dimensional pieces
/// on bounded intervals, by enumeration of kinks and chord slopes.
fn brute_force(fp: &Pieces, fd: (i64, i64), gp: &Pieces, gd: (i64, i64)) -> (ExtRat, ExtRat) {
    let (lo, hi) = (fd.0.max(gd.0), fd.1.min(gd.1));
    let primal = if lo > hi {
        ExtRat::PosInf
    } else {
        let mut xs = kinks(fp, (lo, hi));
        xs.extend(kinks(gp, (lo, hi)));
        ExtRat::Finite(xs.iter().map(|x| max_of(fp, x) - min_of(gp, x)).min().unwrap())
    };
    let fx = kinks(fp, fd);
    let gx = kinks(gp, gd);
    let f_star = |y: &Rat| fx.iter().map(|x| x * y - max_of(fp, x)).max().unwrap();
    let g_star = |y: &Rat| gx.iter().map(|x| x * y - min_of(gp, x)).min().unwrap();
    let dual = if gd.0 > fd.1 || gd.1 < fd.0 {
        ExtRat::PosInf
    } else {
        let mut ys = chord_slopes(&fx, |x| max_of(fp, x));
        ys.extend(chord_slopes(&gx, |x| min_of(gp, x)));
        ExtRat::Finite(ys.iter().map(|y| g_star(y) - f_star(y)).max().unwrap())
    };
    (primal, dual)
}

fn sample_points() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn one_dimensional_values_match_brute_force(fp in pieces(), fd in interval(), gp in pieces(), gd in interval()) {
        let f = PLConvexFunction::new(1, affine(&fp), boxed(fd)).unwrap();
        let g = PLConcaveFunction::new(1, affine(&gp), boxed(gd)).unwrap();
        let (primal, dual) = brute_force(&fp, fd, &gp, gd);
        prop_assert_eq!(solve_primal(&f, &g).unwrap().value, primal);
        prop_assert_eq!(solve_dual(&f, &g).unwrap().value, dual);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weak_duality(seed in any::<u64>(), dim in 1usize..=3) {
        let (f, g) = random_pl_pair(&mut rng(seed), dim, Overlap::Random);
        let (p, d) = duality_values(&f, &g).unwrap();
        prop_assert!(p.value >= d.value);
    }

    #[test]
    fn fenchel_young_and_biconjugation(seed in any::<u64>(), pts in sample_points()) {
        let f = random_convex(&mut rng(seed), 2);
        let fs = conjugate(&f);
        let fss = conjugate(&fs.function);
        for x in &pts {
            let x = vec_from(&x[..2]);
            let fx = f.evaluate(&x).unwrap();
            prop_assert_eq!(fss.evaluate(&x).unwrap(), fx.clone());
            for z in &pts {
                let y = vec_from(&z[1..]);
                let lhs = fx.add(&fs.evaluate(&y).unwrap()).unwrap();
                prop_assert!(lhs >= ExtRat::Finite(relint::rat::dot(&x, &y)));
            }
        }
    }

    #[test]
    fn concave_conjugate_mirrors_convex(seed in any::<u64>(), pts in sample_points()) {
        let g = random_convex(&mut rng(seed), 2).negated();
        let lower = concave_conjugate(&g);
        let upper = conjugate(&g.negated());
        for y in &pts {
            let y = vec_from(&y[..2]);
            prop_assert_eq!(lower.evaluate(&y).unwrap(), upper.evaluate(&neg(&y)).unwrap().neg());
        }
    }
}
