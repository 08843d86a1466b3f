use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use std::collections::HashMap;
use toricfib::cy::{gkz_coefficient, same_polytope, GkzDegrees};
use toricfib::lattice::{hermite_form, kernel_basis};
use toricfib::monodromy::{classify_kodaira, power_monodromy, MonodromyMatrix};
use toricfib::poly::{ParamScalar, PPoly, SparsePoly};
use toricfib::polytope::LatticePolytope;
use toricfib::{IntMatrix, LatticeVector};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 128, max_global_rejects: 100_000, ..ProptestConfig::default() }
}

fn cube_points(n: usize) -> Vec<LatticeVector> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v: Vec<i64>| (-1..=1).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out.into_iter().filter(|v| v.iter().any(|&x| x != 0)).map(LatticeVector).collect()
}

fn shear(n: usize, i: usize, j: usize, q: i64) -> IntMatrix {
    let mut m: Vec<Vec<i64>> = (0..n).map(|a| (0..n).map(|b| i64::from(a == b)).collect()).collect();
    if i != j {
        m[i][j] = q;
    }
    IntMatrix::from_i64(&m).unwrap()
}

/// Reflexive polytopes with vertices in the cube, sheared by a unimodular map.
fn reflexive() -> impl Strategy<Value = LatticePolytope> {
    (2usize..=3)
        .prop_flat_map(|n| {
            let pts = cube_points(n);
            (Just(n), proptest::sample::subsequence(pts.clone(), n + 1..=pts.len().min(10)), 0..n, 0..n, -2i64..=2)
        })
        .prop_filter_map("not reflexive", |(n, pts, i, j, q)| {
            let p = LatticePolytope::hull(&pts).ok()?;
            if !p.is_reflexive() {
                return None;
            }
            let u = shear(n, i, j, q);
            LatticePolytope::hull(&p.vertices().iter().map(|v| v.apply(&u).unwrap()).collect::<Vec<_>>()).ok()
        })
}

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-6i64..=6, c), r))
        .prop_map(|rows| IntMatrix::from_i64(&rows).unwrap())
}

fn vars() -> Vec<String> {
    ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
}

fn poly(max_terms: usize, max_deg: u32) -> impl Strategy<Value = SparsePoly> {
    proptest::collection::vec((proptest::collection::vec(0..=max_deg, 3), -5i64..=5), 1..=max_terms).prop_map(|ts| {
        let v = vars();
        ts.into_iter().fold(SparsePoly::zero(&v), |p, (e, c)| {
            p.add(&SparsePoly::monomial(&v, e, ParamScalar::from(c))).unwrap()
        })
    })
}

fn scalar() -> impl Strategy<Value = ParamScalar> {
    let atom = prop_oneof![
        (-9i64..=9, 1i64..=5).prop_map(|(p, q)| ParamScalar::ratio(p, q)),
        Just(ParamScalar::param("a")),
        Just(ParamScalar::param("b")),
    ];
    proptest::collection::vec((atom, 0u8..3), 1..=4).prop_map(|xs| {
        xs.into_iter().fold(ParamScalar::zero(), |acc, (x, op)| match op {
            0 => acc.add(&x),
            1 => acc.sub(&x),
            _ => acc.add(&x).mul(&x),
        })
    })
}

fn mat2(m: [[i64; 2]; 2]) -> MonodromyMatrix {
    MonodromyMatrix::from_i64(m)
}

fn mul2(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn sl2() -> impl Strategy<Value = [[i64; 2]; 2]> {
    proptest::collection::vec((any::<bool>(), -2i64..=2), 1..=4).prop_map(|steps| {
        steps.into_iter().fold([[1, 0], [0, 1]], |p, (s, k)| mul2(p, if s { [[1, k], [0, 1]] } else { [[0, -1], [1, 0]] }))
    })
}

fn inv2(p: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [[p[1][1], -p[0][1]], [-p[1][0], p[0][0]]]
}

fn factorial(n: i64) -> BigRational {
    (1..=n).fold(BigRational::one(), |a, k| a * BigRational::from_integer(k.into()))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn polar_is_an_involution(p in reflexive()) {
        let q = p.polar().unwrap();
        prop_assert!(q.is_reflexive());
        prop_assert!(same_polytope(&q.polar().unwrap(), &p));
    }

    #[test]
    fn face_counts_reverse_under_polarity(p in reflexive()) {
        let mut b = p.polar().unwrap().face_counts();
        b.reverse();
        prop_assert_eq!(p.face_counts(), b);
    }

    #[test]
    fn hermite_form_certificate(m in matrix()) {
        let (h, u) = hermite_form(&m);
        prop_assert_eq!(u.mul(&m).unwrap(), h.clone());
        prop_assert_eq!(u.det().unwrap().abs(), BigInt::one());
        let mut last: Option<usize> = None;
        for row in h.rows().iter().filter(|r| r.iter().any(|x| !x.is_zero())) {
            let c = row.iter().position(|x| !x.is_zero()).unwrap();
            prop_assert!(row[c].is_positive());
            prop_assert!(last.map_or(true, |l| c > l));
            last = Some(c);
        }
    }

    #[test]
    fn kernel_is_saturated_and_complete(m in matrix()) {
        let k = kernel_basis(&m);
        prop_assert_eq!(k.nrows() + m.rank(), m.nrows());
        if k.nrows() > 0 {
            prop_assert!(k.mul(&m).unwrap().rows().iter().flatten().all(Zero::is_zero));
            let (h, _) = hermite_form(&k.transpose());
            let top: Vec<BigInt> = (0..k.nrows()).map(|i| h.get(i, i).clone()).collect();
            prop_assert!(top.iter().all(|x| x.is_one()), "kernel not saturated: {:?}", top);
        }
    }

    #[test]
    fn pseudo_division_certificate(f in poly(6, 4), g in poly(4, 3), v in 0usize..3) {
        let var = vars()[v].clone();
        let dg = g.degree_in(&var).unwrap();
        prop_assume!(dg > 0);
        let (q, r, e) = f.pseudo_divide(&g, &var).unwrap();
        let lc = g.coeff_in(&var, dg).unwrap();
        let lhs = lc.pow(e).mul(&f).unwrap();
        prop_assert_eq!(lhs, q.mul(&g).unwrap().add(&r).unwrap());
        prop_assert!(r.is_zero() || r.degree_in(&var).unwrap() < dg);
    }

    #[test]
    fn multinomial_gkz_coefficients(w in proptest::collection::vec(1i64..=4, 2..=5), k in -2i64..=6) {
        let n = w.len();
        let d: i64 = w.iter().sum();
        let mut row = w.clone();
        row.push(-d);
        let mut columns: Vec<(usize, LatticeVector)> = (0..n).map(|i| (0, LatticeVector::unit(n, i))).collect();
        columns.push((0, LatticeVector::zero(n)));
        let mut origin_flags = vec![false; n];
        origin_flags.push(true);
        let deg = GkzDegrees { rows: vec![row.clone()], columns, origin_flags, generators: vec![LatticeVector(row)] };
        let c = gkz_coefficient(&deg, &[k]).unwrap();
        let oracle = if k < 0 { BigRational::zero() } else { w.iter().fold(factorial(d * k), |a, &x| a / factorial(x * k)) };
        prop_assert!(!c.is_negative());
        prop_assert_eq!(BigRational::from_integer(c), oracle);
    }

    #[test]
    fn kodaira_type_is_a_conjugacy_invariant(n in 0i64..6, neg in any::<bool>(), p in sl2()) {
        let s = if neg { -1 } else { 1 };
        let m = [[s, s * n], [0, s]];
        let conj = mat2(p).mul(&mat2(m)).mul(&mat2(inv2(p)));
        prop_assert_eq!(classify_kodaira(&conj).unwrap(), classify_kodaira(&mat2(m)).unwrap());
    }

    #[test]
    fn determinant_of_powers(p in sl2(), e in 0usize..5, k in 0u32..8) {
        let elliptic = [[[0, -1], [1, 0]], [[1, -1], [1, 0]], [[0, -1], [1, -1]], [[-1, 1], [-1, 0]]];
        let m = mat2(p).mul(&mat2(elliptic[e % 4])).mul(&mat2(inv2(p)));
        let pk = power_monodromy(&m, k);
        prop_assert_eq!(pk.det(), (0..k).fold(MonodromyMatrix::identity().det(), |a, _| a * m.det()));
        prop_assert_eq!(power_monodromy(&m, k + 1), pk.mul(&m));
    }

    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        if !b.is_zero() {
            prop_assert_eq!(a.div(&b).unwrap().mul(&b), a.clone());
        }
        let vals: HashMap<String, BigRational> =
            [("a", 3), ("b", -2)].iter().map(|(k, v)| (k.to_string(), BigRational::from_integer((*v).into()))).collect();
        let lhs = a.mul(&b).eval_rational(&vals).unwrap();
        prop_assert_eq!(lhs, a.eval_rational(&vals).unwrap() * b.eval_rational(&vals).unwrap());
    }

    #[test]
    fn render_parse_roundtrip(f in poly(6, 4), a in scalar()) {
        let v = vars();
        prop_assert_eq!(SparsePoly::parse(&f.render(), &v).unwrap(), f.clone());
        let g = f.scale(&a);
        prop_assert_eq!(SparsePoly::parse(&g.render(), &v).unwrap(), g);
        prop_assert_eq!(PPoly::symbol("a").pow(2).render(), "a^2");
    }
}
