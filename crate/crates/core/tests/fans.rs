mod common;

use common::*;
use toricfib::fan::*;
use toricfib::polytope::LatticePolytope;
use toricfib::{IntMatrix, LatticeVector};

fn alpha() -> IntMatrix {
    IntMatrix::from_i64(&[vec![1, 0], vec![0, 1], vec![0, 0], vec![0, 0], vec![0, 0]]).unwrap()
}

fn beta() -> IntMatrix {
    IntMatrix::from_i64(&[vec![1], vec![1], vec![4], vec![6]]).unwrap()
}

#[test]
fn face_fan_and_subdivision_counts() {
    let f = face_fan(&delta5_polar()).unwrap();
    assert_eq!((f.nrays(), f.ncones()), (10, 14));
    assert!(f.is_complete());
    assert!(check_compatibility(&alpha(), &f, &b2()).is_err());
    let s = subdivide_domain(&alpha(), &f, &b2()).unwrap();
    assert_eq!((s.nrays(), s.ncones()), (10, 22));
    assert!(s.is_complete());
    assert!(check_compatibility(&alpha(), &s, &b2()).unwrap().is_fibration());
}

#[test]
fn alpha_kernel_slice() {
    let f = subdivide_domain(&alpha(), &face_fan(&delta5_polar()).unwrap(), &b2()).unwrap();
    let phi = check_compatibility(&alpha(), &f, &b2()).unwrap();
    let (k, sub) = phi.kernel_fan().unwrap();
    let pts: Vec<LatticeVector> = k.rays().iter().map(|r| LatticeVector(sub.embed(r).0[2..].to_vec())).collect();
    let slice = LatticePolytope::hull(&pts).unwrap();
    assert!(slice.is_reflexive());
    let mut rays = normal_fan(&slice).unwrap().rays().to_vec();
    rays.sort();
    assert_eq!(rays, vec![lv(&[-1, -4, -6]), lv(&[0, 0, 1]), lv(&[0, 1, 0]), lv(&[1, 0, 0])]);
    assert_eq!(slice.polar().unwrap(), delta3());
}

#[test]
fn beta_on_x4() {
    let phi = check_compatibility(&beta(), &x4(), &p1()).unwrap();
    assert!(phi.is_fibration());
    let names: Vec<String> = (0..6).map(|i| format!("z{i}")).collect();
    assert_eq!(phi.homogeneous_map().unwrap().render(&names), "[z0^12 : z3^12]");
    let (k, sub) = phi.kernel_fan().unwrap();
    assert_eq!(sub.rank(), 3);
    assert_eq!(k.nrays(), 4);
}

#[test]
fn unsubdivided_x4_is_not_a_fibration() {
    let f = face_fan(&delta4().polar().unwrap()).unwrap();
    match check_compatibility(&beta(), &f, &p1()) {
        Ok(phi) => assert!(!phi.is_fibration()),
        Err(e) => assert_eq!(e.code(), "incompatible"),
    }
}

#[test]
fn non_surjective_lattice_map() {
    let m = IntMatrix::from_i64(&[vec![2], vec![2], vec![0], vec![0]]).unwrap();
    let f = Fan::new(4, vec![lv(&[1, 0, 0, 0]), lv(&[-1, 0, 0, 0])], vec![vec![0], vec![1]]).unwrap();
    let phi = check_compatibility(&m, &f, &p1()).unwrap();
    assert!(phi.fibration_failure().unwrap().contains("surjective"));
}

#[test]
fn star_subdivision_of_a_square_fan() {
    let sq = LatticePolytope::hull(&[lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, 0]), lv(&[0, -1])]).unwrap();
    let f = face_fan(&sq).unwrap();
    let g = star_subdivide(&f, &lv(&[1, 1])).unwrap();
    assert_eq!((g.nrays(), g.ncones()), (5, 5));
    assert!(g.is_smooth());
    assert_eq!(star_subdivide(&g, &lv(&[2, 2])).unwrap(), g);
    let half = Fan::new(2, vec![lv(&[1, 0]), lv(&[0, 1])], vec![vec![0, 1]]).unwrap();
    assert_eq!(star_subdivide(&half, &lv(&[-1, 0])).unwrap_err().code(), "outside_support");
}

#[test]
fn mori_cone_of_p1_times_p1() {
    let sq = LatticePolytope::hull(&[lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, 0]), lv(&[0, -1])]).unwrap();
    let mut gens = mori_cone(&face_fan(&sq).unwrap()).unwrap();
    gens.sort();
    // Rays (1,0),(0,1),(−1,0),(0,−1) in fan order up to relabelling; each
    // generator pairs two opposite rays and gets origin entry −2.
    assert_eq!(gens.len(), 2);
    for g in &gens {
        assert_eq!(g.0.iter().filter(|&&x| x == 1).count(), 2);
        assert_eq!(*g.0.last().unwrap(), -2);
    }
}

#[test]
fn json_roundtrip() {
    let f = face_fan(&delta5_polar()).unwrap();
    assert_eq!(Fan::from_json(&f.to_json()).unwrap(), f);
    let bad = serde_json::json!({"rank": 2, "rays": [[1, 0]], "cones": [[3]]});
    assert!(Fan::from_json(&bad).is_err());
}

#[test]
fn delta4_has_the_weighted_fibration() {
    let found = search_fibrations(&delta4(), 3).unwrap();
    assert!(!found.is_empty());
    assert!(found.iter().any(|c| c.balanced));
}

#[test]
#[ignore = "slow: full sublattice search on the five-dimensional polytope"]
fn delta5_search() {
    let d5 = delta5_polar().polar().unwrap();
    let found = search_fibrations(&d5, 3).unwrap();
    assert_eq!(found.len(), 23);
}
