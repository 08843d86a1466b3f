mod common;

use common::*;
use toricfib::cy::batyrev_hodge;
use toricfib::polytope::LatticePolytope;
use toricfib::Error;

#[test]
fn polar_of_delta4() {
    let p = delta4().polar().unwrap();
    let mut v = p.vertices().to_vec();
    v.sort();
    let mut want = vec![
        lv(&[23, -1, -1, -1]),
        lv(&[-1, -1, 2, -1]),
        lv(&[-1, 11, -1, -1]),
        lv(&[-1, -1, -1, -1]),
        lv(&[-1, -1, -1, 1]),
    ];
    want.sort();
    assert_eq!(v, want);
    assert!(p.is_reflexive());
    assert_eq!(p.polar().unwrap(), delta4());
}

#[test]
fn lattice_points_match_a_box_scan() {
    let d = delta4();
    let p = d.polar().unwrap();
    let mut got = p.points().to_vec();
    got.sort();
    assert_eq!(got, brute_points(d.vertices(), &[-1, -1, -1, -1], &[23, 11, 2, 1]));
    let mut got = d.points().to_vec();
    got.sort();
    assert_eq!(got, brute_points(p.vertices(), &[-1, -2, -8, -12], &[1, 1, 1, 1]));
}

#[test]
fn delta5_polar_points_and_faces() {
    let p = delta5_polar();
    assert!(p.is_reflexive());
    assert_eq!(p.vertices().len(), 10);
    let q = p.polar().unwrap();
    let mut got = p.points().to_vec();
    got.sort();
    assert_eq!(got, brute_points(q.vertices(), &[-1, -1, -1, -1, -1], &[12, 12, 11, 2, 1]));
    let (a, mut b) = (p.face_counts(), q.face_counts());
    b.reverse();
    assert_eq!(a, b);
}

#[test]
fn simplex_counts() {
    let d = delta4();
    assert_eq!(d.face_counts(), vec![5, 10, 10, 5]);
    for f in d.faces(2) {
        let g = d.dual_face(&f).unwrap();
        assert_eq!(g.dim, 1);
        assert_eq!(d.polar().unwrap().dual_face(&g).unwrap().vertex_indices, f.vertex_indices);
    }
}

#[test]
fn hodge_numbers() {
    assert_eq!(batyrev_hodge(&delta4()).unwrap(), (243, 3));
    assert_eq!(batyrev_hodge(&delta4().polar().unwrap()).unwrap(), (3, 243));
    let simplex = LatticePolytope::hull(&[
        lv(&[1, 0, 0, 0]),
        lv(&[0, 1, 0, 0]),
        lv(&[0, 0, 1, 0]),
        lv(&[0, 0, 0, 1]),
        lv(&[-1, -1, -1, -1]),
    ])
    .unwrap();
    assert_eq!(batyrev_hodge(&simplex.polar().unwrap()).unwrap(), (1, 101));
    assert_eq!(batyrev_hodge(&simplex).unwrap(), (101, 1));
}

#[test]
fn edge_pairing_sum_on_delta3() {
    let d = delta3();
    let s: usize = d.faces(1).iter().map(|e| e.l_star * d.dual_face(e).unwrap().l_star).sum();
    assert_eq!(s, 0);
}

#[test]
fn errors() {
    let s = LatticePolytope::hull(&[lv(&[0, 0]), lv(&[1, 0]), lv(&[0, 1])]).unwrap();
    assert_eq!(s.polar().unwrap_err(), Error::PolarUndefined);
    assert!(!s.is_reflexive());
    let flat = LatticePolytope::hull(&[lv(&[1, 0]), lv(&[-1, 0])]).unwrap_err();
    assert_eq!(flat.code(), "not_full_dimensional");
    let big = LatticePolytope::hull(&[lv(&[2, 0]), lv(&[0, 2]), lv(&[-2, -2])]).unwrap();
    assert_eq!(big.polar().unwrap_err().code(), "not_reflexive");
}

#[test]
fn json_roundtrip() {
    let p = delta5_polar();
    assert_eq!(LatticePolytope::from_json(&p.to_json()).unwrap(), p);
    let bad = serde_json::json!({"rank": 2, "vertices": [[1, 0, 0]]});
    assert_eq!(LatticePolytope::from_json(&bad).unwrap_err().code(), "parse_error");
}
