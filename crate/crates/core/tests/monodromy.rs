use num_complex::Complex64;
use toricfib::monodromy::*;
use toricfib::poly::SparsePoly;

fn family(text: &str) -> RootFamily {
    let vars = vec!["y".to_string(), "x".to_string()];
    RootFamily::from_poly(&SparsePoly::parse(text, &vars).unwrap(), "y", "x").unwrap()
}

#[test]
fn square_root_branch() {
    let f = family("y^2 - x");
    let base = parse_gauss("-1").unwrap();
    let r = track_roots(&f, &Loop::new(base.clone(), Complex64::new(0.0, 0.0), 0.5), TrackOptions::default()).unwrap();
    assert_eq!(perm::cycles(&r.perm), "(1 2)");
    assert!(r.residual < 1e-20);
    let far = track_roots(&f, &Loop::new(base, Complex64::new(0.0, 2.0), 0.5), TrackOptions::default()).unwrap();
    assert_eq!(far.perm, perm::identity(2));
}

#[test]
fn cube_root_around_zero_and_infinity() {
    let f = family("y^3 - x");
    let base = parse_gauss("1").unwrap();
    let r = track_roots(&f, &Loop::new(base.clone(), Complex64::new(0.0, 0.0), 0.5), TrackOptions::default()).unwrap();
    assert_eq!(perm::cycle_type(&r.perm), vec![3]);
    let inf = track_roots(&f, &Loop::around_infinity(base, Complex64::new(0.0, 0.0), 2.0), TrackOptions::default()).unwrap();
    assert_eq!(perm::then(&r.perm, &inf.perm), perm::identity(3));
}

#[test]
fn singular_values_of_a_cubic() {
    let f = family("y^3 - 3*y - x");
    let mut v: Vec<f64> = singular_parameters(&f).unwrap().iter().map(|s| s.value.re).collect();
    v.sort_by(f64::total_cmp);
    assert_eq!(v.len(), 2);
    assert!((v[0] + 2.0).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
}

#[test]
fn loops_through_a_singular_value_are_rejected() {
    let f = family("y^2 - x");
    let lp = Loop::new(parse_gauss("0").unwrap(), Complex64::new(1.0, 0.0), 0.5);
    assert!(track_roots(&f, &lp, TrackOptions::default()).is_err());
}

#[test]
fn local_monodromy_table() {
    let i = parse_gauss("i").unwrap();
    let a = MonodromyMatrix::from_i64([[0, 1], [-1, 0]]).scale(&i);
    assert_eq!(power_monodromy(&a, 6).as_integer(), Some([[1, 0], [0, 1]]));
    assert_eq!(classify_kodaira(&power_monodromy(&a, 6)).unwrap(), Kodaira::I(0));
    let t = MonodromyMatrix::from_i64([[1, 1], [0, 1]]);
    assert_eq!(power_monodromy(&t, 2).as_integer(), Some([[1, 2], [0, 1]]));
    assert_eq!(classify_kodaira(&power_monodromy(&t, 2)).unwrap(), Kodaira::I(2));
    let c = MonodromyMatrix::from_i64([[0, 1], [-1, -1]]).scale(&i);
    assert_eq!(power_monodromy(&c, 6).as_integer(), Some([[-1, 0], [0, -1]]));
    assert_eq!(classify_kodaira(&power_monodromy(&c, 6)).unwrap().to_string(), "I0*");
    assert_eq!(power_monodromy(&c, 0), MonodromyMatrix::identity());
}

#[test]
fn kodaira_rejects_hyperbolic() {
    let m = MonodromyMatrix::parse("2,1;1,1").unwrap();
    assert_eq!(classify_kodaira(&m).unwrap_err().code(), "not_kodaira");
    assert_eq!(classify_kodaira(&MonodromyMatrix::parse("-1,3;0,-1").unwrap()).unwrap(), Kodaira::IStar(3));
}

#[test]
fn permutation_helpers() {
    let p = vec![1, 2, 0];
    assert_eq!(perm::cycles(&p), "(1 2 3)");
    assert_eq!(perm::then(&p, &perm::then(&p, &p)), perm::identity(3));
    let q = perm::join(&[1, 0, 2], &[0, 2, 1]);
    assert_eq!(q.len(), 6);
    assert_eq!(perm::group_order(&[vec![1, 0, 2], vec![0, 2, 1]]), 6);
}
