use std::collections::HashMap;
use toricfib::poly::*;

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[test]
fn parse_render_roundtrip() {
    let v = vars(&["x", "y"]);
    for text in ["x^2*y - 3*x + 1/2", "a*x^3 + (b - 1)*y", "2*sqrt(3)*x*y", "B/24*x^24"] {
        let p = SparsePoly::parse(text, &v).unwrap();
        assert_eq!(SparsePoly::parse(&p.render(), &v).unwrap(), p, "{text}");
    }
    assert_eq!(SparsePoly::parse("(x + y)^2", &v).unwrap().render(), "x^2 + 2*x*y + y^2");
}

#[test]
fn radicals_square_out() {
    let s = parse_scalar("sqrt(12)").unwrap();
    assert_eq!(s.render(), "2*sqrt(3)");
    assert_eq!(s.mul(&s), ParamScalar::from(12));
    let t = parse_scalar("sqrt(xi0)").unwrap();
    assert_eq!(t.mul(&t).render(), "xi0");
}

#[test]
fn parameter_substitution() {
    let v = vars(&["x"]);
    let p = SparsePoly::parse("xi0*x^2 + xi1", &v).unwrap();
    let mut vals = HashMap::new();
    vals.insert("xi0".to_string(), parse_scalar("2*B/(12*psi0^2)^6").unwrap());
    vals.insert("xi1".to_string(), ParamScalar::zero());
    let q = p.substitute_params(&vals).unwrap();
    assert_eq!(q.nterms(), 1);
    assert_eq!(q.coefficient_of(&[("x", 2)]).unwrap(), parse_scalar("B/(1492992*psi0^12)").unwrap());
}

#[test]
fn pseudo_division_by_a_linear_form() {
    let v = vars(&["a", "b", "c"]);
    let f = SparsePoly::parse("a^2*b^2 - c^2", &v).unwrap();
    let g = SparsePoly::parse("a*b - c", &v).unwrap();
    let (q, r, p) = f.pseudo_divide(&g, "a").unwrap();
    assert!(r.is_zero());
    assert_eq!(p, 2);
    let lc = g.coeff_in("a", 1).unwrap();
    assert_eq!(lc.pow(p).mul(&f).unwrap(), q.mul(&g).unwrap());
    let (_, r, p) = f.pseudo_divide(&SparsePoly::parse("c - 1", &v).unwrap(), "c").unwrap();
    assert_eq!(p, 0);
    assert_eq!(r, SparsePoly::parse("a^2*b^2 - 1", &v).unwrap());
}

#[test]
fn pullback_along_a_monomial_map() {
    let z = vars(&["z0", "z1"]);
    let y = vars(&["y0", "y1", "y2"]);
    let mut m = MonomialSubstitution::new(&y);
    m.set("z0", ParamScalar::one(), &[("y0", 2), ("y2", 1)]);
    m.set("z1", ParamScalar::from(3), &[("y1", 1)]);
    let p = SparsePoly::parse("z0^2 + z0*z1", &z).unwrap();
    assert_eq!(p.pullback(&m).unwrap(), SparsePoly::parse("y0^4*y2^2 + 3*y0^2*y1*y2", &y).unwrap());
    let m = m.rescale(&[("y1", parse_scalar("1/3").unwrap())]).unwrap();
    assert_eq!(p.pullback(&m).unwrap(), SparsePoly::parse("y0^4*y2^2 + y0^2*y1*y2", &y).unwrap());
}

#[test]
fn substitution_and_chart_restriction() {
    let v = vars(&["x", "y"]);
    let p = SparsePoly::parse("x^3 + y^2 + x*y", &v).unwrap();
    let s = p.substitute(&[("x", SparsePoly::parse("x + c", &v).unwrap())]).unwrap();
    assert_eq!(s.coefficient_of(&[("x", 2)]).unwrap(), parse_scalar("3*c").unwrap());
    let e = p.evaluate_vars(&[("y", ParamScalar::one())]).unwrap();
    assert_eq!(e, SparsePoly::parse("x^3 + x + 1", &v).unwrap());
}

#[test]
fn parse_errors() {
    let v = vars(&["x"]);
    for bad in ["x^", "x + * 2", "(x", "x^-1"] {
        assert_eq!(SparsePoly::parse(bad, &v).unwrap_err().code(), "parse_error", "{bad}");
    }
    assert!(parse_scalar("1/0").is_err());
}
