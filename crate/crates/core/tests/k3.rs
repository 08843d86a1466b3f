use num_rational::BigRational;
use toricfib::k3::*;
use toricfib::poly::{parse_scalar, ParamScalar};

fn p(name: &str) -> ParamScalar {
    ParamScalar::param(name)
}

#[test]
fn matched_fibrations_agree() {
    let (xi0, xi1) = match_parameters(&p("B"), &p("psi0"), &p("psi1")).unwrap();
    let z = fibre_params_z(&p("s"), &p("t"), &p("B"), &p("psi0"), &p("psi1"), &p("B").neg()).unwrap();
    let y = fibre_params_y(&p("s"), &p("t"), &xi0, &xi1).unwrap();
    assert_eq!(z, y);
}

#[test]
fn unmatched_hypersurface_differs() {
    let (xi0, xi1) = match_parameters(&p("B"), &p("psi0"), &p("psi1")).unwrap();
    let z = fibre_params_z(&p("s"), &p("t"), &p("B"), &p("psi0"), &p("psi1"), &p("psi_s")).unwrap();
    let y = fibre_params_y(&p("s"), &p("t"), &xi0, &xi1).unwrap();
    assert_ne!(z.pi, y.pi);
}

#[test]
fn sigma_is_one_without_xi1() {
    let y = fibre_params_y(&p("u"), &p("v"), &p("xi0"), &ParamScalar::zero()).unwrap();
    assert!(y.sigma.is_one());
}

#[test]
fn singular_locus_at_the_special_value() {
    let l = singular_fibre_locus(&parse_scalar("1/2985984").unwrap()).unwrap();
    assert_eq!(l.alpha_beta.values(), Some((ParamScalar::one(), ParamScalar::one())));
    let l = singular_fibre_locus(&parse_scalar("1/1492992").unwrap()).unwrap();
    assert!(l.alpha_beta.values().is_none());
    assert_eq!(l.alpha_beta.product(), ParamScalar::one());
    assert!(singular_fibre_locus(&ParamScalar::zero()).is_err());
}

#[test]
fn symmetric_functions_of_the_pair() {
    for (n, d) in [(1i64, 7i64), (-3, 11), (5, 2), (1, 2985984)] {
        let x = BigRational::new(n.into(), d.into());
        let l = singular_fibre_locus(&ParamScalar::from_rational(x.clone())).unwrap();
        let big = x * BigRational::from_integer(2985984.into());
        let two = BigRational::from_integer(2.into());
        let sum = (two.clone() * two.clone() - two * &big) / &big;
        assert_eq!(l.alpha_beta.sum().as_rational(), Some(sum));
        assert_eq!(l.alpha_beta.product().as_rational(), Some(BigRational::from_integer(1.into())));
    }
}

#[test]
fn j_invariants_solve_the_quadratic() {
    let mp = ModuliPoint { pi: ParamScalar::from(6), sigma: ParamScalar::from(5) };
    let j = j_invariants(&mp).unwrap();
    assert_eq!(j.values(), Some((ParamScalar::from(3), ParamScalar::from(2))));
}

#[test]
fn normal_form_moduli() {
    let one = ParamScalar::one();
    let l = [one.clone(), one.clone(), one.clone(), one.clone(), one.clone(), one];
    let (b0, b1, nf) = normal_form_from_lambda(&l).unwrap();
    assert!(b0.is_one() && b1.is_one());
    assert_eq!(nf.a3, parse_scalar("1/2985984").unwrap());
    assert_eq!(nf.b2, parse_scalar("863^2/2985984").unwrap());
    let mp = pi_sigma(&nf).unwrap();
    assert_eq!(mp.sigma, nf.a3.sub(&nf.b2).add(&ParamScalar::one()));
}
