//! Parameters of M-polarized K3 surfaces and of the two elliptic fibrations
//! of the anticanonical K3 of WP(1,1,4,6)-type.

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::poly::ParamScalar;
use crate::polytope::LatticePolytope;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use std::collections::{BTreeMap, HashMap};

/// The quantities a³, b², d of the normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct K3NormalForm {
    pub a3: ParamScalar,
    pub b2: ParamScalar,
    pub d: ParamScalar,
}

/// π = j₁j₂ and σ = j₁ + j₂.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuliPoint {
    pub pi: ParamScalar,
    pub sigma: ParamScalar,
}

fn c(n: i64) -> ParamScalar {
    ParamScalar::from(n)
}

fn twelve_pow(k: i32) -> ParamScalar {
    c(12).pow(k).expect("nonzero base")
}

fn nonzero(x: &ParamScalar, what: &str) -> Result<()> {
    if x.is_zero() {
        Err(Error::ZeroDenominator(what.to_string()))
    } else {
        Ok(())
    }
}

/// Λ₀ = λ₂³λ₃²λ₄/λ₅⁶, Λ₁ = λ₀λ₁/λ₄², and the normal form
/// a³ = 1/(12⁶Λ₀²Λ₁), b² = (6·12²Λ₀ − 1)²/(12⁶Λ₀²Λ₁), d = 1.
pub fn normal_form_from_lambda(l: &[ParamScalar; 6]) -> Result<(ParamScalar, ParamScalar, K3NormalForm)> {
    nonzero(&l[5], "lambda5^6")?;
    nonzero(&l[4], "lambda4^2")?;
    let big0 = l[2].pow(3)?.mul(&l[3].pow(2)?).mul(&l[4]).div(&l[5].pow(6)?)?;
    let big1 = l[0].mul(&l[1]).div(&l[4].pow(2)?)?;
    let den = twelve_pow(6).mul(&big0.pow(2)?).mul(&big1);
    nonzero(&den, "Lambda0^2*Lambda1")?;
    let a3 = den.inv()?;
    let b2 = c(6 * 144).mul(&big0).sub(&c(1)).pow(2)?.div(&den)?;
    Ok((big0, big1, K3NormalForm { a3, b2, d: c(1) }))
}

/// π = a³/d, σ = (a³ − b² + d)/d.
pub fn pi_sigma(nf: &K3NormalForm) -> Result<ModuliPoint> {
    nonzero(&nf.d, "d")?;
    Ok(ModuliPoint {
        pi: nf.a3.div(&nf.d)?,
        sigma: nf.a3.sub(&nf.b2).add(&nf.d).div(&nf.d)?,
    })
}

/// Fibre parameters of the Y model over [u:v].
pub fn fibre_params_y(u: &ParamScalar, v: &ParamScalar, xi0: &ParamScalar, xi1: &ParamScalar) -> Result<ModuliPoint> {
    let uv = u.mul(v);
    let s2 = u.add(v).pow(2)?;
    let den_pi = twelve_pow(6).mul(xi0).mul(&s2);
    nonzero(&den_pi, "12^6*xi0*(u+v)^2")?;
    let pi = uv.div(&den_pi)?;
    let k = xi1.sub(&c(3 * 144).mul(&xi1.pow(2)?));
    let sigma = c(1).add(&k.mul(&uv).div(&twelve_pow(3).mul(xi0).mul(&s2))?);
    Ok(ModuliPoint { pi, sigma })
}

/// Fibre parameters of the Z model over [s:t].
pub fn fibre_params_z(
    s: &ParamScalar,
    t: &ParamScalar,
    b: &ParamScalar,
    psi0: &ParamScalar,
    psi1: &ParamScalar,
    psi_s: &ParamScalar,
) -> Result<ModuliPoint> {
    let st = s.mul(t);
    let q = b.mul(&s.pow(2)?).sub(&c(2).mul(psi_s).mul(&st)).add(&b.mul(&t.pow(2)?));
    nonzero(&q, "B*s^2 - 2*psi_s*s*t + B*t^2")?;
    let pi = psi0.pow(12)?.mul(&st).div(&c(2).mul(&q))?;
    let k = psi0.pow(6)?.mul(psi1).add(&psi1.pow(2)?);
    let sigma = c(1).sub(&c(2).mul(&k).mul(&st).div(&q)?);
    Ok(ModuliPoint { pi, sigma })
}

/// ξ₀ = 2B/(12ψ₀²)⁶, ξ₁ = −4ψ₁/(12ψ₀²)³.
pub fn match_parameters(b: &ParamScalar, psi0: &ParamScalar, psi1: &ParamScalar) -> Result<(ParamScalar, ParamScalar)> {
    nonzero(psi0, "psi0")?;
    let w = c(12).mul(&psi0.pow(2)?);
    let xi0 = c(2).mul(b).div(&w.pow(6)?)?;
    let xi1 = c(-4).mul(psi1).div(&w.pow(3)?)?;
    Ok((xi0, xi1))
}

/// The pair `center ± scale·√radicand`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticPair {
    pub center: ParamScalar,
    pub scale: ParamScalar,
    pub radicand: ParamScalar,
}

impl QuadraticPair {
    pub fn sum(&self) -> ParamScalar {
        c(2).mul(&self.center)
    }

    pub fn product(&self) -> ParamScalar {
        self.center.pow(2).expect("square").sub(&self.scale.pow(2).expect("square").mul(&self.radicand))
    }

    /// Both members (plus sign first) when the radicand is a nonnegative
    /// rational; `None` otherwise.
    pub fn values(&self) -> Option<(ParamScalar, ParamScalar)> {
        let r = self.radicand.as_rational()?;
        let root = ParamScalar::sqrt_rational(&r).ok()?;
        let d = self.scale.mul(&root);
        Some((self.center.add(&d), self.center.sub(&d)))
    }

    /// Complex floating-point values (plus sign first) at a rational
    /// assignment of the parameters.
    pub fn numeric(&self, values: &HashMap<String, BigRational>) -> Result<[(f64, f64); 2]> {
        let f = |x: &ParamScalar| -> Result<f64> {
            x.eval_rational(values)?.to_f64().ok_or(Error::Overflow)
        };
        let (m, k, r) = (f(&self.center)?, f(&self.scale)?, self.radicand.eval_rational(values)?);
        let rf = r.to_f64().ok_or(Error::Overflow)?;
        if r.is_negative() {
            let im = k * (-rf).sqrt();
            Ok([(m, im), (m, -im)])
        } else {
            let re = k * rf.sqrt();
            Ok([(m + re, 0.0), (m - re, 0.0)])
        }
    }
}

/// Roots of j² − σj + π.
pub fn j_invariants(mp: &ModuliPoint) -> Result<QuadraticPair> {
    Ok(QuadraticPair {
        center: mp.sigma.div(&c(2))?,
        scale: ParamScalar::ratio(1, 2),
        radicand: mp.sigma.pow(2)?.sub(&c(4).mul(&mp.pi)),
    })
}

/// Base points of the singular fibres of the Y-model K3 fibration: the
/// finite points 0 and −1, the pair α, β, and the point at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularLocus {
    pub finite: Vec<ParamScalar>,
    pub alpha_beta: QuadraticPair,
}

/// α, β = (2 − 12⁶ξ₀ ± 2√(1 − 12⁶ξ₀))/(12⁶ξ₀).
pub fn singular_fibre_locus(xi0: &ParamScalar) -> Result<SingularLocus> {
    let x = twelve_pow(6).mul(xi0);
    nonzero(&x, "xi0")?;
    Ok(SingularLocus {
        finite: vec![c(0), c(-1)],
        alpha_beta: QuadraticPair {
            center: c(2).sub(&x).div(&x)?,
            scale: c(2).div(&x)?,
            radicand: c(1).sub(&x),
        },
    })
}

/// Connected pieces of the skeleton of P cut out by a direction d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdeComponents {
    /// Node sets, each sorted; components listed in sorted order.
    pub components: Vec<Vec<LatticeVector>>,
    pub edges: Vec<(LatticeVector, LatticeVector)>,
}

impl AdeComponents {
    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.len()).collect()
    }
}

/// Keep the skeleton edges of P whose endpoints both pair with d to
/// nonzero values of the same sign; the components are taken over the
/// endpoints of kept edges.
pub fn ade_subgraph(p: &LatticePolytope, d: &LatticeVector) -> Result<AdeComponents> {
    if p.rank() != 3 || !p.is_reflexive() {
        return Err(Error::InvalidInput("expected a 3-dimensional reflexive polytope".into()));
    }
    if d.rank() != 3 {
        return Err(Error::ShapeMismatch(format!("direction of rank {}", d.rank())));
    }
    let g = p.skeleton();
    let pair: Vec<i64> = g.nodes.iter().map(|q| q.try_dot(d)).collect::<Result<_>>()?;
    let kept: Vec<(usize, usize)> = g
        .edges
        .iter()
        .copied()
        .filter(|&(a, b)| pair[a] * pair[b] > 0)
        .collect();
    let mut parent: Vec<usize> = (0..g.nodes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in &kept {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut comps: BTreeMap<usize, Vec<LatticeVector>> = BTreeMap::new();
    let mut seen = vec![false; g.nodes.len()];
    for &(a, b) in &kept {
        seen[a] = true;
        seen[b] = true;
    }
    for i in (0..g.nodes.len()).filter(|&i| seen[i]) {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().push(g.nodes[i].clone());
    }
    let mut components: Vec<Vec<LatticeVector>> = comps.into_values().collect();
    components.iter_mut().for_each(|c| c.sort());
    components.sort();
    let edges = kept.iter().map(|&(a, b)| (g.nodes[a].clone(), g.nodes[b].clone())).collect();
    Ok(AdeComponents { components, edges })
}

/// Points of P pairing positively with d (the node set on the side of d).
pub fn ade_nodes(p: &LatticePolytope, d: &LatticeVector) -> Vec<LatticeVector> {
    p.boundary_points().into_iter().filter(|q| q.dot(d) > 0).collect()
}

