//! Calabi-Yau equations from reflexive polytopes and nef-partitions,
//! Batyrev Hodge numbers and GKZ degree data.

use crate::error::{Error, Result};
use crate::fan::{mori_cone, Fan};
use crate::lattice::LatticeVector;
use crate::poly::{ParamScalar, SparsePoly};
use crate::polytope::{vertices_from_inequalities, LatticePolytope};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Which lattice points of a polytope contribute monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialMode {
    All,
    VerticesAndOrigin,
    /// Points not in the relative interior of a facet.
    Simplified,
}

impl std::str::FromStr for MonomialMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(MonomialMode::All),
            "vertices+origin" | "vertices" => Ok(MonomialMode::VerticesAndOrigin),
            "simplified" => Ok(MonomialMode::Simplified),
            _ => Err(Error::InvalidInput(format!("unknown monomial mode {s:?}"))),
        }
    }
}

/// Coefficients keyed by lattice point; points without an entry get the
/// default, or an error when there is none.
#[derive(Clone, Debug, Default)]
pub struct Coefficients {
    map: BTreeMap<LatticeVector, ParamScalar>,
    default: Option<ParamScalar>,
}

impl Coefficients {
    pub fn ones() -> Self {
        Coefficients { map: BTreeMap::new(), default: Some(ParamScalar::one()) }
    }

    pub fn new() -> Self {
        Coefficients::default()
    }

    /// Parameters named `prefix0, prefix1, ...` in the order given.
    pub fn generic(points: &[LatticeVector], prefix: &str) -> Self {
        let mut c = Coefficients::new();
        for (i, p) in points.iter().enumerate() {
            c.map.insert(p.clone(), ParamScalar::param(&format!("{prefix}{i}")));
        }
        c
    }

    pub fn set(&mut self, point: LatticeVector, value: ParamScalar) -> &mut Self {
        self.map.insert(point, value);
        self
    }

    pub fn with_default(mut self, value: ParamScalar) -> Self {
        self.default = Some(value);
        self
    }

    pub fn get(&self, point: &LatticeVector) -> Result<ParamScalar> {
        self.map
            .get(point)
            .or(self.default.as_ref())
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("no coefficient for point {point}")))
    }
}

/// Lattice points of `p` selected by `mode` (ambient coordinates, sorted).
pub fn monomial_points(p: &LatticePolytope, mode: MonomialMode) -> Vec<LatticeVector> {
    let n = p.ambient_rank();
    let origin = LatticeVector::zero(n);
    let mut out: BTreeSet<LatticeVector> = match mode {
        MonomialMode::All => p.ambient_points().into_iter().collect(),
        MonomialMode::VerticesAndOrigin => p.ambient_vertices().into_iter().collect(),
        MonomialMode::Simplified => {
            let amb = p.ambient_points();
            p.points()
                .iter()
                .zip(amb)
                .filter(|(q, _)| p.facets().iter().filter(|f| f.eval(q) == 0).count() != 1)
                .map(|(_, a)| a)
                .collect()
        }
    };
    if p.contains_ambient(&origin) {
        out.insert(origin);
    }
    out.into_iter().collect()
}

/// Defining polynomial of the anticanonical hypersurface: the term of
/// `m ∈ Δ` carries `z_ρ^{⟨m, v_ρ⟩ + 1}`.
pub fn anticanonical_polynomial(
    delta: &LatticePolytope,
    fan: &Fan,
    vars: &[String],
    mode: MonomialMode,
    coefficients: &Coefficients,
) -> Result<SparsePoly> {
    if vars.len() != fan.nrays() {
        return Err(Error::ShapeMismatch(format!("{} names for {} rays", vars.len(), fan.nrays())));
    }
    let shift = vec![1i64; fan.nrays()];
    part_polynomial(&monomial_points(delta, mode), fan.rays(), &shift, vars, coefficients)
}

fn part_polynomial(
    points: &[LatticeVector],
    rays: &[LatticeVector],
    shift: &[i64],
    vars: &[String],
    coefficients: &Coefficients,
) -> Result<SparsePoly> {
    let mut p = SparsePoly::zero(vars);
    for m in points {
        let mut e = Vec::with_capacity(rays.len());
        for (v, s) in rays.iter().zip(shift) {
            let x = m.try_dot(v)? + s;
            if x < 0 {
                return Err(Error::NegativeExponent(v.to_string()));
            }
            e.push(u32::try_from(x).map_err(|_| Error::Overflow)?);
        }
        let t = SparsePoly::monomial(vars, e, coefficients.get(m)?);
        p = p.add(&t)?;
    }
    Ok(p)
}

/// A nef-partition of the vertices of Δ°.
#[derive(Clone, Debug)]
pub struct NefPartition {
    base: LatticePolytope,
    polar: LatticePolytope,
    parts: Vec<Vec<usize>>,
    nabla_i: Vec<LatticePolytope>,
    nabla: LatticePolytope,
    delta_i: Vec<LatticePolytope>,
}

fn hull_of(points: &[LatticeVector], n: usize) -> Result<LatticePolytope> {
    LatticePolytope::hull_in_span(points, n)
}

/// Equality of two polytopes given in the same ambient lattice.
pub fn same_polytope(a: &LatticePolytope, b: &LatticePolytope) -> bool {
    let mut x = a.ambient_vertices();
    let mut y = b.ambient_vertices();
    x.sort();
    y.sort();
    a.ambient_rank() == b.ambient_rank() && x == y
}

impl NefPartition {
    /// `assignment[i]` is the part of the i-th vertex of Δ° (in the order of
    /// `delta.polar()?.vertices()`).
    pub fn new(delta: &LatticePolytope, assignment: &[usize]) -> Result<NefPartition> {
        if !delta.is_reflexive() {
            return Err(delta.polar().err().unwrap_or(Error::NotReflexive {
                vertices: "base polytope is not reflexive".into(),
            }));
        }
        let polar = delta.polar()?;
        let verts = polar.vertices().to_vec();
        if assignment.len() != verts.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} part labels for {} vertices",
                assignment.len(),
                verts.len()
            )));
        }
        let r = assignment.iter().max().map_or(0, |m| m + 1);
        let mut parts = vec![Vec::new(); r];
        for (i, &a) in assignment.iter().enumerate() {
            parts[a].push(i);
        }
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::NotNefPartition("empty part".into()));
        }
        let n = polar.rank();
        let origin = LatticeVector::zero(n);
        let mut nabla_i = Vec::with_capacity(r);
        for p in &parts {
            let mut pts: Vec<LatticeVector> = p.iter().map(|&i| verts[i].clone()).collect();
            pts.push(origin.clone());
            nabla_i.push(hull_of(&pts, n)?);
        }
        let refs: Vec<&LatticePolytope> = nabla_i.iter().collect();
        let nabla = LatticePolytope::minkowski_sum(&refs)?;
        if nabla.dim() != n || !nabla.is_reflexive() {
            return Err(Error::NotNefPartition(
                "the Minkowski sum of the parts is not reflexive".into(),
            ));
        }
        let mut delta_i = Vec::with_capacity(r);
        for p in &parts {
            let ineqs: Vec<(Vec<BigInt>, BigInt)> = verts
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let b = if p.contains(&i) { BigInt::one() } else { BigInt::zero() };
                    (v.to_big(), b)
                })
                .collect();
            let vs = vertices_from_inequalities(&ineqs, n)?;
            let mut pts = Vec::with_capacity(vs.len());
            for v in vs {
                if v.iter().any(|q| !q.is_integer()) {
                    return Err(Error::NotNefPartition("a part polytope has fractional vertices".into()));
                }
                pts.push(LatticeVector::from_big(&v.iter().map(|q| q.to_integer()).collect::<Vec<_>>())?);
            }
            delta_i.push(hull_of(&pts, n)?);
        }
        Ok(NefPartition {
            base: delta.clone(),
            polar,
            parts,
            nabla_i,
            nabla,
            delta_i,
        })
    }

    /// Parts given as vertex coordinates of Δ°.
    pub fn from_vertex_parts(delta: &LatticePolytope, parts: &[Vec<LatticeVector>]) -> Result<NefPartition> {
        let polar = delta.polar()?;
        let mut assignment = Vec::with_capacity(polar.vertices().len());
        for v in polar.vertices() {
            let hits: Vec<usize> = (0..parts.len()).filter(|&i| parts[i].contains(v)).collect();
            match hits.as_slice() {
                [i] => assignment.push(*i),
                [] => return Err(Error::NotNefPartition(format!("vertex {v} is in no part"))),
                _ => return Err(Error::NotNefPartition(format!("vertex {v} is in several parts"))),
            }
        }
        let total: usize = parts.iter().map(|p| p.len()).sum();
        if total != assignment.len() {
            return Err(Error::NotNefPartition("parts list points that are not vertices of the polar".into()));
        }
        NefPartition::new(delta, &assignment)
    }

    pub fn base(&self) -> &LatticePolytope {
        &self.base
    }

    /// Δ°, whose vertices are partitioned.
    pub fn polar(&self) -> &LatticePolytope {
        &self.polar
    }

    pub fn nparts(&self) -> usize {
        self.parts.len()
    }

    /// Vertex indices of Δ° in each part.
    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part_vertices(&self, i: usize) -> Vec<LatticeVector> {
        self.parts[i].iter().map(|&j| self.polar.vertices()[j].clone()).collect()
    }

    pub fn nabla_i(&self) -> &[LatticePolytope] {
        &self.nabla_i
    }

    pub fn nabla(&self) -> &LatticePolytope {
        &self.nabla
    }

    pub fn delta_i(&self) -> &[LatticePolytope] {
        &self.delta_i
    }

    /// ∇° = Conv(Δ₀, Δ₁, ...).
    pub fn nabla_polar(&self) -> Result<LatticePolytope> {
        let pts: Vec<LatticeVector> = self.delta_i.iter().flat_map(|d| d.ambient_vertices()).collect();
        LatticePolytope::hull(&pts)
    }

    /// The dual nef-partition: base ∇, with the vertices of ∇° grouped by
    /// the Δᵢ containing them.
    pub fn dual(&self) -> Result<NefPartition> {
        let np = self.nabla.polar()?;
        let mut assignment = Vec::with_capacity(np.vertices().len());
        for v in np.vertices() {
            let hits: Vec<usize> = (0..self.nparts()).filter(|&i| self.delta_i[i].contains_ambient(v)).collect();
            match hits.as_slice() {
                [i] => assignment.push(*i),
                _ => return Err(Error::NotNefPartition(format!("vertex {v} of the dual polar is not in exactly one part"))),
            }
        }
        NefPartition::new(&self.nabla, &assignment)
    }

    /// The four polytope identities Δ° = Conv(∇ᵢ), ∇° = Conv(Δᵢ), Δ = ΣΔᵢ,
    /// ∇ = Σ∇ᵢ, each as a boolean.
    pub fn identities(&self) -> Result<[bool; 4]> {
        let n = self.polar.rank();
        let conv_nabla: Vec<LatticeVector> = self.nabla_i.iter().flat_map(|p| p.ambient_vertices()).collect();
        let a = same_polytope(&hull_of(&conv_nabla, n)?, &self.polar);
        let b = same_polytope(&self.nabla_polar()?, &self.nabla.polar()?);
        let di: Vec<&LatticePolytope> = self.delta_i.iter().collect();
        let c = same_polytope(&LatticePolytope::minkowski_sum(&di)?, &self.base);
        let ni: Vec<&LatticePolytope> = self.nabla_i.iter().collect();
        let d = same_polytope(&LatticePolytope::minkowski_sum(&ni)?, &self.nabla);
        Ok([a, b, c, d])
    }

    /// Exponent shifts `a_ρ(i) = −min_{m ∈ Δᵢ} ⟨m, v_ρ⟩` for each part and
    /// ray; errors unless they sum to one over the parts.
    pub fn shifts(&self, rays: &[LatticeVector]) -> Result<Vec<Vec<i64>>> {
        let mut out = vec![Vec::with_capacity(rays.len()); self.nparts()];
        for v in rays {
            let mut total = 0;
            for (i, d) in self.delta_i.iter().enumerate() {
                let m = d
                    .ambient_vertices()
                    .iter()
                    .map(|u| u.try_dot(v))
                    .collect::<Result<Vec<i64>>>()?
                    .into_iter()
                    .min()
                    .unwrap_or(0);
                out[i].push(-m);
                total += -m;
            }
            if total != 1 {
                return Err(Error::NegativeExponent(v.to_string()));
            }
        }
        Ok(out)
    }

    /// Vertex indices of `fan`'s rays grouped by part of this partition, with
    /// rays identified by coordinates; rays that are not vertices of Δ° are
    /// left out.
    pub fn ray_parts(&self, fan: &Fan) -> Vec<Vec<usize>> {
        (0..self.nparts())
            .map(|i| {
                let vs = self.part_vertices(i);
                (0..fan.nrays()).filter(|&j| vs.contains(&fan.rays()[j])).collect()
            })
            .collect()
    }
}

/// One polynomial per part: the term of `m ∈ Δᵢ` carries
/// `z_ρ^{⟨m, v_ρ⟩ + a_ρ(i)}`.
pub fn nef_ci_polynomials(
    np: &NefPartition,
    fan: &Fan,
    vars: &[String],
    mode: MonomialMode,
    coefficients: &[Coefficients],
) -> Result<Vec<SparsePoly>> {
    if vars.len() != fan.nrays() {
        return Err(Error::ShapeMismatch(format!("{} names for {} rays", vars.len(), fan.nrays())));
    }
    if coefficients.len() != np.nparts() {
        return Err(Error::ShapeMismatch(format!(
            "{} coefficient sets for {} parts",
            coefficients.len(),
            np.nparts()
        )));
    }
    let shifts = np.shifts(fan.rays())?;
    np.delta_i
        .iter()
        .zip(&shifts)
        .zip(coefficients)
        .map(|((d, s), c)| part_polynomial(&monomial_points(d, mode), fan.rays(), s, vars, c))
        .collect()
}

/// Hodge numbers (h¹¹, h²¹) of a generic anticanonical hypersurface for a
/// 4-dimensional reflexive Δ.
pub fn batyrev_hodge(delta: &LatticePolytope) -> Result<(i64, i64)> {
    if delta.rank() != 4 || delta.embedding().is_some() {
        return Err(Error::InvalidInput(format!(
            "Hodge formula needs a 4-dimensional polytope, got dimension {}",
            delta.rank()
        )));
    }
    let polar = delta.polar()?;
    if !delta.is_reflexive() {
        return Err(Error::NotReflexive { vertices: "base polytope is not reflexive".into() });
    }
    Ok((batyrev_term(&polar)?, batyrev_term(delta)?))
}

fn batyrev_term(p: &LatticePolytope) -> Result<i64> {
    let mut h = p.points().len() as i64 - 5;
    for f in p.faces(3) {
        h -= f.l_star as i64;
    }
    for f in p.faces(2) {
        h += (f.l_star * p.dual_face(&f)?.l_star) as i64;
    }
    Ok(h)
}

/// Degree data of the GKZ system of a nef complete intersection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkzDegrees {
    /// One row per Mori generator, one entry per coefficient.
    pub rows: Vec<Vec<i64>>,
    /// Part and mirror point of each coefficient column; the origin column
    /// of a part has the zero vector.
    pub columns: Vec<(usize, LatticeVector)>,
    pub origin_flags: Vec<bool>,
    /// The Mori generators with the origin entry appended.
    pub generators: Vec<LatticeVector>,
}

/// GKZ degrees from the Mori cone of a complete mirror fan: each generator
/// is restricted to the rays of each part and followed by the negated sum
/// of those entries for the part's origin.
pub fn gkz_degrees(mirror_fan: &Fan, parts: &[Vec<usize>]) -> Result<GkzDegrees> {
    let generators = mori_cone(mirror_fan)?;
    let n = mirror_fan.rank();
    let mut columns = Vec::new();
    let mut origin_flags = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        for &j in p {
            let v = mirror_fan
                .rays()
                .get(j)
                .ok_or_else(|| Error::InvalidInput(format!("ray index {j} out of range")))?;
            columns.push((i, v.clone()));
            origin_flags.push(false);
        }
        columns.push((i, LatticeVector::zero(n)));
        origin_flags.push(true);
    }
    let rows = generators
        .iter()
        .map(|g| {
            let mut row = Vec::with_capacity(columns.len());
            for p in parts {
                let mut s = 0;
                for &j in p {
                    row.push(g.0[j]);
                    s += g.0[j];
                }
                row.push(-s);
            }
            row
        })
        .collect();
    Ok(GkzDegrees { rows, columns, origin_flags, generators })
}

impl GkzDegrees {
    pub fn nmoduli(&self) -> usize {
        self.rows.len()
    }

    /// `∏ c_j^{d_j}` for each row, given the coefficient of each column.
    pub fn moduli(&self, coefficients: &[ParamScalar]) -> Result<Vec<ParamScalar>> {
        if coefficients.len() != self.columns.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for {} columns",
                coefficients.len(),
                self.columns.len()
            )));
        }
        self.rows
            .iter()
            .map(|r| {
                let mut acc = ParamScalar::one();
                for (c, &d) in coefficients.iter().zip(r) {
                    if d != 0 {
                        acc = acc.mul(&c.pow(i32::try_from(d).map_err(|_| Error::Overflow)?)?);
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// `⟨deg_j, k⟩` for every column.
    pub fn pairings(&self, k: &[i64]) -> Result<Vec<i64>> {
        if k.len() != self.rows.len() {
            return Err(Error::ShapeMismatch(format!("multi-index of length {} for {} moduli", k.len(), self.rows.len())));
        }
        Ok((0..self.columns.len())
            .map(|j| self.rows.iter().zip(k).map(|(r, &x)| r[j] * x).sum())
            .collect())
    }
}

fn factorial(n: i64, memo: &mut Vec<BigInt>) -> BigInt {
    let n = n as usize;
    while memo.len() <= n {
        let k = memo.len();
        let next = &memo[k - 1] * BigInt::from(k);
        memo.push(next);
    }
    memo[n].clone()
}

/// Coefficient of `∏ B_i^{k_i}` in the GKZ series: origin columns give
/// `(−⟨deg_j, k⟩)!` in the numerator, all others `⟨deg_j, k⟩!` in the
/// denominator; zero when any argument is negative.
pub fn gkz_coefficient(deg: &GkzDegrees, k: &[i64]) -> Result<BigInt> {
    let mut memo = vec![BigInt::one()];
    gkz_coefficient_memo(deg, k, &mut memo)
}

fn gkz_coefficient_memo(deg: &GkzDegrees, k: &[i64], memo: &mut Vec<BigInt>) -> Result<BigInt> {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (x, &origin) in deg.pairings(k)?.into_iter().zip(&deg.origin_flags) {
        let a = if origin { -x } else { x };
        if a < 0 {
            return Ok(BigInt::zero());
        }
        if origin {
            num *= factorial(a, memo);
        } else {
            den *= factorial(a, memo);
        }
    }
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    if !r.is_zero() {
        return Err(Error::InvalidInput(format!("GKZ coefficient at {k:?} is not an integer")));
    }
    Ok(q)
}

/// Reindexed two-modulus GKZ series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReindexedSeries {
    /// Index of the modulus whose exponent was shifted.
    pub shifted: usize,
    /// The support constraint `⟨c, k⟩ ≥ 0` that became the new index.
    pub constraint: Vec<i64>,
    /// Coefficients keyed by the new multi-index, same slot order as the
    /// original moduli.
    pub table: BTreeMap<(i64, i64), BigInt>,
}

impl ReindexedSeries {
    /// Old multi-index corresponding to a new one.
    pub fn original_index(&self, new: (i64, i64)) -> (i64, i64) {
        let c = &self.constraint;
        let other = 1 - self.shifted;
        let k = [new.0, new.1];
        let mut old = k;
        old[self.shifted] = (k[self.shifted] - c[other] * k[other]) / c[self.shifted];
        (old[0], old[1])
    }
}

/// Substitute the single mixed-sign support constraint `⟨c, k⟩ ≥ 0` as a new
/// summation index so that the series runs over all nonnegative indices;
/// returns all coefficients with new indices summing to at most
/// `max_total`.
pub fn gkz_series_reindexed(deg: &GkzDegrees, max_total: i64) -> Result<ReindexedSeries> {
    if deg.nmoduli() != 2 {
        return Err(Error::ShapeMismatch(format!("expected two moduli, found {}", deg.nmoduli())));
    }
    let mixed: Vec<Vec<i64>> = (0..deg.columns.len())
        .filter(|&j| !deg.origin_flags[j])
        .map(|j| vec![deg.rows[0][j], deg.rows[1][j]])
        .filter(|c| c.iter().any(|&x| x > 0) && c.iter().any(|&x| x < 0))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let [c] = mixed.as_slice() else {
        return Err(Error::ShapeMismatch(format!(
            "expected one mixed-sign support constraint, found {}",
            mixed.len()
        )));
    };
    let shifted = (0..2)
        .find(|&i| c[i] == 1)
        .ok_or_else(|| Error::ShapeMismatch(format!("support constraint {c:?} has no unit entry")))?;
    let mut out = ReindexedSeries { shifted, constraint: c.clone(), table: BTreeMap::new() };
    let mut memo = vec![BigInt::one()];
    for total in 0..=max_total {
        for a in 0..=total {
            let new = (a, total - a);
            let old = out.original_index(new);
            let v = gkz_coefficient_memo(deg, &[old.0, old.1], &mut memo)?;
            out.table.insert(new, v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector(v.to_vec())
    }

    #[test]
    fn segment_hypersurface() {
        let seg = LatticePolytope::hull(&[lv(&[-1]), lv(&[1])]).unwrap();
        let fan = Fan::new(1, vec![lv(&[1]), lv(&[-1])], vec![vec![0], vec![1]]).unwrap();
        let vars = vec!["x".to_string(), "y".to_string()];
        let pts = monomial_points(&seg, MonomialMode::All);
        let mut c = Coefficients::ones();
        c.set(lv(&[0]), ParamScalar::param("c"));
        let p = anticanonical_polynomial(&seg, &fan, &vars, MonomialMode::All, &c).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(p.render(), "x^2 + c*x*y + y^2");
    }

    #[test]
    fn single_part_is_anticanonical() {
        let tri = LatticePolytope::hull(&[lv(&[2, -1]), lv(&[-1, 2]), lv(&[-1, -1])]).unwrap();
        let np = NefPartition::new(&tri, &[0, 0, 0]).unwrap();
        assert!(same_polytope(np.nabla(), np.polar()));
        assert_eq!(np.identities().unwrap(), [true; 4]);
        let d = np.dual().unwrap();
        assert!(same_polytope(d.base(), np.polar()));
        assert!(same_polytope(d.dual().unwrap().base(), &tri));
    }

    #[test]
    fn projective_plane_gkz() {
        let fan = Fan::new(2, vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap();
        let deg = gkz_degrees(&fan, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(deg.rows, vec![vec![1, 1, 1, -3]]);
        assert_eq!(gkz_coefficient(&deg, &[2]).unwrap(), BigInt::from(90));
        let a: Vec<ParamScalar> = (0..4).map(|i| ParamScalar::param(&format!("a{i}"))).collect();
        assert_eq!(deg.moduli(&a).unwrap()[0].render(), "a0*a1*a2/(a3^3)");
    }
}
