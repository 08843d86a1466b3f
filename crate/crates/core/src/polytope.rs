//! Lattice polytopes: hulls, polar duality, face lattices, lattice points and
//! the boundary skeleton.

use crate::cone::{extreme_rays, face_closure, facet_normals};
use crate::error::{Error, Result};
use crate::lattice::{rank_of, LatticeVector, Sublattice};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

/// Facet inequality `⟨u, normal⟩ ≥ −offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facet {
    pub normal: LatticeVector,
    pub offset: i64,
}

impl Facet {
    /// `⟨u, normal⟩ + offset`, zero exactly on the facet.
    pub fn eval(&self, u: &LatticeVector) -> i64 {
        u.dot(&self.normal) + self.offset
    }
}

/// A face, identified by the indices of its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    pub dim: usize,
    pub vertex_indices: Vec<usize>,
    /// Indices of the facets containing the face.
    pub facet_indices: Vec<usize>,
    /// Number of lattice points.
    pub l: usize,
    /// Number of relative interior lattice points.
    pub l_star: usize,
}

/// Lattice points adjacent along edges of the polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonGraph {
    pub nodes: Vec<LatticeVector>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug)]
struct FaceData {
    by_dim: Vec<Vec<Face>>,
    by_facets: HashMap<Vec<usize>, (usize, usize)>,
}

/// A full-dimensional lattice polytope, possibly living in a sublattice of a
/// larger ambient lattice.
#[derive(Debug)]
pub struct LatticePolytope {
    rank: usize,
    vertices: Vec<LatticeVector>,
    facets: Vec<Facet>,
    embedding: Option<Sublattice>,
    points: OnceLock<Vec<LatticeVector>>,
    faces: OnceLock<FaceData>,
    polar: OnceLock<std::result::Result<Box<LatticePolytope>, Error>>,
}

impl Clone for LatticePolytope {
    fn clone(&self) -> Self {
        LatticePolytope {
            rank: self.rank,
            vertices: self.vertices.clone(),
            facets: self.facets.clone(),
            embedding: self.embedding.clone(),
            points: OnceLock::new(),
            faces: OnceLock::new(),
            polar: OnceLock::new(),
        }
    }
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank
            && self.vertices == other.vertices
            && self.embedding == other.embedding
    }
}

impl Eq for LatticePolytope {}

impl fmt::Display for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-d lattice polytope with {} vertices", self.rank, self.vertices.len())
    }
}

fn to_big(v: &LatticeVector) -> Vec<BigInt> {
    v.to_big()
}

/// Vertices (rational) of `{y : ⟨y, a_i⟩ ≥ −b_i}`; the set must be bounded.
pub fn vertices_from_inequalities(
    ineqs: &[(Vec<BigInt>, BigInt)],
    dim: usize,
) -> Result<Vec<Vec<BigRational>>> {
    // Homogenize: (t, y) with t·b + a·y ≥ 0 and t ≥ 0.
    let mut cons: Vec<Vec<BigInt>> = Vec::with_capacity(ineqs.len() + 1);
    let mut t = vec![BigInt::zero(); dim + 1];
    t[0] = BigInt::one();
    cons.push(t);
    for (a, b) in ineqs {
        let mut c = vec![b.clone()];
        c.extend(a.iter().cloned());
        cons.push(c);
    }
    let rays = extreme_rays(&cons, dim + 1)?;
    let mut out = Vec::new();
    for r in rays {
        if r[0].is_zero() {
            return Err(Error::InvalidInput("inequalities define an unbounded set".into()));
        }
        out.push(
            r[1..]
                .iter()
                .map(|x| BigRational::new(x.clone(), r[0].clone()))
                .collect(),
        );
    }
    out.sort();
    Ok(out)
}

fn affine_directions(points: &[LatticeVector]) -> Vec<LatticeVector> {
    let p0 = &points[0];
    points[1..].iter().map(|p| p.sub(p0)).collect()
}

impl LatticePolytope {
    /// Convex hull of lattice points; the points must affinely span the
    /// ambient space.
    pub fn hull(points: &[LatticeVector]) -> Result<LatticePolytope> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("empty point set".into()));
        };
        let n = first.rank();
        if points.iter().any(|p| p.rank() != n) {
            return Err(Error::InvalidInput("points of different ranks".into()));
        }
        let dirs = affine_directions(points);
        let d = rank_of(&dirs);
        if d < n {
            let span = Sublattice::saturated_span(&dirs, n);
            let basis: Vec<String> = span.basis_vectors().iter().map(|v| v.to_string()).collect();
            return Err(Error::NotFullDimensional {
                dim: d,
                basis: format!("[{}]", basis.join(", ")),
            });
        }
        let gens: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| {
                let mut g = vec![BigInt::one()];
                g.extend(to_big(p));
                g
            })
            .collect();
        let normals = facet_normals(&gens, n + 1)?;
        let mut facets: Vec<Facet> = normals
            .into_iter()
            .map(|f| {
                Ok(Facet {
                    offset: f[0].to_i64().ok_or(Error::Overflow)?,
                    normal: LatticeVector::from_big(&f[1..])?,
                })
            })
            .collect::<Result<_>>()?;
        facets.sort_by(|a, b| a.normal.cmp(&b.normal).then(a.offset.cmp(&b.offset)));
        let mut vertices: BTreeSet<LatticeVector> = BTreeSet::new();
        for p in points {
            let tight: Vec<LatticeVector> = facets
                .iter()
                .filter(|f| f.eval(p) == 0)
                .map(|f| f.normal.clone())
                .collect();
            if tight.len() >= n && rank_of(&tight) == n {
                vertices.insert(p.clone());
            }
        }
        Ok(LatticePolytope {
            rank: n,
            vertices: vertices.into_iter().collect(),
            facets,
            embedding: None,
            points: OnceLock::new(),
            faces: OnceLock::new(),
            polar: OnceLock::new(),
        })
    }

    /// Hull of points whose linear span may be a proper subspace; the result
    /// lives in the saturated sublattice of that span.
    pub fn hull_in_span(points: &[LatticeVector], ambient_rank: usize) -> Result<LatticePolytope> {
        let span = Sublattice::saturated_span(points, ambient_rank);
        if span.rank() == ambient_rank {
            return LatticePolytope::hull(points);
        }
        let local: Vec<LatticeVector> =
            points.iter().map(|p| span.coordinates(p)).collect::<Result<_>>()?;
        let mut p = LatticePolytope::hull(&local)?;
        p.embedding = Some(span);
        Ok(p)
    }

    /// Rank of the lattice the polytope is full-dimensional in.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.rank
    }

    pub fn ambient_rank(&self) -> usize {
        self.embedding.as_ref().map_or(self.rank, |s| s.ambient_rank())
    }

    pub fn embedding(&self) -> Option<&Sublattice> {
        self.embedding.as_ref()
    }

    /// Vertices in local coordinates, lexicographically sorted.
    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    fn to_ambient(&self, v: &LatticeVector) -> LatticeVector {
        match &self.embedding {
            Some(s) => s.embed(v),
            None => v.clone(),
        }
    }

    /// Vertices in ambient coordinates, sorted.
    pub fn ambient_vertices(&self) -> Vec<LatticeVector> {
        let mut v: Vec<LatticeVector> = self.vertices.iter().map(|v| self.to_ambient(v)).collect();
        v.sort();
        v
    }

    /// All lattice points in ambient coordinates, sorted.
    pub fn ambient_points(&self) -> Vec<LatticeVector> {
        let mut v: Vec<LatticeVector> = self.points().iter().map(|v| self.to_ambient(v)).collect();
        v.sort();
        v
    }

    pub fn contains(&self, u: &LatticeVector) -> bool {
        self.facets.iter().all(|f| f.eval(u) >= 0)
    }

    /// Membership for a point in ambient coordinates.
    pub fn contains_ambient(&self, u: &LatticeVector) -> bool {
        match &self.embedding {
            Some(s) => s.coordinates(u).map_or(false, |x| self.contains(&x)),
            None => self.contains(u),
        }
    }

    /// True when the origin is an interior point.
    pub fn origin_interior(&self) -> bool {
        self.facets.iter().all(|f| f.offset > 0)
    }

    /// Polar polytope `{v : ⟨u, v⟩ ≥ −1 for all u}` in the dual lattice.
    pub fn polar(&self) -> Result<LatticePolytope> {
        self.polar_ref().map(|p| p.clone())
    }

    fn polar_ref(&self) -> Result<&LatticePolytope> {
        let r = self.polar.get_or_init(|| self.compute_polar().map(Box::new));
        match r {
            Ok(p) => Ok(p),
            Err(e) => Err(e.clone()),
        }
    }

    fn compute_polar(&self) -> Result<LatticePolytope> {
        if !self.origin_interior() {
            return Err(Error::PolarUndefined);
        }
        let mut frac = Vec::new();
        let mut verts = Vec::new();
        for f in &self.facets {
            if f.normal.0.iter().all(|x| x % f.offset == 0) {
                verts.push(LatticeVector(f.normal.0.iter().map(|x| x / f.offset).collect()));
            } else {
                let parts: Vec<String> = f
                    .normal
                    .0
                    .iter()
                    .map(|x| {
                        let q = BigRational::new(BigInt::from(*x), BigInt::from(f.offset));
                        q.to_string()
                    })
                    .collect();
                frac.push(format!("({})", parts.join(",")));
            }
        }
        if !frac.is_empty() {
            return Err(Error::NotReflexive {
                vertices: frac.join(" "),
            });
        }
        LatticePolytope::hull(&verts)
    }

    pub fn is_reflexive(&self) -> bool {
        self.origin_interior() && self.facets.iter().all(|f| f.offset == 1)
    }

    /// Lattice points in local coordinates, lexicographically sorted.
    pub fn points(&self) -> &[LatticeVector] {
        self.points.get_or_init(|| self.enumerate_points())
    }

    fn enumerate_points(&self) -> Vec<LatticeVector> {
        let n = self.rank;
        let lo: Vec<i64> = (0..n).map(|j| self.vertices.iter().map(|v| v.0[j]).min().unwrap()).collect();
        let hi: Vec<i64> = (0..n).map(|j| self.vertices.iter().map(|v| v.0[j]).max().unwrap()).collect();
        // suffix[f][k] = max over coordinates k.. of the facet's contribution.
        let suffix: Vec<Vec<i64>> = self
            .facets
            .iter()
            .map(|f| {
                let mut s = vec![0i64; n + 1];
                for k in (0..n).rev() {
                    let a = f.normal.0[k];
                    s[k] = s[k + 1] + (a * lo[k]).max(a * hi[k]);
                }
                s
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0i64; n];
        let mut partial = vec![0i64; self.facets.len()];
        self.recurse(0, &lo, &hi, &suffix, &mut cur, &mut partial, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &self,
        k: usize,
        lo: &[i64],
        hi: &[i64],
        suffix: &[Vec<i64>],
        cur: &mut Vec<i64>,
        partial: &mut Vec<i64>,
        out: &mut Vec<LatticeVector>,
    ) {
        let n = self.rank;
        if k == n {
            if self.facets.iter().zip(partial.iter()).all(|(f, p)| p + f.offset >= 0) {
                out.push(LatticeVector(cur.clone()));
            }
            return;
        }
        for x in lo[k]..=hi[k] {
            let mut ok = true;
            for (i, f) in self.facets.iter().enumerate() {
                let p = partial[i] + f.normal.0[k] * x;
                if p + suffix[i][k + 1] + f.offset < 0 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for (i, f) in self.facets.iter().enumerate() {
                partial[i] += f.normal.0[k] * x;
            }
            cur[k] = x;
            self.recurse(k + 1, lo, hi, suffix, cur, partial, out);
            for (i, f) in self.facets.iter().enumerate() {
                partial[i] -= f.normal.0[k] * x;
            }
        }
    }

    /// Interior and boundary lattice points (local coordinates, sorted).
    pub fn lattice_points(&self) -> (Vec<LatticeVector>, Vec<LatticeVector>) {
        let (int, bd): (Vec<_>, Vec<_>) = self
            .points()
            .iter()
            .cloned()
            .partition(|p| self.facets.iter().all(|f| f.eval(p) > 0));
        (int, bd)
    }

    pub fn boundary_points(&self) -> Vec<LatticeVector> {
        self.lattice_points().1
    }

    fn facet_set_of(&self, u: &LatticeVector) -> Vec<usize> {
        (0..self.facets.len()).filter(|&i| self.facets[i].eval(u) == 0).collect()
    }

    fn face_data(&self) -> &FaceData {
        self.faces.get_or_init(|| {
            let nv = self.vertices.len();
            let full: BTreeSet<usize> = (0..nv).collect();
            let vsets: Vec<BTreeSet<usize>> = self
                .facets
                .iter()
                .map(|f| (0..nv).filter(|&i| f.eval(&self.vertices[i]) == 0).collect())
                .collect();
            let sets = face_closure(&full, &vsets);
            let mut by_dim: Vec<Vec<Face>> = vec![Vec::new(); self.rank + 1];
            let mut by_facets = HashMap::new();
            let mut counts: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
            for p in self.points() {
                let fs = self.facet_set_of(p);
                counts.entry(fs).or_default().1 += 1;
            }
            let mut faces = Vec::new();
            for s in sets {
                if s.is_empty() {
                    continue;
                }
                let vs: Vec<usize> = s.iter().copied().collect();
                let facet_indices: Vec<usize> = (0..self.facets.len())
                    .filter(|&i| vs.iter().all(|&v| vsets[i].contains(&v)))
                    .collect();
                let pts: Vec<LatticeVector> = vs.iter().map(|&i| self.vertices[i].clone()).collect();
                let dim = rank_of(&affine_directions(&pts));
                faces.push((dim, vs, facet_indices));
            }
            for (dim, vs, fi) in faces {
                let l_star = counts.get(&fi).map_or(0, |c| c.1);
                let l = self
                    .points()
                    .iter()
                    .filter(|p| fi.iter().all(|&i| self.facets[i].eval(p) == 0))
                    .count();
                let face = Face {
                    dim,
                    vertex_indices: vs,
                    facet_indices: fi.clone(),
                    l,
                    l_star,
                };
                by_dim[dim].push(face);
            }
            for (d, list) in by_dim.iter_mut().enumerate() {
                list.sort_by(|a, b| a.vertex_indices.cmp(&b.vertex_indices));
                for (i, f) in list.iter().enumerate() {
                    by_facets.insert(f.facet_indices.clone(), (d, i));
                }
            }
            FaceData { by_dim, by_facets }
        })
    }

    /// Faces of dimension `d` (0 ≤ d ≤ rank), ordered by vertex index sets.
    pub fn faces(&self, d: usize) -> Vec<Face> {
        self.face_data().by_dim.get(d).cloned().unwrap_or_default()
    }

    /// Number of faces in each dimension 0..rank-1.
    pub fn face_counts(&self) -> Vec<usize> {
        (0..self.rank).map(|d| self.faces(d).len()).collect()
    }

    /// The face of the polar polytope pairing to −1 with every point of `f`.
    pub fn dual_face(&self, f: &Face) -> Result<Face> {
        if !self.is_reflexive() {
            return Err(Error::NotReflexive {
                vertices: "dual faces require a reflexive polytope".into(),
            });
        }
        let polar = self.polar_ref()?;
        let index: BTreeMap<&LatticeVector, usize> =
            polar.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut vs: Vec<usize> = f
            .facet_indices
            .iter()
            .map(|&i| index[&self.facets[i].normal])
            .collect();
        vs.sort();
        let fd = polar.face_data();
        let fsets: Vec<usize> = {
            let vset: BTreeSet<usize> = vs.iter().copied().collect();
            (0..polar.facets.len())
                .filter(|&i| vset.iter().all(|&v| polar.facets[i].eval(&polar.vertices[v]) == 0))
                .collect()
        };
        match fd.by_facets.get(&fsets) {
            Some(&(d, i)) => Ok(fd.by_dim[d][i].clone()),
            None => Err(Error::InvalidInput("dual face not found".into())),
        }
    }

    /// Lattice points of a face, in local coordinates.
    pub fn face_points(&self, f: &Face) -> Vec<LatticeVector> {
        self.points()
            .iter()
            .filter(|p| f.facet_indices.iter().all(|&i| self.facets[i].eval(p) == 0))
            .cloned()
            .collect()
    }

    /// Boundary points with edges joining consecutive lattice points along
    /// each 1-face.
    pub fn skeleton(&self) -> SkeletonGraph {
        let nodes = self.boundary_points();
        let index: BTreeMap<&LatticeVector, usize> =
            nodes.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edges = BTreeSet::new();
        for e in self.faces(1) {
            let a = &self.vertices[e.vertex_indices[0]];
            let b = &self.vertices[e.vertex_indices[1]];
            let d = b.sub(a);
            let g = d.content();
            let step = LatticeVector(d.0.iter().map(|x| x / g).collect());
            let mut prev = a.clone();
            for _ in 0..g {
                let next = prev.add(&step);
                let (i, j) = (index[&prev], index[&next]);
                edges.insert((i.min(j), i.max(j)));
                prev = next;
            }
        }
        SkeletonGraph {
            nodes,
            edges: edges.into_iter().collect(),
        }
    }

    /// Minkowski sum (both polytopes full-dimensional in the same lattice, or
    /// given through ambient points).
    pub fn minkowski_sum(parts: &[&LatticePolytope]) -> Result<LatticePolytope> {
        let n = parts
            .first()
            .ok_or_else(|| Error::InvalidInput("empty Minkowski sum".into()))?
            .ambient_rank();
        let mut acc: BTreeSet<LatticeVector> = BTreeSet::new();
        acc.insert(LatticeVector::zero(n));
        for p in parts {
            let mut next = BTreeSet::new();
            for a in &acc {
                for v in p.ambient_vertices() {
                    next.insert(a.add(&v));
                }
            }
            acc = next;
        }
        let pts: Vec<LatticeVector> = acc.into_iter().collect();
        LatticePolytope::hull_in_span(&pts, n)
    }

    /// Intersection with the real span of a saturated sublattice, as a lattice
    /// polytope in that sublattice. Fails when a vertex of the slice is not a
    /// lattice point.
    pub fn slice(&self, sub: &Sublattice) -> Result<LatticePolytope> {
        if self.embedding.is_some() {
            return Err(Error::InvalidInput("slices of embedded polytopes".into()));
        }
        let basis = sub.basis_vectors();
        let k = sub.rank();
        let ineqs: Vec<(Vec<BigInt>, BigInt)> = self
            .facets
            .iter()
            .map(|f| {
                let a: Vec<BigInt> = basis.iter().map(|b| BigInt::from(b.dot(&f.normal))).collect();
                (a, BigInt::from(f.offset))
            })
            .collect();
        let verts = vertices_from_inequalities(&ineqs, k)?;
        let mut local = Vec::new();
        for v in &verts {
            if v.iter().any(|q| !q.is_integer()) {
                let parts: Vec<String> = v.iter().map(|q| q.to_string()).collect();
                return Err(Error::NotReflexive {
                    vertices: format!("slice vertex ({}) is not a lattice point", parts.join(",")),
                });
            }
            local.push(LatticeVector::from_big(
                &v.iter().map(|q| q.to_integer()).collect::<Vec<_>>(),
            )?);
        }
        let mut p = LatticePolytope::hull(&local)?;
        p.embedding = Some(sub.clone());
        Ok(p)
    }

    /// Image under the linear map `u ↦ (⟨u, b_1⟩, …, ⟨u, b_k⟩)`.
    pub fn project(&self, basis: &[LatticeVector]) -> Result<LatticePolytope> {
        let pts: Vec<LatticeVector> = self
            .ambient_vertices()
            .iter()
            .map(|v| LatticeVector(basis.iter().map(|b| v.dot(b)).collect()))
            .collect();
        LatticePolytope::hull(&pts)
    }

    /// JSON form `{"rank", "vertices"}` (ambient coordinates).
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rank": self.ambient_rank(),
            "vertices": self.ambient_vertices().iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<LatticePolytope> {
        let rank = v
            .get("rank")
            .and_then(|r| r.as_u64())
            .ok_or_else(|| Error::Parse("polytope: missing \"rank\"".into()))? as usize;
        let verts: Vec<Vec<i64>> = serde_json::from_value(
            v.get("vertices")
                .cloned()
                .ok_or_else(|| Error::Parse("polytope: missing \"vertices\"".into()))?,
        )
        .map_err(|e| Error::Parse(format!("polytope vertices: {e}")))?;
        if verts.iter().any(|p| p.len() != rank) {
            return Err(Error::Parse("polytope: vertex length differs from rank".into()));
        }
        let pts: Vec<LatticeVector> = verts.into_iter().map(LatticeVector).collect();
        LatticePolytope::hull(&pts)
    }
}

/// Whether a linear unimodular map carries `p` onto `q` (both full-dimensional
/// in lattices of equal rank, origin fixed).
pub fn linearly_equivalent(p: &LatticePolytope, q: &LatticePolytope) -> bool {
    let k = p.rank();
    if q.rank() != k
        || p.vertices().len() != q.vertices().len()
        || p.facets().len() != q.facets().len()
        || p.points().len() != q.points().len()
    {
        return false;
    }
    let pv = p.vertices();
    let qv = q.vertices();
    // k linearly independent vertices of p.
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..pv.len() {
        let mut trial: Vec<LatticeVector> = chosen.iter().map(|&j| pv[j].clone()).collect();
        trial.push(pv[i].clone());
        if rank_of(&trial) == trial.len() {
            chosen.push(i);
            if chosen.len() == k {
                break;
            }
        }
    }
    if chosen.len() < k {
        return false;
    }
    let bp: Vec<Vec<BigRational>> = chosen
        .iter()
        .map(|&i| pv[i].0.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let Some(inv) = invert(&bp) else { return false };
    // Cheap invariant: lattice points on each vertex's star edges.
    let edge_len = |poly: &LatticePolytope| -> Vec<Vec<i64>> {
        let mut per = vec![Vec::new(); poly.vertices().len()];
        for e in poly.faces(1) {
            let a = &poly.vertices()[e.vertex_indices[0]];
            let b = &poly.vertices()[e.vertex_indices[1]];
            let g = b.sub(a).content();
            per[e.vertex_indices[0]].push(g);
            per[e.vertex_indices[1]].push(g);
        }
        for v in per.iter_mut() {
            v.sort();
        }
        per
    };
    let pe = edge_len(p);
    let qe = edge_len(q);
    let qset: BTreeSet<&LatticeVector> = qv.iter().collect();
    let mut tuple = vec![0usize; k];
    fn search(
        depth: usize,
        tuple: &mut Vec<usize>,
        chosen: &[usize],
        pe: &[Vec<i64>],
        qe: &[Vec<i64>],
        check: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == tuple.len() {
            return check(tuple);
        }
        for j in 0..qe.len() {
            if tuple[..depth].contains(&j) || pe[chosen[depth]] != qe[j] {
                continue;
            }
            tuple[depth] = j;
            if search(depth + 1, tuple, chosen, pe, qe, check) {
                return true;
            }
        }
        false
    }
    let mut check = |t: &[usize]| -> bool {
        // A = inv · Bq.
        let mut a = vec![vec![BigRational::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut s = BigRational::zero();
                for (l, &tl) in t.iter().enumerate() {
                    s += &inv[i][l] * BigRational::from_integer(qv[tl].0[j].into());
                }
                a[i][j] = s;
            }
        }
        if a.iter().flatten().any(|x| !x.is_integer()) {
            return false;
        }
        let ai: Vec<Vec<i64>> = a
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer().to_i64().unwrap_or(i64::MAX)).collect())
            .collect();
        for v in pv {
            let img = LatticeVector(
                (0..k)
                    .map(|j| (0..k).map(|i| v.0[i] * ai[i][j]).sum())
                    .collect(),
            );
            if !qset.contains(&img) {
                return false;
            }
        }
        let m = crate::lattice::IntMatrix::from_i64(&ai).expect("square");
        m.det().map(|d| d.abs().is_one()).unwrap_or(false)
    };
    search(0, &mut tuple, &chosen, &pe, &qe, &mut check)
}

/// Inverse of a square rational matrix.
pub fn invert(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let aug: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            for j in 0..n {
                row.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            row
        })
        .collect();
    let (e, piv) = crate::lattice::row_echelon(aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(e.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Gcd helper used by callers that work with raw coordinates.
pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector(v.to_vec())
    }

    fn delta3() -> LatticePolytope {
        LatticePolytope::hull(&[lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1]), lv(&[-1, -4, -6])])
            .unwrap()
    }

    #[test]
    fn simplex_combinatorics() {
        let p = delta3();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.face_counts(), vec![4, 6, 4]);
        assert!(p.is_reflexive());
        let (int, _) = p.lattice_points();
        assert_eq!(int, vec![lv(&[0, 0, 0])]);
    }

    #[test]
    fn degenerate_hull() {
        match LatticePolytope::hull(&[lv(&[1, 0]), lv(&[-1, 0])]) {
            Err(Error::NotFullDimensional { dim, basis }) => {
                assert_eq!(dim, 1);
                assert_eq!(basis, "[(1,0)]");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scaled_cross_polytope_is_not_reflexive() {
        let p = LatticePolytope::hull(&[lv(&[2, 0]), lv(&[-2, 0]), lv(&[0, 2]), lv(&[0, -2])]).unwrap();
        assert!(!p.is_reflexive());
        match p.polar() {
            Err(Error::NotReflexive { vertices }) => assert!(vertices.contains("1/2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unit_simplex_origin_on_boundary() {
        let p = LatticePolytope::hull(&[lv(&[0, 0]), lv(&[1, 0]), lv(&[0, 1])]).unwrap();
        assert!(!p.is_reflexive());
        assert_eq!(p.polar().unwrap_err(), Error::PolarUndefined);
    }

    #[test]
    fn square_skeleton_is_an_8_cycle() {
        let p = LatticePolytope::hull(&[lv(&[1, 1]), lv(&[1, -1]), lv(&[-1, 1]), lv(&[-1, -1])]).unwrap();
        let g = p.skeleton();
        assert_eq!(g.nodes.len(), 8);
        assert_eq!(g.edges.len(), 8);
        let mut deg = vec![0; 8];
        for (a, b) in &g.edges {
            deg[*a] += 1;
            deg[*b] += 1;
        }
        assert!(deg.iter().all(|&d| d == 2));
    }

    #[test]
    fn simplex_skeleton_follows_edges() {
        let p = delta3();
        let g = p.skeleton();
        // Only the edge from e1 to (-1,-4,-6) has an interior lattice point.
        assert_eq!(g.edges.len(), 7);
        assert!(g.nodes.contains(&lv(&[0, -2, -3])));
    }

    #[test]
    fn embedded_hull() {
        let p = LatticePolytope::hull_in_span(
            &[lv(&[0, 0, 0]), lv(&[1, 0, 0]), lv(&[0, 1, 0])],
            3,
        )
        .unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.ambient_points().len(), 3);
    }

    #[test]
    fn equivalence_detects_unimodular_images() {
        let p = delta3();
        let q = LatticePolytope::hull(&[lv(&[1, 0, 0]), lv(&[1, 1, 0]), lv(&[0, 0, 1]), lv(&[-5, -4, -6])])
            .unwrap();
        assert!(linearly_equivalent(&p, &q));
        let r = LatticePolytope::hull(&[lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1]), lv(&[-1, -1, -1])])
            .unwrap();
        assert!(!linearly_equivalent(&p, &r));
    }
}
