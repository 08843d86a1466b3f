//! Rational fans, fan morphisms and toric fibrations.

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::lattice::{
    clear_denominators, hermite_form, kernel_basis, make_primitive_big, primitive, rank_of,
    IntMatrix, LatticeVector, Sublattice,
};
use crate::polytope::{linearly_equivalent, LatticePolytope};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

/// A cone of a fan: indices into the fan's ray list plus its geometry.
#[derive(Clone, Debug)]
pub struct FanCone {
    pub ray_indices: Vec<usize>,
    pub cone: Cone,
    /// Facets as sorted global ray-index sets, aligned with
    /// `cone.local_facets()`.
    pub facets: Vec<Vec<usize>>,
}

impl FanCone {
    fn build(rays: &[LatticeVector], idx: &[usize], rank: usize) -> Result<FanCone> {
        let gens: Vec<LatticeVector> = idx.iter().map(|&i| rays[i].clone()).collect();
        let cone = Cone::new(&gens, rank)?;
        let facets = cone
            .facet_generator_sets()
            .into_iter()
            .map(|s| s.into_iter().map(|j| idx[j]).collect())
            .collect();
        Ok(FanCone {
            ray_indices: idx.to_vec(),
            cone,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }
}

/// A fan given by primitive rays and its maximal cones.
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    cones: Vec<Vec<usize>>,
    maximal: OnceLock<Vec<FanCone>>,
    all: OnceLock<Vec<FanCone>>,
}

impl Clone for Fan {
    fn clone(&self) -> Self {
        Fan {
            rank: self.rank,
            rays: self.rays.clone(),
            cones: self.cones.clone(),
            maximal: OnceLock::new(),
            all: OnceLock::new(),
        }
    }
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan")
            .field("rank", &self.rank)
            .field("rays", &self.rays)
            .field("cones", &self.cones)
            .finish()
    }
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

/// Combinatorial properties reported by [`classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanClass {
    pub simplicial: bool,
    pub smooth: bool,
    pub complete: bool,
    /// Only computed when a reference polytope is supplied.
    pub crepant: Option<bool>,
}

impl Fan {
    /// Fan from rays and generating cones. Rays must be primitive and
    /// distinct, each cone strictly convex and listed by its extremal rays.
    /// Non-maximal cones are discarded, as are rays used by no cone (the
    /// remaining rays keep their order).
    pub fn new(rank: usize, rays: Vec<LatticeVector>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        let mut seen = BTreeSet::new();
        for r in &rays {
            if r.rank() != rank {
                return Err(Error::ShapeMismatch(format!("ray {r} is not of rank {rank}")));
            }
            if r.is_zero() || r.content() != 1 {
                return Err(Error::InvalidInput(format!("ray {r} is not primitive")));
            }
            if !seen.insert(r.clone()) {
                return Err(Error::InvalidInput(format!("duplicate ray {r}")));
            }
        }
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        for c in &cones {
            if c.iter().any(|&i| i >= rays.len()) {
                return Err(Error::InvalidInput("cone refers to a missing ray".into()));
            }
            let s: BTreeSet<usize> = c.iter().copied().collect();
            if !sets.contains(&s) {
                sets.push(s);
            }
        }
        let maximal: Vec<BTreeSet<usize>> = sets
            .iter()
            .filter(|s| !sets.iter().any(|t| t.len() > s.len() && s.is_subset(t)))
            .cloned()
            .collect();
        let used: BTreeSet<usize> = maximal.iter().flatten().copied().collect();
        let remap: BTreeMap<usize, usize> =
            used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let new_rays: Vec<LatticeVector> = used.iter().map(|&i| rays[i].clone()).collect();
        let mut new_cones: Vec<Vec<usize>> = maximal
            .iter()
            .map(|s| s.iter().map(|i| remap[i]).collect())
            .collect();
        new_cones.sort();
        for c in &new_cones {
            let fc = FanCone::build(&new_rays, c, rank)?;
            if fc.cone.extremal_generators().len() != c.len() {
                return Err(Error::InvalidInput(format!(
                    "cone {:?} lists a non-extremal ray",
                    c.iter().map(|&i| new_rays[i].to_string()).collect::<Vec<_>>()
                )));
            }
        }
        Ok(Fan {
            rank,
            rays: new_rays,
            cones: new_cones,
            maximal: OnceLock::new(),
            all: OnceLock::new(),
        })
    }

    /// Fan with no cones.
    pub fn empty(rank: usize) -> Fan {
        Fan {
            rank,
            rays: Vec::new(),
            cones: Vec::new(),
            maximal: OnceLock::new(),
            all: OnceLock::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn nrays(&self) -> usize {
        self.rays.len()
    }

    /// Maximal cones as sorted ray-index lists.
    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn ncones(&self) -> usize {
        self.cones.len()
    }

    pub fn ray_index(&self, r: &LatticeVector) -> Option<usize> {
        self.rays.iter().position(|x| x == r)
    }

    /// Same fan with the rays listed in the given order (a permutation of
    /// the current rays).
    pub fn with_ray_order(&self, order: &[LatticeVector]) -> Result<Fan> {
        if order.len() != self.rays.len() {
            return Err(Error::InvalidInput("ray order must list every ray once".into()));
        }
        let pos: Vec<usize> = self
            .rays
            .iter()
            .map(|r| {
                order
                    .iter()
                    .position(|x| x == r)
                    .ok_or_else(|| Error::InvalidInput(format!("ray {r} missing from order")))
            })
            .collect::<Result<_>>()?;
        let cones = self
            .cones
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.iter().map(|&i| pos[i]).collect();
                v.sort();
                v
            })
            .collect();
        Fan::new(self.rank, order.to_vec(), cones)
    }

    /// Geometry of the maximal cones, in the order of [`Fan::cones`].
    pub fn maximal_cones(&self) -> &[FanCone] {
        self.maximal.get_or_init(|| {
            self.cones
                .iter()
                .map(|c| FanCone::build(&self.rays, c, self.rank).expect("validated cone"))
                .collect()
        })
    }

    /// Every cone of the fan (including the zero cone), sorted by dimension
    /// and then by ray-index set.
    pub fn all_cones(&self) -> &[FanCone] {
        self.all.get_or_init(|| {
            let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
            for fc in self.maximal_cones() {
                for face in fc.cone.faces() {
                    sets.insert(face.into_iter().map(|j| fc.ray_indices[j]).collect());
                }
            }
            if sets.is_empty() {
                sets.insert(Vec::new());
            }
            let mut out: Vec<FanCone> = sets
                .into_iter()
                .map(|s| FanCone::build(&self.rays, &s, self.rank).expect("face of a valid cone"))
                .collect();
            out.sort_by(|a, b| a.dim().cmp(&b.dim()).then(a.ray_indices.cmp(&b.ray_indices)));
            out
        })
    }

    /// The cone whose relative interior contains `x`, as a sorted ray-index
    /// set; `None` when `x` is outside the support.
    pub fn locate(&self, x: &LatticeVector) -> Option<Vec<usize>> {
        if x.is_zero() {
            return Some(Vec::new());
        }
        for fc in self.maximal_cones() {
            let Some(y) = fc.cone.local_coordinates(x) else {
                continue;
            };
            let vals: Vec<BigInt> = fc
                .cone
                .local_facets()
                .iter()
                .map(|f| f.iter().zip(&y).map(|(a, b)| a * b).sum())
                .collect();
            if vals.iter().any(|v: &BigInt| v.is_negative()) {
                continue;
            }
            let mut face: BTreeSet<usize> = fc.ray_indices.iter().copied().collect();
            for (v, facet) in vals.iter().zip(&fc.facets) {
                if v.is_zero() {
                    let fs: BTreeSet<usize> = facet.iter().copied().collect();
                    face = face.intersection(&fs).copied().collect();
                }
            }
            return Some(face.into_iter().collect());
        }
        None
    }

    pub fn support_contains(&self, x: &LatticeVector) -> bool {
        self.locate(x).is_some()
    }

    pub fn is_simplicial(&self) -> bool {
        self.maximal_cones().iter().all(|c| c.dim() == c.ray_indices.len())
    }

    /// Every maximal cone's rays extend to a lattice basis.
    pub fn is_smooth(&self) -> bool {
        self.maximal_cones().iter().all(cone_is_smooth)
    }

    /// All maximal cones are full-dimensional and every wall is shared by
    /// exactly two of them.
    pub fn is_complete(&self) -> bool {
        if self.cones.is_empty() {
            return self.rank == 0;
        }
        let mut walls: HashMap<Vec<usize>, usize> = HashMap::new();
        for c in self.maximal_cones() {
            if c.dim() != self.rank {
                return false;
            }
            for f in &c.facets {
                *walls.entry(f.clone()).or_default() += 1;
            }
        }
        walls.values().all(|&k| k == 2)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "rank": self.rank,
            "rays": self.rays.iter().map(|r| r.0.clone()).collect::<Vec<_>>(),
            "cones": self.cones,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Fan> {
        let rank = v
            .get("rank")
            .and_then(|r| r.as_u64())
            .ok_or_else(|| Error::Parse("fan: missing \"rank\"".into()))? as usize;
        let rays: Vec<Vec<i64>> = serde_json::from_value(
            v.get("rays").cloned().ok_or_else(|| Error::Parse("fan: missing \"rays\"".into()))?,
        )
        .map_err(|e| Error::Parse(format!("fan rays: {e}")))?;
        let cones: Vec<Vec<usize>> = serde_json::from_value(
            v.get("cones").cloned().ok_or_else(|| Error::Parse("fan: missing \"cones\"".into()))?,
        )
        .map_err(|e| Error::Parse(format!("fan cones: {e}")))?;
        Fan::new(rank, rays.into_iter().map(LatticeVector).collect(), cones)
    }
}

fn cone_is_smooth(c: &FanCone) -> bool {
    let k = c.dim();
    if k != c.ray_indices.len() {
        return false;
    }
    if k == 0 {
        return true;
    }
    let rows: Vec<Vec<BigInt>> = c
        .cone
        .generators()
        .iter()
        .map(|g| c.cone.local_coordinates(g).expect("generator in span"))
        .collect();
    let m = IntMatrix::new(rows, k).expect("square");
    m.det().map(|d| d.abs().is_one()).unwrap_or(false)
}

/// Smoothness of the cone generated by the given rays.
pub fn is_smooth_cone(rays: &[LatticeVector]) -> Result<bool> {
    let rank = rays.first().map_or(0, |r| r.rank());
    let idx: Vec<usize> = (0..rays.len()).collect();
    Ok(cone_is_smooth(&FanCone::build(rays, &idx, rank)?))
}

/// Simplicial, smooth and complete flags, plus crepancy with respect to a
/// reflexive polytope in the same lattice as the rays (every ray must be a
/// boundary lattice point of it).
pub fn classify(f: &Fan, reference: Option<&LatticePolytope>) -> FanClass {
    let crepant = reference.map(|p| {
        let bd: BTreeSet<LatticeVector> = p.boundary_points().into_iter().collect();
        f.rays.iter().all(|r| bd.contains(r))
    });
    FanClass {
        simplicial: f.is_simplicial(),
        smooth: f.is_smooth(),
        complete: f.is_complete(),
        crepant,
    }
}

/// Fan over the faces of a reflexive polytope: rays are its vertices, one
/// maximal cone per facet.
pub fn face_fan(p: &LatticePolytope) -> Result<Fan> {
    if !p.is_reflexive() {
        return Err(p.polar().err().unwrap_or(Error::NotReflexive {
            vertices: "polytope is not reflexive".into(),
        }));
    }
    let verts = p.vertices().to_vec();
    let cones = p
        .facets()
        .iter()
        .map(|f| (0..verts.len()).filter(|&i| f.eval(&verts[i]) == 0).collect())
        .collect();
    Fan::new(p.rank(), verts, cones)
}

/// Normal fan: rays are the inner facet normals, one maximal cone per vertex.
pub fn normal_fan(p: &LatticePolytope) -> Result<Fan> {
    let rays: Vec<LatticeVector> = p.facets().iter().map(|f| f.normal.clone()).collect();
    let cones = p
        .vertices()
        .iter()
        .map(|v| (0..rays.len()).filter(|&i| p.facets()[i].eval(v) == 0).collect())
        .collect();
    Fan::new(p.rank(), rays, cones)
}

/// Stellar subdivision at `ray`: every maximal cone containing it is
/// replaced by the joins of `ray` with its facets not containing it.
pub fn star_subdivide(f: &Fan, ray: &LatticeVector) -> Result<Fan> {
    let ray = primitive(ray)?;
    if f.ray_index(&ray).is_some() {
        return Ok(f.clone());
    }
    if !f.support_contains(&ray) {
        return Err(Error::OutsideSupport(ray.to_string()));
    }
    let mut rays = f.rays.clone();
    rays.push(ray.clone());
    let new = rays.len() - 1;
    let mut cones = Vec::new();
    for fc in f.maximal_cones() {
        if !fc.cone.contains(&ray) {
            cones.push(fc.ray_indices.clone());
            continue;
        }
        for (facet, normal) in fc.facets.iter().zip(fc.cone.local_facets()) {
            let y = fc.cone.local_coordinates(&ray).expect("ray in cone");
            let v: BigInt = normal.iter().zip(&y).map(|(a, b)| a * b).sum();
            if v.is_zero() {
                continue;
            }
            let mut c = facet.clone();
            c.push(new);
            cones.push(c);
        }
    }
    Fan::new(f.rank, rays, cones)
}

/// Insert rays one after another by stellar subdivision.
pub fn star_subdivide_all(f: &Fan, rays: &[LatticeVector]) -> Result<Fan> {
    let mut out = f.clone();
    for r in rays {
        out = star_subdivide(&out, r)?;
    }
    Ok(out)
}

/// Pulling triangulation of every maximal cone, rays taken in index order;
/// adds no rays.
pub fn pulling_triangulation(f: &Fan) -> Result<Fan> {
    fn pull(f: &Fan, set: &[usize], memo: &mut HashMap<Vec<usize>, Vec<Vec<usize>>>) -> Result<Vec<Vec<usize>>> {
        if let Some(r) = memo.get(set) {
            return Ok(r.clone());
        }
        let fc = FanCone::build(&f.rays, set, f.rank)?;
        let out = if fc.dim() == set.len() {
            vec![set.to_vec()]
        } else {
            let v = set[0];
            let mut acc = Vec::new();
            for facet in &fc.facets {
                if facet.contains(&v) {
                    continue;
                }
                for mut t in pull(f, facet, memo)? {
                    t.push(v);
                    t.sort();
                    acc.push(t);
                }
            }
            acc
        };
        memo.insert(set.to_vec(), out.clone());
        Ok(out)
    }
    let mut memo = HashMap::new();
    let mut cones = Vec::new();
    for c in &f.cones {
        cones.extend(pull(f, c, &mut memo)?);
    }
    Fan::new(f.rank, f.rays.clone(), cones)
}

/// Extremal rays of the Mori cone, as relations among the rays with one
/// extra entry for the origin equal to minus the sum of the others.
pub fn mori_cone(f: &Fan) -> Result<Vec<LatticeVector>> {
    if !f.is_complete() {
        return Err(Error::NotComplete);
    }
    let t = if f.is_simplicial() { f.clone() } else { pulling_triangulation(f)? };
    let n = t.nrays();
    // Walls shared by two maximal cones.
    let mut walls: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (ci, fc) in t.maximal_cones().iter().enumerate() {
        for facet in &fc.facets {
            walls.entry(facet.clone()).or_default().push(ci);
        }
    }
    let mut relations: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for (wall, cs) in &walls {
        let [a, b] = cs[..] else { continue };
        let ra = t.cones[a].iter().find(|i| !wall.contains(i)).copied().expect("apex");
        let rb = t.cones[b].iter().find(|i| !wall.contains(i)).copied().expect("apex");
        let mut idx = vec![ra, rb];
        idx.extend(wall.iter().copied());
        let m = IntMatrix::from_vectors(
            &idx.iter().map(|&i| t.rays[i].clone()).collect::<Vec<_>>(),
            t.rank,
        );
        let k = kernel_basis(&m);
        if k.nrows() != 1 {
            return Err(Error::InvalidInput("degenerate wall".into()));
        }
        let mut c = k.row(0).to_vec();
        if c[0].is_negative() {
            c.iter_mut().for_each(|x| *x = -&*x);
        }
        let mut rel = vec![BigInt::zero(); n];
        for (pos, &i) in idx.iter().enumerate() {
            rel[i] = c[pos].clone();
        }
        relations.insert(make_primitive_big(rel));
    }
    let gens: Vec<LatticeVector> = relations
        .iter()
        .map(|r| LatticeVector::from_big(r))
        .collect::<Result<_>>()?;
    let cone = Cone::new(&gens, n)?;
    let mut out: Vec<LatticeVector> = cone
        .extremal_generators()
        .into_iter()
        .map(|i| {
            let mut v = gens[i].0.clone();
            let s: i64 = v.iter().sum();
            v.push(-s);
            LatticeVector(v)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// A fan morphism with per-cone certificates.
#[derive(Clone, Debug)]
pub struct FanMorphism {
    pub matrix: IntMatrix,
    pub domain: Fan,
    pub codomain: Fan,
    /// For each maximal domain cone, the smallest codomain cone (as a
    /// ray-index set) containing its image.
    pub certificate: Vec<Vec<usize>>,
}

fn image(m: &IntMatrix, v: &LatticeVector) -> Result<LatticeVector> {
    v.apply(m)
}

fn image_cone(m: &IntMatrix, dom: &Fan, cod: &Fan, rays: &[usize]) -> Result<Option<Vec<usize>>> {
    let imgs: Vec<LatticeVector> =
        rays.iter().map(|&i| image(m, &dom.rays[i])).collect::<Result<_>>()?;
    let sum = imgs.iter().fold(LatticeVector::zero(cod.rank), |a, b| a.add(b));
    let Some(target) = cod.locate(&sum) else {
        return Ok(None);
    };
    if target.is_empty() {
        return Ok(imgs.iter().all(|v| v.is_zero()).then_some(target));
    }
    let gens: Vec<LatticeVector> = target.iter().map(|&i| cod.rays[i].clone()).collect();
    let c = Cone::new(&gens, cod.rank)?;
    Ok(imgs.iter().all(|v| c.contains(v)).then_some(target))
}

fn check_shapes(matrix: &IntMatrix, domain: &Fan, codomain: &Fan) -> Result<()> {
    if matrix.nrows() != domain.rank || matrix.ncols() != codomain.rank {
        return Err(Error::ShapeMismatch(format!(
            "a {}x{} matrix cannot map rank {} to rank {}",
            matrix.nrows(),
            matrix.ncols(),
            domain.rank,
            codomain.rank
        )));
    }
    Ok(())
}

fn describe(f: &Fan, c: &[usize]) -> String {
    format!("[{}]", c.iter().map(|&i| f.rays[i].to_string()).collect::<Vec<_>>().join(", "))
}

/// Verify that every domain cone maps into a single codomain cone.
pub fn check_compatibility(matrix: &IntMatrix, domain: &Fan, codomain: &Fan) -> Result<FanMorphism> {
    check_shapes(matrix, domain, codomain)?;
    let mut certificate = Vec::new();
    for c in &domain.cones {
        match image_cone(matrix, domain, codomain, c)? {
            Some(t) => certificate.push(t),
            None => return Err(Error::Incompatible { cone: describe(domain, c) }),
        }
    }
    Ok(FanMorphism {
        matrix: matrix.clone(),
        domain: domain.clone(),
        codomain: codomain.clone(),
        certificate,
    })
}

/// Rational `n x k` right inverse of a `k x n` basis: coordinates of `z` in
/// the span are `z · P`.
fn coordinate_map(basis: &IntMatrix) -> Vec<Vec<BigRational>> {
    let k = basis.nrows();
    let n = basis.ncols();
    let b: Vec<Vec<BigRational>> = basis
        .rows()
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    // G = B Bᵀ, P = Bᵀ G⁻¹.
    let g: Vec<Vec<BigRational>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (0..n).map(|l| &b[i][l] * &b[j][l]).sum())
                .collect()
        })
        .collect();
    let gi = crate::polytope::invert(&g).expect("basis rows are independent");
    (0..n)
        .map(|l| {
            (0..k)
                .map(|j| (0..k).map(|i| &b[i][l] * &gi[i][j]).sum())
                .collect()
        })
        .collect()
}

/// Ambient functionals describing a cone: `f·z ≥ 0` for each inequality and
/// `e·z = 0` for each equation.
fn cone_constraints(fc: &FanCone, rank: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let k = fc.dim();
    if k == 0 {
        let eqs = (0..rank)
            .map(|i| (0..rank).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        return (Vec::new(), eqs);
    }
    let basis = fc.cone.span().basis();
    let p = coordinate_map(basis);
    let ineqs = fc
        .cone
        .local_facets()
        .iter()
        .map(|a| {
            let f: Vec<BigRational> = (0..rank)
                .map(|l| (0..k).map(|j| &p[l][j] * BigRational::from_integer(a[j].clone())).sum())
                .collect();
            clear_denominators(&f)
        })
        .collect();
    let eqs = crate::lattice::right_kernel(basis.rows(), rank);
    (ineqs, eqs)
}

/// Refine the domain so that every cone maps into a single codomain cone:
/// each domain cone is cut by the preimages of all codomain cones.
pub fn subdivide_domain(matrix: &IntMatrix, domain: &Fan, codomain: &Fan) -> Result<Fan> {
    check_shapes(matrix, domain, codomain)?;
    for (i, r) in domain.rays.iter().enumerate() {
        if !codomain.support_contains(&image(matrix, r)?) {
            return Err(Error::OutsideSupport(format!("{r} (ray {i})")));
        }
    }
    let n = domain.rank;
    let m_big: Vec<Vec<BigInt>> = matrix.rows().to_vec();
    let cod_constraints: Vec<(Vec<Vec<BigInt>>, Vec<Vec<BigInt>>)> = codomain
        .maximal_cones()
        .iter()
        .map(|fc| cone_constraints(fc, codomain.rank))
        .collect();
    let pieces: Vec<Vec<Vec<LatticeVector>>> = domain
        .maximal_cones()
        .par_iter()
        .map(|fc| -> Result<Vec<Vec<LatticeVector>>> {
            let d = fc.dim();
            let basis = fc.cone.span().basis();
            // Local coordinates y ↦ ambient y·B ↦ image y·B·m.
            let bm: Vec<Vec<BigInt>> = basis
                .rows()
                .iter()
                .map(|row| {
                    (0..codomain.rank)
                        .map(|j| (0..n).map(|l| &row[l] * &m_big[l][j]).sum())
                        .collect()
                })
                .collect();
            let pull = |f: &Vec<BigInt>| -> Vec<BigInt> {
                (0..d).map(|i| bm[i].iter().zip(f).map(|(a, b)| a * b).sum()).collect()
            };
            let mut out = Vec::new();
            for (ineqs, eqs) in &cod_constraints {
                let mut cons: Vec<Vec<BigInt>> = fc.cone.local_facets().to_vec();
                cons.extend(ineqs.iter().map(&pull));
                for e in eqs {
                    let p = pull(e);
                    cons.push(p.iter().map(|x| -x).collect());
                    cons.push(p);
                }
                let rays = crate::cone::extreme_rays(&cons, d)?;
                let amb: Vec<LatticeVector> = rays
                    .iter()
                    .map(|y| {
                        let v: Vec<BigInt> = (0..n)
                            .map(|l| (0..d).map(|i| &y[i] * &basis.rows()[i][l]).sum())
                            .collect();
                        LatticeVector::from_big(&make_primitive_big(v))
                    })
                    .collect::<Result<_>>()?;
                if rank_of(&amb) == d {
                    out.push(amb);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut new_rays: BTreeSet<LatticeVector> = BTreeSet::new();
    for piece in pieces.iter().flatten() {
        for r in piece {
            if domain.ray_index(r).is_none() {
                new_rays.insert(r.clone());
            }
        }
    }
    let mut rays = domain.rays.clone();
    rays.extend(new_rays);
    let index: HashMap<&LatticeVector, usize> = rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
    for piece in pieces.iter().flatten() {
        let mut c: Vec<usize> = piece.iter().map(|r| index[r]).collect();
        c.sort();
        cones.insert(c);
    }
    Fan::new(n, rays.clone(), cones.into_iter().collect())
}

fn lattice_map_surjective(m: &IntMatrix) -> bool {
    let (h, _) = hermite_form(&m.clone());
    let k = m.ncols();
    let pivots: Vec<BigInt> = h
        .rows()
        .iter()
        .filter_map(|r| r.iter().find(|x| !x.is_zero()).cloned())
        .collect();
    pivots.len() == k && pivots.iter().all(|p| p.abs().is_one())
}

impl FanMorphism {
    /// Codomain cone (ray-index set) whose relative interior contains the
    /// image of the relative interior of the given domain cone.
    fn target(&self, rays: &[usize]) -> Result<Vec<usize>> {
        image_cone(&self.matrix, &self.domain, &self.codomain, rays)?
            .ok_or_else(|| Error::Incompatible { cone: describe(&self.domain, rays) })
    }

    /// Toric fibration test: the lattice map is surjective, every codomain
    /// cone is hit, and for every codomain cone σ′ each minimal domain cone
    /// whose relative interior maps into the relative interior of σ′ has
    /// the dimension of σ′ and an image of that dimension.
    pub fn is_fibration(&self) -> bool {
        self.fibration_failure().is_none()
    }

    /// Reason the morphism is not a fibration, if any.
    pub fn fibration_failure(&self) -> Option<String> {
        if !lattice_map_surjective(&self.matrix) {
            return Some("lattice map is not surjective".into());
        }
        let mut pre: HashMap<Vec<usize>, Vec<&FanCone>> = HashMap::new();
        for dc in self.domain.all_cones() {
            match self.target(&dc.ray_indices) {
                Ok(t) => pre.entry(t).or_default().push(dc),
                Err(e) => return Some(e.to_string()),
            }
        }
        for cc in self.codomain.all_cones() {
            let Some(list) = pre.get(&cc.ray_indices) else {
                return Some(format!(
                    "codomain cone {} is not hit",
                    describe(&self.codomain, &cc.ray_indices)
                ));
            };
            for d in list {
                let minimal = !list.iter().any(|e| {
                    e.ray_indices.len() < d.ray_indices.len()
                        && e.ray_indices.iter().all(|i| d.ray_indices.contains(i))
                });
                if !minimal {
                    continue;
                }
                let imgs: Vec<LatticeVector> = d
                    .ray_indices
                    .iter()
                    .map(|&i| image(&self.matrix, &self.domain.rays[i]).expect("shape checked"))
                    .collect();
                if d.dim() != cc.dim() || rank_of(&imgs) != cc.dim() {
                    return Some(format!(
                        "cone {} over {} has the wrong dimension",
                        describe(&self.domain, &d.ray_indices),
                        describe(&self.codomain, &cc.ray_indices)
                    ));
                }
            }
        }
        None
    }

    /// Kernel sublattice and the subfan of cones mapped to zero, in
    /// coordinates of a saturated kernel basis.
    pub fn kernel_fan(&self) -> Result<(Fan, Sublattice)> {
        let kb = kernel_basis(&self.matrix);
        let k = kb.nrows();
        let sub = Sublattice::from_basis(kb)?;
        if k == 0 {
            return Ok((Fan::empty(0), sub));
        }
        let zero: Vec<&FanCone> = self
            .domain
            .all_cones()
            .iter()
            .filter(|c| {
                !c.ray_indices.is_empty()
                    && c.ray_indices.iter().all(|&i| {
                        image(&self.matrix, &self.domain.rays[i]).map(|v| v.is_zero()).unwrap_or(false)
                    })
            })
            .collect();
        let used: BTreeSet<usize> = zero.iter().flat_map(|c| c.ray_indices.iter().copied()).collect();
        let local: BTreeMap<usize, usize> = used.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let rays: Vec<LatticeVector> = used
            .iter()
            .map(|&i| sub.coordinates(&self.domain.rays[i]))
            .collect::<Result<_>>()?;
        let cones = zero
            .iter()
            .map(|c| c.ray_indices.iter().map(|i| local[i]).collect())
            .collect();
        Ok((Fan::new(k, rays, cones)?, sub))
    }

    /// Pullback of homogeneous coordinates: for each codomain ray the list
    /// of (domain ray, exponent) with φ(v_ρ) = c·v_ρ′.
    pub fn homogeneous_map(&self) -> Result<MonomialMap> {
        let mut factors = vec![Vec::new(); self.codomain.nrays()];
        for (i, r) in self.domain.rays.iter().enumerate() {
            let w = image(&self.matrix, r)?;
            if w.is_zero() {
                continue;
            }
            let c = w.content();
            let p = LatticeVector(w.0.iter().map(|x| x / c).collect());
            match self.codomain.ray_index(&p) {
                Some(j) => factors[j].push((i, c as u32)),
                None => return Err(Error::NoMonomialForm(r.to_string())),
            }
        }
        Ok(MonomialMap { factors })
    }
}

/// Build a compatible morphism, failing with the first offending cone.
pub fn fan_morphism(matrix: &IntMatrix, domain: &Fan, codomain: &Fan) -> Result<FanMorphism> {
    check_compatibility(matrix, domain, codomain)
}

/// Monomial form of a toric morphism in homogeneous coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    /// Per codomain ray: domain ray indices with exponents.
    pub factors: Vec<Vec<(usize, u32)>>,
}

impl MonomialMap {
    /// Bracket notation `[m_0 : m_1 : …]` with the given domain names.
    pub fn render(&self, domain_names: &[String]) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|f| {
                if f.is_empty() {
                    return "1".to_string();
                }
                f.iter()
                    .map(|&(i, e)| {
                        if e == 1 {
                            domain_names[i].clone()
                        } else {
                            format!("{}^{}", domain_names[i], e)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .collect();
        format!("[{}]", parts.join(" : "))
    }
}

/// A fibration found by [`search_fibrations`].
#[derive(Clone, Debug)]
pub struct FibrationCandidate {
    pub subspace: Sublattice,
    pub slice: LatticePolytope,
    pub projection: LatticePolytope,
    pub balanced: bool,
}

/// Spans of candidate points, each produced once: the greedy basis of a
/// span (smallest point, then smallest point outside the span so far, ...)
/// must be the list of points that built it.
struct Span {
    basis: Vec<usize>,
    members: Vec<usize>,
}

fn primitive_up_to_sign(mut v: Vec<i64>) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| num_integer::Integer::gcd(&g, &x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

fn small_det(mut m: Vec<Vec<i128>>) -> i128 {
    // Fraction-free elimination.
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Vector orthogonal to `n - 1` rows of length `n` (signed maximal minors).
fn cross(rows: &[Vec<i128>], n: usize) -> Vec<i128> {
    (0..n)
        .map(|c| {
            let m: Vec<Vec<i128>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect())
                .collect();
            let d = small_det(m);
            if c % 2 == 0 { d } else { -d }
        })
        .collect()
}

/// Whether the span's member points have the origin in the relative
/// interior of their hull: no functional nonzero on the span is
/// nonnegative on all members. Extreme such functionals vanish on
/// `rank - 1` independent members.
fn origin_interior(pts: &[LatticeVector], span: &Span, n: usize) -> bool {
    let k = span.basis.len();
    let rows: Vec<Vec<BigInt>> = span.basis.iter().map(|&i| pts[i].to_big()).collect();
    let eqs: Vec<Vec<i128>> = crate::lattice::right_kernel(&rows, n)
        .iter()
        .map(|f| f.iter().map(|x| x.to_i128().expect("small functional")).collect())
        .collect();
    let members: Vec<Vec<i128>> = span
        .members
        .iter()
        .map(|&i| pts[i].0.iter().map(|&x| x as i128).collect())
        .collect();
    let dot = |f: &[i128], p: &[i128]| -> i128 { f.iter().zip(p).map(|(a, b)| a * b).sum() };
    let mut idx: Vec<usize> = (0..k.saturating_sub(1)).collect();
    loop {
        let mut rows: Vec<Vec<i128>> = idx.iter().map(|&i| members[i].clone()).collect();
        rows.extend(eqs.iter().cloned());
        let f = cross(&rows, n);
        if f.iter().any(|&x| x != 0) {
            let vals: Vec<i128> = members.iter().map(|p| dot(&f, p)).collect();
            if vals.iter().all(|&v| v >= 0) || vals.iter().all(|&v| v <= 0) {
                return false;
            }
        }
        // next (k-1)-subset
        let r = idx.len();
        let mut i = r;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < members.len() - r + i {
                idx[i] += 1;
                for j in i + 1..r {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn extend_span(pts: &[LatticeVector], span: &Span, n: usize) -> Vec<Span> {
    let rows: Vec<Vec<BigInt>> = span.basis.iter().map(|&i| pts[i].to_big()).collect();
    let functionals: Vec<Vec<i64>> = if rows.is_empty() {
        (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
    } else {
        crate::lattice::right_kernel(&rows, n)
            .into_iter()
            .map(|f| f.iter().map(|x| x.to_i64().expect("small functional")).collect())
            .collect()
    };
    let last = span.basis.last().copied();
    let mut groups: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (q, p) in pts.iter().enumerate() {
        let img: Vec<i64> = functionals.iter().map(|f| f.iter().zip(&p.0).map(|(a, b)| a * b).sum()).collect();
        if img.iter().all(|&x| x == 0) {
            continue;
        }
        groups.entry(primitive_up_to_sign(img)).or_default().push(q);
    }
    let mut out: Vec<Span> = groups
        .into_values()
        .filter(|g| last.is_none_or(|l| g[0] > l))
        .map(|g| {
            let mut basis = span.basis.clone();
            basis.push(g[0]);
            let mut members = span.members.clone();
            members.extend(g);
            members.sort();
            Span { basis, members }
        })
        .collect();
    out.sort_by(|a, b| a.basis.cmp(&b.basis));
    out
}

/// Sublattices `L` of rank `k` for which `p ∩ L` is a reflexive polytope
/// of full rank in `L`, each with its slice.
pub fn reflexive_slices(p: &LatticePolytope, k: usize) -> Result<Vec<(Sublattice, LatticePolytope)>> {
    let n = p.rank();
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!("slice rank must lie in 1..{n}")));
    }
    // Vertices of a slice lie on faces of dimension at most n - k.
    let mut cand: BTreeSet<LatticeVector> = BTreeSet::new();
    for d in 0..=n - k {
        for f in p.faces(d) {
            cand.extend(p.face_points(&f));
        }
    }
    let pts: Vec<LatticeVector> = cand.into_iter().collect();
    let mut level = vec![Span { basis: Vec::new(), members: Vec::new() }];
    for _ in 0..k - 1 {
        level = level.par_iter().flat_map_iter(|s| extend_span(&pts, s, n)).collect();
    }
    // A reflexive slice has its vertices among the candidates, so at least
    // k + 1 of them must lie in the span, surrounding the origin.
    let subs: Vec<Sublattice> = level
        .par_iter()
        .flat_map_iter(|s| extend_span(&pts, s, n))
        .filter(|s| s.members.len() > k)
        .filter(|s| origin_interior(&pts, s, n))
        .map(|s| {
            let vs: Vec<LatticeVector> = s.members.iter().map(|&i| pts[i].clone()).collect();
            Sublattice::saturated_span(&vs, n)
        })
        .collect();
    let mut found: Vec<(Sublattice, LatticePolytope)> = subs
        .into_par_iter()
        .map(|sub| match p.slice(&sub) {
            Ok(sl) if sl.is_reflexive() => Ok(Some((sub, sl))),
            Ok(_) | Err(Error::NotReflexive { .. }) | Err(Error::NotFullDimensional { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    found.sort_by(|a, b| a.0.basis().rows().cmp(b.0.basis().rows()));
    Ok(found)
}

fn projection_of(delta: &LatticePolytope, sub: &Sublattice) -> Result<Option<LatticePolytope>> {
    let projection = delta.project(&sub.basis_vectors())?;
    Ok(projection.is_reflexive().then_some(projection))
}

fn is_balanced(projection: &LatticePolytope, delta_slices: &[(Sublattice, LatticePolytope)]) -> bool {
    delta_slices.iter().any(|(_, s)| linearly_equivalent(s, projection))
}

/// Evaluate a single candidate subspace of the N lattice.
pub fn fibration_candidate(delta: &LatticePolytope, sub: &Sublattice) -> Result<Option<FibrationCandidate>> {
    let polar = delta.polar()?;
    let slice = match polar.slice(sub) {
        Ok(s) => s,
        Err(Error::NotReflexive { .. }) | Err(Error::NotFullDimensional { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if !slice.is_reflexive() {
        return Ok(None);
    }
    let Some(projection) = projection_of(delta, sub)? else {
        return Ok(None);
    };
    let balanced = is_balanced(&projection, &reflexive_slices(delta, sub.rank())?);
    Ok(Some(FibrationCandidate {
        subspace: sub.clone(),
        slice,
        projection,
        balanced,
    }))
}

/// All rank-`k` sublattices of N whose slice of Δ° is reflexive, together
/// with the projection of Δ along the complementary quotient. A candidate
/// is balanced when Δ itself has a reflexive slice equivalent to that
/// projection.
pub fn search_fibrations(delta: &LatticePolytope, k: usize) -> Result<Vec<FibrationCandidate>> {
    let polar = delta.polar()?;
    let delta_slices = reflexive_slices(delta, k)?;
    let mut found = Vec::new();
    for (sub, slice) in reflexive_slices(&polar, k)? {
        if let Some(projection) = projection_of(delta, &sub)? {
            let balanced = is_balanced(&projection, &delta_slices);
            found.push(FibrationCandidate { subspace: sub, slice, projection, balanced });
        }
    }
    Ok(found)
}

/// Rational solution helper shared with tests: coefficients expressing `v`
/// in terms of `basis` rows, if any.
pub fn express(basis: &[LatticeVector], v: &LatticeVector) -> Option<Vec<BigRational>> {
    let rows: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|b| b.0.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let t: Vec<BigRational> = v.0.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    crate::lattice::solve_left(&rows, &t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector(v.to_vec())
    }

    fn p2() -> Fan {
        Fan::new(2, vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap()
    }

    fn p1xp1() -> Fan {
        Fan::new(
            2,
            vec![lv(&[1, 0]), lv(&[-1, 0]), lv(&[0, 1]), lv(&[0, -1])],
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
        )
        .unwrap()
    }

    #[test]
    fn projective_plane() {
        let f = p2();
        let c = classify(&f, None);
        assert!(c.simplicial && c.smooth && c.complete);
        assert_eq!(mori_cone(&f).unwrap(), vec![lv(&[1, 1, 1, -3])]);
    }

    #[test]
    fn product_of_lines_mori() {
        let m = mori_cone(&p1xp1()).unwrap();
        assert_eq!(m, vec![lv(&[0, 0, 1, 1, -2]), lv(&[1, 1, 0, 0, -2])]);
    }

    #[test]
    fn star_subdivision_of_smooth_cone() {
        let f = Fan::new(2, vec![lv(&[1, 0]), lv(&[0, 1])], vec![vec![0, 1]]).unwrap();
        let g = star_subdivide(&f, &lv(&[1, 1])).unwrap();
        assert_eq!(g.ncones(), 2);
        assert!(g.is_smooth());
        assert_eq!(star_subdivide(&g, &lv(&[1, 1])).unwrap(), g);
        assert!(matches!(star_subdivide(&f, &lv(&[-1, 0])), Err(Error::OutsideSupport(_))));
    }

    #[test]
    fn identity_morphism() {
        let f = p2();
        let id = IntMatrix::identity(2);
        let phi = check_compatibility(&id, &f, &f).unwrap();
        assert_eq!(phi.certificate, f.cones().to_vec());
        assert!(phi.is_fibration());
        let (k, sub) = phi.kernel_fan().unwrap();
        assert_eq!(k.nrays(), 0);
        assert_eq!(sub.rank(), 0);
        let names: Vec<String> = (0..3).map(|i| format!("x{i}")).collect();
        assert_eq!(phi.homogeneous_map().unwrap().render(&names), "[x0 : x1 : x2]");
    }

    #[test]
    fn projection_of_product_is_a_fibration() {
        let line = Fan::new(1, vec![lv(&[1]), lv(&[-1])], vec![vec![0], vec![1]]).unwrap();
        let m = IntMatrix::from_i64(&[vec![1], vec![0]]).unwrap();
        let phi = check_compatibility(&m, &p1xp1(), &line).unwrap();
        assert!(phi.is_fibration());
        let (k, sub) = phi.kernel_fan().unwrap();
        assert_eq!(k.nrays(), 2);
        assert_eq!(sub.basis_vectors(), vec![lv(&[0, 1])]);
        // P2 over the line is not equidimensional.
        let m2 = IntMatrix::from_i64(&[vec![1], vec![0]]).unwrap();
        assert!(check_compatibility(&m2, &p2(), &line).is_err());
        let sub2 = subdivide_domain(&m2, &p2(), &line).unwrap();
        assert_eq!(sub2.nrays(), 4);
        let phi2 = check_compatibility(&m2, &sub2, &line).unwrap();
        assert!(phi2.is_fibration());
        // The diagonal projection of P1xP1 has a kernel ray that is not a cone.
        let m3 = IntMatrix::from_i64(&[vec![1], vec![1]]).unwrap();
        let sub3 = subdivide_domain(&m3, &p1xp1(), &line).unwrap();
        assert_eq!(sub3.nrays(), 6);
        let phi3 = check_compatibility(&m3, &sub3, &line).unwrap();
        assert!(phi3.is_fibration());
        let blowup = star_subdivide(&p2(), &lv(&[1, 1])).unwrap();
        let down = check_compatibility(&IntMatrix::identity(2), &blowup, &p2()).unwrap();
        assert!(!down.is_fibration());
        let twice = IntMatrix::from_i64(&[vec![2]]).unwrap();
        assert!(!check_compatibility(&twice, &line, &line).unwrap().is_fibration());
    }

    #[test]
    fn square_search() {
        let sq = LatticePolytope::hull(&[lv(&[1, 1]), lv(&[1, -1]), lv(&[-1, 1]), lv(&[-1, -1])]).unwrap();
        let found = search_fibrations(&sq, 1).unwrap();
        let bases: Vec<Vec<LatticeVector>> = found.iter().map(|c| c.subspace.basis_vectors()).collect();
        assert_eq!(bases, vec![vec![lv(&[0, 1])], vec![lv(&[1, 0])]]);
    }
}
