//! Polyhedral cones: exact double description and cone geometry inside the
//! lattice spanned by the generators.

use crate::error::{Error, Result};
use crate::lattice::{
    clear_denominators, make_primitive_big, rank_of, row_echelon, LatticeVector, Sublattice,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

fn dot_big(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.0.len() {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, w)| w & !o.0.get(i).copied().unwrap_or(0) == 0)
    }
}

/// Extreme rays of the pointed cone `{x ∈ R^dim : c·x ≥ 0 for every c}`.
///
/// The constraints must span `R^dim`; otherwise the cone contains a line.
/// Rays are primitive integer vectors in lexicographic order.
pub fn extreme_rays(constraints: &[Vec<BigInt>], dim: usize) -> Result<Vec<Vec<BigInt>>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    // Choose a basis among the constraints.
    let mut basis: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for (i, c) in constraints.iter().enumerate() {
        let mut trial = rows.clone();
        trial.push(c.iter().map(|x| BigRational::from_integer(x.clone())).collect());
        if row_echelon(trial.clone()).1.len() > rows.len() {
            rows = trial;
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    if basis.len() < dim {
        return Err(Error::InvalidInput("cone contains a line".into()));
    }
    // Initial simplicial cone: columns of the inverse of the basis matrix.
    let n = dim;
    let mut aug: Vec<Vec<BigRational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut a = r.clone();
            for j in 0..n {
                a.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            a
        })
        .collect();
    aug = row_echelon(aug).0;
    let mut rays: Vec<Vec<BigInt>> = Vec::new();
    let mut zeros: Vec<Bits> = Vec::new();
    for j in 0..n {
        let col: Vec<BigRational> = (0..n).map(|i| aug[i][n + j].clone()).collect();
        rays.push(clear_denominators(&col));
        let mut z = Bits::new(constraints.len());
        for (k, &b) in basis.iter().enumerate() {
            if k != j {
                z.set(b);
            }
        }
        zeros.push(z);
    }
    let mut processed: Vec<usize> = basis.clone();
    for (t, c) in constraints.iter().enumerate() {
        if basis.contains(&t) {
            continue;
        }
        let s: Vec<BigInt> = rays.iter().map(|r| dot_big(c, r)).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| s[i].is_negative()).collect();
        if neg.is_empty() {
            for i in 0..rays.len() {
                if s[i].is_zero() {
                    zeros[i].set(t);
                }
            }
            processed.push(t);
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| s[i].is_positive()).collect();
        let mut new_rays = Vec::new();
        let mut new_zeros = Vec::new();
        for i in 0..rays.len() {
            if !s[i].is_negative() {
                let mut z = zeros[i].clone();
                if s[i].is_zero() {
                    z.set(t);
                }
                new_rays.push(rays[i].clone());
                new_zeros.push(z);
            }
        }
        let need = dim.saturating_sub(2) as u32;
        for &p in &pos {
            for &q in &neg {
                let common = zeros[p].and(&zeros[q]);
                if common.count() < need {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|r| r == p || r == q || !common.subset_of(&zeros[r]));
                if !adjacent {
                    continue;
                }
                let v: Vec<BigInt> = rays[q]
                    .iter()
                    .zip(&rays[p])
                    .map(|(a, b)| &s[p] * a - &s[q] * b)
                    .collect();
                let mut z = common;
                z.set(t);
                new_rays.push(make_primitive_big(v));
                new_zeros.push(z);
            }
        }
        rays = new_rays;
        zeros = new_zeros;
        processed.push(t);
    }
    let set: BTreeSet<Vec<BigInt>> = rays.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    Ok(set.into_iter().collect())
}

/// Inequalities `a·x ≥ 0` (primitive, sorted) describing the full-dimensional
/// cone generated by `gens` in `R^dim`.
pub fn facet_normals(gens: &[Vec<BigInt>], dim: usize) -> Result<Vec<Vec<BigInt>>> {
    extreme_rays(gens, dim)
}

/// A strictly convex rational cone given by generators in `Z^n`.
#[derive(Clone, Debug)]
pub struct Cone {
    ambient_rank: usize,
    rays: Vec<LatticeVector>,
    span: Sublattice,
    local_rays: Vec<Vec<BigInt>>,
    local_facets: Vec<Vec<BigInt>>,
}

impl Cone {
    /// Cone generated by `gens` (need not be primitive or extremal).
    pub fn new(gens: &[LatticeVector], ambient_rank: usize) -> Result<Cone> {
        let span = Sublattice::saturated_span(gens, ambient_rank);
        let k = span.rank();
        let local_rays: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| span.coordinates(g).map(|c| c.to_big()))
            .collect::<Result<_>>()?;
        let local_facets = if k == 0 {
            Vec::new()
        } else {
            facet_normals(&local_rays, k)?
        };
        let cone = Cone {
            ambient_rank,
            rays: gens.to_vec(),
            span,
            local_rays,
            local_facets,
        };
        if k > 0 {
            // Strict convexity: the dual must be full-dimensional, i.e. the
            // facet normals span the local space.
            let normals: Vec<LatticeVector> = cone
                .local_facets
                .iter()
                .map(|f| LatticeVector::from_big(f))
                .collect::<Result<_>>()?;
            if rank_of(&normals) < k {
                return Err(Error::InvalidInput("cone contains a line".into()));
            }
        }
        Ok(cone)
    }

    pub fn dim(&self) -> usize {
        self.span.rank()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn span(&self) -> &Sublattice {
        &self.span
    }

    fn local(&self, x: &LatticeVector) -> Option<Vec<BigInt>> {
        if self.span.rank() == self.ambient_rank {
            // Full-dimensional cones use the identity basis.
            return Some(x.to_big());
        }
        self.span.coordinates(x).ok().map(|c| c.to_big())
    }

    /// Facet inequalities in the coordinates of the span lattice.
    pub fn local_facets(&self) -> &[Vec<BigInt>] {
        &self.local_facets
    }

    /// Coordinates of `x` in the span lattice (None when `x` is outside the
    /// span or not a lattice point of it).
    pub fn local_coordinates(&self, x: &LatticeVector) -> Option<Vec<BigInt>> {
        self.local(x)
    }

    pub fn contains(&self, x: &LatticeVector) -> bool {
        match self.local(x) {
            Some(y) => self.local_facets.iter().all(|f| !dot_big(f, &y).is_negative()),
            None => false,
        }
    }

    /// True when `x` lies in the relative interior.
    pub fn relint_contains(&self, x: &LatticeVector) -> bool {
        match self.local(x) {
            Some(y) => {
                if self.dim() == 0 {
                    return true;
                }
                self.local_facets.iter().all(|f| dot_big(f, &y).is_positive())
            }
            None => false,
        }
    }

    /// Indices of generators lying on each facet.
    pub fn facet_generator_sets(&self) -> Vec<BTreeSet<usize>> {
        self.local_facets
            .iter()
            .map(|f| {
                (0..self.local_rays.len())
                    .filter(|&i| dot_big(f, &self.local_rays[i]).is_zero())
                    .collect()
            })
            .collect()
    }

    /// Indices of extremal generators (one per extreme ray, the first
    /// occurrence when generators repeat a direction).
    pub fn extremal_generators(&self) -> Vec<usize> {
        let k = self.dim();
        if k == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut seen: Vec<Vec<BigInt>> = Vec::new();
        for (i, r) in self.local_rays.iter().enumerate() {
            if r.iter().all(|x| x.is_zero()) {
                continue;
            }
            let tight: Vec<LatticeVector> = self
                .local_facets
                .iter()
                .filter(|f| dot_big(f, r).is_zero())
                .map(|f| LatticeVector::from_big(f).expect("small normal"))
                .collect();
            if rank_of(&tight) == k - 1 {
                let p = make_primitive_big(r.clone());
                if !seen.contains(&p) {
                    seen.push(p);
                    out.push(i);
                }
            }
        }
        out
    }

    /// All faces as sets of extremal generator indices, including the cone
    /// itself and the zero face (empty set), sorted by dimension then set.
    pub fn faces(&self) -> Vec<BTreeSet<usize>> {
        let ext: BTreeSet<usize> = self.extremal_generators().into_iter().collect();
        let facets: Vec<BTreeSet<usize>> = self
            .facet_generator_sets()
            .into_iter()
            .map(|s| s.intersection(&ext).copied().collect())
            .collect();
        face_closure(&ext, &facets)
    }
}

/// All intersections of facet sets, together with the full set.
pub fn face_closure(full: &BTreeSet<usize>, facets: &[BTreeSet<usize>]) -> Vec<BTreeSet<usize>> {
    let mut all: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    all.insert(full.clone());
    let mut frontier: Vec<BTreeSet<usize>> = vec![full.clone()];
    while let Some(f) = frontier.pop() {
        for g in facets {
            let h: BTreeSet<usize> = f.intersection(g).copied().collect();
            if h != f && all.insert(h.clone()) {
                frontier.push(h);
            }
        }
    }
    let mut v: Vec<BTreeSet<usize>> = all.into_iter().collect();
    v.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    v
}

/// Dimension of the linear span of the given vectors.
pub fn span_dim(vs: &[LatticeVector]) -> usize {
    rank_of(vs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn square_cone_facets() {
        // Cone over the unit square at height 1.
        let gens = vec![big(&[1, 0, 0]), big(&[1, 1, 0]), big(&[1, 0, 1]), big(&[1, 1, 1])];
        let f = facet_normals(&gens, 3).unwrap();
        assert_eq!(
            f,
            vec![big(&[0, 0, 1]), big(&[0, 1, 0]), big(&[1, -1, 0]), big(&[1, 0, -1])]
        );
    }

    #[test]
    fn redundant_generators() {
        let gens = vec![big(&[1, 0]), big(&[1, 1]), big(&[0, 1]), big(&[2, 1])];
        assert_eq!(facet_normals(&gens, 2).unwrap(), vec![big(&[0, 1]), big(&[1, 0])]);
    }

    #[test]
    fn cone_membership() {
        let c = Cone::new(&[[1, 0, 0].into(), [0, 1, 0].into()], 3).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&[2, 3, 0].into()));
        assert!(!c.contains(&[2, -3, 0].into()));
        assert!(!c.contains(&[1, 1, 1].into()));
        assert!(c.relint_contains(&[1, 1, 0].into()));
        assert!(!c.relint_contains(&[1, 0, 0].into()));
        assert_eq!(c.faces().len(), 4);
    }

    #[test]
    fn line_is_rejected() {
        assert!(Cone::new(&[[1, 0].into(), [-1, 0].into()], 2).is_err());
    }
}
