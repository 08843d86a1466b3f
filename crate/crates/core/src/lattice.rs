//! Exact integer and rational linear algebra: Hermite normal form, saturated
//! left kernels, sublattices and primitive vectors.
//!
//! Matrix entries are arbitrary precision. Lattice vectors carry `i64`
//! coordinates; every operation on them is overflow checked and reports
//! [`Error::Overflow`] instead of wrapping.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point of `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn new(entries: Vec<i64>) -> Self {
        LatticeVector(entries)
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Pairing `⟨self, other⟩`.
    pub fn dot(&self, other: &LatticeVector) -> i64 {
        self.try_dot(other).expect("pairing overflow")
    }

    pub fn try_dot(&self, other: &LatticeVector) -> Result<i64> {
        debug_assert_eq!(self.rank(), other.rank());
        let mut acc: i128 = 0;
        for (a, b) in self.0.iter().zip(&other.0) {
            acc = acc
                .checked_add(*a as i128 * *b as i128)
                .ok_or(Error::Overflow)?;
        }
        i64::try_from(acc).map_err(|_| Error::Overflow)
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        LatticeVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("coordinate overflow"))
                .collect(),
        )
    }

    pub fn sub(&self, other: &LatticeVector) -> LatticeVector {
        LatticeVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_sub(*b).expect("coordinate overflow"))
                .collect(),
        )
    }

    pub fn scale(&self, k: i64) -> LatticeVector {
        LatticeVector(
            self.0
                .iter()
                .map(|a| a.checked_mul(k).expect("coordinate overflow"))
                .collect(),
        )
    }

    pub fn neg(&self) -> LatticeVector {
        self.scale(-1)
    }

    /// Gcd of the entries (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn from_big(v: &[BigInt]) -> Result<LatticeVector> {
        v.iter()
            .map(|x| x.to_i64().ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(LatticeVector)
    }

    /// Image under a matrix acting on row vectors: `self · m`.
    pub fn apply(&self, m: &IntMatrix) -> Result<LatticeVector> {
        if m.nrows() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "vector of rank {} cannot be multiplied by a {}x{} matrix",
                self.rank(),
                m.nrows(),
                m.ncols()
            )));
        }
        let mut out = vec![BigInt::zero(); m.ncols()];
        for (x, row) in self.0.iter().zip(&m.rows) {
            if *x == 0 {
                continue;
            }
            let x = BigInt::from(*x);
            for (o, e) in out.iter_mut().zip(row) {
                *o += &x * e;
            }
        }
        LatticeVector::from_big(&out)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

impl<const N: usize> From<[i64; N]> for LatticeVector {
    fn from(v: [i64; N]) -> Self {
        LatticeVector(v.to_vec())
    }
}

/// `v` divided by the gcd of its entries.
pub fn primitive(v: &LatticeVector) -> Result<LatticeVector> {
    let g = v.content();
    if g == 0 {
        return Err(Error::InvalidInput("no primitive generator".into()));
    }
    Ok(LatticeVector(v.0.iter().map(|x| x / g).collect()))
}

/// Rectangular matrix with arbitrary precision entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
    ncols: usize,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>, ncols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        Ok(IntMatrix { rows, ncols })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        IntMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            ncols,
        )
    }

    pub fn from_vectors(rows: &[LatticeVector], ncols: usize) -> Self {
        IntMatrix {
            rows: rows.iter().map(|r| r.to_big()).collect(),
            ncols,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMatrix {
            rows: vec![vec![BigInt::zero(); ncols]; nrows],
            ncols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = BigInt::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn row_vectors(&self) -> Result<Vec<LatticeVector>> {
        self.rows.iter().map(|r| LatticeVector::from_big(r)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.ncols, self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                t.rows[j][i] = x.clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.ncols != other.nrows() {
            return Err(Error::InvalidInput("matrix shapes do not match".into()));
        }
        let mut out = IntMatrix::zeros(self.nrows(), other.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            for (k, a) in r.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.rows[k].iter().enumerate() {
                    out.rows[i][j] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Determinant of a square matrix (Bareiss elimination).
    pub fn det(&self) -> Result<BigInt> {
        if self.nrows() != self.ncols {
            return Err(Error::InvalidInput("determinant of a non-square matrix".into()));
        }
        let n = self.ncols;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    pub fn rank(&self) -> usize {
        rational_rank(&self.rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    serde_json::Value::Array(
                        r.iter()
                            .map(|x| match x.to_i64() {
                                Some(v) => serde_json::Value::from(v),
                                None => serde_json::Value::String(x.to_string()),
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Row-style Hermite normal form. Returns `(H, U)` with `U` unimodular and
/// `U · m = H`; pivots are positive and entries above a pivot lie in
/// `[0, pivot)`.
pub fn hermite_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let nr = m.nrows();
    let nc = m.ncols();
    let mut h = m.rows.clone();
    let mut u = IntMatrix::identity(nr).rows;
    let mut r = 0;
    for c in 0..nc {
        if r == nr {
            break;
        }
        // Euclid on column c among rows r.. until only row r is nonzero.
        loop {
            let pivot = (r..nr)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(p) = pivot else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..nr {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut() {
                *x = -&*x;
            }
            for x in u[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            if !q.is_zero() {
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    (
        IntMatrix { rows: h, ncols: nc },
        IntMatrix { rows: u, ncols: nr },
    )
}

/// `rows[i] -= q * rows[j]`.
fn row_axpy(rows: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    let src = rows[j].clone();
    for (x, s) in rows[i].iter_mut().zip(&src) {
        *x -= q * s;
    }
}

/// Basis of the saturated left kernel `{c : c · points = 0}` in Hermite
/// (echelon) form.
pub fn kernel_basis(points: &IntMatrix) -> IntMatrix {
    let (h, u) = hermite_form(points);
    let rows: Vec<Vec<BigInt>> = (0..points.nrows())
        .filter(|&i| h.rows[i].iter().all(|x| x.is_zero()))
        .map(|i| u.rows[i].clone())
        .collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, points.nrows());
    }
    let k = IntMatrix {
        rows,
        ncols: points.nrows(),
    };
    let (hk, _) = hermite_form(&k);
    let rows: Vec<Vec<BigInt>> = hk
        .rows
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    IntMatrix {
        rows,
        ncols: points.nrows(),
    }
}

/// A saturated sublattice of `Z^n`, stored by a Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sublattice {
    basis: IntMatrix,
    ambient_rank: usize,
}

impl Sublattice {
    /// Saturation of the real span of `vectors`.
    pub fn saturated_span(vectors: &[LatticeVector], ambient_rank: usize) -> Sublattice {
        let a = IntMatrix::from_vectors(vectors, ambient_rank);
        let basis = if vectors.is_empty() {
            IntMatrix::zeros(0, ambient_rank)
        } else {
            // Orthogonal complement, then its complement again.
            let perp = kernel_basis(&a.transpose());
            if perp.nrows() == 0 {
                IntMatrix::identity(ambient_rank)
            } else {
                kernel_basis(&perp.transpose())
            }
        };
        Sublattice {
            basis,
            ambient_rank,
        }
    }

    /// Sublattice with the given basis, which must already be saturated.
    pub fn from_basis(basis: IntMatrix) -> Result<Sublattice> {
        let ambient_rank = basis.ncols();
        let vectors = basis.row_vectors()?;
        let s = Sublattice::saturated_span(&vectors, ambient_rank);
        if s.rank() != basis.nrows() {
            return Err(Error::InvalidInput("basis rows are linearly dependent".into()));
        }
        for v in &vectors {
            s.coordinates(v)?;
        }
        // Index check: the given basis generates s iff s's basis vectors
        // have integral coordinates in the given one.
        let given = Sublattice {
            basis: basis.clone(),
            ambient_rank,
        };
        for v in s.basis.row_vectors()? {
            given
                .coordinates(&v)
                .map_err(|_| Error::InvalidInput("basis is not saturated".into()))?;
        }
        Ok(given)
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn basis_vectors(&self) -> Vec<LatticeVector> {
        self.basis.row_vectors().expect("basis fits in i64")
    }

    /// Coordinates `y` with `y · basis = v`; error if `v` is not in the
    /// sublattice.
    pub fn coordinates(&self, v: &LatticeVector) -> Result<LatticeVector> {
        let rows: Vec<Vec<BigRational>> = self
            .basis
            .rows
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let target: Vec<BigRational> = v
            .0
            .iter()
            .map(|&x| BigRational::from_integer(BigInt::from(x)))
            .collect();
        let y = solve_left(&rows, &target)
            .ok_or_else(|| Error::InvalidInput(format!("{v} is not in the sublattice")))?;
        let ints: Option<Vec<BigInt>> = y
            .iter()
            .map(|q| q.is_integer().then(|| q.to_integer()))
            .collect();
        let ints =
            ints.ok_or_else(|| Error::InvalidInput(format!("{v} is not in the sublattice")))?;
        LatticeVector::from_big(&ints)
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        self.coordinates(v).is_ok()
    }

    /// Ambient vector with coordinates `y`.
    pub fn embed(&self, y: &LatticeVector) -> LatticeVector {
        y.apply(&self.basis).expect("embedding overflow")
    }
}

/// Rank over the rationals.
pub fn rational_rank(rows: &[Vec<BigInt>]) -> usize {
    let q: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    row_echelon(q).1.len()
}

pub fn rank_of(vectors: &[LatticeVector]) -> usize {
    let rows: Vec<Vec<BigInt>> = vectors.iter().map(|v| v.to_big()).collect();
    rational_rank(&rows)
}

/// Reduced row echelon form over the rationals; returns the matrix and the
/// pivot columns.
pub fn row_echelon(mut a: Vec<Vec<BigRational>>) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let nr = a.len();
    let nc = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nc {
        if r == nr {
            break;
        }
        let Some(p) = (r..nr).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nr {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let src = a[r].clone();
                for (x, s) in a[i].iter_mut().zip(&src) {
                    *x -= &f * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Solve `y · rows = target` over the rationals.
pub fn solve_left(rows: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = rows.len();
    let n = target.len();
    // Columns of the system are the ambient coordinates: rows^T y = target.
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            let mut r: Vec<BigRational> = rows.iter().map(|row| row[j].clone()).collect();
            r.push(target[j].clone());
            r
        })
        .collect();
    if aug.is_empty() {
        return Some(vec![BigRational::zero(); k]);
    }
    let (e, pivots) = row_echelon(std::mem::take(&mut aug));
    if pivots.contains(&k) {
        return None;
    }
    let mut y = vec![BigRational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        y[c] = e[i][k].clone();
    }
    Some(y)
}

/// Rational right kernel `{x : a x = 0}` as a list of integer vectors
/// (a basis, each made primitive).
pub fn right_kernel(a: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let q: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let (e, pivots) = row_echelon(q);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![BigRational::zero(); ncols];
        x[free] = BigRational::one();
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = -e[i][free].clone();
        }
        out.push(clear_denominators(&x));
    }
    out
}

/// Smallest positive integer multiple of a rational vector, made primitive.
pub fn clear_denominators(x: &[BigRational]) -> Vec<BigInt> {
    let l = x
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let v: Vec<BigInt> = x.iter().map(|q| (q * &l).to_integer()).collect();
    make_primitive_big(v)
}

pub fn make_primitive_big(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn hermite_small() {
        let a = m(&[vec![2, 4], vec![1, 3]]);
        let (h, u) = hermite_form(&a);
        assert_eq!(h, m(&[vec![1, 1], vec![0, 2]]));
        assert_eq!(u.mul(&a).unwrap(), h);
        assert_eq!(u.det().unwrap().abs(), BigInt::one());
    }

    #[test]
    fn hermite_identity_and_zero() {
        let i3 = IntMatrix::identity(3);
        let (h, u) = hermite_form(&i3);
        assert_eq!(h, i3);
        assert_eq!(u, i3);
        let z = m(&[vec![0, 0]]);
        assert_eq!(hermite_form(&z).0, z);
    }

    #[test]
    fn kernel_of_antipodal_pair() {
        let k = kernel_basis(&m(&[vec![3, -1, 2], vec![-3, 1, -2]]));
        assert_eq!(k, m(&[vec![1, 1]]));
    }

    #[test]
    fn kernel_relations_of_points() {
        let k = kernel_basis(&m(&[
            vec![-1, -1, 0, 0, 0],
            vec![0, 0, -1, 2, -1],
            vec![0, 0, -1, -1, 1],
            vec![-1, -1, 1, 0, 0],
            vec![1, 0, 10, -1, -1],
            vec![-1, -1, 2, 0, 0],
        ]));
        assert_eq!(k, m(&[vec![1, 0, 0, -2, 0, 1]]));
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[12, 0, -12].into()).unwrap(), [1, 0, -1].into());
        assert_eq!(primitive(&[1, 1, 4, 6].into()).unwrap(), [1, 1, 4, 6].into());
        assert_eq!(
            primitive(&[0, 0, -2, 4, -2].into()).unwrap(),
            [0, 0, -1, 2, -1].into()
        );
        assert!(primitive(&[0, 0].into()).is_err());
    }

    #[test]
    fn saturation() {
        let s = Sublattice::saturated_span(&[[2, 2, 0].into()], 3);
        assert_eq!(s.basis_vectors(), vec![LatticeVector::from([1, 1, 0])]);
        assert_eq!(s.coordinates(&[-3, -3, 0].into()).unwrap(), [-3].into());
        assert!(!s.contains(&[1, 0, 0].into()));
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[vec![2, 1], vec![7, 4]]).det().unwrap(), BigInt::from(1));
        assert_eq!(
            m(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]).det().unwrap(),
            BigInt::from(-2)
        );
    }
}
