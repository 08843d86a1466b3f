//! Numeric monodromy of root families along loops, and local monodromy
//! matrices with their Kodaira types.

use crate::error::{Error, Result};
use crate::poly::SparsePoly;
use dashu_float::FBig;
use dashu_int::IBig;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// Gaussian rationals.
pub type GaussRat = Complex<BigRational>;

fn gr(re: i64, im: i64) -> GaussRat {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

/// Parse `a`, `bi`, `a+bi`, `a-bi` with rational `a`, `b` (`i` alone means
/// the unit).
pub fn parse_gauss(text: &str) -> Result<GaussRat> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a Gaussian rational: {text:?}"));
    let rat = |t: &str| -> Result<BigRational> {
        match t {
            "" | "+" => Ok(BigRational::one()),
            "-" => Ok(-BigRational::one()),
            _ => BigRational::from_str(t.trim_start_matches('+')).map_err(|_| bad()),
        }
    };
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex::new(rat(&s)?, BigRational::zero()));
    };
    // split at the last sign that is not the first character
    let cut = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
    match cut {
        Some(k) => Ok(Complex::new(rat(&body[..k])?, rat(&body[k..])?)),
        None => Ok(Complex::new(BigRational::zero(), rat(body)?)),
    }
}

fn render_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn render_gauss(z: &GaussRat) -> String {
    let (re, im) = (&z.re, &z.im);
    if im.is_zero() {
        return render_rat(re);
    }
    let unit = |q: &BigRational| -> String {
        if q.is_one() {
            "i".into()
        } else if *q == -BigRational::one() {
            "-i".into()
        } else {
            format!("{}i", render_rat(q))
        }
    };
    if re.is_zero() {
        unit(im)
    } else if im.is_negative() {
        format!("{}{}", render_rat(re), unit(im))
    } else {
        format!("{}+{}", render_rat(re), unit(im))
    }
}

/// A 2×2 matrix over the Gaussian rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyMatrix(pub [[GaussRat; 2]; 2]);

impl MonodromyMatrix {
    pub fn from_i64(m: [[i64; 2]; 2]) -> Self {
        MonodromyMatrix([[gr(m[0][0], 0), gr(m[0][1], 0)], [gr(m[1][0], 0), gr(m[1][1], 0)]])
    }

    pub fn identity() -> Self {
        MonodromyMatrix::from_i64([[1, 0], [0, 1]])
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        let m = &self.0;
        MonodromyMatrix([[c * &m[0][0], c * &m[0][1]], [c * &m[1][0], c * &m[1][1]]])
    }

    pub fn mul(&self, o: &MonodromyMatrix) -> Self {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        MonodromyMatrix([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn det(&self) -> GaussRat {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> GaussRat {
        &self.0[0][0] + &self.0[1][1]
    }

    /// Integer entries, when all entries are rational integers.
    pub fn as_integer(&self) -> Option<[[i64; 2]; 2]> {
        let f = |z: &GaussRat| -> Option<i64> {
            if z.im.is_zero() && z.re.is_integer() {
                z.re.to_integer().to_i64()
            } else {
                None
            }
        };
        let m = &self.0;
        Some([[f(&m[0][0])?, f(&m[0][1])?], [f(&m[1][0])?, f(&m[1][1])?]])
    }

    /// Rows separated by `;`, entries by `,`, e.g. `i,0;0,-i` or `1,1;0,1`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text.split(';').collect();
        let bad = || Error::Parse(format!("expected a 2x2 matrix \"a,b;c,d\", got {text:?}"));
        if rows.len() != 2 {
            return Err(bad());
        }
        let mut m = [[gr(0, 0), gr(0, 0)], [gr(0, 0), gr(0, 0)]];
        for (i, r) in rows.iter().enumerate() {
            let es: Vec<&str> = r.split(',').collect();
            if es.len() != 2 {
                return Err(bad());
            }
            for (j, e) in es.iter().enumerate() {
                m[i][j] = parse_gauss(e)?;
            }
        }
        Ok(MonodromyMatrix(m))
    }

    pub fn render(&self) -> String {
        let m = &self.0;
        format!(
            "[{} {}; {} {}]",
            render_gauss(&m[0][0]),
            render_gauss(&m[0][1]),
            render_gauss(&m[1][0]),
            render_gauss(&m[1][1])
        )
    }
}

/// Exact power by repeated squaring.
pub fn power_monodromy(m: &MonodromyMatrix, k: u32) -> MonodromyMatrix {
    let mut acc = MonodromyMatrix::identity();
    let mut base = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        base = base.mul(&base);
        e >>= 1;
    }
    acc
}

/// Kodaira fibre types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kodaira {
    I(u64),
    IStar(u64),
    II,
    III,
    IV,
    IIStar,
    IIIStar,
    IVStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IIStar => write!(f, "II*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IVStar => write!(f, "IV*"),
        }
    }
}

/// Kodaira type of an integral determinant-one local monodromy. Parabolic
/// classes use the content of M ∓ I; elliptic classes use the trace and the
/// sign of the lower-left entry.
pub fn classify_kodaira(m: &MonodromyMatrix) -> Result<Kodaira> {
    let a = m
        .as_integer()
        .ok_or_else(|| Error::NotKodaira(format!("{} has non-integral entries", m.render())))?;
    let det = a[0][0] as i128 * a[1][1] as i128 - a[0][1] as i128 * a[1][0] as i128;
    if det != 1 {
        return Err(Error::NotKodaira(format!("{} has determinant {det}", m.render())));
    }
    let tr = a[0][0] + a[1][1];
    let content = |s: i64| -> u64 {
        let v = [a[0][0] - s, a[0][1], a[1][0], a[1][1] - s];
        v.iter().fold(0i64, |g, x| g.gcd(x)) as u64
    };
    let c = a[1][0];
    Ok(match tr {
        2 => Kodaira::I(content(1)),
        -2 => Kodaira::IStar(content(-1)),
        1 if c < 0 => Kodaira::II,
        1 => Kodaira::IIStar,
        0 if c < 0 => Kodaira::III,
        0 => Kodaira::IIIStar,
        -1 if c < 0 => Kodaira::IV,
        -1 => Kodaira::IVStar,
        _ => {
            return Err(Error::NotKodaira(format!(
                "{} has trace {tr}; not a Kodaira local monodromy of finite type here",
                m.render()
            )))
        }
    })
}

/// Polynomials in one variable over the Gaussian rationals, lowest degree
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XPoly(pub Vec<GaussRat>);

impl XPoly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &GaussRat) -> GaussRat {
        self.0.iter().rev().fold(gr(0, 0), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> XPoly {
        XPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
        .trim()
    }

    fn monic(&self) -> XPoly {
        let p = self.clone().trim();
        match p.0.last() {
            Some(l) => {
                let l = l.clone();
                XPoly(p.0.iter().map(|c| c / &l).collect())
            }
            None => p,
        }
    }

    fn divrem(&self, d: &XPoly) -> (XPoly, XPoly) {
        let d = d.clone().trim();
        let dn = d.0.len() - 1;
        let lead = d.0[dn].clone();
        let mut r = self.clone().trim().0;
        if r.len() <= dn {
            return (XPoly(vec![]), XPoly(r));
        }
        let mut q = vec![gr(0, 0); r.len() - dn];
        for k in (0..q.len()).rev() {
            let c = &r[k + dn] / &lead;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] = &r[k + j] - &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dn);
        (XPoly(q).trim(), XPoly(r).trim())
    }

    fn gcd(&self, o: &XPoly) -> XPoly {
        let (mut a, mut b) = (self.monic(), o.monic());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// The product of the distinct irreducible factors.
    pub fn squarefree(&self) -> XPoly {
        let d = self.derivative();
        if d.is_zero() {
            return self.monic();
        }
        self.divrem(&self.gcd(&d)).0.monic()
    }

    /// Numeric roots (simple roots assumed), by Durand-Kerner iteration
    /// followed by Newton polishing.
    pub fn roots(&self) -> Vec<Complex64> {
        let p = self.monic();
        let n = match p.degree() {
            Some(n) if n > 0 => n,
            _ => return vec![],
        };
        let c: Vec<Complex64> = p.0.iter().map(to_c64).collect();
        let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, k| a * z + k);
        let deriv = |z: Complex64| {
            c.iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(Complex64::new(0.0, 0.0), |a, (i, k)| a * z + k * i as f64)
        };
        let bound = 1.0 + c[..n].iter().map(|k| k.norm()).fold(0.0, f64::max);
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
        for _ in 0..2000 {
            let mut delta = 0.0f64;
            for i in 0..n {
                let mut den = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        den *= z[i] - z[j];
                    }
                }
                let step = eval(z[i]) / den;
                z[i] -= step;
                delta = delta.max(step.norm() / (1.0 + z[i].norm()));
            }
            if delta < 1e-15 {
                break;
            }
        }
        for r in z.iter_mut() {
            for _ in 0..5 {
                let d = deriv(*r);
                if d.norm() == 0.0 {
                    break;
                }
                *r -= eval(*r) / d;
            }
        }
        z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        z
    }
}

fn to_c64(z: &GaussRat) -> Complex64 {
    Complex64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

/// A polynomial in y whose coefficients are polynomials in a base
/// coordinate x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootFamily {
    /// `coeffs[j]` is the coefficient of `y^j`.
    coeffs: Vec<XPoly>,
}

impl RootFamily {
    pub fn new(coeffs: Vec<XPoly>) -> Result<RootFamily> {
        let mut coeffs: Vec<XPoly> = coeffs.into_iter().map(XPoly::trim).collect();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput("the family has degree 0 in y".into()));
        }
        Ok(RootFamily { coeffs })
    }

    /// From a polynomial in the two variables `y` and `x` with rational
    /// coefficients.
    pub fn from_poly(p: &SparsePoly, y: &str, x: &str) -> Result<RootFamily> {
        let iy = p.vars().iter().position(|v| v == y).ok_or_else(|| Error::UnknownVariable(y.into()))?;
        let ix = p.vars().iter().position(|v| v == x).ok_or_else(|| Error::UnknownVariable(x.into()))?;
        let mut coeffs: Vec<XPoly> = Vec::new();
        for (e, c) in p.terms() {
            if e.iter().enumerate().any(|(k, &d)| d > 0 && k != iy && k != ix) {
                return Err(Error::InvalidInput("the family involves variables other than y and x".into()));
            }
            let q = c
                .as_rational()
                .ok_or_else(|| Error::InvalidInput(format!("coefficient {} is not a rational number", c.render())))?;
            let (j, i) = (e[iy] as usize, e[ix] as usize);
            if coeffs.len() <= j {
                coeffs.resize(j + 1, XPoly(vec![]));
            }
            let row = &mut coeffs[j].0;
            if row.len() <= i {
                row.resize(i + 1, gr(0, 0));
            }
            row[i] = &row[i] + Complex::new(q, BigRational::zero());
        }
        RootFamily::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[XPoly] {
        &self.coeffs
    }

    fn x_degree(&self) -> usize {
        self.coeffs.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
    }

    /// The univariate polynomial in y at a given x.
    pub fn at(&self, x: &GaussRat) -> Vec<GaussRat> {
        self.coeffs.iter().map(|c| c.eval(x)).collect()
    }

    /// Discriminant in y of the formal degree-n polynomial, as a polynomial
    /// in x (Sylvester resultant of f and ∂f/∂y up to a constant factor),
    /// by evaluation and interpolation.
    pub fn discriminant(&self) -> XPoly {
        let n = self.degree();
        let bound = (2 * n - 1) * self.x_degree();
        let xs: Vec<GaussRat> = (0..=bound as i64).map(|k| gr(k, 0)).collect();
        let ys: Vec<GaussRat> = xs.iter().map(|x| sylvester_det(&self.at(x))).collect();
        interpolate(&xs, &ys)
    }
}

fn sylvester_det(f: &[GaussRat]) -> GaussRat {
    let n = f.len() - 1;
    let df: Vec<GaussRat> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    let size = 2 * n - 1;
    let mut m = vec![vec![gr(0, 0); size]; size];
    for r in 0..n - 1 {
        for (k, c) in f.iter().rev().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..n {
        for (k, c) in df.iter().rev().enumerate() {
            m[n - 1 + r][r + k] = c.clone();
        }
    }
    det_gauss(m)
}

fn det_gauss(mut m: Vec<Vec<GaussRat>>) -> GaussRat {
    let n = m.len();
    let mut det = gr(1, 0);
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return gr(0, 0);
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det = det * &piv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &piv;
            for c in col..n {
                let v = &f * &m[col][c];
                m[r][c] = &m[r][c] - v;
            }
        }
    }
    det
}

fn interpolate(xs: &[GaussRat], ys: &[GaussRat]) -> XPoly {
    // Newton divided differences
    let n = xs.len();
    let mut d = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            d[i] = (&d[i] - &d[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = XPoly(vec![d[n - 1].clone()]);
    for i in (0..n - 1).rev() {
        let mut next = vec![gr(0, 0); p.0.len() + 1];
        for (k, c) in p.0.iter().enumerate() {
            next[k + 1] = &next[k + 1] + c;
            next[k] = &next[k] - c * &xs[i];
        }
        next[0] = &next[0] + &d[i];
        p = XPoly(next);
    }
    p.trim()
}

/// A singular parameter value with the distance to its nearest neighbour.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularValue {
    pub value: Complex64,
    /// Half the distance to the nearest other singular value.
    pub isolation: f64,
    /// Whether the leading coefficient vanishes here.
    pub leading: bool,
}

/// Finite parameter values where the discriminant or the leading
/// coefficient vanishes.
pub fn singular_parameters(f: &RootFamily) -> Result<Vec<SingularValue>> {
    let disc = f.discriminant();
    if disc.is_zero() {
        return Err(Error::NonReducedFamily);
    }
    let lead = f.coeffs.last().expect("degree at least one");
    let mut vals: Vec<(Complex64, bool)> = disc.squarefree().roots().into_iter().map(|z| (z, false)).collect();
    for z in lead.squarefree().roots() {
        match vals.iter_mut().find(|(w, _)| (*w - z).norm() < 1e-9 * (1.0 + z.norm())) {
            Some(v) => v.1 = true,
            None => vals.push((z, true)),
        }
    }
    vals.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let out = vals
        .iter()
        .enumerate()
        .map(|(i, &(z, leading))| {
            let near = vals
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, w)| (w.0 - z).norm())
                .fold(f64::INFINITY, f64::min);
            SingularValue { value: z, isolation: near / 2.0, leading }
        })
        .collect();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Anticlockwise,
    Clockwise,
}

/// A loop based at an exact point: the segment to the circle around
/// `center`, once around the circle, and back.
#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    pub base: GaussRat,
    pub center: Complex64,
    pub radius: f64,
    pub orientation: Orientation,
    /// A loop around the point at infinity: the base lies inside the
    /// circle, which encloses every finite singular value.
    pub at_infinity: bool,
}

/// Clearance factor between a loop and the singular values it avoids.
pub const LOOP_MARGIN: f64 = 0.1;
const CIRCLE_SIDES: usize = 64;

impl Loop {
    pub fn new(base: GaussRat, center: Complex64, radius: f64) -> Loop {
        Loop { base, center, radius, orientation: Orientation::Anticlockwise, at_infinity: false }
    }

    /// The loop around infinity, anticlockwise on the Riemann sphere: out
    /// from the base away from `center`, clockwise around the circle of the
    /// given radius, and back.
    pub fn around_infinity(base: GaussRat, center: Complex64, radius: f64) -> Loop {
        Loop { base, center, radius, orientation: Orientation::Clockwise, at_infinity: true }
    }

    pub fn with_orientation(mut self, o: Orientation) -> Loop {
        self.orientation = o;
        self
    }

    fn start(&self) -> Complex64 {
        let b = to_c64(&self.base);
        let d = b - self.center;
        self.center + d / d.norm() * self.radius
    }

    /// Vertices of the circle polygon, from the start point around and back.
    fn circle(&self) -> Vec<Complex64> {
        let s = self.start() - self.center;
        let sign = match self.orientation {
            Orientation::Anticlockwise => 1.0,
            Orientation::Clockwise => -1.0,
        };
        (0..=CIRCLE_SIDES)
            .map(|k| {
                if k == CIRCLE_SIDES {
                    return self.start();
                }
                let t = sign * 2.0 * std::f64::consts::PI * k as f64 / CIRCLE_SIDES as f64;
                self.center + s * Complex64::new(t.cos(), t.sin())
            })
            .collect()
    }

    /// Check the loop against singular values: each must either lie well
    /// inside the circle or keep a clearance of radius·(1 + margin) from
    /// the whole path. Returns the number of values inside.
    pub fn validate(&self, singular: &[SingularValue]) -> Result<usize> {
        let b = to_c64(&self.base);
        if self.at_infinity {
            let inner = self.radius / (1.0 + LOOP_MARGIN);
            if (b - self.center).norm() >= inner {
                return Err(Error::InvalidInput("the base point must lie inside the circle around infinity".into()));
            }
            for s in singular {
                if (s.value - self.center).norm() >= inner {
                    return Err(Error::InvalidInput("the circle around infinity does not enclose every singular value".into()));
                }
                if seg_dist(s.value, b, self.start()) <= 1e-9 * self.radius {
                    return Err(Error::InvalidInput("a singular value lies on the connecting segment".into()));
                }
            }
            return Ok(singular.len());
        }
        if (b - self.center).norm() <= self.radius * (1.0 + LOOP_MARGIN) {
            return Err(Error::InvalidInput("the base point lies on or inside the loop circle".into()));
        }
        let mut inside = 0;
        for s in singular {
            let r = (s.value - self.center).norm();
            if r < self.radius / (1.0 + LOOP_MARGIN) {
                if seg_dist(s.value, b, self.start()) <= self.radius * LOOP_MARGIN {
                    return Err(Error::InvalidInput("a singular value lies on the connecting segment".into()));
                }
                inside += 1;
                continue;
            }
            let clear = self.radius * (1.0 + LOOP_MARGIN);
            if r < self.radius * (1.0 + LOOP_MARGIN) || seg_dist(s.value, b, self.start()) <= clear {
                return Err(Error::InvalidInput(format!(
                    "singular value {}{:+}i is too close to the loop",
                    s.value.re, s.value.im
                )));
            }
        }
        Ok(inside)
    }
}

/// A star of loops from a common base: one anticlockwise loop around each
/// point (points closer than 1e-9 are merged), ordered by the direction of
/// their connecting segments, anticlockwise starting from `tail_angle`.
/// Radii are 0.3 times the smallest distance from the centre to another
/// point, to the base, or from another point to the connecting segment.
pub fn star_loops(base: &GaussRat, points: &[Complex64], tail_angle: f64) -> Vec<Loop> {
    let b = to_c64(base);
    let mut centers: Vec<Complex64> = Vec::new();
    for &z in points {
        if centers.iter().all(|c| (c - z).norm() >= 1e-9 * (1.0 + z.norm())) {
            centers.push(z);
        }
    }
    let turn = |z: Complex64| ((z - b).arg() - tail_angle).rem_euclid(2.0 * std::f64::consts::PI);
    centers.sort_by(|x, y| turn(*x).total_cmp(&turn(*y)));
    centers
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut d = (b - c).norm();
            for (j, &o) in centers.iter().enumerate() {
                if i != j {
                    d = d.min((o - c).norm()).min(seg_dist(o, b, c));
                }
            }
            Loop::new(base.clone(), c, 0.3 * d)
        })
        .collect()
}

fn seg_dist(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    let t = if l2 == 0.0 { 0.0 } else { ((p - a) * d.conj()).re / l2 };
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

/// Multi-precision complex numbers.
#[derive(Clone, Debug)]
struct C {
    re: FBig,
    im: FBig,
}

fn fb_int(x: &BigInt, prec: usize) -> FBig {
    let i = IBig::from_str_radix(&x.to_str_radix(16), 16).expect("hex digits");
    FBig::from(i).with_precision(prec).value()
}

fn fb_rat(q: &BigRational, prec: usize) -> FBig {
    fb_int(q.numer(), prec) / fb_int(q.denom(), prec)
}

fn fb_f64(x: f64, prec: usize) -> FBig {
    FBig::try_from(x).expect("finite").with_precision(prec).value()
}

impl C {
    fn from_gauss(z: &GaussRat, prec: usize) -> C {
        C { re: fb_rat(&z.re, prec), im: fb_rat(&z.im, prec) }
    }
    fn from_c64(z: Complex64, prec: usize) -> C {
        C { re: fb_f64(z.re, prec), im: fb_f64(z.im, prec) }
    }
    fn zero(prec: usize) -> C {
        C { re: fb_f64(0.0, prec), im: fb_f64(0.0, prec) }
    }
    fn add(&self, o: &C) -> C {
        C { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &C) -> C {
        C { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &C) -> C {
        C {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn scale(&self, k: &FBig) -> C {
        C { re: &self.re * k, im: &self.im * k }
    }
    fn norm_sqr(&self) -> FBig {
        &self.re * &self.re + &self.im * &self.im
    }
    fn div(&self, o: &C) -> C {
        let n = o.norm_sqr();
        C {
            re: (&self.re * &o.re + &self.im * &o.im) / &n,
            im: (&self.im * &o.re - &self.re * &o.im) / &n,
        }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().value(), self.im.to_f64().value())
    }
}

/// Coefficients in y at a point x, highest degree first.
fn coeffs_at(family: &[Vec<C>], x: &C, prec: usize) -> Vec<C> {
    family
        .iter()
        .rev()
        .map(|c| c.iter().rev().fold(C::zero(prec), |a, k| a.mul(x).add(k)))
        .collect()
}

fn horner(a: &[C], y: &C, prec: usize) -> (C, C) {
    let mut p = C::zero(prec);
    let mut d = C::zero(prec);
    for k in a {
        d = d.mul(y).add(&p);
        p = p.mul(y).add(k);
    }
    (p, d)
}

/// Settings for root continuation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOptions {
    /// Binary precision in bits.
    pub precision: usize,
    /// Largest step, as a fraction of each straight piece of the path.
    pub max_step: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions { precision: 128, max_step: 0.5 }
    }
}

/// Outcome of tracking the roots around a loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Tracked {
    /// `perm[i] = j`: the i-th root at the base continues to the j-th.
    pub perm: Vec<usize>,
    pub steps: usize,
    /// Largest |f(root)| at the path vertices.
    pub residual: f64,
    /// Roots at the base point in canonical order.
    pub base_roots: Vec<Complex64>,
}

/// Continue the roots of `f` around `lp`. Each step is accepted only when
/// every root moves less than 0.4 times the smallest distance between roots
/// at the previous step; otherwise the step is halved.
pub fn track_roots(f: &RootFamily, lp: &Loop, opts: TrackOptions) -> Result<Tracked> {
    let sing = singular_parameters(f)?;
    lp.validate(&sing)?;
    let prec = opts.precision.max(53);
    let fam: Vec<Vec<C>> = f
        .coeffs
        .iter()
        .map(|c| c.0.iter().map(|z| C::from_gauss(z, prec)).collect())
        .collect();
    let base = C::from_gauss(&lp.base, prec);
    let mut roots = base_roots(&coeffs_at(&fam, &base, prec), prec)?;
    let start_roots = roots.clone();
    let mut path: Vec<C> = vec![base.clone()];
    for z in lp.circle() {
        path.push(C::from_c64(z, prec));
    }
    path.push(base);
    let mut steps = 0;
    let mut residual: f64 = 0.0;
    let hmax = opts.max_step.clamp(1e-6, 1.0);
    for w in path.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let mut t = 0.0f64;
        let mut h = hmax;
        while t < 1.0 {
            let t1 = (t + h).min(1.0);
            let x = a.add(&b.sub(a).scale(&fb_f64(t1, prec)));
            let co = coeffs_at(&fam, &x, prec);
            match corrector(&co, &roots, prec) {
                Some(next) => {
                    roots = next;
                    t = t1;
                    steps += 1;
                    h = (h * 2.0).min(hmax);
                }
                None => {
                                        h /= 2.0;
                    if t + h <= t {
                        return Err(Error::ContinuationFailure {
                            t: t.to_string(),
                            reason: "roots collide along the path".into(),
                        });
                    }
                }
            }
        }
        let co = coeffs_at(&fam, b, prec);
        for r in &roots {
            residual = residual.max(horner(&co, r, prec).0.to_c64().norm());
        }
    }
    let mut perm = Vec::with_capacity(roots.len());
    for r in &roots {
        let (j, _) = start_roots
            .iter()
            .enumerate()
            .map(|(j, s)| (j, s.sub(r).to_c64().norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        perm.push(j);
    }
    let mut check = perm.clone();
    check.sort();
    check.dedup();
    if check.len() != perm.len() {
        return Err(Error::ContinuationFailure { t: "1".into(), reason: "final roots do not match the base roots".into() });
    }
    Ok(Tracked {
        perm,
        steps,
        residual,
        base_roots: start_roots.iter().map(C::to_c64).collect(),
    })
}

fn min_dist_sqr(r: &[C]) -> FBig {
    let mut best: Option<FBig> = None;
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            let d = r[i].sub(&r[j]).norm_sqr();
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        }
    }
    best.expect("at least two roots")
}

fn newton(co: &[C], y0: &C, scale2: &FBig, prec: usize) -> Option<C> {
    let tol = fb_f64(2f64.powi(-(prec as i32 - 16).min(1000) * 2), prec);
    let mut y = y0.clone();
    for _ in 0..60 {
        let (p, d) = horner(co, &y, prec);
        if d.norm_sqr() == fb_f64(0.0, prec) {
            return None;
        }
        let step = p.div(&d);
        y = y.sub(&step);
        if step.norm_sqr() <= &tol * scale2 {
            return Some(y);
        }
    }
    None
}

fn corrector(co: &[C], prev: &[C], prec: usize) -> Option<Vec<C>> {
    let d2 = min_dist_sqr(prev);
    let limit = &d2 * fb_f64(0.16, prec);
    let mut out = Vec::with_capacity(prev.len());
    for r in prev {
        let y = newton(co, r, &d2, prec)?;
        if y.sub(r).norm_sqr() >= limit {
            return None;
        }
        out.push(y);
    }
    Some(out)
}

/// Roots of a univariate polynomial (highest degree first), sorted by real
/// then imaginary part.
fn base_roots(co: &[C], prec: usize) -> Result<Vec<C>> {
    let n = co.len() - 1;
    let lead = co[0].to_c64();
    if lead.norm() == 0.0 {
        return Err(Error::InvalidInput("leading coefficient vanishes at the base point".into()));
    }
    let c: Vec<Complex64> = co.iter().map(|k| k.to_c64() / lead).collect();
    let eval = |z: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |a, k| a * z + k);
    let bound = 1.0 + c[1..].iter().map(|k| k.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / (1.0 + z[i].norm()));
        }
        if delta < 1e-16 {
            break;
        }
    }
    let mut roots: Vec<C> = z.iter().map(|&w| C::from_c64(w, prec)).collect();
    let d2 = min_dist_sqr(&roots);
    for r in roots.iter_mut() {
        *r = newton(co, r, &d2, prec)
            .ok_or_else(|| Error::InvalidInput("the fibre over the base point is singular".into()))?;
    }
    if min_dist_sqr(&roots) == fb_f64(0.0, prec) {
        return Err(Error::InvalidInput("the fibre over the base point is singular".into()));
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(roots)
}

/// Permutations on 0..n.
pub mod perm {
    use std::collections::{BTreeSet, VecDeque};

    /// Apply `p` then `q`.
    pub fn then(p: &[usize], q: &[usize]) -> Vec<usize> {
        p.iter().map(|&i| q[i]).collect()
    }

    pub fn identity(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    /// Cycle lengths greater than one, sorted.
    pub fn cycle_type(p: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; p.len()];
        let mut out = Vec::new();
        for i in 0..p.len() {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = p[j];
                len += 1;
            }
            if len > 1 {
                out.push(len);
            }
        }
        out.sort();
        out
    }

    /// Cycle notation with 1-based letters, `id` for the identity.
    pub fn cycles(p: &[usize]) -> String {
        let mut seen = vec![false; p.len()];
        let mut out = String::new();
        for i in 0..p.len() {
            if seen[i] || p[i] == i {
                continue;
            }
            out.push('(');
            let mut j = i;
            let mut first = true;
            while !seen[j] {
                seen[j] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&(j + 1).to_string());
                first = false;
                j = p[j];
            }
            out.push(')');
        }
        if out.is_empty() {
            "id".into()
        } else {
            out
        }
    }

    /// Disjoint union: `p` on the first letters, `q` shifted after them.
    pub fn join(p: &[usize], q: &[usize]) -> Vec<usize> {
        p.iter().copied().chain(q.iter().map(|&i| i + p.len())).collect()
    }

    /// Order of the group generated by the given permutations.
    pub fn group_order(gens: &[Vec<usize>]) -> usize {
        let Some(n) = gens.first().map(|g| g.len()) else { return 1 };
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = VecDeque::from([identity(n)]);
        seen.insert(identity(n));
        while let Some(g) = queue.pop_front() {
            for s in gens {
                let h = then(&g, s);
                if seen.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        seen.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render_gauss() {
        for s in ["0", "3/4", "i", "-i", "2-3i", "-1/2+5/7i", "-5i"] {
            assert_eq!(render_gauss(&parse_gauss(s).unwrap()), s);
        }
    }

    #[test]
    fn kodaira_basic() {
        let s = MonodromyMatrix::from_i64([[0, 1], [-1, 0]]);
        assert_eq!(classify_kodaira(&s).unwrap(), Kodaira::III);
        assert_eq!(classify_kodaira(&power_monodromy(&s, 2)).unwrap(), Kodaira::IStar(0));
        let t = MonodromyMatrix::from_i64([[1, 3], [0, 1]]);
        assert_eq!(classify_kodaira(&t).unwrap(), Kodaira::I(3));
        assert!(classify_kodaira(&MonodromyMatrix::from_i64([[2, 1], [1, 1]])).is_err());
    }

    #[test]
    fn square_root_branch() {
        let f = RootFamily::new(vec![XPoly(vec![gr(0, 0), gr(-1, 0)]), XPoly(vec![]), XPoly(vec![gr(1, 0)])]).unwrap();
        let s = singular_parameters(&f).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].value.norm() < 1e-12);
        let base = gr(-1, 1);
        let around0 = track_roots(&f, &Loop::new(base.clone(), Complex64::new(0.0, 0.0), 0.3), TrackOptions::default())
            .unwrap();
        assert_eq!(around0.perm, vec![1, 0]);
        let around1 = track_roots(&f, &Loop::new(base, Complex64::new(1.0, 0.0), 0.3), TrackOptions::default());
        assert_eq!(around1.unwrap().perm, vec![0, 1]);
    }
}
