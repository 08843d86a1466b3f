//! Sparse multivariate polynomials over a field of parameter fractions.
//!
//! Coefficients are [`ParamScalar`]s: quotients of rational polynomials in
//! named parameters, optionally involving formal square roots that are
//! rewritten eagerly (`sqrt(r)^2 -> r`).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// Radicand of a formal square root.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Radicand {
    /// Squarefree integer greater than one.
    Int(u64),
    Param(String),
}

/// A parameter symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Name(String),
    Sqrt(Radicand),
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Name(s) => write!(f, "{s}"),
            Sym::Sqrt(Radicand::Int(n)) => write!(f, "sqrt({n})"),
            Sym::Sqrt(Radicand::Param(p)) => write!(f, "sqrt({p})"),
        }
    }
}

type PMono = BTreeMap<Sym, u32>;

fn mono_degree(m: &PMono) -> u64 {
    m.values().map(|&e| e as u64).sum()
}

/// Graded lexicographic comparison; `Greater` sorts first.
fn grlex(a: &PMono, b: &PMono) -> Ordering {
    mono_degree(a).cmp(&mono_degree(b)).then_with(|| {
        let keys: BTreeSet<&Sym> = a.keys().chain(b.keys()).collect();
        for k in keys {
            let x = a.get(k).copied().unwrap_or(0);
            let y = b.get(k).copied().unwrap_or(0);
            if x != y {
                return x.cmp(&y);
            }
        }
        Ordering::Equal
    })
}

fn checked_exp(a: u32, b: u32) -> u32 {
    a.checked_add(b).expect("exponent overflow")
}

/// Polynomial over the rationals in parameter symbols.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PPoly {
    terms: BTreeMap<PMono, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl PPoly {
    pub fn zero() -> PPoly {
        PPoly::default()
    }

    pub fn constant(c: BigRational) -> PPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(PMono::new(), c);
        }
        PPoly { terms }
    }

    pub fn one() -> PPoly {
        PPoly::constant(rat(1))
    }

    pub fn symbol(name: &str) -> PPoly {
        PPoly::sym(Sym::Name(name.to_string()))
    }

    fn sym(s: Sym) -> PPoly {
        let mut m = PMono::new();
        m.insert(s, 1);
        let mut terms = BTreeMap::new();
        terms.insert(m, rat(1));
        PPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&PMono::new()).cloned(),
            _ => None,
        }
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: PMono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry");
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &PPoly) -> PPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> PPoly {
        PPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &PPoly) -> PPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigRational) -> PPoly {
        if c.is_zero() {
            return PPoly::zero();
        }
        PPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn mono_mul(a: &PMono, b: &PMono) -> (PMono, BigRational) {
        let mut m = a.clone();
        for (s, &e) in b {
            let x = m.entry(s.clone()).or_insert(0);
            *x = checked_exp(*x, e);
        }
        let mut c = rat(1);
        let radicals: Vec<Sym> = m
            .iter()
            .filter(|(s, &e)| matches!(s, Sym::Sqrt(_)) && e >= 2)
            .map(|(s, _)| s.clone())
            .collect();
        for s in radicals {
            let e = m[&s];
            let q = e / 2;
            if e % 2 == 0 {
                m.remove(&s);
            } else {
                m.insert(s.clone(), 1);
            }
            match s {
                Sym::Sqrt(Radicand::Int(n)) => {
                    c *= BigRational::from_integer(num_traits::pow(BigInt::from(n), q as usize));
                }
                Sym::Sqrt(Radicand::Param(p)) => {
                    let x = m.entry(Sym::Name(p)).or_insert(0);
                    *x = checked_exp(*x, q);
                }
                Sym::Name(_) => unreachable!(),
            }
        }
        (m, c)
    }

    pub fn mul(&self, o: &PPoly) -> PPoly {
        let mut r = PPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let (m, c) = PPoly::mono_mul(ma, mb);
                r.add_term(m, c * ca * cb);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> PPoly {
        let mut r = PPoly::one();
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// Leading term in graded lexicographic order.
    fn leading(&self) -> Option<(&PMono, &BigRational)> {
        self.terms.iter().max_by(|a, b| grlex(a.0, b.0))
    }

    fn radical_syms(&self) -> BTreeSet<Sym> {
        self.terms
            .keys()
            .flat_map(|m| m.keys().filter(|s| matches!(s, Sym::Sqrt(_))).cloned())
            .collect()
    }

    /// The polynomial with the sign of one radical flipped.
    fn conjugate(&self, s: &Sym) -> PPoly {
        PPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), if m.contains_key(s) { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// Exact quotient by a radical-free divisor, if it exists.
    pub fn exact_div(&self, d: &PPoly) -> Option<PPoly> {
        let (lm, lc) = d.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut r = self.clone();
        let mut q = PPoly::zero();
        while let Some((rm, rc)) = r.leading() {
            let mut t = PMono::new();
            for (s, &e) in rm {
                let f = lm.get(s).copied().unwrap_or(0);
                if e < f {
                    return None;
                }
                if e > f {
                    t.insert(s.clone(), e - f);
                }
            }
            if lm.keys().any(|s| !rm.contains_key(s)) {
                return None;
            }
            let c = rc / &lc;
            let mut tp = PPoly::zero();
            tp.add_term(t, c);
            r = r.sub(&tp.mul(d));
            q = q.add(&tp);
        }
        Some(q)
    }

    /// Positive rational content (gcd of numerators over lcm of
    /// denominators).
    fn content(&self) -> BigRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return rat(1);
        }
        BigRational::new(num, den)
    }

    /// Common monomial factor of all terms (parameter names only).
    fn monomial_gcd(&self) -> PMono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return PMono::new();
        };
        let mut g: PMono = first
            .iter()
            .filter(|(s, _)| matches!(s, Sym::Name(_)))
            .map(|(s, &e)| (s.clone(), e))
            .collect();
        for m in it {
            g = g
                .into_iter()
                .filter_map(|(s, e)| m.get(&s).map(|&f| (s, e.min(f))))
                .collect();
        }
        g
    }

    fn div_monomial(&self, g: &PMono) -> PPoly {
        PPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    for (s, &e) in g {
                        let x = m.get_mut(s).expect("divisible");
                        *x -= e;
                        if *x == 0 {
                            m.remove(s);
                        }
                    }
                    (m, c.clone())
                })
                .collect(),
        }
    }

    /// Evaluate with rational parameter values; radicals of perfect
    /// squares are allowed.
    pub fn eval_rational(&self, values: &HashMap<String, BigRational>) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (s, &e) in m {
                let v = match s {
                    Sym::Name(n) => values.get(n).cloned().ok_or_else(|| Error::UnknownVariable(n.clone()))?,
                    Sym::Sqrt(r) => {
                        let x = match r {
                            Radicand::Int(n) => rat(*n as i64),
                            Radicand::Param(p) => {
                                values.get(p).cloned().ok_or_else(|| Error::UnknownVariable(p.clone()))?
                            }
                        };
                        rational_sqrt(&x).ok_or_else(|| {
                            Error::InvalidInput(format!("{s} is irrational at this point"))
                        })?
                    }
                };
                t *= num_traits::pow(v, e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitute parameters by scalars; a radical over a substituted
    /// parameter needs a nonnegative rational value.
    pub fn substitute(&self, values: &HashMap<String, ParamScalar>) -> Result<ParamScalar> {
        let mut acc = ParamScalar::zero();
        for (m, c) in &self.terms {
            let mut t = ParamScalar::from_rational(c.clone());
            for (s, &e) in m {
                let v = match s {
                    Sym::Name(n) => match values.get(n) {
                        Some(v) => v.clone(),
                        None => ParamScalar::from_ppoly(PPoly::sym(s.clone())),
                    },
                    Sym::Sqrt(Radicand::Param(p)) if values.contains_key(p) => {
                        let q = values[p].as_rational().ok_or_else(|| {
                            Error::InvalidInput(format!("cannot substitute a non-rational value under {s}"))
                        })?;
                        ParamScalar::sqrt_rational(&q)?
                    }
                    Sym::Sqrt(_) => ParamScalar::from_ppoly(PPoly::sym(s.clone())),
                };
                t = t.mul(&v.pow(e as i32)?);
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Parameter names occurring (including under radicals).
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for s in m.keys() {
                match s {
                    Sym::Name(n) | Sym::Sqrt(Radicand::Param(n)) => {
                        out.insert(n.clone());
                    }
                    Sym::Sqrt(Radicand::Int(_)) => {}
                }
            }
        }
        out
    }

    fn sorted_terms(&self) -> Vec<(&PMono, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex(b.0, a.0));
        v
    }

    /// Canonical text: graded lexicographic, highest first.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let t = render_term(c, &render_pmono(m));
            push_signed(&mut out, &t, i == 0);
        }
        out
    }
}

fn render_pmono(m: &PMono) -> String {
    m.iter()
        .map(|(s, &e)| if e == 1 { s.to_string() } else { format!("{s}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

fn render_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// `c*m` with unit coefficients suppressed.
fn render_term(c: &BigRational, m: &str) -> String {
    if m.is_empty() {
        return render_rational(c);
    }
    if c.is_one() {
        m.to_string()
    } else if (-c).is_one() {
        format!("-{m}")
    } else {
        format!("{}*{m}", render_rational(c))
    }
}

fn push_signed(out: &mut String, t: &str, first: bool) {
    if first {
        out.push_str(t);
    } else if let Some(rest) = t.strip_prefix('-') {
        out.push_str(" - ");
        out.push_str(rest);
    } else {
        out.push_str(" + ");
        out.push_str(t);
    }
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| BigRational::new(n, d))
}

/// Element of the fraction field of parameter polynomials.
#[derive(Clone, Debug)]
pub struct ParamScalar {
    num: PPoly,
    den: PPoly,
}

impl PartialEq for ParamScalar {
    fn eq(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

impl Eq for ParamScalar {}

impl From<i64> for ParamScalar {
    fn from(n: i64) -> Self {
        ParamScalar::from_rational(rat(n))
    }
}

impl ParamScalar {
    pub fn zero() -> ParamScalar {
        ParamScalar { num: PPoly::zero(), den: PPoly::one() }
    }

    pub fn one() -> ParamScalar {
        ParamScalar { num: PPoly::one(), den: PPoly::one() }
    }

    pub fn from_rational(c: BigRational) -> ParamScalar {
        ParamScalar { num: PPoly::constant(c), den: PPoly::one() }
    }

    pub fn ratio(p: i64, q: i64) -> ParamScalar {
        ParamScalar::from_rational(BigRational::new(p.into(), q.into()))
    }

    pub fn from_ppoly(p: PPoly) -> ParamScalar {
        ParamScalar { num: p, den: PPoly::one() }
    }

    pub fn param(name: &str) -> ParamScalar {
        ParamScalar::from_ppoly(PPoly::symbol(name))
    }

    /// Formal square root of a nonnegative rational, canonicalized to
    /// `q * sqrt(squarefree)`.
    pub fn sqrt_rational(x: &BigRational) -> Result<ParamScalar> {
        if x.is_negative() {
            return Err(Error::InvalidInput(format!("square root of negative {x}")));
        }
        if x.is_zero() {
            return Ok(ParamScalar::zero());
        }
        // sqrt(a/b) = sqrt(a*b)/b
        let ab = x.numer() * x.denom();
        let ab = ab.to_u64().ok_or_else(|| Error::InvalidInput("radicand too large".into()))?;
        let (outer, inner) = square_split(ab);
        let mut r = ParamScalar::from_rational(BigRational::new(outer.into(), x.denom().clone()));
        if inner > 1 {
            r = r.mul(&ParamScalar::from_ppoly(PPoly::sym(Sym::Sqrt(Radicand::Int(inner)))));
        }
        Ok(r)
    }

    /// Formal square root of a parameter.
    pub fn sqrt_param(name: &str) -> ParamScalar {
        ParamScalar::from_ppoly(PPoly::sym(Sym::Sqrt(Radicand::Param(name.to_string()))))
    }

    pub fn numerator(&self) -> &PPoly {
        &self.num
    }

    pub fn denominator(&self) -> &PPoly {
        &self.den
    }

    /// Build `num/den` and normalize.
    pub fn fraction(num: PPoly, den: PPoly) -> Result<ParamScalar> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator(num.render()));
        }
        Ok(ParamScalar { num, den }.normalized())
    }

    fn normalized(mut self) -> ParamScalar {
        if self.num.is_zero() {
            return ParamScalar::zero();
        }
        // Rationalize radicals in the denominator.
        while let Some(s) = self.den.radical_syms().into_iter().next() {
            let c = self.den.conjugate(&s);
            self.num = self.num.mul(&c);
            self.den = self.den.mul(&c);
        }
        if let Some(c) = self.den.as_constant() {
            return ParamScalar { num: self.num.scale(&c.recip()), den: PPoly::one() };
        }
        if let Some(q) = self.num.exact_div(&self.den) {
            return ParamScalar { num: q, den: PPoly::one() };
        }
        let g = self.num.monomial_gcd();
        let h = self.den.monomial_gcd();
        let common: PMono = g
            .iter()
            .filter_map(|(s, &e)| h.get(s).map(|&f| (s.clone(), e.min(f))))
            .collect();
        if !common.is_empty() {
            self.num = self.num.div_monomial(&common);
            self.den = self.den.div_monomial(&common);
        }
        let lc = self.den.leading().map(|(_, c)| c.clone()).expect("nonzero");
        let k = self.den.content() * if lc.is_negative() { rat(-1) } else { rat(1) };
        let inv = k.recip();
        ParamScalar { num: self.num.scale(&inv), den: self.den.scale(&inv) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Rational value when free of parameters.
    pub fn as_rational(&self) -> Option<BigRational> {
        Some(self.num.as_constant()? / self.den.as_constant()?)
    }

    pub fn add(&self, o: &ParamScalar) -> ParamScalar {
        if self.den == o.den {
            return ParamScalar { num: self.num.add(&o.num), den: self.den.clone() }.normalized();
        }
        ParamScalar {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
        .normalized()
    }

    pub fn neg(&self) -> ParamScalar {
        ParamScalar { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &ParamScalar) -> ParamScalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &ParamScalar) -> ParamScalar {
        if self.is_zero() || o.is_zero() {
            return ParamScalar::zero();
        }
        ParamScalar { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }.normalized()
    }

    pub fn inv(&self) -> Result<ParamScalar> {
        ParamScalar::fraction(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &ParamScalar) -> Result<ParamScalar> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<ParamScalar> {
        let b = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(ParamScalar { num: b.num.pow(k), den: b.den.pow(k) }.normalized())
    }

    pub fn eval_rational(&self, values: &HashMap<String, BigRational>) -> Result<BigRational> {
        let d = self.den.eval_rational(values)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator(self.den.render()));
        }
        Ok(self.num.eval_rational(values)? / d)
    }

    pub fn substitute(&self, values: &HashMap<String, ParamScalar>) -> Result<ParamScalar> {
        self.num.substitute(values)?.div(&self.den.substitute(values)?)
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        let mut s = self.num.symbols();
        s.extend(self.den.symbols());
        s
    }

    fn is_monomial(&self) -> bool {
        self.den.as_constant().is_some() && self.num.nterms() == 1
    }

    /// Canonical text.
    pub fn render(&self) -> String {
        let n = self.num.render();
        if self.den.as_constant().is_some() {
            return n;
        }
        let d = self.den.render();
        let n = if self.num.nterms() > 1 { format!("({n})") } else { n };
        let d = if self.den.nterms() > 1 || self.den.terms.keys().any(|m| mono_degree(m) > 1) {
            format!("({d})")
        } else {
            d
        };
        format!("{n}/{d}")
    }

    /// Rendering as a factor in front of a monomial: `None` for 1, `-` for
    /// −1, otherwise the coefficient with a trailing `*`.
    fn render_factor(&self) -> String {
        if self.is_one() {
            return String::new();
        }
        if self.neg().is_one() {
            return "-".into();
        }
        if self.is_monomial() {
            let (m, c) = self.num.terms.iter().next().expect("one term");
            return format!("{}*", render_term(c, &render_pmono(m)));
        }
        let r = self.render();
        if self.den.as_constant().is_some() {
            format!("({r})*")
        } else {
            format!("{r}*")
        }
    }
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn square_split(mut n: u64) -> (u64, u64) {
    let mut outer = 1u64;
    let mut inner = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        outer *= p.pow(e / 2);
        if e % 2 == 1 {
            inner *= p;
        }
        p += 1;
    }
    inner *= n;
    (outer, inner)
}

/// Sparse polynomial in named variables with [`ParamScalar`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, ParamScalar>,
}

/// Graded lexicographic order on exponent vectors; `Greater` sorts first.
fn grlex_exp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl SparsePoly {
    pub fn zero(vars: &[String]) -> SparsePoly {
        SparsePoly { vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[String], c: ParamScalar) -> SparsePoly {
        let mut p = SparsePoly::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn var(vars: &[String], name: &str) -> Result<SparsePoly> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Ok(SparsePoly::monomial(vars, e, ParamScalar::one()))
    }

    pub fn monomial(vars: &[String], exps: Vec<u32>, c: ParamScalar) -> SparsePoly {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut p = SparsePoly::zero(vars);
        p.add_term(exps, c);
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn add_term(&mut self, e: Vec<u32>, c: ParamScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn same_ring(&self, o: &SparsePoly) -> Result<()> {
        if self.vars != o.vars {
            return Err(Error::ShapeMismatch(format!(
                "polynomial rings differ: [{}] vs [{}]",
                self.vars.join(","),
                o.vars.join(",")
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &SparsePoly) -> Result<SparsePoly> {
        self.same_ring(o)?;
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &SparsePoly) -> Result<SparsePoly> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &ParamScalar) -> SparsePoly {
        let mut r = SparsePoly::zero(&self.vars);
        for (e, x) in &self.terms {
            r.add_term(e.clone(), x.mul(c));
        }
        r
    }

    pub fn mul(&self, o: &SparsePoly) -> Result<SparsePoly> {
        self.same_ring(o)?;
        let mut r = SparsePoly::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| checked_exp(*a, *b)).collect();
                r.add_term(e, ca.mul(cb));
            }
        }
        Ok(r)
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut r = SparsePoly::constant(&self.vars, ParamScalar::one());
        for _ in 0..k {
            r = r.mul(self).expect("same ring");
        }
        r
    }

    /// Terms in canonical order (graded lexicographic, highest first).
    pub fn terms(&self) -> Vec<(&[u32], &ParamScalar)> {
        let mut v: Vec<(&[u32], &ParamScalar)> = self.terms.iter().map(|(e, c)| (e.as_slice(), c)).collect();
        v.sort_by(|a, b| grlex_exp(b.0, a.0));
        v
    }

    /// Exponent vectors in canonical order.
    pub fn monomials(&self) -> Vec<Vec<u32>> {
        self.terms().into_iter().map(|(e, _)| e.to_vec()).collect()
    }

    /// Coefficient of an exact monomial.
    pub fn coefficient(&self, exps: &[u32]) -> ParamScalar {
        self.terms.get(exps).cloned().unwrap_or_else(ParamScalar::zero)
    }

    /// Coefficient of a monomial given by name/exponent pairs (other
    /// variables at exponent 0).
    pub fn coefficient_of(&self, mono: &[(&str, u32)]) -> Result<ParamScalar> {
        let mut e = vec![0; self.vars.len()];
        for (v, k) in mono {
            e[self.var_index(v)?] = *k;
        }
        Ok(self.coefficient(&e))
    }

    pub fn degree_in(&self, var: &str) -> Result<u32> {
        let i = self.var_index(var)?;
        Ok(self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
    }

    /// Coefficient of `var^k` as a polynomial in the remaining variables.
    pub fn coeff_in(&self, var: &str, k: u32) -> Result<SparsePoly> {
        let i = self.var_index(var)?;
        let mut r = SparsePoly::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == k {
                let mut e = e.clone();
                e[i] = 0;
                r.add_term(e, c.clone());
            }
        }
        Ok(r)
    }

    /// Same polynomial in a larger (or reordered) variable list.
    pub fn with_vars(&self, vars: &[String]) -> Result<SparsePoly> {
        let pos: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).ok_or_else(|| Error::UnknownVariable(v.clone())))
            .collect::<Result<_>>()?;
        let mut r = SparsePoly::zero(vars);
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(i, &k)| k > 0 && pos.get(i).is_none()) {
                unreachable!();
            }
            let mut ne = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                ne[pos[i]] = k;
            }
            r.add_term(ne, c.clone());
        }
        Ok(r)
    }

    /// Drop variables that do not occur; fails if a dropped variable occurs.
    pub fn restrict_vars(&self, vars: &[String]) -> Result<SparsePoly> {
        for (i, v) in self.vars.iter().enumerate() {
            if !vars.contains(v) && self.terms.keys().any(|e| e[i] > 0) {
                return Err(Error::InvalidInput(format!("variable {v} still occurs")));
            }
        }
        let mut r = SparsePoly::zero(vars);
        for (e, c) in &self.terms {
            let ne: Vec<u32> = vars
                .iter()
                .map(|v| self.vars.iter().position(|w| w == v).map_or(0, |i| e[i]))
                .collect();
            r.add_term(ne, c.clone());
        }
        Ok(r)
    }

    /// Replace variables by polynomials of the same ring; unbound variables
    /// are kept.
    pub fn substitute(&self, bindings: &[(&str, SparsePoly)]) -> Result<SparsePoly> {
        let mut table: Vec<Option<&SparsePoly>> = vec![None; self.vars.len()];
        for (name, p) in bindings {
            self.same_ring(p)?;
            table[self.var_index(name)?] = Some(p);
        }
        let mut cache: HashMap<(usize, u32), SparsePoly> = HashMap::new();
        let mut r = SparsePoly::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut kept = vec![0; self.vars.len()];
            let mut t = SparsePoly::constant(&self.vars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match table[i] {
                    None => kept[i] = k,
                    Some(p) => {
                        let pk = cache.entry((i, k)).or_insert_with(|| p.pow(k));
                        t = t.mul(pk)?;
                    }
                }
            }
            let m = SparsePoly::monomial(&self.vars, kept, ParamScalar::one());
            r = r.add(&t.mul(&m)?)?;
        }
        Ok(r)
    }

    /// Set variables to scalar values.
    pub fn evaluate_vars(&self, values: &[(&str, ParamScalar)]) -> Result<SparsePoly> {
        let b: Vec<(&str, SparsePoly)> = values
            .iter()
            .map(|(n, v)| (*n, SparsePoly::constant(&self.vars, v.clone())))
            .collect();
        self.substitute(&b)
    }

    /// Apply a function to every coefficient.
    pub fn map_coefficients(&self, f: impl Fn(&ParamScalar) -> Result<ParamScalar>) -> Result<SparsePoly> {
        let mut r = SparsePoly::zero(&self.vars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c)?);
        }
        Ok(r)
    }

    /// Substitute parameters in every coefficient.
    pub fn substitute_params(&self, values: &HashMap<String, ParamScalar>) -> Result<SparsePoly> {
        self.map_coefficients(|c| c.substitute(values))
    }

    /// Pull back along a monomial map: each variable of `self` is replaced
    /// by `scalar * prod(domain_var^exp)`.
    pub fn pullback(&self, map: &MonomialSubstitution) -> Result<SparsePoly> {
        let dv = &map.domain_vars;
        let mut images = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            let (c, mono) = map.images.get(v).ok_or_else(|| Error::UnknownVariable(v.clone()))?;
            let mut e = vec![0u32; dv.len()];
            for (name, k) in mono {
                let i = dv
                    .iter()
                    .position(|w| w == name)
                    .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                e[i] = checked_exp(e[i], *k);
            }
            images.push((c.clone(), e));
        }
        let mut r = SparsePoly::zero(dv);
        for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut out = vec![0u32; dv.len()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                coef = coef.mul(&images[i].0.pow(k as i32)?);
                for (o, x) in out.iter_mut().zip(&images[i].1) {
                    *o = checked_exp(*o, x.checked_mul(k).expect("exponent overflow"));
                }
            }
            r.add_term(out, coef);
        }
        Ok(r)
    }

    /// Pseudo-division by `g` in `var`: returns `(q, r, p)` with
    /// `lc(g)^p * f = q*g + r` and `deg_var(r) < deg_var(g)`. When the
    /// leading coefficient is a scalar it is inverted instead, so `p` counts
    /// only multiplications by a non-scalar leading coefficient.
    pub fn pseudo_divide(&self, g: &SparsePoly, var: &str) -> Result<(SparsePoly, SparsePoly, u32)> {
        self.same_ring(g)?;
        let i = self.var_index(var)?;
        let dg = g.degree_in(var)?;
        if dg == 0 {
            return Err(Error::InvalidInput(format!("divisor is constant in {var}")));
        }
        let lc = g.coeff_in(var, dg)?;
        let scalar_lc = lc.terms.len() == 1 && lc.terms.keys().all(|e| e.iter().all(|&k| k == 0));
        let lc_inv = if scalar_lc {
            Some(lc.terms.values().next().expect("one term").inv()?)
        } else {
            None
        };
        let mut r = self.clone();
        let mut q = SparsePoly::zero(&self.vars);
        let mut power = 0;
        loop {
            let dr = r.degree_in(var)?;
            if r.is_zero() || dr < dg {
                break;
            }
            let lr = r.coeff_in(var, dr)?;
            let mut xe = vec![0; self.vars.len()];
            xe[i] = dr - dg;
            let shift = SparsePoly::monomial(&self.vars, xe, ParamScalar::one());
            match &lc_inv {
                Some(inv) => {
                    let t = lr.mul(&shift)?.scale(inv);
                    r = r.sub(&t.mul(g)?)?;
                    q = q.add(&t)?;
                }
                None => {
                    let t = lr.mul(&shift)?;
                    r = lc.mul(&r)?.sub(&t.mul(g)?)?;
                    q = lc.mul(&q)?.add(&t)?;
                    power += 1;
                }
            }
        }
        Ok((q, r, power))
    }

    /// Canonical text rendering.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms().into_iter().enumerate() {
            let m: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { self.vars[j].clone() } else { format!("{}^{k}", self.vars[j]) })
                .collect();
            let t = if m.is_empty() {
                let r = c.render();
                if c.num.nterms() > 1 && i > 0 { format!("({r})") } else { r }
            } else {
                format!("{}{}", c.render_factor(), m.join("*"))
            };
            push_signed(&mut out, &t, i == 0);
        }
        out
    }

    /// Parse an expression; identifiers not among `vars` are parameters,
    /// `sqrt(n)` / `sqrt(name)` are formal radicals.
    pub fn parse(text: &str, vars: &[String]) -> Result<SparsePoly> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, vars };
        let r = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("unexpected {:?}", p.tokens[p.pos])));
        }
        Ok(r)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A monomial map between polynomial rings: every codomain variable goes
/// to a scalar times a monomial in the domain variables.
#[derive(Clone, Debug, Default)]
pub struct MonomialSubstitution {
    pub domain_vars: Vec<String>,
    pub images: BTreeMap<String, (ParamScalar, Vec<(String, u32)>)>,
}

impl MonomialSubstitution {
    pub fn new(domain_vars: &[String]) -> Self {
        MonomialSubstitution { domain_vars: domain_vars.to_vec(), images: BTreeMap::new() }
    }

    pub fn set(&mut self, var: &str, scalar: ParamScalar, mono: &[(&str, u32)]) {
        self.images.insert(
            var.to_string(),
            (scalar, mono.iter().map(|(n, k)| (n.to_string(), *k)).collect()),
        );
    }

    /// Compose with a rescaling of domain variables `y -> c*y`.
    pub fn rescale(&self, scalings: &[(&str, ParamScalar)]) -> Result<Self> {
        let mut out = self.clone();
        for (c, mono) in out.images.values_mut() {
            for (n, k) in mono.iter() {
                if let Some((_, s)) = scalings.iter().find(|(m, _)| m == n) {
                    *c = c.mul(&s.pow(*k as i32)?);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<SparsePoly> {
        let mut acc = if self.eat('-') { self.term()?.neg() } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?)?;
            } else if self.eat('/') {
                let d = self.power()?;
                let s = as_scalar(&d).ok_or_else(|| Error::Parse("division by a non-scalar".into()))?;
                acc = acc.scale(&s.inv()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<SparsePoly> {
        let b = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let k = n.to_u32().ok_or_else(|| Error::Parse("exponent too large".into()))?;
                    return Ok(b.pow(k));
                }
                other => return Err(Error::Parse(format!("expected exponent, found {other:?}"))),
            }
        }
        Ok(b)
    }

    fn atom(&mut self) -> Result<SparsePoly> {
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(SparsePoly::constant(self.vars, ParamScalar::from_rational(BigRational::from_integer(n))))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "sqrt" && self.peek() == Some(&Tok::Op('(')) {
                    self.pos += 1;
                    let r = match self.tokens.get(self.pos).cloned() {
                        Some(Tok::Num(n)) => ParamScalar::sqrt_rational(&BigRational::from_integer(n))?,
                        Some(Tok::Ident(p)) if !self.vars.contains(&p) => ParamScalar::sqrt_param(&p),
                        other => return Err(Error::Parse(format!("unsupported radicand {other:?}"))),
                    };
                    self.pos += 1;
                    if !self.eat(')') {
                        return Err(Error::Parse("expected )".into()));
                    }
                    return Ok(SparsePoly::constant(self.vars, r));
                }
                if self.vars.contains(&name) {
                    SparsePoly::var(self.vars, &name)
                } else {
                    Ok(SparsePoly::constant(self.vars, ParamScalar::param(&name)))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("expected )".into()));
                }
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.atom()?.neg())
            }
            other => Err(Error::Parse(format!("unexpected {other:?}"))),
        }
    }
}

fn as_scalar(p: &SparsePoly) -> Option<ParamScalar> {
    match p.terms.len() {
        0 => Some(ParamScalar::zero()),
        1 => {
            let (e, c) = p.terms.iter().next()?;
            e.iter().all(|&k| k == 0).then(|| c.clone())
        }
        _ => None,
    }
}

/// Parse a scalar expression in parameters only.
pub fn parse_scalar(text: &str) -> Result<ParamScalar> {
    let p = SparsePoly::parse(text, &[])?;
    as_scalar(&p).ok_or_else(|| Error::Parse(format!("{text} is not a scalar")))
}

/// Variable names `prefix0, prefix1, ...` or from explicit labels.
pub fn names(prefix: &str, labels: &[usize]) -> Vec<String> {
    labels.iter().map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_and_render() {
        let vars = v(&["x", "y"]);
        let p = SparsePoly::parse("3*x^2*y - y + 1/2 + B/24*x", &vars).unwrap();
        assert_eq!(p.render(), "3*x^2*y + 1/24*B*x - y + 1/2");
        let q = SparsePoly::parse("(x + y)^2", &vars).unwrap();
        assert_eq!(q.render(), "x^2 + 2*x*y + y^2");
    }

    #[test]
    fn radicals_rewrite() {
        let r = ParamScalar::sqrt_rational(&BigRational::from_integer(12.into())).unwrap();
        assert_eq!(r.render(), "2*sqrt(3)");
        assert_eq!(r.mul(&r).as_rational(), Some(BigRational::from_integer(12.into())));
        let s = ParamScalar::sqrt_param("xi0");
        assert_eq!(s.mul(&s), ParamScalar::param("xi0"));
        let inv = r.inv().unwrap();
        assert_eq!(inv.render(), "1/6*sqrt(3)");
    }

    #[test]
    fn fractions_normalize() {
        let b = ParamScalar::param("B");
        let t = ParamScalar::param("t");
        let x = b.mul(&t).div(&t.mul(&t)).unwrap();
        assert_eq!(x.render(), "B/t");
        let y = b.add(&t).mul(&b.sub(&t)).div(&b.add(&t)).unwrap();
        assert_eq!(y.render(), "B - t");
    }

    #[test]
    fn pseudo_division_basics() {
        let vars = v(&["x"]);
        let f = SparsePoly::parse("x^2 - 1", &vars).unwrap();
        let g = SparsePoly::parse("x - 1", &vars).unwrap();
        let (q, r, p) = f.pseudo_divide(&g, "x").unwrap();
        assert_eq!((q.render(), r.render(), p), ("x + 1".to_string(), "0".to_string(), 0));
        let vars = v(&["x", "y"]);
        let f = SparsePoly::parse("x*y^2 + x + y", &vars).unwrap();
        let (q, r, p) = f.pseudo_divide(&f, "x").unwrap();
        assert_eq!(r.render(), "0");
        assert_eq!(p, 1);
        assert_eq!(q, f.coeff_in("x", 1).unwrap());
        assert!(f.pseudo_divide(&SparsePoly::parse("y", &vars).unwrap(), "x").is_err());
    }

    #[test]
    fn substitution_and_pullback() {
        let vars = v(&["x", "y"]);
        let p = SparsePoly::parse("x^2*y + c", &vars).unwrap();
        let id = p
            .substitute(&[("x", SparsePoly::var(&vars, "x").unwrap())])
            .unwrap();
        assert_eq!(id, p);
        let mut m = MonomialSubstitution::new(&v(&["a", "b"]));
        m.set("x", ParamScalar::from(2), &[("a", 1), ("b", 2)]);
        m.set("y", ParamScalar::one(), &[("b", 1)]);
        assert_eq!(p.pullback(&m).unwrap().render(), "4*a^2*b^5 + c");
        assert!(matches!(p.substitute(&[("z", p.clone())]), Err(Error::UnknownVariable(_))));
    }
}
