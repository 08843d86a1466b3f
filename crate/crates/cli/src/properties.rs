//! Randomized property suites over small instances.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use toricfib::cy::{gkz_coefficient, same_polytope, GkzDegrees, NefPartition};
use toricfib::lattice::{hermite_form, kernel_basis};
use toricfib::monodromy::{classify_kodaira, power_monodromy, GaussRat, MonodromyMatrix};
use toricfib::poly::{ParamScalar, SparsePoly};
use toricfib::polytope::LatticePolytope;
use toricfib::{IntMatrix, LatticeVector};

#[derive(Clone, Debug, Default)]
pub struct SuiteResult {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

pub type Suite = fn(&mut ChaCha8Rng, usize) -> SuiteResult;

pub const SUITES: &[(&str, Suite)] = &[
    ("polar involution", polar_involution),
    ("face-count duality", face_count_duality),
    ("nef-partition identities", nef_identities),
    ("hermite and kernel certificates", hermite_kernel),
    ("pseudo-division certificate", pseudo_division),
    ("GKZ nonnegativity and integrality", gkz_integrality),
    ("Kodaira conjugation invariance", kodaira_invariance),
];

fn grid(n: usize) -> Vec<LatticeVector> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (-1..=1).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out.into_iter().filter(|v| v.iter().any(|&x| x != 0)).map(LatticeVector).collect()
}

/// A random unimodular matrix as a product of elementary moves.
pub fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n < 2 {
        return IntMatrix::from_i64(&m).expect("square");
    }
    for _ in 0..3 {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let q = rng.gen_range(-1..=1);
        for k in 0..n {
            m[i][k] += q * m[j][k];
        }
    }
    if rng.gen_bool(0.5) {
        m.swap(0, n - 1);
    }
    IntMatrix::from_i64(&m).expect("square")
}

/// A random reflexive polytope with vertices in the cube [−1,1]ⁿ, moved by a
/// random unimodular map.
pub fn random_reflexive(rng: &mut ChaCha8Rng, n: usize) -> LatticePolytope {
    let pts = grid(n);
    loop {
        let k = rng.gen_range(n + 1..=pts.len().min(3 * n + 2));
        let chosen: Vec<LatticeVector> = pts.choose_multiple(rng, k).cloned().collect();
        let Ok(p) = LatticePolytope::hull(&chosen) else { continue };
        if p.dim() != n || !p.is_reflexive() {
            continue;
        }
        let u = unimodular(rng, n);
        let moved: Vec<LatticeVector> = p.vertices().iter().map(|v| v.apply(&u).expect("shape")).collect();
        if let Ok(q) = LatticePolytope::hull(&moved) {
            return q;
        }
    }
}

fn polar_involution(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::default();
    for i in 0..cases {
        let p = random_reflexive(rng, 2 + i % 2);
        let back = p.polar().and_then(|q| q.polar());
        r.record(back.as_ref().map_or(false, |b| same_polytope(b, &p)), || format!("{p}"));
    }
    r
}

fn face_count_duality(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::default();
    for i in 0..cases {
        let p = random_reflexive(rng, 2 + i % 2);
        let ok = p.polar().map_or(false, |q| {
            let (a, mut b) = (p.face_counts(), q.face_counts());
            b.reverse();
            a == b
        });
        r.record(ok, || format!("{p}"));
    }
    r
}

fn nef_identities(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::default();
    let mut attempts = 0;
    while r.cases < cases && attempts < 100 * cases {
        attempts += 1;
        let n = 2 + usize::from(rng.gen_bool(0.25));
        let p = random_reflexive(rng, n);
        let nv = p.polar().map(|q| q.vertices().len()).unwrap_or(0);
        let assignment: Vec<usize> = (0..nv).map(|_| rng.gen_range(0..2)).collect();
        let Ok(np) = NefPartition::new(&p, &assignment) else { continue };
        let ok = np.identities().map_or(false, |x| x.iter().all(|&b| b))
            && np.dual().and_then(|d| d.dual()).map_or(false, |dd| same_polytope(dd.base(), &p));
        r.record(ok, || format!("{p} with parts {assignment:?}"));
    }
    if r.cases < cases {
        r.failures.push(format!("only {} valid partitions in {attempts} attempts", r.cases));
    }
    r
}

fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
    let rank_one = rng.gen_bool(0.2);
    let base: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
    let rows: Vec<Vec<i64>> = (0..m)
        .map(|_| {
            if rank_one {
                let k = rng.gen_range(-3..=3);
                base.iter().map(|x| k * x).collect()
            } else {
                (0..n).map(|_| rng.gen_range(-5..=5)).collect()
            }
        })
        .collect();
    IntMatrix::from_i64(&rows).expect("rectangular")
}

fn is_hermite(h: &IntMatrix) -> bool {
    let mut last: Option<usize> = None;
    let mut zero_seen = false;
    for (i, row) in h.rows().iter().enumerate() {
        match row.iter().position(|x| !x.is_zero()) {
            None => zero_seen = true,
            Some(c) => {
                if zero_seen || last.map_or(false, |l| c <= l) || !row[c].is_positive() {
                    return false;
                }
                if (0..i).any(|k| h.get(k, c).is_negative() || h.get(k, c) >= &row[c]) {
                    return false;
                }
                last = Some(c);
            }
        }
    }
    true
}

fn hermite_kernel(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::default();
    for _ in 0..cases {
        let m = random_matrix(rng);
        let (h, u) = hermite_form(&m);
        let unimodular = u.det().map_or(false, |d| d.abs().is_one());
        let ok_h = u.mul(&m).map_or(false, |x| x == h) && unimodular && is_hermite(&h);
        let k = kernel_basis(&m);
        let annihilates = k.nrows() == 0 || k.mul(&m).map_or(false, |x| x.rows().iter().flatten().all(Zero::is_zero));
        let ok_k = annihilates && k.nrows() == m.nrows() - m.rank() && (k.nrows() == 0 || k.rank() == k.nrows());
        r.record(ok_h && ok_k, || format!("{m}"));
    }
    r
}

fn random_poly(rng: &mut ChaCha8Rng, vars: &[String], terms: usize, max_deg: u32) -> SparsePoly {
    let mut p = SparsePoly::zero(vars);
    for _ in 0..terms {
        let e: Vec<u32> = vars.iter().map(|_| rng.gen_range(0..=max_deg)).collect();
        let c = ParamScalar::from(rng.gen_range(-4..=4));
        p = p.add(&SparsePoly::monomial(vars, e, c)).expect("same ring");
    }
    p
}

fn pseudo_division(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let mut r = SuiteResult::default();
    while r.cases < cases {
        let (nf, ng) = (rng.gen_range(1..=6), rng.gen_range(1..=4));
        let f = random_poly(rng, &vars, nf, 4);
        let g = random_poly(rng, &vars, ng, 3);
        let var = vars.choose(rng).expect("nonempty").clone();
        if g.degree_in(&var).map_or(true, |d| d == 0) {
            continue;
        }
        let ok = match f.pseudo_divide(&g, &var) {
            Ok((q, rem, pw)) => {
                let dg = g.degree_in(&var).expect("known variable");
                let lc = g.coeff_in(&var, dg).expect("known variable");
                let scalar = lc.terms().len() == 1 && lc.terms()[0].0.iter().all(|&e| e == 0);
                let factor = if scalar { SparsePoly::constant(&vars, ParamScalar::one()) } else { lc.pow(pw) };
                let lhs = factor.mul(&f).expect("same ring");
                let rhs = q.mul(&g).and_then(|x| x.add(&rem)).expect("same ring");
                lhs == rhs && (rem.is_zero() || rem.degree_in(&var).map_or(false, |d| d < dg))
            }
            Err(_) => false,
        };
        r.record(ok, || format!("{} by {} in {var}", f.render(), g.render()));
    }
    r
}

fn rational_factorial(n: i64) -> BigRational {
    (1..=n).fold(BigRational::one(), |a, k| a * BigRational::from_integer(k.into()))
}

fn gkz_integrality(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::default();
    for _ in 0..cases {
        let n = rng.gen_range(2..=5);
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
        let d: i64 = w.iter().sum();
        let mut row = w.clone();
        row.push(-d);
        let mut columns: Vec<(usize, LatticeVector)> =
            (0..n).map(|i| (0, LatticeVector::unit(n, i))).collect();
        columns.push((0, LatticeVector::zero(n)));
        let mut flags = vec![false; n];
        flags.push(true);
        let deg = GkzDegrees { rows: vec![row.clone()], columns, origin_flags: flags, generators: vec![LatticeVector(row)] };
        let k = rng.gen_range(-2..=6);
        let oracle = if k < 0 {
            BigRational::zero()
        } else {
            w.iter().fold(rational_factorial(d * k), |a, &wi| a / rational_factorial(wi * k))
        };
        let ok = match gkz_coefficient(&deg, &[k]) {
            Ok(c) => !c.is_negative() && oracle.is_integer() && BigRational::from_integer(c) == oracle,
            Err(_) => false,
        };
        r.record(ok, || format!("weights {w:?} at {k}"));
    }
    r
}

fn g(re: i64) -> GaussRat {
    Complex::new(BigRational::from_integer(re.into()), BigRational::zero())
}

fn int_matrix(m: [[i64; 2]; 2]) -> MonodromyMatrix {
    MonodromyMatrix::from_i64(m)
}

fn inverse(p: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let d = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    [[d * p[1][1], -d * p[0][1]], [-d * p[1][0], d * p[0][0]]]
}

fn random_sl2(rng: &mut ChaCha8Rng, allow_reflection: bool) -> [[i64; 2]; 2] {
    let mut p = [[1i64, 0], [0, 1]];
    for _ in 0..rng.gen_range(1..=4) {
        let k = rng.gen_range(-2..=2);
        let step = if rng.gen_bool(0.5) { [[1, k], [0, 1]] } else { [[0, -1], [1, 0]] };
        p = [
            [p[0][0] * step[0][0] + p[0][1] * step[1][0], p[0][0] * step[0][1] + p[0][1] * step[1][1]],
            [p[1][0] * step[0][0] + p[1][1] * step[1][0], p[1][0] * step[0][1] + p[1][1] * step[1][1]],
        ];
    }
    if allow_reflection && rng.gen_bool(0.5) {
        p = [[p[0][0], p[0][1]], [-p[1][0], -p[1][1]]];
    }
    p
}

fn kodaira_invariance(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::default();
    let elliptic = [[[0, -1], [1, 0]], [[1, -1], [1, 0]], [[0, -1], [1, -1]], [[0, 1], [-1, 0]], [[0, 1], [-1, 1]]];
    for _ in 0..cases {
        let (m, parabolic) = if rng.gen_bool(0.5) {
            let n = rng.gen_range(0..=5);
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            ([[s, s * n], [0, s]], true)
        } else {
            let e = *elliptic.choose(rng).expect("nonempty");
            (if rng.gen_bool(0.5) { e } else { [[-e[0][0], -e[0][1]], [-e[1][0], -e[1][1]]] }, false)
        };
        let p = random_sl2(rng, parabolic);
        let conj = int_matrix(p).mul(&int_matrix(m)).mul(&int_matrix(inverse(p)));
        let k = rng.gen_range(0..=7);
        let det_ok = power_monodromy(&conj, k).det() == (0..k).fold(g(1), |a, _| a * conj.det());
        let ok = match (classify_kodaira(&int_matrix(m)), classify_kodaira(&conj)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        };
        r.record(ok && det_ok, || format!("{m:?} conjugated by {p:?}"));
    }
    r
}
