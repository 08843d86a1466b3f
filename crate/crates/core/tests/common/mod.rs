#![allow(dead_code)]

use toricfib::fan::Fan;
use toricfib::polytope::LatticePolytope;
use toricfib::LatticeVector;

pub fn lv(v: &[i64]) -> LatticeVector {
    LatticeVector(v.to_vec())
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("fixture json")
}

pub fn delta3() -> LatticePolytope {
    LatticePolytope::from_json(&json(include_str!("../../../../fixtures/delta3.json"))).unwrap()
}

pub fn delta4() -> LatticePolytope {
    LatticePolytope::from_json(&json(include_str!("../../../../fixtures/delta4.json"))).unwrap()
}

pub fn delta5_polar() -> LatticePolytope {
    LatticePolytope::from_json(&json(include_str!("../../../../fixtures/delta5_polar.json"))).unwrap()
}

pub fn b2() -> Fan {
    Fan::from_json(&json(include_str!("../../../../fixtures/b2.json"))).unwrap()
}

pub fn p1() -> Fan {
    Fan::from_json(&json(include_str!("../../../../fixtures/p1.json"))).unwrap()
}

pub fn x4() -> Fan {
    Fan::from_json(&json(include_str!("../../../../fixtures/x4.json"))).unwrap()
}

/// Lattice points of `{x : ⟨x, w⟩ ≥ −1 for all w}` by scanning a box.
pub fn brute_points(normals: &[LatticeVector], lo: &[i64], hi: &[i64]) -> Vec<LatticeVector> {
    let mut out = Vec::new();
    let mut x = lo.to_vec();
    loop {
        let v = LatticeVector(x.clone());
        if normals.iter().all(|w| v.dot(w) >= -1) {
            out.push(v);
        }
        let mut i = 0;
        loop {
            if i == x.len() {
                out.sort();
                return out;
            }
            if x[i] < hi[i] {
                x[i] += 1;
                break;
            }
            x[i] = lo[i];
            i += 1;
        }
    }
}
