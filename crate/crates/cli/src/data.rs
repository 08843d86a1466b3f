//! Bundled fixtures and the constructions built from them.

use serde_json::Value;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use toricfib::cy::NefPartition;
use toricfib::fan::{check_compatibility, face_fan, star_subdivide, star_subdivide_all, subdivide_domain, Fan, FanMorphism};
use toricfib::polytope::LatticePolytope;
use toricfib::{IntMatrix, LatticeVector};

use crate::CliError;

pub fn default_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

pub fn lv(v: &[i64]) -> LatticeVector {
    LatticeVector(v.to_vec())
}

fn vectors(v: &Value, key: &str) -> Result<Vec<LatticeVector>, CliError> {
    serde_json::from_value::<Vec<Vec<i64>>>(v[key].clone())
        .map(|r| r.into_iter().map(LatticeVector).collect())
        .map_err(|e| CliError::parse(format!("{key}: {e}")))
}

/// Point names by group, e.g. `"delta5_polar_points" -> {"y3": [...]}`.
#[derive(Clone, Debug, Default)]
pub struct Names(BTreeMap<String, BTreeMap<String, LatticeVector>>);

impl Names {
    pub fn from_json(v: &Value) -> Result<Names, CliError> {
        serde_json::from_value::<BTreeMap<String, BTreeMap<String, Vec<i64>>>>(v.clone())
            .map(|m| {
                Names(
                    m.into_iter()
                        .map(|(g, e)| (g, e.into_iter().map(|(n, p)| (n, LatticeVector(p))).collect()))
                        .collect(),
                )
            })
            .map_err(|e| CliError::parse(format!("names: {e}")))
    }

    pub fn group(&self, g: &str) -> Result<&BTreeMap<String, LatticeVector>, CliError> {
        self.0.get(g).ok_or_else(|| CliError::parse(format!("missing name group {g}")))
    }

    pub fn point(&self, g: &str, name: &str) -> Result<LatticeVector, CliError> {
        self.group(g)?
            .get(name)
            .cloned()
            .ok_or_else(|| CliError::parse(format!("no point named {name} in {g}")))
    }

    pub fn points(&self, g: &str, names: &[&str]) -> Result<Vec<LatticeVector>, CliError> {
        names.iter().map(|n| self.point(g, n)).collect()
    }

    /// Name of each point, falling back to its coordinates.
    pub fn label(&self, g: &str, p: &LatticeVector) -> String {
        self.0
            .get(g)
            .and_then(|m| m.iter().find(|(_, q)| *q == p).map(|(n, _)| n.clone()))
            .unwrap_or_else(|| p.to_string())
    }
}

/// Everything loaded from a fixture directory.
#[derive(Clone, Debug)]
pub struct Fixtures {
    pub delta3: LatticePolytope,
    pub delta4: LatticePolytope,
    pub delta5_polar: LatticePolytope,
    /// Vertices of Δ⁵° in fixture order (y0..y9).
    pub delta5_polar_vertices: Vec<LatticeVector>,
    pub nef_vertices: Vec<LatticeVector>,
    pub nef_parts: Vec<Vec<usize>>,
    pub m: IntMatrix,
    pub m_n: IntMatrix,
    pub b2: Fan,
    pub p1: Fan,
    pub x4_subdivision: Vec<LatticeVector>,
    pub names: Names,
}

fn polytope(v: &Value) -> Result<LatticePolytope, CliError> {
    LatticePolytope::from_json(v).map_err(CliError::from)
}

fn matrix(v: &Value) -> Result<IntMatrix, CliError> {
    let rows: Vec<Vec<i64>> =
        serde_json::from_value(v["matrix"].clone()).map_err(|e| CliError::parse(format!("matrix: {e}")))?;
    IntMatrix::from_i64(&rows).map_err(CliError::from)
}

impl Fixtures {
    pub fn load(dir: &Path) -> Result<Fixtures, CliError> {
        let j = |f: &str| read_json(&dir.join(f));
        let d5 = j("delta5_polar.json")?;
        let nef = j("nef_partition.json")?;
        Ok(Fixtures {
            delta3: polytope(&j("delta3.json")?)?,
            delta4: polytope(&j("delta4.json")?)?,
            delta5_polar: polytope(&d5)?,
            delta5_polar_vertices: vectors(&d5, "vertices")?,
            nef_vertices: vectors(&nef, "vertices")?,
            nef_parts: serde_json::from_value(nef["parts"].clone())
                .map_err(|e| CliError::parse(format!("parts: {e}")))?,
            m: matrix(&j("morphism_m.json")?)?,
            m_n: matrix(&j("morphism_mN.json")?)?,
            b2: Fan::from_json(&j("b2.json")?)?,
            p1: Fan::from_json(&j("p1.json")?)?,
            x4_subdivision: vectors(&j("x4_rays.json")?, "subdivision")?,
            names: Names::from_json(&j("names.json")?)?,
        })
    }
}

pub const Z6: [&str; 6] = ["z0", "z1", "z2", "z3", "z4", "z16"];
pub const Z12: [&str; 12] = ["z0", "z1", "z2", "z3", "z4", "z16", "z168", "z170", "z334", "z251", "z276", "z325"];
pub const Y15: [&str; 15] = [
    "y2", "y3", "y4", "y5", "y6", "y7", "y8", "y9", "y752", "y630", "y667", "y469", "y109", "y32", "y745",
];

pub fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// The fans and morphisms of the running example, built once.
pub struct Constructions {
    pub delta5: LatticePolytope,
    pub nef: NefPartition,
    /// Face fan of Δ⁵° with rays y0..y9.
    pub x5: Fan,
    pub alpha: IntMatrix,
    /// Face fan of Δ⁵° subdivided to be compatible with α.
    pub x5_alpha: Fan,
    pub alpha_map: FanMorphism,
    pub beta: IntMatrix,
    /// X⁴ with one extra ray (rays z0..z4, z16).
    pub x6: Fan,
    pub beta6: FanMorphism,
    /// X⁴ with all seven extra rays (rays named by [`Z12`]).
    pub x12: Fan,
    pub beta12: FanMorphism,
    /// The part of the subdivided X⁵ fan away from y0, y1.
    pub part: Fan,
    /// Domain of Φ̃ (rays named by [`Y15`]).
    pub x15: Fan,
    pub phi: FanMorphism,
}

impl Constructions {
    pub fn build(fx: &Fixtures) -> Result<Constructions, CliError> {
        let delta5 = fx.delta5_polar.polar()?;
        let nef_parts: Vec<Vec<LatticeVector>> =
            fx.nef_parts.iter().map(|p| p.iter().map(|&i| fx.nef_vertices[i].clone()).collect()).collect();
        let nef = NefPartition::from_vertex_parts(&delta5, &nef_parts)?;
        let x5 = face_fan(&fx.delta5_polar)?.with_ray_order(&fx.delta5_polar_vertices)?;
        let alpha = IntMatrix::from_i64(&[vec![1, 0], vec![0, 1], vec![0, 0], vec![0, 0], vec![0, 0]])?;
        let x5_alpha = subdivide_domain(&alpha, &x5, &fx.b2)?.with_ray_order(&fx.delta5_polar_vertices)?;
        let alpha_map = check_compatibility(&alpha, &x5_alpha, &fx.b2)?;

        let beta = IntMatrix::from_i64(&[vec![1], vec![1], vec![4], vec![6]])?;
        let x4 = face_fan(&fx.delta4.polar()?)?;
        let z = |names: &[&str]| fx.names.points("delta4_polar_points", names);
        let x6 = star_subdivide(&x4, &fx.x4_subdivision[0])?.with_ray_order(&z(&Z6)?)?;
        let beta6 = check_compatibility(&beta, &x6, &fx.p1)?;
        let x12 = star_subdivide_all(&x4, &fx.x4_subdivision)?.with_ray_order(&z(&Z12)?)?;
        let beta12 = check_compatibility(&beta, &x12, &fx.p1)?;

        // Cones of the α-subdivided fan avoiding y0, y1 and the pair y4, y5.
        let cones: Vec<Vec<usize>> = x5_alpha
            .all_cones()
            .iter()
            .map(|c| c.ray_indices.clone())
            .filter(|c| !(c.contains(&0) || c.contains(&1) || (c.contains(&4) && c.contains(&5))))
            .collect();
        let part = Fan::new(5, x5_alpha.rays().to_vec(), cones)?;
        let y = |names: &[&str]| fx.names.points("delta5_polar_points", names);
        let x14 = subdivide_domain(&fx.m, &part, &x12)?;
        let x15 = star_subdivide(&x14, &y(&["y745"])?[0])?.with_ray_order(&y(&Y15)?)?;
        let phi = check_compatibility(&fx.m, &x15, &x12)?;
        Ok(Constructions {
            delta5,
            nef,
            x5,
            alpha,
            x5_alpha,
            alpha_map,
            beta,
            x6,
            beta6,
            x12,
            beta12,
            part,
            x15,
            phi,
        })
    }
}
