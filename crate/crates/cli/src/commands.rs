//! Subcommand definitions and dispatch.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use toricfib::cy::{
    anticanonical_polynomial, batyrev_hodge, gkz_degrees, gkz_series_reindexed, nef_ci_polynomials, Coefficients,
    MonomialMode, NefPartition,
};
use toricfib::fan::{check_compatibility, face_fan, normal_fan, search_fibrations, Fan};
use toricfib::k3::{ade_subgraph, fibre_params_y, fibre_params_z, match_parameters, singular_fibre_locus};
use toricfib::monodromy::{
    classify_kodaira, parse_gauss, perm, power_monodromy, track_roots, GaussRat, Loop, MonodromyMatrix, RootFamily,
    TrackOptions,
};
use toricfib::poly::{parse_scalar, ParamScalar, SparsePoly};
use toricfib::polytope::LatticePolytope;
use toricfib::{IntMatrix, LatticeVector};

use crate::data::{default_dir, read_json, Fixtures};
use crate::reproduce::{self, Context};
use crate::{canonical_json, CliError};

#[derive(Parser, Debug)]
#[command(name = "toricfib", version, about = "Toric fibrations of Calabi-Yau threefolds")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Input file (polytope, fan or nef-partition JSON, depending on the command).
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Working precision in bits for root continuation.
    #[arg(long, global = true, default_value_t = 128)]
    pub precision: usize,
    /// Restrict `reproduce` to one criterion (name, number or tag).
    #[arg(long, global = true)]
    pub only: Option<String>,
    /// Fixture directory.
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lattice polytopes: polar, lattice points, face counts.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Fans and toric morphisms.
    #[command(subcommand)]
    Fan(FanCmd),
    /// Calabi-Yau equations, Hodge numbers and GKZ series.
    #[command(subcommand)]
    Cy(CyCmd),
    /// K3 fibre moduli and singular fibres.
    #[command(subcommand)]
    K3(K3Cmd),
    /// Root monodromy and Kodaira types.
    #[command(subcommand)]
    Monodromy(MonodromyCmd),
    /// Run the acceptance criteria over the bundled fixtures.
    #[command(alias = "reproduce-paper")]
    Reproduce {
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 2016)]
        seed: u64,
        /// List the criteria without running them.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCmd {
    /// Vertices of the polar polytope.
    Polar,
    /// Dimension, reflexivity, face and point counts.
    Info,
    /// All lattice points.
    Points,
}

#[derive(Subcommand, Debug)]
pub enum FanCmd {
    /// Fan over the faces of the input polytope.
    FaceFan,
    /// Fan of normal cones of the input polytope.
    NormalFan,
    /// Check that a lattice map is a fan morphism and a fibration.
    FibrationCheck {
        /// Row-major integer matrix, rows separated by `;`.
        #[arg(long)]
        matrix: String,
        /// Fan JSON of the source.
        #[arg(long)]
        domain: PathBuf,
        /// Fan JSON of the target.
        #[arg(long)]
        codomain: PathBuf,
    },
    /// Sublattices whose slice of the polar of the input polytope is reflexive.
    Search {
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum CyCmd {
    /// Anticanonical hypersurface equation on the face fan of the polar.
    Hypersurface {
        /// all, vertices, or simplified.
        #[arg(long, default_value = "vertices")]
        mode: String,
    },
    /// Complete-intersection equations of a nef-partition (default: the bundled one).
    NefCi {
        #[arg(long, default_value = "vertices")]
        mode: String,
    },
    /// Hodge numbers h11, h21 of the anticanonical hypersurface.
    Hodge,
    /// GKZ degrees and the reindexed series of a two-part nef-partition.
    Gkz {
        #[arg(long, default_value_t = 4)]
        max_total: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum K3Cmd {
    /// Modular parameters π, σ of a K3 fibre.
    Params {
        /// y: parameters u, v, xi0, xi1; z: parameters s, t, B, psi0, psi1, psi_s.
        #[arg(long, default_value = "y")]
        model: String,
        /// name=value pairs, comma separated, e.g. `u=1,v=2,xi0=xi0,xi1=0`.
        #[arg(long)]
        at: String,
    },
    /// The complete-intersection parameters matched to a hypersurface.
    Match {
        #[arg(long, default_value = "B")]
        b: String,
        #[arg(long, default_value = "psi0")]
        psi0: String,
        #[arg(long, default_value = "psi1")]
        psi1: String,
    },
    /// Base points of singular fibres.
    Locus {
        #[arg(long)]
        xi0: String,
    },
    /// Components of the skeleton cut out by a direction (input: a 3-dimensional reflexive polytope).
    Ade {
        #[arg(long)]
        direction: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum MonodromyCmd {
    /// Permutation of roots along a loop.
    Track {
        /// JSON with `polynomial`, optional `y`, `x` and `params`.
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        center: String,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        base: String,
        /// Loop around infinity instead of a finite centre.
        #[arg(long)]
        infinity: bool,
    },
    /// Power of a local monodromy matrix and its Kodaira type.
    Kodaira {
        /// `a,b;c,d` with Gaussian rational entries.
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
}

/// Output of a command in both renderings.
pub struct Output {
    pub text: String,
    pub json: Value,
}

fn out(text: String, json: Value) -> Output {
    Output { text, json }
}

fn input(g: &Global) -> Result<&Path, CliError> {
    g.input.as_deref().ok_or_else(|| CliError::parse("missing --in"))
}

fn load_polytope(path: &Path) -> Result<LatticePolytope, CliError> {
    Ok(LatticePolytope::from_json(&read_json(path)?)?)
}

fn vectors_json(vs: &[LatticeVector]) -> Value {
    json!(vs.iter().map(|v| v.0.clone()).collect::<Vec<_>>())
}

fn vectors_text(vs: &[LatticeVector]) -> String {
    vs.iter().map(|v| format!("{v}\n")).collect()
}

/// Integer matrix from `a,b;c,d` or from a single row `a,b,c,d`.
pub fn parse_int_matrix(text: &str) -> Result<IntMatrix, CliError> {
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|e| CliError::parse(format!("matrix entry {x:?}: {e}"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(IntMatrix::from_i64(&rows)?)
}

fn parse_vector(text: &str) -> Result<LatticeVector, CliError> {
    let m = parse_int_matrix(text)?;
    Ok(m.row_vectors()?.remove(0))
}

fn fan_text(f: &Fan) -> String {
    let mut s = format!("rays: {}\ncones: {}\n", f.nrays(), f.ncones());
    for (i, r) in f.rays().iter().enumerate() {
        s.push_str(&format!("  {i}: {r}\n"));
    }
    for c in f.cones() {
        s.push_str(&format!("  {c:?}\n"));
    }
    s
}

fn polytope_cmd(g: &Global, c: &PolytopeCmd) -> Result<Output, CliError> {
    let p = load_polytope(input(g)?)?;
    Ok(match c {
        PolytopeCmd::Polar => {
            let q = p.polar()?;
            out(vectors_text(q.vertices()), q.to_json())
        }
        PolytopeCmd::Info => {
            let counts = p.face_counts();
            let reflexive = p.is_reflexive();
            let text = format!(
                "dim: {}\nvertices: {}\npoints: {}\nboundary points: {}\nreflexive: {reflexive}\nface counts: {counts:?}\n",
                p.dim(),
                p.vertices().len(),
                p.points().len(),
                p.boundary_points().len()
            );
            let json = json!({
                "dim": p.dim(),
                "vertices": p.vertices().len(),
                "points": p.points().len(),
                "boundary_points": p.boundary_points().len(),
                "reflexive": reflexive,
                "face_counts": counts,
            });
            out(text, json)
        }
        PolytopeCmd::Points => out(vectors_text(p.points()), json!({"points": vectors_json(p.points())})),
    })
}

/// The matrix in the row convention (`nrows` = domain rank). A single row
/// or a codomain × domain matrix is transposed when that is the only
/// shape that fits.
pub fn orient_matrix(m: IntMatrix, domain: usize, codomain: usize) -> IntMatrix {
    if m.nrows() == domain && m.ncols() == codomain {
        m
    } else if m.nrows() == codomain && m.ncols() == domain {
        m.transpose()
    } else {
        m
    }
}

fn fan_cmd(g: &Global, c: &FanCmd) -> Result<Output, CliError> {
    Ok(match c {
        FanCmd::FaceFan | FanCmd::NormalFan => {
            let p = load_polytope(input(g)?)?;
            let f = if matches!(c, FanCmd::FaceFan) { face_fan(&p)? } else { normal_fan(&p)? };
            out(fan_text(&f), f.to_json())
        }
        FanCmd::FibrationCheck { matrix, domain, codomain } => {
            let dom = Fan::from_json(&read_json(domain)?)?;
            let cod = Fan::from_json(&read_json(codomain)?)?;
            let m = orient_matrix(parse_int_matrix(matrix)?, dom.rank(), cod.rank());
            let phi = check_compatibility(&m, &dom, &cod)?;
            let failure = phi.fibration_failure();
            let mut text = format!("compatible: true\nfibration: {}\n", failure.is_none());
            if let Some(why) = &failure {
                text.push_str(&format!("reason: {why}\n"));
            }
            let mut json = json!({"compatible": true, "fibration": failure.is_none(), "reason": failure});
            if failure.is_none() {
                let (k, sub) = phi.kernel_fan()?;
                let rays: Vec<LatticeVector> = k.rays().iter().map(|r| sub.embed(r)).collect();
                let names: Vec<String> = (0..dom.nrays()).map(|i| format!("x{i}")).collect();
                let map = phi.homogeneous_map()?.render(&names);
                text.push_str(&format!("kernel rays: {}\nmap: {map}\n", rays.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")));
                json["kernel_rays"] = vectors_json(&rays);
                json["kernel_basis"] = vectors_json(&sub.basis_vectors());
                json["map"] = json!(map);
            }
            out(text, json)
        }
        FanCmd::Search { dim } => {
            let p = load_polytope(input(g)?)?;
            let found = search_fibrations(&p, *dim)?;
            let mut text = format!("candidates: {}\n", found.len());
            let mut items = Vec::new();
            for f in &found {
                let basis = f.subspace.basis_vectors();
                text.push_str(&format!(
                    "  basis {} slice vertices {} balanced {}\n",
                    basis.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" "),
                    f.slice.vertices().len(),
                    f.balanced
                ));
                items.push(json!({"basis": vectors_json(&basis), "slice_vertices": f.slice.vertices().len(), "balanced": f.balanced}));
            }
            out(text, json!({"candidates": items}))
        }
    })
}

fn mode(text: &str) -> Result<MonomialMode, CliError> {
    text.parse::<MonomialMode>().map_err(CliError::from)
}

fn names(n: usize, prefix: &str) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn polys_out(polys: &[SparsePoly]) -> Output {
    let rendered: Vec<String> = polys.iter().map(|p| p.render()).collect();
    out(rendered.iter().map(|r| format!("{r}\n")).collect(), json!({"polynomials": rendered}))
}

/// Nef-partition from `--in` (`{delta_polar: polytope, parts: [[vertex, ...], ...]}`)
/// or the bundled one.
fn load_nef(g: &Global) -> Result<NefPartition, CliError> {
    match &g.input {
        Some(path) => {
            let v = read_json(path)?;
            let polar = LatticePolytope::from_json(&v["delta_polar"])?;
            let parts: Vec<Vec<Vec<i64>>> =
                serde_json::from_value(v["parts"].clone()).map_err(|e| CliError::parse(format!("parts: {e}")))?;
            let parts: Vec<Vec<LatticeVector>> =
                parts.into_iter().map(|p| p.into_iter().map(LatticeVector).collect()).collect();
            Ok(NefPartition::from_vertex_parts(&polar.polar()?, &parts)?)
        }
        None => {
            let fx = Fixtures::load(&fixture_dir(g))?;
            let parts: Vec<Vec<LatticeVector>> =
                fx.nef_parts.iter().map(|p| p.iter().map(|&i| fx.nef_vertices[i].clone()).collect()).collect();
            Ok(NefPartition::from_vertex_parts(&fx.delta5_polar.polar()?, &parts)?)
        }
    }
}

fn cy_cmd(g: &Global, c: &CyCmd) -> Result<Output, CliError> {
    Ok(match c {
        CyCmd::Hypersurface { mode: m } => {
            let p = load_polytope(input(g)?)?;
            let f = face_fan(&p.polar()?)?;
            let vars = names(f.nrays(), "z");
            let coeffs = Coefficients::generic(p.points(), "a");
            polys_out(&[anticanonical_polynomial(&p, &f, &vars, mode(m)?, &coeffs)?])
        }
        CyCmd::NefCi { mode: m } => {
            let np = load_nef(g)?;
            let f = face_fan(np.polar())?;
            let vars = names(f.nrays(), "y");
            let coeffs: Vec<Coefficients> = (0..np.nparts())
                .map(|i| Coefficients::generic(&np.delta_i()[i].ambient_points(), &format!("c{i}_")))
                .collect();
            polys_out(&nef_ci_polynomials(&np, &f, &vars, mode(m)?, &coeffs)?)
        }
        CyCmd::Hodge => {
            let p = load_polytope(input(g)?)?;
            let (h11, h21) = batyrev_hodge(&p)?;
            out(format!("h11: {h11}\nh21: {h21}\n"), json!({"h11": h11, "h21": h21}))
        }
        CyCmd::Gkz { max_total } => {
            let dual = load_nef(g)?.dual()?;
            let mf = face_fan(dual.polar())?;
            let deg = gkz_degrees(&mf, &dual.ray_parts(&mf))?;
            let series = gkz_series_reindexed(&deg, *max_total)?;
            let mut text = String::from("degrees:\n");
            for r in &deg.rows {
                text.push_str(&format!("  {r:?}\n"));
            }
            text.push_str("coefficients:\n");
            for ((a, b), v) in &series.table {
                text.push_str(&format!("  ({a},{b}): {v}\n"));
            }
            let table: Vec<Value> =
                series.table.iter().map(|((a, b), v)| json!({"index": [a, b], "coefficient": v.to_string()})).collect();
            out(
                text,
                json!({
                    "degrees": deg.rows,
                    "columns": deg.columns.iter().map(|(p, v)| json!({"part": p, "point": v.0})).collect::<Vec<_>>(),
                    "origin": deg.origin_flags,
                    "coefficients": table,
                }),
            )
        }
    })
}

fn assignments(text: &str) -> Result<HashMap<String, ParamScalar>, CliError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::parse(format!("expected name=value, got {kv:?}")))?;
            Ok((k.trim().to_string(), parse_scalar(v.trim())?))
        })
        .collect()
}

fn take(m: &HashMap<String, ParamScalar>, name: &str) -> ParamScalar {
    m.get(name).cloned().unwrap_or_else(|| ParamScalar::param(name))
}

fn k3_cmd(g: &Global, c: &K3Cmd) -> Result<Output, CliError> {
    Ok(match c {
        K3Cmd::Params { model, at } => {
            let a = assignments(at)?;
            let mp = match model.as_str() {
                "y" => fibre_params_y(&take(&a, "u"), &take(&a, "v"), &take(&a, "xi0"), &take(&a, "xi1"))?,
                "z" => fibre_params_z(
                    &take(&a, "s"),
                    &take(&a, "t"),
                    &take(&a, "B"),
                    &take(&a, "psi0"),
                    &take(&a, "psi1"),
                    &take(&a, "psi_s"),
                )?,
                other => return Err(CliError::parse(format!("unknown model {other:?}"))),
            };
            let (pi, sigma) = (mp.pi.render(), mp.sigma.render());
            out(format!("pi: {pi}\nsigma: {sigma}\n"), json!({"pi": pi, "sigma": sigma}))
        }
        K3Cmd::Match { b, psi0, psi1 } => {
            let (x0, x1) = match_parameters(&parse_scalar(b)?, &parse_scalar(psi0)?, &parse_scalar(psi1)?)?;
            let (x0, x1) = (x0.render(), x1.render());
            out(format!("xi0: {x0}\nxi1: {x1}\n"), json!({"xi0": x0, "xi1": x1}))
        }
        K3Cmd::Locus { xi0 } => {
            let l = singular_fibre_locus(&parse_scalar(xi0)?)?;
            let finite: Vec<String> = l.finite.iter().map(|x| x.render()).collect();
            let ab = &l.alpha_beta;
            let pair = match ab.values() {
                Some((a, b)) => format!("{}, {}", a.render(), b.render()),
                None => format!("{} ± {}*sqrt({})", ab.center.render(), ab.scale.render(), ab.radicand.render()),
            };
            out(
                format!("finite: {}\nalpha, beta: {pair}\ninfinity: true\n", finite.join(", ")),
                json!({
                    "finite": finite,
                    "alpha_beta": {"center": ab.center.render(), "scale": ab.scale.render(), "radicand": ab.radicand.render()},
                    "values": ab.values().map(|(a, b)| vec![a.render(), b.render()]),
                }),
            )
        }
        K3Cmd::Ade { direction } => {
            let p = load_polytope(input(g)?)?;
            let a = ade_subgraph(&p, &parse_vector(direction)?)?;
            let mut text = format!("components: {}\nsizes: {:?}\n", a.components.len(), a.sizes());
            for comp in &a.components {
                text.push_str(&format!("  {}\n", comp.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")));
            }
            let comps: Vec<Value> = a.components.iter().map(|c| vectors_json(c)).collect();
            out(text, json!({"components": comps, "edges": a.edges.len()}))
        }
    })
}

fn complex(text: &str) -> Result<Complex64, CliError> {
    let z: GaussRat = parse_gauss(text)?;
    Ok(Complex64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)))
}

/// A root family from `{polynomial, y?, x?, params?}`.
pub fn load_family(path: &Path) -> Result<RootFamily, CliError> {
    let v = read_json(path)?;
    let text = v["polynomial"].as_str().ok_or_else(|| CliError::parse("family: missing \"polynomial\""))?;
    let y = v["y"].as_str().unwrap_or("y");
    let x = v["x"].as_str().unwrap_or("x");
    let vars = vec![y.to_string(), x.to_string()];
    let mut params = HashMap::new();
    if let Some(obj) = v["params"].as_object() {
        for (k, val) in obj {
            let s = match val {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            params.insert(k.clone(), parse_scalar(&s)?);
        }
    }
    let p = SparsePoly::parse(text, &vars)?.substitute_params(&params)?;
    Ok(RootFamily::from_poly(&p, y, x)?)
}

fn monodromy_cmd(g: &Global, c: &MonodromyCmd) -> Result<Output, CliError> {
    Ok(match c {
        MonodromyCmd::Track { family, center, radius, base, infinity } => {
            let f = load_family(family)?;
            let base = parse_gauss(base)?;
            let lp = if *infinity {
                Loop::around_infinity(base, complex(center)?, *radius)
            } else {
                Loop::new(base, complex(center)?, *radius)
            };
            let r = track_roots(&f, &lp, TrackOptions { precision: g.precision, ..TrackOptions::default() })?;
            let cycles = perm::cycles(&r.perm);
            out(
                format!("permutation: {cycles}\nsteps: {}\nresidual: {:.3e}\n", r.steps, r.residual),
                json!({"permutation": r.perm, "cycles": cycles, "steps": r.steps, "residual": format!("{:.3e}", r.residual)}),
            )
        }
        MonodromyCmd::Kodaira { matrix, power } => {
            let m = power_monodromy(&MonodromyMatrix::parse(matrix)?, *power);
            let kind = classify_kodaira(&m)?.to_string();
            out(
                format!("power: {}\ntype: {kind}\n", m.render()),
                json!({"power": m.render(), "type": kind}),
            )
        }
    })
}

fn fixture_dir(g: &Global) -> PathBuf {
    g.fixtures.clone().unwrap_or_else(default_dir)
}

/// Run a parsed command. `Ok` carries the rendered output and the exit code.
pub fn execute(cli: &Cli) -> Result<(String, i32), CliError> {
    let g = &cli.global;
    let output = match &cli.command {
        Command::Polytope(c) => polytope_cmd(g, c)?,
        Command::Fan(c) => fan_cmd(g, c)?,
        Command::Cy(c) => cy_cmd(g, c)?,
        Command::K3(c) => k3_cmd(g, c)?,
        Command::Monodromy(c) => monodromy_cmd(g, c)?,
        Command::Reproduce { seed, list } => {
            if *list {
                let text: String = reproduce::CRITERIA
                    .iter()
                    .map(|c| format!("{:>2} {:<18} {}\n", c.id, c.name, c.title))
                    .collect();
                return Ok((text, 0));
            }
            let ctx = Context::new(Fixtures::load(&fixture_dir(g))?, g.precision, *seed);
            let reports = reproduce::run(&ctx, g.only.as_deref())?;
            let code = if reports.iter().all(|r| r.passed) { 0 } else { 3 };
            let rendered = if g.json {
                canonical_json(&json!({
                    "passed": code == 0,
                    "criteria": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
                    "first_failure": reports.iter().find(|r| !r.passed).map(|r| r.name),
                }))
            } else {
                reproduce::render_table(&reports)
            };
            return Ok((rendered, code));
        }
    };
    Ok((if g.json { canonical_json(&output.json) } else { output.text }, 0))
}

/// Write to `--out` or stdout.
pub fn emit(g: &Global, text: &str) -> Result<(), CliError> {
    match &g.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_shapes() {
        let m = parse_int_matrix("1,0,2;0,1,3").unwrap();
        assert_eq!((m.nrows(), m.ncols()), (2, 3));
        let o = orient_matrix(m.clone(), 3, 2);
        assert_eq!((o.nrows(), o.ncols()), (3, 2));
        assert_eq!(orient_matrix(m.clone(), 2, 3), m);
        assert_eq!(parse_int_matrix("1,x").unwrap_err().exit, 1);
    }
}
