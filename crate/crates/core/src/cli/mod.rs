//! Command-line front end. Every command prints one JSON report on stdout;
//! diagnostics go to stderr. Exit codes: 0 success, 1 a "none" or failed
//! verdict, 2 bad input.

pub mod golden;
pub mod spec;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::group::Representation;
use crate::invariants::{generators, molien, relations, InvariantBasis, RelationSet};
use crate::lifting::{
    fiber, lift_along_path, monodromy, FiberOptions, LiftError, PathFile, PathSpec, TrackOptions,
};
use crate::quasiiso::{find_quasi_isomorphism, verify_quasi_isomorphism, QuasiIsoOutcome};
use crate::quasilinear::{
    convergence_table, drop_low_terms, is_quasilinear, maps_y_to_z, quasilinear_part, MapFile,
    QuasiError, QuotientMap,
};
use crate::strata::{real_membership, sample_quotient_points, stratify, MembershipOptions, RealMembership};

pub use spec::{load_spec, matrix_literal, parse_spec, spec_json, SpecError};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "invquot", version, about = "Invariants, quotients and lifts of finite linear groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// degree cap for generators or relations
    #[arg(long, global = true)]
    cap: Option<u32>,
    /// numeric tolerance
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// last degree of the reported Molien series
    #[arg(long = "max-degree", global = true)]
    max_degree: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generators of the invariant ring and the Molien series
    Invariants { spec: PathBuf },
    /// Isotropy strata and codimension-one components
    Strata { spec: PathBuf },
    /// Relations among the generators up to the degree cap
    Relations { spec: PathBuf },
    /// Decide whether two representations are quasi-isomorphic
    QuasiIso { source: PathBuf, target: PathBuf },
    /// Drop low-order terms of a map Y → Z and report its quasilinearization
    Quasilinearize {
        source: PathBuf,
        target: PathBuf,
        map: PathBuf,
    },
    /// Certify a real point of Y through a real form W_h
    RealMembership {
        spec: PathBuf,
        /// comma-separated real coordinates
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        point: Vec<f64>,
    },
    /// Lift f ∘ p along a path in V to W
    Lift {
        source: PathBuf,
        target: PathBuf,
        path: PathBuf,
        /// map file; the identity if omitted
        #[arg(long)]
        map: Option<PathBuf>,
        /// starting point in W as JSON [[re, im], ...]
        #[arg(long)]
        start: Option<String>,
    },
    /// Deck transformation of a closed loop in the quotient
    Monodromy {
        spec: PathBuf,
        #[arg(value_name = "LOOP")]
        lp: PathBuf,
        #[arg(long)]
        start: Option<String>,
    },
    /// Run the shipped golden suite
    Corpus,
}

#[derive(Serialize, Debug, Clone)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub results: Value,
    pub tool_version: String,
    pub seed: u64,
}

/// Exit code with captured output streams.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    cap: Option<u32>,
    tol: f64,
    seed: u64,
    max_degree: Option<usize>,
    hasher: Sha256,
}

impl Ctx {
    fn absorb(&mut self, label: &str, bytes: &[u8]) {
        self.hasher.update((label.len() as u64).to_le_bytes());
        self.hasher.update(label.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    fn read(&mut self, path: &Path) -> Result<String, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
        self.absorb("file", text.as_bytes());
        Ok(text)
    }

    fn spec(&mut self, path: &Path) -> Result<Representation, String> {
        let text = self.read(path)?;
        parse_spec(&text).map_err(|e| format!("{}: {}", path.display(), e))
    }

    fn basis(&self, rep: &Representation) -> Result<InvariantBasis, String> {
        generators(rep, self.cap.map(|c| c as usize)).map_err(|e| e.to_string())
    }

    fn relations(&self, basis: &InvariantBasis, at_least: u32) -> Result<RelationSet, String> {
        let top = basis.degrees().iter().copied().max().unwrap_or(1);
        let cap = self.cap.unwrap_or((2 * top).max(at_least));
        relations(basis, cap).map_err(|e| e.to_string())
    }
}

/// What a command produced: results, and whether the verdict is a success.
type Produced = Result<(Value, bool), String>;

fn cjson(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|c| json!([c.re, c.im])).collect())
}

fn parse_point(s: &str) -> Result<Vec<Complex64>, String> {
    let raw: Vec<[f64; 2]> =
        serde_json::from_str(s).map_err(|e| format!("--start: expected [[re, im], ...]: {}", e))?;
    Ok(raw.into_iter().map(|[a, b]| Complex64::new(a, b)).collect())
}

fn group_summary(rep: &Representation) -> Value {
    json!({
        "name": rep.name(),
        "order": rep.order(),
        "dimension": rep.dim(),
        "conductor": rep.conductor(),
        "field": spec_json(rep)["field"].clone(),
    })
}

fn polys(ps: &[crate::poly::Poly], var: &str) -> Value {
    json!({
        "rendered": ps.iter().map(|p| p.render(var)).collect::<Vec<_>>(),
        "exact": ps.iter().map(|p| p.to_json_terms()).collect::<Vec<_>>(),
    })
}

fn cmd_invariants(ctx: &mut Ctx, path: &Path) -> Produced {
    let rep = ctx.spec(path)?;
    let basis = ctx.basis(&rep)?;
    let top = ctx.max_degree.unwrap_or(basis.degree_cap());
    let series = molien(&rep, top).map_err(|e| e.to_string())?;
    Ok((
        json!({
            "group": group_summary(&rep),
            "degrees": basis.degrees(),
            "generators": polys(basis.gens(), "x"),
            "molien": series,
            "degree_cap": basis.degree_cap(),
            "certified_complete": basis.is_certified_complete(),
        }),
        true,
    ))
}

fn cmd_strata(ctx: &mut Ctx, path: &Path) -> Produced {
    let rep = ctx.spec(path)?;
    let basis = ctx.basis(&rep)?;
    let strat = stratify(&basis).map_err(|e| e.to_string())?;
    let codim_one: Vec<Value> = strat
        .codim_one()
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "class_index": c.class_index,
                "order": c.order,
                "pseudoreflection": matrix_literal(rep.element(c.pseudoreflection)),
            })
        })
        .collect();
    Ok((
        json!({
            "group": group_summary(&rep),
            "strata": strat.strata(),
            "codim_one": codim_one,
            "reflection_hyperplanes": strat.reflection_locus().len(),
            "deep_locus_dims": strat.deep_locus().iter().map(|s| s.dim()).collect::<Vec<_>>(),
        }),
        true,
    ))
}

fn cmd_relations(ctx: &mut Ctx, path: &Path) -> Produced {
    let rep = ctx.spec(path)?;
    let basis = ctx.basis(&rep)?;
    let rel = ctx.relations(&basis, 0)?;
    Ok((
        json!({
            "group": group_summary(&rep),
            "generator_degrees": basis.degrees(),
            "generators": polys(basis.gens(), "x"),
            "relations": polys(rel.relations(), "y"),
            "relation_degrees": rel.degrees(),
            "weighted_degree_bound": rel.weighted_degree_bound(),
        }),
        true,
    ))
}

fn cmd_quasi_iso(ctx: &mut Ctx, a: &Path, b: &Path) -> Produced {
    let g = ctx.spec(a)?;
    let h = ctx.spec(b)?;
    match find_quasi_isomorphism(&g, &h, ctx.seed).map_err(|e| e.to_string())? {
        QuasiIsoOutcome::Found(q) => {
            let report = verify_quasi_isomorphism(&g, &h, &q, 8, ctx.seed).map_err(|e| e.to_string())?;
            let ok = report.passed();
            Ok((
                json!({
                    "verdict": "found",
                    "witness": matrix_literal(&q.l),
                    "group_isomorphism": q.iso.image_of,
                    "verification": report,
                }),
                ok,
            ))
        }
        QuasiIsoOutcome::None(cert) => Ok((json!({"verdict": "none", "certificate": cert}), false)),
    }
}

fn cmd_quasilinearize(ctx: &mut Ctx, a: &Path, b: &Path, map: &Path) -> Produced {
    let ry = ctx.spec(a)?;
    let rz = ctx.spec(b)?;
    let text = ctx.read(map)?;
    let file: MapFile = serde_json::from_str(&text).map_err(|e| format!("{}: {}", map.display(), e))?;
    let (by, bz) = (ctx.basis(&ry)?, ctx.basis(&rz)?);
    let f = QuotientMap::from_file(&file, by.weights().clone(), bz.weights().clone())
        .map_err(|e| format!("{}: {}", map.display(), e))?;
    let top_z = bz.degrees().iter().copied().max().unwrap_or(1);
    let rel_y = ctx.relations(&by, top_z)?;
    let rel_z = ctx.relations(&bz, 0)?;
    let dropped = match drop_low_terms(&f, &rel_y) {
        Ok(d) => d,
        Err(QuasiError::LowOrderObstruction(defects)) => {
            return Ok((json!({"verdict": "obstructed", "defects": defects}), false))
        }
        Err(e) => return Err(e.to_string()),
    };
    let f0 = quasilinear_part(&dropped);
    let samples = sample_quotient_points(&by, 16, 1.0, ctx.seed).map_err(|e| e.to_string())?;
    let table = convergence_table(&dropped, &samples, &[0.5, 0.25, 0.125, 0.0625]);
    let verdict = maps_y_to_z(&f0, &rel_y, &rel_z, 16, ctx.tol, ctx.seed).map_err(|e| e.to_string())?;
    let ok = verdict.passes;
    Ok((
        json!({
            "verdict": if ok { "quasilinear" } else { "not_a_map_of_quotients" },
            "low_terms_dropped": dropped != f,
            "quasilinear_part": polys(f0.components(), "y"),
            "is_quasilinear": is_quasilinear(&f0),
            "maps_y_to_z": verdict,
            "convergence": table,
        }),
        ok,
    ))
}

fn cmd_real_membership(ctx: &mut Ctx, path: &Path, point: &[f64]) -> Produced {
    let rep = ctx.spec(path)?;
    ctx.absorb("point", format!("{:?}", point).as_bytes());
    let basis = ctx.basis(&rep)?;
    let rel = ctx.relations(&basis, 0)?;
    let opts = MembershipOptions {
        tol: ctx.tol,
        seed: ctx.seed,
        ..MembershipOptions::default()
    };
    Ok(match real_membership(&rel, point, opts).map_err(|e| e.to_string())? {
        RealMembership::Certified(c) => {
            let h = matrix_literal(rep.element(c.h));
            (json!({"verdict": "certified", "h_matrix": h, "certificate": c}), true)
        }
        RealMembership::NotOnY { residual } => (json!({"verdict": "not_on_y", "residual": residual}), false),
        RealMembership::NoCertificate { best_residual } => (
            json!({"verdict": "no_certificate", "best_residual": best_residual}),
            false,
        ),
    })
}

fn is_input_error(e: &LiftError) -> bool {
    matches!(
        e,
        LiftError::Arity { .. }
            | LiftError::Path(_)
            | LiftError::WeightMismatch
            | LiftError::SeedOffFiber { .. }
            | LiftError::Strata(_)
            | LiftError::Quasi(_)
    )
}

fn track_opts(ctx: &Ctx) -> TrackOptions {
    TrackOptions {
        residual_tol: ctx.tol,
        seed: ctx.seed,
        ..TrackOptions::default()
    }
}

fn read_path(ctx: &mut Ctx, p: &Path) -> Result<PathSpec, String> {
    let text = ctx.read(p)?;
    let file: PathFile = serde_json::from_str(&text).map_err(|e| format!("{}: {}", p.display(), e))?;
    PathSpec::from_file(&file).map_err(|e| format!("{}: {}", p.display(), e))
}

fn start_point(
    ctx: &mut Ctx,
    start: Option<&str>,
    basis: &InvariantBasis,
    z: &[Complex64],
) -> Result<Vec<Complex64>, String> {
    match start {
        Some(s) => {
            ctx.absorb("start", s.as_bytes());
            parse_point(s)
        }
        None => {
            let fib = fiber(basis, z, FiberOptions { seed: ctx.seed, ..FiberOptions::default() })
                .map_err(|e| e.to_string())?;
            Ok(fib[0].clone())
        }
    }
}

fn cmd_lift(
    ctx: &mut Ctx,
    a: &Path,
    b: &Path,
    path: &Path,
    map: Option<&Path>,
    start: Option<&str>,
) -> Produced {
    let rv = ctx.spec(a)?;
    let rw = ctx.spec(b)?;
    let gamma = read_path(ctx, path)?;
    let (bv, bw) = (ctx.basis(&rv)?, ctx.basis(&rw)?);
    let f = match map {
        Some(m) => {
            let text = ctx.read(m)?;
            let file: MapFile = serde_json::from_str(&text).map_err(|e| format!("{}: {}", m.display(), e))?;
            QuotientMap::from_file(&file, bv.weights().clone(), bw.weights().clone())
                .map_err(|e| format!("{}: {}", m.display(), e))?
        }
        None if bv.weights() == bw.weights() => {
            QuotientMap::identity(bv.weights().clone(), crate::exact::lcm(rv.conductor(), rw.conductor()))
        }
        None => return Err("--map is required when the generator degrees differ".into()),
    };
    let (sv, sw) = (
        stratify(&bv).map_err(|e| e.to_string())?,
        stratify(&bw).map_err(|e| e.to_string())?,
    );
    if gamma.dim() != rv.dim() {
        return Err(format!("path has {} coordinates, expected {}", gamma.dim(), rv.dim()));
    }
    let z0 = f.numeric().eval(&bv.numeric_map().eval(&gamma.point(0.0)));
    let seed = start_point(ctx, start, &bw, &z0)?;
    match lift_along_path(&sv, &sw, &f, &gamma, &seed, track_opts(ctx)) {
        Ok(l) => {
            let ok = l.max_residual() <= ctx.tol;
            Ok((
                json!({
                    "verdict": if ok { "lifted" } else { "inaccurate" },
                    "start": cjson(&seed),
                    "end": cjson(l.end()),
                    "samples": l.ts.len(),
                    "max_residual": l.max_residual(),
                    "wall_events": l.wall_events,
                    "upstairs": l.upstairs.iter().map(|w| cjson(w)).collect::<Vec<_>>(),
                }),
                ok,
            ))
        }
        Err(e) if is_input_error(&e) => Err(e.to_string()),
        Err(e) => Ok((json!({"verdict": "refused", "reason": e.to_string()}), false)),
    }
}

fn cmd_monodromy(ctx: &mut Ctx, path: &Path, lp: &Path, start: Option<&str>) -> Produced {
    let rep = ctx.spec(path)?;
    let lp = read_path(ctx, lp)?;
    let basis = ctx.basis(&rep)?;
    let base = start_point(ctx, start, &basis, &lp.waypoints[0])?;
    match monodromy(&basis, &lp, &base, track_opts(ctx)) {
        Ok(m) => Ok((
            json!({
                "verdict": "ok",
                "start": cjson(&base),
                "element": m.element,
                "element_matrix": matrix_literal(rep.element(m.element)),
                "mismatch": m.mismatch,
                "samples": m.lifted.ts.len(),
            }),
            true,
        )),
        Err(e) if is_input_error(&e) => Err(e.to_string()),
        Err(e) => Ok((json!({"verdict": "refused", "reason": e.to_string()}), false)),
    }
}

/// Runs one invocation; `args[0]` is the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut ctx = Ctx {
        cap: cli.cap,
        tol: cli.tol,
        seed: cli.seed,
        max_degree: cli.max_degree,
        hasher: Sha256::new(),
    };
    let name = match &cli.command {
        Command::Invariants { .. } => "invariants",
        Command::Strata { .. } => "strata",
        Command::Relations { .. } => "relations",
        Command::QuasiIso { .. } => "quasi-iso",
        Command::Quasilinearize { .. } => "quasilinearize",
        Command::RealMembership { .. } => "real-membership",
        Command::Lift { .. } => "lift",
        Command::Monodromy { .. } => "monodromy",
        Command::Corpus => "corpus",
    };
    ctx.absorb("command", name.as_bytes());
    ctx.absorb(
        "flags",
        format!("{:?}|{:e}|{}|{:?}", cli.cap, cli.tol, cli.seed, cli.max_degree).as_bytes(),
    );
    let produced = match &cli.command {
        Command::Invariants { spec } => cmd_invariants(&mut ctx, spec),
        Command::Strata { spec } => cmd_strata(&mut ctx, spec),
        Command::Relations { spec } => cmd_relations(&mut ctx, spec),
        Command::QuasiIso { source, target } => cmd_quasi_iso(&mut ctx, source, target),
        Command::Quasilinearize { source, target, map } => cmd_quasilinearize(&mut ctx, source, target, map),
        Command::RealMembership { spec, point } => cmd_real_membership(&mut ctx, spec, point),
        Command::Lift { source, target, path, map, start } => {
            cmd_lift(&mut ctx, source, target, path, map.as_deref(), start.as_deref())
        }
        Command::Monodromy { spec, lp, start } => cmd_monodromy(&mut ctx, spec, lp, start.as_deref()),
        Command::Corpus => {
            ctx.absorb("manifest", golden::MANIFEST.as_bytes());
            Ok(golden::run(ctx.seed))
        }
    };
    match produced {
        Err(msg) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {}\n", msg),
        },
        Ok((results, ok)) => {
            let report = Report {
                command: name.into(),
                inputs_digest: format!("{:x}", ctx.hasher.finalize()),
                results,
                tool_version: TOOL_VERSION.into(),
                seed: cli.seed,
            };
            let mut stdout = serde_json::to_string_pretty(&report).expect("serializable");
            stdout.push('\n');
            Outcome {
                code: if ok { 0 } else { 1 },
                stdout,
                stderr: String::new(),
            }
        }
    }
}
