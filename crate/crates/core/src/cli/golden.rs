//! The shipped golden suite: specs under `corpus/` and the expectations in
//! `corpus/golden.json`.

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use super::spec::parse_spec;
use crate::group::Representation;
use crate::invariants::{generators, molien, relations};
use crate::lifting::{lift_along_path, monodromy, PathSpec, TrackOptions};
use crate::quasiiso::{find_quasi_isomorphism, verify_quasi_isomorphism, QuasiIsoOutcome};
use crate::quasilinear::QuotientMap;
use crate::strata::{real_membership, stratify, MembershipOptions, RealMembership};

pub const MANIFEST: &str = include_str!("../../corpus/golden.json");

macro_rules! specs {
    ($($f:literal),* $(,)?) => {
        &[$(($f, include_str!(concat!("../../corpus/", $f)))),*]
    };
}

/// Shipped spec files by name.
pub const SPECS: &[(&str, &str)] = specs![
    "neg1.json",
    "zk2.json",
    "zk3.json",
    "zk4.json",
    "zk6.json",
    "d8.json",
    "d8conj.json",
    "d12.json",
    "negI.json",
    "reflX.json",
    "klein.json",
    "cyc2.json",
    "cyc3.json",
    "cyc4.json",
    "q8.json",
];

pub fn spec_text(name: &str) -> Option<&'static str> {
    SPECS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load(name: &str) -> Result<Representation, String> {
    let text = spec_text(name).ok_or_else(|| format!("no corpus spec {}", name))?;
    parse_spec(text).map_err(|e| format!("{}: {}", name, e))
}

#[derive(Deserialize)]
struct Manifest {
    cases: Vec<Case>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum Case {
    Invariants {
        name: String,
        spec: String,
        order: usize,
        degrees: Vec<u32>,
        #[serde(default)]
        relations: Option<Vec<String>>,
        #[serde(default)]
        relation_degrees: Option<Vec<u32>>,
        codim_one_orders: Vec<u32>,
        #[serde(default)]
        molien: Option<Vec<u64>>,
    },
    QuasiIso {
        name: String,
        source: String,
        target: String,
        verdict: String,
    },
    RealMembership {
        name: String,
        spec: String,
        point: Vec<f64>,
        h_identity: bool,
    },
    Monodromy {
        name: String,
        spec: String,
        winding: i32,
    },
    WallCrossing {
        name: String,
        spec: String,
        r: u32,
        branches: usize,
    },
}

fn check(cond: bool, what: impl Into<String>, problems: &mut Vec<String>) {
    if !cond {
        problems.push(what.into());
    }
}

fn run_case(case: &Case, seed: u64) -> Result<Vec<String>, String> {
    let mut problems = Vec::new();
    match case {
        Case::Invariants {
            spec,
            order,
            degrees,
            relations: rels,
            relation_degrees,
            codim_one_orders,
            molien: series,
            ..
        } => {
            let rep = load(spec)?;
            check(rep.order() == *order, format!("order {} != {}", rep.order(), order), &mut problems);
            let basis = generators(&rep, None).map_err(|e| e.to_string())?;
            check(
                basis.degrees() == degrees.as_slice(),
                format!("degrees {:?} != {:?}", basis.degrees(), degrees),
                &mut problems,
            );
            let top = basis.degrees().iter().copied().max().unwrap_or(1);
            let rel = relations(&basis, 2 * top).map_err(|e| e.to_string())?;
            if let Some(expected) = rels {
                let got: Vec<String> = rel.relations().iter().map(|p| p.render("y")).collect();
                check(&got == expected, format!("relations {:?} != {:?}", got, expected), &mut problems);
            }
            if let Some(expected) = relation_degrees {
                check(
                    rel.degrees() == expected.as_slice(),
                    format!("relation degrees {:?} != {:?}", rel.degrees(), expected),
                    &mut problems,
                );
            }
            let strat = stratify(&basis).map_err(|e| e.to_string())?;
            let mut orders: Vec<u32> = strat.codim_one().iter().map(|c| c.order).collect();
            orders.sort_unstable();
            check(
                &orders == codim_one_orders,
                format!("codim-one orders {:?} != {:?}", orders, codim_one_orders),
                &mut problems,
            );
            if let Some(expected) = series {
                let got = molien(&rep, expected.len() - 1).map_err(|e| e.to_string())?;
                check(&got == expected, format!("molien {:?} != {:?}", got, expected), &mut problems);
            }
        }
        Case::QuasiIso { source, target, verdict, .. } => {
            let (g, h) = (load(source)?, load(target)?);
            match find_quasi_isomorphism(&g, &h, seed).map_err(|e| e.to_string())? {
                QuasiIsoOutcome::Found(q) => {
                    check(verdict == "found", "found a witness, expected none", &mut problems);
                    let report = verify_quasi_isomorphism(&g, &h, &q, 4, seed).map_err(|e| e.to_string())?;
                    check(report.passed(), format!("verification failed: {:?}", report.failures), &mut problems);
                }
                QuasiIsoOutcome::None(_) => check(verdict == "none", "no witness found", &mut problems),
            }
        }
        Case::RealMembership { spec, point, h_identity, .. } => {
            let basis = generators(&load(spec)?, None).map_err(|e| e.to_string())?;
            let top = basis.degrees().iter().copied().max().unwrap_or(1);
            let rel = relations(&basis, 2 * top).map_err(|e| e.to_string())?;
            let opts = MembershipOptions { seed, ..MembershipOptions::default() };
            match real_membership(&rel, point, opts).map_err(|e| e.to_string())? {
                RealMembership::Certified(c) => check(
                    (c.h == 0) == *h_identity,
                    format!("certified with h = element {}", c.h),
                    &mut problems,
                ),
                _ => problems.push("not certified".into()),
            }
        }
        Case::Monodromy { spec, winding, .. } => {
            let rep = load(spec)?;
            let basis = generators(&rep, None).map_err(|e| e.to_string())?;
            let gen = rep.index_of(&rep.generators()[0]).ok_or("generator not found")?;
            let mut expected = 0;
            for _ in 0..winding.rem_euclid(rep.order() as i32) {
                expected = rep.mul(expected, gen);
            }
            let lp = PathSpec::circle(Complex64::new(0.0, 0.0), 1.0, *winding, 64, 2);
            let opts = TrackOptions { seed, ..TrackOptions::default() };
            let m = monodromy(&basis, &lp, &[Complex64::new(1.0, 0.0)], opts).map_err(|e| e.to_string())?;
            check(m.element == expected, format!("element {} != {}", m.element, expected), &mut problems);
        }
        Case::WallCrossing { spec, r, branches, .. } => {
            let rep = load(spec)?;
            let basis = generators(&rep, None).map_err(|e| e.to_string())?;
            let strat = stratify(&basis).map_err(|e| e.to_string())?;
            let f = QuotientMap::identity(basis.weights().clone(), rep.conductor());
            let c = |x: f64| vec![Complex64::new(x, 0.0)];
            let path = PathSpec::new(vec![c(-1.0), c(1.0)], 50, false).map_err(|e| e.to_string())?;
            let opts = TrackOptions { seed, ..TrackOptions::default() };
            let l = lift_along_path(&strat, &strat, &f, &path, &c(-1.0), opts).map_err(|e| e.to_string())?;
            check(l.wall_events.len() == 1, format!("{} wall events", l.wall_events.len()), &mut problems);
            if let Some(ev) = l.wall_events.first() {
                check(ev.r == *r, format!("r = {}", ev.r), &mut problems);
                check(
                    ev.admissible_branches == *branches,
                    format!("{} branches", ev.admissible_branches),
                    &mut problems,
                );
            }
            check(l.max_residual() <= 1e-8, "residual above 1e-8", &mut problems);
        }
    }
    Ok(problems)
}

fn case_name(case: &Case) -> (&str, &str) {
    match case {
        Case::Invariants { name, .. } => (name, "invariants"),
        Case::QuasiIso { name, .. } => (name, "quasi-iso"),
        Case::RealMembership { name, .. } => (name, "real-membership"),
        Case::Monodromy { name, .. } => (name, "monodromy"),
        Case::WallCrossing { name, .. } => (name, "wall-crossing"),
    }
}

/// Runs every case; returns the results payload and whether all passed.
pub fn run(seed: u64) -> (Value, bool) {
    let manifest: Manifest = serde_json::from_str(MANIFEST).expect("shipped manifest parses");
    let mut rows = Vec::new();
    let mut failed = 0;
    for case in &manifest.cases {
        let (name, kind) = case_name(case);
        let (passed, detail) = match run_case(case, seed) {
            Ok(p) if p.is_empty() => (true, Value::Null),
            Ok(p) => (false, json!(p)),
            Err(e) => (false, json!([e])),
        };
        if !passed {
            failed += 1;
        }
        rows.push(json!({"name": name, "kind": kind, "passed": passed, "problems": detail}));
    }
    let total = rows.len();
    (
        json!({"cases": rows, "passed": total - failed, "failed": failed, "total": total}),
        failed == 0,
    )
}
