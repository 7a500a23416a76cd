//! Acceptance criteria 1–10. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use invquot::corpus;
use invquot::exact::{CycloScalar, ExactMatrix};
use invquot::group::Representation;
use invquot::invariants::{generators, molien, relations, InvariantBasis, PolySpan};
use invquot::lifting::{lift_along_path, monodromy, PathSpec, TrackOptions};
use invquot::poly::{Monomial, Poly, WeightSystem};
use invquot::quasiiso::{find_quasi_isomorphism, verify_quasi_isomorphism, NoneCertificate, QuasiIsoOutcome};
use invquot::quasilinear::{
    convergence_table, drop_low_terms, is_quasilinear, quasilinear_part, QuotientMap,
};
use invquot::strata::{real_membership, sample_quotient_points, stratify, MembershipOptions, RealMembership};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:?}, limit {:?}", t, limit))?;
    Ok(t)
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let rep = corpus::sign_line();
    let basis = generators(&rep, None).map_err(|e| e.to_string())?;
    ensure(basis.len() == 1 && basis.degrees() == [2], || format!("degrees {:?}", basis.degrees()))?;
    let x2 = Poly::var(1, 0, 1).pow(2);
    let g = &basis.gens()[0];
    let lead = g.coeff(&Monomial::new(vec![2]));
    ensure(!lead.is_zero() && *g == x2.scale(&lead), || format!("generator {} is not a multiple of x²", g))?;
    let strat = stratify(&basis).map_err(|e| e.to_string())?;
    ensure(strat.codim_one().len() == 1, || format!("{} codim-one components", strat.codim_one().len()))?;
    let comp = &strat.codim_one()[0];
    ensure(comp.order == 2, || format!("r = {}", comp.order))?;
    let fixed = &strat.classes()[comp.class_index].representative().fixed_space;
    ensure(fixed.is_empty(), || "component is not the origin".into())?;
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("generator {}, one codim-one component r = 2 at the origin ({:.0?})", g, t))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    for k in [2u32, 3, 4, 6] {
        let rep = corpus::rotations(k);
        let basis = generators(&rep, None).map_err(|e| e.to_string())?;
        ensure(basis.degrees() == [2, k, k], || format!("k = {}: degrees {:?}", k, basis.degrees()))?;
        let rel = relations(&basis, 2 * k + 2).map_err(|e| e.to_string())?;
        ensure(rel.relations().len() == 1, || format!("k = {}: {} relations", k, rel.relations().len()))?;
        ensure(rel.degrees() == [2 * k], || format!("k = {}: relation degree {:?}", k, rel.degrees()))?;
        // oracle: y₂² + y₃² − y₁ᵏ
        let n = rep.conductor();
        let one = CycloScalar::one(n);
        let target = Poly::from_terms(
            3,
            n,
            vec![
                (Monomial::new(vec![0, 2, 0]), one.clone()),
                (Monomial::new(vec![0, 0, 2]), one.clone()),
                (Monomial::new(vec![k, 0, 0]), -&one),
            ],
        )
        .map_err(|e| e.to_string())?;
        let r = &rel.relations()[0];
        let unit = r.coeff(&Monomial::new(vec![0, 2, 0]));
        ensure(!unit.is_zero() && *r == target.scale(&unit), || format!("k = {}: relation {}", k, r))?;
        let strat = stratify(&basis).map_err(|e| e.to_string())?;
        ensure(strat.codim_one().is_empty(), || format!("k = {}: codim-one components present", k))?;
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!("k = 2, 3, 4, 6: degrees {{2,k,k}}, single relation y2²+y3²−y1^k, no codim-one strata ({:.1?})", t))
}

/// dim of degree-d invariants as the common kernel of g − 1 over the generators.
fn kernel_invariant_dim(rep: &Representation, d: u32) -> usize {
    let n = rep.conductor();
    let mons: Vec<Monomial> = WeightSystem::standard(rep.dim()).monomials_of_degree(d).collect();
    let mut blocks = Vec::new();
    for g in rep.generators() {
        let mut a = ExactMatrix::zeros(mons.len(), mons.len(), n);
        for (j, m) in mons.iter().enumerate() {
            let f = Poly::term(m.clone(), CycloScalar::one(n));
            let diff = f.act_linear(g).unwrap().checked_sub(&f).unwrap();
            for (i, mi) in mons.iter().enumerate() {
                a.set(i, j, diff.coeff(mi));
            }
        }
        blocks.push(a);
    }
    ExactMatrix::vstack(&blocks).unwrap().kernel().len()
}

fn generated_dim(basis: &InvariantBasis, d: u32) -> usize {
    let rep = basis.rep();
    let mons: Vec<Monomial> = WeightSystem::standard(rep.dim()).monomials_of_degree(d).collect();
    let mut span = PolySpan::new(rep.dim(), rep.conductor(), mons);
    for alpha in basis.weights().monomials_of_degree(d) {
        let y = Poly::term(alpha, CycloScalar::one(rep.conductor()));
        span.insert(&y.compose(basis.gens()).unwrap());
    }
    span.dim()
}

fn criterion_3() -> Check {
    let groups = corpus::standard();
    for rep in &groups {
        ensure(rep.order() <= 16, || format!("{} has order {}", rep.name(), rep.order()))?;
        let series = molien(rep, 8).map_err(|e| e.to_string())?;
        for d in 0..=8u32 {
            let brute = kernel_invariant_dim(rep, d);
            ensure(series[d as usize] as usize == brute, || {
                format!("{}: molien[{}] = {}, brute force {}", rep.name(), d, series[d as usize], brute)
            })?;
        }
        let basis = generators(rep, None).map_err(|e| e.to_string())?;
        let cap = basis.degree_cap();
        let series = molien(rep, cap).map_err(|e| e.to_string())?;
        for d in 0..=cap as u32 {
            let got = generated_dim(&basis, d);
            ensure(series[d as usize] as usize == got, || {
                format!("{}: molien[{}] = {}, generated subalgebra {}", rep.name(), d, series[d as usize], got)
            })?;
        }
    }
    Ok(format!("{} corpus groups, d ≤ 8 against the kernel of g − 1, d ≤ cap against the subalgebra", groups.len()))
}

fn random_invertible(rng: &mut ChaCha8Rng, d: usize, n: u32) -> ExactMatrix {
    loop {
        let rows: Vec<Vec<CycloScalar>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| CycloScalar::from_frac(rng.gen_range(-5..=5), rng.gen_range(1..=4), n))
                    .collect()
            })
            .collect();
        let a = ExactMatrix::from_rows(rows, n).unwrap();
        if !a.determinant().unwrap().is_zero() {
            return a;
        }
    }
}

fn criterion_4() -> Check {
    let start = Instant::now();
    match find_quasi_isomorphism(&corpus::negation_plane(), &corpus::mirror_plane(), 0).map_err(|e| e.to_string())? {
        QuasiIsoOutcome::None(NoneCertificate::SingularIntertwiners { checked }) => {
            ensure(!checked.is_empty() && checked.iter().all(|p| p.determinant_identically_zero), || {
                "certificate does not show identically vanishing determinants".into()
            })?;
        }
        other => return Err(format!("−I vs diag(1,−1): {:?}", other)),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut count = 0;
    for g in corpus::standard() {
        for _ in 0..10 {
            let a = random_invertible(&mut rng, g.dim(), g.conductor());
            let h = corpus::conjugated(&g, &a).map_err(|e| e.to_string())?;
            let QuasiIsoOutcome::Found(q) = find_quasi_isomorphism(&g, &h, 0).map_err(|e| e.to_string())? else {
                return Err(format!("{}: no witness", g.name()));
            };
            let li = q.l.inverse().map_err(|e| e.to_string())?;
            let conj: BTreeSet<String> = g
                .elements()
                .iter()
                .map(|x| format!("{:?}", q.l.checked_mul(x).unwrap().checked_mul(&li).unwrap()))
                .collect();
            let target: BTreeSet<String> = h.elements().iter().map(|x| format!("{:?}", x)).collect();
            ensure(conj == target, || format!("{}: L·G·L⁻¹ ≠ H", g.name()))?;
            let report = verify_quasi_isomorphism(&g, &h, &q, 2, 0).map_err(|e| e.to_string())?;
            ensure(report.passed(), || format!("{}: {:?}", g.name(), report.failures))?;
            count += 1;
        }
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("−I vs diag(1,−1) is none with certificate; {} conjugates verified ({:.1?})", count, t))
}

/// Random weighted-homogeneous polynomial of degree d in weights w.
fn random_homogeneous(rng: &mut ChaCha8Rng, w: &WeightSystem, d: u32, n: u32) -> Poly {
    let mons: Vec<Monomial> = w.monomials_of_degree(d).collect();
    let mut terms = Vec::new();
    for m in mons {
        if rng.gen_bool(0.7) {
            terms.push((m, CycloScalar::from_frac(rng.gen_range(-4..=4), rng.gen_range(1..=3), n)));
        }
    }
    Poly::from_terms(w.len(), n, terms).unwrap()
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut slopes = Vec::new();
    let ts = [0.5, 0.25, 0.125, 0.0625];
    let mut low = Vec::new();
    while slopes.len() < 20 {
        let k = [2u32, 3, 4, 6][rng.gen_range(0..4)];
        let basis = generators(&corpus::rotations(k), None).map_err(|e| e.to_string())?;
        let n = basis.rep().conductor();
        let rel = relations(&basis, 2 * k + 2).map_err(|e| e.to_string())?;
        let wy = basis.weights().clone();
        let m = rng.gen_range(1..=3);
        let e: Vec<u32> = (0..m).map(|_| [2, k, 2 * k + 2][rng.gen_range(0..3)]).collect();
        let wz = WeightSystem::new(e.clone()).unwrap();
        let mut comps = Vec::new();
        for &ei in &e {
            let mut f = random_homogeneous(&mut rng, &wy, ei, n);
            if f.is_zero() {
                f = Poly::term(wy.monomials_of_degree(ei).next().unwrap(), CycloScalar::one(n));
            }
            // higher-order terms
            for extra in 1..=4 {
                f = f.checked_add(&random_homogeneous(&mut rng, &wy, ei + extra, n)).unwrap();
            }
            // low-order terms that vanish on Y: a multiple of the relation
            if 2 * k < ei {
                let r = rel.relations()[0].scale(&CycloScalar::from_frac(rng.gen_range(1..=5), 1, n));
                f = f.checked_add(&r).unwrap();
            }
            comps.push(f);
        }
        let f = QuotientMap::new(wy, wz, comps).map_err(|e| e.to_string())?;
        let dropped = drop_low_terms(&f, &rel).map_err(|e| format!("drop_low_terms: {}", e))?;
        let f0 = quasilinear_part(&dropped);
        ensure(is_quasilinear(&f0), || "f₀ is not quasilinear".into())?;
        ensure(quasilinear_part(&f0) == f0, || "quasilinearization is not idempotent".into())?;
        let samples = sample_quotient_points(&basis, 12, 1.0, slopes.len() as u64).map_err(|e| e.to_string())?;
        let table = convergence_table(&dropped, &samples, &ts);
        if table.rows.iter().all(|r| r.1 == 0.0) {
            continue;
        }
        ensure(table.rows.windows(2).all(|r| r[1].1 < r[0].1), || format!("k = {}, e = {:?}: not monotone", k, e))?;
        if table.slope < 0.9 {
            let ratios: Vec<String> = table.rows.windows(2).map(|r| format!("{:.2}", r[0].1 / r[1].1)).collect();
            low.push(format!("k = {}, e = {:?}: slope {:.3}, halving ratios {}", k, e, table.slope, ratios.join(", ")));
        }
        slopes.push(table.slope);
    }
    let min = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    // negative control: a low-order term outside the ideal is refused
    let basis = generators(&corpus::rotations(4), None).map_err(|e| e.to_string())?;
    let rel = relations(&basis, 10).map_err(|e| e.to_string())?;
    let n = basis.rep().conductor();
    let bad = Poly::var(3, 0, n).checked_add(&Poly::var(3, 1, n).pow(2)).unwrap();
    let f = QuotientMap::new(basis.weights().clone(), WeightSystem::new(vec![10]).unwrap(), vec![bad])
        .map_err(|e| e.to_string())?;
    ensure(drop_low_terms(&f, &rel).is_err(), || "a low term outside the ideal was accepted".into())?;
    ensure(low.is_empty(), || format!("{} of 20 maps below slope 0.9: {}", low.len(), low.join("; ")))?;
    Ok(format!("20 maps: f₀ quasilinear and idempotent, minimum log-log slope {:.3}", min))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut summary = Vec::new();
    for k in [2u32, 4] {
        let rep = corpus::rotations(k);
        let basis = generators(&rep, None).map_err(|e| e.to_string())?;
        let rel = relations(&basis, 2 * k).map_err(|e| e.to_string())?;
        let minus = rep
            .index_of(&ExactMatrix::identity(2, rep.conductor()).scale(&CycloScalar::from_int(-1, rep.conductor())))
            .ok_or("−I not in the group")?;
        let mut seen = BTreeSet::new();
        for i in 0..200 {
            // oracle: real points of y₂² + y₃² = y₁ᵏ, any sign of y₁ since k is even
            let y1: f64 = rng.gen_range(-2.0..2.0);
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rad = y1.abs().powf(k as f64 / 2.0);
            let y = [y1, rad * theta.cos(), rad * theta.sin()];
            let opts = MembershipOptions { seed: i, ..MembershipOptions::default() };
            match real_membership(&rel, &y, opts).map_err(|e| e.to_string())? {
                RealMembership::Certified(cert) => {
                    ensure(cert.h == 0 || cert.h == minus, || format!("h = element {}", cert.h))?;
                    ensure(cert.residual <= 1e-8, || format!("residual {:e}", cert.residual))?;
                    let expected = if y1 >= 0.0 { 0 } else { minus };
                    ensure(cert.h == expected || y1.abs() < 1e-12, || {
                        format!("k = {}: y₁ = {} certified with h = {}", k, y1, cert.h)
                    })?;
                    seen.insert(cert.h);
                }
                other => return Err(format!("k = {}: {:?} at {:?}", k, other, y)),
            }
        }
        ensure(seen.len() == 2, || format!("k = {}: only h ∈ {:?} occurred", k, seen))?;
        summary.push(format!("k = {}", k));
    }
    Ok(format!("{}: 200 points each certified, both h = 1 and h = −I occur", summary.join(", ")))
}

fn concat(a: &PathSpec, b: &PathSpec) -> PathSpec {
    let mut w = a.waypoints.clone();
    w.extend(b.waypoints.iter().skip(1).cloned());
    PathSpec::new(w, a.samples_per_segment, true).unwrap()
}

fn criterion_7() -> Check {
    let opts = TrackOptions::default();
    let mut worst: f64 = 0.0;
    for k in [2u32, 3, 4] {
        let rep = corpus::cyclic_line(k);
        let basis = generators(&rep, None).map_err(|e| e.to_string())?;
        let gen = rep.index_of(&rep.generators()[0]).ok_or("generator")?;
        let loops: Vec<PathSpec> = (0..4)
            .map(|w| {
                if w == 0 {
                    // a loop around 2 that does not wind around the branch point
                    let mut pts: Vec<Vec<Complex64>> = (0..32)
                        .map(|j| vec![c(2.0, 0.0) - Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 32.0)])
                        .collect();
                    pts.push(pts[0].clone());
                    PathSpec::new(pts, 2, true).unwrap()
                } else {
                    PathSpec::circle(c(0.0, 0.0), 1.0, w, 64, 2)
                }
            })
            .collect();
        let mut expected = 0;
        let mut elements = Vec::new();
        for (w, lp) in loops.iter().enumerate() {
            ensure(lp.waypoints[0] == vec![c(1.0, 0.0)], || "loop not based at 1".into())?;
            let m = monodromy(&basis, lp, &[c(1.0, 0.0)], opts).map_err(|e| format!("k = {}, w = {}: {}", k, w, e))?;
            ensure(m.element == expected, || format!("k = {}, w = {}: element {} != {}", k, w, m.element, expected))?;
            ensure(m.mismatch <= 1e-8, || format!("mismatch {:e}", m.mismatch))?;
            worst = worst.max(m.mismatch);
            elements.push(m.element);
            expected = rep.mul(expected, gen);
        }
        // homomorphism: the concatenated loop maps to the product
        for a in 0..4 {
            for b in 0..4 {
                let both = concat(&loops[a], &loops[b]);
                let m = monodromy(&basis, &both, &[c(1.0, 0.0)], opts).map_err(|e| e.to_string())?;
                ensure(m.element == rep.mul(elements[b], elements[a]), || {
                    format!("k = {}: loop {} then {} gives {}", k, a, b, m.element)
                })?;
            }
        }
    }
    Ok(format!("Z/k, k = 2, 3, 4: winding w gives generator^w, products respected, max mismatch {:.1e}", worst))
}

fn criterion_8() -> Check {
    let rep = corpus::cyclic_line(2);
    let basis = generators(&rep, None).map_err(|e| e.to_string())?;
    let strat = stratify(&basis).map_err(|e| e.to_string())?;
    let f = QuotientMap::identity(basis.weights().clone(), rep.conductor());
    let mut worst: f64 = 0.0;
    for (a, b) in [(c(-1.0, 0.0), c(1.0, 0.0)), (c(-1.0, -0.5), c(1.0, 0.5)), (c(0.3, -1.0), c(-0.3, 1.0))] {
        let path = PathSpec::new(vec![vec![a], vec![b]], 40, false).unwrap();
        let lifted = lift_along_path(&strat, &strat, &f, &path, &[a], TrackOptions::default())
            .map_err(|e| e.to_string())?;
        ensure(lifted.wall_events.len() == 1, || format!("{} wall events", lifted.wall_events.len()))?;
        let ev = &lifted.wall_events[0];
        ensure(ev.r == 2 && ev.admissible_branches == 2, || format!("{:?}", ev))?;
        ensure(lifted.max_residual() <= 1e-8, || format!("residual {:e}", lifted.max_residual()))?;
        // the holomorphic lift of v ↦ v² through 0 is the identity branch
        let end_err = ((lifted.end()[0] - b).norm()).max(0.0);
        ensure(end_err < 1e-8, || format!("ended at {:?}, expected {}", lifted.end(), b))?;
        worst = worst.max(lifted.max_residual());
    }
    Ok(format!("three paths through 0: one wall event, r = 2, 2 branches, max residual {:.1e}", worst))
}

fn criterion_9() -> Check {
    let rep = corpus::cyclic_line(3);
    let basis = generators(&rep, None).map_err(|e| e.to_string())?;
    let strat = stratify(&basis).map_err(|e| e.to_string())?;
    let n = rep.conductor();
    let y = Poly::var(1, 0, n);
    let f = QuotientMap::new(
        basis.weights().clone(),
        basis.weights().clone(),
        vec![y.checked_add(&y.pow(2).scale_rational(&rat(1, 50))).unwrap()],
    )
    .map_err(|e| e.to_string())?;
    let seed = [c(1.0, 0.0)];
    let opts = TrackOptions::default();
    let lift = |mid: Complex64| -> Result<Vec<Complex64>, String> {
        let path = PathSpec::new(vec![vec![c(1.0, 0.0)], vec![mid], vec![c(-1.0, 1.0)]], 30, false).unwrap();
        let z0 = f.numeric().eval(&basis.numeric_map().eval(&[c(1.0, 0.0)]));
        let fib = invquot::lifting::fiber(&basis, &z0, Default::default()).map_err(|e| e.to_string())?;
        let start = fib
            .iter()
            .min_by(|a, b| (a[0] - seed[0]).norm().total_cmp(&(b[0] - seed[0]).norm()))
            .unwrap()
            .clone();
        let l = lift_along_path(&strat, &strat, &f, &path, &start, opts).map_err(|e| e.to_string())?;
        ensure(l.wall_events.is_empty(), || "path meets a wall".into())?;
        ensure(l.max_residual() <= 1e-8, || format!("residual {:e}", l.max_residual()))?;
        Ok(l.end().to_vec())
    };
    let a = lift(c(1.0, 1.0))?;
    let b = lift(c(0.5, 2.0))?;
    let gap = (a[0] - b[0]).norm();
    ensure(gap <= 1e-8, || format!("homotopic paths end {:e} apart", gap))?;
    // oracle: w³ = v³ + v⁶/50 has the single-valued branch w = v·(1 + v³/50)^{1/3} near the path
    let end = c(-1.0, 1.0);
    let closed = end * (c(1.0, 0.0) + end.powu(3) / 50.0).powf(1.0 / 3.0);
    let err = (a[0] - closed).norm();
    ensure(err <= 1e-8, || format!("endpoint {} differs from {} by {:e}", a[0], closed, err))?;
    Ok(format!("homotopic endpoints agree to {:.1e}, closed-form branch to {:.1e}", gap, err))
}

fn criterion_10() -> Check {
    let bin = env!("CARGO_BIN_EXE_invquot");
    let run = || Command::new(bin).args(["corpus", "--seed", "0"]).output().map_err(|e| e.to_string());
    let (a, b) = (run()?, run()?);
    ensure(a.status.code() == Some(0), || format!("exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stdout)))?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "reports differ".into())?;
    Ok(format!("two runs, {} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("sign-line generators and stratum", criterion_1),
        ("rotation groups: degrees, relation, strata", criterion_2),
        ("Molien cross-check", criterion_3),
        ("quasi-isomorphism decision", criterion_4),
        ("quasilinearization", criterion_5),
        ("real points of Y", criterion_6),
        ("monodromy", criterion_7),
        ("wall crossing", criterion_8),
        ("path independence", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {}: {}", i + 1, name, detail),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {}: {}", i + 1, name, why);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
