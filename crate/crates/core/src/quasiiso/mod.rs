//! Quasi-isomorphisms between representations (linear maps conjugating one
//! group onto the other), real forms W_h, and the graded automorphism of the
//! invariant ring they induce.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{lcm, solve_linear, CycloScalar, ExactError, ExactMatrix, SolutionSet};
use crate::group::{FieldKind, GroupError, Representation, DEFAULT_CLOSURE_CAP};
use crate::invariants::{InvariantBasis, InvariantError};
use crate::poly::{Monomial, Poly, PolyError};
use crate::quasilinear::{QuasiError, QuotientMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuasiIsoError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("element {0} is not a central involution")]
    NotCentralInvolution(usize),
    #[error("generator {0} is not expressible in the generators after substitution")]
    NotExpressible(usize),
    #[error("induced action is not a homomorphic image of the group")]
    NotClosed,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Quasi(#[from] QuasiError),
}

/// An isomorphism G → H given on element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupIso {
    pub image_of: Vec<usize>,
}

/// An invertible L with L·g·L⁻¹ = iso(g).
#[derive(Clone, Debug)]
pub struct QuasiIso {
    pub l: ExactMatrix,
    pub iso: GroupIso,
}

/// Why no quasi-isomorphism exists.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NoneCertificate {
    OrdersDiffer { source: usize, target: usize },
    NoGroupIsomorphism,
    /// for every isomorphism, the determinant of a generic intertwiner vanishes identically
    SingularIntertwiners { checked: Vec<PhiCertificate> },
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiCertificate {
    pub phi: Vec<usize>,
    pub intertwiner_dim: usize,
    pub determinant_identically_zero: bool,
}

#[derive(Clone, Debug)]
pub enum QuasiIsoOutcome {
    Found(QuasiIso),
    None(NoneCertificate),
}

/// Greedy generating tuple: scan elements by descending order, keep those
/// outside the subgroup generated so far.
pub fn generating_tuple(rep: &Representation) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..rep.order()).collect();
    idx.sort_by_key(|&g| (std::cmp::Reverse(rep.element_order(g)), g));
    let mut gens = Vec::new();
    let mut sub = vec![0];
    for g in idx {
        if sub.len() == rep.order() {
            break;
        }
        if sub.binary_search(&g).is_err() {
            gens.push(g);
            sub = rep.subgroup_generated_by(&gens);
        }
    }
    gens
}

/// Extends gens[i] ↦ images[i] along right multiplication; None if inconsistent.
fn extend(g: &Representation, h: &Representation, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut phi = vec![usize::MAX; g.order()];
    phi[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let (y, hy) = (g.mul(x, s), h.mul(phi[x], t));
            if phi[y] == usize::MAX {
                phi[y] = hy;
                queue.push_back(y);
            } else if phi[y] != hy {
                return None;
            }
        }
    }
    Some(phi)
}

/// All isomorphisms G → H, in lexicographic order of generator images.
pub fn enumerate_isomorphisms(g: &Representation, h: &Representation) -> Vec<GroupIso> {
    if g.order() != h.order() {
        return Vec::new();
    }
    let gens = generating_tuple(g);
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            (0..h.order())
                .filter(|&t| h.element_order(t) == g.element_order(s))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    if candidates.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let images: Vec<usize> = choice.iter().zip(&candidates).map(|(&c, v)| v[c]).collect();
        if let Some(phi) = extend(g, h, &gens, &images) {
            let distinct: BTreeSet<usize> = phi.iter().copied().collect();
            let hom = (0..g.order())
                .all(|a| (0..g.order()).all(|b| phi[g.mul(a, b)] == h.mul(phi[a], phi[b])));
            if distinct.len() == g.order() && hom {
                out.push(GroupIso { image_of: phi });
            }
        }
        // odometer over candidate tuples
        let mut i = gens.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Basis of {L : L·g = φ(g)·L for all generators g of G}.
pub fn intertwiners(
    g: &Representation,
    h: &Representation,
    phi: &GroupIso,
) -> Result<Vec<ExactMatrix>, QuasiIsoError> {
    let (dv, dw) = (g.dim(), h.dim());
    let n = lcm(g.conductor(), h.conductor());
    let mut blocks = Vec::new();
    for gen in g.generators() {
        let gi = g.index_of(gen).expect("generators are elements");
        let a = gen.with_conductor(n)?;
        let b = h.element(phi.image_of[gi]).with_conductor(n)?;
        // unknown L[i][j] sits at column i·dv + j
        let mut m = ExactMatrix::zeros(dw * dv, dw * dv, n);
        for i in 0..dw {
            for k in 0..dv {
                let row = i * dv + k;
                for j in 0..dv {
                    let col = i * dv + j;
                    let v = m.get(row, col) + a.get(j, k);
                    m.set(row, col, v);
                }
                for j in 0..dw {
                    let col = j * dv + k;
                    let v = m.get(row, col) - b.get(i, j);
                    m.set(row, col, v);
                }
            }
        }
        blocks.push(m);
    }
    let kernel = if blocks.is_empty() {
        ExactMatrix::zeros(1, dw * dv, n).kernel()
    } else {
        ExactMatrix::vstack(&blocks)?.kernel()
    };
    kernel
        .into_iter()
        .map(|v| {
            let rows = (0..dw).map(|i| v[i * dv..(i + 1) * dv].to_vec()).collect();
            Ok(ExactMatrix::from_rows(rows, n)?)
        })
        .collect()
}

fn combination(basis: &[ExactMatrix], coeffs: &[CycloScalar]) -> ExactMatrix {
    let mut acc = basis[0].scale(&coeffs[0]);
    for (b, c) in basis.iter().zip(coeffs).skip(1) {
        acc = acc.checked_add(&b.scale(c)).expect("same shape");
    }
    acc
}

/// det Σ c_k B_k as a polynomial in the c_k (cofactor expansion).
fn determinant_polynomial(basis: &[ExactMatrix]) -> Poly {
    let (k, d, n) = (basis.len(), basis[0].rows(), basis[0].conductor());
    let entries: Vec<Vec<Poly>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    Poly::from_terms(
                        k,
                        n,
                        basis
                            .iter()
                            .enumerate()
                            .map(|(v, b)| (Monomial::var(k, v), b.get(i, j).clone())),
                    )
                    .expect("arity")
                })
                .collect()
        })
        .collect();
    fn det(m: &[Vec<Poly>], rows: &[usize], nvars: usize, n: u32) -> Poly {
        let col = m.len() - rows.len();
        if rows.is_empty() {
            return Poly::constant(CycloScalar::one(n), nvars);
        }
        let mut acc = Poly::zero(nvars, n);
        for (pos, &r) in rows.iter().enumerate() {
            if m[r][col].is_zero() {
                continue;
            }
            let rest: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
            let term = m[r][col].checked_mul(&det(m, &rest, nvars, n)).expect("same ring");
            acc = if pos % 2 == 0 {
                acc.checked_add(&term)
            } else {
                acc.checked_sub(&term)
            }
            .expect("same ring");
        }
        acc
    }
    let rows: Vec<usize> = (0..d).collect();
    det(&entries, &rows, k, n)
}

/// A point of {0,…,deg}^k where a nonzero polynomial does not vanish.
fn nonvanishing_point(p: &Poly) -> Vec<CycloScalar> {
    let k = p.nvars();
    let n = p.conductor();
    let deg = p.total_degree().unwrap_or(0) as i64;
    let mut x = vec![0i64; k];
    loop {
        let pt: Vec<CycloScalar> = x.iter().map(|&v| CycloScalar::from_int(v, n)).collect();
        if !p.evaluate(&pt).expect("arity").is_zero() {
            return pt;
        }
        let mut i = 0;
        loop {
            assert!(i < k, "a nonzero polynomial has a non-root on the grid");
            x[i] += 1;
            if x[i] <= deg {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// Searches every isomorphism φ for an invertible intertwiner. "None" is
/// returned only when each φ has an identically vanishing determinant.
pub fn find_quasi_isomorphism(
    g: &Representation,
    h: &Representation,
    seed: u64,
) -> Result<QuasiIsoOutcome, QuasiIsoError> {
    if g.dim() != h.dim() {
        return Err(QuasiIsoError::DimensionMismatch(g.dim(), h.dim()));
    }
    if g.order() != h.order() {
        return Ok(QuasiIsoOutcome::None(NoneCertificate::OrdersDiffer {
            source: g.order(),
            target: h.order(),
        }));
    }
    let isos = enumerate_isomorphisms(g, h);
    if isos.is_empty() {
        return Ok(QuasiIsoOutcome::None(NoneCertificate::NoGroupIsomorphism));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = Vec::new();
    for phi in isos {
        let basis = intertwiners(g, h, &phi)?;
        let found = |l: &ExactMatrix| -> Option<QuasiIso> {
            l.determinant().ok().filter(|d| !d.is_zero()).map(|_| QuasiIso {
                l: l.clone(),
                iso: phi.clone(),
            })
        };
        if basis.is_empty() {
            checked.push(PhiCertificate {
                phi: phi.image_of.clone(),
                intertwiner_dim: 0,
                determinant_identically_zero: true,
            });
            continue;
        }
        if let Some(q) = basis.iter().find_map(found) {
            return Ok(QuasiIsoOutcome::Found(q));
        }
        let n = basis[0].conductor();
        for _ in 0..20 {
            let coeffs: Vec<CycloScalar> = (0..basis.len())
                .map(|_| CycloScalar::from_int(rng.gen_range(-5..=5), n))
                .collect();
            if let Some(q) = found(&combination(&basis, &coeffs)) {
                return Ok(QuasiIsoOutcome::Found(q));
            }
        }
        let det = determinant_polynomial(&basis);
        if !det.is_zero() {
            let pt = nonvanishing_point(&det);
            let q = found(&combination(&basis, &pt)).expect("determinant is nonzero here");
            return Ok(QuasiIsoOutcome::Found(q));
        }
        checked.push(PhiCertificate {
            phi: phi.image_of.clone(),
            intertwiner_dim: basis.len(),
            determinant_identically_zero: true,
        });
    }
    Ok(QuasiIsoOutcome::None(NoneCertificate::SingularIntertwiners {
        checked,
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub conjugates_onto: bool,
    pub orbits_match: bool,
    pub failures: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.conjugates_onto && self.orbits_match
    }
}

/// Checks L·G·L⁻¹ = H as sets and L(G·v) = H·(Lv) on sample points.
pub fn verify_quasi_isomorphism(
    g: &Representation,
    h: &Representation,
    q: &QuasiIso,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport, QuasiIsoError> {
    let n = lcm(lcm(g.conductor(), h.conductor()), q.l.conductor());
    let (g, h) = (g.with_conductor(n)?, h.with_conductor(n)?);
    let l = q.l.with_conductor(n)?;
    let mut failures = Vec::new();
    let Ok(li) = l.inverse() else {
        return Ok(VerificationReport {
            conjugates_onto: false,
            orbits_match: false,
            failures: vec!["L is singular".into()],
        });
    };
    let mut image = BTreeSet::new();
    for (i, e) in g.elements().iter().enumerate() {
        let c = l.checked_mul(e)?.checked_mul(&li)?;
        match h.index_of(&c) {
            Some(j) => {
                image.insert(j);
            }
            None => failures.push(format!("L·g·L⁻¹ ∉ H for element {}", i)),
        }
    }
    let conjugates_onto = failures.is_empty() && image.len() == h.order();
    if failures.is_empty() && !conjugates_onto {
        failures.push("L·G·L⁻¹ is a proper subset of H".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut orbits_match = true;
    for s in 0..samples {
        let v: Vec<CycloScalar> = (0..g.dim())
            .map(|_| CycloScalar::from_frac(rng.gen_range(-9..=9), rng.gen_range(1..=4), n))
            .collect();
        let lhs: BTreeSet<String> = g
            .orbit(&v)?
            .iter()
            .map(|u| Ok(format!("{:?}", l.mul_vec(u)?)))
            .collect::<Result<_, ExactError>>()?;
        let rhs: BTreeSet<String> = h
            .orbit(&l.mul_vec(&v)?)?
            .iter()
            .map(|u| format!("{:?}", u))
            .collect();
        if lhs != rhs {
            orbits_match = false;
            failures.push(format!("orbit mismatch at sample {}", s));
        }
    }
    Ok(VerificationReport {
        conjugates_onto,
        orbits_match,
        failures,
    })
}

/// W_h = W_{h+} ⊕ iW_{h−} with the induced action in the basis (plus, i·minus).
#[derive(Clone, Debug)]
pub struct RealForm {
    pub h: usize,
    pub plus_basis: Vec<Vec<CycloScalar>>,
    pub minus_basis: Vec<Vec<CycloScalar>>,
    /// columns: plus basis, then i times the minus basis
    pub change_of_basis: ExactMatrix,
    pub induced: Representation,
}

fn check_central_involution(rep: &Representation, h: usize) -> Result<(), QuasiIsoError> {
    if h >= rep.order() || rep.mul(h, h) != 0 || !rep.is_central(h) {
        return Err(QuasiIsoError::NotCentralInvolution(h));
    }
    Ok(())
}

pub fn real_form(rep: &Representation, h: usize) -> Result<RealForm, QuasiIsoError> {
    check_central_involution(rep, h)?;
    let (d, n) = (rep.dim(), rep.conductor());
    let id = ExactMatrix::identity(d, n);
    let plus_basis = rep.element(h).checked_sub(&id)?.kernel();
    let minus_basis = rep.element(h).checked_add(&id)?.kernel();
    let big = if minus_basis.is_empty() { n } else { lcm(n, 4) };
    let i = if minus_basis.is_empty() {
        CycloScalar::one(big)
    } else {
        CycloScalar::imaginary_unit(big)?
    };
    let mut cols: Vec<Vec<CycloScalar>> = Vec::new();
    for b in &plus_basis {
        cols.push(b.iter().map(|x| x.with_conductor(big)).collect::<Result<_, _>>()?);
    }
    for b in &minus_basis {
        cols.push(
            b.iter()
                .map(|x| Ok(&x.with_conductor(big)? * &i))
                .collect::<Result<_, ExactError>>()?,
        );
    }
    let p = ExactMatrix::from_rows(cols, big)?.transpose();
    let pi = p.inverse()?;
    let conj = |m: &ExactMatrix| -> Result<ExactMatrix, QuasiIsoError> {
        Ok(pi.checked_mul(&m.with_conductor(big)?)?.checked_mul(&p)?)
    };
    let induced_all: Vec<ExactMatrix> = rep.elements().iter().map(conj).collect::<Result<_, _>>()?;
    // homomorphism and closure of the induced matrices
    for a in 0..rep.order() {
        for b in 0..rep.order() {
            if induced_all[a].checked_mul(&induced_all[b])? != induced_all[rep.mul(a, b)] {
                return Err(QuasiIsoError::NotClosed);
            }
        }
    }
    let gens: Vec<ExactMatrix> = rep.generators().iter().map(conj).collect::<Result<_, _>>()?;
    let field = if gens.iter().all(ExactMatrix::is_real) {
        rep.field()
    } else {
        FieldKind::Complex
    };
    let induced = Representation::close(
        format!("{}-real-form-{}", rep.name(), h),
        d,
        big,
        field,
        gens,
        DEFAULT_CLOSURE_CAP,
    )?;
    if induced.order() != rep.order() {
        return Err(QuasiIsoError::NotClosed);
    }
    Ok(RealForm {
        h,
        plus_basis,
        minus_basis,
        change_of_basis: p,
        induced,
    })
}

/// The substitution f(w₊ + w₋) ↦ f(w₊ + i·w₋) on the invariant ring,
/// expressed on quotient coordinates.
#[derive(Clone, Debug)]
pub struct GradedAutomorphism {
    pub h: usize,
    pub map: QuotientMap,
    /// ±1 when generator j goes to ±y_j
    pub signs: Vec<Option<i8>>,
}

pub fn graded_automorphism(
    basis: &InvariantBasis,
    h: usize,
) -> Result<GradedAutomorphism, QuasiIsoError> {
    let rep = basis.rep();
    check_central_involution(rep, h)?;
    let (d, n) = (rep.dim(), rep.conductor());
    let big = if h == 0 { n } else { lcm(n, 4) };
    let i = if h == 0 {
        CycloScalar::one(big)
    } else {
        CycloScalar::imaginary_unit(big)?
    };
    let id = ExactMatrix::identity(d, big);
    let hm = rep.element(h).with_conductor(big)?;
    let half = CycloScalar::from_frac(1, 2, big);
    // J = (I + h)/2 + i(I − h)/2
    let j = id
        .checked_add(&hm)?
        .scale(&half)
        .checked_add(&id.checked_sub(&hm)?.scale(&(&half * &i)))?;
    let gens: Vec<Poly> = basis
        .gens()
        .iter()
        .map(|g| g.with_conductor(big))
        .collect::<Result<_, _>>()?;
    let m = basis.len();
    let w = basis.weights();
    let mut comps = Vec::with_capacity(m);
    let mut signs = Vec::with_capacity(m);
    for (idx, (g, &deg)) in gens.iter().zip(basis.degrees()).enumerate() {
        let target = g.act_linear(&j)?;
        let ys: Vec<Monomial> = w.monomials_of_degree(deg).collect();
        let prods: Vec<Poly> = ys
            .iter()
            .map(|a| Poly::term(a.clone(), CycloScalar::one(big)).compose(&gens))
            .collect::<Result<_, _>>()?;
        let xs: Vec<Monomial> = crate::poly::WeightSystem::standard(d)
            .monomials_of_degree(deg)
            .collect();
        let a = ExactMatrix::from_rows(
            xs.iter()
                .map(|x| prods.iter().map(|p| p.coeff(x)).collect())
                .collect(),
            big,
        )?;
        let b = ExactMatrix::from_column(&xs.iter().map(|x| target.coeff(x)).collect::<Vec<_>>(), big)?;
        let sol = match solve_linear(&a, &b)? {
            SolutionSet::Solutions { particular, .. } => particular,
            SolutionSet::Inconsistent { .. } => return Err(QuasiIsoError::NotExpressible(idx)),
        };
        let image = Poly::from_terms(m, big, ys.iter().cloned().zip(sol.column(0)))?;
        let yj = Poly::var(m, idx, big);
        signs.push(if image == yj {
            Some(1)
        } else if image == yj.neg() {
            Some(-1)
        } else {
            None
        });
        comps.push(image);
    }
    let comps = comps
        .iter()
        .map(|c| c.to_rational().map_or_else(|| Ok(c.clone()), |r| r.with_conductor(n)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GradedAutomorphism {
        h,
        map: QuotientMap::new(w.clone(), w.clone(), comps)?,
        signs,
    })
}

#[cfg(test)]
mod tests;
