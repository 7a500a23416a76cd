use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::{molien, reynolds, InvariantBasis, InvariantError, PolySpan};
use crate::exact::CycloScalar;
use crate::group::{FieldKind, Representation};
use crate::poly::{Monomial, Poly, WeightSystem};

/// Σ_g |g·x|², the averaged quadratic form of a real action.
fn invariant_quadratic_form(rep: &Representation) -> Poly {
    let (dim, n) = (rep.dim(), rep.conductor());
    let mut q = Poly::zero(dim, n);
    for g in rep.elements() {
        for i in 0..dim {
            let form = Poly::from_terms(
                dim,
                n,
                (0..dim).map(|j| (Monomial::var(dim, j), g.get(i, j).clone())),
            )
            .expect("linear form");
            q = q.checked_add(&form.pow(2)).expect("same ring");
        }
    }
    q
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if !q.is_positive() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd): (BigInt, BigInt) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

/// Orthogonal basis (Fischer product) of a growing span, with squared norms.
struct Orthogonal {
    basis: Vec<(Poly, CycloScalar)>,
}

impl Orthogonal {
    fn project_out(&self, p: &Poly) -> Poly {
        let mut r = p.clone();
        for (b, nb) in &self.basis {
            let c = p.fischer_inner(b).expect("same ring");
            if !c.is_zero() {
                let f = c.checked_div(nb).expect("nonzero norm");
                r = r.checked_sub(&b.scale(&f)).expect("same ring");
            }
        }
        r
    }

    fn push(&mut self, p: Poly) {
        let r = self.project_out(&p);
        let n = r.fischer_inner(&r).expect("same ring");
        if !n.is_zero() {
            self.basis.push((r, n));
        }
    }
}

fn normalize_leading(p: &Poly) -> Poly {
    let lead = p.leading_term().expect("nonzero").1.clone();
    p.scale(&lead.invert().expect("nonzero leading coefficient"))
}

/// Homogeneous generators of the invariant ring up to degree `cap`
/// (default |G|, which suffices by Noether's bound).
///
/// In each degree the invariants are spanned by Reynolds images of monomials.
/// New generators are taken from the Fischer-orthogonal complement of the
/// products of lower-degree generators, the first one scaled to leading
/// coefficient 1 and later ones in the same degree scaled to the same Fischer
/// norm whenever that scale is rational. Real actions start with the averaged
/// quadratic form.
pub fn generators(
    rep: &Representation,
    cap: Option<usize>,
) -> Result<InvariantBasis, InvariantError> {
    let cap = cap.unwrap_or(rep.order()).max(1);
    let series = molien(rep, cap)?;
    let (dim, n) = (rep.dim(), rep.conductor());
    let mut gens: Vec<Poly> = Vec::new();
    for d in 1..=cap {
        let expected = series[d] as usize;
        let monomials: Vec<Monomial> = WeightSystem::standard(dim)
            .monomials_of_degree(d as u32)
            .collect();
        let mut invariant_span = PolySpan::new(dim, n, monomials.clone());
        let mut candidates = Vec::new();
        for m in monomials.iter().rev() {
            let r = reynolds(rep, &Poly::term(m.clone(), CycloScalar::one(n)))?;
            if invariant_span.insert(&r) {
                candidates.push(r);
            }
        }
        if invariant_span.dim() != expected {
            return Err(InvariantError::MolienMismatch {
                degree: d,
                expected: series[d],
                found: invariant_span.dim(),
            });
        }
        if expected == 0 {
            continue;
        }

        let mut have = PolySpan::new(dim, n, monomials);
        let mut ortho = Orthogonal { basis: Vec::new() };
        if !gens.is_empty() {
            let degrees: Vec<u32> = gens.iter().map(|g| g.total_degree().unwrap()).collect();
            let w = WeightSystem::new(degrees).expect("positive degrees");
            for alpha in w.monomials_of_degree(d as u32) {
                let mut prod = Poly::constant(CycloScalar::one(n), dim);
                for (g, &e) in gens.iter().zip(alpha.exps()) {
                    if e > 0 {
                        prod = prod.checked_mul(&g.pow(e))?;
                    }
                }
                if have.insert(&prod) {
                    ortho.push(prod);
                }
            }
        }

        let mut first_norm: Option<CycloScalar> = None;
        let mut accept = |p: Poly,
                          have: &mut PolySpan,
                          ortho: &mut Orthogonal,
                          gens: &mut Vec<Poly>| {
            let mut g = normalize_leading(&p);
            let norm = g.fischer_inner(&g).expect("same ring");
            match &first_norm {
                None => first_norm = Some(norm),
                Some(target) => {
                    let ratio = target.checked_div(&norm).expect("nonzero norm");
                    if let Some(s) = ratio.as_rational().and_then(rational_sqrt) {
                        g = g.scale_rational(&s);
                    }
                }
            }
            have.insert(&g);
            ortho.push(g.clone());
            gens.push(g);
        };

        if d == 2 && rep.field() == FieldKind::Real {
            let q = invariant_quadratic_form(rep);
            if !have.contains(&q) {
                let q = ortho.project_out(&q);
                accept(q, &mut have, &mut ortho, &mut gens);
            }
        }
        for c in candidates {
            if have.dim() == expected {
                break;
            }
            let r = ortho.project_out(&c);
            if r.is_zero() || have.contains(&r) {
                continue;
            }
            accept(r, &mut have, &mut ortho, &mut gens);
        }
        debug_assert_eq!(have.dim(), expected);
    }
    Ok(InvariantBasis::new(rep.clone(), gens, series, cap))
}
