use std::collections::HashMap;

use super::{InvariantBasis, InvariantError, PolySpan};
use crate::exact::{CycloScalar, ExactMatrix};
use crate::poly::{Monomial, Poly, WeightSystem};

/// Weighted-homogeneous relations among the generators, complete up to a
/// weighted degree bound.
#[derive(Clone, Debug)]
pub struct RelationSet {
    basis: InvariantBasis,
    relations: Vec<Poly>,
    degrees: Vec<u32>,
    bound: u32,
}

/// Result of a degree-truncated ideal membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdealMembership {
    /// Every weighted component lies in the truncated ideal.
    Member,
    /// The component of this weighted degree is not in the ideal.
    NotMember { degree: u32 },
    /// A component exceeds the relation bound and could not be decided.
    Undecided { degree: u32 },
}

impl RelationSet {
    pub fn basis(&self) -> &InvariantBasis {
        &self.basis
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    /// Weighted degree of each relation.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn weighted_degree_bound(&self) -> u32 {
        self.bound
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// The same relations with coefficients in Q(ζ_m).
    pub fn with_conductor(&self, m: u32) -> Result<Self, InvariantError> {
        if m == self.basis.rep().conductor() {
            return Ok(self.clone());
        }
        Ok(Self {
            basis: self.basis.with_conductor(m)?,
            relations: self
                .relations
                .iter()
                .map(|r| r.with_conductor(m))
                .collect::<Result<_, _>>()?,
            degrees: self.degrees.clone(),
            bound: self.bound,
        })
    }

    /// Span of {y^β·r : |β| + deg r = D} inside the weighted-degree-D monomials.
    pub fn ideal_span(&self, degree: u32) -> PolySpan {
        let w = self.basis.weights();
        let m = w.len();
        let n = self.basis.rep().conductor();
        let mut span = PolySpan::new(m, n, w.monomials_of_degree(degree).collect());
        for (r, &dr) in self.relations.iter().zip(&self.degrees) {
            if dr > degree {
                continue;
            }
            for beta in w.monomials_of_degree(degree - dr) {
                let shifted = r
                    .checked_mul(&Poly::term(beta, CycloScalar::one(n)))
                    .expect("same ring");
                span.insert(&shifted);
            }
        }
        span
    }

    /// Degree-truncated membership of a polynomial in y₁…y_m.
    pub fn membership(&self, p: &Poly) -> IdealMembership {
        let w = self.basis.weights();
        for d in p.weighted_degrees(w) {
            let comp = p.weighted_component(w, d);
            if d > self.bound {
                return IdealMembership::Undecided { degree: d };
            }
            if !self.ideal_span(d).contains(&comp) {
                return IdealMembership::NotMember { degree: d };
            }
        }
        IdealMembership::Member
    }

    /// Relations evaluated at a numeric point of the ambient space.
    pub fn residuals(&self, y: &[num_complex::Complex64]) -> Vec<f64> {
        self.relations
            .iter()
            .map(|r| r.to_numeric().eval(y).norm())
            .collect()
    }
}

struct ProductCache {
    gens: Vec<Poly>,
    memo: HashMap<Monomial, Poly>,
}

impl ProductCache {
    fn get(&mut self, alpha: &Monomial) -> Poly {
        if let Some(p) = self.memo.get(alpha) {
            return p.clone();
        }
        let i = alpha
            .exps()
            .iter()
            .rposition(|&e| e > 0)
            .expect("constant monomial is seeded");
        let mut lower = alpha.exps().to_vec();
        lower[i] -= 1;
        let p = self
            .get(&Monomial::new(lower))
            .checked_mul(&self.gens[i])
            .expect("same ring");
        self.memo.insert(alpha.clone(), p.clone());
        p
    }
}

/// Relations among the generators up to weighted degree `cap`. In each degree
/// the kernel of y^α ↦ p^α is computed, and kernel vectors outside the
/// truncated ideal of the earlier relations become new relations (reduced
/// modulo that ideal, leading coefficient 1).
pub fn relations(basis: &InvariantBasis, cap: u32) -> Result<RelationSet, InvariantError> {
    let w: &WeightSystem = basis.weights();
    let m = basis.len();
    let dim = basis.rep().dim();
    let n = basis.rep().conductor();
    let mut set = RelationSet {
        basis: basis.clone(),
        relations: Vec::new(),
        degrees: Vec::new(),
        bound: cap,
    };
    if m == 0 {
        return Ok(set);
    }
    // rational generators are handled over Q for speed
    let narrowed: Option<Vec<Poly>> = basis.gens().iter().map(Poly::to_rational).collect();
    let (gens, work_n) = match narrowed {
        Some(g) => (g, 1),
        None => (basis.gens().to_vec(), n),
    };
    let mut cache = ProductCache {
        gens,
        memo: HashMap::from([(
            Monomial::one(m),
            Poly::constant(CycloScalar::one(work_n), dim),
        )]),
    };
    for degree in 1..=cap {
        let ys: Vec<Monomial> = w.monomials_of_degree(degree).collect();
        if ys.len() < 2 {
            continue;
        }
        let xs: Vec<Monomial> = WeightSystem::standard(dim)
            .monomials_of_degree(degree)
            .collect();
        let row_of: HashMap<&Monomial, usize> = xs.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let mut a = ExactMatrix::zeros(xs.len(), ys.len(), work_n);
        for (j, alpha) in ys.iter().enumerate() {
            for (mono, c) in cache.get(alpha).terms() {
                a.set(row_of[mono], j, c.clone());
            }
        }
        let kernel = a.kernel();
        if kernel.is_empty() {
            continue;
        }
        let mut ideal = set.ideal_span(degree);
        for k in kernel {
            let p = Poly::from_terms(
                m,
                n,
                ys.iter()
                    .cloned()
                    .zip(k.into_iter().map(|c| c.with_conductor(n).expect("subfield"))),
            )?;
            let r = ideal.reduce(&p);
            if r.is_zero() {
                continue;
            }
            let lead = r.leading_term().expect("nonzero").1.clone();
            let r = r.scale(&lead.invert()?);
            ideal.insert(&r);
            set.relations.push(r);
            set.degrees.push(degree);
        }
    }
    Ok(set)
}
