//! Sparse multivariate polynomials over Q(ζ_n), with ordinary and weighted
//! gradings.

mod numeric;

pub use numeric::{NumericMap, NumericPoly};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{parse_scalar, scalar_to_literal, CycloScalar, ExactError, ExactMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("weights must be positive integers")]
    BadWeights,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Exponent vector α. Ordered graded-lexicographically: total degree first,
/// then lexicographic with x₁ > x₂ > ….
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// α! = Π αᵢ!
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &e in &self.0 {
            for k in 2..=e {
                acc *= k;
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Positive integer weights (d₁,…,d_m) defining |α| = Σ dᵢαᵢ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightSystem(Vec<u32>);

impl WeightSystem {
    pub fn new(weights: Vec<u32>) -> Result<Self, PolyError> {
        if weights.iter().any(|&w| w == 0) {
            return Err(PolyError::BadWeights);
        }
        Ok(WeightSystem(weights))
    }

    pub fn standard(nvars: usize) -> Self {
        WeightSystem(vec![1; nvars])
    }

    pub fn weights(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree_of(&self, m: &Monomial) -> u32 {
        self.0.iter().zip(m.exps()).map(|(w, e)| w * e).sum()
    }

    /// Every monomial of weighted degree `deg`, ascending in graded-lex order.
    pub fn monomials_of_degree(&self, deg: u32) -> impl Iterator<Item = Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.0.len()];
        enumerate_weighted(&self.0, 0, deg, &mut cur, &mut out);
        out.sort();
        out.into_iter()
    }
}

fn enumerate_weighted(w: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if i == w.len() {
        if left == 0 {
            out.push(Monomial(cur.clone()));
        }
        return;
    }
    for e in 0..=left / w[i] {
        cur[i] = e;
        enumerate_weighted(w, i + 1, left - e * w[i], cur, out);
    }
    cur[i] = 0;
}

/// A polynomial in `nvars` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    conductor: u32,
    terms: BTreeMap<Monomial, CycloScalar>,
}

/// One term of the JSON polynomial format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coeff: Vec<String>,
    pub exps: Vec<u32>,
}

impl Poly {
    pub fn zero(nvars: usize, conductor: u32) -> Self {
        Self {
            nvars,
            conductor,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: CycloScalar, nvars: usize) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize, conductor: u32) -> Self {
        Self::term(Monomial::var(nvars, i), CycloScalar::one(conductor))
    }

    pub fn term(m: Monomial, c: CycloScalar) -> Self {
        let mut p = Self::zero(m.nvars(), c.conductor());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(
        nvars: usize,
        conductor: u32,
        terms: impl IntoIterator<Item = (Monomial, CycloScalar)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(nvars, conductor);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(PolyError::Arity {
                    expected: nvars,
                    got: m.nvars(),
                });
            }
            if c.conductor() != conductor {
                return Err(ExactError::ConductorMismatch(conductor, c.conductor()).into());
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &CycloScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> CycloScalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| CycloScalar::zero(self.conductor))
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &CycloScalar)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn is_weighted_homogeneous(&self, w: &WeightSystem) -> bool {
        let mut degs = self.terms.keys().map(|m| w.degree_of(m));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn add_term(&mut self, m: Monomial, c: CycloScalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn compatible(&self, other: &Poly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::Arity {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        if self.conductor != other.conductor {
            return Err(ExactError::ConductorMismatch(self.conductor, other.conductor).into());
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.compatible(other)?;
        let mut out = Poly::zero(self.nvars, self.conductor);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: &CycloScalar) -> Poly {
        let mut out = Poly::zero(self.nvars, self.conductor);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn scale_rational(&self, q: &BigRational) -> Poly {
        let mut out = Poly::zero(self.nvars, self.conductor);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.scale(q));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(CycloScalar::one(self.conductor), self.nvars);
        for _ in 0..e {
            acc = acc.checked_mul(self).expect("same ring");
        }
        acc
    }

    /// Complex conjugation of every coefficient.
    pub fn conj(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
            ..self.clone()
        }
    }

    pub fn with_conductor(&self, m: u32) -> Result<Poly, PolyError> {
        Ok(Poly {
            nvars: self.nvars,
            conductor: m,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| Ok((k.clone(), c.with_conductor(m)?)))
                .collect::<Result<_, ExactError>>()?,
        })
    }

    /// The same polynomial over Q, if every coefficient is rational.
    pub fn to_rational(&self) -> Option<Poly> {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| Some((k.clone(), CycloScalar::from_rational(c.as_rational()?.clone(), 1))))
            .collect::<Option<_>>()?;
        Some(Poly {
            nvars: self.nvars,
            conductor: 1,
            terms,
        })
    }

    pub fn evaluate(&self, point: &[CycloScalar]) -> Result<CycloScalar, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::Arity {
                expected: self.nvars,
                got: point.len(),
            });
        }
        if let Some(bad) = point.iter().find(|p| p.conductor() != self.conductor) {
            return Err(ExactError::ConductorMismatch(self.conductor, bad.conductor()).into());
        }
        let mut acc = CycloScalar::zero(self.conductor);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exps()) {
                if e > 0 {
                    t = &t * &x.pow(e);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Substitutes yᵢ ↦ gᵢ.
    pub fn compose(&self, g: &[Poly]) -> Result<Poly, PolyError> {
        if g.len() != self.nvars {
            return Err(PolyError::Arity {
                expected: self.nvars,
                got: g.len(),
            });
        }
        let k = match g.first() {
            Some(p) => p.nvars,
            None => {
                return Ok(Poly {
                    nvars: 0,
                    ..self.clone()
                })
            }
        };
        for p in g {
            if p.nvars != k {
                return Err(PolyError::Arity {
                    expected: k,
                    got: p.nvars,
                });
            }
            if p.conductor != self.conductor {
                return Err(ExactError::ConductorMismatch(self.conductor, p.conductor).into());
            }
        }
        let mut powers: Vec<Vec<Poly>> = g
            .iter()
            .map(|p| vec![Poly::constant(CycloScalar::one(self.conductor), k), p.clone()])
            .collect();
        let mut out = Poly::zero(k, self.conductor);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone(), k);
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().checked_mul(&g[i])?;
                    powers[i].push(next);
                }
                t = t.checked_mul(&powers[i][e as usize])?;
            }
            for (mm, cc) in t.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// The terms of weighted degree exactly `deg`.
    pub fn weighted_component(&self, w: &WeightSystem, deg: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| w.degree_of(m) == deg)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            ..self.clone()
        }
    }

    /// The terms of weighted degree strictly below `deg`.
    pub fn weighted_below(&self, w: &WeightSystem, deg: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| w.degree_of(m) < deg)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
            ..self.clone()
        }
    }

    /// Distinct weighted degrees occurring in the polynomial, ascending.
    pub fn weighted_degrees(&self, w: &WeightSystem) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|m| w.degree_of(m)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Precomposition with a linear map: returns f∘g, i.e. (f∘g)(v) = f(g·v).
    pub fn act_linear(&self, g: &ExactMatrix) -> Result<Poly, PolyError> {
        if !g.is_square() || g.rows() != self.nvars {
            return Err(ExactError::Shape(format!(
                "{}x{} matrix acting on polynomials in {} variables",
                g.rows(),
                g.cols(),
                self.nvars
            ))
            .into());
        }
        if g.conductor() != self.conductor {
            return Err(ExactError::ConductorMismatch(self.conductor, g.conductor()).into());
        }
        let forms: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                let mut p = Poly::zero(self.nvars, self.conductor);
                for j in 0..self.nvars {
                    p.add_term(Monomial::var(self.nvars, j), g.get(i, j).clone());
                }
                p
            })
            .collect();
        self.compose(&forms)
    }

    /// Σ α! · aα · conj(bα), an inner product invariant under unitary changes
    /// of coordinates.
    pub fn fischer_inner(&self, other: &Poly) -> Result<CycloScalar, PolyError> {
        self.compatible(other)?;
        let mut acc = CycloScalar::zero(self.conductor);
        for (m, a) in &self.terms {
            if let Some(b) = other.terms.get(m) {
                let w = BigRational::from_integer(m.factorial());
                acc += &(a * &b.conj()).scale(&w);
            }
        }
        Ok(acc)
    }

    pub fn to_numeric(&self) -> NumericPoly {
        NumericPoly::new(
            self.nvars,
            self.terms
                .iter()
                .map(|(m, c)| (m.exps().to_vec(), c.embed_numeric()))
                .collect(),
        )
    }

    pub fn to_json_terms(&self) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| PolyTerm {
                coeff: scalar_to_literal(c),
                exps: m.exps().to_vec(),
            })
            .collect()
    }

    pub fn from_json_terms(terms: &[PolyTerm], nvars: usize, conductor: u32) -> Result<Self, PolyError> {
        let parsed = terms
            .iter()
            .map(|t| {
                Ok((
                    Monomial::new(t.exps.clone()),
                    parse_scalar(&t.coeff, conductor)?,
                ))
            })
            .collect::<Result<Vec<_>, PolyError>>()?;
        Self::from_terms(nvars, conductor, parsed)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Poly {
    /// Human-readable form with variables named `{var}1`, `{var}2`, ….
    pub fn render(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            out.push_str(&format!("({})", c));
            for (i, &e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => out.push_str(&format!("*{}{}", var, i + 1)),
                    _ => out.push_str(&format!("*{}{}^{}", var, i + 1, e)),
                }
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}
