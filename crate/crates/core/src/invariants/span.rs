//! Incremental reduced echelon spans of polynomials sharing a finite monomial
//! support.

use std::collections::HashMap;

use crate::exact::CycloScalar;
use crate::poly::{Monomial, Poly};

/// Linear span of polynomials supported on a fixed monomial list. Columns are
/// ordered by descending graded-lex order, so pivots are leading monomials.
#[derive(Clone, Debug)]
pub struct PolySpan {
    nvars: usize,
    conductor: u32,
    monomials: Vec<Monomial>,
    column: HashMap<Monomial, usize>,
    rows: Vec<Vec<CycloScalar>>,
    pivots: Vec<usize>,
}

impl PolySpan {
    /// `monomials` in any order; they are sorted descending internally.
    pub fn new(nvars: usize, conductor: u32, mut monomials: Vec<Monomial>) -> Self {
        monomials.sort();
        monomials.reverse();
        let column = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Self {
            nvars,
            conductor,
            monomials,
            column,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Coordinates of `p`; `None` if it uses a monomial outside the support.
    fn coords(&self, p: &Poly) -> Option<Vec<CycloScalar>> {
        let mut v = vec![CycloScalar::zero(self.conductor); self.monomials.len()];
        for (m, c) in p.terms() {
            v[*self.column.get(m)?] = c.clone();
        }
        Some(v)
    }

    fn to_poly(&self, v: Vec<CycloScalar>) -> Poly {
        Poly::from_terms(
            self.nvars,
            self.conductor,
            self.monomials.iter().cloned().zip(v),
        )
        .expect("support monomials have the right arity")
    }

    fn reduce_coords(&self, mut v: Vec<CycloScalar>) -> Vec<CycloScalar> {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = &*x - &(&f * r);
                }
            }
        }
        v
    }

    /// Normal form of `p` modulo the span (zero iff `p` lies in the span).
    /// Panics if `p` leaves the support.
    pub fn reduce(&self, p: &Poly) -> Poly {
        let v = self.coords(p).expect("polynomial outside the span's support");
        self.to_poly(self.reduce_coords(v))
    }

    pub fn contains(&self, p: &Poly) -> bool {
        match self.coords(p) {
            Some(v) => self.reduce_coords(v).iter().all(CycloScalar::is_zero),
            None => false,
        }
    }

    /// Adds `p`; returns false if it was already in the span.
    pub fn insert(&mut self, p: &Poly) -> bool {
        let v = self.coords(p).expect("polynomial outside the span's support");
        let mut w = self.reduce_coords(v);
        let Some(piv) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[piv].invert().expect("nonzero pivot");
        for x in w.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if row[piv].is_zero() {
                continue;
            }
            let f = row[piv].clone();
            for (x, r) in row.iter_mut().zip(&w) {
                if !r.is_zero() {
                    *x = &*x - &(&f * r);
                }
            }
        }
        self.rows.push(w);
        self.pivots.push(piv);
        true
    }
}
