//! The invariant ring of a finite group: averaging, Molien series,
//! homogeneous generators, the orbit map and degree-bounded relations.

mod generators;
mod relations;
mod span;

pub use generators::generators;
pub use relations::{relations, IdealMembership, RelationSet};
pub use span::PolySpan;

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::exact::{CycloScalar, ExactError, ExactMatrix};
use crate::group::{GroupError, Representation};
use crate::poly::{NumericMap, Poly, PolyError, WeightSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("Molien coefficient in degree {0} is not a rational integer")]
    MolienNotInteger(usize),
    #[error("degree {degree}: {found} independent invariants but the Molien series predicts {expected}")]
    MolienMismatch {
        degree: usize,
        expected: u64,
        found: usize,
    },
    #[error("point has {got} coordinates, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("orbit test and invariant test disagree at {0}")]
    SeparationMismatch(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// (1/|G|) Σ_g f∘g.
pub fn reynolds(rep: &Representation, f: &Poly) -> Result<Poly, InvariantError> {
    let mut acc = Poly::zero(f.nvars(), f.conductor());
    for g in rep.elements() {
        acc = acc.checked_add(&f.act_linear(g)?)?;
    }
    let inv = BigRational::new(BigInt::one(), BigInt::from(rep.order()));
    Ok(acc.scale_rational(&inv))
}

/// Coefficients of det(I − t·g) in t, lowest first (Faddeev–LeVerrier).
fn det_one_minus_tg(g: &ExactMatrix) -> Vec<CycloScalar> {
    let n = g.rows();
    let cond = g.conductor();
    // c[j] is the coefficient of λ^j in det(λI − g)
    let mut c = vec![CycloScalar::zero(cond); n + 1];
    c[n] = CycloScalar::one(cond);
    let id = ExactMatrix::identity(n, cond);
    let mut m = ExactMatrix::zeros(n, n, cond);
    for k in 1..=n {
        m = g
            .checked_mul(&m)
            .and_then(|am| am.checked_add(&id.scale(&c[n - k + 1])))
            .expect("square");
        let am = g.checked_mul(&m).expect("square");
        let mut tr = CycloScalar::zero(cond);
        for i in 0..n {
            tr += am.get(i, i);
        }
        c[n - k] = -tr.scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
    }
    // det(I − t g) = t^n p(1/t)
    (0..=n).map(|k| c[n - k].clone()).collect()
}

/// Dimensions of the degree-d invariants for d = 0..=max_degree.
pub fn molien(rep: &Representation, max_degree: usize) -> Result<Vec<u64>, InvariantError> {
    let cond = rep.conductor();
    let mut total = vec![CycloScalar::zero(cond); max_degree + 1];
    let mut cache: HashMap<Vec<CycloScalar>, Vec<CycloScalar>> = HashMap::new();
    for g in rep.elements() {
        let den = det_one_minus_tg(g);
        let series = cache.entry(den.clone()).or_insert_with(|| {
            // 1 / (1 + a₁t + …), term by term
            let mut b = vec![CycloScalar::zero(cond); max_degree + 1];
            b[0] = CycloScalar::one(cond);
            for k in 1..=max_degree {
                let mut s = CycloScalar::zero(cond);
                for j in 1..=k.min(den.len() - 1) {
                    s += &(&den[j] * &b[k - j]);
                }
                b[k] = -s;
            }
            b
        });
        for (t, s) in total.iter_mut().zip(series.iter()) {
            *t += s;
        }
    }
    let inv = BigRational::new(BigInt::one(), BigInt::from(rep.order()));
    total
        .into_iter()
        .enumerate()
        .map(|(d, t)| {
            let t = t.scale(&inv);
            match t.as_rational() {
                Some(q) if q.is_integer() && !q.is_negative() => {
                    Ok(q.to_integer().try_into().map_err(|_| InvariantError::MolienNotInteger(d))?)
                }
                _ => Err(InvariantError::MolienNotInteger(d)),
            }
        })
        .collect()
}

/// Homogeneous generators p₁,…,p_m of the invariant ring.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    rep: Representation,
    gens: Vec<Poly>,
    degrees: Vec<u32>,
    weights: WeightSystem,
    molien: Vec<u64>,
    cap: usize,
    numeric: OnceLock<NumericMap>,
}

impl InvariantBasis {
    pub(crate) fn new(
        rep: Representation,
        gens: Vec<Poly>,
        molien: Vec<u64>,
        cap: usize,
    ) -> Self {
        let degrees: Vec<u32> = gens
            .iter()
            .map(|g| g.total_degree().expect("nonzero generator"))
            .collect();
        let weights = WeightSystem::new(degrees.clone()).expect("positive degrees");
        Self {
            rep,
            gens,
            degrees,
            weights,
            molien,
            cap,
            numeric: OnceLock::new(),
        }
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    /// Molien coefficients up to the degree cap used for the computation.
    pub fn molien(&self) -> &[u64] {
        &self.molien
    }

    pub fn degree_cap(&self) -> usize {
        self.cap
    }

    /// Noether's bound |G| guarantees completeness for caps at least |G|.
    pub fn is_certified_complete(&self) -> bool {
        self.cap >= self.rep.order()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn numeric_map(&self) -> &NumericMap {
        self.numeric.get_or_init(|| {
            NumericMap::new(
                self.rep.dim(),
                self.gens.iter().map(Poly::to_numeric).collect(),
            )
        })
    }

    /// (p₁(v),…,p_m(v)) exactly.
    pub fn orbit_map(&self, v: &[CycloScalar]) -> Result<Vec<CycloScalar>, InvariantError> {
        if v.len() != self.rep.dim() {
            return Err(InvariantError::Arity {
                expected: self.rep.dim(),
                got: v.len(),
            });
        }
        self.gens
            .iter()
            .map(|g| g.evaluate(v).map_err(InvariantError::from))
            .collect()
    }

    /// (p₁(v),…,p_m(v)) in double precision.
    pub fn orbit_map_numeric(&self, v: &[Complex64]) -> Result<Vec<Complex64>, InvariantError> {
        if v.len() != self.rep.dim() {
            return Err(InvariantError::Arity {
                expected: self.rep.dim(),
                got: v.len(),
            });
        }
        Ok(self.numeric_map().eval(v))
    }

    /// The same basis with coefficients in Q(ζ_m).
    pub fn with_conductor(&self, m: u32) -> Result<Self, InvariantError> {
        Ok(Self::new(
            self.rep.with_conductor(m)?,
            self.gens
                .iter()
                .map(|g| g.with_conductor(m))
                .collect::<Result<_, _>>()?,
            self.molien.clone(),
            self.cap,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitVerdict {
    SameOrbit,
    DifferentOrbit,
}

/// Decides whether `w ∈ G·v` by an exact scan, cross-checked against the
/// orbit map.
pub fn separates(
    basis: &InvariantBasis,
    v: &[CycloScalar],
    w: &[CycloScalar],
) -> Result<OrbitVerdict, InvariantError> {
    let orbit = basis.rep().orbit(v)?;
    if w.len() != basis.rep().dim() {
        return Err(InvariantError::Arity {
            expected: basis.rep().dim(),
            got: w.len(),
        });
    }
    let same = orbit.iter().any(|u| u.as_slice() == w);
    let invariants_equal = basis.orbit_map(v)? == basis.orbit_map(w)?;
    if same != invariants_equal {
        return Err(InvariantError::SeparationMismatch(format!("{:?} vs {:?}", v, w)));
    }
    Ok(if same {
        OrbitVerdict::SameOrbit
    } else {
        OrbitVerdict::DifferentOrbit
    })
}
