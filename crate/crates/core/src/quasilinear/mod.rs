//! Weighted scalings of quotient coordinates, the scaled family
//! f_t = t⁻¹·f(t·y), its limit f₀, and checks that a map sends Y to Z.
//!
//! Maps are polynomial. Only the weighted Taylor data up to the largest target
//! weight enters f₀, so a polynomial truncation of a smooth germ carries all
//! the information used here.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{lcm, CycloScalar, ExactError};
use crate::group::FieldKind;
use crate::invariants::{IdealMembership, InvariantError, RelationSet};
use crate::poly::{NumericMap, Poly, PolyError, PolyTerm, WeightSystem};
use crate::solve::{levenberg_marquardt_complex, LmOptions};
use crate::strata::{sample_quotient_points, Stratification, StrataError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuasiError {
    #[error("expected {expected} entries, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("weight system of the map does not match the relation set")]
    WeightMismatch,
    #[error("the scaling parameter must be nonzero")]
    ZeroScale,
    #[error("low-order obstruction: {0:?}")]
    LowOrderObstruction(Vec<LowOrderDefect>),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Strata(#[from] StrataError),
}

/// A component whose sub-weighted-degree part could not be shown to vanish on Y.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowOrderDefect {
    pub component: usize,
    pub degree: u32,
    /// true if the degree exceeds the relation bound rather than failing it
    pub undecided: bool,
}

/// A polynomial map from the ambient space of Y (weights d) to that of Z
/// (weights e).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMap {
    source: WeightSystem,
    target: WeightSystem,
    components: Vec<Poly>,
}

/// File form of a map's components.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapFile {
    pub conductor: u32,
    pub nvars: usize,
    pub components: Vec<Vec<PolyTerm>>,
}

impl QuotientMap {
    pub fn new(
        source: WeightSystem,
        target: WeightSystem,
        components: Vec<Poly>,
    ) -> Result<Self, QuasiError> {
        if components.len() != target.len() {
            return Err(QuasiError::Arity {
                expected: target.len(),
                got: components.len(),
            });
        }
        let n = components.iter().map(Poly::conductor).fold(1, lcm);
        let components = components
            .iter()
            .map(|c| {
                if c.nvars() != source.len() {
                    return Err(QuasiError::Arity {
                        expected: source.len(),
                        got: c.nvars(),
                    });
                }
                Ok(c.with_conductor(n)?)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            source,
            target,
            components,
        })
    }

    pub fn identity(weights: WeightSystem, conductor: u32) -> Self {
        let m = weights.len();
        Self {
            components: (0..m).map(|i| Poly::var(m, i, conductor)).collect(),
            source: weights.clone(),
            target: weights,
        }
    }

    pub fn source_weights(&self) -> &WeightSystem {
        &self.source
    }

    pub fn target_weights(&self) -> &WeightSystem {
        &self.target
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn conductor(&self) -> u32 {
        self.components.first().map_or(1, Poly::conductor)
    }

    pub fn with_conductor(&self, m: u32) -> Result<Self, QuasiError> {
        Ok(Self {
            source: self.source.clone(),
            target: self.target.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.with_conductor(m))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn numeric(&self) -> NumericMap {
        NumericMap::new(
            self.source.len(),
            self.components.iter().map(Poly::to_numeric).collect(),
        )
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            conductor: self.conductor(),
            nvars: self.source.len(),
            components: self.components.iter().map(Poly::to_json_terms).collect(),
        }
    }

    pub fn from_file(
        file: &MapFile,
        source: WeightSystem,
        target: WeightSystem,
    ) -> Result<Self, QuasiError> {
        let comps = file
            .components
            .iter()
            .map(|c| Poly::from_json_terms(c, file.nvars, file.conductor))
            .collect::<Result<_, _>>()?;
        Self::new(source, target, comps)
    }
}

/// t·y = (t^{w₁} y₁, …), exactly.
pub fn scale(
    t: &CycloScalar,
    y: &[CycloScalar],
    w: &WeightSystem,
) -> Result<Vec<CycloScalar>, QuasiError> {
    if y.len() != w.len() {
        return Err(QuasiError::Arity {
            expected: w.len(),
            got: y.len(),
        });
    }
    y.iter()
        .zip(w.weights())
        .map(|(v, &d)| Ok(t.pow(d).checked_mul(v)?))
        .collect()
}

/// t·y in double precision.
pub fn scale_numeric(t: Complex64, y: &[Complex64], w: &WeightSystem) -> Vec<Complex64> {
    y.iter()
        .zip(w.weights())
        .map(|(v, &d)| t.powu(d) * v)
        .collect()
}

/// f_t: the coefficient of y^α in component i becomes c_α t^{|α| − e_i}.
pub fn scaled_family(f: &QuotientMap, t: &BigRational) -> Result<QuotientMap, QuasiError> {
    if t.is_zero() {
        return Err(QuasiError::ZeroScale);
    }
    let n = f.conductor();
    let components = f
        .components
        .iter()
        .zip(f.target.weights())
        .map(|(c, &e)| {
            let terms = c.terms().map(|(m, coef)| {
                let k = f.source.degree_of(m) as i32 - e as i32;
                let s = if k >= 0 {
                    num_traits::pow(t.clone(), k as usize)
                } else {
                    num_traits::pow(t.recip(), (-k) as usize)
                };
                (m.clone(), coef.scale(&s))
            });
            Poly::from_terms(f.source.len(), n, terms)
        })
        .collect::<Result<_, _>>()?;
    Ok(QuotientMap {
        source: f.source.clone(),
        target: f.target.clone(),
        components,
    })
}

/// f₀: the terms of weighted degree exactly e_i in component i.
pub fn quasilinear_part(f: &QuotientMap) -> QuotientMap {
    QuotientMap {
        source: f.source.clone(),
        target: f.target.clone(),
        components: f
            .components
            .iter()
            .zip(f.target.weights())
            .map(|(c, &e)| c.weighted_component(&f.source, e))
            .collect(),
    }
}

/// f_t = f for every t.
pub fn is_quasilinear(f: &QuotientMap) -> bool {
    f.components
        .iter()
        .zip(f.target.weights())
        .all(|(c, &e)| c.terms().all(|(m, _)| f.source.degree_of(m) == e))
}

/// Removes the terms of weighted degree below e_i, provided they lie in the
/// (degree-truncated) ideal of Y.
pub fn drop_low_terms(f: &QuotientMap, rel_y: &RelationSet) -> Result<QuotientMap, QuasiError> {
    if rel_y.basis().weights() != &f.source {
        return Err(QuasiError::WeightMismatch);
    }
    let n = lcm(f.conductor(), rel_y.basis().rep().conductor());
    let rel_y = rel_y.with_conductor(n)?;
    let mut defects = Vec::new();
    let mut components = Vec::new();
    for (i, (c, &e)) in f.components.iter().zip(f.target.weights()).enumerate() {
        let low = c.weighted_below(&f.source, e);
        if !low.is_zero() {
            match rel_y.membership(&low.with_conductor(n)?) {
                IdealMembership::Member => {}
                IdealMembership::NotMember { degree } => defects.push(LowOrderDefect {
                    component: i,
                    degree,
                    undecided: false,
                }),
                IdealMembership::Undecided { degree } => defects.push(LowOrderDefect {
                    component: i,
                    degree,
                    undecided: true,
                }),
            }
        }
        components.push(c.checked_sub(&low)?);
    }
    if !defects.is_empty() {
        return Err(QuasiError::LowOrderObstruction(defects));
    }
    Ok(QuotientMap {
        source: f.source.clone(),
        target: f.target.clone(),
        components,
    })
}

/// Degree-truncated exact verdict on r∘f ∈ I(Y) for every relation r of Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certification {
    /// every pulled-back relation lies in the ideal
    Certified { degree: u32 },
    /// a pulled-back relation has a component outside the ideal
    Refuted { degree: u32 },
    /// components up to the bound lie in the ideal, higher ones are unchecked
    Partial { degree: u32 },
}

#[derive(Clone, Debug, Serialize)]
pub struct MapVerdict {
    pub passes: bool,
    pub samples: usize,
    pub max_residual: f64,
    pub certification: Certification,
}

/// Checks that f sends Y into Z: numerically on sampled points of Y and
/// exactly up to the relation bound of Y.
pub fn maps_y_to_z(
    f: &QuotientMap,
    rel_y: &RelationSet,
    rel_z: &RelationSet,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<MapVerdict, QuasiError> {
    if rel_y.basis().weights() != &f.source || rel_z.basis().weights() != &f.target {
        return Err(QuasiError::WeightMismatch);
    }
    let fnum = f.numeric();
    let mut max_residual: f64 = 0.0;
    let points = sample_quotient_points(rel_y.basis(), samples, 1.0, seed)?;
    for y in &points {
        let z = fnum.eval(y);
        let res = rel_z.residuals(&z).into_iter().fold(0.0, f64::max);
        max_residual = max_residual.max(res);
    }
    let n = lcm(
        lcm(f.conductor(), rel_y.basis().rep().conductor()),
        rel_z.basis().rep().conductor(),
    );
    let rel_y_n = rel_y.with_conductor(n)?;
    let comps: Vec<Poly> = f
        .components
        .iter()
        .map(|c| c.with_conductor(n))
        .collect::<Result<_, _>>()?;
    let mut certification = Certification::Certified {
        degree: rel_y.weighted_degree_bound(),
    };
    for r in rel_z.relations() {
        let pulled = r.with_conductor(n)?.compose(&comps)?;
        match rel_y_n.membership(&pulled) {
            IdealMembership::Member => {}
            IdealMembership::NotMember { degree } => {
                certification = Certification::Refuted { degree };
                break;
            }
            IdealMembership::Undecided { .. } => {
                certification = Certification::Partial {
                    degree: rel_y.weighted_degree_bound(),
                };
            }
        }
    }
    let numeric_ok = max_residual <= tol;
    Ok(MapVerdict {
        passes: numeric_ok && !matches!(certification, Certification::Refuted { .. }),
        samples: points.len(),
        max_residual,
        certification,
    })
}

/// max over samples of |f_t(y) − f₀(y)| for each t, with the log-log slope.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<(f64, f64)>,
    pub slope: f64,
}

pub fn convergence_table(f: &QuotientMap, samples: &[Vec<Complex64>], ts: &[f64]) -> ConvergenceTable {
    let f0 = quasilinear_part(f).numeric();
    let fnum = f.numeric();
    let rows: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| {
            let tc = Complex64::new(t, 0.0);
            let dev = samples
                .iter()
                .map(|y| {
                    let fy = fnum.eval(&scale_numeric(tc, y, &f.source));
                    let ft: Vec<Complex64> = fy
                        .iter()
                        .zip(f.target.weights())
                        .map(|(v, &e)| v / tc.powu(e))
                        .collect();
                    ft.iter()
                        .zip(f0.eval(y))
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            (t, dev)
        })
        .collect();
    ConvergenceTable {
        slope: log_log_slope(&rows),
        rows,
    }
}

/// Least-squares slope of log(dev) against log(t); NaN without two positive rows.
pub fn log_log_slope(rows: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(t, d)| *t > 0.0 && *d > 0.0)
        .map(|(t, d)| (t.ln(), d.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Where sampled points of a codimension-one component of Y land.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentMatch {
    pub source: usize,
    pub target: Option<usize>,
    pub max_residual: f64,
}

/// For each codimension-one component C_i of Y, the component D_j of Z
/// whose closure contains f of every sampled point of C̄_i, if any.
pub fn component_matching(
    f: &QuotientMap,
    strat_y: &Stratification,
    strat_z: &Stratification,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<ComponentMatch>, QuasiError> {
    let (by, bz) = (strat_y.basis(), strat_z.basis());
    if by.weights() != &f.source || bz.weights() != &f.target {
        return Err(QuasiError::WeightMismatch);
    }
    let fnum = f.numeric();
    let pz = bz.numeric_map();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let complex = by.rep().field() == FieldKind::Complex;
    let mut out = Vec::new();
    for comp in strat_y.codim_one() {
        let hyper = &strat_y.classes()[comp.class_index].representative().fixed_space;
        let images: Vec<Vec<Complex64>> = (0..samples)
            .map(|_| {
                let mut v = vec![Complex64::new(0.0, 0.0); by.rep().dim()];
                for b in hyper {
                    let c = Complex64::new(
                        rng.gen_range(-1.0..1.0),
                        if complex { rng.gen_range(-1.0..1.0) } else { 0.0 },
                    );
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += bi.embed_numeric() * c;
                    }
                }
                fnum.eval(&by.numeric_map().eval(&v))
            })
            .collect();
        let mut matched = None;
        let mut best_overall = f64::INFINITY;
        for target in strat_z.codim_one() {
            let plane = &strat_z.classes()[target.class_index].representative().fixed_space;
            let frame: Vec<Vec<Complex64>> = plane
                .iter()
                .map(|b| b.iter().map(CycloScalar::embed_numeric).collect())
                .collect();
            let mut worst: f64 = 0.0;
            for z in &images {
                let r = preimage_residual(pz, &frame, z, &mut rng);
                worst = worst.max(r);
                if worst > tol {
                    break;
                }
            }
            best_overall = best_overall.min(worst);
            if worst <= tol {
                matched = Some(target.id);
                break;
            }
        }
        out.push(ComponentMatch {
            source: comp.id,
            target: matched,
            max_residual: best_overall,
        });
    }
    Ok(out)
}

/// Smallest |p(Σ c_i b_i) − z| found over complex c by multi-start LM.
fn preimage_residual(
    p: &NumericMap,
    frame: &[Vec<Complex64>],
    z: &[Complex64],
    rng: &mut ChaCha8Rng,
) -> f64 {
    let dim = p.nvars();
    let k = frame.len();
    let target = DVector::from_column_slice(z);
    let point = |c: &[Complex64]| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for (ci, b) in c.iter().zip(frame) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += bi * ci;
            }
        }
        v
    };
    let f = |c: &[Complex64]| {
        let v = point(c);
        let r = DVector::from_vec(p.eval(&v)) - &target;
        let jv = p.jacobian(&v);
        let mut j = DMatrix::zeros(p.len(), k);
        for (col, b) in frame.iter().enumerate() {
            let bv = DVector::from_column_slice(b);
            j.set_column(col, &(&jv * bv));
        }
        (r, j)
    };
    let radius = z.iter().map(|v| v.norm()).fold(0.0, f64::max).sqrt().max(0.1);
    let mut best = f64::INFINITY;
    for _ in 0..8 {
        let c0: Vec<Complex64> = (0..k)
            .map(|_| Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius)))
            .collect();
        let out = levenberg_marquardt_complex(f, &c0, LmOptions { tol: 1e-12, max_iter: 60 });
        best = best.min(out.residual);
        if out.converged {
            break;
        }
    }
    best
}

/// A rational number t = 1/2^j, the standard ladder for convergence tables.
pub fn dyadic(j: u32) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(1u64 << j))
}
