//! Isotropy-type stratification of the quotient, codimension-one components
//! with their reflection orders, and real points of the quotient.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{lcm, CycloScalar, ExactError, ExactMatrix};
use crate::group::{self, is_pseudoreflection, GroupError, IsotropyClass};
use crate::invariants::{InvariantBasis, InvariantError, RelationSet};
use crate::poly::{Poly, PolyError};
use crate::solve::{levenberg_marquardt, LmOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("point has {got} coordinates, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// One isotropy type.
#[derive(Clone, Debug, Serialize)]
pub struct Stratum {
    pub class_index: usize,
    pub order: usize,
    pub fixed_dim: usize,
    /// dim V − dim V^K
    pub codim: usize,
    pub conjugates: usize,
    pub principal: bool,
}

/// A codimension-one stratum with the order of its generating pseudoreflection.
#[derive(Clone, Debug, Serialize)]
pub struct CodimOneComponent {
    pub id: usize,
    pub class_index: usize,
    /// element index of the chosen pseudoreflection g_j
    pub pseudoreflection: usize,
    pub order: u32,
}

#[derive(Clone, Debug)]
pub struct Stratification {
    basis: InvariantBasis,
    classes: Vec<IsotropyClass>,
    strata: Vec<Stratum>,
    codim_one: Vec<CodimOneComponent>,
    reflection_locus: Vec<Subspace>,
    deep_locus: Vec<Subspace>,
}

/// A linear subspace with an exact basis and a numeric orthonormal frame.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub basis: Vec<Vec<CycloScalar>>,
    /// codim-one component id for hyperplanes of V₁
    pub component: Option<usize>,
    /// for hyperplanes: the pseudoreflection generating its isotropy group
    pub reflection: Option<usize>,
    frame: DMatrix<Complex64>,
    /// for hyperplanes: the line im(g − 1) and the coordinate along it
    transverse: Option<(DVector<Complex64>, DVector<Complex64>)>,
}

impl Subspace {
    fn new(basis: Vec<Vec<CycloScalar>>, dim: usize, component: Option<usize>) -> Self {
        let frame = if basis.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            let m = DMatrix::from_fn(dim, basis.len(), |i, j| basis[j][i].embed_numeric());
            m.qr().q()
        };
        Self {
            basis,
            component,
            reflection: None,
            frame,
            transverse: None,
        }
    }

    fn hyperplane(
        basis: Vec<Vec<CycloScalar>>,
        rep: &crate::group::Representation,
        reflection: usize,
        component: usize,
    ) -> Self {
        let dim = rep.dim();
        let mut s = Self::new(basis, dim, Some(component));
        let g = rep.element(reflection).embed_numeric();
        let gm = g - DMatrix::<Complex64>::identity(dim, dim);
        let col = (0..dim)
            .map(|j| gm.column(j).into_owned())
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("nonzero");
        let e = &col / Complex64::new(col.norm(), 0.0);
        let mut m = DMatrix::zeros(dim, dim);
        for (j, b) in s.basis.iter().enumerate() {
            for i in 0..dim {
                m[(i, j)] = b[i].embed_numeric();
            }
        }
        m.set_column(dim - 1, &e);
        let inv = m.try_inverse().expect("hyperplane and transverse line span V");
        let coord = inv.row(dim - 1).transpose();
        s.reflection = Some(reflection);
        s.transverse = Some((e, coord));
        s
    }

    /// For a hyperplane: v = x + y·e with x in the hyperplane; returns (x, y, e).
    pub fn split(&self, v: &[Complex64]) -> Option<(Vec<Complex64>, Complex64, Vec<Complex64>)> {
        let (e, coord) = self.transverse.as_ref()?;
        let y: Complex64 = coord.iter().zip(v).map(|(a, b)| a * b).sum();
        let x = v.iter().zip(e.iter()).map(|(vi, ei)| vi - y * ei).collect();
        Some((x, y, e.iter().copied().collect()))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Euclidean distance from a point of V_C.
    pub fn distance(&self, v: &[Complex64]) -> f64 {
        let v = DVector::from_column_slice(v);
        let proj = &self.frame * (self.frame.adjoint() * &v);
        (v - proj).norm()
    }
}

impl Stratification {
    pub fn basis(&self) -> &InvariantBasis {
        &self.basis
    }

    pub fn classes(&self) -> &[IsotropyClass] {
        &self.classes
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn codim_one(&self) -> &[CodimOneComponent] {
        &self.codim_one
    }

    /// Union of reflection hyperplanes (V₁), one entry per hyperplane.
    pub fn reflection_locus(&self) -> &[Subspace] {
        &self.reflection_locus
    }

    /// Fixed spaces of codimension at least two with nontrivial isotropy (V₂).
    pub fn deep_locus(&self) -> &[Subspace] {
        &self.deep_locus
    }

    pub fn distance_to_deep_locus(&self, v: &[Complex64]) -> f64 {
        self.deep_locus
            .iter()
            .map(|s| s.distance(v))
            .fold(f64::INFINITY, f64::min)
    }

    /// Nearest reflection hyperplane: (distance, component id).
    pub fn nearest_hyperplane(&self, v: &[Complex64]) -> Option<(f64, usize)> {
        self.reflection_locus
            .iter()
            .map(|s| (s.distance(v), s.component.expect("hyperplane")))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }

    /// Index of the stratum containing an exact point.
    pub fn classify(&self, v: &[CycloScalar]) -> Result<usize, StrataError> {
        let rec = group::isotropy(self.basis.rep(), v)?;
        Ok(self
            .classes
            .iter()
            .position(|c| c.members.iter().any(|m| m.element_indices == rec.element_indices))
            .expect("isotropy groups are enumerated"))
    }
}

pub fn stratify(basis: &InvariantBasis) -> Result<Stratification, StrataError> {
    let rep = basis.rep();
    let dim = rep.dim();
    let classes = group::isotropy_classes(rep)?;
    let mut strata = Vec::new();
    let mut codim_one = Vec::new();
    let mut reflection_locus = Vec::new();
    let mut deep_locus = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        let codim = dim - class.fixed_dim;
        strata.push(Stratum {
            class_index: ci,
            order: class.order,
            fixed_dim: class.fixed_dim,
            codim,
            conjugates: class.members.len(),
            principal: class.order == 1,
        });
        if class.order == 1 {
            continue;
        }
        if codim == 1 {
            let id = codim_one.len();
            let g = class
                .representative()
                .element_indices
                .iter()
                .copied()
                .find(|&g| rep.element_order(g) == class.order)
                .expect("isotropy group of a hyperplane is cyclic");
            let r = is_pseudoreflection(rep.element(g)).expect("generator fixes a hyperplane");
            debug_assert_eq!(r as usize, class.order);
            codim_one.push(CodimOneComponent {
                id,
                class_index: ci,
                pseudoreflection: g,
                order: r,
            });
            for m in &class.members {
                let gm = m
                    .element_indices
                    .iter()
                    .copied()
                    .find(|&x| rep.element_order(x) == class.order)
                    .expect("cyclic");
                reflection_locus.push(Subspace::hyperplane(m.fixed_space.clone(), rep, gm, id));
            }
        } else {
            for m in &class.members {
                deep_locus.push(Subspace::new(m.fixed_space.clone(), dim, None));
            }
        }
    }
    Ok(Stratification {
        basis: basis.clone(),
        classes,
        strata,
        codim_one,
        reflection_locus,
        deep_locus,
    })
}

/// True iff the isotropy group of `v` is trivial.
pub fn is_principal(basis: &InvariantBasis, v: &[CycloScalar]) -> Result<bool, StrataError> {
    Ok(group::isotropy(basis.rep(), v)?.order() == 1)
}

#[derive(Clone, Copy, Debug)]
pub struct MembershipOptions {
    /// Largest accepted relation residual for a point to count as on Y.
    pub tol: f64,
    pub lm: LmOptions,
    pub starts: usize,
    pub seed: u64,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            lm: LmOptions::default(),
            starts: 16,
            seed: 0,
        }
    }
}

/// A preimage of a real point of Y inside W_h = W_{h+} ⊕ iW_{h−}.
#[derive(Clone, Debug, Serialize)]
pub struct RealPointCertificate {
    pub point: Vec<f64>,
    /// element index of h (0 is the identity)
    pub h: usize,
    pub plus_coords: Vec<f64>,
    pub minus_coords: Vec<f64>,
    /// the preimage as a point of V_C, as (re, im) pairs
    pub witness: Vec<(f64, f64)>,
    pub residual: f64,
    pub relation_residual: f64,
    pub relation_bound: u32,
}

#[derive(Clone, Debug)]
pub enum RealMembership {
    Certified(RealPointCertificate),
    NotOnY { residual: f64 },
    NoCertificate { best_residual: f64 },
}

/// The generators restricted to W_h, as exact polynomials in the real
/// coordinates (a on W_{h+}, c on W_{h−}).
pub struct RestrictedOrbitMap {
    pub h: usize,
    pub plus: Vec<Vec<CycloScalar>>,
    pub minus: Vec<Vec<CycloScalar>>,
    pub conductor: u32,
    pub polys: Vec<Poly>,
}

pub fn restricted_orbit_map(
    basis: &InvariantBasis,
    h: usize,
) -> Result<RestrictedOrbitMap, StrataError> {
    let rep = basis.rep();
    let (dim, n) = (rep.dim(), rep.conductor());
    let id = ExactMatrix::identity(dim, n);
    let g = rep.element(h);
    let plus = g.checked_sub(&id)?.kernel();
    let minus = g.checked_add(&id)?.kernel();
    let big = if minus.is_empty() { n } else { lcm(n, 4) };
    let i = if minus.is_empty() {
        CycloScalar::one(big)
    } else {
        CycloScalar::imaginary_unit(big)?
    };
    let k = plus.len() + minus.len();
    let mut coords = Vec::with_capacity(dim);
    for row in 0..dim {
        let mut terms = Vec::new();
        for (j, b) in plus.iter().enumerate() {
            terms.push((crate::poly::Monomial::var(k, j), b[row].with_conductor(big)?));
        }
        for (j, b) in minus.iter().enumerate() {
            let c = &b[row].with_conductor(big)? * &i;
            terms.push((crate::poly::Monomial::var(k, plus.len() + j), c));
        }
        coords.push(Poly::from_terms(k, big, terms)?);
    }
    let polys = basis
        .gens()
        .iter()
        .map(|p| p.with_conductor(big)?.compose(&coords))
        .collect::<Result<_, _>>()?;
    Ok(RestrictedOrbitMap {
        h,
        plus,
        minus,
        conductor: big,
        polys,
    })
}

/// Random points of Y: images of real points of W_h for h = 1 and each
/// central involution in turn (real actions), or of complex points of V.
pub fn sample_quotient_points(
    basis: &InvariantBasis,
    count: usize,
    radius: f64,
    seed: u64,
) -> Result<Vec<Vec<Complex64>>, StrataError> {
    let rep = basis.rep();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rep.field() == group::FieldKind::Complex {
        return (0..count)
            .map(|_| {
                let v: Vec<Complex64> = (0..rep.dim())
                    .map(|_| {
                        Complex64::new(rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius))
                    })
                    .collect();
                Ok(basis.orbit_map_numeric(&v)?)
            })
            .collect();
    }
    let mut hs = vec![0];
    hs.extend(group::center_involutions(rep));
    let maps: Vec<Vec<_>> = hs
        .iter()
        .map(|&h| {
            Ok(restricted_orbit_map(basis, h)?
                .polys
                .iter()
                .map(Poly::to_numeric)
                .collect())
        })
        .collect::<Result<_, StrataError>>()?;
    Ok((0..count)
        .map(|s| {
            let map = &maps[s % maps.len()];
            let k = map.first().map_or(0, |p| p.nvars());
            let x: Vec<Complex64> = (0..k)
                .map(|_| Complex64::new(rng.gen_range(-radius..=radius), 0.0))
                .collect();
            map.iter().map(|p| Complex64::new(p.eval(&x).re, 0.0)).collect()
        })
        .collect())
}

/// Certifies that a real point satisfying the relations is the image of a
/// point of W_h for h = 1 or a central involution.
pub fn real_membership(
    rel: &RelationSet,
    z: &[f64],
    opts: MembershipOptions,
) -> Result<RealMembership, StrataError> {
    let basis = rel.basis();
    let m = basis.len();
    if z.len() != m {
        return Err(StrataError::Arity {
            expected: m,
            got: z.len(),
        });
    }
    let zc: Vec<Complex64> = z.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let relation_residual = rel.residuals(&zc).into_iter().fold(0.0, f64::max);
    if relation_residual > opts.tol {
        return Ok(RealMembership::NotOnY {
            residual: relation_residual,
        });
    }
    let radius = z
        .iter()
        .zip(basis.degrees())
        .map(|(v, &d)| v.abs().powf(1.0 / d as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let rep = basis.rep();
    let mut hs = vec![0];
    hs.extend(group::center_involutions(rep));
    let target = DVector::from_vec(zc);
    let mut best = f64::INFINITY;
    for h in hs {
        let restricted = restricted_orbit_map(basis, h)?;
        let numeric: Vec<_> = restricted.polys.iter().map(Poly::to_numeric).collect();
        let k = restricted.plus.len() + restricted.minus.len();
        let f = |x: &[f64]| {
            let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let r = DVector::from_iterator(m, numeric.iter().map(|p| p.eval(&xc))) - &target;
            let mut j = DMatrix::zeros(m, k);
            for (i, p) in numeric.iter().enumerate() {
                for (c, g) in p.gradient(&xc).into_iter().enumerate() {
                    j[(i, c)] = g;
                }
            }
            (r, j)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (h as u64).wrapping_mul(0x9e37_79b9));
        for s in 0..opts.starts.max(1) {
            let x0: Vec<f64> = if s == 0 {
                vec![radius / (k.max(1) as f64).sqrt(); k]
            } else {
                (0..k).map(|_| rng.gen_range(-radius..=radius)).collect()
            };
            let out = levenberg_marquardt(f, x0, opts.lm);
            best = best.min(out.residual);
            if out.converged {
                let (a, c) = out.x.split_at(restricted.plus.len());
                let mut w = vec![Complex64::new(0.0, 0.0); rep.dim()];
                for (coef, b) in a.iter().zip(&restricted.plus) {
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi += bi.embed_numeric() * coef;
                    }
                }
                for (coef, b) in c.iter().zip(&restricted.minus) {
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi += bi.embed_numeric() * Complex64::i() * coef;
                    }
                }
                return Ok(RealMembership::Certified(RealPointCertificate {
                    point: z.to_vec(),
                    h,
                    plus_coords: a.to_vec(),
                    minus_coords: c.to_vec(),
                    witness: w.iter().map(|v| (v.re, v.im)).collect(),
                    residual: out.residual,
                    relation_residual,
                    relation_bound: rel.weighted_degree_bound(),
                }));
            }
        }
    }
    Ok(RealMembership::NoCertificate {
        best_residual: best,
    })
}
