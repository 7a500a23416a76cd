//! Finite matrix groups: closure, element classification, isotropy.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{CycloScalar, ExactError, ExactMatrix};

pub const DEFAULT_CLOSURE_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group not closed within cap {0} (infinite or too large)")]
    NotClosed(usize),
    #[error("generator {0} is not invertible")]
    Singular(usize),
    #[error("generator {index} is not a square {dim}x{dim} matrix")]
    BadGenerator { index: usize, dim: usize },
    #[error("generator {0} has non-real entries but the representation is flagged real")]
    NotReal(usize),
    #[error("point has {got} coordinates, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("subgroup enumeration with generating sets of size {0} is incomplete")]
    IncompleteEnumeration(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// The action is read on a real vector space whose matrices are realized in Q(ζ_n).
    Real,
    Complex,
}

/// A finite subgroup of GL(dim) over Q(ζ_n), with its full element list.
#[derive(Clone, Debug)]
pub struct Representation {
    name: String,
    dim: usize,
    conductor: u32,
    field: FieldKind,
    generators: Vec<ExactMatrix>,
    elements: Vec<ExactMatrix>,
    index: HashMap<ExactMatrix, usize>,
    table: OnceLock<Vec<Vec<usize>>>,
}

impl Representation {
    /// Closes the generated group breadth-first from the identity.
    pub fn close(
        name: impl Into<String>,
        dim: usize,
        conductor: u32,
        field: FieldKind,
        generators: Vec<ExactMatrix>,
        cap: usize,
    ) -> Result<Self, GroupError> {
        if conductor == 0 {
            return Err(ExactError::ZeroConductor.into());
        }
        for (k, g) in generators.iter().enumerate() {
            if !g.is_square() || g.rows() != dim {
                return Err(GroupError::BadGenerator { index: k, dim });
            }
            if g.conductor() != conductor {
                return Err(ExactError::ConductorMismatch(conductor, g.conductor()).into());
            }
            if g.determinant()?.is_zero() {
                return Err(GroupError::Singular(k));
            }
            if field == FieldKind::Real && !g.is_real() {
                return Err(GroupError::NotReal(k));
            }
        }
        let id = ExactMatrix::identity(dim, conductor);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut next = 0;
        while next < elements.len() {
            for g in &generators {
                let prod = elements[next].checked_mul(g)?;
                if !index.contains_key(&prod) {
                    if elements.len() >= cap {
                        return Err(GroupError::NotClosed(cap));
                    }
                    index.insert(prod.clone(), elements.len());
                    elements.push(prod);
                }
            }
            next += 1;
        }
        Ok(Self {
            name: name.into(),
            dim,
            conductor,
            field,
            generators,
            elements,
            index,
            table: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn field(&self) -> FieldKind {
        self.field
    }

    pub fn generators(&self) -> &[ExactMatrix] {
        &self.generators
    }

    pub fn elements(&self) -> &[ExactMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ExactMatrix {
        &self.elements[i]
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, m: &ExactMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// table[a][b] = index of elements[a]·elements[b].
    pub fn mul_table(&self) -> &[Vec<usize>] {
        self.table.get_or_init(|| {
            self.elements
                .iter()
                .map(|a| {
                    self.elements
                        .iter()
                        .map(|b| {
                            let p = a.checked_mul(b).expect("same shape");
                            self.index[&p]
                        })
                        .collect()
                })
                .collect()
        })
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul_table()[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.mul_table()[a]
            .iter()
            .position(|&p| p == 0)
            .expect("finite group elements are invertible")
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut cur = a;
        while cur != 0 {
            cur = self.mul(cur, a);
            k += 1;
        }
        k
    }

    /// The same group with entries re-expressed in Q(ζ_m); element order is kept.
    pub fn with_conductor(&self, m: u32) -> Result<Self, GroupError> {
        let generators = self
            .generators
            .iter()
            .map(|g| g.with_conductor(m))
            .collect::<Result<Vec<_>, _>>()?;
        let elements = self
            .elements
            .iter()
            .map(|g| g.with_conductor(m))
            .collect::<Result<Vec<_>, _>>()?;
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Ok(Self {
            name: self.name.clone(),
            dim: self.dim,
            conductor: m,
            field: self.field,
            generators,
            elements,
            index,
            table: OnceLock::new(),
        })
    }

    pub fn numeric_elements(&self) -> Vec<DMatrix<Complex64>> {
        self.elements.iter().map(ExactMatrix::embed_numeric).collect()
    }

    /// g·v for every element g.
    pub fn orbit(&self, v: &[CycloScalar]) -> Result<Vec<Vec<CycloScalar>>, GroupError> {
        self.check_point(v)?;
        self.elements
            .iter()
            .map(|g| g.mul_vec(v).map_err(GroupError::from))
            .collect()
    }

    fn check_point(&self, v: &[CycloScalar]) -> Result<(), GroupError> {
        if v.len() != self.dim {
            return Err(GroupError::Arity {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Closure of a set of element indices, as a sorted index list.
    pub fn subgroup_generated_by(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for &g in gens {
                let p = self.mul(a, g);
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Common fixed subspace of the listed elements.
    pub fn fixed_space(&self, indices: &[usize]) -> Vec<Vec<CycloScalar>> {
        let id = ExactMatrix::identity(self.dim, self.conductor);
        let blocks: Vec<ExactMatrix> = indices
            .iter()
            .filter(|&&i| i != 0)
            .map(|&i| self.elements[i].checked_sub(&id).expect("same shape"))
            .collect();
        if blocks.is_empty() {
            return standard_basis(self.dim, self.conductor);
        }
        ExactMatrix::vstack(&blocks).expect("same shape").kernel()
    }

    /// Elements fixing every vector in `basis`.
    pub fn pointwise_stabilizer(&self, basis: &[Vec<CycloScalar>]) -> Vec<usize> {
        (0..self.order())
            .filter(|&i| {
                basis
                    .iter()
                    .all(|v| &self.elements[i].mul_vec(v).expect("dimension") == v)
            })
            .collect()
    }

    pub fn is_central(&self, a: usize) -> bool {
        (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a))
    }

    /// Index set of g·K·g⁻¹.
    pub fn conjugate_subgroup(&self, k: &[usize], g: usize) -> Vec<usize> {
        let gi = self.inverse(g);
        let mut out: Vec<usize> = k.iter().map(|&x| self.mul(self.mul(g, x), gi)).collect();
        out.sort_unstable();
        out
    }
}

fn standard_basis(dim: usize, n: u32) -> Vec<Vec<CycloScalar>> {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i == j {
                        CycloScalar::one(n)
                    } else {
                        CycloScalar::zero(n)
                    }
                })
                .collect()
        })
        .collect()
}

/// Order r ≥ 2 of `g` if it is a pseudoreflection (rank(g − I) = 1, finite order).
pub fn is_pseudoreflection(g: &ExactMatrix) -> Option<u32> {
    if !g.is_square() {
        return None;
    }
    let id = ExactMatrix::identity(g.rows(), g.conductor());
    if g.checked_sub(&id).ok()?.rank() != 1 {
        return None;
    }
    let mut cur = g.clone();
    for r in 1..=DEFAULT_CLOSURE_CAP as u32 {
        if cur.is_identity() {
            return if r >= 2 { Some(r) } else { None };
        }
        cur = cur.checked_mul(g).ok()?;
    }
    None
}

/// A subgroup given by sorted indices into its parent's element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupRecord {
    pub element_indices: Vec<usize>,
    pub fixed_space: Vec<Vec<CycloScalar>>,
}

impl SubgroupRecord {
    pub fn order(&self) -> usize {
        self.element_indices.len()
    }

    pub fn fixed_dim(&self) -> usize {
        self.fixed_space.len()
    }

    fn from_indices(rep: &Representation, element_indices: Vec<usize>) -> Self {
        let fixed_space = rep.fixed_space(&element_indices);
        Self {
            element_indices,
            fixed_space,
        }
    }
}

/// The elements fixing `v`.
pub fn isotropy(rep: &Representation, v: &[CycloScalar]) -> Result<SubgroupRecord, GroupError> {
    rep.check_point(v)?;
    let idx = rep.pointwise_stabilizer(std::slice::from_ref(&v.to_vec()));
    Ok(SubgroupRecord::from_indices(rep, idx))
}

/// All subgroups generated by at most `gen_size` elements. Fails if some
/// subgroup needs one more generator, i.e. if the enumeration is not closed
/// under adjoining a single element.
pub fn enumerate_subgroups(
    rep: &Representation,
    gen_size: usize,
) -> Result<Vec<Vec<usize>>, GroupError> {
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::from([vec![0]]);
    let mut frontier: Vec<Vec<usize>> = vec![vec![0]];
    for _ in 0..gen_size {
        let mut next = Vec::new();
        for s in &frontier {
            for g in 0..rep.order() {
                if s.binary_search(&g).is_ok() {
                    continue;
                }
                let mut gens = s.clone();
                gens.push(g);
                let t = rep.subgroup_generated_by(&gens);
                if all.insert(t.clone()) {
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    for s in &all {
        for g in 0..rep.order() {
            if s.binary_search(&g).is_ok() {
                continue;
            }
            let mut gens = s.clone();
            gens.push(g);
            if !all.contains(&rep.subgroup_generated_by(&gens)) {
                return Err(GroupError::IncompleteEnumeration(gen_size));
            }
        }
    }
    Ok(all.into_iter().collect())
}

/// A conjugacy class of isotropy subgroups.
#[derive(Clone, Debug)]
pub struct IsotropyClass {
    pub members: Vec<SubgroupRecord>,
    pub order: usize,
    pub fixed_dim: usize,
}

impl IsotropyClass {
    pub fn representative(&self) -> &SubgroupRecord {
        &self.members[0]
    }
}

/// Subgroups occurring as isotropy groups of points of the complexified
/// space, grouped by conjugacy and ordered by (order, fixed dimension).
pub fn isotropy_classes(rep: &Representation) -> Result<Vec<IsotropyClass>, GroupError> {
    let subgroups = enumerate_subgroups(rep, 2)?;
    let mut isotropic: Vec<SubgroupRecord> = Vec::new();
    for k in subgroups {
        let rec = SubgroupRecord::from_indices(rep, k);
        if rep.pointwise_stabilizer(&rec.fixed_space) == rec.element_indices {
            isotropic.push(rec);
        }
    }
    let mut classes: Vec<IsotropyClass> = Vec::new();
    let mut assigned = vec![false; isotropic.len()];
    for i in 0..isotropic.len() {
        if assigned[i] {
            continue;
        }
        let conj: BTreeSet<Vec<usize>> = (0..rep.order())
            .map(|g| rep.conjugate_subgroup(&isotropic[i].element_indices, g))
            .collect();
        let mut members = Vec::new();
        for j in i..isotropic.len() {
            if !assigned[j] && conj.contains(&isotropic[j].element_indices) {
                assigned[j] = true;
                members.push(isotropic[j].clone());
            }
        }
        members.sort_by(|a, b| a.element_indices.cmp(&b.element_indices));
        classes.push(IsotropyClass {
            order: members[0].order(),
            fixed_dim: members[0].fixed_dim(),
            members,
        });
    }
    classes.sort_by(|a, b| {
        (a.order, a.fixed_dim, &a.members[0].element_indices).cmp(&(
            b.order,
            b.fixed_dim,
            &b.members[0].element_indices,
        ))
    });
    Ok(classes)
}

/// Central elements h ≠ 1 with h² = 1.
pub fn center_involutions(rep: &Representation) -> Vec<usize> {
    (1..rep.order())
        .filter(|&h| rep.mul(h, h) == 0 && rep.is_central(h))
        .collect()
}

#[cfg(test)]
mod tests;
