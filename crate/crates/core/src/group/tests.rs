use super::*;
use crate::corpus::{self, int_matrix};

fn brute_force_closure(gens: &[ExactMatrix]) -> BTreeSet<Vec<String>> {
    // repeated pairwise products until nothing new appears
    let key = |m: &ExactMatrix| m.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>();
    let mut set: Vec<ExactMatrix> = gens.to_vec();
    loop {
        let mut grew = false;
        let snapshot = set.clone();
        for a in &snapshot {
            for b in &snapshot {
                let p = a.checked_mul(b).unwrap();
                if !set.contains(&p) {
                    set.push(p);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    set.iter().map(key).collect()
}

#[test]
fn closure_examples() {
    assert_eq!(corpus::sign_line().order(), 2);
    assert_eq!(corpus::rotations(4).order(), 4);
    let d8 = corpus::dihedral8();
    assert_eq!(d8.order(), 8);
    assert_eq!(brute_force_closure(d8.generators()).len(), 8);
    assert_eq!(corpus::rotations(6).order(), 6);
    assert_eq!(corpus::rotations(3).order(), 3);
}

#[test]
fn closure_cap_and_validation() {
    // infinite order shear
    let shear = int_matrix(&[&[1, 1], &[0, 1]], 1);
    assert!(matches!(
        Representation::close("shear", 2, 1, FieldKind::Real, vec![shear], 64),
        Err(GroupError::NotClosed(64))
    ));
    let sing = int_matrix(&[&[1, 0], &[0, 0]], 1);
    assert!(matches!(
        Representation::close("s", 2, 1, FieldKind::Real, vec![sing], 64),
        Err(GroupError::Singular(0))
    ));
    let z3 = ExactMatrix::from_rows(vec![vec![CycloScalar::root_of_unity(3, 1)]], 3).unwrap();
    assert!(matches!(
        Representation::close("z3", 1, 3, FieldKind::Real, vec![z3.clone()], 64),
        Err(GroupError::NotReal(0))
    ));
    assert!(Representation::close("z3", 1, 3, FieldKind::Complex, vec![z3], 64).is_ok());
}

#[test]
fn closure_is_generator_order_independent() {
    let a = int_matrix(&[&[1, 0], &[0, -1]], 1);
    let b = int_matrix(&[&[0, -1], &[1, 0]], 1);
    let g1 = corpus::from_generators("x", FieldKind::Real, vec![a.clone(), b.clone()]).unwrap();
    let g2 = corpus::from_generators("y", FieldKind::Real, vec![b, a]).unwrap();
    let s1: BTreeSet<_> = g1.elements().iter().map(|m| format!("{:?}", m)).collect();
    let s2: BTreeSet<_> = g2.elements().iter().map(|m| format!("{:?}", m)).collect();
    assert_eq!(s1, s2);
}

#[test]
fn pseudoreflection_examples() {
    assert_eq!(is_pseudoreflection(&int_matrix(&[&[1, 0], &[0, -1]], 1)), Some(2));
    assert_eq!(is_pseudoreflection(&int_matrix(&[&[-1, 0], &[0, -1]], 1)), None);
    let d = ExactMatrix::diagonal(&[CycloScalar::one(3), CycloScalar::root_of_unity(3, 1)], 3);
    // oracle: order by repeated multiplication
    let mut k = 1;
    let mut cur = d.clone();
    while !cur.is_identity() {
        cur = cur.checked_mul(&d).unwrap();
        k += 1;
    }
    assert_eq!(k, 3);
    assert_eq!(is_pseudoreflection(&d), Some(3));
    assert_eq!(is_pseudoreflection(&ExactMatrix::identity(2, 1)), None);
}

#[test]
fn pseudoreflections_closed_under_conjugation() {
    let d8 = corpus::dihedral8();
    for g in 0..d8.order() {
        if let Some(r) = is_pseudoreflection(d8.element(g)) {
            for h in 0..d8.order() {
                let c = d8.mul(d8.mul(h, g), d8.inverse(h));
                assert_eq!(is_pseudoreflection(d8.element(c)), Some(r));
            }
        }
    }
}

#[test]
fn isotropy_examples() {
    let z2 = corpus::sign_line();
    let origin = isotropy(&z2, &[CycloScalar::zero(1)]).unwrap();
    assert_eq!(origin.order(), 2);
    let one = isotropy(&z2, &[CycloScalar::one(1)]).unwrap();
    assert_eq!(one.order(), 1);
    let d8 = corpus::dihedral8();
    let v = vec![CycloScalar::one(1), CycloScalar::zero(1)];
    let rec = isotropy(&d8, &v).unwrap();
    // oracle: direct fix-check
    let fixing: Vec<usize> = (0..8)
        .filter(|&i| d8.element(i).mul_vec(&v).unwrap() == v)
        .collect();
    assert_eq!(rec.element_indices, fixing);
    assert_eq!(rec.order(), 2);
    let refl = int_matrix(&[&[1, 0], &[0, -1]], 1);
    assert!(rec.element_indices.contains(&d8.index_of(&refl).unwrap()));
    assert!(matches!(
        isotropy(&d8, &[CycloScalar::one(1)]),
        Err(GroupError::Arity { .. })
    ));
}

#[test]
fn isotropy_class_examples() {
    let z2 = isotropy_classes(&corpus::sign_line()).unwrap();
    assert_eq!(
        z2.iter().map(|c| (c.order, c.fixed_dim)).collect::<Vec<_>>(),
        vec![(1, 1), (2, 0)]
    );
    for k in [2, 3, 4, 6] {
        let cl = isotropy_classes(&corpus::rotations(k)).unwrap();
        assert_eq!(
            cl.iter().map(|c| (c.order, c.fixed_dim)).collect::<Vec<_>>(),
            vec![(1, 2), (k as usize, 0)],
            "k = {}",
            k
        );
    }
    let d8 = corpus::dihedral8();
    let cl = isotropy_classes(&d8).unwrap();
    assert_eq!(
        cl.iter()
            .map(|c| (c.order, c.fixed_dim, c.members.len()))
            .collect::<Vec<_>>(),
        vec![(1, 2, 1), (2, 1, 2), (2, 1, 2), (8, 0, 1)]
    );
}

#[test]
fn subgroup_enumeration_matches_exhaustive_oracle() {
    // oracle: every subset closed under multiplication
    let d8 = corpus::dihedral8();
    let n = d8.order();
    let mut oracle = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        if mask & 1 == 0 {
            continue;
        }
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if s.iter().all(|&a| s.iter().all(|&b| s.contains(&d8.mul(a, b)))) {
            oracle.insert(s);
        }
    }
    let found: BTreeSet<_> = enumerate_subgroups(&d8, 2).unwrap().into_iter().collect();
    assert_eq!(found, oracle);
    assert_eq!(found.len(), 10);
    for s in &found {
        assert_eq!(n % s.len(), 0);
    }
    // Z/2 x Z/2 x Z/2 needs three generators
    let e = corpus::from_generators(
        "z2^3",
        FieldKind::Real,
        vec![
            int_matrix(&[&[-1, 0, 0], &[0, 1, 0], &[0, 0, 1]], 1),
            int_matrix(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, 1]], 1),
            int_matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]], 1),
        ],
    )
    .unwrap();
    assert!(matches!(
        enumerate_subgroups(&e, 2),
        Err(GroupError::IncompleteEnumeration(2))
    ));
    assert_eq!(enumerate_subgroups(&e, 3).unwrap().len(), 16);
}

#[test]
fn fixed_spaces_are_exact() {
    let d8 = corpus::dihedral8();
    for class in isotropy_classes(&d8).unwrap() {
        for m in &class.members {
            for v in &m.fixed_space {
                for &g in &m.element_indices {
                    assert_eq!(&d8.element(g).mul_vec(v).unwrap(), v);
                }
            }
            let id = ExactMatrix::identity(2, 1);
            let blocks: Vec<_> = m
                .element_indices
                .iter()
                .map(|&g| d8.element(g).checked_sub(&id).unwrap())
                .collect();
            let rank = ExactMatrix::vstack(&blocks).unwrap().rank();
            assert_eq!(m.fixed_dim(), 2 - rank);
        }
    }
}

#[test]
fn center_involution_examples() {
    let z4 = corpus::rotations(4);
    let inv = center_involutions(&z4);
    assert_eq!(inv.len(), 1);
    assert_eq!(z4.element(inv[0]), &int_matrix(&[&[-1, 0], &[0, -1]], 4));
    let d8 = corpus::dihedral8();
    let inv = center_involutions(&d8);
    assert_eq!(
        inv.iter().map(|&i| d8.element(i).clone()).collect::<Vec<_>>(),
        vec![int_matrix(&[&[-1, 0], &[0, -1]], 1)]
    );
    let trivial =
        Representation::close("triv", 2, 1, FieldKind::Real, vec![], 8).unwrap();
    assert!(center_involutions(&trivial).is_empty());
}
