use super::*;
use crate::corpus::{self, int_matrix};
use crate::invariants::generators;
use crate::quasilinear::QuotientMap;
use crate::strata::{real_membership, MembershipOptions, RealMembership};
use num_complex::Complex64;

fn random_invertible(rng: &mut ChaCha8Rng, d: usize, n: u32) -> ExactMatrix {
    loop {
        let rows: Vec<Vec<CycloScalar>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| CycloScalar::from_frac(rng.gen_range(-4..=4), rng.gen_range(1..=3), n))
                    .collect()
            })
            .collect();
        let a = ExactMatrix::from_rows(rows, n).unwrap();
        if !a.determinant().unwrap().is_zero() {
            return a;
        }
    }
}

#[test]
fn isomorphism_counts() {
    let z2 = corpus::sign_line();
    assert_eq!(enumerate_isomorphisms(&z2, &z2).len(), 1);
    let z4 = corpus::rotations(4);
    let isos = enumerate_isomorphisms(&z4, &z4);
    assert_eq!(isos.len(), 2);
    let klein = corpus::klein_reflections();
    assert!(enumerate_isomorphisms(&z4, &klein).is_empty());
    // oracle: |Aut| by brute force over all bijections of D8 fixing the identity is too many;
    // count automorphisms via images of a two-element generating set instead
    let d8 = corpus::dihedral8();
    let mut count = 0;
    let (a, b) = (1, 2);
    assert_eq!(d8.subgroup_generated_by(&[a, b]).len(), 8);
    for x in 0..8 {
        for y in 0..8 {
            if d8.subgroup_generated_by(&[x, y]).len() != 8 {
                continue;
            }
            if let Some(phi) = extend(&d8, &d8, &[a, b], &[x, y]) {
                let distinct: BTreeSet<_> = phi.iter().collect();
                if distinct.len() == 8
                    && (0..8).all(|p| (0..8).all(|q| phi[d8.mul(p, q)] == d8.mul(phi[p], phi[q])))
                {
                    count += 1;
                }
            }
        }
    }
    assert_eq!(enumerate_isomorphisms(&d8, &d8).len(), count);
    assert_eq!(count, 8);
    for iso in enumerate_isomorphisms(&d8, &d8) {
        assert_eq!(iso.image_of[0], 0);
    }
}

#[test]
fn intertwiner_examples() {
    let mirror = corpus::mirror_plane();
    let id = GroupIso { image_of: vec![0, 1] };
    let basis = intertwiners(&mirror, &mirror, &id).unwrap();
    assert_eq!(basis.len(), 2);
    for l in &basis {
        assert!(l.get(0, 1).is_zero() && l.get(1, 0).is_zero());
    }
    let neg = corpus::negation_plane();
    let phi = &enumerate_isomorphisms(&neg, &mirror)[0];
    let basis = intertwiners(&neg, &mirror, phi).unwrap();
    for l in &basis {
        assert!(l.get(0, 0).is_zero() && l.get(0, 1).is_zero());
        assert!(l.determinant().unwrap().is_zero());
    }
    let other = corpus::from_generators(
        "flip",
        FieldKind::Real,
        vec![int_matrix(&[&[-1, 0], &[0, 1]], 1)],
    )
    .unwrap();
    let phi = &enumerate_isomorphisms(&mirror, &other)[0];
    let basis = intertwiners(&mirror, &other, phi).unwrap();
    assert_eq!(basis.len(), 2);
    for l in &basis {
        assert!(l.get(0, 0).is_zero() && l.get(1, 1).is_zero());
    }
    match find_quasi_isomorphism(&mirror, &other, 0).unwrap() {
        QuasiIsoOutcome::Found(q) => {
            assert!(verify_quasi_isomorphism(&mirror, &other, &q, 5, 0).unwrap().passed());
        }
        other => panic!("{:?}", other),
    }
}

#[test]
fn negation_versus_mirror_is_none() {
    let (neg, mirror) = (corpus::negation_plane(), corpus::mirror_plane());
    match find_quasi_isomorphism(&neg, &mirror, 0).unwrap() {
        QuasiIsoOutcome::None(NoneCertificate::SingularIntertwiners { checked }) => {
            assert_eq!(checked.len(), 1);
            assert!(checked[0].determinant_identically_zero);
        }
        other => panic!("{:?}", other),
    }
    assert!(matches!(
        find_quasi_isomorphism(&mirror, &neg, 0).unwrap(),
        QuasiIsoOutcome::None(_)
    ));
    assert!(matches!(
        find_quasi_isomorphism(&corpus::sign_line(), &neg, 0),
        Err(QuasiIsoError::DimensionMismatch(1, 2))
    ));
    assert!(matches!(
        find_quasi_isomorphism(&corpus::rotations(4), &corpus::klein_reflections(), 0).unwrap(),
        QuasiIsoOutcome::None(NoneCertificate::NoGroupIsomorphism)
    ));
}

#[test]
fn conjugated_dihedral_has_witness() {
    let d8 = corpus::dihedral8();
    let a = int_matrix(&[&[1, 1], &[0, 1]], 1);
    let h = corpus::conjugated(&d8, &a).unwrap();
    match find_quasi_isomorphism(&d8, &h, 0).unwrap() {
        QuasiIsoOutcome::Found(q) => {
            let li = q.l.inverse().unwrap();
            let conj: BTreeSet<String> = d8
                .elements()
                .iter()
                .map(|g| format!("{:?}", q.l.checked_mul(g).unwrap().checked_mul(&li).unwrap()))
                .collect();
            let target: BTreeSet<String> = h.elements().iter().map(|g| format!("{:?}", g)).collect();
            assert_eq!(conj, target);
            let report = verify_quasi_isomorphism(&d8, &h, &q, 6, 1).unwrap();
            assert!(report.passed(), "{:?}", report);
        }
        other => panic!("{:?}", other),
    }
    match find_quasi_isomorphism(&d8, &d8, 0).unwrap() {
        QuasiIsoOutcome::Found(q) => assert!(verify_quasi_isomorphism(&d8, &d8, &q, 4, 0).unwrap().passed()),
        other => panic!("{:?}", other),
    }
}

#[test]
fn corrupted_witness_fails() {
    let d8 = corpus::dihedral8();
    let a = int_matrix(&[&[1, 1], &[0, 1]], 1);
    let h = corpus::conjugated(&d8, &a).unwrap();
    let QuasiIsoOutcome::Found(mut q) = find_quasi_isomorphism(&d8, &h, 0).unwrap() else {
        panic!()
    };
    let bumped = q.l.get(0, 0) + &CycloScalar::from_frac(1, 7, 1);
    q.l.set(0, 0, bumped);
    let report = verify_quasi_isomorphism(&d8, &h, &q, 3, 0).unwrap();
    assert!(!report.conjugates_onto);
    assert!(!report.passed());
    assert!(!report.failures.is_empty());
}

#[test]
fn random_conjugates_of_corpus_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for g in corpus::standard() {
        for _ in 0..3 {
            let a = random_invertible(&mut rng, g.dim(), g.conductor());
            let h = corpus::conjugated(&g, &a).unwrap();
            let QuasiIsoOutcome::Found(q) = find_quasi_isomorphism(&g, &h, 0).unwrap() else {
                panic!("{}", g.name())
            };
            assert!(verify_quasi_isomorphism(&g, &h, &q, 2, 0).unwrap().passed(), "{}", g.name());
            // symmetry
            assert!(matches!(
                find_quasi_isomorphism(&h, &g, 0).unwrap(),
                QuasiIsoOutcome::Found(_)
            ));
        }
    }
}

#[test]
fn determinant_fallback_finds_witness() {
    // basis elements and small combinations can all be singular; the symbolic path must still succeed
    let b1 = int_matrix(&[&[1, 0], &[0, 0]], 1);
    let b2 = int_matrix(&[&[0, 0], &[0, 1]], 1);
    let det = determinant_polynomial(&[b1.clone(), b2.clone()]);
    // det(c₁B₁ + c₂B₂) = c₁c₂
    assert_eq!(det, Poly::term(Monomial::new(vec![1, 1]), CycloScalar::one(1)));
    let pt = nonvanishing_point(&det);
    assert!(!combination(&[b1, b2], &pt).determinant().unwrap().is_zero());
}

#[test]
fn real_form_examples() {
    let neg = corpus::negation_plane();
    let rf = real_form(&neg, 1).unwrap();
    assert!(rf.plus_basis.is_empty());
    assert_eq!(rf.minus_basis.len(), 2);
    let big = rf.induced.conductor();
    assert_eq!(rf.induced.element(1), &int_matrix(&[&[-1, 0], &[0, -1]], big));

    for g in corpus::standard() {
        let rf = real_form(&g, 0).unwrap();
        assert_eq!(rf.induced.elements(), g.elements(), "{}", g.name());
        assert_eq!(rf.change_of_basis, ExactMatrix::identity(g.dim(), g.conductor()));
    }

    let z4 = corpus::rotations(4);
    let h = crate::group::center_involutions(&z4)[0];
    let rf = real_form(&z4, h).unwrap();
    assert!(rf.plus_basis.is_empty());
    assert_eq!(rf.induced.generators()[0], z4.generators()[0]);

    assert!(matches!(real_form(&z4, 1), Err(QuasiIsoError::NotCentralInvolution(1))) || z4.mul(1, 1) == 0);
    let d8 = corpus::dihedral8();
    let refl = d8.index_of(&int_matrix(&[&[1, 0], &[0, -1]], 1)).unwrap();
    assert!(matches!(real_form(&d8, refl), Err(QuasiIsoError::NotCentralInvolution(_))));
}

#[test]
fn real_forms_are_equivariantly_isomorphic() {
    for g in corpus::standard() {
        for h in crate::group::center_involutions(&g) {
            let rf = real_form(&g, h).unwrap();
            let base = g.with_conductor(rf.induced.conductor()).unwrap();
            assert!(
                matches!(find_quasi_isomorphism(&base, &rf.induced, 0).unwrap(), QuasiIsoOutcome::Found(_)),
                "{} h = {}",
                g.name(),
                h
            );
        }
    }
}

#[test]
fn graded_automorphism_examples() {
    let neg = corpus::negation_plane();
    let basis = generators(&neg, None).unwrap();
    assert_eq!(basis.degrees(), &[2, 2, 2]);
    let ga = graded_automorphism(&basis, 1).unwrap();
    assert_eq!(ga.signs, vec![Some(-1); 3]);

    let id = graded_automorphism(&basis, 0).unwrap();
    assert_eq!(id.map, QuotientMap::identity(basis.weights().clone(), 1));

    let k2 = generators(&corpus::rotations(2), None).unwrap();
    let ga = graded_automorphism(&k2, 1).unwrap();
    assert_eq!(ga.signs, vec![Some(-1); 3]);
    // the image of the real points is the half y₁ ≤ 0: real membership certifies with h = −I there
    let rel = crate::invariants::relations(&k2, 8).unwrap();
    let y = [1.0, 0.6, 0.8];
    let flipped: Vec<f64> = ga
        .map
        .numeric()
        .eval(&y.map(|v| Complex64::new(v, 0.0)))
        .iter()
        .map(|z| z.re)
        .collect();
    assert_eq!(flipped, vec![-1.0, -0.6, -0.8]);
    match real_membership(&rel, &flipped, MembershipOptions::default()).unwrap() {
        RealMembership::Certified(c) => assert_eq!(c.h, 1),
        other => panic!("{:?}", other),
    }
}

#[test]
fn graded_automorphism_is_an_involution() {
    for g in [corpus::rotations(2), corpus::rotations(4), corpus::rotations(6), corpus::negation_plane(), corpus::dihedral8()] {
        let basis = generators(&g, None).unwrap();
        for h in crate::group::center_involutions(&g) {
            let ga = graded_automorphism(&basis, h).unwrap();
            let comps = ga.map.components();
            let twice: Vec<Poly> = comps.iter().map(|c| c.compose(comps).unwrap()).collect();
            let id = QuotientMap::identity(basis.weights().clone(), ga.map.conductor());
            assert_eq!(twice.as_slice(), id.components(), "{}", g.name());
        }
    }
}
