//! Builders for the small reference groups used throughout the test suite and
//! the shipped golden corpus.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exact::{lcm, CycloScalar, ExactMatrix};
use crate::group::{FieldKind, GroupError, Representation, DEFAULT_CLOSURE_CAP};

fn int(v: i64, n: u32) -> CycloScalar {
    CycloScalar::from_int(v, n)
}

pub fn int_matrix(rows: &[&[i64]], n: u32) -> ExactMatrix {
    ExactMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v, n)).collect())
            .collect(),
        n,
    )
    .expect("rectangular")
}

/// Conductor used for the rotation group of order k: rational entries need
/// no extension, otherwise cos and sin of 2π/k live in Q(ζ_lcm(k,4)).
pub fn rotation_conductor(k: u32) -> u32 {
    match k {
        1 | 2 => 1,
        4 => 4,
        _ => lcm(k, 4),
    }
}

/// Rotation of the plane by 2πj/k, over Q(ζ_n) for n = `rotation_conductor(k)`.
pub fn rotation_matrix(k: u32, j: i64) -> ExactMatrix {
    let n = rotation_conductor(k);
    let big = lcm(k, 4);
    let z = CycloScalar::root_of_unity(big, j * (big / k) as i64);
    let zi = CycloScalar::root_of_unity(big, -j * (big / k) as i64);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let cos = (&z + &zi).scale(&half);
    let i = CycloScalar::imaginary_unit(big).expect("4 | big");
    let sin = (&(&z - &zi) * &i.invert().expect("unit")).scale(&half);
    let down = |v: CycloScalar| -> CycloScalar {
        if n == big {
            v
        } else {
            CycloScalar::from_rational(
                v.as_rational().expect("rational rotation entry").clone(),
                n,
            )
        }
    };
    let (c, s) = (down(cos), down(sin));
    ExactMatrix::from_rows(vec![vec![c.clone(), -&s], vec![s, c]], n).expect("2x2")
}

/// {±1} acting on the real line.
pub fn sign_line() -> Representation {
    Representation::close(
        "sign-line",
        1,
        1,
        FieldKind::Real,
        vec![int_matrix(&[&[-1]], 1)],
        DEFAULT_CLOSURE_CAP,
    )
    .expect("order 2")
}

/// Z/k acting on the real plane by rotations.
pub fn rotations(k: u32) -> Representation {
    Representation::close(
        format!("rotations-{}", k),
        2,
        rotation_conductor(k),
        FieldKind::Real,
        vec![rotation_matrix(k, 1)],
        DEFAULT_CLOSURE_CAP,
    )
    .expect("finite rotation group")
}

/// The dihedral group of order 8, generated by diag(1,-1) and a quarter turn.
pub fn dihedral8() -> Representation {
    Representation::close(
        "dihedral-8",
        2,
        1,
        FieldKind::Real,
        vec![
            int_matrix(&[&[1, 0], &[0, -1]], 1),
            int_matrix(&[&[0, -1], &[1, 0]], 1),
        ],
        DEFAULT_CLOSURE_CAP,
    )
    .expect("order 8")
}

/// Z/k acting on C through multiplication by ζ_k.
pub fn cyclic_line(k: u32) -> Representation {
    let n = k.max(1);
    Representation::close(
        format!("cyclic-line-{}", k),
        1,
        n,
        FieldKind::Complex,
        vec![ExactMatrix::from_rows(vec![vec![CycloScalar::root_of_unity(n, 1)]], n)
            .expect("1x1")],
        DEFAULT_CLOSURE_CAP,
    )
    .expect("finite cyclic group")
}

pub fn from_generators(
    name: &str,
    field: FieldKind,
    generators: Vec<ExactMatrix>,
) -> Result<Representation, GroupError> {
    let g0 = &generators[0];
    Representation::close(
        name,
        g0.rows(),
        g0.conductor(),
        field,
        generators,
        DEFAULT_CLOSURE_CAP,
    )
}

/// The group A·G·A⁻¹, generated by the conjugated generators.
pub fn conjugated(rep: &Representation, a: &ExactMatrix) -> Result<Representation, GroupError> {
    let ai = a.inverse()?;
    let gens = rep
        .generators()
        .iter()
        .map(|g| a.checked_mul(g)?.checked_mul(&ai))
        .collect::<Result<Vec<_>, _>>()?;
    Representation::close(
        format!("{}-conjugated", rep.name()),
        rep.dim(),
        rep.conductor(),
        rep.field(),
        gens,
        DEFAULT_CLOSURE_CAP,
    )
}

/// ⟨−I₂⟩ on the real plane.
pub fn negation_plane() -> Representation {
    from_generators("negation-plane", FieldKind::Real, vec![int_matrix(&[&[-1, 0], &[0, -1]], 1)])
        .expect("order 2")
}

/// ⟨diag(1,−1)⟩, a single reflection of the plane.
pub fn mirror_plane() -> Representation {
    from_generators("mirror-plane", FieldKind::Real, vec![int_matrix(&[&[1, 0], &[0, -1]], 1)])
        .expect("order 2")
}

/// Z/2 × Z/2 generated by the two coordinate reflections.
pub fn klein_reflections() -> Representation {
    from_generators(
        "klein-reflections",
        FieldKind::Real,
        vec![
            int_matrix(&[&[-1, 0], &[0, 1]], 1),
            int_matrix(&[&[1, 0], &[0, -1]], 1),
        ],
    )
    .expect("order 4")
}

/// The dihedral group of order 12: a sixth turn and a reflection.
pub fn dihedral12() -> Representation {
    let n = rotation_conductor(6);
    from_generators(
        "dihedral-12",
        FieldKind::Real,
        vec![rotation_matrix(6, 1), int_matrix(&[&[1, 0], &[0, -1]], n)],
    )
    .expect("order 12")
}

/// The quaternion group acting on C² over Q(i).
pub fn quaternion8() -> Representation {
    let i = CycloScalar::imaginary_unit(4).expect("4 | 4");
    let z = CycloScalar::zero(4);
    let one = CycloScalar::one(4);
    let a = ExactMatrix::from_rows(vec![vec![i.clone(), z.clone()], vec![z.clone(), -&i]], 4)
        .expect("2x2");
    let b = ExactMatrix::from_rows(vec![vec![z.clone(), one.clone()], vec![-&one, z]], 4)
        .expect("2x2");
    from_generators("quaternion-8", FieldKind::Complex, vec![a, b]).expect("order 8")
}

/// The reference groups, all of order at most 16.
pub fn standard() -> Vec<Representation> {
    vec![
        sign_line(),
        rotations(2),
        rotations(3),
        rotations(4),
        rotations(6),
        dihedral8(),
        dihedral12(),
        negation_plane(),
        mirror_plane(),
        klein_reflections(),
        cyclic_line(2),
        cyclic_line(3),
        cyclic_line(4),
        quaternion8(),
    ]
}
