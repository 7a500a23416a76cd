//! Elements of the cyclotomic field Q(ζ_n) in the power basis.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactError;

/// Integer coefficients of Φ_n, lowest degree first.
fn cyclotomic_polynomial(n: u32) -> Arc<[i64]> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<[i64]>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().expect("cyclotomic cache poisoned").get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d of n.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let divisor = cyclotomic_polynomial(d);
            num = divide_monic(&num, &divisor);
        }
    }
    let phi: Arc<[i64]> = num.into();
    cache
        .write()
        .expect("cyclotomic cache poisoned")
        .insert(n, phi.clone());
    phi
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// Euler's totient φ(n), the degree of Q(ζ_n) over Q.
pub fn totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

/// Least common multiple of two conductors.
pub fn lcm(a: u32, b: u32) -> u32 {
    num_integer::lcm(a, b)
}

/// An exact element of Q(ζ_n), stored as coordinates in 1, ζ, …, ζ^{φ(n)-1}.
///
/// The representation is fully reduced modulo Φ_n, so structural equality is
/// field equality. Arithmetic between different conductors is refused; use
/// [`CycloScalar::with_conductor`] to move into a larger field explicitly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    conductor: u32,
    coeffs: Vec<BigRational>,
}

impl CycloScalar {
    /// Reduces an arbitrary polynomial in ζ_n to canonical form.
    pub fn reduce(raw: &[BigRational], n: u32) -> Result<Self, ExactError> {
        if n == 0 {
            return Err(ExactError::ZeroConductor);
        }
        Ok(Self::reduce_unchecked(raw.to_vec(), n))
    }

    fn reduce_unchecked(mut raw: Vec<BigRational>, n: u32) -> Self {
        let nu = n as usize;
        if raw.len() > nu {
            // ζ^n = 1
            for i in nu..raw.len() {
                let c = std::mem::replace(&mut raw[i], BigRational::zero());
                if !c.is_zero() {
                    raw[i % nu] += c;
                }
            }
            raw.truncate(nu);
        }
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        if raw.len() > deg {
            for i in (deg..raw.len()).rev() {
                let c = std::mem::replace(&mut raw[i], BigRational::zero());
                if c.is_zero() {
                    continue;
                }
                // ζ^i = -Σ_{j<deg} φ_j ζ^{i-deg+j}
                for (j, &p) in phi[..deg].iter().enumerate() {
                    if p != 0 {
                        raw[i - deg + j] -= &c * BigInt::from(p);
                    }
                }
            }
        }
        raw.resize(deg, BigRational::zero());
        Self {
            conductor: n,
            coeffs: raw,
        }
    }

    pub fn zero(n: u32) -> Self {
        Self {
            conductor: n,
            coeffs: vec![BigRational::zero(); totient(n)],
        }
    }

    pub fn one(n: u32) -> Self {
        Self::from_rational(BigRational::one(), n)
    }

    pub fn from_rational(q: BigRational, n: u32) -> Self {
        let mut coeffs = vec![BigRational::zero(); totient(n)];
        coeffs[0] = q;
        Self {
            conductor: n,
            coeffs,
        }
    }

    pub fn from_int(v: i64, n: u32) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)), n)
    }

    pub fn from_frac(num: i64, den: i64, n: u32) -> Self {
        Self::from_rational(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            n,
        )
    }

    /// ζ_n^k for any integer k.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        let e = k.rem_euclid(n as i64) as usize;
        let mut raw = vec![BigRational::zero(); e + 1];
        raw[e] = BigRational::one();
        Self::reduce_unchecked(raw, n)
    }

    /// The imaginary unit, available when 4 divides the conductor.
    pub fn imaginary_unit(n: u32) -> Result<Self, ExactError> {
        if n % 4 != 0 {
            return Err(ExactError::NoImaginaryUnit(n));
        }
        Ok(Self::root_of_unity(n, (n / 4) as i64))
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<(), ExactError> {
        if self.conductor != other.conductor {
            Err(ExactError::ConductorMismatch(self.conductor, other.conductor))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        Ok(Self {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        Ok(Self {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        if self.coeffs.len() == 1 {
            return Ok(Self {
                conductor: self.conductor,
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            });
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.conductor));
        }
        let mut raw = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        Ok(Self::reduce_unchecked(raw, self.conductor))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        self.checked_mul(&other.invert()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse, via the linear system "multiply by self".
    pub fn invert(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(q.recip(), self.conductor));
        }
        let deg = self.coeffs.len();
        // column j = self * ζ^j
        let mut m = vec![vec![BigRational::zero(); deg]; deg];
        for j in 0..deg {
            let mut raw = vec![BigRational::zero(); j + deg];
            raw[j..j + deg].clone_from_slice(&self.coeffs);
            let col = Self::reduce_unchecked(raw, self.conductor);
            for (i, c) in col.coeffs.into_iter().enumerate() {
                m[i][j] = c;
            }
        }
        let mut rhs = vec![BigRational::zero(); deg];
        rhs[0] = BigRational::one();
        let x = solve_rational_square(m, rhs).ok_or(ExactError::DivisionByZero)?;
        Ok(Self {
            conductor: self.conductor,
            coeffs: x,
        })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer powers; negative exponents invert first.
    pub fn powi(&self, e: i64) -> Result<Self, ExactError> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.invert()?.pow((-e) as u32))
        }
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let n = self.conductor as usize;
        if self.coeffs.len() == 1 {
            return self.clone();
        }
        let mut raw = vec![BigRational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[(n - k) % n] += c;
            }
        }
        Self::reduce_unchecked(raw, self.conductor)
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Re-expresses the element in Q(ζ_m) for a multiple m of the conductor.
    pub fn with_conductor(&self, m: u32) -> Result<Self, ExactError> {
        if m == 0 {
            return Err(ExactError::ZeroConductor);
        }
        if m % self.conductor != 0 {
            return Err(ExactError::NotASubfield(self.conductor, m));
        }
        if m == self.conductor {
            return Ok(self.clone());
        }
        let step = (m / self.conductor) as usize;
        let mut raw = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            raw[k * step] = c.clone();
        }
        Ok(Self::reduce_unchecked(raw, m))
    }

    /// Evaluates at ζ = exp(2πi/n) in double precision.
    pub fn embed_numeric(&self) -> Complex64 {
        let n = self.conductor as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / n;
            acc += Complex64::from_polar(v, theta);
        }
        acc
    }

    /// Sign of a rational element; `None` for irrational elements.
    pub fn rational_signum(&self) -> Option<i32> {
        self.as_rational().map(|q| {
            if q.is_zero() {
                0
            } else if q.is_positive() {
                1
            } else {
                -1
            }
        })
    }
}

/// Gaussian elimination over Q for a square nonsingular system.
fn solve_rational_square(
    mut m: Vec<Vec<BigRational>>,
    mut rhs: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].recip();
        for c in col..n {
            m[col][c] = &m[col][c] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
                let t = &f * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some(rhs)
}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})*z{}", c, self.conductor)?,
                _ => write!(f, "({})*z{}^{}", c, self.conductor, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&CycloScalar> for &CycloScalar {
            type Output = CycloScalar;
            fn $method(self, rhs: &CycloScalar) -> CycloScalar {
                self.$checked(rhs).expect("cyclotomic conductor mismatch")
            }
        }
        impl $tr<CycloScalar> for CycloScalar {
            type Output = CycloScalar;
            fn $method(self, rhs: CycloScalar) -> CycloScalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycloScalar> for CycloScalar {
            type Output = CycloScalar;
            fn $method(self, rhs: &CycloScalar) -> CycloScalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl AddAssign<&CycloScalar> for CycloScalar {
    fn add_assign(&mut self, rhs: &CycloScalar) {
        assert_eq!(self.conductor, rhs.conductor, "cyclotomic conductor mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Neg for &CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        CycloScalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(&*cyclotomic_polynomial(1), &[-1, 1]);
        assert_eq!(&*cyclotomic_polynomial(4), &[1, 0, 1]);
        assert_eq!(&*cyclotomic_polynomial(12), &[1, 0, -1, 0, 1]);
        assert_eq!(totient(8), 4);
        assert_eq!(totient(5), 4);
    }

    #[test]
    fn reduce_examples() {
        let r = CycloScalar::reduce(&[q(0, 1), q(0, 1), q(1, 1)], 4).unwrap();
        assert_eq!(r, CycloScalar::from_int(-1, 4));
        let r = CycloScalar::reduce(&[q(0, 1), q(1, 1), q(1, 1)], 3).unwrap();
        assert_eq!(r, CycloScalar::from_int(-1, 3));
        let r = CycloScalar::reduce(&[q(0, 1), q(0, 1), q(1, 1)], 1).unwrap();
        assert_eq!(r, CycloScalar::one(1));
        assert!(matches!(
            CycloScalar::reduce(&[q(1, 1)], 0),
            Err(ExactError::ZeroConductor)
        ));
        // ζ^n reduces to 1
        let mut raw = vec![q(0, 1); 8];
        raw.push(q(1, 1));
        assert!(CycloScalar::reduce(&raw, 8).unwrap().is_one());
    }

    #[test]
    fn invert_examples() {
        let z3 = CycloScalar::root_of_unity(3, 1);
        assert_eq!(z3.invert().unwrap(), CycloScalar::root_of_unity(3, 2));
        assert_eq!(
            CycloScalar::from_int(2, 5).invert().unwrap(),
            CycloScalar::from_frac(1, 2, 5)
        );
        let i = CycloScalar::root_of_unity(4, 1);
        let one = CycloScalar::one(4);
        let a = &one + &i;
        let expected = (&one - &i).scale(&q(1, 2));
        assert_eq!(a.invert().unwrap(), expected);
        assert!(matches!(
            CycloScalar::zero(4).invert(),
            Err(ExactError::DivisionByZero)
        ));
    }

    #[test]
    fn embed_examples() {
        let i = CycloScalar::root_of_unity(4, 1).embed_numeric();
        assert!((i - Complex64::new(0.0, 1.0)).norm() <= 1e-12);
        let s = (CycloScalar::root_of_unity(3, 1) + CycloScalar::root_of_unity(3, 2))
            .embed_numeric();
        assert!((s - Complex64::new(-1.0, 0.0)).norm() <= 1e-12);
        let c = (CycloScalar::root_of_unity(8, 1) + CycloScalar::root_of_unity(8, 7))
            .scale(&q(1, 2))
            .embed_numeric();
        let oracle = std::f64::consts::FRAC_PI_4.cos();
        assert!((c - Complex64::new(oracle, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn mixed_conductor_is_an_error() {
        let a = CycloScalar::one(3);
        let b = CycloScalar::one(4);
        assert!(matches!(
            a.checked_add(&b),
            Err(ExactError::ConductorMismatch(3, 4))
        ));
        assert!(a.checked_mul(&b).is_err());
    }

    #[test]
    fn conductor_change_and_conjugation() {
        let z3 = CycloScalar::root_of_unity(3, 1);
        let lifted = z3.with_conductor(12).unwrap();
        assert_eq!(lifted, CycloScalar::root_of_unity(12, 4));
        assert!((lifted.embed_numeric() - z3.embed_numeric()).norm() < 1e-12);
        assert!(z3.with_conductor(8).is_err());
        let i = CycloScalar::imaginary_unit(12).unwrap();
        assert_eq!(i.conj(), -&i);
        let c = CycloScalar::root_of_unity(12, 1) + CycloScalar::root_of_unity(12, 11);
        assert!(c.is_real());
        assert!(!i.is_real());
    }
}
