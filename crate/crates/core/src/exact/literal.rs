//! Scalar literals: a JSON array of "a/b" or "a" strings, coefficients of
//! 1, ζ, ζ², … and zero-padded up to φ(n).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{totient, CycloScalar, ExactError};

pub fn parse_rational(s: &str) -> Result<BigRational, ExactError> {
    let s = s.trim();
    let bad = || ExactError::Literal(format!("{:?} is not a rational", s));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ExactError::Literal(format!("{:?} has zero denominator", s)));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_scalar<S: AsRef<str>>(parts: &[S], n: u32) -> Result<CycloScalar, ExactError> {
    if n == 0 {
        return Err(ExactError::ZeroConductor);
    }
    let phi = totient(n);
    if parts.len() > phi {
        return Err(ExactError::Literal(format!(
            "{} coefficients given but Q(zeta_{}) has degree {}",
            parts.len(),
            n,
            phi
        )));
    }
    let raw = parts
        .iter()
        .map(|p| parse_rational(p.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    CycloScalar::reduce(&raw, n)
}

/// Canonical literal with trailing zero coefficients trimmed.
pub fn scalar_to_literal(a: &CycloScalar) -> Vec<String> {
    let coeffs = a.coeffs();
    let len = coeffs.iter().rposition(|c| !c.is_zero()).map_or(1, |p| p + 1);
    coeffs[..len].iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_pad() {
        let a = parse_scalar(&["1/2"], 8).unwrap();
        assert_eq!(a, CycloScalar::from_frac(1, 2, 8));
        let i = parse_scalar(&["0", "1"], 4).unwrap();
        assert_eq!(i, CycloScalar::root_of_unity(4, 1));
        assert_eq!(scalar_to_literal(&i), vec!["0", "1"]);
        assert_eq!(scalar_to_literal(&CycloScalar::zero(5)), vec!["0"]);
        assert_eq!(scalar_to_literal(&CycloScalar::from_frac(-3, 6, 1)), vec!["-1/2"]);
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(parse_scalar(&["1", "2", "3"], 4).is_err());
        assert!(parse_scalar(&["x"], 4).is_err());
        assert!(parse_scalar(&["1/0"], 4).is_err());
        assert!(parse_scalar(&["1"], 0).is_err());
    }
}
