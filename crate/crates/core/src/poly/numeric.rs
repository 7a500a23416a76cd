//! Double-precision images of exact polynomials, for the numerical solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct NumericPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

fn monomial_value(exps: &[u32], x: &[Complex64]) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for (xi, &e) in x.iter().zip(exps) {
        if e > 0 {
            v *= xi.powu(e);
        }
    }
    v
}

impl NumericPoly {
    pub fn new(nvars: usize, terms: Vec<(Vec<u32>, Complex64)>) -> Self {
        Self { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, Complex64)] {
        &self.terms
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| c * monomial_value(e, x))
            .sum()
    }

    pub fn gradient(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.nvars];
        for (exps, c) in &self.terms {
            for i in 0..self.nvars {
                let e = exps[i];
                if e == 0 {
                    continue;
                }
                let mut v = c * (e as f64);
                for (j, xj) in x.iter().enumerate() {
                    let k = if j == i { e - 1 } else { exps[j] };
                    if k > 0 {
                        v *= xj.powu(k);
                    }
                }
                g[i] += v;
            }
        }
        g
    }
}

/// A polynomial map Cᵏ → Cᵐ.
#[derive(Clone, Debug)]
pub struct NumericMap {
    nvars: usize,
    components: Vec<NumericPoly>,
}

impl NumericMap {
    pub fn new(nvars: usize, components: Vec<NumericPoly>) -> Self {
        debug_assert!(components.iter().all(|c| c.nvars() == nvars));
        Self { nvars, components }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[NumericPoly] {
        &self.components
    }

    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn eval_vec(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_vec(self.eval(x.as_slice()))
    }

    pub fn jacobian(&self, x: &[Complex64]) -> DMatrix<Complex64> {
        let rows: Vec<Vec<Complex64>> = self.components.iter().map(|c| c.gradient(x)).collect();
        DMatrix::from_fn(self.components.len(), self.nvars, |i, j| rows[i][j])
    }

    /// x ↦ self(inner(x)).
    pub fn then_eval(&self, inner: &NumericMap, x: &[Complex64]) -> Vec<Complex64> {
        self.eval(&inner.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_matches_finite_differences() {
        // x^2 y + 3 y^3
        let p = NumericPoly::new(
            2,
            vec![
                (vec![2, 1], Complex64::new(1.0, 0.0)),
                (vec![0, 3], Complex64::new(3.0, 0.0)),
            ],
        );
        let x = [Complex64::new(0.3, -0.2), Complex64::new(1.1, 0.4)];
        let g = p.gradient(&x);
        let h = 1e-6;
        for i in 0..2 {
            let mut xp = x;
            xp[i] += h;
            let mut xm = x;
            xm[i] -= h;
            let fd = (p.eval(&xp) - p.eval(&xm)) / (2.0 * h);
            assert!((fd - g[i]).norm() < 1e-6);
        }
    }
}
