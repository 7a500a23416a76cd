//! Damped Gauss–Newton (Levenberg–Marquardt) for square or overdetermined
//! complex residual systems in real or complex unknowns.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmOptions {
    /// Stop once the residual norm is at most this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 40,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LmOutcome<T> {
    pub x: Vec<T>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(r: &DVector<Complex64>) -> f64 {
    r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Minimizes |F(x)| over real x. `f` returns F(x) and ∂F/∂x_j as columns.
pub fn levenberg_marquardt<F>(f: F, x0: Vec<f64>, opts: LmOptions) -> LmOutcome<f64>
where
    F: Fn(&[f64]) -> (DVector<Complex64>, DMatrix<Complex64>),
{
    let mut x = x0;
    let (mut r, mut jac) = f(&x);
    let mut res = norm(&r);
    let mut lambda = 1e-3;
    let mut it = 0;
    while it < opts.max_iter && res > opts.tol && res.is_finite() {
        it += 1;
        let (b, a) = (jac.nrows(), jac.ncols());
        // stack real and imaginary parts
        let mut ar = DMatrix::<f64>::zeros(2 * b, a);
        let mut rr = DVector::<f64>::zeros(2 * b);
        for i in 0..b {
            rr[i] = r[i].re;
            rr[b + i] = r[i].im;
            for j in 0..a {
                ar[(i, j)] = jac[(i, j)].re;
                ar[(b + i, j)] = jac[(i, j)].im;
            }
        }
        let normal = ar.transpose() * &ar;
        let grad = ar.transpose() * &rr;
        let mut accepted = false;
        for _ in 0..12 {
            let mut m = normal.clone();
            for j in 0..a {
                m[(j, j)] += lambda * (1.0 + normal[(j, j)]);
            }
            let Some(chol) = m.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let delta = chol.solve(&(-&grad));
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            let (tr, tj) = f(&trial);
            let tres = norm(&tr);
            if tres.is_finite() && tres < res {
                let step = delta.norm();
                x = trial;
                r = tr;
                jac = tj;
                res = tres;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if step <= 1e-15 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt()) {
                    return LmOutcome {
                        x,
                        residual: res,
                        iterations: it,
                        converged: res <= opts.tol,
                    };
                }
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    LmOutcome {
        x,
        residual: res,
        iterations: it,
        converged: res <= opts.tol,
    }
}

/// Minimizes |F(z)| for holomorphic F in complex unknowns.
pub fn levenberg_marquardt_complex<F>(
    f: F,
    z0: &[Complex64],
    opts: LmOptions,
) -> LmOutcome<Complex64>
where
    F: Fn(&[Complex64]) -> (DVector<Complex64>, DMatrix<Complex64>),
{
    let a = z0.len();
    let pack = |x: &[f64]| -> Vec<Complex64> {
        (0..a).map(|j| Complex64::new(x[j], x[a + j])).collect()
    };
    let x0: Vec<f64> = z0.iter().map(|z| z.re).chain(z0.iter().map(|z| z.im)).collect();
    let out = levenberg_marquardt(
        |x| {
            let (r, j) = f(&pack(x));
            let b = j.nrows();
            let mut jr = DMatrix::<Complex64>::zeros(b, 2 * a);
            for i in 0..b {
                for k in 0..a {
                    jr[(i, k)] = j[(i, k)];
                    jr[(i, a + k)] = j[(i, k)] * Complex64::i();
                }
            }
            (r, jr)
        },
        x0,
        opts,
    );
    LmOutcome {
        x: pack(&out.x),
        residual: out.residual,
        iterations: out.iterations,
        converged: out.converged,
    }
}
