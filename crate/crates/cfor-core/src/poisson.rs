//! Periodic Poisson solves: matrix-free preconditioned BiCG with an FFT
//! diagonalization of the stencil operator as preconditioner.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{CforError, Result};

/// Iteration record of a Krylov solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Max-norm residual after each iteration, starting with the initial one.
    pub history: Vec<f64>,
}

impl SolveStats {
    pub fn residual(&self) -> f64 {
        self.history.last().copied().unwrap_or(0.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Preconditioned bi-conjugate gradient for `A x = b`, starting from `x = 0`.
///
/// `apply` and `apply_t` compute `A v` and `A^T v`; `precond` and `precond_t`
/// apply `M^{-1}` and its transpose. Stops when `max|b - A x| <= tol`.
pub fn bicg<A, AT, P, PT>(
    b: &[f64],
    mut apply: A,
    mut apply_t: AT,
    mut precond: P,
    mut precond_t: PT,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats)>
where
    A: FnMut(&[f64]) -> Vec<f64>,
    AT: FnMut(&[f64]) -> Vec<f64>,
    P: FnMut(&[f64]) -> Vec<f64>,
    PT: FnMut(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut rt = b.to_vec();
    let mut history = vec![max_abs(&r)];
    if history[0] <= tol {
        return Ok((x, SolveStats { iterations: 0, history }));
    }
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut pt = precond_t(&rt);
    let mut rho = dot(&z, &rt);
    for it in 1..=max_iter {
        let q = apply(&p);
        let qt = apply_t(&pt);
        let denom = dot(&pt, &q);
        if denom == 0.0 || !denom.is_finite() || rho == 0.0 {
            break;
        }
        let alpha = rho / denom;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            rt[i] -= alpha * qt[i];
        }
        history.push(max_abs(&r));
        if history[it] <= tol {
            return Ok((x, SolveStats { iterations: it, history }));
        }
        z = precond(&r);
        let zt = precond_t(&rt);
        let rho_new = dot(&z, &rt);
        let beta = rho_new / rho;
        rho = rho_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
            pt[i] = zt[i] + beta * pt[i];
        }
    }
    let iterations = history.len() - 1;
    Err(CforError::NoConvergence {
        iterations,
        residual: history[iterations],
        history,
    })
}

/// Forward/inverse 2D FFT on row-major `nx * ny` data.
#[derive(Clone)]
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fx: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.nx, self.ny)
    }
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            nx,
            ny,
            fx: planner.plan_fft_forward(nx),
            ix: planner.plan_fft_inverse(nx),
            fy: planner.plan_fft_forward(ny),
            iy: planner.plan_fft_inverse(ny),
        }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let (nx, ny) = (self.nx, self.ny);
        let (px, py) = if inverse { (&self.ix, &self.iy) } else { (&self.fx, &self.fy) };
        px.process(data);
        if ny > 1 {
            let mut col = vec![Complex64::new(0.0, 0.0); ny];
            for i in 0..nx {
                for j in 0..ny {
                    col[j] = data[j * nx + i];
                }
                py.process(&mut col);
                for j in 0..ny {
                    data[j * nx + i] = col[j];
                }
            }
        }
    }

    pub fn forward(&self, real: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = real.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.run(&mut d, false);
        d
    }

    /// Inverse transform (normalized), real part.
    pub fn inverse_real(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.run(&mut spec, true);
        let scale = 1.0 / (self.nx * self.ny) as f64;
        spec.iter().map(|c| c.re * scale).collect()
    }
}

/// Diagonal of a periodic, separable-sum stencil operator in Fourier space,
/// `lambda(mx, my) = sx[mx] + sy[my]`, with its numerical null space.
#[derive(Debug, Clone)]
pub struct SpectralSymbol {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    /// True where the symbol is numerically zero.
    pub null: Vec<bool>,
    fft: Fft2,
}

impl SpectralSymbol {
    pub fn new(sx: &[f64], sy: &[f64]) -> Self {
        let (nx, ny) = (sx.len(), sy.len());
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(sx[i] + sy[j]);
            }
        }
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let null = values.iter().map(|v| v.abs() <= 1e-10 * scale).collect();
        SpectralSymbol {
            nx,
            ny,
            values,
            null,
            fft: Fft2::new(nx, ny),
        }
    }

    /// Applies the pseudo-inverse.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut s = self.fft.forward(rhs);
        for ((c, &v), &z) in s.iter_mut().zip(&self.values).zip(&self.null) {
            *c = if z { Complex64::new(0.0, 0.0) } else { *c / v };
        }
        self.fft.inverse_real(s)
    }

    /// Removes the null-space components (the compatibility projection).
    pub fn remove_null(&self, data: &[f64]) -> Vec<f64> {
        let mut s = self.fft.forward(data);
        for (c, &z) in s.iter_mut().zip(&self.null) {
            if z {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.fft.inverse_real(s)
    }
}

/// Fourier symbol `sum_j w_j e^{i 2 pi m j / n}` of a centered stencil on a
/// periodic line of `n` points, real part for symmetric and imaginary part for
/// antisymmetric weights.
pub fn line_symbol(weights: &[f64], n: usize, antisymmetric: bool) -> Vec<f64> {
    let w = (weights.len() / 2) as isize;
    (0..n)
        .map(|m| {
            let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
            (-w..=w)
                .zip(weights)
                .map(|(j, &c)| {
                    let a = theta * j as f64;
                    if antisymmetric {
                        c * a.sin()
                    } else {
                        c * a.cos()
                    }
                })
                .sum()
        })
        .collect()
}
