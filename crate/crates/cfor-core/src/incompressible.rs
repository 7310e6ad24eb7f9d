//! 2D incompressible Euler on a periodic box: advective tendency, pressure
//! projection and the incremental-pressure Runge-Kutta system.

use crate::error::{CforError, Result};
use crate::grid::{check_points, Axis, CompiledStencil, Field};
use crate::kernels::{stencil, KernelSpec};
use crate::poisson::{bicg, line_symbol, SolveStats, SpectralSymbol};
use crate::time::ProjectedSystem;

pub const DEFAULT_POISSON_TOL: f64 = 1e-12;

/// Discrete Laplacian used in the pressure Poisson equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoissonOperator {
    /// Sum of the second-derivative stencils per axis (2W+1 wide).
    Compact,
    /// Divergence of the gradient, `D1x D1x + D1y D1y`; the projected field is
    /// then discretely divergence-free to solver tolerance.
    Consistent,
}

impl std::str::FromStr for PoissonOperator {
    type Err = CforError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "compact" => Ok(PoissonOperator::Compact),
            "consistent" => Ok(PoissonOperator::Consistent),
            other => Err(CforError::InvalidParameter(format!("unknown poisson operator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncompressibleState {
    pub u: Field,
    pub v: Field,
    /// Pressure diagnostic.
    pub p: Field,
}

/// Result of one projection.
#[derive(Debug, Clone)]
pub struct Projected {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub phi: Vec<f64>,
    pub stats: SolveStats,
}

/// Periodic projection onto discretely divergence-free fields.
#[derive(Debug, Clone)]
pub struct Projector {
    pub nx: usize,
    pub ny: usize,
    pub operator: PoissonOperator,
    pub tol: f64,
    pub max_iter: usize,
    d1x: CompiledStencil,
    d1y: CompiledStencil,
    d2x: CompiledStencil,
    d2y: CompiledStencil,
    symbol: SpectralSymbol,
}

impl Projector {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, spec: &KernelSpec, operator: PoissonOperator, tol: f64) -> Result<Self> {
        check_points(nx)?;
        check_points(ny)?;
        if !(tol > 0.0) {
            return Err(CforError::InvalidParameter(format!("poisson tolerance must be positive, got {tol}")));
        }
        let w1 = stencil(spec, 1)?;
        let w2 = stencil(spec, 2)?;
        let (sx, sy) = match operator {
            PoissonOperator::Compact => (
                line_symbol(&w2.weights, nx, false).iter().map(|s| s / (dx * dx)).collect::<Vec<_>>(),
                line_symbol(&w2.weights, ny, false).iter().map(|s| s / (dy * dy)).collect::<Vec<_>>(),
            ),
            PoissonOperator::Consistent => (
                line_symbol(&w1.weights, nx, true).iter().map(|s| -(s / dx).powi(2)).collect(),
                line_symbol(&w1.weights, ny, true).iter().map(|s| -(s / dy).powi(2)).collect(),
            ),
        };
        Ok(Projector {
            nx,
            ny,
            operator,
            tol,
            max_iter: 10 * nx * ny,
            d1x: CompiledStencil::derivative(&w1, dx)?,
            d1y: CompiledStencil::derivative(&w1, dy)?,
            d2x: CompiledStencil::derivative(&w2, dx)?,
            d2y: CompiledStencil::derivative(&w2, dy)?,
            symbol: SpectralSymbol::new(&sx, &sy),
        })
    }

    pub fn d1(&self, f: &[f64], axis: Axis) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        let s = if axis == Axis::X { &self.d1x } else { &self.d1y };
        s.apply_axis_into(f, self.nx, self.ny, axis, &mut out)
            .expect("projector buffers match its grid");
        out
    }

    pub fn divergence(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut d = self.d1(u, Axis::X);
        for (a, b) in d.iter_mut().zip(self.d1(v, Axis::Y)) {
            *a += b;
        }
        d
    }

    /// Matrix-free Poisson operator.
    pub fn laplacian(&self, phi: &[f64]) -> Vec<f64> {
        match self.operator {
            PoissonOperator::Compact => {
                let mut a = vec![0.0; phi.len()];
                let mut b = vec![0.0; phi.len()];
                self.d2x.apply_axis_into(phi, self.nx, self.ny, Axis::X, &mut a).expect("grid");
                self.d2y.apply_axis_into(phi, self.nx, self.ny, Axis::Y, &mut b).expect("grid");
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            }
            PoissonOperator::Consistent => {
                let gx = self.d1(phi, Axis::X);
                let gy = self.d1(phi, Axis::Y);
                self.divergence(&gx, &gy)
            }
        }
    }

    /// Solves `L phi = rhs` for zero-mean `phi` after removing the part of
    /// `rhs` outside the range of `L`.
    pub fn solve(&self, rhs: &[f64]) -> Result<(Vec<f64>, SolveStats)> {
        let b = self.symbol.remove_null(rhs);
        let lap = |v: &[f64]| self.laplacian(v);
        let pre = |v: &[f64]| self.symbol.solve(v);
        let (phi, stats) = bicg(&b, lap, lap, pre, pre, self.tol, self.max_iter)?;
        Ok((self.symbol.remove_null(&phi), stats))
    }

    /// `u = u* - grad(phi)` with `L phi = div(u*)`.
    pub fn project(&self, u: &[f64], v: &[f64]) -> Result<Projected> {
        let n = self.nx * self.ny;
        if u.len() != n || v.len() != n {
            return Err(CforError::ShapeMismatch(format!("velocity must have {n} values")));
        }
        let (phi, stats) = self.solve(&self.divergence(u, v))?;
        let gx = self.d1(&phi, Axis::X);
        let gy = self.d1(&phi, Axis::Y);
        Ok(Projected {
            u: u.iter().zip(&gx).map(|(a, b)| a - b).collect(),
            v: v.iter().zip(&gy).map(|(a, b)| a - b).collect(),
            phi,
            stats,
        })
    }
}

/// Projects `(u, v)` with the consistent operator built from `spec`.
pub fn project(u: &Field, v: &Field, spec: &KernelSpec, tol: f64) -> Result<(Field, Field, Field)> {
    if !u.same_shape(v) {
        return Err(CforError::ShapeMismatch("u and v differ in shape".into()));
    }
    let pr = Projector::new(u.nx, u.ny, u.dx, u.dy, spec, PoissonOperator::Consistent, tol)?;
    let out = pr.project(&u.data, &v.data)?;
    Ok((u.with_data(out.u)?, v.with_data(out.v)?, u.with_data(out.phi)?))
}

/// Advective tendency `-(u.grad)u`, pressure excluded.
pub fn incompressible_rhs(state: &IncompressibleState, spec: &KernelSpec) -> Result<(Field, Field)> {
    let s = state;
    if !s.u.same_shape(&s.v) {
        return Err(CforError::ShapeMismatch("u and v differ in shape".into()));
    }
    let w = stencil(spec, 1)?;
    let dx = CompiledStencil::derivative(&w, s.u.dx)?;
    let dy = CompiledStencil::derivative(&w, s.u.dy)?;
    let (du, dv) = advect(&dx, &dy, &s.u.data, &s.v.data, s.u.nx, s.u.ny)?;
    Ok((s.u.with_data(du)?, s.v.with_data(dv)?))
}

fn advect(dx: &CompiledStencil, dy: &CompiledStencil, u: &[f64], v: &[f64], nx: usize, ny: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = u.len();
    let mut gx = vec![0.0; n];
    let mut gy = vec![0.0; n];
    let mut out = [vec![0.0; n], vec![0.0; n]];
    for (c, f) in [u, v].iter().enumerate() {
        dx.apply_axis_into(f, nx, ny, Axis::X, &mut gx)?;
        dy.apply_axis_into(f, nx, ny, Axis::Y, &mut gy)?;
        for i in 0..n {
            out[c][i] = -(u[i] * gx[i] + v[i] * gy[i]);
        }
    }
    let [a, b] = out;
    Ok((a, b))
}

/// Incremental-pressure projection system: each stage adds `phi / stage_dt`
/// to the pressure and the next tendency includes `-grad p`.
#[derive(Debug, Clone)]
pub struct IncompressibleSystem {
    pub projector: Projector,
    pub pressure: Vec<f64>,
    pub solves: usize,
    pub iterations: usize,
}

impl IncompressibleSystem {
    pub fn new(projector: Projector, pressure: Vec<f64>) -> Self {
        IncompressibleSystem {
            projector,
            pressure,
            solves: 0,
            iterations: 0,
        }
    }

    pub fn split<'a>(&self, y: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        y.split_at(self.projector.nx * self.projector.ny)
    }
}

impl ProjectedSystem for IncompressibleSystem {
    fn tendency(&mut self, y: &[f64]) -> Result<Vec<f64>> {
        let pr = &self.projector;
        let (u, v) = self.split(y);
        let (mut a, mut b) = advect(&pr.d1x, &pr.d1y, u, v, pr.nx, pr.ny)?;
        let px = pr.d1(&self.pressure, Axis::X);
        let py = pr.d1(&self.pressure, Axis::Y);
        a.iter_mut().zip(&px).for_each(|(t, g)| *t -= g);
        b.iter_mut().zip(&py).for_each(|(t, g)| *t -= g);
        a.extend(b);
        Ok(a)
    }

    fn project(&mut self, y: Vec<f64>, stage_dt: f64) -> Result<Vec<f64>> {
        let (u, v) = self.split(&y);
        let out = self.projector.project(u, v)?;
        self.solves += 1;
        self.iterations += out.stats.iterations;
        for (p, f) in self.pressure.iter_mut().zip(&out.phi) {
            *p += f / stage_dt;
        }
        let mut y = out.u;
        y.extend(out.v);
        Ok(y)
    }
}
