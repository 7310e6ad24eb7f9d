//! Compressible Euler equations in conservative form, discretized with central
//! DSC flux derivatives.

use crate::error::{CforError, Result};
use crate::filters::{total_variation_open, total_variation_raw, LowPass};
use crate::grid::{check_points, Axis, CompiledStencil, Field};
use crate::kernels::{stencil, KernelSpec};

pub const GAMMA: f64 = 1.4;

/// Conservative variables `rho, m_x, [m_y,] E` stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerState {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin: [f64; 2],
    pub gamma: f64,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    /// Empty in 1D.
    pub v: Vec<f64>,
    pub p: Vec<f64>,
}

impl Primitive {
    pub fn sound_speed(&self, gamma: f64) -> Vec<f64> {
        self.p.iter().zip(&self.rho).map(|(p, r)| (gamma * p / r).sqrt()).collect()
    }
}

impl EulerState {
    pub fn from_primitive_1d(rho: &[f64], u: &[f64], p: &[f64], dx: f64, x0: f64, gamma: f64) -> Result<Self> {
        let n = rho.len();
        if u.len() != n || p.len() != n {
            return Err(CforError::ShapeMismatch("primitive arrays differ in length".into()));
        }
        let mut data = Vec::with_capacity(3 * n);
        data.extend_from_slice(rho);
        data.extend((0..n).map(|i| rho[i] * u[i]));
        data.extend((0..n).map(|i| p[i] / (gamma - 1.0) + 0.5 * rho[i] * u[i] * u[i]));
        Ok(EulerState {
            nx: n,
            ny: 1,
            dx,
            dy: 1.0,
            origin: [x0, 0.0],
            gamma,
            data,
        })
    }

    pub fn from_primitive_2d(prim: &Primitive, nx: usize, ny: usize, dx: f64, dy: f64, origin: [f64; 2], gamma: f64) -> Result<Self> {
        let n = nx * ny;
        if [prim.rho.len(), prim.u.len(), prim.v.len(), prim.p.len()].iter().any(|&l| l != n) {
            return Err(CforError::ShapeMismatch(format!("primitive arrays must have {n} values")));
        }
        let mut data = Vec::with_capacity(4 * n);
        data.extend_from_slice(&prim.rho);
        data.extend((0..n).map(|i| prim.rho[i] * prim.u[i]));
        data.extend((0..n).map(|i| prim.rho[i] * prim.v[i]));
        data.extend((0..n).map(|i| {
            prim.p[i] / (gamma - 1.0) + 0.5 * prim.rho[i] * (prim.u[i] * prim.u[i] + prim.v[i] * prim.v[i])
        }));
        Ok(EulerState {
            nx,
            ny,
            dx,
            dy,
            origin,
            gamma,
            data,
        })
    }

    pub fn points(&self) -> usize {
        self.nx * self.ny
    }

    pub fn components(&self) -> usize {
        if self.ny > 1 {
            4
        } else {
            3
        }
    }

    pub fn component(&self, k: usize) -> &[f64] {
        let n = self.points();
        &self.data[k * n..(k + 1) * n]
    }

    pub fn energy(&self) -> &[f64] {
        self.component(self.components() - 1)
    }

    pub fn field(&self, k: usize) -> Field {
        Field {
            nx: self.nx,
            ny: self.ny,
            dx: self.dx,
            dy: self.dy,
            origin: self.origin,
            data: self.component(k).to_vec(),
        }
    }

    /// Per-component sums (discrete conserved totals without the cell volume).
    pub fn totals(&self) -> Vec<f64> {
        (0..self.components()).map(|k| self.component(k).iter().sum()).collect()
    }

    pub fn primitive(&self) -> Result<Primitive> {
        primitive_from_conservative(self)
    }
}

/// With `strict = false` only density must be positive: stage tendencies only
/// need fluxes, and a transient negative pressure inside an RK stage is judged
/// at the end of the step.
fn primitive_raw(data: &[f64], n: usize, two_d: bool, gamma: f64, strict: bool) -> Result<Primitive> {
    let rho = &data[..n];
    let mx = &data[n..2 * n];
    let (my, e) = if two_d {
        (Some(&data[2 * n..3 * n]), &data[3 * n..4 * n])
    } else {
        (None, &data[2 * n..3 * n])
    };
    let mut prim = Primitive {
        rho: rho.to_vec(),
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(if two_d { n } else { 0 }),
        p: Vec::with_capacity(n),
    };
    for i in 0..n {
        let r = rho[i];
        if !(r > 0.0) {
            return Err(CforError::Positivity {
                quantity: "density",
                value: r,
                index: i,
            });
        }
        let u = mx[i] / r;
        let v = my.map_or(0.0, |m| m[i] / r);
        let p = (gamma - 1.0) * (e[i] - 0.5 * r * (u * u + v * v));
        if strict && !(p > 0.0) || !p.is_finite() {
            return Err(CforError::Positivity {
                quantity: "pressure",
                value: p,
                index: i,
            });
        }
        prim.u.push(u);
        if two_d {
            prim.v.push(v);
        }
        prim.p.push(p);
    }
    Ok(prim)
}

/// `u = m/rho`, `p = (gamma-1)(E - |m|^2/(2 rho))`, with positivity checks.
pub fn primitive_from_conservative(state: &EulerState) -> Result<Primitive> {
    primitive_raw(&state.data, state.points(), state.ny > 1, state.gamma, true)
}

/// Boundary treatment for 1D runs.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary1d {
    Periodic,
    /// Ghost bands: left frozen at the given conservative state, right extrapolated
    /// with zero gradient.
    InflowOutflow { left: [f64; 3] },
}

/// Conservative low-pass restricted to a band of cells around the steepest
/// pressure jump, written in flux form so that mass, momentum and energy are
/// conserved exactly.
#[derive(Debug, Clone)]
pub struct ShockBand {
    /// `G_{k+1/2} = sum_m b_m U_{k+m}` with `(F - I)U_i = G_{i+1/2} - G_{i-1/2}`.
    flux: CompiledStencil,
    /// Half-points `k +- band` around the jump are filtered.
    pub band: usize,
    pub r: f64,
}

impl ShockBand {
    pub fn new(spec: &KernelSpec, r: f64, band: usize) -> Result<Self> {
        let predict = crate::kernels::halfgrid_stencil(spec)?;
        let restore = crate::kernels::halfgrid_stencil(&KernelSpec { r, ..*spec })?;
        let w = predict.half_width() as isize;
        // Composite stencil a (offsets -2W+1..2W-1) of restore after predict.
        let lo = -2 * w + 1;
        let mut a = vec![0.0; (4 * w - 1) as usize];
        for (jr, wr) in (-w..w).zip(&restore.weights) {
            for (jp, wp) in (-w + 1..=w).zip(&predict.weights) {
                a[(jr + jp - lo) as usize] += wr * wp;
            }
        }
        a[(-lo) as usize] -= 1.0;
        // b_k = sum_{l >= k} a_l, support lo+1..=hi.
        let mut b = vec![0.0; a.len()];
        let mut acc = 0.0;
        for k in (0..a.len()).rev() {
            acc += a[k];
            b[k] = acc;
        }
        let offsets: Vec<isize> = (lo + 1..lo + a.len() as isize).collect();
        let weights = b[1..].to_vec();
        Ok(ShockBand {
            flux: CompiledStencil::new(offsets, weights),
            band,
            r,
        })
    }

    pub fn reach(&self) -> usize {
        self.flux.reach()
    }
}

/// Right-hand side and filter machinery for 1D/2D compressible Euler.
#[derive(Debug, Clone)]
pub struct EulerSolver {
    pub nx: usize,
    pub ny: usize,
    pub gamma: f64,
    pub boundary: Boundary1d,
    d1x: CompiledStencil,
    d1y: Option<CompiledStencil>,
    lowpass: Option<LowPass>,
    shock_band: Option<ShockBand>,
    pad: usize,
}

impl EulerSolver {
    pub fn new_1d(n: usize, dx: f64, spec: &KernelSpec, gamma: f64, boundary: Boundary1d) -> Result<Self> {
        check_points(n)?;
        let w = stencil(spec, 1)?;
        let pad = spec.half_width;
        Ok(EulerSolver {
            nx: n,
            ny: 1,
            gamma,
            boundary,
            d1x: CompiledStencil::derivative(&w, dx)?,
            d1y: None,
            lowpass: None,
            shock_band: None,
            pad,
        })
    }

    pub fn new_2d(nx: usize, ny: usize, dx: f64, dy: f64, spec: &KernelSpec, gamma: f64) -> Result<Self> {
        check_points(nx)?;
        check_points(ny)?;
        let w = stencil(spec, 1)?;
        Ok(EulerSolver {
            nx,
            ny,
            gamma,
            boundary: Boundary1d::Periodic,
            d1x: CompiledStencil::derivative(&w, dx)?,
            d1y: Some(CompiledStencil::derivative(&w, dy)?),
            lowpass: None,
            shock_band: None,
            pad: spec.half_width,
        })
    }

    pub fn with_lowpass(mut self, lowpass: LowPass) -> Self {
        self.lowpass = Some(lowpass);
        self
    }

    pub fn with_shock_band(mut self, band: ShockBand) -> Self {
        self.shock_band = Some(band);
        self
    }

    fn components(&self) -> usize {
        if self.ny > 1 {
            4
        } else {
            3
        }
    }

    pub fn primitive(&self, data: &[f64]) -> Result<Primitive> {
        primitive_raw(data, self.nx * self.ny, self.ny > 1, self.gamma, true)
    }

    /// Ghost-extended copy of one 1D component, `pad` cells each side.
    fn extend_1d(&self, comp: &[f64], k: usize, pad: usize, ext: &mut Vec<f64>) {
        let n = comp.len();
        ext.clear();
        match &self.boundary {
            Boundary1d::Periodic => ext.extend((0..n + 2 * pad).map(|t| comp[(t + n * (pad / n + 1) - pad) % n])),
            Boundary1d::InflowOutflow { left } => {
                ext.extend(std::iter::repeat(left[k]).take(pad));
                ext.extend_from_slice(comp);
                ext.extend(std::iter::repeat(comp[n - 1]).take(pad));
            }
        }
    }

    /// Tendency `-dF/dx [- dG/dy]`.
    pub fn rhs(&self, data: &[f64]) -> Result<Vec<f64>> {
        let n = self.nx * self.ny;
        let nc = self.components();
        if data.len() != nc * n {
            return Err(CforError::ShapeMismatch(format!("expected {} values, got {}", nc * n, data.len())));
        }
        let prim = primitive_raw(data, n, self.ny > 1, self.gamma, false)?;
        let e = &data[(nc - 1) * n..];
        let mut out = vec![0.0; nc * n];
        let mut flux = vec![0.0; n];
        let mut deriv = vec![0.0; n];
        if self.ny == 1 {
            let mut ext = Vec::with_capacity(n + 2 * self.pad);
            for k in 0..3 {
                for i in 0..n {
                    let (r, u, p) = (prim.rho[i], prim.u[i], prim.p[i]);
                    flux[i] = match k {
                        0 => r * u,
                        1 => r * u * u + p,
                        _ => u * (e[i] + p),
                    };
                }
                let boundary_flux = match &self.boundary {
                    Boundary1d::InflowOutflow { left } => Some(flux_1d(left, self.gamma)[k]),
                    Boundary1d::Periodic => None,
                };
                ext.clear();
                match boundary_flux {
                    Some(fl) => {
                        ext.extend(std::iter::repeat(fl).take(self.pad));
                        ext.extend_from_slice(&flux);
                        ext.extend(std::iter::repeat(flux[n - 1]).take(self.pad));
                        self.d1x.apply_padded(&ext, self.pad, &mut deriv);
                    }
                    None => self.d1x.apply_periodic(&flux, &mut deriv, &mut ext),
                }
                for (o, d) in out[k * n..(k + 1) * n].iter_mut().zip(&deriv) {
                    *o = -d;
                }
            }
        } else {
            let d1y = self.d1y.as_ref().expect("2D solver has a y stencil");
            let (nx, ny) = (self.nx, self.ny);
            for k in 0..4 {
                for i in 0..n {
                    let (r, u, p) = (prim.rho[i], prim.u[i], prim.p[i]);
                    flux[i] = match k {
                        0 => r * u,
                        1 => r * u * u + p,
                        2 => r * u * prim.v[i],
                        _ => u * (e[i] + p),
                    };
                }
                self.d1x.apply_axis_into(&flux, nx, ny, Axis::X, &mut deriv)?;
                let o = &mut out[k * n..(k + 1) * n];
                for (oi, d) in o.iter_mut().zip(&deriv) {
                    *oi = -d;
                }
                for i in 0..n {
                    let (r, v, p) = (prim.rho[i], prim.v[i], prim.p[i]);
                    flux[i] = match k {
                        0 => r * v,
                        1 => r * prim.u[i] * v,
                        2 => r * v * v + p,
                        _ => v * (e[i] + p),
                    };
                }
                d1y.apply_axis_into(&flux, nx, ny, Axis::Y, &mut deriv)?;
                for (oi, d) in o.iter_mut().zip(&deriv) {
                    *oi -= d;
                }
            }
        }
        Ok(out)
    }

    /// Total variation of each conservative component.
    pub fn total_variations(&self, data: &[f64]) -> Vec<f64> {
        let n = self.nx * self.ny;
        (0..self.components())
            .map(|k| {
                let c = &data[k * n..(k + 1) * n];
                match self.boundary {
                    Boundary1d::InflowOutflow { .. } => total_variation_open(c),
                    Boundary1d::Periodic => total_variation_raw(c, self.nx, self.ny),
                }
            })
            .collect()
    }

    /// Conjugate low-pass of every conservative component, then the shock band if set.
    pub fn filter(&self, data: &mut [f64]) -> Result<()> {
        let Some(lp) = &self.lowpass else {
            return Err(CforError::InvalidParameter("solver has no low-pass filter".into()));
        };
        let n = self.nx * self.ny;
        if self.ny > 1 || self.boundary == Boundary1d::Periodic {
            for k in 0..self.components() {
                lp.apply_all_axes(&mut data[k * n..(k + 1) * n], self.nx, self.ny)?;
            }
        } else {
            let pad = 2 * lp.half_width();
            let mut ext = Vec::with_capacity(n + 2 * pad);
            let mut mid = Vec::new();
            let mut out = vec![0.0; n];
            for k in 0..3 {
                self.extend_1d(&data[k * n..(k + 1) * n], k, pad, &mut ext);
                lp.apply_padded(&ext, &mut out, &mut mid);
                data[k * n..(k + 1) * n].copy_from_slice(&out);
            }
        }
        if self.shock_band.is_some() {
            self.apply_shock_band(data)?;
        }
        Ok(())
    }

    /// Flux-form band filter around the largest pressure jump (1D only).
    pub fn apply_shock_band(&self, data: &mut [f64]) -> Result<()> {
        let Some(sb) = &self.shock_band else { return Ok(()) };
        if self.ny > 1 {
            return Err(CforError::InvalidParameter("shock band is 1D only".into()));
        }
        let n = self.nx;
        // Locating the jump must not fail on a transiently negative pressure.
        let p = primitive_raw(data, n, false, self.gamma, false)?.p;
        let jump = (0..n - 1)
            .max_by(|&a, &b| (p[a + 1] - p[a]).abs().total_cmp(&(p[b + 1] - p[b]).abs()))
            .unwrap_or(0);
        let lo = jump.saturating_sub(sb.band);
        // Interior faces only, so the band never pushes mass through a boundary.
        let hi = (jump + sb.band).min(n - 2);
        let pad = sb.reach() + 1;
        let mut ext = Vec::with_capacity(n + 2 * pad);
        // g[k - lo] holds G_{k+1/2} for k in lo..=hi.
        let mut g = vec![0.0; hi - lo + 1];
        for k in 0..3 {
            self.extend_1d(&data[k * n..(k + 1) * n], k, pad, &mut ext);
            sb.flux.apply_padded(&ext[lo..lo + g.len() + 2 * pad], pad, &mut g);
            let c = &mut data[k * n..(k + 1) * n];
            for (idx, kk) in (lo..=hi).enumerate() {
                c[kk] += g[idx];
                c[kk + 1] -= g[idx];
            }
        }
        Ok(())
    }
}

/// Flux vector `(m, m^2/rho + p, u(E + p))` of a 1D conservative state.
pub fn flux_1d(u: &[f64; 3], gamma: f64) -> [f64; 3] {
    let vel = u[1] / u[0];
    let p = (gamma - 1.0) * (u[2] - 0.5 * u[1] * vel);
    [u[1], u[1] * vel + p, vel * (u[2] + p)]
}

/// Conservative triple from `(rho, u, p)`.
pub fn conservative_1d(rho: f64, u: f64, p: f64, gamma: f64) -> [f64; 3] {
    [rho, rho * u, p / (gamma - 1.0) + 0.5 * rho * u * u]
}

/// Periodic 1D tendency of `state` with the DSC first-derivative stencil of `spec`.
pub fn euler_rhs_1d(state: &EulerState, spec: &KernelSpec) -> Result<Vec<f64>> {
    EulerSolver::new_1d(state.nx, state.dx, spec, state.gamma, Boundary1d::Periodic)?.rhs(&state.data)
}

/// Periodic 2D tendency of `state`.
pub fn euler_rhs_2d(state: &EulerState, spec: &KernelSpec) -> Result<Vec<f64>> {
    EulerSolver::new_2d(state.nx, state.ny, state.dx, state.dy, spec, state.gamma)?.rhs(&state.data)
}
