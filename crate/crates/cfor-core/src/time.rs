//! Explicit Runge-Kutta drivers and step-size control.

use crate::error::{CforError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    FixedDt(f64),
    Cfl(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub mode: StepMode,
    /// Reynolds number; `f64::INFINITY` drops the viscous limit.
    pub re: f64,
}

impl StepControl {
    pub fn fixed(dt: f64) -> Self {
        StepControl {
            mode: StepMode::FixedDt(dt),
            re: f64::INFINITY,
        }
    }

    pub fn cfl(cfl: f64) -> Self {
        StepControl {
            mode: StepMode::Cfl(cfl),
            re: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            StepMode::FixedDt(dt) if !(dt > 0.0 && dt.is_finite()) => {
                Err(CforError::InvalidParameter(format!("dt must be positive, got {dt}")))
            }
            StepMode::Cfl(c) if !(c > 0.0 && c <= 1.0) => {
                Err(CforError::InvalidParameter(format!("cfl must lie in (0, 1], got {c}")))
            }
            _ if !(self.re > 0.0) => Err(CforError::InvalidParameter(format!("Re must be positive, got {}", self.re))),
            _ => Ok(()),
        }
    }
}

fn axpy_into(out: &mut [f64], y: &[f64], a: f64, k: &[f64]) {
    for ((o, &yi), &ki) in out.iter_mut().zip(y).zip(k) {
        *o = yi + a * ki;
    }
}

fn check_finite(y: &[f64], step: usize, t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CforError::BlowUp { step, t })
    }
}

/// Classic four-stage RK4. `step` and `t` only label a blow-up error.
pub fn rk4_step<F>(y: &[f64], dt: f64, mut rhs: F, step: usize, t: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut tmp = vec![0.0; y.len()];
    let k1 = rhs(y)?;
    axpy_into(&mut tmp, y, 0.5 * dt, &k1);
    let k2 = rhs(&tmp)?;
    axpy_into(&mut tmp, y, 0.5 * dt, &k2);
    let k3 = rhs(&tmp)?;
    axpy_into(&mut tmp, y, dt, &k3);
    let k4 = rhs(&tmp)?;
    let out: Vec<f64> = (0..y.len())
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    check_finite(&out, step, t + dt)?;
    Ok(out)
}

/// A system advanced by projected Runge-Kutta stages.
pub trait ProjectedSystem {
    fn tendency(&mut self, y: &[f64]) -> Result<Vec<f64>>;
    /// Maps a provisional stage value to the constrained manifold. `stage_dt` is
    /// the effective time step the stage represents.
    fn project(&mut self, y: Vec<f64>, stage_dt: f64) -> Result<Vec<f64>>;
}

/// Shu-Osher SSP-RK3 with a projection after every stage.
pub fn rk3_projection_step<S: ProjectedSystem>(sys: &mut S, y: &[f64], dt: f64, step: usize, t: f64) -> Result<Vec<f64>> {
    let n = y.len();
    let a = sys.tendency(y)?;
    let y1 = sys.project((0..n).map(|i| y[i] + dt * a[i]).collect(), dt)?;
    let a = sys.tendency(&y1)?;
    let y2 = sys.project(
        (0..n).map(|i| 0.75 * y[i] + 0.25 * (y1[i] + dt * a[i])).collect(),
        0.25 * dt,
    )?;
    let a = sys.tendency(&y2)?;
    let out = sys.project(
        (0..n)
            .map(|i| y[i] / 3.0 + 2.0 / 3.0 * (y2[i] + dt * a[i]))
            .collect(),
        2.0 / 3.0 * dt,
    )?;
    check_finite(&out, step, t + dt)?;
    Ok(out)
}

/// Step size for incompressible flow:
/// `cfl / [max(|u|/dx + |v|/dy) + (2/Re)(1/dx^2 + 1/dy^2)]`. Pass an empty `v` in 1D.
pub fn compute_dt_incompressible(u: &[f64], v: &[f64], dx: f64, dy: f64, control: &StepControl) -> Result<f64> {
    control.validate()?;
    match control.mode {
        StepMode::FixedDt(dt) => Ok(dt),
        StepMode::Cfl(cfl) => {
            let adv = (0..u.len())
                .map(|i| u[i].abs() / dx + v.get(i).map_or(0.0, |vi| vi.abs() / dy))
                .fold(0.0, f64::max);
            let visc = if control.re.is_finite() {
                let inv = if v.is_empty() { 1.0 / (dx * dx) } else { 1.0 / (dx * dx) + 1.0 / (dy * dy) };
                2.0 / control.re * inv
            } else {
                0.0
            };
            let denom = adv + visc;
            if denom > 0.0 {
                Ok(cfl / denom)
            } else {
                Err(CforError::ZeroSpeed)
            }
        }
    }
}

/// Step size for compressible flow: `cfl / max((|u|+c)/dx + (|v|+c)/dy)`.
/// `v` may be empty for 1D.
pub fn compute_dt_compressible(u: &[f64], v: &[f64], c: &[f64], dx: f64, dy: f64, control: &StepControl) -> Result<f64> {
    control.validate()?;
    match control.mode {
        StepMode::FixedDt(dt) => Ok(dt),
        StepMode::Cfl(cfl) => {
            let denom = (0..u.len())
                .map(|i| (u[i].abs() + c[i]) / dx + v.get(i).map_or(0.0, |vi| (vi.abs() + c[i]) / dy))
                .fold(0.0, f64::max);
            if denom > 0.0 {
                Ok(cfl / denom)
            } else {
                Err(CforError::ZeroSpeed)
            }
        }
    }
}
