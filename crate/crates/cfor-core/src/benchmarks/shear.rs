use std::f64::consts::PI;

use super::{segment_steps, CaseConfig, RunOutput, Snapshot};
use crate::error::Result;
use crate::filters::{total_variation_raw, ConjugateFilterBank, TvPolicy, TvSwitch};
use crate::grid::{Axis, Field};
use crate::incompressible::{IncompressibleSystem, Projector};
use crate::time::{rk3_projection_step, StepControl, StepMode};

/// Double shear layer: `u = tanh((2y - pi)/(2 rho))` below `y = pi`,
/// `tanh((3 pi - 2y)/(2 rho))` above, `v = delta sin x`.
pub fn shear_layer_init(x: f64, y: f64, thickness: f64, delta: f64) -> (f64, f64) {
    let u = if y <= PI {
        ((2.0 * y - PI) / (2.0 * thickness)).tanh()
    } else {
        ((3.0 * PI - 2.0 * y) / (2.0 * thickness)).tanh()
    };
    (u, delta * x.sin())
}

fn extrema(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

pub(super) fn run(cfg: &CaseConfig) -> Result<RunOutput> {
    let n = cfg.n;
    let nn = n * n;
    let d = 2.0 * PI / n as f64;
    let mut out = RunOutput::new(cfg);
    let mut u0 = Vec::with_capacity(nn);
    let mut v0 = Vec::with_capacity(nn);
    for j in 0..n {
        for i in 0..n {
            let (u, v) = shear_layer_init(i as f64 * d, j as f64 * d, cfg.thickness, cfg.delta);
            u0.push(u);
            v0.push(v);
        }
    }
    let projector = Projector::new(n, n, d, d, &cfg.kernel, cfg.poisson, cfg.poisson_tol)?;
    // The initial data is not discretely solenoidal; project once and start from p = 0.
    let first = projector.project(&u0, &v0)?;
    let mut y = first.u;
    y.extend(first.v);
    let mut sys = IncompressibleSystem::new(projector, vec![0.0; nn]);

    let lowpass = if cfg.filter {
        Some(ConjugateFilterBank::new(&cfg.kernel, cfg.r_lp)?.lowpass())
    } else {
        None
    };
    let tvs = |y: &[f64]| vec![total_variation_raw(&y[..nn], n, n), total_variation_raw(&y[nn..], n, n)];
    let mut switch = TvSwitch::new(TvPolicy { eps: cfg.tv_eps }, tvs(&y));
    let energy = |y: &[f64]| y.iter().map(|v| v * v).sum::<f64>() * 0.5 * d * d;
    let vorticity = |sys: &IncompressibleSystem, y: &[f64]| {
        let (u, v) = y.split_at(nn);
        let vx = sys.projector.d1(v, Axis::X);
        let uy = sys.projector.d1(u, Axis::Y);
        vx.iter().zip(&uy).map(|(a, b)| a - b).collect::<Vec<f64>>()
    };
    let ke0 = energy(&y);
    let (wmin0, wmax0) = extrema(&vorticity(&sys, &y));
    out.note(format!("shear N={n} ke0={ke0:.12e} vorticity in [{wmin0:.6}, {wmax0:.6}]"));

    let dt_max = match cfg.step {
        StepMode::FixedDt(dt) => dt,
        StepMode::Cfl(_) => {
            let (u, v) = y.split_at(nn);
            crate::time::compute_dt_incompressible(u, v, d, d, &StepControl { mode: cfg.step, re: f64::INFINITY })?
        }
    };
    let (mut t, mut step) = (0.0, 0usize);
    let mut ke_prev = ke0;
    let mut ke_max_rise = 0.0f64;
    let mut max_div = 0.0f64;
    let mut wmin_all = wmin0;
    let mut wmax_all = wmax0;
    for target in cfg.samples() {
        let (steps, dt) = segment_steps(t, target, dt_max);
        for _ in 0..steps {
            y = rk3_projection_step(&mut sys, &y, dt, step, t)?;
            step += 1;
            t += dt;
            if let Some(lp) = &lowpass {
                if switch.should_filter(&tvs(&y)) {
                    let (u, v) = y.split_at_mut(nn);
                    lp.apply_all_axes(u, n, n)?;
                    lp.apply_all_axes(v, n, n)?;
                    switch.reset(tvs(&y));
                    out.filter_events += 1;
                }
            }
            let ke = energy(&y);
            ke_max_rise = ke_max_rise.max((ke - ke_prev) / ke0);
            ke_prev = ke;
        }
        t = target;
        let (u, v) = y.split_at(nn);
        let div = sys.projector.divergence(u, v);
        let div_here = div.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        max_div = max_div.max(div_here);
        let w = vorticity(&sys, &y);
        let (wmin, wmax) = extrema(&w);
        wmin_all = wmin_all.min(wmin);
        wmax_all = wmax_all.max(wmax);
        out.note(format!(
            "t={t:.4} step={step} ke/ke0={:.10} max|div|={div_here:.3e} vorticity in [{wmin:.6}, {wmax:.6}] filters={}",
            ke_prev / ke0,
            out.filter_events
        ));
        if cfg.snapshots {
            let f = Field::zeros_2d(n, n, d, d, [0.0, 0.0])?;
            out.snapshots.push(Snapshot {
                t,
                name: "vorticity".into(),
                field: f.with_data(w)?,
            });
        }
    }
    out.steps = step;
    out.set_scalar("steps", step as f64);
    out.set_scalar("ke_ratio", ke_prev / ke0);
    out.set_scalar("ke_decay", 1.0 - ke_prev / ke0);
    out.set_scalar("ke_max_step_rise", ke_max_rise);
    out.set_scalar("max_divergence", max_div);
    out.set_scalar("vorticity_min0", wmin0);
    out.set_scalar("vorticity_max0", wmax0);
    out.set_scalar("vorticity_min", wmin_all);
    out.set_scalar("vorticity_max", wmax_all);
    out.set_scalar("filter_events", out.filter_events as f64);
    Ok(out)
}
