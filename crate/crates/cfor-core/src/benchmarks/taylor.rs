use std::f64::consts::PI;

use super::{segment_steps, CaseConfig, RunOutput, Snapshot};
use crate::error::Result;
use crate::filters::{total_variation_raw, TvPolicy, TvSwitch};
use crate::grid::{norms_raw, Field, NormConvention};
use crate::incompressible::{IncompressibleSystem, Projector};
use crate::time::{compute_dt_incompressible, rk3_projection_step, StepControl};

/// Steady Taylor solution `(u, v, p)` of the inviscid equations; `t` is unused.
pub fn taylor_exact(x: f64, y: f64, _t: f64, k: f64) -> (f64, f64, f64) {
    (
        -(k * x).cos() * (k * y).sin(),
        (k * x).sin() * (k * y).cos(),
        -((2.0 * k * x).cos() + (2.0 * k * y).cos()) / 4.0,
    )
}

/// Points per wavelength of the pressure, whose wavenumber is `2k`.
pub fn pressure_ppw(n: usize, k: f64) -> f64 {
    n as f64 / (2.0 * k)
}

pub(super) fn run(cfg: &CaseConfig) -> Result<RunOutput> {
    let n = cfg.n;
    let d = 2.0 * PI / n as f64;
    let mut out = RunOutput::new(cfg);
    let exact = |c: usize| -> Vec<f64> {
        let mut v = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let s = taylor_exact(i as f64 * d, j as f64 * d, 0.0, cfg.k);
                v.push([s.0, s.1, s.2][c]);
            }
        }
        v
    };
    let (ue, ve, pe) = (exact(0), exact(1), exact(2));
    let projector = Projector::new(n, n, d, d, &cfg.kernel, cfg.poisson, cfg.poisson_tol)?;
    let mut sys = IncompressibleSystem::new(projector, pe);
    let mut y = ue.clone();
    y.extend_from_slice(&ve);

    let lowpass = if cfg.filter {
        Some(crate::filters::ConjugateFilterBank::new(&cfg.kernel, cfg.r_lp)?.lowpass())
    } else {
        None
    };
    let tvs = |y: &[f64]| vec![total_variation_raw(&y[..n * n], n, n), total_variation_raw(&y[n * n..], n, n)];
    let mut switch = TvSwitch::new(TvPolicy { eps: cfg.tv_eps }, tvs(&y));

    let control = StepControl {
        mode: cfg.step,
        re: f64::INFINITY,
    };
    let dt_max = compute_dt_incompressible(&ue, &ve, d, d, &control)?;
    out.note(format!("taylor k={} N={n} dt_max={dt_max:.6e} operator={:?}", cfg.k, cfg.poisson));

    let (mut t, mut step) = (0.0, 0usize);
    for target in cfg.samples() {
        let (steps, dt) = segment_steps(t, target, dt_max);
        for _ in 0..steps {
            y = rk3_projection_step(&mut sys, &y, dt, step, t)?;
            step += 1;
            t += dt;
            if let Some(lp) = &lowpass {
                let cur = tvs(&y);
                if switch.should_filter(&cur) {
                    let (u, v) = y.split_at_mut(n * n);
                    lp.apply_all_axes(u, n, n)?;
                    lp.apply_all_axes(v, n, n)?;
                    switch.reset(tvs(&y));
                    out.filter_events += 1;
                }
            }
        }
        t = target;
        let (u, v) = y.split_at(n * n);
        let eu = norms_raw(u, &ue, n, n, NormConvention::Standard)?;
        let ev = norms_raw(v, &ve, n, n, NormConvention::Standard)?;
        out.record(t, step, "u", eu);
        out.record(t, step, "v", ev);
        let div = sys.projector.divergence(u, v);
        let max_div = div.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        out.set_scalar("max_divergence", out.scalar("max_divergence").unwrap_or(0.0).max(max_div));
        if cfg.snapshots {
            let f = Field::zeros_2d(n, n, d, d, [0.0, 0.0])?;
            out.snapshots.push(Snapshot {
                t,
                name: "u".into(),
                field: f.with_data(u.to_vec())?,
            });
        }
    }
    out.steps = step;
    out.set_scalar("steps", step as f64);
    out.set_scalar("poisson_iterations_per_solve", sys.iterations as f64 / sys.solves.max(1) as f64);
    Ok(out)
}
