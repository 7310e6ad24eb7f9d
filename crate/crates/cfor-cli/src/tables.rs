use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cfor_core::benchmarks::{run_case, CaseConfig, CaseKind, RunOutput, ENTROPY_TARGET};
use cfor_core::kernels::KernelSpec;
use cfor_core::time::StepMode;

use crate::policy::{self, verdict};
use crate::reference as published;
use crate::write_outputs;

struct Report {
    text: String,
    passed: usize,
    failed: usize,
}

impl Report {
    fn line(&mut self, s: impl AsRef<str>) {
        println!("{}", s.as_ref());
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn check(&mut self, ok: bool) -> &'static str {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        verdict(ok)
    }
}

/// Runs one case, saving its artifacts under `dir/stem_*`. Failures are
/// reported and turned into `None`.
fn attempt(cfg: &CaseConfig, dir: &Path, stem: &str, rep: &mut Report) -> Option<RunOutput> {
    let started = std::time::Instant::now();
    match run_case(cfg) {
        Ok(out) => {
            log::info!("{stem}: {} steps in {:.1?}", out.steps, started.elapsed());
            if let Err(e) = write_outputs(&out, dir, stem) {
                rep.line(format!("  {stem}: could not write outputs: {e}"));
            }
            Some(out)
        }
        Err(e) => {
            rep.line(format!("  {stem}: run failed: {e}"));
            None
        }
    }
}

fn e(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.2e}"))
}

pub fn reproduce(table: u8, max_n: usize, out_dir: &Path) -> cfor_core::Result<()> {
    let dir = out_dir.join(format!("table{table}"));
    fs::create_dir_all(&dir)?;
    let mut rep = Report {
        text: String::new(),
        passed: 0,
        failed: 0,
    };
    match table {
        1 => taylor(&dir, &mut rep),
        2 => packet_coarse(&dir, &mut rep),
        3 => packet_fine_and_long(&dir, &mut rep),
        4 | 5 => vortex_convergence(table, max_n, &dir, &mut rep),
        6 => vortex_long(&dir, &mut rep),
        7 => shock(&dir, &mut rep),
        _ => unreachable!("table id validated by the argument parser"),
    }
    let summary = format!("table {table}: {} checks passed, {} failed", rep.passed, rep.failed);
    rep.line(summary);
    fs::write(dir.join(format!("table{table}.txt")), &rep.text)?;
    Ok(())
}

fn taylor(dir: &Path, rep: &mut Report) {
    rep.line("Taylor problem, N=64, t=2: velocity errors (computed | reference)");
    rep.line(format!("{:<8} {:>4} {:>10} {:>10} {:>10} {:>10}  status", "kernel", "k", "L2", "ref", "Linf", "ref"));
    let mut hermite_k13 = None;
    for (label, spec, l2_ref, linf_ref) in [
        ("hermite", KernelSpec::hermite(3.05), published::TAYLOR_HERMITE_L2, published::TAYLOR_HERMITE_LINF),
        ("rsk", KernelSpec::rsk(cfor_core::benchmarks::DEFAULT_R_RSK), published::TAYLOR_RSK_L2, published::TAYLOR_RSK_LINF),
    ] {
        for (i, &k) in published::TAYLOR_K.iter().enumerate() {
            let mut cfg = CaseConfig::defaults(CaseKind::Taylor, 64);
            cfg.k = k;
            cfg.kernel = spec;
            let out = attempt(&cfg, dir, &format!("taylor_{label}_k{k}"), rep);
            let err = out.as_ref().and_then(|o| o.error_at("u", cfg.t_final)).map(|r| (r.l2, r.linf));
            let (l2, linf) = (err.map(|x| x.0), err.map(|x| x.1));
            let status = match (label, k as u32, err) {
                (_, _, None) if linf_ref[i].is_none() => "failure recorded: run failed (see above)".to_string(),
                (_, _, Some((_, li))) if linf_ref[i].is_none() => {
                    if !(li <= policy::FAILURE_LEVEL) {
                        format!("failure recorded: error above {:.0e}", policy::FAILURE_LEVEL)
                    } else {
                        "no reference entry; recorded".to_string()
                    }
                }
                (_, _, None) => rep.check(false).to_string(),
                ("hermite", 1 | 2 | 5, Some((a, b))) => {
                    rep.check(a <= policy::TAYLOR_SMOOTH_MAX && b <= policy::TAYLOR_SMOOTH_MAX).to_string()
                }
                ("hermite", 10, Some((_, b))) => rep.check(b <= policy::TAYLOR_K10_LINF_MAX).to_string(),
                ("hermite", 13, Some((_, b))) => {
                    hermite_k13 = Some(b);
                    rep.check(policy::within_decades(b, linf_ref[i].unwrap_or(f64::NAN), policy::DEFAULT_DECADES)).to_string()
                }
                ("rsk", 13, Some((_, b))) => {
                    let gain = hermite_k13.map_or(f64::NAN, |h| (h / b).log10());
                    format!("{} (gain over Hermite {gain:.2} decades)", rep.check(gain >= policy::TAYLOR_RSK_GAIN_DECADES))
                }
                (_, _, Some((_, b))) => {
                    rep.check(policy::within_decades(b, linf_ref[i].unwrap_or(f64::NAN), policy::DEFAULT_DECADES)).to_string()
                }
            };
            rep.line(format!(
                "{label:<8} {k:>4} {:>10} {:>10} {:>10} {:>10}  {status}",
                e(l2),
                e(l2_ref[i]),
                e(linf),
                e(linf_ref[i])
            ));
        }
    }
}

fn packet_runs(dt: f64, dir: &Path, tag: &str, rep: &mut Report) -> Vec<Option<RunOutput>> {
    published::PACKET_K
        .iter()
        .map(|&k| {
            let mut cfg = CaseConfig::defaults(CaseKind::Wavepacket, 200);
            cfg.k = k;
            cfg.step = StepMode::FixedDt(dt);
            cfg.t_final = 10.0;
            cfg.sample_times = published::PACKET_TIMES.to_vec();
            attempt(&cfg, dir, &format!("wavepacket_{tag}_k{k}"), rep)
        })
        .collect()
}

fn packet_table(runs: &[Option<RunOutput>], reference: &[[f64; 6]; 5], special: (f64, f64), rep: &mut Report) {
    let mut head = format!("{:>5}", "t");
    for k in published::PACKET_K {
        let _ = write!(head, " {:>21}", format!("k={k} (computed|ref)"));
    }
    rep.line(head);
    for (ti, &t) in published::PACKET_TIMES.iter().enumerate() {
        let mut row = format!("{t:>5}");
        for (ki, &k) in published::PACKET_K.iter().enumerate() {
            let l1 = runs[ki].as_ref().and_then(|o| o.error_at("u", t)).map(|r| r.l1);
            let reference = reference[ti][ki];
            let limit = if (k, t) == (special.0, 2.0) { special.1 } else { reference * 10f64.powf(policy::DEFAULT_DECADES) };
            let ok = l1.is_some_and(|v| v <= limit);
            let _ = write!(row, " {:>9}|{:>8.2e} {}", e(l1), reference, &rep.check(ok)[..1]);
        }
        rep.line(row);
    }
    let mut growth = format!("{:>5}", "10/2");
    for (ki, &k) in published::PACKET_K.iter().enumerate() {
        let r = runs[ki].as_ref().and_then(|o| Some(o.error_at("u", 10.0)?.l1 / o.error_at("u", 2.0)?.l1));
        let cell = match r {
            Some(r) if k <= policy::PACKET_GROWTH_MAX_K => {
                let ok = (policy::PACKET_GROWTH.0..=policy::PACKET_GROWTH.1).contains(&r);
                format!("{r:.3} {}", rep.check(ok))
            }
            Some(r) => format!("{r:.3} (info)"),
            None => "-".into(),
        };
        let _ = write!(growth, " {cell:>21}");
    }
    rep.line(growth);
}

fn packet_coarse(dir: &Path, rep: &mut Report) {
    rep.line("Wavepacket L1 errors, dt = 1e-4 (P/F per cell)");
    let runs = packet_runs(1e-4, dir, "dt1e-4", rep);
    packet_table(&runs, &published::PACKET_COARSE_L1, (5.0, policy::PACKET_K5_L1_MAX), rep);
}

fn packet_fine_and_long(dir: &Path, rep: &mut Report) {
    rep.line("Wavepacket L1 errors, dt = 5e-6 (P/F per cell)");
    let runs = packet_runs(5e-6, dir, "dt5e-6", rep);
    packet_table(&runs, &published::PACKET_FINE_L1, (20.0, policy::PACKET_FINE_K20_L1_MAX), rep);

    rep.line("");
    rep.line("Long integrations, dt = 1e-4, filtered and unfiltered");
    for (k, l1_ref, linf_ref) in published::PACKET_LONG {
        for filter in [false, true] {
            let mut cfg = CaseConfig::defaults(CaseKind::Wavepacket, 200);
            cfg.k = k;
            cfg.step = StepMode::FixedDt(1e-4);
            cfg.t_final = 100.0;
            cfg.filter = filter;
            cfg.sample_times = published::PACKET_LONG_TIMES.to_vec();
            let tag = if filter { "filtered" } else { "plain" };
            let out = attempt(&cfg, dir, &format!("wavepacket_long_{tag}_k{k}"), rep);
            for (ti, &t) in published::PACKET_LONG_TIMES.iter().enumerate() {
                let r = out.as_ref().and_then(|o| o.error_at("u", t));
                let (l1, linf) = (r.map(|r| r.l1), r.map(|r| r.linf));
                let ok = if k == 20.0 && t == 100.0 {
                    linf.is_some_and(|v| v <= policy::PACKET_LONG_LINF_MAX)
                } else {
                    linf.is_some_and(|v| policy::within_decades(v, linf_ref[ti], policy::DEFAULT_DECADES))
                };
                let status = rep.check(ok);
                rep.line(format!(
                    "  k={k} {tag:<8} t={t:>5}: L1 {:>9} (ref {:.2e})  Linf {:>9} (ref {:.2e})  {status}",
                    e(l1),
                    l1_ref[ti],
                    e(linf),
                    linf_ref[ti],
                ));
            }
        }
    }
}

fn vortex_cfg(n: usize, cfl: f64, samples: &[f64]) -> CaseConfig {
    let mut cfg = CaseConfig::defaults(CaseKind::IsentropicVortex, n);
    cfg.step = StepMode::Cfl(cfl);
    cfg.t_final = *samples.last().unwrap_or(&2.0);
    cfg.sample_times = samples.to_vec();
    cfg
}

fn vortex_convergence(table: u8, max_n: usize, dir: &Path, rep: &mut Report) {
    let (norm, reference) = if table == 4 { ("L1", &published::VORTEX_L1) } else { ("L2", &published::VORTEX_L2) };
    rep.line(format!("Isentropic vortex, density {norm} error at t = 2 (computed | reference)"));
    let pick = |r: &cfor_core::ErrorReport| if table == 4 { r.l1 } else { r.l2 };
    let mut prev: [Option<f64>; 2] = [None, None];
    for (ni, &n) in published::VORTEX_N.iter().enumerate() {
        if n > max_n {
            rep.line(format!("  N={n}: skipped (raise --max-n to run)"));
            continue;
        }
        for (ci, cfl) in [0.5, 0.01].into_iter().enumerate() {
            let out = attempt(&vortex_cfg(n, cfl, &[2.0]), dir, &format!("vortex_n{n}_cfl{cfl}"), rep);
            let err = out.as_ref().and_then(|o| o.error_at("rho", 2.0)).map(pick);
            let order = match (prev[ci], err) {
                (Some(a), Some(b)) => Some((a / b).log2()),
                _ => None,
            };
            let mut status = String::new();
            if table == 4 && n == 80 && cfl == 0.01 {
                let ok = err.is_some_and(|v| v <= policy::VORTEX_L1_MAX);
                let _ = write!(status, " error {}", rep.check(ok));
                if let Some(o) = order {
                    let _ = write!(status, ", order {}", rep.check(o >= policy::VORTEX_ORDER_MIN));
                }
            } else {
                let ok = err.is_some_and(|v| policy::within_decades(v, reference[ni][ci], policy::DEFAULT_DECADES));
                let _ = write!(status, " {}", rep.check(ok));
            }
            rep.line(format!(
                "  N={n:<4} CFL={cfl:<5} {:>9} | {:.2e}   order {:>6} | {}  {status}",
                e(err),
                reference[ni][ci],
                order.map_or("-".into(), |o| format!("{o:.2}")),
                if ni == 0 { "-".into() } else { format!("{:.2}", (reference[ni - 1][ci] / reference[ni][ci]).log2()) },
            ));
            prev[ci] = err;
        }
    }
    rep.line("Other schemes (reference only, not computed):");
    for (si, name) in published::VORTEX_SCHEMES.iter().enumerate() {
        let cells: Vec<String> = reference.iter().map(|row| format!("{:.2e}", row[si + 2])).collect();
        rep.line(format!("  {name:<10} {}", cells.join("  ")));
    }
}

fn vortex_long(dir: &Path, rep: &mut Report) {
    rep.line("Isentropic vortex, N = 80, CFL = 0.5: density errors over time");
    let mut cfg = vortex_cfg(80, 0.5, &published::VORTEX_LONG_TIMES);
    cfg.tv_eps = cfor_core::benchmarks::LONG_RUN_TV_EPS;
    let out = attempt(&cfg, dir, "vortex_long", rep);
    for (i, &t) in published::VORTEX_LONG_TIMES.iter().enumerate() {
        let r = out.as_ref().and_then(|o| o.error_at("rho", t));
        let l1 = r.map(|r| r.l1);
        let ok = if t == 100.0 {
            l1.is_some_and(|v| v <= policy::VORTEX_LONG_L1_MAX)
        } else {
            l1.is_some_and(|v| policy::within_decades(v, published::VORTEX_LONG_L1[i], policy::DEFAULT_DECADES))
        };
        let status = rep.check(ok);
        rep.line(format!(
            "  t={t:>5}: L1 {:>9} (ref {:.2e})  L2 {:>9} (ref {:.2e})  {status}",
            e(l1),
            published::VORTEX_LONG_L1[i],
            e(r.map(|r| r.l2)),
            published::VORTEX_LONG_L2[i],
        ));
    }
    if let Some(o) = &out {
        rep.line(format!(
            "  max center offset {:.2} cells; density snapshots written as vortex_long_rho_t*.csv",
            o.scalar("max_center_offset_cells").unwrap_or(f64::NAN)
        ));
    }
}

fn shock(dir: &Path, rep: &mut Report) {
    rep.line("Shock/entropy-wave interaction cases");
    rep.line(format!("{:>4} {:>6} {:>6} {:>6}", "case", "kappa", "N", "PPW"));
    for (i, ((k, n), ppw)) in published::SHOCK_CASES.iter().zip(published::SHOCK_PPW).enumerate() {
        rep.line(format!("{:>4} {k:>6} {n:>6} {ppw:>6}", i + 1));
    }
    rep.line(format!("Post-shock entropy amplitude vs {ENTROPY_TARGET}"));
    for (i, &(k, n)) in published::SHOCK_CASES.iter().enumerate() {
        let mut cfg = CaseConfig::defaults(CaseKind::ShockEntropy, n);
        cfg.k = k;
        let out = attempt(&cfg, dir, &format!("shock_k{k}_n{n}"), rep);
        let amp = out.as_ref().and_then(|o| o.scalar("entropy_amplitude"));
        let stretch = k >= policy::SHOCK_STRETCH_KAPPA;
        let stable = if stretch {
            format!("stability {} (stretch)", verdict(out.is_some()))
        } else {
            format!("stability {}", rep.check(out.is_some()))
        };
        let accuracy = match policy::SHOCK_AMPLITUDE.iter().find(|g| g.0 == k && g.1 == n) {
            Some(&(_, _, tol)) => {
                let ok = amp.is_some_and(|a| ((a - ENTROPY_TARGET) / ENTROPY_TARGET).abs() <= tol);
                format!(", amplitude within {:.0}%: {}", tol * 100.0, rep.check(ok))
            }
            None => String::new(),
        };
        rep.line(format!(
            "  case {} kappa={k} N={n}: amplitude {:>9} ({}% of target)  {stable}{accuracy}",
            i + 1,
            amp.map_or("-".into(), |a| format!("{a:.5}")),
            amp.map_or("-".into(), |a| format!("{:.1}", 100.0 * a / ENTROPY_TARGET)),
        ));
    }
}
