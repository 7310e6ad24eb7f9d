//! Randomized invariants of stencils, filters, projection and measurement.

use cfor_core::benchmarks::{entropy_amplitude, wavepacket_exact, CaseConfig, CaseKind, POST_SHOCK};
use cfor_core::euler::{conservative_1d, Boundary1d, EulerSolver, ShockBand};
use cfor_core::filters::{ConjugateFilterBank, TvPolicy, TvSwitch};
use cfor_core::grid::{norms_raw, CompiledStencil, NormConvention};
use cfor_core::incompressible::{PoissonOperator, Projector};
use cfor_core::kernels::{halfgrid_stencil, stencil, KernelFamily, KernelSpec};
use cfor_core::spectral::{effective_band, frequency_response};
use proptest::prelude::*;

fn kernel() -> impl Strategy<Value = KernelSpec> {
    prop_oneof![
        (2.4f64..3.4, 8usize..=32).prop_map(|(r, w)| KernelSpec::hermite(r).with_half_width(w)),
        (3.0f64..8.0, 8usize..=32).prop_map(|(r, w)| KernelSpec::rsk(r).with_half_width(w)),
    ]
}

fn line(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derivative_stencils_have_exact_parity(spec in kernel()) {
        for q in 0..=2u32 {
            let w = stencil(&spec, q).unwrap();
            let h = w.half_width() as isize;
            for j in 1..=h {
                let (a, b) = (w.at(j), w.at(-j));
                if q == 1 {
                    prop_assert_eq!(a, -b);
                } else {
                    prop_assert_eq!(a, b);
                }
            }
            if q == 1 {
                prop_assert_eq!(w.at(0), 0.0);
                prop_assert_eq!(w.sum(), 0.0);
            }
        }
    }

    #[test]
    fn halfgrid_stencil_is_mirrored_and_normalized(spec in kernel()) {
        let w = halfgrid_stencil(&spec).unwrap();
        let n = w.weights.len();
        for i in 0..n / 2 {
            prop_assert_eq!(w.weights[i], w.weights[n - 1 - i]);
        }
        prop_assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lowpass_keeps_constants(c in -1e3f64..1e3, r_lp in 2.0f64..3.05, n in 16usize..96) {
        let bank = ConjugateFilterBank::new(&KernelSpec::hermite(3.05), r_lp).unwrap();
        let mut data = vec![c; n];
        bank.lowpass().apply_all_axes(&mut data, n, 1).unwrap();
        for v in data {
            prop_assert!((v - c).abs() <= 1e-14 * c.abs().max(1.0));
        }
    }

    #[test]
    fn lowpass_keeps_the_mean(data in line(64), r_lp in 2.0f64..3.05) {
        let bank = ConjugateFilterBank::new(&KernelSpec::hermite(3.05), r_lp).unwrap();
        let mut out = data.clone();
        bank.lowpass().apply_all_axes(&mut out, 64, 1).unwrap();
        let before: f64 = data.iter().sum();
        let after: f64 = out.iter().sum();
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn periodic_derivative_telescopes(data in line(80), spec in kernel()) {
        let d1 = CompiledStencil::derivative(&stencil(&spec, 1).unwrap(), 0.1).unwrap();
        let mut out = vec![0.0; 80];
        let mut ext = Vec::new();
        d1.apply_periodic(&data, &mut out, &mut ext);
        let total: f64 = out.iter().sum();
        prop_assert!(total.abs() < 1e-11, "sum of derivative {}", total);
    }

    #[test]
    fn band_edge_grows_with_tolerance(spec in kernel(), a in -10.0f64..-3.0, b in -10.0f64..-3.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let resp = frequency_response(&stencil(&spec, 1).unwrap(), 2).unwrap();
        let e_lo = effective_band(&resp, 10f64.powf(lo));
        let e_hi = effective_band(&resp, 10f64.powf(hi));
        prop_assert!(e_lo.omega <= e_hi.omega);
    }

    #[test]
    fn shock_band_conserves(data in prop::collection::vec(0.5f64..2.0, 3 * 120), band in 0usize..4) {
        let spec = KernelSpec::hermite(3.05);
        let left = conservative_1d(POST_SHOCK.0, POST_SHOCK.1, POST_SHOCK.2, 1.4);
        let solver = EulerSolver::new_1d(120, 0.05, &spec, 1.4, Boundary1d::InflowOutflow { left })
            .unwrap()
            .with_shock_band(ShockBand::new(&spec, 1.8, band).unwrap());
        // Keep the energy large enough for positive pressure.
        let mut y = data.clone();
        for i in 0..120 {
            y[240 + i] += 5.0;
        }
        let before: Vec<f64> = (0..3).map(|k| y[k * 120..(k + 1) * 120].iter().sum()).collect();
        let mut z = y.clone();
        solver.apply_shock_band(&mut z).unwrap();
        for k in 0..3 {
            let after: f64 = z[k * 120..(k + 1) * 120].iter().sum();
            prop_assert!((after - before[k]).abs() < 1e-11, "component {} drift {}", k, after - before[k]);
        }
    }

    #[test]
    fn projection_is_solenoidal_and_idempotent(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let n = 32;
        let d = 2.0 * std::f64::consts::PI / n as f64;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // Random smooth field: a few low Fourier modes.
        let modes: Vec<(i32, i32, f64, f64)> =
            (0..6).map(|_| (rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut u = vec![0.0; n * n];
        let mut v = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (i as f64 * d, j as f64 * d);
                for &(a, b, cu, cv) in &modes {
                    let ph = a as f64 * x + b as f64 * y;
                    u[j * n + i] += cu * ph.sin();
                    v[j * n + i] += cv * ph.cos();
                }
            }
        }
        let tol = 1e-12;
        let p = Projector::new(n, n, d, d, &KernelSpec::hermite(3.05), PoissonOperator::Consistent, tol).unwrap();
        let once = p.project(&u, &v).unwrap();
        let div = p.divergence(&once.u, &once.v);
        prop_assert!(div.iter().all(|x| x.abs() <= 10.0 * tol));
        let twice = p.project(&once.u, &once.v).unwrap();
        for (a, b) in once.u.iter().zip(&twice.u).chain(once.v.iter().zip(&twice.v)) {
            prop_assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn tv_switch_ignores_unchanged_data(data in line(50), eps in 0.001f64..0.1) {
        let tv = cfor_core::filters::total_variation_raw(&data, 50, 1);
        let sw = TvSwitch::new(TvPolicy { eps }, vec![tv]);
        prop_assert!(!sw.should_filter(&[tv]));
        prop_assert!(sw.should_filter(&[tv * (1.0 + 2.0 * eps) + 1e-9]));
    }

    #[test]
    fn norm_ordering(a in line(40), b in line(40)) {
        let r = norms_raw(&a, &b, 40, 1, NormConvention::Standard).unwrap();
        prop_assert!(r.l1 <= r.l2 + 1e-15 && r.l2 <= r.linf + 1e-15);
    }

    #[test]
    fn wavepacket_is_two_periodic(x in -1.0f64..1.0, t in 0.0f64..20.0, k in 1.0f64..30.0) {
        let s = std::f64::consts::SQRT_2 / 10.0;
        let a = wavepacket_exact(x, t, k, s, 1.0, 0.0);
        let b = wavepacket_exact(x + 2.0, t, k, s, 1.0, 0.0);
        let c = wavepacket_exact(x, t + 2.0, k, s, 1.0, 0.0);
        prop_assert!((a - b).abs() < 1e-9 && (a - c).abs() < 1e-9);
    }

    #[test]
    fn entropy_envelope_recovers_synthetic_amplitude(amp in 0.002f64..0.02, phase in 0.0f64..6.28, noise in 0.0f64..0.5) {
        // Uniform post-shock state carrying ln s = amp sin(k x + phase) plus
        // grid-scale noise, shock at x = 4.
        let n = 1600;
        let d = 5.0 / n as f64;
        let kappa = 13.0;
        let kk = kappa * POST_SHOCK.0;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * d).collect();
        let p: Vec<f64> = x.iter().map(|&x| if x < 4.0 { POST_SHOCK.2 } else { 1.0 }).collect();
        let rho: Vec<f64> = x.iter().zip(&p).enumerate().map(|(i, (&x, &p))| {
            if x < 4.0 {
                let wiggle = noise * amp * if i % 2 == 0 { 1.0 } else { -1.0 };
                (p / (amp * (kk * x + phase).sin() + wiggle).exp()).powf(1.0 / 1.4)
            } else {
                1.0
            }
        }).collect();
        let m = entropy_amplitude(&x, &rho, &p, 1.4, kappa, 0.2).unwrap();
        prop_assert!((m.log_entropy_amplitude - amp).abs() < 0.02 * amp, "{} vs {}", m.log_entropy_amplitude, amp);
        prop_assert!(m.peak_to_trough >= m.log_entropy_amplitude * 0.98);
    }

    #[test]
    fn config_text_round_trips(n in 8usize..512, k in 1u32..40, r_lp in 1.9f64..3.0, case_idx in 0usize..5, rsk in any::<bool>()) {
        let case = CaseKind::ALL[case_idx];
        let mut cfg = CaseConfig::defaults(case, n);
        cfg.k = k as f64;
        cfg.r_lp = r_lp;
        if rsk {
            cfg.kernel = KernelSpec::new(KernelFamily::Rsk, 7.5);
        }
        let back = CaseConfig::parse(&cfg.to_text()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
