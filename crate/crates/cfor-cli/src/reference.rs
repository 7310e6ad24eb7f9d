//! Published reference values the computed tables are compared against.

/// Taylor wavenumbers; `None` marks a blank (failed) entry.
pub const TAYLOR_K: [f64; 6] = [1.0, 2.0, 5.0, 10.0, 13.0, 15.0];
pub const TAYLOR_HERMITE_L2: [Option<f64>; 6] = [Some(6.63e-15), Some(9.53e-15), Some(2.45e-14), Some(6.74e-13), Some(1.01e-5), None];
pub const TAYLOR_RSK_L2: [Option<f64>; 6] = [Some(4.88e-15), Some(3.55e-15), Some(1.96e-14), Some(1.47e-12), Some(5.89e-11), Some(1.55e-3)];
pub const TAYLOR_HERMITE_LINF: [Option<f64>; 6] = [Some(2.78e-15), Some(4.66e-15), Some(1.86e-14), Some(5.26e-13), Some(4.79e-6), None];
pub const TAYLOR_RSK_LINF: [Option<f64>; 6] = [Some(2.33e-15), Some(3.55e-15), Some(1.64e-14), Some(9.69e-13), Some(4.19e-11), Some(8.37e-4)];

pub const PACKET_K: [f64; 6] = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
pub const PACKET_TIMES: [f64; 5] = [2.0, 4.0, 6.0, 8.0, 10.0];
/// L1 errors with dt = 1e-4, rows by time.
pub const PACKET_COARSE_L1: [[f64; 6]; 5] = [
    [2.00e-11, 3.47e-10, 2.26e-9, 9.01e-9, 3.34e-8, 4.71e-5],
    [4.01e-11, 6.95e-10, 4.53e-9, 1.80e-8, 6.68e-8, 9.41e-5],
    [6.01e-11, 1.04e-9, 6.79e-9, 2.70e-8, 1.00e-7, 1.41e-4],
    [8.02e-11, 1.39e-9, 9.06e-9, 3.60e-8, 1.34e-7, 1.88e-4],
    [1.00e-10, 1.74e-9, 1.13e-8, 4.51e-8, 1.67e-7, 2.35e-4],
];
/// L1 errors with dt = 5e-6.
pub const PACKET_FINE_L1: [[f64; 6]; 5] = [
    [1.17e-14, 4.77e-14, 4.23e-14, 5.86e-12, 2.21e-8, 4.70e-5],
    [2.11e-14, 8.86e-14, 8.23e-14, 1.17e-11, 4.43e-8, 9.41e-5],
    [2.46e-14, 1.36e-13, 1.11e-13, 1.76e-11, 6.64e-8, 1.41e-4],
    [3.19e-14, 1.79e-13, 1.46e-13, 2.35e-11, 8.86e-8, 1.88e-4],
    [4.01e-14, 2.27e-13, 1.73e-13, 2.93e-11, 1.11e-7, 2.36e-4],
];
pub const PACKET_LONG_TIMES: [f64; 5] = [10.0, 20.0, 50.0, 80.0, 100.0];
/// `(k, L1 row, Linf row)` of the long integrations.
pub const PACKET_LONG: [(f64, [f64; 5], [f64; 5]); 2] = [
    (20.0, [4.51e-8, 9.01e-8, 2.25e-7, 3.60e-7, 4.51e-7], [2.78e-7, 5.56e-7, 1.39e-6, 2.22e-6, 2.78e-6]),
    (25.0, [1.67e-7, 3.34e-7, 8.35e-7, 1.34e-6, 1.67e-6], [1.51e-6, 3.02e-6, 7.55e-6, 1.21e-5, 1.51e-5]),
];

pub const VORTEX_N: [usize; 4] = [40, 80, 160, 320];
/// Other schemes' density errors at t = 2 (reference only, never computed here).
pub const VORTEX_SCHEMES: [&str; 7] = ["C4", "ENO", "MUSCL", "WENO", "ENO-ACM", "MUSCL-ACM", "WENO-ACM"];
/// `(CFL 0.5, CFL 0.01, others...)` L1 errors by grid.
pub const VORTEX_L1: [[f64; 9]; 4] = [
    [2.37e-5, 6.45e-6, 1.13e-3, 1.28e-3, 2.39e-3, 9.39e-4, 7.81e-4, 1.29e-3, 6.11e-4],
    [4.73e-9, 2.79e-10, 5.78e-5, 2.08e-4, 5.99e-4, 7.07e-5, 6.68e-5, 2.79e-4, 4.58e-4],
    [3.34e-10, 3.76e-11, 3.79e-6, 3.01e-5, 1.26e-4, 2.46e-6, 7.84e-6, 5.31e-5, 2.95e-6],
    [5.12e-11, 3.20e-11, 2.41e-7, 4.07e-6, 2.26e-5, 8.52e-8, 6.82e-7, 8.61e-6, 2.13e-7],
];
pub const VORTEX_L2: [[f64; 9]; 4] = [
    [4.35e-5, 1.80e-5, 2.92e-3, 4.09e-3, 8.29e-3, 3.16e-3, 2.47e-3, 4.05e-3, 2.08e-3],
    [1.41e-8, 1.06e-9, 1.90e-4, 6.75e-4, 2.26e-3, 2.64e-4, 2.08e-4, 1.14e-3, 1.48e-4],
    [1.03e-9, 4.73e-10, 1.23e-5, 8.69e-5, 5.91e-4, 1.10e-5, 2.51e-5, 3.12e-4, 9.44e-6],
    [4.14e-10, 4.08e-10, 7.84e-7, 1.33e-5, 1.31e-4, 2.93e-7, 2.19e-6, 6.07e-5, 6.85e-7],
];
pub const VORTEX_LONG_TIMES: [f64; 4] = [2.0, 10.0, 50.0, 100.0];
pub const VORTEX_LONG_L1: [f64; 4] = [4.73e-9, 1.23e-8, 4.58e-8, 1.05e-7];
pub const VORTEX_LONG_L2: [f64; 4] = [1.41e-8, 3.64e-8, 1.41e-7, 3.17e-7];

/// `(kappa, N)` of the shock/entropy cases.
pub const SHOCK_CASES: [(f64, usize); 9] = [
    (13.0, 400),
    (13.0, 800),
    (26.0, 400),
    (26.0, 800),
    (52.0, 800),
    (52.0, 1200),
    (65.0, 1000),
    (65.0, 1200),
    (70.0, 1200),
];
pub const SHOCK_PPW: [f64; 9] = [10.0, 20.0, 5.0, 10.0, 5.0, 7.5, 5.0, 6.0, 5.58];
