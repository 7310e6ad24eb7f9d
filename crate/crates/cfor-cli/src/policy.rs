//! Pass/fail tolerances used by `reproduce-table`. Every threshold lives here.

/// Taylor k = 1, 2, 5: L2 and Linf velocity errors.
pub const TAYLOR_SMOOTH_MAX: f64 = 1e-12;
/// Taylor k = 10: Linf velocity error.
pub const TAYLOR_K10_LINF_MAX: f64 = 1e-10;
/// Taylor k = 13: RSK must beat Hermite by this many decades (Linf).
pub const TAYLOR_RSK_GAIN_DECADES: f64 = 3.0;
/// Error level counted as a failed run where the reference has no entry.
pub const FAILURE_LEVEL: f64 = 1e-2;

/// Wavepacket k = 5, dt = 1e-4: L1 at t = 2.
pub const PACKET_K5_L1_MAX: f64 = 2e-10;
/// L1(t=10)/L1(t=2) window for linear error growth.
pub const PACKET_GROWTH: (f64, f64) = (4.0, 6.0);
/// Largest k the growth window applies to.
pub const PACKET_GROWTH_MAX_K: f64 = 25.0;
/// Wavepacket k = 20, dt = 5e-6: L1 at t = 2.
pub const PACKET_FINE_K20_L1_MAX: f64 = 1e-10;
/// Wavepacket k = 20 at t = 100: Linf.
pub const PACKET_LONG_LINF_MAX: f64 = 3e-5;

/// Vortex N = 80, CFL 0.01, t = 2: L1 of density.
pub const VORTEX_L1_MAX: f64 = 3e-9;
/// Observed order between N = 40 and N = 80.
pub const VORTEX_ORDER_MIN: f64 = 10.0;
/// Vortex N = 80, CFL 0.5, t = 100: L1 of density.
pub const VORTEX_LONG_L1_MAX: f64 = 1e-6;

/// `(kappa, N, relative tolerance)` on the post-shock entropy amplitude.
pub const SHOCK_AMPLITUDE: [(f64, usize, f64); 3] = [(13.0, 400, 0.05), (26.0, 800, 0.08), (52.0, 1200, 0.10)];
/// Cases with kappa at or above this are reported but never gate.
pub const SHOCK_STRETCH_KAPPA: f64 = 65.0;

/// Rows with no dedicated threshold: within this many decades of the reference.
pub const DEFAULT_DECADES: f64 = 2.0;

pub fn within_decades(value: f64, reference: f64, decades: f64) -> bool {
    value.is_finite() && value <= reference * 10f64.powf(decades)
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
