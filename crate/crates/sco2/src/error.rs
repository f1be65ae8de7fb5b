//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("dimension mismatch: {context}")]
    Dimension { context: String },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("discrete Lyapunov equation diverged: spectral radius {rho} >= 1")]
    Unstable { rho: f64 },
    #[error("no sign change over bracket [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")]
    NoBracket { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("coordinate {coord} = {value} outside grid range [{min}, {max}]")]
    OutOfRange {
        coord: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("QP infeasible: {context}")]
    QpInfeasible { context: String },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

#[derive(Debug, Error)]
pub enum PropertyError {
    #[error("{fluid}: ({var1}, {var2}) = ({v1:.6e}, {v2:.6e}) outside validity region {bounds}")]
    OutOfRegion {
        fluid: String,
        var1: &'static str,
        var2: &'static str,
        v1: f64,
        v2: f64,
        bounds: String,
    },
    #[error("{fluid}: inversion failed after {iters} iterations, last iterate (p, T) = ({p:.6e}, {t:.6e}), residual {residual:.3e}")]
    InversionFailed {
        fluid: String,
        iters: usize,
        p: f64,
        t: f64,
        residual: f64,
    },
    #[error("property table: {0}")]
    Table(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("reverse flow through turbine: pressure ratio {pr} < 1")]
    ReverseFlow { pr: f64 },
    #[error("{var} = {value:.6e} outside map grid [{min:.6e}, {max:.6e}]")]
    OutOfMap {
        var: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("corrected flow {mdot_cor:.4} below surge limit {surge:.4} at corrected speed {n_cor:.4}")]
    SurgeRegion {
        mdot_cor: f64,
        surge: f64,
        n_cor: f64,
    },
    #[error("corrected flow {mdot_cor:.4} above choke limit {choke:.4} at corrected speed {n_cor:.4}")]
    ChokeRegion {
        mdot_cor: f64,
        choke: f64,
        n_cor: f64,
    },
    #[error("target outlet pressure {p_target:.6e} Pa exceeds achievable maximum {p_max:.6e} Pa at corrected speed {n_cor:.4} (surge imminent)")]
    SurgeInfeasible {
        p_target: f64,
        p_max: f64,
        n_cor: f64,
    },
    #[error("rotor speed underflow: N_s = {n_s:.4e} rad/s")]
    RotorStall { n_s: f64 },
    #[error("surge constraint unresolvable: no root in corrected-speed span [{lo:.4}, {hi:.4}]")]
    ConstraintUnresolvable { lo: f64, hi: f64 },
    #[error("map file: {0}")]
    File(String),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("timestep {dt:.3e} s exceeds CFL limit; admissible dt = {admissible:.3e} s")]
    CflViolation { dt: f64, admissible: f64 },
    #[error("supersonic {side} boundary unsupported: Mach = {mach:.3}")]
    SupersonicBoundary { side: &'static str, mach: f64 },
    #[error("invalid fluid state in cell {cell}: {context}")]
    InvalidState { cell: usize, context: String },
    #[error("pressure correction failed to converge: divergence residual {residual:.3e}")]
    PressureCorrection { residual: f64 },
    #[error("steady-state initialization did not converge: residual {residual:.3e} after {seconds:.1} simulated seconds")]
    InitNotConverged { residual: f64, seconds: f64 },
    #[error("truth model diverged at t = {t:.4} s: {context}")]
    Diverged { t: f64, context: String },
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
