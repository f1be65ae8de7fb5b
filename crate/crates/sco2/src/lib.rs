//! Simulation and model predictive control of an open supercritical-CO2
//! power cycle: a quasi-1D compressible truth model of the flow path
//! (compressor, heat exchanger, turbine), a reduced-order control model, a
//! Kalman filter with output-disturbance augmentation, and an
//! online-relinearized MPC, tied together by a scenario harness.

pub mod controller;
pub mod error;
pub mod estimator;
pub mod gasdyn;
pub mod harness;
pub mod maps;
pub mod numerics;
pub mod reduced;
pub mod props;
