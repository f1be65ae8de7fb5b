//! Scenario files: every physical constant, bound, and tuning weight of a
//! closed-loop run as a named TOML field with the stock value as default, so
//! a minimal scenario is an empty file plus a schedule.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::gasdyn::PcheGeometry;
use crate::maps::{
    synthetic_compressor_map, synthetic_turbine_map, CompressorDesign, CompressorMap,
    TurbineDesign, TurbineMap,
};
use crate::props::{Co2PengRobinson, FluidProps, TableProvider, ThermalOil};
use crate::reduced::ReducedConfig;

use crate::controller::{ConstraintSet, MpcTuning};

fn default_true() -> bool {
    true
}

/// Core geometry; defaults mirror the stock PCHE plus five-cell pipes whose
/// cell size matches the exchanger grid (the truth model runs one uniform
/// high-side stream).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub channel_d: f64,
    pub n_chans: f64,
    pub hx_length: f64,
    pub n_hx: usize,
    pub wall_thickness: f64,
    pub rho_wall: f64,
    pub cp_wall: f64,
    pub roughness: f64,
    pub n_pipe: usize,
    /// Connecting-pipe length, m (control model).
    pub pipe_length: f64,
    /// Connecting-pipe diameter, m (control model).
    pub pipe_d: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        let g = PcheGeometry::default();
        GeometrySection {
            channel_d: g.channel_d,
            n_chans: g.n_chans,
            hx_length: g.length,
            n_hx: g.n_cells,
            wall_thickness: g.wall_thickness,
            rho_wall: g.rho_w,
            cp_wall: g.cp_w,
            roughness: g.roughness,
            n_pipe: 5,
            pipe_length: 0.2,
            pipe_d: 0.08,
        }
    }
}

impl GeometrySection {
    pub fn pche(&self) -> PcheGeometry {
        PcheGeometry {
            channel_d: self.channel_d,
            n_chans: self.n_chans,
            length: self.hx_length,
            n_cells: self.n_hx,
            wall_thickness: self.wall_thickness,
            rho_w: self.rho_wall,
            cp_w: self.cp_wall,
            roughness: self.roughness,
        }
    }

    /// Cell size shared by the exchanger and pipe sections of the truth
    /// model's high-side stream.
    pub fn dx(&self) -> f64 {
        self.hx_length / self.n_hx as f64
    }

    pub fn pipe_area(&self) -> f64 {
        std::f64::consts::PI / 4.0 * self.pipe_d * self.pipe_d
    }
}

/// Working-fluid property provider.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluidSection {
    /// "peng-robinson" or "table".
    pub provider: String,
    /// Table file, required when provider = "table".
    pub table: Option<PathBuf>,
}

impl Default for FluidSection {
    fn default() -> Self {
        FluidSection {
            provider: "peng-robinson".into(),
            table: None,
        }
    }
}

/// Performance map sources; empty paths fall back to the built-in synthetic
/// design maps.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapsSection {
    pub compressor: Option<PathBuf>,
    pub turbine: Option<PathBuf>,
}

/// Reservoir and oil-loop boundary conditions. The exhaust pressure is not
/// a measured quantity of the reference plant; the default is derived so
/// the turbine sits at its design pressure ratio at the design point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundarySection {
    pub p_in_stag: f64,
    pub t_in_stag: f64,
    pub p_out_stag: f64,
    pub p_oil: f64,
    pub t_oil_in: f64,
}

impl Default for BoundarySection {
    fn default() -> Self {
        BoundarySection {
            p_in_stag: 8.629e6,
            t_in_stag: 320.0,
            // derived: design-point compressor discharge / turbine design PR
            p_out_stag: 8.2e6,
            p_oil: 4.0e6,
            t_oil_in: 573.15,
        }
    }
}

/// Starting operating point for initialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    /// Compressor shaft speed as a fraction of the map design speed.
    pub speed_fraction: f64,
    pub mdot_oil: f64,
    /// Starting motor torque; negative means "balance the load at the
    /// starting speed".
    pub torque: f64,
    /// Convergence threshold on per-cell relative change per simulated
    /// second.
    pub tolerance: f64,
    /// Simulated-time budget for initialization, s.
    pub max_seconds: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            speed_fraction: 0.916,
            mdot_oil: 10.0,
            torque: -1.0,
            tolerance: 1.0e-8,
            max_seconds: 400.0,
        }
    }
}

/// Hard and soft bounds (stock values).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintsSection {
    pub t_in_t_max: f64,
    /// Speed ceiling as a fraction of design speed.
    pub n_c_max_fraction: f64,
    pub torque_min: f64,
    pub torque_max: f64,
    pub torque_rate_min: f64,
    pub torque_rate_max: f64,
    pub mdot_oil_min: f64,
    pub mdot_oil_max: f64,
    pub mdot_oil_accel_min: f64,
    pub mdot_oil_accel_max: f64,
    pub speed_margin: f64,
}

impl Default for ConstraintsSection {
    fn default() -> Self {
        ConstraintsSection {
            t_in_t_max: 570.0,
            n_c_max_fraction: 1.26,
            torque_min: 0.0,
            torque_max: 200.0,
            torque_rate_min: -15.0,
            torque_rate_max: 15.0,
            mdot_oil_min: 3.0,
            mdot_oil_max: 25.0,
            mdot_oil_accel_min: -1.2,
            mdot_oil_accel_max: 1.2,
            speed_margin: 0.05,
        }
    }
}

impl ConstraintsSection {
    pub fn constraint_set(&self, design_speed: f64) -> ConstraintSet {
        ConstraintSet {
            t_in_t_max: self.t_in_t_max,
            n_c_max: self.n_c_max_fraction * design_speed,
            torque_min: self.torque_min,
            torque_max: self.torque_max,
            torque_rate_min: self.torque_rate_min,
            torque_rate_max: self.torque_rate_max,
            mdot_oil_min: self.mdot_oil_min,
            mdot_oil_max: self.mdot_oil_max,
            mdot_oil_accel_min: self.mdot_oil_accel_min,
            mdot_oil_accel_max: self.mdot_oil_accel_max,
        }
    }
}

/// Controller tuning (stock values).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningSection {
    pub dt: f64,
    pub horizon: usize,
    pub q_power: f64,
    pub q_temperature: f64,
    pub r_torque_rate: f64,
    pub r_oil_accel: f64,
    pub w_speed: f64,
    pub w_temp: f64,
}

impl Default for TuningSection {
    fn default() -> Self {
        let t = MpcTuning::default();
        TuningSection {
            dt: t.dt,
            horizon: t.horizon,
            q_power: t.q_z[0],
            q_temperature: t.q_z[1],
            r_torque_rate: t.r_du[0],
            r_oil_accel: t.r_du[1],
            w_speed: t.w_speed,
            w_temp: t.w_temp,
        }
    }
}

impl TuningSection {
    pub fn mpc_tuning(&self, speed_margin: f64) -> MpcTuning {
        MpcTuning {
            dt: self.dt,
            horizon: self.horizon,
            q_z: [self.q_power, self.q_temperature],
            r_du: [self.r_torque_rate, self.r_oil_accel],
            w_speed: self.w_speed,
            w_temp: self.w_temp,
            speed_margin,
            ..MpcTuning::default()
        }
    }
}

/// Filter rate and measurement-noise injection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSection {
    pub dt: f64,
    /// Inject seeded Gaussian measurement noise at the filter's assumed
    /// covariance.
    #[serde(default = "default_true")]
    pub measurement_noise: bool,
    pub seed: u64,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        EstimatorSection {
            dt: crate::estimator::ESTIMATOR_DT,
            measurement_noise: true,
            seed: 7,
        }
    }
}

/// One setpoint-schedule entry, active from `t` until the next entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub t: f64,
    /// Net-power reference, W.
    pub w_ref: f64,
    /// Turbine-inlet-temperature reference, K; omitted means "auto" (the
    /// maximum steady temperature feasible at this power).
    pub t_ref: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub geometry: GeometrySection,
    pub fluid: FluidSection,
    pub maps: MapsSection,
    pub boundary: BoundarySection,
    pub initial: InitialSection,
    pub constraints: ConstraintsSection,
    pub tuning: TuningSection,
    pub estimator: EstimatorSection,
    /// Total closed-loop duration, s.
    pub duration: f64,
    pub schedule: Vec<ScheduleEntry>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            geometry: GeometrySection::default(),
            fluid: FluidSection::default(),
            maps: MapsSection::default(),
            boundary: BoundarySection::default(),
            initial: InitialSection::default(),
            constraints: ConstraintsSection::default(),
            tuning: TuningSection::default(),
            estimator: EstimatorSection::default(),
            duration: 60.0,
            schedule: vec![],
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario, SimError> {
        let text = std::fs::read_to_string(path)?;
        let sc: Scenario = toml::from_str(&text)
            .map_err(|e| SimError::Scenario(format!("{}: {e}", path.display())))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn save(&self, path: &Path) -> Result<(), SimError> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| SimError::Scenario(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let g = &self.geometry;
        if g.n_hx < 2 || g.n_pipe < 1 || g.channel_d <= 0.0 || g.n_chans < 1.0 {
            return Err(SimError::Scenario("geometry out of range".into()));
        }
        let b = &self.boundary;
        if !(b.p_in_stag > 0.0 && b.p_out_stag > 0.0 && b.t_in_stag > 0.0) {
            return Err(SimError::Scenario("boundary pressures/temperatures must be positive".into()));
        }
        if self.fluid.provider != "peng-robinson" && self.fluid.provider != "table" {
            return Err(SimError::Scenario(format!(
                "unknown fluid provider '{}'",
                self.fluid.provider
            )));
        }
        if self.fluid.provider == "table" {
            match &self.fluid.table {
                Some(p) if p.exists() => {}
                Some(p) => {
                    return Err(SimError::Scenario(format!(
                        "fluid table {} does not exist",
                        p.display()
                    )))
                }
                None => {
                    return Err(SimError::Scenario(
                        "fluid provider 'table' needs a table path".into(),
                    ))
                }
            }
        }
        for p in [&self.maps.compressor, &self.maps.turbine].into_iter().flatten() {
            if !p.exists() {
                return Err(SimError::Scenario(format!(
                    "map file {} does not exist",
                    p.display()
                )));
            }
        }
        for w in self.schedule.windows(2) {
            if w[1].t <= w[0].t {
                return Err(SimError::Scenario(format!(
                    "schedule times must be strictly increasing ({} then {})",
                    w[0].t, w[1].t
                )));
            }
        }
        if self.duration <= 0.0 || self.tuning.dt <= 0.0 || self.estimator.dt <= 0.0 {
            return Err(SimError::Scenario("durations must be positive".into()));
        }
        let ratio = self.tuning.dt / self.estimator.dt;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
            return Err(SimError::Scenario(
                "controller step must be an integer multiple of the filter step".into(),
            ));
        }
        Ok(())
    }

    /// Filter cycles per control interval.
    pub fn cycles_per_update(&self) -> usize {
        (self.tuning.dt / self.estimator.dt).round() as usize
    }

    /// Reference the schedule holds at time `t` (last entry at or before).
    pub fn reference_at(&self, t: f64) -> Option<&ScheduleEntry> {
        self.schedule.iter().take_while(|e| e.t <= t).last()
    }

    pub fn load_maps(&self) -> Result<(CompressorMap, TurbineMap), SimError> {
        let co2 = Co2PengRobinson::default();
        let comp = match &self.maps.compressor {
            Some(p) => CompressorMap::load(p)?,
            None => synthetic_compressor_map(&CompressorDesign::default(), &co2)?,
        };
        let turb = match &self.maps.turbine {
            Some(p) => TurbineMap::load(p)?,
            None => synthetic_turbine_map(&TurbineDesign::default())?,
        };
        Ok((comp, turb))
    }

    pub fn load_fluid(&self) -> Result<Box<dyn FluidProps>, SimError> {
        match self.fluid.provider.as_str() {
            "table" => {
                let path = self.fluid.table.as_ref().expect("validated");
                Ok(Box::new(TableProvider::from_file(path)?))
            }
            _ => Ok(Box::new(Co2PengRobinson::default())),
        }
    }

    pub fn oil(&self) -> ThermalOil {
        ThermalOil::default()
    }

    /// Truth-plant configuration for this scenario.
    pub fn plant_config(&self) -> crate::harness::PlantConfig {
        let rc = ReducedConfig::default();
        crate::harness::PlantConfig {
            pche: self.geometry.pche(),
            n_pipe: self.geometry.n_pipe,
            p_in_stag: self.boundary.p_in_stag,
            t_in_stag: self.boundary.t_in_stag,
            p_out_stag: self.boundary.p_out_stag,
            p_oil: self.boundary.p_oil,
            t_oil_in: self.boundary.t_oil_in,
            pump_natural_freq: rc.pump_natural_freq,
            pump_damping: rc.pump_damping,
            cfl_target: 0.8,
        }
    }

    /// Reduced-model configuration for this scenario; pipes carry the
    /// named pipe geometry.
    pub fn reduced_config(&self) -> ReducedConfig {
        let pche = self.geometry.pche();
        ReducedConfig {
            pipe_area: self.geometry.pipe_area(),
            pipe_length: self.geometry.pipe_length,
            n_pipe: self.geometry.n_pipe,
            p_in_stag: self.boundary.p_in_stag,
            t_in_stag: self.boundary.t_in_stag,
            p_out_stag: self.boundary.p_out_stag,
            p_oil: self.boundary.p_oil,
            t_oil_in: self.boundary.t_oil_in,
            pche,
            ..ReducedConfig::default()
        }
    }
}
