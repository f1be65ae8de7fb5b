//! Closed-loop driver: one controller update per interval, five filter
//! cycles inside it, and a CFL-substepped truth plant underneath. A model
//! divergence aborts the run but returns everything logged up to the last
//! good interval.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::controller::{compute_target, ControlRecord, Controller};
use crate::error::SimError;
use crate::estimator::{build_noise_config, Nominals, Observer};
use crate::reduced::{ReducedInput, ReducedModel, ReducedState, ThermalInputs};

use super::plant::TruthPlant;
use super::scenario::Scenario;

/// One filter correction.
#[derive(Debug, Clone)]
pub struct EstimatorRecord {
    pub time: f64,
    /// Noisy measurement fed to the filter.
    pub y: [f64; 4],
    pub innovation: [f64; 4],
    pub d_hat: [f64; 4],
    pub regularized: bool,
}

/// Truth-plant telemetry at the end of each control interval.
#[derive(Debug, Clone)]
pub struct PlantRecord {
    pub time: f64,
    pub w_net: f64,
    pub t_in_t: f64,
    pub y: [f64; 4],
    pub torque: f64,
    pub torque_rate: f64,
    pub mdot_oil_ref: f64,
    pub mdot_c: f64,
    pub mdot_t: f64,
    pub n_c: f64,
    pub n_c_min: f64,
    pub mdot_oil: f64,
    pub p_high: f64,
    pub max_mach: f64,
    pub max_cfl: f64,
    pub inner_steps: usize,
    pub w_ref: f64,
    pub t_ref: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunLog {
    pub control: Vec<ControlRecord>,
    pub estimator: Vec<EstimatorRecord>,
    pub plant: Vec<PlantRecord>,
    /// Divergence context when the run stopped early.
    pub aborted: Option<String>,
}

impl RunLog {
    pub fn assert_finite(&self) {
        for r in &self.plant {
            assert!(
                r.w_net.is_finite() && r.t_in_t.is_finite() && r.n_c.is_finite(),
                "non-finite plant telemetry at t = {}",
                r.time
            );
        }
        for r in &self.estimator {
            assert!(
                r.d_hat.iter().all(|d| d.is_finite()),
                "non-finite disturbance estimate at t = {}",
                r.time
            );
        }
    }

    /// Writes control.csv, estimator.csv, and plant.csv into `dir`.
    pub fn write_csvs(&self, dir: &Path) -> Result<(), SimError> {
        std::fs::create_dir_all(dir)?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("control.csv"))?);
        writeln!(f, "{}", ControlRecord::csv_header())?;
        for r in &self.control {
            writeln!(f, "{}", r.to_csv_row())?;
        }

        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("estimator.csv"))?);
        writeln!(
            f,
            "time,y0,y1,y2,y3,innov0,innov1,innov2,innov3,d0,d1,d2,d3,regularized"
        )?;
        for r in &self.estimator {
            writeln!(
                f,
                "{:.4},{:.6},{:.6},{:.6},{:.6},{:.4e},{:.4e},{:.4e},{:.4e},{:.4e},{:.4e},{:.4e},{:.4e},{}",
                r.time,
                r.y[0],
                r.y[1],
                r.y[2],
                r.y[3],
                r.innovation[0],
                r.innovation[1],
                r.innovation[2],
                r.innovation[3],
                r.d_hat[0],
                r.d_hat[1],
                r.d_hat[2],
                r.d_hat[3],
                r.regularized
            )?;
        }

        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("plant.csv"))?);
        writeln!(
            f,
            "time,w_net,t_in_t,t_co2_hx_in,t_co2_hx_out,t_oil_a,t_oil_b,torque,torque_rate,\
             mdot_oil_ref,mdot_c,mdot_t,n_c,n_c_min,mdot_oil,p_high,max_mach,max_cfl,\
             inner_steps,w_ref,t_ref"
        )?;
        for r in &self.plant {
            writeln!(
                f,
                "{:.4},{:.6e},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},\
                 {:.6},{:.6},{:.6},{:.6e},{:.4e},{:.4},{},{:.6e},{:.6}",
                r.time,
                r.w_net,
                r.t_in_t,
                r.y[0],
                r.y[1],
                r.y[2],
                r.y[3],
                r.torque,
                r.torque_rate,
                r.mdot_oil_ref,
                r.mdot_c,
                r.mdot_t,
                r.n_c,
                r.n_c_min,
                r.mdot_oil,
                r.p_high,
                r.max_mach,
                r.max_cfl,
                r.inner_steps,
                r.w_ref,
                r.t_ref
            )?;
        }
        Ok(())
    }
}

/// Largest turbine inlet temperature whose steady target stays inside the
/// hard input bounds and above the surge speed margin, found by bisection
/// between the current temperature and the ceiling.
#[allow(clippy::too_many_arguments)]
fn max_feasible_t_ref(
    ctrl: &Controller,
    x_hat: &ReducedState,
    d_hat: &[f64; 4],
    w_ref: f64,
    t_current: f64,
    n_c_min: f64,
) -> f64 {
    let model = ctrl.model;
    let cons = &ctrl.constraints;
    let u0 = ReducedInput {
        torque: ctrl.torque,
        torque_rate: 0.0,
        mdot_oil_ref: ctrl.mdot_oil_ref,
    };
    let lin = match model.linearize(x_hat, &u0) {
        Ok(l) => l,
        Err(_) => return t_current,
    };
    let n_floor = (1.0 + ctrl.tuning.speed_margin) * n_c_min;
    let feasible = |t: f64| -> bool {
        let tp = match compute_target(&lin, [w_ref, t], d_hat) {
            Ok(tp) => tp,
            Err(_) => return false,
        };
        let torque = u0.torque + tp.u_rel[0];
        let oil = u0.mdot_oil_ref + tp.u_rel[1];
        let n = x_hat.n_c + tp.x_rel[model.layout.i_n_c()];
        (cons.torque_min..=cons.torque_max).contains(&torque)
            && (cons.mdot_oil_min..=cons.mdot_oil_max).contains(&oil)
            && n >= n_floor
            && n <= cons.n_c_max
    };

    let t_hi = cons.t_in_t_max;
    if feasible(t_hi) {
        return t_hi;
    }
    let mut lo = t_current.min(t_hi);
    if !feasible(lo) {
        return t_current.min(t_hi);
    }
    let mut hi = t_hi;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Runs the scenario's schedule against an initialized plant. Inner errors
/// abort the run and are reported in `RunLog::aborted`; everything up to
/// the last completed interval is kept.
pub fn run_closed_loop(
    sc: &Scenario,
    plant: &mut TruthPlant,
    model: &ReducedModel,
) -> Result<RunLog, SimError> {
    let noise_cfg = build_noise_config(&Nominals::default(), &model.layout, model.co2, model.oil)?;
    let noise_std: [f64; 4] =
        std::array::from_fn(|i| noise_cfg.sigma_v[(i, i)].max(0.0).sqrt());
    let observer = Observer::new(model, noise_cfg.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(sc.estimator.seed);

    let tuning = sc.tuning.mpc_tuning(sc.constraints.speed_margin);
    let cons = sc.constraints.constraint_set(model.comp.design_speed);
    let torque0 = plant
        .torque
        .clamp(cons.torque_min, cons.torque_max);
    plant.torque = torque0;
    let mut ctrl = Controller::new(model, tuning, cons, torque0, plant.mdot_oil_ref);

    let x_true0 = plant.reduced_projection()?;
    let mut est = observer.initial_estimate(&x_true0, 0.0);

    let out0 = plant.outputs()?;
    let default_ref = (out0.w_net, out0.t_in_t);

    let dt = sc.tuning.dt;
    let dt_est = sc.estimator.dt;
    let cycles = sc.cycles_per_update();
    let n_intervals = (sc.duration / dt).round().max(1.0) as usize;
    let nt = observer.n_thermal();

    let mut log = RunLog::default();
    let mut out = out0;
    // (schedule index, resolved temperature reference) of the active entry
    let mut active: Option<(usize, f64)> = None;

    for k in 0..n_intervals {
        let t_now = k as f64 * dt;

        // state estimate handed to the controller: filtered thermal states
        // plus the directly measured flow/speed/pump quantities
        let d_hat: [f64; 4] = std::array::from_fn(|i| est.mean[nt + i]);
        let u_th = ThermalInputs {
            p_high: out.p_high,
            mdot_c: out.mdot_c,
            n_c: plant.n_c,
            mdot_oil: plant.mdot_oil,
        };
        let mut x_hat = model.assemble_thermal(&est.mean[..nt], &u_th);
        x_hat.mdot_t = out.mdot_t;
        x_hat.mdot_oil_rate = plant.mdot_oil_rate;

        // resolve the reference; "auto" temperature is bisected once per
        // schedule entry when it becomes active
        let entry = sc
            .schedule
            .iter()
            .enumerate()
            .take_while(|(_, e)| e.t <= t_now)
            .last();
        let (w_ref, t_ref) = match entry {
            None => default_ref,
            Some((idx, e)) => {
                let t_ref = match e.t_ref {
                    Some(t) => t,
                    None => match active {
                        Some((i, t)) if i == idx => t,
                        _ => max_feasible_t_ref(
                            &ctrl,
                            &x_hat,
                            &d_hat,
                            e.w_ref,
                            out.t_in_t,
                            ctrl.last_n_c_min.max(0.0),
                        ),
                    },
                };
                active = Some((idx, t_ref));
                (e.w_ref, t_ref)
            }
        };

        let sol = match ctrl.control_update(&x_hat, &d_hat, [w_ref, t_ref]) {
            Ok(sol) => sol,
            Err(e) => {
                log.aborted = Some(format!("controller at t = {t_now:.2}: {e}"));
                break;
            }
        };
        plant.torque_rate = sol.u_star[0];
        plant.mdot_oil_ref = sol.u_star[1];

        log.control.push(ControlRecord {
            time: t_now,
            r: [w_ref, t_ref],
            z: [out.w_net, out.t_in_t],
            u_star: sol.u_star,
            torque: sol.torque_next,
            n_c_min: sol.n_c_min,
            slack_temp_max: sol.slack_temp.iter().copied().fold(0.0, f64::max),
            slack_speed_max: sol.slack_speed.iter().copied().fold(0.0, f64::max),
            qp_iterations: sol.qp_iterations,
            kkt_residual: sol.kkt_residual,
            solve_time: sol.solve_time,
            degraded: sol.degraded,
        });

        let mut diag_interval = super::plant::PlantDiagnostics::default();
        let mut failed = None;
        for c in 0..cycles {
            let u_th = ThermalInputs {
                p_high: out.p_high,
                mdot_c: out.mdot_c,
                n_c: plant.n_c,
                mdot_oil: plant.mdot_oil,
            };
            est = match observer.ekf_predict(&est, &u_th) {
                Ok(e) => e,
                Err(e) => {
                    failed = Some(format!("filter prediction: {e}"));
                    break;
                }
            };
            match plant.step(dt_est) {
                Ok(d) => {
                    diag_interval.max_mach = diag_interval.max_mach.max(d.max_mach);
                    diag_interval.max_cfl = diag_interval.max_cfl.max(d.max_cfl);
                    diag_interval.inner_steps += d.inner_steps;
                }
                Err(e) => {
                    failed = Some(e.to_string());
                    break;
                }
            }
            out = match plant.outputs() {
                Ok(o) => o,
                Err(e) => {
                    failed = Some(e.to_string());
                    break;
                }
            };
            let mut y = out.y;
            if sc.estimator.measurement_noise {
                for (yi, s) in y.iter_mut().zip(noise_std) {
                    *yi += s * gaussian(&mut rng);
                }
            }
            est = match observer.ekf_correct(&est, &u_th, &y) {
                Ok(e) => e,
                Err(e) => {
                    failed = Some(format!("filter correction: {e}"));
                    break;
                }
            };
            log.estimator.push(EstimatorRecord {
                time: t_now + (c + 1) as f64 * dt_est,
                y,
                innovation: std::array::from_fn(|i| est.innovation[i]),
                d_hat: std::array::from_fn(|i| est.mean[nt + i]),
                regularized: est.regularized,
            });
        }
        if let Some(why) = failed {
            log.aborted = Some(format!("t = {:.2}: {why}", plant.time));
            // drop the interval's partial records so the log stays one
            // controller record and `cycles` filter records per interval
            log.control.pop();
            let keep = k * cycles;
            log.estimator.truncate(keep);
            break;
        }

        // keep the plant's ramped torque and the controller's integrated
        // copy bit-identical across intervals
        plant.torque = sol.torque_next;

        log.plant.push(PlantRecord {
            time: t_now + dt,
            w_net: out.w_net,
            t_in_t: out.t_in_t,
            y: out.y,
            torque: plant.torque,
            torque_rate: plant.torque_rate,
            mdot_oil_ref: plant.mdot_oil_ref,
            mdot_c: out.mdot_c,
            mdot_t: out.mdot_t,
            n_c: plant.n_c,
            n_c_min: sol.n_c_min,
            mdot_oil: plant.mdot_oil,
            p_high: out.p_high,
            max_mach: diag_interval.max_mach,
            max_cfl: diag_interval.max_cfl,
            inner_steps: diag_interval.inner_steps,
            w_ref,
            t_ref,
        });
    }

    log.assert_finite();
    Ok(log)
}

/// Standard normal via Box-Muller on the seeded stream.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
