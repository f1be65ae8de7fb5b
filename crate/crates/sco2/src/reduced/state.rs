//! State and input layout of the reduced-order control model.
//!
//! The packed vector order is: wall temperatures, high-side CO2 internal
//! energies (inlet pipe, heat-exchanger hot cells, outlet pipe), high-side
//! pressure, compressor and turbine mass flows, compressor speed, oil
//! internal energies, oil mass flow, oil mass-flow rate.

/// Cell counts that fix the packed-vector layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedLayout {
    /// Cells in each connecting pipe (compressor-to-HX and HX-to-turbine).
    pub n_pipe: usize,
    /// Heat-exchanger cells; wall, hot, and cold grids all share this count.
    pub n_hx: usize,
}

impl ReducedLayout {
    /// High-side CO2 cell count: two pipes plus the hot HX cells.
    pub fn n_high(&self) -> usize {
        2 * self.n_pipe + self.n_hx
    }

    pub fn n_states(&self) -> usize {
        2 * self.n_hx + self.n_high() + 6
    }

    pub fn i_t_wall(&self, i: usize) -> usize {
        debug_assert!(i < self.n_hx);
        i
    }

    pub fn i_e_co2(&self, i: usize) -> usize {
        debug_assert!(i < self.n_high());
        self.n_hx + i
    }

    pub fn i_p_high(&self) -> usize {
        self.n_hx + self.n_high()
    }

    pub fn i_mdot_c(&self) -> usize {
        self.i_p_high() + 1
    }

    pub fn i_mdot_t(&self) -> usize {
        self.i_p_high() + 2
    }

    pub fn i_n_c(&self) -> usize {
        self.i_p_high() + 3
    }

    pub fn i_e_oil(&self, i: usize) -> usize {
        debug_assert!(i < self.n_hx);
        self.i_p_high() + 4 + i
    }

    pub fn i_mdot_oil(&self) -> usize {
        self.i_p_high() + 4 + self.n_hx
    }

    pub fn i_mdot_oil_rate(&self) -> usize {
        self.i_mdot_oil() + 1
    }

    /// Wall index exchanging heat with oil cell `j` (counter-flow).
    pub fn wall_of_oil(&self, j: usize) -> usize {
        self.n_hx - 1 - j
    }

    /// Thermal state count: walls plus both streams' energies.
    pub fn n_thermal(&self) -> usize {
        2 * self.n_hx + self.n_high()
    }

    /// Full-state index of thermal coordinate `k`, where the thermal
    /// ordering is [T_wall, e_CO2, e_oil].
    pub fn thermal_to_full(&self, k: usize) -> usize {
        debug_assert!(k < self.n_thermal());
        if k < self.n_hx {
            self.i_t_wall(k)
        } else if k < self.n_hx + self.n_high() {
            self.i_e_co2(k - self.n_hx)
        } else {
            self.i_e_oil(k - self.n_hx - self.n_high())
        }
    }
}

/// Reduced-model state. Wall and oil grids are indexed along their own flow
/// directions; the oil stream runs counter to the CO2 stream.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub t_wall: Vec<f64>,
    pub e_co2: Vec<f64>,
    pub p_high: f64,
    pub mdot_c: f64,
    pub mdot_t: f64,
    pub n_c: f64,
    pub e_oil: Vec<f64>,
    pub mdot_oil: f64,
    pub mdot_oil_rate: f64,
}

impl ReducedState {
    pub fn layout(&self, n_pipe: usize) -> ReducedLayout {
        ReducedLayout {
            n_pipe,
            n_hx: self.t_wall.len(),
        }
    }

    pub fn pack(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(
            self.t_wall.len() * 2 + self.e_co2.len() + 6,
        );
        v.extend_from_slice(&self.t_wall);
        v.extend_from_slice(&self.e_co2);
        v.push(self.p_high);
        v.push(self.mdot_c);
        v.push(self.mdot_t);
        v.push(self.n_c);
        v.extend_from_slice(&self.e_oil);
        v.push(self.mdot_oil);
        v.push(self.mdot_oil_rate);
        v
    }

    pub fn unpack(lay: &ReducedLayout, v: &[f64]) -> ReducedState {
        assert_eq!(v.len(), lay.n_states(), "packed state length mismatch");
        ReducedState {
            t_wall: v[..lay.n_hx].to_vec(),
            e_co2: v[lay.i_e_co2(0)..lay.i_e_co2(0) + lay.n_high()].to_vec(),
            p_high: v[lay.i_p_high()],
            mdot_c: v[lay.i_mdot_c()],
            mdot_t: v[lay.i_mdot_t()],
            n_c: v[lay.i_n_c()],
            e_oil: v[lay.i_e_oil(0)..lay.i_e_oil(0) + lay.n_hx].to_vec(),
            mdot_oil: v[lay.i_mdot_oil()],
            mdot_oil_rate: v[lay.i_mdot_oil_rate()],
        }
    }
}

/// Control-side inputs. The motor torque itself is the time integral of
/// `torque_rate`, kept by whoever drives the model; the dynamics read the
/// integrated value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedInput {
    /// Applied motor torque T_m, N m.
    pub torque: f64,
    /// Torque slew rate, N m/s (does not enter the dynamics directly).
    pub torque_rate: f64,
    /// Oil pump mass-flow setpoint, kg/s.
    pub mdot_oil_ref: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_unpack_roundtrip() {
        let lay = ReducedLayout { n_pipe: 2, n_hx: 3 };
        let x = ReducedState {
            t_wall: vec![1.0, 2.0, 3.0],
            e_co2: (0..7).map(|i| 10.0 + i as f64).collect(),
            p_high: 20.0,
            mdot_c: 21.0,
            mdot_t: 22.0,
            n_c: 23.0,
            e_oil: vec![30.0, 31.0, 32.0],
            mdot_oil: 40.0,
            mdot_oil_rate: 41.0,
        };
        let v = x.pack();
        assert_eq!(v.len(), lay.n_states());
        assert_eq!(v[lay.i_p_high()], 20.0);
        assert_eq!(v[lay.i_n_c()], 23.0);
        assert_eq!(v[lay.i_e_oil(2)], 32.0);
        assert_eq!(v[lay.i_mdot_oil_rate()], 41.0);
        assert_eq!(ReducedState::unpack(&lay, &v), x);
    }

    #[test]
    fn counterflow_wall_indexing_reverses() {
        let lay = ReducedLayout { n_pipe: 2, n_hx: 5 };
        assert_eq!(lay.wall_of_oil(0), 4);
        assert_eq!(lay.wall_of_oil(4), 0);
    }
}
