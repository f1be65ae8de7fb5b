//! Dense property tables with bicubic lookup.
//!
//! A table samples every state field of a provider on a rectangular grid in
//! either (p, T) or (ρ, e). The (ρ, e) basis is what the flow solver's inner
//! loop wants; the (p, T) basis suits boundary conditions. Files are plain
//! text: a self-describing header followed by whitespace-separated arrays,
//! written with enough digits to round-trip bit-exactly.

use crate::error::PropertyError;
use crate::numerics::{Bicubic, Matrix};
use crate::props::{FluidProps, PePartials, Region, ThermoState};
use std::fmt::Write as _;
use std::path::Path;

pub const TABLE_FORMAT_VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableBasis {
    /// axis1 = p [Pa], axis2 = T [K]
    PT,
    /// axis1 = ρ [kg/m³], axis2 = e [J/kg]
    RhoE,
}

impl TableBasis {
    fn tag(&self) -> &'static str {
        match self {
            TableBasis::PT => "pt",
            TableBasis::RhoE => "rho-e",
        }
    }

    fn from_tag(tag: &str) -> Result<Self, PropertyError> {
        match tag {
            "pt" => Ok(TableBasis::PT),
            "rho-e" => Ok(TableBasis::RhoE),
            other => Err(PropertyError::Table(format!("unknown basis tag '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyTable {
    pub fluid: String,
    pub basis: TableBasis,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// (name, values) with values row-major, axis1 the slow index.
    pub properties: Vec<(String, Vec<f64>)>,
}

impl PropertyTable {
    pub fn property(&self, name: &str) -> Option<&[f64]> {
        self.properties
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    fn validate(&self) -> Result<(), PropertyError> {
        for axis in [&self.axis1, &self.axis2] {
            if axis.len() < 2 || axis.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(PropertyError::Table(
                    "axes must be strictly increasing with at least two points".into(),
                ));
            }
        }
        let n = self.axis1.len() * self.axis2.len();
        for (name, vals) in &self.properties {
            if vals.len() != n {
                return Err(PropertyError::Table(format!(
                    "property '{name}' has {} values, expected {n}",
                    vals.len()
                )));
            }
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(PropertyError::Table(format!(
                    "property '{name}' contains non-finite entries"
                )));
            }
        }
        Ok(())
    }
}

/// Linear axis specification for table generation.
#[derive(Debug, Clone, Copy)]
pub struct AxisSpec {
    pub n: usize,
    pub min: f64,
    pub max: f64,
}

impl AxisSpec {
    pub fn new(n: usize, min: f64, max: f64) -> Self {
        AxisSpec { n, min, max }
    }

    fn grid(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.n - 1) as f64)
            .collect()
    }
}

const FIELD_NAMES_PT: [&str; 9] = ["rho", "e", "h", "s", "cp", "cv", "k", "mu", "a"];
const FIELD_NAMES_RHOE: [&str; 9] = ["p", "t", "h", "s", "cp", "cv", "k", "mu", "a"];

fn field_value(st: &ThermoState, name: &str) -> f64 {
    match name {
        "p" => st.p,
        "t" => st.t,
        "rho" => st.rho,
        "e" => st.e,
        "h" => st.h,
        "s" => st.s,
        "cp" => st.cp,
        "cv" => st.cv,
        "k" => st.k,
        "mu" => st.mu,
        "a" => st.a,
        _ => f64::NAN,
    }
}

/// Samples every state field of `provider` on the grid. For the (ρ, e)
/// basis each column sweep warm-starts the inversion from its neighbor.
pub fn build_table(
    provider: &dyn FluidProps,
    basis: TableBasis,
    axis1: AxisSpec,
    axis2: AxisSpec,
) -> Result<PropertyTable, PropertyError> {
    let a1 = axis1.grid();
    let a2 = axis2.grid();
    let names: &[&str] = match basis {
        TableBasis::PT => &FIELD_NAMES_PT,
        TableBasis::RhoE => &FIELD_NAMES_RHOE,
    };
    let mut arrays: Vec<Vec<f64>> = vec![Vec::with_capacity(a1.len() * a2.len()); names.len()];
    let mut hint: Option<(f64, f64)> = None;
    for &x1 in &a1 {
        let mut row_hint = hint;
        for (j, &x2) in a2.iter().enumerate() {
            let st = match basis {
                TableBasis::PT => provider.state_from_pt(x1, x2)?,
                TableBasis::RhoE => {
                    let st = provider.state_from_rho_e(x1, x2, row_hint)?;
                    row_hint = Some((st.p, st.t));
                    if j == 0 {
                        hint = row_hint;
                    }
                    st
                }
            };
            for (arr, name) in arrays.iter_mut().zip(names) {
                arr.push(field_value(&st, name));
            }
        }
    }
    let table = PropertyTable {
        fluid: provider.name().to_string(),
        basis,
        axis1: a1,
        axis2: a2,
        properties: names
            .iter()
            .map(|n| n.to_string())
            .zip(arrays)
            .collect(),
    };
    table.validate()?;
    Ok(table)
}

pub fn save_table(table: &PropertyTable, path: &Path) -> Result<(), PropertyError> {
    table.validate()?;
    let mut out = String::new();
    let _ = writeln!(out, "sco2-property-table {TABLE_FORMAT_VERSION}");
    let _ = writeln!(out, "fluid {}", table.fluid);
    let _ = writeln!(out, "basis {}", table.basis.tag());
    for (label, axis) in [("axis1", &table.axis1), ("axis2", &table.axis2)] {
        let _ = writeln!(out, "{label} {}", axis.len());
        write_values(&mut out, axis);
    }
    for (name, vals) in &table.properties {
        let _ = writeln!(out, "property {name}");
        write_values(&mut out, vals);
    }
    let _ = writeln!(out, "end");
    std::fs::write(path, out)?;
    Ok(())
}

fn write_values(out: &mut String, vals: &[f64]) {
    for chunk in vals.chunks(8) {
        let line: Vec<String> = chunk.iter().map(|v| format!("{v:.17e}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
}

pub fn load_table(path: &Path) -> Result<PropertyTable, PropertyError> {
    let text = std::fs::read_to_string(path)?;
    let mut toks = text.split_whitespace();
    let mut next = |what: &str| {
        toks.next()
            .ok_or_else(|| PropertyError::Table(format!("unexpected end of file, wanted {what}")))
    };
    if next("magic")? != "sco2-property-table" {
        return Err(PropertyError::Table("not a property-table file".into()));
    }
    let version = next("version")?;
    if version != TABLE_FORMAT_VERSION {
        return Err(PropertyError::Table(format!(
            "unsupported version '{version}'"
        )));
    }
    let mut fluid = String::new();
    let mut basis = None;
    let mut axis1 = vec![];
    let mut axis2 = vec![];
    let mut properties = vec![];
    loop {
        let key = next("key")?;
        match key {
            "fluid" => fluid = next("fluid name")?.to_string(),
            "basis" => basis = Some(TableBasis::from_tag(next("basis tag")?)?),
            "axis1" | "axis2" => {
                let n: usize = parse(next("axis length")?)?;
                let vals = read_values(&mut next, n)?;
                if key == "axis1" {
                    axis1 = vals;
                } else {
                    axis2 = vals;
                }
            }
            "property" => {
                let name = next("property name")?.to_string();
                if axis1.is_empty() || axis2.is_empty() {
                    return Err(PropertyError::Table(
                        "property block before axis blocks".into(),
                    ));
                }
                let vals = read_values(&mut next, axis1.len() * axis2.len())?;
                properties.push((name, vals));
            }
            "end" => break,
            other => {
                return Err(PropertyError::Table(format!("unknown key '{other}'")));
            }
        }
    }
    let table = PropertyTable {
        fluid,
        basis: basis.ok_or_else(|| PropertyError::Table("missing basis".into()))?,
        axis1,
        axis2,
        properties,
    };
    table.validate()?;
    Ok(table)
}

fn parse<T: std::str::FromStr>(tok: &str) -> Result<T, PropertyError> {
    tok.parse()
        .map_err(|_| PropertyError::Table(format!("bad token '{tok}'")))
}

fn read_values<'a>(
    next: &mut impl FnMut(&str) -> Result<&'a str, PropertyError>,
    n: usize,
) -> Result<Vec<f64>, PropertyError> {
    (0..n).map(|_| parse(next("value")?)).collect()
}

/// Bicubic-interpolating provider backed by a [`PropertyTable`]. Enthalpy is
/// recomputed as e + p/ρ so the state identity holds exactly despite
/// interpolation error.
pub struct TableProvider {
    fluid: String,
    basis: TableBasis,
    fields: Vec<(String, Bicubic)>,
    region: Region,
    /// axis box, useful to callers planning queries in the native basis
    pub axis1_range: (f64, f64),
    pub axis2_range: (f64, f64),
}

impl TableProvider {
    pub fn new(table: &PropertyTable) -> Result<Self, PropertyError> {
        table.validate()?;
        let mut fields = Vec::with_capacity(table.properties.len());
        for (name, vals) in &table.properties {
            let interp = Bicubic::new(table.axis1.clone(), table.axis2.clone(), vals.clone())
                .map_err(|e| PropertyError::Table(e.to_string()))?;
            fields.push((name.clone(), interp));
        }
        let expected: &[&str] = match table.basis {
            TableBasis::PT => &FIELD_NAMES_PT,
            TableBasis::RhoE => &FIELD_NAMES_RHOE,
        };
        for want in expected {
            if !fields.iter().any(|(n, _)| n == want) {
                return Err(PropertyError::Table(format!("missing property '{want}'")));
            }
        }
        let region = match table.basis {
            TableBasis::PT => Region {
                p_min: table.axis1[0],
                p_max: *table.axis1.last().unwrap(),
                t_min: table.axis2[0],
                t_max: *table.axis2.last().unwrap(),
            },
            TableBasis::RhoE => {
                // the (p, T) box only bounds the reachable states; inversion
                // still verifies each query lands on the grid
                let p = table.property("p").unwrap();
                let t = table.property("t").unwrap();
                let fold = |vals: &[f64], init: f64, f: fn(f64, f64) -> f64| {
                    vals.iter().fold(init, |acc, &v| f(acc, v))
                };
                Region {
                    p_min: fold(p, f64::INFINITY, f64::min),
                    p_max: fold(p, f64::NEG_INFINITY, f64::max),
                    t_min: fold(t, f64::INFINITY, f64::min),
                    t_max: fold(t, f64::NEG_INFINITY, f64::max),
                }
            }
        };
        Ok(TableProvider {
            fluid: table.fluid.clone(),
            basis: table.basis,
            axis1_range: (table.axis1[0], *table.axis1.last().unwrap()),
            axis2_range: (table.axis2[0], *table.axis2.last().unwrap()),
            fields,
            region,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, PropertyError> {
        TableProvider::new(&load_table(path)?)
    }

    pub fn basis(&self) -> TableBasis {
        self.basis
    }

    fn field(&self, name: &str) -> &Bicubic {
        &self.fields.iter().find(|(n, _)| n == name).unwrap().1
    }

    /// Evaluate every field at grid point (x1, x2) through one shared basis.
    fn sample(&self, x1: f64, x2: f64) -> Result<ThermoState, PropertyError> {
        let basis = self.fields[0].1.basis(x1, x2).map_err(|_| {
            PropertyError::OutOfRegion {
                fluid: self.fluid.clone(),
                var1: if self.basis == TableBasis::PT { "p" } else { "rho" },
                var2: if self.basis == TableBasis::PT { "T" } else { "e" },
                v1: x1,
                v2: x2,
                bounds: self.region.describe(),
            }
        })?;
        let get = |name: &str| self.field(name).eval_with(&basis).0;
        let mut st = match self.basis {
            TableBasis::PT => ThermoState {
                p: x1,
                t: x2,
                rho: get("rho"),
                e: get("e"),
                h: 0.0,
                s: get("s"),
                cp: get("cp"),
                cv: get("cv"),
                k: get("k"),
                mu: get("mu"),
                a: get("a"),
            },
            TableBasis::RhoE => ThermoState {
                p: get("p"),
                t: get("t"),
                rho: x1,
                e: x2,
                h: 0.0,
                s: get("s"),
                cp: get("cp"),
                cv: get("cv"),
                k: get("k"),
                mu: get("mu"),
                a: get("a"),
            },
        };
        st.h = st.e + st.p / st.rho;
        Ok(st)
    }

    /// (ρ, e) from (p, T) on a ρ–e table: 2D Newton using the interpolant's
    /// own partials for the Jacobian.
    fn invert_rhoe_grid(&self, p: f64, t: f64) -> Result<ThermoState, PropertyError> {
        let p_tab = self.field("p");
        let t_tab = self.field("t");
        let (r_lo, r_hi) = self.axis1_range;
        let (e_lo, e_hi) = self.axis2_range;
        let mut rho = 0.5 * (r_lo + r_hi);
        let mut e = 0.5 * (e_lo + e_hi);
        let p_scale = p.abs().max(1e5);
        let t_scale = t.abs().max(1.0);
        for _ in 0..80 {
            let b = p_tab.basis(rho, e).map_err(|err| PropertyError::Table(err.to_string()))?;
            let (pv, dp_drho, dp_de) = p_tab.eval_with(&b);
            let (tv, dt_drho, dt_de) = t_tab.eval_with(&b);
            let r1 = (pv - p) / p_scale;
            let r2 = (tv - t) / t_scale;
            if r1.abs() <= 1e-10 && r2.abs() <= 1e-10 {
                return self.sample(rho, e);
            }
            let j = Matrix::from_rows(&[
                &[dp_drho / p_scale, dp_de / p_scale],
                &[dt_drho / t_scale, dt_de / t_scale],
            ]);
            let step = j
                .solve_vec(&[r1, r2])
                .map_err(|_| PropertyError::InversionFailed {
                    fluid: self.fluid.clone(),
                    iters: 0,
                    p,
                    t,
                    residual: r1.hypot(r2),
                })?;
            rho = (rho - step[0]).clamp(r_lo, r_hi);
            e = (e - step[1]).clamp(e_lo, e_hi);
        }
        Err(PropertyError::InversionFailed {
            fluid: self.fluid.clone(),
            iters: 80,
            p,
            t,
            residual: f64::NAN,
        })
    }
}

impl FluidProps for TableProvider {
    fn name(&self) -> &str {
        &self.fluid
    }

    fn region(&self) -> Region {
        self.region
    }

    fn state_from_pt(&self, p: f64, t: f64) -> Result<ThermoState, PropertyError> {
        match self.basis {
            TableBasis::PT => self.sample(p, t),
            TableBasis::RhoE => {
                let st = self.invert_rhoe_grid(p, t)?;
                // clamped iterations can stall on the grid edge looking
                // converged; make sure we actually hit the target
                if (st.p - p).abs() > 1e-6 * p.abs().max(1e5)
                    || (st.t - t).abs() > 1e-6 * t.abs().max(1.0)
                {
                    return Err(PropertyError::OutOfRegion {
                        fluid: self.fluid.clone(),
                        var1: "p",
                        var2: "T",
                        v1: p,
                        v2: t,
                        bounds: self.region.describe(),
                    });
                }
                Ok(st)
            }
        }
    }

    fn state_from_rho_e(
        &self,
        rho: f64,
        e: f64,
        hint: Option<(f64, f64)>,
    ) -> Result<ThermoState, PropertyError> {
        match self.basis {
            TableBasis::RhoE => self.sample(rho, e),
            TableBasis::PT => crate::props::invert_rho_e(self, rho, e, hint),
        }
    }

    fn partials_pe(&self, p: f64, e: f64) -> Result<PePartials, PropertyError> {
        match self.basis {
            TableBasis::PT => crate::props::fd_partials_pe(self, p, e, 1e-5),
            TableBasis::RhoE => {
                // locate (ρ, e) for this (p, e), then turn the interpolant's
                // (∂p/∂ρ, ∂p/∂e, ∂T/∂ρ, ∂T/∂e) into fixed-(p, e) partials
                let st = self.state_from_pe(p, e, None)?;
                let b = self.fields[0]
                    .1
                    .basis(st.rho, st.e)
                    .map_err(|err| PropertyError::Table(err.to_string()))?;
                let (_, dp_drho, dp_de) = self.field("p").eval_with(&b);
                let (_, dt_drho, dt_de) = self.field("t").eval_with(&b);
                let drho_dp = 1.0 / dp_drho;
                let drho_de = -dp_de / dp_drho;
                Ok(PePartials {
                    drho_de,
                    drho_dp,
                    dt_de: dt_de + dt_drho * drho_de,
                    dt_dp: dt_drho * drho_dp,
                    dh_de: 1.0 - p / (st.rho * st.rho) * drho_de,
                    one_sided: false,
                })
            }
        }
    }

    fn state_from_pe(
        &self,
        p: f64,
        e: f64,
        hint_t: Option<f64>,
    ) -> Result<ThermoState, PropertyError> {
        match self.basis {
            TableBasis::RhoE => {
                // 1D Newton on ρ along the fixed-e grid line
                let p_tab = self.field("p");
                let (r_lo, r_hi) = self.axis1_range;
                let p_scale = p.abs().max(1e5);
                let mut rho = 0.5 * (r_lo + r_hi);
                let _ = hint_t;
                for _ in 0..80 {
                    let (pv, dp_drho, _) = p_tab
                        .eval(rho, e)
                        .map_err(|err| PropertyError::Table(err.to_string()))?;
                    let r = (pv - p) / p_scale;
                    if r.abs() <= 1e-10 {
                        return self.sample(rho, e);
                    }
                    rho = (rho - r * p_scale / dp_drho).clamp(r_lo, r_hi);
                }
                Err(PropertyError::InversionFailed {
                    fluid: self.fluid.clone(),
                    iters: 80,
                    p,
                    t: f64::NAN,
                    residual: f64::NAN,
                })
            }
            TableBasis::PT => crate::props::invert_pe(self, p, e, hint_t),
        }
    }
}
