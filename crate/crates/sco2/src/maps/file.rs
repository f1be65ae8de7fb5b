//! Versioned plain-text container for turbomachine map files.
//!
//! Layout: a magic line with format version, a `machine` line, then named
//! blocks in any order — `scalar <name> <value>`, `axis <name> <n> <values>`,
//! `grid <name> <axis1> <axis2> <values>` (row-major, axis1 slow), and
//! `curve <name> <axis> <values>` — terminated by `end`. Floats are written
//! with 17 significant digits so a save/load round trip is bit-exact.

use std::collections::BTreeMap;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::MapError;

pub const MAP_FORMAT_MAGIC: &str = "sco2-turbo-map";
pub const MAP_FORMAT_VERSION: &str = "v1";

#[derive(Debug, Clone, Default)]
pub struct MapFile {
    pub machine: String,
    pub scalars: BTreeMap<String, f64>,
    pub axes: BTreeMap<String, Vec<f64>>,
    /// name -> (axis1 name, axis2 name, values row-major with axis1 slow)
    pub grids: BTreeMap<String, (String, String, Vec<f64>)>,
    /// name -> (axis name, values)
    pub curves: BTreeMap<String, (String, Vec<f64>)>,
}

impl MapFile {
    pub fn scalar(&self, name: &str) -> Result<f64, MapError> {
        self.scalars
            .get(name)
            .copied()
            .ok_or_else(|| MapError::File(format!("missing scalar '{name}'")))
    }

    pub fn axis(&self, name: &str) -> Result<&[f64], MapError> {
        self.axes
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| MapError::File(format!("missing axis '{name}'")))
    }

    pub fn grid(&self, name: &str) -> Result<(&[f64], &[f64], &[f64]), MapError> {
        let (a1, a2, vals) = self
            .grids
            .get(name)
            .ok_or_else(|| MapError::File(format!("missing grid '{name}'")))?;
        Ok((self.axis(a1)?, self.axis(a2)?, vals))
    }

    pub fn curve(&self, name: &str) -> Result<(&[f64], &[f64]), MapError> {
        let (a, vals) = self
            .curves
            .get(name)
            .ok_or_else(|| MapError::File(format!("missing curve '{name}'")))?;
        Ok((self.axis(a)?, vals))
    }

    pub fn save(&self, path: &Path) -> Result<(), MapError> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "{MAP_FORMAT_MAGIC} {MAP_FORMAT_VERSION}")?;
        writeln!(w, "machine {}", self.machine)?;
        for (name, v) in &self.scalars {
            writeln!(w, "scalar {name} {v:.17e}")?;
        }
        for (name, vals) in &self.axes {
            write!(w, "axis {name} {}", vals.len())?;
            write_vals(&mut w, vals)?;
        }
        for (name, (a1, a2, vals)) in &self.grids {
            write!(w, "grid {name} {a1} {a2}")?;
            write_vals(&mut w, vals)?;
        }
        for (name, (a, vals)) in &self.curves {
            write!(w, "curve {name} {a}")?;
            write_vals(&mut w, vals)?;
        }
        writeln!(w, "end")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, MapError> {
        let text = std::fs::read_to_string(path)?;
        let mut tok = text.split_whitespace();
        fn next<'a>(
            tok: &mut impl Iterator<Item = &'a str>,
            what: &str,
        ) -> Result<&'a str, MapError> {
            tok.next()
                .ok_or_else(|| MapError::File(format!("truncated file: expected {what}")))
        }
        let magic = next(&mut tok, "magic")?;
        let version = next(&mut tok, "version")?;
        if magic != MAP_FORMAT_MAGIC || version != MAP_FORMAT_VERSION {
            return Err(MapError::File(format!(
                "bad header '{magic} {version}', expected '{MAP_FORMAT_MAGIC} {MAP_FORMAT_VERSION}'"
            )));
        }
        let kw = next(&mut tok, "'machine'")?;
        if kw != "machine" {
            return Err(MapError::File(format!("expected 'machine', got '{kw}'")));
        }
        let mut out = MapFile {
            machine: next(&mut tok, "machine type")?.to_string(),
            ..Default::default()
        };
        loop {
            let block = next(&mut tok, "block keyword or 'end'")?;
            match block {
                "end" => break,
                "scalar" => {
                    let name = next(&mut tok, "scalar name")?.to_string();
                    let v = parse_f64(next(&mut tok, "scalar value")?)?;
                    out.scalars.insert(name, v);
                }
                "axis" => {
                    let name = next(&mut tok, "axis name")?.to_string();
                    let n: usize = next(&mut tok, "axis length")?
                        .parse()
                        .map_err(|_| MapError::File(format!("bad length for axis '{name}'")))?;
                    let vals = read_vals(&mut tok, n, &name)?;
                    out.axes.insert(name, vals);
                }
                "grid" => {
                    let name = next(&mut tok, "grid name")?.to_string();
                    let a1 = next(&mut tok, "grid axis1")?.to_string();
                    let a2 = next(&mut tok, "grid axis2")?.to_string();
                    let n = axis_len(&out, &a1)? * axis_len(&out, &a2)?;
                    let vals = read_vals(&mut tok, n, &name)?;
                    out.grids.insert(name, (a1, a2, vals));
                }
                "curve" => {
                    let name = next(&mut tok, "curve name")?.to_string();
                    let a = next(&mut tok, "curve axis")?.to_string();
                    let n = axis_len(&out, &a)?;
                    let vals = read_vals(&mut tok, n, &name)?;
                    out.curves.insert(name, (a, vals));
                }
                other => return Err(MapError::File(format!("unknown block '{other}'"))),
            }
        }
        Ok(out)
    }
}

fn axis_len(f: &MapFile, name: &str) -> Result<usize, MapError> {
    Ok(f.axis(name)?.len())
}

fn parse_f64(s: &str) -> Result<f64, MapError> {
    s.parse()
        .map_err(|_| MapError::File(format!("bad float '{s}'")))
}

fn write_vals<W: Write>(w: &mut W, vals: &[f64]) -> std::io::Result<()> {
    for (i, v) in vals.iter().enumerate() {
        if i % 8 == 0 {
            writeln!(w)?;
        }
        write!(w, " {v:.17e}")?;
    }
    writeln!(w)
}

fn read_vals<'a>(
    tok: &mut impl Iterator<Item = &'a str>,
    n: usize,
    name: &str,
) -> Result<Vec<f64>, MapError> {
    (0..n)
        .map(|i| {
            tok.next()
                .ok_or_else(|| {
                    MapError::File(format!("block '{name}' truncated at value {i} of {n}"))
                })
                .and_then(parse_f64)
        })
        .collect()
}
