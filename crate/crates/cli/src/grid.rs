//! The axis-field grid CSV: one row per (time node, angular point), time-major.
//! Swirl-axis components and `corr` are `NaN` on infeasible columns.

use std::fmt::Write as _;

use ringlab_core::{AxisField, Vec3};

pub const GRID_HEADER: &str = "t,s,x,y,z,zsx,zsy,zsz,zx,zy,zz,corr,feasible";
pub const GRID_FILE: &str = "grid.csv";

pub fn to_csv(field: &AxisField) -> String {
    let mut out = String::with_capacity(200 * field.corr.len());
    out.push_str(GRID_HEADER);
    out.push('\n');
    for (i, &t) in field.times.iter().enumerate() {
        for (j, &s) in field.s.iter().enumerate() {
            let k = field.index(i, j);
            let (p, zs, z) = (field.position[k], field.zeta_star_hat[k], field.zeta_hat[k]);
            writeln!(
                out,
                "{t},{s},{},{},{},{},{},{},{},{},{},{},{}",
                p.x,
                p.y,
                p.z,
                zs.x,
                zs.y,
                zs.z,
                z.x,
                z.y,
                z.z,
                field.corr[k],
                u8::from(field.is_feasible(j))
            )
            .unwrap();
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub t: f64,
    pub s: f64,
    pub position: Vec3,
    pub corr: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub rows: Vec<GridRow>,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end() == GRID_HEADER => {}
            Some((_, header)) => return Err(format!("unexpected header '{header}', expected '{GRID_HEADER}'")),
            None => return Err("empty grid file".into()),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 13 {
                return Err(format!("line {}: expected 13 fields, found {}", i + 1, fields.len()));
            }
            let num = |k: usize| {
                fields[k]
                    .parse::<f64>()
                    .map_err(|e| format!("line {}: field {}: {e}", i + 1, k + 1))
            };
            let feasible = match fields[12] {
                "1" => true,
                "0" => false,
                other => return Err(format!("line {}: feasible flag '{other}' is not 0 or 1", i + 1)),
            };
            let row = GridRow {
                t: num(0)?,
                s: num(1)?,
                position: Vec3::new(num(2)?, num(3)?, num(4)?),
                corr: num(11)?,
                feasible,
            };
            if !(row.t.is_finite() && row.s.is_finite() && row.position.is_finite()) {
                return Err(format!("line {}: non-finite time, angle or position", i + 1));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err("grid file has no data rows".into());
        }
        Ok(Self { rows })
    }

    /// Distinct times in file order.
    pub fn times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = Vec::new();
        for r in &self.rows {
            if times.last() != Some(&r.t) {
                times.push(r.t);
            }
        }
        times
    }

    /// Rows at time `t`, sorted by `s`.
    pub fn snapshot(&self, t: f64) -> Vec<&GridRow> {
        let mut rows: Vec<&GridRow> = self.rows.iter().filter(|r| r.t == t).collect();
        rows.sort_by(|a, b| a.s.total_cmp(&b.s));
        rows
    }
}
