//! Field snapshots as CSV or a flat little-endian binary dump.
//!
//! CSV layout:
//!
//! ```text
//! # time=<t>
//! # nx=<nx> ny=<ny> nz=<nz>
//! # gamma=<gamma>
//! # columns=x,y,z,rho,u,v,w,p,E,B1,B2,B3
//! <one row per fluid cell, x fastest>
//! ```
//!
//! Binary layout (all little-endian): the 8 bytes `ESMHDSNP`, `nx ny nz`
//! as `u64`, `time gamma` as `f64`, the row count as `u64`, then the rows
//! as `f64` in the CSV column order.

use std::fmt;
use std::io::{self, BufRead, Read, Write};
use std::str::FromStr;

use esmhd::solver::Simulation;
use esmhd::state::{cons_to_prim, StateError};

pub const COLUMNS: [&str; 12] = ["x", "y", "z", "rho", "u", "v", "w", "p", "E", "B1", "B2", "B3"];

const MAGIC: &[u8; 8] = b"ESMHDSNP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Bin,
}

impl SnapshotFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SnapshotFormat::Csv => "csv",
            SnapshotFormat::Bin => "bin",
        }
    }
}

impl fmt::Display for SnapshotFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown snapshot format `{0}` (expected csv or bin)")]
pub struct UnknownFormat(pub String);

impl FromStr for SnapshotFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "csv" => Ok(SnapshotFormat::Csv),
            "bin" => Ok(SnapshotFormat::Bin),
            other => Err(UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("malformed snapshot: {0}")]
    Format(String),
}

fn malformed(msg: impl Into<String>) -> SnapshotError {
    SnapshotError::Format(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotMeta {
    pub time: f64,
    pub n: [usize; 3],
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub meta: SnapshotMeta,
    pub rows: Vec<[f64; 12]>,
}

impl Snapshot {
    pub fn from_simulation(sim: &Simulation) -> Result<Self, StateError> {
        let mut rows = Vec::new();
        for c in sim.grid.fluid_cells() {
            let q = sim.field.conserved(c);
            let w = cons_to_prim(&q, sim.gas).map_err(|e| e.at_cell(c))?;
            let x = sim.grid.center(c);
            rows.push([
                x[0], x[1], x[2], w.rho, w.vel[0], w.vel[1], w.vel[2], w.p, q.energy, w.b[0], w.b[1], w.b[2],
            ]);
        }
        Ok(Self {
            meta: SnapshotMeta {
                time: sim.t,
                n: sim.grid.n(),
                gamma: sim.gas.gamma(),
            },
            rows,
        })
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        let m = &self.meta;
        writeln!(w, "# time={:.16e}", m.time)?;
        writeln!(w, "# nx={} ny={} nz={}", m.n[0], m.n[1], m.n[2])?;
        writeln!(w, "# gamma={:.16e}", m.gamma)?;
        writeln!(w, "# columns={}", COLUMNS.join(","))?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{v:.16e}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self, SnapshotError> {
        let mut time = None;
        let mut n = None;
        let mut gamma = None;
        let mut rows = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for item in rest.split_whitespace() {
                    let Some((k, v)) = item.split_once('=') else {
                        continue;
                    };
                    let num = |v: &str| v.parse::<f64>().map_err(|_| malformed(format!("bad header value `{item}`")));
                    match k {
                        "time" => time = Some(num(v)?),
                        "gamma" => gamma = Some(num(v)?),
                        "nx" | "ny" | "nz" => {
                            let axis = (k.as_bytes()[1] - b'x') as usize;
                            let val = v.parse::<usize>().map_err(|_| malformed(format!("bad extent `{item}`")))?;
                            n.get_or_insert([0; 3])[axis] = val;
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let mut row = [0.0; 12];
            let mut count = 0;
            for (k, field) in line.split(',').enumerate() {
                if k >= 12 {
                    return Err(malformed(format!("row with more than 12 columns: `{line}`")));
                }
                row[k] = field
                    .trim()
                    .parse()
                    .map_err(|_| malformed(format!("bad number `{field}`")))?;
                count += 1;
            }
            if count != 12 {
                return Err(malformed(format!("row with {count} columns")));
            }
            rows.push(row);
        }
        Ok(Self {
            meta: SnapshotMeta {
                time: time.ok_or_else(|| malformed("missing time"))?,
                n: n.ok_or_else(|| malformed("missing extents"))?,
                gamma: gamma.ok_or_else(|| malformed("missing gamma"))?,
            },
            rows,
        })
    }

    pub fn write_bin(&self, mut w: impl Write) -> io::Result<()> {
        w.write_all(MAGIC)?;
        for n in self.meta.n {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        w.write_all(&self.meta.time.to_le_bytes())?;
        w.write_all(&self.meta.gamma.to_le_bytes())?;
        w.write_all(&(self.rows.len() as u64).to_le_bytes())?;
        for row in &self.rows {
            for v in row {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_bin(mut r: impl Read) -> Result<Self, SnapshotError> {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        if &buf != MAGIC {
            return Err(malformed("bad magic"));
        }
        let mut word = || -> io::Result<[u8; 8]> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(b)
        };
        let mut n = [0usize; 3];
        for v in &mut n {
            *v = u64::from_le_bytes(word()?) as usize;
        }
        let time = f64::from_le_bytes(word()?);
        let gamma = f64::from_le_bytes(word()?);
        let count = u64::from_le_bytes(word()?) as usize;
        let mut rows = Vec::with_capacity(count.min(1 << 24));
        for _ in 0..count {
            let mut row = [0.0; 12];
            for v in &mut row {
                *v = f64::from_le_bytes(word()?);
            }
            rows.push(row);
        }
        Ok(Self {
            meta: SnapshotMeta { time, n, gamma },
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use esmhd::problems::make_problem;
    use esmhd::solver::{Scheme, TimeControl};

    fn snapshot(name: &str, n: [usize; 3]) -> Snapshot {
        let sim = make_problem(name)
            .unwrap()
            .with_resolution(n)
            .simulation(Scheme::default(), TimeControl::default())
            .unwrap();
        Snapshot::from_simulation(&sim).unwrap()
    }

    #[test]
    fn header_round_trips() {
        let s = snapshot("orszag-tang", [6, 5, 1]);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# time=0.0000000000000000e0\n# nx=6 ny=5 nz=1\n# gamma="));
        let back = Snapshot::read_csv(&buf[..]).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_is_idempotent_to_the_byte() {
        let s = snapshot("rotor", [7, 9, 1]);
        let mut first = Vec::new();
        s.write_csv(&mut first).unwrap();
        let mut second = Vec::new();
        Snapshot::read_csv(&first[..]).unwrap().write_csv(&mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn uniform_field_gives_identical_rows() {
        let s = snapshot("windtunnel", [12, 4, 1]);
        assert!(s.rows.len() < 48, "solid cells are skipped");
        for row in &s.rows {
            assert_eq!(row[3..], s.rows[0][3..]);
        }
    }

    #[test]
    fn rows_are_x_fastest() {
        let s = snapshot("orszag-tang", [3, 2, 1]);
        let xy: Vec<(f64, f64)> = s.rows.iter().map(|r| (r[0], r[1])).collect();
        assert!(xy[0].0 < xy[1].0 && xy[1].0 < xy[2].0);
        assert_eq!(xy[0].1, xy[2].1);
        assert!(xy[3].1 > xy[0].1);
    }

    #[test]
    fn binary_round_trip() {
        let s = snapshot("blast3d", [3, 4, 5]);
        let mut buf = Vec::new();
        s.write_bin(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 6 * 8 + 60 * 12 * 8);
        assert_eq!(&buf[..8], b"ESMHDSNP");
        assert_eq!(Snapshot::read_bin(&buf[..]).unwrap(), s);
        buf[0] = b'X';
        assert!(Snapshot::read_bin(&buf[..]).is_err());
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(Snapshot::read_csv("# nx=1 ny=1 nz=1\n# gamma=1.4\n".as_bytes()).is_err());
        assert!(Snapshot::read_csv("# time=0\n# nx=1 ny=1 nz=1\n# gamma=1.4\n1,2,3\n".as_bytes()).is_err());
        assert_eq!("bin".parse::<SnapshotFormat>().unwrap(), SnapshotFormat::Bin);
        assert!("hdf5".parse::<SnapshotFormat>().is_err());
    }
}
