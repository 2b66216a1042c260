//! Binary and CSV export of ensembles.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::ensemble::{Method, PathEnsemble, SimulationGrid};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"FGP1";

impl PathEnsemble {
    /// Header: magic, method (u32), n_paths, n_times, d, seed (u64), t_start, t_end (f64);
    /// then the values as little-endian f64, path-major.
    pub fn write_binary<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        w.write_all(MAGIC)?;
        w.write_all(&self.method.code().to_le_bytes())?;
        for v in [self.n_paths as u64, self.n_times() as u64, self.d as u64, self.seed] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.grid.t_start().to_le_bytes())?;
        w.write_all(&self.grid.t_end().to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(r: R) -> Result<Self> {
        let mut r = BufReader::new(r);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Parse("not an FGP1 ensemble".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let method = Method::from_code(u32::from_le_bytes(b4))?;
        let mut b8 = [0u8; 8];
        let mut u64s = [0u64; 4];
        for v in u64s.iter_mut() {
            r.read_exact(&mut b8)?;
            *v = u64::from_le_bytes(b8);
        }
        let [n_paths, n_times, d, seed] = u64s;
        let mut f = [0f64; 2];
        for v in f.iter_mut() {
            r.read_exact(&mut b8)?;
            *v = f64::from_le_bytes(b8);
        }
        if n_times < 2 {
            return Err(Error::Parse("ensemble needs at least two times".into()));
        }
        let count = n_paths
            .checked_mul(n_times)
            .and_then(|v| v.checked_mul(d))
            .filter(|&v| v < 1 << 32)
            .ok_or_else(|| Error::Parse("implausible ensemble shape".into()))?;
        let mut values = Vec::with_capacity(count as usize);
        for _ in 0..count {
            r.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        let grid = SimulationGrid::raw(f[0], f[1], n_times as usize - 1);
        PathEnsemble::new(grid, d as usize, n_paths as usize, values, seed, method)
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_binary(std::fs::File::create(path)?)
    }

    pub fn load_binary(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_binary(std::fs::File::open(path)?)
    }

    /// Columns `path,t,x1..xd`, one row per path and time.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        let cols: Vec<String> = (1..=self.d).map(|c| format!("x{c}")).collect();
        writeln!(w, "path,t,{}", cols.join(","))?;
        for p in 0..self.n_paths {
            for j in 0..self.n_times() {
                write!(w, "{p},{:?}", self.grid.time(j))?;
                for v in self.point(p, j) {
                    write!(w, ",{v:?}")?;
                }
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV layout back; seed and method are not stored there.
    pub fn read_csv<R: Read>(r: R, seed: u64, method: Method) -> Result<Self> {
        let r = BufReader::new(r);
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))??;
        let d = header.split(',').count().checked_sub(2).filter(|&d| d > 0)
            .ok_or_else(|| Error::Parse("CSV header needs path,t,x1..".into()))?;
        let mut values = Vec::new();
        let mut times = Vec::new();
        let mut n_paths = 0;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + 2 {
                return Err(Error::Parse(format!("bad CSV row '{line}'")));
            }
            let p: usize = fields[0].parse().map_err(|_| Error::Parse("bad path index".into()))?;
            let t: f64 = fields[1].parse().map_err(|_| Error::Parse("bad time".into()))?;
            if p == 0 {
                times.push(t);
            }
            n_paths = n_paths.max(p + 1);
            for f in &fields[2..] {
                values.push(f.parse::<f64>().map_err(|_| Error::Parse(format!("bad value '{f}'")))?);
            }
        }
        if times.len() < 2 {
            return Err(Error::Parse("CSV needs at least two times".into()));
        }
        let grid = SimulationGrid::raw(times[0], times[times.len() - 1], times.len() - 1);
        PathEnsemble::new(grid, d, n_paths, values, seed, method)
    }
}
