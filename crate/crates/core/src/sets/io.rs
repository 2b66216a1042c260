use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::WeightedSet;
use crate::error::{Error, Result};
use crate::metric::{MetricSpec, Points};
use crate::text::{fmt_f64, parse_f64};

impl WeightedSet {
    /// Writes `x1..xd,mass` rows. Tree structure is not kept; reloaded sets use the coordinates.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let head: Vec<String> = (1..=self.dim()).map(|k| format!("x{k}")).collect();
        writeln!(w, "{},mass", head.join(","))?;
        for (p, m) in self.points().iter().zip(self.masses()) {
            let row: Vec<String> = p.iter().map(|v| fmt_f64(*v)).collect();
            writeln!(w, "{},{}", row.join(","), fmt_f64(*m))?;
        }
        Ok(())
    }

    /// Reads `x1..xd,mass` rows; the ambient box is the bounding box of the atoms.
    pub fn read_csv<R: Read>(r: R, metric: MetricSpec) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let head = lines.next().ok_or_else(|| Error::Parse("empty set file".into()))??;
        let cols = head.split(',').count();
        if cols < 2 || head.split(',').last() != Some("mass") {
            return Err(Error::Parse(format!("bad header '{head}'")));
        }
        let dim = cols - 1;
        let (mut coords, mut masses) = (Vec::new(), Vec::new());
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals = line.split(',').map(|v| parse_f64(v.trim(), "set csv")).collect::<Result<Vec<_>>>()?;
            if vals.len() != cols {
                return Err(Error::Parse(format!("expected {cols} columns in '{line}'")));
            }
            coords.extend_from_slice(&vals[..dim]);
            masses.push(vals[dim]);
        }
        let points = Points::new(dim, coords)?;
        let ambient = (0..dim)
            .map(|k| {
                points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])))
            })
            .collect();
        Self::new(points, masses, metric, ambient)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn load_csv(path: impl AsRef<Path>, metric: MetricSpec) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, metric)
    }
}
