//! Field serialization: a JSON header next to a flat little-endian complex64 payload.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::field::SampledField;
use super::grid::PeriodicGrid;
use super::multiplier::FourierMultiplier;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldHeader {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(rename = "L")]
    pub period: f64,
    pub band_limit: Option<f64>,
}

fn paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("json"), base.with_extension("bin"))
}

/// Writes `<base>.json` and `<base>.bin`.
pub fn write_field(base: &Path, f: &SampledField) -> Result<()> {
    let (hp, bp) = paths(base);
    let header = FieldHeader { n: f.grid.dim(), size: f.grid.size(), period: f.grid.period(), band_limit: f.band_limit };
    fs::write(hp, serde_json::to_vec_pretty(&header)?)?;
    let mut w = BufWriter::new(fs::File::create(bp)?);
    for z in &f.data {
        w.write_all(&(z.re as f32).to_le_bytes())?;
        w.write_all(&(z.im as f32).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field(base: &Path) -> Result<SampledField> {
    let (hp, bp) = paths(base);
    let header: FieldHeader = serde_json::from_slice(&fs::read(hp)?)?;
    let grid = PeriodicGrid::new(header.n, header.size, header.period)?;
    let bytes = fs::read(bp)?;
    if bytes.len() != 8 * grid.len() {
        return Err(Error::InvalidGrid(format!("payload has {} bytes, expected {}", bytes.len(), 8 * grid.len())));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    SampledField::new(grid, data, header.band_limit)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceTimeManifest {
    pub times: Vec<f64>,
    pub files: Vec<String>,
}

/// Writes one field per time slice plus a `manifest.json` index.
pub fn write_space_time(dir: &Path, times: &[f64], slices: &[SampledField]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(slices.len());
    for (i, f) in slices.iter().enumerate() {
        let name = format!("slice_{i:04}");
        write_field(&dir.join(&name), f)?;
        files.push(name);
    }
    let m = SpaceTimeManifest { times: times.to_vec(), files };
    fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(&m)?)?;
    Ok(())
}

/// Dumps the symbol on the grid lattice as CSV rows `xi_1,..,xi_n,re,im`.
pub fn write_symbol_csv(path: &Path, grid: &PeriodicGrid, m: &FourierMultiplier) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut head: Vec<String> = (1..=grid.dim()).map(|a| format!("xi{a}")).collect();
    head.push("re".into());
    head.push("im".into());
    w.write_record(&head)?;
    for i in 0..grid.len() {
        let xi = grid.freq(i);
        let v = m.eval(&xi);
        let mut row: Vec<String> = xi[..grid.dim()].iter().map(|x| x.to_string()).collect();
        row.push(v.re.to_string());
        row.push(v.im.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("hfio-io-{tag}-{}", std::process::id()));
        fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn roundtrip_single_precision() {
        let g = PeriodicGrid::new(2, 16, 2.0).unwrap();
        let f = SampledField::plane_wave(g, [1, 1, 0]);
        let d = tmpdir("rt");
        write_field(&d.join("f"), &f).unwrap();
        let h = read_field(&d.join("f")).unwrap();
        assert_eq!(h.grid, g);
        assert_eq!(h.band_limit, f.band_limit);
        for (a, b) in f.data.iter().zip(&h.data) {
            assert!((a - b).norm() < 1e-6);
        }
        let header: serde_json::Value = serde_json::from_slice(&fs::read(d.join("f.json")).unwrap()).unwrap();
        assert_eq!(header["N"], 16);
        fs::remove_dir_all(d).ok();
    }

    #[test]
    fn symbol_csv_has_one_row_per_lattice_point() {
        let g = PeriodicGrid::new(2, 8, 2.0).unwrap();
        let d = tmpdir("csv");
        let p = d.join("m.csv");
        write_symbol_csv(&p, &g, &FourierMultiplier::japanese(1.0)).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 65);
        fs::remove_dir_all(d).ok();
    }
}
