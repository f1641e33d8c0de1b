//! File formats: potential CSVs, parameter-triple JSON, z-lists, and the
//! derived CSV layouts. All CSVs use `.` decimals, LF endings, UTF-8.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use dirac_echo::gbdt::GbdtParams;
use dirac_echo::grid::{grid_from_samples, SampledFunction};
use dirac_echo::potential::DynamicalPotential;
use num_complex::Complex64;
use serde::Deserialize;

use crate::CliError;

type C64 = Complex64;

/// Parameter-triple file: `n`, row-major `A`, and the generator columns,
/// all complex entries as `[re, im]` pairs.
#[derive(Debug, Deserialize)]
pub struct ParamsFile {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<[f64; 2]>,
    pub theta1: Vec<[f64; 2]>,
    pub theta2: Vec<[f64; 2]>,
}

pub fn load_params(path: &Path) -> Result<GbdtParams, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("params {}: {e}", path.display())))?;
    let file: ParamsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("params {}: {e}", path.display())))?;
    if file.a.len() != file.n * file.n
        || file.theta1.len() != file.n
        || file.theta2.len() != file.n
    {
        return Err(CliError::parse(format!(
            "params {}: expected {}x{} A and {}-entry generators",
            path.display(),
            file.n,
            file.n,
            file.n
        )));
    }
    let to_c = |e: &[f64; 2]| C64::new(e[0], e[1]);
    let a: Vec<C64> = file.a.iter().map(to_c).collect();
    let t1: Vec<C64> = file.theta1.iter().map(to_c).collect();
    let t2: Vec<C64> = file.theta2.iter().map(to_c).collect();
    GbdtParams::from_entries(file.n, &a, &t1, &t2).map_err(CliError::from)
}

/// z-list: JSON array of `[re, im]` pairs.
pub fn load_z_list(path: &Path) -> Result<Vec<C64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("z-list {}: {e}", path.display())))?;
    let raw: Vec<[f64; 2]> = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("z-list {}: {e}", path.display())))?;
    Ok(raw.iter().map(|e| C64::new(e[0], e[1])).collect())
}

/// Evolution-form potential CSV: header `x,p,q` (the inversion output
/// layout `x,p,q,re_v,im_v` is accepted too; extra columns are ignored).
pub fn load_dynamical_potential(path: &Path) -> Result<DynamicalPotential, CliError> {
    let file = File::open(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let reader = BufReader::new(file);
    let mut xs = Vec::new();
    let mut ps = Vec::new();
    let mut qs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 {
            if line != "x,p,q" && line != "x,p,q,re_v,im_v" {
                return Err(CliError::parse(format!(
                    "{}: expected header 'x,p,q' (or 'x,p,q,re_v,im_v'), got '{line}'",
                    path.display()
                )));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(CliError::parse(format!(
                "{}: line {} has {} fields",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64, CliError> {
            s.trim()
                .parse()
                .map_err(|e| CliError::parse(format!("{}: line {}: {what}: {e}", path.display(), lineno + 1)))
        };
        xs.push(parse(fields[0], "x")?);
        ps.push(parse(fields[1], "p")?);
        qs.push(parse(fields[2], "q")?);
    }
    let grid = grid_from_samples(&xs).map_err(CliError::from)?;
    let p = SampledFunction::new(grid.clone(), ps.iter().map(|&v| C64::new(v, 0.0)).collect())
        .map_err(CliError::from)?;
    let q = SampledFunction::new(grid, qs.iter().map(|&v| C64::new(v, 0.0)).collect())
        .map_err(CliError::from)?;
    DynamicalPotential::from_samples(p, q, None).map_err(CliError::from)
}

/// Core sampled-function CSV (`x,re,im`).
pub fn load_sampled(path: &Path) -> Result<SampledFunction, CliError> {
    let file = File::open(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    SampledFunction::read_csv(BufReader::new(file)).map_err(CliError::from)
}

pub fn writer(path: &Path) -> Result<BufWriter<File>, CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::compute(format!("cannot create {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

pub fn write_sampled(path: &Path, f: &SampledFunction) -> Result<(), CliError> {
    let mut w = writer(path)?;
    f.write_csv(&mut w).map_err(CliError::from)?;
    w.flush().map_err(|e| CliError::compute(e.to_string()))
}

/// Inversion output layout `x,p,q,re_v,im_v`.
pub fn write_potential_csv(
    path: &Path,
    xs: impl Iterator<Item = f64>,
    p: &SampledFunction,
    q: &SampledFunction,
    v: &SampledFunction,
) -> Result<(), CliError> {
    let mut w = writer(path)?;
    writeln!(w, "x,p,q,re_v,im_v").map_err(|e| CliError::compute(e.to_string()))?;
    for (k, x) in xs.enumerate() {
        // + 0.0 folds negative zeros
        writeln!(
            w,
            "{},{},{},{},{}",
            x,
            p.value(k).re + 0.0,
            q.value(k).re + 0.0,
            v.value(k).re + 0.0,
            v.value(k).im + 0.0
        )
        .map_err(|e| CliError::compute(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::compute(e.to_string()))
}
