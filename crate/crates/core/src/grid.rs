//! Uniform grids and sampled complex functions, plus their CSV form.
//!
//! The CSV layout is `x,re,im` with one row per node; real-valued functions
//! emit `im = 0`. Readers reject grids whose relative step deviation exceeds
//! 1e-9.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum relative step deviation a CSV reader accepts.
pub const UNIFORMITY_TOL: f64 = 1e-9;

/// Uniform grid `x0 + k*h`, `k = 0..n_points`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x0: f64,
    h: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x0: f64, h: f64, n_points: usize) -> Result<Self> {
        if h.is_nan() || h <= 0.0 || !h.is_finite() {
            return Err(Error::Parameter(format!("grid step must be positive, got {h}")));
        }
        if n_points < 2 {
            return Err(Error::Parameter(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        if !x0.is_finite() {
            return Err(Error::Parameter("grid origin must be finite".into()));
        }
        Ok(Grid { x0, h, n_points })
    }

    /// Grid spanning `[a, b]` with `n_points` nodes.
    pub fn span(a: f64, b: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::Parameter(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        Grid::new(a, (b - a) / (n_points - 1) as f64, n_points)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.h
    }

    pub fn last(&self) -> f64 {
        self.node(self.n_points - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.node(k))
    }
}

/// Complex values sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Parameter(format!("non-finite sample {v}")));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        SampledFunction::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> Complex64 {
        self.values[k]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Linear interpolation, clamped to the grid span.
    pub fn eval(&self, x: f64) -> Complex64 {
        let g = &self.grid;
        let s = (x - g.x0()) / g.h();
        if s <= 0.0 {
            return self.values[0];
        }
        let last = (g.len() - 1) as f64;
        if s >= last {
            return self.values[g.len() - 1];
        }
        let k = s.floor() as usize;
        let w = s - k as f64;
        self.values[k] * (1.0 - w) + self.values[k + 1] * w
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,re,im")?;
        for (x, v) in self.grid.nodes().zip(&self.values) {
            writeln!(w, "{},{},{}", x, v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if lineno == 0 {
                if line != "x,re,im" {
                    return Err(Error::Parse(format!(
                        "expected header 'x,re,im', got '{line}'"
                    )));
                }
                continue;
            }
            let mut fields = line.split(',');
            let mut next = |name: &str| -> Result<f64> {
                let token = fields
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing {name}", lineno + 1)))?
                    .trim();
                token.parse::<f64>().map_err(|e| {
                    Error::Parse(format!("line {}: {name} '{token}': {e}", lineno + 1))
                })
            };
            xs.push(next("x")?);
            let re = next("re")?;
            let im = next("im")?;
            values.push(Complex64::new(re, im));
        }
        let grid = grid_from_samples(&xs)?;
        SampledFunction::new(grid, values)
    }
}

/// Validates that sampled abscissae form a uniform grid and returns it.
pub fn grid_from_samples(xs: &[f64]) -> Result<Grid> {
    if xs.len() < 2 {
        return Err(Error::Parse("need at least 2 rows".into()));
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Parse("grid abscissae must be strictly increasing".into()));
    }
    for k in 1..xs.len() {
        let step = xs[k] - xs[k - 1];
        if (step - h).abs() > UNIFORMITY_TOL * h.abs().max(1.0) {
            return Err(Error::Parse(format!(
                "non-uniform grid: step {} at row {} deviates from {}",
                step,
                k + 1,
                h
            )));
        }
    }
    Grid::new(xs[0], h, xs.len())
}
