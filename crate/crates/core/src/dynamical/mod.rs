//! Time-domain side: the evolution system `i u_t + J u_x + V u = 0` on the
//! quarter-plane, driven by a boundary control `u1(0,t) = f(t)`, with two
//! independent solvers and extraction of the response kernel from boundary
//! data. The input-output map is `u2(0,.) = i f + r * f`.

mod characteristics;
mod deconvolve;
mod neumann;
mod s_operator;

use std::io::Write as IoWrite;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::linalg::C64;
use crate::potential::DynamicalPotential;

pub use characteristics::{characteristics_march, characteristics_solve};
pub use deconvolve::{extract_response, DeconvolutionReport};
pub use neumann::{neumann_solve, NeumannInfo};
pub use s_operator::s_operator;

/// Boundary control `f` with its growth bounds: `sup ||f(t) [1; i]|| < c0`
/// and the same for `f'` with `c0_tilde`. `f` vanishes for `t <= 0`.
#[derive(Clone)]
pub struct BoundaryControl {
    f: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
    c0: f64,
    c0_tilde: f64,
    label: String,
}

impl std::fmt::Debug for BoundaryControl {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BoundaryControl({}, c0={}, c0~={})", self.label, self.c0, self.c0_tilde)
    }
}

impl BoundaryControl {
    pub fn new(
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        c0: f64,
        c0_tilde: f64,
        label: impl Into<String>,
    ) -> Self {
        BoundaryControl {
            f: Arc::new(f),
            c0,
            c0_tilde,
            label: label.into(),
        }
    }

    /// `f(t) = t^2 e^{-t}`: vanishes to first order at 0, `f''(0) = 2`.
    pub fn t2exp() -> Self {
        let f = |t: f64| Complex64::new(t * t * (-t).exp(), 0.0);
        let (c0, c0t) = scan_bounds(&f);
        BoundaryControl::new(f, c0, c0t, "t2exp")
    }

    /// `f(t) = t^2 e^{-t^2}`.
    pub fn t2gauss() -> Self {
        let f = |t: f64| Complex64::new(t * t * (-t * t).exp(), 0.0);
        let (c0, c0t) = scan_bounds(&f);
        BoundaryControl::new(f, c0, c0t, "t2gauss")
    }

    /// Builds a control from samples, checking the smoothness preconditions
    /// `f(0) = 0`, `f'(0) = 0` numerically at the grid scale.
    pub fn from_samples(samples: SampledFunction, label: impl Into<String>) -> Result<Self> {
        let h = samples.grid().h();
        let scale = samples.sup_norm().max(1e-300);
        let f0 = samples.value(0).norm();
        if f0 > 1e-9 * scale {
            return Err(Error::Parameter(format!("control must vanish at t = 0, got |f(0)| = {f0:.3e}")));
        }
        if samples.len() >= 3 {
            let d0 = ((samples.value(1) - samples.value(0)) / h).norm();
            if d0 > 0.05 * scale / h.sqrt() && d0 > 1e-6 {
                // crude one-sided slope test at the grid scale
                let d_ref = ((samples.value(2) - samples.value(1)) / h).norm();
                if d0 > 0.5 * d_ref.max(1e-12) && d0 * h > 1e-6 * scale {
                    return Err(Error::Parameter(format!(
                        "control slope at t = 0 looks nonzero: |f'(0)| ~ {d0:.3e}"
                    )));
                }
            }
        }
        let sf = samples.clone();
        let f = move |t: f64| sf.eval(t);
        let (c0, c0t) = scan_bounds(&f);
        Ok(BoundaryControl::new(f, c0, c0t, label))
    }

    /// Control value; zero for `t <= 0` by convention.
    pub fn f(&self, t: f64) -> Complex64 {
        if t <= 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            (self.f)(t)
        }
    }

    /// Numeric second derivative at the grid scale (one-sided at `t = 0`).
    pub fn f_second(&self, t: f64, h: f64) -> Complex64 {
        if t < 0.5 * h {
            (self.f(t) * 2.0 - self.f(t + h) * 5.0 + self.f(t + 2.0 * h) * 4.0 - self.f(t + 3.0 * h))
                / (h * h)
        } else {
            (self.f(t + h) - self.f(t) * 2.0 + self.f(t - h)) / (h * h)
        }
    }

    /// Richardson-extrapolated `f''(0)`: removes the leading `h^2` bias of
    /// the one-sided stencil, so controls with genuinely vanishing
    /// curvature read as zero at the grid scale.
    pub fn f_second_at_zero(&self, h: f64) -> Complex64 {
        (self.f_second(0.0, h) * 4.0 - self.f_second(0.0, 2.0 * h)) / 3.0
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn c0_tilde(&self) -> f64 {
        self.c0_tilde
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Dense scan of `sup ||f [1;i]|| = sqrt(2) sup |f|` and the analogue for a
/// difference-quotient `f'`, with a small safety factor.
fn scan_bounds(f: &(impl Fn(f64) -> Complex64 + ?Sized)) -> (f64, f64) {
    let n = 60_000;
    let t_max = 60.0;
    let dt = t_max / n as f64;
    let mut sup_f: f64 = 0.0;
    let mut sup_df: f64 = 0.0;
    let mut prev = f(0.0);
    for k in 1..=n {
        let t = k as f64 * dt;
        let val = f(t);
        sup_f = sup_f.max(val.norm());
        sup_df = sup_df.max(((val - prev) / dt).norm());
        prev = val;
    }
    let s2 = std::f64::consts::SQRT_2;
    (s2 * sup_f * (1.0 + 1e-6), s2 * sup_df * (1.0 + 1e-3))
}

/// Solution of the evolution system on a square lattice with common step
/// `h` in `x` and `t`; node `(i, j)` is `(x, t) = (i h, j h)`.
#[derive(Debug, Clone)]
pub struct WaveField {
    h: f64,
    nx: usize,
    nt: usize,
    u1: Vec<C64>,
    u2: Vec<C64>,
}

impl WaveField {
    pub(crate) fn from_parts(h: f64, nx: usize, nt: usize, u1: Vec<C64>, u2: Vec<C64>) -> Self {
        debug_assert_eq!(u1.len(), nx * nt);
        debug_assert_eq!(u2.len(), nx * nt);
        WaveField { h, nx, nt, u1, u2 }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of nodes along `x`.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Number of nodes along `t`.
    pub fn nt(&self) -> usize {
        self.nt
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn u1(&self, i: usize, j: usize) -> C64 {
        self.u1[self.idx(i, j)]
    }

    pub fn u2(&self, i: usize, j: usize) -> C64 {
        self.u2[self.idx(i, j)]
    }

    pub fn u1_slice(&self) -> &[C64] {
        &self.u1
    }

    pub fn u2_slice(&self) -> &[C64] {
        &self.u2
    }

    /// Trace `u2(0, .)` as a sampled function of `t`.
    pub fn boundary_trace_u2(&self) -> Result<SampledFunction> {
        let grid = Grid::new(0.0, self.h, self.nt)?;
        let values = (0..self.nt).map(|j| self.u2(0, j)).collect();
        SampledFunction::new(grid, values)
    }

    pub fn boundary_trace_u1(&self) -> Result<SampledFunction> {
        let grid = Grid::new(0.0, self.h, self.nt)?;
        let values = (0..self.nt).map(|j| self.u1(0, j)).collect();
        SampledFunction::new(grid, values)
    }

    /// Pointwise norm `||u(x,t)||`.
    pub fn norm_at(&self, i: usize, j: usize) -> f64 {
        (self.u1(i, j).norm_sqr() + self.u2(i, j).norm_sqr()).sqrt()
    }

    /// Sup distance between two fields on the common lattice.
    pub fn sup_distance(&self, other: &WaveField) -> f64 {
        assert_eq!(self.nx, other.nx);
        assert_eq!(self.nt, other.nt);
        self.u1
            .iter()
            .zip(&other.u1)
            .chain(self.u2.iter().zip(&other.u2))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// CSV layout `x,t,re_u1,im_u1,re_u2,im_u2`.
    pub fn write_csv<W: IoWrite>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,t,re_u1,im_u1,re_u2,im_u2")?;
        for j in 0..self.nt {
            for i in 0..self.nx {
                let (a, b) = (self.u1(i, j), self.u2(i, j));
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    i as f64 * self.h,
                    j as f64 * self.h,
                    a.re,
                    a.im,
                    b.re,
                    b.im
                )?;
            }
        }
        Ok(())
    }
}

/// How a response function was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseOrigin {
    Extracted,
    Explicit,
    InverseFourier,
}

/// The convolution kernel `r` of the input-output map, sampled on `[0, T]`;
/// `r(t) = 0` for `t < 0` by convention.
#[derive(Debug, Clone)]
pub struct ResponseFunction {
    samples: SampledFunction,
    origin: ResponseOrigin,
}

impl ResponseFunction {
    pub fn new(samples: SampledFunction, origin: ResponseOrigin) -> Self {
        ResponseFunction { samples, origin }
    }

    pub fn from_closure(
        grid: Grid,
        f: impl Fn(f64) -> Complex64,
        origin: ResponseOrigin,
    ) -> Result<Self> {
        Ok(ResponseFunction::new(SampledFunction::from_fn(grid, f)?, origin))
    }

    pub fn samples(&self) -> &SampledFunction {
        &self.samples
    }

    pub fn origin(&self) -> ResponseOrigin {
        self.origin
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if t < 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.samples.eval(t)
        }
    }
}

/// Diagnostic report of the a-priori growth estimates and causality.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    /// `max over nodes of ||u(x,t)|| e^{-Mt} / c0`; at most `1 + tol` for a
    /// sound solve.
    pub growth_ratio: f64,
    /// `max over t < x of ||u(x,t)||`; the domain-of-influence residual.
    pub causality_residual: f64,
    pub m: f64,
    pub c0: f64,
}

/// Checks the growth bound `||u|| <= c0 e^{Mt}` (`M = 2 sqrt(2) M1`) and the
/// finiteness of the domain of influence on a solved field.
pub fn verify_estimates(
    field: &WaveField,
    ctrl: &BoundaryControl,
    pot: &DynamicalPotential,
) -> EstimateReport {
    let m = pot.m();
    let c0 = ctrl.c0();
    let mut ratio: f64 = 0.0;
    let mut causality: f64 = 0.0;
    for j in 0..field.nt() {
        let t = j as f64 * field.h();
        let damp = (-m * t).exp();
        for i in 0..field.nx() {
            let norm = field.norm_at(i, j);
            ratio = ratio.max(norm * damp / c0);
            if j < i {
                causality = causality.max(norm);
            }
        }
    }
    EstimateReport {
        growth_ratio: ratio,
        causality_residual: causality,
        m,
        c0,
    }
}
