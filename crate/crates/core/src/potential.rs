//! Potentials of the two Dirac system forms and the dictionary between them.
//!
//! The evolution form carries a real pair `(p, q)` through the symmetric
//! matrix `V = [[p, q], [q, -p]]`; the frequency-domain form carries one
//! complex function `v = i q - p`. Both directions of the dictionary are
//! pure sign flips and component selections, so round trips are exact.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SampledFunction;

/// A real-valued coefficient: a closed-form callable or linearly
/// interpolated samples. Closures are preferred by the numeric modules;
/// samples come from CSV inputs.
#[derive(Clone)]
pub enum RealCoefficient {
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Samples(SampledFunction),
}

impl RealCoefficient {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RealCoefficient::Closure(f) => f(x),
            RealCoefficient::Samples(s) => s.eval(x).re,
        }
    }
}

impl std::fmt::Debug for RealCoefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RealCoefficient::Closure(_) => write!(f, "RealCoefficient::Closure"),
            RealCoefficient::Samples(s) => write!(f, "RealCoefficient::Samples({} nodes)", s.len()),
        }
    }
}

#[derive(Clone)]
pub enum ComplexCoefficient {
    Closure(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
    Samples(SampledFunction),
}

impl ComplexCoefficient {
    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            ComplexCoefficient::Closure(f) => f(x),
            ComplexCoefficient::Samples(s) => s.eval(x),
        }
    }
}

impl std::fmt::Debug for ComplexCoefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComplexCoefficient::Closure(_) => write!(f, "ComplexCoefficient::Closure"),
            ComplexCoefficient::Samples(s) => {
                write!(f, "ComplexCoefficient::Samples({} nodes)", s.len())
            }
        }
    }
}

/// Potential of the evolution (time-domain) system: the real pair `(p, q)`
/// together with the norm bound `M1 >= sup ||V(x)||` (pointwise
/// `||V|| = sqrt(p^2 + q^2)`), which fixes `M = 2 sqrt(2) M1` for the
/// growth estimates.
#[derive(Debug, Clone)]
pub struct DynamicalPotential {
    p: RealCoefficient,
    q: RealCoefficient,
    m1: f64,
}

impl DynamicalPotential {
    pub fn new(p: RealCoefficient, q: RealCoefficient, m1: f64) -> Result<Self> {
        if m1.is_nan() || m1 < 0.0 || !m1.is_finite() {
            return Err(Error::Parameter(format!("norm bound M1 must be finite and >= 0, got {m1}")));
        }
        Ok(DynamicalPotential { p, q, m1 })
    }

    pub fn from_closures(
        p: impl Fn(f64) -> f64 + Send + Sync + 'static,
        q: impl Fn(f64) -> f64 + Send + Sync + 'static,
        m1: f64,
    ) -> Result<Self> {
        DynamicalPotential::new(
            RealCoefficient::Closure(Arc::new(p)),
            RealCoefficient::Closure(Arc::new(q)),
            m1,
        )
    }

    /// Builds from sampled `p`, `q` on a common grid; `m1` defaults to the
    /// sampled sup of `sqrt(p^2 + q^2)`.
    pub fn from_samples(p: SampledFunction, q: SampledFunction, m1: Option<f64>) -> Result<Self> {
        if p.grid() != q.grid() {
            return Err(Error::GridMismatch("p and q sampled on different grids".into()));
        }
        let sup = p
            .values()
            .iter()
            .zip(q.values())
            .map(|(pv, qv)| (pv.re * pv.re + qv.re * qv.re).sqrt())
            .fold(0.0, f64::max);
        DynamicalPotential::new(
            RealCoefficient::Samples(p),
            RealCoefficient::Samples(q),
            m1.unwrap_or(sup),
        )
    }

    pub fn zero() -> Self {
        DynamicalPotential::from_closures(|_| 0.0, |_| 0.0, 0.0).unwrap()
    }

    pub fn p(&self, x: f64) -> f64 {
        self.p.eval(x)
    }

    pub fn q(&self, x: f64) -> f64 {
        self.q.eval(x)
    }

    /// Pointwise matrix norm of `V(x)`.
    pub fn matrix_norm(&self, x: f64) -> f64 {
        let (p, q) = (self.p(x), self.q(x));
        (p * p + q * q).sqrt()
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    /// The growth rate `M = 2 sqrt(2) M1`.
    pub fn m(&self) -> f64 {
        2.0 * std::f64::consts::SQRT_2 * self.m1
    }
}

/// Potential `v` of the frequency-domain system; `V = [[0, v], [conj v, 0]]`
/// is Hermitian by construction.
#[derive(Debug, Clone)]
pub struct SpectralPotential {
    v: ComplexCoefficient,
}

impl SpectralPotential {
    pub fn new(v: ComplexCoefficient) -> Self {
        SpectralPotential { v }
    }

    pub fn from_closure(v: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        SpectralPotential::new(ComplexCoefficient::Closure(Arc::new(v)))
    }

    pub fn from_samples(v: SampledFunction) -> Self {
        SpectralPotential::new(ComplexCoefficient::Samples(v))
    }

    pub fn zero() -> Self {
        SpectralPotential::from_closure(|_| Complex64::new(0.0, 0.0))
    }

    pub fn v(&self, x: f64) -> Complex64 {
        self.v.eval(x)
    }
}

/// `v = i q - p`, pointwise.
pub fn dyn_to_spec(pot: &DynamicalPotential) -> SpectralPotential {
    let p = pot.p.clone();
    let q = pot.q.clone();
    SpectralPotential::from_closure(move |x| Complex64::new(-p.eval(x), q.eval(x)))
}

/// Sampled variant of [`dyn_to_spec`]: both inputs must share one grid.
pub fn dyn_to_spec_sampled(p: &SampledFunction, q: &SampledFunction) -> Result<SampledFunction> {
    if p.grid() != q.grid() {
        return Err(Error::GridMismatch("p and q sampled on different grids".into()));
    }
    let values = p
        .values()
        .iter()
        .zip(q.values())
        .map(|(pv, qv)| Complex64::new(-pv.re, qv.re))
        .collect();
    SampledFunction::new(p.grid().clone(), values)
}

/// `p = -Re v`, `q = Im v`; inverse of [`dyn_to_spec`], exactly.
pub fn spec_to_dyn(v: &SpectralPotential, m1: f64) -> Result<DynamicalPotential> {
    let v = v.v.clone();
    let vp = v.clone();
    DynamicalPotential::new(
        RealCoefficient::Closure(Arc::new(move |x| -vp.eval(x).re)),
        RealCoefficient::Closure(Arc::new(move |x| v.eval(x).im)),
        m1,
    )
}

/// Sampled variant of [`spec_to_dyn`].
pub fn spec_to_dyn_sampled(v: &SampledFunction) -> (SampledFunction, SampledFunction) {
    let p = v.map(|w| Complex64::new(-w.re, 0.0));
    let q = v.map(|w| Complex64::new(w.im, 0.0));
    (p, q)
}
