//! Recovery of the potential from the accelerant through positive
//! structured convolution operators `S_l = I + int_0^l omega(x - t) . dt`.
//!
//! Discrete positivity of the Nystrom matrices is the sole admissibility
//! gate: a non-positive pivot or eigenvalue means the input is not a
//! response function of this class. The per-node solves are independent and
//! run in parallel over a shared read-only accelerant.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::amplitude::{accelerant_from_response, Accelerant};
use crate::dynamical::ResponseFunction;
use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::linalg::{cholesky_in_place, cholesky_solve_leading, hermitian_eigenvalues, C64, I, ONE};
use crate::potential::{spec_to_dyn_sampled, DynamicalPotential};

const SQRT1_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Nystrom discretization of `S_l` on `n` uniform nodes with trapezoid
/// weights, Hermitian-symmetrized.
#[derive(Debug, Clone)]
pub struct StructuredOperatorMatrix {
    l: f64,
    n: usize,
    matrix: DMatrix<C64>,
    min_eigenvalue: f64,
}

impl StructuredOperatorMatrix {
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// `||M - M^H||` in the max-entry norm; zero by construction up to
    /// rounding.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for c in 0..self.n {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }
}

/// Hermitian-symmetrized Nystrom entry
/// `delta_rc + h sqrt(w_r w_c) omega((r-c) h)` with trapezoid coefficients
/// `w` (1/2 at the ends); similar to the plain `delta + w_c omega` matrix
/// via `diag(w)^{1/2}`, so both share one spectrum.
fn nystrom_entry(om: &[C64], h: f64, n: usize, r: usize, c: usize) -> C64 {
    let wr = if r == 0 || r == n - 1 { 0.5f64 } else { 1.0 };
    let wc = if c == 0 || c == n - 1 { 0.5f64 } else { 1.0 };
    let omega = if r >= c { om[r - c] } else { om[c - r].conj() };
    let mut entry = omega * (h * (wr * wc).sqrt());
    if r == c {
        entry += ONE;
    }
    entry
}

/// Builds the Nystrom matrix of `S_l` and certifies positivity by a dense
/// Hermitian eigensolve; a non-positive smallest eigenvalue is a hard
/// error.
pub fn build_structured_operator(
    acc: &Accelerant,
    l: f64,
    n: usize,
) -> Result<StructuredOperatorMatrix> {
    if n < 8 {
        return Err(Error::Parameter(format!("need at least 8 nodes, got {n}")));
    }
    let extent = acc.grid().last();
    if l.is_nan() || l <= 0.0 || l > extent * (1.0 + 1e-12) {
        return Err(Error::Parameter(format!(
            "window l = {l} must lie in (0, {extent}]"
        )));
    }
    let h = l / (n - 1) as f64;
    let om: Vec<C64> = (0..n).map(|d| acc.omega_at(d as f64 * h)).collect();
    let matrix = DMatrix::<C64>::from_fn(n, n, |r, c| nystrom_entry(&om, h, n, r, c));
    let eigs = hermitian_eigenvalues(&matrix)?;
    let min_eigenvalue = eigs[0];
    if min_eigenvalue <= 0.0 {
        return Err(Error::NotAValidAccelerant(format!(
            "smallest eigenvalue {min_eigenvalue:.6e} of S_{l} is not positive"
        )));
    }
    Ok(StructuredOperatorMatrix {
        l,
        n,
        matrix,
        min_eigenvalue,
    })
}

/// Shared data for the per-node recovery solves on the global grid over
/// `[0, 2L]`.
///
/// The trapezoid Nystrom matrix of `S_{2x}` on nodes `0..=K-1` is the
/// uniform-weight matrix `A = I + h Omega` minus a rank-2 end-weight
/// correction, and the leading principal blocks of `A` are nested, so one
/// Cholesky factorization of the largest block serves every node through
/// leading-block triangular solves plus a 2x2 Woodbury update.
struct RecoveryContext {
    h: f64,
    /// `omega` at the non-negative grid offsets.
    om: Vec<C64>,
    /// `s` at the grid nodes.
    s: Vec<C64>,
    /// Row-major Cholesky factor of `A = I + h Omega` on `k_max` nodes.
    chol: Vec<C64>,
    k_max: usize,
}

impl RecoveryContext {
    fn build(h: f64, om: Vec<C64>, s: Vec<C64>, k_max: usize) -> Result<Self> {
        debug_assert!(om.len() >= k_max && s.len() >= k_max);
        let mut chol = vec![C64::new(0.0, 0.0); k_max * k_max];
        for r in 0..k_max {
            let row = &mut chol[r * k_max..(r + 1) * k_max];
            for (c, slot) in row.iter_mut().enumerate().take(r + 1) {
                *slot = om[r - c] * h;
                if r == c {
                    *slot += ONE;
                }
            }
        }
        cholesky_in_place(&mut chol, k_max).map_err(|row| {
            Error::NotAValidAccelerant(format!(
                "S_2x loses positivity near x = {:.6}",
                row as f64 * h / 2.0
            ))
        })?;
        Ok(RecoveryContext { h, om, s, chol, k_max })
    }

    fn from_accelerant(acc: &Accelerant, k_max: usize) -> Result<Self> {
        RecoveryContext::build(
            acc.grid().h(),
            acc.omega().values().to_vec(),
            acc.s().values().to_vec(),
            k_max,
        )
    }

    /// Applies `S_{2x}^{-1}` on nodes `0..K-1` (`K = 2m+1`) to `b`:
    /// `S = A - (h/2) Omega (e_0 e_0^T + e_last e_last^T)`, solved by the
    /// Woodbury identity on the factored `A`.
    fn solve_window(&self, k: usize, b: &mut [C64]) -> Result<()> {
        let n = self.k_max;
        cholesky_solve_leading(&self.chol, n, k, b);
        // U columns: -(h/2) omega(. - edge) at both edges
        let scale = -0.5 * self.h;
        let mut u0: Vec<C64> = (0..k).map(|r| self.om[r] * scale).collect();
        let mut u1: Vec<C64> = (0..k).map(|r| {
            let d = k - 1 - r;
            self.om[d].conj() * scale
        }).collect();
        cholesky_solve_leading(&self.chol, n, k, &mut u0);
        cholesky_solve_leading(&self.chol, n, k, &mut u1);
        // 2x2 capacitance M = I + V^T A^{-1} U with V = [e_0, e_last]
        let m00 = ONE + u0[0];
        let m01 = u1[0];
        let m10 = u0[k - 1];
        let m11 = ONE + u1[k - 1];
        let det = m00 * m11 - m01 * m10;
        if det.norm() < 1e-14 {
            return Err(Error::NotAValidAccelerant(
                "end-weight correction is singular".into(),
            ));
        }
        let v0 = b[0];
        let v1 = b[k - 1];
        let w0 = (m11 * v0 - m01 * v1) / det;
        let w1 = (m00 * v1 - m10 * v0) / det;
        for r in 0..k {
            b[r] -= u0[r] * w0 + u1[r] * w1;
        }
        Ok(())
    }

    /// `theta2(x)` at grid node `m` (`x = m h`): apply `S_{2x}^{-1}` to
    /// `2 s(.)` and to `1`, then integrate against `conj(omega)` with
    /// trapezoid weights.
    fn theta2_at(&self, m: usize) -> Result<[C64; 2]> {
        if m == 0 {
            return Ok([C64::new(-SQRT1_2, 0.0), C64::new(SQRT1_2, 0.0)]);
        }
        let k = 2 * m + 1;
        debug_assert!(k <= self.k_max);
        let h = self.h;
        let mut rhs_s: Vec<C64> = (0..k).map(|t| self.s[t] * 2.0).collect();
        let mut rhs_one: Vec<C64> = vec![ONE; k];
        self.solve_window(k, &mut rhs_s)?;
        self.solve_window(k, &mut rhs_one)?;

        let mut int_s = C64::new(0.0, 0.0);
        let mut int_one = C64::new(0.0, 0.0);
        for t in 0..k {
            let w = if t == 0 || t == k - 1 { 0.5 * h } else { h };
            let conj_om = self.om[t].conj();
            int_s += conj_om * rhs_s[t] * w;
            int_one += conj_om * rhs_one[t] * w;
        }
        Ok([
            (C64::new(-1.0, 0.0) - int_s) * SQRT1_2,
            (ONE - int_one) * SQRT1_2,
        ])
    }
}

/// `theta2(x)` from accelerant data on `[0, 2x]`, discretized on `n` nodes.
pub fn recover_theta2(acc: &Accelerant, x: f64, n: usize) -> Result<[C64; 2]> {
    if x.is_nan() || x <= 0.0 || 2.0 * x > acc.grid().last() * (1.0 + 1e-12) {
        return Err(Error::Parameter(format!(
            "x = {x} must lie in (0, {}]",
            acc.grid().last() / 2.0
        )));
    }
    if n < 9 || n.is_multiple_of(2) {
        return Err(Error::Parameter("need an odd node count >= 9".into()));
    }
    let h = 2.0 * x / (n - 1) as f64;
    let ctx = RecoveryContext::build(
        h,
        (0..n).map(|d| acc.omega_at(d as f64 * h)).collect(),
        (0..n).map(|d| acc.s_at(d as f64 * h)).collect(),
        n,
    )?;
    ctx.theta2_at((n - 1) / 2)
}

/// Scalar shortcut `theta1 = -conj(theta2) j`, i.e.
/// `theta1 = [-conj(theta2_1), +conj(theta2_2)]`.
pub fn recover_theta1(theta2: [C64; 2]) -> [C64; 2] {
    [-theta2[0].conj(), theta2[1].conj()]
}

/// The frame rows along the recovery grid.
#[derive(Debug, Clone)]
pub struct ThetaPair {
    grid: Grid,
    theta1: Vec<[C64; 2]>,
    theta2: Vec<[C64; 2]>,
}

impl ThetaPair {
    pub fn new(grid: Grid, theta1: Vec<[C64; 2]>, theta2: Vec<[C64; 2]>) -> Result<Self> {
        if theta1.len() != grid.len() || theta2.len() != grid.len() {
            return Err(Error::GridMismatch("theta rows must match the grid".into()));
        }
        Ok(ThetaPair { grid, theta1, theta2 })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn theta1(&self) -> &[[C64; 2]] {
        &self.theta1
    }

    pub fn theta2(&self) -> &[[C64; 2]] {
        &self.theta2
    }

    /// `max_x |theta1 J theta2^*|` with the flip `J = [[0,1],[1,0]]`.
    pub fn frame_defect(&self) -> f64 {
        self.theta1
            .iter()
            .zip(&self.theta2)
            .map(|(t1, t2)| (t1[1] * t2[0].conj() + t1[0] * t2[1].conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// `v(x) = i theta1'(x) J theta2(x)^*` with the derivative by central
/// differences (second-order one-sided at the ends).
pub fn recover_potential(thetas: &ThetaPair) -> Result<SampledFunction> {
    let n = thetas.grid.len();
    if n < 3 {
        return Err(Error::Differentiation { needed: 3, got: n });
    }
    let h = thetas.grid.h();
    let t1 = &thetas.theta1;
    let deriv = |k: usize, comp: usize| -> C64 {
        if k == 0 {
            (t1[0][comp] * -3.0 + t1[1][comp] * 4.0 - t1[2][comp]) / (2.0 * h)
        } else if k == n - 1 {
            (t1[n - 1][comp] * 3.0 - t1[n - 2][comp] * 4.0 + t1[n - 3][comp]) / (2.0 * h)
        } else {
            (t1[k + 1][comp] - t1[k - 1][comp]) / (2.0 * h)
        }
    };
    let values: Vec<C64> = (0..n)
        .map(|k| {
            let d1 = deriv(k, 0);
            let d2 = deriv(k, 1);
            let t2 = &thetas.theta2[k];
            // row * flip * column: (d1, d2) J (conj t2)^T = d1 conj(t2_2) + d2 conj(t2_1)
            (d1 * t2[1].conj() + d2 * t2[0].conj()) * I
        })
        .collect();
    SampledFunction::new(thetas.grid.clone(), values)
}

/// Everything the inversion pipeline produces.
#[derive(Debug, Clone)]
pub struct InversionResult {
    pub v: SampledFunction,
    pub p: SampledFunction,
    pub q: SampledFunction,
    pub thetas: ThetaPair,
    pub potential: DynamicalPotential,
}

/// Full pipeline: response on `[0, T]` to the evolution-form potential on
/// `[0, T/2]` (the half-interval rule), sampling the output at every
/// `stride`-th lattice node.
pub fn invert_response_strided(
    r: &ResponseFunction,
    n: usize,
    stride: usize,
) -> Result<InversionResult> {
    if n < 17 {
        return Err(Error::Parameter(format!("need at least 17 nodes, got {n}")));
    }
    if stride == 0 {
        return Err(Error::Parameter("stride must be positive".into()));
    }
    let extent = r.samples().grid().last();
    let grid = Grid::span(0.0, extent, n)?;
    let resampled = ResponseFunction::new(
        SampledFunction::from_fn(grid, |t| r.eval(t))?,
        r.origin(),
    );
    let acc = accelerant_from_response(&resampled)?;
    let last_m = (n - 1) / 2;
    let ctx = RecoveryContext::from_accelerant(&acc, 2 * last_m + 1)?;

    let out_nodes: Vec<usize> = (0..=last_m / stride).map(|k| k * stride).collect();
    if out_nodes.len() < 3 {
        return Err(Error::Differentiation { needed: 3, got: out_nodes.len() });
    }
    let theta2: Vec<[C64; 2]> = out_nodes
        .par_iter()
        .map(|&m| ctx.theta2_at(m))
        .collect::<Result<Vec<_>>>()?;
    let theta1: Vec<[C64; 2]> = theta2.iter().map(|&t| recover_theta1(t)).collect();

    let out_grid = Grid::new(0.0, stride as f64 * ctx.h, out_nodes.len())?;
    let thetas = ThetaPair::new(out_grid, theta1, theta2)?;
    let v = recover_potential(&thetas)?;
    let (p, q) = spec_to_dyn_sampled(&v);
    let potential = DynamicalPotential::from_samples(p.clone(), q.clone(), None)?;
    Ok(InversionResult { v, p, q, thetas, potential })
}

/// [`invert_response_strided`] with the default output decimation (every
/// second lattice node), which keeps the derivative spacing proportional
/// to the lattice step under `n`-doubling.
pub fn invert_response(r: &ResponseFunction, n: usize) -> Result<InversionResult> {
    invert_response_strided(r, n, 2)
}
