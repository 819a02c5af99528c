//! Newton iteration for `Phi(g) = g - T(g) = 0`.
//!
//! The unknowns are the node values of the active basis. Each step solves
//! `J dv = Phi` with `J = I - dT(g)` assembled either by finite
//! differences along the basis cardinal functions or exactly through the
//! linearized stencil.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bases::Basis;
use crate::chebyshev::ChebSeries;
use crate::error::{Error, Result};
use crate::numerics::{norm_inf, DenseMatrix, Lu, Matrix, PrecisionCtx, Real};
use crate::operators::{apply_at, scaling_of, LinearizedStencil, OperatorSpec, ScalingConstant, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JacobianMode {
    FiniteDifference,
    Exact,
}

/// An extra linear condition that replaces one Newton equation.
#[derive(Clone, Debug, PartialEq)]
pub enum Pin {
    /// `g(x) = value`.
    Point { x: Real, value: Real },
    /// Basis coefficient `a_index = value`.
    Coefficient { index: u32, value: Real },
}

#[derive(Clone, Debug)]
pub struct NewtonConfig {
    pub max_iterations: usize,
    /// Finite-difference step; `None` means `10^(-D/2)`.
    pub fd_step: Option<Real>,
    pub jacobian_mode: JacobianMode,
    pub pins: Vec<Pin>,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig { max_iterations: 40, fd_step: None, jacobian_mode: JacobianMode::FiniteDifference, pins: Vec::new() }
    }
}

impl NewtonConfig {
    pub fn exact() -> Self {
        NewtonConfig { jacobian_mode: JacobianMode::Exact, ..Self::default() }
    }

    pub fn with_pin(mut self, pin: Pin) -> Self {
        self.pins.push(pin);
        self
    }

    pub fn step(&self, ctx: &PrecisionCtx) -> Real {
        self.fd_step.clone().unwrap_or_else(|| ctx.pow10(-(ctx.digits() as i32) / 2))
    }

    /// Update norm at which the iteration is declared converged.
    pub fn stop_threshold(ctx: &PrecisionCtx) -> Real {
        ctx.pow10(-(ctx.digits() as i32) + 10)
    }

    /// Relative pivot below which the Jacobian is treated as singular, for
    /// a well-conditioned basis; [`newton_solve`] divides it by the
    /// condition number of the basis interpolation.
    pub fn singular_threshold(ctx: &PrecisionCtx) -> Real {
        ctx.pow10(-(ctx.digits() as i32) / 4)
    }
}

#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub spec: OperatorSpec,
    pub values: Vec<Real>,
    pub series: ChebSeries,
    /// `I - dT(g)` in node coordinates, linearized as requested by `spec`,
    /// without pin rows.
    pub jacobian: DenseMatrix,
    /// Sup norms of the Newton updates.
    pub history: Vec<f64>,
    pub converged: bool,
    pub scaling: ScalingConstant,
    /// `||Phi(g)||_inf` at the returned solution over the rows not
    /// replaced by pins.
    pub residual: Real,
    /// Equations replaced by pin conditions.
    pub pinned_rows: Vec<usize>,
}

/// `g(x_i) - T(g)(x_i)` at the basis nodes.
pub fn residual(variant: Variant, g: &ChebSeries, nodes: &[Real]) -> Result<Vec<Real>> {
    let t = apply_at(variant, g, nodes)?;
    Ok(nodes.iter().zip(t).map(|(x, tx)| g.eval(x) - tx).collect())
}

fn residual_from_values(variant: Variant, basis: &Basis, v: &[Real]) -> Result<Vec<Real>> {
    let g = basis.series(v)?;
    let t = apply_at(variant, &g, basis.nodes())?;
    Ok(v.iter().zip(t).map(|(a, b)| a - b).collect())
}

/// `dT(g)` in node coordinates.
pub fn linearized_matrix(spec: OperatorSpec, basis: &Basis, g: &ChebSeries) -> Result<DenseMatrix> {
    let stencil = LinearizedStencil::new(spec, g, basis.nodes())?;
    Ok(stencil.matrix(basis.dim(), |y| basis.cardinals_at(y)))
}

/// `I - dT(g)` in node coordinates.
///
/// Finite-difference mode perturbs the node values one at a time, i.e.
/// `g` along one cardinal function, with central differences (a one-sided
/// quotient is off by ~60 steps); it always differentiates the full
/// operator. Exact mode uses the requested linearization.
pub fn assemble_jacobian(
    spec: OperatorSpec,
    basis: &Basis,
    values: &[Real],
    mode: JacobianMode,
    step: &Real,
) -> Result<DenseMatrix> {
    match mode {
        JacobianMode::Exact => {
            let g = basis.series(values)?;
            Ok(linearized_matrix(spec, basis, &g)?.identity_minus())
        }
        JacobianMode::FiniteDifference => {
            let n = basis.dim();
            let width = step * 2;
            let columns: Vec<Vec<Real>> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let mut v = values.to_vec();
                    v[j] += step;
                    let up = residual_from_values(spec.variant, basis, &v)?;
                    v[j] -= &width;
                    let down = residual_from_values(spec.variant, basis, &v)?;
                    Ok(up.iter().zip(&down).map(|(a, b)| (a - b) / &width).collect())
                })
                .collect::<Result<_>>()?;
            Ok(Matrix::from_fn(n, n, |i, j| columns[j][i].clone()))
        }
    }
}

/// Solves the fixed-point equation in `basis`, starting from `seed`.
pub fn newton_solve(spec: OperatorSpec, basis: &Basis, seed: &ChebSeries, config: &NewtonConfig) -> Result<NewtonResult> {
    let ctx = *basis.ctx();
    let step = config.step(&ctx);
    let stop = NewtonConfig::stop_threshold(&ctx);
    // equispaced monomial bases make node coordinates ill-conditioned
    // without any eigenvalue near 1
    let singular = NewtonConfig::singular_threshold(&ctx) / basis.condition();
    let plateau = ctx.pow10(-(ctx.digits() as i32) / 2);
    let full = OperatorSpec::full(spec.variant);

    let functionals: Vec<(Vec<Real>, Real, Real)> = config
        .pins
        .iter()
        .map(|pin| match pin {
            Pin::Point { x, value } => {
                let (w, c) = basis.point_functional(x);
                Ok((w, c, value.clone()))
            }
            Pin::Coefficient { index, value } => {
                let (w, c) = basis.coefficient_functional(*index)?;
                Ok((w, c, value.clone()))
            }
        })
        .collect::<Result<_>>()?;
    let pin_rows = choose_pin_rows(&functionals, basis.dim())?;

    let mut v: Vec<Real> = basis.values_of(seed).into_iter().map(|x| ctx.adopt(&x)).collect();
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut last_update: Option<Real> = None;

    for iteration in 0..config.max_iterations {
        let mut phi = residual_from_values(spec.variant, basis, &v)?;
        let mut jac = assemble_jacobian(full, basis, &v, config.jacobian_mode, &step)?;
        for ((w, c, value), &row) in functionals.iter().zip(&pin_rows) {
            jac.set_row(row, w);
            phi[row] = crate::numerics::dot(w, &v) + c - value;
        }
        let lu = Lu::factor(&jac, &ctx).map_err(|e| match e {
            Error::SingularMatrix { .. } => Error::SingularJacobian { iteration, pivot_ratio: 0.0 },
            other => other,
        })?;
        let ratio = lu.pivot_ratio();
        if ratio < singular {
            return Err(Error::SingularJacobian { iteration, pivot_ratio: ratio.to_f64() });
        }
        let delta = lu.solve(&phi);
        for (vi, di) in v.iter_mut().zip(&delta) {
            *vi -= di;
        }
        let update = norm_inf(&delta);
        history.push(update.to_f64());
        if update <= stop {
            converged = true;
            break;
        }
        // round-off floor: the update stopped halving
        if let Some(prev) = &last_update {
            if update < plateau && &update * 2 > *prev {
                converged = true;
                break;
            }
        }
        last_update = Some(update);
    }

    let series = basis.series(&v)?;
    let phi = residual_from_values(spec.variant, basis, &v)?;
    // rows given up to pins only hold to discretization accuracy when the
    // equations are dependent, so they are not part of the check
    let free: Vec<Real> =
        phi.into_iter().enumerate().filter(|(i, _)| !pin_rows.contains(i)).map(|(_, r)| r).collect();
    let res = norm_inf(&free);
    let scale = norm_inf(&v).max(&ctx.one()).clone();
    if !converged || res > ctx.pow10(-(ctx.digits() as i32) + 12) * scale {
        return Err(Error::NewtonNoConvergence { history });
    }
    let jacobian = linearized_matrix(spec, basis, &series)?.identity_minus();
    let scaling = scaling_of(spec.variant, &series)?;
    Ok(NewtonResult { spec, values: v, series, jacobian, history, converged, scaling, residual: res, pinned_rows: pin_rows })
}

/// Each pin replaces the not yet replaced row where its functional has the
/// largest weight.
fn choose_pin_rows(functionals: &[(Vec<Real>, Real, Real)], n: usize) -> Result<Vec<usize>> {
    let mut used = vec![false; n];
    let mut rows = Vec::with_capacity(functionals.len());
    for (w, _, _) in functionals {
        let mut best: Option<(usize, Real)> = None;
        for (i, wi) in w.iter().enumerate() {
            if used[i] {
                continue;
            }
            let a = wi.abs();
            if best.as_ref().map_or(true, |(_, b)| a > *b) {
                best = Some((i, a));
            }
        }
        let (row, _) = best.ok_or_else(|| Error::DimensionMismatch("more pins than unknowns".into()))?;
        used[row] = true;
        rows.push(row);
    }
    Ok(rows)
}

/// Order of convergence fitted to an update history.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Slope of `log u_{k+1}` against `log u_k`; absent with fewer than two
    /// usable pairs.
    pub exponent: Option<f64>,
    pub pairs: usize,
}

/// Fits `log u_{k+1} = p log u_k + c` over the pairs that lie in the
/// asymptotic regime (`u_k <= 0.1`) and above the round-off floor
/// `10^(-D/2)`.
pub fn convergence_diagnostics(history: &[f64], digits: u32) -> ConvergenceReport {
    let floor = 10f64.powi(-(digits as i32) / 2);
    let pairs: Vec<(f64, f64)> = history
        .windows(2)
        .filter(|w| w[0] <= 0.1 && w[0] > 0.0 && w[1] >= floor)
        .map(|w| (w[0].log10(), w[1].log10()))
        .collect();
    // a single geometric pair still identifies the slope if the constant is
    // pinned by a second one
    if pairs.len() < 2 {
        return ConvergenceReport { exponent: None, pairs: pairs.len() };
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let exponent = if sxx > 0.0 { Some(sxy / sxx) } else { None };
    ConvergenceReport { exponent, pairs: pairs.len() }
}

/// `1 - 1.5 x^2` for quadratic extrema, `1 - 1.8 x^(2k) + 0.3 x^(6k)` otherwise, as a
/// series of `len` coefficients.
pub fn default_seed(extremum_order: u32, len: usize, ctx: &PrecisionCtx) -> ChebSeries {
    let k = extremum_order.max(1) as usize;
    let lead = if k == 1 { ctx.real(-1.5) } else { ctx.real(-1.8) };
    let grid = crate::chebyshev::ChebGrid::new(len.max(6 * k + 1), ctx).expect("grid of at least 3 nodes");
    let values = grid
        .nodes()
        .iter()
        .map(|x| {
            let v = ctx.one() + &lead * x.powi(2 * k as i32);
            // pulls g(1) towards 1/alpha_k; without it Newton leaves the basin
            if k > 1 { v + x.powi(6 * k as i32) * 0.3 } else { v }
        })
        .collect();
    let mut s = grid.to_series(&crate::chebyshev::GridFn::new(values)).expect("matching grid");
    s.coeffs.truncate(len.max(6 * k + 1));
    s
}
