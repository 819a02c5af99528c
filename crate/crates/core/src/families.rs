//! Families of fixed points.
//!
//! * the scaling family `g_mu(x) = mu g(x / mu)`, fixed by the
//!   origin-scaled operators for every `mu`;
//! * constants, fixed by the same operators;
//! * fixed points with an extremum of order `2k`.

use serde::{Deserialize, Serialize};

use crate::bases::{build_basis, Basis, BasisSpec};
use crate::chebyshev::{decay_report, ChebGrid, ChebSeries, GridFn};
use crate::error::{Error, Result};
use crate::numerics::{eigenvalues, Complex, PrecisionCtx, Real};
use crate::operators::{ExplicitKind, OperatorSpec, Variant};
use crate::solver::{default_seed, linearized_matrix, JacobianMode, newton_solve, NewtonConfig, NewtonResult};
use crate::spectrum::{compute_spectrum, verify_explicit, SpectrumReport};

#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub mu: Real,
    /// Scaling of the family: `alpha` on the scaling family, 1 on constants.
    pub beta: Real,
    pub series: ChebSeries,
    /// True when `|mu| < 1`, i.e. `g` was evaluated outside `[-1, 1]`.
    pub extrapolated: bool,
}

/// `mu g(x / mu)`, interpolated on a grid of `g.len()` nodes (exact, since
/// both sides are polynomials of the same degree).
pub fn family_member(g: &ChebSeries, mu: &Real, beta: &Real, allow_extrapolation: bool) -> Result<FamilyMember> {
    if mu.is_zero() {
        return Err(Error::DivideByZero("mu"));
    }
    let extrapolated = mu.abs() < 1.0;
    if extrapolated && !allow_extrapolation {
        return Err(Error::Extrapolation(format!("|mu| = {} < 1", mu.to_decimal(6))));
    }
    let len = g.len().max(2);
    let ctx = PrecisionCtx::new(precision_digits(mu))?;
    let grid = ChebGrid::new(len, &ctx)?;
    let inv = mu.recip();
    let values = grid.nodes().iter().map(|x| mu * g.eval(&(x * &inv))).collect();
    let mut series = grid.to_series(&GridFn::new(values))?;
    series.coeffs.truncate(g.len());
    Ok(FamilyMember { mu: mu.clone(), beta: beta.clone(), series, extrapolated })
}

fn precision_digits(x: &Real) -> u32 {
    let bits = x.prec().saturating_sub(crate::numerics::precision::GUARD_BITS);
    ((bits as f64) / std::f64::consts::LOG2_10).floor().max(PrecisionCtx::MIN_DIGITS as f64) as u32
}

/// `||g - alpha g(g(x / alpha))||_inf` at the given points.
pub fn fixed_alpha_residual(g: &ChebSeries, alpha: &Real, xs: &[Real]) -> Real {
    let inv = alpha.recip();
    xs.iter()
        .map(|x| (g.eval(x) - alpha * g.eval(&g.eval(&(x * &inv)))).abs())
        .fold(alpha.zero_like(), |acc, d| if d > acc { d } else { acc })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpectrum {
    pub mu: String,
    /// Leading eigenvalues by modulus (real parts).
    pub eigenvalues: Vec<String>,
    /// Relative residual of `g_mu - x g_mu'` as an eigenfunction for 1.
    pub dilation_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyComparison {
    pub operator: String,
    pub members: Vec<FamilySpectrum>,
    /// `pairwise[i][j]`: largest difference between the leading eigenvalues
    /// of members `i` and `j`.
    pub pairwise: Vec<Vec<f64>>,
    pub compared: usize,
}

impl FamilyComparison {
    pub fn max_pairwise(&self) -> f64 {
        self.pairwise.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn max_dilation_residual(&self) -> f64 {
        self.members.iter().map(|m| m.dilation_residual).fold(0.0, f64::max)
    }
}

/// Spectra of the full derivative of `variant` along the scaling family of
/// `g`, compared on the `top` leading eigenvalues.
pub fn family_spectrum_check(
    g: &ChebSeries,
    mus: &[Real],
    variant: Variant,
    top: usize,
    ctx: &PrecisionCtx,
) -> Result<FamilyComparison> {
    if !variant.scales_at_origin() {
        return Err(Error::InvalidBasis(format!("{variant} does not fix the scaling family")));
    }
    let n = g.len();
    let basis = build_basis(&BasisSpec::cheb(n), ctx)?;
    let grid = ChebGrid::new(n, ctx)?;
    let spec = OperatorSpec::full(variant);
    let alpha = crate::operators::scaling_of(Variant::T, g)?.value;
    let mut spectra: Vec<Vec<Complex>> = Vec::new();
    let mut members = Vec::new();
    for mu in mus {
        let member = family_member(g, mu, &alpha, false)?;
        let m = linearized_matrix(spec, &basis, &member.series)?;
        let values = eigenvalues(&m, ctx)?;
        let dilation = verify_explicit(&member.series, spec, ExplicitKind::Dilation, 1, &ctx.one(), &grid)?;
        members.push(FamilySpectrum {
            mu: mu.to_decimal(ctx.digits() as usize),
            eigenvalues: values.iter().take(top).map(|v| v.re.to_decimal(ctx.digits() as usize)).collect(),
            dilation_residual: dilation.to_f64(),
        });
        spectra.push(values);
    }
    let compared = top.min(spectra.iter().map(Vec::len).min().unwrap_or(0));
    let pairwise = spectra
        .iter()
        .map(|a| {
            spectra
                .iter()
                .map(|b| (0..compared).map(|i| a[i].sub(&b[i]).abs().to_f64()).fold(0.0, f64::max))
                .collect()
        })
        .collect();
    Ok(FamilyComparison { operator: variant.to_string(), members, pairwise, compared })
}

/// Eigenvalue of the dilation mode `g - x g'` of `dT` at a fixed point of
/// `T` with an extremum of order `2k`: `alpha^(2k)`.
pub fn dilation_eigenvalue(alpha: &Real, k: u32) -> Real {
    alpha.powi(2 * k as i32)
}

/// Eigenvalues of the full derivative of `variant` at the constant `c`.
pub fn constant_family_spectrum(c: &Real, n: usize, variant: Variant, ctx: &PrecisionCtx) -> Result<Vec<Complex>> {
    let basis = build_basis(&BasisSpec::cheb(n), ctx)?;
    let g = ChebSeries::constant(c, n);
    let m = linearized_matrix(OperatorSpec::full(variant), &basis, &g)?;
    eigenvalues(&m, ctx)
}

/// Threshold below which low-order Taylor coefficients count as zero.
///
/// The nominal level is `10^(-D/2)`; a degree `n-1` interpolant of the fixed
/// point only determines its Taylor coefficients to about the size of the
/// Chebyshev tail (the `x^2` coefficient of the quartic solution at 70
/// nodes is ~1e-22), so the threshold is raised to `10^6` times the tail
/// when that is larger.
pub fn taylor_zero_threshold(g: &ChebSeries, ctx: &PrecisionCtx) -> Real {
    let nominal = ctx.pow10(-(ctx.digits() as i32) / 2);
    let tail = match decay_report(g, ctx) {
        Ok(r) => ctx.real(r.tail) * 1_000_000,
        Err(_) => nominal.clone(),
    };
    nominal.max(&tail).clone()
}

/// Order of the first Taylor coefficient above the threshold.
pub fn extremum_order(g: &ChebSeries, threshold: &Real) -> u32 {
    let mono = g.to_monomial();
    mono.iter().enumerate().skip(1).find(|(_, c)| c.abs() > *threshold).map_or(0, |(j, _)| j as u32)
}

/// Newton's method for `T` from `seed`, rejecting a fixed point whose
/// extremum is not of order `2k`. Uses the exact Jacobian.
pub fn solve_branch(k: u32, basis: &Basis, seed: &ChebSeries, config: &NewtonConfig) -> Result<NewtonResult> {
    if k == 0 {
        return Err(Error::InvalidIndex(0));
    }
    let config = NewtonConfig { jacobian_mode: JacobianMode::Exact, ..config.clone() };
    let result = newton_solve(OperatorSpec::full(Variant::T), basis, seed, &config)?;
    let threshold = taylor_zero_threshold(&result.series, basis.ctx());
    let found = extremum_order(&result.series, &threshold);
    if found != 2 * k {
        return Err(Error::WrongBranch { expected: 2 * k, found });
    }
    Ok(result)
}

/// Fixed point of `T` with an extremum of order `2k`, with its spectrum.
///
/// The Jacobian is always assembled exactly: finite differences are too
/// crude at a flat extremum.
pub fn solve_extremum_order(
    k: u32,
    n: usize,
    config: &NewtonConfig,
    ctx: &PrecisionCtx,
) -> Result<(NewtonResult, SpectrumReport)> {
    if k == 0 {
        return Err(Error::InvalidIndex(0));
    }
    let basis = build_basis(&BasisSpec::cheb(n), ctx)?;
    let seed = default_seed(k, n, ctx);
    let result = solve_branch(k, &basis, &seed, config)?;
    let report = compute_spectrum(&result, &basis, &ctx.pow10(-20))?;
    Ok((result, report))
}
