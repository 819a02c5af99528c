//! Doubling operators and their linearizations.
//!
//! Every variant has the form `T(g)(x) = K g(g(s x / K))` with a sign
//! `s = +-1` and a scale `K` read off from `g`:
//!
//! | variant | s  | K                    |
//! |---------|----|----------------------|
//! | `T`     | +1 | `1/g(1)`             |
//! | `T2`    | -1 | `1/g(1)`             |
//! | `T3`    | -1 | `g(0)/g(g(0))`       |
//! | `T4`    | +1 | `g(0)/g(g(0))`       |
//!
//! The frozen linearization differentiates with `K` held fixed; the full
//! derivative adds the rank-one term coming from the variation of `K`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{ChebGrid, ChebSeries, GridFn};
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, Matrix, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    T,
    T2,
    T3,
    T4,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::T, Variant::T2, Variant::T3, Variant::T4];

    fn sign(self) -> i32 {
        match self {
            Variant::T | Variant::T4 => 1,
            Variant::T2 | Variant::T3 => -1,
        }
    }

    /// True for the variants whose scale is taken from `g(0)` and `g(g(0))`.
    pub fn scales_at_origin(self) -> bool {
        matches!(self, Variant::T3 | Variant::T4)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::T => "T",
            Variant::T2 => "T2",
            Variant::T3 => "T3",
            Variant::T4 => "T4",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T" | "T1" => Ok(Variant::T),
            "T2" => Ok(Variant::T2),
            "T3" => Ok(Variant::T3),
            "T4" => Ok(Variant::T4),
            _ => Err(Error::Parse(format!("unknown operator `{s}` (expected T, T2, T3 or T4)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Linearization {
    FrozenAlpha,
    FullDerivative,
}

impl fmt::Display for Linearization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linearization::FrozenAlpha => "frozen",
            Linearization::FullDerivative => "full",
        })
    }
}

impl FromStr for Linearization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Linearization::FullDerivative),
            "frozen" => Ok(Linearization::FrozenAlpha),
            _ => Err(Error::Parse(format!("unknown linearization `{s}` (expected full or frozen)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub variant: Variant,
    pub linearization: Linearization,
}

impl OperatorSpec {
    pub fn new(variant: Variant, linearization: Linearization) -> Self {
        OperatorSpec { variant, linearization }
    }

    pub fn full(variant: Variant) -> Self {
        Self::new(variant, Linearization::FullDerivative)
    }

    pub fn frozen(variant: Variant) -> Self {
        Self::new(variant, Linearization::FrozenAlpha)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalingKind {
    /// `alpha = 1/g(1)`.
    InverseAtOne,
    /// `a = -g(0)/g(g(0))`.
    OriginRatio,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConstant {
    pub value: Real,
    pub kind: ScalingKind,
}

pub fn scaling_of(variant: Variant, g: &ChebSeries) -> Result<ScalingConstant> {
    let k = multiplier(variant, g)?.k;
    Ok(if variant.scales_at_origin() {
        ScalingConstant { value: -k, kind: ScalingKind::OriginRatio }
    } else {
        ScalingConstant { value: k, kind: ScalingKind::InverseAtOne }
    })
}

/// The multiplier `K` together with the quantities its variation needs.
struct Multiplier {
    k: Real,
    /// `g(0)` and `g(g(0))` for the origin-scaled variants.
    origin: Option<(Real, Real)>,
}

fn multiplier(variant: Variant, g: &ChebSeries) -> Result<Multiplier> {
    let one = g.coeffs[0].like(1.0);
    if variant.scales_at_origin() {
        let c = g.eval(&one.zero_like());
        let d = g.eval(&c);
        if d.is_zero() {
            return Err(Error::DivideByZero("g(g(0))"));
        }
        Ok(Multiplier { k: &c / &d, origin: Some((c, d)) })
    } else {
        let g1 = g.eval(&one);
        if g1.is_zero() {
            return Err(Error::DivideByZero("g(1)"));
        }
        Ok(Multiplier { k: g1.recip(), origin: None })
    }
}

/// `sigma K`, the number whose powers organize the spectrum of the variant.
pub fn spectral_base(variant: Variant, g: &ChebSeries) -> Result<Real> {
    let k = multiplier(variant, g)?.k;
    Ok(k * variant.sign())
}

/// `T(g)` at the given points.
pub fn apply_at(variant: Variant, g: &ChebSeries, xs: &[Real]) -> Result<Vec<Real>> {
    let Multiplier { k, .. } = multiplier(variant, g)?;
    let ratio = k.recip() * variant.sign();
    Ok(xs
        .par_iter()
        .map(|x| {
            let u = x * &ratio;
            &k * g.eval(&g.eval(&u))
        })
        .collect())
}

pub fn apply(variant: Variant, g: &ChebSeries, grid: &ChebGrid) -> Result<GridFn> {
    Ok(GridFn::new(apply_at(variant, g, grid.nodes())?))
}

/// The linearized operator sampled at a fixed set of output points.
///
/// Row `i` reads
/// `(dT h)(x_i) = a_i h(u_i) + b h(w_i) + r_i sum_m beta_m h(q_m)`,
/// so the operator only ever looks at `h` through finitely many point
/// values. This makes an exact matrix available for any finite basis.
#[derive(Clone, Debug)]
pub struct LinearizedStencil {
    /// Inner arguments `u_i = s x_i / K`.
    pub inner: Vec<Real>,
    /// Outer arguments `w_i = g(u_i)`.
    pub outer: Vec<Real>,
    /// `K g'(w_i)`.
    pub inner_weight: Vec<Real>,
    /// `K`.
    pub outer_weight: Real,
    /// `dT/dK` at each output point; empty for the frozen linearization.
    pub rank_one: Vec<Real>,
    /// Probe points and weights with `dK = sum beta_m h(q_m)`.
    pub probes: Vec<(Real, Real)>,
}

impl LinearizedStencil {
    pub fn new(spec: OperatorSpec, g: &ChebSeries, xs: &[Real]) -> Result<Self> {
        let Multiplier { k, origin } = multiplier(spec.variant, g)?;
        let dg = g.derivative();
        let sign = spec.variant.sign();
        let ratio = k.recip() * sign;
        let rows: Vec<(Real, Real, Real, Real)> = xs
            .par_iter()
            .map(|x| {
                let u = x * &ratio;
                let w = g.eval(&u);
                let dgw = dg.eval(&w);
                // dT/dK = g(w) - g'(w) g'(u) u
                let dk = g.eval(&w) - &dgw * dg.eval(&u) * &u;
                (u, w, &k * &dgw, dk)
            })
            .collect();
        let mut inner = Vec::with_capacity(xs.len());
        let mut outer = Vec::with_capacity(xs.len());
        let mut inner_weight = Vec::with_capacity(xs.len());
        let mut rank_one = Vec::new();
        for (u, w, a, dk) in rows {
            inner.push(u);
            outer.push(w);
            inner_weight.push(a);
            if spec.linearization == Linearization::FullDerivative {
                rank_one.push(dk);
            }
        }
        let probes = match spec.linearization {
            Linearization::FrozenAlpha => Vec::new(),
            Linearization::FullDerivative => match origin {
                None => vec![(k.like(1.0), -k.square())],
                Some((c, d)) => {
                    // K = c/d with c = g(0), d = g(c)
                    let d2 = d.square();
                    let at_zero = d.recip() - &c * dg.eval(&c) / &d2;
                    let at_c = -(&c / &d2);
                    vec![(c.zero_like(), at_zero), (c, at_c)]
                }
            },
        };
        Ok(LinearizedStencil { inner, outer, inner_weight, outer_weight: k, rank_one, probes })
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    /// Applies the stencil to a function given as a point evaluator.
    pub fn apply<F>(&self, h: F) -> Vec<Real>
    where
        F: Fn(&Real) -> Real + Sync,
    {
        let dk = self.probes.iter().fold(self.outer_weight.zero_like(), |acc, (q, beta)| acc + beta * h(q));
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let mut v = &self.inner_weight[i] * h(&self.inner[i]) + &self.outer_weight * h(&self.outer[i]);
                if let Some(r) = self.rank_one.get(i) {
                    v += r * &dk;
                }
                v
            })
            .collect()
    }

    /// Matrix of the stencil against a finite family of functions;
    /// `basis(y)` returns the values of every family member at `y`.
    pub fn matrix<F>(&self, dim: usize, basis: F) -> DenseMatrix
    where
        F: Fn(&Real) -> Vec<Real> + Sync,
    {
        let zero = self.outer_weight.zero_like();
        let mut dk = vec![zero.clone(); dim];
        for (q, beta) in &self.probes {
            for (acc, p) in dk.iter_mut().zip(basis(q)) {
                *acc += beta * p;
            }
        }
        let rows: Vec<Vec<Real>> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let pu = basis(&self.inner[i]);
                let pw = basis(&self.outer[i]);
                (0..dim)
                    .map(|j| {
                        let mut v = &self.inner_weight[i] * &pu[j] + &self.outer_weight * &pw[j];
                        if let Some(r) = self.rank_one.get(i) {
                            v += r * &dk[j];
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        Matrix::from_rows(rows).expect("stencil rows have equal length")
    }
}

/// `dT(g) h` at the grid nodes.
pub fn linearized_apply(spec: OperatorSpec, g: &ChebSeries, h: &ChebSeries, grid: &ChebGrid) -> Result<GridFn> {
    let stencil = LinearizedStencil::new(spec, g, grid.nodes())?;
    Ok(GridFn::new(stencil.apply(|y| h.eval(y))))
}

/// Closed-form eigenfunctions built from `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExplicitKind {
    /// `g - x g' - g^k + x^k g'`, eigenvalue `base^(1-k)` of the full derivative.
    Full,
    /// `g - x g'`, the dilation mode.
    Dilation,
    /// `g^k - x^k g'`, eigenvalue `base^(1-k)` of the frozen linearization.
    Frozen,
}

/// The explicit eigenfunction of the given kind, truncated to `g.len()`
/// coefficients.
pub fn explicit_eigenfunction(kind: ExplicitKind, g: &ChebSeries, k: i64) -> Result<ChebSeries> {
    if k < 0 || (k == 1 && kind != ExplicitKind::Dilation) {
        return Err(Error::InvalidIndex(k));
    }
    let len = g.len();
    let dg = g.derivative();
    let zero = g.coeffs[0].zero_like();
    let mut x = vec![zero.clone(); 2.min(len)];
    if len > 1 {
        x[1] = zero.like(1.0);
    }
    let x = ChebSeries { coeffs: x };
    let dilation = g.sub(&x.mul_truncated(&dg, len));
    if kind == ExplicitKind::Dilation {
        return Ok(dilation);
    }
    let k = k as u32;
    let gk = g.pow_truncated(k, len);
    let xk_dg = x.pow_truncated(k, len).mul_truncated(&dg, len);
    let frozen = gk.sub(&xk_dg);
    Ok(match kind {
        ExplicitKind::Frozen => frozen,
        _ => dilation.sub(&frozen),
    })
}
