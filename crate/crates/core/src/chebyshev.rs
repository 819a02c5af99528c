//! Chebyshev function representation.
//!
//! A function is carried either by its values at the roots of `T_n`
//! ([`GridFn`]) or by its Chebyshev coefficients ([`ChebSeries`], with the
//! `a_0 / 2` convention). [`ChebGrid`] holds the node set and the cosine
//! table used by both directions of the transform.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, PrecisionCtx, Real};

/// Node values of a function on a Chebyshev grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    pub values: Vec<Real>,
}

impl GridFn {
    pub fn new(values: Vec<Real>) -> Self {
        GridFn { values }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn norm_inf(&self) -> Real {
        crate::numerics::norm_inf(&self.values)
    }
}

/// `g(x) = a_0/2 + sum_{k>=1} a_k T_k(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebSeries {
    pub coeffs: Vec<Real>,
}

/// Roots of `T_n` together with `T_k(x_i)` for `k < n`.
///
/// Angles are reduced to multiples of `pi / 2n` before taking cosines, so
/// the node set is exactly symmetric under negation.
#[derive(Clone, Debug)]
pub struct ChebGrid {
    n: usize,
    ctx: PrecisionCtx,
    nodes: Vec<Real>,
    /// `cos(j pi / 2n)` for `j = 0 .. 4n`.
    quarter: Vec<Real>,
}

impl ChebGrid {
    pub fn new(n: usize, ctx: &PrecisionCtx) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch(format!("grid needs at least 2 nodes, got {n}")));
        }
        let step = ctx.pi() / ctx.int(2 * n as i64);
        let mut quarter = vec![ctx.zero(); 4 * n];
        for (j, q) in quarter.iter_mut().enumerate().take(n) {
            *q = (&step * ctx.int(j as i64)).cos();
        }
        quarter[n] = ctx.zero();
        for j in n + 1..=2 * n {
            quarter[j] = -&quarter[2 * n - j];
        }
        for j in 2 * n + 1..4 * n {
            quarter[j] = quarter[4 * n - j].clone();
        }
        let nodes = (1..=n).map(|i| quarter[2 * i - 1].clone()).collect();
        Ok(ChebGrid { n, ctx: *ctx, nodes, quarter })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ctx(&self) -> &PrecisionCtx {
        &self.ctx
    }

    pub fn nodes(&self) -> &[Real] {
        &self.nodes
    }

    /// `T_k(x_i)` with zero-based node index `i`.
    pub fn t(&self, k: usize, i: usize) -> &Real {
        &self.quarter[(k * (2 * i + 1)) % (4 * self.n)]
    }

    pub fn to_series(&self, f: &GridFn) -> Result<ChebSeries> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "grid has {} nodes, function has {} values",
                self.n,
                f.n()
            )));
        }
        let scale = self.ctx.int(2) / self.ctx.int(self.n as i64);
        let coeffs = (0..self.n)
            .map(|k| {
                let mut acc = self.ctx.zero();
                for (i, v) in f.values.iter().enumerate() {
                    acc += v * self.t(k, i);
                }
                acc * &scale
            })
            .collect();
        Ok(ChebSeries { coeffs })
    }

    pub fn to_grid(&self, s: &ChebSeries) -> Result<GridFn> {
        if s.len() > self.n {
            return Err(Error::DimensionMismatch(format!(
                "series of length {} does not fit a {}-node grid",
                s.len(),
                self.n
            )));
        }
        let values = (0..self.n)
            .map(|i| {
                let mut acc = &s.coeffs[0] / 2;
                for k in 1..s.len() {
                    acc += &s.coeffs[k] * self.t(k, i);
                }
                acc
            })
            .collect();
        Ok(GridFn { values })
    }

    /// Matrix `C` with `C[k][j] = (2/n) T_k(x_j)`, i.e. `a = C f`.
    pub fn transform_matrix(&self) -> Matrix<Real> {
        let scale = self.ctx.int(2) / self.ctx.int(self.n as i64);
        Matrix::from_fn(self.n, self.n, |k, j| self.t(k, j) * &scale)
    }

    /// Values `p_j(y)` of the Lagrange cardinal polynomials of the grid.
    pub fn cardinals_at(&self, y: &Real, transform: &Matrix<Real>) -> Vec<Real> {
        let w = chebyshev_weights(y, self.n);
        (0..self.n)
            .map(|j| {
                let mut acc = self.ctx.zero();
                for (k, wk) in w.iter().enumerate() {
                    acc += wk * &transform[(k, j)];
                }
                acc
            })
            .collect()
    }
}

/// `(1/2, T_1(y), ..., T_{n-1}(y))`, the weights that evaluate a series.
pub fn chebyshev_weights(y: &Real, n: usize) -> Vec<Real> {
    let mut t = Vec::with_capacity(n);
    let one = y.like(1.0);
    t.push(one.clone());
    if n > 1 {
        t.push(y.clone());
    }
    for k in 2..n {
        let next = y * &t[k - 1] * 2 - &t[k - 2];
        t.push(next);
    }
    t[0] = one / 2;
    t
}

/// `x_i = cos((2i-1) pi / 2n)`, `i = 1..n`.
pub fn cheb_nodes(n: usize, ctx: &PrecisionCtx) -> Result<Vec<Real>> {
    Ok(ChebGrid::new(n, ctx)?.nodes)
}

pub fn grid_to_series(f: &GridFn, ctx: &PrecisionCtx) -> Result<ChebSeries> {
    ChebGrid::new(f.n(), ctx)?.to_series(f)
}

pub fn series_to_grid(s: &ChebSeries, n: usize, ctx: &PrecisionCtx) -> Result<GridFn> {
    ChebGrid::new(n, ctx)?.to_grid(s)
}

pub fn eval_series(s: &ChebSeries, x: &Real) -> Real {
    s.eval(x)
}

pub fn series_derivative(s: &ChebSeries) -> ChebSeries {
    s.derivative()
}

impl ChebSeries {
    pub fn new(coeffs: Vec<Real>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::DimensionMismatch("empty Chebyshev series".into()));
        }
        Ok(ChebSeries { coeffs })
    }

    /// The constant function `c`.
    pub fn constant(c: &Real, len: usize) -> Self {
        let mut coeffs = vec![c.zero_like(); len.max(1)];
        coeffs[0] = c * 2;
        ChebSeries { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Clenshaw evaluation; valid for any real `x`.
    pub fn eval(&self, x: &Real) -> Real {
        let n = self.coeffs.len();
        let mut b1 = x.zero_like();
        let mut b2 = x.zero_like();
        for k in (1..n).rev() {
            let b0 = x * &b1 * 2 - &b2 + &self.coeffs[k];
            b2 = b1;
            b1 = b0;
        }
        x * &b1 - &b2 + &self.coeffs[0] / 2
    }

    pub fn derivative(&self) -> ChebSeries {
        let n = self.coeffs.len();
        let zero = self.coeffs[0].zero_like();
        if n == 1 {
            return ChebSeries { coeffs: vec![zero] };
        }
        let mut d = vec![zero; n];
        for k in (1..n).rev() {
            let next = if k + 1 < n { d[k + 1].clone() } else { self.coeffs[0].zero_like() };
            d[k - 1] = next + &self.coeffs[k] * (2 * k as i32);
        }
        d.truncate(n - 1);
        ChebSeries { coeffs: d }
    }

    pub fn scale(&self, s: &Real) -> ChebSeries {
        ChebSeries { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &ChebSeries) -> ChebSeries {
        let n = self.len().max(other.len());
        let zero = self.coeffs[0].zero_like();
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).unwrap_or(&zero);
                let b = other.coeffs.get(k).unwrap_or(&zero);
                a + b
            })
            .collect();
        ChebSeries { coeffs }
    }

    pub fn sub(&self, other: &ChebSeries) -> ChebSeries {
        self.add(&other.scale(&other.coeffs[0].like(-1.0)))
    }

    /// Product truncated to `len` coefficients, using
    /// `T_i T_j = (T_{i+j} + T_{|i-j|}) / 2`.
    pub fn mul_truncated(&self, other: &ChebSeries, len: usize) -> ChebSeries {
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero.clone(); len];
        // work with c_0 = a_0 / 2 so that f = sum c_k T_k
        let full = |s: &ChebSeries| -> Vec<Real> {
            let mut c = s.coeffs.clone();
            c[0] = &c[0] / 2;
            c
        };
        let a = full(self);
        let b = full(other);
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let p = ai * bj / 2;
                let hi = i + j;
                let lo = i.abs_diff(j);
                if hi < len {
                    out[hi] += &p;
                }
                if lo < len {
                    out[lo] += &p;
                }
            }
        }
        out[0] *= 2;
        ChebSeries { coeffs: out }
    }

    /// `self^k` with every intermediate product truncated to `len`.
    pub fn pow_truncated(&self, k: u32, len: usize) -> ChebSeries {
        let one = self.coeffs[0].like(1.0);
        let mut acc = ChebSeries::constant(&one, len);
        for _ in 0..k {
            acc = acc.mul_truncated(self, len);
        }
        acc
    }

    /// Monomial coefficients `c_j` with `g(x) = sum c_j x^j`.
    pub fn to_monomial(&self) -> Vec<Real> {
        let n = self.coeffs.len();
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero.clone(); n];
        // monomial coefficients of T_{k-1} and T_k
        let mut prev: Vec<Real> = vec![zero.like(1.0)];
        out[0] += &self.coeffs[0] / 2;
        if n == 1 {
            return out;
        }
        let mut cur: Vec<Real> = vec![zero.clone(), zero.like(1.0)];
        out[1] += &self.coeffs[1];
        for k in 2..n {
            let mut next = vec![zero.clone(); k + 1];
            for (j, c) in cur.iter().enumerate() {
                next[j + 1] += c * 2;
            }
            for (j, c) in prev.iter().enumerate() {
                next[j] -= c;
            }
            for (j, c) in next.iter().enumerate() {
                if !c.is_zero() {
                    out[j] += c * &self.coeffs[k];
                }
            }
            prev = cur;
            cur = next;
        }
        out
    }

    /// `index<TAB>value` lines, values with `digits` significant digits.
    pub fn dump(&self, digits: usize) -> String {
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{k}\t{}", c.to_decimal(digits));
        }
        s
    }

    /// Parses `index value` lines (tab, space or comma separated). Blank
    /// lines and lines starting with `#` are skipped; missing indices are
    /// zero.
    pub fn parse_dump(text: &str, ctx: &PrecisionCtx) -> Result<ChebSeries> {
        let mut entries: Vec<(usize, Real)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(|c: char| c == '\t' || c == ',' || c.is_whitespace()).filter(|p| !p.is_empty());
            let (Some(idx), Some(val)) = (parts.next(), parts.next()) else {
                return Err(Error::Parse(format!("line {}: expected `index value`", lineno + 1)));
            };
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad index `{idx}`", lineno + 1)))?;
            entries.push((idx, ctx.parse(val)?));
        }
        let len = entries.iter().map(|(i, _)| i + 1).max().ok_or_else(|| Error::Parse("no coefficients".into()))?;
        let mut coeffs = ctx.zeros(len);
        for (i, v) in entries {
            coeffs[i] = v;
        }
        Ok(ChebSeries { coeffs })
    }
}

/// Coefficient decay diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayReport {
    /// `log10(1/|a_k|)`; `None` for an exactly zero coefficient.
    pub magnitudes: Vec<Option<f64>>,
    /// Least-squares slope of the magnitudes against `k`.
    pub rate: f64,
    /// `max(|a_{n-1}|, |a_{n-2}|)`: for functions of one parity every other
    /// coefficient sits at round-off level, so the last two are inspected.
    pub tail: f64,
    pub healthy: bool,
}

pub fn decay_report(s: &ChebSeries, ctx: &PrecisionCtx) -> Result<DecayReport> {
    let n = s.len();
    if n < 8 {
        return Err(Error::DimensionMismatch(format!("decay report needs 8 coefficients, got {n}")));
    }
    let magnitudes: Vec<Option<f64>> = s
        .coeffs
        .iter()
        .map(|c| if c.is_zero() { None } else { Some(-c.abs().log10().to_f64()) })
        .collect();
    let pts: Vec<(f64, f64)> =
        magnitudes.iter().enumerate().filter_map(|(k, m)| m.map(|m| (k as f64, m))).collect();
    let rate = if pts.len() < 2 {
        0.0
    } else {
        let count = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / count;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / count;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    let tail_real = s.coeffs[n - 1].abs().max(&s.coeffs[n - 2].abs()).clone();
    let limit = ctx.pow10(-(ctx.digits() as i32) / 3);
    Ok(DecayReport {
        magnitudes,
        rate,
        tail: tail_real.to_f64(),
        healthy: rate > 0.0 && tail_real <= limit,
    })
}
