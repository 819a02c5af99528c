//! Finite parameterizations of the unknown function.
//!
//! Every basis is described by a node set and a map from node values to a
//! polynomial. The unknowns of Newton's method are always the node values;
//! the basis decides which polynomial they stand for:
//!
//! * [`BasisKind::ChebGrid`] — degree `n-1` interpolant at Chebyshev roots;
//! * [`BasisKind::MonomialFull`] — `sum a_j x^j` at Chebyshev roots rounded
//!   to rationals with small denominators;
//! * [`BasisKind::RationalNodeMonomial`] — the same powers at equispaced
//!   rational nodes on `[-1, 1]`;
//! * [`BasisKind::EvenMonomial`] — `sum a_j x^(2j)`, nodes `i/m`, `i = 0..m`;
//! * [`BasisKind::Lanford`] — `1 + sum a_j x^(2j)`, `j >= 1`, nodes `i/m`,
//!   `i = 1..m`.
//!
//! Monomial interpolation matrices are inverted exactly in rational
//! arithmetic; floating point only enters when the exact inverse is applied
//! to node values.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::chebyshev::{ChebGrid, ChebSeries, GridFn};
use crate::error::{Error, Result};
use crate::numerics::{solve_linear_exact, DenseMatrix, Matrix, PrecisionCtx, RationalMatrix, Real};

/// Largest denominator allowed for rounded Chebyshev nodes.
pub const NODE_DENOMINATOR_CAP: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    ChebGrid,
    MonomialFull,
    EvenMonomial,
    Lanford,
    RationalNodeMonomial,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::ChebGrid => "cheb",
            BasisKind::MonomialFull => "monomial",
            BasisKind::EvenMonomial => "even",
            BasisKind::Lanford => "lanford",
            BasisKind::RationalNodeMonomial => "rational",
        })
    }
}

impl FromStr for BasisKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cheb" | "chebyshev" => Ok(BasisKind::ChebGrid),
            "monomial" => Ok(BasisKind::MonomialFull),
            "even" => Ok(BasisKind::EvenMonomial),
            "lanford" => Ok(BasisKind::Lanford),
            "rational" => Ok(BasisKind::RationalNodeMonomial),
            _ => Err(Error::Parse(format!(
                "unknown basis `{s}` (expected cheb, monomial, even, lanford or rational)"
            ))),
        }
    }
}

/// A fixed coefficient, `a_index = value`.
///
/// For the monomial kinds `index` is the power of `x`; for the even kind it
/// counts powers of `x^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub index: u32,
    /// Exact decimal value, e.g. `"1"` or `"0"`.
    pub value: String,
}

impl FromStr for Constraint {
    type Err = Error;
    /// Parses `a0=1`.
    fn from_str(s: &str) -> Result<Self> {
        let (lhs, rhs) = s
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("constraint `{s}` is not of the form aK=V")))?;
        let index = lhs
            .trim()
            .strip_prefix('a')
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| Error::Parse(format!("constraint `{s}`: left side must be aK")))?;
        let value = rhs.trim().to_string();
        parse_decimal_rational(&value)?;
        Ok(Constraint { index, value })
    }
}

/// Exact rational from a decimal literal such as `-1.25` or `3e-2`.
fn parse_decimal_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("`{s}` is not a decimal number"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let numer = Integer::from_str_radix(&digits, 10).map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i32;
    let ten = Integer::from(10);
    Ok(if shift >= 0 {
        Rational::from(numer * ten.pow(shift as u32))
    } else {
        Rational::from((numer, ten.pow((-shift) as u32)))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub kind: BasisKind,
    /// Node count for the grid; highest power (monomial) or number of even
    /// powers `m` otherwise.
    pub dim: usize,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
}

impl BasisSpec {
    pub fn cheb(n: usize) -> Self {
        BasisSpec { kind: BasisKind::ChebGrid, dim: n, constraints: Vec::new() }
    }

    pub fn new(kind: BasisKind, dim: usize) -> Self {
        BasisSpec { kind, dim, constraints: Vec::new() }
    }

    pub fn with_constraint(mut self, index: u32, value: &str) -> Self {
        self.constraints.push(Constraint { index, value: value.to_string() });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 4 {
            return Err(Error::InvalidBasis(format!("dimension {} is below 4", self.dim)));
        }
        let mut seen = Vec::new();
        for c in &self.constraints {
            if seen.contains(&c.index) {
                return Err(Error::InvalidBasis(format!("a{} constrained twice", c.index)));
            }
            seen.push(c.index);
            let limit = match self.kind {
                BasisKind::ChebGrid => {
                    return Err(Error::InvalidBasis(
                        "the Chebyshev grid takes point pins, not coefficient constraints".into(),
                    ))
                }
                BasisKind::Lanford => {
                    return Err(Error::InvalidBasis(
                        "the Lanford form already fixes a0 = 1 and has only even powers".into(),
                    ))
                }
                _ => self.dim as u32,
            };
            if c.index > limit {
                return Err(Error::InvalidBasis(format!("a{} is outside the basis", c.index)));
            }
        }
        Ok(())
    }

    /// Powers of `x` carried by the free coefficients.
    fn free_powers(&self) -> Vec<u32> {
        let fixed: Vec<u32> = self.constraints.iter().map(|c| c.index).collect();
        let m = self.dim as u32;
        match self.kind {
            BasisKind::ChebGrid => Vec::new(),
            BasisKind::MonomialFull | BasisKind::RationalNodeMonomial => {
                (0..=m).filter(|p| !fixed.contains(p)).collect()
            }
            BasisKind::EvenMonomial => (0..=m).filter(|j| !fixed.contains(j)).map(|j| 2 * j).collect(),
            BasisKind::Lanford => (1..=m).map(|j| 2 * j).collect(),
        }
    }

    /// `(power, value)` of the fixed part of the polynomial.
    fn fixed_terms(&self) -> Result<Vec<(u32, Rational)>> {
        match self.kind {
            BasisKind::Lanford => Ok(vec![(0, Rational::from(1))]),
            BasisKind::EvenMonomial => self
                .constraints
                .iter()
                .map(|c| Ok((2 * c.index, parse_decimal_rational(&c.value)?)))
                .collect(),
            _ => self.constraints.iter().map(|c| Ok((c.index, parse_decimal_rational(&c.value)?))).collect(),
        }
    }
}

/// Node values to free coefficients, `a = M (v - fixed(x))`.
#[derive(Clone, Debug)]
pub struct InterpolationMatrix {
    /// Exact inverse of the interpolation matrix.
    pub exact: RationalMatrix,
    /// The same matrix rounded to working precision.
    pub float: DenseMatrix,
    pub nodes: Vec<Rational>,
    pub powers: Vec<u32>,
}

impl InterpolationMatrix {
    /// `V[i][j] = x_i^(p_j)`.
    pub fn vandermonde(&self) -> RationalMatrix {
        vandermonde(&self.nodes, &self.powers)
    }
}

fn vandermonde(nodes: &[Rational], powers: &[u32]) -> RationalMatrix {
    Matrix::from_fn(nodes.len(), powers.len(), |i, j| {
        let mut p = Rational::from(1);
        for _ in 0..powers[j] {
            p *= &nodes[i];
        }
        p
    })
}

/// Floating evaluation of `M values`.
pub fn coeffs_from_values(m: &InterpolationMatrix, values: &[Real]) -> Result<Vec<Real>> {
    if values.len() != m.float.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} values for a {}-node interpolation matrix",
            values.len(),
            m.float.cols()
        )));
    }
    Ok(m.float.mul_vec(values))
}

/// Last continued-fraction convergent of `x` whose denominator is at most
/// `cap`.
pub fn rational_approximant(x: f64, cap: u64) -> Rational {
    let negative = x < 0.0;
    let mut rest = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (Integer::from(0), Integer::from(1), Integer::from(1), Integer::from(0));
    let mut best = Rational::from(0);
    for _ in 0..64 {
        let a = rest.floor();
        let ai = Integer::from(a as u64);
        let p2 = Integer::from(&ai * &p1) + &p0;
        let q2 = Integer::from(&ai * &q1) + &q0;
        if q2 > cap {
            break;
        }
        best = Rational::from((p2.clone(), q2.clone()));
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = rest - a;
        if frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    if negative {
        -best
    } else {
        best
    }
}

enum Repr {
    Cheb { grid: ChebGrid, transform: Matrix<Real> },
    Monomial { interp: InterpolationMatrix, fixed: Vec<(u32, Real)>, fixed_at_nodes: Vec<Real>, to_cheb: ChebGrid },
}

/// A concrete basis at a given precision.
/// Serializable description of a built basis: the spec plus its nodes,
/// as exact rationals (`p/q`) for the monomial kinds and decimals for the
/// grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    #[serde(flatten)]
    pub spec: BasisSpec,
    pub nodes: Vec<String>,
    /// Denominator cap of the rounded Chebyshev nodes, when used.
    pub node_denominator_cap: Option<u64>,
}

pub struct Basis {
    spec: BasisSpec,
    ctx: PrecisionCtx,
    nodes: Vec<Real>,
    repr: Repr,
}

pub fn build_basis(spec: &BasisSpec, ctx: &PrecisionCtx) -> Result<Basis> {
    spec.validate()?;
    if spec.kind == BasisKind::ChebGrid {
        let grid = ChebGrid::new(spec.dim, ctx)?;
        let transform = grid.transform_matrix();
        return Ok(Basis { spec: spec.clone(), ctx: *ctx, nodes: grid.nodes().to_vec(), repr: Repr::Cheb { grid, transform } });
    }
    let powers = spec.free_powers();
    let count = powers.len();
    let m = spec.dim as i64;
    let nodes: Vec<Rational> = match spec.kind {
        BasisKind::MonomialFull => ChebGrid::new(count, ctx)?
            .nodes()
            .iter()
            .map(|x| rational_approximant(x.to_f64(), NODE_DENOMINATOR_CAP))
            .collect(),
        BasisKind::RationalNodeMonomial => {
            let c = count as i64;
            (0..c).map(|i| Rational::from((2 * i + 1 - c, c))).collect()
        }
        BasisKind::EvenMonomial => {
            let start = if spec.constraints.iter().any(|c| c.index == 0) { 1 } else { 0 };
            (start..=m).map(|i| Rational::from((i, m))).collect()
        }
        BasisKind::Lanford => (1..=m).map(|i| Rational::from((i, m))).collect(),
        BasisKind::ChebGrid => unreachable!(),
    };
    if nodes.len() != count {
        return Err(Error::InvalidBasis(format!("{} nodes for {} free coefficients", nodes.len(), count)));
    }
    let v = vandermonde(&nodes, &powers);
    let exact = solve_linear_exact(&v, &RationalMatrix::rational_identity(count))?;
    let float = exact.map(|q| ctx.rational(q));
    let fixed: Vec<(u32, Real)> = spec.fixed_terms()?.iter().map(|(p, q)| (*p, ctx.rational(q))).collect();
    let real_nodes: Vec<Real> = nodes.iter().map(|q| ctx.rational(q)).collect();
    let fixed_at_nodes = real_nodes.iter().map(|x| eval_terms(&fixed, x)).collect();
    let degree = powers.iter().chain(fixed.iter().map(|(p, _)| p)).copied().max().unwrap_or(0) as usize;
    let to_cheb = ChebGrid::new(degree.max(1) + 1, ctx)?;
    Ok(Basis {
        spec: spec.clone(),
        ctx: *ctx,
        nodes: real_nodes,
        repr: Repr::Monomial {
            interp: InterpolationMatrix { exact, float, nodes, powers },
            fixed,
            fixed_at_nodes,
            to_cheb,
        },
    })
}

fn eval_terms(terms: &[(u32, Real)], x: &Real) -> Real {
    terms.iter().fold(x.zero_like(), |acc, (p, c)| acc + c * x.powi(*p as i32))
}

impl Basis {
    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn ctx(&self) -> &PrecisionCtx {
        &self.ctx
    }

    pub fn nodes(&self) -> &[Real] {
        &self.nodes
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn interpolation(&self) -> Option<&InterpolationMatrix> {
        match &self.repr {
            Repr::Cheb { .. } => None,
            Repr::Monomial { interp, .. } => Some(interp),
        }
    }

    /// The Chebyshev grid, for the grid basis.
    pub fn grid(&self) -> Option<&ChebGrid> {
        match &self.repr {
            Repr::Cheb { grid, .. } => Some(grid),
            Repr::Monomial { .. } => None,
        }
    }

    pub fn descriptor(&self) -> BasisDescriptor {
        let nodes = match &self.repr {
            Repr::Cheb { .. } => self.nodes.iter().map(|x| x.to_decimal(self.ctx.digits() as usize)).collect(),
            Repr::Monomial { interp, .. } => interp.nodes.iter().map(|q| q.to_string()).collect(),
        };
        let cap = (self.spec.kind == BasisKind::MonomialFull).then_some(NODE_DENOMINATOR_CAP);
        BasisDescriptor { spec: self.spec.clone(), nodes, node_denominator_cap: cap }
    }

    /// `||M|| ||V||` of the interpolation in the infinity norm; 1 for the
    /// grid, whose node values are well-conditioned coordinates.
    pub fn condition(&self) -> Real {
        match &self.repr {
            Repr::Cheb { .. } => self.ctx.one(),
            Repr::Monomial { interp, .. } => {
                let v = interp.vandermonde().map(|q| self.ctx.rational(q));
                (interp.float.norm_inf() * v.norm_inf()).max(&self.ctx.one()).clone()
            }
        }
    }

    /// Free coefficients for the given node values.
    pub fn coefficients(&self, values: &[Real]) -> Result<Vec<Real>> {
        match &self.repr {
            Repr::Cheb { grid, .. } => Ok(grid.to_series(&GridFn::new(values.to_vec()))?.coeffs),
            Repr::Monomial { interp, fixed_at_nodes, .. } => {
                let shifted: Vec<Real> = values.iter().zip(fixed_at_nodes).map(|(v, f)| v - f).collect();
                coeffs_from_values(interp, &shifted)
            }
        }
    }

    /// Monomial coefficients of the represented polynomial, index = power.
    pub fn monomial_coefficients(&self, values: &[Real]) -> Result<Vec<Real>> {
        match &self.repr {
            Repr::Cheb { .. } => Ok(self.series(values)?.to_monomial()),
            Repr::Monomial { interp, fixed, .. } => {
                let a = self.coefficients(values)?;
                let degree = interp.powers.iter().chain(fixed.iter().map(|(p, _)| p)).copied().max().unwrap_or(0);
                let mut out = self.ctx.zeros(degree as usize + 1);
                for (p, c) in interp.powers.iter().zip(&a) {
                    out[*p as usize] += c;
                }
                for (p, c) in fixed {
                    out[*p as usize] += c;
                }
                Ok(out)
            }
        }
    }

    /// The represented polynomial as a Chebyshev series.
    pub fn series(&self, values: &[Real]) -> Result<ChebSeries> {
        if values.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} values for a {}-node basis", values.len(), self.dim())));
        }
        match &self.repr {
            Repr::Cheb { grid, .. } => grid.to_series(&GridFn::new(values.to_vec())),
            Repr::Monomial { to_cheb, .. } => {
                let mono = self.monomial_coefficients(values)?;
                let samples = to_cheb.nodes().iter().map(|x| horner(&mono, x)).collect();
                to_cheb.to_series(&GridFn::new(samples))
            }
        }
    }

    /// Node values of an arbitrary function given as a series.
    pub fn values_of(&self, g: &ChebSeries) -> Vec<Real> {
        self.nodes.iter().map(|x| g.eval(x)).collect()
    }

    /// `phi_j(y)`: derivative of the represented polynomial at `y` with
    /// respect to the `j`-th node value.
    pub fn cardinals_at(&self, y: &Real) -> Vec<Real> {
        match &self.repr {
            Repr::Cheb { grid, transform } => grid.cardinals_at(y, transform),
            Repr::Monomial { interp, .. } => {
                let pw: Vec<Real> = interp.powers.iter().map(|p| y.powi(*p as i32)).collect();
                (0..self.dim())
                    .map(|j| {
                        let mut acc = y.zero_like();
                        for (k, yp) in pw.iter().enumerate() {
                            acc += &interp.float[(k, j)] * yp;
                        }
                        acc
                    })
                    .collect()
            }
        }
    }

    /// Writes `g(y) = sum_j w_j v_j + c` and returns `(w, c)`.
    pub fn point_functional(&self, y: &Real) -> (Vec<Real>, Real) {
        let w = self.cardinals_at(y);
        let c = match &self.repr {
            Repr::Cheb { .. } => self.ctx.zero(),
            Repr::Monomial { fixed, fixed_at_nodes, .. } => {
                let mut c = eval_terms(fixed, y);
                for (wj, fj) in w.iter().zip(fixed_at_nodes) {
                    c -= wj * fj;
                }
                c
            }
        };
        (w, c)
    }

    /// Writes coefficient `a_index` as `sum_j w_j v_j + c`. For the grid the
    /// index is a Chebyshev coefficient, otherwise a free power.
    pub fn coefficient_functional(&self, index: u32) -> Result<(Vec<Real>, Real)> {
        match &self.repr {
            Repr::Cheb { transform, .. } => {
                let k = index as usize;
                if k >= self.dim() {
                    return Err(Error::InvalidIndex(index as i64));
                }
                Ok((transform.row(k).to_vec(), self.ctx.zero()))
            }
            Repr::Monomial { interp, fixed_at_nodes, .. } => {
                let k = interp
                    .powers
                    .iter()
                    .position(|&p| p == index)
                    .ok_or(Error::InvalidIndex(index as i64))?;
                let w = interp.float.row(k).to_vec();
                let mut c = self.ctx.zero();
                for (wj, fj) in w.iter().zip(fixed_at_nodes) {
                    c -= wj * fj;
                }
                Ok((w, c))
            }
        }
    }
}

fn horner(coeffs: &[Real], x: &Real) -> Real {
    let mut acc = x.zero_like();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionCtx {
        PrecisionCtx::new(40).unwrap()
    }

    #[test]
    fn decimal_constraints() {
        let c: Constraint = "a0=1.25".parse().unwrap();
        assert_eq!(c.index, 0);
        assert_eq!(parse_decimal_rational(&c.value).unwrap(), Rational::from((5, 4)));
        assert_eq!(parse_decimal_rational("-3e-2").unwrap(), Rational::from((-3, 100)));
        assert!("b0=1".parse::<Constraint>().is_err());
        assert!("a1=x".parse::<Constraint>().is_err());
    }

    #[test]
    fn approximants() {
        assert_eq!(rational_approximant(std::f64::consts::PI, 1000), Rational::from((355, 113)));
        assert_eq!(rational_approximant(-0.5, 1000), Rational::from((-1, 2)));
        assert_eq!(rational_approximant(0.0, 1000), Rational::from(0));
    }

    #[test]
    fn even_basis_recovers_quartic() {
        let ctx = ctx();
        let basis = build_basis(&BasisSpec::new(BasisKind::EvenMonomial, 4), &ctx).unwrap();
        let interp = basis.interpolation().unwrap();
        assert!(interp.exact.exact_mul(&interp.vandermonde()).is_identity());
        let values: Vec<Real> = basis.nodes().iter().map(|x| x.powi(4)).collect();
        let a = basis.coefficients(&values).unwrap();
        for (j, c) in a.iter().enumerate() {
            let want = if j == 2 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < ctx.pow10(-30));
        }
    }

    #[test]
    fn lanford_and_constraints() {
        let ctx = ctx();
        let basis = build_basis(&BasisSpec::new(BasisKind::Lanford, 6), &ctx).unwrap();
        assert_eq!(basis.dim(), 6);
        let ones = vec![ctx.one(); 6];
        assert!(basis.coefficients(&ones).unwrap().iter().all(|c| c.abs() < ctx.pow10(-30)));
        assert!(BasisSpec::new(BasisKind::Lanford, 6).with_constraint(0, "1").validate().is_err());

        let spec = BasisSpec::new(BasisKind::MonomialFull, 9).with_constraint(0, "1").with_constraint(1, "0");
        let basis = build_basis(&spec, &ctx).unwrap();
        assert_eq!(basis.dim(), 8);
        // g = 1 - x^2 is representable; its coefficients come back exactly
        let values: Vec<Real> = basis.nodes().iter().map(|x| ctx.one() - x.square()).collect();
        let mono = basis.monomial_coefficients(&values).unwrap();
        assert!((&mono[0] - 1.0).abs() < ctx.pow10(-30));
        assert!((&mono[2] + 1.0).abs() < ctx.pow10(-30));
        let (w, c) = basis.point_functional(&ctx.parse("0.3").unwrap());
        let g03 = crate::numerics::dot(&w, &values) + c;
        assert!((g03 - ctx.parse("0.91").unwrap()).abs() < ctx.pow10(-30));
    }

    #[test]
    fn series_matches_polynomial() {
        let ctx = ctx();
        let basis = build_basis(&BasisSpec::new(BasisKind::RationalNodeMonomial, 6), &ctx).unwrap();
        let poly = |x: &Real| x.powi(5) * 0.5 - x.square() + 0.25;
        let values: Vec<Real> = basis.nodes().iter().map(poly).collect();
        let s = basis.series(&values).unwrap();
        for x in [-0.9, -0.1, 0.4, 1.3] {
            let x = ctx.real(x);
            assert!((s.eval(&x) - poly(&x)).abs() < ctx.pow10(-30));
        }
    }
}
