//! Spectra of the linearized operator at a fixed point.
//!
//! Eigenvalues are tagged against powers of the spectral base `b = s K`
//! (`b = alpha` for `T`, `T4`; `-alpha` for `T2`, `T3` at the normalized
//! fixed point): `lambda = b^(1-k)`. The largest untagged real eigenvalue
//! whose eigenfunction is even is reported as `delta`.

use serde::{Deserialize, Serialize};

use crate::bases::{Basis, BasisDescriptor};
use crate::chebyshev::{ChebGrid, ChebSeries};
use crate::error::{Error, Result};
use crate::numerics::{eig_dense, Complex, DenseMatrix, PrecisionCtx, Real};
use crate::operators::{
    explicit_eigenfunction, linearized_apply, spectral_base, ExplicitKind, OperatorSpec, Variant,
};
use crate::solver::NewtonResult;

/// Range of `k` tried when tagging `lambda = b^(1-k)`.
pub const K_RANGE: std::ops::RangeInclusive<i32> = -3..=12;
/// Default relative tolerance for tagging.
pub const TAG_TOLERANCE: f64 = 1e-6;
/// Relative threshold of the parity test.
pub const PARITY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    AlphaPower(i32),
    Delta,
    Unexplained,
}

impl Tag {
    pub fn name(&self) -> &'static str {
        match self {
            Tag::AlphaPower(_) => "alpha_power",
            Tag::Delta => "delta",
            Tag::Unexplained => "unexplained",
        }
    }

    pub fn k(&self) -> Option<i32> {
        match self {
            Tag::AlphaPower(k) => Some(*k),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Eigen {
    pub value: Complex,
    pub residual: Real,
    /// Node values of the eigenfunction in the basis of the run.
    pub vector: Vec<Complex>,
    pub tag: Tag,
    pub parity: Parity,
    /// `|lambda - b^(1-k)|` for tagged values.
    pub match_error: Option<Real>,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub spec: OperatorSpec,
    pub basis: BasisDescriptor,
    pub digits: u32,
    pub n: usize,
    pub alpha: Real,
    /// `s K`, the number whose powers were used for tagging.
    pub tag_base: Real,
    pub delta: Option<Real>,
    pub eigenvalues: Vec<Eigen>,
}

impl SpectrumReport {
    pub fn values(&self) -> Vec<Complex> {
        self.eigenvalues.iter().map(|e| e.value.clone()).collect()
    }

    /// Real parts of the eigenvalues, in report order.
    pub fn real_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.value.re.to_f64()).collect()
    }

    /// Number of leading eigenvalues that are trusted: trailing ones are
    /// dominated by projection error.
    pub fn trusted(&self) -> usize {
        (2 * self.n / 3).max(1).min(self.eigenvalues.len())
    }

    /// Distance from `target` to the nearest reported eigenvalue.
    pub fn distance_to(&self, target: &Real) -> Real {
        self.eigenvalues
            .iter()
            .map(|e| Complex::new(&e.value.re - target, e.value.im.clone()).abs())
            .min_by(|a, b| a.total_cmp(b))
            .unwrap_or_else(|| target.like(f64::INFINITY))
    }

    pub fn to_json(&self) -> SpectrumJson {
        let d = self.digits as usize;
        SpectrumJson {
            operator: self.spec.variant.to_string(),
            linearization: self.spec.linearization.to_string(),
            basis: self.basis.clone(),
            digits: self.digits,
            n: self.n,
            alpha: self.alpha.to_decimal(d),
            tag_base: self.tag_base.to_decimal(d),
            delta: self.delta.as_ref().map(|x| x.to_decimal(d)),
            eigenvalues: self
                .eigenvalues
                .iter()
                .map(|e| EigenJson {
                    re: e.value.re.to_decimal(d),
                    im: e.value.im.to_decimal(d),
                    modulus: e.value.abs().to_decimal(d),
                    residual: e.residual.to_decimal(d),
                    tag: e.tag.name().to_string(),
                    k: e.tag.k(),
                    parity: e.parity,
                    match_error: e.match_error.as_ref().map(|x| x.to_decimal(d)),
                })
                .collect(),
        }
    }
}

/// Serialized form of a [`SpectrumReport`]; numbers are decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub operator: String,
    pub linearization: String,
    pub basis: BasisDescriptor,
    pub digits: u32,
    pub n: usize,
    pub alpha: String,
    pub tag_base: String,
    pub delta: Option<String>,
    pub eigenvalues: Vec<EigenJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenJson {
    pub re: String,
    pub im: String,
    pub modulus: String,
    pub residual: String,
    pub tag: String,
    pub k: Option<i32>,
    pub parity: Parity,
    pub match_error: Option<String>,
}

/// Eigen-decomposition of `dT(g)` recovered from the stored `I - dT(g)`.
pub fn compute_spectrum(result: &NewtonResult, basis: &Basis, tol: &Real) -> Result<SpectrumReport> {
    let m = result.jacobian.identity_minus();
    report_from_matrix(result.spec, basis, &m, &result.series, result.scaling.value.clone(), tol)
}

/// Spectrum of the linearization `spec` at an arbitrary `g`, e.g. one read
/// back from disk.
pub fn spectrum_at(spec: OperatorSpec, basis: &Basis, g: &ChebSeries, tol: &Real) -> Result<SpectrumReport> {
    let m = crate::solver::linearized_matrix(spec, basis, g)?;
    let alpha = crate::operators::scaling_of(spec.variant, g)?.value;
    report_from_matrix(spec, basis, &m, g, alpha, tol)
}

fn report_from_matrix(
    spec: OperatorSpec,
    basis: &Basis,
    m: &DenseMatrix,
    g: &ChebSeries,
    alpha: Real,
    tol: &Real,
) -> Result<SpectrumReport> {
    let ctx = *basis.ctx();
    let pairs = eig_dense(m, tol, &ctx)?;
    let base = spectral_base(spec.variant, g)?;
    let values: Vec<Complex> = pairs.iter().map(|p| p.value.clone()).collect();
    let tags = classify_spectrum(&values, &base, TAG_TOLERANCE)?;
    let mut eigenvalues: Vec<Eigen> = pairs
        .into_iter()
        .zip(tags)
        .map(|(p, (tag, err))| {
            let parity = eigenfunction_parity(&p.vector, basis);
            Eigen { value: p.value, residual: p.residual, vector: p.vector, tag, parity, match_error: err }
        })
        .collect();
    let delta = assign_delta(&mut eigenvalues);
    Ok(SpectrumReport {
        spec,
        basis: basis.descriptor(),
        digits: ctx.digits(),
        n: basis.dim(),
        alpha,
        tag_base: base,
        delta,
        eigenvalues,
    })
}

fn assign_delta(eigenvalues: &mut [Eigen]) -> Option<Real> {
    let idx = eigenvalues
        .iter()
        .position(|e| e.tag == Tag::Unexplained && e.value.is_real() && e.parity == Parity::Even)?;
    eigenvalues[idx].tag = Tag::Delta;
    Some(eigenvalues[idx].value.re.clone())
}

/// Tags each eigenvalue as `b^(1-k)` for `k` in [`K_RANGE`] when it lies
/// within relative distance `tol_rel`. `Delta` is assigned afterwards by
/// [`compute_spectrum`], which knows the parities.
pub fn classify_spectrum(eigs: &[Complex], base: &Real, tol_rel: f64) -> Result<Vec<(Tag, Option<Real>)>> {
    let powers: Vec<(i32, Real)> = K_RANGE.map(|k| (k, base.powi(1 - k))).collect();
    eigs.iter()
        .enumerate()
        .map(|(index, lambda)| {
            let hits: Vec<(i32, Real)> = powers
                .iter()
                .filter_map(|(k, p)| {
                    let err = Complex::new(&lambda.re - p, lambda.im.clone()).abs();
                    (err <= p.abs() * tol_rel).then_some((*k, err))
                })
                .collect();
            match hits.len() {
                0 => Ok((Tag::Unexplained, None)),
                1 => {
                    let (k, err) = hits.into_iter().next().expect("one hit");
                    Ok((Tag::AlphaPower(k), Some(err)))
                }
                _ => Err(Error::AmbiguousMatch { index, ks: hits.into_iter().map(|(k, _)| k).collect() }),
            }
        })
        .collect()
}

/// The 33 symmetric sample points `-1 + j/16`.
pub fn parity_points(ctx: &PrecisionCtx) -> Vec<Real> {
    (0..=32).map(|j| ctx.int(j - 16) / 16).collect()
}

/// Values of the eigenfunction with node values `v` at the points `xs`.
pub fn eigenfunction_values(v: &[Complex], basis: &Basis, xs: &[Real]) -> Vec<Complex> {
    xs.iter()
        .map(|x| {
            let w = basis.cardinals_at(x);
            let mut re = x.zero_like();
            let mut im = x.zero_like();
            for (wj, vj) in w.iter().zip(v) {
                re += wj * &vj.re;
                im += wj * &vj.im;
            }
            Complex::new(re, im)
        })
        .collect()
}

pub fn eigenfunction_parity(v: &[Complex], basis: &Basis) -> Parity {
    let xs = parity_points(basis.ctx());
    let h = eigenfunction_values(v, basis, &xs);
    parity_of_samples(&h)
}

/// Parity of samples taken at points symmetric about the origin.
pub fn parity_of_samples(h: &[Complex]) -> Parity {
    let norm = h.iter().map(Complex::max_abs).fold(None::<Real>, |acc, x| match acc {
        Some(a) if a >= x => Some(a),
        _ => Some(x),
    });
    let Some(norm) = norm else { return Parity::Even };
    if norm.is_zero() {
        return Parity::Even;
    }
    let tol = &norm * PARITY_TOLERANCE;
    let m = h.len();
    let mut even = true;
    let mut odd = true;
    for i in 0..m {
        let mirror = &h[m - 1 - i];
        if h[i].sub(mirror).max_abs() > tol {
            even = false;
        }
        if h[i].add(mirror).max_abs() > tol {
            odd = false;
        }
    }
    match (even, odd) {
        (true, _) => Parity::Even,
        (false, true) => Parity::Odd,
        _ => Parity::Mixed,
    }
}

/// `||dT h - lambda h||_inf / ||h||_inf` for the closed-form eigenfunction
/// of the given kind, on `grid`.
pub fn verify_explicit(
    g: &ChebSeries,
    spec: OperatorSpec,
    kind: ExplicitKind,
    k: i64,
    lambda: &Real,
    grid: &ChebGrid,
) -> Result<Real> {
    let sign_flipped = matches!(spec.variant, Variant::T2 | Variant::T3);
    if sign_flipped && kind != ExplicitKind::Dilation && k % 2 == 0 {
        return Err(Error::NoExplicitForm { variant: spec.variant.to_string(), k });
    }
    let h = explicit_eigenfunction(kind, g, k)?;
    let image = linearized_apply(spec, g, &h, grid)?;
    let hv = grid.to_grid(&h)?;
    let mut worst = lambda.zero_like();
    for (a, b) in image.values.iter().zip(&hv.values) {
        let d = (a - lambda * b).abs();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst / hv.norm_inf())
}

/// Expected eigenvalue `b^(1-k)` of an explicit eigenfunction.
pub fn explicit_eigenvalue(variant: Variant, g: &ChebSeries, kind: ExplicitKind, k: i64) -> Result<Real> {
    if matches!(variant, Variant::T2 | Variant::T3) && kind != ExplicitKind::Dilation && k % 2 == 0 {
        return Err(Error::NoExplicitForm { variant: variant.to_string(), k });
    }
    let base = spectral_base(variant, g)?;
    Ok(match kind {
        ExplicitKind::Dilation => match variant {
            // the dilation mode is tied to the family of fixed points
            Variant::T3 | Variant::T4 => base.like(1.0),
            Variant::T | Variant::T2 => base.square(),
        },
        _ => base.powi(1 - k as i32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_powers_and_leaves_others() {
        let ctx = PrecisionCtx::new(30).unwrap();
        let alpha = ctx.real(-2.502907875095892);
        let eigs = vec![
            Complex::from_real(alpha.square()),
            Complex::from_real(ctx.real(4.669201609)),
            Complex::from_real(alpha.clone()),
            Complex::from_real(ctx.real(-0.123652712)),
        ];
        let tags = classify_spectrum(&eigs, &alpha, 1e-6).unwrap();
        assert_eq!(tags[0].0, Tag::AlphaPower(-1));
        assert_eq!(tags[1].0, Tag::Unexplained);
        assert_eq!(tags[2].0, Tag::AlphaPower(0));
        assert_eq!(tags[3].0, Tag::Unexplained);
        // base 1 makes every power coincide
        assert!(matches!(
            classify_spectrum(&[Complex::from_real(ctx.one())], &ctx.one(), 1e-6),
            Err(Error::AmbiguousMatch { index: 0, .. })
        ));
    }

    #[test]
    fn parity_of_symmetric_samples() {
        let ctx = PrecisionCtx::new(30).unwrap();
        let xs = parity_points(&ctx);
        let even: Vec<Complex> = xs.iter().map(|x| Complex::from_real(x.square() + 1)).collect();
        let odd: Vec<Complex> = xs.iter().map(|x| Complex::from_real(x.powi(3))).collect();
        let mixed: Vec<Complex> = xs.iter().map(|x| Complex::from_real(x.powi(3) + 1)).collect();
        assert_eq!(parity_of_samples(&even), Parity::Even);
        assert_eq!(parity_of_samples(&odd), Parity::Odd);
        assert_eq!(parity_of_samples(&mixed), Parity::Mixed);
        assert_eq!(parity_of_samples(&vec![Complex::from_real(ctx.one()); 33]), Parity::Even);
    }
}
