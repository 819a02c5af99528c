//! On-disk forms of solutions and spectra.
//!
//! Numbers that carry working precision are written as decimal strings with
//! `D` significant digits, so files round-trip and identical runs produce
//! identical bytes.

use serde::{Deserialize, Serialize};

use crate::bases::{Basis, BasisDescriptor};
use crate::chebyshev::{decay_report, ChebSeries, DecayReport};
use crate::error::{Error, Result};
use crate::numerics::PrecisionCtx;
use crate::operators::{Linearization, OperatorSpec, Variant};
use crate::solver::{convergence_diagnostics, NewtonResult};
use crate::spectrum::{SpectrumJson, SpectrumReport};

/// A converged fixed point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub operator: Variant,
    pub linearization: Linearization,
    pub basis: BasisDescriptor,
    pub digits: u32,
    pub n: usize,
    /// `alpha` for `T`, `T2`; `a = -alpha` for `T3`, `T4`.
    pub scaling: String,
    pub chebyshev: Vec<String>,
    pub monomial: Vec<String>,
    pub node_values: Vec<String>,
    pub history: Vec<f64>,
    pub convergence_exponent: Option<f64>,
    pub residual: String,
    /// Equations replaced by pin conditions; they hold only to
    /// discretization accuracy.
    #[serde(default)]
    pub pinned_rows: Vec<usize>,
    pub decay: DecayReport,
}

impl SolutionFile {
    pub fn new(result: &NewtonResult, basis: &Basis) -> Result<Self> {
        let ctx = basis.ctx();
        let d = ctx.digits() as usize;
        let monomial = basis.monomial_coefficients(&result.values)?;
        Ok(SolutionFile {
            operator: result.spec.variant,
            linearization: result.spec.linearization,
            basis: basis.descriptor(),
            digits: ctx.digits(),
            n: basis.dim(),
            scaling: result.scaling.value.to_decimal(d),
            chebyshev: result.series.coeffs.iter().map(|c| c.to_decimal(d)).collect(),
            monomial: monomial.iter().map(|c| c.to_decimal(d)).collect(),
            node_values: result.values.iter().map(|v| v.to_decimal(d)).collect(),
            history: result.history.clone(),
            convergence_exponent: convergence_diagnostics(&result.history, ctx.digits()).exponent,
            residual: result.residual.to_decimal(d),
            pinned_rows: result.pinned_rows.clone(),
            decay: decay_report(&result.series, ctx)?,
        })
    }

    pub fn spec(&self) -> OperatorSpec {
        OperatorSpec::new(self.operator, self.linearization)
    }

    /// The fixed point as a Chebyshev series at precision `ctx`.
    pub fn series(&self, ctx: &PrecisionCtx) -> Result<ChebSeries> {
        ChebSeries::new(self.chebyshev.iter().map(|c| ctx.parse(c)).collect::<Result<_>>()?)
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("solution file: {e}")))
    }
}

pub fn spectrum_json(report: &SpectrumReport) -> Result<String> {
    to_json(&report.to_json())
}

pub fn spectrum_from_json(text: &str) -> Result<SpectrumJson> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("spectrum file: {e}")))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// `index<TAB>chebyshev<TAB>monomial` rows under a `#` header.
pub fn coefficients_tsv(solution: &SolutionFile) -> String {
    let mut out = String::from("# k\tchebyshev\tmonomial\n");
    let rows = solution.chebyshev.len().max(solution.monomial.len());
    for k in 0..rows {
        let c = solution.chebyshev.get(k).map_or("", String::as_str);
        let m = solution.monomial.get(k).map_or("", String::as_str);
        out.push_str(&format!("{k}\t{c}\t{m}\n"));
    }
    out
}

/// Spectrum as CSV; one row per eigenvalue, precision-carrying fields as
/// full decimal strings.
pub fn spectrum_csv(report: &SpectrumJson) -> String {
    let mut out = String::from("index,re,im,modulus,residual,tag,k,parity,match_error\n");
    for (i, e) in report.eigenvalues.iter().enumerate() {
        let parity = serde_json::to_value(e.parity).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            i + 1,
            e.re,
            e.im,
            e.modulus,
            e.residual,
            e.tag,
            e.k.map(|k| k.to_string()).unwrap_or_default(),
            parity,
            e.match_error.clone().unwrap_or_default()
        ));
    }
    out
}
