#![allow(dead_code)]

use feigen_core::bases::{build_basis, Basis, BasisSpec};
use feigen_core::numerics::{PrecisionCtx, Real};
use feigen_core::operators::{OperatorSpec, Variant};
use feigen_core::solver::{default_seed, newton_solve, NewtonConfig, NewtonResult, Pin};
use feigen_core::spectrum::{compute_spectrum, SpectrumReport};

pub const REFERENCE_SPECTRUM: [f64; 11] = [
    6.264547831,
    4.669201609,
    -2.502907875,
    -0.399535280,
    0.159628440,
    -0.123652712,
    -0.063777193,
    -0.057307021,
    0.025481238,
    -0.010180653,
    -0.010145805,
];

pub fn ctx() -> PrecisionCtx {
    PrecisionCtx::new(64).unwrap()
}

pub struct Run {
    pub basis: Basis,
    pub result: NewtonResult,
    pub spectrum: SpectrumReport,
}

pub fn run(spec: OperatorSpec, basis: BasisSpec, config: NewtonConfig, ctx: &PrecisionCtx) -> Run {
    let basis = build_basis(&basis, ctx).unwrap();
    let seed = default_seed(1, 40, ctx);
    let result = newton_solve(spec, &basis, &seed, &config).unwrap();
    let spectrum = compute_spectrum(&result, &basis, &ctx.pow10(-20)).unwrap();
    Run { basis, result, spectrum }
}

/// Pinned at `g(0) = 1` for the origin-scaled variants.
pub fn config_for(variant: Variant, ctx: &PrecisionCtx) -> NewtonConfig {
    let config = NewtonConfig::exact();
    if variant.scales_at_origin() {
        config.with_pin(Pin::Point { x: ctx.zero(), value: ctx.one() })
    } else {
        config
    }
}

pub fn quadratic(n: usize, ctx: &PrecisionCtx) -> Run {
    run(OperatorSpec::full(Variant::T), BasisSpec::cheb(n), NewtonConfig::exact(), ctx)
}

pub fn max_abs(xs: impl IntoIterator<Item = Real>) -> f64 {
    xs.into_iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max)
}
