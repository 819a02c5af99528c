mod common;

use common::{config_for, ctx, quadratic, run, REFERENCE_SPECTRUM};
use feigen_core::bases::{build_basis, BasisSpec};
use feigen_core::chebyshev::ChebGrid;
use feigen_core::operators::{ExplicitKind, Linearization, OperatorSpec, Variant};
use feigen_core::solver::{convergence_diagnostics, default_seed, newton_solve, residual, NewtonConfig};
use feigen_core::spectrum::{explicit_eigenvalue, verify_explicit, Parity, Tag};
use feigen_core::Error;

#[test]
fn quadratic_fixed_point() {
    let ctx = ctx();
    let q = quadratic(32, &ctx);
    let r = &q.result;
    assert!((r.scaling.value.to_f64() + 2.502907875095892).abs() < 1e-14);
    let phi = residual(Variant::T, &r.series, q.basis.nodes()).unwrap();
    let scale = r.series.eval(&ctx.zero()).to_f64().max(1.0);
    assert!(common::max_abs(phi) <= 1e-52 * scale);
    let exponent = convergence_diagnostics(&r.history, 64).exponent.unwrap();
    assert!((1.7..=2.3).contains(&exponent), "exponent {exponent}");
    // the highest retained coefficient has a known value
    let tail = r.series.coeffs[30].to_f64();
    assert!((tail - 0.4571053006e-22).abs() < 1e-31, "{tail:e}");
}

#[test]
fn restart_from_solution_is_immediate() {
    let ctx = ctx();
    let q = quadratic(32, &ctx);
    let again = newton_solve(OperatorSpec::full(Variant::T), &q.basis, &q.result.series, &NewtonConfig::exact()).unwrap();
    assert!(again.history.len() <= 2, "{:?}", again.history);
}

#[test]
fn jacobian_mode_does_not_change_the_solution() {
    let ctx = ctx();
    let basis = build_basis(&BasisSpec::cheb(24), &ctx).unwrap();
    let seed = default_seed(1, 24, &ctx);
    let spec = OperatorSpec::full(Variant::T);
    let fd = newton_solve(spec, &basis, &seed, &NewtonConfig::default()).unwrap();
    let exact = newton_solve(spec, &basis, &seed, &NewtonConfig::exact()).unwrap();
    let diff = common::max_abs(fd.values.iter().zip(&exact.values).map(|(a, b)| a - b));
    assert!(diff <= 1e-52);
}

#[test]
fn origin_scaled_variants_need_a_pin() {
    let ctx = ctx();
    let basis = build_basis(&BasisSpec::cheb(32), &ctx).unwrap();
    let seed = default_seed(1, 32, &ctx);
    for v in [Variant::T3, Variant::T4] {
        let err = newton_solve(OperatorSpec::full(v), &basis, &seed, &NewtonConfig::exact()).unwrap_err();
        assert!(matches!(err, Error::SingularJacobian { .. }), "{v}: {err}");
    }
    let t = quadratic(32, &ctx);
    let t4 = newton_solve(OperatorSpec::full(Variant::T4), &basis, &seed, &config_for(Variant::T4, &ctx)).unwrap();
    let diff = common::max_abs(t4.values.iter().zip(&t.result.values).map(|(a, b)| a - b));
    assert!(diff < 1e-20, "{diff:e}");
    assert!((&t4.scaling.value + &t.result.scaling.value).abs().to_f64() < 1e-20);
}

#[test]
fn quadratic_spectrum_is_classified() {
    let ctx = ctx();
    let q = quadratic(32, &ctx);
    let s = &q.spectrum;
    for (e, want) in s.eigenvalues.iter().zip(REFERENCE_SPECTRUM) {
        assert!((e.value.re.to_f64() - want).abs() < 1e-8);
        assert!(e.value.is_real());
    }
    let tags: Vec<Tag> = s.eigenvalues.iter().take(11).map(|e| e.tag).collect();
    use Tag::*;
    assert_eq!(
        tags,
        [
            AlphaPower(-1),
            Delta,
            AlphaPower(0),
            AlphaPower(2),
            AlphaPower(3),
            Unexplained,
            AlphaPower(4),
            Unexplained,
            AlphaPower(5),
            AlphaPower(6),
            Unexplained
        ]
    );
    assert_eq!(s.eigenvalues.iter().filter(|e| e.tag == Delta).count(), 1);
    assert_eq!(s.eigenvalues[1].parity, Parity::Even);
    assert_eq!(s.eigenvalues[2].parity, Parity::Mixed);
    for i in [5, 7, 10] {
        assert_eq!(s.eigenvalues[i].parity, Parity::Even);
    }
    let json = s.to_json();
    assert_eq!(json.eigenvalues.len(), 32);
    assert_eq!(json.operator, "T");
    assert_eq!(json.eigenvalues[1].tag, "delta");
}

#[test]
fn sign_flipped_variants() {
    let ctx = ctx();
    let q = quadratic(32, &ctx);
    let alpha = q.result.scaling.value.to_f64();
    let t2 = run(OperatorSpec::full(Variant::T2), BasisSpec::cheb(32), config_for(Variant::T2, &ctx), &ctx);
    let v: Vec<f64> = t2.spectrum.real_values();
    for (got, want) in v.iter().zip([alpha * alpha, 4.669201609102991, -alpha, -1.0 / alpha, 1.0 / (alpha * alpha)]) {
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn explicit_eigenfunctions() {
    let ctx = ctx();
    let q = quadratic(32, &ctx);
    let g = &q.result.series;
    let grid = ChebGrid::new(32, &ctx).unwrap();
    for lin in [Linearization::FullDerivative, Linearization::FrozenAlpha] {
        let spec = OperatorSpec::new(Variant::T, lin);
        let kind = if lin == Linearization::FullDerivative { ExplicitKind::Full } else { ExplicitKind::Frozen };
        for k in [0, 2, 3, 4, 5] {
            let lambda = explicit_eigenvalue(Variant::T, g, kind, k).unwrap();
            let res = verify_explicit(g, spec, kind, k, &lambda, &grid).unwrap().to_f64();
            assert!(res <= 1e-15, "{lin} k={k}: {res:e}");
        }
    }
    let alpha2 = q.result.scaling.value.square();
    let res = verify_explicit(g, OperatorSpec::full(Variant::T), ExplicitKind::Dilation, 1, &alpha2, &grid).unwrap();
    assert!(res.to_f64() <= 1e-15);
    let res = verify_explicit(g, OperatorSpec::full(Variant::T4), ExplicitKind::Dilation, 1, &ctx.one(), &grid).unwrap();
    assert!(res.to_f64() <= 1e-15);
    // an eigenfunction that is not one fails the check
    let wrong = verify_explicit(g, OperatorSpec::full(Variant::T), ExplicitKind::Dilation, 1, &ctx.one(), &grid).unwrap();
    assert!(wrong.to_f64() > 1.0);
    let err = explicit_eigenvalue(Variant::T2, g, ExplicitKind::Full, 2).unwrap_err();
    assert!(matches!(err, Error::NoExplicitForm { k: 2, .. }));
    assert!(verify_explicit(g, OperatorSpec::full(Variant::T2), ExplicitKind::Full, 2, &ctx.one(), &grid).is_err());
}

#[test]
fn derivative_at_one_is_alpha() {
    let ctx = ctx();
    let q = quadratic(32, &ctx);
    let d = q.result.series.derivative().eval(&ctx.one()) - &q.result.scaling.value;
    assert!(d.abs().to_f64() <= 1e-20);
}
