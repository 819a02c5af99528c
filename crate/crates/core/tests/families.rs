mod common;

use common::{ctx, quadratic};
use feigen_core::chebyshev::ChebGrid;
use feigen_core::families::{
    constant_family_spectrum, dilation_eigenvalue, extremum_order, family_member, family_spectrum_check,
    fixed_alpha_residual, solve_extremum_order, taylor_zero_threshold,
};
use feigen_core::operators::{scaling_of, ExplicitKind, OperatorSpec, Variant};
use feigen_core::solver::NewtonConfig;
use feigen_core::spectrum::{verify_explicit, Tag};
use feigen_core::Error;

#[test]
fn scaling_family_solves_the_fixed_alpha_equation() {
    let ctx = ctx();
    let q = quadratic(32, &ctx);
    let alpha = &q.result.scaling.value;
    let xs: Vec<_> = (0..=200).map(|i| ctx.int(i - 100) / 100).collect();
    for mu in ["1", "1.2", "1.5", "2"] {
        let mu = ctx.parse(mu).unwrap();
        let member = family_member(&q.result.series, &mu, alpha, false).unwrap();
        assert!(!member.extrapolated);
        let res = fixed_alpha_residual(&member.series, alpha, &xs).to_f64();
        assert!(res <= 1e-14 * mu.to_f64(), "mu {}: {res:e}", mu.to_f64());
        // a = -g_mu(0) / g_mu(g_mu(0)) = -alpha along the family
        let a = scaling_of(Variant::T4, &member.series).unwrap().value;
        assert!((a + alpha).abs().to_f64() < 1e-20);
    }
    let err = family_member(&q.result.series, &ctx.real(0.5), alpha, false).unwrap_err();
    assert!(matches!(err, Error::Extrapolation(_)));
}

#[test]
fn spectrum_is_constant_along_the_family() {
    let ctx = ctx();
    let q = quadratic(32, &ctx);
    let mus: Vec<_> = ["1", "1.2", "1.5"].iter().map(|m| ctx.parse(m).unwrap()).collect();
    for v in [Variant::T4, Variant::T3] {
        let c = family_spectrum_check(&q.result.series, &mus, v, 8, &ctx).unwrap();
        assert_eq!(c.compared, 8);
        assert!(c.max_pairwise() <= 1e-8, "{v}: {:e}", c.max_pairwise());
        assert!(c.max_dilation_residual() <= 1e-12);
    }
    assert!(family_spectrum_check(&q.result.series, &mus, Variant::T, 8, &ctx).is_err());
}

#[test]
fn constants_are_fixed_with_spectrum_one_zero() {
    let ctx = ctx();
    for c in [0.3, 1.0, -2.0] {
        let values = constant_family_spectrum(&ctx.real(c), 16, Variant::T4, &ctx).unwrap();
        assert!((&values[0].re - 1.0).abs().to_f64() <= 1e-10);
        assert!(values[1..].iter().all(|v| v.abs().to_f64() <= 1e-10));
    }
}

#[test]
fn quadratic_branch_has_order_two() {
    let ctx = ctx();
    let q = quadratic(32, &ctx);
    let threshold = taylor_zero_threshold(&q.result.series, &ctx);
    assert_eq!(extremum_order(&q.result.series, &threshold), 2);
}

#[test]
fn quartic_fixed_point() {
    let ctx = ctx();
    let (r, s) = solve_extremum_order(2, 70, &NewtonConfig::default(), &ctx).unwrap();
    let alpha2 = &r.scaling.value;
    assert!((alpha2.to_f64() + 1.690302971).abs() < 1e-8);
    assert!((s.delta.as_ref().unwrap().to_f64() - 7.284686217).abs() < 1e-8);
    let mono = r.series.to_monomial();
    for (j, want) in [(0, 1.0), (4, -1.834107907), (8, 0.012962226), (12, 0.311901736)] {
        assert!((mono[j].to_f64() - want).abs() < 1e-8, "x^{j}");
    }
    let a = alpha2.to_f64();
    let v = s.real_values();
    for (got, want) in v.iter().zip([a.powi(4), 7.284686217, a.powi(3), a * a, a]) {
        assert!((got - want).abs() <= 1e-6 * want.abs(), "{got} vs {want}");
    }
    let gammas: Vec<f64> = s.eigenvalues.iter().filter(|e| e.tag == Tag::Unexplained).take(2).map(|e| e.value.re.to_f64()).collect();
    assert!((gammas[0] - 0.291838408).abs() < 1e-6 && (gammas[1] + 0.255664558).abs() < 1e-6);

    // the dilation mode now belongs to alpha_2^4
    let grid = ChebGrid::new(70, &ctx).unwrap();
    let lambda = dilation_eigenvalue(alpha2, 2);
    let res = verify_explicit(&r.series, OperatorSpec::full(Variant::T), ExplicitKind::Dilation, 1, &lambda, &grid).unwrap();
    assert!(res.to_f64() <= 1e-12, "{:e}", res.to_f64());

    // the two branches are far apart
    let q = quadratic(32, &ctx);
    let xs: Vec<_> = (0..=200).map(|i| ctx.int(i - 100) / 100).collect();
    let gap = common::max_abs(xs.iter().map(|x| r.series.eval(x) - q.result.series.eval(x)));
    assert!(gap >= 0.1);
}
