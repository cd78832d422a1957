use rug::Complex;
use xitaylor::lfunc::*;
use xitaylor::phase::lambda_of_n;
use xitaylor::precision::cplx;
use xitaylor::PrecisionContext;

#[test]
fn dirichlet_beta_symmetry() {
    let d = LFunctionDescriptor::dirichlet_beta();
    let ctx = PrecisionContext::new(40).unwrap();
    let p = ctx.bits();
    let pts: Vec<Complex> = (0..10)
        .map(|k| cplx(p, 0.3 + 0.07 * k as f64, 2.0 + 3.5 * k as f64))
        .collect();
    assert!(symmetry_residual(&d, &pts, &ctx).unwrap() <= 1e-30);
    let s = cplx(p, 0.3, 2.0);
    let a = completed_l(&s, &d, &ctx).unwrap();
    let b = completed_l(&Complex::with_val(p, 1u32 - &s), &d, &ctx).unwrap();
    let diff = Complex::with_val(p, &a - &b);
    assert!(xitaylor::precision::abs_f64(&diff) <= 1e-30);
}

#[test]
fn scaling_law_over_octaves() {
    let d = LFunctionDescriptor::dirichlet_beta();
    let ctx = PrecisionContext::new(30).unwrap();
    let mut prev_gap = f64::INFINITY;
    for n in [32u32, 64, 128, 256, 512, 1024] {
        let s = lambda_of_n_l(n, &d, &ctx).unwrap();
        let lam = s.scaling.lambda.to_f64();
        assert!(s.scaling.residual_exact.to_f64().abs() < 1e-25);
        assert!(s.scaling.residual_asymp.to_f64().abs() * n as f64 <= 1.0, "n = {n}");
        assert!((lam - s.seed).abs() / lam * n as f64 <= 1.0, "n = {n}");
        let gap = s.scaling.phi2_at_1.real().to_f64() + 2.0;
        assert!(gap < 0.0 && gap.abs() < prev_gap);
        assert!(gap.abs() * (n as f64).ln() < 3.0, "n = {n}");
        prev_gap = gap.abs();
    }
}

#[test]
fn zeta_descriptor_bridge() {
    let ctx = PrecisionContext::new(40).unwrap();
    let xi = lambda_of_n(102, &ctx).unwrap();
    let zeta = lambda_of_n_l(102, &LFunctionDescriptor::riemann_zeta(), &ctx).unwrap();
    // the extra -2λ/(λ² - 1/4) term shifts the solution slightly
    let (a, b) = (xi.lambda.to_f64(), zeta.scaling.lambda.to_f64());
    assert!(a != b && (a - b).abs() / a < 0.05);
    for lam in [&xi.lambda, &zeta.scaling.lambda] {
        assert!(zeta_bridge_residual(lam, &ctx).unwrap().to_f64().abs() < 1e-20);
    }
}

#[test]
fn model_error_at_point_two_i() {
    let d = LFunctionDescriptor::dirichlet_beta();
    let ctx = PrecisionContext::new(30).unwrap();
    let v = taylor_rep_l(&cplx(ctx.bits(), 0.0, 0.2), 64, &d, &ctx).unwrap();
    assert!(!v.in_ball);
    assert!(v.relative_error() <= 1e-2, "{}", v.relative_error());
}
