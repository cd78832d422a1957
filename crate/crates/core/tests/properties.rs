use proptest::prelude::*;
use rug::{Complex, Float};
use xitaylor::lfunc::{CoeffKind, LFunctionDescriptor};
use xitaylor::phase::{k_hat, Side};
use xitaylor::poly::horner;
use xitaylor::precision::{abs_f64, cplx, float_to_string, parse_float};
use xitaylor::specfun::{erfc, lambert_w0, log_gamma, zeta};
use xitaylor::xi::eval_f;
use xitaylor::PrecisionContext;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(30).unwrap()
}

fn diff(a: &Complex, b: &Complex) -> f64 {
    abs_f64(&Complex::with_val(a.prec().0, a - b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zeta_commutes_with_conjugation(re in -3.0f64..4.0, im in 0.5f64..40.0) {
        let x = ctx();
        let s = cplx(x.bits(), re, im);
        let a = zeta(&s, &x).unwrap();
        let b = zeta(&Complex::with_val(x.bits(), s.conj_ref()), &x).unwrap();
        let b = Complex::with_val(x.bits(), b.conj_ref());
        prop_assert!(diff(&a, &b) <= 1e-27 * abs_f64(&a).max(1e-3));
    }

    #[test]
    fn f_is_even_and_real_on_the_axis(re in -0.4f64..0.4, im in -30.0f64..30.0) {
        let x = ctx();
        let z = cplx(x.bits(), re, im);
        let a = eval_f(&z, &x).unwrap();
        let b = eval_f(&Complex::with_val(x.bits(), -&z), &x).unwrap();
        let scale = abs_f64(&a).max(1e-30);
        prop_assert!(diff(&a, &b) <= 1e-26 * scale);
        let t = eval_f(&cplx(x.bits(), 0.0, im), &x).unwrap();
        prop_assert!(t.imag().to_f64().abs() <= 1e-26 * abs_f64(&t).max(1e-30));
    }

    #[test]
    fn erfc_reflection(re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let x = ctx();
        let z = cplx(x.bits(), re, im);
        let mut s = erfc(&z, &x);
        s += erfc(&Complex::with_val(x.bits(), -&z), &x);
        let two = cplx(x.bits(), 2.0, 0.0);
        let scale = abs_f64(&erfc(&z, &x)).max(2.0);
        prop_assert!(diff(&s, &two) <= 1e-26 * scale);
    }

    #[test]
    fn lambert_inverts(x0 in 0.0f64..1e6) {
        let x = ctx();
        let xf = Float::with_val(x.bits(), x0);
        let w = lambert_w0(&xf, &x).unwrap();
        let back = Float::with_val(x.bits(), w.exp_ref()) * &w;
        let err = Float::with_val(x.bits(), &back - &xf).abs().to_f64();
        prop_assert!(err <= 1e-27 * x0.max(1.0));
    }

    #[test]
    fn log_gamma_recurrence(re in 0.1f64..30.0, im in -50.0f64..50.0) {
        let x = ctx();
        let z = cplx(x.bits(), re, im);
        let a = log_gamma(&Complex::with_val(x.bits(), &z + 1u32), &x).unwrap();
        let b = log_gamma(&z, &x).unwrap();
        let mut d = Complex::with_val(x.bits(), &a - &b);
        d -= Complex::with_val(x.bits(), z.ln_ref());
        // equal modulo 2 pi i
        let turns = (d.imag().to_f64() / std::f64::consts::TAU).round();
        d -= cplx(x.bits(), 0.0, turns * std::f64::consts::TAU);
        prop_assert!(abs_f64(&d) <= 1e-26);
    }

    #[test]
    fn k_hat_jump_is_gaussian(re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let p = 128;
        let s = cplx(p, re, im);
        let j = Complex::with_val(p, k_hat(&s, Side::Plus, p) - k_hat(&s, Side::Minus, p));
        let mut g = Complex::with_val(p, s.square_ref());
        g = -g;
        let g = g.exp();
        prop_assert!(diff(&j, &g) <= 1e-30 * abs_f64(&g).max(1.0));
    }

    #[test]
    fn horner_matches_power_sum(cs in prop::collection::vec(-10.0f64..10.0, 1..12), re in -1.5f64..1.5, im in -1.5f64..1.5) {
        let p = 128;
        let c: Vec<Complex> = cs.iter().map(|&v| cplx(p, v, 0.0)).collect();
        let z = cplx(p, re, im);
        let mut want = Complex::with_val(p, 0);
        let mut pow = Complex::with_val(p, 1);
        for ck in &c {
            want += Complex::with_val(p, ck * &pow);
            pow *= &z;
        }
        prop_assert!(diff(&horner(&c, &z, p), &want) <= 1e-30 * (1.0 + abs_f64(&want)));
    }

    #[test]
    fn decimal_strings_round_trip(m in -1e6f64..1e6, e in -300i32..300) {
        let p = 200;
        let x = Float::with_val(p, m) * xitaylor::precision::pow10(e as i64, p);
        let back = parse_float(&float_to_string(&x), p).unwrap();
        let err = Float::with_val(p, &back - &x).abs();
        prop_assert!(err <= Float::with_val(p, x.abs_ref()) >> (p - 8));
    }

    #[test]
    fn descriptor_json_round_trip(q in 3u32..12, seed in any::<u64>(), mu in prop::collection::vec(0u8..2, 0..3), eta in prop::collection::vec(0.0f64..2.0, 0..2)) {
        prop_assume!(!mu.is_empty() || !eta.is_empty());
        let mut values: Vec<f64> = (0..q).map(|a| ((seed >> (a % 60)) & 1) as f64 * 2.0 - 1.0).collect();
        values[1 % q as usize] = 1.0;
        let d = LFunctionDescriptor {
            conductor: q as u64,
            mu: mu.iter().map(|&m| m as f64).collect(),
            eta,
            coeff_kind: CoeffKind::DirichletCharacter { modulus: q, values },
            coeff_bound: 1.0,
        };
        let back = LFunctionDescriptor::from_json(&d.to_json()).unwrap();
        prop_assert_eq!(back, d);
    }
}
