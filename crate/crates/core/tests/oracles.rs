//! Values frozen from mpmath at 50 digits.

use rug::{Complex, Float};
use xitaylor::classical::{roots_partial_sum, PartialSum};
use xitaylor::precision::{abs_f64, cplx, parse_float};
use xitaylor::specfun::{digamma, erfc, erfc_zero, hurwitz_zeta, lambert_w0, log_gamma, zeta};
use xitaylor::xi::{critical_line_zeros, eval_f, eval_xi, taylor_coeffs};
use xitaylor::PrecisionContext;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(50).unwrap()
}

fn c(re: &str, im: &str) -> Complex {
    let p = ctx().bits();
    Complex::with_val(p, (parse_float(re, p).unwrap(), parse_float(im, p).unwrap()))
}

fn rel(got: &Complex, want: &Complex) -> f64 {
    let d = Complex::with_val(got.prec().0, got - want);
    abs_f64(&d) / abs_f64(want)
}

fn close(got: &Complex, want: &Complex, tol: f64) {
    let r = rel(got, want);
    assert!(r <= tol, "got {got}, want {want}, relative error {r:.2e}");
}

#[test]
fn zeta_values() {
    let x = ctx();
    let p = x.bits();
    close(
        &zeta(&cplx(p, 0.5, 14.0), &x).unwrap(),
        &c("0.022241142609993589246213199203968626386786243194924", "-0.1032581232664500579023630955525738345075490304641"),
        1e-45,
    );
    close(
        &zeta(&cplx(p, -2.5, 1.0), &x).unwrap(),
        &c("0.023593610586379648604285861769516359505157315728244", "0.0014077996058383770387519333544852685914755413714694"),
        1e-45,
    );
    close(
        &hurwitz_zeta(&cplx(p, 2.0, 1.0), &Float::with_val(p, parse_float("0.3", p).unwrap()), &x).unwrap(),
        &c("4.6192019361613256877952083996699504503852780382037", "9.8357929873157205534317619076881674214877870049826"),
        1e-45,
    );
}

#[test]
fn gamma_family() {
    let x = ctx();
    let p = x.bits();
    close(
        &log_gamma(&cplx(p, 3.0, 4.0), &x).unwrap(),
        &c("-1.7566267846037841105306041816232757851567066070613", "4.7426644380346579281948894075500227408883033517116"),
        1e-45,
    );
    close(
        &log_gamma(&cplx(p, 0.1, -20.0), &x).unwrap(),
        &c("-31.695265907346562615450552998421591957702027946514", "-39.284410010649361161721612827928551548774933011235"),
        1e-45,
    );
    close(
        &digamma(&cplx(p, 2.0, 1.0), &x).unwrap(),
        &c("0.59465032062247697727187848272191072247626297176354", "0.57667404746858117413405079475000049044565626640382"),
        1e-45,
    );
}

#[test]
fn erfc_values_and_zeros() {
    let x = ctx();
    let p = x.bits();
    close(
        &erfc(&cplx(p, 1.0, 2.0), &x),
        &c("1.5366435657785650339917955593141927494420938688143", "5.0491437034470346695430369586141405655530910763099"),
        1e-45,
    );
    close(
        &erfc(&cplx(p, 6.0, -3.0), &x),
        &c("0.000000000000050394073504603446450715443580834537799054581250394", "-0.00000000000014870834637192687442083444648718244213042465265947"),
        1e-45,
    );
    close(
        &erfc(&cplx(p, -2.0, 0.5), &x),
        &c("2.003502243313036347211035716055214816848954704944", "-0.0047409030312943361044720892614159263596284526080038"),
        1e-45,
    );
    let (_, z1) = erfc_zero(1, &x).unwrap();
    close(&z1, &c("-1.354810128112006248899850540891001595471", "1.991466842833879577282157842621640294526"), 1e-38);
    let (_, z2) = erfc_zero(2, &x).unwrap();
    close(&z2, &c("-2.177044906089615911539264864814265578117", "2.691149024251438828850892474987811142069"), 1e-38);
}

#[test]
fn lambert_values() {
    let x = ctx();
    let p = x.bits();
    let w = lambert_w0(&Float::with_val(p, 10), &x).unwrap();
    let want = parse_float("1.7455280027406993830743012648753899115352881290809", p).unwrap();
    assert!(Float::with_val(p, &w - &want).abs().to_f64() < 1e-45);
}

#[test]
fn xi_values() {
    let x = ctx();
    let p = x.bits();
    close(
        &eval_xi(&cplx(p, 2.0, 0.0), &x).unwrap(),
        &c("0.52359877559829887307710723054658381403286156656252", "0"),
        1e-45,
    );
    close(
        &eval_f(&cplx(p, 0.3, 2.0), &x).unwrap(),
        &c("0.45388491977839066636059415359311354110312599987909", "0.012668043917078166384356409037524444354273609058028"),
        1e-45,
    );
    let v = eval_f(&cplx(p, 0.0, 5.0), &x).unwrap();
    close(&v, &c("0.27554999734420419222904233809641562391579209644558", "0"), 1e-45);
}

#[test]
fn maclaurin_coefficients() {
    let x = PrecisionContext::for_degree(40, 6).unwrap();
    let t = taylor_coeffs(6, &x).unwrap();
    let p = x.bits();
    let want = [
        "0.49712077818831410991277373968539771980729360955770485",
        "0.011485972157572718767624938248816085132296506918794526",
        "0.00012345201807031800689034579149485113813599349651496346",
        "0.00000083235548138552707200475872584462070362626246687839098",
    ];
    for (k, w) in want.iter().enumerate() {
        let w = Complex::with_val(p, (parse_float(w, p).unwrap(), 0));
        close(&t.coeffs[2 * k], &w, 1e-35);
        assert!(k == 3 || abs_f64(&t.coeffs[2 * k + 1]) < 1e-35);
    }
}

#[test]
fn first_zeta_ordinates() {
    let x = PrecisionContext::new(40).unwrap();
    let t = critical_line_zeros(26.0, &x).unwrap();
    let want = [
        "14.134725141734693790457251983562470270784257115699248",
        "21.022039638771554992628479593896902777334340524902784",
        "25.010857580145688763213790992562821818659549672558014",
    ];
    assert_eq!(t.len(), 3);
    for (got, w) in t.iter().zip(want) {
        let w = parse_float(w, x.bits()).unwrap();
        assert!(Float::with_val(x.bits(), got - &w).abs().to_f64() < 1e-35, "{got}");
    }
}

#[test]
fn exp_partial_sum_roots() {
    let x = PrecisionContext::new(40).unwrap();
    let mut roots = roots_partial_sum(&PartialSum::exp(8), &x).unwrap();
    assert_eq!(roots.len(), 7);
    let want = [
        ("-0.3448753387452839820728176153834427112292822", "0"),
        ("-0.2974854853961151395778732055456820661192647", "0.2036248720465198731818992291696540397675562"),
        ("-0.1434000862421413024914007252650306490837111", "0.3905049047572914327266337399699111215375281"),
        ("0.1758232410108984331056827385024340708176197", "0.5281333556186984654001555971125377664650079"),
    ];
    for (re, im) in want {
        let w = c(re, im);
        for target in [w.clone(), Complex::with_val(w.prec().0, w.conj_ref())] {
            let i = roots
                .iter()
                .position(|r| abs_f64(&Complex::with_val(r.prec().0, r - &target)) < 1e-35)
                .unwrap_or_else(|| panic!("no root near {target}"));
            roots.swap_remove(i);
            if target.imag().is_zero() {
                break;
            }
        }
    }
    assert!(roots.is_empty());
}
