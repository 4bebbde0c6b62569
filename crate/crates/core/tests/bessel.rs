//! K_nu(x) against two independent references: values frozen from a 40-digit
//! evaluation, and a trapezoidal evaluation of `int_0^inf e^{-x cosh t} cosh(nu t) dt`
//! carried out in the log domain with compensated summation.

use indepmaps_core::specfun::{bessel_k, log_bessel_k};
use indepmaps_core::Error;

/// (nu, x, K_nu(x), log K_nu(x)) at 40 significant digits, truncated to 20.
const REFERENCE: &[(f64, f64, f64, f64)] = &[
    (0.5, 2.0, 0.11993777196806144737, -2.1207822376352452223),
    (1.5, 3.0, 0.048034646842352790087, -3.0358327192375464859),
    (3.0, 1e-4, 7999999989999.9988624, 29.710462656358383993),
    (0.0, 1e-6, 13.931442073626419459, 2.6341483053069884094),
    (0.3, 1.7, 0.16907305227213439127, -1.7774243954920605936),
    (0.3, 2.5, 0.063313879296295559452, -2.7596507116816822453),
    (2.7, 0.5, 31.458720904338704017, 3.448676238963105876),
    (10.2, 5.0, 12.945794412743640221, 2.5607709796282792201),
    (50.0, 1e-6, f64::INFINITY, 869.30548369199590854),
    (-50.0, 700.0, 2.7793358770120585025e-305, -701.26624135718203453),
    (50.0, 700.0, 2.7793358770120585025e-305, -701.26624135718203453),
    (0.25, 100.0, 4.6580764515098397833e-45, -102.07772660045701487),
    (20.5, 30.0, 1.681389149762343119e-11, -24.808815696333479176),
    (5.5, 1e-3, 37453440881630042857.0, 45.069630258984668743),
    (0.0, 700.0, 4.669776431685376881e-306, -703.04992725894391223),
    (1.0, 1.0, 0.60190723019723457474, -0.50765194821075233095),
    (0.0, 1.0, 0.42102443824070833334, -0.8650643989067880968),
    (49.9, 0.01, 1.3647530448481984354e+177, 407.86853495268996828),
    (7.3, 12.0, 0.00001770186668854659247, -10.941840461315531829),
];

/// log K_nu(x) by the trapezoidal rule on the integral representation.
fn log_k_trapezoid(nu: f64, x: f64) -> f64 {
    let nu = nu.abs();
    // log of the integrand without the e^{-x} factor:
    // -x (cosh t - 1) + log cosh(nu t), with cosh t - 1 = 2 sinh^2(t/2)
    let phi = |t: f64| {
        let s = (0.5 * t).sinh();
        let log_cosh = nu * t + (-2.0 * nu * t).exp().ln_1p() - std::f64::consts::LN_2;
        -2.0 * x * s * s + log_cosh
    };
    // locate the peak: x sinh t = nu tanh(nu t) ~ nu
    let peak = if nu > 0.0 { (nu / x).asinh() } else { 0.0 };
    let width = 1.0 / (x * peak.cosh() + nu * nu * (1.0 - (nu * peak).tanh().powi(2)) + 1e-3).sqrt();
    let h = (width / 8.0).min(0.02);
    let top = phi(peak);
    let mut logs = vec![phi(0.0) + 0.5f64.ln()];
    let mut k = 1usize;
    loop {
        let t = k as f64 * h;
        let v = phi(t);
        logs.push(v);
        if t > peak && v < top - 45.0 {
            break;
        }
        k += 1;
    }
    // Neumaier-compensated sum of exp(log - top)
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for l in logs {
        let term = (l - top).exp();
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    (sum + comp).ln() + top + h.ln() - x
}

#[test]
fn matches_high_precision_reference() {
    for &(nu, x, value, log_value) in REFERENCE {
        let got = log_bessel_k(nu, x).unwrap();
        assert!((got - log_value).abs() <= 1e-9, "log K_{nu}({x}): {got} vs {log_value}");
        if value.is_finite() {
            let got = bessel_k(nu, x).unwrap();
            assert!(((got - value) / value).abs() <= 1e-10, "K_{nu}({x}): {got} vs {value}");
        } else {
            assert!(matches!(bessel_k(nu, x), Err(Error::Range(_))));
        }
    }
}

#[test]
fn trapezoid_oracle_agrees_with_reference() {
    for &(nu, x, _, log_value) in REFERENCE {
        let oracle = log_k_trapezoid(nu, x);
        assert!((oracle - log_value).abs() < 1e-11, "oracle K_{nu}({x}): {oracle} vs {log_value}");
    }
}

#[test]
fn accuracy_over_order_and_argument_grid() {
    let orders: Vec<f64> = (-20..=20).map(|k| k as f64 * 2.5 + 0.013 * k as f64).collect();
    let args = [1e-6, 3e-5, 1e-3, 0.05, 0.7, 1.99, 2.0, 2.01, 9.0, 55.0, 240.0, 699.0];
    for &nu in &orders {
        for &x in &args {
            let oracle = log_k_trapezoid(nu, x);
            let log_k = log_bessel_k(nu, x).unwrap();
            assert!((log_k - oracle).abs() <= 1e-9, "log K_{nu}({x}): {log_k} vs {oracle}");
            match bessel_k(nu, x) {
                Ok(k) => {
                    let expected = oracle.exp();
                    assert!(((k - expected) / expected).abs() <= 1e-10, "K_{nu}({x}): {k} vs {expected}");
                    assert!(((log_k.exp() - k) / k).abs() <= 1e-9);
                }
                Err(Error::Range(_)) => {
                    let v = oracle.exp();
                    assert!(!v.is_finite() || v < f64::MIN_POSITIVE * 1.01, "spurious range error at K_{nu}({x})");
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
}

#[test]
fn symmetry_in_order() {
    for k in -40..=40 {
        let nu = k as f64 * 0.37;
        for &x in &[1e-4, 0.5, 3.0, 40.0] {
            let (a, b) = (bessel_k(nu, x), bessel_k(-nu, x));
            if let (Ok(a), Ok(b)) = (a, b) {
                assert!(((a - b) / a).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn order_recurrence_grid() {
    for k in -20..=20 {
        let nu = k as f64 * 0.25;
        for &x in &[0.01, 0.1, 1.0, 10.0, 100.0] {
            let lo = bessel_k(nu - 1.0, x).unwrap();
            let mid = bessel_k(nu, x).unwrap();
            let hi = bessel_k(nu + 1.0, x).unwrap();
            let defect = (hi - lo - 2.0 * nu / x * mid) / hi;
            assert!(defect.abs() <= 1e-9, "nu = {nu}, x = {x}: {defect}");
        }
    }
}

#[test]
fn strictly_decreasing_in_argument() {
    for &nu in &[-7.5, -1.0, 0.0, 0.2, 0.5, 3.3, 12.0, 40.0] {
        let mut prev = f64::INFINITY;
        for k in 0..400 {
            let x = 1e-5 * 1.045f64.powi(k);
            if x > 700.0 {
                break;
            }
            let v = log_bessel_k(nu, x).unwrap();
            assert!(v < prev, "nu = {nu}, x = {x}");
            prev = v;
        }
    }
}

#[test]
fn small_argument_leading_term() {
    // K_3(x) = 8/x^3 - 1/x + O(x log x) near 0
    let x = 1e-4;
    let expected = 8.0 / (x * x * x) - 1.0 / x;
    assert!(((bessel_k(3.0, x).unwrap() - expected) / expected).abs() < 1e-12);
}
