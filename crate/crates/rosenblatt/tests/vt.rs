use proptest::prelude::*;
use rosenblatt::cumulants::{c3_closed, c_closed};
use rosenblatt::quad::gauss_kronrod;
use rosenblatt::specfun::{beta, hyp_2f1, EvalConfig};
use rosenblatt::vt::*;
use rosenblatt::Error;

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

/// ∫₀¹|x−u|^{−d} f(u) du by adaptive Gauss–Kronrod in the distance s = |u − x|
/// on each side of the kernel point.
fn split_quad(f: impl Fn(f64) -> f64, d: f64, x: f64) -> f64 {
    let left = gauss_kronrod(|s| s.powf(-d) * f(x - s), 0.0, x, 1e-13, 1e-12).unwrap();
    let right = gauss_kronrod(|s| s.powf(-d) * f(x + s), 0.0, 1.0 - x, 1e-13, 1e-12).unwrap();
    left.value + right.value
}

#[test]
fn g_functions_collapse_at_zero() {
    assert_eq!(g1(0.5, 0.0).unwrap(), 1.0);
    for x in [0.1, 0.25, 0.5, 0.75, 0.9] {
        assert_eq!(g2(x, 0.0).unwrap(), 1.0);
        assert_eq!(g3(x, 0.0, &cfg()).unwrap(), 1.0);
    }
    assert!((g3_prefactor(0.0).unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn g1_is_the_kernel_profile() {
    let v = g1(0.3, 0.25).unwrap();
    assert!((v - 0.7f64.powf(-0.25) / 0.75f64.sqrt()).abs() < 1e-15);
    assert!(matches!(g1(1.0, 0.25), Err(Error::Domain(_))));
    assert!(matches!(g1(0.3, 0.5), Err(Error::Domain(_))));
    assert_eq!(GFunction::new(1, 0.25).unwrap().profile(), (0.0, -0.25));
}

#[test]
fn operator_maps_g1_to_g2_and_g2_to_g3() {
    let k1 = GFunction::new(1, 0.25)
        .unwrap()
        .apply_k(0.3, &cfg())
        .unwrap();
    assert!((k1.value - g2(0.3, 0.25).unwrap()).abs() < 1e-8);
    let k2 = GFunction::new(2, 0.25)
        .unwrap()
        .apply_k(0.4, &cfg())
        .unwrap();
    assert!((k2.value - g3(0.4, 0.25, &cfg()).unwrap()).abs() < 1e-7);
    for x in [0.05, 0.5, 0.97] {
        let one = GFunction::new(1, 0.0).unwrap().apply_k(x, &cfg()).unwrap();
        assert!((one.value - 1.0).abs() < 1e-12);
    }
}

#[test]
fn g3_fallback_near_one_is_continuous() {
    let d = 0.4;
    let below = g3(G3_CLOSED_FORM_LIMIT - 1e-9, d, &cfg()).unwrap();
    let above = g3(G3_CLOSED_FORM_LIMIT + 1e-9, d, &cfg()).unwrap();
    assert!((below - above).abs() < 1e-7 * below);
    let closed = g3_closed_form(0.999, 0.001, d, &cfg());
    assert!(matches!(closed, Err(Error::Truncated { .. })));
}

#[test]
fn kernel_2f1_with_constant_function() {
    // b = 0 makes ₂F₁ ≡ 1: ∫|x−u|^{−d} u^e du
    let (e, d, x) = (1.2, 0.3, 0.4);
    let v = kernel_2f1_integral(1.0, 0.0, 2.0, e, d, x, &cfg()).unwrap();
    let q = split_quad(|u| u.powf(e), d, x);
    assert!((v - q).abs() < 1e-9, "{v} vs {q}");
}

#[test]
fn kernel_2f1_in_the_g3_application() {
    let (d, x) = (0.25, 0.5);
    let v = kernel_2f1_integral(1.0, d, 2.0 - d, 1.0 - d, d, x, &cfg()).unwrap();
    let q = split_quad(
        |u| u.powf(1.0 - d) * hyp_2f1(1.0, d, 2.0 - d, u).unwrap(),
        d,
        x,
    );
    assert!((v - q).abs() < 1e-7, "{v} vs {q}");
}

#[test]
fn kernel_2f1_without_kernel() {
    // d = 0: Σ (a)_n(b)_n/((c)_n n!)/(e+n+1), summed directly
    let (a, b, c, e) = (0.5, 0.7, 2.5, 0.3);
    let v = kernel_2f1_integral(a, b, c, e, 0.0, 0.6, &cfg()).unwrap();
    let (mut w, mut s) = (1.0, 0.0);
    for n in 0..200_000 {
        let nf = n as f64;
        s += w / (e + nf + 1.0);
        w *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
    }
    assert!((v - s).abs() < 1e-7, "{v} vs {s}");
}

#[test]
fn kernel_2f1_rejects_divergent_parameters() {
    assert!(matches!(
        kernel_2f1_integral(1.0, 1.0, 2.0, 0.0, 0.2, 0.5, &cfg()),
        Err(Error::Divergent { .. })
    ));
}

#[test]
fn kernel_power_examples() {
    for p in 0..4 {
        let v = kernel_power_integral(p, 0.0, 0.37).unwrap();
        assert!((v - 1.0 / f64::from(p + 1)).abs() < 1e-14);
    }
    for (p, d, x) in [(1u32, 0.25, 0.5), (2, 0.3, 0.7)] {
        let v = kernel_power_integral(p, d, x).unwrap();
        let expo = f64::from(p) - f64::from(p + 1) * d;
        let q = split_quad(|u| (1.0 - u).powf(expo), d, x);
        assert!((v - q).abs() < 1e-9, "p={p}: {v} vs {q}");
    }
}

#[test]
fn g4_closed_form_matches_operator() {
    let d = 0.25;
    let g4 = g4_terms(0.5, d, &cfg()).unwrap();
    let op = GFunction::new(3, d)
        .unwrap()
        .apply_k(0.5, &cfg())
        .unwrap()
        .value;
    assert!((g4 - op).abs() < 1e-6, "{g4} vs {op}");
    assert!(matches!(
        g4_terms(0.97, d, &cfg()),
        Err(Error::Truncated { .. })
    ));
}

#[test]
fn g4_small_d_is_nearly_one() {
    for x in [0.3, 0.7] {
        let v = g4_terms(x, 1e-6, &cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-4, "x={x}: {v}");
    }
}

#[test]
fn inner_products_reproduce_closed_forms() {
    let d = 0.25;
    let c2 = c_k_vt(1, 1, d, &cfg()).unwrap().value;
    assert!((c2 - 8.0 / 3.0).abs() < 1e-10);
    let c3 = c_k_vt(1, 2, d, &cfg()).unwrap().value;
    assert!((c3 - c3_closed(d).unwrap()).abs() < 1e-7);
    let c4 = c_k_vt(1, 3, d, &cfg()).unwrap().value;
    assert!((c4 - c_closed(4, d, &cfg()).unwrap().value).abs() < 1e-6);
    let c4_sym = c_k_vt(2, 2, d, &cfg()).unwrap().value;
    assert!((c4 - c4_sym).abs() < 1e-5);
    let c5 = c_k_vt(2, 3, d, &cfg()).unwrap().value;
    assert!((c5 - c_closed(5, d, &cfg()).unwrap().value).abs() < 1e-5);
}

#[test]
fn unsupported_pairings() {
    assert!(matches!(GFunction::new(5, 0.2), Err(Error::Unsupported(_))));
    assert!(matches!(GFunction::new(0, 0.2), Err(Error::Unsupported(_))));
    assert!(matches!(
        c_k_vt(3, 3, 0.2, &cfg()),
        Err(Error::Unsupported(_))
    ));
    assert!(matches!(c_k_vt(1, 1, 0.5, &cfg()), Err(Error::Domain(_))));
    assert_eq!(c_k_vt(2, 3, 0.0, &cfg()).unwrap().value, 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn kernel_power_prefactor_is_a_beta_sum(d in 0.01f64..0.49, e in -0.9f64..3.0) {
        let p = kernel_power_prefactor(d, e).unwrap();
        let b = beta(1.0 - d, d - 1.0 - e).unwrap() + beta(1.0 - d, 1.0 + e).unwrap();
        prop_assert!((p - b).abs() < 1e-10 * p.abs().max(1.0), "{} vs {}", p, b);
    }
}
