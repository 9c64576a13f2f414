use rosenblatt::cumulants::{c3_closed, c_closed, C5Reading};
use rosenblatt::oracle::*;
use rosenblatt::specfun::EvalConfig;
use rosenblatt::Error;

const SEED: u64 = 20_240_917;

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

#[test]
fn catalog_shape() {
    let cat = region_catalog();
    assert_eq!(cat.len(), 16);
    for (k, total) in [(3, 6), (4, 24), (5, 120)] {
        let s: u32 = cat
            .iter()
            .filter(|r| r.k == k)
            .map(|r| r.multiplicity)
            .sum();
        assert_eq!(s, total, "order {k}");
    }
    assert!(cat.iter().filter(|r| r.k == 4).all(|r| r.multiplicity == 8));
    for r in &cat {
        assert_eq!(r.factor_pairs.len(), r.k as usize);
        assert!(r.factor_pairs.iter().all(|&(i, j)| i < j));
    }
    assert_eq!(
        region(5, 3).unwrap().factor_pairs,
        vec![(1, 2), (1, 3), (2, 4), (3, 5), (4, 5)]
    );
    assert!(region(4, 4).is_err());
}

#[test]
fn catalog_closed_values_sum_to_c_k() {
    let d = 0.2;
    for k in [4, 5] {
        let sum: f64 = region_catalog()
            .iter()
            .filter(|r| r.k == k)
            .map(|r| {
                f64::from(r.multiplicity)
                    * r.closed_value(d, C5Reading::MixedGamma, &cfg()).unwrap()
            })
            .sum();
        let c = c_closed(k, d, &cfg()).unwrap().value;
        assert!((sum - c).abs() < 1e-7 * c, "k={k}: {sum} vs {c}");
    }
}

#[test]
fn trivial_integrands() {
    let e = mc_ck(3, 0.0, 20_000, 1).unwrap();
    assert_eq!(e.mean, 1.0);
    assert_eq!(e.std_error, 0.0);
    let r = mc_region(&region(5, 1).unwrap(), 0.0, 20_000, 1).unwrap();
    assert!((r.mean - 1.0 / 120.0).abs() < 1e-15);
}

#[test]
fn estimates_are_reproducible() {
    let a = mc_ck(4, 0.25, 200_000, SEED).unwrap();
    let b = mc_ck(4, 0.25, 200_000, SEED).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    assert_eq!((a.seed, a.n_samples), (SEED, 200_000));
    let c = mc_ck(4, 0.25, 200_000, SEED + 1).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn mc_matches_closed_forms() {
    for (k, d) in [(3, 0.25), (4, 0.25), (5, 0.1)] {
        let e = mc_ck(k, d, 1_000_000, SEED).unwrap();
        let c = c_closed(k, d, &cfg()).unwrap().value;
        assert!(
            e.within(c, 3.0),
            "c{k}({d}): {} ± {} vs {c}",
            e.mean,
            e.std_error
        );
    }
}

#[test]
fn region_sum_agrees_with_cube() {
    let d = 0.25;
    let n = 1_000_000;
    for k in [3, 4] {
        let cube = mc_ck(k, d, n, SEED).unwrap();
        let (mut sum, mut err) = (0.0, 0.0);
        for r in region_catalog().iter().filter(|r| r.k == k) {
            let e = mc_region(r, d, n, SEED + u64::from(r.index)).unwrap();
            sum += f64::from(r.multiplicity) * e.mean;
            err += f64::from(r.multiplicity) * e.std_error;
        }
        assert!(
            (sum - cube.mean).abs() < 3.0 * (err + cube.std_error),
            "k={k}: {sum} vs {}",
            cube.mean
        );
    }
}

#[test]
fn standard_error_follows_inverse_root_law() {
    let a = mc_ck(4, 0.25, 250_000, SEED).unwrap();
    let b = mc_ck(4, 0.25, 1_000_000, SEED).unwrap();
    let ratio = a.std_error / b.std_error;
    assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
}

#[test]
fn warnings_and_preconditions() {
    assert!(mc_ck(3, 0.46, 10_000, 0).unwrap().warning.is_some());
    assert!(mc_ck(3, 0.3, 10_000, 0).unwrap().warning.is_none());
    assert!(matches!(mc_ck(3, 0.3, 100, 0), Err(Error::Domain(_))));
    assert!(matches!(mc_ck(3, 0.5, 10_000, 0), Err(Error::Domain(_))));
    assert!(matches!(
        mc_ck(6, 0.3, 10_000, 0),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn nested_quadrature_for_c3() {
    assert_eq!(quad_c3(0.0).unwrap(), 1.0);
    for (d, tol) in [(0.1, 1e-8), (0.25, 1e-7), (0.4, 1e-6)] {
        let q = quad_c3(d).unwrap();
        let c = c3_closed(d).unwrap();
        assert!((q - c).abs() < tol, "d={d}: {q} vs {c}");
    }
    assert!(quad_c3(0.5).is_err());
}

#[test]
fn c5_third_region_reading() {
    let check = check_c5_region3_reading(0.25, 2_000_000, SEED, &cfg()).unwrap();
    assert_eq!(check.verdict(3.0), Some(C5Reading::MixedGamma), "{check:?}");
}
