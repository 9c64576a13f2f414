//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rosenblatt::cumulants::{c_closed, cumulant_table, kappa, C5Reading};
use rosenblatt::oracle::{mc_ck, mc_region, region_catalog};
use rosenblatt::quad::gauss_kronrod;
use rosenblatt::specfun::{hyp_2f1, EvalConfig, HypParams};
use rosenblatt::thomae::{
    f43_split_alternative, f43_split_contiguous, thomae_keep_first, thomae_margin_up,
    thomae_two_term, ThomaeForm,
};
use rosenblatt::vt::{
    c_k_vt, g2, g3, g4_terms, kernel_2f1_integral, kernel_power_integral, GFunction,
};

// Tolerances fixed by the acceptance contract.
const SHOWN_DIGITS_BUDGET: Duration = Duration::from_secs(5);
const KAPPA3_AT_0: (f64, f64) = (2.828, 0.001);
const KAPPA4_AT_0: (f64, f64) = (12.00, 0.005);
const KAPPA5_AT_0: (f64, f64) = (67.88, 0.01);
const MC_SAMPLES: u64 = 10_000_000;
const MC_SIGMAS: f64 = 3.0;
const MC_BUDGET: Duration = Duration::from_secs(300);
const VT_TOL: f64 = 1e-5;
const VT_TOL_K5: f64 = 1e-4;
const OPERATOR_TOL: f64 = 1e-6;
const THOMAE_TOL: f64 = 1e-9;
const SPLIT_TOL: f64 = 1e-8;
const KERNEL_TOL: f64 = 1e-7;
const SEED: u64 = 7;

const KAPPA3: [&str; 11] = [
    "2.828", "2.815", "2.770", "2.684", "2.548", "2.348", "2.067", "1.686", "1.183", "0.5603", "0",
];
const KAPPA4: [&str; 11] = [
    "12.00", "11.92", "11.66", "11.15", "10.35", "9.192", "7.632", "5.665", "3.392", "1.173", "0",
];
const KAPPA5: [&str; 11] = [
    "67.88", "67.33", "65.46", "61.92", "56.37", "48.51", "38.32", "26.24", "13.68", "3.563", "0",
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn matches_shown(v: f64, shown: &str) -> bool {
    let decimals = shown.split('.').nth(1).map_or(0, str::len);
    format!("{v:.decimals$}") == shown
}

fn tables() -> Outcome {
    let start = Instant::now();
    let grid: Vec<f64> = (0..=10).map(|i| 0.05 * f64::from(i)).collect();
    let rows = cumulant_table(&grid, &[3, 4, 5], &cfg()).map_err(e2s)?;
    let elapsed = start.elapsed();
    let shown = KAPPA3.iter().chain(&KAPPA4).chain(&KAPPA5);
    for (r, s) in rows.iter().zip(shown) {
        ensure(matches_shown(r.value, s), || {
            format!("κ{}({}) = {} does not round to {s}", r.order, r.d, r.value)
        })?;
    }
    ensure(rows.len() == 33, || format!("{} rows", rows.len()))?;
    ensure(elapsed < SHOWN_DIGITS_BUDGET, || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("33 values to shown digits in {elapsed:.2?}"))
}

fn endpoints() -> Outcome {
    for k in 3..=5 {
        let v = kappa(k, 0.5, &cfg()).map_err(e2s)?.value;
        ensure(v == 0.0, || format!("κ{k}(0.5) = {v}"))?;
    }
    for (k, (want, tol)) in [(3, KAPPA3_AT_0), (4, KAPPA4_AT_0), (5, KAPPA5_AT_0)] {
        let v = kappa(k, 0.0, &cfg()).map_err(e2s)?.value;
        ensure((v - want).abs() <= tol, || {
            format!("κ{k}(0) = {v}, want {want} ± {tol}")
        })?;
    }
    Ok("κ_k(0.5) = 0 and κ_k(0) within tolerance".into())
}

fn oracle_cube() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in [0.10, 0.25, 0.40] {
        for k in 3..=5 {
            let e = mc_ck(k, d, MC_SAMPLES, SEED).map_err(e2s)?;
            let c = c_closed(k, d, &cfg()).map_err(e2s)?.value;
            let z = e.z_score(c);
            ensure(z <= MC_SIGMAS, || {
                format!("c{k}({d}): {} ± {} vs {c}", e.mean, e.std_error)
            })?;
            worst = worst.max(z);
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < MC_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("9 estimates, worst {worst:.2}σ, {elapsed:.1?}"))
}

fn oracle_regions() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for d in [0.15, 0.30] {
        for spec in region_catalog().iter().filter(|r| r.k >= 4) {
            let e = mc_region(spec, d, MC_SAMPLES, SEED + u64::from(spec.index)).map_err(e2s)?;
            let v = spec
                .closed_value(d, C5Reading::MixedGamma, &cfg())
                .map_err(e2s)?;
            let z = e.z_score(v);
            ensure(z <= MC_SIGMAS, || {
                format!("{} at {d}: {} ± {} vs {v}", spec.name, e.mean, e.std_error)
            })?;
            worst = worst.max(z);
            count += 1;
            if spec.k == 5 && spec.index == 3 {
                let alt = spec
                    .closed_value(d, C5Reading::SquaredGamma, &cfg())
                    .map_err(e2s)?;
                let za = e.z_score(alt);
                ensure(za > MC_SIGMAS, || {
                    format!("both c5(3) readings pass at {d} ({za:.2}σ)")
                })?;
            }
        }
    }
    Ok(format!(
        "{count} regions, worst {worst:.2}σ; c5(3): only the mixed-Γ reading passes"
    ))
}

fn vt_routes() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [0.1, 0.25, 0.4] {
        for k in 2..=5 {
            let vt = c_k_vt(1, k - 1, d, &cfg()).map_err(e2s)?.value;
            let c = c_closed(k, d, &cfg()).map_err(e2s)?.value;
            let tol = if k == 5 { VT_TOL_K5 } else { VT_TOL };
            ensure((vt - c).abs() <= tol, || format!("c{k}({d}): {vt} vs {c}"))?;
            worst = worst.max((vt - c).abs());
        }
    }
    let a = c_k_vt(2, 2, 0.25, &cfg()).map_err(e2s)?.value;
    let b = c_k_vt(1, 3, 0.25, &cfg()).map_err(e2s)?.value;
    ensure((a - b).abs() <= VT_TOL, || {
        format!("(2,2) {a} vs (1,3) {b}")
    })?;
    Ok(format!(
        "worst deviation {worst:.1e}; (2,2) vs (1,3) {:.1e}",
        (a - b).abs()
    ))
}

fn operator_pointwise() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [0.1, 0.25, 0.4] {
        let g1 = GFunction::new(1, d).map_err(e2s)?;
        let g2f = GFunction::new(2, d).map_err(e2s)?;
        for i in 0..10 {
            let x = 0.05 + 0.1 * f64::from(i);
            let a = g1.apply_k(x, &cfg()).map_err(e2s)?.value;
            let b = g2(x, d).map_err(e2s)?;
            ensure((a - b).abs() <= OPERATOR_TOL, || {
                format!("K(G1) at ({x}, {d}): {a} vs {b}")
            })?;
            let a2 = g2f.apply_k(x, &cfg()).map_err(e2s)?.value;
            let b2 = g3(x, d, &cfg()).map_err(e2s)?;
            ensure((a2 - b2).abs() <= OPERATOR_TOL, || {
                format!("K(G2) at ({x}, {d}): {a2} vs {b2}")
            })?;
            worst = worst.max((a - b).abs()).max((a2 - b2).abs());
        }
    }
    let g3f = GFunction::new(3, 0.25).map_err(e2s)?;
    for x in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let a = g3f.apply_k(x, &cfg()).map_err(e2s)?.value;
        let b = g4_terms(x, 0.25, &cfg()).map_err(e2s)?;
        ensure((a - b).abs() <= OPERATOR_TOL, || {
            format!("K(G3) at {x}: {a} vs {b}")
        })?;
        worst = worst.max((a - b).abs());
    }
    Ok(format!("65 points, worst deviation {worst:.1e}"))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn thomae_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut forms = 0;
    while forms < 100 {
        let (a, b, c) = (
            rng.gen_range(0.3..2.0),
            rng.gen_range(0.2..2.0),
            rng.gen_range(0.2..2.0),
        );
        let (e, s) = (rng.gen_range(0.5..3.0), rng.gen_range(0.4..2.5));
        let f = a + b + c + s - e;
        if f <= 0.3 || f - a <= 0.3 {
            continue;
        }
        let form = ThomaeForm::new([a, b, c], [e, f]);
        let v = form.value(&cfg()).map_err(e2s)?.value;
        let w1 = thomae_keep_first(&form)
            .and_then(|g| g.value(&cfg()))
            .map_err(e2s)?
            .value;
        let w5 = thomae_margin_up(&form)
            .and_then(|g| g.value(&cfg()))
            .map_err(e2s)?
            .value;
        // the two-term map needs a bottom parameter equal to a + 1
        let split = ThomaeForm::new([a, b, c - 1.0], [a + 1.0, f]);
        let w3 = if (b - a).abs() > 0.1 && split.margin() > 0.3 {
            let sv = split.value(&cfg()).map_err(e2s)?.value;
            rel(
                thomae_two_term(&split)
                    .and_then(|g| g.value(&cfg()))
                    .map_err(e2s)?
                    .value,
                sv,
            )
        } else {
            0.0
        };
        let dev = rel(w1, v).max(rel(w5, v)).max(w3);
        ensure(dev <= THOMAE_TOL, || {
            format!("{form:?}: relative deviation {dev:.1e}")
        })?;
        worst = worst.max(dev);
        forms += 1;
    }
    let mut split_worst: f64 = 0.0;
    for i in 1..=9 {
        let d = 0.05 * f64::from(i);
        let p = HypParams::new(
            [2.0 * d - 1.0, 2.0 - 2.0 * d, 1.0, d],
            [2.0 * d, 3.0 - 2.0 * d, 2.0 - d],
        );
        let a = f43_split_contiguous(&p)
            .and_then(|s| s.value(&cfg()))
            .map_err(e2s)?
            .value;
        let b = f43_split_alternative(d)
            .and_then(|s| s.value(&cfg()))
            .map_err(e2s)?
            .value;
        ensure((a - b).abs() <= SPLIT_TOL, || format!("d={d}: {a} vs {b}"))?;
        split_worst = split_worst.max((a - b).abs());
    }
    Ok(format!(
        "100 forms, worst {worst:.1e}; ₄F₃ splits agree to {split_worst:.1e}"
    ))
}

/// ∫₀¹|x−u|^{−d} f(u) du by adaptive Gauss–Kronrod. Each singular point is the
/// left end of its own piece, in a variable where it sits exactly at 0.
fn split_quad(f: impl Fn(f64) -> f64, d: f64, x: f64) -> Result<f64, String> {
    let h = 0.5 * x;
    let gk = |g: &dyn Fn(f64) -> f64, b: f64| {
        gauss_kronrod(g, 0.0, b, 1e-13, 1e-12)
            .map(|e| e.value)
            .map_err(e2s)
    };
    let outer = gk(&|u| (x - u).powf(-d) * f(u), h)?;
    let inner = gk(&|s| s.powf(-d) * f(x - s), h)?;
    let right = gk(&|s| s.powf(-d) * f(x + s), 1.0 - x)?;
    Ok(outer + inner + right)
}

fn kernel_integrals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let a = rng.gen_range(0.2..1.5);
        let b = rng.gen_range(0.1..1.0);
        let c = a + b + rng.gen_range(0.3..1.5);
        let e = rng.gen_range(-0.5..2.0);
        let d = rng.gen_range(0.05..0.45);
        let x = rng.gen_range(0.1..0.9);
        let v = kernel_2f1_integral(a, b, c, e, d, x, &cfg()).map_err(e2s)?;
        let q = split_quad(
            |u| u.powf(e) * hyp_2f1(a, b, c, u).unwrap_or(f64::NAN),
            d,
            x,
        )?;
        ensure((v - q).abs() <= KERNEL_TOL, || {
            format!("2F1 kernel ({a}, {b}, {c}, {e}, {d}, {x}): {v} vs {q}")
        })?;
        worst = worst.max((v - q).abs());
    }
    for _ in 0..10 {
        let p = rng.gen_range(0..5u32);
        let d = rng.gen_range(0.05..0.45);
        let x = rng.gen_range(0.05..0.95);
        let v = kernel_power_integral(p, d, x).map_err(e2s)?;
        let expo = f64::from(p) - f64::from(p + 1) * d;
        let q = split_quad(|u| (1.0 - u).powf(expo), d, x)?;
        ensure((v - q).abs() <= KERNEL_TOL, || {
            format!("power kernel ({p}, {d}, {x}): {v} vs {q}")
        })?;
        worst = worst.max((v - q).abs());
    }
    Ok(format!("20 random points, worst deviation {worst:.1e}"))
}

fn oracle_output(threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rosenblatt"))
        .args([
            "oracle",
            "--orders",
            "3,4,5",
            "--d-grid",
            "0.1,0.3",
            "--samples",
            "300000",
            "--seed",
            "11",
        ])
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .map_err(e2s)?;
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let one = oracle_output("1")?;
    for t in ["2", "4", "1"] {
        ensure(oracle_output(t)? == one, || {
            format!("output differs with {t} threads")
        })?;
    }
    let spec = &region_catalog()[9];
    let mut bits = Vec::new();
    for n in [1, 3, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(e2s)?;
        let e = pool
            .install(|| mc_region(spec, 0.3, 500_000, SEED))
            .map_err(e2s)?;
        bits.push((e.mean.to_bits(), e.std_error.to_bits()));
    }
    ensure(bits.windows(2).all(|w| w[0] == w[1]), || {
        format!("{bits:?}")
    })?;
    Ok("oracle output bit-identical for 1, 2 and 4 threads".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("table reproduction", tables),
        ("endpoint laws", endpoints),
        ("oracle agreement, defining integral", oracle_cube),
        ("per-region agreement", oracle_regions),
        ("route equivalence (operator)", vt_routes),
        ("operator vs closed form, pointwise", operator_pointwise),
        ("Thomae suite", thomae_suite),
        ("kernel integral closed forms", kernel_integrals),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
