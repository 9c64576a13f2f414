//! The cross-method check suite behind `rosenblatt verify`.

use rosenblatt::cumulants::{c4_closed, c4_region, c5_region_estimate, c_closed, kappa, C5Reading};
use rosenblatt::oracle::mc_ck;
use rosenblatt::specfun::{EvalConfig, HypParams};
use rosenblatt::thomae::{
    f43_split_alternative, f43_split_contiguous, thomae_keep_first, thomae_margin_up,
    thomae_two_term, ThomaeForm,
};
use rosenblatt::vt::c_k_vt;
use serde::Serialize;

use crate::{CliResult, MethodArg, RunConfig};

#[derive(Debug, Clone, Serialize)]
pub(crate) struct Check {
    pub name: String,
    pub case: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, case: String, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            case,
            deviation,
            tolerance,
            // NaN deviations fail
            pass: deviation <= tolerance,
        }
    }

    fn failed(name: &str, case: String, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            case: format!("{case}: {err}"),
            deviation: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
        }
    }
}

fn record(
    out: &mut Vec<Check>,
    name: &str,
    case: String,
    tol: f64,
    f: impl FnOnce() -> rosenblatt::Result<f64>,
) {
    out.push(match f() {
        Ok(dev) => Check::new(name, case, dev, tol),
        Err(e) => Check::failed(name, case, e),
    });
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub(crate) fn run_checks(cfg: &RunConfig, reading: C5Reading) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let interior: Vec<f64> = cfg
        .grid
        .iter()
        .copied()
        .filter(|&d| d > 0.0 && d < 0.5)
        .collect();
    endpoint_checks(cfg, &mut out);
    if matches!(cfg.method, MethodArg::Vt | MethodArg::All) {
        for &k in &cfg.orders {
            for &d in &interior {
                let tol = if k == 5 { 1e-4 } else { 1e-5 };
                record(
                    &mut out,
                    "closed-vs-vt",
                    format!("k={k} d={d}"),
                    tol,
                    || {
                        let vt = c_k_vt(1, k - 1, d, &cfg.eval)?.value;
                        Ok((vt - c_closed(k, d, &cfg.eval)?.value).abs())
                    },
                );
            }
        }
    }
    if matches!(cfg.method, MethodArg::Mc | MethodArg::All) {
        for &k in &cfg.orders {
            for d in cfg.grid.iter().copied().filter(|&d| d < 0.5) {
                let case = format!("k={k} d={d} n={} seed={}", cfg.samples, cfg.seed);
                record(&mut out, "closed-vs-mc (sigmas)", case, 3.0, || {
                    let e = mc_ck(k, d, cfg.samples, cfg.seed)?;
                    Ok(e.z_score(c_closed(k, d, &cfg.eval)?.value))
                });
            }
        }
    }
    thomae_checks(&cfg.eval, &mut out);
    split_identity_checks(&cfg.eval, &mut out);
    for &d in &interior {
        if cfg.orders.contains(&4) {
            record(&mut out, "region-sum", format!("k=4 d={d}"), 1e-7, || {
                let s: f64 = (1..=3)
                    .map(|i| c4_region(i, d, &cfg.eval))
                    .sum::<rosenblatt::Result<f64>>()?;
                Ok(rel(8.0 * s, c4_closed(d, &cfg.eval)?.value))
            });
        }
        if cfg.orders.contains(&5) {
            record(&mut out, "region-sum", format!("k=5 d={d}"), 1e-7, || {
                let mut s = 0.0;
                for i in 1..=12 {
                    s += c5_region_estimate(i, d, reading, &cfg.eval)?.value;
                }
                Ok(rel(10.0 * s, c_closed(5, d, &cfg.eval)?.value))
            });
        }
    }
    Ok(out)
}

fn endpoint_checks(cfg: &RunConfig, out: &mut Vec<Check>) {
    for &k in cfg.orders.iter().filter(|&&k| k >= 3) {
        for &d in &cfg.grid {
            if d == 0.5 {
                record(out, "endpoint", format!("k={k} d=0.5"), 0.0, || {
                    Ok(kappa(k, d, &cfg.eval)?.value.abs())
                });
            } else if d == 0.0 {
                // c_k(0) = 1, so κ_k(0) = 2^{k−1}(k−1)!·2^{−k/2}
                let fact: f64 = (1..k).map(f64::from).product();
                let chi2 = 2f64.powi(k as i32 - 1) * fact * 2f64.powf(-f64::from(k) / 2.0);
                record(out, "endpoint", format!("k={k} d=0"), 1e-10, || {
                    Ok((kappa(k, d, &cfg.eval)?.value - chi2).abs())
                });
            }
        }
    }
}

/// Deterministic lattice of convergent ₃F₂(1) forms.
fn lattice_forms() -> Vec<ThomaeForm> {
    let mut out = Vec::new();
    for a in [0.4, 1.1] {
        for b in [0.3, 1.4] {
            for c in [0.6, 1.7] {
                for e in [1.2, 2.6] {
                    for s in [0.6, 1.5] {
                        let f = a + b + c + s - e;
                        if f > 0.3 && f - a > 0.3 {
                            out.push(ThomaeForm::new([a, b, c], [e, f]));
                        }
                    }
                }
            }
        }
    }
    out
}

fn thomae_checks(eval: &EvalConfig, out: &mut Vec<Check>) {
    let forms = lattice_forms();
    let n = forms.len();
    let worst = |map: &dyn Fn(&ThomaeForm) -> rosenblatt::Result<f64>| -> rosenblatt::Result<f64> {
        let mut w: f64 = 0.0;
        for f in &forms {
            w = w.max(rel(map(f)?, f.value(eval)?.value));
        }
        Ok(w)
    };
    record(
        out,
        "thomae",
        format!("keep-first, {n} forms"),
        1e-9,
        || worst(&|f| Ok(thomae_keep_first(f)?.value(eval)?.value)),
    );
    record(out, "thomae", format!("margin-up, {n} forms"), 1e-9, || {
        worst(&|f| Ok(thomae_margin_up(f)?.value(eval)?.value))
    });
    record(out, "thomae", "two-term, 12 forms".into(), 1e-9, || {
        let mut w: f64 = 0.0;
        for a in [0.3, 0.9, 1.4] {
            for (b, c, f) in [(1.6, 0.4, 2.5), (0.7, -0.5, 1.9)] {
                for swap in [false, true] {
                    let bottom = if swap { [f, a + 1.0] } else { [a + 1.0, f] };
                    let form = ThomaeForm::new([a, b, c], bottom);
                    w = w.max(rel(
                        thomae_two_term(&form)?.value(eval)?.value,
                        form.value(eval)?.value,
                    ));
                }
            }
        }
        Ok(w)
    });
}

fn split_identity_checks(eval: &EvalConfig, out: &mut Vec<Check>) {
    record(
        out,
        "f43-split-identity",
        "d = 0.05..0.45".into(),
        1e-8,
        || {
            let mut w: f64 = 0.0;
            for i in 1..=9 {
                let d = 0.05 * f64::from(i);
                let p = HypParams::new(
                    [2.0 * d - 1.0, 2.0 - 2.0 * d, 1.0, d],
                    [2.0 * d, 3.0 - 2.0 * d, 2.0 - d],
                );
                let a = f43_split_contiguous(&p)?.value(eval)?.value;
                let b = f43_split_alternative(d)?.value(eval)?.value;
                w = w.max((a - b).abs());
            }
            Ok(w)
        },
    );
}
