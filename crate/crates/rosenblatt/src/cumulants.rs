//! Closed forms for the cumulants κ₂…κ₅ of the Rosenblatt law and their
//! per-region constituents.
//!
//! Conventions: σ(d)² = ½(1−2d)(1−d) and κ_k = 2^{k−1}(k−1)!·σ^k·c_k, where c_k is
//! the cyclic integral ∫⋯∫ |x₁−x₂|^{−d}⋯|x_k−x₁|^{−d} over the unit cube.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quad::tanh_sinh;
use crate::specfun::{
    gamma_product, gamma_ratio, hyp_2f1_split, pfq_at_1, product_2f1_integral, rgamma,
    series::richardson_sum, Estimate, EvalConfig, HypParams,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    VtOperator,
    McOracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::VtOperator => "vt-operator",
            Method::McOracle => "mc-oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantReport {
    pub order: u32,
    pub d: f64,
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
    pub diagnostics: BTreeMap<String, String>,
}

pub(crate) fn check_d(d: f64) -> Result<()> {
    if (0.0..=0.5).contains(&d) {
        Ok(())
    } else {
        Err(Error::Domain(format!("d = {d} outside [0, 0.5]")))
    }
}

pub fn sigma(d: f64) -> Result<f64> {
    check_d(d)?;
    Ok((0.5 * (1.0 - 2.0 * d) * (1.0 - d)).sqrt())
}

pub fn kappa_from_c(k: u32, d: f64, c_k: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Unsupported(format!("cumulant order {k}")));
    }
    let s = sigma(d)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let fact: f64 = (1..k).map(f64::from).product();
    Ok(2f64.powi(k as i32 - 1) * fact * s.powi(k as i32) * c_k)
}

/// c₂ = ∫∫|x−y|^{−2d} = 1/((1−2d)(1−d)); infinite at d = 1/2.
pub fn c2(d: f64) -> Result<f64> {
    check_d(d)?;
    Ok(1.0 / ((1.0 - 2.0 * d) * (1.0 - d)))
}

/// c₃ = 6Γ(1−d)²Γ(2−3d)/(Γ(2−2d)Γ(4−3d)).
pub fn c3_closed(d: f64) -> Result<f64> {
    check_d(d)?;
    if d == 0.0 {
        return Ok(1.0);
    }
    Ok(6.0
        * gamma_product(
            &[1.0 - d, 1.0 - d, 2.0 - 3.0 * d],
            &[2.0 - 2.0 * d, 4.0 - 3.0 * d],
        )?)
}

/// The hypergeometric constants at unit argument that the c₄/c₅ forms share.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hyp {
    /// ₃F₂(1, d, 2−2d; 2−d, 3−2d)
    A,
    /// ₃F₂(d, 1−d, 3−3d; 2−d, 4−4d)
    B,
    /// ₃F₂(d, 1−d, 2−2d; 2−d, 4−4d)
    C,
    /// ₃F₂(1, d, 3−3d; 3−2d, 4−3d)
    D,
    /// ₃F₂(1, d, 3−3d; 2−d, 4−3d)
    E,
    /// ₄F₃(1, d, 2−2d, 3−3d; 2−d, 3−2d, 4−4d)
    H,
    /// ₃F₂(1, d, 2d−1; 2−d, 2d)
    P,
}

impl Hyp {
    fn params(self, d: f64) -> HypParams {
        match self {
            Hyp::A => HypParams::new([1.0, d, 2.0 - 2.0 * d], [2.0 - d, 3.0 - 2.0 * d]),
            Hyp::B => HypParams::new([d, 1.0 - d, 3.0 - 3.0 * d], [2.0 - d, 4.0 - 4.0 * d]),
            Hyp::C => HypParams::new([d, 1.0 - d, 2.0 - 2.0 * d], [2.0 - d, 4.0 - 4.0 * d]),
            Hyp::D => HypParams::new([1.0, d, 3.0 - 3.0 * d], [3.0 - 2.0 * d, 4.0 - 3.0 * d]),
            Hyp::E => HypParams::new([1.0, d, 3.0 - 3.0 * d], [2.0 - d, 4.0 - 3.0 * d]),
            Hyp::H => HypParams::new(
                [1.0, d, 2.0 - 2.0 * d, 3.0 - 3.0 * d],
                [2.0 - d, 3.0 - 2.0 * d, 4.0 - 4.0 * d],
            ),
            Hyp::P => HypParams::new([1.0, d, 2.0 * d - 1.0], [2.0 - d, 2.0 * d]),
        }
    }

    fn eval(self, d: f64, cfg: &EvalConfig) -> Result<Estimate> {
        pfq_at_1(&self.params(d), cfg)
    }
}

/// Σ coefficient·(hypergeometric or 1) with error propagation.
#[derive(Default)]
struct Sum {
    value: f64,
    error: f64,
    terms: usize,
}

impl Sum {
    fn plain(&mut self, coef: f64) {
        self.value += coef;
        self.error += 4.0 * f64::EPSILON * coef.abs();
    }

    fn with(&mut self, coef: f64, h: Hyp, d: f64, cfg: &EvalConfig) -> Result<()> {
        let e = h.eval(d, cfg)?;
        self.value += coef * e.value;
        self.error += coef.abs() * (e.error + 4.0 * f64::EPSILON * e.value.abs());
        self.terms += e.terms;
        Ok(())
    }

    fn estimate(self) -> Estimate {
        Estimate {
            value: self.value,
            error: self.error,
            terms: self.terms,
        }
    }
}

fn g(num: &[f64], den: &[f64]) -> Result<f64> {
    gamma_product(num, den)
}

/// c₄(i), i = 1..3: the three distinct ordered-simplex integrals (each occurs 8 times).
pub fn c4_region(i: u32, d: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(c4_region_estimate(i, d, cfg)?.value)
}

pub fn c4_region_estimate(i: u32, d: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_d(d)?;
    let (g1, t) = (1.0 - d, 3.0 - 4.0 * d);
    let mut s = Sum::default();
    match i {
        1 => s.plain(g(&[g1, g1, g1, t], &[3.0 - 3.0 * d, 5.0 - 4.0 * d])?),
        2 => s.plain(
            0.5 * g(
                &[g1, g1, g1, g1, t],
                &[2.0 - 2.0 * d, 2.0 - 2.0 * d, 5.0 - 4.0 * d],
            )?,
        ),
        3 => s.with(g(&[t], &[5.0 - 4.0 * d])? / (2.0 * g1 * g1), Hyp::A, d, cfg)?,
        _ => return Err(Error::Domain(format!("c₄ region {i} (expected 1..3)"))),
    }
    Ok(s.estimate())
}

/// The bracket [2Γ(1−d)Γ(2−d)²/Γ(3−3d) + Γ(1−d)²Γ(2−d)²/Γ(2−2d)² + A] of κ₄.
fn kappa4_bracket(d: f64, cfg: &EvalConfig) -> Result<Estimate> {
    let g1 = 1.0 - d;
    let g2 = 2.0 - d;
    let mut s = Sum::default();
    s.plain(2.0 * g(&[g1, g2, g2], &[3.0 - 3.0 * d])?);
    s.plain(g(&[g1, g1, g2, g2], &[2.0 - 2.0 * d, 2.0 - 2.0 * d])?);
    s.with(1.0, Hyp::A, d, cfg)?;
    Ok(s.estimate())
}

/// c₄ = bracket/((1−d)³(3−4d)).
pub fn c4_closed(d: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_d(d)?;
    if d == 0.0 {
        return Ok(Estimate::exact(1.0, 0));
    }
    let b = kappa4_bracket(d, cfg)?;
    let f = 1.0 / ((1.0 - d).powi(3) * (3.0 - 4.0 * d));
    Ok(Estimate {
        value: f * b.value,
        error: f * b.error,
        terms: b.terms,
    })
}

/// c₄(3) through the product-of-₂F₁ integral: (1/(4−4d))·Σ_k (d)_k/((3−2d+k)(1+k)k!)·J_k,
/// J_k = ∫₀¹ x^{−d}(1−x)^{1+k}₂F₁(d,1+k;2+k;1−x)₂F₁(d,3−2d+k;4−2d+k;1−x)dx.
///
/// An independent route to the third region; the k-sum decays like k^{−(4−4d)}.
pub fn c4_region3_via_product_integral(d: f64) -> Result<Estimate> {
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::Domain(format!(
            "product-integral route needs 0 < d < 0.5, got {d}"
        )));
    }
    let g_inv_d = rgamma(d);
    let term = |k: usize| -> Result<f64> {
        let kf = k as f64;
        let w = gamma_ratio(d + kf, 1.0 + kf)? * g_inv_d / ((3.0 - 2.0 * d + kf) * (1.0 + kf));
        // The two ₄F₃ terms cancel catastrophically as k grows; quadrature takes the tail.
        let j = if k < 12 {
            product_2f1_integral(
                1.0 - d,
                d,
                1.0 + kf,
                2.0 + kf,
                d,
                3.0 - 2.0 * d + kf,
                4.0 - 2.0 * d + kf,
            )?
        } else {
            let cfg = EvalConfig::default();
            let f = |x: f64, _: f64, y: f64| -> f64 {
                let a = hyp_2f1_split(d, 1.0 + kf, 2.0 + kf, y, x, &cfg);
                let b = hyp_2f1_split(d, 3.0 - 2.0 * d + kf, 4.0 - 2.0 * d + kf, y, x, &cfg);
                match (a, b) {
                    (Ok(a), Ok(b)) => x.powf(-d) * y.powf(1.0 + kf) * a * b,
                    _ => f64::NAN,
                }
            };
            tanh_sinh(f, 0.0, 1.0, 1e-14, 1e-11)?.value
        };
        Ok(w * j)
    };
    let e = richardson_sum(term, 3.0 - 4.0 * d, 8, 1e-9, 512)?;
    let f = 1.0 / (4.0 - 4.0 * d);
    Ok(Estimate {
        value: f * e.value,
        error: f * e.error,
        terms: e.terms,
    })
}

/// Which reading of the second term of c₅(3) to use.
///
/// `SquaredGamma` carries Γ(6−5d)² in the denominator; `MixedGamma` has Γ(6−5d)Γ(4−4d)
/// and is the reading the region Monte-Carlo oracle supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum C5Reading {
    #[default]
    MixedGamma,
    SquaredGamma,
}

/// c₅(i), i = 1..12: the distinct ordered-simplex integrals (each occurs 10 times).
pub fn c5_region(i: u32, d: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(c5_region_estimate(i, d, C5Reading::MixedGamma, cfg)?.value)
}

pub fn c5_region_estimate(
    i: u32,
    d: f64,
    reading: C5Reading,
    cfg: &EvalConfig,
) -> Result<Estimate> {
    check_d(d)?;
    if matches!(i, 6 | 12) && !(d > 0.0 && d < 0.5) {
        return Err(Error::Pole(2.0 * d - 1.0));
    }
    let q = 1.0 - d;
    let r = g(&[4.0 - 5.0 * d], &[6.0 - 5.0 * d])?;
    let g1 = g(&[q], &[])?;
    let g1sq = g1 * g1;
    let inv44 = g(&[], &[4.0 - 4.0 * d])?;
    let g22 = g(&[2.0 - 2.0 * d], &[])?;
    let g33 = g(&[3.0 - 3.0 * d], &[])?;
    // coefficient shared by the A-terms of (4), (11) and the H-terms of (5), (7)
    let k4 = g1 * g33 * r * inv44 / (2.0 * q * q);
    let ke = g1sq * r / (3.0 * q * q * g22);
    let mut s = Sum::default();
    match i {
        1 => s.plain(g1sq * g1sq * r * inv44),
        2 | 9 => s.with(g1sq * g22 * r * inv44 / q, Hyp::C, d, cfg)?,
        3 => {
            s.with(g1sq * g1 * g33 * r * inv44 / (q * g22), Hyp::B, d, cfg)?;
            let second = match reading {
                C5Reading::MixedGamma => g1sq * g22 * r * inv44 / q,
                C5Reading::SquaredGamma => {
                    g1sq * g22 * g(&[4.0 - 5.0 * d], &[6.0 - 5.0 * d, 6.0 - 5.0 * d])? / q
                }
            };
            s.with(-second, Hyp::C, d, cfg)?;
        }
        4 => s.with(k4, Hyp::A, d, cfg)?,
        5 | 10 => s.with(k4, Hyp::H, d, cfg)?,
        6 => {
            let gp = g(&[2.0 * d - 1.0], &[2.0 * d])?;
            s.with(g1 * gp * g33 * r * inv44 / q, Hyp::P, d, cfg)?;
            s.plain(-g1sq * g1 * r * g22 * g(&[2.0 * d - 1.0], &[d])? * inv44);
            s.with(ke, Hyp::E, d, cfg)?;
        }
        7 => {
            s.with(g1sq * r / (2.0 * q * q * g22), Hyp::A, d, cfg)?;
            s.with(-2.0 * k4, Hyp::H, d, cfg)?;
        }
        8 => s.with(
            g1sq * r / (3.0 * q) * g(&[], &[3.0 - 2.0 * d])?,
            Hyp::D,
            d,
            cfg,
        )?,
        11 => {
            s.with(ke, Hyp::E, d, cfg)?;
            s.with(-k4, Hyp::A, d, cfg)?;
        }
        12 => {
            s.plain(g1sq * g1 * r * g22 * g(&[2.0 * d - 1.0], &[d])? * inv44);
            let gp = g(&[2.0 * d - 1.0], &[2.0 * d])?;
            s.with(-g1 * gp * g33 * r * inv44 / q, Hyp::P, d, cfg)?;
        }
        _ => return Err(Error::Domain(format!("c₅ region {i} (expected 1..12)"))),
    }
    Ok(s.estimate())
}

/// S = Γ(4−5d)/Γ(6−5d)·[six-term bracket]; c₅ = 10·S and κ₅ = 3840σ⁵·S.
#[allow(non_snake_case)]
pub fn c5_S(d: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_d(d)?;
    if d == 0.0 {
        return Ok(Estimate::exact(0.1, 0));
    }
    let q = 1.0 - d;
    let r = g(&[4.0 - 5.0 * d], &[6.0 - 5.0 * d])?;
    let g1 = g(&[q], &[])?;
    let g1sq = g1 * g1;
    let inv44 = g(&[], &[4.0 - 4.0 * d])?;
    let g22 = g(&[2.0 - 2.0 * d], &[])?;
    let g33 = g(&[3.0 - 3.0 * d], &[])?;
    let mut s = Sum::default();
    s.plain(g1sq * g1sq * inv44);
    s.with(g1sq * g1 * g33 * inv44 / (q * g22), Hyp::B, d, cfg)?;
    s.with(g1sq * g22 * inv44 / q, Hyp::C, d, cfg)?;
    s.with(g1sq / (6.0 * q * q * g22), Hyp::D, d, cfg)?;
    s.with(2.0 * g1sq / (3.0 * q * q * g22), Hyp::E, d, cfg)?;
    s.with(g1sq / (2.0 * q * q * g22), Hyp::A, d, cfg)?;
    let e = s.estimate();
    Ok(Estimate {
        value: r * e.value,
        error: r * e.error,
        terms: e.terms,
    })
}

/// Closed-form c_k for k = 2..5.
pub fn c_closed(k: u32, d: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_d(d)?;
    match k {
        2 => Ok(Estimate::exact(c2(d)?, 0)),
        3 => {
            let v = c3_closed(d)?;
            Ok(Estimate {
                value: v,
                error: if d == 0.0 {
                    0.0
                } else {
                    8.0 * f64::EPSILON * v
                },
                terms: 0,
            })
        }
        4 => c4_closed(d, cfg),
        5 => {
            let s = c5_S(d, cfg)?;
            Ok(Estimate {
                value: 10.0 * s.value,
                error: 10.0 * s.error,
                terms: s.terms,
            })
        }
        _ => Err(Error::Unsupported(format!("cumulant order {k}"))),
    }
}

fn report(k: u32, d: f64, value: f64, error: f64, terms: usize) -> CumulantReport {
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("series_terms".to_string(), terms.to_string());
    CumulantReport {
        order: k,
        d,
        value,
        method: Method::ClosedForm,
        error_estimate: error,
        diagnostics,
    }
}

fn kappa_closed(k: u32, d: f64, cfg: &EvalConfig) -> Result<CumulantReport> {
    check_d(d)?;
    if d == 0.5 {
        // every form carries a (1−2d) factor
        return Ok(report(k, d, 0.0, 0.0, 0));
    }
    let c = c_closed(k, d, cfg)?;
    let f = kappa_from_c(k, d, 1.0)?;
    let err = if d == 0.0 {
        0.0
    } else {
        f * c.error + 4.0 * f64::EPSILON * (f * c.value).abs()
    };
    Ok(report(k, d, f * c.value, err, c.terms))
}

pub fn kappa3(d: f64) -> Result<CumulantReport> {
    kappa_closed(3, d, &EvalConfig::default())
}

pub fn kappa4(d: f64) -> Result<CumulantReport> {
    kappa_closed(4, d, &EvalConfig::default())
}

pub fn kappa5(d: f64) -> Result<CumulantReport> {
    kappa_closed(5, d, &EvalConfig::default())
}

/// κ_k(d) for k = 2..5; κ₂ ≡ 1 under this normalisation.
pub fn kappa(k: u32, d: f64, cfg: &EvalConfig) -> Result<CumulantReport> {
    check_d(d)?;
    match k {
        2 => Ok(report(2, d, 1.0, 0.0, 0)),
        3..=5 => kappa_closed(k, d, cfg),
        _ => Err(Error::Unsupported(format!(
            "cumulant order {k} (supported: 2..5)"
        ))),
    }
}

/// φ(θ) from the truncated cumulant series, with a flag raised when the
/// included terms grow in magnitude (outside the region where the series converges).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiValue {
    pub value: Complex64,
    pub divergent: bool,
}

/// exp(Σ_{k=2}^{K} (iθ)^k κ_k/k!), the same as exp(½Σ(2iθσ)^k c_k/k).
pub fn characteristic_function(
    theta: f64,
    d: f64,
    k_max: u32,
    cfg: &EvalConfig,
) -> Result<PhiValue> {
    check_d(d)?;
    if k_max < 2 {
        return Err(Error::Domain(format!("truncation order {k_max} < 2")));
    }
    if k_max > 5 {
        return Err(Error::Unsupported(format!(
            "truncation order {k_max}: only κ₂..κ₅ are available"
        )));
    }
    let mut exponent = Complex64::new(0.0, 0.0);
    let mut mags = Vec::new();
    let mut fact = 1.0;
    for k in 2..=k_max {
        fact *= f64::from(k);
        let kap = kappa(k, d, cfg)?.value;
        let t = Complex64::new(0.0, theta).powu(k) * (kap / fact);
        mags.push(t.norm());
        exponent += t;
    }
    let divergent = mags.len() >= 2 && mags[mags.len() - 1] > mags[mags.len() - 2];
    Ok(PhiValue {
        value: exponent.exp(),
        divergent,
    })
}

/// Closed-form reports for every (k, d) pair, sorted by (k, d).
pub fn cumulant_table(
    grid: &[f64],
    orders: &[u32],
    cfg: &EvalConfig,
) -> Result<Vec<CumulantReport>> {
    let pairs: Vec<(u32, f64)> = orders
        .iter()
        .flat_map(|&k| grid.iter().map(move |&d| (k, d)))
        .collect();
    let mut out = pairs
        .par_iter()
        .map(|&(k, d)| kappa(k, d, cfg))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.order.cmp(&b.order).then(a.d.total_cmp(&b.d)));
    Ok(out)
}
