//! The operator route: G_{1,d}(x) = (1−x)^{−d}/√(1−d), G_{k+1} = K_d G_k with
//! (K_d f)(x) = ∫₀¹|x−u|^{−d} f(u) du, and c_{μ+ν} = ∫₀¹ G_μ G_ν.
//!
//! G₁, G₂ are closed forms. G₃ is a closed form for x ≤ 0.99 and G₄ is assembled
//! from the kernel-weighted integrals for x ≤ 0.95; closer to 1 both are
//! obtained by applying the operator to the previous G.
//! Every evaluator takes the complement y = 1 − x alongside x.

use crate::quad::tanh_sinh;
use crate::specfun::{
    gamma, gamma_product, gamma_ratio, gamma_ratio_lim, hyp_2f1_split, hyp_pfq,
    series::richardson_sum, Estimate, EvalConfig, HypParams, UnitShiftFamily,
};
use crate::{Error, Result};

/// Closed-form G₃ is used up to here. Closer to 1 its series only reaches the
/// power-law regime after ~1/(1−x) terms.
pub const G3_CLOSED_FORM_LIMIT: f64 = 0.99;
/// Closed-form G₄ is used up to here; the I₂ series get too long beyond.
pub const G4_CLOSED_FORM_LIMIT: f64 = 0.95;

const QUAD_ABS: f64 = 1e-13;
const QUAD_REL: f64 = 1e-11;
const INNER_PRODUCT_REL: f64 = 1e-9;
/// Richardson tails within this relative error are accepted when the
/// requested tolerance is out of reach in double precision.
const TAIL_ACCEPT: f64 = 1e-9;
const TAIL_CAP: usize = 1 << 14;

/// Limits for one power-law tail sum.
#[derive(Clone, Copy)]
struct Tail {
    n0: usize,
    cap: usize,
    accept: f64,
}

impl Tail {
    const fn new(n0: usize) -> Self {
        Self {
            n0,
            cap: TAIL_CAP,
            accept: TAIL_ACCEPT,
        }
    }
}

fn check_d(d: f64) -> Result<()> {
    if (0.0..0.5).contains(&d) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "operator route needs 0 ≤ d < 0.5, got {d}"
        )))
    }
}

fn check_x(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && y > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("x = {x} outside (0, 1)")))
    }
}

fn tail_sum(
    term: impl FnMut(usize) -> Result<f64>,
    s: f64,
    tail: Tail,
    cfg: &EvalConfig,
) -> Result<f64> {
    let cap = cfg.max_terms.min(tail.cap).max(8 * tail.n0);
    match richardson_sum(term, s, tail.n0, cfg.rel_tol.max(1e-11), cap) {
        Ok(e) => Ok(e.value),
        Err(Error::NonConvergence { value, error, .. })
            if error <= tail.accept * value.abs().max(1.0) =>
        {
            Ok(value)
        }
        Err(e) => Err(e),
    }
}

pub fn g1(x: f64, d: f64) -> Result<f64> {
    g1_split(x, 1.0 - x, d)
}

pub fn g1_split(x: f64, y: f64, d: f64) -> Result<f64> {
    check_d(d)?;
    check_x(x, y)?;
    Ok(y.powf(-d) / (1.0 - d).sqrt())
}

pub fn g2(x: f64, d: f64) -> Result<f64> {
    g2_split(x, 1.0 - x, d, &EvalConfig::default())
}

/// x^{1−d}₂F₁(1,d;2−d;x)/(1−d)^{3/2} + Γ(1−d)²/(√(1−d)Γ(2−2d))·(1−x)^{1−2d}.
pub fn g2_split(x: f64, y: f64, d: f64, cfg: &EvalConfig) -> Result<f64> {
    check_d(d)?;
    check_x(x, y)?;
    if d == 0.0 {
        return Ok(1.0);
    }
    let q = 1.0 - d;
    let f = hyp_2f1_split(1.0, d, 2.0 - d, x, y, cfg)?;
    let g = gamma_product(&[q, q], &[2.0 - 2.0 * d])?;
    Ok(x.powf(q) * f / q.powf(1.5) + g / q.sqrt() * y.powf(1.0 - 2.0 * d))
}

/// Γ(1−d)/(1−d)^{3/2}·(Γ(2−d)/Γ(3−2d) + Γ(2d−2)/Γ(d−1)), the leading G₃
/// coefficient. The second ratio is taken as its limit at d = 0.
pub fn g3_prefactor(d: f64) -> Result<f64> {
    check_d(d)?;
    let q = 1.0 - d;
    let r = gamma_ratio(2.0 - d, 3.0 - 2.0 * d)? + gamma_ratio_lim((-2.0, 2.0), (-1.0, 1.0), d)?;
    Ok(gamma(q) / q.powf(1.5) * r)
}

/// Weight of the m-th term in the G₃ series, (d)_m(2−2d)_m/((2−d)_m(3−2d)_m), by recurrence.
fn next_weight(w: f64, m: usize, d: f64) -> f64 {
    let mf = m as f64;
    w * (d + mf) * (2.0 - 2.0 * d + mf) / ((2.0 - d + mf) * (3.0 - 2.0 * d + mf))
}

pub fn g3(x: f64, d: f64, cfg: &EvalConfig) -> Result<f64> {
    g3_split(x, 1.0 - x, d, cfg)
}

/// G₃ from the closed form, or from the operator applied to G₂ above
/// [`G3_CLOSED_FORM_LIMIT`] or where the closed-form series does not settle.
pub fn g3_split(x: f64, y: f64, d: f64, cfg: &EvalConfig) -> Result<f64> {
    match g3_closed_form(x, y, d, cfg) {
        Err(Error::Truncated { .. } | Error::NonConvergence { .. }) => {
            Ok(apply_k(|u, v| g2_split(u, v, d, cfg), d, x, y)?.value)
        }
        r => r,
    }
}

/// The four-term closed form; the series over ₂F₁(2d−2−k, d; 2d−1−k; x)
/// decays like k^{2d−3} and is summed with a power-law tail.
pub fn g3_closed_form(x: f64, y: f64, d: f64, cfg: &EvalConfig) -> Result<f64> {
    check_d(d)?;
    check_x(x, y)?;
    if d == 0.0 {
        return Ok(1.0);
    }
    if x > G3_CLOSED_FORM_LIMIT {
        return Err(Error::Truncated { x });
    }
    let q = 1.0 - d;
    let t1 =
        g3_prefactor(d)? * x.powf(2.0 - 2.0 * d) * hyp_2f1_split(1.0, d, 3.0 - 2.0 * d, x, y, cfg)?;

    let mut fam = UnitShiftFamily::new(2.0 * d - 2.0, d, x, y, cfg)?;
    let mut w = 1.0;
    let sum = tail_sum(
        |k| {
            if k > 0 {
                w = next_weight(w, k - 1, d);
            }
            Ok(w * fam.get(k)?)
        },
        2.0 - 2.0 * d,
        Tail::new(32),
        cfg,
    )?;
    let t2 = gamma_ratio(2.0 - 2.0 * d, 3.0 - 2.0 * d)? / q.powf(1.5) * sum;

    let t3 = gamma_product(&[q, q], &[2.0 - 2.0 * d])? / q.powf(1.5)
        * x.powf(q)
        * hyp_2f1_split(1.0, 2.0 * d - 1.0, 2.0 - d, x, y, cfg)?;
    let t4 = gamma_product(&[q, q, q], &[3.0 - 3.0 * d])? / q.sqrt() * y.powf(2.0 - 3.0 * d);
    Ok(t1 + t2 + t3 + t4)
}

/// Γ(1−d)(Γ(1+e)/Γ(2−d+e) + Γ(d−1−e)/Γ(−e)), i.e. B(1−d, 1+e) + B(1−d, d−1−e).
pub fn kernel_power_prefactor(d: f64, e: f64) -> Result<f64> {
    Ok(gamma(1.0 - d) * (gamma_ratio(1.0 + e, 2.0 - d + e)? + gamma_ratio(d - 1.0 - e, -e)?))
}

/// ∫₀¹|x−u|^{−d} u^e ₂F₁(a,b;c;u) du for c > a + b:
/// P·x^{1−d+e}₃F₂(a,b,e+1; c,2−d+e; x) + Σ_m (a)_m(b)_m/((c)_m m!)·₂F₁(d−1−e−m,d;d−e−m;x)/(1−d+e+m).
#[allow(clippy::too_many_arguments)]
pub fn kernel_2f1_integral(
    a: f64,
    b: f64,
    c: f64,
    e: f64,
    d: f64,
    x: f64,
    cfg: &EvalConfig,
) -> Result<f64> {
    check_kernel_2f1(a, b, c, e, d, x)?;
    let mut fam = UnitShiftFamily::new(d - 1.0 - e, d, x, 1.0 - x, cfg)?;
    kernel_2f1_with_family(a, b, c, e, d, x, &mut fam, Tail::new(32), cfg)
}

fn check_kernel_2f1(a: f64, b: f64, c: f64, e: f64, d: f64, x: f64) -> Result<()> {
    check_d(d)?;
    check_x(x, 1.0 - x)?;
    if c <= a + b {
        return Err(Error::Divergent { margin: c - a - b });
    }
    if e <= -1.0 {
        return Err(Error::Domain(format!(
            "u^e not integrable at 0 for e = {e}"
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn kernel_2f1_with_family(
    a: f64,
    b: f64,
    c: f64,
    e: f64,
    d: f64,
    x: f64,
    fam: &mut UnitShiftFamily,
    tail: Tail,
    cfg: &EvalConfig,
) -> Result<f64> {
    let p = kernel_power_prefactor(d, e)?;
    let t1 = if p == 0.0 {
        0.0
    } else {
        let h = HypParams::new([a, b, e + 1.0], [c, 2.0 - d + e]);
        p * x.powf(1.0 - d + e) * hyp_pfq(&h, x, cfg)?
    };
    let mut w = 1.0;
    let t2 = tail_sum(
        |m| {
            if m > 0 {
                let mf = (m - 1) as f64;
                w *= (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0));
            }
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w / (1.0 - d + e + m as f64) * fam.get(m)?)
        },
        c - a - b + 1.0,
        tail,
        cfg,
    )?;
    Ok(t1 + t2)
}

/// ∫₀¹|x−u|^{−d}(1−u)^{p−(p+1)d} du
/// = Γ(1−d)Γ((p+1)(1−d))/Γ((p+2)(1−d))·(1−x)^{(p+1)−(p+2)d} + x^{1−d}₂F₁(1,(p+1)d−p;2−d;x)/(1−d).
pub fn kernel_power_integral(p: u32, d: f64, x: f64) -> Result<f64> {
    kernel_power_split(p, d, x, 1.0 - x, &EvalConfig::default())
}

fn kernel_power_split(p: u32, d: f64, x: f64, y: f64, cfg: &EvalConfig) -> Result<f64> {
    check_d(d)?;
    check_x(x, y)?;
    let pf = f64::from(p);
    let q = 1.0 - d;
    let g = gamma_product(&[q, (pf + 1.0) * q], &[(pf + 2.0) * q])?;
    let f = hyp_2f1_split(1.0, (pf + 1.0) * d - pf, 2.0 - d, x, y, cfg)?;
    Ok(g * y.powf(pf + 1.0 - (pf + 2.0) * d) + x.powf(q) / q * f)
}

/// (K_d f)(x) by quadrature split at u = x. The substitutions
/// u = x ∓ t^{1/(1−d)} absorb the kernel singularity, and both pieces pass
/// f its argument together with the exact complement 1 − u.
pub fn apply_k<F>(mut f: F, d: f64, x: f64, y: f64) -> Result<Estimate>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    check_d(d)?;
    check_x(x, y)?;
    let q = 1.0 / (1.0 - d);
    let mut failure = None;
    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
        terms: 0,
    };
    for left in [true, false] {
        let span = if left { x } else { y };
        let tmax = span.powf(1.0 - d);
        let piece = tanh_sinh(
            |t, _, r| {
                // (t/tmax)^q and 1 − (t/tmax)^q without cancellation
                let near = -(q * (-r / tmax).ln_1p()).exp_m1();
                let far = (q * (t / tmax).ln()).exp();
                let (u, v) = if left {
                    (span * near, y + span * far)
                } else {
                    let v = span * near;
                    // 1 − v is exact enough there and cannot round past 1
                    (if v < 0.5 { 1.0 - v } else { x + span * far }, v)
                };
                match f(u, v) {
                    Ok(val) => val * q,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            0.0,
            tmax,
            QUAD_ABS,
            QUAD_REL,
        );
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let piece = piece?;
        total.value += piece.value;
        total.error += piece.error;
        total.terms += piece.terms;
    }
    Ok(total)
}

/// G₄(x) from its closed-form pieces, valid for x ≤ 0.95:
/// A·I₁ + Γ(2−2d)/(Γ(3−2d)(1−d)^{3/2})·Σ_m w_m I₂(m) + Γ(1−d)²/((1−d)^{3/2}Γ(2−2d))·I₃
/// + Γ(1−d)³/(√(1−d)Γ(3−3d))·I₄, each I a kernel-weighted integral.
pub fn g4_terms(x: f64, d: f64, cfg: &EvalConfig) -> Result<f64> {
    check_d(d)?;
    // x may round to 1 at quadrature nodes whose complement is still positive
    if x > G4_CLOSED_FORM_LIMIT && x <= 1.0 {
        return Err(Error::Truncated { x });
    }
    check_x(x, 1.0 - x)?;
    if d == 0.0 {
        return Ok(1.0);
    }
    let q = 1.0 - d;
    let i1 = kernel_2f1_integral(1.0, d, 3.0 - 2.0 * d, 2.0 - 2.0 * d, d, x, cfg)?;
    let i3 = kernel_2f1_integral(1.0, 2.0 * d - 1.0, 2.0 - d, q, d, x, cfg)?;
    let i4 = kernel_power_integral(2, d, x)?;

    // every I₂(m) has e = 0 and shares the ₂F₁(d−1−j, d; d−j; x) family
    let mut fam = UnitShiftFamily::new(d - 1.0, d, x, 1.0 - x, cfg)?;
    let mut w = 1.0;
    let i2 = tail_sum(
        |m| {
            if m > 0 {
                w = next_weight(w, m - 1, d);
            }
            let a = 2.0 * d - 2.0 - m as f64;
            // the inner terms change sign near j ≈ m, so the tail starts past 4m
            let n0 = 32.max(4 * m);
            let inner = Tail {
                n0,
                cap: 32 * n0,
                accept: 1e-7,
            };
            let i = kernel_2f1_with_family(a, d, a + 1.0, 0.0, d, x, &mut fam, inner, cfg)?;
            Ok(w * i)
        },
        2.0 - 2.0 * d,
        Tail {
            n0: 16,
            cap: 512,
            accept: 1e-7,
        },
        cfg,
    )?;

    Ok(g3_prefactor(d)? * i1
        + gamma_ratio(2.0 - 2.0 * d, 3.0 - 2.0 * d)? / q.powf(1.5) * i2
        + gamma_product(&[q, q], &[2.0 - 2.0 * d])? / q.powf(1.5) * i3
        + gamma_product(&[q, q, q], &[3.0 - 3.0 * d])? / q.sqrt() * i4)
}

/// G_{k,d} for k = 1..4 as an evaluable function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFunction {
    pub order: u32,
    pub d: f64,
}

impl GFunction {
    pub fn new(order: u32, d: f64) -> Result<Self> {
        check_d(d)?;
        if !(1..=4).contains(&order) {
            return Err(Error::Unsupported(format!("G_{order}: only orders 1..4")));
        }
        Ok(Self { order, d })
    }

    /// Exponents (p₀, p₁) with G ~ x^{p₀} near 0 and ~ (1−x)^{p₁} near 1.
    pub fn profile(&self) -> (f64, f64) {
        match self.order {
            1 => (0.0, -self.d),
            _ => (0.0, 0.0),
        }
    }

    pub fn eval(&self, x: f64, cfg: &EvalConfig) -> Result<f64> {
        self.eval_split(x, 1.0 - x, cfg)
    }

    /// G(x) given x and 1 − x separately. Order 4 falls back to the operator
    /// applied to G₃ where the closed form is truncated or does not settle.
    pub fn eval_split(&self, x: f64, y: f64, cfg: &EvalConfig) -> Result<f64> {
        let d = self.d;
        match self.order {
            1 => g1_split(x, y, d),
            2 => g2_split(x, y, d, cfg),
            3 => g3_split(x, y, d, cfg),
            _ => match g4_terms(x, d, cfg) {
                Err(Error::Truncated { .. } | Error::NonConvergence { .. }) => {
                    Ok(apply_k(|u, v| g3_split(u, v, d, cfg), d, x, y)?.value)
                }
                r => r,
            },
        }
    }

    /// (K_d G)(x), i.e. G_{k+1}(x) computed numerically.
    pub fn apply_k(&self, x: f64, cfg: &EvalConfig) -> Result<Estimate> {
        apply_k(|u, v| self.eval_split(u, v, cfg), self.d, x, 1.0 - x)
    }
}

/// c_{μ+ν} = ∫₀¹ G_μ G_ν dx by tanh-sinh quadrature.
pub fn c_k_vt(mu: u32, nu: u32, d: f64, cfg: &EvalConfig) -> Result<Estimate> {
    let (gm, gn) = (GFunction::new(mu, d)?, GFunction::new(nu, d)?);
    if mu + nu > 5 {
        return Err(Error::Unsupported(format!(
            "c_{} via the operator route",
            mu + nu
        )));
    }
    if d == 0.0 {
        return Ok(Estimate {
            value: 1.0,
            error: 0.0,
            terms: 0,
        });
    }
    let mut failure = None;
    let est = tanh_sinh(
        |x, _, y| match gm
            .eval_split(x, y, cfg)
            .and_then(|a| Ok(a * gn.eval_split(x, y, cfg)?))
        {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        1.0,
        QUAD_ABS,
        INNER_PRODUCT_REL,
    );
    match failure {
        Some(e) => Err(e),
        None => est,
    }
}
