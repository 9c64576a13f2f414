//! Scalar special functions: Gamma with pole bookkeeping, Pochhammer symbols,
//! Gauss ₂F₁ and generalized pFq at unit argument.

mod hyp2f1;
mod integrals;
mod pfq;
pub(crate) mod series;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use hyp2f1::hyp_2f1_split;
pub(crate) use hyp2f1::UnitShiftFamily;
pub use hyp2f1::{gauss_2f1_at_1, hyp_2f1, hyp_2f1_cfg};
pub use integrals::{product_2f1_integral, product_binomial_integral};
pub use pfq::{hyp_pfq, pfq_at_1, pfq_at_1_continued};

/// Parameter lists of a generalized hypergeometric series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypParams {
    pub top: Vec<f64>,
    pub bottom: Vec<f64>,
}

impl HypParams {
    pub fn new(top: impl Into<Vec<f64>>, bottom: impl Into<Vec<f64>>) -> Self {
        Self {
            top: top.into(),
            bottom: bottom.into(),
        }
    }

    /// Convergence margin s = Σbottom − Σtop.
    pub fn margin(&self) -> f64 {
        self.bottom.iter().sum::<f64>() - self.top.iter().sum::<f64>()
    }

    /// Smallest |a| over top parameters that are non-positive integers, if any.
    pub fn terminating_order(&self) -> Option<u64> {
        self.top
            .iter()
            .filter_map(|&a| nonpositive_integer(a))
            .min()
    }

    /// Checks the bottom-parameter invariant: a non-positive integer bottom
    /// parameter is only allowed when the series terminates strictly before it.
    pub fn validate(&self) -> Result<()> {
        if self.top.iter().chain(&self.bottom).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite hypergeometric parameter".into()));
        }
        let stop = self.terminating_order();
        for &b in &self.bottom {
            if let Some(m) = nonpositive_integer(b) {
                if stop.is_none_or(|n| n >= m) {
                    return Err(Error::Pole(b));
                }
            }
        }
        Ok(())
    }

    /// Removes top/bottom pairs that are equal; their Pochhammer ratios are 1.
    pub fn reduced(&self) -> Self {
        let mut top = self.top.clone();
        let mut bottom = Vec::with_capacity(self.bottom.len());
        for &b in &self.bottom {
            match top.iter().position(|&a| a == b) {
                Some(i) => {
                    top.remove(i);
                }
                None => bottom.push(b),
            }
        }
        Self { top, bottom }
    }
}

/// How the tail of a slowly converging series at unit argument is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailPolicy {
    /// Richardson extrapolation on the asymptotic power law k^{−1−s}.
    PowerLawTailEstimate,
    /// Levin u-transform of the partial sums.
    SequenceAcceleration,
    /// Plain summation until the terms are negligible.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub tail_policy: TailPolicy,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 1_000_000,
            tail_policy: TailPolicy::PowerLawTailEstimate,
        }
    }
}

impl EvalConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_policy(mut self, policy: TailPolicy) -> Self {
        self.tail_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_terms == 0 {
            return Err(Error::Domain(format!(
                "rel_tol must be > 0 and max_terms ≥ 1 (got {}, {})",
                self.rel_tol, self.max_terms
            )));
        }
        Ok(())
    }
}

/// A value with an error estimate and the number of terms it took.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub terms: usize,
}

impl Estimate {
    pub(crate) fn exact(value: f64, terms: usize) -> Self {
        Self {
            value,
            error: 0.0,
            terms,
        }
    }
}

pub(crate) fn nonpositive_integer(x: f64) -> Option<u64> {
    (x <= 0.0 && x.fract() == 0.0).then(|| (-x) as u64)
}

/// ln|Γ(x)| together with the sign of Γ(x).
pub fn log_gamma(x: f64) -> Result<(f64, f64)> {
    if nonpositive_integer(x).is_some() || x.is_nan() {
        return Err(Error::Pole(x));
    }
    let (lg, sign) = libm::lgamma_r(x);
    Ok((lg, if sign < 0 { -1.0 } else { 1.0 }))
}

/// Γ(x); infinite at the poles.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if nonpositive_integer(x).is_some() {
        return 0.0;
    }
    if !(-170.0..=170.0).contains(&x) {
        let (lg, s) = libm::lgamma_r(x);
        return if s < 0 { -(-lg).exp() } else { (-lg).exp() };
    }
    1.0 / libm::tgamma(x)
}

fn ratio_regular(a: f64, b: f64) -> f64 {
    if a.abs() < 150.0 && b.abs() < 150.0 {
        let (ga, gb) = (libm::tgamma(a), libm::tgamma(b));
        if ga.is_finite() && gb.is_finite() && ga != 0.0 {
            return ga / gb;
        }
    }
    let (la, sa) = libm::lgamma_r(a);
    let (lb, sb) = libm::lgamma_r(b);
    let v = (la - lb).exp();
    if sa * sb < 0 {
        -v
    } else {
        v
    }
}

/// (−1)^m n!/m!: the limit of Γ(−m+ε)/Γ(−n+ε) as ε → 0.
fn residue_ratio(m: u64, n: u64) -> f64 {
    let mag = (libm::lgamma(n as f64 + 1.0) - libm::lgamma(m as f64 + 1.0)).exp();
    if (m + n) % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// Γ(a)/Γ(b) with pole pairs cancelled analytically.
///
/// When both arguments sit on poles they are taken to approach them at the same
/// rate, which is what shifting both arguments up by the recurrence gives.
/// A pole in the denominator alone yields 0; a pole in the numerator alone is an error.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(m), Some(n)) => Ok(residue_ratio(m, n)),
        (Some(_), None) => Err(Error::Pole(a)),
        (None, Some(_)) => Ok(0.0),
        (None, None) => Ok(ratio_regular(a, b)),
    }
}

/// Γ(a₀+a₁d)/Γ(b₀+b₁d) as a function of d, taking the limit when both
/// arguments hit poles (the slopes a₁, b₁ set the relative rates).
pub fn gamma_ratio_lim(a: (f64, f64), b: (f64, f64), d: f64) -> Result<f64> {
    let (x, y) = (a.0 + a.1 * d, b.0 + b.1 * d);
    match (nonpositive_integer(x), nonpositive_integer(y)) {
        (Some(m), Some(n)) => {
            if a.1 == 0.0 || b.1 == 0.0 {
                return Err(Error::Degenerate("pole pair with zero slope".into()));
            }
            Ok(residue_ratio(m, n) * b.1 / a.1)
        }
        _ => gamma_ratio(x, y),
    }
}

/// ∏Γ(num)/∏Γ(den) as (ln|value|, sign). Denominator poles give a zero value
/// (returned as `None`); numerator poles are an error.
pub fn log_gamma_product(num: &[f64], den: &[f64]) -> Result<Option<(f64, f64)>> {
    for &x in num {
        if nonpositive_integer(x).is_some() {
            return Err(Error::Pole(x));
        }
    }
    if den.iter().any(|&x| nonpositive_integer(x).is_some()) {
        return Ok(None);
    }
    let mut log = 0.0;
    let mut sign = 1.0;
    for &x in num {
        let (l, s) = log_gamma(x)?;
        log += l;
        sign *= s;
    }
    for &x in den {
        let (l, s) = log_gamma(x)?;
        log -= l;
        sign *= s;
    }
    Ok(Some((log, sign)))
}

/// ∏Γ(num)/∏Γ(den) with the pole rules of [`log_gamma_product`].
pub fn gamma_product(num: &[f64], den: &[f64]) -> Result<f64> {
    let small = num.iter().chain(den).all(|x| x.abs() < 60.0);
    if small {
        for &x in num {
            if nonpositive_integer(x).is_some() {
                return Err(Error::Pole(x));
            }
        }
        let mut v = 1.0;
        for &x in num {
            v *= libm::tgamma(x);
        }
        for &x in den {
            v *= rgamma(x);
        }
        if v.is_finite() && v != 0.0 {
            return Ok(v);
        }
        if den.iter().any(|&x| nonpositive_integer(x).is_some()) {
            return Ok(0.0);
        }
    }
    Ok(log_gamma_product(num, den)?.map_or(0.0, |(l, s)| s * l.exp()))
}

/// Beta function B(a, b).
pub fn beta(a: f64, b: f64) -> Result<f64> {
    gamma_product(&[a, b], &[a + b])
}

/// Rising factorial (a)_k.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    if k <= 30 {
        return (0..k).fold(1.0, |p, i| p * (a + i as f64));
    }
    if let Some(m) = nonpositive_integer(a) {
        if (k as u64) > m {
            return 0.0;
        }
        // (−m)_k = (−1)^k m!/(m−k)!
        let mag = (libm::lgamma(m as f64 + 1.0) - libm::lgamma((m - k as u64) as f64 + 1.0)).exp();
        return if k % 2 == 1 { -mag } else { mag };
    }
    let end = a + k as f64;
    if nonpositive_integer(end).is_some() {
        // Γ(a+k) sits on a pole only if a is a non-positive integer, handled above;
        // guard anyway against rounding in `end`.
        return (0..k).fold(1.0, |p, i| p * (a + i as f64));
    }
    let (la, sa) = libm::lgamma_r(a);
    let (le, se) = libm::lgamma_r(end);
    let v = (le - la).exp();
    if sa * se < 0 {
        -v
    } else {
        v
    }
}

/// Digamma ψ(x) for real x off the poles.
pub fn digamma(x: f64) -> Result<f64> {
    if nonpositive_integer(x).is_some() || x.is_nan() {
        return Err(Error::Pole(x));
    }
    if x < 0.5 {
        // ψ(1−x) − ψ(x) = π cot(πx)
        let r = std::f64::consts::PI / (std::f64::consts::PI * x).tan();
        return Ok(digamma(1.0 - x)? - r);
    }
    let mut z = x;
    let mut acc = 0.0;
    while z < 10.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let z2 = 1.0 / (z * z);
    // Bernoulli tail B₂ₖ/(2k z^{2k})
    let tail = z2
        * (1.0 / 12.0
            - z2 * (1.0 / 120.0
                - z2 * (1.0 / 252.0
                    - z2 * (1.0 / 240.0 - z2 * (1.0 / 132.0 - z2 * 691.0 / 32760.0)))));
    Ok(acc + z.ln() - 0.5 / z - tail)
}
