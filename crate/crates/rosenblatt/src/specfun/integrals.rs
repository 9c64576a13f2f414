use super::{
    gamma_product, hyp_2f1_split, nonpositive_integer, pfq_at_1_continued, EvalConfig, HypParams,
};
use crate::{Error, Result};

/// ∫₀¹ (1−pz)^{−d} (1−qz)^{−d} dz for 0 ≤ p, q < 1 (not both zero) and 0 ≤ d < 1.
///
/// The two-term ₂F₁ closed form evaluates ₂F₁ at q/p, so the arguments are
/// ordered with p ≥ q first; the integrand is symmetric.
pub fn product_binomial_integral(p: f64, q: f64, d: f64) -> Result<f64> {
    let ok = |v: f64| (0.0..1.0).contains(&v);
    if !(ok(p) && ok(q) && ok(d)) {
        return Err(Error::Domain(format!(
            "product_binomial_integral({p}, {q}, {d})"
        )));
    }
    let (p, q) = if p >= q { (p, q) } else { (q, p) };
    if d == 0.0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(1.0);
    }
    if p == q {
        let e = 1.0 - 2.0 * d;
        let lp = (-p).ln_1p();
        return Ok(if e == 0.0 {
            -lp / p
        } else {
            -(e * lp).exp_m1() / (p * e)
        });
    }
    let cfg = EvalConfig::default();
    let f1 = hyp_2f1_split(1.0, d, 2.0 - d, q / p, (p - q) / p, &cfg)?;
    let z = q * (1.0 - p) / (p * (1.0 - q));
    let f2 = hyp_2f1_split(1.0, d, 2.0 - d, z, (p - q) / (p * (1.0 - q)), &cfg)?;
    let w = ((1.0 - d) * (-p).ln_1p() - d * (-q).ln_1p()).exp();
    Ok((f1 - w * f2) / ((1.0 - d) * p))
}

fn gamma_term(num: &[f64], den: &[f64]) -> Result<f64> {
    if den.iter().any(|&x| nonpositive_integer(x).is_some()) {
        return Ok(0.0);
    }
    gamma_product(num, den)
}

/// ∫₀¹ x^{α−1}(1−x)^{c−1} ₂F₁(a,b;c;1−x) ₂F₁(a′,b′;c′;1−x) dx as two ₄F₃(1) terms.
///
/// The ₄F₃ series are evaluated as analytic continuations when their margin
/// is negative, which is what the formula means for the parameter families
/// where the integral converges but the series do not.
#[allow(clippy::too_many_arguments)]
pub fn product_2f1_integral(
    alpha: f64,
    a: f64,
    b: f64,
    c: f64,
    a2: f64,
    b2: f64,
    c2: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && c > 0.0 && c2 > 0.0) {
        return Err(Error::Domain(format!(
            "product_2f1_integral: α={alpha}, c={c}, c′={c2}"
        )));
    }
    // Continued sums lose a few digits to the growing partial sums.
    let cfg = EvalConfig::default().with_rel_tol(1e-10);
    let eval = |top: [f64; 4], bottom: [f64; 3]| -> Result<f64> {
        match pfq_at_1_continued(&HypParams::new(top, bottom), &cfg) {
            Ok(e) => Ok(e.value),
            Err(Error::NonConvergence { value, error, .. }) if error <= 1e-8 * value.abs() => {
                Ok(value)
            }
            Err(e) => Err(e),
        }
    };
    let s1 = c - a - b + alpha;
    let g1 = gamma_term(
        &[c, c2, c2 - a2 - b2, alpha, s1],
        &[c - a + alpha, c - b + alpha, c2 - a2, c2 - b2],
    )?;
    let t1 = if g1 == 0.0 {
        0.0
    } else {
        g1 * eval(
            [a2, b2, alpha, s1],
            [c - a + alpha, c - b + alpha, a2 + b2 - c2 + 1.0],
        )?
    };
    let u = c2 - a2 - b2 + alpha;
    let v = c + c2 - a - a2 - b - b2 + alpha;
    let w1 = c + c2 - a - a2 - b2 + alpha;
    let w2 = c + c2 - a2 - b - b2 + alpha;
    let g2 = gamma_term(&[c, c2, a2 + b2 - c2, u, v], &[a2, b2, w1, w2])?;
    let t2 = if g2 == 0.0 {
        0.0
    } else {
        g2 * eval([c2 - a2, c2 - b2, u, v], [c2 - a2 - b2 + 1.0, w1, w2])?
    };
    Ok(t1 + t2)
}
