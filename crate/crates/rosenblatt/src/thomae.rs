//! Three-term ₃F₂(1) transformations, the negative-bottom shift and ₄F₃ splits.
//!
//! A [`ThomaeForm`] is `prefactor · ₃F₂(a,b,c; e,f; 1)` with the prefactor kept
//! in log space. Every map returns a form with the same value.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::specfun::{
    hyp_pfq, log_gamma_product, pfq_at_1, pochhammer, rgamma, Estimate, EvalConfig, HypParams,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThomaeForm {
    pub params: HypParams,
    pub prefactor_log: f64,
    pub prefactor_sign: i8,
}

impl ThomaeForm {
    /// A bare ₃F₂ with unit prefactor.
    pub fn new(top: [f64; 3], bottom: [f64; 2]) -> Self {
        Self {
            params: HypParams::new(top, bottom),
            prefactor_log: 0.0,
            prefactor_sign: 1,
        }
    }

    pub fn prefactor(&self) -> f64 {
        f64::from(self.prefactor_sign) * self.prefactor_log.exp()
    }

    pub fn margin(&self) -> f64 {
        self.params.margin()
    }

    pub fn value(&self, cfg: &EvalConfig) -> Result<Estimate> {
        let e = pfq_at_1(&self.params, cfg)?;
        let p = self.prefactor();
        Ok(Estimate {
            value: p * e.value,
            error: p.abs() * e.error,
            terms: e.terms,
        })
    }

    fn unpack(&self) -> Result<([f64; 3], [f64; 2])> {
        match (self.params.top.as_slice(), self.params.bottom.as_slice()) {
            (&[a, b, c], &[e, f]) => Ok(([a, b, c], [e, f])),
            _ => Err(Error::PatternMismatch("expected a ₃F₂ form".into())),
        }
    }

    /// The same form scaled by ∏Γ(num)/∏Γ(den)·extra.
    fn rescaled(
        &self,
        top: [f64; 3],
        bottom: [f64; 2],
        num: &[f64],
        den: &[f64],
        extra: f64,
    ) -> Result<Self> {
        let (l, s) = log_gamma_product(num, den)?.ok_or_else(|| pole_in(den))?;
        if extra == 0.0 || !extra.is_finite() {
            return Err(Error::Degenerate(format!("scalar factor {extra}")));
        }
        let sign = s * extra.signum() * f64::from(self.prefactor_sign);
        Ok(Self {
            params: HypParams::new(top, bottom),
            prefactor_log: self.prefactor_log + l + extra.abs().ln(),
            prefactor_sign: if sign < 0.0 { -1 } else { 1 },
        })
    }
}

fn pole_in(den: &[f64]) -> Error {
    let p = den
        .iter()
        .copied()
        .find(|x| *x <= 0.0 && x.fract() == 0.0)
        .unwrap_or(f64::NAN);
    Error::Pole(p)
}

fn require_convergent(form: &ThomaeForm) -> Result<()> {
    let s = form.margin();
    if s > 0.0 {
        Ok(())
    } else {
        Err(Error::Divergent { margin: s })
    }
}

/// ₃F₂(a,b,c;e,f) = Γ(f)Γ(s)/(Γ(f−a)Γ(s+a)) · ₃F₂(a, e−c, e−b; s+a, e), s = e+f−a−b−c.
pub fn thomae_keep_first(form: &ThomaeForm) -> Result<ThomaeForm> {
    require_convergent(form)?;
    let ([a, b, c], [e, f]) = form.unpack()?;
    let s = form.margin();
    form.rescaled([a, e - c, e - b], [s + a, e], &[f, s], &[f - a, s + a], 1.0)
}

/// ₃F₂(a,b,c;e,f) = Γ(e)Γ(f)Γ(s)/(Γ(a)Γ(s+b)Γ(s+c)) · ₃F₂(s, f−a, e−a; s+c, s+b).
pub fn thomae_margin_up(form: &ThomaeForm) -> Result<ThomaeForm> {
    require_convergent(form)?;
    let ([a, b, c], [e, f]) = form.unpack()?;
    let s = form.margin();
    form.rescaled(
        [s, f - a, e - a],
        [s + c, s + b],
        &[e, f, s],
        &[a, s + c, s + b],
        1.0,
    )
}

/// Γ-term plus a scaled ₃F₂.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitForm {
    pub additive_term: f64,
    pub scaled_form: ThomaeForm,
}

impl SplitForm {
    pub fn value(&self, cfg: &EvalConfig) -> Result<Estimate> {
        let e = self.scaled_form.value(cfg)?;
        Ok(Estimate {
            value: self.additive_term + e.value,
            ..e
        })
    }
}

const MATCH_TOL: f64 = 1e-12;

/// Split for forms ₃F₂(a,b,c; a+1, f) (either bottom slot may hold a+1):
///
/// Γ(1−c)Γ(f)Γ(a+1)Γ(b−a)/(Γ(b)Γ(f−a)Γ(a−c+1))
/// − a/(b−a)·Γ(1−c)Γ(f)/(Γ(b−c+1)Γ(f−b)) · ₃F₂(b, b−f+1, b−a; b−a+1, b−c+1).
pub fn thomae_two_term(form: &ThomaeForm) -> Result<SplitForm> {
    require_convergent(form)?;
    let ([a, b, c], [e0, f0]) = form.unpack()?;
    let f = if (e0 - (a + 1.0)).abs() <= MATCH_TOL {
        f0
    } else if (f0 - (a + 1.0)).abs() <= MATCH_TOL {
        e0
    } else {
        return Err(Error::PatternMismatch(format!(
            "no bottom parameter equals a+1 = {}",
            a + 1.0
        )));
    };
    if b == a {
        return Err(Error::Degenerate("split divides by b − a".into()));
    }
    let (l, s) = log_gamma_product(&[1.0 - c, f, a + 1.0, b - a], &[b, f - a, a - c + 1.0])?
        .map_or((f64::NEG_INFINITY, 1.0), |v| v);
    let additive_term = form.prefactor() * s * l.exp();
    let top = [b, b - f + 1.0, b - a];
    let bottom = [b - a + 1.0, b - c + 1.0];
    let scaled_form = if log_gamma_product(&[1.0 - c, f], &[b - c + 1.0, f - b])?.is_none() {
        // 1/Γ(f−b) or 1/Γ(b−c+1) vanishes: only the Γ-term survives
        ThomaeForm {
            params: HypParams::new(top, bottom),
            prefactor_log: f64::NEG_INFINITY,
            prefactor_sign: 1,
        }
    } else {
        form.rescaled(
            top,
            bottom,
            &[1.0 - c, f],
            &[b - c + 1.0, f - b],
            -a / (b - a),
        )?
    };
    Ok(SplitForm {
        additive_term,
        scaled_form,
    })
}

/// (1/Γ(−M))·ₚ₊₁Fₚ(a; −M, b; x) through the shifted series
/// x^{M+1}∏(a)_{M+1}/((M+1)!∏(b)_{M+1}) · F(a+M+1; M+2, b+M+1; x).
///
/// `params.bottom` lists the bottom parameters other than −M.
pub fn shift_negative_bottom(params: &HypParams, m: u32, x: f64, cfg: &EvalConfig) -> Result<f64> {
    if params.top.len() != params.bottom.len() + 2 {
        return Err(Error::PatternMismatch(format!(
            "expected p+1 top and p−1 bottom parameters besides −M, got {} and {}",
            params.top.len(),
            params.bottom.len()
        )));
    }
    let k = m + 1;
    let kf = f64::from(k);
    let mut scale = x.powi(k as i32) * rgamma(kf + 1.0);
    for &a in &params.top {
        scale *= pochhammer(a, k);
    }
    for &b in &params.bottom {
        let p = pochhammer(b, k);
        if p == 0.0 {
            return Err(Error::Pole(b));
        }
        scale /= p;
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    let top: Vec<f64> = params.top.iter().map(|a| a + kf).collect();
    let mut bottom = vec![kf + 1.0];
    bottom.extend(params.bottom.iter().map(|b| b + kf));
    let shifted = HypParams::new(top, bottom);
    shifted.validate()?;
    Ok(scale * hyp_pfq(&shifted, x, cfg)?)
}

/// Two weighted ₃F₂(1) pieces whose sum is a ₄F₃(1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F43Split {
    pub pieces: [(f64, HypParams); 2],
}

impl F43Split {
    pub fn value(&self, cfg: &EvalConfig) -> Result<Estimate> {
        let mut value = 0.0;
        let mut error = 0.0;
        let mut terms = 0;
        for (w, p) in &self.pieces {
            let e = pfq_at_1(p, cfg)?;
            value += w * e.value;
            error += w.abs() * e.error;
            terms += e.terms;
        }
        Ok(Estimate {
            value,
            error,
            terms,
        })
    }
}

/// ₄F₃(a,b,c,d; a+1,b+1,e) = b(a−e)/(e(a−b))·₃F₂(a,c,d; a+1,e+1)
///                        − a(b−e)/(e(a−b))·₃F₂(b,c,d; b+1,e+1).
///
/// The shifted pair may sit anywhere among the parameters.
pub fn f43_split_contiguous(params: &HypParams) -> Result<F43Split> {
    if params.top.len() != 4 || params.bottom.len() != 3 {
        return Err(Error::PatternMismatch("expected a ₄F₃".into()));
    }
    let t = &params.top;
    let bt = &params.bottom;
    let close = |x: f64, y: f64| (x - y).abs() <= MATCH_TOL;
    for i in 0..4 {
        for j in i + 1..4 {
            for p in 0..3 {
                for q in 0..3 {
                    if p == q || !close(bt[p], t[i] + 1.0) || !close(bt[q], t[j] + 1.0) {
                        continue;
                    }
                    let (a, b) = (t[i], t[j]);
                    if a == b {
                        return Err(Error::Degenerate("contiguous split needs a ≠ b".into()));
                    }
                    let e = bt[3 - p - q];
                    let rest: Vec<f64> =
                        (0..4).filter(|&k| k != i && k != j).map(|k| t[k]).collect();
                    let (c, d) = (rest[0], rest[1]);
                    let den = e * (a - b);
                    return Ok(F43Split {
                        pieces: [
                            (
                                b * (a - e) / den,
                                HypParams::new([a, c, d], [a + 1.0, e + 1.0]),
                            ),
                            (
                                -a * (b - e) / den,
                                HypParams::new([b, c, d], [b + 1.0, e + 1.0]),
                            ),
                        ],
                    });
                }
            }
        }
    }
    Err(Error::PatternMismatch(
        "no top pair (a, b) with a+1 and b+1 among the bottom parameters".into(),
    ))
}

/// Alternative decomposition of ₄F₃(2d−1, 2−2d, 1, d; 2d, 3−2d, 2−d; 1):
/// (1−2d)/(3−4d)·₃F₂(2−2d,1,d; 3−2d,2−d) + 2(1−d)/(3−4d)·₃F₂(2d−1,1,d; 2d,2−d).
pub fn f43_split_alternative(d: f64) -> Result<F43Split> {
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::Domain(format!("split needs 0 < d < 0.5, got {d}")));
    }
    let den = 3.0 - 4.0 * d;
    Ok(F43Split {
        pieces: [
            (
                (1.0 - 2.0 * d) / den,
                HypParams::new([2.0 - 2.0 * d, 1.0, d], [3.0 - 2.0 * d, 2.0 - d]),
            ),
            (
                2.0 * (1.0 - d) / den,
                HypParams::new([2.0 * d - 1.0, 1.0, d], [2.0 * d, 2.0 - d]),
            ),
        ],
    })
}

fn canonical(p: &HypParams) -> (Vec<f64>, Vec<f64>) {
    let mut t = p.top.clone();
    let mut b = p.bottom.clone();
    t.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    (t, b)
}

fn same_params(x: &(Vec<f64>, Vec<f64>), y: &(Vec<f64>, Vec<f64>)) -> bool {
    let near = |u: &[f64], v: &[f64]| u.iter().zip(v).all(|(a, b)| (a - b).abs() <= MATCH_TOL);
    near(&x.0, &y.0) && near(&x.1, &y.1)
}

const TOP_PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Searches the Thomae orbit (breadth-first over both maps and all parameter
/// orderings, at most 200 distinct forms) for the representative with the
/// largest convergence margin. Returns the input unless something is strictly better.
pub fn best_convergence_form(form: &ThomaeForm) -> ThomaeForm {
    const CAP: usize = 200;
    if form.unpack().is_err() || form.margin() <= 0.0 {
        return form.clone();
    }
    let mut seen = vec![canonical(&form.params)];
    let mut queue = VecDeque::from([form.clone()]);
    let mut best = form.clone();
    while let Some(cur) = queue.pop_front() {
        let Ok(([a, b, c], [e, f])) = cur.unpack() else {
            continue;
        };
        let tops = [a, b, c];
        for perm in TOP_PERMS {
            for bottom in [[e, f], [f, e]] {
                let permuted = ThomaeForm {
                    params: HypParams::new([tops[perm[0]], tops[perm[1]], tops[perm[2]]], bottom),
                    ..cur.clone()
                };
                for next in [thomae_keep_first(&permuted), thomae_margin_up(&permuted)]
                    .into_iter()
                    .flatten()
                {
                    if !(next.margin() > 0.0) || !next.prefactor_log.is_finite() {
                        continue;
                    }
                    let key = canonical(&next.params);
                    if seen.iter().any(|k| same_params(k, &key)) {
                        continue;
                    }
                    if seen.len() >= CAP {
                        return best;
                    }
                    seen.push(key);
                    if next.margin() > best.margin() + MATCH_TOL {
                        best = next.clone();
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    best
}
