use super::series::{levin_u, richardson_sum, sum_until_small, Neumaier};
use super::{hyp_2f1_cfg, Estimate, EvalConfig, HypParams, TailPolicy};
use crate::{Error, Result};

/// Term generator t₀ = 1, t_{n+1} = t_n·x·∏(a+n)/((n+1)∏(b+n)).
struct Terms<'a> {
    p: &'a HypParams,
    x: f64,
    n: usize,
    t: f64,
}

impl<'a> Terms<'a> {
    fn new(p: &'a HypParams, x: f64) -> Self {
        Self { p, x, n: 0, t: 1.0 }
    }

    fn next_term(&mut self) -> f64 {
        let out = self.t;
        let nf = self.n as f64;
        let mut r = self.x / (nf + 1.0);
        for &a in &self.p.top {
            r *= a + nf;
        }
        for &b in &self.p.bottom {
            r /= b + nf;
        }
        self.t *= r;
        self.n += 1;
        out
    }
}

fn initial_terms(p: &HypParams) -> usize {
    let big = p
        .top
        .iter()
        .chain(&p.bottom)
        .fold(0f64, |m, v| m.max(v.abs()));
    16usize.max((4.0 * big).ceil() as usize)
}

/// Generalized hypergeometric series pFq(top; bottom; x) for |x| < 1, or x = 1
/// through [`pfq_at_1`]. Returns the plain value.
pub fn hyp_pfq(params: &HypParams, x: f64, cfg: &EvalConfig) -> Result<f64> {
    cfg.validate()?;
    params.validate()?;
    let p = params.reduced();
    if x == 1.0 {
        return Ok(pfq_at_1(&p, cfg)?.value);
    }
    if p.top.len() > p.bottom.len() + 1 {
        return Err(Error::Unsupported("pFq with p > q + 1".into()));
    }
    if p.top.len() == p.bottom.len() + 1 && x.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "series argument {x} outside the unit disc"
        )));
    }
    if x == 0.0 || p.top.contains(&0.0) {
        return Ok(1.0);
    }
    if p.top.len() == 2 && p.bottom.len() == 1 {
        return hyp_2f1_cfg(p.top[0], p.top[1], p.bottom[0], x, cfg);
    }
    if let Some(n) = p.terminating_order() {
        let mut it = Terms::new(&p, x);
        let mut acc = Neumaier::default();
        for _ in 0..=n {
            acc.add(it.next_term());
        }
        return Ok(acc.value());
    }
    let mut it = Terms::new(&p, x);
    Ok(sum_until_small(|_| Ok(it.next_term()), 0.1 * cfg.rel_tol, cfg.max_terms)?.value)
}

/// ₚFq(top; bottom; 1) with the tail policy of `cfg`. Requires margin s > 0.
pub fn pfq_at_1(params: &HypParams, cfg: &EvalConfig) -> Result<Estimate> {
    at_1(params, cfg, false)
}

/// Like [`pfq_at_1`] but also accepts a negative non-integer margin, returning
/// the analytic continuation: the constant term of the partial-sum expansion
/// S_N = S + N^{−s}(b₀ + b₁/N + …).
pub fn pfq_at_1_continued(params: &HypParams, cfg: &EvalConfig) -> Result<Estimate> {
    at_1(params, cfg, true)
}

fn at_1(params: &HypParams, cfg: &EvalConfig, continued: bool) -> Result<Estimate> {
    cfg.validate()?;
    params.validate()?;
    let p = params.reduced();
    if p.top.len() > p.bottom.len() + 1 {
        return Err(Error::Unsupported(
            "pFq with p > q + 1 at unit argument".into(),
        ));
    }
    if p.top.contains(&0.0) {
        return Ok(Estimate::exact(1.0, 1));
    }
    if let Some(n) = p.terminating_order() {
        let mut it = Terms::new(&p, 1.0);
        let mut acc = Neumaier::default();
        for _ in 0..=n {
            acc.add(it.next_term());
        }
        return Ok(Estimate::exact(acc.value(), n as usize + 1));
    }
    if p.top.len() < p.bottom.len() + 1 {
        // Entire series: ordinary summation converges factorially.
        let mut it = Terms::new(&p, 1.0);
        return sum_until_small(|_| Ok(it.next_term()), 0.1 * cfg.rel_tol, cfg.max_terms);
    }
    let s = p.margin();
    let integer_s = s.fract() == 0.0;
    if s <= 0.0 && (!continued || integer_s) {
        return Err(Error::Divergent { margin: s });
    }
    let n0 = initial_terms(&p);
    match cfg.tail_policy {
        TailPolicy::PowerLawTailEstimate => {
            let mut it = Terms::new(&p, 1.0);
            richardson_sum(|_| Ok(it.next_term()), s, n0, cfg.rel_tol, cfg.max_terms)
        }
        TailPolicy::SequenceAcceleration if s > 0.0 => levin(&p, cfg),
        TailPolicy::None if s > 0.0 => {
            let mut it = Terms::new(&p, 1.0);
            sum_until_small(|_| Ok(it.next_term()), 0.1 * cfg.rel_tol, cfg.max_terms)
        }
        _ => Err(Error::Unsupported(
            "continuation needs the power-law tail policy".into(),
        )),
    }
}

fn levin(p: &HypParams, cfg: &EvalConfig) -> Result<Estimate> {
    const K: usize = 40;
    let mut it = Terms::new(p, 1.0);
    let terms: Vec<f64> = (0..=K).map(|_| it.next_term()).collect();
    let vals: Vec<Option<f64>> = (0..=K).map(|k| levin_u(&terms, k)).collect();
    let mut best: Option<Estimate> = None;
    for k in 4..=K.min(cfg.max_terms.saturating_sub(1)) {
        if let (Some(v), Some(w)) = (vals[k], vals[k - 1]) {
            let err = (v - w).abs();
            if v.is_finite() && best.is_none_or(|b| err < b.error) {
                best = Some(Estimate {
                    value: v,
                    error: err,
                    terms: k + 1,
                });
            }
        }
    }
    match best {
        Some(e) if e.error <= cfg.rel_tol * e.value.abs() => Ok(e),
        Some(e) => Err(Error::NonConvergence {
            value: e.value,
            error: e.error,
            terms: e.terms,
        }),
        None => Err(Error::NonConvergence {
            value: f64::NAN,
            error: f64::INFINITY,
            terms: 0,
        }),
    }
}
