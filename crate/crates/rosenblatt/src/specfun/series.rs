//! Summation helpers shared by every slowly converging sum in the crate.

use super::Estimate;
use crate::{Error, Result};

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const MAX_COLUMNS: usize = 8;

/// Limit of Σ term(n) whose partial sums behave like S + N^{−s}(b₀ + b₁/N + …).
///
/// Partial sums are taken at N₀·2^j and a Richardson table eliminates the
/// exponents s, s+1, …. Non-integer negative s is allowed: the result is then
/// the analytic continuation (the constant term of the expansion).
pub(crate) fn richardson_sum(
    mut term: impl FnMut(usize) -> Result<f64>,
    s: f64,
    n0: usize,
    rel_tol: f64,
    max_terms: usize,
) -> Result<Estimate> {
    let mut acc = Neumaier::default();
    let mut next = 0usize;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut n = n0.max(4);
    let mut best = Estimate {
        value: f64::NAN,
        error: f64::INFINITY,
        terms: 0,
    };
    loop {
        if n > max_terms {
            return Err(Error::NonConvergence {
                value: best.value,
                error: best.error,
                terms: next,
            });
        }
        while next < n {
            let t = term(next)?;
            if !t.is_finite() {
                return Err(Error::NonConvergence {
                    value: best.value,
                    error: best.error,
                    terms: next,
                });
            }
            acc.add(t);
            next += 1;
        }
        let mut row = vec![acc.value()];
        if let Some(prev) = rows.last() {
            for i in 0..prev.len().min(MAX_COLUMNS) {
                let f = 2f64.powf(s + i as f64) - 1.0;
                row.push(row[i] + (row[i] - prev[i]) / f);
            }
        }
        if let Some(prev) = rows.last() {
            let v = *row.last().unwrap();
            let err = (v - prev.last().unwrap()).abs();
            if rows.len() >= 2 {
                if err <= best.error {
                    best = Estimate {
                        value: v,
                        error: err,
                        terms: next,
                    };
                }
                if err <= rel_tol * v.abs() || (v == 0.0 && err == 0.0) {
                    return Ok(Estimate {
                        value: v,
                        error: err,
                        terms: next,
                    });
                }
            }
        }
        rows.push(row);
        n *= 2;
    }
}

/// Sums terms until three consecutive terms fall below rel_tol relative to the sum.
pub(crate) fn sum_until_small(
    mut term: impl FnMut(usize) -> Result<f64>,
    rel_tol: f64,
    max_terms: usize,
) -> Result<Estimate> {
    let mut acc = Neumaier::default();
    let mut quiet = 0;
    for n in 0..max_terms {
        let t = term(n)?;
        acc.add(t);
        if t.abs() <= rel_tol * acc.value().abs() || t == 0.0 {
            quiet += 1;
            if quiet >= 3 {
                return Ok(Estimate {
                    value: acc.value(),
                    error: t.abs(),
                    terms: n + 1,
                });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        value: acc.value(),
        error: f64::NAN,
        terms: max_terms,
    })
}

/// Levin u-transform (β = 1) of the series with the given terms, using the
/// first k+1 terms. Returns `None` when a term vanishes.
pub(crate) fn levin_u(terms: &[f64], k: usize) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut partial = 0.0;
    let mut binom = 1.0;
    let kk = k as f64;
    for (j, &a) in terms.iter().take(k + 1).enumerate() {
        partial += a;
        if a == 0.0 {
            return None;
        }
        let jf = j as f64;
        let w = (1.0 + jf) * a;
        let c = binom * ((1.0 + jf) / (1.0 + kk)).powi(k as i32 - 1);
        let c = if j % 2 == 1 { -c } else { c };
        num += c * partial / w;
        den += c / w;
        binom *= (kk - jf) / (jf + 1.0);
    }
    Some(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_recovers_zeta() {
        // Σ 1/(n+1)² = π²/6, s = 1
        let e = richardson_sum(
            |n| Ok(1.0 / ((n + 1) as f64).powi(2)),
            1.0,
            16,
            1e-12,
            1 << 20,
        )
        .unwrap();
        assert!((e.value - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn levin_on_alternating_log() {
        let t: Vec<f64> = (0..16)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } / (n + 1) as f64)
            .collect();
        assert!((levin_u(&t, 14).unwrap() - 2f64.ln()).abs() < 1e-12);
    }
}
