//! Ground truth by brute force: Monte-Carlo over the unit cube and the ordered
//! simplex, plus nested quadrature for c₃.
//!
//! Random numbers come from ChaCha8 (`rand_chacha::ChaCha8Rng`). Samples are
//! split into chunks of [`CHUNK`]; chunk `i` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(i)`. Each uniform is
//! `((next_u64() >> 11) + 0.5)·2⁻⁵³`, which lies strictly inside (0, 1). Chunk
//! statistics are merged in chunk order, so the estimate does not depend on the
//! number of worker threads.

use std::cell::Cell;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cumulants::{c3_closed, c4_region, c5_region_estimate, check_d, C5Reading};
use crate::quad::tanh_sinh;
use crate::specfun::EvalConfig;
use crate::{Error, Result};

/// Samples per independently seeded chunk.
pub const CHUNK: u64 = 1 << 16;
/// Smallest sample count accepted by the estimators.
pub const MIN_SAMPLES: u64 = 10_000;
/// Above this d the per-sample variance grows without bound as d → ½.
pub const VARIANCE_WARNING_D: f64 = 0.45;

/// One ordered-simplex integral ∫_{1>y₁>⋯>y_k>0} ∏ (y_i − y_j)^{−d}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    /// Label such as `c5(3)`.
    pub name: String,
    /// Index within its order (1-based; the c₃ entry is 1).
    pub index: u32,
    pub k: u32,
    /// 1-based pairs (i, j) with i < j.
    pub factor_pairs: Vec<(u8, u8)>,
    /// How many of the k! orderings of the cube reduce to this integral.
    pub multiplicity: u32,
}

impl RegionSpec {
    fn new(k: u32, index: u32, pairs: &[(u8, u8)], multiplicity: u32) -> Self {
        debug_assert!(pairs.len() == k as usize && pairs.iter().all(|&(i, j)| i < j));
        Self {
            name: format!("c{k}({index})"),
            index,
            k,
            factor_pairs: pairs.to_vec(),
            multiplicity,
        }
    }

    /// The closed-form value of this region (c₃/6 for the c₃ entry).
    pub fn closed_value(&self, d: f64, reading: C5Reading, cfg: &EvalConfig) -> Result<f64> {
        match self.k {
            3 => Ok(c3_closed(d)? / 6.0),
            4 => c4_region(self.index, d, cfg),
            5 => Ok(c5_region_estimate(self.index, d, reading, cfg)?.value),
            k => Err(Error::Unsupported(format!(
                "no closed form for order {k} regions"
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = (2..=8).contains(&self.k)
            && self.factor_pairs.len() == self.k as usize
            && self
                .factor_pairs
                .iter()
                .all(|&(i, j)| i >= 1 && i < j && u32::from(j) <= self.k);
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("malformed region {}", self.name)))
        }
    }
}

/// The 16 distinct region integrals: c₃ (×6), c₄(1..3) (×8), c₅(1..12) (×10).
pub fn region_catalog() -> Vec<RegionSpec> {
    const C4: [[(u8, u8); 4]; 3] = [
        [(1, 2), (2, 3), (3, 4), (1, 4)],
        [(1, 2), (1, 3), (2, 4), (3, 4)],
        [(1, 3), (2, 3), (1, 4), (2, 4)],
    ];
    // c₅(10) follows the pattern of its neighbours: every exponent is −d.
    const C5: [[(u8, u8); 5]; 12] = [
        [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)],
        [(1, 2), (2, 3), (1, 4), (4, 5), (3, 5)],
        [(1, 2), (1, 3), (2, 4), (3, 5), (4, 5)],
        [(1, 2), (2, 4), (3, 4), (3, 5), (1, 5)],
        [(1, 2), (3, 4), (1, 4), (2, 5), (3, 5)],
        [(1, 3), (3, 4), (2, 4), (2, 5), (1, 5)],
        [(1, 3), (2, 4), (1, 4), (2, 5), (3, 5)],
        [(2, 3), (3, 4), (1, 4), (1, 5), (2, 5)],
        [(1, 2), (1, 3), (3, 4), (2, 5), (4, 5)],
        [(1, 3), (2, 3), (1, 4), (2, 5), (4, 5)],
        [(2, 3), (1, 4), (2, 4), (1, 5), (3, 5)],
        [(1, 3), (2, 3), (2, 4), (1, 5), (4, 5)],
    ];
    let mut out = vec![RegionSpec::new(3, 1, &[(1, 2), (2, 3), (1, 3)], 6)];
    out.extend(C4.iter().zip(1..).map(|(p, i)| RegionSpec::new(4, i, p, 8)));
    out.extend(
        C5.iter()
            .zip(1..)
            .map(|(p, i)| RegionSpec::new(5, i, p, 10)),
    );
    out
}

/// Look up a catalog entry by order and index.
pub fn region(k: u32, index: u32) -> Result<RegionSpec> {
    region_catalog()
        .into_iter()
        .find(|r| r.k == k && r.index == index)
        .ok_or_else(|| Error::Domain(format!("no region c{k}({index})")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// Set when d is close enough to ½ that the standard error is unreliable.
    pub warning: Option<String>,
}

impl MCEstimate {
    /// |mean − reference| in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        let dev = (self.mean - reference).abs();
        if self.std_error > 0.0 {
            dev / self.std_error
        } else if dev == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, reference: f64, sigmas: f64) -> bool {
        self.z_score(reference) <= sigmas
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, o: Welford) -> Welford {
        if o.n == 0 {
            return self;
        }
        if self.n == 0 {
            return o;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, o.n as f64, n as f64);
        Welford {
            n,
            mean: self.mean + delta * nb / nf,
            m2: self.m2 + o.m2 + delta * delta * na * nb / nf,
        }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        (self.m2.max(0.0) / (n - 1.0) / n).sqrt()
    }
}

#[inline]
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn check_run(d: f64, n: u64) -> Result<Option<String>> {
    check_d(d)?;
    if d >= 0.5 {
        return Err(Error::Domain(format!("d = {d}: the oracle needs d < 1/2")));
    }
    if n < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "{n} samples; at least {MIN_SAMPLES} are required"
        )));
    }
    Ok((d >= VARIANCE_WARNING_D).then(|| {
        format!("d = {d} ≥ {VARIANCE_WARNING_D}: variance explodes near 1/2, standard error is unreliable")
    }))
}

/// Chunked, deterministic driver. `sample` fills one integrand value per call.
fn run<F>(k: usize, d: f64, n: u64, seed: u64, sample: F) -> Result<MCEstimate>
where
    F: Fn(&mut [f64]) -> f64 + Sync,
{
    let warning = check_run(d, n)?;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Welford> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(n - c * CHUNK);
            let mut x = [0.0f64; 8];
            let mut acc = Welford::default();
            for _ in 0..len {
                for xi in x[..k].iter_mut() {
                    *xi = uniform(&mut rng);
                }
                let prod = sample(&mut x[..k]);
                acc.push(if d == 0.0 { 1.0 } else { prod.powf(-d) });
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(Welford::default(), Welford::merge);
    Ok(MCEstimate {
        mean: total.mean,
        std_error: total.std_error(),
        n_samples: n,
        seed,
        warning,
    })
}

/// Plain Monte-Carlo for c_k = ∫_{[0,1]^k} |x₁−x₂|^{−d}⋯|x_k−x₁|^{−d}.
pub fn mc_ck(k: u32, d: f64, n: u64, seed: u64) -> Result<MCEstimate> {
    if !(2..=5).contains(&k) {
        return Err(Error::Unsupported(format!("c_{k}: orders 2..5 only")));
    }
    let k = k as usize;
    run(k, d, n, seed, |x| {
        let mut p = (x[k - 1] - x[0]).abs();
        for i in 1..k {
            p *= (x[i - 1] - x[i]).abs();
        }
        p
    })
}

/// Monte-Carlo for one ordered-simplex region: the integrand is averaged over
/// sorted uniforms and divided by k!.
pub fn mc_region(spec: &RegionSpec, d: f64, n: u64, seed: u64) -> Result<MCEstimate> {
    spec.validate()?;
    let k = spec.k as usize;
    let pairs: Vec<(usize, usize)> = spec
        .factor_pairs
        .iter()
        .map(|&(i, j)| (usize::from(i) - 1, usize::from(j) - 1))
        .collect();
    let mut est = run(k, d, n, seed, |x| {
        x.sort_unstable_by(|a, b| b.total_cmp(a));
        pairs.iter().map(|&(i, j)| x[i] - x[j]).product()
    })?;
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    est.mean /= fact;
    est.std_error /= fact;
    Ok(est)
}

/// c₃ by nested tanh-sinh quadrature.
///
/// With y₂ = s·y₁ and y₃ = t·y₂ the y₁ integral is elementary:
/// c₃ = 6/(3−3d) ∫₀¹∫₀¹ s^{1−d}(1−s)^{−d}(1−t)^{−d}(1−st)^{−d} dt ds,
/// and every singular factor sits on an edge where tanh-sinh supplies the
/// distance exactly; 1 − st is formed as (1−s) + s(1−t).
pub fn quad_c3(d: f64) -> Result<f64> {
    check_d(d)?;
    if d >= 0.5 {
        return Err(Error::Domain(format!("d = {d}: quadrature needs d < 1/2")));
    }
    if d == 0.0 {
        return Ok(1.0);
    }
    let failure: Cell<Option<Error>> = Cell::new(None);
    let outer = tanh_sinh(
        |s, _, one_minus_s| {
            let inner = tanh_sinh(
                |_, _, one_minus_t| {
                    let w = one_minus_s + s * one_minus_t;
                    (one_minus_t * w).powf(-d)
                },
                0.0,
                1.0,
                1e-14,
                1e-12,
            );
            match inner {
                Ok(e) => s.powf(1.0 - d) * one_minus_s.powf(-d) * e.value,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        },
        0.0,
        1.0,
        1e-12,
        1e-11,
    );
    if let Some(e) = failure.take() {
        return Err(Error::Quadrature(format!("inner integral at d = {d}: {e}")));
    }
    let outer = outer.map_err(|e| Error::Quadrature(format!("outer integral at d = {d}: {e}")))?;
    Ok(6.0 / (3.0 - 3.0 * d) * outer.value)
}

/// Monte-Carlo measurement deciding between the two readings of c₅(3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadingCheck {
    pub d: f64,
    pub estimate: MCEstimate,
    pub mixed_gamma: f64,
    pub squared_gamma: f64,
    pub mixed_gamma_z: f64,
    pub squared_gamma_z: f64,
}

impl ReadingCheck {
    /// The reading within `sigmas` standard errors, if exactly one is.
    pub fn verdict(&self, sigmas: f64) -> Option<C5Reading> {
        match (self.mixed_gamma_z <= sigmas, self.squared_gamma_z <= sigmas) {
            (true, false) => Some(C5Reading::MixedGamma),
            (false, true) => Some(C5Reading::SquaredGamma),
            _ => None,
        }
    }
}

pub fn check_c5_region3_reading(
    d: f64,
    n: u64,
    seed: u64,
    cfg: &EvalConfig,
) -> Result<ReadingCheck> {
    let spec = region(5, 3)?;
    let estimate = mc_region(&spec, d, n, seed)?;
    let mixed_gamma = spec.closed_value(d, C5Reading::MixedGamma, cfg)?;
    let squared_gamma = spec.closed_value(d, C5Reading::SquaredGamma, cfg)?;
    Ok(ReadingCheck {
        d,
        mixed_gamma_z: estimate.z_score(mixed_gamma),
        squared_gamma_z: estimate.z_score(squared_gamma),
        estimate,
        mixed_gamma,
        squared_gamma,
    })
}
