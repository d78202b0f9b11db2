//! Stochastic oracle for the closed forms.
//!
//! Samples are generated in fixed-size chunks. Chunk `i` draws from a
//! ChaCha8 stream seeded with `seed` and stream id `i`, so every estimate is
//! a deterministic function of `(params, n, seed)` no matter how many
//! threads evaluate the chunks. Exponentials use inverse-transform sampling,
//! `g = -ln(u) / lambda` with `u` uniform on `(0, 1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::closed_form::{avg_rate, psi_inv};
use crate::error::{Error, Result};
use crate::params::{PowerLinear, Probability, RateBpsHz, SystemParams};
use crate::scalar::Scalar;

/// Draws per RNG stream.
pub const CHUNK: u64 = 1 << 16;

/// Lower end of the log-spaced part of the brute-force jamming grid.
pub const GRID_LOG_FLOOR: f64 = 1e-6;

/// One fading block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw<T> {
    pub g0: T,
    pub g1: T,
    pub g2: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate<T> {
    pub mean: T,
    pub std_error: T,
    pub n_samples: u64,
    pub seed: u64,
}

impl<T: Scalar> MonteCarloEstimate<T> {
    fn from_count(hits: u64, n: u64, seed: u64) -> Self {
        let nf = T::lit(n as f64);
        let mean = T::lit(hits as f64) / nf;
        Self {
            mean,
            std_error: (mean * (T::one() - mean) / nf).sqrt(),
            n_samples: n,
            seed,
        }
    }

    fn scaled(self, by: T) -> Self {
        Self {
            mean: self.mean * by,
            std_error: self.std_error * by,
            ..self
        }
    }

    /// Whether `expected` lies within `k` standard errors of the estimate.
    ///
    /// The band uses the larger of the empirical standard error and the
    /// binomial error implied by `expected` (given as a probability, with
    /// `scale` mapping probabilities onto this estimate's units). This keeps
    /// the test meaningful when the sample happens to contain no hits.
    pub fn agrees_with(&self, expected: T, scale: T, k: T) -> bool {
        let band = self.band(expected, scale, k);
        (self.mean - expected).abs() <= band
    }

    pub fn band(&self, expected: T, scale: T, k: T) -> T {
        let n = T::lit(self.n_samples as f64);
        let p = if scale > T::zero() { expected / scale } else { T::zero() };
        let p = p.max(T::zero()).min(T::one());
        let implied = scale * (p * (T::one() - p) / n).sqrt();
        k * self.std_error.max(implied)
    }
}

#[inline]
fn exp_draw<T: Scalar>(rng: &mut ChaCha8Rng, rate: T) -> T {
    // gen::<f64>() is uniform on [0, 1); flip it onto (0, 1].
    let u: f64 = 1.0 - rng.gen::<f64>();
    -T::lit(u).ln() / rate
}

#[inline]
fn draw<T: Scalar>(rng: &mut ChaCha8Rng, params: &SystemParams<T>) -> ChannelDraw<T> {
    ChannelDraw {
        g0: exp_draw(rng, params.lambda0()),
        g1: exp_draw(rng, params.lambda1()),
        g2: exp_draw(rng, params.lambda2()),
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_len(n: u64, chunk: u64) -> u64 {
    CHUNK.min(n - chunk * CHUNK)
}

/// Counts how many of `n` chunked draws satisfy `hit`. Integer reduction,
/// so the parallel result equals the sequential one bit for bit.
fn count_hits<F>(n: u64, seed: u64, hit: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            (0..chunk_len(n, c)).filter(|_| hit(&mut rng)).count() as u64
        })
        .sum()
}

fn count_hits2<F>(n: u64, seed: u64, hit: F) -> (u64, u64)
where
    F: Fn(&mut ChaCha8Rng) -> (bool, bool) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut acc = (0u64, 0u64);
            for _ in 0..chunk_len(n, c) {
                let (a, b) = hit(&mut rng);
                acc.0 += a as u64;
                acc.1 += b as u64;
            }
            acc
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Sequential stream of `n` channel draws. The estimators below see exactly
/// this sequence.
pub struct GainSampler<T> {
    params: SystemParams<T>,
    seed: u64,
    n: u64,
    emitted: u64,
    rng: ChaCha8Rng,
}

impl<T: Scalar> Iterator for GainSampler<T> {
    type Item = ChannelDraw<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.emitted >= self.n {
            return None;
        }
        if self.emitted > 0 && self.emitted.is_multiple_of(CHUNK) {
            self.rng = chunk_rng(self.seed, self.emitted / CHUNK);
        }
        self.emitted += 1;
        Some(draw(&mut self.rng, &self.params))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.n - self.emitted) as usize;
        (left, Some(left))
    }
}

impl<T: Scalar> ExactSizeIterator for GainSampler<T> {}

pub fn sample_gains<T: Scalar>(params: &SystemParams<T>, n: u64, seed: u64) -> GainSampler<T> {
    GainSampler {
        params: *params,
        seed,
        n,
        emitted: 0,
        rng: chunk_rng(seed, 0),
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::Domain {
            op: "monte_carlo",
            value: 0.0,
            constraint: "sample count >= 1",
        })
    } else {
        Ok(())
    }
}

/// Empirical `P(r0 < r)` and `P(r1 < r)` over the same draws.
pub fn estimate_outages<T: Scalar>(
    params: &SystemParams<T>,
    r: T,
    q: T,
    n: u64,
    seed: u64,
) -> Result<(MonteCarloEstimate<T>, MonteCarloEstimate<T>)> {
    check_n(n)?;
    let r = RateBpsHz::new(r)?.get();
    let q = PowerLinear::new(q)?.get();
    // r_i < r  <=>  SINR_i < 2^r - 1; comparing SINRs skips two logarithms
    // per draw.
    let x = (r * T::LN_2()).exp_m1();
    let (p, s0, s1) = (params.p_tx(), params.sigma0_sq(), params.sigma1_sq());
    let (h0, h1) = count_hits2(n, seed, |rng| {
        let g = draw(rng, params);
        (g.g0 * p / (g.g2 * q + s0) < x, g.g1 * p / s1 < x)
    });
    Ok((
        MonteCarloEstimate::from_count(h0, n, seed),
        MonteCarloEstimate::from_count(h1, n, seed),
    ))
}

/// Empirical `r * P(r1 >= r)`.
pub fn estimate_avg_rate<T: Scalar>(
    params: &SystemParams<T>,
    r: T,
    q: T,
    n: u64,
    seed: u64,
) -> Result<MonteCarloEstimate<T>> {
    check_n(n)?;
    let r = RateBpsHz::new(r)?.get();
    let q = PowerLinear::new(q)?.get();
    if r == T::zero() {
        return Ok(MonteCarloEstimate {
            mean: T::zero(),
            std_error: T::zero(),
            n_samples: n,
            seed,
        });
    }
    let x = (r * T::LN_2()).exp_m1();
    let (p, s1) = (params.p_tx(), params.sigma1_sq());
    let _ = q; // the monitor's rate does not depend on jamming
    let hits = count_hits(n, seed, |rng| {
        let g = draw(rng, params);
        g.g1 * p / s1 >= x
    });
    Ok(MonteCarloEstimate::from_count(hits, n, seed).scaled(r))
}

/// `P(X1 - X2 < z)` for independent `X1 ~ Exp(tl1)`, `X2 ~ Exp(tl2)`, `z >= 0`.
pub fn cdf_exp_difference<T: Scalar>(tl1: T, tl2: T, z: T) -> Result<Probability<T>> {
    for (v, what) in [(tl1, "rate tl1 > 0"), (tl2, "rate tl2 > 0")] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::Domain {
                op: "cdf_exp_difference",
                value: v.as_f64(),
                constraint: what,
            });
        }
    }
    if !(z >= T::zero()) || z.is_nan() {
        return Err(Error::Domain {
            op: "cdf_exp_difference",
            value: z.as_f64(),
            constraint: "z >= 0",
        });
    }
    let p = T::one() - tl2 / (tl1 + tl2) * (-(tl1 * z)).exp();
    Ok(Probability(p.max(T::zero()).min(T::one())))
}

/// Empirical counterpart of [`cdf_exp_difference`].
pub fn estimate_exp_difference_cdf<T: Scalar>(
    tl1: T,
    tl2: T,
    z: T,
    n: u64,
    seed: u64,
) -> Result<MonteCarloEstimate<T>> {
    check_n(n)?;
    let hits = count_hits(n, seed, |rng| {
        let x1 = exp_draw(rng, tl1);
        let x2 = exp_draw(rng, tl2);
        x1 - x2 < z
    });
    Ok(MonteCarloEstimate::from_count(hits, n, seed))
}

/// Empirical mean of each gain, summed chunk by chunk in chunk order.
pub fn mean_gains<T: Scalar>(params: &SystemParams<T>, n: u64, seed: u64) -> Result<ChannelDraw<T>> {
    check_n(n)?;
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<ChannelDraw<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut s = ChannelDraw { g0: T::zero(), g1: T::zero(), g2: T::zero() };
            for _ in 0..chunk_len(n, c) {
                let g = draw(&mut rng, params);
                s.g0 = s.g0 + g.g0;
                s.g1 = s.g1 + g.g1;
                s.g2 = s.g2 + g.g2;
            }
            s
        })
        .collect();
    let nf = T::lit(n as f64);
    let total = partial.into_iter().fold(
        ChannelDraw { g0: T::zero(), g1: T::zero(), g2: T::zero() },
        |a, b| ChannelDraw { g0: a.g0 + b.g0, g1: a.g1 + b.g1, g2: a.g2 + b.g2 },
    );
    Ok(ChannelDraw { g0: total.g0 / nf, g1: total.g1 / nf, g2: total.g2 / nf })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptimum<T> {
    pub q_best: T,
    pub r_best: T,
    pub avg_best: T,
}

/// Jamming-power grid for the brute-force search: `n_grid` equal steps on
/// `[0, q_max]` merged with `n_grid` log steps on `[1e-6, q_max]`.
///
/// Points are computed from the fraction `i / n_grid`, so doubling `n_grid`
/// yields a superset of the previous grid.
pub fn jamming_grid<T: Scalar>(q_max: T, n_grid: usize) -> Vec<T> {
    let nf = T::lit(n_grid as f64);
    let lo = T::lit(GRID_LOG_FLOOR).min(q_max);
    let span = (q_max / lo).ln();
    let mut grid: Vec<T> = (0..=n_grid)
        .flat_map(|i| {
            let t = T::lit(i as f64) / nf;
            [q_max * t, (lo.ln() + span * t).exp().min(q_max)]
        })
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup();
    grid
}

/// Brute-force maximizer of `avg_rate(psi_inv(q))` over [`jamming_grid`].
/// Ties go to the smaller `q`.
pub fn grid_search_optimal<T: Scalar>(params: &SystemParams<T>, n_grid: usize) -> Result<GridOptimum<T>> {
    if n_grid < 100 {
        return Err(Error::InvalidGrid(format!("n_grid = {n_grid}, need >= 100")));
    }
    let grid = jamming_grid(params.q_max(), n_grid);
    let evals: Vec<(T, T, T)> = grid
        .par_iter()
        .map(|&q| {
            let r = psi_inv(params, q)?;
            Ok((q, r, avg_rate(params, r)))
        })
        .collect::<Result<_>>()?;
    let (q_best, r_best, avg_best) = evals
        .into_iter()
        .reduce(|best, cur| if cur.2 > best.2 { cur } else { best })
        .expect("grid is non-empty");
    Ok(GridOptimum { q_best, r_best, avg_best })
}
