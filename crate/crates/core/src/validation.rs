//! Closed form versus Monte Carlo at randomized operating points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::{avg_rate, p0_outage, p1_outage, psi_inv, solve_optimal};
use crate::error::Result;
use crate::monte_carlo::{
    cdf_exp_difference, estimate_avg_rate, estimate_exp_difference_cdf, estimate_outages,
    MonteCarloEstimate,
};
use crate::params::SystemParams;

/// Acceptance band in standard errors.
pub const SIGMA_BAND: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    P0Outage,
    P1Outage,
    ExpDifferenceCdf,
    AvgRate,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::P0Outage => "p0_outage",
            Quantity::P1Outage => "p1_outage",
            Quantity::ExpDifferenceCdf => "exp_difference_cdf",
            Quantity::AvgRate => "avg_rate",
        }
    }
}

/// Where a check was evaluated. `point = None` marks the solved optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub point: Option<usize>,
    pub r: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub quantity: Quantity,
    pub at: OperatingPoint,
    pub closed_form: f64,
    pub mc_mean: f64,
    pub std_error: f64,
    pub band: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub n_samples: u64,
    pub seed: u64,
    pub rows: Vec<CheckRow>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub points: usize,
    /// Relative error injected into every closed-form value. Zero in normal
    /// use; tests set it to prove the suite can fail.
    pub perturbation: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            seed: 42,
            points: 20,
            perturbation: 0.0,
        }
    }
}

/// Operating points: `q` log-uniform over `[1e-2, q_max]`, `r` uniform over
/// `[0.5, 1.5] * psi_inv(q)`.
pub fn operating_points(params: &SystemParams<f64>, count: usize, seed: u64) -> Result<Vec<OperatingPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Sample streams use ids 0.. by chunk; keep point selection well apart.
    rng.set_stream(u64::MAX);
    let (lo, hi) = (1e-2_f64.ln(), params.q_max().ln());
    (0..count)
        .map(|i| {
            let q = (lo + (hi - lo) * rng.gen::<f64>()).exp();
            let r = psi_inv(params, q)? * rng.gen_range(0.5..1.5);
            Ok(OperatingPoint { point: Some(i), r, q })
        })
        .collect()
}

fn seed_for(base: u64, point: usize, quantity: Quantity) -> u64 {
    base.wrapping_add(1_000 * point as u64 + quantity as u64 + 1)
}

pub fn run_validation(params: &SystemParams<f64>, cfg: &ValidationConfig) -> Result<ValidationReport> {
    let mut rows = Vec::new();
    let bias = 1.0 + cfg.perturbation;
    let n = cfg.n_samples;

    let mut push = |quantity, at, cf: f64, scale: f64, est: MonteCarloEstimate<f64>| {
        let cf = cf * bias;
        let band = est.band(cf, scale, SIGMA_BAND);
        rows.push(CheckRow {
            quantity,
            at,
            closed_form: cf,
            mc_mean: est.mean,
            std_error: est.std_error,
            band,
            pass: (est.mean - cf).abs() <= band,
        });
    };

    for at in operating_points(params, cfg.points, cfg.seed)? {
        let i = at.point.unwrap_or(usize::MAX);
        let (p0, p1) = estimate_outages(params, at.r, at.q, n, seed_for(cfg.seed, i, Quantity::P0Outage))?;
        push(Quantity::P0Outage, at, p0_outage(params, at.r, at.q)?.get(), 1.0, p0);
        push(Quantity::P1Outage, at, p1_outage(params, at.r).get(), 1.0, p1);

        // P(g0 P - g2 x Q < s0^2 x) is the exp-difference CDF at z = s0^2 x.
        let x = (at.r * std::f64::consts::LN_2).exp_m1();
        let tl1 = params.lambda0() / params.p_tx();
        let tl2 = params.lambda2() / (x * at.q);
        let z = params.sigma0_sq() * x;
        let est = estimate_exp_difference_cdf(tl1, tl2, z, n, seed_for(cfg.seed, i, Quantity::ExpDifferenceCdf))?;
        push(Quantity::ExpDifferenceCdf, at, cdf_exp_difference(tl1, tl2, z)?.get(), 1.0, est);

        let est = estimate_avg_rate(params, at.r, at.q, n, seed_for(cfg.seed, i, Quantity::AvgRate))?;
        push(Quantity::AvgRate, at, avg_rate(params, at.r), at.r, est);
    }

    let s = solve_optimal(params);
    let at = OperatingPoint {
        point: None,
        r: s.r_opt.get(),
        q: s.q_opt.get(),
    };
    let (p0, _) = estimate_outages(params, at.r, at.q, n, seed_for(cfg.seed, cfg.points, Quantity::P0Outage))?;
    push(Quantity::P0Outage, at, p0_outage(params, at.r, at.q)?.get(), 1.0, p0);
    let est = estimate_avg_rate(params, at.r, at.q, n, seed_for(cfg.seed, cfg.points, Quantity::AvgRate))?;
    push(Quantity::AvgRate, at, s.avg_rate_opt.get(), at.r, est);

    Ok(ValidationReport {
        n_samples: n,
        seed: cfg.seed,
        rows,
    })
}
