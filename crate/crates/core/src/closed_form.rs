//! Analytical outage probabilities, the jamming-power/rate trade-off curve
//! and the optimal operating point.
//!
//! Notation used throughout: `x = 2^R - 1` is the SINR threshold for rate
//! `R`; `L = -ln(1 - delta)`.

use crate::error::{Error, Result};
use crate::lambert::{lambert_w0, lambert_w0_of_exp};
use crate::params::{PowerLinear, Probability, RateBpsHz, SystemParams};
use crate::scalar::Scalar;

/// Slack allowed when [`psi`] is asked for a rate at the zero-jamming edge.
pub const PSI_DOMAIN_SLACK: f64 = 1e-12;

/// Which constraint of the power budget is active at the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// The eavesdropping channel is strong enough on its own; `Q_opt = 0`.
    NoJamming,
    /// `0 < Q_opt < Q_max`.
    Interior,
    /// The budget binds; `Q_opt = Q_max`.
    PowerLimited,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::NoJamming => "NoJamming",
            Regime::Interior => "Interior",
            Regime::PowerLimited => "PowerLimited",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormSolution<T> {
    /// Unconstrained maximizer of the average eavesdropping rate.
    pub r_star: RateBpsHz<T>,
    pub r_opt: RateBpsHz<T>,
    pub q_opt: PowerLinear<T>,
    /// Rate the transmitter picks without jamming.
    pub r_zero_jam: RateBpsHz<T>,
    /// Rate the transmitter picks under full-budget jamming.
    pub r_max_jam: RateBpsHz<T>,
    pub avg_rate_opt: RateBpsHz<T>,
    pub regime: Regime,
}

/// SINR/SNR and achievable rates of one fading block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealizationRates<T> {
    pub r0: RateBpsHz<T>,
    pub r1: RateBpsHz<T>,
    pub sinr0: T,
    pub snr1: T,
}

#[inline]
fn log2_1p<T: Scalar>(x: T) -> T {
    x.ln_1p() / T::LN_2()
}

/// `2^r - 1` without cancellation near zero.
#[inline]
fn threshold<T: Scalar>(r: T) -> T {
    (r * T::LN_2()).exp_m1()
}

#[inline]
fn neg_ln_1m_delta<T: Scalar>(params: &SystemParams<T>) -> T {
    -(-params.delta()).ln_1p()
}

/// Rates at the suspicious receiver and the monitor for given power gains
/// and jamming power.
pub fn instantaneous_rates<T: Scalar>(
    params: &SystemParams<T>,
    g0: T,
    g1: T,
    g2: T,
    q: T,
) -> ChannelRealizationRates<T> {
    let p = params.p_tx();
    let sinr0 = g0 * p / (g2 * q + params.sigma0_sq());
    let snr1 = g1 * p / params.sigma1_sq();
    ChannelRealizationRates {
        r0: RateBpsHz(log2_1p(sinr0)),
        r1: RateBpsHz(log2_1p(snr1)),
        sinr0,
        snr1,
    }
}

/// Decoding outage at the suspicious receiver for rate `r` under jamming
/// power `q`. `q = 0` gives the interference-free limit.
pub fn p0_outage<T: Scalar>(params: &SystemParams<T>, r: T, q: T) -> Result<Probability<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::Domain {
            op: "p0_outage",
            value: r.as_f64(),
            constraint: "finite rate > 0",
        });
    }
    if !(q >= T::zero()) || !q.is_finite() {
        return Err(Error::Domain {
            op: "p0_outage",
            value: q.as_f64(),
            constraint: "finite jamming power >= 0",
        });
    }
    let x = threshold(r);
    // 1 - exp(-l0 s0 x / P) / (1 + l0 x Q / (l2 P))
    let a0 = params.lambda0() * params.sigma0_sq() / params.p_tx();
    let k = params.lambda0() * x * q / (params.lambda2() * params.p_tx());
    let p = -(-(a0 * x) - k.ln_1p()).exp_m1();
    Ok(Probability(p.max(T::zero()).min(T::one())))
}

/// Eavesdropping outage: `P(r1 < r)`.
///
/// `r` must be nonnegative.
pub fn p1_outage<T: Scalar>(params: &SystemParams<T>, r: T) -> Probability<T> {
    let x = threshold(r.max(T::zero()));
    let k = params.lambda1() * params.sigma1_sq() / params.p_tx();
    Probability((-(-(k * x)).exp_m1()).min(T::one()))
}

/// Jamming power that pins the suspicious receiver's outage at `delta` when
/// the transmitter uses rate `r`. Strictly decreasing on `(0, psi_inv(0)]`.
pub fn psi<T: Scalar>(params: &SystemParams<T>, r: T) -> Result<T> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::Domain {
            op: "psi",
            value: r.as_f64(),
            constraint: "finite rate > 0",
        });
    }
    let r_zero = psi_inv(params, T::zero())?;
    if r > r_zero + T::lit(PSI_DOMAIN_SLACK) {
        return Err(Error::Domain {
            op: "psi",
            value: r.as_f64(),
            constraint: "rate <= psi_inv(0); larger rates need negative jamming",
        });
    }
    let x = threshold(r);
    let a0 = params.lambda0() * params.sigma0_sq() / params.p_tx();
    let scale = params.lambda2() * params.p_tx() / (params.lambda0() * x);
    // e^{-a0 x}/(1-delta) - 1 == expm1(L - a0 x)
    let q = scale * (neg_ln_1m_delta(params) - a0 * x).exp_m1();
    Ok(q.max(T::zero()))
}

/// Rate the transmitter settles on under jamming power `q`, the inverse of
/// [`psi`].
///
/// With `b = s0^2 l2 / q` the inverse reads
/// `x = P / (l0 s0^2) * (W(b e^b / (1 - delta)) - b)`. The bracket cancels
/// badly once `b` is large, so the excess `d = W(..) - b` is solved for
/// directly from `d + ln(1 + d/b) = L`, which is the same equation after
/// substituting `w = b + d` into `w + ln w = ln(b) + b + L`.
/// [`psi_inv_lambert`] evaluates the textbook form.
pub fn psi_inv<T: Scalar>(params: &SystemParams<T>, q: T) -> Result<T> {
    check_jamming("psi_inv", q)?;
    let big_l = neg_ln_1m_delta(params);
    let gain = params.p_tx() / (params.lambda0() * params.sigma0_sq());
    if q == T::zero() {
        return Ok(log2_1p(gain * big_l));
    }
    let b = params.sigma0_sq() * params.lambda2() / q;
    let d = solve_excess(b, big_l)?;
    Ok(log2_1p(gain * d))
}

/// [`psi_inv`] through the log-domain Lambert W, exactly as the closed form
/// is usually written. Loses accuracy for small `q`; kept as a second route.
pub fn psi_inv_lambert<T: Scalar>(params: &SystemParams<T>, q: T) -> Result<T> {
    check_jamming("psi_inv_lambert", q)?;
    let big_l = neg_ln_1m_delta(params);
    let gain = params.p_tx() / (params.lambda0() * params.sigma0_sq());
    if q == T::zero() {
        return Ok(log2_1p(gain * big_l));
    }
    let b = params.sigma0_sq() * params.lambda2() / q;
    let w = lambert_w0_of_exp(b.ln() + big_l + b)?;
    Ok(log2_1p(gain * (w - b).max(T::zero())))
}

fn check_jamming<T: Scalar>(op: &'static str, q: T) -> Result<()> {
    if q >= T::zero() && q.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            op,
            value: q.as_f64(),
            constraint: "finite jamming power >= 0",
        })
    }
}

/// Root of `h(d) = d + ln(1 + d/b) - L` on `(0, L)`.
///
/// `h` is increasing and concave, so Newton from the right end lands left of
/// the root once and then climbs monotonically.
fn solve_excess<T: Scalar>(b: T, big_l: T) -> Result<T> {
    const MAX_ITER: usize = 100;
    let tol = T::epsilon() * T::lit(2.0);
    let mut d = big_l;
    let mut step = T::infinity();
    for i in 0..MAX_ITER {
        let h = d + (d / b).ln_1p() - big_l;
        let hp = T::one() + (b + d).recip();
        let prev = step.abs();
        step = h / hp;
        let next = (d - step).max(T::zero()).min(big_l);
        // h carries an absolute error of about eps * L, so once the steps
        // stop shrinking they are rounding noise.
        if (next - d).abs() <= tol * next || (i > 2 && step.abs() >= prev) {
            return Ok(next);
        }
        d = next;
    }
    Err(Error::Convergence {
        op: "psi_inv",
        iterations: MAX_ITER,
        last_step: step.as_f64(),
    })
}

/// Average eavesdropping rate `r (1 - p1_outage(r))`.
pub fn avg_rate<T: Scalar>(params: &SystemParams<T>, r: T) -> T {
    if r <= T::zero() {
        return T::zero();
    }
    let k = params.lambda1() * params.sigma1_sq() / params.p_tx();
    let v = r * (-(k * threshold(r))).exp();
    if v.is_finite() {
        v
    } else {
        T::zero()
    }
}

/// Derivative of `phi(x) = log2(1 + x) exp(-k x)` with respect to the SINR
/// threshold `x = 2^r - 1`, where `k = l1 s1^2 / P`. Same sign as the slope
/// of [`avg_rate`] in `r`.
pub fn avg_rate_derivative<T: Scalar>(params: &SystemParams<T>, r: T) -> T {
    let k = params.lambda1() * params.sigma1_sq() / params.p_tx();
    let x = threshold(r);
    let one_x = T::one() + x;
    (-(k * x)).exp() * ((T::LN_2() * one_x).recip() - k * log2_1p(x))
}

/// Unconstrained maximizer of [`avg_rate`]: `W(P / (l1 s1^2)) / ln 2`.
pub fn r_star<T: Scalar>(params: &SystemParams<T>) -> T {
    let arg = params.p_tx() / (params.lambda1() * params.sigma1_sq());
    lambert_w0(arg).expect("validated params give a positive finite argument") / T::LN_2()
}

/// Optimal rate/jamming pair under `0 <= Q <= Q_max` and pinned outage.
pub fn solve_optimal<T: Scalar>(params: &SystemParams<T>) -> ClosedFormSolution<T> {
    let r_zero = psi_inv(params, T::zero()).expect("q = 0 is in domain");
    let r_max = psi_inv(params, params.q_max()).expect("q_max validated");
    let rs = r_star(params);
    let r_opt = rs.min(r_zero).max(r_max);

    let (regime, q_opt) = if rs >= r_zero {
        (Regime::NoJamming, T::zero())
    } else if rs <= r_max {
        (Regime::PowerLimited, params.q_max())
    } else {
        let q = psi(params, rs).expect("r_star below psi_inv(0)");
        (Regime::Interior, q.max(T::zero()).min(params.q_max()))
    };

    ClosedFormSolution {
        r_star: RateBpsHz(rs),
        r_opt: RateBpsHz(r_opt),
        q_opt: PowerLinear(q_opt),
        r_zero_jam: RateBpsHz(r_zero),
        r_max_jam: RateBpsHz(r_max),
        avg_rate_opt: RateBpsHz(avg_rate(params, r_opt)),
        regime,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamsBuilder;

    // Frozen from a 40-digit mpmath evaluation of the closed forms.
    const R_ZERO: f64 = 2.615_729_248_744_868_7;
    const R_STAR: f64 = 2.518_264_593_286_824;
    const Q_OPT: f64 = 0.848_409_549_066_523_9;
    const AVG_OPT: f64 = 1.569_375_005_283_464_3;
    const P1_AT_R_STAR: f64 = 0.376_802_973_973_785_1;

    fn defaults() -> SystemParams<f64> {
        SystemParams::canonical()
    }

    fn with(f: impl FnOnce(&mut ParamsBuilder<f64>)) -> SystemParams<f64> {
        let mut b = ParamsBuilder::canonical();
        f(&mut b);
        b.build().unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn rates_by_substitution() {
        let p = defaults();
        let c = instantaneous_rates(&p, 1.0, 1.0, 1.0, 0.0);
        assert_eq!(c.sinr0, 100.0);
        assert!((c.r0.get() - 101f64.log2()).abs() < 1e-14);
        assert!((c.r0.get() - 6.658).abs() < 1e-3);
        assert_eq!(instantaneous_rates(&p, 0.0, 1.0, 1.0, 5.0).r0.get(), 0.0);
        let c = instantaneous_rates(&p, 1.0, 1.0, 1.0, 99.0);
        assert_eq!(c.sinr0, 1.0);
        assert!((c.r0.get() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn p0_edges() {
        let p = defaults();
        assert!(p0_outage(&p, 1e-12, 10.0).unwrap().get() < 1e-12);
        let at_zero = p0_outage(&p, R_ZERO, 0.0).unwrap().get();
        assert!((at_zero - 0.05).abs() < 1e-12);
        assert!(p0_outage(&p, 0.0, 1.0).is_err());
        assert!(p0_outage(&p, -1.0, 1.0).is_err());
        assert!(p0_outage(&p, 1.0, -1.0).is_err());
        // mpmath: 0.057819870341254220...
        assert!((p0_outage(&p, 2.0, 10.0).unwrap().get() - 0.057_819_870_341_254_22).abs() < 1e-15);
    }

    #[test]
    fn p0_continuous_at_zero_jamming() {
        let p = defaults();
        for &r in &[0.1, 1.0, 2.0, R_ZERO, 4.0] {
            let a = p0_outage(&p, r, 1e-12).unwrap().get();
            let b = p0_outage(&p, r, 0.0).unwrap().get();
            assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn p1_values() {
        let p = defaults();
        assert_eq!(p1_outage(&p, 0.0).get(), 0.0);
        assert!(rel(p1_outage(&p, R_STAR).get(), P1_AT_R_STAR) < 1e-12);
        let direct = 1.0 - (-0.472_891_f64).exp();
        assert!((p1_outage(&p, 2.5183).get() - direct).abs() < 1e-4);
        let weak = with(|b| b.lambda1 = 1e12);
        assert!(p1_outage(&weak, 0.5).get() > 1.0 - 1e-12);
    }

    #[test]
    fn psi_landmarks() {
        let p = defaults();
        assert!(psi(&p, R_ZERO).unwrap().abs() < 1e-9);
        assert!(rel(psi(&p, R_STAR).unwrap(), Q_OPT) < 1e-9);
        // mpmath: psi(1.0) = 42.157719735966371966...
        let q1 = psi(&p, 1.0).unwrap();
        assert!(rel(q1, 42.157_719_735_966_37) < 1e-12);
        assert!((p0_outage(&p, 1.0, q1).unwrap().get() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn psi_domain() {
        let p = defaults();
        assert!(psi(&p, 0.0).is_err());
        assert!(psi(&p, R_ZERO + 1e-6).is_err());
        assert!(psi(&p, R_ZERO + 1e-13).is_ok());
    }

    #[test]
    fn psi_inv_landmarks() {
        let p = defaults();
        assert!(rel(psi_inv(&p, 0.0).unwrap(), R_ZERO) < 1e-14);
        assert!(rel(psi_inv(&p, Q_OPT).unwrap(), R_STAR) < 1e-12);
        // mpmath: 2.6037288239064732708, 0.073249175738677090400
        assert!(rel(psi_inv(&p, 0.1).unwrap(), 2.603_728_823_906_473) < 1e-13);
        assert!(rel(psi_inv(&p, 1000.0).unwrap(), 0.073_249_175_738_677_09) < 1e-12);
        assert!((psi_inv(&p, 1e-12).unwrap() - R_ZERO).abs() < 1e-6);
        assert!(psi_inv(&p, -1.0).is_err());
        assert!(psi_inv(&p, f64::NAN).is_err());
    }

    #[test]
    fn lambert_route_agrees_where_conditioned() {
        let p = defaults();
        for &q in &[0.5, 1.0, 10.0, 100.0, 1000.0, 1e5] {
            let a = psi_inv(&p, q).unwrap();
            let b = psi_inv_lambert(&p, q).unwrap();
            assert!(rel(a, b) < 1e-10, "q = {q}: {a} vs {b}");
        }
        // Small q: the textbook route loses digits, the excess route does not.
        let a = psi_inv(&p, 1e-9).unwrap();
        assert!((a - R_ZERO).abs() < 1e-8);
    }

    #[test]
    fn avg_rate_values() {
        let p = defaults();
        assert_eq!(avg_rate(&p, 0.0), 0.0);
        assert!(rel(avg_rate(&p, R_STAR), AVG_OPT) < 1e-12);
        assert!(rel(avg_rate(&p, R_STAR), R_STAR * (1.0 - P1_AT_R_STAR)) < 1e-12);
        assert!(avg_rate(&p, 50.0) < 1e-300);
        assert_eq!(avg_rate(&p, 2000.0), 0.0);
    }

    #[test]
    fn derivative_sign_and_root() {
        let p = defaults();
        assert!(avg_rate_derivative(&p, R_STAR).abs() < 1e-9);
        assert!(avg_rate_derivative(&p, R_STAR / 2.0) > 0.0);
        assert!(avg_rate_derivative(&p, R_STAR * 2.0) < 0.0);
    }

    #[test]
    fn r_star_landmarks() {
        assert!(rel(r_star(&defaults()), R_STAR) < 1e-14);
        let strong = with(|b| b.lambda1 = 0.5);
        assert!(rel(r_star(&strong), 5.669_421_125_871_206) < 1e-13);
        let e_case = with(|b| b.p_tx = 10.0 * std::f64::consts::E);
        assert!(rel(r_star(&e_case), 1.0 / std::f64::consts::LN_2) < 1e-14);
    }

    #[test]
    fn solve_regimes() {
        let s = solve_optimal(&defaults());
        assert_eq!(s.regime, Regime::Interior);
        assert!(rel(s.r_opt.get(), R_STAR) < 1e-12);
        assert!(rel(s.q_opt.get(), Q_OPT) < 1e-9);
        assert!(rel(s.avg_rate_opt.get(), AVG_OPT) < 1e-12);

        let s = solve_optimal(&with(|b| b.lambda1 = 0.5));
        assert_eq!(s.regime, Regime::NoJamming);
        assert_eq!(s.q_opt.get(), 0.0);
        assert!(rel(s.r_opt.get(), R_ZERO) < 1e-14);

        let p = with(|b| b.q_max = 0.1);
        let s = solve_optimal(&p);
        assert_eq!(s.regime, Regime::PowerLimited);
        assert_eq!(s.q_opt.get(), 0.1);
        assert_eq!(s.r_opt.get(), psi_inv(&p, 0.1).unwrap());
    }

    #[test]
    fn generic_over_f32() {
        let p = SystemParams::<f32>::canonical();
        let s = solve_optimal(&p);
        assert_eq!(s.regime, Regime::Interior);
        assert!((s.r_opt.get() - R_STAR as f32).abs() < 1e-4);
        assert!((s.q_opt.get() - Q_OPT as f32).abs() < 1e-2);
    }
}
