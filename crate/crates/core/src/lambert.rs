//! Principal branch of the Lambert W function on the nonnegative axis.
//!
//! `W(x)` solves `w * exp(w) = x`. Two entry points: [`lambert_w0`] takes
//! `x` directly, [`lambert_w0_of_exp`] takes `ln x` and stays accurate for
//! arguments far beyond the floating-point range of `exp`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_ITER: usize = 50;

/// `W0(x)` for finite `x >= 0`.
///
/// Halley iteration on `w e^w - x`; arguments above `e` are delegated to the
/// log-domain solver so the residual never overflows.
pub fn lambert_w0<T: Scalar>(x: T) -> Result<T> {
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(Error::Domain {
            op: "lambert_w0",
            value: x.as_f64(),
            constraint: "finite x >= 0",
        });
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x > T::E() {
        return lambert_w0_of_exp(x.ln());
    }
    halley_direct(x)
}

/// `W0(exp(ln_x))`, i.e. the root of `w + ln w = ln_x`.
///
/// Agrees with `lambert_w0(ln_x.exp())` wherever the exponential is
/// representable. When `exp(ln_x)` underflows to zero the result
/// underflows with it.
pub fn lambert_w0_of_exp<T: Scalar>(ln_x: T) -> Result<T> {
    if !ln_x.is_finite() {
        return Err(Error::Domain {
            op: "lambert_w0_of_exp",
            value: ln_x.as_f64(),
            constraint: "finite ln x",
        });
    }
    if ln_x <= T::one() {
        let x = ln_x.exp();
        if x == T::zero() {
            return Ok(T::zero());
        }
        return halley_direct(x);
    }

    // Asymptotic start: w ~ L - ln L + ln L / L.
    let ll = ln_x.ln();
    let mut w = ln_x - ll + ll / ln_x;
    let tol = T::epsilon() * T::lit(4.0);
    let mut step = T::infinity();
    for _ in 0..MAX_ITER {
        // f(w) = w + ln w - L, f' = 1 + 1/w, f'' = -1/w^2
        let f = w + w.ln() - ln_x;
        let fp = T::one() + w.recip();
        let fpp = -(w * w).recip();
        step = f / (fp - f * fpp / (T::lit(2.0) * fp));
        let next = w - step;
        let next = if next > T::zero() { next } else { w / T::lit(2.0) };
        let done = (next - w).abs() <= tol * next;
        w = next;
        if done {
            return Ok(w);
        }
    }
    Err(Error::Convergence {
        op: "lambert_w0_of_exp",
        iterations: MAX_ITER,
        last_step: step.as_f64(),
    })
}

/// Halley on `w e^w - x` for `0 < x <= e`, where nothing can overflow.
fn halley_direct<T: Scalar>(x: T) -> Result<T> {
    let two = T::lit(2.0);
    let mut w = if x < T::lit(0.5) {
        // W(x) = x - x^2 + 1.5 x^3 - ...
        x * (T::one() - x)
    } else {
        x.ln_1p() * T::lit(0.8)
    };
    let tol = T::epsilon() * T::lit(4.0);
    let mut step = T::infinity();
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == T::zero() {
            return Ok(w);
        }
        let wp1 = w + T::one();
        let fp = ew * wp1;
        step = f / (fp - (w + two) * f / (two * wp1));
        let next = w - step;
        let done = (next - w).abs() <= tol * next.abs();
        w = next;
        if done {
            return Ok(w);
        }
    }
    Err(Error::Convergence {
        op: "lambert_w0",
        iterations: MAX_ITER,
        last_step: step.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain Newton on `w e^w = x`, kept separate from the Halley paths.
    fn newton_oracle(x: f64) -> f64 {
        let mut w = if x < 1.0 { x } else { x.ln() };
        for _ in 0..200 {
            let ew = w.exp();
            let next = w - (w * ew - x) / (ew * (w + 1.0));
            if (next - w).abs() < 1e-15 * next.abs().max(1e-300) {
                return next;
            }
            w = next;
        }
        w
    }

    fn residual(x: f64) -> f64 {
        let w = lambert_w0(x).unwrap();
        (w * w.exp() - x).abs() / x.max(1.0)
    }

    #[test]
    fn landmarks() {
        assert_eq!(lambert_w0(0.0_f64).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        // Newton oracle, frozen: 1.745528002740699383...
        let w10 = lambert_w0(10.0_f64).unwrap();
        assert!((w10 - 1.745_528_002_740_699).abs() < 1e-14);
        assert!((w10 - newton_oracle(10.0)).abs() < 1e-14);
    }

    #[test]
    fn log_domain_landmarks() {
        assert!((lambert_w0_of_exp(1.0_f64).unwrap() - 1.0).abs() < 1e-15);
        let a = lambert_w0_of_exp(10f64.ln()).unwrap();
        let b = lambert_w0(10.0_f64).unwrap();
        assert!(((a - b) / b).abs() < 1e-12);
        // Fixed point w <- 1000 - ln w, frozen at 993.09916947238910...
        let w = lambert_w0_of_exp(1000.0_f64).unwrap();
        assert!(((w - 993.099_169_472_389_1) / w).abs() < 1e-12);
        assert!((w + w.ln() - 1000.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(lambert_w0(-1e-3_f64), Err(Error::Domain { .. })));
        assert!(matches!(lambert_w0(f64::NAN), Err(Error::Domain { .. })));
        assert!(matches!(lambert_w0(f64::INFINITY), Err(Error::Domain { .. })));
        assert!(matches!(lambert_w0_of_exp(f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn defining_identity_on_log_grid() {
        let n = 1000;
        for i in 0..n {
            let x = 10f64.powf(-9.0 + 18.0 * i as f64 / (n - 1) as f64);
            assert!(residual(x) <= 1e-12, "x = {x:e}: residual {}", residual(x));
        }
    }

    #[test]
    fn monotone_on_grid() {
        let mut prev = 0.0;
        for i in 0..2000 {
            let x = 10f64.powf(-9.0 + 18.0 * i as f64 / 1999.0);
            let w = lambert_w0(x).unwrap();
            assert!(w >= prev);
            prev = w;
        }
    }

    #[test]
    fn matches_newton_oracle() {
        for &x in &[1e-9, 1e-3, 0.3, 0.5, 1.0, 2.0, 2.7, 3.0, 200.0, 1e5, 1e9] {
            let w = lambert_w0(x).unwrap();
            let o = newton_oracle(x);
            assert!(((w - o) / o).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn extreme_log_arguments() {
        for &l in &[-700.0_f64, -50.0, 0.999, 1.001, 709.0, 1e4, 1e8, 1e15] {
            let w = lambert_w0_of_exp(l).unwrap();
            assert!(w > 0.0);
            if l > -700.0 {
                assert!(((w + w.ln() - l) / l.abs().max(1.0)).abs() < 1e-14, "ln_x = {l}");
            }
        }
        assert_eq!(lambert_w0_of_exp(-800.0_f64).unwrap(), 0.0);
    }

    #[test]
    fn f32_path() {
        let w = lambert_w0(10.0_f32).unwrap();
        assert!((w - 1.745_528).abs() < 1e-5);
        let w = lambert_w0_of_exp(1000.0_f32).unwrap();
        assert!((w - 993.099_2).abs() < 1e-2);
    }

    proptest::proptest! {
        #[test]
        fn log_and_direct_agree(e in -6.0_f64..6.0) {
            let x = 10f64.powf(e);
            let a = lambert_w0(x).unwrap();
            let b = lambert_w0_of_exp(x.ln()).unwrap();
            proptest::prop_assert!(((a - b) / a).abs() <= 1e-12);
        }
    }
}
