//! Scenario parameters, bounded value types and dB conversions.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Validated constants of one surveillance scenario.
///
/// Powers are linear and normalized by whatever reference the caller chose;
/// fading rates are `1 / E[g]` of the exponential power gains of the
/// suspicious link (`lambda0`), the eavesdropping link (`lambda1`) and the
/// jamming link (`lambda2`). Instances only exist after [`validate`] passed.
///
/// [`validate`]: ParamsBuilder::build
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    p_tx: T,
    sigma0_sq: T,
    sigma1_sq: T,
    lambda0: T,
    lambda1: T,
    lambda2: T,
    delta: T,
    q_max: T,
}

/// Unvalidated parameter set. Starts from [`ParamsBuilder::canonical`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamsBuilder<T> {
    pub p_tx: T,
    pub sigma0_sq: T,
    pub sigma1_sq: T,
    pub lambda0: T,
    pub lambda1: T,
    pub lambda2: T,
    pub delta: T,
    pub q_max: T,
}

/// Reference scenario: P = 20 dB, Q_max = 30 dB, unit noise, lambda0 = 1,
/// lambda1 = lambda2 = 10, delta = 0.05.
pub mod canonical {
    pub const P_TX: f64 = 100.0;
    pub const SIGMA0_SQ: f64 = 1.0;
    pub const SIGMA1_SQ: f64 = 1.0;
    pub const LAMBDA0: f64 = 1.0;
    pub const LAMBDA1: f64 = 10.0;
    pub const LAMBDA2: f64 = 10.0;
    pub const DELTA: f64 = 0.05;
    pub const Q_MAX: f64 = 1000.0;
}

impl<T: Scalar> ParamsBuilder<T> {
    pub fn canonical() -> Self {
        Self {
            p_tx: T::lit(canonical::P_TX),
            sigma0_sq: T::lit(canonical::SIGMA0_SQ),
            sigma1_sq: T::lit(canonical::SIGMA1_SQ),
            lambda0: T::lit(canonical::LAMBDA0),
            lambda1: T::lit(canonical::LAMBDA1),
            lambda2: T::lit(canonical::LAMBDA2),
            delta: T::lit(canonical::DELTA),
            q_max: T::lit(canonical::Q_MAX),
        }
    }

    /// Checks every invariant in declaration order and reports the first
    /// violation.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p_tx", self.p_tx),
            ("sigma0_sq", self.sigma0_sq),
            ("sigma1_sq", self.sigma1_sq),
            ("lambda0", self.lambda0),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
        ];
        for (field, value) in positive {
            check_positive(field, value)?;
        }
        if !(self.delta > T::zero() && self.delta < T::one()) {
            return Err(Error::InvalidParam {
                field: "delta",
                value: self.delta.as_f64(),
                constraint: "0 < delta < 1",
            });
        }
        check_positive("q_max", self.q_max)
    }

    pub fn build(self) -> Result<SystemParams<T>> {
        self.validate()?;
        Ok(SystemParams {
            p_tx: self.p_tx,
            sigma0_sq: self.sigma0_sq,
            sigma1_sq: self.sigma1_sq,
            lambda0: self.lambda0,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            delta: self.delta,
            q_max: self.q_max,
        })
    }
}

impl<T: Scalar> Default for ParamsBuilder<T> {
    fn default() -> Self {
        Self::canonical()
    }
}

fn check_positive<T: Scalar>(field: &'static str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            field,
            value: value.as_f64(),
            constraint: "finite and > 0",
        })
    }
}

impl<T: Scalar> SystemParams<T> {
    pub fn canonical() -> Self {
        ParamsBuilder::canonical()
            .build()
            .expect("canonical parameters are valid")
    }

    pub fn builder() -> ParamsBuilder<T> {
        ParamsBuilder::canonical()
    }

    /// Copy of the fields, for deriving a modified scenario.
    pub fn to_builder(&self) -> ParamsBuilder<T> {
        ParamsBuilder {
            p_tx: self.p_tx,
            sigma0_sq: self.sigma0_sq,
            sigma1_sq: self.sigma1_sq,
            lambda0: self.lambda0,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            delta: self.delta,
            q_max: self.q_max,
        }
    }

    pub fn p_tx(&self) -> T {
        self.p_tx
    }
    pub fn sigma0_sq(&self) -> T {
        self.sigma0_sq
    }
    pub fn sigma1_sq(&self) -> T {
        self.sigma1_sq
    }
    pub fn lambda0(&self) -> T {
        self.lambda0
    }
    pub fn lambda1(&self) -> T {
        self.lambda1
    }
    pub fn lambda2(&self) -> T {
        self.lambda2
    }
    pub fn delta(&self) -> T {
        self.delta
    }
    pub fn q_max(&self) -> T {
        self.q_max
    }
}

impl<T: Scalar> Default for SystemParams<T> {
    fn default() -> Self {
        Self::canonical()
    }
}

macro_rules! bounded {
    ($(#[$doc:meta])* $name:ident, $check:expr, $what:literal) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
        pub struct $name<T>(pub(crate) T);

        impl<T: Scalar> $name<T> {
            pub fn new(value: T) -> Result<Self> {
                let ok: fn(T) -> bool = $check;
                if ok(value) {
                    Ok(Self(value))
                } else {
                    Err(Error::Domain {
                        op: stringify!($name),
                        value: value.as_f64(),
                        constraint: $what,
                    })
                }
            }

            #[inline]
            pub fn get(self) -> T {
                self.0
            }
        }
    };
}

bounded!(
    /// Probability in `[0, 1]`.
    Probability,
    |v| v >= T::zero() && v <= T::one(),
    "0 <= p <= 1"
);
bounded!(
    /// Spectral efficiency in bits/s/Hz.
    RateBpsHz,
    |v| v >= T::zero() && v.is_finite(),
    "finite rate >= 0"
);
bounded!(
    /// Linear power, normalized or absolute.
    PowerLinear,
    |v| v >= T::zero() && v.is_finite(),
    "finite power >= 0"
);

/// Power in decibels. Any real value, including `-inf` for zero power.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct PowerDb<T>(pub T);

impl<T: Scalar> PowerDb<T> {
    pub fn get(self) -> T {
        self.0
    }

    pub fn to_linear(self) -> PowerLinear<T> {
        db_to_linear(self)
    }
}

impl<T: Scalar> PowerLinear<T> {
    pub fn to_db(self) -> Result<PowerDb<T>> {
        linear_to_db(self)
    }
}

/// `10^(dB/10)`.
pub fn db_to_linear<T: Scalar>(x: PowerDb<T>) -> PowerLinear<T> {
    PowerLinear(T::lit(10.0).powf(x.0 / T::lit(10.0)))
}

pub fn linear_to_db<T: Scalar>(x: PowerLinear<T>) -> Result<PowerDb<T>> {
    if x.0 > T::zero() {
        Ok(PowerDb(T::lit(10.0) * x.0.log10()))
    } else {
        Err(Error::NonPositiveLinear(x.0.as_f64()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_is_valid() {
        assert!(ParamsBuilder::<f64>::canonical().validate().is_ok());
        let p = SystemParams::<f64>::canonical();
        assert_eq!(p.p_tx(), 100.0);
        assert_eq!(p.q_max(), 1000.0);
        assert_eq!(p.delta(), 0.05);
    }

    #[test]
    fn delta_zero_rejected() {
        let b = ParamsBuilder {
            delta: 0.0,
            ..ParamsBuilder::<f64>::canonical()
        };
        match b.build() {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "delta"),
            other => panic!("unexpected {other:?}"),
        }
        let b = ParamsBuilder {
            delta: 1.0,
            ..ParamsBuilder::<f64>::canonical()
        };
        assert!(matches!(b.build(), Err(Error::InvalidParam { field: "delta", .. })));
    }

    #[test]
    fn negative_lambda1_rejected() {
        let b = ParamsBuilder {
            lambda1: -1.0,
            ..ParamsBuilder::<f64>::canonical()
        };
        assert!(matches!(
            b.build(),
            Err(Error::InvalidParam { field: "lambda1", value, .. }) if value == -1.0
        ));
    }

    #[test]
    fn first_violation_reported() {
        let b = ParamsBuilder {
            sigma1_sq: 0.0,
            q_max: -3.0,
            ..ParamsBuilder::<f64>::canonical()
        };
        assert!(matches!(b.build(), Err(Error::InvalidParam { field: "sigma1_sq", .. })));
        let b = ParamsBuilder {
            p_tx: f64::INFINITY,
            ..ParamsBuilder::<f64>::canonical()
        };
        assert!(matches!(b.build(), Err(Error::InvalidParam { field: "p_tx", .. })));
    }

    #[test]
    fn db_landmarks() {
        assert_eq!(db_to_linear(PowerDb(20.0_f64)).get(), 100.0);
        assert_eq!(db_to_linear(PowerDb(0.0_f64)).get(), 1.0);
        assert_eq!(db_to_linear(PowerDb(30.0_f64)).get(), 1000.0);
        assert_eq!(linear_to_db(PowerLinear::new(100.0_f64).unwrap()).unwrap().get(), 20.0);
    }

    #[test]
    fn linear_to_db_rejects_non_positive() {
        assert_eq!(
            linear_to_db(PowerLinear::new(0.0_f64).unwrap()),
            Err(Error::NonPositiveLinear(0.0))
        );
        assert_eq!(
            linear_to_db(PowerLinear(-2.0_f64)),
            Err(Error::NonPositiveLinear(-2.0))
        );
    }

    #[test]
    fn bounded_types() {
        assert!(Probability::new(0.5_f64).is_ok());
        assert!(Probability::new(1.5_f64).is_err());
        assert!(RateBpsHz::new(-0.1_f64).is_err());
        assert!(PowerLinear::new(f64::NAN).is_err());
    }

    #[test]
    fn works_in_f32() {
        let p = SystemParams::<f32>::canonical();
        assert_eq!(p.lambda1(), 10.0_f32);
        assert!((db_to_linear(PowerDb(30.0_f32)).get() - 1000.0).abs() < 1e-3);
    }

    proptest::proptest! {
        #[test]
        fn db_round_trip(exp in -6.0_f64..6.0) {
            let x = 10f64.powf(exp);
            let back = db_to_linear(linear_to_db(PowerLinear::new(x).unwrap()).unwrap()).get();
            proptest::prop_assert!(((back - x) / x).abs() <= 1e-12);
        }
    }
}
