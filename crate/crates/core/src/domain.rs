//! Moving right boundary `l(t)` and the map between the physical interval
//! `(0, l(t))` and the fixed reference interval `(0, 1)`.

use crate::error::{invalid, Error, Result};

/// Shape of the moving boundary. Every kind satisfies `l(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCurve {
    /// `l(t) = (1 + k t)^alpha` with `alpha > 0`, `k > 0`.
    PowerLaw { alpha: f64, k: f64 },
    /// `l(t) = 1 + ln(1 + t)`.
    LogGrowth,
    /// `l(t) = 1 + sin t`. Not monotone and touches zero at `t = 3π/2`.
    Sinusoidal,
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::InvalidTime {
            t,
            reason: "time must be finite",
        });
    }
    if t < 0.0 {
        return Err(Error::InvalidTime {
            t,
            reason: "time must be non-negative",
        });
    }
    Ok(())
}

impl BoundaryCurve {
    pub fn power_law(alpha: f64, k: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid("alpha", format!("must be > 0, got {alpha}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(invalid("k", format!("must be > 0, got {k}")));
        }
        Ok(BoundaryCurve::PowerLaw { alpha, k })
    }

    /// Power-law parameters `(alpha, k)`, if this is a power-law curve.
    pub fn power_law_params(&self) -> Option<(f64, f64)> {
        match *self {
            BoundaryCurve::PowerLaw { alpha, k } => Some((alpha, k)),
            _ => None,
        }
    }

    /// `l(t)`.
    pub fn value(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.value_unchecked(t))
    }

    /// `dl/dt`.
    pub fn slope(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.slope_unchecked(t))
    }

    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        match *self {
            BoundaryCurve::PowerLaw { alpha, k } => (1.0 + k * t).powf(alpha),
            BoundaryCurve::LogGrowth => 1.0 + t.ln_1p(),
            BoundaryCurve::Sinusoidal => 1.0 + t.sin(),
        }
    }

    pub(crate) fn slope_unchecked(&self, t: f64) -> f64 {
        match *self {
            BoundaryCurve::PowerLaw { alpha, k } => k * alpha * (1.0 + k * t).powf(alpha - 1.0),
            BoundaryCurve::LogGrowth => 1.0 / (1.0 + t),
            BoundaryCurve::Sinusoidal => t.cos(),
        }
    }

    /// Logarithmic growth rate `l'(t) / l(t)`, the advection coefficient of the
    /// reference-coordinate equation (multiplied by `y`).
    pub(crate) fn log_rate(&self, t: f64) -> f64 {
        match *self {
            BoundaryCurve::PowerLaw { alpha, k } => k * alpha / (1.0 + k * t),
            _ => self.slope_unchecked(t) / self.value_unchecked(t),
        }
    }

    /// Whether `l` is non-decreasing on `[0, ∞)`.
    pub fn is_monotone(&self) -> bool {
        !matches!(self, BoundaryCurve::Sinusoidal)
    }

    /// Physical coordinate `x ∈ [0, l(t)]` to reference coordinate `y = x / l(t)`.
    pub fn to_reference(&self, x: f64, t: f64) -> Result<f64> {
        let l = self.value(t)?;
        if !(0.0..=l).contains(&x) {
            return Err(Error::OutOfDomain { value: x, upper: l });
        }
        Ok((x / l).min(1.0))
    }

    /// Reference coordinate `y ∈ [0, 1]` to physical coordinate `x = l(t) y`.
    pub fn to_physical(&self, y: f64, t: f64) -> Result<f64> {
        let l = self.value(t)?;
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::OutOfDomain {
                value: y,
                upper: 1.0,
            });
        }
        Ok(l * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn boundary_values() {
        let c = BoundaryCurve::power_law(1.0, 0.5).unwrap();
        assert_eq!(c.value(0.0).unwrap(), 1.0);
        let c = BoundaryCurve::power_law(1.0, 1.0).unwrap();
        assert_eq!(c.value(2.0).unwrap(), 3.0);
        let c = BoundaryCurve::power_law(0.5, 2.0).unwrap();
        assert_eq!(c.value(4.0).unwrap(), 3.0);
        assert_eq!(BoundaryCurve::LogGrowth.value(0.0).unwrap(), 1.0);
        assert_eq!(BoundaryCurve::Sinusoidal.value(0.0).unwrap(), 1.0);
    }

    #[test]
    fn slopes() {
        let c = BoundaryCurve::power_law(1.0, 0.5).unwrap();
        assert_eq!(c.slope(7.0).unwrap(), 0.5);
        let c = BoundaryCurve::power_law(0.5, 2.0).unwrap();
        assert_eq!(c.slope(0.0).unwrap(), 1.0);
        assert_eq!(BoundaryCurve::Sinusoidal.slope(0.0).unwrap(), 1.0);
    }

    #[test]
    fn negative_time_rejected() {
        let c = BoundaryCurve::power_law(1.0, 1.0).unwrap();
        assert!(matches!(c.value(-1e-9), Err(Error::InvalidTime { .. })));
        assert!(matches!(c.slope(-1.0), Err(Error::InvalidTime { .. })));
        assert!(c.value(f64::NAN).is_err());
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(BoundaryCurve::power_law(0.0, 1.0).is_err());
        assert!(BoundaryCurve::power_law(1.0, -1.0).is_err());
    }

    #[test]
    fn coordinate_map_endpoints() {
        let c = BoundaryCurve::power_law(1.0, 1.0).unwrap();
        assert_eq!(c.to_reference(3.0, 2.0).unwrap(), 1.0);
        assert_eq!(c.to_reference(0.0, 2.0).unwrap(), 0.0);
        assert_eq!(c.to_reference(1.5, 2.0).unwrap(), 0.5);
        assert!(c.to_reference(3.0001, 2.0).is_err());
        assert!(c.to_reference(-0.1, 2.0).is_err());
        assert!(c.to_physical(1.1, 2.0).is_err());
    }

    #[test]
    fn monotonicity_flags() {
        assert!(BoundaryCurve::power_law(0.3, 2.0).unwrap().is_monotone());
        assert!(BoundaryCurve::LogGrowth.is_monotone());
        assert!(!BoundaryCurve::Sinusoidal.is_monotone());
    }

    fn curves() -> impl Strategy<Value = BoundaryCurve> {
        prop_oneof![
            (0.05f64..3.0, 0.05f64..5.0).prop_map(|(a, k)| BoundaryCurve::PowerLaw { alpha: a, k }),
            Just(BoundaryCurve::LogGrowth),
        ]
    }

    proptest! {
        #[test]
        fn power_law_strictly_increasing(a in 0.05f64..3.0, k in 0.05f64..5.0,
                                         t1 in 0.0f64..100.0, dt in 1e-3f64..50.0) {
            let c = BoundaryCurve::power_law(a, k).unwrap();
            prop_assert!(c.value(t1 + dt).unwrap() > c.value(t1).unwrap());
        }

        #[test]
        fn reference_round_trip(c in curves(), y in 0.0f64..=1.0, t in 0.0f64..100.0) {
            let x = c.to_physical(y, t).unwrap();
            let back = c.to_reference(x, t).unwrap();
            prop_assert!((back - y).abs() <= 1e-14);
        }

        #[test]
        fn slope_matches_centered_difference(c in curves(), t in 1e-3f64..100.0) {
            let h = 1e-5;
            let t = t.max(h);
            let fd = (c.value(t + h).unwrap() - c.value(t - h).unwrap()) / (2.0 * h);
            let exact = c.slope(t).unwrap();
            prop_assert!(((fd - exact) / exact).abs() < 1e-6, "fd {} exact {}", fd, exact);
        }
    }
}
