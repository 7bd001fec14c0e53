//! Frequency and per-unit base quantities shared by every analysis.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Electrical frequency in hertz. `0 Hz` is the DC operating state.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency<T>(T);

impl<T: Scalar> Frequency<T> {
    pub fn new(hertz: T) -> Result<Self> {
        if !hertz.is_finite() || hertz < T::zero() {
            return Err(invalid("frequency", format!("must be finite and >= 0, got {hertz}")));
        }
        Ok(Self(hertz))
    }

    pub fn dc() -> Self {
        Self(T::zero())
    }

    #[inline]
    pub fn hertz(self) -> T {
        self.0
    }

    /// Angular frequency ω = 2πf in rad/s.
    #[inline]
    pub fn omega(self) -> T {
        T::lit(2.0) * T::PI() * self.0
    }

    #[inline]
    pub fn is_dc(self) -> bool {
        self.0 == T::zero()
    }
}

/// System base used to normalise impedances and admittances.
///
/// `v_base` is the line-to-line voltage, so `z_base = v_base² / s_base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerUnitBase<T> {
    s_base: T,
    v_base: T,
}

impl<T: Scalar> PerUnitBase<T> {
    pub fn new(s_base_va: T, v_base_v: T) -> Result<Self> {
        if !(s_base_va > T::zero()) || !s_base_va.is_finite() {
            return Err(invalid("s_base", "must be positive"));
        }
        if !(v_base_v > T::zero()) || !v_base_v.is_finite() {
            return Err(invalid("v_base", "must be positive"));
        }
        Ok(Self {
            s_base: s_base_va,
            v_base: v_base_v,
        })
    }

    /// Base from datasheet-style units (MVA, kV).
    pub fn from_mva_kv(mva: T, kv: T) -> Result<Self> {
        Self::new(mva * T::lit(1e6), kv * T::lit(1e3))
    }

    pub fn s_base(&self) -> T {
        self.s_base
    }

    pub fn v_base(&self) -> T {
        self.v_base
    }

    pub fn z_base(&self) -> T {
        self.v_base * self.v_base / self.s_base
    }

    pub fn y_base(&self) -> T {
        T::one() / self.z_base()
    }

    pub fn impedance_to_pu(&self, z: Complex<T>) -> Complex<T> {
        z / self.z_base()
    }

    pub fn admittance_to_pu(&self, y: Complex<T>) -> Complex<T> {
        y * self.z_base()
    }

    pub fn admittance_to_si(&self, y_pu: Complex<T>) -> Complex<T> {
        y_pu / self.z_base()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_base_for_345kv_100mva() {
        let base = PerUnitBase::from_mva_kv(100.0_f64, 345.0).unwrap();
        assert!((base.z_base() - 1190.25).abs() < 1e-9);
        assert!((base.y_base() * base.z_base() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frequency_rejects_negative_and_nan() {
        assert!(Frequency::new(-1.0_f64).is_err());
        assert!(Frequency::new(f64::NAN).is_err());
        assert!(Frequency::<f64>::dc().is_dc());
        let f = Frequency::new(60.0_f64).unwrap();
        assert!((f.omega() - 376.991_118_430_775_2).abs() < 1e-9);
    }

    #[test]
    fn base_rejects_non_positive() {
        assert!(PerUnitBase::new(0.0_f64, 1.0).is_err());
        assert!(PerUnitBase::new(1.0_f64, -1.0).is_err());
    }
}
