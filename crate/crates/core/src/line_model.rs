//! Distributed-parameter and lumped Π models of a transmission line.
//!
//! The exact model relates terminal phasors through hyperbolic functions of
//! γℓ; the lumped Π model multiplies per-km parameters by the length. Both are
//! expressed as ABCD two-ports so they can be compared under identical
//! terminations. All quantities here are SI; per-unit scaling happens in
//! [`crate::power_flow`].

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;
use crate::units::Frequency;

/// Physical description of a line: per-km R′, L′, C′, G′ and its length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributedLineParams<T> {
    /// Ω/km
    pub r_per_km: T,
    /// H/km
    pub l_per_km: T,
    /// F/km
    pub c_per_km: T,
    /// S/km
    pub g_per_km: T,
    pub length_km: T,
}

impl<T: Scalar> DistributedLineParams<T> {
    /// Builds a line from SI per-km values.
    pub fn new(r_per_km: T, l_per_km: T, c_per_km: T, g_per_km: T, length_km: T) -> Result<Self> {
        let p = Self {
            r_per_km,
            l_per_km,
            c_per_km,
            g_per_km,
            length_km,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds a line from datasheet units: Ω/km, mH/km, nF/km, S/km, km.
    pub fn from_datasheet(
        r_ohm_per_km: T,
        l_mh_per_km: T,
        c_nf_per_km: T,
        g_s_per_km: T,
        length_km: T,
    ) -> Result<Self> {
        Self::new(
            r_ohm_per_km,
            l_mh_per_km * T::lit(1e-3),
            c_nf_per_km * T::lit(1e-9),
            g_s_per_km,
            length_km,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: T| x.is_finite();
        if !finite(self.r_per_km) || self.r_per_km < T::zero() {
            return Err(invalid("r_per_km", "must be finite and >= 0"));
        }
        if !finite(self.l_per_km) || !(self.l_per_km > T::zero()) {
            return Err(invalid("l_per_km", "must be finite and > 0"));
        }
        if !finite(self.c_per_km) || !(self.c_per_km > T::zero()) {
            return Err(invalid("c_per_km", "must be finite and > 0"));
        }
        if !finite(self.g_per_km) || self.g_per_km < T::zero() {
            return Err(invalid("g_per_km", "must be finite and >= 0"));
        }
        if !finite(self.length_km) || !(self.length_km > T::zero()) {
            return Err(invalid("length_km", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Same line with a different length.
    pub fn with_length(&self, length_km: T) -> Result<Self> {
        Self::new(self.r_per_km, self.l_per_km, self.c_per_km, self.g_per_km, length_km)
    }

    /// R′ + jωL′ in Ω/km.
    pub fn series_impedance_per_km(&self, f: Frequency<T>) -> Complex<T> {
        Complex::new(self.r_per_km, f.omega() * self.l_per_km)
    }

    /// G′ + jωC′ in S/km.
    pub fn shunt_admittance_per_km(&self, f: Frequency<T>) -> Complex<T> {
        Complex::new(self.g_per_km, f.omega() * self.c_per_km)
    }
}

/// Two-port transfer matrix: `[V_o; I_o] = [[a, b]; [c, d]] [V_d; I_d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcdMatrix<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Scalar> AbcdMatrix<T> {
    pub fn identity() -> Self {
        Self {
            a: Complex::new(T::one(), T::zero()),
            b: Complex::new(T::zero(), T::zero()),
            c: Complex::new(T::zero(), T::zero()),
            d: Complex::new(T::one(), T::zero()),
        }
    }

    /// a·d − b·c; equals one for every reciprocal two-port.
    pub fn determinant(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn entries(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// How a [`LumpedPiBranch`] was obtained from the distributed parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiConstruction {
    /// Per-km parameters multiplied by the length.
    NaiveLumping,
    /// Hyperbolic correction so the Π reproduces the exact ABCD matrix.
    ExactEquivalent,
}

/// Lumped Π branch evaluated at one frequency. Each end carries half of
/// `y_shunt_total`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpedPiBranch<T> {
    /// Ω
    pub z_series: Complex<T>,
    /// S
    pub y_shunt_total: Complex<T>,
    pub construction: PiConstruction,
    pub frequency: Frequency<T>,
}

impl<T: Scalar> LumpedPiBranch<T> {
    pub fn y_shunt_end(&self) -> Complex<T> {
        self.y_shunt_total / T::lit(2.0)
    }
}

/// Which model to terminate under surge-impedance loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineModel {
    Exact,
    /// Naively lumped Π.
    Pi,
}

pub fn lump_parameters<T: Scalar>(params: &DistributedLineParams<T>, f: Frequency<T>) -> LumpedPiBranch<T> {
    let len = params.length_km;
    LumpedPiBranch {
        z_series: params.series_impedance_per_km(f) * len,
        y_shunt_total: params.shunt_admittance_per_km(f) * len,
        construction: PiConstruction::NaiveLumping,
        frequency: f,
    }
}

/// γ = √((R′+jωL′)(G′+jωC′)) per km, principal root.
pub fn propagation_constant<T: Scalar>(params: &DistributedLineParams<T>, f: Frequency<T>) -> Complex<T> {
    (params.series_impedance_per_km(f) * params.shunt_admittance_per_km(f)).sqrt()
}

/// Z₀ = √((R′+jωL′)/(G′+jωC′)) in Ω, principal root.
pub fn characteristic_impedance<T: Scalar>(
    params: &DistributedLineParams<T>,
    f: Frequency<T>,
) -> Result<Complex<T>> {
    let y = params.shunt_admittance_per_km(f);
    if y.re == T::zero() && y.im == T::zero() {
        return Err(Error::DivisionByZeroAdmittance {
            hertz: f.hertz().as_f64(),
        });
    }
    Ok((params.series_impedance_per_km(f) / y).sqrt())
}

fn gamma_ell<T: Scalar>(params: &DistributedLineParams<T>, f: Frequency<T>) -> Complex<T> {
    propagation_constant(params, f) * params.length_km
}

pub fn abcd_exact<T: Scalar>(params: &DistributedLineParams<T>, f: Frequency<T>) -> Result<AbcdMatrix<T>> {
    let z0 = characteristic_impedance(params, f)?;
    let x = gamma_ell(params, f);
    let (ch, sh) = (x.cosh(), x.sinh());
    Ok(AbcdMatrix {
        a: ch,
        b: z0 * sh,
        c: sh / z0,
        d: ch,
    })
}

pub fn abcd_pi<T: Scalar>(branch: &LumpedPiBranch<T>) -> AbcdMatrix<T> {
    let one = Complex::new(T::one(), T::zero());
    let zy = branch.z_series * branch.y_shunt_total;
    let a = one + zy / T::lit(2.0);
    AbcdMatrix {
        a,
        b: branch.z_series,
        c: branch.y_shunt_total * (one + zy / T::lit(4.0)),
        d: a,
    }
}

/// Π branch whose ABCD matrix equals the exact line model.
pub fn exact_equivalent_pi<T: Scalar>(
    params: &DistributedLineParams<T>,
    f: Frequency<T>,
) -> Result<LumpedPiBranch<T>> {
    let z0 = characteristic_impedance(params, f)?;
    let x = gamma_ell(params, f);
    let y_end = (x / T::lit(2.0)).tanh() / z0;
    Ok(LumpedPiBranch {
        z_series: z0 * x.sinh(),
        y_shunt_total: y_end * T::lit(2.0),
        construction: PiConstruction::ExactEquivalent,
        frequency: f,
    })
}

/// |γℓ|, the dimensionless electrical length governing Π-model validity.
pub fn gamma_ell_magnitude<T: Scalar>(params: &DistributedLineParams<T>, f: Frequency<T>) -> T {
    gamma_ell(params, f).norm()
}

/// Low- and high-frequency asymptotes of |γℓ|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEllAsymptotes<T> {
    /// ℓ√(R′G′)
    pub low: T,
    /// ℓω√(L′C′)
    pub high: T,
}

pub fn gamma_ell_asymptotes<T: Scalar>(params: &DistributedLineParams<T>, f: Frequency<T>) -> GammaEllAsymptotes<T> {
    let len = params.length_km;
    GammaEllAsymptotes {
        low: len * (params.r_per_km * params.g_per_km).sqrt(),
        high: len * f.omega() * (params.l_per_km * params.c_per_km).sqrt(),
    }
}

/// Destination voltage with V_o = 1∠0 and the line terminated in Z₀.
///
/// Solved through the ABCD matrix of the chosen model:
/// `V_o = (A + B/Z₀)·V_d`.
pub fn sil_terminal_voltage<T: Scalar>(
    model: LineModel,
    params: &DistributedLineParams<T>,
    f: Frequency<T>,
) -> Result<Complex<T>> {
    let z0 = characteristic_impedance(params, f)?;
    let abcd = match model {
        LineModel::Exact => abcd_exact(params, f)?,
        LineModel::Pi => abcd_pi(&lump_parameters(params, f)),
    };
    let gain = abcd.a + abcd.b / z0;
    if gain.norm() <= T::epsilon() {
        return Err(Error::SingularSystem("A + B/Z0 vanishes under SIL termination"));
    }
    Ok(Complex::new(T::one(), T::zero()) / gain)
}

/// Π-model error in p.u.: ||V_d(Π)| − |V_d(exact)|| under surge-impedance loading.
pub fn pi_model_error<T: Scalar>(params: &DistributedLineParams<T>, f: Frequency<T>) -> Result<T> {
    let exact = sil_terminal_voltage(LineModel::Exact, params, f)?;
    let pi = sil_terminal_voltage(LineModel::Pi, params, f)?;
    Ok((pi.norm() - exact.norm()).abs())
}
