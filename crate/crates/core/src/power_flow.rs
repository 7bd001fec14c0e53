//! Per-unit power flow on a single Π branch with frequency as a parameter,
//! including the 0 Hz limit and operating-limit checks.

use std::fmt;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::line_model::LumpedPiBranch;
use crate::scalar::Scalar;
use crate::units::{Frequency, PerUnitBase};

/// Margin below which a constraint is reported as active (p.u. or rad).
pub const ACTIVATION_TOLERANCE: f64 = 1e-6;

/// Which share of the line charging the flow equations see at each bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShuntPlacement {
    /// The full line charging ωC′ℓ (and G′ℓ) appears in each bus equation.
    #[default]
    Total,
    /// Half of the line charging at each end, as in the Π circuit.
    PerEnd,
}

/// Where thermal (apparent power) limits are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalEnforcement {
    #[default]
    BothEnds,
    OriginOnly,
}

impl ThermalEnforcement {
    pub fn enforces_destination(self) -> bool {
        matches!(self, ThermalEnforcement::BothEnds)
    }
}

/// Series and shunt admittances of a branch in p.u. at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchAdmittance<T> {
    pub g_series: T,
    pub b_series: T,
    pub g_shunt_end: T,
    pub b_shunt_end: T,
    pub frequency: Frequency<T>,
}

impl<T: Scalar> BranchAdmittance<T> {
    /// Converts a lumped branch to per-unit admittances.
    ///
    /// `G = R/(R²+ω²L²)`, `B = −ωL/(R²+ω²L²)`; at DC `G = 1/R`, `B = 0`.
    pub fn from_branch(branch: &LumpedPiBranch<T>, base: &PerUnitBase<T>, placement: ShuntPlacement) -> Result<Self> {
        let z = base.impedance_to_pu(branch.z_series);
        if z.re == T::zero() && z.im == T::zero() {
            return Err(if branch.frequency.is_dc() {
                Error::ZeroResistanceAtDc
            } else {
                Error::SingularSystem("series impedance is zero")
            });
        }
        let y = z.inv();
        let y_sh = match placement {
            ShuntPlacement::Total => branch.y_shunt_total,
            ShuntPlacement::PerEnd => branch.y_shunt_end(),
        };
        let y_sh = base.admittance_to_pu(y_sh);
        let dc = branch.frequency.is_dc();
        Ok(Self {
            g_series: y.re,
            b_series: if dc { T::zero() } else { y.im },
            g_shunt_end: y_sh.re,
            b_shunt_end: if dc { T::zero() } else { y_sh.im },
            frequency: branch.frequency,
        })
    }

    pub fn series(&self) -> Complex<T> {
        Complex::new(self.g_series, self.b_series)
    }

    pub fn shunt_end(&self) -> Complex<T> {
        Complex::new(self.g_shunt_end, self.b_shunt_end)
    }

    /// Series resistance in p.u. (`Re(1/Y)`).
    pub fn series_resistance(&self) -> T {
        self.series().inv().re
    }

    /// All admittances divided by the base impedance (p.u. → S).
    pub fn to_si(&self, base: &PerUnitBase<T>) -> Self {
        self.scaled(T::one() / base.z_base())
    }

    /// Inverse of [`Self::to_si`].
    pub fn from_si(&self, base: &PerUnitBase<T>) -> Self {
        self.scaled(base.z_base())
    }

    fn scaled(&self, k: T) -> Self {
        Self {
            g_series: self.g_series * k,
            b_series: self.b_series * k,
            g_shunt_end: self.g_shunt_end * k,
            b_shunt_end: self.b_shunt_end * k,
            frequency: self.frequency,
        }
    }
}

/// Bus shunt element kind with its value (F or H).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShuntElement<T> {
    Capacitive { farads: T },
    Inductive { henries: T },
}

/// Susceptance of a bus shunt in S: `ωC` or `−1/(ωL)`.
pub fn shunt_susceptance<T: Scalar>(element: ShuntElement<T>, f: Frequency<T>) -> Result<T> {
    match element {
        ShuntElement::Capacitive { farads } => {
            if !(farads > T::zero()) {
                return Err(invalid("farads", "must be > 0"));
            }
            Ok(f.omega() * farads)
        }
        ShuntElement::Inductive { henries } => {
            if !(henries > T::zero()) {
                return Err(invalid("henries", "must be > 0"));
            }
            if f.is_dc() {
                return Err(Error::InductiveShuntAtDc);
            }
            Ok(-T::one() / (f.omega() * henries))
        }
    }
}

/// Terminal voltage magnitudes and angle difference θ_od = θ_o − θ_d (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint<T> {
    pub v_o: T,
    pub v_d: T,
    pub theta_od: T,
    pub frequency: Frequency<T>,
}

impl<T: Scalar> OperatingPoint<T> {
    pub fn new(v_o: T, v_d: T, theta_od: T, frequency: Frequency<T>) -> Result<Self> {
        if !(v_o > T::zero()) || !(v_d > T::zero()) {
            return Err(Error::InvalidOperatingPoint("voltage magnitudes must be positive".into()));
        }
        if !theta_od.is_finite() {
            return Err(Error::InvalidOperatingPoint("angle must be finite".into()));
        }
        if frequency.is_dc() && theta_od != T::zero() {
            return Err(Error::InvalidOperatingPoint("angle difference must be zero at DC".into()));
        }
        Ok(Self {
            v_o,
            v_d,
            theta_od,
            frequency,
        })
    }
}

/// Injections into the branch at both terminals (p.u.).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowResult<T> {
    pub p_o: T,
    pub q_o: T,
    pub p_d: T,
    pub q_d: T,
    pub s_o: T,
    pub s_d: T,
}

impl<T: Scalar> FlowResult<T> {
    fn new(p_o: T, q_o: T, p_d: T, q_d: T) -> Self {
        Self {
            p_o,
            q_o,
            p_d,
            q_d,
            s_o: p_o.hypot(q_o),
            s_d: p_d.hypot(q_d),
        }
    }
}

/// Operating limits of the branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingLimits<T> {
    pub s_max: T,
    pub v_min: T,
    pub v_max: T,
    /// rad
    pub theta_max: T,
    /// DC power scaling constant k.
    pub k_dc: T,
}

impl<T: Scalar> OperatingLimits<T> {
    pub fn new(s_max: T, v_min: T, v_max: T, theta_max: T, k_dc: T) -> Result<Self> {
        if !(s_max > T::zero()) || !s_max.is_finite() {
            return Err(invalid("s_max", "must be > 0"));
        }
        if !(v_min > T::zero()) || !(v_min <= v_max) || !v_max.is_finite() {
            return Err(invalid("v_min/v_max", "need 0 < v_min <= v_max"));
        }
        if !(theta_max >= T::zero()) || !(theta_max < T::FRAC_PI_2()) {
            return Err(invalid("theta_max", "need 0 <= theta_max < pi/2"));
        }
        if !(k_dc > T::zero()) || !(k_dc <= T::one()) {
            return Err(invalid("k_dc", "need 0 < k <= 1"));
        }
        Ok(Self {
            s_max,
            v_min,
            v_max,
            theta_max,
            k_dc,
        })
    }

    /// Three-conductor DC constant 2/(3√3).
    pub fn k_three_conductor() -> T {
        T::lit(2.0) / (T::lit(3.0) * T::lit(3.0).sqrt())
    }
}

fn check_frequency<T: Scalar>(op: &OperatingPoint<T>, adm: &BranchAdmittance<T>) -> Result<()> {
    if op.frequency != adm.frequency {
        return Err(Error::FrequencyMismatch {
            expected: adm.frequency.hertz().as_f64(),
            actual: op.frequency.hertz().as_f64(),
        });
    }
    Ok(())
}

/// AC injection at one bus given its own voltage `v_i`, the far-end voltage
/// `v_j` and θ_ij.
fn bus_injection<T: Scalar>(v_i: T, v_j: T, theta: T, adm: &BranchAdmittance<T>) -> (T, T) {
    let (g, b) = (adm.g_series, adm.b_series);
    let (s, c) = theta.sin_cos();
    let p = v_i * v_i * (g + adm.g_shunt_end) - v_i * v_j * (g * c + b * s);
    let q = -v_i * v_i * (b + adm.b_shunt_end) - v_i * v_j * (g * s - b * c);
    (p, q)
}

/// Active and reactive power injected at the origin bus.
pub fn origin_flow<T: Scalar>(op: &OperatingPoint<T>, adm: &BranchAdmittance<T>) -> Result<(T, T)> {
    check_frequency(op, adm)?;
    Ok(bus_injection(op.v_o, op.v_d, op.theta_od, adm))
}

/// Active and reactive power injected at the destination bus.
pub fn destination_flow<T: Scalar>(op: &OperatingPoint<T>, adm: &BranchAdmittance<T>) -> Result<(T, T)> {
    check_frequency(op, adm)?;
    Ok(bus_injection(op.v_d, op.v_o, -op.theta_od, adm))
}

/// Both-end flows in the 0 Hz limit, scaled by `k`.
pub fn dc_flow<T: Scalar>(op: &OperatingPoint<T>, adm: &BranchAdmittance<T>, k: T) -> Result<FlowResult<T>> {
    check_frequency(op, adm)?;
    if !op.frequency.is_dc() {
        return Err(Error::InvalidOperatingPoint("DC flow requires f = 0".into()));
    }
    if op.theta_od != T::zero() {
        return Err(Error::InvalidOperatingPoint("angle difference must be zero at DC".into()));
    }
    let g = adm.g_series;
    if !g.is_finite() || g <= T::zero() {
        return Err(Error::ZeroResistanceAtDc);
    }
    let p_o = k * (op.v_o * op.v_o * (g + adm.g_shunt_end) - op.v_o * op.v_d * g);
    let p_d = k * (op.v_d * op.v_d * (g + adm.g_shunt_end) - op.v_o * op.v_d * g);
    Ok(FlowResult::new(p_o, T::zero(), p_d, T::zero()))
}

/// Both-end flows, dispatching to [`dc_flow`] at 0 Hz.
pub fn branch_flow<T: Scalar>(op: &OperatingPoint<T>, adm: &BranchAdmittance<T>, k_dc: T) -> Result<FlowResult<T>> {
    if op.frequency.is_dc() {
        return dc_flow(op, adm, k_dc);
    }
    let (p_o, q_o) = origin_flow(op, adm)?;
    let (p_d, q_d) = destination_flow(op, adm)?;
    Ok(FlowResult::new(p_o, q_o, p_d, q_d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintLabel {
    ThermalO,
    ThermalD,
    VOMin,
    VOMax,
    VDMin,
    VDMax,
    AnglePos,
    AngleNeg,
}

impl ConstraintLabel {
    pub const ALL: [ConstraintLabel; 8] = [
        ConstraintLabel::ThermalO,
        ConstraintLabel::ThermalD,
        ConstraintLabel::VOMin,
        ConstraintLabel::VOMax,
        ConstraintLabel::VDMin,
        ConstraintLabel::VDMax,
        ConstraintLabel::AnglePos,
        ConstraintLabel::AngleNeg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintLabel::ThermalO => "THERMAL_O",
            ConstraintLabel::ThermalD => "THERMAL_D",
            ConstraintLabel::VOMin => "V_O_MIN",
            ConstraintLabel::VOMax => "V_O_MAX",
            ConstraintLabel::VDMin => "V_D_MIN",
            ConstraintLabel::VDMax => "V_D_MAX",
            ConstraintLabel::AnglePos => "ANGLE_POS",
            ConstraintLabel::AngleNeg => "ANGLE_NEG",
        }
    }

    pub fn is_thermal(self) -> bool {
        matches!(self, ConstraintLabel::ThermalO | ConstraintLabel::ThermalD)
    }

    pub fn is_angle(self) -> bool {
        matches!(self, ConstraintLabel::AnglePos | ConstraintLabel::AngleNeg)
    }
}

impl fmt::Display for ConstraintLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintStatus<T> {
    pub label: ConstraintLabel,
    pub value: T,
    pub limit: T,
    /// Distance to the limit on the feasible side; negative when violated.
    pub margin: T,
    /// False when the constraint is reported but not enforced
    /// (destination thermal limit in origin-only mode).
    pub enforced: bool,
    pub satisfied: bool,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport<T> {
    pub entries: Vec<ConstraintStatus<T>>,
}

impl<T: Scalar> ConstraintReport<T> {
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| !e.enforced || e.satisfied)
    }

    /// Enforced constraints that hold with equality, in label order.
    pub fn active_set(&self) -> Vec<ConstraintLabel> {
        self.entries
            .iter()
            .filter(|e| e.enforced && e.active)
            .map(|e| e.label)
            .collect()
    }

    pub fn violated(&self) -> Vec<ConstraintLabel> {
        self.entries
            .iter()
            .filter(|e| e.enforced && !e.satisfied)
            .map(|e| e.label)
            .collect()
    }

    pub fn get(&self, label: ConstraintLabel) -> Option<&ConstraintStatus<T>> {
        self.entries.iter().find(|e| e.label == label)
    }
}

/// Evaluates every limit at a solved operating point.
pub fn check_limits<T: Scalar>(
    flow: &FlowResult<T>,
    op: &OperatingPoint<T>,
    lim: &OperatingLimits<T>,
    thermal: ThermalEnforcement,
) -> ConstraintReport<T> {
    let tol = T::lit(ACTIVATION_TOLERANCE);
    let entry = |label, value: T, limit: T, margin: T, enforced| ConstraintStatus {
        label,
        value,
        limit,
        margin,
        enforced,
        satisfied: margin >= -tol,
        active: margin.abs() <= tol,
    };
    use ConstraintLabel::*;
    let entries = vec![
        entry(ThermalO, flow.s_o, lim.s_max, lim.s_max - flow.s_o, true),
        entry(
            ThermalD,
            flow.s_d,
            lim.s_max,
            lim.s_max - flow.s_d,
            thermal.enforces_destination(),
        ),
        entry(VOMin, op.v_o, lim.v_min, op.v_o - lim.v_min, true),
        entry(VOMax, op.v_o, lim.v_max, lim.v_max - op.v_o, true),
        entry(VDMin, op.v_d, lim.v_min, op.v_d - lim.v_min, true),
        entry(VDMax, op.v_d, lim.v_max, lim.v_max - op.v_d, true),
        entry(AnglePos, op.theta_od, lim.theta_max, lim.theta_max - op.theta_od, true),
        entry(AngleNeg, op.theta_od, -lim.theta_max, op.theta_od + lim.theta_max, true),
    ];
    ConstraintReport { entries }
}
