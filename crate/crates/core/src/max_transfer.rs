//! Maximum active power transfer over a branch as a function of frequency.
//!
//! With the origin voltage fixed at 1 p.u. the decision variables are the
//! destination voltage `v_d` and the angle difference `θ`. `P_o` has no
//! stationary point inside the box, so the maximiser lies either at the
//! intersection of two constraint boundaries or at a stationary point along a
//! single boundary. [`max_power_at_freq`] enumerates every such candidate
//! (closed form where possible, bracketed 1-D root finding otherwise), keeps
//! the feasible ones and returns the best.

use crate::error::{Error, Result};
use crate::line_model::{lump_parameters, DistributedLineParams};
use crate::power_flow::{
    branch_flow, check_limits, BranchAdmittance, ConstraintLabel, FlowResult, OperatingLimits, OperatingPoint,
    ShuntPlacement, ThermalEnforcement,
};
use crate::scalar::Scalar;
use crate::units::{Frequency, PerUnitBase};

/// Origin bus voltage used by the transfer problem (p.u.).
pub const ORIGIN_VOLTAGE: f64 = 1.0;

/// Width at which breakpoint bisection stops (Hz).
pub const BREAKPOINT_RESOLUTION_HZ: f64 = 0.01;

/// Relative tolerance when deciding that two sweep values lie on one plateau.
const PLATEAU_TOLERANCE: f64 = 1e-9;

/// Slack applied when screening candidates before clamping to the box.
const SCREEN_SLACK: f64 = 1e-9;

/// Coarse grid samples the oracle refines locally.
const ORACLE_ROUNDS: usize = 60;
const ORACLE_SEEDS: usize = 16;

/// Samples per 1-D bracket scan along a constraint curve.
const SCAN_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxTransferPoint<T> {
    pub frequency: Frequency<T>,
    pub p_max: T,
    pub v_d_star: T,
    /// rad
    pub theta_star: T,
    pub flow: FlowResult<T>,
    pub active_set: Vec<ConstraintLabel>,
    pub region_id: u8,
}

/// Classifies an optimum into the five operating regions.
///
/// 1 angle-limited, 2 angle and thermal, 3 thermal (or any other single
/// boundary), 4 lower voltage limit, 5 DC.
pub fn region_of(active_set: &[ConstraintLabel], dc: bool) -> u8 {
    if dc {
        return 5;
    }
    let has = |pred: fn(ConstraintLabel) -> bool| active_set.iter().any(|&l| pred(l));
    let angle = has(ConstraintLabel::is_angle);
    let thermal = has(ConstraintLabel::is_thermal);
    if active_set.contains(&ConstraintLabel::VDMin) {
        4
    } else if angle && thermal {
        2
    } else if angle {
        1
    } else {
        3
    }
}

fn finish<T: Scalar>(
    adm: &BranchAdmittance<T>,
    lim: &OperatingLimits<T>,
    thermal: ThermalEnforcement,
    v_d: T,
    theta: T,
) -> Result<MaxTransferPoint<T>> {
    let op = OperatingPoint::new(T::lit(ORIGIN_VOLTAGE), v_d, theta, adm.frequency)?;
    let flow = branch_flow(&op, adm, lim.k_dc)?;
    let report = check_limits(&flow, &op, lim, thermal);
    let active_set = report.active_set();
    Ok(MaxTransferPoint {
        frequency: adm.frequency,
        p_max: flow.p_o,
        v_d_star: v_d,
        theta_star: theta,
        flow,
        region_id: region_of(&active_set, adm.frequency.is_dc()),
        active_set,
    })
}

type Vec2<T> = (T, T);

fn wrap_angle<T: Scalar>(x: T) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let mut y = x % two_pi;
    if y > T::PI() {
        y = y - two_pi;
    } else if y <= -T::PI() {
        y = y + two_pi;
    }
    y
}

/// Intersections of the circle `(center, radius)` with the circle of radius
/// `s` about the origin; index 0 and 1 are the two continuous branches.
fn circle_origin_intersections<T: Scalar>(center: Vec2<T>, radius: T, s: T) -> Option<[Vec2<T>; 2]> {
    let d = center.0.hypot(center.1);
    if d <= T::zero() || radius <= T::zero() {
        return None;
    }
    // distance from `center` towards the origin to the chord midpoint
    let a = (radius * radius - s * s + d * d) / (T::lit(2.0) * d);
    let h2 = radius * radius - a * a;
    if h2 < T::zero() {
        return None;
    }
    let h = h2.sqrt();
    let e = (-center.0 / d, -center.1 / d);
    let mid = (center.0 + a * e.0, center.1 + a * e.1);
    let perp = (-e.1, e.0);
    Some([
        (mid.0 + h * perp.0, mid.1 + h * perp.1),
        (mid.0 - h * perp.0, mid.1 - h * perp.1),
    ])
}

/// Real roots of `a x² + b x + c` (or the linear case).
fn quadratic_roots<T: Scalar>(a: T, b: T, c: T) -> Vec<T> {
    let tiny = T::epsilon() * (b.abs() + c.abs() + T::one());
    if a.abs() <= tiny {
        if b.abs() <= T::epsilon() {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // numerically stable pair
    let q = -(b + b.signum() * sq) / T::lit(2.0);
    let mut roots = Vec::with_capacity(2);
    if q != T::zero() {
        roots.push(c / q);
    }
    roots.push(q / a);
    roots
}

/// Bisection on a bracketed sign change of `g` over `[lo, hi]`.
pub(crate) fn bisect<T: Scalar>(mut lo: T, mut hi: T, mut g_lo: T, g: impl Fn(T) -> T, width: T) -> T {
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = (lo + hi) / T::lit(2.0);
        let g_mid = g(mid);
        if g_mid == T::zero() {
            return mid;
        }
        if (g_mid < T::zero()) == (g_lo < T::zero()) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// All sign changes of `g` on `[lo, hi]` found on a uniform scan and refined
/// by bisection. Non-finite samples break brackets.
fn scan_roots<T: Scalar>(lo: T, hi: T, g: impl Fn(T) -> T) -> Vec<T> {
    let n = SCAN_SAMPLES;
    let step = (hi - lo) / T::lit(n as f64);
    let width = T::epsilon() * T::lit(16.0) * (hi.abs() + T::one());
    let mut roots = Vec::new();
    let mut prev: Option<(T, T)> = None;
    for i in 0..=n {
        let x = if i == n { hi } else { lo + step * T::lit(i as f64) };
        let y = g(x);
        if !y.is_finite() {
            prev = None;
            continue;
        }
        if y == T::zero() {
            roots.push(x);
        } else if let Some((xp, yp)) = prev {
            if yp != T::zero() && (yp < T::zero()) != (y < T::zero()) {
                roots.push(bisect(xp, x, yp, &g, width));
            }
        }
        prev = Some((x, y));
    }
    roots
}

/// Local maxima of `g` on `[lo, hi]` found on a uniform scan and refined by
/// golden-section search. Non-finite samples count as missing.
fn scan_maxima<T: Scalar>(lo: T, hi: T, g: impl Fn(T) -> T) -> Vec<T> {
    let n = SCAN_SAMPLES;
    let step = (hi - lo) / T::lit(n as f64);
    let xs: Vec<T> = (0..=n)
        .map(|i| if i == n { hi } else { lo + step * T::lit(i as f64) })
        .collect();
    let ys: Vec<T> = xs.iter().map(|&x| g(x)).collect();
    let mut out = Vec::new();
    for i in 1..n {
        let (a, b, c) = (ys[i - 1], ys[i], ys[i + 1]);
        if a.is_finite() && b.is_finite() && c.is_finite() && b >= a && b >= c {
            out.push(golden_section_max(xs[i - 1], xs[i + 1], &g));
        }
    }
    out
}

pub(crate) fn golden_section_max<T: Scalar>(mut a: T, mut b: T, g: impl Fn(T) -> T) -> T {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    let width = T::epsilon().sqrt() * (a.abs() + b.abs() + T::one()) * T::lit(1e-3);
    for _ in 0..200 {
        if (b - a).abs() <= width {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    (a + b) / T::lit(2.0)
}

/// Circle geometry of both bus injections for fixed origin voltage.
struct Geometry<T> {
    v_o: T,
    /// |Y|
    y_mag: T,
    /// arg(Y)
    y_arg: T,
    /// (G + Gsh, −(B + Bsh)); the circle centres are `v²` times this.
    k: Vec2<T>,
}

impl<T: Scalar> Geometry<T> {
    fn new(adm: &BranchAdmittance<T>) -> Self {
        Self {
            v_o: T::lit(ORIGIN_VOLTAGE),
            y_mag: adm.g_series.hypot(adm.b_series),
            y_arg: adm.b_series.atan2(adm.g_series),
            k: (adm.g_series + adm.g_shunt_end, -(adm.b_series + adm.b_shunt_end)),
        }
    }

    fn center_o(&self) -> Vec2<T> {
        let v2 = self.v_o * self.v_o;
        (v2 * self.k.0, v2 * self.k.1)
    }

    fn center_d(&self, v_d: T) -> Vec2<T> {
        let v2 = v_d * v_d;
        (v2 * self.k.0, v2 * self.k.1)
    }

    fn radius(&self, v_d: T) -> T {
        self.v_o * v_d * self.y_mag
    }

    fn origin(&self, v_d: T, theta: T) -> Vec2<T> {
        let c = self.center_o();
        let r = self.radius(v_d);
        let (s, co) = (theta - self.y_arg).sin_cos();
        (c.0 - r * co, c.1 - r * s)
    }

    fn destination(&self, v_d: T, theta: T) -> Vec2<T> {
        let c = self.center_d(v_d);
        let r = self.radius(v_d);
        let (s, co) = (-theta - self.y_arg).sin_cos();
        (c.0 - r * co, c.1 - r * s)
    }

    /// Angle placing the origin injection at `p` on the `v_d` circle.
    fn theta_for_origin(&self, p: Vec2<T>) -> T {
        let c = self.center_o();
        wrap_angle((c.1 - p.1).atan2(c.0 - p.0) + self.y_arg)
    }

    fn theta_for_destination(&self, v_d: T, p: Vec2<T>) -> T {
        let c = self.center_d(v_d);
        wrap_angle(-(c.1 - p.1).atan2(c.0 - p.0) - self.y_arg)
    }

    /// θ on branch `branch` where the origin `v_d` circle meets |S_o| = s.
    fn origin_thermal_theta(&self, v_d: T, s: T, branch: usize) -> Option<T> {
        circle_origin_intersections(self.center_o(), self.radius(v_d), s)
            .map(|pts| self.theta_for_origin(pts[branch]))
    }

    fn destination_thermal_theta(&self, v_d: T, s: T, branch: usize) -> Option<T> {
        circle_origin_intersections(self.center_d(v_d), self.radius(v_d), s)
            .map(|pts| self.theta_for_destination(v_d, pts[branch]))
    }
}

fn norm<T: Scalar>(p: Vec2<T>) -> T {
    p.0.hypot(p.1)
}

/// Maximum `P_o` at one frequency with `V_o = 1` by active-set enumeration.
pub fn max_power_at_freq<T: Scalar>(
    adm: &BranchAdmittance<T>,
    lim: &OperatingLimits<T>,
    thermal: ThermalEnforcement,
) -> Result<MaxTransferPoint<T>> {
    if adm.frequency.is_dc() {
        return dc_max_power(adm, lim, thermal);
    }
    let geo = Geometry::new(adm);
    let s = lim.s_max;
    let (v_lo, v_hi, th) = (lim.v_min, lim.v_max, lim.theta_max);
    let both = thermal.enforces_destination();

    let mut cand: Vec<(T, T)> = Vec::new();
    let volts = if v_lo == v_hi { vec![v_lo] } else { vec![v_lo, v_hi] };
    let angles = if th == T::zero() { vec![T::zero()] } else { vec![-th, th] };

    // vertices of the box
    for &v in &volts {
        for &a in &angles {
            cand.push((v, a));
        }
    }
    // voltage edge, free angle: P_o peaks where cos(θ − arg Y) = −1
    for &v in &volts {
        cand.push((v, wrap_angle(geo.y_arg + T::PI())));
    }
    // origin thermal alone: the injection sits at (S, 0)
    {
        let c = geo.center_o();
        let d = (c.0 - s, c.1);
        if geo.y_mag > T::zero() {
            let v = norm(d) / (geo.v_o * geo.y_mag);
            cand.push((v, geo.theta_for_origin((s, T::zero()))));
        }
    }
    // origin thermal with a voltage bound
    for &v in &volts {
        for b in 0..2 {
            if let Some(t) = geo.origin_thermal_theta(v, s, b) {
                cand.push((v, t));
            }
        }
    }
    // origin thermal with an angle bound: |c − v·u|² = S²
    for &a in &angles {
        let c = geo.center_o();
        let (sn, co) = (a - geo.y_arg).sin_cos();
        let u = (geo.v_o * geo.y_mag * co, geo.v_o * geo.y_mag * sn);
        let qa = u.0 * u.0 + u.1 * u.1;
        let qb = -T::lit(2.0) * (c.0 * u.0 + c.1 * u.1);
        let qc = c.0 * c.0 + c.1 * c.1 - s * s;
        for v in quadratic_roots(qa, qb, qc) {
            cand.push((v, a));
        }
    }
    if both {
        // destination thermal with a voltage bound
        for &v in &volts {
            for b in 0..2 {
                if let Some(t) = geo.destination_thermal_theta(v, s, b) {
                    cand.push((v, t));
                }
            }
        }
        if v_lo < v_hi {
            // destination thermal with an angle bound
            for &a in &angles {
                let g = |v: T| norm(geo.destination(v, a)) - s;
                for v in scan_roots(v_lo, v_hi, g) {
                    cand.push((v, a));
                }
            }
            for b in 0..2 {
                // destination thermal alone: stationary P_o along the curve
                let along = |v: T| match geo.destination_thermal_theta(v, s, b) {
                    Some(t) => geo.origin(v, t).0,
                    None => T::neg_infinity(),
                };
                for v in scan_maxima(v_lo, v_hi, along) {
                    if let Some(t) = geo.destination_thermal_theta(v, s, b) {
                        cand.push((v, t));
                    }
                }
                // both thermal limits at once
                let cross = |v: T| match geo.origin_thermal_theta(v, s, b) {
                    Some(t) => norm(geo.destination(v, t)) - s,
                    None => T::nan(),
                };
                for v in scan_roots(v_lo, v_hi, cross) {
                    if let Some(t) = geo.origin_thermal_theta(v, s, b) {
                        cand.push((v, t));
                    }
                }
            }
        }
    }

    let slack = T::lit(SCREEN_SLACK);
    let s_slack = s * (T::one() + slack) + slack;
    let mut best: Option<(T, T, T)> = None;
    for (v, t) in cand {
        if !v.is_finite() || !t.is_finite() {
            continue;
        }
        if v < v_lo - slack || v > v_hi + slack || t.abs() > th + slack {
            continue;
        }
        let v = v.max(v_lo).min(v_hi);
        let t = t.max(-th).min(th);
        let po = geo.origin(v, t);
        if norm(po) > s_slack {
            continue;
        }
        if both && norm(geo.destination(v, t)) > s_slack {
            continue;
        }
        if best.is_none_or(|(p, _, _)| po.0 > p) {
            best = Some((po.0, v, t));
        }
    }
    let (_, v, t) = best.ok_or(Error::Infeasible {
        hertz: adm.frequency.hertz().as_f64(),
    })?;
    finish(adm, lim, thermal, v, t)
}

/// Maximum DC transfer: `P_o` falls linearly with `v_d`, so the optimum is
/// the lowest admissible `v_d` unless a thermal bound cuts in first.
pub fn dc_max_power<T: Scalar>(
    adm: &BranchAdmittance<T>,
    lim: &OperatingLimits<T>,
    thermal: ThermalEnforcement,
) -> Result<MaxTransferPoint<T>> {
    if !adm.frequency.is_dc() {
        return Err(Error::InvalidOperatingPoint("DC maximum requires f = 0".into()));
    }
    let g = adm.g_series;
    if !g.is_finite() || g <= T::zero() {
        return Err(Error::ZeroResistanceAtDc);
    }
    let k = lim.k_dc;
    let v_o = T::lit(ORIGIN_VOLTAGE);
    let gt = g + adm.g_shunt_end;
    let s = lim.s_max;
    let p_o = |v: T| k * (v_o * v_o * gt - v_o * v * g);
    let p_d = |v: T| k * (v * v * gt - v_o * v * g);

    let mut cand = vec![lim.v_min, lim.v_max];
    for sign in [T::one(), -T::one()] {
        cand.push((v_o * v_o * gt - sign * s / k) / (v_o * g));
        cand.extend(quadratic_roots(gt, -v_o * g, -sign * s / k));
    }
    let slack = T::lit(SCREEN_SLACK);
    let s_slack = s * (T::one() + slack) + slack;
    let mut best: Option<(T, T)> = None;
    for v in cand {
        if !v.is_finite() || v < lim.v_min - slack || v > lim.v_max + slack {
            continue;
        }
        let v = v.max(lim.v_min).min(lim.v_max);
        if p_o(v).abs() > s_slack {
            continue;
        }
        if thermal.enforces_destination() && p_d(v).abs() > s_slack {
            continue;
        }
        if best.is_none_or(|(p, _)| p_o(v) > p) {
            best = Some((p_o(v), v));
        }
    }
    let (_, v) = best.ok_or(Error::Infeasible { hertz: 0.0 })?;
    finish(adm, lim, thermal, v, T::zero())
}

/// Brute-force maximiser over a `resolution × resolution` grid of
/// `(v_d, θ)`, followed by local grid refinement around the best feasible
/// samples. Independent of the enumeration in
/// [`max_power_at_freq`]; meant for verification.
pub fn grid_oracle<T: Scalar>(
    adm: &BranchAdmittance<T>,
    lim: &OperatingLimits<T>,
    thermal: ThermalEnforcement,
    resolution: usize,
) -> Result<MaxTransferPoint<T>> {
    let n = resolution.max(2);
    let f = adm.frequency;
    let v_o = T::lit(ORIGIN_VOLTAGE);
    let eval = |v: T, t: T| -> Option<T> {
        let op = OperatingPoint::new(v_o, v, t, f).ok()?;
        let flow = branch_flow(&op, adm, lim.k_dc).ok()?;
        check_limits(&flow, &op, lim, thermal)
            .all_satisfied()
            .then_some(flow.p_o)
    };
    let th_max = if f.is_dc() { T::zero() } else { lim.theta_max };
    let axis = |lo: T, hi: T, m: usize, i: usize| {
        if m <= 1 {
            lo
        } else {
            lo + (hi - lo) * T::lit(i as f64) / T::lit((m - 1) as f64)
        }
    };

    let n_theta = if th_max == T::zero() { 1 } else { n };
    let mut coarse: Vec<(T, T, T)> = Vec::new();
    for i in 0..n {
        let v = axis(lim.v_min, lim.v_max, n, i);
        for j in 0..n_theta {
            let t = axis(-th_max, th_max, n_theta, j);
            if let Some(p) = eval(v, t) {
                coarse.push((p, v, t));
            }
        }
    }
    if coarse.is_empty() {
        return Err(Error::Infeasible {
            hertz: f.hertz().as_f64(),
        });
    }
    coarse.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    coarse.truncate(ORACLE_SEEDS);

    // local refinement around each of the best coarse samples
    let cell_v = (lim.v_max - lim.v_min) / T::lit((n - 1) as f64);
    let cell_t = T::lit(2.0) * th_max / T::lit((n - 1) as f64);
    const SUB: usize = 15;
    let sub_t = if th_max == T::zero() { 1 } else { SUB };
    let mut best = coarse[0];
    for &seed in &coarse {
        let mut local = seed;
        let (mut dv, mut dt) = (cell_v * T::lit(1.5), cell_t * T::lit(1.5));
        // pattern search: keep the window while the best sample keeps moving,
        // contract once it settles
        let mut rounds = 0;
        while rounds < ORACLE_ROUNDS && dv > cell_v * T::lit(1e-6) {
            rounds += 1;
            let start = local;
            let (v_lo, v_hi) = ((local.1 - dv).max(lim.v_min), (local.1 + dv).min(lim.v_max));
            let (t_lo, t_hi) = ((local.2 - dt).max(-th_max), (local.2 + dt).min(th_max));
            let mut rows: Vec<Vec<Option<T>>> = Vec::with_capacity(SUB);
            for i in 0..SUB {
                let v = axis(v_lo, v_hi, SUB, i);
                let row: Vec<Option<T>> = (0..sub_t).map(|j| eval(v, axis(t_lo, t_hi, sub_t, j))).collect();
                for (j, p) in row.iter().enumerate() {
                    if let Some(p) = *p {
                        if p > local.0 {
                            local = (p, v, axis(t_lo, t_hi, sub_t, j));
                        }
                    }
                }
                rows.push(row);
            }
            // the optimum usually sits on the feasibility boundary, which a
            // lattice only brushes; walk each lattice edge that crosses it
            let mut edge = |a: (T, T), b: (T, T)| {
                if let Some((p, v, t)) = boundary_on_segment(&eval, a, b) {
                    if p > local.0 {
                        local = (p, v, t);
                    }
                }
            };
            for i in 0..SUB {
                for j in 0..sub_t {
                    let here = (axis(v_lo, v_hi, SUB, i), axis(t_lo, t_hi, sub_t, j));
                    let feasible = rows[i][j].is_some();
                    if j + 1 < sub_t && rows[i][j + 1].is_some() != feasible {
                        let next = (here.0, axis(t_lo, t_hi, sub_t, j + 1));
                        if feasible { edge(here, next) } else { edge(next, here) }
                    }
                    if i + 1 < SUB && rows[i + 1][j].is_some() != feasible {
                        let next = (axis(v_lo, v_hi, SUB, i + 1), here.1);
                        if feasible { edge(here, next) } else { edge(next, here) }
                    }
                }
            }
            if local.1 == start.1 && local.2 == start.2 {
                dv = dv * T::lit(0.5);
                dt = dt * T::lit(0.5);
            }
        }
        if local.0 > best.0 {
            best = local;
        }
    }
    let (_, bv, bt) = best;
    finish(adm, lim, thermal, bv, bt)
}

/// Last feasible point on the segment from feasible `a` to infeasible `b`.
fn boundary_on_segment<T: Scalar>(
    eval: &impl Fn(T, T) -> Option<T>,
    a: (T, T),
    b: (T, T),
) -> Option<(T, T, T)> {
    let (mut lo, mut hi) = (T::zero(), T::one());
    let at = |s: T| (a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s);
    for _ in 0..48 {
        let mid = (lo + hi) * T::lit(0.5);
        let (v, t) = at(mid);
        if eval(v, t).is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (v, t) = at(lo);
    eval(v, t).map(|p| (p, v, t))
}

/// An active-set change located between two sweep points.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoint<T> {
    pub frequency: T,
    /// Region on the lower-frequency side.
    pub region_below: u8,
    /// Region on the higher-frequency side.
    pub region_above: u8,
    pub active_below: Vec<ConstraintLabel>,
    pub active_above: Vec<ConstraintLabel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    /// Ascending in frequency; includes the DC point when the range starts at 0.
    pub points: Vec<MaxTransferPoint<T>>,
    /// Ascending in frequency.
    pub breakpoints: Vec<Breakpoint<T>>,
    pub dc_point: Option<MaxTransferPoint<T>>,
    /// Frequency below which the AC maximum first exceeds the DC maximum
    /// when walking down from the top of the range.
    pub crossover_hz: Option<T>,
}

impl<T: Scalar> SweepResult<T> {
    /// Region ids in order of decreasing frequency with repeats collapsed.
    pub fn region_sequence_descending(&self) -> Vec<u8> {
        let mut seq: Vec<u8> = Vec::new();
        for p in self.points.iter().rev() {
            if seq.last() != Some(&p.region_id) {
                seq.push(p.region_id);
            }
        }
        seq
    }
}

/// Everything needed to evaluate the transfer problem at any frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferStudy<T> {
    pub line: DistributedLineParams<T>,
    pub base: PerUnitBase<T>,
    pub limits: OperatingLimits<T>,
    pub thermal: ThermalEnforcement,
    pub shunt: ShuntPlacement,
}

impl<T: Scalar> TransferStudy<T> {
    pub fn admittance(&self, f: Frequency<T>) -> Result<BranchAdmittance<T>> {
        BranchAdmittance::from_branch(&lump_parameters(&self.line, f), &self.base, self.shunt)
    }

    pub fn max_power(&self, f: Frequency<T>) -> Result<MaxTransferPoint<T>> {
        max_power_at_freq(&self.admittance(f)?, &self.limits, self.thermal)
    }

    pub fn grid_oracle(&self, f: Frequency<T>, resolution: usize) -> Result<MaxTransferPoint<T>> {
        grid_oracle(&self.admittance(f)?, &self.limits, self.thermal, resolution)
    }

    pub fn sweep(&self, f_min: T, f_max: T, step: T) -> Result<SweepResult<T>> {
        sweep(|f| self.admittance(f), &self.limits, self.thermal, f_min, f_max, step)
    }

    pub fn optimal_frequency(&self, result: &SweepResult<T>) -> Result<(T, T)> {
        optimal_frequency(result, |f| self.max_power(f))
    }

    /// Frequency at which the angle- and voltage-limited optimum first
    /// reaches the origin thermal limit, searched on `[lo, hi]`.
    pub fn thermal_onset_frequency(&self, lo: T, hi: T) -> Result<Option<T>> {
        let s_o = |f: T| -> Result<T> {
            let freq = Frequency::new(f)?;
            let adm = self.admittance(freq)?;
            let op = OperatingPoint::new(T::lit(ORIGIN_VOLTAGE), self.limits.v_max, self.limits.theta_max, freq)?;
            Ok(branch_flow(&op, &adm, self.limits.k_dc)?.s_o - self.limits.s_max)
        };
        let (g_lo, g_hi) = (s_o(lo)?, s_o(hi)?);
        if (g_lo < T::zero()) == (g_hi < T::zero()) {
            return Ok(None);
        }
        let width = T::lit(1e-9) * (hi.abs() + T::one());
        Ok(Some(bisect(lo, hi, g_lo, |f| s_o(f).unwrap_or(T::nan()), width)))
    }
}

fn frequency_grid<T: Scalar>(f_min: T, f_max: T, step: T) -> Vec<T> {
    let span = (f_max - f_min) / step;
    let n = (span + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    let mut grid: Vec<T> = (0..=n).map(|i| f_min + step * T::lit(i as f64)).collect();
    let last = *grid.last().unwrap();
    if (f_max - last).abs() > step * T::lit(1e-6) {
        grid.push(f_max);
    } else {
        *grid.last_mut().unwrap() = f_max;
    }
    grid
}

/// Sweeps `[f_min, f_max]`, refines active-set transitions and finds the
/// AC/DC crossover.
pub fn sweep<T: Scalar, F>(
    admittance_at: F,
    lim: &OperatingLimits<T>,
    thermal: ThermalEnforcement,
    f_min: T,
    f_max: T,
    step: T,
) -> Result<SweepResult<T>>
where
    F: Fn(Frequency<T>) -> Result<BranchAdmittance<T>>,
{
    if !(f_min >= T::zero()) || !(f_max >= f_min) || !(step > T::zero()) {
        return Err(crate::error::invalid("frequency range", "need 0 <= f_min <= f_max and step > 0"));
    }
    if !(step > T::zero()) {
        return Err(crate::error::invalid("step", "must be > 0"));
    }
    let solve = |f: T| -> Result<MaxTransferPoint<T>> {
        let freq = Frequency::new(f)?;
        max_power_at_freq(&admittance_at(freq)?, lim, thermal)
    };

    let points = frequency_grid(f_min, f_max, step)
        .into_iter()
        .map(&solve)
        .collect::<Result<Vec<_>>>()?;

    let dc_point = if f_min == T::zero() {
        Some(points[0].clone())
    } else {
        solve(T::zero()).ok()
    };

    let mut breakpoints = Vec::new();
    for pair in points.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        if lo.frequency.is_dc() || lo.active_set == hi.active_set {
            continue;
        }
        let f = locate_transition(solve, lo, hi, T::lit(BREAKPOINT_RESOLUTION_HZ))?;
        breakpoints.push(Breakpoint {
            frequency: f,
            region_below: lo.region_id,
            region_above: hi.region_id,
            active_below: lo.active_set.clone(),
            active_above: hi.active_set.clone(),
        });
    }

    let crossover_hz = match &dc_point {
        Some(dc) => crossover(solve, &points, dc.p_max)?,
        None => None,
    };

    Ok(SweepResult {
        points,
        breakpoints,
        dc_point,
        crossover_hz,
    })
}

/// Bisects on the active set between two solved points until the bracket is
/// narrower than `width`; returns the bracket midpoint.
pub fn locate_transition<T: Scalar>(
    solve: impl Fn(T) -> Result<MaxTransferPoint<T>>,
    lo: &MaxTransferPoint<T>,
    hi: &MaxTransferPoint<T>,
    width: T,
) -> Result<T> {
    let (mut a, mut b) = (lo.frequency.hertz(), hi.frequency.hertz());
    while b - a > width {
        let mid = (a + b) / T::lit(2.0);
        if solve(mid)?.active_set == lo.active_set {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a + b) / T::lit(2.0))
}

fn crossover<T: Scalar>(
    solve: impl Fn(T) -> Result<MaxTransferPoint<T>>,
    points: &[MaxTransferPoint<T>],
    dc_value: T,
) -> Result<Option<T>> {
    let ac: Vec<&MaxTransferPoint<T>> = points.iter().filter(|p| !p.frequency.is_dc()).collect();
    let Some(top) = ac.last() else {
        return Ok(None);
    };
    if top.p_max >= dc_value {
        return Ok(None);
    }
    for w in ac.windows(2).rev() {
        let (lo, hi) = (w[0], w[1]);
        if lo.p_max >= dc_value {
            let g = |f: T| solve(f).map(|p| p.p_max - dc_value).unwrap_or(T::nan());
            let width = T::lit(1e-6);
            let f = bisect(lo.frequency.hertz(), hi.frequency.hertz(), lo.p_max - dc_value, g, width);
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// Lowest frequency attaining the sweep maximum.
///
/// On a plateau the lower edge is refined by bisection between the first
/// plateau point and its lower neighbour; an isolated interior peak is
/// refined by golden-section search over its two neighbours.
pub fn optimal_frequency<T: Scalar>(
    result: &SweepResult<T>,
    solve: impl Fn(Frequency<T>) -> Result<MaxTransferPoint<T>>,
) -> Result<(T, T)> {
    let pts = &result.points;
    let Some(best) = pts.iter().map(|p| p.p_max).reduce(T::max) else {
        return Err(crate::error::invalid("sweep", "no points"));
    };
    let tol = T::lit(PLATEAU_TOLERANCE) * (best.abs() + T::one());
    let on_top = |p: T| p >= best - tol;
    let i = pts.iter().position(|p| on_top(p.p_max)).unwrap();
    let here = &pts[i];
    if i == 0 || pts[i - 1].frequency.is_dc() {
        return Ok((here.frequency.hertz(), here.p_max));
    }
    let lower = pts[i - 1].frequency.hertz();
    let eval = |f: T| -> T {
        Frequency::new(f)
            .and_then(&solve)
            .map(|p| p.p_max)
            .unwrap_or(T::neg_infinity())
    };
    let plateau = pts.get(i + 1).is_some_and(|p| on_top(p.p_max));
    if plateau || i + 1 == pts.len() {
        let (mut a, mut b) = (lower, here.frequency.hertz());
        while b - a > T::lit(BREAKPOINT_RESOLUTION_HZ) {
            let mid = (a + b) / T::lit(2.0);
            if on_top(eval(mid)) {
                b = mid;
            } else {
                a = mid;
            }
        }
        return Ok((b, eval(b).max(here.p_max)));
    }
    let upper = pts[i + 1].frequency.hertz();
    let f = golden_section_max(lower, upper, eval);
    let p = eval(f);
    if p >= here.p_max {
        Ok((f, p))
    } else {
        Ok((here.frequency.hertz(), here.p_max))
    }
}

/// Bisection on the line length so that the thermal onset (angle and upper
/// voltage limit binding, |S_o| reaching S_max) lands on `target_hz`.
///
/// Returns `None` if the onset does not bracket the target over
/// `[len_lo, len_hi]`.
pub fn calibrate_length_for_thermal_onset<T: Scalar>(
    study: &TransferStudy<T>,
    target_hz: T,
    len_lo: T,
    len_hi: T,
) -> Result<Option<T>> {
    let search_hi = target_hz * T::lit(4.0);
    let search_lo = target_hz / T::lit(8.0);
    let onset = |len: T| -> Result<T> {
        let s = TransferStudy {
            line: study.line.with_length(len)?,
            ..*study
        };
        Ok(s.thermal_onset_frequency(search_lo, search_hi)?.unwrap_or(T::nan()) - target_hz)
    };
    let (g_lo, g_hi) = (onset(len_lo)?, onset(len_hi)?);
    if !g_lo.is_finite() || !g_hi.is_finite() || (g_lo < T::zero()) == (g_hi < T::zero()) {
        return Ok(None);
    }
    let width = T::lit(1e-6);
    Ok(Some(bisect(len_lo, len_hi, g_lo, |l| onset(l).unwrap_or(T::nan()), width)))
}
