//! Power-circle geometry and the feasible `(P_o, Q_o)` region of a branch.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::max_transfer::bisect;
use crate::power_flow::{
    branch_flow, check_limits, dc_flow, BranchAdmittance, ConstraintLabel, OperatingLimits, OperatingPoint,
    ThermalEnforcement,
};
use crate::scalar::Scalar;
use crate::units::Frequency;

pub const DEFAULT_N_VD: usize = 41;
pub const DEFAULT_N_THETA: usize = 721;

/// Locus of origin injections for fixed `v_o`, `v_d` as θ varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCircle<T> {
    pub center_p: T,
    pub center_q: T,
    pub radius: T,
    pub v_o: T,
    pub v_d: T,
    pub frequency: Frequency<T>,
}

impl<T: Scalar> PowerCircle<T> {
    /// Distance of `(p, q)` from the circle.
    pub fn residual(&self, p: T, q: T) -> T {
        ((p - self.center_p).hypot(q - self.center_q) - self.radius).abs()
    }
}

pub fn circle<T: Scalar>(v_o: T, v_d: T, adm: &BranchAdmittance<T>) -> Result<PowerCircle<T>> {
    if adm.frequency.is_dc() {
        return Err(Error::DcNotSupported);
    }
    let v2 = v_o * v_o;
    Ok(PowerCircle {
        center_p: v2 * (adm.g_series + adm.g_shunt_end),
        center_q: -v2 * (adm.b_series + adm.b_shunt_end),
        radius: v_o * v_d * adm.g_series.hypot(adm.b_series),
        v_o,
        v_d,
        frequency: adm.frequency,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSample<T> {
    pub v_d: T,
    /// rad
    pub theta: T,
    pub p_o: T,
    pub q_o: T,
    pub feasible: bool,
    /// Enforced constraints this sample violates; empty when feasible.
    pub violated: Vec<ConstraintLabel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion<T> {
    pub frequency: Frequency<T>,
    pub samples: Vec<RegionSample<T>>,
    /// Closed polyline of `(p_o, q_o)`; the last vertex connects to the first.
    pub boundary: Vec<(T, T)>,
}

impl<T: Scalar> FeasibleRegion<T> {
    /// Feasible point with the largest active power.
    pub fn max_p(&self) -> Option<(T, T)> {
        self.boundary
            .iter()
            .copied()
            .chain(self.samples.iter().filter(|s| s.feasible).map(|s| (s.p_o, s.q_o)))
            .reduce(|a, b| if b.0 > a.0 { b } else { a })
    }

    /// Extent of the region along the Q axis.
    pub fn q_extent(&self) -> T {
        let qs = self
            .boundary
            .iter()
            .map(|b| b.1)
            .chain(self.samples.iter().filter(|s| s.feasible).map(|s| s.q_o));
        let (lo, hi) = qs.fold((T::infinity(), T::neg_infinity()), |(lo, hi), q| (lo.min(q), hi.max(q)));
        if lo > hi {
            T::zero()
        } else {
            hi - lo
        }
    }
}

/// Feasible DC operation: a segment on the `P_o` axis.
pub fn dc_segment<T: Scalar>(
    v_o: T,
    lim: &OperatingLimits<T>,
    adm: &BranchAdmittance<T>,
    k: T,
    thermal: ThermalEnforcement,
) -> Result<FeasibleRegion<T>> {
    if !adm.frequency.is_dc() {
        return Err(Error::InvalidOperatingPoint("DC segment requires f = 0".into()));
    }
    let g = adm.g_series;
    if !g.is_finite() || g <= T::zero() {
        return Err(Error::ZeroResistanceAtDc);
    }
    let f = adm.frequency;
    let gt = g + adm.g_shunt_end;
    let s = lim.s_max;

    let evaluate = |v: T| -> Result<RegionSample<T>> {
        let op = OperatingPoint::new(v_o, v, T::zero(), f)?;
        let flow = dc_flow(&op, adm, k)?;
        let report = check_limits(&flow, &op, lim, thermal);
        Ok(RegionSample {
            v_d: v,
            theta: T::zero(),
            p_o: flow.p_o,
            q_o: flow.q_o,
            feasible: report.all_satisfied(),
            violated: report.violated(),
        })
    };

    // Constraint crossings split [v_min, v_max] into pieces that are either
    // entirely feasible or entirely infeasible.
    let mut nodes = vec![lim.v_min, lim.v_max];
    for sign in [T::one(), -T::one()] {
        nodes.push((v_o * v_o * gt - sign * s / k) / (v_o * g));
        let (a, b, c) = (gt, -v_o * g, -sign * s / k);
        let disc = b * b - T::lit(4.0) * a * c;
        if disc >= T::zero() {
            nodes.push((-b + disc.sqrt()) / (T::lit(2.0) * a));
            nodes.push((-b - disc.sqrt()) / (T::lit(2.0) * a));
        }
    }
    let mut feasible_v: Vec<T> = Vec::new();
    for v in nodes {
        if !v.is_finite() || v < lim.v_min || v > lim.v_max {
            continue;
        }
        if evaluate(v)?.feasible {
            feasible_v.push(v);
        }
    }

    let n = DEFAULT_N_VD;
    let samples = (0..n)
        .map(|i| evaluate(lim.v_min + (lim.v_max - lim.v_min) * T::lit(i as f64) / T::lit((n - 1) as f64)))
        .collect::<Result<Vec<_>>>()?;

    let lo = feasible_v.iter().copied().reduce(T::min);
    let hi = feasible_v.iter().copied().reduce(T::max);
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::EmptyRegion { hertz: 0.0 });
    };
    let p_hi = evaluate(lo)?.p_o;
    let p_lo = evaluate(hi)?.p_o;
    let boundary = if p_lo == p_hi {
        vec![(p_lo, T::zero())]
    } else {
        vec![(p_lo, T::zero()), (p_hi, T::zero())]
    };
    Ok(FeasibleRegion {
        frequency: f,
        samples,
        boundary,
    })
}

/// Samples the `(v_d, θ)` box, flags feasibility and traces the boundary
/// of the feasible set.
///
/// The boundary is a marching-squares contour over the sample lattice (the
/// lattice is padded with infeasible cells so the box edges close the
/// contour). Vertices between a feasible and an infeasible sample are moved
/// onto the constraint boundary by bisection, staying on the feasible side.
pub fn feasible_region<T: Scalar>(
    v_o: T,
    lim: &OperatingLimits<T>,
    adm: &BranchAdmittance<T>,
    n_vd: usize,
    n_theta: usize,
    thermal: ThermalEnforcement,
) -> Result<FeasibleRegion<T>> {
    let f = adm.frequency;
    if f.is_dc() {
        return Err(Error::DcNotSupported);
    }
    if n_vd < 2 || n_theta < 3 {
        return Err(crate::error::invalid("resolution", "need n_vd >= 2 and n_theta >= 3"));
    }
    let vd_at = |i: usize| lim.v_min + (lim.v_max - lim.v_min) * T::lit(i as f64) / T::lit((n_vd - 1) as f64);
    let th_at =
        |j: usize| -lim.theta_max + T::lit(2.0) * lim.theta_max * T::lit(j as f64) / T::lit((n_theta - 1) as f64);

    let evaluate = |v: T, t: T| -> Result<RegionSample<T>> {
        let op = OperatingPoint::new(v_o, v, t, f)?;
        let flow = branch_flow(&op, adm, lim.k_dc)?;
        let report = check_limits(&flow, &op, lim, thermal);
        Ok(RegionSample {
            v_d: v,
            theta: t,
            p_o: flow.p_o,
            q_o: flow.q_o,
            feasible: report.all_satisfied(),
            violated: report.violated(),
        })
    };

    let mut samples = Vec::with_capacity(n_vd * n_theta);
    for i in 0..n_vd {
        for j in 0..n_theta {
            samples.push(evaluate(vd_at(i), th_at(j))?);
        }
    }
    if !samples.iter().any(|s| s.feasible) {
        return Err(Error::EmptyRegion {
            hertz: f.hertz().as_f64(),
        });
    }

    // padded lattice coordinates: (a, b) = (i + 1, j + 1)
    let inside = |a: usize, b: usize| -> Option<usize> {
        (a >= 1 && b >= 1 && a <= n_vd && b <= n_theta).then(|| (a - 1) * n_theta + (b - 1))
    };
    let feasible = |a: usize, b: usize| inside(a, b).is_some_and(|k| samples[k].feasible);

    let loops = march(n_vd + 2, n_theta + 2, &feasible);

    let is_feasible = |v: T, t: T| evaluate(v, t).map(|s| s.feasible).unwrap_or(false);
    let vertex = |e: Edge| -> Result<(T, T)> {
        let (p, q) = e.ends();
        let (inner, outer) = if feasible(p.0, p.1) { (p, q) } else { (q, p) };
        let k = inside(inner.0, inner.1).expect("feasible corner is inside the lattice");
        let s_in = &samples[k];
        let Some(k_out) = inside(outer.0, outer.1) else {
            return Ok((s_in.p_o, s_in.q_o));
        };
        let s_out = &samples[k_out];
        // parameter along inner → outer; the sign encodes feasibility
        let g = |x: T| {
            let v = s_in.v_d + (s_out.v_d - s_in.v_d) * x;
            let t = s_in.theta + (s_out.theta - s_in.theta) * x;
            if is_feasible(v, t) {
                -T::one()
            } else {
                T::one()
            }
        };
        let x = bisect(T::zero(), T::one(), -T::one(), g, T::lit(1e-7));
        let mut x = x - T::lit(1e-7);
        if g(x) > T::zero() {
            x = T::zero();
        }
        let x = x.max(T::zero());
        let v = s_in.v_d + (s_out.v_d - s_in.v_d) * x;
        let t = s_in.theta + (s_out.theta - s_in.theta) * x;
        let s = evaluate(v, t)?;
        Ok((s.p_o, s.q_o))
    };

    let longest = loops.into_iter().max_by_key(|l| l.len()).unwrap_or_default();
    let mut boundary: Vec<(T, T)> = Vec::with_capacity(longest.len());
    for e in longest {
        let p = vertex(e)?;
        if boundary.last() != Some(&p) {
            boundary.push(p);
        }
    }
    if boundary.len() > 1 && boundary.first() == boundary.last() {
        boundary.pop();
    }
    Ok(FeasibleRegion {
        frequency: f,
        samples,
        boundary,
    })
}

/// Lattice edge between `(a, b)` and its neighbour in +a (`along_a`) or +b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Edge {
    a: usize,
    b: usize,
    along_a: bool,
}

impl Edge {
    fn ends(self) -> ((usize, usize), (usize, usize)) {
        if self.along_a {
            ((self.a, self.b), (self.a + 1, self.b))
        } else {
            ((self.a, self.b), (self.a, self.b + 1))
        }
    }
}

/// Marching squares on a binary lattice; returns closed loops as sequences of
/// crossed edges.
fn march(rows: usize, cols: usize, inside: &impl Fn(usize, usize) -> bool) -> Vec<Vec<Edge>> {
    let mut links: BTreeMap<Edge, Vec<Edge>> = BTreeMap::new();
    let mut connect = |x: Edge, y: Edge| {
        links.entry(x).or_default().push(y);
        links.entry(y).or_default().push(x);
    };
    for a in 0..rows - 1 {
        for b in 0..cols - 1 {
            let c = [inside(a, b), inside(a + 1, b), inside(a + 1, b + 1), inside(a, b + 1)];
            let bottom = Edge { a, b, along_a: true };
            let right = Edge {
                a: a + 1,
                b,
                along_a: false,
            };
            let top = Edge {
                a,
                b: b + 1,
                along_a: true,
            };
            let left = Edge { a, b, along_a: false };
            let cut = [c[0] != c[1], c[1] != c[2], c[2] != c[3], c[3] != c[0]];
            let sides = [bottom, right, top, left];
            let crossed: Vec<Edge> = (0..4).filter(|&k| cut[k]).map(|k| sides[k]).collect();
            match crossed.len() {
                2 => connect(crossed[0], crossed[1]),
                4 => {
                    // saddle: feasible diagonal treated as connected
                    if c[0] {
                        connect(bottom, right);
                        connect(top, left);
                    } else {
                        connect(left, bottom);
                        connect(right, top);
                    }
                }
                _ => {}
            }
        }
    }

    let mut seen: BTreeSet<Edge> = BTreeSet::new();
    let mut loops = Vec::new();
    for &start in links.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut path = vec![start];
        seen.insert(start);
        let mut prev = start;
        let mut cur = links[&start][0];
        while cur != start && seen.insert(cur) {
            path.push(cur);
            let next = links[&cur].iter().copied().find(|&e| e != prev).unwrap_or(prev);
            prev = cur;
            cur = next;
        }
        loops.push(path);
    }
    loops
}
