use std::fmt::Write as _;

use anyhow::Context;
use freqflow::line_model::{
    characteristic_impedance, gamma_ell_magnitude, lump_parameters, pi_model_error, propagation_constant,
};
use freqflow::max_transfer::MaxTransferPoint;
use freqflow::power_circle::{circle, dc_segment, feasible_region, FeasibleRegion};
use freqflow::power_flow::{branch_flow, check_limits, ConstraintLabel, OperatingPoint};
use freqflow::{Hz, Study};
use serde_json::json;

use crate::config::StudyConfig;
use crate::output::{num, Table};
use crate::Failure;

pub struct Output {
    pub main: String,
    /// Secondary JSON document (max-power breakpoints).
    pub sidecar: Option<String>,
    /// Non-zero exit status requested by the command itself.
    pub status: i32,
}

impl Output {
    fn text(main: String) -> Self {
        Self {
            main,
            sidecar: None,
            status: 0,
        }
    }
}

fn hz(f: f64) -> Result<Hz, Failure> {
    Hz::new(f).map_err(|e| Failure::Usage(anyhow::anyhow!("--freq: {e}")))
}

fn grid(f_min: f64, f_max: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(f_min >= 0.0) || !(f_max >= f_min) || !(step > 0.0) {
        return Err(Failure::Usage(anyhow::anyhow!(
            "frequency range needs 0 <= freq-min <= freq-max and freq-step > 0"
        )));
    }
    let n = ((f_max - f_min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| f_min + step * i as f64).collect())
}

fn labels(set: &[ConstraintLabel]) -> String {
    if set.is_empty() {
        return "NONE".into();
    }
    set.iter().map(|l| l.as_str()).collect::<Vec<_>>().join("+")
}

pub fn line_info(cfg: &StudyConfig, f: f64, lengths: Option<&[f64]>) -> Result<Output, Failure> {
    let freq = hz(f)?;
    let base = cfg.base()?;
    let line = cfg.line()?;
    let lengths = lengths.map(<[f64]>::to_vec).unwrap_or_else(|| vec![line.length_km]);
    let mut out = String::new();
    if let Some(note) = &cfg.note {
        writeln!(out, "note = {note}\n").unwrap();
    }
    for (i, &len) in lengths.iter().enumerate() {
        let line = line
            .with_length(len)
            .map_err(|e| Failure::Usage(anyhow::anyhow!("--lengths: {e}")))?;
        let branch = lump_parameters(&line, freq);
        let z_pu = base.impedance_to_pu(branch.z_series);
        let y_pu = base.admittance_to_pu(branch.y_shunt_total);
        let gamma = propagation_constant(&line, freq);
        if i > 0 {
            out.push('\n');
        }
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        kv("f_hz", num(f));
        kv("length_km", num(len));
        kv("z_series_ohm", complex(branch.z_series.re, branch.z_series.im));
        kv("y_shunt_total_s", complex(branch.y_shunt_total.re, branch.y_shunt_total.im));
        kv("z_series_pu", complex(z_pu.re, z_pu.im));
        kv("y_shunt_total_pu", complex(y_pu.re, y_pu.im));
        kv("gamma_per_km", complex(gamma.re, gamma.im));
        let gl = gamma * len;
        kv("gamma_ell", complex(gl.re, gl.im));
        kv("gamma_ell_abs", num(gamma_ell_magnitude(&line, freq)));
        match characteristic_impedance(&line, freq) {
            Ok(z0) => {
                kv("z0_ohm", complex(z0.re, z0.im));
                kv("z0_abs_ohm", num(z0.norm()));
                kv("pi_error_pu", num(pi_model_error(&line, freq)?));
            }
            Err(freqflow::Error::DivisionByZeroAdmittance { .. }) => {
                kv("z0_ohm", "undefined (shunt admittance vanishes at this frequency)".into());
                kv("pi_error_pu", "undefined".into());
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Output::text(out))
}

fn complex(re: f64, im: f64) -> String {
    if im < 0.0 {
        format!("{} - j{}", num(re), num(-im))
    } else {
        format!("{} + j{}", num(re), num(im))
    }
}

pub fn pi_error(cfg: &StudyConfig, f_min: f64, f_max: f64, step: f64, lengths: &[f64]) -> Result<Output, Failure> {
    let line = cfg.line()?;
    let freqs = grid(f_min, f_max, step)?;
    let mut lengths = lengths.to_vec();
    lengths.sort_by(f64::total_cmp);
    let mut table = Table::new(&["length_km", "f_hz", "gamma_ell", "pi_error_pu"])?;
    for &len in &lengths {
        let line = line
            .with_length(len)
            .map_err(|e| Failure::Usage(anyhow::anyhow!("--lengths: {e}")))?;
        // the error metric needs Z0, which is undefined at 0 Hz
        for &f in freqs.iter().filter(|&&f| f > 0.0) {
            let freq = hz(f)?;
            table.row([
                num(len),
                num(f),
                num(gamma_ell_magnitude(&line, freq)),
                num(pi_model_error(&line, freq)?),
            ])?;
        }
    }
    Ok(Output::text(table.finish()?))
}

pub fn max_power(study: &Study, f_min: f64, f_max: f64, step: f64) -> Result<Output, Failure> {
    grid(f_min, f_max, step)?;
    let sweep = study.sweep(f_min, f_max, step)?;
    let mut table = Table::new(&["f_hz", "p_max", "v_d_star", "theta_star_deg", "active_set", "region_id"])?;
    for p in &sweep.points {
        table.row(point_row(p))?;
    }
    let (f_opt, p_opt) = study.optimal_frequency(&sweep)?;
    let breakpoints: Vec<_> = sweep
        .breakpoints
        .iter()
        .map(|b| {
            json!({
                "frequency_hz": b.frequency,
                "region_below": b.region_below,
                "region_above": b.region_above,
                "active_below": b.active_below.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
                "active_above": b.active_above.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let sidecar = json!({
        "breakpoints": breakpoints,
        "dc_p_max": sweep.dc_point.as_ref().map(|p| p.p_max),
        "crossover_hz": sweep.crossover_hz,
        "optimal": {"frequency_hz": f_opt, "p_max": p_opt},
        "regions_descending": sweep.region_sequence_descending(),
    });
    Ok(Output {
        main: table.finish()?,
        sidecar: Some(serde_json::to_string_pretty(&sidecar).context("serialise breakpoints")? + "\n"),
        status: 0,
    })
}

fn point_row(p: &MaxTransferPoint<f64>) -> [String; 6] {
    [
        num(p.frequency.hertz()),
        num(p.p_max),
        num(p.v_d_star),
        num(p.theta_star.to_degrees()),
        labels(&p.active_set),
        p.region_id.to_string(),
    ]
}

pub fn power_circle(study: &Study, f: f64, n_vd: usize, n_theta: usize) -> Result<Output, Failure> {
    let freq = hz(f)?;
    let adm = study.admittance(freq)?;
    let lim = &study.limits;
    let v_o = freqflow::max_transfer::ORIGIN_VOLTAGE;
    let mut table = Table::new(&[
        "kind", "index", "v_d", "theta_deg", "p_o", "q_o", "feasible", "center_p", "center_q", "radius",
    ])?;
    let region: FeasibleRegion<f64> = if freq.is_dc() {
        dc_segment(v_o, lim, &adm, lim.k_dc, study.thermal)?
    } else {
        for (i, v_d) in [lim.v_min, lim.v_max].into_iter().enumerate() {
            let c = circle(v_o, v_d, &adm)?;
            table.row([
                "circle".into(),
                i.to_string(),
                num(v_d),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                num(c.center_p),
                num(c.center_q),
                num(c.radius),
            ])?;
        }
        feasible_region(v_o, lim, &adm, n_vd, n_theta, study.thermal)?
    };
    let empty = || String::new();
    for (i, &(p, q)) in region.boundary.iter().enumerate() {
        table.row([
            "boundary".into(),
            i.to_string(),
            empty(),
            empty(),
            num(p),
            num(q),
            "1".into(),
            empty(),
            empty(),
            empty(),
        ])?;
    }
    for (i, s) in region.samples.iter().enumerate() {
        table.row([
            "sample".into(),
            i.to_string(),
            num(s.v_d),
            num(s.theta.to_degrees()),
            num(s.p_o),
            num(s.q_o),
            if s.feasible { "1" } else { "0" }.into(),
            empty(),
            empty(),
            empty(),
        ])?;
    }
    Ok(Output::text(table.finish()?))
}

pub fn check(study: &Study, f: f64, v_o: f64, v_d: f64, theta_deg: f64) -> Result<Output, Failure> {
    let freq = hz(f)?;
    let adm = study.admittance(freq)?;
    let op = OperatingPoint::new(v_o, v_d, theta_deg.to_radians(), freq)?;
    let flow = branch_flow(&op, &adm, study.limits.k_dc)?;
    let report = check_limits(&flow, &op, &study.limits, study.thermal);
    let mut out = String::new();
    for (k, v) in [
        ("f_hz", f),
        ("v_o", v_o),
        ("v_d", v_d),
        ("theta_deg", theta_deg),
        ("p_o", flow.p_o),
        ("q_o", flow.q_o),
        ("p_d", flow.p_d),
        ("q_d", flow.q_d),
        ("s_o", flow.s_o),
        ("s_d", flow.s_d),
    ] {
        writeln!(out, "{k} = {}", num(v)).unwrap();
    }
    out.push('\n');
    let mut table = Table::new(&["constraint", "value", "limit", "margin", "enforced", "satisfied", "active"])?;
    let flag = |b: bool| if b { "1" } else { "0" }.to_string();
    for e in &report.entries {
        let (value, limit) = if e.label.is_angle() {
            (e.value.to_degrees(), e.limit.to_degrees())
        } else {
            (e.value, e.limit)
        };
        let margin = if e.label.is_angle() { e.margin.to_degrees() } else { e.margin };
        table.row([
            e.label.as_str().to_string(),
            num(value),
            num(limit),
            num(margin),
            flag(e.enforced),
            flag(e.satisfied),
            flag(e.active),
        ])?;
    }
    out.push_str(&table.finish()?);
    writeln!(out, "\nactive = {}", labels(&report.active_set())).unwrap();
    let violated = report.violated();
    writeln!(out, "violated = {}", labels(&violated)).unwrap();
    Ok(Output {
        main: out,
        sidecar: None,
        status: if violated.is_empty() { 0 } else { 3 },
    })
}
