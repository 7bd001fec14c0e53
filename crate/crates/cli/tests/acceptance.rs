//! Acceptance criteria; prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use freqflow::line_model::{
    abcd_exact, abcd_pi, exact_equivalent_pi, gamma_ell_magnitude, lump_parameters, pi_model_error, AbcdMatrix,
};
use freqflow::max_transfer::{calibrate_length_for_thermal_onset, dc_max_power};
use freqflow::power_circle::{circle, dc_segment};
use freqflow::power_flow::{origin_flow, OperatingPoint, ShuntPlacement, ThermalEnforcement};
use freqflow::{Base, Hz, Limits, Line, Study};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/acsr_345kv.json");
const BIN: &str = env!("CARGO_BIN_EXE_freqflow");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn acsr(length_km: f64) -> Line {
    Line::from_datasheet(0.05709, 1.214, 9.497, 0.0, length_km).unwrap()
}

fn hz(f: f64) -> Hz {
    Hz::new(f).unwrap()
}

fn calibrated() -> Study {
    Study {
        line: acsr(300.0),
        base: Base::from_mva_kv(100.0, 345.0).unwrap(),
        limits: Limits::new(9.0, 0.9, 1.1, 40f64.to_radians(), 1.0).unwrap(),
        thermal: ThermalEnforcement::OriginOnly,
        shunt: ShuntPlacement::Total,
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    if took > budget {
        Err(format!("took {took:.2?}, budget {budget:?}"))
    } else {
        Ok(())
    }
}

fn validity_anchor() -> Outcome {
    let g = gamma_ell_magnitude(&acsr(250.0), hz(60.0));
    let msg = format!("|γℓ| = {g:.6} (target 0.321 ± 0.001)");
    if (g - 0.321).abs() <= 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn error_anchor() -> Outcome {
    let e = pi_model_error(&acsr(250.0), hz(60.0)).map_err(|e| e.to_string())?;
    let msg = format!("error = {e:.5e} p.u. (target 2.21e-3 ± 0.05e-3)");
    if (e - 2.21e-3).abs() <= 0.05e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// 1000 random lines and frequencies with |γℓ| < 2.
fn random_set() -> Vec<(Line, Hz)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::with_capacity(1000);
    while out.len() < 1000 {
        let line = Line::from_datasheet(
            rng.gen_range(0.001..0.5),
            rng.gen_range(0.3..3.0),
            rng.gen_range(3.0..30.0),
            if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(1e-9..1e-6) },
            rng.gen_range(10.0..1500.0),
        )
        .unwrap();
        let f = hz(rng.gen_range(0.01..400.0));
        if gamma_ell_magnitude(&line, f) < 2.0 {
            out.push((line, f));
        }
    }
    out
}

fn max_rel_diff(a: &AbcdMatrix<f64>, b: &AbcdMatrix<f64>) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries().iter())
        .map(|(x, y)| (x - y).norm() / x.norm().max(y.norm()))
        .fold(0.0, f64::max)
}

fn equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for (line, f) in random_set() {
        let exact = abcd_exact(&line, f).map_err(|e| e.to_string())?;
        let pi = abcd_pi(&exact_equivalent_pi(&line, f).map_err(|e| e.to_string())?);
        worst = worst.max(max_rel_diff(&exact, &pi));
    }
    within_budget(start, Duration::from_secs(1))?;
    let msg = format!("max relative deviation {worst:.2e} over 1000 cases (limit 1e-9)");
    if worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn reciprocity() -> Outcome {
    let mut worst = 0.0_f64;
    for (line, f) in random_set() {
        let exact = abcd_exact(&line, f).map_err(|e| e.to_string())?;
        let naive = abcd_pi(&lump_parameters(&line, f));
        for m in [exact, naive] {
            worst = worst.max((m.determinant() - 1.0).norm());
        }
    }
    let msg = format!("max |AD − BC − 1| = {worst:.2e} over 1000 cases, both models (limit 1e-9)");
    if worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn monotonicity() -> Outcome {
    for len in [100.0, 250.0, 500.0, 700.0] {
        let line = acsr(len);
        let mut last = 0.0;
        for f in 1..=80 {
            let e = pi_model_error(&line, hz(f as f64)).map_err(|e| e.to_string())?;
            if e < last {
                return Err(format!("{len} km: error decreases at {f} Hz ({last:.3e} -> {e:.3e})"));
            }
            last = e;
        }
    }
    Ok("error non-decreasing on 1..80 Hz for 100, 250, 500, 700 km".into())
}

fn region_structure() -> Outcome {
    let start = Instant::now();
    let sweep = calibrated().sweep(0.0, 60.0, 0.05).map_err(|e| e.to_string())?;
    within_budget(start, Duration::from_secs(10))?;
    let seq = sweep.region_sequence_descending();
    let plateau: Vec<f64> = sweep.points.iter().filter(|p| p.region_id == 3).map(|p| p.p_max).collect();
    let worst = plateau.iter().map(|p| (p - 9.0).abs()).fold(0.0, f64::max);
    let msg = format!("regions (descending f) {seq:?}; plateau {} points, max |p − 9| = {worst:.1e}", plateau.len());
    if seq == [1, 2, 3, 4, 5] && !plateau.is_empty() && worst <= 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn breakpoints() -> Outcome {
    let study = calibrated();
    let len = calibrate_length_for_thermal_onset(&study, 41.24, 250.0, 350.0)
        .map_err(|e| e.to_string())?
        .ok_or("calibration did not bracket the target")?;
    let sweep = study.sweep(0.0, 60.0, 0.05).map_err(|e| e.to_string())?;
    let found: Vec<f64> = sweep.breakpoints.iter().map(|b| b.frequency).collect();
    let mut parts = vec![format!("calibrated length {len:.2} km; using 300 km")];
    let mut ok = found.len() == 3;
    for target in [41.24, 39.79, 15.48] {
        let nearest = found
            .iter()
            .copied()
            .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
        match nearest {
            Some(f) => {
                ok &= (f - target).abs() <= 0.5;
                parts.push(format!("{target} -> {f:.3} ({:+.3} Hz)", f - target));
            }
            None => {
                ok = false;
                parts.push(format!("{target} -> none"));
            }
        }
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn dc_values() -> Outcome {
    let study = calibrated();
    let dc = dc_max_power(&study.admittance(Hz::dc()).map_err(|e| e.to_string())?, &study.limits, study.thermal)
        .map_err(|e| e.to_string())?;
    let sweep = study.sweep(0.0, 60.0, 0.05).map_err(|e| e.to_string())?;
    let cross = sweep.crossover_hz.ok_or("no crossover found")?;
    let msg = format!("dc p_max = {:.4} (6.95 ± 0.01); crossover = {cross:.3} Hz (53 ± 1)", dc.p_max);
    if (dc.p_max - 6.95).abs() <= 0.01 && (cross - 53.0).abs() <= 1.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn oracle() -> Outcome {
    let start = Instant::now();
    let study = calibrated();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = (0.0_f64, 0.0_f64);
    for _ in 0..20 {
        // (0, 60]
        let f = 60.0 - rng.gen_range(0.0..60.0);
        let a = study.max_power(hz(f)).map_err(|e| e.to_string())?.p_max;
        let b = study.grid_oracle(hz(f), 500).map_err(|e| e.to_string())?.p_max;
        if (a - b).abs() >= worst.0 {
            worst = ((a - b).abs(), f);
        }
    }
    within_budget(start, Duration::from_secs(30))?;
    let msg = format!("max |solver − oracle| = {:.2e} at {:.3} Hz over 20 frequencies (limit 1e-3)", worst.0, worst.1);
    if worst.0 <= 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn power_circle_identities() -> Outcome {
    let study = calibrated();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut residual = 0.0_f64;
    for _ in 0..10 {
        let f = hz(rng.gen_range(0.1..80.0));
        let adm = study.admittance(f).map_err(|e| e.to_string())?;
        let v_d = rng.gen_range(0.9..1.1);
        let c = circle(1.0, v_d, &adm).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let op = OperatingPoint::new(1.0, v_d, theta, f).map_err(|e| e.to_string())?;
            let (p, q) = origin_flow(&op, &adm).map_err(|e| e.to_string())?;
            residual = residual.max(c.residual(p, q));
        }
    }
    let r_pu = study.admittance(Hz::dc()).map_err(|e| e.to_string())?.series_resistance();
    let sup = 1.1 / r_pu;
    let mut last = 0.0;
    for i in (1..=800).rev() {
        let adm = study.admittance(hz(i as f64 * 0.1)).map_err(|e| e.to_string())?;
        let r = circle(1.0, 1.1, &adm).map_err(|e| e.to_string())?.radius;
        if r <= last || r >= sup {
            return Err(format!("radius not increasing towards {sup:.4} at {} Hz", i as f64 * 0.1));
        }
        last = r;
    }
    let dc_adm = study.admittance(Hz::dc()).map_err(|e| e.to_string())?;
    let seg = dc_segment(1.0, &study.limits, &dc_adm, 1.0, study.thermal).map_err(|e| e.to_string())?;
    let q_extent = seg.q_extent();
    let msg = format!(
        "max residual {residual:.1e}; radius increasing as f↓ to {last:.4} < sup {sup:.4}; DC Q extent {q_extent}"
    );
    if residual <= 1e-9 && q_extent == 0.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 6] = [
        &["line-info", "--lengths", "250,300"],
        &["pi-error"],
        &["max-power"],
        &["power-circle"],
        &["power-circle", "--freq", "0"],
        &["check", "--v-d", "1.1", "--theta-deg", "40"],
    ];
    for args in commands {
        let mut runs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{}-{run}.out", args.join("_")));
            let status = Command::new(BIN)
                .args(args)
                .arg("--config")
                .arg(CONFIG)
                .arg("--out")
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{args:?} exited with {status}"));
            }
            runs.push((read(&out)?, read(&sidecar(&out)).unwrap_or_default()));
        }
        if runs[0] != runs[1] {
            return Err(format!("{args:?} produced different output"));
        }
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn sidecar(path: &Path) -> std::path::PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    p.into()
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("validity anchor", validity_anchor),
        ("error anchor", error_anchor),
        ("equivalence property", equivalence),
        ("reciprocity property", reciprocity),
        ("monotonicity property", monotonicity),
        ("region structure", region_structure),
        ("breakpoint reproduction", breakpoints),
        ("DC values", dc_values),
        ("oracle equivalence", oracle),
        ("power-circle identities", power_circle_identities),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name} — {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
