//! Study configuration file (strict JSON).

use std::path::Path;

use anyhow::{anyhow, Context};
use freqflow::power_flow::{ShuntPlacement, ThermalEnforcement};
use freqflow::{Base, Limits, Line, Study};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    /// Free-text annotation; ignored by every command.
    #[serde(default)]
    pub note: Option<String>,
    pub line: LineSection,
    pub base: BaseSection,
    pub limits: LimitsSection,
    #[serde(default)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSection {
    pub r_ohm_per_km: f64,
    pub l_mh_per_km: f64,
    pub c_nf_per_km: f64,
    pub g_s_per_km: f64,
    pub length_km: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSection {
    pub mva: f64,
    pub kv: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSection {
    pub s_max_pu: f64,
    pub v_min_pu: f64,
    pub v_max_pu: f64,
    pub theta_max_deg: f64,
    pub k_dc: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub origin_only_thermal: bool,
    #[serde(default)]
    pub shunt_placement: Placement,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    #[default]
    Total,
    PerEnd,
}

impl StudyConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: StudyConfig = serde_json::from_str(text)?;
        cfg.study(false)?;
        Ok(cfg)
    }

    pub fn line(&self) -> anyhow::Result<Line> {
        let l = &self.line;
        Line::from_datasheet(l.r_ohm_per_km, l.l_mh_per_km, l.c_nf_per_km, l.g_s_per_km, l.length_km)
            .map_err(|e| anyhow!("line: {e}"))
    }

    pub fn base(&self) -> anyhow::Result<Base> {
        Base::from_mva_kv(self.base.mva, self.base.kv).map_err(|e| anyhow!("base: {e}"))
    }

    pub fn limits(&self) -> anyhow::Result<Limits> {
        let l = &self.limits;
        Limits::new(l.s_max_pu, l.v_min_pu, l.v_max_pu, l.theta_max_deg.to_radians(), l.k_dc)
            .map_err(|e| anyhow!("limits: {e}"))
    }

    pub fn thermal(&self, origin_only: bool) -> ThermalEnforcement {
        if origin_only || self.flags.origin_only_thermal {
            ThermalEnforcement::OriginOnly
        } else {
            ThermalEnforcement::BothEnds
        }
    }

    pub fn shunt(&self) -> ShuntPlacement {
        match self.flags.shunt_placement {
            Placement::Total => ShuntPlacement::Total,
            Placement::PerEnd => ShuntPlacement::PerEnd,
        }
    }

    pub fn study(&self, origin_only: bool) -> anyhow::Result<Study> {
        Ok(Study {
            line: self.line()?,
            base: self.base()?,
            limits: self.limits()?,
            thermal: self.thermal(origin_only),
            shunt: self.shunt(),
        })
    }
}
