//! Scenario files: parsing, default materialisation and validation.

// unit suffixes such as `_Nmm` are part of the file format
#![allow(non_snake_case)]

use std::path::Path;

use flexscrew::plan::Pose2;
use flexscrew::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TorqueInput {
    #[serde(rename = "N_m")]
    NewtonMetre(f64),
    #[serde(rename = "N_mm")]
    NewtonMillimetre(f64),
}

impl TorqueInput {
    pub fn n_mm(self) -> f64 {
        match self {
            TorqueInput::NewtonMetre(v) => v * 1000.0,
            TorqueInput::NewtonMillimetre(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: u32,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    screw: Map<String, Value>,
    #[serde(default)]
    bone: Map<String, Value>,
    #[serde(default)]
    drill: Map<String, Value>,
    #[serde(default)]
    calibration: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    tunnel: Option<RawTunnel>,
    #[serde(default)]
    fixtures: RawFixtures,
    analyses: Vec<RawAnalysis>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTunnel {
    tension: Option<f64>,
    tip_offset: Option<f64>,
    length: Option<f64>,
    diameter: Option<f64>,
    stations_per_mm: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixtures {
    conformity: Option<f64>,
    tip_reaction_Nmm: Option<f64>,
    baseline_capacity_N: Option<f64>,
    torque_budget: Option<TorqueInput>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawAnalysis {
    Section {
        #[serde(default)]
        stations: Option<Vec<f64>>,
    },
    ShapeCheck {
        #[serde(default)]
        engaged: Option<(f64, f64)>,
    },
    TorqueCheck {
        #[serde(default)]
        head_torque: Option<TorqueInput>,
        #[serde(default)]
        engaged: Option<(f64, f64)>,
        #[serde(default)]
        cutting: Option<RawCutting>,
    },
    Plan {},
    Insert {},
    Fixate {
        #[serde(default)]
        load_offset: Option<f64>,
        #[serde(default)]
        cut_width: Option<f64>,
        #[serde(default)]
        with_screw: Option<bool>,
        #[serde(default)]
        reference_capacity_N: Option<f64>,
    },
    Sweep {
        analysis: Box<RawAnalysis>,
        axes: Vec<RawAxis>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCutting {
    density_Nmm_per_mm: f64,
    over: (f64, f64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    parameter: Parameter,
    #[serde(default)]
    values: Option<Vec<f64>>,
    #[serde(default)]
    start: Option<f64>,
    #[serde(default)]
    stop: Option<f64>,
    #[serde(default)]
    count: Option<usize>,
}

/// Quantities a sweep axis may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Tension,
    TipOffset,
    TunnelLength,
    TunnelDiameter,
    NotchDepth,
    NotchWidth,
    BoneShearStrength,
    BoneFriction,
    Conformity,
    HeadTorqueNmm,
    TorqueBudgetNmm,
    LoadOffset,
    CutWidth,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::Tension => "tension",
            Parameter::TipOffset => "tip_offset",
            Parameter::TunnelLength => "tunnel_length",
            Parameter::TunnelDiameter => "tunnel_diameter",
            Parameter::NotchDepth => "notch_depth",
            Parameter::NotchWidth => "notch_width",
            Parameter::BoneShearStrength => "bone_shear_strength",
            Parameter::BoneFriction => "bone_friction",
            Parameter::Conformity => "conformity",
            Parameter::HeadTorqueNmm => "head_torque_nmm",
            Parameter::TorqueBudgetNmm => "torque_budget_nmm",
            Parameter::LoadOffset => "load_offset",
            Parameter::CutWidth => "cut_width",
        }
    }
}

/// Tunnel after defaults; `tip_offset` is derived when `tension` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TunnelSettings {
    pub tension: Option<f64>,
    pub tip_offset: f64,
    pub length: f64,
    pub diameter: f64,
    pub stations_per_mm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fixtures {
    pub conformity: f64,
    pub tip_reaction_Nmm: f64,
    pub baseline_capacity_N: f64,
    pub torque_budget_Nmm: f64,
}

impl Default for Fixtures {
    fn default() -> Self {
        Self {
            conformity: 1.0,
            tip_reaction_Nmm: 0.0,
            baseline_capacity_N: 10.0,
            torque_budget_Nmm: 150.0,
        }
    }
}

impl Fixtures {
    pub fn contact(&self) -> ContactModel {
        ContactModel {
            conformity: self.conformity,
            tip_reaction: self.tip_reaction_Nmm,
        }
    }
}

/// Everything an analysis reads, with all defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inputs {
    pub screw: ScrewSpec,
    pub bone: BoneSpec,
    pub drill: DrillParams,
    pub calibration: Vec<(f64, f64)>,
    pub tunnel: Option<TunnelSettings>,
    pub fixtures: Fixtures,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutting {
    pub density_Nmm_per_mm: f64,
    pub over: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Analysis {
    Section {
        stations: Vec<f64>,
    },
    ShapeCheck {
        /// `None` seats the screw as deep as the tunnel allows.
        engaged: Option<(f64, f64)>,
    },
    TorqueCheck {
        head_torque_Nmm: f64,
        engaged: Option<(f64, f64)>,
        cutting: Option<Cutting>,
    },
    Plan,
    Insert,
    Fixate {
        load_offset: f64,
        cut_width: f64,
        with_screw: bool,
        reference_capacity_N: Option<f64>,
    },
    Sweep {
        analysis: Box<Analysis>,
        axes: Vec<Axis>,
    },
}

impl Analysis {
    pub fn kind(&self) -> &'static str {
        match self {
            Analysis::Section { .. } => "section",
            Analysis::ShapeCheck { .. } => "shape_check",
            Analysis::TorqueCheck { .. } => "torque_check",
            Analysis::Plan => "plan",
            Analysis::Insert => "insert",
            Analysis::Fixate { .. } => "fixate",
            Analysis::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub parameter: Parameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub inputs: Inputs,
    pub analyses: Vec<Analysis>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<(Scenario, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into());
        let sc = Scenario::parse(&bytes, &path.display().to_string(), &stem)?;
        Ok((sc, bytes))
    }

    pub fn parse(bytes: &[u8], file: &str, default_name: &str) -> Result<Scenario, CliError> {
        let text = std::str::from_utf8(bytes)
            .map_err(|_| CliError::input(file, "line 1", "file is not UTF-8"))?;
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| {
            CliError::input(file, format!("line {} column {}", e.line(), e.column()), e)
        })?;
        Resolver { file }.resolve(raw, default_name)
    }
}

struct Resolver<'a> {
    file: &'a str,
}

impl Resolver<'_> {
    fn err(&self, field: impl Into<String>, msg: impl std::fmt::Display) -> CliError {
        CliError::input(self.file, format!("field {}", field.into()), msg)
    }

    fn resolve(&self, raw: RawScenario, default_name: &str) -> Result<Scenario, CliError> {
        if raw.schema_version != SCHEMA_VERSION {
            return Err(self.err(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    raw.schema_version
                ),
            ));
        }
        let screw = self.screw(raw.screw)?;
        let bone: BoneSpec = self.overlay("bone", &BoneSpec::foam_block(), raw.bone)?;
        bone.material
            .validate()
            .map_err(|e| self.model_err("bone.material", e))?;
        if bone.block.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(self.err("bone.block", "dimensions must be > 0"));
        }
        let drill: DrillParams = self.overlay("drill", &DrillParams::reference(), raw.drill)?;
        drill.validate().map_err(|e| self.model_err("drill", e))?;
        let calibration = match raw.calibration {
            Some(points) => points,
            None => CalibrationModel::reference().anchors()[1..].to_vec(),
        };
        calibrate(&calibration).map_err(|e| self.err("calibration", e))?;
        let fixtures = self.fixtures(raw.fixtures)?;

        let mut inputs = Inputs {
            screw,
            bone,
            drill,
            calibration,
            tunnel: None,
            fixtures,
        };
        if let Some(t) = raw.tunnel {
            inputs.tunnel = Some(self.tunnel(t, &inputs)?);
        }

        if raw.analyses.is_empty() {
            return Err(self.err("analyses", "at least one analysis is required"));
        }
        let analyses = raw
            .analyses
            .into_iter()
            .enumerate()
            .map(|(i, a)| self.analysis(a, &format!("analyses[{i}]"), &inputs))
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Scenario {
            schema_version: raw.schema_version,
            name: raw.name.unwrap_or_else(|| default_name.to_string()),
            inputs,
            analyses,
        })
    }

    fn overlay<T>(&self, field: &str, base: &T, user: Map<String, Value>) -> Result<T, CliError>
    where
        T: Serialize + for<'de> Deserialize<'de>,
    {
        let mut v = serde_json::to_value(base).expect("defaults serialize");
        merge(&mut v, Value::Object(user));
        serde_json::from_value(v).map_err(|e| self.err(field, e))
    }

    fn screw(&self, mut user: Map<String, Value>) -> Result<ScrewSpec, CliError> {
        let notches = user.remove("notches");
        let head_given = user.contains_key("head_tip_radius");
        let mut base = ScrewSpec::reference();
        base.notches = None;
        let mut spec: ScrewSpec = self.overlay("screw", &base, user)?;
        if !head_given {
            spec.head_tip_radius = spec.core_diameter / 2.0;
        }
        let default_pattern = NotchPattern::default_for(spec.core_diameter, spec.thread_pitch);
        spec.notches = match notches {
            None => Some(default_pattern),
            Some(Value::Null) => None,
            Some(Value::Object(m)) => Some(self.overlay("screw.notches", &default_pattern, m)?),
            Some(_) => return Err(self.err("screw.notches", "must be an object or null")),
        };
        validate_screw_spec(spec.clone()).map_err(|e| self.model_err("screw", e))?;
        Ok(spec)
    }

    fn model_err(&self, prefix: &str, e: ModelError) -> CliError {
        match &e {
            ModelError::InvalidGeometry { field, invariant } => {
                self.err(format!("{prefix}.{field}"), invariant)
            }
            ModelError::InvalidMaterial { field, invariant } => {
                let prefix = if prefix == "screw" {
                    "screw.material"
                } else {
                    prefix
                };
                self.err(format!("{prefix}.{field}"), invariant)
            }
            ModelError::OutOfRange { .. } => self.err(prefix, e),
        }
    }

    fn fixtures(&self, raw: RawFixtures) -> Result<Fixtures, CliError> {
        let d = Fixtures::default();
        let f = Fixtures {
            conformity: raw.conformity.unwrap_or(d.conformity),
            tip_reaction_Nmm: raw.tip_reaction_Nmm.unwrap_or(d.tip_reaction_Nmm),
            baseline_capacity_N: raw.baseline_capacity_N.unwrap_or(d.baseline_capacity_N),
            torque_budget_Nmm: raw
                .torque_budget
                .map_or(d.torque_budget_Nmm, TorqueInput::n_mm),
        };
        let checks = [
            ("fixtures.conformity", f.conformity),
            ("fixtures.tip_reaction_Nmm", f.tip_reaction_Nmm),
            ("fixtures.baseline_capacity_N", f.baseline_capacity_N),
            ("fixtures.torque_budget", f.torque_budget_Nmm),
        ];
        for (field, v) in checks {
            if !(v.is_finite() && v >= 0.0) {
                return Err(self.err(field, "must be finite and >= 0"));
            }
        }
        Ok(f)
    }

    fn tunnel(&self, t: RawTunnel, inputs: &Inputs) -> Result<TunnelSettings, CliError> {
        let settings = match (t.tension, t.tip_offset) {
            (Some(_), Some(_)) => {
                return Err(self.err("tunnel", "give either tension or tip_offset, not both"))
            }
            (None, None) => return Err(self.err("tunnel", "tension or tip_offset is required")),
            (tension, tip_offset) => TunnelSettings {
                tension,
                tip_offset: tip_offset.unwrap_or(0.0),
                length: t.length.unwrap_or(inputs.drill.manipulator_length),
                diameter: t.diameter.unwrap_or(inputs.drill.drill_diameter),
                stations_per_mm: t.stations_per_mm.unwrap_or(rod::DEFAULT_STATIONS_PER_MM),
            },
        };
        resolve_tunnel(settings, inputs).map_err(|e| self.err("tunnel", e))
    }

    fn analysis(&self, raw: RawAnalysis, at: &str, inputs: &Inputs) -> Result<Analysis, CliError> {
        let needs_tunnel = |kind: &str| {
            if inputs.tunnel.is_none() {
                Err(self.err("tunnel", format!("required by the {kind} analysis at {at}")))
            } else {
                Ok(())
            }
        };
        let a = match raw {
            RawAnalysis::Section { stations } => {
                let spec = validate_screw_spec(inputs.screw.clone())
                    .map_err(|e| self.model_err("screw", e))?;
                let stations = match stations {
                    Some(s) => s,
                    None => spec
                        .layout()
                        .iter()
                        .map(|seg| (seg.start + seg.end) / 2.0)
                        .collect(),
                };
                for s in &stations {
                    if !(0.0..=spec.overall_length()).contains(s) {
                        return Err(self.err(
                            format!("{at}.stations"),
                            format!("station {s} outside [0, {}]", spec.overall_length()),
                        ));
                    }
                }
                Analysis::Section { stations }
            }
            RawAnalysis::ShapeCheck { engaged } => {
                needs_tunnel("shape_check")?;
                Analysis::ShapeCheck { engaged }
            }
            RawAnalysis::TorqueCheck {
                head_torque,
                engaged,
                cutting,
            } => {
                needs_tunnel("torque_check")?;
                let head = head_torque.unwrap_or(TorqueInput::NewtonMetre(0.15)).n_mm();
                if !(head.is_finite() && head >= 0.0) {
                    return Err(self.err(format!("{at}.head_torque"), "must be >= 0"));
                }
                Analysis::TorqueCheck {
                    head_torque_Nmm: head,
                    engaged,
                    cutting: cutting.map(|c| Cutting {
                        density_Nmm_per_mm: c.density_Nmm_per_mm,
                        over: c.over,
                    }),
                }
            }
            RawAnalysis::Plan {} => {
                needs_tunnel("plan")?;
                if inputs.tunnel.and_then(|t| t.tension).is_none() {
                    return Err(self.err(
                        "tunnel.tension",
                        format!("required by the plan analysis at {at}"),
                    ));
                }
                Analysis::Plan
            }
            RawAnalysis::Insert {} => {
                needs_tunnel("insert")?;
                Analysis::Insert
            }
            RawAnalysis::Fixate {
                load_offset,
                cut_width,
                with_screw,
                reference_capacity_N,
            } => {
                needs_tunnel("fixate")?;
                let load_offset = load_offset.unwrap_or(15.0);
                let cut_width = cut_width.unwrap_or(2.0);
                if !(load_offset.is_finite() && load_offset > 0.0) {
                    return Err(self.err(format!("{at}.load_offset"), "must be > 0"));
                }
                if !(cut_width.is_finite() && cut_width >= 0.0) {
                    return Err(self.err(format!("{at}.cut_width"), "must be >= 0"));
                }
                Analysis::Fixate {
                    load_offset,
                    cut_width,
                    with_screw: with_screw.unwrap_or(true),
                    reference_capacity_N,
                }
            }
            RawAnalysis::Sweep { analysis, axes } => {
                if matches!(*analysis, RawAnalysis::Sweep { .. }) {
                    return Err(self.err(format!("{at}.analysis"), "sweeps cannot be nested"));
                }
                let inner = self.analysis(*analysis, &format!("{at}.analysis"), inputs)?;
                if axes.is_empty() {
                    return Err(self.err(format!("{at}.axes"), "at least one axis is required"));
                }
                let axes = axes
                    .into_iter()
                    .enumerate()
                    .map(|(i, ax)| self.axis(ax, &format!("{at}.axes[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                for (i, a) in axes.iter().enumerate() {
                    if axes[..i].iter().any(|b| b.parameter == a.parameter) {
                        return Err(self.err(format!("{at}.axes[{i}]"), "duplicate parameter"));
                    }
                    crate::sweep::check_applicable(a.parameter, &inner, inputs)
                        .map_err(|e| self.err(format!("{at}.axes[{i}].parameter"), e))?;
                }
                Analysis::Sweep {
                    analysis: Box::new(inner),
                    axes,
                }
            }
        };
        Ok(a)
    }

    fn axis(&self, raw: RawAxis, at: &str) -> Result<Axis, CliError> {
        let values = match (raw.values, raw.start, raw.stop, raw.count) {
            (Some(v), None, None, None) => v,
            (None, Some(a), Some(b), Some(n)) => {
                if n < 2 {
                    return Err(self.err(format!("{at}.count"), "must be >= 2"));
                }
                (0..n)
                    .map(|i| {
                        if i + 1 == n {
                            b
                        } else {
                            a + (b - a) * i as f64 / (n - 1) as f64
                        }
                    })
                    .collect()
            }
            _ => {
                return Err(self.err(at, "give either values or start, stop and count"));
            }
        };
        if values.len() < 2 {
            return Err(self.err(format!("{at}.values"), "an axis needs at least 2 values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(self.err(format!("{at}.values"), "values must be finite"));
        }
        Ok(Axis {
            parameter: raw.parameter,
            values,
        })
    }
}

/// Recompute the derived tip offset and check the tunnel can be built.
pub fn resolve_tunnel(mut t: TunnelSettings, inputs: &Inputs) -> Result<TunnelSettings, String> {
    if let Some(tension) = t.tension {
        let m = calibrate(&inputs.calibration).map_err(|e| e.to_string())?;
        t.tip_offset = tension_to_tip_deflection(&m, tension).map_err(|e| e.to_string())?;
    }
    build_tunnel(&t).map_err(|e| e.to_string())?;
    Ok(t)
}

pub fn build_tunnel(t: &TunnelSettings) -> Result<TunnelSpec, PlanError> {
    let centerline = Centerline::with_resolution(t.tip_offset, t.length, t.stations_per_mm)?;
    let spec = TunnelSpec {
        centerline,
        diameter: t.diameter,
        entry: Pose2::ORIGIN,
        source_tension: t.tension,
    };
    spec.validate()?;
    Ok(spec)
}

fn merge(base: &mut Value, user: Value) {
    match (base, user) {
        (Value::Object(b), Value::Object(u)) => {
            for (k, v) in u {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
