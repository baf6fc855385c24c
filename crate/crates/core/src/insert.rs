//! Quasi-static screwing of the screw through a drilled tunnel, one thread
//! pitch (one revolution) per step.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    interference, InterferenceReport, MaterialSpec, ModelError, ValidatedScrewSpec, LENGTH_EPS,
};
use crate::plan::TunnelSpec;
use crate::rod::{
    prescribed_shape_stress, safety_factor, torque_transmission, ArcInterval, ContactModel,
    CuttingLoad, FieldRef, RodError, SafetyFactor, Verdict,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InsertError {
    #[error("screw does not fit the tunnel (clearance {core_clearance} mm, bite {bite_depth} mm)")]
    InfeasibleInterference {
        core_clearance: f64,
        bite_depth: f64,
    },
    #[error("engaged length {value} mm outside [0, {max}]")]
    OutOfRange { value: f64, max: f64 },
    #[error("invalid bone block: {0}")]
    InvalidBone(String),
    #[error(transparent)]
    Rod(#[from] RodError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoneSpec {
    pub material: MaterialSpec,
    /// Block edge lengths, mm.
    pub block: [f64; 3],
    pub descriptor: String,
}

impl BoneSpec {
    /// 65 x 40 x 9 mm block of 15 PCF foam.
    pub fn foam_block() -> Self {
        Self {
            material: MaterialSpec::pcf15_foam(),
            block: [65.0, 40.0, 9.0],
            descriptor: "15 PCF polyurethane foam".into(),
        }
    }

    pub fn validate(&self) -> Result<(), InsertError> {
        if self.block.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(InsertError::InvalidBone(
                "block dimensions must be > 0".into(),
            ));
        }
        self.material.validate()?;
        Ok(())
    }
}

/// Torque (N·mm) for the tapping threads to cut grooves over
/// `engaged_length` mm of thread engagement measured from the leading thread.
pub fn tapping_torque(
    spec: &ValidatedScrewSpec,
    bone: &BoneSpec,
    tunnel_diameter: f64,
    engaged_length: f64,
) -> Result<f64, InsertError> {
    let sp = spec.spec();
    let max = sp.threaded_length();
    if !(engaged_length.is_finite() && engaged_length >= 0.0 && engaged_length <= max + LENGTH_EPS)
    {
        return Err(InsertError::OutOfRange {
            value: engaged_length,
            max,
        });
    }
    let bite = ((sp.outer_diameter - tunnel_diameter) / 2.0).max(0.0);
    let mean_diameter = (sp.outer_diameter + tunnel_diameter) / 2.0;
    let tapping_len = tapping_length(spec).min(engaged_length);
    let turns = tapping_len / sp.thread_pitch;
    let helix = turns * ((PI * mean_diameter).powi(2) + sp.thread_pitch.powi(2)).sqrt();
    let cut_area = bite * helix;
    Ok(bone.material.shear_strength * cut_area * mean_diameter / 2.0)
}

fn tapping_length(spec: &ValidatedScrewSpec) -> f64 {
    spec.spec().tapping_thread_count as f64 * spec.spec().thread_pitch
}

/// Threads fully engaged after `depth` mm of thread advance.
pub fn engaged_thread_count(depth: f64, pitch: f64, thread_count: u32) -> u32 {
    let n = (depth / pitch + 1e-9).floor().max(0.0) as u32;
    n.min(thread_count)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InsertionLimits {
    /// N·mm
    pub torque_budget: f64,
    pub contact: ContactModel,
}

impl Default for InsertionLimits {
    fn default() -> Self {
        Self {
            torque_budget: 150.0,
            contact: ContactModel::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitingFactor {
    Bending,
    Torsion,
    TorqueBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    /// Thread advance into the tunnel, mm.
    pub depth: f64,
    /// Tip penetration along the tunnel, mm.
    pub tip_depth: f64,
    pub engaged_threads: u32,
    pub max_bending_utilization: f64,
    pub head_torque_required: f64,
    pub cutting_torque: f64,
    pub torsional_safety_factor: SafetyFactor,
    pub verdict: Verdict,
    pub limiting_factor: Option<LimitingFactor>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InsertionReport {
    pub interference: InterferenceReport,
    pub steps: Vec<StepRecord>,
    /// Whether every thread entered the tunnel before its end was reached.
    /// A screw that cannot seat fails even when every step passed.
    pub fully_seated: bool,
    pub verdict: Verdict,
    pub limiting_step: Option<usize>,
    pub limiting_factor: Option<LimitingFactor>,
}

pub fn simulate_insertion(
    spec: &ValidatedScrewSpec,
    tunnel: &TunnelSpec,
    bone: &BoneSpec,
    limits: &InsertionLimits,
) -> Result<InsertionReport, InsertError> {
    bone.validate()?;
    let fit = interference(spec, tunnel);
    if !fit.feasible {
        return Err(InsertError::InfeasibleInterference {
            core_clearance: fit.core_clearance,
            bite_depth: fit.bite_depth,
        });
    }
    let sp = spec.spec();
    let c = &tunnel.centerline;
    let tunnel_len = c.total_arc_length();
    let overall = spec.overall_length();
    let head = sp.head_tip_radius;
    let threads_end = spec.threads_end();

    let mut steps = Vec::new();
    let mut fully_seated = true;
    for k in 1..=sp.thread_count {
        let depth = k as f64 * sp.thread_pitch;
        let tip_depth = head + depth;
        if tip_depth > tunnel_len + LENGTH_EPS {
            fully_seated = false;
            break;
        }
        let engaged = ArcInterval::new(overall - tip_depth, overall);
        let bending = prescribed_shape_stress(spec, c, engaged)?;

        let cut_len = tapping_length(spec).min(depth);
        let cutting_torque = tapping_torque(spec, bone, tunnel.diameter, depth)?;
        let cutting = if cut_len > 0.0 {
            CuttingLoad::Uniform {
                density: cutting_torque / cut_len,
                over: ArcInterval::new(threads_end - cut_len, threads_end),
            }
        } else {
            CuttingLoad::None
        };
        let demand = torque_transmission(
            spec,
            c,
            engaged,
            limits.torque_budget,
            &bone.material,
            cutting,
            limits.contact,
        )?;
        let required = demand.head_torque_required;
        // stresses while the screw turns: the head carries exactly what is needed
        let turning = torque_transmission(
            spec,
            c,
            engaged,
            required,
            &bone.material,
            cutting,
            limits.contact,
        )?;
        let torsion_sf = safety_factor(FieldRef::Torsion(&turning), &sp.material);

        let limiting_factor = if bending.max_utilization > 1.0 || !bending.verdict.is_pass() {
            Some(LimitingFactor::Bending)
        } else if torsion_sf.value() < 1.0 {
            Some(LimitingFactor::Torsion)
        } else if required > limits.torque_budget {
            Some(LimitingFactor::TorqueBudget)
        } else {
            None
        };
        steps.push(StepRecord {
            depth,
            tip_depth,
            engaged_threads: engaged_thread_count(depth, sp.thread_pitch, sp.thread_count),
            max_bending_utilization: bending.max_utilization,
            head_torque_required: required,
            cutting_torque,
            torsional_safety_factor: torsion_sf,
            verdict: Verdict::from_pass(limiting_factor.is_none()),
            limiting_factor,
        });
    }

    let limiting_step = steps.iter().position(|s| !s.verdict.is_pass());
    Ok(InsertionReport {
        interference: fit,
        verdict: Verdict::from_pass(limiting_step.is_none() && fully_seated),
        limiting_factor: limiting_step.and_then(|i| steps[i].limiting_factor),
        limiting_step,
        steps,
        fully_seated,
    })
}
