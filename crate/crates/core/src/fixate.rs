//! Holding strength of a seated screw: thread pullout and an eccentric load
//! applied across a transverse cut through the tunnel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::insert::BoneSpec;
use crate::model::{section_properties, ModelError, ValidatedScrewSpec, LENGTH_EPS};
use crate::plan::{PlanError, TunnelSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixateError {
    #[error("engaged length {value} mm outside (0, {max}]")]
    OutOfRange { value: f64, max: f64 },
    #[error("no thread is fully engaged beyond the cut (far edge at {far_edge} mm of {tunnel_length} mm)")]
    NoEngagementAcrossFracture { far_edge: f64, tunnel_length: f64 },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

const THREAD_SHEAR_SLOPE: f64 = 0.577_35;

/// Fraction of the cylinder through the thread crests that shears.
pub fn thread_shear_factor(spec: &ValidatedScrewSpec) -> f64 {
    let sp = spec.spec();
    0.5 + THREAD_SHEAR_SLOPE * sp.thread_depth() / sp.thread_pitch
}

/// Axial force (N) that strips the bone threads over `engaged_length` mm.
pub fn pullout_strength(
    spec: &ValidatedScrewSpec,
    bone: &BoneSpec,
    engaged_length: f64,
) -> Result<f64, FixateError> {
    let sp = spec.spec();
    let max = sp.threaded_length();
    if !(engaged_length.is_finite() && engaged_length >= 0.0 && engaged_length <= max + LENGTH_EPS)
    {
        return Err(FixateError::OutOfRange {
            value: engaged_length,
            max,
        });
    }
    Ok(bone.material.shear_strength
        * engaged_length
        * PI
        * sp.outer_diameter
        * thread_shear_factor(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CutSpec {
    /// V-shaped cut across the block through the tunnel midpoint.
    VTransversal { width: f64 },
}

impl CutSpec {
    pub fn width(&self) -> f64 {
        match *self {
            CutSpec::VTransversal { width } => width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractureScenario {
    pub tunnel: TunnelSpec,
    pub screw: Option<ValidatedScrewSpec>,
    pub bone: BoneSpec,
    pub cut: CutSpec,
    /// Load offset from the entry point, mm.
    pub load_offset: f64,
    /// Calibrated capacity of the cut block without a screw, N.
    pub baseline_capacity: f64,
    /// Measured capacity to report alongside the estimate, N.
    pub reference_capacity: Option<f64>,
}

impl FractureScenario {
    pub fn validate(&self) -> Result<(), FixateError> {
        let bad = |m: &str| Err(FixateError::InvalidScenario(m.into()));
        if !(self.load_offset.is_finite() && self.load_offset > 0.0) {
            return bad("load offset must be > 0");
        }
        if !(self.cut.width().is_finite() && self.cut.width() >= 0.0) {
            return bad("cut width must be >= 0");
        }
        if !(self.baseline_capacity.is_finite() && self.baseline_capacity >= 0.0) {
            return bad("baseline capacity must be >= 0");
        }
        self.tunnel.validate()?;
        self.bone.material.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixationMode {
    Pullout,
    BoneBearing,
    ScrewBending,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCapacities {
    pub pullout: f64,
    pub bone_bearing: f64,
    pub screw_bending: f64,
}

/// Where the screw sits relative to the cut, along the tunnel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anchorage {
    /// Tunnel arc length at the cut centre.
    pub cut_center: f64,
    pub far_edge: f64,
    pub far_threads: u32,
    pub lever_arm: f64,
    pub min_plastic_modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixationReport {
    pub capacity: f64,
    pub governing_mode: FixationMode,
    pub baseline: f64,
    pub modes: Option<ModeCapacities>,
    pub anchorage: Option<Anchorage>,
    /// fixed / unfixed, when the screw is present.
    pub ratio: Option<f64>,
    pub reference_capacity: Option<f64>,
    /// estimate / reference
    pub reference_ratio: Option<f64>,
}

/// Locate the screw against the cut. The screw is pushed in until its tip
/// reaches the tunnel end or its shank reaches the entry.
pub fn anchorage(
    spec: &ValidatedScrewSpec,
    tunnel: &TunnelSpec,
    cut: &CutSpec,
) -> Result<Anchorage, FixateError> {
    let total = tunnel.centerline.total_arc_length();
    let overall = spec.overall_length();
    let seat = total.min(overall - spec.shank_length());
    // tunnel coordinate of screw station s
    let offset = seat - overall;
    let cut_center = total / 2.0;
    let half = cut.width() / 2.0;
    let far_edge = cut_center + half;

    let (mut count, mut centroid) = (0u32, 0.0);
    for j in 0..spec.spec().thread_count {
        let (a, b) = spec.thread_interval(j);
        let (a, b) = (a + offset, b + offset);
        if a >= far_edge - LENGTH_EPS && b <= total + LENGTH_EPS {
            count += 1;
            centroid += (a + b) / 2.0;
        }
    }
    if count == 0 {
        return Err(FixateError::NoEngagementAcrossFracture {
            far_edge,
            tunnel_length: total,
        });
    }
    centroid /= count as f64;

    let lo = (cut_center - half - offset).max(0.0);
    let hi = (far_edge - offset).min(overall);
    let mut stations: Vec<f64> = (0..=20).map(|i| lo + (hi - lo) * i as f64 / 20.0).collect();
    stations.extend(
        spec.layout()
            .iter()
            .map(|seg| (seg.start + seg.end) / 2.0)
            .filter(|m| (lo..=hi).contains(m)),
    );
    let mut min_zp = f64::INFINITY;
    for s in stations {
        min_zp = min_zp.min(section_properties(spec, s)?.plastic_modulus);
    }

    Ok(Anchorage {
        cut_center,
        far_edge,
        far_threads: count,
        lever_arm: centroid - cut_center,
        min_plastic_modulus: min_zp,
    })
}

/// Eccentric-load capacity of the cut block.
pub fn fixation_capacity(sc: &FractureScenario) -> Result<FixationReport, FixateError> {
    sc.validate()?;
    let baseline = sc.baseline_capacity;
    let Some(spec) = sc.screw.as_ref() else {
        return Ok(FixationReport {
            capacity: baseline,
            governing_mode: FixationMode::Baseline,
            baseline,
            modes: None,
            anchorage: None,
            ratio: None,
            reference_capacity: sc.reference_capacity,
            reference_ratio: sc.reference_capacity.map(|r| baseline / r),
        });
    };
    let sp = spec.spec();
    let anchor = anchorage(spec, &sc.tunnel, &sc.cut)?;
    let e = sc.load_offset;
    let a = anchor.lever_arm;
    let n = anchor.far_threads as f64;

    let pullout = pullout_strength(spec, &sc.bone, n * sp.thread_pitch)? * a / e;
    let bite_area = PI * (sp.outer_diameter.powi(2) - sc.tunnel.diameter.powi(2)).max(0.0) / 4.0;
    let bone_bearing = sc.bone.material.yield_strength * n * bite_area * a / e;
    let screw_bending = sp.material.yield_strength * anchor.min_plastic_modulus / e;

    let modes = ModeCapacities {
        pullout,
        bone_bearing,
        screw_bending,
    };
    let (governing_mode, contribution) = [
        (FixationMode::Pullout, pullout),
        (FixationMode::BoneBearing, bone_bearing),
        (FixationMode::ScrewBending, screw_bending),
    ]
    .into_iter()
    .fold((FixationMode::Pullout, f64::INFINITY), |best, m| {
        if m.1 < best.1 {
            m
        } else {
            best
        }
    });
    let capacity = baseline + contribution;
    Ok(FixationReport {
        capacity,
        governing_mode,
        baseline,
        modes: Some(modes),
        anchorage: Some(anchor),
        ratio: (baseline > 0.0).then(|| capacity / baseline),
        reference_capacity: sc.reference_capacity,
        reference_ratio: sc.reference_capacity.map(|r| capacity / r),
    })
}
