//! Continuum-manipulator planning: cable tension to tip deflection, the
//! constant-curvature shape of the manipulator, the drilled tunnel and the
//! time needed to drill it.

use serde::Serialize;
use thiserror::Error;

use crate::model::{DrillParams, ModelError};
use crate::rod::{Centerline, RodError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("calibration needs at least one point")]
    NoCalibrationData,
    #[error("calibration tension {0} N must be positive and finite")]
    InvalidTension(f64),
    #[error("calibration deflection {0} mm must be non-negative and finite")]
    InvalidDeflection(f64),
    #[error("duplicate calibration tension {0} N")]
    DuplicateTension(f64),
    #[error("deflection decreases from {from} mm to {to} mm as tension rises")]
    NonMonotoneData { from: f64, to: f64 },
    #[error("tension {0} N is negative")]
    NegativeTension(f64),
    #[error("tip offset {offset} mm is not reachable by a {length} mm arc (limit {limit} mm)")]
    NoSolution {
        offset: f64,
        length: f64,
        limit: f64,
    },
    #[error(transparent)]
    Rod(#[from] RodError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    PiecewiseLinear,
}

/// Monotone tension (N) to tip deflection (mm) map through the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationModel {
    /// Sorted by tension, starting with the implicit `(0, 0)`.
    anchors: Vec<(f64, f64)>,
    pub interpolation: Interpolation,
    /// Queries beyond the last anchor return the last deflection.
    pub clamp_beyond_last: bool,
}

impl CalibrationModel {
    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    /// 5 N -> 5.3 mm and 25 N -> 10 mm.
    pub fn reference() -> Self {
        calibrate(&[(5.0, 5.3), (25.0, 10.0)]).expect("reference calibration is valid")
    }
}

pub fn calibrate(points: &[(f64, f64)]) -> Result<CalibrationModel, PlanError> {
    if points.is_empty() {
        return Err(PlanError::NoCalibrationData);
    }
    let mut sorted = points.to_vec();
    for &(t, d) in &sorted {
        if !(t.is_finite() && t > 0.0) {
            return Err(PlanError::InvalidTension(t));
        }
        if !(d.is_finite() && d >= 0.0) {
            return Err(PlanError::InvalidDeflection(d));
        }
    }
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut anchors = vec![(0.0, 0.0)];
    for (t, d) in sorted {
        let &(pt, pd) = anchors.last().unwrap();
        if t == pt {
            return Err(PlanError::DuplicateTension(t));
        }
        if d < pd {
            return Err(PlanError::NonMonotoneData { from: pd, to: d });
        }
        anchors.push((t, d));
    }
    Ok(CalibrationModel {
        anchors,
        interpolation: Interpolation::PiecewiseLinear,
        clamp_beyond_last: true,
    })
}

pub fn tension_to_tip_deflection(m: &CalibrationModel, tension: f64) -> Result<f64, PlanError> {
    if tension.is_nan() || tension < 0.0 {
        return Err(PlanError::NegativeTension(tension));
    }
    let a = &m.anchors;
    let &(t_last, d_last) = a.last().unwrap();
    if tension >= t_last {
        return Ok(d_last);
    }
    // half-open segments [t_i, t_{i+1}) so anchors are returned bit-exactly
    let i = a.partition_point(|&(t, _)| t <= tension) - 1;
    let (t0, d0) = a[i];
    let (t1, d1) = a[i + 1];
    Ok(d0 + (tension - t0) / (t1 - t0) * (d1 - d0))
}

/// Planar pose: position (mm) and heading (rad) from the entry axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2 {
    pub const ORIGIN: Pose2 = Pose2 {
        x: 0.0,
        y: 0.0,
        heading: 0.0,
    };
}

/// Constant-curvature arc of the manipulator in its bending plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnakeShape {
    /// 1/mm
    pub curvature: f64,
    pub arc_length: f64,
    pub tip: Pose2,
}

/// Lateral tip offset of an arc of length `length` bent through `theta`.
fn arc_offset(length: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        0.0
    } else {
        length * (1.0 - theta.cos()) / theta
    }
}

/// Bend angle at which the lateral offset of a fixed-length arc peaks;
/// root of `theta sin(theta) = 1 - cos(theta)` in (0, pi).
fn peak_offset_angle() -> f64 {
    let g = |t: f64| t * t.sin() - (1.0 - t.cos());
    bisect(g, 2.0, 2.6)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Largest lateral tip offset an arc of `length` can reach.
pub fn reachable_offset(length: f64) -> f64 {
    arc_offset(length, peak_offset_angle())
}

pub fn snake_shape(
    tension: f64,
    m: &CalibrationModel,
    d: &DrillParams,
) -> Result<SnakeShape, PlanError> {
    d.validate()?;
    let offset = tension_to_tip_deflection(m, tension)?;
    let length = d.manipulator_length;
    if offset == 0.0 {
        return Ok(SnakeShape {
            curvature: 0.0,
            arc_length: length,
            tip: Pose2 {
                x: length,
                y: 0.0,
                heading: 0.0,
            },
        });
    }
    let peak = peak_offset_angle();
    let limit = arc_offset(length, peak);
    if offset >= limit {
        return Err(PlanError::NoSolution {
            offset,
            length,
            limit,
        });
    }
    let theta = bisect(|t| arc_offset(length, t) - offset, 0.0, peak);
    let kappa = theta / length;
    Ok(SnakeShape {
        curvature: kappa,
        arc_length: length,
        tip: Pose2 {
            x: theta.sin() / kappa,
            y: (1.0 - theta.cos()) / kappa,
            heading: theta,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TunnelSpec {
    pub centerline: Centerline,
    pub diameter: f64,
    pub entry: Pose2,
    /// Cable tension the tunnel was generated from, if any.
    pub source_tension: Option<f64>,
}

impl TunnelSpec {
    pub fn new(centerline: Centerline, diameter: f64) -> Self {
        Self {
            centerline,
            diameter,
            entry: Pose2::ORIGIN,
            source_tension: None,
        }
    }

    pub fn straight(length: f64, diameter: f64) -> Self {
        Self::new(Centerline::straight(length), diameter)
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if !(self.diameter.is_finite() && self.diameter > 0.0) {
            return Err(PlanError::Model(ModelError::InvalidGeometry {
                field: "tunnel.diameter".into(),
                invariant: "must be > 0".into(),
            }));
        }
        let c = self.centerline;
        Centerline::with_resolution(c.tip_offset, c.length, c.stations_per_mm)?;
        Ok(())
    }
}

/// Quadratic tunnel spanning the manipulator length with the calibrated tip
/// offset, drilled at the drill diameter.
pub fn generate_tunnel(
    tension: f64,
    m: &CalibrationModel,
    d: &DrillParams,
) -> Result<TunnelSpec, PlanError> {
    d.validate()?;
    let offset = tension_to_tip_deflection(m, tension)?;
    let centerline = Centerline::new(offset, d.manipulator_length)?;
    Ok(TunnelSpec {
        centerline,
        diameter: d.drill_diameter,
        entry: Pose2::ORIGIN,
        source_tension: Some(tension),
    })
}

/// Seconds to feed the drill along the full centerline.
pub fn drill_time(t: &TunnelSpec, d: &DrillParams) -> f64 {
    t.centerline.total_arc_length() / d.feed_rate
}
