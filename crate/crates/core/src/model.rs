//! Domain types for the notched cannulated screw, material constants and
//! drilling parameters, plus cross-section properties along the shaft.
//!
//! Units are mm, N, MPa and N·mm throughout. Arc length `s` along the screw
//! runs from the drive head (`s = 0`) to the tip of the round steering head
//! (`s = overall_length`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plan::TunnelSpec;

/// Tolerance used when comparing derived lengths (thread counts, layout edges).
pub(crate) const LENGTH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid geometry: `{field}` {invariant}")]
    InvalidGeometry { field: String, invariant: String },
    #[error("invalid material: `{field}` {invariant}")]
    InvalidMaterial { field: String, invariant: String },
    #[error("{what} = {value} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
}

impl ModelError {
    fn geometry(field: impl Into<String>, invariant: impl Into<String>) -> Self {
        ModelError::InvalidGeometry {
            field: field.into(),
            invariant: invariant.into(),
        }
    }

    fn material(field: impl Into<String>, invariant: impl Into<String>) -> Self {
        ModelError::InvalidMaterial {
            field: field.into(),
            invariant: invariant.into(),
        }
    }
}

/// Elastic and strength constants of an isotropic material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    /// MPa
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// MPa. For the screw this is the end of the linear branch; for bone
    /// surrogates it is the compressive (bearing) strength.
    pub yield_strength: f64,
    /// MPa
    pub ultimate_strength: f64,
    /// Strain recoverable on unloading (superelastic plateau end).
    pub recoverable_strain: f64,
    /// MPa. Thread-shear strength for bone surrogates; zero is accepted and
    /// means the material cannot hold a thread.
    pub shear_strength: f64,
    pub friction_coefficient: f64,
}

impl MaterialSpec {
    /// Superelastic nitinol: E = 83 GPa, nu = 0.33, 700 MPa yield and
    /// 1900 MPa ultimate; 6 % recoverable strain is an assumed default.
    pub fn nitinol() -> Self {
        Self {
            youngs_modulus: 83_000.0,
            poisson_ratio: 0.33,
            yield_strength: 700.0,
            ultimate_strength: 1900.0,
            recoverable_strain: 0.06,
            shear_strength: 700.0 / 3f64.sqrt(),
            friction_coefficient: 0.4,
        }
    }

    /// 15 PCF rigid polyurethane foam fixture. Shear strength and friction
    /// are configuration fixtures, not measured values.
    pub fn pcf15_foam() -> Self {
        Self {
            youngs_modulus: 123.0,
            poisson_ratio: 0.3,
            yield_strength: 4.9,
            ultimate_strength: 5.4,
            recoverable_strain: 0.04,
            shear_strength: 1.6,
            friction_coefficient: 0.4,
        }
    }

    /// Shear yield by the von Mises criterion, `yield / sqrt(3)`.
    pub fn shear_yield(&self) -> f64 {
        self.yield_strength / 3f64.sqrt()
    }

    pub fn yield_strain(&self) -> f64 {
        self.yield_strength / self.youngs_modulus
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let finite = [
            ("youngs_modulus", self.youngs_modulus),
            ("poisson_ratio", self.poisson_ratio),
            ("yield_strength", self.yield_strength),
            ("ultimate_strength", self.ultimate_strength),
            ("recoverable_strain", self.recoverable_strain),
            ("shear_strength", self.shear_strength),
            ("friction_coefficient", self.friction_coefficient),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(ModelError::material(field, "must be finite"));
            }
        }
        if self.youngs_modulus <= 0.0 {
            return Err(ModelError::material("youngs_modulus", "must be > 0"));
        }
        if !(self.poisson_ratio > 0.0 && self.poisson_ratio < 0.5) {
            return Err(ModelError::material(
                "poisson_ratio",
                "must lie in (0, 0.5)",
            ));
        }
        if self.yield_strength <= 0.0 {
            return Err(ModelError::material("yield_strength", "must be > 0"));
        }
        if self.ultimate_strength <= self.yield_strength {
            return Err(ModelError::material(
                "ultimate_strength",
                "must exceed yield_strength",
            ));
        }
        if self.shear_strength < 0.0 {
            return Err(ModelError::material("shear_strength", "must be >= 0"));
        }
        if self.friction_coefficient < 0.0 {
            return Err(ModelError::material("friction_coefficient", "must be >= 0"));
        }
        if self.recoverable_strain < self.yield_strain() {
            return Err(ModelError::material(
                "recoverable_strain",
                "must be >= yield_strength / youngs_modulus",
            ));
        }
        Ok(())
    }
}

/// One of the two orthogonal notch planes. Planar tunnels bend in plane `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NotchPlane {
    A,
    B,
}

impl NotchPlane {
    pub fn other(self) -> Self {
        match self {
            NotchPlane::A => NotchPlane::B,
            NotchPlane::B => NotchPlane::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NotchPattern {
    /// Radial depth from the core surface, mm.
    pub depth: f64,
    /// Axial width, mm.
    pub width: f64,
    /// Axial spacing between consecutive notches, mm.
    pub pitch: f64,
    /// Repeating plane cycle, e.g. `[a, b]`.
    pub orientation: Vec<NotchPlane>,
}

impl NotchPattern {
    /// Assumed pattern: cut to the centre plane of the shaft, 1 mm wide, one
    /// notch per thread pitch, strictly alternating planes.
    pub fn default_for(core_diameter: f64, thread_pitch: f64) -> Self {
        Self {
            depth: core_diameter / 2.0,
            width: 1.0,
            pitch: thread_pitch,
            orientation: vec![NotchPlane::A, NotchPlane::B],
        }
    }

    pub fn plane_of(&self, index: usize) -> NotchPlane {
        self.orientation[index % self.orientation.len()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThreadForm {
    VShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScrewSpec {
    pub core_diameter: f64,
    pub outer_diameter: f64,
    pub cannula_diameter: f64,
    pub overall_length: f64,
    pub thread_count: u32,
    pub thread_pitch: f64,
    pub thread_form: ThreadForm,
    /// Leading threads that carry cutting edges.
    pub tapping_thread_count: u32,
    /// Radius of the round steering head; the head occupies this much arc
    /// length at the tip.
    pub head_tip_radius: f64,
    /// `None` models a plain cannulated shaft.
    pub notches: Option<NotchPattern>,
    pub material: MaterialSpec,
}

impl ScrewSpec {
    /// The fabricated screw: 7.5 mm core, 9.5 mm thread, 5 mm cannula, 50 mm
    /// long, 11 V threads at 3.175 mm, three tapping threads. Notch pattern
    /// and head radius are assumed defaults.
    pub fn reference() -> Self {
        let core = 7.5;
        let pitch = 3.175;
        Self {
            core_diameter: core,
            outer_diameter: 9.5,
            cannula_diameter: 5.0,
            overall_length: 50.0,
            thread_count: 11,
            thread_pitch: pitch,
            thread_form: ThreadForm::VShape,
            tapping_thread_count: 3,
            head_tip_radius: core / 2.0,
            notches: Some(NotchPattern::default_for(core, pitch)),
            material: MaterialSpec::nitinol(),
        }
    }

    pub fn threaded_length(&self) -> f64 {
        self.thread_count as f64 * self.thread_pitch
    }

    /// Radial thread depth, `(outer - core) / 2`.
    pub fn thread_depth(&self) -> f64 {
        (self.outer_diameter - self.core_diameter) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrillParams {
    /// mm/s
    pub feed_rate: f64,
    /// rev/min
    pub spindle_speed: f64,
    pub drill_diameter: f64,
    pub manipulator_length: f64,
    pub manipulator_od: f64,
    pub manipulator_id: f64,
}

impl DrillParams {
    /// 0.15 mm/s feed, 2250 rpm, 8.5 mm drill, 35 mm manipulator of 6/4 mm tube.
    pub fn reference() -> Self {
        Self {
            feed_rate: 0.15,
            spindle_speed: 2250.0,
            drill_diameter: 8.5,
            manipulator_length: 35.0,
            manipulator_od: 6.0,
            manipulator_id: 4.0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("feed_rate", self.feed_rate),
            ("spindle_speed", self.spindle_speed),
            ("drill_diameter", self.drill_diameter),
            ("manipulator_length", self.manipulator_length),
            ("manipulator_od", self.manipulator_od),
            ("manipulator_id", self.manipulator_id),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::geometry(field, "must be > 0"));
            }
        }
        if self.manipulator_id >= self.manipulator_od {
            return Err(ModelError::geometry(
                "manipulator_id",
                "must be smaller than manipulator_od",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentKind {
    Shank,
    ThreadCrest,
    NotchValley { index: u32, plane: NotchPlane },
    SteeringHead,
}

/// A contiguous arc-length interval of the screw with uniform section type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: f64,
    pub end: f64,
}

/// A screw whose invariants have been checked, with its derived layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedScrewSpec {
    spec: ScrewSpec,
    layout: Vec<Segment>,
}

impl ValidatedScrewSpec {
    pub fn spec(&self) -> &ScrewSpec {
        &self.spec
    }

    pub fn into_spec(self) -> ScrewSpec {
        self.spec
    }

    pub fn layout(&self) -> &[Segment] {
        &self.layout
    }

    pub fn overall_length(&self) -> f64 {
        self.spec.overall_length
    }

    pub fn shank_length(&self) -> f64 {
        self.spec.overall_length - self.spec.threaded_length() - self.spec.head_tip_radius
    }

    /// Start of the threaded section (drive-head side).
    pub fn threads_start(&self) -> f64 {
        self.shank_length()
    }

    /// End of the threaded section (steering-head side).
    pub fn threads_end(&self) -> f64 {
        self.spec.overall_length - self.spec.head_tip_radius
    }

    /// Arc interval of thread `j`, counted from the tip (`j = 0` is the
    /// leading, first-cutting thread).
    pub fn thread_interval(&self, j: u32) -> (f64, f64) {
        let end = self.threads_end() - j as f64 * self.spec.thread_pitch;
        (end - self.spec.thread_pitch, end)
    }

    /// Segment containing `s`. Notch valleys take precedence on shared edges.
    pub fn segment_at(&self, s: f64) -> Option<&Segment> {
        let mut found = None;
        for seg in &self.layout {
            if s >= seg.start - LENGTH_EPS && s <= seg.end + LENGTH_EPS {
                if matches!(seg.kind, SegmentKind::NotchValley { .. }) {
                    return Some(seg);
                }
                found.get_or_insert(seg);
            }
        }
        found
    }

    /// Bending pitch used by the flexure-hinge and contact models: the notch
    /// pitch when notched, the thread pitch otherwise.
    pub fn bending_pitch(&self) -> f64 {
        self.spec
            .notches
            .as_ref()
            .map_or(self.spec.thread_pitch, |n| n.pitch)
    }
}

pub fn validate_screw_spec(spec: ScrewSpec) -> Result<ValidatedScrewSpec, ModelError> {
    let lengths = [
        ("core_diameter", spec.core_diameter),
        ("outer_diameter", spec.outer_diameter),
        ("cannula_diameter", spec.cannula_diameter),
        ("overall_length", spec.overall_length),
        ("thread_pitch", spec.thread_pitch),
        ("head_tip_radius", spec.head_tip_radius),
    ];
    for (field, v) in lengths {
        if !(v.is_finite() && v > 0.0) {
            return Err(ModelError::geometry(field, "must be a finite length > 0"));
        }
    }
    if spec.cannula_diameter >= spec.core_diameter {
        return Err(ModelError::geometry(
            "cannula_diameter",
            "must be smaller than core_diameter",
        ));
    }
    if spec.core_diameter >= spec.outer_diameter {
        return Err(ModelError::geometry(
            "core_diameter",
            "must be smaller than outer_diameter",
        ));
    }
    if spec.thread_count == 0 {
        return Err(ModelError::geometry("thread_count", "must be >= 1"));
    }
    if spec.threaded_length() > spec.overall_length + LENGTH_EPS {
        return Err(ModelError::geometry(
            "thread_count",
            format!(
                "thread_count x thread_pitch = {} exceeds overall_length {}",
                spec.threaded_length(),
                spec.overall_length
            ),
        ));
    }
    if spec.threaded_length() + spec.head_tip_radius > spec.overall_length + LENGTH_EPS {
        return Err(ModelError::geometry(
            "head_tip_radius",
            "threaded length plus steering head exceeds overall_length",
        ));
    }
    if spec.tapping_thread_count > spec.thread_count {
        return Err(ModelError::geometry(
            "tapping_thread_count",
            "must not exceed thread_count",
        ));
    }
    if let Some(n) = &spec.notches {
        validate_notches(n, &spec)?;
    }
    spec.material.validate()?;

    let layout = build_layout(&spec);
    Ok(ValidatedScrewSpec { spec, layout })
}

fn validate_notches(n: &NotchPattern, spec: &ScrewSpec) -> Result<(), ModelError> {
    let max_depth =
        (spec.core_diameter - spec.cannula_diameter) / 2.0 + spec.cannula_diameter / 2.0;
    if !(n.depth.is_finite() && n.depth > 0.0 && n.depth <= max_depth + LENGTH_EPS) {
        return Err(ModelError::geometry(
            "notches.depth",
            format!("must lie in (0, {max_depth}]"),
        ));
    }
    if !(n.width.is_finite() && n.width > 0.0) {
        return Err(ModelError::geometry("notches.width", "must be > 0"));
    }
    if !(n.pitch.is_finite() && n.width < n.pitch) {
        return Err(ModelError::geometry(
            "notches.width",
            "must be smaller than notches.pitch",
        ));
    }
    let o = &n.orientation;
    let alternates = o.len() >= 2
        && o.len().is_multiple_of(2)
        && (0..o.len()).all(|i| o[i] != o[(i + 1) % o.len()]);
    if !alternates {
        return Err(ModelError::geometry(
            "notches.orientation",
            "must alternate between the two orthogonal planes",
        ));
    }
    Ok(())
}

fn build_layout(spec: &ScrewSpec) -> Vec<Segment> {
    let shank = spec.overall_length - spec.threaded_length() - spec.head_tip_radius;
    let thread_start = shank;
    let thread_end = shank + spec.threaded_length();
    let mut layout = Vec::new();
    if shank > LENGTH_EPS {
        layout.push(Segment {
            kind: SegmentKind::Shank,
            start: 0.0,
            end: shank,
        });
    }
    match &spec.notches {
        None => {
            for k in 0..spec.thread_count {
                let start = thread_start + k as f64 * spec.thread_pitch;
                layout.push(Segment {
                    kind: SegmentKind::ThreadCrest,
                    start,
                    end: start + spec.thread_pitch,
                });
            }
        }
        Some(n) => {
            let count = ((spec.threaded_length() + LENGTH_EPS) / n.pitch).floor() as u32;
            let mut cursor = thread_start;
            for k in 0..count {
                let centre = thread_start + (k as f64 + 0.5) * n.pitch;
                let (a, b) = (centre - n.width / 2.0, centre + n.width / 2.0);
                if a > cursor {
                    layout.push(Segment {
                        kind: SegmentKind::ThreadCrest,
                        start: cursor,
                        end: a,
                    });
                }
                layout.push(Segment {
                    kind: SegmentKind::NotchValley {
                        index: k,
                        plane: n.plane_of(k as usize),
                    },
                    start: a,
                    end: b,
                });
                cursor = b;
            }
            if thread_end > cursor + LENGTH_EPS {
                layout.push(Segment {
                    kind: SegmentKind::ThreadCrest,
                    start: cursor,
                    end: thread_end,
                });
            }
        }
    }
    layout.push(Segment {
        kind: SegmentKind::SteeringHead,
        start: thread_end,
        end: spec.overall_length,
    });
    layout
}

/// Effective section of the shaft at one station. Plane `a` is the plane of
/// the planar tunnel; a notch only reduces the moment of its own plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionProps {
    pub station: f64,
    /// mm²
    pub area: f64,
    /// mm⁴
    pub second_moment_plane_a: f64,
    pub second_moment_plane_b: f64,
    /// mm⁴
    pub torsion_constant: f64,
    pub extreme_fiber_distance_a: f64,
    pub extreme_fiber_distance_b: f64,
    /// Distance from the shear centre to the most stressed torsion fibre.
    pub torsion_fiber_distance: f64,
    /// Plastic section modulus in the weaker bending plane, mm³.
    pub plastic_modulus: f64,
    pub notch_plane: Option<NotchPlane>,
}

impl SectionProps {
    pub fn second_moment(&self, plane: NotchPlane) -> f64 {
        match plane {
            NotchPlane::A => self.second_moment_plane_a,
            NotchPlane::B => self.second_moment_plane_b,
        }
    }

    pub fn extreme_fiber_distance(&self, plane: NotchPlane) -> f64 {
        match plane {
            NotchPlane::A => self.extreme_fiber_distance_a,
            NotchPlane::B => self.extreme_fiber_distance_b,
        }
    }
}

/// Exact properties of the annulus `D_i < d < D_o`.
pub fn annulus_section(outer_diameter: f64, inner_diameter: f64) -> SectionProps {
    let (o2, i2) = (outer_diameter.powi(2), inner_diameter.powi(2));
    let area = PI * (o2 - i2) / 4.0;
    let i = PI * (o2 * o2 - i2 * i2) / 64.0;
    let r = outer_diameter / 2.0;
    SectionProps {
        station: 0.0,
        area,
        second_moment_plane_a: i,
        second_moment_plane_b: i,
        torsion_constant: 2.0 * i,
        extreme_fiber_distance_a: r,
        extreme_fiber_distance_b: r,
        torsion_fiber_distance: r,
        plastic_modulus: (outer_diameter.powi(3) - inner_diameter.powi(3)) / 6.0,
        notch_plane: None,
    }
}

/// Area, first and second moments of the part `y <= c` of a disc of radius
/// `a` centred at the origin.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    area: f64,
    first_y: f64,
    second_xx: f64,
    second_yy: f64,
}

impl std::ops::Sub for Moments {
    type Output = Moments;
    fn sub(self, o: Moments) -> Moments {
        Moments {
            area: self.area - o.area,
            first_y: self.first_y - o.first_y,
            second_xx: self.second_xx - o.second_xx,
            second_yy: self.second_yy - o.second_yy,
        }
    }
}

fn disc_below(a: f64, c: f64) -> Moments {
    let u = c.clamp(-a, a);
    let w = (a * a - u * u).max(0.0).sqrt();
    let phi = (u / a).clamp(-1.0, 1.0).asin() + PI / 2.0;
    let a4 = a.powi(4);
    Moments {
        area: u * w + a * a * phi,
        first_y: -2.0 / 3.0 * w.powi(3),
        second_xx: u / 4.0 * (2.0 * u * u - a * a) * w + a4 / 4.0 * phi,
        second_yy: u / 12.0 * (5.0 * a * a - 2.0 * u * u) * w + a4 / 4.0 * phi,
    }
}

fn annulus_below(outer_r: f64, inner_r: f64, c: f64) -> Moments {
    disc_below(outer_r, c) - disc_below(inner_r, c)
}

/// Section of an annulus cut by a single-sided planar notch of radial depth
/// `depth` measured from the outer surface. The material with `y > R - depth`
/// is removed; once the cut passes the cannula the remaining section near the
/// cut face is two lateral webs joined by the far wall.
///
/// Plane `a` is the notch plane. Plane `b` keeps the annulus values.
pub fn notched_section(outer_diameter: f64, inner_diameter: f64, depth: f64) -> SectionProps {
    let (big_r, r) = (outer_diameter / 2.0, inner_diameter / 2.0);
    let annulus = annulus_section(outer_diameter, inner_diameter);
    let cut = big_r - depth.clamp(0.0, big_r);
    let m = annulus_below(big_r, r, cut);
    let ybar = m.first_y / m.area;
    let i_notch = m.second_xx - m.area * ybar * ybar;
    let c_notch = (cut - ybar).max(big_r + ybar);

    let wall = big_r - r;
    let (torsion_constant, torsion_fiber_distance) = if cut < r {
        // open section: the cannula is breached, thin-walled open-profile torsion
        let mean_r = (big_r + r) / 2.0;
        let arc = 2.0 * (PI - (cut / mean_r).clamp(-1.0, 1.0).acos());
        (arc * mean_r * wall.powi(3) / 3.0, wall)
    } else {
        let polar = i_notch + m.second_yy;
        let corner = (big_r * big_r - 2.0 * cut * ybar + ybar * ybar).sqrt();
        (polar, corner)
    };

    SectionProps {
        station: 0.0,
        area: m.area,
        second_moment_plane_a: i_notch,
        second_moment_plane_b: annulus.second_moment_plane_b,
        torsion_constant,
        extreme_fiber_distance_a: c_notch,
        extreme_fiber_distance_b: annulus.extreme_fiber_distance_b,
        torsion_fiber_distance,
        plastic_modulus: plastic_modulus_below(big_r, r, cut),
        notch_plane: Some(NotchPlane::A),
    }
}

/// Plastic section modulus about the equal-area axis for the region `y <= cut`
/// of the annulus.
fn plastic_modulus_below(big_r: f64, r: f64, cut: f64) -> f64 {
    let total = annulus_below(big_r, r, cut);
    let half = total.area / 2.0;
    let (mut lo, mut hi) = (-big_r, cut);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if annulus_below(big_r, r, mid).area < half {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let yp = 0.5 * (lo + hi);
    let below = annulus_below(big_r, r, yp);
    let above = total - below;
    (above.first_y - yp * above.area) + (yp * below.area - below.first_y)
}

/// Section properties at arc length `s`.
pub fn section_properties(spec: &ValidatedScrewSpec, s: f64) -> Result<SectionProps, ModelError> {
    let len = spec.overall_length();
    if !(s.is_finite() && (0.0..=len).contains(&s)) {
        return Err(ModelError::OutOfRange {
            what: "station",
            value: s,
            min: 0.0,
            max: len,
        });
    }
    let sp = spec.spec();
    let mut props = match spec.segment_at(s).map(|seg| seg.kind) {
        Some(SegmentKind::NotchValley { plane, .. }) => {
            let depth = sp.notches.as_ref().map_or(0.0, |n| n.depth);
            let notched = notched_section(sp.core_diameter, sp.cannula_diameter, depth);
            match plane {
                NotchPlane::A => notched,
                NotchPlane::B => SectionProps {
                    second_moment_plane_a: notched.second_moment_plane_b,
                    second_moment_plane_b: notched.second_moment_plane_a,
                    extreme_fiber_distance_a: notched.extreme_fiber_distance_b,
                    extreme_fiber_distance_b: notched.extreme_fiber_distance_a,
                    notch_plane: Some(NotchPlane::B),
                    ..notched
                },
            }
        }
        _ => annulus_section(sp.core_diameter, sp.cannula_diameter),
    };
    props.station = s;
    Ok(props)
}

/// Radial fit of the screw in a drilled tunnel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferenceReport {
    pub tunnel_diameter: f64,
    /// `(tunnel - core) / 2`
    pub core_clearance: f64,
    /// `(outer - tunnel) / 2`
    pub bite_depth: f64,
    pub body_fits: bool,
    pub threads_engage: bool,
    pub feasible: bool,
}

pub fn interference(spec: &ValidatedScrewSpec, tunnel: &TunnelSpec) -> InterferenceReport {
    interference_with_diameter(spec, tunnel.diameter)
}

pub(crate) fn interference_with_diameter(
    spec: &ValidatedScrewSpec,
    tunnel_diameter: f64,
) -> InterferenceReport {
    let sp = spec.spec();
    let core_clearance = (tunnel_diameter - sp.core_diameter) / 2.0;
    let bite_depth = (sp.outer_diameter - tunnel_diameter) / 2.0;
    let body_fits = core_clearance >= 0.0;
    let threads_engage = bite_depth > 0.0;
    InterferenceReport {
        tunnel_diameter,
        core_clearance,
        bite_depth,
        body_fits,
        threads_engage,
        feasible: body_fits && threads_engage,
    }
}
