//! One-dimensional rod mechanics for the screw in a curved tunnel.
//!
//! Bending is kinematic: the screw is forced onto the tunnel centerline and
//! the rotation of each rigid inter-notch segment is lumped into the next
//! notch ligament (flexure-hinge model). Strain is mapped to stress with a
//! bilinear superelastic law. Torque transmission integrates friction and
//! cutting resistance from the drive head to the tip.

use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{
    section_properties, MaterialSpec, ModelError, NotchPlane, SectionProps, SegmentKind,
    ValidatedScrewSpec, LENGTH_EPS,
};

/// Default station density along arc length.
pub const DEFAULT_STATIONS_PER_MM: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RodError {
    #[error("arc length {s} outside [0, {total}]")]
    OutOfRange { s: f64, total: f64 },
    #[error("invalid centerline: {0}")]
    InvalidCenterline(String),
    #[error("invalid interval [{start}, {end}]: {reason}")]
    InvalidInterval {
        start: f64,
        end: f64,
        reason: String,
    },
    #[error("stiffness matrix is singular (degenerate section or modulus)")]
    SingularSystem,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Planar quadratic centerline `y(x) = tip_offset * (x / length)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Centerline {
    pub tip_offset: f64,
    pub length: f64,
    pub stations_per_mm: f64,
}

impl Centerline {
    pub fn new(tip_offset: f64, length: f64) -> Result<Self, RodError> {
        Self::with_resolution(tip_offset, length, DEFAULT_STATIONS_PER_MM)
    }

    pub fn with_resolution(
        tip_offset: f64,
        length: f64,
        stations_per_mm: f64,
    ) -> Result<Self, RodError> {
        if !(length.is_finite() && length >= 0.0) {
            return Err(RodError::InvalidCenterline("length must be >= 0".into()));
        }
        if !tip_offset.is_finite() || (length == 0.0 && tip_offset != 0.0) {
            return Err(RodError::InvalidCenterline(
                "tip offset must be finite and zero for a zero-length centerline".into(),
            ));
        }
        if !(stations_per_mm.is_finite() && stations_per_mm > 0.0) {
            return Err(RodError::InvalidCenterline(
                "stations_per_mm must be > 0".into(),
            ));
        }
        Ok(Self {
            tip_offset,
            length,
            stations_per_mm,
        })
    }

    pub fn straight(length: f64) -> Self {
        Self {
            tip_offset: 0.0,
            length,
            stations_per_mm: DEFAULT_STATIONS_PER_MM,
        }
    }

    /// `y'' = 2 delta / L^2`, constant along x.
    fn second_derivative(&self) -> f64 {
        if self.length == 0.0 {
            0.0
        } else {
            2.0 * self.tip_offset / (self.length * self.length)
        }
    }

    pub fn y(&self, x: f64) -> f64 {
        0.5 * self.second_derivative() * x * x
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.second_derivative() * x
    }

    /// Arc length from the vertex to abscissa `x`, closed form.
    pub fn arc_length_to(&self, x: f64) -> f64 {
        let a = self.second_derivative();
        if a == 0.0 {
            return x;
        }
        let ax = a * x;
        (ax * (1.0 + ax * ax).sqrt() + ax.asinh()) / (2.0 * a)
    }

    pub fn total_arc_length(&self) -> f64 {
        self.arc_length_to(self.length)
    }

    /// Abscissa at arc length `s` (Newton on the monotone arc-length map).
    pub fn x_at(&self, s: f64) -> Result<f64, RodError> {
        let total = self.total_arc_length();
        if !(s.is_finite() && s >= -LENGTH_EPS && s <= total + LENGTH_EPS) {
            return Err(RodError::OutOfRange { s, total });
        }
        let s = s.clamp(0.0, total);
        if self.second_derivative() == 0.0 {
            return Ok(s);
        }
        let (mut lo, mut hi) = (0.0, self.length);
        let mut x = s.min(self.length);
        for _ in 0..100 {
            let f = self.arc_length_to(x) - s;
            if f.abs() <= 1e-13 * total.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let step = x - f / (1.0 + self.slope(x).powi(2)).sqrt();
            x = if step > lo && step < hi {
                step
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(x)
    }

    pub fn curvature_at_x(&self, x: f64) -> f64 {
        let a = self.second_derivative();
        a.abs() / (1.0 + (a * x).powi(2)).powf(1.5)
    }

    /// Point on the curve at arc length `s`.
    pub fn point(&self, s: f64) -> Result<(f64, f64), RodError> {
        let x = self.x_at(s)?;
        Ok((x, self.y(x)))
    }
}

/// Unsigned curvature (1/mm) at arc length `s`.
pub fn centerline_curvature(c: &Centerline, s: f64) -> Result<f64, RodError> {
    let x = c.x_at(s)?;
    Ok(c.curvature_at_x(x))
}

/// Closed arc-length interval on the screw, `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcInterval {
    pub start: f64,
    pub end: f64,
}

impl ArcInterval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    fn overlap(&self, a: f64, b: f64) -> f64 {
        (self.end.min(b) - self.start.max(a)).max(0.0)
    }
}

/// Uniform grid over `[a, b]` with spacing at most `1 / rate`.
pub(crate) fn station_grid(a: f64, b: f64, rate: f64) -> Vec<f64> {
    let len = b - a;
    if len <= 0.0 {
        return vec![a];
    }
    let n = ((len * rate) - 1e-9).ceil().max(1.0) as usize;
    let h = len / n as f64;
    (0..=n)
        .map(|k| if k == n { b } else { a + k as f64 * h })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CantileverSolution {
    pub tip_deflection: f64,
    pub elements: usize,
    /// False when `length < 10 * extreme fiber distance`; the solve still runs.
    pub slender: bool,
}

/// Tip deflection of a clamped prismatic beam under a transverse tip load,
/// assembled from cubic Hermite Euler–Bernoulli elements.
pub fn solve_cantilever(
    length: f64,
    section: &SectionProps,
    plane: NotchPlane,
    youngs_modulus: f64,
    tip_load: f64,
    elements: usize,
) -> Result<CantileverSolution, RodError> {
    let ei = youngs_modulus * section.second_moment(plane);
    if !(ei.is_finite() && ei > 0.0 && length > 0.0) || elements == 0 {
        return Err(RodError::SingularSystem);
    }
    let slender = length >= 10.0 * section.extreme_fiber_distance(plane);

    let h = length / elements as f64;
    let k = ei / h.powi(3);
    #[rustfmt::skip]
    let ke = [
        [ 12.0,      6.0 * h,      -12.0,      6.0 * h],
        [ 6.0 * h,   4.0 * h * h,  -6.0 * h,   2.0 * h * h],
        [-12.0,     -6.0 * h,       12.0,     -6.0 * h],
        [ 6.0 * h,   2.0 * h * h,  -6.0 * h,   4.0 * h * h],
    ];
    // two dofs per node (w, theta); node 0 clamped and removed
    let ndof = 2 * elements;
    let mut kg = CooMatrix::<f64>::new(ndof, ndof);
    for e in 0..elements {
        let dofs = [
            2 * e as isize - 2,
            2 * e as isize - 1,
            2 * e as isize,
            2 * e as isize + 1,
        ];
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                if gi >= 0 && gj >= 0 {
                    kg.push(gi as usize, gj as usize, k * ke[i][j]);
                }
            }
        }
    }
    let mut f = DMatrix::<f64>::zeros(ndof, 1);
    f[(ndof - 2, 0)] = tip_load;
    let chol = CscCholesky::factor(&CscMatrix::from(&kg)).map_err(|_| RodError::SingularSystem)?;
    let u = chol.solve(&f);
    Ok(CantileverSolution {
        tip_deflection: u[(ndof - 2, 0)],
        elements,
        slender,
    })
}

/// Bilinear superelastic idealisation: linear to the yield stress, a flat
/// plateau to the recoverable strain, then linear again with the elastic
/// modulus (unrecoverable range).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperelasticLaw {
    pub youngs_modulus: f64,
    pub plateau_stress: f64,
    pub recoverable_strain: f64,
}

impl From<&MaterialSpec> for SuperelasticLaw {
    fn from(m: &MaterialSpec) -> Self {
        Self {
            youngs_modulus: m.youngs_modulus,
            plateau_stress: m.yield_strength,
            recoverable_strain: m.recoverable_strain,
        }
    }
}

impl SuperelasticLaw {
    pub fn stress(&self, strain: f64) -> f64 {
        let e = strain.abs();
        let sy = self.plateau_stress / self.youngs_modulus;
        let sigma = if e <= sy {
            self.youngs_modulus * e
        } else if e <= self.recoverable_strain {
            self.plateau_stress
        } else {
            self.plateau_stress + self.youngs_modulus * (e - self.recoverable_strain)
        };
        sigma.copysign(strain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Bending state of the engaged part of the screw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StressField {
    /// Screw arc length, mm.
    pub stations: Vec<f64>,
    pub curvature: Vec<f64>,
    /// Bending strain at the extreme fibre of the active ligament.
    pub strain: Vec<f64>,
    /// MPa
    pub stress: Vec<f64>,
    pub utilization: Vec<f64>,
    pub max_utilization: f64,
    pub max_utilization_station: f64,
    pub max_stress: f64,
    pub verdict: Verdict,
}

fn check_engaged(
    spec: &ValidatedScrewSpec,
    c: &Centerline,
    engaged: ArcInterval,
) -> Result<(), RodError> {
    let bad = |reason: &str| RodError::InvalidInterval {
        start: engaged.start,
        end: engaged.end,
        reason: reason.into(),
    };
    if !(engaged.start.is_finite() && engaged.end.is_finite() && engaged.start <= engaged.end) {
        return Err(bad("start must not exceed end"));
    }
    if engaged.start < -LENGTH_EPS || engaged.end > spec.overall_length() + LENGTH_EPS {
        return Err(bad("outside the screw"));
    }
    if engaged.length() > c.total_arc_length() + LENGTH_EPS {
        return Err(bad("longer than the centerline"));
    }
    Ok(())
}

/// Strain at station `s` of the screw bent to curvature `kappa` in plane a.
fn bending_strain(spec: &ValidatedScrewSpec, s: f64, kappa: f64) -> Result<f64, RodError> {
    let sp = spec.spec();
    let kind = spec.segment_at(s).map(|seg| seg.kind);
    if matches!(kind, Some(SegmentKind::SteeringHead)) {
        return Ok(0.0);
    }
    match &sp.notches {
        None => {
            let props = section_properties(spec, s)?;
            Ok(kappa * props.extreme_fiber_distance_a)
        }
        Some(n) => match kind {
            Some(SegmentKind::NotchValley {
                plane: NotchPlane::A,
                ..
            }) => {
                let props = section_properties(spec, s)?;
                Ok(kappa * n.pitch * props.extreme_fiber_distance_a / n.width)
            }
            // rigid segments and notches of the orthogonal plane
            _ => Ok(0.0),
        },
    }
}

/// Kinematic bending of the engaged interval onto the centerline. Screw
/// station `engaged.start` sits at the centerline vertex.
pub fn prescribed_shape_stress(
    spec: &ValidatedScrewSpec,
    c: &Centerline,
    engaged: ArcInterval,
) -> Result<StressField, RodError> {
    check_engaged(spec, c, engaged)?;
    let m = &spec.spec().material;
    let law = SuperelasticLaw::from(m);
    let total = c.total_arc_length();
    let stations = station_grid(engaged.start, engaged.end, c.stations_per_mm);
    let n = stations.len();
    let (mut curvature, mut strain, mut stress, mut utilization) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for &s in &stations {
        let kappa = centerline_curvature(c, (s - engaged.start).min(total))?;
        let eps = bending_strain(spec, s, kappa)?;
        curvature.push(kappa);
        strain.push(eps);
        stress.push(law.stress(eps));
        utilization.push(eps.abs() / m.recoverable_strain);
    }
    let (mut imax, mut umax) = (0, f64::NEG_INFINITY);
    for (i, &u) in utilization.iter().enumerate() {
        if u > umax {
            (imax, umax) = (i, u);
        }
    }
    let max_stress = stress.iter().fold(0.0f64, |acc, s| acc.max(s.abs()));
    let pass = umax <= 1.0 && max_stress <= m.ultimate_strength;
    Ok(StressField {
        max_utilization_station: stations[imax],
        stations,
        curvature,
        strain,
        stress,
        utilization,
        max_utilization: umax,
        max_stress,
        verdict: Verdict::from_pass(pass),
    })
}

/// Cutting resistance applied by the tapping threads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CuttingLoad {
    None,
    /// Uniform torque density (N·mm per mm) over a screw arc interval.
    Uniform {
        density: f64,
        over: ArcInterval,
    },
}

/// Knobs of the conformity contact model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContactModel {
    /// Dimensionless conformity factor beta in `q = beta E I kappa / p^2`.
    pub conformity: f64,
    /// Resisting torque at the tip, N·mm.
    pub tip_reaction: f64,
}

impl Default for ContactModel {
    fn default() -> Self {
        Self {
            conformity: 1.0,
            tip_reaction: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorqueField {
    /// Screw arc length, head at 0.
    pub stations: Vec<f64>,
    pub curvature: Vec<f64>,
    /// Internal torque under the applied head torque, N·mm.
    pub torque: Vec<f64>,
    /// Torque needed to turn everything beyond each station, N·mm.
    pub required_torque: Vec<f64>,
    /// MPa
    pub shear_stress: Vec<f64>,
    /// Distributed friction plus cutting density, N·mm per mm.
    pub resistance_density: Vec<f64>,
    pub head_torque: f64,
    pub head_torque_required: f64,
    /// Resultant contact reactions at the engaged ends, N.
    pub end_reactions: [f64; 2],
    /// First station where the applied torque is used up.
    pub exhausted_at: Option<f64>,
    pub max_shear_stress: f64,
    pub verdict: Verdict,
}

/// Torque along the screw when `head_torque` is applied at the drive head and
/// the engaged interval is resisted by contact friction and cutting.
pub fn torque_transmission(
    spec: &ValidatedScrewSpec,
    c: &Centerline,
    engaged: ArcInterval,
    head_torque: f64,
    bone: &MaterialSpec,
    cutting: CuttingLoad,
    contact: ContactModel,
) -> Result<TorqueField, RodError> {
    check_engaged(spec, c, engaged)?;
    let sp = spec.spec();
    let total = c.total_arc_length();
    let r_mean = (sp.outer_diameter + sp.core_diameter) / 4.0;
    let pitch = spec.bending_pitch();
    let mu = bone.friction_coefficient;
    let e_mod = sp.material.youngs_modulus;

    let props_at = |s: f64| section_properties(spec, s.clamp(0.0, spec.overall_length()));
    let kappa_at = |s: f64| -> Result<f64, RodError> {
        if s < engaged.start || s > engaged.end {
            Ok(0.0)
        } else {
            centerline_curvature(c, (s - engaged.start).min(total))
        }
    };
    let line_load = |s: f64| -> Result<f64, RodError> {
        if s < engaged.start || s > engaged.end {
            return Ok(0.0);
        }
        let i_eff = props_at(s)?.second_moment_plane_a;
        Ok(contact.conformity * e_mod * i_eff * kappa_at(s)? / (pitch * pitch))
    };
    let cutting_density = |s: f64| match cutting {
        CuttingLoad::Uniform { density, over } if s >= over.start && s <= over.end => density,
        _ => 0.0,
    };

    let stations = station_grid(0.0, spec.overall_length(), c.stations_per_mm);
    let n = stations.len();

    // per-cell resistance: friction by midpoint rule on the engaged overlap,
    // cutting integrated exactly
    let mut cell = vec![0.0; n.saturating_sub(1)];
    let (mut q_total, mut q_moment) = (0.0, 0.0);
    for k in 0..n.saturating_sub(1) {
        let (a, b) = (stations[k], stations[k + 1]);
        let ov = engaged.overlap(a, b);
        if ov > 0.0 {
            let mid = 0.5 * (a.max(engaged.start) + b.min(engaged.end));
            let q = line_load(mid)?;
            q_total += q * ov;
            q_moment += q * ov * (mid - engaged.start);
            cell[k] += mu * q * r_mean * ov;
        }
        if let CuttingLoad::Uniform { density, over } = cutting {
            cell[k] += density * over.overlap(a, b);
        }
    }

    // point reactions closing force and moment balance of the line load
    let ell = engaged.length();
    let (r_start, r_end) = if ell > 0.0 {
        let rb = q_moment / ell;
        (q_total - rb, rb)
    } else {
        (0.0, 0.0)
    };
    let mut point_torques = [
        (engaged.start, mu * r_start.abs() * r_mean),
        (engaged.end, mu * r_end.abs() * r_mean),
    ];
    point_torques.sort_by(|x, y| x.0.total_cmp(&y.0));

    // resistance lying strictly before station k, and at or beyond it
    let point_before = |s: f64| -> f64 {
        point_torques
            .iter()
            .filter(|(p, _)| *p < s - LENGTH_EPS)
            .map(|(_, t)| t)
            .sum()
    };
    let points_total: f64 = point_torques.iter().map(|(_, t)| t).sum();
    let distributed_total: f64 = cell.iter().sum();
    let head_required = contact.tip_reaction + points_total + distributed_total;

    let mut torque = Vec::with_capacity(n);
    let mut required = Vec::with_capacity(n);
    let mut shear = Vec::with_capacity(n);
    let mut density = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    let mut exhausted_at = None;
    let mut before = 0.0;
    for (k, &s) in stations.iter().enumerate() {
        if k > 0 {
            before += cell[k - 1];
        }
        let last = k + 1 == n;
        let spent = before + if last { points_total } else { point_before(s) };
        // a stalled screw carries no torque past the stall point
        let applied = (head_torque - spent).max(0.0);
        let tip_demand = if last { contact.tip_reaction } else { 0.0 };
        if exhausted_at.is_none()
            && head_torque - spent - tip_demand < -1e-12 * head_required.max(1.0)
        {
            exhausted_at = Some(s);
        }
        let props = props_at(s)?;
        torque.push(applied);
        required.push(head_required - spent);
        shear.push(applied * props.torsion_fiber_distance / props.torsion_constant);
        density.push(mu * line_load(s)? * r_mean + cutting_density(s));
        curvature.push(kappa_at(s)?);
    }
    let max_shear = shear.iter().cloned().fold(0.0, f64::max);
    let pass = exhausted_at.is_none() && max_shear <= sp.material.shear_yield();
    Ok(TorqueField {
        stations,
        curvature,
        torque,
        required_torque: required,
        shear_stress: shear,
        resistance_density: density,
        head_torque,
        head_torque_required: head_required,
        end_reactions: [r_start, r_end],
        exhausted_at,
        max_shear_stress: max_shear,
        verdict: Verdict::from_pass(pass),
    })
}

/// Ratio of capacity to demand; `Unbounded` when nothing is loaded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SafetyFactor {
    Finite(f64),
    Unbounded,
}

impl SafetyFactor {
    pub fn value(self) -> f64 {
        match self {
            SafetyFactor::Finite(v) => v,
            SafetyFactor::Unbounded => f64::INFINITY,
        }
    }

    fn from_min_ratio(limit: f64, demands: impl Iterator<Item = f64>) -> Self {
        let worst = demands.map(f64::abs).fold(0.0, f64::max);
        if worst == 0.0 {
            SafetyFactor::Unbounded
        } else {
            SafetyFactor::Finite(limit / worst)
        }
    }
}

impl Serialize for SafetyFactor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SafetyFactor::Finite(v) => s.serialize_f64(*v),
            SafetyFactor::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

pub enum FieldRef<'a> {
    Bending(&'a StressField),
    Torsion(&'a TorqueField),
}

/// Minimum over stations of limit / demand: recoverable strain for bending,
/// shear yield for torsion.
pub fn safety_factor(field: FieldRef<'_>, m: &MaterialSpec) -> SafetyFactor {
    match field {
        FieldRef::Bending(f) => {
            SafetyFactor::from_min_ratio(m.recoverable_strain, f.strain.iter().copied())
        }
        FieldRef::Torsion(f) => {
            SafetyFactor::from_min_ratio(m.shear_yield(), f.shear_stress.iter().copied())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{annulus_section, validate_screw_spec, ScrewSpec};

    fn reference() -> ValidatedScrewSpec {
        validate_screw_spec(ScrewSpec::reference()).unwrap()
    }

    fn threaded(v: &ValidatedScrewSpec) -> ArcInterval {
        ArcInterval::new(v.threads_start(), v.threads_end())
    }

    #[test]
    fn straight_line_has_zero_curvature() {
        let c = Centerline::straight(35.0);
        for s in [0.0, 10.0, 35.0] {
            assert_eq!(centerline_curvature(&c, s).unwrap(), 0.0);
        }
    }

    #[test]
    fn vertex_curvature_closed_form() {
        let c = Centerline::new(40.0, 35.0).unwrap();
        assert!((centerline_curvature(&c, 0.0).unwrap() - 0.065_306_122_448_979_6).abs() < 1e-12);
        let c = Centerline::new(10.0, 35.0).unwrap();
        assert!((centerline_curvature(&c, 0.0).unwrap() - 0.016_326_530_612_244_9).abs() < 1e-12);
    }

    #[test]
    fn curvature_out_of_range() {
        let c = Centerline::new(10.0, 35.0).unwrap();
        let total = c.total_arc_length();
        assert!(matches!(
            centerline_curvature(&c, total + 1.0),
            Err(RodError::OutOfRange { .. })
        ));
    }

    #[test]
    fn arc_length_inverse_round_trips() {
        let c = Centerline::new(40.0, 35.0).unwrap();
        for x in [0.0, 1.0, 17.5, 34.9, 35.0] {
            let s = c.arc_length_to(x);
            assert!((c.x_at(s).unwrap() - x).abs() < 1e-9);
        }
    }

    #[test]
    fn cantilever_zero_load() {
        let sec = annulus_section(7.5, 5.0);
        let sol = solve_cantilever(100.0, &sec, NotchPlane::A, 83_000.0, 0.0, 64).unwrap();
        assert_eq!(sol.tip_deflection, 0.0);
    }

    #[test]
    fn cantilever_reference_case() {
        let sec = annulus_section(7.5, 5.0);
        let sol = solve_cantilever(100.0, &sec, NotchPlane::A, 83_000.0, 10.0, 64).unwrap();
        // 10 * 100^3 / (3 * 83000 * 124.6359) = 0.3222236
        assert!((sol.tip_deflection - 0.322_223_612_927_724_83).abs() < 1e-6);
        assert!(sol.slender);
    }

    #[test]
    fn cantilever_doubling_inertia_halves_deflection() {
        let sec = annulus_section(7.5, 5.0);
        let mut stiff = sec;
        stiff.second_moment_plane_a *= 2.0;
        let a = solve_cantilever(80.0, &sec, NotchPlane::A, 83_000.0, 5.0, 64).unwrap();
        let b = solve_cantilever(80.0, &stiff, NotchPlane::A, 83_000.0, 5.0, 64).unwrap();
        assert!((a.tip_deflection / b.tip_deflection - 2.0).abs() < 1e-9);
    }

    #[test]
    fn cantilever_degenerate_and_stubby() {
        let mut sec = annulus_section(7.5, 5.0);
        let stubby = solve_cantilever(20.0, &sec, NotchPlane::A, 83_000.0, 5.0, 8).unwrap();
        assert!(!stubby.slender);
        sec.second_moment_plane_a = 0.0;
        assert_eq!(
            solve_cantilever(100.0, &sec, NotchPlane::A, 83_000.0, 5.0, 8),
            Err(RodError::SingularSystem)
        );
    }

    #[test]
    fn superelastic_law_branches() {
        let law = SuperelasticLaw::from(&MaterialSpec::nitinol());
        assert_eq!(law.stress(0.001), 83.0);
        assert_eq!(law.stress(0.02), 700.0);
        assert_eq!(law.stress(0.06), 700.0);
        assert!((law.stress(0.07) - (700.0 + 830.0)).abs() < 1e-9);
        assert_eq!(law.stress(-0.02), -700.0);
    }

    #[test]
    fn straight_tunnel_gives_zero_strain() {
        let v = reference();
        let f = prescribed_shape_stress(&v, &Centerline::straight(35.0), threaded(&v)).unwrap();
        assert!(f.strain.iter().all(|&e| e == 0.0));
        assert_eq!(f.verdict, Verdict::Pass);
        assert_eq!(
            safety_factor(FieldRef::Bending(&f), &v.spec().material),
            SafetyFactor::Unbounded
        );
    }

    #[test]
    fn solid_shaft_fails_the_forty_mm_shape() {
        let mut s = ScrewSpec::reference();
        s.notches = None;
        let v = validate_screw_spec(s).unwrap();
        let c = Centerline::new(40.0, 35.0).unwrap();
        let f = prescribed_shape_stress(&v, &c, threaded(&v)).unwrap();
        // kappa * c = 0.0653 * 3.75 at the vertex
        assert!((f.strain[0] - 0.065_306_122_448_979_6 * 3.75).abs() < 1e-12);
        assert_eq!(f.verdict, Verdict::Fail);
    }

    #[test]
    fn ligament_strain_follows_flexure_hinge_formula() {
        let v = reference();
        let c = Centerline::new(10.0, 35.0).unwrap();
        let f = prescribed_shape_stress(&v, &c, threaded(&v)).unwrap();
        let (i, _) = f.strain.iter().enumerate().find(|(_, &e)| e > 0.0).unwrap();
        let s = f.stations[i];
        let p = section_properties(&v, s).unwrap();
        let expected = f.curvature[i] * 3.175 * p.extreme_fiber_distance_a / 1.0;
        assert!((f.strain[i] - expected).abs() < 1e-12);
        assert_eq!(p.notch_plane, Some(NotchPlane::A));
    }

    #[test]
    fn linear_regime_stress_scales_with_modulus() {
        let mut s = ScrewSpec::reference();
        s.material.recoverable_strain = 2.0;
        s.material.yield_strength = 1.0e5;
        s.material.ultimate_strength = 2.0e5;
        let v1 = validate_screw_spec(s.clone()).unwrap();
        s.material.youngs_modulus *= 2.0;
        let v2 = validate_screw_spec(s).unwrap();
        let c = Centerline::new(2.0, 35.0).unwrap();
        let f1 = prescribed_shape_stress(&v1, &c, threaded(&v1)).unwrap();
        let f2 = prescribed_shape_stress(&v2, &c, threaded(&v2)).unwrap();
        for (a, b) in f1.stress.iter().zip(&f2.stress) {
            assert!((2.0 * a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
        for (e, sig) in f1.strain.iter().zip(&f1.stress) {
            assert_eq!(*sig, 83_000.0 * e);
        }
    }

    #[test]
    fn lossless_shaft_transmits_uniform_torque() {
        let v = reference();
        let mut bone = MaterialSpec::pcf15_foam();
        bone.friction_coefficient = 0.0;
        let c = Centerline::new(40.0, 35.0).unwrap();
        let f = torque_transmission(
            &v,
            &c,
            threaded(&v),
            150.0,
            &bone,
            CuttingLoad::None,
            ContactModel::default(),
        )
        .unwrap();
        assert!(f.torque.iter().all(|&t| t == 150.0));
        assert_eq!(f.head_torque_required, 0.0);
        assert_eq!(f.verdict, Verdict::Pass);
    }

    #[test]
    fn uniform_cutting_requires_density_times_length() {
        let v = reference();
        let bone = MaterialSpec::pcf15_foam();
        let over = ArcInterval::new(30.0, 45.0);
        let f = torque_transmission(
            &v,
            &Centerline::straight(40.0),
            ArcInterval::new(10.0, 50.0),
            500.0,
            &bone,
            CuttingLoad::Uniform { density: 3.0, over },
            ContactModel::default(),
        )
        .unwrap();
        assert!((f.head_torque_required - 45.0).abs() < 1e-9);
        assert!(f.required_torque.last().unwrap().abs() < 1e-9);
    }

    #[test]
    fn exhausted_torque_is_reported() {
        let v = reference();
        let bone = MaterialSpec::pcf15_foam();
        let f = torque_transmission(
            &v,
            &Centerline::straight(40.0),
            ArcInterval::new(10.0, 50.0),
            10.0,
            &bone,
            CuttingLoad::Uniform {
                density: 1.0,
                over: ArcInterval::new(10.0, 50.0),
            },
            ContactModel::default(),
        )
        .unwrap();
        let at = f.exhausted_at.unwrap();
        assert!((at - 20.0).abs() < 0.11, "{at}");
        assert_eq!(f.verdict, Verdict::Fail);
        assert!(f.torque.iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn safety_factor_ratio() {
        let v = reference();
        let m = v.spec().material;
        let tau = m.yield_strength / (2.0 * 3f64.sqrt());
        let field = TorqueField {
            stations: vec![0.0, 1.0],
            curvature: vec![0.0; 2],
            torque: vec![1.0; 2],
            required_torque: vec![0.0; 2],
            shear_stress: vec![tau; 2],
            resistance_density: vec![0.0; 2],
            head_torque: 1.0,
            head_torque_required: 0.0,
            end_reactions: [0.0; 2],
            exhausted_at: None,
            max_shear_stress: tau,
            verdict: Verdict::Pass,
        };
        match safety_factor(FieldRef::Torsion(&field), &m) {
            SafetyFactor::Finite(sf) => assert!((sf - 2.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
