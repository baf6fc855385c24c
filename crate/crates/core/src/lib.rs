//! Mechanics of a flexible, notched, cannulated bone screw inserted along a
//! curved drilled tunnel.
//!
//! Units throughout: mm, N, MPa, N·mm. Arc length on the screw runs from the
//! drive head (0) to the tip.

pub mod fixate;
pub mod insert;
pub mod model;
pub mod plan;
pub mod rod;

pub use fixate::{
    fixation_capacity, pullout_strength, CutSpec, FixateError, FixationMode, FixationReport,
    FractureScenario,
};
pub use insert::{
    simulate_insertion, tapping_torque, BoneSpec, InsertError, InsertionLimits, InsertionReport,
    LimitingFactor, StepRecord,
};
pub use model::{
    interference, section_properties, validate_screw_spec, DrillParams, InterferenceReport,
    MaterialSpec, ModelError, NotchPattern, NotchPlane, ScrewSpec, SectionProps, Segment,
    SegmentKind, ThreadForm, ValidatedScrewSpec,
};
pub use plan::{
    calibrate, drill_time, generate_tunnel, snake_shape, tension_to_tip_deflection,
    CalibrationModel, PlanError, SnakeShape, TunnelSpec,
};
pub use rod::{
    centerline_curvature, prescribed_shape_stress, safety_factor, solve_cantilever,
    torque_transmission, ArcInterval, Centerline, ContactModel, CuttingLoad, FieldRef, RodError,
    SafetyFactor, StressField, TorqueField, Verdict,
};
