//! Evaluation of one resolved analysis request.

use std::collections::BTreeMap;

use flexscrew::fixate::FixationReport;
use flexscrew::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::scenario::{build_tunnel, Analysis, Inputs};

/// Station arrays destined for CSV, columns in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub verdict: Option<Verdict>,
    pub result: Value,
    /// Scalar summary used by sweeps and console output.
    pub metrics: BTreeMap<&'static str, f64>,
    pub table: Option<Table>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn screw(inputs: &Inputs) -> Result<ValidatedScrewSpec, String> {
    validate_screw_spec(inputs.screw.clone()).map_err(|e| format!("screw: {e}"))
}

fn tunnel(inputs: &Inputs) -> Result<TunnelSpec, String> {
    let t = inputs.tunnel.as_ref().ok_or("no tunnel defined")?;
    let mut t = *t;
    if let Some(tension) = t.tension {
        let m = calibrate(&inputs.calibration).map_err(|e| e.to_string())?;
        t.tip_offset = tension_to_tip_deflection(&m, tension).map_err(|e| e.to_string())?;
    }
    build_tunnel(&t).map_err(|e| format!("tunnel: {e}"))
}

/// Part of the screw inside the tunnel when pushed in until the tip meets
/// the tunnel end or the shank meets the entry.
pub fn seated_interval(spec: &ValidatedScrewSpec, tunnel: &TunnelSpec) -> ArcInterval {
    let overall = spec.overall_length();
    let depth = tunnel
        .centerline
        .total_arc_length()
        .min(overall - spec.shank_length());
    ArcInterval::new(overall - depth, overall)
}

fn engaged_or_seated(
    engaged: Option<(f64, f64)>,
    spec: &ValidatedScrewSpec,
    t: &TunnelSpec,
) -> ArcInterval {
    engaged.map_or_else(|| seated_interval(spec, t), |(a, b)| ArcInterval::new(a, b))
}

pub fn execute(inputs: &Inputs, analysis: &Analysis) -> Result<Outcome, String> {
    match analysis {
        Analysis::Section { stations } => section(inputs, stations),
        Analysis::ShapeCheck { engaged } => shape_check(inputs, *engaged),
        Analysis::TorqueCheck {
            head_torque_Nmm,
            engaged,
            cutting,
        } => {
            let cutting = cutting.map_or(CuttingLoad::None, |c| CuttingLoad::Uniform {
                density: c.density_Nmm_per_mm,
                over: ArcInterval::new(c.over.0, c.over.1),
            });
            torque_check(inputs, *head_torque_Nmm, *engaged, cutting)
        }
        Analysis::Plan => plan(inputs),
        Analysis::Insert => insert(inputs),
        Analysis::Fixate {
            load_offset,
            cut_width,
            with_screw,
            reference_capacity_N,
        } => fixate(
            inputs,
            *load_offset,
            *cut_width,
            *with_screw,
            *reference_capacity_N,
        ),
        Analysis::Sweep { .. } => Err("sweeps are run by the sweep driver".into()),
    }
}

fn section(inputs: &Inputs, stations: &[f64]) -> Result<Outcome, String> {
    let spec = screw(inputs)?;
    let props = stations
        .iter()
        .map(|&s| section_properties(&spec, s).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut metrics = BTreeMap::new();
    let min = |f: fn(&SectionProps) -> f64| props.iter().map(f).fold(f64::INFINITY, f64::min);
    metrics.insert("min_area", min(|p| p.area));
    metrics.insert("min_second_moment_a", min(|p| p.second_moment_plane_a));
    metrics.insert("min_torsion_constant", min(|p| p.torsion_constant));
    Ok(Outcome {
        verdict: None,
        result: json!({ "sections": to_value(&props) }),
        metrics,
        table: None,
    })
}

fn shape_check(inputs: &Inputs, engaged: Option<(f64, f64)>) -> Result<Outcome, String> {
    let spec = screw(inputs)?;
    let t = tunnel(inputs)?;
    let engaged = engaged_or_seated(engaged, &spec, &t);
    let field =
        prescribed_shape_stress(&spec, &t.centerline, engaged).map_err(|e| e.to_string())?;
    let sf = safety_factor(FieldRef::Bending(&field), &spec.spec().material);
    let max_strain = field.strain.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let mut metrics = BTreeMap::new();
    metrics.insert("max_utilization", field.max_utilization);
    metrics.insert("max_strain", max_strain);
    metrics.insert("max_stress", field.max_stress);
    metrics.insert("margin", 1.0 - field.max_utilization);
    let table = Table {
        columns: vec!["s_mm", "kappa_per_mm", "strain", "stress_MPa"],
        rows: (0..field.stations.len())
            .map(|i| {
                vec![
                    field.stations[i],
                    field.curvature[i],
                    field.strain[i],
                    field.stress[i],
                ]
            })
            .collect(),
    };
    Ok(Outcome {
        verdict: Some(field.verdict),
        result: json!({
            "engaged": to_value(&engaged),
            "tunnel_arc_length": t.centerline.total_arc_length(),
            "safety_factor": to_value(&sf),
            "max_strain": max_strain,
            "field": to_value(&field),
        }),
        metrics,
        table: Some(table),
    })
}

fn torque_check(
    inputs: &Inputs,
    head_torque: f64,
    engaged: Option<(f64, f64)>,
    cutting: CuttingLoad,
) -> Result<Outcome, String> {
    let spec = screw(inputs)?;
    let t = tunnel(inputs)?;
    let engaged = engaged_or_seated(engaged, &spec, &t);
    let field = torque_transmission(
        &spec,
        &t.centerline,
        engaged,
        head_torque,
        &inputs.bone.material,
        cutting,
        inputs.fixtures.contact(),
    )
    .map_err(|e| e.to_string())?;
    let sf = safety_factor(FieldRef::Torsion(&field), &spec.spec().material);
    let mut metrics = BTreeMap::new();
    metrics.insert("head_torque_required", field.head_torque_required);
    metrics.insert("max_shear_stress", field.max_shear_stress);
    metrics.insert("tip_torque", *field.torque.last().unwrap_or(&0.0));
    if let SafetyFactor::Finite(v) = sf {
        metrics.insert("torsional_safety_factor", v);
    }
    let table = Table {
        columns: vec!["s_mm", "kappa_per_mm", "torque_Nmm"],
        rows: (0..field.stations.len())
            .map(|i| vec![field.stations[i], field.curvature[i], field.torque[i]])
            .collect(),
    };
    Ok(Outcome {
        verdict: Some(field.verdict),
        result: json!({
            "engaged": to_value(&engaged),
            "cutting": to_value(&cutting),
            "torsional_safety_factor": to_value(&sf),
            "torque_reaches_tip": field.exhausted_at.is_none(),
            "field": to_value(&field),
        }),
        metrics,
        table: Some(table),
    })
}

fn plan(inputs: &Inputs) -> Result<Outcome, String> {
    let settings = inputs.tunnel.as_ref().ok_or("no tunnel defined")?;
    let tension = settings.tension.ok_or("plan needs tunnel.tension")?;
    let model = calibrate(&inputs.calibration).map_err(|e| e.to_string())?;
    let offset = tension_to_tip_deflection(&model, tension).map_err(|e| e.to_string())?;
    let shape = snake_shape(tension, &model, &inputs.drill).map_err(|e| e.to_string())?;
    let t = tunnel(inputs)?;
    let spec = screw(inputs)?;
    let fit = interference(&spec, &t);
    let time = drill_time(&t, &inputs.drill);
    let mut metrics = BTreeMap::new();
    metrics.insert("tip_deflection", offset);
    metrics.insert("tunnel_arc_length", t.centerline.total_arc_length());
    metrics.insert("drill_time_s", time);
    metrics.insert("core_clearance", fit.core_clearance);
    metrics.insert("bite_depth", fit.bite_depth);
    Ok(Outcome {
        verdict: Some(Verdict::from_pass(fit.feasible)),
        result: json!({
            "tension": tension,
            "tip_deflection": offset,
            "calibration": to_value(&model),
            "snake_shape": to_value(&shape),
            "tunnel": to_value(&t),
            "tunnel_arc_length": t.centerline.total_arc_length(),
            "drill_time_s": time,
            "interference": to_value(&fit),
        }),
        metrics,
        table: None,
    })
}

fn insert(inputs: &Inputs) -> Result<Outcome, String> {
    let spec = screw(inputs)?;
    let t = tunnel(inputs)?;
    let limits = InsertionLimits {
        torque_budget: inputs.fixtures.torque_budget_Nmm,
        contact: inputs.fixtures.contact(),
    };
    let r = simulate_insertion(&spec, &t, &inputs.bone, &limits).map_err(|e| e.to_string())?;
    let mut metrics = BTreeMap::new();
    metrics.insert("steps", r.steps.len() as f64);
    let worst = |f: fn(&StepRecord) -> f64| r.steps.iter().map(f).fold(0.0, f64::max);
    metrics.insert(
        "max_bending_utilization",
        worst(|s| s.max_bending_utilization),
    );
    metrics.insert(
        "max_head_torque_required",
        worst(|s| s.head_torque_required),
    );
    metrics.insert("tunnel_diameter", t.diameter);
    metrics.insert("tip_offset", t.centerline.tip_offset);
    Ok(Outcome {
        verdict: Some(r.verdict),
        result: json!({
            "tunnel": to_value(&t),
            "limits": to_value(&limits),
            "report": to_value(&r),
        }),
        metrics,
        table: None,
    })
}

fn fixate(
    inputs: &Inputs,
    load_offset: f64,
    cut_width: f64,
    with_screw: bool,
    reference: Option<f64>,
) -> Result<Outcome, String> {
    let t = tunnel(inputs)?;
    let screw = if with_screw {
        Some(screw(inputs)?)
    } else {
        None
    };
    let base = FractureScenario {
        tunnel: t,
        screw: None,
        bone: inputs.bone.clone(),
        cut: CutSpec::VTransversal { width: cut_width },
        load_offset,
        baseline_capacity: inputs.fixtures.baseline_capacity_N,
        reference_capacity: reference,
    };
    let run = |sc: &FractureScenario| -> Result<FixationReport, String> {
        fixation_capacity(sc).map_err(|e| e.to_string())
    };
    let unfixed = run(&base)?;
    let mut metrics = BTreeMap::new();
    metrics.insert("unfixed_capacity", unfixed.capacity);
    let (report, verdict) = match screw {
        Some(spec) => {
            let fixed = run(&FractureScenario {
                screw: Some(spec),
                ..base
            })?;
            metrics.insert("capacity", fixed.capacity);
            if let Some(r) = fixed.ratio {
                metrics.insert("ratio", r);
            }
            let pass = fixed.capacity > unfixed.capacity;
            (fixed, Some(Verdict::from_pass(pass)))
        }
        None => {
            metrics.insert("capacity", unfixed.capacity);
            (unfixed.clone(), None)
        }
    };
    Ok(Outcome {
        verdict,
        result: json!({
            "load_offset": load_offset,
            "cut_width": cut_width,
            "with_screw": with_screw,
            "unfixed_capacity": unfixed.capacity,
            "report": to_value(&report),
        }),
        metrics,
        table: None,
    })
}
