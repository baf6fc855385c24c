//! Cartesian-product parameter sweeps.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use flexscrew::Verdict;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::execute;
use crate::scenario::{resolve_tunnel, Analysis, Axis, Inputs, Parameter};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: BTreeMap<&'static str, f64>,
    pub verdict: Option<Verdict>,
    pub metrics: BTreeMap<&'static str, f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub parameters: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// FAIL when any point fails or errors; `None` when the analysis has no
    /// verdict.
    pub fn verdict(&self) -> Option<Verdict> {
        let mut any = None;
        for r in &self.rows {
            match (r.verdict, &r.error) {
                (_, Some(_)) | (Some(Verdict::Fail), _) => return Some(Verdict::Fail),
                (Some(Verdict::Pass), None) => any = Some(Verdict::Pass),
                (None, None) => {}
            }
        }
        any
    }
}

/// Set one swept quantity on a copy of the scenario.
pub fn apply(
    inputs: &mut Inputs,
    analysis: &mut Analysis,
    p: Parameter,
    v: f64,
) -> Result<(), String> {
    let tunnel = |inputs: &mut Inputs, f: &dyn Fn(&mut crate::scenario::TunnelSettings)| {
        let mut t = inputs.tunnel.ok_or("no tunnel defined")?;
        f(&mut t);
        inputs.tunnel = Some(resolve_tunnel(t, inputs)?);
        Ok::<(), String>(())
    };
    match p {
        Parameter::Tension => tunnel(inputs, &|t| t.tension = Some(v))?,
        Parameter::TipOffset => tunnel(inputs, &|t| {
            t.tension = None;
            t.tip_offset = v;
        })?,
        Parameter::TunnelLength => tunnel(inputs, &|t| t.length = v)?,
        Parameter::TunnelDiameter => tunnel(inputs, &|t| t.diameter = v)?,
        Parameter::NotchDepth | Parameter::NotchWidth => {
            let n = inputs
                .screw
                .notches
                .as_mut()
                .ok_or("screw has no notches")?;
            if p == Parameter::NotchDepth {
                n.depth = v;
            } else {
                n.width = v;
            }
        }
        Parameter::BoneShearStrength => inputs.bone.material.shear_strength = v,
        Parameter::BoneFriction => inputs.bone.material.friction_coefficient = v,
        Parameter::Conformity => inputs.fixtures.conformity = v,
        Parameter::TorqueBudgetNmm => inputs.fixtures.torque_budget_Nmm = v,
        Parameter::HeadTorqueNmm => match analysis {
            Analysis::TorqueCheck {
                head_torque_Nmm, ..
            } => *head_torque_Nmm = v,
            _ => return Err("head_torque_nmm applies to torque_check only".into()),
        },
        Parameter::LoadOffset | Parameter::CutWidth => match analysis {
            Analysis::Fixate {
                load_offset,
                cut_width,
                ..
            } => {
                if p == Parameter::LoadOffset {
                    *load_offset = v;
                } else {
                    *cut_width = v;
                }
            }
            _ => return Err(format!("{} applies to fixate only", p.name())),
        },
    }
    Ok(())
}

/// Whether `p` can vary for `analysis` at all; checked before any point runs.
pub fn check_applicable(p: Parameter, analysis: &Analysis, inputs: &Inputs) -> Result<(), String> {
    let mut i = inputs.clone();
    let mut a = analysis.clone();
    let probe = match p {
        Parameter::Tension => inputs
            .calibration
            .iter()
            .map(|&(t, _)| t)
            .fold(0.0, f64::max),
        Parameter::TipOffset => inputs.tunnel.map_or(0.0, |t| t.tip_offset),
        Parameter::TunnelLength => inputs.tunnel.map_or(1.0, |t| t.length),
        Parameter::TunnelDiameter => inputs.tunnel.map_or(1.0, |t| t.diameter),
        _ => 0.0,
    };
    apply(&mut i, &mut a, p, probe)
}

fn cartesian(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn evaluate(inputs: &Inputs, analysis: &Analysis, axes: &[Axis], point: &[f64]) -> SweepRow {
    let mut i = inputs.clone();
    let mut a = analysis.clone();
    let applied = axes
        .iter()
        .zip(point)
        .try_for_each(|(ax, &v)| apply(&mut i, &mut a, ax.parameter, v));
    let outcome = applied.and_then(|_| execute(&i, &a));
    let point = axes
        .iter()
        .zip(point)
        .map(|(ax, &v)| (ax.parameter.name(), v))
        .collect();
    match outcome {
        Ok(o) => SweepRow {
            point,
            verdict: o.verdict,
            metrics: o.metrics,
            error: None,
        },
        Err(e) => SweepRow {
            point,
            verdict: Some(Verdict::Fail),
            metrics: BTreeMap::new(),
            error: Some(e),
        },
    }
}

/// Evaluate every grid point on `jobs` threads (`None`: all cores). Rows come
/// back in lexicographic order of axis values whatever the schedule.
pub fn run_sweep(
    inputs: &Inputs,
    analysis: &Analysis,
    axes: &[Axis],
    jobs: Option<usize>,
) -> Result<SweepTable, String> {
    let mut points = cartesian(axes);
    points.sort_by(|a, b| lexicographic(a, b));
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| e.to_string())?;
    let mut rows: Vec<(Vec<f64>, SweepRow)> = pool.install(|| {
        points
            .par_iter()
            .map(|p| (p.clone(), evaluate(inputs, analysis, axes, p)))
            .collect()
    });
    rows.sort_by(|a, b| lexicographic(&a.0, &b.0));
    Ok(SweepTable {
        parameters: axes.iter().map(|a| a.parameter.name()).collect(),
        rows: rows.into_iter().map(|(_, r)| r).collect(),
    })
}
