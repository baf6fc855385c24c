use flexscrew::fixate::anchorage;
use flexscrew::model::annulus_section;
use flexscrew::*;
use proptest::prelude::*;

fn reference() -> ValidatedScrewSpec {
    validate_screw_spec(ScrewSpec::reference()).unwrap()
}

fn fracture(screw: Option<ValidatedScrewSpec>, offset: f64) -> FractureScenario {
    FractureScenario {
        tunnel: TunnelSpec::new(Centerline::new(10.0, 35.0).unwrap(), 8.5),
        screw,
        bone: BoneSpec::foam_block(),
        cut: CutSpec::VTransversal { width: 2.0 },
        load_offset: offset,
        baseline_capacity: 10.0,
        reference_capacity: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cantilever_matches_closed_form(
        l in 20.0f64..200.0,
        d_o in 3.0f64..12.0,
        ratio in 0.0f64..0.8,
        e in 1.0e3f64..2.0e5,
        p in 0.01f64..10.0,
    ) {
        let sec = annulus_section(d_o, d_o * ratio);
        let sol = solve_cantilever(l, &sec, NotchPlane::A, e, p, 8).unwrap();
        let exact = p * l.powi(3) / (3.0 * e * sec.second_moment_plane_a);
        prop_assert!(((sol.tip_deflection - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn calibration_is_monotone(
        mut pts in prop::collection::vec((0.1f64..100.0, 0.0f64..30.0), 1..6),
        t1 in 0.0f64..120.0,
        t2 in 0.0f64..120.0,
    ) {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        let mut run = 0.0f64;
        for p in pts.iter_mut() {
            run = run.max(p.1);
            p.1 = run;
        }
        let m = calibrate(&pts).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let a = tension_to_tip_deflection(&m, lo).unwrap();
        let b = tension_to_tip_deflection(&m, hi).unwrap();
        prop_assert!(a <= b);
        for &(t, d) in &pts {
            prop_assert_eq!(tension_to_tip_deflection(&m, t).unwrap(), d);
        }
    }

    #[test]
    fn arc_length_at_least_chord(delta in 0.0f64..60.0, len in 1.0f64..80.0, f in 0.0f64..1.0) {
        let c = Centerline::new(delta, len).unwrap();
        let x = f * len;
        let chord = (x * x + c.y(x).powi(2)).sqrt();
        prop_assert!(c.arc_length_to(x) >= chord - 1e-9);
        let back = c.x_at(c.arc_length_to(x)).unwrap();
        prop_assert!((back - x).abs() < 1e-8);
    }

    #[test]
    fn required_torque_never_increases_towards_tip(
        delta in 0.0f64..20.0,
        beta in 0.0f64..1e-2,
        density in 0.0f64..10.0,
    ) {
        let v = reference();
        let bone = MaterialSpec::pcf15_foam();
        let c = Centerline::new(delta, 45.0).unwrap();
        let engaged = ArcInterval::new(v.threads_start(), v.threads_end());
        let cutting = CuttingLoad::Uniform {
            density,
            over: ArcInterval::new(v.threads_end() - 9.525, v.threads_end()),
        };
        let contact = ContactModel { conformity: beta, ..Default::default() };
        let f = torque_transmission(&v, &c, engaged, 150.0, &bone, cutting, contact).unwrap();
        for w in f.required_torque.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
        for w in f.torque.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
    }

    #[test]
    fn friction_demand_scales_with_coefficient(delta in 0.5f64..20.0, beta in 1e-4f64..1e-2) {
        let v = reference();
        let mut bone = MaterialSpec::pcf15_foam();
        let c = Centerline::new(delta, 45.0).unwrap();
        let engaged = ArcInterval::new(v.threads_start(), v.threads_end());
        let contact = ContactModel { conformity: beta, ..Default::default() };
        let a = torque_transmission(&v, &c, engaged, 150.0, &bone, CuttingLoad::None, contact)
            .unwrap();
        bone.friction_coefficient *= 2.0;
        let b = torque_transmission(&v, &c, engaged, 150.0, &bone, CuttingLoad::None, contact)
            .unwrap();
        let (ra, rb) = (a.head_torque_required, b.head_torque_required);
        prop_assert!((rb - 2.0 * ra).abs() <= 1e-9 * rb.abs().max(1.0));
    }

    #[test]
    fn fixation_non_increasing_in_offset(e1 in 1.0f64..60.0, e2 in 1.0f64..60.0) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let a = fixation_capacity(&fracture(Some(reference()), lo)).unwrap();
        let b = fixation_capacity(&fracture(Some(reference()), hi)).unwrap();
        prop_assert!(b.capacity <= a.capacity);
        let unfixed = fixation_capacity(&fracture(None, lo)).unwrap();
        prop_assert!(a.capacity >= unfixed.capacity);
    }

    #[test]
    fn pullout_is_linear(s in 0.0f64..10.0, l in 0.0f64..34.925, k in 0.0f64..1.0) {
        let v = reference();
        let mut bone = BoneSpec::foam_block();
        bone.material.shear_strength = s;
        let f = pullout_strength(&v, &bone, l).unwrap();
        let f_k = pullout_strength(&v, &bone, k * l).unwrap();
        prop_assert!((f_k - k * f).abs() <= 1e-9 * f.max(1.0));
        bone.material.shear_strength = 2.0 * s;
        let f2 = pullout_strength(&v, &bone, l).unwrap();
        prop_assert!((f2 - 2.0 * f).abs() <= 1e-9 * f2.max(1.0));
    }

    #[test]
    fn governing_mode_is_the_argmin(width in 0.0f64..6.0, e in 1.0f64..40.0) {
        let mut sc = fracture(Some(reference()), e);
        sc.cut = CutSpec::VTransversal { width };
        prop_assume!(anchorage(sc.screw.as_ref().unwrap(), &sc.tunnel, &sc.cut).is_ok());
        let r = fixation_capacity(&sc).unwrap();
        let m = r.modes.unwrap();
        let min = m.pullout.min(m.bone_bearing).min(m.screw_bending);
        let expected = if m.pullout == min {
            FixationMode::Pullout
        } else if m.bone_bearing == min {
            FixationMode::BoneBearing
        } else {
            FixationMode::ScrewBending
        };
        prop_assert_eq!(r.governing_mode, expected);
    }

    #[test]
    fn validated_spec_layout_covers_screw(count in 1u32..14, pitch in 2.0f64..4.0, extra in 1.0f64..20.0) {
        let mut s = ScrewSpec::reference();
        s.thread_count = count;
        s.thread_pitch = pitch;
        s.tapping_thread_count = count.min(3);
        s.notches = Some(NotchPattern::default_for(s.core_diameter, pitch));
        s.overall_length = count as f64 * pitch + s.head_tip_radius + extra;
        let v = validate_screw_spec(s.clone()).unwrap();
        prop_assert_eq!(validate_screw_spec(v.clone().into_spec()).unwrap(), v.clone());
        let segs = v.layout();
        prop_assert_eq!(segs.first().unwrap().start, 0.0);
        prop_assert!((segs.last().unwrap().end - s.overall_length).abs() < 1e-9);
        for k in 0..=100 {
            let st = s.overall_length * k as f64 / 100.0;
            prop_assert!(v.segment_at(st).is_some());
        }
    }
}
