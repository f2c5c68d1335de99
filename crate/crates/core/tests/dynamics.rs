use bikegeo::bike_dynamics::*;
use bikegeo::curves::*;
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use std::f64::consts::PI;

fn unit_circle(samples: usize) -> Curve {
    build_curve(&CurveSpec::CircleMulti { folds: 1, radius: 1.0 }, samples).unwrap()
}

fn space_curve(c: &[f64]) -> Curve {
    Curve::fourier(
        &FourierSpec {
            base: vec![0.0; 3],
            drift: vec![],
            harmonics: vec![
                Harmonic { freq: 1.0, cos: vec![1.0 + c[0], c[1], c[2]], sin: vec![c[3], 1.0 + c[4], c[5]] },
                Harmonic { freq: 2.0, cos: vec![c[6] / 2.0, c[7] / 2.0, c[8]], sin: vec![c[9] / 2.0, c[10] / 2.0, c[11]] },
            ],
            period: Some(2.0 * PI),
            t_end: None,
        },
        256,
    )
    .unwrap()
}

#[test]
fn straight_line_closed_form() {
    let line = build_curve(&CurveSpec::Line { length: 5.0 }, 200).unwrap();
    let ell = 1.3;
    let th0: f64 = 2.0;
    let r0 = DVector::from_vec(vec![th0.cos(), th0.sin()]);
    let tr = integrate_bicycle_sphere_steps(&line, ell, &r0, 0.0, 5.0, 2000).unwrap();
    let p0 = (th0 / 2.0).tan();
    let p = p0 * (5.0 / ell).exp();
    let th = 2.0 * p.atan();
    let r = tr.final_direction();
    assert!((r[0] - th.cos()).abs() < 1e-10 && (r[1] - th.sin()).abs() < 1e-10);
    assert!(tr.max_norm_drift < 1e-10);
}

#[test]
fn rear_track_velocity_is_aligned_with_bike() {
    let front = space_curve(&[0.1, 0.2, 0.3, -0.1, 0.0, 0.2, 0.1, -0.2, 0.1, 0.3, 0.0, -0.1]);
    let r0 = DVector::from_vec(vec![0.0, 0.6, 0.8]);
    let tr = integrate_bicycle_sphere(&front, 0.8, &r0, 0.0, 2.0 * PI).unwrap();
    for s in tr.states.iter().step_by(17) {
        let v = tr.rear.velocity(s.t);
        let cross = bikegeo::numerics::cross3(&v, &s.r);
        assert!(cross.norm() < 1e-6 * (1.0 + v.norm()), "{}", cross.norm());
    }
}

#[test]
fn richardson_error_is_fourth_order() {
    let front = space_curve(&[0.1, 0.2, 0.3, -0.1, 0.0, 0.2, 0.1, -0.2, 0.1, 0.3, 0.0, -0.1]);
    let r0 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let e1 = richardson_error(&front, 0.7, &r0, 0.0, 2.0 * PI, 128).unwrap();
    let e2 = richardson_error(&front, 0.7, &r0, 0.0, 2.0 * PI, 256).unwrap();
    assert!(e1 / e2 > 12.0, "{e1} {e2}");
}

#[test]
fn planar_charts_agree_with_sphere_form() {
    let e = build_curve(&CurveSpec::Ellipse { a: 1.5, b: 1.0 }, 512).unwrap();
    let front = resample_arclength(&e, 1024).unwrap();
    let len = front.period().unwrap();
    let r0 = DVector::from_vec(vec![-0.6, 0.8]);
    let sphere = integrate_bicycle_sphere_steps(&front, 1.2, &r0, 0.0, len, 1024).unwrap();
    for chart in [Chart::PlanarFixed, Chart::PlanarFrame] {
        let init = ProjectiveCoord::from_sphere(chart, &frame_coords(&front, 0.0, &r0, chart));
        let ct = integrate_riccati_planar(&front, 1.2, init, 0.0, len, 1024).unwrap();
        let amb = ct.to_ambient(&front);
        for (a, b) in amb.iter().zip(sphere.directions()) {
            assert!((a - b).norm() < 1e-7, "{chart:?}");
        }
    }
}

fn frame_coords(front: &Curve, t: f64, r: &DVector<f64>, chart: Chart) -> DVector<f64> {
    match chart {
        Chart::PlanarFixed | Chart::SpatialFixed => r.clone(),
        _ => {
            let f = frenet_at(front, t, 1e-12);
            let mut out = vec![f.tangent.dot(r), f.normal.dot(r)];
            if let Some(b) = &f.binormal {
                out.push(b.dot(r));
            }
            DVector::from_vec(out)
        }
    }
}

#[test]
fn spatial_charts_agree_with_sphere_form() {
    let h = build_curve(&CurveSpec::Helix { radius: 1.0, pitch: 0.4, turns: 1.5 }, 1024).unwrap();
    let t1 = h.t_end();
    let r0 = DVector::from_vec(vec![0.48, -0.6, 0.64]);
    let sphere = integrate_bicycle_sphere_steps(&h, 0.9, &r0, 0.0, t1, 2048).unwrap();
    for chart in [Chart::SpatialFixed, Chart::SpatialFrame] {
        let init = ProjectiveCoord::from_sphere(chart, &frame_coords(&h, 0.0, &r0, chart));
        let ct = integrate_riccati_spatial(&h, SpatialLength::Real(0.9), init, 0.0, t1, 2048).unwrap();
        let amb = ct.to_ambient(&h);
        for (a, b) in amb.iter().zip(sphere.directions()) {
            assert!((a - &b).norm() < 1e-7, "{chart:?} {}", (a - &b).norm());
        }
    }
}

#[test]
fn chart_swap_passes_through_infinity() {
    let line = build_curve(&CurveSpec::Line { length: 6.0 }, 200).unwrap();
    let r0 = DVector::from_vec(vec![0.0, 1.0]);
    let init = ProjectiveCoord::from_sphere(Chart::PlanarFixed, &r0);
    let ct = integrate_riccati_planar(&line, 1.0, init, 0.0, 6.0, 3000).unwrap();
    assert!(ct.swaps >= 1);
    let r = ct.coords.last().unwrap().to_sphere();
    let sphere = integrate_bicycle_sphere_steps(&line, 1.0, &r0, 0.0, 6.0, 3000).unwrap();
    assert!((r - sphere.final_direction()).norm() < 1e-9);
}

#[test]
fn lorentz_lift_projects_to_sphere_flow() {
    let front = space_curve(&[0.2, -0.1, 0.3, 0.0, 0.1, -0.2, 0.3, 0.1, 0.0, -0.2, 0.1, 0.2]);
    let m = lorentz_lift_steps(&front, 1.1, 0.0, 2.0 * PI, 2048).unwrap();
    let r0 = DVector::from_vec(vec![0.0, 0.0, 1.0]);
    let tr = integrate_bicycle_sphere_steps(&front, 1.1, &r0, 0.0, 2.0 * PI, 2048).unwrap();
    assert!((m.act(&r0) - tr.final_direction()).norm() < 1e-9);
    assert!(m.j_residual() < 1e-12);
}

#[test]
fn lift_composition_over_split_interval() {
    let front = space_curve(&[0.2, -0.1, 0.3, 0.0, 0.1, -0.2, 0.3, 0.1, 0.0, -0.2, 0.1, 0.2]);
    let a = lorentz_lift_steps(&front, 0.9, 0.0, 2.0, 1000).unwrap();
    let b = lorentz_lift_steps(&front, 0.9, 2.0, 5.0, 1500).unwrap();
    let ab = lorentz_lift_steps(&front, 0.9, 0.0, 5.0, 2500).unwrap();
    assert!((b.compose(&a).m - ab.m).amax() < 1e-10);
    let id = roll_hyperbolic(&front, 0.9, 1.0, 1.0, 10).unwrap();
    assert!((id.m - nalgebra::DMatrix::identity(4, 4)).amax() == 0.0);
}

#[test]
fn sphere_rolling_along_a_line() {
    let ell = 0.7;
    let line = build_curve(&CurveSpec::Line { length: 2.0 * PI * ell }, 256).unwrap();
    let roll = roll_sphere(&line, ell, 0.0, 2.0 * PI * ell, 2048).unwrap();
    assert!((roll.g.clone() - nalgebra::DMatrix::identity(3, 3)).amax() < 1e-10);
    assert!(roll.orthogonality_residual < 1e-12);
}

#[test]
fn sphere_rolling_circle_traces_latitude() {
    let c = unit_circle(1024);
    let ell = 2.0;
    let roll = roll_sphere(&c, ell, 0.0, 2.0 * PI, 4096).unwrap();
    let body = &roll.body_track;
    assert!((body.length() - 2.0 * PI).abs() < 1e-6);
    let pts = body.points();
    let k = pts.len() / 3;
    let axis = bikegeo::numerics::cross3(&(&pts[k] - &pts[0]), &(&pts[2 * k] - &pts[0])).normalize();
    let h0 = axis.dot(&pts[0]);
    for p in &pts {
        assert!((axis.dot(p) - h0).abs() < 1e-6);
    }
    let radius = (ell * ell - h0 * h0).sqrt();
    assert!((radius - 1.0 / (1.0 + 1.0 / (ell * ell)).sqrt()).abs() < 1e-6, "{radius}");
    for p in &pts {
        assert!((p.norm() - ell).abs() < 1e-10);
    }
}

#[test]
fn unstable_solution_on_circle() {
    let c = embed(&unit_circle(1024), 3).unwrap();
    let u = find_unstable_periodic(&c, 0.5, None).unwrap();
    for z in &u.z {
        assert!((z - Complex64::new(2.0 - 3f64.sqrt(), 0.0)).norm() < 1e-10);
    }
    assert!(u.periodicity_residual < 1e-10);
    assert!(u.multiplier.norm() > 1.0);
    for ell in [0.1, 0.2, 0.3] {
        let u = find_unstable_periodic(&c, ell, None).unwrap();
        let exact = 2.0 * PI * (1.0 - ell * ell).sqrt();
        assert!((u.ell_log(ell).re - exact).abs() < 1e-8);
        assert!(u.ell_log(ell).im.abs() < 1e-12);
    }
}

#[test]
fn unstable_multiplier_matches_monodromy_derivative() {
    let front = space_curve(&[0.2, -0.1, 0.3, 0.0, 0.1, -0.2, 0.3, 0.1, 0.0, -0.2, 0.1, 0.2]);
    let arc = resample_arclength(&front, 1024).unwrap();
    let ell = 0.4;
    let u = find_unstable_periodic(&arc, ell, None).unwrap();
    let m = lorentz_lift_steps(&arc, ell, 0.0, arc.period().unwrap(), 8192).unwrap();
    let el = bikegeo::moebius_monodromy::moebius_from_lorentz(&m, ell).unwrap();
    let fps = bikegeo::moebius_monodromy::fixed_points(&el).unwrap();
    let big = fps.iter().map(|f| f.derivative).max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()).unwrap();
    let rel = ((big.ln() - u.log_multiplier) / u.log_multiplier).norm();
    assert!(rel < 1e-6, "{big} vs {}", u.multiplier);
}

#[test]
fn unstable_solution_shrinks_with_ell() {
    let front = space_curve(&[0.2, -0.1, 0.3, 0.0, 0.1, -0.2, 0.3, 0.1, 0.0, -0.2, 0.1, 0.2]);
    let arc = resample_arclength(&front, 1024).unwrap();
    let sup = |ell: f64| find_unstable_periodic(&arc, ell, None).unwrap().z.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let kmax = frenet_data(&arc).unwrap().curvature.iter().fold(0.0f64, |a, k| a.max(*k));
    let ratios: Vec<f64> = [0.2, 0.1, 0.05, 0.025].iter().map(|&l| sup(l) / l).collect();
    for r in &ratios {
        assert!(*r <= 0.6 * kmax, "{ratios:?} vs {kmax}");
    }
    assert!((ratios[3] - 0.5 * kmax).abs() < 0.05 * kmax, "{ratios:?} vs {kmax}");
}

#[test]
fn contraction_failure_is_reported() {
    let c = embed(&unit_circle(256), 3).unwrap();
    assert!(find_unstable_periodic(&c, 1.5, None).is_err());
}

#[test]
fn circle_taylor_coefficients() {
    let c = embed(&unit_circle(1024), 3).unwrap();
    let coef = ell_log_taylor(&c, 0.3, 10, 4).unwrap();
    let expected = [2.0 * PI, 0.0, -PI, 0.0, -PI / 4.0];
    for (got, want) in coef.iter().zip(expected) {
        let err = (got - Complex64::new(want, 0.0)).norm();
        assert!(err <= 1e-3 * want.abs().max(1.0), "{got} vs {want}");
    }
}

#[test]
fn ball_points_move_projectively() {
    let front = space_curve(&[0.2, -0.1, 0.3, 0.0, 0.1, -0.2, 0.3, 0.1, 0.0, -0.2, 0.1, 0.2]);
    let m = lorentz_lift_steps(&front, 1.7, 0.0, 2.0 * PI, 2048).unwrap();
    let x = DVector::from_vec(vec![0.3, -0.2, 0.1]);
    let y = evolve_ball_point(&front, 1.7, &x, 0.0, 2.0 * PI, 2048).unwrap();
    assert!((m.act(&x) - y).norm() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, rng_seed: RngSeed::Fixed(7), failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rolling_matrix_equals_lift(c in prop::collection::vec(-0.4f64..0.4, 12), ell in 0.3f64..3.0) {
        let front = space_curve(&c);
        let a = roll_hyperbolic(&front, ell, 0.0, 2.0 * PI, 1024).unwrap();
        let b = lorentz_lift_steps(&front, ell, 0.0, 2.0 * PI, 1024).unwrap();
        prop_assert!((a.m - b.m).amax() < 1e-12);
    }

    #[test]
    fn sphere_rolling_keeps_arclength(c in prop::collection::vec(-0.4f64..0.4, 12), ell in 0.3f64..3.0) {
        let front = space_curve(&c);
        let roll = roll_sphere(&front, ell, 0.0, 2.0 * PI, 2048).unwrap();
        prop_assert!(roll.orthogonality_residual < 1e-10);
        prop_assert!((roll.body_track.length() - front.length()).abs() < 1e-6);
    }

    #[test]
    fn sphere_norm_is_preserved(c in prop::collection::vec(-0.4f64..0.4, 12), ell in 0.3f64..3.0) {
        let front = space_curve(&c);
        let r0 = DVector::from_vec(vec![0.36, 0.48, 0.8]);
        let tr = integrate_bicycle_sphere_steps(&front, ell, &r0, 0.0, 2.0 * PI, 1024).unwrap();
        for r in tr.directions() {
            prop_assert!((r.norm() - 1.0).abs() < 1e-14);
        }
        prop_assert!(tr.max_norm_drift < 1e-6);
    }
}
