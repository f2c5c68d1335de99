use bikegeo::bike_dynamics::ell_log_taylor;
use bikegeo::correspondence::bicycle_partner;
use bikegeo::curves::*;
use bikegeo::diffpoly::{evaluate_on_curve, monodromy_integrands};
use bikegeo::integrable::*;
use nalgebra::{DVector, Matrix2, Vector2};
use num_complex::Complex64;
use std::f64::consts::PI;

type C2 = Matrix2<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn interior_max(v: &[f64], skip: usize) -> f64 {
    v[skip..v.len() - skip].iter().fold(0.0, |a, x| a.max(x.abs()))
}

#[test]
fn zero_potential_gives_diagonal_phases() {
    let lam = 0.8;
    let f = akns_integrate(&Potential::Constant(c(0.0, 0.0)), lam, &C2::identity(), 0.0, 5.0, 500).unwrap();
    for (t, p) in f.t.iter().zip(&f.phi) {
        assert!((p[(0, 0)] - Complex64::from_polar(1.0, lam * t / 2.0)).norm() < 1e-10);
        assert!((p[(1, 1)] - Complex64::from_polar(1.0, -lam * t / 2.0)).norm() < 1e-10);
        assert!(p[(0, 1)].norm() < 1e-14 && p[(1, 0)].norm() < 1e-14);
    }
}

#[test]
fn constant_real_potential_rotates_at_rate_q() {
    let q = 0.7;
    let f = akns_integrate(&Potential::Constant(c(q, 0.0)), 0.0, &C2::identity(), 0.0, 4.0, 400).unwrap();
    for (t, p) in f.t.iter().zip(&f.phi) {
        let (s, co) = (q * t).sin_cos();
        let want = C2::new(c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0));
        assert!((p - want).iter().all(|z| z.norm() < 1e-10));
    }
}

#[test]
fn frame_stays_unitary_over_ten_periods() {
    let q = Potential::Helical { amp: 0.6, rate: 1.3 };
    let f = akns_integrate(&q, 0.4, &C2::identity(), 0.0, 10.0 * 2.0 * PI / 1.3, 20000).unwrap();
    let (u, d) = f.unitarity_residual();
    assert!(u < 1e-9 && d < 1e-10, "{u} {d}");
}

#[test]
fn non_unitary_initial_frame_is_rejected() {
    let bad = C2::identity() * c(2.0, 0.0);
    assert!(akns_integrate(&Potential::Constant(c(0.5, 0.0)), 0.0, &bad, 0.0, 1.0, 10).is_err());
}

#[test]
fn su2_identification_is_isometric() {
    let v = DVector::from_vec(vec![0.3, -1.2, 0.7]);
    let x = r3_to_su2(&v);
    assert!((su2_to_r3(&x) - &v).norm() < 1e-15);
    assert!((-2.0 * (x * x).trace().re - v.norm_squared()).abs() < 1e-14);
    assert!((su2_to_r3(&(a_matrix() * c(0.0, 1.0))) - DVector::from_vec(vec![1.0, 0.0, 0.0])).norm() < 1e-15);
}

fn stp_profiles(q: &Potential, lam: f64, t1: f64, steps: usize) -> (Curve, FrenetData) {
    let f = akns_integrate(q, lam, &C2::identity(), 0.0, t1, steps).unwrap();
    let g = stp_curve(&f).unwrap();
    let fd = frenet_data(&g).unwrap();
    (g, fd)
}

#[test]
fn stp_curve_of_constant_potential_is_unit_circle() {
    let (g, fd) = stp_profiles(&Potential::Constant(c(0.5, 0.0)), 0.0, 2.0 * PI, 2048);
    assert!(g.speed_deviation() < 1e-10);
    let k: Vec<f64> = fd.curvature.iter().map(|k| k - 1.0).collect();
    assert!(interior_max(&k, 8) < 1e-5);
    assert!((g.point(2.0 * PI) - g.point(0.0)).norm() < 1e-10);
}

#[test]
fn stp_curvature_and_torsion_on_constant_potentials() {
    for (q, lam) in [(c(0.5, 0.0), 0.3), (c(0.3, 0.4), -0.7), (c(0.0, 0.8), 1.1)] {
        let (_, fd) = stp_profiles(&Potential::Constant(q), lam, 8.0, 4096);
        let k: Vec<f64> = fd.curvature.iter().map(|k| k - 2.0 * q.norm()).collect();
        assert!(interior_max(&k, 8) < 1e-5);
        let t: Vec<f64> = fd.torsion.unwrap().iter().map(|t| t.unwrap() + lam).collect();
        assert!(interior_max(&t, 8) < 1e-5, "q={q} λ={lam}: {}", interior_max(&t, 8));
    }
}

#[test]
fn stp_torsion_follows_potential_phase() {
    let (amp, rate, lam) = (0.4, 0.9, 0.25);
    let (g, fd) = stp_profiles(&Potential::Helical { amp, rate }, lam, 10.0, 4096);
    assert!(g.speed_deviation() < 1e-10);
    let k: Vec<f64> = fd.curvature.iter().map(|k| k - 2.0 * amp).collect();
    assert!(interior_max(&k, 8) < 1e-5);
    let t: Vec<f64> = fd.torsion.unwrap().iter().map(|t| t.unwrap() - (rate - lam)).collect();
    assert!(interior_max(&t, 8) < 1e-5);
}

#[test]
fn potential_of_circle_and_helix() {
    let circle = build_curve(&CurveSpec::Fourier(FourierSpec {
        base: vec![0.0; 3],
        drift: vec![],
        harmonics: vec![Harmonic { freq: 1.0, cos: vec![1.0, 0.0, 0.0], sin: vec![0.0, 1.0, 0.0] }],
        period: Some(2.0 * PI),
        t_end: None,
    }), 1024);
    let q = q_from_curve(&circle.unwrap()).unwrap();
    for i in 0..50 {
        assert!((q.eval(0.1 * i as f64) - c(0.5, 0.0)).norm() < 1e-8);
    }
    let (r, p) = (1.0, 0.5);
    let s2 = r * r + p * p;
    let helix = build_curve(&CurveSpec::Helix { radius: r, pitch: p, turns: 2.0 }, 2048).unwrap();
    let q = q_from_curve(&helix).unwrap();
    for i in 0..50 {
        let t = 0.2 * i as f64;
        let want = Complex64::from_polar(0.5 * r / s2, p / s2 * t);
        assert!((q.eval(t) - want).norm() < 1e-6, "{t}: {} vs {want}", q.eval(t));
    }
}

#[test]
fn helix_round_trip_through_potential() {
    let (r, p) = (0.8, 0.6);
    let s2 = r * r + p * p;
    let helix = build_curve(&CurveSpec::Helix { radius: r, pitch: p, turns: 1.5 }, 2048).unwrap();
    let len = helix.t_end() - helix.t_start();
    let q = q_from_curve(&helix).unwrap();
    let (_, fd) = stp_profiles(&q, 0.0, len, 2048);
    let k: Vec<f64> = fd.curvature.iter().map(|k| k - r / s2).collect();
    let t: Vec<f64> = fd.torsion.unwrap().iter().map(|t| t.unwrap() - p / s2).collect();
    assert!(interior_max(&k, 8) < 1e-4 && interior_max(&t, 8) < 1e-4);
}

fn v2(a: Complex64, b: Complex64) -> Vector2<Complex64> {
    Vector2::new(a, b)
}

#[test]
fn darboux_distance_law_at_mu_i() {
    let q = Potential::Helical { amp: 0.5, rate: 0.4 };
    let d = darboux_transform(&q, 0.0, c(0.0, 1.0), v2(c(1.0, 0.0), c(0.3, 0.2)), 0.0, 8.0, 4000).unwrap();
    assert!((d.expected_distance - 2.0).abs() < 1e-15);
    assert!(d.distance_residual < 1e-8, "{}", d.distance_residual);
    assert!(d.akns_residual < 1e-7, "{}", d.akns_residual);
    assert!(d.max_projector_residual < 1e-10);
    assert!(d.max_unitarity_residual < 1e-9);
}

#[test]
fn darboux_is_invariant_under_scaling_v0() {
    let q = Potential::Constant(c(0.5, 0.0));
    let v = v2(c(0.4, -0.1), c(0.9, 0.3));
    let a = darboux_transform(&q, 0.2, c(0.1, 0.8), v, 0.0, 5.0, 1000).unwrap();
    let b = darboux_transform(&q, 0.2, c(0.1, 0.8), v * c(-2.0, 3.5), 0.0, 5.0, 1000).unwrap();
    for (x, y) in a.q_tilde.iter().zip(&b.q_tilde) {
        assert!((x - y).norm() < 1e-12);
    }
    for (x, y) in a.gamma_tilde.points().iter().zip(b.gamma_tilde.points()) {
        assert!((x - y).norm() < 1e-12);
    }
}

#[test]
fn darboux_distance_law_across_lambda_sweep() {
    let q = Potential::Helical { amp: 0.5, rate: 0.4 };
    let mu = c(0.3, 0.9);
    let mut consts = Vec::new();
    for lam in [-1.0, -0.3, 0.0, 0.5, 1.2] {
        let d = darboux_transform(&q, lam, mu, v2(c(1.0, 0.0), c(0.0, 1.0)), 0.0, 6.0, 3000).unwrap();
        assert!(d.distance_residual < 1e-8);
        let chord = (&d.gamma_tilde.points()[1500] - &d.gamma.points()[1500]).norm();
        consts.push(chord * (c(lam, 0.0) - mu).norm_sqr());
    }
    let want = (mu - mu.conj()).norm();
    for k in consts {
        assert!((k - want).abs() / want < 1e-6);
    }
}

#[test]
fn real_mu_is_rejected() {
    let q = Potential::Constant(c(0.5, 0.0));
    assert!(darboux_transform(&q, 0.0, c(0.7, 0.0), v2(c(1.0, 0.0), c(0.0, 0.0)), 0.0, 1.0, 10).is_err());
    assert!(darboux_transform(&q, 0.0, c(0.0, 0.7), v2(c(0.0, 0.0), c(0.0, 0.0)), 0.0, 1.0, 10).is_err());
}

#[test]
fn darboux_partners_are_bicycle_correspondences() {
    let q = Potential::Constant(c(0.5, 0.0));
    let t1 = 2.0 * PI;
    let a = darboux_bike_check(&q, 1.0, v2(c(1.0, 0.0), c(0.0, 0.0)), 0.0, t1, 2048).unwrap();
    let b = darboux_bike_check(&q, 1.0, v2(c(0.0, 0.0), c(1.0, 0.0)), 0.0, t1, 2048).unwrap();
    for r in [&a, &b] {
        assert!((r.two_ell - 2.0).abs() < 1e-15);
        assert!(r.residuals.max() < 1e-6, "{:?}", r.residuals);
        assert!(r.direction_sweep_residual < 1e-12);
    }
    let gap = (&a.data.gamma_tilde.points()[0] - &b.data.gamma_tilde.points()[0]).norm();
    assert!(gap > 1.0);
    let q = Potential::Helical { amp: 0.4, rate: 0.7 };
    let r = darboux_bike_check(&q, 0.6, v2(c(0.3, 0.1), c(0.5, -0.4)), 0.0, 9.0, 4096).unwrap();
    assert!(r.residuals.max() < 1e-6, "{:?}", r.residuals);
}

#[test]
fn darboux_residuals_decrease_at_second_order() {
    let q = Potential::Helical { amp: 0.6, rate: 1.1 };
    let v = v2(c(0.3, 0.1), c(0.5, -0.4));
    let res: Vec<f64> = [64usize, 128, 256]
        .iter()
        .map(|&n| darboux_bike_check(&q, 0.8, v, 0.0, 6.0, n).unwrap().residuals.max())
        .collect();
    assert!(res[0] / res[1] > 3.5 && res[1] / res[2] > 3.5, "{res:?}");
}

#[test]
fn darboux_partner_matches_bicycle_partner() {
    let q = Potential::Helical { amp: 0.5, rate: 0.6 };
    let eps = 0.8;
    let v = v2(c(0.6, 0.2), c(-0.3, 0.7));
    let d = darboux_transform(&q, 0.0, c(0.0, eps), v, 0.0, 7.0, 4096).unwrap();
    let r0 = darboux_initial_direction(0.0, c(0.0, eps), v);
    let chord0 = (&d.gamma_tilde.points()[0] - &d.gamma.points()[0]).normalize();
    assert!((&chord0 - &r0).norm() < 1e-12);
    let p = bicycle_partner(&d.gamma, 1.0 / eps, &r0).unwrap();
    let err = p.points().iter().zip(d.gamma_tilde.points()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-5, "{err}");
}

#[test]
fn wegner_curves_are_buckled_rings() {
    let lin = WegnerParams::linear(1.0, -0.5);
    let c1 = wegner_curve(&lin, &WegnerInit::default(), 12.0, 4096).unwrap();
    assert!(wegner_curvature_residual(&c1, &lin).unwrap() < 1e-6);
    assert!(wegner_relation_residual(&c1) < 1e-8);
    assert!(buckled_ring_residual(&c1, lin.lambda_el(), lin.mu_el()).unwrap() < 1e-5);
    assert_eq!((lin.lambda_el(), lin.mu_el()), (-1.0, 0.0));
    let circ = WegnerParams::circular(0.05, 0.2, 0.1);
    let init = WegnerInit { r0: 1.0, ..WegnerInit::default() };
    let c2 = wegner_curve(&circ, &init, 15.0, 4096).unwrap();
    assert!(wegner_curvature_residual(&c2, &circ).unwrap() < 1e-6);
    assert!(wegner_relation_residual(&c2) < 1e-8);
    assert!(buckled_ring_residual(&c2, circ.lambda_el(), circ.mu_el()).unwrap() < 1e-5);
    assert!((circ.lambda_el() - (0.04 - 0.08)).abs() < 1e-15 && (circ.mu_el() - 0.4).abs() < 1e-15);
}

#[test]
fn wegner_linear_curve_from_axis_is_mirror_symmetric() {
    let lin = WegnerParams::linear(0.8, -0.2);
    let up = wegner_curve(&lin, &WegnerInit { branch: 1.0, ..WegnerInit::default() }, 10.0, 1024).unwrap();
    let down = wegner_curve(&lin, &WegnerInit { branch: -1.0, ..WegnerInit::default() }, 10.0, 1024).unwrap();
    for (a, b) in up.points().iter().zip(down.points()) {
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] + b[1]).abs() < 1e-12);
    }
}

#[test]
fn circular_wegner_with_zero_a_is_a_circle() {
    let p = WegnerParams::circular(0.0, 0.4, 0.15);
    let cv = wegner_curve(&p, &WegnerInit { r0: 1.2, ..WegnerInit::default() }, 6.0, 1024).unwrap();
    let pts = cv.points();
    let (a, b, m) = (&pts[0], &pts[400], &pts[800]);
    let d = 2.0 * (a[0] * (b[1] - m[1]) + b[0] * (m[1] - a[1]) + m[0] * (a[1] - b[1]));
    let sq = |p: &DVector<f64>| p.norm_squared();
    let ux = (sq(a) * (b[1] - m[1]) + sq(b) * (m[1] - a[1]) + sq(m) * (a[1] - b[1])) / d;
    let uy = (sq(a) * (m[0] - b[0]) + sq(b) * (a[0] - m[0]) + sq(m) * (b[0] - a[0])) / d;
    let centre = DVector::from_vec(vec![ux, uy]);
    for p in &pts {
        assert!(((p - &centre).norm() - 1.0 / 0.8).abs() < 1e-8);
    }
    assert!(wegner_curvature_residual(&cv, &p).unwrap() < 1e-6);
}

#[test]
fn wegner_rejects_unsolvable_slope() {
    assert!(wegner_curve(&WegnerParams::linear(1.0, 2.0), &WegnerInit::default(), 1.0, 64).is_err());
}

#[test]
fn circle_is_a_buckled_ring_for_any_lambda() {
    let r = 1.7;
    let cv = build_curve(&CurveSpec::CircleMulti { folds: 1, radius: r }, 1024).unwrap();
    for lam in [-1.0, 0.0, 0.6] {
        let mu = 1.0 / (2.0 * r * r * r) + lam / r;
        assert!(buckled_ring_residual(&cv, lam, mu).unwrap() < 1e-9);
    }
}

#[test]
fn filament_flow_moves_circle_tangentially() {
    let cv = build_curve(&CurveSpec::CircleMulti { folds: 1, radius: 1.0 }, 1024).unwrap();
    let next = planar_filament_step(&cv, 1e-3).unwrap();
    let k = curvature_profile(&next, 0).unwrap().remove(0);
    assert!(k.iter().all(|k| (k - 1.0).abs() < 1e-5));
}

#[test]
fn buckled_ring_is_a_filament_soliton_and_ellipse_is_not() {
    let p = WegnerParams::circular(0.05, 0.2, 0.1);
    let cv = wegner_curve(&p, &WegnerInit::default(), 15.0, 2048).unwrap();
    let dt = 1e-3;
    let fit = filament_soliton_check(&cv, dt).unwrap();
    let half = filament_soliton_check(&cv, dt / 2.0).unwrap();
    assert!(fit.mismatch < 10.0 * dt * dt, "{fit:?}");
    assert!(fit.mismatch / half.mismatch > 3.0, "{fit:?} {half:?}");
    let before = cv.length();
    let after = planar_filament_step(&cv, dt).unwrap().length();
    assert!((before - after).abs() < 10.0 * dt * dt);
    let e = build_curve(&CurveSpec::Ellipse { a: 1.5, b: 1.0 }, 2048).unwrap();
    let e = resample_arclength(&e, 2048).unwrap();
    let ef = filament_soliton_check(&e, dt).unwrap();
    assert!(ef.mismatch > 100.0 * fit.mismatch && ef.mismatch > 10.0 * dt * dt, "{ef:?}");
}

#[test]
fn monodromy_integrals_on_unit_circle() {
    let cv = build_curve(&CurveSpec::CircleMulti { folds: 1, radius: 1.0 }, 1024).unwrap();
    let fd = frenet_data(&cv).unwrap();
    let ints = monodromy_integrands(4);
    let want = [2.0 * PI, 0.0, -PI, 0.0, -PI / 4.0];
    for (p, w) in ints.iter().zip(want) {
        let v = evaluate_on_curve(p, &fd).unwrap();
        assert!((v - c(w, 0.0)).norm() < 1e-8, "{v} vs {w}");
    }
}

#[test]
fn monodromy_integrals_match_unstable_solution_expansion() {
    let e = build_curve(&CurveSpec::Ellipse { a: 1.2, b: 1.0 }, 2048).unwrap();
    let e = embed(&resample_arclength(&e, 2048).unwrap(), 3).unwrap();
    let fd = frenet_data(&e).unwrap();
    let taylor = ell_log_taylor(&e, 0.2, 14, 4).unwrap();
    for (n, p) in monodromy_integrands(4).iter().enumerate() {
        let v = evaluate_on_curve(p, &fd).unwrap();
        let err = (v - taylor[n]).norm();
        assert!(err <= 1e-3 * v.norm().max(1.0), "I_{n}: {v} vs {}", taylor[n]);
    }
}
