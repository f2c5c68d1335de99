//! The monodromy as a Möbius transformation: SL₂ reductions, classification,
//! fixed points, the Berry-phase derivative formula, the planimeter and Klein distance.

use crate::bike_dynamics::{
    evolve_ball_point, integrate_bicycle_sphere_steps, lorentz_lift_steps, LorentzMatrix,
};
use crate::curves::{embed, signed_planar_area, Curve};
use crate::error::{invalid, numerical, Result};
use crate::numerics::{cross3, gauss5, loglog_slope};
use crate::ode::rk4_final;
use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

type C2 = Matrix2<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Monodromy with its optional SL₂ reduction (n = 2 real, n = 3 complex), defined up to sign.
#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyElement {
    pub lorentz: LorentzMatrix,
    pub reduction: Option<C2>,
    pub n: usize,
    pub ell: f64,
    /// Relative mismatch between the reduction pushed back to SO⁺(n,1) and `lorentz`.
    pub reduction_residual: f64,
}

/// Monodromy class by number of fixed points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonodromyClass {
    Hyperbolic,
    Parabolic,
    Elliptic,
    Trivial,
}

/// Classification with the trace and an ambiguity flag for the parabolic band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub class: MonodromyClass,
    pub trace: Complex64,
    /// Set when the parabolic verdict comes from the tolerance band rather than |tr| = 2 exactly.
    pub ambiguous: bool,
}

/// Fixed point of the monodromy on the sphere with the derivative of the map there.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub r: DVector<f64>,
    /// Complex for n = 3; real (zero imaginary part) otherwise.
    pub derivative: Complex64,
    pub stable: bool,
}

/// x ↦ 2×2 matrix identifying R^{2,1} with 𝔰𝔩₂(R), and R^{3,1} with Hermitian matrices.
pub fn to_matrix(x: &DVector<f64>) -> C2 {
    match x.len() {
        3 => C2::new(c(-x[1], 0.0), c(x[0] + x[2], 0.0), c(x[0] - x[2], 0.0), c(x[1], 0.0)),
        4 => C2::new(c(x[3] + x[0], 0.0), c(x[1], -x[2]), c(x[1], x[2]), c(x[3] - x[0], 0.0)),
        _ => panic!("to_matrix needs a vector in R^{{2,1}} or R^{{3,1}}"),
    }
}

/// Inverse of [`to_matrix`].
pub fn from_matrix(h: &C2, dim: usize) -> DVector<f64> {
    match dim {
        3 => DVector::from_vec(vec![
            0.5 * (h[(0, 1)].re + h[(1, 0)].re),
            h[(1, 1)].re,
            0.5 * (h[(0, 1)].re - h[(1, 0)].re),
        ]),
        4 => DVector::from_vec(vec![
            0.5 * (h[(0, 0)].re - h[(1, 1)].re),
            h[(1, 0)].re,
            h[(1, 0)].im,
            0.5 * (h[(0, 0)].re + h[(1, 1)].re),
        ]),
        _ => panic!("from_matrix needs dimension 3 or 4"),
    }
}

/// Lorentz matrix induced by an SL₂ element (n = 2: gHg⁻¹, n = 3: gHg*).
pub fn lorentz_from_sl2(g: &C2, n: usize) -> LorentzMatrix {
    let dim = n + 1;
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let mut e = DVector::zeros(dim);
        e[i] = 1.0;
        let h = to_matrix(&e);
        let img = if n == 2 {
            let inv = C2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]);
            g * h * inv
        } else {
            g * h * g.adjoint()
        };
        m.set_column(i, &from_matrix(&img, dim));
    }
    LorentzMatrix { n, m }
}

fn sqrt_c(z: Complex64) -> Complex64 {
    z.sqrt()
}

/// Recovers the SL₂ reduction from Pauli sums of the images of the basis, then
/// normalizes det = 1 and makes the largest entry have positive real part.
pub fn moebius_from_lorentz(m: &LorentzMatrix, ell: f64) -> Result<MonodromyElement> {
    if m.j_residual() > 1e-8 {
        return invalid("matrix is not Lorentz (MᵀJM ≠ J)");
    }
    let n = m.n;
    if m.m[(n, n)] <= 0.0 {
        return invalid("matrix does not preserve time orientation");
    }
    if n != 2 && n != 3 {
        return Ok(MonodromyElement { lorentz: m.clone(), reduction: None, n, ell, reduction_residual: 0.0 });
    }
    let dim = n + 1;
    let images: Vec<(C2, C2)> = (0..dim)
        .map(|i| {
            let mut e = DVector::zeros(dim);
            e[i] = 1.0;
            (to_matrix(&e), to_matrix(&(&m.m * &e)))
        })
        .collect();
    let one = C2::identity();
    let probes = [
        one,
        C2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        C2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        C2::new(c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)),
    ];
    let mut best = (C2::zeros(), one);
    for x in &probes {
        let mut cand = if n == 2 { *x } else { C2::zeros() };
        for (e, k) in &images {
            let f = if n == 2 { e.transpose() } else { *e };
            cand += k * x * f;
        }
        if cand.norm() > best.0.norm() {
            best = (cand, *x);
        }
    }
    let (cand, x) = best;
    let det = cand[(0, 0)] * cand[(1, 1)] - cand[(0, 1)] * cand[(1, 0)];
    let scale = if n == 2 {
        let adj = C2::new(cand[(1, 1)], -cand[(0, 1)], -cand[(1, 0)], cand[(0, 0)]);
        let s2 = 2.0 * (adj * x).trace().re;
        if !(s2 > 0.0) || det.re <= 0.0 {
            return numerical("reduction has non-positive determinant");
        }
        c(s2.sqrt(), 0.0)
    } else {
        let s2 = 2.0 * (cand.adjoint() * x).trace().re;
        if !(s2 > 0.0) || det.norm() == 0.0 {
            return numerical("reduction is singular");
        }
        sqrt_c(det / det.norm()) * s2.sqrt()
    };
    let mut g = cand / scale;
    let big = g.iter().fold(c(0.0, 0.0), |b, z| if z.norm() > b.norm() { *z } else { b });
    if big.re < 0.0 {
        g = -g;
    }
    let back = lorentz_from_sl2(&g, n);
    let reduction_residual = (&back.m - &m.m).amax() / m.m.amax().max(1.0);
    Ok(MonodromyElement { lorentz: m.clone(), reduction: Some(g), n, ell, reduction_residual })
}

/// Spinor (x, y) with y/x = (r₂ + i r₃)/(1 + r₁).
pub fn spinor_of(r: &DVector<f64>) -> (Complex64, Complex64) {
    let r3 = if r.len() > 2 { r[2] } else { 0.0 };
    if r[0] >= 0.0 {
        (c(1.0 + r[0], 0.0), c(r[1], r3))
    } else {
        (c(r[1], -r3), c(1.0 - r[0], 0.0))
    }
}

/// Unit vector of a spinor (Hopf map).
pub fn point_of(x: Complex64, y: Complex64, n: usize) -> DVector<f64> {
    let nrm = x.norm_sqr() + y.norm_sqr();
    let r1 = (x.norm_sqr() - y.norm_sqr()) / nrm;
    let w = x.conj() * y * 2.0 / nrm;
    if n == 2 {
        DVector::from_vec(vec![r1, w.re])
    } else {
        DVector::from_vec(vec![r1, w.re, w.im])
    }
}

impl MonodromyElement {
    /// Action on the sphere through the Lorentz matrix.
    pub fn act(&self, r: &DVector<f64>) -> DVector<f64> {
        self.lorentz.act(r)
    }

    /// Action on the sphere through the SL₂ reduction.
    pub fn act_reduced(&self, r: &DVector<f64>) -> Option<DVector<f64>> {
        let g = self.reduction?;
        let (x, y) = spinor_of(r);
        let x2 = g[(0, 0)] * x + g[(0, 1)] * y;
        let y2 = g[(1, 0)] * x + g[(1, 1)] * y;
        Some(point_of(x2, y2, self.n))
    }

    fn distance_to_identity(&self) -> f64 {
        match &self.reduction {
            Some(g) => {
                let id = C2::identity();
                (g - id).iter().map(|z| z.norm()).fold(0.0, f64::max).min((g + id).iter().map(|z| z.norm()).fold(0.0, f64::max))
            }
            None => {
                let id = DMatrix::identity(self.n + 1, self.n + 1);
                (&self.lorentz.m - id).amax()
            }
        }
    }
}

/// Classifies by the SL₂ trace (n = 2, 3) or by Lorentz eigenvalues otherwise.
pub fn classify(el: &MonodromyElement) -> Classification {
    if el.distance_to_identity() < 1e-8 {
        let trace = el.reduction.map(|g| g.trace()).unwrap_or(c(el.lorentz.trace(), 0.0));
        return Classification { class: MonodromyClass::Trivial, trace, ambiguous: false };
    }
    if let Some(g) = el.reduction {
        let tr = g.trace();
        let id = C2::identity();
        let shifted = if tr.re >= 0.0 { g - id } else { g + id };
        let scale = shifted.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let disc = (tr * tr - c(4.0, 0.0)).norm();
        let exact = 1e-12 * g.norm();
        let near_two = (tr.norm() - 2.0).abs();
        let class = if disc <= 1e-6 * scale {
            MonodromyClass::Parabolic
        } else if el.n == 2 {
            if tr.re.abs() > 2.0 {
                MonodromyClass::Hyperbolic
            } else {
                MonodromyClass::Elliptic
            }
        } else if tr.im.abs() < 1e-6 * g.norm() && tr.re.abs() < 2.0 {
            MonodromyClass::Elliptic
        } else {
            MonodromyClass::Hyperbolic
        };
        let ambiguous = class == MonodromyClass::Parabolic && near_two > exact;
        return Classification { class, trace: tr, ambiguous };
    }
    let m = &el.lorentz.m;
    let eig = m.clone().complex_eigenvalues();
    let maxmod = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let trace = c(m.trace(), 0.0);
    if maxmod > 1.0 + 1e-6 {
        return Classification { class: MonodromyClass::Hyperbolic, trace, ambiguous: false };
    }
    let mut p = m.clone();
    for _ in 0..6 {
        p = &p * &p;
    }
    let growth = p.amax() / m.amax().max(1.0);
    let class = if growth > 8.0 { MonodromyClass::Parabolic } else { MonodromyClass::Elliptic };
    Classification { class, trace, ambiguous: class == MonodromyClass::Parabolic }
}

/// Displacement of r under the monodromy or its inverse, whichever is smaller.
pub fn fixed_point_motion(el: &MonodromyElement, r: &DVector<f64>) -> f64 {
    let j = LorentzMatrix::signature(el.n);
    let inv = LorentzMatrix { n: el.n, m: &j * el.lorentz.m.transpose() * &j };
    (el.act(r) - r).norm().min((inv.act(r) - r).norm())
}

/// Accepted fixed-point motion: 1e−8 plus the rounding level of the Lorentz matrix entries.
pub fn fixed_point_tolerance(el: &MonodromyElement) -> f64 {
    1e-8 + 1e-14 * el.lorentz.m.amax()
}

/// Fixed points on the sphere with their derivatives (1/μ² for an eigenvalue μ of the reduction).
pub fn fixed_points(el: &MonodromyElement) -> Result<Vec<FixedPoint>> {
    let cls = classify(el);
    if cls.class == MonodromyClass::Trivial {
        return invalid("trivial monodromy: every point is fixed");
    }
    let mut out = Vec::new();
    if let Some(g) = el.reduction {
        if el.n == 2 && cls.class == MonodromyClass::Elliptic {
            return Ok(out);
        }
        let tr = g.trace();
        let disc = (tr * tr - c(4.0, 0.0)).sqrt();
        let mut mus = vec![(tr + disc) * 0.5, (tr - disc) * 0.5];
        if cls.class == MonodromyClass::Parabolic {
            mus.truncate(1);
            mus[0] = tr * 0.5;
        }
        for mu in mus {
            let v1 = (g[(0, 1)], mu - g[(0, 0)]);
            let v2 = (mu - g[(1, 1)], g[(1, 0)]);
            let (x, y) = if v1.0.norm() + v1.1.norm() >= v2.0.norm() + v2.1.norm() { v1 } else { v2 };
            let (x, y) = if el.n == 2 {
                let ph = if x.norm() >= y.norm() { x / x.norm() } else { y / y.norm() };
                (x / ph, y / ph)
            } else {
                (x, y)
            };
            let r = point_of(x, y, el.n);
            let d = c(1.0, 0.0) / (mu * mu);
            let d = if el.n == 2 { c(d.re, 0.0) } else { d };
            out.push(FixedPoint { stable: d.norm() < 1.0, derivative: d, r });
        }
    } else {
        let m = &el.lorentz.m;
        let n = el.n;
        let eig = m.clone().complex_eigenvalues();
        let j = LorentzMatrix::signature(n);
        for z in eig.iter() {
            if z.im.abs() > 1e-9 || (z.re - 1.0).abs() < 1e-7 {
                continue;
            }
            let shifted = m - DMatrix::identity(n + 1, n + 1) * z.re;
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.unwrap();
            let (imin, _) = svd
                .singular_values
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |a, (i, s)| if *s < a.1 { (i, *s) } else { a });
            let x: DVector<f64> = vt.row(imin).transpose();
            let q = (x.transpose() * &j * &x)[(0, 0)];
            if q.abs() > 1e-6 * x.norm_squared() || x[n].abs() < 1e-12 {
                continue;
            }
            let r: DVector<f64> = x.rows(0, n) / x[n];
            let d = 1.0 / z.re;
            out.push(FixedPoint { r: r.normalize(), derivative: c(d, 0.0), stable: d < 1.0 });
        }
    }
    let tol = fixed_point_tolerance(el);
    for fp in &out {
        let moved = fixed_point_motion(el, &fp.r);
        if moved > tol {
            return numerical(format!("fixed point moved by {moved:.3e} under the monodromy"));
        }
    }
    Ok(out)
}

/// Derivative of the sphere monodromy at a fixed point, from the SL₂ reduction.
pub fn derivative_at_fixed_point(el: &MonodromyElement, fp: &DVector<f64>) -> Result<Complex64> {
    let moved = fixed_point_motion(el, fp);
    if moved > fixed_point_tolerance(el) {
        return invalid(format!("point is not fixed (moved by {moved:.3e})"));
    }
    match el.reduction {
        Some(g) => {
            let (x, y) = spinor_of(fp);
            let gx = g[(0, 0)] * x + g[(0, 1)] * y;
            let gy = g[(1, 0)] * x + g[(1, 1)] * y;
            let mu = (x.conj() * gx + y.conj() * gy) / (x.norm_sqr() + y.norm_sqr());
            let d = c(1.0, 0.0) / (mu * mu);
            Ok(if el.n == 2 { c(d.re, 0.0) } else { d })
        }
        None => {
            let n = el.n;
            let mut x = DVector::zeros(n + 1);
            x.rows_mut(0, n).copy_from(fp);
            x[n] = 1.0;
            let y = &el.lorentz.m * x;
            Ok(c(1.0 / y[n], 0.0))
        }
    }
}

/// L_γ = −∫ r·v dt by the trapezoid rule on the trajectory grid.
pub fn signed_rear_length(front: &Curve, t: &[f64], r: &[DVector<f64>]) -> Result<f64> {
    if t.len() != r.len() || t.len() < 2 {
        return invalid("grid mismatch between times and directions");
    }
    let mut sum = 0.0;
    for i in 0..t.len() - 1 {
        let a = -front.velocity(t[i]).dot(&r[i]);
        let b = -front.velocity(t[i + 1]).dot(&r[i + 1]);
        sum += 0.5 * (a + b) * (t[i + 1] - t[i]);
    }
    Ok(sum)
}

/// Signed area of a closed path on S², reduced to (−2π, 2π] and as accumulated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalArea {
    pub reduced: f64,
    pub unreduced: f64,
}

/// Reduces an angle mod 4π into (−2π, 2π].
pub fn reduce_area(a: f64) -> f64 {
    let mut x = a - 2.0 * TAU * (a / (2.0 * TAU)).round();
    if x <= -PI * 2.0 {
        x += 2.0 * TAU;
    }
    x
}

/// Algebraic area enclosed by a closed path on S², summed over triangles from a pole
/// kept away from the path; positive for counterclockwise loops seen from outside.
pub fn spherical_signed_area(path: &[DVector<f64>]) -> Result<SphericalArea> {
    if path.len() < 4 || path[0].len() != 3 {
        return invalid("need a closed path of at least three points on S²");
    }
    if (&path[0] - &path[path.len() - 1]).norm() > 1e-6 {
        return invalid("path is not closed");
    }
    let mut candidates: Vec<DVector<f64>> = Vec::new();
    for i in 0..3 {
        for s in [1.0, -1.0] {
            let mut e = DVector::zeros(3);
            e[i] = s;
            candidates.push(e);
        }
    }
    let centroid: DVector<f64> = path.iter().fold(DVector::zeros(3), |a, p| a + p);
    if centroid.norm() > 1e-9 {
        candidates.push(centroid.normalize());
    }
    let pole = candidates
        .into_iter()
        .map(|p| {
            let m = path.iter().map(|r| 1.0 + p.dot(r)).fold(f64::INFINITY, f64::min);
            (p, m)
        })
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap()
        .0;
    let mut sum = 0.0;
    for w in path.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let num = pole.dot(&cross3(a, b));
        let den = 1.0 + pole.dot(a) + a.dot(b) + b.dot(&pole);
        sum += 2.0 * num.atan2(den);
    }
    Ok(SphericalArea { reduced: reduce_area(sum), unreduced: sum })
}

/// Area of a smooth closed loop from an even number of samples: polygon areas at full and
/// half resolution combined by Richardson extrapolation.
pub fn spherical_loop_area(path: &[DVector<f64>]) -> Result<SphericalArea> {
    let fine = spherical_signed_area(path)?;
    if (path.len() - 1) % 2 != 0 || path.len() < 9 {
        return Ok(fine);
    }
    let half: Vec<DVector<f64>> = path.iter().step_by(2).cloned().collect();
    let coarse = spherical_signed_area(&half)?;
    let unreduced = (4.0 * fine.unreduced - coarse.unreduced) / 3.0;
    Ok(SphericalArea { reduced: reduce_area(unreduced), unreduced })
}

/// r(t₁) for the sphere form without building a rear track.
pub fn sphere_map(front: &Curve, ell: f64, r0: &DVector<f64>, t0: f64, t1: f64, steps: usize) -> DVector<f64> {
    rk4_final(
        |t, r: &DVector<f64>| {
            let v = front.velocity(t);
            (&v * -1.0 + r * v.dot(r)) / ell
        },
        |r| r.normalize(),
        r0.clone(),
        t0,
        t1,
        steps,
    )
}

/// Orthonormal basis of the tangent space at r with e₁ × e₂ = r when n = 3.
pub fn tangent_basis(r: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = r.len();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        let mut v = &e - r * r.dot(&e);
        for b in &basis {
            v -= b * b.dot(&v);
        }
        if v.norm() > 1e-3 {
            basis.push(v.normalize());
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    if n == 3 && cross3(&basis[0], &basis[1]).dot(r) < 0.0 {
        basis.swap(0, 1);
    }
    if n == 2 {
        basis[0] = DVector::from_vec(vec![-r[1], r[0]]);
    }
    basis
}

fn exp_map(r: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let a = v.norm();
    if a == 0.0 {
        return r.clone();
    }
    r * a.cos() + v * (a.sin() / a)
}

fn log_map(r: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    let perp = y - r * r.dot(y);
    let s = perp.norm();
    if s == 0.0 {
        return perp;
    }
    let ang = s.atan2(r.dot(y));
    perp * (ang / s)
}

/// Jacobian of the sphere monodromy at a fixed point in the tangent basis, by
/// fourth-order centered differences through the exponential map.
pub fn monodromy_jacobian(
    front: &Curve,
    ell: f64,
    r0: &DVector<f64>,
    t0: f64,
    t1: f64,
    steps: usize,
    delta: f64,
) -> DMatrix<f64> {
    let basis = tangent_basis(r0);
    let k = basis.len();
    let mut jac = DMatrix::zeros(k, k);
    for j in 0..k {
        let eval = |s: f64| {
            let y = sphere_map(front, ell, &exp_map(r0, &(&basis[j] * s)), t0, t1, steps);
            log_map(r0, &y)
        };
        let d = (eval(-2.0 * delta) - eval(2.0 * delta) + (eval(delta) - eval(-delta)) * 8.0) / (12.0 * delta);
        for i in 0..k {
            jac[(i, j)] = basis[i].dot(&d);
        }
    }
    jac
}

/// Parallel transport of the tangent basis along a sampled path by repeated projection,
/// refined by one Richardson step.
pub fn parallel_transport(path: &[DVector<f64>]) -> DMatrix<f64> {
    let transport = |stride: usize| {
        let r0 = &path[0];
        let basis = tangent_basis(r0);
        let k = basis.len();
        let mut frame = basis.clone();
        let mut i = 0;
        while i + stride < path.len() {
            i += stride;
            let r = &path[i];
            for f in frame.iter_mut() {
                *f = (&*f - r * r.dot(f)).normalize();
            }
        }
        let mut p = DMatrix::zeros(k, k);
        for j in 0..k {
            for a in 0..k {
                p[(a, j)] = basis[a].dot(&frame[j]);
            }
        }
        p
    };
    let fine = transport(1);
    if (path.len() - 1) % 2 == 0 {
        let coarse = transport(2);
        fine * 2.0 - coarse
    } else {
        fine
    }
}

/// Options for [`berry_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerryOptions {
    /// Integration steps per period for the monodromy and its Jacobian.
    pub fine_steps: usize,
    /// Samples of r(t) used for L_γ and Ω; must divide `fine_steps`.
    pub coarse_samples: usize,
    pub fd_step: f64,
}

impl Default for BerryOptions {
    fn default() -> Self {
        BerryOptions { fine_steps: 4096, coarse_samples: 1024, fd_step: 1e-3 }
    }
}

/// Both sides of M′(r₀) = exp(−L_γ/ℓ + iΩ) at a fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct BerryReport {
    pub class: MonodromyClass,
    pub fixed_point: DVector<f64>,
    /// From the Jacobian of the sphere map.
    pub lhs: Complex64,
    /// From the SL₂ reduction.
    pub lhs_moebius: Complex64,
    pub rhs: Complex64,
    pub rear_length: f64,
    pub omega: SphericalArea,
    /// |LHS − RHS| / |RHS|.
    pub residual: f64,
    /// |arg LHS − Ω| reduced mod 2π.
    pub phase_mismatch: f64,
    /// ‖J − e^{−L/ℓ}P‖ / ‖J‖ with P the discrete parallel transport.
    pub transport_residual: f64,
}

fn wrap_pi(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

/// Checks the derivative formula on a closed front in R³ (or Rⁿ for the transport form).
pub fn berry_check(front: &Curve, ell: f64, opts: &BerryOptions) -> Result<BerryReport> {
    if !front.closed() {
        return invalid("berry_check needs a closed front");
    }
    if opts.coarse_samples == 0 || opts.fine_steps % opts.coarse_samples != 0 {
        return invalid("coarse_samples must divide fine_steps");
    }
    let n = front.dimension();
    let t0 = front.t_start();
    let t1 = t0 + front.period().unwrap();
    let lift = lorentz_lift_steps(front, ell, t0, t1, opts.fine_steps)?;
    let el = moebius_from_lorentz(&lift, ell)?;
    let cls = classify(&el);
    let fps = fixed_points(&el)?;
    if fps.is_empty() {
        return invalid("monodromy has no fixed point");
    }
    let fp = if cls.class == MonodromyClass::Hyperbolic {
        fps.iter().min_by(|a, b| a.derivative.norm().partial_cmp(&b.derivative.norm()).unwrap()).unwrap()
    } else {
        fps.iter().max_by(|a, b| a.r[n - 1].partial_cmp(&b.r[n - 1]).unwrap()).unwrap()
    };
    let r0 = fp.r.clone();
    let jac = monodromy_jacobian(front, ell, &r0, t0, t1, opts.fine_steps, opts.fd_step);
    let lhs = if n == 3 {
        c(0.5 * (jac[(0, 0)] + jac[(1, 1)]), 0.5 * (jac[(1, 0)] - jac[(0, 1)]))
    } else {
        c(jac.determinant().abs().powf(1.0 / (n - 1) as f64), 0.0)
    };
    let traj = integrate_bicycle_sphere_steps(front, ell, &r0, t0, t1, opts.fine_steps)?;
    let stride = opts.fine_steps / opts.coarse_samples;
    let sub_t: Vec<f64> = traj.states.iter().step_by(stride).map(|s| s.t).collect();
    let mut sub_r: Vec<DVector<f64>> = traj.states.iter().step_by(stride).map(|s| s.r.clone()).collect();
    let last = sub_r.len() - 1;
    let gap = (&sub_r[last] - &sub_r[0]).norm();
    if gap > 1e-6 {
        return numerical(format!("trajectory from the fixed point fails to close (gap {gap:.3e})"));
    }
    sub_r[last] = sub_r[0].clone();
    let rear_length = signed_rear_length(front, &sub_t, &sub_r)?;
    let omega = if n == 3 {
        spherical_loop_area(&sub_r)?
    } else {
        SphericalArea { reduced: 0.0, unreduced: 0.0 }
    };
    let rhs = (c(-rear_length / ell, omega.reduced)).exp();
    let residual = (lhs - rhs).norm() / rhs.norm();
    let phase_mismatch = if n == 3 { wrap_pi(lhs.arg() - omega.reduced).abs() } else { 0.0 };
    let full: Vec<DVector<f64>> = traj.directions();
    let p = parallel_transport(&full);
    let predicted = p * (-rear_length / ell).exp();
    let transport_residual = (&jac - &predicted).norm() / jac.norm();
    let lhs_moebius = fp.derivative;
    Ok(BerryReport {
        class: cls.class,
        fixed_point: r0,
        lhs,
        lhs_moebius,
        rhs,
        rear_length,
        omega,
        residual,
        phase_mismatch,
        transport_residual,
    })
}

/// Skew-symmetric area operator 𝒜 = ½∮(Γ̇Γᵀ − ΓΓ̇ᵀ)dt, with the axial vector for n = 3.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaBivector {
    pub matrix: DMatrix<f64>,
    pub axial: Option<[f64; 3]>,
}

/// Area operator of a closed front.
pub fn area_bivector(front: &Curve) -> Result<AreaBivector> {
    if !front.closed() {
        return invalid("area operator needs a closed front");
    }
    let n = front.dimension();
    let mut m = DMatrix::zeros(n, n);
    let times = front.times();
    for i in 0..n {
        for j in (i + 1)..n {
            let f = |t: f64| {
                let d = front.eval(t, 1);
                0.5 * (d[1][i] * d[0][j] - d[0][i] * d[1][j])
            };
            let v: f64 = times.windows(2).map(|w| gauss5(f, w[0], w[1])).sum();
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    let axial = (n == 3).then(|| [m[(2, 1)], m[(0, 2)], m[(1, 0)]]);
    Ok(AreaBivector { matrix: m, axial })
}

/// Hatchet form: ℓ²θ against the signed area for a planar front.
#[derive(Clone, Debug, PartialEq)]
pub struct HatchetReport {
    pub area: f64,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// Planimeter fit of ‖r(L) − r₀ − ε²𝒜r₀‖ against ε.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanimeterReport {
    pub area: AreaBivector,
    pub eps: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub hatchet: Option<HatchetReport>,
}

/// Integrates with ℓ = 1/ε over one period for each ε and fits the error slope.
pub fn planimeter_check(front: &Curve, eps_list: &[f64], r0: &DVector<f64>, steps: usize) -> Result<PlanimeterReport> {
    if eps_list.len() < 4 {
        return invalid("need at least four eps values for the slope fit");
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return invalid("eps values must be positive and decreasing");
    }
    let area = area_bivector(front)?;
    let t0 = front.t_start();
    let t1 = t0 + front.period().unwrap();
    let ar0 = &area.matrix * r0;
    let mut errors = Vec::new();
    let mut hatchet_err = Vec::new();
    let planar_area = if front.dimension() == 2 { Some(signed_planar_area(front)?) } else { None };
    for &eps in eps_list {
        let ell = 1.0 / eps;
        let r1 = sphere_map(front, ell, r0, t0, t1, steps);
        errors.push((&r1 - r0 - &ar0 * (eps * eps)).norm());
        if let Some(a) = planar_area {
            let theta = (r0[0] * r1[1] - r0[1] * r1[0]).atan2(r0.dot(&r1));
            hatchet_err.push((ell * ell * theta - a).abs());
        }
    }
    let slope = loglog_slope(eps_list, &errors);
    let hatchet = planar_area.map(|a| HatchetReport {
        area: a,
        slope: loglog_slope(eps_list, &hatchet_err),
        errors: hatchet_err,
    });
    Ok(PlanimeterReport { area, eps: eps_list.to_vec(), errors, slope, hatchet })
}

/// Spherical area of the r-loop against the planar area for a front scaled by ε in R³, ℓ = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BirdsEyeReport {
    pub eps: Vec<f64>,
    pub planar_area: Vec<f64>,
    pub omega: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// |A − Ω| for shrinking copies of a closed planar front, ridden from the upper fixed point.
pub fn birds_eye_check(front: &Curve, eps_list: &[f64], steps: usize) -> Result<BirdsEyeReport> {
    if front.dimension() != 2 || !front.closed() {
        return invalid("bird's-eye check needs a closed planar front");
    }
    if eps_list.len() < 3 {
        return invalid("need at least three eps values");
    }
    let base = embed(front, 3)?;
    let mut out = BirdsEyeReport { eps: eps_list.to_vec(), planar_area: vec![], omega: vec![], errors: vec![], slope: 0.0 };
    for &eps in eps_list {
        let scaled = scale_curve(&base, eps)?;
        let t0 = scaled.t_start();
        let t1 = t0 + scaled.period().unwrap();
        let lift = lorentz_lift_steps(&scaled, 1.0, t0, t1, steps)?;
        let el = moebius_from_lorentz(&lift, 1.0)?;
        let fps = fixed_points(&el)?;
        let up = fps
            .iter()
            .max_by(|a, b| a.r[2].partial_cmp(&b.r[2]).unwrap())
            .ok_or_else(|| crate::GeoError::Numerical("no fixed point".into()))?;
        let traj = integrate_bicycle_sphere_steps(&scaled, 1.0, &up.r, t0, t1, steps)?;
        let mut path = traj.directions();
        let last = path.len() - 1;
        path[last] = path[0].clone();
        let omega = spherical_loop_area(&path)?.reduced;
        let a = signed_planar_area(front)? * eps * eps;
        out.planar_area.push(a);
        out.omega.push(omega);
        out.errors.push((a - omega).abs());
    }
    out.slope = loglog_slope(eps_list, &out.errors);
    Ok(out)
}

/// Samples of a curve scaled by s about the origin, with exact velocities.
pub fn scale_curve(c0: &Curve, s: f64) -> Result<Curve> {
    let t = c0.times();
    let p = t.iter().map(|&u| c0.point(u) * s).collect();
    let v = t.iter().map(|&u| c0.velocity(u) * s).collect();
    Ok(Curve::from_samples(t, p, Some(v), c0.closed())?.with_analytic_id(c0.analytic_id()))
}

/// Hyperbolic distance in the Klein ball of curvature −1/ℓ², via the chord cross-ratio.
pub fn klein_distance(x: &DVector<f64>, y: &DVector<f64>, ell: f64) -> Result<f64> {
    if x.norm() >= 1.0 || y.norm() >= 1.0 {
        return invalid("points must lie strictly inside the unit ball");
    }
    if !(ell > 0.0) {
        return invalid("ell must be positive");
    }
    let d = (y - x).norm();
    if d == 0.0 {
        return Ok(0.0);
    }
    let u = (y - x) / d;
    let b = x.dot(&u);
    let disc = (b * b - x.norm_squared() + 1.0).sqrt();
    let (sm, sp) = (-b - disc, -b + disc);
    Ok(0.5 * ell * (((d - sm) * sp) / ((-sm) * (sp - d))).ln())
}

/// Klein distance between two interior points before and after one period of the flow.
pub fn klein_drift(front: &Curve, ell: f64, x: &DVector<f64>, y: &DVector<f64>, steps: usize) -> Result<f64> {
    let t0 = front.t_start();
    let t1 = front.period().map(|p| t0 + p).unwrap_or(front.t_end());
    let before = klein_distance(x, y, ell)?;
    let x1 = evolve_ball_point(front, ell, x, t0, t1, steps)?;
    let y1 = evolve_ball_point(front, ell, y, t0, t1, steps)?;
    Ok((klein_distance(&x1, &y1, ell)? - before).abs())
}

/// Monodromy summary for export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub n: usize,
    pub ell: f64,
    pub class: MonodromyClass,
    pub ambiguous: bool,
    pub trace: [f64; 2],
    pub fixed_points: Vec<Vec<f64>>,
    pub derivatives: Vec<[f64; 2]>,
    pub rear_length: Option<f64>,
    pub berry_area: Option<f64>,
    pub residuals: std::collections::BTreeMap<String, f64>,
}

/// Monodromy over one period with classification, fixed points and, for a fixed
/// point, the rear length and Berry area of its periodic trajectory.
pub fn monodromy_report(front: &Curve, ell: f64, steps: usize) -> Result<MonodromyReport> {
    if !front.closed() {
        return invalid("monodromy needs a closed front");
    }
    let t0 = front.t_start();
    let t1 = t0 + front.period().unwrap();
    let lift = lorentz_lift_steps(front, ell, t0, t1, steps)?;
    let el = moebius_from_lorentz(&lift, ell)?;
    let cls = classify(&el);
    let fps = if cls.class == MonodromyClass::Trivial { vec![] } else { fixed_points(&el)? };
    let mut residuals = std::collections::BTreeMap::new();
    residuals.insert("j_residual".to_string(), lift.j_residual());
    residuals.insert("reduction_residual".to_string(), el.reduction_residual);
    let mut rear_length = None;
    let mut berry_area = None;
    if let Some(fp) = fps.iter().min_by(|a, b| a.derivative.norm().partial_cmp(&b.derivative.norm()).unwrap()) {
        let traj = integrate_bicycle_sphere_steps(front, ell, &fp.r, t0, t1, steps)?;
        let mut r = traj.directions();
        let last = r.len() - 1;
        residuals.insert("closure_gap".to_string(), (&r[last] - &r[0]).norm());
        r[last] = r[0].clone();
        rear_length = Some(signed_rear_length(front, &traj.times(), &r)?);
        if front.dimension() == 3 {
            berry_area = Some(spherical_loop_area(&r)?.reduced);
        }
    }
    Ok(MonodromyReport {
        n: front.dimension(),
        ell,
        class: cls.class,
        ambiguous: cls.ambiguous,
        trace: [cls.trace.re, cls.trace.im],
        fixed_points: fps.iter().map(|f| f.r.iter().copied().collect()).collect(),
        derivatives: fps.iter().map(|f| [f.derivative.re, f.derivative.im]).collect(),
        rear_length,
        berry_area,
        residuals,
    })
}
