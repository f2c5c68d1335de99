//! Wegner curves and buckled rings, the planar filament flow, the AKNS spectral problem,
//! STP curves and Darboux transformations.

use crate::correspondence::{verify_correspondence, CorrespondenceResiduals};
use crate::curves::{frenet_data, resample_arclength, AnalyticId, Curve};
use crate::error::{invalid, numerical, Result};
use crate::numerics::{fornberg_weights, uniform_derivative};
use crate::ode::{rk4_path, rk4_step};
use nalgebra::{DVector, Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C2 = Matrix2<Complex64>;
type V2 = Vector2<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Family of Wegner curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WegnerFamily {
    /// ẋ = ay² + b, curvature −2ay.
    Linear,
    /// r·ψ̇ = ar³ + br + c/r, curvature 4ar² + 2b.
    Circular,
}

/// Wegner curve parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WegnerParams {
    pub family: WegnerFamily,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl WegnerParams {
    pub fn linear(a: f64, b: f64) -> Self {
        WegnerParams { family: WegnerFamily::Linear, a, b, c: 0.0 }
    }

    pub fn circular(a: f64, b: f64, c: f64) -> Self {
        WegnerParams { family: WegnerFamily::Circular, a, b, c }
    }

    /// λ in κ̈ + ½κ³ + λκ = μ.
    pub fn lambda_el(&self) -> f64 {
        match self.family {
            WegnerFamily::Linear => 2.0 * self.a * self.b,
            WegnerFamily::Circular => 8.0 * self.a * self.c - 2.0 * self.b * self.b,
        }
    }

    /// μ in κ̈ + ½κ³ + λκ = μ.
    pub fn mu_el(&self) -> f64 {
        match self.family {
            WegnerFamily::Linear => 0.0,
            WegnerFamily::Circular => 8.0 * self.a,
        }
    }

    /// Curvature predicted at a point.
    pub fn predicted_curvature(&self, p: &DVector<f64>) -> f64 {
        match self.family {
            WegnerFamily::Linear => -2.0 * self.a * p[1],
            WegnerFamily::Circular => 4.0 * self.a * p.norm_squared() + 2.0 * self.b,
        }
    }

    fn s_of_r(&self, r: f64) -> f64 {
        self.a * r * r * r + self.b * r + self.c / r
    }

    fn ds_of_r(&self, r: f64) -> f64 {
        3.0 * self.a * r * r + self.b - self.c / (r * r)
    }
}

/// Initial data: height y0 (linear family) or radius r0 (circular family), the sign of
/// ẏ or ṙ at the start, and the starting polar angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WegnerInit {
    pub y0: f64,
    pub r0: f64,
    pub branch: f64,
    pub psi0: f64,
}

impl Default for WegnerInit {
    fn default() -> Self {
        WegnerInit { y0: 0.0, r0: 1.0, branch: 1.0, psi0: 0.0 }
    }
}

/// Integrates a Wegner curve in arclength on [0, length] through the second-order system
/// (ẋ = ay² + b, ÿ = −2ay·ẋ, or ṙ = u, u̇ = −S S′, ψ̇ = S/r²·r), which passes turning points smoothly.
pub fn wegner_curve(params: &WegnerParams, init: &WegnerInit, length: f64, samples: usize) -> Result<Curve> {
    if !(length > 0.0) || samples < 8 {
        return invalid("need a positive length and at least 8 samples");
    }
    let sub = 8;
    let steps = (samples - 1) * sub;
    let sign = if init.branch < 0.0 { -1.0 } else { 1.0 };
    let p = *params;
    let (path, to_point): (Vec<DVector<f64>>, Box<dyn Fn(&DVector<f64>) -> (DVector<f64>, DVector<f64>)>) =
        match p.family {
            WegnerFamily::Linear => {
                let fx = p.a * init.y0 * init.y0 + p.b;
                if fx.abs() > 1.0 {
                    return invalid(format!("|ay0² + b| = {:.3} exceeds 1: no real slope", fx.abs()));
                }
                let w0 = sign * (1.0 - fx * fx).max(0.0).sqrt();
                let y0 = DVector::from_vec(vec![0.0, init.y0, w0]);
                let f = move |_t: f64, s: &DVector<f64>| {
                    let fx = p.a * s[1] * s[1] + p.b;
                    DVector::from_vec(vec![fx, s[2], -2.0 * p.a * s[1] * fx])
                };
                let path = rk4_path(f, |s| s, y0, 0.0, length, steps);
                let conv = move |s: &DVector<f64>| {
                    let fx = p.a * s[1] * s[1] + p.b;
                    (DVector::from_vec(vec![s[0], s[1]]), DVector::from_vec(vec![fx, s[2]]))
                };
                (path, Box::new(conv))
            }
            WegnerFamily::Circular => {
                if !(init.r0 > 0.0) {
                    return invalid("r0 must be positive");
                }
                let s0 = p.s_of_r(init.r0);
                if s0.abs() > 1.0 {
                    return invalid(format!("|S(r0)| = {:.3} exceeds 1: no real radial speed", s0.abs()));
                }
                let u0 = sign * (1.0 - s0 * s0).max(0.0).sqrt();
                let y0 = DVector::from_vec(vec![init.r0, u0, init.psi0]);
                let f = move |_t: f64, st: &DVector<f64>| {
                    let r = st[0];
                    let s = p.s_of_r(r);
                    DVector::from_vec(vec![st[1], -s * p.ds_of_r(r), s / r])
                };
                let path = rk4_path(f, |s| s, y0, 0.0, length, steps);
                let conv = move |st: &DVector<f64>| {
                    let (r, u, psi) = (st[0], st[1], st[2]);
                    let s = p.s_of_r(r);
                    let (sn, cs) = psi.sin_cos();
                    (
                        DVector::from_vec(vec![r * cs, r * sn]),
                        DVector::from_vec(vec![u * cs - s * sn, u * sn + s * cs]),
                    )
                };
                (path, Box::new(conv))
            }
        };
    if path.iter().any(|s| !s.iter().all(|x| x.is_finite()) || (p.family == WegnerFamily::Circular && s[0] <= 0.0)) {
        return numerical("Wegner integration left the admissible region");
    }
    let h = length / (samples - 1) as f64;
    let mut t = Vec::with_capacity(samples);
    let mut pts = Vec::with_capacity(samples);
    let mut vel = Vec::with_capacity(samples);
    for i in 0..samples {
        let (x, v) = to_point(&path[i * sub]);
        t.push(h * i as f64);
        pts.push(x);
        vel.push(v);
    }
    let id = match p.family {
        WegnerFamily::Linear => AnalyticId::WegnerLinear,
        WegnerFamily::Circular => AnalyticId::WegnerCircular,
    };
    Ok(Curve::from_samples(t, pts, Some(vel), false)?.with_analytic_id(Some(id)))
}

/// Largest deviation of the measured curvature from the Wegner curvature law.
pub fn wegner_curvature_residual(c: &Curve, params: &WegnerParams) -> Result<f64> {
    let fd = frenet_data(c)?;
    let k = fd.signed_curvature.ok_or_else(|| crate::GeoError::Invalid("planar curve required".into()))?;
    let pts = c.points();
    Ok(k.iter().zip(&pts).map(|(k, p)| (k - params.predicted_curvature(p)).abs()).fold(0.0, f64::max))
}

/// Largest |speed − 1| of the first-order relation, i.e. drift of the conserved slope identity.
pub fn wegner_relation_residual(c: &Curve) -> f64 {
    c.speed_deviation()
}

/// Signed curvature and its arclength derivatives at the samples of a planar arclength curve.
pub fn curvature_profile(c: &Curve, order: usize) -> Result<Vec<Vec<f64>>> {
    if c.dimension() != 2 {
        return invalid("planar curve required");
    }
    let fd = frenet_data(c)?;
    let k = fd.signed_curvature.unwrap();
    let mut out = vec![k.clone()];
    for d in 1..=order {
        out.push(uniform_derivative(&k, fd.spacing, d, fd.closed));
    }
    Ok(out)
}

/// max |κ̈ + ½κ³ + λκ − μ| over the samples.
pub fn buckled_ring_residual(c: &Curve, lambda_el: f64, mu_el: f64) -> Result<f64> {
    if c.samples().len() < 16 {
        return invalid("too few samples to resolve κ̈");
    }
    let prof = curvature_profile(c, 2)?;
    let (k, kdd) = (&prof[0], &prof[2]);
    Ok(k.iter()
        .zip(kdd)
        .map(|(k, kdd)| (kdd + 0.5 * k * k * k + lambda_el * k - mu_el).abs())
        .fold(0.0, f64::max))
}

/// One explicit Euler step of Γ′ = (κ²/2)v + κ̇n followed by arclength resampling.
pub fn planar_filament_step(c: &Curve, dt: f64) -> Result<Curve> {
    let fd = frenet_data(c)?;
    let k = fd.signed_curvature.clone().unwrap();
    let kd = uniform_derivative(&k, fd.spacing, 1, fd.closed);
    let pts = c.points();
    let mut new_pts = Vec::with_capacity(pts.len());
    for i in 0..fd.s.len() {
        let v = &fd.tangent[i];
        let n = DVector::from_vec(vec![-v[1], v[0]]);
        new_pts.push(&pts[i] + (v * (0.5 * k[i] * k[i]) + n * kd[i]) * dt);
    }
    if fd.closed {
        new_pts.push(new_pts[0].clone());
    }
    let t = c.times();
    let moved = Curve::from_samples(t, new_pts, None, fd.closed)?;
    let m = if fd.closed { fd.s.len() } else { fd.s.len() };
    resample_arclength(&moved, m)
}

/// Best-shift comparison of two curvature profiles sampled with spacing h.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftFit {
    pub shift: f64,
    /// L² norm of κ_after(s) − κ_before(s + shift) over the compared window.
    pub mismatch: f64,
    /// L² norm of κ_after − κ_before without shifting.
    pub unshifted: f64,
}

fn interp_profile(k: &[f64], h: f64, s: f64, periodic: bool) -> f64 {
    let n = k.len();
    let x = s / h;
    let i = x.floor() as isize;
    let offs: Vec<isize> = (-2..=3).collect();
    let xs: Vec<f64> = offs.iter().map(|o| (i + o) as f64).collect();
    let w = fornberg_weights(x, &xs, 0);
    offs.iter()
        .zip(&w[0])
        .map(|(o, wt)| {
            let j = i + o;
            let idx = if periodic { j.rem_euclid(n as isize) } else { j.clamp(0, n as isize - 1) } as usize;
            wt * k[idx]
        })
        .sum()
}

/// Minimizes the L² mismatch over shifts |δ| ≤ max_shift; open profiles drop a margin at each end.
pub fn best_shift(before: &[f64], after: &[f64], h: f64, periodic: bool, max_shift: f64) -> ShiftFit {
    let n = before.len().min(after.len());
    let margin = if periodic { 0 } else { ((max_shift / h).ceil() as usize + 4).max(n / 10) };
    let idx: Vec<usize> = (margin..n - margin).collect();
    let cost = |d: f64| -> f64 {
        idx.iter()
            .map(|&i| {
                let e = after[i] - interp_profile(before, h, i as f64 * h + d, periodic);
                e * e
            })
            .sum::<f64>()
            * h
    };
    let grid = 200;
    let mut best = (0.0, cost(0.0));
    for j in 0..=grid {
        let d = -max_shift + 2.0 * max_shift * j as f64 / grid as f64;
        let v = cost(d);
        if v < best.1 {
            best = (d, v);
        }
    }
    let step = 2.0 * max_shift / grid as f64;
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if cost(a) < cost(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let d = 0.5 * (lo + hi);
    ShiftFit { shift: d, mismatch: cost(d).sqrt(), unshifted: cost(0.0).sqrt() }
}

/// Curvature profile before and after one filament step, compared up to a shift.
pub fn filament_soliton_check(c: &Curve, dt: f64) -> Result<ShiftFit> {
    let before = curvature_profile(c, 0)?.remove(0);
    let stepped = planar_filament_step(c, dt)?;
    let after = curvature_profile(&stepped, 0)?.remove(0);
    let h = c.mean_spacing();
    let kmax = before.iter().fold(0.0f64, |a, k| a.max(k.abs()));
    let max_shift = (20.0 * dt * (1.0 + kmax * kmax)).max(4.0 * h);
    Ok(best_shift(&before, &after, h, c.closed(), max_shift))
}

/// Potential q(t) of the AKNS system.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Constant(Complex64),
    /// amp·e^{i·rate·t}.
    Helical { amp: f64, rate: f64 },
    /// Uniform samples from t0 with spacing h, interpolated by six-point Lagrange stencils.
    Sampled { t0: f64, h: f64, values: Vec<Complex64> },
}

impl Potential {
    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            Potential::Constant(q) => *q,
            Potential::Helical { amp, rate } => Complex64::from_polar(*amp, rate * t),
            Potential::Sampled { t0, h, values } => {
                let n = values.len() as isize;
                let x = (t - t0) / h;
                let i = (x.floor() as isize).clamp(0, n - 1);
                let start = (i - 2).clamp(0, (n - 6).max(0));
                let w = (6).min(n) as usize;
                let xs: Vec<f64> = (0..w).map(|j| (start + j as isize) as f64).collect();
                let wts = fornberg_weights(x, &xs, 0);
                (0..w).map(|j| values[start as usize + j] * wts[0][j]).sum()
            }
        }
    }
}

fn q_matrix(q: Complex64) -> C2 {
    C2::new(c(0.0, 0.0), q, -q.conj(), c(0.0, 0.0))
}

/// A = diag(½, −½).
pub fn a_matrix() -> C2 {
    C2::new(c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0))
}

fn generator(q: Complex64, lambda: Complex64) -> C2 {
    q_matrix(q) + a_matrix() * (c(0.0, 1.0) * lambda)
}

fn project_su2(m: &C2) -> C2 {
    let col = V2::new(m[(0, 0)], m[(1, 0)]);
    let n = col.norm();
    let (a, b) = (col[0] / n, col[1] / n);
    C2::new(a, -b.conj(), b, a.conj())
}

fn project_algebra(x: &C2) -> C2 {
    let ah = (x - x.adjoint()) * c(0.5, 0.0);
    let tr = ah.trace() * 0.5;
    ah - C2::identity() * tr
}

/// Solution of Φ_t = (Q + iλA)Φ with Ψ = ∂Φ/∂λ.
#[derive(Clone, Debug)]
pub struct AknsFrame {
    pub t: Vec<f64>,
    pub q: Vec<Complex64>,
    pub lambda: f64,
    pub phi: Vec<C2>,
    pub psi: Vec<C2>,
}

impl AknsFrame {
    /// max ‖Φ*Φ − I‖ and max |det Φ − 1|.
    pub fn unitarity_residual(&self) -> (f64, f64) {
        let mut u = 0.0f64;
        let mut d = 0.0f64;
        for p in &self.phi {
            u = u.max((p.adjoint() * p - C2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max));
            d = d.max((p.determinant() - c(1.0, 0.0)).norm());
        }
        (u, d)
    }
}

/// Integrates the frame and its λ-derivative from Φ(0) = phi0, Ψ(0) = 0, re-unitarizing each step.
pub fn akns_integrate(q: &Potential, lambda: f64, phi0: &C2, t0: f64, t1: f64, steps: usize) -> Result<AknsFrame> {
    let unit = (phi0.adjoint() * phi0 - C2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if unit > 1e-9 || (phi0.determinant() - c(1.0, 0.0)).norm() > 1e-9 {
        return invalid("initial frame is not in SU(2)");
    }
    if !(t1 > t0) || steps == 0 {
        return invalid("empty integration range");
    }
    let h = (t1 - t0) / steps as f64;
    let lam = c(lambda, 0.0);
    let ia = a_matrix() * c(0.0, 1.0);
    let f = |t: f64, y: &(C2, C2)| {
        let g = generator(q.eval(t), lam);
        (g * y.0, g * y.1 + ia * y.0)
    };
    let mut y = (*phi0, C2::zeros());
    let mut out = AknsFrame { t: vec![t0], q: vec![q.eval(t0)], lambda, phi: vec![y.0], psi: vec![y.1] };
    for i in 0..steps {
        let t = t0 + h * i as f64;
        let mut next = rk4_step(&f, t, &y, h);
        let phi = project_su2(&next.0);
        let x = project_algebra(&(phi.adjoint() * next.1));
        next = (phi, phi * x);
        y = next;
        let tn = t0 + h * (i + 1) as f64;
        out.t.push(tn);
        out.q.push(q.eval(tn));
        out.phi.push(y.0);
        out.psi.push(y.1);
    }
    Ok(out)
}

/// 𝔰𝔲₂ → R³: x₁ = 2 Im X₁₁, x₂ = 2 Re X₁₂, x₃ = 2 Im X₁₂, an isometry for ‖X‖² = −2 tr X².
pub fn su2_to_r3(x: &C2) -> DVector<f64> {
    DVector::from_vec(vec![2.0 * x[(0, 0)].im, 2.0 * x[(0, 1)].re, 2.0 * x[(0, 1)].im])
}

/// Inverse of [`su2_to_r3`].
pub fn r3_to_su2(v: &DVector<f64>) -> C2 {
    let a = c(0.0, 0.5 * v[0]);
    let b = c(0.5 * v[1], 0.5 * v[2]);
    C2::new(a, b, -b.conj(), -a)
}

/// STP curve Γ = Φ*Φ_λ with velocity Φ*(iA)Φ.
pub fn stp_curve(frame: &AknsFrame) -> Result<Curve> {
    let ia = a_matrix() * c(0.0, 1.0);
    let pts = frame.phi.iter().zip(&frame.psi).map(|(p, s)| su2_to_r3(&(p.adjoint() * s))).collect();
    let vel = frame.phi.iter().map(|p| su2_to_r3(&(p.adjoint() * ia * p))).collect();
    Curve::from_samples(frame.t.clone(), pts, Some(vel), false)
}

/// q = (κ/2)e^{i∫τ} on the arclength samples, phase anchored at 0.
pub fn q_from_curve(c0: &Curve) -> Result<Potential> {
    if c0.dimension() != 3 {
        return invalid("q_from_curve needs a curve in R³");
    }
    let fd = frenet_data(c0)?;
    let tors = fd.torsion.as_ref().unwrap();
    let mut tau = Vec::with_capacity(tors.len());
    for (i, t) in tors.iter().enumerate() {
        match t {
            Some(x) if fd.curvature[i] > 1e-8 => tau.push(*x),
            _ => return invalid(format!("curvature vanishes near sample {i}")),
        }
    }
    let mut kappa = fd.curvature.clone();
    if fd.closed {
        tau.push(tau[0]);
        kappa.push(kappa[0]);
    }
    let h = fd.spacing;
    let dtau = uniform_derivative(&tau, h, 1, false);
    let mut theta = vec![0.0];
    for i in 0..tau.len() - 1 {
        let inc = 0.5 * h * (tau[i] + tau[i + 1]) + h * h / 12.0 * (dtau[i] - dtau[i + 1]);
        theta.push(theta[i] + inc);
    }
    let values = kappa.iter().zip(&theta).map(|(k, th)| Complex64::from_polar(0.5 * k, *th)).collect();
    Ok(Potential::Sampled { t0: fd.s[0], h, values })
}

/// Darboux data at one λ: φ at μ, the projector π, q̃ and the transformed frame.
#[derive(Clone, Debug)]
pub struct DarbouxData {
    pub mu: Complex64,
    pub v0: V2,
    pub lambda: f64,
    /// φ/‖φ‖ at the grid points.
    pub phi: Vec<V2>,
    pub pi: Vec<C2>,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub u: Vec<C2>,
    /// q + i(μ − μ̄)φ₁φ̄₂/‖φ‖² for Q = [[0, q], [−q̄, 0]].
    pub q_tilde: Vec<Complex64>,
    /// UΦ.
    pub frame_tilde: Vec<C2>,
    pub gamma: Curve,
    pub gamma_tilde: Curve,
    /// |μ − μ̄| / |λ − μ|².
    pub expected_distance: f64,
    /// max_t | ‖Γ̃ − Γ‖ − expected |.
    pub distance_residual: f64,
    /// max_t ‖U_t + U(Q + iλA) − (Q̃ + iλA)U‖.
    pub akns_residual: f64,
    pub max_projector_residual: f64,
    pub max_unitarity_residual: f64,
}

fn mat_norm(m: &C2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Darboux transform of a frame with pole μ and initial vector v0; Γ̃ = Φ̃*Φ̃_λ.
pub fn darboux_transform(q: &Potential, lambda: f64, mu: Complex64, v0: V2, t0: f64, t1: f64, steps: usize) -> Result<DarbouxData> {
    if mu.im.abs() < 1e-14 {
        return invalid("μ must be non-real");
    }
    if v0.norm() == 0.0 {
        return invalid("v0 must be nonzero");
    }
    let frame = akns_integrate(q, lambda, &C2::identity(), t0, t1, steps)?;
    let h = (t1 - t0) / steps as f64;
    let fphi = |t: f64, y: &V2| generator(q.eval(t), mu) * y;
    let mut phis = vec![v0 / c(v0.norm(), 0.0)];
    for i in 0..steps {
        let t = t0 + h * i as f64;
        let next = rk4_step(&fphi, t, &phis[i], h);
        let n = next.norm();
        if !(n > 0.0 && n.is_finite()) {
            return numerical("φ vanished or overflowed");
        }
        phis.push(next / c(n, 0.0));
    }
    let lam = c(lambda, 0.0);
    let mub = mu.conj();
    let alpha = ((lam - mub) / (lam - mu)).sqrt();
    let beta = (mu - mub) / (lam - mub);
    let alpha_l = (mub - mu) / (alpha * (lam - mu) * (lam - mu) * 2.0);
    let beta_l = -(mu - mub) / ((lam - mub) * (lam - mub));
    let id = C2::identity();
    let ia = a_matrix() * c(0.0, 1.0);
    let mut out_pi = Vec::new();
    let mut out_u = Vec::new();
    let mut qt = Vec::new();
    let mut ftil = Vec::new();
    let mut g_pts = Vec::new();
    let mut g_vel = Vec::new();
    let mut gt_pts = Vec::new();
    let mut dist_res = 0.0f64;
    let mut akns_res = 0.0f64;
    let mut proj_res = 0.0f64;
    let mut unit_res = 0.0f64;
    let expected = (mu - mub).norm() / (lam - mu).norm_sqr();
    for i in 0..=steps {
        let t = frame.t[i];
        let ph = phis[i];
        let pi = ph * ph.adjoint();
        let u = (id - pi * beta) * alpha;
        let ul = (id - pi * beta) * alpha_l - pi * (alpha * beta_l);
        let phi = frame.phi[i];
        let psi = frame.psi[i];
        let ptil = u * phi;
        let ptil_l = ul * phi + u * psi;
        let gamma = phi.adjoint() * psi;
        let gamma_t = ptil.adjoint() * ptil_l;
        let g = su2_to_r3(&gamma);
        let gt = su2_to_r3(&gamma_t);
        dist_res = dist_res.max(((&gt - &g).norm() - expected).abs());
        let qv = q.eval(t);
        let qtil = qv + c(0.0, 1.0) * (mu - mub) * ph[0] * ph[1].conj();
        let dph = generator(qv, mu) * ph;
        let dpi = dph * ph.adjoint() + ph * dph.adjoint() - pi * c(2.0 * (ph.adjoint() * dph)[(0, 0)].re, 0.0);
        let ut = -dpi * (alpha * beta);
        let res = ut + u * generator(qv, lam) - generator(qtil, lam) * u;
        akns_res = akns_res.max(mat_norm(&res));
        proj_res = proj_res.max(mat_norm(&(pi * pi - pi)).max(mat_norm(&(pi.adjoint() - pi))));
        unit_res = unit_res.max(mat_norm(&(u.adjoint() * u - id)).max((u.determinant() - c(1.0, 0.0)).norm()));
        g_pts.push(g);
        g_vel.push(su2_to_r3(&(phi.adjoint() * ia * phi)));
        gt_pts.push(gt);
        out_pi.push(pi);
        out_u.push(u);
        qt.push(qtil);
        ftil.push(ptil);
    }
    let gamma = Curve::from_samples(frame.t.clone(), g_pts, Some(g_vel), false)?;
    let gamma_tilde = Curve::from_samples(frame.t.clone(), gt_pts, None, false)?;
    Ok(DarbouxData {
        mu,
        v0,
        lambda,
        phi: phis,
        pi: out_pi,
        alpha,
        beta,
        u: out_u,
        q_tilde: qt,
        frame_tilde: ftil,
        gamma,
        gamma_tilde,
        expected_distance: expected,
        distance_residual: dist_res,
        akns_residual: akns_res,
        max_projector_residual: proj_res,
        max_unitarity_residual: unit_res,
    })
}

/// Initial chord direction Γ̃(0) − Γ(0) for Φ(0) = I, normalized.
pub fn darboux_initial_direction(lambda: f64, mu: Complex64, v0: V2) -> DVector<f64> {
    let ph = v0 / c(v0.norm(), 0.0);
    let pi = ph * ph.adjoint();
    let k = (mu - mu.conj()) / (c(lambda, 0.0) - mu).norm_sqr();
    su2_to_r3(&((pi - C2::identity() * c(0.5, 0.0)) * k)).normalize()
}

/// v0 whose Darboux partner at λ = 0, μ = iε starts in the direction r.
pub fn v0_for_direction(eps: f64, r: &DVector<f64>) -> V2 {
    let r = if eps < 0.0 { -r } else { r.clone() };
    let x = (0.5 * (1.0 + r[0])).max(0.0).sqrt();
    if x < 1e-12 {
        return V2::new(c(0.0, 0.0), c(1.0, 0.0));
    }
    let z = c(0.5 * r[2], -0.5 * r[1]);
    V2::new(c(x, 0.0), z.conj() / x)
}

/// Correspondence check of a Darboux partner with μ = iε, λ = 0.
#[derive(Clone, Debug)]
pub struct DarbouxBikeReport {
    pub two_ell: f64,
    pub residuals: CorrespondenceResiduals,
    pub distance_residual: f64,
    /// Largest mismatch between requested and realized initial chord directions.
    pub direction_sweep_residual: f64,
    pub data: DarbouxData,
}

/// Darboux partner at μ = iε, λ = 0 checked as a 2/|ε| correspondence, plus a sweep of
/// initial directions over a Fibonacci sphere sample.
pub fn darboux_bike_check(q: &Potential, eps: f64, v0: V2, t0: f64, t1: f64, steps: usize) -> Result<DarbouxBikeReport> {
    if eps == 0.0 || !eps.is_finite() {
        return invalid("ε must be nonzero");
    }
    let data = darboux_transform(q, 0.0, c(0.0, eps), v0, t0, t1, steps)?;
    let two_ell = 2.0 / eps.abs();
    let residuals = verify_correspondence(&data.gamma, &data.gamma_tilde, two_ell)?;
    let mut sweep = 0.0f64;
    let count = 64;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for i in 0..count {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
        let rad = (1.0 - z * z).sqrt();
        let r = DVector::from_vec(vec![z, rad * (golden * i as f64).cos(), rad * (golden * i as f64).sin()]);
        let got = darboux_initial_direction(0.0, c(0.0, eps), v0_for_direction(eps, &r));
        sweep = sweep.max((got - r).norm());
    }
    Ok(DarbouxBikeReport {
        two_ell,
        residuals,
        distance_residual: data.distance_residual,
        direction_sweep_residual: sweep,
        data,
    })
}

/// Report written by the `akns` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AknsReport {
    pub lambda: f64,
    pub mu: [f64; 2],
    pub distance_law_residual: f64,
    pub correspondence_residuals: CorrespondenceResiduals,
}
