//! The bicycle equation ℓṙ = −v + (v·r)r in its sphere, Riccati and Lorentz forms,
//! rolling monodromies and the unstable periodic Riccati solution.

use crate::curves::{frenet_at, Curve};
use crate::error::{invalid, numerical, Result};
use crate::numerics::polyfit;
use crate::ode::{rk4_final, rk4_path, rk4_step};
use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Unit direction r at parameter t.
#[derive(Clone, Debug, PartialEq)]
pub struct BikeState {
    pub t: f64,
    pub r: DVector<f64>,
}

/// Solution of the sphere form with the rear track γ = Γ + ℓr.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<BikeState>,
    pub rear: Curve,
    /// Largest | ‖r‖ − 1 | removed by renormalization in a single step.
    pub max_norm_drift: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn directions(&self) -> Vec<DVector<f64>> {
        self.states.iter().map(|s| s.r.clone()).collect()
    }

    pub fn final_direction(&self) -> &DVector<f64> {
        &self.states[self.states.len() - 1].r
    }
}

fn check_ell(ell: f64) -> Result<()> {
    if !(ell > 0.0) || !ell.is_finite() {
        return invalid("ell must be positive and finite");
    }
    Ok(())
}

fn check_range(front: &Curve, t0: f64, t1: f64) -> Result<()> {
    if !(t1 >= t0) {
        return invalid("t1 must not precede t0");
    }
    if !front.closed() {
        let tol = 1e-9 * (1.0 + front.t_end().abs());
        if t0 < front.t_start() - tol || t1 > front.t_end() + tol {
            return invalid("time range leaves the domain of an open front");
        }
    }
    Ok(())
}

/// Default step count: one step per sample interval of the front.
pub fn default_steps(front: &Curve, t0: f64, t1: f64) -> usize {
    (((t1 - t0) / front.mean_spacing()).round() as usize).max(8)
}

fn bicycle_rhs(front: &Curve, ell: f64) -> impl Fn(f64, &DVector<f64>) -> DVector<f64> + '_ {
    move |t, r| {
        let v = front.velocity(t);
        (&v * -1.0 + r * v.dot(r)) / ell
    }
}

/// Integrates ℓṙ = −v + (v·r)r with r renormalized each step.
pub fn integrate_bicycle_sphere(front: &Curve, ell: f64, r0: &DVector<f64>, t0: f64, t1: f64) -> Result<Trajectory> {
    integrate_bicycle_sphere_steps(front, ell, r0, t0, t1, default_steps(front, t0, t1))
}

/// [`integrate_bicycle_sphere`] with an explicit step count.
pub fn integrate_bicycle_sphere_steps(
    front: &Curve,
    ell: f64,
    r0: &DVector<f64>,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<Trajectory> {
    check_ell(ell)?;
    check_range(front, t0, t1)?;
    if r0.len() != front.dimension() {
        return invalid("r0 dimension differs from the front");
    }
    if (r0.norm() - 1.0).abs() > 1e-9 {
        return invalid("r0 must be a unit vector");
    }
    if !(t1 > t0) {
        return invalid("empty time range");
    }
    let drift = std::cell::Cell::new(0.0f64);
    let path = rk4_path(
        bicycle_rhs(front, ell),
        |r: DVector<f64>| {
            let n = r.norm();
            drift.set(drift.get().max((n - 1.0).abs()));
            r / n
        },
        r0.clone(),
        t0,
        t1,
        steps,
    );
    let h = (t1 - t0) / steps.max(1) as f64;
    let times: Vec<f64> = (0..path.len()).map(|i| t0 + i as f64 * h).collect();
    let mut pts = Vec::with_capacity(path.len());
    let mut vels = Vec::with_capacity(path.len());
    for (t, r) in times.iter().zip(&path) {
        let d = front.eval(*t, 1);
        pts.push(&d[0] + r * ell);
        vels.push(r * d[1].dot(r));
    }
    let closes = front.closed()
        && (t1 - t0 - front.period().unwrap()).abs() < 1e-9 * (1.0 + t1.abs())
        && (&path[0] - &path[path.len() - 1]).norm() < 1e-8
        && times.len() >= 9;
    if closes {
        let n = pts.len();
        pts[n - 1] = pts[0].clone();
        vels[n - 1] = vels[0].clone();
    }
    let rear = Curve::from_samples(times.clone(), pts, Some(vels), closes)?;
    let states = times.into_iter().zip(path).map(|(t, r)| BikeState { t, r }).collect();
    Ok(Trajectory { states, rear, max_norm_drift: drift.get() })
}

/// Half-step Richardson estimate of the RK4 error in r(t1).
pub fn richardson_error(front: &Curve, ell: f64, r0: &DVector<f64>, t0: f64, t1: f64, steps: usize) -> Result<f64> {
    let a = integrate_bicycle_sphere_steps(front, ell, r0, t0, t1, steps)?;
    let b = integrate_bicycle_sphere_steps(front, ell, r0, t0, t1, 2 * steps)?;
    Ok((a.final_direction() - b.final_direction()).norm() / 15.0)
}

/// Evolves an interior point of the unit ball under the same equation, without renormalization.
pub fn evolve_ball_point(front: &Curve, ell: f64, x0: &DVector<f64>, t0: f64, t1: f64, steps: usize) -> Result<DVector<f64>> {
    check_ell(ell)?;
    check_range(front, t0, t1)?;
    if x0.norm() >= 1.0 {
        return invalid("point must lie inside the unit ball");
    }
    Ok(rk4_final(bicycle_rhs(front, ell), |x| x, x0.clone(), t0, t1, steps))
}

/// Riccati chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// p = tan(θ/2), θ the angle of r in the plane.
    PlanarFixed,
    /// P = tan(Θ/2), Θ the angle of r from the tangent.
    PlanarFrame,
    /// z = (r₂ + i r₃)/(1 + r₁).
    SpatialFixed,
    /// Z, the same coordinate for r written in the Frenet frame.
    SpatialFrame,
    /// W, the frame chart at imaginary length.
    Filament,
}

impl Chart {
    fn planar(self) -> bool {
        matches!(self, Chart::PlanarFixed | Chart::PlanarFrame)
    }
}

/// Coordinate in a Riccati chart. When `swapped`, `value` holds −1/w.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveCoord {
    pub chart: Chart,
    pub value: Complex64,
    pub swapped: bool,
}

impl ProjectiveCoord {
    pub fn new(chart: Chart, value: Complex64) -> Self {
        ProjectiveCoord { chart, value, swapped: false }
    }

    pub fn at_infinity(&self) -> bool {
        self.swapped && self.value == Complex64::new(0.0, 0.0)
    }

    /// Homogeneous coordinates (x, y) with w = y/x.
    pub fn homogeneous(&self) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        if self.swapped {
            (-self.value, one)
        } else {
            (one, self.value)
        }
    }

    /// Point of the sphere in chart coordinates (frame coordinates for frame charts).
    pub fn to_sphere(&self) -> DVector<f64> {
        let (x, y) = self.homogeneous();
        let nrm = x.norm_sqr() + y.norm_sqr();
        let r1 = (x.norm_sqr() - y.norm_sqr()) / nrm;
        let c = x.conj() * y * 2.0 / nrm;
        if self.chart.planar() {
            DVector::from_vec(vec![r1, c.re])
        } else {
            DVector::from_vec(vec![r1, c.re, c.im])
        }
    }

    /// Chart coordinate of a unit vector, choosing the chart away from its singular point.
    pub fn from_sphere(chart: Chart, r: &DVector<f64>) -> ProjectiveCoord {
        let r3 = if r.len() > 2 { r[2] } else { 0.0 };
        let w = Complex64::new(r[1], r3);
        if r[0] >= 0.0 {
            ProjectiveCoord { chart, value: w / (1.0 + r[0]), swapped: false }
        } else {
            ProjectiveCoord { chart, value: -w.conj() / (1.0 - r[0]), swapped: true }
        }
    }
}

/// Chart trajectory on a uniform grid, with the number of chart swaps.
#[derive(Clone, Debug)]
pub struct ChartTrajectory {
    pub t: Vec<f64>,
    pub coords: Vec<ProjectiveCoord>,
    pub swaps: usize,
}

impl ChartTrajectory {
    /// Ambient unit vectors; frame charts are rotated back with the front's Frenet frame.
    pub fn to_ambient(&self, front: &Curve) -> Vec<DVector<f64>> {
        self.t
            .iter()
            .zip(&self.coords)
            .map(|(&t, c)| {
                let r = c.to_sphere();
                match c.chart {
                    Chart::PlanarFixed | Chart::SpatialFixed => r,
                    _ => {
                        let f = frenet_at(front, t, 1e-12);
                        let mut out = &f.tangent * r[0] + &f.normal * r[1];
                        if let Some(b) = &f.binormal {
                            out += b * r[2];
                        }
                        out
                    }
                }
            })
            .collect()
    }
}

type C2 = Matrix2<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn integrate_chart(coef: impl Fn(f64) -> C2, init: ProjectiveCoord, t0: f64, t1: f64, steps: usize) -> ChartTrajectory {
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let swap = |a: C2| C2::new(a[(1, 1)], -a[(1, 0)], -a[(0, 1)], a[(0, 0)]);
    let mut cur = init;
    let mut out = ChartTrajectory { t: vec![t0], coords: vec![init], swaps: 0 };
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let sw = cur.swapped;
        let rhs = |s: f64, w: &Complex64| {
            let a = if sw { swap(coef(s)) } else { coef(s) };
            a[(1, 0)] + (a[(1, 1)] - a[(0, 0)]) * w - a[(0, 1)] * w * w
        };
        let mut w = rk4_step(&rhs, t, &cur.value, h);
        let mut swapped = cur.swapped;
        if w.norm() > 10.0 {
            w = -1.0 / w;
            swapped = !swapped;
            out.swaps += 1;
        }
        cur = ProjectiveCoord { chart: cur.chart, value: w, swapped };
        out.t.push(t + h);
        out.coords.push(cur);
    }
    out
}

fn require_arclength(front: &Curve) -> Result<()> {
    if front.speed_deviation() > 1e-6 {
        return invalid("frame charts need an arclength-parametrized front");
    }
    Ok(())
}

/// Planar Riccati integration in the fixed (p) or frame (P) chart.
pub fn integrate_riccati_planar(
    front: &Curve,
    ell: f64,
    init: ProjectiveCoord,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<ChartTrajectory> {
    check_ell(ell)?;
    check_range(front, t0, t1)?;
    if front.dimension() != 2 {
        return invalid("planar charts need a planar front");
    }
    if init.value.im != 0.0 {
        return invalid("planar chart coordinates are real");
    }
    match init.chart {
        Chart::PlanarFixed => Ok(integrate_chart(
            |t| {
                let v = front.velocity(t);
                let k = -0.5 / ell;
                C2::new(c(k * v[0], 0.0), c(k * v[1], 0.0), c(k * v[1], 0.0), c(-k * v[0], 0.0))
            },
            init,
            t0,
            t1,
            steps,
        )),
        Chart::PlanarFrame => {
            require_arclength(front)?;
            Ok(integrate_chart(
                |t| {
                    let k = frenet_at(front, t, 0.0).curvature;
                    C2::new(c(-0.5 / ell, 0.0), c(0.5 * k, 0.0), c(-0.5 * k, 0.0), c(0.5 / ell, 0.0))
                },
                init,
                t0,
                t1,
                steps,
            ))
        }
        _ => invalid("not a planar chart"),
    }
}

/// Length parameter of the spatial Riccati forms: real ℓ, or ℓ = −iε.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpatialLength {
    Real(f64),
    Imaginary(f64),
}

impl SpatialLength {
    /// σ = 1/ℓ.
    fn inverse(self) -> Complex64 {
        match self {
            SpatialLength::Real(l) => c(1.0 / l, 0.0),
            SpatialLength::Imaginary(e) => c(0.0, 1.0 / e),
        }
    }
}

fn frame_coef(front: &Curve, sigma: Complex64, speed_scaled: bool) -> impl Fn(f64) -> Result<C2> + '_ {
    move |t| {
        let f = frenet_at(front, t, 1e-10);
        let tau = match f.torsion {
            Some(x) => x,
            None => return invalid(format!("torsion unavailable at t = {t}")),
        };
        let s = if speed_scaled { f.speed } else { 1.0 };
        let k = c(0.5 * f.curvature * s, 0.0);
        let d = (-sigma + c(0.0, tau)) * (0.5 * s);
        Ok(C2::new(d, k, -k, -d))
    }
}

/// Spatial Riccati integration in the fixed (z), frame (Z) or filament (W) chart.
pub fn integrate_riccati_spatial(
    front: &Curve,
    length: SpatialLength,
    init: ProjectiveCoord,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<ChartTrajectory> {
    check_range(front, t0, t1)?;
    if front.dimension() != 3 {
        return invalid("spatial charts need a front in R³");
    }
    match (init.chart, length) {
        (Chart::SpatialFixed, SpatialLength::Real(ell)) => {
            check_ell(ell)?;
            Ok(integrate_chart(
                |t| {
                    let v = front.velocity(t);
                    let k = -0.5 / ell;
                    C2::new(
                        c(k * v[0], 0.0),
                        c(k * v[1], -k * v[2]),
                        c(k * v[1], k * v[2]),
                        c(-k * v[0], 0.0),
                    )
                },
                init,
                t0,
                t1,
                steps,
            ))
        }
        (Chart::SpatialFixed, SpatialLength::Imaginary(_)) => invalid("the fixed chart needs a real length"),
        (Chart::SpatialFrame, _) | (Chart::Filament, SpatialLength::Imaginary(_)) => {
            if let SpatialLength::Real(ell) = length {
                check_ell(ell)?;
            }
            require_arclength(front)?;
            let coef = frame_coef(front, length.inverse(), false);
            let h = (t1 - t0) / steps.max(1) as f64;
            for i in 0..=2 * steps.max(1) {
                coef(t0 + 0.5 * h * i as f64)?;
            }
            Ok(integrate_chart(|t| coef(t).unwrap(), init, t0, t1, steps))
        }
        (Chart::Filament, SpatialLength::Real(_)) => invalid("the filament chart needs an imaginary length"),
        _ => invalid("not a spatial chart"),
    }
}

/// Element of SO⁺(n,1) acting on Rⁿ⁺¹ with J = diag(1, …, 1, −1).
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzMatrix {
    pub n: usize,
    pub m: DMatrix<f64>,
}

impl LorentzMatrix {
    pub fn identity(n: usize) -> Self {
        LorentzMatrix { n, m: DMatrix::identity(n + 1, n + 1) }
    }

    pub fn signature(n: usize) -> DMatrix<f64> {
        let mut j = DMatrix::identity(n + 1, n + 1);
        j[(n, n)] = -1.0;
        j
    }

    /// ‖MᵀJM − J‖∞ relative to max(1, ‖M‖²).
    pub fn j_residual(&self) -> f64 {
        let j = Self::signature(self.n);
        let r = self.m.transpose() * &j * &self.m - &j;
        let scale = self.m.amax().powi(2).max(1.0);
        r.amax() / scale
    }

    /// Projective action on the null cone: r ↦ direction of M(r, 1).
    pub fn act(&self, r: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.n + 1);
        x.rows_mut(0, self.n).copy_from(r);
        x[self.n] = 1.0;
        let y = &self.m * x;
        y.rows(0, self.n) / y[self.n]
    }

    pub fn compose(&self, other: &LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix { n: self.n, m: &self.m * &other.m }
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }
}

/// Stepwise product of J-orthogonal step propagators of Ẋ = A(t)X.
fn group_flow(
    dim: usize,
    gen: impl Fn(f64) -> DMatrix<f64>,
    j: &DMatrix<f64>,
    t0: f64,
    t1: f64,
    steps: usize,
    mut visit: impl FnMut(f64, &DMatrix<f64>),
) -> DMatrix<f64> {
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let id = DMatrix::<f64>::identity(dim, dim);
    let mut m = id.clone();
    visit(t0, &m);
    if t1 == t0 {
        return m;
    }
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let f = |s: f64, x: &DMatrix<f64>| gen(s) * x;
        let s = rk4_step(&f, t, &id, h);
        let e = s.transpose() * j * &s - j;
        let s = &s * (&id - j * e * 0.5);
        m = s * m;
        visit(t + h, &m);
    }
    m
}

fn lift_generator(front: &Curve, ell: f64) -> impl Fn(f64) -> DMatrix<f64> + '_ {
    let n = front.dimension();
    move |t| {
        let v = front.velocity(t);
        let mut a = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            a[(i, n)] = -v[i] / ell;
            a[(n, i)] = -v[i] / ell;
        }
        a
    }
}

/// Monodromy of ẋ = −(1/ℓ)[[0, v], [vᵀ, 0]]x from the identity.
pub fn lorentz_lift_monodromy(front: &Curve, ell: f64, t0: f64, t1: f64) -> Result<LorentzMatrix> {
    lorentz_lift_steps(front, ell, t0, t1, default_steps(front, t0, t1))
}

/// [`lorentz_lift_monodromy`] with an explicit step count.
pub fn lorentz_lift_steps(front: &Curve, ell: f64, t0: f64, t1: f64, steps: usize) -> Result<LorentzMatrix> {
    check_ell(ell)?;
    check_range(front, t0, t1)?;
    let n = front.dimension();
    let j = LorentzMatrix::signature(n);
    let m = group_flow(n + 1, lift_generator(front, ell), &j, t0, t1, steps, |_, _| {});
    Ok(LorentzMatrix { n, m })
}

/// Monodromy of rolling hyperbolic space along the front; the same flow as the Lorentz lift.
pub fn roll_hyperbolic(front: &Curve, ell: f64, t0: f64, t1: f64, steps: usize) -> Result<LorentzMatrix> {
    lorentz_lift_steps(front, ell, t0, t1, steps)
}

/// Rolling a sphere of radius ℓ along the front.
#[derive(Clone, Debug)]
pub struct SphereRoll {
    /// g(t₁) ∈ SO(n+1).
    pub g: DMatrix<f64>,
    /// Contact curve Γ̃ = −ℓ gᵀ e_{n+1} on the rolling sphere.
    pub body_track: Curve,
    pub orthogonality_residual: f64,
}

/// Integrates ġ = (1/ℓ)[[0, v], [−vᵀ, 0]]g from the identity.
pub fn roll_sphere(front: &Curve, ell: f64, t0: f64, t1: f64, steps: usize) -> Result<SphereRoll> {
    check_ell(ell)?;
    check_range(front, t0, t1)?;
    if !(t1 > t0) {
        return invalid("empty time range");
    }
    let n = front.dimension();
    let gen = |t: f64| {
        let v = front.velocity(t);
        let mut a = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            a[(i, n)] = v[i] / ell;
            a[(n, i)] = -v[i] / ell;
        }
        a
    };
    let id = DMatrix::identity(n + 1, n + 1);
    let mut times = Vec::new();
    let mut pts = Vec::new();
    let mut vels = Vec::new();
    let g = group_flow(n + 1, gen, &id, t0, t1, steps, |t, g| {
        let gt = g.transpose();
        pts.push(gt.column(n) * -ell);
        let mut v = DVector::zeros(n + 1);
        v.rows_mut(0, n).copy_from(&front.velocity(t));
        vels.push(gt * v);
        times.push(t);
    });
    let orth = (g.transpose() * &g - &id).amax();
    let body_track = Curve::from_samples(times, pts, Some(vels), false)?;
    Ok(SphereRoll { g, body_track, orthogonality_residual: orth })
}

/// The unstable periodic solution of the frame Riccati equation and its multiplier.
#[derive(Clone, Debug)]
pub struct UnstablePeriodic {
    pub t: Vec<f64>,
    pub z: Vec<Complex64>,
    /// ln λ = ∮ s(1/ℓ − iτ − κZ) dt.
    pub log_multiplier: Complex64,
    pub multiplier: Complex64,
    pub iterations: usize,
    /// Observed contraction ratio of the time-reversed period map.
    pub contraction: f64,
    pub periodicity_residual: f64,
}

impl UnstablePeriodic {
    /// ℓ·ln λ(ℓ).
    pub fn ell_log(&self, ell: f64) -> Complex64 {
        self.log_multiplier * ell
    }
}

/// Step count used by [`find_unstable_periodic`] when none is given.
pub fn unstable_default_steps(front: &Curve, ell: f64) -> usize {
    let t = front.period().unwrap_or(1.0);
    let by_scale = (200.0 * t / ell).ceil() as usize;
    by_scale.max(default_steps(front, 0.0, t))
}

/// Finds Z(t) by iterating the time-reversed period map from Z = 0.
pub fn find_unstable_periodic(front: &Curve, ell: f64, steps: Option<usize>) -> Result<UnstablePeriodic> {
    check_ell(ell)?;
    if front.dimension() != 3 || !front.closed() {
        return invalid("find_unstable_periodic needs a closed front in R³");
    }
    let steps = steps.unwrap_or_else(|| unstable_default_steps(front, ell));
    let t0 = front.t_start();
    let period = front.period().unwrap();
    let h = period / steps as f64;
    let mut s = Vec::with_capacity(2 * steps + 1);
    let mut k = Vec::with_capacity(2 * steps + 1);
    let mut tau = Vec::with_capacity(2 * steps + 1);
    for i in 0..=2 * steps {
        let t = t0 + 0.5 * h * i as f64;
        let f = frenet_at(front, t, 1e-10);
        let tt = match f.torsion {
            Some(x) => x,
            None => return invalid(format!("torsion unavailable at t = {t}")),
        };
        s.push(f.speed);
        k.push(f.curvature);
        tau.push(tt);
    }
    let sigma = 1.0 / ell;
    let rhs = |j: usize, z: Complex64| {
        s[j] * (z * c(sigma, -tau[j]) - (c(1.0, 0.0) + z * z) * (0.5 * k[j]))
    };
    let backward = |z_end: Complex64, record: &mut Option<Vec<Complex64>>| {
        let mut z = z_end;
        if let Some(r) = record.as_mut() {
            r.push(z);
        }
        for i in (0..steps).rev() {
            let (a, m, b) = (2 * i + 2, 2 * i + 1, 2 * i);
            let hh = -h;
            let k1 = rhs(a, z);
            let k2 = rhs(m, z + k1 * (0.5 * hh));
            let k3 = rhs(m, z + k2 * (0.5 * hh));
            let k4 = rhs(b, z + k3 * hh);
            z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (hh / 6.0);
            if let Some(r) = record.as_mut() {
                r.push(z);
            }
        }
        z
    };
    let mut z = c(0.0, 0.0);
    let mut prev_step = f64::NAN;
    let mut contraction = 0.0f64;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=500 {
        let zn = backward(z, &mut None);
        if !zn.re.is_finite() || !zn.im.is_finite() || zn.norm() >= 1.0 {
            return numerical(format!(
                "contraction failure at ell = {ell}: period-map iterate left the unit disc"
            ));
        }
        let step = (zn - z).norm();
        if prev_step.is_finite() && prev_step > 0.0 {
            contraction = contraction.max(step / prev_step);
        }
        prev_step = step;
        z = zn;
        iterations = it;
        if step < 1e-12 {
            converged = true;
            break;
        }
    }
    if !converged {
        return numerical(format!("contraction failure at ell = {ell}: no convergence in 500 iterations"));
    }
    let mut rec = Some(Vec::with_capacity(steps + 1));
    let z_start = backward(z, &mut rec);
    let mut zs = rec.unwrap();
    zs.reverse();
    let periodicity_residual = (z_start - z).norm();
    if zs.iter().any(|w| w.norm() >= 1.0) {
        return numerical(format!("contraction failure at ell = {ell}: |Z| reached 1"));
    }
    let mut log = c(0.0, 0.0);
    for i in 0..steps {
        let j = 2 * i;
        log += (c(sigma, -tau[j]) - zs[i] * k[j]) * s[j];
    }
    log *= h;
    let t = (0..=steps).map(|i| t0 + h * i as f64).collect();
    Ok(UnstablePeriodic {
        t,
        z: zs,
        log_multiplier: log,
        multiplier: log.exp(),
        iterations,
        contraction,
        periodicity_residual,
    })
}

/// Taylor coefficients c₀..c_degree of ℓ·ln λ(ℓ) at 0, by interpolation through ℓ = 0
/// (where the value is the length) and `nodes` Chebyshev–Lobatto points on (0, radius].
pub fn ell_log_taylor(front: &Curve, radius: f64, nodes: usize, degree: usize) -> Result<Vec<Complex64>> {
    if !(radius > 0.0 && radius < 1.0) || nodes < degree {
        return invalid("need 0 < radius < 1 and at least `degree` nodes");
    }
    let mut xs = vec![0.0];
    let mut re = vec![front.length()];
    let mut im = vec![0.0];
    for j in 1..=nodes {
        let ell = 0.5 * radius * (1.0 - (std::f64::consts::PI * j as f64 / nodes as f64).cos());
        let u = find_unstable_periodic(front, ell, None)?;
        let g = u.ell_log(ell);
        xs.push(ell);
        re.push(g.re);
        im.push(g.im);
    }
    let cr = polyfit(&xs, &re, nodes);
    let ci = polyfit(&xs, &im, nodes);
    Ok(cr.into_iter().zip(ci).take(degree + 1).map(|(a, b)| c(a, b)).collect())
}
