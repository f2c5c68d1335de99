//! Parametrized tracks in Rⁿ: construction, evaluation, resampling and Frenet data.

use crate::error::{invalid, Result};
use crate::numerics::{cross3, fornberg_weights, gauss5};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tag naming a built-in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticId {
    Line,
    CircleMulti,
    GammaKn,
    WegnerLinear,
    WegnerCircular,
    Ellipse,
    Helix,
    Fourier,
}

/// One harmonic a·cos(ωt) + b·sin(ωt).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub freq: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

/// base + drift·t + Σ harmonics; closed with the given period when `period` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSpec {
    pub base: Vec<f64>,
    #[serde(default)]
    pub drift: Vec<f64>,
    pub harmonics: Vec<Harmonic>,
    pub period: Option<f64>,
    /// Parameter range for open curves.
    #[serde(default)]
    pub t_end: Option<f64>,
}

/// Analytic curve request for [`build_curve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum CurveSpec {
    /// (t, 0) for t in [0, length].
    Line { length: f64 },
    /// Circle of the given radius traversed `folds` times.
    CircleMulti { folds: u32, radius: f64 },
    /// Closed partner of the n-fold circle at ℓ_{k,n}.
    GammaKn { k: u32, n: u32 },
    /// Curve with curvature −2ay.
    WegnerLinear { a: f64, b: f64, length: f64 },
    /// Curve with curvature 4ar² + 2b.
    WegnerCircular { a: f64, b: f64, c: f64, r0: f64, length: f64 },
    /// (a cos t, b sin t).
    Ellipse { a: f64, b: f64 },
    /// Arclength helix of the given radius and pitch parameter, open.
    Helix { radius: f64, pitch: f64, turns: f64 },
    Fourier(FourierSpec),
}

/// Point on a curve at parameter t.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub point: DVector<f64>,
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Fourier {
        base: DVector<f64>,
        drift: DVector<f64>,
        harmonics: Vec<(f64, DVector<f64>, DVector<f64>)>,
    },
    CirclePartner {
        ell: f64,
        a: f64,
        b: f64,
    },
    Sampled {
        velocities: Option<Vec<DVector<f64>>>,
    },
}

/// Sampled parametrized track with an evaluator for positions and derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    dimension: usize,
    samples: Vec<Sample>,
    closed: bool,
    period: Option<f64>,
    analytic_id: Option<AnalyticId>,
    shape: Shape,
}

/// Metadata sidecar for curve files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub dimension: usize,
    pub closed: bool,
    pub period: Option<f64>,
    pub analytic_id: Option<AnalyticId>,
}

fn dv(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

impl Curve {
    fn analytic(
        shape: Shape,
        dimension: usize,
        t0: f64,
        t1: f64,
        closed: bool,
        samples: usize,
        id: AnalyticId,
    ) -> Result<Curve> {
        if samples < 8 {
            return invalid("at least 8 samples are required");
        }
        let mut c = Curve {
            dimension,
            samples: Vec::new(),
            closed,
            period: closed.then_some(t1 - t0),
            analytic_id: Some(id),
            shape,
        };
        let m = if closed { samples } else { samples - 1 };
        c.samples = (0..=m)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / m as f64;
                Sample { t, point: c.eval(t, 0).remove(0) }
            })
            .collect();
        if closed {
            let first = c.samples[0].point.clone();
            c.samples[m].point = first;
        }
        Ok(c)
    }

    /// Fourier-type analytic curve.
    pub fn fourier(spec: &FourierSpec, samples: usize) -> Result<Curve> {
        let n = spec.base.len();
        if n < 2 {
            return invalid("dimension must be at least 2");
        }
        let drift = if spec.drift.is_empty() { vec![0.0; n] } else { spec.drift.clone() };
        if drift.len() != n {
            return invalid("drift dimension mismatch");
        }
        let mut harmonics = Vec::new();
        for h in &spec.harmonics {
            if h.cos.len() != n || h.sin.len() != n {
                return invalid("harmonic dimension mismatch");
            }
            harmonics.push((h.freq, dv(&h.cos), dv(&h.sin)));
        }
        let shape = Shape::Fourier { base: dv(&spec.base), drift: dv(&drift), harmonics };
        match (spec.period, spec.t_end) {
            (Some(p), _) => {
                if !(p > 0.0) {
                    return invalid("period must be positive");
                }
                if drift.iter().any(|d| *d != 0.0) {
                    return invalid("closed curve cannot drift");
                }
                Curve::analytic(shape, n, 0.0, p, true, samples, AnalyticId::Fourier)
            }
            (None, Some(te)) if te > 0.0 => {
                Curve::analytic(shape, n, 0.0, te, false, samples, AnalyticId::Fourier)
            }
            _ => invalid("open Fourier curve needs a positive t_end"),
        }
    }

    /// Partner of the unit circle through 1 + 2ℓ, for ℓ > 1, on [0, t_end].
    pub fn circle_partner(ell: f64, t_end: f64, closed: bool, samples: usize) -> Result<Curve> {
        if !(ell > 1.0) {
            return invalid("circle partner closed form needs ell > 1");
        }
        let a = ((ell + 1.0) / (ell - 1.0)).sqrt();
        let b = (1.0 - 1.0 / (ell * ell)).sqrt();
        Ok(Curve::analytic(
            Shape::CirclePartner { ell, a, b },
            2,
            0.0,
            t_end,
            closed,
            samples,
            AnalyticId::GammaKn,
        )?
        .with_analytic_id(None))
    }

    /// Curve from sampled points. Closed curves must repeat the first point at the end.
    pub fn from_samples(
        times: Vec<f64>,
        points: Vec<DVector<f64>>,
        velocities: Option<Vec<DVector<f64>>>,
        closed: bool,
    ) -> Result<Curve> {
        if times.len() != points.len() || times.len() < 2 {
            return invalid("times and points must match and hold at least two samples");
        }
        if let Some(v) = &velocities {
            if v.len() != times.len() {
                return invalid("velocity count mismatch");
            }
        }
        let dimension = points[0].len();
        if dimension < 2 || points.iter().any(|p| p.len() != dimension) {
            return invalid("inconsistent dimension");
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("sample times must be strictly increasing");
        }
        if closed && times.len() < 9 {
            return invalid("closed curves need at least 8 samples");
        }
        let scale = points.iter().map(|p| p.norm()).fold(1.0f64, f64::max);
        if closed && (&points[0] - &points[points.len() - 1]).norm() > 1e-6 * scale {
            return invalid("closed curve must end at its first point");
        }
        let period = closed.then(|| times[times.len() - 1] - times[0]);
        let samples = times.into_iter().zip(points).map(|(t, point)| Sample { t, point }).collect();
        Ok(Curve {
            dimension,
            samples,
            closed,
            period,
            analytic_id: None,
            shape: Shape::Sampled { velocities },
        })
    }

    pub fn with_analytic_id(mut self, id: Option<AnalyticId>) -> Curve {
        self.analytic_id = id;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn analytic_id(&self) -> Option<AnalyticId> {
        self.analytic_id
    }

    pub fn metadata(&self) -> CurveMeta {
        CurveMeta {
            dimension: self.dimension,
            closed: self.closed,
            period: self.period,
            analytic_id: self.analytic_id,
        }
    }

    pub fn t_start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn points(&self) -> Vec<DVector<f64>> {
        self.samples.iter().map(|s| s.point.clone()).collect()
    }

    /// Mean spacing of the sample parameters.
    pub fn mean_spacing(&self) -> f64 {
        (self.t_end() - self.t_start()) / (self.samples.len() - 1) as f64
    }

    pub fn point(&self, t: f64) -> DVector<f64> {
        self.eval(t, 0).remove(0)
    }

    pub fn velocity(&self, t: f64) -> DVector<f64> {
        self.eval(t, 1).remove(1)
    }

    /// Position and derivatives up to `order` (≤ 3) at parameter t.
    pub fn eval(&self, t: f64, order: usize) -> Vec<DVector<f64>> {
        match &self.shape {
            Shape::Fourier { base, drift, harmonics } => (0..=order)
                .map(|d| {
                    let mut p = match d {
                        0 => base + drift * t,
                        1 => drift.clone(),
                        _ => DVector::zeros(self.dimension),
                    };
                    for (w, a, b) in harmonics {
                        let ph = w * t + d as f64 * PI / 2.0;
                        p += (a * ph.cos() + b * ph.sin()) * w.powi(d as i32);
                    }
                    p
                })
                .collect(),
            Shape::CirclePartner { ell, a, b } => circle_partner_eval(*ell, *a, *b, t, order),
            Shape::Sampled { velocities } => self.sampled_eval(velocities.as_deref(), t, order),
        }
    }

    fn stencil(&self, t: f64) -> (Vec<usize>, Vec<f64>, f64) {
        let n = self.samples.len();
        let t0 = self.t_start();
        let tt = match self.period {
            Some(p) => t0 + (t - t0).rem_euclid(p),
            None => t,
        };
        let i = match self.samples.binary_search_by(|s| s.t.partial_cmp(&tt).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let width = 6usize;
        if let Some(p) = self.period {
            let distinct = n - 1;
            let (idx, xs) = (0..width)
                .map(|j| {
                    let k = i as isize + j as isize - 2;
                    let wrap = k.div_euclid(distinct as isize);
                    let r = k.rem_euclid(distinct as isize) as usize;
                    (r, self.samples[r].t + wrap as f64 * p)
                })
                .unzip();
            (idx, xs, tt)
        } else {
            let w = width.min(n);
            let start = (i as isize - 2).clamp(0, (n - w) as isize) as usize;
            let idx: Vec<usize> = (start..start + w).collect();
            let xs = idx.iter().map(|&k| self.samples[k].t).collect();
            (idx, xs, tt)
        }
    }

    fn sampled_eval(&self, vel: Option<&[DVector<f64>]>, t: f64, order: usize) -> Vec<DVector<f64>> {
        let (idx, xs, tt) = self.stencil(t);
        let w = fornberg_weights(tt, &xs, order);
        let mut out = Vec::with_capacity(order + 1);
        for d in 0..=order {
            let mut acc = DVector::zeros(self.dimension);
            for (j, &k) in idx.iter().enumerate() {
                match (d, vel) {
                    (0, _) | (_, None) => acc += &self.samples[k].point * w[d][j],
                    (_, Some(v)) => acc += &v[k] * w[d - 1][j],
                }
            }
            out.push(acc);
        }
        out
    }

    /// Arclength over the full parameter range.
    pub fn length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| gauss5(|t| self.velocity(t).norm(), w[0].t, w[1].t))
            .sum()
    }

    /// Largest deviation of the sampled speed from 1.
    pub fn speed_deviation(&self) -> f64 {
        self.samples.iter().map(|s| (self.velocity(s.t).norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn circle_partner_eval(ell: f64, a: f64, b: f64, t: f64, order: usize) -> Vec<DVector<f64>> {
    let u = 0.5 * b * t;
    let m = (u / PI).round();
    let phi = -2.0 * ((a * (u - PI * m).tan()).atan() + PI * m);
    let (s, c) = u.sin_cos();
    let d = c * c + a * a * s * s;
    let ab = a * b;
    let k = ab * (a * a - 1.0) * 0.5 * b;
    let s2 = (2.0 * u).sin();
    let c2 = (2.0 * u).cos();
    let dphi = -ab / d;
    let ddphi = k * s2 / (d * d);
    let dddphi = k * (b * c2 / (d * d) - (a * a - 1.0) * b * s2 * s2 / (d * d * d));
    let psi = t + phi;
    let (p1, p2, p3) = (1.0 + dphi, ddphi, dddphi);
    let e = |theta: f64| (theta.cos(), theta.sin());
    let (ct, st) = e(t);
    let (cp, sp) = e(psi);
    let cmul = |(x, y): (f64, f64), (u, v): (f64, f64)| (x * u - y * v, x * v + y * u);
    let terms = [
        ((ct, st), (1.0, 0.0)),
        (cmul((ct, st), (0.0, 1.0)), cmul((cp, sp), (0.0, p1))),
        (cmul((ct, st), (-1.0, 0.0)), cmul((cp, sp), (-p1 * p1, p2))),
        (cmul((ct, st), (0.0, -1.0)), cmul((cp, sp), (-3.0 * p1 * p2, p3 - p1 * p1 * p1))),
    ];
    (0..=order)
        .map(|dd| {
            let (circ, part) = terms[dd];
            let (px, py) = if dd == 0 { (cp, sp) } else { part };
            DVector::from_vec(vec![circ.0 + 2.0 * ell * px, circ.1 + 2.0 * ell * py])
        })
        .collect()
}

/// Builds an analytic curve with `samples` samples over its period (or range, if open).
pub fn build_curve(spec: &CurveSpec, samples: usize) -> Result<Curve> {
    match spec {
        CurveSpec::Line { length } => {
            if !(*length > 0.0) {
                return invalid("line length must be positive");
            }
            let f = FourierSpec {
                base: vec![0.0, 0.0],
                drift: vec![1.0, 0.0],
                harmonics: vec![],
                period: None,
                t_end: Some(*length),
            };
            Ok(Curve::fourier(&f, samples)?.with_analytic_id(Some(AnalyticId::Line)))
        }
        CurveSpec::CircleMulti { folds, radius } => {
            if *folds == 0 || !(*radius > 0.0) {
                return invalid("folds must be ≥ 1 and radius positive");
            }
            let r = *radius;
            let f = FourierSpec {
                base: vec![0.0, 0.0],
                drift: vec![],
                harmonics: vec![Harmonic { freq: 1.0 / r, cos: vec![r, 0.0], sin: vec![0.0, r] }],
                period: Some(2.0 * PI * r * *folds as f64),
                t_end: None,
            };
            Ok(Curve::fourier(&f, samples)?.with_analytic_id(Some(AnalyticId::CircleMulti)))
        }
        CurveSpec::GammaKn { k, n } => crate::correspondence::gamma_kn(*k, *n, samples),
        CurveSpec::WegnerLinear { a, b, length } => crate::integrable::wegner_curve(
            &crate::integrable::WegnerParams::linear(*a, *b),
            &crate::integrable::WegnerInit::default(),
            *length,
            samples,
        ),
        CurveSpec::WegnerCircular { a, b, c, r0, length } => crate::integrable::wegner_curve(
            &crate::integrable::WegnerParams::circular(*a, *b, *c),
            &crate::integrable::WegnerInit { r0: *r0, ..Default::default() },
            *length,
            samples,
        ),
        CurveSpec::Ellipse { a, b } => {
            if !(*a > 0.0 && *b > 0.0) {
                return invalid("semi-axes must be positive");
            }
            let f = FourierSpec {
                base: vec![0.0, 0.0],
                drift: vec![],
                harmonics: vec![Harmonic { freq: 1.0, cos: vec![*a, 0.0], sin: vec![0.0, *b] }],
                period: Some(2.0 * PI),
                t_end: None,
            };
            Ok(Curve::fourier(&f, samples)?.with_analytic_id(Some(AnalyticId::Ellipse)))
        }
        CurveSpec::Helix { radius, pitch, turns } => {
            if !(*radius > 0.0 && *turns > 0.0) {
                return invalid("helix radius and turns must be positive");
            }
            let s = (radius * radius + pitch * pitch).sqrt();
            let f = FourierSpec {
                base: vec![0.0, 0.0, 0.0],
                drift: vec![0.0, 0.0, pitch / s],
                harmonics: vec![Harmonic {
                    freq: 1.0 / s,
                    cos: vec![*radius, 0.0, 0.0],
                    sin: vec![0.0, *radius, 0.0],
                }],
                period: None,
                t_end: Some(2.0 * PI * s * turns),
            };
            Ok(Curve::fourier(&f, samples)?.with_analytic_id(Some(AnalyticId::Helix)))
        }
        CurveSpec::Fourier(f) => Curve::fourier(f, samples),
    }
}

/// Embeds a curve in a higher dimension by padding coordinates with zeros.
pub fn embed(c: &Curve, dimension: usize) -> Result<Curve> {
    if dimension < c.dimension {
        return invalid("cannot embed into a lower dimension");
    }
    let pad = |p: &DVector<f64>| {
        let mut q = DVector::zeros(dimension);
        q.rows_mut(0, p.len()).copy_from(p);
        q
    };
    let mut out = c.clone();
    out.dimension = dimension;
    for s in &mut out.samples {
        s.point = pad(&s.point);
    }
    out.shape = match &c.shape {
        Shape::Fourier { base, drift, harmonics } => Shape::Fourier {
            base: pad(base),
            drift: pad(drift),
            harmonics: harmonics.iter().map(|(w, a, b)| (*w, pad(a), pad(b))).collect(),
        },
        Shape::CirclePartner { .. } => {
            let t = c.times();
            let p: Vec<_> = t.iter().map(|&s| pad(&c.point(s))).collect();
            let v: Vec<_> = t.iter().map(|&s| pad(&c.velocity(s))).collect();
            return Ok(Curve::from_samples(t, p, Some(v), c.closed)?.with_analytic_id(c.analytic_id));
        }
        Shape::Sampled { velocities } => Shape::Sampled {
            velocities: velocities.as_ref().map(|v| v.iter().map(pad).collect()),
        },
    };
    Ok(out)
}

/// Reparametrizes by arclength. Closed curves get `m` intervals plus the wrap sample;
/// open curves get `m` samples.
pub fn resample_arclength(c: &Curve, m: usize) -> Result<Curve> {
    if m < 8 {
        return invalid("at least 8 samples are required");
    }
    let times = c.times();
    let mut cum = vec![0.0];
    for w in times.windows(2) {
        let seg = gauss5(|t| c.velocity(t).norm(), w[0], w[1]);
        cum.push(cum.last().unwrap() + seg);
    }
    let total = *cum.last().unwrap();
    let min_speed = times.iter().map(|&t| c.velocity(t).norm()).fold(f64::INFINITY, f64::min);
    if !(total > 0.0) || min_speed < 1e-12 * total {
        return invalid("degenerate curve: speed vanishes at sample resolution");
    }
    let count = if c.closed { m + 1 } else { m };
    let denom = if c.closed { m } else { m - 1 } as f64;
    let mut new_t = Vec::with_capacity(count);
    let mut pts = Vec::with_capacity(count);
    let mut vel = Vec::with_capacity(count);
    let mut seg = 0usize;
    for j in 0..count {
        let s = total * j as f64 / denom;
        while seg + 2 < cum.len() && cum[seg + 1] < s {
            seg += 1;
        }
        let (ta, tb) = (times[seg], times[seg + 1]);
        let (sa, sb) = (cum[seg], cum[seg + 1]);
        let mut t = if sb > sa { ta + (tb - ta) * (s - sa) / (sb - sa) } else { ta };
        for _ in 0..50 {
            let f = sa + gauss5(|u| c.velocity(u).norm(), ta, t) - s;
            let dt = f / c.velocity(t).norm();
            t = (t - dt).clamp(ta, tb);
            if dt.abs() < 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        if j == count - 1 {
            t = times[times.len() - 1];
        }
        let d = c.eval(t, 1);
        new_t.push(s);
        pts.push(d[0].clone());
        vel.push(&d[1] / d[1].norm());
    }
    if c.closed {
        pts[count - 1] = pts[0].clone();
        vel[count - 1] = vel[0].clone();
    }
    Ok(Curve::from_samples(new_t, pts, Some(vel), c.closed)?.with_analytic_id(c.analytic_id))
}

/// Frenet frame, curvature and torsion at the samples of an arclength curve.
/// Closed curves omit the wrap-around duplicate.
#[derive(Clone, Debug, PartialEq)]
pub struct FrenetData {
    pub s: Vec<f64>,
    pub spacing: f64,
    pub closed: bool,
    pub tangent: Vec<DVector<f64>>,
    pub normal: Vec<DVector<f64>>,
    /// Only for n = 3.
    pub binormal: Option<Vec<DVector<f64>>>,
    pub curvature: Vec<f64>,
    /// Only for n = 2: det(v, v̇).
    pub signed_curvature: Option<Vec<f64>>,
    /// Only for n = 3; None where the curvature is below threshold.
    pub torsion: Option<Vec<Option<f64>>>,
    /// Only for n = 3: (τ, 0, κ) in frame coordinates.
    pub darboux: Option<Vec<[f64; 3]>>,
}

/// Local Frenet quantities at parameter t, valid for any regular parametrization.
#[derive(Clone, Debug, PartialEq)]
pub struct FrenetPoint {
    pub speed: f64,
    pub tangent: DVector<f64>,
    pub normal: DVector<f64>,
    pub binormal: Option<DVector<f64>>,
    /// Signed for n = 2.
    pub curvature: f64,
    pub torsion: Option<f64>,
}

/// Frenet quantities from derivatives at t; `flat` is the curvature below which torsion is undefined.
pub fn frenet_at(c: &Curve, t: f64, flat: f64) -> FrenetPoint {
    let d = c.eval(t, 3);
    let (v1, a, j) = (&d[1], &d[2], &d[3]);
    let speed = v1.norm();
    let tangent = v1 / speed;
    let a_perp = a - &tangent * a.dot(&tangent);
    match c.dimension {
        2 => {
            let det = v1[0] * a[1] - v1[1] * a[0];
            let normal = DVector::from_vec(vec![-tangent[1], tangent[0]]);
            FrenetPoint {
                speed,
                tangent,
                normal,
                binormal: None,
                curvature: det / speed.powi(3),
                torsion: None,
            }
        }
        3 => {
            let cr = cross3(v1, a);
            let kappa = cr.norm() / speed.powi(3);
            if kappa < flat {
                let mut e = DVector::zeros(3);
                let k = (0..3).min_by(|&x, &y| tangent[x].abs().partial_cmp(&tangent[y].abs()).unwrap()).unwrap();
                e[k] = 1.0;
                let normal = (&e - &tangent * e.dot(&tangent)).normalize();
                let binormal = cross3(&tangent, &normal);
                return FrenetPoint { speed, tangent, normal, binormal: Some(binormal), curvature: kappa, torsion: None };
            }
            let normal = a_perp.normalize();
            let binormal = cross3(&tangent, &normal);
            let tau = cr.dot(j) / cr.norm_squared();
            FrenetPoint { speed, tangent, normal, binormal: Some(binormal), curvature: kappa, torsion: Some(tau) }
        }
        _ => {
            let kappa = a_perp.norm() / (speed * speed);
            let normal = if a_perp.norm() > 0.0 { a_perp.normalize() } else { a_perp.clone() };
            FrenetPoint { speed, tangent, normal, binormal: None, curvature: kappa, torsion: None }
        }
    }
}

/// Frenet data at the samples. Requires an arclength parametrization.
pub fn frenet_data(c: &Curve) -> Result<FrenetData> {
    if c.speed_deviation() > 1e-6 {
        return invalid("frenet_data needs an arclength parametrization (resample first)");
    }
    let h = c.mean_spacing();
    let flat = 1e-8 / h;
    let count = if c.closed { c.samples.len() - 1 } else { c.samples.len() };
    let pts: Vec<FrenetPoint> = c.samples[..count].iter().map(|s| frenet_at(c, s.t, flat)).collect();
    let n = c.dimension;
    let signed = (n == 2).then(|| pts.iter().map(|p| p.curvature).collect::<Vec<_>>());
    let normal = pts
        .iter()
        .map(|p| if n == 2 && p.curvature < 0.0 { -&p.normal } else { p.normal.clone() })
        .collect();
    let torsion = (n == 3).then(|| pts.iter().map(|p| p.torsion).collect::<Vec<_>>());
    let darboux = (n == 3).then(|| pts.iter().map(|p| [p.torsion.unwrap_or(0.0), 0.0, p.curvature]).collect());
    Ok(FrenetData {
        s: c.samples[..count].iter().map(|s| s.t).collect(),
        spacing: h,
        closed: c.closed,
        tangent: pts.iter().map(|p| p.tangent.clone()).collect(),
        normal,
        binormal: (n == 3).then(|| pts.iter().map(|p| p.binormal.clone().unwrap()).collect()),
        curvature: pts.iter().map(|p| p.curvature.abs()).collect(),
        signed_curvature: signed,
        torsion,
        darboux,
    })
}

/// ½∮det(Γ, Γ̇) dt for a closed planar curve.
pub fn signed_planar_area(c: &Curve) -> Result<f64> {
    if c.dimension != 2 {
        return invalid("signed area needs a planar curve");
    }
    if !c.closed {
        return invalid("signed area needs a closed curve");
    }
    let f = |t: f64| {
        let d = c.eval(t, 1);
        d[0][0] * d[1][1] - d[0][1] * d[1][0]
    };
    Ok(0.5 * c.samples.windows(2).map(|w| gauss5(f, w[0].t, w[1].t)).sum::<f64>())
}

/// CSV text with header `t,x1,...,xn`.
pub fn curve_to_csv(c: &Curve) -> String {
    let mut out = String::from("t");
    for i in 1..=c.dimension {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    for s in &c.samples {
        out.push_str(&format!("{:.16e}", s.t));
        for x in s.point.iter() {
            out.push_str(&format!(",{:.16e}", x));
        }
        out.push('\n');
    }
    out
}

/// Parses curve CSV text; the sidecar metadata decides closure.
pub fn curve_from_csv(text: &str, meta: Option<&CurveMeta>) -> Result<Curve> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| crate::GeoError::Invalid(format!("malformed curve file: {e}")))?.clone();
    if headers.get(0) != Some("t") || headers.len() < 3 {
        return invalid("curve file must start with columns t,x1,x2");
    }
    let n = headers.len() - 1;
    let mut times = Vec::new();
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| crate::GeoError::Invalid(format!("malformed curve file: {e}")))?;
        let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.trim().parse::<f64>()).collect();
        let vals = vals.map_err(|e| crate::GeoError::Invalid(format!("malformed number: {e}")))?;
        if vals.len() != n + 1 {
            return invalid("ragged curve file");
        }
        times.push(vals[0]);
        points.push(DVector::from_column_slice(&vals[1..]));
    }
    let closed = meta.map(|m| m.closed).unwrap_or(false);
    if let Some(m) = meta {
        if m.dimension != n {
            return invalid("sidecar dimension disagrees with the CSV columns");
        }
    }
    if closed && times.len() >= 2 {
        let scale = points.iter().map(|p| p.norm()).fold(1.0f64, f64::max);
        if (&points[0] - &points[points.len() - 1]).norm() > 1e-9 * scale {
            let p = meta.and_then(|m| m.period);
            match p {
                Some(p) => {
                    times.push(times[0] + p);
                    points.push(points[0].clone());
                }
                None => return invalid("closed curve without a period or wrap sample"),
            }
        }
    }
    Ok(Curve::from_samples(times, points, None, closed)?.with_analytic_id(meta.and_then(|m| m.analytic_id)))
}
