//! Bicycle correspondence: glide reflections, Darboux butterflies, Bianchi permutability,
//! conjugacy of monodromies, the Γ_{k,n} family, rotation numbers and Zindler checks.

use crate::bike_dynamics::{default_steps, integrate_bicycle_sphere_steps, lorentz_lift_steps};
use crate::curves::{embed, AnalyticId, Curve};
use crate::error::{invalid, numerical, Result};
use crate::moebius_monodromy::{classify, fixed_points, moebius_from_lorentz, MonodromyClass};
use crate::numerics::bracket_root;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Reflection of x about the line UV followed by translation by V − U.
pub fn glide_reflect(u: &DVector<f64>, v: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    let d = v - u;
    let len = d.norm();
    if len == 0.0 {
        return invalid("glide reflection needs U ≠ V");
    }
    let e = d / len;
    let rel = x - u;
    let refl = &e * (2.0 * e.dot(&rel)) - &rel;
    Ok(u + refl + (v - u))
}

/// Linear part of the glide reflection: reflection of a vector about the direction UV.
pub fn reflect_about(dir: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    let e = dir.normalize();
    &e * (2.0 * e.dot(x)) - x
}

/// Folded parallelogram ABCD: D is the reflection of A − B + C about the line AC.
#[derive(Clone, Debug, PartialEq)]
pub struct Butterfly {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub d: DVector<f64>,
}

impl Butterfly {
    /// Largest of | |AB| − |CD| |, | |BC| − |AD| | and the coplanarity defect.
    pub fn invariant_residual(&self) -> f64 {
        let s1 = ((&self.a - &self.b).norm() - (&self.c - &self.d).norm()).abs();
        let s2 = ((&self.b - &self.c).norm() - (&self.a - &self.d).norm()).abs();
        s1.max(s2).max(coplanarity(&self.a, &self.b, &self.c, &self.d))
    }
}

/// Distance of D from the affine plane through A, B, C (zero if A, B, C are collinear).
pub fn coplanarity(a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>, d: &DVector<f64>) -> f64 {
    let e1 = b - a;
    let e2 = c - a;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for e in [e1, e2] {
        let mut v = e.clone();
        for q in &basis {
            v -= q * q.dot(&v);
        }
        if v.norm() > 1e-12 * (1.0 + e.norm()) {
            basis.push(v.normalize());
        }
    }
    let mut r = d - a;
    for q in &basis {
        r -= q * q.dot(&r);
    }
    if basis.len() < 2 {
        let m = DMatrix::from_columns(&[b - a, c - a, d - a]);
        return if m.rank(1e-10) <= 2 { 0.0 } else { r.norm() };
    }
    r.norm()
}

fn completion_scale(a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> f64 {
    a.norm().max(b.norm()).max(c.norm()).max(1.0)
}

/// Completes ABC to a butterfly; fails when A and C coincide.
pub fn butterfly_complete(a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Result<Butterfly> {
    let w = c - a;
    if w.norm() <= 1e-10 * completion_scale(a, b, c) {
        return invalid("degenerate butterfly: A = C");
    }
    let u = w.normalize();
    let p = c - b;
    let d = a + &u * (2.0 * p.dot(&u)) - &p;
    Ok(Butterfly { a: a.clone(), b: b.clone(), c: c.clone(), d })
}

/// Derivative of D along a motion of A, B, C with velocities (ȧ, ḃ, ċ).
pub fn butterfly_velocity(
    a: &DVector<f64>,
    b: &DVector<f64>,
    c: &DVector<f64>,
    da: &DVector<f64>,
    db: &DVector<f64>,
    dc: &DVector<f64>,
) -> Result<DVector<f64>> {
    let w = c - a;
    let len = w.norm();
    if len <= 1e-10 * completion_scale(a, b, c) {
        return invalid("degenerate butterfly: A = C");
    }
    let u = &w / len;
    let dw = dc - da;
    let du = (&dw - &u * dw.dot(&u)) / len;
    let p = c - b;
    let dp = dc - db;
    Ok(da + &u * (2.0 * (dp.dot(&u) + p.dot(&du))) + &du * (2.0 * p.dot(&u)) - dp)
}

/// Γ + 2ℓr with r solving the ℓ-bicycle equation from r0, on the front's own grid.
pub fn bicycle_partner(front: &Curve, ell: f64, r0: &DVector<f64>) -> Result<Curve> {
    let t0 = front.t_start();
    let t1 = front.t_end();
    bicycle_partner_steps(front, ell, r0, default_steps(front, t0, t1))
}

/// [`bicycle_partner`] with at least `steps` RK4 steps, sampled on the front's grid when it is uniform.
pub fn bicycle_partner_steps(front: &Curve, ell: f64, r0: &DVector<f64>, steps: usize) -> Result<Curve> {
    let t0 = front.t_start();
    let t1 = front.t_end();
    let grid = front.times();
    let intervals = grid.len().saturating_sub(1).max(1);
    let h = (t1 - t0) / intervals as f64;
    let uniform = grid.iter().enumerate().all(|(i, t)| (t - (t0 + i as f64 * h)).abs() <= 1e-9 * (1.0 + t.abs()));
    let (total, stride) = if uniform {
        let sub = steps.div_ceil(intervals).max(1);
        (sub * intervals, sub)
    } else {
        (steps, 1)
    };
    let traj = integrate_bicycle_sphere_steps(front, ell, r0, t0, t1, total)?;
    let kept: Vec<_> = traj.states.iter().step_by(stride).collect();
    let mut times = Vec::with_capacity(kept.len());
    let mut pts = Vec::with_capacity(kept.len());
    let mut vels = Vec::with_capacity(kept.len());
    for s in kept {
        let d = front.eval(s.t, 1);
        times.push(s.t);
        pts.push(&d[0] + &s.r * (2.0 * ell));
        vels.push(-&d[1] + &s.r * (2.0 * d[1].dot(&s.r)));
    }
    let n = pts.len();
    let last = &traj.states[traj.states.len() - 1].r;
    let closes = front.closed() && (&traj.states[0].r - last).norm() < 1e-8 && n >= 9;
    if closes {
        pts[n - 1] = pts[0].clone();
        vels[n - 1] = vels[0].clone();
    }
    Curve::from_samples(times, pts, Some(vels), closes)
}

/// Residuals of the correspondence conditions between two curves on one grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceResiduals {
    /// max | ‖Γ₁ − Γ₂‖ − 2ℓ |.
    pub chord: f64,
    /// max |(Γ̇₁ + Γ̇₂)/2 ⟂ (Γ₁ − Γ₂)| over the mean speed.
    pub tangency: f64,
    /// max |Γ̇₂ − reflection of Γ̇₁ about Γ₁Γ₂| over the mean speed.
    pub glide: f64,
}

impl CorrespondenceResiduals {
    pub fn max(&self) -> f64 {
        self.chord.max(self.tangency).max(self.glide)
    }
}

/// Checks constant chord length 2ℓ and tangency of the midpoint curve to the chord.
pub fn verify_correspondence(c1: &Curve, c2: &Curve, two_ell: f64) -> Result<CorrespondenceResiduals> {
    let t1 = c1.times();
    let t2 = c2.times();
    if c1.dimension() != c2.dimension() {
        return invalid("curves live in different dimensions");
    }
    if t1.len() != t2.len() || t1.iter().zip(&t2).any(|(a, b)| (a - b).abs() > 1e-9 * (1.0 + a.abs())) {
        return invalid("curves are not sampled on the same parameter grid");
    }
    let mut speed = 0.0;
    let mut rows = Vec::with_capacity(t1.len());
    for &t in &t1 {
        let a = c1.eval(t, 1);
        let b = c2.eval(t, 1);
        speed += 0.5 * (a[1].norm() + b[1].norm());
        rows.push((a, b));
    }
    let speed = (speed / t1.len() as f64).max(1e-300);
    let mut out = CorrespondenceResiduals { chord: 0.0, tangency: 0.0, glide: 0.0 };
    for (a, b) in &rows {
        let d = &a[0] - &b[0];
        let len = d.norm();
        out.chord = out.chord.max((len - two_ell).abs());
        if len == 0.0 {
            out.tangency = f64::INFINITY;
            out.glide = f64::INFINITY;
            continue;
        }
        let e = &d / len;
        let m = (&a[1] + &b[1]) * 0.5;
        let perp = &m - &e * e.dot(&m);
        out.tangency = out.tangency.max(perp.norm() / speed);
        let g = reflect_about(&e, &a[1]);
        out.glide = out.glide.max((&b[1] - g).norm() / speed);
    }
    Ok(out)
}

/// Bianchi permutability: D from butterflies with the two correspondence residuals.
#[derive(Clone, Debug)]
pub struct BianchiReport {
    pub d: Curve,
    /// (A, D) at chord ℓ₂.
    pub ad: CorrespondenceResiduals,
    /// (C, D) at chord ℓ₁.
    pub cd: CorrespondenceResiduals,
    pub max_coplanarity: f64,
    /// Grid indices where A = C and D was interpolated from neighbours.
    pub degenerate: Vec<usize>,
}

/// Completes A(t)B(t)C(t) pointwise, where |A − B| = ℓ₁ and |B − C| = ℓ₂ are chord lengths.
pub fn bianchi_check(a: &Curve, b: &Curve, c: &Curve, ell1: f64, ell2: f64) -> Result<BianchiReport> {
    if (ell1 - ell2).abs() < 1e-12 {
        return invalid("Bianchi permutability needs ℓ₁ ≠ ℓ₂");
    }
    let times = a.times();
    if b.times().len() != times.len() || c.times().len() != times.len() {
        return invalid("curves are not sampled on the same parameter grid");
    }
    let mut pts: Vec<Option<(DVector<f64>, DVector<f64>)>> = Vec::with_capacity(times.len());
    let mut degenerate = Vec::new();
    let mut copl = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let ea = a.eval(t, 1);
        let eb = b.eval(t, 1);
        let ec = c.eval(t, 1);
        match butterfly_complete(&ea[0], &eb[0], &ec[0]) {
            Ok(bf) => {
                copl = copl.max(coplanarity(&bf.a, &bf.b, &bf.c, &bf.d));
                let dv = butterfly_velocity(&ea[0], &eb[0], &ec[0], &ea[1], &eb[1], &ec[1])?;
                pts.push(Some((bf.d, dv)));
            }
            Err(_) => {
                degenerate.push(i);
                pts.push(None);
            }
        }
    }
    for &i in &degenerate {
        let prev = (0..i).rev().find(|&j| pts[j].is_some());
        let next = (i + 1..pts.len()).find(|&j| pts[j].is_some());
        let fill = match (prev, next) {
            (Some(p), Some(q)) => {
                let w = (times[i] - times[p]) / (times[q] - times[p]);
                let (dp, vp) = pts[p].clone().unwrap();
                let (dq, vq) = pts[q].clone().unwrap();
                (dp * (1.0 - w) + dq * w, vp * (1.0 - w) + vq * w)
            }
            (Some(p), None) => pts[p].clone().unwrap(),
            (None, Some(q)) => pts[q].clone().unwrap(),
            (None, None) => return numerical("every butterfly along the curves is degenerate"),
        };
        pts[i] = Some(fill);
    }
    let (dp, dv): (Vec<_>, Vec<_>) = pts.into_iter().map(|x| x.unwrap()).unzip();
    let mut dp = dp;
    let mut dv = dv;
    let closed = a.closed() && b.closed() && c.closed();
    if closed {
        let n = dp.len();
        dp[n - 1] = dp[0].clone();
        dv[n - 1] = dv[0].clone();
    }
    let d = Curve::from_samples(times, dp, Some(dv), closed)?;
    let ad = verify_correspondence(a, &d, ell2)?;
    let cd = verify_correspondence(c, &d, ell1)?;
    Ok(BianchiReport { d, ad, cd, max_coplanarity: copl, degenerate })
}

/// Traces of the λ-monodromies of two curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub lambda: f64,
    pub trace1: f64,
    pub trace2: f64,
    /// |tr g| of the SL₂ reductions (n = 2, 3), which are defined up to sign.
    /// `None` when a reduction is too ill-conditioned to resolve.
    pub sl2_trace1: Option<f64>,
    pub sl2_trace2: Option<f64>,
    /// |tr₁ − tr₂| / max(1, |tr₁|) over both trace kinds.
    pub rel_error: f64,
}

/// Largest reduction residual at which SL₂ traces are still compared; failed or
/// ill-conditioned reductions leave only the Lorentz traces.
pub const SL2_TRACE_RESIDUAL: f64 = 1e-8;

/// Compares λ-monodromy traces of two closed curves over one common period.
pub fn monodromy_conjugacy_check(c1: &Curve, c2: &Curve, lambdas: &[f64], steps: usize) -> Result<Vec<TraceRow>> {
    if !c1.closed() || !c2.closed() {
        return invalid("conjugacy check needs closed curves");
    }
    let (p1, p2) = (c1.period().unwrap(), c2.period().unwrap());
    if (p1 - p2).abs() > 1e-9 * p1.max(1.0) {
        return invalid("curves have different periods");
    }
    let mut out = Vec::new();
    for &lam in lambdas {
        let m1 = lorentz_lift_steps(c1, lam, c1.t_start(), c1.t_start() + p1, steps)?;
        let m2 = lorentz_lift_steps(c2, lam, c2.t_start(), c2.t_start() + p2, steps)?;
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(1.0);
        let (tr1, tr2) = (m1.trace(), m2.trace());
        let mut err = rel(tr1, tr2);
        let (mut s1, mut s2) = (None, None);
        if c1.dimension() == 2 || c1.dimension() == 3 {
            let usable = |m| moebius_from_lorentz(m, lam).ok().filter(|e| e.reduction_residual < SL2_TRACE_RESIDUAL);
            if let (Some(e1), Some(e2)) = (usable(&m1), usable(&m2)) {
                let a = e1.reduction.unwrap().trace().norm();
                let b = e2.reduction.unwrap().trace().norm();
                err = err.max(rel(a, b));
                s1 = Some(a);
                s2 = Some(b);
            }
        }
        out.push(TraceRow { lambda: lam, trace1: tr1, trace2: tr2, sl2_trace1: s1, sl2_trace2: s2, rel_error: err });
    }
    Ok(out)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Parameters of Γ_{k,n}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaKN {
    pub k: u32,
    pub n: u32,
    pub ell: f64,
    pub a: f64,
    pub b: f64,
}

impl GammaKN {
    pub fn new(k: u32, n: u32) -> Result<GammaKN> {
        if k == 0 || k >= n {
            return invalid("need 1 ≤ k < n");
        }
        if gcd(k, n) != 1 {
            return invalid(format!("k = {k} and n = {n} are not coprime; reduce the pair first"));
        }
        let q = n as f64 / k as f64;
        Ok(GammaKN {
            k,
            n,
            ell: ell_kn(k, n),
            a: q + (q * q - 1.0).sqrt(),
            b: k as f64 / n as f64,
        })
    }

    /// Continuous φ(t) with tan(φ/2) = −a tan(bt/2), φ(0) = 0.
    pub fn phi(&self, t: f64) -> f64 {
        let u = 0.5 * self.b * t;
        let m = (u / PI).round();
        -2.0 * ((self.a * (u - PI * m).tan()).atan() + PI * m)
    }
}

/// ℓ_{k,n} = 1/√(1 − (k/n)²).
pub fn ell_kn(k: u32, n: u32) -> f64 {
    let q = k as f64 / n as f64;
    1.0 / (1.0 - q * q).sqrt()
}

/// Closed curve e^{it}(1 + 2ℓe^{iφ(t)}), t ∈ [0, 2πn], in 2ℓ_{k,n}-correspondence with nS¹.
pub fn gamma_kn(k: u32, n: u32, samples: usize) -> Result<Curve> {
    let g = GammaKN::new(k, n)?;
    Ok(Curve::circle_partner(g.ell, TAU * n as f64, true, samples)?.with_analytic_id(Some(AnalyticId::GammaKn)))
}

/// Residual of n tan(kπρ) = k tan(nπρ) in the pole-free form
/// n sin(kπρ)cos(nπρ) − k sin(nπρ)cos(kπρ).
pub fn rotation_residual(k: u32, n: u32, rho: f64) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    let (sk, ck) = (kf * PI * rho).sin_cos();
    let (sn, cn) = (nf * PI * rho).sin_cos();
    nf * sk * cn - kf * sn * ck
}

/// The increasing function f with f ≡ ρ (mod 1/n) exactly at rotation numbers.
pub fn rotation_function(k: u32, n: u32, rho: f64) -> f64 {
    let (kf, nf) = (k as f64, n as f64);
    let j = (kf * rho).round();
    let x = kf * PI * rho - j * PI;
    let v = if x.abs() >= 0.5 * PI - 1e-15 {
        x.signum() * 0.5 * PI
    } else {
        ((nf / kf) * x.tan()).atan()
    };
    v / (nf * PI) + j / nf
}

/// Rotation numbers ρ ∈ (0, 1) of Γ_{k,n}: the n − k − 1 solutions of ρ − f(ρ) = m/n.
pub fn rotation_numbers(k: u32, n: u32) -> Vec<f64> {
    if k == 0 || k + 2 > n || gcd(k, n) != 1 {
        return Vec::new();
    }
    let nf = n as f64;
    let mut out = Vec::new();
    for m in 1..(n - k) {
        let target = m as f64 / nf;
        let g = |rho: f64| rho - rotation_function(k, n, rho) - target;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        let mut rho = 0.5 * (lo + hi);
        for _ in 0..3 {
            let h = 1e-7;
            let r = rotation_residual(k, n, rho);
            let dr = (rotation_residual(k, n, rho + h) - rotation_residual(k, n, rho - h)) / (2.0 * h);
            if dr == 0.0 {
                break;
            }
            let cand = rho - r / dr;
            if (cand - rho).abs() < 1e-9 && rotation_residual(k, n, cand).abs() < r.abs() {
                rho = cand;
            } else {
                break;
            }
        }
        out.push(rho);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Thresholds for [`zindler_verify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZindlerTolerance {
    /// Relative to the curve scale (largest distance from the centroid).
    pub chord: f64,
    /// Dimensionless, relative to unit speed.
    pub tangency: f64,
}

impl Default for ZindlerTolerance {
    fn default() -> Self {
        ZindlerTolerance { chord: 1e-6, tangency: 1e-6 }
    }
}

/// Outcome of a Zindler check at one rotation number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZindlerCertificate {
    pub rotation_number: f64,
    /// Mean chord ‖Γ(t + ρL) − Γ(t)‖.
    pub chord_length: f64,
    pub chord_deviation: f64,
    pub tangency_residual: f64,
    pub chord_threshold: f64,
    pub tangency_threshold: f64,
    pub passed: bool,
}

/// Checks chord constancy and midpoint tangency of Γ(t), Γ(t + ρL) over a period.
pub fn zindler_verify(c: &Curve, rho: f64, tol: &ZindlerTolerance) -> Result<ZindlerCertificate> {
    if !c.closed() {
        return invalid("Zindler check needs a closed curve");
    }
    if !(rho > 0.0 && rho < 1.0) {
        return invalid("rotation number must lie in (0, 1)");
    }
    let length = c.period().unwrap();
    let times = c.times();
    let pts = c.points();
    let count = times.len() - 1;
    let centroid: DVector<f64> = pts[..count].iter().fold(DVector::zeros(c.dimension()), |a, p| a + p) / count as f64;
    let scale = pts.iter().map(|p| (p - &centroid).norm()).fold(0.0, f64::max).max(1e-300);
    let mut chords = Vec::with_capacity(count);
    let mut tangency = 0.0f64;
    for &t in &times[..count] {
        let a = c.eval(t, 1);
        let b = c.eval(t + rho * length, 1);
        let d = &b[0] - &a[0];
        let len = d.norm();
        chords.push(len);
        let speed = 0.5 * (a[1].norm() + b[1].norm());
        let m = (&a[1] + &b[1]) * 0.5;
        let e = if len > 0.0 { d / len } else { DVector::zeros(c.dimension()) };
        let perp = &m - &e * e.dot(&m);
        tangency = tangency.max(perp.norm() / speed.max(1e-300));
    }
    let mean = chords.iter().sum::<f64>() / chords.len() as f64;
    let dev = chords.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    let chord_threshold = tol.chord * scale;
    Ok(ZindlerCertificate {
        rotation_number: rho,
        chord_length: mean,
        chord_deviation: dev,
        tangency_residual: tangency,
        chord_threshold,
        tangency_threshold: tol.tangency,
        passed: dev < chord_threshold && tangency < tol.tangency && mean > chord_threshold,
    })
}

/// Measured rotation χ and shift τ relating the butterfly completion to a shifted,
/// rotated copy of the partner of the circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftLaw {
    pub ell: f64,
    pub gamma: f64,
    pub tau: f64,
    pub chi: f64,
    /// |bτ/2 − arctan(b tan(γ/2))|.
    pub tan_residual: f64,
    /// |χ − (τ − γ)| mod 2π.
    pub chi_residual: f64,
    /// max over t of |D(t) − e^{−iχ}Γ_ℓ(t + τ)|.
    pub relation_residual: f64,
}

fn wrap_pi(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

/// Completes Γ^λ = e^{i(t+γ)}, Γ = e^{it}, Γ_ℓ to a butterfly, measures τ from |Γ_ℓ(τ)| = |D(0)|
/// and χ from the argument difference, and checks the shift law.
pub fn shift_law_check(ell: f64, gamma: f64) -> Result<ShiftLaw> {
    if !(ell > 1.0) {
        return invalid("shift law needs ell > 1");
    }
    if !(gamma > 0.0 && gamma <= PI) {
        return invalid("gamma must lie in (0, π]");
    }
    let b = (1.0 - 1.0 / (ell * ell)).sqrt();
    let horizon = TAU / b + TAU;
    let partner = Curve::circle_partner(ell, horizon, false, 64)?;
    let circ = |t: f64| DVector::from_vec(vec![t.cos(), t.sin()]);
    let butterfly_at = |t: f64| -> Result<DVector<f64>> {
        Ok(butterfly_complete(&circ(t + gamma), &circ(t), &partner.point(t))?.d)
    };
    let d0 = butterfly_at(0.0)?;
    let target = d0.norm();
    let tau = bracket_root(|s| partner.point(s).norm() - target, 0.0, PI / b, 1e-15)
        .ok_or_else(|| crate::GeoError::Numerical("no shift τ found on [0, π/b]".into()))?;
    let p = partner.point(tau);
    let raw = p[1].atan2(p[0]) - d0[1].atan2(d0[0]);
    let chi = (tau - gamma) + wrap_pi(raw - (tau - gamma));
    let tan_residual = (0.5 * b * tau - (b * (0.5 * gamma).tan()).atan()).abs();
    let chi_residual = wrap_pi(chi - (tau - gamma)).abs();
    let (cs, sn) = ((-chi).cos(), (-chi).sin());
    let mut relation = 0.0f64;
    for i in 0..=64 {
        let t = TAU * i as f64 / 64.0;
        let d = butterfly_at(t)?;
        let q = partner.point(t + tau);
        let rot = DVector::from_vec(vec![cs * q[0] - sn * q[1], sn * q[0] + cs * q[1]]);
        relation = relation.max((d - rot).norm());
    }
    Ok(ShiftLaw { ell, gamma, tau, chi, tan_residual, chi_residual, relation_residual: relation })
}

/// Sphere fit of a partner of Γ_{k,n} in R³ at half-chord λ > 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereFit {
    pub lambda: f64,
    /// λ = ℓ_{k′,n}: the monodromy is trivial and the partner from a planar start is planar.
    pub exceptional: bool,
    pub center_z: f64,
    pub radius: f64,
    /// max | |p − c e₃| − R |.
    pub residual: f64,
    pub z_extent: f64,
    pub closure_gap: f64,
}

/// Builds a closed partner of Γ_{k,n} ⊂ R³ at 2λ from the upper fixed point of the λ-monodromy
/// and fits a sphere centred on the z-axis; at exceptional λ rides from a planar start instead.
pub fn spherical_partner_check(k: u32, n: u32, lambda: f64, samples: usize, steps: usize) -> Result<SphereFit> {
    if !(lambda > 1.0) {
        return invalid("spherical partner check needs λ > 1");
    }
    let front = embed(&gamma_kn(k, n, samples)?, 3)?;
    let period = front.period().unwrap();
    let lift = lorentz_lift_steps(&front, lambda, 0.0, period, steps)?;
    let el = moebius_from_lorentz(&lift, lambda)?;
    let cls = classify(&el);
    let exceptional = cls.class == MonodromyClass::Trivial;
    let r0 = if exceptional {
        DVector::from_vec(vec![1.0, 0.0, 0.0])
    } else {
        if cls.class != MonodromyClass::Elliptic {
            return numerical(format!("expected an elliptic monodromy at λ = {lambda}, got {:?}", cls.class));
        }
        let fps = fixed_points(&el)?;
        fps.into_iter()
            .max_by(|a, b| a.r[2].partial_cmp(&b.r[2]).unwrap())
            .ok_or_else(|| crate::GeoError::Numerical("no fixed point".into()))?
            .r
    };
    let partner = bicycle_partner_steps(&front, lambda, &r0, steps)?;
    let pts = partner.points();
    let last = pts.len() - 1;
    let closure_gap = (&pts[last] - &pts[0]).norm();
    let zmin = pts.iter().map(|p| p[2]).fold(f64::INFINITY, f64::min);
    let zmax = pts.iter().map(|p| p[2]).fold(f64::NEG_INFINITY, f64::max);
    let mut a = DMatrix::zeros(pts.len(), 2);
    let mut rhs = DVector::zeros(pts.len());
    for (i, p) in pts.iter().enumerate() {
        a[(i, 0)] = 2.0 * p[2];
        a[(i, 1)] = 1.0;
        rhs[i] = p.norm_squared();
    }
    let (center_z, radius, residual) = if zmax - zmin > 1e-9 {
        let sol = a.svd(true, true).solve(&rhs, 1e-14).map_err(|e| crate::GeoError::Numerical(e.into()))?;
        let cz = sol[0];
        let radius = (sol[1] + cz * cz).sqrt();
        let res = pts
            .iter()
            .map(|p| ((p - DVector::from_vec(vec![0.0, 0.0, cz])).norm() - radius).abs())
            .fold(0.0, f64::max);
        (cz, radius, res)
    } else {
        (0.0, 0.0, f64::NAN)
    };
    Ok(SphereFit { lambda, exceptional, center_z, radius, residual, z_extent: zmax - zmin, closure_gap })
}
