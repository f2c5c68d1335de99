//! Fixed-step Runge–Kutta integration.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;

/// State space of an ODE: supports y + a·k.
pub trait OdeState: Clone {
    fn add_scaled(&self, k: &Self, a: f64) -> Self;
}

impl OdeState for f64 {
    fn add_scaled(&self, k: &Self, a: f64) -> Self {
        self + a * k
    }
}

impl OdeState for Complex64 {
    fn add_scaled(&self, k: &Self, a: f64) -> Self {
        self + k * a
    }
}

impl OdeState for DVector<f64> {
    fn add_scaled(&self, k: &Self, a: f64) -> Self {
        self + k * a
    }
}

impl OdeState for DMatrix<f64> {
    fn add_scaled(&self, k: &Self, a: f64) -> Self {
        self + k * a
    }
}

impl OdeState for Matrix2<Complex64> {
    fn add_scaled(&self, k: &Self, a: f64) -> Self {
        self + k * Complex64::from(a)
    }
}

impl OdeState for Vector2<Complex64> {
    fn add_scaled(&self, k: &Self, a: f64) -> Self {
        self + k * Complex64::from(a)
    }
}

impl<A: OdeState, B: OdeState> OdeState for (A, B) {
    fn add_scaled(&self, k: &Self, a: f64) -> Self {
        (self.0.add_scaled(&k.0, a), self.1.add_scaled(&k.1, a))
    }
}

/// One classical RK4 step of y' = f(t, y).
pub fn rk4_step<S: OdeState>(f: &impl Fn(f64, &S) -> S, t: f64, y: &S, h: f64) -> S {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &y.add_scaled(&k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &y.add_scaled(&k2, 0.5 * h));
    let k4 = f(t + h, &y.add_scaled(&k3, h));
    y.add_scaled(&k1, h / 6.0)
        .add_scaled(&k2, h / 3.0)
        .add_scaled(&k3, h / 3.0)
        .add_scaled(&k4, h / 6.0)
}

/// Integrates over [t0, t1] in `steps` equal steps, applying `fix` after each step.
/// Returns the states at all step boundaries.
pub fn rk4_path<S: OdeState>(
    f: impl Fn(f64, &S) -> S,
    fix: impl Fn(S) -> S,
    y0: S,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Vec<S> {
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y0.clone());
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        y = fix(rk4_step(&f, t, &y, h));
        out.push(y.clone());
    }
    out
}

/// Same as [`rk4_path`] but keeps only the final state.
pub fn rk4_final<S: OdeState>(
    f: impl Fn(f64, &S) -> S,
    fix: impl Fn(S) -> S,
    y0: S,
    t0: f64,
    t1: f64,
    steps: usize,
) -> S {
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        y = fix(rk4_step(&f, t, &y, h));
    }
    y
}
