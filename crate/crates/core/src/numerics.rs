//! Small numerical utilities shared across modules.

use nalgebra::{DMatrix, DVector};

/// Finite-difference weights for derivatives 0..=m at `x0` from nodes `xs`.
/// Returns `w[d][j]`, the weight of node j for derivative d.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Five-point Gauss–Legendre rule on [-1, 1].
pub const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
];

/// ∫_a^b f by five-point Gauss–Legendre.
pub fn gauss5(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    GAUSS5.iter().map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

/// Trapezoid rule on a uniform grid of spacing h.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Least-squares slope of log(y) against log(x).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Coefficients c₀..c_d of the least-squares polynomial through (x, y).
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Vec<f64> {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let a = DMatrix::from_fn(x.len(), degree + 1, |i, j| (x[i] / scale).powi(j as i32));
    let b = DVector::from_column_slice(y);
    let c = a.svd(true, true).solve(&b, 1e-14).expect("svd solve");
    (0..=degree).map(|j| c[j] / scale.powi(j as i32)).collect()
}

/// Root of f in [a, b] (sign change required) by bisection, polished by secant steps.
pub fn bracket_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < tol {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Cross product of two 3-vectors.
pub fn cross3(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Centered finite-difference derivative of a uniformly sampled signal,
/// fourth order in the interior. Periodic signals wrap; open ones use one-sided stencils.
pub fn uniform_derivative(values: &[f64], h: f64, order: usize, periodic: bool) -> Vec<f64> {
    let n = values.len();
    let half = order.div_ceil(2) + 1;
    let width = 2 * half + 1;
    let offsets: Vec<f64> = (0..width).map(|j| j as f64 - half as f64).collect();
    let central = fornberg_weights(0.0, &offsets, order)[order].clone();
    (0..n)
        .map(|i| {
            if periodic {
                let s: f64 = (0..width)
                    .map(|j| {
                        let idx = (i as isize + j as isize - half as isize).rem_euclid(n as isize);
                        central[j] * values[idx as usize]
                    })
                    .sum();
                s / h.powi(order as i32)
            } else {
                let w = width.min(n);
                let start = (i as isize - half as isize).clamp(0, (n - w) as isize) as usize;
                let xs: Vec<f64> = (start..start + w).map(|j| j as f64).collect();
                let wts = fornberg_weights(i as f64, &xs, order);
                let s: f64 = (0..w).map(|j| wts[order][j] * values[start + j]).sum();
                s / h.powi(order as i32)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[2][0] - 1.0).abs() < 1e-14);
        assert!((w[2][1] + 2.0).abs() < 1e-14);
        assert!((w[1][2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gauss_rule_is_exact_for_degree_nine() {
        let v = gauss5(|x| x.powi(9) + x.powi(8), -1.0, 1.0);
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_derivative_of_sine() {
        let n = 64;
        let h = std::f64::consts::TAU / n as f64;
        let s: Vec<f64> = (0..n).map(|i| (i as f64 * h).sin()).collect();
        let d2 = uniform_derivative(&s, h, 2, true);
        for i in 0..n {
            assert!((d2[i] + s[i]).abs() < 1e-5);
        }
    }

    #[test]
    fn polyfit_recovers_cubic() {
        let x: Vec<f64> = (0..6).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 - 2.0 * v + 0.5 * v * v * v).collect();
        let c = polyfit(&x, &y, 3);
        assert!((c[0] - 1.0).abs() < 1e-10 && (c[1] + 2.0).abs() < 1e-9 && (c[3] - 0.5).abs() < 1e-7);
    }
}
