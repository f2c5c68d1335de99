//! Exact differential polynomials in κ, τ and their evaluation along sampled curves.

pub use bikegeo_diffpoly::*;

use crate::curves::FrenetData;
use crate::error::{invalid, Result};
use crate::numerics::uniform_derivative;
use num_complex::Complex64;

/// Highest derivative order of κ or τ resolved by the sample stencils.
pub const MAX_EVAL_ORDER: u32 = 4;

/// ∮p ds over one period (or the sampled range) by the trapezoid rule on the Frenet samples.
pub fn evaluate_on_curve(p: &DiffPoly, geo: &FrenetData) -> Result<Complex64> {
    let ko = p.max_order(Sym::Kappa).unwrap_or(0);
    let to = p.max_order(Sym::Tau);
    if ko.max(to.unwrap_or(0)) > MAX_EVAL_ORDER {
        return invalid(format!("derivative order exceeds the stencil limit {MAX_EVAL_ORDER}"));
    }
    let kappa = match &geo.signed_curvature {
        Some(k) => k.clone(),
        None => geo.curvature.clone(),
    };
    let tau: Vec<f64> = match (&geo.torsion, to) {
        (Some(t), _) => {
            let mut out = Vec::with_capacity(t.len());
            for (i, x) in t.iter().enumerate() {
                match x {
                    Some(v) => out.push(*v),
                    None if to.is_none() => out.push(0.0),
                    None => return invalid(format!("torsion undefined at sample {i}")),
                }
            }
            out
        }
        (None, _) => vec![0.0; kappa.len()],
    };
    let h = geo.spacing;
    let derivs = |v: &[f64], max: u32| -> Vec<Vec<f64>> {
        let mut d = vec![v.to_vec()];
        for o in 1..=max {
            d.push(uniform_derivative(v, h, o as usize, geo.closed));
        }
        d
    };
    let kd = derivs(&kappa, ko);
    let td = derivs(&tau, to.unwrap_or(0));
    let n = kappa.len();
    let vals: Vec<Complex64> = (0..n)
        .map(|i| {
            p.eval(&|v: Var| match v.sym {
                Sym::Kappa => kd[v.order as usize][i],
                Sym::Tau => td[v.order as usize][i],
            })
        })
        .collect();
    let sum: Complex64 = if geo.closed {
        vals.iter().sum()
    } else {
        vals.iter().sum::<Complex64>() - (vals[0] + vals[n - 1]) * 0.5
    };
    Ok(sum * h)
}
