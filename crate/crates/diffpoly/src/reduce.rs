//! Reduction of differential polynomials modulo total derivatives.

use crate::coeff::GaussRat;
use crate::poly::{DiffPoly, Monomial, Var};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Highest weight handled by the exact reduction.
pub const MAX_REDUCTION_WEIGHT: u32 = 14;

/// Outcome of comparing two polynomials modulo total derivatives.
#[derive(Clone, Debug, PartialEq)]
pub enum TotalDerivative {
    /// p − q = d(witness)/dt.
    Equal { witness: DiffPoly },
    NotEqual,
    /// A homogeneous component exceeds [`MAX_REDUCTION_WEIGHT`].
    Inconclusive { weight: u32 },
}

impl TotalDerivative {
    pub fn is_equal(&self) -> bool {
        matches!(self, TotalDerivative::Equal { .. })
    }

    pub fn witness(&self) -> Option<&DiffPoly> {
        match self {
            TotalDerivative::Equal { witness } => Some(witness),
            _ => None,
        }
    }
}

/// All monomials of the given weight, in canonical order.
pub fn monomials_of_weight(w: u32) -> Vec<Monomial> {
    let mut vars = Vec::new();
    for order in 0..w {
        vars.push(Var::kappa(order));
        vars.push(Var::tau(order));
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fill(&vars, 0, w, &mut cur, &mut out);
    out.sort();
    out
}

fn fill(vars: &[Var], i: usize, rest: u32, cur: &mut Vec<(Var, u32)>, out: &mut Vec<Monomial>) {
    if rest == 0 {
        out.push(Monomial::from_factors(cur));
        return;
    }
    if i == vars.len() {
        return;
    }
    let v = vars[i];
    let vw = v.weight();
    let mut e = 0;
    while e * vw <= rest {
        if e > 0 {
            cur.push((v, e));
        }
        fill(vars, i + 1, rest - e * vw, cur, out);
        if e > 0 {
            cur.pop();
        }
        e += 1;
    }
}

/// Order used to pick pivots: monomials with higher derivatives are eliminated first,
/// so normal forms favour low derivative orders (κ̇² rather than κκ̈).
fn elim_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let orders = |m: &Monomial| {
        let mut o: Vec<u32> = m
            .factors()
            .iter()
            .flat_map(|(v, e)| std::iter::repeat_n(v.order, *e as usize))
            .collect();
        o.sort_unstable_by(|x, y| y.cmp(x));
        o
    };
    a.max_order()
        .cmp(&b.max_order())
        .then_with(|| orders(a).cmp(&orders(b)))
        .then_with(|| a.cmp(b))
}

type Sparse = BTreeMap<Monomial, BigRational>;

struct Row {
    pivot: Monomial,
    vec: Sparse,
    witness: Sparse,
}

fn leading(v: &Sparse) -> Option<Monomial> {
    v.keys().max_by(|a, b| elim_cmp(a, b)).cloned()
}

fn axpy(y: &mut Sparse, a: &BigRational, x: &Sparse) {
    for (m, c) in x {
        let e = y.entry(m.clone()).or_insert_with(BigRational::zero);
        *e -= a * c;
        if e.is_zero() {
            y.remove(m);
        }
    }
}

/// Echelon basis of the image of d/dt on weight `w − 1`, inside weight `w`.
fn image_basis(w: u32) -> Vec<Row> {
    let mut rows: Vec<Row> = Vec::new();
    if w == 0 {
        return rows;
    }
    for m in monomials_of_weight(w - 1) {
        let mut vec: Sparse = BTreeMap::new();
        for (k, dm) in m.derivative() {
            *vec.entry(dm).or_insert_with(BigRational::zero) += BigRational::from_integer(k.into());
        }
        vec.retain(|_, c| !c.is_zero());
        let mut witness: Sparse = BTreeMap::new();
        witness.insert(m.clone(), BigRational::one());
        while let Some(lead) = leading(&vec) {
            match rows.iter().find(|r| r.pivot == lead) {
                Some(r) => {
                    let a = vec[&lead].clone();
                    axpy(&mut vec, &a, &r.vec);
                    axpy(&mut witness, &a, &r.witness);
                }
                None => {
                    let a = vec[&lead].clone();
                    for c in vec.values_mut() {
                        *c /= &a;
                    }
                    for c in witness.values_mut() {
                        *c /= &a;
                    }
                    rows.push(Row { pivot: lead, vec, witness });
                    break;
                }
            }
        }
    }
    rows.sort_by(|a, b| elim_cmp(&b.pivot, &a.pivot));
    rows
}

/// Reduces a real homogeneous component; returns (remainder, witness).
fn reduce_real(p: &Sparse, rows: &[Row]) -> (Sparse, Sparse) {
    let mut rem = p.clone();
    let mut wit: Sparse = BTreeMap::new();
    for r in rows {
        if let Some(a) = rem.get(&r.pivot).cloned() {
            axpy(&mut rem, &a, &r.vec);
            let neg = -a;
            axpy(&mut wit, &neg, &r.witness);
        }
    }
    (rem, wit)
}

fn split(p: &DiffPoly) -> (Sparse, Sparse) {
    let mut re = BTreeMap::new();
    let mut im = BTreeMap::new();
    for (m, c) in p.terms() {
        if !c.re.is_zero() {
            re.insert(m.clone(), c.re.clone());
        }
        if !c.im.is_zero() {
            im.insert(m.clone(), c.im.clone());
        }
    }
    (re, im)
}

fn join(re: &Sparse, im: &Sparse) -> DiffPoly {
    let mut p = DiffPoly::zero();
    for (m, c) in re {
        p.add_term(GaussRat::from_rational(c.clone()), m.clone());
    }
    for (m, c) in im {
        p.add_term(GaussRat::new(BigRational::zero(), c.clone()), m.clone());
    }
    p
}

/// Canonical representative of `p` modulo total derivatives, with a witness `w`
/// such that p = normal_form + dw/dt. Returns None if a component is too heavy.
pub fn normal_form(p: &DiffPoly) -> Option<(DiffPoly, DiffPoly)> {
    let mut nf = DiffPoly::zero();
    let mut witness = DiffPoly::zero();
    for (w, comp) in p.homogeneous_components() {
        if w > MAX_REDUCTION_WEIGHT {
            return None;
        }
        let rows = image_basis(w);
        let (re, im) = split(&comp);
        let (rre, wre) = reduce_real(&re, &rows);
        let (rim, wim) = reduce_real(&im, &rows);
        nf = nf.add(&join(&rre, &rim));
        witness = witness.add(&join(&wre, &wim));
    }
    Some((nf, witness))
}

/// Decides whether p − q is a total derivative, returning the witness when it is.
pub fn equal_mod_total_derivative(p: &DiffPoly, q: &DiffPoly) -> TotalDerivative {
    let d = p.sub(q);
    if d.is_zero() {
        return TotalDerivative::Equal { witness: DiffPoly::zero() };
    }
    let heavy = d.max_weight();
    match normal_form(&d) {
        None => TotalDerivative::Inconclusive { weight: heavy },
        Some((nf, w)) if nf.is_zero() => TotalDerivative::Equal { witness: w },
        Some(_) => TotalDerivative::NotEqual,
    }
}
