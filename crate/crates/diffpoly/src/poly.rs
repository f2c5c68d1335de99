use crate::coeff::GaussRat;
use num_complex::Complex64;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Curvature or torsion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sym {
    #[serde(rename = "kappa")]
    Kappa,
    #[serde(rename = "tau")]
    Tau,
}

/// The `order`-th arclength derivative of a symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub sym: Sym,
    pub order: u32,
}

impl Var {
    pub fn kappa(order: u32) -> Self {
        Self { sym: Sym::Kappa, order }
    }

    pub fn tau(order: u32) -> Self {
        Self { sym: Sym::Tau, order }
    }

    /// Scaling weight: order + 1.
    pub fn weight(&self) -> u32 {
        self.order + 1
    }

    pub fn derivative(&self) -> Self {
        Self { sym: self.sym, order: self.order + 1 }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sym {
            Sym::Kappa => "κ",
            Sym::Tau => "τ",
        };
        match self.order {
            0 => write!(f, "{s}"),
            1 => write!(f, "{s}'"),
            2 => write!(f, "{s}''"),
            k => write!(f, "{s}^({k})"),
        }
    }
}

/// Product of powers of distinct variables, sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Self(vec![(v, 1)])
    }

    /// Builds a monomial from arbitrary factors, merging repeats.
    pub fn from_factors(factors: &[(Var, u32)]) -> Self {
        let mut m: BTreeMap<Var, u32> = BTreeMap::new();
        for &(v, e) in factors {
            if e > 0 {
                *m.entry(v).or_insert(0) += e;
            }
        }
        Self(m.into_iter().collect())
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(v, e)| v.weight() * e).sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// Highest derivative order present, if any factor exists.
    pub fn max_order(&self) -> Option<u32> {
        self.0.iter().map(|(v, _)| v.order).max()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut f = self.0.clone();
        f.extend_from_slice(&o.0);
        Monomial::from_factors(&f)
    }

    /// Leibniz rule: list of (multiplicity, monomial) summands.
    pub fn derivative(&self) -> Vec<(u32, Monomial)> {
        let mut out = Vec::new();
        for (i, &(v, e)) in self.0.iter().enumerate() {
            let mut f: Vec<(Var, u32)> = Vec::with_capacity(self.0.len() + 1);
            for (j, &(w, ew)) in self.0.iter().enumerate() {
                if j == i {
                    if e > 1 {
                        f.push((w, e - 1));
                    }
                } else {
                    f.push((w, ew));
                }
            }
            f.push((v.derivative(), 1));
            out.push((e, Monomial::from_factors(&f)));
        }
        out
    }

    pub fn eval(&self, value: &dyn Fn(Var) -> f64) -> f64 {
        self.0.iter().map(|&(v, e)| value(v).powi(e as i32)).product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(o.0.iter()) {
            let c = a.0.cmp(&b.0).then(b.1.cmp(&a.1));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.0.len().cmp(&o.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Differential polynomial with exact Gaussian-rational coefficients,
/// always stored in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, GaussRat>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn one() -> Self {
        Self::constant(GaussRat::one())
    }

    pub fn term(c: GaussRat, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(c, m);
        p
    }

    pub fn var(v: Var) -> Self {
        Self::term(GaussRat::one(), Monomial::var(v))
    }

    /// κ^{(order)}.
    pub fn kappa(order: u32) -> Self {
        Self::var(Var::kappa(order))
    }

    /// τ^{(order)}.
    pub fn tau(order: u32) -> Self {
        Self::var(Var::tau(order))
    }

    pub fn add_term(&mut self, c: GaussRat, m: Monomial) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&m) {
            Some(old) => old + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussRat {
        self.terms.get(m).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn add(&self, o: &DiffPoly) -> DiffPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(c.clone(), m.clone());
        }
        r
    }

    pub fn sub(&self, o: &DiffPoly) -> DiffPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(-c, m.clone());
        }
        r
    }

    pub fn neg(&self) -> DiffPoly {
        self.scale(&GaussRat::real(-1, 1))
    }

    pub fn scale(&self, c: &GaussRat) -> DiffPoly {
        let mut r = DiffPoly::zero();
        for (m, a) in &self.terms {
            r.add_term(a * c, m.clone());
        }
        r
    }

    pub fn mul(&self, o: &DiffPoly) -> DiffPoly {
        let mut r = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(c1 * c2, m1.mul(m2));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut r = DiffPoly::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Arclength derivative by the Leibniz rule.
    pub fn derivative(&self) -> DiffPoly {
        let mut r = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (k, dm) in m.derivative() {
                r.add_term(c * &GaussRat::real(k as i64, 1), dm);
            }
        }
        r
    }

    /// Common weight of all terms, or None when inhomogeneous or zero.
    pub fn weight(&self) -> Option<u32> {
        let mut w = None;
        for m in self.terms.keys() {
            match w {
                None => w = Some(m.weight()),
                Some(x) if x != m.weight() => return None,
                _ => {}
            }
        }
        w
    }

    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(|m| m.weight()).max().unwrap_or(0)
    }

    pub fn homogeneous_components(&self) -> BTreeMap<u32, DiffPoly> {
        let mut out: BTreeMap<u32, DiffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight()).or_default().add_term(c.clone(), m.clone());
        }
        out
    }

    pub fn real_part(&self) -> DiffPoly {
        self.map_coeffs(|c| c.real_part())
    }

    /// Imaginary part as a real polynomial, so p = Re p + i·Im p.
    pub fn imag_part(&self) -> DiffPoly {
        self.map_coeffs(|c| c.imag_part())
    }

    pub fn conj(&self) -> DiffPoly {
        self.map_coeffs(|c| c.conj())
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    pub fn is_imaginary(&self) -> bool {
        self.terms.values().all(|c| c.is_imaginary())
    }

    fn map_coeffs(&self, f: impl Fn(&GaussRat) -> GaussRat) -> DiffPoly {
        let mut r = DiffPoly::zero();
        for (m, c) in &self.terms {
            r.add_term(f(c), m.clone());
        }
        r
    }

    /// Highest derivative order of `sym` appearing, if any.
    pub fn max_order(&self, sym: Sym) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter())
            .filter(|(v, _)| v.sym == sym)
            .map(|(v, _)| v.order)
            .max()
    }

    /// Numerical value for given variable values.
    pub fn eval(&self, value: &dyn Fn(Var) -> f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let (re, im) = c.to_f64_pair();
            s += Complex64::new(re, im) * m.eval(value);
        }
        s
    }

    /// Machine-readable term list.
    pub fn to_terms(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(m, c)| TermRecord {
                coeff_re: fmt_exact(&c.re),
                coeff_im: fmt_exact(&c.im),
                factors: m
                    .factors()
                    .iter()
                    .map(|(v, e)| FactorRecord { symbol: v.sym, deriv_order: v.order, power: *e })
                    .collect(),
            })
            .collect()
    }
}

fn fmt_exact(r: &num_rational::BigRational) -> String {
    use num_traits::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One term of a serialized polynomial; coefficients are exact rationals as text.
#[derive(Clone, Debug, Serialize)]
pub struct TermRecord {
    pub coeff_re: String,
    pub coeff_im: String,
    pub factors: Vec<FactorRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorRecord {
    pub symbol: Sym,
    pub deriv_order: u32,
    pub power: u32,
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{c}")?;
            } else if *c == GaussRat::one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c} {m}")?;
            }
        }
        Ok(())
    }
}
