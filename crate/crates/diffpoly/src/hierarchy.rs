//! Formal series of the unstable Riccati solution and the filament hierarchy.

use crate::coeff::GaussRat;
use crate::poly::DiffPoly;
use crate::reduce::normal_form;

/// Z₀..Z_N of the expansion Z = Σ ℓʲ Z_j solving ℓŻ = Z − ℓ f,
/// f = iτZ + (κ/2)(1 + Z²).
pub fn zn_series(n_max: usize) -> Vec<DiffPoly> {
    let kappa = DiffPoly::kappa(0);
    let itau = DiffPoly::tau(0).scale(&GaussRat::i());
    let half = GaussRat::real(1, 2);
    let mut z: Vec<DiffPoly> = vec![DiffPoly::zero()];
    for n in 1..=n_max {
        let m = n - 1;
        let mut quad = if m == 0 { DiffPoly::one() } else { DiffPoly::zero() };
        for a in 0..=m {
            quad = quad.add(&z[a].mul(&z[m - a]));
        }
        let f_m = itau.mul(&z[m]).add(&kappa.mul(&quad).scale(&half));
        z.push(z[m].derivative().add(&f_m));
    }
    z
}

/// Integrands I₀..I_N: coefficient of ℓⁿ in 1 − iℓτ − ℓκZ.
pub fn monodromy_integrands(n_max: usize) -> Vec<DiffPoly> {
    let z = zn_series(n_max.saturating_sub(1));
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let p = match n {
            0 => DiffPoly::one(),
            _ => {
                let mut p = DiffPoly::kappa(0).mul(&z[n - 1]).neg();
                if n == 1 {
                    p = p.add(&DiffPoly::tau(0).scale(&GaussRat::imag(-1, 1)));
                }
                p
            }
        };
        out.push(p);
    }
    out
}

/// Canonical representatives of the integrals ∮I_n modulo total derivatives.
pub fn monodromy_integrals(n_max: usize) -> Vec<DiffPoly> {
    monodromy_integrands(n_max)
        .iter()
        .map(|p| normal_form(p).map(|(nf, _)| nf).unwrap_or_else(|| p.clone()))
        .collect()
}

/// Vector field along a curve, in the Frenet basis (v, n, b).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FrameField {
    pub v: DiffPoly,
    pub n: DiffPoly,
    pub b: DiffPoly,
}

impl FrameField {
    pub fn new(v: DiffPoly, n: DiffPoly, b: DiffPoly) -> Self {
        Self { v, n, b }
    }

    /// Arclength derivative using v̇ = κn, ṅ = −κv + τb, ḃ = −τn.
    pub fn derivative(&self) -> FrameField {
        let k = DiffPoly::kappa(0);
        let t = DiffPoly::tau(0);
        FrameField {
            v: self.v.derivative().sub(&k.mul(&self.n)),
            n: self.n.derivative().add(&k.mul(&self.v)).sub(&t.mul(&self.b)),
            b: self.b.derivative().add(&t.mul(&self.n)),
        }
    }

    /// v × self.
    pub fn cross_tangent(&self) -> FrameField {
        FrameField { v: DiffPoly::zero(), n: self.b.neg(), b: self.n.clone() }
    }

    pub fn dot(&self, o: &FrameField) -> DiffPoly {
        self.v.mul(&o.v).add(&self.n.mul(&o.n)).add(&self.b.mul(&o.b))
    }

    pub fn sub(&self, o: &FrameField) -> FrameField {
        FrameField { v: self.v.sub(&o.v), n: self.n.sub(&o.n), b: self.b.sub(&o.b) }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero() && self.n.is_zero() && self.b.is_zero()
    }
}

/// x₀..x_N with ẋ_i = v × x_{i+1} and x·x = 1 for x = Σ εⁱ x_i, x₀ = −v.
///
/// The n- and b-components of x_{i+1} come from the recursion; the v-component
/// is fixed algebraically by the normalization.
pub fn filament_fields(n_max: usize) -> Vec<FrameField> {
    let mut x = vec![FrameField::new(DiffPoly::one().neg(), DiffPoly::zero(), DiffPoly::zero())];
    let half = GaussRat::real(1, 2);
    for i in 0..n_max {
        let d = x[i].derivative();
        let mut sum = DiffPoly::zero();
        for a in 1..=i {
            sum = sum.add(&x[a].dot(&x[i + 1 - a]));
        }
        x.push(FrameField::new(sum.scale(&half), d.b, d.n.neg()));
    }
    x
}

/// One conserved filament integral ∮F_j.
#[derive(Clone, Debug, PartialEq)]
pub struct FilamentIntegral {
    pub index: usize,
    pub density: DiffPoly,
    /// Beyond F₅ the densities are generated, not cross-checked against a known list.
    pub experimental: bool,
}

/// F₁..F_N. F₂ = τ is the base case; for j ≥ 3 the density is the canonical form of
/// 2/(j−2) times the v-component of x_{j−1}.
pub fn filament_integrands(n_max: usize) -> Vec<FilamentIntegral> {
    let x = filament_fields(n_max.saturating_sub(1));
    let mut out = Vec::new();
    for j in 1..=n_max {
        let density = match j {
            1 => x[0].v.neg(),
            2 => DiffPoly::tau(0),
            _ => {
                let raw = x[j - 1].v.scale(&GaussRat::real(2, (j - 2) as i64));
                normal_form(&raw).map(|(nf, _)| nf).unwrap_or(raw)
            }
        };
        out.push(FilamentIntegral { index: j, density, experimental: j > 5 });
    }
    out
}
