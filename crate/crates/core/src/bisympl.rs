//! Bisymplectomorphisms `φ = k ∘ f_u`: linear automorphisms `k`, radial
//! circular maps `f_u`, their group law, and numerical membership checks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::spectral_apply;
use crate::error::{Error, Result};
use crate::forms::{form_matrix, FormKind};
use crate::pullback::{
    directional_derivative, numerical_jacobian, pullback_two_form, relative_form_residual, FnMap, MapDomain, SmoothMap,
};
use crate::spectral::{frame_decompose, random_unitary, spectral, spectral_norm};
use crate::triple::{bergman_operator, inner_product, triple_product, Element, Family, TripleSystem, C64, I};

/// Tolerance for unitarity of the factors of a type I automorphism.
pub const UNITARY_TOL: f64 = 1e-12;
/// Tolerance for the `is_in_k` flag of [`differential_at_origin`].
pub const K_TOL: f64 = 1e-6;
pub const SPECTRAL_TOL: f64 = 1e-9;
pub const RADIALITY_TOL: f64 = 1e-8;
pub const TANGENT_TOL: f64 = 1e-6;
/// Points sampled in `P_z` by [`orbit_and_polydisc_checks`].
pub const RADIALITY_SAMPLES: usize = 10;

/// `u(t) = exp(i (c_1 t + ... + c_d t^d))`, so `|u| = 1` and `u(0) = 1`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CircleFunction {
    coeffs: Vec<f64>,
}

impl CircleFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coeffs })
    }

    /// `u ≡ 1`.
    pub fn one() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `c_1 t + ... + c_d t^d`.
    pub fn phase(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * t)
    }

    pub fn eval(&self, t: f64) -> C64 {
        C64::from_polar(1.0, self.phase(t))
    }

    /// Pointwise product; the phase polynomials add.
    pub fn product(&self, other: &CircleFunction) -> CircleFunction {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |c: &[f64], k: usize| c.get(k).copied().unwrap_or(0.0);
        CircleFunction {
            coeffs: (0..len).map(|k| get(&self.coeffs, k) + get(&other.coeffs, k)).collect(),
        }
    }

    pub fn conj(&self) -> CircleFunction {
        CircleFunction {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Random phase polynomial of the given degree with coefficients in
    /// `[-scale, scale)`.
    pub fn random(rng: &mut impl Rng, degree: usize, scale: f64) -> Self {
        Self {
            coeffs: (0..degree).map(|_| scale * (2.0 * rng.gen::<f64>() - 1.0)).collect(),
        }
    }
}

/// Element of the group `K` of linear automorphisms of `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearAutomorphism {
    /// `z ↦ U z W*` with `U` (p×p) and `W` (q×q) unitary.
    TypeI { u: DMatrix<C64>, w: DMatrix<C64> },
    /// `(k z)_{σ(j)} = e^{i θ_j} z_j`.
    Polydisc { perm: Vec<usize>, phases: Vec<f64> },
}

fn unitary_defect(m: &DMatrix<C64>) -> f64 {
    (m.adjoint() * m - DMatrix::<C64>::identity(m.nrows(), m.ncols())).camax()
}

impl LinearAutomorphism {
    pub fn type_i(u: DMatrix<C64>, w: DMatrix<C64>) -> Result<Self> {
        if !u.is_square() || !w.is_square() || u.nrows() == 0 || u.nrows() > w.nrows() {
            return Err(Error::InvalidAutomorphism(format!(
                "factor shapes {}x{} and {}x{}",
                u.nrows(),
                u.ncols(),
                w.nrows(),
                w.ncols()
            )));
        }
        if u.iter().chain(w.iter()).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = unitary_defect(&u).max(unitary_defect(&w));
        if defect > UNITARY_TOL {
            return Err(Error::InvalidAutomorphism(format!("unitarity defect {defect:e}")));
        }
        Ok(Self::TypeI { u, w })
    }

    pub fn polydisc(perm: Vec<usize>, phases: Vec<f64>) -> Result<Self> {
        let r = perm.len();
        if r == 0 || phases.len() != r {
            return Err(Error::InvalidAutomorphism(format!(
                "{} indices for {} phases",
                r,
                phases.len()
            )));
        }
        let mut seen = vec![false; r];
        for &s in &perm {
            if s >= r || std::mem::replace(&mut seen[s], true) {
                return Err(Error::InvalidAutomorphism(format!("{perm:?} is not a permutation")));
            }
        }
        if phases.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::Polydisc { perm, phases })
    }

    pub fn identity(system: TripleSystem) -> Self {
        Self::rotation(system, 0.0)
    }

    /// Multiplication by `e^{iθ}`.
    pub fn rotation(system: TripleSystem, theta: f64) -> Self {
        match system.family() {
            Family::TypeI { p, q } => Self::TypeI {
                u: DMatrix::identity(p, p) * C64::from_polar(1.0, theta),
                w: DMatrix::identity(q, q),
            },
            Family::Polydisc { r } => Self::Polydisc {
                perm: (0..r).collect(),
                phases: vec![theta; r],
            },
        }
    }

    pub fn random(system: TripleSystem, rng: &mut impl Rng) -> Self {
        match system.family() {
            Family::TypeI { p, q } => Self::TypeI {
                u: random_unitary(rng, p),
                w: random_unitary(rng, q),
            },
            Family::Polydisc { r } => {
                let mut perm: Vec<usize> = (0..r).collect();
                for i in (1..r).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
                let phases = (0..r).map(|_| 2.0 * PI * rng.gen::<f64>()).collect();
                Self::Polydisc { perm, phases }
            }
        }
    }

    pub fn system(&self) -> TripleSystem {
        match self {
            Self::TypeI { u, w } => TripleSystem::type_i(u.nrows(), w.nrows()).expect("validated shapes"),
            Self::Polydisc { perm, .. } => TripleSystem::polydisc(perm.len()).expect("validated length"),
        }
    }

    pub fn apply(&self, z: &Element) -> Result<Element> {
        if z.system() != self.system() {
            return Err(Error::DomainMismatch);
        }
        match self {
            Self::TypeI { u, w } => {
                let m = z.to_matrix().expect("type I element");
                Element::from_matrix(z.system(), &(u * m * w.adjoint()))
            }
            Self::Polydisc { perm, phases } => {
                let mut out = z.system().zero();
                for (j, (&s, &t)) in perm.iter().zip(phases).enumerate() {
                    out.coords_mut()[s] = z.coords()[j] * C64::from_polar(1.0, t);
                }
                Ok(out)
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearAutomorphism) -> Result<LinearAutomorphism> {
        match (self, other) {
            (Self::TypeI { u: u1, w: w1 }, Self::TypeI { u: u2, w: w2 }) if self.system() == other.system() => {
                Ok(Self::TypeI { u: u1 * u2, w: w1 * w2 })
            }
            (Self::Polydisc { perm: s1, phases: t1 }, Self::Polydisc { perm: s2, phases: t2 })
                if s1.len() == s2.len() =>
            {
                Ok(Self::Polydisc {
                    perm: s2.iter().map(|&j| s1[j]).collect(),
                    phases: s2.iter().zip(t2).map(|(&j, t)| t1[j] + t).collect(),
                })
            }
            _ => Err(Error::DomainMismatch),
        }
    }

    pub fn inverse(&self) -> LinearAutomorphism {
        match self {
            Self::TypeI { u, w } => Self::TypeI {
                u: u.adjoint(),
                w: w.adjoint(),
            },
            Self::Polydisc { perm, phases } => {
                let mut inv = vec![0; perm.len()];
                for (j, &s) in perm.iter().enumerate() {
                    inv[s] = j;
                }
                let phases = inv.iter().map(|&j| -phases[j]).collect();
                Self::Polydisc { perm: inv, phases }
            }
        }
    }

    /// Complex matrix of `k` in the coordinate basis.
    pub fn matrix(&self) -> DMatrix<C64> {
        let sys = self.system();
        let n = sys.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m.set_column(j, self.apply(&sys.basis(j)).expect("same system").coords());
        }
        m
    }

    /// `max |k{x,y,z} - {kx,ky,kz}|` over basis triples.
    pub fn triple_defect(&self) -> f64 {
        let m = self.matrix();
        triple_defect(self.system(), &m)
    }
}

impl SmoothMap for LinearAutomorphism {
    fn name(&self) -> String {
        "k".into()
    }
    fn eval(&self, z: &Element) -> Result<Element> {
        self.apply(z)
    }
    fn in_domain(&self, z: &Element) -> bool {
        z.system() == self.system() && z.is_finite()
    }
}

/// `max |A{x,y,z} - {Ax,Ay,Az}|` over triples of basis vectors.
fn triple_defect(system: TripleSystem, a: &DMatrix<C64>) -> f64 {
    let n = system.dim();
    let apply = |v: &Element| Element::from_vector(system, a * v.coords());
    let basis: Vec<Element> = (0..n).map(|m| system.basis(m)).collect();
    let images: Vec<Element> = basis.iter().map(apply).collect();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            for z in x..n {
                let lhs = apply(&triple_product(&basis[x], &basis[y], &basis[z]).expect("same system"));
                let rhs = triple_product(&images[x], &images[y], &images[z]).expect("same system");
                worst = worst.max((lhs - rhs).max_abs());
            }
        }
    }
    worst
}

/// The circle-function part of a bisymplectomorphism.
#[derive(Clone, Debug, PartialEq)]
pub enum RadialPart {
    Uniform(CircleFunction),
    /// One circle function per polydisc coordinate.
    PerComponent(Vec<CircleFunction>),
}

impl RadialPart {
    fn validate(&self, system: TripleSystem) -> Result<()> {
        match (self, system.family()) {
            (RadialPart::Uniform(_), _) => Ok(()),
            (RadialPart::PerComponent(us), Family::Polydisc { r }) if us.len() == r => Ok(()),
            (RadialPart::PerComponent(us), _) => Err(Error::InvalidAutomorphism(format!(
                "{} circle functions for {}",
                us.len(),
                system.label()
            ))),
        }
    }

    fn components(&self, r: usize) -> Vec<CircleFunction> {
        match self {
            RadialPart::Uniform(u) => vec![u.clone(); r],
            RadialPart::PerComponent(us) => us.clone(),
        }
    }
}

/// `f_u(z) = Σ λ_j u(λ_j²) e_j`, or `z_j ↦ u_j(|z_j|²) z_j` on a polydisc.
pub fn radial_circular_apply(u: &RadialPart, z: &Element) -> Result<Element> {
    let sys = z.system();
    u.validate(sys)?;
    let norm = spectral_norm(z);
    if norm >= 1.0 {
        return Err(Error::OutsideDomain(norm));
    }
    match sys.family() {
        Family::Polydisc { r } => {
            let us = u.components(r);
            let mut out = z.clone();
            for (c, u) in out.coords_mut().iter_mut().zip(&us) {
                *c *= u.eval(c.norm_sqr());
            }
            Ok(out)
        }
        Family::TypeI { .. } => {
            let RadialPart::Uniform(u) = u else {
                unreachable!("validated")
            };
            spectral_apply(z, |l| u.eval(l * l) * l)
        }
    }
}

/// `φ = k ∘ f_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bisymplectomorphism {
    pub k: LinearAutomorphism,
    pub u: RadialPart,
}

impl Bisymplectomorphism {
    pub fn new(k: LinearAutomorphism, u: RadialPart) -> Result<Self> {
        u.validate(k.system())?;
        Ok(Self { k, u })
    }

    pub fn identity(system: TripleSystem) -> Self {
        Self {
            k: LinearAutomorphism::identity(system),
            u: RadialPart::Uniform(CircleFunction::one()),
        }
    }

    pub fn radial(system: TripleSystem, u: RadialPart) -> Result<Self> {
        Self::new(LinearAutomorphism::identity(system), u)
    }

    /// Random `k` with degree-`degree` phase polynomials, one per coordinate
    /// on a polydisc.
    pub fn random(system: TripleSystem, seed: u64, degree: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = LinearAutomorphism::random(system, &mut rng);
        let u = match system.family() {
            Family::TypeI { .. } => RadialPart::Uniform(CircleFunction::random(&mut rng, degree, 2.0)),
            Family::Polydisc { r } => {
                RadialPart::PerComponent((0..r).map(|_| CircleFunction::random(&mut rng, degree, 2.0)).collect())
            }
        };
        Self { k, u }
    }

    pub fn system(&self) -> TripleSystem {
        self.k.system()
    }

    pub fn apply(&self, z: &Element) -> Result<Element> {
        if z.system() != self.system() {
            return Err(Error::DomainMismatch);
        }
        self.k.apply(&radial_circular_apply(&self.u, z)?)
    }

    /// `self ∘ other`, using `k⁻¹ f_u k = f_{u∘σ}`.
    pub fn compose(&self, other: &Bisymplectomorphism) -> Result<Bisymplectomorphism> {
        let k = self.k.compose(&other.k)?;
        let u = match (&self.u, &other.u, &other.k) {
            (RadialPart::Uniform(a), RadialPart::Uniform(b), _) => RadialPart::Uniform(a.product(b)),
            (a, b, LinearAutomorphism::Polydisc { perm, .. }) => {
                let (a, b) = (a.components(perm.len()), b.components(perm.len()));
                RadialPart::PerComponent(perm.iter().zip(&b).map(|(&s, bj)| a[s].product(bj)).collect())
            }
            _ => return Err(Error::DomainMismatch),
        };
        Ok(Bisymplectomorphism { k, u })
    }

    pub fn inverse(&self) -> Bisymplectomorphism {
        let u = match (&self.u, &self.k) {
            (RadialPart::Uniform(a), _) => RadialPart::Uniform(a.conj()),
            (RadialPart::PerComponent(us), LinearAutomorphism::Polydisc { perm, .. }) => {
                let mut out = vec![CircleFunction::one(); us.len()];
                for (j, &s) in perm.iter().enumerate() {
                    out[s] = us[j].conj();
                }
                RadialPart::PerComponent(out)
            }
            (RadialPart::PerComponent(_), _) => unreachable!("validated"),
        };
        Bisymplectomorphism { k: self.k.inverse(), u }
    }
}

impl SmoothMap for Bisymplectomorphism {
    fn name(&self) -> String {
        "phi".into()
    }
    fn eval(&self, z: &Element) -> Result<Element> {
        self.apply(z)
    }
    fn in_domain(&self, z: &Element) -> bool {
        z.system() == self.system() && MapDomain::Ball.contains(z)
    }
}

pub fn apply_bisympl(phi: &Bisymplectomorphism, z: &Element) -> Result<Element> {
    phi.apply(z)
}

/// `||B(f, f) J - J B(z, z)||_F / max(1, ||J B(z, z)||_F)` with realified
/// operators and the numerical Jacobian `J` of `f` at `z`.
pub fn check_intertwining(map: &impl SmoothMap, z: &Element, h: f64) -> Result<f64> {
    let j = numerical_jacobian(map, z, h)?;
    let fz = map.eval(z)?;
    let bz = bergman_operator(z, z)?.realify();
    let bf = bergman_operator(&fz, &fz)?.realify();
    let jb = &j * bz;
    Ok((bf * &j - &jb).norm() / jb.norm().max(1.0))
}

#[derive(Clone, Debug)]
pub struct DifferentialAtOrigin {
    /// Realified Jacobian at `0`.
    pub jacobian: DMatrix<f64>,
    /// `||J I - I J||` with `I` the realified complex structure.
    pub complex_linear_defect: f64,
    /// Triple-product defect of the complex matrix read off `J`.
    pub triple_defect: f64,
    pub is_in_k: bool,
}

/// Numerical `dφ(0)` and whether it lies in `K`, up to [`K_TOL`].
pub fn differential_at_origin(map: &impl SmoothMap, system: TripleSystem, h: f64) -> Result<DifferentialAtOrigin> {
    let jac = numerical_jacobian(map, &system.zero(), h)?;
    let n = system.dim();
    let mut cs = DMatrix::zeros(2 * n, 2 * n);
    for m in 0..n {
        cs[(2 * m + 1, 2 * m)] = 1.0;
        cs[(2 * m, 2 * m + 1)] = -1.0;
    }
    let complex_linear_defect = (&jac * &cs - &cs * &jac).amax();
    let a = DMatrix::from_fn(n, n, |i, j| C64::new(jac[(2 * i, 2 * j)], jac[(2 * i + 1, 2 * j)]));
    let triple_defect = triple_defect(system, &a);
    Ok(DifferentialAtOrigin {
        jacobian: jac,
        complex_linear_defect,
        triple_defect,
        is_in_k: complex_linear_defect < K_TOL && triple_defect < K_TOL,
    })
}

/// Residuals of the invariance properties of a bisymplectomorphism at `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitReport {
    /// Largest change of a spectral value.
    pub spectral_defect: f64,
    /// Largest relative distance of `φ(w)` from `V_{φ(z)}`, `w ∈ P_z`.
    pub radiality_defect: f64,
    /// Largest relative distance of `dφ(z) v` from `V_{φ(z)}`, `v ∈ V_z`.
    pub tangent_defect: f64,
}

impl OrbitReport {
    pub fn pass(&self) -> bool {
        self.spectral_defect < SPECTRAL_TOL
            && self.radiality_defect < RADIALITY_TOL
            && self.tangent_defect < TANGENT_TOL
    }
}

fn distance_to_span(v: &Element, tripotents: &[Element]) -> Result<f64> {
    let mut rest = v.clone();
    for e in tripotents {
        let c = inner_product(v, e)? / inner_product(e, e)?.re;
        rest = rest - e * c;
    }
    Ok(rest.norm() / v.norm().max(1.0))
}

/// K-orbit invariance, `φ(P_z) ⊂ P_{φ(z)}` and `dφ(z) V_z ⊂ V_{φ(z)}` at a
/// nonzero `z`.
pub fn orbit_and_polydisc_checks(map: &impl SmoothMap, z: &Element, seed: u64, h: f64) -> Result<OrbitReport> {
    if z.is_zero() {
        return Err(Error::DegenerateSpectrum("the orbit checks need z != 0".into()));
    }
    let fz = map.eval(z)?;
    let before = frame_decompose(z)?.lambdas;
    let after = frame_decompose(&fz)?.lambdas;
    let spectral_defect = before
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let source = spectral(z)?.tripotents;
    let target = spectral(&fz)?.tripotents;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut radiality_defect: f64 = 0.0;
    for _ in 0..RADIALITY_SAMPLES {
        let w = source.iter().fold(z.system().zero(), |acc, e| {
            let t = C64::from_polar(0.9 * rng.gen::<f64>(), 2.0 * PI * rng.gen::<f64>());
            acc + e * t
        });
        radiality_defect = radiality_defect.max(distance_to_span(&map.eval(&w)?, &target)?);
    }

    let mut tangent_defect: f64 = 0.0;
    for e in &source {
        for v in [e.clone(), e.scale(I)] {
            let dv = directional_derivative(map, z, &v, h)?;
            tangent_defect = tangent_defect.max(distance_to_span(&dv, &target)?);
        }
    }
    Ok(OrbitReport {
        spectral_defect,
        radiality_defect,
        tangent_defect,
    })
}

/// `(max φ*ω₀ vs ω₀, max φ*ω₋ vs ω₋)` relative residuals over `samples`.
pub fn membership_residuals(map: &impl SmoothMap, samples: &[Element], h: f64) -> Result<(f64, f64)> {
    let mut worst = (0.0f64, 0.0f64);
    for z in samples {
        let flat = relative_form_residual(
            &pullback_two_form(map, FormKind::Flat, z, h)?,
            &form_matrix(FormKind::Flat, z)?,
        );
        let hyp = relative_form_residual(
            &pullback_two_form(map, FormKind::Hyperbolic, z, h)?,
            &form_matrix(FormKind::Hyperbolic, z)?,
        );
        worst = (worst.0.max(flat), worst.1.max(hyp));
    }
    Ok(worst)
}

/// `z ↦ z / 2`, which preserves neither form.
pub fn half_scale() -> FnMap<impl Fn(&Element) -> Result<Element>> {
    FnMap::new("z/2", MapDomain::Ball, |z: &Element| Ok(z * 0.5))
}

/// The disc automorphism `z ↦ (z - a) / (1 - ā z)`; it preserves `ω₋` only.
pub fn disc_mobius(a: C64) -> FnMap<impl Fn(&Element) -> Result<Element>> {
    FnMap::new("mobius", MapDomain::Ball, move |z: &Element| {
        if z.system() != TripleSystem::disc() {
            return Err(Error::DomainMismatch);
        }
        let w = z.coords()[0];
        Element::new(z.system(), vec![(w - a) / (C64::new(1.0, 0.0) - a.conj() * w)])
    })
}

/// `(z_1, e^{i|z_1|²} z_2, z_3, ...)` on a polydisc: the phase of one
/// coordinate depends on another.
pub fn polydisc_coupling() -> FnMap<impl Fn(&Element) -> Result<Element>> {
    FnMap::new("coupling", MapDomain::Ball, |z: &Element| {
        match z.system().family() {
            Family::Polydisc { r } if r >= 2 => {}
            _ => return Err(Error::DomainMismatch),
        }
        let mut out = z.clone();
        let c = out.coords()[0].norm_sqr();
        out.coords_mut()[1] *= C64::from_polar(1.0, c);
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pullback::{IdentityMap, DEFAULT_FD_STEP};
    use crate::spectral::{sample_ball, SampleMode};

    const H: f64 = DEFAULT_FD_STEP;

    fn families() -> Vec<TripleSystem> {
        vec![
            TripleSystem::disc(),
            TripleSystem::ball(2).unwrap(),
            TripleSystem::type_i(2, 2).unwrap(),
            TripleSystem::type_i(2, 3).unwrap(),
            TripleSystem::polydisc(3).unwrap(),
        ]
    }

    #[test]
    fn circle_function_basics() {
        let u = CircleFunction::new(vec![PI]).unwrap();
        assert_eq!(u.eval(0.0), C64::new(1.0, 0.0));
        assert!((u.eval(0.25) - C64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        let v = CircleFunction::new(vec![0.3, -1.2, 0.7]).unwrap();
        assert_eq!(u.product(&v), v.product(&u));
        assert!((v.eval(0.6).norm() - 1.0).abs() < 1e-15);
        assert!(u.product(&u.conj()).coeffs().iter().all(|&c| c == 0.0));
        assert!(CircleFunction::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn radial_examples() {
        let d = TripleSystem::disc();
        let z = Element::diagonal(d, &[0.5]).unwrap();
        let u = RadialPart::Uniform(CircleFunction::new(vec![PI]).unwrap());
        let fz = radial_circular_apply(&u, &z).unwrap();
        assert!((fz.coords()[0] - C64::from_polar(0.5, PI / 4.0)).norm() < 1e-15);
        let one = RadialPart::Uniform(CircleFunction::one());
        for s in families() {
            let phi = Bisymplectomorphism::random(s, 4, 3);
            for z in sample_ball(s, 1, 5, SampleMode::Generic, 0.9).unwrap() {
                assert!((radial_circular_apply(&one, &z).unwrap() - &z).max_abs() < 1e-14);
                let fz = radial_circular_apply(&phi.u, &z).unwrap();
                assert!((spectral_norm(&fz) - spectral_norm(&z)).abs() < 1e-12);
            }
            assert!(phi.apply(&s.zero()).unwrap().is_zero());
        }
        assert!(matches!(
            radial_circular_apply(&u, &Element::diagonal(d, &[1.0]).unwrap()),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn automorphisms_preserve_triple() {
        for s in families() {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let k = LinearAutomorphism::random(s, &mut rng);
            assert!(k.triple_defect() < 1e-12, "{s}");
            let id = k.compose(&k.inverse()).unwrap();
            assert!((id.matrix() - DMatrix::<C64>::identity(s.dim(), s.dim())).camax() < 1e-12);
        }
        let bad = DMatrix::from_element(1, 1, C64::new(2.0, 0.0));
        assert!(LinearAutomorphism::type_i(bad, DMatrix::identity(1, 1)).is_err());
        assert!(LinearAutomorphism::polydisc(vec![0, 0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn rotation_of_disc() {
        let d = TripleSystem::disc();
        let phi = Bisymplectomorphism::new(
            LinearAutomorphism::rotation(d, 0.7),
            RadialPart::Uniform(CircleFunction::one()),
        )
        .unwrap();
        let z = Element::new(d, vec![C64::new(0.2, -0.1)]).unwrap();
        let w = phi.apply(&z).unwrap();
        assert!((w.coords()[0] - z.coords()[0] * C64::from_polar(1.0, 0.7)).norm() < 1e-15);
        let dphi = differential_at_origin(&phi, d, H).unwrap();
        let (c, s) = (0.7f64.cos(), 0.7f64.sin());
        assert!((dphi.jacobian - DMatrix::from_row_slice(2, 2, &[c, -s, s, c])).amax() < 1e-10);
        assert!(dphi.is_in_k);
    }

    #[test]
    fn group_law() {
        for s in families() {
            let a = Bisymplectomorphism::random(s, 10, 2);
            let b = Bisymplectomorphism::random(s, 11, 3);
            let ab = a.compose(&b).unwrap();
            let id = a.compose(&a.inverse()).unwrap();
            for z in sample_ball(s, 2, 5, SampleMode::Generic, 0.9).unwrap() {
                let two = a.apply(&b.apply(&z).unwrap()).unwrap();
                assert!((ab.apply(&z).unwrap() - two).max_abs() < 1e-10, "{s}");
                assert!((id.apply(&z).unwrap() - &z).max_abs() < 1e-10, "{s}");
                let f = Bisymplectomorphism::radial(s, a.u.clone()).unwrap();
                let kf = a.k.apply(&f.apply(&z).unwrap()).unwrap();
                let fk = f.apply(&a.k.apply(&z).unwrap()).unwrap();
                if s.family() != (Family::Polydisc { r: 3 }) {
                    assert!((kf - fk).max_abs() < 1e-10, "{s}");
                }
            }
        }
    }

    #[test]
    fn members_pass() {
        for s in families() {
            let phi = Bisymplectomorphism::random(s, 21, 3);
            let samples = sample_ball(s, 3, 4, SampleMode::Generic, 0.9).unwrap();
            let (flat, hyp) = membership_residuals(&phi, &samples, H).unwrap();
            assert!(flat < 1e-6 && hyp < 1e-6, "{s}: {flat} {hyp}");
            for z in &samples {
                assert!(check_intertwining(&phi, z, H).unwrap() < 1e-5);
            }
            let d0 = differential_at_origin(&phi, s, H).unwrap();
            assert!((d0.jacobian - realify_k(&phi.k)).amax() < 1e-7, "{s}");
            assert!(d0.is_in_k);
            let z = &sample_ball(s, 9, 1, SampleMode::SuperRegular, 0.9).unwrap()[0];
            let report = orbit_and_polydisc_checks(&phi, z, 5, H).unwrap();
            assert!(report.pass(), "{s}: {report:?}");
        }
    }

    fn realify_k(k: &LinearAutomorphism) -> DMatrix<f64> {
        crate::triple::realify(&k.matrix())
    }

    #[test]
    fn identity_checks() {
        let s = TripleSystem::type_i(2, 3).unwrap();
        let z = &sample_ball(s, 3, 1, SampleMode::Generic, 0.9).unwrap()[0];
        assert!(check_intertwining(&IdentityMap, z, H).unwrap() < 1e-12);
        let r = orbit_and_polydisc_checks(&IdentityMap, z, 1, H).unwrap();
        assert!(r.spectral_defect < 1e-15 && r.radiality_defect < 1e-14 && r.tangent_defect < 1e-9);
    }

    #[test]
    fn non_members_fail() {
        let d = TripleSystem::disc();
        let z = Element::diagonal(d, &[0.5]).unwrap();
        assert!(check_intertwining(&half_scale(), &z, H).unwrap() >= 0.1);
        let m = disc_mobius(C64::new(0.3, 0.0));
        let samples = sample_ball(d, 4, 20, SampleMode::Generic, 0.9).unwrap();
        let (flat, hyp) = membership_residuals(&m, &samples, H).unwrap();
        assert!(flat >= 0.05 && hyp < 1e-6, "{flat} {hyp}");
        let p = TripleSystem::polydisc(3).unwrap();
        let z = Element::new(p, vec![C64::new(0.6, 0.1), C64::new(-0.2, 0.3), C64::new(0.1, 0.0)]).unwrap();
        assert!(check_intertwining(&polydisc_coupling(), &z, H).unwrap() > 1e-2);
        let d0 = differential_at_origin(&half_scale(), TripleSystem::type_i(2, 2).unwrap(), H).unwrap();
        assert!(!d0.is_in_k);
    }
}
