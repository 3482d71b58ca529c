//! Finite-difference Jacobians of smooth maps and pullbacks of the
//! symplectic forms along them.

use nalgebra::DMatrix;

use crate::calculus::{duality_f, duality_g, DualityMethod};
use crate::error::{Error, Result};
use crate::forms::{form_matrix, FormKind, TwoFormMatrix};
use crate::spectral::spectral_norm;
use crate::triple::{Element, I};

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// A smooth map defined on an open subset of `V`, with values in `V`.
pub trait SmoothMap {
    fn name(&self) -> String;
    fn eval(&self, z: &Element) -> Result<Element>;
    fn in_domain(&self, z: &Element) -> bool;
}

impl<M: SmoothMap + ?Sized> SmoothMap for &M {
    fn name(&self) -> String {
        (**self).name()
    }
    fn eval(&self, z: &Element) -> Result<Element> {
        (**self).eval(z)
    }
    fn in_domain(&self, z: &Element) -> bool {
        (**self).in_domain(z)
    }
}

impl<M: SmoothMap + ?Sized> SmoothMap for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn eval(&self, z: &Element) -> Result<Element> {
        (**self).eval(z)
    }
    fn in_domain(&self, z: &Element) -> bool {
        (**self).in_domain(z)
    }
}

/// Where a map is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapDomain {
    /// The whole space `V`.
    Whole,
    /// The unit ball `Ω` of the spectral norm.
    Ball,
}

impl MapDomain {
    pub fn contains(&self, z: &Element) -> bool {
        match self {
            MapDomain::Whole => z.is_finite(),
            MapDomain::Ball => spectral_norm(z) < 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityMap;

impl SmoothMap for IdentityMap {
    fn name(&self) -> String {
        "identity".into()
    }
    fn eval(&self, z: &Element) -> Result<Element> {
        Ok(z.clone())
    }
    fn in_domain(&self, z: &Element) -> bool {
        z.is_finite()
    }
}

/// `F(z) = B(z, z)^(-1/4) z` on `Ω`.
#[derive(Clone, Copy, Debug)]
pub struct DualityF(pub DualityMethod);

impl Default for DualityF {
    fn default() -> Self {
        Self(DualityMethod::Operator)
    }
}

impl SmoothMap for DualityF {
    fn name(&self) -> String {
        "F".into()
    }
    fn eval(&self, z: &Element) -> Result<Element> {
        duality_f(z, self.0)
    }
    fn in_domain(&self, z: &Element) -> bool {
        MapDomain::Ball.contains(z)
    }
}

/// `G(z) = B(z, -z)^(-1/4) z` on `V`.
#[derive(Clone, Copy, Debug)]
pub struct DualityG(pub DualityMethod);

impl Default for DualityG {
    fn default() -> Self {
        Self(DualityMethod::Operator)
    }
}

impl SmoothMap for DualityG {
    fn name(&self) -> String {
        "G".into()
    }
    fn eval(&self, z: &Element) -> Result<Element> {
        duality_g(z, self.0)
    }
    fn in_domain(&self, z: &Element) -> bool {
        MapDomain::Whole.contains(z)
    }
}

/// A map given by a closure.
pub struct FnMap<F> {
    name: String,
    domain: MapDomain,
    f: F,
}

impl<F: Fn(&Element) -> Result<Element>> FnMap<F> {
    pub fn new(name: impl Into<String>, domain: MapDomain, f: F) -> Self {
        Self {
            name: name.into(),
            domain,
            f,
        }
    }
}

impl<F: Fn(&Element) -> Result<Element>> SmoothMap for FnMap<F> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn eval(&self, z: &Element) -> Result<Element> {
        (self.f)(z)
    }
    fn in_domain(&self, z: &Element) -> bool {
        self.domain.contains(z)
    }
}

/// `outer ∘ inner`.
pub struct Composed<A, B> {
    pub outer: A,
    pub inner: B,
}

impl<A: SmoothMap, B: SmoothMap> Composed<A, B> {
    pub fn new(outer: A, inner: B) -> Self {
        Self { outer, inner }
    }
}

impl<A: SmoothMap, B: SmoothMap> SmoothMap for Composed<A, B> {
    fn name(&self) -> String {
        format!("{}∘{}", self.outer.name(), self.inner.name())
    }
    fn eval(&self, z: &Element) -> Result<Element> {
        self.outer.eval(&self.inner.eval(z)?)
    }
    fn in_domain(&self, z: &Element) -> bool {
        self.inner.in_domain(z) && self.inner.eval(z).map(|w| self.outer.in_domain(&w)).unwrap_or(false)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FdScheme {
    Central,
    /// One level of Richardson extrapolation on top of central differences.
    #[default]
    Richardson,
}

/// Tangent direction `m` of the interleaved realified basis.
fn real_direction(z: &Element, m: usize) -> Element {
    let b = z.system().basis(m / 2);
    if m.is_multiple_of(2) {
        b
    } else {
        b.scale(I)
    }
}

// Divides by the step actually realized in floating point, which removes
// the representation error of `z ± step`.
fn central_column(map: &impl SmoothMap, z: &Element, m: usize, step: f64) -> Result<nalgebra::DVector<f64>> {
    let dir = real_direction(z, m);
    let plus = z + &(&dir * step);
    let minus = z - &(&dir * step);
    if !map.in_domain(&plus) || !map.in_domain(&minus) {
        return Err(Error::StepLeavesDomain);
    }
    let width = plus.to_real()[m] - minus.to_real()[m];
    let diff = map.eval(&plus)? - map.eval(&minus)?;
    Ok(diff.to_real() / width)
}

/// Realified Jacobian with step `h · max(1, ||z||)`, using the default
/// [`FdScheme`].
pub fn numerical_jacobian(map: &impl SmoothMap, z: &Element, h: f64) -> Result<DMatrix<f64>> {
    numerical_jacobian_with(map, z, h, FdScheme::default())
}

pub fn numerical_jacobian_with(map: &impl SmoothMap, z: &Element, h: f64, scheme: FdScheme) -> Result<DMatrix<f64>> {
    if !map.in_domain(z) {
        return Err(Error::OutsideDomain(spectral_norm(z)));
    }
    let step = h * spectral_norm(z).max(1.0);
    let n2 = 2 * z.system().dim();
    let mut jac = DMatrix::zeros(n2, n2);
    for m in 0..n2 {
        let col = match scheme {
            FdScheme::Central => central_column(map, z, m, step)?,
            FdScheme::Richardson => {
                let coarse = central_column(map, z, m, step)?;
                let fine = central_column(map, z, m, step / 2.0)?;
                (fine * 4.0 - coarse) / 3.0
            }
        };
        jac.set_column(m, &col);
    }
    Ok(jac)
}

/// `d map(z) v` by Richardson-extrapolated central differences.
pub fn directional_derivative(map: &impl SmoothMap, z: &Element, v: &Element, h: f64) -> Result<Element> {
    let step = h * spectral_norm(z).max(1.0);
    let central = |t: f64| -> Result<Element> {
        let plus = z + &(v * t);
        let minus = z - &(v * t);
        if !map.in_domain(&plus) || !map.in_domain(&minus) {
            return Err(Error::StepLeavesDomain);
        }
        Ok((map.eval(&plus)? - map.eval(&minus)?) * (0.5 / t))
    };
    let coarse = central(step)?;
    let fine = central(step / 2.0)?;
    Ok((fine * 4.0 - coarse) * (1.0 / 3.0))
}

/// `Jᵀ M(map(z)) J`, recorded at base point `z`.
pub fn pullback_two_form(map: &impl SmoothMap, target: FormKind, z: &Element, h: f64) -> Result<TwoFormMatrix> {
    let jac = numerical_jacobian(map, z, h)?;
    let image = map.eval(z)?;
    let m = form_matrix(target, &image)?;
    Ok(TwoFormMatrix {
        base: z.clone(),
        matrix: jac.transpose() * m.matrix * jac,
    })
}

/// `max |P - T| / max(1, max |T|)`.
pub fn relative_form_residual(pulled: &TwoFormMatrix, target: &TwoFormMatrix) -> f64 {
    (&pulled.matrix - &target.matrix).amax() / target.max_abs().max(1.0)
}

/// The four pullback identities relating `ω₀`, `ω₋` and `ω₊`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DualityDirection {
    /// `F*ω₀ = ω₋`
    F0Minus,
    /// `F*ω₊ = ω₀`
    FPlus0,
    /// `G*ω₀ = ω₊`
    G0Plus,
    /// `G*ω₋ = ω₀`
    GMinus0,
}

impl DualityDirection {
    pub const ALL: [DualityDirection; 4] = [
        DualityDirection::F0Minus,
        DualityDirection::FPlus0,
        DualityDirection::G0Plus,
        DualityDirection::GMinus0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DualityDirection::F0Minus => "F*omega0=omega_minus",
            DualityDirection::FPlus0 => "F*omega_plus=omega0",
            DualityDirection::G0Plus => "G*omega0=omega_plus",
            DualityDirection::GMinus0 => "G*omega_minus=omega0",
        }
    }

    /// `(form pulled back, form it should equal)`.
    pub fn forms(&self) -> (FormKind, FormKind) {
        match self {
            DualityDirection::F0Minus => (FormKind::Flat, FormKind::Hyperbolic),
            DualityDirection::FPlus0 => (FormKind::FubiniStudy, FormKind::Flat),
            DualityDirection::G0Plus => (FormKind::Flat, FormKind::FubiniStudy),
            DualityDirection::GMinus0 => (FormKind::Hyperbolic, FormKind::Flat),
        }
    }

    /// Whether the map is `F` (samples in `Ω`) rather than `G` (samples in `V`).
    pub fn uses_f(&self) -> bool {
        matches!(self, DualityDirection::F0Minus | DualityDirection::FPlus0)
    }
}

/// Largest relative pullback residual of `direction` over `samples`.
pub fn duality_residual(direction: DualityDirection, samples: &[Element], h: f64) -> Result<f64> {
    let (pulled, expected) = direction.forms();
    let mut worst: f64 = 0.0;
    for z in samples {
        let p = if direction.uses_f() {
            pullback_two_form(&DualityF::default(), pulled, z, h)?
        } else {
            pullback_two_form(&DualityG::default(), pulled, z, h)?
        };
        let t = form_matrix(expected, z)?;
        worst = worst.max(relative_form_residual(&p, &t));
    }
    Ok(worst)
}

/// `|det(Jᵀ M_pulled(map(z)) J) - det M_reference(z)| / |det M_reference(z)|`.
pub fn top_power_residual(
    map: &impl SmoothMap,
    pulled: FormKind,
    reference: FormKind,
    z: &Element,
    h: f64,
) -> Result<f64> {
    let p = pullback_two_form(map, pulled, z, h)?.determinant();
    let r = form_matrix(reference, z)?.determinant();
    Ok((p - r).abs() / r.abs())
}
